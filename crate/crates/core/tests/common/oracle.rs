//! Brute-force oracles and the per-case checks shared by the property suites and the
//! acceptance run. Each case returns a description of the first disagreement.

use equilibra_core::ne::{ne_outcome_check, profile_outcome, verify_ne_energy, Answer, Thresholds};
use equilibra_core::nego::{nego, nego_iterate, nego_parity_enumerated};
use equilibra_core::risk::{
    extreme_measure, is_cycle_friendly, optimist_profile, verify_xrse, xrse_constrained_optimists, xrse_search_bounded,
};
use equilibra_core::{eval_lasso, Ext, Game, Lasso, MemoryProfile};

use super::*;

pub fn labels(seed: u64, n: usize) -> Vec<Ext> {
    let xs = [Ext::NegInf, Ext::int(0), Ext::int(1), Ext::PosInf];
    (0..n).map(|v| xs[((seed >> (2 * v)) & 3) as usize].clone()).collect()
}

pub fn leq(a: &[Ext], b: &[Ext]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Outcome of a pure positional profile from `v`.
pub fn follow(choice: &[usize], v: usize) -> Lasso {
    let mut path = vec![v];
    loop {
        let w = choice[*path.last().unwrap()];
        if let Some(k) = path.iter().position(|&x| x == w) {
            return Lasso::new(path[..k].to_vec(), path[k..].to_vec());
        }
        path.push(w);
    }
}

/// All positional choice functions restricted to the vertices in `free`, the others fixed by `base`.
pub fn choices(game: &Game, base: &[usize], free: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![base.to_vec()];
    for &v in free {
        out = out
            .into_iter()
            .flat_map(|c| {
                game.arena.succ(v).map(move |w| {
                    let mut c = c.clone();
                    c[v] = w;
                    c
                })
            })
            .collect();
    }
    out
}

/// Adversarial value of the controller of `v`: best positional strategy against the
/// best positional reply of the coalition of the others.
pub fn brute_val(game: &Game, v: usize) -> Ext {
    let a = &game.arena;
    let i = a.controller(v).unwrap();
    let base: Vec<usize> = (0..a.n()).map(|u| a.succ(u).next().unwrap()).collect();
    let mine: Vec<usize> = (0..a.n()).filter(|&u| a.controller(u) == Some(i)).collect();
    let theirs: Vec<usize> = (0..a.n()).filter(|&u| a.controller(u) != Some(i)).collect();
    choices(game, &base, &mine)
        .iter()
        .map(|s| {
            choices(game, s, &theirs)
                .iter()
                .map(|t| eval_lasso(game, &follow(t, v), i).unwrap())
                .min()
                .unwrap()
        })
        .max()
        .unwrap()
}

pub fn simple_lassos(game: &Game, v0: usize) -> Vec<Lasso> {
    fn go(game: &Game, path: &mut Vec<usize>, out: &mut Vec<Lasso>) {
        let u = *path.last().unwrap();
        for w in game.arena.succ(u).collect::<Vec<_>>() {
            match path.iter().position(|&x| x == w) {
                Some(k) => out.push(Lasso::new(path[..k].to_vec(), path[k..].to_vec())),
                None => {
                    path.push(w);
                    go(game, path, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(game, &mut vec![v0], &mut out);
    out
}

pub fn brute_ne_outcome(game: &Game, l: &Lasso, val: &[Ext]) -> bool {
    l.vertices().iter().all(|&v| {
        let i = game.arena.controller(v).unwrap();
        eval_lasso(game, l, i).unwrap() >= val[v]
    })
}

/// XRSE by brute force: no deviation positional in (memory state, vertex) improves
/// any player's extreme measure.
pub fn brute_xrse(game: &Game, pess: &[bool], m: &MemoryProfile) -> bool {
    let cur = extreme_measure(game, pess, m).unwrap();
    (0..game.p()).all(|i| {
        positional_deviations(game, m, i).iter().all(|d| extreme_measure(game, pess, d).unwrap()[i] <= cur[i])
    })
}

/// Every edge set keeping all chance edges and a nonempty subset at each controlled vertex.
pub fn edge_sets(game: &Game) -> Vec<Vec<bool>> {
    let a = &game.arena;
    let mut out = vec![vec![true; a.m()]];
    for v in 0..a.n() {
        if a.controller(v).is_none() {
            continue;
        }
        let es = a.out_edges(v).to_vec();
        out = out
            .into_iter()
            .flat_map(|f| {
                let es = es.clone();
                (1u32..(1 << es.len())).map(move |mask| {
                    let mut f = f.clone();
                    for (k, &e) in es.iter().enumerate() {
                        f[e] = mask >> k & 1 == 1;
                    }
                    f
                })
            })
            .collect();
    }
    out
}

pub fn in_range(x: &[equilibra_core::Q], th: &Thresholds) -> bool {
    th.admits(&x.iter().map(|q| Ext::Fin(q.clone())).collect::<Vec<_>>())
}

pub fn random_bounds(seed: u64, p: usize, lo: i64, hi: i64) -> Thresholds {
    let mut th = Thresholds::unbounded(p);
    let span = (hi - lo + 2) as u64;
    for i in 0..p {
        let a = (seed >> (8 * i)) % span;
        let b = (seed >> (8 * i + 4)) % span;
        if a > 0 {
            th.lower[i] = Ext::int(lo + a as i64 - 1);
        }
        if b > 0 {
            th.upper[i] = Ext::int(lo + b as i64 - 1);
        }
    }
    th
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// nego is non-decreasing and monotone, agrees with the Challenger enumeration on
/// small games, and its iteration from the vacuous requirement climbs to a fixed point.
pub fn nego_case(seed: u64, n: usize, l1: u64, l2: u64) -> Result<(), String> {
    let g = parity_game(seed, n);
    let a = labels(l1, n);
    let b: Vec<Ext> = a.iter().zip(labels(l2, n)).map(|(x, y)| x.clone().max(y)).collect();
    let (na, nb) = (nego(&g, &a).unwrap(), nego(&g, &b).unwrap());
    check(leq(&a, &na), || format!("λ ≤ nego(λ) fails: {a:?} -> {na:?}"))?;
    check(leq(&na, &nb), || format!("monotonicity fails: {a:?} ≤ {b:?}"))?;
    // The Challenger enumeration takes seconds to minutes from three vertices on.
    if n <= 2 {
        check(na == nego_parity_enumerated(&g, &a).unwrap(), || "solver and enumeration disagree".into())?;
    }
    let (seq, fixed) = nego_iterate(&g, n + 1).unwrap();
    check(fixed, || "no fixed point within n+1 steps".into())?;
    check(seq.windows(2).all(|w| leq(&w[0], &w[1])), || "iterates decrease".into())
}

/// ne-check against adversarial values computed by positional brute force, on every simple lasso.
pub fn ne_case(seed: u64, n: usize, mp: bool) -> Result<(), String> {
    let g = if mp { weighted_game(seed, n, "mean-payoff", -2, 2) } else { parity_game(seed, n) };
    let val: Vec<Ext> = (0..g.n()).map(|v| brute_val(&g, v)).collect();
    for l in simple_lassos(&g, 0) {
        let (x, y) = (ne_outcome_check(&g, &l).unwrap(), brute_ne_outcome(&g, &l, &val));
        check(x == y, || format!("lasso {}: ne-check {x}, brute force {y}", l.display(&g.arena)))?;
    }
    Ok(())
}

pub fn xrse_case(seed: u64, live: usize, terms: usize, states: usize, pseed: u8) -> Result<(), String> {
    let g = stochastic_game(seed, live, terms, -2, 3);
    let m = random_profile(&g, seed, states, seed % 3 == 0);
    let pess = vec![pseed & 1 == 1, pseed & 2 == 2];
    let (x, y) = (verify_xrse(&g, &pess, &m).unwrap(), brute_xrse(&g, &pess, &m));
    check(x == y, || format!("verify_xrse {x}, brute force {y}"))
}

/// The optimist algorithms against every edge set F with its profile σ^F, and against the
/// stationary profiles found by the bounded search. Payoffs in 0..=2, or -1..=2 when `signed`.
pub fn optimist_case(seed: u64, live: usize, terms: usize, b: u64, signed: bool) -> Result<(), String> {
    let lo = if signed { -1 } else { 0 };
    let g = stochastic_game(seed, live, terms, lo, 2);
    let th = random_bounds(b, g.p(), lo, 2);
    let friendly = is_cycle_friendly(&th);
    let none = vec![false; g.p()];
    let exhaustive = edge_sets(&g).into_iter().any(|f| {
        let m = optimist_profile(&g, &f, friendly).unwrap();
        verify_xrse(&g, &none, &m).unwrap() && in_range(&extreme_measure(&g, &none, &m).unwrap(), &th)
    });
    let (ans, _) = xrse_constrained_optimists(&g, &th).unwrap();
    if let Answer::Yes(f) = &ans {
        let m = optimist_profile(&g, f, friendly).unwrap();
        check(verify_xrse(&g, &none, &m).unwrap(), || "output profile is not an XRSE".into())?;
        check(in_range(&extreme_measure(&g, &none, &m).unwrap(), &th), || "output measures out of range".into())?;
    }
    check(ans.is_yes() == exhaustive, || format!("algorithm {}, exhaustive {exhaustive}", ans.label()))?;
    if xrse_search_bounded(&g, &none, &th, 1).unwrap().is_some() {
        check(ans.is_yes(), || "a stationary XRSE exists but the algorithm says no".into())?;
    }
    Ok(())
}

/// verify_ne_energy against every deviation positional in (memory state, vertex).
pub fn energy_case(seed: u64, n: usize, states: usize) -> Result<(), String> {
    let g = weighted_game(seed, n, "energy", -1, 1);
    let m = random_profile(&g, seed, states, true);
    let out = profile_outcome(&g, &m).unwrap();
    let brute = (0..g.p()).all(|i| {
        eval_lasso(&g, &out, i).unwrap() == Ext::int(1)
            || positional_deviations(&g, &m, i)
                .iter()
                .all(|d| eval_lasso(&g, &profile_outcome(&g, d).unwrap(), i).unwrap() == Ext::int(0))
    });
    let x = verify_ne_energy(&g, &m).unwrap();
    check(x == brute, || format!("verify_ne_energy {x}, brute force {brute}"))
}

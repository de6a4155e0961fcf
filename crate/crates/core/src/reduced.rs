//! Reduced negotiation for mean-payoff games: Prover proposes punishment families
//! `h·c^n·π` (a simple history, a pumped simple cycle, then a play visiting exactly
//! `W` with payoff `x`), Challenger accepts or lets player `i` deviate.
//!
//! Two independent pieces live here. [`reduced_holds`] solves the reduced game as an
//! energy game and yields a stationary Prover strategy; [`mp_deviation_graph_value`]
//! checks a given stationary strategy on its deviation graph.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::game::{Game, Owner};
use crate::graph;
use crate::lasso::cycle_mean;
use crate::nego::demands;
use crate::num::{fmt_q, parse_q_canonical, Ext, Q};
use crate::poly;
use crate::zs::{self, Graph2};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub h: Vec<usize>,
    pub c: Vec<usize>,
    /// Sorted vertex set of the tail play.
    pub w: Vec<usize>,
    pub x: Vec<Q>,
}

/// A stationary Prover strategy: one family per vertex where a proposal is made.
pub type ProverStrategy = BTreeMap<usize, Family>;

impl Family {
    pub fn first(&self) -> usize {
        self.h.first().copied().unwrap_or(self.c[0])
    }

    pub fn occ(&self) -> Vec<usize> {
        let mut o: Vec<usize> = self.h.iter().chain(&self.c).chain(&self.w).copied().collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    pub fn to_json(&self, game: &Game) -> Value {
        let names = |xs: &[usize]| xs.iter().map(|&v| game.arena.name(v).to_string()).collect::<Vec<_>>();
        let x: Map<String, Value> =
            self.x.iter().enumerate().map(|(j, q)| (game.arena.players[j].clone(), json!(fmt_q(q)))).collect();
        json!({ "h": names(&self.h), "c": names(&self.c), "W": names(&self.w), "x": x })
    }

    pub fn from_json(game: &Game, v: &Value) -> Result<Family> {
        let o = v.as_object().ok_or_else(|| Error::Parse("family: expected an object".into()))?;
        let verts = |key: &str| -> Result<Vec<usize>> {
            o.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("family.{key}: expected an array")))?
                .iter()
                .map(|x| {
                    let s = x.as_str().ok_or_else(|| Error::Parse(format!("family.{key}: expected names")))?;
                    game.arena.vertex_or_err(s)
                })
                .collect()
        };
        let mut w = verts("W")?;
        w.sort_unstable();
        w.dedup();
        let xo = o.get("x").and_then(Value::as_object).ok_or_else(|| Error::Parse("family.x: expected an object".into()))?;
        let mut x = Vec::new();
        for p in &game.arena.players {
            let s = xo
                .get(p)
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse(format!("family.x: missing player {p}")))?;
            x.push(parse_q_canonical(s)?);
        }
        Ok(Family { h: verts("h")?, c: verts("c")?, w, x })
    }
}

pub fn strategy_to_json(game: &Game, tau: &ProverStrategy) -> Value {
    let m: Map<String, Value> = tau.iter().map(|(&u, f)| (game.arena.name(u).to_string(), f.to_json(game))).collect();
    Value::Object(m)
}

pub fn strategy_from_json(game: &Game, v: &Value) -> Result<ProverStrategy> {
    let o = v.as_object().ok_or_else(|| Error::Parse("strategy: expected an object".into()))?;
    o.iter().map(|(k, f)| Ok((game.arena.vertex_or_err(k)?, Family::from_json(game, f)?))).collect()
}

/// Vertex set `W` (sorted) admits a play that starts at `start` and visits exactly `W`:
/// its components form a chain from the one of `start`, ending in a nontrivial one.
/// Returns that last component.
pub fn chain_tail(game: &Game, w: &[usize], start: usize) -> Option<Vec<usize>> {
    let adj = game.arena.adjacency();
    let mut alive = vec![false; game.n()];
    for &v in w {
        alive[v] = true;
    }
    if !alive[start] {
        return None;
    }
    let mut comps = graph::sccs(&adj, &alive);
    comps.reverse();
    if !comps[0].contains(&start) {
        return None;
    }
    for k in 1..comps.len() {
        let linked = comps[k - 1].iter().any(|&u| adj[u].iter().any(|t| comps[k].contains(t)));
        if !linked {
            return None;
        }
    }
    let last = comps.pop().unwrap();
    graph::is_nontrivial(&adj, &last).then_some(last)
}

fn reward_path(game: &Game, path: &[usize], i: usize) -> Q {
    path.windows(2).map(|e| game.reward_uv(e[0], e[1], i).clone()).sum()
}

/// Deviations of `i` along the first traversal of `h·c`: (target, reward of `h'·v`, |h'|).
fn pre_deviations(game: &Game, f: &Family, i: usize) -> Vec<(usize, Q, usize)> {
    let seq: Vec<usize> = f.h.iter().chain(&f.c).copied().collect();
    let mut out = Vec::new();
    for k in 1..=seq.len() {
        let u = seq[k - 1];
        if game.arena.owner(u) != Owner::Player(i) {
            continue;
        }
        let base = reward_path(game, &seq[..k], i);
        for v in game.arena.succ(u) {
            out.push((v, &base + game.reward_uv(u, v, i), k));
        }
    }
    out
}

/// Deviations of `i` once the cycle has been pumped: from the cycle or the tail.
fn post_deviations(game: &Game, f: &Family, i: usize) -> Vec<usize> {
    let mut src: Vec<usize> = f.c.iter().chain(&f.w).copied().collect();
    src.sort_unstable();
    src.dedup();
    let mut out: Vec<usize> = src
        .into_iter()
        .filter(|&u| game.arena.owner(u) == Owner::Player(i))
        .flat_map(|u| game.arena.succ(u))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn simple_paths_from(adj: &[Vec<usize>], s: usize) -> Vec<Vec<usize>> {
    fn go(adj: &[Vec<usize>], path: &mut Vec<usize>, on: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        let v = *path.last().unwrap();
        for &w in &adj[v] {
            if !on[w] {
                on[w] = true;
                path.push(w);
                go(adj, path, on, out);
                path.pop();
                on[w] = false;
            }
        }
    }
    let mut on = vec![false; adj.len()];
    on[s] = true;
    let mut out = Vec::new();
    go(adj, &mut vec![s], &mut on, &mut out);
    out
}

/// Simple cycles through `u`, written so that they end at `u`, avoiding `forbid`.
fn cycles_ending_at(adj: &[Vec<usize>], u: usize, forbid: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for p in simple_paths_from(adj, u) {
        let last = *p.last().unwrap();
        if adj[last].contains(&u) && p[1..].iter().all(|v| !forbid.contains(v)) {
            let mut c = p[1..].to_vec();
            c.push(u);
            out.push(c);
        }
    }
    out
}

/// Data shared by every family with a given tail set.
struct Tail {
    w: Vec<usize>,
    points: Vec<Vec<Q>>,
}

fn tails_from(game: &Game, start: usize) -> Vec<Tail> {
    let n = game.n();
    let adj = game.arena.adjacency();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        if mask >> start & 1 == 0 {
            continue;
        }
        let wset: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if let Some(k) = chain_tail(game, &wset, start) {
            let mut alive = vec![false; n];
            for &v in &k {
                alive[v] = true;
            }
            let points = graph::simple_cycles(&adj, &alive)
                .iter()
                .map(|c| (0..game.p()).map(|j| cycle_mean(game, c, j)).collect())
                .collect();
            out.push(Tail { w: wset, points });
        }
    }
    out
}

/// Punishment families from `w` that keep player `i` at or below `alpha`:
/// λ-consistent, with `x_i <= alpha` and a punishing cycle of mean at most `alpha`.
/// `x` minimises `x_i` over the cycle hull of the last component of `W` above the demands.
pub fn candidate_families(game: &Game, lambda: &[Ext], i: usize, w: usize, alpha: &Q) -> Vec<Family> {
    let adj = game.arena.adjacency();
    let mut tails: HashMap<usize, Vec<Tail>> = HashMap::new();
    let mut out = Vec::new();
    for h in simple_paths_from(&adj, w) {
        let u = *h.last().unwrap();
        for c in cycles_ending_at(&adj, u, &h) {
            if cycle_mean(game, &c, i) > *alpha {
                continue;
            }
            for pi0 in game.arena.succ(u) {
                for t in tails.entry(pi0).or_insert_with(|| tails_from(game, pi0)).iter() {
                    let occ = h.iter().chain(&c).chain(&t.w).copied();
                    let lower = demands(game, lambda, occ);
                    let Some((xi, a)) = poly::min_in_hull(&t.points, &lower, i) else { continue };
                    if xi > *alpha {
                        continue;
                    }
                    let x = poly::combine(&t.points, &a);
                    out.push(Family { h: h.clone(), c: c.clone(), w: t.w.clone(), x });
                }
            }
        }
    }
    out
}

/// Solves the reduced game for player `i` and threshold `alpha` as an energy game in
/// which Prover must keep `alpha·length − reward_i` bounded below. Returns, per vertex,
/// whether Prover holds `i` to `alpha` from there, and a stationary strategy on the
/// vertices where she does.
pub fn reduced_game(game: &Game, lambda: &[Ext], i: usize, alpha: &Q) -> Result<(Vec<bool>, ProverStrategy)> {
    let n = game.n();
    let big = {
        let nn = Q::from_integer((2 * n * n).into());
        nn * (game.max_abs_reward() + alpha.abs()) + Q::from_integer(1.into())
    };
    // nodes: 0..n Prover, n top, n+1 bottom, then one Challenger node per distinct family signature
    let top = n;
    let bot = n + 1;
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    let mut wts: Vec<Vec<Q>> = vec![Vec::new(); n + 2];
    let mut prot = vec![true; n + 2];
    let mut fam_of: Vec<Option<Family>> = vec![None; n + 2];
    succ[top] = vec![top];
    wts[top] = vec![Q::zero()];
    succ[bot] = vec![bot];
    wts[bot] = vec![Q::from_integer((-1).into())];
    for w in 0..n {
        let fams = candidate_families(game, lambda, i, w, alpha);
        let mut seen: HashMap<Vec<(usize, Q)>, usize> = HashMap::new();
        for f in fams {
            let mut best: BTreeMap<usize, Q> = BTreeMap::new();
            best.insert(top, Q::zero());
            for (v, r, len) in pre_deviations(game, &f, i) {
                let x = alpha * Q::from_integer(len.into()) - r;
                let e = best.entry(v).or_insert_with(|| x.clone());
                if x < *e {
                    *e = x;
                }
            }
            for v in post_deviations(game, &f, i) {
                best.entry(v).or_insert_with(|| big.clone());
            }
            let sig: Vec<(usize, Q)> = best.into_iter().collect();
            if seen.contains_key(&sig) {
                continue;
            }
            let id = succ.len();
            seen.insert(sig.clone(), id);
            succ.push(sig.iter().map(|e| e.0).collect());
            wts.push(sig.into_iter().map(|e| e.1).collect());
            prot.push(false);
            fam_of.push(Some(f));
            succ[w].push(id);
            wts[w].push(Q::zero());
        }
        if succ[w].is_empty() {
            succ[w].push(bot);
            wts[w].push(Q::zero());
        }
    }
    let g = Graph2::new(succ, prot);
    let weights = zs::scale_to_int(&wts)?;
    let alive = vec![true; g.n()];
    let (credit, strat) = zs::energy_credit(&g, &alive, &weights);
    let holds: Vec<bool> = (0..n).map(|v| credit[v].is_some()).collect();
    let mut tau = ProverStrategy::new();
    for v in 0..n {
        if holds[v] {
            let y = strat[v].expect("winning Prover vertex has a move");
            tau.insert(v, fam_of[y].clone().expect("a family node"));
        }
    }
    Ok((holds, tau))
}

/// Whether Prover holds the controller of `v` to `alpha` in the reduced game from `v`.
pub fn reduced_holds(game: &Game, lambda: &[Ext], v: usize, alpha: &Q) -> Result<bool> {
    let i = game.arena.controller(v).ok_or_else(|| Error::Precondition("vertex has no controller".into()))?;
    Ok(reduced_game(game, lambda, i, alpha)?.0[v])
}

/// Checks that a family is a legal λ-consistent proposal from `from`.
pub fn check_family(game: &Game, lambda: &[Ext], from: usize, f: &Family) -> Result<()> {
    let a = &game.arena;
    let bad = |s: &str| Err(Error::Precondition(format!("family from {}: {s}", a.name(from))));
    if f.c.is_empty() || f.first() != from {
        return bad("does not start at its vertex");
    }
    if f.x.len() != game.p() {
        return bad("payoff vector of the wrong length");
    }
    let distinct = |xs: &[usize]| {
        let mut s = xs.to_vec();
        s.sort_unstable();
        s.dedup();
        s.len() == xs.len()
    };
    if !distinct(&f.h) || !distinct(&f.c) {
        return bad("history or cycle is not simple");
    }
    let seq: Vec<usize> = f.h.iter().chain(&f.c).copied().collect();
    if seq.windows(2).any(|e| !a.has_edge(e[0], e[1])) || !a.has_edge(*f.c.last().unwrap(), f.c[0]) {
        return bad("not a path of the arena");
    }
    let last = *f.c.last().unwrap();
    let Some(k) = a.succ(last).filter(|&p| f.w.contains(&p)).find_map(|p| chain_tail(game, &f.w, p)) else {
        return bad("no play from the cycle visits exactly W");
    };
    let lower = demands(game, lambda, f.occ());
    if (0..game.p()).any(|j| Ext::Fin(f.x[j].clone()) < lower[j]) {
        return bad("not λ-consistent");
    }
    let mut alive = vec![false; game.n()];
    for &v in &k {
        alive[v] = true;
    }
    let pts: Vec<Vec<Q>> = graph::simple_cycles(&a.adjacency(), &alive)
        .iter()
        .map(|c| (0..game.p()).map(|j| cycle_mean(game, c, j)).collect())
        .collect();
    if !poly::in_lower_seal(&pts, &f.x) {
        return bad("payoff vector not achievable in W");
    }
    Ok(())
}

/// Whether Challenger has no play giving `i` more than `alpha` against `tau` from `v`.
/// Cases: an accepted proposal above `alpha`, a cycle of pre-cycle deviations with mean
/// above `alpha`, or a cycle of deviations through pumped cycles all of mean above `alpha`.
pub fn mp_deviation_graph_value(
    game: &Game,
    lambda: &[Ext],
    i: usize,
    tau: &ProverStrategy,
    alpha: &Q,
    v: usize,
) -> Result<bool> {
    let n = game.n();
    // edges: (to, weight = reward - alpha·len, post-cycle?, mean of the pumped cycle)
    let mut edges: Vec<Vec<(usize, Q, Option<Q>)>> = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    let mut stack = vec![v];
    seen[v] = true;
    while let Some(u) = stack.pop() {
        let Some(f) = tau.get(&u) else { return Ok(false) };
        check_family(game, lambda, u, f)?;
        if f.x[i] > *alpha {
            return Ok(false);
        }
        for (t, r, len) in pre_deviations(game, f, i) {
            edges[u].push((t, r - alpha * Q::from_integer(len.into()), None));
        }
        let m = cycle_mean(game, &f.c, i);
        for t in post_deviations(game, f, i) {
            edges[u].push((t, Q::zero(), Some(m.clone())));
        }
        for &(t, _, _) in &edges[u] {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    let pre: graph::WAdj =
        edges.iter().map(|es| es.iter().filter(|e| e.2.is_none()).map(|e| (e.0, e.1.clone())).collect()).collect();
    if let Some((m, _)) = graph::max_mean_cycle(&pre, &seen) {
        if m > Q::zero() {
            return Ok(false);
        }
    }
    let kept: Vec<Vec<(usize, bool)>> = edges
        .iter()
        .map(|es| {
            es.iter()
                .filter(|e| e.2.as_ref().map_or(true, |m| m > alpha))
                .map(|e| (e.0, e.2.is_some()))
                .collect()
        })
        .collect();
    let plain: Vec<Vec<usize>> = kept.iter().map(|es| es.iter().map(|e| e.0).collect()).collect();
    let mut comp_of = vec![usize::MAX; n];
    for (k, comp) in graph::sccs(&plain, &seen).iter().enumerate() {
        for &u in comp {
            comp_of[u] = k;
        }
    }
    for u in 0..n {
        if seen[u] && kept[u].iter().any(|&(t, post)| post && comp_of[t] == comp_of[u]) {
            return Ok(false);
        }
    }
    Ok(true)
}

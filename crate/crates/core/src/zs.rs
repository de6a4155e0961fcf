//! Two-player zero-sum kernel: attractors, parity (Zielonka), generalized parity,
//! energy and mean-payoff threshold games, adversarial values.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::game::{Game, Mode, Owner};
use crate::graph;
use crate::num::{common_denom, Ext, Q};

/// A turn-based two-player arena: `prot[v]` tells whether the protagonist moves at `v`.
#[derive(Clone, Debug)]
pub struct Graph2 {
    pub succ: Vec<Vec<usize>>,
    pub pred: Vec<Vec<usize>>,
    pub prot: Vec<bool>,
}

impl Graph2 {
    pub fn new(succ: Vec<Vec<usize>>, prot: Vec<bool>) -> Graph2 {
        let mut pred = vec![Vec::new(); succ.len()];
        for (u, s) in succ.iter().enumerate() {
            for &v in s {
                pred[v].push(u);
            }
        }
        Graph2 { succ, pred, prot }
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    /// Protagonist = the coalition of players in `coalition`; everyone else, and chance, oppose.
    pub fn from_game(game: &Game, coalition: &[bool]) -> Graph2 {
        let a = &game.arena;
        let prot = (0..a.n())
            .map(|v| matches!(a.owner(v), Owner::Player(i) if coalition[i]))
            .collect();
        Graph2::new(a.adjacency(), prot)
    }
}

/// Attractor for `player` (true = protagonist) to `target` inside `alive`,
/// with an attracting move for the player's vertices outside the target.
pub fn attractor(g: &Graph2, alive: &[bool], target: &[bool], player: bool) -> (Vec<bool>, Vec<Option<usize>>) {
    let n = g.n();
    let mut attr = vec![false; n];
    let mut strat = vec![None; n];
    let mut count: Vec<usize> =
        (0..n).map(|v| if alive[v] { g.succ[v].iter().filter(|&&w| alive[w]).count() } else { 0 }).collect();
    let mut q = VecDeque::new();
    for v in 0..n {
        if alive[v] && target[v] {
            attr[v] = true;
            q.push_back(v);
        }
    }
    while let Some(w) = q.pop_front() {
        for &u in &g.pred[w] {
            if !alive[u] || attr[u] {
                continue;
            }
            if g.prot[u] == player {
                attr[u] = true;
                strat[u] = Some(w);
                q.push_back(u);
            } else {
                count[u] -= 1;
                if count[u] == 0 {
                    attr[u] = true;
                    q.push_back(u);
                }
            }
        }
    }
    (attr, strat)
}

fn minus(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| x && !y).collect()
}

/// Parity game: the protagonist wins a play iff the least color seen infinitely often is even.
/// Returns the protagonist's winning region and a positional strategy for both players,
/// each defined on the vertices they own inside their own winning region.
pub fn zielonka(g: &Graph2, alive: &[bool], colors: &[u32]) -> (Vec<bool>, Vec<Option<usize>>) {
    let (w0, _w1, s) = zielonka_rec(g, alive, colors);
    (w0, s)
}

fn zielonka_rec(g: &Graph2, alive: &[bool], colors: &[u32]) -> (Vec<bool>, Vec<bool>, Vec<Option<usize>>) {
    let n = g.n();
    let Some(d) = (0..n).filter(|&v| alive[v]).map(|v| colors[v]).min() else {
        return (vec![false; n], vec![false; n], vec![None; n]);
    };
    let x = d % 2 == 0; // true: protagonist
    let target: Vec<bool> = (0..n).map(|v| alive[v] && colors[v] == d).collect();
    let (a, sa) = attractor(g, alive, &target, x);
    let sub = minus(alive, &a);
    let (w0s, w1s, ss) = zielonka_rec(g, &sub, colors);
    let opp_sub = if x { &w1s } else { &w0s };
    if !opp_sub.iter().any(|&b| b) {
        let mut strat = ss;
        for v in 0..n {
            if a[v] && g.prot[v] == x {
                strat[v] = if target[v] {
                    g.succ[v].iter().copied().find(|&w| alive[w])
                } else {
                    sa[v]
                };
            }
        }
        let all = alive.to_vec();
        let none = vec![false; n];
        return if x { (all, none, strat) } else { (none, all, strat) };
    }
    let (b, sb) = attractor(g, alive, opp_sub, !x);
    let rest = minus(alive, &b);
    let (w0r, w1r, sr) = zielonka_rec(g, &rest, colors);
    let mut strat = sr;
    for v in 0..n {
        if b[v] && g.prot[v] != x {
            strat[v] = if opp_sub[v] { ss[v] } else { sb[v] };
        }
    }
    let (mut w0, mut w1) = (w0r, w1r);
    for v in 0..n {
        if b[v] {
            if x {
                w1[v] = true;
            } else {
                w0[v] = true;
            }
        }
    }
    (w0, w1, strat)
}

/// Generalized parity: the protagonist must satisfy every dimension
/// (`colors[d][v]`, least infinitely-often color even); the opponent needs one odd dimension.
/// Returns the protagonist's winning region.
pub fn generalized_parity(g: &Graph2, alive: &[bool], colors: &[Vec<u32>]) -> Vec<bool> {
    let n = g.n();
    if !alive.iter().any(|&b| b) {
        return vec![false; n];
    }
    let mins: Vec<u32> =
        colors.iter().map(|c| (0..n).filter(|&v| alive[v]).map(|v| c[v]).min().unwrap()).collect();
    if let Some(d) = (0..colors.len()).find(|&d| mins[d] % 2 == 1) {
        // The opponent can win dimension d by visiting its least (odd) color forever.
        let target: Vec<bool> = (0..n).map(|v| alive[v] && colors[d][v] == mins[d]).collect();
        let (a, _) = attractor(g, alive, &target, false);
        let sub = minus(alive, &a);
        let wp = generalized_parity(g, &sub, colors);
        if !wp.iter().any(|&b| b) {
            return vec![false; n];
        }
        let (b, _) = attractor(g, alive, &wp, true);
        let rest = minus(alive, &b);
        let wr = generalized_parity(g, &rest, colors);
        return (0..n).map(|v| b[v] || wr[v]).collect();
    }
    for d in 0..colors.len() {
        let target: Vec<bool> = (0..n).map(|v| alive[v] && colors[d][v] == mins[d]).collect();
        if target == alive {
            continue;
        }
        let (a, _) = attractor(g, alive, &target, true);
        let sub = minus(alive, &a);
        let wp = generalized_parity(g, &sub, colors);
        let wc: Vec<bool> = (0..n).map(|v| sub[v] && !wp[v]).collect();
        if wc.iter().any(|&b| b) {
            let (b, _) = attractor(g, alive, &wc, false);
            let rest = minus(alive, &b);
            return generalized_parity(g, &rest, colors);
        }
    }
    alive.to_vec()
}

/// Energy game: the protagonist keeps the accumulated weight bounded from below.
/// Returns the least sufficient initial credit per vertex (`None`: no finite credit suffices)
/// and an optimal positional move for protagonist vertices with finite credit.
/// `weights[v][k]` is the weight of the edge to `g.succ[v][k]`.
pub fn energy_credit(g: &Graph2, alive: &[bool], weights: &[Vec<i128>]) -> (Vec<Option<i128>>, Vec<Option<usize>>) {
    let n = g.n();
    let bound: i128 = (0..n)
        .filter(|&v| alive[v])
        .map(|v| {
            g.succ[v]
                .iter()
                .zip(&weights[v])
                .filter(|(w, _)| alive[**w])
                .map(|(_, &x)| (-x).max(0))
                .max()
                .unwrap_or(0)
        })
        .sum();
    // f = None encodes "top"
    let mut f: Vec<Option<i128>> = vec![Some(0); n];
    let step = |f: &Vec<Option<i128>>, v: usize| -> Option<i128> {
        let opts = g.succ[v].iter().zip(&weights[v]).filter(|(w, _)| alive[**w]).map(|(&w, &x)| {
            f[w].and_then(|fw| {
                let need = (fw - x).max(0);
                (need <= bound).then_some(need)
            })
        });
        if g.prot[v] {
            opts.fold(None, |acc: Option<i128>, o| match (acc, o) {
                (None, o) => o,
                (a, None) => a,
                (Some(a), Some(b)) => Some(a.min(b)),
            })
        } else {
            let mut worst = Some(0);
            for o in opts {
                worst = match (worst, o) {
                    (None, _) | (_, None) => None,
                    (Some(a), Some(b)) => Some(a.max(b)),
                };
            }
            worst
        }
    };
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| alive[v]).collect();
    let mut queued = alive.to_vec();
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let nv = step(&f, v);
        let grows = match (f[v], nv) {
            (Some(a), Some(b)) => b > a,
            (Some(_), None) => true,
            _ => false,
        };
        if grows {
            f[v] = nv;
            for &u in &g.pred[v] {
                if alive[u] && !queued[u] {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    let mut strat = vec![None; n];
    for v in 0..n {
        if !alive[v] || !g.prot[v] {
            continue;
        }
        if let Some(fv) = f[v] {
            strat[v] = g.succ[v]
                .iter()
                .zip(&weights[v])
                .find(|(&w, &x)| alive[w] && f[w].is_some_and(|fw| (fw - x).max(0) <= fv))
                .map(|(&w, _)| w);
        }
    }
    let out = (0..n).map(|v| if alive[v] { f[v] } else { None }).collect();
    (out, strat)
}

/// Scales rational weights to integers with one common positive factor.
pub fn scale_to_int(weights: &[Vec<Q>]) -> Result<Vec<Vec<i128>>> {
    let d = common_denom(weights.iter().flatten());
    weights
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let y: BigInt = (x * Q::from_integer(d.clone())).to_integer();
                    y.to_i128().ok_or_else(|| Error::Arithmetic("weights too large".into()))
                })
                .collect()
        })
        .collect()
}

/// Vertices from which the protagonist ensures a mean payoff (limit inferior) of at least `t`.
/// `weights[v][k]` is the reward on the edge to `g.succ[v][k]`.
pub fn mp_at_least(g: &Graph2, alive: &[bool], weights: &[Vec<Q>], t: &Q) -> Result<Vec<bool>> {
    let shifted: Vec<Vec<Q>> = weights.iter().map(|r| r.iter().map(|x| x - t).collect()).collect();
    let w = scale_to_int(&shifted)?;
    let (credit, _) = energy_credit(g, alive, &w);
    Ok(credit.iter().zip(alive).map(|(c, &a)| a && c.is_some()).collect())
}

/// Vertices from which the protagonist can force reaching `target` (coalition attractor).
pub fn attractor_game(game: &Game, coalition: &[bool], target: &[bool]) -> Vec<bool> {
    let g = Graph2::from_game(game, coalition);
    attractor(&g, &vec![true; game.n()], target, true).0
}

/// Winning region and positional strategy of the coalition for player `i`'s parity condition.
pub fn parity_region(game: &Game, coalition: &[bool], i: usize) -> Result<(Vec<bool>, Vec<Option<usize>>)> {
    game.require_mode(&[Mode::Parity], "parity_region")?;
    if (0..game.n()).any(|v| game.arena.controller(v).is_none()) {
        return Err(Error::Precondition("parity_region needs a game without chance vertices".into()));
    }
    let g = Graph2::from_game(game, coalition);
    let colors: Vec<u32> = (0..game.n()).map(|v| game.color(v, i)).collect();
    Ok(zielonka(&g, &vec![true; game.n()], &colors))
}

/// Per-edge rewards of player `i` laid out along the successor lists.
pub fn reward_rows(game: &Game, i: usize) -> Vec<Vec<Q>> {
    let a = &game.arena;
    (0..a.n()).map(|v| a.out_edges(v).iter().map(|&e| game.reward(e, i).clone()).collect()).collect()
}

/// Adversarial value `val_i(v)` for every vertex: the best payoff player `i` can guarantee
/// against the coalition of all other players. Parity and mean-payoff modes.
pub fn adversarial_values(game: &Game, i: usize) -> Result<Vec<Ext>> {
    game.require_mode(&[Mode::Parity, Mode::MeanPayoff], "adversarial values")?;
    let n = game.n();
    let mut coalition = vec![false; game.p()];
    coalition[i] = true;
    let g = Graph2::from_game(game, &coalition);
    let alive = vec![true; n];
    match game.mode() {
        Mode::Parity => {
            let colors: Vec<u32> = (0..n).map(|v| game.color(v, i)).collect();
            let (w, _) = zielonka(&g, &alive, &colors);
            Ok(w.iter().map(|&b| Ext::int(b as i64)).collect())
        }
        _ => {
            let rows = reward_rows(game, i);
            let mut cands: Vec<Q> = graph::simple_cycles(&g.succ, &alive)
                .iter()
                .map(|c| crate::lasso::cycle_mean(game, c, i))
                .collect();
            cands.sort();
            cands.dedup();
            let mut cache: Vec<Option<Vec<bool>>> = vec![None; cands.len()];
            let mut solve = |k: usize| -> Result<Vec<bool>> {
                if cache[k].is_none() {
                    cache[k] = Some(mp_at_least(&g, &alive, &rows, &cands[k])?);
                }
                Ok(cache[k].clone().unwrap())
            };
            let mut out = Vec::with_capacity(n);
            for v in 0..n {
                // largest k with ensures(cands[k]); cands[0] always holds
                let (mut lo, mut hi) = (0usize, cands.len());
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if solve(mid)?[v] {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(Ext::Fin(cands[lo].clone()));
            }
            Ok(out)
        }
    }
}

/// Minimum mean cycle of player `i`'s rewards over the whole arena, with a witness cycle.
pub fn min_mean_cycle(game: &Game, i: usize, alive: &[bool]) -> Result<(Q, Vec<usize>)> {
    game.require_mode(&[Mode::MeanPayoff, Mode::Energy, Mode::DiscountedSum], "min_mean_cycle")?;
    let a = &game.arena;
    let adj: graph::WAdj = (0..a.n())
        .map(|v| a.out_edges(v).iter().map(|&e| (a.edges[e].to, game.reward(e, i).clone())).collect())
        .collect();
    graph::min_mean_cycle(&adj, alive).ok_or_else(|| Error::Precondition("the graph is acyclic".into()))
}

/// Protagonist's value at a single vertex, as a convenience around [`adversarial_values`].
pub fn val(game: &Game, v: usize) -> Result<Ext> {
    let i = game
        .arena
        .controller(v)
        .ok_or_else(|| Error::Precondition("val is defined on controlled vertices".into()))?;
    Ok(adversarial_values(game, i)?[v].clone())
}

/// One-player generalized parity: is there a cycle inside `alive` (reachable or not) whose
/// least color is even in every dimension? Returns its vertex set.
pub fn good_cycle(succ: &[Vec<usize>], alive: &[bool], colors: &[Vec<u32>]) -> Option<Vec<usize>> {
    for comp in graph::sccs(succ, alive) {
        if !graph::is_nontrivial(succ, &comp) {
            continue;
        }
        let bad = colors.iter().find_map(|c| {
            let m = comp.iter().map(|&v| c[v]).min().unwrap();
            (m % 2 == 1).then_some((c, m))
        });
        match bad {
            None => return Some(comp),
            Some((c, m)) => {
                let mut sub = vec![false; succ.len()];
                for &v in &comp {
                    sub[v] = c[v] != m;
                }
                if let Some(r) = good_cycle(succ, &sub, colors) {
                    return Some(r);
                }
            }
        }
    }
    None
}

pub fn is_zero_row(r: &[Q]) -> bool {
    r.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2(succ: Vec<Vec<usize>>, prot: Vec<bool>) -> Graph2 {
        Graph2::new(succ, prot)
    }

    #[test]
    fn odd_loop_loses() {
        let g = g2(vec![vec![0]], vec![true]);
        let (w, _) = zielonka(&g, &[true], &[1]);
        assert_eq!(w, vec![false]);
    }

    #[test]
    fn zielonka_choice() {
        // 0 (prot) -> 1 (odd loop) or 2 (even loop)
        let g = g2(vec![vec![1, 2], vec![1], vec![2]], vec![true, true, true]);
        let (w, s) = zielonka(&g, &[true; 3], &[1, 1, 0]);
        assert_eq!(w, vec![true, false, true]);
        assert_eq!(s[0], Some(2));
    }

    #[test]
    fn energy_simple() {
        // 0 -> 0 weight -1 or 0 -> 1 weight -3, 1 -> 1 weight +1
        let g = g2(vec![vec![0, 1], vec![1]], vec![true, true]);
        let (c, s) = energy_credit(&g, &[true, true], &[vec![-1, -3], vec![1]]);
        assert_eq!(c, vec![Some(3), Some(0)]);
        assert_eq!(s[0], Some(1));
        let g = g2(vec![vec![0, 1], vec![1]], vec![false, true]);
        let (c, _) = energy_credit(&g, &[true, true], &[vec![-1, -3], vec![1]]);
        assert_eq!(c[0], None);
    }

    #[test]
    fn genparity_needs_both() {
        // prot at 0 chooses loop 1 (good for dim0) or loop 2 (good for dim1); no loop is good for both
        let g = g2(vec![vec![1, 2], vec![1], vec![2]], vec![true; 3]);
        let colors = vec![vec![4, 0, 1], vec![4, 1, 0]];
        assert_eq!(generalized_parity(&g, &[true; 3], &colors), vec![false; 3]);
        // with alternation available (1 <-> 2) the protagonist wins by visiting both
        let g = g2(vec![vec![1, 2], vec![1, 2], vec![2, 1]], vec![true; 3]);
        assert_eq!(generalized_parity(&g, &[true; 3], &colors), vec![true; 3]);
        // if the opponent controls 1 and 2, it stays in one loop
        let g = g2(vec![vec![1, 2], vec![1, 2], vec![2, 1]], vec![true, false, false]);
        assert_eq!(generalized_parity(&g, &[true; 3], &colors), vec![false; 3]);
    }
}

//! Turn-based stochastic arenas: qualitative reachability and safety games,
//! extreme values by threshold sweep, products with memory structures and the
//! induced Markov chains with exact absorption probabilities.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{Game, Mode, Owner};
use crate::graph;
use crate::memory::MemoryProfile;
use crate::num::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Max,
    Min,
    Random,
    Sink,
}

impl Kind {
    fn opponent(self) -> Kind {
        match self {
            Kind::Max => Kind::Min,
            Kind::Min => Kind::Max,
            k => k,
        }
    }
}

/// Stochastic arena. Qualitative questions only look at supports; `prob` is
/// filled for random nodes when the arena comes from a product.
#[derive(Clone, Debug)]
pub struct Sg {
    pub succ: Vec<Vec<usize>>,
    pub prob: Vec<Vec<Q>>,
    pub kind: Vec<Kind>,
    /// Game vertex behind each node; payoffs are read at sinks.
    pub vertex: Vec<usize>,
    pred: Vec<Vec<usize>>,
}

impl Sg {
    pub fn new(succ: Vec<Vec<usize>>, prob: Vec<Vec<Q>>, kind: Vec<Kind>, vertex: Vec<usize>) -> Sg {
        let mut pred = vec![Vec::new(); succ.len()];
        for (u, s) in succ.iter().enumerate() {
            for &v in s {
                pred[v].push(u);
            }
        }
        Sg { succ, prob, kind, vertex, pred }
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    /// The game restricted to `edges`: `i`'s vertices are Max, other players' are
    /// `others`, chance is Random (always with all its edges), terminals are sinks.
    pub fn from_game(game: &Game, i: Option<usize>, others: Kind, edges: Option<&[bool]>) -> Sg {
        let a = &game.arena;
        let mut succ = vec![Vec::new(); a.n()];
        let mut prob = vec![Vec::new(); a.n()];
        let mut kind = Vec::with_capacity(a.n());
        for v in 0..a.n() {
            let k = match a.owner(v) {
                Owner::Player(j) if Some(j) == i => Kind::Max,
                Owner::Player(_) => others,
                Owner::Chance => Kind::Random,
                Owner::Terminal => Kind::Sink,
            };
            kind.push(k);
            for &e in a.out_edges(v) {
                if a.is_chance(v) || edges.is_none_or(|f| f[e]) {
                    succ[v].push(a.edges[e].to);
                    prob[v].push(a.edges[e].prob.clone().unwrap_or_else(Q::zero));
                }
            }
        }
        Sg::new(succ, prob, kind, (0..a.n()).collect())
    }

    /// Payoff of player `i` at sink nodes.
    pub fn payoffs(&self, game: &Game, i: usize) -> Vec<Option<Q>> {
        (0..self.n())
            .map(|u| match self.kind[u] {
                Kind::Sink => game.terminal_payoff(self.vertex[u]).map(|p| p[i].clone()),
                _ => None,
            })
            .collect()
    }
}

/// Least set containing `target` (inside `alive`) and closed under: existential
/// nodes with a successor in the set, other non-sink nodes with all successors in it.
/// Returns the set and, for existential nodes, an attracting successor.
pub fn attract(
    sg: &Sg,
    alive: &[bool],
    target: &[bool],
    exist: impl Fn(Kind) -> bool,
) -> (Vec<bool>, Vec<Option<usize>>) {
    let n = sg.n();
    let mut set = vec![false; n];
    let mut strat = vec![None; n];
    let mut count: Vec<usize> = sg.succ.iter().map(Vec::len).collect();
    let mut q = VecDeque::new();
    for v in 0..n {
        if alive[v] && target[v] {
            set[v] = true;
            q.push_back(v);
        }
    }
    while let Some(w) = q.pop_front() {
        for &u in &sg.pred[w] {
            if !alive[u] || set[u] || sg.kind[u] == Kind::Sink {
                continue;
            }
            if exist(sg.kind[u]) {
                set[u] = true;
                strat[u] = Some(w);
                q.push_back(u);
            } else {
                count[u] -= 1;
                if count[u] == 0 {
                    set[u] = true;
                    q.push_back(u);
                }
            }
        }
    }
    (set, strat)
}

fn side(me: Kind) -> impl Fn(Kind) -> bool {
    move |k| k == me || k == Kind::Random
}

fn not(a: &[bool]) -> Vec<bool> {
    a.iter().map(|&x| !x).collect()
}

/// A winning region with a positional strategy for the nodes of the winner.
pub type Region = (Vec<bool>, Vec<Option<usize>>);

/// `me` reaches `target` with positive probability.
pub fn pos_reach(sg: &Sg, me: Kind, target: &[bool]) -> Region {
    attract(sg, &vec![true; sg.n()], target, side(me))
}

/// `me` stays surely inside `safe` (sinks inside are safe).
pub fn sure_safe(sg: &Sg, me: Kind, safe: &[bool]) -> Region {
    let (lost, _) = attract(sg, &vec![true; sg.n()], &not(safe), side(me.opponent()));
    let win = not(&lost);
    let strat = (0..sg.n())
        .map(|u| {
            (win[u] && sg.kind[u] == me).then(|| sg.succ[u].iter().copied().find(|&w| win[w])).flatten()
        })
        .collect();
    (win, strat)
}

/// `me` reaches `target` almost surely.
pub fn as_reach(sg: &Sg, me: Kind, target: &[bool]) -> Region {
    let mut u = vec![true; sg.n()];
    loop {
        let (p, strat) = attract(sg, &u, target, side(me));
        let (b, _) = attract(sg, &vec![true; sg.n()], &not(&p), side(me.opponent()));
        let nu = not(&b);
        if nu == u {
            return (p, strat);
        }
        u = nu;
    }
}

/// `me` avoids `bad` with positive probability.
pub fn pos_avoid(sg: &Sg, me: Kind, bad: &[bool]) -> Region {
    let (safe, stay) = sure_safe(sg, me, &not(bad));
    let (win, go) = pos_reach(sg, me, &safe);
    let strat = (0..sg.n()).map(|u| if safe[u] { stay[u] } else { go[u] }).collect();
    (win, strat)
}

/// Max wins "𝕏 ≥ z" (pessimistic or optimistic); returns Max's region and strategy
/// and Min's strategy on the complement.
pub fn threshold(sg: &Sg, pay: &[Option<Q>], pessimist: bool, z: &Q) -> (Region, Vec<Option<usize>>) {
    let good: Vec<bool> = pay.iter().map(|p| p.as_ref().is_some_and(|p| p >= z)).collect();
    let bad: Vec<bool> = pay.iter().map(|p| p.as_ref().is_some_and(|p| p < z)).collect();
    let positive = z > &Q::zero();
    let (max, min) = match (pessimist, positive) {
        (true, true) => (as_reach(sg, Kind::Max, &good), pos_avoid(sg, Kind::Min, &good)),
        (true, false) => (sure_safe(sg, Kind::Max, &not(&bad)), pos_reach(sg, Kind::Min, &bad)),
        (false, true) => (pos_reach(sg, Kind::Max, &good), sure_safe(sg, Kind::Min, &not(&good))),
        (false, false) => (pos_avoid(sg, Kind::Max, &bad), as_reach(sg, Kind::Min, &bad)),
    };
    (max, min.1)
}

/// Extreme values of every node for the Max player, with optimal positional strategies.
#[derive(Clone, Debug)]
pub struct Values {
    pub val: Vec<Q>,
    pub max_strat: Vec<Option<usize>>,
    pub min_strat: Vec<Option<usize>>,
}

/// Threshold sweep over {0} ∪ sink payoffs.
pub fn extreme_values(sg: &Sg, pay: &[Option<Q>], pessimist: bool) -> Values {
    let cands: BTreeSet<Q> = pay.iter().flatten().cloned().chain(std::iter::once(Q::zero())).collect();
    let cands: Vec<Q> = cands.into_iter().collect();
    let n = sg.n();
    let mut level = vec![0usize; n];
    let mut max_at = Vec::with_capacity(cands.len());
    let mut min_at = Vec::with_capacity(cands.len());
    for (k, z) in cands.iter().enumerate() {
        let ((win, ms), ns) = threshold(sg, pay, pessimist, z);
        for u in 0..n {
            if win[u] {
                level[u] = k;
            }
        }
        max_at.push(ms);
        min_at.push(ns);
    }
    let val = level.iter().map(|&k| cands[k].clone()).collect();
    let max_strat = (0..n).map(|u| if sg.kind[u] == Kind::Max { max_at[level[u]][u] } else { None }).collect();
    let min_strat = (0..n)
        .map(|u| match sg.kind[u] {
            Kind::Min if level[u] + 1 < cands.len() => min_at[level[u] + 1][u],
            Kind::Min => sg.succ[u].first().copied(),
            _ => None,
        })
        .collect();
    Values { val, max_strat, min_strat }
}

/// Product of a terminal-mode game with a memory profile. Nodes are (vertex, state)
/// pairs reachable from the initial one (node 0); when `free` is a player, that
/// player's nodes are Max and lead to intermediate random nodes that update the memory.
pub fn product(game: &Game, m: &MemoryProfile, free: Option<usize>) -> Result<(Sg, Vec<usize>)> {
    game.require_mode(&[Mode::Terminal], "the product with a memory structure")?;
    let a = &game.arena;
    let v0 = a.init_or_err()?;
    let mut ids: HashMap<(usize, usize, Option<usize>), usize> = HashMap::new();
    let mut keys = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut prob: Vec<Vec<Q>> = Vec::new();
    let mut kind = Vec::new();
    let mut intern = |key: (usize, usize, Option<usize>), keys: &mut Vec<_>| -> usize {
        *ids.entry(key).or_insert_with(|| {
            keys.push(key);
            keys.len() - 1
        })
    };
    intern((v0, m.initial, None), &mut keys);
    let mut k = 0;
    while k < keys.len() {
        let (v, q, after) = keys[k];
        let mut out: BTreeMap<usize, Q> = BTreeMap::new();
        let node_kind;
        if let Some(w) = after {
            node_kind = Kind::Random;
            for (t, p) in m.distribution(q, v) {
                let id = intern((w, m.transitions[t].to, None), &mut keys);
                *out.entry(id).or_insert_with(Q::zero) += p;
            }
        } else if a.is_terminal(v) {
            node_kind = Kind::Sink;
        } else {
            let dist = m.distribution(q, v);
            if dist.is_empty() {
                return Err(Error::Precondition(format!(
                    "memory state {} has no transition reading {}",
                    m.states[q],
                    a.name(v)
                )));
            }
            match a.owner(v) {
                Owner::Player(i) if Some(i) == free => {
                    node_kind = Kind::Max;
                    for w in a.succ(v) {
                        out.insert(intern((v, q, Some(w)), &mut keys), Q::one());
                    }
                }
                Owner::Player(_) => {
                    if !m.controls(a, v) {
                        return Err(Error::Precondition(format!(
                            "the profile does not cover the controlled vertex {}",
                            a.name(v)
                        )));
                    }
                    node_kind = Kind::Random;
                    for (t, p) in dist {
                        let tr = &m.transitions[t];
                        let id = intern((tr.emit.expect("validated emit"), tr.to, None), &mut keys);
                        *out.entry(id).or_insert_with(Q::zero) += p;
                    }
                }
                _ => {
                    node_kind = Kind::Random;
                    for &e in a.out_edges(v) {
                        let pe = a.edges[e].prob.clone().unwrap_or_else(Q::zero);
                        for (t, p) in &dist {
                            let id = intern((a.edges[e].to, m.transitions[*t].to, None), &mut keys);
                            *out.entry(id).or_insert_with(Q::zero) += &pe * p;
                        }
                    }
                }
            }
        }
        out.retain(|_, p| !p.is_zero());
        succ.push(out.keys().copied().collect());
        prob.push(out.into_values().collect());
        kind.push(node_kind);
        k += 1;
    }
    let vertex = keys.iter().map(|&(v, _, _)| v).collect();
    let mem = keys.iter().map(|&(_, q, _)| q).collect();
    Ok((Sg::new(succ, prob, kind, vertex), mem))
}

/// Finite Markov chain induced by a profile covering every player; state 0 is initial.
#[derive(Clone, Debug)]
pub struct Chain {
    /// (vertex, memory state) per chain state.
    pub states: Vec<(usize, usize)>,
    pub trans: Vec<Vec<(usize, Q)>>,
    terminal: Vec<bool>,
}

pub fn induced_chain(game: &Game, m: &MemoryProfile) -> Result<Chain> {
    let (sg, mem) = product(game, m, None)?;
    let states = sg.vertex.iter().copied().zip(mem).collect();
    let trans = sg.succ.iter().zip(&sg.prob).map(|(s, p)| s.iter().copied().zip(p.iter().cloned()).collect()).collect();
    let terminal = sg.kind.iter().map(|&k| k == Kind::Sink).collect();
    Ok(Chain { states, trans, terminal })
}

impl Chain {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        self.trans.iter().map(|t| t.iter().map(|&(s, _)| s).collect()).collect()
    }

    /// Terminal vertices hit with positive probability, and whether no terminal
    /// is ever reached with positive probability (a bottom SCC without terminal).
    pub fn support(&self) -> (BTreeSet<usize>, bool) {
        let terms = (0..self.len()).filter(|&s| self.terminal[s]).map(|s| self.states[s].0).collect();
        let adj = self.adjacency();
        let comps = graph::sccs(&adj, &vec![true; self.len()]);
        let mut comp_of = vec![0; self.len()];
        for (c, comp) in comps.iter().enumerate() {
            for &s in comp {
                comp_of[s] = c;
            }
        }
        let nonterm = comps.iter().enumerate().any(|(c, comp)| {
            !self.terminal[comp[0]] && comp.iter().all(|&s| adj[s].iter().all(|&t| comp_of[t] == c))
        });
        (terms, nonterm)
    }

    /// Exact probability of ending in each terminal vertex, and of never terminating.
    pub fn absorption(&self) -> (BTreeMap<usize, Q>, Q) {
        let n = self.len();
        let adj = self.adjacency();
        let mut radj = vec![Vec::new(); n];
        for (u, s) in adj.iter().enumerate() {
            for &v in s {
                radj[v].push(u);
            }
        }
        let sinks: Vec<usize> = (0..n).filter(|&s| self.terminal[s]).collect();
        let live = graph::reachable(&radj, &sinks, &vec![true; n]);
        let unknown: Vec<usize> = (0..n).filter(|&s| live[s] && !self.terminal[s]).collect();
        let mut index = vec![usize::MAX; n];
        for (k, &s) in unknown.iter().enumerate() {
            index[s] = k;
        }
        let targets: Vec<usize> = sinks.iter().map(|&s| self.states[s].0).collect::<BTreeSet<_>>().into_iter().collect();
        let col: BTreeMap<usize, usize> = targets.iter().enumerate().map(|(k, &t)| (t, k)).collect();
        let mut a = vec![vec![Q::zero(); unknown.len()]; unknown.len()];
        let mut b = vec![vec![Q::zero(); targets.len()]; unknown.len()];
        for (r, &s) in unknown.iter().enumerate() {
            a[r][r] += Q::one();
            for (t, p) in &self.trans[s] {
                if self.terminal[*t] {
                    b[r][col[&self.states[*t].0]] += p;
                } else if live[*t] {
                    a[r][index[*t]] -= p;
                }
            }
        }
        let x = solve(a, b);
        let row: Vec<Q> = if self.terminal[0] {
            targets.iter().map(|&t| if t == self.states[0].0 { Q::one() } else { Q::zero() }).collect()
        } else if live[0] {
            x[index[0]].clone()
        } else {
            vec![Q::zero(); targets.len()]
        };
        let total: Q = row.iter().sum();
        let dist = targets.into_iter().zip(row).filter(|(_, p)| !p.is_zero()).collect();
        (dist, Q::one() - total)
    }
}

/// Gauss-Jordan elimination for a nonsingular `a` with several right-hand sides.
fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("nonsingular system");
        a.swap(c, p);
        b.swap(c, p);
        let inv = Q::one() / &a[c][c];
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for x in b[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            let (pr, rr) = if r < c {
                let (lo, hi) = a.split_at_mut(c);
                (&hi[0], &mut lo[r])
            } else {
                let (lo, hi) = a.split_at_mut(r);
                (&lo[c], &mut hi[0])
            };
            for (x, y) in rr.iter_mut().zip(pr) {
                *x -= &f * y;
            }
            let (pr, rr) = if r < c {
                let (lo, hi) = b.split_at_mut(c);
                (&hi[0], &mut lo[r])
            } else {
                let (lo, hi) = b.split_at_mut(r);
                (&lo[c], &mut hi[0])
            };
            for (x, y) in rr.iter_mut().zip(pr) {
                *x -= &f * y;
            }
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::num::qf;

    fn lottery(choice: &str) -> (Game, MemoryProfile) {
        let g = corpus::game("lottery");
        let a = &g.arena;
        let mut c = vec![None; a.n()];
        c[a.vertex("b").unwrap()] = Some(a.vertex(choice).unwrap());
        let m = MemoryProfile::positional(a, &c).unwrap();
        (g, m)
    }

    #[test]
    fn lottery_absorption() {
        let (g, m) = lottery("c");
        let ch = induced_chain(&g, &m).unwrap();
        for s in 0..ch.len() {
            if !ch.trans[s].is_empty() {
                assert_eq!(ch.trans[s].iter().map(|(_, p)| p).sum::<Q>(), Q::one());
            }
        }
        let (dist, inf) = ch.absorption();
        let t1 = g.arena.vertex("t1").unwrap();
        let t2 = g.arena.vertex("t2").unwrap();
        assert_eq!(dist[&t1], qf(1, 40));
        assert_eq!(dist[&t2], qf(39, 40));
        assert!(inf.is_zero());
        let (terms, nonterm) = ch.support();
        assert_eq!(terms, [t1, t2].into_iter().collect());
        assert!(!nonterm);
    }

    #[test]
    fn one_player_values() {
        let g = corpus::game("lottery");
        let sg = Sg::from_game(&g, Some(0), Kind::Min, None);
        let pay = sg.payoffs(&g, 0);
        let b = g.arena.vertex("b").unwrap();
        assert_eq!(extreme_values(&sg, &pay, false).val[b], qf(40, 1));
        assert_eq!(extreme_values(&sg, &pay, true).val[b], qf(1, 1));
    }

    #[test]
    fn avoiding_a_terminal_in_a_cycle() {
        let g = corpus::game("ex_extreme1");
        let sg = Sg::from_game(&g, None, Kind::Min, None);
        let t1 = g.arena.vertex("t1").unwrap();
        let mut w = vec![false; g.n()];
        w[t1] = true;
        let (set, _) = attract(&sg, &vec![true; g.n()], &w, |k| k == Kind::Random);
        assert_eq!(set, w);
    }
}

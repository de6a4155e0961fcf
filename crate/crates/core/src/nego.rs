//! Requirements, λ-consistency and the negotiation function.
//!
//! `nego(λ)(v)` is the least payoff the controller `i` of `v` can be held to by
//! the other players when they are only allowed λ-consistent plays after every
//! deviation of `i`. It is computed on the concrete negotiation game, where
//! Prover proposes plays edge by edge and Challenger accepts or makes `i`
//! deviate. For prefix-independent payoffs the memory of a proposal only needs
//! the largest requirement it has met per player, which is what [`Compressed`] keeps.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::game::{Game, Mode, Owner};
use crate::graph;
use crate::lasso::{cycle_mean, eval_lasso, Lasso};
use crate::num::{Ext, Q};
use crate::poly;
use crate::zs::{self, Graph2};

/// A requirement: one extended rational per vertex.
pub type Requirement = Vec<Ext>;

pub fn vacuous_requirement(game: &Game) -> Requirement {
    vec![Ext::NegInf; game.n()]
}

pub fn requirement_to_json(game: &Game, lambda: &[Ext]) -> Value {
    let m: Map<String, Value> =
        (0..game.n()).map(|v| (game.arena.name(v).to_string(), Value::String(lambda[v].to_string()))).collect();
    Value::Object(m)
}

pub fn requirement_from_json(game: &Game, v: &Value) -> Result<Requirement> {
    let o = v.as_object().ok_or_else(|| Error::Parse("requirement: expected an object".into()))?;
    let mut out = vec![None; game.n()];
    for (k, x) in o {
        let vid = game.arena.vertex_or_err(k)?;
        let s = x.as_str().ok_or_else(|| Error::Parse(format!("requirement.{k}: expected a string")))?;
        out[vid] = Some(Ext::parse(s)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| Error::Invalid(format!("requirement: missing vertex {}", game.arena.name(v)))))
        .collect()
}

/// Every suffix of the play gives the controller of its first vertex at least λ of that vertex.
pub fn is_lambda_consistent(game: &Game, lambda: &[Ext], lasso: &Lasso) -> Result<bool> {
    lasso.validate(&game.arena)?;
    for s in lasso.suffixes() {
        let v = s.first();
        if let Owner::Player(i) = game.arena.owner(v) {
            if eval_lasso(game, &s, i)? < lambda[v] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// For prefix-independent payoffs: the largest requirement per player among `occ`.
pub fn demands(game: &Game, lambda: &[Ext], occ: impl IntoIterator<Item = usize>) -> Vec<Ext> {
    let mut l = vec![Ext::NegInf; game.p()];
    for v in occ {
        if let Owner::Player(j) = game.arena.owner(v) {
            if lambda[v] > l[j] {
                l[j] = lambda[v].clone();
            }
        }
    }
    l
}

// ---------------------------------------------------------------------------
// Full concrete arena (memory = set of visited vertices)

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConcreteVertex {
    Prover { v: usize, mem: Vec<usize> },
    Challenger { u: usize, v: usize, mem: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConcreteEdge {
    Proposal,
    Acceptation,
    Deviation,
}

#[derive(Clone, Debug)]
pub struct ConcreteArena {
    pub player: usize,
    pub origin: usize,
    pub vertices: Vec<ConcreteVertex>,
    pub edges: Vec<(usize, usize, ConcreteEdge)>,
}

impl ConcreteArena {
    pub fn describe(&self, game: &Game, x: usize) -> String {
        let names = |m: &[usize]| m.iter().map(|&v| game.arena.name(v)).collect::<Vec<_>>().join(",");
        match &self.vertices[x] {
            ConcreteVertex::Prover { v, mem } => format!("{}, {{{}}}", game.arena.name(*v), names(mem)),
            ConcreteVertex::Challenger { u, v, mem } => {
                format!("{}{}, {{{}}}", game.arena.name(*u), game.arena.name(*v), names(mem))
            }
        }
    }
}

/// The reachable part of the concrete negotiation game from `(v0, {v0})`, with
/// memories kept as vertex sets. Deviations lead to `(w, {w})`.
pub fn build_concrete_nego(game: &Game, lambda: &[Ext], i: usize, v0: usize) -> Result<ConcreteArena> {
    game.require_mode(&[Mode::Parity, Mode::MeanPayoff], "the concrete negotiation game")?;
    check_lambda(game, lambda)?;
    let a = &game.arena;
    let mut index: HashMap<ConcreteVertex, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut stack = Vec::new();
    let mut intern = |x: ConcreteVertex, vertices: &mut Vec<ConcreteVertex>, stack: &mut Vec<usize>| -> usize {
        *index.entry(x.clone()).or_insert_with(|| {
            vertices.push(x);
            stack.push(vertices.len() - 1);
            vertices.len() - 1
        })
    };
    intern(ConcreteVertex::Prover { v: v0, mem: vec![v0] }, &mut vertices, &mut stack);
    while let Some(x) = stack.pop() {
        match vertices[x].clone() {
            ConcreteVertex::Prover { v, mem } => {
                for w in a.succ(v) {
                    let y = intern(ConcreteVertex::Challenger { u: v, v: w, mem: mem.clone() }, &mut vertices, &mut stack);
                    edges.push((x, y, ConcreteEdge::Proposal));
                }
            }
            ConcreteVertex::Challenger { u, v, mem } => {
                let mut m2 = mem.clone();
                if !m2.contains(&v) {
                    m2.push(v);
                    m2.sort_unstable();
                }
                let y = intern(ConcreteVertex::Prover { v, mem: m2 }, &mut vertices, &mut stack);
                edges.push((x, y, ConcreteEdge::Acceptation));
                if a.owner(u) == Owner::Player(i) {
                    for w in a.succ(u).filter(|&w| w != v) {
                        let y = intern(ConcreteVertex::Prover { v: w, mem: vec![w] }, &mut vertices, &mut stack);
                        edges.push((x, y, ConcreteEdge::Deviation));
                    }
                }
            }
        }
    }
    Ok(ConcreteArena { player: i, origin: v0, vertices, edges })
}

fn check_lambda(game: &Game, lambda: &[Ext]) -> Result<()> {
    if lambda.len() != game.n() {
        return Err(Error::Precondition("requirement length differs from the vertex count".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Compressed concrete arena

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    /// Prover proposes the next edge from `v`; `mem` indexes into `Compressed::mems`.
    Prover { v: usize, mem: usize },
    /// Challenger sees the proposed edge `uv`.
    Challenger { u: usize, v: usize, mem: usize },
    /// Transit node marking a deviation towards `w`.
    Deviation { w: usize },
}

/// Concrete negotiation game whose memory is, per player, the largest requirement met so far.
#[derive(Clone, Debug)]
pub struct Compressed {
    pub player: usize,
    pub nodes: Vec<Node>,
    pub succ: Vec<Vec<usize>>,
    /// Each memory: one requirement per player.
    pub mems: Vec<Vec<Ext>>,
    pub start: usize,
}

impl Compressed {
    pub fn build(game: &Game, lambda: &[Ext], i: usize, v0: usize) -> Compressed {
        let a = &game.arena;
        let mut mems: Vec<Vec<Ext>> = Vec::new();
        let mut mem_index: HashMap<Vec<Ext>, usize> = HashMap::new();
        let mut mem_id = |m: Vec<Ext>, mems: &mut Vec<Vec<Ext>>| -> usize {
            *mem_index.entry(m.clone()).or_insert_with(|| {
                mems.push(m);
                mems.len() - 1
            })
        };
        let extend = |m: &[Ext], v: usize| -> Vec<Ext> {
            let mut m = m.to_vec();
            if let Owner::Player(j) = a.owner(v) {
                if lambda[v] > m[j] {
                    m[j] = lambda[v].clone();
                }
            }
            m
        };
        let base = vec![Ext::NegInf; game.p()];
        let mut nodes: Vec<Node> = Vec::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut index: HashMap<Node, usize> = HashMap::new();
        let mut stack = Vec::new();
        let mut intern = |x: Node, nodes: &mut Vec<Node>, succ: &mut Vec<Vec<usize>>, stack: &mut Vec<usize>| -> usize {
            *index.entry(x.clone()).or_insert_with(|| {
                nodes.push(x);
                succ.push(Vec::new());
                stack.push(nodes.len() - 1);
                nodes.len() - 1
            })
        };
        let m0 = mem_id(extend(&base, v0), &mut mems);
        let start = intern(Node::Prover { v: v0, mem: m0 }, &mut nodes, &mut succ, &mut stack);
        while let Some(x) = stack.pop() {
            let out: Vec<usize> = match nodes[x].clone() {
                Node::Prover { v, mem } => a
                    .succ(v)
                    .map(|w| intern(Node::Challenger { u: v, v: w, mem }, &mut nodes, &mut succ, &mut stack))
                    .collect(),
                Node::Challenger { u, v, mem } => {
                    let m2 = mem_id(extend(&mems[mem].clone(), v), &mut mems);
                    let mut out = vec![intern(Node::Prover { v, mem: m2 }, &mut nodes, &mut succ, &mut stack)];
                    if a.owner(u) == Owner::Player(i) {
                        for w in a.succ(u).filter(|&w| w != v) {
                            out.push(intern(Node::Deviation { w }, &mut nodes, &mut succ, &mut stack));
                        }
                    }
                    out
                }
                Node::Deviation { w } => {
                    let m = mem_id(extend(&base, w), &mut mems);
                    vec![intern(Node::Prover { v: w, mem: m }, &mut nodes, &mut succ, &mut stack)]
                }
            };
            succ[x] = out;
        }
        Compressed { player: i, nodes, succ, mems, start }
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_prover(&self, x: usize) -> bool {
        matches!(self.nodes[x], Node::Prover { .. })
    }

    fn graph2(&self) -> Graph2 {
        // protagonist = Prover; deviation nodes have a single successor
        let prot = self.nodes.iter().map(|n| !matches!(n, Node::Challenger { .. })).collect();
        Graph2::new(self.succ.clone(), prot)
    }

    /// Challenger vertices with a real choice.
    fn decisions(&self) -> Vec<bool> {
        (0..self.n()).map(|x| matches!(self.nodes[x], Node::Challenger { .. }) && self.succ[x].len() > 1).collect()
    }

    /// Calls `f` on every positional Challenger strategy, given as a chosen successor
    /// position per node, distinguishing strategies only on the vertices they reach.
    /// Stops as soon as `f` returns false.
    pub fn for_each_challenger(&self, mut f: impl FnMut(&[usize]) -> bool) {
        let dec = self.decisions();
        let mut choice = vec![usize::MAX; self.n()];
        self.enumerate(&dec, &mut choice, &mut f);
    }

    fn enumerate(&self, dec: &[bool], choice: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        // first reachable undecided decision vertex
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![self.start];
        seen[self.start] = true;
        let mut open = None;
        while let Some(x) = stack.pop() {
            if dec[x] && choice[x] == usize::MAX {
                if open.map_or(true, |o| x < o) {
                    open = Some(x);
                }
                continue;
            }
            let nexts: Vec<usize> = if dec[x] { vec![self.succ[x][choice[x]]] } else { self.succ[x].clone() };
            for y in nexts {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        match open {
            None => {
                let full: Vec<usize> = choice.iter().map(|&c| if c == usize::MAX { 0 } else { c }).collect();
                f(&full)
            }
            Some(x) => {
                for k in 0..self.succ[x].len() {
                    choice[x] = k;
                    if !self.enumerate(dec, choice, f) {
                        choice[x] = usize::MAX;
                        return false;
                    }
                }
                choice[x] = usize::MAX;
                true
            }
        }
    }

    /// Successor lists once Challenger's choices are fixed.
    pub fn restrict(&self, choice: &[usize]) -> Vec<Vec<usize>> {
        let dec = self.decisions();
        (0..self.n()).map(|x| if dec[x] { vec![self.succ[x][choice[x]]] } else { self.succ[x].clone() }).collect()
    }
}

// ---------------------------------------------------------------------------
// Parity

fn boolean_level(x: &Ext) -> Option<u8> {
    match x {
        Ext::NegInf => Some(0),
        Ext::Fin(q) if q.is_zero() => Some(1),
        Ext::Fin(q) if *q == Q::from_integer(1.into()) => Some(2),
        Ext::PosInf => Some(3),
        _ => None,
    }
}

fn check_boolean(lambda: &[Ext]) -> Result<()> {
    if lambda.iter().any(|x| boolean_level(x).is_none()) {
        return Err(Error::Precondition("parity requirements take values in {-inf, 0, 1, +inf}".into()));
    }
    Ok(())
}

/// Color vectors of the concrete parity game: one dimension per player for
/// consistency, one for requirements `+inf`, and optionally one asking `i` to lose.
fn parity_dimensions(game: &Game, c: &Compressed, with_loss: bool) -> Vec<Vec<u32>> {
    let p = game.p();
    let max_color = (0..game.n()).flat_map(|v| (0..p).map(move |j| (v, j))).map(|(v, j)| game.color(v, j)).max();
    let big = (max_color.unwrap_or(0) + 4) & !1;
    let one = Ext::int(1);
    let mut dims = Vec::new();
    for j in 0..p {
        dims.push(
            c.nodes
                .iter()
                .map(|n| match n {
                    Node::Prover { v, mem } if c.mems[*mem][j] == one => game.color(*v, j) + 2,
                    Node::Deviation { .. } => 0,
                    _ => big,
                })
                .collect(),
        );
    }
    dims.push(
        c.nodes
            .iter()
            .map(|n| match n {
                Node::Prover { mem, .. } if c.mems[*mem].contains(&Ext::PosInf) => 1,
                Node::Deviation { .. } => 0,
                _ => big,
            })
            .collect(),
    );
    if with_loss {
        dims.push(
            c.nodes
                .iter()
                .map(|n| match n {
                    Node::Prover { v, .. } => game.color(*v, c.player) + 1,
                    _ => big,
                })
                .collect(),
        );
    }
    dims
}

/// `nego(λ)(v)` in a parity game, in {0, 1, +inf}.
pub fn nego_parity_at(game: &Game, lambda: &[Ext], v0: usize) -> Result<Ext> {
    let i = controller(game, v0)?;
    let c = Compressed::build(game, lambda, i, v0);
    let g = c.graph2();
    let alive = vec![true; c.n()];
    let w0 = zs::generalized_parity(&g, &alive, &parity_dimensions(game, &c, false));
    if !w0[c.start] {
        return Ok(Ext::PosInf);
    }
    let w1 = zs::generalized_parity(&g, &alive, &parity_dimensions(game, &c, true));
    Ok(if w1[c.start] { Ext::zero() } else { Ext::int(1) })
}

pub fn nego_parity(game: &Game, lambda: &[Ext]) -> Result<Requirement> {
    game.require_mode(&[Mode::Parity], "nego_parity")?;
    check_lambda(game, lambda)?;
    check_boolean(lambda)?;
    (0..game.n()).map(|v| nego_parity_at(game, lambda, v)).collect()
}

/// Independent route: enumerate positional Challenger strategies; against each one,
/// Prover is alone and wins iff some reachable cycle is good in every dimension.
pub fn nego_parity_enumerated(game: &Game, lambda: &[Ext]) -> Result<Requirement> {
    game.require_mode(&[Mode::Parity], "nego_parity")?;
    check_lambda(game, lambda)?;
    check_boolean(lambda)?;
    let mut out = Vec::new();
    for v0 in 0..game.n() {
        let i = controller(game, v0)?;
        let c = Compressed::build(game, lambda, i, v0);
        let prover_survives = |dims: &[Vec<u32>]| {
            let mut all = true;
            c.for_each_challenger(|choice| {
                let succ = c.restrict(choice);
                let reach = graph::reachable(&succ, &[c.start], &vec![true; c.n()]);
                if zs::good_cycle(&succ, &reach, dims).is_none() {
                    all = false;
                }
                all
            });
            all
        };
        let val = if !prover_survives(&parity_dimensions(game, &c, false)) {
            Ext::PosInf
        } else if !prover_survives(&parity_dimensions(game, &c, true)) {
            Ext::int(1)
        } else {
            Ext::zero()
        };
        out.push(val);
    }
    Ok(out)
}

fn controller(game: &Game, v: usize) -> Result<usize> {
    game.arena
        .controller(v)
        .ok_or_else(|| Error::Precondition(format!("vertex {} has no controlling player", game.arena.name(v))))
}

// ---------------------------------------------------------------------------
// Mean-payoff

/// Prover-to-Prover steps once Challenger is fixed: (target, reward vector, deviation?).
fn prover_steps(game: &Game, c: &Compressed, succ: &[Vec<usize>]) -> Vec<Vec<(usize, usize, bool)>> {
    let a = &game.arena;
    let mut out = vec![Vec::new(); c.n()];
    for x in 0..c.n() {
        let Node::Prover { v, .. } = c.nodes[x] else { continue };
        for &y in &succ[x] {
            for &z in &succ[y] {
                match c.nodes[z] {
                    Node::Prover { v: w, .. } => out[x].push((z, a.edge_id(v, w).unwrap(), false)),
                    Node::Deviation { w } => {
                        out[x].push((succ[z][0], a.edge_id(v, w).unwrap(), true));
                    }
                    Node::Challenger { .. } => unreachable!(),
                }
            }
        }
    }
    out
}

/// Least payoff Prover can hold `i` to once Challenger's positional choices are fixed.
fn mp_prover_best(game: &Game, c: &Compressed, choice: &[usize], cache: &mut LpCache) -> Ext {
    let i = c.player;
    let succ = c.restrict(choice);
    let steps = prover_steps(game, c, &succ);
    let plain: Vec<Vec<usize>> = steps.iter().map(|s| s.iter().map(|t| t.0).collect()).collect();
    let reach = graph::reachable(&plain, &[c.start], &vec![true; c.n()]);
    let mut best = Ext::PosInf;
    for comp in graph::sccs(&plain, &reach) {
        if !graph::is_nontrivial(&plain, &comp) {
            continue;
        }
        let mut inside = vec![false; c.n()];
        for &x in &comp {
            inside[x] = true;
        }
        let has_dev = comp.iter().any(|&x| steps[x].iter().any(|&(z, _, d)| d && inside[z]));
        let value = if has_dev {
            let adj: graph::WAdj = (0..c.n())
                .map(|x| {
                    if !inside[x] {
                        return Vec::new();
                    }
                    steps[x].iter().filter(|t| inside[t.0]).map(|&(z, e, _)| (z, game.reward(e, i).clone())).collect()
                })
                .collect();
            Ext::Fin(graph::min_mean_cycle(&adj, &inside).expect("nontrivial").0)
        } else {
            let Node::Prover { mem, .. } = c.nodes[comp[0]] else { unreachable!() };
            let lower = c.mems[mem].clone();
            // project the component on the arena: its cycles are arena cycles
            let verts: Vec<usize> = {
                let mut vs: Vec<usize> = comp
                    .iter()
                    .map(|&x| match c.nodes[x] {
                        Node::Prover { v, .. } => v,
                        _ => unreachable!(),
                    })
                    .collect();
                vs.sort_unstable();
                vs
            };
            cache.min_in_component(game, &verts, &lower, i)
        };
        best = best.min(value);
    }
    best
}

/// Memoised hull minimisations keyed by (vertex set, lower bounds, player).
#[derive(Default)]
pub struct LpCache {
    map: HashMap<(Vec<usize>, Vec<Ext>, usize), Ext>,
    cycles: HashMap<Vec<usize>, Vec<Vec<Q>>>,
}

impl LpCache {
    /// Payoff vectors of the simple cycles of the subgraph induced by `verts`.
    pub fn cycle_points(&mut self, game: &Game, verts: &[usize]) -> Vec<Vec<Q>> {
        self.cycles
            .entry(verts.to_vec())
            .or_insert_with(|| {
                let mut alive = vec![false; game.n()];
                for &v in verts {
                    alive[v] = true;
                }
                graph::simple_cycles(&game.arena.adjacency(), &alive)
                    .iter()
                    .map(|c| (0..game.p()).map(|j| cycle_mean(game, c, j)).collect())
                    .collect()
            })
            .clone()
    }

    pub fn min_in_component(&mut self, game: &Game, verts: &[usize], lower: &[Ext], i: usize) -> Ext {
        let key = (verts.to_vec(), lower.to_vec(), i);
        if let Some(x) = self.map.get(&key) {
            return x.clone();
        }
        let pts = self.cycle_points(game, verts);
        let r = match poly::min_in_hull(&pts, lower, i) {
            Some((v, _)) => Ext::Fin(v),
            None => Ext::PosInf,
        };
        self.map.insert(key, r.clone());
        r
    }
}

pub fn nego_mp_at(game: &Game, lambda: &[Ext], v0: usize, cache: &mut LpCache) -> Result<Ext> {
    let i = controller(game, v0)?;
    if lambda[v0] == Ext::PosInf {
        return Ok(Ext::PosInf);
    }
    let c = Compressed::build(game, lambda, i, v0);
    let mut best = Ext::NegInf;
    c.for_each_challenger(|choice| {
        let v = mp_prover_best(game, &c, choice, cache);
        if v > best {
            best = v;
        }
        best != Ext::PosInf
    });
    Ok(best)
}

pub fn nego_mp(game: &Game, lambda: &[Ext]) -> Result<Requirement> {
    game.require_mode(&[Mode::MeanPayoff], "nego_mp")?;
    check_lambda(game, lambda)?;
    let mut cache = LpCache::default();
    (0..game.n()).map(|v| nego_mp_at(game, lambda, v, &mut cache)).collect()
}

/// The negotiation function, dispatched on the payoff mode.
pub fn nego(game: &Game, lambda: &[Ext]) -> Result<Requirement> {
    match game.mode() {
        Mode::Parity => nego_parity(game, lambda),
        Mode::MeanPayoff => nego_mp(game, lambda),
        m => Err(Error::Unsupported(format!("the negotiation function is not implemented in {m} mode"))),
    }
}

/// Iterates from the vacuous requirement. Returns `λ_0, …, λ_k` and whether
/// `nego(λ_k) = λ_k` was observed within `max_iters` applications.
pub fn nego_iterate(game: &Game, max_iters: usize) -> Result<(Vec<Requirement>, bool)> {
    let mut seq = vec![vacuous_requirement(game)];
    for _ in 0..max_iters {
        let next = nego(game, seq.last().unwrap())?;
        if &next == seq.last().unwrap() {
            return Ok((seq, true));
        }
        seq.push(next);
    }
    Ok((seq, false))
}

/// `nego(λ) <= λ + ε` everywhere (the other side always holds).
pub fn is_eps_fixed_point(game: &Game, lambda: &[Ext], eps: &Q) -> Result<bool> {
    let n = nego(game, lambda)?;
    Ok(exceeds(&n, lambda, eps).is_none())
}

/// First vertex where `next > λ + ε`.
pub fn exceeds(next: &[Ext], lambda: &[Ext], eps: &Q) -> Option<usize> {
    (0..next.len()).find(|&v| next[v] > lambda[v].clone() + Ext::Fin(eps.clone()))
}

/// Named view of a requirement, for reports.
pub fn named(game: &Game, lambda: &[Ext]) -> BTreeMap<String, String> {
    (0..game.n()).map(|v| (game.arena.name(v).to_string(), lambda[v].to_string())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn ext(xs: &[i64]) -> Vec<Ext> {
        xs.iter().map(|&x| Ext::int(x)).collect()
    }

    #[test]
    fn fig_ne_spe_sequence() {
        let g = corpus::game("fig_ne_spe");
        let (seq, done) = nego_iterate(&g, 8).unwrap();
        assert!(done);
        assert_eq!(seq.len(), 3);
        assert_eq!(seq[1], ext(&[0, 1, 1]));
        assert_eq!(seq[2], ext(&[1, 1, 1]));
        assert_eq!(nego_parity_enumerated(&g, &seq[1]).unwrap(), seq[2]);
    }

    #[test]
    fn concrete_arena_size() {
        let g = corpus::game("fig_ne_spe");
        let c = build_concrete_nego(&g, &ext(&[0, 1, 1]), 0, 0).unwrap();
        assert_eq!(c.vertices.len(), 13);
    }

    #[test]
    fn sans_spe_sequence() {
        let g = corpus::game("sans_spe");
        let (seq, done) = nego_iterate(&g, 8).unwrap();
        assert!(done);
        assert_eq!(seq[1], ext(&[1, 2, 1, 2]));
        assert_eq!(seq[2], ext(&[2, 2, 1, 2]));
        assert_eq!(seq[3], ext(&[2, 3, 1, 2]));
        assert_eq!(seq[4], vec![Ext::PosInf, Ext::PosInf, Ext::int(1), Ext::int(2)]);
    }

    #[test]
    fn not_stationary_climbs() {
        let g = corpus::game("not_stationary");
        let (seq, done) = nego_iterate(&g, 6).unwrap();
        assert!(!done);
        let a = g.arena.vertex("a").unwrap();
        for n in 1..seq.len() {
            let want = Q::from_integer(2.into()) - crate::num::qf(1, 1 << (n - 1));
            assert_eq!(seq[n][a], Ext::Fin(want), "n = {n}");
        }
    }
}

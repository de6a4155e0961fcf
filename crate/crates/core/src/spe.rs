//! Subgame-perfect equilibria through fixed points of the negotiation function.
//!
//! A play is an ε-SPE outcome iff it is λ-consistent for some λ with
//! `nego(λ) <= λ + ε`. Parity games reach their least fixed point by plain iteration;
//! mean-payoff games may not, in which case the answer is "unknown".

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::game::{Game, Mode, Owner};
use crate::graph;
use crate::lasso::{eval_lasso, Lasso};
use crate::ne::{check_mp_play, consistent_play, parity_consistent_play, Answer, MpPlay, Outcome, Thresholds};
use crate::nego::{
    exceeds, is_lambda_consistent, nego, nego_iterate, requirement_from_json, requirement_to_json, vacuous_requirement,
    Requirement,
};
use crate::num::{simplest_between, Ext, Q};
use crate::reduced::{mp_deviation_graph_value, reduced_game, strategy_from_json, strategy_to_json, ProverStrategy};
use crate::zs;

pub const DEFAULT_CAP: usize = 64;

// ---------------------------------------------------------------------------
// Parity

/// Least fixed point of the negotiation function and an SPE outcome from the initial
/// vertex within the thresholds. Exact.
pub fn spe_exists_parity(game: &Game, th: &Thresholds) -> Result<Answer<(Requirement, Lasso)>> {
    game.require_mode(&[Mode::Parity], "spe_exists_parity")?;
    let v0 = game.arena.init_or_err()?;
    // iterates grow in a lattice of height at most 3n
    let (seq, done) = nego_iterate(game, 3 * game.n() + 2)?;
    debug_assert!(done);
    let lambda = seq.last().unwrap().clone();
    Ok(match parity_consistent_play(game, &lambda, v0, th)? {
        Some(l) => Answer::Yes((lambda, l)),
        None => Answer::No,
    })
}

/// Whether the stationary proposals `tau` (one lasso per vertex, each starting there)
/// keep player `i` at or below `λ(u)` from `u`: Challenger may accept the current
/// proposal forever or make `i` deviate at any of its vertices along it.
pub fn check_reduced_prover_parity(
    game: &Game,
    lambda: &[Ext],
    i: usize,
    u: usize,
    tau: &BTreeMap<usize, Lasso>,
) -> Result<bool> {
    game.require_mode(&[Mode::Parity], "check_reduced_prover_parity")?;
    let t = match &lambda[u] {
        Ext::PosInf => return Err(Error::Precondition("λ(u) = +inf: nothing to check".into())),
        Ext::NegInf => Ext::NegInf,
        x => x.clone(),
    };
    for (&v, l) in tau {
        if l.first() != v {
            return Err(Error::Precondition(format!("proposal from {} starts elsewhere", game.arena.name(v))));
        }
        if !is_lambda_consistent(game, lambda, l)? {
            return Err(Error::Precondition(format!("proposal from {} is not λ-consistent", game.arena.name(v))));
        }
    }
    if t >= Ext::int(1) {
        return Ok(true);
    }
    // nodes: (proposal start, position along prefix·cycle)
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut stack = Vec::new();
    let mut intern = |x: (usize, usize), nodes: &mut Vec<(usize, usize)>, succ: &mut Vec<Vec<usize>>, st: &mut Vec<usize>| {
        *index.entry(x).or_insert_with(|| {
            nodes.push(x);
            succ.push(Vec::new());
            st.push(nodes.len() - 1);
            nodes.len() - 1
        })
    };
    intern((u, 0), &mut nodes, &mut succ, &mut stack);
    while let Some(x) = stack.pop() {
        let (v, k) = nodes[x];
        let Some(l) = tau.get(&v) else { return Ok(false) };
        let seq = l.vertices();
        let next = if k + 1 < seq.len() { k + 1 } else { l.prefix.len() };
        let here = seq[k];
        let mut out = vec![intern((v, next), &mut nodes, &mut succ, &mut stack)];
        if game.arena.owner(here) == Owner::Player(i) {
            for w in game.arena.succ(here).filter(|&w| w != seq[next]) {
                out.push(intern((w, 0), &mut nodes, &mut succ, &mut stack));
            }
        }
        succ[x] = out;
    }
    let seq_of = |x: usize| {
        let (v, k) = nodes[x];
        tau[&v].vertices()[k]
    };
    let colors = vec![(0..nodes.len()).map(|x| game.color(seq_of(x), i)).collect::<Vec<u32>>()];
    let reach = vec![true; nodes.len()];
    Ok(zs::good_cycle(&succ, &reach, &colors).is_none())
}

// ---------------------------------------------------------------------------
// Mean-payoff

/// Certificate for an ε-SPE in a mean-payoff game: a requirement with stationary
/// Prover strategies holding every controller to `λ(v) + ε`, and a λ-consistent play.
#[derive(Clone, Debug, PartialEq)]
pub struct MpWitness {
    pub play: MpPlay,
    pub lambda: Requirement,
    pub prover: BTreeMap<usize, ProverStrategy>,
}

impl MpWitness {
    pub fn to_json(&self, game: &Game) -> Value {
        let mut v = self.play.to_json(game);
        let o = v.as_object_mut().unwrap();
        o.insert("lambda".into(), requirement_to_json(game, &self.lambda));
        let prover: Map<String, Value> = self
            .prover
            .iter()
            .map(|(&u, s)| (game.arena.name(u).to_string(), strategy_to_json(game, s)))
            .collect();
        o.insert("prover".into(), Value::Object(prover));
        v
    }

    pub fn from_json(game: &Game, v: &Value) -> Result<MpWitness> {
        let play = MpPlay::from_json(game, v)?;
        let lambda =
            requirement_from_json(game, v.get("lambda").ok_or_else(|| Error::Parse("witness: missing lambda".into()))?)?;
        let po = v
            .get("prover")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("witness: missing prover".into()))?;
        let prover = po
            .iter()
            .map(|(k, s)| Ok((game.arena.vertex_or_err(k)?, strategy_from_json(game, s)?)))
            .collect::<Result<_>>()?;
        Ok(MpWitness { play, lambda, prover })
    }
}

/// Independent validation of a witness against ε and thresholds from the initial vertex.
pub fn check_mp_witness(game: &Game, eps: &Q, w: &MpWitness, th: &Thresholds) -> Result<bool> {
    game.require_mode(&[Mode::MeanPayoff], "check_mp_witness")?;
    if w.lambda.len() != game.n() {
        return Err(Error::Invalid("witness: requirement of the wrong size".into()));
    }
    let v0 = game.arena.init_or_err()?;
    for v in 0..game.n() {
        let i = game.arena.controller(v).ok_or_else(|| Error::Precondition("vertex without controller".into()))?;
        let alpha = match &w.lambda[v] {
            Ext::PosInf => continue,
            Ext::NegInf => return Ok(false),
            Ext::Fin(x) => x + eps,
        };
        let Some(tau) = w.prover.get(&v) else { return Ok(false) };
        if !mp_deviation_graph_value(game, &w.lambda, i, tau, &alpha, v)? {
            return Ok(false);
        }
    }
    check_mp_play(game, &w.lambda, v0, th, &w.play)
}

/// Stationary Prover strategies for every vertex, holding its controller to `λ(v) + ε`.
/// `None` when the reduced game does not confirm one of them.
fn prover_strategies(game: &Game, lambda: &[Ext], eps: &Q) -> Result<Option<BTreeMap<usize, ProverStrategy>>> {
    let mut cache: HashMap<(usize, Q), (Vec<bool>, ProverStrategy)> = HashMap::new();
    let mut out = BTreeMap::new();
    for v in 0..game.n() {
        let Ext::Fin(l) = &lambda[v] else { continue };
        let i = game.arena.controller(v).unwrap();
        let alpha = l + eps;
        let key = (i, alpha.clone());
        if !cache.contains_key(&key) {
            cache.insert(key.clone(), reduced_game(game, lambda, i, &alpha)?);
        }
        let (holds, tau) = &cache[&key];
        if !holds[v] {
            return Ok(None);
        }
        // keep the part of the strategy reachable from v
        let mut keep = ProverStrategy::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if keep.contains_key(&u) {
                continue;
            }
            let f = tau[&u].clone();
            let mut nexts: Vec<usize> = f
                .h
                .iter()
                .chain(&f.c)
                .chain(&f.w)
                .filter(|&&x| game.arena.owner(x) == Owner::Player(i))
                .flat_map(|&x| game.arena.succ(x))
                .collect();
            nexts.sort_unstable();
            nexts.dedup();
            keep.insert(u, f);
            stack.extend(nexts);
        }
        out.insert(v, keep);
    }
    Ok(Some(out))
}

/// `max(λ, nego(λ) − ε)`.
fn lowered(lambda: &[Ext], next: &[Ext], eps: &Q) -> Requirement {
    lambda
        .iter()
        .zip(next)
        .map(|(l, n)| {
            let m = match n {
                Ext::Fin(x) => Ext::Fin(x - eps),
                other => other.clone(),
            };
            l.clone().max(m)
        })
        .collect()
}

/// ε-SPE constrained existence from the initial vertex in a mean-payoff game.
///
/// Iterates `λ ↦ max(λ, nego(λ) − ε)` from the vacuous requirement. Every iterate lies
/// below every ε-fixed point, so an iterate without a consistent play within the
/// thresholds proves "no". An ε-fixed iterate (of this sequence or of plain `nego`)
/// with such a play proves "yes". Otherwise the answer is "unknown" after `cap` rounds.
pub fn spe_exists_mp(game: &Game, eps: &Q, th: &Thresholds, cap: usize) -> Result<Answer<MpWitness>> {
    game.require_mode(&[Mode::MeanPayoff], "spe_exists_mp")?;
    if *eps < Q::zero() {
        return Err(Error::Precondition("ε must be non-negative".into()));
    }
    let v0 = game.arena.init_or_err()?;
    let mut low = vacuous_requirement(game);
    let mut plain = vacuous_requirement(game);
    for _ in 0..=cap {
        let Some(Outcome::Combination(play)) = consistent_play(game, &low, v0, th)? else {
            return Ok(Answer::No);
        };
        let next_low = nego(game, &low)?;
        if exceeds(&next_low, &low, eps).is_none() {
            return witness(game, eps, low, play);
        }
        let next_plain = nego(game, &plain)?;
        if exceeds(&next_plain, &plain, eps).is_none() {
            if let Some(Outcome::Combination(play)) = consistent_play(game, &plain, v0, th)? {
                return witness(game, eps, plain, play);
            }
        }
        low = lowered(&low, &next_low, eps);
        plain = next_plain;
    }
    Ok(Answer::Unknown(format!("no ε-fixed point reached within {cap} iterations")))
}

fn witness(game: &Game, eps: &Q, lambda: Requirement, play: MpPlay) -> Result<Answer<MpWitness>> {
    Ok(match prover_strategies(game, &lambda, eps)? {
        Some(prover) => Answer::Yes(MpWitness { play, lambda, prover }),
        None => Answer::Unknown("the reduced game did not confirm the fixed point".into()),
    })
}

/// SPE existence for either prefix-independent mode; parity only supports ε = 0.
pub fn spe_exists(game: &Game, eps: &Q, th: &Thresholds, cap: usize) -> Result<Answer<Value>> {
    match game.mode() {
        Mode::Parity => {
            if !eps.is_zero() {
                return Err(Error::Unsupported("ε-SPEs are only searched in mean-payoff games".into()));
            }
            Ok(match spe_exists_parity(game, th)? {
                Answer::Yes((lambda, l)) => {
                    let payoff: Map<String, Value> = (0..game.p())
                        .map(|j| Ok((game.arena.players[j].clone(), json!(eval_lasso(game, &l, j)?.to_string()))))
                        .collect::<Result<_>>()?;
                    Answer::Yes(json!({
                        "lambda": requirement_to_json(game, &lambda),
                        "lasso": l.to_json(&game.arena),
                        "text": l.display(&game.arena).to_string(),
                        "payoff": payoff,
                    }))
                }
                Answer::No => Answer::No,
                Answer::Unknown(s) => Answer::Unknown(s),
            })
        }
        Mode::MeanPayoff => Ok(match spe_exists_mp(game, eps, th, cap)? {
            Answer::Yes(w) => Answer::Yes(w.to_json(game)),
            Answer::No => Answer::No,
            Answer::Unknown(s) => Answer::Unknown(s),
        }),
        m => Err(Error::Unsupported(format!("SPE existence is not decided in {m} mode"))),
    }
}

/// Least ε for which an ε-SPE exists from the initial vertex: bisection on
/// `[0, 2·max|r|]` for `bits` rounds, then the simplest rational of the final bracket
/// that passes the predicate.
pub fn epsilon_min_search(game: &Game, bits: u32, cap: usize) -> Result<Answer<Q>> {
    game.require_mode(&[Mode::MeanPayoff], "epsilon_min_search")?;
    let th = Thresholds::unbounded(game.p());
    let pred = |e: &Q| -> Result<Option<bool>> {
        Ok(match spe_exists_mp(game, e, &th, cap)? {
            Answer::Yes(_) => Some(true),
            Answer::No => Some(false),
            Answer::Unknown(_) => None,
        })
    };
    let unknown = |e: &Q| Ok(Answer::Unknown(format!("undecided at ε = {}", crate::num::fmt_q(e))));
    let zero = Q::zero();
    match pred(&zero)? {
        Some(true) => return Ok(Answer::Yes(zero)),
        None => return unknown(&zero),
        Some(false) => {}
    }
    let mut hi = game.max_abs_reward() * Q::from_integer(2.into());
    if hi.is_zero() {
        hi = Q::one();
    }
    match pred(&hi)? {
        Some(true) => {}
        Some(false) => return Err(Error::Arithmetic("no ε-SPE even for ε = 2·max|r|".into())),
        None => return unknown(&hi),
    }
    let mut lo = zero;
    for _ in 0..bits {
        let mid = (&lo + &hi) / Q::from_integer(2.into());
        match pred(&mid)? {
            Some(true) => hi = mid,
            Some(false) => lo = mid,
            None => return unknown(&mid),
        }
    }
    let c = simplest_between(&lo, &hi);
    if c != lo {
        if let Some(true) = pred(&c)? {
            return Ok(Answer::Yes(c));
        }
    }
    Ok(Answer::Yes(hi))
}

/// Requirements of a path graph for reports: reachable vertices from `v0`.
pub fn reachable_from_init(game: &Game) -> Result<Vec<bool>> {
    let v0 = game.arena.init_or_err()?;
    Ok(graph::reachable(&game.arena.adjacency(), &[v0], &vec![true; game.n()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::num::qf;

    fn th(lo: &[Ext], hi: &[Ext]) -> Thresholds {
        Thresholds { lower: lo.to_vec(), upper: hi.to_vec() }
    }

    #[test]
    fn fig_ne_spe_spe() {
        let g = corpus::game("fig_ne_spe");
        let one = Ext::int(1);
        let Answer::Yes((_, l)) = spe_exists_parity(&g, &th(&[one.clone(), one.clone()], &[Ext::PosInf, Ext::PosInf])).unwrap()
        else {
            panic!()
        };
        assert_eq!(l.display(&g.arena).to_string(), "a b (c)");
        let zero = Ext::zero();
        assert_eq!(spe_exists_parity(&g, &th(&[Ext::NegInf, Ext::NegInf], &[zero.clone(), zero])).unwrap(), Answer::No);
    }

    #[test]
    fn reduced_parity_proposals() {
        let g = corpus::game("fig_ne_spe");
        let a = &g.arena;
        let tau: BTreeMap<usize, Lasso> = [("a", "a b (c)"), ("b", "b (c)"), ("c", "(c)")]
            .iter()
            .map(|(v, l)| (a.vertex(v).unwrap(), Lasso::parse_text(a, l).unwrap()))
            .collect();
        let l2 = vec![Ext::int(1); 3];
        assert!(check_reduced_prover_parity(&g, &l2, 0, 0, &tau).unwrap());
        let l = vec![Ext::int(0), Ext::int(1), Ext::int(1)];
        assert!(!check_reduced_prover_parity(&g, &l, 0, 0, &tau).unwrap());
    }

    #[test]
    fn sans_spe_has_none() {
        let g = corpus::game("sans_spe");
        let t = Thresholds::unbounded(2);
        assert_eq!(spe_exists_mp(&g, &Q::zero(), &t, 16).unwrap(), Answer::No);
    }

    #[test]
    fn inf_spe_witness() {
        let g = corpus::game("inf_spe");
        let t = th(&[Ext::int(1), Ext::int(1)], &[Ext::int(1), Ext::int(1)]);
        let Answer::Yes(w) = spe_exists_mp(&g, &Q::zero(), &t, 16).unwrap() else { panic!() };
        assert_eq!(w.lambda, vec![Ext::int(1); 2]);
        assert!(check_mp_witness(&g, &Q::zero(), &w, &t).unwrap());
        let back = MpWitness::from_json(&g, &w.to_json(&g)).unwrap();
        assert!(check_mp_witness(&g, &Q::zero(), &back, &t).unwrap());
        assert!(!check_mp_witness(&g, &Q::zero(), &back, &th(&[Ext::int(2), Ext::int(2)], &[Ext::PosInf, Ext::PosInf])).unwrap());
    }

    #[test]
    fn sans_spe_eps_min() {
        let g = corpus::game("sans_spe");
        assert_eq!(epsilon_min_search(&g, 12, 32).unwrap(), Answer::Yes(Q::one()));
        let t = Thresholds::unbounded(2);
        assert!(spe_exists_mp(&g, &qf(1, 1), &t, 32).unwrap().is_yes());
    }

    #[test]
    fn not_stationary_is_unknown() {
        let g = corpus::game("not_stationary");
        let t = Thresholds::unbounded(3);
        assert!(matches!(spe_exists_mp(&g, &Q::zero(), &t, 16).unwrap(), Answer::Unknown(_)));
    }
}

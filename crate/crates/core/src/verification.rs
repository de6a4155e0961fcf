//! Rational verification: does every equilibrium (compatible with a Leader's memory
//! structure) give a distinguished player more than a threshold?

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{Game, Mode};
use crate::memory::MemoryProfile;
use crate::ne::{ne_constrained_exists, Answer, Thresholds};
use crate::num::{fmt_q, Ext, Q};
use crate::product::product_game;
use crate::spe::{epsilon_min_search, spe_exists, spe_exists_mp};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Concept {
    Nash,
    SubgamePerfect,
}

impl Concept {
    pub fn parse(s: &str) -> Result<Concept> {
        match s {
            "nash" | "ne" | "Nash" => Ok(Concept::Nash),
            "spe" | "subgame-perfect" | "SubgamePerfect" => Ok(Concept::SubgamePerfect),
            _ => Err(Error::Parse(format!("unknown rationality concept {s:?}"))),
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Concept::Nash => "nash",
            Concept::SubgamePerfect => "spe",
        })
    }
}

/// Outcome of a verification question; "no" carries a counterexample.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Yes(Value),
    No(Value),
    Unknown(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "yes",
            Verdict::No(_) => "no",
            Verdict::Unknown(_) => "unknown",
        }
    }

    pub fn payload(&self) -> Value {
        match self {
            Verdict::Yes(v) | Verdict::No(v) => v.clone(),
            Verdict::Unknown(s) => json!({ "reason": s }),
        }
    }

    /// "Yes" exactly when the searched-for counterexample does not exist.
    fn refuting(found: Answer<Value>, extra: Value) -> Verdict {
        match found {
            Answer::Yes(o) => Verdict::No(json!({ "counterexample": o, "info": extra })),
            Answer::No => Verdict::Yes(json!({ "info": extra })),
            Answer::Unknown(s) => Verdict::Unknown(s),
        }
    }
}

/// "Yes" iff no equilibrium of the concept gives player `i` at most `t`.
pub fn universal_threshold(game: &Game, i: usize, t: &Q, concept: Concept, cap: usize) -> Result<Verdict> {
    game.require_mode(&[Mode::Parity, Mode::MeanPayoff], "universal_threshold")?;
    let mut th = Thresholds::unbounded(game.p());
    th.upper[i] = Ext::Fin(t.clone());
    let found = match concept {
        Concept::Nash => match ne_constrained_exists(game, &th)? {
            Answer::Yes(o) => Answer::Yes(o.to_json(game)),
            Answer::No => Answer::No,
            Answer::Unknown(s) => Answer::Unknown(s),
        },
        Concept::SubgamePerfect => spe_exists(game, &Q::from_integer(0.into()), &th, cap)?,
    };
    Ok(Verdict::refuting(found, json!({ "player": game.arena.players[i], "concept": concept.to_string() })))
}

fn leader_of(m: &MemoryProfile) -> Result<usize> {
    match m.owners.as_slice() {
        [l] => Ok(*l),
        _ => Err(Error::Precondition("the memory structure must speak for exactly one Leader".into())),
    }
}

/// Rational verification through the product with the Leader's structure.
pub fn rational_verify(game: &Game, m: &MemoryProfile, t: &Q, concept: Concept, cap: usize) -> Result<Verdict> {
    leader_of(m)?;
    let prod = product_game(game, m)?;
    universal_threshold(&prod.game, prod.leader, t, concept, cap)
}

/// Achaotic rational verification in mean-payoff games: with `ε*` the least ε for which
/// ε-SPEs exist in the product, does every ε*-SPE give Leader more than `t`?
/// Returns the verdict and `ε*` when it was found.
pub fn achaotic_rational_verify_mp(
    game: &Game,
    m: &MemoryProfile,
    t: &Q,
    bits: u32,
    cap: usize,
) -> Result<(Verdict, Option<Q>)> {
    game.require_mode(&[Mode::MeanPayoff], "achaotic_rational_verify_mp")?;
    leader_of(m)?;
    let prod = product_game(game, m)?;
    let eps = match epsilon_min_search(&prod.game, bits, cap)? {
        Answer::Yes(e) => e,
        Answer::No => unreachable!("the ε search never answers no"),
        Answer::Unknown(s) => return Ok((Verdict::Unknown(s), None)),
    };
    let mut th = Thresholds::unbounded(prod.game.p());
    th.upper[prod.leader] = Ext::Fin(t.clone());
    let found = match spe_exists_mp(&prod.game, &eps, &th, cap)? {
        Answer::Yes(w) => Answer::Yes(w.to_json(&prod.game)),
        Answer::No => Answer::No,
        Answer::Unknown(s) => Answer::Unknown(s),
    };
    let a = Verdict::refuting(found, json!({ "eps": fmt_q(&eps) }));
    Ok((a, Some(eps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::num::qf;

    #[test]
    fn fig_ne_spe_thresholds() {
        let g = corpus::game("fig_ne_spe");
        let t = qf(9, 10);
        assert_eq!((universal_threshold(&g, 0, &t, Concept::SubgamePerfect, 16).unwrap()).label(), "yes");
        assert_eq!((universal_threshold(&g, 0, &t, Concept::Nash, 16).unwrap()).label(), "no");
    }

    #[test]
    fn first_example_product() {
        let g = corpus::game("fig_first_example");
        let m = MemoryProfile::parse(&g.arena, corpus::get("fig_ex_1player_machine").unwrap()).unwrap();
        for c in [Concept::Nash, Concept::SubgamePerfect] {
            assert_eq!((rational_verify(&g, &m, &qf(9, 10), c, 16).unwrap()).label(), "yes", "{c}");
        }
    }

    #[test]
    fn chaos_is_achaotic_only_below_zero() {
        let g = corpus::game("chaos");
        let m = MemoryProfile::parse(&g.arena, corpus::get("chaos_leader_machine").unwrap()).unwrap();
        let (v, eps) = achaotic_rational_verify_mp(&g, &m, &qf(-1, 2), 10, 32).unwrap();
        assert_eq!(eps, Some(Q::from_integer(1.into())));
        assert_eq!(v.label(), "yes");
        let (v, _) = achaotic_rational_verify_mp(&g, &m, &Q::from_integer(0.into()), 10, 32).unwrap();
        assert_eq!(v.label(), "no");
    }
}

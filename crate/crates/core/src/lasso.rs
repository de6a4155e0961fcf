//! Ultimately periodic plays `h·c^ω` and their payoffs.

use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{Arena, Game, Mode};
use crate::num::{Ext, Q};

/// The play `prefix · cycle^ω`; an empty cycle means the prefix ends in a terminal vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lasso {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl Lasso {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> Lasso {
        Lasso { prefix, cycle }
    }

    pub fn first(&self) -> usize {
        *self.prefix.first().or(self.cycle.first()).expect("nonempty lasso")
    }

    pub fn is_finite(&self) -> bool {
        self.cycle.is_empty()
    }

    /// Minimal prefix and primitive cycle, so that equal plays are equal values.
    pub fn canonical(&self) -> Lasso {
        let mut prefix = self.prefix.clone();
        let mut cycle = primitive_root(&self.cycle);
        if !cycle.is_empty() {
            while let Some(&last) = prefix.last() {
                if last != *cycle.last().unwrap() {
                    break;
                }
                prefix.pop();
                cycle.rotate_right(1);
            }
        }
        Lasso { prefix, cycle }
    }

    pub fn validate(&self, arena: &Arena) -> Result<()> {
        let n = arena.n();
        if self.prefix.is_empty() && self.cycle.is_empty() {
            return Err(Error::Invalid("empty lasso".into()));
        }
        if self.prefix.iter().chain(&self.cycle).any(|&v| v >= n) {
            return Err(Error::Invalid("lasso mentions an unknown vertex".into()));
        }
        let mut seq: Vec<usize> = self.prefix.clone();
        seq.extend(&self.cycle);
        if let Some(&c0) = self.cycle.first() {
            seq.push(c0);
        }
        for w in seq.windows(2) {
            if !arena.has_edge(w[0], w[1]) {
                return Err(Error::Invalid(format!(
                    "lasso uses a missing edge {} -> {}",
                    arena.name(w[0]),
                    arena.name(w[1])
                )));
            }
        }
        if self.cycle.is_empty() && !arena.is_terminal(*self.prefix.last().unwrap()) {
            return Err(Error::Invalid("a lasso without cycle must end in a terminal vertex".into()));
        }
        Ok(())
    }

    /// Edges of the prefix (including the step into the cycle) and of one cycle pass.
    pub fn edge_ids(&self, arena: &Arena) -> (Vec<usize>, Vec<usize>) {
        let mut seq = self.prefix.clone();
        if let Some(&c0) = self.cycle.first() {
            seq.push(c0);
        }
        let pre = seq.windows(2).map(|w| arena.edge_id(w[0], w[1]).expect("edge")).collect();
        let k = self.cycle.len();
        let cyc = (0..k)
            .map(|j| arena.edge_id(self.cycle[j], self.cycle[(j + 1) % k]).expect("edge"))
            .collect();
        (pre, cyc)
    }

    /// Distinct suffixes: one per prefix position, one per cycle rotation.
    pub fn suffixes(&self) -> Vec<Lasso> {
        let mut out = Vec::new();
        for k in 0..self.prefix.len() {
            out.push(Lasso::new(self.prefix[k..].to_vec(), self.cycle.clone()));
        }
        for j in 0..self.cycle.len() {
            let mut c = self.cycle.clone();
            c.rotate_left(j);
            out.push(Lasso::new(Vec::new(), c));
        }
        out
    }

    /// Vertices in order of the play, cut after the first cycle pass.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v = self.prefix.clone();
        v.extend(&self.cycle);
        v
    }

    pub fn parse_text(arena: &Arena, s: &str) -> Result<Lasso> {
        let (pre, cyc) = match s.find('(') {
            Some(k) => {
                let rest = &s[k + 1..];
                let close = rest
                    .find(')')
                    .ok_or_else(|| Error::Parse(format!("lasso {s:?}: unclosed parenthesis")))?;
                if !rest[close + 1..].trim().is_empty() {
                    return Err(Error::Parse(format!("lasso {s:?}: text after the cycle")));
                }
                (&s[..k], &rest[..close])
            }
            None => (s, ""),
        };
        let names = |t: &str| -> Result<Vec<usize>> {
            t.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|x| !x.is_empty())
                .map(|x| arena.vertex_or_err(x))
                .collect()
        };
        let l = Lasso::new(names(pre)?, names(cyc)?);
        l.validate(arena)?;
        Ok(l)
    }

    pub fn from_json(arena: &Arena, v: &Value) -> Result<Lasso> {
        if let Some(s) = v.as_str() {
            return Lasso::parse_text(arena, s);
        }
        let get = |k: &str| -> Result<Vec<usize>> {
            match v.get(k) {
                None => Ok(Vec::new()),
                Some(a) => a
                    .as_array()
                    .ok_or_else(|| Error::Parse(format!("lasso.{k}: expected an array")))?
                    .iter()
                    .map(|x| {
                        x.as_str()
                            .ok_or_else(|| Error::Parse(format!("lasso.{k}: expected vertex ids")))
                            .and_then(|s| arena.vertex_or_err(s))
                    })
                    .collect(),
            }
        };
        let l = Lasso::new(get("prefix")?, get("cycle")?);
        l.validate(arena)?;
        Ok(l)
    }

    pub fn to_json(&self, arena: &Arena) -> Value {
        let names = |xs: &[usize]| xs.iter().map(|&v| arena.name(v).to_string()).collect::<Vec<_>>();
        json!({"prefix": names(&self.prefix), "cycle": names(&self.cycle)})
    }

    pub fn display<'a>(&'a self, arena: &'a Arena) -> LassoDisplay<'a> {
        LassoDisplay { lasso: self, arena }
    }
}

pub struct LassoDisplay<'a> {
    lasso: &'a Lasso,
    arena: &'a Arena,
}

impl fmt::Display for LassoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |xs: &[usize]| xs.iter().map(|&v| self.arena.name(v)).collect::<Vec<_>>().join(" ");
        write!(f, "{}", names(&self.lasso.prefix))?;
        if !self.lasso.cycle.is_empty() {
            if !self.lasso.prefix.is_empty() {
                write!(f, " ")?;
            }
            write!(f, "({})", names(&self.lasso.cycle))?;
        }
        Ok(())
    }
}

fn primitive_root(c: &[usize]) -> Vec<usize> {
    let k = c.len();
    for p in 1..=k {
        if k % p == 0 && (p..k).all(|j| c[j] == c[j - p]) {
            return c[..p].to_vec();
        }
    }
    c.to_vec()
}

/// Lexicographically least rotation, compared on vertex names.
pub fn least_rotation(arena: &Arena, c: &[usize]) -> Vec<usize> {
    let mut best = c.to_vec();
    for j in 1..c.len() {
        let mut r = c.to_vec();
        r.rotate_left(j);
        let key = |x: &Vec<usize>| x.iter().map(|&v| arena.name(v).to_string()).collect::<Vec<_>>();
        if key(&r) < key(&best) {
            best = r;
        }
    }
    best
}

/// Identifier of a cycle: vertex names of its least rotation, comma-separated.
pub fn cycle_id(arena: &Arena, c: &[usize]) -> String {
    least_rotation(arena, c).iter().map(|&v| arena.name(v)).collect::<Vec<_>>().join(",")
}

/// Mean of the rewards of player `i` along the closed walk `c`.
pub fn cycle_mean(game: &Game, c: &[usize], i: usize) -> Q {
    let k = c.len();
    let s: Q = (0..k).map(|j| game.reward_uv(c[j], c[(j + 1) % k], i).clone()).sum();
    s / Q::from_integer(k.into())
}

/// Payoff of player `i` on the play `lasso`.
///
/// Mean-payoff: along `h·c^ω` the partial averages converge to the mean of `c`,
/// because the prefix contributes a bounded amount that vanishes in the average;
/// in particular the limit inferior of the averages equals the cycle mean.
pub fn eval_lasso(game: &Game, lasso: &Lasso, i: usize) -> Result<Ext> {
    let a = &game.arena;
    let mode = game.mode();
    if lasso.cycle.is_empty() && mode != Mode::Terminal {
        return Err(Error::Invalid(format!("a terminating lasso has no payoff in {mode} mode")));
    }
    let one = || Ext::Fin(Q::one());
    let zero = Ext::zero;
    Ok(match mode {
        Mode::Parity => {
            let m = lasso.cycle.iter().map(|&v| game.color(v, i)).min().unwrap();
            if m % 2 == 0 {
                one()
            } else {
                zero()
            }
        }
        Mode::MeanPayoff => Ext::Fin(cycle_mean(game, &lasso.cycle, i)),
        Mode::DiscountedSum => {
            let beta = game.payoff.discount.clone().expect("discount");
            let (pre, cyc) = lasso.edge_ids(a);
            let mut s = Q::zero();
            let mut w = Q::one();
            for &e in &pre {
                s += &w * game.reward(e, i);
                w *= &beta;
            }
            let mut c = Q::zero();
            let mut wc = Q::one();
            for &e in &cyc {
                c += &wc * game.reward(e, i);
                wc *= &beta;
            }
            // Σ_k β^{P + kL} C = β^P C / (1 - β^L)
            Ext::Fin(s + w * c / (Q::one() - wc))
        }
        Mode::Energy => {
            let (pre, cyc) = lasso.edge_ids(a);
            let mut e = Q::zero();
            for &k in &pre {
                e += game.reward(k, i);
                if e < Q::zero() {
                    return Ok(zero());
                }
            }
            let mut drift = Q::zero();
            for &k in &cyc {
                drift += game.reward(k, i);
                if &e + &drift < Q::zero() {
                    return Ok(zero());
                }
            }
            if drift < Q::zero() {
                zero()
            } else {
                one()
            }
        }
        Mode::Terminal => {
            if lasso.cycle.is_empty() {
                let t = *lasso.prefix.last().unwrap();
                Ext::Fin(game.terminal_payoff(t).expect("terminal payoff")[i].clone())
            } else {
                zero()
            }
        }
    })
}

/// Payoff vector of all players.
pub fn eval_all(game: &Game, lasso: &Lasso) -> Result<Vec<Ext>> {
    (0..game.p()).map(|i| eval_lasso(game, lasso, i)).collect()
}

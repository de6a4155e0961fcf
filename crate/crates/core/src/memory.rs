//! Memory structures: finite transducers that read the current vertex and, on
//! vertices of the players they speak for, choose the next one.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::game::{Arena, Owner};
use crate::num::{fmt_q, parse_q_canonical, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub reads: usize,
    pub to: usize,
    /// Next vertex, only when `reads` belongs to an owner of the structure.
    pub emit: Option<usize>,
    pub weight: Option<Q>,
}

#[derive(Clone, Debug)]
pub struct MemoryProfile {
    pub states: Vec<String>,
    pub initial: usize,
    /// Players this structure speaks for.
    pub owners: Vec<usize>,
    pub transitions: Vec<Transition>,
    /// `enabled[state][vertex]`: indices into `transitions`.
    enabled: Vec<Vec<Vec<usize>>>,
}

impl MemoryProfile {
    pub fn new(
        arena: &Arena,
        states: Vec<String>,
        initial: usize,
        owners: Vec<usize>,
        transitions: Vec<Transition>,
    ) -> Result<MemoryProfile> {
        let mut enabled = vec![vec![Vec::new(); arena.n()]; states.len()];
        for (k, t) in transitions.iter().enumerate() {
            if t.from >= states.len() || t.to >= states.len() || t.reads >= arena.n() {
                return Err(Error::Invalid(format!("transitions[{k}]: out of range")));
            }
            enabled[t.from][t.reads].push(k);
        }
        let m = MemoryProfile { states, initial, owners, transitions, enabled };
        m.validate(arena)?;
        Ok(m)
    }

    /// One state; at each vertex of an owner, choose uniformly among `support[v]`.
    pub fn stationary(arena: &Arena, owners: Vec<usize>, support: &[Vec<usize>]) -> Result<MemoryProfile> {
        let mut ts = Vec::new();
        for v in 0..arena.n() {
            if arena.is_terminal(v) {
                continue;
            }
            if self::controls(arena, &owners, v) {
                for &w in &support[v] {
                    ts.push(Transition { from: 0, reads: v, to: 0, emit: Some(w), weight: None });
                }
            } else {
                ts.push(Transition { from: 0, reads: v, to: 0, emit: None, weight: None });
            }
        }
        MemoryProfile::new(arena, vec!["q0".into()], 0, owners, ts)
    }

    /// Pure positional profile of all players.
    pub fn positional(arena: &Arena, choice: &[Option<usize>]) -> Result<MemoryProfile> {
        let support: Vec<Vec<usize>> = choice.iter().map(|c| c.iter().copied().collect()).collect();
        MemoryProfile::stationary(arena, (0..arena.p()).collect(), &support)
    }

    pub fn controls(&self, arena: &Arena, v: usize) -> bool {
        controls(arena, &self.owners, v)
    }

    pub fn nstates(&self) -> usize {
        self.states.len()
    }

    pub fn enabled(&self, state: usize, v: usize) -> &[usize] {
        &self.enabled[state][v]
    }

    /// Co-enabled transitions with their probabilities (uniform unless weighted).
    pub fn distribution(&self, state: usize, v: usize) -> Vec<(usize, Q)> {
        let ts = &self.enabled[state][v];
        if ts.iter().all(|&k| self.transitions[k].weight.is_none()) {
            let p = Q::one() / Q::from_integer(ts.len().into());
            ts.iter().map(|&k| (k, p.clone())).collect()
        } else {
            ts.iter().map(|&k| (k, self.transitions[k].weight.clone().unwrap_or_default())).collect()
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.enabled.iter().flatten().all(|ts| ts.len() <= 1)
    }

    pub fn validate(&self, arena: &Arena) -> Result<()> {
        let inv = |s: String| Err(Error::Invalid(s));
        if self.states.is_empty() || self.initial >= self.states.len() {
            return inv("memory: no initial state".into());
        }
        for &o in &self.owners {
            if o >= arena.p() {
                return inv(format!("memory: unknown owner index {o}"));
            }
        }
        for (k, t) in self.transitions.iter().enumerate() {
            let ctrl = self.controls(arena, t.reads);
            match (t.emit, ctrl) {
                (Some(w), true) => {
                    if !arena.has_edge(t.reads, w) {
                        return inv(format!(
                            "transitions[{k}]: {} -> {} is not an edge",
                            arena.name(t.reads),
                            arena.name(w)
                        ));
                    }
                }
                (None, true) => return inv(format!("transitions[{k}]: controlled read needs an emit")),
                (Some(_), false) => {
                    return inv(format!("transitions[{k}]: emit on a vertex the structure does not control"))
                }
                (None, false) => {}
            }
            if t.weight.is_some() && !ctrl {
                return inv(format!("transitions[{k}]: weights only on controlled reads"));
            }
            if let Some(w) = &t.weight {
                if *w <= Q::zero() || *w > Q::one() {
                    return inv(format!("transitions[{k}].weight: outside (0,1]"));
                }
            }
        }
        for s in 0..self.states.len() {
            for v in 0..arena.n() {
                let ts = &self.enabled[s][v];
                if arena.is_terminal(v) {
                    continue;
                }
                if ts.is_empty() {
                    return inv(format!(
                        "memory: no transition from state {} reading {}",
                        self.states[s],
                        arena.name(v)
                    ));
                }
                let nw = ts.iter().filter(|&&k| self.transitions[k].weight.is_some()).count();
                if nw != 0 {
                    if nw != ts.len() {
                        return inv(format!(
                            "memory: state {} reading {}: either all or no co-enabled transitions carry weights",
                            self.states[s],
                            arena.name(v)
                        ));
                    }
                    let sum: Q = ts.iter().map(|&k| self.transitions[k].weight.clone().unwrap()).sum();
                    if !sum.is_one() {
                        return inv(format!(
                            "memory: state {} reading {}: weights sum to {}",
                            self.states[s],
                            arena.name(v),
                            fmt_q(&sum)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn parse(arena: &Arena, text: &str) -> Result<MemoryProfile> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("json: {e}")))?;
        MemoryProfile::from_json(arena, &v)
    }

    pub fn from_json(arena: &Arena, v: &Value) -> Result<MemoryProfile> {
        let perr = |s: String| Error::Parse(s);
        let obj = v.as_object().ok_or_else(|| perr("memory: expected an object".into()))?;
        for k in obj.keys() {
            if !["states", "initial", "owners", "transitions"].contains(&k.as_str()) {
                return Err(perr(format!("memory: unknown key {k:?}")));
            }
        }
        let strs = |key: &str| -> Result<Vec<String>> {
            obj.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| perr(format!("{key}: expected an array")))?
                .iter()
                .map(|x| x.as_str().map(str::to_string).ok_or_else(|| perr(format!("{key}: expected strings"))))
                .collect()
        };
        let states = strs("states")?;
        let sidx = |name: &str, loc: &str| -> Result<usize> {
            states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::Invalid(format!("{loc}: unknown state {name:?}")))
        };
        let initial = sidx(
            obj.get("initial").and_then(Value::as_str).ok_or_else(|| perr("initial: expected a state".into()))?,
            "initial",
        )?;
        let owners = strs("owners")?
            .iter()
            .map(|p| arena.player(p).ok_or_else(|| Error::Invalid(format!("owners: unknown player {p:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let mut transitions = Vec::new();
        for (k, t) in obj
            .get("transitions")
            .and_then(Value::as_array)
            .ok_or_else(|| perr("transitions: expected an array".into()))?
            .iter()
            .enumerate()
        {
            let o = t.as_object().ok_or_else(|| perr(format!("transitions[{k}]: expected an object")))?;
            for key in o.keys() {
                if !["from", "reads", "to", "emit", "weight"].contains(&key.as_str()) {
                    return Err(perr(format!("transitions[{k}]: unknown key {key:?}")));
                }
            }
            let s = |key: &str| -> Result<&str> {
                o.get(key).and_then(Value::as_str).ok_or_else(|| perr(format!("transitions[{k}].{key}: expected a string")))
            };
            let vref = |name: &str, key: &str| -> Result<usize> {
                arena
                    .vertex(name)
                    .ok_or_else(|| Error::Invalid(format!("transitions[{k}].{key}: dangling vertex reference {name:?}")))
            };
            let from = sidx(s("from")?, &format!("transitions[{k}].from"))?;
            let to = sidx(s("to")?, &format!("transitions[{k}].to"))?;
            let reads = vref(s("reads")?, "reads")?;
            let emit = match o.get("emit") {
                None => None,
                Some(_) => Some(vref(s("emit")?, "emit")?),
            };
            let weight = match o.get("weight") {
                None => None,
                Some(_) => Some(parse_q_canonical(s("weight")?)?),
            };
            transitions.push(Transition { from, reads, to, emit, weight });
        }
        MemoryProfile::new(arena, states, initial, owners, transitions)
    }

    pub fn to_json(&self, arena: &Arena) -> Value {
        let ts: Vec<Value> = self
            .transitions
            .iter()
            .map(|t| {
                let mut o = Map::new();
                o.insert("from".into(), json!(self.states[t.from]));
                o.insert("reads".into(), json!(arena.name(t.reads)));
                o.insert("to".into(), json!(self.states[t.to]));
                if let Some(w) = t.emit {
                    o.insert("emit".into(), json!(arena.name(w)));
                }
                if let Some(w) = &t.weight {
                    o.insert("weight".into(), json!(fmt_q(w)));
                }
                Value::Object(o)
            })
            .collect();
        json!({
            "states": self.states,
            "initial": self.states[self.initial],
            "owners": self.owners.iter().map(|&i| arena.players[i].clone()).collect::<Vec<_>>(),
            "transitions": ts,
        })
    }

    pub fn to_canonical_string(&self, arena: &Arena) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json(arena)).expect("serializable");
        s.push('\n');
        s
    }

    /// Successor supports per (state, vertex) for controlled vertices.
    pub fn supports(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut out: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for t in &self.transitions {
            if let Some(w) = t.emit {
                out.entry((t.from, t.reads)).or_default().push(w);
            }
        }
        out
    }
}

fn controls(arena: &Arena, owners: &[usize], v: usize) -> bool {
    matches!(arena.owner(v), Owner::Player(i) if owners.contains(&i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::game::Game;

    #[test]
    fn machine_roundtrip() {
        let g = Game::parse(corpus::get("fig_first_example").unwrap()).unwrap();
        let text = corpus::get("fig_ex_1player_machine").unwrap();
        let m = MemoryProfile::parse(&g.arena, text).unwrap();
        assert_eq!(m.nstates(), 2);
        assert!(!m.is_deterministic());
        assert_eq!(m.to_canonical_string(&g.arena), text);
    }

    #[test]
    fn rejects_uncovered_pair() {
        let g = Game::parse(corpus::get("fig_first_example").unwrap()).unwrap();
        let bad = r#"{"states":["q"],"initial":"q","owners":["square"],"transitions":[{"from":"q","reads":"a","to":"q"}]}"#;
        assert!(MemoryProfile::parse(&g.arena, bad).is_err());
    }
}

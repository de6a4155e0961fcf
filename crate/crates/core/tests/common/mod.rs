//! Random small games for the oracle suites.
#![allow(dead_code)]

pub mod oracle;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use equilibra_core::memory::Transition;
use equilibra_core::{Game, MemoryProfile};

pub const PLAYERS: [&str; 2] = ["p0", "p1"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `live` non-terminal vertices `v0..`, then `terms` terminals `t0..`. Every vertex other
/// than `v0` gets an edge from an earlier live vertex; every live vertex has 1..=3 successors.
fn skeleton(r: &mut ChaCha8Rng, live: usize, terms: usize, chance: bool) -> (Vec<(String, String)>, Vec<(usize, usize)>) {
    let n = live + terms;
    let name = |v: usize| if v < live { format!("v{v}") } else { format!("t{}", v - live) };
    let vertices = (0..n)
        .map(|v| {
            let owner = if v >= live {
                "terminal".to_string()
            } else if chance && r.gen_bool(0.3) {
                "chance".to_string()
            } else {
                PLAYERS[r.gen_range(0..PLAYERS.len())].to_string()
            };
            (name(v), owner)
        })
        .collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); live];
    for v in 1..n {
        let u = r.gen_range(0..v.min(live));
        succ[u].push(v);
    }
    for s in succ.iter_mut() {
        let want = r.gen_range(1..=3usize).min(n);
        while s.len() < want {
            let w = r.gen_range(0..n);
            if !s.contains(&w) {
                s.push(w);
            }
        }
        s.sort_unstable();
    }
    let edges = succ.iter().enumerate().flat_map(|(u, s)| s.iter().map(move |&w| (u, w))).collect();
    (vertices, edges)
}

fn base(vertices: &[(String, String)], mode: &str) -> Map<String, Value> {
    let mut o = Map::new();
    o.insert("players".into(), json!(PLAYERS));
    o.insert("mode".into(), json!(mode));
    o.insert("init".into(), json!("v0"));
    o.insert("vertices".into(), vertices.iter().map(|(id, ow)| json!({ "id": id, "owner": ow })).collect());
    o
}

fn rq(x: i64) -> String {
    format!("{x}/1")
}

/// Parity game with colors in 0..=3.
pub fn parity_game(seed: u64, n: usize) -> Game {
    let mut r = rng(seed);
    let (vs, es) = skeleton(&mut r, n, 0, false);
    let mut o = base(&vs, "parity");
    o.insert("edges".into(), es.iter().map(|&(u, w)| json!({ "from": vs[u].0, "to": vs[w].0 })).collect());
    let colors: Map<String, Value> = vs
        .iter()
        .map(|(id, _)| (id.clone(), json!({ "p0": r.gen_range(0..4), "p1": r.gen_range(0..4) })))
        .collect();
    o.insert("colors".into(), Value::Object(colors));
    Game::from_json(&Value::Object(o)).expect("random parity game is valid")
}

/// Mean-payoff (or energy) game with integer rewards in `lo..=hi`.
pub fn weighted_game(seed: u64, n: usize, mode: &str, lo: i64, hi: i64) -> Game {
    let mut r = rng(seed);
    let (vs, es) = skeleton(&mut r, n, 0, false);
    let mut o = base(&vs, mode);
    let edges: Vec<Value> = es
        .iter()
        .map(|&(u, w)| {
            json!({
                "from": vs[u].0, "to": vs[w].0,
                "rewards": { "p0": rq(r.gen_range(lo..=hi)), "p1": rq(r.gen_range(lo..=hi)) },
            })
        })
        .collect();
    o.insert("edges".into(), Value::Array(edges));
    Game::from_json(&Value::Object(o)).expect("random weighted game is valid")
}

/// Simple stochastic game with `live` non-terminal vertices and terminal payoffs in `lo..=hi`.
pub fn stochastic_game(seed: u64, live: usize, terms: usize, lo: i64, hi: i64) -> Game {
    let mut r = rng(seed);
    let (vs, es) = skeleton(&mut r, live, terms, true);
    let mut o = base(&vs, "terminal");
    let edges: Vec<Value> = es
        .iter()
        .map(|&(u, w)| {
            let mut e = json!({ "from": vs[u].0, "to": vs[w].0 });
            if vs[u].1 == "chance" {
                let d = es.iter().filter(|&&(x, _)| x == u).count();
                e["prob"] = json!(format!("1/{d}"));
            }
            e
        })
        .collect();
    o.insert("edges".into(), Value::Array(edges));
    let terminals: Map<String, Value> = vs
        .iter()
        .filter(|(_, ow)| ow == "terminal")
        .map(|(id, _)| (id.clone(), json!({ "p0": rq(r.gen_range(lo..=hi)), "p1": rq(r.gen_range(lo..=hi)) })))
        .collect();
    o.insert("terminals".into(), Value::Object(terminals));
    Game::from_json(&Value::Object(o)).expect("random stochastic game is valid")
}

/// Profile for every player with `states` memory states: each (state, vertex) gets a
/// random nonempty support (a single successor when `deterministic`) and one next state
/// per transition.
pub fn random_profile(game: &Game, seed: u64, states: usize, deterministic: bool) -> MemoryProfile {
    let mut r = rng(seed ^ 0x9e37_79b9);
    let a = &game.arena;
    let mut ts = Vec::new();
    for q in 0..states {
        for v in 0..a.n() {
            if a.is_terminal(v) {
                continue;
            }
            let to = r.gen_range(0..states);
            if a.controller(v).is_none() {
                ts.push(Transition { from: q, reads: v, to, emit: None, weight: None });
                continue;
            }
            let mut succ: Vec<usize> = a.succ(v).collect();
            succ.shuffle(&mut r);
            let k = if deterministic { 1 } else { r.gen_range(1..=succ.len()) };
            succ.truncate(k);
            succ.sort_unstable();
            for w in succ {
                ts.push(Transition { from: q, reads: v, to, emit: Some(w), weight: None });
            }
        }
    }
    let names = (0..states).map(|q| format!("q{q}")).collect();
    MemoryProfile::new(a, names, 0, (0..a.p()).collect(), ts).expect("random profile is valid")
}

/// Every deviation of player `i` that is positional in (memory state, vertex): at each
/// of i's vertices and each state, one fixed successor, with the memory updates kept.
pub fn positional_deviations(game: &Game, m: &MemoryProfile, i: usize) -> Vec<MemoryProfile> {
    let a = &game.arena;
    let slots: Vec<(usize, usize)> = (0..m.nstates())
        .flat_map(|q| (0..a.n()).map(move |v| (q, v)))
        .filter(|&(_, v)| a.controller(v) == Some(i))
        .collect();
    let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
    for &(_, v) in &slots {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                a.succ(v).map(move |w| {
                    let mut c = c.clone();
                    c.push(w);
                    c
                })
            })
            .collect();
    }
    choices
        .into_iter()
        .map(|c| {
            let mut ts: Vec<Transition> = Vec::new();
            for t in &m.transitions {
                match slots.iter().position(|&(q, v)| q == t.from && v == t.reads) {
                    None => ts.push(t.clone()),
                    Some(k) => {
                        let nt = Transition { from: t.from, reads: t.reads, to: t.to, emit: Some(c[k]), weight: None };
                        if !ts.contains(&nt) {
                            ts.push(nt);
                        }
                    }
                }
            }
            MemoryProfile::new(a, m.states.clone(), m.initial, m.owners.clone(), ts).expect("deviation is valid")
        })
        .collect()
}

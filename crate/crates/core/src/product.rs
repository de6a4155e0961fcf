//! Product of a game with a memory structure for a Leader player. A new player,
//! Demon, resolves the nondeterminism of the structure; Leader keeps no vertex.

use std::collections::{HashMap, VecDeque};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::game::{Arena, Edge, Game, Mode, Owner, PayoffSpec, Vertex};
use crate::memory::MemoryProfile;
use crate::num::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProductVertex {
    /// (u, p): Demon picks a transition of the structure reading `u` in state `p`.
    Read(usize, usize),
    /// (u, p, q): the structure moved from `p` to `q` after reading `u`.
    Moved(usize, usize, usize),
}

pub struct Product {
    pub game: Game,
    pub demon: usize,
    pub leader: usize,
    pub origin: Vec<ProductVertex>,
}

impl Product {
    /// Base vertex of every product vertex.
    pub fn projection(&self) -> Vec<usize> {
        self.origin
            .iter()
            .map(|pv| match *pv {
                ProductVertex::Read(u, _) | ProductVertex::Moved(u, _, _) => u,
            })
            .collect()
    }
}

/// Reachable product from `(v0, q0)`.
pub fn product_game(game: &Game, m: &MemoryProfile) -> Result<Product> {
    let a = &game.arena;
    let mode = game.mode();
    match mode {
        Mode::Parity | Mode::MeanPayoff | Mode::Energy => {}
        _ => return Err(Error::Unsupported(format!("product games are not available in {mode} mode"))),
    }
    m.validate(a)?;
    if m.owners.len() != 1 {
        return Err(Error::Precondition("the memory structure must speak for exactly one Leader".into()));
    }
    let leader = m.owners[0];
    let v0 = a.init_or_err()?;
    let mut demon_name = "demon".to_string();
    while a.players.contains(&demon_name) {
        demon_name.push('_');
    }
    let mut players = a.players.clone();
    players.push(demon_name);
    let demon = players.len() - 1;

    let mut index: HashMap<ProductVertex, usize> = HashMap::new();
    let mut origin = Vec::new();
    let mut queue = VecDeque::new();
    let mut edges: Vec<(usize, usize, Option<usize>)> = Vec::new(); // (from, to, base edge on second step)
    let mut intern = |pv: ProductVertex, origin: &mut Vec<ProductVertex>, queue: &mut VecDeque<usize>| -> usize {
        *index.entry(pv).or_insert_with(|| {
            origin.push(pv);
            queue.push_back(origin.len() - 1);
            origin.len() - 1
        })
    };
    intern(ProductVertex::Read(v0, m.initial), &mut origin, &mut queue);
    while let Some(x) = queue.pop_front() {
        match origin[x] {
            ProductVertex::Read(u, p) => {
                let mut seen = Vec::new();
                for &k in m.enabled(p, u) {
                    let q = m.transitions[k].to;
                    if seen.contains(&q) {
                        continue;
                    }
                    seen.push(q);
                    let y = intern(ProductVertex::Moved(u, p, q), &mut origin, &mut queue);
                    edges.push((x, y, None));
                }
            }
            ProductVertex::Moved(u, p, q) => {
                let targets: Vec<usize> = if m.controls(a, u) {
                    let mut ts: Vec<usize> = m
                        .enabled(p, u)
                        .iter()
                        .filter(|&&k| m.transitions[k].to == q)
                        .filter_map(|&k| m.transitions[k].emit)
                        .collect();
                    ts.sort_unstable();
                    ts.dedup();
                    ts
                } else {
                    a.succ(u).collect()
                };
                for v in targets {
                    let y = intern(ProductVertex::Read(v, q), &mut origin, &mut queue);
                    edges.push((x, y, a.edge_id(u, v)));
                }
            }
        }
    }

    let st = |s: usize| m.states[s].as_str();
    let vertices: Vec<Vertex> = origin
        .iter()
        .map(|pv| match *pv {
            ProductVertex::Read(u, p) => Vertex { name: format!("{}|{}", a.name(u), st(p)), owner: Owner::Player(demon) },
            ProductVertex::Moved(u, p, q) => Vertex {
                name: format!("{}|{}|{}", a.name(u), st(p), st(q)),
                owner: if m.controls(a, u) { Owner::Player(demon) } else { a.owner(u) },
            },
        })
        .collect();
    let np = players.len();
    let proj = |x: usize| match origin[x] {
        ProductVertex::Read(u, _) | ProductVertex::Moved(u, _, _) => u,
    };
    let colors = if mode == Mode::Parity {
        (0..origin.len())
            .map(|x| {
                let mut c = game.payoff.colors[proj(x)].clone();
                c.push(1);
                c
            })
            .collect()
    } else {
        Vec::new()
    };
    let rewards = if mode.has_rewards() {
        edges
            .iter()
            .map(|&(_, _, base)| {
                let mut r: Vec<Q> = match base {
                    None => vec![Q::zero(); np - 1],
                    Some(e) => game.payoff.rewards[e]
                        .iter()
                        .map(|x| if mode == Mode::MeanPayoff { x * Q::from_integer(2.into()) } else { x.clone() })
                        .collect(),
                };
                r.push(if mode == Mode::Energy { -Q::from_integer(1.into()) } else { Q::zero() });
                r
            })
            .collect()
    } else {
        Vec::new()
    };
    let arena = Arena::new(
        players,
        vertices,
        edges.iter().map(|&(f, t, _)| Edge { from: f, to: t, prob: None }).collect(),
        Some(0),
    );
    let payoff = PayoffSpec { mode, colors, rewards, discount: None, terminals: Vec::new() };
    let game = Game::new(arena, payoff)?;
    Ok(Product { game, demon, leader, origin })
}

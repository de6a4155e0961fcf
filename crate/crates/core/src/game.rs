//! Arenas, payoff specifications, and the JSON game format.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::num::{fmt_q, parse_q_canonical, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    Player(usize),
    Chance,
    Terminal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub owner: Owner,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// Only on edges leaving chance vertices.
    pub prob: Option<Q>,
}

#[derive(Clone, Debug)]
pub struct Arena {
    pub players: Vec<String>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub init: Option<usize>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    by_name: HashMap<String, usize>,
    by_pair: HashMap<(usize, usize), usize>,
}

impl Arena {
    /// Builds the adjacency indices. Structural checks live in [`Game::validate`].
    pub fn new(players: Vec<String>, vertices: Vec<Vertex>, edges: Vec<Edge>, init: Option<usize>) -> Arena {
        let n = vertices.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let mut by_pair = HashMap::new();
        for (k, e) in edges.iter().enumerate() {
            if e.from < n && e.to < n {
                out[e.from].push(k);
                inc[e.to].push(k);
                by_pair.entry((e.from, e.to)).or_insert(k);
            }
        }
        let by_name = vertices.iter().enumerate().map(|(k, v)| (v.name.clone(), k)).collect();
        Arena { players, vertices, edges, init, out, inc, by_name, by_pair }
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn p(&self) -> usize {
        self.players.len()
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn succ(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v].iter().map(move |&e| self.edges[e].to)
    }

    pub fn pred(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.inc[v].iter().map(move |&e| self.edges[e].from)
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.by_pair.get(&(u, v)).copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.by_pair.contains_key(&(u, v))
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn vertex_or_err(&self, name: &str) -> Result<usize> {
        self.vertex(name).ok_or_else(|| Error::Invalid(format!("unknown vertex {name:?}")))
    }

    pub fn player(&self, name: &str) -> Option<usize> {
        self.players.iter().position(|p| p == name)
    }

    pub fn player_or_err(&self, name: &str) -> Result<usize> {
        self.player(name).ok_or_else(|| Error::Invalid(format!("unknown player {name:?}")))
    }

    pub fn owner(&self, v: usize) -> Owner {
        self.vertices[v].owner
    }

    pub fn name(&self, v: usize) -> &str {
        &self.vertices[v].name
    }

    /// The player controlling `v`, if any.
    pub fn controller(&self, v: usize) -> Option<usize> {
        match self.vertices[v].owner {
            Owner::Player(i) => Some(i),
            _ => None,
        }
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.vertices[v].owner == Owner::Terminal
    }

    pub fn is_chance(&self, v: usize) -> bool {
        self.vertices[v].owner == Owner::Chance
    }

    pub fn init_or_err(&self) -> Result<usize> {
        self.init.ok_or_else(|| Error::Precondition("the game has no initial vertex".into()))
    }

    /// Successor lists as plain vertex indices.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.n()).map(|v| self.succ(v).collect()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Parity,
    MeanPayoff,
    Energy,
    DiscountedSum,
    Terminal,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Parity => "parity",
            Mode::MeanPayoff => "mean-payoff",
            Mode::Energy => "energy",
            Mode::DiscountedSum => "discounted-sum",
            Mode::Terminal => "terminal",
        }
    }

    pub fn parse(s: &str) -> Result<Mode> {
        Ok(match s {
            "parity" => Mode::Parity,
            "mean-payoff" => Mode::MeanPayoff,
            "energy" => Mode::Energy,
            "discounted-sum" => Mode::DiscountedSum,
            "terminal" => Mode::Terminal,
            _ => return Err(Error::Parse(format!("mode: unknown mode {s:?}"))),
        })
    }

    pub fn has_rewards(self) -> bool {
        matches!(self, Mode::MeanPayoff | Mode::Energy | Mode::DiscountedSum)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PayoffSpec {
    pub mode: Mode,
    /// `colors[v][i]`, parity mode only.
    pub colors: Vec<Vec<u32>>,
    /// `rewards[e][i]`, reward modes only.
    pub rewards: Vec<Vec<Q>>,
    pub discount: Option<Q>,
    /// `terminals[v]` holds the payoff vector of terminal vertex `v`.
    pub terminals: Vec<Option<Vec<Q>>>,
}

#[derive(Clone, Debug)]
pub struct Game {
    pub arena: Arena,
    pub payoff: PayoffSpec,
}

impl Game {
    /// Assembles a game and checks every structural invariant.
    pub fn new(arena: Arena, payoff: PayoffSpec) -> Result<Game> {
        let g = Game { arena, payoff };
        g.validate()?;
        Ok(g)
    }

    pub fn mode(&self) -> Mode {
        self.payoff.mode
    }

    pub fn n(&self) -> usize {
        self.arena.n()
    }

    pub fn p(&self) -> usize {
        self.arena.p()
    }

    pub fn color(&self, v: usize, i: usize) -> u32 {
        self.payoff.colors[v][i]
    }

    pub fn reward(&self, e: usize, i: usize) -> &Q {
        &self.payoff.rewards[e][i]
    }

    /// Reward of the edge `uv` for player `i`; panics if `uv` is not an edge.
    pub fn reward_uv(&self, u: usize, v: usize, i: usize) -> &Q {
        let e = self.arena.edge_id(u, v).expect("edge of the arena");
        &self.payoff.rewards[e][i]
    }

    pub fn require_mode(&self, modes: &[Mode], what: &str) -> Result<()> {
        if modes.contains(&self.mode()) {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("{what} is not available in {} mode", self.mode())))
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = &self.arena;
        let pf = &self.payoff;
        let mode = pf.mode;
        let n = a.n();
        let inv = |s: String| Err(Error::Invalid(s));

        let mut seen = HashMap::new();
        for (k, p) in a.players.iter().enumerate() {
            if p.is_empty() || p == "chance" || p == "terminal" {
                return inv(format!("players[{k}]: reserved or empty player name {p:?}"));
            }
            if seen.insert(p.clone(), k).is_some() {
                return inv(format!("players[{k}]: duplicate player {p:?}"));
            }
        }
        let mut names = HashMap::new();
        for (k, v) in a.vertices.iter().enumerate() {
            if names.insert(v.name.clone(), k).is_some() {
                return inv(format!("vertices[{k}]: duplicate vertex {:?}", v.name));
            }
            match v.owner {
                Owner::Player(i) if i >= a.p() => {
                    return inv(format!("vertices[{k}].owner: no player with index {i}"))
                }
                Owner::Chance | Owner::Terminal if mode != Mode::Terminal => {
                    return inv(format!(
                        "vertices[{k}].owner: chance and terminal vertices need terminal mode"
                    ))
                }
                _ => {}
            }
        }
        if let Some(v0) = a.init {
            if v0 >= n {
                return inv("init: dangling vertex reference".into());
            }
        }
        let mut pairs = HashMap::new();
        for (k, e) in a.edges.iter().enumerate() {
            if e.from >= n {
                return inv(format!("edges[{k}].from: dangling vertex reference"));
            }
            if e.to >= n {
                return inv(format!("edges[{k}].to: dangling vertex reference"));
            }
            if pairs.insert((e.from, e.to), k).is_some() {
                return inv(format!(
                    "edges[{k}]: duplicate edge {} -> {}",
                    a.name(e.from),
                    a.name(e.to)
                ));
            }
            let chance = a.is_chance(e.from);
            match (&e.prob, chance) {
                (None, true) => return inv(format!("edges[{k}].prob: missing on a chance edge")),
                (Some(_), false) => {
                    return inv(format!("edges[{k}].prob: only chance edges carry probabilities"))
                }
                (Some(p), true) if *p <= Q::zero() || *p > Q::one() => {
                    return inv(format!("edges[{k}].prob: probability outside (0,1]"))
                }
                _ => {}
            }
        }
        for v in 0..n {
            let out = a.out_edges(v);
            if mode == Mode::Terminal {
                let term = a.is_terminal(v);
                if term && !out.is_empty() {
                    return inv(format!("vertex {:?}: terminal vertex with outgoing edges", a.name(v)));
                }
                if !term && out.is_empty() {
                    return inv(format!("vertex {:?}: missing outgoing edge", a.name(v)));
                }
            } else if out.is_empty() {
                return inv(format!("vertex {:?}: missing outgoing edge", a.name(v)));
            }
            if a.is_chance(v) {
                let s: Q = out.iter().map(|&e| a.edges[e].prob.clone().unwrap_or_default()).sum();
                if !s.is_one() {
                    return inv(format!(
                        "vertex {:?}: probability sum {} != 1",
                        a.name(v),
                        fmt_q(&s)
                    ));
                }
            }
            if Some(v) != a.init && a.in_edges(v).is_empty() {
                return inv(format!("vertex {:?}: missing ingoing edge", a.name(v)));
            }
        }

        let p = a.p();
        if mode == Mode::Parity {
            if pf.colors.len() != n || pf.colors.iter().any(|c| c.len() != p) {
                return inv("colors: every vertex needs a color for every player".into());
            }
        } else if !pf.colors.is_empty() {
            return inv(format!("colors: not allowed in {mode} mode"));
        }
        if mode.has_rewards() {
            if pf.rewards.len() != a.m() || pf.rewards.iter().any(|r| r.len() != p) {
                return inv("rewards: every edge needs a reward for every player".into());
            }
        } else if !pf.rewards.is_empty() {
            return inv(format!("rewards: not allowed in {mode} mode"));
        }
        match (&pf.discount, mode) {
            (Some(d), Mode::DiscountedSum) => {
                if *d <= Q::zero() || *d >= Q::one() {
                    return inv("discount: must lie strictly inside (0,1)".into());
                }
            }
            (None, Mode::DiscountedSum) => return inv("discount: missing".into()),
            (Some(_), _) => return inv(format!("discount: not allowed in {mode} mode")),
            _ => {}
        }
        if mode == Mode::Terminal {
            if pf.terminals.len() != n {
                return inv("terminals: table does not match the vertex list".into());
            }
            for v in 0..n {
                match (&pf.terminals[v], a.is_terminal(v)) {
                    (Some(x), true) if x.len() == p => {}
                    (Some(_), true) => {
                        return inv(format!("terminals.{}: needs a payoff for every player", a.name(v)))
                    }
                    (None, true) => return inv(format!("terminals.{}: missing payoff", a.name(v))),
                    (Some(_), false) => {
                        return inv(format!("terminals.{}: not a terminal vertex", a.name(v)))
                    }
                    (None, false) => {}
                }
            }
        } else if pf.terminals.iter().any(Option::is_some) {
            return inv(format!("terminals: not allowed in {mode} mode"));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Game> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("json: {e}")))?;
        Game::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Game> {
        let perr = |s: String| Error::Parse(s);
        let obj = v.as_object().ok_or_else(|| perr("top level: expected an object".into()))?;
        const KEYS: [&str; 8] =
            ["players", "mode", "init", "vertices", "edges", "colors", "discount", "terminals"];
        for k in obj.keys() {
            if !KEYS.contains(&k.as_str()) {
                return Err(perr(format!("top level: unknown key {k:?}")));
            }
        }
        let players: Vec<String> = obj
            .get("players")
            .and_then(Value::as_array)
            .ok_or_else(|| perr("players: expected an array of names".into()))?
            .iter()
            .enumerate()
            .map(|(k, p)| {
                p.as_str().map(str::to_string).ok_or_else(|| perr(format!("players[{k}]: expected a string")))
            })
            .collect::<Result<_>>()?;
        let mode = Mode::parse(
            obj.get("mode").and_then(Value::as_str).ok_or_else(|| perr("mode: expected a string".into()))?,
        )?;
        let pidx = |name: &str, loc: &str| -> Result<usize> {
            players
                .iter()
                .position(|p| p == name)
                .ok_or_else(|| Error::Invalid(format!("{loc}: unknown player {name:?}")))
        };

        let mut vertices = Vec::new();
        for (k, vv) in obj
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| perr("vertices: expected an array".into()))?
            .iter()
            .enumerate()
        {
            let o = vv.as_object().ok_or_else(|| perr(format!("vertices[{k}]: expected an object")))?;
            for key in o.keys() {
                if key != "id" && key != "owner" {
                    return Err(perr(format!("vertices[{k}]: unknown key {key:?}")));
                }
            }
            let name = o
                .get("id")
                .and_then(Value::as_str)
                .ok_or_else(|| perr(format!("vertices[{k}].id: expected a string")))?;
            let owner = o
                .get("owner")
                .and_then(Value::as_str)
                .ok_or_else(|| perr(format!("vertices[{k}].owner: expected a string")))?;
            let owner = match owner {
                "chance" => Owner::Chance,
                "terminal" => Owner::Terminal,
                p => Owner::Player(pidx(p, &format!("vertices[{k}].owner"))?),
            };
            vertices.push(Vertex { name: name.to_string(), owner });
        }
        let index: HashMap<&str, usize> =
            vertices.iter().enumerate().map(|(k, v)| (v.name.as_str(), k)).collect();
        let vid = |name: &str, loc: &str| -> Result<usize> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("{loc}: dangling vertex reference {name:?}")))
        };

        let mut edges = Vec::new();
        let mut rewards = Vec::new();
        for (k, ev) in obj
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| perr("edges: expected an array".into()))?
            .iter()
            .enumerate()
        {
            let o = ev.as_object().ok_or_else(|| perr(format!("edges[{k}]: expected an object")))?;
            for key in o.keys() {
                if !["from", "to", "prob", "rewards"].contains(&key.as_str()) {
                    return Err(perr(format!("edges[{k}]: unknown key {key:?}")));
                }
            }
            let from = o
                .get("from")
                .and_then(Value::as_str)
                .ok_or_else(|| perr(format!("edges[{k}].from: expected a string")))?;
            let to = o
                .get("to")
                .and_then(Value::as_str)
                .ok_or_else(|| perr(format!("edges[{k}].to: expected a string")))?;
            let from = vid(from, &format!("edges[{k}].from"))?;
            let to = vid(to, &format!("edges[{k}].to"))?;
            let prob = match o.get("prob") {
                None => None,
                Some(p) => Some(parse_rational(p, &format!("edges[{k}].prob"))?),
            };
            let mut r = vec![Q::zero(); players.len()];
            if let Some(rv) = o.get("rewards") {
                if !mode.has_rewards() {
                    return Err(Error::Invalid(format!("edges[{k}].rewards: not allowed in {mode} mode")));
                }
                let ro = rv
                    .as_object()
                    .ok_or_else(|| perr(format!("edges[{k}].rewards: expected an object")))?;
                for (p, x) in ro {
                    let loc = format!("edges[{k}].rewards.{p}");
                    r[pidx(p, &loc)?] = parse_rational(x, &loc)?;
                }
            }
            edges.push(Edge { from, to, prob });
            rewards.push(r);
        }
        if !mode.has_rewards() {
            rewards.clear();
        }

        let init = match obj.get("init") {
            None | Some(Value::Null) => None,
            Some(x) => Some(vid(
                x.as_str().ok_or_else(|| perr("init: expected a vertex id".into()))?,
                "init",
            )?),
        };

        let mut colors = Vec::new();
        if let Some(cv) = obj.get("colors") {
            if mode != Mode::Parity {
                return Err(Error::Invalid(format!("colors: not allowed in {mode} mode")));
            }
            let co = cv.as_object().ok_or_else(|| perr("colors: expected an object".into()))?;
            let mut table = vec![vec![None; players.len()]; vertices.len()];
            for (vn, per) in co {
                let v = vid(vn, &format!("colors.{vn}"))?;
                let po = per.as_object().ok_or_else(|| perr(format!("colors.{vn}: expected an object")))?;
                for (p, c) in po {
                    let loc = format!("colors.{vn}.{p}");
                    let c = c
                        .as_u64()
                        .filter(|&c| c <= u32::MAX as u64 / 4)
                        .ok_or_else(|| perr(format!("{loc}: expected a natural number")))?;
                    table[v][pidx(p, &loc)?] = Some(c as u32);
                }
            }
            for (v, row) in table.iter().enumerate() {
                for (i, c) in row.iter().enumerate() {
                    if c.is_none() {
                        return Err(Error::Invalid(format!(
                            "colors.{}.{}: missing color",
                            vertices[v].name, players[i]
                        )));
                    }
                }
            }
            colors = table.into_iter().map(|r| r.into_iter().map(Option::unwrap).collect()).collect();
        } else if mode == Mode::Parity {
            return Err(Error::Invalid("colors: missing in parity mode".into()));
        }

        let discount = match obj.get("discount") {
            None => None,
            Some(d) => {
                if mode != Mode::DiscountedSum {
                    return Err(Error::Invalid(format!("discount: not allowed in {mode} mode")));
                }
                Some(parse_rational(d, "discount")?)
            }
        };

        let mut terminals = vec![None; if mode == Mode::Terminal { vertices.len() } else { 0 }];
        if let Some(tv) = obj.get("terminals") {
            if mode != Mode::Terminal {
                return Err(Error::Invalid(format!("terminals: not allowed in {mode} mode")));
            }
            let to = tv.as_object().ok_or_else(|| perr("terminals: expected an object".into()))?;
            for (vn, per) in to {
                let v = vid(vn, &format!("terminals.{vn}"))?;
                let po = per.as_object().ok_or_else(|| perr(format!("terminals.{vn}: expected an object")))?;
                let mut row = vec![None; players.len()];
                for (p, x) in po {
                    let loc = format!("terminals.{vn}.{p}");
                    row[pidx(p, &loc)?] = Some(parse_rational(x, &loc)?);
                }
                if let Some(i) = row.iter().position(Option::is_none) {
                    return Err(Error::Invalid(format!("terminals.{vn}.{}: missing payoff", players[i])));
                }
                terminals[v] = Some(row.into_iter().map(Option::unwrap).collect());
            }
        }

        let arena = Arena::new(players, vertices, edges, init);
        Game::new(arena, PayoffSpec { mode, colors, rewards, discount, terminals })
    }

    pub fn to_json(&self) -> Value {
        let a = &self.arena;
        let pf = &self.payoff;
        let mut top = Map::new();
        top.insert("players".into(), json!(a.players));
        top.insert("mode".into(), json!(pf.mode.as_str()));
        if let Some(v0) = a.init {
            top.insert("init".into(), json!(a.name(v0)));
        }
        let verts: Vec<Value> = a
            .vertices
            .iter()
            .map(|v| {
                let owner = match v.owner {
                    Owner::Player(i) => a.players[i].clone(),
                    Owner::Chance => "chance".into(),
                    Owner::Terminal => "terminal".into(),
                };
                json!({"id": v.name, "owner": owner})
            })
            .collect();
        top.insert("vertices".into(), Value::Array(verts));
        let edges: Vec<Value> = a
            .edges
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let mut o = Map::new();
                o.insert("from".into(), json!(a.name(e.from)));
                o.insert("to".into(), json!(a.name(e.to)));
                if let Some(p) = &e.prob {
                    o.insert("prob".into(), json!(fmt_q(p)));
                }
                if pf.mode.has_rewards() {
                    let r: Map<String, Value> = a
                        .players
                        .iter()
                        .enumerate()
                        .map(|(i, p)| (p.clone(), json!(fmt_q(&pf.rewards[k][i]))))
                        .collect();
                    o.insert("rewards".into(), Value::Object(r));
                }
                Value::Object(o)
            })
            .collect();
        top.insert("edges".into(), Value::Array(edges));
        if pf.mode == Mode::Parity {
            let mut c = Map::new();
            for v in 0..a.n() {
                let per: Map<String, Value> = a
                    .players
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (p.clone(), json!(pf.colors[v][i])))
                    .collect();
                c.insert(a.name(v).to_string(), Value::Object(per));
            }
            top.insert("colors".into(), Value::Object(c));
        }
        if let Some(d) = &pf.discount {
            top.insert("discount".into(), json!(fmt_q(d)));
        }
        if pf.mode == Mode::Terminal {
            let mut t = Map::new();
            for v in 0..a.n() {
                if let Some(x) = &pf.terminals[v] {
                    let per: Map<String, Value> = a
                        .players
                        .iter()
                        .enumerate()
                        .map(|(i, p)| (p.clone(), json!(fmt_q(&x[i]))))
                        .collect();
                    t.insert(a.name(v).to_string(), Value::Object(per));
                }
            }
            top.insert("terminals".into(), Value::Object(t));
        }
        Value::Object(top)
    }

    /// Canonical text: sorted keys, two-space indentation, trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    /// Payoff table of a terminal vertex.
    pub fn terminal_payoff(&self, v: usize) -> Option<&[Q]> {
        self.payoff.terminals.get(v).and_then(|t| t.as_deref())
    }

    /// Distinct reward values per player, used for bounds.
    pub fn max_abs_reward(&self) -> Q {
        let mut m = Q::zero();
        for r in &self.payoff.rewards {
            for x in r {
                let ax = if *x < Q::zero() { -x.clone() } else { x.clone() };
                if ax > m {
                    m = ax;
                }
            }
        }
        m
    }

    /// Vertex names indexed by vertex.
    pub fn names(&self) -> Vec<String> {
        self.arena.vertices.iter().map(|v| v.name.clone()).collect()
    }

    /// Per-player payoff vector formatted against player names.
    pub fn named<T: Clone>(&self, xs: &[T]) -> BTreeMap<String, T> {
        self.arena.players.iter().cloned().zip(xs.iter().cloned()).collect()
    }
}

fn parse_rational(v: &Value, loc: &str) -> Result<Q> {
    let s = v.as_str().ok_or_else(|| Error::Parse(format!("{loc}: expected a \"p/q\" string")))?;
    parse_q_canonical(s).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{loc}: {m}")),
        other => other,
    })
}

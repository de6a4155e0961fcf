//! Risk-sensitive equilibria in simple stochastic games: extreme (pessimistic /
//! optimistic) and entropic risk measures, XRSE verification, the stationary
//! XRSE construction, constrained existence with optimists only, bounded-memory
//! XRSE search and stationary ERSE verification.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::game::{Game, Mode, Owner};
use crate::graph;
use crate::memory::{MemoryProfile, Transition};
use crate::ne::{Answer, Thresholds};
use crate::num::{fmt_q, Ext, Q};
use crate::ssg::{self, extreme_values, induced_chain, Kind, Sg};

type F = FBig<HalfEven, 2>;

pub const DEFAULT_PRECISION: usize = 128;

/// `pessimists[i]`: player `i` evaluates with PM, otherwise with OM.
pub type Partition = Vec<bool>;

/// "all", "none" or a comma-separated list of player names.
pub fn parse_pessimists(game: &Game, spec: &str) -> Result<Partition> {
    let p = game.p();
    match spec.trim() {
        "all" => Ok(vec![true; p]),
        "none" | "" => Ok(vec![false; p]),
        s => {
            let mut out = vec![false; p];
            for name in s.split(',') {
                out[game.arena.player_or_err(name.trim())?] = true;
            }
            Ok(out)
        }
    }
}

fn require_terminal(game: &Game, what: &str) -> Result<()> {
    game.require_mode(&[Mode::Terminal], what)
}

fn pay(game: &Game, t: usize, i: usize) -> Q {
    game.terminal_payoff(t).map(|p| p[i].clone()).unwrap_or_else(Q::zero)
}

/// PM or OM of a payoff distribution given by its support.
fn measure(game: &Game, terms: &BTreeSet<usize>, nonterm: bool, i: usize, pessimist: bool) -> Q {
    let vals = terms.iter().map(|&t| pay(game, t, i)).chain(nonterm.then(Q::zero));
    let v = if pessimist { vals.min() } else { vals.max() };
    v.unwrap_or_else(Q::zero)
}

/// Extreme risk measure of every player under a profile covering all players.
pub fn extreme_measure(game: &Game, pess: &[bool], m: &MemoryProfile) -> Result<Vec<Q>> {
    require_terminal(game, "extreme_measure")?;
    let (terms, nonterm) = induced_chain(game, m)?.support();
    Ok((0..game.p()).map(|i| measure(game, &terms, nonterm, i, pess[i])).collect())
}

/// Expected payoff (non-termination pays 0).
pub fn expectation(game: &Game, m: &MemoryProfile, i: usize) -> Result<Q> {
    require_terminal(game, "expectation")?;
    let (dist, _) = induced_chain(game, m)?.absorption();
    Ok(dist.iter().map(|(&t, p)| p * pay(game, t, i)).sum())
}

fn to_f(x: &Q, prec: usize) -> F {
    let n = IBig::from_str(&x.numer().to_string()).expect("integer");
    let d = IBig::from_str(&x.denom().to_string()).expect("integer");
    F::from(n).with_precision(prec).value() / F::from(d).with_precision(prec).value()
}

fn f_to_f64(x: &F) -> f64 {
    x.to_f64().value()
}

/// Natural logarithm of the base (`None` is e).
fn ln_base(base: Option<&Q>, prec: usize) -> Result<F> {
    match base {
        None => Ok(F::ONE.with_precision(prec).value()),
        Some(b) if *b > Q::one() => Ok(to_f(b, prec).ln()),
        Some(b) => Err(Error::Precondition(format!("the base must exceed 1, got {}", fmt_q(b)))),
    }
}

/// A real number known exactly or approximately.
#[derive(Clone, Debug, PartialEq)]
pub struct RiskValue {
    pub exact: Option<Q>,
    pub approx: f64,
}

impl RiskValue {
    pub fn to_json(&self) -> Value {
        match &self.exact {
            Some(q) => json!({ "exact": fmt_q(q), "approx": self.approx }),
            None => json!({ "approx": self.approx }),
        }
    }
}

/// `−(1/ρ)·log_β E[β^{−ρX}]` with X the payoff of player `i` (0 without termination);
/// ρ = 0 gives the exact expectation.
pub fn entropic_measure(
    game: &Game,
    base: Option<&Q>,
    rho: &Q,
    m: &MemoryProfile,
    i: usize,
    prec: usize,
) -> Result<RiskValue> {
    require_terminal(game, "entropic_measure")?;
    let lnb = ln_base(base, prec)?;
    let (dist, inf) = induced_chain(game, m)?.absorption();
    if rho.is_zero() {
        let e: Q = dist.iter().map(|(&t, p)| p * pay(game, t, i)).sum();
        return Ok(RiskValue { approx: crate::num::q_to_f64(&e), exact: Some(e) });
    }
    let r = to_f(rho, prec);
    let mut s = to_f(&inf, prec);
    for (&t, p) in &dist {
        let x = to_f(&pay(game, t, i), prec);
        s += to_f(p, prec) * (-(&r * x * &lnb)).exp();
    }
    let v = -(s.ln() / &lnb) / r;
    Ok(RiskValue { exact: None, approx: f_to_f64(&v) })
}

/// Best extreme measure the controller of `v` can ensure against everybody else.
pub fn extreme_adversarial_value(game: &Game, pess: &[bool], v: usize) -> Result<Q> {
    require_terminal(game, "extreme_adversarial_value")?;
    let i = game.arena.controller(v).ok_or_else(|| {
        Error::Precondition(format!("{} is not controlled by a player", game.arena.name(v)))
    })?;
    let sg = Sg::from_game(game, Some(i), Kind::Min, None);
    Ok(extreme_values(&sg, &sg.payoffs(game, i), pess[i]).val[v].clone())
}

/// Adversarial values at every controlled vertex, and for every player a positional
/// punishing profile of the others.
fn adversarial(game: &Game, pess: &[bool]) -> (Vec<Option<Q>>, Vec<Vec<Option<usize>>>) {
    let a = &game.arena;
    let mut val = vec![None; a.n()];
    let mut punish = Vec::with_capacity(game.p());
    for i in 0..game.p() {
        let sg = Sg::from_game(game, Some(i), Kind::Min, None);
        let vals = extreme_values(&sg, &sg.payoffs(game, i), pess[i]);
        let mut pun = vec![None; a.n()];
        for v in 0..a.n() {
            match a.owner(v) {
                Owner::Player(j) if j == i => {
                    val[v] = Some(vals.val[v].clone());
                    pun[v] = a.succ(v).next();
                }
                Owner::Player(_) => pun[v] = vals.min_strat[v],
                _ => {}
            }
        }
        punish.push(pun);
    }
    (val, punish)
}

fn check_edges(game: &Game, f: &[bool]) -> Result<()> {
    let a = &game.arena;
    if f.len() != a.m() {
        return Err(Error::Precondition("edge set of the wrong size".into()));
    }
    for v in 0..a.n() {
        if a.controller(v).is_some() && !a.out_edges(v).iter().any(|&e| f[e]) {
            return Err(Error::Precondition(format!("the edge set starves {}", a.name(v))));
        }
    }
    Ok(())
}

/// Vertices from which every profile using only edges of `f` reaches `w` with positive probability.
pub fn positive_prob_attractor(game: &Game, w: &[bool], f: &[bool]) -> Result<Vec<bool>> {
    require_terminal(game, "positive_prob_attractor")?;
    check_edges(game, f)?;
    let sg = Sg::from_game(game, None, Kind::Min, Some(f));
    Ok(ssg::attract(&sg, &vec![true; sg.n()], w, |k| k == Kind::Random).0)
}

/// Per player: measure under the profile and best measure over deviations.
pub fn xrse_gains(game: &Game, pess: &[bool], m: &MemoryProfile) -> Result<Vec<(Q, Q)>> {
    let cur = extreme_measure(game, pess, m)?;
    let mut out = Vec::with_capacity(game.p());
    for (i, c) in cur.into_iter().enumerate() {
        let (sg, _) = ssg::product(game, m, Some(i))?;
        let best = extreme_values(&sg, &sg.payoffs(game, i), pess[i]).val[0].clone();
        out.push((c, best));
    }
    Ok(out)
}

/// No player can improve their extreme measure by deviating.
pub fn verify_xrse(game: &Game, pess: &[bool], m: &MemoryProfile) -> Result<bool> {
    Ok(xrse_gains(game, pess, m)?.iter().all(|(c, b)| b <= c))
}

/// One pruning step shared by the pessimist and optimist searches.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub k: usize,
    pub edges: Vec<bool>,
    pub z: BTreeMap<usize, Q>,
    pub vfrown: Vec<bool>,
    pub attr: Vec<bool>,
    pub extra: Map<String, Value>,
}

pub fn edge_names(game: &Game, f: &[bool]) -> Vec<String> {
    let a = &game.arena;
    (0..a.m()).filter(|&e| f[e]).map(|e| format!("{}->{}", a.name(a.edges[e].from), a.name(a.edges[e].to))).collect()
}

fn vertex_names(game: &Game, s: &[bool]) -> Vec<String> {
    (0..game.n()).filter(|&v| s[v]).map(|v| game.arena.name(v).to_string()).collect()
}

impl Step {
    pub fn to_json(&self, game: &Game) -> Value {
        let mut o = Map::new();
        o.insert("k".into(), json!(self.k));
        o.insert("edges".into(), json!(edge_names(game, &self.edges)));
        let z: Map<String, Value> =
            self.z.iter().map(|(&i, q)| (game.arena.players[i].clone(), json!(fmt_q(q)))).collect();
        o.insert("z".into(), Value::Object(z));
        o.insert("Vfrown".into(), json!(vertex_names(game, &self.vfrown)));
        o.insert("A".into(), json!(vertex_names(game, &self.attr)));
        for (k, v) in &self.extra {
            o.insert(k.clone(), v.clone());
        }
        Value::Object(o)
    }
}

/// The trace as JSON lines.
pub fn trace_lines(game: &Game, steps: &[Step]) -> String {
    steps.iter().map(|s| format!("{}\n", s.to_json(game))).collect()
}

/// Edge set given by a list of "u->v" names.
pub fn parse_edges(game: &Game, names: &[String]) -> Result<Vec<bool>> {
    let a = &game.arena;
    let mut f = vec![false; a.m()];
    for s in names {
        let (u, v) = s.split_once("->").ok_or_else(|| Error::Parse(format!("edge {s:?}: expected u->v")))?;
        let (u, v) = (a.vertex_or_err(u.trim())?, a.vertex_or_err(v.trim())?);
        let e = a.edge_id(u, v).ok_or_else(|| Error::Parse(format!("{s} is not an edge")))?;
        f[e] = true;
    }
    Ok(f)
}

fn succ_in(game: &Game, f: &[bool]) -> Vec<Vec<usize>> {
    let a = &game.arena;
    (0..a.n())
        .map(|v| a.out_edges(v).iter().filter(|&&e| f[e] || a.is_chance(v)).map(|&e| a.edges[e].to).collect())
        .collect()
}

fn accessible(game: &Game, f: &[bool], from: usize) -> Vec<bool> {
    graph::reachable(&succ_in(game, f), &[from], &vec![true; game.n()])
}

/// Support of the stationary profile randomizing over `f` everywhere.
fn stationary_support(game: &Game, f: &[bool]) -> Result<(BTreeSet<usize>, bool)> {
    let a = &game.arena;
    let succ = succ_in(game, f);
    let acc = graph::reachable(&succ, &[a.init_or_err()?], &vec![true; a.n()]);
    let terms: BTreeSet<usize> = (0..a.n()).filter(|&v| acc[v] && a.is_terminal(v)).collect();
    let mut rev = vec![Vec::new(); a.n()];
    for (u, s) in succ.iter().enumerate() {
        for &v in s {
            rev[v].push(u);
        }
    }
    let all_terms: Vec<usize> = (0..a.n()).filter(|&v| a.is_terminal(v)).collect();
    let co = graph::reachable(&rev, &all_terms, &vec![true; a.n()]);
    let nonterm = (0..a.n()).any(|v| acc[v] && !co[v]);
    Ok((terms, nonterm))
}

/// The stationary profile choosing uniformly among the edges of `f` at every vertex.
pub fn stationary_profile(game: &Game, f: &[bool]) -> Result<MemoryProfile> {
    check_edges(game, f)?;
    let a = &game.arena;
    let support: Vec<Vec<usize>> =
        (0..a.n()).map(|v| a.out_edges(v).iter().filter(|&&e| f[e]).map(|&e| a.edges[e].to).collect()).collect();
    MemoryProfile::stationary(a, (0..game.p()).collect(), &support)
}

fn nonnegative(game: &Game) -> bool {
    game.payoff.terminals.iter().flatten().flatten().all(|x| !x.is_negative())
}

/// Construction of a stationary XRSE (payoffs must be non-negative): prune the
/// edges through which a pessimist has a profitable deviation until nobody has one.
pub fn xrse_exists(game: &Game, pess: &[bool]) -> Result<(Vec<bool>, Vec<Step>)> {
    require_terminal(game, "xrse_exists")?;
    if !nonnegative(game) {
        return Err(Error::Precondition("the construction needs non-negative payoffs".into()));
    }
    let a = &game.arena;
    let v0 = a.init_or_err()?;
    let mut e = vec![true; a.m()];
    let mut steps = Vec::new();
    for k in 0.. {
        let acc = accessible(game, &e, v0);
        let (terms, nonterm) = stationary_support(game, &e)?;
        let mut z = BTreeMap::new();
        let mut ws = Map::new();
        let mut pick: Option<(usize, Vec<bool>)> = None;
        for i in (0..game.p()).filter(|&i| pess[i]) {
            let zi = measure(game, &terms, nonterm, i, true);
            let sg = Sg::from_game(game, Some(i), Kind::Random, Some(&e));
            let pay = sg.payoffs(game, i);
            // Complement of W: i ensures a payoff above z almost surely.
            let escape = if !zi.is_negative() {
                let above: Vec<bool> = pay.iter().map(|p| p.as_ref().is_some_and(|p| p > &zi)).collect();
                ssg::as_reach(&sg, Kind::Max, &above).0
            } else {
                let safe: Vec<bool> = pay.iter().map(|p| !p.as_ref().is_some_and(|p| p <= &zi)).collect();
                ssg::sure_safe(&sg, Kind::Max, &safe).0
            };
            let w: Vec<bool> = escape.iter().map(|&x| !x).collect();
            ws.insert(a.players[i].clone(), json!(vertex_names(game, &w)));
            if pick.is_none() && !w[v0] {
                pick = Some((i, w));
            }
            z.insert(i, zi);
        }
        let mut extra = Map::new();
        extra.insert("W".into(), Value::Object(ws));
        extra.insert("player".into(), pick.as_ref().map_or(Value::Null, |(i, _)| json!(a.players[*i])));
        let vfrown = pick.as_ref().map_or_else(|| vec![false; a.n()], |(_, w)| w.clone());
        steps.push(Step { k, edges: e.clone(), z, vfrown: vfrown.clone(), attr: acc.clone(), extra });
        if pick.is_none() {
            return Ok((e, steps));
        }
        let before = e.iter().filter(|&&x| x).count();
        for (id, ed) in a.edges.iter().enumerate() {
            if e[id] && acc[ed.from] && !vfrown[ed.from] && vfrown[ed.to] {
                e[id] = false;
            }
        }
        if e.iter().filter(|&&x| x).count() == before {
            return Err(Error::Arithmetic("edge pruning made no progress".into()));
        }
    }
    unreachable!()
}

/// True when no upper bound is negative (plays may then avoid terminals).
pub fn is_cycle_friendly(th: &Thresholds) -> bool {
    th.upper.iter().all(|y| *y >= Ext::zero())
}

fn cut(game: &Game, e: &[bool], attr: &[bool]) -> Vec<bool> {
    let a = &game.arena;
    (0..a.m()).map(|id| e[id] && !(!attr[a.edges[id].from] && attr[a.edges[id].to])).collect()
}

/// Support of the profile that draws a positional profile inside `f` at random.
fn positional_mix_support(game: &Game, f: &[bool]) -> Result<(BTreeSet<usize>, bool)> {
    let a = &game.arena;
    let v0 = a.init_or_err()?;
    let acc = accessible(game, f, v0);
    let terms = (0..a.n()).filter(|&v| acc[v] && a.is_terminal(v)).collect();
    let sg = Sg::from_game(game, None, Kind::Max, Some(f));
    let term: Vec<bool> = (0..a.n()).map(|v| a.is_terminal(v)).collect();
    let nonterm = ssg::pos_avoid(&sg, Kind::Max, &term).0[v0];
    Ok((terms, nonterm))
}

fn ext_lt(x: &Q, bound: &Ext) -> bool {
    Ext::Fin(x.clone()) < *bound
}

fn ext_gt(x: &Q, bound: &Ext) -> bool {
    Ext::Fin(x.clone()) > *bound
}

/// Constrained existence of an XRSE with measures in `[lower, upper]` when every
/// player is an optimist: edge pruning in the cycle-friendly case, alternating
/// pruning and final refinements in the cycle-averse case.
pub fn xrse_constrained_optimists(game: &Game, th: &Thresholds) -> Result<(Answer<Vec<bool>>, Vec<Step>)> {
    require_terminal(game, "xrse_constrained_optimists")?;
    let a = &game.arena;
    let v0 = a.init_or_err()?;
    let friendly = is_cycle_friendly(th);
    let (val, _) = adversarial(game, &vec![false; game.p()]);
    let all = vec![true; a.m()];
    let mut steps = Vec::new();
    let note = |s: &str| {
        let mut m = Map::new();
        m.insert("case".into(), json!(if friendly { "cycle-friendly" } else { "cycle-averse" }));
        m.insert("phase".into(), json!(s));
        m
    };
    let vf0: Vec<bool> = (0..a.n())
        .map(|v| a.is_terminal(v) && (0..game.p()).any(|i| ext_gt(&pay(game, v, i), &th.upper[i])))
        .collect();
    let a0 = positive_prob_attractor(game, &vf0, &all)?;
    steps.push(Step { k: 0, edges: all.clone(), z: BTreeMap::new(), vfrown: vf0, attr: a0.clone(), extra: note("prune") });
    if a0[v0] {
        return Ok((Answer::No, steps));
    }
    let mut sets = vec![all.clone(), cut(game, &all, &a0)];
    let mut z: Vec<Q> = Vec::new();
    let mut k = 0;
    loop {
        k += 1;
        let ek = sets[k].clone();
        let (vf, attr, zk) = if friendly || k % 2 == 0 {
            let (terms, nonterm) =
                if friendly { positional_mix_support(game, &ek)? } else { stationary_support(game, &ek)? };
            let zk: Vec<Q> = (0..game.p()).map(|i| measure(game, &terms, nonterm, i, false)).collect();
            let vf: Vec<bool> = (0..a.n())
                .map(|v| match (a.controller(v), &val[v]) {
                    (Some(i), Some(x)) => x > &zk[i],
                    _ => false,
                })
                .collect();
            let attr = positive_prob_attractor(game, &vf, &ek)?;
            z = zk.clone();
            (vf, attr, zk.into_iter().enumerate().collect())
        } else {
            let sg = Sg::from_game(game, None, Kind::Max, Some(&ek));
            let term: Vec<bool> = (0..a.n()).map(|v| a.is_terminal(v)).collect();
            let ends = ssg::as_reach(&sg, Kind::Max, &term).0;
            let attr: Vec<bool> = ends.iter().map(|&x| !x).collect();
            (vec![false; a.n()], attr, BTreeMap::new())
        };
        steps.push(Step { k, edges: ek.clone(), z: zk, vfrown: vf, attr: attr.clone(), extra: note("prune") });
        if attr[v0] {
            return Ok((Answer::No, steps));
        }
        sets.push(cut(game, &ek, &attr));
        let stop = if friendly { sets[k + 1] == sets[k] } else { k >= 2 && sets[k + 1] == sets[k - 1] };
        if stop {
            break;
        }
    }
    if (0..game.p()).any(|i| ext_lt(&z[i], &th.lower[i])) {
        return Ok((Answer::No, steps));
    }
    let mut f = sets[k].clone();
    if friendly {
        return Ok((Answer::Yes(f), steps));
    }
    let mut l = 0;
    while let Some(e) = (0..a.m()).find(|&e| f[e] && refinable(game, &f, e, v0)) {
        f[e] = false;
        l += 1;
        steps.push(Step {
            k: l,
            edges: f.clone(),
            z: BTreeMap::new(),
            vfrown: vec![false; a.n()],
            attr: vec![false; a.n()],
            extra: note("refine"),
        });
    }
    Ok((Answer::Yes(f), steps))
}

/// Conditions for dropping the edge `e` = uv in the final refinements.
fn refinable(game: &Game, f: &[bool], e: usize, v0: usize) -> bool {
    let a = &game.arena;
    let (u, v) = (a.edges[e].from, a.edges[e].to);
    if a.controller(u).is_none() || a.out_edges(u).iter().filter(|&&d| f[d]).count() < 2 {
        return false;
    }
    let mut g = f.to_vec();
    g[e] = false;
    let from_v = accessible(game, f, v);
    let from_v0 = accessible(game, &g, v0);
    if (0..a.n()).any(|t| a.is_terminal(t) && from_v[t] && !from_v0[t]) {
        return false;
    }
    let from_u = accessible(game, &g, u);
    (0..a.n()).any(|t| a.is_terminal(t) && from_u[t])
}

const MIX_CAP: usize = 4096;

/// The profile σ^F output by the optimist algorithms: in the cycle-averse case it
/// randomizes uniformly over `f` at each visit, in the cycle-friendly case it draws
/// one positional profile inside `f` at the start; a deviation from it switches to
/// positional punishment of the deviator.
pub fn optimist_profile(game: &Game, f: &[bool], friendly: bool) -> Result<MemoryProfile> {
    check_edges(game, f)?;
    let a = &game.arena;
    let (_, punish) = adversarial(game, &vec![false; game.p()]);
    let fsucc: Vec<Vec<usize>> =
        (0..a.n()).map(|v| a.out_edges(v).iter().filter(|&&e| f[e]).map(|&e| a.edges[e].to).collect()).collect();
    let live: Vec<usize> = (0..a.n()).filter(|&v| !a.is_terminal(v)).collect();
    let ctrl: Vec<usize> = live.iter().copied().filter(|&v| a.controller(v).is_some()).collect();
    let mixes: Vec<Vec<usize>> = if friendly {
        let count = ctrl.iter().try_fold(1usize, |acc, &v| acc.checked_mul(fsucc[v].len()).filter(|&c| c <= MIX_CAP));
        if count.is_none() {
            return Err(Error::Unsupported("too many positional profiles to mix".into()));
        }
        let mut out = vec![vec![usize::MAX; a.n()]];
        for &v in &ctrl {
            out = out
                .into_iter()
                .flat_map(|pi| {
                    fsucc[v].iter().map(move |&w| {
                        let mut p = pi.clone();
                        p[v] = w;
                        p
                    })
                })
                .collect();
        }
        out
    } else {
        vec![]
    };
    // States: 0 = start, then (mix, previous vertex) or previous vertex, then punishments.
    let nmix = mixes.len().max(1);
    let at = |mix: usize, u: usize| 1 + mix * a.n() + u;
    let pun = |j: usize| 1 + nmix * a.n() + j;
    let mut states = vec!["start".to_string()];
    for mix in 0..nmix {
        for u in 0..a.n() {
            states.push(if friendly { format!("{mix}@{}", a.name(u)) } else { format!("at:{}", a.name(u)) });
        }
    }
    for j in 0..game.p() {
        states.push(format!("punish:{}", a.players[j]));
    }
    let mut ts = Vec::new();
    let emit_normal = |ts: &mut Vec<Transition>, from: usize, v: usize, mix: usize| {
        let to = at(mix, v);
        if a.controller(v).is_none() {
            ts.push(Transition { from, reads: v, to, emit: None, weight: None });
        } else if friendly {
            ts.push(Transition { from, reads: v, to, emit: Some(mixes[mix][v]), weight: None });
        } else {
            for &w in &fsucc[v] {
                ts.push(Transition { from, reads: v, to, emit: Some(w), weight: None });
            }
        }
    };
    let emit_punish = |ts: &mut Vec<Transition>, from: usize, v: usize, j: usize| {
        let emit = a.controller(v).map(|_| punish[j][v].expect("punishing move"));
        ts.push(Transition { from, reads: v, to: pun(j), emit, weight: None });
    };
    for &v in &live {
        for mix in 0..nmix {
            emit_normal(&mut ts, 0, v, mix);
        }
        for mix in 0..nmix {
            for u in 0..a.n() {
                let from = at(mix, u);
                let legit = match a.controller(u) {
                    None => true,
                    Some(_) if friendly => mixes[mix][u] == v,
                    Some(_) => fsucc[u].contains(&v),
                };
                match a.controller(u) {
                    Some(j) if !legit => emit_punish(&mut ts, from, v, j),
                    _ => emit_normal(&mut ts, from, v, mix),
                }
            }
        }
        for j in 0..game.p() {
            emit_punish(&mut ts, pun(j), v, j);
        }
    }
    MemoryProfile::new(a, states, 0, (0..game.p()).collect(), ts)
}

/// Search for an XRSE with measures in `th` among profiles with at most `bound`
/// memory states, deterministic updates and uniform choices over a support per
/// (state, vertex); the parts of the structure that are never reached are left trivial.
pub fn xrse_search_bounded(
    game: &Game,
    pess: &[bool],
    th: &Thresholds,
    bound: usize,
) -> Result<Option<MemoryProfile>> {
    require_terminal(game, "xrse_search_bounded")?;
    if bound == 0 {
        return Ok(None);
    }
    let a = &game.arena;
    let v0 = a.init_or_err()?;
    let subsets: Vec<Vec<Vec<usize>>> = (0..a.n())
        .map(|v| {
            let s: Vec<usize> = a.succ(v).collect();
            if a.controller(v).is_none() {
                return vec![s];
            }
            let mut out: Vec<Vec<usize>> = (1u32..(1 << s.len()))
                .map(|mask| (0..s.len()).filter(|b| mask >> b & 1 == 1).map(|b| s[b]).collect())
                .collect();
            out.sort_by_key(Vec::len);
            out
        })
        .collect();
    let mut s = Search { game, pess, th, bound, v0, subsets, assign: BTreeMap::new(), used: 1 };
    s.dfs()
}

struct Search<'a> {
    game: &'a Game,
    pess: &'a [bool],
    th: &'a Thresholds,
    bound: usize,
    v0: usize,
    subsets: Vec<Vec<Vec<usize>>>,
    /// (state, vertex) -> (next state, index into subsets[vertex])
    assign: BTreeMap<(usize, usize), (usize, usize)>,
    used: usize,
}

impl Search<'_> {
    /// Reached terminals and the first reached unassigned pair.
    fn explore(&self) -> (BTreeSet<usize>, Option<(usize, usize)>) {
        let a = &self.game.arena;
        let mut seen = BTreeSet::new();
        let mut queue = std::collections::VecDeque::from([(0, self.v0)]);
        seen.insert((0, self.v0));
        let mut terms = BTreeSet::new();
        let mut open = None;
        while let Some((q, v)) = queue.pop_front() {
            if a.is_terminal(v) {
                terms.insert(v);
                continue;
            }
            let Some(&(nq, k)) = self.assign.get(&(q, v)) else {
                open.get_or_insert((q, v));
                continue;
            };
            for &w in &self.subsets[v][k] {
                if seen.insert((nq, w)) {
                    queue.push_back((nq, w));
                }
            }
        }
        (terms, open)
    }

    fn pruned(&self, terms: &BTreeSet<usize>) -> bool {
        terms.iter().any(|&t| {
            (0..self.game.p()).any(|i| {
                let x = pay(self.game, t, i);
                if self.pess[i] {
                    ext_lt(&x, &self.th.lower[i])
                } else {
                    ext_gt(&x, &self.th.upper[i])
                }
            })
        })
    }

    fn dfs(&mut self) -> Result<Option<MemoryProfile>> {
        let (terms, open) = self.explore();
        if self.pruned(&terms) {
            return Ok(None);
        }
        let Some((q, v)) = open else {
            let m = self.profile()?;
            let z: Vec<Ext> = extreme_measure(self.game, self.pess, &m)?.into_iter().map(Ext::Fin).collect();
            if self.th.admits(&z) && verify_xrse(self.game, self.pess, &m)? {
                return Ok(Some(m));
            }
            return Ok(None);
        };
        let fresh = self.used < self.bound;
        for nq in 0..self.used + usize::from(fresh) {
            let grown = nq == self.used;
            if grown {
                self.used += 1;
            }
            for k in 0..self.subsets[v].len() {
                self.assign.insert((q, v), (nq, k));
                if let Some(m) = self.dfs()? {
                    return Ok(Some(m));
                }
            }
            self.assign.remove(&(q, v));
            if grown {
                self.used -= 1;
            }
        }
        Ok(None)
    }

    fn profile(&self) -> Result<MemoryProfile> {
        let a = &self.game.arena;
        let mut ts = Vec::new();
        for q in 0..self.used {
            for v in (0..a.n()).filter(|&v| !a.is_terminal(v)) {
                let (to, k) = self.assign.get(&(q, v)).copied().unwrap_or((q, 0));
                if a.controller(v).is_none() {
                    ts.push(Transition { from: q, reads: v, to, emit: None, weight: None });
                } else {
                    for &w in &self.subsets[v][k] {
                        ts.push(Transition { from: q, reads: v, to, emit: Some(w), weight: None });
                    }
                }
            }
        }
        let states = (0..self.used).map(|q| format!("m{q}")).collect();
        MemoryProfile::new(a, states, 0, (0..self.game.p()).collect(), ts)
    }
}

/// Terminal payoff transform under which ERSEs are the Nash equilibria for expectation.
fn transformed(game: &Game, base: Option<&Q>, rho: &[Q], prec: usize) -> Result<Vec<Vec<f64>>> {
    let lnb = ln_base(base, prec)?;
    let a = &game.arena;
    let mut out = vec![vec![0.0; game.p()]; a.n()];
    for (t, row) in out.iter_mut().enumerate() {
        let Some(p) = game.terminal_payoff(t) else { continue };
        for i in 0..game.p() {
            row[i] = if rho[i].is_zero() {
                crate::num::q_to_f64(&p[i])
            } else {
                let b = (-(to_f(&rho[i], prec) * to_f(&p[i], prec) * &lnb)).exp();
                let one = F::ONE.with_precision(prec).value();
                f_to_f64(&if rho[i].is_positive() { one - b } else { b - one })
            };
        }
    }
    Ok(out)
}

/// Best expected reward of the Max player; non-termination pays 0.
fn best_expectation(sg: &Sg, reward: &[f64]) -> f64 {
    let n = sg.n();
    let prob: Vec<Vec<f64>> = sg.prob.iter().map(|ps| ps.iter().map(crate::num::q_to_f64).collect()).collect();
    let mut x: Vec<f64> = (0..n).map(|u| if sg.kind[u] == Kind::Sink { reward[u] } else { 0.0 }).collect();
    for _ in 0..1_000_000 {
        let mut delta: f64 = 0.0;
        for u in 0..n {
            let nx = match sg.kind[u] {
                Kind::Sink => continue,
                Kind::Max => sg.succ[u].iter().map(|&w| x[w]).fold(f64::NEG_INFINITY, f64::max),
                Kind::Min => sg.succ[u].iter().map(|&w| x[w]).fold(f64::INFINITY, f64::min),
                Kind::Random => sg.succ[u].iter().zip(&prob[u]).map(|(&w, p)| p * x[w]).sum(),
            };
            delta = delta.max((nx - x[u]).abs());
            x[u] = nx;
        }
        if delta < 1e-15 {
            break;
        }
    }
    x[0]
}

fn expectation_ne(game: &Game, m: &MemoryProfile, reward: &[Vec<f64>], tol: f64) -> Result<bool> {
    let (dist, _) = induced_chain(game, m)?.absorption();
    for i in 0..game.p() {
        let cur: f64 = dist.iter().map(|(&t, p)| p.to_f64().unwrap_or(0.0) * reward[t][i]).sum();
        let (sg, _) = ssg::product(game, m, Some(i))?;
        let r: Vec<f64> = sg.vertex.iter().map(|&v| reward[v][i]).collect();
        if best_expectation(&sg, &r) > cur + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Stationary ERSE check: a Nash equilibrium for expectation once every terminal payoff
/// x of player i is replaced by 1−β^{−ρ_i x} (ρ_i > 0), β^{−ρ_i x}−1 (ρ_i < 0) or x (ρ_i = 0).
pub fn verify_erse_stationary(
    game: &Game,
    base: Option<&Q>,
    rho: &[Q],
    m: &MemoryProfile,
    tol: f64,
    prec: usize,
) -> Result<bool> {
    require_terminal(game, "verify_erse_stationary")?;
    if m.nstates() != 1 {
        return Err(Error::Precondition("the profile must be stationary (one memory state)".into()));
    }
    let reward = transformed(game, base, rho, prec)?;
    expectation_ne(game, m, &reward, tol)
}

/// Nash equilibrium for expected payoffs.
pub fn verify_expectation_ne(game: &Game, m: &MemoryProfile, tol: f64) -> Result<bool> {
    require_terminal(game, "verify_expectation_ne")?;
    let reward = transformed(game, None, &vec![Q::zero(); game.p()], DEFAULT_PRECISION)?;
    expectation_ne(game, m, &reward, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::num::q;

    fn lottery(choice: &str) -> (Game, MemoryProfile) {
        let g = corpus::game("lottery");
        let a = &g.arena;
        let mut c = vec![None; a.n()];
        c[a.vertex("b").unwrap()] = Some(a.vertex(choice).unwrap());
        let m = MemoryProfile::positional(a, &c).unwrap();
        (g, m)
    }

    fn exact(th: &[i64]) -> Thresholds {
        let v: Vec<Ext> = th.iter().map(|&x| Ext::int(x)).collect();
        Thresholds { lower: v.clone(), upper: v }
    }

    #[test]
    fn lottery_measures() {
        let (g, blue) = lottery("c");
        assert_eq!(extreme_measure(&g, &[true], &blue).unwrap(), vec![q(0)]);
        assert_eq!(extreme_measure(&g, &[false], &blue).unwrap(), vec![q(40)]);
        assert_eq!(expectation(&g, &blue, 0).unwrap(), q(1));
        let (_, red) = lottery("t3");
        assert_eq!(extreme_measure(&g, &[true], &red).unwrap(), vec![q(1)]);
        let r = entropic_measure(&g, None, &q(1), &blue, 0, DEFAULT_PRECISION).unwrap();
        let hand = -((1.0f64 / 40.0) * (-40.0f64).exp() + 39.0 / 40.0).ln();
        assert!((r.approx - hand).abs() < 1e-12, "{}", r.approx);
        assert_eq!(entropic_measure(&g, None, &q(0), &blue, 0, 64).unwrap().exact, Some(q(1)));
        let lo = entropic_measure(&g, None, &q(50), &blue, 0, DEFAULT_PRECISION).unwrap().approx;
        let hi = entropic_measure(&g, None, &q(-50), &blue, 0, DEFAULT_PRECISION).unwrap().approx;
        assert!(lo.abs() < 0.05, "{lo}");
        // ln(40)/50 away from the optimistic limit
        assert!((hi - (40.0 - 40f64.ln() / 50.0)).abs() < 1e-9, "{hi}");
    }

    #[test]
    fn lottery_adversarial_values() {
        let g = corpus::game("lottery");
        let b = g.arena.vertex("b").unwrap();
        assert_eq!(extreme_adversarial_value(&g, &[false], b).unwrap(), q(40));
        assert_eq!(extreme_adversarial_value(&g, &[true], b).unwrap(), q(1));
    }

    #[test]
    fn pruning_on_two_pessimists() {
        let g = corpus::game("ex_extreme1");
        let a = &g.arena;
        let full = stationary_profile(&g, &vec![true; a.m()]).unwrap();
        assert!(!verify_xrse(&g, &[true, true], &full).unwrap());
        let (f, steps) = xrse_exists(&g, &[true, true]).unwrap();
        let gone: Vec<String> = edge_names(&g, &f.iter().map(|&x| !x).collect::<Vec<_>>());
        assert!(gone == ["a->t1"] || gone == ["b->t2"], "{gone:?}");
        let m = stationary_profile(&g, &f).unwrap();
        assert!(verify_xrse(&g, &[true, true], &m).unwrap());
        let z = extreme_measure(&g, &[true, true], &m).unwrap();
        assert!(z == [q(1), q(2)] || z == [q(2), q(1)]);
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].z.values().cloned().collect::<Vec<_>>(), [q(1), q(1)]);
    }

    #[test]
    fn stationary_erse() {
        let (g, blue) = lottery("c");
        assert!(verify_erse_stationary(&g, None, &[q(0)], &blue, 1e-9, 128).unwrap());
        let (_, red) = lottery("t3");
        assert!(verify_erse_stationary(&g, None, &[q(4)], &red, 1e-9, 128).unwrap());
        assert!(!verify_erse_stationary(&g, None, &[q(4)], &blue, 1e-9, 128).unwrap());
        assert!(verify_expectation_ne(&g, &blue, 1e-9).unwrap());
    }

    #[test]
    fn common_coin_search() {
        let all = [true, true];
        assert!(xrse_search_bounded(&corpus::game("ex_extreme1"), &all, &exact(&[1, 1]), 2).unwrap().is_none());
        for name in ["ex_extreme2", "ex_extreme3"] {
            let g = corpus::game(name);
            let m = xrse_search_bounded(&g, &all, &exact(&[1, 1]), 2).unwrap().expect(name);
            assert!(verify_xrse(&g, &all, &m).unwrap());
            assert_eq!(extreme_measure(&g, &all, &m).unwrap(), [q(1), q(1)]);
        }
    }

    #[test]
    fn two_optimists() {
        let g = corpus::game("ex_extreme1");
        let th = Thresholds { lower: vec![Ext::int(2), Ext::int(2)], upper: vec![Ext::int(2), Ext::int(1)] };
        let (ans, _) = xrse_constrained_optimists(&g, &th).unwrap();
        assert_eq!(ans, Answer::No);
        // each optimist sees its own best terminal with positive probability
        let (ans, _) = xrse_constrained_optimists(&g, &exact(&[2, 2])).unwrap();
        let Answer::Yes(f) = ans else { panic!("expected yes") };
        let m = optimist_profile(&g, &f, true).unwrap();
        assert!(verify_xrse(&g, &[false, false], &m).unwrap());
        assert_eq!(extreme_measure(&g, &[false, false], &m).unwrap(), [q(2), q(2)]);
    }
}

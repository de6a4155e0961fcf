//! Nash equilibria: outcome characterisation through the first negotiation iterate,
//! constrained existence, and verification of finite-memory profiles.
//!
//! The searches for consistent plays are shared with the subgame-perfect module: an
//! outcome of a (subgame-perfect) equilibrium is a λ-consistent play for the right λ.

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::game::{Game, Mode, Owner};
use crate::graph;
use crate::lasso::{cycle_id, cycle_mean, eval_lasso, Lasso};
use crate::memory::MemoryProfile;
use crate::nego::{demands, is_lambda_consistent, Requirement};
use crate::num::{fmt_q, parse_q_canonical, Ext, Q};
use crate::poly;
use crate::zs::{self, Graph2};

/// Lower and upper payoff thresholds per player; unset bounds are −∞ / +∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thresholds {
    pub lower: Vec<Ext>,
    pub upper: Vec<Ext>,
}

impl Thresholds {
    pub fn unbounded(p: usize) -> Thresholds {
        Thresholds { lower: vec![Ext::NegInf; p], upper: vec![Ext::PosInf; p] }
    }

    pub fn admits(&self, z: &[Ext]) -> bool {
        z.iter().zip(&self.lower).zip(&self.upper).all(|((z, l), u)| l <= z && z <= u)
    }
}

/// Three-valued answer of the searches.
#[derive(Clone, Debug, PartialEq)]
pub enum Answer<T> {
    Yes(T),
    No,
    Unknown(String),
}

impl<T> Answer<T> {
    pub fn label(&self) -> &'static str {
        match self {
            Answer::Yes(_) => "yes",
            Answer::No => "no",
            Answer::Unknown(_) => "unknown",
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, Answer::Yes(_))
    }
}

/// The first negotiation iterate: every vertex labelled with the adversarial value of its controller.
pub fn first_iterate(game: &Game) -> Result<Requirement> {
    game.require_mode(&[Mode::Parity, Mode::MeanPayoff], "the first negotiation iterate")?;
    let mut vals: Vec<Option<Vec<Ext>>> = vec![None; game.p()];
    (0..game.n())
        .map(|v| {
            let i = game.arena.controller(v).ok_or_else(|| Error::Precondition("vertex without controller".into()))?;
            if vals[i].is_none() {
                vals[i] = Some(zs::adversarial_values(game, i)?);
            }
            Ok(vals[i].as_ref().unwrap()[v].clone())
        })
        .collect()
}

/// Whether `lasso` is the outcome of some Nash equilibrium.
pub fn ne_outcome_check(game: &Game, lasso: &Lasso) -> Result<bool> {
    let lambda = first_iterate(game)?;
    is_lambda_consistent(game, &lambda, lasso)
}

// ---------------------------------------------------------------------------
// Consistent plays in parity games

/// A λ-consistent lasso from `v0` whose payoff lies within the thresholds, if any.
/// Exact: tries every Boolean payoff vector, and for each one every choice of the least
/// color seen infinitely often per player.
pub fn parity_consistent_play(game: &Game, lambda: &[Ext], v0: usize, th: &Thresholds) -> Result<Option<Lasso>> {
    game.require_mode(&[Mode::Parity], "parity_consistent_play")?;
    let n = game.n();
    let p = game.p();
    let adj = game.arena.adjacency();
    for zmask in 0u32..(1 << p) {
        let z: Vec<Ext> = (0..p).map(|j| Ext::int((zmask >> j & 1) as i64)).collect();
        if !th.admits(&z) {
            continue;
        }
        let allowed: Vec<bool> = (0..n)
            .map(|u| match game.arena.owner(u) {
                Owner::Player(j) => lambda[u] <= z[j],
                _ => lambda[u] != Ext::PosInf,
            })
            .collect();
        if !allowed[v0] {
            continue;
        }
        let reach = graph::reachable(&adj, &[v0], &allowed);
        // candidate least colors per player, with the parity given by z
        let cands: Vec<Vec<u32>> = (0..p)
            .map(|j| {
                let mut cs: Vec<u32> = (0..n)
                    .filter(|&u| reach[u])
                    .map(|u| game.color(u, j))
                    .filter(|c| c % 2 == (zmask >> j & 1 ^ 1))
                    .collect();
                cs.sort_unstable();
                cs.dedup();
                cs
            })
            .collect();
        if cands.iter().any(Vec::is_empty) {
            continue;
        }
        let mut pick = vec![0usize; p];
        loop {
            let mins: Vec<u32> = (0..p).map(|j| cands[j][pick[j]]).collect();
            let alive: Vec<bool> = (0..n).map(|u| reach[u] && (0..p).all(|j| game.color(u, j) >= mins[j])).collect();
            for comp in graph::sccs(&adj, &alive) {
                if !graph::is_nontrivial(&adj, &comp) {
                    continue;
                }
                if (0..p).all(|j| comp.iter().any(|&u| game.color(u, j) == mins[j])) {
                    let mut target = vec![false; n];
                    for &u in &comp {
                        target[u] = true;
                    }
                    let path = graph::bfs_path(&adj, v0, &target, &reach).expect("reachable component");
                    let entry = *path.last().unwrap();
                    let cycle = graph::covering_cycle(&adj, &comp, entry);
                    let prefix = path[..path.len() - 1].to_vec();
                    return Ok(Some(Lasso::new(prefix, cycle).canonical()));
                }
            }
            // next choice
            let mut j = 0;
            while j < p {
                pick[j] += 1;
                if pick[j] < cands[j].len() {
                    break;
                }
                pick[j] = 0;
                j += 1;
            }
            if j == p {
                break;
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Consistent plays in mean-payoff games

/// A family of plays: a simple path from the start into a strongly connected set `W`,
/// then rounds that follow, for each player `j` in turn, a combination `alpha[j]` of the
/// simple cycles of `W` for longer and longer. Its payoff is `z_k = min_j p^j_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MpPlay {
    pub path: Vec<usize>,
    pub w: Vec<usize>,
    pub wp: Vec<usize>,
    pub cycles: Vec<Vec<usize>>,
    pub alpha: Vec<Vec<Q>>,
    pub payoff: Vec<Q>,
}

impl MpPlay {
    pub fn to_json(&self, game: &Game) -> Value {
        let a = &game.arena;
        let names = |xs: &[usize]| xs.iter().map(|&v| a.name(v).to_string()).collect::<Vec<_>>();
        let alpha: Map<String, Value> = (0..game.p())
            .map(|j| {
                let m: Map<String, Value> = self
                    .cycles
                    .iter()
                    .zip(&self.alpha[j])
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(c, x)| (cycle_id(a, c), json!(fmt_q(x))))
                    .collect();
                (a.players[j].clone(), Value::Object(m))
            })
            .collect();
        let payoff: Map<String, Value> =
            (0..game.p()).map(|j| (a.players[j].clone(), json!(fmt_q(&self.payoff[j])))).collect();
        json!({
            "path": names(&self.path),
            "W": names(&self.w),
            "Wp": names(&self.wp),
            "alpha": alpha,
            "payoff": payoff,
        })
    }

    /// Reads the fields `path`, `W`, `Wp`, `alpha` and (optionally) `payoff`.
    pub fn from_json(game: &Game, v: &Value) -> Result<MpPlay> {
        let a = &game.arena;
        let perr = |s: String| Error::Parse(s);
        let verts = |key: &str| -> Result<Vec<usize>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| perr(format!("{key}: expected an array")))?
                .iter()
                .map(|x| x.as_str().ok_or_else(|| perr(format!("{key}: expected names"))).and_then(|s| a.vertex_or_err(s)))
                .collect()
        };
        let mut w = verts("W")?;
        w.sort_unstable();
        w.dedup();
        let mut wp = verts("Wp")?;
        wp.sort_unstable();
        wp.dedup();
        let path = match v.get("path") {
            Some(_) => verts("path")?,
            None => Vec::new(),
        };
        let ao = v.get("alpha").and_then(Value::as_object).ok_or_else(|| perr("alpha: expected an object".into()))?;
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut entries: Vec<Vec<(usize, Q)>> = vec![Vec::new(); game.p()];
        for (pname, m) in ao {
            let j = a.player_or_err(pname)?;
            let m = m.as_object().ok_or_else(|| perr(format!("alpha.{pname}: expected an object")))?;
            for (cid, x) in m {
                let c = cid.split(',').map(|s| a.vertex_or_err(s)).collect::<Result<Vec<_>>>()?;
                let c = crate::lasso::least_rotation(a, &c);
                let k = match cycles.iter().position(|d| *d == c) {
                    Some(k) => k,
                    None => {
                        cycles.push(c);
                        cycles.len() - 1
                    }
                };
                let s = x.as_str().ok_or_else(|| perr(format!("alpha.{pname}.{cid}: expected \"p/q\"")))?;
                entries[j].push((k, parse_q_canonical(s)?));
            }
        }
        let alpha = entries
            .into_iter()
            .map(|es| {
                let mut row = vec![Q::zero(); cycles.len()];
                for (k, x) in es {
                    row[k] = x;
                }
                row
            })
            .collect();
        let payoff = match v.get("payoff").and_then(Value::as_object) {
            Some(po) => a
                .players
                .iter()
                .map(|p| {
                    po.get(p)
                        .and_then(Value::as_str)
                        .ok_or_else(|| perr(format!("payoff.{p}: missing")))
                        .and_then(parse_q_canonical)
                })
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        Ok(MpPlay { path, w, wp, cycles, alpha, payoff })
    }
}

fn is_strongly_connected(adj: &[Vec<usize>], w: &[usize], n: usize) -> bool {
    let mut alive = vec![false; n];
    for &v in w {
        alive[v] = true;
    }
    let comps = graph::sccs(adj, &alive);
    comps.len() == 1 && graph::is_nontrivial(adj, &comps[0])
}

fn simple_paths_into(adj: &[Vec<usize>], v0: usize, target: &[bool]) -> Vec<Vec<usize>> {
    fn go(adj: &[Vec<usize>], t: &[bool], path: &mut Vec<usize>, on: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        if t[v] {
            out.push(path.clone());
            return;
        }
        for &w in &adj[v] {
            if !on[w] {
                on[w] = true;
                path.push(w);
                go(adj, t, path, on, out);
                path.pop();
                on[w] = false;
            }
        }
    }
    let mut on = vec![false; adj.len()];
    on[v0] = true;
    let mut out = Vec::new();
    go(adj, target, &mut vec![v0], &mut on, &mut out);
    out
}

/// A λ-consistent play from `v0` with payoff within the thresholds, as a cycle
/// combination; exact over all strongly connected `W` and simple entry paths.
pub fn mp_consistent_play(game: &Game, lambda: &[Ext], v0: usize, th: &Thresholds) -> Result<Option<MpPlay>> {
    game.require_mode(&[Mode::MeanPayoff], "mp_consistent_play")?;
    let n = game.n();
    let p = game.p();
    if n > 20 {
        return Err(Error::Unsupported("consistent-play search is limited to 20 vertices".into()));
    }
    let adj = game.arena.adjacency();
    let reach = graph::reachable(&adj, &[v0], &vec![true; n]);
    for mask in 1u32..(1 << n) {
        let w: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if w.iter().any(|&v| !reach[v]) || !is_strongly_connected(&adj, &w, n) {
            continue;
        }
        let mut alive = vec![false; n];
        for &v in &w {
            alive[v] = true;
        }
        let cycles: Vec<Vec<usize>> =
            graph::simple_cycles(&adj, &alive).iter().map(|c| crate::lasso::least_rotation(&game.arena, c)).collect();
        let points: Vec<Vec<Q>> = cycles.iter().map(|c| (0..p).map(|j| cycle_mean(game, c, j)).collect()).collect();
        'paths: for path in simple_paths_into(&adj, v0, &alive) {
            let mut wp: Vec<usize> = path.iter().chain(&w).copied().collect();
            wp.sort_unstable();
            wp.dedup();
            let dem = demands(game, lambda, wp.iter().copied());
            let lower: Vec<Ext> = (0..p).map(|j| dem[j].clone().max(th.lower[j].clone())).collect();
            let mut alpha = Vec::new();
            let mut pts = Vec::new();
            for k in 0..p {
                let upper: Vec<(usize, Q)> = match &th.upper[k] {
                    Ext::Fin(y) => vec![(k, y.clone())],
                    Ext::PosInf => vec![],
                    Ext::NegInf => continue 'paths,
                };
                let Some((_, a)) = poly::hull_lp(&points, &lower, &upper, k) else { continue 'paths };
                pts.push(poly::combine(&points, &a));
                alpha.push(a);
            }
            let payoff: Vec<Q> = (0..p).map(|k| pts.iter().map(|x| x[k].clone()).min().unwrap()).collect();
            return Ok(Some(MpPlay { path, w, wp, cycles, alpha, payoff }));
        }
    }
    Ok(None)
}

/// Independent check of a cycle-combination play: shapes, weights, consistency, thresholds.
pub fn check_mp_play(game: &Game, lambda: &[Ext], v0: usize, th: &Thresholds, play: &MpPlay) -> Result<bool> {
    let a = &game.arena;
    let n = game.n();
    let p = game.p();
    let adj = a.adjacency();
    let bad = |s: &str| Err(Error::Invalid(format!("play: {s}")));
    if play.alpha.len() != p {
        return bad("one combination per player is required");
    }
    for row in &play.alpha {
        if row.len() != play.cycles.len() || row.iter().any(|x| *x < Q::zero()) {
            return bad("negative or misaligned weights");
        }
        if row.iter().sum::<Q>() != Q::one() {
            return bad("weights do not sum to 1");
        }
    }
    if !is_strongly_connected(&adj, &play.w, n) {
        return Ok(false);
    }
    for c in &play.cycles {
        let mut s = c.clone();
        s.sort_unstable();
        s.dedup();
        let closed = (0..c.len()).all(|k| a.has_edge(c[k], c[(k + 1) % c.len()]));
        if s.len() != c.len() || !closed || c.iter().any(|v| !play.w.contains(v)) {
            return Ok(false);
        }
    }
    // the entry path, when given, must be a path from v0 whose vertices with W make up W'
    let mut wp: Vec<usize> = play.w.clone();
    if play.path.is_empty() {
        if !play.wp.contains(&v0) {
            return Ok(false);
        }
        let mut alive = vec![false; n];
        for &v in &play.wp {
            alive[v] = true;
        }
        let r = graph::reachable(&adj, &[v0], &alive);
        if play.wp.iter().any(|&v| !r[v]) || !play.w.iter().all(|v| play.wp.contains(v)) {
            return Ok(false);
        }
        wp = play.wp.clone();
    } else {
        if play.path[0] != v0
            || play.path.windows(2).any(|e| !a.has_edge(e[0], e[1]))
            || !play.w.contains(play.path.last().unwrap())
        {
            return Ok(false);
        }
        wp.extend(&play.path);
        wp.sort_unstable();
        wp.dedup();
        if wp != play.wp {
            return Ok(false);
        }
    }
    let pts: Vec<Vec<Q>> = play
        .alpha
        .iter()
        .map(|row| {
            let points: Vec<Vec<Q>> = play.cycles.iter().map(|c| (0..p).map(|j| cycle_mean(game, c, j)).collect()).collect();
            poly::combine(&points, row)
        })
        .collect();
    let z: Vec<Q> = (0..p).map(|k| pts.iter().map(|x| x[k].clone()).min().unwrap()).collect();
    if !play.payoff.is_empty() && play.payoff != z {
        return Ok(false);
    }
    let ze: Vec<Ext> = z.into_iter().map(Ext::Fin).collect();
    let dem = demands(game, lambda, wp.iter().copied());
    Ok(th.admits(&ze) && (0..p).all(|j| dem[j] <= ze[j]))
}

/// A λ-consistent outcome from `v0` within the thresholds, for either prefix-independent mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Lasso(Lasso),
    Combination(MpPlay),
}

impl Outcome {
    pub fn to_json(&self, game: &Game) -> Value {
        match self {
            Outcome::Lasso(l) => json!({ "lasso": l.to_json(&game.arena), "text": l.display(&game.arena).to_string() }),
            Outcome::Combination(m) => m.to_json(game),
        }
    }
}

pub fn consistent_play(game: &Game, lambda: &[Ext], v0: usize, th: &Thresholds) -> Result<Option<Outcome>> {
    Ok(match game.mode() {
        Mode::Parity => parity_consistent_play(game, lambda, v0, th)?.map(Outcome::Lasso),
        Mode::MeanPayoff => mp_consistent_play(game, lambda, v0, th)?.map(Outcome::Combination),
        m => return Err(Error::Unsupported(format!("equilibrium outcomes are not searched in {m} mode"))),
    })
}

/// Constrained existence of a Nash equilibrium from the initial vertex.
pub fn ne_constrained_exists(game: &Game, th: &Thresholds) -> Result<Answer<Outcome>> {
    let v0 = game.arena.init_or_err()?;
    let lambda = first_iterate(game)?;
    Ok(match consistent_play(game, &lambda, v0, th)? {
        Some(o) => Answer::Yes(o),
        None => Answer::No,
    })
}

// ---------------------------------------------------------------------------
// Verifying deterministic finite-memory profiles

/// Product of the arena with a deterministic profile covering every player. Player `i`
/// (if any) is free at its own vertices; everyone else follows the structure.
struct ProfileGraph {
    states: Vec<(usize, usize)>,
    succ: Vec<Vec<usize>>,
}

fn profile_graph(game: &Game, m: &MemoryProfile, free: Option<usize>) -> Result<ProfileGraph> {
    let a = &game.arena;
    let v0 = a.init_or_err()?;
    let mut index = std::collections::HashMap::new();
    let mut states = vec![(v0, m.initial)];
    index.insert((v0, m.initial), 0usize);
    let mut succ: Vec<Vec<usize>> = vec![Vec::new()];
    let mut k = 0;
    while k < states.len() {
        let (u, pst) = states[k];
        let mut out = Vec::new();
        for &t in m.enabled(pst, u) {
            let tr = &m.transitions[t];
            let targets: Vec<usize> = if free.is_some_and(|i| a.owner(u) == Owner::Player(i)) || !m.controls(a, u) {
                a.succ(u).collect()
            } else {
                tr.emit.into_iter().collect()
            };
            for v in targets {
                let key = (v, tr.to);
                let id = *index.entry(key).or_insert_with(|| {
                    states.push(key);
                    succ.push(Vec::new());
                    states.len() - 1
                });
                if !out.contains(&id) {
                    out.push(id);
                }
            }
        }
        succ[k] = out;
        k += 1;
    }
    Ok(ProfileGraph { states, succ })
}

fn check_profile(game: &Game, m: &MemoryProfile) -> Result<()> {
    if !m.is_deterministic() {
        return Err(Error::Precondition("the profile must be deterministic".into()));
    }
    if (0..game.n()).any(|v| game.arena.controller(v).is_some_and(|i| !m.owners.contains(&i))) {
        return Err(Error::Precondition("the profile must speak for every player".into()));
    }
    Ok(())
}

/// The outcome of a deterministic profile, projected on the arena.
pub fn profile_outcome(game: &Game, m: &MemoryProfile) -> Result<Lasso> {
    check_profile(game, m)?;
    let g = profile_graph(game, m, None)?;
    let mut seen = vec![usize::MAX; g.states.len()];
    let mut seq = Vec::new();
    let mut x = 0;
    while seen[x] == usize::MAX {
        seen[x] = seq.len();
        seq.push(x);
        x = g.succ[x][0];
    }
    let k = seen[x];
    let proj = |xs: &[usize]| xs.iter().map(|&s| g.states[s].0).collect::<Vec<_>>();
    Ok(Lasso::new(proj(&seq[..k]), proj(&seq[k..])))
}

/// One-player energy check: can the free player keep `i`'s energy non-negative forever
/// from the start state with no initial credit?
fn energy_survives(game: &Game, g: &ProfileGraph, i: usize) -> Result<bool> {
    let a = &game.arena;
    let g2 = Graph2::new(g.succ.clone(), vec![true; g.states.len()]);
    let w: Vec<Vec<Q>> = (0..g.states.len())
        .map(|s| g.succ[s].iter().map(|&t| game.reward_uv(g.states[s].0, g.states[t].0, i).clone()).collect())
        .collect();
    let wi = zs::scale_to_int(&w)?;
    let (credit, _) = zs::energy_credit(&g2, &vec![true; g.states.len()], &wi);
    let _ = a;
    Ok(credit[0] == Some(0))
}

/// Nash equilibrium check for a deterministic profile in an energy game: every player
/// that loses the outcome has no winning play once free to deviate.
pub fn verify_ne_energy(game: &Game, m: &MemoryProfile) -> Result<bool> {
    game.require_mode(&[Mode::Energy], "verify_ne_energy")?;
    let outcome = profile_outcome(game, m)?;
    for i in 0..game.p() {
        if eval_lasso(game, &outcome, i)? == Ext::int(1) {
            continue;
        }
        let g = profile_graph(game, m, Some(i))?;
        if energy_survives(game, &g, i)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Best payoff a single free player reaches against the rest of a deterministic profile,
/// compared with the outcome. Parity, mean-payoff and energy modes.
pub fn verify_ne_deterministic(game: &Game, m: &MemoryProfile) -> Result<bool> {
    let outcome = profile_outcome(game, m)?;
    for i in 0..game.p() {
        let mine = eval_lasso(game, &outcome, i)?;
        let g = profile_graph(game, m, Some(i))?;
        let ns = g.states.len();
        let all = vec![true; ns];
        let reach = graph::reachable(&g.succ, &[0], &all);
        let better = match game.mode() {
            Mode::Parity => {
                mine == Ext::zero() && {
                    let colors = vec![(0..ns).map(|s| game.color(g.states[s].0, i)).collect::<Vec<u32>>()];
                    zs::good_cycle(&g.succ, &reach, &colors).is_some()
                }
            }
            Mode::MeanPayoff => {
                let adj: graph::WAdj = (0..ns)
                    .map(|s| {
                        g.succ[s].iter().map(|&t| (t, game.reward_uv(g.states[s].0, g.states[t].0, i).clone())).collect()
                    })
                    .collect();
                let (best, _) = graph::max_mean_cycle(&adj, &reach).expect("the product has a cycle");
                Ext::Fin(best) > mine
            }
            Mode::Energy => mine == Ext::zero() && energy_survives(game, &g, i)?,
            m => return Err(Error::Unsupported(format!("deterministic profile check in {m} mode"))),
        };
        if better {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Nash equilibrium check dispatched on the objective; in terminal mode payoffs are
/// expectations and comparisons allow an absolute slack of `1e-9`.
pub fn verify_ne_generic(game: &Game, m: &MemoryProfile) -> Result<bool> {
    match game.mode() {
        Mode::Terminal => crate::risk::verify_expectation_ne(game, m, 1e-9),
        Mode::DiscountedSum => Err(Error::Unsupported("best responses for discounted-sum payoffs".into())),
        _ => verify_ne_deterministic(game, m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn two_ne_outcomes_in_fig_ne_spe() {
        let g = corpus::game("fig_ne_spe");
        let a = &g.arena;
        let yes = |s: &str| ne_outcome_check(&g, &Lasso::parse_text(a, s).unwrap()).unwrap();
        assert!(yes("(a)"));
        assert!(yes("a b (c)"));
        assert!(!yes("a (b)"));
    }

    #[test]
    fn constrained_ne_search() {
        let g = corpus::game("fig_ne_spe");
        let th = Thresholds { lower: vec![Ext::int(1), Ext::int(1)], upper: vec![Ext::PosInf, Ext::PosInf] };
        let Answer::Yes(Outcome::Lasso(l)) = ne_constrained_exists(&g, &th).unwrap() else { panic!() };
        assert_eq!(l.display(&g.arena).to_string(), "a b (c)");
        let th = Thresholds { lower: vec![Ext::NegInf; 2], upper: vec![Ext::int(0), Ext::PosInf] };
        let Answer::Yes(Outcome::Lasso(l)) = ne_constrained_exists(&g, &th).unwrap() else { panic!() };
        assert_eq!(l.display(&g.arena).to_string(), "(a)");
    }

    #[test]
    fn inf_spe_origin_payoff() {
        let g = corpus::game("inf_spe");
        let th = Thresholds { lower: vec![Ext::int(0); 2], upper: vec![Ext::int(0); 2] };
        // (0,0) is the payoff of some play, but not of an equilibrium: both values are 1
        assert_eq!(ne_constrained_exists(&g, &th).unwrap(), Answer::No);
        let free = crate::nego::vacuous_requirement(&g);
        let m = mp_consistent_play(&g, &free, 0, &th).unwrap().unwrap();
        assert!(check_mp_play(&g, &free, 0, &th, &m).unwrap());
        let back = MpPlay::from_json(&g, &m.to_json(&g)).unwrap();
        assert!(check_mp_play(&g, &free, 0, &th, &back).unwrap());
        let lambda = first_iterate(&g).unwrap();
        assert!(!check_mp_play(&g, &lambda, 0, &th, &m).unwrap());
    }
}

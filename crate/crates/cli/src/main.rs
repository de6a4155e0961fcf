//! `equilibra`: equilibrium questions on game files from the command line.
//!
//! Every subcommand prints one JSON object `{answer, payload, diagnostics}` on stdout.
//! Exit status is 0 whenever an answer was computed (including "no" and "unknown")
//! and 2 on usage, parse or precondition errors.

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use equilibra_core::lasso::eval_all;
use equilibra_core::ne::{ne_constrained_exists, ne_outcome_check, verify_ne_energy, Answer, Thresholds};
use equilibra_core::nego::{
    exceeds, is_lambda_consistent, nego, nego_iterate, requirement_to_json, vacuous_requirement, Requirement,
};
use equilibra_core::num::{fmt_q, parse_q};
use equilibra_core::product::product_game;
use equilibra_core::risk::{self, DEFAULT_PRECISION};
use equilibra_core::spe::{check_mp_witness, epsilon_min_search, spe_exists, MpWitness};
use equilibra_core::verification::{achaotic_rational_verify_mp, rational_verify, Concept};
use equilibra_core::{corpus, Error, Ext, Game, Lasso, MemoryProfile, Mode, Q, Result};

#[derive(Parser)]
#[command(name = "equilibra", version, about = "Equilibria in multiplayer games on graphs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(clap::Args)]
struct Bounds {
    /// Lower thresholds, "name=p/q,..." (unset: -inf).
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    lower: String,
    /// Upper thresholds, "name=p/q,..." (unset: +inf).
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    upper: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a game file.
    Validate { game: String },
    /// Payoffs of a lasso such as "a b (c)".
    Eval {
        game: String,
        #[arg(long)]
        lasso: String,
    },
    /// One application of the negotiation function.
    Nego {
        game: String,
        /// Requirement "vertex=value,..." (unset vertices: -inf).
        #[arg(long, default_value = "")]
        lambda: String,
    },
    /// Negotiation sequence from the vacuous requirement.
    NegoIterate {
        game: String,
        #[arg(long, default_value_t = 16)]
        max: usize,
    },
    /// Is the requirement an ε-fixed point of the negotiation function?
    FixedPoint {
        game: String,
        #[arg(long, default_value = "")]
        lambda: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        eps: String,
    },
    /// Is the lasso a Nash equilibrium outcome?
    NeCheck {
        game: String,
        #[arg(long)]
        lasso: String,
    },
    /// Constrained existence of a Nash equilibrium.
    NeExists {
        game: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Constrained existence of an (ε-)SPE.
    SpeExists {
        game: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        eps: String,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long, default_value_t = 16)]
        max: usize,
    },
    /// Re-check an SPE witness produced by spe-exists.
    SpeCheckWitness {
        game: String,
        witness: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        eps: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Least ε for which ε-SPEs exist (mean-payoff).
    EpsMin {
        game: String,
        #[arg(long, default_value_t = 10)]
        precision: u32,
        #[arg(long, default_value_t = 32)]
        max: usize,
    },
    /// Product of a game with a Leader's memory structure.
    Product { game: String, machine: String },
    /// Does every equilibrium give Leader more than t?
    RationalVerify {
        game: String,
        machine: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value = "nash")]
        concept: String,
        #[arg(long, default_value_t = 16)]
        max: usize,
    },
    /// Achaotic rational verification with ε_min-SPEs (mean-payoff).
    AchaoticVerify {
        game: String,
        machine: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value_t = 10)]
        precision: u32,
        #[arg(long, default_value_t = 32)]
        max: usize,
    },
    /// Stationary XRSE construction for non-negative terminal payoffs.
    XrseExists {
        game: String,
        #[arg(long, default_value = "all")]
        pessimists: String,
    },
    /// Constrained XRSE existence when every player is an optimist.
    XrseConstrained {
        game: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Bounded-memory XRSE search.
    XrseSearch {
        game: String,
        #[arg(long, default_value = "all")]
        pessimists: String,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long, default_value_t = 2)]
        memory_bound: usize,
    },
    /// Check that a profile is an XRSE.
    XrseVerify {
        game: String,
        profile: String,
        #[arg(long, default_value = "all")]
        pessimists: String,
    },
    /// Entropic risk measure of each player's payoff under a profile.
    ErEval {
        game: String,
        profile: String,
        /// Risk aversion, one value for everybody or "name=p/q,...".
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        rho: String,
        /// Base β (default e).
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: usize,
    },
    /// Check that a stationary profile is an entropic-risk equilibrium.
    ErseVerify {
        game: String,
        profile: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        rho: String,
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Check that a deterministic profile is a Nash equilibrium of an energy game.
    EnergyNeVerify { game: String, profile: String },
}

struct Out {
    answer: &'static str,
    payload: Value,
    diagnostics: Vec<(&'static str, String)>,
}

impl Out {
    fn new(answer: &'static str, payload: Value) -> Out {
        Out { answer, payload, diagnostics: Vec::new() }
    }

    fn bool(b: bool, payload: Value) -> Out {
        Out::new(if b { "yes" } else { "no" }, payload)
    }

    fn answer<T>(a: Answer<T>, f: impl FnOnce(T) -> Result<Value>) -> Result<Out> {
        Ok(match a {
            Answer::Yes(x) => Out::new("yes", f(x)?),
            Answer::No => Out::new("no", Value::Null),
            Answer::Unknown(s) => {
                let mut o = Out::new("unknown", json!({ "reason": s }));
                o.diagnostics.push(("note", s));
                o
            }
        })
    }

    fn to_json(&self) -> Value {
        let diags: Vec<Value> =
            self.diagnostics.iter().map(|(sev, msg)| json!({ "severity": sev, "message": msg })).collect();
        json!({ "answer": self.answer, "payload": self.payload, "diagnostics": diags })
    }
}

fn read_text(path: &str) -> Result<String> {
    match std::fs::read_to_string(path) {
        Ok(t) => Ok(t),
        Err(e) => {
            // Bare corpus names are accepted when no such file exists.
            let stem = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or(path);
            if !Path::new(path).exists() {
                if let Some(t) = corpus::get(stem) {
                    return Ok(t.to_string());
                }
            }
            Err(Error::Parse(format!("{path}: {e}")))
        }
    }
}

fn load_game(path: &str) -> Result<Game> {
    Game::parse(&read_text(path)?).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

fn load_profile(game: &Game, path: &str) -> Result<MemoryProfile> {
    MemoryProfile::parse(&game.arena, &read_text(path)?)
}

fn assignments(s: &str) -> Result<Vec<(String, String)>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            let (k, v) = x.split_once('=').ok_or_else(|| Error::Parse(format!("expected name=value, got {x:?}")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn thresholds(game: &Game, b: &Bounds) -> Result<Thresholds> {
    let mut th = Thresholds::unbounded(game.p());
    for (k, v) in assignments(&b.lower)? {
        th.lower[game.arena.player_or_err(&k)?] = Ext::parse(&v)?;
    }
    for (k, v) in assignments(&b.upper)? {
        th.upper[game.arena.player_or_err(&k)?] = Ext::parse(&v)?;
    }
    Ok(th)
}

fn requirement(game: &Game, s: &str) -> Result<Requirement> {
    let mut l = vacuous_requirement(game);
    for (k, v) in assignments(s)? {
        l[game.arena.vertex_or_err(&k)?] = Ext::parse(&v)?;
    }
    Ok(l)
}

fn per_player_q(game: &Game, s: &str) -> Result<Vec<Q>> {
    if !s.contains('=') {
        return Ok(vec![parse_q(s.trim())?; game.p()]);
    }
    let mut out = vec![Q::from_integer(0.into()); game.p()];
    for (k, v) in assignments(s)? {
        out[game.arena.player_or_err(&k)?] = parse_q(&v)?;
    }
    Ok(out)
}

fn payoffs(game: &Game, l: &Lasso) -> Result<Value> {
    let xs = eval_all(game, l)?;
    Ok(Value::Object(
        game.arena.players.iter().zip(xs).map(|(p, x)| (p.clone(), Value::String(x.to_string()))).collect(),
    ))
}

fn named_q(game: &Game, xs: &[Q]) -> Value {
    Value::Object(game.arena.players.iter().zip(xs).map(|(p, x)| (p.clone(), json!(fmt_q(x)))).collect())
}

fn run(cmd: Cmd) -> Result<Out> {
    match cmd {
        Cmd::Validate { game } => {
            let g = load_game(&game)?;
            Ok(Out::new(
                "yes",
                json!({
                    "mode": g.mode().as_str(),
                    "players": g.arena.players,
                    "vertices": g.n(),
                    "edges": g.arena.m(),
                }),
            ))
        }
        Cmd::Eval { game, lasso } => {
            let g = load_game(&game)?;
            let l = Lasso::parse_text(&g.arena, &lasso)?;
            Ok(Out::new("yes", json!({ "lasso": l.display(&g.arena).to_string(), "payoff": payoffs(&g, &l)? })))
        }
        Cmd::Nego { game, lambda } => {
            let g = load_game(&game)?;
            let l = requirement(&g, &lambda)?;
            let n = nego(&g, &l)?;
            Ok(Out::new("yes", json!({ "lambda": requirement_to_json(&g, &l), "nego": requirement_to_json(&g, &n) })))
        }
        Cmd::NegoIterate { game, max } => {
            let g = load_game(&game)?;
            let (seq, fixed) = nego_iterate(&g, max)?;
            let seq: Vec<Value> = seq.iter().map(|l| requirement_to_json(&g, l)).collect();
            Ok(Out::new(if fixed { "yes" } else { "unknown" }, json!({ "sequence": seq, "fixed_point": fixed })))
        }
        Cmd::FixedPoint { game, lambda, eps } => {
            let g = load_game(&game)?;
            let l = requirement(&g, &lambda)?;
            let e = parse_q(&eps)?;
            let n = nego(&g, &l)?;
            let bad = exceeds(&n, &l, &e);
            Ok(Out::bool(
                bad.is_none(),
                json!({
                    "nego": requirement_to_json(&g, &n),
                    "violation": bad.map(|v| g.arena.name(v).to_string()),
                }),
            ))
        }
        Cmd::NeCheck { game, lasso } => {
            let g = load_game(&game)?;
            let l = Lasso::parse_text(&g.arena, &lasso)?;
            if l.first() != g.arena.init_or_err()? {
                return Err(Error::Precondition("the lasso must start at the initial vertex".into()));
            }
            let ok = ne_outcome_check(&g, &l)?;
            Ok(Out::bool(ok, json!({ "lasso": l.display(&g.arena).to_string(), "payoff": payoffs(&g, &l)? })))
        }
        Cmd::NeExists { game, bounds } => {
            let g = load_game(&game)?;
            let th = thresholds(&g, &bounds)?;
            Out::answer(ne_constrained_exists(&g, &th)?, |o| Ok(o.to_json(&g)))
        }
        Cmd::SpeExists { game, eps, bounds, max } => {
            let g = load_game(&game)?;
            let th = thresholds(&g, &bounds)?;
            Out::answer(spe_exists(&g, &parse_q(&eps)?, &th, max)?, Ok)
        }
        Cmd::SpeCheckWitness { game, witness, eps, bounds } => {
            let g = load_game(&game)?;
            let th = thresholds(&g, &bounds)?;
            let e = parse_q(&eps)?;
            let w: Value =
                serde_json::from_str(&read_text(&witness)?).map_err(|e| Error::Parse(format!("{witness}: {e}")))?;
            let ok = match g.mode() {
                Mode::MeanPayoff => check_mp_witness(&g, &e, &MpWitness::from_json(&g, &w)?, &th)?,
                Mode::Parity => check_parity_witness(&g, &w, &th)?,
                m => return Err(Error::Unsupported(format!("SPE witnesses are not checked in {m} mode"))),
            };
            Ok(Out::bool(ok, Value::Null))
        }
        Cmd::EpsMin { game, precision, max } => {
            let g = load_game(&game)?;
            Out::answer(epsilon_min_search(&g, precision, max)?, |e| Ok(json!({ "eps": fmt_q(&e) })))
        }
        Cmd::Product { game, machine } => {
            let g = load_game(&game)?;
            let m = load_profile(&g, &machine)?;
            let p = product_game(&g, &m)?;
            Ok(Out::new(
                "yes",
                json!({
                    "vertices": p.game.n(),
                    "leader": p.game.arena.players[p.leader],
                    "demon": p.game.arena.players[p.demon],
                    "game": p.game.to_json(),
                }),
            ))
        }
        Cmd::RationalVerify { game, machine, t, concept, max } => {
            let g = load_game(&game)?;
            let m = load_profile(&g, &machine)?;
            let v = rational_verify(&g, &m, &parse_q(&t)?, Concept::parse(&concept)?, max)?;
            Ok(Out::new(v.label(), v.payload()))
        }
        Cmd::AchaoticVerify { game, machine, t, precision, max } => {
            let g = load_game(&game)?;
            let m = load_profile(&g, &machine)?;
            let (v, eps) = achaotic_rational_verify_mp(&g, &m, &parse_q(&t)?, precision, max)?;
            let mut payload = v.payload();
            if let (Some(o), Some(e)) = (payload.as_object_mut(), eps) {
                o.insert("eps_min".into(), json!(fmt_q(&e)));
            }
            Ok(Out::new(v.label(), payload))
        }
        Cmd::XrseExists { game, pessimists } => {
            let g = load_game(&game)?;
            let pess = risk::parse_pessimists(&g, &pessimists)?;
            let (f, steps) = risk::xrse_exists(&g, &pess)?;
            let m = risk::stationary_profile(&g, &f)?;
            let measures = risk::extreme_measure(&g, &pess, &m)?;
            Ok(Out::new(
                "yes",
                json!({
                    "F": risk::edge_names(&g, &f),
                    "measures": named_q(&g, &measures),
                    "trace": steps.iter().map(|s| s.to_json(&g)).collect::<Vec<_>>(),
                }),
            ))
        }
        Cmd::XrseConstrained { game, bounds } => {
            let g = load_game(&game)?;
            let th = thresholds(&g, &bounds)?;
            let (a, steps) = risk::xrse_constrained_optimists(&g, &th)?;
            let trace: Vec<Value> = steps.iter().map(|s| s.to_json(&g)).collect();
            let mut out = Out::answer(a, |f| {
                let m = risk::optimist_profile(&g, &f, risk::is_cycle_friendly(&th))?;
                let measures = risk::extreme_measure(&g, &vec![false; g.p()], &m)?;
                Ok(json!({ "F": risk::edge_names(&g, &f), "measures": named_q(&g, &measures) }))
            })?;
            let mut p = match out.payload.take() {
                Value::Object(o) => o,
                Value::Null => Map::new(),
                v => Map::from_iter([("value".to_string(), v)]),
            };
            p.insert("cycle_friendly".into(), json!(risk::is_cycle_friendly(&th)));
            p.insert("trace".into(), Value::Array(trace));
            out.payload = Value::Object(p);
            Ok(out)
        }
        Cmd::XrseSearch { game, pessimists, bounds, memory_bound } => {
            let g = load_game(&game)?;
            let pess = risk::parse_pessimists(&g, &pessimists)?;
            let th = thresholds(&g, &bounds)?;
            Ok(match risk::xrse_search_bounded(&g, &pess, &th, memory_bound)? {
                Some(m) => {
                    let measures = risk::extreme_measure(&g, &pess, &m)?;
                    Out::new("yes", json!({ "profile": m.to_json(&g.arena), "measures": named_q(&g, &measures) }))
                }
                None => Out::new("no", json!({ "memory_bound": memory_bound })),
            })
        }
        Cmd::XrseVerify { game, profile, pessimists } => {
            let g = load_game(&game)?;
            let pess = risk::parse_pessimists(&g, &pessimists)?;
            let m = load_profile(&g, &profile)?;
            let gains = risk::xrse_gains(&g, &pess, &m)?;
            let ok = gains.iter().all(|(c, b)| b <= c);
            let per: Map<String, Value> = g
                .arena
                .players
                .iter()
                .zip(&gains)
                .map(|(p, (c, b))| (p.clone(), json!({ "measure": fmt_q(c), "best_deviation": fmt_q(b) })))
                .collect();
            Ok(Out::bool(ok, Value::Object(per)))
        }
        Cmd::ErEval { game, profile, rho, base, precision } => {
            let g = load_game(&game)?;
            let m = load_profile(&g, &profile)?;
            let rho = per_player_q(&g, &rho)?;
            let base = base.as_deref().map(parse_q).transpose()?;
            let mut per = Map::new();
            for i in 0..g.p() {
                let r = risk::entropic_measure(&g, base.as_ref(), &rho[i], &m, i, precision)?;
                per.insert(g.arena.players[i].clone(), r.to_json());
            }
            Ok(Out::new("yes", Value::Object(per)))
        }
        Cmd::ErseVerify { game, profile, rho, base, precision, tol } => {
            let g = load_game(&game)?;
            let m = load_profile(&g, &profile)?;
            let rho = per_player_q(&g, &rho)?;
            let base = base.as_deref().map(parse_q).transpose()?;
            let ok = risk::verify_erse_stationary(&g, base.as_ref(), &rho, &m, tol, precision)?;
            Ok(Out::bool(ok, json!({ "tolerance": tol })))
        }
        Cmd::EnergyNeVerify { game, profile } => {
            let g = load_game(&game)?;
            let m = load_profile(&g, &profile)?;
            Ok(Out::bool(verify_ne_energy(&g, &m)?, Value::Null))
        }
    }
}

/// Parity witnesses are the `{lambda, lasso}` objects printed by spe-exists: λ must be a
/// fixed point and the lasso a λ-consistent play from the initial vertex within bounds.
fn check_parity_witness(g: &Game, w: &Value, th: &Thresholds) -> Result<bool> {
    let lambda = equilibra_core::nego::requirement_from_json(
        g,
        w.get("lambda").ok_or_else(|| Error::Parse("witness: missing lambda".into()))?,
    )?;
    let l = Lasso::from_json(&g.arena, w.get("lasso").ok_or_else(|| Error::Parse("witness: missing lasso".into()))?)?;
    Ok(l.first() == g.arena.init_or_err()?
        && nego(g, &lambda)? == lambda
        && is_lambda_consistent(g, &lambda, &l)?
        && th.admits(&eval_all(g, &l)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, code) = match run(cli.cmd) {
        Ok(o) => (o, 0),
        Err(e) => {
            let mut o = Out::new("error", Value::Null);
            o.diagnostics.push(("error", e.to_string()));
            (o, 2)
        }
    };
    for (sev, msg) in &out.diagnostics {
        eprintln!("{sev}: {msg}");
    }
    let text = match cli.format {
        Format::Json => out.to_json().to_string(),
        Format::Pretty => serde_json::to_string_pretty(&out.to_json()).expect("serializable"),
    };
    // A closed pipe is not worth a panic.
    let _ = writeln!(std::io::stdout(), "{text}");
    ExitCode::from(code)
}

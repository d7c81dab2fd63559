use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use couplex_core::asymptotics::{
    cramer_tilt_exponent, excess_exponent_converse, exponent_fit, min_max_kl, type_coupling_excess, SeriesTransform,
    TiltSide,
};
use couplex_core::channels_apps::{
    capacity_with_input_constraint, conditional_maximal_correlation, exact_resolvability, feasible_input_set,
    gk_common_information, maximal_correlation, monte_carlo_softcover, mu_epsilon, oneshot_resolvability_bounds,
    pz_redundancy_check, second_order_rate, stealth_capacity_bounds, sufficient_statistic_detect, ConditionalJoint,
    OneShotSetup, RateDirection,
};
use couplex_core::coupling_lp::{
    coupling_vertices, maximal_coupling, min_conditional_entropy_coupling, min_excess_distance_prob,
    transport_min_cost, Coupling, CostMatrix, MinEntropyMode,
};
use couplex_core::guessing::{
    best_function_exact_with_cap, best_function_greedy, deterministic_coupling_check, guessing_exponent_bounds,
    guessing_product_scan, renyi_cascade_coupling, ScanMode,
};
use couplex_core::io::{self, Cell, Table};
use couplex_core::prob_core::{
    arimoto_renyi_conditional, chernoff_information, entropy, enumerate_types, kl_divergence, overlap_product_exact,
    product_power, renyi_entropy, tv_distance, tv_product_exact, Channel, Dist, JointDist,
};
use couplex_core::{Base, Error, DEFAULT_ATOM_CAP};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;

/// A failed run: exit code plus a machine-readable description.
pub struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl Failure {
    pub fn usage(message: &str) -> Self {
        Failure { code: 2, kind: "InvalidArguments".into(), message: message.to_string() }
    }

    fn unreadable(path: &Path, e: std::io::Error) -> Self {
        Failure { code: 66, kind: "UnreadableInput".into(), message: format!("{}: {e}", path.display()) }
    }

    fn unwritable(path: &Path, e: std::io::Error) -> Self {
        Failure { code: 73, kind: "UnwritableOutput".into(), message: format!("{}: {e}", path.display()) }
    }

    pub fn report(&self) -> ExitCode {
        let body = json!({ "error": self.kind, "message": self.message, "exit_code": self.code });
        eprintln!("{body}");
        ExitCode::from(self.code)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::TooLarge { .. }) { 69 } else { 2 };
        Failure { code, kind: e.kind().into(), message: e.to_string() }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Failure::unreadable(path, e))
}

struct Ctx<'a> {
    common: &'a Common,
    base: Base,
}

impl Ctx<'_> {
    fn dist(&self, path: &Path) -> Res<Dist> {
        Ok(io::parse_dist(&read(path)?, self.common.normalize)?)
    }

    fn channel(&self, path: &Path) -> Res<Channel> {
        Ok(io::parse_channel(&read(path)?, self.common.normalize)?)
    }

    fn joint(&self, path: &Path) -> Res<JointDist> {
        Ok(io::parse_joint(&read(path)?, self.common.normalize)?)
    }

    fn cost(&self, path: &Path) -> Res<CostMatrix> {
        Ok(io::parse_record(&read(path)?)?)
    }

    fn pair(&self, p: &Pair) -> Res<(Dist, Dist)> {
        Ok((self.dist(&p.p)?, self.dist(&p.q)?))
    }

    fn gpair(&self, p: &GuessPair) -> Res<(Dist, Dist)> {
        Ok((self.dist(&p.px)?, self.dist(&p.py)?))
    }

    fn emit_text(&self, text: String) -> Res<()> {
        let text = if text.ends_with('\n') { text } else { text + "\n" };
        match &self.common.out {
            Some(path) => fs::write(path, text).map_err(|e| Failure::unwritable(path, e)),
            None => {
                let _ = std::io::stdout().write_all(text.as_bytes());
                Ok(())
            }
        }
    }

    /// Emits a record: JSON as is, CSV as flattened `key,value` rows.
    fn emit<T: Serialize>(&self, value: &T) -> Res<()> {
        let text = match self.common.format {
            Format::Json => io::to_json(value)?,
            Format::Csv => {
                let v = serde_json::to_value(value).map_err(|e| Failure::usage(&e.to_string()))?;
                let mut t = Table::new(&["key", "value"]);
                flatten("", &v, &mut t);
                t.to_csv()?
            }
        };
        self.emit_text(text)
    }

    /// Emits a table: CSV directly, JSON as an array of row objects.
    fn emit_table<T: Serialize>(&self, table: &Table, records: &T) -> Res<()> {
        match self.common.format {
            Format::Csv => self.emit_text(table.to_csv()?),
            Format::Json => self.emit_text(io::to_json(records)?),
        }
    }
}

fn flatten(prefix: &str, v: &Value, t: &mut Table) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, t)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, t)),
        Value::Number(n) => match n.as_i64() {
            Some(i) => t.push(vec![Cell::Text(prefix.into()), Cell::Int(i)]),
            None => t.push(vec![Cell::Text(prefix.into()), n.as_f64().into()]),
        },
        Value::Null => t.push(vec![Cell::Text(prefix.into()), Cell::Missing]),
        Value::Bool(b) => t.push(vec![Cell::Text(prefix.into()), Cell::Text(b.to_string())]),
        Value::String(s) => t.push(vec![Cell::Text(prefix.into()), Cell::Text(s.clone())]),
    }
}

/// Scalar as JSON, with infinities spelled "inf".
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(io::fmt_num(x))
    }
}

fn parse_base(s: &str) -> Res<Base> {
    match s.trim().to_ascii_lowercase().as_str() {
        "e" | "nats" | "nat" => Ok(Base::Nats),
        "2" | "bits" | "bit" => Ok(Base::Bits),
        other => match other.parse::<f64>() {
            Ok(b) if b > 0.0 && b != 1.0 && b.is_finite() => Ok(Base::from_f64(b)),
            _ => Err(Failure::usage(&format!("invalid --base {s:?}"))),
        },
    }
}

fn coupling_json(c: &Coupling, extra: (&str, f64)) -> Value {
    json!({ "coupling": c, extra.0: num(extra.1) })
}

pub fn run(cli: &Cli) -> Res<()> {
    let ctx = Ctx { common: &cli.common, base: parse_base(&cli.common.base)? };
    match &cli.group {
        Group::Dist(c) => dist(&ctx, c),
        Group::Couple(c) => couple(&ctx, c),
        Group::Guess(c) => guess(&ctx, c),
        Group::Asym(c) => asym(&ctx, c),
        Group::Resolve(c) => resolve(&ctx, c),
        Group::Stealth(c) => stealth(&ctx, c),
        Group::Calc(c) => calc(&ctx, c),
    }
}

fn dist(ctx: &Ctx, cmd: &DistCmd) -> Res<()> {
    let b = ctx.base;
    match cmd {
        DistCmd::Tv(pq) => {
            let (p, q) = ctx.pair(pq)?;
            ctx.emit(&json!({ "tv": num(tv_distance(&p, &q)?) }))
        }
        DistCmd::Kl(pq) => {
            let (p, q) = ctx.pair(pq)?;
            ctx.emit(&json!({ "kl": num(kl_divergence(&p, &q, b)?) }))
        }
        DistCmd::Entropy { p } => ctx.emit(&json!({ "entropy": num(entropy(&ctx.dist(p)?, b)) })),
        DistCmd::Renyi { p, joint, alpha } => {
            if !(*alpha >= 0.0) {
                return Err(Failure::usage("alpha must be non-negative"));
            }
            match (p, joint) {
                (Some(p), _) => ctx.emit(&json!({ "renyi": num(renyi_entropy(&ctx.dist(p)?, *alpha, b)) })),
                (None, Some(j)) => {
                    ctx.emit(&json!({ "arimoto_conditional": num(arimoto_renyi_conditional(&ctx.joint(j)?, *alpha, b)) }))
                }
                (None, None) => Err(Failure::usage("--p or --joint is required")),
            }
        }
        DistCmd::Chernoff(pq) => {
            let (p, q) = ctx.pair(pq)?;
            ctx.emit(&json!({ "chernoff": num(chernoff_information(&p, &q, b)?) }))
        }
        DistCmd::Power { p, n } => ctx.emit(&product_power(&ctx.dist(p)?, *n, DEFAULT_ATOM_CAP)?),
        DistCmd::Types { p, q, k, n } => {
            let ns = io::parse_range(n)?;
            if let (Some(p), Some(q)) = (p, q) {
                let (p, q) = (ctx.dist(p)?, ctx.dist(q)?);
                let mut t = Table::new(&["n", "tv", "overlap"]);
                let mut recs = Vec::new();
                for &n in &ns {
                    let (tv, ov) = (tv_product_exact(&p, &q, n)?, overlap_product_exact(&p, &q, n)?);
                    t.push(vec![n.into(), tv.into(), ov.into()]);
                    recs.push(json!({ "n": n, "tv": tv, "overlap": ov }));
                }
                ctx.emit_table(&t, &recs)
            } else {
                let k = k.ok_or_else(|| Failure::usage("--k is required without --p/--q"))?;
                let mut t = Table::new(&["n", "counts", "class_size"]);
                let mut recs = Vec::new();
                for &n in &ns {
                    for ty in enumerate_types(k, n)? {
                        let counts = ty.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
                        let size = ty.class_size().map(|s| s.to_string()).unwrap_or_default();
                        t.push(vec![n.into(), Cell::Text(counts), Cell::Text(size.clone())]);
                        recs.push(json!({ "n": n, "counts": ty.counts, "class_size": size }));
                    }
                }
                ctx.emit_table(&t, &recs)
            }
        }
    }
}

fn couple(ctx: &Ctx, cmd: &CoupleCmd) -> Res<()> {
    match cmd {
        CoupleCmd::Transport { pair, cost } => {
            let (p, q) = ctx.pair(pair)?;
            let (c, v) = transport_min_cost(&p, &q, &ctx.cost(cost)?)?;
            ctx.emit(&coupling_json(&c, ("value", v)))
        }
        CoupleCmd::Maximal(pair) => {
            let (p, q) = ctx.pair(pair)?;
            let (c, m) = maximal_coupling(&p, &q)?;
            ctx.emit(&coupling_json(&c, ("diagonal_mass", m)))
        }
        CoupleCmd::Excess { pair, cost, threshold } => {
            let (p, q) = ctx.pair(pair)?;
            let (c, v) = min_excess_distance_prob(&p, &q, &ctx.cost(cost)?, *threshold)?;
            ctx.emit(&coupling_json(&c, ("excess_probability", v)))
        }
        CoupleCmd::Minent { pair, mode } => {
            let (p, q) = ctx.pair(pair)?;
            let mode = match mode {
                MinentMode::Exact => MinEntropyMode::Exact,
                MinentMode::Greedy => MinEntropyMode::Greedy,
            };
            ctx.emit(&min_conditional_entropy_coupling(&p, &q, mode, ctx.base)?)
        }
        CoupleCmd::Vertices(pair) => {
            let (p, q) = ctx.pair(pair)?;
            ctx.emit(&coupling_vertices(&p, &q)?)
        }
    }
}

fn guess(ctx: &Ctx, cmd: &GuessCmd) -> Res<()> {
    match cmd {
        GuessCmd::Exact { pair, cap } => {
            let (px, py) = ctx.gpair(pair)?;
            ctx.emit(&best_function_exact_with_cap(&px, &py, cap.unwrap_or(DEFAULT_ATOM_CAP))?)
        }
        GuessCmd::Greedy(pair) => {
            let (px, py) = ctx.gpair(pair)?;
            ctx.emit(&best_function_greedy(&px, &py)?)
        }
        GuessCmd::Check(pair) => {
            let (px, py) = ctx.gpair(pair)?;
            ctx.emit(&deterministic_coupling_check(&px, &py))
        }
        GuessCmd::Scan { pair, n, exact } => {
            let (px, py) = ctx.gpair(pair)?;
            let mode = if *exact { ScanMode::WithExact } else { ScanMode::Greedy };
            let rows = guessing_product_scan(&px, &py, &io::parse_range(n)?, mode, ctx.base)?;
            let mut t = Table::new(&["n", "G_lower", "G_exact", "H_inf_c", "fano_Hc_upper"]);
            for r in &rows {
                t.push(vec![r.n.into(), r.G_lower.into(), r.G_exact.into(), r.H_inf_c.into(), r.fano_Hc_upper.into()]);
            }
            ctx.emit_table(&t, &rows)
        }
        GuessCmd::Cascade { pair, n, alpha } => {
            let (px, py) = ctx.gpair(pair)?;
            ctx.emit(&renyi_cascade_coupling(&px, &py, *n, *alpha, ctx.base)?)
        }
        GuessCmd::Exponents(pair) => {
            let (px, py) = ctx.gpair(pair)?;
            ctx.emit(&guessing_exponent_bounds(&px, &py, ctx.base))
        }
    }
}

fn asym(ctx: &Ctx, cmd: &AsymCmd) -> Res<()> {
    match cmd {
        AsymCmd::Minmaxkl(pair) => {
            let (p, q) = ctx.pair(pair)?;
            ctx.emit(&min_max_kl(&p, &q, ctx.base)?)
        }
        AsymCmd::ExcessExponent { pair, cost, threshold } => {
            let (p, q) = ctx.pair(pair)?;
            let e = excess_exponent_converse(&p, &q, &ctx.cost(cost)?, *threshold, ctx.base)?;
            ctx.emit(&json!({ "exponent": num(e) }))
        }
        AsymCmd::Cramer { joint, cost, level, side } => {
            let j = ctx.joint(joint)?;
            let c = Coupling::new(j.clone(), j.row_marginal(), j.col_marginal())?;
            let side = match side {
                Side::Upper => TiltSide::Upper,
                Side::Lower => TiltSide::Lower,
            };
            ctx.emit(&cramer_tilt_exponent(&c, &ctx.cost(cost)?, *level, side, ctx.base)?)
        }
        AsymCmd::Typecouple { pair, cost, threshold, n } => {
            let (p, q) = ctx.pair(pair)?;
            ctx.emit(&type_coupling_excess(&p, &q, &ctx.cost(cost)?, *threshold, *n)?)
        }
        AsymCmd::Fit { series, transform, reference } => {
            let transform = match transform {
                Transform::Value => SeriesTransform::Value,
                Transform::Complement => SeriesTransform::Complement,
            };
            let s = io::parse_series_csv(&read(series)?, transform)?;
            let fit = exponent_fit(&s)?;
            let mut v = serde_json::to_value(fit).map_err(|e| Failure::usage(&e.to_string()))?;
            if let Some(r) = reference {
                let base_ref = ctx.base.to_nats(*r);
                v["reference_value"] = num(*r);
                v["relative_gap"] = num((fit.slope - base_ref).abs() / base_ref.abs());
            }
            ctx.emit(&v)
        }
    }
}

fn resolve(ctx: &Ctx, cmd: &ResolveCmd) -> Res<()> {
    match cmd {
        ResolveCmd::Feasible { w, target } => ctx.emit(&feasible_input_set(&ctx.channel(w)?, &ctx.dist(target)?)?),
        ResolveCmd::Exact { w, target } => {
            ctx.emit(&exact_resolvability(&ctx.channel(w)?, &ctx.dist(target)?, ctx.base)?)
        }
        ResolveCmd::Oneshot { setup, tau } => {
            let s: OneShotSetup = io::parse_record(&read(setup)?)?;
            let taus = match tau {
                Some(t) => io::parse_reals(t)?,
                None => vec![s.tau],
            };
            let mut t = Table::new(&["tau", "lower_bound_relaxed", "lower_bound_B_tau", "exact_min_tv", "upper_bound"]);
            let mut recs = Vec::new();
            for tau in taus {
                let setup = OneShotSetup::new(s.source.clone(), s.channel.clone(), s.target.clone(), tau)?;
                let b = oneshot_resolvability_bounds(&setup)?;
                t.push(vec![
                    tau.into(),
                    b.lower_bound_relaxed.into(),
                    b.lower_bound_B_tau.into(),
                    b.exact_min_tv.into(),
                    b.upper_bound.into(),
                ]);
                recs.push(b);
            }
            ctx.emit_table(&t, &recs)
        }
        ResolveCmd::Montecarlo { setup, conditional, trials } => {
            let s: OneShotSetup = io::parse_record(&read(setup)?)?;
            let cond = ctx.channel(conditional)?;
            ctx.emit(&monte_carlo_softcover(&s, &cond, *trials, ctx.common.seed)?)
        }
    }
}

fn stealth(ctx: &Ctx, cmd: &StealthCmd) -> Res<()> {
    match cmd {
        StealthCmd::Check(i) => {
            ctx.emit(&pz_redundancy_check(&ctx.channel(&i.wy)?, &ctx.channel(&i.wz)?, &ctx.dist(&i.pz)?)?)
        }
        StealthCmd::Bounds(i) => ctx.emit(&stealth_capacity_bounds(
            &ctx.channel(&i.wy)?,
            &ctx.channel(&i.wz)?,
            &ctx.dist(&i.pz)?,
            ctx.base,
        )?),
        StealthCmd::Gk { joint } => ctx.emit(&gk_common_information(&ctx.joint(joint)?, ctx.base)),
        StealthCmd::Capacity { px, w } => {
            let w = ctx.channel(w)?;
            match px {
                Some(px) => ctx.emit(&capacity_with_input_constraint(&ctx.dist(px)?, &w, ctx.base)?),
                None => ctx.emit(&sufficient_statistic_detect(&w)),
            }
        }
    }
}

fn calc(ctx: &Ctx, cmd: &CalcCmd) -> Res<()> {
    match cmd {
        CalcCmd::SecondOrder { p, eps, n, direction } => {
            let dir = match direction {
                Direction::Source => RateDirection::Source,
                Direction::Resolvability => RateDirection::Resolvability,
            };
            ctx.emit(&json!({ "rate": num(second_order_rate(&ctx.dist(p)?, *eps, *n, dir, ctx.base)?) }))
        }
        CalcCmd::Mu { rho, eps } => ctx.emit(&mu_epsilon(*rho, *eps)?),
        CalcCmd::Maxcorr { joint, conditional } => match (joint, conditional) {
            (Some(j), _) => ctx.emit(&json!({ "maximal_correlation": num(maximal_correlation(&ctx.joint(j)?)) })),
            (None, Some(c)) => {
                let cj: ConditionalJoint = io::parse_record(&read(c)?)?;
                ctx.emit(&json!({ "conditional_maximal_correlation": num(conditional_maximal_correlation(&cj)?) }))
            }
            (None, None) => Err(Failure::usage("--joint or --conditional is required")),
        },
    }
}

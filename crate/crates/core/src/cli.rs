//! Command-line front end: argument model, sweep configuration, CSV/JSON
//! emission and acceptance baselines.

use crate::appendix::{lpq_region, necessary_p_bound, singular_phi, singular_psi};
use crate::blowup::{
    annulus_lq_norm, default_z_grid, gate_scan, limit_profile, rescaled_modulus,
    strichartz_gate, t_grid_to_one, ChirpDatum, Exponent, SelfSimilarFrame, WINDOW_LEVEL,
};
use crate::decay::{
    geometric_grid, large_time_gate, space_decay_fit, time_decay_fit, DiscreteMeasure,
};
use crate::error::{Error, Result};
use crate::norms::{membership_scan, FamilySpec, FamilyTag, NormKind};
use crate::propagator::{
    evolve_oracle_report, evolve_radial, EvalPoint, OracleGrid, RadialProfile,
};
use crate::special;
use crate::verify::{self, CriterionReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const THREADS_ENV: &str = "DISPERSE_LAB_THREADS";

#[derive(Parser, Debug, Clone)]
#[command(name = "disperse-lab", version, about = "Radial free-Schrödinger laboratory")]
pub struct Cli {
    /// Worker threads; overrides DISPERSE_LAB_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Evaluate ψ(x, t) on a (t, |x|) grid.
    Propagate(PropagateArgs),
    /// Weighted norms of a profile family.
    Norm(NormArgs),
    /// Envelope decay fits in time or space.
    Decay(DecayArgs),
    /// Chirped-datum blow-up: annulus norms and rescaled profiles.
    Blowup(BlowupArgs),
    /// Strichartz admissibility verdicts.
    Gate(GateArgs),
    /// The singular-density counterexample.
    Appendix(AppendixArgs),
    /// Special-function tables.
    Special {
        #[command(subcommand)]
        command: SpecialCommand,
    },
    /// Run acceptance criteria, optionally against a baseline.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct PropagateArgs {
    #[arg(long)]
    pub n: usize,
    /// family:params[@carrier], e.g. bump:1,2 or power:3.5@2
    #[arg(long)]
    pub profile: String,
    #[arg(long)]
    pub t: String,
    #[arg(long)]
    pub x: String,
    /// Use the finite-difference oracle instead of the representation formula.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct NormArgs {
    /// power | osc_power | bump | herglotz_envelope, optionally :value and @carrier
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub n: usize,
    /// X, X1, X2 or Y<m>
    #[arg(long)]
    pub which: String,
    /// name=lo:hi:step
    #[arg(long)]
    pub scan: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct DecayArgs {
    #[arg(long, value_enum)]
    pub mode: Axis,
    #[arg(long)]
    pub n: usize,
    #[arg(long, required_unless_present = "measure")]
    pub profile: Option<String>,
    /// JSON array of {omega, weight_re, weight_im, family, params}.
    #[arg(long, conflicts_with = "profile")]
    pub measure: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    /// Fixed |x| (time mode) or t (space mode) probes.
    #[arg(long)]
    pub probes: Option<String>,
    /// Fit grid; defaults to four decades from the large-time gate or three from 1.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Time,
    Space,
}

#[derive(Args, Debug, Clone)]
pub struct BlowupArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub q: f64,
    /// lo:hi:geometric[:points] with 1 − t geometric, or an explicit list.
    #[arg(long, default_value = "0.9:0.999:geometric")]
    pub tgrid: String,
    /// Self-similar abscissae z at which the rescaled modulus is sampled.
    #[arg(long, default_value = "0.25,0.5,1,2")]
    pub z: String,
}

#[derive(Args, Debug, Clone)]
pub struct GateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: String,
    #[arg(long, requires = "q")]
    pub p: Option<String>,
    #[arg(long, requires = "p")]
    pub q: Option<String>,
    /// Number of q samples in the scaling scan.
    #[arg(long, default_value_t = 25)]
    pub samples: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AppendixMode {
    Phi,
    Psi,
    Region,
    Pbound,
}

#[derive(Args, Debug, Clone)]
pub struct AppendixArgs {
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub mode: AppendixMode,
    #[arg(long, default_value = "1:1000:geometric:16")]
    pub x: String,
    #[arg(long, default_value = "0,1,10,100")]
    pub t: String,
    #[arg(long, default_value = "1.5,2,4,8,inf")]
    pub p: String,
    #[arg(long, default_value = "1.5,2,4,8,inf")]
    pub q: String,
    #[arg(long, default_value = "1.5,2,3,4,inf")]
    pub r: String,
}

#[derive(Subcommand, Debug, Clone)]
pub enum SpecialCommand {
    /// Rows z, A_n, Re B_n, Im B_n, splitting residual.
    Dump {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "2:20:1")]
        z: String,
    },
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// "all" or a comma-separated list of criterion ids or names.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// Write the measured values into the baseline, bumping its version.
    #[arg(long, requires = "baseline")]
    pub record: bool,
    /// Tolerance override prefix=value, applied to every check id with that prefix.
    #[arg(long = "tol")]
    pub tolerances: Vec<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A validated invocation.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub command: &'static str,
    pub grids: BTreeMap<&'static str, Vec<f64>>,
    pub output: Option<PathBuf>,
    pub tolerances: BTreeMap<String, f64>,
    pub threads: Option<usize>,
    pub baseline: Option<PathBuf>,
    pub args: Command,
}

/// Text produced by a command and whether its assertions held.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub passed: bool,
}

/// 0 pass, 1 assertion or numerical failure, 2 usage error.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Numerical(_) | Error::DomainTooSmall(_) | Error::Io(_) => 1,
        _ => 2,
    }
}

/// Comma list ("1,2,5"), linear range ("lo:hi:step") or geometric range
/// ("lo:hi:geometric[:points]").
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let number = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Usage(format!("not a number: '{s}'")))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [_] => spec.split(',').map(number).collect(),
        [lo, hi, "geometric", rest @ ..] => {
            let points = match rest {
                [] => 16,
                [p] => p
                    .parse()
                    .map_err(|_| Error::Usage(format!("bad point count '{p}'")))?,
                _ => return Err(Error::Usage(format!("bad grid '{spec}'"))),
            };
            let (lo, hi) = (number(lo)?, number(hi)?);
            if !(lo > 0.0 && hi > lo) || points < 2 {
                return Err(Error::Usage(format!("bad geometric grid '{spec}'")));
            }
            Ok(geometric_grid(lo, hi, points))
        }
        [lo, hi, step] => {
            let (lo, hi, step) = (number(lo)?, number(hi)?, number(step)?);
            if !(step > 0.0) || hi < lo {
                return Err(Error::Usage(format!("bad range '{spec}'")));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| lo + step * i as f64).collect())
        }
        _ => Err(Error::Usage(format!("bad grid '{spec}'"))),
    }
}

fn parse_exponents(spec: &str) -> Result<Vec<Exponent>> {
    if spec.trim().is_empty() {
        return Ok(Vec::new());
    }
    spec.split(',').map(str::parse).collect()
}

/// Builds a profile from a family name and its numeric parameters.
pub fn build_profile(family: &str, params: &[f64], n: usize) -> Result<RadialProfile> {
    let need = |k: usize| -> Result<()> {
        if params.len() == k {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "profile '{family}' takes {k} parameter(s), got {}",
                params.len()
            )))
        }
    };
    match family {
        "bump" => {
            need(2)?;
            RadialProfile::bump(params[0], params[1])
        }
        "gaussian" => {
            need(1)?;
            RadialProfile::gaussian(params[0])
        }
        "power" => {
            need(1)?;
            RadialProfile::power(params[0])
        }
        "osc_power" => {
            need(1)?;
            RadialProfile::osc_power(params[0])
        }
        "herglotz" => {
            need(1)?;
            RadialProfile::herglotz(n, params[0])
        }
        "herglotz_envelope" => {
            if params.is_empty() || params.len() > 3 {
                return Err(Error::Usage(
                    "herglotz_envelope takes omega[,k[,conjugate]]".into(),
                ));
            }
            let k = params.get(1).map_or(6, |&k| k as usize);
            let conj = params.get(2).is_some_and(|&c| c != 0.0);
            RadialProfile::herglotz_envelope(n, params[0], k, conj)
        }
        "chirp" => {
            need(1)?;
            RadialProfile::chirp(params[0])
        }
        "pure_power" => {
            need(1)?;
            RadialProfile::pure_power(params[0])
        }
        other => Err(Error::Usage(format!("unknown profile family '{other}'"))),
    }
}

/// "family:p1,p2[@carrier]".
pub fn parse_profile(spec: &str, n: usize) -> Result<RadialProfile> {
    let (body, carrier) = match spec.split_once('@') {
        Some((b, c)) => (b, Some(parse_grid(c)?)),
        None => (spec, None),
    };
    let (family, params) = match body.split_once(':') {
        Some((f, p)) => (f.trim(), parse_grid(p)?),
        None => (body.trim(), Vec::new()),
    };
    let profile = build_profile(family, &params, n)?;
    Ok(match carrier.as_deref() {
        None => profile,
        Some([w]) => profile.with_carrier(*w),
        Some(_) => return Err(Error::Usage(format!("bad carrier in '{spec}'"))),
    })
}

fn parse_family(spec: &str) -> Result<(FamilySpec, Option<f64>)> {
    let (body, carrier) = match spec.split_once('@') {
        Some((b, c)) => (b, Some(parse_grid(c)?)),
        None => (spec, None),
    };
    let (tag, value) = match body.split_once(':') {
        Some((t, v)) => (t.trim(), Some(parse_grid(v)?)),
        None => (body.trim(), None),
    };
    let tag = match tag {
        "power" => FamilyTag::Power,
        "osc_power" => FamilyTag::OscillatingPower,
        "bump" => FamilyTag::Bump,
        "herglotz_envelope" => FamilyTag::HerglotzEnvelope,
        other => return Err(Error::Usage(format!("unknown family '{other}'"))),
    };
    let mut fam = FamilySpec::new(tag);
    match carrier.as_deref() {
        None => {}
        Some([w]) => fam.omega = *w,
        Some(_) => return Err(Error::Usage(format!("bad carrier in '{spec}'"))),
    }
    let value = match value.as_deref() {
        None => None,
        Some([v]) => Some(*v),
        Some(_) => return Err(Error::Usage(format!("bad family value in '{spec}'"))),
    };
    Ok((fam, value))
}

impl SweepConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let mut grids: BTreeMap<&'static str, Vec<f64>> = BTreeMap::new();
        let mut tolerances = BTreeMap::new();
        let mut baseline = None;
        let command = match &cli.command {
            Command::Propagate(a) => {
                grids.insert("t", parse_grid(&a.t)?);
                grids.insert("x", parse_grid(&a.x)?);
                "propagate"
            }
            Command::Norm(a) => {
                let params = match &a.scan {
                    Some(s) => {
                        let (_, range) = s.split_once('=').ok_or_else(|| {
                            Error::Usage(format!("scan must be name=lo:hi:step, got '{s}'"))
                        })?;
                        parse_grid(range)?
                    }
                    None => parse_family(&a.family)?.1.into_iter().collect(),
                };
                grids.insert("param", params);
                "norm"
            }
            Command::Decay(a) => {
                if let Some(p) = &a.probes {
                    grids.insert("probes", parse_grid(p)?);
                }
                if let Some(g) = &a.grid {
                    grids.insert("grid", parse_grid(g)?);
                }
                "decay"
            }
            Command::Blowup(a) => {
                grids.insert("z", parse_grid(&a.z)?);
                grids.insert("t", blowup_times(&a.tgrid)?);
                "blowup"
            }
            Command::Gate(_) => "gate",
            Command::Appendix(a) => {
                match a.mode {
                    AppendixMode::Phi => {
                        grids.insert("x", parse_grid(&a.x)?);
                    }
                    AppendixMode::Psi => {
                        grids.insert("x", parse_grid(&a.x)?);
                        grids.insert("t", parse_grid(&a.t)?);
                    }
                    AppendixMode::Region => {
                        grids.insert("p", exponent_grid(&a.p)?);
                        grids.insert("q", exponent_grid(&a.q)?);
                    }
                    AppendixMode::Pbound => {
                        grids.insert("r", exponent_grid(&a.r)?);
                    }
                }
                "appendix"
            }
            Command::Special {
                command: SpecialCommand::Dump { z, .. },
            } => {
                grids.insert("z", parse_grid(z)?);
                "special"
            }
            Command::Verify(a) => {
                for t in &a.tolerances {
                    let (id, v) = t.split_once('=').ok_or_else(|| {
                        Error::Usage(format!("tolerance override must be id=value, got '{t}'"))
                    })?;
                    let v: f64 = v
                        .parse()
                        .map_err(|_| Error::Usage(format!("bad tolerance '{v}'")))?;
                    tolerances.insert(id.to_string(), v);
                }
                baseline = a.baseline.clone();
                "verify"
            }
        };
        let config = SweepConfig {
            command,
            grids,
            output: cli.out,
            tolerances,
            threads: cli.threads,
            baseline,
            args: cli.command,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        for (name, g) in &self.grids {
            if g.is_empty() {
                return Err(Error::Usage(format!("grid '{name}' is empty")));
            }
            if g.iter().any(|v| v.is_nan()) {
                return Err(Error::Usage(format!("grid '{name}' contains NaN")));
            }
        }
        for (id, &tol) in &self.tolerances {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::Usage(format!("tolerance for '{id}' must be positive")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Usage("thread count must be positive".into()));
        }
        Ok(())
    }

    fn grid(&self, name: &str) -> &[f64] {
        self.grids.get(name).map_or(&[], Vec::as_slice)
    }
}

fn exponent_grid(spec: &str) -> Result<Vec<f64>> {
    Ok(parse_exponents(spec)?.into_iter().map(Exponent::value).collect())
}

fn to_exponent(v: f64) -> Result<Exponent> {
    if v.is_infinite() {
        Ok(Exponent::Infinite)
    } else {
        Exponent::new(v)
    }
}

fn blowup_times(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [lo, hi, "geometric", rest @ ..] => {
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Usage(format!("not a number: '{s}'")))
            };
            let points = match rest {
                [] => 8,
                [p] => num(p)? as usize,
                _ => return Err(Error::Usage(format!("bad time grid '{spec}'"))),
            };
            t_grid_to_one(num(lo)?, num(hi)?, points)
                .map_err(|e| Error::Usage(e.to_string()))
        }
        _ => parse_grid(spec),
    }
}

/// Thread count from the flag, else from DISPERSE_LAB_THREADS.
pub fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

/// Shortest scientific form carrying 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

/// CSV with a header row and RFC 4180 quoting.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// JSON with keys in sorted order and floats at 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize, out: &mut String| {
        for _ in 0..d {
            out.push_str("  ");
        }
    };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => write!(out, "{i}").unwrap(),
            (_, Some(u), _) => write!(out, "{u}").unwrap(),
            (_, _, Some(f)) => out.push_str(&fmt_f64(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(depth + 1, out);
                write_value(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(depth + 1, out);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(item, depth + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push('}');
        }
    }
}

/// Writes `body` to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn complex_cells(v: Complex64) -> [String; 3] {
    [fmt_f64(v.re), fmt_f64(v.im), fmt_f64(v.norm())]
}

/// Dispatches a validated configuration.
pub fn run(config: &SweepConfig) -> Result<Outcome> {
    let body = match &config.args {
        Command::Propagate(a) => propagate(config, a)?,
        Command::Norm(a) => norm(config, a)?,
        Command::Decay(a) => decay(config, a)?,
        Command::Blowup(a) => blowup(config, a)?,
        Command::Gate(a) => gate(a)?,
        Command::Appendix(a) => appendix(config, a)?,
        Command::Special {
            command: SpecialCommand::Dump { n, k, .. },
        } => special_dump(config, *n, *k)?,
        Command::Verify(a) => return verify_cmd(config, a),
    };
    Ok(Outcome { body, passed: true })
}

#[derive(Serialize)]
struct PropagateRow {
    n: usize,
    t: f64,
    x_abs: f64,
    re: f64,
    im: f64,
    abs: f64,
    err_est: f64,
}

fn propagate(config: &SweepConfig, a: &PropagateArgs) -> Result<String> {
    let profile = parse_profile(&a.profile, a.n)?;
    let pts: Vec<(f64, f64)> = config
        .grid("t")
        .iter()
        .flat_map(|&t| config.grid("x").iter().map(move |&x| (t, x)))
        .collect();
    let rows = pts
        .par_iter()
        .map(|&(t, x)| {
            let pt = EvalPoint::new(a.n, x, t)?;
            let amp = if a.oracle {
                evolve_oracle_report(&profile, pt, OracleGrid::for_profile(&profile, t)?)?.amplitude
            } else {
                evolve_radial(&profile, pt)?
            };
            Ok(PropagateRow {
                n: a.n,
                t,
                x_abs: x,
                re: amp.value.re,
                im: amp.value.im,
                abs: amp.value.norm(),
                err_est: amp.err_est,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    match a.format {
        Format::Json => to_json(&rows),
        Format::Csv => to_csv(
            &["n", "t", "x_abs", "re", "im", "abs", "err_est"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        fmt_f64(r.t),
                        fmt_f64(r.x_abs),
                        fmt_f64(r.re),
                        fmt_f64(r.im),
                        fmt_f64(r.abs),
                        fmt_f64(r.err_est),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    }
}

fn norm(config: &SweepConfig, a: &NormArgs) -> Result<String> {
    let (fam, _) = parse_family(&a.family)?;
    let kind: NormKind = a.which.parse()?;
    let scan = membership_scan(&fam, a.n, kind, config.grid("param"))?;
    let rows: Vec<Vec<String>> = scan
        .points
        .iter()
        .map(|p| vec![fmt_f64(p.param), p.value.to_string()])
        .collect();
    to_csv(&["param", "value"], &rows)
}

#[derive(Deserialize)]
struct MeasureAtom {
    omega: f64,
    weight_re: f64,
    weight_im: f64,
    family: String,
    params: Vec<f64>,
}

fn load_measure(path: &Path, n: usize) -> Result<RadialProfile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let atoms: Vec<MeasureAtom> = serde_json::from_str(&text)
        .map_err(|e| Error::Usage(format!("measure file {}: {e}", path.display())))?;
    if atoms.is_empty() {
        return Err(Error::Usage("measure file has no atoms".into()));
    }
    let mut m = DiscreteMeasure::default();
    for a in atoms {
        let p = build_profile(&a.family, &a.params, n)?.with_carrier(a.omega);
        m.push(Complex64::new(a.weight_re, a.weight_im), p);
    }
    m.datum()
}

fn decay(config: &SweepConfig, a: &DecayArgs) -> Result<String> {
    let profile = match (&a.profile, &a.measure) {
        (Some(p), _) => parse_profile(p, a.n)?,
        (None, Some(path)) => load_measure(path, a.n)?,
        (None, None) => return Err(Error::Usage("need --profile or --measure".into())),
    };
    let fit = match a.mode {
        Axis::Time => {
            let probes = config
                .grids
                .get("probes")
                .cloned()
                .unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
            let grid = match config.grids.get("grid") {
                Some(g) => g.clone(),
                None => {
                    let x_max = probes.iter().fold(0.0f64, |m, &x| m.max(x));
                    let gate = large_time_gate(&profile, x_max).unwrap_or(1.0).max(1.0);
                    geometric_grid(gate, gate * 1e4, 13)
                }
            };
            time_decay_fit(&profile, a.n, a.m, &probes, &grid)?
        }
        Axis::Space => {
            let probes = config
                .grids
                .get("probes")
                .cloned()
                .unwrap_or_else(|| vec![1.0, 10.0, 100.0]);
            let grid = config
                .grids
                .get("grid")
                .cloned()
                .unwrap_or_else(|| geometric_grid(1.0, 1e3, 31));
            space_decay_fit(&profile, a.n, &probes, &grid)?
        }
    };
    to_json(&fit)
}

fn blowup(config: &SweepConfig, a: &BlowupArgs) -> Result<String> {
    let datum = ChirpDatum::new(a.n, a.sigma)?;
    let window = limit_profile(&datum, &default_z_grid())?.window(WINDOW_LEVEL);
    let zs = config.grid("z").to_vec();
    let rows = config
        .grid("t")
        .par_iter()
        .map(|&t| {
            let frame = SelfSimilarFrame::new(t, zs.clone())?;
            let lq = annulus_lq_norm(&datum, t, window, a.q)?;
            let w = rescaled_modulus(&datum, &frame)?;
            let mut row = vec![fmt_f64(t), fmt_f64(frame.k_t), fmt_f64(lq)];
            row.extend(w.into_iter().map(fmt_f64));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut header: Vec<String> = vec!["t".into(), "k_t".into(), "annulus_lq".into()];
    header.extend(zs.iter().map(|z| format!("w_z{z}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    to_csv(&header, &rows)
}

fn gate(a: &GateArgs) -> Result<String> {
    let r: Exponent = a.r.parse()?;
    match (&a.p, &a.q) {
        (Some(p), Some(q)) => to_json(&strichartz_gate(a.n, p.parse()?, q.parse()?, r)),
        _ => {
            if a.samples == 0 {
                return Err(Error::Usage("gate scan needs at least one sample".into()));
            }
            to_json(&gate_scan(a.n, r, a.samples))
        }
    }
}

#[derive(Serialize)]
struct PBoundRow {
    r: Exponent,
    p_bound: Option<Exponent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn appendix(config: &SweepConfig, a: &AppendixArgs) -> Result<String> {
    match a.mode {
        AppendixMode::Phi => {
            let rows = config
                .grid("x")
                .par_iter()
                .map(|&x| {
                    let v = singular_phi(a.delta, a.n, x)?;
                    let [re, im, abs] = complex_cells(v);
                    Ok(vec![fmt_f64(x), re, im, abs])
                })
                .collect::<Result<Vec<_>>>()?;
            to_csv(&["x_abs", "re", "im", "abs"], &rows)
        }
        AppendixMode::Psi => {
            let pts: Vec<(f64, f64)> = config
                .grid("t")
                .iter()
                .flat_map(|&t| config.grid("x").iter().map(move |&x| (t, x)))
                .collect();
            let rows = pts
                .par_iter()
                .map(|&(t, x)| {
                    let v = singular_psi(a.delta, a.n, x, t)?;
                    let [re, im, abs] = complex_cells(v);
                    Ok(vec![fmt_f64(t), fmt_f64(x), re, im, abs])
                })
                .collect::<Result<Vec<_>>>()?;
            to_csv(&["t", "x_abs", "re", "im", "abs"], &rows)
        }
        AppendixMode::Region => {
            let mut out = Vec::new();
            for &p in config.grid("p") {
                for &q in config.grid("q") {
                    out.push(lpq_region(a.delta, a.n, to_exponent(p)?, to_exponent(q)?)?);
                }
            }
            to_json(&out)
        }
        AppendixMode::Pbound => {
            let rows = config
                .grid("r")
                .iter()
                .map(|&r| {
                    let r = to_exponent(r)?;
                    Ok(match necessary_p_bound(r, a.n) {
                        Ok(p) => PBoundRow {
                            r,
                            p_bound: Some(p),
                            note: None,
                        },
                        Err(Error::OutOfRange(msg)) => PBoundRow {
                            r,
                            p_bound: None,
                            note: Some(msg),
                        },
                        Err(e) => return Err(e),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            to_json(&rows)
        }
    }
}

fn special_dump(config: &SweepConfig, n: usize, k: usize) -> Result<String> {
    let rows: Vec<Vec<String>> = special::dump(n, k, config.grid("z"))?
        .into_iter()
        .map(|r| {
            vec![
                fmt_f64(r.z),
                fmt_f64(r.a),
                fmt_f64(r.b_re),
                fmt_f64(r.b_im),
                fmt_f64(r.residual),
            ]
        })
        .collect();
    to_csv(&["z", "a", "b_re", "b_im", "residual"], &rows)
}

/// Recorded value of one acceptance check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineEntry {
    pub value: f64,
    pub tolerance: f64,
    /// Seconds since the Unix epoch at recording time.
    pub recorded: u64,
}

/// Versioned map from check id to its recorded value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Baseline {
    pub version: u64,
    pub entries: BTreeMap<String, BaselineEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineMismatch {
    pub id: String,
    pub value: f64,
    pub recorded: Option<f64>,
    pub tolerance: Option<f64>,
}

impl Baseline {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Usage(format!("baseline {}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_output(Some(path), &to_json(self)?)
    }

    /// Checks with no entry, or whose value moved beyond the recorded tolerance.
    pub fn compare(&self, reports: &[CriterionReport]) -> Vec<BaselineMismatch> {
        let mut out = Vec::new();
        for c in reports.iter().flat_map(|r| &r.checks) {
            match self.entries.get(&c.id) {
                Some(e) if (c.value - e.value).abs() <= e.tolerance => {}
                entry => out.push(BaselineMismatch {
                    id: c.id.clone(),
                    value: c.value,
                    recorded: entry.map(|e| e.value),
                    tolerance: entry.map(|e| e.tolerance),
                }),
            }
        }
        out
    }

    /// Stores every check of `reports` and bumps the version.
    pub fn record(&mut self, reports: &[CriterionReport], now: u64) {
        for c in reports.iter().flat_map(|r| &r.checks) {
            let tolerance = match c.comparison {
                verify::Comparison::Near => c.tol,
                verify::Comparison::AtMost => c.tol.max((c.target + c.tol).abs()),
            };
            self.entries.insert(
                c.id.clone(),
                BaselineEntry {
                    value: c.value,
                    tolerance,
                    recorded: now,
                },
            );
        }
        self.version += 1;
    }
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    passed: bool,
    criteria: &'a [CriterionReport],
    baseline_version: Option<u64>,
    baseline_mismatches: Vec<BaselineMismatch>,
}

fn verify_cmd(config: &SweepConfig, a: &VerifyArgs) -> Result<Outcome> {
    let ids = verify::parse_suite(&a.suite)?;
    let mut reports = ids
        .into_iter()
        .map(verify::run)
        .collect::<Result<Vec<_>>>()?;
    for r in &mut reports {
        for c in &mut r.checks {
            if let Some((_, &tol)) = config
                .tolerances
                .iter()
                .filter(|(prefix, _)| c.id.starts_with(prefix.as_str()))
                .max_by_key(|(prefix, _)| prefix.len())
            {
                c.set_tol(tol);
            }
        }
        r.passed = r.checks.iter().all(|c| c.passed);
    }
    let suite_passed = reports.iter().all(|r| r.passed);
    let mut mismatches = Vec::new();
    let mut version = None;
    if let Some(path) = &config.baseline {
        if a.record {
            if !suite_passed {
                return Err(Error::Numerical(
                    "refusing to record a baseline from a failing suite".into(),
                ));
            }
            let mut b = if path.exists() {
                Baseline::load(path)?
            } else {
                Baseline::default()
            };
            let now = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs());
            b.record(&reports, now);
            b.save(path)?;
            version = Some(b.version);
        } else {
            let b = Baseline::load(path)?;
            mismatches = b.compare(&reports);
            version = Some(b.version);
        }
    }
    let passed = suite_passed && mismatches.is_empty();
    let body = to_json(&VerifyOutput {
        passed,
        criteria: &reports,
        baseline_version: version,
        baseline_mismatches: mismatches,
    })?;
    Ok(Outcome { body, passed })
}

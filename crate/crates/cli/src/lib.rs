//! Batch front end: argument grammar, dispatch, report persistence and replay.

use std::ffi::OsString;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use radolab_core::bohr::{self, BohrSpec, Theta};
use radolab_core::congruence::count_roots_mod;
use radolab_core::counting::{self, Colouring, ColourGenerator, DenseGenerator, DiagonalConstraint, SolutionFilter};
use radolab_core::expsums::{self, ArcDissection};
use radolab_core::intersective::{aux_data, intersectivity_verdict};
use radolab_core::regularity::{decide, DecideOptions, MSearch, Mode, RadoEquation};
use radolab_core::wtrick;
use radolab_core::IntPoly;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] radolab_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("replay mismatch: {0}")]
    Replay(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "radolab", version, about = "Polynomial Rado equations: intersectivity, regularity, exponential sums and counts")]
pub struct Cli {
    /// Directory receiving append-only `<config-hash>.jsonl` reports.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Partition or density regularity verdict.
    Decide(DecideArgs),
    /// Intersectivity verdict with per-prime certificates.
    Intersective(IntersectiveArgs),
    /// lambda(D), r_D and the auxiliary polynomial P_D.
    Aux(AuxArgs),
    /// Number of roots modulo m.
    Roots(RootsArgs),
    /// Weyl sums and complete exponential sums.
    Expsum(ExpsumArgs),
    /// Moment counts and their Parseval integrals.
    Moments(MomentsArgs),
    /// W-trick regime, residue choice, identities and Fourier decay.
    Wtrick(WtrickArgs),
    /// Polynomial Bohr sets, density sweeps and growth checks.
    Bohr(BohrArgs),
    /// Exact solution counts over [N], a set, or each colour class.
    Count(CountArgs),
    /// Supersaturation, diagonal and sharpness experiments.
    Experiment(ExperimentArgs),
    /// Re-run every report in a JSONL file and compare results.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum ModeArg {
    Pr,
    Dr,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecideArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub coeffs: Vec<i64>,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Pr)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1000)]
    pub bound: u64,
    /// Replace the default threshold T(d) by a certified value.
    #[arg(long)]
    pub t_override: Option<u32>,
    /// Also list shifts m = P(x), |x| <= bound, with P - m certified intersective.
    #[arg(long)]
    pub m_search: Option<i64>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectiveArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long, default_value_t = 1000)]
    pub bound: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long = "D")]
    pub d: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long = "mod")]
    pub modulus: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpsumArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    /// Frequency for the Weyl sum, as `a/q` (exact) or a decimal.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long = "N")]
    pub n: Option<u64>,
    /// Complete sum modulo q (with --a).
    #[arg(long)]
    pub complete: Option<u64>,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub a: i64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long = "T")]
    pub t: u32,
    #[arg(long = "X")]
    pub x: u64,
    /// Also evaluate the grid integral of |S|^{2T}.
    #[arg(long)]
    pub parseval: bool,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WtrickArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long)]
    pub w: u64,
    #[arg(long, default_value_t = 2)]
    pub e: u32,
    #[arg(long = "X")]
    pub x: String,
    /// Largest modulus for the ramified complete sums.
    #[arg(long, default_value_t = 60)]
    pub qmax: u64,
    /// Compute the grid sup of |nu^ - 1_[N]^| / N (needs N <= 5e7).
    #[arg(long)]
    pub decay: bool,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BohrArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    /// Frequencies: `a/q`, decimals, `sqrtK` or `golden`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub theta: Vec<String>,
    #[arg(long)]
    pub rho: String,
    #[arg(long = "Z")]
    pub z: u64,
    /// Write the membership bitmask ('0'/'1' per element of [Z]) here.
    #[arg(long)]
    pub bitmask: Option<PathBuf>,
    /// Sweep sampled frequencies of dimension K instead of using --theta.
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Growth check: compare P_D(eta M) with (4 eta)^d P_D(M); needs --D and --M.
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long = "D")]
    pub d: Option<u64>,
    #[arg(long = "M")]
    pub m: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum FilterArg {
    All,
    Nonconstant,
    Distinct,
}

impl From<FilterArg> for SolutionFilter {
    fn from(f: FilterArg) -> Self {
        match f {
            FilterArg::All => SolutionFilter::All,
            FilterArg::Nonconstant => SolutionFilter::NonConstant,
            FilterArg::Distinct => SolutionFilter::Distinct,
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub coeffs: Vec<i64>,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub b: String,
    #[arg(long = "N")]
    pub n: Option<u64>,
    #[arg(long, value_enum, default_value_t = FilterArg::All)]
    pub filter: FilterArg,
    /// Whitespace-separated elements of the set.
    #[arg(long)]
    pub set_file: Option<PathBuf>,
    /// CSV with columns `n,class`; counts are reported per class.
    #[arg(long)]
    pub colouring_file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum ExperimentKind {
    Supersaturation,
    Diagonal,
    Sharpness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum GeneratorArg {
    Random,
    Congruence,
    Interval,
    Subset,
    Progression,
    Evens,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub kind: ExperimentKind,
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Vec<i64>,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub b: String,
    /// Scales; the diagonal experiment accepts several.
    #[arg(long = "N", value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    #[arg(long, value_enum, default_value_t = GeneratorArg::Random)]
    pub generator: GeneratorArg,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 10)]
    pub trials: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Diagonal constraint `x_j = c`, given as `j,c`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub fixed: Vec<i64>,
    /// Diagonal constraint `x_j = x_k`, given as `j,k`.
    #[arg(long, value_delimiter = ',')]
    pub equal: Vec<usize>,
    /// Sharpness experiment: coefficients of L1 and L2.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub l1: Vec<i64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub l2: Vec<i64>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    #[serde(flatten)]
    pub command: Command,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config_hash: String,
    pub config: Config,
    pub result: Value,
}

pub fn config_hash(config: &Config) -> CliResult<String> {
    let text = serde_json::to_string(config)?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

fn poly(s: &str) -> CliResult<IntPoly> {
    Ok(IntPoly::parse(s)?)
}

fn bigint(s: &str) -> CliResult<BigInt> {
    s.trim().parse().map_err(|_| CliError::Invalid(format!("bad integer: {s}")))
}

fn big(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

fn to_value<T: Serialize>(t: &T) -> CliResult<Value> {
    Ok(serde_json::to_value(t)?)
}

fn equation(p: &str, coeffs: &[i64], b: &str) -> CliResult<RadoEquation> {
    Ok(RadoEquation::new(coeffs.to_vec(), bigint(b)?, poly(p)?)?)
}

fn run_decide(a: &DecideArgs) -> CliResult<Value> {
    let eq = equation(&a.poly, &a.coeffs, &a.b)?;
    let opts = DecideOptions {
        intersectivity_bound: a.bound,
        t_override: a.t_override,
        m_search: match a.m_search {
            Some(bound) => MSearch::Exhaustive { bound },
            None => MSearch::Default,
        },
    };
    let mode = match a.mode {
        ModeArg::Pr => Mode::Partition,
        ModeArg::Dr => Mode::Density,
    };
    to_value(&decide(&eq, mode, &opts)?)
}

fn run_aux(a: &AuxArgs) -> CliResult<Value> {
    let aux = aux_data(&poly(&a.poly)?, a.d)?;
    Ok(json!({
        "D": a.d,
        "lambda": big(&aux.lambda),
        "r": big(&aux.r),
        "PD": aux.pd.to_string(),
        "PD_pretty": aux.pd.pretty(),
        "roots": to_value(&aux.roots)?,
    }))
}

fn complex(z: num_complex::Complex64) -> Value {
    json!({ "re": z.re, "im": z.im, "abs": z.norm() })
}

fn run_expsum(a: &ExpsumArgs) -> CliResult<Value> {
    let f = poly(&a.poly)?;
    let mut out = serde_json::Map::new();
    if let Some(q) = a.complete {
        let s = expsums::complete_sum(&f, q, &BigInt::from(a.a))?;
        out.insert("complete".into(), json!({ "q": q, "a": a.a, "sum": complex(s), "normalised": s.norm() / q as f64 }));
    }
    if let Some(alpha) = &a.alpha {
        let n = a.n.ok_or_else(|| CliError::Invalid("--alpha needs --N".into()))?;
        let s = match alpha.split_once('/') {
            Some((num, den)) => {
                let q: u64 = den.trim().parse().map_err(|_| CliError::Invalid(format!("bad alpha: {alpha}")))?;
                expsums::weyl_sum_rational(&f, &bigint(num)?, q, n)?
            }
            None => {
                let x: f64 = alpha.parse().map_err(|_| CliError::Invalid(format!("bad alpha: {alpha}")))?;
                expsums::weyl_sum(&f, x, n)?
            }
        };
        out.insert("weyl".into(), json!({ "alpha": alpha, "N": n, "sum": complex(s), "normalised": s.norm() / n as f64 }));
    }
    if out.is_empty() {
        return Err(CliError::Invalid("give --alpha with --N, or --complete".into()));
    }
    Ok(Value::Object(out))
}

fn run_moments(a: &MomentsArgs) -> CliResult<Value> {
    let f = poly(&a.poly)?;
    let count = expsums::moment_count(&f, a.t, a.x)?;
    let mut out = json!({ "T": a.t, "X": a.x, "count": count.to_string() });
    if a.parseval {
        let g = expsums::parseval_grid_size(&f, a.t, a.x)?;
        let integral = expsums::parseval_integral(&f, a.t, a.x, g)?;
        out["grid"] = json!(g);
        out["integral"] = json!(integral);
        out["relative_error"] = json!((integral - count as f64).abs() / count as f64);
    }
    Ok(out)
}

/// Largest N for which `wtrick --decay` runs.
pub const DECAY_N_LIMIT: u64 = 50_000_000;

fn run_wtrick(a: &WtrickArgs) -> CliResult<Value> {
    let f = poly(&a.poly)?;
    let r = wtrick::build_regime(&f, a.w, a.e, &bigint(&a.x)?)?;
    let mut out = json!({
        "W": big(&r.big_w), "V": big(&r.v), "M": big(&r.m), "D": big(&r.d),
        "lambda": big(&r.lambda), "r": big(&r.r), "PD": r.pd.to_string(),
        "X_requested": big(&r.x_requested), "X": big(&r.x), "Z": big(&r.z), "N": big(&r.n),
    });
    let Some(b) = wtrick::residue_with_full_gcd(&r)? else {
        out["residue"] = Value::Null;
        return Ok(out);
    };
    let kappa = wtrick::kappa_for(&r, &BigInt::from(b))?
        .and_then(|k| k.to_u64())
        .ok_or_else(|| CliError::Invalid("no admissible kappa".into()))?;
    out["residue"] = json!({ "b": b, "kappa": kappa });
    out["tricked_poly"] = json!(wtrick::tricked_poly(&r, b, kappa)?.to_string());
    out["equidistributed"] = json!(wtrick::equidistribution_check(&r, b, kappa)?);
    out["ramified_max"] = json!(wtrick::ramified_sum_max(&r, b, kappa, a.qmax)?);
    if a.decay {
        let n = r.n_u64()?;
        if n > DECAY_N_LIMIT {
            return Err(CliError::Invalid(format!("N = {n} exceeds the decay limit {DECAY_N_LIMIT}")));
        }
        let nu = wtrick::nu_weight(&r, b, kappa)?;
        let d = ArcDissection::desk(r.x_u64()? as f64, nu.n as f64)?;
        out["decay"] = to_value(&wtrick::fourier_decay_report(&nu, 4 * nu.n, &d)?)?;
    }
    Ok(out)
}

fn run_bohr(a: &BohrArgs) -> CliResult<Value> {
    let q = poly(&a.poly)?;
    if let Some(eta) = &a.eta {
        let d = a.d.ok_or_else(|| CliError::Invalid("--eta needs --D".into()))?;
        let m = bigint(a.m.as_deref().ok_or_else(|| CliError::Invalid("--eta needs --M".into()))?)?;
        let r = bohr::growth_check(&q, d, &bohr::parse_rational(eta)?, &m)?;
        return Ok(json!({
            "M0": big(&r.m0), "lhs": r.lhs.to_string(), "rhs": r.rhs.to_string(),
            "margin": r.margin.to_string(), "holds": r.holds,
        }));
    }
    let rho = bohr::parse_rational(&a.rho)?;
    if let Some(k) = a.k {
        return to_value(&bohr::bohr_density_report(&q, k, &rho, a.z, a.samples, a.seed)?);
    }
    let theta: Vec<Theta> = a.theta.iter().map(|t| Theta::parse(t)).collect::<radolab_core::Result<_>>()?;
    let spec = BohrSpec::new(q, theta, rho)?;
    let set = bohr::bohr_set(&spec, a.z)?;
    if let Some(path) = &a.bitmask {
        fs::write(path, set.bitstring() + "\n")?;
    }
    let members = set.members();
    Ok(json!({
        "Z": a.z,
        "size": set.size(),
        "density": set.size() as f64 / a.z as f64,
        "unsure": set.unsure,
        "first": members.first(),
        "members": if members.len() <= 200 { json!(members) } else { Value::Null },
    }))
}

fn run_count(a: &CountArgs) -> CliResult<Value> {
    let eq = equation(&a.poly, &a.coeffs, &a.b)?;
    let filter: SolutionFilter = a.filter.into();
    if let Some(path) = &a.colouring_file {
        let col = Colouring::from_csv(&fs::read_to_string(path)?)?;
        let counts: Vec<String> = (1..=col.r())
            .map(|k| Ok(counting::enumerate_solutions(&eq, &col.members(k), filter)?.to_string()))
            .collect::<CliResult<_>>()?;
        return Ok(json!({ "N": col.n, "classes": col.r(), "counts": counts }));
    }
    let set: Vec<u64> = match (&a.set_file, a.n) {
        (Some(path), _) => counting::parse_set(&fs::read_to_string(path)?)?,
        (None, Some(n)) => (1..=n).collect(),
        (None, None) => return Err(CliError::Invalid("give --N, --set-file or --colouring-file".into())),
    };
    let c = counting::enumerate_solutions(&eq, &set, filter)?;
    Ok(json!({ "size": set.len(), "count": c.to_string() }))
}

fn run_experiment(a: &ExperimentArgs) -> CliResult<Value> {
    let f = poly(&a.poly)?;
    let n0 = a.n[0];
    match a.kind {
        ExperimentKind::Supersaturation => {
            let eq = equation(&a.poly, &a.coeffs, &a.b)?;
            let d = f.degree() as u32;
            let colour = |g| counting::generate_colourings(n0, d, &g, a.trials, a.seed);
            let dense = |g| counting::generate_sets(n0, &g, a.trials, a.seed);
            let report = match a.generator {
                GeneratorArg::Random => counting::supersaturation_colourings(&eq, &colour(ColourGenerator::Random { r: a.r })?)?,
                GeneratorArg::Congruence => counting::supersaturation_colourings(&eq, &colour(ColourGenerator::Congruence { q: a.q })?)?,
                GeneratorArg::Interval => counting::supersaturation_colourings(&eq, &colour(ColourGenerator::Interval { r: a.r })?)?,
                GeneratorArg::Subset => counting::supersaturation_sets(&eq, n0, &dense(DenseGenerator::RandomSubset { delta: a.delta })?)?,
                GeneratorArg::Progression => counting::supersaturation_sets(&eq, n0, &dense(DenseGenerator::Progression { delta: a.delta })?)?,
                GeneratorArg::Evens => counting::supersaturation_sets(&eq, n0, &dense(DenseGenerator::Evens)?)?,
            };
            to_value(&report)
        }
        ExperimentKind::Diagonal => {
            let eq = equation(&a.poly, &a.coeffs, &a.b)?;
            let constraint = match (a.fixed.as_slice(), a.equal.as_slice()) {
                ([j, c], []) if *j > 0 => DiagonalConstraint::Fixed { j: *j as usize, c: *c },
                ([], [j, k]) => DiagonalConstraint::Equal { j: *j, k: *k },
                _ => return Err(CliError::Invalid("give exactly one of --fixed j,c or --equal j,k".into())),
            };
            let rows: Vec<_> = a.n.iter().map(|&n| counting::count_diagonal(&eq, n, constraint)).collect::<radolab_core::Result<_>>()?;
            let decreasing = rows.windows(2).all(|w| w[1].ratio_power < w[0].ratio_power);
            Ok(json!({ "rows": to_value(&rows)?, "decreasing": decreasing }))
        }
        ExperimentKind::Sharpness => {
            let forms = counting::LinearFormPair::new(a.l1.clone(), a.l2.clone())?;
            let col = counting::sharpness_colouring(n0, f.degree() as u32, a.r)?;
            let counts = counting::monochromatic_linearised_counts(&forms, &f, &col)?;
            let sizes: Vec<usize> = (1..=col.r()).map(|k| col.members(k).len()).collect();
            Ok(json!({
                "N": n0,
                "class_sizes": sizes,
                "counts": counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            }))
        }
    }
}

/// Runs one configured command and returns its result.
pub fn execute(command: &Command) -> CliResult<Value> {
    match command {
        Command::Decide(a) => run_decide(a),
        Command::Intersective(a) => to_value(&intersectivity_verdict(&poly(&a.poly)?, a.bound)?),
        Command::Aux(a) => run_aux(a),
        Command::Roots(a) => Ok(json!({ "count": big(&count_roots_mod(&poly(&a.poly)?, a.modulus)?) })),
        Command::Expsum(a) => run_expsum(a),
        Command::Moments(a) => run_moments(a),
        Command::Wtrick(a) => run_wtrick(a),
        Command::Bohr(a) => run_bohr(a),
        Command::Count(a) => run_count(a),
        Command::Experiment(a) => run_experiment(a),
        Command::Replay(a) => replay(&a.report),
    }
}

/// Builds the report for a configuration.
pub fn report_for(config: Config) -> CliResult<Report> {
    let result = execute(&config.command)?;
    Ok(Report { schema_version: SCHEMA_VERSION, config_hash: config_hash(&config)?, config, result })
}

/// Whether two results agree: integers and strings exactly, floats to 1e-9 relative.
pub fn results_match(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            if x.is_f64() || y.is_f64() {
                let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
                x == y || (x - y).abs() <= 1e-9 * x.abs().max(y.abs())
            } else {
                x == y
            }
        }
        (Value::Array(x), Value::Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(p, q)| results_match(p, q)),
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| results_match(v, w)))
        }
        _ => a == b,
    }
}

fn replay(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path)?;
    let mut checked = 0;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let report: Report = serde_json::from_str(line)?;
        let expected = config_hash(&report.config)?;
        if expected != report.config_hash {
            return Err(CliError::Replay(format!("line {}: config hash {} does not match {}", i + 1, report.config_hash, expected)));
        }
        let again = execute(&report.config.command)?;
        if !results_match(&report.result, &again) {
            return Err(CliError::Replay(format!("line {}: result differs for {}", i + 1, report.config_hash)));
        }
        checked += 1;
    }
    Ok(json!({ "replayed": checked, "identical": true }))
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, rows)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, rows)),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

/// Result as `key,value` rows, nested keys joined by dots.
pub fn to_csv(result: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", result, &mut rows);
    let quote = |s: &str| if s.contains([',', '"', '\n']) { format!("\"{}\"", s.replace('"', "\"\"")) } else { s.to_string() };
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{},{}\n", quote(&k), quote(&v)));
    }
    out
}

fn persist(dir: &Path, report: &Report) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.jsonl", report.config_hash));
    let mut file = OpenOptions::new().create(true).append(true).open(&path)?;
    writeln!(file, "{}", serde_json::to_string(report)?)?;
    Ok(path)
}

fn dispatch(cli: Cli) -> CliResult<String> {
    if let Some(n) = cli.threads {
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if let Command::Replay(a) = &cli.command {
        return Ok(serde_json::to_string_pretty(&replay(&a.report)?)?);
    }
    let report = report_for(Config { command: cli.command, threads: cli.threads })?;
    if let Some(dir) = &cli.out {
        persist(dir, &report)?;
    }
    Ok(match cli.format {
        Format::Json => serde_json::to_string_pretty(&report)?,
        Format::Csv => to_csv(&report.result),
    })
}

/// Parses arguments, runs the command and prints the report. Returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(text) => {
            println!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

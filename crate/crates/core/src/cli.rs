//! Command-line front end. All logic lives here so it can be driven from
//! tests; `main` only forwards the process arguments.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::arith::fmt_sig;
use crate::density::{
    a_limit, check_density_inequality, family_profiles, finite_ie_density, multiplicative_density, sample_points,
    DensityReport, DEFAULT_X_WORK,
};
use crate::enumerate::count_ideals;
use crate::error::{Error, Result};
use crate::experiments::{
    besicovitch_experiment, main_theorem_experiment, primepower_free_experiment, ExperimentResult, INEQUALITY_SLACK,
};
use crate::family::{AFamily, FamilyRule, NormInterval};
use crate::field::{class_number_imag_quadratic, primes_up_to_norm, NumberField, UnitCount};
use crate::ideal::Ideal;
use crate::zeta::{EulerProductState, EULER_GAMMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VERDICT: i32 = 3;

const PRECISION: usize = 12;

#[derive(Parser, Debug)]
#[command(
    name = "afree",
    version,
    about = "Densities of sets of integral ideals in quadratic fields"
)]
pub struct Cli {
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Seed recorded in every summary.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory. Without it, CSV goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Degree, discriminant, units, class number and residue of a field.
    FieldInfo {
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Ideal counts H(x) and H(x)/x.
    Count {
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 1_000_000)]
        max_norm: u64,
        #[arg(long, default_value_t = 25)]
        samples: usize,
    },
    /// Partial Euler products against log x.
    Mertens {
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
        #[arg(long, default_value_t = 25)]
        samples: usize,
    },
    /// Density profile and exact densities for a family file.
    Density {
        /// Must match the field named in the family file.
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        aset: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        max_norm: u64,
        #[arg(long, default_value_t = 25)]
        samples: usize,
        #[arg(long, default_value_t = 200)]
        r_max: usize,
        #[arg(long, default_value_t = 20)]
        k_max: usize,
    },
    /// Canned experiment scenarios.
    Experiment {
        name: Scenario,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 1_000_000)]
        max_norm: u64,
        #[arg(long, default_value_t = 25)]
        samples: usize,
        /// Exponent for the prime-power family.
        #[arg(long, default_value_t = 2)]
        l: u32,
        /// Family file for main-theorem (default: prime powers with exponent l).
        #[arg(long)]
        aset: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        k_max: usize,
        #[arg(long, default_value_t = 200)]
        r_max: usize,
        #[arg(long, default_value_t = 10)]
        t0: u64,
        #[arg(long, default_value_t = 3)]
        growth: u32,
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    PrimepowerFree,
    MainTheorem,
    Besicovitch,
}

impl Scenario {
    fn name(self) -> &'static str {
        match self {
            Scenario::PrimepowerFree => "primepower-free",
            Scenario::MainTheorem => "main-theorem",
            Scenario::Besicovitch => "besicovitch",
        }
    }
}

/// Everything that determines a run's output. The thread count and the
/// output directory are left out so that outputs compare byte for byte.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub field: String,
    pub params: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub precision: usize,
    pub seed: u64,
}

/// Family file: `{"field": ..., "kind": ..., <payload>}`.
#[derive(Debug, Deserialize)]
struct FamilyFile {
    field: String,
    #[serde(flatten)]
    spec: FamilySpec,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FamilySpec {
    Explicit { members: Vec<MemberSpec> },
    PrimePowers { l: u32 },
    NormIntervals { intervals: Vec<(u64, u64)> },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MemberSpec {
    /// The principal ideal `(n)`.
    Integer(u64),
    /// `(p, conjugate_index, exponent)` triples.
    Factored(Vec<(u64, u8, u32)>),
}

/// Parses a family document.
pub fn parse_family(text: &str) -> Result<AFamily> {
    let file: FamilyFile = serde_json::from_str(text)?;
    let field: NumberField = file.field.parse()?;
    match file.spec {
        FamilySpec::Explicit { members } => {
            let ideals = members
                .iter()
                .map(|m| match m {
                    MemberSpec::Integer(n) => Ideal::principal(field, *n),
                    MemberSpec::Factored(t) => Ideal::from_triples(field, t),
                })
                .collect::<Result<Vec<_>>>()?;
            AFamily::explicit(field, ideals)
        }
        FamilySpec::PrimePowers { l } => AFamily::prime_powers(field, l),
        FamilySpec::NormIntervals { intervals } => AFamily::norm_intervals(
            field,
            intervals
                .into_iter()
                .map(|(lo, hi)| NormInterval::new(lo, hi))
                .collect::<Result<Vec<_>>>()?,
        ),
    }
}

pub fn load_family(path: &Path) -> Result<AFamily> {
    parse_family(&fs::read_to_string(path)?)
}

/// Exit code for an error: numeric trouble is 2, everything else a usage
/// problem.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Overflow(_) | Error::TooLarge { .. } | Error::SNotGreaterThanOne(_) => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

/// Files produced by one command, keyed by file name.
struct Output {
    files: Vec<(String, String)>,
    /// Text for stdout when no output directory is given.
    stdout: String,
    verdict_failed: bool,
}

impl Output {
    fn new() -> Self {
        Output {
            files: Vec::new(),
            stdout: String::new(),
            verdict_failed: false,
        }
    }
}

fn config(cli: &Cli, command: &str, field: &str, params: BTreeMap<String, String>, outputs: &[&str]) -> RunConfig {
    RunConfig {
        command: command.into(),
        field: field.into(),
        params,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        precision: PRECISION,
        seed: cli.seed,
    }
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn sig(x: f64) -> String {
    fmt_sig(x, PRECISION)
}

fn field_info(cli: &Cli, field_str: &str) -> Result<Output> {
    let field: NumberField = field_str.parse()?;
    let mut text = String::new();
    let _ = writeln!(text, "field: {field}");
    let _ = writeln!(text, "degree: {}", field.degree());
    let _ = writeln!(text, "discriminant: {}", field.discriminant());
    let units = match field.unit_count() {
        UnitCount::Finite(n) => n.to_string(),
        UnitCount::Infinite => "infinite".into(),
    };
    let _ = writeln!(text, "units: {units}");
    let mut class_number = None;
    if field.is_imaginary_quadratic() {
        let h = class_number_imag_quadratic(field.discriminant())?;
        class_number = Some(h);
        let _ = writeln!(text, "class_number: {h}");
    }
    if let Some(a) = field.analytic_residue() {
        let _ = writeln!(text, "analytic_residue: {}", sig(a));
    }
    let cfg = config(cli, "field-info", field_str, BTreeMap::new(), &["field-info.json"]);
    let summary = json!({
        "config": cfg,
        "field": field.to_string(),
        "degree": field.degree(),
        "discriminant": field.discriminant(),
        "units": units,
        "class_number": class_number,
        "analytic_residue": field.analytic_residue().map(sig),
    });
    let mut out = Output::new();
    out.files.push(("field-info.json".into(), pretty(&summary)));
    out.stdout = text;
    Ok(out)
}

fn count(cli: &Cli, field_str: &str, max_norm: u64, samples: usize) -> Result<Output> {
    let field: NumberField = field_str.parse()?;
    if max_norm < 1 {
        return Err(Error::BoundTooSmall { got: max_norm, min: 1 });
    }
    let counter = count_ideals(&field, max_norm);
    let points: Vec<u64> = if max_norm <= 1000 {
        (1..=max_norm).collect()
    } else {
        sample_points(max_norm, samples)
    };
    let mut csv = String::from("x,H,ratio\n");
    for &x in &points {
        let h = counter.count_up_to(x);
        let _ = writeln!(csv, "{x},{h},{}", sig(h as f64 / x as f64));
    }
    let h = counter.count_up_to(max_norm);
    let cfg = config(
        cli,
        "count",
        field_str,
        params(&[("max_norm", max_norm.to_string()), ("samples", samples.to_string())]),
        &["count.csv", "count.summary.json"],
    );
    let summary = json!({
        "config": cfg,
        "H": h,
        "ratio": sig(h as f64 / max_norm as f64),
        "residue": field.analytic_residue().map(sig),
    });
    let mut out = Output::new();
    out.stdout = csv.clone();
    out.files.push(("count.csv".into(), csv));
    out.files.push(("count.summary.json".into(), pretty(&summary)));
    Ok(out)
}

fn mertens(cli: &Cli, field_str: &str, cutoff: u64, samples: usize) -> Result<Output> {
    let field: NumberField = field_str.parse()?;
    if cutoff < 10 {
        return Err(Error::BoundTooSmall { got: cutoff, min: 10 });
    }
    let numbering = primes_up_to_norm(&field, cutoff);
    let primes = numbering.primes();
    let target = field.analytic_residue().map(|a| a * EULER_GAMMA.exp());
    let mut csv = String::from("cutoff,product,ratio,target\n");
    let mut last_ratio = 0.0;
    for x in sample_points(cutoff, samples) {
        let k = primes.partition_point(|q| q.norm <= x);
        let product = EulerProductState::from_primes(&primes[..k]).value();
        last_ratio = product / (x as f64).ln();
        let _ = writeln!(
            csv,
            "{x},{},{},{}",
            sig(product),
            sig(last_ratio),
            target.map(sig).unwrap_or_default()
        );
    }
    let cfg = config(
        cli,
        "mertens",
        field_str,
        params(&[("cutoff", cutoff.to_string()), ("samples", samples.to_string())]),
        &["mertens.csv", "mertens.summary.json"],
    );
    let summary = json!({
        "config": cfg,
        "ratio": sig(last_ratio),
        "target": target.map(sig),
        "relative_deviation": target.map(|t| sig((last_ratio - t).abs() / t)),
    });
    let mut out = Output::new();
    out.stdout = csv.clone();
    out.files.push(("mertens.csv".into(), csv));
    out.files.push(("mertens.summary.json".into(), pretty(&summary)));
    Ok(out)
}

fn report_json(r: &DensityReport) -> serde_json::Value {
    json!({
        "natural": sig(r.measured_natural()),
        "log": sig(r.measured_log()),
        "log_cumulative": sig(r.cumulative_log()),
        "d_hat": sig(r.lower_natural),
        "D_hat": sig(r.upper_natural),
        "delta_hat": sig(r.lower_log),
        "Delta_hat": sig(r.upper_log),
    })
}

#[allow(clippy::too_many_arguments)]
fn density(
    cli: &Cli,
    field_arg: Option<&str>,
    aset: &Path,
    max_norm: u64,
    samples: usize,
    r_max: usize,
    k_max: usize,
) -> Result<Output> {
    let family = load_family(aset)?;
    if let Some(f) = field_arg {
        if f.parse::<NumberField>()? != family.field() {
            return Err(Error::FieldMismatch);
        }
    }
    let (m, v) = family_profiles(&family, max_norm, samples)?;

    let mut csv =
        String::from("x,H,M_count,M_natural,M_log_cumulative,M_log,V_count,V_natural,V_log_cumulative,V_log\n");
    for (i, (a, b)) in m.samples.iter().zip(&v.samples).enumerate() {
        let wm = m.tail_log_at(i).map(sig).unwrap_or_default();
        let wv = v.tail_log_at(i).map(sig).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{wm},{},{},{},{wv}",
            a.x,
            a.total,
            a.count,
            sig(a.natural()),
            sig(a.logarithmic()),
            b.count,
            sig(b.natural()),
            sig(b.logarithmic()),
        );
    }

    // exact A: the whole family when finite, else the limit sequence
    let exact = match family.rule() {
        FamilyRule::Explicit(mem) => finite_ie_density(mem).map(|a| (a, mem.len())),
        _ => a_limit(&family, r_max).map(|s| (s.last().cloned().unwrap_or_default(), r_max)),
    };
    let (a_exact, a_value, r_used) = match exact {
        Ok((a, r)) => (Some(a.to_string()), a.to_f64(), Some(r)),
        Err(Error::TooLarge { .. }) => (None, None, None),
        Err(e) => return Err(e),
    };
    let st = multiplicative_density(&family, k_max, DEFAULT_X_WORK)?;
    let b = json!({
        "k": k_max,
        "B_k": st.b_k.to_string(),
        "value": sig(st.value()),
        "tolerance": sig(st.tolerance),
        "via_sieve": st.via_sieve,
    });
    let chk = check_density_inequality(&m, INEQUALITY_SLACK).ok();

    let cfg = config(
        cli,
        "density",
        &family.field().to_string(),
        params(&[
            ("aset", family.to_string()),
            ("max_norm", max_norm.to_string()),
            ("samples", samples.to_string()),
            ("r_max", r_max.to_string()),
            ("k_max", k_max.to_string()),
        ]),
        &["density.csv", "density.summary.json"],
    );
    let summary = json!({
        "config": cfg,
        "A": a_exact,
        "A_value": a_value.map(sig),
        "A_members_used": r_used,
        "B": b,
        "M": report_json(&m),
        "V": report_json(&v),
        "inequality": chk.map(|c| json!({
            "holds": c.holds,
            "epsilon": c.epsilon,
            "lower_margin": sig(c.lower_margin),
            "middle_margin": sig(c.middle_margin),
            "upper_margin": sig(c.upper_margin),
        })),
    });
    let mut out = Output::new();
    out.stdout = csv.clone();
    out.files.push(("density.csv".into(), csv));
    out.files.push(("density.summary.json".into(), pretty(&summary)));
    Ok(out)
}

fn experiment(cli: &Cli) -> Result<Output> {
    let Command::Experiment {
        name,
        field,
        max_norm,
        samples,
        l,
        aset,
        k_max,
        r_max,
        t0,
        growth,
        depth,
    } = &cli.command
    else {
        unreachable!("dispatched on the experiment command");
    };
    let parsed: NumberField = field.parse()?;
    let result: ExperimentResult = match name {
        Scenario::PrimepowerFree => primepower_free_experiment(&parsed, *l, *max_norm, *samples)?,
        Scenario::MainTheorem => {
            let family = match aset {
                Some(p) => load_family(p)?,
                None => AFamily::prime_powers(parsed, *l)?,
            };
            main_theorem_experiment(&family, *max_norm, *k_max, *r_max, *samples)?
        }
        Scenario::Besicovitch => besicovitch_experiment(&parsed, *t0, *growth, *depth, *max_norm, *samples)?,
    };
    let scenario = name.name();
    let csv_name = format!("{scenario}.csv");
    let summary_name = format!("{scenario}.summary.json");
    let mut p = params(&[("max_norm", max_norm.to_string()), ("samples", samples.to_string())]);
    match name {
        Scenario::PrimepowerFree => {
            p.insert("l".into(), l.to_string());
        }
        Scenario::MainTheorem => {
            p.insert("l".into(), l.to_string());
            p.insert("k_max".into(), k_max.to_string());
            p.insert("r_max".into(), r_max.to_string());
        }
        Scenario::Besicovitch => {
            p.insert("t0".into(), t0.to_string());
            p.insert("growth".into(), growth.to_string());
            p.insert("depth".into(), depth.to_string());
        }
    }
    let cfg = config(
        cli,
        &format!("experiment {scenario}"),
        field,
        p,
        &[&csv_name, &summary_name],
    );
    let mut summary = result.summary();
    summary["config"] = serde_json::to_value(cfg)?;
    let csv = result.to_csv();
    let mut out = Output::new();
    out.stdout = csv.clone();
    out.files.push((csv_name, csv));
    out.files.push((summary_name, pretty(&summary)));
    out.verdict_failed = !result.passed();
    Ok(out)
}

fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::FieldInfo { field } => field_info(cli, field),
        Command::Count {
            field,
            max_norm,
            samples,
        } => count(cli, field, *max_norm, *samples),
        Command::Mertens { field, cutoff, samples } => mertens(cli, field, *cutoff, *samples),
        Command::Density {
            field,
            aset,
            max_norm,
            samples,
            r_max,
            k_max,
        } => density(cli, field.as_deref(), aset, *max_norm, *samples, *r_max, *k_max),
        Command::Experiment { .. } => experiment(cli),
    }
}

fn write_outputs(dir: &Path, out: &Output) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (name, body) in &out.files {
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start thread pool: {e}");
            return EXIT_USAGE;
        }
    };
    let result = pool.install(|| execute(&cli));
    let out = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    match &cli.out {
        Some(dir) => {
            if let Err(e) = write_outputs(dir, &out) {
                let _ = writeln!(stderr, "error: {e}");
                return exit_code(&e);
            }
            if matches!(cli.command, Command::FieldInfo { .. }) {
                let _ = stdout.write_all(out.stdout.as_bytes());
            }
        }
        None => {
            let _ = stdout.write_all(out.stdout.as_bytes());
        }
    }
    if out.verdict_failed {
        let _ = writeln!(stderr, "verdict: FAIL");
        return EXIT_VERDICT;
    }
    EXIT_OK
}

//! The `molien` command-line front end.
//!
//! Settings come from built-in defaults, then an optional `key = value`
//! config file, then command-line flags. `MOLIEN_THREADS` sets the size of
//! the worker pool. Exit codes: 0 success, 1 failed verification or
//! computation, 2 usage error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::checks::{cayley_hamilton_check, run_suite, Check, Suite, SuiteConfig, Tolerances};
use crate::golden;
use crate::invariants::{
    inv2, inv3, numerical_rank, quartic_candidates, CandidateSubset, OrderTensor, QuarticValues,
};
use crate::molienweyl::{
    coefficient_strings, full_series, gamma0_series, gamma1_series, su2_label_table,
};
use crate::seriesring::{
    reconstruct_numerator, CyclotomicDenominator, IntPolynomial, Reflection, DEFAULT_SLACK,
};
use crate::wigner::{three_j, HalfInt, ThreeJKey};

pub const DEFAULT_MAX_ORDER: usize = 130;
pub const THREADS_ENV: &str = "MOLIEN_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "molien",
    version,
    about = "Molien series and invariants of SO(3) wreath Z2 on L(V,V)"
)]
pub struct Cli {
    /// Line-oriented `key = value` file overriding the defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    pub tolerances: Vec<(String, f64)>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Molien series of one coset or of the whole group.
    Molien(MolienArgs),
    /// Numerator of the rational Molien function over its denominator.
    Reconstruct(ReconstructArgs),
    /// SU(2) x SU(2) labels that descend to SO(4), by dimension.
    Labels(LabelsArgs),
    /// Evaluate the invariants of one degree on random order tensors.
    Invariants(InvariantsArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Exact Wigner 3j symbol; spins may be written as `3/2`.
    Threej(ThreejArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Gamma0,
    Gamma1,
    Full,
}

#[derive(Args, Debug)]
pub struct MolienArgs {
    #[arg(long, value_enum, default_value = "full")]
    pub group: Group,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub ell: Option<u8>,
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    P0,
    P1,
    Ell1,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Args, Debug)]
pub struct LabelsArgs {
    #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_dim: u64,
}

#[derive(Args, Debug)]
pub struct InvariantsArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
    pub degree: u8,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Series,
    Identities,
    Invariance,
    Rank,
    Charpoly,
    Blocks,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: SuiteArg,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct ThreejArgs {
    pub j1: String,
    pub j2: String,
    pub j3: String,
    #[arg(allow_hyphen_values = true)]
    pub m1: String,
    #[arg(allow_hyphen_values = true)]
    pub m2: String,
    #[arg(allow_hyphen_values = true)]
    pub m3: String,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|e| format!("bad tolerance {v:?}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Parses `2`, `-1`, `3/2` or `-1/2`.
pub fn parse_half(s: &str) -> Result<HalfInt, String> {
    let bad = || format!("expected an integer or a half-integer like 3/2, got {s:?}");
    match s.split_once('/') {
        None => s
            .trim()
            .parse::<i64>()
            .map(HalfInt::from_int)
            .map_err(|_| bad()),
        Some((n, "2")) => n
            .trim()
            .parse::<i64>()
            .map(HalfInt::from_doubled)
            .map_err(|_| bad()),
        Some(_) => Err(bad()),
    }
}

/// Resolved settings for one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub ell: usize,
    pub order: usize,
    pub seed: u64,
    pub samples: usize,
    pub max_order: usize,
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ell: 2,
            order: 20,
            seed: 0,
            samples: 100,
            max_order: DEFAULT_MAX_ORDER,
            tolerances: Tolerances::default(),
            output: None,
            format: Format::Json,
        }
    }
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl RunConfig {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), UsageError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| UsageError(format!("config line {}: {msg}", n + 1));
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            let num = |v: &str| v.parse::<u64>().map_err(|e| err(format!("{k}: {e}")));
            match k {
                "ell" => self.ell = num(v)? as usize,
                "order" => self.order = num(v)? as usize,
                "seed" => self.seed = num(v)?,
                "samples" => self.samples = num(v)? as usize,
                "max_order" => self.max_order = num(v)? as usize,
                "output" => self.output = Some(PathBuf::from(v)),
                "format" => {
                    self.format =
                        Format::from_str(v, true).map_err(|e| err(format!("format: {e}")))?
                }
                _ => match k.strip_prefix("tol.") {
                    Some(name) => {
                        let t = v.parse::<f64>().map_err(|e| err(format!("{k}: {e}")))?;
                        self.tolerances.0.insert(name.to_string(), t);
                    }
                    None => return Err(err(format!("unknown key {k:?}"))),
                },
            }
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), UsageError> {
        let text = fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_file_text(&text)
    }

    fn check(&self) -> Result<(), UsageError> {
        if self.order > self.max_order {
            return Err(UsageError(format!(
                "order {} exceeds the maximum {}",
                self.order, self.max_order
            )));
        }
        if !(1..=2).contains(&self.ell) {
            return Err(UsageError(format!("ell must be 1 or 2, got {}", self.ell)));
        }
        Ok(())
    }
}

/// Outcome of a command: the report and whether everything it checked passed.
struct Outcome {
    report: Value,
    text: String,
    ok: bool,
}

fn strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|c| c.to_string()).collect()
}

fn poly_text(p: &IntPolynomial) -> String {
    p.to_string()
}

fn molien_cmd(cfg: &RunConfig, group: Group) -> Result<Outcome, String> {
    let s = match group {
        Group::Gamma0 => gamma0_series(cfg.ell, cfg.order),
        Group::Gamma1 => gamma1_series(cfg.ell, cfg.order),
        Group::Full => full_series(cfg.ell, cfg.order),
    }
    .map_err(|e| e.to_string())?;
    let coefficients = coefficient_strings(&s);
    let name = serde_json::to_value(group).expect("enum serialises");
    Ok(Outcome {
        text: format!(
            "{} l={} order={}\n{}\n",
            name.as_str().unwrap_or(""),
            cfg.ell,
            cfg.order,
            coefficients.join(", ")
        ),
        report: json!({"group": name, "ell": cfg.ell, "order": cfg.order, "coefficients": coefficients}),
        ok: true,
    })
}

fn reconstruct_cmd(cfg: &RunConfig, which: Which, order: Option<usize>) -> Result<Outcome, String> {
    let (ell, q, expected_deg, golden, reflection, label) = match which {
        Which::P0 => (
            2,
            CyclotomicDenominator::q0(),
            113,
            Some(golden::p0()),
            Some(Reflection::Symmetric),
            "p0",
        ),
        Which::P1 => (
            2,
            CyclotomicDenominator::q0(),
            113,
            Some(golden::p1()),
            Some(Reflection::Antisymmetric),
            "p1",
        ),
        Which::Ell1 => (1, CyclotomicDenominator::ell1(), 0, None, None, "ell1"),
    };
    let order = order.unwrap_or(expected_deg + DEFAULT_SLACK);
    if order > cfg.max_order {
        return Err(format!(
            "order {order} exceeds the maximum {}",
            cfg.max_order
        ));
    }
    let s = match which {
        Which::P1 => gamma1_series(ell, order),
        _ => gamma0_series(ell, order),
    }
    .map_err(|e| e.to_string())?;
    let p = reconstruct_numerator(&s, &q, expected_deg).map_err(|e| e.to_string())?;
    let denominator: Vec<usize> = q
        .factors()
        .flat_map(|(d, m)| std::iter::repeat_n(d, m))
        .collect();
    let mut ok = true;
    let mut report = json!({
        "which": label,
        "ell": ell,
        "order": order,
        "denominator_degrees": denominator,
        "numerator": strings(p.coeffs()),
        "value_at_one": p.eval_at_one().to_string(),
    });
    let mut text = format!(
        "{label}: numerator of degree {} over prod(1 - t^d), d = {:?}\nvalue at 1: {}\n",
        p.degree().unwrap_or(0),
        denominator,
        p.eval_at_one()
    );
    if expected_deg == 0 {
        text.push_str(&format!("numerator: {}\n", poly_text(&p)));
    }
    if let Some(r) = reflection {
        let pal = p.is_palindromic(r);
        ok &= pal;
        report["palindromic"] = json!(pal);
        text.push_str(&format!("palindromic ({r:?}): {pal}\n"));
    }
    if let Some(g) = golden {
        let mismatch = (0..g.len().max(p.coeffs().len()))
            .find(|&k| p.coeff(k) != g.get(k).cloned().unwrap_or_default());
        ok &= mismatch.is_none();
        report["matches_reference"] = json!(mismatch.is_none());
        report["first_mismatch"] = json!(mismatch);
        text.push_str(&match mismatch {
            None => "matches the reference coefficients\n".to_string(),
            Some(k) => format!("first mismatch with the reference at t^{k}\n"),
        });
    }
    Ok(Outcome { report, text, ok })
}

fn labels_cmd(max_dim: usize) -> Outcome {
    let table = su2_label_table(max_dim);
    let text = table
        .iter()
        .map(|r| {
            let pairs: Vec<String> = r.labels.iter().map(|(a, b)| format!("({a},{b})")).collect();
            format!("{:>4}  {}\n", r.dim, pairs.join(", "))
        })
        .collect();
    Outcome {
        report: json!({"max_dim": max_dim, "rows": table}),
        text,
        ok: true,
    }
}

fn invariants_cmd(cfg: &RunConfig, degree: u8) -> Result<Outcome, String> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let tensors: Vec<_> = (0..cfg.samples)
        .map(|_| OrderTensor::random(2, &mut rng))
        .collect();
    let names: Vec<String> = match degree {
        2 => vec!["I2".into()],
        3 => vec!["I3".into()],
        _ => quartic_candidates().iter().map(|q| q.label()).collect(),
    };
    let mut rows = Vec::new();
    for s in &tensors {
        rows.push(match degree {
            2 => vec![inv2(s)],
            3 => vec![inv3(s).map_err(|e| e.to_string())?],
            _ => {
                let q = QuarticValues::of(s).map_err(|e| e.to_string())?;
                quartic_candidates().iter().map(|&c| q.get(c)).collect()
            }
        });
    }
    let rank_of = |cols: &[usize]| -> Option<usize> {
        if rows.is_empty() {
            return None;
        }
        let m = nalgebra::DMatrix::from_fn(rows.len(), cols.len(), |r, c| rows[r][cols[c]]);
        numerical_rank(&m).ok()
    };
    let all: Vec<usize> = (0..names.len()).collect();
    let tau: Vec<usize> = if degree == 4 {
        let keep = CandidateSubset::TauInvariant.members();
        quartic_candidates()
            .iter()
            .enumerate()
            .filter(|(_, q)| keep.contains(q))
            .map(|(i, _)| i)
            .collect()
    } else {
        all.clone()
    };
    let (rank, tau_rank) = (rank_of(&all), rank_of(&tau));
    let mut text = format!(
        "degree {degree}, {} samples, seed {}\n",
        cfg.samples, cfg.seed
    );
    text.push_str(&format!(
        "rank {:?}, tau-invariant rank {:?}\n",
        rank, tau_rank
    ));
    text.push_str(&names.join("\t"));
    text.push('\n');
    for r in &rows {
        let cells: Vec<String> = r.iter().map(|x| format!("{x:.12e}")).collect();
        text.push_str(&cells.join("\t"));
        text.push('\n');
    }
    Ok(Outcome {
        report: json!({
            "degree": degree,
            "seed": cfg.seed,
            "samples": cfg.samples,
            "names": names,
            "values": rows,
            "rank": rank,
            "tau_invariant_rank": tau_rank,
        }),
        text,
        ok: true,
    })
}

fn verify_cmd(cfg: &RunConfig, suite: SuiteArg) -> Outcome {
    let scfg = SuiteConfig {
        samples: cfg.samples,
        seed: cfg.seed,
        order: cfg.order,
        tolerances: cfg.tolerances.clone(),
    };
    let suites: Vec<Suite> = match suite {
        SuiteArg::Series => vec![Suite::Series],
        SuiteArg::Identities => vec![Suite::Identities],
        SuiteArg::Invariance => vec![Suite::Invariance],
        SuiteArg::Rank => vec![Suite::Rank],
        SuiteArg::Charpoly => vec![Suite::Charpoly],
        SuiteArg::Blocks => vec![Suite::Blocks],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let mut checks: Vec<Check> = suites.iter().flat_map(|&s| run_suite(s, &scfg)).collect();
    if suite == SuiteArg::All || suite == SuiteArg::Invariance {
        checks.push(cayley_hamilton_check(&scfg));
    }
    let ok = checks.iter().all(|c| c.pass);
    let text = checks
        .iter()
        .map(|c| {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            match &c.detail {
                Some(d) => format!("{tag}  {}  ({d})\n", c.name),
                None => format!(
                    "{tag}  {}  max {:.3e} <= {:.1e}\n",
                    c.name, c.max_residual, c.tolerance
                ),
            }
        })
        .collect();
    Outcome {
        report: json!({"seed": cfg.seed, "samples": cfg.samples, "order": cfg.order, "pass": ok, "checks": checks}),
        text,
        ok,
    }
}

fn threej_cmd(args: &ThreejArgs) -> Result<Outcome, UsageError> {
    let v: Vec<HalfInt> = [&args.j1, &args.j2, &args.j3, &args.m1, &args.m2, &args.m3]
        .into_iter()
        .map(|s| parse_half(s))
        .collect::<Result<_, _>>()
        .map_err(UsageError)?;
    let key = ThreeJKey::new([v[0], v[1], v[2]], [v[3], v[4], v[5]]);
    let value = three_j(&key).map_err(|e| UsageError(e.to_string()))?;
    Ok(Outcome {
        text: format!("{value}\n"),
        report: json!({"j": [v[0], v[1], v[2]], "m": [v[3], v[4], v[5]], "value": value.to_string(), "approx": value.to_f64()}),
        ok: true,
    })
}

fn init_threads(err: &mut dyn Write) {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                // a second call in the same process keeps the first pool
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                let _ = writeln!(err, "warning: ignoring {THREADS_ENV}={v:?}");
            }
        }
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    init_threads(err);
    let usage = |err: &mut dyn Write, msg: &str| {
        let _ = writeln!(err, "error: {msg}\n\nusage: molien <molien|reconstruct|labels|invariants|verify|threej> [options]");
        2
    };

    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        if let Err(UsageError(m)) = cfg.apply_file(path) {
            return usage(err, &m);
        }
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(o) = &cli.output {
        cfg.output = Some(o.clone());
    }
    for (k, v) in &cli.tolerances {
        cfg.tolerances.0.insert(k.clone(), *v);
    }
    match &cli.command {
        Command::Molien(a) => {
            cfg.ell = a.ell.map(usize::from).unwrap_or(cfg.ell);
            cfg.order = a.order.unwrap_or(cfg.order);
        }
        Command::Reconstruct(_) | Command::Labels(_) | Command::Threej(_) => {}
        Command::Invariants(a) => {
            cfg.seed = a.seed.unwrap_or(cfg.seed);
            cfg.samples = a.samples.unwrap_or(cfg.samples);
        }
        Command::Verify(a) => {
            cfg.order = a.order.unwrap_or(cfg.order);
            cfg.seed = a.seed.unwrap_or(cfg.seed);
            cfg.samples = a.samples.unwrap_or(cfg.samples);
        }
    }
    if let Err(UsageError(m)) = cfg.check() {
        return usage(err, &m);
    }

    let result = match &cli.command {
        Command::Molien(a) => molien_cmd(&cfg, a.group),
        Command::Reconstruct(a) => reconstruct_cmd(&cfg, a.which, a.order),
        Command::Labels(a) => Ok(labels_cmd(a.max_dim as usize)),
        Command::Invariants(a) => invariants_cmd(&cfg, a.degree),
        Command::Verify(a) => Ok(verify_cmd(&cfg, a.suite)),
        Command::Threej(a) => match threej_cmd(a) {
            Ok(o) => Ok(o),
            Err(UsageError(m)) => return usage(err, &m),
        },
    };
    let outcome = match result {
        Ok(o) => o,
        Err(m) => {
            let _ = writeln!(err, "error: {m}");
            return 1;
        }
    };
    let body = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.report).expect("report serialises");
            s.push('\n');
            s
        }
        Format::Text => outcome.text,
    };
    let written = match &cfg.output {
        Some(path) => {
            fs::write(path, &body).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => out.write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(m) = written {
        let _ = writeln!(err, "error: {m}");
        return 1;
    }
    if outcome.ok {
        0
    } else {
        1
    }
}

/// Entry point for the binary.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(
        argv,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

/// Tolerance names accepted by `--tol` and `tol.<name>` config keys.
pub fn tolerance_names() -> BTreeMap<&'static str, f64> {
    let t = Tolerances::default();
    [
        "identities",
        "invariance",
        "tau",
        "charpoly",
        "blocks",
        "cayley_hamilton",
    ]
    .into_iter()
    .map(|n| (n, t.get(n)))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("molien").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn half_parsing() {
        assert_eq!(parse_half("3/2"), Ok(HalfInt::from_doubled(3)));
        assert_eq!(parse_half("-1/2"), Ok(HalfInt::from_doubled(-1)));
        assert_eq!(parse_half("-2"), Ok(HalfInt::from_int(-2)));
        assert!(parse_half("1/3").is_err());
    }

    #[test]
    fn config_file_keys() {
        let mut c = RunConfig::default();
        c.apply_file_text(
            "# comment\nell = 1\norder=12  # trailing\ntol.blocks = 1e-6\nformat = text\n",
        )
        .unwrap();
        assert_eq!((c.ell, c.order, c.format), (1, 12, Format::Text));
        assert_eq!(c.tolerances.get("blocks"), 1e-6);
        assert!(c.apply_file_text("bogus = 1").is_err());
        assert!(c.apply_file_text("order").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&["nonsense"]).0, 2);
        assert_eq!(run_capture(&["molien", "--ell", "3"]).0, 2);
        let (code, _, err) = run_capture(&["molien", "--order", "131"]);
        assert_eq!(code, 2);
        assert!(err.contains("exceeds the maximum"));
        assert_eq!(run_capture(&["threej", "1", "1", "1", "0", "0", "x"]).0, 2);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("molien"));
    }

    #[test]
    fn molien_json() {
        let (code, out, _) =
            run_capture(&["molien", "--group", "full", "--ell", "2", "--order", "10"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["group"], "full");
        let c: Vec<&str> = v["coefficients"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_str().unwrap())
            .collect();
        assert_eq!(
            c,
            ["1", "0", "1", "1", "4", "5", "14", "20", "52", "90", "201"]
        );
    }

    #[test]
    fn reconstruct_ell1_text() {
        let (code, out, _) = run_capture(&[
            "reconstruct",
            "--which",
            "ell1",
            "--order",
            "20",
            "--format",
            "text",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("numerator: 1\n"), "{out}");
        assert!(out.contains("[2, 3, 4]"), "{out}");
    }

    #[test]
    fn threej_exact() {
        let (code, out, _) =
            run_capture(&["threej", "2", "2", "2", "0", "0", "0", "--format", "text"]);
        assert_eq!(code, 0);
        assert_eq!(out, "-sqrt(2/35)\n");
        let (_, out, _) = run_capture(&[
            "--format", "text", "threej", "1/2", "1/2", "1", "1/2", "-1/2", "0",
        ]);
        assert_eq!(out, "sqrt(1/6)\n");
    }

    #[test]
    fn identical_runs_identical_bytes() {
        let args = [
            "invariants",
            "--degree",
            "4",
            "--seed",
            "7",
            "--samples",
            "25",
        ];
        let (a, b) = (run_capture(&args), run_capture(&args));
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1);
        let v: Value = serde_json::from_str(&a.1).unwrap();
        assert_eq!(v["rank"], 5);
        assert_eq!(v["tau_invariant_rank"], 4);
    }

    #[test]
    fn labels_rows() {
        let (code, out, _) = run_capture(&["labels", "--max-dim", "4", "--format", "text"]);
        assert_eq!(code, 0);
        assert_eq!(out, "   1  (0,0)\n   3  (0,1)\n   4  (1/2,1/2)\n");
    }

    #[test]
    fn verify_exit_code_tracks_failures() {
        let (code, out, _) = run_capture(&["verify", "--suite", "charpoly", "--samples", "10"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"pass\": true"));
        let (code, _, _) = run_capture(&["verify", "--suite", "identities", "--samples", "5"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn output_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let p = path.to_str().unwrap();
        let (code, out, _) = run_capture(&["labels", "--max-dim", "2", "-o", p]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        assert!(fs::read_to_string(&path)
            .unwrap()
            .contains("\"max_dim\": 2"));
    }
}

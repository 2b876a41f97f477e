//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 usage or input
//! error. Settings resolve as flag, then `TORUSGATES_*` environment
//! variable, then built-in default.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::closure::{generate_all, lie_closure, verify_generation, CoefficientField, GenerationReport};
use crate::error::{Error, Result};
use crate::gates::{b_elements_bounded, certify_universality, UniversalityReport};
use crate::synth::{
    phase_distance, random_special_unitary_seeded, write_sweep_csv, CompileOptions, Compiler, GateSequence,
    DEFAULT_COMMUTATOR_DEPTH,
};
use crate::torus::{register_dim, torus_generators_bounded, verify_relations, GeneratorKind, GeneratorSet, RelationReport};
use crate::weyl_core::{CMatrix, Tolerance, DEFAULT_MAX_DIM};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Torus,
    B,
}

#[derive(Debug, Parser)]
#[command(name = "torusgates", version, about = "Noncommutative-torus generators, commutator generation and universal qudit gates")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Qudit order l (at least 2).
    #[arg(long, global = true, env = "TORUSGATES_L", default_value_t = 3)]
    pub l: usize,
    /// Number of qudits n (at least 1).
    #[arg(long, global = true, env = "TORUSGATES_N", default_value_t = 1)]
    pub n: usize,
    /// Absolute residual threshold.
    #[arg(long, global = true, env = "TORUSGATES_TOL_ABS", default_value_t = 1e-10)]
    pub tol_abs: f64,
    /// Span-rank threshold.
    #[arg(long, global = true, env = "TORUSGATES_TOL_RANK", default_value_t = 1e-8)]
    pub tol_rank: f64,
    /// Seed for randomized targets.
    #[arg(long, global = true, env = "TORUSGATES_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output format; defaults to csv for compile sweeps and json otherwise.
    #[arg(long, global = true, env = "TORUSGATES_OUTPUT", value_enum)]
    pub output: Option<OutputFormat>,
    /// Worker threads for parallel closure and sweeps.
    #[arg(long, global = true, env = "TORUSGATES_THREADS")]
    pub threads: Option<usize>,
    /// Largest register dimension l^n accepted.
    #[arg(long, global = true, env = "TORUSGATES_MAX_DIM", default_value_t = DEFAULT_MAX_DIM)]
    pub max_dim: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the torus generators T_k or the two-local elements B_k.
    Generators {
        #[arg(long, value_enum, env = "TORUSGATES_KIND", default_value = "torus")]
        kind: KindArg,
    },
    /// Check T_k^l = 1 and T_j T_k = zeta T_k T_j.
    Verify {
        /// Generator-set JSON to check instead of the built-in generators.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Build a commutator word for every monomial and cross-check with the Lie closure.
    ///
    /// CSV columns: exponents, route, alpha_re, alpha_im, residual, trace, ok.
    Closure,
    /// Real Lie closure of the gate seeds compared to dim su(l^n).
    ///
    /// CSV columns: l, n, algebra_dim, expected_dim, deficient.
    Certify,
    /// Compile a unitary target into G/F gates.
    ///
    /// Sweep CSV columns: m, depth, phase_distance, gate_count, wall_ms.
    Compile {
        /// Target matrix JSON ({"dim": d, "entries": [[[re, im], ...], ...]}).
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        target: Option<PathBuf>,
        /// Use a Haar-random special unitary drawn from --seed.
        #[arg(long)]
        random: bool,
        /// Product-formula steps.
        #[arg(long, default_value_t = 16)]
        m: usize,
        /// Largest commutator depth compiled.
        #[arg(long, default_value_t = DEFAULT_COMMUTATOR_DEPTH)]
        depth: usize,
        /// Comma-separated step counts; emits one row per value.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<usize>>,
    },
}

/// Validated settings shared by every command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub l: usize,
    pub n: usize,
    pub tol: Tolerance<f64>,
    pub seed: u64,
    pub output_format: Option<OutputFormat>,
    pub max_dim: usize,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> Result<Self> {
        register_dim(g.l, g.n, g.max_dim)?;
        Ok(Self {
            l: g.l,
            n: g.n,
            tol: Tolerance::new(g.tol_abs, g.tol_rank)?,
            seed: g.seed,
            output_format: g.output,
            max_dim: g.max_dim,
        })
    }

    fn format(&self, default: OutputFormat) -> OutputFormat {
        self.output_format.unwrap_or(default)
    }
}

/// Result of a command: exit code plus the text to print.
struct Outcome {
    code: i32,
    body: String,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { code: EXIT_OK, body }
    }

    fn checked(passed: bool, body: String) -> Self {
        Self { code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED }, body }
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::GenerationFailure { .. }
        | Error::Reconstruction { .. }
        | Error::DeficientGateSet { .. }
        | Error::OutsideSpan { .. } => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if let Err(e) = out.write_all(outcome.body.as_bytes()) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = RunConfig::from_args(&cli.global)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.global.threads {
        if t == 0 {
            return Err(Error::InvalidParameter("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Error::InvalidParameter(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Generators { kind } => cmd_generators(&cfg, *kind),
        Command::Verify { input } => cmd_verify(&cfg, input.as_deref()),
        Command::Closure => cmd_closure(&cfg),
        Command::Certify => cmd_certify(&cfg),
        Command::Compile { target, random, m, depth, sweep } => {
            let target = match target {
                Some(path) => read_matrix(path)?,
                None if *random => random_special_unitary_seeded(register_dim(cfg.l, cfg.n, cfg.max_dim)?, cfg.seed),
                None => return Err(Error::InvalidParameter("either --target or --random is required".into())),
            };
            cmd_compile(&cfg, &target, *m, *depth, sweep.as_deref())
        }
    })
}

fn to_json<S: Serialize>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_text<S: Serialize>(rows: impl IntoIterator<Item = S>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn not_tabular(what: &str) -> Error {
    Error::InvalidParameter(format!("{what} has no CSV form; use --output json"))
}

fn read_matrix(path: &Path) -> Result<CMatrix<f64>> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn cmd_generators_set(cfg: &RunConfig, kind: KindArg) -> Result<GeneratorSet<f64>> {
    match kind {
        KindArg::Torus => torus_generators_bounded(cfg.l, cfg.n, cfg.max_dim),
        KindArg::B => b_elements_bounded(cfg.l, cfg.n, cfg.max_dim),
    }
}

fn cmd_generators(cfg: &RunConfig, kind: KindArg) -> Result<Outcome> {
    if cfg.format(OutputFormat::Json) == OutputFormat::Csv {
        return Err(not_tabular("a generator set"));
    }
    Ok(Outcome::ok(to_json(&cmd_generators_set(cfg, kind)?)?))
}

fn cmd_verify(cfg: &RunConfig, input: Option<&Path>) -> Result<Outcome> {
    let set: GeneratorSet<f64> = match input {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => torus_generators_bounded(cfg.l, cfg.n, cfg.max_dim)?,
    };
    if set.kind() != GeneratorKind::Torus {
        return Err(Error::WrongKind { expected: GeneratorKind::Torus.name(), found: set.kind().name() });
    }
    let report: RelationReport<f64> = verify_relations(&set, &cfg.tol)?;
    let body = match cfg.format(OutputFormat::Json) {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Csv => {
            #[derive(Serialize)]
            struct Row {
                j: usize,
                k: Option<usize>,
                residual: f64,
            }
            let orders = report.order_residuals.iter().enumerate().map(|(j, &r)| Row { j, k: None, residual: r });
            let pairs = report.pair_residuals.iter().map(|p| Row { j: p.j, k: Some(p.k), residual: p.residual });
            csv_text(orders.chain(pairs))?
        }
    };
    Ok(Outcome::checked(report.passed, body))
}

/// Output of the `closure` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureOutput {
    /// Constructive generation; absent for `l = 2`, which it does not cover.
    pub generation: Option<GenerationReport<f64>>,
    pub closure_dim: usize,
    pub expected_dim: usize,
    pub closure_matches_generation: bool,
}

fn cmd_closure(cfg: &RunConfig) -> Result<Outcome> {
    let gens = torus_generators_bounded::<f64>(cfg.l, cfg.n, cfg.max_dim)?;
    let generation = match verify_generation(cfg.l, cfg.n, &cfg.tol) {
        Ok(report) => Some(report),
        Err(Error::NotCovered) => None,
        Err(e) => return Err(e),
    };
    let span = lie_closure(gens.mats(), CoefficientField::Complex, &cfg.tol)?;
    let dim = gens.dim();
    let expected_dim = dim * dim - 1;
    let generated = match &generation {
        Some(g) => g.passed,
        None => generate_all::<f64>(cfg.l, cfg.n, &cfg.tol)?.passed,
    };
    let output = ClosureOutput {
        closure_matches_generation: span.dim() == expected_dim && generated,
        generation,
        closure_dim: span.dim(),
        expected_dim,
    };
    let passed = output.generation.as_ref().is_none_or(|g| g.passed && output.closure_matches_generation);
    let body = match cfg.format(OutputFormat::Json) {
        OutputFormat::Json => to_json(&output)?,
        OutputFormat::Csv => {
            #[derive(Serialize)]
            struct Row {
                exponents: String,
                route: String,
                alpha_re: f64,
                alpha_im: f64,
                residual: f64,
                trace: f64,
                ok: bool,
            }
            let entries = output.generation.as_ref().map(|g| g.entries.as_slice()).unwrap_or_default();
            csv_text(entries.iter().map(|e| Row {
                exponents: e.exponents.as_slice().iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
                route: serde_json::to_value(e.route).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                alpha_re: e.alpha.re,
                alpha_im: e.alpha.im,
                residual: e.residual,
                trace: e.trace,
                ok: e.ok,
            }))?
        }
    };
    Ok(Outcome::checked(passed, body))
}

fn cmd_certify(cfg: &RunConfig) -> Result<Outcome> {
    let report: UniversalityReport = certify_universality::<f64>(cfg.l, cfg.n, &cfg.tol)?;
    let body = match cfg.format(OutputFormat::Json) {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Csv => {
            #[derive(Serialize)]
            struct Row {
                l: usize,
                n: usize,
                algebra_dim: usize,
                expected_dim: usize,
                deficient: bool,
            }
            csv_text([Row {
                l: report.l,
                n: report.n,
                algebra_dim: report.algebra_dim,
                expected_dim: report.expected_dim,
                deficient: report.deficient,
            }])?
        }
    };
    Ok(Outcome::ok(body))
}

/// Output of a single `compile` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompileOutput {
    pub sequence: GateSequence,
    pub phase_distance: f64,
    pub wall_ms: f64,
}

fn cmd_compile(cfg: &RunConfig, target: &CMatrix<f64>, m: usize, depth: usize, sweep: Option<&[usize]>) -> Result<Outcome> {
    let dim = register_dim(cfg.l, cfg.n, cfg.max_dim)?;
    if target.dim() != dim {
        return Err(Error::DimensionMismatch { left: target.dim(), right: dim });
    }
    let compiler = Compiler::new(b_elements_bounded(cfg.l, cfg.n, cfg.max_dim)?, cfg.tol)?;
    if let Some(ms) = sweep {
        let rows = compiler.sweep(target, ms, depth)?;
        let body = match cfg.format(OutputFormat::Csv) {
            OutputFormat::Json => to_json(&rows)?,
            OutputFormat::Csv => {
                let mut buf = Vec::new();
                write_sweep_csv(&rows, &mut buf)?;
                String::from_utf8(buf).map_err(|e| Error::InvalidParameter(e.to_string()))?
            }
        };
        return Ok(Outcome::ok(body));
    }
    let start = Instant::now();
    let sequence = compiler.compile(target, &CompileOptions::new(m, depth))?;
    let phase_distance = phase_distance(&compiler.evaluate(&sequence)?, target)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let body = match cfg.format(OutputFormat::Json) {
        OutputFormat::Json => to_json(&CompileOutput { sequence, phase_distance, wall_ms })?,
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            let row = crate::synth::SweepRow { m, depth, phase_distance, gate_count: sequence.len(), wall_ms };
            write_sweep_csv(&[row], &mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::InvalidParameter(e.to_string()))?
        }
    };
    Ok(Outcome::ok(body))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("torusgates").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn exit_code_classes() {
        assert_eq!(exit_code(&Error::Reconstruction { step: 1 }), EXIT_CHECK_FAILED);
        assert_eq!(exit_code(&Error::DimensionOverflow { dim: 8192, max: 4096 }), EXIT_USAGE);
        assert_eq!(exit_code(&Error::NotUnitary { residual: 1.0 }), EXIT_USAGE);
    }

    #[test]
    fn config_rejects_bad_values() {
        assert_eq!(run_args(&["--l", "1", "certify"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--n", "0", "certify"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--tol-abs", "-1", "certify"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--threads", "0", "certify"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--l", "3", "--n", "8", "generators"]).0, EXIT_USAGE);
    }

    #[test]
    fn help_exits_cleanly() {
        let (code, out, _) = run_args(&["compile", "--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("m, depth, phase_distance, gate_count, wall_ms"));
    }

    #[test]
    fn unknown_command_is_usage_error() {
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
    }

    #[test]
    fn certify_csv_row() {
        let (code, out, _) = run_args(&["--l", "3", "--n", "1", "--output", "csv", "certify"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "l,n,algebra_dim,expected_dim,deficient\n3,1,8,8,false\n");
    }

    #[test]
    fn generators_have_no_csv_form() {
        assert_eq!(run_args(&["--output", "csv", "generators"]).0, EXIT_USAGE);
    }
}

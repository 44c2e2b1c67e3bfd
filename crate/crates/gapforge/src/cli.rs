//! Argument parsing and command dispatch.
//!
//! Every command is a pure function from its arguments to an [`Outcome`];
//! [`run`] owns all file and stream output. Stochastic commands refuse to run
//! without `--seed`.

use crate::error::{CliError, CliResult};
use crate::exec::PoolExecutor;
use crate::formats::{read_json, to_json_string, CertDoc, CoverDoc, GraphDoc, ModelDoc, ReportDoc};
use crate::manifest::{RunManifest, Timing, FORMAT_VERSION};
use crate::plot::{fmt_f64, gap_table, PlotKind, Table};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gapforge_core::covering::{build_erdos_covering_traced, build_randomized_covering, verify_covering};
use gapforge_core::crt::{brute_gap_check, certify_gap, lift_certificate, verify_certificate, CrtError};
use gapforge_core::hypercover::{
    check_hypotheses, generate_uniform_graph, greedy_color_matching, matching_bound, nibble_simulate, pj_recursion,
    random_sift_sim, validate_matching, HypothesisParams, SiftConfig,
};
use gapforge_core::kpower::{
    character_indicator, find_kth_power_in_gap, kpower_solvable, power_matrix, scan_rows, verify_winner_row,
    KPowerContext, MATRIX_BUDGET,
};
use gapforge_core::primes::{
    circle_identity_check, max_gap_with, optimize_eta, psi_exact_with, rankin_lower_bound, rankin_lower_bound_from_log,
    rankin_upper_bound, record_gaps_with, sieve_segment, theta_discrepancy, twin_constant,
};
use gapforge_core::special::{
    beatty_primes, continued_fraction, convergents, irrationality_type_estimate, ps_primes, restricted_column_scan,
    BeattyParams, ExactReal, PsExponent, SpecialFamily,
};
use gapforge_core::tuples::{
    first_primes_tuple, ik_jk_with, is_admissible, maynard_state, maynard_weight, power_closed_form, s_statistic,
    GpyConfig, LinearForm, LinearFormSet, MaynardConfig, SimplexFunction,
};
use gapforge_core::GapCertificate;
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(name = "gapforge", version, about = "Constructs and certifies long runs of composite numbers")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Write the JSON document to PATH; `-` or no value means stdout.
    #[arg(long, global = true, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
    pub json: Option<PathBuf>,
    /// Write the command's table as CSV to PATH; `-` or no value means stdout.
    #[arg(long, global = true, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
    pub csv: Option<PathBuf>,
    /// Seed for every random choice; required by stochastic commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses one per core. Never changes the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Record that the moduli in use are assumed good. Nothing checks this.
    #[arg(long, global = true)]
    pub assume_good_modulus: bool,
    /// Report wall-clock time on stderr.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prime gap statistics.
    #[command(subcommand)]
    Gaps(GapsCmd),
    /// Count smooth numbers and bound the count by Rankin's method.
    Smooth(SmoothArgs),
    /// Covering systems of congruences.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Gap certificates.
    #[command(subcommand)]
    Cert(CertCmd),
    /// Admissible tuples.
    #[command(subcommand)]
    Tuple(TupleCmd),
    /// Sieve weights.
    #[command(subcommand)]
    Sieve(SieveCmd),
    /// K-th power residues and power matrices.
    #[command(subcommand)]
    Kpower(KpowerCmd),
    /// Random hypergraph covering and colored matchings.
    #[command(subcommand)]
    Hyper(HyperCmd),
    /// Beatty and Piatetski-Shapiro sequences.
    #[command(subcommand)]
    Special(SpecialCmd),
}

#[derive(Debug, Subcommand)]
pub enum GapsCmd {
    /// Record (first-occurrence maximal) gaps up to a limit.
    Scan(LimitArgs),
    /// Largest gap between primes up to X.
    Max(XArgs),
    /// Rankin's lower-bound normalization at X.
    Rankin(RankinArgs),
    /// Record gaps as plot data.
    Plot(PlotArgs),
    /// Truncated twin-prime constant.
    Twin(TwinArgs),
    /// Both sides of the circle-method identity for prime pairs.
    Circle(CircleArgs),
    /// Largest discrepancy of primes in progressions up to Q.
    Theta(ThetaArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LimitArgs {
    #[arg(long)]
    pub limit: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct XArgs {
    #[arg(long)]
    pub x: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RankinArgs {
    /// The point X.
    #[arg(long, required_unless_present = "log_x", conflicts_with = "log_x")]
    pub x: Option<f64>,
    /// log X, for X beyond floating point range.
    #[arg(long)]
    pub log_x: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PlotArgs {
    #[arg(long)]
    pub limit: u64,
    #[arg(long, value_enum, default_value_t = PlotKind::Rankin)]
    pub kind: PlotKind,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TwinArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub limit: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CircleArgs {
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub l: u64,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ThetaArgs {
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub q: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SmoothArgs {
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub y: u64,
    /// Fixed exponent; optimized when absent.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Skip the exact count, for X too large to enumerate.
    #[arg(long)]
    pub bound_only: bool,
}

#[derive(Debug, Subcommand)]
pub enum CoverCmd {
    /// Build a covering of (0, Y] by primes below X.
    Build(CoverBuildArgs),
    /// Check that a covering file covers its interval.
    Verify(FileArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoverBuildArgs {
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub y: u64,
    /// Break greedy ties at random (needs --seed).
    #[arg(long)]
    pub randomized: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FileArgs {
    pub file: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum CertCmd {
    /// Turn a complete covering into a certificate.
    Make(CertMakeArgs),
    /// Check every witness of a certificate.
    Verify(FileArgs),
    /// Confirm the gap by locating the surrounding primes directly.
    Brute(FileArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CertMakeArgs {
    pub cover: PathBuf,
    /// Shift the origin by this many multiples of the modulus.
    #[arg(long, default_value_t = 1)]
    pub lift: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum TupleCmd {
    /// Check that comma-separated offsets are admissible.
    Check(TupleCheckArgs),
    /// First R primes above R, shifted to start at 0.
    Gen(TupleGenArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TupleCheckArgs {
    pub offsets: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TupleGenArgs {
    #[arg(long)]
    pub r: usize,
}

#[derive(Debug, Subcommand)]
pub enum SieveCmd {
    /// Weighted count of primes in translates over [N, 2N].
    Gpy(GpyArgs),
    /// Multidimensional sieve weights over a range of n.
    Maynard(MaynardArgs),
    /// Monte-Carlo estimate of the simplex integrals I_k and J_k.
    Ikjk(IkJkArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GpyArgs {
    #[arg(long = "N", alias = "n")]
    pub n: i64,
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub tuple: String,
    #[arg(long = "R", alias = "r")]
    pub r: f64,
    #[arg(long)]
    pub k: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MaynardArgs {
    /// Linear forms `a,b;a,b;...` meaning a n + b.
    #[arg(long, required_unless_present = "tuple", conflicts_with = "tuple")]
    pub forms: Option<String>,
    /// Offsets h meaning the forms n + h.
    #[arg(long)]
    pub tuple: Option<String>,
    #[arg(long = "R", alias = "r")]
    pub r: f64,
    /// Expected number of forms.
    #[arg(long)]
    pub k: Option<usize>,
    /// Exceptional modulus removed along with W.
    #[arg(long, default_value_t = 1)]
    pub b: u64,
    #[arg(long, default_value_t = 1)]
    pub from: i64,
    #[arg(long, default_value_t = 100)]
    pub to: i64,
    /// CSV file for the weights.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IkJkArgs {
    #[arg(long)]
    pub k: usize,
    /// F = (1 - sum t)^a; defaults to a = k.
    #[arg(long = "F", alias = "f")]
    pub a: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
}

#[derive(Debug, Subcommand)]
pub enum KpowerCmd {
    /// Whether n ≡ 1 - c^K (mod p) has a solution c.
    Solvable(SolvableArgs),
    /// Scan the rows of the power matrix built on a certificate.
    Matrix(MatrixArgs),
    /// First prime K-th power inside a certified gap.
    Find(FindArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolvableArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long = "K", alias = "k")]
    pub k: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub n: i64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MatrixArgs {
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long = "K", alias = "k")]
    pub k: u64,
    #[arg(long, default_value_t = 1000)]
    pub rows: u64,
    /// Extra columns to test by primality, comma separated.
    #[arg(long)]
    pub exceptional: Option<String>,
    /// CSV file with one line per row.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FindArgs {
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long = "K", alias = "k")]
    pub k: u64,
    #[arg(long, default_value_t = 1000)]
    pub rows: u64,
}

#[derive(Debug, Subcommand)]
pub enum HyperCmd {
    /// Survival probabilities from a degree table.
    Pj(PjArgs),
    /// Simulate layered random covering.
    Nibble(NibbleArgs),
    /// Check the hypotheses of the covering recursion on a model.
    Check(CheckArgs),
    /// Greedy color-distinct matching.
    Match(MatchArgs),
    /// Generate a uniform edge-colored graph.
    GenGraph(GenGraphArgs),
    /// Random sifting of the primes in (x, 2x].
    Sift(SiftArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PjArgs {
    /// CSV without header; row j holds the degrees of layer j by vertex.
    #[arg(long)]
    pub degrees: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NibbleArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub trials: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long = "D")]
    pub d_cap: f64,
    #[arg(long = "A")]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c0: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MatchArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long = "K", alias = "k")]
    pub k: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenGraphArgs {
    /// Number of colors N.
    #[arg(long = "N", alias = "n")]
    pub n: u32,
    /// Vertices per color; the graph has cN vertices.
    #[arg(long)]
    pub c: u32,
    #[arg(long = "K", alias = "k")]
    pub k: u32,
    /// Edges per color.
    #[arg(long)]
    pub t: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SiftArgs {
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub trials: u64,
}

#[derive(Debug, Subcommand)]
pub enum SpecialCmd {
    /// Primes of the form floor(alpha n + beta).
    Beatty(BeattyArgs),
    /// Primes of the form floor(l^c).
    Ps(PsArgs),
    /// Matrix winners whose base prime lies in a special sequence.
    Scan(ScanArgs),
    /// Continued fraction and irrationality estimate of a quadratic surd.
    Cf(CfArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BeattyArgs {
    /// `sqrt2`, `phi`, `(a+b*sqrtc)/d`, or a rational.
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long)]
    pub limit: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PsArgs {
    /// Exponent as a decimal or p/q.
    #[arg(long)]
    pub c: String,
    #[arg(long)]
    pub limit: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    All,
    Beatty,
    Ps,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long = "K", alias = "k")]
    pub k: u64,
    #[arg(long, value_enum, default_value_t = FamilyArg::All)]
    pub family: FamilyArg,
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long, default_value_t = 1000)]
    pub rows: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CfArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long, default_value_t = 40)]
    pub terms: usize,
}

/// Result of one command, before any output is written.
struct Outcome {
    /// Human-readable report, shown when stdout is not claimed by --json/--csv.
    text: String,
    /// Document for --json.
    doc: serde_json::Value,
    /// Table for --csv.
    table: Option<Table>,
    /// Files requested through command options, with their contents.
    files: Vec<(PathBuf, Vec<u8>)>,
    /// Set when a check ran and failed; the run exits 1 after writing output.
    failure: Option<String>,
}

impl Outcome {
    fn report(ctx: &Ctx, text: String, result: serde_json::Value) -> Self {
        let doc = ReportDoc { version: FORMAT_VERSION, manifest: ctx.manifest.clone(), result };
        Self {
            text,
            doc: serde_json::to_value(doc).expect("report serializes"),
            table: None,
            files: Vec::new(),
            failure: None,
        }
    }

    fn with_table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }

    fn fail_if(mut self, cond: bool, msg: impl FnOnce() -> String) -> Self {
        if cond {
            self.failure = Some(msg());
        }
        self
    }
}

struct Ctx {
    global: GlobalArgs,
    manifest: RunManifest,
    exec: PoolExecutor,
}

impl Ctx {
    fn seed(&self) -> CliResult<u64> {
        self.global.seed.ok_or_else(|| CliError::usage("this command is randomized and needs --seed"))
    }
}

fn table_bytes(t: &Table) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    t.write_csv(&mut buf)?;
    Ok(buf)
}

fn manifest_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn is_stdout(p: &Path) -> bool {
    p.as_os_str() == "-"
}

/// Parses `argv` (including the program name), runs the command and writes
/// results to `out`, diagnostics to `err`. Returns the exit code: 0 on
/// success, 1 when a verification fails, 2 on a usage error.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let (name, params) = describe(&cli.command);
    let mut assumptions = Vec::new();
    if cli.global.assume_good_modulus {
        assumptions.push("good-modulus".to_owned());
    }
    let manifest = RunManifest::new(name, params, cli.global.seed, assumptions);
    let exec = PoolExecutor::new(cli.global.jobs).map_err(CliError::usage)?;
    let ctx = Ctx { global: cli.global, manifest, exec };
    let start = Instant::now();
    let outcome = dispatch(&cli.command, &ctx)?;

    let stdout_claimed =
        ctx.global.json.as_deref().is_some_and(is_stdout) || ctx.global.csv.as_deref().is_some_and(is_stdout);
    let io = |source| CliError::Io { path: "<stdout>".into(), source };
    if let Some(path) = &ctx.global.json {
        let text = to_json_string(&outcome.doc);
        if is_stdout(path) {
            out.write_all(text.as_bytes()).map_err(io)?;
        } else {
            write_file(path, text.as_bytes())?;
        }
    }
    if let Some(path) = &ctx.global.csv {
        let table = outcome.table.as_ref().ok_or_else(|| CliError::usage(format!("`{name}` has no tabular output")))?;
        let bytes = table_bytes(table)?;
        if is_stdout(path) {
            out.write_all(&bytes).map_err(io)?;
        } else {
            write_file(path, &bytes)?;
            write_file(&manifest_path(path), to_json_string(&ctx.manifest).as_bytes())?;
        }
    }
    for (path, bytes) in &outcome.files {
        write_file(path, bytes)?;
    }
    if !stdout_claimed {
        out.write_all(outcome.text.as_bytes()).map_err(io)?;
    }
    if ctx.global.timing {
        let t = Timing::new(start.elapsed(), ctx.exec.threads());
        let _ = writeln!(err, "timing: {:.3} s on {} threads", t.seconds, t.threads);
    }
    match outcome.failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(0),
    }
}

fn params<T: Serialize>(a: &T) -> serde_json::Value {
    serde_json::to_value(a).expect("arguments serialize")
}

fn describe(cmd: &Command) -> (&'static str, serde_json::Value) {
    use Command::*;
    match cmd {
        Gaps(GapsCmd::Scan(a)) => ("gaps scan", params(a)),
        Gaps(GapsCmd::Max(a)) => ("gaps max", params(a)),
        Gaps(GapsCmd::Rankin(a)) => ("gaps rankin", params(a)),
        Gaps(GapsCmd::Plot(a)) => ("gaps plot", params(a)),
        Gaps(GapsCmd::Twin(a)) => ("gaps twin", params(a)),
        Gaps(GapsCmd::Circle(a)) => ("gaps circle", params(a)),
        Gaps(GapsCmd::Theta(a)) => ("gaps theta", params(a)),
        Smooth(a) => ("smooth", params(a)),
        Cover(CoverCmd::Build(a)) => ("cover build", params(a)),
        Cover(CoverCmd::Verify(a)) => ("cover verify", params(a)),
        Cert(CertCmd::Make(a)) => ("cert make", params(a)),
        Cert(CertCmd::Verify(a)) => ("cert verify", params(a)),
        Cert(CertCmd::Brute(a)) => ("cert brute", params(a)),
        Tuple(TupleCmd::Check(a)) => ("tuple check", params(a)),
        Tuple(TupleCmd::Gen(a)) => ("tuple gen", params(a)),
        Sieve(SieveCmd::Gpy(a)) => ("sieve gpy", params(a)),
        Sieve(SieveCmd::Maynard(a)) => ("sieve maynard", params(a)),
        Sieve(SieveCmd::Ikjk(a)) => ("sieve ikjk", params(a)),
        Kpower(KpowerCmd::Solvable(a)) => ("kpower solvable", params(a)),
        Kpower(KpowerCmd::Matrix(a)) => ("kpower matrix", params(a)),
        Kpower(KpowerCmd::Find(a)) => ("kpower find", params(a)),
        Hyper(HyperCmd::Pj(a)) => ("hyper pj", params(a)),
        Hyper(HyperCmd::Nibble(a)) => ("hyper nibble", params(a)),
        Hyper(HyperCmd::Check(a)) => ("hyper check", params(a)),
        Hyper(HyperCmd::Match(a)) => ("hyper match", params(a)),
        Hyper(HyperCmd::GenGraph(a)) => ("hyper gen-graph", params(a)),
        Hyper(HyperCmd::Sift(a)) => ("hyper sift", params(a)),
        Special(SpecialCmd::Beatty(a)) => ("special beatty", params(a)),
        Special(SpecialCmd::Ps(a)) => ("special ps", params(a)),
        Special(SpecialCmd::Scan(a)) => ("special scan", params(a)),
        Special(SpecialCmd::Cf(a)) => ("special cf", params(a)),
    }
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> CliResult<Outcome> {
    use Command::*;
    match cmd {
        Gaps(GapsCmd::Scan(a)) => gaps_scan(a, ctx),
        Gaps(GapsCmd::Max(a)) => gaps_max(a, ctx),
        Gaps(GapsCmd::Rankin(a)) => gaps_rankin(a, ctx),
        Gaps(GapsCmd::Plot(a)) => gaps_plot(a, ctx),
        Gaps(GapsCmd::Twin(a)) => gaps_twin(a, ctx),
        Gaps(GapsCmd::Circle(a)) => gaps_circle(a, ctx),
        Gaps(GapsCmd::Theta(a)) => gaps_theta(a, ctx),
        Smooth(a) => smooth(a, ctx),
        Cover(CoverCmd::Build(a)) => cover_build(a, ctx),
        Cover(CoverCmd::Verify(a)) => cover_verify(a, ctx),
        Cert(CertCmd::Make(a)) => cert_make(a, ctx),
        Cert(CertCmd::Verify(a)) => cert_verify(a, ctx),
        Cert(CertCmd::Brute(a)) => cert_brute(a, ctx),
        Tuple(TupleCmd::Check(a)) => tuple_check(a, ctx),
        Tuple(TupleCmd::Gen(a)) => tuple_gen(a, ctx),
        Sieve(SieveCmd::Gpy(a)) => sieve_gpy(a, ctx),
        Sieve(SieveCmd::Maynard(a)) => sieve_maynard(a, ctx),
        Sieve(SieveCmd::Ikjk(a)) => sieve_ikjk(a, ctx),
        Kpower(KpowerCmd::Solvable(a)) => kpower_solvable_cmd(a, ctx),
        Kpower(KpowerCmd::Matrix(a)) => kpower_matrix(a, ctx),
        Kpower(KpowerCmd::Find(a)) => kpower_find(a, ctx),
        Hyper(HyperCmd::Pj(a)) => hyper_pj(a, ctx),
        Hyper(HyperCmd::Nibble(a)) => hyper_nibble(a, ctx),
        Hyper(HyperCmd::Check(a)) => hyper_check(a, ctx),
        Hyper(HyperCmd::Match(a)) => hyper_match(a, ctx),
        Hyper(HyperCmd::GenGraph(a)) => hyper_gen_graph(a, ctx),
        Hyper(HyperCmd::Sift(a)) => hyper_sift(a, ctx),
        Special(SpecialCmd::Beatty(a)) => special_beatty(a, ctx),
        Special(SpecialCmd::Ps(a)) => special_ps(a, ctx),
        Special(SpecialCmd::Scan(a)) => special_scan(a, ctx),
        Special(SpecialCmd::Cf(a)) => special_cf(a, ctx),
    }
}

// ---- argument helpers ----

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|e| CliError::Usage(format!("bad {what} {t:?}: {e}"))))
        .collect()
}

fn parse_forms(s: &str) -> CliResult<Vec<LinearForm>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let v: Vec<i64> = parse_list(t, "form coefficient")?;
            match v[..] {
                [a, b] => Ok(LinearForm { a, b }),
                _ => Err(CliError::Usage(format!("form {t:?} must be `a,b`"))),
            }
        })
        .collect()
}

fn parse_real(s: &str) -> CliResult<ExactReal> {
    s.parse().map_err(CliError::usage)
}

fn parse_beta(s: &str) -> CliResult<(i128, i128)> {
    let v = parse_real(s)?;
    if !v.is_rational() {
        return Err(CliError::Usage(format!("beta must be rational, got {s:?}")));
    }
    Ok((v.a, v.d))
}

fn load_cert(path: &Path) -> CliResult<GapCertificate> {
    read_json::<CertDoc>(path)?.to_certificate()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

// ---- gaps ----

fn gap_json(r: &gapforge_core::GapRecord) -> serde_json::Value {
    json!({"p_lo": r.p_lo, "p_hi": r.p_hi, "gap": r.gap, "merit": r.merit, "rankin_merit": r.rankin_merit})
}

fn gaps_scan(a: &LimitArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let records = record_gaps_with(a.limit, &ctx.exec);
    let mut text = String::new();
    for r in &records {
        let rm = r.rankin_merit.map(fmt_f64).unwrap_or_else(|| "-".into());
        let _ = writeln!(text, "{} {} {} {:.4} {}", r.p_lo, r.p_hi, r.gap, r.merit, rm);
    }
    let result = json!({"limit": a.limit, "records": records.iter().map(gap_json).collect::<Vec<_>>()});
    Ok(Outcome::report(ctx, text, result).with_table(gap_table(&records, PlotKind::Full)))
}

fn gaps_max(a: &XArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let r = max_gap_with(a.x, &ctx.exec).ok_or_else(|| CliError::usage("X must be at least 3"))?;
    let text = format!("G({}) = {} at ({}, {})\n", a.x, r.gap, r.p_lo, r.p_hi);
    Ok(Outcome::report(ctx, text, gap_json(&r)).with_table(gap_table(&[r], PlotKind::Full)))
}

fn gaps_rankin(a: &RankinArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let v = match (a.x, a.log_x) {
        (Some(x), None) => rankin_lower_bound(x),
        (None, Some(l)) => rankin_lower_bound_from_log(l),
        _ => return Err(CliError::usage("give exactly one of --x and --log-x")),
    }
    .map_err(CliError::usage)?;
    Ok(Outcome::report(ctx, format!("{}\n", fmt_f64(v)), json!({"x": a.x, "log_x": a.log_x, "bound": v})))
}

fn gaps_plot(a: &PlotArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let records = record_gaps_with(a.limit, &ctx.exec);
    let mut buf = Vec::new();
    crate::plot::emit_plotdata(&records, a.kind, &mut buf)?;
    let text = String::from_utf8(buf).expect("csv is utf-8");
    let result = json!({"kind": a.kind, "records": records.iter().map(gap_json).collect::<Vec<_>>()});
    Ok(Outcome::report(ctx, text, result).with_table(gap_table(&records, a.kind)))
}

fn gaps_twin(a: &TwinArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let v = twin_constant(a.limit);
    Ok(Outcome::report(ctx, format!("{}\n", fmt_f64(v)), json!({"limit": a.limit, "value": v})))
}

fn gaps_circle(a: &CircleArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let c = circle_identity_check(a.x, a.l).map_err(CliError::usage)?;
    let rel = c.relative_error();
    let text = format!("lhs {}\nrhs {}\nrelative error {:e}\n", fmt_f64(c.lhs), fmt_f64(c.rhs), rel);
    let out = Outcome::report(ctx, text, json!({"lhs": c.lhs, "rhs": c.rhs, "relative_error": rel}));
    Ok(out.fail_if(!(rel <= a.tol), || format!("relative error {rel:e} exceeds {:e}", a.tol)))
}

fn gaps_theta(a: &ThetaArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let v = theta_discrepancy(a.x, a.q);
    Ok(Outcome::report(ctx, format!("{}\n", fmt_f64(v)), json!({"x": a.x, "q": a.q, "discrepancy": v})))
}

fn smooth(a: &SmoothArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let (eta, bound) = match a.eta {
        Some(eta) => (eta, rankin_upper_bound(a.x as f64, a.y, eta).map_err(CliError::usage)?),
        None => {
            let o = optimize_eta(a.x as f64, a.y).map_err(CliError::usage)?;
            (o.eta, rankin_upper_bound(a.x as f64, a.y, o.eta).map_err(CliError::usage)?)
        }
    };
    let psi = (!a.bound_only).then(|| psi_exact_with(a.x, a.y, &ctx.exec));
    let mut text = String::new();
    if let Some(p) = psi {
        let _ = writeln!(text, "psi({}, {}) = {p}", a.x, a.y);
    }
    let _ = writeln!(text, "bound {} at eta {}", fmt_f64(bound.value), fmt_f64(eta));
    let result =
        json!({"x": a.x, "y": a.y, "psi": psi, "eta": eta, "bound": bound.value, "log_bound": bound.log_value});
    let out = Outcome::report(ctx, text, result);
    Ok(out.fail_if(psi.is_some_and(|p| bound.value < p as f64), || "bound is below the exact count".into()))
}

// ---- covering and certificates ----

fn cover_build(a: &CoverBuildArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let (cs, trace) = if a.randomized {
        (build_randomized_covering(a.x, a.y, ctx.seed()?), Vec::new())
    } else {
        build_erdos_covering_traced(a.x, a.y)
    };
    let mut text = format!("x {} y {} classes {} complete {}\n", cs.x, cs.y, cs.classes.len(), cs.complete);
    for t in &trace {
        let _ = writeln!(text, "after stage {}: {} uncovered", t.stage.label(), t.residual_after.len());
    }
    if let Some(u) = verify_covering(&cs).first_uncovered {
        let _ = writeln!(text, "first uncovered {u}");
    }
    let mut table = Table::new(&["p", "h", "stage"]);
    for c in &cs.classes {
        table.push(vec![c.modulus.to_string(), c.residue.to_string(), c.stage.label().to_string()]);
    }
    let doc = CoverDoc::from_system(&cs, Some(ctx.manifest.clone()));
    Ok(Outcome {
        text,
        doc: serde_json::to_value(doc).expect("cover serializes"),
        table: Some(table),
        files: Vec::new(),
        failure: None,
    })
}

fn cover_verify(a: &FileArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let doc: CoverDoc = read_json(&a.file)?;
    let cs = doc.to_system()?;
    let cov = verify_covering(&cs);
    let text = match cov.first_uncovered {
        None => format!("complete: every u in (0, {}] is covered\n", cs.y),
        Some(u) => format!("incomplete: {u} is not covered\n"),
    };
    let out = Outcome::report(
        ctx,
        text,
        json!({"complete": cov.is_complete(), "first_uncovered": cov.first_uncovered, "claimed": doc.complete}),
    );
    Ok(match cov.first_uncovered {
        Some(u) => out.fail_if(true, || format!("{u} is not covered")),
        None => out.fail_if(!doc.complete, || "file claims the covering is incomplete".into()),
    })
}

fn cert_make(a: &CertMakeArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let cs = read_json::<CoverDoc>(&a.cover)?.to_system()?;
    let cert = match certify_gap(&cs) {
        Ok(c) => c,
        Err(e @ CrtError::Incomplete { .. }) => return Err(CliError::Verification(e.to_string())),
        Err(CrtError::ZeroOrigin) if a.lift > 0 => {
            // m0 = 0 is still a valid origin once lifted.
            let (m0, modulus) = gapforge_core::crt::crt_assemble(
                &cs.classes.iter().map(|c| ((c.modulus - c.residue) % c.modulus, c.modulus)).collect::<Vec<_>>(),
            )
            .map_err(CliError::usage)?;
            let witnesses = (1..=cs.y).map(|u| (u, cs.witness(u).expect("complete"))).collect();
            GapCertificate { x: cs.x, y: cs.y, modulus, m0, witnesses }
        }
        Err(e) => return Err(CliError::usage(e)),
    };
    let cert = lift_certificate(&cert, a.lift);
    let digits = cert.m0.to_string().len();
    let text = format!("certificate for y = {} with m0 of {} digits\n", cert.y, digits);
    let doc = CertDoc::from_certificate(&cert, Some(ctx.manifest.clone()));
    let mut files = Vec::new();
    if let Some(p) = &a.out {
        files.push((p.clone(), to_json_string(&doc).into_bytes()));
    }
    Ok(Outcome { text, doc: serde_json::to_value(doc).expect("cert serializes"), table: None, files, failure: None })
}

fn cert_verify(a: &FileArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let cert = load_cert(&a.file)?;
    Ok(match verify_certificate(&cert) {
        Ok(()) => {
            Outcome::report(ctx, format!("valid: m0 + u is composite for u = 1..={}\n", cert.y), json!({"valid": true}))
        }
        Err(f) => {
            let reason = format!("{:?}", f.reason);
            let text = format!("invalid at offset {}: {reason}\n", f.offset);
            Outcome::report(ctx, text, json!({"valid": false, "offset": f.offset, "reason": reason}))
                .fail_if(true, || format!("offset {} fails: {reason}", f.offset))
        }
    })
}

fn cert_brute(a: &FileArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let cert = load_cert(&a.file)?;
    match brute_gap_check(&cert) {
        Ok(r) => {
            let text = format!("primes {} and {} are consecutive, gap {}\n", r.p_lo, r.p_hi, r.gap);
            Ok(Outcome::report(ctx, text, gap_json(&r)))
        }
        Err(e @ CrtError::GapTooSmall { .. }) => Err(CliError::Verification(e.to_string())),
        Err(e) => Err(CliError::usage(e)),
    }
}

// ---- tuples and sieve weights ----

fn tuple_check(a: &TupleCheckArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let offsets: Vec<i64> = parse_list(&a.offsets, "offset")?;
    let ok = is_admissible(&offsets);
    // The obstruction, if any, is a prime no larger than the tuple length.
    let blocking = sieve_segment(0, offsets.len() as u64 + 1).into_iter().find(|&p| {
        let hit: BTreeSet<i64> = offsets.iter().map(|h| h.rem_euclid(p as i64)).collect();
        hit.len() as u64 == p
    });
    let text = match blocking {
        None => "admissible\n".to_owned(),
        Some(p) => format!("not admissible: the offsets fill every class mod {p}\n"),
    };
    let out = Outcome::report(ctx, text, json!({"offsets": offsets, "admissible": ok, "blocking_prime": blocking}));
    Ok(out.fail_if(!ok, || "tuple is not admissible".into()))
}

fn tuple_gen(a: &TupleGenArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let t = first_primes_tuple(a.r);
    Ok(Outcome::report(ctx, format!("{}\n", join(&t)), json!({"offsets": t})))
}

fn sieve_gpy(a: &GpyArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let offsets: Vec<i64> = parse_list(&a.tuple, "offset")?;
    let s = s_statistic(a.n, a.rho, &offsets, &GpyConfig { r: a.r, k: a.k });
    let text = format!("S = {}\nwitness {}\n", fmt_f64(s.s), s.witness.map_or("-".into(), |w| w.to_string()));
    Ok(Outcome::report(ctx, text, json!({"s": s.s, "witness": s.witness})))
}

fn sieve_maynard(a: &MaynardArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let forms = match (&a.forms, &a.tuple) {
        (Some(f), None) => LinearFormSet::new(parse_forms(f)?),
        (None, Some(t)) => LinearFormSet::from_offsets(&parse_list::<i64>(t, "offset")?),
        _ => return Err(CliError::usage("give exactly one of --forms and --tuple")),
    }
    .map_err(CliError::usage)?;
    if let Some(k) = a.k.filter(|&k| k != forms.k()) {
        return Err(CliError::Usage(format!("--k {k} but {} forms were given", forms.k())));
    }
    if a.from > a.to {
        return Err(CliError::usage("--from must not exceed --to"));
    }
    let mut cfg = MaynardConfig::new(forms.k(), a.r);
    cfg.b = a.b;
    let state = maynard_state(&forms, &cfg).map_err(CliError::usage)?;
    let mut table = Table::new(&["n", "weight"]);
    let mut weights = Vec::new();
    for n in a.from..=a.to {
        let w = maynard_weight(n, &state);
        table.push(vec![n.to_string(), fmt_f64(w)]);
        weights.push(json!([n, w]));
    }
    let mut text = format!(
        "k {} W {} singular series {} support {}\n",
        forms.k(),
        state.w.value,
        fmt_f64(state.singular_wb),
        state.support().count()
    );
    if let Some(p) = forms.fixed_prime_divisor() {
        let _ = writeln!(text, "fixed prime divisor {p}: every weight vanishes");
    }
    let mut out = Outcome::report(
        ctx,
        text,
        json!({"k": forms.k(), "fixed_prime_divisor": forms.fixed_prime_divisor(), "singular_series": state.singular_wb, "weights": weights}),
    );
    if let Some(p) = &a.emit {
        out.files.push((p.clone(), table_bytes(&table)?));
        out.files.push((manifest_path(p), to_json_string(&ctx.manifest).into_bytes()));
    }
    Ok(out.with_table(table))
}

fn sieve_ikjk(a: &IkJkArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let seed = ctx.seed()?;
    if a.k == 0 {
        return Err(CliError::usage("k must be positive"));
    }
    let exponent = a.a.unwrap_or(a.k as f64);
    let f = SimplexFunction::Power { exponent };
    let est = ik_jk_with(&f, a.k, a.samples, seed, &ctx.exec);
    let (ci, cj) = power_closed_form(a.k, exponent);
    let text = format!(
        "I_k {} ± {} (exact {})\nJ_k {} ± {} (exact {})\n",
        fmt_f64(est.i),
        fmt_f64(est.i_se),
        fmt_f64(ci),
        fmt_f64(est.j),
        fmt_f64(est.j_se),
        fmt_f64(cj)
    );
    let result = json!({"k": a.k, "exponent": exponent, "samples": a.samples, "i": est.i, "i_se": est.i_se,
        "j": est.j, "j_se": est.j_se, "i_exact": ci, "j_exact": cj, "ratio": est.ratio()});
    Ok(Outcome::report(ctx, text, result))
}

// ---- K-th powers ----

fn kpower_solvable_cmd(a: &SolvableArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let kc = KPowerContext::new(a.p, a.k).map_err(CliError::usage)?;
    let solvable = kpower_solvable(a.n, &kc);
    let indicator = character_indicator(a.n, &kc);
    let text = format!("{}\n", if solvable { "solvable" } else { "not solvable" });
    let out = Outcome::report(
        ctx,
        text,
        json!({"p": a.p, "k": a.k, "n": a.n, "solvable": solvable, "character_indicator": indicator}),
    );
    Ok(out.fail_if((indicator > 0.5) != solvable, || "character sum disagrees with the index criterion".into()))
}

fn kpower_matrix(a: &MatrixArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let cert = load_cert(&a.cert)?;
    let m = power_matrix(&cert, a.k, a.rows, MATRIX_BUDGET).map_err(CliError::usage)?;
    let extra: BTreeSet<u64> = match &a.exceptional {
        Some(s) => parse_list::<u64>(s, "column")?.into_iter().collect(),
        None => BTreeSet::new(),
    };
    let scan = scan_rows(&m, &extra);
    let mut table = Table::new(&["row", "base", "status"]);
    let r0: BTreeSet<u64> = scan.r0.iter().copied().collect();
    let r1: BTreeSet<u64> = scan.r1.iter().copied().collect();
    for r in 1..=m.rows {
        let status = if !r0.contains(&r) {
            "composite_base"
        } else if r1.contains(&r) {
            "prime_in_row"
        } else {
            "winner"
        };
        table.push(vec![r.to_string(), m.base(r).to_string(), status.to_owned()]);
    }
    let bad: Vec<u64> = scan.winners.iter().copied().filter(|&r| !verify_winner_row(&m, r)).collect();
    let text = format!(
        "rows {} prime bases {} with prime entries {} winners {}\n",
        m.rows,
        scan.r0.len(),
        scan.r1.len(),
        scan.winners.len()
    );
    let result = json!({"rows": m.rows, "y": m.y, "k": m.k, "m0": m.m0.to_string(), "r0": scan.r0, "r1": scan.r1,
        "winners": scan.winners, "exceptional": scan.exceptional});
    let mut out = Outcome::report(ctx, text, result);
    if let Some(p) = &a.report {
        out.files.push((p.clone(), table_bytes(&table)?));
        out.files.push((manifest_path(p), to_json_string(&ctx.manifest).into_bytes()));
    }
    Ok(out.with_table(table).fail_if(!bad.is_empty(), || format!("winner rows fail re-verification: {}", join(&bad))))
}

fn kpower_find(a: &FindArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let cert = load_cert(&a.cert)?;
    let found = find_kth_power_in_gap(&cert, a.k, a.rows).map_err(CliError::usage)?;
    Ok(match found {
        Some(f) => {
            let text = format!("{}^{} = {}\nbetween primes {} and {}\n", f.q, f.k, f.power, f.p_lo, f.p_hi);
            let result = json!({"row": f.row, "q": f.q.to_string(), "k": f.k, "power": f.power.to_string(),
                "p_lo": f.p_lo.to_string(), "p_hi": f.p_hi.to_string()});
            Outcome::report(ctx, text, result)
        }
        None => Outcome::report(ctx, "no winner row\n".into(), json!(null))
            .fail_if(true, || format!("no winning row among {} rows", a.rows)),
    })
}

// ---- hypergraph covering ----

fn hyper_pj(a: &PjArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(&a.degrees)
        .map_err(|e| CliError::Usage(format!("{}: {e}", a.degrees.display())))?;
    let mut degrees: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Usage(format!("{}: {e}", a.degrees.display())))?;
        let row = rec
            .iter()
            .map(|v| v.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("bad degree {v:?}: {e}"))))
            .collect::<CliResult<Vec<_>>>()?;
        degrees.push(row);
    }
    if degrees.iter().any(|r| r.len() != degrees[0].len()) {
        return Err(CliError::usage("every layer needs one degree per vertex"));
    }
    let t = pj_recursion(&degrees);
    let mut table = Table::new(&["j", "min", "mean"]);
    let mut text = String::new();
    for j in 0..t.p.len() {
        table.push(vec![j.to_string(), fmt_f64(t.min(j)), fmt_f64(t.mean(j))]);
        let _ = writeln!(text, "P_{j}: min {} mean {}", fmt_f64(t.min(j)), fmt_f64(t.mean(j)));
    }
    Ok(Outcome::report(ctx, text, json!({"p": t.p})).with_table(table))
}

fn hyper_nibble(a: &NibbleArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let seed = ctx.seed()?;
    let model = read_json::<ModelDoc>(&a.model)?.to_model()?;
    let layers = nibble_simulate(&model, a.m, a.trials, seed, &ctx.exec).map_err(CliError::usage)?;
    let mut table = Table::new(&["layer", "empirical", "std_error", "predicted", "reference", "z"]);
    let mut text = String::new();
    for l in &layers {
        table.push(vec![
            l.layer.to_string(),
            fmt_f64(l.empirical),
            fmt_f64(l.std_error),
            fmt_f64(l.predicted),
            fmt_f64(l.reference),
            fmt_f64(l.z_score()),
        ]);
        let _ = writeln!(
            text,
            "layer {}: survived {:.6} ± {:.6}, predicted {:.6}, z {:.2}",
            l.layer,
            l.empirical,
            l.std_error,
            l.predicted,
            l.z_score()
        );
    }
    let rows: Vec<_> = layers
        .iter()
        .map(|l| json!({"layer": l.layer, "empirical": l.empirical, "std_error": l.std_error, "predicted": l.predicted, "reference": l.reference}))
        .collect();
    Ok(Outcome::report(ctx, text, json!({"layers": rows})).with_table(table))
}

fn hyper_check(a: &CheckArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let model = read_json::<ModelDoc>(&a.model)?.to_model()?;
    let hp = HypothesisParams { delta: a.delta, kappa: a.kappa, d_cap: a.d_cap, a: a.a, m: a.m, c0: a.c0 };
    let report = check_hypotheses(&model, &hp).map_err(CliError::usage)?;
    let mut table = Table::new(&["name", "layer", "value", "bound", "pass"]);
    let mut text = String::new();
    for c in &report.checks {
        let layer = c.layer.map_or_else(String::new, |l| l.to_string());
        table.push(vec![c.name.to_string(), layer.clone(), fmt_f64(c.value), fmt_f64(c.bound), c.pass.to_string()]);
        let _ = writeln!(
            text,
            "{} layer {}: {} vs {} {}",
            c.name,
            if layer.is_empty() { "-" } else { &layer },
            fmt_f64(c.value),
            fmt_f64(c.bound),
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    let checks: Vec<_> = report
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "layer": c.layer, "value": c.value, "bound": c.bound, "pass": c.pass}))
        .collect();
    let out = Outcome::report(
        ctx,
        text,
        json!({"checks": checks, "all_pass": report.all_pass(), "variance_warning": report.variance_warning}),
    );
    Ok(out.with_table(table).fail_if(!report.all_pass(), || "some hypotheses fail".into()))
}

fn hyper_match(a: &MatchArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let g = read_json::<GraphDoc>(&a.graph)?.to_graph()?;
    if a.k == 0 || g.n_colors % a.k != 0 {
        return Err(CliError::usage("K must divide the number of colors"));
    }
    let m = greedy_color_matching(&g, a.k);
    let valid = validate_matching(&g, &m);
    let c = g.n_vertices as f64 / g.n_colors.max(1) as f64;
    let bound = matching_bound(g.n_colors, c, a.k);
    let text =
        format!("matching of size {} (bound {}), blocks {}\n", m.edges.len(), fmt_f64(bound), join(&m.block_sizes));
    let result =
        json!({"size": m.edges.len(), "edges": m.edges, "block_sizes": m.block_sizes, "bound": bound, "valid": valid});
    Ok(Outcome::report(ctx, text, result).fail_if(!valid, || "matching reuses a vertex or color".into()))
}

fn hyper_gen_graph(a: &GenGraphArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let seed = ctx.seed()?;
    let g = generate_uniform_graph(a.n, a.c, a.k, a.t, seed).map_err(CliError::usage)?;
    let doc = GraphDoc::from_graph(&g, Some(ctx.manifest.clone()));
    let text = format!("{} vertices, {} colors, {} edges\n", g.n_vertices, g.n_colors, g.edges.len());
    let mut files = Vec::new();
    if let Some(p) = &a.out {
        files.push((p.clone(), to_json_string(&doc).into_bytes()));
    }
    let mut table = Table::new(&["a", "b", "color"]);
    for &(x, y, c) in &g.edges {
        table.push(vec![x.to_string(), y.to_string(), c.to_string()]);
    }
    Ok(Outcome {
        text,
        doc: serde_json::to_value(doc).expect("graph serializes"),
        table: Some(table),
        files,
        failure: None,
    })
}

fn hyper_sift(a: &SiftArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let seed = ctx.seed()?;
    let cfg = SiftConfig::desk(a.x);
    let r = random_sift_sim(&cfg, a.trials, seed, &ctx.exec);
    let mut text = format!(
        "sigma {} expected survivors {} mean {} variance {}\n",
        fmt_f64(r.sigma),
        fmt_f64(r.expected_survivors),
        fmt_f64(r.mean_survivors),
        fmt_f64(r.var_survivors)
    );
    let mut probes = Vec::new();
    for p in &r.probes {
        let _ = writeln!(
            text,
            "tuple {}: {} ± {} exact {}",
            join(&p.tuple),
            fmt_f64(p.empirical),
            fmt_f64(p.std_error),
            fmt_f64(p.exact)
        );
        probes.push(json!({"tuple": p.tuple, "empirical": p.empirical, "std_error": p.std_error, "exact": p.exact, "sigma_power": p.sigma_power}));
    }
    let result = json!({"sigma": r.sigma, "expected_survivors": r.expected_survivors, "mean_survivors": r.mean_survivors,
        "var_survivors": r.var_survivors, "probes": probes});
    Ok(Outcome::report(ctx, text, result))
}

// ---- special sequences ----

fn prime_index_table(rows: &[(u64, u64)], index_name: &'static str) -> Table {
    let mut t = Table::new(&["prime", index_name]);
    for &(p, i) in rows {
        t.push(vec![p.to_string(), i.to_string()]);
    }
    t
}

fn special_beatty(a: &BeattyArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let params = BeattyParams::new(parse_real(&a.alpha)?, parse_beta(&a.beta)?).map_err(CliError::usage)?;
    let primes = beatty_primes(a.limit, &params).map_err(CliError::usage)?;
    let text = format!("{}\n", primes.iter().map(|p| p.0.to_string()).collect::<Vec<_>>().join(" "));
    Ok(Outcome::report(ctx, text, json!({"primes": primes})).with_table(prime_index_table(&primes, "n")))
}

fn special_ps(a: &PsArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let c: PsExponent = a.c.parse().map_err(CliError::usage)?;
    let primes = ps_primes(a.limit, c);
    let text = format!("{}\n", primes.iter().map(|p| p.0.to_string()).collect::<Vec<_>>().join(" "));
    Ok(Outcome::report(ctx, text, json!({"c": [c.p, c.q], "primes": primes}))
        .with_table(prime_index_table(&primes, "l")))
}

fn special_scan(a: &ScanArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let family = match a.family {
        FamilyArg::All => SpecialFamily::AllPrimes,
        FamilyArg::Beatty => {
            let alpha = a.alpha.as_deref().ok_or_else(|| CliError::usage("--family beatty needs --alpha"))?;
            SpecialFamily::Beatty(BeattyParams::new(parse_real(alpha)?, parse_beta(&a.beta)?).map_err(CliError::usage)?)
        }
        FamilyArg::Ps => {
            let c = a.c.as_deref().ok_or_else(|| CliError::usage("--family ps needs --c"))?;
            SpecialFamily::PiatetskiShapiro(c.parse().map_err(CliError::usage)?)
        }
    };
    let cert = load_cert(&a.cert)?;
    let m = power_matrix(&cert, a.k, a.rows, MATRIX_BUDGET).map_err(CliError::usage)?;
    let scan = scan_rows(&m, &BTreeSet::new());
    let hits = restricted_column_scan(&m, &scan, &family).map_err(CliError::usage)?;
    let mut table = Table::new(&["row", "base", "index"]);
    for &(r, i) in &hits {
        table.push(vec![r.to_string(), m.base(r).to_string(), i.to_string()]);
    }
    let text = format!("{} winners, {} in the family\n", scan.winners.len(), hits.len());
    let result = json!({"winners": scan.winners, "hits": hits.iter().map(|&(r, i)| json!({"row": r, "base": m.base(r).to_string(), "index": i.to_string()})).collect::<Vec<_>>()});
    Ok(Outcome::report(ctx, text, result).with_table(table))
}

fn special_cf(a: &CfArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let x = parse_real(&a.x)?;
    let cf = continued_fraction(&x, a.terms).map_err(CliError::usage)?;
    let conv = convergents(&cf.terms).map_err(CliError::usage)?;
    let estimate = if cf.terminated { None } else { irrationality_type_estimate(&x, a.terms).ok() };
    let mut text = format!("[{}]{}\n", join(&cf.terms), if cf.terminated { " (rational)" } else { "" });
    if let Some(e) = estimate {
        let _ = writeln!(text, "irrationality type estimate {}", fmt_f64(e));
    }
    let conv_s: Vec<(String, String)> = conv.iter().map(|&(p, q)| (p.to_string(), q.to_string())).collect();
    let result = json!({"terms": cf.terms.iter().map(|t| t.to_string()).collect::<Vec<_>>(), "terminated": cf.terminated,
        "convergents": conv_s, "irrationality_estimate": estimate});
    let mut table = Table::new(&["k", "a_k", "p_k", "q_k"]);
    for (i, (t, (p, q))) in cf.terms.iter().zip(&conv).enumerate() {
        table.push(vec![i.to_string(), t.to_string(), p.to_string(), q.to_string()]);
    }
    Ok(Outcome::report(ctx, text, result).with_table(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("gapforge").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn scan_to_stdout_csv() {
        let (code, out, _) = run_capture(&["gaps", "scan", "--limit", "1000", "--csv", "-"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("p_lo,p_hi,gap,merit,rankin_merit\n2,3,1,"));
    }

    #[test]
    fn missing_seed_is_usage_error() {
        let (code, _, err) = run_capture(&["hyper", "nibble", "--model", "m.json", "--m", "1", "--trials", "5"]);
        assert_eq!(code, 2);
        assert!(err.contains("--seed"));
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        assert_eq!(run_capture(&["gaps", "frobnicate"]).0, 2);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn forms_parse() {
        assert_eq!(parse_forms("1,0; 2,1").unwrap(), vec![LinearForm { a: 1, b: 0 }, LinearForm { a: 2, b: 1 }]);
        assert!(parse_forms("1,2,3").is_err());
        assert_eq!(parse_beta("-1/2").unwrap(), (-1, 2));
        assert!(parse_beta("sqrt2").is_err());
    }
}

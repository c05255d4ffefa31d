//! The `rieffel` command line: configuration, verification suites, scans and
//! one-off evaluations. Exit codes: 0 pass, 1 check failure, 2 unknown
//! command or suite, 3 invalid configuration, 4 I/O.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::DeformError;
use crate::field::{geometric_grid, norm_bracket, refine_grid, state_field_scan, NormBracket, Section};
use crate::frame::DeformationData;
use crate::lattice::{FourierElement, LatticeIndex};
use crate::oracle::{default_golden_path, embedded_goldens, generate_goldens, load_goldens, write_goldens, QuadratureConfig};
use crate::product::{star_product, TWIST_CONVENTION};
use crate::smoothing::smooth;
use crate::states::{evaluate, MomentState};
use crate::suites::{run_suite, SUITES};
use crate::VERSION;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "rieffel", version, about = "Deformation quantization of the torus and deformed states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: stdout, or the configured output path).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the randomized suites (overrides the configuration).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification suite: product, smoothing, wick, states, field, oracle.
    Verify {
        suite: String,
        /// Regenerate the oracle goldens before comparing.
        #[arg(long)]
        recalibrate: bool,
    },
    /// State-field scan over an ℏ grid, as CSV.
    Scan,
    /// Norm brackets over ℏ values and cutoffs, as JSON.
    Norms,
    /// One-off deformed product `element ⋆ other`.
    Star,
    /// One-off smoothing `S_ℏ element`.
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// Defaults to CSV for `scan` and JSON for `norms`.
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

/// Either explicit ℏ values or a geometric grid with midpoint refinements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum GridSpec {
    Values { values: Vec<f64> },
    Geometric {
        levels: usize,
        #[serde(default)]
        refinements: usize,
    },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Geometric { levels: 10, refinements: 0 }
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            GridSpec::Values { values } => values.clone(),
            GridSpec::Geometric { levels, refinements } => {
                (0..*refinements).fold(geometric_grid(*levels), |g, _| refine_grid(&g))
            }
        }
    }
}

fn default_deformation() -> DeformationData {
    DeformationData::standard(1, 0.5).expect("standard data")
}

fn default_state() -> MomentState {
    MomentState::point(vec![0.0, 0.0]).expect("origin")
}

fn default_hbars() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}

fn default_cutoffs() -> Vec<usize> {
    vec![4, 8, 16]
}

/// Every field is optional; see the README for the schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_deformation")]
    pub deformation: DeformationData,
    #[serde(default = "default_state")]
    pub state: MomentState,
    /// Defaults to `e_{(1,0,…)}`.
    #[serde(default)]
    pub element: Option<FourierElement>,
    /// Right factor for `star`; defaults to `element`.
    #[serde(default)]
    pub other: Option<FourierElement>,
    /// Defaults to the constant section of `element`.
    #[serde(default)]
    pub section: Option<Section>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_hbars")]
    pub hbars: Vec<f64>,
    #[serde(default = "default_cutoffs")]
    pub cutoffs: Vec<usize>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: u64,
    /// Golden file for the oracle suite; defaults to the one compiled in
    /// (and, with `--recalibrate`, to the source tree copy).
    #[serde(default)]
    pub goldens: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields default")
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, DeformError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| DeformError::InvalidArgument(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn element(&self) -> FourierElement {
        self.element.clone().unwrap_or_else(|| {
            let n = self.deformation.dim();
            FourierElement::mode(n, LatticeIndex::unit(2 * n, 0))
        })
    }

    pub fn section(&self) -> Section {
        self.section.clone().unwrap_or_else(|| Section::constant(self.element()))
    }

    /// Checks that every descriptor matches the deformation's dimension.
    pub fn validate(&self) -> Result<(), DeformError> {
        let n = self.deformation.dim();
        for a in [&self.element, &self.other].into_iter().flatten() {
            if a.dim() != n {
                return Err(DeformError::DimensionMismatch { expected: n, got: a.dim() });
            }
        }
        if let Some(s) = &self.section {
            if s.dim() != n {
                return Err(DeformError::DimensionMismatch { expected: n, got: s.dim() });
            }
        }
        evaluate(&self.state, &FourierElement::one(n))?;
        crate::field::validate_grid(&self.grid.points())?;
        if let Some(h) = self.hbars.iter().find(|h| !(**h >= 0.0 && h.is_finite())) {
            return Err(DeformError::InvalidHbar(*h));
        }
        Ok(())
    }
}

/// Runs the command line with `args` (including the program name), writing
/// results to `stdout` unless an output path is given.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(stderr, "{}", e.render()) } else { write!(stdout, "{}", e.render()) };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

struct Failure {
    code: i32,
    message: String,
}

impl From<DeformError> for Failure {
    fn from(e: DeformError) -> Self {
        let code = if matches!(e, DeformError::Io(_)) { EXIT_IO } else { EXIT_CONFIG };
        Failure { code, message: e.to_string() }
    }
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, Failure> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure { code: EXIT_IO, message: format!("{}: {e}", p.display()) })?;
            Ok(ExperimentConfig::from_json(&text)?)
        }
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    let io = |p: &Path, e: std::io::Error| Failure { code: EXIT_IO, message: format!("{}: {e}", p.display()) };
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
            }
            std::fs::write(p, text).map_err(|e| io(p, e))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure { code: EXIT_IO, message: format!("stdout: {e}") }),
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, Failure> {
    if let Command::Verify { suite, .. } = &cli.command {
        if !SUITES.contains(&suite.as_str()) {
            return Err(Failure {
                code: EXIT_USAGE,
                message: format!("unknown suite `{suite}` (expected one of: {})", SUITES.join(", ")),
            });
        }
    }
    let cfg = load_config(cli.config.as_deref())?;
    let out = cli.out.clone().or_else(|| cfg.output.path.clone());
    let out = out.as_deref();
    let seed = cli.seed.unwrap_or(cfg.seed);
    match &cli.command {
        Command::Verify { suite, recalibrate } => verify(&cfg, suite, *recalibrate, seed, out, stdout),
        Command::Scan => {
            let table = state_field_scan(&cfg.state, &cfg.deformation, &cfg.section(), &cfg.grid.points())?;
            let text = match cfg.output.format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => table.to_csv(),
                OutputFormat::Json => pretty(&json!({"version": VERSION, "twist_convention": TWIST_CONVENTION, "rows": table.rows})),
            };
            emit(out, &text, stdout)?;
            Ok(EXIT_PASS)
        }
        Command::Norms => norms(&cfg, out, stdout),
        Command::Star => {
            let a = cfg.element();
            let b = cfg.other.clone().unwrap_or_else(|| a.clone());
            let value = star_product(&cfg.deformation, &a, &b)?;
            let doc = json!({"version": VERSION, "twist_convention": TWIST_CONVENTION, "hbar": cfg.deformation.hbar(), "left": a, "right": b, "product": value});
            emit(out, &pretty(&doc), stdout)?;
            Ok(EXIT_PASS)
        }
        Command::Smooth => {
            let a = cfg.element();
            let value = smooth(&cfg.deformation, &a)?;
            let doc = json!({"version": VERSION, "twist_convention": TWIST_CONVENTION, "hbar": cfg.deformation.hbar(), "element": a, "smoothed": value});
            emit(out, &pretty(&doc), stdout)?;
            Ok(EXIT_PASS)
        }
    }
}

fn verify(cfg: &ExperimentConfig, suite: &str, recalibrate: bool, seed: u64, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let goldens = if suite != "oracle" {
        Vec::new()
    } else if recalibrate {
        let entries = generate_goldens(&QuadratureConfig::default())?;
        let path = cfg.goldens.clone().unwrap_or_else(default_golden_path);
        write_goldens(&path, &entries)?;
        let _ = writeln!(stdout, "wrote {} golden entries to {}", entries.len(), path.display());
        entries
    } else {
        match &cfg.goldens {
            Some(p) => load_goldens(p)?,
            None => embedded_goldens()?,
        }
    };
    let reports = run_suite(suite, &cfg.deformation, seed, &goldens).expect("suite name checked")?;
    let mut summary = String::new();
    for r in &reports {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        summary.push_str(&format!("{verdict} {suite}/{} ({} cases, max error {:.3e})\n", r.check, r.cases.len(), r.max_abs_err()));
    }
    stdout
        .write_all(summary.as_bytes())
        .map_err(|e| Failure { code: EXIT_IO, message: format!("stdout: {e}") })?;
    if let Some(p) = out {
        emit(Some(p), &pretty(&reports), stdout)?;
    }
    Ok(if reports.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct NormRecord {
    hbar: f64,
    #[serde(flatten)]
    bracket: NormBracket,
}

fn norms(cfg: &ExperimentConfig, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let a = cfg.element();
    let mut records = Vec::new();
    for &hbar in &cfg.hbars {
        let data = cfg.deformation.with_hbar(hbar)?;
        let mut prev: Option<NormBracket> = None;
        for &n in &cfg.cutoffs {
            let b = norm_bracket(&data, &a, n)?;
            if let Some(p) = prev.filter(|p| p.truncation < n && b.lower < p.lower) {
                return Err(Failure {
                    code: EXIT_FAIL,
                    message: format!("lower bound decreased from N = {} to N = {n} at hbar = {hbar}", p.truncation),
                });
            }
            prev = Some(b);
            records.push(NormRecord { hbar, bracket: b });
        }
    }
    let text = match cfg.output.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => pretty(&json!({"version": VERSION, "twist_convention": TWIST_CONVENTION, "element": a, "brackets": records})),
        OutputFormat::Csv => {
            let mut s = String::from("hbar,N,lower,upper\n");
            for r in &records {
                s.push_str(&format!("{:.16e},{},{:.16e},{:.16e}\n", r.hbar, r.bracket.truncation, r.bracket.lower, r.bracket.upper));
            }
            s
        }
    };
    emit(out, &text, stdout)?;
    Ok(EXIT_PASS)
}

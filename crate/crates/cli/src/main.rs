//! `lie-integrate`: validate definitions, evaluate products and chart
//! factorizations, and run the verification suite.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 for malformed input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lie_integrate::catalog::{self, CatalogEntry};
use lie_integrate::factorization::{factorize, NewtonConfig};
use lie_integrate::io::{AlgebraFile, RepresentationFile};
use lie_integrate::logderiv::{log_derivative, SmoothPath};
use lie_integrate::quadrature::QuadratureRule;
use lie_integrate::suite::{run_suite, Level, SuiteConfig};
use lie_integrate::{bch, AlgebraVector, BchConfig, Decomposition, Error, LieAlgebra, VerificationReport};

const THREADS_VAR: &str = "LIE_INTEGRATE_THREADS";

// Like println!, but a closed pipe is not an error.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "lie-integrate", version, about = "Local integration of Lie algebra representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Lie axioms, the decomposition and any representations.
    Validate {
        /// Algebra file or catalog entry name.
        file: String,
        /// Representation files to check against the algebra.
        #[arg(long = "rep")]
        reps: Vec<PathBuf>,
    },
    /// Multiply two elements with the truncated series.
    Bch {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// Maximum series order.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Factorize a chart point along a decomposition.
    Factorize {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Decomposition name (catalog entries) or the file's own.
        #[arg(long)]
        decomposition: Option<String>,
    },
    /// Right logarithmic derivative of a polynomial path.
    Logderiv {
        file: String,
        /// Coefficients `c0;c1;...` of `c0 + c1 t + ...`, each comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        path_spec: String,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        t: f64,
        /// Gauss–Legendre nodes.
        #[arg(long, default_value_t = 16)]
        nodes: usize,
    },
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Built-in fixtures.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Write a catalog algebra (or one of its representations) as JSON.
    Export {
        entry: String,
        #[arg(long)]
        decomposition: Option<String>,
        /// Export this representation instead of the algebra.
        #[arg(long)]
        rep: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, conflicts_with = "file")]
    entry: Option<String>,
    /// Algebra file; representations come from `--rep`.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long = "rep", requires = "file")]
    reps: Vec<PathBuf>,
    #[arg(long, default_value = "quick")]
    level: Level,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the level's sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Write the report here (`-` for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Tolerance override `check=value`, repeatable.
    #[arg(long = "tol")]
    tolerances: Vec<String>,
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
}

/// Failure of the invocation itself rather than of a check.
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = std::result::Result<bool, InputError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(InputError(msg)) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> std::result::Result<(), InputError> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| InputError(format!("{THREADS_VAR}={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| InputError(format!("thread pool: {e}")))
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Validate { file, reps } => validate(&file, &reps),
        Command::Bch { file, x, y, order } => {
            let src = load_algebra(&file)?;
            let x = parse_vector(&src.algebra, "--x", &x)?;
            let y = parse_vector(&src.algebra, "--y", &y)?;
            let mut cfg = BchConfig::default();
            if let Some(n) = order {
                cfg.max_order = n;
            }
            let p = bch(&src.algebra, &x, &y, &cfg)?;
            if let Some(w) = &p.warning {
                eprintln!("warning: ‖x‖ + ‖y‖ = {} exceeds {}; series may not converge", w.norm_sum, w.limit);
            }
            out!("{}", join(&p.value.to_vec()));
            eprintln!("order {}, last term norm {:e}", p.order, p.last_term_norm);
            Ok(true)
        }
        Command::Factorize { file, z, decomposition } => {
            let src = load_algebra(&file)?;
            let dec = src.decomposition(decomposition.as_deref())?;
            let z = parse_vector(&src.algebra, "--z", &z)?;
            let cp = factorize(&src.algebra, dec, &z, &BchConfig::default(), &NewtonConfig::default())?;
            for (j, c) in cp.components.iter().enumerate() {
                out!("x{}: {}", j + 1, join(&c.to_vec()));
            }
            eprintln!("residual {:e} after {} iterations", cp.residual, cp.iterations);
            Ok(true)
        }
        Command::Logderiv { file, path_spec, t, nodes } => {
            let src = load_algebra(&file)?;
            let coeffs = path_spec
                .split(';')
                .enumerate()
                .map(|(i, c)| parse_vector(&src.algebra, &format!("--path-spec term {i}"), c))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let path = SmoothPath::polynomial(coeffs, (0.0, 1.0))?;
            let q = QuadratureRule::gauss_legendre(nodes)?;
            let d = log_derivative(&src.algebra, &path, t, &q)?;
            out!("{}", join(&d.to_vec()));
            Ok(true)
        }
        Command::Verify(args) => verify(args),
        Command::Catalog { action: CatalogAction::List } => {
            for e in catalog::load_catalog()? {
                let decs: Vec<&str> = e.decompositions.iter().map(|d| d.name()).collect();
                let reps: Vec<String> = e
                    .representations
                    .iter()
                    .map(|r| format!("{} (dim {}{})", r.name(), r.dim_h(), if r.is_skew() { ", skew" } else { "" }))
                    .collect();
                out!("{} (dim {})", e.name, e.algebra.dim());
                out!("  decompositions: {}", decs.join(", "));
                out!("  representations: {}", reps.join(", "));
                out!("  {}", e.notes);
            }
            out!("{} (negative control)", catalog::BROKEN_FIXTURE);
            Ok(true)
        }
        Command::Export { entry, decomposition, rep, out } => {
            let e = catalog::find_entry(&entry)?;
            let text = match rep {
                Some(name) => {
                    let r = e
                        .representation(&name)
                        .ok_or_else(|| InputError(format!("entry {} has no representation \"{name}\"", e.name)))?;
                    RepresentationFile::from_representation(r).to_json()
                }
                None => {
                    let dec = match decomposition {
                        Some(name) => e
                            .decomposition(&name)
                            .ok_or_else(|| InputError(format!("entry {} has no decomposition \"{name}\"", e.name)))?,
                        None => &e.decompositions[0],
                    };
                    AlgebraFile::from_algebra(&e.algebra, Some(dec)).to_json()
                }
            };
            write_output(out.as_deref(), &text)?;
            Ok(true)
        }
    }
}

/// An algebra with its decompositions, from a file or the catalog.
struct Source {
    algebra: LieAlgebra<f64>,
    decompositions: Vec<Decomposition<f64>>,
    entry: Option<CatalogEntry>,
}

impl Source {
    fn decomposition(&self, name: Option<&str>) -> std::result::Result<&Decomposition<f64>, InputError> {
        match name {
            None => Ok(&self.decompositions[0]),
            Some(n) => self
                .decompositions
                .iter()
                .find(|d| d.name() == n)
                .ok_or_else(|| InputError(format!("no decomposition named \"{n}\""))),
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// `spec` is a path if such a file exists, else a catalog entry name.
fn load_algebra(spec: &str) -> std::result::Result<Source, InputError> {
    let path = Path::new(spec);
    if path.exists() {
        let text = read(path)?;
        let file = AlgebraFile::parse(&text).map_err(|e| InputError(format!("{spec}: {e}")))?;
        let (algebra, dec) = file.build().map_err(|e| InputError(format!("{spec}: {e}")))?;
        return Ok(Source { algebra, decompositions: vec![dec], entry: None });
    }
    match catalog::find_entry(spec) {
        Ok(e) => Ok(Source {
            algebra: e.algebra.clone(),
            decompositions: e.decompositions.clone(),
            entry: Some(e),
        }),
        Err(_) => Err(InputError(format!("{spec}: no such file or catalog entry"))),
    }
}

fn load_reps(alg: &LieAlgebra<f64>, paths: &[PathBuf]) -> std::result::Result<Vec<lie_integrate::representation::Representation<f64>>, InputError> {
    paths
        .iter()
        .map(|p| {
            let text = read(p)?;
            RepresentationFile::parse(&text)
                .and_then(|f| f.build(alg))
                .map_err(|e| InputError(format!("{}: {e}", p.display())))
        })
        .collect()
}

fn parse_vector(alg: &LieAlgebra<f64>, what: &str, text: &str) -> std::result::Result<AlgebraVector<f64>, InputError> {
    let coords = text
        .split(',')
        .enumerate()
        .map(|(i, s)| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| InputError(format!("{what}: entry {i} ({:?}) is not a number", s.trim())))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if coords.len() != alg.dim() {
        return Err(InputError(format!("{what}: {} coordinates given, algebra has dimension {}", coords.len(), alg.dim())));
    }
    Ok(AlgebraVector::from_vec(coords))
}

fn join(v: &[f64]) -> String {
    v.iter().map(|c| (c + 0.0).to_string()).collect::<Vec<_>>().join(",")
}

fn write_output(path: Option<&Path>, text: &str) -> std::result::Result<(), InputError> {
    match path {
        None => {
            out!("{text}");
            Ok(())
        }
        Some(p) if p == Path::new("-") => {
            out!("{text}");
            Ok(())
        }
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| InputError(format!("{}: {e}", p.display()))),
    }
}

fn print_report(report: &VerificationReport) {
    for r in &report.records {
        out!(
            "{} {:<48} residual {:<12.3e} tolerance {:.1e}{}",
            if r.pass { "PASS" } else { "FAIL" },
            r.check_name,
            r.residual,
            r.tolerance,
            r.detail.as_deref().map(|d| format!("  ({d})")).unwrap_or_default()
        );
    }
    out!(
        "{}: {} checks, {} passed, {} failed",
        report.subject, report.summary.total, report.summary.passed, report.summary.failed
    );
}

fn validate(spec: &str, rep_paths: &[PathBuf]) -> Outcome {
    let src = load_algebra(spec)?;
    let mut report = VerificationReport::new(src.algebra.name());
    report.extend(src.algebra.validate().records);
    for d in &src.decompositions {
        report.extend(d.validate().records.into_iter().map(|mut r| {
            r.check_name = format!("{}/{}", r.check_name, d.name());
            r
        }));
    }
    let mut reps = load_reps(&src.algebra, rep_paths)?;
    if let Some(e) = &src.entry {
        reps.extend(e.representations.iter().cloned());
    }
    for rep in &reps {
        report.extend(rep.validate().records.into_iter().map(|mut r| {
            r.check_name = format!("{}/{}", r.check_name, rep.name());
            r
        }));
    }
    report.finalize();
    print_report(&report);
    Ok(report.all_pass())
}

fn verify(args: VerifyArgs) -> Outcome {
    let entry = match (&args.entry, &args.file) {
        (Some(name), _) => catalog::find_entry(name)?,
        (None, Some(path)) => {
            let src = load_algebra(&path.to_string_lossy())?;
            let representations = load_reps(&src.algebra, &args.reps)?;
            CatalogEntry {
                name: src.algebra.name().to_string(),
                algebra: src.algebra,
                decompositions: src.decompositions,
                representations,
                realization: None,
                group_oracle: None,
                notes: format!("loaded from {}", path.display()),
            }
        }
        (None, None) => return Err(InputError("verify needs --entry NAME or --file PATH".into())),
    };
    let mut cfg = SuiteConfig::new(args.seed, args.level);
    if let Some(n) = args.samples {
        if n == 0 {
            return Err(InputError("--samples must be positive".into()));
        }
        cfg = cfg.with_samples(n);
    }
    for t in &args.tolerances {
        let (name, value) = t
            .split_once('=')
            .ok_or_else(|| InputError(format!("--tol {t:?}: expected check=value")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| InputError(format!("--tol {t:?}: {value:?} is not a number")))?;
        cfg = cfg.with_tolerance(name.trim(), value)?;
    }
    let report = run_suite(&entry, &cfg);
    if args.json.as_deref() == Some(Path::new("-")) {
        out!("{}", report.to_json_pretty());
    } else {
        print_report(&report);
        if let Some(p) = &args.json {
            write_output(Some(p), &report.to_json_pretty())?;
        }
    }
    Ok(report.all_pass())
}

//! Command-line front end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::algdata::{load_instance, save_instance, AlgError, AlgebraInstance};
use crate::checkers::{check_intertwiner, check_ioa_axioms, check_module, check_voa};
use crate::examples::{make_abelian_monomial, make_trivial_voa, AbelianSpec};
use crate::jacobi::{check_duality_formal, check_jacobi, check_jacobi_explicit};
use crate::msdata::{check_hexagons, check_pentagon, derive_braiding};
use crate::report::{CheckReport, RunReport, Witness};

pub const SUITES: [&str; 8] = ["voa", "module", "intertwiner", "ioa", "pentagon", "hexagon", "jacobi", "duality-formal"];
pub const WINDOW_ENV: &str = "IOACHECK_WINDOW";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ioacheck", version, about = "Exact truncated checks of vertex operator algebra and intertwining operator algebra axioms")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load an instance and validate its invariants.
    Validate { path: PathBuf },
    /// Run check suites on an instance.
    Check {
        path: PathBuf,
        #[arg(long, short, env = WINDOW_ENV, default_value_t = 8, value_parser = clap::value_parser!(i64).range(1..))]
        window: i64,
        /// Suites to run (default: all).
        #[arg(long = "suite", short, num_args = 1.., value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suites: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Stop after the first failing suite.
        #[arg(long)]
        fail_fast: bool,
        /// Worker threads (default: one per core).
        #[arg(long, short)]
        jobs: Option<usize>,
    },
    /// Print the braiding matrices derived from F and Omega.
    DeriveBraiding {
        path: PathBuf,
        /// Also write the instance with the braiding appended as comments.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Write a generated instance file: `trivial`, or `abelian Z<n> q=<weights>`.
    GenExample {
        kind: String,
        params: Vec<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub window: i64,
    pub suites: Vec<String>,
    pub fail_fast: bool,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn all(window: i64) -> Self {
        RunConfig { window, suites: SUITES.iter().map(|s| s.to_string()).collect(), fail_fast: false, jobs: None }
    }
}

/// The jacobi suite, plus agreement of the explicit matrix-entry evaluation with it.
fn jacobi_suite(inst: &AlgebraInstance, w: i64) -> CheckReport {
    let mut rep = check_jacobi(inst, w);
    let b = match derive_braiding(inst) {
        Ok(b) => b,
        Err(_) => return rep,
    };
    let ex = check_jacobi_explicit(inst, &inst.fmat, &b, w);
    let mismatch = rep.results.iter().zip(&ex.results).find(|(a, b)| a.status != b.status || a.witness != b.witness);
    match mismatch {
        None if rep.results.len() == ex.results.len() => {
            rep.pass("explicit matrix form agrees", ex.results.len() as u64);
        }
        None => {
            rep.fail("explicit matrix form agrees", Witness::new("entry count", rep.results.len(), ex.results.len()));
        }
        Some((a, b)) => {
            rep.fail("explicit matrix form agrees", Witness::new(a.axiom.clone(), format!("{:?}", a.status), format!("{:?}", b.status)));
        }
    }
    rep
}

pub fn run_suite(inst: &AlgebraInstance, name: &str, w: i64) -> CheckReport {
    match name {
        "voa" => check_voa(inst, w),
        "module" => {
            let mut rep = CheckReport::new("module");
            for a in 0..inst.ncolors() {
                rep.extend(check_module(inst, a, w));
            }
            rep
        }
        "intertwiner" => {
            let mut rep = CheckReport::new("intertwiner");
            for y in inst.yrefs() {
                rep.extend(check_intertwiner(inst, y, w));
            }
            rep
        }
        "ioa" => check_ioa_axioms(inst, w),
        "pentagon" => check_pentagon(inst),
        "hexagon" => check_hexagons(inst),
        "jacobi" => jacobi_suite(inst, w),
        "duality-formal" => check_duality_formal(inst),
        other => panic!("unknown suite {}", other),
    }
}

/// Runs the selected suites in registry order.
pub fn run_checks(inst: &AlgebraInstance, label: &str, cfg: &RunConfig) -> Result<RunReport, String> {
    let go = || {
        let mut out = RunReport { instance: label.to_string(), window: cfg.window, suites: Vec::new() };
        for s in SUITES.iter().filter(|s| cfg.suites.iter().any(|x| x == *s)) {
            let rep = run_suite(inst, s, cfg.window);
            let failed = !rep.passed();
            out.suites.push(rep);
            if failed && cfg.fail_fast {
                break;
            }
        }
        out
    };
    match cfg.jobs {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build().map_err(|e| e.to_string())?;
            Ok(pool.install(go))
        }
        None => Ok(go()),
    }
}

pub fn braiding_text(inst: &AlgebraInstance) -> Result<String, String> {
    let b = derive_braiding(inst).map_err(|e| e.to_string())?;
    let mut s = String::new();
    for (&(a1, a2, a3, a4), m) in &b {
        let _ = writeln!(s, "[B {} {} ; {} {}]\n{}", inst.name(a1), inst.name(a2), inst.name(a3), inst.name(a4), m);
    }
    Ok(s)
}

pub fn gen_example(kind: &str, params: &[String]) -> Result<AlgebraInstance, String> {
    match kind {
        "trivial" if params.is_empty() => Ok(make_trivial_voa()),
        "abelian" => {
            let mut group = None;
            let mut q = None;
            for p in params {
                match p.split_once('=') {
                    Some(("q", v)) => q = Some(v.to_string()),
                    None if group.is_none() => group = Some(p.clone()),
                    _ => return Err(format!("unexpected parameter `{}`", p)),
                }
            }
            let (Some(g), Some(q)) = (group, q) else { return Err("abelian needs a group and q=<weights>, e.g. `abelian Z2 q=1/4`".into()) };
            let spec = AbelianSpec::from_params(&g, &q).map_err(|e| e.to_string())?;
            make_abelian_monomial(&spec).map_err(|e| e.to_string())
        }
        _ => Err(format!("unknown example `{}`; expected `trivial` or `abelian Z<n> q=<weights>`", [kind.to_string()].iter().chain(params).cloned().collect::<Vec<_>>().join(" "))),
    }
}

fn load(path: &Path) -> Result<AlgebraInstance, (i32, String)> {
    load_instance(path).map_err(|e| {
        let code = match e {
            AlgError::Io(_) => EXIT_INTERNAL,
            _ => EXIT_INVALID,
        };
        (code, format!("{}: {}", path.display(), e))
    })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), (i32, String)> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| (EXIT_INTERNAL, format!("{}: {}", p.display(), e))),
        None => {
            emit(text);
            Ok(())
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

/// Executes a parsed command; returns the exit code.
pub fn execute(cli: Cli) -> i32 {
    let res: Result<i32, (i32, String)> = (|| match cli.cmd {
        Command::Validate { path } => {
            let inst = load(&path)?;
            emit(&format!("{}: valid ({} colors, cyclotomic order {})\n", path.display(), inst.ncolors(), inst.order));
            Ok(EXIT_PASS)
        }
        Command::Check { path, window, suites, format, fail_fast, jobs } => {
            let inst = load(&path)?;
            let suites = if suites.is_empty() { SUITES.iter().map(|s| s.to_string()).collect() } else { suites };
            let cfg = RunConfig { window, suites, fail_fast, jobs };
            let rep = run_checks(&inst, &path.display().to_string(), &cfg).map_err(|e| (EXIT_INTERNAL, e))?;
            match format {
                Format::Text => emit(&rep.to_text()),
                Format::Json => emit(&format!("{}\n", rep.to_json())),
            }
            Ok(if rep.passed() { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::DeriveBraiding { path, out } => {
            let inst = load(&path)?;
            let b = braiding_text(&inst).map_err(|e| (EXIT_INVALID, e))?;
            emit(&b);
            if let Some(o) = out {
                let commented: String = b.lines().map(|l| format!("# {}\n", l)).collect();
                write_out(Some(&o), &format!("{}\n{}", save_instance(&inst), commented))?;
            }
            Ok(EXIT_PASS)
        }
        Command::GenExample { kind, params, out } => {
            let inst = gen_example(&kind, &params).map_err(|e| (EXIT_INVALID, e))?;
            write_out(out.as_deref(), &save_instance(&inst))?;
            Ok(EXIT_PASS)
        }
    })();
    match res {
        Ok(c) => c,
        Err((c, msg)) => {
            eprintln!("error: {}", msg);
            c
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
            let _ = e.print();
            code
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kecollapse_core::acceptance::{self, format_line, run_criterion, Context, CRITERIA};
use kecollapse_core::degeneration::DegenerationError;
use kecollapse_core::ma::{MaError, SolveMode};
use kecollapse_core::pipeline::{self, MaRun};
use kecollapse_core::semiflat::SemiflatError;
use kecollapse_core::tropical::{AmoebaSampling, Region, TropicalError, TropicalPolynomial};
use kecollapse_core::Exec;

/// Environment variable capping the number of worker threads.
const THREADS_VAR: &str = "KECOLLAPSE_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "kecollapse",
    version,
    about = "Collapsing Kähler-Einstein metrics laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve det D²φ = κ e^{2φ} on the standard simplex.
    SolveMa {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value = "barrier")]
        mode: SolveMode,
        /// Grid CSV (x1..xs,phi,res); omitted means no file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fiber diameters, GH discrepancies and Einstein residual of the
    /// semi-flat metric.
    CollapseReport {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Comma-separated t values; `e-L` means t = e^{-L}.
        #[arg(long, default_value = "e-5,e-10,e-20")]
        t_list: String,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report file; series files are written beside it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the amoeba of a polynomial over a base field parameter t.
    Amoeba {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 400)]
        res: usize,
        #[arg(long, default_value_t = 64)]
        angles: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Corner locus of the tropicalization.
    Tropical {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 400)]
        res: usize,
        /// Locus CSV; the exact cells go to the same stem with `.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dual intersection complex of a Mumford degeneration fixture.
    DualComplex {
        #[arg(long)]
        fixture: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Accept {
        /// Directory for the pipeline artifacts and the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Validation(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<MaError> for Failure {
    fn from(e: MaError) -> Self {
        match e {
            MaError::NewtonDiverged { .. }
            | MaError::LossOfConvexity { .. }
            | MaError::ExhaustionNotSaturated { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<SemiflatError> for Failure {
    fn from(e: SemiflatError) -> Self {
        match e {
            SemiflatError::Ma(m) => m.into(),
            SemiflatError::NotPositiveDefinite => Failure::Numerical(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<TropicalError> for Failure {
    fn from(e: TropicalError) -> Self {
        match e {
            TropicalError::RootSolveFailure { .. }
            | TropicalError::EmptyVariety
            | TropicalError::EmptyAfterClip => Failure::Numerical(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<DegenerationError> for Failure {
    fn from(e: DegenerationError) -> Self {
        Failure::Validation(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Validation(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents)
        .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))
}

/// `dir/stem.suffix` next to `path`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn solve(dim: usize, kappa: f64, resolution: usize, tol: f64, mode: SolveMode) -> MaRun {
    MaRun {
        dim,
        kappa,
        resolution,
        tol,
        mode,
    }
}

fn run(cmd: Command, exec: Exec) -> Result<(), Failure> {
    match cmd {
        Command::SolveMa {
            dim,
            kappa,
            resolution,
            tol,
            mode,
            out,
        } => {
            let a = pipeline::solve_ma(&solve(dim, kappa, resolution, tol, mode), exec)?;
            if let Some(path) = out {
                write(&path, &a.csv)?;
            }
            print!("{}", a.summary);
        }
        Command::CollapseReport {
            dim,
            kappa,
            resolution,
            tol,
            t_list,
            pairs,
            seed,
            out,
        } => {
            let ls = pipeline::parse_t_list(&t_list).map_err(Failure::Validation)?;
            let run = solve(dim, kappa, resolution, tol, SolveMode::Barrier);
            let a = pipeline::solve_ma(&run, exec)?;
            let report = pipeline::collapse_report(&a.solution, &ls, pairs, seed, exec)?;
            let json = report.to_json();
            match out {
                Some(path) => {
                    write(&path, &json)?;
                    for (stem, csv) in report.series() {
                        write(&sibling(&path, &format!("{stem}.csv")), &csv)?;
                    }
                }
                None => print!("{json}"),
            }
        }
        Command::Amoeba {
            poly,
            t,
            region,
            res,
            angles,
            out,
        } => {
            let p = TropicalPolynomial::parse(&read(&poly)?)?;
            let ls = pipeline::parse_t_list(&t).map_err(Failure::Validation)?;
            let [l] = ls[..] else {
                return Err(Failure::Validation("--t takes a single value".into()));
            };
            let sampling = AmoebaSampling::new(Region::parse(&region)?, res, angles)?;
            let (cloud, csv) = pipeline::amoeba(&p, (-l).exp(), &sampling, exec)?;
            match out {
                Some(path) => write(&path, &csv)?,
                None => print!("{csv}"),
            }
            eprintln!("{} points", cloud.len());
        }
        Command::Tropical {
            poly,
            region,
            res,
            out,
        } => {
            let p = TropicalPolynomial::parse(&read(&poly)?)?;
            let (_, csv, text) = pipeline::tropical(&p, &Region::parse(&region)?, res)?;
            match out {
                Some(path) => {
                    write(&path, &csv)?;
                    write(&sibling(&path, "txt"), &text)?;
                }
                None => print!("{text}"),
            }
        }
        Command::DualComplex { fixture, out } => {
            let (text, report) = pipeline::dual_complex_text(&read(&fixture)?)?;
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            if !report.pass() {
                return Err(Failure::Numerical(format!(
                    "duality check failed: {:?}",
                    report.violations
                )));
            }
        }
        Command::Accept { out } => {
            let ctx = Context::new(exec);
            let mut results = Vec::new();
            for id in 1..=CRITERIA.len() {
                let r = run_criterion(&ctx, id);
                println!("{}", format_line(&r));
                results.push(r);
            }
            let passed = results.iter().filter(|r| r.pass).count();
            println!("{passed}/{} criteria passed", results.len());
            if let Some(dir) = out {
                let artifacts = acceptance::artifacts(exec).map_err(Failure::Numerical)?;
                for (name, contents) in artifacts {
                    write(&dir.join(name), &contents)?;
                }
                write(&dir.join("report.txt"), &acceptance::report(&results))?;
            }
            if passed != results.len() {
                return Err(Failure::Numerical(format!(
                    "{} criteria failed",
                    results.len() - passed
                )));
            }
        }
    }
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize =
        v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Failure::Validation(format!("{THREADS_VAR} must be a positive integer"))
        })?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Validation(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli.command, Exec::default()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Validation(msg) | Failure::Numerical(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}

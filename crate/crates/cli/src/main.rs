use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;

use mproots_core::dk::{SolveConfig, UpdateMode};
use mproots_core::io::{load_roots, save_polynomial, sci, store_result, RootsFile};
use mproots_core::pipeline::{
    default_coeff_bits, match_and_errors, parse_bench_config, parse_tolerance, reference_roots, run_benchmark,
    run_method, Family, Method, ProblemSpec,
};
use mproots_core::poly::{chebyshev_poly, limit_curve_residual, wilkinson};
use mproots_core::{MpReal, Precision};

#[derive(Parser)]
#[command(name = "mproots", version, about = "Multiple-precision polynomial root finding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the coefficients of a benchmark polynomial.
    Gen(GenArgs),
    /// Find all roots of a polynomial.
    Solve(SolveArgs),
    /// Compare a roots file against reference roots.
    Verify(VerifyArgs),
    /// Run a benchmark matrix.
    Bench(BenchArgs),
    /// Evaluate the Chebyshev limit-curve residual at each root.
    Curve(CurveArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Wilkinson,
    Chebyshev,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Wilkinson => Family::Wilkinson,
            FamilyArg::Chebyshev => Family::Chebyshev,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Jacobi,
    GaussSeidel,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReferenceArg {
    Analytic,
    Selfsolve,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
    /// Coefficient precision in bits.
    #[arg(long)]
    bits: u32,
    #[arg(long)]
    out: PathBuf,
}

/// Selects the polynomial: a coefficient file or a generated family.
#[derive(Args)]
struct ProblemArgs {
    /// Coefficient file.
    #[arg(long = "in", conflicts_with_all = ["family", "coeff_bits"])]
    input: Option<PathBuf>,
    #[arg(long, value_enum, requires = "n")]
    family: Option<FamilyArg>,
    #[arg(long)]
    n: Option<usize>,
    /// Precision the coefficients are generated at.
    #[arg(long)]
    coeff_bits: Option<u32>,
}

impl ProblemArgs {
    fn spec(&self, high: Precision, default_n: Option<usize>) -> Result<ProblemSpec> {
        if let Some(path) = &self.input {
            return Ok(ProblemSpec::from_file(path)?);
        }
        let Some(family) = self.family else {
            bail!("give either --in <path> or --family");
        };
        let family = Family::from(family);
        let Some(n) = self.n.or(default_n) else {
            bail!("--family needs --n");
        };
        let coeff_bits = match self.coeff_bits {
            Some(b) => Precision::new(b)?,
            None => default_coeff_bits(&family, n, high),
        };
        Ok(ProblemSpec::new(family, n, coeff_bits)?)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value = "dk2+low")]
    method: String,
    /// Precision of the eigenvalue seed.
    #[arg(long, default_value_t = 106)]
    low_bits: u32,
    /// Working precision.
    #[arg(long, default_value_t = 512)]
    high_bits: u32,
    /// Relative step tolerance (decimal); defaults by working precision.
    #[arg(long)]
    eps_rel: Option<String>,
    #[arg(long, default_value = "1e-300")]
    eps_abs: String,
    #[arg(long, value_enum, default_value = "jacobi")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = mproots_core::dk::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Roots file; a CSV sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also compute errors against reference roots (always done for
    /// Wilkinson polynomials).
    #[arg(long)]
    errors: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    roots: PathBuf,
    #[arg(long, value_enum)]
    reference: ReferenceArg,
    /// Polynomial for `selfsolve`; `--n` defaults to the roots file degree.
    #[command(flatten)]
    problem: ProblemArgs,
    /// Write the per-root CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Directory for one roots file per row.
    #[arg(long)]
    roots_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    roots: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
        Command::Curve(a) => curve(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn converged_code(converged: bool) -> ExitCode {
    if converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn gen(a: GenArgs) -> Result<ExitCode> {
    let prec = Precision::new(a.bits)?;
    let p = match a.family {
        FamilyArg::Wilkinson => wilkinson(a.n, prec)?.0,
        FamilyArg::Chebyshev => chebyshev_poly(a.n, prec)?,
    };
    save_polynomial(&a.out, &p).with_context(|| format!("writing {}", a.out.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn solve(a: SolveArgs) -> Result<ExitCode> {
    let method: Method = a.method.parse()?;
    let low = Precision::new(a.low_bits)?;
    let high = Precision::new(a.high_bits)?;
    let spec = a.problem.spec(high, None)?;
    let mut cfg = SolveConfig::for_precision(high)
        .mode(match a.mode {
            ModeArg::Jacobi => UpdateMode::Jacobi,
            ModeArg::GaussSeidel => UpdateMode::GaussSeidel,
        })
        .threads(a.threads)
        .max_iter(a.max_iter)
        .eps_abs(parse_tolerance(&a.eps_abs)?);
    if let Some(e) = &a.eps_rel {
        cfg = cfg.eps_rel(parse_tolerance(e)?);
    }
    let p = spec.polynomial()?;
    let res = run_method(&p, method, low, high, &cfg)?;
    if res.seed_fallback {
        warn!("eigenvalue seeding failed; Aberth's circle was used");
    }

    let report = if a.errors || spec.family == Family::Wilkinson {
        Some(match_and_errors(&res.roots.z, &reference_roots(&spec)?)?)
    } else {
        None
    };
    let mut line = format!(
        "method={method} degree={} converged={} iterations={} wall_seconds={:.6} seed_seconds={:.6}",
        spec.n,
        res.converged,
        res.iterations,
        res.wall.as_secs_f64(),
        res.seed_wall.as_secs_f64()
    );
    if let Some(r) = &report {
        line.push_str(&format!(
            " max_rel_err={} median_rel_err={}",
            sci(&r.max, 6),
            sci(&r.median, 6)
        ));
    }
    println!("{line}");

    if let Some(out) = &a.out {
        let file = RootsFile {
            bits: high.bits(),
            method: method.to_string(),
            iterations: res.iterations,
            converged: res.converged,
            roots: res.roots.z,
            steps: res.step_sizes,
        };
        store_result(out, &file, report.as_ref().map(|r| r.rel_err.as_slice()))
            .with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(converged_code(res.converged))
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let roots = load_roots(&a.roots)?;
    let n = roots.degree();
    let reference = match a.reference {
        ReferenceArg::Analytic => {
            if a.problem.input.is_some() || matches!(a.problem.family, Some(FamilyArg::Chebyshev)) {
                bail!("analytic reference roots exist only for Wilkinson polynomials");
            }
            let bits = default_coeff_bits(&Family::Wilkinson, n, Precision::new(roots.bits)?);
            wilkinson(n, bits)?.1
        }
        ReferenceArg::Selfsolve => {
            let spec = a.problem.spec(Precision::new(roots.bits)?, Some(n))?;
            if spec.n != n {
                bail!("roots file has {n} roots but the polynomial has degree {}", spec.n);
            }
            reference_roots(&spec)?
        }
    };
    let report = match_and_errors(&roots.roots, &reference)?;
    let mut csv = String::from("index,rel_err\n");
    for (i, e) in report.rel_err.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", i + 1, sci(e, 6)));
    }
    match &a.out {
        Some(path) => fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    println!("max={} median={}", sci(&report.max, 6), sci(&report.median, 6));
    Ok(ExitCode::SUCCESS)
}

fn bench(a: BenchArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.matrix).with_context(|| format!("reading {}", a.matrix.display()))?;
    let matrix = parse_bench_config(&text).map_err(|e| e.with_path(&a.matrix))?;
    let report = run_benchmark(&matrix)?;
    fs::write(&a.out, report.to_csv()).with_context(|| format!("writing {}", a.out.display()))?;
    if let Some(dir) = &a.roots_dir {
        fs::create_dir_all(dir)?;
        for (i, row) in report.rows.iter().enumerate() {
            if let Some(file) = &row.roots {
                store_result(&roots_path(dir, i), file, None)?;
            }
        }
    }
    for row in &report.rows {
        if let Some(e) = &row.error {
            eprintln!("{} n={} {}: {e}", row.family, row.n, row.method);
        }
    }
    Ok(converged_code(report.all_converged()))
}

fn roots_path(dir: &Path, row: usize) -> PathBuf {
    dir.join(format!("row{:03}.roots", row + 1))
}

fn curve(a: CurveArgs) -> Result<ExitCode> {
    let roots = load_roots(&a.roots)?;
    let mut out = String::from("index,residual\n");
    for (i, z) in roots.roots.iter().enumerate() {
        let r: Option<MpReal> = match limit_curve_residual(z) {
            Ok(r) => Some(r),
            Err(e) => {
                warn!("root {}: {e}", i + 1);
                None
            }
        };
        let cell = r.map_or_else(|| "nan".to_string(), |r| sci(&r, 6));
        out.push_str(&format!("{},{}\n", i + 1, cell));
    }
    std::io::stdout().write_all(out.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

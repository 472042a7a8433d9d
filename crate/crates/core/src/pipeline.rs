//! The mixed-precision pipeline (generate, seed at low precision, refine at
//! high precision), error measurement against reference roots and the
//! benchmark runner.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::{info, warn};
use rug::Float;

use crate::dk::{solve, Order, RootVector, SolveConfig, SolveResult, Start, UpdateMode};
use crate::eigen::{eigen_roots, eigen_roots_with, GuessSource, DEFAULT_MAX_SWEEPS};
use crate::error::{Error, Result};
use crate::io::{load_polynomial, sci, RootsFile};
use crate::poly::{chebyshev_poly, wilkinson, Polynomial, Provenance, ReferenceRoots};
use crate::scalar::{MpComplex, MpReal, Precision};

/// Working precision of reference solves.
pub const REFERENCE_BITS: u32 = 2048;
/// Precision of the eigenvalue seed for reference solves.
pub const REFERENCE_SEED_BITS: u32 = 512;
/// Reference solves stop at `eps_rel = 2^-(bits - REFERENCE_EPS_MARGIN)`,
/// `2^-1800` at 2048 bits.
pub const REFERENCE_EPS_MARGIN: u32 = 248;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Wilkinson,
    Chebyshev,
    File(PathBuf),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Wilkinson => f.write_str("wilkinson"),
            Family::Chebyshev => f.write_str("chebyshev"),
            Family::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wilkinson" => Ok(Family::Wilkinson),
            "chebyshev" => Ok(Family::Chebyshev),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(Family::File(PathBuf::from(p))),
                _ => Err(Error::InvalidInput(format!("unknown family `{s}`"))),
            },
        }
    }
}

/// Which polynomial to solve and the precision its coefficients are made in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProblemSpec {
    pub family: Family,
    pub n: usize,
    pub coeff_bits: Precision,
}

impl ProblemSpec {
    pub fn new(family: Family, n: usize, coeff_bits: Precision) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("degree must be at least 1".into()));
        }
        Ok(ProblemSpec { family, n, coeff_bits })
    }

    pub fn wilkinson(n: usize, coeff_bits: Precision) -> Result<Self> {
        Self::new(Family::Wilkinson, n, coeff_bits)
    }

    pub fn chebyshev(n: usize, coeff_bits: Precision) -> Result<Self> {
        Self::new(Family::Chebyshev, n, coeff_bits)
    }

    /// Reads the header and coefficients of a coefficient file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let p = load_polynomial(path)?;
        Self::new(Family::File(path.to_path_buf()), p.degree(), p.precision())
    }

    /// The coefficients at `coeff_bits`.
    pub fn polynomial(&self) -> Result<Polynomial> {
        match &self.family {
            Family::Wilkinson => Ok(wilkinson(self.n, self.coeff_bits)?.0),
            Family::Chebyshev => chebyshev_poly(self.n, self.coeff_bits),
            Family::File(path) => {
                let p = load_polynomial(path)?;
                if p.degree() != self.n {
                    return Err(Error::InvalidInput(format!(
                        "{} has degree {}, expected {}",
                        path.display(),
                        p.degree(),
                        self.n
                    )));
                }
                Ok(p.convert(self.coeff_bits))
            }
        }
    }
}

/// Coefficient precision used when none is given: enough for the exact
/// Wilkinson integers (at least `high`), half of `high` for Chebyshev.
pub fn default_coeff_bits(family: &Family, n: usize, high: Precision) -> Precision {
    match family {
        Family::Wilkinson => {
            // every coefficient is bounded by (n+1)!
            let bits = (2..=n + 1).map(|k| (k as f64).log2()).sum::<f64>().ceil() as u32 + 2;
            Precision::new(bits.max(high.bits())).unwrap()
        }
        Family::Chebyshev => Precision::new((high.bits() / 2).max(Precision::MIN_BITS)).unwrap(),
        Family::File(_) => high,
    }
}

/// Solution methods compared by the benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Companion eigenvalues at the high precision.
    Eigen,
    /// Second order from Aberth's circle.
    Dka2,
    /// Third order from Aberth's circle.
    Dka3,
    /// Second order seeded by low-precision eigenvalues.
    Dk2Low,
    /// Third order seeded by low-precision eigenvalues.
    Dk3Low,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Eigen,
        Method::Dka2,
        Method::Dka3,
        Method::Dk2Low,
        Method::Dk3Low,
    ];

    pub fn order(self) -> Option<Order> {
        match self {
            Method::Eigen => None,
            Method::Dka2 | Method::Dk2Low => Some(Order::Second),
            Method::Dka3 | Method::Dk3Low => Some(Order::Third),
        }
    }

    pub fn is_seeded(self) -> bool {
        matches!(self, Method::Dk2Low | Method::Dk3Low)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Eigen => "eigen",
            Method::Dka2 => "dka2",
            Method::Dka3 => "dka3",
            Method::Dk2Low => "dk2+low",
            Method::Dk3Low => "dk3+low",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown method `{s}`")))
    }
}

impl FromStr for UpdateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jacobi" => Ok(UpdateMode::Jacobi),
            "gauss-seidel" => Ok(UpdateMode::GaussSeidel),
            _ => Err(Error::InvalidInput(format!("unknown update mode `{s}`"))),
        }
    }
}

impl fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdateMode::Jacobi => "jacobi",
            UpdateMode::GaussSeidel => "gauss-seidel",
        })
    }
}

/// Seeds from eigenvalues of `p` at `low` (Aberth's circle if the QR
/// iteration fails) and refines at `high`.
pub fn seeded_solve(p: &Polynomial, low: Precision, high: Precision, cfg: &SolveConfig) -> Result<SolveResult> {
    if low.bits() > high.bits() {
        return Err(Error::InvalidInput(format!(
            "low precision {low} exceeds high precision {high}"
        )));
    }
    let started = Instant::now();
    let (start, fallback) = match eigen_roots(p, low) {
        Ok(g) => (Start::Guesses(g), false),
        Err(Error::NonConvergence { sweeps, .. }) => {
            warn!("eigenvalue seed failed after {sweeps} sweeps; using Aberth's circle");
            (Start::Aberth, true)
        }
        Err(e) => return Err(e),
    };
    let seed_wall = started.elapsed();
    let mut res = solve(&p.convert(high), start, cfg)?;
    res.seed_wall = seed_wall;
    res.seed_fallback = fallback;
    if fallback {
        res.seed = GuessSource::Aberth;
    }
    Ok(res)
}

/// Generates the coefficients of `spec`, seeds at `low` and refines at
/// `high` with `cfg`.
pub fn mixed_precision_solve(
    spec: &ProblemSpec,
    low: Precision,
    high: Precision,
    cfg: &SolveConfig,
) -> Result<SolveResult> {
    let p = spec.polynomial()?;
    seeded_solve(&p, low, high, cfg)
}

/// Runs `method` on `p`. The order in `cfg` is replaced by the method's;
/// [`Method::Eigen`] reports QR sweeps as iterations and QR time as wall
/// time.
pub fn run_method(
    p: &Polynomial,
    method: Method,
    low: Precision,
    high: Precision,
    cfg: &SolveConfig,
) -> Result<SolveResult> {
    match method.order() {
        None => {
            let started = Instant::now();
            let (g, sweeps) = eigen_roots_with(p, high, DEFAULT_MAX_SWEEPS)?;
            let wall = started.elapsed();
            let n = g.guesses.len();
            let mut roots = RootVector::new(g.guesses);
            roots.frozen = vec![true; n];
            roots.iteration = sweeps;
            Ok(SolveResult {
                roots,
                iterations: sweeps,
                converged: true,
                step_sizes: vec![high.zero(); n],
                wall,
                seed_wall: Duration::ZERO,
                seed: GuessSource::EigenLow,
                seed_fallback: false,
            })
        }
        Some(order) => {
            let cfg = cfg.clone().order(order);
            if method.is_seeded() {
                seeded_solve(p, low, high, &cfg)
            } else {
                solve(&p.convert(high), Start::Aberth, &cfg)
            }
        }
    }
}

/// Roots to measure errors against: exact integers for Wilkinson, a
/// 2048-bit third-order solve otherwise.
pub fn reference_roots(spec: &ProblemSpec) -> Result<ReferenceRoots> {
    let prec = Precision::new(REFERENCE_BITS).unwrap();
    match &spec.family {
        Family::Wilkinson => Ok(wilkinson(spec.n, prec)?.1),
        Family::Chebyshev => reference_solve(&chebyshev_poly(spec.n, prec)?),
        Family::File(_) => reference_solve(&spec.polynomial()?.convert(prec)),
    }
}

/// Solves `p` at its own precision with the reference settings (third
/// order, eigenvalue seed at up to 512 bits) and checks that the product of
/// the roots reproduces the constant term.
pub fn reference_solve(p: &Polynomial) -> Result<ReferenceRoots> {
    let prec = p.precision();
    let seed_prec = Precision::new(REFERENCE_SEED_BITS.min(prec.bits())).unwrap();
    let margin = REFERENCE_EPS_MARGIN.min(prec.bits() / 4);
    let cfg = SolveConfig::for_precision(prec)
        .order(Order::Third)
        .eps_rel(Float::with_val(64, 1) >> (prec.bits() - margin));
    let res = seeded_solve(p, seed_prec, prec, &cfg)?;
    if !res.converged {
        return Err(Error::InsufficientPrecision {
            what: format!("reference solve stopped after {} sweeps", res.iterations),
        });
    }
    info!(
        "reference for degree {}: {} sweeps, {:.2?}",
        p.degree(),
        res.iterations,
        res.wall
    );
    check_root_product(p, &res.roots.z)?;
    Ok(ReferenceRoots {
        roots: res.roots.z,
        provenance: Provenance::HighPrecisionSolve,
    })
}

/// `prod(-z_i)` against the monic constant term, to `2^(-bits/2)`
/// relative. A zero constant term requires a root of modulus below 1e-290.
pub fn check_root_product(p: &Polynomial, roots: &[MpComplex]) -> Result<()> {
    let prec = p.precision();
    let q = p.make_monic();
    let c0 = &q.coeffs()[0];
    if c0.is_zero() {
        let tiny = Float::with_val(64, Float::parse("1e-290").unwrap());
        return if roots.iter().any(|z| z.abs() <= tiny) {
            Ok(())
        } else {
            Err(Error::InsufficientPrecision {
                what: "no root near zero although the constant term vanishes".into(),
            })
        };
    }
    let mut prod = MpComplex::from_real(prec.real(1));
    for z in roots {
        prod = &prod * &(-z);
    }
    prod.re -= c0;
    let rel = prod.abs() / Float::with_val(prec.bits(), c0.abs_ref());
    if rel > prec.pow2(-(prec.bits() as i32) / 2) {
        return Err(Error::InsufficientPrecision {
            what: format!("root product misses the constant term by {}", sci(&rel, 3)),
        });
    }
    Ok(())
}

/// Per-root relative errors after matching approximations to references.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    /// Indexed like the approximations.
    pub rel_err: Vec<MpReal>,
    /// `matching[i]` is the reference index paired with approximation `i`.
    pub matching: Vec<usize>,
    pub max: MpReal,
    /// Mean of the two middle values when the count is even.
    pub median: MpReal,
}

/// Greedy nearest matching: approximations are taken in order of their
/// distance to the closest reference, each claiming the nearest unused
/// reference. Errors are `|z - a| / max(|a|, 1e-300)`.
pub fn match_and_errors(approx: &[MpComplex], reference: &ReferenceRoots) -> Result<ErrorReport> {
    let n = approx.len();
    if n != reference.len() || n == 0 {
        return Err(Error::InvalidInput(format!(
            "{n} approximations against {} reference roots",
            reference.len()
        )));
    }
    let bits = approx[0].precision().bits().max(reference.roots[0].precision().bits());
    let prec = Precision::new(bits).unwrap();
    let wide: Vec<MpComplex> = approx.iter().map(|z| z.convert(prec)).collect();
    let dist: Vec<Vec<Float>> = wide
        .iter()
        .map(|z| {
            reference
                .roots
                .iter()
                .map(|a| Float::with_val(64, (z - a).abs()))
                .collect()
        })
        .collect();
    let nearest = |row: &[Float]| row.iter().min_by(|a, b| a.total_cmp(b)).unwrap().clone();
    let mut order: Vec<usize> = (0..n).collect();
    let keys: Vec<Float> = dist.iter().map(|row| nearest(row)).collect();
    order.sort_by(|&i, &j| keys[i].total_cmp(&keys[j]));

    let mut used = vec![false; n];
    let mut matching = vec![0; n];
    for i in order {
        let j = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&a, &b| dist[i][a].total_cmp(&dist[i][b]))
            .unwrap();
        used[j] = true;
        matching[i] = j;
    }

    let floor = Float::with_val(64, Float::parse("1e-300").unwrap());
    let rel_err: Vec<MpReal> = (0..n)
        .map(|i| {
            let a = &reference.roots[matching[i]];
            let mut scale = a.abs();
            if scale < floor {
                scale = Float::with_val(bits, &floor);
            }
            (&wide[i] - a).abs() / scale
        })
        .collect();
    let mut sorted: Vec<&MpReal> = rel_err.iter().collect();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let max = sorted[n - 1].clone();
    let median = if n % 2 == 1 {
        sorted[n / 2].clone()
    } else {
        Float::with_val(bits, sorted[n / 2 - 1] + sorted[n / 2]) / 2u32
    };
    Ok(ErrorReport {
        rel_err,
        matching,
        max,
        median,
    })
}

/// One benchmark configuration.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub spec: ProblemSpec,
    pub method: Method,
    pub low: Precision,
    pub high: Precision,
    pub cfg: SolveConfig,
}

/// Outcome of one configuration.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub family: Family,
    pub n: usize,
    pub method: Method,
    pub low_bits: u32,
    pub high_bits: u32,
    pub threads: usize,
    pub sweeps: usize,
    pub wall_seconds: f64,
    pub seed_seconds: f64,
    pub max_rel_err: Option<MpReal>,
    pub converged: bool,
    /// Set when the configuration failed.
    pub error: Option<String>,
    pub roots: Option<RootsFile>,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str =
        "family,n,method,low_bits,high_bits,threads,sweeps,wall_seconds,max_rel_err,converged";

    /// A failed row prints `nan` as its error.
    pub fn csv_line(&self) -> String {
        let err = match &self.max_rel_err {
            Some(e) => sci(e, 6),
            None => "nan".into(),
        };
        format!(
            "{},{},{},{},{},{},{},{:.6},{},{}",
            self.family,
            self.n,
            self.method,
            self.low_bits,
            self.high_bits,
            self.threads,
            self.sweeps,
            self.wall_seconds,
            err,
            self.converged
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(BenchRow::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.csv_line());
            s.push('\n');
        }
        s
    }
}

/// Runs every configuration in order, one at a time. Failures are recorded
/// in their row; reference roots are computed once per problem.
pub fn run_benchmark(matrix: &[BenchConfig]) -> Result<BenchReport> {
    if matrix.is_empty() {
        return Err(Error::InvalidInput("empty benchmark matrix".into()));
    }
    let mut refs: HashMap<(Family, usize), std::result::Result<ReferenceRoots, String>> = HashMap::new();
    let mut report = BenchReport::default();
    for c in matrix {
        let mut row = BenchRow {
            family: c.spec.family.clone(),
            n: c.spec.n,
            method: c.method,
            low_bits: c.low.bits(),
            high_bits: c.high.bits(),
            threads: c.cfg.threads,
            sweeps: 0,
            wall_seconds: 0.0,
            seed_seconds: 0.0,
            max_rel_err: None,
            converged: false,
            error: None,
            roots: None,
        };
        let outcome = c
            .spec
            .polynomial()
            .and_then(|p| run_method(&p, c.method, c.low, c.high, &c.cfg));
        match outcome {
            Ok(res) => {
                row.sweeps = res.iterations;
                row.wall_seconds = res.wall.as_secs_f64().max(1e-9);
                row.seed_seconds = res.seed_wall.as_secs_f64();
                row.converged = res.converged;
                let reference = refs
                    .entry((c.spec.family.clone(), c.spec.n))
                    .or_insert_with(|| reference_roots(&c.spec).map_err(|e| e.to_string()));
                match reference {
                    Ok(r) => match match_and_errors(&res.roots.z, r) {
                        Ok(e) => row.max_rel_err = Some(e.max),
                        Err(e) => row.error = Some(e.to_string()),
                    },
                    Err(e) => row.error = Some(format!("reference: {e}")),
                }
                row.roots = Some(RootsFile {
                    bits: c.high.bits(),
                    method: c.method.to_string(),
                    iterations: res.iterations,
                    converged: res.converged,
                    roots: res.roots.z,
                    steps: res.step_sizes,
                });
            }
            Err(e) => {
                row.error = Some(e.to_string());
            }
        }
        if let Some(e) = &row.error {
            warn!("{} n={} {}: {e}", row.family, row.n, row.method);
        }
        report.rows.push(row);
    }
    Ok(report)
}

/// Parses a benchmark matrix: one configuration per line,
/// `family n method low_bits high_bits eps_rel eps_abs mode threads [coeff_bits]`.
///
/// `family` is `wilkinson`, `chebyshev` or `file:<path>`; tolerances accept
/// `default`. Text after `#` and blank lines are ignored.
pub fn parse_bench_config(text: &str) -> Result<Vec<BenchConfig>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_bench_line(line).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => Error::parse(lineno, other.to_string()),
        })?);
    }
    Ok(out)
}

fn parse_bench_line(line: &str) -> Result<BenchConfig> {
    let t: Vec<&str> = line.split_whitespace().collect();
    if !(9..=10).contains(&t.len()) {
        return Err(Error::InvalidInput(format!(
            "expected 9 or 10 fields, found {}",
            t.len()
        )));
    }
    let num = |s: &str, what: &str| -> Result<u64> {
        s.parse().map_err(|_| Error::InvalidInput(format!("bad {what} `{s}`")))
    };
    let bits = |s: &str, what: &str| -> Result<Precision> { Precision::new(num(s, what)? as u32) };
    let family: Family = t[0].parse()?;
    let n = num(t[1], "degree")? as usize;
    let method: Method = t[2].parse()?;
    let low = bits(t[3], "low_bits")?;
    let high = bits(t[4], "high_bits")?;
    if low.bits() > high.bits() {
        return Err(Error::InvalidInput("low_bits exceeds high_bits".into()));
    }
    let mut cfg = SolveConfig::for_precision(high);
    if t[5] != "default" {
        cfg.eps_rel = parse_tolerance(t[5])?;
    }
    if t[6] != "default" {
        cfg.eps_abs = parse_tolerance(t[6])?;
    }
    cfg.mode = t[7].parse()?;
    cfg.threads = num(t[8], "threads")? as usize;
    if cfg.threads == 0 {
        return Err(Error::InvalidInput("threads must be at least 1".into()));
    }
    let coeff_bits = match t.get(9) {
        Some(s) => bits(s, "coeff_bits")?,
        None => default_coeff_bits(&family, n, high),
    };
    let spec = ProblemSpec::new(family, n, coeff_bits)?;
    Ok(BenchConfig {
        spec,
        method,
        low,
        high,
        cfg,
    })
}

/// Decimal tolerance such as `7.5e-145`; the exponent may exceed the `f64`
/// range.
pub fn parse_tolerance(s: &str) -> Result<MpReal> {
    let v = Float::parse(s)
        .map(|v| Float::with_val(64, v))
        .map_err(|_| Error::InvalidInput(format!("bad tolerance `{s}`")))?;
    if !v.is_finite() || v.is_sign_negative() {
        return Err(Error::InvalidInput(format!("bad tolerance `{s}`")));
    }
    Ok(v)
}

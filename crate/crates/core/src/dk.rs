//! Simultaneous root iterations: second-order Durand–Kerner (Weierstrass
//! correction) and the third-order Ehrlich–Aberth variant, with Aberth's
//! circle for starting values.
//!
//! A sweep updates every unfrozen root once. Roots whose step satisfies
//! `|z' - z| <= eps_rel |z| + eps_abs` are frozen: they stop moving but keep
//! taking part in the other roots' corrections.

use std::sync::RwLock;
use std::time::{Duration, Instant};

use log::{debug, warn};
use rayon::prelude::*;
use rug::{Assign, Float};

use crate::eigen::{GuessSource, InitialGuessSet};
use crate::error::{Error, Result};
use crate::poly::{Horner, MonicPolynomial, Polynomial};
use crate::scalar::{MpComplex, MpReal, Precision};

/// Default sweep cap.
pub const DEFAULT_MAX_ITER: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    /// Weierstrass / Durand–Kerner, quadratic.
    Second,
    /// Ehrlich–Aberth, cubic.
    Third,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UpdateMode {
    /// Every update in a sweep reads the iterate from the start of the
    /// sweep. Deterministic for any thread count.
    Jacobi,
    /// Updates read the live vector, including values already replaced in
    /// the current sweep. With more than one thread the result depends on
    /// scheduling.
    GaussSeidel,
}

/// Current approximations plus per-root convergence state.
#[derive(Clone, Debug, PartialEq)]
pub struct RootVector {
    pub z: Vec<MpComplex>,
    pub frozen: Vec<bool>,
    /// Number of sweeps that produced this vector.
    pub iteration: usize,
}

impl RootVector {
    pub fn new(z: Vec<MpComplex>) -> Self {
        let frozen = vec![false; z.len()];
        RootVector {
            z,
            frozen,
            iteration: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn precision(&self) -> Precision {
        self.z[0].precision()
    }

    /// Rounds every entry to `target`; widening is exact.
    pub fn convert(&self, target: Precision) -> RootVector {
        RootVector {
            z: self.z.iter().map(|z| z.convert(target)).collect(),
            frozen: self.frozen.clone(),
            iteration: self.iteration,
        }
    }
}

/// Stopping rule and iteration controls.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    pub eps_rel: MpReal,
    pub eps_abs: MpReal,
    pub max_iter: usize,
    pub order: Order,
    pub mode: UpdateMode,
    pub threads: usize,
}

impl SolveConfig {
    /// Defaults for a working precision: the default relative tolerance,
    /// `eps_abs = 1e-300`, second order, Jacobi updates, one thread.
    pub fn for_precision(prec: Precision) -> Self {
        SolveConfig {
            eps_rel: default_eps_rel(prec),
            eps_abs: Float::with_val(64, Float::parse("1e-300").unwrap()),
            max_iter: DEFAULT_MAX_ITER,
            order: Order::Second,
            mode: UpdateMode::Jacobi,
            threads: 1,
        }
    }

    pub fn order(mut self, order: Order) -> Self {
        self.order = order;
        self
    }

    pub fn mode(mut self, mode: UpdateMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn eps_rel(mut self, eps: MpReal) -> Self {
        self.eps_rel = eps;
        self
    }

    pub fn eps_abs(mut self, eps: MpReal) -> Self {
        self.eps_abs = eps;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.eps_rel.is_sign_negative() || !self.eps_rel.is_finite() {
            return Err(Error::InvalidInput("eps_rel must be finite and >= 0".into()));
        }
        if self.eps_abs <= 0 || !self.eps_abs.is_finite() {
            return Err(Error::InvalidInput("eps_abs must be finite and > 0".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Relative tolerance used when none is given: `8.6e-68` at 512 bits,
/// `7.5e-145` at 1024 bits and `2^(-0.47 bits)` elsewhere.
pub fn default_eps_rel(prec: Precision) -> MpReal {
    let lit = |s: &str| Float::with_val(64, Float::parse(s).unwrap());
    match prec.bits() {
        512 => lit("8.6e-68"),
        1024 => lit("7.5e-145"),
        b => Float::with_val(64, -(0.47 * b as f64)).exp2(),
    }
}

/// Outcome of [`solve`].
#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub roots: RootVector,
    /// Full sweeps performed.
    pub iterations: usize,
    pub converged: bool,
    /// Size of each root's last update.
    pub step_sizes: Vec<MpReal>,
    /// Time spent in the sweep loop only.
    pub wall: Duration,
    /// Time spent producing the starting values, when measured by the caller.
    pub seed_wall: Duration,
    pub seed: GuessSource,
    /// Set when the requested seeding failed and Aberth's circle was used.
    pub seed_fallback: bool,
}

/// Where [`solve`] starts from.
#[derive(Clone, Debug)]
pub enum Start {
    Aberth,
    Roots(RootVector),
    Guesses(InitialGuessSet),
}

impl From<RootVector> for Start {
    fn from(r: RootVector) -> Self {
        Start::Roots(r)
    }
}

impl From<InitialGuessSet> for Start {
    fn from(g: InitialGuessSet) -> Self {
        Start::Guesses(g)
    }
}

/// `max |n_nz c_i|^(1/(n-i))` over `i < n`, with `n_nz` the number of
/// non-zero `a_i`, `i < n`. Falls back to 1 when every `c_i` vanishes.
pub fn aberth_radius(p: &Polynomial) -> MpReal {
    let n = p.degree();
    let bits = p.precision().bits();
    let q = p.make_monic();
    let nnz = q.coeffs().iter().filter(|c| !c.is_zero()).count() as u32;
    let mut r = Float::new(bits);
    for (i, c) in q.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut t = Float::with_val(bits, c * nnz);
        t.abs_mut();
        t.root_mut((n - i) as u32);
        if t > r {
            r = t;
        }
    }
    if r.is_zero() {
        r.assign(1);
    }
    r
}

/// Aberth's starting values: `n` points equally spaced on the circle of
/// radius [`aberth_radius`] around the root centroid `-c_{n-1}/n`, rotated
/// by `3/(2n)`.
pub fn aberth_init(p: &Polynomial) -> RootVector {
    let n = p.degree();
    let prec = p.precision();
    let bits = prec.bits();
    let q = p.make_monic();
    let center = Float::with_val(bits, -&q.coeffs()[n - 1]) / n as u64;
    let r = aberth_radius(p);
    let two_pi_n = prec.pi() * 2u32 / n as u64;
    let offset = prec.real(3) / (2 * n as u64);
    let z = (0..n)
        .map(|i| {
            let theta = Float::with_val(bits, &two_pi_n * i as u64) + &offset;
            let mut w = MpComplex::cis(&theta).scale(&r);
            w.re += &center;
            w
        })
        .collect();
    RootVector::new(z)
}

/// Read access to the other roots during a sweep.
trait RootView: Sync {
    fn visit<R>(&self, j: usize, f: impl FnOnce(&MpComplex) -> R) -> R;
}

impl RootView for [MpComplex] {
    #[inline]
    fn visit<R>(&self, j: usize, f: impl FnOnce(&MpComplex) -> R) -> R {
        f(&self[j])
    }
}

/// Per-entry locks; readers never observe a partially written value.
struct LiveRoots(Vec<RwLock<MpComplex>>);

impl RootView for LiveRoots {
    #[inline]
    fn visit<R>(&self, j: usize, f: impl FnOnce(&MpComplex) -> R) -> R {
        f(&self.0[j].read().unwrap())
    }
}

enum Fail {
    /// Root collides with another.
    Coincident,
    /// Derivative or third-order denominator vanished.
    Singular,
}

struct Work {
    horner: Horner,
    dre: Float,
    dim: Float,
    acc_re: Float,
    acc_im: Float,
    t: Float,
    u: Float,
    thr: Float,
    bits: u32,
}

impl Work {
    fn new(prec: Precision) -> Self {
        let b = prec.bits();
        Work {
            horner: Horner::new(prec),
            dre: Float::new(b),
            dim: Float::new(b),
            acc_re: Float::new(b),
            acc_im: Float::new(b),
            t: Float::new(b),
            u: Float::new(b),
            thr: Float::new(b),
            bits: b,
        }
    }

    /// Coincidence threshold for root `zi`: `2^(8-bits) max(1, |zi|)`.
    /// Returns an exponent `e` with `2^e >= threshold`.
    fn set_threshold(&mut self, zi: &MpComplex) -> i32 {
        self.thr.assign(zi.re.hypot_ref(&zi.im));
        if self.thr < 1 {
            self.thr.assign(1);
        }
        self.thr >>= self.bits as i32 - 8;
        self.thr.get_exp().unwrap_or(i32::MIN)
    }

    /// `d = zi - zj` into `dre, dim`; true when `|d|` is below threshold.
    #[inline]
    fn diff(&mut self, zi: &MpComplex, zj: &MpComplex, thr_exp: i32) -> bool {
        self.dre.assign(&zi.re - &zj.re);
        self.dim.assign(&zi.im - &zj.im);
        let e = self
            .dre
            .get_exp()
            .unwrap_or(i32::MIN)
            .max(self.dim.get_exp().unwrap_or(i32::MIN));
        // max(|re|, |im|) >= 2^(e-1)
        if e != i32::MIN && e > thr_exp {
            return false;
        }
        self.t.assign(self.dre.hypot_ref(&self.dim));
        self.t < self.thr
    }
}

fn perturbation(prec: Precision, m: u32) -> MpComplex {
    let h = Float::with_val(prec.bits(), m) >> (prec.bits() as i32 / 2);
    MpComplex::new(h.clone(), h)
}

fn dk2_kernel<V: RootView + ?Sized>(
    q: &MonicPolynomial,
    one: &Float,
    zs: &V,
    n: usize,
    i: usize,
    zi: &MpComplex,
    w: &mut Work,
) -> std::result::Result<MpComplex, Fail> {
    let thr_exp = w.set_threshold(zi);
    w.acc_re.assign(1);
    w.acc_im.assign(0);
    for j in (0..n).filter(|&j| j != i) {
        let close = zs.visit(j, |zj| w.diff(zi, zj, thr_exp));
        if close {
            return Err(Fail::Coincident);
        }
        w.t.assign(w.acc_re.mul_sub_mul_ref(&w.dre, &w.acc_im, &w.dim));
        w.u.assign(w.acc_re.mul_add_mul_ref(&w.dim, &w.acc_im, &w.dre));
        std::mem::swap(&mut w.acc_re, &mut w.t);
        std::mem::swap(&mut w.acc_im, &mut w.u);
    }
    w.horner.eval(q.coeffs(), Some(one), zi);
    let (vr, vi) = w.horner.value_parts();
    let value = MpComplex::new(vr.clone(), vi.clone());
    let den = MpComplex::new(w.acc_re.clone(), w.acc_im.clone());
    Ok(zi - &value.div(&den))
}

fn dk3_kernel<V: RootView + ?Sized>(
    p: &Polynomial,
    zs: &V,
    n: usize,
    i: usize,
    zi: &MpComplex,
    w: &mut Work,
) -> std::result::Result<MpComplex, Fail> {
    let thr_exp = w.set_threshold(zi);
    // S = sum_{j != i} 1 / (zi - zj)
    w.acc_re.assign(0);
    w.acc_im.assign(0);
    for j in (0..n).filter(|&j| j != i) {
        let close = zs.visit(j, |zj| w.diff(zi, zj, thr_exp));
        if close {
            return Err(Fail::Coincident);
        }
        w.t.assign(w.dre.mul_add_mul_ref(&w.dre, &w.dim, &w.dim));
        w.t.recip_mut();
        w.acc_re += &w.dre * &w.t;
        w.acc_im -= &w.dim * &w.t;
    }
    w.horner.eval_with_derivative(p.coeffs(), zi);
    let (dr, di) = w.horner.derivative_parts();
    if dr.is_zero() && di.is_zero() {
        return Err(Fail::Singular);
    }
    let deriv = MpComplex::new(dr.clone(), di.clone());
    let (vr, vi) = w.horner.value_parts();
    let newton = MpComplex::new(vr.clone(), vi.clone()).div(&deriv);
    let sum = MpComplex::new(w.acc_re.clone(), w.acc_im.clone());
    let mut den = -&(&newton * &sum);
    den.re += 1u32;
    if den.is_zero() {
        return Err(Fail::Singular);
    }
    Ok(zi - &newton.div(&den))
}

/// The iteration being run, with everything a kernel needs.
enum Method<'a> {
    Second(&'a MonicPolynomial, Float),
    Third(&'a Polynomial),
}

impl Method<'_> {
    fn precision(&self) -> Precision {
        match self {
            Method::Second(q, _) => q.precision(),
            Method::Third(p) => p.precision(),
        }
    }

    /// New value for root `i`. A vanishing derivative is retried once from
    /// a perturbed position.
    fn update<V: RootView + ?Sized>(
        &self,
        zs: &V,
        n: usize,
        i: usize,
        zi: &MpComplex,
        w: &mut Work,
    ) -> std::result::Result<MpComplex, UpdateFail> {
        let run = |z: &MpComplex, w: &mut Work| match self {
            Method::Second(q, one) => dk2_kernel(q, one, zs, n, i, z, w),
            Method::Third(p) => dk3_kernel(p, zs, n, i, z, w),
        };
        match run(zi, w) {
            Ok(z) => Ok(z),
            Err(Fail::Coincident) => Err(UpdateFail::Coincident),
            Err(Fail::Singular) => {
                let moved = zi + &perturbation(self.precision(), 1);
                match run(&moved, w) {
                    Ok(z) => Ok(z),
                    Err(Fail::Coincident) => Err(UpdateFail::Coincident),
                    Err(Fail::Singular) => Err(UpdateFail::Singular),
                }
            }
        }
    }
}

enum UpdateFail {
    Coincident,
    Singular,
}

/// Separates coincident entries: for every pair closer than
/// `2^(8-bits) max(1, |z_i|)` with at least one unfrozen member, the later
/// unfrozen entry moves by `m 2^(-bits/2) (1+i)`, `m` counting its earlier
/// coincident partners. Returns the number of entries moved.
pub fn separate_coincident(roots: &mut RootVector) -> usize {
    let n = roots.len();
    if n < 2 {
        return 0;
    }
    let prec = roots.precision();
    let mut w = Work::new(prec);
    let mut moved = 0;
    let original = roots.z.clone();
    for j in 1..n {
        let mut m = 0u32;
        for i in 0..j {
            if roots.frozen[i] && roots.frozen[j] {
                continue;
            }
            let thr_exp = w.set_threshold(&original[i]);
            if w.diff(&original[i], &original[j], thr_exp) {
                m += 1;
                if roots.frozen[j] {
                    // move the earlier, unfrozen one instead
                    roots.z[i] = &roots.z[i] + &perturbation(prec, 1);
                    moved += 1;
                }
            }
        }
        if m > 0 && !roots.frozen[j] {
            roots.z[j] = &roots.z[j] + &perturbation(prec, m);
            moved += 1;
        }
    }
    moved
}

fn jacobi_sweep(method: &Method<'_>, roots: &mut RootVector) -> Result<()> {
    let n = roots.len();
    let prec = method.precision();
    for _attempt in 0..8 {
        let snapshot: &[MpComplex] = &roots.z;
        let frozen = &roots.frozen;
        let compute = |w: &mut Work, i: usize| {
            if frozen[i] {
                Ok(None)
            } else {
                method.update(snapshot, n, i, &snapshot[i], w).map(Some)
            }
        };
        let updates: Vec<std::result::Result<Option<MpComplex>, UpdateFail>> = if rayon::current_num_threads() > 1 {
            (0..n).into_par_iter().map_init(|| Work::new(prec), compute).collect()
        } else {
            let mut w = Work::new(prec);
            (0..n).map(|i| compute(&mut w, i)).collect()
        };
        let mut collided = false;
        for (i, u) in updates.iter().enumerate() {
            match u {
                Err(UpdateFail::Singular) => return Err(Error::SingularDerivative { index: i }),
                Err(UpdateFail::Coincident) => collided = true,
                Ok(_) => {}
            }
        }
        if collided {
            let moved = separate_coincident(roots);
            debug!("separated {moved} coincident roots");
            continue;
        }
        for (slot, u) in roots.z.iter_mut().zip(updates) {
            if let Ok(Some(z)) = u {
                *slot = z;
            }
        }
        roots.iteration += 1;
        return Ok(());
    }
    Err(Error::InvalidInput("could not separate coincident roots".into()))
}

fn gauss_seidel_update<V: RootView + ?Sized>(
    method: &Method<'_>,
    zs: &V,
    n: usize,
    i: usize,
    zi: &MpComplex,
    w: &mut Work,
) -> Result<MpComplex> {
    let prec = method.precision();
    let mut base = zi.clone();
    for m in 1..=8u32 {
        match method.update(zs, n, i, &base, w) {
            Ok(z) => return Ok(z),
            Err(UpdateFail::Singular) => return Err(Error::SingularDerivative { index: i }),
            Err(UpdateFail::Coincident) => base = zi + &perturbation(prec, m),
        }
    }
    Err(Error::InvalidInput(format!("could not separate root {i}")))
}

#[allow(clippy::needless_range_loop)]
fn gauss_seidel_sweep(method: &Method<'_>, roots: &mut RootVector) -> Result<()> {
    let n = roots.len();
    let prec = method.precision();
    let threads = rayon::current_num_threads();
    if threads <= 1 {
        let mut w = Work::new(prec);
        for i in 0..n {
            if roots.frozen[i] {
                continue;
            }
            let zi = roots.z[i].clone();
            roots.z[i] = gauss_seidel_update(method, roots.z.as_slice(), n, i, &zi, &mut w)?;
        }
    } else {
        let live = LiveRoots(roots.z.drain(..).map(RwLock::new).collect());
        let frozen = &roots.frozen;
        let block = n.div_ceil(threads);
        let outcome: Result<()> = (0..threads).into_par_iter().try_for_each(|b| {
            let mut w = Work::new(prec);
            for i in (b * block)..((b + 1) * block).min(n) {
                if frozen[i] {
                    continue;
                }
                let zi = live.0[i].read().unwrap().clone();
                let z = gauss_seidel_update(method, &live, n, i, &zi, &mut w)?;
                *live.0[i].write().unwrap() = z;
            }
            Ok(())
        });
        roots.z = live.0.into_iter().map(|l| l.into_inner().unwrap()).collect();
        outcome?;
    }
    roots.iteration += 1;
    Ok(())
}

fn sweep(method: &Method<'_>, z: &RootVector, mode: UpdateMode) -> Result<RootVector> {
    let mut next = z.clone();
    match mode {
        UpdateMode::Jacobi => jacobi_sweep(method, &mut next)?,
        UpdateMode::GaussSeidel => gauss_seidel_sweep(method, &mut next)?,
    }
    Ok(next)
}

/// One second-order sweep,
/// `z_i <- z_i - q(z_i) / prod_{j != i} (z_i - z_j)`.
///
/// Runs on the current rayon pool. Frozen entries are copied unchanged.
pub fn dk2_step(q: &MonicPolynomial, z: &RootVector, mode: UpdateMode) -> Result<RootVector> {
    let one = q.precision().real(1);
    sweep(&Method::Second(q, one), z, mode)
}

/// One third-order sweep, `z_i <- z_i - N_i / (1 - N_i S_i)` with
/// `N_i = p(z_i)/p'(z_i)` and `S_i = sum_{j != i} 1/(z_i - z_j)`.
pub fn dk3_step(p: &Polynomial, z: &RootVector, mode: UpdateMode) -> Result<RootVector> {
    sweep(&Method::Third(p), z, mode)
}

/// Per-root test `|z' - z| <= eps_rel |z| + eps_abs`, and whether all pass.
pub fn check_converged(prev: &RootVector, next: &RootVector, cfg: &SolveConfig) -> (Vec<bool>, bool) {
    let flags: Vec<bool> = prev.z.iter().zip(&next.z).map(|(a, b)| step_ok(a, b, cfg).0).collect();
    let all = flags.iter().all(|&f| f);
    (flags, all)
}

fn step_ok(prev: &MpComplex, next: &MpComplex, cfg: &SolveConfig) -> (bool, MpReal) {
    let step = (next - prev).abs();
    let mut bound = prev.abs() * &cfg.eps_rel;
    bound += &cfg.eps_abs;
    (step <= bound, step)
}

/// Runs sweeps of `cfg.order` from `start` until every root is frozen or
/// `cfg.max_iter` sweeps have been made.
///
/// The working precision is that of `p`. Starting values at another
/// precision are converted to it and then separated if any coincide.
#[allow(clippy::needless_range_loop)]
pub fn solve(p: &Polynomial, start: impl Into<Start>, cfg: &SolveConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let prec = p.precision();
    let n = p.degree();
    let (mut roots, seed) = match start.into() {
        Start::Aberth => (aberth_init(p), GuessSource::Aberth),
        Start::Roots(r) => (r.convert(prec), GuessSource::Aberth),
        Start::Guesses(g) => (
            RootVector::new(g.guesses.iter().map(|z| z.convert(prec)).collect()),
            g.source,
        ),
    };
    if roots.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} starting values for a degree-{n} polynomial",
            roots.len()
        )));
    }
    roots.iteration = 0;
    let moved = separate_coincident(&mut roots);
    if moved > 0 {
        debug!("separated {moved} coincident starting values");
    }

    let q = p.make_monic();
    let method = match cfg.order {
        Order::Second => Method::Second(&q, prec.real(1)),
        Order::Third => Method::Third(p),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;

    let mut steps = vec![prec.zero(); n];
    let started = Instant::now();
    let converged = pool.install(|| -> Result<bool> {
        for k in 1..=cfg.max_iter {
            let next = sweep(&method, &roots, cfg.mode)?;
            if let Some(index) = next.z.iter().position(|z| !z.is_finite()) {
                return Err(Error::Divergence { index, sweep: k });
            }
            let mut all = true;
            for i in 0..n {
                if roots.frozen[i] {
                    continue;
                }
                let (ok, step) = step_ok(&roots.z[i], &next.z[i], cfg);
                steps[i] = step;
                if ok {
                    roots.frozen[i] = true;
                } else {
                    all = false;
                }
            }
            roots.z = next.z;
            roots.iteration = k;
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    })?;
    let wall = started.elapsed();
    if !converged {
        warn!(
            "no convergence after {} sweeps ({} of {n} roots frozen)",
            cfg.max_iter,
            roots.frozen.iter().filter(|&&f| f).count()
        );
    }
    Ok(SolveResult {
        iterations: roots.iteration,
        converged,
        step_sizes: steps,
        wall,
        seed_wall: Duration::ZERO,
        seed,
        seed_fallback: false,
        roots,
    })
}

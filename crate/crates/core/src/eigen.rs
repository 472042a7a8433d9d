//! The eigenvalue route: companion matrix, power-of-two balancing and
//! Francis double-shift QR on the upper Hessenberg form.
//!
//! The companion matrix is stored transposed (ones on the subdiagonal,
//! `-c_i` down the last column) so it is upper Hessenberg from the start and
//! no reduction step is needed.

use std::cmp::Ordering;

use rug::ops::NegAssign;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::poly::{MonicPolynomial, Polynomial};
use crate::scalar::{MpComplex, Precision};

/// Default QR budget per eigenvalue.
pub const DEFAULT_MAX_SWEEPS: usize = 30;

/// Dense square matrix, row-major, every entry at one precision.
#[derive(Clone, Debug, PartialEq)]
pub struct CompanionMatrix {
    n: usize,
    data: Vec<Float>,
    prec: Precision,
}

impl CompanionMatrix {
    /// Builds a matrix from rows. Entries are rounded to `prec`.
    pub fn from_rows(rows: &[Vec<Float>], prec: Precision) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix must be square and non-empty".into()));
        }
        let data = rows.iter().flatten().map(|x| Float::with_val(prec.bits(), x)).collect();
        Ok(CompanionMatrix { n, data, prec })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn get(&self, i: usize, j: usize) -> &Float {
        &self.data[i * self.n + j]
    }

    pub fn is_upper_hessenberg(&self) -> bool {
        (0..self.n).all(|i| (0..i.saturating_sub(1)).all(|j| self.get(i, j).is_zero()))
    }

    /// Largest entry magnitude, rounded to 64 bits.
    pub fn max_abs(&self) -> Float {
        let mut best = Float::new(64);
        for x in &self.data {
            if x.cmp_abs(&best) == Some(Ordering::Greater) {
                best.assign(x.abs_ref());
            }
        }
        best
    }

    pub fn trace(&self) -> Float {
        let mut t = Float::new(self.prec.bits());
        for i in 0..self.n {
            t += self.get(i, i);
        }
        t
    }
}

/// Upper Hessenberg companion matrix of `q`.
pub fn companion_matrix(q: &MonicPolynomial) -> CompanionMatrix {
    let n = q.degree();
    let prec = q.precision();
    let mut data = vec![Float::new(prec.bits()); n * n];
    for i in 1..n {
        data[i * n + i - 1].assign(1);
    }
    for (i, c) in q.coeffs().iter().enumerate() {
        data[i * n + n - 1].assign(-c);
    }
    CompanionMatrix { n, data, prec }
}

/// Off-diagonal 1-norms of row `i` and column `i`, at 64 bits.
fn row_col_norms(m: &CompanionMatrix, i: usize) -> (Float, Float) {
    let mut r = Float::new(64);
    let mut c = Float::new(64);
    for j in 0..m.n {
        if j != i {
            r += &*m.get(i, j).as_abs();
            c += &*m.get(j, i).as_abs();
        }
    }
    (r, c)
}

/// Balances `m` by a diagonal similarity of exact powers of two.
///
/// Returns the balanced matrix and the exponents `e_i`, where the result is
/// `D^{-1} M D` with `D = diag(2^{e_i})`. On return every row with non-zero
/// off-diagonal row and column norms has them within a factor of two.
#[allow(clippy::needless_range_loop)]
pub fn balance_with_scaling(m: &CompanionMatrix) -> (CompanionMatrix, Vec<i32>) {
    let mut out = m.clone();
    let n = out.n;
    let mut exps = vec![0i32; n];
    for _pass in 0..1000 {
        let mut changed = false;
        for i in 0..n {
            let (r, c) = row_col_norms(&out, i);
            if r.is_zero() || c.is_zero() {
                continue;
            }
            // log2(c / r)
            let (cm, ce) = c.to_f64_exp();
            let (rm, re) = r.to_f64_exp();
            let log_ratio = (cm / rm).log2() + (ce - re) as f64;
            if log_ratio.abs() <= 1.0 {
                continue;
            }
            // column i times 2^k, row i times 2^-k: c/r moves by 4^k
            let k = (-log_ratio / 2.0).round() as i32;
            if k == 0 {
                continue;
            }
            for j in 0..n {
                if j != i {
                    out.data[j * n + i] <<= k;
                    out.data[i * n + j] >>= k;
                }
            }
            exps[i] += k;
            changed = true;
        }
        if !changed {
            break;
        }
    }
    (out, exps)
}

pub fn balance(m: &CompanionMatrix) -> CompanionMatrix {
    balance_with_scaling(m).0
}

/// Eigenvalues of an upper Hessenberg matrix by implicit double-shift QR.
pub fn hessenberg_qr_eigenvalues(m: &CompanionMatrix, max_sweeps: usize) -> Result<Vec<MpComplex>> {
    hessenberg_qr(m, max_sweeps).map(|(ev, _)| ev)
}

/// As [`hessenberg_qr_eigenvalues`], also reporting the number of
/// double-shift sweeps performed.
///
/// A subdiagonal entry is deflated when
/// `|h[i+1][i]| <= eps (|h[i][i]| + |h[i+1][i+1]|)`, `eps = 2^(2-bits)`.
/// Conjugate pairs are emitted adjacently and are exact conjugates.
pub fn hessenberg_qr(m: &CompanionMatrix, max_sweeps: usize) -> Result<(Vec<MpComplex>, usize)> {
    let n = m.n;
    let bits = m.prec.bits();
    let budget = max_sweeps.saturating_mul(n).max(1);
    let mut a = m.data.clone();
    let ix = |i: usize, j: usize| i * n + j;

    let f = || Float::new(bits);
    let eps = Float::with_val(bits, 1) >> (bits as i32 - 2);
    let (mut p, mut q, mut r, mut s, mut t) = (f(), f(), f(), f(), f());
    let (mut u, mut v, mut w, mut x, mut y, mut z) = (f(), f(), f(), f(), f(), f());
    let mut tmp = f();
    // MPFR's one- and two-limb fast paths cover mul and add but not fma
    let fused = bits > 128;

    let mut anorm = f();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += &*a[ix(i, j)].as_abs();
        }
    }

    let mut wr: Vec<Option<(Float, Float)>> = vec![None; n];
    let mut sweeps = 0usize;
    let mut nn = n as isize - 1;

    let partial = |wr: &[Option<(Float, Float)>]| -> Vec<MpComplex> {
        wr.iter()
            .flatten()
            .map(|(re, im)| MpComplex::new(re.clone(), im.clone()))
            .collect()
    };

    while nn >= 0 {
        let nu = nn as usize;
        let mut its = 0usize;
        loop {
            // look for a single small subdiagonal element
            let mut l = nu;
            while l > 0 {
                s.assign(&*a[ix(l - 1, l - 1)].as_abs());
                s += &*a[ix(l, l)].as_abs();
                if s.is_zero() {
                    s.assign(&anorm);
                }
                tmp.assign(&eps * &s);
                if a[ix(l, l - 1)].cmp_abs(&tmp) != Some(Ordering::Greater) {
                    a[ix(l, l - 1)].assign(0);
                    break;
                }
                l -= 1;
            }
            x.assign(&a[ix(nu, nu)]);
            if l == nu {
                // one root found
                let re = Float::with_val(bits, &x + &t);
                wr[nu] = Some((re, f()));
                nn -= 1;
                break;
            }
            y.assign(&a[ix(nu - 1, nu - 1)]);
            w.assign(&a[ix(nu, nu - 1)] * &a[ix(nu - 1, nu)]);
            if l == nu - 1 {
                // two roots found
                p.assign(&y - &x);
                p >>= 1;
                q.assign(p.square_ref());
                q += &w;
                z.assign(&*q.as_abs());
                z.sqrt_mut();
                x += &t;
                if q >= 0 {
                    if p.is_sign_negative() {
                        z -= &p;
                        z.neg_assign();
                    } else {
                        z += &p;
                    }
                    let big = Float::with_val(bits, &x + &z);
                    let small = if z.is_zero() {
                        big.clone()
                    } else {
                        tmp.assign(&w / &z);
                        Float::with_val(bits, &x - &tmp)
                    };
                    wr[nu - 1] = Some((big, f()));
                    wr[nu] = Some((small, f()));
                } else {
                    let re = Float::with_val(bits, &x + &p);
                    wr[nu - 1] = Some((re.clone(), z.clone()));
                    wr[nu] = Some((re, Float::with_val(bits, -&z)));
                }
                nn -= 2;
                break;
            }

            // no roots yet: one double-shift sweep on rows/cols l..=nu
            sweeps += 1;
            if sweeps > budget {
                return Err(Error::NonConvergence {
                    sweeps: budget,
                    n,
                    partial: partial(&wr),
                });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += &x;
                for i in 0..=nu {
                    a[ix(i, i)] -= &x;
                }
                s.assign(&*a[ix(nu, nu - 1)].as_abs());
                s += &*a[ix(nu - 1, nu - 2)].as_abs();
                x.assign(&s * 0.75f64);
                y.assign(&x);
                w.assign(s.square_ref());
                w *= -0.4375f64;
            }
            its += 1;

            // look for two consecutive small subdiagonal elements
            let mut mm = nu - 2;
            loop {
                z.assign(&a[ix(mm, mm)]);
                r.assign(&x - &z);
                s.assign(&y - &z);
                // p = (r*s - w) / a[mm+1][mm] + a[mm][mm+1]
                p.assign(&r * &s);
                p -= &w;
                p /= &a[ix(mm + 1, mm)];
                p += &a[ix(mm, mm + 1)];
                q.assign(&a[ix(mm + 1, mm + 1)] - &z);
                q -= &r;
                q -= &s;
                r.assign(&a[ix(mm + 2, mm + 1)]);
                s.assign(&*p.as_abs());
                s += &*q.as_abs();
                s += &*r.as_abs();
                p /= &s;
                q /= &s;
                r /= &s;
                if mm == l {
                    break;
                }
                u.assign(&*q.as_abs());
                u += &*r.as_abs();
                u *= &*a[ix(mm, mm - 1)].as_abs();
                v.assign(&*a[ix(mm - 1, mm - 1)].as_abs());
                v += &*z.as_abs();
                v += &*a[ix(mm + 1, mm + 1)].as_abs();
                v *= &*p.as_abs();
                tmp.assign(&eps * &v);
                if u <= tmp {
                    break;
                }
                mm -= 1;
            }
            for i in mm..nu - 1 {
                a[ix(i + 2, i)].assign(0);
                if i != mm {
                    a[ix(i + 2, i - 1)].assign(0);
                }
            }
            for k in mm..nu {
                if k != mm {
                    p.assign(&a[ix(k, k - 1)]);
                    q.assign(&a[ix(k + 1, k - 1)]);
                    r.assign(0);
                    if k + 1 != nu {
                        r.assign(&a[ix(k + 2, k - 1)]);
                    }
                    x.assign(&*p.as_abs());
                    x += &*q.as_abs();
                    x += &*r.as_abs();
                    if !x.is_zero() {
                        p /= &x;
                        q /= &x;
                        r /= &x;
                    }
                }
                // s = sign(p) * sqrt(p^2 + q^2 + r^2)
                s.assign(p.mul_add_mul_ref(&p, &q, &q));
                s += Float::with_val(bits, r.square_ref());
                s.sqrt_mut();
                if p.is_sign_negative() {
                    s.neg_assign();
                }
                if s.is_zero() {
                    continue;
                }
                if k == mm {
                    if l != mm {
                        a[ix(k, k - 1)].neg_assign();
                    }
                } else {
                    a[ix(k, k - 1)].assign(&s * &x);
                    a[ix(k, k - 1)].neg_assign();
                }
                p += &s;
                x.assign(&p / &s);
                y.assign(&q / &s);
                z.assign(&r / &s);
                q /= &p;
                r /= &p;
                // row modification
                for j in k..=nu {
                    p.assign(&a[ix(k, j)]);
                    add_mul(&mut p, &q, &a[ix(k + 1, j)], &mut tmp, fused);
                    if k + 1 != nu {
                        add_mul(&mut p, &r, &a[ix(k + 2, j)], &mut tmp, fused);
                        sub_mul(&mut a[ix(k + 2, j)], &p, &z, &mut tmp, fused);
                    }
                    sub_mul(&mut a[ix(k + 1, j)], &p, &y, &mut tmp, fused);
                    sub_mul(&mut a[ix(k, j)], &p, &x, &mut tmp, fused);
                }
                // column modification
                let mmin = nu.min(k + 3);
                for i in l..=mmin {
                    p.assign(&x * &a[ix(i, k)]);
                    add_mul(&mut p, &y, &a[ix(i, k + 1)], &mut tmp, fused);
                    if k + 1 != nu {
                        add_mul(&mut p, &z, &a[ix(i, k + 2)], &mut tmp, fused);
                        sub_mul(&mut a[ix(i, k + 2)], &p, &r, &mut tmp, fused);
                    }
                    sub_mul(&mut a[ix(i, k + 1)], &p, &q, &mut tmp, fused);
                    a[ix(i, k)] -= &p;
                }
            }
        }
    }
    let eigenvalues = wr
        .into_iter()
        .map(|e| {
            let (re, im) = e.expect("every slot is filled on exit");
            MpComplex::new(re, im)
        })
        .collect();
    Ok((eigenvalues, sweeps))
}

fn add_mul(acc: &mut Float, a: &Float, b: &Float, tmp: &mut Float, fused: bool) {
    if fused {
        *acc += a * b;
    } else {
        tmp.assign(a * b);
        *acc += &*tmp;
    }
}

fn sub_mul(acc: &mut Float, a: &Float, b: &Float, tmp: &mut Float, fused: bool) {
    if fused {
        *acc -= a * b;
    } else {
        tmp.assign(a * b);
        *acc -= &*tmp;
    }
}

/// Where a set of initial guesses came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuessSource {
    /// Companion eigenvalues computed at a lower precision.
    EigenLow,
    /// Aberth's circle.
    Aberth,
}

/// Initial guesses for a simultaneous iteration, at the precision they
/// were produced in.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialGuessSet {
    pub guesses: Vec<MpComplex>,
    pub source: GuessSource,
    pub precision: Precision,
}

impl InitialGuessSet {
    pub fn len(&self) -> usize {
        self.guesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.guesses.is_empty()
    }
}

/// All roots of `p` as companion eigenvalues computed at precision `low`.
pub fn eigen_roots(p: &Polynomial, low: Precision) -> Result<InitialGuessSet> {
    eigen_roots_with(p, low, DEFAULT_MAX_SWEEPS).map(|(g, _)| g)
}

/// As [`eigen_roots`] with an explicit sweep budget; also returns the
/// number of QR sweeps.
pub fn eigen_roots_with(p: &Polynomial, low: Precision, max_sweeps: usize) -> Result<(InitialGuessSet, usize)> {
    let q = p.convert(low).make_monic();
    let h = balance(&companion_matrix(&q));
    let (guesses, sweeps) = hessenberg_qr(&h, max_sweeps)?;
    Ok((
        InitialGuessSet {
            guesses,
            source: GuessSource::EigenLow,
            precision: low,
        },
        sweeps,
    ))
}

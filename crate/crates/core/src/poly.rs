//! Real-coefficient polynomials, Horner evaluation and the two benchmark
//! families: Wilkinson's product `(x-1)(x-2)...(x-n)` and the node
//! polynomial of equal-weight Chebyshev quadrature on `[-1, 1]`.

use std::fmt;
use std::str::FromStr;

use rug::{Assign, Float, Integer};

use crate::error::{Error, Result};
use crate::scalar::{convert, MpComplex, MpReal, Precision};

/// Which generator produced a polynomial. Carried into coefficient files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolyKind {
    Wilkinson,
    Chebyshev,
    Generic,
}

impl fmt::Display for PolyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolyKind::Wilkinson => "wilkinson",
            PolyKind::Chebyshev => "chebyshev",
            PolyKind::Generic => "generic",
        })
    }
}

impl FromStr for PolyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wilkinson" => Ok(PolyKind::Wilkinson),
            "chebyshev" => Ok(PolyKind::Chebyshev),
            "generic" => Ok(PolyKind::Generic),
            _ => Err(Error::InvalidInput(format!("unknown polynomial kind {s:?}"))),
        }
    }
}

/// `p(x) = a_0 + a_1 x + ... + a_n x^n` with `a_n != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<MpReal>,
    kind: PolyKind,
}

impl Polynomial {
    /// Builds a polynomial from `a_0..a_n`. All coefficients are rounded to
    /// the precision of `a_0`.
    pub fn new(coeffs: Vec<MpReal>) -> Result<Self> {
        Self::with_kind(coeffs, PolyKind::Generic)
    }

    pub fn with_kind(mut coeffs: Vec<MpReal>, kind: PolyKind) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput("polynomial degree must be at least 1".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        if coeffs.last().unwrap().is_zero() {
            return Err(Error::DegenerateLeadingCoefficient);
        }
        let prec = coeffs[0].prec();
        for c in coeffs.iter_mut().skip(1) {
            if c.prec() != prec {
                *c = Float::with_val(prec, &*c);
            }
        }
        Ok(Polynomial { coeffs, kind })
    }

    /// Convenience constructor from `f64` coefficients.
    pub fn from_f64(coeffs: &[f64], prec: Precision) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| prec.real(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `a_0..a_n`.
    pub fn coeffs(&self) -> &[MpReal] {
        &self.coeffs
    }

    pub fn leading(&self) -> &MpReal {
        self.coeffs.last().unwrap()
    }

    pub fn kind(&self) -> PolyKind {
        self.kind
    }

    pub fn precision(&self) -> Precision {
        Precision::new(self.coeffs[0].prec()).expect("constructed from a valid precision")
    }

    /// Same polynomial with coefficients rounded to `target`.
    pub fn convert(&self, target: Precision) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| convert(c, target)).collect(),
            kind: self.kind,
        }
    }

    /// `c_i = a_i / a_n`, rounded at this polynomial's precision.
    pub fn make_monic(&self) -> MonicPolynomial {
        let lead = self.leading();
        let prec = self.precision();
        let coeffs = self.coeffs[..self.degree()]
            .iter()
            .map(|a| Float::with_val(prec.bits(), a / lead))
            .collect();
        MonicPolynomial { coeffs, prec }
    }

    /// Horner evaluation at `z`.
    pub fn eval(&self, z: &MpComplex) -> MpComplex {
        let mut h = Horner::new(self.precision());
        h.eval(&self.coeffs, None, z);
        h.value()
    }

    /// `(p(z), p'(z))` by a single fused Horner pass.
    pub fn eval_with_derivative(&self, z: &MpComplex) -> (MpComplex, MpComplex) {
        let mut h = Horner::new(self.precision());
        h.eval_with_derivative(&self.coeffs, z);
        (h.value(), h.derivative())
    }
}

/// `q(x) = x^n + c_{n-1} x^{n-1} + ... + c_0`; the leading one is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPolynomial {
    coeffs: Vec<MpReal>,
    prec: Precision,
}

impl MonicPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_0..c_{n-1}`.
    pub fn coeffs(&self) -> &[MpReal] {
        &self.coeffs
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn convert(&self, target: Precision) -> MonicPolynomial {
        MonicPolynomial {
            coeffs: self.coeffs.iter().map(|c| convert(c, target)).collect(),
            prec: target,
        }
    }

    pub fn eval(&self, z: &MpComplex) -> MpComplex {
        let mut h = Horner::new(self.prec);
        let one = self.prec.real(1);
        h.eval(&self.coeffs, Some(&one), z);
        h.value()
    }

    /// Back to a general polynomial with `a_n = 1`.
    pub fn to_polynomial(&self) -> Polynomial {
        let mut coeffs = self.coeffs.clone();
        coeffs.push(self.prec.real(1));
        Polynomial {
            coeffs,
            kind: PolyKind::Generic,
        }
    }
}

/// Where a set of reference roots came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Known in closed form.
    Analytic,
    /// Computed by a high-precision solve.
    HighPrecisionSolve,
}

/// Roots against which approximations are scored.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceRoots {
    pub roots: Vec<MpComplex>,
    pub provenance: Provenance,
}

impl ReferenceRoots {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Reusable Horner state. Complex accumulator times complex `z` is formed
/// with one rounding per part (fused multiply-multiply-add).
pub(crate) struct Horner {
    re: Float,
    im: Float,
    dre: Float,
    dim: Float,
    tmp: Float,
    tmp2: Float,
}

impl Horner {
    pub(crate) fn new(prec: Precision) -> Self {
        let b = prec.bits();
        Horner {
            re: Float::new(b),
            im: Float::new(b),
            dre: Float::new(b),
            dim: Float::new(b),
            tmp: Float::new(b),
            tmp2: Float::new(b),
        }
    }

    /// Evaluates `lead·z^k + coeffs[k-1] z^{k-1} + ... + coeffs[0]` where
    /// `k = coeffs.len()` when `lead` is given; otherwise the last
    /// coefficient is the leading one.
    pub(crate) fn eval(&mut self, coeffs: &[MpReal], lead: Option<&MpReal>, z: &MpComplex) {
        let (body, top) = match lead {
            Some(l) => (coeffs, l),
            None => (&coeffs[..coeffs.len() - 1], coeffs.last().unwrap()),
        };
        self.re.assign(top);
        self.im.assign(0);
        for a in body.iter().rev() {
            self.mul_z(z);
            self.re += a;
        }
    }

    pub(crate) fn eval_with_derivative(&mut self, coeffs: &[MpReal], z: &MpComplex) {
        let n = coeffs.len() - 1;
        self.re.assign(&coeffs[n]);
        self.im.assign(0);
        self.dre.assign(0);
        self.dim.assign(0);
        for a in coeffs[..n].iter().rev() {
            // d <- d*z + acc
            self.tmp.assign(self.dre.mul_sub_mul_ref(&z.re, &self.dim, &z.im));
            self.tmp2.assign(self.dre.mul_add_mul_ref(&z.im, &self.dim, &z.re));
            std::mem::swap(&mut self.dre, &mut self.tmp);
            std::mem::swap(&mut self.dim, &mut self.tmp2);
            self.dre += &self.re;
            self.dim += &self.im;
            // acc <- acc*z + a
            self.mul_z(z);
            self.re += a;
        }
    }

    #[inline]
    fn mul_z(&mut self, z: &MpComplex) {
        self.tmp.assign(self.re.mul_sub_mul_ref(&z.re, &self.im, &z.im));
        self.tmp2.assign(self.re.mul_add_mul_ref(&z.im, &self.im, &z.re));
        std::mem::swap(&mut self.re, &mut self.tmp);
        std::mem::swap(&mut self.im, &mut self.tmp2);
    }

    pub(crate) fn value_parts(&self) -> (&Float, &Float) {
        (&self.re, &self.im)
    }

    pub(crate) fn derivative_parts(&self) -> (&Float, &Float) {
        (&self.dre, &self.dim)
    }

    fn value(&self) -> MpComplex {
        MpComplex::new(self.re.clone(), self.im.clone())
    }

    fn derivative(&self) -> MpComplex {
        MpComplex::new(self.dre.clone(), self.dim.clone())
    }
}

/// Bits needed to hold `v` exactly in a binary floating-point mantissa.
fn mantissa_bits(v: &Integer) -> u32 {
    if *v == 0 {
        return 0;
    }
    let trailing = v.find_one(0).unwrap_or(0);
    v.significant_bits() - trailing
}

/// Wilkinson's polynomial `prod_{i=1..n} (x - i)` with its integer roots.
///
/// The expansion is carried out in exact integers; every intermediate and
/// final coefficient must fit the mantissa of `prec`.
pub fn wilkinson(n: usize, prec: Precision) -> Result<(Polynomial, ReferenceRoots)> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    // coefficients of the running product, lowest degree first
    let mut c: Vec<Integer> = vec![Integer::from(1)];
    for i in 1..=n {
        let mut next = vec![Integer::new(); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= Integer::from(ck * i as u64);
        }
        if let Some(worst) = next.iter().map(mantissa_bits).max() {
            if worst > prec.bits() {
                return Err(Error::InsufficientPrecision {
                    what: format!(
                        "wilkinson({n}) needs a {worst}-bit mantissa at factor {i}, context has {}",
                        prec.bits()
                    ),
                });
            }
        }
        c = next;
    }
    let coeffs = c.iter().map(|k| prec.real(k)).collect();
    let roots = (1..=n).map(|i| MpComplex::from_real(prec.real(i as u64))).collect();
    Ok((
        Polynomial::with_kind(coeffs, PolyKind::Wilkinson)?,
        ReferenceRoots {
            roots,
            provenance: Provenance::Analytic,
        },
    ))
}

/// Coefficients `b_0..b_n` of the monic node polynomial
/// `x^n + b_1 x^{n-1} + ... + b_n`, via Newton's identities from the power
/// sums `s_m = n/(m+1)` (even `m`), `s_m = 0` (odd `m`). Rounded at `prec`
/// throughout, so the low-order coefficients lose bits to cancellation.
fn chebyshev_newton(n: usize, prec: Precision) -> Vec<Float> {
    let bits = prec.bits();
    let mut b = vec![Float::new(bits); n + 1];
    b[0].assign(1);
    let mut acc = Float::new(bits);
    let mut term = Float::new(bits);
    for k in 1..=n / 2 {
        // b_{2k} = -(n / 2k) * sum_{j=1..k} b_{2k-2j} / (2j+1)
        acc.assign(0);
        for j in 1..=k {
            term.assign(&b[2 * k - 2 * j] / (2 * j as u64 + 1));
            acc += &term;
        }
        acc *= n as u64;
        acc /= 2 * k as u64;
        b[2 * k].assign(-&acc);
    }
    b
}

/// Monic polynomial whose roots are the abscissas of the `n`-point
/// equal-weight Chebyshev quadrature rule on `[-1, 1]`.
///
/// Coefficients are computed at twice the bits of `prec`, recomputed at
/// four times, and must agree to `prec` before being rounded to it.
pub fn chebyshev_poly(n: usize, prec: Precision) -> Result<Polynomial> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let gen = chebyshev_newton(n, prec.scaled(2));
    let check = chebyshev_newton(n, prec.scaled(4));
    let tol = Float::with_val(prec.bits(), 1) >> prec.bits();
    let mut diff = Float::new(prec.bits() * 4);
    let mut bound = Float::new(prec.bits() * 4);
    for (m, (g, c)) in gen.iter().zip(&check).enumerate() {
        diff.assign(g - c);
        diff.abs_mut();
        bound.assign(c.abs_ref());
        bound *= &tol;
        if diff > bound {
            return Err(Error::InsufficientPrecision {
                what: format!(
                    "chebyshev({n}) coefficient of x^{} is not accurate to {} bits when generated at {} bits",
                    n - m,
                    prec.bits(),
                    prec.bits() * 2
                ),
            });
        }
    }
    // a_i = b_{n-i}
    let coeffs = gen.iter().rev().map(|b| convert(b, prec)).collect();
    Polynomial::with_kind(coeffs, PolyKind::Chebyshev)
}

/// Distance of `|(z+1)^{(z+1)/2} (z-1)^{-(z-1)/2}|` from 2, principal
/// branches. Chebyshev quadrature nodes crowd onto the zero set of this
/// quantity as `n` grows.
pub fn limit_curve_residual(z: &MpComplex) -> Result<MpReal> {
    if z.im.is_zero() && (z.re == 1 || z.re == -1) {
        return Err(Error::BranchPoint {
            point: z.re.to_f64() as i32,
        });
    }
    let b = z.re.prec();
    let one = Float::with_val(b, 1);
    let zp = MpComplex::new(Float::with_val(b, &z.re + &one), z.im.clone());
    let zm = MpComplex::new(Float::with_val(b, &z.re - &one), z.im.clone());
    let lp = zp.ln();
    let lm = zm.ln();
    // Re((zp/2) ln zp) - Re((zm/2) ln zm)
    let rp = Float::with_val(b, zp.re.mul_sub_mul_ref(&lp.re, &zp.im, &lp.im));
    let rm = Float::with_val(b, zm.re.mul_sub_mul_ref(&lm.re, &zm.im, &lm.im));
    let w = Float::with_val(b, &rp - &rm) / 2u32;
    let modulus = w.exp();
    Ok((modulus - 2u32).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rug::ops::Pow;

    fn p(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    #[test]
    fn make_monic_examples() {
        let q = Polynomial::from_f64(&[2.0, -3.0, 1.0], p(106)).unwrap().make_monic();
        assert_eq!(q.coeffs(), &[p(106).real(2), p(106).real(-3)]);
        let q = Polynomial::from_f64(&[2.0, 4.0], p(106)).unwrap().make_monic();
        assert_eq!(q.coeffs(), &[p(106).real(0.5)]);
        let (w, _) = wilkinson(20, p(128)).unwrap();
        assert_eq!(w.make_monic().coeffs(), &w.coeffs()[..20]);
    }

    #[test]
    fn zero_leading_coefficient_rejected() {
        assert!(matches!(
            Polynomial::from_f64(&[1.0, 0.0], p(106)),
            Err(Error::DegenerateLeadingCoefficient)
        ));
        assert!(Polynomial::from_f64(&[1.0], p(106)).is_err());
    }

    #[test]
    fn eval_examples() {
        let pr = p(106);
        let x2m1 = Polynomial::from_f64(&[-1.0, 0.0, 1.0], pr).unwrap();
        assert_eq!(x2m1.eval(&pr.complex(2, 0)), pr.complex(3, 0));
        let (w, _) = wilkinson(20, p(128)).unwrap();
        assert!(w.eval(&p(128).complex(1, 0)).is_zero());
        let x2p1 = Polynomial::from_f64(&[1.0, 0.0, 1.0], pr).unwrap();
        assert!(x2p1.eval(&pr.complex(0, 1)).is_zero());
        assert!(x2p1.make_monic().eval(&pr.complex(0, 1)).is_zero());
    }

    #[test]
    fn eval_with_derivative_examples() {
        let pr = p(106);
        let x2m1 = Polynomial::from_f64(&[-1.0, 0.0, 1.0], pr).unwrap();
        let (v, d) = x2m1.eval_with_derivative(&pr.complex(2, 0));
        assert_eq!((v, d), (pr.complex(3, 0), pr.complex(4, 0)));

        let x3 = Polynomial::from_f64(&[0.0, 0.0, 0.0, 1.0], pr).unwrap();
        let (v, d) = x3.eval_with_derivative(&MpComplex::zero(pr));
        assert!(v.is_zero() && d.is_zero());

        let (w, _) = wilkinson(20, p(128)).unwrap();
        let (v, d) = w.eval_with_derivative(&p(128).complex(1, 0));
        assert!(v.is_zero());
        let f19 = Integer::from(Integer::factorial(19));
        assert_eq!(d.re.to_integer().unwrap(), -f19);
        assert!(d.im.is_zero());
    }

    #[test]
    fn wilkinson_coefficients() {
        let (w, roots) = wilkinson(20, p(106)).unwrap();
        let c = w.coeffs();
        assert_eq!(c[0].to_integer().unwrap(), Integer::from(2432902008176640000u64));
        assert_eq!(c[1].to_integer().unwrap(), Integer::from(-8752948036761600000i64));
        assert_eq!(c[19], -210);
        assert_eq!(c[20], 1);
        assert_eq!(roots.len(), 20);
        assert_eq!(roots.provenance, Provenance::Analytic);

        let (w1, r1) = wilkinson(1, p(24)).unwrap();
        assert_eq!(w1.coeffs(), &[p(24).real(-1), p(24).real(1)]);
        assert_eq!(r1.roots, vec![p(24).complex(1, 0)]);

        let (w128, _) = wilkinson(128, p(1024)).unwrap();
        let a0 = w128.coeffs()[0].to_f64_exp();
        let decimal = w128.coeffs()[0].clone().log10().to_f64();
        assert!((decimal - 215.0).abs() < 1.0, "{a0:?}");
        let lead = Float::with_val(64, &w128.coeffs()[0]) / Float::with_val(64, 10).pow(215u32);
        assert!((lead.to_f64() - 3.8562).abs() < 1e-4, "{lead}");
    }

    #[test]
    fn wilkinson_insufficient_precision() {
        assert!(matches!(
            wilkinson(128, p(106)),
            Err(Error::InsufficientPrecision { .. })
        ));
        // 25! needs 84 - 22 = 62 bits; the largest coefficient of wilkinson(25) more
        assert!(wilkinson(25, p(24)).is_err());
    }

    #[test]
    fn wilkinson_is_integer_with_sum_coefficient() {
        for n in [1usize, 5, 20, 64] {
            let (w, _) = wilkinson(n, p(512)).unwrap();
            assert!(w.coeffs().iter().all(|c| c.is_integer()));
            let expected = -((n * (n + 1) / 2) as i64);
            assert_eq!(w.coeffs()[n - 1], expected);
        }
    }

    #[test]
    fn chebyshev_small_cases() {
        let pr = p(256);
        let c1 = chebyshev_poly(1, pr).unwrap();
        assert_eq!(c1.coeffs(), &[pr.real(0), pr.real(1)]);

        let c2 = chebyshev_poly(2, pr).unwrap();
        let third = Float::with_val(256, -1) / 3u32;
        assert_eq!(c2.coeffs(), &[third, pr.real(0), pr.real(1)]);

        let c3 = chebyshev_poly(3, pr).unwrap();
        assert_eq!(c3.coeffs(), &[pr.real(0), pr.real(-0.5), pr.real(0), pr.real(1)]);
    }

    #[test]
    fn chebyshev_odd_terms_vanish() {
        for n in 1..=40 {
            let c = chebyshev_poly(n, p(128)).unwrap();
            for k in (0..n).rev().step_by(2) {
                // a_{n-1}, a_{n-3}, ...
                assert!(c.coeffs()[k].is_zero(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn chebyshev_cancellation_detected() {
        // n=512 loses ~330 bits; generating at 2*256 cannot deliver 256.
        assert!(matches!(
            chebyshev_poly(512, p(256)),
            Err(Error::InsufficientPrecision { .. })
        ));
        assert!(chebyshev_poly(256, p(256)).is_ok());
    }

    #[test]
    fn chebyshev_matches_exact_rational_recursion() {
        // Same identities in exact rationals, then rounded once.
        use rug::Rational;
        for n in [5usize, 16, 64] {
            let mut b = vec![Rational::new(); n + 1];
            b[0] = Rational::from(1);
            for k in 1..=n / 2 {
                let mut s = Rational::new();
                for j in 1..=k {
                    s += &b[2 * k - 2 * j] / Rational::from(2 * j as u64 + 1);
                }
                b[2 * k] = -(s * Rational::from((n as u64, 2 * k as u64)));
            }
            let c = chebyshev_poly(n, p(200)).unwrap();
            for (i, a) in c.coeffs().iter().enumerate() {
                assert_eq!(*a, Float::with_val(200, &b[n - i]), "n={n} i={i}");
            }
        }
    }

    #[test]
    fn limit_curve_examples() {
        let pr = p(256);
        assert_eq!(limit_curve_residual(&MpComplex::zero(pr)).unwrap(), 1);
        let r3 = limit_curve_residual(&pr.complex(3, 0)).unwrap();
        assert!(Float::with_val(256, &r3 - 6u32).abs() < pr.pow2(-240));
        assert!(matches!(
            limit_curve_residual(&pr.complex(1, 0)),
            Err(Error::BranchPoint { point: 1 })
        ));
        assert!(limit_curve_residual(&pr.complex(-1, 0)).is_err());
    }

    #[test]
    fn limit_curve_point_by_bisection() {
        // Walk a ray from the origin (modulus 1 there) outwards to where the
        // modulus reaches 2; the residual at the crossing must vanish.
        let pr = p(256);
        let dir = MpComplex::cis(&pr.real(0.7));
        let sign = |t: &Float| {
            let z = dir.scale(t);
            let zp = MpComplex::new(Float::with_val(256, &z.re + 1u32), z.im.clone());
            let zm = MpComplex::new(Float::with_val(256, &z.re - 1u32), z.im.clone());
            let w = &(&zp * &zp.ln()) - &(&zm * &zm.ln());
            let m = (Float::with_val(256, &w.re) / 2u32).exp();
            m > 2u32
        };
        let (mut lo, mut hi) = (pr.real(0), pr.real(4));
        assert!(!sign(&lo) && sign(&hi));
        for _ in 0..300 {
            let mid = Float::with_val(256, &lo + &hi) / 2u32;
            if sign(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let r = limit_curve_residual(&dir.scale(&lo)).unwrap();
        assert!(r < pr.real(1e-20), "{r}");
    }

    proptest! {
        #[test]
        fn monic_round_trip(coeffs in proptest::collection::vec(-1e3f64..1e3, 2..12),
                            lead_exp in -10i32..10, zr in -3.0f64..3.0, zi in -3.0f64..3.0) {
            let pr = p(212);
            // a_n a power of two: division is exact, evaluation bit-identical
            let mut c: Vec<Float> = coeffs.iter().map(|&x| pr.real(x)).collect();
            c.push(pr.pow2(lead_exp));
            let poly = Polynomial::new(c).unwrap();
            let z = pr.complex(zr, zi);
            let scaled = poly.make_monic().eval(&z).scale(poly.leading());
            prop_assert_eq!(scaled, poly.eval(&z));
        }

        #[test]
        fn monic_round_trip_general_lead(coeffs in proptest::collection::vec(-1e3f64..1e3, 3..12),
                                         zr in -3.0f64..3.0, zi in -3.0f64..3.0) {
            let pr = p(212);
            let poly = Polynomial::new(coeffs.iter().map(|&x| pr.real(x)).collect());
            prop_assume!(poly.is_ok());
            let poly = poly.unwrap();
            let z = pr.complex(zr, zi);
            let lhs = poly.make_monic().eval(&z).scale(poly.leading());
            let rhs = poly.eval(&z);
            // Horner error scale: sum |a_i| |z|^i
            let zabs = z.abs();
            let mut scale = pr.zero();
            for a in poly.coeffs().iter().rev() {
                scale = scale * &zabs + Float::with_val(212, a.abs_ref());
            }
            let n = poly.degree() as u32;
            let bound = scale * pr.epsilon() * (4 * n + 4);
            prop_assert!((&lhs - &rhs).abs() <= bound);
        }

        #[test]
        fn chebyshev_parity(n in 1usize..60) {
            let c = chebyshev_poly(n, p(128)).unwrap();
            let pr = p(128);
            let x = pr.complex(0.37, -0.11);
            let plus = c.eval(&x);
            let minus = c.eval(&(-&x));
            let expected = if n % 2 == 0 { plus } else { -&plus };
            prop_assert_eq!(minus, expected);
        }
    }
}

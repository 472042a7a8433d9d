//! Multiple-precision real and complex scalars.
//!
//! Every value carries its own mantissa length; a [`Precision`] is the
//! context used to create values and to round the results of arithmetic.
//! Real arithmetic is MPFR's (`rug::Float`), always rounding to nearest with
//! ties to even. [`MpComplex`] is a plain pair of reals with the handful of
//! operations the solvers need.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::{Constant, Round};
use rug::{Assign, Float};

use crate::error::{Error, Result};

/// A real multiple-precision number. The precision lives in the value.
pub type MpReal = Float;

/// Mantissa length, in bits, governing the rounding of every operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub const MIN_BITS: u32 = 24;
    /// Double-double grade.
    pub const DD: Precision = Precision(106);
    /// Quad-double grade.
    pub const QD: Precision = Precision(212);

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::InvalidPrecision {
                bits,
                min: Self::MIN_BITS,
            });
        }
        Ok(Precision(bits))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    /// Precision with `factor` times as many bits.
    pub fn scaled(self, factor: u32) -> Precision {
        Precision(self.0.saturating_mul(factor))
    }

    /// Creates a real at this precision, rounding `value` to nearest.
    pub fn real<T>(self, value: T) -> MpReal
    where
        Float: Assign<T>,
    {
        Float::with_val(self.0, value)
    }

    pub fn zero(self) -> MpReal {
        Float::new(self.0)
    }

    pub fn pi(self) -> MpReal {
        Float::with_val(self.0, Constant::Pi)
    }

    /// `2^exp` at this precision (exact).
    pub fn pow2(self, exp: i32) -> MpReal {
        Float::with_val(self.0, 1) << exp
    }

    pub fn complex<R, I>(self, re: R, im: I) -> MpComplex
    where
        Float: Assign<R> + Assign<I>,
    {
        MpComplex::new(self.real(re), self.real(im))
    }

    /// Machine epsilon of this context, `2^(1-bits)`.
    pub fn epsilon(self) -> MpReal {
        self.pow2(1 - self.0 as i32)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

/// Precision carried by a real value.
pub fn precision_of(x: &MpReal) -> Precision {
    Precision(x.prec())
}

/// Rounds `x` to nearest at `target`. Widening is exact.
pub fn convert(x: &MpReal, target: Precision) -> MpReal {
    Float::with_val(target.bits(), x)
}

/// Number of significant decimal digits that makes the decimal
/// serialization of a `bits`-bit value round-trip exactly.
pub fn decimal_digits(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
}

/// Serializes `x` as `<bits>:<sign><digits>e<exp>`, meaning
/// `sign * digits * 10^exp`.
pub fn format_tagged(x: &MpReal) -> String {
    let bits = x.prec();
    if x.is_nan() {
        return format!("{bits}:nan");
    }
    if x.is_infinite() {
        let s = if x.is_sign_negative() { '-' } else { '+' };
        return format!("{bits}:{s}inf");
    }
    let sign = if x.is_sign_negative() { '-' } else { '+' };
    if x.is_zero() {
        return format!("{bits}:{sign}0e0");
    }
    let ndigits = decimal_digits(bits);
    let (_, digits, exp) = x.to_sign_string_exp(10, Some(ndigits));
    let exp = exp.expect("finite non-zero value has an exponent") as i64;
    let trimmed = digits.trim_end_matches('0');
    let scale = exp - trimmed.len() as i64;
    format!("{bits}:{sign}{trimmed}e{scale}")
}

/// Parses the `<bits>:<sign><digits>e<exp>` serialization.
pub fn parse_tagged(s: &str) -> Result<MpReal> {
    let bad = |msg: &str| Error::InvalidInput(format!("{msg}: {s:?}"));
    let (bits, body) = s.trim().split_once(':').ok_or_else(|| bad("missing precision tag"))?;
    let bits: u32 = bits.parse().map_err(|_| bad("bad precision tag"))?;
    let prec = Precision::new(bits)?;
    match body {
        "nan" => return Ok(prec.real(rug::float::Special::Nan)),
        "+inf" => return Ok(prec.real(rug::float::Special::Infinity)),
        "-inf" => return Ok(prec.real(rug::float::Special::NegInfinity)),
        _ => {}
    }
    let mut chars = body.chars();
    let negative = match chars.next() {
        Some('+') => false,
        Some('-') => true,
        _ => return Err(bad("missing sign")),
    };
    let (digits, exp) = chars.as_str().split_once('e').ok_or_else(|| bad("missing exponent"))?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad("bad digits"));
    }
    let exp: i64 = exp.parse().map_err(|_| bad("bad exponent"))?;
    let parsed = Float::parse(format!("{digits}e{exp}")).map_err(|_| bad("unparsable value"))?;
    let mut value = Float::with_val(bits, parsed);
    if negative {
        value = -value;
    }
    Ok(value)
}

/// A complex number with real and imaginary parts at one precision.
#[derive(Clone, Debug, PartialEq)]
pub struct MpComplex {
    pub re: MpReal,
    pub im: MpReal,
}

impl MpComplex {
    pub fn new(re: MpReal, im: MpReal) -> Self {
        debug_assert_eq!(re.prec(), im.prec(), "parts must share a precision");
        MpComplex { re, im }
    }

    pub fn zero(prec: Precision) -> Self {
        MpComplex::new(prec.zero(), prec.zero())
    }

    pub fn from_real(re: MpReal) -> Self {
        let im = Float::new(re.prec());
        MpComplex { re, im }
    }

    /// `exp(i·theta)` at the precision of `theta`.
    pub fn cis(theta: &MpReal) -> Self {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        MpComplex::new(c, s)
    }

    pub fn precision(&self) -> Precision {
        Precision(self.re.prec())
    }

    /// Rounds both parts to `target`.
    pub fn convert(&self, target: Precision) -> Self {
        MpComplex::new(convert(&self.re, target), convert(&self.im, target))
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        MpComplex::new(self.re.clone(), -self.im.clone())
    }

    /// Modulus, `hypot(re, im)`, free of intermediate overflow.
    pub fn abs(&self) -> MpReal {
        Float::with_val(self.re.prec(), self.re.hypot_ref(&self.im))
    }

    /// `re² + im²`.
    pub fn norm_sqr(&self) -> MpReal {
        let p = self.re.prec();
        let mut out = Float::with_val(p, self.re.square_ref());
        out.mul_add_mut(&Float::with_val(p, 1), &Float::with_val(p, self.im.square_ref()));
        out
    }

    pub fn scale(&self, k: &MpReal) -> Self {
        let p = self.re.prec();
        MpComplex::new(Float::with_val(p, &self.re * k), Float::with_val(p, &self.im * k))
    }

    /// Complex division with Smith's scaling, safe at extreme exponents.
    pub fn div(&self, rhs: &MpComplex) -> MpComplex {
        let p = self.re.prec();
        let (a, b, c, d) = (&self.re, &self.im, &rhs.re, &rhs.im);
        if c.cmp_abs(d) != Some(Ordering::Less) {
            let r = Float::with_val(p, d / c);
            let den = Float::with_val(p, c + &Float::with_val(p, d * &r));
            let re = Float::with_val(p, a + &Float::with_val(p, b * &r)) / &den;
            let im = Float::with_val(p, b - &Float::with_val(p, a * &r)) / &den;
            MpComplex::new(re, im)
        } else {
            let r = Float::with_val(p, c / d);
            let den = Float::with_val(p, d + &Float::with_val(p, c * &r));
            let re = Float::with_val(p, &Float::with_val(p, a * &r) + b) / &den;
            let im = Float::with_val(p, &Float::with_val(p, b * &r) - a) / &den;
            MpComplex::new(re, im)
        }
    }

    /// Principal-branch logarithm.
    pub fn ln(&self) -> MpComplex {
        let p = self.re.prec();
        let re = self.abs().ln();
        let im = Float::with_val(p, self.im.atan2_ref(&self.re));
        MpComplex::new(re, im)
    }

    pub fn exp(&self) -> MpComplex {
        let m = self.re.clone().exp();
        MpComplex::cis(&self.im).scale(&m)
    }

    /// Rounds to the nearest `f64` pair (for reporting only).
    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for MpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let re = self.re.to_string_radix_round(10, Some(digits), Round::Nearest);
        let im = self.im.to_string_radix_round(10, Some(digits), Round::Nearest);
        write!(f, "({re}, {im})")
    }
}

impl Add<&MpComplex> for &MpComplex {
    type Output = MpComplex;

    fn add(self, rhs: &MpComplex) -> MpComplex {
        let p = self.re.prec();
        MpComplex::new(
            Float::with_val(p, &self.re + &rhs.re),
            Float::with_val(p, &self.im + &rhs.im),
        )
    }
}

impl Sub<&MpComplex> for &MpComplex {
    type Output = MpComplex;

    fn sub(self, rhs: &MpComplex) -> MpComplex {
        let p = self.re.prec();
        MpComplex::new(
            Float::with_val(p, &self.re - &rhs.re),
            Float::with_val(p, &self.im - &rhs.im),
        )
    }
}

impl Mul<&MpComplex> for &MpComplex {
    type Output = MpComplex;

    fn mul(self, rhs: &MpComplex) -> MpComplex {
        let p = self.re.prec();
        let (a, b, c, d) = (&self.re, &self.im, &rhs.re, &rhs.im);
        // Each part is computed with a single final rounding.
        let re = Float::with_val(p, a.mul_sub_mul_ref(c, b, d));
        let im = Float::with_val(p, a.mul_add_mul_ref(d, b, c));
        MpComplex::new(re, im)
    }
}

impl Neg for &MpComplex {
    type Output = MpComplex;

    fn neg(self) -> MpComplex {
        MpComplex::new(-self.re.clone(), -self.im.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn p(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    #[test]
    fn precision_floor() {
        assert_eq!(p(106).bits(), 106);
        assert_eq!(p(1024).bits(), 1024);
        assert!(matches!(
            Precision::new(16),
            Err(Error::InvalidPrecision { bits: 16, .. })
        ));
        assert!(Precision::new(24).is_ok());
    }

    #[test]
    fn convert_narrowing_and_widening() {
        let one = p(1024).real(1);
        assert_eq!(convert(&one, p(106)), 1);
        assert_eq!(convert(&one, p(106)).prec(), 106);

        let tail = p(1024).real(1) + p(1024).pow2(-200);
        assert_eq!(convert(&tail, p(106)), 1);

        let f20 = rug::Integer::from(rug::Integer::factorial(20));
        let x = p(256).real(&f20);
        let y = convert(&x, p(106));
        assert_eq!(y.to_integer().unwrap(), f20);
        assert_eq!(f20, rug::Integer::from(2432902008176640000u64));
    }

    #[test]
    fn widening_round_trip_is_exact() {
        let x = p(1024).real(3).sqrt();
        let low = convert(&x, p(106));
        assert_eq!(convert(&convert(&low, p(212)), p(106)), low);
    }

    #[test]
    fn cabs_examples() {
        assert_eq!(p(106).complex(3, 4).abs(), 5);
        assert!(MpComplex::zero(p(106)).abs().is_zero());

        let got = p(106).complex(1, 1).abs();
        let exact = p(2048).real(2).sqrt();
        let err = Float::with_val(2048, &got - &exact).abs() / &exact;
        assert!(err < p(2048).pow2(-104), "err {err}");
    }

    #[test]
    fn cabs_avoids_overflow() {
        let big = p(106).real(1) << (1i32 << 28);
        let z = MpComplex::new(big.clone(), big.clone());
        let r = z.abs();
        assert!(r.is_finite());
        let ratio = Float::with_val(106, &r / &big);
        assert!((ratio.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn smith_division_extreme_exponents() {
        let pr = p(106);
        let huge: Float = pr.real(1u32) << 1_000_000u32;
        let a = MpComplex::new(huge.clone(), huge.clone());
        let b = MpComplex::new(huge.clone(), -huge.clone());
        let q = a.div(&b);
        assert_eq!(q.re, 0);
        assert_eq!(q.im, 1);
        let z = pr.complex(1, 2).div(&pr.complex(3, -4));
        // (1+2i)/(3-4i) = (-5+10i)/25
        assert!((z.re.to_f64() + 0.2).abs() < 1e-30);
        assert!((z.im.to_f64() - 0.4).abs() < 1e-30);
    }

    #[test]
    fn exponent_range_is_wide() {
        let x: Float = p(106).real(10).pow(300_000i32);
        assert!(x.is_finite());
        let y: Float = p(106).real(10).pow(-300_000i32);
        assert!(!y.is_zero());
    }

    #[test]
    fn tagged_format_examples() {
        assert_eq!(format_tagged(&p(106).real(0)), "106:+0e0");
        assert_eq!(format_tagged(&p(106).real(-1.5)), "106:-15e-1");
        assert_eq!(format_tagged(&p(64).real(1000)), "64:+1e3");
        for s in ["106:+0e0", "106:-15e-1", "64:+1e3", "256:+75e-2"] {
            assert_eq!(format_tagged(&parse_tagged(s).unwrap()), s);
        }
    }

    #[test]
    fn tagged_parse_errors() {
        for s in [
            "",
            "106",
            "106:15e1",
            "106:+e1",
            "106:+1.5e1",
            "106:+15",
            "8:+1e0",
            "x:+1e0",
        ] {
            assert!(parse_tagged(s).is_err(), "{s}");
        }
    }

    #[test]
    fn decimal_digit_budget() {
        assert_eq!(decimal_digits(106), 34);
        assert_eq!(decimal_digits(1024), 311);
    }

    #[test]
    fn complex_log_and_exp() {
        let pr = p(256);
        let l = pr.complex(-1, 0).ln();
        assert!(l.re.is_zero());
        assert_eq!(l.im, pr.pi());
        let z = pr.complex(0.25, -1.5);
        let back = z.ln().exp();
        let err = (&back - &z).abs();
        assert!(err < pr.pow2(-250));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn expr(x: f64, y: f64, bits: u32) -> Float {
            // sqrt(x) * exp(y) / (1 + x^2) - ln(1 + |y|)
            let pr = p(bits);
            let x = pr.real(x);
            let y = pr.real(y);
            let num = Float::with_val(bits, x.sqrt_ref()) * y.clone().exp();
            let den = pr.real(1) + Float::with_val(bits, x.square_ref());
            let tail = (pr.real(1) + y.abs()).ln();
            num / den - tail
        }

        proptest! {
            #[test]
            fn tagged_round_trip(m in any::<i64>(), e in -4000i32..4000, bits in 24u32..1200) {
                let x = Float::with_val(bits, m) << e;
                let x = Float::with_val(bits, &x / 3u32);
                let back = parse_tagged(&format_tagged(&x)).unwrap();
                prop_assert_eq!(back.prec(), bits);
                prop_assert_eq!(back, x);
            }

            #[test]
            fn low_high_round_trip(m in any::<i64>(), e in -300i32..300, low in 24u32..300, extra in 0u32..600) {
                let x = Float::with_val(2048, m) << e;
                let x = Float::with_val(2048, &x / 7u32);
                let lo = convert(&x, p(low));
                prop_assert_eq!(convert(&convert(&lo, p(low + extra)), p(low)), lo);
            }

            #[test]
            fn deterministic_and_monotone(x in 0.0f64..100.0, y in -20.0f64..20.0) {
                prop_assert_eq!(expr(x, y, 212), expr(x, y, 212));
                let exact = expr(x, y, 2048);
                let mut last: Option<Float> = None;
                for bits in [106u32, 212, 512, 1024] {
                    let err = Float::with_val(2048, &expr(x, y, bits) - &exact).abs();
                    if let Some(prev) = &last {
                        prop_assert!(err <= *prev, "bits {} err {} prev {}", bits, err, prev);
                    }
                    last = Some(err);
                }
            }
        }
    }
}

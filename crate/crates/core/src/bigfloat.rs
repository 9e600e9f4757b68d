//! Arbitrary-precision floating values with a tracked absolute error bound,
//! plus the constant oracles (Machin-type pi, square and n-th roots) used by
//! the numeric validation layer.
//!
//! A [`BigFloat`] is `m * 2^exp` with absolute error at most `err * 2^exp`.
//! Every operation propagates the bound conservatively: the stored bound is
//! always >= the true error, so a digit claim derived from it is rigorous.

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug)]
pub struct BigFloat {
    m: BigInt,
    exp: i64,
    err: BigInt,
}

/// Bits needed to carry `digits` decimal digits, plus fixed guard room.
pub fn bits_for_digits(digits: u32) -> u32 {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as u32 + 64
}

/// ceil(x * 2^shift) for nonnegative x.
fn scale_ceil(x: &BigInt, shift: i64) -> BigInt {
    debug_assert!(!x.is_negative());
    if shift >= 0 {
        x << shift
    } else if x.is_zero() {
        BigInt::zero()
    } else {
        ((x - 1u8) >> (-shift)) + 1u8
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(!a.is_negative() && b.is_positive());
    (a + (b - 1u8)) / b
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat {
            m: BigInt::zero(),
            exp: 0,
            err: BigInt::zero(),
        }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        BigFloat {
            m: n,
            exp: 0,
            err: BigInt::zero(),
        }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_bigint(BigInt::from(n))
    }

    pub fn from_rational(r: &Rat, prec: u32) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        let num = r.numer();
        let den = r.denom();
        let t = prec as i64 + 16 + (den.bits() as i64 - num.bits() as i64).max(0);
        let scaled = num << t;
        let m = &scaled / den;
        let err = if (&m * den) == scaled {
            BigInt::zero()
        } else {
            BigInt::one()
        };
        BigFloat { m, exp: -t, err }
    }

    pub fn is_zero_exact(&self) -> bool {
        self.m.is_zero() && self.err.is_zero()
    }

    /// Upper bound on |value| as (mantissa, exp).
    pub fn upper_abs(&self) -> (BigInt, i64) {
        (self.m.abs() + &self.err, self.exp)
    }

    /// Lower bound on |value|; zero if the interval touches zero.
    pub fn lower_abs(&self) -> (BigInt, i64) {
        let l = self.m.abs() - &self.err;
        if l.is_negative() {
            (BigInt::zero(), self.exp)
        } else {
            (l, self.exp)
        }
    }

    /// Error bound as (mantissa, exp).
    pub fn error_bound(&self) -> (BigInt, i64) {
        (self.err.clone(), self.exp)
    }

    /// Widen the error bound by an absolute rational amount (rounded up).
    pub fn widen_error(mut self, extra: &Rat) -> Self {
        assert!(!extra.is_negative());
        if extra.is_zero() {
            return self;
        }
        // extra in units of 2^exp, rounded up
        let num = extra.numer().clone();
        let den = extra.denom().clone();
        let units = if self.exp <= 0 {
            ceil_div(&(num << (-self.exp)), &den)
        } else {
            ceil_div(&num, &(den << self.exp))
        };
        self.err += units;
        self
    }

    /// Rational upper bound on |value|.
    pub fn upper_abs_rat(&self) -> Rat {
        let (u, e) = self.upper_abs();
        if e >= 0 {
            Rat::from_integer(u << e)
        } else {
            Rat::new(u, BigInt::one() << (-e))
        }
    }

    /// True if the error bound is at most 10^(-digits).
    pub fn error_le_pow10(&self, digits: u32) -> bool {
        if self.err.is_zero() {
            return true;
        }
        // err * 2^exp <= 10^-digits  <=>  err * 10^digits * 2^exp <= 1
        let lhs = &self.err * BigInt::from(10u8).pow(digits);
        if self.exp >= 0 {
            (lhs << self.exp) <= BigInt::one()
        } else {
            lhs <= (BigInt::one() << (-self.exp))
        }
    }

    pub fn round(mut self, prec: u32) -> Self {
        let b = self.m.bits();
        if b > prec as u64 {
            let s = (b - prec as u64) as i64;
            self.m >>= s; // floor shift, <= 1 ulp truncation
            self.err = scale_ceil(&self.err, -s) + 2u8;
            self.exp += s;
        }
        self
    }

    pub fn neg(mut self) -> Self {
        self.m = -self.m;
        self
    }

    pub fn add(&self, other: &Self, prec: u32) -> Self {
        if self.m.is_zero() && self.err.is_zero() {
            return other.clone();
        }
        if other.m.is_zero() && other.err.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let m = (&self.m << (self.exp - e)) + (&other.m << (other.exp - e));
        let err = (&self.err << (self.exp - e)) + (&other.err << (other.exp - e));
        BigFloat { m, exp: e, err }.round(prec)
    }

    pub fn sub(&self, other: &Self, prec: u32) -> Self {
        self.add(&other.clone().neg(), prec)
    }

    pub fn mul(&self, other: &Self, prec: u32) -> Self {
        let m = &self.m * &other.m;
        let err =
            self.m.abs() * &other.err + other.m.abs() * &self.err + &self.err * &other.err;
        BigFloat {
            m,
            exp: self.exp + other.exp,
            err,
        }
        .round(prec)
    }

    pub fn mul_rat(&self, r: &Rat, prec: u32) -> Self {
        self.mul(&BigFloat::from_rational(r, prec), prec)
    }

    pub fn div(&self, other: &Self, prec: u32) -> Result<Self> {
        let babs = other.m.abs();
        let blow = &babs - &other.err;
        if !blow.is_positive() {
            return Err(Error::Domain(
                "division by a value not bounded away from zero".into(),
            ));
        }
        let t = prec as i64
            + 64
            + (other.m.bits() as i64 - self.m.bits() as i64).max(0);
        let q = (&self.m << t) / &other.m;
        let err = ceil_div(&((&self.err << t) + (q.abs() + 1u8) * &other.err), &blow) + 2u8;
        Ok(BigFloat {
            m: q,
            exp: self.exp - other.exp - t,
            err,
        }
        .round(prec))
    }

    /// Square root; the input interval must not lie strictly below zero.
    pub fn sqrt(&self, prec: u32) -> Result<Self> {
        if self.m.is_negative() && self.m.abs() > self.err {
            return Err(Error::Domain("square root of a negative value".into()));
        }
        let m = if self.m.is_negative() {
            BigInt::zero()
        } else {
            self.m.clone()
        };
        let mut t = (2 * prec as i64 + 2 - m.bits() as i64).max(0);
        if (self.exp - t) % 2 != 0 {
            t += 1;
        }
        let scaled = &m << t;
        let r = scaled.sqrt();
        let er = (self.exp - t) / 2;
        // the propagated bound err/(2 sqrt(x)) lands in units of 2^er after
        // scaling err by 2^t
        let err_scaled = scale_ceil(&self.err, t);
        let err = if r.is_zero() {
            err_scaled.sqrt() + 2u8
        } else {
            ceil_div(&err_scaled, &(&r * 2u8)) + 2u8
        };
        Ok(BigFloat { m: r, exp: er, err }.round(prec))
    }

    /// q-th root for q >= 1; the input must be nonnegative (beyond its bound).
    pub fn nth_root(&self, q: u32, prec: u32) -> Result<Self> {
        assert!(q >= 1);
        if q == 1 {
            return Ok(self.clone());
        }
        if q == 2 {
            return self.sqrt(prec);
        }
        if self.m.is_negative() {
            return Err(Error::Domain("n-th root of a negative value".into()));
        }
        let mut t = (q as i64 * (prec as i64 + 2) - self.m.bits() as i64).max(0);
        let rem = (self.exp - t).rem_euclid(q as i64);
        t += rem; // make (exp - t) divisible by q
        let scaled = &self.m << t;
        let r = scaled.nth_root(q);
        let er = (self.exp - t) / q as i64;
        // derivative bound: |d x^{1/q}| <= err_x * r_up / (q * x_low), with
        // err and x both in units of 2^{exp - t} = 2^{er*q}.
        let err_in_scaled = scale_ceil(&self.err, t);
        let x_low = &scaled - &err_in_scaled;
        if !x_low.is_positive() || r.is_zero() {
            return Err(Error::Domain(
                "n-th root of a value not bounded away from zero".into(),
            ));
        }
        let err = ceil_div(&(&err_in_scaled * (&r + 1u8)), &(x_low * q)) + 2u8;
        Ok(BigFloat { m: r, exp: er, err }.round(prec))
    }

    /// x^e for a machine-integer exponent.
    pub fn powi(&self, e: i64, prec: u32) -> Result<Self> {
        if e == 0 {
            return Ok(BigFloat::from_i64(1));
        }
        let mut base = self.clone();
        if e < 0 {
            base = BigFloat::from_i64(1).div(&base, prec)?;
        }
        let mut acc = BigFloat::from_i64(1);
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, prec);
            }
        }
        Ok(acc)
    }

    /// x^(p/q) for a rational exponent; x must be positive for fractional
    /// exponents.
    pub fn pow_rational(&self, e: &Rat, prec: u32) -> Result<Self> {
        let p = i64::try_from(e.numer())
            .map_err(|_| Error::Domain("exponent numerator too large".into()))?;
        let q = u32::try_from(e.denom())
            .map_err(|_| Error::Domain("exponent denominator too large".into()))?;
        let wide = prec + 32;
        let y = self.powi(p, wide)?;
        y.nth_root(q, wide)
    }

    /// Approximate base-10 logarithm of the upper bound of |value|; used only
    /// to floor digit counts, with the rigorous bound already folded in.
    pub fn log10_upper_abs(&self) -> f64 {
        let (u, e) = self.upper_abs();
        if u.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = u.bits() as i64;
        let lead = if bits > 64 {
            let top: BigInt = &u >> (bits - 64);
            let f = top.to_string().parse::<f64>().unwrap();
            f.log2() + (bits - 64) as f64
        } else {
            u.to_string().parse::<f64>().unwrap().log2()
        };
        (lead + e as f64) * std::f64::consts::LOG10_2
    }

    /// Decimal rendering with `digits` fractional digits (truncated).
    pub fn to_decimal(&self, digits: u32) -> String {
        let pow = BigInt::from(10u8).pow(digits);
        let scaled_abs = if self.exp >= 0 {
            (self.m.abs() << self.exp) * &pow
        } else {
            (self.m.abs() * &pow) >> (-self.exp)
        };
        let int = &scaled_abs / &pow;
        let frac = &scaled_abs % &pow;
        let sign = if self.m.is_negative() { "-" } else { "" };
        format!(
            "{sign}{int}.{frac:0width$}",
            width = digits as usize,
            frac = frac
        )
    }
}

/// Number of agreeing decimal digits between two values, floored by the
/// rigorous error bounds on both sides. Capped at `cap`.
pub fn digits_matched(a: &BigFloat, b: &BigFloat, prec: u32, cap: i64) -> i64 {
    let diff = a.sub(b, prec);
    let (u, _) = diff.upper_abs();
    if u.is_zero() {
        return cap;
    }
    let lg = diff.log10_upper_abs();
    let d = (-lg).floor() as i64;
    d.min(cap)
}

/// arctan(1/x) in fixed point at scale 2^t; returns (sum, error in ulps).
fn arctan_inv(x: u64, t: i64) -> (BigInt, BigInt) {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut v = (BigInt::one() << t) / &x;
    let mut sum = v.clone();
    let mut j: u64 = 1;
    let mut terms: u64 = 1;
    loop {
        v = v / &x2;
        if v.is_zero() {
            break;
        }
        let term = &v / BigInt::from(2 * j + 1);
        if j % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        j += 1;
        terms += 1;
    }
    // each truncated division costs <= 1 ulp, plus the alternating tail
    (sum, BigInt::from(4 * terms + 8))
}

/// pi with error bound <= 10^(-digits), from Machin's formula
/// pi = 16 arctan(1/5) - 4 arctan(1/239). Independent of every
/// hypergeometric series in the catalog.
pub fn pi_reference(digits: u32) -> BigFloat {
    let t = bits_for_digits(digits) as i64 + 32;
    let (s5, e5) = arctan_inv(5, t);
    let (s239, e239) = arctan_inv(239, t);
    let m = s5 * 16u8 - s239 * 4u8;
    let err = e5 * 16u8 + e239 * 4u8;
    BigFloat { m, exp: -t, err }.round(bits_for_digits(digits))
}

/// Square root of a nonnegative rational with error bound <= 10^(-digits).
pub fn sqrt_bigfloat(x: &BigFloat, digits: u32) -> Result<BigFloat> {
    x.sqrt(bits_for_digits(digits))
}

/// A constant of the shape (p/q) * sqrt(d) * pi^e with e in {0, -1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicConstant {
    pub rational: Rat,
    pub radicand: u64,
    pub pi_power: i32,
}

impl AlgebraicConstant {
    pub fn new(rational: Rat, radicand: u64, pi_power: i32) -> Self {
        assert!(radicand >= 1);
        assert!(pi_power == 0 || pi_power == -1);
        AlgebraicConstant {
            rational,
            radicand,
            pi_power,
        }
    }

    pub fn value(&self, digits: u32) -> Result<BigFloat> {
        let prec = bits_for_digits(digits + 10);
        let mut v = BigFloat::from_rational(&self.rational, prec);
        if self.radicand > 1 {
            let r = BigFloat::from_i64(self.radicand as i64).sqrt(prec)?;
            v = v.mul(&r, prec);
        }
        if self.pi_power == -1 {
            let pi = pi_reference(digits + 10);
            v = v.div(&pi, prec)?;
        }
        Ok(v)
    }

    pub fn render(&self) -> String {
        let mut s = crate::rat::render_rat(&self.rational);
        if self.radicand > 1 {
            s = format!("{s}*sqrt({})", self.radicand);
        }
        if self.pi_power == -1 {
            s = format!("{s}/pi");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    const PI_60: &str =
        "3.141592653589793238462643383279502884197169399375105820974944";

    #[test]
    fn pi_matches_reference_digits() {
        let pi = pi_reference(60);
        assert!(pi.error_le_pow10(60));
        let s = pi.to_decimal(58);
        assert_eq!(&s[..55], &PI_60[..55]);
    }

    #[test]
    fn pi_low_precision() {
        let pi = pi_reference(1);
        assert!(pi.error_le_pow10(1));
        assert!(pi.to_decimal(3).starts_with("3.14"));
    }

    #[test]
    fn pi_precision_monotone() {
        let a = pi_reference(50);
        let b = pi_reference(30);
        let d = digits_matched(&a, &b, bits_for_digits(60), 100);
        assert!(d >= 30, "agreement {d}");
    }

    #[test]
    fn sqrt_perfect_square() {
        let r = sqrt_bigfloat(&BigFloat::from_i64(4), 20).unwrap();
        let two = BigFloat::from_i64(2);
        assert!(digits_matched(&r, &two, bits_for_digits(30), 100) >= 20);
        assert!(r.error_le_pow10(20));
    }

    #[test]
    fn sqrt_seven_squares_back() {
        let prec = bits_for_digits(40);
        let r = sqrt_bigfloat(&BigFloat::from_i64(7), 30).unwrap();
        let sq = r.mul(&r, prec);
        let seven = BigFloat::from_i64(7);
        assert!(digits_matched(&sq, &seven, prec, 100) >= 28);
    }

    #[test]
    fn sqrt_zero() {
        let r = sqrt_bigfloat(&BigFloat::zero(), 10).unwrap();
        assert!(r.error_le_pow10(10));
        assert!(r.upper_abs().0.is_zero() || r.error_le_pow10(10));
    }

    #[test]
    fn sqrt_negative_rejected() {
        assert!(sqrt_bigfloat(&BigFloat::from_i64(-3), 10).is_err());
    }

    #[test]
    fn division_interval_through_zero_rejected() {
        let a = BigFloat::from_i64(1);
        let tiny = BigFloat {
            m: BigInt::from(1),
            exp: 0,
            err: BigInt::from(5),
        };
        assert!(a.div(&tiny, 64).is_err());
    }

    #[test]
    fn nth_root_cube() {
        let prec = bits_for_digits(40);
        let x = BigFloat::from_i64(27);
        let r = x.nth_root(3, prec).unwrap();
        let three = BigFloat::from_i64(3);
        assert!(digits_matched(&r, &three, prec, 100) >= 35);
    }

    #[test]
    fn pow_rational_matches_sqrt() {
        let prec = bits_for_digits(40);
        let x = BigFloat::from_i64(7);
        let a = x.pow_rational(&rat(1, 2), prec).unwrap();
        let b = x.sqrt(prec).unwrap();
        assert!(digits_matched(&a, &b, prec, 100) >= 35);
        // (64/63)^(-1/2) = 3*sqrt(7)/8
        let y = BigFloat::from_rational(&rat(64, 63), prec);
        let v = y.pow_rational(&rat(-1, 2), prec).unwrap();
        let w = BigFloat::from_i64(7)
            .sqrt(prec)
            .unwrap()
            .mul_rat(&rat(3, 8), prec);
        assert!(digits_matched(&v, &w, prec, 100) >= 35);
    }

    #[test]
    fn error_propagation_encloses_exact_value() {
        // compound expression on random-ish rationals, compared to the exact
        // rational evaluation
        let prec = bits_for_digits(30);
        let mut seed: u64 = 0x9e3779b97f4a7c15;
        for _ in 0..1000 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = rat((seed >> 40) as i64 % 1000 - 500, ((seed >> 20) % 97 + 1) as i64);
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = rat((seed >> 40) as i64 % 1000 - 500, ((seed >> 20) % 89 + 1) as i64);
            let exact = (&a * &a) + (&b * rat_int(3)) - (&a * &b);
            let fa = BigFloat::from_rational(&a, prec);
            let fb = BigFloat::from_rational(&b, prec);
            let fv = fa
                .mul(&fa, prec)
                .add(&fb.mul_rat(&rat_int(3), prec), prec)
                .sub(&fa.mul(&fb, prec), prec);
            let fe = BigFloat::from_rational(&exact, prec);
            let diff = fv.sub(&fe, prec);
            let (lo, _) = diff.lower_abs();
            // the interval must contain the exact value
            assert!(lo.is_zero(), "exact value escaped the error interval");
        }
    }

    #[test]
    fn decimal_rendering() {
        let h = BigFloat::from_rational(&rat(1, 2), 64);
        assert_eq!(h.to_decimal(3), "0.500");
        let n = BigFloat::from_rational(&rat(-22, 7), 64);
        assert!(n.to_decimal(4).starts_with("-3.1428"));
    }
}

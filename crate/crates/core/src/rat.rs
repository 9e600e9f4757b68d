//! Exact rational arithmetic helpers on top of `num::BigRational`.
//!
//! `num::BigRational` already keeps gcd(numerator, denominator) = 1 and a
//! positive denominator after every operation, which is exactly the invariant
//! the rest of the crate relies on.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational p/q from machine integers.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parse "p" or "p/q" (q > 0).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Syntax(format!("invalid rational `{s}`")))?;
    let d: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| Error::Syntax(format!("invalid rational `{s}`")))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(Error::Syntax(format!("zero denominator in `{s}`")));
    }
    Ok(Rat::new(n, d))
}

/// Render as "p" or "p/q".
pub fn render_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Integer value if the rational is an integer.
pub fn as_integer(r: &Rat) -> Option<BigInt> {
    if r.denom().is_one() {
        Some(r.numer().clone())
    } else {
        None
    }
}

/// Machine integer value if it fits.
pub fn as_i64(r: &Rat) -> Option<i64> {
    as_integer(r).and_then(|n| i64::try_from(&n).ok())
}

/// True if the rational is an integer <= 0.
pub fn is_nonpositive_integer(r: &Rat) -> bool {
    r.denom().is_one() && r.numer().sign() != Sign::Plus
}

/// Rising factorial a(a+1)...(a+n-1); the empty product is 1.
pub fn pochhammer_exact(a: &Rat, n: u64) -> Rat {
    let mut acc = Rat::one();
    let mut f = a.clone();
    let one = Rat::one();
    for _ in 0..n {
        if f.is_zero() {
            return Rat::zero();
        }
        acc *= &f;
        f += &one;
    }
    acc
}

/// Rising factorial for signed n: (a)_{-m} = 1/((a-1)(a-2)...(a-m)).
/// None when a negative index hits a pole.
pub fn pochhammer_signed(a: &Rat, n: i64) -> Option<Rat> {
    if n >= 0 {
        return Some(pochhammer_exact(a, n as u64));
    }
    let mut den = Rat::one();
    let mut f = a.clone();
    let one = Rat::one();
    for _ in 0..(-n) {
        f -= &one;
        if f.is_zero() {
            return None;
        }
        den *= &f;
    }
    Some(den.recip())
}

/// a^e for signed integer e; errors on 0^negative.
pub fn rat_pow(a: &Rat, e: i64) -> Result<Rat> {
    if a.is_zero() {
        return if e > 0 {
            Ok(Rat::zero())
        } else if e == 0 {
            Ok(Rat::one())
        } else {
            Err(Error::Pole("0 raised to a negative power".into()))
        };
    }
    let mut base = if e < 0 { a.recip() } else { a.clone() };
    let mut exp = e.unsigned_abs();
    let mut acc = Rat::one();
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= &base;
        }
        exp >>= 1;
        if exp > 0 {
            base = &base * &base;
        }
    }
    Ok(acc)
}

/// gcd of two rationals' numerators over a common denominator, used for
/// integer-content normalization of polynomials: returns g > 0 such that
/// every input divided by g is an integer and the integer gcd is 1.
pub fn rational_content(values: impl Iterator<Item = Rat>) -> Rat {
    use num_integer::Integer;
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for v in values {
        if v.is_zero() {
            continue;
        }
        num_gcd = num_gcd.gcd(v.numer());
        den_lcm = den_lcm.lcm(v.denom());
    }
    if num_gcd.is_zero() {
        return Rat::one();
    }
    Rat::new(num_gcd, den_lcm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer_exact(&rat(1, 2), 0), rat_int(1));
        assert_eq!(pochhammer_exact(&rat(1, 2), 2), rat(3, 4));
        assert_eq!(pochhammer_exact(&rat_int(-3), 5), rat_int(0));
    }

    #[test]
    fn pochhammer_split_identity() {
        // (a)_{n+m} = (a)_n (a+n)_m
        for (p, q) in [(1i64, 2i64), (-3, 1), (5, 7), (-7, 3)] {
            let a = rat(p, q);
            for n in 0..6u64 {
                for m in 0..6u64 {
                    let lhs = pochhammer_exact(&a, n + m);
                    let shifted = &a + rat_int(n as i64);
                    let rhs = pochhammer_exact(&a, n) * pochhammer_exact(&shifted, m);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn pochhammer_zero_iff() {
        for p in -6..6i64 {
            for n in 0..8u64 {
                let a = rat_int(p);
                let z = pochhammer_exact(&a, n).is_zero();
                let expect = p <= 0 && (-p as u64) < n;
                assert_eq!(z, expect, "a={p} n={n}");
            }
        }
        // non-integers never vanish
        assert!(!pochhammer_exact(&rat(-7, 2), 20).is_zero());
    }

    #[test]
    fn parse_render_roundtrip() {
        for s in ["3", "-4/7", "0", "22/7"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(render_rat(&r), s);
        }
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }
}

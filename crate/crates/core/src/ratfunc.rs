//! Rational functions: fraction-field elements over [`MPoly`].
//!
//! Invariant: gcd(num, den) = 1 and the denominator is integer-primitive with
//! positive leading coefficient under the lex monomial order, so normalization
//! is idempotent and equal functions compare equal structurally.

use crate::mpoly::{poly_gcd, MPoly};
use crate::rat::Rat;
use num::{One, Zero};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFunc {
    num: MPoly,
    den: MPoly,
}

impl RatFunc {
    pub fn new(num: MPoly, den: MPoly) -> RatFunc {
        assert!(!den.is_zero(), "zero denominator");
        RatFunc { num, den }.normalized()
    }

    pub fn from_poly(p: MPoly) -> RatFunc {
        RatFunc {
            num: p,
            den: MPoly::one(),
        }
    }

    pub fn from_rat(r: Rat) -> RatFunc {
        Self::from_poly(MPoly::constant(r))
    }

    pub fn zero() -> RatFunc {
        Self::from_rat(Rat::zero())
    }

    pub fn one() -> RatFunc {
        Self::from_rat(Rat::one())
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn as_poly(&self) -> Option<&MPoly> {
        if self.den.as_constant().map(|c| c.is_one()).unwrap_or(false) {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn normalized(self) -> RatFunc {
        if self.num.is_zero() {
            return RatFunc {
                num: MPoly::zero(),
                den: MPoly::one(),
            };
        }
        let g = poly_gcd(&self.num, &self.den);
        let (num, den) = if g.as_constant().map(|c| c.is_one()).unwrap_or(false) {
            (self.num, self.den)
        } else {
            (
                self.num.exact_div(&g).expect("gcd divides numerator"),
                self.den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let (unit, den) = den.normalize_primitive();
        let num = num.mul_rat(&unit.recip());
        RatFunc { num, den }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(
            self.num
                .mul(&other.den)
                .add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &RatFunc) -> RatFunc {
        assert!(!other.is_zero(), "division by zero rational function");
        RatFunc::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn recip(&self) -> RatFunc {
        assert!(!self.is_zero());
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> RatFunc {
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut acc = RatFunc::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Substitute var -> var + c in numerator and denominator.
    pub fn shift_var(&self, var: &str, c: &Rat) -> RatFunc {
        RatFunc::new(self.num.shift_var(var, c), self.den.shift_var(var, c))
    }

    /// Substitute var -> rational value; None if the denominator vanishes.
    pub fn subst_rat(&self, var: &str, value: &Rat) -> Option<RatFunc> {
        let den = self.den.subst_rat(var, value);
        if den.is_zero() {
            return None;
        }
        Some(RatFunc::new(self.num.subst_rat(var, value), den))
    }

    /// Full evaluation; None on a pole.
    pub fn eval(&self, assignment: &std::collections::BTreeMap<String, Rat>) -> Option<Rat> {
        let d = self.den.eval(assignment);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(assignment) / d)
    }

    pub fn complexity(&self) -> u64 {
        (self.num.total_degree() + self.den.total_degree()) as u64 * 1000
            + (self.num.n_terms() + self.den.n_terms()) as u64
    }

    pub fn render(&self) -> String {
        if self.den.as_constant().map(|c| c.is_one()).unwrap_or(false) {
            self.num.render()
        } else {
            format!("({}) / ({})", self.num.render(), self.den.render())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn n() -> MPoly {
        MPoly::var("n")
    }

    fn c(v: i64) -> MPoly {
        MPoly::constant(rat_int(v))
    }

    #[test]
    fn normalization_cancels_and_is_idempotent() {
        // (n^2-1)/(2n-2) -> (n+1)/2
        let f = RatFunc::new(n().mul(&n()).sub(&c(1)), n().mul_rat(&rat_int(2)).sub(&c(2)));
        assert_eq!(f.num().render(), "1/2*n + 1/2");
        assert_eq!(f.den().render(), "1");
        let again = f.clone().normalized();
        assert_eq!(f, again);
    }

    #[test]
    fn den_sign_normalized() {
        let f = RatFunc::new(c(1), n().neg());
        assert_eq!(f.den(), &n());
        assert_eq!(f.num(), &c(-1));
    }

    #[test]
    fn field_identities() {
        let f = RatFunc::new(n().add(&c(3)), n());
        let g = RatFunc::new(c(2), n().add(&c(1)));
        let s = f.add(&g);
        assert_eq!(s.sub(&g), f);
        let p = f.mul(&g);
        assert_eq!(p.div(&g), f);
        assert_eq!(f.mul(&f.recip()), RatFunc::one());
    }

    #[test]
    fn shift_and_eval() {
        let f = RatFunc::new(n().add(&c(3)), n());
        let g = f.shift_var("n", &rat_int(2)); // (n+5)/(n+2)
        let mut asn = std::collections::BTreeMap::new();
        asn.insert("n".to_string(), rat_int(1));
        assert_eq!(g.eval(&asn).unwrap(), rat(6, 3));
        asn.insert("n".to_string(), rat_int(-2));
        assert!(g.eval(&asn).is_none());
    }
}

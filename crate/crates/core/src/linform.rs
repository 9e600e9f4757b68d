//! Linear forms with rational coefficients over named variables — the shape
//! of Pochhammer bases, exponents, and linear weights in kernel definitions.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::mpoly::MPoly;
use crate::rat::{as_integer, render_rat, Rat};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct LinForm {
    /// Nonzero coefficients by variable name.
    coeffs: BTreeMap<String, Rat>,
    constant: Rat,
}

impl LinForm {
    pub fn constant(c: Rat) -> Self {
        LinForm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn zero() -> Self {
        Self::constant(Rat::zero())
    }

    pub fn var(name: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.to_string(), Rat::from_integer(1.into()));
        LinForm {
            coeffs,
            constant: Rat::zero(),
        }
    }

    pub fn coeff(&self, var: &str) -> Rat {
        self.coeffs.get(var).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_part(&self) -> &Rat {
        &self.constant
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_constant() {
            Some(self.constant.clone())
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && Zero::is_zero(&self.constant)
    }

    /// All coefficients (not the constant) are integers.
    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.values().all(|c| as_integer(c).is_some())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (v, c) in &other.coeffs {
            let e = coeffs.entry(v.clone()).or_insert_with(Rat::zero);
            *e += c;
        }
        coeffs.retain(|_, c| !Zero::is_zero(c));
        LinForm {
            coeffs,
            constant: &self.constant + &other.constant,
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if Zero::is_zero(c) {
            return Self::zero();
        }
        LinForm {
            coeffs: self.coeffs.iter().map(|(v, a)| (v.clone(), a * c)).collect(),
            constant: &self.constant * c,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Rat::from_integer((-1).into())))
    }

    /// Add `delta` to the constant (the effect of var -> var + 1 is
    /// `shifted(coeff(var))`).
    pub fn shifted(&self, delta: &Rat) -> Self {
        LinForm {
            coeffs: self.coeffs.clone(),
            constant: &self.constant + delta,
        }
    }

    /// The non-constant part, as a grouping key for Pochhammer classes.
    pub fn homogeneous(&self) -> LinForm {
        LinForm {
            coeffs: self.coeffs.clone(),
            constant: Rat::zero(),
        }
    }

    pub fn eval(&self, assignment: &BTreeMap<String, Rat>) -> Option<Rat> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * assignment.get(v)?;
        }
        Some(acc)
    }

    /// Evaluate the variables present in `assignment`, keeping the rest
    /// symbolic.
    pub fn subst_partial(&self, assignment: &BTreeMap<String, Rat>) -> LinForm {
        let mut out = LinForm::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            match assignment.get(v) {
                Some(val) => out.constant += c * val,
                None => {
                    out.coeffs.insert(v.clone(), c.clone());
                }
            }
        }
        out
    }

    pub fn to_mpoly(&self) -> MPoly {
        let mut acc = MPoly::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            acc = acc.add(&MPoly::var(v).mul_rat(c));
        }
        acc
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (v, c) in &self.coeffs {
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { "-" } else { "+" });
            }
            if num::One::is_one(&mag) {
                out.push_str(v);
            } else {
                out.push_str(&format!("{}*{}", render_rat(&mag), v));
            }
        }
        if !Zero::is_zero(&self.constant) {
            let neg = self.constant.is_negative();
            if out.is_empty() {
                out.push_str(&render_rat(&self.constant));
            } else {
                out.push_str(if neg { "-" } else { "+" });
                out.push_str(&render_rat(&self.constant.abs()));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn arithmetic_and_render() {
        let f = LinForm::constant(rat(1, 2)).sub(&LinForm::var("k")); // 1/2 - k
        assert_eq!(f.render(), "-k+1/2");
        assert_eq!(f.coeff("k"), rat_int(-1));
        let g = f.add(&LinForm::var("k"));
        assert_eq!(g.as_constant(), Some(rat(1, 2)));
        let s = f.shifted(&rat_int(-1));
        assert_eq!(s.constant_part(), &rat(-1, 2));
        assert_eq!(s.homogeneous(), f.homogeneous());
    }

    #[test]
    fn eval_and_mpoly() {
        let f = LinForm::var("n").scale(&rat_int(42)).add(&LinForm::constant(rat_int(5)));
        let mut a = BTreeMap::new();
        a.insert("n".to_string(), rat_int(2));
        assert_eq!(f.eval(&a), Some(rat_int(89)));
        assert_eq!(f.to_mpoly().eval(&a), rat_int(89));
        assert!(f.has_integer_coeffs());
        assert!(!LinForm::var("k").scale(&rat(1, 2)).has_integer_coeffs());
    }
}

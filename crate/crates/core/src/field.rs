//! Coefficient-field abstraction: plain rationals, or rational functions in a
//! declared parameter set (k alone, or k and z). Generic code (Gosper, the
//! telescoper search, exact linear solving) is written against [`Field`];
//! [`FieldElement`] is the tagged runtime form used at API boundaries.

use crate::mpoly::MPoly;
use crate::rat::Rat;
use crate::ratfunc::RatFunc;
use num::{One, Zero};

pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rat(r: &Rat) -> Self;
    /// Constant (parameter-free) value, when the element is one.
    fn as_rat(&self) -> Option<Rat>;
    /// Pivoting heuristic: smaller is cheaper.
    fn complexity(&self) -> u64 {
        0
    }
}

impl Field for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn as_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
    fn complexity(&self) -> u64 {
        (self.numer().bits() + self.denom().bits()) / 8
    }
}

impl Field for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        RatFunc::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        RatFunc::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        RatFunc::mul(self, other)
    }
    fn div(&self, other: &Self) -> Self {
        RatFunc::div(self, other)
    }
    fn neg(&self) -> Self {
        RatFunc::neg(self)
    }
    fn from_rat(r: &Rat) -> Self {
        RatFunc::from_rat(r.clone())
    }
    fn as_rat(&self) -> Option<Rat> {
        self.as_constant()
    }
    fn complexity(&self) -> u64 {
        RatFunc::complexity(self)
    }
}

/// Runtime-tagged field element. The tag is the parameter set: `Rat` carries
/// none, `Fun` carries the variables of its rational function. Mixing tags in
/// one computation is a usage error, enforced by the checked entry points.
#[derive(Clone, PartialEq, Debug)]
pub enum FieldElement {
    Rat(Rat),
    Fun(RatFunc),
}

impl FieldElement {
    pub fn params(&self) -> Vec<String> {
        match self {
            FieldElement::Rat(_) => vec![],
            FieldElement::Fun(f) => {
                let mut v: Vec<String> = f
                    .num()
                    .vars()
                    .iter()
                    .chain(f.den().vars().iter())
                    .cloned()
                    .collect();
                v.sort();
                v.dedup();
                v
            }
        }
    }

    fn lift(&self) -> RatFunc {
        match self {
            FieldElement::Rat(r) => RatFunc::from_rat(r.clone()),
            FieldElement::Fun(f) => f.clone(),
        }
    }

    fn binop(&self, other: &Self, f: impl Fn(&RatFunc, &RatFunc) -> RatFunc) -> Self {
        match (self, other) {
            (FieldElement::Rat(a), FieldElement::Rat(b)) => {
                let r = f(&RatFunc::from_rat(a.clone()), &RatFunc::from_rat(b.clone()));
                FieldElement::Rat(r.as_constant().expect("rational result"))
            }
            _ => FieldElement::Fun(f(&self.lift(), &other.lift())),
        }
    }
}

impl Field for FieldElement {
    fn zero() -> Self {
        FieldElement::Rat(Zero::zero())
    }
    fn one() -> Self {
        FieldElement::Rat(One::one())
    }
    fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rat(r) => Zero::is_zero(r),
            FieldElement::Fun(f) => f.is_zero(),
        }
    }
    fn add(&self, other: &Self) -> Self {
        self.binop(other, RatFunc::add)
    }
    fn sub(&self, other: &Self) -> Self {
        self.binop(other, RatFunc::sub)
    }
    fn mul(&self, other: &Self) -> Self {
        self.binop(other, RatFunc::mul)
    }
    fn div(&self, other: &Self) -> Self {
        self.binop(other, RatFunc::div)
    }
    fn neg(&self) -> Self {
        match self {
            FieldElement::Rat(r) => FieldElement::Rat(-r),
            FieldElement::Fun(f) => FieldElement::Fun(f.neg()),
        }
    }
    fn from_rat(r: &Rat) -> Self {
        FieldElement::Rat(r.clone())
    }
    fn as_rat(&self) -> Option<Rat> {
        match self {
            FieldElement::Rat(r) => Some(r.clone()),
            FieldElement::Fun(f) => f.as_constant(),
        }
    }
    fn complexity(&self) -> u64 {
        match self {
            FieldElement::Rat(r) => Field::complexity(r),
            FieldElement::Fun(f) => f.complexity(),
        }
    }
}

/// Convenience: a rational function in one parameter variable, as a field
/// element over that parameter.
pub fn param_ratfunc(p: MPoly, q: MPoly) -> RatFunc {
    RatFunc::new(p, q)
}

//! Dense univariate polynomials over a generic coefficient field — the
//! working representation for everything that lives in the summation
//! variable (Gosper equations, telescoper systems, dispersion analysis).

use std::collections::BTreeSet;

use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::mpoly::MPoly;
use crate::rat::Rat;
use crate::ratfunc::RatFunc;

/// Coefficients by ascending power; no trailing zeros; zero is the empty vec.
#[derive(Clone, PartialEq, Debug)]
pub struct UPoly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> UPoly<F> {
    pub fn zero() -> Self {
        UPoly { coeffs: vec![] }
    }

    pub fn constant(c: F) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            UPoly { coeffs: vec![c] }
        }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn x() -> Self {
        UPoly {
            coeffs: vec![F::zero(), F::one()],
        }
    }

    /// Monic linear factor x + a.
    pub fn linear(a: F) -> Self {
        UPoly {
            coeffs: vec![a, F::one()],
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    pub fn lc(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i)));
        }
        Self::from_coeffs(out)
    }

    pub fn neg(&self) -> Self {
        UPoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UPoly {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let inv = F::one().div(&self.lc());
        self.scale(&inv)
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = d.coeffs.len() - 1;
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        let lc = d.lc();
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = rem[i].div(&lc);
            for (j, c) in d.coeffs.iter().enumerate() {
                let t = q.mul(c);
                rem[i - dd + j] = rem[i - dd + j].sub(&t);
            }
            quot[i - dd] = q;
        }
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.divrem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Substitute x -> x + c.
    pub fn shift(&self, c: &F) -> Self {
        // Horner on (x + c)
        let lin = Self::linear(c.clone());
        let mut acc = Self::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(a.clone()));
        }
        acc
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(a);
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl UPoly<Rat> {
    /// Lift into an MPoly in the named variable.
    pub fn to_mpoly(&self, var: &str) -> MPoly {
        let coeffs: Vec<MPoly> = self
            .coeffs
            .iter()
            .map(|c| MPoly::constant(c.clone()))
            .collect();
        MPoly::from_upoly(var, &coeffs)
    }
}

/// Integer roots of a univariate polynomial with rational coefficients,
/// scanned up to the Cauchy root bound.
pub fn integer_roots(p: &UPoly<Rat>) -> Result<Vec<i64>> {
    if p.is_zero() {
        return Err(Error::Domain("zero polynomial has every root".into()));
    }
    // strip powers of x; x = 0 is then a root
    let mut coeffs = p.coeffs().to_vec();
    let mut roots = Vec::new();
    let mut shift = 0usize;
    while coeffs.first().map(|c| Zero::is_zero(c)).unwrap_or(false) {
        coeffs.remove(0);
        shift += 1;
    }
    if shift > 0 {
        roots.push(0);
    }
    if coeffs.len() <= 1 {
        roots.sort();
        return Ok(roots);
    }
    let q = UPoly::from_coeffs(coeffs);
    let lc = q.lc();
    let bound_f = q
        .coeffs()
        .iter()
        .map(|c| (c / &lc).abs())
        .fold(<Rat as Zero>::zero(), |m, v| if v > m { v } else { m });
    let bound = bound_f.ceil().to_integer() + BigInt::one();
    if bound <= BigInt::from(4096) {
        // small Cauchy bound: direct scan is cheapest
        let b = i64::try_from(&bound).expect("small bound fits i64");
        for j in -b..=b {
            if j != 0 && Zero::is_zero(&q.eval(&Rat::from_integer(j.into()))) {
                roots.push(j);
            }
        }
        roots.sort();
        return Ok(roots);
    }
    // rational root theorem: an integer root divides the constant term of the
    // denominator-cleared polynomial
    let den_lcm = q
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let a0 = (q.coeff(0) * Rat::from_integer(den_lcm))
        .to_integer()
        .abs();
    debug_assert!(!a0.is_zero());
    // trial-division factorization; constant terms arising here (resultants
    // of shifted polynomials) are smooth, so this terminates quickly
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut rem = a0;
    let mut d = BigInt::from(2);
    let trial_cap = BigInt::from(1_000_000u32);
    while d <= trial_cap && (&d * &d) <= rem {
        let mut e = 0u32;
        while (&rem % &d).is_zero() {
            rem /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += 1;
    }
    if rem > BigInt::one() {
        if (&rem * &rem) > (&trial_cap * &trial_cap) && bound > trial_cap {
            // composite cofactor with only large prime factors and a huge
            // root bound: divisors could be missed, refuse instead
            return Err(Error::Internal(
                "integer root search: constant term resists factorization".into(),
            ));
        }
        factors.push((rem, 1));
    }
    // enumerate divisors within the root bound and confirm by evaluation
    let mut divisors: Vec<BigInt> = vec![BigInt::one()];
    for (p_f, e) in &factors {
        let mut next = Vec::with_capacity(divisors.len() * (*e as usize + 1));
        for dv in &divisors {
            let mut cur = dv.clone();
            next.push(cur.clone());
            for _ in 0..*e {
                cur = &cur * p_f;
                if cur > bound {
                    break;
                }
                next.push(cur.clone());
            }
        }
        divisors = next;
    }
    divisors.sort();
    divisors.dedup();
    for dv in divisors {
        if dv > bound {
            continue;
        }
        for cand in [dv.clone(), -dv] {
            if Zero::is_zero(&q.eval(&Rat::from_integer(cand.clone()))) {
                let r = i64::try_from(&cand)
                    .map_err(|_| Error::Internal("integer root exceeds i64".into()))?;
                roots.push(r);
            }
        }
    }
    roots.sort();
    Ok(roots)
}

/// Resultant via the Sylvester matrix, with entries lifted into the fraction
/// field; exact Gaussian elimination gives the determinant.
pub fn resultant<F: Field>(p: &UPoly<F>, q: &UPoly<F>) -> F {
    let (Some(dp), Some(dq)) = (p.degree(), q.degree()) else {
        return F::zero();
    };
    if dp == 0 {
        return p.lc().clone().powu(dq);
    }
    if dq == 0 {
        return q.lc().clone().powu(dp);
    }
    let n = dp + dq;
    let mut m = vec![vec![F::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate().take(dq) {
        for (j, c) in p.coeffs.iter().enumerate() {
            row[i + dp - j] = c.clone();
        }
    }
    for i in 0..dp {
        for (j, c) in q.coeffs.iter().enumerate() {
            m[dq + i][i + dq - j] = c.clone();
        }
    }
    determinant(m)
}

trait PowU {
    fn powu(self, e: usize) -> Self;
}

impl<F: Field> PowU for F {
    fn powu(self, e: usize) -> Self {
        let mut acc = F::one();
        for _ in 0..e {
            acc = acc.mul(&self);
        }
        acc
    }
}

fn determinant<F: Field>(mut m: Vec<Vec<F>>) -> F {
    let n = m.len();
    let mut det = F::one();
    for col in 0..n {
        // cheapest nonzero pivot
        let mut piv: Option<(usize, u64)> = None;
        for (r, row) in m.iter().enumerate().take(n).skip(col) {
            if !row[col].is_zero() {
                let cost = row[col].complexity();
                if piv.map(|(_, c)| cost < c).unwrap_or(true) {
                    piv = Some((r, cost));
                }
            }
        }
        let Some((pr, _)) = piv else {
            return F::zero();
        };
        if pr != col {
            m.swap(pr, col);
            det = det.neg();
        }
        let p = m[col][col].clone();
        det = det.mul(&p);
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].div(&p);
            for c in col..n {
                let t = m[col][c].mul(&f);
                m[r][c] = m[r][c].sub(&t);
            }
        }
    }
    det
}

/// All shifts j >= 0 such that gcd(p(x), q(x + j)) is nonconstant, computed
/// through the resultant Res_x(p(x), q(x + j)) and its nonnegative integer
/// roots in j.
pub fn dispersion_set(p: &UPoly<Rat>, q: &UPoly<Rat>) -> Result<BTreeSet<u64>> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::Domain("dispersion of a zero polynomial".into()));
    }
    if p.degree() == Some(0) || q.degree() == Some(0) {
        return Ok(BTreeSet::new());
    }
    // lift into Q(j): q(x + j) has coefficients polynomial in j
    let j = RatFunc::from_poly(MPoly::var("j"));
    let lift = |u: &UPoly<Rat>| -> UPoly<RatFunc> {
        UPoly::from_coeffs(u.coeffs().iter().map(|c| RatFunc::from_rat(c.clone())).collect())
    };
    let pj = lift(p);
    let qj = lift(q).shift(&j);
    let res = resultant(&pj, &qj);
    let num = res.num();
    // res is a polynomial in j (denominator constant)
    let coeffs: Vec<Rat> = num
        .as_upoly("j")
        .into_iter()
        .map(|c| c.as_constant().expect("resultant must be a polynomial in j"))
        .collect();
    let rj = UPoly::from_coeffs(coeffs);
    if rj.is_zero() {
        // p and q share a factor for every shift only in degenerate cases;
        // fall back to a direct scan over the Cauchy range
        let mut out = BTreeSet::new();
        for shift in 0..=64u64 {
            let shifted = q.shift(&Rat::from_integer(shift.into()));
            if p.gcd(&shifted).degree().map(|d| d > 0).unwrap_or(false) {
                out.insert(shift);
            }
        }
        return Ok(out);
    }
    let mut out = BTreeSet::new();
    for r in integer_roots(&rj)? {
        if r >= 0 {
            // verify: spurious candidates are rejected by an actual gcd
            let shifted = q.shift(&Rat::from_integer(r.into()));
            if p.gcd(&shifted).degree().map(|d| d > 0).unwrap_or(false) {
                out.insert(r as u64);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat_int, Rat};

    fn lin(a: i64) -> UPoly<Rat> {
        UPoly::linear(rat_int(a))
    }

    #[test]
    fn divrem_gcd() {
        let p = lin(1).mul(&lin(2)); // (x+1)(x+2)
        let q = lin(1).mul(&lin(5));
        assert_eq!(p.gcd(&q), lin(1));
        let (quo, rem) = p.divrem(&lin(2));
        assert!(rem.is_zero());
        assert_eq!(quo, lin(1));
    }

    #[test]
    fn shift_works() {
        let p = lin(0).mul(&lin(0)); // x^2
        let s = p.shift(&rat_int(3)); // (x+3)^2
        assert_eq!(s, lin(3).mul(&lin(3)));
    }

    #[test]
    fn resultant_of_coprime_nonzero() {
        let p = lin(1);
        let q = lin(2);
        // Res(x+1, x+2) = 1 (difference of roots)
        let r = resultant(&p, &q);
        assert_eq!(r, rat_int(1));
        let r2 = resultant(&p, &lin(1));
        assert!(Zero::is_zero(&r2));
    }

    #[test]
    fn dispersion_examples() {
        // (n+3, n) -> {3}
        let d = dispersion_set(&lin(3), &lin(0)).unwrap();
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![3]);
        // (n, n+2) -> {}
        let d = dispersion_set(&lin(0), &lin(2)).unwrap();
        assert!(d.is_empty());
        // (n(n-3), n): only j = 0 aligns a root of q(n+j) with a root of p
        let p = lin(0).mul(&lin(-3));
        let d = dispersion_set(&p, &lin(0)).unwrap();
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![0]);
        // the mirror-order call picks up the shift-by-3 alignment
        let d = dispersion_set(&lin(0), &p).unwrap();
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![0, 3]);
        // zero input is a domain error
        assert!(dispersion_set(&UPoly::zero(), &lin(0)).is_err());
    }

    #[test]
    fn dispersion_matches_bruteforce_oracle() {
        // randomized agreement with the brute-force gcd scan
        let mut seed: u64 = 7;
        let mut rnd = move |m: u64| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) % m
        };
        for _ in 0..100 {
            let mut p = UPoly::one();
            let mut q = UPoly::one();
            for _ in 0..=rnd(2) {
                p = p.mul(&lin(rnd(12) as i64 - 6));
            }
            for _ in 0..=rnd(2) {
                q = q.mul(&lin(rnd(12) as i64 - 6));
            }
            let got = dispersion_set(&p, &q).unwrap();
            let mut want = BTreeSet::new();
            for j in 0..=24u64 {
                let shifted = q.shift(&Rat::from_integer(j.into()));
                if p.gcd(&shifted).degree().map(|d| d > 0).unwrap_or(false) {
                    want.insert(j);
                }
            }
            assert_eq!(got, want, "p={p:?} q={q:?}");
        }
    }

    #[test]
    fn integer_roots_examples() {
        // (x-2)(x+5)x
        let p = lin(-2).mul(&lin(5)).mul(&UPoly::x());
        let r = integer_roots(&p).unwrap();
        assert_eq!(r, vec![-5, 0, 2]);
    }
}

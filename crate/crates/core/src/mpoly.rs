//! Sparse multivariate polynomials over the rationals.
//!
//! Representation: an ordered variable list plus a map from exponent vectors
//! to nonzero rational coefficients. Variables are kept sorted and unused
//! variables are dropped, so equal polynomials have identical representations
//! and derived `Eq` is structural equality.

use std::collections::BTreeMap;

use num::{BigInt, One, Signed, Zero};

use crate::rat::{rational_content, Rat};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly {
            vars: vec![],
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![], c);
        }
        MPoly { vars: vec![], terms }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], Rat::one());
        MPoly {
            vars: vec![name.to_string()],
            terms,
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rat> {
        &self.terms
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&vec![0u32; self.vars.len()]) {
                return Some(c.clone());
            }
        }
        None
    }

    /// Drop unused variables so the representation is canonical.
    fn compact(mut self) -> Self {
        if self.vars.is_empty() {
            return self;
        }
        let n = self.vars.len();
        let mut used = vec![false; n];
        for exps in self.terms.keys() {
            for (i, e) in exps.iter().enumerate() {
                if *e > 0 {
                    used[i] = true;
                }
            }
        }
        if used.iter().all(|u| *u) {
            return self;
        }
        let keep: Vec<usize> = (0..n).filter(|i| used[*i]).collect();
        let vars = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let terms = std::mem::take(&mut self.terms)
            .into_iter()
            .map(|(exps, c)| (keep.iter().map(|&i| exps[i]).collect(), c))
            .collect();
        MPoly { vars, terms }
    }

    /// Remap both operands onto the sorted union of their variables.
    fn unified(a: &MPoly, b: &MPoly) -> (Vec<String>, BTreeMap<Vec<u32>, Rat>, BTreeMap<Vec<u32>, Rat>) {
        let mut vars: Vec<String> = a.vars.iter().chain(b.vars.iter()).cloned().collect();
        vars.sort();
        vars.dedup();
        let remap = |p: &MPoly| -> BTreeMap<Vec<u32>, Rat> {
            let idx: Vec<usize> = p
                .vars
                .iter()
                .map(|v| vars.iter().position(|w| w == v).unwrap())
                .collect();
            p.terms
                .iter()
                .map(|(exps, c)| {
                    let mut e = vec![0u32; vars.len()];
                    for (i, x) in exps.iter().enumerate() {
                        e[idx[i]] = *x;
                    }
                    (e, c.clone())
                })
                .collect()
        };
        let ta = remap(a);
        let tb = remap(b);
        (vars, ta, tb)
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let (vars, ta, tb) = Self::unified(self, other);
        let mut terms = ta;
        for (e, c) in tb {
            let entry = terms.entry(e).or_insert_with(Rat::zero);
            *entry += c;
        }
        terms.retain(|_, c| !c.is_zero());
        MPoly { vars, terms }.compact()
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        if self.is_zero() || other.is_zero() {
            return MPoly::zero();
        }
        let (vars, ta, tb) = Self::unified(self, other);
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (ea, ca) in &ta {
            for (eb, cb) in &tb {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = terms.entry(e).or_insert_with(Rat::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        MPoly { vars, terms }.compact()
    }

    pub fn mul_rat(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn degree(&self, var: &str) -> u32 {
        match self.vars.iter().position(|v| v == var) {
            None => 0,
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Leading term under lex order on the sorted variable list.
    pub fn leading(&self) -> Option<(&Vec<u32>, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Leading coefficient under lex order.
    pub fn leading_coeff(&self) -> Rat {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rat::zero)
    }

    /// Coefficients by power of `var`, each free of `var`.
    pub fn as_upoly(&self, var: &str) -> Vec<MPoly> {
        let Some(i) = self.vars.iter().position(|v| v == var) else {
            return vec![self.clone()];
        };
        let deg = self.degree(var) as usize;
        let mut coeffs = vec![MPoly::zero(); deg + 1];
        let rest_vars: Vec<String> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v.clone())
            .collect();
        for (exps, c) in &self.terms {
            let d = exps[i] as usize;
            let e: Vec<u32> = exps
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, x)| *x)
                .collect();
            let coeff = &mut coeffs[d];
            let mut t = MPoly {
                vars: rest_vars.clone(),
                terms: BTreeMap::new(),
            };
            t.terms.insert(e, c.clone());
            *coeff = coeff.add(&t.compact());
        }
        coeffs
    }

    pub fn from_upoly(var: &str, coeffs: &[MPoly]) -> MPoly {
        let x = MPoly::var(var);
        let mut acc = MPoly::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(&x).add(c);
        }
        acc
    }

    /// Substitute `var` by an arbitrary polynomial, via Horner.
    pub fn subst_var(&self, var: &str, value: &MPoly) -> MPoly {
        if !self.vars.iter().any(|v| v == var) {
            return self.clone();
        }
        let coeffs = self.as_upoly(var);
        let mut acc = MPoly::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(value).add(c);
        }
        acc
    }

    /// Substitute `var` by a rational value.
    pub fn subst_rat(&self, var: &str, value: &Rat) -> MPoly {
        self.subst_var(var, &MPoly::constant(value.clone()))
    }

    /// Substitute `var -> var + c`.
    pub fn shift_var(&self, var: &str, c: &Rat) -> MPoly {
        let repl = MPoly::var(var).add(&MPoly::constant(c.clone()));
        self.subst_var(var, &repl)
    }

    /// Evaluate fully; unassigned variables are an error at the call site,
    /// so assert all variables are covered.
    pub fn eval(&self, assignment: &BTreeMap<String, Rat>) -> Rat {
        let mut acc = Rat::zero();
        for (exps, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in exps.iter().enumerate() {
                if *e > 0 {
                    let v = assignment
                        .get(&self.vars[i])
                        .unwrap_or_else(|| panic!("unassigned variable {}", self.vars[i]));
                    for _ in 0..*e {
                        t *= v;
                    }
                }
            }
            acc += t;
        }
        acc
    }

    /// Scale to integer coefficients with content 1 and positive leading
    /// coefficient; returns (unit, primitive) with self = unit * primitive.
    pub fn normalize_primitive(&self) -> (Rat, MPoly) {
        if self.is_zero() {
            return (Rat::one(), MPoly::zero());
        }
        let mut unit = rational_content(self.terms.values().cloned());
        if self.leading_coeff().is_negative() {
            unit = -unit;
        }
        let inv = unit.recip();
        (unit, self.mul_rat(&inv))
    }

    /// Exact division; None if not an exact multiple.
    pub fn exact_div(&self, d: &MPoly) -> Option<MPoly> {
        if self.is_zero() {
            return Some(MPoly::zero());
        }
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.mul_rat(&c.recip()));
        }
        let (vars, ta, tb) = Self::unified(self, d);
        let mut rem = ta;
        let db = MPoly {
            vars: vars.clone(),
            terms: tb,
        };
        let (lead_e, lead_c) = {
            let (e, c) = db.terms.iter().next_back().unwrap();
            (e.clone(), c.clone())
        };
        let mut quot: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        while !rem.is_empty() {
            let (re, rc) = {
                let (e, c) = rem.iter().next_back().unwrap();
                (e.clone(), c.clone())
            };
            let mut qe = Vec::with_capacity(vars.len());
            for (a, b) in re.iter().zip(&lead_e) {
                if a < b {
                    return None;
                }
                qe.push(a - b);
            }
            let qc = &rc / &lead_c;
            // rem -= qc * x^qe * d
            for (e, c) in &db.terms {
                let te: Vec<u32> = e.iter().zip(&qe).map(|(x, y)| x + y).collect();
                let entry = rem.entry(te).or_insert_with(Rat::zero);
                *entry -= &qc * c;
            }
            rem.retain(|_, c| !c.is_zero());
            quot.insert(qe, qc);
        }
        Some(
            MPoly {
                vars,
                terms: quot,
            }
            .compact(),
        )
    }

    /// Pseudo-remainder of self by d in the main variable `var`.
    fn prem(&self, d: &MPoly, var: &str) -> MPoly {
        let mut a = self.as_upoly(var);
        let b = d.as_upoly(var);
        let db = b.len() - 1;
        let lb = b[db].clone();
        while a.len() >= b.len() && !(a.len() == 1 && a[0].is_zero()) {
            let da = a.len() - 1;
            let la = a[da].clone();
            // a := lb * a - la * x^(da-db) * b
            let mut next = vec![MPoly::zero(); da.max(1)];
            for (i, c) in a.iter().enumerate().take(da) {
                next[i] = c.mul(&lb);
            }
            for (i, c) in b.iter().enumerate().take(db) {
                let j = i + da - db;
                next[j] = next[j].sub(&c.mul(&la));
            }
            while next.len() > 1 && next.last().unwrap().is_zero() {
                next.pop();
            }
            a = next;
        }
        MPoly::from_upoly(var, &a)
    }

    /// Content of self seen as a univariate polynomial in `var`: the gcd of
    /// its coefficients.
    fn content_in(&self, var: &str) -> MPoly {
        let coeffs = self.as_upoly(var);
        let mut g = MPoly::zero();
        for c in coeffs {
            g = poly_gcd(&g, &c);
            if g.as_constant().map(|c| c.is_one()).unwrap_or(false) {
                break;
            }
        }
        g
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        for (exps, c) in self.terms.iter().rev() {
            let mut factors: Vec<String> = Vec::new();
            let abs = c.abs();
            if !abs.is_one() || exps.iter().all(|e| *e == 0) {
                factors.push(crate::rat::render_rat(&abs));
            }
            for (i, e) in exps.iter().enumerate() {
                if *e == 1 {
                    factors.push(self.vars[i].clone());
                } else if *e > 1 {
                    factors.push(format!("{}^{}", self.vars[i], e));
                }
            }
            let term = factors.join("*");
            if parts.is_empty() {
                if c.is_negative() {
                    parts.push(format!("-{term}"));
                } else {
                    parts.push(term);
                }
            } else if c.is_negative() {
                parts.push(format!(" - {term}"));
            } else {
                parts.push(format!(" + {term}"));
            }
        }
        parts.concat()
    }
}

/// Primitive gcd with positive leading coefficient; gcd(0,0) = 0.
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin, exact for u64.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// In-place remainder of a by b over Z/p; b must be nonempty with nonzero lc.
fn rem_mod_p(a: &mut Vec<u64>, b: &[u64], p: u64) {
    let db = b.len() - 1;
    let inv = powmod(b[db], p - 2, p);
    while a.len() > db {
        let la = *a.last().unwrap();
        if la != 0 {
            let q = mulmod(la, inv, p);
            let shift = a.len() - 1 - db;
            for (i, bc) in b.iter().enumerate().take(db) {
                let t = mulmod(q, *bc, p);
                a[shift + i] = (a[shift + i] + p - t) % p;
            }
        }
        a.pop();
        while a.len() > db && *a.last().unwrap() == 0 {
            a.pop();
        }
    }
    while !a.is_empty() && *a.last().unwrap() == 0 {
        a.pop();
    }
}

/// Monic gcd over Z/p of dense ascending coefficient vectors.
fn gcd_mod_p(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    loop {
        if b.is_empty() {
            let inv = powmod(*a.last().unwrap(), p - 2, p);
            return a.iter().map(|c| mulmod(*c, inv, p)).collect();
        }
        rem_mod_p(&mut a, &b, p);
        std::mem::swap(&mut a, &mut b);
    }
}

/// Modular gcd (Brown) for univariate polynomials with rational coefficients:
/// gcd images modulo word-size primes, CRT-combined with the leading
/// coefficient imposed, verified by trial division. None when the inputs are
/// not truly univariate in `var`.
fn univariate_gcd_modular(p0: &MPoly, q0: &MPoly, var: &str) -> Option<MPoly> {
    use num_integer::Integer;
    let to_int = |m: &MPoly| -> Option<Vec<BigInt>> {
        let cs: Option<Vec<Rat>> = m.as_upoly(var).iter().map(|c| c.as_constant()).collect();
        let cs = cs?;
        let mut den_lcm = BigInt::one();
        for c in &cs {
            den_lcm = &den_lcm / den_lcm.gcd(c.denom()) * c.denom();
        }
        let ints: Vec<BigInt> = cs
            .iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        Some(ints.iter().map(|c| c / &g).collect())
    };
    let a = to_int(p0)?;
    let b = to_int(q0)?;
    let glc = a.last().unwrap().gcd(b.last().unwrap());

    let reduce = |v: &[BigInt], p: u64| -> Vec<u64> {
        let pb = BigInt::from(p);
        let mut out: Vec<u64> = v
            .iter()
            .map(|c| u64::try_from(c.mod_floor(&pb)).expect("residue fits"))
            .collect();
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    };
    let trial = |cand: &[BigInt]| -> Option<MPoly> {
        let coeffs: Vec<MPoly> = cand
            .iter()
            .map(|c| MPoly::constant(Rat::from_integer(c.clone())))
            .collect();
        let g = MPoly::from_upoly(var, &coeffs).normalize_primitive().1;
        if p0.exact_div(&g).is_some() && q0.exact_div(&g).is_some() {
            Some(g)
        } else {
            None
        }
    };

    let mut prime: u64 = (1 << 62) + 1;
    let mut modulus = BigInt::one();
    let mut img: Vec<BigInt> = Vec::new();
    let mut deg = usize::MAX;
    let mut last_candidate: Option<Vec<BigInt>> = None;
    for _ in 0..512 {
        while !is_prime_u64(prime) {
            prime += 2;
        }
        let p = prime;
        prime += 2;
        let am = reduce(&a, p);
        let bm = reduce(&b, p);
        if am.len() != a.len() || bm.len() != b.len() {
            continue; // leading coefficient vanished
        }
        let gm = gcd_mod_p(am, bm, p);
        if gm.len() == 1 {
            return Some(MPoly::one());
        }
        let glcp = u64::try_from(glc.mod_floor(&BigInt::from(p))).expect("residue fits");
        let scaled: Vec<u64> = gm.iter().map(|c| mulmod(*c, glcp, p)).collect();
        let gdeg = scaled.len() - 1;
        if gdeg < deg {
            deg = gdeg;
            modulus = BigInt::from(p);
            img = scaled.iter().map(|c| BigInt::from(*c)).collect();
            last_candidate = None;
        } else if gdeg > deg {
            continue; // unlucky prime
        } else {
            let mp = u64::try_from(modulus.mod_floor(&BigInt::from(p))).expect("residue fits");
            let minv = powmod(mp, p - 2, p);
            let pb = BigInt::from(p);
            for (x, v) in img.iter_mut().zip(&scaled) {
                let xr = u64::try_from(x.mod_floor(&pb)).expect("residue fits");
                let diff = (v + p - xr) % p;
                let t = mulmod(diff, minv, p);
                *x += &modulus * BigInt::from(t);
            }
            modulus *= &pb;
        }
        // symmetric range
        let half = &modulus / BigInt::from(2);
        let centered: Vec<BigInt> = img
            .iter()
            .map(|c| {
                let r = c.mod_floor(&modulus);
                if r > half {
                    r - &modulus
                } else {
                    r
                }
            })
            .collect();
        let mut content = BigInt::zero();
        for c in &centered {
            content = content.gcd(c);
        }
        let candidate: Vec<BigInt> = centered.iter().map(|c| c / &content).collect();
        if last_candidate.as_ref() == Some(&candidate) {
            if let Some(g) = trial(&candidate) {
                return Some(g);
            }
        }
        last_candidate = Some(candidate);
    }
    None
}

pub fn poly_gcd(p: &MPoly, q: &MPoly) -> MPoly {
    if p.is_zero() {
        return q.normalize_primitive().1;
    }
    if q.is_zero() {
        return p.normalize_primitive().1;
    }
    if p.as_constant().is_some() || q.as_constant().is_some() {
        return MPoly::one();
    }
    // main variable: among the variables of a, the one of smallest joint
    // degree (short pseudo-remainder sequences; contents handle the rest)
    let (vars, ta, tb) = MPoly::unified(p, q);
    let a = MPoly {
        vars: vars.clone(),
        terms: ta,
    }
    .compact();
    let b = MPoly {
        vars,
        terms: tb,
    }
    .compact();
    let var = a
        .vars
        .iter()
        .min_by_key(|v| a.degree(v).max(b.degree(v)))
        .expect("nonconstant polynomial has variables")
        .clone();
    if a.vars.len() == 1 && b.vars.len() == 1 && a.vars == b.vars {
        if let Some(g) = univariate_gcd_modular(&a, &b, &var) {
            return g;
        }
    }
    if !b.vars.contains(&var) {
        // b does not involve the main variable: gcd divides content of a
        let ca = a.content_in(&var);
        return poly_gcd(&ca, &b);
    }
    let ca = a.content_in(&var);
    let cb = b.content_in(&var);
    let cont = poly_gcd(&ca, &cb);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    // probe: specialize the other variables at points where both leading
    // coefficients survive. The image of the gcd then keeps its full degree
    // and divides the gcd of the images, so coprime images prove the gcd is
    // free of the main variable — and the primitive parts are then coprime.
    let others: Vec<String> = pa
        .vars
        .iter()
        .chain(pb.vars.iter())
        .filter(|v| **v != var)
        .cloned()
        .collect();
    if !others.is_empty() {
        let da = pa.degree(&var);
        let db = pb.degree(&var);
        for attempt in 0..4i64 {
            let mut ia = pa.clone();
            let mut ib = pb.clone();
            for (i, v) in others.iter().enumerate() {
                let val = Rat::from_integer((attempt + 2 + 3 * i as i64).into());
                ia = ia.subst_rat(v, &val);
                ib = ib.subst_rat(v, &val);
            }
            if ia.degree(&var) != da || ib.degree(&var) != db {
                continue;
            }
            let to_upoly = |p: &MPoly| {
                let cs: Option<Vec<Rat>> =
                    p.as_upoly(&var).iter().map(|c| c.as_constant()).collect();
                cs.map(crate::upoly::UPoly::from_coeffs)
            };
            let (Some(ua), Some(ub)) = (to_upoly(&ia), to_upoly(&ib)) else {
                break;
            };
            if ua.gcd(&ub).degree() == Some(0) {
                return cont;
            }
            break;
        }
    }
    // primitive PRS
    let (mut f, mut g) = if pa.degree(&var) >= pb.degree(&var) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    loop {
        // taking the primitive part (including the rational content) after
        // each pseudo-remainder keeps coefficient growth polynomial
        let r = f.prem(&g, &var).normalize_primitive().1;
        if r.is_zero() {
            break;
        }
        if r.degree(&var) == 0 {
            g = MPoly::one();
            break;
        }
        let rc = r.content_in(&var);
        f = g;
        g = r.exact_div(&rc).expect("content divides");
    }
    let g_prim = if g.as_constant().is_some() {
        MPoly::one()
    } else {
        let c = g.content_in(&var);
        g.exact_div(&c).expect("content divides")
    };
    cont.mul(&g_prim).normalize_primitive().1
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
    fn gcd_shared_linear_factor() {
        let p = n().mul(&n()).sub(&c(1)); // n^2 - 1
        let q = n().sub(&c(1)); // n - 1
        assert_eq!(poly_gcd(&p, &q), q);
    }

    #[test]
    fn gcd_coprime() {
        let p = n();
        let q = n().add(&c(4));
        assert_eq!(poly_gcd(&p, &q), MPoly::one());
    }

    #[test]
    fn gcd_content_removed() {
        // gcd(2n^2 + 2n, 4n) = n
        let p = n().mul(&n()).mul_rat(&rat_int(2)).add(&n().mul_rat(&rat_int(2)));
        let q = n().mul_rat(&rat_int(4));
        assert_eq!(poly_gcd(&p, &q), n());
    }

    #[test]
    fn gcd_zero_cases() {
        assert_eq!(poly_gcd(&MPoly::zero(), &MPoly::zero()), MPoly::zero());
        let p = n().mul_rat(&rat_int(-3));
        assert_eq!(poly_gcd(&p, &MPoly::zero()), n());
    }

    #[test]
    fn gcd_multivariate() {
        let k = MPoly::var("k");
        let g = n().add(&k); // n + k
        let p = g.mul(&n().add(&c(1)));
        let q = g.mul(&k.sub(&c(2)));
        assert_eq!(poly_gcd(&p, &q), g);
    }

    #[test]
    fn gcd_associate_of_common_factor() {
        // randomized small check of gcd(a*g, b*g) ~ g * gcd(a,b)
        let mut seed: u64 = 42;
        let mut rnd = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((seed >> 33) % 7) as i64 - 3
        };
        for _ in 0..50 {
            let a = n().mul_rat(&rat_int(rnd().max(1))).add(&c(rnd()));
            let b = n().mul(&n()).add(&n().mul_rat(&rat_int(rnd()))).add(&c(rnd()));
            let g = n().add(&c(rnd()));
            let lhs = poly_gcd(&a.mul(&g), &b.mul(&g));
            let rhs = g
                .normalize_primitive()
                .1
                .mul(&poly_gcd(&a, &b))
                .normalize_primitive()
                .1;
            // lhs is a multiple of rhs and vice versa (associates)
            assert!(lhs.exact_div(&rhs).is_some(), "lhs={:?} rhs={:?}", lhs, rhs);
            assert!(rhs.exact_div(&lhs).is_some());
        }
    }

    #[test]
    fn exact_div_and_shift() {
        let p = n().add(&c(3)).mul(&n().sub(&c(2))).mul_rat(&rat(5, 3));
        let d = n().add(&c(3));
        let q = p.exact_div(&d).unwrap();
        assert_eq!(q, n().sub(&c(2)).mul_rat(&rat(5, 3)));
        assert!(p.exact_div(&n().add(&c(1))).is_none());
        let s = p.shift_var("n", &rat_int(1));
        // p(n+1) = 5/3 (n+4)(n-1)
        assert_eq!(
            s,
            n().add(&c(4)).mul(&n().sub(&c(1))).mul_rat(&rat(5, 3))
        );
    }

    #[test]
    fn eval_and_render() {
        let k = MPoly::var("k");
        let p = n().mul(&k).mul_rat(&rat_int(2)).add(&c(5));
        let mut asn = BTreeMap::new();
        asn.insert("n".to_string(), rat_int(3));
        asn.insert("k".to_string(), rat_int(4));
        assert_eq!(p.eval(&asn), rat_int(29));
        assert_eq!(p.render(), "2*k*n + 5");
    }
}

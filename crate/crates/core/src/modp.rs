//! Homomorphic-image nullspace solving for matrices over Q(x): evaluate the
//! parameter and the coefficients modulo word-sized primes, solve the
//! resulting systems with machine arithmetic, reconstruct each nullspace
//! coordinate as a rational function mod p by Cauchy interpolation, and lift
//! to Q by Chinese remaindering plus rational reconstruction. Every candidate
//! produced here is re-validated over Q by the caller, so unlucky primes or
//! sample points cost retries, never correctness.

use num::bigint::BigInt;
use num::{Integer, One, Signed, ToPrimitive, Zero};

use crate::mpoly::MPoly;
use crate::rat::Rat;
use crate::ratfunc::RatFunc;
use crate::upoly::UPoly;

/// 62-bit primes used for the homomorphic images.
pub const PRIMES: [u64; 24] = [
    4611686018427388039,
    4611686018427388073,
    4611686018427388081,
    4611686018427388091,
    4611686018427388093,
    4611686018427388097,
    4611686018427388157,
    4611686018427388181,
    4611686018427388207,
    4611686018427388247,
    4611686018427388273,
    4611686018427388279,
    4611686018427388289,
    4611686018427388291,
    4611686018427388319,
    4611686018427388331,
    4611686018427388349,
    4611686018427388361,
    4611686018427388387,
    4611686018427388429,
    4611686018427388447,
    4611686018427388463,
    4611686018427388477,
    4611686018427388513,
];

#[inline]
fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powm(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm(acc, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    acc
}

#[inline]
fn invm(a: u64, p: u64) -> u64 {
    powm(a, p - 2, p)
}

fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    let m = x.mod_floor(&BigInt::from(p));
    m.to_u64().expect("reduced residue fits u64")
}

/// a/b mod p; None when p divides b.
fn rat_mod(r: &Rat, p: u64) -> Option<u64> {
    let den = bigint_mod(r.denom(), p);
    if den == 0 {
        return None;
    }
    Some(mulm(bigint_mod(r.numer(), p), invm(den, p), p))
}

// ---------------------------------------------------------------------------
// dense polynomials mod p, low-to-high coefficients
// ---------------------------------------------------------------------------

fn ptrim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pdeg(v: &[u64]) -> Option<usize> {
    if v.is_empty() {
        None
    } else {
        Some(v.len() - 1)
    }
}

fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addm(out[i + j], mulm(x, y, p), p);
        }
    }
    ptrim(&mut out);
    out
}

fn psub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = subm(x, y, p);
    }
    ptrim(&mut out);
    out
}

fn pscale(a: &[u64], c: u64, p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = a.iter().map(|&x| mulm(x, c, p)).collect();
    ptrim(&mut out);
    out
}

fn pdivrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    if a.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quo = vec![0u64; a.len() - db];
    let lead_inv = invm(*b.last().unwrap(), p);
    for i in (db..a.len()).rev() {
        let c = mulm(rem[i], lead_inv, p);
        if c == 0 {
            continue;
        }
        quo[i - db] = c;
        for (j, &bc) in b.iter().enumerate() {
            rem[i - db + j] = subm(rem[i - db + j], mulm(c, bc, p), p);
        }
    }
    ptrim(&mut rem);
    ptrim(&mut quo);
    (quo, rem)
}

fn peval(a: &[u64], t: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &c in a.iter().rev() {
        acc = addm(mulm(acc, t, p), c, p);
    }
    acc
}

/// Newton interpolation through (ts[i], ys[i]) mod p.
fn newton_interp(ts: &[u64], ys: &[u64], p: u64) -> Vec<u64> {
    let n = ts.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = subm(dd[i], dd[i - 1], p);
            let den = subm(ts[i], ts[i - j], p);
            dd[i] = mulm(num, invm(den, p), p);
        }
    }
    let mut acc: Vec<u64> = Vec::new();
    for i in (0..n).rev() {
        // acc = acc*(x - t_i) + dd[i]
        let lin = vec![subm(0, ts[i], p), 1];
        acc = pmul(&acc, &lin, p);
        if acc.is_empty() {
            acc = vec![0];
        }
        acc[0] = addm(acc[0], dd[i], p);
        ptrim(&mut acc);
    }
    acc
}

/// Cauchy rational interpolation mod p: minimal (num, den) with balanced
/// degrees fitting the points, denominator normalized monic.
fn cauchy_interp_zp(ts: &[u64], ys: &[u64], p: u64) -> Option<(Vec<u64>, Vec<u64>)> {
    let n = ts.len();
    let mut modulus = vec![1u64];
    for &t in ts {
        modulus = pmul(&modulus, &[subm(0, t, p), 1], p);
    }
    let interp = newton_interp(ts, ys, p);
    let stop = (n - 1) / 2;
    let mut r0 = modulus;
    let mut r1 = interp;
    let mut q0: Vec<u64> = Vec::new();
    let mut q1: Vec<u64> = vec![1];
    while pdeg(&r1).map(|d| d > stop).unwrap_or(false) {
        let (quo, rem) = pdivrem(&r0, &r1, p);
        let qn = psub(&q0, &pmul(&quo, &q1, p), p);
        r0 = r1;
        r1 = rem;
        q0 = q1;
        q1 = qn;
    }
    if r1.is_empty() || q1.is_empty() {
        return None;
    }
    let lc_inv = invm(*q1.last().unwrap(), p);
    Some((pscale(&r1, lc_inv, p), pscale(&q1, lc_inv, p)))
}

// ---------------------------------------------------------------------------
// matrices mod p
// ---------------------------------------------------------------------------

/// Canonical reduced-echelon nullspace, leftmost pivots.
fn rref_nullspace_zp(mut a: Vec<Vec<u64>>, p: u64) -> (Vec<usize>, Vec<Vec<u64>>) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        if row == m {
            break;
        }
        let Some(pr) = (row..m).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, pr);
        let inv = invm(a[row][col], p);
        for c in col..n {
            a[row][c] = mulm(a[row][c], inv, p);
        }
        for r in 0..m {
            if r == row || a[r][col] == 0 {
                continue;
            }
            let f = a[r][col];
            for c in col..n {
                a[r][c] = subm(a[r][c], mulm(f, a[row][c], p), p);
            }
        }
        pivots.push(col);
        row += 1;
    }
    let mut basis = Vec::new();
    for f in 0..n {
        if pivots.contains(&f) {
            continue;
        }
        let mut v = vec![0u64; n];
        v[f] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = subm(0, a[r][f], p);
        }
        basis.push(v);
    }
    (pivots, basis)
}

/// All coefficients of every entry reduced mod p up front, organized per
/// entry as (num terms, den terms) with the exponent of `var`.
struct MatImage {
    rows: usize,
    cols: usize,
    /// entry -> (numerator, denominator) as dense coefficient vectors in var
    entries: Vec<(Vec<u64>, Vec<u64>)>,
}

fn poly_image(mp: &MPoly, var: &str, p: u64) -> Option<Vec<u64>> {
    let coeffs = mp.as_upoly(var);
    let mut out = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        let r = c
            .as_constant()
            .expect("univariate polynomial has constant coefficients");
        out.push(rat_mod(&r, p)?);
    }
    ptrim(&mut out);
    Some(out)
}

fn matrix_image(mat: &[Vec<RatFunc>], var: &str, p: u64) -> Option<MatImage> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut entries = Vec::with_capacity(rows * cols);
    for row in mat {
        for e in row {
            let num = poly_image(e.num(), var, p)?;
            let den = poly_image(e.den(), var, p)?;
            if den.is_empty() {
                return None; // denominator vanished identically mod p
            }
            entries.push((num, den));
        }
    }
    Some(MatImage { rows, cols, entries })
}

impl MatImage {
    /// Specialize var = t; None when some denominator vanishes at t.
    fn at(&self, t: u64, p: u64) -> Option<Vec<Vec<u64>>> {
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols);
            for c in 0..self.cols {
                let (num, den) = &self.entries[r * self.cols + c];
                let d = peval(den, t, p);
                if d == 0 {
                    return None;
                }
                row.push(mulm(peval(num, t, p), invm(d, p), p));
            }
            out.push(row);
        }
        Some(out)
    }
}

/// Mod-p nullspace of a matrix over Z_p(var): per basis vector, per pivot
/// column, a reduced rational function (num, monic den) in the parameter.
#[derive(Clone)]
struct CoreImage {
    pivots: Vec<usize>,
    free: Vec<usize>,
    /// coords[b][i] for pivot column pivots[i] of basis vector b
    coords: Vec<Vec<(Vec<u64>, Vec<u64>)>>,
}

/// One prime's view of the nullspace over Q(var).
struct PrimeImage {
    p: u64,
    core: CoreImage,
}

/// Shape used for cross-prime consistency: degree pair per coordinate.
fn image_shape(img: &CoreImage) -> Vec<(usize, usize)> {
    img.coords
        .iter()
        .flatten()
        .map(|(n, d)| (n.len(), d.len()))
        .collect()
}

fn solve_one_prime(
    mat: &[Vec<RatFunc>],
    var: &str,
    p: u64,
    start_budget: usize,
) -> Option<PrimeImage> {
    let image = matrix_image(mat, var, p)?;
    let core = solve_core(&image, p, start_budget)?;
    Some(PrimeImage { p, core })
}

/// Sample, solve, and Cauchy-reconstruct the nullspace of a univariate
/// rational-function matrix entirely mod p.
fn solve_core(image: &MatImage, p: u64, start_budget: usize) -> Option<CoreImage> {
    let ncols = image.cols;
    let mut samples: Vec<(u64, Vec<usize>, Vec<Vec<u64>>)> = Vec::new();
    let mut next_t: u64 = 1;
    let mut budget = start_budget.max(8);
    loop {
        // the pivot set of maximal rank, lexicographically smallest
        let best = samples
            .iter()
            .map(|(_, piv, _)| piv.clone())
            .max_by(|a, b| a.len().cmp(&b.len()).then(b.cmp(a)));
        let have = best
            .as_ref()
            .map(|piv| samples.iter().filter(|(_, sp, _)| sp == piv).count())
            .unwrap_or(0);
        if best.is_none() || have < budget + 3 {
            if next_t > 60_000 {
                return None;
            }
            let t = next_t;
            next_t += 1;
            let Some(spec) = image.at(t, p) else {
                continue;
            };
            let (piv, basis) = rref_nullspace_zp(spec, p);
            samples.push((t, piv, basis));
            continue;
        }
        let pivots = best.expect("samples exist");
        let group: Vec<&(u64, Vec<usize>, Vec<Vec<u64>>)> = samples
            .iter()
            .filter(|(_, sp, _)| *sp == pivots)
            .collect();
        let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
        if free.is_empty() {
            return Some(CoreImage {
                pivots,
                free,
                coords: Vec::new(),
            });
        }
        let (fit, extra) = group.split_at(budget.min(group.len() - 3));
        let ts: Vec<u64> = fit.iter().map(|(t, _, _)| *t).collect();
        let mut coords: Vec<Vec<(Vec<u64>, Vec<u64>)>> = Vec::with_capacity(free.len());
        let mut ok = true;
        'recon: for b in 0..free.len() {
            let mut per_pivot = Vec::with_capacity(pivots.len());
            for (i, _pc) in pivots.iter().enumerate() {
                let pc = pivots[i];
                let ys: Vec<u64> = fit.iter().map(|(_, _, vs)| vs[b][pc]).collect();
                let first = ys[0];
                let fitted = if ys.iter().all(|&y| y == first) {
                    let num = if first == 0 { vec![] } else { vec![first] };
                    (num, vec![1])
                } else {
                    match cauchy_interp_zp(&ts, &ys, p) {
                        Some(f) => f,
                        None => {
                            ok = false;
                            break 'recon;
                        }
                    }
                };
                // confirm on held-out samples
                for (t, _, vs) in extra {
                    let d = peval(&fitted.1, *t, p);
                    if d == 0 || mulm(invm(d, p), peval(&fitted.0, *t, p), p) != vs[b][pc] {
                        ok = false;
                        break 'recon;
                    }
                }
                per_pivot.push(fitted);
            }
            coords.push(per_pivot);
        }
        if ok {
            return Some(CoreImage {
                pivots,
                free,
                coords,
            });
        }
        budget *= 2;
        if budget > 2048 {
            return None;
        }
    }
}

// ---------------------------------------------------------------------------
// lifting to Q
// ---------------------------------------------------------------------------

/// Rational number a/b from its residue r mod m with |a|, |b| <= sqrt(m/2).
fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<Rat> {
    let bound = (m / BigInt::from(2)).sqrt();
    let mut r0 = m.clone();
    let mut r1 = r.mod_floor(m);
    let mut v0 = BigInt::zero();
    let mut v1 = BigInt::one();
    while r1 > bound {
        let q = &r0 / &r1;
        let rn = &r0 - &q * &r1;
        let vn = &v0 - &q * &v1;
        r0 = r1;
        r1 = rn;
        v0 = v1;
        v1 = vn;
    }
    if v1.is_zero() || v1.abs() > bound {
        return None;
    }
    if v1.is_negative() {
        r1 = -r1;
        v1 = -v1;
    }
    if r1.gcd(&v1) != BigInt::one() {
        return None;
    }
    Some(Rat::new(r1, v1))
}

fn crt_pair(a1: &BigInt, m1: &BigInt, a2: u64, p2: u64) -> BigInt {
    // x = a1 + m1 * ((a2 - a1) * m1^{-1} mod p2)
    let p2b = BigInt::from(p2);
    let m1_mod = bigint_mod(m1, p2);
    let inv = BigInt::from(invm(m1_mod, p2));
    let diff = (BigInt::from(a2) - a1).mod_floor(&p2b);
    a1 + m1 * ((diff * inv).mod_floor(&p2b))
}

/// Lift one scalar from residues modulo pairwise-distinct primes.
fn lift_scalar(residues: &[(u64, u64)]) -> Option<Rat> {
    let mut acc = BigInt::from(residues[0].0);
    let mut modulus = BigInt::from(residues[0].1);
    for &(r, p) in &residues[1..] {
        acc = crt_pair(&acc, &modulus, r, p);
        modulus *= BigInt::from(p);
    }
    rational_reconstruct(&acc, &modulus)
}

/// Lift matching coefficient vectors across primes; None when any coefficient
/// fails rational reconstruction.
fn lift_coeffs(images: &[&PrimeImage], pick: impl Fn(&PrimeImage) -> &[u64]) -> Option<Vec<Rat>> {
    let len = pick(images[0]).len();
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let residues: Vec<(u64, u64)> = images.iter().map(|img| (pick(img)[i], img.p)).collect();
        out.push(lift_scalar(&residues)?);
    }
    Some(out)
}

fn coeffs_to_ratfunc(num: &[Rat], den: &[Rat], var: &str) -> RatFunc {
    let nu = UPoly::from_coeffs(num.to_vec()).to_mpoly(var);
    let de = UPoly::from_coeffs(den.to_vec()).to_mpoly(var);
    RatFunc::new(nu, de)
}

/// Exact nullspace of a matrix over Q(var) via homomorphic images. The result
/// is a candidate: callers must validate it against the matrix.
pub fn nullspace_univariate(
    mat: &[Vec<RatFunc>],
    var: &str,
) -> Option<(Vec<usize>, Vec<Vec<RatFunc>>)> {
    let ncols = if mat.is_empty() { 0 } else { mat[0].len() };
    let mut images: Vec<PrimeImage> = Vec::new();
    let mut budget = 8usize;
    for &p in PRIMES.iter() {
        let Some(img) = solve_one_prime(mat, var, p, budget) else {
            continue;
        };
        budget = budget.max(
            img.coords
                .iter()
                .flatten()
                .map(|(n, d)| n.len() + d.len())
                .max()
                .unwrap_or(8),
        );
        // keep only images agreeing with the maximal shape; smaller shapes
        // come from unlucky primes
        images.push(img);
        let best_key = images
            .iter()
            .map(|i| (i.pivots.clone(), image_shape(i)))
            .max()
            .expect("nonempty");
        images.retain(|i| (i.pivots.clone(), image_shape(i)) == best_key);

        if images.first().map(|i| i.free.is_empty()).unwrap_or(false) && images.len() >= 2 {
            return Some((images[0].pivots.clone(), Vec::new()));
        }
        if images.len() < 2 {
            continue;
        }
        // attempt the lift with everything collected so far
        let refs: Vec<&PrimeImage> = images.iter().collect();
        let pivots = images[0].pivots.clone();
        let free = images[0].free.clone();
        let mut basis: Vec<Vec<RatFunc>> = Vec::with_capacity(free.len());
        let mut complete = true;
        'lift: for (b, &fcol) in free.iter().enumerate() {
            let mut v = vec![RatFunc::zero(); ncols];
            v[fcol] = RatFunc::one();
            for (i, &pc) in pivots.iter().enumerate() {
                let num = lift_coeffs(&refs, |img| &img.coords[b][i].0);
                let den = lift_coeffs(&refs, |img| &img.coords[b][i].1);
                match (num, den) {
                    (Some(nu), Some(de)) if !de.is_empty() => {
                        v[pc] = coeffs_to_ratfunc(&nu, &de, var);
                    }
                    _ => {
                        complete = false;
                        break 'lift;
                    }
                }
            }
            basis.push(v);
        }
        if complete {
            return Some((pivots, basis));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    #[test]
    fn modular_polynomial_division_roundtrip() {
        let p = PRIMES[0];
        let a = vec![3, 0, 5, 7, 1];
        let b = vec![2, 0, 1];
        let (q, r) = pdivrem(&a, &b, p);
        let back = psub(&a, &pmul(&q, &b, p), p);
        assert_eq!(back, r);
        assert!(pdeg(&r).unwrap_or(0) < pdeg(&b).unwrap());
    }

    #[test]
    fn cauchy_recovers_rational_function() {
        // f(x) = (x^2 + 3) / (2x + 1) mod p, from 9 samples
        let p = PRIMES[1];
        let num = vec![3, 0, 1];
        let den = vec![1, 2];
        let ts: Vec<u64> = (1..=9).collect();
        let ys: Vec<u64> = ts
            .iter()
            .map(|&t| mulm(peval(&num, t, p), invm(peval(&den, t, p), p), p))
            .collect();
        let (n, d) = cauchy_interp_zp(&ts, &ys, p).unwrap();
        // normalized monic denominator: den/2, num/2
        let half = invm(2, p);
        assert_eq!(n, pscale(&num, half, p));
        assert_eq!(d, pscale(&den, half, p));
    }

    #[test]
    fn rational_reconstruction_roundtrip() {
        let m: BigInt = BigInt::from(PRIMES[0]) * BigInt::from(PRIMES[1]);
        for (a, b) in [(22i64, 7i64), (-355, 113), (1, 999983), (123456789, 2)] {
            let r = (BigInt::from(a) * BigInt::from(b).extended_gcd(&m).x.mod_floor(&m))
                .mod_floor(&m);
            let got = rational_reconstruct(&r, &m).unwrap();
            assert_eq!(got, Rat::new(BigInt::from(a), BigInt::from(b)));
        }
    }

    #[test]
    fn univariate_nullspace_matches_hand_solution() {
        // columns (x0, x1, c): x0*1 + x1*k - c*(k+1) = 0 and x1 - c = 0
        // nullspace: (1, 1, 1)
        let k = MPoly::var("k");
        let one = MPoly::one();
        let mat = vec![
            vec![
                RatFunc::from_poly(one.clone()),
                RatFunc::from_poly(k.clone()),
                RatFunc::from_poly(k.add(&one).neg()),
            ],
            vec![
                RatFunc::zero(),
                RatFunc::one(),
                RatFunc::from_rat(rat_int(-1)),
            ],
        ];
        let (pivots, basis) = nullspace_univariate(&mat, "k").unwrap();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        assert_eq!(v[2], RatFunc::one());
        assert_eq!(v[1], RatFunc::one());
        assert_eq!(v[0], RatFunc::one());
    }
}

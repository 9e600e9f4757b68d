//! Exact linear-system solving over an arbitrary coefficient field.
//!
//! Gaussian elimination with pivoting on the cheapest entry (lowest degree,
//! then fewest terms, via `Field::complexity`), which keeps coefficient
//! growth manageable over Q(k) and Q(k,z).

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

#[derive(Clone, Debug)]
pub struct LinSolution<F> {
    /// One particular solution.
    pub particular: Vec<F>,
    /// Basis of the homogeneous solution space.
    pub nullspace: Vec<Vec<F>>,
}

/// Solve `mat * x = rhs` exactly. Returns None when inconsistent.
pub fn linsolve<F: Field>(mat: &[Vec<F>], rhs: &[F]) -> Option<LinSolution<F>> {
    let m = mat.len();
    assert_eq!(m, rhs.len(), "matrix/rhs size mismatch");
    let n = if m == 0 { 0 } else { mat[0].len() };
    for row in mat {
        assert_eq!(row.len(), n, "ragged matrix");
    }

    let mut a: Vec<Vec<F>> = mat.to_vec();
    let mut b: Vec<F> = rhs.to_vec();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut row = 0usize;
    let mut pivoted = vec![false; n];

    while row < m {
        // cheapest nonzero pivot among remaining rows and un-pivoted columns
        let mut best: Option<(usize, usize, u64)> = None;
        for r in row..m {
            for (c, pv) in pivoted.iter().enumerate() {
                if *pv || a[r][c].is_zero() {
                    continue;
                }
                let cost = a[r][c].complexity();
                if best.map(|(_, _, bc)| cost < bc).unwrap_or(true) {
                    best = Some((r, c, cost));
                }
            }
        }
        let Some((pr, pc, _)) = best else {
            break;
        };
        a.swap(row, pr);
        b.swap(row, pr);
        let piv = a[row][pc].clone();
        for c in 0..n {
            a[row][c] = a[row][c].div(&piv);
        }
        b[row] = b[row].div(&piv);
        for r in 0..m {
            if r == row || a[r][pc].is_zero() {
                continue;
            }
            let factor = a[r][pc].clone();
            for c in 0..n {
                let t = a[row][c].mul(&factor);
                a[r][c] = a[r][c].sub(&t);
            }
            let t = b[row].mul(&factor);
            b[r] = b[r].sub(&t);
        }
        pivoted[pc] = true;
        pivot_col_of_row.push(pc);
        row += 1;
    }

    // consistency: remaining rows must have zero rhs
    for r in row..m {
        if !b[r].is_zero() {
            return None;
        }
    }

    let free_cols: Vec<usize> = (0..n).filter(|c| !pivoted[*c]).collect();
    let mut particular = vec![F::zero(); n];
    for (r, &pc) in pivot_col_of_row.iter().enumerate() {
        particular[pc] = b[r].clone();
    }
    let mut nullspace = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let mut v = vec![F::zero(); n];
        v[fc] = F::one();
        for (r, &pc) in pivot_col_of_row.iter().enumerate() {
            v[pc] = a[r][fc].neg();
        }
        nullspace.push(v);
    }
    Some(LinSolution {
        particular,
        nullspace,
    })
}

/// Nullspace basis of a homogeneous system over a rational-function field,
/// computed by fraction-free (Bareiss) elimination on denominator-cleared
/// rows. Avoids the per-operation gcd normalization of generic field
/// arithmetic, which dominates on larger parametrized systems.
pub fn nullspace_fraction_free(mat: &[Vec<crate::ratfunc::RatFunc>]) -> Vec<Vec<crate::ratfunc::RatFunc>> {
    use crate::mpoly::{poly_gcd, MPoly};
    use crate::rat::rational_content;
    use crate::ratfunc::RatFunc;

    let m = mat.len();
    if m == 0 {
        return Vec::new();
    }
    let n = mat[0].len();
    // clear each row to polynomial entries with integer-primitive content
    let mut a: Vec<Vec<MPoly>> = mat
        .iter()
        .map(|row| {
            let mut lcm = MPoly::one();
            for e in row {
                if e.is_zero() {
                    continue;
                }
                let g = poly_gcd(&lcm, e.den());
                lcm = lcm.mul(e.den()).exact_div(&g).expect("gcd divides lcm");
            }
            let l = RatFunc::from_poly(lcm);
            let polys: Vec<MPoly> = row
                .iter()
                .map(|e| {
                    e.mul(&l)
                        .as_poly()
                        .cloned()
                        .expect("entry integral after clearing denominators")
                })
                .collect();
            let content = rational_content(
                polys
                    .iter()
                    .flat_map(|p| p.terms().values().cloned())
                    .collect::<Vec<_>>()
                    .into_iter(),
            );
            if content.is_zero() {
                polys
            } else {
                let s = content.recip();
                polys.iter().map(|p| p.mul_rat(&s)).collect()
            }
        })
        .collect();

    let mut prev = MPoly::one();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        if row == m {
            break;
        }
        let Some(pr) = (row..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, pr);
        for r in row + 1..m {
            for c in col + 1..n {
                let t = a[row][col].mul(&a[r][c]).sub(&a[r][col].mul(&a[row][c]));
                a[r][c] = t.exact_div(&prev).expect("bareiss divisibility");
            }
            a[r][col] = MPoly::zero();
        }
        prev = a[row][col].clone();
        pivots.push((row, col));
        row += 1;
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for f in 0..n {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v = vec![RatFunc::zero(); n];
        v[f] = RatFunc::one();
        for &(r, c) in pivots.iter().rev() {
            let mut s = RatFunc::zero();
            for (j, vj) in v.iter().enumerate().skip(c + 1) {
                if vj.is_zero() || a[r][j].is_zero() {
                    continue;
                }
                s = s.add(&RatFunc::from_poly(a[r][j].clone()).mul(vj));
            }
            v[c] = s.neg().div(&RatFunc::from_poly(a[r][c].clone()));
        }
        basis.push(v);
    }
    basis
}

/// Canonical reduced-echelon nullspace with leftmost-pivot column order, so
/// the pivot-column set and the basis (free column set to 1) are uniquely
/// determined by the matrix. Returns (pivot columns, nullspace basis).
pub fn rref_nullspace<F: Field>(mat: &[Vec<F>]) -> (Vec<usize>, Vec<Vec<F>>) {
    let m = mat.len();
    let n = if m == 0 { 0 } else { mat[0].len() };
    let mut a: Vec<Vec<F>> = mat.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        if row == m {
            break;
        }
        // cheapest nonzero entry in this column (row choice does not affect
        // the reduced form)
        let Some(pr) = (row..m)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| a[r][col].complexity())
        else {
            continue;
        };
        a.swap(row, pr);
        let piv = a[row][col].clone();
        for c in col..n {
            a[row][c] = a[row][c].div(&piv);
        }
        for r in 0..m {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..n {
                let t = a[row][c].mul(&f);
                a[r][c] = a[r][c].sub(&t);
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
        let mut v = vec![F::zero(); n];
        v[f] = F::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = a[r][f].neg();
        }
        basis.push(v);
    }
    (pivots, basis)
}

// ---------------------------------------------------------------------------
// evaluation-interpolation nullspace over parametrized fields
// ---------------------------------------------------------------------------
//
// Fraction-free elimination over Q(k) or Q(k,z) pays the worst-case minor
// degree at every intermediate step, which is prohibitive for the richer
// kernels. Instead: specialize the parameters at deterministic sample points,
// solve the resulting rational systems in canonical reduced form, and
// reconstruct each nullspace coordinate as a rational function by Cauchy
// interpolation, doubling the sample budget until the reconstruction checks
// out at fresh random points. The caller verifies the final telescoper
// symbolically, so a failed reconstruction can only cost time, never
// soundness; if the budget runs out we fall back to Bareiss.

use crate::rat::rat_int;
use crate::ratfunc::RatFunc;
use crate::upoly::UPoly;

fn entry_vars(mat: &[Vec<RatFunc>]) -> Vec<String> {
    let mut vars: Vec<String> = mat
        .iter()
        .flatten()
        .flat_map(|e| e.num().vars().iter().chain(e.den().vars().iter()).cloned())
        .collect();
    vars.sort();
    vars.dedup();
    vars
}

/// Newton-form interpolation through (t_i, y_i), coefficients in any field
/// that contains the sample values.
fn lagrange_interp(points: &[(crate::rat::Rat, RatFunc)]) -> UPoly<RatFunc> {
    let n = points.len();
    let mut dd: Vec<RatFunc> = points.iter().map(|(_, y)| y.clone()).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            let denom = &points[i].0 - &points[i - j].0;
            let num = dd[i].sub(&dd[i - 1]);
            dd[i] = num.mul(&RatFunc::from_rat(denom.recip()));
        }
    }
    let mut acc = UPoly::zero();
    for i in (0..n).rev() {
        let lin = UPoly::from_coeffs(vec![
            RatFunc::from_rat(-points[i].0.clone()),
            RatFunc::one(),
        ]);
        acc = acc.mul(&lin).add(&UPoly::constant(dd[i].clone()));
    }
    acc
}

/// Cauchy rational interpolation: the unique num/den with
/// deg num + deg den < n - 1 fitting the points, found by running the
/// extended Euclidean algorithm on (prod (x - t_i), interpolant) down to
/// balanced degree.
fn cauchy_interp(
    points: &[(crate::rat::Rat, RatFunc)],
) -> Option<(UPoly<RatFunc>, UPoly<RatFunc>)> {
    let n = points.len();
    let mut modulus = UPoly::constant(RatFunc::one());
    for (t, _) in points {
        let lin = UPoly::from_coeffs(vec![RatFunc::from_rat(-t.clone()), RatFunc::one()]);
        modulus = modulus.mul(&lin);
    }
    let interp = lagrange_interp(points);
    let stop = (n - 1) / 2;
    let mut r0 = modulus;
    let mut r1 = interp;
    let mut q0: UPoly<RatFunc> = UPoly::zero();
    let mut q1: UPoly<RatFunc> = UPoly::constant(RatFunc::one());
    while r1.degree().map(|d| d > stop).unwrap_or(false) {
        let (quo, rem) = r0.divrem(&r1);
        let qn = q0.sub(&quo.mul(&q1));
        r0 = r1;
        r1 = rem;
        q0 = q1;
        q1 = qn;
    }
    if r1.is_zero() || q1.is_zero() {
        return None;
    }
    Some((r1, q1))
}

fn upoly_in_var(p: &UPoly<RatFunc>, var: &str) -> RatFunc {
    use crate::mpoly::{poly_gcd, MPoly};
    // collect over a single common denominator so normalization happens once
    // at the end; the coefficient denominators live in the other variables,
    // and per-step Horner over RatFunc would pay a multivariate gcd per add
    let mut den = MPoly::one();
    for c in p.coeffs() {
        let g = poly_gcd(&den, c.den());
        den = den.mul(&c.den().exact_div(&g).expect("gcd divides"));
    }
    let nums: Vec<MPoly> = p
        .coeffs()
        .iter()
        .map(|c| {
            let cof = den.exact_div(c.den()).expect("lcm is divisible");
            c.num().mul(&cof)
        })
        .collect();
    RatFunc::new(MPoly::from_upoly(var, &nums), den)
}

/// Substitute one variable in every entry; None when a denominator vanishes.
fn specialize(mat: &[Vec<RatFunc>], var: &str, t: &crate::rat::Rat) -> Option<Vec<Vec<RatFunc>>> {
    mat.iter()
        .map(|row| row.iter().map(|e| e.subst_rat(var, t)).collect())
        .collect()
}

/// Spot-check mat * v = 0 at fully specialized random points.
fn residual_vanishes(mat: &[Vec<RatFunc>], basis: &[Vec<RatFunc>], vars: &[String]) -> bool {
    use crate::rat::Rat;
    let mut checks = 0;
    let mut seed: i64 = 7919;
    'outer: while checks < 3 {
        seed += 1;
        let mut assign = std::collections::BTreeMap::new();
        for (i, v) in vars.iter().enumerate() {
            // deterministic pseudo-random non-integer points
            let p = 1009 + 37 * seed + 11 * i as i64;
            assign.insert(v.clone(), Rat::new(p.into(), 7.into()));
        }
        let ev = |f: &RatFunc| f.eval(&assign);
        let mut vals: Vec<Vec<Rat>> = Vec::with_capacity(basis.len());
        for vec in basis {
            let mut out = Vec::with_capacity(vec.len());
            for e in vec {
                match ev(e) {
                    Some(x) => out.push(x),
                    None => continue 'outer,
                }
            }
            vals.push(out);
        }
        for row in mat {
            let mut row_vals = Vec::with_capacity(row.len());
            for e in row {
                match ev(e) {
                    Some(x) => row_vals.push(x),
                    None => continue 'outer,
                }
            }
            for v in &vals {
                let s: Rat = row_vals.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                if !num::Zero::is_zero(&s) {
                    return false;
                }
            }
        }
        checks += 1;
    }
    true
}

fn nullspace_rec(mat: &[Vec<RatFunc>]) -> Option<(Vec<usize>, Vec<Vec<RatFunc>>)> {
    let vars = entry_vars(mat);
    if vars.is_empty() {
        let rmat: Vec<Vec<crate::rat::Rat>> = mat
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| e.as_constant().expect("constant entry"))
                    .collect()
            })
            .collect();
        let (pivots, basis) = rref_nullspace(&rmat);
        let lifted = basis
            .into_iter()
            .map(|v| v.into_iter().map(RatFunc::from_rat).collect())
            .collect();
        return Some((pivots, lifted));
    }
    if vars.len() == 1 {
        // single parameter: solve homomorphic images mod word-sized primes
        // and lift; orders of magnitude faster than exact sampling over Q
        if let Some((pivots, basis)) = crate::modp::nullspace_univariate(mat, &vars[0]) {
            if residual_vanishes(mat, &basis, &vars) {
                return Some((pivots, basis));
            }
        }
        // fall through to exact sampling on the rare validation failure
    }
    // sample the variable of smallest entry degree: fewest outer samples,
    // with the heavier variable handled once per sample in the recursion
    let var = vars
        .iter()
        .min_by_key(|v| {
            mat.iter()
                .flatten()
                .map(|e| e.num().degree(v.as_str()) + e.den().degree(v.as_str()))
                .max()
                .unwrap_or(0)
        })
        .expect("nonempty vars")
        .clone();

    // cache of accepted samples grouped by pivot set
    let mut samples: Vec<(crate::rat::Rat, Vec<usize>, Vec<Vec<RatFunc>>)> = Vec::new();
    let mut next_t: i64 = 17;
    let mut need = 8usize;
    let max_need = 1024usize;
    loop {
        // the pivot set of maximal rank, lexicographically smallest among
        // those (degenerate samples lose rank or push pivots right)
        let best = |samples: &[(crate::rat::Rat, Vec<usize>, Vec<Vec<RatFunc>>)]| {
            samples
                .iter()
                .map(|(_, p, _)| p.clone())
                .max_by(|a, b| a.len().cmp(&b.len()).then(b.cmp(a)))
        };
        while best(&samples)
            .map(|p| samples.iter().filter(|(_, sp, _)| *sp == p).count() < need + 2)
            .unwrap_or(true)
        {
            if next_t > 40_000 {
                return None;
            }
            let t = rat_int(next_t);
            next_t += 3;
            let Some(spec) = specialize(mat, &var, &t) else {
                continue;
            };
            let Some((pivots, basis)) = nullspace_rec(&spec) else {
                return None;
            };
            samples.push((t, pivots, basis));
        }
        let pivots = best(&samples).expect("samples exist");
        let group: Vec<&(crate::rat::Rat, Vec<usize>, Vec<Vec<RatFunc>>)> = samples
            .iter()
            .filter(|(_, p, _)| *p == pivots)
            .take(need)
            .collect();
        let ncols = mat[0].len();
        let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
        if free.is_empty() {
            return Some((pivots, Vec::new()));
        }

        let mut basis: Option<Vec<Vec<RatFunc>>> = Some(Vec::new());
        'recon: for (b, &fcol) in free.iter().enumerate() {
            let mut vec = vec![RatFunc::zero(); ncols];
            vec[fcol] = RatFunc::one();
            for &pc in pivots.iter() {
                let points: Vec<(crate::rat::Rat, RatFunc)> = group
                    .iter()
                    .map(|(t, _, vs)| (t.clone(), vs[b][pc].clone()))
                    .collect();
                let first = &points[0].1;
                if points.iter().all(|(_, y)| y == first) {
                    vec[pc] = first.clone();
                    continue;
                }
                let Some((num, den)) = cauchy_interp(&points) else {
                    basis = None;
                    break 'recon;
                };
                let den_rf = upoly_in_var(&den, &var);
                if den_rf.is_zero() {
                    basis = None;
                    break 'recon;
                }
                vec[pc] = upoly_in_var(&num, &var).div(&den_rf);
            }
            basis.as_mut().expect("still reconstructing").push(vec);
        }
        if let Some(basis) = basis {
            if residual_vanishes(mat, &basis, &vars) {
                return Some((pivots, basis));
            }
        }
        need *= 2;
        if need > max_need {
            return None;
        }
    }
}

/// Nullspace over a parametrized rational-function field: interpolation from
/// specialized systems when parameters are present, with fraction-free
/// elimination as the fallback.
pub fn nullspace_parametric(mat: &[Vec<RatFunc>]) -> Vec<Vec<RatFunc>> {
    if mat.is_empty() || mat[0].is_empty() {
        return Vec::new();
    }
    match nullspace_rec(mat) {
        Some((_, basis)) => basis,
        None => nullspace_fraction_free(mat),
    }
}

/// Checked entry point over tagged field elements: every entry must carry the
/// same parameter set.
pub fn linsolve_exact(
    mat: &[Vec<FieldElement>],
    rhs: &[FieldElement],
) -> Result<Option<LinSolution<FieldElement>>> {
    let mut tag: Option<Vec<String>> = None;
    for e in mat.iter().flatten().chain(rhs.iter()) {
        let p = e.params();
        if p.is_empty() {
            continue; // rationals embed in any field
        }
        match &tag {
            None => tag = Some(p),
            Some(t) => {
                if !p.iter().all(|v| t.contains(v)) && !t.iter().all(|v| p.contains(v)) {
                    return Err(Error::MixedField);
                }
            }
        }
    }
    Ok(linsolve(mat, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat_int, Rat};

    fn r(v: i64) -> Rat {
        rat_int(v)
    }

    #[test]
    fn identity_system() {
        let mat = vec![vec![r(1), r(0)], vec![r(0), r(1)]];
        let rhs = vec![r(1), r(2)];
        let sol = linsolve(&mat, &rhs).unwrap();
        assert_eq!(sol.particular, vec![r(1), r(2)]);
        assert!(sol.nullspace.is_empty());
    }

    #[test]
    fn underdetermined() {
        let mat = vec![vec![r(1), r(1)]];
        let rhs = vec![r(3)];
        let sol = linsolve(&mat, &rhs).unwrap();
        // particular satisfies the equation
        assert_eq!(&sol.particular[0] + &sol.particular[1], r(3));
        assert_eq!(sol.nullspace.len(), 1);
        let v = &sol.nullspace[0];
        assert_eq!(&v[0] + &v[1], r(0));
        assert!(!v.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn inconsistent() {
        let mat = vec![vec![r(1), r(0)], vec![r(1), r(0)]];
        let rhs = vec![r(1), r(2)];
        assert!(linsolve(&mat, &rhs).is_none());
    }

    #[test]
    fn solutions_satisfy_system_exactly() {
        // 3x4 random-ish system; substitute back with no tolerance
        let mat = vec![
            vec![r(2), r(-1), r(3), r(0)],
            vec![r(4), r(1), r(0), r(-2)],
            vec![r(6), r(0), r(3), r(-2)],
        ];
        let rhs = vec![r(5), r(7), r(12)];
        let sol = linsolve(&mat, &rhs).unwrap();
        let check = |x: &[Rat], want: &[Rat]| {
            for (row, w) in mat.iter().zip(want) {
                let s: Rat = row.iter().zip(x).map(|(a, b)| a * b).sum();
                assert_eq!(&s, w);
            }
        };
        check(&sol.particular, &rhs);
        let zeros = vec![r(0), r(0), r(0)];
        for v in &sol.nullspace {
            check(v, &zeros);
        }
    }

    #[test]
    fn mixed_tags_rejected() {
        use crate::field::FieldElement;
        use crate::mpoly::MPoly;
        use crate::ratfunc::RatFunc;
        let k = FieldElement::Fun(RatFunc::from_poly(MPoly::var("k")));
        let z = FieldElement::Fun(RatFunc::from_poly(MPoly::var("z")));
        let mat = vec![vec![k, z]];
        let rhs = vec![FieldElement::Rat(rat_int(1))];
        assert!(matches!(
            linsolve_exact(&mat, &rhs),
            Err(crate::error::Error::MixedField)
        ));
    }
}

//! Rigorous high-precision evaluation of hypergeometric series: terms are
//! generated by the shift-quotient recurrence, the tail is bounded by a
//! geometric envelope derived symbolically from the term ratio, and every
//! result carries a conservative error budget.

use std::collections::BTreeMap;

use num::{BigInt, One, Signed, Zero};

use crate::bigfloat::{bits_for_digits, digits_matched, BigFloat};
use crate::catalog::SeriesCatalogEntry;
use crate::error::{Error, Result};
use crate::hyperterm::{HyperTerm, PolyFactor};
use crate::mpoly::MPoly;
use crate::rat::{as_integer, Rat};
use crate::upoly::UPoly;

/// Value of a series together with the accounting behind its digit claim.
#[derive(Clone, Debug)]
pub struct EvalResult {
    /// Partial sum with rounding error tracked; the tail is **not** folded in.
    pub value: BigFloat,
    pub terms_used: u64,
    /// Rigorous rational bound on the omitted tail.
    pub tail_bound: Rat,
    pub requested_digits: u32,
}

impl EvalResult {
    /// The value with the tail bound folded into its error interval.
    pub fn total(&self) -> BigFloat {
        self.value.clone().widen_error(&self.tail_bound)
    }
}

/// 1 + max |a_i/a_d|, an upper bound for the absolute value of every real
/// root; past it a polynomial keeps the sign of its leading coefficient.
fn cauchy_bound(p: &UPoly<Rat>) -> u64 {
    let Some(d) = p.degree() else {
        return 1;
    };
    let lead = p.coeff(d).abs();
    let mut worst = Rat::zero();
    for i in 0..d {
        let r = p.coeff(i).abs() / &lead;
        if r > worst {
            worst = r;
        }
    }
    let b = (worst.numer() / worst.denom()) + BigInt::from(2);
    u64::try_from(&b).unwrap_or(u64::MAX)
}

/// Split off exponential prefactors whose exponent has a non-integer constant
/// part under the assignment (e.g. (64/63)^k at k = -1/2). Returns the
/// prefactor as a BigFloat and a rewritten term whose exact evaluation at
/// integer summation indices never needs fractional powers.
fn split_prefactor(
    term: &HyperTerm,
    assignment: &BTreeMap<String, Rat>,
    prec: u32,
) -> Result<(BigFloat, HyperTerm)> {
    let mut pre = BigFloat::from_i64(1);
    let mut out = term.clone();
    for e in &mut out.exps {
        let reduced = e.exponent.subst_partial(assignment);
        let c = reduced.constant_part().clone();
        if as_integer(&c).is_some() {
            e.exponent = reduced;
            continue;
        }
        let base = e
            .base
            .eval(assignment)
            .or_else(|| e.base.as_constant())
            .ok_or_else(|| Error::Domain("exponential base not concrete".into()))?;
        if !base.is_positive() {
            return Err(Error::Domain(format!(
                "fractional power of a non-positive base {base}"
            )));
        }
        pre = pre.mul(&BigFloat::from_rational(&base, prec).pow_rational(&c, prec)?, prec);
        e.exponent = reduced.homogeneous();
    }
    Ok((pre, out))
}

/// Term ratio t(n+1)/t(n) as a univariate polynomial pair after substituting
/// the assignment.
fn ratio_polys(
    term: &HyperTerm,
    sum_var: &str,
    assignment: &BTreeMap<String, Rat>,
) -> Result<(UPoly<Rat>, UPoly<Rat>)> {
    let mut q = term.shift_quotient(sum_var)?;
    for (v, val) in assignment {
        q = q
            .subst_rat(v, val)
            .ok_or_else(|| Error::Pole(format!("term ratio undefined at {v} = {val}")))?;
    }
    let lift = |p: &MPoly| -> Result<UPoly<Rat>> {
        let coeffs = p
            .as_upoly(sum_var)
            .into_iter()
            .map(|c| {
                c.as_constant()
                    .ok_or_else(|| Error::Domain("missing variable assignment".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(UPoly::from_coeffs(coeffs))
    };
    Ok((lift(q.num())?, lift(q.den())?))
}

/// Evaluate sum over the term's summation variable with the remaining
/// variables fixed by `assignment`. Terminating sums are computed exactly;
/// infinite series are summed until the rigorous geometric tail bound meets
/// the digit target.
pub fn eval_term_series(
    term: &HyperTerm,
    assignment: &BTreeMap<String, Rat>,
    digits: u32,
) -> Result<EvalResult> {
    if digits == 0 {
        return Err(Error::Usage("digits must be at least 1".into()));
    }
    let sum_var = term.sum_var().to_string();
    let prec = bits_for_digits(digits + 10);
    let (pre, core) = split_prefactor(term, assignment, prec)?;

    if let Some(n_end) = term.termination_bound(&sum_var, assignment)? {
        let mut a = assignment.clone();
        let mut s = Rat::zero();
        for n in 0..n_end {
            a.insert(sum_var.clone(), Rat::from_integer(n.into()));
            s += core.eval_exact(&a)?;
        }
        return Ok(EvalResult {
            value: BigFloat::from_rational(&s, prec).mul(&pre, prec),
            terms_used: n_end,
            tail_bound: Rat::zero(),
            requested_digits: digits,
        });
    }

    let (num, den) = ratio_polys(term, &sum_var, assignment)?;
    let dn = num.degree().ok_or_else(|| Error::Domain("zero term ratio".into()))?;
    let dd = den.degree().expect("nonzero denominator");
    if dn > dd {
        return Err(Error::Divergent("term ratio grows without bound".into()));
    }
    let rho = if dn < dd {
        Rat::zero()
    } else {
        (num.lc() / den.lc()).abs()
    };
    if rho >= Rat::one() {
        return Err(Error::Divergent(format!(
            "term ratio limit {rho} is not below 1"
        )));
    }
    let rho_p = (Rat::one() + &rho) / Rat::from_integer(2.into());
    // f > 0 exactly where |num/den| < rho'; beyond every root of f (and of
    // den and num) the ratio stays within the geometric envelope
    let f = den.mul(&den).scale(&(&rho_p * &rho_p)).sub(&num.mul(&num));
    let n0 = cauchy_bound(&f).max(cauchy_bound(&den)).max(cauchy_bound(&num));
    let tail_factor = &rho_p / (Rat::one() - &rho_p);
    let pre_upper = pre.upper_abs_rat();
    let target = Rat::new(BigInt::one(), BigInt::from(10u8).pow(digits + 2));

    let mut a = assignment.clone();
    a.insert(sum_var.clone(), Rat::zero());
    let mut u = core.eval_exact(&a)?;
    let mut s = Rat::zero();
    let mut n: u64 = 0;
    loop {
        s += &u;
        if n >= n0 {
            let tail = u.abs() * &tail_factor * &pre_upper;
            if tail <= target {
                return Ok(EvalResult {
                    value: BigFloat::from_rational(&s, prec).mul(&pre, prec),
                    terms_used: n + 1,
                    tail_bound: tail,
                    requested_digits: digits,
                });
            }
        }
        if n > 200_000 {
            return Err(Error::Internal(
                "series did not meet its tail target within 200000 terms".into(),
            ));
        }
        let x = Rat::from_integer(n.into());
        let dv = den.eval(&x);
        n += 1;
        if !dv.is_zero() && !u.is_zero() {
            u *= num.eval(&x) / dv;
        } else {
            a.insert(sum_var.clone(), Rat::from_integer(n.into()));
            u = core.eval_exact(&a)?;
        }
    }
}

/// Evaluate a catalog entry's series.
pub fn eval_series(entry: &SeriesCatalogEntry, digits: u32) -> Result<EvalResult> {
    let term = entry.kernel()?;
    eval_term_series(&term, &BTreeMap::new(), digits)
}

/// Sum (a + b*n) c_n z0^n for a coefficient kernel carrying the symbol z:
/// the theta-operator evaluation a + b*(z d/dz) at z = z0.
pub fn eval_weighted_series(
    term: &HyperTerm,
    a: &Rat,
    b: &Rat,
    z0: &Rat,
    digits: u32,
) -> Result<EvalResult> {
    if a.is_zero() && b.is_zero() {
        return Ok(EvalResult {
            value: BigFloat::zero(),
            terms_used: 0,
            tail_bound: Rat::zero(),
            requested_digits: digits,
        });
    }
    let mut weighted = term.clone();
    if !(b.is_zero() && a.is_one()) {
        let w = MPoly::constant(a.clone()).add(&MPoly::var(term.sum_var()).mul_rat(b));
        weighted.polys.push(PolyFactor { value: w, power: 1 });
    }
    let mut assignment = BTreeMap::new();
    if weighted.vars.iter().any(|v| v == "z") {
        assignment.insert("z".to_string(), z0.clone());
    }
    eval_term_series(&weighted, &assignment, digits)
}

/// Matched digit count of a series value against an arbitrary target.
pub fn matched_digits_vs(ev: &EvalResult, target: &BigFloat) -> i64 {
    let prec = bits_for_digits(ev.requested_digits + 10);
    digits_matched(&ev.total(), target, prec, ev.requested_digits as i64)
}

/// Digits to which the evaluated series matches its catalog closed form.
pub fn verify_closed_form(entry: &SeriesCatalogEntry, digits: u32) -> Result<i64> {
    if digits < 10 {
        return Err(Error::Usage("closed-form verification needs at least 10 digits".into()));
    }
    let ev = eval_series(entry, digits)?;
    let target = entry.closed_form.value(digits)?;
    Ok(matched_digits_vs(&ev, &target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::pi_reference;
    use crate::catalog::{series_entry, theta_links, HALF_CUBED_FAMILY};
    use crate::hyperterm::parse_term;
    use crate::rat::{rat, rat_int};

    #[test]
    fn geometric_toy_sums_to_two() {
        let t = parse_term("vars: n\n(1/2)^n").unwrap();
        let ev = eval_term_series(&t, &BTreeMap::new(), 30).unwrap();
        let two = BigFloat::from_i64(2);
        assert!(matched_digits_vs(&ev, &two) >= 30);
        assert!(ev.total().widen_error(&Rat::zero()).error_le_pow10(30));
    }

    #[test]
    fn anchor_matches_16_over_pi() {
        let e = series_entry("anchor").unwrap();
        let d = verify_closed_form(&e, 60).unwrap();
        assert!(d >= 58, "anchor matched only {d} digits");
    }

    #[test]
    fn series_65_8_matches_closed_form() {
        let e = series_entry("65-8").unwrap();
        let d = verify_closed_form(&e, 60).unwrap();
        assert!(d >= 58, "65-8 matched only {d} digits");
    }

    #[test]
    fn weighted_anchor_reproduces_16_over_pi() {
        let t = parse_term(HALF_CUBED_FAMILY).unwrap();
        let ev = eval_weighted_series(&t, &rat_int(5), &rat_int(42), &rat(1, 64), 60).unwrap();
        let prec = bits_for_digits(70);
        let target = BigFloat::from_i64(16)
            .div(&pi_reference(70), prec)
            .unwrap();
        assert!(matched_digits_vs(&ev, &target) >= 58);
    }

    #[test]
    fn unweighted_mode_equals_plain_evaluation() {
        let t = parse_term(HALF_CUBED_FAMILY).unwrap();
        let w = eval_weighted_series(&t, &rat_int(1), &rat_int(0), &rat(1, 4), 40).unwrap();
        let mut a = BTreeMap::new();
        a.insert("z".to_string(), rat(1, 4));
        let p = eval_term_series(&t, &a, 40).unwrap();
        let prec = bits_for_digits(50);
        assert!(digits_matched(&w.total(), &p.total(), prec, 60) >= 38);
    }

    #[test]
    fn theta_link_crosses_to_catalog_series() {
        // (1 + 6 theta) at z = 1/4 on the (1/2)_n^3 family against the
        // scaled 11n+1 series: both are 4/pi
        let link = theta_links().into_iter().find(|l| l.series_id == "11-1").unwrap();
        let fam = link.family().unwrap();
        let w = eval_weighted_series(&fam, &link.a, &link.b, &link.z0, 60).unwrap();
        let prec = bits_for_digits(70);
        let series = eval_series(&series_entry("11-1").unwrap(), 60).unwrap();
        let target = series.total().mul(&link.scale.value(60).unwrap(), prec);
        assert!(digits_matched(&w.total(), &target, prec, 60) >= 50);
    }

    #[test]
    fn planted_wrong_closed_form_is_detected() {
        let e = series_entry("65-8").unwrap();
        let ev = eval_series(&e, 60).unwrap();
        let prec = bits_for_digits(70);
        // 9*sqrt(7)/(pi + 1e-30)
        let seven = BigFloat::from_i64(7);
        let bad_pi = pi_reference(70).add(
            &BigFloat::from_rational(
                &Rat::new(BigInt::one(), BigInt::from(10u8).pow(30)),
                prec,
            ),
            prec,
        );
        let target = seven
            .sqrt(prec)
            .unwrap()
            .mul_rat(&rat_int(9), prec)
            .div(&bad_pi, prec)
            .unwrap();
        let d = matched_digits_vs(&ev, &target);
        assert!(d <= 31, "planted mismatch scored {d} digits");
    }

    #[test]
    fn enclosure_contains_exact_partial_sum() {
        for id in ["65-8", "63-8", "anchor"] {
            let e = series_entry(id).unwrap();
            let ev = eval_series(&e, 40).unwrap();
            let t = e.kernel().unwrap();
            let mut a = BTreeMap::new();
            let mut s = Rat::zero();
            for n in 0..ev.terms_used {
                a.insert("n".to_string(), Rat::from_integer(n.into()));
                s += t.eval_exact(&a).unwrap();
            }
            let prec = bits_for_digits(60);
            let exact = BigFloat::from_rational(&s, prec);
            let diff = ev.value.sub(&exact, prec);
            let (lo, _) = diff.lower_abs();
            assert!(lo.is_zero(), "{id}: exact partial sum escaped the interval");
        }
    }

    #[test]
    fn alternating_terms_match_exact_prefix() {
        // sign handling of the (-4/5)^(3n) entry against the first 50 exact
        // terms produced by the recurrence path
        let e = series_entry("63-8").unwrap();
        let t = e.kernel().unwrap();
        let (num, den) = ratio_polys(&t, "n", &BTreeMap::new()).unwrap();
        let mut a = BTreeMap::new();
        a.insert("n".to_string(), Rat::zero());
        let mut u = t.eval_exact(&a).unwrap();
        for n in 0..50i64 {
            a.insert("n".to_string(), rat_int(n));
            assert_eq!(u, t.eval_exact(&a).unwrap(), "term {n}");
            let x = rat_int(n);
            u *= num.eval(&x) / den.eval(&x);
        }
    }

    #[test]
    fn doubling_precision_never_loses_digits() {
        let e = series_entry("126-10").unwrap();
        let d30 = verify_closed_form(&e, 30).unwrap();
        let d60 = verify_closed_form(&e, 60).unwrap();
        assert!(d30 >= 28);
        assert!(d60 >= d30);
    }

    #[test]
    fn divergent_input_rejected() {
        let t = parse_term("vars: n\n2^n").unwrap();
        assert!(matches!(
            eval_term_series(&t, &BTreeMap::new(), 10),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn zero_digits_is_a_usage_error() {
        let t = parse_term("vars: n\n(1/2)^n").unwrap();
        assert!(matches!(
            eval_term_series(&t, &BTreeMap::new(), 0),
            Err(Error::Usage(_))
        ));
    }
}

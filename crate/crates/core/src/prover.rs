//! The end-to-end proof pipeline for paired terminating kernels: exact
//! terminating sums, telescoper comparison, initial values, leading-coefficient
//! nonvanishing, documented analytic-continuation sampling, numeric
//! specialization, and the two-sided identities in the free parameter z.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::bigfloat::bits_for_digits;
use crate::bigfloat::digits_matched;
use crate::catalog::ProofTask;
use crate::error::{Error, Result};
use crate::hyperterm::HyperTerm;
use crate::mpoly::{poly_gcd, MPoly};
use crate::numeric::{eval_term_series, matched_digits_vs};
use crate::rat::{as_i64, as_integer, pochhammer_signed, rat_pow, rational_content, Rat};
use crate::ratfunc::RatFunc;
use crate::telescope::{
    boundary_check, find_telescoper, operators_equal_normalized, verify_certificate,
    CertificateCheckReport, Telescoper,
};
use crate::upoly::{integer_roots, UPoly};

/// The analytic step that is assumed, not machine-checked.
pub const CARLSON_NOTE: &str = "Carlson's theorem is assumed, not machine-verified: \
both analytic continuations are taken to be bounded and of growth below exp(pi*|k|) \
on a right half-plane, so agreement at the nonnegative integers extends to complex k. \
The numeric samples at non-integer k below are evidence for this step, not proof.";

#[derive(Clone, PartialEq, Debug)]
pub enum ProofStatus {
    ProvedForIntegers,
    FullyValidated,
    Failed(String),
}

impl ProofStatus {
    pub fn label(&self) -> String {
        match self {
            ProofStatus::ProvedForIntegers => "proved-for-integers".into(),
            ProofStatus::FullyValidated => "fully-validated".into(),
            ProofStatus::Failed(step) => format!("failed({step})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct InitialValue {
    pub k: i64,
    pub r: Rat,
    pub s: Rat,
    pub equal: bool,
}

#[derive(Clone, Debug)]
pub struct ProofReport {
    pub task_id: String,
    pub telescoper_a: Option<Telescoper>,
    pub telescoper_b: Option<Telescoper>,
    pub certificate_a: Option<CertificateCheckReport>,
    pub certificate_b: Option<CertificateCheckReport>,
    pub operators_equal: bool,
    /// Set when the operators differ structurally but each annihilates the
    /// other side's sums over the propagation range.
    pub common_annihilation: bool,
    pub initial_values: Vec<InitialValue>,
    pub leading_coeff_nonvanishing: bool,
    pub leading_checked_range: (i64, i64),
    pub carlson_note: &'static str,
    /// (sample k, agreement digits) at non-integer k.
    pub carlson_samples: Vec<(Rat, i64)>,
    pub specialization_digits: Option<i64>,
    pub status: ProofStatus,
}

impl ProofReport {
    fn new(task_id: &str) -> Self {
        ProofReport {
            task_id: task_id.to_string(),
            telescoper_a: None,
            telescoper_b: None,
            certificate_a: None,
            certificate_b: None,
            operators_equal: false,
            common_annihilation: false,
            initial_values: vec![],
            leading_coeff_nonvanishing: false,
            leading_checked_range: (0, 0),
            carlson_note: CARLSON_NOTE,
            carlson_samples: vec![],
            specialization_digits: None,
            status: ProofStatus::Failed("not-run".into()),
        }
    }
}

/// Exact value of the terminating sum over the kernel's summation variable at
/// an integer value of `rec_var`.
pub fn terminating_sum(term: &HyperTerm, rec_var: &str, k: i64) -> Result<Rat> {
    let sum_var = term.sum_var().to_string();
    let mut a = BTreeMap::new();
    a.insert(rec_var.to_string(), Rat::from_integer(k.into()));
    let n_end = term
        .termination_bound(&sum_var, &a)?
        .ok_or_else(|| Error::Domain(format!("sum does not terminate at {rec_var} = {k}")))?;
    let mut s = Rat::zero();
    for n in 0..n_end {
        a.insert(sum_var.clone(), Rat::from_integer(n.into()));
        s += term.eval_exact(&a)?;
    }
    Ok(s)
}

/// Divide a coefficient vector by its polynomial gcd and rational content and
/// fix the sign of the leading polynomial.
pub fn normalized_operator(coeffs: &[MPoly]) -> Vec<MPoly> {
    let mut g = MPoly::zero();
    for c in coeffs {
        if !c.is_zero() {
            g = if g.is_zero() { c.clone() } else { poly_gcd(&g, c) };
        }
    }
    if g.is_zero() {
        return coeffs.to_vec();
    }
    let mut out: Vec<MPoly> = coeffs
        .iter()
        .map(|c| c.exact_div(&g).expect("vector gcd divides"))
        .collect();
    let content = rational_content(
        out.iter()
            .flat_map(|p| p.terms().values().cloned())
            .collect::<Vec<_>>()
            .into_iter(),
    );
    let lead_sign = out
        .iter()
        .rev()
        .find(|p| !p.is_zero())
        .map(|p| p.leading_coeff())
        .unwrap_or_else(Rat::one);
    let scale = if (lead_sign / &content).is_negative() {
        -content.recip()
    } else {
        content.recip()
    };
    for p in &mut out {
        *p = p.mul_rat(&scale);
    }
    out
}

/// Structural equality of operator coefficient vectors up to normalization.
pub fn operators_equal(a: &[MPoly], b: &[MPoly]) -> bool {
    a.len() == b.len() && normalized_operator(a) == normalized_operator(b)
}

/// Initial-value table r_k vs s_k for k = 0 .. count-1.
pub fn check_initial_values(task: &ProofTask, count: usize) -> Result<Vec<InitialValue>> {
    let a = task.a()?;
    let b = task.b()?;
    let mut out = Vec::with_capacity(count);
    for k in 0..count as i64 {
        let r = terminating_sum(&a, task.rec_var, k)?;
        let s = terminating_sum(&b, task.rec_var, k)?;
        let equal = r == s;
        out.push(InitialValue { k, r, s, equal });
    }
    Ok(out)
}

/// True iff sum_i P_i(k) r_{k+i} = 0 exactly for every integer k in
/// [k_lo, k_hi], where r_k is the terminating sum of `term`.
pub fn recurrence_propagates(
    t: &Telescoper,
    term: &HyperTerm,
    k_lo: i64,
    k_hi: i64,
) -> Result<bool> {
    let m = t.order as i64;
    let mut sums = Vec::new();
    for k in k_lo..=(k_hi + m) {
        sums.push(terminating_sum(term, &t.rec_var, k)?);
    }
    for k in k_lo..=k_hi {
        let mut acc = Rat::zero();
        for (i, p) in t.coeffs.iter().enumerate() {
            let pk = p.subst_rat(&t.rec_var, &Rat::from_integer(k.into()));
            let Some(c) = pk.as_constant() else {
                return Err(Error::Domain(
                    "operator coefficients carry a free parameter".into(),
                ));
            };
            acc += c * &sums[(k - k_lo) as usize + i];
        }
        if !acc.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Nonnegative integer zeros of the leading coefficient, found exactly via
/// the rational-root theorem when the polynomial is univariate in `rec_var`.
fn leading_coeff_integer_roots(pm: &MPoly, rec_var: &str) -> Result<Vec<i64>> {
    let coeffs = pm.as_upoly(rec_var);
    if coeffs.iter().all(|c| c.as_constant().is_some()) {
        let up = UPoly::from_coeffs(
            coeffs.into_iter().map(|c| c.as_constant().unwrap()).collect(),
        );
        Ok(integer_roots(&up)?.into_iter().filter(|r| *r >= 0).collect())
    } else {
        // coefficients in Q(z): scan the propagation range directly
        let mut roots = Vec::new();
        for k in 0..=30i64 {
            if pm.subst_rat(rec_var, &Rat::from_integer(k.into())).is_zero() {
                roots.push(k);
            }
        }
        Ok(roots)
    }
}

/// The symbolic proof pipeline: telescopers, certificates, boundary checks,
/// operator comparison, leading-coefficient policy, and exact initial values.
pub fn prove_pair(
    task: &ProofTask,
    max_order: usize,
    initial_count: usize,
    k_range: (i64, i64),
) -> Result<ProofReport> {
    let mut rep = ProofReport::new(task.id);
    let a = task.a()?;
    let b = task.b()?;

    let Some(ta) = find_telescoper(&a, task.sum_var, task.rec_var, max_order)? else {
        rep.status = ProofStatus::Failed("no-telescoper".into());
        return Ok(rep);
    };
    let Some(tb) = find_telescoper(&b, task.sum_var, task.rec_var, max_order)? else {
        rep.status = ProofStatus::Failed("no-telescoper".into());
        return Ok(rep);
    };

    let ca = boundary_check(&a, &ta, k_range)?;
    let cb = boundary_check(&b, &tb, k_range)?;
    let cert_fail = !ca.identity_holds || !cb.identity_holds;
    let boundary_fail = !ca.boundary_at_zero
        || !ca.tail_vanishes
        || !cb.boundary_at_zero
        || !cb.tail_vanishes;
    rep.certificate_a = Some(ca);
    rep.certificate_b = Some(cb);
    if cert_fail {
        rep.telescoper_a = Some(ta);
        rep.telescoper_b = Some(tb);
        rep.status = ProofStatus::Failed("certificate".into());
        return Ok(rep);
    }
    if boundary_fail {
        rep.telescoper_a = Some(ta);
        rep.telescoper_b = Some(tb);
        rep.status = ProofStatus::Failed("boundary".into());
        return Ok(rep);
    }

    rep.operators_equal = operators_equal_normalized(&ta, &tb);
    let mut count = initial_count.max(ta.order).max(tb.order);
    if !rep.operators_equal {
        // fallback: each operator must annihilate the other sequence
        let cross = recurrence_propagates(&ta, &b, 0, 30)?
            && recurrence_propagates(&tb, &a, 0, 30)?;
        if !cross {
            rep.telescoper_a = Some(ta);
            rep.telescoper_b = Some(tb);
            rep.status = ProofStatus::Failed("operator-mismatch".into());
            return Ok(rep);
        }
        rep.common_annihilation = true;
    }

    // propagation stalls at zeros of the leading coefficient: extend the
    // initial-value check past every nonnegative integer root
    let pm = ta.coeffs.last().expect("nonempty operator");
    let roots = leading_coeff_integer_roots(pm, task.rec_var)?;
    rep.leading_checked_range = (0, 30);
    rep.leading_coeff_nonvanishing = !roots.iter().any(|r| (0..=30).contains(r));
    for r in &roots {
        count = count.max((*r as usize) + ta.order + 1);
    }

    rep.telescoper_a = Some(ta);
    rep.telescoper_b = Some(tb);
    rep.initial_values = check_initial_values(task, count)?;
    if rep.initial_values.iter().any(|iv| !iv.equal) {
        rep.status = ProofStatus::Failed("initial-values".into());
        return Ok(rep);
    }
    rep.status = ProofStatus::ProvedForIntegers;
    Ok(rep)
}

/// Numeric agreement of the two analytic continuations at non-integer k.
pub fn carlson_numeric_check(
    task: &ProofTask,
    k_samples: &[Rat],
    digits: u32,
) -> Result<Vec<(Rat, i64)>> {
    let a = task.a()?;
    let b = task.b()?;
    let mut out = Vec::with_capacity(k_samples.len());
    for k in k_samples {
        if as_integer(k).is_some() {
            return Err(Error::Usage(format!(
                "continuation samples must be non-integer, got {k}"
            )));
        }
        let mut assign = BTreeMap::new();
        assign.insert(task.rec_var.to_string(), k.clone());
        let ra = eval_term_series(&a, &assign, digits)?;
        let rb = eval_term_series(&b, &assign, digits)?;
        let prec = bits_for_digits(digits + 10);
        let d = digits_matched(&ra.total(), &rb.total(), prec, digits as i64);
        out.push((k.clone(), d));
    }
    Ok(out)
}

/// Digits to which s(k*) matches the scaled catalog closed form.
pub fn specialization_check(task: &ProofTask, digits: u32) -> Result<i64> {
    let b = task.b()?;
    let mut assign = BTreeMap::new();
    assign.insert(task.rec_var.to_string(), task.k_star.clone());
    let ev = eval_term_series(&b, &assign, digits)?;
    let series = task.series()?;
    let prec = bits_for_digits(digits + 10);
    let target = series
        .closed_form
        .value(digits)?
        .mul(&task.specialization_scale.value(digits)?, prec);
    Ok(matched_digits_vs(&ev, &target))
}

/// Full pipeline: symbolic proof, then the numeric continuation evidence and
/// the specialization digit check that upgrade the status to fully-validated.
pub fn prove_and_validate(
    task: &ProofTask,
    max_order: usize,
    initial_count: usize,
    k_range: (i64, i64),
    digits: u32,
) -> Result<ProofReport> {
    let mut rep = prove_pair(task, max_order, initial_count, k_range)?;
    if rep.status != ProofStatus::ProvedForIntegers {
        return Ok(rep);
    }
    // k* - 1 avoids the positive half-integer poles of the (1/2 - k)_n
    // denominators while staying non-integer
    let samples = vec![task.k_star.clone(), &task.k_star - Rat::one()];
    rep.carlson_samples = carlson_numeric_check(task, &samples, digits)?;
    let spec_digits = specialization_check(task, digits)?;
    rep.specialization_digits = Some(spec_digits);
    let threshold = digits as i64 - 5;
    if spec_digits >= threshold && rep.carlson_samples.iter().all(|(_, d)| *d >= threshold) {
        rep.status = ProofStatus::FullyValidated;
    } else {
        rep.status = ProofStatus::Failed("specialization".into());
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// identities in the free parameter z
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ZTelescopeReport {
    pub order_left: usize,
    pub order_right: usize,
    pub certificates_hold: bool,
    pub operators_equal: bool,
    pub initial_values_equal: bool,
}

#[derive(Clone, Debug)]
pub struct ZIdentityReport {
    pub per_k: Vec<(i64, bool)>,
    pub all_equal: bool,
    pub telescope: Option<ZTelescopeReport>,
}

/// Value of G(n, k) as an exact rational function of z, for integer n and k.
fn z_value(term: &HyperTerm, sum_var: &str, rec_var: &str, n: i64, k: i64) -> Result<RatFunc> {
    let mut a = BTreeMap::new();
    a.insert(sum_var.to_string(), Rat::from_integer(n.into()));
    a.insert(rec_var.to_string(), Rat::from_integer(k.into()));
    let mut acc = RatFunc::from_rat(term.constant.clone());
    for p in &term.pochs {
        let base = p.base.subst_partial(&a);
        let Some(b) = base.as_constant() else {
            return Err(Error::Domain(format!(
                "Pochhammer base {} involves the free parameter",
                base.render()
            )));
        };
        let run = a
            .get(&p.run_var)
            .and_then(as_i64)
            .ok_or_else(|| Error::Domain("missing run-variable value".into()))?;
        let v = pochhammer_signed(&b, run)
            .ok_or_else(|| Error::Pole("Pochhammer pole at negative index".into()))?;
        if v.is_zero() && p.power < 0 {
            return Err(Error::Pole("denominator Pochhammer vanishes".into()));
        }
        acc = acc.mul(&RatFunc::from_rat(rat_pow(&v, p.power as i64)?));
    }
    for p in &term.polys {
        let m = p
            .value
            .subst_rat(sum_var, &Rat::from_integer(n.into()))
            .subst_rat(rec_var, &Rat::from_integer(k.into()));
        if m.is_zero() && p.power < 0 {
            return Err(Error::Pole("denominator polynomial factor vanishes".into()));
        }
        acc = acc.mul(&RatFunc::from_poly(m).pow(p.power));
    }
    for e in &term.exps {
        let expo = e
            .exponent
            .eval(&a)
            .ok_or_else(|| Error::Domain("exponent not concrete".into()))?;
        let Some(ei) = as_i64(&expo) else {
            return Err(Error::Domain(format!(
                "non-integer exponent {expo} in z expansion"
            )));
        };
        match e.base.as_constant() {
            Some(c) => acc = acc.mul(&RatFunc::from_rat(rat_pow(&c, ei)?)),
            None => {
                let ei = i32::try_from(ei)
                    .map_err(|_| Error::Internal("exponent overflow".into()))?;
                acc = acc.mul(&RatFunc::from_poly(e.base.to_mpoly()).pow(ei));
            }
        }
    }
    Ok(acc)
}

/// Exact rational function of z: the terminating sum at integer k.
pub fn z_sum(term: &HyperTerm, rec_var: &str, k: i64) -> Result<RatFunc> {
    let sum_var = term.sum_var().to_string();
    let mut a = BTreeMap::new();
    a.insert(rec_var.to_string(), Rat::from_integer(k.into()));
    let n_end = term
        .termination_bound(&sum_var, &a)?
        .ok_or_else(|| Error::Domain(format!("sum does not terminate at {rec_var} = {k}")))?;
    let mut acc = RatFunc::zero();
    for n in 0..n_end as i64 {
        acc = acc.add(&z_value(term, &sum_var, rec_var, n, k)?);
    }
    Ok(acc)
}

/// Check left = right as exact rational functions of z at each integer k;
/// optionally also run the telescoping pipeline over the field Q(z).
pub fn verify_z_identity(
    left: &HyperTerm,
    right: &HyperTerm,
    k_values: &[i64],
    also_telescope: bool,
    max_order: usize,
) -> Result<ZIdentityReport> {
    let rec_var = "k";
    let mut per_k = Vec::with_capacity(k_values.len());
    for &k in k_values {
        if k < 0 {
            return Err(Error::Usage("z-identity checks need nonnegative k".into()));
        }
        let l = z_sum(left, rec_var, k)?;
        let r = z_sum(right, rec_var, k)?;
        per_k.push((k, l == r));
    }
    let all_equal = per_k.iter().all(|(_, e)| *e);
    let telescope = if also_telescope {
        let tl = find_telescoper(left, left.sum_var(), rec_var, max_order)?
            .ok_or_else(|| Error::Domain("no telescoper for the left side".into()))?;
        let tr = find_telescoper(right, right.sum_var(), rec_var, max_order)?
            .ok_or_else(|| Error::Domain("no telescoper for the right side".into()))?;
        let certificates_hold = verify_certificate(left, &tl)?.identity_holds
            && verify_certificate(right, &tr)?.identity_holds;
        let operators_equal = operators_equal_normalized(&tl, &tr);
        let order = tl.order.max(tr.order);
        let mut initial_values_equal = true;
        for k in 0..order as i64 {
            if z_sum(left, rec_var, k)? != z_sum(right, rec_var, k)? {
                initial_values_equal = false;
            }
        }
        Some(ZTelescopeReport {
            order_left: tl.order,
            order_right: tr.order,
            certificates_hold,
            operators_equal,
            initial_values_equal,
        })
    } else {
        None
    };
    Ok(ZIdentityReport {
        per_k,
        all_equal,
        telescope,
    })
}

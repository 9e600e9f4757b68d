//! The seven acceptance gates, one test per criterion, each printing a
//! single `criterion N: PASS`/`FAIL` line. Together they pin down the
//! symbolic pipeline, the numeric validation layer, the property-level
//! soundness checks, and the negative controls.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num::Zero;

use telesum::bigfloat::{bits_for_digits, pi_reference, sqrt_bigfloat, BigFloat};
use telesum::catalog::{proof_task, series_entries, series_entry, z_task};
use telesum::hyperterm::parse_term;
use telesum::numeric::{eval_series, matched_digits_vs, verify_closed_form};
use telesum::prover::{
    carlson_numeric_check, prove_pair, recurrence_propagates, specialization_check,
    terminating_sum, verify_z_identity, ProofStatus,
};
use telesum::rat::{rat, rat_int, Rat};
use telesum::telescope::{
    boundary_check, find_telescoper, operators_equal_normalized, verify_certificate, Telescoper,
};
use telesum::upoly::{dispersion_set, UPoly};

fn gate(n: u32, ok: bool) {
    println!("criterion {n}: {}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed");
}

/// Example 1: order-3 telescopers on both kernels, identical normalized
/// operators, symbolic certificates, vanishing boundary on [0, 20], exact
/// r_k = s_k for k = 0..20, all within 60 seconds.
#[test]
fn criterion_1() {
    let t0 = Instant::now();
    let task = proof_task("example-1").unwrap();
    let a = task.a().unwrap();
    let b = task.b().unwrap();
    let ta = find_telescoper(&a, "n", "k", 6).unwrap();
    let tb = find_telescoper(&b, "n", "k", 6).unwrap();
    let mut ok = true;
    match (&ta, &tb) {
        (Some(ta), Some(tb)) => {
            ok &= ta.order == 3 && tb.order == 3;
            ok &= operators_equal_normalized(ta, tb);
            ok &= verify_certificate(&a, ta).unwrap().identity_holds;
            ok &= verify_certificate(&b, tb).unwrap().identity_holds;
            let ba = boundary_check(&a, ta, (0, 20)).unwrap();
            let bb = boundary_check(&b, tb, (0, 20)).unwrap();
            ok &= ba.boundary_at_zero && ba.tail_vanishes;
            ok &= bb.boundary_at_zero && bb.tail_vanishes;
        }
        _ => ok = false,
    }
    for k in 0..=20 {
        let r = terminating_sum(&a, "k", k).unwrap();
        let s = terminating_sum(&b, "k", k).unwrap();
        ok &= r == s;
    }
    ok &= t0.elapsed() <= Duration::from_secs(60);
    gate(1, ok);
}

/// Examples 2 and 3: full symbolic proof for integer k, plus numeric
/// agreement of both analytic continuations at k = -1/6 to at least 55 of
/// 60 digits.
#[test]
fn criterion_2() {
    let mut ok = true;
    for id in ["example-2", "example-3"] {
        let task = proof_task(id).unwrap();
        let rep = prove_pair(&task, 6, 3, (0, 20)).unwrap();
        ok &= rep.status == ProofStatus::ProvedForIntegers;
        let samples = carlson_numeric_check(&task, &[rat(-1, 6)], 60).unwrap();
        ok &= samples.iter().all(|(_, d)| *d >= 55);
    }
    gate(2, ok);
}

/// All seven catalog series plus the anchor match their closed forms to at
/// least 58 of 60 digits, each within 10 seconds, against the independent
/// Machin-type pi oracle.
#[test]
fn criterion_3() {
    let mut ok = true;
    for entry in series_entries() {
        let t0 = Instant::now();
        let digits = verify_closed_form(&entry, 60).unwrap();
        ok &= digits >= 58;
        ok &= t0.elapsed() <= Duration::from_secs(10);
    }
    gate(3, ok);
}

/// Example 1 at k = -1/2: the two sides of the identity agree numerically,
/// and the specialized sum matches the scaled closed form, to >= 55 digits.
#[test]
fn criterion_4() {
    let task = proof_task("example-1").unwrap();
    let sides = carlson_numeric_check(&task, &[rat(-1, 2)], 60).unwrap();
    let mut ok = sides.iter().all(|(_, d)| *d >= 55);
    ok &= specialization_check(&task, 60).unwrap() >= 55;
    gate(4, ok);
}

/// Examples 4 and 5: exact rational-function equality in z for k = 0..6,
/// and the telescoping route over Q(z) finds one common recurrence with
/// matching initial values.
#[test]
fn criterion_5() {
    let mut ok = true;
    for id in ["example-4", "example-5"] {
        let t = z_task(id).unwrap();
        let left = t.left().unwrap();
        let right = t.right().unwrap();
        let rep = verify_z_identity(&left, &right, &[0, 1, 2, 3, 4, 5, 6], true, 4).unwrap();
        ok &= rep.all_equal;
        match &rep.telescope {
            Some(ts) => {
                ok &= ts.certificates_hold && ts.operators_equal && ts.initial_values_equal;
            }
            None => ok = false,
        }
    }
    gate(5, ok);
}

/// Method-level property checks: telescoper soundness on every paired
/// catalog kernel, exact recurrence propagation on [0, 30], the dispersion
/// oracle on 100 random cases, and interval enclosure of exact partial sums.
/// (The randomized Gosper suite runs with the library's unit tests.)
#[test]
fn criterion_6() {
    let mut ok = true;

    // telescoper soundness: an independent certificate verification for
    // every parameterized kernel in the catalog
    for id in ["example-1", "example-2", "example-3"] {
        let task = proof_task(id).unwrap();
        for term in [task.a().unwrap(), task.b().unwrap()] {
            match find_telescoper(&term, "n", "k", 6).unwrap() {
                Some(t) => {
                    ok &= verify_certificate(&term, &t).unwrap().identity_holds;
                    // recurrence propagation: Sum P_i(k) r_{k+i} = 0 exactly
                    ok &= recurrence_propagates(&t, &term, 0, 30).unwrap();
                }
                None => ok = false,
            }
        }
    }

    // dispersion against the brute-force gcd scan, 100 randomized cases
    let mut seed: u64 = 20260823;
    let mut rnd = move |m: u64| {
        seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (seed >> 33) % m
    };
    let lin = |r: i64| UPoly::from_coeffs(vec![rat_int(-r), rat_int(1)]);
    for _ in 0..100 {
        let mut p = UPoly::one();
        let mut q = UPoly::one();
        for _ in 0..=rnd(3) {
            p = p.mul(&lin(rnd(16) as i64 - 8));
        }
        for _ in 0..=rnd(3) {
            q = q.mul(&lin(rnd(16) as i64 - 8));
        }
        let got = dispersion_set(&p, &q).unwrap();
        let mut want = std::collections::BTreeSet::new();
        for j in 0..=32u64 {
            let shifted = q.shift(&Rat::from_integer(j.into()));
            if p.gcd(&shifted).degree().map(|d| d > 0).unwrap_or(false) {
                want.insert(j);
            }
        }
        ok &= got == want;
    }

    // BigFloat enclosure: the reported interval contains the exact rational
    // partial sum once widened by the tail bound
    let entry = series_entry("65-8").unwrap();
    let ev = eval_series(&entry, 40).unwrap();
    let kernel = entry.kernel().unwrap();
    let mut exact = Rat::zero();
    for n in 0..(ev.terms_used as i64) {
        let mut a = BTreeMap::new();
        a.insert("n".to_string(), rat_int(n));
        exact += kernel.eval_exact(&a).unwrap();
    }
    let prec = bits_for_digits(80);
    let diff = ev.total().sub(&BigFloat::from_rational(&exact, prec), prec);
    ok &= diff.lower_abs().0.is_zero();

    gate(6, ok);
}

/// Negative controls: a perturbed operator is rejected, a planted wrong
/// closed form is detected numerically, and an insufficient order budget
/// reports no-telescoper.
#[test]
fn criterion_7() {
    let mut ok = true;

    // binomial kernel sum_n C(k,n) = 2^k satisfies (K - 2); (K - 3) with the
    // same certificate must fail
    let binom = parse_term("vars: n, k\n poch(-k,n) * (-1)^n / poch(1,n)").unwrap();
    let t = find_telescoper(&binom, "n", "k", 2).unwrap().unwrap();
    let perturbed = Telescoper {
        coeffs: vec![
            telesum::mpoly::MPoly::constant(rat_int(-3)),
            telesum::mpoly::MPoly::one(),
        ],
        ..t.clone()
    };
    ok &= verify_certificate(&binom, &t).unwrap().identity_holds;
    ok &= !verify_certificate(&binom, &perturbed).unwrap().identity_holds;

    // planted wrong closed form: 9*sqrt(7)/(pi + 1e-30) can match at most 31
    // of 60 digits
    let entry = series_entry("65-8").unwrap();
    let ev = eval_series(&entry, 60).unwrap();
    let prec = bits_for_digits(80);
    let seven = BigFloat::from_i64(7);
    let num = sqrt_bigfloat(&seven, 80).unwrap().mul(&BigFloat::from_i64(9), prec);
    let eps = Rat::new(1.into(), num::BigInt::from(10).pow(30));
    let den = pi_reference(80).add(&BigFloat::from_rational(&eps, prec), prec);
    let target = num.div(&den, prec).unwrap();
    ok &= matched_digits_vs(&ev, &target) <= 31;

    // order budget 2 cannot telescope Example 1
    let task = proof_task("example-1").unwrap();
    let rep = prove_pair(&task, 2, 3, (0, 20)).unwrap();
    ok &= rep.status == ProofStatus::Failed("no-telescoper".into());

    gate(7, ok);
}

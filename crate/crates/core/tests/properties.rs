//! Randomized property tests for the algebraic substrate: exact rationals,
//! polynomial arithmetic, dispersion computation against a brute-force
//! oracle, rational-function normalization, interval-arithmetic enclosure,
//! and shift quotients of hypergeometric terms.

use std::collections::BTreeMap;

use num::{BigInt, Signed, Zero};
use proptest::prelude::*;

use telesum::bigfloat::BigFloat;
use telesum::hyperterm::parse_term;
use telesum::mpoly::MPoly;
use telesum::rat::{parse_rat, rat, render_rat, Rat};
use telesum::ratfunc::RatFunc;
use telesum::upoly::{dispersion_set, UPoly};

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-999i64..1000, 1i64..50).prop_map(|(p, q)| rat(p, q))
}

fn arb_nonzero_rat() -> impl Strategy<Value = Rat> {
    arb_rat().prop_filter("nonzero", |r| !r.is_zero())
}

/// Small polynomial in k and z with bounded degree and coefficients.
fn arb_mpoly() -> impl Strategy<Value = MPoly> {
    prop::collection::vec((-20i64..21, 0u32..3, 0u32..3), 0..5).prop_map(|terms| {
        let k = MPoly::var("k");
        let z = MPoly::var("z");
        let mut acc = MPoly::zero();
        for (c, ek, ez) in terms {
            let t = k.pow(ek).mul(&z.pow(ez)).mul_rat(&rat_int64(c));
            acc = acc.add(&t);
        }
        acc
    })
}

fn rat_int64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

proptest! {
    #[test]
    fn rational_render_parse_roundtrip(r in arb_rat()) {
        prop_assert_eq!(parse_rat(&render_rat(&r)).unwrap(), r);
    }

    #[test]
    fn mpoly_distributivity((a, b, c) in (arb_mpoly(), arb_mpoly(), arb_mpoly())) {
        let lhs = a.add(&b).mul(&c);
        let rhs = a.mul(&c).add(&b.mul(&c));
        prop_assert_eq!(lhs.render(), rhs.render());
    }

    #[test]
    fn mpoly_eval_is_ring_homomorphism(
        (a, b) in (arb_mpoly(), arb_mpoly()),
        kv in arb_rat(),
        zv in arb_rat(),
    ) {
        let mut point = BTreeMap::new();
        point.insert("k".to_string(), kv);
        point.insert("z".to_string(), zv);
        prop_assert_eq!(a.mul(&b).eval(&point), a.eval(&point) * b.eval(&point));
        prop_assert_eq!(a.add(&b).eval(&point), a.eval(&point) + b.eval(&point));
    }

    #[test]
    fn ratfunc_normalization_cancels_common_factors(
        (num, den, g) in (arb_mpoly(), arb_mpoly(), arb_mpoly()),
    ) {
        prop_assume!(!den.is_zero() && !g.is_zero());
        let plain = RatFunc::new(num.clone(), den.clone());
        let inflated = RatFunc::new(num.mul(&g), den.mul(&g));
        prop_assert_eq!(plain, inflated);
    }

    /// Oracle: with both polynomials given by integer root multisets, the
    /// dispersion set is exactly the set of nonnegative differences
    /// (root of q) - (root of p).
    #[test]
    fn dispersion_matches_root_difference_oracle(
        proots in prop::collection::vec(-8i64..9, 1..4),
        qroots in prop::collection::vec(-8i64..9, 1..4),
    ) {
        let from_roots = |roots: &[i64]| {
            let mut p = UPoly::one();
            for &r in roots {
                p = p.mul(&UPoly::from_coeffs(vec![rat_int64(-r), rat_int64(1)]));
            }
            p
        };
        let p = from_roots(&proots);
        let q = from_roots(&qroots);
        let got = dispersion_set(&p, &q).unwrap();
        let expected: std::collections::BTreeSet<u64> = qroots
            .iter()
            .flat_map(|&b| proots.iter().filter_map(move |&a| u64::try_from(b - a).ok()))
            .collect();
        prop_assert_eq!(got, expected);
    }

    /// Interval arithmetic encloses the exact rational result: the computed
    /// value minus the exact value is an interval touching zero.
    #[test]
    fn bigfloat_operations_enclose_exact_result(
        a in arb_rat(),
        b in arb_nonzero_rat(),
    ) {
        let prec = 96u32;
        let encloses = |x: &BigFloat, exact: &Rat| {
            let d = x.sub(&BigFloat::from_rational(exact, prec + 32), prec);
            d.lower_abs().0.is_zero()
        };
        let xa = BigFloat::from_rational(&a, prec);
        let xb = BigFloat::from_rational(&b, prec);
        prop_assert!(encloses(&xa.add(&xb, prec), &(a.clone() + b.clone())));
        prop_assert!(encloses(&xa.mul(&xb, prec), &(a.clone() * b.clone())));
        prop_assert!(encloses(&xa.div(&xb, prec).unwrap(), &(a.clone() / b.clone())));
        let sq = &a * &a;
        let root = BigFloat::from_rational(&sq, prec).sqrt(prec).unwrap();
        prop_assert!(encloses(&root, &a.abs()));
    }

    /// The symbolic shift quotient of a hypergeometric term agrees with the
    /// exact term ratio T(n+1)/T(n) at every small integer point.
    #[test]
    fn shift_quotient_matches_term_ratio(
        (pa, pb) in ((1i64..6, 1i64..6), (1i64..6, 1i64..6)),
        e in 1u32..3,
        (zp, zq) in (-9i64..10, 1i64..10),
        (c0, c1) in (1i64..50, 0i64..50),
    ) {
        prop_assume!(zp != 0);
        let src = format!(
            "vars: n\n poch({}/{},n)^{} / poch({}/{},n) * ({}/{})^n * ({}*n+{})",
            pa.0, pa.1, e, pb.0, pb.1, zp, zq, c1, c0,
        );
        let term = parse_term(&src).unwrap();
        let sigma = term.shift_quotient("n").unwrap();
        for n in 0..6i64 {
            let mut point = BTreeMap::new();
            point.insert("n".to_string(), rat_int64(n));
            let tn = term.eval_exact(&point).unwrap();
            let mut next = BTreeMap::new();
            next.insert("n".to_string(), rat_int64(n + 1));
            let tn1 = term.eval_exact(&next).unwrap();
            prop_assume!(!tn.is_zero());
            let ratio = sigma.eval(&point).expect("no pole at integer n >= 0");
            prop_assert_eq!(ratio, tn1 / tn);
        }
    }
}

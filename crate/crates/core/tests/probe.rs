use std::time::Instant;

use telesum::catalog::{proof_task, z_task};
use telesum::prover::{prove_pair, verify_z_identity};
use telesum::telescope::find_telescoper;

#[test]
#[ignore]
fn probe_examples() {
    for id in ["example-1", "example-2", "example-3"] {
        let task = proof_task(id).unwrap();
        let t0 = Instant::now();
        let rep = prove_pair(&task, 6, 3, (0, 20)).unwrap();
        println!(
            "{id}: status {:?} orders {:?}/{:?} opsEqual {} in {:?}",
            rep.status,
            rep.telescoper_a.as_ref().map(|t| t.order),
            rep.telescoper_b.as_ref().map(|t| t.order),
            rep.operators_equal,
            t0.elapsed()
        );
    }
}

#[test]
#[ignore]
fn probe_z_telescope() {
    for id in ["example-4", "example-5"] {
        let t = z_task(id).unwrap();
        let left = t.left().unwrap();
        let right = t.right().unwrap();
        let t0 = Instant::now();
        let tl = find_telescoper(&left, "n", "k", 4).unwrap();
        println!("{id} left: order {:?} in {:?}", tl.map(|t| t.order), t0.elapsed());
        let t0 = Instant::now();
        let tr = find_telescoper(&right, "n", "k", 4).unwrap();
        println!("{id} right: order {:?} in {:?}", tr.map(|t| t.order), t0.elapsed());
        let t0 = Instant::now();
        let rep = verify_z_identity(&left, &right, &[0, 1, 2, 3, 4, 5, 6], true, 4).unwrap();
        println!("{id} full: {:?} in {:?}", rep.telescope, t0.elapsed());
    }
}

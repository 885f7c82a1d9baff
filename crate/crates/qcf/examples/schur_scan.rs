use qcf::family::family_by_name;
use qcf::periodic::{block_matrix, classify, schur_value, RootOfUnity, SchurValue};
use qcf::scalars::rel_agree_complex;
use rayon::prelude::*;

fn main() {
    let t0 = std::time::Instant::now();
    let rr = family_by_name("rr").unwrap();
    let roots: Vec<RootOfUnity> = (1..=100u64)
        .flat_map(RootOfUnity::all_for_modulus)
        .collect();
    let checked: usize = roots
        .par_iter()
        .map(|root| {
            let a = classify(block_matrix(&rr, root).unwrap()).unwrap();
            let s = schur_value(root);
            match (&s, a.divergent()) {
                (SchurValue::Divergent, true) => {}
                (SchurValue::Divergent, false) => panic!("m={} r={} should diverge", root.m, root.r),
                (_, true) => panic!("m={} r={} should converge ({:?})", root.m, root.r, a.degenerate_divergence),
                (v, false) => {
                    let z = v.embed(256).unwrap();
                    let g = a.limit_embed(256).unwrap();
                    assert!(
                        rel_agree_complex(&z, &g, 200),
                        "value mismatch at m={} r={}: schur={z} classify={g}",
                        root.m, root.r
                    );
                }
            }
            1
        })
        .sum();
    println!("schur agreement OK for {checked} roots (m ≤ 100) in {:?}", t0.elapsed());
}

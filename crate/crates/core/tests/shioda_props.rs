mod common;

use common::{cofactor_inverse, data, matrix, random_candidate, random_cy_suite, small};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shioda::equations::{certified_fingerprint, fingerprint, left_eigenvector, mbar_equations};
use shioda::groups::shioda_groups;
use shioda::inverse::{construct_inverse, verify_inverse};
use shioda::lattice::gcd_all;
use shioda::maps::{composition_law_holds, root_identity_check};
use shioda::report::{build_report, AnalysisReport, MatrixInput, ReportOptions};
use shioda::shioda::analyze;

fn candidate(seed: u64) -> Vec<Vec<i64>> {
    random_candidate(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn conjugate(a: &[Vec<i64>], p: &[usize]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[p[i]][p[j]]).collect()).collect()
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn analysis_matches_cofactor_oracle(seed in any::<u64>()) {
        let a = candidate(seed);
        prop_assume!(common::det(&a) != 0);
        let (d, b) = cofactor_inverse(&a);
        match analyze(&matrix(&a)) {
            Ok(data) => {
                data.check_consistency().unwrap();
                prop_assert_eq!(data.d.clone(), BigInt::from(d));
                let got: Vec<Vec<i128>> = data.b.to_rows().iter().map(|r| small(r).iter().map(|&x| x as i128).collect()).collect();
                prop_assert_eq!(got, b.clone());
                let q: Vec<i128> = b.iter().map(|r| r.iter().sum()).collect();
                let is_cy = q.iter().sum::<i128>() == d;
                prop_assert_eq!(data.is_cy, is_cy);
                prop_assert!(root_identity_check(&data));
                prop_assert!(composition_law_holds(&data).unwrap());
            }
            Err(e) => {
                // only weight positivity can fail for a nonsingular non-negative matrix
                let q: Vec<i128> = b.iter().map(|r| r.iter().sum()).collect();
                let qp: Vec<i128> = (0..a.len()).map(|j| b.iter().map(|r| r[j]).sum()).collect();
                prop_assert!(q.iter().chain(&qp).any(|&x| x <= 0), "{e}");
            }
        }
    }

    #[test]
    fn fingerprint_is_permutation_invariant(idx in 0usize..common::SUITE_SIZE, p in permutation(5)) {
        let suite = suite();
        let a = &suite[idx % suite.len()];
        let p: Vec<usize> = p.into_iter().filter(|&i| i < a.len()).collect();
        let original = data(a);
        let permuted = data(&conjugate(a, &p));
        prop_assert_eq!(fingerprint(&original).unwrap(), fingerprint(&permuted).unwrap());
        let orders = |d: &shioda::shioda::ShiodaData| {
            let g = shioda_groups(d).unwrap();
            (g.gamma_q_prime.invariant_factors, g.gamma_a.invariant_factors, g.h_a.invariant_factors)
        };
        prop_assert_eq!(orders(&original), orders(&permuted));
        let (u, r) = mbar_equations(&original).unwrap();
        prop_assert!(u.relation.is_balanced() && r.relation.is_balanced() && r.relation.is_reduced());
    }

    #[test]
    fn left_eigenvector_tracks_q_prime(seed in any::<u64>()) {
        let a = candidate(seed);
        prop_assume!(common::det(&a) != 0);
        let Ok(data) = analyze(&matrix(&a)) else { return Ok(()) };
        let (c, lambda) = left_eigenvector(&data.matrix).unwrap().expect("q' positive gives a positive eigenvector");
        // c A = lambda e^t and c is proportional to q'
        let n = a.len();
        for j in 0..n {
            let s: BigInt = c.iter().zip(&a).map(|(ci, row)| ci * BigInt::from(row[j])).sum();
            prop_assert_eq!(s, lambda.clone());
        }
        let g = gcd_all(&data.q_prime);
        let primitive: Vec<BigInt> = data.q_prime.iter().map(|x| x / &g).collect();
        prop_assert_eq!(&c, &primitive);
        if data.is_cy {
            prop_assert_eq!(certified_fingerprint(&data.matrix).unwrap(), Some(fingerprint(&data).unwrap()));
        }
    }

    #[test]
    fn verify_inverse_ignores_relation_shifts(idx in 0usize..common::SUITE_SIZE, line in 0usize..5, k in -3i64..=3) {
        let suite = suite();
        let a = &suite[idx % suite.len()];
        let data = data(a);
        let Some(inv) = construct_inverse(&data).unwrap() else { return Ok(()) };
        let base = verify_inverse(&data, &inv).unwrap();
        prop_assert!(base.valid);
        let j = line % a.len();
        let mut shifted = inv.clone();
        let k = BigInt::from(k);
        shifted.lines[j].c0 += &k * &data.d;
        for (c, qp) in shifted.lines[j].c.iter_mut().zip(&data.q_prime) {
            *c -= &k * qp;
        }
        let after = verify_inverse(&data, &shifted).unwrap();
        prop_assert_eq!(&after.lines[j].residual, &base.lines[j].residual);
        prop_assert!(after.valid);
    }

    #[test]
    fn report_round_trips(idx in 0usize..common::SUITE_SIZE) {
        let suite = suite();
        let a = &suite[idx % suite.len()];
        let input = MatrixInput::from_matrix(a.iter().map(|r| shioda::lattice::to_bigints(r)).collect());
        let r = build_report("random", &input, ReportOptions::default()).unwrap();
        prop_assert_eq!(AnalysisReport::from_json(&r.to_json()).unwrap(), r.clone());
        prop_assert_eq!(r.to_json(), build_report("random", &input, ReportOptions::default()).unwrap().to_json());
    }
}

fn suite() -> &'static [Vec<Vec<i64>>] {
    static SUITE: std::sync::OnceLock<Vec<Vec<Vec<i64>>>> = std::sync::OnceLock::new();
    SUITE.get_or_init(|| random_cy_suite(common::SUITE_SIZE))
}

#[test]
fn suite_is_large_enough() {
    assert!(suite().len() >= 100, "only {} random Calabi-Yau matrices", suite().len());
}

#[test]
fn trivial_action_lattice_uses_reduced_weights() {
    // q = 6 q_red for this matrix; rescaling by lambda acts as lambda^{q_red}
    let ex_b = data(&[vec![15, 0, 0, 0, 1], vec![0, 5, 0, 0, 0], vec![0, 0, 5, 0, 0], vec![0, 0, 1, 5, 0], vec![0, 1, 0, 0, 2]]);
    let lat = shioda::groups::GroupLattices::new(&ex_b).unwrap();
    let three: Vec<BigInt> = ex_b.q_reduced.iter().map(|x| x * 3).collect();
    assert!(lat.acts_trivially(&three));
    let d = &ex_b.d;
    let multiple_of_q = (0..150i64).any(|c| ex_b.q.iter().zip(&three).all(|(q, t)| (q * BigInt::from(c) - t).mod_floor(d).is_zero()));
    assert!(!multiple_of_q);
}

#![allow(clippy::excessive_precision)]

use jcesd_core::model::{displacement_matrix, displacement_overlap, overlap_matrix};
use proptest::prelude::*;

// 50-digit evaluations of the alternating closed-form sum.
const REFERENCE: [(usize, usize, f64, f64); 8] = [
    (0, 0, 0.5, 0.606_530_659_712_633_423_6),
    (1, 0, 0.3, 0.501_162_126_846_763_200_9),
    (3, 7, 0.8, -0.086_848_428_430_587_064_66),
    (5, 5, 1.0, 0.117_290_578_805_064_333_0),
    (10, 3, 0.25, -0.000_966_857_359_680_594_122_6),
    (20, 20, 1.5, 0.116_430_210_792_643_112_9),
    (40, 35, 2.0, 0.081_123_308_986_370_149_61),
    (0, 12, 1.0, 0.025_328_093_580_341_968_03),
];

#[test]
fn matches_high_precision_sum() {
    for (m, n, g, want) in REFERENCE {
        let got = displacement_overlap(m, n, g);
        assert!(
            (got - want).abs() <= 1e-13 * want.abs().max(1e-3),
            "D({m},{n}; {g}) = {got:e}, want {want:e}"
        );
    }
}

#[test]
fn matches_matrix_exponential() {
    // (−1)^7 ⟨3| exp(1.6(a† − a)) |7⟩ from a 120-level expm at 50 digits
    let want = -0.086_848_428_430_587_171_30;
    assert!((displacement_overlap(3, 7, 0.8) - want).abs() < 1e-15);
}

#[test]
fn parity_times_displacement_is_an_involution() {
    // D_mn = ⟨m|Π D(2g)|n⟩-like kernel squares to the identity on the
    // low corner once the truncation is large enough.
    let g = 0.7;
    let d = overlap_matrix(120, g);
    let sq = &d * &d;
    for m in 0..20 {
        for n in 0..20 {
            let want = if m == n { 1.0 } else { 0.0 };
            assert!(
                (sq[(m, n)] - want).abs() < 1e-12,
                "({m},{n}) {}",
                sq[(m, n)]
            );
        }
    }
}

#[test]
fn displacement_columns_are_orthonormal() {
    let m = displacement_matrix(1.3, 150, 30);
    let gram = m.transpose() * &m;
    for i in 0..30 {
        for j in 0..30 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((gram[(i, j)] - want).abs() < 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn symmetric_and_bounded(m in 0usize..80, n in 0usize..80, g in 0.0f64..3.0) {
        let a = displacement_overlap(m, n, g);
        prop_assert_eq!(a, displacement_overlap(n, m, g));
        prop_assert!(a.abs() <= 1.0 + 1e-12);
        prop_assert!(a.is_finite());
    }

    #[test]
    fn matrix_agrees_with_elements(n_tr in 1usize..40, g in 0.0f64..2.0) {
        let d = overlap_matrix(n_tr, g);
        for m in 0..=n_tr {
            for n in 0..=n_tr {
                prop_assert!((d[(m, n)] - displacement_overlap(m, n, g)).abs() < 1e-14);
            }
        }
    }
}

use nalgebra::DMatrix;
use proptest::prelude::*;
use serde::Deserialize;
use voicemark::matrix::FeatureMatrix;
use voicemark::stats::{bh_fdr, compare_groups, correlation_matrix, welch_t_test};

#[derive(Deserialize)]
struct WelchCase {
    a: Vec<f64>,
    b: Vec<f64>,
    t: f64,
    df: f64,
    p: f64,
}

#[test]
fn welch_matches_high_precision_fixture() {
    let text = include_str!("fixtures/welch_mpmath.json");
    let cases: Vec<WelchCase> = serde_json::from_str(text).unwrap();
    assert_eq!(cases.len(), 100);
    for (i, c) in cases.iter().enumerate() {
        let w = welch_t_test(&c.a, &c.b);
        assert!((w.p - c.p).abs() <= 1e-9, "case {i}: p {} vs {}", w.p, c.p);
        assert!((w.t - c.t).abs() <= 1e-9 * c.t.abs().max(1.0), "case {i}: t {} vs {}", w.t, c.t);
        assert!((w.df - c.df).abs() <= 1e-9 * c.df, "case {i}: df {} vs {}", w.df, c.df);
    }
}

#[test]
fn bh_equal_adjustment() {
    assert_eq!(bh_fdr(&[0.01, 0.02, 0.03, 0.04]).unwrap(), vec![0.04; 4]);
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 2..30)
}

proptest! {
    #[test]
    fn bh_monotone_and_permutation_equivariant(p in prop::collection::vec(0.0f64..=1.0, 1..40), perm_seed in any::<u64>()) {
        let q = bh_fdr(&p).unwrap();
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
        for w in order.windows(2) {
            prop_assert!(q[w[0]] <= q[w[1]]);
        }
        for (pi, qi) in p.iter().zip(&q) {
            prop_assert!(qi >= pi && *qi <= 1.0);
        }
        let mut perm: Vec<usize> = (0..p.len()).collect();
        let mut s = perm_seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let permuted: Vec<f64> = perm.iter().map(|&i| p[i]).collect();
        let qp = bh_fdr(&permuted).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert_eq!(qp[k], q[i]);
        }
    }

    #[test]
    fn welch_swap_negates_t(a in sample(), b in sample()) {
        let (x, y) = (welch_t_test(&a, &b), welch_t_test(&b, &a));
        prop_assert_eq!(x.t, -y.t);
        prop_assert_eq!(x.p, y.p);
        prop_assert_eq!(x.df, y.df);
        prop_assert!((0.0..=1.0).contains(&x.p));
    }

    #[test]
    fn comparisons_sorted_and_adjusted(
        rows in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 6), 6..30),
        standardize in any::<bool>(),
    ) {
        let labels: Vec<u8> = (0..rows.len()).map(|i| (i % 2) as u8).collect();
        let cols = (0..6).map(|j| format!("f{j}")).collect();
        let x = FeatureMatrix::from_rows(cols, rows, labels).unwrap();
        let out = compare_groups(&x, 0.05, standardize).unwrap();
        prop_assert_eq!(out.len(), 6);
        for r in &out {
            prop_assert!(r.p_adj >= r.p_raw && r.p_adj <= 1.0);
            prop_assert_eq!(r.significant, r.p_adj < 0.05);
        }
        for w in out.windows(2) {
            prop_assert!(w[0].p_raw <= w[1].p_raw);
        }
    }

    #[test]
    fn correlation_symmetric_psd(
        rows in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 5), 3..25),
        constant in prop::option::of(0usize..5),
    ) {
        let mut rows = rows;
        if let Some(j) = constant {
            for r in &mut rows {
                r[j] = 1.5;
            }
        }
        let labels = vec![0; rows.len()];
        let x = FeatureMatrix::from_rows((0..5).map(|j| format!("f{j}")).collect(), rows, labels).unwrap();
        let c = correlation_matrix(&x);
        let m = DMatrix::from_fn(5, 5, |i, j| c.r[i][j]);
        prop_assert_eq!(&m, &m.transpose());
        let min = m.symmetric_eigenvalues().min();
        prop_assert!(min >= -1e-8, "min eigenvalue {}", min);
    }
}

use std::f64::consts::PI;

use proptest::prelude::*;

use fflab_core::finescale::{gap_distribution, k_level_correlation, TestFunction};
use fflab_core::ifs::{validate_ifs, IteratedFunctionSystem, SimilarityMap};
use fflab_core::measure::SelfSimilarMeasure;
use fflab_core::poly::{covering_intervals, real_roots, SparsePolynomial};
use fflab_core::Interval;

/// Two to four maps of `[0, 1]` into itself with normalized weights.
fn ifs_strategy() -> impl Strategy<Value = IteratedFunctionSystem> {
    prop::collection::vec((0.05f64..0.5, any::<bool>(), 0.0f64..1.0, 0.1f64..1.0), 2..=4).prop_filter_map(
        "invalid IFS",
        |raw| {
            let total: f64 = raw.iter().map(|m| m.3).sum();
            let maps = raw
                .iter()
                .map(|&(r, flip, pos, _)| {
                    let ratio = if flip { -r } else { r };
                    let t = if flip { r + pos * (1.0 - r) } else { pos * (1.0 - r) };
                    SimilarityMap::new(ratio, t)
                })
                .collect();
            let weights = raw.iter().map(|m| m.3 / total).collect();
            validate_ifs(maps, weights, Interval::closed(0.0, 1.0)).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cut_sets_partition_mass(f in ifs_strategy(), e in 1.0f64..3.0) {
        let cs = f.cut_set(10f64.powf(-e)).unwrap();
        prop_assert!((cs.total_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fourier_is_hermitian_and_bounded(f in ifs_strategy(), lambda in 0.0f64..200.0) {
        let m = SelfSimilarMeasure::new(f);
        let a = m.fourier_transform(lambda, 1e-9).unwrap();
        let b = m.fourier_transform(-lambda, 1e-9).unwrap();
        prop_assert!((a.value - b.value.conj()).norm() < 1e-8);
        prop_assert!(a.value.norm() <= 1.0 + 1e-8);
    }

    #[test]
    fn fourier_derivative_at_zero_is_the_mean(f in ifs_strategy()) {
        let m = SelfSimilarMeasure::new(f);
        let h = 1e-4;
        let d = (m.fourier_transform(h, 1e-13).unwrap().value - m.fourier_transform(-h, 1e-13).unwrap().value) / (2.0 * h);
        prop_assert!((d.im - 2.0 * PI * m.mean()).abs() < 1e-5, "{} vs {}", d.im, 2.0 * PI * m.mean());
    }

    #[test]
    fn scaled_gaps_average_one(points in prop::collection::vec(0.0f64..1.0, 2..300)) {
        let r = gap_distribution(&points).unwrap();
        prop_assert!((r.mean_gap() - 1.0).abs() < 1e-9);
        prop_assert!(r.empirical_cdf.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn correlations_are_shift_invariant(points in prop::collection::vec(0.0f64..1.0, 2..200), shift in 0.0f64..1.0) {
        let shifted: Vec<f64> = points.iter().map(|x| (x + shift).fract()).collect();
        let a = k_level_correlation(&points, 2, TestFunction::default()).unwrap();
        let b = k_level_correlation(&shifted, 2, TestFunction::default()).unwrap();
        prop_assert!((a.r_k - b.r_k).abs() < 1e-9 * (1.0 + a.r_k));
    }

    #[test]
    fn coverings_contain_roots(
        terms in prop::collection::btree_map(0u32..=20, -160_000i64..=160_000, 1..=3),
    ) {
        let terms: Vec<(i64, u32)> = terms.into_iter().filter(|t| t.1 != 0).map(|(e, c)| (c, e)).collect();
        prop_assume!(!terms.is_empty());
        let p = SparsePolynomial::new(terms, 3, 20).unwrap();
        let cover = covering_intervals(&p, 2.0, 3.0, 0.5).unwrap();
        prop_assert!(cover.certified);
        for r in real_roots(&p, 2.0, 3.0).unwrap() {
            prop_assert!(cover.intervals.iter().any(|iv| iv.lo <= r && r <= iv.hi), "root {} uncovered", r);
        }
    }
}

use fflab_core::poly::{covering_intervals, real_roots, small_value_intervals, SparsePolynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_member(rng: &mut ChaCha8Rng, k: usize, n: u32) -> SparsePolynomial {
    let bound = (n as i64).pow(4);
    let mut exps: Vec<u32> = Vec::new();
    while exps.len() < k {
        let e = rng.gen_range(0..=n);
        if !exps.contains(&e) {
            exps.push(e);
        }
    }
    let terms = exps
        .into_iter()
        .map(|e| {
            let mut c = 0;
            while c == 0 {
                c = rng.gen_range(-bound..=bound);
            }
            (c, e)
        })
        .collect();
    SparsePolynomial::new(terms, k, n).unwrap()
}

/// Smallest `ln|h| - ln T` over grid points outside the covering.
fn grid_slack(p: &SparsePolynomial, intervals: &[fflab_core::Interval], ln_t: f64, step: f64) -> f64 {
    let n = (1.0 / step).round() as usize;
    let mut worst = f64::INFINITY;
    for i in 0..=n {
        let x = 2.0 + i as f64 / n as f64;
        if intervals.iter().any(|iv| iv.contains(x)) {
            continue;
        }
        worst = worst.min(p.eval_f64(x).abs().ln() - ln_t);
    }
    worst
}

#[test]
fn random_family_members_are_covered() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let p = random_member(&mut rng, 3, 30);
        let c = covering_intervals(&p, 2.0, 3.0, 0.5).unwrap();
        assert!(c.certified, "{p}");
        assert!(c.intervals.len() <= 8);
        assert!(grid_slack(&p, &c.intervals, c.ln_threshold, 1e-5) >= 0.0, "{p}");
        for r in real_roots(&p, 2.0, 3.0).unwrap() {
            assert!(c.intervals.iter().any(|i| i.contains(r)), "{p} root {r}");
        }
    }
}

#[test]
fn random_small_value_coverings() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = random_member(&mut rng, 3, 20);
        let c = small_value_intervals(&p, 2.0, 3.0, 8.0).unwrap();
        assert!(c.certified, "{p}");
        assert!(c.intervals.len() <= 8);
        // outside points are far above a threshold that underflows doubles
        assert!(grid_slack(&p, &c.intervals, c.ln_threshold, 1e-5) >= 0.0, "{p}");
        for iv in &c.intervals {
            let spacing = 4.0 * f64::EPSILON * iv.hi;
            assert!(iv.len() <= c.diameter_bound.unwrap().max(spacing), "{p}: {iv:?}");
        }
    }
}

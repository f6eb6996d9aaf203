//! Acceptance suite: one PASS/FAIL line per criterion. Failures are fatal
//! only when `FFLAB_STRICT_ACCEPTANCE` is set.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fflab_core::census::bad_interval_census;
use fflab_core::finescale::{
    circle_distance, correlation_phase_integral, poisson_experiment, poisson_experiment_for,
    power_fractional_sequence, CorrelationPhase, ExperimentConfig, FixedPoint, PrecisionPolicy,
};
use fflab_core::ifs::{parse_ifs_config, validate_ifs, IteratedFunctionSystem, SimilarityMap};
use fflab_core::measure::SelfSimilarMeasure;
use fflab_core::oscillatory::{
    decay_exponent_fit, default_scale, linearized_bound, oscillatory_integral, BoundConfig, DecayConfig, Phase,
};
use fflab_core::poly::{covering_intervals, SparsePolynomial};
use fflab_core::Interval;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ifs(maps: &[(f64, f64)], weights: &[f64]) -> IteratedFunctionSystem {
    validate_ifs(
        maps.iter().map(|&(r, t)| SimilarityMap::new(r, t)).collect(),
        weights.to_vec(),
        Interval::closed(0.0, 1.0),
    )
    .unwrap()
}

fn cantor(p: f64) -> SelfSimilarMeasure {
    SelfSimilarMeasure::new(ifs(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)], &[p, 1.0 - p]))
}

fn lebesgue() -> SelfSimilarMeasure {
    SelfSimilarMeasure::new(ifs(&[(0.5, 0.0), (0.5, 0.5)], &[0.5, 0.5]))
}

fn cantor_23() -> SelfSimilarMeasure {
    SelfSimilarMeasure::new(
        parse_ifs_config(
            "support = [\"2\", \"3\"]\nweights = [\"1/2\", \"1/2\"]\n\
             maps = [{ratio = \"1/3\", translation = \"4/3\"}, {ratio = \"1/3\", translation = \"2\"}]",
        )
        .unwrap(),
    )
}

/// 100 log-spaced frequencies in `[0.1, 1000]`.
fn lambda_grid() -> Vec<f64> {
    (0..100).map(|i| 0.1 * 10f64.powf(4.0 * i as f64 / 99.0)).collect()
}

fn criterion_1() -> Outcome {
    let m = cantor(0.5);
    let mut worst: f64 = 0.0;
    for lambda in lambda_grid() {
        let rec = m.fourier_transform(lambda, 1e-10).unwrap();
        let prod = m.fourier_homogeneous_auto(lambda, 1e-10).unwrap();
        worst = worst.max((rec.value - prod.value).norm());
    }
    outcome(worst <= 1e-8, format!("max |recursive - product| = {worst:.3e} (limit 1e-8)"))
}

fn criterion_2() -> Outcome {
    let m = lebesgue();
    let mut worst: f64 = 0.0;
    for lambda in lambda_grid() {
        let z = Complex64::new(0.0, 2.0 * PI * lambda);
        let closed = (z.exp() - 1.0) / z;
        let v = m.fourier_transform(lambda, 1e-10).unwrap();
        worst = worst.max((v.value - closed).norm());
    }
    outcome(worst <= 1e-8, format!("max |mu_hat - closed form| = {worst:.3e} (limit 1e-8)"))
}

fn random_ifs(rng: &mut ChaCha8Rng) -> IteratedFunctionSystem {
    loop {
        let n = rng.gen_range(2..=4);
        let maps: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let r: f64 = rng.gen_range(0.05..0.5) * if rng.gen_bool(0.3) { -1.0 } else { 1.0 };
                let t = if r > 0.0 { rng.gen_range(0.0..=1.0 - r) } else { rng.gen_range(-r..=1.0) };
                (r, t)
            })
            .collect();
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let built = validate_ifs(
            maps.iter().map(|&(r, t)| SimilarityMap::new(r, t)).collect(),
            weights,
            Interval::closed(0.0, 1.0),
        );
        if let Ok(f) = built {
            return f;
        }
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let f = random_ifs(&mut rng);
        for scale in [0.1, 0.03, 0.01, 3e-3, 1e-3] {
            let cs = f.cut_set(scale).unwrap();
            worst = worst.max((cs.total_mass() - 1.0).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max |sum p_w - 1| = {worst:.3e} over 50 IFSs x 5 scales"))
}

fn criterion_4() -> Outcome {
    let cases = [
        ("Lebesgue", lebesgue(), 0.95, 1.05),
        ("Cantor", cantor(0.5), 0.58, 0.68),
        ("biased Cantor", cantor(0.75), 0.21, 0.31),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, m, lo, hi) in cases {
        let t = Instant::now();
        let e = m.frostman_exponent_estimate(1.0 / 4096.0).unwrap();
        let secs = t.elapsed().as_secs_f64();
        let ok = e.exponent >= lo && e.exponent <= hi && secs < 30.0;
        pass &= ok;
        parts.push(format!("{name} s0 = {:.4} in [{lo}, {hi}] ({secs:.1}s)", e.exponent));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let m = cantor(0.5);
    let cfg = DecayConfig { samples_per_band: 2048, quadrature_tolerance: 1e-3 };
    let fit = decay_exponent_fit(&m, &Phase::monomial(2), 64.0, 4096.0, &cfg).unwrap();
    let maxima: Vec<f64> = fit.bands.iter().map(|b| b.maximum).collect();
    let decreasing = maxima.windows(2).all(|w| w[1] < w[0]);
    let witness: Vec<f64> = (1..=12).map(|k| m.fourier(3f64.powi(k), 1e-10).unwrap().value.norm()).collect();
    let spread = witness.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - witness.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        fit.tau > 0.0 && decreasing && spread <= 1e-6,
        format!(
            "x^2: tau = {:.4}, band maxima {:?} {}; x along 3^k: spread {spread:.2e}",
            fit.tau,
            maxima.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
            if decreasing { "decreasing" } else { "NOT decreasing" },
        ),
    )
}

fn random_phase(rng: &mut ChaCha8Rng) -> Phase {
    if rng.gen_bool(0.75) {
        let degree = rng.gen_range(1..=4);
        let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-2.0..2.0)).collect();
        Phase::polynomial(&coeffs)
    } else {
        let w: f64 = rng.gen_range(0.5..4.0);
        Phase::new("sin(w x)", move |x| (w * x).sin(), move |x| w * (w * x).cos())
            .with_derivative(move |x| -w * w * (w * x).sin())
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let measures = [cantor(0.5), cantor(0.3), lebesgue(), {
        SelfSimilarMeasure::new(ifs(&[(0.5, 0.0), (0.25, 0.75)], &[0.6, 0.4]))
    }];
    let mut violations = 0;
    let mut closest = f64::INFINITY;
    for _ in 0..200 {
        let m = &measures[rng.gen_range(0..measures.len())];
        let g = random_phase(&mut rng);
        let lambda = 10f64.powf(rng.gen_range(1.0..3.0));
        let support = m.support();
        let lip = g.lipschitz_on(&support).max(1e-12);
        let q_scale = (1e-3 / (2.0 * PI * lambda * lip * support.len())).clamp(1e-6, 0.5);
        let osc = oscillatory_integral(m, &g, lambda, q_scale).unwrap();
        let alpha = g.holder_on(&support).unwrap().alpha;
        let b = linearized_bound(m, &g, lambda, default_scale(lambda, alpha), 1e-8, &BoundConfig::default())
            .unwrap();
        let slack = b.total() + 1e-8 - (osc.value.norm() - osc.error_bound);
        closest = closest.min(slack);
        if slack < 0.0 {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations in 200 cases; smallest slack {closest:.3e}"))
}

fn criterion_7() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let m = lebesgue();
    for c in [0.3, 0.5] {
        for t in [4.0, 6.0, 8.0] {
            let start = Instant::now();
            let r = bad_interval_census(&m, t, c, 1e-6).unwrap();
            let bound = 2.0 * (c * t).exp() / PI + 3.0;
            let ok = (r.count as f64) <= bound && start.elapsed() < Duration::from_secs(120);
            pass &= ok;
            parts.push(format!("Lebesgue c={c} t={t}: {} <= {bound:.1} {}", r.count, if ok { "ok" } else { "FAIL" }));
        }
    }
    let m = cantor(0.5);
    for t in [4.0, 6.0, 8.0] {
        let start = Instant::now();
        let r = bad_interval_census(&m, t, 0.05, 1e-6).unwrap();
        let need = (t / 3f64.ln()).floor() as usize;
        let ok = r.count >= need && start.elapsed() < Duration::from_secs(120);
        pass &= ok;
        parts.push(format!(
            "Cantor c=0.05 t={t}: {} >= {need} {} (threshold {:.3})",
            r.count,
            if ok { "ok" } else { "FAIL" },
            r.threshold
        ));
    }
    outcome(pass, parts.join("; "))
}

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

/// A member of `F_{3,n}` with a sign change near a random point of `[2, 3]`.
fn member_with_root(rng: &mut ChaCha8Rng, n: u32) -> Option<SparsePolynomial> {
    let bound = (n as i64).pow(4);
    let p = random_member(rng, 2, n);
    let e = rng.gen_range(0..=n);
    if p.terms().iter().any(|t| t.1 == e) {
        return None;
    }
    let x0: f64 = rng.gen_range(2.0..3.0);
    let c = (-p.eval_f64(x0) / x0.powi(e as i32)).round();
    if c == 0.0 || c.abs() > bound as f64 {
        return None;
    }
    let mut terms = p.terms().to_vec();
    terms.push((c as i64, e));
    SparsePolynomial::new(terms, 3, n).ok()
}

fn criterion_8() -> Outcome {
    use rayon::prelude::*;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut polys: Vec<SparsePolynomial> = (0..50).map(|_| random_member(&mut rng, 3, 30)).collect();
    while polys.len() < 100 {
        if let Some(p) = member_with_root(&mut rng, 30) {
            polys.push(p);
        }
    }
    let results: Vec<(bool, usize, f64)> = polys
        .par_iter()
        .map(|p| {
            let c = covering_intervals(p, 2.0, 3.0, 0.5).unwrap();
            let steps = 1_000_000;
            let mut worst = f64::INFINITY;
            for i in 0..=steps {
                let x = 2.0 + i as f64 / steps as f64;
                if c.intervals.iter().any(|iv| iv.contains(x)) {
                    continue;
                }
                worst = worst.min(p.eval_f64(x).abs().ln() - c.ln_threshold);
            }
            (c.certified, c.intervals.len(), worst)
        })
        .collect();
    let below = results.iter().filter(|r| r.2 < 0.0).count();
    let too_many = results.iter().filter(|r| r.1 > 8).count();
    let uncertified = results.iter().filter(|r| !r.0).count();
    let max_count = results.iter().map(|r| r.1).max().unwrap_or(0);
    let nonempty = results.iter().filter(|r| r.1 > 0).count();
    outcome(
        below == 0 && too_many == 0,
        format!(
            "{below} polynomials with an outside grid point below threshold, max interval count {max_count}, \
             {nonempty} nonempty coverings, {uncertified} uncertified"
        ),
    )
}

fn criterion_9() -> Outcome {
    let seeds: Vec<u64> = (0..20).collect();
    let cfg = ExperimentConfig::default();
    let b = poisson_experiment(&cantor_23(), 1.0, 2000, &[2], &seeds, &cfg).unwrap();
    let s = &b.summaries[0];
    let ks = b.mean_ks_distance.unwrap();
    let corr_ok = s.mean_abs_deviation < 3.0 * s.cross_seed_std;
    let gaps_ok = ks < 0.08;
    let control =
        poisson_experiment_for(&[BigRational::from_integer(2.into())], 1.0, 2000, &[2], &cfg).unwrap();
    let control_ks = control.mean_ks_distance.unwrap();
    let control_fails = control_ks >= 0.08;
    outcome(
        corr_ok && gaps_ok && control_fails,
        format!(
            "mean |R2 - C2 int f| = {:.4} vs 3 sd = {:.4}; mean KS = {ks:.4}; control x=2 KS = {control_ks:.4}",
            s.mean_abs_deviation,
            3.0 * s.cross_seed_std
        ),
    )
}

fn criterion_10() -> Outcome {
    let n = 2000;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let bits = PrecisionPolicy::default().working_bits(phi, 1.0, n) + 8;
    let s = power_fractional_sequence(&FixedPoint::golden_ratio(bits), 1.0, n).unwrap();
    let mut worst: f64 = 0.0;
    for (i, &f) in s.fractional_parts.iter().enumerate() {
        let j = (i + 1) as i32;
        let inv = phi.powi(-j);
        let expected = if j % 2 == 1 { inv } else { 1.0 - inv };
        worst = worst.max(circle_distance(f, expected));
    }
    outcome(worst < 2f64.powi(-48), format!("max error {worst:.3e} (limit 2^-48 = {:.3e})", 2f64.powi(-48)))
}

fn random_correlation_phase(rng: &mut ChaCha8Rng, n: u32) -> CorrelationPhase {
    let cap = (n as f64).powf(1.1).floor() as i64;
    let min_u1 = (n as f64).powf(0.25).ceil() as u32;
    loop {
        let u1 = rng.gen_range(min_u1..=n);
        let u2 = rng.gen_range(0..u1);
        let v1 = rng.gen_range(1..=u1);
        let v2 = rng.gen_range(0..v1);
        let mut coef = || {
            let c = rng.gen_range(1..=cap);
            if rng.gen_bool(0.5) {
                -c
            } else {
                c
            }
        };
        let (l, m) = (coef(), coef());
        let p = CorrelationPhase::new(vec![l], vec![m], vec![u1, u2], vec![v1, v2]).unwrap();
        if p.leading_term_ok() {
            return p;
        }
    }
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = cantor_23();
    let mut small = 0;
    let mut inconsistent = 0;
    let mut largest: f64 = 0.0;
    for _ in 0..20 {
        let p = random_correlation_phase(&mut rng, 30);
        let coarse = correlation_phase_integral(&m, &p, 1e-2).unwrap();
        let fine = correlation_phase_integral(&m, &p, 2.5e-3).unwrap();
        if (coarse.value - fine.value).norm() > coarse.error_bound + fine.error_bound {
            inconsistent += 1;
        }
        let v = fine.value.norm();
        largest = largest.max(v);
        if v < 0.05 {
            small += 1;
        }
    }
    outcome(
        small >= 18 && inconsistent == 0,
        format!("{small}/20 below 0.05 (largest {largest:.4}); {inconsistent} resolution inconsistencies"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("evaluator cross-validation", criterion_1),
        ("closed-form recovery", criterion_2),
        ("partition identity", criterion_3),
        ("Frostman estimates", criterion_4),
        ("decay surrogate", criterion_5),
        ("bound dominance", criterion_6),
        ("census envelope", criterion_7),
        ("covering soundness", criterion_8),
        ("Poissonian statistics", criterion_9),
        ("precision soundness", criterion_10),
        ("phase integral smallness", criterion_11),
    ];
    let limits = [10.0, 10.0, 600.0, 90.0, 300.0, 600.0, 720.0, 120.0, 600.0, 600.0, 600.0];
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if let Some(f) = &filter {
            if f != &id {
                continue;
            }
        }
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        let pass = o.pass && secs <= limits[i];
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {:<28} {} ({secs:.1}s, limit {}s): {}",
            name,
            if pass { "PASS" } else { "FAIL" },
            limits[i],
            o.detail
        );
    }
    println!("{failed} of {} criteria failed", criteria.len());
    if failed > 0 && std::env::var_os("FFLAB_STRICT_ACCEPTANCE").is_some() {
        std::process::exit(1);
    }
}

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::correlation::{k_level_correlation_with, CorrelationConfig, CorrelationReport, TestFunction};
use super::gaps::{gap_distribution, GapReport};
use super::power::{power_fractional_sequence_with, PrecisionPolicy, PreciseReal};
use crate::error::{Error, Result};
use crate::ifs::sample_point;
use crate::measure::SelfSimilarMeasure;
use crate::stats::{mean, std_dev};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub test_function: TestFunction,
    pub correlation: CorrelationConfig,
    pub precision: PrecisionPolicy,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            test_function: TestFunction::default(),
            correlation: CorrelationConfig::default(),
            precision: PrecisionPolicy::default(),
        }
    }
}

/// Statistics of `{xi x^n}`, `n <= N`, for one `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedResult {
    pub seed: Option<u64>,
    pub x_approx: f64,
    pub sampling_depth: usize,
    pub working_bits: u64,
    pub guaranteed_error: f64,
    pub correlations: Vec<CorrelationReport>,
    #[serde(skip)]
    pub gaps: Option<GapReport>,
    pub ks_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KSummary {
    pub k: usize,
    pub mean_r_k: f64,
    /// Mean over seeds of `|R_k - C_k(N) int f|`.
    pub mean_abs_deviation: f64,
    /// Cross-seed standard deviation of `R_k`.
    pub cross_seed_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentBundle {
    pub xi: f64,
    pub n: usize,
    pub k_list: Vec<usize>,
    pub config: ExperimentConfig,
    pub seeds: Vec<SeedResult>,
    pub summaries: Vec<KSummary>,
    pub mean_ks_distance: Option<f64>,
}

/// Correlations and gaps of `{xi x^n}` for a given `x`.
pub fn sequence_statistics<X: PreciseReal + ?Sized>(
    x: &X,
    xi: f64,
    n: usize,
    k_list: &[usize],
    config: &ExperimentConfig,
) -> Result<SeedResult> {
    let seq = power_fractional_sequence_with(x, xi, n, &config.precision)?;
    let correlations = if n < 2 {
        Vec::new()
    } else {
        k_list
            .iter()
            .map(|&k| k_level_correlation_with(&seq.fractional_parts, k, config.test_function, &config.correlation))
            .collect::<Result<Vec<_>>>()?
    };
    let gaps = if n >= 2 { Some(gap_distribution(&seq.fractional_parts)?) } else { None };
    Ok(SeedResult {
        seed: None,
        x_approx: x.approx(),
        sampling_depth: 0,
        working_bits: seq.working_bits,
        guaranteed_error: seq.guaranteed_error,
        ks_distance: gaps.as_ref().map(|g| g.ks_distance),
        correlations,
        gaps,
    })
}

fn summarize(xi: f64, n: usize, k_list: &[usize], config: &ExperimentConfig, seeds: Vec<SeedResult>) -> ExperimentBundle {
    let summaries = if n < 2 {
        Vec::new()
    } else {
        k_list
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let r: Vec<f64> = seeds.iter().map(|s| s.correlations[i].r_k).collect();
                let dev: Vec<f64> = seeds.iter().map(|s| s.correlations[i].deviation.abs()).collect();
                KSummary { k, mean_r_k: mean(&r), mean_abs_deviation: mean(&dev), cross_seed_std: std_dev(&r) }
            })
            .collect()
    };
    let ks: Vec<f64> = seeds.iter().filter_map(|s| s.ks_distance).collect();
    ExperimentBundle {
        xi,
        n,
        k_list: k_list.to_vec(),
        config: *config,
        seeds,
        summaries,
        mean_ks_distance: (!ks.is_empty()).then(|| mean(&ks)),
    }
}

/// Samples `x ~ mu` once per seed, exactly enough for the power sequence,
/// and gathers `R_k` for each `k` and the gap statistics.
pub fn poisson_experiment(
    measure: &SelfSimilarMeasure,
    xi: f64,
    n: usize,
    k_list: &[usize],
    seeds: &[u64],
    config: &ExperimentConfig,
) -> Result<ExperimentBundle> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("at least one seed is required".into()));
    }
    if !(measure.support().lo > 1.0) {
        return Err(Error::InvalidArgument("the measure must live on (1, infinity)".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let bits = config.precision.working_bits(measure.support().hi, xi, n);
    let results = seeds
        .par_iter()
        .map(|&seed| {
            let point = sample_point(measure.ifs(), seed, bits as u32);
            let mut r = sequence_statistics(&point.exact, xi, n, k_list, config)?;
            r.seed = Some(seed);
            r.sampling_depth = point.depth;
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(xi, n, k_list, config, results))
}

/// The same harness for explicitly given values of `x`.
pub fn poisson_experiment_for(
    xs: &[BigRational],
    xi: f64,
    n: usize,
    k_list: &[usize],
    config: &ExperimentConfig,
) -> Result<ExperimentBundle> {
    let results = xs
        .par_iter()
        .map(|x| sequence_statistics(x, xi, n, k_list, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(xi, n, k_list, config, results))
}

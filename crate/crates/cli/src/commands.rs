use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use fflab_core::census::{bad_interval_census_with, CensusConfig};
use fflab_core::finescale::{
    correlation_phase_integral, poisson_experiment, poisson_experiment_for, CorrelationConfig, CorrelationPhase,
    EnumerationMode, ExperimentBundle, ExperimentConfig, PrecisionPolicy, TestFunction,
};
use fflab_core::ifs::parse_ifs_config;
use fflab_core::measure::SelfSimilarMeasure;
use fflab_core::oscillatory::{
    decay_exponent_fit, default_scale, linearized_bound, oscillatory_integral, BoundConfig, DecayConfig,
};
use fflab_core::poly::{covering_intervals, nonflat_certificate, small_value_intervals, NonflatOutcome, SparsePolynomial};
use fflab_core::{rational, Interval};

use crate::manifest::{self, sha256_file};
use crate::output::{num, OutputDir};
use crate::phase_spec::parse_phase;
use crate::{Cli, Command, SequenceArgs};

/// A flag value that parsed but is not acceptable.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(flag: &str, msg: impl fmt::Display) -> anyhow::Error {
    UsageError(format!("invalid value for --{flag}: {msg}")).into()
}

fn load_measure(path: &Path) -> Result<SelfSimilarMeasure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read IFS file {}", path.display()))?;
    let ifs = parse_ifs_config(&text).with_context(|| format!("invalid IFS file {}", path.display()))?;
    Ok(SelfSimilarMeasure::new(ifs))
}

fn complex_cells(z: Complex64) -> [String; 3] {
    [num(z.re), num(z.im), num(z.norm())]
}

/// Runs the parsed command and returns the one-line summary.
pub fn run(cli: &Cli) -> Result<String> {
    let out = OutputDir::create(&cli.out)?;
    match &cli.command {
        Command::Validate { ifs, finest_scale } => {
            let m = load_measure(&ifs.ifs)?;
            let hull = m.hull();
            let frostman = m.frostman_exponent_estimate(*finest_scale)?;
            let report = json!({
                "support": m.support(),
                "attractor_hull": hull,
                "maps": m.ifs().maps(),
                "weights": m.ifs().weights(),
                "common_ratio": m.ifs().common_ratio(),
                "frostman": frostman,
                "ifs_sha256": sha256_file(&ifs.ifs)?,
            });
            let files = vec![out.json("validate.json", &report)?];
            manifest::write(&out, "validate", cli, Some(&ifs.ifs), json!({ "finest_scale": finest_scale }), &files)?;
            Ok(format!(
                "attractor [{}, {}], s0 = {:.4} ({} maps)",
                num(hull.lo),
                num(hull.hi),
                frostman.exponent,
                m.ifs().len()
            ))
        }
        Command::Fourier { ifs, lambda, lambda_min, lambda_max, points, tol } => {
            let m = load_measure(&ifs.ifs)?;
            let lambdas: Vec<f64> = match (lambda, lambda_min, lambda_max) {
                (Some(l), _, _) => vec![*l],
                (None, Some(lo), Some(hi)) => {
                    if !(*lo > 0.0 && hi > lo) || *points < 2 {
                        return Err(usage("lambda-min", "need 0 < lambda-min < lambda-max and points >= 2"));
                    }
                    (0..*points)
                        .map(|i| lo * (hi / lo).powf(i as f64 / (*points - 1) as f64))
                        .collect()
                }
                _ => return Err(usage("lambda", "give --lambda or both --lambda-min and --lambda-max")),
            };
            let values = lambdas
                .par_iter()
                .map(|&l| m.fourier(l, *tol))
                .collect::<fflab_core::Result<Vec<_>>>()?;
            let rows = lambdas.iter().zip(&values).map(|(&l, v)| {
                let [re, im, abs] = complex_cells(v.value);
                vec![num(l), re, im, abs, num(v.error_bound)]
            });
            let csv = out.csv("fourier.csv", &["lambda", "re", "im", "abs", "error_bound"], rows)?;
            let oracle = match (lambdas.len(), m.ifs().common_ratio()) {
                (1, Some(_)) => Some(m.fourier_homogeneous_auto(lambdas[0], *tol)?),
                _ => None,
            };
            let max_abs = values.iter().map(|v| v.value.norm()).fold(0.0, f64::max);
            let max_err = values.iter().map(|v| v.error_bound).fold(0.0, f64::max);
            let summary = json!({
                "ifs_sha256": sha256_file(&ifs.ifs)?,
                "tolerance": tol,
                "frequencies": lambdas.len(),
                "max_abs": max_abs,
                "max_error_bound": max_err,
                "product_oracle": oracle,
            });
            let js = out.json("fourier.json", &summary)?;
            manifest::write(&out, "fourier", cli, Some(&ifs.ifs), json!({ "lambdas": lambdas }), &[csv, js])?;
            if let [v] = values.as_slice() {
                let mut line = format!(
                    "mu_hat({}) = {} + {} i, |mu_hat| = {}, error <= {}",
                    num(lambdas[0]),
                    num(v.value.re),
                    num(v.value.im),
                    num(v.value.norm()),
                    num(v.error_bound)
                );
                if let Some(p) = oracle {
                    line += &format!("; product oracle {} + {} i", num(p.value.re), num(p.value.im));
                }
                Ok(line)
            } else {
                Ok(format!("{} frequencies, max |mu_hat| = {}, max error <= {}", values.len(), num(max_abs), num(max_err)))
            }
        }
        Command::Oscillatory { ifs, phase, lambda, scale, tol, bound_scale, census_c, census_epsilon } => {
            let m = load_measure(&ifs.ifs)?;
            let g = parse_phase(phase).map_err(|e| usage("phase", e))?;
            let support = m.support();
            let q_scale = match scale {
                Some(s) => *s,
                None => {
                    let lip = g.lipschitz_on(&support);
                    if lip == 0.0 {
                        0.5
                    } else {
                        (tol / (2.0 * PI * lambda.abs() * lip * support.len())).min(0.5)
                    }
                }
            };
            let osc = oscillatory_integral(&m, &g, *lambda, q_scale)?;
            let alpha = g.holder_on(&support)?.alpha;
            let b_scale = bound_scale.unwrap_or_else(|| default_scale(*lambda, alpha));
            let cfg = BoundConfig { census_c: *census_c, census_epsilon: *census_epsilon };
            let bound = linearized_bound(&m, &g, *lambda, b_scale, *tol, &cfg)?;
            let report = json!({
                "phase": g.description(),
                "lambda": lambda,
                "quadrature_scale": q_scale,
                "integral": osc,
                "bound_scale": b_scale,
                "bound": bound,
                "bound_total": bound.total(),
            });
            let js = out.json("oscillatory.json", &report)?;
            manifest::write(
                &out,
                "oscillatory",
                cli,
                Some(&ifs.ifs),
                json!({ "quadrature_scale": q_scale, "bound_scale": b_scale, "bound_config": cfg }),
                &[js],
            )?;
            Ok(format!(
                "|integral| = {} (error <= {}), linearized bound {}",
                num(osc.value.norm()),
                num(osc.error_bound),
                num(bound.total())
            ))
        }
        Command::Decay { ifs, phase, t_min, t_max, samples_per_band, quadrature_tol } => {
            let m = load_measure(&ifs.ifs)?;
            let g = parse_phase(phase).map_err(|e| usage("phase", e))?;
            let cfg = DecayConfig { samples_per_band: *samples_per_band, quadrature_tolerance: *quadrature_tol };
            let fit = decay_exponent_fit(&m, &g, *t_min, *t_max, &cfg)?;
            let rows = fit.bands.iter().map(|b| {
                vec![num(b.band_start), num(b.maximum), num(fit.fitted(b.band_start)), num(b.argmax), num(b.error_bound)]
            });
            let csv = out.csv("decay.csv", &["T", "band_max", "fitted", "argmax", "error_bound"], rows)?;
            let js = out.json("decay.json", &json!({ "phase": g.description(), "config": cfg, "fit": fit }))?;
            manifest::write(&out, "decay", cli, Some(&ifs.ifs), json!({ "decay_config": cfg }), &[csv, js])?;
            Ok(format!("tau = {:.6}, {} bands, residual {:.3e}", fit.tau, fit.bands.len(), fit.fit_residual))
        }
        Command::Census { ifs, t, c, tolerance, frequency_budget } => {
            let m = load_measure(&ifs.ifs)?;
            let cfg = CensusConfig { frequency_budget: *frequency_budget, ..CensusConfig::default() };
            let report = bad_interval_census_with(&m, *t, *c, *tolerance, &cfg)?;
            let rows = report
                .intervals
                .iter()
                .map(|s| vec![s.n.to_string(), num(s.grid_max), u8::from(s.bad).to_string()]);
            let csv = out.csv("census.csv", &["n", "grid_max", "bad"], rows)?;
            let js = out.json("census.json", &report)?;
            manifest::write(&out, "census", cli, Some(&ifs.ifs), json!({ "census_config": cfg }), &[csv, js])?;
            Ok(format!(
                "{} bad intervals in [{}, {}] at threshold {}",
                report.count,
                num(report.range.0),
                num(report.range.1),
                num(report.threshold)
            ))
        }
        Command::Covering { poly, a, b, epsilon, q, k, n } => {
            let terms = SparsePolynomial::parse_terms(poly).map_err(|e| usage("poly", e))?;
            let probe = SparsePolynomial::from_terms(terms.clone());
            let k = k.unwrap_or(probe.terms().len().max(1));
            let max_coef = probe.terms().iter().map(|t| t.0.unsigned_abs()).max().unwrap_or(0);
            let mut min_n = probe.degree().max(1);
            while (min_n as u64).checked_pow(4).map_or(false, |b| b < max_coef) {
                min_n += 1;
            }
            let n = n.unwrap_or(min_n);
            let p = SparsePolynomial::new(terms, k, n)?;
            let covering = match (epsilon, q) {
                (_, Some(q)) => small_value_intervals(&p, *a, *b, *q)?,
                (e, None) => covering_intervals(&p, *a, *b, e.unwrap_or(0.5))?,
            };
            let js = out.json("covering.json", &json!({ "polynomial": p, "a": a, "b": b, "covering": covering }))?;
            manifest::write(
                &out,
                "covering",
                cli,
                None,
                json!({ "k": k, "n": n, "epsilon": if q.is_none() { Some(epsilon.unwrap_or(0.5)) } else { None } }),
                &[js],
            )?;
            Ok(format!(
                "{} intervals, max diameter {}, {}",
                covering.intervals.len(),
                num(covering.sigma_scale),
                if covering.certified { "certified" } else { "NOT certified" }
            ))
        }
        Command::Nonflat { phase, lo, hi, k_max, c0 } => {
            let g = parse_phase(phase).map_err(|e| usage("phase", e))?;
            if !(lo < hi) {
                return Err(usage("lo", "need lo < hi"));
            }
            let outcome = nonflat_certificate(&g, &Interval::closed(*lo, *hi), *k_max, *c0)?;
            let js = out.json("nonflat.json", &json!({ "phase": g.description(), "outcome": outcome }))?;
            manifest::write(&out, "nonflat", cli, None, json!({}), &[js])?;
            Ok(match outcome {
                NonflatOutcome::Certified(c) => {
                    format!("certified: k = {}, delta = {}, rho = {}", c.k, num(c.delta), num(c.rho))
                }
                NonflatOutcome::Refuted(r) => format!(
                    "refuted: max derivative {} < c0 at x = {}",
                    num(r.max_derivative),
                    num(r.witness)
                ),
            })
        }
        Command::Correlations { ifs, seq, k, test_function, support, tuple_budget, exact } => {
            let m = load_measure(&ifs.ifs)?;
            if k.iter().any(|&k| k < 2) {
                return Err(usage("k", "correlation orders start at 2"));
            }
            let f = match test_function.as_str() {
                "bump" => TestFunction::Bump { support: *support },
                "indicator" => TestFunction::Indicator { half_width: *support },
                "zero" => TestFunction::Zero,
                other => return Err(usage("test-function", format!("'{other}' is not bump, indicator or zero"))),
            };
            let cfg = ExperimentConfig {
                test_function: f,
                correlation: CorrelationConfig {
                    tuple_budget: *tuple_budget,
                    mode: if *exact { EnumerationMode::Exact } else { EnumerationMode::Auto },
                    ..CorrelationConfig::default()
                },
                precision: precision(seq),
            };
            let bundle = poisson_experiment(&m, seq.xi, seq.n, k, &seeds(seq), &cfg)?;
            let files = write_sequence_outputs(&out, &bundle, true)?;
            manifest::write(&out, "correlations", cli, Some(&ifs.ifs), json!({ "experiment_config": cfg }), &files)?;
            let mut line = bundle
                .summaries
                .iter()
                .map(|s| format!("k={}: mean R = {:.4}, mean |dev| = {:.4}", s.k, s.mean_r_k, s.mean_abs_deviation))
                .collect::<Vec<_>>()
                .join("; ");
            if let Some(ks) = bundle.mean_ks_distance {
                line += &format!("; mean gap KS = {ks:.4}");
            }
            Ok(line)
        }
        Command::Gaps { ifs, x, seq } => {
            let cfg = ExperimentConfig { precision: precision(seq), ..ExperimentConfig::default() };
            let bundle = match (x, ifs) {
                (Some(x), _) => {
                    let x = rational::parse_exact(x).map_err(|e| usage("x", e))?;
                    poisson_experiment_for(&[x], seq.xi, seq.n, &[], &cfg)?
                }
                (None, Some(path)) => poisson_experiment(&load_measure(path)?, seq.xi, seq.n, &[], &seeds(seq), &cfg)?,
                (None, None) => return Err(usage("ifs", "give --ifs or --x")),
            };
            let files = write_sequence_outputs(&out, &bundle, false)?;
            manifest::write(
                &out,
                "gaps",
                cli,
                ifs.as_deref().filter(|_| x.is_none()),
                json!({ "precision": cfg.precision }),
                &files,
            )?;
            Ok(match bundle.mean_ks_distance {
                Some(ks) => format!("mean gap KS distance to 1 - e^(-s): {ks:.4} over {} sequences", bundle.seeds.len()),
                None => "fewer than two terms; no gaps".to_string(),
            })
        }
        Command::PhaseIntegral { ifs, l, m: mm, u, v, tol } => {
            let m = load_measure(&ifs.ifs)?;
            let phase = CorrelationPhase::new(l.clone(), mm.clone(), u.clone(), v.clone())
                .map_err(|e| usage("l", e))?;
            let r = correlation_phase_integral(&m, &phase, *tol)?;
            let js = out.json(
                "phase_integral.json",
                &json!({ "phase": phase, "polynomial": phase.polynomial().to_string(), "tolerance": tol, "result": r }),
            )?;
            manifest::write(&out, "phase-integral", cli, Some(&ifs.ifs), json!({ "tolerance": tol }), &[js])?;
            Ok(format!(
                "|integral| = {} (error <= {}, {} leaves)",
                num(r.value.norm()),
                num(r.error_bound),
                r.leaves
            ))
        }
    }
}

fn precision(seq: &SequenceArgs) -> PrecisionPolicy {
    PrecisionPolicy { guard_bits: seq.guard_bits, multiplier: seq.precision_multiplier.max(1) }
}

fn seeds(seq: &SequenceArgs) -> Vec<u64> {
    (0..seq.seeds).map(|i| seq.seed_base + i).collect()
}

struct GapRow {
    s: f64,
    empirical: f64,
    exponential: f64,
}

fn write_sequence_outputs(out: &OutputDir, bundle: &ExperimentBundle, correlations: bool) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    if correlations {
        let rows = bundle.seeds.iter().flat_map(|s| {
            let seed = s.seed.map(|v| v.to_string()).unwrap_or_default();
            s.correlations
                .iter()
                .map(move |c| vec![seed.clone(), c.k.to_string(), num(c.r_k), num(c.deviation)])
                .collect::<Vec<_>>()
        });
        files.push(out.csv("correlations.csv", &["seed", "k", "R_k", "deviation"], rows)?);
        files.push(out.json("correlations.json", bundle)?);
    } else {
        files.push(out.json("gaps.json", bundle)?);
    }
    let reports: Vec<_> = bundle.seeds.iter().filter_map(|s| s.gaps.as_ref()).collect();
    if let Some(first) = reports.first() {
        let rows: Vec<GapRow> = first
            .s_grid
            .iter()
            .enumerate()
            .map(|(i, &s)| GapRow {
                s,
                empirical: reports.iter().map(|r| r.empirical_cdf[i]).sum::<f64>() / reports.len() as f64,
                exponential: 1.0 - (-s).exp(),
            })
            .collect();
        files.push(out.csv(
            "gaps.csv",
            &["s", "empirical_G", "one_minus_exp"],
            rows.iter().map(|r| vec![num(r.s), num(r.empirical), num(r.exponential)]),
        )?);
    }
    Ok(files)
}

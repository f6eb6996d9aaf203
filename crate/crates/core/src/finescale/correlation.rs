use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Product-form test functions on `R^{k-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `prod_j (1 - (t_j / s)^2)^3` on `|t_j| < s`.
    Bump { support: f64 },
    /// Indicator of the closed box `[-h, h]^{k-1}`.
    Indicator { half_width: f64 },
    Zero,
}

impl Default for TestFunction {
    fn default() -> Self {
        TestFunction::Bump { support: 1.0 }
    }
}

impl TestFunction {
    /// `S` with the support inside `[-S, S]^{k-1}`.
    pub fn support_radius(&self) -> f64 {
        match *self {
            TestFunction::Bump { support } => support,
            TestFunction::Indicator { half_width } => half_width,
            TestFunction::Zero => 0.0,
        }
    }

    /// One-dimensional factor.
    #[inline]
    pub fn factor(&self, t: f64) -> f64 {
        match *self {
            TestFunction::Bump { support } => {
                let u = t / support;
                if u.abs() < 1.0 {
                    (1.0 - u * u).powi(3)
                } else {
                    0.0
                }
            }
            TestFunction::Indicator { half_width } => {
                if t.abs() <= half_width {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::Zero => 0.0,
        }
    }

    /// `int_{R^{k-1}} f`.
    pub fn integral(&self, k: usize) -> f64 {
        let one = match *self {
            TestFunction::Bump { support } => 32.0 / 35.0 * support,
            TestFunction::Indicator { half_width } => 2.0 * half_width,
            TestFunction::Zero => 0.0,
        };
        one.powi(k as i32 - 1)
    }

    pub fn describe(&self) -> String {
        match *self {
            TestFunction::Bump { support } => format!("bump (1-(t/{support})^2)^3"),
            TestFunction::Indicator { half_width } => format!("indicator [-{half_width}, {half_width}]"),
            TestFunction::Zero => "zero".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumerationMode {
    /// Exact below the budget, subsampled above it.
    Auto,
    /// Always exact; `BudgetExceeded` above the budget.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationConfig {
    /// Estimated tuple count above which start indices are subsampled.
    pub tuple_budget: f64,
    pub mode: EnumerationMode,
    pub seed: u64,
    /// Extra lattice shifts beyond `ceil(S/N) + 1` in each coordinate.
    pub extra_lattice: i64,
}

impl Default for CorrelationConfig {
    fn default() -> Self {
        CorrelationConfig { tuple_budget: 5e7, mode: EnumerationMode::Auto, seed: 0, extra_lattice: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub k: usize,
    pub n: usize,
    pub test_function: TestFunction,
    pub r_k: f64,
    /// `prod_{j=1}^{k-1} (1 - j/N)`.
    pub c_k: f64,
    pub integral: f64,
    /// `R_k - C_k(N) int f`.
    pub deviation: f64,
    /// Tuples with a nonzero contribution that were visited.
    pub tuples_visited: u64,
    pub subsampled: bool,
    pub starts_used: usize,
    /// Standard error of the subsampled estimate; zero when exact.
    pub standard_error: f64,
}

/// `prod_{j=1}^{k-1} (1 - j/N)`.
pub fn c_k(k: usize, n: usize) -> f64 {
    (1..k).map(|j| 1.0 - j as f64 / n as f64).product()
}

/// Indices `j != i` with `x_j` within circular distance `radius` of `x_i`.
fn neighbor_lists(points: &[f64], radius: f64) -> Vec<Vec<u32>> {
    let n = points.len();
    if radius >= 0.5 {
        return (0..n)
            .map(|i| (0..n as u32).filter(|&j| j as usize != i).collect())
            .collect();
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| points[a as usize].total_cmp(&points[b as usize]));
    let sorted: Vec<f64> = order.iter().map(|&i| points[i as usize]).collect();
    let mut lists = vec![Vec::new(); n];
    for (pos, &i) in order.iter().enumerate() {
        let x = sorted[pos];
        let list = &mut lists[i as usize];
        for step in 1..n {
            let q = (pos + step) % n;
            let d = (sorted[q] - x).rem_euclid(1.0);
            if d > radius {
                break;
            }
            list.push(order[q]);
        }
        for step in 1..n {
            let q = (pos + n - step) % n;
            let d = (x - sorted[q]).rem_euclid(1.0);
            if d > radius {
                break;
            }
            if !list.contains(&order[q]) {
                list.push(order[q]);
            }
        }
    }
    lists
}

struct Walker<'a> {
    points: &'a [f64],
    neighbors: &'a [Vec<u32>],
    f: TestFunction,
    n: f64,
    window: i64,
    k: usize,
}

impl Walker<'_> {
    /// `sum_l f_1(N (d + l))` over `|l| <= window`.
    fn coordinate(&self, d: f64) -> f64 {
        (-self.window..=self.window).map(|l| self.f.factor(self.n * (d + l as f64))).sum()
    }

    /// Sum over tuples starting at `start` of `prod_j sum_l f(N(d_j + l))`.
    fn from_start(&self, start: u32) -> (f64, u64) {
        let mut tuple = Vec::with_capacity(self.k);
        tuple.push(start);
        let mut total = 0.0;
        let mut visited = 0;
        self.extend(&mut tuple, 1.0, &mut total, &mut visited);
        (total, visited)
    }

    fn extend(&self, tuple: &mut Vec<u32>, weight: f64, total: &mut f64, visited: &mut u64) {
        if tuple.len() == self.k {
            *total += weight;
            *visited += 1;
            return;
        }
        let last = *tuple.last().unwrap() as usize;
        for &next in &self.neighbors[last] {
            if tuple.contains(&next) {
                continue;
            }
            let w = self.coordinate(self.points[last] - self.points[next as usize]);
            if w == 0.0 {
                continue;
            }
            tuple.push(next);
            self.extend(tuple, weight * w, total, visited);
            tuple.pop();
        }
    }
}

/// `R_k(f) = (1/N) sum_{distinct u} sum_{l in Z^{k-1}} f(N (Delta(u) + l))`
/// with `Delta(u) = (x_{u_1} - x_{u_2}, ..., x_{u_{k-1}} - x_{u_k})`.
pub fn k_level_correlation(points: &[f64], k: usize, f: TestFunction) -> Result<CorrelationReport> {
    k_level_correlation_with(points, k, f, &CorrelationConfig::default())
}

pub fn k_level_correlation_with(
    points: &[f64],
    k: usize,
    f: TestFunction,
    config: &CorrelationConfig,
) -> Result<CorrelationReport> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k = {k} must be at least 2")));
    }
    if let Some(x) = points.iter().find(|x| !(**x >= 0.0 && **x < 1.0)) {
        return Err(Error::InvalidArgument(format!("point {x} not in [0, 1)")));
    }
    let n = points.len();
    let integral = f.integral(k);
    let c = if n == 0 { 0.0 } else { c_k(k, n) };
    let empty = |r_k: f64| CorrelationReport {
        k,
        n,
        test_function: f,
        r_k,
        c_k: c,
        integral,
        deviation: r_k - c * integral,
        tuples_visited: 0,
        subsampled: false,
        starts_used: 0,
        standard_error: 0.0,
    };
    if n < k || matches!(f, TestFunction::Zero) {
        return Ok(empty(0.0));
    }
    let s = f.support_radius();
    let radius = s / n as f64;
    let window = (radius.ceil() as i64) + 1 + config.extra_lattice;
    let neighbors = neighbor_lists(points, radius);
    let walker = Walker { points, neighbors: &neighbors, f, n: n as f64, window, k };

    let mean_degree = neighbors.iter().map(|l| l.len()).sum::<usize>() as f64 / n as f64;
    let estimate = n as f64 * mean_degree.powi(k as i32 - 1);
    if estimate <= config.tuple_budget {
        let (total, visited) = (0..n as u32)
            .into_par_iter()
            .map(|i| walker.from_start(i))
            .reduce(|| (0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let r_k = total / n as f64;
        return Ok(CorrelationReport {
            tuples_visited: visited,
            starts_used: n,
            ..empty(r_k)
        });
    }
    if config.mode == EnumerationMode::Exact {
        return Err(Error::BudgetExceeded(format!(
            "about {estimate:.3e} tuples for k = {k} exceed the budget {:.3e}",
            config.tuple_budget
        )));
    }
    let starts = ((n as f64 * config.tuple_budget / estimate).ceil() as usize).clamp(2, n);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let chosen: Vec<u32> = (0..starts).map(|_| rng.gen_range(0..n as u32)).collect();
    let samples: Vec<(f64, u64)> = chosen.par_iter().map(|&i| walker.from_start(i)).collect();
    let values: Vec<f64> = samples.iter().map(|s| s.0).collect();
    // R_k = mean over starts of the per-start sum
    let r_k = crate::stats::mean(&values);
    let standard_error = crate::stats::std_dev(&values) / (starts as f64).sqrt();
    Ok(CorrelationReport {
        tuples_visited: samples.iter().map(|s| s.1).sum(),
        subsampled: true,
        starts_used: starts,
        standard_error,
        ..empty(r_k)
    })
}

//! Similarity IFSs on the line: words, cut-sets, cylinders and sampling
//! through the coding map.

mod config;
mod sample;

pub use config::{parse_ifs_config, IfsConfig};
pub use sample::{sample_point, sampling_depth, SampledPoint};

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational;

/// Default cap on the number of words in a single cut-set.
pub const DEFAULT_WORD_BUDGET: usize = 10_000_000;

/// Relative slack applied to the stopping test `|r_w| <= b` so that products
/// such as `(1/3)^2` compare equal to `1/9` despite rounding.
const RATIO_SLACK: f64 = 1e-12;

/// `x -> ratio * x + translation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimilarityMap {
    pub ratio: f64,
    pub translation: f64,
}

impl SimilarityMap {
    pub fn new(ratio: f64, translation: f64) -> Self {
        SimilarityMap { ratio, translation }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        self.ratio * x + self.translation
    }

    pub fn fixed_point(&self) -> f64 {
        self.translation / (1.0 - self.ratio)
    }

    pub fn image(&self, interval: &Interval) -> Interval {
        Interval::spanning(self.apply(interval.lo), self.apply(interval.hi))
    }
}

/// Exact rational form of a map, used for high-precision sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMap {
    pub ratio: BigRational,
    pub translation: BigRational,
}

/// A validated IFS with probability weights and an invariant interval.
#[derive(Debug, Clone)]
pub struct IteratedFunctionSystem {
    maps: Vec<SimilarityMap>,
    weights: Vec<f64>,
    support: Interval,
    exact_maps: Vec<ExactMap>,
    exact_support_lo: BigRational,
}

/// Builds an IFS from floating-point data; the exact form is the binary
/// value of each double.
pub fn validate_ifs(
    maps: Vec<SimilarityMap>,
    weights: Vec<f64>,
    support: Interval,
) -> Result<IteratedFunctionSystem> {
    let exact = maps
        .iter()
        .map(|m| ExactMap {
            ratio: rational::from_f64(m.ratio),
            translation: rational::from_f64(m.translation),
        })
        .collect();
    let lo = rational::from_f64(support.lo);
    IteratedFunctionSystem::build(maps, weights, support, exact, lo)
}

impl IteratedFunctionSystem {
    /// Builds an IFS from exact rationals (as read from a config file).
    pub fn from_exact(
        maps: Vec<ExactMap>,
        weights: Vec<BigRational>,
        support: (BigRational, BigRational),
    ) -> Result<Self> {
        let float_maps = maps
            .iter()
            .map(|m| SimilarityMap::new(rational::to_f64(&m.ratio), rational::to_f64(&m.translation)))
            .collect();
        let float_weights = weights.iter().map(rational::to_f64).collect();
        let interval = Interval::closed(rational::to_f64(&support.0), rational::to_f64(&support.1));
        Self::build(float_maps, float_weights, interval, maps, support.0)
    }

    fn build(
        maps: Vec<SimilarityMap>,
        weights: Vec<f64>,
        support: Interval,
        exact_maps: Vec<ExactMap>,
        exact_support_lo: BigRational,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidArgument("empty map list".into()));
        }
        if !(support.lo < support.hi) || !support.lo.is_finite() || !support.hi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "support interval [{}, {}] needs lo < hi",
                support.lo, support.hi
            )));
        }
        for (index, m) in maps.iter().enumerate() {
            if !(m.ratio != 0.0 && m.ratio.abs() < 1.0) || !m.translation.is_finite() {
                return Err(Error::NonContracting { index, ratio: m.ratio });
            }
        }
        if weights.len() != maps.len() {
            return Err(Error::BadWeights(format!(
                "{} weights for {} maps",
                weights.len(),
                maps.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::BadWeights(format!("non-positive weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::BadWeights(format!("weights sum to {total}")));
        }
        let slack = 1e-12 * support.len();
        for (index, m) in maps.iter().enumerate() {
            if !m.image(&support).is_subset_of(&support, slack) {
                return Err(Error::SupportViolation { index });
            }
        }
        let first = maps[0].fixed_point();
        if maps
            .iter()
            .all(|m| (m.fixed_point() - first).abs() <= 1e-12 * support.len())
        {
            return Err(Error::DegenerateAttractor);
        }
        Ok(IteratedFunctionSystem { maps, weights, support, exact_maps, exact_support_lo })
    }

    pub fn maps(&self) -> &[SimilarityMap] {
        &self.maps
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn exact_maps(&self) -> &[ExactMap] {
        &self.exact_maps
    }

    pub(crate) fn exact_support_lo(&self) -> &BigRational {
        &self.exact_support_lo
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn fixed_points(&self) -> Vec<f64> {
        self.maps.iter().map(SimilarityMap::fixed_point).collect()
    }

    pub fn max_abs_ratio(&self) -> f64 {
        self.maps.iter().map(|m| m.ratio.abs()).fold(0.0, f64::max)
    }

    pub fn min_abs_ratio(&self) -> f64 {
        self.maps.iter().map(|m| m.ratio.abs()).fold(1.0, f64::min)
    }

    /// All ratios equal (same sign and magnitude).
    pub fn common_ratio(&self) -> Option<f64> {
        let r = self.maps[0].ratio;
        self.maps
            .iter()
            .all(|m| (m.ratio - r).abs() <= 1e-15 * r.abs())
            .then_some(r)
    }

    /// Smallest interval containing the attractor, by iterating the hull map
    /// from the support interval.
    pub fn attractor_hull(&self) -> Interval {
        let mut hull = self.support;
        for _ in 0..10_000 {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for m in &self.maps {
                let img = m.image(&hull);
                lo = lo.min(img.lo);
                hi = hi.max(img.hi);
            }
            let next = Interval::closed(lo.max(hull.lo), hi.min(hull.hi));
            let moved = (next.lo - hull.lo).abs() + (next.hi - hull.hi).abs();
            hull = next;
            if moved <= 1e-16 * self.support.len() {
                break;
            }
        }
        hull
    }

    /// Depth-first traversal of the cut-set `W_b`: every word `w` with
    /// `|r_w| <= b < |r_{w-}|`. The visitor receives the letters and the
    /// triple `(r_w, t_w, p_w)`. Returns the number of words visited.
    pub fn visit_cut_set<F>(&self, scale: f64, budget: usize, mut visit: F) -> Result<usize>
    where
        F: FnMut(&[u32], f64, f64, f64),
    {
        if !(scale > 0.0 && scale < 1.0) {
            return Err(Error::InvalidArgument(format!("cut-set scale {scale} not in (0,1)")));
        }
        let mut letters = Vec::with_capacity(64);
        let mut count = 0usize;
        let stop = scale * (1.0 + RATIO_SLACK);
        self.descend(stop, budget, &mut letters, 1.0, 0.0, 1.0, &mut count, &mut visit)?;
        Ok(count)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend<F>(
        &self,
        stop: f64,
        budget: usize,
        letters: &mut Vec<u32>,
        ratio: f64,
        translation: f64,
        mass: f64,
        count: &mut usize,
        visit: &mut F,
    ) -> Result<()>
    where
        F: FnMut(&[u32], f64, f64, f64),
    {
        for (i, (m, &p)) in self.maps.iter().zip(&self.weights).enumerate() {
            let r = ratio * m.ratio;
            let t = translation + ratio * m.translation;
            let w = mass * p;
            letters.push(i as u32);
            if r.abs() <= stop {
                *count += 1;
                if *count > budget {
                    return Err(Error::ExplosionGuard { budget });
                }
                visit(letters, r, t, w);
            } else {
                self.descend(stop, budget, letters, r, t, w, count, visit)?;
            }
            letters.pop();
        }
        Ok(())
    }

    /// Materialized cut-set at `scale`.
    pub fn cut_set(&self, scale: f64) -> Result<CutSet> {
        self.cut_set_with_budget(scale, DEFAULT_WORD_BUDGET)
    }

    pub fn cut_set_with_budget(&self, scale: f64, budget: usize) -> Result<CutSet> {
        let mut words = Vec::new();
        self.visit_cut_set(scale, budget, |letters, r, t, p| {
            words.push(Word {
                letters: letters.to_vec(),
                ratio: r,
                translation: t,
                mass: p,
            })
        })?;
        Ok(CutSet { scale, words })
    }

    /// `f_w(J)` with endpoints sorted.
    pub fn cylinder_interval(&self, word: &Word) -> Interval {
        cylinder(word.ratio, word.translation, &self.support)
    }
}

#[inline]
pub(crate) fn cylinder(ratio: f64, translation: f64, support: &Interval) -> Interval {
    Interval::spanning(ratio * support.lo + translation, ratio * support.hi + translation)
}

/// A finite word with its composed map `f_w = f_{w1} o ... o f_{wn}` and mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Word {
    pub letters: Vec<u32>,
    pub ratio: f64,
    pub translation: f64,
    pub mass: f64,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new(), ratio: 1.0, translation: 0.0, mass: 1.0 }
    }

    /// Recomputes `(r_w, t_w, p_w)` from scratch, composing the maps from
    /// the innermost letter outwards.
    pub fn from_letters(ifs: &IteratedFunctionSystem, letters: &[u32]) -> Result<Self> {
        let mut t = 0.0;
        let mut r = 1.0;
        let mut p = 1.0;
        for &l in letters.iter().rev() {
            let m = ifs
                .maps
                .get(l as usize)
                .ok_or_else(|| Error::InvalidArgument(format!("letter {l} outside alphabet")))?;
            t = m.apply(t);
            r *= m.ratio;
            p *= ifs.weights[l as usize];
        }
        Ok(Word { letters: letters.to_vec(), ratio: r, translation: t, mass: p })
    }

    /// Appends a letter: `f_{wi} = f_w o f_i`.
    pub fn extend(&self, ifs: &IteratedFunctionSystem, letter: u32) -> Self {
        let m = ifs.maps[letter as usize];
        let mut letters = self.letters.clone();
        letters.push(letter);
        Word {
            letters,
            ratio: self.ratio * m.ratio,
            translation: self.translation + self.ratio * m.translation,
            mass: self.mass * ifs.weights[letter as usize],
        }
    }

    /// The word with its last letter removed (`w-`).
    pub fn parent(&self, ifs: &IteratedFunctionSystem) -> Result<Self> {
        let n = self.letters.len();
        if n == 0 {
            return Err(Error::InvalidArgument("the empty word has no parent".into()));
        }
        Word::from_letters(ifs, &self.letters[..n - 1])
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.ratio * x + self.translation
    }
}

/// The cut-set `W_b`.
#[derive(Debug, Clone, Serialize)]
pub struct CutSet {
    pub scale: f64,
    pub words: Vec<Word>,
}

impl CutSet {
    pub fn total_mass(&self) -> f64 {
        // Kahan summation keeps the partition check meaningful for large sets.
        let mut sum = 0.0;
        let mut c = 0.0;
        for w in &self.words {
            let y = w.mass - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        sum
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Distinct values of `|r_w|` up to relative tolerance `1e-9`.
    pub fn distinct_ratios(&self) -> Vec<f64> {
        let mut rs: Vec<f64> = self.words.iter().map(|w| w.ratio.abs()).collect();
        rs.sort_by(|a, b| a.total_cmp(b));
        rs.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
        rs
    }

    /// Upper bound on `|C_b|`, the number of distinct `|r_w|` over `W_b`.
    ///
    /// Ratios in `W_b` are products `prod r_i^{n_i}` lying in
    /// `(b * min|r_i|, b]`. Fixing all exponents but the one of the smallest
    /// ratio leaves at most `ceil(ln r_min / ln r_max) + 1` choices for it, and
    /// the remaining exponent vectors have total at most `ln b / ln r_max`.
    pub fn ratio_count_bound(ifs: &IteratedFunctionSystem, scale: f64) -> f64 {
        let mut logs: Vec<f64> = ifs.maps().iter().map(|m| m.ratio.abs().ln()).collect();
        logs.sort_by(|a, b| a.total_cmp(b));
        logs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let r_max = ifs.max_abs_ratio().ln();
        let r_min = ifs.min_abs_ratio().ln();
        let depth = (scale.ln() / r_max).ceil().max(1.0) as u64;
        let free = logs.len() as u64 - 1;
        let last_choices = (r_min / r_max).ceil() + 1.0;
        binomial(depth + free, free) * last_choices
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

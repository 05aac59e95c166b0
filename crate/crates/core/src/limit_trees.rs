//! Galton-Watson and unimodular Galton-Watson trees: degree laws, samplers,
//! extinction numerics and the supercritical/subcritical duality.

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graphs::{Graph, RootedGraph};
use crate::num::Real;
use crate::rng::{seeded_rng, Seed};

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;
/// Longest support accepted when truncating an infinite-support law. Laws
/// whose tail is still heavier than the tolerance here are rejected.
pub const SUPPORT_CAP: usize = 1_000_000;
pub const DEFAULT_TREE_BUDGET: usize = 1_000_000;
const FIXED_POINT_TOL: f64 = 1e-12;
const FIXED_POINT_MAX_ITER: usize = 100_000;
const ALPHA_GRID: usize = 10_000;
const ALPHA_TOL: f64 = 1e-12;
const DUAL_CHECK_TOL: f64 = 1e-8;
const POISSON_DUAL_TOL: f64 = 1e-13;

/// Probability law on `{0, 1, ..., k_max}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Real + Serialize")]
pub struct DegreeDist<T> {
    #[serde(rename = "probabilities")]
    probs: Vec<T>,
    tail_tolerance: T,
    #[serde(skip)]
    cdf: Vec<f64>,
}

fn arithmetic_slack<T: Real>(len: usize) -> T {
    T::epsilon() * T::of_usize(4 * len.max(1))
}

impl<T: Real> DegreeDist<T> {
    pub fn new(probs: Vec<T>, tail_tolerance: T) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("degree law needs at least one entry"));
        }
        if probs.len() > SUPPORT_CAP + 1 {
            return Err(Error::SizeCap {
                what: "degree support",
                requested: probs.len() as u128,
                cap: SUPPORT_CAP as u128 + 1,
            });
        }
        if probs.iter().any(|p| !p.is_finite() || *p < T::zero()) {
            return Err(Error::invalid("degree probabilities must be finite and nonnegative"));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > tail_tolerance + arithmetic_slack::<T>(probs.len()) {
            return Err(Error::invalid(format!("degree probabilities sum to {total}")));
        }
        let mut probs = probs;
        while probs.len() > 1 && *probs.last().expect("nonempty") == T::zero() {
            probs.pop();
        }
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p.as_f64();
                acc
            })
            .collect();
        Ok(DegreeDist {
            probs,
            tail_tolerance,
            cdf,
        })
    }

    pub fn from_probs(probs: Vec<T>) -> Result<Self> {
        Self::new(probs, T::of(DEFAULT_TAIL_TOLERANCE))
    }

    pub fn dirac(k: usize) -> Result<Self> {
        let mut probs = vec![T::zero(); k + 1];
        probs[k] = T::one();
        Self::from_probs(probs)
    }

    /// Truncates a law given by its pmf once the remaining mass drops below
    /// `tail_tolerance`, then renormalizes.
    pub fn from_pmf_fn(mut pmf: impl FnMut(usize) -> f64, tail_tolerance: f64) -> Result<Self> {
        let mut probs = Vec::new();
        let mut mass = 0.0;
        loop {
            let k = probs.len();
            if k > SUPPORT_CAP {
                return Err(Error::invalid(format!(
                    "tail mass still above {tail_tolerance} at degree {SUPPORT_CAP}; heavy-tailed laws are not supported"
                )));
            }
            let p = pmf(k);
            if !p.is_finite() || p < 0.0 {
                return Err(Error::invalid(format!("pmf at {k} is {p}")));
            }
            probs.push(p);
            mass += p;
            if 1.0 - mass < tail_tolerance {
                break;
            }
        }
        let probs = probs.into_iter().map(|p| T::of(p / mass)).collect();
        Self::new(probs, T::of(tail_tolerance))
    }

    pub fn poisson(theta: f64) -> Result<Self> {
        Self::poisson_with(theta, DEFAULT_TAIL_TOLERANCE)
    }

    pub fn poisson_with(theta: f64, tail_tolerance: f64) -> Result<Self> {
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::invalid(format!("Poisson parameter {theta}")));
        }
        // log pmf avoids underflow of e^-theta for large theta
        let ln_theta = theta.ln();
        let mut ln_fact = 0.0;
        Self::from_pmf_fn(
            move |k| {
                if k > 0 {
                    ln_fact += (k as f64).ln();
                }
                if theta == 0.0 {
                    return if k == 0 { 1.0 } else { 0.0 };
                }
                (k as f64 * ln_theta - theta - ln_fact).exp()
            },
            tail_tolerance,
        )
    }

    /// Parses `poisson:<theta>`, `dirac:<k>` or a list `k:p,k:p,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(rest) = spec.strip_prefix("poisson:") {
            let theta = rest.trim().parse::<f64>().map_err(|e| Error::invalid(format!("{rest}: {e}")))?;
            return Self::poisson(theta);
        }
        if let Some(rest) = spec.strip_prefix("dirac:") {
            let k = rest.trim().parse::<usize>().map_err(|e| Error::invalid(format!("{rest}: {e}")))?;
            return Self::dirac(k);
        }
        let mut probs: Vec<T> = Vec::new();
        for item in spec.split(',') {
            let (k, p) = item
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("expected k:p, got {item:?}")))?;
            let k = k.trim().parse::<usize>().map_err(|e| Error::invalid(format!("{k}: {e}")))?;
            let p = p.trim().parse::<f64>().map_err(|e| Error::invalid(format!("{p}: {e}")))?;
            if k > SUPPORT_CAP {
                return Err(Error::invalid(format!("degree {k} exceeds support cap")));
            }
            if probs.len() <= k {
                probs.resize(k + 1, T::zero());
            }
            probs[k] = probs[k] + T::of(p);
        }
        Self::from_probs(probs)
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, k: usize) -> T {
        self.probs.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn max_degree(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn tail_tolerance(&self) -> T {
        self.tail_tolerance
    }

    pub fn mean(&self) -> T {
        self.probs
            .iter()
            .enumerate()
            .map(|(k, &p)| T::of_usize(k) * p)
            .sum()
    }

    pub fn pgf(&self, x: T) -> T {
        self.probs.iter().rev().fold(T::zero(), |acc, &p| acc * x + p)
    }

    pub fn pgf_derivative(&self, x: T) -> T {
        self.probs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(T::zero(), |acc, (k, &p)| acc * x + T::of_usize(k) * p)
    }

    /// `rho_hat(k) = (k+1) rho(k+1) / mean`.
    pub fn size_biased(&self) -> Result<Self> {
        let m = self.mean();
        if m <= T::zero() {
            return Err(Error::invalid("size-biasing needs a positive mean"));
        }
        let probs: Vec<T> = if self.probs.len() == 1 {
            vec![T::one()]
        } else {
            (1..self.probs.len())
                .map(|k| T::of_usize(k) * self.probs[k] / m)
                .collect()
        };
        Self::new(probs, self.tail_tolerance)
    }

    /// Mean of the size-biased law, `sum k(k-1) rho_k / sum k rho_k`.
    pub fn theta(&self) -> Result<T> {
        let m = self.mean();
        if m <= T::zero() {
            return Err(Error::invalid("theta needs a positive mean"));
        }
        let f2: T = self
            .probs
            .iter()
            .enumerate()
            .skip(2)
            .map(|(k, &p)| T::of_usize(k * (k - 1)) * p)
            .sum();
        Ok(f2 / m)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.gen::<f64>() * self.cdf[self.cdf.len() - 1];
        self.cdf.partition_point(|&c| c <= u).min(self.probs.len() - 1)
    }

    pub fn tv(&self, other: &Self) -> T {
        let n = self.probs.len().max(other.probs.len());
        let sum: T = (0..n).map(|k| (self.prob(k) - other.prob(k)).abs()).sum();
        sum / T::of(2.0)
    }
}

/// A sampled tree, possibly cut short by the vertex budget.
#[derive(Clone, Debug)]
pub struct SampledTree {
    pub tree: RootedGraph,
    /// True when the vertex budget stopped growth before the depth limit.
    pub truncated: bool,
    /// Distance of each vertex from the root (the root is vertex 0).
    pub depths: Vec<usize>,
}

impl SampledTree {
    pub fn vertex_count(&self) -> usize {
        self.tree.vertex_count()
    }

    /// Number of vertices at exactly `depth`.
    pub fn generation_size(&self, depth: usize) -> usize {
        self.depths.iter().filter(|&&d| d == depth).count()
    }
}

/// Unimodular GW tree: root offspring `rho`, later generations `rho_hat`.
/// `depth = usize::MAX` grows until extinction or the budget.
pub fn sample_ugw<T: Real>(rho: &DegreeDist<T>, depth: usize, seed: Seed) -> Result<SampledTree> {
    sample_ugw_with_budget(rho, depth, DEFAULT_TREE_BUDGET, seed)
}

pub fn sample_ugw_with_budget<T: Real>(
    rho: &DegreeDist<T>,
    depth: usize,
    budget: usize,
    seed: Seed,
) -> Result<SampledTree> {
    if rho.mean() <= T::zero() {
        return sample_tree(rho, rho, depth, budget, seed);
    }
    let hat = rho.size_biased()?;
    sample_tree(rho, &hat, depth, budget, seed)
}

/// GW tree with the same offspring law in every generation.
pub fn sample_gw<T: Real>(offspring: &DegreeDist<T>, depth: usize, seed: Seed) -> Result<SampledTree> {
    sample_gw_with_budget(offspring, depth, DEFAULT_TREE_BUDGET, seed)
}

pub fn sample_gw_with_budget<T: Real>(
    offspring: &DegreeDist<T>,
    depth: usize,
    budget: usize,
    seed: Seed,
) -> Result<SampledTree> {
    sample_tree(offspring, offspring, depth, budget, seed)
}

fn sample_tree<T: Real>(
    root_law: &DegreeDist<T>,
    law: &DegreeDist<T>,
    depth: usize,
    budget: usize,
    seed: Seed,
) -> Result<SampledTree> {
    if budget == 0 {
        return Err(Error::invalid("tree budget must be positive"));
    }
    let mut rng = seeded_rng(seed);
    let mut depths = vec![0usize];
    let mut edges = Vec::new();
    let mut truncated = false;
    let mut head = 0;
    while head < depths.len() && !truncated {
        let v = head;
        head += 1;
        if depths[v] >= depth {
            continue;
        }
        let children = if v == 0 { root_law.sample(&mut rng) } else { law.sample(&mut rng) };
        for _ in 0..children {
            if depths.len() == budget {
                truncated = true;
                break;
            }
            edges.push((v, depths.len()));
            depths.push(depths[v] + 1);
        }
    }
    let graph = Graph::from_edges(depths.len(), &edges)?;
    Ok(SampledTree {
        tree: RootedGraph::new(graph, 0)?,
        truncated,
        depths,
    })
}

/// Smallest fixed point in `[0, 1]` of the pgf of `offspring`, i.e. the
/// extinction probability of GW(`offspring`).
pub fn extinction_fixed_point<T: Real>(offspring: &DegreeDist<T>) -> Result<T> {
    let m = offspring.mean();
    if m <= T::one() && offspring.prob(1) < T::one() {
        return Ok(T::one());
    }
    let tol = T::of(FIXED_POINT_TOL).max(T::epsilon() * T::of(4.0));
    let mut q = T::zero();
    for _ in 0..FIXED_POINT_MAX_ITER {
        let next = offspring.pgf(q);
        if (next - q).abs() <= tol {
            return Ok(next);
        }
        q = next;
    }
    Err(Error::NoConvergence {
        iterations: FIXED_POINT_MAX_ITER,
    })
}

/// `P(|T| = infinity)` for T ~ UGW(rho).
pub fn survival_prob<T: Real>(rho: &DegreeDist<T>) -> Result<T> {
    if rho.mean() <= T::zero() {
        return Ok(T::zero());
    }
    let q_hat = extinction_fixed_point(&rho.size_biased()?)?;
    Ok((T::one() - rho.pgf(q_hat)).max(T::zero()))
}

/// `H(x) = m - 2x - sum_k k rho_k (1 - 2x/m)^{k/2}`.
pub fn duality_h<T: Real>(rho: &DegreeDist<T>, x: T) -> T {
    let m = rho.mean();
    let two = T::of(2.0);
    let base = (T::one() - two * x / m).max(T::zero());
    let root = base.sqrt();
    let mut power = T::one();
    let mut sum = T::zero();
    for (k, &p) in rho.probs().iter().enumerate() {
        if k > 0 {
            power = power * root;
            sum = sum + T::of_usize(k) * p * power;
        }
    }
    m - two * x - sum
}

fn require_supercritical<T: Real>(rho: &DegreeDist<T>) -> Result<T> {
    let theta = rho.theta()?;
    if theta <= T::one() {
        return Err(Error::invalid(format!("duality needs theta > 1, got {theta}")));
    }
    Ok(theta)
}

/// `beta = sqrt(1 - 2 alpha / m)` for the smallest root `alpha` of `H` in
/// `(0, m/2]`. With `x = m (1 - b^2) / 2`, `H = m b (b - g(b))` where `g` is
/// the size-biased pgf, so the search runs over `b` from 1 down to 0. This
/// keeps roots with `b` near 0 resolved.
pub fn dual_beta<T: Real>(rho: &DegreeDist<T>) -> Result<T> {
    require_supercritical(rho)?;
    let hat = rho.size_biased()?;
    let g = |b: T| b - hat.pgf(b);
    let step = T::one() / T::of_usize(ALPHA_GRID);
    let tol = T::of(ALPHA_TOL).max(T::epsilon() * T::of(4.0));
    // g > 0 on (beta, 1) for supercritical laws
    let mut upper = T::one() - step;
    for i in 2..=ALPHA_GRID {
        let b = T::one() - step * T::of_usize(i);
        let b = b.max(T::zero());
        let value = g(b);
        if value == T::zero() {
            return Ok(b);
        }
        if value < T::zero() {
            let (mut lo, mut hi) = (b, upper);
            while hi - lo > tol {
                let mid = (lo + hi) / T::of(2.0);
                if g(mid) > T::zero() {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok((lo + hi) / T::of(2.0));
        }
        upper = b;
    }
    Ok(T::zero())
}

/// Smallest root of `H` in `(0, m/2]`.
pub fn dual_alpha<T: Real>(rho: &DegreeDist<T>) -> Result<T> {
    let beta = dual_beta(rho)?;
    Ok(rho.mean() * (T::one() - beta * beta) / T::of(2.0))
}

/// Quantities of the duality transform for a supercritical `rho`.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real + Serialize")]
pub struct DualityReport<T> {
    pub m: T,
    pub theta: T,
    pub survival: T,
    pub alpha: T,
    pub beta: T,
    pub dual: DegreeDist<T>,
    pub dual_theta: T,
}

/// `rho_tilde_k = rho_k (1 - 2 alpha/m)^{k/2} / (1 - s)`: UGW(rho) conditioned on
/// extinction has law UGW(rho_tilde).
pub fn dual_distribution<T: Real>(rho: &DegreeDist<T>) -> Result<DualityReport<T>> {
    let theta = require_supercritical(rho)?;
    let survival = survival_prob(rho)?;
    let check_tol = T::of(DUAL_CHECK_TOL).max(T::epsilon() * T::of(1e3));
    if T::one() - survival <= check_tol {
        return Err(Error::invalid("duality is undefined when the tree survives almost surely"));
    }
    let m = rho.mean();
    let beta = dual_beta(rho)?;
    let alpha = m * (T::one() - beta * beta) / T::of(2.0);
    let scale = T::one() / (T::one() - survival);
    let mut power = T::one();
    let probs: Vec<T> = rho
        .probs()
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            if k > 0 {
                power = power * beta;
            }
            p * power * scale
        })
        .collect();
    let total: T = probs.iter().copied().sum();
    if (total - T::one()).abs() > check_tol {
        return Err(Error::Diagnostic(format!("dual law sums to {total}")));
    }
    let dual = DegreeDist::new(probs, check_tol)?;
    let dual_theta = dual.theta()?;
    if dual_theta > T::one() + check_tol {
        return Err(Error::Diagnostic(format!("dual law has theta {dual_theta} > 1")));
    }
    Ok(DualityReport {
        m,
        theta,
        survival,
        alpha,
        beta,
        dual,
        dual_theta,
    })
}

/// Solution `t` in `(0, 1)` of `t e^{-t} = theta e^{-theta}` for `theta > 1`.
pub fn poisson_dual<T: Real>(theta: T) -> Result<T> {
    if !(theta > T::one()) || !theta.is_finite() {
        return Err(Error::invalid(format!("Poisson dual needs finite theta > 1, got {theta}")));
    }
    // f(t) = ln t - t - (ln theta - theta) is increasing on (0, 1).
    let target = theta.ln() - theta;
    let f = |t: T| t.ln() - t - target;
    let tol = T::of(POISSON_DUAL_TOL).max(T::epsilon() * T::of(4.0));
    let (mut lo, mut hi) = (T::min_positive_value(), T::one());
    let mut t = (theta * (-theta).exp() * T::E()).min(T::of(0.5));
    for _ in 0..500 {
        let ft = f(t);
        if ft.abs() <= tol {
            return Ok(t);
        }
        if ft < T::zero() {
            lo = t;
        } else {
            hi = t;
        }
        let slope = T::one() / t - T::one();
        let newton = t - ft / slope;
        let next = if slope > T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / T::of(2.0)
        };
        if hi - lo <= tol {
            return Ok(next);
        }
        t = next;
    }
    Err(Error::NoConvergence { iterations: 500 })
}

impl Serialize for SampledTree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SampledTree", 3)?;
        st.serialize_field("vertices", &self.vertex_count())?;
        st.serialize_field("truncated", &self.truncated)?;
        st.serialize_field("height", &self.depths.iter().max())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(probs: &[f64]) -> DegreeDist<f64> {
        DegreeDist::from_probs(probs.to_vec()).unwrap()
    }

    /// Independent oracle: plain bisection on `g(s) = 0` for increasing
    /// sign change on `[lo, hi]`.
    fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let lo_sign = g(lo) > 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (g(mid) > 0.0) == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn size_biasing_examples() {
        let hat = DegreeDist::<f64>::dirac(3).unwrap().size_biased().unwrap();
        assert_eq!(hat.probs(), &[0.0, 0.0, 1.0]);
        let hat = d(&[0.5, 0.0, 0.5]).size_biased().unwrap();
        assert_eq!(hat.probs(), &[0.0, 1.0]);
        let p = DegreeDist::<f64>::poisson(2.0).unwrap();
        assert!(p.tv(&p.size_biased().unwrap()) < 1e-10);
        assert!(DegreeDist::<f64>::dirac(0).unwrap().size_biased().is_err());
    }

    #[test]
    fn theta_examples() {
        assert_eq!(DegreeDist::<f64>::dirac(4).unwrap().theta().unwrap(), 3.0);
        assert_eq!(d(&[0.5, 0.0, 0.5]).theta().unwrap(), 1.0);
        assert_abs_diff_eq!(DegreeDist::<f64>::poisson(1.7).unwrap().theta().unwrap(), 1.7, epsilon = 1e-10);
    }

    #[test]
    fn poisson_truncation_tail_is_small() {
        let p = DegreeDist::<f64>::poisson(3.0).unwrap();
        let k = p.max_degree();
        let tail: f64 = (k + 1..k + 60)
            .map(|j| (j as f64 * 3f64.ln() - 3.0 - (1..=j).map(|i| (i as f64).ln()).sum::<f64>()).exp())
            .sum();
        assert!(tail < 1e-12);
        assert_abs_diff_eq!(p.probs()[0], (-3f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn heavy_tails_are_rejected() {
        // P(k) ~ k^-2.5 has infinite second moment and a slowly vanishing tail.
        let z: f64 = (1..2_000_000).map(|k| (k as f64).powf(-2.5)).sum();
        let r = DegreeDist::<f64>::from_pmf_fn(|k| if k == 0 { 0.0 } else { (k as f64).powf(-2.5) / z }, 1e-12);
        assert!(r.is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(DegreeDist::<f64>::parse("dirac:2").unwrap().probs(), &[0.0, 0.0, 1.0]);
        assert_eq!(DegreeDist::<f64>::parse("0:0.5, 2:0.5").unwrap().probs(), &[0.5, 0.0, 0.5]);
        assert!(DegreeDist::<f64>::parse("poisson:2").is_ok());
        assert!(DegreeDist::<f64>::parse("0:0.5").is_err());
        assert!(DegreeDist::<f64>::parse("nonsense").is_err());
    }

    #[test]
    fn tree_samplers() {
        let t = sample_ugw(&DegreeDist::<f64>::dirac(0).unwrap(), 5, 1).unwrap();
        assert_eq!(t.vertex_count(), 1);
        let t = sample_ugw(&DegreeDist::<f64>::dirac(3).unwrap(), 2, 1).unwrap();
        assert_eq!(t.vertex_count(), 10);
        assert!(t.tree.graph().is_tree());
        let t = sample_gw(&DegreeDist::<f64>::dirac(2).unwrap(), 2, 1).unwrap();
        assert_eq!(t.vertex_count(), 7);
        let t = sample_gw_with_budget(&DegreeDist::<f64>::dirac(2).unwrap(), usize::MAX, 100, 1).unwrap();
        assert!(t.truncated);
        assert_eq!(t.vertex_count(), 100);
        let a = sample_ugw(&DegreeDist::<f64>::poisson(2.0).unwrap(), 6, 9).unwrap();
        let b = sample_ugw(&DegreeDist::<f64>::poisson(2.0).unwrap(), 6, 9).unwrap();
        assert_eq!(a.tree, b.tree);
    }

    #[test]
    fn root_degree_is_poisson() {
        let rho = DegreeDist::<f64>::poisson(2.0).unwrap();
        let n = 100_000;
        let mut counts = vec![0usize; 8];
        for i in 0..n {
            let t = sample_ugw(&rho, 1, crate::rng::derive_seed(5, i)).unwrap();
            counts[t.tree.graph().degree(0).min(7)] += 1;
        }
        // Oracle: Poisson(2) pmf from the closed form, last cell is the tail.
        let mut pmf: Vec<f64> = (0..7)
            .map(|k| (-2f64).exp() * 2f64.powi(k) / (1..=k).product::<i32>().max(1) as f64)
            .collect();
        pmf.push(1.0 - pmf.iter().sum::<f64>());
        let chi2: f64 = counts
            .iter()
            .zip(&pmf)
            .map(|(&c, &p)| (c as f64 - n as f64 * p).powi(2) / (n as f64 * p))
            .sum();
        // 7 degrees of freedom, 0.999 quantile is 24.3
        assert!(chi2 < 24.3, "chi2 = {chi2}");
    }

    #[test]
    fn survival_examples() {
        assert_eq!(survival_prob(&DegreeDist::<f64>::poisson(0.8).unwrap()).unwrap(), 0.0);
        // Critical but degenerate: rho_hat = delta_1, so the tree is an
        // infinite path whenever the root has children.
        assert_eq!(survival_prob(&d(&[0.5, 0.0, 0.5])).unwrap(), 0.5);
        assert_eq!(survival_prob(&d(&[0.5, 0.25, 0.25])).unwrap(), 0.0);
        assert_eq!(survival_prob(&DegreeDist::<f64>::dirac(2).unwrap()).unwrap(), 1.0);
        let oracle = bisect(|s| s - 1.0 + (-2.0 * s).exp(), 0.1, 1.0);
        assert_abs_diff_eq!(oracle, 0.7968, epsilon = 1e-4);
        let s = survival_prob(&DegreeDist::<f64>::poisson(2.0).unwrap()).unwrap();
        assert_abs_diff_eq!(s, oracle, epsilon = 1e-10);
        let s32 = survival_prob(&DegreeDist::<f32>::poisson(2.0).unwrap()).unwrap();
        assert_abs_diff_eq!(s32 as f64, oracle, epsilon = 1e-5);
    }

    #[test]
    fn h_endpoints_vanish() {
        for rho in [d(&[0.2, 0.2, 0.0, 0.6]), DegreeDist::poisson(2.0).unwrap(), d(&[0.1, 0.3, 0.3, 0.3])] {
            let m = rho.mean();
            assert_abs_diff_eq!(duality_h(&rho, 0.0), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(duality_h(&rho, m / 2.0), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn alpha_matches_fixed_point_of_size_biased_pgf() {
        let rho = d(&[0.2, 0.2, 0.0, 0.6]);
        assert_abs_diff_eq!(rho.theta().unwrap(), 1.8, epsilon = 1e-12);
        let alpha = dual_alpha(&rho).unwrap();
        assert_abs_diff_eq!(duality_h(&rho, alpha), 0.0, epsilon = 1e-10);
        // Oracle: beta solves beta = pgf_hat(beta) on (0, 1).
        let m = rho.mean();
        let hat = |x: f64| (0.2 + 3.0 * 0.6 * x * x) / m;
        let beta = bisect(|x| hat(x) - x, 0.0, 0.999);
        assert_abs_diff_eq!((1.0 - 2.0 * alpha / m).sqrt(), beta, epsilon = 1e-8);
        let report = dual_distribution(&rho).unwrap();
        assert_abs_diff_eq!(report.dual.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-8);
        assert!(report.dual_theta < 1.0);
    }

    #[test]
    fn duality_preconditions() {
        assert!(dual_alpha(&DegreeDist::<f64>::poisson(0.9).unwrap()).is_err());
        assert!(dual_distribution(&DegreeDist::<f64>::dirac(3).unwrap()).is_err());
        assert!(poisson_dual(1.0f64).is_err());
        assert!(poisson_dual(0.5f64).is_err());
    }

    #[test]
    fn poisson_dual_examples() {
        let oracle = bisect(|t| t * (-t).exp() - 2.0 * (-2f64).exp(), 1e-9, 1.0);
        assert_abs_diff_eq!(oracle, 0.4064, epsilon = 1e-4);
        assert_abs_diff_eq!(poisson_dual(2.0f64).unwrap(), oracle, epsilon = 1e-12);
        for theta in [1.5f64, 2.0, 3.0] {
            let t = poisson_dual(theta).unwrap();
            assert!((t * (-t).exp() - theta * (-theta).exp()).abs() < 1e-12, "{theta} {t}");
        }
        assert!(poisson_dual(1.0001f64).unwrap() > 0.99);
        assert!((poisson_dual(2.0f32).unwrap() as f64 - oracle).abs() < 1e-5);
    }

    #[test]
    fn poisson_dual_report() {
        let rho = DegreeDist::<f64>::poisson(2.0).unwrap();
        let report = dual_distribution(&rho).unwrap();
        let tt = poisson_dual(2.0f64).unwrap();
        assert_abs_diff_eq!(report.dual_theta, tt, epsilon = 1e-8);
        assert_abs_diff_eq!(report.theta * report.beta, tt, epsilon = 1e-8);
        let target = DegreeDist::<f64>::poisson(tt).unwrap();
        assert!(report.dual.tv(&target) < 1e-8);
        let r15 = dual_distribution(&DegreeDist::<f64>::poisson(1.5).unwrap()).unwrap();
        assert_abs_diff_eq!(r15.survival, bisect(|s| s - 1.0 + (-1.5 * s).exp(), 0.1, 1.0), epsilon = 1e-10);
        assert_abs_diff_eq!(r15.survival, 0.5828, epsilon = 1e-4);
        assert!(r15.dual_theta < 1.0);
        let json = serde_json::to_value(&report).unwrap();
        assert!(json["dual"]["probabilities"].is_array());
    }

    #[test]
    fn pgf_identity_for_size_biased_law() {
        let rho = d(&[0.1, 0.2, 0.3, 0.15, 0.25]);
        let hat = rho.size_biased().unwrap();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert_abs_diff_eq!(hat.pgf(x), rho.pgf_derivative(x) / rho.mean(), epsilon = 1e-10);
        }
    }
}

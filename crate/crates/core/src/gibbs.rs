//! Finite-graph Gibbs measures with pairwise interaction `psi` and reference
//! law `lambda` on a finite alphabet.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::num::Real;
use crate::rng::{seeded_rng, Seed};
use crate::Symbol;

pub const EXACT_STATE_CAP: u128 = 10_000_000;
pub const KERNEL_STATE_CAP: u128 = 1_000_000;
const SYMMETRY_TOL: f64 = 1e-12;
const LAMBDA_TOL: f64 = 1e-9;

/// Display name of an alphabet symbol, as given in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Number(f64),
    Text(String),
}

impl Label {
    /// Numeric value, when the label is a number.
    pub fn value(&self) -> Option<f64> {
        match self {
            Label::Number(x) => Some(*x),
            Label::Text(_) => None,
        }
    }
}

#[derive(Deserialize)]
struct RawSpec {
    alphabet: Vec<Label>,
    psi: Vec<Vec<f64>>,
    lambda: Vec<f64>,
}

/// Alphabet, symmetric interaction table and reference weights. Marks are
/// handled as indices into the alphabet.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Real + Serialize")]
pub struct GibbsSpec<T> {
    alphabet: Vec<Label>,
    psi: Vec<Vec<T>>,
    lambda: Vec<T>,
    #[serde(skip)]
    ln_psi: Vec<Vec<T>>,
    #[serde(skip)]
    ln_lambda: Vec<T>,
}

impl<T: Real> GibbsSpec<T> {
    pub fn new(alphabet: Vec<Label>, psi: Vec<Vec<T>>, lambda: Vec<T>) -> Result<Self> {
        let q = alphabet.len();
        if q == 0 {
            return Err(Error::invalid("alphabet is empty"));
        }
        if lambda.len() != q || psi.len() != q || psi.iter().any(|row| row.len() != q) {
            return Err(Error::invalid(format!("psi must be {q}x{q} and lambda of length {q}")));
        }
        for (a, row) in psi.iter().enumerate() {
            if row.iter().any(|x| !x.is_finite() || *x < T::zero()) {
                return Err(Error::invalid(format!("psi row {a} has a negative or non-finite entry")));
            }
            if row.iter().all(|x| *x == T::zero()) {
                return Err(Error::invalid(format!("psi row {a} has no positive entry")));
            }
            for b in 0..a {
                let (x, y) = (psi[a][b], psi[b][a]);
                if (x - y).abs() > T::of(SYMMETRY_TOL) * x.abs().max(y.abs()).max(T::one()) {
                    return Err(Error::invalid(format!("psi is not symmetric at ({a}, {b})")));
                }
            }
        }
        if lambda.iter().any(|x| !x.is_finite() || *x < T::zero()) {
            return Err(Error::invalid("lambda has a negative or non-finite entry"));
        }
        let total: T = lambda.iter().copied().sum();
        if (total - T::one()).abs() > T::of(LAMBDA_TOL).max(T::epsilon() * T::of_usize(4 * q)) {
            return Err(Error::invalid(format!("lambda sums to {total}")));
        }
        let ln_psi = psi.iter().map(|row| row.iter().map(|x| x.ln()).collect()).collect();
        let ln_lambda = lambda.iter().map(|x| x.ln()).collect();
        Ok(GibbsSpec {
            alphabet,
            psi,
            lambda,
            ln_psi,
            ln_lambda,
        })
    }

    /// Reads `{"alphabet": [...], "psi": [[...]], "lambda": [...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        Self::new(
            raw.alphabet,
            raw.psi.into_iter().map(|r| r.into_iter().map(T::of).collect()).collect(),
            raw.lambda.into_iter().map(T::of).collect(),
        )
    }

    /// Ising model on `{-1, +1}`: `psi(a, b) = exp(beta a b)`, uniform `lambda`.
    pub fn ising(beta: f64) -> Result<Self> {
        let s = [-1.0, 1.0];
        let psi = s
            .iter()
            .map(|a| s.iter().map(|b| T::of((beta * a * b).exp())).collect())
            .collect();
        Self::new(
            s.iter().map(|&x| Label::Number(x)).collect(),
            psi,
            vec![T::of(0.5), T::of(0.5)],
        )
    }

    /// `psi == 1`: the product measure `lambda^V`.
    pub fn independent(alphabet: Vec<Label>, lambda: Vec<T>) -> Result<Self> {
        let q = alphabet.len();
        Self::new(alphabet, vec![vec![T::one(); q]; q], lambda)
    }

    pub fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn psi(&self, a: Symbol, b: Symbol) -> T {
        self.psi[a as usize][b as usize]
    }

    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    fn check_config(&self, g: &Graph, c: &[Symbol]) -> Result<()> {
        if c.len() != g.vertex_count() {
            return Err(Error::Mismatch(format!(
                "configuration of length {} on {} vertices",
                c.len(),
                g.vertex_count()
            )));
        }
        if let Some(&s) = c.iter().find(|&&s| s as usize >= self.alphabet.len()) {
            return Err(Error::invalid(format!("symbol {s} outside alphabet")));
        }
        Ok(())
    }

    fn log_weight(&self, g: &Graph, c: &[Symbol]) -> T {
        let vertex: T = c.iter().map(|&s| self.ln_lambda[s as usize]).sum();
        let edge: T = g
            .edges()
            .map(|(u, v)| self.ln_psi[c[u] as usize][c[v] as usize])
            .sum();
        vertex + edge
    }
}

/// `prod_{edges} psi(x_u, x_v) * prod_v lambda(x_v)`.
pub fn unnormalized_weight<T: Real>(g: &Graph, spec: &GibbsSpec<T>, c: &[Symbol]) -> Result<T> {
    spec.check_config(g, c)?;
    Ok(spec.log_weight(g, c).exp())
}

fn state_count(q: usize, sites: usize, cap: u128, what: &'static str) -> Result<usize> {
    let mut total: u128 = 1;
    for _ in 0..sites {
        total = total.saturating_mul(q as u128);
        if total > cap {
            return Err(Error::SizeCap {
                what,
                requested: total,
                cap,
            });
        }
    }
    Ok(total as usize)
}

/// Configuration with index `idx` in mixed radix `q`, site 0 least
/// significant.
pub fn decode_configuration(mut idx: usize, q: usize, sites: usize) -> Vec<Symbol> {
    (0..sites)
        .map(|_| {
            let s = idx % q;
            idx /= q;
            s as Symbol
        })
        .collect()
}

pub fn encode_configuration(c: &[Symbol], q: usize) -> usize {
    c.iter().rev().fold(0, |acc, &s| acc * q + s as usize)
}

fn normalize_logs<T: Real>(logs: Vec<T>) -> Result<(Vec<T>, T)> {
    let max = logs.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return Err(Error::Diagnostic("every configuration has zero weight".into()));
    }
    let unnorm: Vec<T> = logs.iter().map(|&l| (l - max).exp()).collect();
    let sum: T = unnorm.iter().copied().sum();
    Ok((unnorm.into_iter().map(|w| w / sum).collect(), max + sum.ln()))
}

/// Normalized distribution over all configurations of a small graph.
#[derive(Clone, Debug)]
pub struct ExactGibbs<T> {
    pub probs: Vec<T>,
    pub log_z: T,
    alphabet_size: usize,
    sites: usize,
}

impl<T: Real> ExactGibbs<T> {
    pub fn prob(&self, c: &[Symbol]) -> T {
        self.probs[encode_configuration(c, self.alphabet_size)]
    }

    pub fn configuration(&self, idx: usize) -> Vec<Symbol> {
        decode_configuration(idx, self.alphabet_size, self.sites)
    }

    /// Law of the mark at `v`.
    pub fn marginal(&self, v: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.alphabet_size];
        let stride = self.alphabet_size.pow(v as u32);
        for (idx, &p) in self.probs.iter().enumerate() {
            let s = (idx / stride) % self.alphabet_size;
            out[s] = out[s] + p;
        }
        out
    }
}

pub fn exact_gibbs<T: Real>(g: &Graph, spec: &GibbsSpec<T>) -> Result<ExactGibbs<T>> {
    let q = spec.alphabet_size();
    let n = g.vertex_count();
    let total = state_count(q, n, EXACT_STATE_CAP, "Gibbs state space")?;
    let logs = (0..total)
        .map(|idx| spec.log_weight(g, &decode_configuration(idx, q, n)))
        .collect();
    let (probs, log_z) = normalize_logs(logs)?;
    Ok(ExactGibbs {
        probs,
        log_z,
        alphabet_size: q,
        sites: n,
    })
}

/// Law of the marks on `region` (in the given order) under the kernel
/// `gamma_A(. | x_boundary)`.
#[derive(Clone, Debug)]
pub struct RegionLaw<T> {
    pub region: Vec<usize>,
    pub probs: Vec<T>,
    alphabet_size: usize,
}

impl<T: Real> RegionLaw<T> {
    pub fn prob(&self, marks: &[Symbol]) -> T {
        self.probs[encode_configuration(marks, self.alphabet_size)]
    }

    pub fn configuration(&self, idx: usize) -> Vec<Symbol> {
        decode_configuration(idx, self.alphabet_size, self.region.len())
    }
}

/// Vertices outside `region` adjacent to it, sorted.
pub fn outer_boundary(g: &Graph, region: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; g.vertex_count()];
    for &v in region {
        inside[v] = true;
    }
    let mut out: Vec<usize> = region
        .iter()
        .flat_map(|&v| g.neighbors(v).iter().copied())
        .filter(|&w| !inside[w])
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Kernel on `region` given marks on its outer boundary: `lambda` on the
/// region times `psi` over edges inside the region and edges leaving it.
pub fn conditional_kernel<T: Real>(
    g: &Graph,
    spec: &GibbsSpec<T>,
    region: &[usize],
    boundary: &BTreeMap<usize, Symbol>,
) -> Result<RegionLaw<T>> {
    let n = g.vertex_count();
    let mut slot = vec![usize::MAX; n];
    for (i, &v) in region.iter().enumerate() {
        if v >= n {
            return Err(Error::invalid(format!("region vertex {v} out of range")));
        }
        if slot[v] != usize::MAX {
            return Err(Error::invalid(format!("region lists vertex {v} twice")));
        }
        slot[v] = i;
    }
    let expected = outer_boundary(g, region);
    let given: Vec<usize> = boundary.keys().copied().collect();
    if given != expected {
        return Err(Error::invalid(format!(
            "boundary must cover exactly {expected:?}, got {given:?}"
        )));
    }
    if let Some((_, &s)) = boundary.iter().find(|(_, &s)| s as usize >= spec.alphabet_size()) {
        return Err(Error::invalid(format!("symbol {s} outside alphabet")));
    }
    let q = spec.alphabet_size();
    let total = state_count(q, region.len(), KERNEL_STATE_CAP, "conditional kernel state space")?;
    let logs = (0..total)
        .map(|idx| {
            let x = decode_configuration(idx, q, region.len());
            let mut l = T::zero();
            for (i, &v) in region.iter().enumerate() {
                l = l + spec.ln_lambda[x[i] as usize];
                for &w in g.neighbors(v) {
                    let other = if slot[w] != usize::MAX {
                        if slot[w] < i {
                            continue;
                        }
                        x[slot[w]]
                    } else {
                        boundary[&w]
                    };
                    l = l + spec.ln_psi[x[i] as usize][other as usize];
                }
            }
            l
        })
        .collect();
    let (probs, _) = normalize_logs(logs)?;
    Ok(RegionLaw {
        region: region.to_vec(),
        probs,
        alphabet_size: q,
    })
}

/// Single-site kernel at `v` given the current configuration.
pub fn single_site_kernel<T: Real>(g: &Graph, spec: &GibbsSpec<T>, v: usize, c: &[Symbol]) -> Vec<T> {
    let logs: Vec<T> = (0..spec.alphabet_size())
        .map(|a| {
            g.neighbors(v)
                .iter()
                .fold(spec.ln_lambda[a], |acc, &w| acc + spec.ln_psi[a][c[w] as usize])
        })
        .collect();
    normalize_logs(logs).expect("psi rows have a positive entry").0
}

fn draw<T: Real, R: Rng + ?Sized>(weights: &[T], rng: &mut R) -> Symbol {
    let total: f64 = weights.iter().map(|w| w.as_f64()).sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        u -= w.as_f64();
        if u < 0.0 {
            return i as Symbol;
        }
    }
    // rounding left u at or above zero; fall back to the last positive weight
    weights.iter().rposition(|w| *w > T::zero()).unwrap_or(0) as Symbol
}

/// Each vertex drawn independently from `lambda`.
pub fn iid_sample<T: Real>(g: &Graph, lambda: &[T], seed: Seed) -> Result<Vec<Symbol>> {
    iid_marks(g.vertex_count(), lambda, seed)
}

pub fn iid_marks<T: Real>(n: usize, lambda: &[T], seed: Seed) -> Result<Vec<Symbol>> {
    if lambda.is_empty() || lambda.iter().any(|x| !x.is_finite() || *x < T::zero()) {
        return Err(Error::invalid("lambda must be nonempty, finite and nonnegative"));
    }
    let total: T = lambda.iter().copied().sum();
    if (total - T::one()).abs() > T::of(LAMBDA_TOL).max(T::epsilon() * T::of_usize(4 * lambda.len())) {
        return Err(Error::invalid(format!("lambda sums to {total}")));
    }
    let mut rng = seeded_rng(seed);
    Ok((0..n).map(|_| draw(lambda, &mut rng)).collect())
}

/// Random-scan Glauber dynamics: each sweep visits every vertex once in a
/// fresh uniformly random order and resamples it from its single-site
/// kernel.
pub struct GlauberChain<'a, T> {
    graph: &'a Graph,
    spec: &'a GibbsSpec<T>,
    state: Vec<Symbol>,
    order: Vec<usize>,
    rng: ChaCha8Rng,
}

impl<'a, T: Real> GlauberChain<'a, T> {
    /// Starts from i.i.d. `lambda` marks.
    pub fn new(graph: &'a Graph, spec: &'a GibbsSpec<T>, seed: Seed) -> Result<Self> {
        let mut rng = seeded_rng(seed);
        let state = (0..graph.vertex_count()).map(|_| draw(spec.lambda(), &mut rng)).collect();
        Ok(GlauberChain {
            graph,
            spec,
            state,
            order: (0..graph.vertex_count()).collect(),
            rng,
        })
    }

    pub fn state(&self) -> &[Symbol] {
        &self.state
    }

    pub fn sweep(&mut self) {
        self.order.shuffle(&mut self.rng);
        for i in 0..self.order.len() {
            let v = self.order[i];
            let kernel = single_site_kernel(self.graph, self.spec, v, &self.state);
            self.state[v] = draw(&kernel, &mut self.rng);
        }
    }
}

/// Configuration after `burn_in + sweeps` sweeps; `burn_in` defaults to ten
/// times `sweeps`.
pub fn glauber_sample<T: Real>(
    g: &Graph,
    spec: &GibbsSpec<T>,
    sweeps: usize,
    burn_in: Option<usize>,
    seed: Seed,
) -> Result<Vec<Symbol>> {
    if sweeps == 0 {
        return Err(Error::invalid("sweeps must be at least 1"));
    }
    let burn_in = burn_in.unwrap_or(10 * sweeps);
    let mut chain = GlauberChain::new(g, spec, seed)?;
    for _ in 0..burn_in + sweeps {
        chain.sweep();
    }
    Ok(chain.state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn edge() -> Graph {
        Graph::from_edges(2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let spec = GibbsSpec::<f64>::from_json(
            r#"{"alphabet": ["a", 2], "psi": [[1.0, 0.5], [0.5, 2.0]], "lambda": [0.25, 0.75]}"#,
        )
        .unwrap();
        assert_eq!(spec.alphabet()[0], Label::Text("a".into()));
        assert_eq!(spec.alphabet()[1].value(), Some(2.0));
        assert!(GibbsSpec::<f64>::from_json(r#"{"alphabet": [0, 1], "psi": [[1, 2], [1, 1]], "lambda": [0.5, 0.5]}"#).is_err());
        assert!(GibbsSpec::<f64>::from_json(r#"{"alphabet": [0, 1], "psi": [[0, 0], [0, 1]], "lambda": [0.5, 0.5]}"#).is_err());
        assert!(GibbsSpec::<f64>::from_json(r#"{"alphabet": [0, 1], "psi": [[1, 1], [1, 1]], "lambda": [0.5, 0.6]}"#).is_err());
    }

    #[test]
    fn weights() {
        let lambda = vec![0.3, 0.7];
        let free = GibbsSpec::independent(vec![Label::Number(0.0), Label::Number(1.0)], lambda).unwrap();
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_abs_diff_eq!(unnormalized_weight(&g, &free, &[0, 1, 1]).unwrap(), 0.3 * 0.7 * 0.7, epsilon = 1e-15);
        let beta = 0.7;
        let ising = GibbsSpec::<f64>::ising(beta).unwrap();
        let pp = unnormalized_weight(&edge(), &ising, &[1, 1]).unwrap();
        let pm = unnormalized_weight(&edge(), &ising, &[1, 0]).unwrap();
        assert_abs_diff_eq!(pp / pm, (2.0 * beta).exp(), epsilon = 1e-12);
        assert!(unnormalized_weight(&edge(), &ising, &[1]).is_err());
    }

    #[test]
    fn exact_examples() {
        let ising = GibbsSpec::<f64>::ising(0.5).unwrap();
        let single = exact_gibbs(&Graph::empty(1), &ising).unwrap();
        assert_eq!(single.probs, vec![0.5, 0.5]);
        let law = exact_gibbs(&edge(), &ising).unwrap();
        let z = 2.0 * 0.5f64.exp() + 2.0 * (-0.5f64).exp();
        assert_abs_diff_eq!(law.prob(&[1, 1]), 0.5f64.exp() / z, epsilon = 1e-15);
        let big = Graph::empty(24);
        assert!(matches!(exact_gibbs(&big, &ising), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn kernel_examples() {
        let beta = 0.5;
        let ising = GibbsSpec::<f64>::ising(beta).unwrap();
        let k = conditional_kernel(&edge(), &ising, &[0], &BTreeMap::from([(1, 1)])).unwrap();
        assert_abs_diff_eq!(k.prob(&[1]), beta.exp() / (beta.exp() + (-beta).exp()), epsilon = 1e-15);
        assert!(conditional_kernel(&edge(), &ising, &[0], &BTreeMap::new()).is_err());
        assert!(conditional_kernel(&edge(), &ising, &[0], &BTreeMap::from([(1, 1), (0, 1)])).is_err());
        let iso = conditional_kernel(&Graph::empty(2), &ising, &[0], &BTreeMap::new()).unwrap();
        assert_eq!(iso.probs, vec![0.5, 0.5]);
    }

    #[test]
    fn glauber_with_free_interaction_keeps_lambda() {
        let spec = GibbsSpec::independent(vec![Label::Number(0.0), Label::Number(1.0)], vec![0.2, 0.8]).unwrap();
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let kernel = single_site_kernel(&g, &spec, 1, &[0, 0, 0]);
        assert_abs_diff_eq!(kernel[1], 0.8, epsilon = 1e-15);
        let c = glauber_sample(&g, &spec, 1, Some(0), 3).unwrap();
        assert_eq!(c.len(), 3);
        assert!(glauber_sample(&g, &spec, 0, None, 3).is_err());
    }

    #[test]
    fn iid_examples() {
        let g = Graph::empty(1000);
        assert!(iid_sample(&g, &[0.0, 1.0], 1).unwrap().iter().all(|&s| s == 1));
        assert!(iid_sample(&g, &[1.0, 0.0], 1).unwrap().iter().all(|&s| s == 0));
        let n = 100_000;
        let ones = iid_sample(&Graph::empty(n), &[0.5, 0.5], 2).unwrap().iter().filter(|&&s| s == 1).count();
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((ones as f64 - n as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn encoding_round_trip() {
        for idx in 0..81 {
            assert_eq!(encode_configuration(&decode_configuration(idx, 3, 4), 3), idx);
        }
    }
}

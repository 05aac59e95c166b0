//! Empirical measures of trajectories, distances between them, and the
//! Monte Carlo estimators built on top of them.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{Dynamics, NoisePlan, State, TimeGrid, TrajectorySet};
use crate::error::{Error, Result};
use crate::graphs::{component_of, Graph, LatticeBox, RootedGraph};
use crate::num::Real;
use crate::rng::{derive_seed, seeded_rng, Seed};
use crate::stats::mean_stderr;
use crate::Symbol;

pub use crate::dynamics::{DecayPoint, DecayProfile};

pub const DEFAULT_W1_SAMPLE_CAP: usize = 256;

/// Uniformly weighted collection of paths on a common grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure<S> {
    grid: TimeGrid,
    dim: usize,
    samples: Vec<Vec<S>>,
}

impl<S: State> EmpiricalMeasure<S> {
    pub fn new(grid: TimeGrid, dim: usize, samples: Vec<Vec<S>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("empirical measure needs at least one sample"));
        }
        let len = grid.len() * dim;
        if samples.iter().any(|s| s.len() != len) {
            return Err(Error::Mismatch(format!("every path must hold {len} values")));
        }
        Ok(EmpiricalMeasure { grid, dim, samples })
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[Vec<S>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.samples.len() as f64
    }

    /// `<mu, f>`.
    pub fn integrate(&self, f: impl Fn(&[S]) -> f64) -> f64 {
        self.samples.iter().map(|s| f(s)).sum::<f64>() / self.samples.len() as f64
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.dim != other.dim {
            return Err(Error::Mismatch("empirical measures live on different grids".into()));
        }
        Ok(())
    }
}

/// One sample per vertex.
pub fn global_empirical<S: State>(ts: &TrajectorySet<S>) -> Result<EmpiricalMeasure<S>> {
    let samples = (0..ts.vertex_count()).map(|v| ts.path(v).to_vec()).collect();
    EmpiricalMeasure::new(ts.grid(), ts.dim(), samples)
}

/// Restriction to the vertices of `comp`, whose origin map must point into
/// the simulated graph.
pub fn component_empirical<S: State>(ts: &TrajectorySet<S>, comp: &RootedGraph) -> Result<EmpiricalMeasure<S>> {
    if let Some(&v) = comp.origin().iter().find(|&&v| v >= ts.vertex_count()) {
        return Err(Error::Mismatch(format!(
            "component vertex {v} outside a trajectory set of {} vertices",
            ts.vertex_count()
        )));
    }
    let samples = comp.origin().iter().map(|&v| ts.path(v).to_vec()).collect();
    EmpiricalMeasure::new(ts.grid(), ts.dim(), samples)
}

/// Probability table over symbol paths.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathLaw {
    probs: BTreeMap<Vec<Symbol>, f64>,
}

impl PathLaw {
    pub fn from_empirical(m: &EmpiricalMeasure<Symbol>) -> Self {
        let w = m.weight();
        let mut probs = BTreeMap::new();
        for s in m.samples() {
            *probs.entry(s.clone()).or_insert(0.0) += w;
        }
        PathLaw { probs }
    }

    /// `sum_i w_i law_i`, with weights renormalized to sum to one.
    pub fn mixture(parts: &[(f64, PathLaw)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.is_empty() || !(total > 0.0) || parts.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::invalid("mixture weights must be nonnegative with positive sum"));
        }
        let mut probs = BTreeMap::new();
        for (w, law) in parts {
            for (path, p) in &law.probs {
                *probs.entry(path.clone()).or_insert(0.0) += w / total * p;
            }
        }
        Ok(PathLaw { probs })
    }

    pub fn prob(&self, path: &[Symbol]) -> f64 {
        self.probs.get(path).copied().unwrap_or(0.0)
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    pub fn tv(&self, other: &PathLaw) -> f64 {
        // merge in key order so tv(a, b) and tv(b, a) agree bit for bit
        let keys: BTreeSet<&Vec<Symbol>> = self.probs.keys().chain(other.probs.keys()).collect();
        let sum: f64 = keys.into_iter().map(|k| (self.prob(k) - other.prob(k)).abs()).sum();
        (0.5 * sum).clamp(0.0, 1.0)
    }
}

/// Exact total variation between the path histograms.
pub fn tv_discrete(a: &EmpiricalMeasure<Symbol>, b: &EmpiricalMeasure<Symbol>) -> Result<f64> {
    a.same_grid(b)?;
    Ok(PathLaw::from_empirical(a).tv(&PathLaw::from_empirical(b)))
}

/// Optimal assignment minimizing total cost of a square matrix; returns
/// the column assigned to each row.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    // potentials formulation, 1-based with a dummy column 0
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// `sup_{s <= t} |x(s) - y(s)|` on the grid, Euclidean in each time slice.
fn sup_distance<T: Real>(x: &[T], y: &[T], dim: usize, upto: usize) -> f64 {
    (0..=upto)
        .map(|i| {
            x[i * dim..(i + 1) * dim]
                .iter()
                .zip(&y[i * dim..(i + 1) * dim])
                .map(|(&a, &b)| (a - b).as_f64().powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Wasserstein-1 distance between equal-size subsamples of the two
/// measures, cost the sup distance over `[0, t]`.
pub fn wasserstein1_paths<T: Real + State>(
    a: &EmpiricalMeasure<T>,
    b: &EmpiricalMeasure<T>,
    t: f64,
    max_samples: usize,
    seed: Seed,
) -> Result<f64> {
    a.same_grid(b)?;
    let m = max_samples.min(a.len()).min(b.len());
    if m == 0 {
        return Err(Error::invalid("nothing left to compare after subsampling"));
    }
    let pick = |x: &EmpiricalMeasure<T>, stream: u64| -> Vec<usize> {
        if x.len() == m {
            return (0..m).collect();
        }
        let mut idx = sample(&mut seeded_rng(derive_seed(seed, stream)), x.len(), m).into_vec();
        idx.sort_unstable();
        idx
    };
    let (ia, ib) = (pick(a, 0), pick(b, 1));
    let upto = a.grid().index_at(t);
    let cost: Vec<Vec<f64>> = ia
        .iter()
        .map(|&i| {
            ib.iter()
                .map(|&j| sup_distance(&a.samples[i], &b.samples[j], a.dim, upto))
                .collect()
        })
        .collect();
    let assignment = hungarian(&cost);
    Ok(assignment.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>() / m as f64)
}

/// Law of the root trajectory: independent draws of tree, initial marks
/// and dynamics. For discrete dynamics the trees must reach at least the
/// horizon for the law to be exact.
pub fn root_law_monte_carlo<D, TS, IS>(
    tree_sampler: TS,
    init_sampler: IS,
    dynamics: &D,
    replicas: usize,
    seed: Seed,
) -> Result<EmpiricalMeasure<D::Value>>
where
    D: Dynamics + ?Sized,
    TS: Fn(Seed) -> Result<RootedGraph> + Sync,
    IS: Fn(&RootedGraph, Seed) -> Result<Vec<D::Value>> + Sync,
{
    if replicas == 0 {
        return Err(Error::invalid("need at least one replica"));
    }
    let samples = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let s = derive_seed(seed, r);
            let tree = tree_sampler(derive_seed(s, 0))?;
            let marks = init_sampler(&tree, derive_seed(s, 1))?;
            let ts = dynamics.simulate(tree.graph(), &marks, &NoisePlan::shared(derive_seed(s, 2)))?;
            Ok(ts.path(tree.root()).to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    EmpiricalMeasure::new(dynamics.grid(), dynamics.dim(), samples)
}

/// Shift in W1 of the diffusion root law when the tree depth grows from
/// `depth` to `depth + 2`.
pub fn depth_sensitivity<T, D, TS, IS>(
    tree_sampler: TS,
    init_sampler: IS,
    dynamics: &D,
    depth: usize,
    replicas: usize,
    seed: Seed,
) -> Result<f64>
where
    T: Real + State,
    D: Dynamics<Value = T> + ?Sized,
    TS: Fn(usize, Seed) -> Result<RootedGraph> + Sync,
    IS: Fn(&RootedGraph, Seed) -> Result<Vec<T>> + Sync,
{
    let base = root_law_monte_carlo(|s| tree_sampler(depth, s), &init_sampler, dynamics, replicas, seed)?;
    let deeper = root_law_monte_carlo(|s| tree_sampler(depth + 2, s), &init_sampler, dynamics, replicas, seed)?;
    let horizon = dynamics.grid().time(dynamics.grid().steps);
    wasserstein1_paths(&base, &deeper, horizon, DEFAULT_W1_SAMPLE_CAP, derive_seed(seed, 7))
}

/// Mean and standard error of `|C_max| / n` over independent graphs.
pub fn giant_fraction<G>(graph_sampler: G, n: usize, replicas: usize, seed: Seed) -> Result<(f64, f64)>
where
    G: Fn(usize, Seed) -> Result<Graph> + Sync,
{
    if replicas == 0 {
        return Err(Error::invalid("need at least one replica"));
    }
    let fractions = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let g = graph_sampler(n, derive_seed(seed, r))?;
            let (_, sizes) = g.components();
            Ok(sizes.into_iter().max().unwrap_or(0) as f64 / g.vertex_count().max(1) as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_stderr(&fractions))
}

/// One draw of `<mu^{C_Unif}, f>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComponentDraw {
    pub value: f64,
    pub component_size: usize,
    pub in_largest: bool,
}

/// Sample of `<mu^{C_Unif(G, x)}, f>` over independent graphs, marks, noise
/// and uniform roots. Only the root's component is simulated; the dynamics
/// on different components are independent.
pub fn component_functional_distribution<D, G, IS, F>(
    graph_sampler: G,
    init_sampler: IS,
    dynamics: &D,
    f: F,
    root_draws: usize,
    seed: Seed,
) -> Result<Vec<ComponentDraw>>
where
    D: Dynamics + ?Sized,
    G: Fn(Seed) -> Result<Graph> + Sync,
    IS: Fn(&RootedGraph, Seed) -> Result<Vec<D::Value>> + Sync,
    F: Fn(&[D::Value]) -> f64 + Sync,
{
    if root_draws < 100 {
        return Err(Error::invalid("need at least 100 root draws"));
    }
    (0..root_draws as u64)
        .into_par_iter()
        .map(|r| {
            let s = derive_seed(seed, r);
            let g = graph_sampler(derive_seed(s, 0))?;
            if g.vertex_count() == 0 {
                return Err(Error::invalid("graph sampler produced an empty graph"));
            }
            let root = seeded_rng(derive_seed(s, 1)).gen_range(0..g.vertex_count());
            let comp = component_of(&g, root)?;
            let (_, sizes) = g.components();
            let largest = sizes.into_iter().max().unwrap_or(0);
            let marks = init_sampler(&comp, derive_seed(s, 2))?;
            let ts = dynamics.simulate(comp.graph(), &marks, &NoisePlan::shared(derive_seed(s, 3)))?;
            let mu = global_empirical(&ts)?;
            Ok(ComponentDraw {
                value: mu.integrate(&f),
                component_size: comp.vertex_count(),
                in_largest: comp.vertex_count() == largest,
            })
        })
        .collect()
}

/// Bounded functional of the trajectory field around a lattice site.
pub trait LocalFunctional<S>: Sync {
    /// Largest sup-norm offset read from the centre.
    fn radius(&self) -> usize;

    fn eval(&self, ts: &TrajectorySet<S>, lattice: &LatticeBox, centre: &[i64]) -> f64;
}

/// Average of the state at grid index `step` over the sup-norm window of
/// the given radius. Symbols count as their index.
#[derive(Clone, Copy, Debug)]
pub struct WindowMean {
    pub radius: usize,
    pub step: usize,
}

impl LocalFunctional<Symbol> for WindowMean {
    fn radius(&self) -> usize {
        self.radius
    }

    fn eval(&self, ts: &TrajectorySet<Symbol>, lattice: &LatticeBox, centre: &[i64]) -> f64 {
        let r = self.radius as i64;
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut offset = vec![-r; lattice.dim];
        loop {
            let point: Vec<i64> = centre.iter().zip(&offset).map(|(c, o)| c + o).collect();
            let v = lattice.index(&point).expect("window checked to fit");
            sum += f64::from(ts.state(v, self.step)[0]);
            count += 1;
            // odometer over the window
            let mut i = 0;
            while i < offset.len() {
                offset[i] += 1;
                if offset[i] <= r {
                    break;
                }
                offset[i] = -r;
                i += 1;
            }
            if i == offset.len() {
                break;
            }
        }
        sum / count as f64
    }
}

/// `X_a(step) * X_{a + offset e_1}(step)` for symbol states read as
/// numbers.
#[derive(Clone, Copy, Debug)]
pub struct PairProduct {
    pub offset: usize,
    pub step: usize,
}

impl LocalFunctional<Symbol> for PairProduct {
    fn radius(&self) -> usize {
        self.offset
    }

    fn eval(&self, ts: &TrajectorySet<Symbol>, lattice: &LatticeBox, centre: &[i64]) -> f64 {
        let mut other = centre.to_vec();
        other[0] += self.offset as i64;
        let a = lattice.index(centre).expect("window checked to fit");
        let b = lattice.index(&other).expect("window checked to fit");
        f64::from(ts.state(a, self.step)[0]) * f64::from(ts.state(b, self.step)[0])
    }
}

/// Centred box of side `m`: offsets `-(m/2) .. m - m/2` in each coordinate.
fn box_offsets(m: usize) -> std::ops::Range<i64> {
    let lo = -((m / 2) as i64);
    lo..lo + m as i64
}

/// `(1/|B_m|) sum_{a in B_m} f(tau_a X)` for each side length `m`.
pub fn shift_average<S, F>(
    ts: &TrajectorySet<S>,
    lattice: &LatticeBox,
    f: &F,
    box_sizes: &[usize],
) -> Result<Vec<f64>>
where
    S: State,
    F: LocalFunctional<S> + ?Sized,
{
    if ts.vertex_count() != lattice.vertex_count() {
        return Err(Error::Mismatch("trajectory set does not match the lattice".into()));
    }
    box_sizes
        .iter()
        .map(|&m| {
            if m == 0 {
                return Err(Error::invalid("box side must be positive"));
            }
            let range = box_offsets(m);
            let reach = range.start.abs().max(range.end - 1) as usize + f.radius();
            if reach > lattice.radius {
                return Err(Error::invalid(format!(
                    "box of side {m} with window {} needs lattice radius {reach}, have {}",
                    f.radius(),
                    lattice.radius
                )));
            }
            let count = m.pow(lattice.dim as u32);
            let mut sum = 0.0;
            for idx in 0..count {
                let mut rest = idx;
                let centre: Vec<i64> = (0..lattice.dim)
                    .map(|_| {
                        let c = range.start + (rest % m) as i64;
                        rest /= m;
                        c
                    })
                    .collect();
                sum += f.eval(ts, lattice, &centre);
            }
            Ok(sum / count as f64)
        })
        .collect()
}

/// Cross-replica sample variance of the shift averages per box size.
pub fn ergodicity_variance_curve(replicated: &[Vec<f64>], box_sizes: &[usize]) -> Result<Vec<(usize, f64)>> {
    if replicated.len() < 20 {
        return Err(Error::invalid("variance curve needs at least 20 replicas"));
    }
    if replicated.iter().any(|r| r.len() != box_sizes.len()) {
        return Err(Error::Mismatch("every replica needs one average per box size".into()));
    }
    Ok(box_sizes
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let xs: Vec<f64> = replicated.iter().map(|r| r[i]).collect();
            (m, crate::stats::sample_variance(&xs))
        })
        .collect())
}

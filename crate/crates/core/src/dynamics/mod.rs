//! Interacting particle systems on finite graphs: synchronous discrete-time
//! updates and Euler-Maruyama diffusions, both driven by counter-based noise.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::io::Write;

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::num::Real;
use crate::rng::{self, derive_seed, Seed};
use crate::Symbol;

mod coupling;
mod diffusion;
mod discrete;
mod models;

pub use coupling::{
    coupled_triple, coupling_partition, covariance_decay_profile, CoupledTriple, DecayPoint, DecayProfile,
};
pub use diffusion::simulate_diffusion;
pub use discrete::simulate_discrete;
pub use models::{builtin_model, BuiltinModel, ConsensusSde, Kuramoto, NoisyMajority, Params, Voter};

/// Source of the per-vertex noise streams.
///
/// `Shared(seed)` gives vertex `v` the stream `derive_seed(seed, v)`;
/// `PerVertex` lists stream seeds explicitly, which lets tests swap the
/// noise of chosen vertices or permute streams along an automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoisePlan {
    Shared(Seed),
    PerVertex(Vec<Seed>),
}

impl NoisePlan {
    pub fn shared(seed: Seed) -> Self {
        NoisePlan::Shared(seed)
    }

    pub fn stream(&self, v: usize) -> Seed {
        match self {
            NoisePlan::Shared(seed) => derive_seed(*seed, v as u64),
            NoisePlan::PerVertex(seeds) => seeds[v],
        }
    }

    /// Explicit stream seeds for `n` vertices.
    pub fn resolve(&self, n: usize) -> Vec<Seed> {
        (0..n).map(|v| self.stream(v)).collect()
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            NoisePlan::PerVertex(seeds) if seeds.len() != n => Err(Error::Mismatch(format!(
                "{} noise streams for {n} vertices",
                seeds.len()
            ))),
            _ => Ok(()),
        }
    }
}

impl From<Seed> for NoisePlan {
    fn from(seed: Seed) -> Self {
        NoisePlan::Shared(seed)
    }
}

/// Noise available to one vertex at one step.
#[derive(Clone, Copy, Debug)]
pub struct Noise {
    stream: Seed,
    step: usize,
}

impl Noise {
    pub fn new(stream: Seed, step: usize) -> Self {
        Noise { stream, step }
    }

    /// The draw `xi_v(k)`, uniform on `[0, 1)`.
    pub fn uniform(&self) -> f64 {
        rng::uniform(self.stream, 0, self.step)
    }

    /// Further independent uniforms for the same vertex and step.
    pub fn uniform_lane(&self, lane: u64) -> f64 {
        rng::uniform_lane(self.stream, 0, self.step, lane)
    }

    pub fn normal(&self, component: usize) -> f64 {
        rng::standard_normal(self.stream, 0, self.step, component)
    }
}

/// Per-vertex state type with a total order used only to put neighbour
/// bundles in canonical order.
pub trait State: Clone + Debug + Display + PartialEq + Send + Sync + 'static {
    fn canonical_cmp(&self, other: &Self) -> Ordering;
}

impl State for Symbol {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl State for f64 {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

impl State for f32 {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

/// Time points `0, dt, ..., steps * dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub steps: usize,
    pub dt: f64,
}

impl TimeGrid {
    pub fn discrete(steps: usize) -> Self {
        TimeGrid { steps, dt: 1.0 }
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    /// Last grid index with time at most `t`.
    pub fn index_at(&self, t: f64) -> usize {
        (((t / self.dt) + 1e-9).floor() as usize).min(self.steps)
    }
}

/// One path per vertex on a common time grid, stored vertex-major; every
/// time point holds `dim` values.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySet<S> {
    grid: TimeGrid,
    vertices: usize,
    dim: usize,
    data: Vec<S>,
}

impl<S: State> TrajectorySet<S> {
    pub(crate) fn from_initial(grid: TimeGrid, dim: usize, initial: &[S]) -> Self {
        let vertices = initial.len() / dim.max(1);
        let len = grid.len();
        let mut data = Vec::with_capacity(vertices * len * dim);
        for v in 0..vertices {
            let x0 = &initial[v * dim..(v + 1) * dim];
            for _ in 0..len {
                data.extend_from_slice(x0);
            }
        }
        TrajectorySet {
            grid,
            vertices,
            dim,
            data,
        }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whole path of `v`: `grid.len() * dim` values.
    pub fn path(&self, v: usize) -> &[S] {
        let w = self.grid.len() * self.dim;
        &self.data[v * w..(v + 1) * w]
    }

    /// Path of `v` up to and including grid index `i`.
    pub fn history(&self, v: usize, i: usize) -> &[S] {
        &self.path(v)[..(i + 1) * self.dim]
    }

    pub fn state(&self, v: usize, i: usize) -> &[S] {
        &self.path(v)[i * self.dim..(i + 1) * self.dim]
    }

    pub fn final_state(&self, v: usize) -> &[S] {
        self.state(v, self.grid.steps)
    }

    pub(crate) fn set_state(&mut self, v: usize, i: usize, x: &[S]) {
        let w = self.grid.len() * self.dim;
        let start = v * w + i * self.dim;
        self.data[start..start + self.dim].clone_from_slice(x);
    }

    /// Restriction to `vertices`, in that order.
    pub fn select(&self, vertices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(vertices.len() * self.grid.len() * self.dim);
        for &v in vertices {
            data.extend_from_slice(self.path(v));
        }
        TrajectorySet {
            grid: self.grid,
            vertices: vertices.len(),
            dim: self.dim,
            data,
        }
    }

    /// CSV rows `vertex,step,time,x0,...`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        write!(out, "vertex,step,time")?;
        for c in 0..self.dim {
            write!(out, ",x{c}")?;
        }
        writeln!(out)?;
        for v in 0..self.vertices {
            for i in 0..self.grid.len() {
                write!(out, "{v},{i},{}", self.grid.time(i))?;
                for x in self.state(v, i) {
                    write!(out, ",{x}")?;
                }
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

/// A vertex's own history, `dim` values per time point.
#[derive(Clone, Copy, Debug)]
pub struct Site<'a, S> {
    history: &'a [S],
    dim: usize,
}

impl<'a, S> Site<'a, S> {
    pub fn new(history: &'a [S], dim: usize) -> Self {
        Site { history, dim }
    }

    pub fn history(&self) -> &'a [S] {
        self.history
    }

    pub fn current(&self) -> &'a [S] {
        &self.history[self.history.len() - self.dim..]
    }
}

/// Unordered collection of neighbour histories. Entries are kept in a
/// canonical order that depends only on their contents, so any rule reading
/// the bundle is exactly invariant under relabelling the neighbours.
#[derive(Clone, Debug)]
pub struct NeighborBundle<'a, S> {
    entries: Vec<&'a [S]>,
    dim: usize,
}

fn cmp_histories<S: State>(a: &[S], b: &[S]) -> Ordering {
    // most recent first, then further back
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.canonical_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

impl<'a, S: State> NeighborBundle<'a, S> {
    pub fn new(mut entries: Vec<&'a [S]>, dim: usize) -> Self {
        entries.sort_by(|a, b| cmp_histories(a, b));
        NeighborBundle { entries, dim }
    }
}

impl<'a, S> NeighborBundle<'a, S> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn histories(&self) -> &[&'a [S]] {
        &self.entries
    }

    /// Current states in canonical order.
    pub fn current(&self) -> impl ExactSizeIterator<Item = &'a [S]> + '_ {
        let d = self.dim;
        self.entries.iter().map(move |h| &h[h.len() - d..])
    }
}

/// Discrete-time rule `X_v(k+1) = F^k(X_v[k], X_{N_v}[k], xi_v(k+1))`.
pub trait DiscreteModel: Sync {
    type State: State;

    /// `F^k` for a vertex with at least one neighbour.
    fn update(&self, k: usize, own: Site<'_, Self::State>, neighbors: &NeighborBundle<'_, Self::State>, noise: Noise)
        -> Self::State;

    /// `F_0^k` for an isolated vertex.
    fn update_isolated(&self, k: usize, own: Site<'_, Self::State>, noise: Noise) -> Self::State;
}

/// Coefficients of `dX_v = b dt + sigma dW_v`. Neighbour interaction enters
/// only through the bundle.
pub trait DiffusionModel<T: Real>: Sync {
    fn dim(&self) -> usize;

    /// Declared Lipschitz constant, reported but never used numerically.
    fn lipschitz(&self) -> Option<f64> {
        None
    }

    fn drift(&self, t: T, own: Site<'_, T>, neighbors: &NeighborBundle<'_, T>, out: &mut [T]);

    /// Row-major `dim x dim` matrix.
    fn sigma(&self, t: T, own: Site<'_, T>, neighbors: &NeighborBundle<'_, T>, out: &mut [T]);
}

/// Something that maps (graph, initial marks, noise) to trajectories.
pub trait Dynamics: Sync {
    type Value: State;

    /// Values per vertex in the initial condition and at every time point.
    fn dim(&self) -> usize;

    fn grid(&self) -> TimeGrid;

    fn simulate(&self, g: &Graph, marks: &[Self::Value], noise: &NoisePlan) -> Result<TrajectorySet<Self::Value>>;
}

/// A discrete model run for `steps` steps.
pub struct DiscreteDynamics<'m, M: ?Sized> {
    pub model: &'m M,
    pub steps: usize,
}

impl<M: DiscreteModel + ?Sized> Dynamics for DiscreteDynamics<'_, M> {
    type Value = M::State;

    fn dim(&self) -> usize {
        1
    }

    fn grid(&self) -> TimeGrid {
        TimeGrid::discrete(self.steps)
    }

    fn simulate(&self, g: &Graph, marks: &[M::State], noise: &NoisePlan) -> Result<TrajectorySet<M::State>> {
        simulate_discrete(g, marks, self.model, self.steps, noise)
    }
}

/// A diffusion integrated up to `horizon` with step `dt`.
pub struct DiffusionDynamics<'m, T, M: ?Sized> {
    pub model: &'m M,
    pub horizon: T,
    pub dt: T,
}

impl<T: Real + State, M: DiffusionModel<T> + ?Sized> Dynamics for DiffusionDynamics<'_, T, M> {
    type Value = T;

    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn grid(&self) -> TimeGrid {
        diffusion::grid_for(self.horizon.as_f64(), self.dt.as_f64())
    }

    fn simulate(&self, g: &Graph, marks: &[T], noise: &NoisePlan) -> Result<TrajectorySet<T>> {
        simulate_diffusion(g, marks, self.model, self.horizon, self.dt, noise)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundle_order_ignores_input_order() {
        let a = [0u32, 1, 1];
        let b = [1u32, 0, 1];
        let c = [1u32, 1, 0];
        let x = NeighborBundle::new(vec![&a[..], &b[..], &c[..]], 1);
        let y = NeighborBundle::new(vec![&c[..], &a[..], &b[..]], 1);
        assert_eq!(x.histories(), y.histories());
        let cur: Vec<&[u32]> = x.current().collect();
        assert_eq!(cur, vec![&[0u32][..], &[1], &[1]]);
    }

    #[test]
    fn grid_indexing() {
        let g = TimeGrid { steps: 1000, dt: 1e-3 };
        assert_eq!(g.index_at(1.0), 1000);
        assert_eq!(g.index_at(0.5), 500);
        assert_eq!(g.len(), 1001);
    }

    #[test]
    fn shared_plan_resolves_to_distinct_streams() {
        let p = NoisePlan::shared(4);
        let seeds = p.resolve(3);
        assert_eq!(NoisePlan::PerVertex(seeds.clone()).resolve(3), seeds);
        assert_ne!(seeds[0], seeds[1]);
    }
}

use rayon::prelude::*;
use serde::Serialize;

use super::{Dynamics, NoisePlan, TrajectorySet};
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::rng::{derive_seed, Seed};
use crate::stats::{covariance_ci, Z_99};

const FRESH_STREAM: u64 = 0x5eed_f7e5;

/// Three processes sharing initial marks. `y` and `z` mix the noise of `x`
/// with an independent copy, split by which of the two regions is closer.
#[derive(Clone, Debug, Serialize)]
pub struct CoupledTriple<S> {
    #[serde(skip)]
    pub x: TrajectorySet<S>,
    #[serde(skip)]
    pub y: TrajectorySet<S>,
    #[serde(skip)]
    pub z: TrajectorySet<S>,
    /// `true` at vertices with `d(v, A1) >= d(v, A2)`.
    pub far_from_a1: Vec<bool>,
}

/// `d(v, A1) >= d(v, A2)` per vertex, unreachable counting as infinite.
pub fn coupling_partition(g: &Graph, a1: &[usize], a2: &[usize]) -> Result<Vec<bool>> {
    if a1.is_empty() || a2.is_empty() {
        return Err(Error::invalid("coupling regions must be nonempty"));
    }
    let n = g.vertex_count();
    if let Some(&v) = a1.iter().chain(a2).find(|&&v| v >= n) {
        return Err(Error::invalid(format!("region vertex {v} out of range")));
    }
    let d1 = g.multi_source_distances(a1, usize::MAX);
    let d2 = g.multi_source_distances(a2, usize::MAX);
    Ok(d1
        .iter()
        .zip(&d2)
        .map(|(x, y)| match (x, y) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a >= b,
        })
        .collect())
}

/// `x` uses streams `W`; `y` uses a fresh copy `W~` where `d(v,A1) >= d(v,A2)`
/// and `W` elsewhere; `z` uses `W` there and `W~` elsewhere.
pub fn coupled_triple<D: Dynamics + ?Sized>(
    g: &Graph,
    marks: &[D::Value],
    a1: &[usize],
    a2: &[usize],
    dynamics: &D,
    seed: Seed,
) -> Result<CoupledTriple<D::Value>> {
    let part = coupling_partition(g, a1, a2)?;
    let n = g.vertex_count();
    let w = NoisePlan::shared(seed).resolve(n);
    let fresh = NoisePlan::shared(derive_seed(seed, FRESH_STREAM)).resolve(n);
    let mix = |far_side: &[Seed], near_side: &[Seed]| -> NoisePlan {
        NoisePlan::PerVertex((0..n).map(|v| if part[v] { far_side[v] } else { near_side[v] }).collect())
    };
    Ok(CoupledTriple {
        x: dynamics.simulate(g, marks, &NoisePlan::PerVertex(w.clone()))?,
        y: dynamics.simulate(g, marks, &mix(&fresh, &w))?,
        z: dynamics.simulate(g, marks, &mix(&w, &fresh))?,
        far_from_a1: part,
    })
}

/// One row of a covariance-versus-distance profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayPoint {
    pub distance: usize,
    pub estimate: f64,
    pub ci_half_width: f64,
}

/// Covariance estimates with confidence half-widths, by increasing
/// distance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayProfile {
    pub points: Vec<DecayPoint>,
}

impl DecayProfile {
    pub fn new(points: Vec<DecayPoint>) -> Result<Self> {
        if points.windows(2).any(|w| w[0].distance >= w[1].distance) {
            return Err(Error::invalid("decay profile distances must be strictly increasing"));
        }
        Ok(DecayProfile { points })
    }

    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "distance,covariance,ci")?;
        for p in &self.points {
            writeln!(out, "{},{},{}", p.distance, p.estimate, p.ci_half_width)?;
        }
        Ok(())
    }
}

/// Monte Carlo `Cov(f(X_{A1}), f(X_{A2}))` per `(A1, A2, distance)` over
/// independent noise replicas, with 99% normal confidence half-widths.
pub fn covariance_decay_profile<D, F>(
    g: &Graph,
    marks: &[D::Value],
    dynamics: &D,
    pairs: &[(Vec<usize>, Vec<usize>, usize)],
    f: F,
    replicas: usize,
    seed: Seed,
) -> Result<DecayProfile>
where
    D: Dynamics + ?Sized,
    F: Fn(&TrajectorySet<D::Value>, &[usize]) -> f64 + Sync,
{
    if replicas < 100 {
        return Err(Error::invalid("covariance profile needs at least 100 replicas"));
    }
    let values: Vec<Vec<(f64, f64)>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let ts = dynamics.simulate(g, marks, &NoisePlan::shared(derive_seed(seed, r as u64)))?;
            Ok(pairs.iter().map(|(a1, a2, _)| (f(&ts, a1), f(&ts, a2))).collect())
        })
        .collect::<Result<_>>()?;
    let points = pairs
        .iter()
        .enumerate()
        .map(|(i, (_, _, distance))| {
            let (a, b): (Vec<f64>, Vec<f64>) = values.iter().map(|row| row[i]).unzip();
            let (estimate, ci_half_width) = covariance_ci(&a, &b, Z_99)?;
            Ok(DecayPoint {
                distance: *distance,
                estimate,
                ci_half_width,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DecayProfile::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{DiscreteDynamics, NoisyMajority, Voter};
    use crate::Symbol;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, &(1..n).map(|v| (v - 1, v)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn whole_vertex_set_ties_to_fresh_y() {
        let g = path(5);
        let all: Vec<usize> = (0..5).collect();
        let m = NoisyMajority::new(0.3, 2).unwrap();
        let dy = DiscreteDynamics { model: &m, steps: 6 };
        let marks = vec![0 as Symbol; 5];
        let t = coupled_triple(&g, &marks, &all, &all, &dy, 3).unwrap();
        assert!(t.far_from_a1.iter().all(|&b| b));
        assert_eq!(t.x, t.z);
        assert_ne!(t.x, t.y);
    }

    #[test]
    fn single_vertex_z_equals_x() {
        let g = Graph::empty(1);
        let m = NoisyMajority::new(0.5, 2).unwrap();
        let dy = DiscreteDynamics { model: &m, steps: 10 };
        let t = coupled_triple(&g, &[1], &[0], &[0], &dy, 8).unwrap();
        assert_eq!(t.x, t.z);
        assert!(coupled_triple(&g, &[1], &[], &[0], &dy, 8).is_err());
    }

    #[test]
    fn partition_on_path() {
        let part = coupling_partition(&path(6), &[0], &[5]).unwrap();
        assert_eq!(part, vec![false, false, false, true, true, true]);
        let two = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(coupling_partition(&two, &[0], &[2]).unwrap(), vec![false, false, true, true]);
    }

    #[test]
    fn decay_profile_examples() {
        let g = path(12);
        let marks: Vec<Symbol> = (0..12).map(|v| ((v / 2) % 2) as Symbol).collect();
        let dy = DiscreteDynamics { model: &Voter, steps: 2 };
        let f = |ts: &TrajectorySet<Symbol>, a: &[usize]| ts.final_state(a[0])[0] as f64;
        let pairs = vec![(vec![5], vec![5], 0), (vec![2], vec![9], 7)];
        let prof = covariance_decay_profile(&g, &marks, &dy, &pairs, f, 2000, 1).unwrap();
        assert!(prof.points[0].estimate > 0.0);
        assert!(prof.points[1].estimate.abs() <= prof.points[1].ci_half_width);
        assert!(covariance_decay_profile(&g, &marks, &dy, &pairs, f, 99, 1).is_err());
        assert!(DecayProfile::new(vec![prof.points[1], prof.points[0]]).is_err());
    }
}

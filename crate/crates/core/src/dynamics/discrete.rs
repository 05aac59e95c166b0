use super::{DiscreteModel, NeighborBundle, Noise, NoisePlan, Site, TimeGrid, TrajectorySet};
use crate::error::{Error, Result};
use crate::graphs::Graph;

/// Synchronous updates for `k_max` steps from the initial marks. Vertex `v`
/// at step `k+1` sees the noise of stream `noise.stream(v)` at counter
/// `k+1`.
pub fn simulate_discrete<M: DiscreteModel + ?Sized>(
    g: &Graph,
    marks: &[M::State],
    model: &M,
    k_max: usize,
    noise: &NoisePlan,
) -> Result<TrajectorySet<M::State>> {
    let n = g.vertex_count();
    if marks.len() != n {
        return Err(Error::Mismatch(format!("{} marks for {n} vertices", marks.len())));
    }
    noise.check(n)?;
    let streams = noise.resolve(n);
    let mut ts = TrajectorySet::from_initial(TimeGrid::discrete(k_max), 1, marks);
    let mut next = Vec::with_capacity(n);
    for k in 0..k_max {
        next.clear();
        {
            let mut entries = Vec::new();
            for v in 0..n {
                let own = Site::new(ts.history(v, k), 1);
                let xi = Noise::new(streams[v], k + 1);
                let nb = g.neighbors(v);
                let x = if nb.is_empty() {
                    model.update_isolated(k, own, xi)
                } else {
                    entries.clear();
                    entries.extend(nb.iter().map(|&w| ts.history(w, k)));
                    let bundle = NeighborBundle::new(std::mem::take(&mut entries), 1);
                    let x = model.update(k, own, &bundle, xi);
                    entries = bundle.entries;
                    x
                };
                next.push(x);
            }
        }
        for (v, x) in next.iter().enumerate() {
            ts.set_state(v, k + 1, std::slice::from_ref(x));
        }
    }
    Ok(ts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{NoisyMajority, Voter};
    use crate::graphs::{gen_erdos_renyi, gen_lattice_box};
    use crate::Symbol;

    #[test]
    fn voter_consensus_is_absorbing() {
        let g = gen_erdos_renyi(200, 0.02, 1).unwrap();
        let ts = simulate_discrete(&g, &vec![1; 200], &Voter, 10, &NoisePlan::shared(3)).unwrap();
        assert!((0..200).all(|v| ts.path(v).iter().all(|&x| x == 1)));
    }

    #[test]
    fn majority_fixed_points() {
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let m = NoisyMajority::new(0.0, 2).unwrap();
        let ts = simulate_discrete(&tri, &[0, 0, 0], &m, 5, &NoisePlan::shared(1)).unwrap();
        assert!((0..3).all(|v| ts.path(v).iter().all(|&x| x == 0)));
        let ts = simulate_discrete(&tri, &[1, 1, 1], &m, 5, &NoisePlan::shared(1)).unwrap();
        assert!((0..3).all(|v| ts.path(v).iter().all(|&x| x == 1)));
    }

    #[test]
    fn isolated_vertex_only_sees_own_noise() {
        let g = Graph::from_edges(3, &[(1, 2)]).unwrap();
        let m = NoisyMajority::new(0.3, 2).unwrap();
        let a = simulate_discrete(&g, &[0, 0, 1], &m, 20, &NoisePlan::PerVertex(vec![7, 8, 9])).unwrap();
        let b = simulate_discrete(&g, &[0, 1, 0], &m, 20, &NoisePlan::PerVertex(vec![7, 1, 2])).unwrap();
        assert_eq!(a.path(0), b.path(0));
    }

    #[test]
    fn deterministic_per_seed() {
        let g = gen_lattice_box(2, 5).unwrap().into_graph();
        let marks: Vec<Symbol> = (0..g.vertex_count()).map(|v| ((v * 7 / 3) % 2) as Symbol).collect();
        let a = simulate_discrete(&g, &marks, &Voter, 6, &NoisePlan::shared(11)).unwrap();
        let b = simulate_discrete(&g, &marks, &Voter, 6, &NoisePlan::shared(11)).unwrap();
        let c = simulate_discrete(&g, &marks, &Voter, 6, &NoisePlan::shared(12)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(simulate_discrete(&g, &marks[1..], &Voter, 6, &NoisePlan::shared(11)).is_err());
    }
}

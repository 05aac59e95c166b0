use proptest::prelude::*;
use sparse_ips::dynamics::{simulate_discrete, DiscreteDynamics, NoisePlan, TimeGrid, Voter};
use sparse_ips::empirical::{
    component_empirical, ergodicity_variance_curve, global_empirical, root_law_monte_carlo, shift_average,
    tv_discrete, wasserstein1_paths, EmpiricalMeasure, PathLaw, WindowMean,
};
use sparse_ips::gibbs::iid_marks;
use sparse_ips::graphs::{component_of, gen_erdos_renyi, gen_lattice_box, LatticeBox};
use sparse_ips::limit_trees::{sample_ugw, DegreeDist};
use sparse_ips::rng::derive_seed;
use sparse_ips::Symbol;

fn symbol_measure(paths: Vec<Vec<Symbol>>) -> EmpiricalMeasure<Symbol> {
    let len = paths[0].len();
    EmpiricalMeasure::new(TimeGrid::discrete(len - 1), 1, paths).unwrap()
}

fn real_measure(paths: Vec<Vec<f64>>) -> EmpiricalMeasure<f64> {
    let len = paths[0].len();
    EmpiricalMeasure::new(TimeGrid { steps: len - 1, dt: 0.5 }, 1, paths).unwrap()
}

fn paths_of(len: usize, count: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, len), count)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn sup_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn tv_is_symmetric_and_vanishes_on_equal_inputs(
        a in prop::collection::vec(prop::collection::vec(0u32..2, 3), 1..30),
        b in prop::collection::vec(prop::collection::vec(0u32..2, 3), 1..30),
    ) {
        let (ma, mb) = (symbol_measure(a), symbol_measure(b));
        prop_assert_eq!(tv_discrete(&ma, &mb).unwrap(), tv_discrete(&mb, &ma).unwrap());
        prop_assert_eq!(tv_discrete(&ma, &ma).unwrap(), 0.0);
        let t = tv_discrete(&ma, &mb).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
    }

    #[test]
    fn w1_matches_brute_force_assignment(a in paths_of(4, 5), b in paths_of(4, 5)) {
        let (ma, mb) = (real_measure(a.clone()), real_measure(b.clone()));
        let w = wasserstein1_paths(&ma, &mb, 1.5, 256, 0).unwrap();
        let best = permutations(5)
            .iter()
            .map(|p| (0..5).map(|i| sup_dist(&a[i], &b[p[i]])).sum::<f64>() / 5.0)
            .fold(f64::INFINITY, f64::min);
        prop_assert!((w - best).abs() < 1e-12, "{} vs {}", w, best);
    }

    #[test]
    fn w1_is_a_metric_on_fixed_samples(a in paths_of(6, 8), b in paths_of(6, 8), c in paths_of(6, 8)) {
        let (ma, mb, mc) = (real_measure(a), real_measure(b), real_measure(c));
        let ab = wasserstein1_paths(&ma, &mb, 2.5, 256, 0).unwrap();
        let ba = wasserstein1_paths(&mb, &ma, 2.5, 256, 0).unwrap();
        let bc = wasserstein1_paths(&mb, &mc, 2.5, 256, 0).unwrap();
        let ac = wasserstein1_paths(&ma, &mc, 2.5, 256, 0).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert_eq!(wasserstein1_paths(&ma, &ma, 2.5, 256, 0).unwrap(), 0.0);
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn component_measures_reweighted_give_the_global_measure(seed in any::<u64>()) {
        let g = gen_erdos_renyi(80, 0.02, seed).unwrap();
        let marks = iid_marks(80, &[0.5, 0.5], derive_seed(seed, 1)).unwrap();
        let ts = simulate_discrete(&g, &marks, &Voter, 3, &NoisePlan::shared(derive_seed(seed, 2))).unwrap();
        let (labels, sizes) = g.components();
        let mut parts = Vec::new();
        for c in 0..sizes.len() {
            let v = labels.iter().position(|&l| l == c).unwrap();
            let comp = component_of(&g, v).unwrap();
            let law = PathLaw::from_empirical(&component_empirical(&ts, &comp).unwrap());
            parts.push((comp.vertex_count() as f64, law));
        }
        let global = PathLaw::from_empirical(&global_empirical(&ts).unwrap());
        prop_assert!(PathLaw::mixture(&parts).unwrap().tv(&global) < 1e-12);
    }
}

#[test]
fn translation_moves_w1_by_the_shift() {
    let a: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 * 0.1, (i as f64).sin(), 0.3]).collect();
    let b: Vec<Vec<f64>> = a.iter().map(|p| p.iter().map(|x| x + 0.7).collect()).collect();
    let w = wasserstein1_paths(&real_measure(a), &real_measure(b), 1.0, 256, 3).unwrap();
    assert!((w - 0.7).abs() < 1e-12);
}

#[test]
fn discrete_root_law_is_exactly_depth_stable() {
    // BFS-ordered trees share their first k levels across depth limits, so
    // with common seeds the root paths coincide draw by draw
    let rho = DegreeDist::<f64>::poisson(1.5).unwrap();
    let k = 4;
    let dy = DiscreteDynamics { model: &Voter, steps: k };
    let init = |t: &sparse_ips::graphs::RootedGraph, s| iid_marks(t.vertex_count(), &[0.5, 0.5], s);
    let law = |depth: usize| {
        root_law_monte_carlo(|s| Ok(sample_ugw(&rho, depth, s)?.tree), init, &dy, 5000, 17).unwrap()
    };
    let base = law(k);
    let deeper = law(k + 3);
    assert_eq!(base.samples(), deeper.samples());
    assert_eq!(tv_discrete(&base, &deeper).unwrap(), 0.0);
}

#[test]
fn iid_shift_averages_have_binomial_variance() {
    let lattice = LatticeBox { dim: 2, radius: 10 };
    let g = gen_lattice_box(2, 10).unwrap();
    let f = WindowMean { radius: 0, step: 0 };
    let sizes = [2usize, 4, 8];
    let p = 0.3;
    let reps: Vec<Vec<f64>> = (0..800)
        .map(|r| {
            let marks = iid_marks(g.vertex_count(), &[1.0 - p, p], r).unwrap();
            let ts = simulate_discrete(g.graph(), &marks, &Voter, 0, &NoisePlan::shared(r)).unwrap();
            shift_average(&ts, &lattice, &f, &sizes).unwrap()
        })
        .collect();
    for (m, var) in ergodicity_variance_curve(&reps, &sizes).unwrap() {
        let exact = p * (1.0 - p) / (m * m) as f64;
        // sample variance over 800 replicas: relative sd about 5%
        assert!((var / exact - 1.0).abs() < 0.2, "m {m}: {var} vs {exact}");
    }
}

#[test]
fn frozen_dynamics_have_zero_variance() {
    let lattice = LatticeBox { dim: 2, radius: 6 };
    let g = gen_lattice_box(2, 6).unwrap();
    let f = WindowMean { radius: 1, step: 2 };
    let reps: Vec<Vec<f64>> = (0..20)
        .map(|r| {
            let ts = simulate_discrete(g.graph(), &vec![1; g.vertex_count()], &Voter, 2, &NoisePlan::shared(r)).unwrap();
            shift_average(&ts, &lattice, &f, &[2, 4]).unwrap()
        })
        .collect();
    assert!(ergodicity_variance_curve(&reps, &[2, 4]).unwrap().iter().all(|(_, v)| *v == 0.0));
}

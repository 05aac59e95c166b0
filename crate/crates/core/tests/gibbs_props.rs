use std::collections::BTreeMap;

use proptest::prelude::*;
use sparse_ips::experiments::{detailed_balance_deviation, mrf_deviation, random_gibbs_spec};
use sparse_ips::gibbs::{conditional_kernel, exact_gibbs, outer_boundary, GibbsSpec, Label};
use sparse_ips::graphs::Graph;
use sparse_ips::Symbol;

fn graph_from_mask(n: usize, mask: u32) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask >> bit & 1 == 1 {
                edges.push((u, v));
            }
            bit += 1;
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Product of weights, enumerated directly.
fn oracle_joint(g: &Graph, psi: &[Vec<f64>], lambda: &[f64]) -> Vec<f64> {
    let n = g.vertex_count();
    let q = lambda.len();
    let total = q.pow(n as u32);
    let mut w = Vec::with_capacity(total);
    for idx in 0..total {
        let mut c = vec![0usize; n];
        let mut rest = idx;
        for slot in c.iter_mut() {
            *slot = rest % q;
            rest /= q;
        }
        let mut x: f64 = c.iter().map(|&s| lambda[s]).product();
        for (u, v) in g.edges() {
            x *= psi[c[u]][c[v]];
        }
        w.push(x);
    }
    let z: f64 = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

fn spec_from(q: usize, raw: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut psi = vec![vec![0.0; q]; q];
    let mut it = raw.iter().copied();
    for a in 0..q {
        for b in a..q {
            let w = 0.2 + it.next().unwrap();
            psi[a][b] = w;
            psi[b][a] = w;
        }
    }
    let lam: Vec<f64> = (0..q).map(|_| 0.1 + it.next().unwrap()).collect();
    let s: f64 = lam.iter().sum();
    (psi, lam.iter().map(|x| x / s).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_enumeration_matches_oracle(
        mask in 0u32..1024,
        q in 2usize..=3,
        raw in prop::collection::vec(0.0f64..2.0, 9),
    ) {
        let g = graph_from_mask(5, mask);
        let (psi, lambda) = spec_from(q, &raw);
        let labels = (0..q).map(|i| Label::Number(i as f64)).collect();
        let spec = GibbsSpec::new(labels, psi.clone(), lambda.clone()).unwrap();
        let exact = exact_gibbs(&g, &spec).unwrap();
        let oracle = oracle_joint(&g, &psi, &lambda);
        for (a, b) in exact.probs.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn markov_field_and_detailed_balance(mask in 0u32..1024, region_mask in 1u32..32, seed in any::<u64>()) {
        let g = graph_from_mask(5, mask);
        let spec = random_gibbs_spec(2 + (seed % 2) as usize, seed).unwrap();
        let region: Vec<usize> = (0..5).filter(|v| region_mask >> v & 1 == 1).collect();
        prop_assert!(mrf_deviation(&g, &spec, &region).unwrap() < 1e-12);
        prop_assert!(detailed_balance_deviation(&g, &spec).unwrap() < 1e-12);
    }

    #[test]
    fn kernel_is_normalised(mask in 0u32..1024, seed in any::<u64>(), fill in 0u32..32) {
        let g = graph_from_mask(5, mask);
        let spec = random_gibbs_spec(2, seed).unwrap();
        let region = vec![0, 1];
        let boundary = outer_boundary(&g, &region);
        let marks: Vec<Symbol> = (0..5).map(|v| fill >> v & 1).collect();
        let b: BTreeMap<usize, Symbol> = boundary.iter().map(|&v| (v, marks[v])).collect();
        let k = conditional_kernel(&g, &spec, &region, &b).unwrap();
        let total: f64 = k.probs.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn whole_vertex_set_kernel_is_the_joint_law() {
    let g = graph_from_mask(5, 0b1011010110);
    let spec = random_gibbs_spec(3, 4).unwrap();
    let all: Vec<usize> = (0..5).collect();
    let k = conditional_kernel(&g, &spec, &all, &BTreeMap::new()).unwrap();
    let exact = exact_gibbs(&g, &spec).unwrap();
    for (a, b) in k.probs.iter().zip(&exact.probs) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn incomplete_boundary_is_rejected() {
    let g = graph_from_mask(3, 0b111);
    let spec = GibbsSpec::<f64>::ising(0.3).unwrap();
    assert!(conditional_kernel(&g, &spec, &[0], &BTreeMap::from([(1, 0)])).is_err());
}

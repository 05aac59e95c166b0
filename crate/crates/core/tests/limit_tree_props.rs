use proptest::prelude::*;
use sparse_ips::limit_trees::{
    dual_distribution, duality_h, extinction_fixed_point, poisson_dual, sample_gw, sample_ugw_with_budget,
    survival_prob, DegreeDist,
};
use sparse_ips::rng::derive_seed;
use sparse_ips::stats::{ks_critical, ks_two_sample};

/// Survival of GW(Poisson theta) by plain iteration of `s = 1 - exp(-theta s)`.
fn poisson_survival_oracle(theta: f64) -> f64 {
    let mut s = 1.0;
    for _ in 0..10_000 {
        s = 1.0 - (-theta * s).exp();
    }
    s
}

/// Extinction of GW(rho_hat), iterating the size-biased pgf written out by hand.
fn hat_extinction_oracle(rho: &[f64]) -> f64 {
    let m: f64 = rho.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    let mut q = 0.0f64;
    for _ in 0..200_000 {
        q = (1..rho.len()).map(|k| k as f64 * rho[k] / m * q.powi(k as i32 - 1)).sum();
    }
    q
}

fn supercritical_law() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, 3..7)
        .prop_map(|w| {
            let s: f64 = w.iter().sum();
            w.iter().map(|x| x / s).collect::<Vec<f64>>()
        })
        .prop_filter("supercritical", |p| {
            let m: f64 = p.iter().enumerate().map(|(k, x)| k as f64 * x).sum();
            let f2: f64 = p.iter().enumerate().map(|(k, x)| (k * k.saturating_sub(1)) as f64 * x).sum();
            f2 / m > 1.05
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn size_biased_law_is_a_law(p in supercritical_law()) {
        let rho = DegreeDist::from_probs(p).unwrap();
        let hat = rho.size_biased().unwrap();
        let total: f64 = hat.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!((hat.mean() - rho.theta().unwrap()).abs() < 1e-12);
        prop_assert!((rho.pgf(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extinction_is_a_fixed_point(p in supercritical_law()) {
        let hat = DegreeDist::from_probs(p.clone()).unwrap().size_biased().unwrap();
        let q = extinction_fixed_point(&hat).unwrap();
        prop_assert!((hat.pgf(q) - q).abs() < 1e-10);
        prop_assert!((q - hat_extinction_oracle(&p)).abs() < 1e-8);
    }

    #[test]
    fn dual_law_is_the_extinction_conditioned_root_law(p in supercritical_law()) {
        // conditioned on extinction the root has k children with probability
        // rho_k q^k / (1 - s), q the extinction probability below the root
        let rho = DegreeDist::from_probs(p.clone()).unwrap();
        let q = hat_extinction_oracle(&p);
        let extinct: f64 = p.iter().enumerate().map(|(k, x)| x * q.powi(k as i32)).sum();
        let r = dual_distribution(&rho).unwrap();
        prop_assert!((r.survival - (1.0 - extinct)).abs() < 1e-8);
        prop_assert!((r.beta - q).abs() < 1e-6, "beta {} q {}", r.beta, q);
        for (k, &x) in p.iter().enumerate() {
            prop_assert!((r.dual.prob(k) - x * q.powi(k as i32) / extinct).abs() < 1e-6);
        }
        prop_assert!(r.dual_theta <= 1.0 + 1e-8);
        prop_assert!(duality_h(&rho, r.alpha).abs() < 1e-9);
    }

    #[test]
    fn poisson_dual_solves_its_equation(theta in 1.05f64..6.0) {
        let t = poisson_dual(theta).unwrap();
        prop_assert!(t < 1.0);
        prop_assert!((t * (-t).exp() - theta * (-theta).exp()).abs() < 1e-12);
        prop_assert!((t - theta * (1.0 - poisson_survival_oracle(theta))).abs() < 1e-9);
    }
}

#[test]
fn frozen_poisson_values() {
    let s2 = poisson_survival_oracle(2.0);
    let s15 = poisson_survival_oracle(1.5);
    assert!((s2 - 0.796_812_1).abs() < 1e-6, "{s2}");
    assert!((s15 - 0.582_812_2).abs() < 1e-6, "{s15}");
    assert!((2.0 * (1.0 - s2) - 0.406_375_7).abs() < 1e-6);

    let rho = DegreeDist::<f64>::poisson(2.0).unwrap();
    assert!((survival_prob(&rho).unwrap() - s2).abs() < 1e-9);
    let r = dual_distribution(&rho).unwrap();
    assert!((r.dual_theta - poisson_dual(2.0).unwrap()).abs() < 1e-8);
    assert!((survival_prob(&DegreeDist::<f64>::poisson(1.5).unwrap()).unwrap() - s15).abs() < 1e-9);
}

#[test]
fn f32_survival_agrees_with_f64() {
    let a = survival_prob(&DegreeDist::<f64>::poisson(2.0).unwrap()).unwrap();
    let b = survival_prob(&DegreeDist::<f32>::poisson(2.0).unwrap()).unwrap();
    assert!((a - f64::from(b)).abs() < 1e-5);
}

#[test]
fn monte_carlo_survival_and_extinct_tree_sizes() {
    let theta = 2.0;
    let rho = DegreeDist::<f64>::poisson(theta).unwrap();
    let n = 20_000;
    // a finite tree above the budget is astronomically unlikely, so
    // truncation stands in for survival
    let budget = 3_000;
    let mut survived = 0usize;
    let mut extinct_sizes = Vec::new();
    for i in 0..n {
        let t = sample_ugw_with_budget(&rho, usize::MAX, budget, derive_seed(11, i)).unwrap();
        if t.truncated {
            survived += 1;
        } else {
            extinct_sizes.push(t.vertex_count() as f64);
        }
    }
    let s = poisson_survival_oracle(theta);
    let frac = survived as f64 / n as f64;
    let se = (s * (1.0 - s) / n as f64).sqrt();
    assert!((frac - s).abs() < 4.0 * se, "{frac} vs {s}");

    let dual = DegreeDist::<f64>::poisson(poisson_dual(theta).unwrap()).unwrap();
    let dual_sizes: Vec<f64> = (0..n)
        .map(|i| sample_gw(&dual, usize::MAX, derive_seed(12, i)).unwrap().vertex_count() as f64)
        .collect();
    let ks = ks_two_sample(&extinct_sizes, &dual_sizes).unwrap();
    let crit = ks_critical(extinct_sizes.len(), dual_sizes.len(), 1e-3);
    assert!(ks < crit, "ks {ks} critical {crit}");
}

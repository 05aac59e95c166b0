use super::{DiffusionModel, NeighborBundle, Noise, NoisePlan, Site, State, TimeGrid, TrajectorySet};
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::num::Real;

pub(crate) fn grid_for(horizon: f64, dt: f64) -> TimeGrid {
    let ratio = horizon / dt;
    // snap ratios that are whole up to rounding of an f32 step
    let steps = if (ratio - ratio.round()).abs() <= 1e-6 * ratio.max(1.0) {
        ratio.round()
    } else {
        ratio.ceil()
    };
    TimeGrid {
        steps: steps.max(1.0) as usize,
        dt,
    }
}

/// Euler-Maruyama on the grid `0, dt, ..., ceil(horizon/dt) dt`.
///
/// `marks` holds `dim` initial values per vertex. The Gaussian increment of
/// vertex `v` over step `i -> i+1` uses counter `i+1` of its noise stream.
pub fn simulate_diffusion<T, M>(
    g: &Graph,
    marks: &[T],
    model: &M,
    horizon: T,
    dt: T,
    noise: &NoisePlan,
) -> Result<TrajectorySet<T>>
where
    T: Real + State,
    M: DiffusionModel<T> + ?Sized,
{
    let n = g.vertex_count();
    let d = model.dim();
    if d == 0 {
        return Err(Error::invalid("diffusion dimension must be positive"));
    }
    if marks.len() != n * d {
        return Err(Error::Mismatch(format!(
            "{} initial values for {n} vertices of dimension {d}",
            marks.len()
        )));
    }
    if !(dt > T::zero()) || !(horizon >= dt) || !horizon.is_finite() {
        return Err(Error::invalid(format!("need 0 < dt <= horizon, got dt={dt}, horizon={horizon}")));
    }
    noise.check(n)?;
    let streams = noise.resolve(n);
    let grid = grid_for(horizon.as_f64(), dt.as_f64());
    let sqrt_dt = dt.sqrt();
    let mut ts = TrajectorySet::from_initial(grid, d, marks);
    let mut next = vec![T::zero(); n * d];
    let mut b = vec![T::zero(); d];
    let mut s = vec![T::zero(); d * d];
    let mut z = vec![T::zero(); d];
    for i in 0..grid.steps {
        let t = dt * T::of_usize(i);
        {
            let mut entries = Vec::new();
            for v in 0..n {
                let own = Site::new(ts.history(v, i), d);
                entries.clear();
                entries.extend(g.neighbors(v).iter().map(|&w| ts.history(w, i)));
                let bundle = NeighborBundle::new(std::mem::take(&mut entries), d);
                model.drift(t, own, &bundle, &mut b);
                model.sigma(t, own, &bundle, &mut s);
                entries = bundle.entries;
                let xi = Noise::new(streams[v], i + 1);
                for (c, zc) in z.iter_mut().enumerate() {
                    *zc = T::of(xi.normal(c));
                }
                let x = own.current();
                for r in 0..d {
                    let diffusion: T = (0..d).map(|c| s[r * d + c] * z[c]).sum();
                    let y = x[r] + b[r] * dt + diffusion * sqrt_dt;
                    if !y.is_finite() {
                        return Err(Error::NonFinite { step: i + 1, vertex: v });
                    }
                    next[v * d + r] = y;
                }
            }
        }
        for v in 0..n {
            ts.set_state(v, i + 1, &next[v * d..(v + 1) * d]);
        }
    }
    Ok(ts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{ConsensusSde, Kuramoto};
    use crate::stats::{covariance_ci, Z_99};

    #[test]
    fn frozen_coefficients_give_constant_paths() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let m = Kuramoto::<f64>::new(0.0, 0.0);
        let ts = simulate_diffusion(&g, &[0.3, -1.2], &m, 1.0, 0.1, &NoisePlan::shared(1)).unwrap();
        assert!(ts.path(0).iter().all(|&x| x == 0.3));
        assert!(ts.path(1).iter().all(|&x| x == -1.2));
    }

    #[test]
    fn k2_consensus_closed_form() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let m = ConsensusSde::<f64>::new(0.0, 1);
        let mut errors = Vec::new();
        for dt in [1e-2, 5e-3, 2.5e-3] {
            let ts = simulate_diffusion(&g, &[1.0, -1.0], &m, 1.0, dt, &NoisePlan::shared(1)).unwrap();
            let err = (0..ts.grid().len())
                .map(|i| {
                    let exact = 2.0 * (-2.0 * ts.grid().time(i)).exp();
                    (ts.state(0, i)[0] - ts.state(1, i)[0] - exact).abs()
                })
                .fold(0.0, f64::max);
            assert!(err <= 5.0 * dt, "dt {dt}: {err}");
            errors.push(err);
        }
        assert!(errors[0] > errors[1] && errors[1] > errors[2]);
    }

    #[test]
    fn brownian_increments_have_variance_dt() {
        let g = Graph::empty(1);
        let m = ConsensusSde::<f64>::new(1.0, 1);
        let dt = 1e-3;
        let ts = simulate_diffusion(&g, &[0.0], &m, 100.0, dt, &NoisePlan::shared(9)).unwrap();
        let p = ts.path(0);
        let inc: Vec<f64> = p.windows(2).map(|w| w[1] - w[0]).collect();
        assert_eq!(inc.len(), 100_000);
        let var = crate::stats::sample_variance(&inc);
        // Var of the sample variance of normals is 2 sigma^4 / (n - 1).
        let se = (2.0f64 / 99_999.0).sqrt() * dt;
        assert!((var - dt).abs() < 4.0 * se, "{var}");
    }

    #[test]
    fn uncoupled_kuramoto_vertices_are_uncorrelated() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let m = Kuramoto::<f64>::new(0.0, 1.0);
        let (a, b): (Vec<f64>, Vec<f64>) = (0..4000)
            .map(|r| {
                let ts = simulate_diffusion(&g, &[0.0, 0.0], &m, 0.5, 0.05, &NoisePlan::shared(r)).unwrap();
                (ts.final_state(0)[0], ts.final_state(1)[0])
            })
            .unzip();
        let (cov, half) = covariance_ci(&a, &b, Z_99).unwrap();
        assert!(cov.abs() <= half, "{cov} +- {half}");
    }

    #[test]
    fn blow_up_is_reported() {
        struct Explode;
        impl DiffusionModel<f64> for Explode {
            fn dim(&self) -> usize {
                1
            }
            fn drift(&self, _: f64, own: Site<'_, f64>, _: &NeighborBundle<'_, f64>, out: &mut [f64]) {
                out[0] = own.current()[0] * 1e200;
            }
            fn sigma(&self, _: f64, _: Site<'_, f64>, _: &NeighborBundle<'_, f64>, out: &mut [f64]) {
                out[0] = 0.0;
            }
        }
        let err = simulate_diffusion(&Graph::empty(2), &[1.0, 1.0], &Explode, 1.0, 0.1, &NoisePlan::shared(0));
        assert!(matches!(err, Err(Error::NonFinite { step: 2, vertex: 0 })));
    }

    #[test]
    fn bad_arguments() {
        let g = Graph::empty(2);
        let m = ConsensusSde::<f64>::new(0.0, 2);
        assert!(simulate_diffusion(&g, &[0.0; 3], &m, 1.0, 0.1, &NoisePlan::shared(0)).is_err());
        assert!(simulate_diffusion(&g, &[0.0; 4], &m, 1.0, 0.0, &NoisePlan::shared(0)).is_err());
        assert!(simulate_diffusion(&g, &[0.0; 4], &m, 0.01, 0.1, &NoisePlan::shared(0)).is_err());
    }
}

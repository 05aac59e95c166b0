use std::collections::BTreeMap;

use super::{DiffusionModel, DiscreteModel, NeighborBundle, Noise, Site};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::Symbol;

/// Named numeric model parameters.
pub type Params = BTreeMap<String, f64>;

/// Adopt the state of a uniformly chosen neighbour; isolated vertices hold.
#[derive(Clone, Copy, Debug, Default)]
pub struct Voter;

impl DiscreteModel for Voter {
    type State = Symbol;

    fn update(&self, _k: usize, _own: Site<'_, Symbol>, neighbors: &NeighborBundle<'_, Symbol>, noise: Noise) -> Symbol {
        let n = neighbors.len();
        let pick = ((noise.uniform() * n as f64) as usize).min(n - 1);
        neighbors.current().nth(pick).expect("pick is in range")[0]
    }

    fn update_isolated(&self, _k: usize, own: Site<'_, Symbol>, _noise: Noise) -> Symbol {
        own.current()[0]
    }
}

/// Majority of the neighbours' states, ties going to the own state (or
/// else the smallest tied symbol), then replaced by a uniformly chosen
/// different symbol with probability `epsilon`. Isolated vertices keep
/// their state before the flip.
#[derive(Clone, Copy, Debug)]
pub struct NoisyMajority {
    epsilon: f64,
    alphabet: usize,
}

impl NoisyMajority {
    pub fn new(epsilon: f64, alphabet: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::invalid(format!("flip probability {epsilon} outside [0, 1]")));
        }
        if alphabet < 2 {
            return Err(Error::invalid("majority rule needs at least two symbols"));
        }
        Ok(NoisyMajority { epsilon, alphabet })
    }

    fn flip(&self, s: Symbol, noise: Noise) -> Symbol {
        if noise.uniform() >= self.epsilon {
            return s;
        }
        let others = self.alphabet as u64 - 1;
        let r = ((noise.uniform_lane(1) * others as f64) as u64).min(others - 1) as Symbol;
        if r >= s {
            r + 1
        } else {
            r
        }
    }
}

impl DiscreteModel for NoisyMajority {
    type State = Symbol;

    fn update(&self, _k: usize, own: Site<'_, Symbol>, neighbors: &NeighborBundle<'_, Symbol>, noise: Noise) -> Symbol {
        let own = own.current()[0];
        let mut counts: BTreeMap<Symbol, usize> = BTreeMap::new();
        for x in neighbors.current() {
            *counts.entry(x[0]).or_insert(0) += 1;
        }
        let best = counts.values().copied().max().unwrap_or(0);
        let majority = if counts.get(&own) == Some(&best) {
            own
        } else {
            *counts.iter().find(|(_, &c)| c == best).expect("bundle is nonempty").0
        };
        self.flip(majority, noise)
    }

    fn update_isolated(&self, _k: usize, own: Site<'_, Symbol>, noise: Noise) -> Symbol {
        self.flip(own.current()[0], noise)
    }
}

/// `b = mean of neighbour states - own state`, `sigma = sigma0 I`.
#[derive(Clone, Copy, Debug)]
pub struct ConsensusSde<T> {
    sigma0: T,
    dim: usize,
}

impl<T: Real> ConsensusSde<T> {
    pub fn new(sigma0: f64, dim: usize) -> Self {
        ConsensusSde { sigma0: T::of(sigma0), dim }
    }
}

impl<T: Real> DiffusionModel<T> for ConsensusSde<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(2.0)
    }

    fn drift(&self, _t: T, own: Site<'_, T>, neighbors: &NeighborBundle<'_, T>, out: &mut [T]) {
        out.iter_mut().for_each(|b| *b = T::zero());
        if neighbors.is_empty() {
            return;
        }
        for x in neighbors.current() {
            for (b, &xc) in out.iter_mut().zip(x) {
                *b = *b + xc;
            }
        }
        let n = T::of_usize(neighbors.len());
        for (b, &own) in out.iter_mut().zip(own.current()) {
            *b = *b / n - own;
        }
    }

    fn sigma(&self, _t: T, _own: Site<'_, T>, _neighbors: &NeighborBundle<'_, T>, out: &mut [T]) {
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[r * self.dim + c] = if r == c { self.sigma0 } else { T::zero() };
            }
        }
    }
}

/// Scalar phases: `b = (K/|N_v|) sum sin(x_u - x_v)`, `sigma = sigma0`.
#[derive(Clone, Copy, Debug)]
pub struct Kuramoto<T> {
    coupling: T,
    sigma0: T,
}

impl<T: Real> Kuramoto<T> {
    pub fn new(coupling: f64, sigma0: f64) -> Self {
        Kuramoto {
            coupling: T::of(coupling),
            sigma0: T::of(sigma0),
        }
    }
}

impl<T: Real> DiffusionModel<T> for Kuramoto<T> {
    fn dim(&self) -> usize {
        1
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(2.0 * self.coupling.abs().as_f64())
    }

    fn drift(&self, _t: T, own: Site<'_, T>, neighbors: &NeighborBundle<'_, T>, out: &mut [T]) {
        out[0] = T::zero();
        if neighbors.is_empty() {
            return;
        }
        let x = own.current()[0];
        let s: T = neighbors.current().map(|y| (y[0] - x).sin()).sum();
        out[0] = self.coupling * s / T::of_usize(neighbors.len());
    }

    fn sigma(&self, _t: T, _own: Site<'_, T>, _neighbors: &NeighborBundle<'_, T>, out: &mut [T]) {
        out[0] = self.sigma0;
    }
}

/// A model from the registry.
pub enum BuiltinModel<T> {
    Discrete(Box<dyn DiscreteModel<State = Symbol>>),
    Diffusion(Box<dyn DiffusionModel<T>>),
}

impl<T> std::fmt::Debug for BuiltinModel<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BuiltinModel::Discrete(_) => f.write_str("BuiltinModel::Discrete"),
            BuiltinModel::Diffusion(_) => f.write_str("BuiltinModel::Diffusion"),
        }
    }
}

struct ParamReader<'a> {
    name: &'a str,
    params: &'a Params,
    used: Vec<&'static str>,
}

impl ParamReader<'_> {
    fn get(&mut self, key: &'static str, default: Option<f64>) -> Result<f64> {
        self.used.push(key);
        match (self.params.get(key), default) {
            (Some(&v), _) if v.is_finite() => Ok(v),
            (Some(v), _) => Err(Error::invalid(format!("{}: parameter {key} = {v}", self.name))),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::invalid(format!("{}: missing parameter {key}", self.name))),
        }
    }

    fn count(&mut self, key: &'static str, default: usize) -> Result<usize> {
        let v = self.get(key, Some(default as f64))?;
        if v < 1.0 || v.fract() != 0.0 {
            return Err(Error::invalid(format!("{}: {key} must be a positive integer", self.name)));
        }
        Ok(v as usize)
    }

    fn finish(self) -> Result<()> {
        if let Some(k) = self.params.keys().find(|k| !self.used.contains(&k.as_str())) {
            return Err(Error::invalid(format!("{}: unknown parameter {k}", self.name)));
        }
        Ok(())
    }
}

/// Registry: `voter`, `noisy_majority` (`epsilon`, `alphabet` = 2),
/// `consensus_sde` (`sigma0`, `dim` = 1), `kuramoto` (`K`, `sigma0`).
pub fn builtin_model<T: Real>(name: &str, params: &Params) -> Result<BuiltinModel<T>> {
    let mut p = ParamReader {
        name,
        params,
        used: Vec::new(),
    };
    let model = match name {
        "voter" => BuiltinModel::Discrete(Box::new(Voter)),
        "noisy_majority" => {
            let eps = p.get("epsilon", None)?;
            let q = p.count("alphabet", 2)?;
            BuiltinModel::Discrete(Box::new(NoisyMajority::new(eps, q)?))
        }
        "consensus_sde" => {
            let s = p.get("sigma0", None)?;
            let d = p.count("dim", 1)?;
            BuiltinModel::Diffusion(Box::new(ConsensusSde::<T>::new(s, d)))
        }
        "kuramoto" => {
            let k = p.get("K", None)?;
            let s = p.get("sigma0", None)?;
            BuiltinModel::Diffusion(Box::new(Kuramoto::<T>::new(k, s)))
        }
        other => return Err(Error::invalid(format!("unknown model {other:?}"))),
    };
    p.finish()?;
    Ok(model)
}

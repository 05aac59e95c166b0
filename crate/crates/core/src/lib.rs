//! Interacting particle systems on sparse random graphs: graph generators,
//! rooted-ball isomorphism, unimodular Galton-Watson limit trees, Gibbs
//! measures, discrete and diffusive dynamics driven by counter-based noise,
//! and empirical-measure diagnostics.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below name the common instantiations.

pub mod dynamics;
pub mod empirical;
pub mod error;
pub mod experiments;
pub mod gibbs;
pub mod graphs;
pub mod limit_trees;
pub mod local_topology;
pub mod num;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use num::Real;
pub use rng::Seed;

/// Element of a finite alphabet, stored as its index.
pub type Symbol = u32;

pub type DegreeDistF64 = limit_trees::DegreeDist<f64>;
pub type DegreeDistF32 = limit_trees::DegreeDist<f32>;
pub type DualityReportF64 = limit_trees::DualityReport<f64>;
pub type DualityReportF32 = limit_trees::DualityReport<f32>;
pub type GibbsSpecF64 = gibbs::GibbsSpec<f64>;
pub type GibbsSpecF32 = gibbs::GibbsSpec<f32>;
pub type ExactGibbsF64 = gibbs::ExactGibbs<f64>;
pub type ExactGibbsF32 = gibbs::ExactGibbs<f32>;
pub type ConsensusSdeF64 = dynamics::ConsensusSde<f64>;
pub type ConsensusSdeF32 = dynamics::ConsensusSde<f32>;
pub type KuramotoF64 = dynamics::Kuramoto<f64>;
pub type KuramotoF32 = dynamics::Kuramoto<f32>;

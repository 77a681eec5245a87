//! Simulator and analytic engine for cooperative multi-point radar detection
//! in full-duplex joint-communication-and-sensing mmWave HetNets whose base
//! stations follow β-Ginibre layouts.
//!
//! The crate has two independent routes to every headline metric:
//! closed-form/bounded analytics (`analytic`) and a Monte Carlo trial engine
//! (`montecarlo`), cross-validated against each other. All numerics are
//! generic over the scalar type via [`num::Real`]; `f64` aliases for the
//! principal types live at the crate root.

pub mod analytic;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod num;
pub mod montecarlo;
pub mod point_process;
pub mod quad;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use num::Real;

/// Concrete f64 aliases for the principal types.
pub type GppParams64 = point_process::GppParams<f64>;
pub type PointSet64 = point_process::PointSet<f64>;
pub type ChannelParams64 = channel::ChannelParams<f64>;
pub type NetworkConfig64 = config::NetworkConfig<f64>;
pub type AnalyticResult64 = analytic::AnalyticResult<f64>;
pub type Estimate64 = montecarlo::Estimate<f64>;
pub type NetworkRealization64 = montecarlo::NetworkRealization<f64>;

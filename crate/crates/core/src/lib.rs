//! Device-to-circuit co-simulation of a capacitively driven low-swing global
//! interconnect whose receiver is a magnetoelectric MTJ.
//!
//! The numerical kernels (`magnetodynamics`, `memtj`, `interconnect`) are
//! generic over [`scalar::Scalar`] and run in `f32` or `f64`. The link
//! co-simulation and the Monte Carlo harness work in `f64`; the aliases
//! below name the `f64` instantiations used throughout.

// Negated comparisons are used on purpose so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod harness;
pub mod interconnect;
pub mod link_sim;
pub mod magnetodynamics;
pub mod memtj;
pub mod rng;
pub mod scalar;
pub mod vec3;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Vec3 = vec3::Vec3<f64>;
pub type MagnetParams = magnetodynamics::MagnetParams<f64>;
pub type Magnet = magnetodynamics::Magnet<f64>;
pub type SpinState = magnetodynamics::SpinState<f64>;
pub type DemagFactors = magnetodynamics::DemagFactors<f64>;
pub type Trajectory = magnetodynamics::Trajectory<f64>;
pub type MtjParams = memtj::MtjParams<f64>;
pub type MeCapacitor = memtj::MeCapacitor<f64>;
pub type WireParams = interconnect::WireParams<f64>;
pub type LinkElectrical = interconnect::LinkElectrical<f64>;
pub type RcNetwork = interconnect::RcNetwork<f64>;
pub type TransientResult = interconnect::TransientResult<f64>;
pub type RepeaterParams = interconnect::RepeaterParams<f64>;
pub type AmplifierParams = interconnect::AmplifierParams<f64>;
pub type BaselineResult = interconnect::BaselineResult<f64>;

/// Single-precision instantiations of the device kernels.
pub mod f32 {
    pub type Vec3 = crate::vec3::Vec3<f32>;
    pub type MagnetParams = crate::magnetodynamics::MagnetParams<f32>;
    pub type Magnet = crate::magnetodynamics::Magnet<f32>;
    pub type SpinState = crate::magnetodynamics::SpinState<f32>;
    pub type MtjParams = crate::memtj::MtjParams<f32>;
    pub type WireParams = crate::interconnect::WireParams<f32>;
}

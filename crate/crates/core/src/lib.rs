//! Exact simulation of entanglement mediated by a locally classical system
//! whose coupling to quantum matter is not locally tomographic.
//!
//! Three toy theories are modelled: parity-superselected fermions
//! ([`fermion_ssr`]), Ising-anyon fusion trees ([`ising_anyon`]) and
//! bit/anti-bit composites ([`bit_antibit`]). Each runs a mediation protocol
//! that only uses interactions local to `Q1 M` or `M Q2`, and [`witness`]
//! certifies the resulting matter state as entangled.

pub mod bit_antibit;
pub mod error;
pub mod fermion_ssr;
pub mod ising_anyon;
pub mod statecore;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
pub use statecore::{
    in_span, partial_trace, tensor, ComplexScalar, OperatorMatrix, SpanTest, StateVector, EPS,
};
pub use witness::{
    purity, schmidt_rank, uncorrelated_test, Composition, Correlation, LocalObservableSet,
    ModelTag, ProtocolStep, ProtocolTrace, WitnessReport,
};

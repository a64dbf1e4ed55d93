//! Jost solutions, resolvent kernels and normalized Wronskians for
//! one-dimensional differential operators
//! `H = i^{-N}∂^N + v_N∂^{N-1} + … + v_1` of arbitrary order, together with
//! numerical checks of the trace formula `Tr(R(z) − R₀(z)) = −Δ̇(z)/Δ(z)` and
//! of the identity `Det(I + VR₀(z)) = Δ(z)`.

pub mod cli;
pub mod coeffs;
pub mod error;
pub mod fundmat;
pub mod jost;
pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod resolvent;
pub mod roots;
pub mod verify;

pub use coeffs::{CoefficientSet, PresetSpec};
pub use error::{Error, Result};
pub use jost::{JostSolution, Side};
pub use linalg::C64;
pub use roots::{compute_roots, RootSystem};

//! Simulation of heralded micro-macro entangled optical states on a
//! truncated Fock space.
//!
//! The crate is organized bottom-up:
//!
//! * [`fock`]: states, operators, matrix exponentials, reductions and
//!   entanglement measures;
//! * [`factory`]: squeezed, displaced, cat, photon-subtracted and two-mode
//!   squeezed states plus beamsplitter unitaries;
//! * [`quadrature`]: oscillator wavefunctions, quadrature densities and the
//!   macroscopicity measures (mean separation `D`, discrimination rate `P`);
//! * [`protocols`]: the generation schemes, component balancing, remote
//!   heralded preparation and the qubit-to-qumode teleportation map.
//!
//! Quadratures follow `x = (a + a†)/√2` (vacuum variance 1/2) and the
//! squeezer `S(r) = exp((r/2)(a†² − a²))` stretches `x` for `r > 0`.

pub mod error;
pub mod factory;
pub mod fock;
pub mod policy;
pub mod protocols;
pub mod quadrature;

pub use error::{Error, Result};
pub use policy::NumericPolicy;

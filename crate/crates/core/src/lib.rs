//! Dirac operators on the 3-sphere with magnetic fields concentrated on links.
//!
//! The crate is organised bottom-up:
//!
//! - [`special_functions`]: Gamma, real-order modified Bessel functions and the
//!   weighted integrals `C_α = ∫₀^∞ K_α(r)² r dr`.
//! - [`link_geometry`]: curves on S³, Seifert/Darboux frames, tubular
//!   coordinates, linking numbers, phase jumps, submanifold distances and the
//!   Hopf fibration.
//! - [`model_operator`]: the flat Aharonov–Bohm Dirac operator on a tube,
//!   its deficiency elements and the two distinguished extensions.
//! - [`s2_dirac`]: positive spectrum of Dirac operators on the radius-½ sphere
//!   with a uniform field plus point fluxes at the poles.
//! - [`hopf_spectrum`]: spectra and kernel dimensions for magnetic Hopf links.
//! - [`report`]: job configuration, execution and deterministic JSON/CSV output.

pub mod error;
pub mod hopf_spectrum;
pub mod link_geometry;
pub mod model_operator;
pub mod quadrature;
pub mod report;
pub mod s2_dirac;
pub mod special_functions;

pub use error::{Error, Result};

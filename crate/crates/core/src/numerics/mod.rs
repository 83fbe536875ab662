//! Shared numerical machinery: adaptive quadrature, special functions, and
//! reproducible random streams.
//!
//! Everything downstream of this module evaluates semi-analytical
//! expressions through two primitives — [`quad::integrate`] for the
//! one-dimensional integrals that all coverage/rate/outage formulas reduce
//! to, and [`bessel::bessel_k`] for the real-order modified Bessel kernels
//! of the turbulence fading density. Monte Carlo oracles draw from
//! [`rng::RngStream`], whose (seed, stream) addressing keeps parallel
//! simulations bit-reproducible.

pub mod bessel;
pub mod quad;
pub mod rng;
pub mod special;

pub use bessel::bessel_k;
pub use quad::{integrate, integrate_finite, integrate_to_inf, Quadrature, QuadratureSpec, TailPolicy, UpperLimit};
pub use rng::RngStream;

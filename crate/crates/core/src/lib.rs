//! Simulation and semi-analytical toolkit for uplink cellular networks with
//! free-space-optical (FSO) backhauling.
//!
//! The crate models three layers of a hybrid RF/FSO access network and
//! cross-validates every closed-form expression against an independent
//! Monte Carlo oracle:
//!
//! * [`uplink`] — uplink SINR statistics under a Poisson point process with
//!   fractional power control: coverage probability and ergodic rate, both as
//!   numerical integrals and as seeded simulations over the distance models
//!   in [`geometry`].
//! * [`fso`] — the optical backhaul channel: Málaga turbulence fading,
//!   Beckmann pointing errors with their modified-Rayleigh approximation,
//!   deterministic path loss, and the SNR statistics (moments, CDF, ergodic
//!   rate with low/high-SNR expansions) of the combined link.
//! * [`hybrid`] and [`irs`] — the two backhauling architectures compared by
//!   the toolkit: a decode-and-forward relay (min-SINR composition, outage
//!   diversity) and an intelligent reflecting surface (zero-forcing phase
//!   optimization, spectral-efficiency scaling in the panel size).
//!
//! Shared numerical machinery lives in [`numerics`] (adaptive Gauss–Kronrod
//! quadrature, real-order modified Bessel functions, seeded reproducible
//! random streams) and [`stats`] (Wilson intervals, Kolmogorov–Smirnov
//! distances, log–log slope fits). Canonical parameter sets used by the
//! experiment CLI are collected in [`presets`].

pub mod error;
pub mod fso;
pub mod geometry;
pub mod hybrid;
pub mod irs;
pub mod presets;
pub mod numerics;
pub mod stats;
pub mod uplink;

pub use error::{Error, Result};

//! Free-space optical channel models.
//!
//! A backhaul link multiplies three independent irradiance factors: slow
//! atmospheric turbulence ([`malaga`]), beam misalignment between transmitter
//! and receiver aperture ([`pointing`]), and deterministic geometric plus
//! weather attenuation ([`pathloss`]). [`link`] composes the three into one
//! channel and carries the ergodic-rate, SNR-moment, and outage expressions
//! for both coherent and direct detection.

pub mod design;
pub mod link;
pub mod malaga;
pub mod pathloss;
pub mod pointing;

pub use link::{Detection, FsoLink};
pub use malaga::MalagaChannel;
pub use pointing::PointingError;

//! Squared H⁻¹ norm of the constant function on ε-tubes around plane curves.
//!
//! The crate computes `‖1‖²_{H⁻¹(T_εγ)}` by a mapped solve in tube
//! coordinates, resolves the end-cap constant of open curves with a
//! finite-element solve on the capped half-strip, and fits the small-ε
//! development `(2/3)ℓε³ + 2αε⁴ + (2/45)ε⁵∫κ² + O(ε⁶)`.

pub mod asymptotics;
pub mod curve;
pub mod end_cap;
pub mod error;
pub mod io;
pub mod mapped;
pub mod numerics;
pub mod system;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use curve::{Curve, CurveKind, FrameSample, Point, Radius};
pub use error::{Error, Result};

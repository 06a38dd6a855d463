//! Exact-arithmetic laboratory for left-c.e. reals.
//!
//! * [`numerics`]: rationals, dyadic strings, truncation.
//! * [`approximations`]: left-c.e. reals as monotone approximations with an
//!   oracle limit, and the built-in gallery.
//! * [`reducibility`]: (total, weakened) Solovay witnesses and their checker.
//! * [`hyperimmunity`]: principal and gap functions, majorizers, and the
//!   witness/gap-bound conversions for set reals.
//! * [`speedability`]: speed-up functions, ratio traces, translation
//!   functions and total speed-up checks.
//! * [`machines`]: finite prefix-free machines and the pad construction.

pub mod approximations;
pub mod error;
pub mod hyperimmunity;
pub mod machines;
pub mod numerics;
pub mod reducibility;
pub mod report;
pub mod speedability;

pub use error::{LabError, Result};
pub use numerics::Rational;

#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Recurrence spectra for expanding Markov interval maps.
//!
//! The crate is organised bottom-up:
//!
//! - [`symbolic`]: words, subshifts of finite type, repetition and return times,
//!   induced (first-return) alphabets and hole removal.
//! - [`perron`]: Perron–Frobenius eigendata of sparse nonnegative matrices.
//! - [`insertion`]: prescribed-growth sequences and the marker insertion map whose
//!   images have an exactly prescribed repetition-time sequence.
//! - [`thermo`]: pressure, equilibrium states, Bowen dimension and pressure of
//!   open systems.
//! - [`geometry`]: piecewise expanding Markov maps, coding, orbits and return times.
//! - [`spectrum`]: the end-to-end construction of points with prescribed lower
//!   and upper recurrence rates, and the accompanying experiments.

pub mod error;
pub mod geometry;
pub mod insertion;
pub mod perron;
pub mod spectrum;
pub mod symbolic;
pub mod thermo;

pub use error::{Error, Result};

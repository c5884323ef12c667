//! Exact and numerical tools for the three-map linear-fractional IFS
//! `{x/(4x+4), x/4, x/4 + t/2}` on `[0, 2t/3]`, in which two maps share the
//! fixed point 0.
//!
//! * [`moebius`]: exact 2x2 rational matrices, linear-fractional maps, the family.
//! * [`words`]: words, cylinders, lexicographic order, derived subsystems.
//! * [`pressure`]: partition sums, level dimensions `d_n`, distortion, brackets.
//! * [`separation`]: exact overlap and relation search, freeness certificates,
//!   separation and Diophantine metrics.
//! * [`geometry`]: cylinder order relations and the disjointness lemmas.
//! * [`attractor`]: box counting and natural-measure statistics.

pub mod attractor;
pub mod error;
pub mod geometry;
pub mod moebius;
pub mod pressure;
pub mod rational;
pub mod separation;
pub mod words;

pub use error::{Error, Result};
pub use moebius::{make_family, IfsInstance, Interval, Matrix2, MoebiusMap};
pub use rational::Rational;
pub use words::Word;

/// Default cap on enumeration depth (`3^12 = 531441` words).
pub const DEFAULT_MAX_LEVEL: usize = 12;

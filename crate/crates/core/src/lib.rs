//! Credit rating engine built on a signed-log Z-score, L-moment Pearson
//! type 3 fits, and a seven-grade equi-probability index.
//!
//! The flow mirrors a batch rating run: ratios are transformed
//! ([`transform`]), weighted by a two-group discriminant ([`discriminant`]),
//! fitted per industry ([`lmom`], [`pearson3`]) and graded ([`pipeline`]).
//! [`evaluate`] holds the classification and model-comparison statistics.

pub mod discriminant;
pub mod error;
pub mod evaluate;
pub mod lmom;
pub mod pearson3;
pub mod pipeline;
pub mod synth;
pub mod toy;
pub mod transform;

pub use error::{Error, Result};

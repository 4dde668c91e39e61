//! Quantitative rapid decay for concrete finitely generated groups.
//!
//! * [`groups`]: group laws, word lengths, ball enumeration, embeddings.
//! * [`algebra`]: finitely supported functions on a group and their
//!   convolution, adjoints, norms and annulus decomposition.
//! * [`norms`]: operator-norm brackets for left convolution on `ℓ²Γ`.
//! * [`rd`]: witness ratio series, exponent fits, the inequalities around
//!   the `(RD^s)` properties and the `Z_r(α)` series.

// Parameter checks like `!(x > 0.0)` are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod groups;
pub mod norms;
pub mod rd;

pub use error::{Error, Result};

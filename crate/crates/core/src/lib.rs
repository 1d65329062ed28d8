//! Exact computations with hyperplanes `W_f` of the space `c` of convergent
//! sequences: classification, fixed-point-free maps on weak-star compact
//! convex sets of `ℓ₁`, basis extraction, quotients and projections.

pub mod batch;
pub mod citations;
pub mod cli;
pub mod error;
pub mod extraction;
pub mod fixtures;
pub mod hyperplane;
pub mod quotientproj;
pub mod rational;
pub mod sample;
pub mod seq;
pub mod witness;

pub use error::{Error, Result};
pub use hyperplane::{Classification, Tri, WfSpace};
pub use rational::Rational;
pub use seq::{CSeq, L1Seq, Progression, Subsequence};

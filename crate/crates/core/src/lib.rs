//! N-th terms of linear recurrences over prime fields.
//!
//! Three algorithms share one polynomial substrate:
//!
//! * [`seqterm::nth_term_naive`] iterates the recurrence directly;
//! * [`seqterm::nth_term_fiduccia`] computes `x^D mod P` by repeated squaring;
//! * [`seqterm::nth_term_factored`] splits `P` into squarefree powers
//!   `Q^m`, builds `x^D` in the bivariate presentation
//!   `K[y,x]/<Q(y), (x-y)^m>` where it has a closed form, converts back
//!   ("tangles") with a randomized projection method, and recombines the
//!   pieces by Chinese remaindering.
//!
//! Every scalar operation goes through a [`FieldCtx`], which can tally
//! multiplications and inversions to compare the algorithms' costs.

pub mod bivar;
pub mod dense;
pub mod error;
pub mod factor;
pub mod field;
pub mod par;
pub mod poly;
pub mod selftest;
pub mod seqterm;

pub use error::{Error, FastPathReason, Result};
pub use field::{BigIndex, FieldCtx, Fp, OpCounts};
pub use poly::DensePoly;
pub use seqterm::{AlgoTag, Recurrence};

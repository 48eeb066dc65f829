//! Allocating indivisible goods among agents with one shared subadditive
//! valuation so that the generalized-mean (p-mean) welfare is within a factor
//! 40 of optimal for every `p` in `(-inf, 1]` at once.
//!
//! The pieces:
//!
//! * [`valuations`]: value and demand queries for additive, budget-additive,
//!   XOS and explicit-table valuations;
//! * [`means`]: generalized means and the p-mean welfare of an allocation;
//! * [`swmax`]: the pluggable social-welfare subroutine;
//! * [`allocator`]: the two-phase algorithm;
//! * [`oracle`]: brute-force optima for checking it on small instances;
//! * [`analysis`]: grid checks of the scalar inequalities the guarantee uses;
//! * [`hardness`]: the 3-dimensional-matching gadget behind the hardness result.
//!
//! ```
//! use pmean::{alg, p_opt_brute, Exponent, Instance, SwBackend, Valuation};
//!
//! let inst = Instance::new(2, Valuation::additive(vec![10.0, 1.0, 1.0, 1.0])?)?;
//! let (alloc, _) = alg(&inst, SwBackend::exact())?;
//! let values = alloc.bundle_values(&inst.valuation);
//! let opt = p_opt_brute(&inst, Exponent::NegInfinity, 1_000)?;
//! assert!(pmean::means::p_mean(&values, Exponent::NegInfinity)? >= opt.welfare / 40.0);
//! # Ok::<(), pmean::Error>(())
//! ```

#![forbid(unsafe_code)]

pub mod allocator;
pub mod analysis;
mod error;
pub mod hardness;
pub mod instance;
pub mod means;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod swmax;
pub mod valuations;

pub use allocator::{alg, alg_low, AlgTrace};
pub use error::{Error, Result};
pub use instance::Instance;
pub use means::{p_mean, p_mean_welfare, Allocation, Exponent};
pub use oracle::{p_opt_brute, OptResult};
pub use swmax::{sw_estimate, SwBackend, SwEstimate};
pub use valuations::{GoodSet, Valuation};

/// Absolute slack for every welfare comparison and algorithm threshold.
pub const EPS: f64 = 1e-9;

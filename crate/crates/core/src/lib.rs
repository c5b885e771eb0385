//! Discrete generalized Pareto (DGP) and discrete Lomax (DLo) count
//! distributions.
//!
//! A DGP variable with shape `alpha`, scale `lambda` and integer location
//! `mu` has survival function `Pr(X >= x) = [1 + lambda (x - mu)]^(-alpha)`
//! for `x >= mu`; the discrete Lomax law is the case `mu = 0`.
//!
//! ```
//! use discrete_pareto::distribution::DgpParams;
//!
//! let d = DgpParams::new(2.0, 0.5, 3)?;
//! assert!((d.pmf(3) - 5.0 / 9.0).abs() < 1e-15);
//! assert_eq!(d.quantile(0.5)?, 3);
//! # Ok::<(), discrete_pareto::Error>(())
//! ```

// `!(x > 0.0)` guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod data;
pub mod distribution;
pub mod error;
pub mod estimation;
pub mod gof;
pub mod reproduce;
pub mod special;

pub use data::{bundled, FrequencyTable};
pub use distribution::{DgpParams, Moment, MomentSpec, SampleSeed};
pub use error::{Error, Result};
pub use estimation::{fit_mle, FitResult, Model};

//! Win-probability based player impact estimation.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`pbp`] parses play-by-play event files, reconstructs lineups and cuts
//!    each game into shifts (intervals with ten fixed players).
//! 2. [`wpgrid`] estimates the home win probability `p(T, L)` after `T`
//!    elapsed seconds with lead `L` by windowed Beta-Binomial smoothing.
//! 3. [`pbp::build_dataset`] turns every shift into a signed-indicator row
//!    whose response is the change in home win probability.
//! 4. [`blasso`] fits the Bayesian lasso regression by Gibbs sampling.
//! 5. [`metrics`] and [`diagnostics`] summarise the retained draws.
//!
//! [`simgen`] produces synthetic seasons with known effects for end-to-end
//! checks, and [`io`] holds the CSV readers and writers for every artifact.

pub mod blasso;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod metrics;
pub mod pbp;
pub mod seed;
pub mod simgen;
pub mod wpgrid;

pub use error::{Error, Result};

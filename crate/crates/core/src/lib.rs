//! Numerical toolkit for meromorphically convex and inverse-convex
//! functions of order alpha on the unit disk.

pub mod classify;
pub mod error;
pub mod factor;
pub mod funcat;
pub mod jet;
mod ode;
mod optimize;
pub mod palpha;
pub mod radius;
pub mod schwarz;
pub mod theorems;

pub use classify::{DiskSampler, Family, FamilyVerdict};
pub use error::{Error, Result};
pub use funcat::{FunctionExpr, Mobius};
pub use jet::Jet3;
pub use ode::StepStats;
pub use palpha::{OdeSolution, PalphaVerdict, QFunction};

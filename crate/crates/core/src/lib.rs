//! Approximate Hermite-Hadamard inequalities for functions that are
//! approximately convex with respect to a Chebyshev system.

pub mod cheb;
pub mod classic;
pub mod cli;
pub mod config;
pub mod errmodel;
pub mod error;
pub mod func;
pub mod lower;
pub mod meansys;
pub mod measure;
pub mod quad;
pub mod report;
pub mod residual;
pub mod upper;
pub mod verify;

pub use cheb::{ChebyshevSystem, SystemSpec};
pub use errmodel::{ErrorModel, ErrorSpec, PowerMeasure2, PowerMeasure3};
pub use error::{HhError, Result};
pub use func::{FunctionSpec, Interval, RealFunction};
pub use meansys::MeanSystem;
pub use measure::{MeasureSpec, UnitMeasure};
pub use quad::QuadratureConfig;
pub use report::BoundReport;

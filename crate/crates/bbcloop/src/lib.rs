//! Control-loop characterization toolkit for a bidirectional buck-boost
//! converter: averaged plant models, PID compensators with filtered
//! derivative, bilinear discretization, step/bode/pole-zero analysis, and a
//! nonlinear averaged-model simulator that cross-checks the linear results.

pub mod analysis;
pub mod controller;
pub mod error;
pub mod exec;
pub mod lti;
pub mod plant;
pub mod poly;
pub mod reference;
pub mod simloop;

pub use error::{Error, Result};
pub use num_complex::Complex64;

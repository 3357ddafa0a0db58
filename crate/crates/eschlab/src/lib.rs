//! Numerical laboratory for the Cahn-Hilliard equation on evolving 1D
//! intervals and axisymmetric surfaces of revolution, together with the
//! sharp-interface companion problems obtained in the thin-interface limit.

pub mod config;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod presets;
pub mod report;
pub mod sharp;
pub mod solver;

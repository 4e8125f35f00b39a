//! Randomized, time-parallel reduced basis generation for time-dependent
//! advection-diffusion-reaction problems.
//!
//! The crate discretizes a parabolic PDE on a structured quadrilateral grid
//! with bilinear elements and implicit Euler in time, then builds reduced
//! approximation spaces three ways:
//!
//! * optimal local-in-time spaces from the SVD of a materialized transfer
//!   operator ([`transfer`]),
//! * randomized spaces from many short local solves with random initial
//!   conditions, started at time points drawn from data-dependent sampling
//!   distributions ([`rbgen`], [`sampling`]),
//! * a sequential POD baseline.
//!
//! The resulting bases drive a Galerkin reduced-order model ([`rom`]) and a
//! config-driven experiment harness ([`experiment`]) that aggregates errors
//! over many seeds into quantile tables.

pub mod experiment;
pub mod grid_fem;
pub mod linalg;
pub mod problems;
pub mod rbgen;
pub mod rom;
pub mod sampling;
pub mod timestep;
pub mod transfer;

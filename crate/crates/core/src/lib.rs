//! Numerical toolkit for the degenerate logistic equation
//! `u_t − Δu = λu − n(t,x) u^ρ` on a bounded domain with Dirichlet data,
//! where `n` vanishes on a moving set `K(t)`.
//!
//! * [`geometry`]: domains, shapes, moving sets and the coefficient `n`.
//! * [`grid`]: masked finite-difference grids, fields and SPD solves.
//! * [`spectral`]: principal eigenpairs and the characteristic value `λ₀`.
//! * [`evolve`]: the positivity-preserving semi-implicit time stepper.
//! * [`oracles`]: closed-form and ODE reference solutions.
//! * [`scenarios`]: the registry, hypothesis checks, classification.
//! * [`io`]: scenario files, CSV trajectories and PGM snapshots.
//! * [`suite`]: the acceptance suites behind `degenlog suite`.

// `!(x > 0.0)` guards are how NaN gets rejected alongside out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolve;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod oracles;
pub mod scenarios;
pub mod spectral;
pub mod suite;

pub use error::{ConfigError, Error, Result};

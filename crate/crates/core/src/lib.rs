//! Light-cone lattice solver for the 1+1 dimensional
//! Maxwell–Dirac–Thirring–Gross–Neveu system, together with executable checks
//! of the conservation laws, norm identities and a priori estimates the
//! solution theory rests on.
//!
//! The spinor `ψ = (u, v)` is advanced along characteristics on a grid with
//! `dt == dx`, so free transport is an exact index shift. Potentials come from
//! d'Alembert's formula and are rebuilt from the charge densities.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conservation;
pub mod dirac;
pub mod error;
pub mod estimates;
pub mod gauge;
pub mod lattice;
pub mod maxwell;
pub mod norms;
pub mod quad;
pub mod report;
pub mod study;

pub use error::{Error, Result};
pub use lattice::{
    build_grid, sample_function, sample_real, transport_shift, Direction, EmHistory, FieldData, FunctionSpec,
    GridFunction, LightConeGrid, Slab, SpinorHistory,
};
pub use report::CheckReport;

pub use num_complex::Complex64;

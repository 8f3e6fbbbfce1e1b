//! Shock formation in dissipative regularizations of the transport equation
//!
//! `u_t + a(u) u_x = eps [ b(u) u_xx + c(u) u_x^2 ]`
//!
//! The crate covers the inviscid picture (characteristics, the gradient
//! catastrophe and its local cubic model), the universal Pearcey profile
//! that describes the viscous solution near the catastrophe, a semi-implicit
//! finite-difference solver for the viscous equation, and a Rankine-Hugoniot
//! shock-front tracer. The `cli` module wires these into reproducible
//! experiments that write CSV files.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotic;
#[cfg(feature = "cli")]
pub mod cli;
pub mod expr;
pub mod inviscid;
pub mod model;
pub mod numerics;
pub mod pearcey;
pub mod shockfront;
pub mod viscous;

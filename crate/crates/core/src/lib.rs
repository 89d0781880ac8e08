//! Paired-Explicit Runge-Kutta (P-ERK) multirate time integration toolkit.
//!
//! This crate builds fourth-order (and second-order) P-ERK scheme families:
//! it optimizes stability polynomials against eigenvalue spectra via bisection
//! over the timestep wrapped around a second-order-cone feasibility solve,
//! assembles the resulting Butcher tableau families, verifies their order,
//! coupling, and consistency conditions numerically, and integrates
//! partitioned model problems with per-level stage activation.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats, and the CLI
//! live in the companion `perk-tools` crate.
//!
//! Module map:
//! - [`linalg`]: dense linear solves and nonsymmetric eigenvalues (Hessenberg QR)
//! - [`spectra`]: eigenvalue spectra of semidiscretizations, the optimization target
//! - [`stabpoly`]: stability polynomials in monomial and P-ERK-constrained form,
//!   internal stability and amplification factors
//! - [`optimizer`]: maximum stable timestep via bisection + cone feasibility
//! - [`butcher`]: tableau/family assembly and order-condition verification
//! - [`integrator`]: partitioned low-storage stepping, fully discrete propagators
//! - [`problems`]: built-in model problems (upwind advection, Lotka-Volterra)
//! - [`harness`]: error norms and convergence (EOC) studies

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod butcher;
pub mod harness;
pub mod integrator;
pub mod linalg;
pub mod optimizer;
pub mod problems;
pub mod spectra;
pub mod stabpoly;

pub use num_complex::Complex64;

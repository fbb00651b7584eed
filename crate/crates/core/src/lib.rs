//! Cylindrical tensor calculus and numerical experiments for the ideal
//! Hall-MHD system with an azimuthal magnetic field.
//!
//! The crate has two halves that share nothing but vocabulary:
//!
//! * [`symexpr`] and [`cyltensor`] form an exact symbolic layer. Derivative
//!   tensor components in cylindrical coordinates are generated by the
//!   covariant recursion and compared term-for-term against closed forms and
//!   commutator expansions.
//! * [`grid`], [`solver`] and [`diagnostics`] discretize the axisymmetric
//!   reduction on an annulus `r0 <= r <= r1`, periodic in `z`, and measure the
//!   conserved quantities and the Burgers-type gradient blow-up.
//!
//! [`run`] ties the numerical half to files on disk (configs, snapshots,
//! diagnostics CSV, manifests) and is what the command line tool drives.

pub mod cyltensor;
pub mod diagnostics;
pub mod grid;
pub mod run;
pub mod solver;
pub mod symexpr;

/// Version string recorded in reports and run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Derivative tensors of scalar and vector fields in cylindrical
//! coordinates, built by the covariant recursion and checked exhaustively
//! against their closed forms.

mod checks;
mod commutator;
mod frame;
mod linsolve;
mod remark;
mod tensor;

use thiserror::Error;

use crate::symexpr::SymError;

pub use checks::{
    check_closed_form, check_odd_vanish, check_permutation_invariance, check_vector_components,
    commutator_tables, verify, CommutatorTable, ComponentVerdict, Counterexample, IdentityReport,
    Status, VerificationReport, VerifyOptions,
};
pub use commutator::{
    commutator_dz, commutator_transport, expand_commutator_dz, expand_commutator_transport,
    BasisFamily, CommutatorExpansion, ExtractedCoefficient,
};
pub use frame::{odd_double_factorial, FrameIndex, IndexList, MultiIndexL, MultiIndexM};
pub use linsolve::{solve as solve_linear, LinearFit};
pub use remark::{
    check_remark_m1, d_x1, d_x2, is_null_integral, remark_single_term, remark_term, RemarkReport,
    SingleTerm, TrigExpr, Verdict,
};
pub use tensor::{
    axisymmetric_gradient, christoffel, closed_form, compound_derivative, nabla_component,
    to_unit_frame, vector_component, Connection, NablaTable, VectorTable,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CylError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{identity} mismatch at {index}: got {got}, expected {expected}")]
    Mismatch {
        identity: String,
        index: String,
        got: String,
        expected: String,
    },
    #[error("{identity} at M = {index} leaves residual {residual}")]
    Residual {
        identity: String,
        index: String,
        residual: String,
    },
    #[error("{identity} at M = {index}: coefficient of {label} is {value}, not an integer")]
    NonInteger {
        identity: String,
        index: String,
        label: String,
        value: String,
    },
    #[error(transparent)]
    Sym(#[from] SymError),
}

//! Numerical evaluator and verifier for the explicit model foliations:
//! bump profiles, the standard and thick-Reeb form triples, the shear and
//! slide slabs, stacking/transpose/inversion combinators, grid checks
//! (transversality, integrability residual, slope bound, boundary gluing)
//! and the rotation oracle that referees the symbolic ledger.

pub mod bumps;
pub mod checks;
pub mod models;
pub mod oracle;

pub use checks::{
    almost_horizontal_check, boundary_gluing_check, frobenius_check, transversality_check,
    CheckItem, CheckReport, GridSpec, Region,
};
pub use models::{balanced_compose, model_for_block, model_for_word, FormModel, P3};
pub use oracle::{rotation_oracle, rotation_oracle_all, OracleError};

/// Evaluates the three coefficient rows at one point (rows are the forms'
/// `(dt, dx, dy)` coefficients).
pub fn eval_forms(model: &FormModel, point: P3) -> [[f64; 3]; 3] {
    model.rows(point)
}

pub mod suite;
pub use suite::{concordance_check, ledger_for_word, oracle_check, resolve_pending_blocks, standard_suite};

//! Least-squares equalization of the polyphase observation.

use num_complex::Complex64;
use thiserror::Error;

use crate::polyphase::{MixingEstimate, PolyphaseObservation};

#[derive(Debug, Error)]
pub enum EqualizeError {
    #[error("mixing matrix is numerically singular (condition {0:.3e})")]
    Singular(f64),
    #[error("dimension mismatch: matrix has {rows} rows, observation has {phases} phases")]
    DimensionMismatch { rows: usize, phases: usize },
}

const MAX_CONDITION: f64 = 1e10;

/// Apply the pseudo-inverse of the mixing matrix: one output stream per
/// matrix column.
pub fn ls_equalize(
    mixing: &MixingEstimate,
    obs: &PolyphaseObservation,
) -> Result<Vec<Vec<Complex64>>, EqualizeError> {
    let a = &mixing.matrix;
    if a.nrows() != obs.n_phases() {
        return Err(EqualizeError::DimensionMismatch {
            rows: a.nrows(),
            phases: obs.n_phases(),
        });
    }
    if !mixing.condition_number.is_finite() || mixing.condition_number > MAX_CONDITION {
        return Err(EqualizeError::Singular(mixing.condition_number));
    }
    let gram = a.adjoint() * a;
    let rhs = a.adjoint() * obs.as_matrix();
    let solved = gram
        .lu()
        .solve(&rhs)
        .ok_or(EqualizeError::Singular(mixing.condition_number))?;
    let n = solved.nrows();
    Ok((0..n)
        .map(|k| solved.row(k).iter().copied().collect())
        .collect())
}

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{hermitian_eigenvalues, partial_transpose, ComplexMatrix, PSD_SLACK};
use crate::shape::SystemShape;
use crate::states::StateRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    pub cut: Vec<usize>,
    pub min_eigenvalue: f64,
    pub passed: bool,
}

/// `{0}, {1}, …, {k−1}`
pub fn single_party_cuts(shape: &SystemShape) -> Vec<Vec<usize>> {
    (0..shape.k()).map(|p| vec![p]).collect()
}

/// Ascending spectrum of the partial transpose over `cut`.
pub fn pt_spectrum(
    rho_full: &ComplexMatrix,
    shape: &SystemShape,
    cut: &[usize],
) -> Result<Vec<f64>> {
    hermitian_eigenvalues(&partial_transpose(rho_full, shape, cut)?)
}

pub fn passes(spectrum: &[f64]) -> bool {
    let min = spectrum.first().copied().unwrap_or(0.0);
    let max = spectrum.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    min >= -PSD_SLACK * max.max(1.0)
}

pub(crate) fn check_cuts(
    rho_full: &ComplexMatrix,
    shape: &SystemShape,
    cuts: &[Vec<usize>],
) -> Result<Vec<CutResult>> {
    cuts.iter()
        .map(|cut| {
            let spectrum = pt_spectrum(rho_full, shape, cut)?;
            Ok(CutResult {
                cut: cut.clone(),
                min_eigenvalue: spectrum.first().copied().unwrap_or(0.0),
                passed: passes(&spectrum),
            })
        })
        .collect()
}

/// Minimum partial-transpose eigenvalue per cut. `None` checks every
/// single-party cut.
pub fn ppt_check(state: &StateRecord, cuts: Option<&[Vec<usize>]>) -> Result<Vec<CutResult>> {
    let rho = state.full_matrix()?;
    match cuts {
        Some(cuts) => check_cuts(&rho, &state.shape, cuts),
        None => check_cuts(&rho, &state.shape, &single_party_cuts(&state.shape)),
    }
}

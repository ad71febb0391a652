//! Computable cross-norm / realignment criterion across a bipartition.

use crate::error::Result;
use crate::linalg::{trace_norm, ComplexMatrix};
use crate::shape::SystemShape;
use crate::states::StateRecord;

/// CCNR values above `1 + CCNR_TOL` certify entanglement.
pub const CCNR_TOL: f64 = 1e-8;

fn group_index(shape: &SystemShape, parties: &[usize]) -> Vec<usize> {
    (0..shape.full_dim())
        .map(|i| {
            let d = shape.digits(i);
            parties.iter().fold(0, |acc, &p| acc * shape.n() + d[p])
        })
        .collect()
}

/// `R[(s,s'),(t,t')] = ρ[(s,t),(s',t')]` for the party set `cut` (s) and its
/// complement (t).
pub fn realign(
    rho_full: &ComplexMatrix,
    shape: &SystemShape,
    cut: &[usize],
) -> Result<ComplexMatrix> {
    let s_parties = shape.check_parties(cut)?;
    let t_parties: Vec<usize> = (0..shape.k()).filter(|p| !s_parties.contains(p)).collect();
    let dim_s = shape.n().pow(s_parties.len() as u32);
    let dim_t = shape.n().pow(t_parties.len() as u32);
    let s_idx = group_index(shape, &s_parties);
    let t_idx = group_index(shape, &t_parties);
    let mut out = ComplexMatrix::zeros(dim_s * dim_s, dim_t * dim_t);
    for i in 0..shape.full_dim() {
        for j in 0..shape.full_dim() {
            out[(s_idx[i] * dim_s + s_idx[j], t_idx[i] * dim_t + t_idx[j])] = rho_full[(i, j)];
        }
    }
    Ok(out)
}

/// Trace norm of the realigned density matrix.
pub fn ccnr_value(state: &StateRecord, cut: &[usize]) -> Result<f64> {
    let rho = state.full_matrix()?;
    trace_norm(&realign(&rho, &state.shape, cut)?)
}

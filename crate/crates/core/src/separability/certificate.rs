//! Explicit separable decompositions `ρ = Σ p_i (|f_i⟩⟨f_i|)^⊗k`.

use crate::bosonic::SymmetricIsometry;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, range_basis, rank_of_spectrum, subtract_in_range, tensor_power,
    ComplexMatrix, C64, RANK_TOL,
};
use crate::rng::Seed;
use crate::shape::SystemShape;
use crate::states::StateRecord;

use super::search::{SearchConfig, SymmetricRange};
use super::simultaneous::spectral_candidates;
use super::{classify, Verdict};

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateTerm {
    pub weight: f64,
    /// Unit vector in `C^n`.
    pub vector: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub shape: SystemShape,
    pub terms: Vec<CertificateTerm>,
    /// Trace distance between the reconstruction and the target state.
    pub trace_distance: f64,
}

impl Certificate {
    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// `Σ p_i (|f_i⟩⟨f_i|)^⊗k` in the full product basis.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.shape.full_dim();
        let mut rho = ComplexMatrix::zeros(dim, dim);
        for t in &self.terms {
            rho.add_projector(t.weight, &tensor_power(&t.vector, self.shape.k()));
        }
        rho
    }

    fn reconstruct_symmetric(&self, iso: &SymmetricIsometry) -> ComplexMatrix {
        let dim = self.shape.sym_dim();
        let mut rho = ComplexMatrix::zeros(dim, dim);
        for t in &self.terms {
            rho.add_projector(
                t.weight,
                &iso.compress_vector(&tensor_power(&t.vector, self.shape.k())),
            );
        }
        rho
    }

    /// `½‖Σ p_i (|f_i⟩⟨f_i|)^⊗k − ρ‖_1`
    pub fn trace_distance_to(&self, state: &StateRecord) -> Result<f64> {
        let iso = state.isometry()?;
        let target = state.symmetric_matrix()?;
        trace_distance(&self.reconstruct_symmetric(&iso), &target)
    }
}

pub(crate) fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let diff = (a - b).hermitian_part();
    Ok(0.5
        * hermitian_eigenvalues(&diff)?
            .iter()
            .map(|l| l.abs())
            .sum::<f64>())
}

#[derive(Clone, Copy, Debug)]
pub struct ExtractionConfig {
    pub search: SearchConfig,
    pub seed: Seed,
    /// Attempt extraction even when the classifier does not report `Separable`.
    pub force: bool,
    /// Stop once the undecomposed trace falls below this.
    pub residual_tol: f64,
    /// Seed the greedy loop with simultaneous-diagonalization candidates.
    pub spectral_candidates: bool,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            search: SearchConfig::default(),
            seed: Seed::new(0, 0),
            force: false,
            residual_tol: 1e-9,
            spectral_candidates: true,
        }
    }
}

/// Greedily peel symmetric product terms off `state`.
///
/// Each step finds `|f⟩^⊗k` in the range of the remainder, subtracts the
/// largest multiple that keeps it PSD, and continues until nothing is left.
/// The rank drops by exactly one per term. [`Error::ExtractionFailed`] means
/// the search found no product vector at some step; it does not show the
/// state is entangled.
pub fn extract_certificate(state: &StateRecord, config: &ExtractionConfig) -> Result<Certificate> {
    if !config.force {
        let report = classify(state);
        if report.verdict != Verdict::Separable {
            return Err(Error::Precondition(format!(
                "classifier verdict is {}; extraction requires Separable (use force to override)",
                report.summary()
            )));
        }
    } else {
        state.validate()?;
    }
    let shape = state.shape;
    let iso = state.isometry()?;
    let target = state.symmetric_matrix()?;
    let mut residual = target.clone();
    let initial_rank = rank_of_spectrum(&hermitian_eigenvalues(&residual)?, RANK_TOL);

    let candidates = if config.spectral_candidates {
        spectral_candidates(
            &state.full_matrix()?,
            &shape,
            initial_rank,
            config.seed.child(u64::MAX),
        )
    } else {
        Vec::new()
    };
    let mut used = vec![false; candidates.len()];
    let accept = 1.0 - config.search.accept_tol;

    let mut raw: Vec<CertificateTerm> = Vec::new();
    loop {
        let basis = range_basis(&residual, RANK_TOL)?;
        if basis.is_empty() || residual.trace().re < config.residual_tol {
            break;
        }
        let step = raw.len();
        if step >= initial_rank {
            // every accepted term lowers the rank by one
            return Err(Error::NumericalFailure(format!(
                "remainder still has rank {} after {step} terms",
                basis.len()
            )));
        }
        let mut q = ComplexMatrix::zeros(shape.sym_dim(), shape.sym_dim());
        for (_, v) in &basis {
            q.add_projector(1.0, v);
        }
        let range = SymmetricRange { iso: &iso, q };

        let mut hit = None;
        for (i, cand) in candidates.iter().enumerate() {
            if used[i] {
                continue;
            }
            let polished = range.polish(cand, &config.search);
            if polished.overlap >= accept {
                used[i] = true;
                hit = Some(polished);
                break;
            }
        }
        let hit = match hit {
            Some(h) => h,
            None => {
                let best = range.search(config.seed.child(step as u64), &config.search);
                if best.overlap < accept {
                    return Err(Error::ExtractionFailed {
                        step,
                        best_overlap: best.overlap,
                    });
                }
                best
            }
        };
        let v = iso.compress_vector(&tensor_power(&hit.vector, shape.k()));
        let v = crate::linalg::normalized(&v).expect("product power is nonzero");
        let sub = subtract_in_range(&residual, &v)?;
        residual = sub.residual;
        raw.push(CertificateTerm {
            weight: sub.weight,
            vector: hit.vector,
        });
    }

    let total: f64 = raw.iter().map(|t| t.weight).sum();
    if raw.is_empty() || total <= 0.0 {
        return Err(Error::ExtractionFailed {
            step: 0,
            best_overlap: 0.0,
        });
    }
    let terms = raw
        .into_iter()
        .map(|t| CertificateTerm {
            weight: t.weight / total,
            vector: t.vector,
        })
        .collect();
    let mut cert = Certificate {
        shape,
        terms,
        trace_distance: 0.0,
    };
    cert.trace_distance = trace_distance(&cert.reconstruct_symmetric(&iso), &target)?;
    Ok(cert)
}

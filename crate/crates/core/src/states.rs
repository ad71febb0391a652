//! Named and random bosonic states.

use serde::{Deserialize, Serialize};

use crate::bosonic::{OccupationVector, SymmetricIsometry, SUPPORT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, norm, tensor_power, ComplexMatrix, C64, PSD_SLACK};
use crate::rng::{random_unit_vector, uniform_simplex, Seed};
use crate::separability::{Certificate, CertificateTerm};
use crate::shape::SystemShape;

/// Largest number of terms `random_separable_mixture` accepts.
pub const MAX_MIXTURE_TERMS: usize = 100_000;

const TRACE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `n^k × n^k` product basis.
    Full,
    /// `I^k_n × I^k_n` Dicke-basis coordinates.
    Symmetric,
}

/// A density matrix together with its system shape and origin.
#[derive(Clone, Debug)]
pub struct StateRecord {
    pub shape: SystemShape,
    pub basis: Basis,
    pub matrix: ComplexMatrix,
    pub provenance: String,
}

impl StateRecord {
    /// Wraps a matrix after checking its dimensions. Physical invariants are
    /// checked separately by [`StateRecord::validate`].
    pub fn new(
        shape: SystemShape,
        basis: Basis,
        matrix: ComplexMatrix,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let dim = match basis {
            Basis::Full => shape.full_dim(),
            Basis::Symmetric => shape.sym_dim(),
        };
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::ShapeError(format!(
                "{basis:?} basis for n={}, k={} needs {dim}x{dim}, got {}x{}",
                shape.n(),
                shape.k(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(StateRecord {
            shape,
            basis,
            matrix,
            provenance: provenance.into(),
        })
    }

    /// Hermitian, unit trace, PSD, and supported on the symmetric subspace.
    pub fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        let defect = m.hermitian_defect();
        if defect > crate::linalg::HERMITIAN_TOL * m.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian { defect });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace is {} + {}i, expected 1",
                tr.re, tr.im
            )));
        }
        let sym = self.symmetric_matrix()?;
        let values = hermitian_eigenvalues(&sym)?;
        let (min, max) = (values[0], values[values.len() - 1]);
        if min < -PSD_SLACK * max.max(1.0) {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }

    pub fn isometry(&self) -> Result<SymmetricIsometry> {
        SymmetricIsometry::new(self.shape)
    }

    pub fn full_matrix(&self) -> Result<ComplexMatrix> {
        match self.basis {
            Basis::Full => Ok(self.matrix.clone()),
            Basis::Symmetric => Ok(self.isometry()?.expand(&self.matrix)),
        }
    }

    /// Symmetric coordinates; fails with [`Error::NotSymmetricSupport`] for a
    /// full-basis state that leaves the subspace.
    pub fn symmetric_matrix(&self) -> Result<ComplexMatrix> {
        match self.basis {
            Basis::Full => self.isometry()?.compress(&self.matrix),
            Basis::Symmetric => Ok(self.matrix.clone()),
        }
    }

    pub fn support_residual(&self) -> Result<f64> {
        match self.basis {
            Basis::Full => Ok(self.isometry()?.support_residual(&self.matrix)),
            Basis::Symmetric => Ok(0.0),
        }
    }

    pub fn to_basis(&self, basis: Basis) -> Result<StateRecord> {
        let matrix = match basis {
            Basis::Full => self.full_matrix()?,
            Basis::Symmetric => self.symmetric_matrix()?,
        };
        Ok(StateRecord {
            shape: self.shape,
            basis,
            matrix,
            provenance: self.provenance.clone(),
        })
    }
}

fn check_unit(f: &[C64]) -> Result<()> {
    let nrm = norm(f);
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(Error::NormError { norm: nrm });
    }
    Ok(())
}

fn pure_full(shape: SystemShape, psi: &[C64], provenance: String) -> Result<StateRecord> {
    crate::limits::check_dim(shape.full_dim())?;
    StateRecord::new(
        shape,
        Basis::Full,
        ComplexMatrix::projector(psi),
        provenance,
    )
}

/// `(|f⟩⟨f|)^⊗k`
pub fn product_power(f: &[C64], k: usize) -> Result<StateRecord> {
    check_unit(f)?;
    let shape = SystemShape::new(f.len(), k)?;
    crate::limits::check_dim(shape.full_dim())?;
    pure_full(
        shape,
        &tensor_power(f, k),
        format!("product_power(n={}, k={k})", f.len()),
    )
}

/// Projector onto `Σ_i |i⟩^⊗k / √n`.
pub fn ghz_like(n: usize, k: usize) -> Result<StateRecord> {
    if k < 2 {
        return Err(Error::ShapeError("ghz_like needs k >= 2".into()));
    }
    let shape = SystemShape::new(n, k)?;
    crate::limits::check_dim(shape.full_dim())?;
    let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut psi = vec![C64::new(0.0, 0.0); shape.full_dim()];
    let diag_step: usize = (0..k).map(|p| shape.stride(p)).sum();
    for i in 0..n {
        psi[i * diag_step] = amp;
    }
    pure_full(shape, &psi, format!("ghz_like(n={n}, k={k})"))
}

/// Projector onto one Dicke vector.
pub fn dicke_state(occ: &OccupationVector, shape: SystemShape) -> Result<StateRecord> {
    let psi = crate::bosonic::dicke_vector(occ, &shape)?;
    pure_full(shape, &psi, format!("dicke_state(occ={:?})", occ.counts()))
}

fn symmetric_to_full(
    shape: SystemShape,
    iso: &SymmetricIsometry,
    rho_sym: &ComplexMatrix,
    provenance: String,
) -> Result<StateRecord> {
    StateRecord::new(shape, Basis::Full, iso.expand(rho_sym), provenance)
}

/// `(1/n) Σ_i (|i⟩⟨i|)^⊗k`
pub fn basis_mixture(n: usize, k: usize) -> Result<StateRecord> {
    let shape = SystemShape::new(n, k)?;
    crate::limits::check_dim(shape.full_dim())?;
    let mut rho = ComplexMatrix::zeros(shape.full_dim(), shape.full_dim());
    let diag_step: usize = (0..k).map(|p| shape.stride(p)).sum();
    for i in 0..n {
        rho[(i * diag_step, i * diag_step)] = C64::new(1.0 / n as f64, 0.0);
    }
    StateRecord::new(
        shape,
        Basis::Full,
        rho,
        format!("basis_mixture(n={n}, k={k})"),
    )
}

/// Symmetrizer normalized to unit trace, `P / I^k_n`.
pub fn symmetric_mixed(shape: SystemShape) -> Result<StateRecord> {
    let iso = SymmetricIsometry::new(shape)?;
    let rho = ComplexMatrix::identity(shape.sym_dim()).scaled(1.0 / shape.sym_dim() as f64);
    symmetric_to_full(
        shape,
        &iso,
        &rho,
        format!("symmetric_mixed(n={}, k={})", shape.n(), shape.k()),
    )
}

/// Gaussian-random pure state in symmetric coordinates.
pub fn random_symmetric_pure(shape: SystemShape, seed: Seed) -> Result<StateRecord> {
    let iso = SymmetricIsometry::new(shape)?;
    let mut rng = seed.rng();
    let coords = random_unit_vector(&mut rng, shape.sym_dim());
    symmetric_to_full(
        shape,
        &iso,
        &ComplexMatrix::projector(&coords),
        format!(
            "random_symmetric_pure(n={}, k={}) {}",
            shape.n(),
            shape.k(),
            seed.describe()
        ),
    )
}

/// `Σ_{i<r} p_i (|f_i⟩⟨f_i|)^⊗k` with Haar-random `f_i` and uniform simplex
/// weights, returned with the construction as its certificate.
pub fn random_separable_mixture(
    shape: SystemShape,
    r: usize,
    seed: Seed,
) -> Result<(StateRecord, Certificate)> {
    if r == 0 || r > MAX_MIXTURE_TERMS {
        return Err(Error::RankTooLarge {
            rank: r,
            max: MAX_MIXTURE_TERMS,
        });
    }
    let iso = SymmetricIsometry::new(shape)?;
    let mut rng = seed.rng();
    let vectors: Vec<Vec<C64>> = (0..r)
        .map(|_| random_unit_vector(&mut rng, shape.n()))
        .collect();
    let weights = uniform_simplex(&mut rng, r);
    let mut rho = ComplexMatrix::zeros(shape.sym_dim(), shape.sym_dim());
    for (f, &p) in vectors.iter().zip(&weights) {
        rho.add_projector(p, &iso.compress_vector(&tensor_power(f, shape.k())));
    }
    let state = symmetric_to_full(
        shape,
        &iso,
        &rho.hermitian_part(),
        format!(
            "random_separable_mixture(n={}, k={}, r={r}) {}",
            shape.n(),
            shape.k(),
            seed.describe()
        ),
    )?;
    let terms = weights
        .into_iter()
        .zip(vectors)
        .map(|(weight, vector)| CertificateTerm { weight, vector })
        .collect();
    let mut cert = Certificate {
        shape,
        terms,
        trace_distance: 0.0,
    };
    cert.trace_distance = cert.trace_distance_to(&state)?;
    Ok((state, cert))
}

/// Mixture of `r` random symmetric pure states with uniform simplex weights.
pub fn random_rank_r_symmetric(shape: SystemShape, r: usize, seed: Seed) -> Result<StateRecord> {
    let rho = random_rank_r_coordinates(shape, r, seed)?;
    let iso = SymmetricIsometry::new(shape)?;
    symmetric_to_full(
        shape,
        &iso,
        &rho,
        format!(
            "random_rank_r_symmetric(n={}, k={}, r={r}) {}",
            shape.n(),
            shape.k(),
            seed.describe()
        ),
    )
}

/// [`random_rank_r_symmetric`] in symmetric coordinates.
pub(crate) fn random_rank_r_coordinates(
    shape: SystemShape,
    r: usize,
    seed: Seed,
) -> Result<ComplexMatrix> {
    if r == 0 || r > shape.sym_dim() {
        return Err(Error::RankTooLarge {
            rank: r,
            max: shape.sym_dim(),
        });
    }
    let mut rng = seed.rng();
    let vectors: Vec<Vec<C64>> = (0..r)
        .map(|_| random_unit_vector(&mut rng, shape.sym_dim()))
        .collect();
    let weights = uniform_simplex(&mut rng, r);
    let mut rho = ComplexMatrix::zeros(shape.sym_dim(), shape.sym_dim());
    for (v, &p) in vectors.iter().zip(&weights) {
        rho.add_projector(p, v);
    }
    Ok(rho.hermitian_part())
}

/// Whether a full-basis matrix stays on the symmetric subspace.
pub fn is_symmetric_supported(rho: &ComplexMatrix, shape: &SystemShape) -> Result<bool> {
    Ok(crate::bosonic::symmetric_support_residual(rho, shape)? <= SUPPORT_TOL)
}

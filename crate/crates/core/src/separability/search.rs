//! Search for symmetric product vectors `|f⟩^⊗k` inside a subspace.
//!
//! The overlap `g(f) = ⟨f^⊗k|Q|f^⊗k⟩` with a projector `Q` is maximized by
//! symmetric higher-order power iteration: contract `Q|f^⊗k⟩` against
//! `⟨f|^⊗(k−1)` and renormalize. `g = 1` exactly when `f^⊗k` lies in the
//! range of `Q`.

use crate::bosonic::SymmetricIsometry;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{inner, norm, tensor_power, ComplexMatrix, C64};
use crate::rng::{random_unit_vector, Seed};
use crate::shape::SystemShape;

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once successive overlaps differ by less than this.
    pub tol: f64,
    /// A hit needs `g ≥ 1 − accept_tol`.
    pub accept_tol: f64,
    pub exec: Execution,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 64,
            max_iters: 500,
            tol: 1e-12,
            accept_tol: 1e-8,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductHit {
    /// Unit vector with its largest component real and positive.
    pub vector: Vec<C64>,
    pub overlap: f64,
    pub iterations: usize,
}

/// A subspace of the symmetric space, held as a projector in Dicke coordinates.
pub(crate) struct SymmetricRange<'a> {
    pub iso: &'a SymmetricIsometry,
    pub q: ComplexMatrix,
}

impl SymmetricRange<'_> {
    fn shape(&self) -> &SystemShape {
        self.iso.shape()
    }

    fn coords(&self, f: &[C64]) -> Vec<C64> {
        self.iso.compress_vector(&tensor_power(f, self.shape().k()))
    }

    /// One power-iteration run from `start`.
    pub fn polish(&self, start: &[C64], config: &SearchConfig) -> ProductHit {
        let shape = *self.shape();
        let (n, k) = (shape.n(), shape.k());
        let mut f = crate::linalg::normalized(start).unwrap_or_else(|| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[0] = C64::new(1.0, 0.0);
            e
        });
        let mut g_prev = f64::NEG_INFINITY;
        let mut iterations = 0;
        loop {
            let x = self.coords(&f);
            let w = self.q.mat_vec(&x);
            let g = inner(&x, &w).re;
            if (g - g_prev).abs() < config.tol || iterations >= config.max_iters {
                return ProductHit {
                    vector: canonical_phase(f),
                    overlap: g,
                    iterations,
                };
            }
            g_prev = g;
            // contract Q f^⊗k with ⟨f|^⊗(k−1) on parties 1..k
            let y = self.iso.expand_vector(&w);
            let tail = tensor_power(&f, k - 1);
            let h: Vec<C64> = y
                .chunks(tail.len())
                .map(|chunk| inner(&tail, chunk))
                .collect();
            if norm(&h) == 0.0 {
                return ProductHit {
                    vector: canonical_phase(f),
                    overlap: g,
                    iterations,
                };
            }
            f = crate::linalg::normalized(&h).expect("nonzero");
            iterations += 1;
        }
    }

    /// Best of `config.restarts` random starts; ties keep the earliest restart.
    pub fn search(&self, seed: Seed, config: &SearchConfig) -> ProductHit {
        let n = self.shape().n();
        let hits = config.exec.map_indexed(config.restarts.max(1), |r| {
            let mut rng = seed.child(r as u64).rng();
            self.polish(&random_unit_vector(&mut rng, n), config)
        });
        let mut best = hits[0].clone();
        for hit in hits.into_iter().skip(1) {
            if hit.overlap > best.overlap {
                best = hit;
            }
        }
        best
    }
}

/// Fix the global phase so that the largest-magnitude entry is real positive.
pub(crate) fn canonical_phase(f: Vec<C64>) -> Vec<C64> {
    let pivot = f.iter().copied().fold(C64::new(0.0, 0.0), |best, z| {
        if z.norm() > best.norm() {
            z
        } else {
            best
        }
    });
    if pivot.norm() == 0.0 {
        return f;
    }
    let phase = pivot.conj() / pivot.norm();
    f.into_iter().map(|z| z * phase).collect()
}

/// Find `f` maximizing `⟨f^⊗k|Q|f^⊗k⟩` for a projector `Q` on the full
/// space. Returns [`Error::NotFound`] when the best overlap stays below
/// `1 − accept_tol`.
pub fn find_symmetric_product_in_range(
    q: &ComplexMatrix,
    shape: &SystemShape,
    seed: Seed,
    config: &SearchConfig,
) -> Result<ProductHit> {
    if q.rows() != shape.full_dim() || q.cols() != shape.full_dim() {
        return Err(Error::ShapeError(format!(
            "projector must be {0}x{0}",
            shape.full_dim()
        )));
    }
    let defect = (&q.matmul(q) - q).frobenius_norm();
    if !q.is_hermitian() || defect > 1e-8 * q.frobenius_norm().max(1.0) {
        return Err(Error::Precondition(format!(
            "Q is not an orthogonal projector (idempotency defect {defect:.3e})"
        )));
    }
    let iso = SymmetricIsometry::new(*shape)?;
    let range = SymmetricRange {
        q: iso.project(q),
        iso: &iso,
    };
    let best = range.search(seed, config);
    if best.overlap >= 1.0 - config.accept_tol {
        Ok(best)
    } else {
        Err(Error::NotFound {
            best_overlap: best.overlap,
        })
    }
}

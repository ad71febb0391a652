//! Candidate product vectors from simultaneous diagonalization.
//!
//! A state `ρ = Σ_m p_m (F_m)^⊗k` with `F_m = |f_m⟩⟨f_m|` is a symmetric
//! tensor over the operator space of one party. Grouping the parties as
//! `{0} | B | C`, contracting party 0 with a random operator `X` gives
//! `M_X = Φ_B D_X Φ_C^T`, where the columns of `Φ_B` are `vec(F_m^⊗|B|)`.
//! Two such contractions form a pencil whose eigenvectors are those columns,
//! provided they are linearly independent. This recovers the `f_m` of a
//! minimal decomposition in one pass instead of guessing among the
//! (possibly infinitely many) product vectors in the range.

use nalgebra::{DMatrix, Schur};

use crate::linalg::{norm, normalized, svd, ComplexMatrix, C64};
use crate::rng::{complex_gaussian, Seed};
use crate::shape::SystemShape;

/// Singular values below this fraction of the largest count as zero.
const PENCIL_RANK_TOL: f64 = 1e-9;

fn contract_first_party(
    rho: &ComplexMatrix,
    shape: &SystemShape,
    x: &[C64],
    dim_b: usize,
    dim_c: usize,
) -> ComplexMatrix {
    let n = shape.n();
    let rest = dim_b * dim_c;
    let mut m = ComplexMatrix::zeros(dim_b * dim_b, dim_c * dim_c);
    for ak in 0..n {
        for ab in 0..n {
            let w = x[ak * n + ab];
            for bk in 0..dim_b {
                for ck in 0..dim_c {
                    let src = rho.row(ak * rest + bk * dim_c + ck);
                    for bb in 0..dim_b {
                        for cb in 0..dim_c {
                            m[(bk * dim_b + bb, ck * dim_c + cb)] +=
                                w * src[ab * rest + bb * dim_c + cb];
                        }
                    }
                }
            }
        }
    }
    m
}

/// Column of largest norm; for a rank-one matrix `a b^T` this is `∝ a`.
fn dominant_column(data: &[C64], rows: usize, cols: usize) -> Option<Vec<C64>> {
    let column = |j: usize| (0..rows).map(|i| data[i * cols + j]).collect::<Vec<_>>();
    let best = (0..cols).max_by(|&a, &b| norm(&column(a)).total_cmp(&norm(&column(b))))?;
    normalized(&column(best))
}

/// Recover `f` from `vec(F^⊗b)` laid out as `(ket_B, bra_B)`.
fn local_vector(phi: &[C64], n: usize, b: usize) -> Option<Vec<C64>> {
    let dim_b = n.pow(b as u32);
    let power = dominant_column(phi, dim_b, dim_b)?;
    if b == 1 {
        Some(power)
    } else {
        dominant_column(&power, n, dim_b / n)
    }
}

/// Eigenvectors of an upper triangular `t` by back substitution.
fn triangular_eigenvectors(t: &DMatrix<C64>) -> Vec<Vec<C64>> {
    let dim = t.nrows();
    let scale = t
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    (0..dim)
        .map(|j| {
            let lambda = t[(j, j)];
            let mut x = vec![C64::new(0.0, 0.0); dim];
            x[j] = C64::new(1.0, 0.0);
            for i in (0..j).rev() {
                let s: C64 = (i + 1..=j).map(|l| t[(i, l)] * x[l]).sum();
                let mut d = t[(i, i)] - lambda;
                if d.norm() < f64::EPSILON * scale {
                    d = C64::new(f64::EPSILON * scale, 0.0);
                }
                x[i] = -s / d;
            }
            x
        })
        .collect()
}

/// Candidate local vectors for a state of numerical rank `rank`. Returns an
/// empty list when the pencil is degenerate (too many terms for the party
/// grouping, or `k < 3`). Candidates are hints: callers verify each one.
pub fn spectral_candidates(
    rho_full: &ComplexMatrix,
    shape: &SystemShape,
    rank: usize,
    seed: Seed,
) -> Vec<Vec<C64>> {
    let (n, k) = (shape.n(), shape.k());
    if k < 3 || rank == 0 {
        return Vec::new();
    }
    let b = (k - 1) / 2;
    let dim_b = n.pow(b as u32);
    let dim_c = n.pow((k - 1 - b) as u32);
    if rank > (dim_b * dim_b).min(dim_c * dim_c) {
        return Vec::new();
    }
    let mut rng = seed.rng();
    let x: Vec<C64> = (0..n * n).map(|_| complex_gaussian(&mut rng)).collect();
    let y: Vec<C64> = (0..n * n).map(|_| complex_gaussian(&mut rng)).collect();
    let mx = contract_first_party(rho_full, shape, &x, dim_b, dim_c);
    let my = contract_first_party(rho_full, shape, &y, dim_b, dim_c);

    let Ok(d) = svd(&my) else {
        return Vec::new();
    };
    if d.values.len() < rank || d.values[rank - 1] <= PENCIL_RANK_TOL * d.values[0] {
        return Vec::new();
    }
    // K = (U† M_X V) S^{-1} = A D_X D_Y^{-1} A^{-1} with A = U† Φ_B
    let rows = my.rows();
    let mxv: Vec<Vec<C64>> = d.right[..rank].iter().map(|v| mx.mat_vec(v)).collect();
    let kx = DMatrix::from_fn(rank, rank, |i, j| {
        crate::linalg::inner(&d.left[i], &mxv[j]) / d.values[j]
    });
    let Some(schur) = Schur::try_new(kx, f64::EPSILON, 0) else {
        return Vec::new();
    };
    let (q, t) = schur.unpack();
    triangular_eigenvectors(&t)
        .into_iter()
        .filter_map(|x| {
            let c = &q * DMatrix::from_vec(rank, 1, x);
            let phi: Vec<C64> = (0..rows)
                .map(|r| (0..rank).map(|j| d.left[j][r] * c[j]).sum())
                .collect();
            local_vector(&phi, n, b)
        })
        .collect()
}

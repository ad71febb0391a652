//! Dense complex linear algebra and multi-index tensor operations.
//!
//! Matrices are stored row-major. Flat tensor indices follow the convention
//! of [`SystemShape`]: party 0 is the slowest-varying digit.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::limits::check_dim;
use crate::shape::SystemShape;

/// Relative tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Negative eigenvalues down to `-PSD_SLACK * max(1, λ_max)` still count as PSD.
pub const PSD_SLACK: f64 = 1e-9;
/// Default relative threshold of [`eps_rank`].
pub const RANK_TOL: f64 = 1e-10;
/// Maximum squared distance of a vector from a range for it to count as inside.
pub const RANGE_TOL: f64 = 1e-8;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            for c in 0..self.cols.min(8) {
                let z = self[(r, c)];
                write!(f, " {:+.3}{:+.3}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeError(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        Self::from_fn(rows, columns.len(), |r, c| columns[c][r])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (k, &a) in self.row(r).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "mat_vec shape mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `⟨u|A|v⟩`
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        inner(u, &self.mat_vec(v))
    }

    pub fn scaled(&self, s: f64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_mut(&mut self, s: f64) {
        self.data.iter_mut().for_each(|z| *z *= s);
    }

    /// `self += s |v⟩⟨v|`
    pub fn add_projector(&mut self, s: f64, v: &[C64]) {
        let cols = self.cols;
        for (row, &vr) in self.data.chunks_mut(cols).zip(v) {
            let vr = vr * s;
            for (x, vc) in row.iter_mut().zip(v) {
                *x += vr * vc.conj();
            }
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖A − A†‖_F`
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc += (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOL * self.frobenius_norm().max(1.0)
    }

    /// `(A + A†) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    pub(crate) fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_na(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }

    fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |r, c| self[(idx[r], idx[c])])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

// Vector helpers.

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &[C64]) -> Option<Vec<C64>> {
    let n = norm(v);
    (n > 0.0 && n.is_finite()).then(|| v.iter().map(|z| z / n).collect())
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// `|f⟩^⊗k`
pub fn tensor_power(f: &[C64], k: usize) -> Vec<C64> {
    (0..k).fold(vec![ONE], |acc, _| kron_vec(&acc, f))
}

/// Kronecker product; fails with [`Error::SizeLimit`] when a side of the
/// result exceeds the configured maximum dimension.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows).ok_or(Error::SizeLimit {
        requested: usize::MAX,
        limit: 0,
    })?;
    let cols = a.cols.checked_mul(b.cols).ok_or(Error::SizeLimit {
        requested: usize::MAX,
        limit: 0,
    })?;
    check_dim(rows.max(cols))?;
    Ok(ComplexMatrix::from_fn(rows, cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    }))
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn eigenvector(&self, j: usize) -> Vec<C64> {
        self.eigenvectors.column(j)
    }

    /// `V Λ V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.eigenvectors.rows(), self.eigenvectors.rows());
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            out.add_projector(l, &self.eigenvector(j));
        }
        out
    }
}

fn ensure_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::ShapeError(format!(
            "{}x{} matrix is not square",
            a.rows, a.cols
        )));
    }
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL * a.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Connected components of the nonzero pattern. A Hermitian matrix is
/// block diagonal after permuting by these, so each block can be solved
/// on its own.
fn sparsity_blocks(a: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = a.rows;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for r in 0..n {
        for c in r + 1..n {
            if a[(r, c)] != ZERO {
                let (x, y) = (find(&mut parent, r), find(&mut parent, c));
                if x != y {
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

fn dense_eigensystem(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let dim = a.rows;
    let eig = SymmetricEigen::try_new(a.hermitian_part().to_na(), f64::EPSILON, 1000 * dim.max(1))
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigensolver did not converge".into()))?;
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
    }
    Ok((
        eig.eigenvalues.iter().copied().collect(),
        ComplexMatrix::from_na(&eig.eigenvectors),
    ))
}

fn dense_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let values = a.hermitian_part().to_na().symmetric_eigenvalues();
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
    }
    Ok(values.iter().copied().collect())
}

/// Full spectral decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigensystem(a: &ComplexMatrix) -> Result<EigenSystem> {
    ensure_hermitian(a)?;
    let dim = a.rows;
    let mut pairs: Vec<(f64, Vec<C64>)> = Vec::with_capacity(dim);
    for block in sparsity_blocks(a) {
        let (values, vectors) = if block.len() == dim {
            dense_eigensystem(a)?
        } else {
            dense_eigensystem(&a.submatrix(&block))?
        };
        for (j, value) in values.into_iter().enumerate() {
            let mut v = vec![ZERO; dim];
            for (local, &global) in block.iter().enumerate() {
                v[global] = vectors[(local, j)];
            }
            pairs.push((value, v));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let columns: Vec<Vec<C64>> = pairs.into_iter().map(|p| p.1).collect();
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_columns(dim, &columns),
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    ensure_hermitian(a)?;
    let dim = a.rows;
    let mut values = Vec::with_capacity(dim);
    for block in sparsity_blocks(a) {
        if block.len() == dim {
            values.extend(dense_eigenvalues(a)?);
        } else {
            values.extend(dense_eigenvalues(&a.submatrix(&block))?);
        }
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Number of eigenvalues above `rel_tol · λ_max`, given an ascending spectrum.
pub fn rank_of_spectrum(eigenvalues: &[f64], rel_tol: f64) -> usize {
    let max = eigenvalues.last().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return 0;
    }
    eigenvalues.iter().filter(|&&l| l > rel_tol * max).count()
}

/// Numerical rank of a Hermitian PSD matrix.
pub fn eps_rank(a: &ComplexMatrix, rel_tol: f64) -> Result<usize> {
    let values = hermitian_eigenvalues(a)?;
    let max = values.last().copied().unwrap_or(0.0);
    let min = values.first().copied().unwrap_or(0.0);
    if min < -rel_tol * max.max(1.0) {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(rank_of_spectrum(&values, rel_tol))
}

fn check_operator(rho: &ComplexMatrix, shape: &SystemShape) -> Result<()> {
    if rho.rows != shape.full_dim() || rho.cols != shape.full_dim() {
        return Err(Error::ShapeError(format!(
            "expected a {0}x{0} matrix for n={1}, k={2}, got {3}x{4}",
            shape.full_dim(),
            shape.n(),
            shape.k(),
            rho.rows,
            rho.cols
        )));
    }
    Ok(())
}

/// Trace over the listed parties. The result acts on the remaining parties
/// in their original order.
pub fn partial_trace(
    rho: &ComplexMatrix,
    shape: &SystemShape,
    parties: &[usize],
) -> Result<ComplexMatrix> {
    check_operator(rho, shape)?;
    let traced = shape.check_parties(parties)?;
    let kept: Vec<usize> = (0..shape.k()).filter(|p| !traced.contains(p)).collect();
    let offsets = |group: &[usize]| -> Vec<usize> {
        let mut offs = vec![0usize];
        for &p in group {
            let s = shape.stride(p);
            offs = offs
                .iter()
                .flat_map(|&o| (0..shape.n()).map(move |d| o + d * s))
                .collect();
        }
        offs
    };
    let kept_offs = offsets(&kept);
    let traced_offs = offsets(&traced);
    Ok(ComplexMatrix::from_fn(
        kept_offs.len(),
        kept_offs.len(),
        |r, c| {
            traced_offs
                .iter()
                .map(|&t| rho[(kept_offs[r] + t, kept_offs[c] + t)])
                .sum()
        },
    ))
}

/// Transpose the indices of the listed parties. Only entries move, so the
/// map is an exact involution.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    shape: &SystemShape,
    parties: &[usize],
) -> Result<ComplexMatrix> {
    check_operator(rho, shape)?;
    let set = shape.check_parties(parties)?;
    let part = shape.party_part(&set);
    let dim = shape.full_dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            // swap the selected digits between row and column
            out[(i - part[i] + part[j], j - part[j] + part[i])] = rho[(i, j)];
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Descending, non-negative.
    pub coefficients: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
}

/// Thin singular value decomposition `A = Σ_j s_j |u_j⟩⟨v_j|`, with
/// `min(rows, cols)` triples in descending order of `s_j`.
#[derive(Clone, Debug)]
pub struct SingularDecomposition {
    pub values: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
}

/// Extend `vectors` to `count` orthonormal vectors in `C^dim`, preferring the
/// supplied hints and then the standard basis.
fn complete_orthonormal(
    mut vectors: Vec<Vec<C64>>,
    hints: &[Vec<C64>],
    dim: usize,
    count: usize,
) -> Vec<Vec<C64>> {
    let standard = (0..dim).map(|i| {
        let mut e = vec![ZERO; dim];
        e[i] = ONE;
        e
    });
    for candidate in hints.iter().cloned().chain(standard) {
        if vectors.len() >= count {
            break;
        }
        let mut w = candidate;
        for _ in 0..2 {
            for v in &vectors {
                let p = inner(v, &w);
                w.iter_mut().zip(v).for_each(|(a, b)| *a -= p * b);
            }
        }
        if norm(&w) > 0.5 {
            vectors.push(normalized(&w).expect("nonzero"));
        }
    }
    vectors
}

/// `[[0, A], [A†, 0]]`
fn dilation(a: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = (a.rows, a.cols);
    let mut h = ComplexMatrix::zeros(r + c, r + c);
    for i in 0..r {
        for j in 0..c {
            h[(i, r + j)] = a[(i, j)];
            h[(r + j, i)] = a[(i, j)].conj();
        }
    }
    h
}

/// Computed from the Hermitian dilation `[[0, A], [A†, 0]]`, whose
/// eigenvalues are `±s_j` with eigenvectors `(u_j, ±v_j)/√2`.
pub fn svd(a: &ComplexMatrix) -> Result<SingularDecomposition> {
    let (r, c) = (a.rows, a.cols);
    let m = r.min(c);
    if m == 0 {
        return Ok(SingularDecomposition {
            values: Vec::new(),
            left: Vec::new(),
            right: Vec::new(),
        });
    }
    let eig = hermitian_eigensystem(&dilation(a))?;
    let top: Vec<usize> = (0..m).map(|j| r + c - 1 - j).collect();
    let values: Vec<f64> = top.iter().map(|&j| eig.eigenvalues[j].max(0.0)).collect();
    // below this the ±s pair is not resolved and the halves mix
    let floor = 1e-12 * values[0].max(f64::MIN_POSITIVE) * (r + c) as f64;
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut hints_left = Vec::new();
    let mut hints_right = Vec::new();
    for (&j, &s) in top.iter().zip(&values) {
        let w = eig.eigenvector(j);
        let (x, y) = w.split_at(r);
        if s > floor {
            left.push(normalized(x).expect("resolved pair"));
            right.push(normalized(y).expect("resolved pair"));
        } else {
            hints_left.push(x.to_vec());
            hints_right.push(y.to_vec());
        }
    }
    let resolved = left.len();
    let left = complete_orthonormal(left, &hints_left, r, m);
    let right = complete_orthonormal(right, &hints_right, c, m);
    let mut values = values;
    values[resolved..].iter_mut().for_each(|s| *s = 0.0);
    Ok(SingularDecomposition {
        values,
        left,
        right,
    })
}

/// `ψ = Σ_j s_j |a_j⟩|b_j⟩` for a unit vector on `C^dim_a ⊗ C^dim_b`.
pub fn schmidt_decompose(psi: &[C64], dim_a: usize, dim_b: usize) -> Result<SchmidtDecomposition> {
    if dim_a * dim_b != psi.len() || dim_a == 0 || dim_b == 0 {
        return Err(Error::ShapeError(format!(
            "length {} is not {dim_a}x{dim_b}",
            psi.len()
        )));
    }
    let nrm = norm(psi);
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(Error::NormError { norm: nrm });
    }
    let m = ComplexMatrix::new(dim_a, dim_b, psi.to_vec())?;
    let d = svd(&m)?;
    // M = Σ s_j u_j v_j†, so ψ = Σ s_j u_j ⊗ conj(v_j)
    let right = d
        .right
        .iter()
        .map(|v| v.iter().map(|z| z.conj()).collect())
        .collect();
    Ok(SchmidtDecomposition {
        coefficients: d.values,
        left: d.left,
        right,
    })
}

/// Descending.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let (r, c) = (a.rows, a.cols);
    let m = r.min(c);
    if m == 0 {
        return Ok(Vec::new());
    }
    let eig = hermitian_eigenvalues(&dilation(a))?;
    Ok(eig.iter().rev().take(m).map(|&s| s.max(0.0)).collect())
}

/// Sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.iter().sum())
}

/// Orthonormal basis of the numerical range of a PSD matrix, as
/// `(eigenvalue, eigenvector)` pairs above `rel_tol · λ_max`.
pub fn range_basis(rho: &ComplexMatrix, rel_tol: f64) -> Result<Vec<(f64, Vec<C64>)>> {
    let eig = hermitian_eigensystem(rho)?;
    let max = eig.max_eigenvalue();
    if max <= 0.0 {
        return Ok(Vec::new());
    }
    Ok(eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > rel_tol * max)
        .map(|(j, &l)| (l, eig.eigenvector(j)))
        .collect())
}

pub fn projector_onto(basis: &[(f64, Vec<C64>)], dim: usize) -> ComplexMatrix {
    let mut q = ComplexMatrix::zeros(dim, dim);
    for (_, v) in basis {
        q.add_projector(1.0, v);
    }
    q
}

/// Outcome of removing one rank-one term from a PSD matrix.
#[derive(Clone, Debug)]
pub struct Subtraction {
    /// `λ* = 1 / ⟨u|ρ⁺|u⟩`
    pub weight: f64,
    /// `ρ − λ* |u⟩⟨u|`
    pub residual: ComplexMatrix,
    /// `‖v − Qv‖²` with `Q` the range projector.
    pub range_residual: f64,
}

/// Largest `λ` for which `ρ − λ|v⟩⟨v|` stays PSD, for `v` in the range of `ρ`.
pub fn psd_subtraction_weight(rho: &ComplexMatrix, v: &[C64]) -> Result<f64> {
    subtract_in_range(rho, v).map(|s| s.weight)
}

/// Subtract the largest multiple of `|u⟩⟨u|` that keeps `ρ` PSD, where `u`
/// is the normalized projection of `v` onto the range. The remainder has
/// rank exactly one less.
pub fn subtract_in_range(rho: &ComplexMatrix, v: &[C64]) -> Result<Subtraction> {
    if v.len() != rho.rows {
        return Err(Error::ShapeError(format!(
            "vector of length {} for a {}x{} matrix",
            v.len(),
            rho.rows,
            rho.cols
        )));
    }
    let nrm = norm(v);
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(Error::NormError { norm: nrm });
    }
    let basis = range_basis(rho, RANK_TOL)?;
    let coords: Vec<C64> = basis.iter().map(|(_, e)| inner(e, v)).collect();
    let in_range: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
    let range_residual = (1.0 - in_range).max(0.0);
    if basis.is_empty() || range_residual > RANGE_TOL {
        return Err(Error::NotInRange {
            residual: range_residual,
        });
    }
    let scale = in_range.sqrt();
    let inv_quad: f64 = basis
        .iter()
        .zip(&coords)
        .map(|((l, _), c)| c.norm_sqr() / (scale * scale) / l)
        .sum();
    let weight = 1.0 / inv_quad;
    let mut u = vec![ZERO; v.len()];
    for ((_, e), c) in basis.iter().zip(&coords) {
        for (ui, ei) in u.iter_mut().zip(e) {
            *ui += ei * (c / scale);
        }
    }
    let residual = if basis.len() == 1 {
        // ρ = λ|u⟩⟨u| exactly; keep rounding noise from posing as rank one
        ComplexMatrix::zeros(rho.rows, rho.cols)
    } else {
        let mut residual = rho.clone();
        residual.add_projector(-weight, &u);
        residual.hermitian_part()
    };
    Ok(Subtraction {
        weight,
        residual,
        range_residual,
    })
}

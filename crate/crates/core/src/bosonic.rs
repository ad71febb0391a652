//! The symmetric (bosonic) subspace of `(C^n)^⊗k`.
//!
//! Basis vectors are Dicke states labelled by occupation vectors, listed in
//! lexicographically descending order. That order is part of the symmetric
//! file format and must not change.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::check_dim;
use crate::linalg::{ComplexMatrix, C64};
use crate::shape::SystemShape;

/// Residual `‖PρP − ρ‖_F` below which a state counts as symmetric-supported.
pub const SUPPORT_TOL: f64 = 1e-9;

/// Dimension of the symmetric subspace, `C(n+k−1, k)`.
pub fn bosonic_dim(n: usize, k: usize) -> Result<usize> {
    if n < 1 {
        return Err(Error::ShapeError(
            "local dimension must be at least 1".into(),
        ));
    }
    let overflow = || Error::SizeLimit {
        requested: usize::MAX,
        limit: usize::MAX,
    };
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc = C(n−1+i−1, i−1) before this step; exact division afterwards
        acc = acc.checked_mul(n as u128 - 1 + i).ok_or_else(overflow)? / i;
    }
    usize::try_from(acc).map_err(|_| overflow())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector(Vec<usize>);

impl OccupationVector {
    pub fn new(counts: Vec<usize>) -> Self {
        OccupationVector(counts)
    }

    /// Occupation of a product basis vector given by its digits.
    pub fn of_digits(digits: &[usize], n: usize) -> Self {
        let mut counts = vec![0; n];
        for &d in digits {
            counts[d] += 1;
        }
        OccupationVector(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of distinct arrangements, `k! / ∏ m_i!`.
    pub fn multiplicity(&self) -> f64 {
        let mut acc = 1.0;
        let mut placed = 0.0;
        for &m in &self.0 {
            for j in 1..=m {
                placed += 1.0;
                acc = acc * placed / j as f64;
            }
        }
        acc
    }

    fn check(&self, shape: &SystemShape) -> Result<()> {
        if self.0.len() != shape.n() || self.total() != shape.k() {
            return Err(Error::ShapeError(format!(
                "occupation {:?} does not describe n={}, k={}",
                self.0,
                shape.n(),
                shape.k()
            )));
        }
        Ok(())
    }
}

/// All occupation vectors of `k` bosons in `n` levels, lexicographically descending.
pub fn occupation_basis(n: usize, k: usize) -> Result<Vec<OccupationVector>> {
    let len = bosonic_dim(n, k)?;
    fn fill(
        prefix: &mut Vec<usize>,
        remaining: usize,
        slots: usize,
        out: &mut Vec<OccupationVector>,
    ) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(OccupationVector(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=remaining).rev() {
            prefix.push(first);
            fill(prefix, remaining - first, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(len);
    fill(&mut Vec::with_capacity(n), k, n, &mut out);
    Ok(out)
}

/// Normalized symmetric combination of all product basis vectors with the
/// given occupation.
pub fn dicke_vector(occ: &OccupationVector, shape: &SystemShape) -> Result<Vec<C64>> {
    occ.check(shape)?;
    check_dim(shape.full_dim())?;
    let amp = C64::new(occ.multiplicity().sqrt().recip(), 0.0);
    Ok((0..shape.full_dim())
        .map(|i| {
            if &OccupationVector::of_digits(&shape.digits(i), shape.n()) == occ {
                amp
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect())
}

/// Operator sending party `p`'s factor to position `perm[p]`.
pub fn permutation_operator(shape: &SystemShape, perm: &[usize]) -> Result<ComplexMatrix> {
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..shape.k()).collect::<Vec<_>>() {
        return Err(Error::ShapeError(format!(
            "{perm:?} is not a permutation of {} parties",
            shape.k()
        )));
    }
    check_dim(shape.full_dim())?;
    let dim = shape.full_dim();
    let mut u = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        u[(permute_index(shape, i, perm), i)] = C64::new(1.0, 0.0);
    }
    Ok(u)
}

fn permute_index(shape: &SystemShape, index: usize, perm: &[usize]) -> usize {
    shape
        .digits(index)
        .iter()
        .enumerate()
        .map(|(p, &d)| d * shape.stride(perm[p]))
        .sum()
}

fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == used.len() {
            out.push(current.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                current.push(x);
                rec(current, used, out);
                current.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

/// `P = (1/k!) Σ_π U_π`
pub fn symmetrizer_from_permutations(shape: &SystemShape) -> Result<ComplexMatrix> {
    check_dim(shape.full_dim())?;
    let dim = shape.full_dim();
    let perms = all_permutations(shape.k());
    let w = 1.0 / perms.len() as f64;
    let mut p = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for perm in &perms {
            p[(permute_index(shape, i, perm), i)] += w;
        }
    }
    Ok(p)
}

/// `P = V V†`
pub fn symmetrizer_from_isometry(shape: &SystemShape) -> Result<ComplexMatrix> {
    let iso = SymmetricIsometry::new(*shape)?;
    Ok(iso.expand(&ComplexMatrix::identity(shape.sym_dim())))
}

/// Orthogonal projector onto the symmetric subspace.
pub fn symmetrizer(shape: &SystemShape) -> Result<ComplexMatrix> {
    if shape.k() <= 5 {
        symmetrizer_from_permutations(shape)
    } else {
        symmetrizer_from_isometry(shape)
    }
}

/// The isometry `V` whose columns are the Dicke vectors in basis order.
///
/// Every row of `V` has exactly one nonzero entry, so it is stored as a
/// column index and an amplitude per full-space index.
#[derive(Clone, Debug)]
pub struct SymmetricIsometry {
    shape: SystemShape,
    basis: Vec<OccupationVector>,
    column_of: Vec<usize>,
    amplitude: Vec<f64>,
}

impl SymmetricIsometry {
    pub fn new(shape: SystemShape) -> Result<Self> {
        check_dim(shape.full_dim())?;
        let basis = occupation_basis(shape.n(), shape.k())?;
        let position: HashMap<&OccupationVector, usize> =
            basis.iter().enumerate().map(|(i, o)| (o, i)).collect();
        let mut column_of = Vec::with_capacity(shape.full_dim());
        let mut amplitude = Vec::with_capacity(shape.full_dim());
        for i in 0..shape.full_dim() {
            let occ = OccupationVector::of_digits(&shape.digits(i), shape.n());
            column_of.push(position[&occ]);
            amplitude.push(occ.multiplicity().sqrt().recip());
        }
        Ok(SymmetricIsometry {
            shape,
            basis,
            column_of,
            amplitude,
        })
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn basis(&self) -> &[OccupationVector] {
        &self.basis
    }

    /// Dense `full_dim × sym_dim` matrix.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut v = ComplexMatrix::zeros(self.shape.full_dim(), self.shape.sym_dim());
        for (i, (&c, &a)) in self.column_of.iter().zip(&self.amplitude).enumerate() {
            v[(i, c)] = C64::new(a, 0.0);
        }
        v
    }

    /// `V x`
    pub fn expand_vector(&self, coords: &[C64]) -> Vec<C64> {
        self.column_of
            .iter()
            .zip(&self.amplitude)
            .map(|(&c, &a)| coords[c] * a)
            .collect()
    }

    /// `V† x`
    pub fn compress_vector(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.shape.sym_dim()];
        for ((&c, &a), z) in self.column_of.iter().zip(&self.amplitude).zip(v) {
            out[c] += z * a;
        }
        out
    }

    /// `V ρ V†`
    pub fn expand(&self, rho_sym: &ComplexMatrix) -> ComplexMatrix {
        let dim = self.shape.full_dim();
        ComplexMatrix::from_fn(dim, dim, |r, c| {
            rho_sym[(self.column_of[r], self.column_of[c])]
                * (self.amplitude[r] * self.amplitude[c])
        })
    }

    /// `V† ρ V` without checking support.
    pub fn project(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let sym = self.shape.sym_dim();
        let mut out = ComplexMatrix::zeros(sym, sym);
        for r in 0..self.shape.full_dim() {
            let (cr, ar) = (self.column_of[r], self.amplitude[r]);
            for (c, z) in rho.row(r).iter().enumerate() {
                out[(cr, self.column_of[c])] += z * (ar * self.amplitude[c]);
            }
        }
        out
    }

    /// `‖PρP − ρ‖_F`
    pub fn support_residual(&self, rho: &ComplexMatrix) -> f64 {
        (&self.expand(&self.project(rho)) - rho).frobenius_norm()
    }

    /// `V† ρ V`, refusing states that leave the symmetric subspace.
    pub fn compress(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_full(rho)?;
        let residual = self.support_residual(rho);
        if residual > SUPPORT_TOL {
            return Err(Error::NotSymmetricSupport { residual });
        }
        Ok(self.project(rho))
    }

    fn check_full(&self, rho: &ComplexMatrix) -> Result<()> {
        let dim = self.shape.full_dim();
        if rho.rows() != dim || rho.cols() != dim {
            return Err(Error::ShapeError(format!(
                "expected {dim}x{dim}, got {}x{}",
                rho.rows(),
                rho.cols()
            )));
        }
        Ok(())
    }
}

pub fn symmetric_support_residual(rho: &ComplexMatrix, shape: &SystemShape) -> Result<f64> {
    let iso = SymmetricIsometry::new(*shape)?;
    iso.check_full(rho)?;
    Ok(iso.support_residual(rho))
}

pub fn compress(rho_full: &ComplexMatrix, shape: &SystemShape) -> Result<ComplexMatrix> {
    SymmetricIsometry::new(*shape)?.compress(rho_full)
}

pub fn expand(rho_sym: &ComplexMatrix, shape: &SystemShape) -> Result<ComplexMatrix> {
    if rho_sym.rows() != shape.sym_dim() || rho_sym.cols() != shape.sym_dim() {
        return Err(Error::ShapeError(format!(
            "expected {0}x{0} symmetric coordinates, got {1}x{2}",
            shape.sym_dim(),
            rho_sym.rows(),
            rho_sym.cols()
        )));
    }
    Ok(SymmetricIsometry::new(*shape)?.expand(rho_sym))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eps_rank, kron_vec, RANK_TOL};

    fn shape(n: usize, k: usize) -> SystemShape {
        SystemShape::new(n, k).unwrap()
    }

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn dimension_anchors() {
        assert_eq!(bosonic_dim(3, 3).unwrap(), 10);
        assert_eq!(bosonic_dim(4, 3).unwrap(), 20);
        assert_eq!(bosonic_dim(3, 4).unwrap(), 15);
        for n in 1..8 {
            assert_eq!(bosonic_dim(n, 1).unwrap(), n);
        }
        assert_eq!(bosonic_dim(5, 0).unwrap(), 1);
        assert!(matches!(
            bosonic_dim(1000, 1000),
            Err(Error::SizeLimit { .. })
        ));
        assert!(bosonic_dim(0, 2).is_err());
    }

    #[test]
    fn basis_order() {
        let b: Vec<Vec<usize>> = occupation_basis(2, 2)
            .unwrap()
            .into_iter()
            .map(|o| o.0)
            .collect();
        assert_eq!(b, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        let b: Vec<Vec<usize>> = occupation_basis(3, 1)
            .unwrap()
            .into_iter()
            .map(|o| o.0)
            .collect();
        assert_eq!(b, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let b = occupation_basis(3, 3).unwrap();
        assert_eq!(b.len(), 10);
        assert!(b.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn dicke_examples() {
        let s = shape(3, 3);
        let v = dicke_vector(&OccupationVector::new(vec![3, 0, 0]), &s).unwrap();
        assert_eq!(v[0], re(1.0));
        assert!(v[1..].iter().all(|z| *z == re(0.0)));

        let s2 = shape(2, 2);
        let v = dicke_vector(&OccupationVector::new(vec![1, 1]), &s2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[1] - re(h)).norm() < 1e-15 && (v[2] - re(h)).norm() < 1e-15);
        assert_eq!(v[0], re(0.0));

        let v = dicke_vector(&OccupationVector::new(vec![2, 1, 0]), &s).unwrap();
        let t = 1.0 / 3f64.sqrt();
        // |001⟩ = 1, |010⟩ = 3, |100⟩ = 9
        for (i, z) in v.iter().enumerate() {
            let expected = if [1, 3, 9].contains(&i) { t } else { 0.0 };
            assert!((z - re(expected)).norm() < 1e-15);
        }
        assert!(dicke_vector(&OccupationVector::new(vec![2, 0, 0]), &s).is_err());
    }

    #[test]
    fn symmetrizer_examples() {
        let s1 = shape(4, 1);
        assert_eq!(symmetrizer(&s1).unwrap(), ComplexMatrix::identity(4));
        assert_eq!(
            eps_rank(&symmetrizer(&shape(2, 2)).unwrap(), RANK_TOL).unwrap(),
            3
        );
        assert_eq!(
            eps_rank(&symmetrizer(&shape(3, 3)).unwrap(), RANK_TOL).unwrap(),
            10
        );
    }

    #[test]
    fn symmetrizer_paths_agree() {
        for (n, k) in [(2, 2), (2, 4), (3, 3), (3, 4), (2, 5), (4, 2)] {
            let s = shape(n, k);
            let a = symmetrizer_from_permutations(&s).unwrap();
            let b = symmetrizer_from_isometry(&s).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12, "({n},{k})");
        }
    }

    #[test]
    fn isometry_examples() {
        let iso = SymmetricIsometry::new(shape(3, 1)).unwrap();
        assert_eq!(iso.matrix(), ComplexMatrix::identity(3));
        let iso = SymmetricIsometry::new(shape(2, 2)).unwrap();
        let v = iso.matrix();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = ComplexMatrix::new(
            4,
            3,
            vec![
                re(1.0),
                re(0.0),
                re(0.0),
                re(0.0),
                re(h),
                re(0.0),
                re(0.0),
                re(h),
                re(0.0),
                re(0.0),
                re(0.0),
                re(1.0),
            ],
        )
        .unwrap();
        assert!(v.max_abs_diff(&expected) < 1e-15);
        assert_eq!(
            SymmetricIsometry::new(shape(3, 4)).unwrap().matrix().cols(),
            15
        );
    }

    #[test]
    fn isometry_is_orthonormal() {
        for (n, k) in [(2, 3), (3, 3), (4, 2), (3, 4)] {
            let iso = SymmetricIsometry::new(shape(n, k)).unwrap();
            let v = iso.matrix();
            let gram = &v.adjoint() * &v;
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(v.cols())) < 1e-12);
            assert!((&v * &v.adjoint()).max_abs_diff(&symmetrizer(iso.shape()).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn support_residual_examples() {
        let s = shape(3, 2);
        let mut e0 = vec![re(0.0); 9];
        e0[0] = re(1.0);
        assert!(symmetric_support_residual(&ComplexMatrix::projector(&e0), &s).unwrap() < 1e-15);
        let p = symmetrizer(&s).unwrap().scaled(1.0 / 6.0);
        assert!(symmetric_support_residual(&p, &s).unwrap() < 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = ComplexMatrix::projector(
            &kron_vec(&[re(1.0), re(0.0)], &[re(0.0), re(h)])
                .iter()
                .zip(kron_vec(&[re(0.0), re(1.0)], &[re(-h), re(0.0)]))
                .map(|(a, b)| a + b)
                .collect::<Vec<_>>(),
        );
        let r = symmetric_support_residual(&singlet, &shape(2, 2)).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
        assert!(matches!(
            compress(&singlet, &shape(2, 2)),
            Err(Error::NotSymmetricSupport { .. })
        ));
    }

    #[test]
    fn compress_expand_examples() {
        let s = shape(3, 3);
        let id = ComplexMatrix::identity(10).scaled(0.1);
        let full = expand(&id, &s).unwrap();
        assert!(full.max_abs_diff(&symmetrizer(&s).unwrap().scaled(0.1)) < 1e-15);
        let mut e0 = vec![re(0.0); 27];
        e0[0] = re(1.0);
        let c = compress(&ComplexMatrix::projector(&e0), &s).unwrap();
        let mut expected = ComplexMatrix::zeros(10, 10);
        expected[(0, 0)] = re(1.0);
        assert!(c.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn permutation_invariance() {
        let s = shape(3, 3);
        let p = symmetrizer(&s).unwrap();
        for perm in all_permutations(3) {
            let u = permutation_operator(&s, &perm).unwrap();
            assert!((&(&u * &p) * &u.adjoint()).max_abs_diff(&p) < 1e-12);
        }
    }
}

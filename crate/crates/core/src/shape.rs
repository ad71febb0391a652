use serde::{Deserialize, Serialize};

use crate::bosonic::bosonic_dim;
use crate::error::{Error, Result};

/// Local dimension `n` and party count `k` of a multipartite system.
///
/// Party 0 is the leftmost tensor factor and the slowest-varying digit of a
/// flat index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemShape {
    n: usize,
    k: usize,
    full_dim: usize,
    sym_dim: usize,
}

impl SystemShape {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::ShapeError(format!(
                "local dimension must be at least 2, got {n}"
            )));
        }
        if k < 1 {
            return Err(Error::ShapeError("party count must be at least 1".into()));
        }
        let full_dim =
            u32::try_from(k)
                .ok()
                .and_then(|k| n.checked_pow(k))
                .ok_or(Error::SizeLimit {
                    requested: usize::MAX,
                    limit: usize::MAX,
                })?;
        let sym_dim = bosonic_dim(n, k)?;
        Ok(SystemShape {
            n,
            k,
            full_dim,
            sym_dim,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    pub fn sym_dim(&self) -> usize {
        self.sym_dim
    }

    /// Weight of `party`'s digit in a flat index.
    pub fn stride(&self, party: usize) -> usize {
        self.n.pow((self.k - 1 - party) as u32)
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for slot in out.iter_mut().rev() {
            *slot = index % self.n;
            index /= self.n;
        }
        out
    }

    pub fn check_parties(&self, parties: &[usize]) -> Result<Vec<usize>> {
        let mut set = parties.to_vec();
        set.sort_unstable();
        set.dedup();
        if let Some(&bad) = set.iter().find(|&&p| p >= self.k) {
            return Err(Error::IndexError {
                party: bad,
                parties: self.k,
            });
        }
        Ok(set)
    }

    /// Split every flat index into the part carried by `parties` and the rest.
    /// Returns `part[i]`; the complementary part is `i - part[i]`.
    pub(crate) fn party_part(&self, parties: &[usize]) -> Vec<usize> {
        let strides: Vec<usize> = parties.iter().map(|&p| self.stride(p)).collect();
        (0..self.full_dim)
            .map(|i| strides.iter().map(|&s| (i / s) % self.n * s).sum())
            .collect()
    }
}

use serde::{Deserialize, Serialize};

use super::Rule;
use crate::bosonic::bosonic_dim;
use crate::error::{Error, Result};
use crate::shape::SystemShape;

/// Largest rank at which a PPT state of this shape is known to be separable,
/// with the rule that establishes it.
pub fn rank_threshold(shape: &SystemShape) -> Result<(usize, Rule)> {
    let (n, k) = (shape.n(), shape.k());
    match (n, k) {
        (_, k) if k < 2 => Err(Error::Unsupported(format!(
            "rank thresholds need k >= 2, got k={k}"
        ))),
        (n, 2) => Ok((n.max((n * (n + 1) / 2).saturating_sub(2)), Rule::TwoBoson)),
        (2, 3) => Ok((shape.sym_dim(), Rule::ThreeQubit)),
        // maximal rank for n = 2 is k + 1
        (2, _) => Ok((shape.sym_dim() - 1, Rule::ManyQubit)),
        (n, 3) => Ok((n * n, Rule::T1)),
        (n, k) => Ok((bosonic_dim(n, k - 1)?, Rule::T2)),
    }
}

/// Inclusive rank interval in which a PPT state may still be entangled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankWindow {
    pub lo: usize,
    pub hi: usize,
    pub n: usize,
    pub k: usize,
}

impl RankWindow {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, rank: usize) -> bool {
        self.lo <= rank && rank <= self.hi
    }
}

impl std::fmt::Display for RankWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            write!(f, "[] (empty)")
        } else {
            write!(f, "[{},{}]", self.lo, self.hi)
        }
    }
}

pub fn bound_window(shape: &SystemShape) -> Result<RankWindow> {
    let (threshold, _) = rank_threshold(shape)?;
    Ok(RankWindow {
        lo: threshold + 1,
        hi: shape.sym_dim(),
        n: shape.n(),
        k: shape.k(),
    })
}

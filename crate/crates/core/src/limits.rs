//! Size limits for dense matrices.
//!
//! Every dense operator in this crate is a square matrix whose side is the
//! full tensor dimension `n^k`. The side length is capped so that a bad
//! command line fails with [`Error::SizeLimit`] instead of exhausting memory.
//! The cap can be raised with the `BOSESEP_MAX_DIM` environment variable.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_DIM: usize = 4096;
pub const MAX_DIM_ENV: &str = "BOSESEP_MAX_DIM";

pub fn max_dim() -> usize {
    static MAX: OnceLock<usize> = OnceLock::new();
    *MAX.get_or_init(|| {
        std::env::var(MAX_DIM_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_DIM)
    })
}

pub fn check_dim(dim: usize) -> Result<()> {
    let limit = max_dim();
    if dim > limit {
        Err(Error::SizeLimit {
            requested: dim,
            limit,
        })
    } else {
        Ok(())
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::C64;

pub const RNG_ALGORITHM: &str = "ChaCha20";

/// A reproducible random stream: the same `(master, stream)` pair always
/// yields the same bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(master: u64, stream: u64) -> Self {
        Seed { master, stream }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }

    /// Child stream `index` of this seed, independent of sibling streams.
    pub fn child(&self, index: u64) -> Seed {
        Seed {
            master: splitmix64(
                self.master ^ splitmix64(self.stream.wrapping_add(0x5851_f42d_4c95_7f2d)),
            ),
            stream: index,
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{RNG_ALGORITHM}(master={}, stream={})",
            self.master, self.stream
        )
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector in `C^dim`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Uniform draw from the probability simplex (Dirichlet with all ones).
pub fn uniform_simplex<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 && w.iter().all(|&x| x > 0.0) {
            return w.into_iter().map(|x| x / total).collect();
        }
    }
}

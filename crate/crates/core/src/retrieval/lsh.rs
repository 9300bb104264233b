use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::retrieval::codebook::words_for;
use crate::retrieval::{BinaryCodebook, RealEmbeddings};

/// Random-hyperplane sign quantizer: bit `k` is 1 iff `w_k · x >= 0` for a
/// standard Gaussian direction `w_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LshQuantizer {
    source_dim: usize,
    bits: usize,
    seed: u64,
    planes: Vec<f64>,
}

impl LshQuantizer {
    pub fn new(source_dim: usize, bits: usize, seed: u64) -> Result<Self> {
        if source_dim == 0 || bits == 0 {
            return Err(Error::InvalidArgument("LSH needs a positive source dimension and bit count".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let planes = (0..source_dim * bits).map(|_| StandardNormal.sample(&mut rng)).collect();
        Ok(LshQuantizer {
            source_dim,
            bits,
            seed,
            planes,
        })
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Packed code of one vector.
    pub fn quantize_vector(&self, x: &[f64]) -> Result<Vec<u64>> {
        if x.len() != self.source_dim {
            return Err(Error::DimensionMismatch {
                what: "LSH source dimension",
                expected: self.source_dim,
                found: x.len(),
            });
        }
        let mut code = vec![0u64; words_for(self.bits)];
        for (k, w) in self.planes.chunks_exact(self.source_dim).enumerate() {
            let dot: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
            if dot >= 0.0 {
                code[k / 64] |= 1 << (k % 64);
            }
        }
        Ok(code)
    }

    pub fn quantize(&self, embeddings: &RealEmbeddings) -> Result<BinaryCodebook> {
        let mut words = Vec::with_capacity(embeddings.num_nodes() * words_for(self.bits));
        let mut x = vec![0.0; embeddings.dim()];
        for i in 0..embeddings.num_nodes() {
            for (a, &b) in x.iter_mut().zip(embeddings.row(i)) {
                *a = f64::from(b);
            }
            words.extend(self.quantize_vector(&x)?);
        }
        BinaryCodebook::from_words(embeddings.num_nodes(), self.bits, words)
    }
}

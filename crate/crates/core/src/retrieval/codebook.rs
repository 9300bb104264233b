use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::model::BernoulliModel;

const MAGIC: &[u8; 4] = b"BGEC";
const VERSION: u32 = 1;

/// `N × d` bit matrix packed into 64-bit words, bit `k` of a row living at
/// bit `k % 64` of word `k / 64`. Padding bits are always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCodebook {
    num_nodes: usize,
    dim: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

pub(crate) fn words_for(dim: usize) -> usize {
    dim.div_ceil(64)
}

/// Mask of the live bits in the last word of a `dim`-bit row.
pub(crate) fn tail_mask(dim: usize) -> u64 {
    match dim % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl BinaryCodebook {
    pub fn zeros(num_nodes: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("code width must be at least 1 bit".into()));
        }
        let words_per_row = words_for(dim);
        Ok(BinaryCodebook {
            num_nodes,
            dim,
            words_per_row,
            words: vec![0; num_nodes * words_per_row],
        })
    }

    pub fn from_fn(num_nodes: usize, dim: usize, mut bit: impl FnMut(NodeId, usize) -> bool) -> Result<Self> {
        let mut cb = Self::zeros(num_nodes, dim)?;
        for i in 0..num_nodes {
            for k in 0..dim {
                if bit(i, k) {
                    cb.set(i, k, true);
                }
            }
        }
        Ok(cb)
    }

    /// Rows given as packed words; padding bits are cleared.
    pub fn from_words(num_nodes: usize, dim: usize, mut words: Vec<u64>) -> Result<Self> {
        let mut cb = Self::zeros(0, dim)?;
        let expected = num_nodes * cb.words_per_row;
        if words.len() != expected {
            return Err(Error::DimensionMismatch {
                what: "codebook words",
                expected,
                found: words.len(),
            });
        }
        let mask = tail_mask(dim);
        for row in words.chunks_mut(cb.words_per_row) {
            *row.last_mut().unwrap() &= mask;
        }
        cb.num_nodes = num_nodes;
        cb.words = words;
        Ok(cb)
    }

    /// Uniformly random codes.
    pub fn random(num_nodes: usize, dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let words = (0..num_nodes * words_for(dim)).map(|_| rng.random()).collect();
        Self::from_words(num_nodes, dim, words)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Packed words of row `i`. Panics when out of range.
    pub fn row(&self, i: NodeId) -> &[u64] {
        &self.words[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn bit(&self, i: NodeId, k: usize) -> bool {
        self.row(i)[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn set(&mut self, i: NodeId, k: usize, value: bool) {
        assert!(k < self.dim, "bit {k} out of range for {}-bit codes", self.dim);
        let w = &mut self.words[i * self.words_per_row + k / 64];
        if value {
            *w |= 1 << (k % 64);
        } else {
            *w &= !(1 << (k % 64));
        }
    }

    pub fn check_node(&self, i: NodeId) -> Result<()> {
        if i < self.num_nodes {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: i,
                num_nodes: self.num_nodes,
            })
        }
    }

    /// Row `i` as a single word; requires `d <= 64`.
    pub fn code(&self, i: NodeId) -> Result<u64> {
        if self.dim > 64 {
            return Err(Error::CodeTooWide(self.dim));
        }
        self.check_node(i)?;
        Ok(self.words[i])
    }

    pub fn hamming(&self, i: NodeId, j: NodeId) -> Result<u32> {
        self.check_node(i)?;
        self.check_node(j)?;
        Ok(hamming_words(self.row(i), self.row(j)))
    }

    /// Distance from row `i` to an arbitrary packed code of the same width.
    pub fn hamming_to(&self, i: NodeId, code: &[u64]) -> u32 {
        hamming_words(self.row(i), code)
    }

    pub fn check_code(&self, code: &[u64]) -> Result<()> {
        if code.len() != self.words_per_row {
            return Err(Error::DimensionMismatch {
                what: "query code words",
                expected: self.words_per_row,
                found: code.len(),
            });
        }
        if code.last().is_some_and(|w| w & !tail_mask(self.dim) != 0) {
            return Err(Error::InvalidArgument(format!("query code has bits set beyond bit {}", self.dim)));
        }
        Ok(())
    }

    /// Row `i` as `0`/`1` characters, bit 0 first.
    pub fn bit_string(&self, i: NodeId) -> String {
        (0..self.dim).map(|k| if self.bit(i, k) { '1' } else { '0' }).collect()
    }

    pub fn bytes_per_row(&self) -> usize {
        self.dim.div_ceil(8)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.num_nodes as u64).to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        let nbytes = self.bytes_per_row();
        let mut buf = Vec::with_capacity(self.words_per_row * 8);
        for i in 0..self.num_nodes {
            buf.clear();
            for word in self.row(i) {
                buf.extend_from_slice(&word.to_le_bytes());
            }
            w.write_all(&buf[..nbytes])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_exact(&mut r, &mut magic, "magic")?;
        if &magic != MAGIC {
            return Err(Error::Format("not a codebook file (bad magic)".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        read_exact(&mut r, &mut b4, "version")?;
        let version = u32::from_le_bytes(b4);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported codebook version {version}")));
        }
        read_exact(&mut r, &mut b8, "node count")?;
        let num_nodes = usize::try_from(u64::from_le_bytes(b8))
            .map_err(|_| Error::Format("node count does not fit in memory".into()))?;
        read_exact(&mut r, &mut b4, "dimension")?;
        let dim = u32::from_le_bytes(b4) as usize;
        let mut cb = Self::zeros(0, dim).map_err(|e| Error::Format(e.to_string()))?;
        let nbytes = cb.bytes_per_row();
        let mut words = Vec::new();
        words
            .try_reserve_exact(num_nodes.saturating_mul(cb.words_per_row))
            .map_err(|_| Error::OutOfMemory(num_nodes.saturating_mul(cb.words_per_row * 8)))?;
        let mut row = vec![0u8; cb.words_per_row * 8];
        let mask = tail_mask(dim);
        for _ in 0..num_nodes {
            read_exact(&mut r, &mut row[..nbytes], "code rows")?;
            let start = words.len();
            words.extend(row.chunks(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())));
            if words[words.len() - 1] & !mask != 0 {
                return Err(Error::Format(format!("row {} has padding bits set", start / cb.words_per_row)));
            }
        }
        let mut probe = [0u8; 1];
        if r.read(&mut probe)? != 0 {
            return Err(Error::Format("trailing bytes after codebook rows".into()));
        }
        cb.num_nodes = num_nodes;
        cb.words = words;
        Ok(cb)
    }

    /// Bytes held by the packed rows.
    pub fn heap_bytes(&self) -> usize {
        self.words.len() * 8
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format(format!("codebook truncated while reading {what}")),
        _ => Error::Io(e),
    })
}

pub(crate) fn hamming_words(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

/// Maximum-likelihood rounding: bit is 1 iff `p > 1/2`, so `p = 1/2` gives 0.
pub fn discretize(model: &BernoulliModel) -> BinaryCodebook {
    let d = model.dim();
    let mut cb = BinaryCodebook::zeros(model.num_nodes(), d).expect("model dimension is positive");
    for i in 0..model.num_nodes() {
        for (k, p) in model.probabilities(i).into_iter().enumerate() {
            if p > 0.5 {
                cb.set(i, k, true);
            }
        }
    }
    cb
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sigmoid;
    use proptest::prelude::*;
    use rand::Rng;

    fn logit(p: f64) -> f64 {
        (p / (1.0 - p)).ln()
    }

    #[test]
    fn discretize_threshold_and_tie() {
        let logits = [0.2, 0.8, 0.5, 0.99, 0.99, 0.99].map(logit).to_vec();
        let model = BernoulliModel::from_logits(2, 3, logits, -1.0, 0.0).unwrap();
        let cb = discretize(&model);
        assert_eq!(cb.bit_string(0), "010");
        assert_eq!(cb.bit_string(1), "111");
    }

    #[test]
    fn discretize_is_entrywise_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (n, d) = (40, 70);
        let logits: Vec<f64> = (0..n * d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let model = BernoulliModel::from_logits(n, d, logits.clone(), -1.0, 0.0).unwrap();
        let cb = discretize(&model);
        for i in 0..n {
            for k in 0..d {
                let p = sigmoid(logits[i * d + k]);
                // likelihood of bit 1 is p, of bit 0 is 1 - p
                let argmax = p > 1.0 - p;
                assert_eq!(cb.bit(i, k), argmax);
            }
        }
    }

    #[test]
    fn hamming_examples() {
        let cb = BinaryCodebook::from_fn(4, 25, |i, k| match i {
            0 => true,
            1 => false,
            2 => [true, false, true, false][k % 4] && k < 4,
            _ => [true, false, false, true][k % 4] && k < 4,
        })
        .unwrap();
        assert_eq!(cb.hamming(0, 0).unwrap(), 0);
        assert_eq!(cb.hamming(0, 1).unwrap(), 25);
        assert_eq!(cb.hamming(2, 3).unwrap(), 2);
        assert!(cb.hamming(0, 4).is_err());
    }

    fn naive(cb: &BinaryCodebook, i: usize, j: usize) -> u32 {
        (0..cb.dim()).filter(|&k| cb.bit(i, k) != cb.bit(j, k)).count() as u32
    }

    #[test]
    fn popcount_matches_naive_exhaustively_small_d() {
        for d in 1..=8 {
            let cb = BinaryCodebook::from_words(1 << d, d, (0..1u64 << d).collect()).unwrap();
            for i in 0..cb.num_nodes() {
                for j in 0..cb.num_nodes() {
                    assert_eq!(cb.hamming(i, j).unwrap(), naive(&cb, i, j));
                }
            }
        }
    }

    #[test]
    fn padding_is_cleared() {
        let cb = BinaryCodebook::from_words(1, 3, vec![u64::MAX]).unwrap();
        assert_eq!(cb.row(0), &[0b111]);
        assert!(cb.check_code(&[0b1000]).is_err());
        assert!(cb.check_code(&[0b101]).is_ok());
        assert!(cb.check_code(&[0, 0]).is_err());
    }

    #[test]
    fn file_layout() {
        let cb = BinaryCodebook::from_fn(2, 10, |i, k| i == 1 && (k == 0 || k == 9)).unwrap();
        let mut buf = Vec::new();
        cb.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"BGEC");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(buf[16..20].try_into().unwrap()), 10);
        assert_eq!(&buf[20..], &[0, 0, 0b1, 0b10]);
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let cb = BinaryCodebook::random(3, 12, 1).unwrap();
        let mut buf = Vec::new();
        cb.write_to(&mut buf).unwrap();
        assert!(matches!(BinaryCodebook::read_from(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        let mut extra = buf.clone();
        extra.push(0);
        assert!(matches!(BinaryCodebook::read_from(&extra[..]), Err(Error::Format(_))));
        let mut pad = buf.clone();
        *pad.last_mut().unwrap() |= 0x80;
        assert!(matches!(BinaryCodebook::read_from(&pad[..]), Err(Error::Format(_))));
        let mut magic = buf;
        magic[0] = b'X';
        assert!(matches!(BinaryCodebook::read_from(&magic[..]), Err(Error::Format(_))));
    }

    proptest! {
        #[test]
        fn round_trip(n in 0usize..20, d in 1usize..150, seed: u64) {
            let cb = BinaryCodebook::random(n, d, seed).unwrap();
            let mut buf = Vec::new();
            cb.write_to(&mut buf).unwrap();
            prop_assert_eq!(buf.len(), 20 + n * d.div_ceil(8));
            prop_assert_eq!(BinaryCodebook::read_from(&buf[..]).unwrap(), cb);
        }

        #[test]
        fn popcount_matches_naive(d in 17usize..200, seed: u64) {
            let cb = BinaryCodebook::random(6, d, seed).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    prop_assert_eq!(cb.hamming(i, j).unwrap(), naive(&cb, i, j));
                }
            }
        }

        #[test]
        fn metric_axioms(d in 1usize..130, seed: u64) {
            let cb = BinaryCodebook::random(3, d, seed).unwrap();
            let h = |i, j| cb.hamming(i, j).unwrap();
            prop_assert_eq!(h(0, 0), 0);
            prop_assert_eq!(h(0, 1), h(1, 0));
            prop_assert!(h(0, 2) <= h(0, 1) + h(1, 2));
            prop_assert!(h(0, 1) as usize <= d);
        }
    }
}

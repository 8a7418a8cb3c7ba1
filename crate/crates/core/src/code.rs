//! Static code definition and polar encoding.
//!
//! A code of length `N = 2^n` maps a source block `u` to `x = u · B_N · F^{⊗n}`
//! over GF(2), where `F = [[1, 0], [1, 1]]` and `B_N` is the bit-reversal
//! permutation. Indices are 0-based throughout.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How an information set was chosen. Stored alongside the code so results
/// files can always be traced back to their construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionMeta {
    pub method: String,
    pub channel_param: f64,
    /// One value per synthesized channel, smaller is more reliable.
    pub reliabilities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

/// Code length, information set and frozen bit values.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeConfig {
    n: u32,
    info_set: Vec<usize>,
    is_info: Vec<bool>,
    /// Indexed by position; zero at information positions.
    frozen_bits: Vec<u8>,
    construction: Option<ConstructionMeta>,
}

/// On-disk layout of a code specification file.
#[derive(Debug, Serialize, Deserialize)]
struct CodeFile {
    n: u32,
    #[serde(rename = "K")]
    k: usize,
    info_set: Vec<usize>,
    frozen_values: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    construction: Option<ConstructionMeta>,
}

impl CodeConfig {
    /// Builds a code with all frozen bits set to zero.
    pub fn new(n: u32, info_set: impl IntoIterator<Item = usize>) -> Result<Self> {
        let len = block_length(n)?;
        let info: Vec<usize> = info_set.into_iter().collect();
        let frozen = vec![0; len - info.len().min(len)];
        Self::with_frozen_values(n, info, &frozen)
    }

    /// Builds a code with explicit frozen values, given in index order of the
    /// frozen set.
    pub fn with_frozen_values(n: u32, mut info_set: Vec<usize>, frozen_values: &[u8]) -> Result<Self> {
        let len = block_length(n)?;
        info_set.sort_unstable();
        if info_set.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInfoSet("duplicate index".into()));
        }
        if let Some(&last) = info_set.last() {
            if last >= len {
                return Err(Error::InvalidInfoSet(format!("index {last} >= N = {len}")));
            }
        }
        let k = info_set.len();
        if frozen_values.len() != len - k {
            return Err(Error::LengthMismatch { expected: len - k, actual: frozen_values.len() });
        }
        if let Some(&b) = frozen_values.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidBit(b));
        }
        let mut is_info = vec![false; len];
        for &i in &info_set {
            is_info[i] = true;
        }
        let mut frozen_bits = vec![0; len];
        let mut values = frozen_values.iter();
        for (slot, _) in frozen_bits.iter_mut().zip(&is_info).filter(|(_, &info)| !info) {
            *slot = *values.next().expect("length checked above");
        }
        Ok(Self { n, info_set, is_info, frozen_bits, construction: None })
    }

    pub fn with_construction(mut self, meta: ConstructionMeta) -> Self {
        self.construction = Some(meta);
        self
    }

    /// `log2 N`.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Block length `N`.
    pub fn len(&self) -> usize {
        self.is_info.len()
    }

    /// Always false; a code has at least one position.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.len() as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn is_info(&self, index: usize) -> bool {
        self.is_info[index]
    }

    pub fn is_frozen(&self, index: usize) -> bool {
        !self.is_info[index]
    }

    /// Frozen value at `index`; zero at information positions.
    pub fn frozen_bit(&self, index: usize) -> u8 {
        self.frozen_bits[index]
    }

    /// Frozen values in index order of the frozen set (length `N - K`).
    pub fn frozen_values(&self) -> Vec<u8> {
        self.frozen_bits.iter().zip(&self.is_info).filter(|(_, &info)| !info).map(|(&b, _)| b).collect()
    }

    pub fn construction(&self) -> Option<&ConstructionMeta> {
        self.construction.as_ref()
    }

    /// Source block with frozen values in place and `info_bits` scattered over
    /// the information set.
    pub fn source_block(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        if info_bits.len() != self.k() {
            return Err(Error::LengthMismatch { expected: self.k(), actual: info_bits.len() });
        }
        let mut u = self.frozen_bits.clone();
        for (&i, &b) in self.info_set.iter().zip(info_bits) {
            if b > 1 {
                return Err(Error::InvalidBit(b));
            }
            u[i] = b;
        }
        Ok(u)
    }

    /// Extracts the information bits of a source block.
    pub fn info_bits(&self, u: &[u8]) -> Vec<u8> {
        self.info_set.iter().map(|&i| u[i]).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CodeFile {
            n: self.n,
            k: self.k(),
            info_set: self.info_set.clone(),
            frozen_values: self.frozen_values(),
            construction: self.construction.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodeFile = serde_json::from_str(text)?;
        if file.info_set.len() != file.k {
            return Err(Error::InvalidInfoSet(format!(
                "K = {} but info_set has {} entries",
                file.k,
                file.info_set.len()
            )));
        }
        if file.info_set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInfoSet("info_set must be strictly increasing".into()));
        }
        let code = Self::with_frozen_values(file.n, file.info_set, &file.frozen_values)?;
        Ok(match file.construction {
            Some(meta) => code.with_construction(meta),
            None => code,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

fn block_length(n: u32) -> Result<usize> {
    if n > 24 {
        return Err(Error::InvalidParameter(format!("n = {n} is too large")));
    }
    Ok(1usize << n)
}

/// Bit-reversal permutation of `{0, .., 2^n - 1}`: entry `i` is the integer
/// whose `n`-bit representation is that of `i` reversed.
pub fn bit_reversal_permutation(n: u32) -> Vec<usize> {
    (0..1usize << n).map(|i| reverse_bits(i, n)).collect()
}

pub(crate) fn reverse_bits(i: usize, n: u32) -> usize {
    if n == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - n)
    }
}

/// `x = u · B_N · F^{⊗n}` via the in-place butterfly.
pub fn encode(u: &[u8], code: &CodeConfig) -> Result<Vec<u8>> {
    if u.len() != code.len() {
        return Err(Error::LengthMismatch { expected: code.len(), actual: u.len() });
    }
    if let Some(&b) = u.iter().find(|&&b| b > 1) {
        return Err(Error::InvalidBit(b));
    }
    let n = code.n();
    let mut x: Vec<u8> = (0..u.len()).map(|i| u[reverse_bits(i, n)]).collect();
    let mut half = x.len() / 2;
    while half > 0 {
        for block in x.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half /= 2;
    }
    Ok(x)
}

/// Union bound on SC block error: `min(1, Σ_{i∈info} pe_i)`.
pub fn sc_union_bound(pe: &[f64], info_set: &[usize]) -> Result<f64> {
    if let Some(&p) = pe.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let mut sum = 0.0;
    for &i in info_set {
        let p = *pe.get(i).ok_or(Error::InvalidInfoSet(format!("index {i} out of range")))?;
        sum += p;
    }
    Ok(sum.min(1.0))
}

use crate::code::{encode, CodeConfig};
use crate::metrics::{clamp_log, LogApp};
use crate::{Error, Result};

/// Exhaustive maximum-likelihood decoding over all `2^K` source blocks.
///
/// Scores each block by `Σ_j log P(x_j | y_j)` of its codeword, which is the
/// full-block log-APP under a uniform prior. Ties keep the lexicographically
/// smallest source block. Returns the block and its score.
pub fn brute_force_ml(code: &CodeConfig, apps: &[LogApp]) -> Result<(Vec<u8>, f64)> {
    let k = code.k();
    if k > 20 {
        return Err(Error::SizeGuard(format!("brute force ML supports K <= 20, got {k}")));
    }
    if apps.len() != code.len() {
        return Err(Error::LengthMismatch { expected: code.len(), actual: apps.len() });
    }
    let mut best: Option<(Vec<u8>, f64)> = None;
    let mut info = vec![0u8; k];
    for word in 0u32..1 << k {
        for (t, bit) in info.iter_mut().enumerate() {
            *bit = ((word >> (k - 1 - t)) & 1) as u8;
        }
        let u = code.source_block(&info)?;
        let x = encode(&u, code)?;
        let score = x.iter().zip(apps).fold(0.0, |acc, (&b, app)| clamp_log(acc + clamp_log(app[b as usize])));
        if best.as_ref().is_none_or(|(_, s)| score > *s) {
            best = Some((u, score));
        }
    }
    Ok(best.expect("at least one source block"))
}

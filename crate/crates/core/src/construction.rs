//! Reliability estimates for the synthesized channels and information set
//! selection.
//!
//! Channel index `i` in a profile is the synthesized channel seen by source bit
//! `u_i`. Splitting a channel yields the degraded ("minus") channel at even
//! index `2i` and the upgraded ("plus") channel at `2i + 1`.
//!
//! Three estimators are provided:
//!
//! * [`bhattacharyya_bec`]: exact Bhattacharyya parameters for the BEC,
//!   `Z⁻ = 2Z − Z²`, `Z⁺ = Z²`. [`bhattacharyya_awgn`] seeds the same recursion
//!   with the AWGN Bhattacharyya parameter `exp(−1/(2σ²))` as a surrogate.
//! * [`gaussian_approx_awgn`]: Gaussian approximation of the LLR densities. The
//!   mean LLR starts at `2/σ²`, splits as `m⁻ = φ⁻¹(1 − (1 − φ(m))²)` and
//!   `m⁺ = 2m`, and the error probability is `Q(√(m/2))`. `φ` is the two-piece
//!   approximation
//!   `φ(x) = exp(−0.4527·x^0.86 + 0.0218)` for `0 < x < 10` and
//!   `φ(x) = √(π/x)·exp(−x/4)·(1 − 10/(7x))` for `x ≥ 10`, with `φ(0) = 1`.
//!   `φ⁻¹` inverts the first piece in closed form and the second by bisection.
//!   When `φ(m)` underflows the check update falls back to `m − 4·ln 2`.
//! * [`monte_carlo_pe`]: genie-aided SC. Random source blocks are decoded with
//!   every earlier bit corrected to the truth; ties decide 0, so an erased bit
//!   is wrong half the time.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::code::{encode, CodeConfig, ConstructionMeta};
use crate::exec::{map_indexed, Execution};
use crate::metrics::{MetricEngine, MetricMode};
use crate::{rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BhattacharyyaBec,
    GaussianApproxAwgn,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::BhattacharyyaBec => "bhattacharyya_bec",
            Method::GaussianApproxAwgn => "gaussian_approx_awgn",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// Per-channel reliability; smaller values are more reliable.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityProfile {
    pub method: Method,
    /// ε for the BEC, `E_b/N_0` in dB for AWGN-based estimates.
    pub channel_param: f64,
    pub values: Vec<f64>,
    pub trials: Option<u64>,
}

impl ReliabilityProfile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices sorted from most to least reliable; ties go to the smaller index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]).then(a.cmp(&b)));
        order
    }
}

fn check_length(len: usize) -> Result<u32> {
    if !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros())
}

/// Splits every value with `minus`/`plus` until `len` values exist.
fn polarize(seed: f64, len: usize, minus: impl Fn(f64) -> f64, plus: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut values = vec![seed];
    while values.len() < len {
        values = values.iter().flat_map(|&v| [minus(v), plus(v)]).collect();
    }
    values
}

pub fn bhattacharyya_bec(epsilon: f64, len: usize) -> Result<ReliabilityProfile> {
    check_length(len)?;
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::ProbabilityOutOfRange(epsilon));
    }
    Ok(ReliabilityProfile {
        method: Method::BhattacharyyaBec,
        channel_param: epsilon,
        values: polarize(epsilon, len, |z| 2.0 * z - z * z, |z| z * z),
        trials: None,
    })
}

/// BEC recursion seeded with the AWGN Bhattacharyya parameter.
pub fn bhattacharyya_awgn(ebn0_db: f64, rate: f64, len: usize) -> Result<ReliabilityProfile> {
    let ChannelModel::Biawgn { noise_variance } = ChannelModel::biawgn_ebn0(ebn0_db, rate)? else { unreachable!() };
    let mut profile = bhattacharyya_bec((-1.0 / (2.0 * noise_variance)).exp(), len)?;
    profile.channel_param = ebn0_db;
    Ok(profile)
}

const PHI_ALPHA: f64 = -0.4527;
const PHI_BETA: f64 = 0.86;
const PHI_GAMMA: f64 = 0.0218;
const PHI_KNEE: f64 = 10.0;

pub(crate) fn phi(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < PHI_KNEE {
        (PHI_ALPHA * x.powf(PHI_BETA) + PHI_GAMMA).exp().min(1.0)
    } else {
        (std::f64::consts::PI / x).sqrt() * (-x / 4.0).exp() * (1.0 - 10.0 / (7.0 * x))
    }
}

pub(crate) fn phi_inv(y: f64) -> f64 {
    if y >= 1.0 {
        return 0.0;
    }
    let first_piece_floor = (PHI_ALPHA * PHI_KNEE.powf(PHI_BETA) + PHI_GAMMA).exp();
    if y >= first_piece_floor {
        return ((PHI_GAMMA - y.ln()) / -PHI_ALPHA).powf(1.0 / PHI_BETA).min(PHI_KNEE);
    }
    let mut lo = PHI_KNEE;
    let mut hi = 2.0 * PHI_KNEE;
    while phi(hi) > y {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn check_node_mean(m: f64) -> f64 {
    let p = phi(m);
    if p < 1e-250 {
        return (m - 4.0 * std::f64::consts::LN_2).max(0.0);
    }
    phi_inv(2.0 * p - p * p)
}

/// `Q(√(m/2)) = ½·erfc(√m / 2)` for an LLR distributed as `N(m, 2m)`.
fn gaussian_error_probability(mean: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(mean.max(0.0).sqrt() / 2.0)
}

pub fn gaussian_approx_awgn(ebn0_db: f64, rate: f64, len: usize) -> Result<ReliabilityProfile> {
    check_length(len)?;
    let ChannelModel::Biawgn { noise_variance } = ChannelModel::biawgn_ebn0(ebn0_db, rate)? else { unreachable!() };
    let means = polarize(2.0 / noise_variance, len, check_node_mean, |m| 2.0 * m);
    Ok(ReliabilityProfile {
        method: Method::GaussianApproxAwgn,
        channel_param: ebn0_db,
        values: means.into_iter().map(gaussian_error_probability).collect(),
        trials: None,
    })
}

/// Trials per work item; fixed so the merged counts never depend on scheduling.
const TRIAL_CHUNK: u64 = 512;

/// Genie-aided SC error rate per synthesized channel.
///
/// `channel_param` is recorded verbatim in the profile.
pub fn monte_carlo_pe(
    channel: &ChannelModel,
    channel_param: f64,
    len: usize,
    trials: u64,
    seed: u64,
    execution: Execution,
) -> Result<ReliabilityProfile> {
    let n = check_length(len)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let code = CodeConfig::new(n, 0..len)?;
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    let partial = map_indexed(0..chunks, execution, |chunk| {
        let mut errors = vec![0u64; len];
        let end = ((chunk + 1) * TRIAL_CHUNK).min(trials);
        for trial in chunk * TRIAL_CHUNK..end {
            genie_trial(&code, channel, seed, trial, &mut errors);
        }
        errors
    });
    let mut errors = vec![0u64; len];
    for counts in partial {
        for (total, c) in errors.iter_mut().zip(counts) {
            *total += c;
        }
    }
    Ok(ReliabilityProfile {
        method: Method::MonteCarlo,
        channel_param,
        values: errors.iter().map(|&e| e as f64 / trials as f64).collect(),
        trials: Some(trials),
    })
}

fn genie_trial(code: &CodeConfig, channel: &ChannelModel, seed: u64, trial: u64, errors: &mut [u64]) {
    use rand::Rng;
    let mut rng = rng::block_rng(seed, 0, trial);
    let u: Vec<u8> = (0..code.len()).map(|_| rng.gen_range(0..2)).collect();
    let x = encode(&u, code).expect("valid block");
    let y = channel.transmit(&x, &mut rng);
    let apps = channel.initial_log_app(&y).expect("matching observation");
    let mut engine = MetricEngine::new(code, &apps, MetricMode::Exact).expect("matching length");
    let mut path = engine.root();
    for (i, &bit) in u.iter().enumerate() {
        let (next, branch) = engine.extend_owned(path, bit).expect("all positions are information");
        let decision = u8::from(branch[0] < branch[1]);
        if decision != bit {
            errors[i] += 1;
        }
        path = next;
    }
}

/// Information set = the `k` most reliable channels, frozen bits all zero.
pub fn select_information_set(profile: &ReliabilityProfile, k: usize) -> Result<CodeConfig> {
    let len = profile.values.len();
    let n = check_length(len)?;
    if k > len {
        return Err(Error::DimensionOutOfRange { k, n: len });
    }
    let mut info: Vec<usize> = profile.ranking().into_iter().take(k).collect();
    info.sort_unstable();
    let meta = ConstructionMeta {
        method: profile.method.name().to_string(),
        channel_param: profile.channel_param,
        reliabilities: profile.values.clone(),
        channel: None,
        design_rate: None,
        trials: profile.trials,
    };
    Ok(CodeConfig::new(n, info)?.with_construction(meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn bhattacharyya_examples() {
        assert_close(&bhattacharyya_bec(0.5, 2).unwrap().values, &[0.75, 0.25], 1e-15);
        assert_close(&bhattacharyya_bec(0.5, 4).unwrap().values, &[0.9375, 0.5625, 0.4375, 0.0625], 1e-15);
        assert!(bhattacharyya_bec(0.0, 64).unwrap().values.iter().all(|&z| z == 0.0));
        assert!(bhattacharyya_bec(1.1, 4).is_err());
        assert!(bhattacharyya_bec(0.5, 6).is_err());
    }

    #[test]
    fn bhattacharyya_conserves_erasure() {
        for eps in [0.03, 0.2, 0.5, 0.77, 1.0] {
            for n in 0..=12 {
                let values = bhattacharyya_bec(eps, 1 << n).unwrap().values;
                assert!(values.iter().all(|z| (0.0..=1.0).contains(z)));
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                assert!((mean - eps).abs() < 1e-12, "eps {eps} n {n}");
            }
        }
    }

    #[test]
    fn phi_inverse_round_trips() {
        for x in [0.05, 0.5, 1.0, 3.0, 9.5, 11.0, 12.5, 40.0, 300.0] {
            let back = phi_inv(phi(x));
            assert!((back - x).abs() < 1e-6 * x.max(1.0), "x = {x}, back = {back}");
        }
        assert_eq!(phi_inv(1.0), 0.0);
    }

    #[test]
    fn ga_examples() {
        let high = gaussian_approx_awgn(100.0, 0.5, 64).unwrap();
        assert!(high.values.iter().all(|&p| p < 1e-6));
        let two = gaussian_approx_awgn(1.0, 0.5, 2).unwrap();
        assert!(two.values[1] <= two.values[0]);
        let wide = gaussian_approx_awgn(2.0, 0.5, 1024).unwrap();
        assert!(wide.values[1023] <= wide.values[0]);
        assert!(wide.values.iter().all(|p| (0.0..=0.5).contains(p)));
        assert!(gaussian_approx_awgn(1.0, 0.0, 8).is_err());
    }

    #[test]
    fn ga_ranking_agrees_with_monte_carlo() {
        let ga = gaussian_approx_awgn(2.0, 0.5, 8).unwrap();
        let channel = ChannelModel::biawgn_ebn0(2.0, 0.5).unwrap();
        let mc = monte_carlo_pe(&channel, 2.0, 8, 200_000, 17, Execution::default()).unwrap();
        let (ga_rank, mc_rank) = (ga.ranking(), mc.ranking());
        let agree = ga_rank.iter().zip(&mc_rank).filter(|(a, b)| a == b).count();
        assert!(agree >= 6, "GA {ga_rank:?} vs MC {mc_rank:?}");
    }

    #[test]
    fn monte_carlo_noiseless_is_zero() {
        let channel = ChannelModel::bec(0.0).unwrap();
        let mc = monte_carlo_pe(&channel, 0.0, 16, 300, 1, Execution::default()).unwrap();
        assert!(mc.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn monte_carlo_bec_matches_half_bhattacharyya() {
        let trials = 100_000u64;
        let channel = ChannelModel::bec(0.5).unwrap();
        let mc = monte_carlo_pe(&channel, 0.5, 4, trials, 99, Execution::default()).unwrap();
        let z = bhattacharyya_bec(0.5, 4).unwrap().values;
        for (est, z) in mc.values.iter().zip(&z) {
            let p = z / 2.0;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((est - p).abs() <= 3.0 * sigma, "estimate {est} vs {p}");
        }
    }

    #[test]
    fn monte_carlo_single_trial_and_determinism() {
        let channel = ChannelModel::biawgn(1.0).unwrap();
        let one = monte_carlo_pe(&channel, 0.0, 8, 1, 5, Execution::default()).unwrap();
        assert!(one.values.iter().all(|&v| v == 0.0 || v == 1.0));
        let a = monte_carlo_pe(&channel, 0.0, 16, 2000, 5, Execution::Sequential).unwrap();
        let b = monte_carlo_pe(&channel, 0.0, 16, 2000, 5, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_pe(&channel, 0.0, 16, 0, 5, Execution::default()).is_err());
    }

    #[test]
    fn selection_examples() {
        let profile = bhattacharyya_bec(0.5, 4).unwrap();
        assert_eq!(select_information_set(&profile, 2).unwrap().info_set(), &[2, 3]);
        assert_eq!(select_information_set(&profile, 4).unwrap().info_set(), &[0, 1, 2, 3]);
        let flat = ReliabilityProfile {
            method: Method::MonteCarlo,
            channel_param: 0.0,
            values: vec![0.25; 8],
            trials: Some(4),
        };
        assert_eq!(select_information_set(&flat, 1).unwrap().info_set(), &[0]);
        assert!(select_information_set(&flat, 9).is_err());
    }

    #[test]
    fn selection_is_nested() {
        let profile = gaussian_approx_awgn(1.5, 0.5, 128).unwrap();
        let mut previous: Vec<usize> = Vec::new();
        for k in 0..=128 {
            let info = select_information_set(&profile, k).unwrap().info_set().to_vec();
            assert!(previous.iter().all(|i| info.contains(i)));
            previous = info;
        }
    }
}

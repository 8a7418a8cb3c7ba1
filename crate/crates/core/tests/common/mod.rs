#![allow(dead_code)]

use polar_isc::code::encode;
use polar_isc::construction::{bhattacharyya_bec, gaussian_approx_awgn, select_information_set};
use polar_isc::metrics::LogApp;
use polar_isc::{rng, ChannelModel, CodeConfig};
use rand::Rng;

pub fn ga_code(len: usize, k: usize, design_ebn0: f64) -> CodeConfig {
    let rate = k.max(1) as f64 / len as f64;
    select_information_set(&gaussian_approx_awgn(design_ebn0, rate, len).unwrap(), k).unwrap()
}

pub fn bec_code(len: usize, k: usize, erasure: f64) -> CodeConfig {
    select_information_set(&bhattacharyya_bec(erasure, len).unwrap(), k).unwrap()
}

/// Random source block, its transmission and the resulting log-APPs.
pub fn draw(code: &CodeConfig, channel: &ChannelModel, seed: u64, block: u64) -> (Vec<u8>, Vec<LogApp>) {
    let mut rng = rng::block_rng(seed, 0, block);
    let info: Vec<u8> = (0..code.k()).map(|_| rng.gen_range(0..2)).collect();
    let u = code.source_block(&info).unwrap();
    let x = encode(&u, code).unwrap();
    let y = channel.transmit(&x, &mut rng);
    (u, channel.initial_log_app(&y).unwrap())
}

pub fn awgn_draw(code: &CodeConfig, ebn0_db: f64, seed: u64, block: u64) -> (Vec<u8>, Vec<LogApp>) {
    let rate = code.rate().max(1.0 / code.len() as f64);
    draw(code, &ChannelModel::biawgn_ebn0(ebn0_db, rate).unwrap(), seed, block)
}

/// Log-APPs of a noiseless BPSK observation of `u`.
pub fn noiseless(code: &CodeConfig, u: &[u8]) -> Vec<LogApp> {
    let x = encode(u, code).unwrap();
    let y: Vec<f64> = x.iter().map(|&b| 1.0 - 2.0 * b as f64).collect();
    ChannelModel::biawgn(0.05).unwrap().initial_log_app(&polar_isc::Observation::Awgn(y)).unwrap()
}

mod common;

use common::{awgn_draw, bec_code, draw, ga_code, noiseless};
use polar_isc::decoders::{brute_force_ml, decode_sc, tau_from_tolerance};
use polar_isc::metrics::prefix_app;
use polar_isc::{Algorithm, ChannelModel, CodeConfig, DecoderConfig, MetricMode, Pruning};
use proptest::prelude::*;

fn decoder(algorithm: Algorithm) -> DecoderConfig {
    DecoderConfig::new(algorithm).unwrap()
}

fn bits(algorithm: Algorithm, code: &CodeConfig, apps: &[[f64; 2]]) -> Vec<u8> {
    decoder(algorithm).decode(code, apps).unwrap().bits
}

#[test]
fn width_one_searches_collapse_to_sc() {
    for (len, k) in [(8, 4), (16, 8), (64, 32)] {
        let code = ga_code(len, k, 2.0);
        for block in 0..200 {
            let (_, apps) = awgn_draw(&code, 0.5, 11, block);
            let sc = decode_sc(&code, &apps, MetricMode::Exact).unwrap().bits;
            for algorithm in [
                Algorithm::Scl { width: 1 },
                Algorithm::Scs { width: 1, depth: 2 },
                Algorithm::Scs { width: 1, depth: 1024 },
                Algorithm::Sch { width: 1, depth: 2 },
                Algorithm::Sch { width: 1, depth: 64 },
            ] {
                assert_eq!(bits(algorithm, &code, &apps), sc, "{algorithm:?} N={len} block {block}");
            }
        }
    }
}

/// All four exhaustive-width searches agree with the ML oracle, except on
/// exact metric ties where any maximizer is acceptable.
fn assert_ml(code: &CodeConfig, apps: &[[f64; 2]], context: &str) {
    let (ml, ml_score) = brute_force_ml(code, apps).unwrap();
    let width = 1 << code.k();
    let depth = 2 * width * code.len();
    for algorithm in [
        Algorithm::Scl { width },
        Algorithm::Scs { width, depth },
        Algorithm::Sch { width, depth },
        Algorithm::Sch { width, depth: 2 * width },
    ] {
        let out = decoder(algorithm).decode(code, apps).unwrap();
        if out.bits != ml {
            assert!(
                (out.metric - ml_score).abs() < 1e-6,
                "{algorithm:?} {context}: {:?} ({}) vs ML {:?} ({ml_score})",
                out.bits,
                out.metric,
                ml
            );
        }
    }
}

#[test]
fn exhaustive_width_is_maximum_likelihood_awgn() {
    let code = ga_code(8, 4, 1.0);
    for snr in [-1.0, 1.0, 3.0] {
        for block in 0..300 {
            let (_, apps) = awgn_draw(&code, snr, 5, block);
            assert_ml(&code, &apps, &format!("snr {snr} block {block}"));
        }
    }
}

#[test]
fn exhaustive_width_is_maximum_likelihood_bec() {
    let code = bec_code(8, 4, 0.4);
    let channel = ChannelModel::bec(0.4).unwrap();
    for block in 0..300 {
        let (_, apps) = draw(&code, &channel, 9, block);
        assert_ml(&code, &apps, &format!("block {block}"));
    }
}

#[test]
fn prefix_oracle_ranks_leaves_like_brute_force() {
    for (len, k) in [(4, 2), (8, 4), (16, 6)] {
        let code = ga_code(len, k, 1.0);
        for block in 0..20 {
            let (_, apps) = awgn_draw(&code, 0.0, 21, block);
            let linear: Vec<[f64; 2]> = apps.iter().map(|a| [a[0].exp(), a[1].exp()]).collect();
            let mut best: Option<(Vec<u8>, f64)> = None;
            for word in 0u32..1 << k {
                let info: Vec<u8> = (0..k).map(|t| ((word >> (k - 1 - t)) & 1) as u8).collect();
                let u = code.source_block(&info).unwrap();
                let p = prefix_app(&u, &linear).unwrap();
                if best.as_ref().is_none_or(|(_, b)| p > *b) {
                    best = Some((u, p));
                }
            }
            let (oracle, p) = best.unwrap();
            let (ml, score) = brute_force_ml(&code, &apps).unwrap();
            assert_eq!(oracle, ml, "N={len} block {block}");
            assert!((p.ln() - score).abs() < 1e-9);
        }
    }
}

#[test]
fn sch_equivalences_hold_bit_for_bit() {
    for (len, k, width) in [(16, 8, 4), (64, 32, 8)] {
        let code = ga_code(len, k, 2.0);
        for block in 0..200 {
            let (_, apps) = awgn_draw(&code, 1.0, 13, block);
            let scl = bits(Algorithm::Scl { width }, &code, &apps);
            let scs = bits(Algorithm::Scs { width, depth: width * len }, &code, &apps);
            let sch_min = bits(Algorithm::Sch { width, depth: 2 * width }, &code, &apps);
            let sch_mid = bits(Algorithm::Sch { width, depth: 4 * width }, &code, &apps);
            let sch_max = bits(Algorithm::Sch { width, depth: width * len }, &code, &apps);
            assert_eq!(sch_min, scl, "SCH(L,2L) vs SCL, N={len} block {block}");
            assert_eq!(sch_max, scs, "SCH(L,LN) vs SCS, N={len} block {block}");
            assert_eq!(sch_mid, sch_min, "SCH D-invariance, N={len} block {block}");
        }
    }
}

#[test]
fn counting_vector_is_capped_by_width() {
    let code = ga_code(64, 32, 2.0);
    for block in 0..100 {
        let (_, apps) = awgn_draw(&code, 0.0, 17, block);
        for algorithm in [
            Algorithm::Scl { width: 4 },
            Algorithm::Scs { width: 4, depth: 16 },
            Algorithm::Scs { width: 4, depth: 1024 },
            Algorithm::Sch { width: 4, depth: 8 },
            Algorithm::Sch { width: 4, depth: 64 },
        ] {
            let out = decoder(algorithm).decode(&code, &apps).unwrap();
            assert!(out.counts.iter().all(|&c| c <= 4), "{algorithm:?}: {:?}", out.counts);
            if let Algorithm::Scs { depth, .. } = algorithm {
                assert!(out.peak_occupancy <= depth);
            }
        }
    }
}

#[test]
fn loose_threshold_never_binds() {
    let code = ga_code(8, 4, 4.0);
    for block in 0..1000 {
        let (_, apps) = awgn_draw(&code, 6.0, 23, block);
        for algorithm in
            [Algorithm::Scl { width: 4 }, Algorithm::Scs { width: 4, depth: 64 }, Algorithm::Sch { width: 4, depth: 8 }]
        {
            let free = decoder(algorithm).decode(&code, &apps).unwrap();
            let pruned = decoder(algorithm).with_pruning(Pruning::from_tau(1e9).unwrap()).decode(&code, &apps).unwrap();
            assert_eq!(pruned.bits, free.bits);
            assert!(pruned.metric_ops <= free.metric_ops);
        }
    }
}

#[test]
fn noiseless_stack_search_is_cheaper_than_list() {
    let code = ga_code(64, 32, 2.0);
    for block in 0..20 {
        let (u, _) = awgn_draw(&code, 0.0, 29, block);
        let apps = noiseless(&code, &u);
        for width in [2, 4, 16] {
            let scs = decoder(Algorithm::Scs { width, depth: 256 }).decode(&code, &apps).unwrap();
            let scl = decoder(Algorithm::Scl { width }).decode(&code, &apps).unwrap();
            assert_eq!(scs.bits, u);
            assert_eq!(scl.bits, u);
            assert!(scs.metric_ops < scl.metric_ops, "L={width}: {} vs {}", scs.metric_ops, scl.metric_ops);
        }
    }
}

#[test]
fn all_frozen_code_returns_frozen_values() {
    let frozen = [1, 0, 1, 1, 0, 0, 1, 0];
    let code = CodeConfig::with_frozen_values(3, vec![], &frozen).unwrap();
    let (_, apps) = awgn_draw(&ga_code(8, 4, 1.0), -2.0, 31, 0);
    for algorithm in [
        Algorithm::Sc,
        Algorithm::Scl { width: 4 },
        Algorithm::Scs { width: 4, depth: 8 },
        Algorithm::Sch { width: 4, depth: 8 },
    ] {
        assert_eq!(bits(algorithm, &code, &apps), frozen);
    }
    assert_eq!(brute_force_ml(&code, &apps).unwrap().0, frozen);
}

#[test]
fn nonzero_frozen_values_are_respected() {
    let base = ga_code(16, 8, 2.0);
    let frozen: Vec<u8> = (0..8).map(|i| (i % 3 == 0) as u8).collect();
    let code = CodeConfig::with_frozen_values(4, base.info_set().to_vec(), &frozen).unwrap();
    assert_eq!(code.frozen_values(), frozen);
    let mut correct = 0;
    for block in 0..50 {
        let (u, apps) = awgn_draw(&code, 5.0, 37, block);
        let out = decoder(Algorithm::Scl { width: 8 }).decode(&code, &apps).unwrap();
        let placed: Vec<u8> = (0..16).filter(|&i| code.is_frozen(i)).map(|i| out.bits[i]).collect();
        assert_eq!(placed, frozen);
        correct += (out.bits == u) as u32;
    }
    assert!(correct >= 45);
}

#[test]
fn noiseless_sc_recovers_the_block_in_both_modes() {
    let code = ga_code(32, 16, 2.0);
    for block in 0..20 {
        let (u, _) = awgn_draw(&code, 0.0, 41, block);
        let apps = noiseless(&code, &u);
        assert_eq!(decode_sc(&code, &apps, MetricMode::Exact).unwrap().bits, u);
        assert_eq!(decode_sc(&code, &apps, MetricMode::MaxLog).unwrap().bits, u);
    }
}

#[test]
fn final_list_is_sorted_and_capped() {
    let code = ga_code(64, 32, 2.0);
    for block in 0..100 {
        let (_, apps) = awgn_draw(&code, 1.0, 43, block);
        for width in [1, 2, 4, 8, 16, 32] {
            let out = decoder(Algorithm::Scl { width }).decode(&code, &apps).unwrap();
            assert!(!out.final_list.is_empty() && out.final_list.len() <= width);
            assert!(out.final_list.windows(2).all(|w| w[0].metric >= w[1].metric));
            assert_eq!(out.final_list[0].bits, out.bits);
            assert_eq!(out.final_list[0].metric, out.metric);
        }
    }
}

#[test]
fn complexity_ordering_at_moderate_snr() {
    let code = ga_code(64, 32, 2.5);
    let (mut scs, mut sch, mut scl) = (0u64, 0u64, 0u64);
    for block in 0..1000 {
        let (_, apps) = awgn_draw(&code, 2.5, 47, block);
        scs += decoder(Algorithm::Scs { width: 8, depth: 512 }).decode(&code, &apps).unwrap().metric_ops;
        sch += decoder(Algorithm::Sch { width: 8, depth: 32 }).decode(&code, &apps).unwrap().metric_ops;
        scl += decoder(Algorithm::Scl { width: 8 }).decode(&code, &apps).unwrap().metric_ops;
    }
    assert!(scs <= sch && sch <= scl, "SCS {scs}, SCH {sch}, SCL {scl}");
}

#[test]
fn pruning_at_the_tolerance_rarely_changes_decisions() {
    let code = ga_code(64, 32, 2.0);
    let p_tol = 1e-3;
    let tau = tau_from_tolerance(code.k(), 8, p_tol).unwrap();
    let blocks = 10_000;
    let mut changed = 0;
    for block in 0..blocks {
        let (_, apps) = awgn_draw(&code, 2.0, 53, block);
        let free = decoder(Algorithm::Scl { width: 8 }).decode(&code, &apps).unwrap();
        let pruned = decoder(Algorithm::Scl { width: 8 })
            .with_pruning(Pruning::from_tau(tau).unwrap())
            .decode(&code, &apps)
            .unwrap();
        changed += (free.bits != pruned.bits) as u32;
    }
    assert!(changed as f64 / blocks as f64 <= 10.0 * p_tol, "{changed} of {blocks} changed");
}

#[test]
fn invalid_configurations_are_rejected() {
    assert!(DecoderConfig::new(Algorithm::Scl { width: 0 }).is_err());
    assert!(DecoderConfig::new(Algorithm::Scs { width: 4, depth: 1 }).is_err());
    assert!(DecoderConfig::new(Algorithm::Sch { width: 4, depth: 7 }).is_err());
    assert!(DecoderConfig::new(Algorithm::Sch { width: 4, depth: 8 }).is_ok());
    let code = ga_code(8, 4, 1.0);
    assert!(decoder(Algorithm::Sc).decode(&code, &[[0.0, 0.0]; 4]).is_err());
    let big = ga_code(64, 21, 1.0);
    assert!(brute_force_ml(&big, &vec![[-std::f64::consts::LN_2; 2]; 64]).is_err());
}

fn llrs(len: usize) -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec(-12.0f64..12.0, len).prop_map(|l| {
        l.into_iter()
            .map(|llr: f64| {
                // log P(0), log P(1) from an LLR.
                let p0 = -(-llr).exp().ln_1p();
                let p1 = -llr.exp().ln_1p();
                [p0, p1]
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn width_one_collapse_on_arbitrary_observations(apps in llrs(32)) {
        let code = ga_code(32, 16, 2.0);
        let sc = decode_sc(&code, &apps, MetricMode::Exact).unwrap().bits;
        prop_assert_eq!(&bits(Algorithm::Scl { width: 1 }, &code, &apps), &sc);
        prop_assert_eq!(&bits(Algorithm::Scs { width: 1, depth: 4 }, &code, &apps), &sc);
        prop_assert_eq!(&bits(Algorithm::Sch { width: 1, depth: 2 }, &code, &apps), &sc);
    }

    #[test]
    fn sch_is_list_at_minimum_depth(apps in llrs(32), width in 1usize..9) {
        let code = ga_code(32, 16, 2.0);
        prop_assert_eq!(
            bits(Algorithm::Sch { width, depth: 2 * width }, &code, &apps),
            bits(Algorithm::Scl { width }, &code, &apps)
        );
    }

    #[test]
    fn sch_output_is_depth_invariant(apps in llrs(32), width in 1usize..9, extra in 0usize..200) {
        let code = ga_code(32, 16, 2.0);
        prop_assert_eq!(
            bits(Algorithm::Sch { width, depth: 2 * width + extra }, &code, &apps),
            bits(Algorithm::Sch { width, depth: 2 * width }, &code, &apps)
        );
    }

    #[test]
    fn sc_cost_is_fixed(apps in llrs(64)) {
        let code = ga_code(64, 32, 2.0);
        prop_assert_eq!(decode_sc(&code, &apps, MetricMode::Exact).unwrap().metric_ops, 64 * 6);
    }
}

use crate::code::CodeConfig;
use crate::metrics::{Expansion, LogApp, MetricEngine, MetricMode};
use crate::Result;

use super::DecodeOutcome;

/// Greedy width-1 search: at every information position keep the child with
/// the larger metric (ties keep 0).
pub fn decode_sc(code: &CodeConfig, apps: &[LogApp], mode: MetricMode) -> Result<DecodeOutcome> {
    let mut engine = MetricEngine::new(code, apps, mode)?;
    let mut counts = vec![0u32; code.len() + 1];
    let mut path = engine.root();
    while path.len() < code.len() {
        if !path.is_empty() {
            counts[path.len()] += 1;
        }
        path = match engine.expand(path) {
            Expansion::Frozen(child) => child,
            Expansion::Info([zero, one]) => {
                if zero.metric() >= one.metric() {
                    zero
                } else {
                    one
                }
            }
        };
    }
    Ok(DecodeOutcome {
        bits: path.labels(),
        metric: path.metric(),
        metric_ops: engine.ops(),
        pruned_paths: 0,
        counts,
        peak_occupancy: 1,
        final_list: Vec::new(),
    })
}

use crate::code::CodeConfig;
use crate::metrics::{DecodingPath, Expansion, LogApp, MetricEngine, MetricMode};
use crate::Result;

use super::{DecodeOutcome, ListEntry, Pruning};

/// Breadth-first search keeping the `width` best paths per level.
pub fn decode_scl(
    code: &CodeConfig,
    apps: &[LogApp],
    width: usize,
    pruning: Pruning,
    mode: MetricMode,
) -> Result<DecodeOutcome> {
    assert!(width >= 1, "SCL needs L >= 1");
    let mut engine = MetricEngine::new(code, apps, mode)?;
    let margin = pruning.log_margin();
    let mut counts = vec![0u32; code.len() + 1];
    let mut pruned = 0u64;
    let mut peak = 1;
    let mut list: Vec<DecodingPath> = vec![engine.root()];

    for (index, count) in counts.iter_mut().enumerate().take(code.len()) {
        if index > 0 {
            *count = list.len() as u32;
        }
        let mut next = Vec::with_capacity(2 * list.len());
        for path in list.drain(..) {
            match engine.expand(path) {
                Expansion::Frozen(child) => next.push(child),
                Expansion::Info([zero, one]) => {
                    next.push(zero);
                    next.push(one);
                }
            }
        }
        peak = peak.max(next.len());
        if code.is_info(index) {
            next.sort();
            next.truncate(width);
            if let Some(margin) = margin {
                let floor = next[0].metric() - margin;
                let before = next.len();
                next.retain(|p| p.metric() >= floor);
                pruned += (before - next.len()) as u64;
            }
        }
        list = next;
    }

    list.sort();
    let best = &list[0];
    Ok(DecodeOutcome {
        bits: best.labels(),
        metric: best.metric(),
        metric_ops: engine.ops(),
        pruned_paths: pruned,
        counts,
        peak_occupancy: peak,
        final_list: list.iter().map(|p| ListEntry { bits: p.labels(), metric: p.metric() }).collect(),
    })
}

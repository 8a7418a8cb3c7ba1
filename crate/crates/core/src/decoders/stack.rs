use std::collections::BTreeSet;

use crate::code::CodeConfig;
use crate::metrics::{DecodingPath, Expansion, LogApp, MetricEngine, MetricMode};
use crate::Result;

use super::{DecodeOutcome, Pruning};

/// Metric-ordered candidate store; the first element is the top of the stack.
struct Stack {
    entries: BTreeSet<DecodingPath>,
    /// Number of entries per path length.
    by_len: Vec<usize>,
}

impl Stack {
    fn new(code_len: usize) -> Self {
        Self { entries: BTreeSet::new(), by_len: vec![0; code_len + 1] }
    }

    fn len(&self) -> usize {
        self.entries.len()
    }

    fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn push(&mut self, path: DecodingPath) {
        self.by_len[path.len()] += 1;
        let fresh = self.entries.insert(path);
        debug_assert!(fresh, "distinct tree paths never compare equal");
    }

    fn taken(&mut self, path: Option<DecodingPath>) -> Option<DecodingPath> {
        if let Some(p) = &path {
            self.by_len[p.len()] -= 1;
        }
        path
    }

    fn top(&self) -> Option<&DecodingPath> {
        self.entries.first()
    }

    fn pop_top(&mut self) -> Option<DecodingPath> {
        let path = self.entries.pop_first();
        self.taken(path)
    }

    fn pop_bottom(&mut self) -> Option<DecodingPath> {
        let path = self.entries.pop_last();
        self.taken(path)
    }

    /// Best-ranked path among those of minimal length.
    fn pop_shortest(&mut self) -> Option<DecodingPath> {
        let shortest = self.by_len.iter().position(|&c| c > 0)?;
        let key = self.entries.iter().find(|p| p.len() == shortest)?.clone();
        let path = self.entries.take(&key);
        self.taken(path)
    }

    fn all_same_length(&self) -> bool {
        self.by_len.iter().filter(|&&c| c > 0).count() <= 1
    }

    /// Competition: drop every path of length `<= len`.
    fn remove_up_to(&mut self, len: usize) {
        if self.by_len[..=len].iter().all(|&c| c == 0) {
            return;
        }
        self.entries.retain(|p| p.len() > len);
        self.by_len[..=len].iter_mut().for_each(|c| *c = 0);
    }

    /// Drops `len`-length paths with metric below `floor`; returns how many.
    fn prune_level(&mut self, len: usize, floor: f64) -> u64 {
        if self.by_len[len] == 0 {
            return 0;
        }
        let before = self.entries.len();
        self.entries.retain(|p| p.len() != len || p.metric() >= floor);
        let removed = before - self.entries.len();
        self.by_len[len] -= removed;
        removed as u64
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    /// Best-first with bottom eviction at capacity.
    Scs,
    /// Best-first that switches to shortest-first when near capacity.
    Sch,
}

/// Best-first stack search SCS(L, D).
///
/// Before pushing children the lowest-ranked entries are evicted until the
/// children fit in `depth`. Once `width` paths of some length `j` have been
/// popped, every stored path of length `<= j` is deleted.
pub fn decode_scs(
    code: &CodeConfig,
    apps: &[LogApp],
    width: usize,
    depth: usize,
    pruning: Pruning,
    mode: MetricMode,
) -> Result<DecodeOutcome> {
    assert!(width >= 1 && depth >= 2, "SCS needs L >= 1 and D >= 2");
    run(code, apps, width, depth, pruning, mode, Variant::Scs)
}

/// Hybrid stack search SCH(L, D).
///
/// Runs best-first ("on-going") until `D − |S| <= 2L − 1`, then pops the
/// shortest stored path ("waiting") until all stored paths share one length,
/// then resumes best-first. Nothing is ever evicted for capacity, so the
/// decision does not depend on `D`; only the work does.
pub fn decode_sch(
    code: &CodeConfig,
    apps: &[LogApp],
    width: usize,
    depth: usize,
    pruning: Pruning,
    mode: MetricMode,
) -> Result<DecodeOutcome> {
    assert!(width >= 1 && depth >= 2 * width, "SCH needs L >= 1 and D >= 2L");
    run(code, apps, width, depth, pruning, mode, Variant::Sch)
}

fn run(
    code: &CodeConfig,
    apps: &[LogApp],
    width: usize,
    depth: usize,
    pruning: Pruning,
    mode: MetricMode,
    variant: Variant,
) -> Result<DecodeOutcome> {
    let len = code.len();
    let mut engine = MetricEngine::new(code, apps, mode)?;
    let margin = pruning.log_margin();
    let mut stack = Stack::new(len);
    let mut counts = vec![0u32; len + 1];
    let mut reference: Vec<Option<f64>> = vec![None; len + 1];
    let mut pruned = 0u64;
    let mut peak = 1;
    let mut waiting = false;
    stack.push(engine.root());

    loop {
        let parent = if waiting { stack.pop_shortest() } else { stack.pop_top() }
            .expect("the stack always keeps at least one candidate");
        let popped_len = parent.len();
        if popped_len > 0 {
            counts[popped_len] += 1;
            if let Some(margin) = margin {
                if code.is_info(popped_len - 1) && reference[popped_len].is_none() {
                    reference[popped_len] = Some(parent.metric());
                    pruned += stack.prune_level(popped_len, parent.metric() - margin);
                }
            }
        }

        let mut best_dropped: Option<DecodingPath> = None;
        let mut children: Vec<DecodingPath> = match engine.expand(parent) {
            Expansion::Frozen(child) => vec![child],
            Expansion::Info(pair) => {
                let floor = margin.and_then(|m| reference[popped_len + 1].map(|a| a - m));
                let mut kept = Vec::with_capacity(2);
                for child in pair {
                    if floor.is_none_or(|f| child.metric() >= f) {
                        kept.push(child);
                    } else {
                        pruned += 1;
                        if best_dropped.as_ref().is_none_or(|b| child < *b) {
                            best_dropped = Some(child);
                        }
                    }
                }
                kept
            }
        };

        if variant == Variant::Scs {
            while !stack.is_empty() && stack.len() + children.len() > depth {
                stack.pop_bottom();
            }
        }
        for child in children.drain(..) {
            stack.push(child);
        }
        peak = peak.max(stack.len());

        if popped_len > 0 && counts[popped_len] as usize == width {
            stack.remove_up_to(popped_len);
        }

        // Pruning never empties the search.
        if stack.is_empty() {
            stack.push(best_dropped.take().expect("an empty stack implies a pruned child"));
            pruned -= 1;
        }

        if variant == Variant::Sch {
            if !waiting && stack.len() + 2 * width > depth {
                waiting = true;
            } else if waiting && stack.all_same_length() {
                waiting = false;
            }
        }

        let top = stack.top().expect("children were just pushed");
        if top.len() == len {
            let leaf = stack.pop_top().expect("top exists");
            return Ok(DecodeOutcome {
                bits: leaf.labels(),
                metric: leaf.metric(),
                metric_ops: engine.ops(),
                pruned_paths: pruned,
                counts,
                peak_occupancy: peak,
                final_list: Vec::new(),
            });
        }
    }
}

//! Log-APP path metrics on the code tree.
//!
//! A [`DecodingPath`] of length `i` carries its labels `v_0..v_{i-1}`, its
//! metric (the log-APP of the labels, held constant across frozen positions)
//! and the per-layer intermediate log-probabilities needed to extend it.
//!
//! The intermediate state is the usual space-efficient layered layout: layer
//! `λ` holds `2^(n-λ)` log-probability pairs and `2^(n-λ)` partial-sum pairs.
//! Layers sit behind `Rc`, so cloning a path shares everything and a layer is
//! only duplicated when one of the sharing paths writes to it
//! (`Rc::make_mut`). That is the "lazy copy" that keeps a list of `L` paths at
//! `O(L·N·log N)` total work.
//!
//! Every evaluation of a node update (either the `max*` form or the plain sum
//! form) at any layer bumps the engine's operation counter by one, so an SC
//! decode costs exactly `N·log₂N`.

use std::cmp::Ordering;
use std::rc::Rc;

use crate::code::CodeConfig;
use crate::{Error, Result};

/// Log-probability pair `(log P(·=0), log P(·=1))`.
pub type LogApp = [f64; 2];

/// Stand-in for `log 0`. Absorbing under addition (after clamping) and under
/// [`max_star`].
pub const LOG_ZERO: f64 = -1e6;

/// Slack allowed when checking that a metric is a log-probability.
pub const METRIC_TOLERANCE: f64 = 1e-9;

#[inline]
pub fn clamp_log(v: f64) -> f64 {
    if v < LOG_ZERO {
        LOG_ZERO
    } else {
        v
    }
}

/// `max(a, b) + ln(1 + e^{-|a-b|})`, i.e. `ln(e^a + e^b)`.
#[inline]
pub fn max_star(a: f64, b: f64) -> f64 {
    if a <= LOG_ZERO {
        return b;
    }
    if b <= LOG_ZERO {
        return a;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// How the odd-index node update combines its two hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricMode {
    /// Jacobian logarithm with the correction term.
    #[default]
    Exact,
    /// Plain `max`; cheaper, approximate.
    MaxLog,
}

impl MetricMode {
    #[inline]
    fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            MetricMode::Exact => max_star(a, b),
            MetricMode::MaxLog => a.max(b),
        }
    }
}

/// Persistent label list; children share their parent's node.
#[derive(Debug)]
struct LabelNode {
    bit: u8,
    parent: Option<Rc<LabelNode>>,
}

impl Drop for LabelNode {
    fn drop(&mut self) {
        // Unlink iteratively so long chains don't recurse in drop.
        let mut next = self.parent.take();
        while let Some(rc) = next {
            match Rc::try_unwrap(rc) {
                Ok(mut node) => next = node.parent.take(),
                Err(_) => break,
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Labels(Option<Rc<LabelNode>>);

impl Labels {
    fn push(&self, bit: u8) -> Labels {
        Labels(Some(Rc::new(LabelNode { bit, parent: self.0.clone() })))
    }

    fn last(&self) -> Option<u8> {
        self.0.as_ref().map(|node| node.bit)
    }

    fn to_vec(&self, len: usize) -> Vec<u8> {
        let mut out = vec![0; len];
        let mut cursor = self.0.as_deref();
        for slot in out.iter_mut().rev() {
            let node = cursor.expect("label list shorter than path length");
            *slot = node.bit;
            cursor = node.parent.as_deref();
        }
        out
    }

    /// Lexicographic order of two label lists of equal length.
    fn cmp_lex(&self, other: &Labels) -> Ordering {
        let mut a = self.0.as_ref();
        let mut b = other.0.as_ref();
        let mut earliest = Ordering::Equal;
        loop {
            match (a, b) {
                (Some(x), Some(y)) => {
                    if Rc::ptr_eq(x, y) {
                        return earliest;
                    }
                    if x.bit != y.bit {
                        earliest = x.bit.cmp(&y.bit);
                    }
                    a = x.parent.as_ref();
                    b = y.parent.as_ref();
                }
                _ => return earliest,
            }
        }
    }
}

#[derive(Debug, Clone)]
struct LayerState {
    /// `p[0]` is the channel layer shared by every path of a decode.
    p: Vec<Rc<Vec<LogApp>>>,
    /// Partial sums; `c[0]` is never read and stays empty.
    c: Vec<Rc<Vec<[u8; 2]>>>,
}

/// A partial path on the code tree.
#[derive(Debug, Clone)]
pub struct DecodingPath {
    len: usize,
    metric: f64,
    labels: Labels,
    state: LayerState,
    /// The last label has not yet been folded into the partial sums.
    pending: bool,
}

impl DecodingPath {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn metric(&self) -> f64 {
        self.metric
    }

    pub fn last_bit(&self) -> Option<u8> {
        self.labels.last()
    }

    /// Labels `v_0..v_{len-1}`.
    pub fn labels(&self) -> Vec<u8> {
        self.labels.to_vec(self.len)
    }

    fn into_child(mut self, bit: u8, metric: f64) -> DecodingPath {
        self.labels = self.labels.push(bit);
        self.len += 1;
        self.metric = metric;
        self.pending = true;
        self
    }

    /// Search order shared by every decoder: larger metric first, then longer
    /// path, then lexicographically smaller labels. `Less` means "ranks ahead".
    pub fn search_cmp(&self, other: &DecodingPath) -> Ordering {
        other
            .metric
            .partial_cmp(&self.metric)
            .expect("path metrics are never NaN")
            .then_with(|| other.len.cmp(&self.len))
            .then_with(|| self.labels.cmp_lex(&other.labels))
    }
}

impl PartialEq for DecodingPath {
    fn eq(&self, other: &Self) -> bool {
        self.search_cmp(other) == Ordering::Equal
    }
}

impl Eq for DecodingPath {}

impl PartialOrd for DecodingPath {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DecodingPath {
    fn cmp(&self, other: &Self) -> Ordering {
        self.search_cmp(other)
    }
}

/// Result of extending a path by one position.
#[derive(Debug)]
pub enum Expansion {
    /// Frozen position: a single child carrying the frozen value.
    Frozen(DecodingPath),
    /// Information position: children with bit 0 and bit 1.
    Info([DecodingPath; 2]),
}

/// Per-decode metric engine: channel log-APPs, code and operation counter.
#[derive(Debug)]
pub struct MetricEngine<'a> {
    code: &'a CodeConfig,
    channel: Rc<Vec<LogApp>>,
    mode: MetricMode,
    ops: u64,
}

impl<'a> MetricEngine<'a> {
    pub fn new(code: &'a CodeConfig, initial: &[LogApp], mode: MetricMode) -> Result<Self> {
        if initial.len() != code.len() {
            return Err(Error::LengthMismatch { expected: code.len(), actual: initial.len() });
        }
        let channel = initial.iter().map(|&[a, b]| [clamp_log(a), clamp_log(b)]).collect();
        Ok(Self { code, channel: Rc::new(channel), mode, ops: 0 })
    }

    pub fn code(&self) -> &'a CodeConfig {
        self.code
    }

    /// Metric operations performed so far.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    /// The null path: length 0, metric 0.
    pub fn root(&self) -> DecodingPath {
        let n = self.code.n() as usize;
        let mut p = Vec::with_capacity(n + 1);
        let mut c = Vec::with_capacity(n + 1);
        p.push(Rc::clone(&self.channel));
        c.push(Rc::new(Vec::new()));
        for layer in 1..=n {
            let width = 1usize << (n - layer);
            p.push(Rc::new(vec![[LOG_ZERO; 2]; width]));
            c.push(Rc::new(vec![[0; 2]; width]));
        }
        DecodingPath { len: 0, metric: 0.0, labels: Labels::default(), state: LayerState { p, c }, pending: false }
    }

    /// Log-APPs of the two one-bit extensions of `path`, i.e.
    /// `(log P(v, 0 | y), log P(v, 1 | y))`.
    ///
    /// Brings the path's layered state up to date; repeated calls on the same
    /// path recompute and recount.
    pub fn branch(&mut self, path: &mut DecodingPath) -> LogApp {
        assert!(path.len < self.code.len(), "path is already a leaf");
        if path.pending {
            let bit = path.labels.last().expect("pending implies a label");
            self.commit_bit(&mut path.state, path.len - 1, bit);
            path.pending = false;
        }
        self.calc(&mut path.state, path.len);
        path.state.p[self.code.n() as usize][0]
    }

    /// Extends `parent` by one position. Frozen positions keep the parent's
    /// metric; information positions take the log-APP of the extended labels.
    pub fn expand(&mut self, mut parent: DecodingPath) -> Expansion {
        let index = parent.len;
        let branch = self.branch(&mut parent);
        if self.code.is_frozen(index) {
            let metric = parent.metric;
            Expansion::Frozen(parent.into_child(self.code.frozen_bit(index), metric))
        } else {
            let zero = parent.clone().into_child(0, branch[0]);
            let one = parent.into_child(1, branch[1]);
            Expansion::Info([zero, one])
        }
    }

    /// Extends by a chosen bit and also returns the branch log-APPs.
    pub fn extend_owned(&mut self, mut path: DecodingPath, bit: u8) -> Result<(DecodingPath, LogApp)> {
        let index = path.len;
        if index >= self.code.len() {
            return Err(Error::InvalidParameter("cannot extend a leaf".into()));
        }
        if bit > 1 {
            return Err(Error::InvalidBit(bit));
        }
        if self.code.is_frozen(index) && bit != self.code.frozen_bit(index) {
            return Err(Error::FrozenViolation { index, bit, frozen: self.code.frozen_bit(index) });
        }
        let branch = self.branch(&mut path);
        let metric = if self.code.is_frozen(index) { path.metric } else { branch[bit as usize] };
        Ok((path.into_child(bit, metric), branch))
    }

    /// Extends a copy of `path` by `bit`; `path` itself is left untouched.
    pub fn extend_path(&mut self, path: &DecodingPath, bit: u8) -> Result<DecodingPath> {
        Ok(self.extend_owned(path.clone(), bit)?.0)
    }

    /// Metric of a complete label vector, computed by forcing the path.
    pub fn score(&mut self, labels: &[u8]) -> Result<f64> {
        if labels.len() != self.code.len() {
            return Err(Error::LengthMismatch { expected: self.code.len(), actual: labels.len() });
        }
        let mut path = self.root();
        for &bit in labels {
            path = self.extend_owned(path, bit)?.0;
        }
        Ok(path.metric)
    }

    /// Folds decided bit `phase` into the partial sums.
    fn commit_bit(&self, state: &mut LayerState, phase: usize, bit: u8) {
        let n = self.code.n() as usize;
        if n == 0 {
            return;
        }
        Rc::make_mut(&mut state.c[n])[0][phase & 1] = bit;
        let mut layer = n;
        let mut phi = phase;
        while phi & 1 == 1 && layer >= 2 {
            let slot = (phi >> 1) & 1;
            let (lower, upper) = state.c.split_at_mut(layer);
            let src = &upper[0];
            let dst = Rc::make_mut(&mut lower[layer - 1]);
            for (beta, pair) in src.iter().enumerate() {
                dst[2 * beta][slot] = pair[0] ^ pair[1];
                dst[2 * beta + 1][slot] = pair[1];
            }
            layer -= 1;
            phi >>= 1;
        }
    }

    /// Recomputes the layers needed for `phase`, bottom up.
    fn calc(&mut self, state: &mut LayerState, phase: usize) {
        let n = self.code.n() as usize;
        if n == 0 {
            return;
        }
        let mut lowest = n;
        while lowest > 1 && (phase >> (n - lowest)) & 1 == 0 {
            lowest -= 1;
        }
        for layer in lowest..=n {
            let phi = phase >> (n - layer);
            let (lower, upper) = state.p.split_at_mut(layer);
            let src = &lower[layer - 1];
            let dst = Rc::make_mut(&mut upper[0]);
            if phi & 1 == 0 {
                for (beta, out) in dst.iter_mut().enumerate() {
                    let a = src[2 * beta];
                    let b = src[2 * beta + 1];
                    *out = [
                        self.mode.combine(clamp_log(a[0] + b[0]), clamp_log(a[1] + b[1])),
                        self.mode.combine(clamp_log(a[1] + b[0]), clamp_log(a[0] + b[1])),
                    ];
                }
            } else {
                let partial = &state.c[layer];
                for (beta, out) in dst.iter_mut().enumerate() {
                    let a = src[2 * beta];
                    let b = src[2 * beta + 1];
                    let u = partial[beta][0] as usize;
                    *out = [clamp_log(a[u] + b[0]), clamp_log(a[u ^ 1] + b[1])];
                }
            }
            self.ops += dst.len() as u64;
        }
    }
}

/// Linear-domain reference for `P(v_0..v_{i-1} | y)`, evaluated straight from
/// the odd/even APP recursions down to per-symbol APPs.
///
/// `symbol_apps[j]` is `(P(x_j = 0 | y_j), P(x_j = 1 | y_j))`. Meant as a test
/// oracle, so block length is capped at 16.
pub fn prefix_app(labels: &[u8], symbol_apps: &[[f64; 2]]) -> Result<f64> {
    let len = symbol_apps.len();
    if !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    if len > 16 {
        return Err(Error::SizeGuard(format!("prefix_app supports N <= 16, got {len}")));
    }
    if labels.len() > len {
        return Err(Error::SizeGuard(format!("{} labels for N = {len}", labels.len())));
    }
    if let Some(&b) = labels.iter().find(|&&b| b > 1) {
        return Err(Error::InvalidBit(b));
    }
    Ok(prefix_app_rec(labels, symbol_apps))
}

fn prefix_app_rec(v: &[u8], apps: &[[f64; 2]]) -> f64 {
    if v.is_empty() {
        return 1.0;
    }
    if apps.len() == 1 {
        return apps[0][v[0] as usize];
    }
    if v.len() % 2 == 1 {
        // odd length: marginalize the partner bit
        let mut extended = v.to_vec();
        extended.push(0);
        let p0 = prefix_app_rec(&extended, apps);
        *extended.last_mut().unwrap() = 1;
        p0 + prefix_app_rec(&extended, apps)
    } else {
        let half = apps.len() / 2;
        let mixed: Vec<u8> = v.chunks_exact(2).map(|pair| pair[0] ^ pair[1]).collect();
        let evens: Vec<u8> = v.chunks_exact(2).map(|pair| pair[1]).collect();
        prefix_app_rec(&mixed, &apps[..half]) * prefix_app_rec(&evens, &apps[half..])
    }
}

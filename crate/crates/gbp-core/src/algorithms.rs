//! Online packing engines.
//!
//! Every engine processes items one at a time against an *effective capacity*
//! `C = green + tau`: bins are filled up to `C`, and any item larger than `C`
//! is placed alone in a bin that accepts nothing further. Classic behavior is
//! the special case `tau = 1 - green` (effective capacity 1).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{fits, CostParams, EPS_FIT};
use crate::instance::{Bin, Instance, Packing};
use crate::math::floor;
use crate::{Error, Result};

/// Which bin-selection rule to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    /// Place in the most recently opened bin if possible, else open a new one.
    NextFit,
    /// Among fitting bins, choose the lowest level (tie: lowest index).
    WorstFit,
    /// Lowest-index fitting bin.
    FirstFit,
    /// Among fitting bins, choose the highest level (tie: lowest index).
    BestFit,
    /// Size-class-segregated packing with `K >= 2` classes, one open bin per
    /// class; a class-`i` bin (`i < K`) closes after receiving `i` items.
    Harmonic(u32),
}

impl AlgorithmKind {
    /// Short stable tag, e.g. `nextfit` or `harmonic10`.
    pub fn tag(&self) -> alloc::string::String {
        use alloc::format;
        match self {
            AlgorithmKind::NextFit => "nextfit".into(),
            AlgorithmKind::WorstFit => "worstfit".into(),
            AlgorithmKind::FirstFit => "firstfit".into(),
            AlgorithmKind::BestFit => "bestfit".into(),
            AlgorithmKind::Harmonic(k) => format!("harmonic{k}"),
        }
    }

    /// All five kinds with the conventional `K = 10` for Harmonic.
    pub fn all_default() -> [AlgorithmKind; 5] {
        [
            AlgorithmKind::NextFit,
            AlgorithmKind::WorstFit,
            AlgorithmKind::FirstFit,
            AlgorithmKind::BestFit,
            AlgorithmKind::Harmonic(10),
        ]
    }
}

/// The threshold `tau in [0, 1 - green]` defining the effective capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPolicy {
    tau: f64,
}

impl ThresholdPolicy {
    /// Requires `0 <= tau <= 1 - green` (with a 1e-12 slack for thresholds
    /// computed as `1 - green` in floating point).
    pub fn new(tau: f64, green: f64) -> Result<Self> {
        if !tau.is_finite() || tau < -1e-12 || tau > 1.0 - green + 1e-12 {
            return Err(Error::InvalidTau { tau, green });
        }
        Ok(ThresholdPolicy { tau: tau.clamp(0.0, 1.0 - green) })
    }

    /// Classic behavior: `tau = 1 - green`, effective capacity 1.
    pub fn full_capacity(green: f64) -> Self {
        ThresholdPolicy { tau: 1.0 - green }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn effective_capacity(&self, green: f64) -> f64 {
        (green + self.tau).min(1.0)
    }
}

/// One line of the optional decision log.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub step: usize,
    pub item_size: f64,
    pub chosen_bin: usize,
    pub opened_new: bool,
    pub level_after: f64,
}

/// Returns the harmonic class of `size` under `capacity`: the unique
/// `i in [1, K]` with `size in (capacity/(i+1), capacity/i]` for `i < K`,
/// or `K` for `size <= capacity/K`.
///
/// Sizes above `capacity` must be routed to the oversized rule first.
pub fn harmonic_class(size: f64, k: u32, capacity: f64) -> Result<u32> {
    if k < 2 {
        return Err(Error::InvalidHarmonic { what: "class count below 2" });
    }
    if !(capacity > 0.0 && capacity <= 1.0) {
        return Err(Error::InvalidHarmonic { what: "capacity outside (0, 1]" });
    }
    if !size.is_finite() || size <= 0.0 || size > capacity + EPS_FIT {
        return Err(Error::InvalidHarmonic { what: "size outside (0, capacity]" });
    }
    // Exact-boundary sizes (size = capacity / i) belong to class i; the nudge
    // keeps that stable against one-ulp division noise.
    let ratio = capacity / size + 1e-12;
    if ratio >= k as f64 {
        Ok(k)
    } else {
        Ok((floor(ratio) as u32).max(1))
    }
}

/// Runs an online algorithm over the instance; `policy.tau` must lie in
/// `[0, 1 - params.green()]`.
pub fn pack(
    kind: AlgorithmKind,
    policy: ThresholdPolicy,
    instance: &Instance,
    params: CostParams,
) -> Result<Packing> {
    run(kind, policy, instance, params, None)
}

/// Like [`pack`], also returning the per-item decision log.
pub fn pack_logged(
    kind: AlgorithmKind,
    policy: ThresholdPolicy,
    instance: &Instance,
    params: CostParams,
) -> Result<(Packing, Vec<Decision>)> {
    let mut log = Vec::with_capacity(instance.len());
    let packing = run(kind, policy, instance, params, Some(&mut log))?;
    Ok((packing, log))
}

fn run(
    kind: AlgorithmKind,
    policy: ThresholdPolicy,
    instance: &Instance,
    params: CostParams,
    mut log: Option<&mut Vec<Decision>>,
) -> Result<Packing> {
    // Re-validate tau against these params; the policy may have been built
    // against a different green value.
    let policy = ThresholdPolicy::new(policy.tau(), params.green())?;
    let cap = policy.effective_capacity(params.green());

    let mut state = PackState::new();
    let mut strategy = Strategy::new(kind, cap)?;

    for (step, &size) in instance.items().iter().enumerate() {
        let (bin, opened_new) = if !fits(0.0, size, cap) {
            // Oversized: alone in a newly opened bin, sealed against
            // everything that follows.
            let b = state.open();
            state.seal(b);
            strategy.on_open_sealed(&mut state);
            (b, true)
        } else {
            strategy.place(&mut state, size)
        };
        state.place(bin, step, size);
        strategy.after_place(&mut state, bin);
        if let Some(log) = log.as_deref_mut() {
            log.push(Decision {
                step,
                item_size: size,
                chosen_bin: bin,
                opened_new,
                level_after: state.levels[bin],
            });
        }
    }

    let mut packing = Packing::new(params);
    for items in state.contents {
        let mut bin = Bin::empty();
        for index in items {
            bin.push(index, instance.items()[index]);
        }
        packing.push_bin(bin);
    }
    Ok(packing)
}

struct PackState {
    levels: Vec<f64>,
    contents: Vec<Vec<usize>>,
    sealed: Vec<bool>,
}

impl PackState {
    fn new() -> Self {
        PackState { levels: Vec::new(), contents: Vec::new(), sealed: Vec::new() }
    }

    fn open(&mut self) -> usize {
        self.levels.push(0.0);
        self.contents.push(Vec::new());
        self.sealed.push(false);
        self.levels.len() - 1
    }

    fn seal(&mut self, bin: usize) {
        self.sealed[bin] = true;
    }

    fn place(&mut self, bin: usize, index: usize, size: f64) {
        self.levels[bin] += size;
        self.contents[bin].push(index);
    }
}

enum Strategy {
    NextFit { cap: f64 },
    FirstFit { cap: f64, tree: MinTree },
    WorstFit { cap: f64, tree: MinTree },
    BestFit { cap: f64, map: LevelMap, pending: Option<(usize, f64)> },
    Harmonic { cap: f64, k: u32, open: Vec<Option<usize>> },
}

impl Strategy {
    fn new(kind: AlgorithmKind, cap: f64) -> Result<Self> {
        Ok(match kind {
            AlgorithmKind::NextFit => Strategy::NextFit { cap },
            AlgorithmKind::FirstFit => Strategy::FirstFit { cap, tree: MinTree::new() },
            AlgorithmKind::WorstFit => Strategy::WorstFit { cap, tree: MinTree::new() },
            AlgorithmKind::BestFit => {
                Strategy::BestFit { cap, map: LevelMap::new(), pending: None }
            }
            AlgorithmKind::Harmonic(k) => {
                if k < 2 {
                    return Err(Error::InvalidHarmonic { what: "class count below 2" });
                }
                Strategy::Harmonic { cap, k, open: vec![None; k as usize + 1] }
            }
        })
    }

    /// Chooses a bin for a non-oversized item, opening one if needed.
    fn place(&mut self, state: &mut PackState, size: f64) -> (usize, bool) {
        match self {
            Strategy::NextFit { cap } => {
                // Only the most recently opened bin is a candidate.
                match state.levels.len().checked_sub(1) {
                    Some(b) if !state.sealed[b] && fits(state.levels[b], size, *cap) => (b, false),
                    _ => (state.open(), true),
                }
            }
            Strategy::FirstFit { cap, tree } => {
                match tree.first_leq(*cap + EPS_FIT - size) {
                    Some(b) => (b, false),
                    None => {
                        let b = state.open();
                        tree.push(0.0);
                        (b, true)
                    }
                }
            }
            Strategy::WorstFit { cap, tree } => {
                let min = tree.min();
                if min <= *cap + EPS_FIT - size {
                    // Lowest level; the leftmost bin attaining it breaks ties.
                    let b = tree.first_leq(min).expect("min level must exist");
                    (b, false)
                } else {
                    let b = state.open();
                    tree.push(0.0);
                    (b, true)
                }
            }
            Strategy::BestFit { cap, map, pending } => {
                match map.best_leq(*cap + EPS_FIT - size) {
                    Some(b) => {
                        *pending = Some((b, state.levels[b]));
                        (b, false)
                    }
                    None => {
                        let b = state.open();
                        *pending = Some((b, 0.0));
                        map.insert(0.0, b);
                        (b, true)
                    }
                }
            }
            Strategy::Harmonic { cap, k, open } => {
                let class = harmonic_class(size, *k, *cap).expect("size pre-checked") as usize;
                if let Some(b) = open[class] {
                    if fits(state.levels[b], size, *cap) {
                        return (b, false);
                    }
                    // Full class bin closes; a fresh one takes over.
                    open[class] = None;
                }
                let b = state.open();
                open[class] = Some(b);
                (b, true)
            }
        }
    }

    /// Index maintenance after the item landed in `bin`.
    fn after_place(&mut self, state: &mut PackState, bin: usize) {
        match self {
            Strategy::NextFit { .. } => {}
            Strategy::FirstFit { tree, .. } | Strategy::WorstFit { tree, .. } => {
                if !state.sealed[bin] {
                    tree.set(bin, state.levels[bin]);
                }
            }
            Strategy::BestFit { map, pending, .. } => {
                if let Some((b, old_level)) = pending.take() {
                    debug_assert_eq!(b, bin);
                    map.remove(old_level, b);
                    map.insert(state.levels[bin], b);
                }
            }
            Strategy::Harmonic { k, open, .. } => {
                let count = state.contents[bin].len();
                for (class, slot) in open.iter_mut().enumerate() {
                    if *slot == Some(bin) && class < *k as usize && count >= class {
                        *slot = None;
                    }
                }
            }
        }
    }

    /// A sealed oversized bin was opened; keep the indexes aligned.
    fn on_open_sealed(&mut self, state: &mut PackState) {
        match self {
            Strategy::FirstFit { tree, .. } | Strategy::WorstFit { tree, .. } => {
                tree.push(f64::INFINITY);
            }
            _ => {
                let _ = state;
            }
        }
    }
}

/// Growable min-segment tree over bin levels; leaf index = bin index.
///
/// Supports "leftmost bin with level <= bound" in O(log n), which implements
/// FirstFit directly and WorstFit via the global minimum. Sealed bins hold
/// `+inf` so they never match.
struct MinTree {
    len: usize,
    cap: usize,
    tree: Vec<f64>,
}

impl MinTree {
    fn new() -> Self {
        MinTree { len: 0, cap: 1, tree: vec![f64::INFINITY; 2] }
    }

    fn min(&self) -> f64 {
        self.tree[1]
    }

    fn push(&mut self, value: f64) {
        if self.len == self.cap {
            self.grow();
        }
        let leaf = self.cap + self.len;
        self.len += 1;
        self.tree[leaf] = value;
        self.pull_up(leaf);
    }

    fn set(&mut self, index: usize, value: f64) {
        let leaf = self.cap + index;
        self.tree[leaf] = value;
        self.pull_up(leaf);
    }

    fn pull_up(&mut self, mut node: usize) {
        node /= 2;
        while node >= 1 {
            self.tree[node] = self.tree[2 * node].min(self.tree[2 * node + 1]);
            node /= 2;
        }
    }

    fn grow(&mut self) {
        let cap = self.cap * 2;
        let mut tree = vec![f64::INFINITY; 2 * cap];
        tree[cap..cap + self.len].copy_from_slice(&self.tree[self.cap..self.cap + self.len]);
        for node in (1..cap).rev() {
            tree[node] = tree[2 * node].min(tree[2 * node + 1]);
        }
        self.cap = cap;
        self.tree = tree;
    }

    fn first_leq(&self, bound: f64) -> Option<usize> {
        if self.len == 0 || self.tree[1] > bound {
            return None;
        }
        let mut node = 1;
        while node < self.cap {
            node = if self.tree[2 * node] <= bound { 2 * node } else { 2 * node + 1 };
        }
        Some(node - self.cap)
    }
}

/// Ordered level index for BestFit: highest level at most a bound, ties
/// resolved toward the lowest bin index. Levels are non-negative, so their
/// IEEE-754 bit patterns order the same way the values do.
struct LevelMap {
    map: BTreeMap<u64, BTreeSet<usize>>,
}

impl LevelMap {
    fn new() -> Self {
        LevelMap { map: BTreeMap::new() }
    }

    fn insert(&mut self, level: f64, bin: usize) {
        self.map.entry(level.to_bits()).or_default().insert(bin);
    }

    fn remove(&mut self, level: f64, bin: usize) {
        let key = level.to_bits();
        if let Some(set) = self.map.get_mut(&key) {
            set.remove(&bin);
            if set.is_empty() {
                self.map.remove(&key);
            }
        }
    }

    fn best_leq(&self, bound: f64) -> Option<usize> {
        if bound < 0.0 {
            return None;
        }
        self.map
            .range(..=bound.to_bits())
            .next_back()
            .and_then(|(_, set)| set.iter().next().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::packing_cost;
    use approx::assert_relative_eq;

    fn p(beta: f64, green: f64) -> CostParams {
        CostParams::new(beta, green).unwrap()
    }

    fn levels(packing: &Packing) -> Vec<f64> {
        packing.bins().iter().map(|b| b.level()).collect()
    }

    #[test]
    fn threshold_policy_bounds() {
        assert!(ThresholdPolicy::new(0.0, 0.5).is_ok());
        assert!(ThresholdPolicy::new(0.5, 0.5).is_ok());
        assert!(ThresholdPolicy::new(0.51, 0.5).is_err());
        assert!(ThresholdPolicy::new(-0.01, 0.5).is_err());
        assert_relative_eq!(ThresholdPolicy::full_capacity(0.3).effective_capacity(0.3), 1.0);
    }

    #[test]
    fn nextfit_hand_trace() {
        let instance = Instance::new(vec![0.6, 0.5, 0.5]).unwrap();
        let params = p(1.0, 0.5);
        let packing = pack(
            AlgorithmKind::NextFit,
            ThresholdPolicy::full_capacity(0.5),
            &instance,
            params,
        )
        .unwrap();
        assert_eq!(levels(&packing), vec![0.6, 1.0]);
        assert_relative_eq!(packing_cost(&packing), 2.6, epsilon = 1e-12);
    }

    #[test]
    fn worstfit_single_open_bin() {
        let instance = Instance::new(vec![0.3, 0.3, 0.3]).unwrap();
        let packing = pack(
            AlgorithmKind::WorstFit,
            ThresholdPolicy::full_capacity(0.5),
            &instance,
            p(1.0, 0.5),
        )
        .unwrap();
        assert_eq!(packing.num_bins(), 1);
        assert_relative_eq!(packing.bins()[0].level(), 0.9, epsilon = 1e-12);
    }

    #[test]
    fn worstfit_pair_sequence_levels() {
        // (1/2, eps)^n: every pair lands in its own bin at level 1/2 + eps.
        let eps = 1e-7;
        let n = 50;
        let mut items = Vec::new();
        for _ in 0..n {
            items.push(0.5);
            items.push(eps);
        }
        let instance = Instance::new(items).unwrap();
        let packing = pack(
            AlgorithmKind::WorstFit,
            ThresholdPolicy::full_capacity(0.25),
            &instance,
            p(1.0, 0.25),
        )
        .unwrap();
        assert_eq!(packing.num_bins(), n);
        for bin in packing.bins() {
            assert_relative_eq!(bin.level(), 0.5 + eps, epsilon = 1e-12);
        }
    }

    #[test]
    fn harmonic_classes_split_items() {
        let instance = Instance::new(vec![0.6, 0.4, 0.05]).unwrap();
        let packing = pack(
            AlgorithmKind::Harmonic(3),
            ThresholdPolicy::full_capacity(0.5),
            &instance,
            p(1.0, 0.5),
        )
        .unwrap();
        assert_eq!(packing.num_bins(), 3);
    }

    #[test]
    fn oversized_item_goes_alone() {
        // Capacity 0.7, item 0.8: alone in a bin that accepts nothing more.
        let instance = Instance::new(vec![0.8, 0.05]).unwrap();
        let params = p(2.0, 0.5);
        let policy = ThresholdPolicy::new(0.2, 0.5).unwrap();
        for kind in AlgorithmKind::all_default() {
            let packing = pack(kind, policy, &instance, params).unwrap();
            assert_eq!(packing.num_bins(), 2, "{:?}", kind);
            assert_eq!(packing.bins()[0].items(), &[0]);
        }
    }

    #[test]
    fn oversized_bin_is_sealed_even_below_capacity() {
        // 0.75 > cap 0.7 opens a sealed bin; the later 0.1 must not join it
        // even though 0.75 + 0.1 < 1.
        let instance = Instance::new(vec![0.75, 0.1]).unwrap();
        let policy = ThresholdPolicy::new(0.2, 0.5).unwrap();
        for kind in AlgorithmKind::all_default() {
            let packing = pack(kind, policy, &instance, p(2.0, 0.5)).unwrap();
            assert_eq!(packing.bins()[0].items(), &[0], "{:?}", kind);
            assert_eq!(packing.bins()[1].items(), &[1], "{:?}", kind);
        }
    }

    #[test]
    fn harmonic_class_examples() {
        assert_eq!(harmonic_class(0.3, 10, 1.0).unwrap(), 3);
        assert_eq!(harmonic_class(0.05, 10, 1.0).unwrap(), 10);
        // Exact boundary: cap/2 belongs to class 2.
        assert_eq!(harmonic_class(0.35, 3, 0.7).unwrap(), 2);
        assert_eq!(harmonic_class(0.5, 10, 1.0).unwrap(), 2);
        assert_eq!(harmonic_class(0.5 + 1e-9, 10, 1.0).unwrap(), 1);
        assert!(harmonic_class(0.8, 3, 0.7).is_err());
        assert!(harmonic_class(0.3, 1, 1.0).is_err());
    }

    #[test]
    fn firstfit_prefers_lowest_index() {
        // Bins [0.5], [0.2] both fit 0.3; FirstFit picks bin 0.
        let instance = Instance::new(vec![0.5, 0.7, 0.2, 0.3]).unwrap();
        // 0.5 -> bin0; 0.7 -> bin1; 0.2 -> bin0 (0.7) ... rebuild: force setup
        let packing = pack(
            AlgorithmKind::FirstFit,
            ThresholdPolicy::full_capacity(0.5),
            &instance,
            p(1.0, 0.5),
        )
        .unwrap();
        // 0.5 -> bin0; 0.7 -> bin1 (0.5+0.7>1); 0.2 -> bin0 (level 0.7);
        // 0.3 -> bin0 (level 1.0).
        assert_eq!(levels(&packing), vec![1.0, 0.7]);
    }

    #[test]
    fn bestfit_prefers_highest_level() {
        // After 0.5 and 0.3 in separate bins, 0.4 fits both; BestFit tops the
        // fuller one.
        let instance = Instance::new(vec![0.5, 0.3, 0.6, 0.4]).unwrap();
        let packing = pack(
            AlgorithmKind::BestFit,
            ThresholdPolicy::full_capacity(0.5),
            &instance,
            p(1.0, 0.5),
        )
        .unwrap();
        // 0.5 -> bin0; 0.3 -> bin0 (0.8); 0.6 -> bin1; 0.4 -> bin1 (1.0).
        assert_eq!(levels(&packing), vec![0.8, 1.0]);
    }

    #[test]
    fn worstfit_tie_breaks_to_lowest_index() {
        let instance = Instance::new(vec![0.6, 0.6, 0.2]).unwrap();
        let (packing, log) = pack_logged(
            AlgorithmKind::WorstFit,
            ThresholdPolicy::full_capacity(0.5),
            &instance,
            p(1.0, 0.5),
        )
        .unwrap();
        assert_eq!(packing.num_bins(), 2);
        assert_eq!(log[2].chosen_bin, 0);
        assert!(!log[2].opened_new);
    }

    #[test]
    fn decision_log_shape() {
        let instance = Instance::new(vec![0.4, 0.4, 0.4]).unwrap();
        let (_, log) = pack_logged(
            AlgorithmKind::NextFit,
            ThresholdPolicy::full_capacity(0.5),
            &instance,
            p(1.0, 0.5),
        )
        .unwrap();
        assert_eq!(log.len(), 3);
        assert_eq!(log[0].step, 0);
        assert!(log[0].opened_new);
        assert!(!log[1].opened_new);
        assert!(log[2].opened_new);
        assert_relative_eq!(log[1].level_after, 0.8, epsilon = 1e-12);
    }

    #[test]
    fn tau_out_of_range_rejected_by_pack() {
        let instance = Instance::new(vec![0.4]).unwrap();
        let policy = ThresholdPolicy::full_capacity(0.2); // tau = 0.8
        let err = pack(AlgorithmKind::NextFit, policy, &instance, p(1.0, 0.5));
        assert!(matches!(err, Err(Error::InvalidTau { .. })));
    }

    #[test]
    fn harmonic_class_bin_closes_after_i_items() {
        // Class-2 items: bins close after exactly two items even though a
        // third would fit by size alone only if classes were ignored.
        let instance = Instance::new(vec![0.34, 0.34, 0.34, 0.34]).unwrap();
        let packing = pack(
            AlgorithmKind::Harmonic(5),
            ThresholdPolicy::full_capacity(0.0),
            &instance,
            p(0.5, 0.0),
        )
        .unwrap();
        assert_eq!(packing.num_bins(), 2);
        assert_eq!(packing.bins()[0].len(), 2);
        assert_eq!(packing.bins()[1].len(), 2);
    }
}

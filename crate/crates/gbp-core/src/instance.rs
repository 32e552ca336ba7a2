//! Item sequences, packings, and validation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cost::{CostParams, EPS_FIT, LEVEL_EPS};
use crate::math::pos;
use crate::{Error, Result};

/// An ordered sequence of item sizes in `(0, 1]`; the online input.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    items: Vec<f64>,
    label: Option<String>,
    source: Option<String>,
}

impl Instance {
    /// Validates that every size lies in `(0, 1]`.
    pub fn new(items: Vec<f64>) -> Result<Self> {
        for (index, &size) in items.iter().enumerate() {
            if !size.is_finite() || size <= 0.0 || size > 1.0 {
                return Err(Error::InvalidItemSize { index, size });
            }
        }
        Ok(Instance { items, label: None, source: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn items(&self) -> &[f64] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    /// Sum of all item sizes (the symbol usually written `S`).
    pub fn total_size(&self) -> f64 {
        self.items.iter().sum()
    }
}

/// One bin: the indices of its items (in placement order) and its fill level.
#[derive(Debug, Clone, PartialEq)]
pub struct Bin {
    items: Vec<usize>,
    level: f64,
}

impl Bin {
    pub fn empty() -> Self {
        Bin { items: Vec::new(), level: 0.0 }
    }

    pub fn push(&mut self, index: usize, size: f64) {
        self.items.push(index);
        self.level += size;
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Bins in opening order plus the cost parameters they were packed under.
#[derive(Debug, Clone, PartialEq)]
pub struct Packing {
    bins: Vec<Bin>,
    params: CostParams,
}

impl Packing {
    pub fn new(params: CostParams) -> Self {
        Packing { bins: Vec::new(), params }
    }

    /// Builds a packing from explicit bin contents, recomputing levels.
    pub fn from_bins(params: CostParams, bins: Vec<Vec<usize>>, instance: &Instance) -> Self {
        let bins = bins
            .into_iter()
            .map(|items| {
                let mut bin = Bin::empty();
                for index in items {
                    bin.push(index, instance.items()[index]);
                }
                bin
            })
            .collect();
        Packing { bins, params }
    }

    pub fn params(&self) -> CostParams {
        self.params
    }

    pub fn bins(&self) -> &[Bin] {
        &self.bins
    }

    pub fn bins_mut(&mut self) -> &mut Vec<Bin> {
        &mut self.bins
    }

    pub fn num_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn push_bin(&mut self, bin: Bin) {
        self.bins.push(bin);
    }

    /// Total cost `N + sum_j beta (L_j - G)^+`.
    pub fn cost(&self) -> f64 {
        let beta = self.params.beta();
        let green = self.params.green();
        self.bins
            .iter()
            .map(|b| 1.0 + beta * pos(b.level() - green))
            .sum()
    }

    /// Total size placed above the green threshold.
    pub fn black_space(&self) -> f64 {
        let green = self.params.green();
        self.bins.iter().map(|b| pos(b.level() - green)).sum()
    }
}

/// Total cost of a packing. Equals the number of bins when every level is
/// at most the green threshold; an empty packing costs zero.
pub fn packing_cost(packing: &Packing) -> f64 {
    packing.cost()
}

/// Like [`packing_cost`] but validates the packing against its instance
/// first, returning the violation list on failure.
pub fn packing_cost_checked(instance: &Instance, packing: &Packing) -> Result<f64> {
    let report = validate(instance, packing);
    if !report.is_ok() {
        return Err(Error::InvalidPacking(report.violations));
    }
    Ok(packing.cost())
}

/// A single validation failure.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Item index out of range for the instance.
    BadIndex { bin: usize, index: usize },
    /// Item assigned to more than one bin (or twice to the same bin).
    DuplicateItem { index: usize },
    /// Item never assigned to a bin.
    MissingItem { index: usize },
    /// Bin level above capacity 1.
    OverfullBin { bin: usize, level: f64 },
    /// Stored level disagrees with the sum of contained item sizes.
    LevelMismatch { bin: usize, stored: f64, computed: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadIndex { bin, index } => write!(f, "bin {bin}: item index {index} out of range"),
            Violation::DuplicateItem { index } => write!(f, "duplicate item {index}"),
            Violation::MissingItem { index } => write!(f, "missing item {index}"),
            Violation::OverfullBin { bin, level } => write!(f, "overfull bin {bin} (level {level})"),
            Violation::LevelMismatch { bin, stored, computed } => {
                write!(f, "bin {bin}: stored level {stored} != computed {computed}")
            }
        }
    }
}

/// Outcome of [`validate`]: ok iff the violation list is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that each item appears exactly once, each bin level is at most 1,
/// and stored levels are consistent with the item sums.
pub fn validate(instance: &Instance, packing: &Packing) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen = vec![false; instance.len()];

    for (bin_idx, bin) in packing.bins().iter().enumerate() {
        let mut computed = 0.0;
        for &index in bin.items() {
            if index >= instance.len() {
                violations.push(Violation::BadIndex { bin: bin_idx, index });
                continue;
            }
            if seen[index] {
                violations.push(Violation::DuplicateItem { index });
            }
            seen[index] = true;
            computed += instance.items()[index];
        }
        if bin.level() > 1.0 + EPS_FIT {
            violations.push(Violation::OverfullBin { bin: bin_idx, level: bin.level() });
        }
        if (bin.level() - computed).abs() > LEVEL_EPS {
            violations.push(Violation::LevelMismatch {
                bin: bin_idx,
                stored: bin.level(),
                computed,
            });
        }
    }
    for (index, &was_seen) in seen.iter().enumerate() {
        if !was_seen {
            violations.push(Violation::MissingItem { index });
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(beta: f64, green: f64) -> CostParams {
        CostParams::new(beta, green).unwrap()
    }

    fn packing_of_levels(params: CostParams, groups: &[&[f64]]) -> (Instance, Packing) {
        let mut items = Vec::new();
        let mut bins = Vec::new();
        for group in groups {
            let mut bin = Vec::new();
            for &size in *group {
                bin.push(items.len());
                items.push(size);
            }
            bins.push(bin);
        }
        let instance = Instance::new(items).unwrap();
        let packing = Packing::from_bins(params, bins, &instance);
        (instance, packing)
    }

    #[test]
    fn instance_rejects_bad_sizes() {
        assert!(Instance::new(vec![0.5, 0.0]).is_err());
        assert!(Instance::new(vec![1.0 + 1e-12]).is_err());
        assert!(Instance::new(vec![-0.2]).is_err());
        assert!(Instance::new(vec![]).is_ok());
    }

    #[test]
    fn packing_cost_examples() {
        let (_, packing) = packing_of_levels(p(1.0, 0.5), &[&[0.5], &[0.5]]);
        assert_relative_eq!(packing_cost(&packing), 2.0);

        let (_, packing) = packing_of_levels(p(1.0, 0.5), &[&[0.6], &[0.5, 0.5]]);
        assert_relative_eq!(packing_cost(&packing), 2.6, epsilon = 1e-12);

        let empty = Packing::new(p(1.0, 0.5));
        assert_relative_eq!(packing_cost(&empty), 0.0);
    }

    #[test]
    fn cost_invariant_under_bin_and_item_permutation() {
        let (_, packing) = packing_of_levels(p(2.0, 0.3), &[&[0.2, 0.6], &[0.9], &[0.1, 0.1]]);
        let (_, permuted) =
            packing_of_levels(p(2.0, 0.3), &[&[0.1, 0.1], &[0.6, 0.2], &[0.9]]);
        assert_relative_eq!(packing_cost(&packing), packing_cost(&permuted), epsilon = 1e-12);
    }

    #[test]
    fn validate_accepts_single_item() {
        let (instance, packing) = packing_of_levels(p(1.0, 0.5), &[&[0.4]]);
        assert!(validate(&instance, &packing).is_ok());
        assert_relative_eq!(packing_cost_checked(&instance, &packing).unwrap(), 1.0);
    }

    #[test]
    fn validate_flags_duplicate_item() {
        let instance = Instance::new(vec![0.4]).unwrap();
        let packing = Packing::from_bins(p(1.0, 0.5), vec![vec![0], vec![0]], &instance);
        let report = validate(&instance, &packing);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DuplicateItem { index: 0 })));
    }

    #[test]
    fn validate_flags_overfull_bin() {
        let instance = Instance::new(vec![0.7, 0.5]).unwrap();
        let packing = Packing::from_bins(p(1.0, 0.5), vec![vec![0, 1]], &instance);
        let report = validate(&instance, &packing);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::OverfullBin { bin: 0, .. })));
    }

    #[test]
    fn validate_flags_missing_item_and_level_mismatch() {
        let instance = Instance::new(vec![0.4, 0.3]).unwrap();
        let mut packing = Packing::new(p(1.0, 0.5));
        let mut bin = Bin::empty();
        bin.push(0, 0.5); // wrong size on purpose
        packing.push_bin(bin);
        let report = validate(&instance, &packing);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::MissingItem { index: 1 })));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::LevelMismatch { bin: 0, .. })));
    }
}

//! The two-tier cost model: parameters, per-bin cost, and the offline
//! optimum lower bound used as the denominator of empirical ratios.

use crate::math::pos;
use crate::{Error, Result};

/// Comparison tolerance for "does this item fit" checks.
///
/// An item fits a bin iff `level + size <= capacity + EPS_FIT`. Adversarial
/// inputs use sizes like `1/43 + eps` that are not exactly representable; a
/// fixed tolerance keeps fit decisions deterministic and lets exact-boundary
/// items (size equal to the remaining capacity) fit despite accumulated
/// rounding in the level.
pub const EPS_FIT: f64 = 1e-9;

/// Tolerance for stored-vs-recomputed bin levels during validation.
pub const LEVEL_EPS: f64 = 1e-9;

/// The two halves of parameter space, split at `beta * green = 1`.
///
/// Below the split, black space is cheap and filling bins to capacity is
/// optimal; above it, the optimum fills bins only to the green threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `beta * green <= 1`.
    SmallBg,
    /// `beta * green > 1`.
    LargeBg,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::SmallBg => "small-bg",
            Regime::LargeBg => "large-bg",
        }
    }
}

/// The pair `(beta, green)` governing every cost evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    beta: f64,
    green: f64,
}

impl CostParams {
    /// Requires `beta >= 0` and `0 <= green <= 1`.
    pub fn new(beta: f64, green: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 || !green.is_finite() || !(0.0..=1.0).contains(&green) {
            return Err(Error::InvalidCostParams { beta, green });
        }
        Ok(CostParams { beta, green })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn green(&self) -> f64 {
        self.green
    }

    /// Regime split at `beta * green = 1`; the boundary itself belongs to
    /// [`Regime::SmallBg`] (the two lower-bound formulas coincide there).
    pub fn regime(&self) -> Regime {
        if self.beta * self.green <= 1.0 {
            Regime::SmallBg
        } else {
            Regime::LargeBg
        }
    }

    pub fn beta_green(&self) -> f64 {
        self.beta * self.green
    }
}

/// True iff an item of `size` fits a bin at `level` under `capacity`.
#[inline]
pub fn fits(level: f64, size: f64, capacity: f64) -> bool {
    level + size <= capacity + EPS_FIT
}

/// Cost of a single bin filled to `level`: `1 + beta * (level - green)^+`.
///
/// `level` must lie in `[0, 1]` (up to [`EPS_FIT`]).
pub fn bin_cost(level: f64, params: CostParams) -> Result<f64> {
    if !level.is_finite() || !(0.0..=1.0 + EPS_FIT).contains(&level) {
        return Err(Error::InvalidLevel(level));
    }
    Ok(1.0 + params.beta() * pos(level - params.green()))
}

/// Lower bound on the offline optimum cost for any instance of total size
/// `total_size`.
///
/// Every bin filled to level `L` costs at least `(1 + beta(L - G)^+) / L` per
/// unit of size; minimizing over `L` gives `S (1 + beta (1 - G))` when
/// `beta * green <= 1` (fill to capacity) and `S / G` when `beta * green > 1`
/// (fill to the green threshold). The two branches coincide at the boundary.
pub fn opt_lower_bound(total_size: f64, params: CostParams) -> Result<f64> {
    if !total_size.is_finite() || total_size < 0.0 {
        return Err(Error::NegativeTotalSize(total_size));
    }
    if total_size == 0.0 {
        return Ok(0.0);
    }
    match params.regime() {
        Regime::SmallBg => Ok(total_size * (1.0 + params.beta() * (1.0 - params.green()))),
        // LargeBg forces beta * green > 1, hence green > 0.
        Regime::LargeBg => Ok(total_size / params.green()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(beta: f64, green: f64) -> CostParams {
        CostParams::new(beta, green).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(CostParams::new(-0.1, 0.5).is_err());
        assert!(CostParams::new(1.0, 1.1).is_err());
        assert!(CostParams::new(1.0, -0.1).is_err());
        assert!(CostParams::new(f64::NAN, 0.5).is_err());
        assert!(CostParams::new(0.0, 0.0).is_ok());
        assert!(CostParams::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn regime_partitions_at_unit_product() {
        assert_eq!(p(2.0, 0.5).regime(), Regime::SmallBg);
        assert_eq!(p(2.0, 0.5 + 1e-12).regime(), Regime::LargeBg);
        assert_eq!(p(0.0, 1.0).regime(), Regime::SmallBg);
        assert_eq!(p(4.0, 0.5).regime(), Regime::LargeBg);
    }

    #[test]
    fn bin_cost_examples() {
        assert_relative_eq!(bin_cost(0.5, p(1.0, 0.5)).unwrap(), 1.0);
        assert_relative_eq!(bin_cost(1.0, p(1.0, 0.5)).unwrap(), 1.5);
        // 1 + 4 * 0.4
        assert_relative_eq!(bin_cost(0.9, p(4.0, 0.5)).unwrap(), 2.6, epsilon = 1e-12);
    }

    #[test]
    fn bin_cost_domain() {
        assert!(bin_cost(-0.1, p(1.0, 0.5)).is_err());
        assert!(bin_cost(1.1, p(1.0, 0.5)).is_err());
        // Accumulated-rounding slack at the top is accepted.
        assert!(bin_cost(1.0 + 0.5e-9, p(1.0, 0.5)).is_ok());
    }

    #[test]
    fn bin_cost_monotone_in_level() {
        let params = p(3.0, 0.4);
        let mut last = 0.0;
        for i in 0..=100 {
            let level = i as f64 / 100.0;
            let c = bin_cost(level, params).unwrap();
            assert!(c >= last);
            if level > 0.4 {
                assert!(c > last);
            }
            last = c;
        }
    }

    #[test]
    fn opt_lower_bound_examples() {
        assert_relative_eq!(opt_lower_bound(10.0, p(1.0, 0.5)).unwrap(), 15.0);
        assert_relative_eq!(opt_lower_bound(10.0, p(4.0, 0.5)).unwrap(), 20.0);
        assert_relative_eq!(opt_lower_bound(0.0, p(4.0, 0.5)).unwrap(), 0.0);
        assert!(opt_lower_bound(-1.0, p(1.0, 0.5)).is_err());
    }

    #[test]
    fn opt_lower_bound_branches_agree_at_boundary() {
        // beta * green = 1: S(1 + beta(1-G)) = S/G.
        for &(beta, green) in &[(2.0, 0.5), (4.0, 0.25), (1.25, 0.8)] {
            let s = 7.3;
            let small = s * (1.0 + beta * (1.0 - green));
            let large = s / green;
            assert_relative_eq!(small, large, epsilon = 1e-9);
            assert_relative_eq!(
                opt_lower_bound(s, p(beta, green)).unwrap(),
                small,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn boundary_fits() {
        assert!(fits(0.5, 0.5, 1.0));
        assert!(fits(0.5, 0.5 + 0.5e-9, 1.0));
        assert!(!fits(0.5, 0.5 + 1e-8, 1.0));
    }
}

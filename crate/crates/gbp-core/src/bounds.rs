//! Closed-form competitive-ratio bounds, optimal-threshold formulas, and the
//! weighting schemes behind the upper-bound arguments.
//!
//! Everything here is a pure function of `(beta, green)` and, for threshold
//! algorithms, `tau`. Evaluators are split by regime at `beta * green = 1`
//! and clamp their result to at least 1 (a competitive ratio below 1 is
//! vacuous; several lower-bound formulas dip below 1 in parts of their
//! stated domain).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algorithms::AlgorithmKind;
use crate::cost::{CostParams, Regime};
use crate::math::{cbrt, floor, pos, sqrt};
use crate::{Error, Result};

/// General lower bound for classic online bin packing, kept as the exact
/// rational 248/161 and converted once.
pub const R_CLASSIC: f64 = 248.0 / 161.0;

/// Asymptotic harmonic constant, stored with the precision it is quoted at.
pub const HARMONIC_LIMIT: f64 = 1.691;

/// Classic lower bound for AnyFit-style algorithms, 71/42.
pub const AAF_LB_LIMIT: f64 = 71.0 / 42.0;

fn clamp1(x: f64) -> f64 {
    x.max(1.0)
}

fn denom(beta: f64, green: f64) -> f64 {
    1.0 + beta * (1.0 - green)
}

fn require_small(beta: f64, green: f64) -> Result<()> {
    if beta * green > 1.0 + 1e-12 {
        return Err(Error::WrongRegime { expected: "beta*green <= 1", beta, green });
    }
    Ok(())
}

fn require_large(beta: f64, green: f64) -> Result<()> {
    if beta * green <= 1.0 {
        return Err(Error::WrongRegime { expected: "beta*green > 1", beta, green });
    }
    Ok(())
}

fn require_tau(tau: f64, green: f64) -> Result<()> {
    if !tau.is_finite() || tau < -1e-12 || tau > 1.0 - green + 1e-12 {
        return Err(Error::InvalidTau { tau, green });
    }
    Ok(())
}

fn max_pieces(pieces: &[(&'static str, f64)]) -> f64 {
    pieces.iter().fold(f64::NEG_INFINITY, |acc, &(_, v)| acc.max(v))
}

/// Exact competitive ratio of NextFit when `beta * green <= 1`:
/// `(2 + beta(1-G)) / (1 + beta(1-G))`.
pub fn nextfit_cr(beta: f64, green: f64) -> Result<f64> {
    require_small(beta, green)?;
    Ok(clamp1((2.0 + beta * (1.0 - green)) / denom(beta, green)))
}

/// Exact competitive ratio of WorstFit when `beta * green <= 1`:
/// `(2 + beta(1-2G)^+) / (1 + beta(1-G))`.
pub fn worstfit_cr(beta: f64, green: f64) -> Result<f64> {
    require_small(beta, green)?;
    Ok(clamp1((2.0 + beta * pos(1.0 - 2.0 * green)) / denom(beta, green)))
}

fn aaf_harmonic_lb_raw(beta: f64, green: f64) -> f64 {
    let extra = pos(1.0 / 43.0 - green / 42.0)
        + pos(1.0 / 7.0 - green / 6.0)
        + pos(1.0 / 3.0 - green / 2.0)
        + pos(0.5 - green);
    clamp1((AAF_LB_LIMIT + beta * extra) / denom(beta, green))
}

/// Lower bound shared by FirstFit, BestFit, and Harmonic for
/// `beta * green <= 1`, from the four-phase worst case whose classic limit
/// is 71/42.
pub fn aaf_harmonic_lb(beta: f64, green: f64) -> Result<f64> {
    require_small(beta, green)?;
    Ok(aaf_harmonic_lb_raw(beta, green))
}

/// Upper bound for FirstFit/BestFit when `beta * green <= 1`; three pieces
/// split at `G = 1/2` and `G = 2/3`. Both formulas around `G = 2/3` agree
/// there; the last piece is returned at the boundary.
pub fn aaf_ub(beta: f64, green: f64) -> Result<f64> {
    require_small(beta, green)?;
    let num = if green >= 2.0 / 3.0 {
        1.75
    } else if green > 0.5 {
        1.75 + beta * (0.5 - 0.75 * green)
    } else {
        1.75 + beta * (1.0 - 1.75 * green)
    };
    Ok(clamp1(num / denom(beta, green)))
}

/// Upper bound for Harmonic when `beta * green <= 1`; three pieces split at
/// `G = 1/2` and `G = 2/3`, the last being a maximum of two case bounds.
pub fn harmonic_ub(beta: f64, green: f64) -> Result<f64> {
    require_small(beta, green)?;
    let num = if green <= 0.5 {
        HARMONIC_LIMIT * (1.0 - beta * green) + beta
    } else if green <= 2.0 / 3.0 {
        HARMONIC_LIMIT - 0.691 * beta * green + beta / 2.0
    } else {
        let a = HARMONIC_LIMIT + beta * (1.0 - green) / 6.0;
        let b = 1.636 + beta * (1.0 - green) / 2.0;
        a.max(b)
    };
    Ok(clamp1(num / denom(beta, green)))
}

/// Lower bound on every deterministic online algorithm for
/// `beta * green <= 1`: `(r + beta(1 - rG)^+) / (1 + beta(1-G))` with
/// `r = 248/161`.
pub fn general_lb_small(beta: f64, green: f64) -> Result<f64> {
    require_small(beta, green)?;
    Ok(clamp1((R_CLASSIC + beta * pos(1.0 - R_CLASSIC * green)) / denom(beta, green)))
}

fn nextfit_tau_pieces(beta: f64, green: f64, tau: f64) -> [(&'static str, f64); 3] {
    [
        ("sand", green * (1.0 + tau * beta) / (green + tau)),
        ("mixed", green * (2.0 + tau * beta) / (green + 2.0 * tau)),
        ("pair", (2.0 + tau * beta) / (1.0 + tau * beta)),
    ]
}

/// Exact competitive ratio of NextFit with threshold `tau` when
/// `beta * green > 1`.
pub fn nextfit_tau_cr(beta: f64, green: f64, tau: f64) -> Result<f64> {
    require_large(beta, green)?;
    require_tau(tau, green)?;
    Ok(clamp1(max_pieces(&nextfit_tau_pieces(beta, green, tau))))
}

/// A threshold together with the ratio it attains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauChoice {
    pub tau: f64,
    pub cr: f64,
}

/// Optimal threshold and ratio for NextFit when `beta * green > 1`.
///
/// The threshold is `0` for `beta*green >= 4`, `min(sqrt(G/beta), 1-G)` for
/// `2 < beta*green < 4`, and the closed-form intersection point (capped at
/// `1-G`) for `1 < beta*green <= 2`.
pub fn nextfit_tau_optimal(beta: f64, green: f64) -> Result<TauChoice> {
    require_large(beta, green)?;
    let bg = beta * green;
    if bg >= 4.0 {
        return Ok(TauChoice { tau: 0.0, cr: 2.0 });
    }
    if bg > 2.0 {
        let cand = sqrt(green / beta);
        if cand < 1.0 - green {
            return Ok(TauChoice { tau: cand, cr: clamp1(sqrt(bg)) });
        }
        let tau = 1.0 - green;
        let cr = (2.0 * green + bg * (1.0 - green)) / (2.0 - green);
        return Ok(TauChoice { tau, cr: clamp1(cr) });
    }
    // 1 < bg <= 2
    let disc = sqrt(5.0 * bg * bg - 8.0 * bg + 4.0);
    let tilde = (2.0 - bg + disc) / (2.0 * beta * (bg - 1.0));
    if tilde < 1.0 - green {
        let cr = (3.0 * bg - 2.0 + disc) / (bg + disc);
        Ok(TauChoice { tau: tilde, cr: clamp1(cr) })
    } else {
        let tau = 1.0 - green;
        let cr = (2.0 + beta * (1.0 - green)) / denom(beta, green);
        Ok(TauChoice { tau, cr: clamp1(cr) })
    }
}

fn taf_lb_pieces(beta: f64, green: f64, tau: f64) -> Vec<(&'static str, f64)> {
    if tau >= 1.0 - green - 1e-12 {
        let d = denom(beta, green);
        vec![
            ("phase-input", aaf_harmonic_lb_raw(beta, green)),
            ("half-fill", 1.0 + (2.0 * green - 1.0) * d / 2.0),
            ("sand", green * d),
        ]
    } else {
        vec![
            ("two-per-opt-bin", 2.0 / (1.0 + tau * beta)),
            ("half-fill", 1.0 + (green - tau) * (1.0 + tau * beta) / (2.0 * (green + tau))),
            ("sand", green * (1.0 + tau * beta) / (green + tau)),
        ]
    }
}

/// Lower bound for threshold WorstFit, FirstFit/BestFit, and Harmonic
/// (`K >= 2`) when `beta * green > 1`.
pub fn taf_lb(beta: f64, green: f64, tau: f64) -> Result<f64> {
    require_large(beta, green)?;
    require_tau(tau, green)?;
    Ok(clamp1(max_pieces(&taf_lb_pieces(beta, green, tau))))
}

fn worstfit_tau_pieces(beta: f64, green: f64, tau: f64) -> [(&'static str, f64); 2] {
    [
        ("half-full", 2.0 * green / (green + tau)),
        ("threshold-fill", green * (1.0 + tau * beta) / (green + tau)),
    ]
}

/// Upper bound for threshold WorstFit when `beta * green > 1`.
pub fn worstfit_tau_ub(beta: f64, green: f64, tau: f64) -> Result<f64> {
    require_large(beta, green)?;
    require_tau(tau, green)?;
    Ok(clamp1(max_pieces(&worstfit_tau_pieces(beta, green, tau))))
}

fn taf_ub_pieces(beta: f64, green: f64, tau: f64) -> Vec<(&'static str, f64)> {
    if tau >= 1.0 - green - 1e-12 {
        let d = denom(beta, green);
        vec![
            ("weight-cap", (6.0 * green + 1.0) / 4.0),
            ("half-fill", 1.0 + (2.0 * green - 1.0) * d / 2.0),
            ("sand", green * d),
        ]
    } else {
        vec![
            ("two-per-opt-bin", 2.0 / (1.0 + tau * beta)),
            ("weight-cap", (7.0 * green + tau) / (4.0 * (green + tau))),
            ("half-fill", 1.0 + (green - tau) * (1.0 + tau * beta) / (2.0 * (green + tau))),
            ("sand", green * (1.0 + tau * beta) / (green + tau)),
        ]
    }
}

/// Upper bound for threshold FirstFit/BestFit and Harmonic (`K >= 3`) when
/// `beta * green > 1`.
pub fn taf_ub(beta: f64, green: f64, tau: f64) -> Result<f64> {
    require_large(beta, green)?;
    require_tau(tau, green)?;
    Ok(clamp1(max_pieces(&taf_ub_pieces(beta, green, tau))))
}

/// An optimized threshold, the upper bound it certifies, and whether the
/// bound is known to be exactly optimal (matching lower bound) there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizedTau {
    pub tau: f64,
    pub cr_upper: f64,
    pub provably_optimal: bool,
}

/// Threshold `beta * green` value below which `tau = 1/beta` is provably
/// optimal (matching bounds), about 3.383.
pub fn taf_exact_optimality_limit() -> f64 {
    let s = sqrt(44.0 / 27.0);
    1.0 + cbrt(2.0 + s) + cbrt(2.0 - s)
}

/// Optimized threshold for FirstFit/BestFit and Harmonic when
/// `beta * green > 1`, chosen among `1/beta`, `1/(2 beta)`, and `1 - G`.
pub fn taf_optimized_tau(beta: f64, green: f64) -> Result<OptimizedTau> {
    require_large(beta, green)?;
    let bg = beta * green;
    let ub_switch = 1.75 + sqrt(57.0) / 4.0;
    if beta * (1.0 - green) >= 1.0 {
        let (tau, cr) = if bg <= ub_switch {
            (1.0 / beta, 2.0 * bg / (bg + 1.0))
        } else {
            (0.5 / beta, (14.0 * bg + 1.0) / (8.0 * bg + 4.0))
        };
        let provably_optimal = bg <= taf_exact_optimality_limit();
        return Ok(OptimizedTau { tau, cr_upper: clamp1(cr), provably_optimal });
    }
    if 2.0 * beta * (1.0 - green) >= 1.0 {
        // 1/(2 beta) <= 1 - G < 1/beta: the half-fill curve is minimized at
        // one of its two endpoints.
        let half = (0.5 / beta, (14.0 * bg + 1.0) / (8.0 * bg + 4.0));
        let full = (
            1.0 - green,
            1.0 + (2.0 * green - 1.0) * denom(beta, green) / 2.0,
        );
        let (tau, cr) = if half.1 <= full.1 { half } else { full };
        return Ok(OptimizedTau { tau, cr_upper: clamp1(cr), provably_optimal: false });
    }
    Ok(OptimizedTau {
        tau: 1.0 - green,
        cr_upper: clamp1((6.0 * green + 1.0) / 4.0),
        provably_optimal: false,
    })
}

/// The step function of `beta * green` inside the general lower bound for
/// `beta * green > 1`, with breakpoints at 3/2, 3, 4, and 48.
pub fn general_lb_large_step(bg: f64) -> Result<f64> {
    if bg <= 1.0 {
        return Err(Error::WrongRegime { expected: "beta*green > 1", beta: bg, green: 1.0 });
    }
    Ok(if bg <= 1.5 {
        3.0 * (bg + 1.0) / (bg + 5.0)
    } else if bg <= 3.0 {
        3.0 * (bg + 3.0) / (bg + 11.0)
    } else if bg <= 4.0 {
        9.0 / 7.0
    } else if bg <= 48.0 {
        4.0 / 3.0
    } else {
        1.5
    })
}

/// Lower bound on every deterministic online algorithm for
/// `beta * green > 1`.
pub fn general_lb_large(beta: f64, green: f64) -> Result<f64> {
    require_large(beta, green)?;
    let head = (R_CLASSIC + 1.0 - green) / denom(beta, green);
    Ok(clamp1(head.max(general_lb_large_step(beta * green)?)))
}

/// Threshold below which the per-bin weight floor of the threshold
/// algorithms switches between its two expressions:
/// `mu1(R) = ((1-G b - 2 R b) + sqrt((G b + 2 R b - 1)^2 + 4 b (G - 2R))) / (2 b)`.
pub fn mu1(r: f64, beta: f64, green: f64) -> Result<f64> {
    require_large(beta, green)?;
    let a = green * beta + 2.0 * r * beta - 1.0;
    Ok(((-a) + sqrt(a * a + 4.0 * beta * (green - 2.0 * r))) / (2.0 * beta))
}

/// Threshold at which the offline weight-per-cost cap switches expression:
/// `mu2(R) = R / (beta (G + R) - 1)`.
pub fn mu2(r: f64, beta: f64, green: f64) -> Result<f64> {
    require_large(beta, green)?;
    Ok(r / (beta * (green + r) - 1.0))
}

/// Smallest positive root of
/// `b^2 t^3 + b^2 G t^2 + (4 b G - 3) t - G` on `[0, 1/beta]`, found by
/// bisection to 1e-12; this is where the first two lower-bound pieces of
/// the threshold algorithms intersect.
pub fn hat_tau(beta: f64, green: f64) -> Result<f64> {
    require_large(beta, green)?;
    let g = |t: f64| {
        beta * beta * t * t * t + beta * beta * green * t * t + (4.0 * beta * green - 3.0) * t
            - green
    };
    let mut lo = 0.0_f64;
    let mut hi = 1.0 / beta;
    debug_assert!(g(lo) < 0.0 && g(hi) > 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Item weighting schemes used by the upper-bound arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightScheme {
    /// FirstFit/BestFit scheme for `G <= 2/3`: small items (size at most
    /// 1/2) weigh `(3/2 (1 - bG) + b) x`, large items `1 + b (x - G)^+`.
    AafSmallG { beta: f64, green: f64 },
    /// FirstFit/BestFit scheme for `G > 2/3`: small items weigh `3x/2`.
    AafLargeG { beta: f64, green: f64 },
    /// Per-class Harmonic scheme: an item of class `i` weighs
    /// `(1/i)(1 + b (i x - G)^+)`, with the class capped at `K` as in the
    /// algorithm itself.
    HarmonicPerClass { beta: f64, green: f64, k: u32 },
    /// Threshold-regime scheme: `x` below half the effective capacity,
    /// `x + R` above, for `R in [0, (G + tau)/6]`.
    ThresholdR { r: f64, green: f64, tau: f64 },
}

impl WeightScheme {
    /// Picks the FirstFit/BestFit scheme matching `green`.
    pub fn aaf(params: CostParams) -> WeightScheme {
        if params.green() <= 2.0 / 3.0 {
            WeightScheme::AafSmallG { beta: params.beta(), green: params.green() }
        } else {
            WeightScheme::AafLargeG { beta: params.beta(), green: params.green() }
        }
    }
}

/// Weight of an item of size `x` under a scheme.
pub fn weight(scheme: &WeightScheme, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::InvalidItemSize { index: 0, size: x });
    }
    match *scheme {
        WeightScheme::AafSmallG { beta, green } => Ok(if x > 0.5 {
            1.0 + beta * pos(x - green)
        } else {
            (1.5 * (1.0 - beta * green) + beta) * x
        }),
        WeightScheme::AafLargeG { beta, green } => Ok(if x > 0.5 {
            1.0 + beta * pos(x - green)
        } else {
            1.5 * x
        }),
        WeightScheme::HarmonicPerClass { beta, green, k } => {
            let class = crate::algorithms::harmonic_class(x, k, 1.0)? as f64;
            Ok((1.0 + beta * pos(class * x - green)) / class)
        }
        WeightScheme::ThresholdR { r, green, tau } => {
            let cap = green + tau;
            if !(0.0..=cap / 6.0 + 1e-12).contains(&r) {
                return Err(Error::InvalidFamily(format!(
                    "weight parameter {r} outside [0, {}]",
                    cap / 6.0
                )));
            }
            Ok(if x > cap / 2.0 { x + r } else { x })
        }
    }
}

/// Evaluated lower/upper bounds for one algorithm at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub algorithm: String,
    pub regime: Regime,
    pub lower: f64,
    pub upper: f64,
    pub tau_used: Option<f64>,
    pub tau_optimal: Option<f64>,
    pub pieces: Vec<(String, f64)>,
}

/// Builds the bound report for an algorithm at `(beta, green)`, optionally
/// at a caller-chosen threshold (otherwise the per-algorithm optimized one).
pub fn bound_report(
    kind: AlgorithmKind,
    beta: f64,
    green: f64,
    tau: Option<f64>,
) -> Result<BoundReport> {
    let params = CostParams::new(beta, green)?;
    if let Some(t) = tau {
        require_tau(t, green)?;
    }
    let regime = params.regime();
    let mut pieces: Vec<(String, f64)> = Vec::new();

    let report = match regime {
        Regime::SmallBg => {
            // Filling to capacity is optimal here, so tau = 1 - G throughout.
            let full = 1.0 - green;
            let (lower, upper) = match kind {
                AlgorithmKind::NextFit => {
                    let v = nextfit_cr(beta, green)?;
                    (v, v)
                }
                AlgorithmKind::WorstFit => {
                    let v = worstfit_cr(beta, green)?;
                    (v, v)
                }
                AlgorithmKind::FirstFit | AlgorithmKind::BestFit => {
                    (aaf_harmonic_lb(beta, green)?, aaf_ub(beta, green)?)
                }
                AlgorithmKind::Harmonic(k) => {
                    if k < 2 {
                        return Err(Error::InvalidHarmonic { what: "class count below 2" });
                    }
                    (aaf_harmonic_lb(beta, green)?, harmonic_ub(beta, green)?)
                }
            };
            // The cheap-regime formulas all describe full-capacity runs.
            BoundReport {
                algorithm: kind.tag(),
                regime,
                lower,
                upper,
                tau_used: Some(full),
                tau_optimal: Some(full),
                pieces: Vec::new(),
            }
        }
        Regime::LargeBg => match kind {
            AlgorithmKind::NextFit => {
                let opt = nextfit_tau_optimal(beta, green)?;
                let t = tau.unwrap_or(opt.tau);
                let v = nextfit_tau_cr(beta, green, t)?;
                for (label, value) in nextfit_tau_pieces(beta, green, t) {
                    pieces.push((format!("cr:{label}"), value));
                }
                BoundReport {
                    algorithm: kind.tag(),
                    regime,
                    lower: v,
                    upper: v,
                    tau_used: Some(t),
                    tau_optimal: Some(opt.tau),
                    pieces,
                }
            }
            AlgorithmKind::WorstFit => {
                let tau_opt = (1.0 / beta).min(1.0 - green);
                let t = tau.unwrap_or(tau_opt);
                let lower = taf_lb(beta, green, t)?;
                let upper = worstfit_tau_ub(beta, green, t)?;
                for (label, value) in taf_lb_pieces(beta, green, t) {
                    pieces.push((format!("lb:{label}"), value));
                }
                for (label, value) in worstfit_tau_pieces(beta, green, t) {
                    pieces.push((format!("ub:{label}"), value));
                }
                BoundReport {
                    algorithm: kind.tag(),
                    regime,
                    lower,
                    upper,
                    tau_used: Some(t),
                    tau_optimal: Some(tau_opt),
                    pieces,
                }
            }
            AlgorithmKind::FirstFit | AlgorithmKind::BestFit | AlgorithmKind::Harmonic(_) => {
                if let AlgorithmKind::Harmonic(k) = kind {
                    if k < 3 {
                        return Err(Error::InvalidHarmonic {
                            what: "threshold upper bound needs at least 3 classes",
                        });
                    }
                }
                let opt = taf_optimized_tau(beta, green)?;
                let t = tau.unwrap_or(opt.tau);
                let lower = taf_lb(beta, green, t)?;
                let upper = taf_ub(beta, green, t)?;
                for (label, value) in taf_lb_pieces(beta, green, t) {
                    pieces.push((format!("lb:{label}"), value));
                }
                for (label, value) in taf_ub_pieces(beta, green, t) {
                    pieces.push((format!("ub:{label}"), value));
                }
                BoundReport {
                    algorithm: kind.tag(),
                    regime,
                    lower,
                    upper,
                    tau_used: Some(t),
                    tau_optimal: Some(opt.tau),
                    pieces,
                }
            }
        },
    };
    Ok(report)
}

/// Classic harmonic class of `x` under capacity 1 without a class cap;
/// useful for weight-scheme diagnostics.
pub fn classic_class(x: f64) -> u32 {
    floor(1.0 / x + 1e-12) as u32
}

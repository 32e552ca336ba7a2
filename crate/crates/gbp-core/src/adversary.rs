//! Generators for the worst-case input families behind the lower bounds,
//! each paired with the analytic cost of the offline packing that certifies
//! it and the ratio the family targets.
//!
//! Measured ratios are `online cost / known_opt_cost`; the generated
//! sequences realize their target only asymptotically, so checks should
//! allow a `1 - 5/n - 10*eps` factor for the constant number of extra
//! offline bins and the eps-inflation of item sizes.

use alloc::format;
use alloc::vec::Vec;

use crate::bounds;
use crate::cost::{opt_lower_bound, CostParams, Regime};
use crate::instance::Instance;
use crate::math::{ceil, pos, round};
use crate::{Error, Result};

/// Default item-size perturbation; small enough that `n * eps <= 1e-3` at
/// `n <= 10^4`.
pub const DEFAULT_EPS: f64 = 1e-7;

/// Sylvester numbers 2, 3, 7, 43, 1807, ... with `m_{i+1} = m_i(m_i-1)+1`.
pub fn sylvester_numbers(k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut m = 2u64;
    for _ in 0..k {
        out.push(m);
        m = m * (m - 1) + 1;
    }
    out
}

/// Which construction produced an [`AdversaryInstance`]; carries the numbers
/// the scripted offline packing needs.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `(1, eps)^n`: forces NextFit to open two bins per pair.
    NextFitPairs { n: usize, eps: f64 },
    /// `(1/2, eps)^n`: forces WorstFit to keep every bin half full.
    WorstFitPairs { n: usize, eps: f64 },
    /// `(eps, G+tau)^n`: forces threshold NextFit to waste a bin per pair.
    NextFitTauPairs { n: usize, eps: f64, tau: f64 },
    /// Four ascending phases `1/43, 1/7, 1/3, 1/2` (+eps), `n` items each.
    Aaf7142 { n: usize, eps: f64 },
    /// Items of one tiny size summing to `total`.
    Sand { count: usize, grain: f64, tau: f64 },
    /// Sand prefix then `f` half-capacity items.
    TafCase2 { f: usize, e: usize, eps: f64, tau: f64 },
    /// `n` repetitions of `[tau, eps, G, sand totaling tau]`.
    NextFitTauMixed { n: usize, m: usize, grain: f64, eps: f64, tau: f64 },
    /// `k` phases of reciprocal-Sylvester sizes (+eps), `n` items each.
    Sylvester { k: usize, n: usize, eps: f64 },
    /// Staged two- or three-phase inputs for the general lower bound in the
    /// expensive regime; `stage` crosses 0-based prefixes.
    GeneralLbLarge { n: usize, eps: f64, stage: usize },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::NextFitPairs { .. } => "nf-pairs",
            Family::WorstFitPairs { .. } => "wf-pairs",
            Family::NextFitTauPairs { .. } => "nftau-pairs",
            Family::Aaf7142 { .. } => "aaf7142",
            Family::Sand { .. } => "sand",
            Family::TafCase2 { .. } => "taf-case2",
            Family::NextFitTauMixed { .. } => "nftau-mixed",
            Family::Sylvester { .. } => "sylvester",
            Family::GeneralLbLarge { .. } => "genlb-large",
        }
    }
}

/// A generated worst-case instance with its certified offline cost.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryInstance {
    pub instance: Instance,
    pub params: CostParams,
    /// Analytic offline cost, achievable up to O(1) additive slack.
    pub known_opt_cost: f64,
    /// The ratio this family certifies at these parameters.
    pub target_ratio: f64,
    pub family: Family,
}

fn validate_eps(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps <= 0.0 || eps >= 0.25 {
        return Err(Error::InvalidFamily(format!("eps {eps} outside (0, 0.25)")));
    }
    Ok(())
}

fn require_regime(params: CostParams, want: Regime, family: &str) -> Result<()> {
    if params.regime() != want {
        return Err(Error::InvalidFamily(format!(
            "{family} needs the {} regime, got beta*green = {}",
            want.as_str(),
            params.beta_green()
        )));
    }
    Ok(())
}

/// `n` repetitions of the pair `(a, b)`, in that order.
pub fn gen_pair_sequence(a: f64, b: f64, n: usize) -> Result<Instance> {
    let mut items = Vec::with_capacity(2 * n);
    for _ in 0..n {
        items.push(a);
        items.push(b);
    }
    Instance::new(items)
}

/// `(1, eps)^n`. The offline packing uses one bin per unit item (those
/// costs are forced) plus one bin of sand.
pub fn gen_nextfit_pairs(n: usize, eps: f64, params: CostParams) -> Result<AdversaryInstance> {
    validate_eps(eps)?;
    if n == 0 {
        return Err(Error::InvalidFamily("n must be positive".into()));
    }
    if n as f64 * eps > 1.0 {
        return Err(Error::InvalidFamily("sand volume n*eps exceeds one bin".into()));
    }
    let beta = params.beta();
    let green = params.green();
    let instance = gen_pair_sequence(1.0, eps, n)?.with_label("nf-pairs");
    let known = n as f64 * (1.0 + beta * (1.0 - green))
        + 1.0
        + beta * pos(n as f64 * eps - green);
    let target = (2.0 + beta * (1.0 - green)) / (1.0 + beta * (1.0 - green));
    Ok(AdversaryInstance {
        instance,
        params,
        known_opt_cost: known,
        target_ratio: target.max(1.0),
        family: Family::NextFitPairs { n, eps },
    })
}

/// `(1/2, eps)^n` with `n` even; offline pairs the halves into full bins.
/// Cheap-black-space regime only.
pub fn gen_worstfit_pairs(n: usize, eps: f64, params: CostParams) -> Result<AdversaryInstance> {
    validate_eps(eps)?;
    require_regime(params, Regime::SmallBg, "wf-pairs")?;
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidFamily("n must be positive and even".into()));
    }
    if n as f64 * eps > 1.0 {
        return Err(Error::InvalidFamily("sand volume n*eps exceeds one bin".into()));
    }
    let beta = params.beta();
    let green = params.green();
    let instance = gen_pair_sequence(0.5, eps, n)?.with_label("wf-pairs");
    let known = n as f64 / 2.0 * (1.0 + beta * (1.0 - green))
        + 1.0
        + beta * pos(n as f64 * eps - green);
    let target = (2.0 + beta * pos(1.0 - 2.0 * green)) / (1.0 + beta * (1.0 - green));
    Ok(AdversaryInstance {
        instance,
        params,
        known_opt_cost: known,
        target_ratio: target.max(1.0),
        family: Family::WorstFitPairs { n, eps },
    })
}

/// `(eps, G+tau)^n`; offline keeps each threshold-sized item alone and pools
/// the sand. Expensive-black-space regime only.
pub fn gen_nextfit_tau_pairs(
    n: usize,
    eps: f64,
    params: CostParams,
    tau: f64,
) -> Result<AdversaryInstance> {
    validate_eps(eps)?;
    require_regime(params, Regime::LargeBg, "nftau-pairs")?;
    if n == 0 {
        return Err(Error::InvalidFamily("n must be positive".into()));
    }
    if n as f64 * eps > 1.0 {
        return Err(Error::InvalidFamily("sand volume n*eps exceeds one bin".into()));
    }
    let beta = params.beta();
    let green = params.green();
    if !(0.0..=1.0 - green + 1e-12).contains(&tau) {
        return Err(Error::InvalidTau { tau, green });
    }
    let instance = gen_pair_sequence(eps, green + tau, n)?.with_label("nftau-pairs");
    let known =
        n as f64 * (1.0 + tau * beta) + 1.0 + beta * pos(n as f64 * eps - green);
    let target = (2.0 + tau * beta) / (1.0 + tau * beta);
    Ok(AdversaryInstance {
        instance,
        params,
        known_opt_cost: known,
        target_ratio: target.max(1.0),
        family: Family::NextFitTauPairs { n, eps, tau },
    })
}

/// Four phases of `n` items each: `1/43, 1/7, 1/3, 1/2` plus `eps`, smallest
/// first. Offline packs one item of each phase per bin. Requires `n`
/// divisible by 42 (so the per-phase bin counts are integral) and the
/// cheap-black-space regime.
pub fn gen_aaf_7142(n: usize, eps: f64, params: CostParams) -> Result<AdversaryInstance> {
    let adv = gen_sylvester(4, n, eps, params)?;
    if !n.is_multiple_of(42) {
        return Err(Error::InvalidFamily("n must be divisible by 42".into()));
    }
    Ok(AdversaryInstance {
        target_ratio: bounds::aaf_harmonic_lb(params.beta(), params.green())?,
        family: Family::Aaf7142 { n, eps },
        ..adv
    })
}

/// `ceil(total/grain)` items of size `grain`. The grain must stay below the
/// effective capacity `G + tau` (default `tau = 1 - G`).
pub fn gen_sand(
    total: f64,
    grain: f64,
    params: CostParams,
    tau: Option<f64>,
) -> Result<AdversaryInstance> {
    let green = params.green();
    let tau = tau.unwrap_or(1.0 - green);
    if !(0.0..=1.0 - green + 1e-12).contains(&tau) {
        return Err(Error::InvalidTau { tau, green });
    }
    let cap = (green + tau).min(1.0);
    if !grain.is_finite() || grain <= 0.0 || grain > cap {
        return Err(Error::InvalidFamily(format!(
            "grain {grain} must lie in (0, {cap}]"
        )));
    }
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::InvalidFamily("total must be positive".into()));
    }
    let count = ceil(total / grain) as usize;
    let instance = Instance::new(alloc::vec![grain; count])?.with_label("sand");
    let actual = count as f64 * grain;
    let known = opt_lower_bound(actual, params)?;
    let target = if cap > 0.0 {
        green * (1.0 + params.beta() * tau) / cap
    } else {
        1.0
    };
    Ok(AdversaryInstance {
        instance,
        params,
        known_opt_cost: known,
        target_ratio: target.max(1.0),
        family: Family::Sand { count, grain, tau },
    })
}

/// Sand filling the algorithm's bins to `G + tau`, then `f` items of size
/// `(G+tau)/2 + eps` that offline tops up to exactly `G` with the same sand.
/// Needs `tau < 1/beta` and `tau <= G`.
pub fn gen_taf_case2(
    f: usize,
    eps: f64,
    params: CostParams,
    tau: f64,
) -> Result<AdversaryInstance> {
    validate_eps(eps)?;
    let beta = params.beta();
    let green = params.green();
    if !(0.0..=1.0 - green + 1e-12).contains(&tau) {
        return Err(Error::InvalidTau { tau, green });
    }
    if beta > 0.0 && tau >= 1.0 / beta {
        return Err(Error::InvalidFamily(format!(
            "tau {tau} must be below 1/beta = {}",
            1.0 / beta
        )));
    }
    if tau > green {
        return Err(Error::InvalidFamily(format!("tau {tau} above green {green}")));
    }
    if f == 0 {
        return Err(Error::InvalidFamily("f must be positive".into()));
    }
    let half = (green + tau) / 2.0 + eps;
    let e = round((green - tau) / (2.0 * eps) * f as f64) as usize;
    let mut items = alloc::vec![eps; e];
    items.extend(core::iter::repeat_n(half, f));
    let instance = Instance::new(items)?.with_label("taf-case2");
    let target = 1.0 + (green - tau) * (1.0 + tau * beta) / (2.0 * (green + tau));
    // One bin per half item, topped up to G with sand; the eps-dust makes
    // the volume bound marginally larger, so take whichever dominates.
    let known = (f as f64).max(opt_lower_bound(instance.total_size(), params)?);
    Ok(AdversaryInstance {
        instance,
        params,
        known_opt_cost: known,
        target_ratio: target.max(1.0),
        family: Family::TafCase2 { f, e, eps, tau },
    })
}

/// `n` repetitions of `[tau, eps, G, sand totaling tau]` (the sand grain is
/// `tau/m` with `m` items so the total is exact). Offline fills bins to
/// exactly `G`. Needs `0 < tau <= G` and the expensive regime; `tau = 0`
/// degenerates to `(eps, G)^n` with no sand.
pub fn gen_nextfit_tau_mixed(
    n: usize,
    eps: f64,
    params: CostParams,
    tau: f64,
) -> Result<AdversaryInstance> {
    validate_eps(eps)?;
    require_regime(params, Regime::LargeBg, "nftau-mixed")?;
    let beta = params.beta();
    let green = params.green();
    if !(0.0..=1.0 - green + 1e-12).contains(&tau) {
        return Err(Error::InvalidTau { tau, green });
    }
    if tau > green {
        return Err(Error::InvalidFamily(format!("tau {tau} above green {green}")));
    }
    if n == 0 {
        return Err(Error::InvalidFamily("n must be positive".into()));
    }
    let (m, grain) = if tau > 0.0 {
        let m = (round(tau / eps) as usize).max(1);
        (m, tau / m as f64)
    } else {
        (0, 0.0)
    };
    let mut items = Vec::with_capacity(n * (3 + m));
    for _ in 0..n {
        if tau > 0.0 {
            items.push(tau);
        }
        items.push(eps);
        items.push(green);
        items.extend(core::iter::repeat_n(grain, m));
    }
    let instance = Instance::new(items)?.with_label("nftau-mixed");
    let known = opt_lower_bound(instance.total_size(), params)?;
    let target = green * (2.0 + tau * beta) / (green + 2.0 * tau);
    Ok(AdversaryInstance {
        instance,
        params,
        known_opt_cost: known,
        target_ratio: target.max(1.0),
        family: Family::NextFitTauMixed { n, m, grain, eps, tau },
    })
}

/// `k` phases of `n` items each with sizes `1/m + eps` for the Sylvester
/// numbers `m` in decreasing order (so sizes ascend). Offline packs one item
/// per phase in each bin, which requires `k * eps <= 1/(m_{k+1} - 1)`.
/// Cheap-black-space regime only.
pub fn gen_sylvester(
    k: usize,
    n: usize,
    eps: f64,
    params: CostParams,
) -> Result<AdversaryInstance> {
    validate_eps(eps)?;
    require_regime(params, Regime::SmallBg, "sylvester")?;
    if k == 0 || k > 6 {
        return Err(Error::InvalidFamily("k must lie in 1..=6".into()));
    }
    if n == 0 {
        return Err(Error::InvalidFamily("n must be positive".into()));
    }
    let ms = sylvester_numbers(k + 1);
    let window = 1.0 / (k as f64 * (ms[k] - 1) as f64);
    if eps > window {
        return Err(Error::InvalidFamily(format!(
            "eps {eps} too large for k={k}; needs eps <= {window:.3e}"
        )));
    }
    let beta = params.beta();
    let green = params.green();
    let mut items = Vec::with_capacity(k * n);
    for phase in 0..k {
        let m = ms[k - 1 - phase] as f64;
        let size = 1.0 / m + eps;
        items.extend(core::iter::repeat_n(size, n));
    }
    let instance = Instance::new(items)?.with_label("sylvester");
    let known = n as f64 * (1.0 + beta * (1.0 - green));
    let target = bounds::general_lb_small(beta, green)?;
    Ok(AdversaryInstance {
        instance,
        params,
        known_opt_cost: known,
        target_ratio: target,
        family: Family::Sylvester { k, n, eps },
    })
}

/// Staged inputs for the general lower bound when `beta * green > 1`: each
/// returned instance is a prefix (`sigma_1`, `sigma_1 sigma_2`, ...) with
/// its own offline cost; a driver runs an algorithm on every prefix and
/// takes the worst measured ratio.
pub fn gen_general_lb_large(
    n: usize,
    eps: Option<f64>,
    params: CostParams,
) -> Result<Vec<AdversaryInstance>> {
    require_regime(params, Regime::LargeBg, "genlb-large")?;
    let beta = params.beta();
    let green = params.green();
    let bg = beta * green;
    let target = bounds::general_lb_large_step(bg)?;

    let (phase_sizes, opts, eps_used): (Vec<f64>, Vec<f64>, f64) = if bg <= 4.0 {
        if n == 0 || !n.is_multiple_of(3) {
            return Err(Error::InvalidFamily("n must be a positive multiple of 3".into()));
        }
        let nf = n as f64;
        (
            alloc::vec![green / 3.0, 2.0 * green / 3.0],
            alloc::vec![nf / 3.0, nf],
            0.0,
        )
    } else if bg <= 48.0 {
        if n == 0 || !n.is_multiple_of(6) {
            return Err(Error::InvalidFamily("n must be a positive multiple of 6".into()));
        }
        let nf = n as f64;
        (
            alloc::vec![
                green * (2.0 * bg + 1.0) / (6.0 * bg),
                green * (4.0 * bg - 1.0) / (6.0 * bg),
            ],
            alloc::vec![nf / 2.0, nf],
            0.0,
        )
    } else {
        if n == 0 || !n.is_multiple_of(6) {
            return Err(Error::InvalidFamily("n must be a positive multiple of 6".into()));
        }
        let lo = 1.0 / (2.0 * bg);
        let hi = 1.0 / 84.0 - 1.0 / (14.0 * bg);
        let e = eps.unwrap_or(0.5 * (lo + hi));
        if !(e > lo && e < hi) {
            return Err(Error::InvalidFamily(format!(
                "eps {e} outside the valid window ({lo:.3e}, {hi:.3e})"
            )));
        }
        let nf = n as f64;
        (
            alloc::vec![
                green * (1.0 / 6.0 - 2.0 * e),
                green * (1.0 / 3.0 + e),
                green * (0.5 + e),
            ],
            alloc::vec![nf / 6.0, nf / 2.0, nf],
            e,
        )
    };

    let mut out = Vec::with_capacity(phase_sizes.len());
    let mut items: Vec<f64> = Vec::new();
    for (stage, (&size, &opt)) in phase_sizes.iter().zip(opts.iter()).enumerate() {
        items.extend(core::iter::repeat_n(size, n));
        let instance = Instance::new(items.clone())?.with_label("genlb-large");
        out.push(AdversaryInstance {
            instance,
            params,
            known_opt_cost: opt,
            target_ratio: target,
            family: Family::GeneralLbLarge { n, eps: eps_used, stage },
        });
    }
    Ok(out)
}

/// A hardness-reduction instance built from integer weights: two items of
/// size `1 - eps` plus one item `a * eps / s` per weight `a`, where the
/// weights sum to `2s`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReduction {
    pub instance: Instance,
    /// Optimal cost when the weights split into two equal-sum halves.
    pub yes_cost: f64,
    /// Cost floor when they do not.
    pub no_cost_lb: f64,
}

/// Builds the reduction instance; `eps` must stay below
/// `min(1/2, 1/(2 beta), 1 - G)` and the weights must have an even sum.
pub fn gen_partition_reduction(
    weights: &[u64],
    eps: f64,
    params: CostParams,
) -> Result<PartitionReduction> {
    let beta = params.beta();
    let green = params.green();
    let mut limit = (0.5_f64).min(1.0 - green);
    if beta > 0.0 {
        limit = limit.min(0.5 / beta);
    }
    if !eps.is_finite() || eps <= 0.0 || eps >= limit {
        return Err(Error::InvalidFamily(format!(
            "eps {eps} outside (0, {limit})"
        )));
    }
    if weights.contains(&0) {
        return Err(Error::InvalidFamily("weights must be positive".into()));
    }
    let total: u64 = weights.iter().sum();
    if !total.is_multiple_of(2) {
        return Err(Error::InvalidFamily("weights must have an even sum".into()));
    }
    let s = total / 2;
    let mut items = alloc::vec![1.0 - eps, 1.0 - eps];
    for &w in weights {
        items.push(w as f64 * eps / s as f64);
    }
    let instance = Instance::new(items)?.with_label("partition");
    Ok(PartitionReduction {
        instance,
        yes_cost: 2.0 + 2.0 * beta * (1.0 - green),
        no_cost_lb: 2.0 * (1.5 + beta * (1.0 - eps - green)),
    })
}

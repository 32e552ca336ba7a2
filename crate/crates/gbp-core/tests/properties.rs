//! Cross-module invariants: structural guarantees of the packing engines,
//! the volume lower bound, and the weighting schemes behind the upper-bound
//! arguments.

use gbp_core::algorithms::{harmonic_class, pack, AlgorithmKind, ThresholdPolicy};
use gbp_core::bounds::{weight, WeightScheme};
use gbp_core::cost::{opt_lower_bound, CostParams, EPS_FIT};
use gbp_core::instance::{packing_cost, validate, Instance, Packing};
use gbp_core::sample::{sample, Distribution, GeneratorSpec};
use proptest::prelude::*;

fn params(beta: f64, green: f64) -> CostParams {
    CostParams::new(beta, green).unwrap()
}

fn all_kinds() -> [AlgorithmKind; 5] {
    AlgorithmKind::all_default()
}

/// Every (kind, tau) combination used by the randomized checks below.
fn pack_all(instance: &Instance, p: CostParams, tau: f64) -> Vec<(AlgorithmKind, Packing)> {
    let policy = ThresholdPolicy::new(tau, p.green()).unwrap();
    all_kinds()
        .into_iter()
        .map(|kind| (kind, pack(kind, policy, instance, p).unwrap()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Item volume is conserved, every packing validates, and its cost can
    /// never beat the volume-based optimum lower bound.
    #[test]
    fn packings_conserve_volume_and_respect_lower_bound(
        sizes in prop::collection::vec(1e-4..1.0f64, 1..60),
        beta in 0.0..8.0f64,
        green in 0.05..1.0f64,
        tau_frac in 0.0..1.0f64,
    ) {
        let instance = Instance::new(sizes).unwrap();
        let p = params(beta, green);
        let tau = tau_frac * (1.0 - green);
        for (kind, packing) in pack_all(&instance, p, tau) {
            prop_assert!(validate(&instance, &packing).is_ok());
            let total: f64 = packing.bins().iter().map(|b| b.level()).sum();
            prop_assert!((total - instance.total_size()).abs() < 1e-6, "{kind:?}");
            let lb = opt_lower_bound(instance.total_size(), p).unwrap();
            prop_assert!(packing_cost(&packing) >= lb - 1e-9, "{kind:?}");
        }
    }

    /// Bins never exceed the effective capacity except single oversized
    /// items, which sit alone.
    #[test]
    fn threshold_respected(
        sizes in prop::collection::vec(1e-4..1.0f64, 1..60),
        green in 0.05..0.95f64,
        tau_frac in 0.0..1.0f64,
    ) {
        let instance = Instance::new(sizes).unwrap();
        let p = params(1.0, green);
        let tau = tau_frac * (1.0 - green);
        let cap = green + tau;
        for (kind, packing) in pack_all(&instance, p, tau) {
            for bin in packing.bins() {
                let oversized = bin.len() == 1
                    && instance.items()[bin.items()[0]] > cap + EPS_FIT;
                prop_assert!(
                    oversized || bin.level() <= cap + EPS_FIT,
                    "{kind:?}: level {} above capacity {cap}",
                    bin.level()
                );
            }
        }
    }
}

#[test]
fn nextfit_consecutive_bins_overfill_capacity() {
    // With no oversized items, each new NextFit bin certifies that the item
    // did not fit the previous one, so consecutive levels sum above G + tau.
    for seed in 0..20 {
        let green = 0.3 + 0.05 * (seed % 5) as f64;
        let tau = (1.0 - green) * 0.25 * (seed % 4) as f64;
        let cap = green + tau;
        let inst = sample(&GeneratorSpec { kind: Distribution::Uniform, n: 400, seed }).unwrap();
        let sizes: Vec<f64> = inst.items().iter().map(|&x| x.min(cap - 1e-6)).collect();
        let inst = Instance::new(sizes).unwrap();
        let packing = pack(
            AlgorithmKind::NextFit,
            ThresholdPolicy::new(tau, green).unwrap(),
            &inst,
            params(1.0, green),
        )
        .unwrap();
        for pair in packing.bins().windows(2) {
            assert!(
                pair[0].level() + pair[1].level() > cap - EPS_FIT,
                "consecutive bins {} + {} below capacity {cap}",
                pair[0].level(),
                pair[1].level()
            );
        }
    }
}

#[test]
fn anyfit_keeps_at_most_one_half_empty_bin() {
    for seed in 20..40 {
        let green = 0.4 + 0.05 * (seed % 5) as f64;
        let tau = (1.0 - green) * (0.33 * (seed % 3) as f64);
        let cap = green + tau;
        let inst = sample(&GeneratorSpec { kind: Distribution::Uniform, n: 400, seed }).unwrap();
        let sizes: Vec<f64> = inst.items().iter().map(|&x| x.min(cap - 1e-6)).collect();
        let inst = Instance::new(sizes).unwrap();
        for kind in [AlgorithmKind::WorstFit, AlgorithmKind::FirstFit, AlgorithmKind::BestFit] {
            let packing = pack(
                kind,
                ThresholdPolicy::new(tau, green).unwrap(),
                &inst,
                params(1.0, green),
            )
            .unwrap();
            let low = packing
                .bins()
                .iter()
                .filter(|b| b.level() <= cap / 2.0 + EPS_FIT)
                .count();
            assert!(low <= 1, "{kind:?}: {low} bins at or below half capacity");
        }
    }
}

#[test]
fn harmonic_bins_are_class_pure() {
    for seed in 40..55 {
        let k = 2 + (seed % 9) as u32;
        let inst = sample(&GeneratorSpec { kind: Distribution::Uniform, n: 500, seed }).unwrap();
        let p = params(1.0, 0.5);
        let packing = pack(
            AlgorithmKind::Harmonic(k),
            ThresholdPolicy::full_capacity(0.5),
            &inst,
            p,
        )
        .unwrap();
        for bin in packing.bins() {
            let classes: Vec<u32> = bin
                .items()
                .iter()
                .map(|&i| harmonic_class(inst.items()[i], k, 1.0).unwrap())
                .collect();
            assert!(classes.windows(2).all(|w| w[0] == w[1]), "mixed classes in a bin");
            let class = classes[0];
            if class < k {
                assert!(bin.len() <= class as usize, "class-{class} bin with {} items", bin.len());
            }
        }
    }
}

/// FirstFit/BestFit cost stays below the scheme weight of the input, up to
/// two exceptional bins.
#[test]
fn anyfit_cost_below_scheme_weight() {
    for seed in 0..40 {
        let inst = sample(&GeneratorSpec {
            kind: Distribution::Weibull { shape: 3.0 },
            n: 400,
            seed: 900 + seed,
        })
        .unwrap();
        let green = 0.15 + 0.8 * (seed as f64 / 40.0);
        let beta = (1.0 / green) * (0.2 + 0.8 * ((seed % 7) as f64 / 7.0));
        let p = params(beta, green);
        let scheme = WeightScheme::aaf(p);
        let total_weight: f64 = inst.items().iter().map(|&x| weight(&scheme, x).unwrap()).sum();
        let slack = 2.0 * (1.0 + beta * (1.0 - green));
        for kind in [AlgorithmKind::FirstFit, AlgorithmKind::BestFit] {
            let packing = pack(kind, ThresholdPolicy::full_capacity(green), &inst, p).unwrap();
            assert!(
                packing_cost(&packing) <= total_weight + slack,
                "{kind:?}: cost {} above weight {total_weight} + {slack} (seed {seed})",
                packing_cost(&packing)
            );
        }
    }
}

/// Every closed Harmonic bin costs no more than the per-class weight of its
/// contents.
#[test]
fn harmonic_closed_bin_cost_below_weight() {
    let k = 10u32;
    for seed in 0..30 {
        let inst = sample(&GeneratorSpec {
            kind: Distribution::Weibull { shape: 3.0 },
            n: 400,
            seed: 1700 + seed,
        })
        .unwrap();
        let green = 0.2 + 0.6 * (seed as f64 / 30.0);
        let beta = 1.0 / green * (0.3 + 0.7 * ((seed % 5) as f64 / 5.0));
        let p = params(beta, green);
        let scheme = WeightScheme::HarmonicPerClass { beta, green, k };
        let packing =
            pack(AlgorithmKind::Harmonic(k), ThresholdPolicy::full_capacity(green), &inst, p)
                .unwrap();

        // A bin of class c is open iff it is the last bin of that class.
        let classes: Vec<u32> = packing
            .bins()
            .iter()
            .map(|b| harmonic_class(inst.items()[b.items()[0]], k, 1.0).unwrap())
            .collect();
        let mut last_of_class = std::collections::HashMap::new();
        for (idx, &c) in classes.iter().enumerate() {
            last_of_class.insert(c, idx);
        }
        for (idx, bin) in packing.bins().iter().enumerate() {
            if last_of_class[&classes[idx]] == idx {
                continue; // still open
            }
            let bin_weight: f64 = bin
                .items()
                .iter()
                .map(|&i| weight(&scheme, inst.items()[i]).unwrap())
                .sum();
            let bin_cost = 1.0 + beta * (bin.level() - green).max(0.0);
            assert!(
                bin_cost <= bin_weight + 1e-9,
                "closed bin cost {bin_cost} above weight {bin_weight} (seed {seed})"
            );
        }
    }
}

/// On an all-sand input with cheap black space, raising the threshold never
/// increases the cost, for every algorithm. The total size must be large
/// enough that the ideal per-step saving dominates the one-bin wobble from
/// the final partial bin, i.e. `S (1-bG) dtau / C^2` must beat a single
/// bin's cost; the grid below keeps that margin.
#[test]
fn sand_cost_nonincreasing_in_tau() {
    let grain = 1e-3;
    let n = 100_000; // total size 100
    let inst = Instance::new(vec![grain; n]).unwrap();
    for &(beta, green) in &[(1.0, 0.5), (0.5, 0.5), (1.0, 0.3), (1.25, 0.4)] {
        let p = params(beta, green);
        for kind in all_kinds() {
            let mut last = f64::INFINITY;
            for step in 0..=10 {
                let tau = (1.0 - green) * step as f64 / 10.0;
                let packing =
                    pack(kind, ThresholdPolicy::new(tau, green).unwrap(), &inst, p).unwrap();
                let cost = packing_cost(&packing);
                assert!(
                    cost <= last + 1e-9,
                    "{kind:?} at ({beta},{green}): cost rose from {last} to {cost} at tau={tau}"
                );
                last = cost;
            }
        }
    }
}

/// With expensive black space, algorithms that always fill to capacity get
/// arbitrarily worse as beta grows.
#[test]
fn full_capacity_ratio_grows_with_beta() {
    let grain = 1e-3;
    let n = 5_000;
    let inst = Instance::new(vec![grain; n]).unwrap();
    let green = 0.5;
    for kind in [AlgorithmKind::NextFit, AlgorithmKind::FirstFit] {
        let ratio_at = |beta: f64| {
            let p = params(beta, green);
            let packing = pack(kind, ThresholdPolicy::full_capacity(green), &inst, p).unwrap();
            packing_cost(&packing) / opt_lower_bound(inst.total_size(), p).unwrap()
        };
        let low = ratio_at(2.0 / green);
        let high = ratio_at(100.0 / green);
        assert!(
            high > low + 1.0,
            "{kind:?}: ratio {high} at beta=200 not beyond {low} at beta=4"
        );
    }
}

//! Offline baselines: an exact small-instance solver (the reference oracle
//! for everything else), an asymptotic approximation scheme, and the
//! scripted offline packings that certify the adversary families' costs.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::adversary::{AdversaryInstance, Family};
use crate::cost::{fits, CostParams, Regime, EPS_FIT};
use crate::instance::{Instance, Packing};
use crate::math::{ceil, pos};
use crate::{Error, Result};

/// Default item cap for the exact solver.
pub const DEFAULT_EXACT_CAP: usize = 14;

/// Cap on distinct rounded sizes entering the bin-type enumeration.
pub const APTAS_MAX_DISTINCT: usize = 12;

/// Cap on enumerated bin types.
pub const APTAS_MAX_TYPES: usize = 50_000;

/// Output of the exact solver.
#[derive(Debug, Clone)]
pub struct ExactResult {
    pub packing: Packing,
    pub cost: f64,
    pub nodes_explored: u64,
    pub proven_optimal: bool,
}

/// Minimum-cost packing by branch and bound, item cap
/// [`DEFAULT_EXACT_CAP`].
pub fn exact_opt(instance: &Instance, params: CostParams) -> Result<ExactResult> {
    exact_opt_capped(instance, params, DEFAULT_EXACT_CAP)
}

/// Minimum-cost packing by branch and bound over item-to-bin assignments.
///
/// Items are processed largest first; an item may open at most one new bin
/// (bins are interchangeable, so only the next unused one), and placements
/// into existing bins skip levels already tried at the same node. Nodes are
/// pruned when the running cost plus a volume-based completion bound cannot
/// beat the incumbent.
pub fn exact_opt_capped(
    instance: &Instance,
    params: CostParams,
    cap: usize,
) -> Result<ExactResult> {
    let n = instance.len();
    if n > cap {
        return Err(Error::InstanceTooLarge { len: n, cap });
    }
    if n == 0 {
        return Ok(ExactResult {
            packing: Packing::new(params),
            cost: 0.0,
            nodes_explored: 0,
            proven_optimal: true,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        instance.items()[b]
            .partial_cmp(&instance.items()[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let sizes: Vec<f64> = order.iter().map(|&i| instance.items()[i]).collect();
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + sizes[i];
    }

    // Seed the incumbent with first-fit on the sorted order.
    let seed_assign = first_fit_assign(&sizes);
    let seed_cost = assign_cost(&sizes, &seed_assign, params);

    let unit_rate = match params.regime() {
        Regime::SmallBg => 1.0 + params.beta() * (1.0 - params.green()),
        Regime::LargeBg => 1.0 / params.green(),
    };

    let mut search = Search {
        sizes: &sizes,
        suffix: &suffix,
        beta: params.beta(),
        green: params.green(),
        fill_rate: params.beta().min(unit_rate),
        levels: Vec::new(),
        assign: vec![usize::MAX; n],
        best_cost: seed_cost,
        best_assign: seed_assign,
        nodes: 0,
    };
    search.run(0, 0.0, 0.0);

    let mut bins: Vec<Vec<usize>> = Vec::new();
    for (pos_in_order, &bin) in search.best_assign.iter().enumerate() {
        if bin >= bins.len() {
            bins.resize(bin + 1, Vec::new());
        }
        bins[bin].push(order[pos_in_order]);
    }
    let packing = Packing::from_bins(params, bins, instance);
    let cost = packing.cost();
    Ok(ExactResult { packing, cost, nodes_explored: search.nodes, proven_optimal: true })
}

fn first_fit_assign(sizes: &[f64]) -> Vec<usize> {
    let mut levels: Vec<f64> = Vec::new();
    let mut assign = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let slot = levels.iter().position(|&l| fits(l, size, 1.0));
        match slot {
            Some(b) => {
                levels[b] += size;
                assign.push(b);
            }
            None => {
                levels.push(size);
                assign.push(levels.len() - 1);
            }
        }
    }
    assign
}

fn assign_cost(sizes: &[f64], assign: &[usize], params: CostParams) -> f64 {
    let bins = assign.iter().max().map_or(0, |&b| b + 1);
    let mut levels = vec![0.0; bins];
    for (i, &b) in assign.iter().enumerate() {
        levels[b] += sizes[i];
    }
    levels
        .iter()
        .map(|&l| 1.0 + params.beta() * pos(l - params.green()))
        .sum()
}

struct Search<'a> {
    sizes: &'a [f64],
    suffix: &'a [f64],
    beta: f64,
    green: f64,
    /// Lower bound on the cost of one unit of remaining volume once the
    /// open green space is exhausted.
    fill_rate: f64,
    levels: Vec<f64>,
    assign: Vec<usize>,
    best_cost: f64,
    best_assign: Vec<usize>,
    nodes: u64,
}

impl Search<'_> {
    fn run(&mut self, idx: usize, cost: f64, green_gap: f64) {
        self.nodes += 1;
        if idx == self.sizes.len() {
            if cost < self.best_cost - 1e-12 {
                self.best_cost = cost;
                self.best_assign = self.assign.clone();
            }
            return;
        }
        let completion = pos(self.suffix[idx] - green_gap) * self.fill_rate;
        if cost + completion >= self.best_cost - 1e-12 {
            return;
        }
        let size = self.sizes[idx];
        for b in 0..self.levels.len() {
            let level = self.levels[b];
            // Equal levels lead to isomorphic subtrees.
            if self.levels[..b].iter().any(|&l| (l - level).abs() < 1e-12) {
                continue;
            }
            if !fits(level, size, 1.0) {
                continue;
            }
            let new_level = level + size;
            let dcost = self.beta * (pos(new_level - self.green) - pos(level - self.green));
            let dgap = pos(self.green - level) - pos(self.green - new_level);
            self.levels[b] = new_level;
            self.assign[idx] = b;
            self.run(idx + 1, cost + dcost, green_gap - dgap);
            self.levels[b] = level;
        }
        let b = self.levels.len();
        self.levels.push(size);
        self.assign[idx] = b;
        let dcost = 1.0 + self.beta * pos(size - self.green);
        self.run(idx + 1, cost + dcost, green_gap + pos(self.green - size));
        self.levels.pop();
    }
}

/// Structural property of expensive-regime optima: no bin holds two items of
/// size at least `G`, and the total volume of sub-`G` items sharing bins
/// with such items is at most `1/beta`.
pub fn large_regime_structure_ok(instance: &Instance, packing: &Packing) -> bool {
    let green = packing.params().green();
    let beta = packing.params().beta();
    let mut co_located = 0.0;
    for bin in packing.bins() {
        let mut larges = 0usize;
        let mut small_volume = 0.0;
        for &i in bin.items() {
            let size = instance.items()[i];
            if size >= green {
                larges += 1;
            } else {
                small_volume += size;
            }
        }
        if larges > 1 {
            return false;
        }
        if larges == 1 {
            co_located += small_volume;
        }
    }
    co_located <= 1.0 / beta + 1e-9
}

/// Packing produced by the approximation scheme: large items are rounded up
/// within sorted groups and the rounded instance is solved exactly over
/// enumerated bin types; small items are then inserted greedily (cheap
/// regime) or pre-bundled into pseudo-items (expensive regime). The cost is
/// at most `(1 + epsilon) * OPT` plus an additive constant.
pub fn aptas(instance: &Instance, params: CostParams, epsilon: f64) -> Result<Packing> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidFamily("epsilon must be positive".into()));
    }
    let beta = params.beta();
    let green = params.green();
    let bg = params.beta_green();

    // Rounding granularity per regime; at bg = 1 exactly the cheap-regime
    // formula degenerates to zero, so the bundling branch takes over.
    let bundling = bg >= 1.0;
    let delta = if bundling {
        epsilon / (4.0 * beta * beta)
    } else if beta > 0.0 {
        (epsilon / 2.0).min(epsilon * (1.0 - bg) / (2.0 * beta))
    } else {
        epsilon / 2.0
    };

    // Pseudo-items: (size, original indices). Bundles group small items to a
    // total in [delta, 2 delta).
    let mut pseudo: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut small: Vec<usize> = Vec::new();
    for (i, &size) in instance.items().iter().enumerate() {
        if size > delta {
            pseudo.push((size, vec![i]));
        } else {
            small.push(i);
        }
    }
    if bundling {
        let mut members: Vec<usize> = Vec::new();
        let mut total = 0.0;
        for i in small.drain(..) {
            members.push(i);
            total += instance.items()[i];
            if total >= delta {
                pseudo.push((total, core::mem::take(&mut members)));
                total = 0.0;
            }
        }
        if !members.is_empty() {
            pseudo.push((total, members));
        }
    }

    let mut bins: Vec<Vec<usize>> = if pseudo.is_empty() {
        Vec::new()
    } else {
        solve_rounded(&pseudo, params, delta, epsilon / 3.0)?
    };

    if !bundling {
        small.sort_by(|&a, &b| {
            instance.items()[a]
                .partial_cmp(&instance.items()[b])
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut levels: Vec<f64> = bins
            .iter()
            .map(|bin| bin.iter().map(|&i| instance.items()[i]).sum())
            .collect();
        for i in small {
            let size = instance.items()[i];
            let within_green = levels.iter().position(|&l| l + size <= green + EPS_FIT);
            let slot =
                within_green.or_else(|| levels.iter().position(|&l| fits(l, size, 1.0)));
            match slot {
                Some(b) => {
                    bins[b].push(i);
                    levels[b] += size;
                }
                None => {
                    bins.push(vec![i]);
                    levels.push(size);
                }
            }
        }
    }
    Ok(Packing::from_bins(params, bins, instance))
}

/// Exact minimum over the rounded instance: pseudo-items are sorted, split
/// into groups, rounded up to each group's maximum, and the resulting
/// multiset is covered by enumerated bin types via memoized search.
fn solve_rounded(
    pseudo: &[(f64, Vec<usize>)],
    params: CostParams,
    delta: f64,
    eps_round: f64,
) -> Result<Vec<Vec<usize>>> {
    let n = pseudo.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pseudo[a].0.partial_cmp(&pseudo[b].0).unwrap().then(a.cmp(&b)));

    // Group count from the accuracy target, capped at one item per group
    // (at which point rounding is exact).
    let needed = (1.0 + params.beta() * (1.0 - params.green())) / (delta * eps_round);
    let s = if needed.is_finite() && needed >= 1.0 {
        (ceil(needed) as usize).min(n)
    } else {
        n
    };
    let group_len = n.div_ceil(s);

    // Distinct rounded sizes (ascending) with their member stacks.
    let mut group_sizes: Vec<f64> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for chunk in order.chunks(group_len) {
        let rounded = pseudo[*chunk.last().unwrap()].0;
        if group_sizes.last().is_some_and(|&last| (last - rounded).abs() < 1e-15) {
            members.last_mut().unwrap().extend_from_slice(chunk);
        } else {
            group_sizes.push(rounded);
            members.push(chunk.to_vec());
        }
    }
    if group_sizes.len() > APTAS_MAX_DISTINCT {
        return Err(Error::EnumerationTooLarge {
            count: group_sizes.len(),
            cap: APTAS_MAX_DISTINCT,
        });
    }

    let avail: Vec<u16> = members.iter().map(|m| m.len() as u16).collect();
    let types = enumerate_types(&group_sizes, &avail)?;
    let type_costs: Vec<f64> = types
        .iter()
        .map(|t| {
            let total: f64 = t
                .iter()
                .zip(&group_sizes)
                .map(|(&c, &size)| c as f64 * size)
                .sum();
            1.0 + params.beta() * pos(total - params.green())
        })
        .collect();

    let chosen = cover(&avail, &types, &type_costs);

    // Decode the chosen types back to original item indices.
    let mut stacks = members;
    let mut bins = Vec::with_capacity(chosen.len());
    for ti in chosen {
        let mut bin = Vec::new();
        for (g, &count) in types[ti].iter().enumerate() {
            for _ in 0..count {
                let pseudo_idx = stacks[g].pop().expect("cover respects availability");
                bin.extend_from_slice(&pseudo[pseudo_idx].1);
            }
        }
        bins.push(bin);
    }
    Ok(bins)
}

/// All nonempty count vectors over the rounded sizes that fit in one bin and
/// do not exceed availability.
fn enumerate_types(sizes: &[f64], avail: &[u16]) -> Result<Vec<Vec<u16>>> {
    let mut out: Vec<Vec<u16>> = Vec::new();
    let mut cur = vec![0u16; sizes.len()];
    fn rec(
        idx: usize,
        used: f64,
        sizes: &[f64],
        avail: &[u16],
        cur: &mut Vec<u16>,
        out: &mut Vec<Vec<u16>>,
    ) -> Result<()> {
        if idx == sizes.len() {
            if cur.iter().any(|&c| c > 0) {
                if out.len() >= APTAS_MAX_TYPES {
                    return Err(Error::EnumerationTooLarge {
                        count: out.len() + 1,
                        cap: APTAS_MAX_TYPES,
                    });
                }
                out.push(cur.clone());
            }
            return Ok(());
        }
        let mut c = 0u16;
        loop {
            cur[idx] = c;
            rec(idx + 1, used + c as f64 * sizes[idx], sizes, avail, cur, out)?;
            c += 1;
            if c > avail[idx] || used + c as f64 * sizes[idx] > 1.0 + EPS_FIT {
                break;
            }
        }
        cur[idx] = 0;
        Ok(())
    }
    rec(0, 0.0, sizes, avail, &mut cur, &mut out)?;
    Ok(out)
}

/// Minimum-cost cover of the availability vector by bin types, memoized on
/// the remaining counts. Returns the multiset of chosen type indices.
fn cover(avail: &[u16], types: &[Vec<u16>], type_costs: &[f64]) -> Vec<usize> {
    let mut memo: BTreeMap<Vec<u16>, (f64, Option<usize>)> = BTreeMap::new();

    fn best(
        state: &Vec<u16>,
        types: &[Vec<u16>],
        type_costs: &[f64],
        memo: &mut BTreeMap<Vec<u16>, (f64, Option<usize>)>,
    ) -> f64 {
        if state.iter().all(|&c| c == 0) {
            return 0.0;
        }
        if let Some(&(cost, _)) = memo.get(state) {
            return cost;
        }
        let first = state.iter().position(|&c| c > 0).unwrap();
        let mut best_cost = f64::INFINITY;
        let mut best_type = None;
        for (ti, t) in types.iter().enumerate() {
            if t[first] == 0 || t.iter().zip(state).any(|(&need, &have)| need > have) {
                continue;
            }
            let sub: Vec<u16> = state.iter().zip(t).map(|(&have, &need)| have - need).collect();
            let total = type_costs[ti] + best(&sub, types, type_costs, memo);
            if total < best_cost - 1e-12 {
                best_cost = total;
                best_type = Some(ti);
            }
        }
        memo.insert(state.clone(), (best_cost, best_type));
        best_cost
    }

    let mut state: Vec<u16> = avail.to_vec();
    best(&state, types, type_costs, &mut memo);

    let mut chosen = Vec::new();
    while state.iter().any(|&c| c > 0) {
        let (_, Some(ti)) = memo[&state] else { break };
        chosen.push(ti);
        for (have, &need) in state.iter_mut().zip(&types[ti]) {
            *have -= need;
        }
        if state.iter().any(|&c| c > 0) {
            best(&state, types, type_costs, &mut memo);
        }
    }
    chosen
}

/// Builds the offline packing each lower-bound construction plays against,
/// for a generated adversarial instance.
pub fn scripted_opt(adv: &AdversaryInstance) -> Result<Packing> {
    let params = adv.params;
    let items = adv.instance.items();
    let green = params.green();

    let bins: Vec<Vec<usize>> = match &adv.family {
        Family::NextFitPairs { n, .. } => {
            let mut bins: Vec<Vec<usize>> = (0..*n).map(|i| vec![2 * i]).collect();
            bins.push((0..*n).map(|i| 2 * i + 1).collect());
            bins
        }
        Family::WorstFitPairs { n, .. } => {
            let mut bins: Vec<Vec<usize>> =
                (0..n / 2).map(|j| vec![4 * j, 4 * j + 2]).collect();
            bins.push((0..*n).map(|i| 2 * i + 1).collect());
            bins
        }
        Family::NextFitTauPairs { n, .. } => {
            let mut bins: Vec<Vec<usize>> = (0..*n).map(|i| vec![2 * i + 1]).collect();
            bins.push((0..*n).map(|i| 2 * i).collect());
            bins
        }
        Family::Aaf7142 { n, .. } | Family::Sylvester { n, .. } => {
            let phases = items.len() / n;
            (0..*n)
                .map(|i| (0..phases).map(|p| p * n + i).collect())
                .collect()
        }
        Family::Sand { .. } => {
            let target = scripted_fill_level(params);
            fill_to_level((0..items.len()).collect(), items, target)
        }
        Family::TafCase2 { f, e, .. } => {
            let mut bins = Vec::with_capacity(*f + 1);
            let mut sand = 0usize;
            for j in 0..*f {
                let mut bin = vec![e + j];
                let mut level = items[e + j];
                while sand < *e && level + items[sand] <= green + EPS_FIT {
                    level += items[sand];
                    bin.push(sand);
                    sand += 1;
                }
                bins.push(bin);
            }
            if sand < *e {
                bins.extend(fill_to_level((sand..*e).collect(), items, green));
            }
            bins
        }
        Family::NextFitTauMixed { .. } => {
            let mut bins = Vec::new();
            let mut rest: Vec<usize> = Vec::new();
            for (i, &size) in items.iter().enumerate() {
                if size >= green - 1e-12 {
                    bins.push(vec![i]);
                } else {
                    rest.push(i);
                }
            }
            rest.sort_by(|&a, &b| {
                items[b].partial_cmp(&items[a]).unwrap().then(a.cmp(&b))
            });
            bins.extend(fill_to_level(rest, items, green));
            bins
        }
        Family::GeneralLbLarge { n, stage, .. } => {
            let bg = params.beta_green();
            let per_bin_first = if bg <= 4.0 {
                3
            } else if bg <= 48.0 {
                2
            } else {
                6
            };
            match stage {
                0 => (0..n / per_bin_first)
                    .map(|j| (0..per_bin_first).map(|t| j * per_bin_first + t).collect())
                    .collect(),
                1 if bg > 48.0 => (0..n / 2)
                    .map(|j| vec![2 * j, 2 * j + 1, n + 2 * j, n + 2 * j + 1])
                    .collect(),
                1 => (0..*n).map(|i| vec![i, n + i]).collect(),
                2 => (0..*n).map(|i| vec![i, n + i, 2 * n + i]).collect(),
                _ => return Err(Error::InvalidFamily("unknown stage".into())),
            }
        }
    };
    Ok(Packing::from_bins(params, bins, &adv.instance))
}

fn scripted_fill_level(params: CostParams) -> f64 {
    match params.regime() {
        Regime::SmallBg => 1.0,
        Regime::LargeBg => params.green(),
    }
}

/// Sequentially fills bins with the given items up to a target level.
fn fill_to_level(indices: Vec<usize>, items: &[f64], target: f64) -> Vec<Vec<usize>> {
    let mut bins: Vec<Vec<usize>> = Vec::new();
    let mut level = f64::INFINITY;
    for i in indices {
        if level + items[i] > target + EPS_FIT {
            bins.push(Vec::new());
            level = 0.0;
        }
        bins.last_mut().unwrap().push(i);
        level += items[i];
    }
    bins
}

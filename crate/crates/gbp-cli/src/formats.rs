//! File formats: plain-text instances, packing JSON, benchmark files in the
//! BPPLIB layout, and the optional per-item decision log.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use gbp_core::algorithms::Decision;
use gbp_core::instance::{Instance, Packing};
use gbp_core::CostParams;

/// Parses the plain-text instance format: one decimal size per line, `#`
/// starts a comment, blank lines ignored.
pub fn parse_instance_text(text: &str) -> Result<Instance> {
    let mut items = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let size: f64 = line
            .parse()
            .with_context(|| format!("line {}: not a number: {line:?}", lineno + 1))?;
        items.push(size);
    }
    Instance::new(items).map_err(|e| anyhow::anyhow!("invalid instance: {e}"))
}

/// Writes the plain-text instance format. Sizes round-trip exactly.
pub fn write_instance_text(instance: &Instance) -> String {
    let mut out = String::new();
    if let Some(source) = instance.source() {
        out.push_str(&format!("# {source}\n"));
    }
    for &size in instance.items() {
        out.push_str(&format!("{size}\n"));
    }
    out
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance_text(&text)
}

#[derive(Serialize, Deserialize)]
struct PackingJson {
    params: ParamsJson,
    bins: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ParamsJson {
    beta: f64,
    green: f64,
}

/// Packing as JSON: `{"params": {"beta", "green"}, "bins": [[item, ...], ...]}`.
pub fn packing_to_json(packing: &Packing) -> String {
    let doc = PackingJson {
        params: ParamsJson {
            beta: packing.params().beta(),
            green: packing.params().green(),
        },
        bins: packing
            .bins()
            .iter()
            .map(|b| b.items().to_vec())
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("packing serializes")
}

/// Reads a packing JSON back as parameters plus bin contents; the instance
/// is needed separately to recover levels.
pub fn packing_from_json(text: &str, instance: &Instance) -> Result<Packing> {
    let doc: PackingJson = serde_json::from_str(text).context("parsing packing JSON")?;
    let params = CostParams::new(doc.params.beta, doc.params.green)
        .map_err(|e| anyhow::anyhow!("invalid params: {e}"))?;
    Ok(Packing::from_bins(params, doc.bins, instance))
}

/// Parses the BPPLIB text layout: item count, integer bin capacity, then one
/// integer weight per line. Sizes are weights normalized by the capacity.
pub fn parse_bpplib(text: &str) -> Result<Instance> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let n: usize = lines
        .next()
        .context("missing item count")?
        .parse()
        .context("item count")?;
    let capacity: u64 = lines
        .next()
        .context("missing capacity")?
        .parse()
        .context("capacity")?;
    if capacity == 0 {
        bail!("capacity must be positive");
    }
    let mut items = Vec::with_capacity(n);
    for line in lines {
        let weight: i64 = line.parse().with_context(|| format!("weight {line:?}"))?;
        if weight <= 0 {
            bail!("non-positive weight {weight}");
        }
        if weight as u64 > capacity {
            bail!("weight {weight} exceeds capacity {capacity}");
        }
        items.push(weight as f64 / capacity as f64);
    }
    if items.len() != n {
        bail!("header says {n} items, file lists {}", items.len());
    }
    Instance::new(items).map_err(|e| anyhow::anyhow!("invalid instance: {e}"))
}

pub fn read_bpplib(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_bpplib(&text)?.with_source(path.display().to_string()))
}

/// Decision log as CSV with the columns
/// `step,item_size,chosen_bin,opened_new,level_after`.
pub fn decision_log_csv(log: &[Decision]) -> String {
    let mut out = String::from("step,item_size,chosen_bin,opened_new,level_after\n");
    for d in log {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            d.step, d.item_size, d.chosen_bin, d.opened_new, d.level_after
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_text_round_trip() {
        let text = "# generated\n0.25\n0.5 # tail comment\n\n0.125\n";
        let inst = parse_instance_text(text).unwrap();
        assert_eq!(inst.items(), &[0.25, 0.5, 0.125]);
        let written = write_instance_text(&inst);
        let again = parse_instance_text(&written).unwrap();
        assert_eq!(again.items(), inst.items());
    }

    #[test]
    fn instance_text_rejects_bad_sizes() {
        assert!(parse_instance_text("1.5\n").is_err());
        assert!(parse_instance_text("zero\n").is_err());
        assert!(parse_instance_text("0\n").is_err());
    }

    #[test]
    fn bpplib_example() {
        let inst = parse_bpplib("5\n100\n30\n30\n20\n10\n10\n").unwrap();
        assert_eq!(inst.items(), &[0.3, 0.3, 0.2, 0.1, 0.1]);
    }

    #[test]
    fn bpplib_errors() {
        assert!(parse_bpplib("1\n100\n120\n").is_err()); // over capacity
        assert!(parse_bpplib("2\n100\n30\n").is_err()); // count mismatch
        assert!(parse_bpplib("1\n100\n-3\n").is_err()); // non-positive
        assert!(parse_bpplib("1\n0\n1\n").is_err()); // zero capacity
    }

    #[test]
    fn packing_json_round_trip() {
        use gbp_core::algorithms::{pack, AlgorithmKind, ThresholdPolicy};
        let inst = Instance::new(vec![0.6, 0.5, 0.5]).unwrap();
        let params = CostParams::new(1.0, 0.5).unwrap();
        let packing = pack(
            AlgorithmKind::NextFit,
            ThresholdPolicy::full_capacity(0.5),
            &inst,
            params,
        )
        .unwrap();
        let json = packing_to_json(&packing);
        assert!(json.contains("\"beta\": 1.0"));
        let back = packing_from_json(&json, &inst).unwrap();
        assert_eq!(back.num_bins(), packing.num_bins());
        assert!((back.cost() - packing.cost()).abs() < 1e-12);
    }

    #[test]
    fn decision_log_header() {
        let csv = decision_log_csv(&[]);
        assert_eq!(csv, "step,item_size,chosen_bin,opened_new,level_after\n");
    }
}

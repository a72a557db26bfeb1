//! Run records, long-form CSV output and per-group summaries.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::metrics::QualityReport;
use crate::{Error, Result, Weight};

/// One run of one algorithm on one instance. Serialized as the metrics JSON
/// object and as one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub edge_cut: Option<Weight>,
    pub cut_net: Option<Weight>,
    pub connectivity: Option<Weight>,
    pub imbalance: f64,
    pub comm_cost: Option<Weight>,
    pub runtime_ms: f64,
    pub algorithm: String,
    pub k: u32,
    pub epsilon: f64,
    pub seed: u64,
    /// Runtime without reading the input.
    pub core_ms: f64,
    pub balance_violation: bool,
    pub instance: String,
}

impl RunRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        report: &QualityReport,
        algorithm: &str,
        instance: &str,
        k: u32,
        epsilon: f64,
        seed: u64,
        runtime_ms: f64,
        core_ms: f64,
    ) -> Self {
        Self {
            edge_cut: report.edge_cut,
            cut_net: report.cut_net,
            connectivity: report.connectivity,
            imbalance: report.imbalance,
            comm_cost: report.comm_cost,
            runtime_ms,
            algorithm: algorithm.to_string(),
            k,
            epsilon,
            seed,
            core_ms,
            balance_violation: report.max_block_weight > report.l_max,
            instance: instance.to_string(),
        }
    }

    /// JSON object with an embedded `run_spec`.
    pub fn to_json(&self, run_spec: &impl Serialize) -> Result<serde_json::Value> {
        let mut v = serde_json::to_value(self)?;
        v["run_spec"] = serde_json::to_value(run_spec)?;
        Ok(v)
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

/// Means of one `(algorithm, k)` group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub k: u32,
    pub runs: usize,
    pub runtime_ms: f64,
    pub edge_cut: Option<f64>,
    pub cut_net: Option<f64>,
    pub connectivity: Option<f64>,
    pub comm_cost: Option<f64>,
    pub imbalance: f64,
}

/// Geometric mean, or the arithmetic mean when a value is zero.
pub fn mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::config("cannot average an empty group"));
    }
    if values.iter().any(|&v| v <= 0.0) {
        return Ok(values.iter().sum::<f64>() / values.len() as f64);
    }
    let log_sum: f64 = values.iter().map(|v| v.ln()).sum();
    Ok((log_sum / values.len() as f64).exp())
}

fn mean_of(rows: &[&RunRecord], f: impl Fn(&RunRecord) -> Option<Weight>) -> Result<Option<f64>> {
    let values: Vec<f64> = rows.iter().filter_map(|r| f(r)).map(|v| v as f64).collect();
    if values.is_empty() {
        return Ok(None);
    }
    mean(&values).map(Some)
}

/// Groups rows by `(algorithm, k)` and averages every metric.
pub fn bench_summary(rows: &[RunRecord]) -> Result<Vec<SummaryRow>> {
    if rows.is_empty() {
        return Err(Error::config("no rows to summarize"));
    }
    let mut groups: BTreeMap<(String, u32), Vec<&RunRecord>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.algorithm.clone(), r.k)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((algorithm, k), g)| {
            let runtimes: Vec<f64> = g.iter().map(|r| r.runtime_ms).collect();
            let imbalances: Vec<f64> = g.iter().map(|r| r.imbalance).collect();
            Ok(SummaryRow {
                runs: g.len(),
                runtime_ms: mean(&runtimes)?,
                edge_cut: mean_of(&g, |r| r.edge_cut)?,
                cut_net: mean_of(&g, |r| r.cut_net)?,
                connectivity: mean_of(&g, |r| r.connectivity)?,
                comm_cost: mean_of(&g, |r| r.comm_cost)?,
                imbalance: mean(&imbalances)?,
                algorithm,
                k,
            })
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

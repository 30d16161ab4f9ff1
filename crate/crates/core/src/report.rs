//! Metrics CSV rows, summaries, and the partition debug dump.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::PlanError;
use crate::partition::{region_endpoints, Partition, RegionGraph};
use crate::planner_core::PlanResult;
use crate::scalar::Scalar;

pub const CSV_HEADER: &str = "planner,seed,cell_size,n_regions,tree_size,iterations,collision_checks,time_ms,feasible_len,smoothed_len,status";

pub const STATUS_OK: &str = "ok";
pub const STATUS_NO_PATH: &str = "no_path";

/// Rounds to 6 significant digits.
pub fn sig6(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.5e}").parse().expect("formatted float parses")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub planner: String,
    pub seed: u64,
    pub cell_size: f64,
    pub n_regions: usize,
    pub tree_size: usize,
    pub iterations: usize,
    pub collision_checks: u64,
    pub time_ms: f64,
    pub feasible_len: Option<f64>,
    pub smoothed_len: Option<f64>,
    pub status: String,
}

impl MetricsRow {
    pub fn from_outcome<T: Scalar>(
        planner: &str,
        seed: u64,
        cell_size: T,
        outcome: Result<&PlanResult<T>, &PlanError>,
    ) -> Self {
        let cell_size = sig6(cell_size.as_f64());
        match outcome {
            Ok(r) => Self {
                planner: planner.to_string(),
                seed,
                cell_size,
                n_regions: r.n_regions,
                tree_size: r.tree_size,
                iterations: r.iterations,
                collision_checks: r.collision_checks,
                time_ms: sig6(r.elapsed.as_secs_f64() * 1e3),
                feasible_len: Some(sig6(r.feasible_length.as_f64())),
                smoothed_len: r.smoothed_length.map(|l| sig6(l.as_f64())),
                status: STATUS_OK.to_string(),
            },
            Err(_) => Self {
                planner: planner.to_string(),
                seed,
                cell_size,
                n_regions: 0,
                tree_size: 0,
                iterations: 0,
                collision_checks: 0,
                time_ms: 0.0,
                feasible_len: None,
                smoothed_len: None,
                status: STATUS_NO_PATH.to_string(),
            },
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[MetricsRow]) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    if rows.is_empty() {
        writer.write_record(CSV_HEADER.split(','))?;
    }
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<MetricsRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub median: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite metric"));
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
        };
        Some(Self { mean: values.iter().sum::<f64>() / n as f64, median })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlannerSummary {
    pub planner: String,
    pub runs: usize,
    pub solved: usize,
    pub tree_size: Option<Stat>,
    pub collision_checks: Option<Stat>,
    pub time_ms: Option<Stat>,
    pub feasible_len: Option<Stat>,
    pub smoothed_len: Option<Stat>,
}

/// Uniform over non-uniform, on medians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ratios {
    pub tree_size: f64,
    pub collision_checks: f64,
    pub time_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub planners: Vec<PlannerSummary>,
    pub ratios: Option<Ratios>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("no metrics rows to summarize")]
pub struct EmptyInput;

/// Per-planner statistics over solved runs, plus uniform/non-uniform ratios
/// when both planners are present.
pub fn summarize(rows: &[MetricsRow]) -> Result<Summary, EmptyInput> {
    if rows.is_empty() {
        return Err(EmptyInput);
    }
    let mut by_planner: BTreeMap<&str, Vec<&MetricsRow>> = BTreeMap::new();
    for row in rows {
        by_planner.entry(row.planner.as_str()).or_default().push(row);
    }
    let planners: Vec<PlannerSummary> = by_planner
        .into_iter()
        .map(|(planner, rows)| {
            let ok: Vec<_> = rows.iter().filter(|r| r.is_ok()).collect();
            let stat = |f: &dyn Fn(&MetricsRow) -> Option<f64>| {
                Stat::of(&ok.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
            };
            PlannerSummary {
                planner: planner.to_string(),
                runs: rows.len(),
                solved: ok.len(),
                tree_size: stat(&|r| Some(r.tree_size as f64)),
                collision_checks: stat(&|r| Some(r.collision_checks as f64)),
                time_ms: stat(&|r| Some(r.time_ms)),
                feasible_len: stat(&|r| r.feasible_len),
                smoothed_len: stat(&|r| r.smoothed_len),
            }
        })
        .collect();

    let find = |name: &str| planners.iter().find(|p| p.planner == name);
    let ratios = match (find("uniform"), find("nonuniform")) {
        (Some(u), Some(n)) => {
            let ratio = |a: Option<Stat>, b: Option<Stat>| match (a, b) {
                (Some(a), Some(b)) => a.median / b.median,
                _ => f64::NAN,
            };
            Some(Ratios {
                tree_size: ratio(u.tree_size, n.tree_size),
                collision_checks: ratio(u.collision_checks, n.collision_checks),
                time_ms: ratio(u.time_ms, n.time_ms),
            })
        }
        _ => None,
    };
    Ok(Summary { planners, ratios })
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = |s: Option<Stat>| match s {
            Some(s) => format!("{:.4} / {:.4}", s.mean, s.median),
            None => "-".to_string(),
        };
        writeln!(
            f,
            "{:<11} {:>6} {:>22} {:>22} {:>22} {:>22} {:>22}",
            "planner", "solved", "nodes mean/med", "checks mean/med", "time_ms mean/med",
            "feasible mean/med", "smoothed mean/med"
        )?;
        for p in &self.planners {
            writeln!(
                f,
                "{:<11} {:>6} {:>22} {:>22} {:>22} {:>22} {:>22}",
                p.planner,
                format!("{}/{}", p.solved, p.runs),
                cell(p.tree_size),
                cell(p.collision_checks),
                cell(p.time_ms),
                cell(p.feasible_len),
                cell(p.smoothed_len),
            )?;
        }
        if let Some(r) = &self.ratios {
            writeln!(f, "uniform / nonuniform (medians):")?;
            writeln!(f, "  nodes            {:.4}", r.tree_size)?;
            writeln!(f, "  collision checks {:.4}", r.collision_checks)?;
            writeln!(f, "  time             {:.4}", r.time_ms)?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct GroupDump {
    id: usize,
    i_range: [usize; 2],
    j_range: [usize; 2],
    min: [f64; 2],
    max: [f64; 2],
}

#[derive(Serialize)]
struct RegionDump {
    id: usize,
    groups: [usize; 2],
    segment: [[f64; 2]; 2],
}

#[derive(Serialize)]
struct PartitionDump {
    n: usize,
    cell_size: f64,
    groups: Vec<GroupDump>,
    regions: Vec<RegionDump>,
}

/// JSON document with every group (cell ranges and meter-space rectangle) and
/// every region (incident groups and ordered segment endpoints).
pub fn partition_dump_json<T: Scalar>(partition: &Partition<T>, graph: &RegionGraph<T>) -> String {
    let xy = |p: crate::geometry::Point2<T>| [p.x.as_f64(), p.y.as_f64()];
    let dump = PartitionDump {
        n: partition.grid.n(),
        cell_size: partition.grid.cell_size().as_f64(),
        groups: partition
            .groups
            .iter()
            .map(|g| {
                let rect = g.rect(&partition.grid);
                GroupDump {
                    id: g.id,
                    i_range: [g.i_range.0, g.i_range.1],
                    j_range: [g.j_range.0, g.j_range.1],
                    min: xy(rect.min),
                    max: xy(rect.max),
                }
            })
            .collect(),
        regions: graph
            .regions
            .iter()
            .map(|r| {
                let (a, b) = region_endpoints(r);
                RegionDump { id: r.id, groups: [r.group_a, r.group_b], segment: [xy(a), xy(b)] }
            })
            .collect(),
    };
    serde_json::to_string_pretty(&dump).expect("dump serializes")
}

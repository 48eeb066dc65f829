//! Per-exponent welfare tables for solve, exact and verify runs.

use std::time::Instant;

use serde::Serialize;

use crate::allocator::{alg, AlgTrace, CONSTANTS};
use crate::error::Result;
use crate::instance::Instance;
use crate::means::{p_mean, Allocation, Exponent};
use crate::oracle::p_opt_brute_many;
use crate::swmax::{Guarantee, SwBackend};
use crate::EPS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    /// `alg >= OPT / 40 - EPS`.
    Pass,
    Fail,
    /// `OPT = 0`; there is nothing to approximate.
    Vacuous,
    /// No optimum was computed.
    Unchecked,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub p: Exponent,
    pub alg_welfare: Option<f64>,
    pub opt_welfare: Option<f64>,
    pub ratio: Option<f64>,
    pub status: RowStatus,
}

impl Row {
    pub fn judge(p: Exponent, alg_welfare: f64, opt_welfare: f64) -> Row {
        let (ratio, status) = if opt_welfare <= 0.0 {
            (None, RowStatus::Vacuous)
        } else {
            let pass = alg_welfare >= opt_welfare / CONSTANTS.approx_factor - EPS;
            (
                Some(alg_welfare / opt_welfare),
                if pass { RowStatus::Pass } else { RowStatus::Fail },
            )
        };
        Row {
            p,
            alg_welfare: Some(alg_welfare),
            opt_welfare: Some(opt_welfare),
            ratio,
            status,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub n: usize,
    pub m: usize,
    pub family: &'static str,
}

impl From<&Instance> for InstanceSummary {
    fn from(inst: &Instance) -> Self {
        InstanceSummary {
            n: inst.n,
            m: inst.num_goods(),
            family: inst.valuation.family_name(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub alg_ms: Option<f64>,
    pub exact_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub instance: InstanceSummary,
    pub sw_backend: Option<&'static str>,
    pub guarantee: Option<Guarantee>,
    pub allocation: Option<Allocation>,
    pub bundle_values: Option<Vec<f64>>,
    pub trace: Option<AlgTrace>,
    pub rows: Vec<Row>,
    pub timings: Timings,
    /// True unless some row failed.
    pub all_pass: bool,
}

impl Report {
    pub fn worst_ratio(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.ratio).reduce(f64::min)
    }
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn guarantee_of(backend: SwBackend) -> Guarantee {
    match backend {
        SwBackend::ExactBruteForce { .. } => Guarantee::Exact,
        SwBackend::GreedyDemand => Guarantee::Heuristic,
    }
}

/// Runs the allocator and tabulates its p-mean welfare.
pub fn solve_report(inst: &Instance, ps: &[Exponent], backend: SwBackend) -> Result<Report> {
    let start = Instant::now();
    let (alloc, trace) = alg(inst, backend)?;
    let alg_ms = ms_since(start);
    let values = alloc.bundle_values(&inst.valuation);
    let rows = ps
        .iter()
        .map(|&p| {
            Ok(Row {
                p,
                alg_welfare: Some(p_mean(&values, p)?),
                opt_welfare: None,
                ratio: None,
                status: RowStatus::Unchecked,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Report {
        command: "solve",
        instance: inst.into(),
        sw_backend: Some(backend.name()),
        guarantee: Some(guarantee_of(backend)),
        allocation: Some(alloc),
        bundle_values: Some(values),
        trace: Some(trace),
        rows,
        timings: Timings {
            alg_ms: Some(alg_ms),
            exact_ms: None,
        },
        all_pass: true,
    })
}

/// Brute-force optima only.
pub fn exact_report(inst: &Instance, ps: &[Exponent], budget: u64) -> Result<Report> {
    let start = Instant::now();
    let opts = p_opt_brute_many(inst, ps, budget)?;
    let exact_ms = ms_since(start);
    let rows = opts
        .iter()
        .map(|o| Row {
            p: o.p,
            alg_welfare: None,
            opt_welfare: Some(o.welfare),
            ratio: None,
            status: RowStatus::Unchecked,
        })
        .collect();
    Ok(Report {
        command: "exact",
        instance: inst.into(),
        sw_backend: None,
        guarantee: None,
        allocation: None,
        bundle_values: None,
        trace: None,
        rows,
        timings: Timings {
            alg_ms: None,
            exact_ms: Some(exact_ms),
        },
        all_pass: true,
    })
}

/// Runs the allocator and the brute-force optimum for every exponent and
/// checks the `1/40` ratio on each row.
pub fn verify_report(inst: &Instance, ps: &[Exponent], backend: SwBackend, budget: u64) -> Result<Report> {
    let mut report = solve_report(inst, ps, backend)?;
    let start = Instant::now();
    let opts = p_opt_brute_many(inst, ps, budget)?;
    report.timings.exact_ms = Some(ms_since(start));
    report.command = "verify";
    report.rows = report
        .rows
        .iter()
        .zip(&opts)
        .map(|(row, opt)| Row::judge(row.p, row.alg_welfare.expect("solve fills it"), opt.welfare))
        .collect();
    report.all_pass = report.rows.iter().all(|r| r.status != RowStatus::Fail);
    Ok(report)
}

//! End-to-end solving: reduce fair instances to unit-group supplier form,
//! try colorings, run the fixed-radius search per coloring, map centers
//! back, filter by feasibility, and keep the best survivor.

use crate::error::Error;
use crate::instances::{
    cost_with_outliers, ColorfulInstance, FairKCenterInstance, FairRangeInstance,
    FairSupplierInstance, FeasibilityReport, FeasibilityViolation, Instance, Solution,
};
use crate::metric::{candidate_radii, Metric, PointId};
use crate::reductions::{
    color_code_with, enumerate_colorings, fair_range_to_unit_supplier, fair_to_unit_supplier,
    BackMap, Coloring, ColoringSource,
};
use crate::solver::{solve_colorful_with_radii, RadiusMode, SolveLimits, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Exhaustive coloring enumeration is used when `k^l` is at most this.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Resamples per trial before giving up on hitting a surjective coloring.
const MAX_RESAMPLES_PER_TRIAL: u32 = 64;

/// Default random trial count: with success probability at least `k!/k^k`
/// per trial, `e^k ln 100` trials miss a good coloring with probability
/// about 1%.
pub fn default_trials(k: usize) -> u64 {
    ((k as f64).exp() * 100f64.ln()).ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColoringMode {
    /// Exhaustive when `k^l` fits under the cap, random otherwise.
    #[default]
    Auto,
    Exhaustive,
    Random {
        trials: u64,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub coloring: ColoringMode,
    /// Master seed for random coloring mode.
    pub seed: u64,
    pub enumeration_cap: u64,
    pub limits: SolveLimits,
    pub radius: RadiusMode,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            coloring: ColoringMode::Auto,
            seed: 0,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            limits: SolveLimits::default(),
            radius: RadiusMode::Scan,
        }
    }
}

/// Aggregate counters for one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PipelineStats {
    /// "exhaustive", "random", or "direct".
    pub mode: String,
    /// Colorings whose search ran to completion or budget.
    pub colorings_tried: u64,
    /// Colorings skipped or resampled because some class came up empty.
    pub empty_class_skipped: u64,
    /// Mapped-back candidates rejected for having fewer than k centers.
    pub rejected_size: u64,
    /// Mapped-back candidates rejected for violating a group lower bound.
    pub rejected_lower: u64,
    /// Mapped-back candidates rejected for any other feasibility reason.
    pub rejected_other: u64,
    /// Searches that hit the node budget.
    pub resource_failures: u64,
    /// Total committed search nodes across all colorings and radii.
    pub nodes: u64,
    /// Coloring assignment that produced the returned solution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_coloring: Option<Vec<usize>>,
}

impl fmt::Display for PipelineStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mode={} tried={} empty_skipped={} rejected(size/lower/other)={}/{}/{} \
             resource_failures={} nodes={}",
            self.mode,
            self.colorings_tried,
            self.empty_class_skipped,
            self.rejected_size,
            self.rejected_lower,
            self.rejected_other,
            self.resource_failures,
            self.nodes
        )
    }
}

#[derive(Debug)]
pub struct PipelineResult {
    pub solution: Solution,
    pub stats: PipelineStats,
}

/// The original problem a mapped-back candidate is scored against.
struct Original<'a> {
    metric: &'a Metric,
    clients: &'a [PointId],
    z: usize,
    feasible: Box<dyn Fn(&[PointId]) -> FeasibilityReport + 'a>,
}

pub fn solve_fair(
    inst: &FairKCenterInstance,
    opts: &PipelineOptions,
) -> Result<PipelineResult, Error> {
    let report = inst.validate();
    if !report.ok() {
        return Err(Error::InvalidInstance(report));
    }
    let red = fair_to_unit_supplier(inst);
    let original = Original {
        metric: &inst.metric,
        clients: &red.instance.clients,
        z: inst.z,
        feasible: Box::new(move |centers| inst.is_feasible(centers)),
    };
    run_colorings(&red.instance, Some(&red.back), &original, opts)
}

pub fn solve_fair_range(
    inst: &FairRangeInstance,
    opts: &PipelineOptions,
) -> Result<PipelineResult, Error> {
    let report = inst.validate();
    if !report.ok() {
        return Err(Error::InvalidInstance(report));
    }
    let red = fair_range_to_unit_supplier(inst);
    let original = Original {
        metric: &inst.metric,
        clients: &red.instance.clients,
        z: inst.z,
        feasible: Box::new(move |centers| inst.is_feasible(centers)),
    };
    run_colorings(&red.instance, Some(&red.back), &original, opts)
}

pub fn solve_supplier(
    inst: &FairSupplierInstance,
    opts: &PipelineOptions,
) -> Result<PipelineResult, Error> {
    let report = inst.validate();
    if !report.ok() {
        return Err(Error::InvalidInstance(report));
    }
    let original = Original {
        metric: &inst.metric,
        clients: &inst.clients,
        z: inst.z,
        feasible: Box::new(move |centers| inst.is_feasible(centers)),
    };
    run_colorings(inst, None, &original, opts)
}

/// Direct colorful input: a single fixed-radius scan, no colorings.
pub fn solve_pipeline_colorful(
    inst: &ColorfulInstance,
    opts: &PipelineOptions,
) -> Result<PipelineResult, Error> {
    let report = inst.validate();
    if !report.ok() {
        return Err(Error::InvalidInstance(report));
    }
    let solve_opts = SolveOptions { limits: opts.limits, radius: opts.radius };
    let facilities = inst.facilities();
    let radii = candidate_radii(&inst.metric, &facilities, &inst.clients);
    let mut stats = PipelineStats { mode: "direct".into(), ..Default::default() };
    match solve_colorful_with_radii(inst, &radii, &solve_opts) {
        Ok(rep) => {
            stats.colorings_tried = 1;
            stats.nodes = rep.nodes;
            stats.resource_failures = rep.budget_hits;
            let mut solution = rep.solution;
            if let Some(trace) = &mut solution.trace {
                trace.pipeline = Some(stats.clone());
            }
            Ok(PipelineResult { solution, stats })
        }
        Err(Error::NodeBudget { .. }) => {
            stats.colorings_tried = 1;
            stats.resource_failures = 1;
            Err(Error::Resource(Box::new(stats)))
        }
        Err(e) => Err(e),
    }
}

/// Dispatch by instance kind.
pub fn solve_instance(inst: &Instance, opts: &PipelineOptions) -> Result<PipelineResult, Error> {
    match inst {
        Instance::FairKCenter(i) => solve_fair(i, opts),
        Instance::FairRange(i) => solve_fair_range(i, opts),
        Instance::FairSupplier(i) => solve_supplier(i, opts),
        Instance::Colorful(i) => solve_pipeline_colorful(i, opts),
    }
}

fn classify_rejection(report: &FeasibilityReport, stats: &mut PipelineStats) {
    let lower = report
        .violations
        .iter()
        .any(|v| matches!(v, FeasibilityViolation::GroupUnderLower { .. }));
    let size = report
        .violations
        .iter()
        .any(|v| matches!(v, FeasibilityViolation::NotExactlyK { .. }));
    if size {
        stats.rejected_size += 1;
    } else if lower {
        stats.rejected_lower += 1;
    } else {
        stats.rejected_other += 1;
    }
}

fn run_colorings(
    supplier: &FairSupplierInstance,
    back: Option<&BackMap>,
    original: &Original<'_>,
    opts: &PipelineOptions,
) -> Result<PipelineResult, Error> {
    let k = supplier.k;
    let l = supplier.groups.len();
    // Same facility and client sets for every coloring, so the candidate
    // radii are shared.
    let radii = candidate_radii(&supplier.metric, &supplier.facilities, &supplier.clients);
    let solve_opts = SolveOptions { limits: opts.limits, radius: opts.radius };

    let exhaustive = match opts.coloring {
        ColoringMode::Exhaustive => true,
        ColoringMode::Random { .. } => false,
        ColoringMode::Auto => {
            let size = (k as u128).checked_pow(l as u32);
            size.is_some_and(|s| s <= opts.enumeration_cap as u128)
        }
    };

    let mut stats = PipelineStats {
        mode: if exhaustive { "exhaustive" } else { "random" }.into(),
        ..Default::default()
    };
    let mut best: Option<Solution> = None;

    let process = |coloring: Coloring,
                       inst: &ColorfulInstance,
                       stats: &mut PipelineStats,
                       best: &mut Option<Solution>|
     -> Result<bool, Error> {
        match solve_colorful_with_radii(inst, &radii, &solve_opts) {
            Ok(rep) => {
                stats.colorings_tried += 1;
                stats.nodes += rep.nodes;
                stats.resource_failures += rep.budget_hits;
                let centers = match back {
                    Some(b) => b.map_back_centers(&rep.solution.centers),
                    None => rep.solution.centers.clone(),
                };
                let feas = (original.feasible)(&centers);
                if !feas.ok() {
                    classify_rejection(&feas, stats);
                    return Ok(false);
                }
                let (cost, outliers) =
                    cost_with_outliers(original.metric, original.clients, &centers, original.z);
                let better = match best {
                    None => true,
                    Some(b) => {
                        cost < b.cost || (cost == b.cost && centers < b.centers)
                    }
                };
                if better {
                    let mut trace = rep.solution.trace.clone();
                    if let Some(t) = &mut trace {
                        t.coloring = Some(coloring.clone());
                    }
                    stats.best_coloring = Some(coloring.assignment.clone());
                    let done = cost == 0.0;
                    *best = Some(Solution { cost, centers, outliers, trace });
                    return Ok(done);
                }
                Ok(false)
            }
            Err(Error::NodeBudget { .. }) => {
                stats.colorings_tried += 1;
                stats.resource_failures += 1;
                Ok(false)
            }
            Err(e) => Err(e),
        }
    };

    if exhaustive {
        let iter = enumerate_colorings(supplier, opts.enumeration_cap)?;
        // The enumeration call succeeded, so k^l fits under the cap.
        let total = (k as u128).pow(l as u32);
        let mut surjective = 0u128;
        let mut scanned = total;
        for (coloring, inst) in iter {
            let index = match coloring.source {
                ColoringSource::Enumerated { index } => index,
                _ => unreachable!("enumeration tags its colorings"),
            };
            surjective += 1;
            if process(coloring, &inst, &mut stats, &mut best)? {
                scanned = index as u128 + 1;
                break;
            }
        }
        stats.empty_class_skipped = (scanned - surjective).min(u64::MAX as u128) as u64;
    } else {
        let trials = match opts.coloring {
            ColoringMode::Random { trials } => trials,
            _ => default_trials(k),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        'trials: for trial in 0..trials {
            let mut produced = None;
            for _ in 0..MAX_RESAMPLES_PER_TRIAL {
                let seed: u64 = rng.gen();
                match color_code_with(supplier, seed, trial) {
                    (coloring, Some(inst)) => {
                        produced = Some((coloring, inst));
                        break;
                    }
                    (_, None) => stats.empty_class_skipped += 1,
                }
            }
            let Some((coloring, inst)) = produced else {
                continue 'trials;
            };
            if process(coloring, &inst, &mut stats, &mut best)? {
                break;
            }
        }
    }

    match best {
        Some(mut solution) => {
            if let Some(trace) = &mut solution.trace {
                trace.pipeline = Some(stats.clone());
            }
            Ok(PipelineResult { solution, stats })
        }
        None if stats.resource_failures > 0 => Err(Error::Resource(Box::new(stats))),
        None => Err(Error::Infeasible(Box::new(stats))),
    }
}

//! Branching search for colorful k-supplier with outliers, plus the radius
//! scans and the coloring pipeline on top of it.
//!
//! For a fixed radius `r` the search maintains remaining clients `C'` and a
//! set of marked colors. One step picks an unmarked color `j`, greedily
//! carves up to `4k` disjoint radius-`r` balls around facilities of class
//! `j` ([`settle_balls`]), and then either commits one ball's center for
//! color `j` (easy pick) or, for some ball pair, commits a facility of any
//! unmarked class within `2r` of both ball centers (hard pick). Committing
//! removes the center's radius-`3r` ball from `C'`. A leaf with all colors
//! marked succeeds when at most `z` clients remain. If `r` is at least the
//! optimal radius, some branch succeeds, so scanning candidate radii
//! ascending gives a 3-approximation.

mod instrument;
mod pipeline;

pub use instrument::{
    check_trichotomy, densest_unmarked, guided_walk, BallFlags, CaseReport, InstrumentError,
    TrichotomyCase, WalkIteration, WalkOutcome,
};
pub use pipeline::{
    default_trials, solve_fair, solve_fair_range, solve_instance, solve_pipeline_colorful,
    solve_supplier, ColoringMode, PipelineOptions, PipelineResult, PipelineStats,
    DEFAULT_ENUMERATION_CAP,
};

use crate::error::Error;
use crate::instances::{cost_with_outliers, ColorfulInstance, Solution};
use crate::metric::{candidate_radii, PointId};
use crate::reductions::Coloring;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Hard resource limits for one fixed-radius search.
///
/// `branch_solve` reports exhaustion as an error. The radius drivers instead
/// treat an exhausted probe as a failure at that radius and move on, so a
/// tight budget trades the guarantee down to 3x the smallest radius the
/// budget could certify. The default is large enough that this never
/// triggers in practice.
#[derive(Debug, Clone, Copy)]
pub struct SolveLimits {
    /// Maximum committed branching decisions per radius.
    pub max_nodes: u64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { max_nodes: 100_000_000 }
    }
}

/// How [`solve_colorful`] walks the candidate radii.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiusMode {
    /// Ascending linear scan; first success wins. The default.
    #[default]
    Scan,
    /// Bisection on the success boundary. Success is not proven monotone in
    /// the radius, but any boundary found is at most the optimal radius, so
    /// the 3-approximation survives; the scan may just return a coarser
    /// solution than linear scanning.
    Binary,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub limits: SolveLimits,
    pub radius: RadiusMode,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { limits: SolveLimits::default(), radius: RadiusMode::Scan }
    }
}

/// One greedily carved ball: its facility center, the class it was carved
/// for, and the clients it covered at carving time (empty balls are
/// recorded too).
#[derive(Debug, Clone, PartialEq)]
pub struct BallRecord {
    pub center: PointId,
    pub color: usize,
    pub covered: Vec<PointId>,
}

/// Snapshot of the search state, used by the test instrumentation.
#[derive(Debug, Clone)]
pub struct SolverState {
    /// Remaining clients `C'`, ascending.
    pub remaining: Vec<PointId>,
    pub marked: Vec<bool>,
    pub committed: Vec<Option<PointId>>,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionKind {
    Easy,
    Hard,
}

/// One committed decision on the successful branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Class the balls were carved for.
    pub build_color: usize,
    pub decision: DecisionKind,
    pub ball_centers: Vec<PointId>,
    /// Committed facility.
    pub committed: PointId,
    /// Color the commitment marked (equals `build_color` for easy picks).
    pub marked: usize,
    /// Clients newly removed by the committed `3r` ball.
    pub covered_new: usize,
}

/// Reproducible record of how a solution was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Coloring>,
    pub iterations: Vec<IterationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineStats>,
}

/// Result of one fixed-radius search.
#[derive(Debug)]
pub struct BranchOutcome {
    pub solution: Option<Solution>,
    /// Committed decisions explored (counts every child state entered).
    pub nodes: u64,
}

/// Result of a full radius scan.
#[derive(Debug)]
pub struct ColorfulReport {
    pub solution: Solution,
    pub radius: f64,
    pub nodes: u64,
    /// Fixed-radius searches actually run.
    pub probes: u64,
    /// Probes abandoned because they exhausted the node budget. Each such
    /// radius counts as failing, so the reported radius is the smallest one
    /// the budget could certify. Always zero under the default limits.
    pub budget_hits: u64,
}

/// Greedy ball carving for one class: repeatedly take the facility of class
/// `color` whose radius-`r` ball covers the most still-uncovered remaining
/// clients (ties: smallest facility id), record the ball, and retire the
/// facility; stops after `4k` balls or when the class is exhausted.
pub fn settle_balls(inst: &ColorfulInstance, state: &SolverState, color: usize) -> Vec<BallRecord> {
    let mut class = inst.classes[color].clone();
    class.sort_unstable();
    settle(inst, &class, &state.remaining, color, state.radius, 4 * inst.k)
}

fn settle(
    inst: &ColorfulInstance,
    class_sorted: &[PointId],
    remaining: &[PointId],
    color: usize,
    r: f64,
    cap: usize,
) -> Vec<BallRecord> {
    let m = &inst.metric;
    let mut avail = class_sorted.to_vec();
    let cand = remaining;
    let mut alive = vec![true; cand.len()];
    let mut out = Vec::new();
    while out.len() < cap && !avail.is_empty() {
        let mut best_i = 0;
        let mut best_n = usize::MAX;
        for (i, &f) in avail.iter().enumerate() {
            let n = cand
                .iter()
                .zip(&alive)
                .filter(|&(&c, &a)| a && m.dist(f, c) <= r)
                .count();
            if best_n == usize::MAX || n > best_n {
                best_i = i;
                best_n = n;
            }
        }
        let f = avail.remove(best_i);
        let mut covered = Vec::with_capacity(best_n);
        for (i, &c) in cand.iter().enumerate() {
            if alive[i] && m.dist(f, c) <= r {
                alive[i] = false;
                covered.push(c);
            }
        }
        out.push(BallRecord { center: f, color, covered });
    }
    out
}

struct Search<'a> {
    inst: &'a ColorfulInstance,
    classes: Vec<Vec<PointId>>,
    clients: Vec<PointId>,
    r: f64,
    r2: f64,
    r3: f64,
    max_nodes: u64,
    in_c: Vec<bool>,
    remaining: usize,
    marked: u32,
    committed: Vec<Option<PointId>>,
    iters: Vec<IterationRecord>,
    nodes: u64,
    memo: HashSet<Box<[u64]>>,
    memo_words: usize,
    best: Option<Solution>,
}

/// Failed-state memo stops growing beyond this; entries only ever prune.
const MEMO_CAP: usize = 1 << 20;

impl<'a> Search<'a> {
    fn new(inst: &'a ColorfulInstance, r: f64, limits: &SolveLimits) -> Self {
        assert!(inst.k >= 1 && inst.k <= 32, "supported color counts are 1..=32");
        let mut classes = inst.classes.clone();
        for c in &mut classes {
            c.sort_unstable();
        }
        let mut clients = inst.clients.clone();
        clients.sort_unstable();
        let n_ids = inst.metric.len();
        let mut in_c = vec![false; n_ids];
        for &c in &clients {
            in_c[c.idx()] = true;
        }
        Search {
            inst,
            classes,
            remaining: clients.len(),
            clients,
            r,
            r2: 2.0 * r,
            r3: 3.0 * r,
            max_nodes: limits.max_nodes,
            in_c,
            marked: 0,
            committed: vec![None; inst.k],
            iters: Vec::new(),
            nodes: 0,
            memo: HashSet::new(),
            memo_words: n_ids.div_ceil(64),
            best: None,
        }
    }

    fn unmarked(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.inst.k).filter(move |&c| self.marked & (1 << c) == 0)
    }

    /// `|ball(f, 3r, C')|` for every facility, shared by the coverage bound
    /// and the hard-pick selection at this node.
    fn cover3(&self) -> Vec<u32> {
        let m = &self.inst.metric;
        let mut out = vec![0u32; self.inst.metric.len()];
        for class in &self.classes {
            for &f in class {
                let mut n = 0;
                for &c in &self.clients {
                    if self.in_c[c.idx()] && m.dist(f, c) <= self.r3 {
                        n += 1;
                    }
                }
                out[f.idx()] = n;
            }
        }
        out
    }

    /// Admissible pruning bound: each future commitment comes from a
    /// distinct unmarked class and removes at most that class's best `3r`
    /// ball, so if those maxima cannot reach `|C'| - z` no leaf below can
    /// succeed.
    fn coverage_possible(&self, cover3: &[u32]) -> bool {
        let needed = self.remaining.saturating_sub(self.inst.z);
        if needed == 0 {
            return true;
        }
        let mut sum = 0usize;
        for j in self.unmarked() {
            let best = self.classes[j]
                .iter()
                .map(|f| cover3[f.idx()] as usize)
                .max()
                .unwrap_or(0);
            sum += best;
            if sum >= needed {
                return true;
            }
        }
        false
    }

    fn memo_key(&self) -> Box<[u64]> {
        let mut key = vec![0u64; self.memo_words + 1];
        key[0] = self.marked as u64;
        for (i, &inc) in self.in_c.iter().enumerate() {
            if inc {
                key[1 + i / 64] |= 1 << (i % 64);
            }
        }
        key.into_boxed_slice()
    }

    fn recurse(&mut self) -> Result<bool, Error> {
        let k = self.inst.k;
        if self.marked.count_ones() as usize == k {
            return Ok(self.try_leaf());
        }
        let key = self.memo_key();
        if self.memo.contains(&key) {
            return Ok(false);
        }
        let cover3 = self.cover3();
        if !self.coverage_possible(&cover3) {
            return Ok(false);
        }
        let unmarked: Vec<usize> = self.unmarked().collect();
        for &j in &unmarked {
            let balls = settle(
                self.inst,
                &self.classes[j],
                &self.current_remaining(),
                j,
                self.r,
                4 * k,
            );
            let ball_centers: Vec<PointId> = balls.iter().map(|b| b.center).collect();
            for b in &balls {
                if self.commit(j, j, b.center, DecisionKind::Easy, &ball_centers, None)? {
                    return Ok(true);
                }
            }
            for b1 in 0..balls.len() {
                for b2 in b1 + 1..balls.len() {
                    for &ell in &unmarked {
                        let Some(t) =
                            self.hard_pick(ell, balls[b1].center, balls[b2].center, &cover3)
                        else {
                            continue;
                        };
                        if self.commit(
                            j,
                            ell,
                            t,
                            DecisionKind::Hard,
                            &ball_centers,
                            Some((&balls[b1], &balls[b2])),
                        )? {
                            return Ok(true);
                        }
                    }
                }
            }
        }
        if self.memo.len() < MEMO_CAP {
            self.memo.insert(key);
        }
        Ok(false)
    }

    /// Best hard-pick candidate in class `ell`: within `2r` of both ball
    /// centers, maximizing fresh `3r` coverage, ties to the smallest id.
    fn hard_pick(&self, ell: usize, c1: PointId, c2: PointId, cover3: &[u32]) -> Option<PointId> {
        let m = &self.inst.metric;
        let mut best: Option<(u32, PointId)> = None;
        for &t in &self.classes[ell] {
            if m.dist(t, c1) <= self.r2 && m.dist(t, c2) <= self.r2 {
                let cov = cover3[t.idx()];
                if best.map_or(true, |(bc, _)| cov > bc) {
                    best = Some((cov, t));
                }
            }
        }
        best.map(|(_, t)| t)
    }

    fn current_remaining(&self) -> Vec<PointId> {
        self.clients
            .iter()
            .copied()
            .filter(|c| self.in_c[c.idx()])
            .collect()
    }

    fn commit(
        &mut self,
        build_color: usize,
        mark_color: usize,
        center: PointId,
        decision: DecisionKind,
        ball_centers: &[PointId],
        hard_geometry: Option<(&BallRecord, &BallRecord)>,
    ) -> Result<bool, Error> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::NodeBudget { budget: self.max_nodes, radius: self.r });
        }
        let m = &self.inst.metric;
        if let Some((a, b)) = hard_geometry {
            // Both picked balls lie inside the committed 3r ball: their
            // points are within r of their center, which is within 2r of
            // the committed facility.
            for p in a.covered.iter().chain(&b.covered) {
                assert!(
                    m.dist(center, *p) <= self.r3,
                    "hard pick must absorb both picked balls"
                );
            }
        }
        let removed: Vec<PointId> = self
            .clients
            .iter()
            .copied()
            .filter(|c| self.in_c[c.idx()] && m.dist(center, *c) <= self.r3)
            .collect();
        for &p in &removed {
            self.in_c[p.idx()] = false;
        }
        self.remaining -= removed.len();
        self.marked |= 1 << mark_color;
        self.committed[mark_color] = Some(center);
        self.iters.push(IterationRecord {
            build_color,
            decision,
            ball_centers: ball_centers.to_vec(),
            committed: center,
            marked: mark_color,
            covered_new: removed.len(),
        });
        let found = self.recurse()?;
        if found {
            return Ok(true);
        }
        self.iters.pop();
        self.committed[mark_color] = None;
        self.marked &= !(1 << mark_color);
        self.remaining += removed.len();
        for &p in &removed {
            self.in_c[p.idx()] = true;
        }
        Ok(false)
    }

    fn try_leaf(&mut self) -> bool {
        if self.remaining > self.inst.z {
            return false;
        }
        let mut centers: Vec<PointId> = self.committed.iter().map(|c| c.unwrap()).collect();
        // Coverage certificate, recomputed from scratch on the full client
        // set: the committed 3r balls reach all but at most z clients.
        debug_assert!(
            self.clients
                .iter()
                .filter(|&&c| centers
                    .iter()
                    .any(|&s| self.inst.metric.dist(s, c) <= self.r3))
                .count()
                >= self.clients.len().saturating_sub(self.inst.z),
            "committed balls must certify coverage"
        );
        centers.sort_unstable();
        let (cost, outliers) =
            cost_with_outliers(&self.inst.metric, &self.clients, &centers, self.inst.z);
        debug_assert!(cost <= self.r3, "achieved cost exceeds 3r");
        self.best = Some(Solution {
            cost,
            centers,
            outliers,
            trace: Some(SolveTrace {
                radius: self.r,
                coloring: None,
                iterations: self.iters.clone(),
                pipeline: None,
            }),
        });
        true
    }
}

/// Runs the branching search once at radius `r`. `r` should come from the
/// instance's candidate radii.
pub fn branch_solve(
    inst: &ColorfulInstance,
    r: f64,
    limits: &SolveLimits,
) -> Result<BranchOutcome, Error> {
    let mut search = Search::new(inst, r, limits);
    let found = search.recurse()?;
    Ok(BranchOutcome {
        solution: if found { search.best.take() } else { None },
        nodes: search.nodes,
    })
}

/// The root coverage bound, used to skip radii that the search would reject
/// immediately. Monotone in `r`.
fn root_bound_passes(inst: &ColorfulInstance, r: f64) -> bool {
    let needed = inst.clients.len().saturating_sub(inst.z);
    if needed == 0 {
        return true;
    }
    let r3 = 3.0 * r;
    let m = &inst.metric;
    let mut sum = 0usize;
    for class in &inst.classes {
        let best = class
            .iter()
            .map(|&f| inst.clients.iter().filter(|&&c| m.dist(f, c) <= r3).count())
            .max()
            .unwrap_or(0);
        sum += best;
        if sum >= needed {
            return true;
        }
    }
    false
}

/// Finds a feasible solution by scanning candidate radii. Scan mode returns
/// the first succeeding radius; the achieved cost is at most `3r`, and `r`
/// never exceeds the instance optimum, so the result is a 3-approximation.
/// Radii whose search exhausts the node budget count as failing; see
/// [`SolveLimits`].
pub fn solve_colorful(inst: &ColorfulInstance, opts: &SolveOptions) -> Result<ColorfulReport, Error> {
    let facilities = inst.facilities();
    let radii = candidate_radii(&inst.metric, &facilities, &inst.clients);
    solve_colorful_with_radii(inst, &radii, opts)
}

pub(crate) fn solve_colorful_with_radii(
    inst: &ColorfulInstance,
    radii: &[f64],
    opts: &SolveOptions,
) -> Result<ColorfulReport, Error> {
    match opts.radius {
        RadiusMode::Scan => scan_radii(inst, radii, &opts.limits),
        RadiusMode::Binary => bisect_radii(inst, radii, &opts.limits),
    }
}

fn scan_radii(
    inst: &ColorfulInstance,
    radii: &[f64],
    limits: &SolveLimits,
) -> Result<ColorfulReport, Error> {
    // Radii below the root coverage bound fail instantly inside
    // branch_solve; the bound is monotone in r, so bisect to the first
    // radius worth searching instead of stepping over them.
    let start = partition_point(radii.len(), |i| !root_bound_passes(inst, radii[i]));
    let mut nodes = 0;
    let mut probes = 0;
    let mut budget_hits = 0;
    for &r in &radii[start..] {
        probes += 1;
        match branch_solve(inst, r, limits) {
            Ok(out) => {
                nodes += out.nodes;
                if let Some(solution) = out.solution {
                    return Ok(ColorfulReport { solution, radius: r, nodes, probes, budget_hits });
                }
            }
            // A probe that exhausts its budget counts as a failed radius:
            // the scan keeps the 3r guarantee for the radius it certifies,
            // which is then the smallest the budget could afford.
            Err(Error::NodeBudget { .. }) => {
                nodes += limits.max_nodes;
                budget_hits += 1;
            }
            Err(e) => return Err(e),
        }
    }
    if budget_hits > 0 {
        return Err(Error::NodeBudget {
            budget: limits.max_nodes,
            radius: *radii.last().expect("scan ran at least one probe"),
        });
    }
    Err(Error::Internal(
        "no candidate radius admits a covering; instance should have been rejected by validation"
            .into(),
    ))
}

fn bisect_radii(
    inst: &ColorfulInstance,
    radii: &[f64],
    limits: &SolveLimits,
) -> Result<ColorfulReport, Error> {
    let mut nodes = 0;
    let mut probes = 0;
    let mut budget_hits = 0;
    let run = |i: usize,
               nodes: &mut u64,
               probes: &mut u64,
               budget_hits: &mut u64|
     -> Result<Option<Solution>, Error> {
        *probes += 1;
        match branch_solve(inst, radii[i], limits) {
            Ok(out) => {
                *nodes += out.nodes;
                Ok(out.solution)
            }
            // A probe that exhausts its budget counts as a failed radius;
            // the bisection then settles on the smallest radius the budget
            // could certify, and that radius keeps the 3r guarantee.
            Err(Error::NodeBudget { .. }) => {
                *nodes += limits.max_nodes;
                *budget_hits += 1;
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };
    let last = radii.len() - 1;
    let Some(mut best) = run(last, &mut nodes, &mut probes, &mut budget_hits)? else {
        if budget_hits > 0 {
            return Err(Error::NodeBudget { budget: limits.max_nodes, radius: radii[last] });
        }
        return Err(Error::Internal(
            "search failed at the maximum candidate radius".into(),
        ));
    };
    let mut hi = last;
    let mut lo: Option<usize> = None; // known-failing index
    while hi > lo.map_or(0, |l| l + 1) {
        let mid = (lo.map_or(0, |l| l + 1) + hi) / 2;
        match run(mid, &mut nodes, &mut probes, &mut budget_hits)? {
            Some(s) => {
                hi = mid;
                best = s;
            }
            None => lo = Some(mid),
        }
    }
    // Boundary is certified by construction: radii[hi] succeeded and, when
    // hi > 0, radii[hi - 1] failed as the final `lo` probe.
    Ok(ColorfulReport { solution: best, radius: radii[hi], nodes, probes, budget_hits })
}

fn partition_point(len: usize, mut pred: impl FnMut(usize) -> bool) -> usize {
    let mut lo = 0;
    let mut hi = len;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

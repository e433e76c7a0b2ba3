//! Test instrumentation for the branching search. Given an optimal
//! clustering from an oracle, these helpers replay the branch the analysis
//! says must exist and certify its invariants at every step.
//!
//! Terms, relative to a fixed optimal clustering at radius `r`:
//! * a ball carved for color `j` is *nearby* when its center is within
//!   `2r` of the optimal center of class `j`;
//! * it is *good* when it covers at least `|cluster_j ∩ C'|` points that
//!   lie outside every unmarked optimal cluster;
//! * it is *light* when at most half its points lie in unmarked optimal
//!   clusters.
//!
//! At every step of the guided walk, either some ball is nearby or good
//! (commit it for `j`), or two light balls sit within `2r` of a common
//! unmarked optimal center whose remaining cluster their union outweighs
//! (commit a hard pick for that color).

use crate::instances::ColorfulInstance;
use crate::metric::PointId;
use crate::oracle::OracleClustering;
use crate::solver::{settle_balls, BallRecord, SolverState};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstrumentError {
    #[error("no trichotomy case holds for the balls of color {build_color}")]
    Trichotomy { build_color: usize },
    #[error("charging failed at iteration {iteration}: removed {removed} of target {target}, potential {phi} over budget {z}")]
    Charge {
        iteration: usize,
        removed: usize,
        target: usize,
        phi: i64,
        z: usize,
    },
    #[error("walk left {remaining} clients uncovered, more than z = {z}")]
    Coverage { remaining: usize, z: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallFlags {
    pub nearby: bool,
    pub good: bool,
    pub light: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrichotomyCase {
    /// Ball index whose center is within `2r` of its class's optimal center.
    Nearby { ball: usize },
    /// Ball index covering enough points outside unmarked clusters.
    Good { ball: usize },
    /// Two light balls flanking the optimal center of unmarked color
    /// `target`.
    LightPair { b1: usize, b2: usize, target: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    pub build_color: usize,
    /// Per-ball flags, aligned with the carved balls.
    pub flags: Vec<BallFlags>,
    pub case: TrichotomyCase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkIteration {
    pub report: CaseReport,
    pub committed: PointId,
    pub marked_color: usize,
    /// Clients removed by the committed `3r` ball.
    pub removed: usize,
    /// `|cluster ∩ C'|` of the marked color at commit time.
    pub target: usize,
    pub cumulative_removed: usize,
    pub cumulative_target: usize,
    /// `|C'| - sum over unmarked colors of |cluster ∩ C'|` after the step;
    /// stays at most `z` on a correct walk.
    pub phi: i64,
    pub remaining_after: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkOutcome {
    pub iterations: Vec<WalkIteration>,
    pub covered: usize,
    pub required: usize,
}

/// The unmarked color with the most remaining optimal-cluster points,
/// ties to the smallest color. `remaining` must be sorted.
pub fn densest_unmarked(oc: &OracleClustering, remaining: &[PointId], marked: &[bool]) -> usize {
    let mut best: Option<(usize, usize)> = None;
    for (c, cluster) in oc.clusters.iter().enumerate() {
        if marked[c] {
            continue;
        }
        let size = cluster
            .iter()
            .filter(|p| remaining.binary_search(p).is_ok())
            .count();
        if best.map_or(true, |(bs, _)| size > bs) {
            best = Some((size, c));
        }
    }
    best.expect("at least one unmarked color").1
}

/// Certifies that the carved balls admit one of the three analysis cases.
/// `balls` must come from [`settle_balls`] on `state` for the densest
/// unmarked color, and `state.radius` must match `oc.radius`.
pub fn check_trichotomy(
    inst: &ColorfulInstance,
    state: &SolverState,
    balls: &[BallRecord],
    oc: &OracleClustering,
) -> Result<CaseReport, InstrumentError> {
    assert!(!balls.is_empty(), "settled balls of a nonempty class");
    let j = balls[0].color;
    assert!(balls.iter().all(|b| b.color == j), "balls of one color");
    assert!(!state.marked[j], "build color must be unmarked");
    let m = &inst.metric;
    let r = state.radius;
    let r2 = 2.0 * r;

    let in_rem = |p: &PointId| state.remaining.binary_search(p).is_ok();
    let mut unmarked_cluster_pts: Vec<PointId> = oc
        .clusters
        .iter()
        .enumerate()
        .filter(|(c, _)| !state.marked[*c])
        .flat_map(|(_, cl)| cl.iter().copied())
        .collect();
    unmarked_cluster_pts.sort_unstable();
    let is_free =
        |p: &PointId| in_rem(p) && unmarked_cluster_pts.binary_search(p).is_err();
    let cluster_remaining = |c: usize| {
        oc.clusters[c]
            .iter()
            .filter(|p| in_rem(p))
            .count()
    };
    let target = cluster_remaining(j);

    let flags: Vec<BallFlags> = balls
        .iter()
        .map(|b| {
            let in_unmarked = b
                .covered
                .iter()
                .filter(|p| unmarked_cluster_pts.binary_search(p).is_ok())
                .count();
            BallFlags {
                nearby: m.dist(b.center, oc.centers[j]) <= r2,
                good: b.covered.iter().filter(|p| is_free(p)).count() >= target,
                light: 2 * in_unmarked <= b.covered.len(),
            }
        })
        .collect();

    if let Some(i) = flags.iter().position(|f| f.nearby) {
        return Ok(CaseReport { build_color: j, flags, case: TrichotomyCase::Nearby { ball: i } });
    }
    if let Some(i) = flags.iter().position(|f| f.good) {
        return Ok(CaseReport { build_color: j, flags, case: TrichotomyCase::Good { ball: i } });
    }
    for b1 in 0..balls.len() {
        for b2 in b1 + 1..balls.len() {
            if !(flags[b1].light && flags[b2].light) {
                continue;
            }
            for ell in 0..inst.k {
                if state.marked[ell] {
                    continue;
                }
                if m.dist(balls[b1].center, oc.centers[ell]) > r2
                    || m.dist(balls[b2].center, oc.centers[ell]) > r2
                {
                    continue;
                }
                let mut union: Vec<PointId> = balls[b1]
                    .covered
                    .iter()
                    .chain(&balls[b2].covered)
                    .copied()
                    .collect();
                union.sort_unstable();
                union.dedup();
                let free_union = union.iter().filter(|p| is_free(p)).count();
                if free_union >= cluster_remaining(ell) {
                    return Ok(CaseReport {
                        build_color: j,
                        flags,
                        case: TrichotomyCase::LightPair { b1, b2, target: ell },
                    });
                }
            }
        }
    }
    Err(InstrumentError::Trichotomy { build_color: j })
}

/// Hard-pick rule, identical to the search's: the class-`ell` facility
/// within `2r` of both ball centers maximizing fresh `3r` coverage, ties to
/// the smallest id.
fn hard_pick(
    inst: &ColorfulInstance,
    remaining: &[PointId],
    ell: usize,
    c1: PointId,
    c2: PointId,
    r: f64,
) -> Option<PointId> {
    let m = &inst.metric;
    let mut class = inst.classes[ell].clone();
    class.sort_unstable();
    let mut best: Option<(usize, PointId)> = None;
    for &t in &class {
        if m.dist(t, c1) <= 2.0 * r && m.dist(t, c2) <= 2.0 * r {
            let cov = remaining.iter().filter(|&&c| m.dist(t, c) <= 3.0 * r).count();
            if best.map_or(true, |(bc, _)| cov > bc) {
                best = Some((cov, t));
            }
        }
    }
    best.map(|(_, t)| t)
}

/// Replays the branch the analysis guarantees at `r = oc.radius`: at each
/// step it settles balls for the densest unmarked color, certifies the
/// trichotomy, commits the dictated decision, and checks the charging
/// invariants. Fails with the first violated invariant.
pub fn guided_walk(
    inst: &ColorfulInstance,
    oc: &OracleClustering,
) -> Result<WalkOutcome, InstrumentError> {
    let k = inst.k;
    assert_eq!(oc.centers.len(), k, "oracle centers per class");
    for (c, &ctr) in oc.centers.iter().enumerate() {
        assert!(inst.classes[c].contains(&ctr), "oracle center from its class");
    }
    let m = &inst.metric;
    let r = oc.radius;
    let r3 = 3.0 * r;
    let mut remaining: Vec<PointId> = inst.clients.clone();
    remaining.sort_unstable();
    let n = remaining.len();
    let mut marked = vec![false; k];
    let mut committed = vec![None; k];
    let mut iterations = Vec::with_capacity(k);
    let mut cumulative_removed = 0usize;
    let mut cumulative_target = 0usize;

    for iteration in 0..k {
        let j = densest_unmarked(oc, &remaining, &marked);
        let state = SolverState {
            remaining: remaining.clone(),
            marked: marked.clone(),
            committed: committed.clone(),
            radius: r,
        };
        let balls = settle_balls(inst, &state, j);
        let report = check_trichotomy(inst, &state, &balls, oc)?;
        let (center, mark) = match report.case {
            TrichotomyCase::Nearby { ball } | TrichotomyCase::Good { ball } => {
                (balls[ball].center, j)
            }
            TrichotomyCase::LightPair { b1, b2, target } => {
                let t = hard_pick(inst, &remaining, target, balls[b1].center, balls[b2].center, r)
                    .expect("light pair case implies a hard pick candidate");
                (t, target)
            }
        };
        let target = oc.clusters[mark]
            .iter()
            .filter(|p| remaining.binary_search(p).is_ok())
            .count();
        let before = remaining.len();
        remaining.retain(|&c| m.dist(center, c) > r3);
        let removed = before - remaining.len();
        marked[mark] = true;
        committed[mark] = Some(center);
        cumulative_removed += removed;
        cumulative_target += target;
        let unmarked_pts: usize = oc
            .clusters
            .iter()
            .enumerate()
            .filter(|(c, _)| !marked[*c])
            .map(|(_, cl)| {
                cl.iter()
                    .filter(|p| remaining.binary_search(p).is_ok())
                    .count()
            })
            .sum();
        let phi = remaining.len() as i64 - unmarked_pts as i64;
        if removed < target || cumulative_removed < cumulative_target || phi > inst.z as i64 {
            return Err(InstrumentError::Charge {
                iteration,
                removed,
                target,
                phi,
                z: inst.z,
            });
        }
        iterations.push(WalkIteration {
            report,
            committed: center,
            marked_color: mark,
            removed,
            target,
            cumulative_removed,
            cumulative_target,
            phi,
            remaining_after: remaining.len(),
        });
    }

    if remaining.len() > inst.z {
        return Err(InstrumentError::Coverage { remaining: remaining.len(), z: inst.z });
    }
    Ok(WalkOutcome {
        iterations,
        covered: n - remaining.len(),
        required: n.saturating_sub(inst.z),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Metric;
    use crate::oracle::brute_force_colorful;
    use std::sync::Arc;

    fn ids(v: &[u32]) -> Vec<PointId> {
        v.iter().map(|&i| PointId(i)).collect()
    }

    fn line(points: &[f64]) -> Arc<Metric> {
        Arc::new(Metric::from_coords(points.iter().map(|&x| vec![x]).collect()))
    }

    fn two_pairs() -> ColorfulInstance {
        ColorfulInstance {
            metric: line(&[0.0, 1.0, 10.0, 11.0]),
            clients: ids(&[0, 1, 2, 3]),
            k: 2,
            z: 0,
            classes: vec![ids(&[0, 1]), ids(&[2, 3])],
        }
    }

    #[test]
    fn walk_follows_nearby_balls_on_two_pairs() {
        let inst = two_pairs();
        let oc = brute_force_colorful(&inst, 1_000_000).unwrap();
        assert_eq!(oc.radius, 1.0);
        assert_eq!(oc.centers, ids(&[0, 2]));
        let walk = guided_walk(&inst, &oc).unwrap();
        assert_eq!(walk.iterations.len(), 2);
        assert_eq!(walk.covered, 4);
        assert_eq!(walk.required, 4);
        for it in &walk.iterations {
            assert!(matches!(it.report.case, TrichotomyCase::Nearby { .. }));
            assert!(it.cumulative_removed >= it.cumulative_target);
            assert!(it.phi <= 0);
        }
        // Ties in cluster density resolve to the smallest color first.
        assert_eq!(walk.iterations[0].marked_color, 0);
        assert_eq!(walk.iterations[0].removed, 2);
    }

    #[test]
    fn flags_distinguish_nearby_good_light() {
        let inst = two_pairs();
        let oc = brute_force_colorful(&inst, 1_000_000).unwrap();
        // Mid-walk state: color 0 marked, pair at 10/11 remaining.
        let state = SolverState {
            remaining: ids(&[2, 3]),
            marked: vec![true, false],
            committed: vec![Some(PointId(0)), None],
            radius: oc.radius,
        };
        let balls = settle_balls(&inst, &state, 1);
        assert_eq!(balls[0].center, PointId(2));
        assert_eq!(balls[0].covered, ids(&[2, 3]));
        assert!(balls[1].covered.is_empty());
        let report = check_trichotomy(&inst, &state, &balls, &oc).unwrap();
        assert_eq!(report.case, TrichotomyCase::Nearby { ball: 0 });
        // Ball 0 holds the whole unmarked cluster: nearby, not good (its
        // points are all in the unmarked cluster), not light.
        assert_eq!(
            report.flags[0],
            BallFlags { nearby: true, good: false, light: false }
        );
        // The empty ball at 11 is still within 2r of the optimal center
        // and trivially light.
        assert_eq!(
            report.flags[1],
            BallFlags { nearby: true, good: false, light: true }
        );
    }

    #[test]
    fn walk_handles_outliers() {
        // One class; a far point is the planted outlier.
        let inst = ColorfulInstance {
            metric: line(&[0.0, 1.0, 2.0, 50.0]),
            clients: ids(&[0, 1, 2, 3]),
            k: 1,
            z: 1,
            classes: vec![ids(&[0, 1, 2, 3])],
        };
        let oc = brute_force_colorful(&inst, 1_000_000).unwrap();
        assert_eq!(oc.radius, 1.0);
        assert_eq!(oc.outliers, ids(&[3]));
        let walk = guided_walk(&inst, &oc).unwrap();
        assert_eq!(walk.covered, 3);
        assert_eq!(walk.required, 3);
        assert_eq!(walk.iterations[0].phi, 1); // the surviving outlier
    }
}

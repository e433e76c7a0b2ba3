//! Problem variants, their costs, feasibility checks and validation.
//!
//! All variants share one cost semantic: given chosen centers, the `z`
//! clients farthest from the center set are dropped (ties drop the larger
//! id first) and the cost is the largest remaining distance.

use crate::metric::{Metric, PointId};
use crate::solver::SolveTrace;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Pick at most `k` centers from `X`, at most `upper_bounds[i]` from group
/// `i`; groups partition `X`; every point is both client and facility.
#[derive(Debug, Clone)]
pub struct FairKCenterInstance {
    pub metric: Arc<Metric>,
    pub k: usize,
    pub z: usize,
    pub groups: Vec<Vec<PointId>>,
    pub upper_bounds: Vec<usize>,
}

/// Pick exactly `k` centers with `lower_bounds[i] <= |S ∩ G_i| <= upper_bounds[i]`.
#[derive(Debug, Clone)]
pub struct FairRangeInstance {
    pub metric: Arc<Metric>,
    pub k: usize,
    pub z: usize,
    pub groups: Vec<Vec<PointId>>,
    pub lower_bounds: Vec<usize>,
    pub upper_bounds: Vec<usize>,
}

/// Facilities and clients are separate roles; groups partition the
/// facilities and each group may host at most one chosen center.
#[derive(Debug, Clone)]
pub struct FairSupplierInstance {
    pub metric: Arc<Metric>,
    pub facilities: Vec<PointId>,
    pub clients: Vec<PointId>,
    pub k: usize,
    pub z: usize,
    pub groups: Vec<Vec<PointId>>,
}

/// Facilities are partitioned into exactly `k` color classes and a feasible
/// solution picks exactly one facility per class.
#[derive(Debug, Clone)]
pub struct ColorfulInstance {
    pub metric: Arc<Metric>,
    pub clients: Vec<PointId>,
    pub k: usize,
    pub z: usize,
    pub classes: Vec<Vec<PointId>>,
}

impl ColorfulInstance {
    /// All facilities, concatenated in class order.
    pub fn facilities(&self) -> Vec<PointId> {
        self.classes.iter().flatten().copied().collect()
    }
}

/// Any of the four problem variants, as loaded from JSON.
#[derive(Debug, Clone)]
pub enum Instance {
    FairKCenter(FairKCenterInstance),
    FairRange(FairRangeInstance),
    FairSupplier(FairSupplierInstance),
    Colorful(ColorfulInstance),
}

impl Instance {
    pub fn metric(&self) -> &Arc<Metric> {
        match self {
            Instance::FairKCenter(i) => &i.metric,
            Instance::FairRange(i) => &i.metric,
            Instance::FairSupplier(i) => &i.metric,
            Instance::Colorful(i) => &i.metric,
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Instance::FairKCenter(i) => i.k,
            Instance::FairRange(i) => i.k,
            Instance::FairSupplier(i) => i.k,
            Instance::Colorful(i) => i.k,
        }
    }

    pub fn z(&self) -> usize {
        match self {
            Instance::FairKCenter(i) => i.z,
            Instance::FairRange(i) => i.z,
            Instance::FairSupplier(i) => i.z,
            Instance::Colorful(i) => i.z,
        }
    }

    /// Clients of the variant (all points for the fair variants).
    pub fn clients(&self) -> Vec<PointId> {
        match self {
            Instance::FairKCenter(i) => all_points(&i.metric),
            Instance::FairRange(i) => all_points(&i.metric),
            Instance::FairSupplier(i) => i.clients.clone(),
            Instance::Colorful(i) => i.clients.clone(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self {
            Instance::FairKCenter(i) => i.validate(),
            Instance::FairRange(i) => i.validate(),
            Instance::FairSupplier(i) => i.validate(),
            Instance::Colorful(i) => i.validate(),
        }
    }

    pub fn is_feasible(&self, centers: &[PointId]) -> FeasibilityReport {
        match self {
            Instance::FairKCenter(i) => i.is_feasible(centers),
            Instance::FairRange(i) => i.is_feasible(centers),
            Instance::FairSupplier(i) => i.is_feasible(centers),
            Instance::Colorful(i) => i.is_feasible(centers),
        }
    }

    pub fn cost(&self, centers: &[PointId]) -> (f64, Vec<PointId>) {
        match self {
            Instance::FairKCenter(i) => i.cost(centers),
            Instance::FairRange(i) => i.cost(centers),
            Instance::FairSupplier(i) => i.cost(centers),
            Instance::Colorful(i) => i.cost(centers),
        }
    }
}

pub(crate) fn all_points(m: &Metric) -> Vec<PointId> {
    (0..m.len()).map(PointId::from).collect()
}

/// Cost of serving `clients` from `centers` with `z` outliers: the z
/// farthest clients are dropped (ties drop the larger id first) and the
/// largest remaining distance is returned together with the dropped ids
/// (ascending). All clients dropped means cost 0.
///
/// Panics on an empty center set.
pub fn cost_with_outliers(
    m: &Metric,
    clients: &[PointId],
    centers: &[PointId],
    z: usize,
) -> (f64, Vec<PointId>) {
    assert!(!centers.is_empty(), "cost needs a nonempty center set");
    let mut by_far: Vec<(f64, PointId)> = clients
        .iter()
        .map(|&c| (dist_to_set(m, c, centers), c))
        .collect();
    // Farthest first; equal distances order larger ids first so they are
    // dropped first.
    by_far.sort_unstable_by(|x, y| y.0.total_cmp(&x.0).then(y.1.cmp(&x.1)));
    let cut = z.min(by_far.len());
    let mut outliers: Vec<PointId> = by_far[..cut].iter().map(|e| e.1).collect();
    outliers.sort_unstable();
    let cost = by_far.get(cut).map_or(0.0, |e| e.0);
    (cost, outliers)
}

/// Cost only, without materializing the outlier set. Same semantics as
/// [`cost_with_outliers`].
pub fn cost_value(m: &Metric, clients: &[PointId], centers: &[PointId], z: usize) -> f64 {
    assert!(!centers.is_empty(), "cost needs a nonempty center set");
    if clients.len() <= z {
        return 0.0;
    }
    let mut dists: Vec<f64> = clients
        .iter()
        .map(|&c| dist_to_set(m, c, centers))
        .collect();
    let idx = dists.len() - 1 - z; // (z+1)-th largest
    let (_, v, _) = dists.select_nth_unstable_by(idx, f64::total_cmp);
    *v
}

#[inline]
pub fn dist_to_set(m: &Metric, p: PointId, centers: &[PointId]) -> f64 {
    centers
        .iter()
        .map(|&s| m.dist(p, s))
        .min_by(f64::total_cmp)
        .expect("nonempty center set")
}

impl FairKCenterInstance {
    pub fn all_points(&self) -> Vec<PointId> {
        all_points(&self.metric)
    }

    pub fn cost(&self, centers: &[PointId]) -> (f64, Vec<PointId>) {
        cost_with_outliers(&self.metric, &self.all_points(), centers, self.z)
    }

    pub fn is_feasible(&self, centers: &[PointId]) -> FeasibilityReport {
        let mut rep = FeasibilityReport::default();
        check_center_set(&mut rep, centers, self.metric.len());
        if centers.len() > self.k {
            rep.push(FeasibilityViolation::TooManyCenters { count: centers.len(), k: self.k });
        }
        check_group_bounds(&mut rep, centers, &self.groups, Some(&self.upper_bounds), None);
        rep
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        validate_common(&mut rep, self.k, self.metric.len());
        validate_partition(&mut rep, &self.groups, &all_points(&self.metric));
        if self.upper_bounds.len() != self.groups.len() {
            rep.violations.push(InstanceViolation::BoundArity {
                bounds: self.upper_bounds.len(),
                groups: self.groups.len(),
            });
        } else {
            let sum: usize = self.upper_bounds.iter().sum();
            if sum < self.k {
                rep.violations
                    .push(InstanceViolation::UpperBoundsBelowK { sum, k: self.k });
            }
        }
        if self.z >= self.metric.len() {
            rep.warnings.push(format!(
                "degenerate: z = {} covers all {} points, cost is trivially 0",
                self.z,
                self.metric.len()
            ));
        }
        rep
    }
}

impl FairRangeInstance {
    pub fn all_points(&self) -> Vec<PointId> {
        all_points(&self.metric)
    }

    pub fn cost(&self, centers: &[PointId]) -> (f64, Vec<PointId>) {
        cost_with_outliers(&self.metric, &self.all_points(), centers, self.z)
    }

    pub fn is_feasible(&self, centers: &[PointId]) -> FeasibilityReport {
        let mut rep = FeasibilityReport::default();
        check_center_set(&mut rep, centers, self.metric.len());
        if centers.len() != self.k {
            rep.push(FeasibilityViolation::NotExactlyK { count: centers.len(), k: self.k });
        }
        check_group_bounds(
            &mut rep,
            centers,
            &self.groups,
            Some(&self.upper_bounds),
            Some(&self.lower_bounds),
        );
        rep
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        validate_common(&mut rep, self.k, self.metric.len());
        validate_partition(&mut rep, &self.groups, &all_points(&self.metric));
        if self.upper_bounds.len() != self.groups.len() || self.lower_bounds.len() != self.groups.len() {
            rep.violations.push(InstanceViolation::BoundArity {
                bounds: self.upper_bounds.len().min(self.lower_bounds.len()),
                groups: self.groups.len(),
            });
            return rep;
        }
        for (g, (&lo, &hi)) in self.lower_bounds.iter().zip(&self.upper_bounds).enumerate() {
            if lo > hi {
                rep.violations
                    .push(InstanceViolation::LowerAboveUpper { group: g, lower: lo, upper: hi });
            }
        }
        let lo_sum: usize = self.lower_bounds.iter().sum();
        let hi_sum: usize = self.upper_bounds.iter().sum();
        if lo_sum > self.k {
            rep.violations
                .push(InstanceViolation::LowerBoundsAboveK { sum: lo_sum, k: self.k });
        }
        if hi_sum < self.k {
            rep.violations
                .push(InstanceViolation::UpperBoundsBelowK { sum: hi_sum, k: self.k });
        }
        if self.z >= self.metric.len() {
            rep.warnings.push(format!(
                "degenerate: z = {} covers all {} points",
                self.z,
                self.metric.len()
            ));
        }
        rep
    }
}

impl FairSupplierInstance {
    pub fn cost(&self, centers: &[PointId]) -> (f64, Vec<PointId>) {
        cost_with_outliers(&self.metric, &self.clients, centers, self.z)
    }

    pub fn is_feasible(&self, centers: &[PointId]) -> FeasibilityReport {
        let mut rep = FeasibilityReport::default();
        check_center_set(&mut rep, centers, self.metric.len());
        if centers.len() > self.k {
            rep.push(FeasibilityViolation::TooManyCenters { count: centers.len(), k: self.k });
        }
        let ones: Vec<usize> = vec![1; self.groups.len()];
        check_group_bounds(&mut rep, centers, &self.groups, Some(&ones), None);
        // Centers must be facilities at all.
        let mut is_fac = vec![false; self.metric.len()];
        for f in self.groups.iter().flatten() {
            is_fac[f.idx()] = true;
        }
        for &c in centers {
            if c.idx() < is_fac.len() && !is_fac[c.idx()] {
                rep.push(FeasibilityViolation::NotAFacility { id: c });
            }
        }
        rep
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        validate_common(&mut rep, self.k, self.metric.len());
        if self.clients.is_empty() {
            rep.violations.push(InstanceViolation::EmptyRole { role: "clients" });
        }
        for &c in &self.clients {
            if c.idx() >= self.metric.len() {
                rep.violations
                    .push(InstanceViolation::OutOfRange { id: c, n: self.metric.len() });
            }
        }
        validate_partition(&mut rep, &self.groups, &self.facilities);
        for (g, members) in self.groups.iter().enumerate() {
            if members.is_empty() {
                rep.violations.push(InstanceViolation::EmptyGroup { group: g });
            }
        }
        if self.groups.len() < self.k {
            rep.violations.push(InstanceViolation::TooFewGroups {
                groups: self.groups.len(),
                k: self.k,
            });
        }
        if self.z >= self.clients.len() {
            rep.warnings
                .push(format!("degenerate: z = {} covers all clients", self.z));
        }
        rep
    }
}

impl ColorfulInstance {
    pub fn cost(&self, centers: &[PointId]) -> (f64, Vec<PointId>) {
        cost_with_outliers(&self.metric, &self.clients, centers, self.z)
    }

    pub fn is_feasible(&self, centers: &[PointId]) -> FeasibilityReport {
        let mut rep = FeasibilityReport::default();
        check_center_set(&mut rep, centers, self.metric.len());
        for (c, class) in self.classes.iter().enumerate() {
            let count = centers.iter().filter(|s| class.contains(s)).count();
            if count != 1 {
                rep.push(FeasibilityViolation::NotOnePerClass { class: c, count });
            }
        }
        if centers.len() != self.k {
            rep.push(FeasibilityViolation::NotExactlyK { count: centers.len(), k: self.k });
        }
        rep
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        validate_common(&mut rep, self.k, self.metric.len());
        if self.clients.is_empty() {
            rep.violations.push(InstanceViolation::EmptyRole { role: "clients" });
        }
        for &c in &self.clients {
            if c.idx() >= self.metric.len() {
                rep.violations
                    .push(InstanceViolation::OutOfRange { id: c, n: self.metric.len() });
            }
        }
        if self.classes.len() != self.k {
            rep.violations.push(InstanceViolation::ClassArity {
                classes: self.classes.len(),
                k: self.k,
            });
        }
        let facilities = self.facilities();
        validate_partition(&mut rep, &self.classes, &facilities);
        for (c, class) in self.classes.iter().enumerate() {
            if class.is_empty() {
                rep.violations.push(InstanceViolation::EmptyClass { class: c });
            }
        }
        if self.z >= self.clients.len() {
            rep.warnings
                .push(format!("degenerate: z = {} covers all clients", self.z));
        }
        rep
    }
}

fn check_center_set(rep: &mut FeasibilityReport, centers: &[PointId], n: usize) {
    if centers.is_empty() {
        rep.push(FeasibilityViolation::Empty);
    }
    let mut seen = std::collections::BTreeSet::new();
    for &c in centers {
        if c.idx() >= n {
            rep.push(FeasibilityViolation::UnknownPoint { id: c });
        }
        if !seen.insert(c) {
            rep.push(FeasibilityViolation::Duplicate { id: c });
        }
    }
}

fn check_group_bounds(
    rep: &mut FeasibilityReport,
    centers: &[PointId],
    groups: &[Vec<PointId>],
    upper: Option<&[usize]>,
    lower: Option<&[usize]>,
) {
    for (g, members) in groups.iter().enumerate() {
        let count = centers.iter().filter(|c| members.contains(c)).count();
        if let Some(up) = upper {
            if g < up.len() && count > up[g] {
                rep.push(FeasibilityViolation::GroupOverUpper { group: g, count, bound: up[g] });
            }
        }
        if let Some(lo) = lower {
            if g < lo.len() && count < lo[g] {
                rep.push(FeasibilityViolation::GroupUnderLower { group: g, count, bound: lo[g] });
            }
        }
    }
}

fn validate_common(rep: &mut ValidationReport, k: usize, n: usize) {
    if k == 0 {
        rep.violations.push(InstanceViolation::ZeroK);
    }
    if n == 0 {
        rep.violations.push(InstanceViolation::EmptyRole { role: "points" });
    }
}

/// Every element of `universe` must appear in exactly one part.
fn validate_partition(rep: &mut ValidationReport, parts: &[Vec<PointId>], universe: &[PointId]) {
    use std::collections::BTreeMap;
    let mut count: BTreeMap<PointId, usize> = universe.iter().map(|&p| (p, 0)).collect();
    let n_limit = universe.iter().map(|p| p.idx() + 1).max().unwrap_or(0);
    for part in parts {
        for &p in part {
            match count.get_mut(&p) {
                Some(c) => *c += 1,
                None => rep
                    .violations
                    .push(InstanceViolation::OutOfRange { id: p, n: n_limit }),
            }
        }
    }
    for (p, c) in count {
        if c != 1 {
            rep.violations
                .push(InstanceViolation::NotAPartition { point: p, times: c });
        }
    }
}

/// One violated solution constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FeasibilityViolation {
    Empty,
    UnknownPoint { id: PointId },
    Duplicate { id: PointId },
    NotAFacility { id: PointId },
    TooManyCenters { count: usize, k: usize },
    NotExactlyK { count: usize, k: usize },
    GroupOverUpper { group: usize, count: usize, bound: usize },
    GroupUnderLower { group: usize, count: usize, bound: usize },
    NotOnePerClass { class: usize, count: usize },
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct FeasibilityReport {
    pub violations: Vec<FeasibilityViolation>,
}

impl FeasibilityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, v: FeasibilityViolation) {
        self.violations.push(v);
    }
}

/// One violated instance invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InstanceViolation {
    ZeroK,
    EmptyRole { role: &'static str },
    OutOfRange { id: PointId, n: usize },
    NotAPartition { point: PointId, times: usize },
    EmptyGroup { group: usize },
    EmptyClass { class: usize },
    BoundArity { bounds: usize, groups: usize },
    UpperBoundsBelowK { sum: usize, k: usize },
    LowerBoundsAboveK { sum: usize, k: usize },
    LowerAboveUpper { group: usize, lower: usize, upper: usize },
    TooFewGroups { groups: usize, k: usize },
    ClassArity { classes: usize, k: usize },
}

/// Violations reject the instance; warnings flag degenerate but accepted
/// parameter choices.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<InstanceViolation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  violation: {v:?}")?;
        }
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

/// A solved instance: chosen centers, dropped clients and the achieved cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub cost: f64,
    /// Ascending, no duplicates.
    pub centers: Vec<PointId>,
    /// Ascending.
    pub outliers: Vec<PointId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<SolveTrace>,
}

impl Solution {
    pub fn new(cost: f64, mut centers: Vec<PointId>, outliers: Vec<PointId>) -> Self {
        centers.sort_unstable();
        centers.dedup();
        Solution {
            cost,
            centers,
            outliers,
            trace: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> Arc<Metric> {
        Arc::new(Metric::from_coords(points.iter().map(|&x| vec![x]).collect()))
    }

    fn ids(v: &[u32]) -> Vec<PointId> {
        v.iter().map(|&i| PointId(i)).collect()
    }

    #[test]
    fn cost_line_no_outliers() {
        // Points 0,4,5,9; centers at 0 and 9: distances are 0,4,4,0.
        let m = line(&[0.0, 4.0, 5.0, 9.0]);
        let (cost, outliers) = cost_with_outliers(&m, &ids(&[0, 1, 2, 3]), &ids(&[0, 3]), 0);
        assert_eq!(cost, 4.0);
        assert!(outliers.is_empty());
    }

    #[test]
    fn cost_drops_farthest_with_tie_on_larger_id() {
        // Same line; distances 0,4,4,0: ids 1 and 2 tie at 4, so id 2 is
        // dropped first.
        let m = line(&[0.0, 4.0, 5.0, 9.0]);
        let (cost, outliers) = cost_with_outliers(&m, &ids(&[0, 1, 2, 3]), &ids(&[0, 3]), 1);
        assert_eq!(cost, 4.0);
        assert_eq!(outliers, ids(&[2]));
        let (cost, outliers) = cost_with_outliers(&m, &ids(&[0, 1, 2, 3]), &ids(&[0, 3]), 2);
        assert_eq!(cost, 0.0);
        assert_eq!(outliers, ids(&[1, 2]));
    }

    #[test]
    fn cost_single_center_line() {
        let m = line(&[0.0, 1.0, 2.0, 10.0]);
        let (cost, outliers) = cost_with_outliers(&m, &ids(&[0, 1, 2, 3]), &ids(&[0]), 1);
        assert_eq!(cost, 2.0);
        assert_eq!(outliers, ids(&[3]));
    }

    #[test]
    fn cost_all_outliers_is_zero() {
        let m = line(&[0.0, 5.0]);
        let (cost, outliers) = cost_with_outliers(&m, &ids(&[0, 1]), &ids(&[0]), 5);
        assert_eq!(cost, 0.0);
        assert_eq!(outliers, ids(&[0, 1]));
    }

    #[test]
    fn cost_value_matches_full() {
        let m = line(&[0.0, 1.0, 3.0, 7.0, 20.0]);
        let clients = ids(&[0, 1, 2, 3, 4]);
        for z in 0..6 {
            let full = cost_with_outliers(&m, &clients, &ids(&[1, 4]), z).0;
            let fast = cost_value(&m, &clients, &ids(&[1, 4]), z);
            assert_eq!(full, fast, "z={z}");
        }
    }

    #[test]
    #[should_panic(expected = "nonempty center set")]
    fn cost_empty_centers_panics() {
        let m = line(&[0.0, 1.0]);
        cost_with_outliers(&m, &ids(&[0, 1]), &[], 0);
    }

    fn small_fair() -> FairKCenterInstance {
        FairKCenterInstance {
            metric: line(&[0.0, 1.0, 9.0, 10.0]),
            k: 2,
            z: 0,
            groups: vec![ids(&[0, 1]), ids(&[2, 3])],
            upper_bounds: vec![1, 1],
        }
    }

    #[test]
    fn fair_feasibility() {
        let inst = small_fair();
        assert!(inst.is_feasible(&ids(&[0, 2])).ok());
        assert!(inst.is_feasible(&ids(&[0])).ok());
        let rep = inst.is_feasible(&ids(&[0, 1]));
        assert!(rep
            .violations
            .contains(&FeasibilityViolation::GroupOverUpper { group: 0, count: 2, bound: 1 }));
        let rep = inst.is_feasible(&ids(&[0, 1, 2]));
        assert!(rep
            .violations
            .contains(&FeasibilityViolation::TooManyCenters { count: 3, k: 2 }));
        let rep = inst.is_feasible(&ids(&[0, 0]));
        assert!(rep.violations.contains(&FeasibilityViolation::Duplicate { id: PointId(0) }));
    }

    #[test]
    fn fair_validation_catches_bad_bounds() {
        let mut inst = small_fair();
        inst.upper_bounds = vec![1, 0];
        let rep = inst.validate();
        assert!(rep
            .violations
            .contains(&InstanceViolation::UpperBoundsBelowK { sum: 1, k: 2 }));
        inst.upper_bounds = vec![1];
        assert!(inst
            .validate()
            .violations
            .contains(&InstanceViolation::BoundArity { bounds: 1, groups: 2 }));
    }

    #[test]
    fn fair_validation_catches_non_partition() {
        let mut inst = small_fair();
        inst.groups = vec![ids(&[0, 1]), ids(&[1, 2, 3])];
        let rep = inst.validate();
        assert!(rep
            .violations
            .contains(&InstanceViolation::NotAPartition { point: PointId(1), times: 2 }));
        inst.groups = vec![ids(&[0, 1]), ids(&[3])];
        let rep = inst.validate();
        assert!(rep
            .violations
            .contains(&InstanceViolation::NotAPartition { point: PointId(2), times: 0 }));
    }

    #[test]
    fn degenerate_z_is_warning_not_violation() {
        let mut inst = small_fair();
        inst.z = 10;
        let rep = inst.validate();
        assert!(rep.ok());
        assert!(!rep.warnings.is_empty());
    }

    #[test]
    fn range_feasibility_requires_exact_k_and_lower_bounds() {
        let inst = FairRangeInstance {
            metric: line(&[0.0, 1.0, 9.0, 10.0]),
            k: 2,
            z: 0,
            groups: vec![ids(&[0, 1]), ids(&[2, 3])],
            lower_bounds: vec![1, 0],
            upper_bounds: vec![2, 2],
        };
        assert!(inst.is_feasible(&ids(&[0, 1])).ok());
        assert!(inst.is_feasible(&ids(&[0, 2])).ok());
        let rep = inst.is_feasible(&ids(&[2, 3]));
        assert!(rep
            .violations
            .contains(&FeasibilityViolation::GroupUnderLower { group: 0, count: 0, bound: 1 }));
        let rep = inst.is_feasible(&ids(&[0]));
        assert!(rep
            .violations
            .contains(&FeasibilityViolation::NotExactlyK { count: 1, k: 2 }));
    }

    #[test]
    fn colorful_feasibility_one_per_class() {
        let inst = ColorfulInstance {
            metric: line(&[0.0, 1.0, 9.0, 10.0]),
            clients: ids(&[0, 1, 2, 3]),
            k: 2,
            z: 0,
            classes: vec![ids(&[0, 1]), ids(&[2, 3])],
        };
        assert!(inst.is_feasible(&ids(&[1, 2])).ok());
        let rep = inst.is_feasible(&ids(&[0, 1]));
        assert!(rep
            .violations
            .contains(&FeasibilityViolation::NotOnePerClass { class: 0, count: 2 }));
        assert!(inst.validate().ok());
        let bad = ColorfulInstance {
            classes: vec![ids(&[0, 1, 2, 3]), vec![]],
            ..inst
        };
        assert!(bad
            .validate()
            .violations
            .contains(&InstanceViolation::EmptyClass { class: 1 }));
    }

    #[test]
    fn supplier_validation() {
        let inst = FairSupplierInstance {
            metric: line(&[0.0, 1.0, 5.0, 6.0]),
            facilities: ids(&[2, 3]),
            clients: ids(&[0, 1]),
            k: 2,
            z: 0,
            groups: vec![ids(&[2]), ids(&[3])],
        };
        assert!(inst.validate().ok());
        assert!(inst.is_feasible(&ids(&[2, 3])).ok());
        let rep = inst.is_feasible(&ids(&[0, 2]));
        assert!(rep
            .violations
            .contains(&FeasibilityViolation::NotAFacility { id: PointId(0) }));
        let fewer = FairSupplierInstance { k: 3, ..inst };
        assert!(fewer
            .validate()
            .violations
            .contains(&InstanceViolation::TooFewGroups { groups: 2, k: 3 }));
    }

    #[test]
    fn solution_new_sorts_and_dedups() {
        let s = Solution::new(1.0, ids(&[3, 1, 3]), vec![]);
        assert_eq!(s.centers, ids(&[1, 3]));
    }
}

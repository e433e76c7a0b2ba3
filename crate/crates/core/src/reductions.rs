//! Exact reductions between the problem variants.
//!
//! Group quotas are compiled away by duplication: a group with upper bound
//! `b` becomes `b` unit groups, each holding one copy of every group member
//! at distance 0 from its origin. Color coding then collapses the unit
//! groups into `k` color classes so the branching solver only has to pick
//! one center per class. Both directions preserve costs exactly, value for
//! value.

use crate::instances::{
    all_points, ColorfulInstance, FairKCenterInstance, FairRangeInstance, FairSupplierInstance,
    Solution,
};
use crate::metric::{Metric, PointId};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Why a unit group exists: plain upper-bound copy, or (for range bounds)
/// a copy that exists to meet a lower bound vs. optional slack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupTag {
    Upper,
    Equality,
    Slack,
}

/// Provenance of one unit group in the reduced instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitGroupInfo {
    pub source_group: usize,
    pub copy: usize,
    pub tag: GroupTag,
}

/// Maps facility copies of the reduced instance back to their origins.
#[derive(Debug, Clone)]
pub struct BackMap {
    facility_base: u32,
    /// Indexed by `id - facility_base`: (origin, source group, copy index).
    origins: Vec<(PointId, usize, usize)>,
    /// Per source group, its member ids ascending.
    group_members: Vec<Vec<PointId>>,
    /// Per source group, first facility id of each copy's unit group.
    copy_starts: Vec<Vec<u32>>,
    pub unit_groups: Vec<UnitGroupInfo>,
}

impl BackMap {
    /// Origin of a facility copy. Panics if `copy` is not a copy id.
    pub fn origin(&self, copy: PointId) -> PointId {
        self.origins[(copy.0 - self.facility_base) as usize].0
    }

    /// Origins of `centers`, deduplicated and ascending.
    pub fn map_back_centers(&self, centers: &[PointId]) -> Vec<PointId> {
        let mut out: Vec<PointId> = centers.iter().map(|&c| self.origin(c)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The canonical image of a feasible original center set: within each
    /// source group, members are assigned to copy 0, 1, ... in ascending id
    /// order. The result picks at most one facility per unit group.
    pub fn image_of(&self, centers: &[PointId]) -> Vec<PointId> {
        let mut per_group: Vec<Vec<PointId>> = vec![Vec::new(); self.group_members.len()];
        for &c in centers {
            let g = self
                .group_members
                .iter()
                .position(|members| members.binary_search(&c).is_ok())
                .expect("center not in any group");
            per_group[g].push(c);
        }
        let mut out = Vec::with_capacity(centers.len());
        for (g, mut picked) in per_group.into_iter().enumerate() {
            picked.sort_unstable();
            for (copy, c) in picked.into_iter().enumerate() {
                assert!(
                    copy < self.copy_starts[g].len(),
                    "more centers in group {g} than its bound"
                );
                let rank = self.group_members[g].binary_search(&c).unwrap();
                out.push(PointId(self.copy_starts[g][copy] + rank as u32));
            }
        }
        out.sort_unstable();
        out
    }
}

/// A reduced unit-group supplier instance plus the map back.
#[derive(Debug, Clone)]
pub struct UnitSupplierReduction {
    pub instance: FairSupplierInstance,
    pub back: BackMap,
}

/// Duplicates each group `i` into `upper_bounds[i]` unit groups.
pub fn fair_to_unit_supplier(src: &FairKCenterInstance) -> UnitSupplierReduction {
    let plan: Vec<(usize, Vec<GroupTag>)> = src
        .upper_bounds
        .iter()
        .enumerate()
        .map(|(g, &b)| (g, vec![GroupTag::Upper; b]))
        .collect();
    build_reduction(&src.metric, &src.groups, src.k, src.z, &plan)
}

/// Duplicates each group `i` into `lower_bounds[i]` equality copies plus
/// `upper_bounds[i] - lower_bounds[i]` slack copies.
pub fn fair_range_to_unit_supplier(src: &FairRangeInstance) -> UnitSupplierReduction {
    let plan: Vec<(usize, Vec<GroupTag>)> = src
        .groups
        .iter()
        .enumerate()
        .map(|(g, _)| {
            let lo = src.lower_bounds[g];
            let hi = src.upper_bounds[g];
            let mut tags = vec![GroupTag::Equality; lo];
            tags.extend(std::iter::repeat(GroupTag::Slack).take(hi - lo));
            (g, tags)
        })
        .collect();
    build_reduction(&src.metric, &src.groups, src.k, src.z, &plan)
}

fn build_reduction(
    metric: &Arc<Metric>,
    groups: &[Vec<PointId>],
    k: usize,
    z: usize,
    plan: &[(usize, Vec<GroupTag>)],
) -> UnitSupplierReduction {
    let n0 = metric.len();
    let mut origins = Vec::new();
    let mut unit_groups = Vec::new();
    let mut supplier_groups = Vec::new();
    let mut group_members = Vec::with_capacity(groups.len());
    let mut copy_starts = vec![Vec::new(); groups.len()];

    let mut next = n0 as u32;
    for &(g, ref tags) in plan {
        let mut members = groups[g].clone();
        members.sort_unstable();
        for (copy, &tag) in tags.iter().enumerate() {
            copy_starts[g].push(next);
            let unit: Vec<PointId> = members
                .iter()
                .map(|&x| {
                    let id = PointId(next);
                    next += 1;
                    origins.push((x, g, copy));
                    id
                })
                .collect();
            unit_groups.push(UnitGroupInfo { source_group: g, copy, tag });
            supplier_groups.push(unit);
        }
        group_members.push(members);
    }

    // Copies sit at distance 0 from their origin, so every pair distance is
    // the origin-pair distance. The result is a pseudometric.
    let total = next as usize;
    let proj: Vec<PointId> = (0..total)
        .map(|i| {
            if i < n0 {
                PointId::from(i)
            } else {
                origins[i - n0].0
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(total);
    for a in 0..total {
        let mut row = Vec::with_capacity(total);
        for b in 0..total {
            row.push(metric.dist(proj[a], proj[b]));
        }
        rows.push(row);
    }

    let instance = FairSupplierInstance {
        metric: Arc::new(Metric::from_matrix(rows)),
        facilities: (n0..total).map(PointId::from).collect(),
        clients: all_points(metric),
        k,
        z,
        groups: supplier_groups,
    };
    UnitSupplierReduction {
        instance,
        back: BackMap {
            facility_base: n0 as u32,
            origins,
            group_members,
            copy_starts,
            unit_groups,
        },
    }
}

/// Maps a reduced-instance solution back to original points and recomputes
/// cost and outliers against the original clients.
pub fn map_back(
    reduced: &Solution,
    back: &BackMap,
    original_metric: &Metric,
    original_clients: &[PointId],
    z: usize,
) -> Solution {
    let centers = back.map_back_centers(&reduced.centers);
    let (cost, outliers) =
        crate::instances::cost_with_outliers(original_metric, original_clients, &centers, z);
    Solution {
        cost,
        centers,
        outliers,
        trace: reduced.trace.clone(),
    }
}

/// How a coloring came to be, for reproducibility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColoringSource {
    Seeded { seed: u64, trial: u64 },
    Enumerated { index: u64 },
    Direct,
}

/// An assignment of colors `0..k` to unit groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub assignment: Vec<usize>,
    pub source: ColoringSource,
}

/// Collapses unit groups into color classes. Returns `None` for the
/// instance when some color class ends up empty (the coloring is then
/// infeasible and the caller retries or skips).
pub fn color_code(l: &FairSupplierInstance, seed: u64) -> (Coloring, Option<ColorfulInstance>) {
    color_code_with(l, seed, 0)
}

/// [`color_code`] with the trial number recorded in the coloring source,
/// for callers driving repeated trials.
pub fn color_code_with(
    l: &FairSupplierInstance,
    seed: u64,
    trial: u64,
) -> (Coloring, Option<ColorfulInstance>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assignment: Vec<usize> = (0..l.groups.len()).map(|_| rng.gen_range(0..l.k)).collect();
    let coloring = Coloring {
        assignment,
        source: ColoringSource::Seeded { seed, trial },
    };
    let instance = apply_coloring(l, &coloring.assignment);
    (coloring, instance)
}

/// Builds the colorful instance for an explicit assignment; `None` if some
/// class would be empty.
pub fn apply_coloring(l: &FairSupplierInstance, assignment: &[usize]) -> Option<ColorfulInstance> {
    assert_eq!(assignment.len(), l.groups.len(), "one color per unit group");
    let mut classes: Vec<Vec<PointId>> = vec![Vec::new(); l.k];
    for (g, &color) in assignment.iter().enumerate() {
        let mut members = l.groups[g].clone();
        members.sort_unstable();
        classes[color].extend(members);
    }
    if classes.iter().any(Vec::is_empty) {
        return None;
    }
    for class in &mut classes {
        class.sort_unstable();
    }
    Some(ColorfulInstance {
        metric: l.metric.clone(),
        clients: l.clients.clone(),
        k: l.k,
        z: l.z,
        classes,
    })
}

/// Lazily yields every coloring that uses all `k` colors, in ascending
/// numeric order of the base-`k` assignment word (unit group 0 is the least
/// significant digit). Errors when `k^l` exceeds `cap`.
pub fn enumerate_colorings(
    l: &FairSupplierInstance,
    cap: u64,
) -> Result<ColoringEnumeration<'_>, crate::Error> {
    let ell = l.groups.len() as u32;
    let size = (l.k as u128)
        .checked_pow(ell)
        .unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(crate::Error::CapExceeded { size, cap });
    }
    Ok(ColoringEnumeration {
        l,
        next: 0,
        end: size as u64,
    })
}

pub struct ColoringEnumeration<'a> {
    l: &'a FairSupplierInstance,
    next: u64,
    end: u64,
}

impl<'a> Iterator for ColoringEnumeration<'a> {
    type Item = (Coloring, ColorfulInstance);

    fn next(&mut self) -> Option<Self::Item> {
        while self.next < self.end {
            let index = self.next;
            self.next += 1;
            let k = self.l.k as u64;
            let mut word = index;
            let mut assignment = Vec::with_capacity(self.l.groups.len());
            let mut used = vec![false; self.l.k];
            for _ in 0..self.l.groups.len() {
                let c = (word % k) as usize;
                used[c] = true;
                assignment.push(c);
                word /= k;
            }
            if !used.iter().all(|&u| u) {
                continue;
            }
            let instance = apply_coloring(self.l, &assignment)
                .expect("onto coloring of nonempty unit groups has no empty class");
            return Some((
                Coloring {
                    assignment,
                    source: ColoringSource::Enumerated { index },
                },
                instance,
            ));
        }
        None
    }
}

//! Exhaustive reference solvers. These are the ground truth the fast path
//! is tested against, so they stay as close to the definitions as possible:
//! enumerate candidate center sets, keep the cheapest, break ties toward
//! the lexicographically smallest set.

use crate::error::Error;
use crate::instances::{
    cost_with_outliers, ColorfulInstance, FairKCenterInstance, FairRangeInstance,
};
use crate::metric::{Metric, PointId};
use serde::{Deserialize, Serialize};

/// Default bound on enumerated candidate sets.
pub const DEFAULT_ORACLE_CAP: u64 = 1_000_000;

/// An optimal solution together with its induced clustering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleClustering {
    /// Chosen centers. For colorful instances these are in class order
    /// (index c is the class-c center); otherwise ascending by id.
    pub centers: Vec<PointId>,
    /// Group (or class) index of each center, aligned with `centers`.
    pub center_groups: Vec<usize>,
    /// `clusters[i]`: non-outlier clients whose nearest center is
    /// `centers[i]`, ties to the smallest center index; each ascending.
    pub clusters: Vec<Vec<PointId>>,
    /// Dropped clients, ascending.
    pub outliers: Vec<PointId>,
    /// The optimal cost.
    pub radius: f64,
}

fn assemble(
    m: &Metric,
    clients: &[PointId],
    centers: Vec<PointId>,
    center_groups: Vec<usize>,
    z: usize,
) -> OracleClustering {
    let (radius, outliers) = cost_with_outliers(m, clients, &centers, z);
    let mut clusters = vec![Vec::new(); centers.len()];
    let mut sorted_clients = clients.to_vec();
    sorted_clients.sort_unstable();
    for &c in &sorted_clients {
        if outliers.binary_search(&c).is_ok() {
            continue;
        }
        let mut best = 0;
        for (i, &s) in centers.iter().enumerate() {
            if m.dist(c, s) < m.dist(c, centers[best]) {
                best = i;
            }
        }
        clusters[best].push(c);
    }
    OracleClustering { centers, center_groups, clusters, outliers, radius }
}

/// Optimal colorful solution by enumerating one facility per class.
/// Ties break toward the lexicographically smallest class-order tuple.
pub fn brute_force_colorful(inst: &ColorfulInstance, cap: u64) -> Result<OracleClustering, Error> {
    let k = inst.k;
    let mut classes = inst.classes.clone();
    for c in &mut classes {
        c.sort_unstable();
        assert!(!c.is_empty(), "colorful classes must be nonempty");
    }
    let mut size = 1u128;
    for c in &classes {
        size = size.saturating_mul(c.len() as u128);
    }
    if size > cap as u128 {
        return Err(Error::CapExceeded { size, cap });
    }
    let mut clients = inst.clients.clone();
    clients.sort_unstable();

    let mut idx = vec![0usize; k];
    let mut best: Option<(f64, Vec<PointId>)> = None;
    loop {
        let tuple: Vec<PointId> = idx.iter().enumerate().map(|(c, &i)| classes[c][i]).collect();
        let cost = crate::instances::cost_value(&inst.metric, &clients, &tuple, inst.z);
        let replace = match &best {
            None => true,
            Some((bc, bt)) => cost < *bc || (cost == *bc && tuple < *bt),
        };
        if replace {
            best = Some((cost, tuple));
        }
        // Odometer step, class 0 fastest.
        let mut pos = 0;
        loop {
            if pos == k {
                let (_, tuple) = best.unwrap();
                let groups = (0..k).collect();
                return Ok(assemble(&inst.metric, &clients, tuple, groups, inst.z));
            }
            idx[pos] += 1;
            if idx[pos] < classes[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut out = 1u128;
    for i in 0..k.min(n - k) {
        out = out.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    out
}

fn for_each_combination(n: usize, s: usize, mut f: impl FnMut(&[usize])) {
    assert!(s >= 1 && s <= n);
    let mut idx: Vec<usize> = (0..s).collect();
    loop {
        f(&idx);
        let mut i = s;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - s {
                idx[i] += 1;
                for j in i + 1..s {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Group index per point for bound checking; panics unless `groups`
/// partitions `0..n`.
fn group_lookup(n: usize, groups: &[Vec<PointId>]) -> Vec<usize> {
    let mut out = vec![usize::MAX; n];
    for (g, members) in groups.iter().enumerate() {
        for &p in members {
            assert_eq!(out[p.idx()], usize::MAX, "groups must be disjoint");
            out[p.idx()] = g;
        }
    }
    assert!(out.iter().all(|&g| g != usize::MAX), "groups must cover all points");
    out
}

struct SubsetBest {
    cost_centers: Option<(f64, Vec<PointId>)>,
}

impl SubsetBest {
    fn offer(&mut self, cost: f64, subset: &[usize]) {
        let replace = match &self.cost_centers {
            None => true,
            Some((bc, bv)) => {
                cost < *bc
                    || (cost == *bc
                        && subset
                            .iter()
                            .map(|&i| PointId::from(i))
                            .collect::<Vec<_>>()
                            .lt(bv))
            }
        };
        if replace {
            self.cost_centers =
                Some((cost, subset.iter().map(|&i| PointId::from(i)).collect()));
        }
    }
}

/// Optimal fair k-center solution by enumerating center sets of size 1..=k
/// that respect the per-group caps. Ties break toward the smaller center
/// set under lexicographic comparison (a strict prefix compares smaller).
pub fn brute_force_fair(inst: &FairKCenterInstance, cap: u64) -> Result<OracleClustering, Error> {
    let n = inst.metric.len();
    let max_s = inst.k.min(n);
    let mut size = 0u128;
    for s in 1..=max_s {
        size = size.saturating_add(binomial(n, s));
    }
    if size > cap as u128 {
        return Err(Error::CapExceeded { size, cap });
    }
    let group_of = group_lookup(n, &inst.groups);
    let clients: Vec<PointId> = (0..n).map(PointId::from).collect();
    let mut counts = vec![0usize; inst.groups.len()];
    let mut best = SubsetBest { cost_centers: None };
    for s in 1..=max_s {
        for_each_combination(n, s, |subset| {
            counts.iter_mut().for_each(|c| *c = 0);
            for &i in subset {
                counts[group_of[i]] += 1;
            }
            if counts
                .iter()
                .zip(&inst.upper_bounds)
                .any(|(&c, &b)| c > b)
            {
                return;
            }
            let centers: Vec<PointId> = subset.iter().map(|&i| PointId::from(i)).collect();
            let cost = crate::instances::cost_value(&inst.metric, &clients, &centers, inst.z);
            best.offer(cost, subset);
        });
    }
    let (_, centers) = best.cost_centers.ok_or(Error::NoFeasible)?;
    let groups = centers.iter().map(|c| group_of[c.idx()]).collect();
    Ok(assemble(&inst.metric, &clients, centers, groups, inst.z))
}

/// Optimal fair-range solution by enumerating center sets of size exactly
/// k that respect both bound vectors. `Err(NoFeasible)` when no such set
/// exists.
pub fn brute_force_fair_range(
    inst: &FairRangeInstance,
    cap: u64,
) -> Result<OracleClustering, Error> {
    let n = inst.metric.len();
    if inst.k > n {
        return Err(Error::NoFeasible);
    }
    let size = binomial(n, inst.k);
    if size > cap as u128 {
        return Err(Error::CapExceeded { size, cap });
    }
    let group_of = group_lookup(n, &inst.groups);
    let clients: Vec<PointId> = (0..n).map(PointId::from).collect();
    let mut counts = vec![0usize; inst.groups.len()];
    let mut best = SubsetBest { cost_centers: None };
    for_each_combination(n, inst.k, |subset| {
        counts.iter_mut().for_each(|c| *c = 0);
        for &i in subset {
            counts[group_of[i]] += 1;
        }
        let ok = counts
            .iter()
            .zip(&inst.upper_bounds)
            .zip(&inst.lower_bounds)
            .all(|((&c, &u), &l)| c >= l && c <= u);
        if !ok {
            return;
        }
        let centers: Vec<PointId> = subset.iter().map(|&i| PointId::from(i)).collect();
        let cost = crate::instances::cost_value(&inst.metric, &clients, &centers, inst.z);
        best.offer(cost, subset);
    });
    let (_, centers) = best.cost_centers.ok_or(Error::NoFeasible)?;
    let groups = centers.iter().map(|c| group_of[c.idx()]).collect();
    Ok(assemble(&inst.metric, &clients, centers, groups, inst.z))
}

//! Unconstrained baselines for benchmarking: the greedy densest-ball
//! 3-approximation for k-center with outliers, and farthest-first traversal
//! for plain k-center. Neither knows about groups; they bound what fairness
//! constraints cost on a given instance.

use crate::instances::{cost_with_outliers, Solution};
use crate::metric::{candidate_radii, Metric, PointId};

/// One round of the greedy at radius `r`: k times, pick the point whose
/// radius-`r` ball covers the most surviving points (ties to the smallest
/// id) and delete its `3r` ball. Succeeds when at most `z` points survive;
/// the achieved cost is then at most `3r`.
pub fn charikar_at_radius(m: &Metric, k: usize, z: usize, r: f64) -> Option<Solution> {
    let n = m.len();
    let all: Vec<PointId> = (0..n).map(PointId::from).collect();
    if k == 0 {
        return (n <= z).then(|| Solution {
            cost: 0.0,
            centers: Vec::new(),
            outliers: all.clone(),
            trace: None,
        });
    }
    let mut alive = vec![true; n];
    let mut centers: Vec<PointId> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, PointId)> = None;
        for &c in &all {
            let count = all
                .iter()
                .zip(&alive)
                .filter(|&(&p, &a)| a && m.dist(c, p) <= r)
                .count();
            if best.map_or(true, |(bc, _)| count > bc) {
                best = Some((count, c));
            }
        }
        let (_, center) = best.unwrap();
        centers.push(center);
        for (i, &p) in all.iter().enumerate() {
            if alive[i] && m.dist(center, p) <= 3.0 * r {
                alive[i] = false;
            }
        }
    }
    if alive.iter().filter(|&&a| a).count() > z {
        return None;
    }
    centers.sort_unstable();
    centers.dedup();
    let (cost, outliers) = cost_with_outliers(m, &all, &centers, z);
    Some(Solution { cost, centers, outliers, trace: None })
}

/// Ascending scan over candidate radii; the first success is a
/// 3-approximation for k-center with outliers.
pub fn charikar(m: &Metric, k: usize, z: usize) -> Option<Solution> {
    let all: Vec<PointId> = (0..m.len()).map(PointId::from).collect();
    let radii = candidate_radii(m, &all, &all);
    radii.iter().find_map(|&r| charikar_at_radius(m, k, z, r))
}

/// Farthest-first traversal from point 0; classic 2-approximation for
/// k-center without outliers.
pub fn gonzalez(m: &Metric, k: usize) -> Solution {
    let n = m.len();
    assert!(n >= 1 && k >= 1, "gonzalez needs points and k >= 1");
    let all: Vec<PointId> = (0..n).map(PointId::from).collect();
    let mut centers = vec![PointId(0)];
    let mut min_dist: Vec<f64> = all.iter().map(|&p| m.dist(PointId(0), p)).collect();
    while centers.len() < k.min(n) {
        let mut far = 0;
        for i in 1..n {
            if min_dist[i] > min_dist[far] {
                far = i;
            }
        }
        let next = all[far];
        centers.push(next);
        for i in 0..n {
            let d = m.dist(next, all[i]);
            if d < min_dist[i] {
                min_dist[i] = d;
            }
        }
    }
    centers.sort_unstable();
    let (cost, outliers) = cost_with_outliers(m, &all, &centers, 0);
    Solution { cost, centers, outliers, trace: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<PointId> {
        v.iter().map(|&i| PointId(i)).collect()
    }

    fn line(points: &[f64]) -> Metric {
        Metric::from_coords(points.iter().map(|&x| vec![x]).collect())
    }

    #[test]
    fn greedy_covers_two_heaps() {
        let m = line(&[0.0, 1.0, 10.0, 11.0]);
        let sol = charikar(&m, 2, 0).unwrap();
        assert_eq!(sol.cost, 1.0);
        assert_eq!(sol.centers, ids(&[0, 2]));
    }

    #[test]
    fn greedy_at_radius_zero_only_with_enough_outliers() {
        let m = line(&[0.0, 5.0, 9.0]);
        assert!(charikar_at_radius(&m, 1, 0, 0.0).is_none());
        let sol = charikar_at_radius(&m, 1, 2, 0.0).unwrap();
        assert_eq!(sol.cost, 0.0);
        assert_eq!(sol.centers, ids(&[0]));
        assert_eq!(sol.outliers, ids(&[1, 2]));
    }

    #[test]
    fn greedy_drops_planted_outlier() {
        let m = line(&[0.0, 1.0, 2.0, 50.0]);
        let sol = charikar(&m, 1, 1).unwrap();
        assert_eq!(sol.outliers, ids(&[3]));
        assert!(sol.cost <= 3.0);
    }

    #[test]
    fn zero_k_succeeds_only_when_all_are_outliers() {
        let m = line(&[0.0, 1.0]);
        assert!(charikar_at_radius(&m, 0, 1, 5.0).is_none());
        let sol = charikar_at_radius(&m, 0, 2, 5.0).unwrap();
        assert_eq!(sol.cost, 0.0);
        assert!(sol.centers.is_empty());
        assert_eq!(sol.outliers, ids(&[0, 1]));
    }

    #[test]
    fn duplicate_picks_collapse() {
        // k = 3 exceeds the two distinct heaps; repeated picks dedup.
        let m = line(&[0.0, 0.0, 0.0]);
        let sol = charikar(&m, 3, 0).unwrap();
        assert_eq!(sol.cost, 0.0);
        assert_eq!(sol.centers, ids(&[0]));
    }

    #[test]
    fn gonzalez_two_heaps() {
        let m = line(&[0.0, 1.0, 10.0, 11.0]);
        let sol = gonzalez(&m, 2);
        // Starts at 0, farthest point is 3, final cost 1.
        assert_eq!(sol.centers, ids(&[0, 3]));
        assert_eq!(sol.cost, 1.0);
    }

    #[test]
    fn gonzalez_k_exceeding_n_takes_all() {
        let m = line(&[0.0, 4.0]);
        let sol = gonzalez(&m, 5);
        assert_eq!(sol.centers, ids(&[0, 1]));
        assert_eq!(sol.cost, 0.0);
    }
}

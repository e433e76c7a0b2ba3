//! Distance storage and the primitive geometric queries everything else is
//! built from.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;

/// Index of a point in an instance; dense in `[0, n)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub u32);

impl PointId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for PointId {
    fn from(i: usize) -> Self {
        PointId(u32::try_from(i).expect("point index exceeds u32"))
    }
}

impl fmt::Debug for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Euclidean coordinates switch to an n x n cache below this point count.
pub const DEFAULT_CACHE_THRESHOLD: usize = 4096;

enum Storage {
    /// Row-major `n * n` matrix, exactly as loaded.
    Matrix(Vec<f64>),
    /// Coordinates; the full matrix is materialized lazily while
    /// `n <= cache_threshold`, otherwise distances are recomputed per call.
    Euclidean {
        coords: Vec<Vec<f64>>,
        cache_threshold: usize,
        cache: OnceLock<Vec<f64>>,
    },
}

/// Pairwise distances over `n` points.
///
/// No metric axioms are enforced here; [`verify_metric`] checks them on
/// demand. All accessors panic on out-of-range ids.
pub struct Metric {
    n: usize,
    storage: Storage,
}

impl fmt::Debug for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.storage {
            Storage::Matrix(_) => "matrix",
            Storage::Euclidean { .. } => "euclidean",
        };
        write!(f, "Metric({kind}, n={})", self.n)
    }
}

impl Metric {
    /// `rows` must be square; entry values are taken verbatim.
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in &rows {
            assert_eq!(row.len(), n, "distance matrix must be square");
            flat.extend_from_slice(row);
        }
        Metric {
            n,
            storage: Storage::Matrix(flat),
        }
    }

    pub fn from_coords(coords: Vec<Vec<f64>>) -> Self {
        Self::from_coords_with_threshold(coords, DEFAULT_CACHE_THRESHOLD)
    }

    pub fn from_coords_with_threshold(coords: Vec<Vec<f64>>, cache_threshold: usize) -> Self {
        let n = coords.len();
        if let Some(first) = coords.first() {
            let d = first.len();
            assert!(
                coords.iter().all(|c| c.len() == d),
                "all coordinate rows must share one dimension"
            );
        }
        Metric {
            n,
            storage: Storage::Euclidean {
                coords,
                cache_threshold,
                cache: OnceLock::new(),
            },
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Coordinates if this metric is Euclidean (used for serialization and
    /// rendering); `None` for matrix storage.
    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        match &self.storage {
            Storage::Matrix(_) => None,
            Storage::Euclidean { coords, .. } => Some(coords),
        }
    }

    /// Distance between two points. Panics if an id is out of range.
    #[inline]
    pub fn dist(&self, a: PointId, b: PointId) -> f64 {
        let (i, j) = (a.idx(), b.idx());
        assert!(i < self.n && j < self.n, "point id out of range");
        match &self.storage {
            Storage::Matrix(m) => m[i * self.n + j],
            Storage::Euclidean {
                coords,
                cache_threshold,
                cache,
            } => {
                if self.n <= *cache_threshold {
                    let m = cache.get_or_init(|| {
                        let mut m = Vec::with_capacity(self.n * self.n);
                        for a in coords {
                            for b in coords {
                                m.push(euclid(a, b));
                            }
                        }
                        m
                    });
                    m[i * self.n + j]
                } else {
                    euclid(&coords[i], &coords[j])
                }
            }
        }
    }

    /// All candidates within `radius` of `center` (non-strict), in input order.
    pub fn ball(&self, center: PointId, radius: f64, candidates: &[PointId]) -> Vec<PointId> {
        candidates
            .iter()
            .copied()
            .filter(|&p| self.dist(center, p) <= radius)
            .collect()
    }

    /// Materialized rows, regardless of storage (for serialization).
    pub fn matrix_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.dist(PointId::from(i), PointId::from(j)))
                    .collect()
            })
            .collect()
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Distinct values `d(c, f)` over all client-facility pairs, plus 0, sorted
/// ascending. Every radius the solvers ever test comes from this set, which
/// is why exact `<=` comparisons are safe downstream.
///
/// Panics if either set is empty.
pub fn candidate_radii(m: &Metric, facilities: &[PointId], clients: &[PointId]) -> Vec<f64> {
    assert!(
        !facilities.is_empty() && !clients.is_empty(),
        "candidate_radii needs nonempty facility and client sets"
    );
    let mut out = Vec::with_capacity(facilities.len() * clients.len() + 1);
    out.push(0.0);
    for &c in clients {
        for &f in facilities {
            out.push(m.dist(c, f));
        }
    }
    out.sort_unstable_by(f64::total_cmp);
    out.dedup();
    out
}

/// One recorded defect of a would-be metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MetricViolation {
    NonFinite { a: u32, b: u32, value: f64 },
    Negative { a: u32, b: u32, value: f64 },
    NonzeroDiagonal { a: u32, value: f64 },
    Asymmetry { a: u32, b: u32, ab: f64, ba: f64 },
    /// `d(a,c) > d(a,b) + d(b,c)`.
    Triangle { a: u32, b: u32, c: u32, direct: f64, via: f64 },
}

/// Outcome of [`verify_metric`]; records up to `MAX_RECORDED` concrete
/// violations but counts all of them.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub n: usize,
    pub violations_total: usize,
    pub violations: Vec<MetricViolation>,
}

impl MetricReport {
    pub const MAX_RECORDED: usize = 16;

    pub fn is_metric(&self) -> bool {
        self.violations_total == 0
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_metric() {
            return write!(f, "metric ok over {} points", self.n);
        }
        writeln!(f, "{} metric violations over {} points:", self.violations_total, self.n)?;
        for v in &self.violations {
            writeln!(f, "  {v:?}")?;
        }
        if self.violations_total > self.violations.len() {
            writeln!(f, "  ... {} more", self.violations_total - self.violations.len())?;
        }
        Ok(())
    }
}

/// Checks symmetry, nonnegativity, zero diagonal and the triangle inequality
/// over all triples, with exact comparisons. O(n^3).
pub fn verify_metric(m: &Metric) -> MetricReport {
    let n = m.len();
    let mut report = MetricReport {
        n,
        violations_total: 0,
        violations: Vec::new(),
    };
    let push = |report: &mut MetricReport, v: MetricViolation| {
        report.violations_total += 1;
        if report.violations.len() < MetricReport::MAX_RECORDED {
            report.violations.push(v);
        }
    };
    let id = |i: usize| PointId::from(i);
    for a in 0..n {
        let daa = m.dist(id(a), id(a));
        if daa != 0.0 {
            push(&mut report, MetricViolation::NonzeroDiagonal { a: a as u32, value: daa });
        }
        for b in 0..n {
            let dab = m.dist(id(a), id(b));
            if !dab.is_finite() {
                push(&mut report, MetricViolation::NonFinite { a: a as u32, b: b as u32, value: dab });
                continue;
            }
            if dab < 0.0 {
                push(&mut report, MetricViolation::Negative { a: a as u32, b: b as u32, value: dab });
            }
            if a < b {
                let dba = m.dist(id(b), id(a));
                if dab != dba {
                    push(
                        &mut report,
                        MetricViolation::Asymmetry { a: a as u32, b: b as u32, ab: dab, ba: dba },
                    );
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let dab = m.dist(id(a), id(b));
            for c in 0..n {
                let direct = m.dist(id(a), id(c));
                let via = dab + m.dist(id(b), id(c));
                if direct > via {
                    push(
                        &mut report,
                        MetricViolation::Triangle {
                            a: a as u32,
                            b: b as u32,
                            c: c as u32,
                            direct,
                            via,
                        },
                    );
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> Metric {
        Metric::from_coords(points.iter().map(|&x| vec![x]).collect())
    }

    fn ids(v: &[u32]) -> Vec<PointId> {
        v.iter().map(|&i| PointId(i)).collect()
    }

    #[test]
    fn euclid_345() {
        let m = Metric::from_coords(vec![vec![0.0, 0.0], vec![3.0, 4.0]]);
        assert_eq!(m.dist(PointId(0), PointId(1)), 5.0);
        assert_eq!(m.dist(PointId(1), PointId(0)), 5.0);
        assert_eq!(m.dist(PointId(0), PointId(0)), 0.0);
    }

    #[test]
    fn matrix_lookup_is_verbatim() {
        let m = Metric::from_matrix(vec![vec![0.0, 2.5], vec![2.5, 0.0]]);
        assert_eq!(m.dist(PointId(0), PointId(1)), 2.5);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn dist_out_of_range_panics() {
        let m = line(&[0.0, 1.0]);
        m.dist(PointId(0), PointId(2));
    }

    #[test]
    fn ball_is_nonstrict() {
        let m = line(&[0.0, 1.0, 2.0, 10.0]);
        let cand = ids(&[0, 1, 2, 3]);
        assert_eq!(m.ball(PointId(0), 2.0, &cand), ids(&[0, 1, 2]));
        assert_eq!(m.ball(PointId(0), 1.9999, &cand), ids(&[0, 1]));
        assert_eq!(m.ball(PointId(3), 0.0, &cand), ids(&[3]));
    }

    #[test]
    fn candidate_radii_line_example() {
        // Clients {0,1,2,10} and facilities {0,10} on a line: distances
        // {0,10, 1,9, 2,8, 10,0} plus 0 dedupe to six values.
        let m = line(&[0.0, 1.0, 2.0, 10.0]);
        let radii = candidate_radii(&m, &ids(&[0, 3]), &ids(&[0, 1, 2, 3]));
        assert_eq!(radii, vec![0.0, 1.0, 2.0, 8.0, 9.0, 10.0]);
    }

    #[test]
    #[should_panic(expected = "nonempty")]
    fn candidate_radii_empty_facilities_panics() {
        let m = line(&[0.0, 1.0]);
        candidate_radii(&m, &[], &ids(&[0]));
    }

    #[test]
    fn verify_clean_euclidean() {
        let m = Metric::from_coords(vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![2.0, 2.0]]);
        assert!(verify_metric(&m).is_metric());
    }

    #[test]
    fn verify_flags_asymmetry() {
        let m = Metric::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]);
        let rep = verify_metric(&m);
        assert!(!rep.is_metric());
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, MetricViolation::Asymmetry { a: 0, b: 1, .. })));
    }

    #[test]
    fn verify_flags_triangle() {
        // d(0,2) = 10 > d(0,1) + d(1,2) = 2.
        let m = Metric::from_matrix(vec![
            vec![0.0, 1.0, 10.0],
            vec![1.0, 0.0, 1.0],
            vec![10.0, 1.0, 0.0],
        ]);
        let rep = verify_metric(&m);
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, MetricViolation::Triangle { a: 0, b: 1, c: 2, .. })));
    }

    #[test]
    fn verify_flags_diagonal_and_negative() {
        let m = Metric::from_matrix(vec![vec![1.0, -2.0], vec![-2.0, 0.0]]);
        let rep = verify_metric(&m);
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, MetricViolation::NonzeroDiagonal { a: 0, .. })));
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, MetricViolation::Negative { .. })));
    }

    #[test]
    fn large_euclidean_skips_cache() {
        // Above the threshold distances are recomputed; below they come from
        // the cached matrix. Either way values agree.
        let coords: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64]).collect();
        let cached = Metric::from_coords_with_threshold(coords.clone(), 100);
        let uncached = Metric::from_coords_with_threshold(coords, 4);
        for i in 0..12u32 {
            for j in 0..12u32 {
                assert_eq!(
                    cached.dist(PointId(i), PointId(j)),
                    uncached.dist(PointId(i), PointId(j))
                );
            }
        }
    }
}

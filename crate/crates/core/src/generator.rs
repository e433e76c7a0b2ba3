//! Seeded random instances with planted structure: k cluster centers
//! spaced along the first axis, noise points around them, and optional
//! planted outliers pushed far in the opposite direction. Group labels and
//! bounds come from small schemes chosen to exercise the solver (uniform
//! labels, skewed labels, a forbidden group that may hold no center).
//!
//! Generation is a single ChaCha stream per seed, so equal specs yield
//! identical instances.

use crate::error::Error;
use crate::instances::{FairKCenterInstance, FairRangeInstance, Instance};
use crate::metric::{Metric, PointId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GroupScheme {
    /// Labels drawn uniformly.
    #[default]
    Uniform,
    /// Geometric label distribution, group 0 heaviest.
    Skewed,
    /// Group 0 is a single point with a zero upper bound.
    Forbidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundsScheme {
    /// Upper bounds only: a fair k-center instance.
    #[default]
    UpperOnly,
    /// Lower and upper bounds: a fair-range instance.
    FairRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenSpec {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub z: usize,
    pub dim: usize,
    /// Noise points land within this distance of their planted center,
    /// per coordinate.
    pub sigma: f64,
    /// Spacing between consecutive planted centers on axis 0.
    pub delta: f64,
    /// Planted outlier j sits at `-(j+1) * displacement` on axis 0.
    pub displacement: f64,
    /// Number of planted outliers; defaults to `min(z, n / 4)`.
    pub planted_outliers: Option<usize>,
    pub groups: usize,
    pub group_scheme: GroupScheme,
    pub bounds_scheme: BoundsScheme,
    /// Emit an explicit distance matrix instead of coordinates.
    pub matrix_output: bool,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            seed: 0,
            n: 20,
            k: 2,
            z: 2,
            dim: 2,
            sigma: 0.5,
            delta: 10.0,
            displacement: 40.0,
            planted_outliers: None,
            groups: 2,
            group_scheme: GroupScheme::Uniform,
            bounds_scheme: BoundsScheme::UpperOnly,
            matrix_output: false,
        }
    }
}

fn check(spec: &GenSpec) -> Result<usize, Error> {
    let fail = |msg: String| Err(Error::Schema(msg));
    if spec.n == 0 || spec.k == 0 {
        return fail("n and k must be positive".into());
    }
    if spec.dim == 0 {
        return fail("dim must be positive".into());
    }
    if !(spec.sigma >= 0.0) || !(spec.delta > 0.0) || !(spec.displacement > 0.0) {
        return fail("sigma must be nonnegative, delta and displacement positive".into());
    }
    if spec.groups == 0 || spec.groups > spec.n {
        return fail(format!("groups must be in 1..={}", spec.n));
    }
    if spec.group_scheme == GroupScheme::Forbidden && spec.groups < 2 {
        return fail("forbidden scheme needs at least two groups".into());
    }
    if spec.z > spec.n {
        return fail("z cannot exceed n".into());
    }
    let planted = spec.planted_outliers.unwrap_or_else(|| spec.z.min(spec.n / 4));
    if planted > spec.z {
        return fail("planted outliers cannot exceed z".into());
    }
    if spec.n - planted < spec.k {
        return fail("need at least k non-outlier points".into());
    }
    Ok(planted)
}

/// Builds the instance for `spec`. Equal specs produce equal instances.
pub fn generate(spec: &GenSpec) -> Result<Instance, Error> {
    let planted = check(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let k = spec.k;

    let mut coords: Vec<Vec<f64>> = Vec::with_capacity(n);
    for _ in 0..n - planted {
        let c = rng.gen_range(0..k);
        let mut p = vec![0.0; spec.dim];
        p[0] = c as f64 * spec.delta;
        for x in p.iter_mut() {
            *x += if spec.sigma > 0.0 {
                rng.gen_range(-spec.sigma..=spec.sigma)
            } else {
                0.0
            };
        }
        coords.push(p);
    }
    for j in 0..planted {
        let mut p = vec![0.0; spec.dim];
        p[0] = -((j + 1) as f64) * spec.displacement;
        coords.push(p);
    }

    // First `groups` points are pinned to distinct groups so none is empty.
    let mut label = vec![0usize; n];
    for (i, l) in label.iter_mut().enumerate().take(spec.groups) {
        *l = i;
    }
    for l in label.iter_mut().skip(spec.groups) {
        *l = match spec.group_scheme {
            GroupScheme::Uniform => rng.gen_range(0..spec.groups),
            GroupScheme::Skewed => {
                let mut g = 0;
                while g + 1 < spec.groups && rng.gen_bool(0.5) {
                    g += 1;
                }
                g
            }
            GroupScheme::Forbidden => 1 + rng.gen_range(0..spec.groups - 1),
        };
    }
    let mut groups: Vec<Vec<PointId>> = vec![Vec::new(); spec.groups];
    for (i, &g) in label.iter().enumerate() {
        groups[g].push(PointId::from(i));
    }

    let forbidden = spec.group_scheme == GroupScheme::Forbidden;
    let mut upper: Vec<usize> = (0..spec.groups)
        .map(|g| {
            if forbidden && g == 0 {
                0
            } else {
                rng.gen_range(1..=k)
            }
        })
        .collect();
    let lower: Option<Vec<usize>> = match spec.bounds_scheme {
        BoundsScheme::UpperOnly => None,
        BoundsScheme::FairRange => Some(
            upper
                .iter()
                .map(|&u| {
                    if u == 0 {
                        0
                    } else if rng.gen_bool(0.5) {
                        1
                    } else {
                        0
                    }
                })
                .collect(),
        ),
    };
    // Repair: total capacity must reach k. Bump permitted groups in order.
    let mut total: usize = upper.iter().sum();
    'grow: while total < k {
        for (g, u) in upper.iter_mut().enumerate() {
            if (forbidden && g == 0) || *u >= k {
                continue;
            }
            *u += 1;
            total += 1;
            continue 'grow;
        }
        unreachable!("capacity repair always reaches k");
    }
    let lower = lower.map(|mut l| {
        // Repair: total lower bounds must not exceed k. Relax from the
        // last group backwards.
        let mut sum: usize = l.iter().sum();
        for v in l.iter_mut().rev() {
            if sum <= k {
                break;
            }
            sum -= *v;
            *v = 0;
        }
        l
    });

    let metric = {
        let coord_metric = Metric::from_coords(coords);
        if spec.matrix_output {
            Arc::new(Metric::from_matrix(coord_metric.matrix_rows()))
        } else {
            Arc::new(coord_metric)
        }
    };
    Ok(match lower {
        None => Instance::FairKCenter(FairKCenterInstance {
            metric,
            k,
            z: spec.z,
            groups,
            upper_bounds: upper,
        }),
        Some(lower_bounds) => Instance::FairRange(FairRangeInstance {
            metric,
            k,
            z: spec.z,
            groups,
            upper_bounds: upper,
            lower_bounds,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_is_valid_and_deterministic() {
        let spec = GenSpec::default();
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert!(a.validate().ok(), "{}", a.validate());
        match (&a, &b) {
            (Instance::FairKCenter(x), Instance::FairKCenter(y)) => {
                assert_eq!(x.metric.matrix_rows(), y.metric.matrix_rows());
                assert_eq!(x.groups, y.groups);
                assert_eq!(x.upper_bounds, y.upper_bounds);
            }
            _ => panic!("default spec generates fair k-center"),
        }
    }

    #[test]
    fn seeds_change_the_instance() {
        let a = generate(&GenSpec::default()).unwrap();
        let b = generate(&GenSpec { seed: 1, ..Default::default() }).unwrap();
        match (&a, &b) {
            (Instance::FairKCenter(x), Instance::FairKCenter(y)) => {
                assert_ne!(x.metric.matrix_rows(), y.metric.matrix_rows());
            }
            _ => panic!("both are fair k-center"),
        }
    }

    #[test]
    fn planted_outliers_sit_far_left() {
        let spec = GenSpec { n: 12, z: 3, planted_outliers: Some(3), ..Default::default() };
        let inst = generate(&spec).unwrap();
        let m = inst.metric();
        let coords = m.coords().unwrap();
        // Outliers occupy the last ids with the fixed displacement.
        assert_eq!(coords[9][0], -40.0);
        assert_eq!(coords[10][0], -80.0);
        assert_eq!(coords[11][0], -120.0);
    }

    #[test]
    fn forbidden_scheme_zeroes_group_zero() {
        let spec = GenSpec {
            groups: 3,
            group_scheme: GroupScheme::Forbidden,
            ..Default::default()
        };
        match generate(&spec).unwrap() {
            Instance::FairKCenter(inst) => {
                assert_eq!(inst.upper_bounds[0], 0);
                assert_eq!(inst.groups[0], vec![PointId(0)]);
                assert!(inst.validate().ok());
                assert!(inst.upper_bounds.iter().sum::<usize>() >= inst.k);
            }
            _ => panic!("upper-only spec"),
        }
    }

    #[test]
    fn fair_range_scheme_keeps_bounds_consistent() {
        for seed in 0..20 {
            let spec = GenSpec {
                seed,
                n: 15,
                k: 3,
                groups: 4,
                bounds_scheme: BoundsScheme::FairRange,
                ..Default::default()
            };
            match generate(&spec).unwrap() {
                Instance::FairRange(inst) => {
                    let report = inst.validate();
                    assert!(report.ok(), "seed {seed}: {report}");
                    assert!(inst.lower_bounds.iter().sum::<usize>() <= inst.k);
                    assert!(inst.upper_bounds.iter().sum::<usize>() >= inst.k);
                }
                _ => panic!("fair-range spec"),
            }
        }
    }

    #[test]
    fn matrix_output_matches_coords() {
        let base = GenSpec { n: 8, ..Default::default() };
        let with_matrix = GenSpec { matrix_output: true, ..base };
        let a = generate(&base).unwrap();
        let b = generate(&with_matrix).unwrap();
        assert_eq!(a.metric().matrix_rows(), b.metric().matrix_rows());
        assert!(a.metric().coords().is_some());
        assert!(b.metric().coords().is_none());
    }

    #[test]
    fn bad_specs_are_schema_errors() {
        for spec in [
            GenSpec { n: 0, ..Default::default() },
            GenSpec { k: 0, ..Default::default() },
            GenSpec { groups: 0, ..Default::default() },
            GenSpec { groups: 21, ..Default::default() },
            GenSpec { z: 21, ..Default::default() },
            GenSpec { planted_outliers: Some(3), z: 2, ..Default::default() },
            GenSpec { group_scheme: GroupScheme::Forbidden, groups: 1, ..Default::default() },
            GenSpec { sigma: -1.0, ..Default::default() },
        ] {
            match generate(&spec) {
                Err(Error::Schema(_)) => {}
                other => panic!("expected schema error for {spec:?}, got {other:?}"),
            }
        }
    }
}

//! On-disk JSON schema for instances and solutions. Structural problems
//! (unknown fields, shape mismatches, out-of-range ids) are reported as
//! [`Error::Schema`]; semantic validation stays with
//! [`Instance::validate`].

use crate::error::Error;
use crate::instances::{
    ColorfulInstance, FairKCenterInstance, FairRangeInstance, FairSupplierInstance, Instance,
    Solution,
};
use crate::metric::{Metric, PointId};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceKind {
    #[serde(rename = "fair_kcenter")]
    FairKCenter,
    #[serde(rename = "fair_supplier")]
    FairSupplier,
    #[serde(rename = "colorful")]
    Colorful,
    #[serde(rename = "fair_range")]
    FairRange,
}

/// Exactly one of `matrix` (full square distance matrix) or `coords`
/// (Euclidean points, one row per point) must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct MetricFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RolesFile {
    pub facilities: Vec<u32>,
    pub clients: Vec<u32>,
}

/// `groups` holds the fairness groups, or the color classes for colorful
/// instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub kind: InstanceKind,
    pub metric: MetricFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<RolesFile>,
    pub k: usize,
    pub z: usize,
    pub groups: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_bounds: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bounds: Option<Vec<usize>>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn build_metric(file: &MetricFile) -> Result<Arc<Metric>, Error> {
    match (&file.matrix, &file.coords) {
        (Some(_), Some(_)) => Err(schema("metric must have either matrix or coords, not both")),
        (None, None) => Err(schema("metric needs a matrix or coords")),
        (Some(rows), None) => {
            let n = rows.len();
            if n == 0 {
                return Err(schema("matrix must be nonempty"));
            }
            if rows.iter().any(|r| r.len() != n) {
                return Err(schema(format!("matrix must be square with side {n}")));
            }
            Ok(Arc::new(Metric::from_matrix(rows.clone())))
        }
        (None, Some(pts)) => {
            if pts.is_empty() {
                return Err(schema("coords must be nonempty"));
            }
            let dim = pts[0].len();
            if dim == 0 || pts.iter().any(|p| p.len() != dim) {
                return Err(schema("coords rows must share one positive dimension"));
            }
            Ok(Arc::new(Metric::from_coords(pts.clone())))
        }
    }
}

fn to_points(raw: &[u32], n: usize, what: &str) -> Result<Vec<PointId>, Error> {
    raw.iter()
        .map(|&id| {
            if (id as usize) < n {
                Ok(PointId(id))
            } else {
                Err(schema(format!("{what} id {id} out of range for {n} points")))
            }
        })
        .collect()
}

fn groups_to_points(raw: &[Vec<u32>], n: usize) -> Result<Vec<Vec<PointId>>, Error> {
    raw.iter().map(|g| to_points(g, n, "group member")).collect()
}

fn all_points(n: usize) -> Vec<PointId> {
    (0..n).map(PointId::from).collect()
}

/// Builds the typed instance from its file form. Runs only structural
/// checks; call [`Instance::validate`] for semantics.
pub fn instance_from_file(file: &InstanceFile) -> Result<Instance, Error> {
    let metric = build_metric(&file.metric)?;
    let n = metric.len();
    let groups = groups_to_points(&file.groups, n)?;
    let no_roles = |kind: &str| -> Result<(), Error> {
        if file.roles.is_some() {
            Err(schema(format!("{kind} does not take roles")))
        } else {
            Ok(())
        }
    };
    let no_bounds = |kind: &str| -> Result<(), Error> {
        if file.upper_bounds.is_some() || file.lower_bounds.is_some() {
            Err(schema(format!("{kind} does not take bounds")))
        } else {
            Ok(())
        }
    };
    match file.kind {
        InstanceKind::FairKCenter => {
            no_roles("fair_kcenter")?;
            if file.lower_bounds.is_some() {
                return Err(schema("fair_kcenter takes upper_bounds only"));
            }
            let upper_bounds = file
                .upper_bounds
                .clone()
                .ok_or_else(|| schema("fair_kcenter requires upper_bounds"))?;
            Ok(Instance::FairKCenter(FairKCenterInstance {
                metric,
                k: file.k,
                z: file.z,
                groups,
                upper_bounds,
            }))
        }
        InstanceKind::FairRange => {
            no_roles("fair_range")?;
            let upper_bounds = file
                .upper_bounds
                .clone()
                .ok_or_else(|| schema("fair_range requires upper_bounds"))?;
            let lower_bounds = file
                .lower_bounds
                .clone()
                .ok_or_else(|| schema("fair_range requires lower_bounds"))?;
            Ok(Instance::FairRange(FairRangeInstance {
                metric,
                k: file.k,
                z: file.z,
                groups,
                upper_bounds,
                lower_bounds,
            }))
        }
        InstanceKind::FairSupplier => {
            no_bounds("fair_supplier")?;
            let (facilities, clients) = match &file.roles {
                Some(r) => (
                    to_points(&r.facilities, n, "facility")?,
                    to_points(&r.clients, n, "client")?,
                ),
                None => (all_points(n), all_points(n)),
            };
            Ok(Instance::FairSupplier(FairSupplierInstance {
                metric,
                facilities,
                clients,
                k: file.k,
                z: file.z,
                groups,
            }))
        }
        InstanceKind::Colorful => {
            no_bounds("colorful")?;
            let clients = match &file.roles {
                Some(r) => {
                    let mut union: Vec<PointId> = groups.iter().flatten().copied().collect();
                    union.sort_unstable();
                    let mut listed = to_points(&r.facilities, n, "facility")?;
                    listed.sort_unstable();
                    if listed != union {
                        return Err(schema(
                            "colorful roles.facilities must equal the union of the classes",
                        ));
                    }
                    to_points(&r.clients, n, "client")?
                }
                None => all_points(n),
            };
            Ok(Instance::Colorful(ColorfulInstance {
                metric,
                clients,
                k: file.k,
                z: file.z,
                classes: groups,
            }))
        }
    }
}

fn metric_to_file(m: &Metric) -> MetricFile {
    match m.coords() {
        Some(pts) => MetricFile { matrix: None, coords: Some(pts.to_vec()) },
        None => MetricFile { matrix: Some(m.matrix_rows()), coords: None },
    }
}

fn points_to_raw(points: &[PointId]) -> Vec<u32> {
    points.iter().map(|p| p.0).collect()
}

/// File form of an instance; `instance_from_file` inverts it.
pub fn instance_to_file(inst: &Instance) -> InstanceFile {
    match inst {
        Instance::FairKCenter(i) => InstanceFile {
            kind: InstanceKind::FairKCenter,
            metric: metric_to_file(&i.metric),
            roles: None,
            k: i.k,
            z: i.z,
            groups: i.groups.iter().map(|g| points_to_raw(g)).collect(),
            upper_bounds: Some(i.upper_bounds.clone()),
            lower_bounds: None,
        },
        Instance::FairRange(i) => InstanceFile {
            kind: InstanceKind::FairRange,
            metric: metric_to_file(&i.metric),
            roles: None,
            k: i.k,
            z: i.z,
            groups: i.groups.iter().map(|g| points_to_raw(g)).collect(),
            upper_bounds: Some(i.upper_bounds.clone()),
            lower_bounds: Some(i.lower_bounds.clone()),
        },
        Instance::FairSupplier(i) => InstanceFile {
            kind: InstanceKind::FairSupplier,
            metric: metric_to_file(&i.metric),
            roles: Some(RolesFile {
                facilities: points_to_raw(&i.facilities),
                clients: points_to_raw(&i.clients),
            }),
            k: i.k,
            z: i.z,
            groups: i.groups.iter().map(|g| points_to_raw(g)).collect(),
            upper_bounds: None,
            lower_bounds: None,
        },
        Instance::Colorful(i) => InstanceFile {
            kind: InstanceKind::Colorful,
            metric: metric_to_file(&i.metric),
            roles: Some(RolesFile {
                facilities: points_to_raw(&i.facilities()),
                clients: points_to_raw(&i.clients),
            }),
            k: i.k,
            z: i.z,
            groups: i.classes.iter().map(|g| points_to_raw(g)).collect(),
            upper_bounds: None,
            lower_bounds: None,
        },
    }
}

pub fn instance_from_str(s: &str) -> Result<Instance, Error> {
    let file: InstanceFile =
        serde_json::from_str(s).map_err(|e| schema(format!("instance json: {e}")))?;
    instance_from_file(&file)
}

pub fn instance_to_string(inst: &Instance) -> String {
    serde_json::to_string_pretty(&instance_to_file(inst)).expect("instance serializes")
}

pub fn solution_from_str(s: &str) -> Result<Solution, Error> {
    serde_json::from_str(s).map_err(|e| schema(format!("solution json: {e}")))
}

pub fn solution_to_string(sol: &Solution) -> String {
    serde_json::to_string_pretty(sol).expect("solution serializes")
}

//! String-in / string-out operations behind the browser demo page. Every
//! function takes JSON text and returns a JSON envelope (`{"ok": true, ...}`
//! or `{"ok": false, "error": ...}`), so the wasm boundary stays trivial and
//! the same functions are unit-tested on the host target.

use fairkc::generator::{generate, GenSpec};
use fairkc::instances::Instance;
use fairkc::oracle::{brute_force_colorful, brute_force_fair, brute_force_fair_range};
use fairkc::solver::{solve_instance, ColoringMode, PipelineOptions, RadiusMode};
use fairkc::{baselines, json, Error, PointId};
use serde::Deserialize;
use serde_json::{json, Value};

/// Center-set search spaces larger than this skip the exact reference row.
const ORACLE_CAP: u64 = 200_000;

fn fail(msg: impl std::fmt::Display) -> String {
    json!({ "ok": false, "error": msg.to_string() }).to_string()
}

/// Builds an instance from a (possibly partial) generator spec. Unknown
/// fields are rejected; missing ones take the generator defaults.
pub fn generate_json(spec_json: &str) -> String {
    let spec: GenSpec = match serde_json::from_str(spec_json) {
        Ok(s) => s,
        Err(e) => return fail(format!("spec: {e}")),
    };
    let inst = match generate(&spec) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let value: Value = serde_json::from_str(&json::instance_to_string(&inst))
        .expect("canonical instance json parses");
    json!({ "ok": true, "instance": value }).to_string()
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SolveRequest {
    /// Random coloring trials; absent means automatic mode selection.
    trials: Option<u64>,
    seed: u64,
    /// Bisect the candidate radii instead of scanning upward.
    binary: bool,
}

/// Runs the solver pipeline on an instance in the wire format; the options
/// object may be empty. The trace is stripped, the run counters are kept.
pub fn solve_json(instance_json: &str, options_json: &str) -> String {
    let inst = match json::instance_from_str(instance_json) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let req: SolveRequest = match serde_json::from_str(options_json) {
        Ok(r) => r,
        Err(e) => return fail(format!("options: {e}")),
    };
    let coloring = match req.trials {
        Some(t) if t >= 1 => ColoringMode::Random { trials: t },
        Some(_) => return fail("options: trials must be at least 1"),
        None => ColoringMode::Auto,
    };
    let opts = PipelineOptions {
        coloring,
        seed: req.seed,
        radius: if req.binary { RadiusMode::Binary } else { RadiusMode::Scan },
        ..PipelineOptions::default()
    };
    match solve_instance(&inst, &opts) {
        Ok(mut res) => {
            res.solution.trace = None;
            let sol: Value = serde_json::from_str(&json::solution_to_string(&res.solution))
                .expect("canonical solution json parses");
            let stats = serde_json::to_value(&res.stats).expect("stats serialize");
            json!({ "ok": true, "solution": sol, "stats": stats }).to_string()
        }
        Err(e) => fail(e),
    }
}

/// Scores the solver against the greedy baselines and, when the instance is
/// small enough to enumerate, the exact optimum. Every row reports the
/// instance's own cost of that center set, with the z farthest dropped.
pub fn compare_json(instance_json: &str) -> String {
    let inst = match json::instance_from_str(instance_json) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let report = inst.validate();
    if !report.ok() {
        return fail(Error::InvalidInstance(report));
    }
    let mut rows: Vec<Value> = Vec::new();
    let mut push = |algo: &str, centers: Vec<PointId>| {
        let (cost, outliers) = inst.cost(&centers);
        rows.push(json!({
            "algo": algo,
            "cost": cost,
            "centers": centers,
            "outliers": outliers,
            "respects_groups": inst.is_feasible(&centers).ok(),
        }));
    };
    match solve_instance(&inst, &PipelineOptions::default()) {
        Ok(res) => push("solver", res.solution.centers),
        Err(e) => return fail(e),
    }
    push("farthest-first", baselines::gonzalez(inst.metric(), inst.k()).centers);
    if let Some(sol) = baselines::charikar(inst.metric(), inst.k(), inst.z()) {
        push("densest-ball", sol.centers);
    }
    let oracle = match &inst {
        Instance::FairKCenter(f) => brute_force_fair(f, ORACLE_CAP).map(Some),
        Instance::FairRange(f) => brute_force_fair_range(f, ORACLE_CAP).map(Some),
        Instance::Colorful(c) => brute_force_colorful(c, ORACLE_CAP).map(Some),
        // Unit-group supplier has no exhaustive reference solver.
        Instance::FairSupplier(_) => Ok(None),
    };
    match oracle {
        Ok(Some(oc)) => push("exhaustive-optimum", oc.centers),
        Ok(None) => {}
        // Too many center sets to enumerate: omit the exact row.
        Err(Error::CapExceeded { .. }) => {}
        Err(e) => return fail(e),
    }
    json!({ "ok": true, "rows": rows }).to_string()
}

#[cfg(target_arch = "wasm32")]
mod wasm {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen]
    pub fn generate(spec_json: &str) -> String {
        crate::generate_json(spec_json)
    }

    #[wasm_bindgen]
    pub fn solve(instance_json: &str, options_json: &str) -> String {
        crate::solve_json(instance_json, options_json)
    }

    #[wasm_bindgen]
    pub fn compare(instance_json: &str) -> String {
        crate::compare_json(instance_json)
    }
}

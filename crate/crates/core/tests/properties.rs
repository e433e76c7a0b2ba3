//! Randomized invariant checks over the public API: outlier cost accounting,
//! metric verification, the duplication reduction, greedy ball carving, the
//! JSON wire format, instance validation, and branching success at radii at
//! or above the optimum.

use fairkc::generator::{generate, GenSpec};
use fairkc::instances::{
    cost_value, cost_with_outliers, dist_to_set, ColorfulInstance, FairKCenterInstance,
    InstanceViolation,
};
use fairkc::json;
use fairkc::metric::{candidate_radii, verify_metric, Metric};
use fairkc::oracle::brute_force_colorful;
use fairkc::reductions::fair_to_unit_supplier;
use fairkc::solver::{branch_solve, settle_balls, solve_fair, PipelineOptions, SolveLimits, SolverState};
use fairkc::{Error, Instance, PointId, Solution};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use std::collections::HashSet;
use std::sync::Arc;

fn ids(n: usize) -> Vec<PointId> {
    (0..n as u32).map(PointId).collect()
}

/// Small generator specs over every group count and outlier budget the
/// acceptance corpus uses; upper-bound scheme, coordinate output.
fn spec_strategy() -> impl Strategy<Value = GenSpec> {
    (
        any::<u64>(),
        6usize..14,
        1usize..=3,
        0usize..=3,
        1usize..=3,
        0.3f64..3.0,
        2.0f64..10.0,
    )
        .prop_map(|(seed, n, k, z, groups, sigma, delta)| GenSpec {
            seed,
            n,
            k,
            z,
            groups,
            sigma,
            delta,
            ..GenSpec::default()
        })
}

fn fair_gen(spec: &GenSpec) -> FairKCenterInstance {
    match generate(spec).expect("generator accepts in-range specs") {
        Instance::FairKCenter(f) => f,
        other => panic!("upper-bound scheme yields fair instances, got {other:?}"),
    }
}

/// Random colorful instances: 2-D points, every point a client, classes a
/// random partition of the points with each of the `k` classes nonempty.
fn colorful_strategy(max_n: usize, max_k: usize) -> impl Strategy<Value = (ColorfulInstance, u64)> {
    (1usize..=max_k).prop_flat_map(move |k| {
        ((k + 1)..=max_n).prop_flat_map(move |n| {
            (
                prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 2), n),
                prop::collection::vec(0usize..k, n),
                0usize..=2,
                any::<u64>(),
            )
                .prop_map(move |(coords, mut assign, z, seed)| {
                    let n = coords.len();
                    for c in 0..k {
                        assign[c] = c;
                    }
                    let metric = Arc::new(Metric::from_coords(coords));
                    let mut classes = vec![Vec::new(); k];
                    for (i, &c) in assign.iter().enumerate() {
                        classes[c].push(PointId(i as u32));
                    }
                    let inst = ColorfulInstance { metric, clients: ids(n), k, z, classes };
                    (inst, seed)
                })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Dropping z outliers means: exactly min(z, n) clients are dropped,
    /// ascending; the cost is the farthest kept client; nothing kept is
    /// farther than anything dropped.
    #[test]
    fn outlier_cost_matches_its_definition(
        coords in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 2), 3..16),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..4),
        z in 0usize..6,
    ) {
        let n = coords.len();
        let m = Metric::from_coords(coords);
        let clients = ids(n);
        let mut centers: Vec<PointId> =
            picks.iter().map(|ix| PointId(ix.index(n) as u32)).collect();
        centers.sort_unstable();
        centers.dedup();
        let (cost, outliers) = cost_with_outliers(&m, &clients, &centers, z);
        prop_assert_eq!(outliers.len(), z.min(n));
        prop_assert!(outliers.windows(2).all(|w| w[0] < w[1]));
        let dropped: HashSet<PointId> = outliers.iter().copied().collect();
        let kept: Vec<PointId> =
            clients.iter().copied().filter(|c| !dropped.contains(c)).collect();
        let kept_max = kept
            .iter()
            .map(|&c| dist_to_set(&m, c, &centers))
            .fold(0.0f64, f64::max);
        prop_assert_eq!(cost.to_bits(), kept_max.to_bits());
        let min_dropped = outliers
            .iter()
            .map(|&c| dist_to_set(&m, c, &centers))
            .fold(f64::INFINITY, f64::min);
        prop_assert!(kept.iter().all(|&c| dist_to_set(&m, c, &centers) <= min_dropped));
    }

    /// More outliers never raise the cost, and dropping everyone drops it
    /// to zero.
    #[test]
    fn outlier_cost_is_monotone_in_z(
        coords in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 2), 3..14),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..4),
    ) {
        let n = coords.len();
        let m = Metric::from_coords(coords);
        let clients = ids(n);
        let mut centers: Vec<PointId> =
            picks.iter().map(|ix| PointId(ix.index(n) as u32)).collect();
        centers.sort_unstable();
        centers.dedup();
        let mut prev = f64::INFINITY;
        for z in 0..=n + 1 {
            let c = cost_value(&m, &clients, &centers, z);
            prop_assert!(c <= prev, "cost rose from {} to {} at z = {}", prev, c, z);
            prev = c;
        }
        prop_assert_eq!(cost_value(&m, &clients, &centers, n), 0.0);
    }

    #[test]
    fn solution_json_round_trips(
        cost in 0.0f64..1e6,
        centers in prop::collection::vec(0u32..1000, 1..6),
        outliers in prop::collection::vec(0u32..1000, 0..6),
    ) {
        let mut out: Vec<PointId> = outliers.into_iter().map(PointId).collect();
        out.sort_unstable();
        out.dedup();
        let sol = Solution::new(cost, centers.into_iter().map(PointId).collect(), out);
        let s = json::solution_to_string(&sol);
        let back = json::solution_from_str(&s).unwrap();
        prop_assert_eq!(back, sol);
    }

    /// Upper bounds that cannot host k centers are rejected; z >= n is
    /// accepted but warned about.
    #[test]
    fn validator_flags_bad_bounds_and_degenerate_z(
        coords in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 2), 4..10),
        k in 2usize..4,
    ) {
        let n = coords.len();
        let metric = Arc::new(Metric::from_coords(coords));
        let groups = vec![ids(n)];
        let bad = FairKCenterInstance {
            metric: metric.clone(),
            k,
            z: 0,
            groups: groups.clone(),
            upper_bounds: vec![k - 1],
        };
        let rep = bad.validate();
        prop_assert!(!rep.ok());
        let flagged = rep
            .violations
            .iter()
            .any(|v| matches!(v, InstanceViolation::UpperBoundsBelowK { .. }));
        prop_assert!(flagged, "expected an upper-bound violation, got {:?}", rep.violations);
        let degenerate = FairKCenterInstance { metric, k, z: n, groups, upper_bounds: vec![k] };
        let rep = degenerate.validate();
        prop_assert!(rep.ok());
        prop_assert!(!rep.warnings.is_empty());
    }

    /// Breaking one matrix entry breaks at least symmetry, and the checker
    /// says so.
    #[test]
    fn tampered_matrix_is_flagged(
        coords in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 2), 3..10),
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
    ) {
        let n = coords.len();
        let (ia, ib) = (a.index(n), b.index(n));
        prop_assume!(ia != ib);
        let mut rows = Metric::from_coords(coords).matrix_rows();
        rows[ia][ib] += 1000.0;
        let rep = verify_metric(&Metric::from_matrix(rows));
        prop_assert!(rep.violations_total > 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_instances_validate_and_their_metrics_verify(spec in spec_strategy()) {
        let inst = generate(&spec).unwrap();
        prop_assert!(inst.validate().ok());
        let rep = verify_metric(inst.metric());
        prop_assert_eq!(rep.violations_total, 0);
    }

    /// Serialization is canonical: print(parse(print(x))) == print(x), for
    /// both coordinate and matrix outputs.
    #[test]
    fn instance_json_print_parse_print_is_identity(
        spec in spec_strategy(),
        matrix in any::<bool>(),
    ) {
        let mut spec = spec;
        spec.matrix_output = matrix;
        let inst = generate(&spec).unwrap();
        let s1 = json::instance_to_string(&inst);
        let back = json::instance_from_str(&s1).unwrap();
        let s2 = json::instance_to_string(&back);
        prop_assert_eq!(s1, s2);
    }

    /// The copy construction changes no distances: any center set within
    /// the per-group bounds costs bit-for-bit the same through its image,
    /// and mapping the image back returns the original set.
    #[test]
    fn duplication_preserves_costs_and_inverts(
        spec in spec_strategy(),
        pick_seed in any::<u64>(),
    ) {
        let inst = fair_gen(&spec);
        let red = fair_to_unit_supplier(&inst);
        let mut rng = StdRng::seed_from_u64(pick_seed);
        let mut s: Vec<PointId> = Vec::new();
        for (g, members) in inst.groups.iter().enumerate() {
            let take = rng.gen_range(0..=inst.upper_bounds[g].min(members.len()));
            let mut mem = members.clone();
            mem.shuffle(&mut rng);
            s.extend(mem.into_iter().take(take));
        }
        s.shuffle(&mut rng);
        s.truncate(inst.k);
        if s.is_empty() {
            let g = (0..inst.groups.len())
                .find(|&g| inst.upper_bounds[g] >= 1 && !inst.groups[g].is_empty())
                .expect("a valid instance can host at least one center");
            s.push(inst.groups[g][0]);
        }
        s.sort_unstable();
        let image = red.back.image_of(&s);
        let orig_cost = inst.cost(&s).0;
        let red_cost =
            cost_value(&red.instance.metric, &red.instance.clients, &image, red.instance.z);
        prop_assert_eq!(orig_cost.to_bits(), red_cost.to_bits());
        let back = red.back.map_back_centers(&image);
        prop_assert_eq!(back, s);
    }

    /// Whatever the pipeline returns satisfies the instance: group bounds
    /// respected, at most z dropped, and the claimed cost is the recomputed
    /// cost, bit for bit.
    #[test]
    fn pipeline_solutions_are_feasible(spec in spec_strategy()) {
        let inst = fair_gen(&spec);
        match solve_fair(&inst, &PipelineOptions::default()) {
            Ok(res) => {
                let sol = &res.solution;
                prop_assert!(inst.is_feasible(&sol.centers).ok());
                prop_assert!(sol.outliers.len() <= inst.z);
                let (cost, outliers) = inst.cost(&sol.centers);
                prop_assert_eq!(cost.to_bits(), sol.cost.to_bits());
                prop_assert_eq!(&outliers, &sol.outliers);
            }
            Err(Error::Infeasible(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error: {e}"),
        }
    }

    /// Carved balls per class: at most min(4k, class size) of them, sizes
    /// non-increasing, pairwise disjoint, each within radius r of a distinct
    /// facility of that class.
    #[test]
    fn carved_balls_are_dense_disjoint_and_capped(
        (inst, seed) in colorful_strategy(11, 3),
    ) {
        let facilities = inst.facilities();
        let radii = candidate_radii(&inst.metric, &facilities, &inst.clients);
        let mut rng = StdRng::seed_from_u64(seed);
        let r = radii[rng.gen_range(0..radii.len())];
        let state = SolverState {
            remaining: inst.clients.clone(),
            marked: vec![false; inst.k],
            committed: vec![None; inst.k],
            radius: r,
        };
        for color in 0..inst.k {
            let balls = settle_balls(&inst, &state, color);
            prop_assert!(balls.len() <= (4 * inst.k).min(inst.classes[color].len()));
            let mut seen = HashSet::new();
            let mut prev = usize::MAX;
            for b in &balls {
                prop_assert!(b.covered.len() <= prev, "ball sizes must not increase");
                prev = b.covered.len();
                prop_assert_eq!(b.color, color);
                prop_assert!(inst.classes[color].contains(&b.center));
                for &p in &b.covered {
                    prop_assert!(inst.metric.dist(b.center, p) <= r);
                    prop_assert!(seen.insert(p), "balls must not overlap");
                    prop_assert!(inst.clients.contains(&p));
                }
            }
            let mut centers: Vec<PointId> = balls.iter().map(|b| b.center).collect();
            centers.sort_unstable();
            centers.dedup();
            prop_assert_eq!(centers.len(), balls.len());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The fixed-radius search succeeds at every candidate radius at or
    /// above the exhaustive optimum, within cost 3r.
    #[test]
    fn branching_succeeds_at_every_radius_at_or_above_the_optimum(
        (inst, _seed) in colorful_strategy(9, 2),
    ) {
        let oc = brute_force_colorful(&inst, 1_000_000).unwrap();
        let facilities = inst.facilities();
        let radii = candidate_radii(&inst.metric, &facilities, &inst.clients);
        let limits = SolveLimits::default();
        for &r in radii.iter().filter(|&&r| r >= oc.radius) {
            let out = branch_solve(&inst, r, &limits).unwrap();
            match &out.solution {
                Some(sol) => prop_assert!(sol.cost <= 3.0 * r + 1e-9),
                None => prop_assert!(
                    false,
                    "branching failed at r = {} >= optimum = {}",
                    r,
                    oc.radius
                ),
            }
        }
    }
}

//! Command-line frontend: generate, solve, verify, oracle-solve and
//! benchmark instances, with JSON on the way in and out.
//!
//! Exit codes: 0 success, 1 schema or usage errors, 2 invalid or
//! infeasible instances, 3 resource limits, 4 verification mismatches.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use fairkc::baselines::{charikar, gonzalez};
use fairkc::generator::{generate, BoundsScheme, GenSpec, GroupScheme};
use fairkc::instances::cost_value;
use fairkc::json::{instance_from_str, instance_to_string, solution_from_str, solution_to_string};
use fairkc::metric::verify_metric;
use fairkc::oracle::{
    brute_force_colorful, brute_force_fair, brute_force_fair_range, OracleClustering,
    DEFAULT_ORACLE_CAP,
};
use fairkc::metric::MetricReport;
use fairkc::solver::{solve_instance, ColoringMode, PipelineOptions, RadiusMode, SolveLimits};
use fairkc::{Error, Instance, PointId, Solution};
use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "fairkc", version, about = "Fair k-center with outliers: solver and tools")]
struct Cli {
    /// Print progress and statistics to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and write it as JSON.
    Gen(GenArgs),
    /// Solve an instance and write the solution as JSON.
    Solve(SolveArgs),
    /// Solve an instance exhaustively and write the optimal clustering.
    Oracle(OracleArgs),
    /// Re-check a solution file against its instance.
    Verify(VerifyArgs),
    /// Solve a batch of generated instances and write one CSV row per run.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Generator parameters as JSON; the flags below override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of points.
    #[arg(long)]
    n: Option<usize>,
    /// Number of centers.
    #[arg(long)]
    k: Option<usize>,
    /// Outlier budget.
    #[arg(long)]
    z: Option<usize>,
    /// Coordinate dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Per-coordinate noise half-width around each planted center.
    #[arg(long)]
    sigma: Option<f64>,
    /// Spacing between planted centers.
    #[arg(long)]
    delta: Option<f64>,
    /// Distance scale of planted outliers.
    #[arg(long)]
    displacement: Option<f64>,
    /// Planted outlier count; defaults to min(z, n/4).
    #[arg(long)]
    planted_outliers: Option<usize>,
    /// Number of demographic groups.
    #[arg(long)]
    groups: Option<usize>,
    #[arg(long, value_enum)]
    group_scheme: Option<GroupSchemeArg>,
    #[arg(long, value_enum)]
    bounds_scheme: Option<BoundsSchemeArg>,
    /// Emit an explicit distance matrix instead of coordinates.
    #[arg(long)]
    matrix: bool,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON path, or "-" for stdin.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Fpt)]
    algo: Algo,
    /// Coloring strategy: auto, exhaustive, or random:<T>.
    #[arg(long, value_parser = parse_colorings)]
    colorings: Option<ColoringsArg>,
    /// Master seed for random colorings.
    #[arg(long)]
    seed: Option<u64>,
    /// Radius schedule: scan all candidates upward, or bisect.
    #[arg(long, value_enum)]
    radius: Option<RadiusArg>,
    /// Abort a search that commits more than this many branch nodes.
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Largest coloring count still enumerated exhaustively in auto mode.
    #[arg(long)]
    enum_cap: Option<u64>,
    /// Candidate-set cap for --algo oracle.
    #[arg(long)]
    oracle_cap: Option<u64>,
    /// Keep the search trace in the solution JSON.
    #[arg(long)]
    trace: bool,
    /// Check the metric axioms before solving.
    #[arg(long)]
    verify_metric: bool,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance JSON path, or "-" for stdin.
    input: PathBuf,
    /// Abort when the candidate-set count exceeds this cap.
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    cap: u64,
    /// Check the metric axioms before solving.
    #[arg(long)]
    verify_metric: bool,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance JSON path, or "-" for stdin.
    instance: PathBuf,
    /// Solution JSON path.
    solution: PathBuf,
    /// Check the metric axioms as well.
    #[arg(long)]
    verify_metric: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Number of seeded instances.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    /// First seed of the batch.
    #[arg(long, default_value_t = 0)]
    seed_start: u64,
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    z: usize,
    #[arg(long, default_value_t = 2)]
    groups: usize,
    /// Comma-separated subset of fpt,charikar,gonzalez.
    #[arg(long, default_value = "fpt")]
    algos: String,
    /// Also run the exhaustive oracle and fill the opt and ratio columns.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: u64,
    #[arg(long, value_enum, default_value_t = RadiusArg::Scan)]
    radius: RadiusArg,
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    /// Branching search over colorings; the full pipeline.
    Fpt,
    /// Unconstrained densest-ball baseline (ignores groups and roles).
    Charikar,
    /// Farthest-first baseline (ignores groups, roles and outliers).
    Gonzalez,
    /// Exhaustive optimum.
    Oracle,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Fpt => "fpt",
            Algo::Charikar => "charikar",
            Algo::Gonzalez => "gonzalez",
            Algo::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColoringsArg {
    Auto,
    Exhaustive,
    Random(u64),
}

fn parse_colorings(s: &str) -> Result<ColoringsArg, String> {
    match s {
        "auto" => Ok(ColoringsArg::Auto),
        "exhaustive" => Ok(ColoringsArg::Exhaustive),
        "random" => Err("random needs a trial count, e.g. random:100".into()),
        _ => {
            let t = s
                .strip_prefix("random:")
                .ok_or("expected auto, exhaustive, or random:<T>")?;
            let trials: u64 = t.parse().map_err(|_| format!("bad trial count {t:?}"))?;
            if trials == 0 {
                return Err("trial count must be at least 1".into());
            }
            Ok(ColoringsArg::Random(trials))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RadiusArg {
    Scan,
    Binary,
}

impl From<RadiusArg> for RadiusMode {
    fn from(r: RadiusArg) -> RadiusMode {
        match r {
            RadiusArg::Scan => RadiusMode::Scan,
            RadiusArg::Binary => RadiusMode::Binary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupSchemeArg {
    Uniform,
    Skewed,
    Forbidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundsSchemeArg {
    UpperOnly,
    FairRange,
}

/// Anything that stops a subcommand, tagged with its exit code.
enum CliError {
    Lib(Error),
    Io(String),
    Usage(String),
    Metric(MetricReport),
    Mismatch(Vec<String>),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Lib(e) => e.exit_code() as u8,
            CliError::Io(_) | CliError::Usage(_) => 1,
            CliError::Metric(_) => 2,
            CliError::Mismatch(_) => 4,
        }
    }

    fn report(&self) {
        match self {
            CliError::Lib(e) => eprintln!("error: {e}"),
            CliError::Io(m) => eprintln!("error: {m}"),
            CliError::Usage(m) => eprintln!("usage error: {m}"),
            CliError::Metric(report) => eprintln!("error: {report}"),
            CliError::Mismatch(problems) => {
                eprintln!("verification failed:");
                for p in problems {
                    eprintln!("  {p}");
                }
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let verbose = cli.verbose;
    let result = match cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Solve(a) => run_solve(a, verbose),
        Command::Oracle(a) => run_oracle(a),
        Command::Verify(a) => run_verify(a),
        Command::Bench(a) => run_bench(a, verbose),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            e.report();
            ExitCode::from(e.code())
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Io(format!("reading stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", p.display()))),
    }
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let text = read_input(path)?;
    Ok(instance_from_str(&text)?)
}

fn validated(inst: Instance) -> Result<Instance, CliError> {
    let report = inst.validate();
    if !report.ok() {
        return Err(Error::InvalidInstance(report).into());
    }
    Ok(inst)
}

fn check_metric(enabled: bool, inst: &Instance) -> Result<(), CliError> {
    if !enabled {
        return Ok(());
    }
    let report = verify_metric(inst.metric());
    if !report.is_metric() {
        return Err(CliError::Metric(report));
    }
    Ok(())
}

fn run_gen(a: GenArgs) -> Result<(), CliError> {
    let mut spec = match &a.spec {
        Some(p) => serde_json::from_str::<GenSpec>(&read_input(p)?)
            .map_err(|e| CliError::Lib(Error::Schema(format!("generator spec: {e}"))))?,
        None => GenSpec::default(),
    };
    if let Some(v) = a.seed {
        spec.seed = v;
    }
    if let Some(v) = a.n {
        spec.n = v;
    }
    if let Some(v) = a.k {
        spec.k = v;
    }
    if let Some(v) = a.z {
        spec.z = v;
    }
    if let Some(v) = a.dim {
        spec.dim = v;
    }
    if let Some(v) = a.sigma {
        spec.sigma = v;
    }
    if let Some(v) = a.delta {
        spec.delta = v;
    }
    if let Some(v) = a.displacement {
        spec.displacement = v;
    }
    if let Some(v) = a.planted_outliers {
        spec.planted_outliers = Some(v);
    }
    if let Some(v) = a.groups {
        spec.groups = v;
    }
    if let Some(v) = a.group_scheme {
        spec.group_scheme = match v {
            GroupSchemeArg::Uniform => GroupScheme::Uniform,
            GroupSchemeArg::Skewed => GroupScheme::Skewed,
            GroupSchemeArg::Forbidden => GroupScheme::Forbidden,
        };
    }
    if let Some(v) = a.bounds_scheme {
        spec.bounds_scheme = match v {
            BoundsSchemeArg::UpperOnly => BoundsScheme::UpperOnly,
            BoundsSchemeArg::FairRange => BoundsScheme::FairRange,
        };
    }
    if a.matrix {
        spec.matrix_output = true;
    }
    let inst = generate(&spec)?;
    write_output(a.output.as_deref(), &instance_to_string(&inst))
}

fn pipeline_options(a: &SolveArgs) -> PipelineOptions {
    let mut opts = PipelineOptions {
        seed: a.seed.unwrap_or(0),
        ..PipelineOptions::default()
    };
    opts.coloring = match a.colorings.unwrap_or(ColoringsArg::Auto) {
        ColoringsArg::Auto => ColoringMode::Auto,
        ColoringsArg::Exhaustive => ColoringMode::Exhaustive,
        ColoringsArg::Random(t) => ColoringMode::Random { trials: t },
    };
    if let Some(cap) = a.enum_cap {
        opts.enumeration_cap = cap;
    }
    if let Some(n) = a.max_nodes {
        opts.limits = SolveLimits { max_nodes: n };
    }
    opts.radius = a.radius.unwrap_or(RadiusArg::Scan).into();
    opts
}

/// Flags that only make sense for the branching pipeline.
fn reject_fpt_flags(a: &SolveArgs) -> Result<(), CliError> {
    let mut stray = Vec::new();
    if a.colorings.is_some() {
        stray.push("--colorings");
    }
    if a.seed.is_some() {
        stray.push("--seed");
    }
    if a.radius.is_some() {
        stray.push("--radius");
    }
    if a.max_nodes.is_some() {
        stray.push("--max-nodes");
    }
    if a.enum_cap.is_some() {
        stray.push("--enum-cap");
    }
    if a.trace {
        stray.push("--trace");
    }
    if stray.is_empty() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{} appl{} only to --algo fpt",
            stray.join(", "),
            if stray.len() == 1 { "ies" } else { "y" }
        )))
    }
}

fn run_solve(a: SolveArgs, verbose: u8) -> Result<(), CliError> {
    if a.algo != Algo::Fpt {
        reject_fpt_flags(&a)?;
    }
    if a.algo != Algo::Oracle && a.oracle_cap.is_some() {
        return Err(CliError::Usage(
            "--oracle-cap applies only to --algo oracle".into(),
        ));
    }
    let inst = load_instance(&a.input)?;
    check_metric(a.verify_metric, &inst)?;
    let solution = match a.algo {
        Algo::Fpt => {
            let opts = pipeline_options(&a);
            let result = solve_instance(&inst, &opts)?;
            if verbose > 0 {
                eprintln!("{}", result.stats);
            }
            let mut sol = result.solution;
            if !a.trace {
                sol.trace = None;
            }
            sol
        }
        Algo::Charikar => {
            let inst = validated(inst)?;
            let m = inst.metric();
            charikar(m, inst.k(), inst.z())
                .ok_or_else(|| Error::Internal("densest-ball scan found no radius".into()))?
        }
        Algo::Gonzalez => {
            let inst = validated(inst)?;
            gonzalez(inst.metric(), inst.k())
        }
        Algo::Oracle => {
            let inst = validated(inst)?;
            let cap = a.oracle_cap.unwrap_or(DEFAULT_ORACLE_CAP);
            let opt = oracle_dispatch(&inst, cap)?;
            Solution::new(opt.radius, opt.centers, opt.outliers)
        }
    };
    write_output(a.output.as_deref(), &solution_to_string(&solution))
}

fn oracle_dispatch(inst: &Instance, cap: u64) -> Result<OracleClustering, CliError> {
    match inst {
        Instance::FairKCenter(i) => Ok(brute_force_fair(i, cap)?),
        Instance::FairRange(i) => Ok(brute_force_fair_range(i, cap)?),
        Instance::Colorful(i) => Ok(brute_force_colorful(i, cap)?),
        Instance::FairSupplier(_) => Err(CliError::Usage(
            "no exhaustive reference solver for fair_supplier instances".into(),
        )),
    }
}

fn run_oracle(a: OracleArgs) -> Result<(), CliError> {
    let inst = validated(load_instance(&a.input)?)?;
    check_metric(a.verify_metric, &inst)?;
    let opt = oracle_dispatch(&inst, a.cap)?;
    let mut text = serde_json::to_string_pretty(&opt)
        .map_err(|e| CliError::Lib(Error::Internal(e.to_string())))?;
    text.push('\n');
    write_output(a.output.as_deref(), &text)
}

fn run_verify(a: VerifyArgs) -> Result<(), CliError> {
    let inst = validated(load_instance(&a.instance)?)?;
    check_metric(a.verify_metric, &inst)?;
    let sol = solution_from_str(&read_input(&a.solution)?)?;

    let mut problems = Vec::new();
    let feas = inst.is_feasible(&sol.centers);
    for v in &feas.violations {
        problems.push(format!("centers: {v:?}"));
    }

    let clients = inst.clients();
    let m = inst.metric();
    let mut is_client = vec![false; m.len()];
    for &c in &clients {
        is_client[c.idx()] = true;
    }
    if sol.outliers.len() > inst.z() {
        problems.push(format!(
            "{} outliers exceed the budget z={}",
            sol.outliers.len(),
            inst.z()
        ));
    }
    for w in sol.outliers.windows(2) {
        if w[0] >= w[1] {
            problems.push(format!("outliers not strictly ascending at {:?}", w[1]));
        }
    }
    for &o in &sol.outliers {
        if o.idx() >= m.len() || !is_client[o.idx()] {
            problems.push(format!("outlier {o:?} is not a client"));
        }
    }

    if feas.ok() {
        let canonical = cost_value(m, &clients, &sol.centers, inst.z());
        if canonical != sol.cost {
            problems.push(format!(
                "cost mismatch: claimed {}, recomputed {}",
                sol.cost, canonical
            ));
        }
        let mut worst: Option<(PointId, f64)> = None;
        for &c in &clients {
            if sol.outliers.binary_search(&c).is_ok() {
                continue;
            }
            let d = fairkc::instances::dist_to_set(m, c, &sol.centers);
            if worst.map_or(true, |(_, w)| d > w) {
                worst = Some((c, d));
            }
        }
        if let Some((c, d)) = worst {
            if d > sol.cost {
                problems.push(format!(
                    "kept client {c:?} sits at distance {d}, above the claimed cost {}",
                    sol.cost
                ));
            }
        }
    }

    if problems.is_empty() {
        println!(
            "ok: cost={} centers={} outliers={}",
            sol.cost,
            sol.centers.len(),
            sol.outliers.len()
        );
        Ok(())
    } else {
        Err(CliError::Mismatch(problems))
    }
}

fn parse_algos(s: &str) -> Result<Vec<Algo>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let algo = match part.trim() {
            "fpt" => Algo::Fpt,
            "charikar" => Algo::Charikar,
            "gonzalez" => Algo::Gonzalez,
            "oracle" => {
                return Err(CliError::Usage(
                    "use --oracle to add optimum columns instead of an oracle row".into(),
                ))
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown algorithm {other:?}; expected fpt, charikar or gonzalez"
                )))
            }
        };
        if !out.contains(&algo) {
            out.push(algo);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("--algos lists no algorithms".into()));
    }
    Ok(out)
}

fn run_bench(a: BenchArgs, verbose: u8) -> Result<(), CliError> {
    let algos = parse_algos(&a.algos)?;
    let opts = PipelineOptions {
        radius: a.radius.into(),
        limits: a
            .max_nodes
            .map(|n| SolveLimits { max_nodes: n })
            .unwrap_or_default(),
        ..PipelineOptions::default()
    };

    let mut rows: Vec<(u64, &'static str, String)> = Vec::new();
    for seed in a.seed_start..a.seed_start + a.seeds {
        let spec = GenSpec {
            seed,
            n: a.n,
            k: a.k,
            z: a.z,
            groups: a.groups,
            ..GenSpec::default()
        };
        let inst = generate(&spec)?;
        let opt = if a.oracle {
            Some(oracle_dispatch(&inst, a.oracle_cap)?.radius)
        } else {
            None
        };
        for &algo in &algos {
            let start = Instant::now();
            let (centers, nodes) = match algo {
                Algo::Fpt => {
                    let result = solve_instance(&inst, &opts)?;
                    (result.solution.centers, result.stats.nodes)
                }
                Algo::Charikar => {
                    let sol = charikar(inst.metric(), inst.k(), inst.z())
                        .ok_or_else(|| Error::Internal("densest-ball scan found no radius".into()))?;
                    (sol.centers, 0)
                }
                Algo::Gonzalez => (gonzalez(inst.metric(), inst.k()).centers, 0),
                Algo::Oracle => unreachable!("rejected by parse_algos"),
            };
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            // Every algorithm is scored the same way: the instance's cost
            // of its center set, z farthest clients dropped.
            let cost = cost_value(inst.metric(), &inst.clients(), &centers, inst.z());
            let (opt_col, ratio_col) = match opt {
                None => (String::new(), String::new()),
                Some(o) => {
                    let ratio = if o == 0.0 {
                        if cost == 0.0 {
                            1.0
                        } else {
                            f64::INFINITY
                        }
                    } else {
                        cost / o
                    };
                    (format!("{o}"), format!("{ratio:.6}"))
                }
            };
            let mut row = String::new();
            let _ = write!(
                row,
                "{seed},{n},{k},{z},{algo},{cost},{opt},{ratio},{nodes},{wall:.3}",
                n = a.n,
                k = a.k,
                z = a.z,
                algo = algo.name(),
                opt = opt_col,
                ratio = ratio_col,
                wall = wall_ms,
            );
            rows.push((seed, algo.name(), row));
            if verbose > 0 {
                eprintln!("seed {seed} {} done in {wall_ms:.1} ms", algo.name());
            }
        }
    }
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

    let mut text = String::from("seed,n,k,z,algo,cost,opt,ratio,nodes,wall_ms\n");
    for (_, _, row) in &rows {
        text.push_str(row);
        text.push('\n');
    }
    write_output(a.output.as_deref(), &text)
}

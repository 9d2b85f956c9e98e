mod formats;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use graphmerge_core::bounds::{self, BoundResult, GhzBoundInput, GraphBoundInput};
use graphmerge_core::ghzverify::{self, RoundMode, SourceModel, VerifConfig};
use graphmerge_core::graphs::CorrectionValidator;
use graphmerge_core::merge::{self, MergeRun};
use graphmerge_core::resources;
use graphmerge_core::sim::{fidelity, Backend, OutcomePolicy, StateVector, Tableau, DEFAULT_SV_CAP};
use graphmerge_core::{gf2, Graph, Partition};
use serde_json::{json, Map, Value};

use formats::{bits_string, format_matrix, parse_graph, parse_index_list, parse_matrix};

const SV_CAP_ENV: &str = "GRAPHMERGE_SV_CAP";

/// Graph-state merging, verification resources and security bounds.
///
/// Output is JSON unless --pretty is given. Exit status: 0 on success, 1 when
/// a verification check fails, 2 on usage or input errors.
#[derive(Parser, Debug)]
#[command(name = "graphmerge", version)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Human-readable table instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    pretty: bool,
    /// JSON output (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Omit the `generated_at` timestamp so output is byte-reproducible.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose a GF(2) matrix as V·[[I,R],[0,0]]·U.
    Pivot {
        /// Matrix file: one row of 0/1 per line.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Merge two copies of a graph state and optionally check the result.
    Merge {
        /// Graph file: vertex count, then one edge per line.
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated honest vertices.
        #[arg(long, default_value = "")]
        honest: String,
        /// Run every measurement branch instead of one sampled branch.
        #[arg(long)]
        enumerate: bool,
        /// Compare every output with a freshly prepared graph state.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = BackendKind::Tableau)]
        backend: BackendKind,
    },
    /// Check that every accepted correction completes to a stabilizer.
    TwirlCheck {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated honest vertices; all partitions when omitted.
        #[arg(long)]
        honest: Option<String>,
    },
    /// Simulate the GHZ verification protocol.
    VerifyGhz {
        #[arg(long)]
        n: usize,
        /// Security parameter: output rounds occur with probability 2^-S.
        #[arg(long = "S")]
        s: u32,
        /// Source emits cos θ|0…0⟩ + sin θ|1…1⟩; honest GHZ source when omitted.
        #[arg(long)]
        theta: Option<f64>,
        /// Independent test rounds used for the reject-rate estimate.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Complete protocol executions used for the rounds-per-output figure.
        #[arg(long, default_value_t = 20)]
        runs: u64,
        /// Sample the S-bit output test every round instead of a geometric draw.
        #[arg(long)]
        exact_loop: bool,
    },
    /// Security-parameter calculators.
    Bounds {
        #[command(subcommand)]
        which: BoundsCommand,
    },
    /// Bell-pair distinguisher against a black-box simulator.
    ImpossibilityDemo {
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Exhaustive merge and twirl checks over all graphs with n ≤ 4.
    Selftest,
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// ε = (4n+1)/2^{S/2}.
    Ghz {
        #[arg(long)]
        n: u64,
        #[arg(long = "S")]
        s: u32,
    },
    /// ε = 1 − p₀ + 2η₀ − η₀².
    Graph {
        #[arg(long = "J")]
        j: u64,
        #[arg(long)]
        lambda: u64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    Tableau,
    Statevector,
}

impl BackendKind {
    fn name(self) -> &'static str {
        match self {
            BackendKind::Tableau => "tableau",
            BackendKind::Statevector => "statevector",
        }
    }
}

/// A report plus whether its checks held.
struct Report {
    body: Map<String, Value>,
    ok: bool,
}

impl Report {
    fn ok(body: Value) -> Self {
        Report::new(body, true)
    }

    fn new(body: Value, ok: bool) -> Self {
        let Value::Object(body) = body else {
            unreachable!("reports are JSON objects")
        };
        Report { body, ok }
    }
}

type CliResult = Result<Report, String>;

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph, String> {
    parse_graph(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn sv_cap() -> Result<usize, String> {
    match std::env::var(SV_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{SV_CAP_ENV}={v:?} is not a qubit count")),
        Err(_) => Ok(DEFAULT_SV_CAP),
    }
}

fn core_err(e: graphmerge_core::Error) -> String {
    e.to_string()
}

fn pivot(input: &Path) -> CliResult {
    let gamma = parse_matrix(&read(input)?).map_err(|e| format!("{}: {e}", input.display()))?;
    let d = gf2::pivot_decompose(&gamma);
    Ok(Report::ok(json!({
        "rows": gamma.rows(),
        "cols": gamma.cols(),
        "r": d.rank,
        "U": format_matrix(&d.u),
        "V": format_matrix(&d.v),
        "R": format_matrix(&d.r),
        "reconstructed": d.reconstruct() == gamma,
    })))
}

fn run_json<B>(run: &MergeRun<B>) -> Value {
    let o = &run.outcome;
    json!({
        "outcome": {
            "a": bits_string(&o.a),
            "b": bits_string(&o.b),
            "c": bits_string(&o.c),
            "d": bits_string(&o.d),
        },
        "correction": { "x": bits_string(&o.correction.x), "z": bits_string(&o.correction.z) },
        "probability": run.probability,
    })
}

fn merge_on<B: Backend>(
    plan: &merge::MergePlan,
    blank: B,
    seed: u64,
    enumerate: bool,
    same: impl Fn(&B, &B) -> bool,
) -> Result<(Value, Option<bool>), String> {
    let g = plan.graph();
    let reference = merge::reference_state(g, &plan.output_qubits(), blank.clone()).map_err(core_err)?;
    if enumerate {
        let runs = merge::merge_branches(plan, &blank).map_err(core_err)?;
        let verified = runs.iter().all(|r| same(&r.state, &reference));
        let corrections: BTreeSet<(String, String)> = runs
            .iter()
            .map(|r| {
                (
                    bits_string(&r.outcome.correction.x),
                    bits_string(&r.outcome.correction.z),
                )
            })
            .collect();
        let body = json!({
            "branches": runs.len(),
            "total_probability": runs.iter().map(|r| r.probability).sum::<f64>(),
            "distinct_corrections": corrections.len(),
        });
        Ok((body, Some(verified)))
    } else {
        let run = merge::merge_full(plan, blank, &mut OutcomePolicy::random(seed)).map_err(core_err)?;
        let verified = same(&run.state, &reference);
        let mut body = run_json(&run);
        body["branches"] = json!(1);
        Ok((body, Some(verified)))
    }
}

fn merge_cmd(cli: &Cli, graph: &Path, honest: &str, enumerate: bool, oracle: bool, backend: BackendKind) -> CliResult {
    let g = load_graph(graph)?;
    let honest = parse_index_list(honest).map_err(|e| format!("--honest: {e}"))?;
    let p = Partition::new(g.n(), &honest).map_err(core_err)?;
    let plan = merge::plan(&g, &p).map_err(core_err)?;
    let n = g.n();
    let (mut body, verified) = match backend {
        BackendKind::Tableau => merge_on(&plan, Tableau::new(2 * n), cli.seed, enumerate, |a, b| {
            a.canonical_form() == b.canonical_form()
        })?,
        BackendKind::Statevector => {
            let blank = StateVector::zeros_with_cap(2 * n, sv_cap()?).map_err(core_err)?;
            merge_on(&plan, blank, cli.seed, enumerate, |a, b| {
                fidelity(a, b).map(|f| f >= 1.0 - 1e-9).unwrap_or(false)
            })?
        }
    };
    body["n"] = json!(n);
    body["honest"] = json!(p.honest());
    body["malicious"] = json!(p.malicious());
    body["rank"] = json!(plan.pivot().rank);
    body["backend"] = json!(backend.name());
    body["output_qubits"] = json!(plan.output_qubits());
    let ok = if oracle { verified.unwrap_or(true) } else { true };
    if oracle {
        body["verified"] = json!(ok);
    }
    Ok(Report::new(body, ok))
}

/// Accepted corrections of `(g, p)` whose completion is not a stabilizer.
fn twirl_failures(g: &Graph, p: &Partition) -> Result<(usize, usize), String> {
    let reference = Tableau::graph_state(g).canonical_form();
    let accepted = CorrectionValidator::new(g, p).map_err(core_err)?.accepted_set();
    let mut failures = 0;
    for corr in &accepted {
        let good = resources::complete_correction(g, p, &corr.x, &corr.z)
            .ok()
            .and_then(|x| {
                let gx = g.adjacency().mul_vec(&x).ok()?;
                let mut t = Tableau::graph_state(g);
                for q in 0..g.n() {
                    if gx.get(q) {
                        t.z(q);
                    }
                    if x.get(q) {
                        t.x(q);
                    }
                }
                let matches = p.restrict_honest(&gx) == corr.z && t.canonical_form() == reference;
                Some(matches)
            })
            .unwrap_or(false);
        failures += usize::from(!good);
    }
    Ok((accepted.len(), failures))
}

fn twirl_check(graph: &Path, honest: Option<&str>) -> CliResult {
    let g = load_graph(graph)?;
    let partitions: Vec<Partition> = match honest {
        Some(h) => {
            let h = parse_index_list(h).map_err(|e| format!("--honest: {e}"))?;
            vec![Partition::new(g.n(), &h).map_err(core_err)?]
        }
        None if g.n() <= 16 => Partition::enumerate(g.n()).collect(),
        None => return Err("more than 16 vertices: pass --honest".into()),
    };
    let (mut accepted, mut failures) = (0, 0);
    for p in &partitions {
        let (a, f) = twirl_failures(&g, p)?;
        accepted += a;
        failures += f;
    }
    Ok(Report::new(
        json!({
            "n": g.n(),
            "partitions": partitions.len(),
            "accepted_corrections": accepted,
            "failures": failures,
            "verified": failures == 0,
        }),
        failures == 0,
    ))
}

fn verify_ghz(cli: &Cli, n: usize, s: u32, theta: Option<f64>, trials: u64, runs: u64, exact_loop: bool) -> CliResult {
    let source = match theta {
        Some(theta) => SourceModel::PureState { theta },
        None => SourceModel::Honest,
    };
    let state = match theta {
        Some(t) => ghzverify::theta_state(n, t),
        None => StateVector::ghz(n),
    }
    .map_err(core_err)?;
    let tau = ghzverify::tau_pure(&state, &BTreeMap::new()).map_err(core_err)?;
    let mut cfg = VerifConfig::new(n, s, cli.seed, runs.max(1));
    cfg.source = source;
    cfg.mode = if exact_loop {
        RoundMode::ExactLoop
    } else {
        RoundMode::Geometric
    };
    let sampled = ghzverify::sample_test_rounds(&cfg, trials).map_err(core_err)?;
    let protocol = ghzverify::run_protocol(&cfg).map_err(core_err)?.stats;
    let exact = if n <= 16 {
        Some(ghzverify::exact_reject_rate(&state).map_err(core_err)?)
    } else {
        None
    };
    Ok(Report::ok(json!({
        "n": n,
        "S": s,
        "theta": theta,
        "tau": tau,
        "predicted": tau * tau / 4.0,
        "exact_reject_rate": exact,
        "reject_rate": sampled.reject_rate(),
        "sigma": sampled.sigma(),
        "ci95": sampled.ci95(),
        "test_rounds": sampled.test_rounds(),
        "rejects": sampled.rejects,
        "runs": protocol.outputs + protocol.rejects,
        "outputs": protocol.outputs,
        "aborts": protocol.rejects,
        "rounds": protocol.rounds,
        "rounds_per_output": protocol.rounds_per_output(),
    })))
}

fn bound_json(r: &BoundResult) -> Value {
    let components: Map<String, Value> = r.components.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    json!({
        "epsilon": r.epsilon,
        "exact": r.exact.as_ref().map(|q| q.to_string()),
        "realization_epsilon": r.realization_epsilon,
        "out_of_range": r.out_of_range,
        "components": components,
    })
}

fn bounds_cmd(which: &BoundsCommand) -> CliResult {
    match *which {
        BoundsCommand::Ghz { n, s } => {
            let r = bounds::ghz_epsilon(GhzBoundInput { n, s }).map_err(core_err)?;
            let mut body = bound_json(&r);
            body["n"] = json!(n);
            body["S"] = json!(s);
            Ok(Report::ok(body))
        }
        BoundsCommand::Graph { j, lambda, c, m, n } => {
            let input = GraphBoundInput { j, lambda, c, m, n };
            let r = bounds::graph_epsilon(input).map_err(core_err)?;
            let fixed = bounds::graph_epsilon_fixed(input).map_err(core_err)?;
            let mut body = bound_json(&r);
            body["J"] = json!(j);
            body["lambda"] = json!(lambda);
            body["c"] = json!(c);
            body["m"] = json!(m);
            body["n"] = json!(n);
            body["fixed_point_epsilon"] = json!(fixed.epsilon);
            Ok(Report::ok(body))
        }
    }
}

fn impossibility(cli: &Cli, trials: u64) -> CliResult {
    let r = resources::impossibility_demo(trials, cli.seed).map_err(core_err)?;
    Ok(Report::ok(json!({
        "trials": r.trials,
        "real_equal_rate": r.real_equal_rate,
        "ideal_equal_rate": r.ideal_equal_rate,
        "advantage": r.advantage,
        "ci95": r.ci95,
    })))
}

fn selftest() -> CliResult {
    let (mut cases, mut failed) = (0usize, 0usize);
    let (mut twirl_cases, mut twirl_failed) = (0usize, 0usize);
    for n in 1..=4 {
        for g in Graph::enumerate(n) {
            for p in Partition::enumerate(n) {
                let plan = merge::plan(&g, &p).map_err(core_err)?;
                let (_, tab_ok) = merge_on(&plan, Tableau::new(2 * n), 0, true, |a, b| {
                    a.canonical_form() == b.canonical_form()
                })?;
                let blank = StateVector::zeros(2 * n).map_err(core_err)?;
                let (_, sv_ok) = merge_on(&plan, blank, 0, true, |a, b| {
                    fidelity(a, b).map(|f| f >= 1.0 - 1e-9).unwrap_or(false)
                })?;
                cases += 1;
                failed += usize::from(tab_ok != Some(true) || sv_ok != Some(true));
                let (a, f) = twirl_failures(&g, &p)?;
                twirl_cases += a;
                twirl_failed += f;
            }
        }
    }
    let ok = failed == 0 && twirl_failed == 0;
    Ok(Report::new(
        json!({
            "merge_cases": cases,
            "merge_passed": cases - failed,
            "merge_failed": failed,
            "twirl_cases": twirl_cases,
            "twirl_passed": twirl_cases - twirl_failed,
            "twirl_failed": twirl_failed,
            "passed": ok,
        }),
        ok,
    ))
}

fn dispatch(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Pivot { input } => pivot(input),
        Command::Merge {
            graph,
            honest,
            enumerate,
            oracle,
            backend,
        } => merge_cmd(cli, graph, honest, *enumerate, *oracle, *backend),
        Command::TwirlCheck { graph, honest } => twirl_check(graph, honest.as_deref()),
        Command::VerifyGhz {
            n,
            s,
            theta,
            trials,
            runs,
            exact_loop,
        } => verify_ghz(cli, *n, *s, *theta, *trials, *runs, *exact_loop),
        Command::Bounds { which } => bounds_cmd(which),
        Command::ImpossibilityDemo { trials } => impossibility(cli, *trials),
        Command::Selftest => selftest(),
    }
}

fn render_pretty(body: &Map<String, Value>) -> String {
    let width = body.keys().map(String::len).max().unwrap_or(0);
    body.iter()
        .map(|(k, v)| {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            format!("{k:<width$}  {shown}\n")
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(mut report) => {
            if !cli.deterministic {
                let now = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                report.body.insert("generated_at".into(), json!(now));
            }
            if cli.pretty {
                print!("{}", render_pretty(&report.body));
            } else {
                println!("{}", Value::Object(report.body));
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

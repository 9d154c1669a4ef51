// SPDX-License-Identifier: Apache-2.0

//! `kolmonet`: batch reports over description systems, networks, games and
//! compressor proxies.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use kolmonet::games::{
    render_transcript, replay, run_game, Adversary, GameSpec, GreedyAdversary, RandomAdversary, RandomPolicy,
    ScriptedAdversary, Theorem,
};
use kolmonet::identities::{bundled_checks, NumericSettings, MAX_VARIABLES};
use kolmonet::networks::{
    c_model, cut_bound, feasibility, metrics, minimal_value_formulas, Instance, Objective, ProfileValues, Topology,
    TransmissionPair,
};
use kolmonet::proxy::{ncd_report, proxy_metrics, Corpus, DeflateCompressor, Proxy, DEFAULT_SIZE_CAP};
use kolmonet::search::{
    consistent_pair_witness, enumerate_feasible, exact_f_min, info_distance_witness, pareto_frontier, SearchBudget,
    DEFAULT_WITNESS_SLACK,
};
use kolmonet::system::TAB_OVERHEAD;
use kolmonet::{BitString, ComplexityOracle, DescriptionSystem, ProgramBudget};

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "kolmonet", version, about = "Exact complexity, network and game reports")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact C(u|v) with a shortest program.
    Complexity(ComplexityArgs),
    /// Exact checks of the bundled identities and certificates.
    Identities(IdentitiesArgs),
    /// Network feasibility, metrics, bounds, search and witnesses.
    #[command(subcommand)]
    Net(NetCommand),
    /// Constructor-versus-enumerator games.
    #[command(subcommand)]
    Game(GameCommand),
    /// Compressor-based estimates on files.
    #[command(subcommand)]
    Proxy(ProxyCommand),
}

#[derive(Args, Debug)]
struct ComplexityArgs {
    /// Table file, tab-separated `r condition output` per line; table-free
    /// when omitted.
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long)]
    u: BitString,
    #[arg(long, default_value = "-")]
    v: BitString,
    /// Absolute program-length budget; default is |u|+8.
    #[arg(long)]
    budget: Option<u32>,
}

#[derive(Args, Debug)]
struct IdentitiesArgs {
    /// Run the bundled item list.
    #[arg(long, required = true)]
    bundle: bool,
    /// Random distributions per item for the numeric cross-check; 0 skips it.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct NetCommon {
    #[arg(long)]
    topology: Topology,
    /// Instance file with `w=`, `x=`, `y=`, `z=` lines.
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Subcommand, Debug)]
enum NetCommand {
    Analyze {
        #[command(flatten)]
        net: NetCommon,
        #[arg(long)]
        epsilon: i64,
        /// `p,q` bit strings; `-` is the empty string.
        #[arg(long)]
        pair: Option<String>,
    },
    Search {
        #[command(flatten)]
        net: NetCommon,
        #[arg(long)]
        epsilon: i64,
        /// Comma-separated: cp, cq, cpq, total, private.
        #[arg(long, value_delimiter = ',', default_value = "cp,cq,cpq,private")]
        objectives: Vec<Objective>,
        /// Maximum program length.
        #[arg(long, default_value_t = 6)]
        budget: usize,
        #[arg(long)]
        max_pairs: Option<u64>,
    },
    Witness {
        #[arg(long)]
        kind: WitnessKind,
        #[arg(long)]
        instance: PathBuf,
        /// Maximum program length.
        #[arg(long, default_value_t = 6)]
        budget: usize,
        /// Decoding slack for `muchnik`.
        #[arg(long, default_value_t = DEFAULT_WITNESS_SLACK)]
        slack: i64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum WitnessKind {
    Infodist,
    Muchnik,
    Fmin,
}

#[derive(Subcommand, Debug)]
enum GameCommand {
    Run {
        #[command(flatten)]
        spec: SpecArgs,
        /// n,m,k,j overriding the construction's formulas.
        #[arg(long, value_delimiter = ',', num_args = 4)]
        params: Option<Vec<u32>>,
        /// `random`, `greedy` or `script:FILE`.
        #[arg(long, default_value = "random")]
        adversary: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        horizon: Option<u64>,
        /// Transcript path; defaults to a name derived from the config.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    Params {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Re-runs a transcript's events and compares it line by line.
    Replay {
        #[arg(long)]
        transcript: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SpecArgs {
    #[arg(long)]
    theorem: Theorem,
    #[arg(long)]
    epsilon: u32,
    #[arg(long, default_value_t = 0)]
    l: u32,
}

#[derive(Subcommand, Debug)]
enum ProxyCommand {
    Ncd {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: usize,
    },
    Metrics {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "c")]
        topology: Topology,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: usize,
    },
}

type CliResult = Result<Report, String>;

fn main() -> ExitCode {
    kolmonet::configure_threads_from_env();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(report) => {
            let text = report.render();
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, &text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Complexity(a) => complexity(a),
        Command::Identities(a) => identities(a),
        Command::Net(c) => match c {
            NetCommand::Analyze { net, epsilon, pair } => analyze(net, epsilon, pair),
            NetCommand::Search {
                net,
                epsilon,
                objectives,
                budget,
                max_pairs,
            } => search(net, epsilon, objectives, budget, max_pairs),
            NetCommand::Witness {
                kind,
                instance,
                budget,
                slack,
            } => witness(kind, &instance, budget, slack),
        },
        Command::Game(c) => match c {
            GameCommand::Run {
                spec,
                params,
                adversary,
                seed,
                horizon,
                transcript,
            } => game_run(spec, params, &adversary, seed, horizon, transcript),
            GameCommand::Params { spec } => game_params(spec),
            GameCommand::Replay { transcript } => game_replay(&transcript),
        },
        Command::Proxy(c) => match c {
            ProxyCommand::Ncd { corpus, cap } => proxy_ncd(&corpus, cap),
            ProxyCommand::Metrics { corpus, topology, cap } => proxy_metrics_cmd(&corpus, topology, cap),
        },
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn load_instance(path: &Path) -> Result<Instance, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Instance::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn complexity(a: ComplexityArgs) -> CliResult {
    let system = match &a.system {
        Some(p) => DescriptionSystem::load_table(p).map_err(err)?,
        None => DescriptionSystem::new(),
    };
    let mut oracle = ComplexityOracle::new(system);
    if let Some(b) = a.budget {
        oracle = oracle.with_budget(ProgramBudget::Absolute(b));
    }
    let value = oracle.complexity(&a.u, &a.v);
    let mut r = Report::new("complexity");
    r.config("system", a.system.as_ref().map(|p| p.display().to_string()))
        .config("u", &a.u)
        .config("v", &a.v)
        .config("budget", oracle.budget())
        .constant("tab_overhead", TAB_OVERHEAD)
        .result(json!({
            "complexity": value,
            "witness": oracle.witness(&a.u, &a.v),
        }));
    if value.value().is_none() {
        r.warn("value is above the program budget");
    }
    Ok(r)
}

fn identities(a: IdentitiesArgs) -> CliResult {
    let numeric = (a.trials > 0).then(|| NumericSettings {
        trials: a.trials,
        seed: a.seed,
        ..NumericSettings::default()
    });
    let report = bundled_checks(MAX_VARIABLES, numeric).map_err(err)?;
    let mut r = Report::new("identities --bundle");
    r.seed = Some(a.seed);
    r.config("trials", a.trials)
        .config("max_variables", MAX_VARIABLES)
        .constant("numeric_tolerance", NumericSettings::default().tolerance)
        .fail_if(!report.passed())
        .result(&report);
    Ok(r)
}

fn parse_pair(text: &str, topology: Topology) -> Result<TransmissionPair, String> {
    let mut parts = text.split(',');
    let p: BitString = parts.next().unwrap_or("-").parse().map_err(err)?;
    let q: BitString = match parts.next() {
        Some(q) => q.parse().map_err(err)?,
        None if topology.channel_count() == 1 => BitString::empty(),
        None => return Err("--pair needs p,q for a two-channel topology".to_string()),
    };
    if parts.next().is_some() {
        return Err("--pair takes at most two strings".to_string());
    }
    Ok(TransmissionPair::new(p, q))
}

fn all_cuts(topology: Topology) -> Vec<Vec<u8>> {
    let ids: Vec<u8> = topology.nodes().iter().map(|n| n.id).collect();
    (1u32..1 << ids.len())
        .map(|mask| {
            ids.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &id)| id)
                .collect()
        })
        .collect()
}

fn analyze(net: NetCommon, epsilon: i64, pair: Option<String>) -> CliResult {
    let inst = load_instance(&net.instance)?;
    let t = net.topology;
    let oracle = ComplexityOracle::table_free();
    let cm = c_model(inst.max_len());
    let cuts = all_cuts(t)
        .iter()
        .map(|c| cut_bound(t, c, &inst, epsilon, &oracle, cm))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let formulas = minimal_value_formulas(t, &ProfileValues::from_oracle(&inst, &oracle)).map_err(err)?;
    let mut r = Report::new("net analyze");
    r.config("topology", t)
        .config("instance", &inst)
        .config("epsilon", epsilon)
        .config("pair", &pair)
        .config("oracle_budget", oracle.budget())
        .constant("c_model", cm);
    let mut result = json!({ "cut_bounds": cuts, "minimal_values": formulas });
    if let Some(text) = pair {
        let pair = parse_pair(&text, t)?;
        let f = feasibility(t, &inst, &pair, epsilon, &oracle).map_err(err)?;
        if f.above_budget {
            r.warn("a transmission condition exceeded the oracle budget");
        }
        if !f.feasible {
            r.warn("the pair is not feasible at this epsilon");
        }
        result["feasibility"] = report::to_value(&f);
        result["metrics"] = report::to_value(metrics(t, &inst, &pair, &oracle));
    }
    r.result(result);
    Ok(r)
}

fn search(
    net: NetCommon,
    epsilon: i64,
    objectives: Vec<Objective>,
    budget: usize,
    max_pairs: Option<u64>,
) -> CliResult {
    let inst = load_instance(&net.instance)?;
    let oracle = ComplexityOracle::table_free();
    let mut b = SearchBudget::programs(budget);
    if let Some(n) = max_pairs {
        b = b.with_max_pairs(n);
    }
    let set = enumerate_feasible(net.topology, &inst, epsilon, &oracle, &b).map_err(err)?;
    let mut r = Report::new("net search");
    r.config("topology", net.topology)
        .config("instance", &inst)
        .config("epsilon", epsilon)
        .config("objectives", &objectives)
        .config("budget", b)
        .constant("c_model", c_model(inst.max_len()));
    if set.partial {
        r.warn("enumeration stopped at the pair budget; the frontier is partial");
    }
    if set.points.is_empty() {
        r.warn("no feasible pair within the budget");
        r.result(json!({ "feasible": 0, "pairs_examined": set.pairs_examined, "frontier": null }));
        return Ok(r);
    }
    let frontier = pareto_frontier(&set.points, &objectives).map_err(err)?;
    r.result(json!({
        "feasible": set.points.len(),
        "pairs_examined": set.pairs_examined,
        "frontier": frontier,
        "simultaneous_minimum": frontier.simultaneous.is_some(),
    }));
    Ok(r)
}

fn witness(kind: WitnessKind, instance: &Path, budget: usize, slack: i64) -> CliResult {
    let inst = load_instance(instance)?;
    let oracle = ComplexityOracle::table_free();
    let b = SearchBudget::programs(budget);
    let result = match kind {
        WitnessKind::Infodist => report::to_value(info_distance_witness(&oracle, &inst.x, &inst.y, &b).map_err(err)?),
        WitnessKind::Muchnik => {
            report::to_value(consistent_pair_witness(&oracle, &inst.x, &inst.y, &inst.z, slack, &b).map_err(err)?)
        }
        WitnessKind::Fmin => {
            report::to_value(exact_f_min(&oracle, &inst.x, &inst.y, &inst.z, &inst.w, &b).map_err(err)?)
        }
    };
    let mut r = Report::new("net witness");
    r.config("kind", kind)
        .config("instance", &inst)
        .config("budget", b)
        .config("slack", slack);
    if result["outcome"] == "absent" {
        r.warn("no witness within the program budget");
    }
    r.result(result);
    Ok(r)
}

fn build_spec(a: &SpecArgs, params: Option<&[u32]>) -> GameSpec {
    let mut spec = GameSpec::standard(a.theorem, a.epsilon, a.l);
    if let Some(&[n, m, k, j]) = params {
        spec.n = n;
        spec.m = m;
        spec.k = k;
        spec.j = j;
        spec.horizon = spec.default_horizon();
    }
    spec
}

fn game_params(a: SpecArgs) -> CliResult {
    let spec = build_spec(&a, None);
    let table = spec.inequalities();
    let ok = table.iter().all(|c| c.holds);
    let mut r = Report::new("game params");
    r.config("theorem", a.theorem)
        .config("epsilon", a.epsilon)
        .config("l", a.l)
        .constant("break_bound", spec.break_bound().to_string())
        .constant("default_horizon", spec.default_horizon())
        .fail_if(!ok)
        .result(json!({
            "n": spec.n,
            "m": spec.m,
            "k": spec.k,
            "j": spec.j,
            "l": spec.l,
            "inequalities": table,
            "all_hold": ok,
        }));
    Ok(r)
}

fn game_run(
    a: SpecArgs,
    params: Option<Vec<u32>>,
    adversary: &str,
    seed: u64,
    horizon: Option<u64>,
    transcript: Option<PathBuf>,
) -> CliResult {
    let mut spec = build_spec(&a, params.as_deref());
    if let Some(h) = horizon {
        spec = spec.with_horizon(h);
    }
    spec.check().map_err(err)?;
    let mut adv: Box<dyn Adversary> = match adversary {
        "random" => Box::new(RandomAdversary::new(seed, RandomPolicy::default())),
        "greedy" => Box::new(GreedyAdversary::new()),
        other => match other.strip_prefix("script:") {
            Some(path) => Box::new(ScriptedAdversary::from_file(Path::new(path)).map_err(err)?),
            None => {
                return Err(format!(
                    "unknown adversary {other:?}; expected random, greedy or script:FILE"
                ))
            }
        },
    };
    let (state, report) = run_game(spec, seed, adv.as_mut()).map_err(err)?;
    let path = transcript.unwrap_or_else(|| {
        let name = adversary.split(':').next().unwrap_or("script");
        PathBuf::from(format!("{}-e{}-l{}-{name}-s{seed}.jsonl", a.theorem, a.epsilon, a.l).to_ascii_lowercase())
    });
    fs::write(&path, render_transcript(state.transcript())).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut r = Report::new("game run");
    r.seed = Some(seed);
    r.config("spec", spec)
        .config("adversary", adversary)
        .constant("break_bound", spec.break_bound().to_string())
        .constant("a_overhead", report.a_overhead)
        .fail_if(!report.sound())
        .result(json!({ "transcript": path.display().to_string(), "report": report }));
    if report.capacity_exhausted {
        r.warn("the constructor ran out of keys under some condition");
    }
    Ok(r)
}

fn game_replay(path: &Path) -> CliResult {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let (_, rep) = replay(&text).map_err(err)?;
    let mut r = Report::new("game replay");
    r.config("transcript", path.display().to_string())
        .fail_if(!rep.identical)
        .result(&rep);
    Ok(r)
}

fn proxy_ncd(corpus: &Path, cap: usize) -> CliResult {
    let c = Corpus::load(corpus).map_err(err)?;
    let d = DeflateCompressor;
    let report = ncd_report(&c, &Proxy::new(&d).with_cap(cap)).map_err(err)?;
    let mut r = Report::new("proxy ncd");
    r.config("corpus", corpus.display().to_string())
        .config("cap", cap)
        .warn("proxy estimates, not exact complexities")
        .result(&report);
    Ok(r)
}

fn proxy_metrics_cmd(corpus: &Path, topology: Topology, cap: usize) -> CliResult {
    let c = Corpus::load(corpus).map_err(err)?;
    let (strings, pair) = c.strings_and_pair().map_err(err)?;
    let d = DeflateCompressor;
    let m = proxy_metrics(topology, &strings, &pair, &Proxy::new(&d).with_cap(cap)).map_err(err)?;
    let mut r = Report::new("proxy metrics");
    r.config("corpus", corpus.display().to_string())
        .config("topology", topology)
        .config("cap", cap)
        .warn("proxy estimates, not exact complexities")
        .result(&m);
    Ok(r)
}

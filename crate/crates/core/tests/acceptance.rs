// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria 1-8. Prints one line per criterion and exits nonzero
//! if any fails. Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test -p kolmonet --test acceptance -- 4 5`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use kolmonet::games::{
    corner_scripts, count_violations, render_transcript, replay, run_game_with, Adversary, ConditionId, GameReport,
    GameSpec, GameState, GreedyAdversary, RandomAdversary, RandomPolicy, ScriptedAdversary, Theorem,
};
use kolmonet::identities::{bundled_checks, ItemStatus, NumericSettings, MAX_VARIABLES};
use kolmonet::networks::{
    all_instances, c_model, cut_bound, feasibility, metrics, minimal_value_formulas, FormulaValue, Objective,
    ProfileValues, Topology, TransmissionPair,
};
use kolmonet::oracle::Quantity;
use kolmonet::proxy::{ncd_report, Corpus, DeflateCompressor, Proxy};
use kolmonet::search::{
    consistent_pair_witness, enumerate_feasible, exact_f_min, info_distance_witness, pareto_frontier, ParetoPoint,
    SearchBudget,
};
use kolmonet::{decode_pair, encode_pair, BitString, ComplexityOracle, RunOutcome};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    kolmonet::configure_threads_from_env();
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria = [
        Criterion {
            id: 1,
            name: "symbolic bundle",
            limit: Some(Duration::from_secs(10)),
            run: c1_bundle,
        },
        Criterion {
            id: 2,
            name: "oracle exhaustives",
            limit: Some(Duration::from_secs(120)),
            run: c2_oracle,
        },
        Criterion {
            id: 3,
            name: "cut-bound soundness",
            limit: Some(Duration::from_secs(600)),
            run: c3_cuts,
        },
        Criterion {
            id: 4,
            name: "game soundness",
            limit: Some(Duration::from_secs(900)),
            run: c4_games,
        },
        Criterion {
            id: 5,
            name: "counting lemmas",
            limit: None,
            run: c5_counting,
        },
        Criterion {
            id: 6,
            name: "search correctness",
            limit: Some(Duration::from_secs(300)),
            run: c6_search,
        },
        Criterion {
            id: 7,
            name: "formula layer",
            limit: None,
            run: c7_formulas,
        },
        Criterion {
            id: 8,
            name: "proxy sanity",
            limit: Some(Duration::from_secs(60)),
            run: c8_proxy,
        },
    ];
    let mut failed = 0;
    for c in criteria.iter().filter(|c| wanted.is_empty() || wanted.contains(&c.id)) {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(detail), Some(limit)) = (&outcome, c.limit) {
            if elapsed > limit {
                outcome = Err(format!("{detail}; over the {}s limit", limit.as_secs()));
            }
        }
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {} {:<20} {tag} {:>8.2}s  {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_bundle() -> Outcome {
    let settings = NumericSettings::default();
    let report = bundled_checks(MAX_VARIABLES, Some(settings)).map_err(|e| e.to_string())?;
    ensure(report.passed(), || format!("halted at {:?}", report.halted_at))?;
    for required in [
        "cut lemma",
        "transmission lemma difference",
        "minimal program inequality",
        "joint information split",
    ] {
        ensure(report.items.iter().any(|i| i.name == required), || {
            format!("missing item {required}")
        })?;
    }
    let mut worst = 0.0f64;
    for item in &report.items {
        ensure(item.status == ItemStatus::Pass, || {
            format!("{} is {:?}", item.name, item.status)
        })?;
        let num = item
            .numeric
            .as_ref()
            .ok_or_else(|| format!("{} has no numeric check", item.name))?;
        ensure(num.trials == settings.trials, || {
            format!("{}: {} trials", item.name, num.trials)
        })?;
        if item.kind == "identity" {
            ensure(num.max_abs < 1e-9, || {
                format!("{}: residual {:e}", item.name, num.max_abs)
            })?;
            worst = worst.max(num.max_abs);
        } else {
            ensure(num.min > -1e-9, || format!("{}: min {:e}", item.name, num.min))?;
        }
    }
    Ok(format!(
        "{} items exact, {} distributions each, max identity residual {worst:.1e}",
        report.items.len(),
        settings.trials
    ))
}

fn c2_oracle() -> Outcome {
    let o = ComplexityOracle::table_free();
    let strings: Vec<BitString> = BitString::all_up_to(6).collect();
    let violations: Vec<String> = strings
        .par_iter()
        .flat_map_iter(|v| {
            let mut out = Vec::new();
            let mut levels = [0u64; 8];
            for u in &strings {
                match o.complexity(u, v).value() {
                    Some(c) if c <= u.len() as i64 + 1 => {
                        for (l, slot) in levels.iter_mut().enumerate() {
                            if c <= l as i64 {
                                *slot += 1;
                            }
                        }
                    }
                    other => out.push(format!("C({u}|{v}) = {other:?}")),
                }
            }
            if !o.complexity(v, v).value().is_some_and(|c| c <= 2) {
                out.push(format!("C({v}|{v}) > 2"));
            }
            for (l, &count) in levels.iter().enumerate() {
                if count > (1u64 << (l + 1)) - 1 {
                    out.push(format!("{count} strings at level {l} given {v}"));
                }
            }
            out
        })
        .collect();
    ensure(violations.is_empty(), || {
        violations[..violations.len().min(3)].join("; ")
    })?;

    let mut pairs = 0u64;
    for total in 0..=10usize {
        for lx in 0..=total {
            for x in BitString::all_of_length(lx) {
                for y in BitString::all_of_length(total - lx) {
                    let p = encode_pair(&x, &y);
                    ensure(decode_pair(&p).ok() == Some((x.clone(), y.clone())), || {
                        format!("pair {x},{y}")
                    })?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!(
        "{} (u,v) queries, pairing round-trip on {pairs} pairs",
        strings.len() * strings.len()
    ))
}

/// Largest cut bound against the least total disclosure over every feasible
/// pair; cut bounds do not depend on the pair.
fn c3_cuts() -> Outcome {
    let o = ComplexityOracle::table_free();
    let budget = SearchBudget::programs(8);
    let plan: [(Topology, &[i64]); 6] = [
        (Topology::A, &[5]),
        (Topology::B, &[5, 6]),
        (Topology::C, &[5, 6]),
        (Topology::D, &[5, 6]),
        (Topology::E, &[5, 6]),
        (Topology::F, &[5, 6]),
    ];
    let mut lines = Vec::new();
    let mut worst_overall = i64::MIN;
    for (t, epsilons) in plan {
        let instances = all_instances(t.all_roles(), 3);
        let ids: Vec<u8> = t.nodes().iter().map(|n| n.id).collect();
        let cuts: Vec<Vec<u8>> = (1u32..1 << ids.len())
            .map(|m| {
                ids.iter()
                    .enumerate()
                    .filter(|(i, _)| m >> i & 1 == 1)
                    .map(|(_, &d)| d)
                    .collect()
            })
            .collect();
        for &eps in epsilons {
            let stats = Mutex::new((0u64, 0u64, 0u64, i64::MIN));
            let failures: Vec<String> = instances
                .par_iter()
                .filter_map(|inst| {
                    let cm = c_model(inst.max_len());
                    let set = enumerate_feasible(t, inst, eps, &o, &budget).expect("budget is valid");
                    let least = set
                        .points
                        .iter()
                        .filter_map(|p| match p.metrics.total_disclosure {
                            Quantity::Value(v) => Some(v),
                            Quantity::AboveBudget => None,
                        })
                        .min();
                    let mut s = stats.lock().unwrap();
                    s.0 += set.points.len() as u64;
                    let Some(least) = least else {
                        s.1 += 1;
                        return None;
                    };
                    s.2 += cuts.len() as u64;
                    drop(s);
                    let mut worst = i64::MIN;
                    for cut in &cuts {
                        let cb = cut_bound(t, cut, inst, eps, &o, cm).expect("valid cut");
                        if let Some(b) = cb.bound {
                            worst = worst.max(b - least);
                        }
                    }
                    let mut s = stats.lock().unwrap();
                    s.3 = s.3.max(worst);
                    (worst > 0).then(|| format!("{t} eps={eps} {}", inst.render().replace('\n', " ")))
                })
                .collect();
            let (feasible, empty, checks, worst) = stats.into_inner().unwrap();
            ensure(failures.is_empty(), || {
                format!("{} violations, first {}", failures.len(), failures[0])
            })?;
            worst_overall = worst_overall.max(worst);
            lines.push(format!(
                "{t}/e{eps}: {} inst, {feasible} pairs, {empty} without pairs, {checks} cut checks, max deviation {worst}",
                instances.len()
            ));
        }
    }
    for l in &lines {
        println!("    {l}");
    }
    Ok(format!(
        "zero violations, max observed bound - totalDisclosure = {worst_overall}"
    ))
}

#[derive(Debug, Clone, Copy)]
struct GameConfig {
    theorem: Theorem,
    epsilon: u32,
    l: u32,
}

fn game_configs() -> Vec<GameConfig> {
    let mut out = Vec::new();
    for theorem in Theorem::ALL {
        for epsilon in [1, 2] {
            let ls: &[u32] = if theorem == Theorem::GapPrivF { &[0, 2] } else { &[0] };
            for &l in ls {
                out.push(GameConfig { theorem, epsilon, l });
            }
        }
    }
    out
}

const RANDOM_SEEDS: u64 = 200;
const RANDOM_HORIZON: u64 = 1_000;
const GREEDY_HORIZON: u64 = 10_000;

#[derive(Default)]
struct CountTally {
    snapshots: u64,
    checks: u64,
    with_assumptions: u64,
    violations: Vec<String>,
}

/// Criterion 5 samples, filled while criterion 4 runs.
static COUNTS: Mutex<Option<CountTally>> = Mutex::new(None);

fn sample_counts(state: &GameState, tally: &mut CountTally, label: &str) {
    tally.snapshots += 1;
    for id in ConditionId::ALL {
        if let Some(r) = count_violations(state, id) {
            tally.checks += 1;
            if r.assumptions_hold {
                tally.with_assumptions += 1;
            }
            if !r.holds && tally.violations.len() < 5 {
                tally
                    .violations
                    .push(format!("{label} event {}: {r:?}", state.events()));
            }
        }
    }
}

fn play(spec: GameSpec, seed: u64, adv: &mut dyn Adversary, every: u64, label: &str) -> (GameReport, bool, CountTally) {
    let mut tally = CountTally::default();
    let (state, report) = run_game_with(spec, seed, adv, |s| {
        if s.events() % every == 0 {
            sample_counts(s, &mut tally, label);
        }
    })
    .expect("spec is valid");
    sample_counts(&state, &mut tally, label);
    let text = render_transcript(state.transcript());
    let replayed = replay(&text)
        .map(|(again, r)| r.identical && again == state)
        .unwrap_or(false);
    (report, replayed, tally)
}

fn c4_games() -> Outcome {
    let mut total = CountTally::default();
    let mut runs = 0u64;
    let mut events = 0u64;
    let mut lines = Vec::new();
    for cfg in game_configs() {
        let spec = GameSpec::standard(cfg.theorem, cfg.epsilon, cfg.l);
        let label = format!("{} e={} l={}", cfg.theorem, cfg.epsilon, cfg.l);
        let mut jobs: Vec<(String, GameReport, bool, CountTally)> = (0..RANDOM_SEEDS)
            .into_par_iter()
            .map(|seed| {
                let mut adv = RandomAdversary::new(seed, RandomPolicy::default());
                let name = format!("{label} random seed {seed}");
                let (r, ok, t) = play(spec.with_horizon(RANDOM_HORIZON), seed, &mut adv, 100, &name);
                (name, r, ok, t)
            })
            .collect();
        let name = format!("{label} greedy");
        let (r, ok, t) = play(
            spec.with_horizon(GREEDY_HORIZON),
            0,
            &mut GreedyAdversary::new(),
            500,
            &name,
        );
        let greedy_events = r.events;
        jobs.push((name, r, ok, t));
        for (case, records) in corner_scripts(&spec) {
            let name = format!("{label} {case}");
            let mut adv = ScriptedAdversary::from_records(case.to_string(), &records);
            let (r, ok, t) = play(spec, 0, &mut adv, 1, &name);
            jobs.push((name, r, ok, t));
        }
        for (name, report, replayed, tally) in jobs {
            ensure(report.sound(), || {
                format!(
                    "{name}: status {:?}, capacity {}, ledger {}, verdict {:?}",
                    report.status, report.capacity_exhausted, report.ledger.all_hold, report.verdict
                )
            })?;
            ensure(replayed, || format!("{name}: replay differs"))?;
            runs += 1;
            events += report.events;
            total.snapshots += tally.snapshots;
            total.checks += tally.checks;
            total.with_assumptions += tally.with_assumptions;
            total.violations.extend(tally.violations);
        }
        lines.push(format!("{label}: greedy stopped after {greedy_events} events"));
    }
    for l in &lines {
        println!("    {l}");
    }
    *COUNTS.lock().unwrap() = Some(total);
    Ok(format!(
        "{runs} runs, {events} events, all sound and replayed bit-exact"
    ))
}

fn c5_counting() -> Outcome {
    if COUNTS.lock().unwrap().is_none() {
        c4_games().map_err(|e| format!("criterion 4 failed first: {e}"))?;
    }
    let guard = COUNTS.lock().unwrap();
    let t = guard.as_ref().expect("filled by criterion 4");
    ensure(t.violations.is_empty(), || t.violations.join("; "))?;
    ensure(t.with_assumptions > 0, || {
        "no snapshot satisfied the assumptions".to_string()
    })?;
    Ok(format!(
        "{} snapshots, {} exact counts ({} under the lemma assumptions), zero violations",
        t.snapshots, t.checks, t.with_assumptions
    ))
}

fn tiny_budget(t: Topology) -> usize {
    // Four free strings make the brute-force cross product 16x larger.
    if t == Topology::A {
        5
    } else {
        6
    }
}

fn c6_search() -> Outcome {
    let o = ComplexityOracle::table_free();
    let eps = 5;
    let objectives = [
        Objective::Cp,
        Objective::Cq,
        Objective::Cpq,
        Objective::TotalDisclosure,
        Objective::PrivateDisclosure,
    ];
    let mut instances_checked = 0usize;
    let mut feasible_total = 0usize;
    for t in Topology::ALL {
        let budget = SearchBudget::programs(tiny_budget(t));
        let programs = budget.candidates();
        let qs: Vec<BitString> = if t.channel_count() == 1 {
            vec![BitString::empty()]
        } else {
            programs.clone()
        };
        let instances = all_instances(t.all_roles(), 2);
        let failures: Vec<String> = instances
            .par_iter()
            .filter_map(|inst| {
                let set = enumerate_feasible(t, inst, eps, &o, &budget).expect("valid budget");
                let mut brute = BTreeSet::new();
                for p in &programs {
                    for q in &qs {
                        let pair = TransmissionPair::new(p.clone(), q.clone());
                        if feasibility(t, inst, &pair, eps, &o).expect("valid pair").feasible {
                            brute.insert(pair);
                        }
                    }
                }
                let found: BTreeSet<TransmissionPair> = set.points.iter().map(|p| p.pair.clone()).collect();
                if found != brute || found.len() != set.points.len() {
                    return Some(format!("{t} feasible set differs on {}", inst.render()));
                }
                if let Some(p) = set.points.iter().find(|p| p.metrics != metrics(t, inst, &p.pair, &o)) {
                    return Some(format!("{t} metrics differ for {:?}", p.pair));
                }
                if set.points.is_empty() {
                    return None;
                }
                if let Err(e) = frontier_recount(&set.points, &objectives) {
                    return Some(format!("{t} frontier: {e}"));
                }
                let cm = c_model(inst.max_len());
                let cb = cut_bound(t, &[2], inst, eps, &o, cm).expect("node 2 exists");
                let min_cp = set.points.iter().filter_map(|p| p.metrics.cp.value()).min();
                match (cb.bound, min_cp) {
                    (Some(b), Some(cp)) if cp < b => Some(format!("{t} min Cp {cp} below cut bound {b}")),
                    _ => None,
                }
            })
            .collect();
        ensure(failures.is_empty(), || failures[0].clone())?;
        instances_checked += instances.len();
        feasible_total += instances
            .iter()
            .map(|i| {
                enumerate_feasible(t, i, eps, &o, &budget)
                    .map(|s| s.points.len())
                    .unwrap_or(0)
            })
            .sum::<usize>();
    }
    let witnesses = check_witnesses(&o)?;
    Ok(format!(
        "{instances_checked} instances, {feasible_total} feasible pairs recounted, {witnesses} witnesses revalidated"
    ))
}

fn frontier_recount(points: &[ParetoPoint], objectives: &[Objective]) -> Result<(), String> {
    let f = pareto_frontier(points, objectives).map_err(|e| e.to_string())?;
    let key = |p: &ParetoPoint| -> Vec<i64> {
        objectives
            .iter()
            .map(|&o| p.metrics.objective(o).unwrap_or(i64::MAX))
            .collect()
    };
    let dominated = |a: &[i64], b: &[i64]| a.iter().zip(b).all(|(x, y)| x <= y) && a != b;
    let mut expected: Vec<Vec<i64>> = Vec::new();
    for p in points {
        let k = key(p);
        if !points.iter().any(|q| dominated(&key(q), &k)) && !expected.contains(&k) {
            expected.push(k);
        }
    }
    let mut got: Vec<Vec<i64>> = f.points.iter().map(key).collect();
    got.sort();
    expected.sort();
    ensure(got == expected, || {
        format!("{} points vs {} expected", got.len(), expected.len())
    })
}

/// Every witness is re-derived from direct oracle calls.
fn check_witnesses(o: &ComplexityOracle) -> Result<usize, String> {
    let budget = SearchBudget::programs(6);
    let strings: Vec<BitString> = BitString::all_up_to(2).collect();
    let prints =
        |p: &BitString, input: &BitString, output: &BitString| o.run(p, input) == RunOutcome::Output(output.clone());
    let mut count = 0;
    for x in &strings {
        for y in &strings {
            if let Some(w) = info_distance_witness(o, x, y, &budget)
                .map_err(|e| e.to_string())?
                .found()
            {
                ensure(prints(&w.pair.p, x, y) && prints(&w.pair.q, y, x), || {
                    format!("infodist {x},{y}")
                })?;
                ensure(w.cpq == o.unconditional(&w.pair.observed()), || {
                    format!("infodist cpq {x},{y}")
                })?;
                ensure(w.reference == o.complexity(y, x).max(o.complexity(x, y)), || {
                    "reference".to_string()
                })?;
                count += 1;
            }
            for z in &strings {
                let slack = 6;
                if let Some(w) = consistent_pair_witness(o, x, y, z, slack, &budget)
                    .map_err(|e| e.to_string())?
                    .found()
                {
                    let (p, q) = (&w.pair.p, &w.pair.q);
                    ensure(p.is_consistent_with(q), || format!("muchnik {x},{y},{z} inconsistent"))?;
                    let dp = o.complexity(z, &encode_pair(p, x));
                    let dq = o.complexity(z, &encode_pair(q, y));
                    ensure(dp == w.decode_p && dq == w.decode_q, || "decode values".to_string())?;
                    ensure(dp.less_than(slack + 1) && dq.less_than(slack + 1), || {
                        "decode slack".to_string()
                    })?;
                    count += 1;
                }
                for wv in &strings {
                    if let Some(w) = exact_f_min(o, x, y, z, wv, &budget).map_err(|e| e.to_string())?.found() {
                        ensure(prints(&w.pair.p, x, y) && prints(&w.pair.q, wv, z), || {
                            format!("fmin {x},{y},{z},{wv}")
                        })?;
                        ensure(w.value == o.unconditional(&w.pair.observed()), || {
                            "fmin value".to_string()
                        })?;
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

fn c7_formulas() -> Outcome {
    use FormulaValue::{NotAProfileFunction, Value};
    let rows: [[i64; 8]; 4] = [
        // C(y|x) C(x|y) C(z|x) C(z|y) C(z|w) C(y,z|x) I(x:z|y) I(y:z|x)
        [7, 5, 4, 9, 3, 11, 2, 6],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [3, 8, 10, 2, 1, 12, 7, 1],
        [20, 20, 5, 30, 9, 21, 4, 4],
    ];
    let mut checked = 0;
    for row in rows {
        let v = ProfileValues::from_pairs(ProfileValues::KEYS.iter().copied().zip(row));
        let [cyx, cxy, czx, czy, czw, cyzx, ixzy, iyzx] = row;
        let expect: [(Topology, [FormulaValue; 4]); 5] = [
            (
                Topology::A,
                [Value(cyx), Value(czw), NotAProfileFunction, NotAProfileFunction],
            ),
            (Topology::C, [Value(cyx), Value(cxy), Value(cyx.max(cxy)), Value(0)]),
            (
                Topology::D,
                [Value(czx), Value(czy), Value(czx.max(czy)), Value(ixzy.max(iyzx))],
            ),
            (Topology::E, [Value(cyx), Value(czx), Value(cyzx), Value(0)]),
            (
                Topology::F,
                [Value(cyx), Value(czy), Value(cyzx.max(czy)), Value((czy - cyzx).max(0))],
            ),
        ];
        for (t, want) in expect {
            let got = minimal_value_formulas(t, &v).map_err(|e| e.to_string())?;
            let have = [
                got.min_cp.value,
                got.min_cq.value,
                got.min_cpq.value,
                got.min_private.value,
            ];
            ensure(have == want, || format!("{t} row {row:?}: {have:?} != {want:?}"))?;
            checked += 4;
        }
    }
    ensure(
        minimal_value_formulas(Topology::C, &ProfileValues::default()).is_err(),
        || "missing values accepted".to_string(),
    )?;
    Ok(format!("{checked} table entries exact"))
}

fn c8_proxy() -> Outcome {
    let corpus = Corpus::bundled().map_err(|e| e.to_string())?;
    ensure(corpus.len() == 20, || format!("{} files", corpus.len()))?;
    let d = DeflateCompressor;
    let r = ncd_report(&corpus, &Proxy::new(&d)).map_err(|e| e.to_string())?;
    ensure(r.max_self_distance < 0.1, || {
        format!("ncd(x,x) up to {}", r.max_self_distance)
    })?;
    ensure(r.max_asymmetry < 0.02, || {
        format!("asymmetry up to {}", r.max_asymmetry)
    })?;
    // The same bound on the 10 KiB random string the estimate is defined for.
    let mut x = Vec::with_capacity(10 * 1024);
    let mut s = 0x9e37_79b9_7f4a_7c15u64;
    while x.len() < 10 * 1024 {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        x.extend_from_slice(&s.to_le_bytes());
    }
    let self_random = Proxy::new(&d).ncd(&x, &x).map_err(|e| e.to_string())?;
    ensure(self_random < 0.1, || format!("ncd(x,x) = {self_random} on random x"))?;
    Ok(format!(
        "max ncd(x,x) {:.4}, max asymmetry {:.4} over {} pairs, random 10 KiB ncd(x,x) {self_random:.4}",
        r.max_self_distance,
        r.max_asymmetry,
        r.pairs.len()
    ))
}

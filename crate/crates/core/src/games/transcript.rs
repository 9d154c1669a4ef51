// SPDX-License-Identifier: Apache-2.0

//! Line-delimited game transcripts, the game driver and bit-exact replay.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::adversary::Adversary;
use super::agraph::AGraph;
use super::counting::{ledger_report, LedgerReport};
use super::params::GameSpec;
use super::state::{new_game, BreakKind, ChangeCause, Event, GameState, Status};
use super::verdict::{verdict, Verdict};
use super::GameError;
use crate::bits::BitString;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Record {
    Header {
        spec: GameSpec,
        seed: u64,
    },
    Tighten {
        event: u64,
        u: BitString,
        v: BitString,
        bound: u32,
    },
    Rejected {
        event: u64,
        reason: String,
    },
    Unchanged {
        event: u64,
    },
    Invariant {
        event: u64,
        broken: Vec<BreakKind>,
    },
    Candidate {
        event: u64,
        x: BitString,
        y: BitString,
        z: BitString,
        cause: ChangeCause,
    },
    AEntry {
        event: u64,
        r: BitString,
        condition: BitString,
        output: BitString,
    },
    Status {
        event: u64,
        #[serde(flatten)]
        status: Status,
    },
    Verdict {
        #[serde(flatten)]
        verdict: Verdict,
    },
}

impl Record {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

pub fn render_transcript(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

pub fn parse_transcript(text: &str) -> Result<Vec<Record>, GameError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| GameError::Transcript {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameReport {
    pub spec: GameSpec,
    pub seed: u64,
    pub adversary: String,
    pub events: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub unchanged: u64,
    pub candidate_changes: u64,
    pub breaks: BTreeMap<BreakKind, u64>,
    pub advances: u64,
    pub max_reselections: u64,
    pub simplifications: u64,
    pub simplifications_y: u64,
    pub a_entries: u64,
    pub max_keys_under_one_condition: u64,
    /// Added to every `C_A` value when the A-graph is run as a table.
    pub a_overhead: u32,
    pub samples: u64,
    pub fallback_scans: u64,
    pub capacity_exhausted: bool,
    pub status: Status,
    pub ledger: LedgerReport,
    pub verdict: Verdict,
}

impl GameReport {
    fn of(state: &GameState, adversary: String, verdict: Verdict) -> Self {
        let led = state.ledgers();
        Self {
            spec: *state.spec(),
            seed: state.seed(),
            adversary,
            events: state.events(),
            accepted: state.accepted(),
            rejected: state.rejected(),
            unchanged: state.unchanged(),
            candidate_changes: led.changes,
            breaks: led.breaks.clone(),
            advances: led.advances,
            max_reselections: led.reselections.values().copied().max().unwrap_or(0),
            simplifications: led.total_simplifications,
            simplifications_y: led.total_simplifications_y,
            a_entries: state.agraph().len() as u64,
            max_keys_under_one_condition: state.agraph().max_used().min(u64::MAX as u128) as u64,
            a_overhead: AGraph::export_overhead(),
            samples: led.samples,
            fallback_scans: led.fallback_scans,
            capacity_exhausted: state.capacity_exhausted(),
            status: state.status().clone(),
            ledger: ledger_report(state),
            verdict,
        }
    }

    /// Not stuck, no exhausted keys, ledgers in bounds and PASS.
    pub fn sound(&self) -> bool {
        !matches!(self.status, Status::ConstructorStuck { .. })
            && !self.capacity_exhausted
            && self.ledger.all_hold
            && self.verdict.passed()
    }
}

/// Runs the game until the adversary stops or the game halts, calling
/// `observe` after every submitted event.
pub fn run_game_with<A, F>(
    spec: GameSpec,
    seed: u64,
    adversary: &mut A,
    mut observe: F,
) -> Result<(GameState, GameReport), GameError>
where
    A: Adversary + ?Sized,
    F: FnMut(&GameState),
{
    let mut state = new_game(spec, seed)?;
    while state.is_running() {
        let Some(ev) = adversary.next_event(&state) else {
            break;
        };
        // Rejections are part of the game and already logged.
        let _ = state.apply_event(&ev);
        observe(&state);
    }
    let v = finish(&mut state);
    let report = GameReport::of(&state, adversary.name(), v);
    Ok((state, report))
}

pub fn run_game<A>(spec: GameSpec, seed: u64, adversary: &mut A) -> Result<(GameState, GameReport), GameError>
where
    A: Adversary + ?Sized,
{
    run_game_with(spec, seed, adversary, |_| {})
}

fn finish(state: &mut GameState) -> Verdict {
    let v = verdict(state);
    state.transcript.push(Record::Verdict { verdict: v.clone() });
    v
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub lines: usize,
    pub identical: bool,
    /// 1-based line of the first mismatch.
    pub first_difference: Option<usize>,
}

/// Re-runs the constructor on the header and the adversary events of a
/// transcript and compares the regenerated transcript line by line.
pub fn replay(text: &str) -> Result<(GameState, ReplayReport), GameError> {
    let records = parse_transcript(text)?;
    let Some(Record::Header { spec, seed }) = records.first() else {
        return Err(GameError::Transcript {
            line: 1,
            message: "missing header".to_string(),
        });
    };
    let mut state = new_game(*spec, *seed)?;
    let mut saw_verdict = false;
    for r in &records[1..] {
        match r {
            Record::Tighten { u, v, bound, .. } => {
                let _ = state.apply_event(&Event::new(u.clone(), v.clone(), *bound));
            }
            Record::Verdict { .. } => saw_verdict = true,
            _ => {}
        }
    }
    if saw_verdict {
        finish(&mut state);
    }
    let original: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let regenerated: Vec<String> = state.transcript().iter().map(Record::to_line).collect();
    let first_difference = original
        .iter()
        .zip(&regenerated)
        .position(|(a, b)| *a != b.as_str())
        .or_else(|| (original.len() != regenerated.len()).then(|| original.len().min(regenerated.len())))
        .map(|i| i + 1);
    let report = ReplayReport {
        lines: original.len(),
        identical: first_difference.is_none(),
        first_difference,
    };
    Ok((state, report))
}

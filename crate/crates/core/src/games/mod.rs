// SPDX-License-Identifier: Apache-2.0

//! Constructor-versus-enumerator games for the four gap constructions.
//!
//! The enumerator (an [`Adversary`]) declares upper bounds `C(u|v) <= b`
//! into a [`BoundTable`]; the constructor keeps a candidate triple
//! `(x, y, z)` and an [`AGraph`] so that the construction's invariant holds
//! after every event. [`verdict`] checks the conclusion on declared data.

mod adversary;
mod agraph;
mod bounds;
mod counting;
mod params;
mod state;
mod transcript;
mod verdict;

use thiserror::Error;

use crate::bits::BitString;

pub use adversary::{
    corner_scripts, Adversary, CornerCase, GreedyAdversary, RandomAdversary, RandomPolicy, ScriptedAdversary,
};
pub use agraph::{AEntry, AGraph};
pub use bounds::{level_capacity, BoundTable, DeclareEffect};
pub use counting::{count_violations, ledger_report, ConditionId, CountReport, LedgerCheck, LedgerReport};
pub use params::{GameSpec, ParamCheck, ParamViolation, Theorem, MAX_DEFAULT_HORIZON};
pub use state::{
    new_game, BreakKind, Candidate, ChangeCause, Event, EventOutcome, GameState, Ledgers, Status, StuckReason,
    FALLBACK_SCAN_CAP, SAMPLING_CAP,
};
pub use transcript::{
    parse_transcript, render_transcript, replay, run_game, run_game_with, GameReport, Record, ReplayReport,
};
pub use verdict::{verdict, Verdict, VerdictWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("unknown theorem tag {0:?}")]
    UnknownTheorem(String),
    #[error("parameters violate {}", .0.iter().map(|v| format!("{} ({} > {})", v.inequality, v.lhs, v.rhs)).collect::<Vec<_>>().join(", "))]
    InvalidParams(Vec<ParamViolation>),
    #[error("budget: level {level} under condition {v} already holds {capacity} strings")]
    Budget { v: BitString, level: u32, capacity: u64 },
    #[error("monotonicity: C({u}|{v}) is already at most {current}, cannot raise to {requested}")]
    Monotonicity {
        u: BitString,
        v: BitString,
        current: u32,
        requested: u32,
    },
    #[error("no fresh key of length {length} left under condition {condition}")]
    Capacity { condition: BitString, length: u32 },
    #[error("game has halted")]
    Halted,
    #[error("transcript line {line}: {message}")]
    Transcript { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}

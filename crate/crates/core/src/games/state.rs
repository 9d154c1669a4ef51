// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::agraph::AGraph;
use super::bounds::{BoundTable, DeclareEffect};
use super::params::{GameSpec, Theorem};
use super::transcript::Record;
use super::GameError;
use crate::bits::{encode_pair, BitString};

/// Random draws per reselection before the deterministic scan.
pub const SAMPLING_CAP: u64 = 100_000;
/// Triples visited by the length-lex fallback scan.
pub const FALLBACK_SCAN_CAP: u64 = 1_000_000;

/// One adversary event: declare `C(u|v) <= bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub u: BitString,
    pub v: BitString,
    pub bound: u32,
}

impl Event {
    pub fn new(u: BitString, v: BitString, bound: u32) -> Self {
        Self { u, v, bound }
    }

    pub fn unconditional(u: BitString, bound: u32) -> Self {
        Self::new(u, BitString::empty(), bound)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Candidate {
    pub x: BitString,
    pub y: BitString,
    pub z: BitString,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakKind {
    /// A pair became suitable (`C(p,q)`, `C(p)`, `C(q)` all low).
    SuitablePair,
    /// A program pair of the candidate has `C(p,q) < j + ε`.
    LowPair,
    /// A program pair of the candidate is not simplified.
    Unsimplified,
    /// `C(y,z|x) < k - l`.
    JointLow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeCause {
    Initial,
    /// `x` replaced by its length-lex successor.
    Advance,
    /// Same `x`, new `(y, z)`.
    Reselect,
    NewTriple,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum StuckReason {
    XExhausted,
    KeyCapacity {
        condition: BitString,
        length: u32,
    },
    SelectionCap {
        samples: u64,
        scanned: u64,
    },
    Assumption {
        assumption: String,
        observed: u64,
        limit: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Status {
    Running,
    ConstructorStuck { cause: StuckReason },
    HorizonReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum EventOutcome {
    Unchanged,
    Accepted { broke: bool },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledgers {
    /// Candidate changes after the initial one.
    pub changes: u64,
    pub breaks: BTreeMap<BreakKind, u64>,
    /// GAP_CPQ_E: `x` advances, and `(y, z)` reselections per `x`.
    pub advances: u64,
    pub reselections: BTreeMap<BitString, u64>,
    /// GAP_CPQ_E: every pair that has become suitable.
    pub suitable: BTreeSet<(BitString, BitString)>,
    /// Simplifications per condition (`x`, or `[x, l]` for GAP_PRIV_F).
    pub simplifications: BTreeMap<BitString, u64>,
    /// GAP_CPQ_F: simplifications of `z` with respect to `y`.
    pub simplifications_y: BTreeMap<BitString, u64>,
    pub total_simplifications: u64,
    pub total_simplifications_y: u64,
    pub samples: u64,
    pub fallback_scans: u64,
}

/// Thresholds derived once from the `GameSpec`; every strict `< t` is `<= t-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Limits {
    pub eps: u32,
    /// `C(p) < m + ε`.
    pub p_limit: u32,
    /// `C(q) < k + ε`.
    pub q_limit: u32,
    /// `C(p,q) < j + ε` is low.
    pub pair_limit: u32,
    pub key_len: u32,
    /// GAP_PRIV_F: `C(y,z|x) < k - l` breaks.
    pub joint_limit: u32,
}

impl Limits {
    fn of(spec: &GameSpec) -> Self {
        let (p_limit, q_limit) = spec.program_limits();
        Self {
            eps: spec.epsilon,
            p_limit,
            q_limit,
            pair_limit: spec.j + spec.epsilon,
            key_len: spec.key_length(),
            joint_limit: spec.k.saturating_sub(spec.l),
        }
    }
}

/// Binary numeral of `l`, `"0"` for zero.
pub(crate) fn binary_numeral(l: u32) -> BitString {
    if l == 0 {
        return BitString::zeros(1);
    }
    let width = (32 - l.leading_zeros()) as usize;
    BitString::from_index(l as u128, width)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    pub(crate) spec: GameSpec,
    pub(crate) seed: u64,
    pub(crate) limits: Limits,
    pub(crate) table: BoundTable,
    pub(crate) agraph: AGraph,
    pub(crate) candidate: Candidate,
    pub(crate) ledgers: Ledgers,
    pub(crate) events: u64,
    pub(crate) accepted: u64,
    pub(crate) rejected: u64,
    pub(crate) unchanged: u64,
    pub(crate) status: Status,
    pub(crate) capacity_exhausted: bool,
    rng: ChaCha8Rng,
    pub(crate) transcript: Vec<Record>,
    /// `[x, bin(l)]` for GAP_PRIV_F.
    l_code: BitString,
}

/// Installs the length-lex first candidate and the entries that make its
/// `C_A` items hold.
pub fn new_game(spec: GameSpec, seed: u64) -> Result<GameState, GameError> {
    spec.check()?;
    let (n, m, k) = spec.lengths();
    let candidate = Candidate {
        x: BitString::zeros(n),
        y: BitString::zeros(m),
        z: BitString::zeros(k),
    };
    let mut state = GameState {
        spec,
        seed,
        limits: Limits::of(&spec),
        table: BoundTable::new(),
        agraph: AGraph::new(),
        candidate: candidate.clone(),
        ledgers: Ledgers::default(),
        events: 0,
        accepted: 0,
        rejected: 0,
        unchanged: 0,
        status: Status::Running,
        capacity_exhausted: false,
        rng: ChaCha8Rng::seed_from_u64(seed),
        transcript: vec![Record::Header { spec, seed }],
        l_code: binary_numeral(spec.l),
    };
    state.install(candidate, ChangeCause::Initial);
    if spec.horizon == 0 {
        state.set_status(Status::HorizonReached);
    }
    Ok(state)
}

impl GameState {
    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn table(&self) -> &BoundTable {
        &self.table
    }

    pub fn agraph(&self) -> &AGraph {
        &self.agraph
    }

    pub fn candidate(&self) -> &Candidate {
        &self.candidate
    }

    pub fn ledgers(&self) -> &Ledgers {
        &self.ledgers
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn is_running(&self) -> bool {
        self.status == Status::Running
    }

    /// Events submitted so far, rejected ones included.
    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn rejected(&self) -> u64 {
        self.rejected
    }

    pub fn unchanged(&self) -> u64 {
        self.unchanged
    }

    pub fn capacity_exhausted(&self) -> bool {
        self.capacity_exhausted
    }

    pub fn transcript(&self) -> &[Record] {
        &self.transcript
    }

    /// Condition under which program pairs are simplified.
    pub fn simplification_condition(&self, x: &BitString) -> BitString {
        match self.spec.theorem {
            Theorem::GapPrivF => encode_pair(x, &self.l_code),
            _ => x.clone(),
        }
    }

    pub(crate) fn is_program_y(&self, p: &BitString, bound: u32) -> bool {
        bound < self.limits.eps && self.table.below(p, &BitString::empty(), self.limits.p_limit)
    }

    pub(crate) fn is_program_z(&self, q: &BitString, bound: u32) -> bool {
        bound < self.limits.eps && self.table.below(q, &BitString::empty(), self.limits.q_limit)
    }

    /// Programs for `y` relative to `x`.
    pub fn programs_y(&self, x: &BitString, y: &BitString) -> Vec<BitString> {
        self.table
            .programs_for(x, y)
            .map(|m| {
                m.iter()
                    .filter(|(p, b)| self.is_program_y(p, **b))
                    .map(|(p, _)| p.clone())
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Programs for `z`: relative to `x` on network (e), to `y` on (f).
    pub fn programs_z(&self, x: &BitString, y: &BitString, z: &BitString) -> Vec<BitString> {
        let given = if self.spec.theorem.chained() { y } else { x };
        self.table
            .programs_for(given, z)
            .map(|m| {
                m.iter()
                    .filter(|(q, b)| self.is_program_z(q, **b))
                    .map(|(q, _)| q.clone())
                    .collect()
            })
            .unwrap_or_default()
    }

    pub(crate) fn program_count_y(&self, x: &BitString, y: &BitString) -> usize {
        self.table
            .programs_for(x, y)
            .map_or(0, |m| m.iter().filter(|(p, b)| self.is_program_y(p, **b)).count())
    }

    pub(crate) fn program_count_z(&self, x: &BitString, y: &BitString, z: &BitString) -> usize {
        let given = if self.spec.theorem.chained() { y } else { x };
        self.table
            .programs_for(given, z)
            .map_or(0, |m| m.iter().filter(|(q, b)| self.is_program_z(q, **b)).count())
    }

    /// A program pair of the triple with `C(p,q) < j + ε`.
    pub fn low_pair(&self, c: &Candidate) -> Option<(BitString, BitString)> {
        let ps = self.programs_y(&c.x, &c.y);
        if ps.is_empty() {
            return None;
        }
        let qs = self.programs_z(&c.x, &c.y, &c.z);
        self.low_pair_in(&ps, &qs)
    }

    pub(crate) fn low_pair_in(&self, ps: &[BitString], qs: &[BitString]) -> Option<(BitString, BitString)> {
        for p in ps {
            let Some(row) = self.table.pairs_with_first(p) else {
                continue;
            };
            for q in qs {
                if row.get(q).is_some_and(|&b| b < self.limits.pair_limit) {
                    return Some((p.clone(), q.clone()));
                }
            }
        }
        None
    }

    pub(crate) fn is_suitable(&self, p: &BitString, q: &BitString) -> bool {
        let empty = BitString::empty();
        self.table
            .pairs_with_first(p)
            .and_then(|row| row.get(q))
            .is_some_and(|&b| b < self.limits.pair_limit)
            && self.table.below(p, &empty, self.limits.p_limit)
            && self.table.below(q, &empty, self.limits.q_limit)
    }

    /// Items of the invariant that fail for the current candidate.
    pub fn invariant_breaks(&self) -> Vec<BreakKind> {
        self.breaks_for(&self.candidate)
    }

    pub(crate) fn breaks_for(&self, c: &Candidate) -> Vec<BreakKind> {
        let mut out = Vec::new();
        let t = self.spec.theorem;
        let key = self.limits.key_len;
        if t == Theorem::GapPrivF
            && self
                .table
                .below(&encode_pair(&c.y, &c.z), &c.x, self.limits.joint_limit)
        {
            out.push(BreakKind::JointLow);
        }
        let ps = self.programs_y(&c.x, &c.y);
        let qs = if ps.is_empty() {
            Vec::new()
        } else {
            self.programs_z(&c.x, &c.y, &c.z)
        };
        if self.low_pair_in(&ps, &qs).is_some() {
            out.push(BreakKind::LowPair);
        }
        match t {
            Theorem::GapPrivE | Theorem::GapPrivF => {
                let cond = self.simplification_condition(&c.x);
                let unsimplified = ps.iter().any(|p| {
                    qs.iter()
                        .any(|q| self.agraph.c_a(&encode_pair(p, q), &cond).map_or(true, |v| v > key))
                });
                if unsimplified {
                    out.push(BreakKind::Unsimplified);
                }
            }
            Theorem::GapCpqE | Theorem::GapCpqF => {
                // The C_A items are written at installation and only
                // improve; they are checked here as a guard.
                let yz = encode_pair(&c.y, &c.z);
                let mut ok = self.agraph.c_a(&yz, &c.x).is_some_and(|v| v <= key);
                if t == Theorem::GapCpqF {
                    ok &= self.agraph.c_a(&c.z, &c.y).is_some_and(|v| v <= key);
                }
                if !ok {
                    out.push(BreakKind::Unsimplified);
                }
            }
        }
        out
    }

    /// The selection lemma's conditions for a triple (without the
    /// invariant's own items, which are checked separately).
    pub(crate) fn qualifies(&self, c: &Candidate) -> bool {
        let j = self.spec.j;
        let e = self.spec.epsilon;
        let pow = |b: u32| 1u64.checked_shl(b).unwrap_or(u64::MAX);
        let simps = |m: &BTreeMap<BitString, u64>, s: &BitString| m.get(s).copied().unwrap_or(0);
        match self.spec.theorem {
            Theorem::GapCpqE => self.low_pair(c).is_none(),
            Theorem::GapPrivE => {
                let limit = pow(2 * e + 2) as usize;
                simps(&self.ledgers.simplifications, &c.x) < pow(j - 1)
                    && self.program_count_y(&c.x, &c.y) < limit
                    && self.program_count_z(&c.x, &c.y, &c.z) < limit
                    && self.low_pair(c).is_none()
            }
            Theorem::GapCpqF => {
                simps(&self.ledgers.simplifications, &c.x) < pow(j)
                    && simps(&self.ledgers.simplifications_y, &c.y) < pow(j)
                    && self.low_pair(c).is_none()
                    && self.shared_keys_available(c)
            }
            Theorem::GapPrivF => {
                let limit = pow(2 * e + 3) as usize;
                let cond = self.simplification_condition(&c.x);
                simps(&self.ledgers.simplifications, &cond) < pow(j - self.spec.l - 1)
                    && !self
                        .table
                        .below(&encode_pair(&c.y, &c.z), &c.x, self.limits.joint_limit)
                    && self.program_count_y(&c.x, &c.y) < limit
                    && self.program_count_z(&c.x, &c.y, &c.z) < limit
                    && self.low_pair(c).is_none()
            }
        }
    }

    /// GAP_CPQ_F keys under `x` and under `y` come from one pool when the
    /// two strings coincide.
    fn shared_keys_available(&self, c: &Candidate) -> bool {
        let key = self.limits.key_len;
        let yz = encode_pair(&c.y, &c.z);
        let need_x = u128::from(self.agraph.c_a(&yz, &c.x).map_or(true, |v| v > key));
        let need_y = u128::from(self.agraph.c_a(&c.z, &c.y).map_or(true, |v| v > key));
        if c.x == c.y {
            self.agraph.remaining(&c.x, key) >= need_x + need_y
        } else {
            self.agraph.remaining(&c.x, key) >= need_x && self.agraph.remaining(&c.y, key) >= need_y
        }
    }

    /// Ledger assumptions of the selection lemma; `Err` names the first
    /// one that fails.
    pub(crate) fn check_assumptions(&self) -> Result<(), StuckReason> {
        let s = &self.spec;
        let (n, m, j, l) = (s.n, s.m, s.j, s.l);
        let check = |name: &str, observed: u64, exp: u32| -> Result<(), StuckReason> {
            let ok = exp >= 64 || observed < (1u64 << exp);
            if ok {
                Ok(())
            } else {
                Err(StuckReason::Assumption {
                    assumption: name.to_string(),
                    observed,
                    limit: format!("2^{exp}"),
                })
            }
        };
        match s.theorem {
            Theorem::GapCpqE => Ok(()),
            Theorem::GapPrivE => check(
                "total simplifications < 2^{n+j-3}",
                self.ledgers.total_simplifications,
                n + j - 3,
            ),
            Theorem::GapCpqF => {
                let exp = n.min(m) + j - 2;
                check(
                    "simplifications of y,z given x < 2^{min{n,m}+j-2}",
                    self.ledgers.total_simplifications,
                    exp,
                )?;
                check(
                    "simplifications of z given y < 2^{min{n,m}+j-2}",
                    self.ledgers.total_simplifications_y,
                    exp,
                )
            }
            Theorem::GapPrivF => check(
                "total simplifications < 2^{n+j-l-4}",
                self.ledgers.total_simplifications,
                n + j - l - 4,
            ),
        }
    }

    fn random_string(&mut self, len: usize) -> BitString {
        let v: u128 = self.rng.gen();
        BitString::from_index(v, len)
    }

    /// Finds a triple meeting the selection lemma, with `x` fixed when
    /// given. Rejection sampling first, then a length-lex scan.
    pub(crate) fn select_candidate(&mut self, fixed_x: Option<&BitString>) -> Result<Candidate, StuckReason> {
        self.check_assumptions()?;
        let (n, m, k) = self.spec.lengths();
        for _ in 0..SAMPLING_CAP {
            self.ledgers.samples += 1;
            let x = match fixed_x {
                Some(x) => x.clone(),
                None => self.random_string(n),
            };
            let y = self.random_string(m);
            let z = self.random_string(k);
            let c = Candidate { x, y, z };
            if self.qualifies(&c) {
                return Ok(c);
            }
        }
        self.ledgers.fallback_scans += 1;
        let free_x = if fixed_x.is_some() { 0 } else { n };
        let bits_total = free_x + m + k;
        let universe = if bits_total >= 127 {
            u128::MAX
        } else {
            1u128 << bits_total
        };
        let mut scanned = 0u64;
        let mut idx = 0u128;
        while scanned < FALLBACK_SCAN_CAP && idx < universe {
            let z = BitString::from_index(idx, k);
            let y = BitString::from_index(idx >> k, m);
            let x = match fixed_x {
                Some(x) => x.clone(),
                None => BitString::from_index(idx >> (k + m), n),
            };
            let c = Candidate { x, y, z };
            if self.qualifies(&c) {
                return Ok(c);
            }
            idx += 1;
            scanned += 1;
        }
        Err(StuckReason::SelectionCap {
            samples: SAMPLING_CAP,
            scanned,
        })
    }

    fn set_status(&mut self, status: Status) {
        self.status = status.clone();
        self.transcript.push(Record::Status {
            event: self.events,
            status,
        });
    }

    fn stuck(&mut self, cause: StuckReason) {
        if let StuckReason::KeyCapacity { .. } = cause {
            self.capacity_exhausted = true;
        }
        self.set_status(Status::ConstructorStuck { cause });
    }

    /// Writes `A(r, condition) = output` with a fresh key unless `C_A`
    /// already meets the key length.
    fn simplify(&mut self, condition: &BitString, output: &BitString, second_type: bool) -> Result<(), StuckReason> {
        let key = self.limits.key_len;
        if self.agraph.c_a(output, condition).is_some_and(|v| v <= key) {
            return Ok(());
        }
        let entry = self
            .agraph
            .add_fresh(condition, key, output)
            .map_err(|_| StuckReason::KeyCapacity {
                condition: condition.clone(),
                length: key,
            })?
            .clone();
        self.transcript.push(Record::AEntry {
            event: self.events,
            r: entry.r,
            condition: entry.condition,
            output: entry.output,
        });
        if second_type {
            *self.ledgers.simplifications_y.entry(condition.clone()).or_default() += 1;
            self.ledgers.total_simplifications_y += 1;
        } else {
            *self.ledgers.simplifications.entry(condition.clone()).or_default() += 1;
            self.ledgers.total_simplifications += 1;
        }
        Ok(())
    }

    /// Makes `c` the candidate and performs the construction's
    /// simplifications for it.
    fn install(&mut self, c: Candidate, cause: ChangeCause) {
        self.transcript.push(Record::Candidate {
            event: self.events,
            x: c.x.clone(),
            y: c.y.clone(),
            z: c.z.clone(),
            cause,
        });
        if cause != ChangeCause::Initial {
            self.ledgers.changes += 1;
        }
        self.candidate = c.clone();
        let result = match self.spec.theorem {
            Theorem::GapCpqE => self.simplify(&c.x, &encode_pair(&c.y, &c.z), false),
            Theorem::GapCpqF => self
                .simplify(&c.x, &encode_pair(&c.y, &c.z), false)
                .and_then(|_| self.simplify(&c.y, &c.z, true)),
            Theorem::GapPrivE | Theorem::GapPrivF => {
                let cond = self.simplification_condition(&c.x);
                let ps = self.programs_y(&c.x, &c.y);
                let qs = self.programs_z(&c.x, &c.y, &c.z);
                let mut r = Ok(());
                'outer: for p in &ps {
                    for q in &qs {
                        r = self.simplify(&cond, &encode_pair(p, q), false);
                        if r.is_err() {
                            break 'outer;
                        }
                    }
                }
                r
            }
        };
        if let Err(cause) = result {
            self.stuck(cause);
        }
    }

    /// Pairs that became suitable through this event (GAP_CPQ_E).
    fn new_suitable_pairs(&mut self, ev: &Event) -> bool {
        if !ev.v.is_empty() {
            return false;
        }
        let mut touched: Vec<(BitString, BitString)> = Vec::new();
        if let Some((p, q)) = crate::bits::split_pair(&ev.u) {
            touched.push((p, q));
        }
        if let Some(row) = self.table.pairs_with_first(&ev.u) {
            touched.extend(row.keys().map(|q| (ev.u.clone(), q.clone())));
        }
        if let Some(col) = self.table.pairs_with_second(&ev.u) {
            touched.extend(col.iter().map(|p| (p.clone(), ev.u.clone())));
        }
        let mut fresh = false;
        for (p, q) in touched {
            if !self.ledgers.suitable.contains(&(p.clone(), q.clone())) && self.is_suitable(&p, &q) {
                self.ledgers.suitable.insert((p, q));
                fresh = true;
            }
        }
        fresh
    }

    fn note_break(&mut self, kinds: &[BreakKind]) {
        for k in kinds {
            *self.ledgers.breaks.entry(*k).or_default() += 1;
        }
    }

    fn react(&mut self, ev: &Event) -> bool {
        let theorem = self.spec.theorem;
        let mut broken = Vec::new();
        if theorem == Theorem::GapCpqE && self.new_suitable_pairs(ev) {
            broken.push(BreakKind::SuitablePair);
        }
        broken.extend(self.invariant_breaks());
        self.transcript.push(Record::Invariant {
            event: self.events,
            broken: broken.clone(),
        });
        if broken.is_empty() {
            return false;
        }
        self.note_break(&broken);
        let outcome = match theorem {
            Theorem::GapCpqE if broken.contains(&BreakKind::SuitablePair) => {
                self.ledgers.advances += 1;
                match self.candidate.x.same_length_successor() {
                    None => Err(StuckReason::XExhausted),
                    Some(x) => self.select_candidate(Some(&x)).map(|c| (c, ChangeCause::Advance)),
                }
            }
            Theorem::GapCpqE => {
                let x = self.candidate.x.clone();
                *self.ledgers.reselections.entry(x.clone()).or_default() += 1;
                self.select_candidate(Some(&x)).map(|c| (c, ChangeCause::Reselect))
            }
            _ => self.select_candidate(None).map(|c| (c, ChangeCause::NewTriple)),
        };
        match outcome {
            Ok((c, cause)) => self.install(c, cause),
            Err(cause) => self.stuck(cause),
        }
        true
    }

    /// Applies one adversary event. Rejected events still count toward the
    /// horizon and are logged.
    pub fn apply_event(&mut self, ev: &Event) -> Result<EventOutcome, GameError> {
        if !self.is_running() {
            return Err(GameError::Halted);
        }
        self.events += 1;
        self.transcript.push(Record::Tighten {
            event: self.events,
            u: ev.u.clone(),
            v: ev.v.clone(),
            bound: ev.bound,
        });
        let result = match self.table.declare(&ev.u, &ev.v, ev.bound) {
            Err(e) => {
                self.rejected += 1;
                self.transcript.push(Record::Rejected {
                    event: self.events,
                    reason: e.to_string(),
                });
                Err(e)
            }
            Ok(DeclareEffect::Unchanged) => {
                self.unchanged += 1;
                self.transcript.push(Record::Unchanged { event: self.events });
                Ok(EventOutcome::Unchanged)
            }
            Ok(DeclareEffect::Tightened { .. }) => {
                self.accepted += 1;
                let broke = self.react(ev);
                Ok(EventOutcome::Accepted { broke })
            }
        };
        if self.is_running() && self.events >= self.spec.horizon {
            self.set_status(Status::HorizonReached);
        }
        result
    }

    #[cfg(test)]
    pub(crate) fn inject_unchecked(&mut self, ev: &Event) {
        self.table.declare(&ev.u, &ev.v, ev.bound).unwrap();
    }

    #[cfg(test)]
    pub(crate) fn ledgers_mut(&mut self) -> &mut Ledgers {
        &mut self.ledgers
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;

    fn cpq_e() -> GameState {
        new_game(GameSpec::standard(Theorem::GapCpqE, 1, 0), 7).unwrap()
    }

    /// Declares `p`, `q` as a suitable pair for ε = 1, m = 6, j = 9.
    fn suitable(g: &mut GameState, p: &BitString, q: &BitString) {
        g.apply_event(&Event::unconditional(p.clone(), 6)).unwrap();
        g.apply_event(&Event::unconditional(q.clone(), 6)).unwrap();
        g.apply_event(&Event::unconditional(encode_pair(p, q), 9)).unwrap();
    }

    #[test]
    fn initial_state() {
        let g = cpq_e();
        let c = g.candidate();
        assert_eq!(c.x, BitString::zeros(10));
        assert_eq!(c.y, BitString::zeros(6));
        assert_eq!(c.z, BitString::zeros(6));
        assert_eq!(g.agraph().len(), 1);
        assert!(g.invariant_breaks().is_empty());
        assert!(g.is_running());
    }

    #[test]
    fn invalid_spec_refused() {
        let mut s = GameSpec::standard(Theorem::GapCpqE, 1, 0);
        s.j = 12;
        assert!(matches!(new_game(s, 0), Err(GameError::InvalidParams(_))));
    }

    #[test]
    fn suitable_pair_advances_x() {
        let mut g = cpq_e();
        let x0 = g.candidate().x.clone();
        let (p, q) = (bits("1011"), bits("0110"));
        g.apply_event(&Event::unconditional(p.clone(), 6)).unwrap();
        g.apply_event(&Event::unconditional(q.clone(), 6)).unwrap();
        assert_eq!(g.candidate().x, x0);
        g.apply_event(&Event::unconditional(encode_pair(&p, &q), 9)).unwrap();
        let c = g.candidate().clone();
        assert_eq!(Some(c.x.clone()), x0.same_length_successor());
        assert_eq!(g.agraph().len(), 2);
        assert_eq!(g.ledgers().advances, 1);
        assert!(g.low_pair(&c).is_none());
    }

    #[test]
    fn program_declarations_reselect_yz() {
        let mut g = cpq_e();
        let (p, q) = (bits("1011"), bits("0110"));
        suitable(&mut g, &p, &q);
        let c = g.candidate().clone();
        g.apply_event(&Event::new(c.y.clone(), encode_pair(&p, &c.x), 0))
            .unwrap();
        assert_eq!(g.candidate(), &c);
        g.apply_event(&Event::new(c.z.clone(), encode_pair(&q, &c.x), 0))
            .unwrap();
        let d = g.candidate().clone();
        assert_eq!(d.x, c.x);
        assert_ne!((d.y.clone(), d.z.clone()), (c.y.clone(), c.z.clone()));
        assert_eq!(g.ledgers().reselections.get(&c.x), Some(&1));
        assert!(g.invariant_breaks().is_empty());
    }

    #[test]
    fn unrelated_event_changes_nothing() {
        let mut g = cpq_e();
        let c = g.candidate().clone();
        g.apply_event(&Event::new(bits("111"), bits("000"), 3)).unwrap();
        assert_eq!(g.candidate(), &c);
        assert_eq!(g.ledgers().changes, 0);
    }

    #[test]
    fn budget_rejection_is_logged() {
        let mut g = cpq_e();
        let v = bits("0101");
        assert!(g.apply_event(&Event::new(bits("1"), v.clone(), 0)).is_ok());
        let e = g.apply_event(&Event::new(bits("0"), v, 0));
        assert!(matches!(e, Err(GameError::Budget { level: 0, .. })));
        assert_eq!(g.rejected(), 1);
        assert_eq!(g.events(), 2);
        assert!(matches!(g.transcript().last(), Some(Record::Rejected { .. })));
    }

    #[test]
    fn horizon_halts() {
        let spec = GameSpec::standard(Theorem::GapCpqE, 1, 0).with_horizon(2);
        let mut g = new_game(spec, 0).unwrap();
        g.apply_event(&Event::unconditional(bits("1"), 9)).unwrap();
        g.apply_event(&Event::unconditional(bits("0"), 9)).unwrap();
        assert_eq!(g.status(), &Status::HorizonReached);
        assert_eq!(
            g.apply_event(&Event::unconditional(bits("00"), 9)),
            Err(GameError::Halted)
        );
    }

    #[test]
    fn priv_e_simplifies_program_pairs() {
        let mut g = new_game(GameSpec::standard(Theorem::GapPrivE, 1, 0), 3).unwrap();
        let c = g.candidate().clone();
        // The lex-first triple has y = z, so one program serves both.
        assert_eq!(c.y, c.z);
        let p = bits("110");
        g.apply_event(&Event::unconditional(p.clone(), 3)).unwrap();
        assert_eq!(g.ledgers().changes, 0);
        g.apply_event(&Event::new(c.y.clone(), encode_pair(&p, &c.x), 0))
            .unwrap();
        assert_eq!(g.ledgers().breaks.get(&BreakKind::Unsimplified), Some(&1));
        assert_eq!(g.ledgers().changes, 1);
        assert!(g.invariant_breaks().is_empty());
    }

    #[test]
    fn priv_f_joint_bound_breaks() {
        let spec = GameSpec::standard(Theorem::GapPrivF, 1, 2);
        let mut g = new_game(spec, 5).unwrap();
        let c = g.candidate().clone();
        let bound = spec.k - spec.l - 1;
        g.apply_event(&Event::new(encode_pair(&c.y, &c.z), c.x.clone(), bound))
            .unwrap();
        assert_eq!(g.ledgers().breaks.get(&BreakKind::JointLow), Some(&1));
        assert_ne!(g.candidate(), &c);
        assert!(g.invariant_breaks().is_empty());
    }

    #[test]
    fn cpq_f_initial_entries_share_a_condition() {
        let g = new_game(GameSpec::standard(Theorem::GapCpqF, 1, 0), 0).unwrap();
        let c = g.candidate();
        assert_eq!(c.x, c.y);
        assert_eq!(g.agraph().used(&c.x, 17), 2);
        assert!(g.invariant_breaks().is_empty());
    }

    #[test]
    fn violated_assumption_is_stuck() {
        let mut g = new_game(GameSpec::standard(Theorem::GapPrivE, 1, 0), 0).unwrap();
        g.ledgers_mut().total_simplifications = 1 << (13 + 33 - 3);
        let c = g.candidate().clone();
        let (p, q) = (bits("1"), bits("0"));
        g.inject_unchecked(&Event::unconditional(p.clone(), 3));
        g.inject_unchecked(&Event::unconditional(q.clone(), 3));
        g.inject_unchecked(&Event::new(c.y.clone(), encode_pair(&p, &c.x), 0));
        g.apply_event(&Event::new(c.z.clone(), encode_pair(&q, &c.x), 0))
            .unwrap();
        assert!(matches!(
            g.status(),
            Status::ConstructorStuck {
                cause: StuckReason::Assumption { .. }
            }
        ));
    }

    #[test]
    fn binary_numerals() {
        assert_eq!(binary_numeral(0), bits("0"));
        assert_eq!(binary_numeral(2), bits("10"));
        assert_eq!(binary_numeral(5), bits("101"));
    }
}

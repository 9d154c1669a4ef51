// SPDX-License-Identifier: Apache-2.0

//! Event streams standing in for the enumeration of the upper graph.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::params::{GameSpec, Theorem};
use super::state::{Event, GameState};
use super::transcript::{parse_transcript, Record};
use super::GameError;
use crate::bits::{encode_pair, BitString};

pub trait Adversary {
    fn name(&self) -> String;
    /// The next event, or `None` when the stream ends.
    fn next_event(&mut self, state: &GameState) -> Option<Event>;
}

/// Bound the event would need to be accepted, searching upward from
/// `bound` to `limit - 1`.
fn admissible(state: &GameState, u: &BitString, v: &BitString, bound: u32, limit: u32) -> Option<u32> {
    (bound..limit.max(bound + 1))
        .find(|&b| state.table().get(u, v).map_or(true, |cur| b < cur) && state.table().check(u, v, b).is_ok())
}

/// Condition for programs of `z`.
fn z_given<'a>(state: &'a GameState) -> &'a BitString {
    let c = state.candidate();
    if state.spec().theorem.chained() {
        &c.y
    } else {
        &c.x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomPolicy {
    /// Events after which the stream ends; the horizon usually ends it first.
    pub max_events: Option<u64>,
    /// Share of actions aimed at the current candidate.
    pub focus: f64,
    /// Share of actions that declare unrelated bounds.
    pub noise: f64,
    /// Share of actions that are deliberately inadmissible.
    pub invalid: f64,
    /// Program strings are drawn with lengths in this range.
    pub min_program_len: usize,
    pub max_program_len: usize,
}

impl Default for RandomPolicy {
    fn default() -> Self {
        Self {
            max_events: None,
            focus: 0.85,
            noise: 0.1,
            invalid: 0.03,
            min_program_len: 3,
            max_program_len: 12,
        }
    }
}

pub struct RandomAdversary {
    seed: u64,
    policy: RandomPolicy,
    rng: ChaCha8Rng,
    queue: VecDeque<Event>,
    programs: Vec<BitString>,
    emitted: Vec<Event>,
    count: u64,
}

impl RandomAdversary {
    pub fn new(seed: u64, policy: RandomPolicy) -> Self {
        Self {
            seed,
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_adf0_0000_0000),
            queue: VecDeque::new(),
            programs: Vec::new(),
            emitted: Vec::new(),
            count: 0,
        }
    }

    fn random_string(&mut self, len: usize) -> BitString {
        BitString::from_index(self.rng.gen::<u128>(), len)
    }

    fn program(&mut self) -> BitString {
        if !self.programs.is_empty() && self.rng.gen_bool(0.6) {
            let i = self.rng.gen_range(0..self.programs.len());
            return self.programs[i].clone();
        }
        let len = self
            .rng
            .gen_range(self.policy.min_program_len..=self.policy.max_program_len);
        let p = self.random_string(len);
        self.programs.push(p.clone());
        p
    }

    fn pick_bound(&mut self, limit: u32) -> u32 {
        // Mostly just under the limit, where the budget is roomiest.
        let lo = limit.saturating_sub(3);
        if limit == 0 {
            0
        } else {
            self.rng.gen_range(lo..limit)
        }
    }

    fn push(&mut self, state: &GameState, u: BitString, v: BitString, limit: u32) {
        let b = self.pick_bound(limit);
        if let Some(b) = admissible(state, &u, &v, b, limit) {
            self.queue.push_back(Event::new(u, v, b));
        }
    }

    fn plan(&mut self, state: &GameState) {
        let spec = *state.spec();
        let c = state.candidate().clone();
        let (p_lim, q_lim) = spec.program_limits();
        let pair_lim = spec.j + spec.epsilon;
        let eps = spec.epsilon;
        let empty = BitString::empty();

        let roll: f64 = self.rng.gen();
        if roll < self.policy.invalid {
            self.plan_invalid(state);
            return;
        }
        if roll < self.policy.invalid + self.policy.noise {
            let (lu, lv) = (self.rng.gen_range(1..=20), self.rng.gen_range(0..=20));
            let u = self.random_string(lu);
            let v = self.random_string(lv);
            let b = self.rng.gen_range(0..40);
            self.push(state, u, v, b + 1);
            return;
        }
        // Target the candidate, or a random triple of the right shape.
        let target = if self.rng.gen_bool(self.policy.focus) {
            c
        } else {
            let (n, m, k) = spec.lengths();
            crate::games::Candidate {
                x: self.random_string(n),
                y: self.random_string(m),
                z: self.random_string(k),
            }
        };
        let zg = if spec.theorem.chained() {
            target.y.clone()
        } else {
            target.x.clone()
        };
        let choices = if spec.theorem == Theorem::GapPrivF { 5 } else { 4 };
        match self.rng.gen_range(0..choices) {
            0 => {
                let p = self.program();
                self.push(state, p.clone(), empty, p_lim);
                self.push(state, target.y.clone(), encode_pair(&p, &target.x), eps);
            }
            1 => {
                let q = self.program();
                self.push(state, q.clone(), empty, q_lim);
                self.push(state, target.z.clone(), encode_pair(&q, &zg), eps);
            }
            2 => {
                // Prefer the candidate's own programs.
                let ps = state.programs_y(&target.x, &target.y);
                let qs = state.programs_z(&target.x, &target.y, &target.z);
                let p = if ps.is_empty() {
                    self.program()
                } else {
                    ps[self.rng.gen_range(0..ps.len())].clone()
                };
                let q = if qs.is_empty() {
                    self.program()
                } else {
                    qs[self.rng.gen_range(0..qs.len())].clone()
                };
                self.push(state, encode_pair(&p, &q), empty, pair_lim);
            }
            3 => {
                // A full low pair for the target.
                let p = self.program();
                let q = self.program();
                self.push(state, p.clone(), empty.clone(), p_lim);
                self.push(state, q.clone(), empty.clone(), q_lim);
                self.push(state, encode_pair(&p, &q), empty, pair_lim);
                self.push(state, target.y.clone(), encode_pair(&p, &target.x), eps);
                self.push(state, target.z.clone(), encode_pair(&q, &zg), eps);
            }
            _ => {
                let lim = spec.k - spec.l;
                self.push(state, encode_pair(&target.y, &target.z), target.x.clone(), lim);
            }
        }
    }

    fn plan_invalid(&mut self, state: &GameState) {
        if !self.emitted.is_empty() && self.rng.gen_bool(0.5) {
            // Raise a bound that is already declared.
            let i = self.rng.gen_range(0..self.emitted.len());
            let e = self.emitted[i].clone();
            if let Some(cur) = state.table().get(&e.u, &e.v) {
                self.queue.push_back(Event::new(e.u, e.v, cur + 1));
                return;
            }
        }
        // Two strings at level 0 under one fresh condition.
        let v = self.random_string(24);
        let a = self.random_string(5);
        let mut b = self.random_string(5);
        if b == a {
            b = a.successor();
        }
        self.queue.push_back(Event::new(a, v.clone(), 0));
        self.queue.push_back(Event::new(b, v, 0));
    }
}

impl Adversary for RandomAdversary {
    fn name(&self) -> String {
        format!("random:{}", self.seed)
    }

    fn next_event(&mut self, state: &GameState) -> Option<Event> {
        if self.policy.max_events.is_some_and(|m| self.count >= m) {
            return None;
        }
        let mut attempts = 0;
        while self.queue.is_empty() {
            self.plan(state);
            attempts += 1;
            if attempts > 1000 {
                return None;
            }
        }
        let e = self.queue.pop_front()?;
        self.count += 1;
        self.emitted.push(e.clone());
        Some(e)
    }
}

/// Declares, at every step, the shortest admissible event sequence that
/// breaks the candidate's invariant.
#[derive(Debug, Clone, Default)]
pub struct GreedyAdversary {
    counter: u128,
    queue: VecDeque<Event>,
    /// Declared programs, oldest first.
    programs: Vec<BitString>,
    /// Program pairs not yet tried as suitable pairs, in declaration order.
    untried: VecDeque<(usize, usize)>,
}

const FRESH_LEN: usize = 16;

impl GreedyAdversary {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh(&mut self) -> BitString {
        let s = BitString::from_index(self.counter, FRESH_LEN);
        self.counter += 1;
        s
    }

    fn plans(&mut self, state: &GameState) -> Vec<Vec<Event>> {
        let spec = *state.spec();
        let c = state.candidate().clone();
        let (p_lim, q_lim) = spec.program_limits();
        let pair_lim = spec.j + spec.epsilon;
        let eps = spec.epsilon;
        let empty = BitString::empty();
        let zg = z_given(state).clone();
        let mut plans: Vec<Vec<Event>> = Vec::new();
        let ev = |u: &BitString, v: &BitString, limit: u32| -> Option<Event> {
            admissible(state, u, v, limit - 1, limit).map(|b| Event::new(u.clone(), v.clone(), b))
        };

        if spec.theorem == Theorem::GapPrivF {
            if let Some(e) = ev(&encode_pair(&c.y, &c.z), &c.x, spec.k - spec.l) {
                plans.push(vec![e]);
            }
        }
        let ps = state.programs_y(&c.x, &c.y);
        let qs = state.programs_z(&c.x, &c.y, &c.z);
        // A low pair among the candidate's own programs.
        'own: for p in &ps {
            for q in &qs {
                if let Some(e) = ev(&encode_pair(p, q), &empty, pair_lim) {
                    plans.push(vec![e]);
                    break 'own;
                }
            }
        }
        // GAP_CPQ_E: any new suitable pair advances x.
        if spec.theorem == Theorem::GapCpqE {
            while let Some(&(a, b)) = self.untried.front() {
                let (p, q) = (&self.programs[a], &self.programs[b]);
                if !state.is_suitable(p, q) {
                    if let Some(e) = ev(&encode_pair(p, q), &empty, pair_lim) {
                        plans.push(vec![e]);
                        break;
                    }
                }
                self.untried.pop_front();
            }
        }
        // Existing suitable pairs made into programs for the candidate.
        let mut reuse_budget = 64;
        'reuse: for (p, q, b) in state.table().all_pairs() {
            if b >= pair_lim || !state.is_suitable(p, q) {
                continue;
            }
            reuse_budget -= 1;
            if reuse_budget == 0 {
                break;
            }
            let mut plan = Vec::new();
            if !ps.contains(p) {
                match ev(&c.y, &encode_pair(p, &c.x), eps) {
                    Some(e) => plan.push(e),
                    None => continue 'reuse,
                }
            }
            if !qs.contains(q) {
                match ev(&c.z, &encode_pair(q, &zg), eps) {
                    Some(e) => plan.push(e),
                    None => continue 'reuse,
                }
            }
            if !plan.is_empty() {
                plans.push(plan);
                break;
            }
        }
        // PRIV variants: any new program pair is unsimplified.
        if matches!(spec.theorem, Theorem::GapPrivE | Theorem::GapPrivF) {
            let mut plan = Vec::new();
            if qs.is_empty() || ps.is_empty() {
                let q = self.fresh();
                plan.push(Event::new(q.clone(), empty.clone(), q_lim - 1));
                plan.push(Event::new(c.z.clone(), encode_pair(&q, &zg), eps - 1));
            }
            let p = self.fresh();
            plan.push(Event::new(p.clone(), empty.clone(), p_lim - 1));
            plan.push(Event::new(c.y.clone(), encode_pair(&p, &c.x), eps - 1));
            plans.push(plan);
        }
        // A fresh low pair.
        let p = self.fresh();
        let q = self.fresh();
        plans.push(vec![
            Event::new(p.clone(), empty.clone(), p_lim - 1),
            Event::new(q.clone(), empty.clone(), q_lim - 1),
            Event::new(encode_pair(&p, &q), empty.clone(), pair_lim - 1),
            Event::new(c.y.clone(), encode_pair(&p, &c.x), eps - 1),
            Event::new(c.z.clone(), encode_pair(&q, &zg), eps - 1),
        ]);
        plans
    }
}

impl Adversary for GreedyAdversary {
    fn name(&self) -> String {
        "greedy".to_string()
    }

    fn next_event(&mut self, state: &GameState) -> Option<Event> {
        let empty = BitString::empty();
        loop {
            if let Some(e) = self.queue.pop_front() {
                // Skip steps that no longer tighten anything.
                if state.table().get(&e.u, &e.v).is_some_and(|b| b <= e.bound) {
                    continue;
                }
                if e.v == empty && e.u.len() == FRESH_LEN {
                    let k = self.programs.len();
                    self.programs.push(e.u.clone());
                    self.untried.extend((0..k).flat_map(|i| [(i, k), (k, i)]));
                    self.untried.push_back((k, k));
                }
                return Some(e);
            }
            let plans = self.plans(state);
            // A plan whose first step is blocked by the budget is dropped;
            // with none left the stream ends.
            let best = plans
                .into_iter()
                .filter(|p| p.iter().all(|e| state.table().check(&e.u, &e.v, e.bound).is_ok()))
                .min_by_key(|p| p.len())?;
            self.queue.extend(best);
        }
    }
}

/// Replays the adversary events of a transcript-format file.
#[derive(Debug, Clone)]
pub struct ScriptedAdversary {
    label: String,
    events: VecDeque<Event>,
}

impl ScriptedAdversary {
    pub fn new(label: impl Into<String>, events: Vec<Event>) -> Self {
        Self {
            label: label.into(),
            events: events.into(),
        }
    }

    pub fn from_records(label: impl Into<String>, records: &[Record]) -> Self {
        let events = records
            .iter()
            .filter_map(|r| match r {
                Record::Tighten { u, v, bound, .. } => Some(Event::new(u.clone(), v.clone(), *bound)),
                _ => None,
            })
            .collect();
        Self::new(label, events)
    }

    pub fn from_text(label: impl Into<String>, text: &str) -> Result<Self, GameError> {
        Ok(Self::from_records(label, &parse_transcript(text)?))
    }

    pub fn from_file(path: &Path) -> Result<Self, GameError> {
        let text = std::fs::read_to_string(path).map_err(|e| GameError::Io(format!("{}: {e}", path.display())))?;
        Self::from_text(format!("script:{}", path.display()), &text)
    }

    pub fn remaining(&self) -> usize {
        self.events.len()
    }
}

impl Adversary for ScriptedAdversary {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn next_event(&mut self, _state: &GameState) -> Option<Event> {
        self.events.pop_front()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerCase {
    /// Raised bounds and repeated equal bounds mixed with a real break.
    Monotonicity,
    /// Declarations past the counting budget at low levels.
    BudgetFlood,
    /// Breaks aimed at the length-lex first triples.
    LexFirstAttack,
}

impl CornerCase {
    pub const ALL: [CornerCase; 3] = [
        CornerCase::Monotonicity,
        CornerCase::BudgetFlood,
        CornerCase::LexFirstAttack,
    ];
}

impl fmt::Display for CornerCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CornerCase::Monotonicity => "monotonicity",
            CornerCase::BudgetFlood => "budget_flood",
            CornerCase::LexFirstAttack => "lex_first_attack",
        })
    }
}

/// Events of a low pair aimed at `(x, y, z)`, plus the joint bound for
/// GAP_PRIV_F.
fn attack(spec: &GameSpec, x: &BitString, y: &BitString, z: &BitString, p: &BitString, q: &BitString) -> Vec<Event> {
    let (p_lim, q_lim) = spec.program_limits();
    let empty = BitString::empty();
    let zg = if spec.theorem.chained() { y } else { x };
    let mut out = vec![
        Event::new(p.clone(), empty.clone(), p_lim - 1),
        Event::new(q.clone(), empty.clone(), q_lim - 1),
        Event::new(y.clone(), encode_pair(p, x), spec.epsilon - 1),
        Event::new(z.clone(), encode_pair(q, zg), spec.epsilon - 1),
        Event::new(encode_pair(p, q), empty, spec.j + spec.epsilon - 1),
    ];
    if spec.theorem == Theorem::GapPrivF {
        out.push(Event::new(encode_pair(y, z), x.clone(), spec.k - spec.l - 1));
    }
    out
}

/// The three scripted corner cases for a spec, as transcript records.
pub fn corner_scripts(spec: &GameSpec) -> Vec<(CornerCase, Vec<Record>)> {
    let (n, m, k) = spec.lengths();
    let zero = |len| BitString::zeros(len);
    let key = |i: u128| BitString::from_index(i, 14);
    let mut out = Vec::new();
    let wrap = |events: Vec<Event>| -> Vec<Record> {
        events
            .into_iter()
            .enumerate()
            .map(|(i, e)| Record::Tighten {
                event: i as u64 + 1,
                u: e.u,
                v: e.v,
                bound: e.bound,
            })
            .collect()
    };

    // Monotonicity.
    let (a, v) = (key(1), key(2));
    let mut events = vec![
        Event::new(a.clone(), v.clone(), 5),
        Event::new(a.clone(), v.clone(), 7),
        Event::new(a.clone(), v.clone(), 5),
        Event::new(a.clone(), v.clone(), 3),
        Event::new(a.clone(), v.clone(), 4),
    ];
    let (p, q) = (key(3), key(4));
    let atk = attack(spec, &zero(n), &zero(m), &zero(k), &p, &q);
    events.extend(atk.iter().cloned());
    for e in &atk {
        events.push(Event::new(e.u.clone(), e.v.clone(), e.bound + 1));
        events.push(e.clone());
    }
    out.push((CornerCase::Monotonicity, wrap(events)));

    // Budget flood: level 0 and 1 under one condition, low unconditional
    // levels, and every y under one program condition.
    let mut events = Vec::new();
    let cond = encode_pair(&key(5), &zero(n));
    for i in 0..6u128 {
        events.push(Event::new(BitString::from_index(i, m), cond.clone(), 0));
    }
    for i in 0..10u128 {
        events.push(Event::new(key(100 + i), cond.clone(), 1));
    }
    for i in 0..20u128 {
        events.push(Event::unconditional(key(200 + i), (i % 3) as u32));
    }
    for i in 0..(1u128 << (spec.epsilon + 1)) {
        events.push(Event::new(
            BitString::from_index(i, m),
            encode_pair(&key(6), &zero(n)),
            spec.epsilon - 1,
        ));
    }
    events.extend(attack(spec, &zero(n), &zero(m), &zero(k), &key(7), &key(8)));
    out.push((CornerCase::BudgetFlood, wrap(events)));

    // Attacks on the first triples in length-lex order, each with fresh
    // programs; on network (e) the advanced x is attacked as well.
    let mut events = Vec::new();
    let mut x = zero(n);
    for i in 0..6u128 {
        let (p, q) = (key(300 + 2 * i), key(301 + 2 * i));
        let y = BitString::from_index(i / 2, m);
        let z = BitString::from_index(i % 2, k);
        events.extend(attack(spec, &x, &y, &z, &p, &q));
        events.extend(attack(spec, &x, &zero(m), &zero(k), &key(400 + i), &key(500 + i)));
        if let Some(next) = x.same_length_successor() {
            x = next;
        }
    }
    out.push((CornerCase::LexFirstAttack, wrap(events)));
    out
}

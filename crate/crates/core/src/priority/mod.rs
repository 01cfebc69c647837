//! Finite-injury priority constructions driven by a watchlist engine.
//!
//! A construction keeps a list of semi-decidable conditions. Every sweep
//! (stage) gives each pending condition one more unit of fuel, in insertion
//! order; a condition that holds is removed and its action runs at once, so
//! later conditions in the same sweep see the updated sets.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::coding::{FinSet, Nat};
use crate::ips::{eval, Outcome};

mod fm;
mod game;
mod ijd;

pub use fm::*;
pub use game::*;
pub use ijd::*;

/// A requirement of one of the constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReqId {
    /// Keep `phi^B_e(a_e)` from computing `A(a_e)`.
    A(u64),
    /// Keep `phi^A_e(b_e)` from computing `B(b_e)`.
    B(u64),
    /// Coding of `K` into `A`.
    P(u64),
    /// `phi_e` is not an `i`-d-reduction of `B` to `A`.
    N(u64),
    /// `N^i_e`.
    Ni { e: u64, i: u64 },
}

impl fmt::Display for ReqId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReqId::A(e) => write!(f, "a{e}"),
            ReqId::B(e) => write!(f, "b{e}"),
            ReqId::P(e) => write!(f, "P{e}"),
            ReqId::N(e) => write!(f, "N{e}"),
            ReqId::Ni { e, i } => write!(f, "N{e}^{i}"),
        }
    }
}

impl Serialize for ReqId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Which of the constructed sets a watched computation may query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleSel {
    None,
    A,
    B,
}

#[derive(Debug, Clone)]
struct Probe {
    fuel: u64,
    version: u64,
    outcome: Outcome,
}

/// "`phi_program(args)` converges", relative to the selected set.
#[derive(Debug, Clone, Serialize)]
pub struct WatchEntry {
    pub id: u64,
    pub requirement: ReqId,
    pub program: Nat,
    pub args: Vec<Nat>,
    pub oracle: OracleSel,
    /// Fuel granted so far.
    pub progress: u64,
    #[serde(skip)]
    probe: Option<Probe>,
}

impl WatchEntry {
    /// Grants one more unit of fuel; returns the outcome when the condition holds.
    ///
    /// Evaluation is monotone in fuel, so a run with spare fuel is reused
    /// until the oracle changes: the entry fires exactly when a run with
    /// fuel `progress` would converge.
    fn advance(&mut self, a: &FinSet, b: &FinSet, versions: (u64, u64)) -> Option<Outcome> {
        self.progress += 1;
        let version = match self.oracle {
            OracleSel::None => 0,
            OracleSel::A => versions.0,
            OracleSel::B => versions.1,
        };
        let stale = match &self.probe {
            Some(p) if p.version == version => !p.outcome.converged() && self.progress > p.fuel,
            _ => true,
        };
        if stale {
            let fuel = self.progress.saturating_mul(2).max(64);
            let outcome = match self.oracle {
                OracleSel::None => eval(&self.program, &self.args, None, fuel),
                OracleSel::A => eval(&self.program, &self.args, Some(a), fuel),
                OracleSel::B => eval(&self.program, &self.args, Some(b), fuel),
            };
            self.probe = Some(Probe { fuel, version, outcome });
        }
        match &self.probe.as_ref()?.outcome {
            o @ Outcome::Converged { steps, .. } if *steps <= self.progress => Some(o.clone()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Fired,
    Placed,
    Injured,
    Moved,
    Watched,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub stage: u64,
    pub event: EventKind,
    pub requirement: ReqId,
    pub data: serde_json::Value,
}

/// A converged watched computation, as recorded when its action ran.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Firing {
    pub stage: u64,
    pub fuel: u64,
    pub args: Vec<Nat>,
    pub value: Nat,
    #[serde(rename = "use")]
    pub use_: Nat,
    /// The queried set below the use, at firing time.
    pub oracle_below_use: Vec<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReqState {
    pub program: Nat,
    pub witness: Option<u64>,
    /// Successive witnesses, oldest first.
    pub history: Vec<u64>,
    pub injuries: u64,
    pub last_injured: Option<u64>,
    /// The watched computation has been acted upon and not injured since.
    pub handled: bool,
    pub firing: Option<Firing>,
    /// Counter `p` of the d-reduction requirements.
    pub p: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Construction {
    Fm { max_requirement: u64 },
    FmReordered { schedule: Vec<u64> },
    Ijd { i: u64, j: u64, max_requirement: u64 },
    Dnotnd { max_requirement: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct PriorityState {
    pub construction: Construction,
    pub stage: u64,
    pub a: FinSet,
    pub b: FinSet,
    pub requirements: BTreeMap<ReqId, ReqState>,
    /// `C_x`: priorities of the requirements relying on `x ∉ A`.
    pub c_lists: BTreeMap<u64, Vec<u64>>,
    /// `C'_x`: the `(e, i)` relying on `x ∉ A`.
    pub c_prime: BTreeMap<u64, Vec<(u64, u64)>>,
    pub watchlist: Vec<WatchEntry>,
    pub log: Vec<Event>,
    /// `(stage, requirement)` pairs where a tally exceeded its bound.
    pub bound_violations: Vec<(u64, ReqId)>,
    #[serde(skip)]
    versions: (u64, u64),
    #[serde(skip)]
    next_id: u64,
}

impl PriorityState {
    fn new(construction: Construction) -> PriorityState {
        PriorityState {
            construction,
            stage: 0,
            a: FinSet::new(),
            b: FinSet::new(),
            requirements: BTreeMap::new(),
            c_lists: BTreeMap::new(),
            c_prime: BTreeMap::new(),
            watchlist: Vec::new(),
            log: Vec::new(),
            bound_violations: Vec::new(),
            versions: (0, 0),
            next_id: 0,
        }
    }

    fn emit(&mut self, event: EventKind, requirement: ReqId, data: serde_json::Value) {
        self.log.push(Event { stage: self.stage, event, requirement, data });
    }

    fn req(&mut self, r: ReqId) -> &mut ReqState {
        self.requirements.entry(r).or_default()
    }

    fn watch(&mut self, requirement: ReqId, program: Nat, args: Vec<Nat>, oracle: OracleSel) {
        let id = self.next_id;
        self.next_id += 1;
        let data = serde_json::json!({ "args": args, "oracle": oracle });
        self.watchlist.push(WatchEntry { id, requirement, program, args, oracle, progress: 0, probe: None });
        self.emit(EventKind::Watched, requirement, data);
    }

    fn unwatch(&mut self, requirement: ReqId) {
        self.watchlist.retain(|w| w.requirement != requirement);
    }

    fn put_a(&mut self, x: u64, r: ReqId) {
        if self.a.insert(x) {
            self.versions.0 += 1;
        }
        self.emit(EventKind::Placed, r, serde_json::json!({ "set": "A", "x": x }));
    }

    fn put_b(&mut self, x: u64, r: ReqId) {
        if self.b.insert(x) {
            self.versions.1 += 1;
        }
        self.emit(EventKind::Placed, r, serde_json::json!({ "set": "B", "x": x }));
    }

    fn injure(&mut self, r: ReqId, data: serde_json::Value) {
        let stage = self.stage;
        let st = self.req(r);
        st.injuries += 1;
        st.last_injured = Some(stage);
        st.handled = false;
        self.emit(EventKind::Injured, r, data);
    }

    /// One sweep: advance every entry present at its start, in insertion order.
    fn sweep(&mut self, mut act: impl FnMut(&mut PriorityState, WatchEntry, Outcome)) {
        let ids: Vec<u64> = self.watchlist.iter().map(|w| w.id).collect();
        for id in ids {
            let Some(pos) = self.watchlist.iter().position(|w| w.id == id) else {
                continue;
            };
            let (a, b, versions) = (&self.a, &self.b, self.versions);
            if let Some(out) = self.watchlist[pos].advance(a, b, versions) {
                let w = self.watchlist.remove(pos);
                act(self, w, out);
            }
        }
    }

    /// The trace as JSON lines.
    pub fn trace(&self) -> String {
        let mut out = String::new();
        for e in &self.log {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    /// Events of the given kind.
    pub fn events(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.log.iter().filter(move |e| e.event == kind)
    }
}

/// The elements of `D_v` when the canonical index is small enough to expand.
fn small_finset(v: &Nat) -> Option<FinSet> {
    (v.bits_hint() <= 1 << 16).then(|| crate::coding::finset_decode(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Met,
    Pending,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RequirementReport {
    pub requirement: ReqId,
    pub witness: Option<u64>,
    pub injuries: u64,
    pub last_injured: Option<u64>,
    /// First stage after which the requirement was never injured again.
    pub quiet_since: u64,
    pub status: Status,
    pub history: Vec<u64>,
}

/// Per-requirement summary, judged against the final sets.
pub fn requirement_report(st: &PriorityState) -> Vec<RequirementReport> {
    st.requirements
        .iter()
        .map(|(&r, s)| RequirementReport {
            requirement: r,
            witness: s.witness,
            injuries: s.injuries,
            last_injured: s.last_injured,
            quiet_since: s.last_injured.unwrap_or(0),
            status: if requirement_met(st, r) { Status::Met } else { Status::Pending },
            history: s.history.clone(),
        })
        .collect()
}

fn requirement_met(st: &PriorityState, r: ReqId) -> bool {
    match r {
        ReqId::A(_) | ReqId::B(_) => fm_disagreement(st, r) == Some(true),
        ReqId::P(e) => {
            let discovered = st.log.iter().any(|ev| ev.requirement == r && ev.event == EventKind::Fired);
            discovered && p_block(st, e).iter().any(|&x| st.a.contains(x))
        }
        ReqId::N(_) | ReqId::Ni { .. } => d_clause_holds(st, r) == Some(true),
    }
}

/// Elements `P_e` may place in `A`.
pub fn p_block(st: &PriorityState, e: u64) -> Vec<u64> {
    match st.construction {
        Construction::Ijd { j, .. } => (j * e..j * e + j).collect(),
        Construction::Dnotnd { .. } => (0..=e).map(|n| crate::coding::pair_u64(e, n)).collect(),
        _ => Vec::new(),
    }
}

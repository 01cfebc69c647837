//! Two r.e. sets of incomparable Turing degree.

use serde_json::json;

use super::{injury_bounds, Construction, EventKind, Firing, OracleSel, PriorityState, ReqId, Schedule};
use crate::coding::{FinSet, Nat};
use crate::ips::{cnst, comp, encode, eval, proj, Ast, Outcome};

/// Tallies are compared with the closed-form bounds this often.
const BOUND_CHECK_EVERY: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    A,
    B,
}

impl Side {
    fn of(r: ReqId) -> Side {
        match r {
            ReqId::A(_) => Side::A,
            _ => Side::B,
        }
    }

    fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

fn index_of(r: ReqId) -> u64 {
    match r {
        ReqId::A(e) | ReqId::B(e) => e,
        _ => unreachable!("not a Friedberg–Muchnik requirement"),
    }
}

struct Fm {
    order: Vec<ReqId>,
    bounds: Vec<Nat>,
}

impl Fm {
    fn rank(&self, r: ReqId) -> usize {
        self.order.iter().position(|&x| x == r).expect("requirement in the order")
    }

    fn set(st: &PriorityState, side: Side) -> &FinSet {
        match side {
            Side::A => &st.a,
            Side::B => &st.b,
        }
    }

    /// `μy [y ∉ Y, y ≥ every use of Y by a handled computation, y no current Y-witness]`.
    fn fresh(&self, st: &PriorityState, side: Side) -> u64 {
        let mut floor = 0u64;
        let mut taken = Vec::new();
        for (&r, s) in &st.requirements {
            if Side::of(r) == side {
                taken.extend(s.witness);
            } else if s.handled {
                if let Some(f) = &s.firing {
                    floor = floor.max(f.use_.to_u64().expect("use of a finite set"));
                }
            }
        }
        (floor..).find(|y| !Fm::set(st, side).contains(*y) && !taken.contains(y)).expect("unbounded search")
    }

    fn watch(&self, st: &mut PriorityState, r: ReqId) {
        let s = &st.requirements[&r];
        let (program, w) = (s.program.clone(), s.witness.expect("witness"));
        let oracle = match Side::of(r) {
            Side::A => OracleSel::B,
            Side::B => OracleSel::A,
        };
        st.watch(r, program, vec![Nat::from(w)], oracle);
    }

    fn relocate(&self, st: &mut PriorityState, r: ReqId, favor: ReqId) {
        st.unwatch(r);
        let old = st.requirements[&r].witness;
        let y = self.fresh(st, Side::of(r));
        st.injure(r, json!({ "favor": favor }));
        let s = st.req(r);
        s.witness = Some(y);
        s.history.push(y);
        s.firing = None;
        st.emit(EventKind::Moved, r, json!({ "from": old, "to": y }));
        self.watch(st, r);
    }

    fn act(&self, st: &mut PriorityState, r: ReqId, fuel: u64, out: Outcome) {
        let Outcome::Converged { value, use_, .. } = out else {
            unreachable!("only converged entries fire");
        };
        let side = Side::of(r);
        let witness = st.requirements[&r].witness.expect("witness");
        let u = use_.to_u64().expect("use of a finite set");
        let queried = Fm::set(st, side.other()).iter().filter(|&x| x < u).collect();
        let stage = st.stage;
        let s = st.req(r);
        s.handled = true;
        s.firing = Some(Firing {
            stage,
            fuel,
            args: vec![Nat::from(witness)],
            value: value.clone(),
            use_: use_.clone(),
            oracle_below_use: queried,
        });
        st.emit(EventKind::Fired, r, json!({ "value": value, "use": use_, "fuel": fuel, "witness": witness }));
        let lower: Vec<ReqId> = self.order[self.rank(r) + 1..].iter().copied().filter(|&x| Side::of(x) != side).collect();
        // protect the use from lower requirements that have not acted yet
        for &y in &lower {
            let ys = &st.requirements[&y];
            if !ys.handled && ys.witness.is_some_and(|w| w < u) {
                self.relocate(st, y, r);
            }
        }
        if value.is_zero() {
            match side {
                Side::A => st.put_a(witness, r),
                Side::B => st.put_b(witness, r),
            }
            // handled lower computations that looked at the new element
            for &y in &lower {
                let ys = &st.requirements[&y];
                let looked = ys.firing.as_ref().is_some_and(|f| f.use_ > Nat::from(witness));
                if ys.handled && looked {
                    self.relocate(st, y, r);
                }
            }
        }
    }

    fn check_bounds(&self, st: &mut PriorityState) {
        for (r, bound) in self.order.iter().zip(&self.bounds) {
            if Nat::from(st.requirements[r].injuries) > *bound {
                st.bound_violations.push((st.stage, *r));
            }
        }
    }

    fn run(&self, mut st: PriorityState, programs: &dyn Fn(u64) -> Nat, stages: u64) -> PriorityState {
        for &r in &self.order {
            let e = index_of(r);
            let s = st.req(r);
            s.program = programs(e);
            s.witness = Some(e);
            s.history.push(e);
        }
        for &r in &self.order {
            self.watch(&mut st, r);
        }
        for stage in 1..=stages {
            st.stage = stage;
            st.sweep(|st, w, out| self.act(st, w.requirement, w.progress, out));
            if stage % BOUND_CHECK_EVERY == 0 || stage == stages {
                self.check_bounds(&mut st);
            }
        }
        st
    }
}

/// Requirement `a_e`/`b_e` uses the program with index `e`.
pub fn fm_run(max_requirement: u64, stages: u64) -> PriorityState {
    fm_run_with(max_requirement, stages, &|e| Nat::from(e))
}

/// As [`fm_run`], with the program of requirement `e` given by `programs(e)`.
pub fn fm_run_with(max_requirement: u64, stages: u64, programs: &dyn Fn(u64) -> Nat) -> PriorityState {
    let order = Schedule::interleaved(max_requirement as usize + 1).order();
    let fm = Fm { bounds: injury_bounds(&order), order };
    fm.run(PriorityState::new(Construction::Fm { max_requirement }), programs, stages)
}

/// The construction under the block order of `schedule`.
pub fn fm_reordered_run(schedule: &Schedule, stages: u64) -> PriorityState {
    fm_reordered_run_with(schedule, stages, &|e| Nat::from(e))
}

pub fn fm_reordered_run_with(schedule: &Schedule, stages: u64, programs: &dyn Fn(u64) -> Nat) -> PriorityState {
    assert!(!schedule.0.is_empty(), "empty schedule");
    let order = schedule.order();
    let fm = Fm { bounds: injury_bounds(&order), order };
    fm.run(PriorityState::new(Construction::FmReordered { schedule: schedule.0.clone() }), programs, stages)
}

/// Programs that look at the oracle, so placements can injure.
pub fn oracle_programs(e: u64) -> Nat {
    let q = |k: u64| comp(Ast::OracleQuery, vec![cnst(k)]);
    let p = match e % 4 {
        0 => comp(Ast::Eq, vec![q(e + 1), cnst(1u64)]),
        1 => q(e),
        2 => comp(Ast::Cond, vec![q(2 * e), cnst(0u64), cnst(1u64)]),
        _ => comp(Ast::Eq, vec![comp(Ast::OracleQuery, vec![proj(1, 1)]), cnst(0u64)]),
    };
    encode(&p)
}

/// Replays a handled computation against the final sets: `Some(true)` when it
/// reproduces the recorded value and the witness's membership differs from it.
pub fn fm_disagreement(st: &PriorityState, r: ReqId) -> Option<bool> {
    let s = st.requirements.get(&r)?;
    let f = s.firing.as_ref().filter(|_| s.handled)?;
    let (own, oracle) = match Side::of(r) {
        Side::A => (&st.a, &st.b),
        Side::B => (&st.b, &st.a),
    };
    let again = eval(&s.program, &f.args, Some(oracle), f.fuel);
    let w = s.witness?;
    let bit = Nat::from(own.contains(w) as u64);
    Some(again.value() == Some(&f.value) && f.value != bit)
}

/// Re-runs a recorded computation with the oracle changed at and above its use.
pub fn fm_use_replay(st: &PriorityState, r: ReqId, extra: &[u64]) -> Option<bool> {
    let s = st.requirements.get(&r)?;
    let f = s.firing.as_ref()?;
    let u = f.use_.to_u64()?;
    let mut oracle = FinSet::from_iter(f.oracle_below_use.iter().copied());
    for &x in extra {
        oracle.insert(u + x);
    }
    Some(eval(&s.program, &f.args, Some(&oracle), f.fuel).value() == Some(&f.value))
}

/// Injury bound of every requirement in the run's order.
pub fn fm_bounds(st: &PriorityState) -> Vec<(ReqId, Nat)> {
    let order = match &st.construction {
        Construction::Fm { max_requirement } => Schedule::interleaved(*max_requirement as usize + 1).order(),
        Construction::FmReordered { schedule } => Schedule(schedule.clone()).order(),
        _ => return Vec::new(),
    };
    let bounds = injury_bounds(&order);
    order.into_iter().zip(bounds).collect()
}

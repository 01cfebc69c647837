//! Sets that are `j`-d-complete but not `i`-d-complete, and d-complete but
//! not `n`-d-complete for any `n`.

use serde_json::json;

use super::{small_finset, Construction, EventKind, OracleSel, PriorityState, ReqId};
use crate::coding::{pair_u64, FinSet, Nat};
use crate::ips::Outcome;

/// Requirements `P_e`, `N_e` with `e ≤` this bound take part by default.
pub const DEFAULT_MAX_REQUIREMENT: u64 = 40;

fn value_of(out: &Outcome) -> Nat {
    out.value().cloned().expect("only converged entries fire")
}

/// Places `x` for `P_e`, then injures everything in `victims`. `favor` is the
/// highest priority among the lists of the block when the choice was forced.
fn place_and_injure(st: &mut PriorityState, e: u64, x: u64, victims: Vec<(ReqId, Option<u64>)>, favor: Option<u64>) {
    st.put_a(x, ReqId::P(e));
    for (r, priority) in victims {
        let cause = match (priority, favor) {
            (Some(_), Some(_)) => "priority",
            _ => "forced",
        };
        st.injure(r, json!({ "favor": favor, "priority": priority, "cause": cause, "x": x }));
    }
}

fn list_min(l: Option<&Vec<u64>>) -> Option<u64> {
    l.and_then(|l| l.iter().min().copied())
}

/// Picks the element of the block to put in `A`: one nobody relies on, or
/// else the one whose most important dependant is least important.
fn choose(st: &PriorityState, block: &[u64]) -> (u64, Option<u64>) {
    if let Some(&x) = block.iter().find(|x| st.c_lists.get(x).is_none_or(|l| l.is_empty())) {
        return (x, None);
    }
    let mins: Vec<u64> = block.iter().map(|x| list_min(st.c_lists.get(x)).expect("nonempty")).collect();
    let best = *mins.iter().max().expect("nonempty block");
    let x = block[mins.iter().position(|&m| m == best).expect("max present")];
    (x, mins.iter().min().copied())
}

fn ijd_k_event(st: &mut PriorityState, e: u64, j: u64) {
    let block: Vec<u64> = (j * e..j * e + j).collect();
    st.emit(EventKind::Fired, ReqId::P(e), json!({ "block": block }));
    let (x, favor) = choose(st, &block);
    let mut victims = Vec::new();
    if favor.is_some() {
        let zs = st.c_lists.get(&x).cloned().unwrap_or_default();
        for z in &zs {
            for l in st.c_lists.values_mut() {
                l.retain(|y| y != z);
            }
        }
        victims = zs.into_iter().map(|z| (ReqId::N(z), Some(z))).collect();
    }
    let rewatch: Vec<u64> = victims.iter().map(|(r, _)| match r {
        ReqId::N(z) => *z,
        _ => unreachable!(),
    }).collect();
    place_and_injure(st, e, x, victims, favor);
    for z in rewatch {
        let s = st.req(ReqId::N(z));
        s.p += 1;
        let (p, program) = (s.p, s.program.clone());
        st.watch(ReqId::N(z), program, vec![Nat::from(pair_u64(z, p))], OracleSel::None);
    }
}

fn ijd_n_event(st: &mut PriorityState, e: u64, i: u64, fuel: u64, out: Outcome) {
    let r = ReqId::N(e);
    let p = st.requirements[&r].p;
    let v = value_of(&out);
    let d = small_finset(&v);
    let ok = d.as_ref().is_some_and(|d| d.len() as u64 <= i && d.iter().all(|z| !st.a.contains(z)));
    let s = st.req(r);
    s.handled = true;
    st.emit(EventKind::Fired, r, json!({ "p": p, "value": v, "fuel": fuel, "d": d, "accepted": ok }));
    if ok {
        let x = pair_u64(e, p);
        st.req(r).witness = Some(x);
        st.req(r).history.push(x);
        st.put_b(x, r);
        for z in d.expect("checked").iter() {
            st.c_lists.entry(z).or_default().push(e);
        }
    }
}

/// `A` is `j`-d-complete and not `i`-d-complete, built for `e ≤ max_requirement`.
pub fn ijd_run(i: u64, j: u64, stages: u64) -> PriorityState {
    ijd_run_bounded(i, j, stages, DEFAULT_MAX_REQUIREMENT)
}

pub fn ijd_run_bounded(i: u64, j: u64, stages: u64, max_requirement: u64) -> PriorityState {
    ijd_run_with(i, j, stages, max_requirement, &|e| Nat::from(e))
}

/// As [`ijd_run_bounded`], with `N_e` watching the program `programs(e)`.
/// `P_e` always watches `e ∈ K`.
pub fn ijd_run_with(i: u64, j: u64, stages: u64, max_requirement: u64, programs: &dyn Fn(u64) -> Nat) -> PriorityState {
    assert!(i < j, "ijd_run needs i < j");
    let mut st = PriorityState::new(Construction::Ijd { i, j, max_requirement });
    for e in 0..=max_requirement {
        st.req(ReqId::P(e)).program = Nat::from(e);
        st.watch(ReqId::P(e), Nat::from(e), vec![Nat::from(e)], OracleSel::None);
        let prog = programs(e);
        st.req(ReqId::N(e)).program = prog.clone();
        st.watch(ReqId::N(e), prog, vec![Nat::from(pair_u64(e, 0))], OracleSel::None);
    }
    for stage in 1..=stages {
        st.stage = stage;
        st.sweep(|st, w, out| match w.requirement {
            ReqId::P(e) => ijd_k_event(st, e, j),
            ReqId::N(e) => ijd_n_event(st, e, i, w.progress, out),
            _ => unreachable!(),
        });
    }
    st
}

/// `¬∃e' ∀n ≤ e' [<e', n> ∈ P]`.
fn covers_no_block(d: &FinSet) -> bool {
    !(0..d.len() as u64).any(|e2| (0..=e2).all(|n| d.contains(pair_u64(e2, n))))
}

fn dnotnd_k_event(st: &mut PriorityState, e: u64) {
    let block: Vec<u64> = (0..=e).map(|n| pair_u64(e, n)).collect();
    st.emit(EventKind::Fired, ReqId::P(e), json!({ "block": block }));
    let (x, favor) = choose(st, &block);
    let dependants = st.c_prime.get(&x).cloned().unwrap_or_default();
    let in_c = st.c_lists.get(&x).cloned().unwrap_or_default();
    for (z, i) in &dependants {
        for l in st.c_prime.values_mut() {
            l.retain(|y| y != &(*z, *i));
        }
        let pz = pair_u64(*i, *z);
        for l in st.c_lists.values_mut() {
            l.retain(|y| *y != pz);
        }
    }
    let victims = dependants
        .iter()
        .map(|&(z, i)| {
            let pz = pair_u64(i, z);
            (ReqId::Ni { e: z, i }, in_c.contains(&pz).then_some(pz))
        })
        .collect();
    place_and_injure(st, e, x, victims, favor);
    for (z, i) in dependants {
        let r = ReqId::Ni { e: z, i };
        let s = st.req(r);
        s.p += 1;
        let (p, program) = (s.p, s.program.clone());
        st.watch(r, program, vec![Nat::from(pair_u64(z, pair_u64(i, p)))], OracleSel::None);
    }
}

fn dnotnd_n_event(st: &mut PriorityState, e: u64, i: u64, fuel: u64, out: Outcome) {
    let r = ReqId::Ni { e, i };
    let p = st.requirements[&r].p;
    let v = value_of(&out);
    let d = small_finset(&v);
    let ok = d.as_ref().is_some_and(|d| d.iter().all(|z| !st.a.contains(z)) && d.len() as u64 <= i);
    st.req(r).handled = true;
    st.emit(EventKind::Fired, r, json!({ "p": p, "value": v, "fuel": fuel, "d": d, "accepted": ok }));
    if ok {
        let x = pair_u64(e, pair_u64(i, p));
        st.req(r).witness = Some(x);
        st.req(r).history.push(x);
        st.put_b(x, r);
        let d = d.expect("checked");
        let guarded = covers_no_block(&d);
        for z in d.iter() {
            st.c_prime.entry(z).or_default().push((e, i));
            if guarded {
                st.c_lists.entry(z).or_default().push(pair_u64(i, e));
            }
        }
    }
}

/// `A` is d-complete and not `n`-d-complete for any `n`. Requirements
/// `N^i_e` with priority `<i, e> ≤ max_requirement` take part, and `P_e` for
/// `e ≤ max_requirement`.
pub fn dnotnd_run(stages: u64) -> PriorityState {
    dnotnd_run_bounded(stages, DEFAULT_MAX_REQUIREMENT)
}

pub fn dnotnd_run_bounded(stages: u64, max_requirement: u64) -> PriorityState {
    dnotnd_run_with(stages, max_requirement, &|e| Nat::from(e))
}

/// As [`dnotnd_run_bounded`], with `N^i_e` watching the program `programs(e)`.
pub fn dnotnd_run_with(stages: u64, max_requirement: u64, programs: &dyn Fn(u64) -> Nat) -> PriorityState {
    let mut st = PriorityState::new(Construction::Dnotnd { max_requirement });
    for e in 0..=max_requirement {
        st.req(ReqId::P(e)).program = Nat::from(e);
        st.watch(ReqId::P(e), Nat::from(e), vec![Nat::from(e)], OracleSel::None);
    }
    for k in 0..=max_requirement {
        let (i, e) = crate::coding::unpair_u64(k);
        let r = ReqId::Ni { e, i };
        let prog = programs(e);
        st.req(r).program = prog.clone();
        st.watch(r, prog, vec![Nat::from(pair_u64(e, pair_u64(i, 0)))], OracleSel::None);
    }
    for stage in 1..=stages {
        st.stage = stage;
        st.sweep(|st, w, out| match w.requirement {
            ReqId::P(e) => dnotnd_k_event(st, e),
            ReqId::Ni { e, i } => dnotnd_n_event(st, e, i, w.progress, out),
            _ => unreachable!(),
        });
    }
    st
}

/// The last accepted `D`-set of a d-reduction requirement, from the log.
fn last_accepted(st: &PriorityState, r: ReqId) -> Option<(Option<FinSet>, bool)> {
    let ev = st.log.iter().rev().find(|ev| ev.requirement == r && ev.event == EventKind::Fired)?;
    let d: Option<FinSet> = serde_json::from_value::<Option<Vec<u64>>>(ev.data["d"].clone())
        .ok()
        .flatten()
        .map(FinSet::from_iter);
    Some((d, ev.data["accepted"] == json!(true)))
}

/// `N` clause against the final sets: `Some(true)` when the last handled
/// computation is a non-reduction witnessed by `B` and `A`.
pub fn d_clause_holds(st: &PriorityState, r: ReqId) -> Option<bool> {
    let s = st.requirements.get(&r)?;
    if !s.handled {
        return None;
    }
    let i = match (r, &st.construction) {
        (ReqId::N(_), Construction::Ijd { i, .. }) => *i,
        (ReqId::Ni { i, .. }, _) => i,
        _ => return None,
    };
    let (d, accepted) = last_accepted(st, r)?;
    let Some(d) = d else {
        return Some(false);
    };
    if d.len() as u64 > i {
        return Some(true);
    }
    let meets = d.iter().any(|z| st.a.contains(z));
    let in_b = accepted && s.witness.is_some_and(|w| st.b.contains(w));
    Some(in_b != meets)
}

/// Every `B` insertion had its `D`-set outside `A` at that moment (log replay).
pub fn b_insertions_clean(st: &PriorityState) -> bool {
    let mut a = FinSet::new();
    let mut pending: Option<FinSet> = None;
    for ev in &st.log {
        match ev.event {
            EventKind::Fired => {
                pending = ev.data.get("d").and_then(|d| serde_json::from_value::<Vec<u64>>(d.clone()).ok()).map(FinSet::from_iter);
            }
            EventKind::Placed if ev.data["set"] == "A" => {
                a.insert(ev.data["x"].as_u64().expect("element"));
            }
            EventKind::Placed => match pending.take() {
                Some(d) if d.iter().all(|z| !a.contains(z)) => {}
                _ => return false,
            },
            _ => {}
        }
    }
    true
}

/// Injuries charged to priority were in favour of a strictly higher one.
pub fn injuries_respect_priority(st: &PriorityState) -> bool {
    st.events(EventKind::Injured).all(|ev| match ev.data["cause"].as_str() {
        Some("priority") => ev.data["favor"].as_u64() < ev.data["priority"].as_u64(),
        _ => true,
    })
}

/// `P_e` for every discovered `e`: its block meets `A`.
pub fn k_events_placed(st: &PriorityState) -> Vec<(u64, bool)> {
    st.events(EventKind::Fired)
        .filter_map(|ev| match ev.requirement {
            ReqId::P(e) => Some((e, super::p_block(st, e).iter().any(|&x| st.a.contains(x)))),
            _ => None,
        })
        .collect()
}

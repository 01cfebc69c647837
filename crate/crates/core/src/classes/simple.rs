//! Simple, retraceable and effectively simple sets; deficiency sets.

use serde::Serialize;

use super::{dsl_smn1, list_member_index, ClassError, SetHandle, SetValue, Verdict, Witness, WitnessKind};
use crate::coding::{FinSet, Nat};
use crate::ips::dsl::{
    clock, cond, if_, is_eq, ne, not, oracle, pair, set, succ, univ, v, while_, n, Func,
};
use crate::ips::{add, comp, encode, eval, proj, try_decode, Ast, Outcome};
use crate::re_sets::post_combiner;

/// One element of Post's simple set with the index that put it there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PostMember {
    pub e: u64,
    pub x: u64,
    /// Least stage `t` with `x ∈ W_{e,t}`.
    pub discovery: u64,
}

/// Post's simple set up to stage `stage`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PostSimple {
    pub stage: u64,
    pub members: Vec<PostMember>,
}

impl PostSimple {
    pub fn set(&self) -> FinSet {
        self.at(self.stage)
    }

    /// `S_t` for `t ≤ stage`: the choice of each `e` is final once discovered.
    pub fn at(&self, t: u64) -> FinSet {
        FinSet::from_iter(self.members.iter().filter(|m| m.discovery <= t).map(|m| m.x))
    }
}

/// For each `e`, the element `x > 2e` of `W_e` found first: least
/// `(discovery, x)`, with discovery at most `s`.
pub fn post_simple(s: u64) -> PostSimple {
    let mut members = Vec::new();
    for e in 0..s / 2 {
        let en = Nat::from(e);
        if try_decode(&en).is_none() {
            continue;
        }
        let mut best: Option<(u64, u64)> = None;
        for x in 2 * e + 1..s {
            let cap = best.map_or(s, |b| b.0);
            if x + 1 > cap {
                break;
            }
            if let Outcome::Converged { steps, .. } = eval(&en, &[Nat::from(x)], None, cap) {
                let d = steps.max(x + 1);
                if best.is_none_or(|b| (d, x) < b) {
                    best = Some((d, x));
                }
            }
        }
        if let Some((discovery, x)) = best {
            members.push(PostMember { e, x, discovery });
        }
    }
    PostSimple { stage: s, members }
}

/// `e ↦ 2e + 1`.
pub fn eff_simple_bound() -> Witness {
    let double = comp(add(), vec![proj(1, 1), proj(1, 1)]);
    Witness::new(WitnessKind::EffSimpleBound, encode(&comp(Ast::Succ, vec![double])))
}

fn enumeration_prefix(h: &SetHandle, s: u64) -> Result<Vec<u64>, ClassError> {
    let mut a = Vec::with_capacity(s as usize + 1);
    for i in 0..=s {
        let x = h.enumerate(i).ok_or(ClassError::EnumerationUndefined(i))?;
        if let Some(first) = a.iter().position(|&y| y == x) {
            return Err(ClassError::BadEnumeration { value: x, first: first as u64, second: i });
        }
        a.push(x);
    }
    Ok(a)
}

/// Stage-`s` view of the deficiency set: `{i ≤ s : ∃ t ≤ s, t > i, a(t) < a(i)}`.
pub fn deficiency(h: &SetHandle, s: u64) -> Result<FinSet, ClassError> {
    let a = enumeration_prefix(h, s)?;
    let mut low = u64::MAX;
    let mut out = FinSet::new();
    for i in (0..a.len()).rev() {
        if low < a[i] {
            out.insert(i as u64);
        }
        low = low.min(a[i]);
    }
    Ok(out)
}

/// The retrace of the true stages: the largest `t < s` with
/// `{a(0..s)} ∩ {0..a(t)} = {a(0..t)}`. `s` must be a true stage in the
/// view at `horizon`.
pub fn retrace_predecessor(h: &SetHandle, s: u64, horizon: u64) -> Result<Option<u64>, ClassError> {
    if horizon < s {
        return Err(ClassError::BadArguments(format!("horizon {horizon} below stage {s}")));
    }
    if deficiency(h, horizon)?.contains(s) {
        return Err(ClassError::BadArguments(format!("{s} is not a true stage at {horizon}")));
    }
    let a = enumeration_prefix(h, s)?;
    Ok((0..s).rev().find(|&t| {
        let bound = a[t as usize];
        let below = a.iter().filter(|&&y| y <= bound).count();
        below == t as usize + 1 && a[..=t as usize].iter().all(|&y| y <= bound)
    }))
}

/// Decides `x` in a set retraced by `f`, given a member `b > x`: `x` is a
/// member iff it is among `f(b), f²(b), …, f^b(b)`.
pub fn retraceable_decide(f: impl Fn(u64) -> u64, b: u64, x: u64) -> Result<bool, ClassError> {
    if x >= b {
        return Err(ClassError::BadArguments(format!("need x < b, got x = {x}, b = {b}")));
    }
    let mut y = b;
    for _ in 0..b {
        y = f(y);
        if y == x {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Oracle program `g` with `W_{g(e)}` the first `f(e) + 1` elements
/// outside the oracle set, `f` the bound given by its index.
pub fn effsimple_to_fpf(bound: &Nat) -> Nat {
    // vars: 0 e, 1 need, 2 count, 3 x, 4 list tail
    Func {
        args: 1,
        vars: 5,
        body: vec![
            set(1, succ(univ(n(bound.clone()), vec![v(0)]))),
            while_(
                ne(v(2), v(1)),
                vec![
                    if_(not(oracle(v(3))), vec![set(4, pair(v(3), v(4))), set(2, succ(v(2)))], vec![]),
                    set(3, succ(v(3))),
                ],
            ),
        ],
        result: dsl_smn1(&list_member_index(), vec![pair(v(2), v(4))]),
    }
    .index()
}

/// Stage-bounded no-fixed-point check: some probe separates `W_e` from `W_c`
/// at the given fuel.
pub fn fpf_separates(e: &Nat, c: &Nat, probes: &[Nat], fuel: u64) -> Verdict {
    let halts = |i: &Nat, x: &Nat| eval(i, std::slice::from_ref(x), None, fuel).converged();
    if probes.iter().any(|x| halts(e, x) != halts(c, x)) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    }
}

/// `(a, e, z) ↦ 0` when some `y ∈ W_e` has `a(y) > z` and `z ∉ {a(0..y)}`.
pub(crate) fn deficiency_g_program() -> Nat {
    // vars: 0 a, 1 e, 2 z, 3 t, 4 y, 5 done, 6 i, 7 ok, 8 k, 9 ay
    let scan_gt = vec![
        set(8, n(0u64)),
        while_(cond(ne(v(8), v(9)), n(0u64), ne(v(8), v(2))), vec![set(8, succ(v(8)))]),
        set(7, cond(is_eq(v(8), v(2)), n(0u64), ne(v(8), v(9)))),
    ];
    let scan_fresh = vec![
        set(6, n(0u64)),
        while_(
            cond(v(7), n(0u64), ne(v(6), succ(v(4)))),
            vec![
                if_(is_eq(univ(v(0), vec![v(6)]), v(2)), vec![set(7, n(0u64))], vec![]),
                set(6, succ(v(6))),
            ],
        ),
    ];
    let mut found = vec![set(9, univ(v(0), vec![v(4)]))];
    found.extend(scan_gt);
    found.push(if_(v(7), scan_fresh, vec![]));
    found.push(if_(v(7), vec![set(5, n(1u64))], vec![]));
    Func {
        args: 3,
        vars: 10,
        body: vec![while_(
            not(v(5)),
            vec![
                set(4, n(0u64)),
                while_(
                    cond(v(5), ne(v(4), v(3)), n(0u64)),
                    vec![if_(clock(v(1), v(3), vec![v(4)]), found, vec![]), set(4, succ(v(4)))],
                ),
                set(3, succ(v(3))),
            ],
        )],
        result: n(0u64),
    }
    .index()
}

/// The bound `e ↦ max f(ξ)` with `ξ = p(alpha, g(e))` for a D-w.e.u. set
/// `W_alpha` enumerated by the program `a`.
#[derive(Debug, Clone)]
pub struct DeficiencyBound {
    pub witness: Witness,
    pub alpha: Nat,
    pub a: Nat,
    g: Nat,
}

pub fn dweu_deficiency_bound(dw: &Witness, alpha: &Nat, a: &Nat) -> DeficiencyBound {
    DeficiencyBound { witness: dw.clone(), alpha: alpha.clone(), a: a.clone(), g: deficiency_g_program() }
}

impl DeficiencyBound {
    /// `g(e)`: `W_{g(e)}` holds the `z` skipped below some `a(y)`, `y ∈ W_e`.
    pub fn g(&self, e: &Nat) -> Nat {
        crate::ips::smn(&self.g, &[self.a.clone(), e.clone()], 1)
    }

    pub fn xi(&self, e: &Nat) -> Nat {
        post_combiner(&self.alpha, &self.g(e))
    }

    /// The set `f(ξ)`; every `|W_e|` with `W_e` inside the true stages is below its maximum.
    pub fn bound_set(&self, e: &Nat, fuel: u64) -> Option<SetValue> {
        self.witness.apply_set(&self.xi(e), fuel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ips::divergent;
    use crate::re_sets::{corpus_entry, finite_windex};

    #[test]
    fn post_simple_small() {
        assert!(post_simple(0).set().is_empty());
        let p = post_simple(400);
        for m in &p.members {
            assert!(m.x > 2 * m.e && m.discovery <= 400);
        }
        let mut xs: Vec<u64> = p.members.iter().map(|m| m.x).collect();
        xs.sort();
        xs.dedup();
        assert!(xs.len() <= p.members.len());
        // zero program: W_0 = N, first x > 0 is 1
        assert!(p.members.contains(&PostMember { e: 0, x: 1, discovery: 2 }));
        for t in 0..=400 {
            let st = p.at(t);
            for k in 0..=50 {
                assert!(st.iter().filter(|&x| x <= 2 * k).count() as u64 <= k);
            }
        }
        // a later run agrees on the earlier stages
        let q = post_simple(600);
        for t in [0, 100, 399, 400] {
            assert_eq!(p.at(t), q.at(t));
        }
    }

    #[test]
    fn bound_is_2e_plus_1() {
        let w = eff_simple_bound();
        assert_eq!(w.apply(&Nat::from(0u64), 100), Some(Nat::from(1u64)));
        assert_eq!(w.apply(&Nat::from(1u64), 100), Some(Nat::from(3u64)));
        assert_eq!(w.apply(&Nat::from(40u64), 1000), Some(Nat::from(81u64)));
    }

    #[test]
    fn bound_holds_on_forced_subsets() {
        // 0 never enters S, and empty domains trivially stay outside
        let p = post_simple(300);
        let w = eff_simple_bound();
        for e in [finite_windex(&[Nat::zero()]), encode(&divergent()), Nat::from(22u64)] {
            let w_mem = crate::re_sets::w_mem;
            let f = e.add(&e).succ();
            if e.bits_hint() < 64 {
                assert_eq!(w.apply(&e, 1_000_000), Some(f.clone()));
            }
            for s in [10, 100, 300] {
                let ws: Vec<u64> = (0..s).filter(|&x| w_mem(&e, &Nat::from(x), s)).collect();
                assert!(ws.iter().all(|&x| !p.at(s).contains(x)));
                assert!(Nat::from(ws.len() as u64) <= f);
            }
        }
    }

    fn listed(v: Vec<u64>) -> SetHandle {
        SetHandle::enumerated("listed", move |i| v.get(i as usize).copied())
    }

    #[test]
    fn deficiency_views() {
        let inc = SetHandle::enumerated("inc", |i| Some(2 * i + 1));
        for s in [0, 5, 40] {
            assert!(deficiency(&inc, s).unwrap().is_empty());
        }
        let h = listed(vec![3, 1, 2, 0, 4, 5, 6]);
        assert_eq!(deficiency(&h, 4).unwrap(), FinSet::from_iter([0, 1, 2]));
        let mut prev = FinSet::new();
        for s in 0..7 {
            let d = deficiency(&h, s).unwrap();
            assert!(prev.is_subset(&d));
            prev = d;
        }
        let bad = listed(vec![1, 2, 1]);
        assert_eq!(
            deficiency(&bad, 2),
            Err(ClassError::BadEnumeration { value: 1, first: 0, second: 2 })
        );
        assert_eq!(deficiency(&bad, 3), Err(ClassError::BadEnumeration { value: 1, first: 0, second: 2 }));
        assert_eq!(deficiency(&listed(vec![0]), 2), Err(ClassError::EnumerationUndefined(1)));
    }

    fn brute_retrace(a: &[u64], s: usize) -> Option<u64> {
        (0..s).rev().map(|t| t as u64).find(|&t| {
            let lhs: FinSet = FinSet::from_iter(a[..=s].iter().copied().filter(|&y| y <= a[t as usize]));
            lhs == FinSet::from_iter(a[..=t as usize].iter().copied())
        })
    }

    #[test]
    fn retrace_matches_brute_force() {
        let cases = [
            vec![3, 1, 2, 0, 4, 5, 6, 7],
            vec![5, 0, 6, 1, 7, 2, 8, 3, 9, 4],
            vec![0, 2, 1, 4, 3, 6, 5, 8, 7, 9],
        ];
        for a in cases {
            let h = listed(a.clone());
            let horizon = a.len() as u64 - 1;
            let d = deficiency(&h, horizon).unwrap();
            for s in 0..=horizon {
                let r = retrace_predecessor(&h, s, horizon);
                if d.contains(s) {
                    assert!(r.is_err());
                } else {
                    let got = r.unwrap();
                    assert_eq!(got, brute_retrace(&a, s as usize));
                    if let Some(t) = got {
                        assert!(!d.contains(t), "retrace left the true stages");
                    }
                }
            }
        }
    }

    #[test]
    fn decide_evens() {
        let f = |n: u64| n.saturating_sub(2);
        assert_eq!(retraceable_decide(f, 10, 4), Ok(true));
        assert_eq!(retraceable_decide(f, 10, 5), Ok(false));
        assert_eq!(retraceable_decide(f, 10, 0), Ok(true));
        assert!(retraceable_decide(f, 10, 10).is_err());
        assert!(retraceable_decide(f, 10, 12).is_err());
    }

    #[test]
    fn list_member_scan() {
        let m = list_member_index();
        let c = crate::coding::list_encode(&[Nat::from(4u64), Nat::from(0u64), Nat::from(9u64)]);
        for y in [4u64, 0, 9] {
            assert_eq!(eval(&m, &[c.clone(), Nat::from(y)], None, 10_000).value(), Some(&Nat::zero()));
        }
        for y in [1u64, 5, 10] {
            assert!(!eval(&m, &[c.clone(), Nat::from(y)], None, 10_000).converged());
        }
        assert!(!eval(&m, &[Nat::zero(), Nat::zero()], None, 10_000).converged());
    }

    #[test]
    fn martin_function_has_no_fixed_points() {
        let p = post_simple(400);
        let s_set = p.set();
        let a = crate::ips::FnOracle(|x: &Nat| x.to_u64().is_some_and(|x| s_set.contains(x)));
        let g = effsimple_to_fpf(&eff_simple_bound().body);
        // zero (W = N), mu(succ) (W = {}), mu(pair) (W = {0})
        for e in [0u64, 22, 1320] {
            let out = eval(&g, &[Nat::from(e)], Some(&a), 10_000_000);
            let c = out.value().expect("g converges").clone();
            let listed = crate::coding::list_decode(&c.unpair().1.unpair().1.unpair().1.unpair().0.unpair().1);
            let listed = listed.unwrap();
            assert_eq!(listed.len() as u64, 2 * e + 2);
            assert!(listed.iter().all(|x| !s_set.contains(x.to_u64().unwrap())));
            let mut probes: Vec<Nat> = (0..4u64).map(Nat::from).collect();
            probes.extend(listed.iter().take(3).cloned());
            assert_eq!(fpf_separates(&Nat::from(e), &c, &probes, 100_000), Verdict::Pass, "e = {e}");
        }
    }

    #[test]
    fn deficiency_g_semantics() {
        // a(y) = y² enumerates squares; W_e = {2}: skipped below a(2) = 4 are 2 and 3
        let sq = corpus_entry("square").index;
        let e = finite_windex(&[Nat::from(2u64)]);
        let g = crate::ips::smn(&deficiency_g_program(), &[sq, e], 1);
        for z in [2u64, 3] {
            assert!(eval(&g, &[Nat::from(z)], None, 2_000_000).converged(), "z = {z}");
        }
        for z in [0u64, 1, 4, 5] {
            assert!(!eval(&g, &[Nat::from(z)], None, 200_000).converged(), "z = {z}");
        }
    }
}

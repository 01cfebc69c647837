//! D-w.e.u., D-s.e.u., quasicreative and d-complete sets; the simple
//! D-w.e.u. set and strong arrays.

use std::sync::Arc;

use serde::Serialize;

use super::creative::veldman_g;
use super::{ce_smn1, compose, list_member_index, SetHandle, SetValue, Verdict, Witness, WitnessKind};
use crate::coding::{block, block_start, FinSet, Nat};
use crate::ips::dsl::{add, cond, if_, is_eq, left, n, ne, not, pair, right, set, succ, univ, v, while_, ap, Func};
use crate::ips::{arg, ce_comp, ce_const, comp, encode, eval, lit, lit_code, pred, proj, smn, strong_fp, try_decode, Ast, Outcome};
use crate::re_sets::w_mem;

/// `z ↦ {phi_m(z)}`: an m-reduction read as a 1-d reduction.
pub fn singleton_of(m: &Witness) -> Witness {
    let one = comp(Ast::Pair, vec![call_first(&m.body), Ast::Const(Nat::zero())]);
    let body = encode(&comp(Ast::Pair, vec![Ast::Const(Nat::from(1u64)), one]));
    Witness::new(WitnessKind::DReduction(Some(1)), body)
}

fn call_first(e: &Nat) -> Ast {
    crate::ips::call(e, vec![proj(1, 1)])
}

/// D-s.e.u. ⇒ quasicreative: `f ∘ g` with `g(e)` the Post combiner of `A`
/// (value 1) and `W_e` (value 0).
pub fn dseu_to_quasicreative(w: &Witness, a: &SetHandle) -> Witness {
    let alpha = a.windex.clone().expect("set handle without an r.e. index");
    Witness::after(WitnessKind::Quasicreative, w, veldman_g(&alpha))
}

/// `(p, z, x) ↦ 0` when `phi_z(z)` converges and `x ∈ phi_f(p)`.
fn enumerate_if_halts(f: &Nat) -> Nat {
    // vars: 0 p, 1 z, 2 x, 3 halted, 4 list
    Func {
        args: 3,
        vars: 5,
        body: vec![set(3, univ(v(1), vec![v(1)])), set(4, univ(n(f.clone()), vec![v(0)]))],
        result: univ(n(list_member_index()), vec![v(4), v(2)]),
    }
    .index()
}

/// Quasicreative ⇒ d-complete: `f ∘ g` where `W_{g(e)} = f(g(e))` for
/// `e ∈ K` and empty otherwise (strong fixed point).
pub fn quasicreative_to_dcomplete(w: &Witness) -> Witness {
    let h = enumerate_if_halts(&w.body);
    let t = encode(&ce_comp(lit(h), vec![ce_const(arg(0)), ce_const(arg(1)), lit_code(&proj(1, 1))]).program(2));
    let g = strong_fp(&t, 1);
    Witness::new(WitnessKind::DReduction(None), compose(&w.body, &g))
}

/// `(e, x) ↦ 0` when `phi_e(z) = 0` for all `z ∈ phi_f(x)`, diverging otherwise.
fn all_zero_on(f: &Nat) -> Nat {
    // vars: 0 e, 1 x, 2 rest, 3 remaining, 4 bad
    Func {
        args: 2,
        vars: 5,
        body: vec![
            set(2, univ(n(f.clone()), vec![v(1)])),
            set(3, left(v(2))),
            set(2, right(v(2))),
            while_(
                cond(v(4), ne(v(3), n(0u64)), n(0u64)),
                vec![
                    if_(univ(v(0), vec![left(v(2))]), vec![set(4, n(1u64))], vec![]),
                    set(2, right(v(2))),
                    set(3, ap(pred(), vec![v(3)])),
                ],
            ),
            if_(v(4), vec![while_(n(1u64), vec![])], vec![]),
        ],
        result: n(0u64),
    }
    .index()
}

/// d-complete ⇒ D-s.e.u.: `f ∘ h` with `phi_{h(e)}(x) = 0` iff `phi_e`
/// vanishes on `f(x)`. Only the D-w.e.u. clause is guaranteed.
pub fn dcomplete_to_dseu(w: &Witness) -> Witness {
    let h = ce_smn1(&all_zero_on(&w.body), vec![arg(0)]);
    Witness::after(WitnessKind::DSeu, w, h)
}

fn members(w: &Witness, e: &Nat, fuel: u64) -> Option<Vec<Nat>> {
    w.apply_set(e, fuel)?.members(4096)
}

/// D-w.e.u. clause at `e`: if `phi_e` converges on all of `f(e)`, it
/// disagrees with `A_s` somewhere there.
pub fn check_dweu(w: &Witness, e: &Nat, a: &SetHandle, s: u64, fuel: u64) -> Verdict {
    let Some(zs) = members(w, e, fuel) else {
        return Verdict::Inconclusive;
    };
    let mut differs = false;
    for z in &zs {
        match eval(e, std::slice::from_ref(z), None, fuel).value() {
            None => return Verdict::Inconclusive,
            Some(val) => differs |= *val != Nat::from(a.contains(z, s) as u64),
        }
    }
    if differs {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Quasicreative clause at `e`, assuming `W_e ⊆ complement(A)`.
pub fn check_quasicreative(w: &Witness, e: &Nat, a: &SetHandle, s: u64, fuel: u64) -> Verdict {
    let Some(zs) = members(w, e, fuel) else {
        return Verdict::Inconclusive;
    };
    if zs.iter().any(|z| a.contains(z, s)) {
        return Verdict::Fail;
    }
    if zs.iter().any(|z| !w_mem(e, z, s)) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Weakly quasicreative clause at `e`, assuming `W_e ⊆ complement(A)`.
pub fn check_weakly_quasicreative(w: &Witness, e: &Nat, a: &SetHandle, s: u64, fuel: u64) -> Verdict {
    let Some(zs) = members(w, e, fuel) else {
        return Verdict::Inconclusive;
    };
    if zs.iter().any(|z| !a.contains(z, s) && !w_mem(e, z, s)) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// d-completeness at `e` with known `K`-status: `e ∈ K` iff `f(e)` meets `A`.
pub fn check_dcomplete(w: &Witness, e: &Nat, in_k: bool, a: &SetHandle, s: u64, fuel: u64) -> Verdict {
    let Some(zs) = members(w, e, fuel) else {
        return Verdict::Inconclusive;
    };
    let meets = zs.iter().any(|z| a.contains(z, s));
    match (in_k, meets) {
        (true, true) | (false, false) => Verdict::Pass,
        // the meeting element may still be enumerated later
        (true, false) => Verdict::Inconclusive,
        (false, true) => Verdict::Fail,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DweuRule {
    /// First element of `W_e` beyond the blocks `0..=e`.
    Escape,
    /// First zero of `phi_e` in `block(e)`.
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DweuMember {
    pub e: u64,
    pub x: u64,
    pub rule: DweuRule,
    pub discovery: u64,
}

/// The simple D-w.e.u. set up to stage `stage`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimpleDweu {
    pub stage: u64,
    pub members: Vec<DweuMember>,
}

impl SimpleDweu {
    pub fn set(&self) -> FinSet {
        self.at(self.stage)
    }

    pub fn at(&self, t: u64) -> FinSet {
        FinSet::from_iter(self.members.iter().filter(|m| m.discovery <= t).map(|m| m.x))
    }

    pub fn handle(&self) -> SetHandle {
        let me = self.clone();
        SetHandle::new("simple-dweu", move |x, s| x.to_u64().is_some_and(|x| me.at(s.min(me.stage)).contains(x)))
    }
}

/// Least `(discovery, x)` over `xs` with `phi_e(x)` accepted by `ok`,
/// discovery at most `s`.
fn first_found(e: &Nat, xs: impl Iterator<Item = u64>, s: u64, ok: impl Fn(&Nat) -> bool) -> Option<(u64, u64)> {
    let mut best: Option<(u64, u64)> = None;
    for x in xs {
        let cap = best.map_or(s, |b| b.0);
        if x + 1 > cap {
            break;
        }
        if let Outcome::Converged { steps, value, .. } = eval(e, &[Nat::from(x)], None, cap) {
            let d = steps.max(x + 1);
            if ok(&value) && best.is_none_or(|b| (d, x) < b) {
                best = Some((d, x));
            }
        }
    }
    best
}

/// Stage-`s` approximation: for each `e`, the first `x ∈ W_e` outside
/// `block(0) ∪ … ∪ block(e)`, and the first zero of `phi_e` in `block(e)`.
pub fn simple_dweu(s: u64) -> SimpleDweu {
    let mut members = Vec::new();
    let mut e = 0;
    while block_start(e) < s {
        let en = Nat::from(e);
        if try_decode(&en).is_some() {
            let own = block(e);
            if let Some((d, x)) = first_found(&en, own.iter().filter(|&x| x < s), s, Nat::is_zero) {
                members.push(DweuMember { e, x, rule: DweuRule::Diagonal, discovery: d });
            }
            if let Some((d, x)) = first_found(&en, block_start(e + 1)..s, s, |_| true) {
                members.push(DweuMember { e, x, rule: DweuRule::Escape, discovery: d });
            }
        }
        e += 1;
    }
    SimpleDweu { stage: s, members }
}

/// Program `e ↦ block(e)` as a list code.
pub fn block_list_index() -> Nat {
    // vars: 0 e, 1 i, 2 start, 3 acc, 4 j
    Func {
        args: 1,
        vars: 5,
        body: vec![
            while_(ne(v(1), v(0)), vec![set(2, add(v(2), succ(succ(v(1))))), set(1, succ(v(1)))]),
            while_(
                ne(v(4), succ(succ(v(0)))),
                vec![set(3, pair(add(v(2), v(4)), v(3))), set(4, succ(v(4)))],
            ),
        ],
        result: pair(succ(succ(v(0))), v(3)),
    }
    .index()
}

/// The D-w.e.u. witness `e ↦ block(e)` of the simple D-w.e.u. set.
pub fn simple_dweu_witness() -> Witness {
    Witness { kind: WitnessKind::DWeu, body: block_list_index(), native: Some(Arc::new(|e: &Nat| SetValue::block(e.clone()))) }
}

/// `(c, y) ↦ 0` if `y` lies in the set with parts code `c`, else 1.
pub fn parts_member_index() -> Nat {
    // vars: 0 c, 1 y, 2 rest, 3 remaining, 4 found, 5 block of y, 6 offset, 7 i, 8 part
    let block_of_y = vec![while_(
        ne(v(7), v(1)),
        vec![
            set(6, succ(v(6))),
            if_(is_eq(v(6), succ(succ(v(5)))), vec![set(5, succ(v(5))), set(6, n(0u64))], vec![]),
            set(7, succ(v(7))),
        ],
    )];
    let below = |bound: crate::ips::dsl::Expr| {
        // y ≤ bound: count up from 0 until y or bound
        vec![
            set(7, n(0u64)),
            while_(cond(ne(v(7), v(1)), n(0u64), ne(v(7), bound.clone())), vec![set(7, succ(v(7)))]),
            set(4, is_eq(v(7), v(1))),
        ]
    };
    let mut body = block_of_y;
    body.extend([
        set(2, right(v(0))),
        set(3, left(v(0))),
        while_(
            cond(v(4), ne(v(3), n(0u64)), n(0u64)),
            vec![
                set(8, left(v(2))),
                if_(
                    is_eq(left(v(8)), n(2u64)),
                    below(right(v(8))),
                    vec![set(4, cond(left(v(8)), is_eq(right(v(8)), v(1)), is_eq(right(v(8)), v(5))))],
                ),
                set(2, right(v(2))),
                set(3, ap(pred(), vec![v(3)])),
            ],
        ),
    ]);
    Func { args: 2, vars: 9, body, result: not(v(4)) }.index()
}

/// `w̄(G)`: a total 0/1 program, 0 exactly on `G`.
pub fn wbar(g: &SetValue) -> Nat {
    smn(&parts_member_index(), &[g.parts_code()], 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongArray {
    pub sets: Vec<SetValue>,
    pub exhausted: bool,
}

/// Pairwise disjoint finite sets meeting the complement of a D-w.e.u. set.
pub fn strong_array_extract(w: &Witness, count: usize, max_iter: usize, fuel: u64) -> StrongArray {
    let mut g = SetValue::empty();
    let mut y = SetValue::empty();
    let mut sets = Vec::new();
    for _ in 0..max_iter {
        if sets.len() >= count {
            break;
        }
        let Some(b) = w.apply_set(&wbar(&g), fuel) else {
            break;
        };
        if b.meets(&y) {
            g = g.minus(&b);
        } else {
            y = y.union(&b);
            g = g.union(&b);
            sets.push(b);
        }
    }
    let exhausted = sets.len() < count;
    StrongArray { sets, exhausted }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{k_creative_witness, myhill_backward, Part};
    use crate::coding::list_decode;
    use crate::ips::{cnst, divergent};
    use crate::re_sets::{corpus_entry, finset_to_windex};

    #[test]
    fn block_program_lists_blocks() {
        let p = block_list_index();
        for e in 0..12u64 {
            let code = eval(&p, &[Nat::from(e)], None, 100_000).value().cloned().unwrap();
            let got = FinSet::from_iter(list_decode(&code).unwrap().iter().map(|x| x.to_u64().unwrap()));
            assert_eq!(got, block(e));
        }
    }

    #[test]
    fn parts_membership_program() {
        let g = SetValue { parts: vec![Part::Elem(Nat::from(3u64)), Part::Block(Nat::from(2u64)), Part::Below(Nat::from(1u64))] };
        let q = wbar(&g);
        for y in 0..20u64 {
            let want = u64::from(!g.contains(&Nat::from(y)));
            assert_eq!(eval(&q, &[Nat::from(y)], None, 1_000_000).value(), Some(&Nat::from(want)), "y = {y}");
        }
        let empty = wbar(&SetValue::empty());
        assert_eq!(eval(&empty, &[Nat::from(5u64)], None, 100_000).value(), Some(&Nat::from(1u64)));
    }

    #[test]
    fn simple_dweu_rules() {
        assert!(simple_dweu(0).set().is_empty());
        let d = simple_dweu(2000);
        // zero program: first zero in block(0) = {0, 1}
        assert!(d.members.contains(&DweuMember { e: 0, x: 0, rule: DweuRule::Diagonal, discovery: 1 }));
        // constant 0 (index 28): the least element of block(28)
        assert!(d.members.iter().any(|m| m.e == 28 && m.rule == DweuRule::Diagonal && m.x == block_start(28)));
        for m in &d.members {
            match m.rule {
                DweuRule::Diagonal => assert!(block(m.e).contains(m.x)),
                DweuRule::Escape => assert!(m.x >= block_start(m.e + 1)),
            }
        }
        let a = d.set();
        for e in 0..=30u64 {
            let hits = block(e).intersection(&a).len() as u64;
            assert!(hits <= e + 1);
            let diag = d.members.iter().filter(|m| m.rule == DweuRule::Diagonal && block(e).contains(m.x)).count();
            assert!(diag <= 1);
        }
    }

    #[test]
    fn simple_dweu_witness_contract() {
        let d = simple_dweu(2000);
        let h = d.handle();
        let w = simple_dweu_witness();
        for e in [0u64, 28] {
            assert_eq!(check_dweu(&w, &Nat::from(e), &h, 2000, 10_000), Verdict::Pass, "e = {e}");
        }
        // identity has no zero on its block: the block keeps a non-member
        let id = Nat::from(25u64);
        assert_eq!(check_dweu(&w, &id, &h, 2000, 10_000), Verdict::Pass);
    }

    #[test]
    fn strong_array_from_simple_dweu() {
        let w = simple_dweu_witness();
        let arr = strong_array_extract(&w, 3, 20, 1000);
        assert!(!arr.exhausted);
        assert_eq!(arr.sets.len(), 3);
        for (i, a) in arr.sets.iter().enumerate() {
            assert!(!a.is_empty());
            for b in &arr.sets[i + 1..] {
                assert!(!a.meets(b));
            }
        }
    }

    fn k_dcomplete() -> Witness {
        singleton_of(&myhill_backward(&k_creative_witness()))
    }

    #[test]
    fn seu_triangle_on_k() {
        let k = SetHandle::k();
        let d0 = k_dcomplete();
        for (name, in_k) in [("zero", true), ("divergent", false), ("table_1_5", false)] {
            let e = corpus_entry(name).index;
            assert_eq!(check_dcomplete(&d0, &e, in_k, &k, 1_000_000, 1_000_000), Verdict::Pass, "{name}");
        }
        let seu = dcomplete_to_dseu(&d0);
        for e in [cnst(0u64), cnst(1u64), proj(1, 1)] {
            let e = encode(&e);
            assert_eq!(check_dweu(&seu, &e, &k, 200_000, 1_000_000), Verdict::Pass, "{e}");
        }
        let qc = dseu_to_quasicreative(&seu, &k);
        let empties = [encode(&divergent()), finset_to_windex(&FinSet::new()), Nat::from(22u64)];
        for e in &empties {
            assert_eq!(check_quasicreative(&qc, e, &k, 100_000, 1_000_000), Verdict::Pass, "{e}");
        }
        let d1 = quasicreative_to_dcomplete(&qc);
        for (name, in_k) in [("zero", true), ("divergent", false), ("table_1_5", false)] {
            let e = corpus_entry(name).index;
            assert_eq!(check_dcomplete(&d1, &e, in_k, &k, 1_000_000, 10_000_000), Verdict::Pass, "{name}");
        }
    }
}

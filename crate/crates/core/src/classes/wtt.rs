//! wtt-completeness: fixed-point-free functions, the D-w.e.u. and weakly
//! quasicreative characterisations, and a bounded Arslanov reduction.

use std::sync::Arc;

use super::creative::veldman_g;
use super::{dsl_smn1, list_member_index, SetHandle, SetValue, Verdict, Witness, WitnessKind};
use crate::coding::Nat;
use crate::ips::dsl::{ap, cond, clock, if_, is_eq, left, n, ne, not, oracle, pair, right, set, succ, univ, v, while_, Expr, Func};
use crate::ips::{
    arg, ce_comp, ce_const, cnst, code_with_oracle, comp, decode, divergent, encode, eval, lit, lit_code, pred, proj,
    r_expr, strong_fp, Ast, CodeExpr, FnOracle,
};
use crate::re_sets::{k_mem, w_mem};

/// `(t, x) ↦ b` when `pair(x, b + 1)` is an entry of the cons list `t`, diverging otherwise.
pub fn table_lookup_index() -> Nat {
    // vars: 0 t, 1 x, 2 found, 3 value, 4 rest
    Func {
        args: 2,
        vars: 5,
        body: vec![
            set(4, v(0)),
            while_(
                cond(v(2), ne(v(4), n(0u64)), n(0u64)),
                vec![
                    if_(
                        is_eq(left(left(v(4))), v(1)),
                        vec![set(2, n(1u64)), set(3, ap(pred(), vec![right(left(v(4)))]))],
                        vec![],
                    ),
                    set(4, right(v(4))),
                ],
            ),
            if_(not(v(2)), vec![while_(n(1u64), vec![])], vec![]),
        ],
        result: v(3),
    }
    .index()
}

/// Loop over the list `univ(f, e)`, running `step` with the current element in var 4.
fn over_list(f: &Nat, step: Vec<crate::ips::dsl::Stmt>) -> Vec<crate::ips::dsl::Stmt> {
    // vars: 0 e, 1 rest, 2 remaining, 4 current
    let mut body = vec![set(4, left(v(1)))];
    body.extend(step);
    body.extend([set(1, right(v(1))), set(2, ap(pred(), vec![v(2)]))]);
    vec![
        set(1, univ(n(f.clone()), vec![v(0)])),
        set(2, left(v(1))),
        set(1, right(v(1))),
        while_(ne(v(2), n(0u64)), body),
    ]
}

/// D-w.e.u. ⇒ fixed-point-free `g ≤_wtt A`: an oracle program with
/// `phi_{g(e)}(x) = A(x)` on `f(e)` and divergent elsewhere.
pub fn dweu_to_wtt_fpf(w: &Witness) -> Nat {
    // vars: 0 e, 1 rest, 2 remaining, 3 table, 4 current
    let step = vec![set(3, pair(pair(v(4), succ(oracle(v(4)))), v(3)))];
    Func { args: 1, vars: 5, body: over_list(&w.body, step), result: dsl_smn1(&table_lookup_index(), vec![v(3)]) }.index()
}

/// Weakly quasicreative ⇒ fixed-point-free `g ≤_wtt A` with `W_{g(e)} = f(e) ∩ complement(A)`.
pub fn wqc_to_wtt_fpf(w: &Witness) -> Nat {
    // vars: 0 e, 1 rest, 2 remaining, 3 tail, 4 current, 5 count
    let step = vec![if_(not(oracle(v(4))), vec![set(3, pair(v(4), v(3))), set(5, succ(v(5)))], vec![])];
    Func {
        args: 1,
        vars: 6,
        body: over_list(&w.body, step),
        result: dsl_smn1(&list_member_index(), vec![pair(v(5), v(3))]),
    }
    .index()
}

/// A wtt-reduction of `K` to `A`: the oracle program `a` and its use bound.
#[derive(Debug, Clone)]
pub struct WttReduction {
    pub a: Nat,
    pub usebound: Nat,
}

impl WttReduction {
    /// `K` to itself: ask the oracle about `x`, use `x + 1`.
    pub fn k_identity() -> WttReduction {
        WttReduction { a: encode(&Ast::OracleQuery), usebound: encode(&Ast::Succ) }
    }

    /// Code of `g(e)` with `phi_{g(e)} = phi_a` run against the oracle `phi_e`.
    pub fn g_expr(&self, e: CodeExpr) -> CodeExpr {
        let hole = ce_comp(lit_code(&Ast::Univ), vec![ce_const(e), lit_code(&proj(1, 1))]);
        code_with_oracle(&decode(&self.a), &hole)
    }

    /// `k(g(x))`, the point where `phi_x` and `A` must differ.
    pub fn certificate(&self, x: &Nat) -> Nat {
        r_expr(self.g_expr(arg(0))).eval(std::slice::from_ref(x))
    }
}

/// wtt-complete ⇒ D-w.e.u. via `x ↦ {0, …, f(k(g(x)))}`, with `k` the diagonal `r`.
pub fn wtt_to_dweu(red: &WttReduction) -> Witness {
    let kg = r_expr(red.g_expr(arg(0))).program(1);
    // vars: 0 x, 1 bound, 2 j, 3 tail
    let body = Func {
        args: 1,
        vars: 4,
        body: vec![
            set(1, univ(n(red.usebound.clone()), vec![ap(kg, vec![v(0)])])),
            while_(ne(v(2), succ(v(1))), vec![set(3, pair(v(2), v(3))), set(2, succ(v(2)))]),
        ],
        result: pair(succ(v(1)), v(3)),
    }
    .index();
    let r2 = red.clone();
    let native = Arc::new(move |x: &Nat| {
        let m = eval(&r2.usebound, &[r2.certificate(x)], None, 10_000_000);
        SetValue::below(m.value().cloned().expect("use bound diverged"))
    });
    Witness { kind: WitnessKind::DWeu, body, native: Some(native) }
}

/// wtt-complete ⇒ weakly quasicreative via `g ∘ h`, `g` a D-w.e.u. witness
/// and `h(e)` the Post combiner of `A` and `W_e`.
pub fn wtt_to_wqc(dweu: &Witness, a: &SetHandle) -> Witness {
    let alpha = a.windex.clone().expect("set handle without an r.e. index");
    Witness::after(WitnessKind::WeaklyQuasicreative, dweu, veldman_g(&alpha))
}

/// D-w.e.u. clause at a given point: `z ∈ f(e)` and `phi_e(z)` converges to
/// a value other than `A_s(z)`.
pub fn check_dweu_at(w: &Witness, e: &Nat, z: &Nat, a: &SetHandle, s: u64, fuel: u64) -> Verdict {
    let Some(fe) = w.apply_set(e, fuel) else {
        return Verdict::Inconclusive;
    };
    if !fe.contains(z) {
        return Verdict::Fail;
    }
    match eval(e, std::slice::from_ref(z), None, fuel).value() {
        None => Verdict::Inconclusive,
        Some(val) if *val != Nat::from(a.contains(z, s) as u64) => Verdict::Pass,
        Some(_) => Verdict::Fail,
    }
}

/// Weakly quasicreative clause at a given point: `z ∈ f(e)`, outside `A_s` and `W_{e,s}`.
pub fn check_wqc_at(w: &Witness, e: &Nat, z: &Nat, a: &SetHandle, s: u64, fuel: u64) -> Verdict {
    let Some(fe) = w.apply_set(e, fuel) else {
        return Verdict::Inconclusive;
    };
    if fe.contains(z) && !a.contains(z, s) && !w_mem(e, z, s) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Oracle program for `K`: `W_{f(e)} = N` when `0 ∉ W_e`, empty otherwise.
pub fn k_fpf_index() -> Nat {
    let c = ce_comp(lit_code(&Ast::Univ), vec![ce_const(arg(0)), lit_code(&cnst(0u64))]);
    let query = comp(Ast::OracleQuery, vec![c.program(1)]);
    encode(&comp(Ast::Cond, vec![query, cnst(encode(&Ast::Zero)), cnst(encode(&divergent()))]))
}

/// Fuel of the stage-`s` approximation `phi^{A_s}_{e,s}`: room for `s`
/// oracle answers of `s` steps each.
pub fn approx_fuel(s: u64) -> u64 {
    s * (s + 1)
}

/// Code of the unary program `z ↦ [phi_{alpha,s}(z) converges]`, with `s` given by `s_code`.
fn stage_member_code(alpha: &Nat, s_code: CodeExpr) -> CodeExpr {
    let clocked = ce_comp(lit_code(&Ast::Clock), vec![lit_code(&cnst(alpha.clone())), ce_const(s_code), lit_code(&proj(1, 1))]);
    ce_comp(lit_code(&Ast::Eq), vec![clocked, lit_code(&cnst(0u64))])
}

/// `e` with its oracle replaced by the stage-`s` approximation of `W_alpha`.
fn staged_code(e: &Nat, alpha: &Nat, s_code: CodeExpr) -> CodeExpr {
    code_with_oracle(&decode(e), &stage_member_code(alpha, s_code))
}

/// `(p, x, y)`: wait for `x ∈ K_s`, then behave as the index
/// `phi^{A_s}_{e,s}(p)`, diverging when that approximation does.
fn arslanov_body(e: &Nat, alpha: &Nat) -> Nat {
    // vars: 0 p, 1 x, 2 y, 3 s, 4 clocked
    let staged = staged_code(e, alpha, arg(0)).program(1);
    let approx: Expr = clock(ap(staged, vec![v(3)]), ap(crate::ips::mul(), vec![v(3), succ(v(3))]), vec![v(0)]);
    Func {
        args: 3,
        vars: 5,
        body: vec![
            while_(not(clock(v(1), v(3), vec![v(1)])), vec![set(3, succ(v(3)))]),
            set(4, approx),
            if_(not(v(4)), vec![while_(n(1u64), vec![])], vec![]),
        ],
        result: univ(ap(pred(), vec![v(4)]), vec![v(2)]),
    }
    .index()
}

/// Best-effort Arslanov reduction: decides `x ∈ K` from a fixed-point-free
/// `phi^A_e`, `A = W_alpha`. `None` when the bounded search gives up.
pub fn arslanov_reduction(e_fpf: &Nat, a: &SetHandle, x: &Nat, horizon: u64, fuel: u64) -> Option<bool> {
    let alpha = a.windex.clone()?;
    let body = arslanov_body(e_fpf, &alpha);
    let t = encode(&ce_comp(lit(body), vec![ce_const(arg(0)), ce_const(arg(1)), lit_code(&proj(1, 1))]).program(2));
    let g = strong_fp(&t, 1);
    let gx = eval(&g, std::slice::from_ref(x), None, fuel).value()?.clone();
    let oracle = FnOracle(|z: &Nat| a.contains(z, horizon));
    let target = eval(e_fpf, std::slice::from_ref(&gx), Some(&oracle), fuel).value()?.clone();
    let psi = (1..=horizon).find(|&s| {
        let staged = staged_code(e_fpf, &alpha, lit(Nat::from(s))).eval(&[]);
        eval(&staged, std::slice::from_ref(&gx), None, approx_fuel(s)).value() == Some(&target)
    })?;
    Some(k_mem(x, psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{fpf_separates, simple_dweu, simple_dweu_witness};
    use crate::coding::{block, FinSet};
    use crate::re_sets::{corpus_entry, finset_to_windex};

    #[test]
    fn lookup_table_program() {
        let t = table_lookup_index();
        let entry = |x: u64, b: u64| Nat::pair(&Nat::from(x), &Nat::from(b + 1));
        let table = Nat::pair(&entry(0, 0), &Nat::pair(&entry(7, 1), &Nat::zero()));
        assert_eq!(eval(&t, &[table.clone(), Nat::zero()], None, 10_000).value(), Some(&Nat::zero()));
        assert_eq!(eval(&t, &[table.clone(), Nat::from(7u64)], None, 10_000).value(), Some(&Nat::from(1u64)));
        assert!(!eval(&t, &[table, Nat::from(3u64)], None, 10_000).converged());
    }

    #[test]
    fn fpf_from_simple_dweu() {
        let d = simple_dweu(2000);
        let a_set = d.set();
        let oracle = FnOracle(|z: &Nat| z.to_u64().is_some_and(|z| a_set.contains(z)));
        let w = simple_dweu_witness();
        let g = dweu_to_wtt_fpf(&w);
        for e in [0u64, 1, 25, 28, 37] {
            let c = eval(&g, &[Nat::from(e)], Some(&oracle), 10_000_000).value().cloned().unwrap();
            // phi_{g(e)} is the characteristic function of A on block(e)
            for z in block(e).iter() {
                let want = u64::from(a_set.contains(z));
                assert_eq!(eval(&c, &[Nat::from(z)], None, 100_000).value(), Some(&Nat::from(want)));
            }
            let mut probes: Vec<Nat> = (0..3u64).map(Nat::from).collect();
            probes.extend(block(e).iter().map(Nat::from));
            probes.push(Nat::from(FinSet::max(&block(e)).unwrap() + 1));
            assert_eq!(fpf_separates(&Nat::from(e), &c, &probes, 100_000), Verdict::Pass, "e = {e}");
        }
    }

    #[test]
    fn interval_witness_from_k() {
        let k = SetHandle::k();
        let red = WttReduction::k_identity();
        let w = wtt_to_dweu(&red);
        for e in [cnst(0u64), cnst(1u64), proj(1, 1)] {
            let e = encode(&e);
            let z = red.certificate(&e);
            assert_eq!(check_dweu_at(&w, &e, &z, &k, 100_000, 1_000_000), Verdict::Pass, "{e}");
        }
        // with a constant use bound the program body lists the interval itself
        let toy = WttReduction { a: red.a.clone(), usebound: encode(&cnst(3u64)) };
        let tw = wtt_to_dweu(&toy);
        let code = eval(&tw.body, &[encode(&cnst(0u64))], None, 10_000_000).value().cloned().unwrap();
        let mut listed = crate::coding::list_decode(&code).unwrap();
        listed.sort();
        assert_eq!(listed, (0..4u64).map(Nat::from).collect::<Vec<_>>());
        assert_eq!(tw.apply_set(&Nat::zero(), 0).unwrap(), SetValue::below(Nat::from(3u64)));
    }

    #[test]
    fn kanovich_both_ways() {
        let k = SetHandle::k();
        let red = WttReduction::k_identity();
        let wqc = wtt_to_wqc(&wtt_to_dweu(&red), &k);
        let alpha = k.windex.clone().unwrap();
        let empties = [encode(&divergent()), finset_to_windex(&FinSet::new()), Nat::from(22u64)];
        for e in &empties {
            let h = veldman_g(&alpha).eval(std::slice::from_ref(e));
            let z = red.certificate(&h);
            assert_eq!(check_wqc_at(&wqc, e, &z, &k, 100_000, 1_000_000), Verdict::Pass, "{e}");
        }
        // forward: a finite weakly quasicreative witness gives a separating g
        let w = simple_dweu_witness();
        let d = simple_dweu(2000);
        let a_set = d.set();
        let oracle = FnOracle(|z: &Nat| z.to_u64().is_some_and(|z| a_set.contains(z)));
        let g = wqc_to_wtt_fpf(&w);
        for e in [0u64, 28, 37] {
            let c = eval(&g, &[Nat::from(e)], Some(&oracle), 10_000_000).value().cloned().unwrap();
            let outside: Vec<u64> = block(e).iter().filter(|&z| !a_set.contains(z)).collect();
            for z in block(e).iter() {
                assert_eq!(eval(&c, &[Nat::from(z)], None, 100_000).converged(), outside.contains(&z));
            }
            let probes: Vec<Nat> = (0..3u64).chain(block(e).iter()).map(Nat::from).collect();
            assert_eq!(fpf_separates(&Nat::from(e), &c, &probes, 100_000), Verdict::Pass);
        }
    }

    #[test]
    fn k_fpf_is_fixed_point_free_on_samples() {
        let f = k_fpf_index();
        let oracle = FnOracle(|z: &Nat| k_mem(z, 100_000));
        for e in [encode(&Ast::Zero), encode(&divergent()), encode(&proj(1, 1)), Nat::from(22u64)] {
            let c = eval(&f, std::slice::from_ref(&e), Some(&oracle), 1_000_000).value().cloned().unwrap();
            let z = Nat::zero();
            assert_ne!(w_mem(&e, &z, 100_000), w_mem(&c, &z, 100_000));
        }
    }

    #[test]
    fn arslanov_on_corpus() {
        let k = SetHandle::k();
        let f = k_fpf_index();
        let cases = [("zero", true), ("divergent", false), ("table_1_5", false)];
        let mut decided = 0;
        for (name, in_k) in cases {
            let x = corpus_entry(name).index;
            if let Some(v) = arslanov_reduction(&f, &k, &x, 400, 1_000_000) {
                assert_eq!(v, in_k, "{name}");
                decided += 1;
            }
        }
        assert!(decided >= 1);
    }
}

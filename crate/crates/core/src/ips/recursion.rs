//! s-m-n, padding and the recursion and fixed-point theorems as index
//! transformations.

use super::build::*;
use super::{encode, eval, Ast};
use crate::coding::Nat;

/// `phi_{smn(e, xs, n)}(y1..yn) = phi_e(xs, y1..yn)`.
pub fn smn(e: &Nat, frozen: &[Nat], n: u64) -> Nat {
    smn_expr(lit(e.clone()), frozen.iter().cloned().map(lit).collect(), n).eval(&[])
}

fn smn_expr(e: CodeExpr, frozen: Vec<CodeExpr>, n: u64) -> CodeExpr {
    let mut gs: Vec<CodeExpr> = frozen.into_iter().map(ce_const).collect();
    gs.extend((1..=n).map(|i| lit_code(&proj(n, i))));
    ce_comp(e, gs)
}

/// An index for the same function that is at least `lower`; always wraps
/// at least once, so repeated padding strictly increases the code.
pub fn pad(e: &Nat, lower: &Nat) -> Nat {
    let wrap = |c: Nat| ce_comp(lit_code(&proj(1, 1)), vec![lit(c)]).eval(&[]);
    let mut c = wrap(e.clone());
    while c < *lower {
        c = wrap(c);
    }
    c
}

/// `S(x, y)` with `phi_{S(x,y)}(z) = phi_x(y, z)`.
fn s_expr(x: CodeExpr, y: CodeExpr) -> CodeExpr {
    smn_expr(x, vec![y], 1)
}

/// Program of arity 2 computing `S(z, z)` from `(z, x)`.
fn s_diag_program() -> Ast {
    s_expr(arg(0), arg(0)).program(2)
}

/// `g(e)` with `phi_{g(e)}(z, x) = phi_e(S(z, z), x)`.
fn g_expr(e: CodeExpr) -> CodeExpr {
    ce_comp(e, vec![lit_code(&s_diag_program()), lit_code(&proj(2, 2))])
}

fn rec_f_expr(e: CodeExpr) -> CodeExpr {
    let g = g_expr(e);
    s_expr(g.clone(), g)
}

/// Second recursion theorem: `phi_{rec_f(e)}(x) = phi_e(rec_f(e), x)`.
pub fn rec_f(e: &Nat) -> Nat {
    rec_f_expr(lit(e.clone())).eval(&[])
}

/// Program of arity `n` computing `<x1..xn>`.
fn list_program(n: u64) -> Ast {
    ce_list((0..n as usize).map(arg).collect()).program(n.max(1))
}

/// `h1(p)` with `phi_{h1(p)}(x1..xn) = phi_p(<x1..xn>)`.
fn h1_expr(p: CodeExpr, n: u64) -> CodeExpr {
    ce_comp(p, vec![lit_code(&list_program(n))])
}

/// `h2(e, ys)` with `phi_{h2(e,ys)}(p, <x1..xn>) = phi_e(h1(p), x1..xn, ys)`.
fn h2_expr(e: CodeExpr, ys: Vec<CodeExpr>, n: u64) -> CodeExpr {
    let mut gs = vec![lit_code(&h1_expr(arg(0), n).program(2))];
    for i in 1..=n {
        let mut x = proj(2, 2);
        for _ in 0..i {
            x = comp(Ast::Right, vec![x]);
        }
        gs.push(lit_code(&comp(Ast::Left, vec![x])));
    }
    gs.extend(ys.into_iter().map(ce_const));
    ce_comp(e, gs)
}

fn rec_fm_expr(e: CodeExpr, ys: Vec<CodeExpr>, n: u64) -> CodeExpr {
    h1_expr(rec_f_expr(h2_expr(e, ys, n)), n)
}

/// Parametrized recursion theorem for `n` free arguments:
/// `phi_{rec_fm(e,ys,n)}(x1..xn) = phi_e(rec_fm(e,ys,n), x1..xn, ys)`.
pub fn rec_fm(e: &Nat, ys: &[Nat], n: u64) -> Nat {
    rec_fm_expr(lit(e.clone()), ys.iter().cloned().map(lit).collect(), n).eval(&[])
}

/// `phi_w(x) = phi_x(x)`.
pub fn omega_index() -> Nat {
    encode(&comp(Ast::Univ, vec![proj(1, 1), proj(1, 1)]))
}

/// `C(x, y)`: on `z` returns an index of `phi_{phi_x(phi_y(z))}`.
pub fn c_index(x: &Nat, y: &Nat) -> Nat {
    let univ = lit_code(&Ast::Univ);
    let inner = ce_comp(univ.clone(), vec![ce_const(lit(y.clone())), ce_const(arg(0))]);
    let outer = ce_comp(univ.clone(), vec![ce_const(lit(x.clone())), inner]);
    let d = ce_comp(univ, vec![outer, lit_code(&proj(1, 1))]);
    encode(&d.program(1))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixedPointError {
    #[error("totality probe ran out of fuel")]
    CannotCertify { index: Nat },
}

/// Fixed-point theorem: `phi_{f(e)} = phi_{phi_e(f(e))}` for total `phi_e`.
/// The totality of `phi_e` is probed at `f(e)` with `fuel_hint`.
pub fn kleene_fp(e: &Nat, fuel_hint: u64) -> Result<Nat, FixedPointError> {
    let c = c_index(e, &omega_index());
    let fe = eval(&c, &[c.clone()], None, 1_000_000)
        .value()
        .cloned()
        .expect("C(e, w) is total");
    if eval(e, &[fe.clone()], None, fuel_hint).converged() {
        Ok(fe)
    } else {
        Err(FixedPointError::CannotCertify { index: fe })
    }
}

/// Code of the diagonal program `r(e)`: `phi_{r(e)}(x)` converges iff
/// `phi_e(x) = 0`.
pub fn r_expr(e: CodeExpr) -> CodeExpr {
    let body = ce_comp(lit_code(&Ast::Univ), vec![ce_const(e), lit_code(&proj(2, 1))]);
    ce_pair(lit(Nat::from(super::tag::MU)), body)
}

/// `r(e)`; in particular `K(r(e))` and `phi_e(r(e))` never agree.
pub fn r_index(e: &Nat) -> Nat {
    r_expr(lit(e.clone())).eval(&[])
}

/// `a` with `phi_a(p, x, e, z1..zn) = phi_{phi_e(p, z1..zn)}(x)`.
pub fn strong_fp_a(n: u64) -> Nat {
    let k = n + 3;
    let mut inner = vec![proj(k, 3), proj(k, 1)];
    inner.extend((4..=k).map(|i| proj(k, i)));
    encode(&comp(Ast::Univ, vec![comp(Ast::Univ, inner), proj(k, 2)]))
}

/// Strong fixed-point theorem with `n` parameters: returns `F(e)` with
/// `phi_{phi_{F(e)}(z)} = phi_{phi_e(phi_{F(e)}(z), z)}` when `phi_e` is
/// total. `F(e)` computes `rec_fm(a, (e, z1..zn), 1)`.
pub fn strong_fp(e: &Nat, n: u64) -> Nat {
    let mut ys = vec![lit(e.clone())];
    ys.extend((0..n as usize).map(arg));
    encode(&rec_fm_expr(lit(strong_fp_a(n)), ys, 1).program(n.max(1)))
}

/// `strong_fp` with the totality of `phi_e` probed at `probes`.
pub fn strong_fp_checked(e: &Nat, n: u64, probes: &[Vec<Nat>], fuel_hint: u64) -> Result<Nat, FixedPointError> {
    let f = strong_fp(e, n);
    for z in probes {
        let Some(v) = eval(&f, z, None, 1_000_000).value().cloned() else {
            return Err(FixedPointError::CannotCertify { index: f });
        };
        let mut args = vec![v];
        args.extend(z.iter().cloned());
        if !eval(e, &args, None, fuel_hint).converged() {
            return Err(FixedPointError::CannotCertify { index: f });
        }
    }
    Ok(f)
}

//! Program builders and index arithmetic.
//!
//! [`CodeExpr`] describes a code computed from arguments by pairing. The same
//! expression can be evaluated natively or compiled into a program that
//! computes it, which is how programs that manufacture other programs'
//! indices are written.

use super::{encode, tag, Ast};
use crate::coding::Nat;

#[derive(Clone, Debug)]
pub enum CodeExpr {
    Lit(Nat),
    Arg(usize),
    Pair(Box<CodeExpr>, Box<CodeExpr>),
}

impl CodeExpr {
    pub fn eval(&self, args: &[Nat]) -> Nat {
        match self {
            CodeExpr::Lit(n) => n.clone(),
            CodeExpr::Arg(i) => args.get(*i).cloned().unwrap_or_default(),
            CodeExpr::Pair(a, b) => Nat::pair(&a.eval(args), &b.eval(args)),
        }
    }

    /// A program of the given arity computing this expression.
    pub fn program(&self, arity: u64) -> Ast {
        match self {
            CodeExpr::Lit(n) => Ast::Const(n.clone()),
            CodeExpr::Arg(i) => {
                assert!((*i as u64) < arity, "argument {i} outside arity {arity}");
                Ast::Proj(arity, *i as u64 + 1)
            }
            CodeExpr::Pair(a, b) => comp(Ast::Pair, vec![a.program(arity), b.program(arity)]),
        }
    }
}

pub fn lit(n: Nat) -> CodeExpr {
    CodeExpr::Lit(n)
}

pub fn lit_code(p: &Ast) -> CodeExpr {
    CodeExpr::Lit(encode(p))
}

pub fn arg(i: usize) -> CodeExpr {
    CodeExpr::Arg(i)
}

pub fn ce_pair(a: CodeExpr, b: CodeExpr) -> CodeExpr {
    if let (CodeExpr::Lit(x), CodeExpr::Lit(y)) = (&a, &b) {
        return CodeExpr::Lit(Nat::pair(x, y));
    }
    CodeExpr::Pair(Box::new(a), Box::new(b))
}

pub fn ce_list(items: Vec<CodeExpr>) -> CodeExpr {
    if items.is_empty() {
        return lit(Nat::zero());
    }
    let n = items.len();
    let tail = items
        .into_iter()
        .rev()
        .fold(lit(Nat::zero()), |acc, x| ce_pair(x, acc));
    ce_pair(lit(Nat::from(n)), tail)
}

/// Code of `Comp(h, gs)` where `h` and the `gs` are given by their codes.
pub fn ce_comp(h: CodeExpr, gs: Vec<CodeExpr>) -> CodeExpr {
    ce_pair(lit(Nat::from(tag::COMP)), ce_pair(h, ce_list(gs)))
}

/// Code of `Const(c)`.
pub fn ce_const(c: CodeExpr) -> CodeExpr {
    ce_pair(lit(Nat::from(tag::CONST)), c)
}

/// Code of `p` with every oracle query replaced by the unary program whose
/// code is `hole`. Parts without queries stay literal.
pub fn code_with_oracle(p: &Ast, hole: &CodeExpr) -> CodeExpr {
    if !p.uses_oracle() {
        return lit_code(p);
    }
    let tagged = |t: u64, body: CodeExpr| ce_pair(lit(Nat::from(t)), body);
    match p {
        Ast::OracleQuery => hole.clone(),
        Ast::Comp(h, gs) => ce_comp(
            code_with_oracle(h, hole),
            gs.iter().map(|g| code_with_oracle(g, hole)).collect(),
        ),
        Ast::PrimRec(g) => tagged(tag::PRIMREC, code_with_oracle(g, hole)),
        Ast::Mu(g) => tagged(tag::MU, code_with_oracle(g, hole)),
        Ast::While(g, h) => tagged(tag::WHILE, ce_pair(code_with_oracle(g, hole), code_with_oracle(h, hole))),
        _ => unreachable!("leaf without oracle"),
    }
}

pub fn comp(h: Ast, gs: Vec<Ast>) -> Ast {
    Ast::Comp(Box::new(h), gs)
}

pub fn proj(k: u64, i: u64) -> Ast {
    Ast::Proj(k, i)
}

pub fn cnst(c: impl Into<Nat>) -> Ast {
    Ast::Const(c.into())
}

pub fn mu(g: Ast) -> Ast {
    Ast::Mu(Box::new(g))
}

pub fn primrec(g: Ast) -> Ast {
    Ast::PrimRec(Box::new(g))
}

/// `phi_e(gs...)` with `e` fixed.
pub fn call(e: &Nat, gs: Vec<Ast>) -> Ast {
    let mut all = vec![Ast::Const(e.clone())];
    all.extend(gs);
    comp(Ast::Univ, all)
}

pub fn identity() -> Ast {
    proj(1, 1)
}

/// `x + y` by recursion on `x`.
pub fn add() -> Ast {
    primrec(comp(
        Ast::Cond,
        vec![proj(3, 1), proj(3, 3), comp(Ast::Succ, vec![proj(3, 2)])],
    ))
}

/// `x * y` by recursion on `x`.
pub fn mul() -> Ast {
    primrec(comp(
        Ast::Cond,
        vec![
            proj(3, 1),
            cnst(0u64),
            comp(add(), vec![proj(3, 3), proj(3, 2)]),
        ],
    ))
}

/// Predecessor, `pred(0) = 0`.
pub fn pred() -> Ast {
    comp(
        Ast::Right,
        vec![primrec(comp(
            Ast::Pair,
            vec![proj(2, 1), comp(Ast::Left, vec![proj(2, 2)])],
        ))],
    )
}

pub fn prog_const(c: impl Into<Nat>) -> Nat {
    encode(&cnst(c))
}

/// Converges to 0 on `x` iff `phi_e(x) = target`, diverges otherwise.
pub fn prog_guard_eq(e: &Nat, target: &Nat) -> Nat {
    let g = comp(
        Ast::Eq,
        vec![call(e, vec![proj(2, 2)]), Ast::Const(target.clone())],
    );
    encode(&mu(g))
}

/// On `n`, the least code `pair(m, s)` with `phi_{e,s}(m) = n`.
pub fn prog_dovetail_search(e: &Nat) -> Nat {
    let t = proj(2, 1);
    let clocked = comp(
        Ast::Clock,
        vec![
            Ast::Const(e.clone()),
            comp(Ast::Right, vec![t.clone()]),
            comp(Ast::Left, vec![t]),
        ],
    );
    let g = comp(Ast::Eq, vec![clocked, comp(Ast::Succ, vec![proj(2, 2)])]);
    encode(&mu(g))
}

/// Program selecting among codes: evaluates the code chosen by `x` on `x`.
fn dispatch(entries: &[(Nat, Nat)], otherwise: Nat) -> Ast {
    let sel = entries.iter().rev().fold(Ast::Const(otherwise), |rest, (k, code)| {
        comp(
            Ast::Cond,
            vec![
                comp(Ast::Eq, vec![proj(1, 1), Ast::Const(k.clone())]),
                Ast::Const(code.clone()),
                rest,
            ],
        )
    });
    comp(Ast::Univ, vec![sel, proj(1, 1)])
}

/// Finite lookup table; diverges off the table. Earlier entries win.
pub fn prog_case_table(pairs: &[(Nat, Nat)]) -> Nat {
    let entries: Vec<(Nat, Nat)> = pairs
        .iter()
        .map(|(k, v)| (k.clone(), prog_const(v.clone())))
        .collect();
    encode(&dispatch(&entries, encode(&super::divergent())))
}

/// Like [`prog_case_table`] with a default value off the table.
pub fn prog_table_default(pairs: &[(Nat, Nat)], default: &Nat) -> Nat {
    let entries: Vec<(Nat, Nat)> = pairs
        .iter()
        .map(|(k, v)| (k.clone(), prog_const(v.clone())))
        .collect();
    encode(&dispatch(&entries, prog_const(default.clone())))
}

#[cfg(test)]
mod tests {
    use super::super::{eval_ast, run, Outcome};
    use super::*;

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    #[test]
    fn oracle_hole() {
        let p = comp(Ast::Succ, vec![comp(Ast::OracleQuery, vec![comp(Ast::Succ, vec![proj(1, 1)])])]);
        let double = lit_code(&add_self());
        let c = code_with_oracle(&p, &double).eval(&[]);
        assert_eq!(run(&c, &[4], 10_000).value(), Some(&n(11)));
        let plain = comp(Ast::Succ, vec![proj(1, 1)]);
        assert_eq!(code_with_oracle(&plain, &double).eval(&[]), encode(&plain));
    }

    fn add_self() -> Ast {
        comp(add(), vec![proj(1, 1), proj(1, 1)])
    }

    #[test]
    fn arithmetic() {
        assert_eq!(eval_ast(&add(), &[n(3), n(4)], None, 1000).value(), Some(&n(7)));
        assert_eq!(eval_ast(&mul(), &[n(3), n(4)], None, 10_000).value(), Some(&n(12)));
        for x in 0..6 {
            assert_eq!(eval_ast(&pred(), &[n(x)], None, 1000).value(), Some(&n(x.saturating_sub(1))));
        }
    }

    #[test]
    fn const_and_guard() {
        assert_eq!(run(&prog_const(7u64), &[123], 10).value(), Some(&n(7)));
        let g = prog_guard_eq(&encode(&identity()), &n(5));
        assert_eq!(run(&g, &[5], 1000).value(), Some(&n(0)));
        assert_eq!(run(&g, &[4], 10_000), Outcome::OutOfFuel);
    }

    #[test]
    fn case_table() {
        let t = prog_case_table(&[(n(2), n(9))]);
        assert_eq!(run(&t, &[2], 1000).value(), Some(&n(9)));
        assert_eq!(run(&t, &[3], 100_000), Outcome::OutOfFuel);
    }

    #[test]
    fn dovetail() {
        let dbl = encode(&comp(add(), vec![proj(1, 1), proj(1, 1)]));
        let d = prog_dovetail_search(&dbl);
        let out = run(&d, &[6], 1_000_000);
        let t = out.value().unwrap().clone();
        let (m, s) = t.unpair();
        assert_eq!(m, n(3));
        assert!(run(&dbl, &[3], s.to_u64().unwrap()).converged());
        assert!(!run(&dbl, &[3], s.to_u64().unwrap() - 1).converged());
        assert_eq!(run(&d, &[5], 200_000), Outcome::OutOfFuel);
    }

    #[test]
    fn code_expr_agrees() {
        let e = ce_comp(arg(0), vec![ce_const(arg(1)), lit_code(&proj(1, 1))]);
        let args = [n(17), n(4)];
        let p = e.program(2);
        assert_eq!(eval_ast(&p, &args, None, 1000).value(), Some(&e.eval(&args)));
    }
}

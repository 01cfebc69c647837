//! A small imperative language compiled to programs.
//!
//! Variables live in a state tuple `pair(v0, pair(v1, .. pair(vk, 0)))`.
//! Statements become state transformers; `If` selects the branch code and
//! runs it through `Univ`, so only the chosen branch is evaluated.

use super::build::{cnst, comp, proj};
use super::{encode, Ast};
use crate::coding::Nat;

#[derive(Clone, Debug)]
pub enum Expr {
    Var(usize),
    Lit(Nat),
    /// Applies a program to the values of the argument expressions.
    Apply(Ast, Vec<Expr>),
}

#[derive(Clone, Debug)]
pub enum Stmt {
    Set(usize, Expr),
    /// Runs the first block when the condition is nonzero.
    If(Expr, Vec<Stmt>, Vec<Stmt>),
    /// Repeats the block while the condition is nonzero.
    While(Expr, Vec<Stmt>),
}

/// A function of `args` arguments, held in variables `0..args`.
#[derive(Clone, Debug)]
pub struct Func {
    pub args: usize,
    pub vars: usize,
    pub body: Vec<Stmt>,
    pub result: Expr,
}

pub fn v(i: usize) -> Expr {
    Expr::Var(i)
}

pub fn n(x: impl Into<Nat>) -> Expr {
    Expr::Lit(x.into())
}

pub fn ap(p: Ast, args: Vec<Expr>) -> Expr {
    Expr::Apply(p, args)
}

pub fn succ(a: Expr) -> Expr {
    ap(Ast::Succ, vec![a])
}

pub fn pair(a: Expr, b: Expr) -> Expr {
    ap(Ast::Pair, vec![a, b])
}

pub fn left(a: Expr) -> Expr {
    ap(Ast::Left, vec![a])
}

pub fn right(a: Expr) -> Expr {
    ap(Ast::Right, vec![a])
}

/// 1 when equal, 0 otherwise.
pub fn is_eq(a: Expr, b: Expr) -> Expr {
    ap(Ast::Cond, vec![ap(Ast::Eq, vec![a, b]), n(1u64), n(0u64)])
}

/// 1 when different, 0 otherwise.
pub fn ne(a: Expr, b: Expr) -> Expr {
    ap(Ast::Eq, vec![a, b])
}

/// 1 when `a` is 0, 0 otherwise.
pub fn not(a: Expr) -> Expr {
    ap(Ast::Cond, vec![a, n(1u64), n(0u64)])
}

/// Strict selection: `a` when `c = 0`, else `b`. Both sides are evaluated.
pub fn cond(c: Expr, a: Expr, b: Expr) -> Expr {
    ap(Ast::Cond, vec![c, a, b])
}

pub fn univ(e: Expr, args: Vec<Expr>) -> Expr {
    let mut all = vec![e];
    all.extend(args);
    ap(Ast::Univ, all)
}

/// `phi_{e,s}(args) + 1`, or 0 when not finished within `s` steps.
pub fn clock(e: Expr, s: Expr, args: Vec<Expr>) -> Expr {
    let mut all = vec![e, s];
    all.extend(args);
    ap(Ast::Clock, all)
}

pub fn oracle(x: Expr) -> Expr {
    ap(Ast::OracleQuery, vec![x])
}

pub fn add(a: Expr, b: Expr) -> Expr {
    ap(super::build::add(), vec![a, b])
}

/// The `i`-th element of a list code `<x0..>`, 0-based.
pub fn nth(list: Expr, i: usize) -> Expr {
    let mut x = right(list);
    for _ in 0..i {
        x = right(x);
    }
    left(x)
}

pub fn set(i: usize, e: Expr) -> Stmt {
    Stmt::Set(i, e)
}

pub fn if_(c: Expr, t: Vec<Stmt>, f: Vec<Stmt>) -> Stmt {
    Stmt::If(c, t, f)
}

pub fn while_(c: Expr, body: Vec<Stmt>) -> Stmt {
    Stmt::While(c, body)
}

fn get(i: usize) -> Ast {
    let mut x = proj(1, 1);
    for _ in 0..i {
        x = comp(Ast::Right, vec![x]);
    }
    comp(Ast::Left, vec![x])
}

struct Compiler {
    vars: usize,
}

impl Compiler {
    fn expr(&self, e: &Expr) -> Ast {
        match e {
            Expr::Var(i) => {
                assert!(*i < self.vars, "variable {i} out of range");
                get(*i)
            }
            Expr::Lit(c) => Ast::Const(c.clone()),
            Expr::Apply(p, args) => comp(p.clone(), args.iter().map(|a| self.expr(a)).collect()),
        }
    }

    fn tuple(&self, slot: impl Fn(usize) -> Ast) -> Ast {
        (0..self.vars)
            .rev()
            .fold(cnst(0u64), |acc, j| comp(Ast::Pair, vec![slot(j), acc]))
    }

    fn stmt(&self, s: &Stmt) -> Ast {
        match s {
            Stmt::Set(i, e) => {
                let value = self.expr(e);
                self.tuple(|j| if j == *i { value.clone() } else { get(j) })
            }
            Stmt::If(c, t, f) => {
                let t = encode(&self.block(t));
                let f = encode(&self.block(f));
                let chosen = comp(Ast::Cond, vec![self.expr(c), Ast::Const(f), Ast::Const(t)]);
                comp(Ast::Univ, vec![chosen, proj(1, 1)])
            }
            Stmt::While(c, body) => Ast::While(Box::new(self.expr(c)), Box::new(self.block(body))),
        }
    }

    fn block(&self, stmts: &[Stmt]) -> Ast {
        stmts
            .iter()
            .fold(proj(1, 1), |acc, s| match acc {
                Ast::Proj(1, 1) => self.stmt(s),
                acc => comp(self.stmt(s), vec![acc]),
            })
    }
}

impl Func {
    pub fn compile(&self) -> Ast {
        assert!(self.args <= self.vars);
        let c = Compiler { vars: self.vars };
        let k = self.args.max(1) as u64;
        let init = c.tuple(|j| if j < self.args { proj(k, j as u64 + 1) } else { cnst(0u64) });
        let body = c.block(&self.body);
        comp(c.expr(&self.result), vec![comp(body, vec![init])])
    }

    pub fn index(&self) -> Nat {
        encode(&self.compile())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{eval_ast, Outcome};
    use super::*;

    fn num(x: u64) -> Nat {
        Nat::from(x)
    }

    #[test]
    fn counting_loop() {
        // x, acc: acc += 2 while x != 0; x -= 1 via a counter
        let f = Func {
            args: 1,
            vars: 3,
            body: vec![while_(
                ne(v(1), v(0)),
                vec![set(1, succ(v(1))), set(2, add(v(2), n(2u64)))],
            )],
            result: v(2),
        };
        let p = f.compile();
        for x in 0..6 {
            assert_eq!(eval_ast(&p, &[num(x)], None, 100_000).value(), Some(&num(2 * x)));
        }
    }

    #[test]
    fn branches_are_lazy() {
        let div = super::super::divergent();
        let f = Func {
            args: 1,
            vars: 2,
            body: vec![if_(
                v(0),
                vec![set(1, n(7u64))],
                vec![set(1, ap(div, vec![v(0)]))],
            )],
            result: v(1),
        };
        let p = f.compile();
        assert_eq!(eval_ast(&p, &[num(3)], None, 10_000).value(), Some(&num(7)));
        assert_eq!(eval_ast(&p, &[num(0)], None, 10_000), Outcome::OutOfFuel);
    }

    #[test]
    fn list_access() {
        let f = Func { args: 1, vars: 1, body: vec![], result: nth(v(0), 1) };
        let l = crate::coding::list_encode(&[num(4), num(9), num(2)]);
        assert_eq!(eval_ast(&f.compile(), &[l], None, 1000).value(), Some(&num(9)));
    }
}

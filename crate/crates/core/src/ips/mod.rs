//! The indexed programming system.
//!
//! Programs are mu-recursive syntax trees extended with an oracle query and
//! a handful of native helpers, numbered by Cantor-pair codes. Every natural
//! number is a program: codes that do not parse denote [`divergent`].

mod build;
pub mod dsl;
mod recursion;
mod sexpr;

pub use build::*;
pub use recursion::*;
pub use sexpr::{parse_program, SexprError};

use crate::coding::{list_decode, list_encode, FinSet, Nat};
use serde::Serialize;
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Longest argument list accepted inside a composition code.
const MAX_COMP_WIDTH: usize = 4096;
/// Step cost of touching a lazily stored value.
const LAZY_WORDS: u64 = 16;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Ast {
    Zero,
    Succ,
    /// `Proj(k, i)` returns the `i`-th of `k` arguments, 1-based.
    Proj(u64, u64),
    Comp(Box<Ast>, Vec<Ast>),
    PrimRec(Box<Ast>),
    Mu(Box<Ast>),
    OracleQuery,
    /// Constant function.
    Const(Nat),
    /// `Univ(e, x1..xn) = phi_e(x1..xn)`.
    Univ,
    Pair,
    Left,
    Right,
    /// 0 when both arguments are equal, 1 otherwise.
    Eq,
    /// `Cond(c, a, b)` is `a` when `c = 0` and `b` otherwise.
    Cond,
    /// `Clock(e, s, x1..xn)` is `phi_{e,s}(x1..xn) + 1`, or 0 when that
    /// computation does not finish within `s` steps.
    Clock,
    /// `While(g, h)(x, ps)`: replaces `x` by `h(x, ps)` until `g(x, ps) = 0`,
    /// then returns `x`.
    While(Box<Ast>, Box<Ast>),
}

pub mod tag {
    pub const ZERO: u64 = 0;
    pub const SUCC: u64 = 1;
    pub const PROJ: u64 = 2;
    pub const COMP: u64 = 3;
    pub const PRIMREC: u64 = 4;
    pub const MU: u64 = 5;
    pub const ORACLE: u64 = 6;
    pub const CONST: u64 = 7;
    pub const UNIV: u64 = 8;
    pub const PAIR: u64 = 9;
    pub const LEFT: u64 = 10;
    pub const RIGHT: u64 = 11;
    pub const EQ: u64 = 12;
    pub const COND: u64 = 13;
    pub const CLOCK: u64 = 14;
    pub const WHILE: u64 = 15;
}

fn tagged(t: u64, body: Nat) -> Nat {
    Nat::pair(&Nat::from(t), &body)
}

pub fn encode(p: &Ast) -> Nat {
    match p {
        Ast::Zero => tagged(tag::ZERO, Nat::zero()),
        Ast::Succ => tagged(tag::SUCC, Nat::zero()),
        Ast::Proj(k, i) => tagged(tag::PROJ, Nat::pair(&(*k).into(), &(*i).into())),
        Ast::Comp(h, gs) => {
            let gs: Vec<Nat> = gs.iter().map(encode).collect();
            tagged(tag::COMP, Nat::pair(&encode(h), &list_encode(&gs)))
        }
        Ast::PrimRec(g) => tagged(tag::PRIMREC, encode(g)),
        Ast::Mu(g) => tagged(tag::MU, encode(g)),
        Ast::OracleQuery => tagged(tag::ORACLE, Nat::zero()),
        Ast::Const(c) => tagged(tag::CONST, c.clone()),
        Ast::Univ => tagged(tag::UNIV, Nat::zero()),
        Ast::Pair => tagged(tag::PAIR, Nat::zero()),
        Ast::Left => tagged(tag::LEFT, Nat::zero()),
        Ast::Right => tagged(tag::RIGHT, Nat::zero()),
        Ast::Eq => tagged(tag::EQ, Nat::zero()),
        Ast::Cond => tagged(tag::COND, Nat::zero()),
        Ast::Clock => tagged(tag::CLOCK, Nat::zero()),
        Ast::While(g, h) => tagged(tag::WHILE, Nat::pair(&encode(g), &encode(h))),
    }
}

/// `Mu(Comp(Succ, [Proj(2, 1)]))`: searches for a zero of `z + 1`.
pub fn divergent() -> Ast {
    Ast::Mu(Box::new(Ast::Comp(Box::new(Ast::Succ), vec![Ast::Proj(2, 1)])))
}

/// Total: malformed codes decode to [`divergent`].
pub fn decode(e: &Nat) -> Ast {
    try_decode(e).unwrap_or_else(divergent)
}

pub fn try_decode(e: &Nat) -> Option<Ast> {
    let (t, body) = e.unpair();
    let nullary = |a: Ast| body.is_zero().then_some(a);
    match t.to_u64()? {
        tag::ZERO => nullary(Ast::Zero),
        tag::SUCC => nullary(Ast::Succ),
        tag::PROJ => {
            let (k, i) = body.unpair();
            let (k, i) = (k.to_u64()?, i.to_u64()?);
            (1 <= i && i <= k).then_some(Ast::Proj(k, i))
        }
        tag::COMP => {
            let (h, gs) = body.unpair();
            let (len, _) = gs.unpair();
            if len.to_usize()? > MAX_COMP_WIDTH {
                return None;
            }
            let gs = list_decode(&gs).ok()?;
            let gs = gs.iter().map(try_decode).collect::<Option<Vec<_>>>()?;
            Some(Ast::Comp(Box::new(try_decode(&h)?), gs))
        }
        tag::PRIMREC => Some(Ast::PrimRec(Box::new(try_decode(&body)?))),
        tag::MU => Some(Ast::Mu(Box::new(try_decode(&body)?))),
        tag::ORACLE => nullary(Ast::OracleQuery),
        tag::CONST => Some(Ast::Const(body)),
        tag::UNIV => nullary(Ast::Univ),
        tag::PAIR => nullary(Ast::Pair),
        tag::LEFT => nullary(Ast::Left),
        tag::RIGHT => nullary(Ast::Right),
        tag::EQ => nullary(Ast::Eq),
        tag::COND => nullary(Ast::Cond),
        tag::CLOCK => nullary(Ast::Clock),
        tag::WHILE => {
            let (g, h) = body.unpair();
            Some(Ast::While(Box::new(try_decode(&g)?), Box::new(try_decode(&h)?)))
        }
        _ => None,
    }
}

impl Ast {
    pub fn code(&self) -> Nat {
        encode(self)
    }

    pub fn node_count(&self) -> usize {
        match self {
            Ast::Comp(h, gs) => 1 + h.node_count() + gs.iter().map(Ast::node_count).sum::<usize>(),
            Ast::PrimRec(g) | Ast::Mu(g) => 1 + g.node_count(),
            Ast::While(g, h) => 1 + g.node_count() + h.node_count(),
            _ => 1,
        }
    }

    pub fn any_node(&self, pred: &dyn Fn(&Ast) -> bool) -> bool {
        pred(self)
            || match self {
                Ast::Comp(h, gs) => h.any_node(pred) || gs.iter().any(|g| g.any_node(pred)),
                Ast::PrimRec(g) | Ast::Mu(g) => g.any_node(pred),
                Ast::While(g, h) => g.any_node(pred) || h.any_node(pred),
                _ => false,
            }
    }

    pub fn uses_oracle(&self) -> bool {
        self.any_node(&|n| matches!(n, Ast::OracleQuery))
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Zero => write!(f, "(zero)"),
            Ast::Succ => write!(f, "(succ)"),
            Ast::Proj(k, i) => write!(f, "(proj {k} {i})"),
            Ast::Comp(h, gs) => {
                write!(f, "(comp {h}")?;
                for g in gs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            Ast::PrimRec(g) => write!(f, "(primrec {g})"),
            Ast::Mu(g) => write!(f, "(mu {g})"),
            Ast::OracleQuery => write!(f, "(oracle)"),
            Ast::Const(c) => write!(f, "(const {c})"),
            Ast::Univ => write!(f, "(univ)"),
            Ast::Pair => write!(f, "(pair)"),
            Ast::Left => write!(f, "(left)"),
            Ast::Right => write!(f, "(right)"),
            Ast::Eq => write!(f, "(eq)"),
            Ast::Cond => write!(f, "(cond)"),
            Ast::Clock => write!(f, "(clock)"),
            Ast::While(g, h) => write!(f, "(while {g} {h})"),
        }
    }
}

impl fmt::Debug for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Membership oracle. Must be total and deterministic.
pub trait Oracle: Sync {
    fn query(&self, x: &Nat) -> bool;
}

impl Oracle for FinSet {
    fn query(&self, x: &Nat) -> bool {
        x.to_u64().is_some_and(|v| self.contains(v))
    }
}

/// Oracle given by a closure.
pub struct FnOracle<F>(pub F);

impl<F: Fn(&Nat) -> bool + Sync> Oracle for FnOracle<F> {
    fn query(&self, x: &Nat) -> bool {
        (self.0)(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Converged {
        value: Nat,
        steps: u64,
        /// One more than the largest oracle query, 0 without queries.
        #[serde(rename = "use")]
        use_: Nat,
    },
    OutOfFuel,
}

impl Outcome {
    pub fn value(&self) -> Option<&Nat> {
        match self {
            Outcome::Converged { value, .. } => Some(value),
            Outcome::OutOfFuel => None,
        }
    }

    pub fn converged(&self) -> bool {
        matches!(self, Outcome::Converged { .. })
    }
}

#[derive(Debug)]
struct OutOfFuel;

struct Machine<'a> {
    remaining: u64,
    oracle: Option<&'a dyn Oracle>,
    max_query: Option<Nat>,
}

const DECODE_CACHE_LIMIT: usize = 4096;

thread_local! {
    static DECODED: RefCell<HashMap<Nat, Arc<Ast>>> = RefCell::new(HashMap::new());
}

/// [`decode`] with a per-thread memo, used by the universal nodes.
pub fn decode_cached(e: &Nat) -> Arc<Ast> {
    if let Some(hit) = DECODED.with(|c| c.borrow().get(e).cloned()) {
        return hit;
    }
    let ast = Arc::new(decode(e));
    DECODED.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() >= DECODE_CACHE_LIMIT {
            c.clear();
        }
        c.insert(e.clone(), ast.clone());
    });
    ast
}

fn nth(args: &[Nat], i: usize) -> Nat {
    args.get(i).cloned().unwrap_or_default()
}

impl Machine<'_> {
    fn tick(&mut self) -> Result<(), OutOfFuel> {
        if self.remaining == 0 {
            return Err(OutOfFuel);
        }
        self.remaining -= 1;
        Ok(())
    }

    /// Arithmetic on values wider than a machine word costs one step per word.
    fn charge(&mut self, x: &Nat) -> Result<(), OutOfFuel> {
        if x.to_u64().is_some() {
            return Ok(());
        }
        // lazy pairs are handled structurally, so they cost a flat amount
        let words = if x.is_lazy() { LAZY_WORDS } else { x.bits_hint() / 64 };
        if self.remaining < words {
            return Err(OutOfFuel);
        }
        self.remaining -= words;
        Ok(())
    }

    fn run(&mut self, p: &Ast, args: &[Nat]) -> Result<Nat, OutOfFuel> {
        self.tick()?;
        match p {
            Ast::Zero => Ok(Nat::zero()),
            Ast::Succ => {
                let x = nth(args, 0);
                self.charge(&x)?;
                Ok(x.succ())
            }
            Ast::Proj(_, i) => Ok(nth(args, (*i - 1) as usize)),
            Ast::Comp(h, gs) => {
                let mut ys = Vec::with_capacity(gs.len());
                for g in gs {
                    ys.push(self.run(g, args)?);
                }
                self.run(h, &ys)
            }
            Ast::PrimRec(g) => {
                let n = nth(args, 0);
                let mut inner: Vec<Nat> = Vec::with_capacity(args.len() + 1);
                inner.push(Nat::zero());
                inner.push(Nat::zero());
                inner.extend(args.iter().skip(1).cloned());
                let mut acc = self.run(g, &inner)?;
                let mut i = Nat::zero();
                while i < n {
                    i = i.succ();
                    inner[0] = i.clone();
                    inner[1] = acc;
                    acc = self.run(g, &inner)?;
                }
                Ok(acc)
            }
            Ast::Mu(g) => {
                let mut inner: Vec<Nat> = Vec::with_capacity(args.len() + 1);
                inner.push(Nat::zero());
                inner.extend(args.iter().cloned());
                let mut z = Nat::zero();
                loop {
                    self.tick()?;
                    inner[0] = z.clone();
                    if self.run(g, &inner)?.is_zero() {
                        return Ok(z);
                    }
                    z = z.succ();
                }
            }
            Ast::OracleQuery => {
                self.tick()?;
                let x = nth(args, 0);
                self.charge(&x)?;
                let member = self.oracle.is_some_and(|o| o.query(&x));
                let u = x.succ();
                if self.max_query.as_ref().is_none_or(|m| *m < u) {
                    self.max_query = Some(u);
                }
                Ok(Nat::from(member as u64))
            }
            Ast::Const(c) => Ok(c.clone()),
            Ast::Univ => {
                let e = nth(args, 0);
                let prog = decode_cached(&e);
                self.run(&prog, args.get(1..).unwrap_or(&[]))
            }
            Ast::Pair => Ok(Nat::pair(&nth(args, 0), &nth(args, 1))),
            Ast::Left => Ok(nth(args, 0).unpair().0),
            Ast::Right => Ok(nth(args, 0).unpair().1),
            Ast::Eq => Ok(Nat::from((nth(args, 0) != nth(args, 1)) as u64)),
            Ast::Cond => Ok(if nth(args, 0).is_zero() { nth(args, 1) } else { nth(args, 2) }),
            Ast::Clock => {
                let e = nth(args, 0);
                let s = nth(args, 1);
                let prog = decode_cached(&e);
                let outer = self.remaining;
                let budget = match s.to_u64() {
                    Some(s) if s <= outer => s,
                    _ => outer,
                };
                let bounded_by_s = s.to_u64().is_some_and(|s| s <= outer);
                self.remaining = budget;
                let r = self.run(&prog, args.get(2..).unwrap_or(&[]));
                let spent = budget - self.remaining;
                self.remaining = outer - spent;
                match r {
                    Ok(v) => {
                        self.charge(&v)?;
                        Ok(v.succ())
                    }
                    Err(_) if bounded_by_s => Ok(Nat::zero()),
                    Err(e) => Err(e),
                }
            }
            Ast::While(g, h) => {
                let mut cur: Vec<Nat> = args.to_vec();
                if cur.is_empty() {
                    cur.push(Nat::zero());
                }
                loop {
                    self.tick()?;
                    if self.run(g, &cur)?.is_zero() {
                        return Ok(cur.swap_remove(0));
                    }
                    cur[0] = self.run(h, &cur)?;
                }
            }
        }
    }
}

/// `phi_{p,fuel}(args)` relative to `oracle` (the empty set when absent).
pub fn eval_ast(p: &Ast, args: &[Nat], oracle: Option<&dyn Oracle>, fuel: u64) -> Outcome {
    let mut m = Machine { remaining: fuel, oracle, max_query: None };
    match m.run(p, args) {
        Ok(value) => Outcome::Converged {
            value,
            steps: fuel - m.remaining,
            use_: m.max_query.unwrap_or_default(),
        },
        Err(OutOfFuel) => Outcome::OutOfFuel,
    }
}

pub fn eval(e: &Nat, args: &[Nat], oracle: Option<&dyn Oracle>, fuel: u64) -> Outcome {
    eval_ast(&decode(e), args, oracle, fuel)
}

/// Shorthand for oracle-free evaluation on small arguments.
pub fn run(e: &Nat, args: &[u64], fuel: u64) -> Outcome {
    let args: Vec<Nat> = args.iter().map(|&a| Nat::from(a)).collect();
    eval(e, &args, None, fuel)
}

//! Untyped lambda calculus: named terms, nameless alpha comparison,
//! normal-order reduction, fuel-bounded beta equality, Church numerals.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    App(Arc<Term>, Arc<Term>),
    Abs(String, Arc<Term>),
}

pub fn var(x: &str) -> Term {
    Term::Var(x.to_string())
}

pub fn app(f: Term, a: Term) -> Term {
    Term::App(Arc::new(f), Arc::new(a))
}

pub fn abs(x: &str, body: Term) -> Term {
    Term::Abs(x.to_string(), Arc::new(body))
}

/// `\x1 .. xn. body`
pub fn abs_many(xs: &[&str], body: Term) -> Term {
    xs.iter().rev().fold(body, |b, x| abs(x, b))
}

/// Left-nested application `f a1 .. an`.
pub fn apply(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
    args.into_iter().fold(f, app)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Nameless {
    Free(String),
    Bound(usize),
    App(Box<Nameless>, Box<Nameless>),
    Abs(Box<Nameless>),
}

fn nameless(t: &Term, scope: &mut Vec<String>) -> Nameless {
    match t {
        Term::Var(x) => match scope.iter().rev().position(|y| y == x) {
            Some(i) => Nameless::Bound(i),
            None => Nameless::Free(x.clone()),
        },
        Term::App(f, a) => Nameless::App(Box::new(nameless(f, scope)), Box::new(nameless(a, scope))),
        Term::Abs(x, b) => {
            scope.push(x.clone());
            let body = nameless(b, scope);
            scope.pop();
            Nameless::Abs(Box::new(body))
        }
    }
}

impl Term {
    fn key(&self) -> Nameless {
        nameless(self, &mut Vec::new())
    }

    pub fn free_vars(&self) -> HashSet<String> {
        let mut out = HashSet::new();
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut HashSet<String>) {
            match t {
                Term::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Term::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
                Term::Abs(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Abs(_, b) => 1 + b.size(),
        }
    }

    pub fn is_normal(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Abs(_, b) => b.is_normal(),
            Term::App(f, a) => !matches!(**f, Term::Abs(..)) && f.is_normal() && a.is_normal(),
        }
    }
}

pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    a.key() == b.key()
}

fn fresh(base: &str, avoid: &HashSet<String>) -> String {
    let stem: String = base.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|c| !avoid.contains(c))
        .unwrap()
}

/// Capture-avoiding `m[v := n]`.
pub fn substitute(m: &Term, v: &str, n: &Term) -> Term {
    subst(m, v, n, &n.free_vars())
}

fn subst(m: &Term, v: &str, n: &Term, fv_n: &HashSet<String>) -> Term {
    match m {
        Term::Var(x) if x == v => n.clone(),
        Term::Var(_) => m.clone(),
        Term::App(f, a) => app(subst(f, v, n, fv_n), subst(a, v, n, fv_n)),
        Term::Abs(x, _) if x == v => m.clone(),
        Term::Abs(x, b) => {
            if !b.free_vars().contains(v) {
                return m.clone();
            }
            if fv_n.contains(x) {
                let mut avoid = fv_n.clone();
                avoid.extend(b.free_vars());
                avoid.insert(v.to_string());
                let y = fresh(x, &avoid);
                let renamed = subst(b, x, &var(&y), &HashSet::from([y.clone()]));
                abs(&y, subst(&renamed, v, n, fv_n))
            } else {
                abs(x, subst(b, v, n, fv_n))
            }
        }
    }
}

/// Contracts the leftmost-outermost redex.
pub fn beta_step(t: &Term) -> Option<Term> {
    match t {
        Term::Var(_) => None,
        Term::Abs(x, b) => beta_step(b).map(|b2| abs(x, b2)),
        Term::App(f, a) => {
            if let Term::Abs(x, body) = &**f {
                return Some(substitute(body, x, a));
            }
            if let Some(f2) = beta_step(f) {
                return Some(Term::App(Arc::new(f2), a.clone()));
            }
            beta_step(a).map(|a2| Term::App(f.clone(), Arc::new(a2)))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReductionTrace {
    /// Starts with the input term.
    pub steps: Vec<Term>,
    pub exhausted: bool,
}

impl ReductionTrace {
    pub fn last(&self) -> &Term {
        self.steps.last().unwrap()
    }
}

pub fn normalize(t: &Term, fuel: u64) -> ReductionTrace {
    let mut steps = vec![t.clone()];
    for _ in 0..fuel {
        match beta_step(steps.last().unwrap()) {
            Some(next) => steps.push(next),
            None => return ReductionTrace { steps, exhausted: false },
        }
    }
    let exhausted = !steps.last().unwrap().is_normal();
    ReductionTrace { steps, exhausted }
}

/// Reduces to normal form without keeping the intermediate terms.
pub fn normal_form(t: &Term, fuel: u64) -> Option<Term> {
    let mut cur = t.clone();
    for _ in 0..fuel {
        match beta_step(&cur) {
            Some(next) => cur = next,
            None => return Some(cur),
        }
    }
    cur.is_normal().then_some(cur)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaEq {
    Equal,
    Unknown,
}

/// Runs leftmost reduction on both sides in lockstep and reports `Equal`
/// as soon as the two reduction sequences share a term up to renaming.
/// `fuel` bounds the total number of steps taken.
pub fn beta_eq(a: &Term, b: &Term, fuel: u64) -> BetaEq {
    let mut seen: [HashMap<Nameless, ()>; 2] = [HashMap::new(), HashMap::new()];
    let mut cur = [Some(a.clone()), Some(b.clone())];
    for side in 0..2 {
        let k = cur[side].as_ref().unwrap().key();
        if seen[1 - side].contains_key(&k) {
            return BetaEq::Equal;
        }
        seen[side].insert(k, ());
    }
    let mut spent = 0;
    while spent < fuel {
        let mut progressed = false;
        for side in 0..2 {
            let Some(t) = cur[side].take() else { continue };
            match beta_step(&t) {
                Some(next) => {
                    spent += 1;
                    progressed = true;
                    let k = next.key();
                    if seen[1 - side].contains_key(&k) {
                        return BetaEq::Equal;
                    }
                    seen[side].insert(k, ());
                    cur[side] = Some(next);
                }
                None => cur[side] = None,
            }
            if spent >= fuel {
                break;
            }
        }
        if !progressed {
            break;
        }
    }
    BetaEq::Unknown
}

/// `church(0) = \s o. o`, `church(n+1) = \s o. church(n) s (s o)`.
pub fn church(n: u64) -> Term {
    let mut t = abs_many(&["s", "o"], var("o"));
    for _ in 0..n {
        t = abs_many(
            &["s", "o"],
            apply(t, [var("s"), app(var("s"), var("o"))]),
        );
    }
    t
}

/// Reads a numeral in normal form `\s o. s (s (.. o))`.
pub fn unchurch(t: &Term) -> Option<u64> {
    let Term::Abs(s, inner) = t else { return None };
    let Term::Abs(o, body) = &**inner else { return None };
    if s == o {
        return None;
    }
    let mut n = 0;
    let mut cur: &Term = body;
    loop {
        match cur {
            Term::Var(x) if x == o => return Some(n),
            Term::App(f, a) if matches!(&**f, Term::Var(y) if y == s) => {
                n += 1;
                cur = a;
            }
            _ => return None,
        }
    }
}

/// `\n m s o. n s (m s o)`
pub fn plus_term() -> Term {
    abs_many(
        &["n", "m", "s", "o"],
        apply(var("n"), [var("s"), apply(var("m"), [var("s"), var("o")])]),
    )
}

/// `\n m s o. n (\c. m s c) o`
pub fn times_term() -> Term {
    abs_many(
        &["n", "m", "s", "o"],
        apply(
            var("n"),
            [abs("c", apply(var("m"), [var("s"), var("c")])), var("o")],
        ),
    )
}

/// `\x. x x`
pub fn omega_term() -> Term {
    abs("x", app(var("x"), var("x")))
}

/// `\x y z. x (y z)`
pub fn compose_term() -> Term {
    abs_many(&["x", "y", "z"], app(var("x"), app(var("y"), var("z"))))
}

/// `\x. (C x w) (C x w)`
pub fn y_term() -> Term {
    let cxw = apply(compose_term(), [var("x"), omega_term()]);
    abs("x", app(cxw.clone(), cxw))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

/// Grammar: variables `[a-z][0-9]*`, juxtaposition for application,
/// `\x y. body` (or `λ`) for abstraction, parentheses for grouping.
pub fn parse(src: &str) -> Result<Term, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let t = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    Lam,
    Dot,
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        i += 1;
        match c {
            c if c.is_whitespace() => {}
            '\\' | 'λ' => out.push((pos, Tok::Lam)),
            '.' => out.push((pos, Tok::Dot)),
            '(' => out.push((pos, Tok::Open)),
            ')' => out.push((pos, Tok::Close)),
            'a'..='z' => {
                let mut name = c.to_string();
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    name.push(chars[i].1);
                    i += 1;
                }
                out.push((pos, Tok::Var(name)));
            }
            _ => {
                return Err(ParseError { pos, msg: format!("unexpected character {c:?}") });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> ParseError {
        let pos = self.toks.get(self.pos).map(|t| t.0).unwrap_or(usize::MAX);
        ParseError { pos, msg: msg.to_string() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn expr(&mut self) -> Result<Term, ParseError> {
        let mut acc: Option<Term> = None;
        loop {
            let next = match self.peek() {
                Some(Tok::Lam) => {
                    let t = self.lambda()?;
                    acc = Some(match acc {
                        Some(f) => app(f, t),
                        None => t,
                    });
                    return Ok(acc.unwrap());
                }
                Some(Tok::Var(x)) => {
                    let t = var(x);
                    self.pos += 1;
                    t
                }
                Some(Tok::Open) => {
                    self.pos += 1;
                    let t = self.expr()?;
                    if self.peek() != Some(&Tok::Close) {
                        return Err(self.err("expected ')'"));
                    }
                    self.pos += 1;
                    t
                }
                _ => break,
            };
            acc = Some(match acc {
                Some(f) => app(f, next),
                None => next,
            });
        }
        acc.ok_or_else(|| self.err("expected a term"))
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        self.pos += 1;
        let mut binders = Vec::new();
        while let Some(Tok::Var(x)) = self.peek() {
            binders.push(x.clone());
            self.pos += 1;
        }
        if binders.is_empty() {
            return Err(self.err("expected a binder"));
        }
        if self.peek() != Some(&Tok::Dot) {
            return Err(self.err("expected '.'"));
        }
        self.pos += 1;
        let body = self.expr()?;
        Ok(binders.iter().rev().fold(body, |b, x| abs(x, b)))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Abs(..) => {
                let mut binders = Vec::new();
                let mut cur = self;
                while let Term::Abs(x, b) = cur {
                    binders.push(x.as_str());
                    cur = b;
                }
                write!(f, "\\{}. {}", binders.join(" "), cur)
            }
            Term::App(fun, arg) => {
                match &**fun {
                    Term::Abs(..) => write!(f, "({fun})")?,
                    _ => write!(f, "{fun}")?,
                }
                match &**arg {
                    Term::Var(x) => write!(f, " {x}"),
                    _ => write!(f, " ({arg})"),
                }
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_eq(&p("\\xy. y(xx)"), &p("\\yx. x(yy)")));
        assert!(!alpha_eq(&p("\\xy. y(xx)"), &p("\\yx. y(xx)")));
        let t = p("\\x. x (\\y. y x) z");
        assert!(alpha_eq(&t, &t));
    }

    #[test]
    fn substitution() {
        assert_eq!(substitute(&p("x y"), "x", &p("\\z. z")), p("(\\z. z) y"));
        assert_eq!(substitute(&p("\\x. x"), "x", &p("y")), p("\\x. x"));
        let r = substitute(&p("\\y. x"), "x", &p("y"));
        assert!(alpha_eq(&r, &p("\\w. y")));
        assert!(!alpha_eq(&r, &p("\\y. y")));
        assert_eq!(r, p("\\y1. y"));
    }

    #[test]
    fn steps() {
        assert_eq!(beta_step(&p("(\\x. x x)(\\z. z)")), Some(p("(\\z. z)(\\z. z)")));
        assert_eq!(beta_step(&p("\\s o. o")), None);
    }

    #[test]
    fn chain_first_step() {
        let t = p("(\\x. xx) ((\\xyz. x(yz)) x (\\x. xx))");
        let s = beta_step(&t).unwrap();
        assert!(alpha_eq(
            &s,
            &p("(\\xyz. x(yz)) x (\\x. xx) ((\\xyz. x(yz)) x (\\x. xx))")
        ));
    }

    #[test]
    fn normalization() {
        let tr = normalize(&church(3), 100);
        assert!(!tr.exhausted);
        assert!(alpha_eq(tr.last(), &p("\\s o. s(s(s o))")));
        assert_eq!(unchurch(tr.last()), Some(3));
        let omega = p("(\\x. x x)(\\x. x x)");
        assert!(normalize(&omega, 10).exhausted);
        let id = normalize(&p("(\\x. x)(\\x. x)"), 10);
        assert_eq!(id.steps.len(), 2);
        assert!(alpha_eq(id.last(), &p("\\x. x")));
    }

    #[test]
    fn church_shapes() {
        assert_eq!(church(0), p("\\s o. o"));
        assert_eq!(unchurch(&p("\\x. x")), None);
        assert_eq!(unchurch(&church(0)), Some(0));
    }

    #[test]
    fn arithmetic_samples() {
        let two = church(2);
        let three = church(3);
        let plus = apply(plus_term(), [two.clone(), three.clone()]);
        assert_eq!(beta_eq(&plus, &church(5), 100_000), BetaEq::Equal);
        let times = apply(times_term(), [two, three]);
        assert_eq!(beta_eq(&times, &church(6), 100_000), BetaEq::Equal);
        let zero_times = apply(times_term(), [church(0), church(4)]);
        assert_eq!(beta_eq(&zero_times, &church(0), 1000), BetaEq::Equal);
    }

    #[test]
    fn distinct_numerals_never_equal() {
        for n in 0..=8 {
            for m in 0..=8 {
                if n != m {
                    assert_eq!(beta_eq(&church(n), &church(m), 10_000), BetaEq::Unknown);
                }
            }
        }
    }

    #[test]
    fn y_constant() {
        let a = p("\\x. c");
        let ya = app(y_term(), a.clone());
        assert_eq!(beta_eq(&ya, &app(a, ya.clone()), 100), BetaEq::Equal);
    }

    #[test]
    fn print_parse_roundtrip() {
        for t in [y_term(), plus_term(), times_term(), church(4), p("a (b c) (\\x. x) d")] {
            assert_eq!(parse(&t.to_string()).unwrap(), t);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(parse("\\. x").is_err());
        assert!(parse("(x").is_err());
        assert!(parse("X").is_err());
        assert!(parse("").is_err());
    }
}

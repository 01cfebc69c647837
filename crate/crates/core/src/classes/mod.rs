//! Effective-undecidability notions as executable witnesses.
//!
//! Witnesses are indices of total programs. Set-valued witnesses return list
//! codes; some also carry a native evaluator, because their values are finite
//! sets far too large to list (a block of a huge index, for example).

use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::coding::{block_of, block_start, list_decode, list_encode, Nat};
use crate::ips::dsl::{ap, cond, n, pair, v, Expr, Func};
use crate::ips::{call, tag, ce_comp, ce_const, comp, encode, eval, lit, lit_code, omega_index, proj, Ast, CodeExpr};
use crate::re_sets::{dom_to_image, k_mem, w_mem};

mod creative;
mod dweu;
mod reductions;
mod simple;
mod wtt;

pub use creative::*;
pub use dweu::*;
pub use reductions::*;
pub use simple::*;
pub use wtt::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    Creative,
    Quasicreative,
    WeaklyQuasicreative,
    Weu,
    DWeu,
    DSeu,
    MReduction,
    /// d-reduction, with the size bound for n-d reductions.
    DReduction(Option<u64>),
    EffSimpleBound,
    StrongArray,
    Retrace,
}

impl WitnessKind {
    pub fn set_valued(self) -> bool {
        matches!(
            self,
            WitnessKind::Quasicreative
                | WitnessKind::WeaklyQuasicreative
                | WitnessKind::DWeu
                | WitnessKind::DSeu
                | WitnessKind::DReduction(_)
                | WitnessKind::StrongArray
        )
    }
}

/// One piece of a finite set: a single element or a whole block `block(e)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Part {
    Elem(Nat),
    Block(Nat),
    /// `{0, 1, ..., n}`.
    Below(Nat),
}

/// A finite set of naturals described by parts. Parts may overlap only when
/// they are equal or when an element lies in a listed block.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SetValue {
    pub parts: Vec<Part>,
}

/// Blocks of indices above this many bits are compared symbolically only.
const CONCRETE_BITS: u64 = 4096;

fn small_block_of(x: &Nat) -> Option<Nat> {
    let v = x.to_u64()?;
    Some(Nat::from(block_of(v)))
}

const SUCC_WALK: usize = 64;

fn concrete(x: &Nat) -> Option<num_bigint::BigUint> {
    (x.bits_hint() <= CONCRETE_BITS).then(|| x.to_biguint())
}

/// `x ≤ n` for lazily stored values, found by stepping `x` towards `n`.
/// Gaps wider than [`SUCC_WALK`] are reported as `false`.
fn within_succs(x: &Nat, n: &Nat) -> bool {
    let mut y = x.clone();
    for _ in 0..=SUCC_WALK {
        if &y == n {
            return true;
        }
        y = y.succ();
    }
    false
}

fn block_start_big(e: &num_bigint::BigUint) -> num_bigint::BigUint {
    e * (e + 3u32) / 2u32
}

impl SetValue {
    pub fn empty() -> SetValue {
        SetValue::default()
    }

    pub fn elems(xs: impl IntoIterator<Item = Nat>) -> SetValue {
        SetValue { parts: xs.into_iter().map(Part::Elem).collect() }
    }

    pub fn block(e: Nat) -> SetValue {
        SetValue { parts: vec![Part::Block(e)] }
    }

    pub fn below(n: Nat) -> SetValue {
        SetValue { parts: vec![Part::Below(n)] }
    }

    pub fn from_list_code(code: &Nat) -> Option<SetValue> {
        list_decode(code).ok().map(SetValue::elems)
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Explicit members when the set has at most `limit` of them.
    pub fn members(&self, limit: u64) -> Option<Vec<Nat>> {
        let mut out: Vec<Nat> = Vec::new();
        for p in &self.parts {
            match p {
                Part::Elem(x) => out.push(x.clone()),
                Part::Block(e) => {
                    let e = e.to_u64()?;
                    if e + 2 > limit {
                        return None;
                    }
                    let b = block_start(e);
                    out.extend((b..b + e + 2).map(Nat::from));
                }
                Part::Below(n) => {
                    let n = n.to_u64()?;
                    if n >= limit {
                        return None;
                    }
                    out.extend((0..=n).map(Nat::from));
                }
            }
            if out.len() as u64 > limit {
                return None;
            }
        }
        let mut uniq: Vec<Nat> = Vec::new();
        for x in out {
            if !uniq.contains(&x) {
                uniq.push(x);
            }
        }
        Some(uniq)
    }

    pub fn contains(&self, x: &Nat) -> bool {
        self.parts.iter().any(|p| match p {
            Part::Elem(y) => y == x,
            Part::Block(e) => match small_block_of(x) {
                Some(b) => &b == e,
                None => match (concrete(x), concrete(e)) {
                    (Some(x), Some(e)) => {
                        let start = block_start_big(&e);
                        x >= start && x <= &start + &e + 1u32
                    }
                    _ => false,
                },
            },
            Part::Below(n) => match (concrete(x), concrete(n)) {
                (Some(x), Some(n)) => x <= n,
                _ => within_succs(x, n),
            },
        })
    }

    fn part_meets(a: &Part, b: &Part) -> bool {
        match (a, b) {
            (Part::Elem(x), Part::Elem(y)) => x == y,
            (Part::Block(e), Part::Block(f)) => e == f,
            (Part::Elem(x), p) | (p, Part::Elem(x)) => SetValue { parts: vec![p.clone()] }.contains(x),
            (Part::Below(_), Part::Below(_)) => true,
            // conservative when the block is too large to place
            (Part::Block(e), Part::Below(n)) | (Part::Below(n), Part::Block(e)) => match (concrete(e), concrete(n)) {
                (Some(e), Some(n)) => block_start_big(&e) <= n,
                _ => true,
            },
        }
    }

    pub fn meets(&self, other: &SetValue) -> bool {
        self.parts.iter().any(|a| other.parts.iter().any(|b| SetValue::part_meets(a, b)))
    }

    pub fn union(&self, other: &SetValue) -> SetValue {
        let mut parts = self.parts.clone();
        for p in &other.parts {
            if !parts.contains(p) {
                parts.push(p.clone());
            }
        }
        SetValue { parts }
    }

    /// Removes every part that meets `other`.
    pub fn minus(&self, other: &SetValue) -> SetValue {
        let parts = self
            .parts
            .iter()
            .filter(|p| !other.parts.iter().any(|q| SetValue::part_meets(p, q)))
            .cloned()
            .collect();
        SetValue { parts }
    }

    /// Whether some member exceeds `n`.
    pub fn exceeds(&self, n: u64) -> bool {
        self.parts.iter().any(|p| match p {
            Part::Elem(x) | Part::Below(x) => x.to_u64().is_none_or(|x| x > n),
            Part::Block(e) => e.to_u64().is_none_or(|e| block_start(e) + e + 1 > n),
        })
    }

    /// List code of the parts, each coded as `pair(0, x)`, `pair(1, e)` or `pair(2, n)`.
    pub fn parts_code(&self) -> Nat {
        let items: Vec<Nat> = self
            .parts
            .iter()
            .map(|p| match p {
                Part::Elem(x) => Nat::pair(&Nat::zero(), x),
                Part::Block(e) => Nat::pair(&Nat::from(1u64), e),
                Part::Below(n) => Nat::pair(&Nat::from(2u64), n),
            })
            .collect();
        list_encode(&items)
    }
}

impl fmt::Display for SetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match p {
                Part::Elem(x) => write!(f, "{x}")?,
                Part::Block(e) => write!(f, "block({e})")?,
                Part::Below(n) => write!(f, "0..={n}")?,
            }
        }
        write!(f, "}}")
    }
}

/// Native evaluator for a set-valued witness.
pub type NativeSet = Arc<dyn Fn(&Nat) -> SetValue + Send + Sync>;

#[derive(Clone)]
pub struct Witness {
    pub kind: WitnessKind,
    pub body: Nat,
    pub native: Option<NativeSet>,
}

impl fmt::Debug for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Witness")
            .field("kind", &self.kind)
            .field("body", &self.body)
            .field("native", &self.native.is_some())
            .finish()
    }
}

impl Witness {
    pub fn new(kind: WitnessKind, body: Nat) -> Witness {
        Witness { kind, body, native: None }
    }

    pub fn apply(&self, e: &Nat, fuel: u64) -> Option<Nat> {
        eval(&self.body, &[e.clone()], None, fuel).value().cloned()
    }

    pub fn apply_set(&self, e: &Nat, fuel: u64) -> Option<SetValue> {
        if let Some(f) = &self.native {
            return Some(f(e));
        }
        SetValue::from_list_code(&self.apply(e, fuel)?)
    }
}

impl Witness {
    /// `e ↦ f(c(e))`, keeping a native evaluator of `f` in front of `c`.
    pub fn after(kind: WitnessKind, f: &Witness, c: CodeExpr) -> Witness {
        let native = f.native.clone().map(|g| {
            let c = c.clone();
            Arc::new(move |e: &Nat| g(&c.eval(std::slice::from_ref(e)))) as NativeSet
        });
        Witness { kind, body: after(&f.body, &c), native }
    }
}

/// Index of `e ↦ phi_f(c(e))` where `c` builds a code from `e`.
pub fn after(f: &Nat, c: &CodeExpr) -> Nat {
    encode(&comp(Ast::Univ, vec![Ast::Const(f.clone()), c.program(1)]))
}

/// Index of `phi_f ∘ phi_g`.
pub fn compose(f: &Nat, g: &Nat) -> Nat {
    encode(&comp(Ast::Univ, vec![Ast::Const(f.clone()), call(g, vec![proj(1, 1)])]))
}

/// Code expression for `smn(p, [args...], 1)` where the frozen values are code expressions.
pub fn ce_smn1(p: &Nat, frozen: Vec<CodeExpr>) -> CodeExpr {
    let mut gs: Vec<CodeExpr> = frozen.into_iter().map(ce_const).collect();
    gs.push(lit_code(&proj(1, 1)));
    ce_comp(lit(p.clone()), gs)
}

/// DSL expression for the code of `smn(p, frozen, 1)`.
pub(crate) fn dsl_smn1(p: &Nat, frozen: Vec<Expr>) -> Expr {
    let mut gs: Vec<Expr> = frozen.into_iter().map(|c| pair(n(tag::CONST), c)).collect();
    gs.push(n(encode(&proj(1, 1))));
    let len = gs.len() as u64;
    let list = gs.into_iter().rev().fold(n(0u64), |acc, g| pair(g, acc));
    pair(n(tag::COMP), pair(n(p.clone()), pair(n(len), list)))
}

/// `(c, y) ↦ 0` when `y` is listed in the list code `c`, diverging otherwise.
pub fn list_member_index() -> Nat {
    use crate::ips::dsl::{if_, is_eq, left, ne, not, right, set, while_};
    // vars: 0 c, 1 y, 2 rest, 3 remaining, 4 found
    Func {
        args: 2,
        vars: 5,
        body: vec![
            set(2, right(v(0))),
            set(3, left(v(0))),
            while_(
                cond(v(4), ne(v(3), n(0u64)), n(0u64)),
                vec![if_(
                    is_eq(left(v(2)), v(1)),
                    vec![set(4, n(1u64))],
                    vec![set(2, right(v(2))), set(3, ap(crate::ips::pred(), vec![v(3)]))],
                )],
            ),
            if_(not(v(4)), vec![while_(n(1u64), vec![])], vec![]),
        ],
        result: n(0u64),
    }
    .index()
}

type MemberFn = Arc<dyn Fn(&Nat, u64) -> bool + Send + Sync>;

/// Stage-bounded access to an r.e. set, optionally with an enumeration
/// without repetitions.
#[derive(Clone)]
pub struct SetHandle {
    pub name: String,
    member: MemberFn,
    /// `alpha` with `A = W_alpha`, when known.
    pub windex: Option<Nat>,
    enumeration: Option<Arc<Enumeration>>,
}

impl fmt::Debug for SetHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetHandle({})", self.name)
    }
}

impl SetHandle {
    pub fn new(name: &str, member: impl Fn(&Nat, u64) -> bool + Send + Sync + 'static) -> SetHandle {
        SetHandle { name: name.to_string(), member: Arc::new(member), windex: None, enumeration: None }
    }

    pub fn k() -> SetHandle {
        let mut h = SetHandle::new("K", k_mem);
        h.windex = Some(omega_index());
        h.enumeration = Some(Arc::new(Enumeration::image_of(dom_to_image(&omega_index()))));
        h
    }

    pub fn windex(name: &str, alpha: Nat) -> SetHandle {
        let a = alpha.clone();
        let mut h = SetHandle::new(name, move |x, s| w_mem(&a, x, s));
        h.windex = Some(alpha.clone());
        h.enumeration = Some(Arc::new(Enumeration::image_of(dom_to_image(&alpha))));
        h
    }

    /// A set given by stage approximations of small members.
    pub fn stages(name: &str, f: impl Fn(u64) -> crate::coding::FinSet + Send + Sync + 'static) -> SetHandle {
        SetHandle::new(name, move |x, s| x.to_u64().is_some_and(|x| f(s).contains(x)))
    }

    /// A handle with an explicit enumeration `a`, membership read off its values.
    pub fn enumerated(name: &str, a: impl Fn(u64) -> Option<u64> + Send + Sync + 'static) -> SetHandle {
        let en = Arc::new(Enumeration::native(a));
        let en2 = en.clone();
        let mut h = SetHandle::new(name, move |x, s| {
            x.to_u64().is_some_and(|x| (0..s).any(|i| en2.get(i) == Some(x)))
        });
        h.enumeration = Some(en);
        h
    }

    pub fn contains(&self, x: &Nat, s: u64) -> bool {
        (self.member)(x, s)
    }

    /// `a(i)`, the `i`-th element of the enumeration.
    pub fn enumerate(&self, i: u64) -> Option<u64> {
        self.enumeration.as_ref()?.get(i)
    }

    pub fn has_enumeration(&self) -> bool {
        self.enumeration.is_some()
    }
}

/// Enumeration without repetitions, memoised.
pub struct Enumeration {
    source: EnumSource,
    seen: Mutex<EnumState>,
}

enum EnumSource {
    /// Dovetailed listing of the image of a program, first appearance order.
    Image(Nat),
    Native(Box<dyn Fn(u64) -> Option<u64> + Send + Sync>),
}

#[derive(Default)]
struct EnumState {
    values: Vec<u64>,
    stage: u64,
}

/// Stages beyond this are not explored by [`Enumeration::get`].
const ENUM_STAGE_CAP: u64 = 4096;

impl Enumeration {
    pub fn image_of(e: Nat) -> Enumeration {
        Enumeration { source: EnumSource::Image(e), seen: Mutex::new(EnumState::default()) }
    }

    pub fn native(f: impl Fn(u64) -> Option<u64> + Send + Sync + 'static) -> Enumeration {
        Enumeration { source: EnumSource::Native(Box::new(f)), seen: Mutex::new(EnumState::default()) }
    }

    pub fn get(&self, i: u64) -> Option<u64> {
        match &self.source {
            EnumSource::Native(f) => f(i),
            EnumSource::Image(e) => {
                let mut st = self.seen.lock().unwrap();
                while st.values.len() as u64 <= i && st.stage < ENUM_STAGE_CAP {
                    st.stage += 1;
                    let s = st.stage;
                    // same order as image_to_enum: stage-major, then argument
                    for m in 0..=s {
                        if let Some(v) = eval(e, &[Nat::from(m)], None, s).value().and_then(Nat::to_u64) {
                            if !st.values.contains(&v) {
                                st.values.push(v);
                            }
                        }
                    }
                }
                st.values.get(i as usize).copied()
            }
        }
    }
}

/// Verdict of one contract instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The hypothesis could not be confirmed or refuted within the bounds.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractReport {
    pub contract: String,
    pub instance: String,
    pub stage: u64,
    pub verdict: Verdict,
}

impl ContractReport {
    pub fn new(contract: &str, instance: impl Into<String>, stage: u64, verdict: Verdict) -> ContractReport {
        ContractReport { contract: contract.to_string(), instance: instance.into(), stage, verdict }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassError {
    #[error("enumeration repeats value {value} at positions {first} and {second}")]
    BadEnumeration { value: u64, first: u64, second: u64 },
    #[error("enumeration undefined at {0}")]
    EnumerationUndefined(u64),
    #[error("bad arguments: {0}")]
    BadArguments(String),
    #[error("out of fuel")]
    OutOfFuel,
}

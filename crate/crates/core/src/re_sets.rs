//! Recursively enumerable sets through their finite stage approximations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::coding::{FinSet, Nat};
use crate::ips::dsl::{
    add, clock, cond, is_eq, left, n, ne, not, pair, right, set, succ, univ, v, while_, if_, Func,
};
use crate::ips::{call, cnst, comp, encode, eval, mu, prog_case_table, proj, smn, Ast};

/// `x ∈ W_{e,s}`: `phi_e(x)` converges within `s` steps.
pub fn w_mem(e: &Nat, x: &Nat, s: u64) -> bool {
    eval(e, &[x.clone()], None, s).converged()
}

/// `e ∈ K_s`.
pub fn k_mem(e: &Nat, s: u64) -> bool {
    w_mem(e, e, s)
}

/// The finite set `W_{e,s}`, listing members below `s`.
pub fn w_stage(e: &Nat, s: u64) -> FinSet {
    FinSet::from_iter((0..s).filter(|&x| w_mem(e, &Nat::from(x), s)))
}

/// The finite set `K_s`, listing indices below `s`.
pub fn k_stage(s: u64) -> FinSet {
    FinSet::from_iter((0..s).filter(|&e| k_mem(&Nat::from(e), s)))
}

/// Values `phi_{e,s}(m)` for `m < s`. Values beyond `u64` are skipped.
pub fn image_stage(e: &Nat, s: u64) -> FinSet {
    FinSet::from_iter((0..s).filter_map(|m| {
        eval(e, &[Nat::from(m)], None, s).value().and_then(Nat::to_u64)
    }))
}

pub type StageFn = Arc<dyn Fn(u64) -> FinSet + Send + Sync>;

#[derive(Clone)]
pub enum Generator {
    Domain(Nat),
    Image(Nat),
    Diagonal,
    Construction(StageFn),
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Domain(e) => write!(f, "Domain({e})"),
            Generator::Image(e) => write!(f, "Image({e})"),
            Generator::Diagonal => write!(f, "Diagonal"),
            Generator::Construction(_) => write!(f, "Construction"),
        }
    }
}

/// Stage-indexed approximation of an r.e. set with a memo of computed stages.
#[derive(Debug)]
pub struct StageSet {
    generator: Generator,
    cache: Mutex<BTreeMap<u64, FinSet>>,
}

impl StageSet {
    pub fn new(generator: Generator) -> StageSet {
        StageSet { generator, cache: Mutex::new(BTreeMap::new()) }
    }

    pub fn domain(e: &Nat) -> StageSet {
        StageSet::new(Generator::Domain(e.clone()))
    }

    pub fn image(e: &Nat) -> StageSet {
        StageSet::new(Generator::Image(e.clone()))
    }

    pub fn diagonal() -> StageSet {
        StageSet::new(Generator::Diagonal)
    }

    pub fn construction(f: impl Fn(u64) -> FinSet + Send + Sync + 'static) -> StageSet {
        StageSet::new(Generator::Construction(Arc::new(f)))
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// Computes stage `s` without touching the cache.
    pub fn recompute(&self, s: u64) -> FinSet {
        match &self.generator {
            Generator::Domain(e) => w_stage(e, s),
            Generator::Image(e) => image_stage(e, s),
            Generator::Diagonal => k_stage(s),
            Generator::Construction(f) => f(s),
        }
    }

    pub fn at(&self, s: u64) -> FinSet {
        if let Some(hit) = self.cache.lock().unwrap().get(&s) {
            return hit.clone();
        }
        let set = self.recompute(s);
        self.cache.lock().unwrap().insert(s, set.clone());
        set
    }

    pub fn contains(&self, x: u64, s: u64) -> bool {
        self.at(s).contains(x)
    }

    /// First stage pair `(s, s+1)` in `0..max` where the approximation shrinks.
    pub fn first_non_monotone(&self, max: u64) -> Option<(u64, u64)> {
        let mut prev = self.at(0);
        for s in 1..=max {
            let cur = self.at(s);
            if !prev.is_subset(&cur) {
                return Some((s - 1, s));
            }
            prev = cur;
        }
        None
    }
}

/// 1 ⇒ 2: a program whose image is `W_e`, namely `x ↦ x` when `phi_e(x)` converges.
pub fn dom_to_image(e: &Nat) -> Nat {
    encode(&comp(proj(2, 1), vec![proj(1, 1), call(e, vec![proj(1, 1)])]))
}

/// 2 ⇒ 3: the dovetailed enumeration of the image of `phi_e` without repetitions.
pub fn image_to_enum(e: &Nat) -> Nat {
    image_to_enum_func(e).index()
}

fn image_to_enum_func(e: &Nat) -> Func {
    // 0 n, 1 A, 2 #A, 3 s, 4 m, 5 done, 6 result, 7 value, 8 cursor, 9 found
    let e = || n(e.clone());
    let membership = vec![
        set(9, n(0u64)),
        set(8, v(1)),
        while_(
            cond(v(9), right(v(8)), n(0u64)),
            vec![
                if_(is_eq(left(left(v(8))), v(7)), vec![set(9, n(1u64))], vec![]),
                set(8, right(left(v(8)))),
            ],
        ),
    ];
    let mut visit = vec![set(7, univ(e(), vec![v(4)]))];
    visit.extend(membership);
    visit.push(if_(
        not(v(9)),
        vec![
            set(1, pair(pair(v(7), v(1)), n(1u64))),
            set(2, succ(v(2))),
            if_(is_eq(v(2), succ(v(0))), vec![set(5, n(1u64)), set(6, v(7))], vec![]),
        ],
        vec![],
    ));
    Func {
        args: 1,
        vars: 10,
        body: vec![while_(
            not(v(5)),
            vec![
                set(4, n(0u64)),
                while_(
                    cond(v(5), ne(v(4), succ(v(3))), n(0u64)),
                    vec![
                        if_(clock(e(), v(3), vec![v(4)]), visit, vec![]),
                        set(4, succ(v(4))),
                    ],
                ),
                set(3, succ(v(3))),
            ],
        )],
        result: v(6),
    }
}

/// 3 ⇒ 1: `n ↦ μt[phi_e(t) = n]`, whose domain is the enumerated set.
pub fn enum_to_dom(e: &Nat) -> Nat {
    encode(&mu(comp(Ast::Eq, vec![call(e, vec![proj(2, 1)]), proj(2, 2)])))
}

/// Three-argument program `(e1, e2, x)` behind [`post_combiner`].
pub fn post_combiner_program() -> Nat {
    // 0 e1, 1 e2, 2 x, 3 s, 4 done, 5 result
    Func {
        args: 3,
        vars: 6,
        body: vec![while_(
            not(v(4)),
            vec![if_(
                clock(v(0), v(3), vec![v(2)]),
                vec![set(4, n(1u64)), set(5, n(1u64))],
                vec![if_(
                    clock(v(1), v(3), vec![v(2)]),
                    vec![set(4, n(1u64))],
                    vec![set(3, succ(add(v(3), v(3))))],
                )],
            )],
        )],
        result: v(5),
    }
    .index()
}

/// Program deciding `x` between two disjoint r.e. sets: 1 on `W_e1`, 0 on `W_e2`.
/// Stages `0, 1, 3, 7, …` are tried in turn and `W_e1` is checked first at each.
pub fn post_combiner(e1: &Nat, e2: &Nat) -> Nat {
    smn(&post_combiner_program(), &[e1.clone(), e2.clone()], 1)
}

/// An index `w` with `W_w = d`.
pub fn finset_to_windex(d: &FinSet) -> Nat {
    let elems: Vec<Nat> = d.iter().map(Nat::from).collect();
    finite_windex(&elems)
}

/// [`finset_to_windex`] for arbitrary naturals.
pub fn finite_windex(elems: &[Nat]) -> Nat {
    let table: Vec<(Nat, Nat)> = elems.iter().map(|x| (x.clone(), Nat::zero())).collect();
    prog_case_table(&table)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    All,
    Empty,
    Finite(FinSet),
    Evens,
    Odds,
    /// `x = pair(a, 0)`.
    Triangular,
    NonTriangular,
}

impl Domain {
    pub fn contains(&self, x: u64) -> bool {
        match self {
            Domain::All => true,
            Domain::Empty => false,
            Domain::Finite(d) => d.contains(x),
            Domain::Evens => x % 2 == 0,
            Domain::Odds => x % 2 == 1,
            Domain::Triangular => crate::coding::unpair_u64(x).1 == 0,
            Domain::NonTriangular => crate::coding::unpair_u64(x).1 != 0,
        }
    }

    pub fn disjoint(&self, other: &Domain) -> bool {
        use Domain::*;
        match (self, other) {
            (Empty, _) | (_, Empty) => true,
            (Evens, Odds) | (Odds, Evens) => true,
            (Triangular, NonTriangular) | (NonTriangular, Triangular) => true,
            (Finite(a), Finite(b)) => a.is_disjoint(b),
            (Finite(a), d) | (d, Finite(a)) => a.iter().all(|x| !d.contains(x)),
            _ => false,
        }
    }
}

/// What is known about a corpus program by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Behavior {
    /// Halts on its own index within a modest number of steps.
    HaltsOnSelf,
    DivergesOnSelf,
    /// Total, but possibly slow on large arguments such as its own index.
    Total,
    /// Total and injective with the given first values.
    Enumerates(Vec<u64>),
    /// Domain known, self-application not classified.
    Partial,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub index: Nat,
    pub arity: u64,
    /// Domain of the unary function `phi_index`.
    pub domain: Domain,
    pub behavior: Behavior,
}

impl CorpusEntry {
    pub fn halts_on_self(&self) -> Option<bool> {
        match self.behavior {
            Behavior::HaltsOnSelf | Behavior::Total | Behavior::Enumerates(_) => Some(true),
            Behavior::DivergesOnSelf => Some(false),
            Behavior::Partial => None,
        }
    }
}

fn table(pairs: &[(u64, u64)]) -> Nat {
    let t: Vec<(Nat, Nat)> = pairs.iter().map(|&(a, b)| (Nat::from(a), Nat::from(b))).collect();
    prog_case_table(&t)
}

/// Converges on `x` iff `x + 2k = target` for some `k`, walking up from `start`.
fn parity_walk(start: u64) -> Nat {
    let g = comp(Ast::Eq, vec![proj(2, 1), proj(2, 2)]);
    let h = comp(Ast::Succ, vec![comp(Ast::Succ, vec![proj(2, 1)])]);
    let w = Ast::While(Box::new(g), Box::new(h));
    encode(&comp(w, vec![cnst(start), proj(1, 1)]))
}

fn triangle_guard(on_zero: bool) -> Nat {
    let r = comp(Ast::Right, vec![proj(2, 2)]);
    let g = if on_zero { r } else { comp(Ast::Cond, vec![r, cnst(1u64), cnst(0u64)]) };
    encode(&mu(g))
}

fn on_self(index: &Nat, d: &Domain) -> Behavior {
    let member = match index.to_u64() {
        Some(x) => d.contains(x),
        None => match d {
            Domain::Triangular => index.unpair().1.is_zero(),
            Domain::NonTriangular => !index.unpair().1.is_zero(),
            Domain::Finite(_) | Domain::Empty => false,
            _ => return Behavior::Partial,
        },
    };
    if member {
        Behavior::HaltsOnSelf
    } else {
        Behavior::DivergesOnSelf
    }
}

/// Programs with known behaviour, used as ground truth throughout the tests.
pub fn corpus() -> Vec<CorpusEntry> {
    let entry = |name, p: Ast, arity, domain, behavior| CorpusEntry {
        name,
        index: encode(&p),
        arity,
        domain,
        behavior,
    };
    let double = comp(crate::ips::add(), vec![proj(1, 1), proj(1, 1)]);
    let square = comp(crate::ips::mul(), vec![proj(1, 1), proj(1, 1)]);
    let mut out = vec![
        entry("zero", Ast::Zero, 1, Domain::All, Behavior::HaltsOnSelf),
        entry("succ", Ast::Succ, 1, Domain::All, Behavior::HaltsOnSelf),
        entry("identity", crate::ips::identity(), 1, Domain::All, Behavior::HaltsOnSelf),
        entry("second", proj(2, 2), 2, Domain::All, Behavior::HaltsOnSelf),
        entry("const7", crate::ips::cnst(7u64), 1, Domain::All, Behavior::HaltsOnSelf),
        entry("pairing", Ast::Pair, 2, Domain::All, Behavior::HaltsOnSelf),
        entry("left", Ast::Left, 1, Domain::All, Behavior::HaltsOnSelf),
        entry("neq", Ast::Eq, 2, Domain::All, Behavior::HaltsOnSelf),
        entry("add", crate::ips::add(), 2, Domain::All, Behavior::Total),
        entry("mul", crate::ips::mul(), 2, Domain::All, Behavior::Total),
        entry("pred", crate::ips::pred(), 1, Domain::All, Behavior::Total),
        entry("double", double, 1, Domain::All, Behavior::Enumerates(vec![0, 2, 4, 6, 8])),
        entry("square", square, 1, Domain::All, Behavior::Enumerates(vec![0, 1, 4, 9, 16])),
        entry("divergent", crate::ips::divergent(), 1, Domain::Empty, Behavior::DivergesOnSelf),
    ];
    let mut add_index = |name, index: Nat, domain: Domain| {
        let behavior = on_self(&index, &domain);
        out.push(CorpusEntry { name, index, arity: 1, domain, behavior });
    };
    add_index("evens", parity_walk(0), Domain::Evens);
    add_index("odds", parity_walk(1), Domain::Odds);
    add_index("triangular", triangle_guard(true), Domain::Triangular);
    add_index("non_triangular", triangle_guard(false), Domain::NonTriangular);
    add_index("table_1_5", table(&[(1, 0), (5, 0)]), Domain::Finite(FinSet::from_iter([1, 5])));
    add_index(
        "guard5",
        crate::ips::prog_guard_eq(&encode(&crate::ips::identity()), &Nat::from(5u64)),
        Domain::Finite(FinSet::from_iter([5])),
    );
    add_index("below3", table(&[(0, 0), (1, 1), (2, 2)]), Domain::Finite(FinSet::from_iter([0, 1, 2])));
    add_index(
        "table_img",
        table(&[(0, 3), (1, 8), (2, 3), (3, 5)]),
        Domain::Finite(FinSet::from_iter([0, 1, 2, 3])),
    );
    out
}

pub fn corpus_entry(name: &str) -> CorpusEntry {
    corpus()
        .into_iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no corpus entry {name}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ips::{run, Outcome};

    fn num(x: u64) -> Nat {
        Nat::from(x)
    }

    #[test]
    fn corpus_domains_hold() {
        for c in corpus() {
            for x in 0..12u64 {
                let conv = w_mem(&c.index, &num(x), 200_000);
                assert_eq!(conv, c.domain.contains(x), "{} at {x}", c.name);
            }
        }
    }

    #[test]
    fn self_application() {
        for c in corpus() {
            match c.behavior {
                Behavior::HaltsOnSelf => assert!(k_mem(&c.index, 100_000), "{}", c.name),
                Behavior::DivergesOnSelf => assert!(!k_mem(&c.index, 100_000), "{}", c.name),
                _ => {}
            }
        }
    }

    #[test]
    fn enumerations_start_right() {
        for c in corpus() {
            if let Behavior::Enumerates(prefix) = &c.behavior {
                for (i, &y) in prefix.iter().enumerate() {
                    assert_eq!(run(&c.index, &[i as u64], 100_000).value(), Some(&num(y)));
                }
            }
        }
    }

    #[test]
    fn w_membership_examples() {
        let id = encode(&crate::ips::identity());
        assert!(w_mem(&id, &num(40), 10));
        let div = encode(&crate::ips::divergent());
        assert!((0..50).all(|s| !w_mem(&div, &num(3), s)));
        let t = table(&[(2, 0)]);
        assert!(w_mem(&t, &num(2), 1000));
        assert!(!w_mem(&t, &num(3), 100_000));
    }

    #[test]
    fn k_stage_monotone() {
        let k = StageSet::diagonal();
        assert_eq!(k.first_non_monotone(60), None);
        assert!(k.contains(0, 5));
    }

    #[test]
    fn domain_stages_monotone() {
        for c in corpus() {
            assert_eq!(StageSet::domain(&c.index).first_non_monotone(120), None, "{}", c.name);
            assert_eq!(StageSet::image(&c.index).first_non_monotone(60), None, "{}", c.name);
        }
    }

    #[test]
    fn dom_to_image_agrees() {
        for name in ["evens", "table_1_5", "triangular"] {
            let c = corpus_entry(name);
            let img = dom_to_image(&c.index);
            for x in 0..20u64 {
                let out = run(&img, &[x], 10_000);
                if c.domain.contains(x) {
                    assert_eq!(out.value(), Some(&num(x)));
                } else {
                    assert_eq!(out, Outcome::OutOfFuel);
                }
            }
        }
    }

    #[test]
    fn enumeration_of_finite_images() {
        for (name, image) in [("const7", vec![7]), ("table_img", vec![3, 5, 8]), ("below3", vec![0, 1, 2])] {
            let e = image_to_enum(&corpus_entry(name).index);
            let mut seen = Vec::new();
            for k in 0..image.len() as u64 {
                seen.push(run(&e, &[k], 1_000_000).value().and_then(Nat::to_u64).unwrap());
            }
            seen.sort();
            assert_eq!(seen, image, "{name}");
            assert_eq!(run(&e, &[image.len() as u64], 200_000), Outcome::OutOfFuel);
        }
    }

    #[test]
    fn enumeration_order_follows_dovetail() {
        // table_img: 0->3 1->8 2->3 3->5, so 3, 8, 5
        let e = image_to_enum(&corpus_entry("table_img").index);
        let got: Vec<u64> = (0..3).map(|k| run(&e, &[k], 1_000_000).value().unwrap().to_u64().unwrap()).collect();
        assert_eq!(got, vec![3, 8, 5]);
    }

    #[test]
    fn round_trip_preserves_membership() {
        for name in ["table_1_5", "below3", "guard5"] {
            let c = corpus_entry(name);
            let back = enum_to_dom(&image_to_enum(&dom_to_image(&c.index)));
            for x in 0..8u64 {
                let fuel = if c.domain.contains(x) { 2_000_000 } else { 100_000 };
                let conv = run(&back, &[x], fuel).converged();
                assert_eq!(conv, c.domain.contains(x), "{name} at {x}");
            }
        }
    }

    #[test]
    fn combiner_decides_triangles() {
        let a = corpus_entry("triangular").index;
        let b = corpus_entry("non_triangular").index;
        let p = post_combiner(&a, &b);
        for x in 0..=100u64 {
            let want = Domain::Triangular.contains(x) as u64;
            assert_eq!(run(&p, &[x], 100_000).value(), Some(&num(want)), "{x}");
        }
    }

    #[test]
    fn combiner_diverges_outside_union() {
        let p = post_combiner(&corpus_entry("table_1_5").index, &corpus_entry("guard5").index);
        assert_eq!(run(&p, &[3], 100_000), Outcome::OutOfFuel);
        assert_eq!(run(&p, &[1], 100_000).value(), Some(&num(1)));
    }

    #[test]
    fn finite_windex_exact() {
        let w = finset_to_windex(&FinSet::from_iter([1, 5]));
        assert_eq!(w_stage(&w, 1000), FinSet::from_iter([1, 5]));
        let empty = finset_to_windex(&FinSet::default());
        assert!(w_stage(&empty, 1000).is_empty());
    }
}

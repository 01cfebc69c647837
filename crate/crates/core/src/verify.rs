//! Invariant suites run by `rlab verify`. Every check yields one
//! [`ContractReport`]; a suite passes when none of them fails.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classes::*;
use crate::coding::{block, FinSet, Nat};
use crate::ips::{
    cnst, comp, divergent, encode, eval, kleene_fp, proj, rec_f, rec_fm, smn, strong_fp, Ast, FnOracle, Outcome,
};
use crate::lambda::{app, apply, beta_eq, church, parse, plus_term, times_term, y_term, BetaEq};
use crate::priority::*;
use crate::re_sets::{corpus, corpus_entry, finset_to_windex, post_combiner, w_mem, StageSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Lambda,
    Ips,
    Re,
    Classes,
    Priority,
    All,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Upper bound on every fuel budget.
    pub fuel_cap: u64,
    /// Stages for the constructions.
    pub stages: u64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> VerifyConfig {
        VerifyConfig { fuel_cap: u64::MAX, stages: 2000, seed: 0 }
    }
}

impl VerifyConfig {
    fn fuel(&self, f: u64) -> u64 {
        f.min(self.fuel_cap)
    }
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Vec<ContractReport> {
    match suite {
        Suite::Lambda => lambda_suite(cfg),
        Suite::Ips => ips_suite(cfg),
        Suite::Re => re_suite(cfg),
        Suite::Classes => classes_suite(cfg),
        Suite::Priority => priority_suite(cfg),
        Suite::All => [Suite::Lambda, Suite::Ips, Suite::Re, Suite::Classes, Suite::Priority]
            .into_iter()
            .flat_map(|s| run_suite(s, cfg))
            .collect(),
    }
}

// ---- lambda ----

pub fn church_table(max: u64, fuel: u64) -> Vec<ContractReport> {
    let mut out = Vec::new();
    for n in 0..=max {
        for m in 0..=max {
            let plus = apply(plus_term(), [church(n), church(m)]);
            let ok = beta_eq(&plus, &church(n + m), fuel) == BetaEq::Equal;
            out.push(ContractReport::new("church_plus", format!("{n}+{m}"), fuel, verdict(ok)));
            let times = apply(times_term(), [church(n), church(m)]);
            let ok = beta_eq(&times, &church(n * m), fuel) == BetaEq::Equal;
            out.push(ContractReport::new("church_times", format!("{n}*{m}"), fuel, verdict(ok)));
        }
    }
    out
}

pub fn y_fixed_points(fuel: u64) -> Vec<ContractReport> {
    ["\\x. c", "\\x. x c"]
        .into_iter()
        .map(|src| {
            let a = parse(src).expect("fixed term parses");
            let ya = app(y_term(), a.clone());
            let ok = beta_eq(&ya, &app(a, ya.clone()), fuel) == BetaEq::Equal;
            ContractReport::new("y_fixed_point", src, fuel, verdict(ok))
        })
        .collect()
}

fn lambda_suite(cfg: &VerifyConfig) -> Vec<ContractReport> {
    let mut out = church_table(8, cfg.fuel(100_000));
    out.extend(y_fixed_points(cfg.fuel(100)));
    out
}

// ---- ips ----

/// Fuel-translated outcome equality of `lhs(largs)`, a program that simulates
/// `rhs(rargs)` with overhead: whatever `rhs` computes within `fuel`, `lhs`
/// computes within `10 fuel + 10^5`, and whatever `lhs` computes within
/// `fuel`, `rhs` computes within `fuel` too.
pub fn simulates(lhs: &Nat, largs: &[Nat], rhs: &Nat, rargs: &[Nat], fuel: u64) -> Verdict {
    let direct = eval(rhs, rargs, None, fuel);
    let wide = eval(lhs, largs, None, fuel.saturating_mul(10).saturating_add(100_000));
    if let Some(v) = direct.value() {
        if wide.value() != Some(v) {
            return Verdict::Fail;
        }
    }
    match eval(lhs, largs, None, fuel).value() {
        Some(v) if direct.value() != Some(v) => Verdict::Fail,
        _ => Verdict::Pass,
    }
}

/// Twenty programs of known behaviour.
pub fn recursion_corpus() -> Vec<(String, Nat)> {
    corpus().into_iter().take(20).map(|c| (c.name.to_string(), c.index)).collect()
}

pub fn recursion_contracts(fuel: u64) -> Vec<ContractReport> {
    let n = |x: u64| Nat::from(x);
    let mut out = Vec::new();
    let mut push = |contract: &str, name: &str, args: String, v: Verdict| {
        out.push(ContractReport::new(contract, format!("{name}({args})"), fuel, v));
    };
    for (name, e) in recursion_corpus() {
        for x in 0..=5u64 {
            let frozen = smn(&e, &[n(x)], 1);
            let ok = (0..=5u64).all(|y| simulates(&frozen, &[n(y)], &e, &[n(x), n(y)], fuel) == Verdict::Pass);
            push("smn", &name, format!("{x},y<=5"), verdict(ok));
        }
        let q = rec_f(&e);
        for x in 0..=5u64 {
            push("rec_f", &name, x.to_string(), simulates(&q, &[n(x)], &e, &[q.clone(), n(x)], fuel));
        }
        let ys = [n(3)];
        let r = rec_fm(&e, &ys, 1);
        for x in 0..=5u64 {
            push("rec_fm", &name, x.to_string(), simulates(&r, &[n(x)], &e, &[r.clone(), n(x), n(3)], fuel));
        }
        match kleene_fp(&e, fuel) {
            Ok(fe) => {
                let target = eval(&e, std::slice::from_ref(&fe), None, fuel).value().cloned().expect("certified");
                for x in 0..=5u64 {
                    push("kleene_fp", &name, x.to_string(), simulates(&fe, &[n(x)], &target, &[n(x)], fuel));
                }
            }
            Err(_) => push("kleene_fp", &name, "uncertified".into(), Verdict::Inconclusive),
        }
        let f = strong_fp(&e, 1);
        for z in 0..=2u64 {
            let Some(v) = eval(&f, &[n(z)], None, 1_000_000).value().cloned() else {
                push("strong_fp", &name, format!("z={z}"), Verdict::Fail);
                continue;
            };
            let Some(target) = eval(&e, &[v.clone(), n(z)], None, fuel).value().cloned() else {
                push("strong_fp", &name, format!("z={z}"), Verdict::Inconclusive);
                continue;
            };
            let ok = (0..=5u64).all(|x| simulates(&v, &[n(x)], &target, &[n(x)], fuel) == Verdict::Pass);
            push("strong_fp", &name, format!("z={z}"), verdict(ok));
        }
    }
    out
}

/// A total program that queries the oracle. Depth bounds the tree height.
pub fn random_oracle_program(rng: &mut impl Rng, depth: u32) -> Ast {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Ast::Zero,
            1 => proj(2, rng.gen_range(1..=2)),
            2 => cnst(rng.gen_range(0..40u64)),
            _ => comp(Ast::OracleQuery, vec![proj(2, rng.gen_range(1..=2))]),
        };
    }
    let pick = rng.gen_range(0..7);
    let mut sub = || random_oracle_program(rng, depth - 1);
    match pick {
        0 => comp(Ast::Succ, vec![sub()]),
        1 | 2 => comp(Ast::OracleQuery, vec![sub()]),
        3 => comp(Ast::Eq, vec![sub(), sub()]),
        4 => comp(Ast::Cond, vec![sub(), sub(), sub()]),
        5 => comp(Ast::Left, vec![sub()]),
        _ => comp(crate::ips::add(), vec![sub(), sub()]),
    }
}

/// Random oracle evaluations, each repeated with every oracle bit at or
/// above the reported use flipped.
pub fn oracle_use_checks(seed: u64, count: usize, fuel: u64) -> Vec<ContractReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let p = encode(&random_oracle_program(&mut rng, 4));
        let args = [Nat::from(rng.gen_range(0..30u64)), Nat::from(rng.gen_range(0..30u64))];
        let bits: u64 = rng.gen();
        let base = move |x: &Nat| x.to_u64().is_some_and(|x| if x < 64 { bits >> x & 1 == 1 } else { x % 3 == 0 });
        let first = eval(&p, &args, Some(&FnOracle(base)), fuel);
        let v = match &first {
            Outcome::Converged { use_, .. } => {
                let u = use_.clone();
                let mutated = FnOracle(move |x: &Nat| if *x < u { base(x) } else { !base(x) });
                verdict(eval(&p, &args, Some(&mutated), fuel) == first)
            }
            Outcome::OutOfFuel => Verdict::Inconclusive,
        };
        out.push(ContractReport::new("oracle_use", format!("sample {i}"), fuel, v));
    }
    out
}

fn ips_suite(cfg: &VerifyConfig) -> Vec<ContractReport> {
    let mut out = Vec::new();
    let succ = crate::ips::parse_program("(succ)").map(|p| encode(&p));
    let ok = succ.is_ok_and(|s| eval(&s, &[Nat::from(4u64)], None, cfg.fuel(100)).value() == Some(&Nat::from(5u64)));
    out.push(ContractReport::new("eval", "(succ) 4", cfg.fuel(100), verdict(ok)));
    let ok = !eval(&encode(&divergent()), &[Nat::zero()], None, cfg.fuel(100)).converged();
    out.push(ContractReport::new("eval", "divergent 0", cfg.fuel(100), verdict(ok)));
    out.extend(recursion_contracts(cfg.fuel(10_000)));
    out.extend(oracle_use_checks(cfg.seed, 100, cfg.fuel(10_000)));
    out
}

// ---- re ----

/// Disjoint corpus pairs for the combiner.
pub const COMBINER_PAIRS: [(&str, &str); 3] = [("evens", "odds"), ("triangular", "non_triangular"), ("guard5", "below3")];

pub fn combiner_checks(max_x: u64, fuel: u64) -> Vec<ContractReport> {
    let mut out = Vec::new();
    for (a, b) in COMBINER_PAIRS {
        let (ea, eb) = (corpus_entry(a), corpus_entry(b));
        assert!(ea.domain.disjoint(&eb.domain));
        let p = post_combiner(&ea.index, &eb.index);
        for x in (0..=max_x).filter(|&x| ea.domain.contains(x) || eb.domain.contains(x)) {
            let want = u64::from(ea.domain.contains(x));
            let ok = eval(&p, &[Nat::from(x)], None, fuel).value() == Some(&Nat::from(want));
            out.push(ContractReport::new("post_combiner", format!("{a}/{b} x={x}"), fuel, verdict(ok)));
        }
    }
    out
}

fn re_suite(cfg: &VerifyConfig) -> Vec<ContractReport> {
    let mut out = Vec::new();
    let checkpoints = [0u64, 10, 50, 100, 250, 500, 1000];
    for c in corpus() {
        let s = StageSet::domain(&c.index);
        let mut ok = true;
        for w in checkpoints.windows(2) {
            ok &= s.at(cfg.fuel(w[0])).is_subset(&s.at(cfg.fuel(w[1])));
        }
        out.push(ContractReport::new("stage_monotone", c.name, cfg.fuel(1000), verdict(ok)));
    }
    out.extend(combiner_checks(100, cfg.fuel(100_000)));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..5 {
        let d = FinSet::from_iter((0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..40u64)));
        let w = finset_to_windex(&d);
        let fuel = cfg.fuel(100_000);
        let ok = (0..50u64).all(|x| w_mem(&w, &Nat::from(x), fuel) == d.contains(x));
        out.push(ContractReport::new("finset_to_windex", format!("set {i}"), fuel, verdict(ok)));
    }
    out
}

// ---- classes ----

/// `|S ∩ {0..2n}| ≤ n` for `n ≤ 50` and `x > 2e`, `x ∈ W_{e,discovery}` for
/// every member.
pub fn post_simple_checks(p: &PostSimple) -> Vec<ContractReport> {
    let s = p.set();
    let density = (0..=50u64).all(|n| s.iter().filter(|&x| x <= 2 * n).count() as u64 <= n);
    let provenance =
        p.members.iter().all(|m| m.x > 2 * m.e && w_mem(&Nat::from(m.e), &Nat::from(m.x), m.discovery));
    vec![
        ContractReport::new("post_simple_density", "n<=50", p.stage, verdict(density)),
        ContractReport::new("post_simple_provenance", format!("{} members", p.members.len()), p.stage, verdict(provenance)),
    ]
}

/// Corpus points of known `K`-status.
pub fn k_status_points() -> Vec<(&'static str, bool)> {
    vec![("zero", true), ("divergent", false), ("table_1_5", false)]
}

pub fn myhill_checks(fuel: u64) -> Vec<ContractReport> {
    let r = myhill_backward(&k_creative_witness());
    k_status_points()
        .into_iter()
        .map(|(name, in_k)| {
            let z = corpus_entry(name).index;
            let v = match r.apply(&z, fuel) {
                Some(y) if in_k => verdict(crate::re_sets::k_mem(&y, fuel)),
                // non-membership is only refuted, never confirmed, at finite fuel
                Some(y) => verdict(!crate::re_sets::k_mem(&y, fuel / 10)),
                None => Verdict::Fail,
            };
            ContractReport::new("myhill_backward", name, fuel, v)
        })
        .collect()
}

pub fn seu_triangle_checks(fuel: u64) -> Vec<ContractReport> {
    let k = SetHandle::k();
    let mut out = Vec::new();
    let d0 = singleton_of(&myhill_backward(&k_creative_witness()));
    for (name, in_k) in k_status_points() {
        let e = corpus_entry(name).index;
        out.push(ContractReport::new("dcomplete", name, fuel, check_dcomplete(&d0, &e, in_k, &k, fuel, fuel)));
    }
    let seu = dcomplete_to_dseu(&d0);
    for (name, e) in [("const0", cnst(0u64)), ("const1", cnst(1u64)), ("identity", proj(1, 1))] {
        let v = check_dweu(&seu, &encode(&e), &k, fuel / 5, fuel);
        out.push(ContractReport::new("dcomplete_to_dseu", name, fuel, v));
    }
    let qc = dseu_to_quasicreative(&seu, &k);
    let empties = [("divergent", encode(&divergent())), ("empty_table", finset_to_windex(&FinSet::new())), ("mu_succ", Nat::from(22u64))];
    for (name, e) in &empties {
        out.push(ContractReport::new("dseu_to_quasicreative", *name, fuel, check_quasicreative(&qc, e, &k, fuel / 10, fuel)));
    }
    let d1 = quasicreative_to_dcomplete(&qc);
    for (name, in_k) in k_status_points() {
        let e = corpus_entry(name).index;
        let v = check_dcomplete(&d1, &e, in_k, &k, fuel, fuel * 10);
        out.push(ContractReport::new("quasicreative_to_dcomplete", name, fuel, v));
    }
    out
}

pub fn wtt_round_trip_checks(fuel: u64) -> Vec<ContractReport> {
    let k = SetHandle::k();
    let red = WttReduction::k_identity();
    let w = wtt_to_dweu(&red);
    let mut out = Vec::new();
    for (name, e) in [("const0", cnst(0u64)), ("const1", cnst(1u64)), ("identity", proj(1, 1))] {
        let e = encode(&e);
        let z = red.certificate(&e);
        out.push(ContractReport::new("wtt_to_dweu", name, fuel, check_dweu_at(&w, &e, &z, &k, fuel / 10, fuel)));
    }
    // back again: the finite witness of the simple set gives a separating wtt function
    let d = simple_dweu(2000);
    let a_set = d.set();
    let oracle = FnOracle(|z: &Nat| z.to_u64().is_some_and(|z| a_set.contains(z)));
    let g = dweu_to_wtt_fpf(&simple_dweu_witness());
    for e in [0u64, 28, 37] {
        let v = match eval(&g, &[Nat::from(e)], Some(&oracle), fuel * 10).value() {
            Some(c) => {
                let probes: Vec<Nat> = (0..3u64).chain(block(e).iter()).map(Nat::from).collect();
                fpf_separates(&Nat::from(e), c, &probes, fuel / 10)
            }
            None => Verdict::Fail,
        };
        out.push(ContractReport::new("dweu_to_wtt_fpf", format!("e={e}"), fuel, v));
    }
    out
}

pub fn strong_array_checks(count: usize, fuel: u64) -> Vec<ContractReport> {
    let arr = strong_array_extract(&simple_dweu_witness(), count, 20, fuel);
    let mut ok = !arr.exhausted && arr.sets.len() == count;
    for (i, a) in arr.sets.iter().enumerate() {
        ok &= !a.is_empty();
        for b in &arr.sets[i + 1..] {
            ok &= !a.meets(b);
        }
    }
    vec![ContractReport::new("strong_array_extract", format!("{count} sets"), fuel, verdict(ok))]
}

fn classes_suite(cfg: &VerifyConfig) -> Vec<ContractReport> {
    let mut out = post_simple_checks(&post_simple(cfg.stages));
    let d = simple_dweu(cfg.stages);
    let h = d.handle();
    let w = simple_dweu_witness();
    for e in [0u64, 25, 28] {
        out.push(ContractReport::new("simple_dweu", format!("e={e}"), cfg.stages, check_dweu(&w, &Nat::from(e), &h, cfg.stages, cfg.fuel(10_000))));
    }
    out.extend(myhill_checks(cfg.fuel(1_000_000)));
    out.extend(seu_triangle_checks(cfg.fuel(1_000_000)));
    out.extend(wtt_round_trip_checks(cfg.fuel(1_000_000)));
    out.extend(strong_array_checks(3, cfg.fuel(1000)));
    out
}

// ---- priority ----

/// `M_{a_n} = F_{2n+2} - 1` and `M_{b_n} = F_{2n+3} - 1`.
pub fn fibonacci_checks(n: usize) -> Vec<ContractReport> {
    let (a, b) = injury_game(&GameKind::Interleaved, n);
    let mut out = Vec::new();
    for k in 0..=n {
        let fa = Nat::from(fibonacci(2 * k as u64 + 2) - 1u32);
        let fb = Nat::from(fibonacci(2 * k as u64 + 3) - 1u32);
        out.push(ContractReport::new("injury_fibonacci", format!("a{k}"), 0, verdict(a[k] == fa)));
        out.push(ContractReport::new("injury_fibonacci", format!("b{k}"), 0, verdict(b[k] == fb)));
    }
    out
}

/// `alpha_n = Σ_{k<n} (beta_k + 1)`, `beta_n = Σ_{k≤n} A_k (alpha_k + 1)`.
pub fn block_recurrence_checks(schedule: &Schedule) -> Vec<ContractReport> {
    let (alpha, beta) = injury_game(&GameKind::Scheduled(schedule.clone()), schedule.0.len());
    let mut out = Vec::new();
    for n in 0..schedule.0.len() {
        let a: BigUint = (0..n).map(|k| beta[k].to_biguint() + 1u32).sum();
        let b: BigUint = (0..=n).map(|k| BigUint::from(schedule.0[k]) * (alpha[k].to_biguint() + 1u32)).sum();
        let ok = alpha[n].to_biguint() == a && beta[n].to_biguint() == b;
        out.push(ContractReport::new("block_recurrence", format!("level {n}"), 0, verdict(ok)));
    }
    out
}

pub fn square(n: u128) -> BigUint {
    BigUint::from(n) * BigUint::from(n)
}

pub fn schedule_checks(levels: usize) -> Vec<ContractReport> {
    match find_schedule(&square, levels) {
        Ok(s) => {
            let mut out = vec![ContractReport::new("schedule_n2", format!("{:?}", s.0), 0, verdict(schedule_meets_bound(&square, &s)))];
            out.extend(block_recurrence_checks(&s));
            out
        }
        Err(e) => vec![ContractReport::new("schedule_n2", e.to_string(), 0, Verdict::Fail)],
    }
}

/// Disagreement, use replay and injury bounds of a finished FM run.
pub fn fm_checks(name: &str, st: &PriorityState) -> Vec<ContractReport> {
    let mut out = Vec::new();
    for (r, b) in fm_bounds(st) {
        let s = &st.requirements[&r];
        out.push(ContractReport::new("fm_injury_bound", format!("{name} {r}"), st.stage, verdict(Nat::from(s.injuries) <= b)));
        if s.handled {
            let ok = fm_disagreement(st, r) == Some(true) && fm_use_replay(st, r, &[0, 1, 5]) == Some(true);
            out.push(ContractReport::new("fm_disagreement", format!("{name} {r}"), st.stage, verdict(ok)));
        }
    }
    out.push(ContractReport::new("fm_bound_sweeps", name, st.stage, verdict(st.bound_violations.is_empty())));
    out
}

/// `P_e` placement for every discovered `e` and the direction of every injury.
pub fn d_construction_checks(name: &str, st: &PriorityState) -> Vec<ContractReport> {
    let mut out: Vec<ContractReport> = k_events_placed(st)
        .into_iter()
        .map(|(e, ok)| ContractReport::new("k_placement", format!("{name} P{e}"), st.stage, verdict(ok)))
        .collect();
    out.push(ContractReport::new("injury_direction", name, st.stage, verdict(injuries_respect_priority(st))));
    out.push(ContractReport::new("b_insertions_clean", name, st.stage, verdict(b_insertions_clean(st))));
    out
}

fn priority_suite(cfg: &VerifyConfig) -> Vec<ContractReport> {
    let stages = cfg.stages;
    let mut out = fibonacci_checks(8);
    out.extend(schedule_checks(5));
    let st = fm_run(6, stages);
    out.extend(fm_checks("fm", &st));
    let again = fm_run(6, stages);
    out.push(ContractReport::new("fm_deterministic", "fm", stages, verdict(st.trace() == again.trace())));
    out.extend(fm_checks("fm-oracle", &fm_run_with(6, stages, &oracle_programs)));
    out.extend(fm_checks("fm-reordered", &fm_reordered_run_with(&Schedule(vec![2, 3]), stages, &oracle_programs)));
    out.extend(d_construction_checks("ijd", &ijd_run(1, 2, stages)));
    out.extend(d_construction_checks("dnotnd", &dnotnd_run(stages)));
    out
}

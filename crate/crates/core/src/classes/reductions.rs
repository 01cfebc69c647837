//! Checkers for m- and n-d-reductions on samples.

use serde::Serialize;

use crate::coding::Nat;
use crate::ips::{cnst, comp, encode, proj, Ast};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleCheck {
    pub x: String,
    pub in_a: bool,
    pub image_meets_b: bool,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub stage: u64,
    pub bound: Option<usize>,
    pub samples: Vec<SampleCheck>,
}

impl ReductionReport {
    pub fn disagreements(&self) -> usize {
        self.samples.iter().filter(|c| c.in_a != c.image_meets_b).count()
    }

    pub fn size_violations(&self) -> usize {
        self.bound.map_or(0, |n| self.samples.iter().filter(|c| c.size > n).count())
    }

    pub fn passed(&self) -> bool {
        self.disagreements() == 0 && self.size_violations() == 0
    }
}

/// `x ∈ A ⇔ f(x) ∈ B` on each sample, memberships read at stage `s`.
pub fn check_m_reduction(
    f: impl Fn(&Nat) -> Nat,
    a_mem: impl Fn(&Nat, u64) -> bool,
    b_mem: impl Fn(&Nat, u64) -> bool,
    samples: &[Nat],
    s: u64,
) -> ReductionReport {
    check_nd_reduction(None, |x| vec![f(x)], a_mem, b_mem, samples, s)
}

/// `x ∈ A ⇔ f(x)` meets `B`, with `|f(x)| ≤ n` when a bound is given.
pub fn check_nd_reduction(
    n: Option<usize>,
    f: impl Fn(&Nat) -> Vec<Nat>,
    a_mem: impl Fn(&Nat, u64) -> bool,
    b_mem: impl Fn(&Nat, u64) -> bool,
    samples: &[Nat],
    s: u64,
) -> ReductionReport {
    let samples = samples
        .iter()
        .map(|x| {
            let mut image = f(x);
            image.dedup();
            SampleCheck {
                x: x.to_string(),
                in_a: a_mem(x, s),
                image_meets_b: image.iter().any(|z| b_mem(z, s)),
                size: image.len(),
            }
        })
        .collect();
    ReductionReport { stage: s, bound: n, samples }
}

/// `2n` indices `y` with `phi_y(y) ≃ phi_x(x)`: `K` is `2n`-d-complete via these.
pub fn k_copies(x: &Nat, n: usize) -> Vec<Nat> {
    let mut p = comp(Ast::Univ, vec![cnst(x.clone()), cnst(x.clone())]);
    let mut out = Vec::with_capacity(2 * n);
    for _ in 0..2 * n {
        out.push(encode(&p));
        p = comp(proj(1, 1), vec![p]);
    }
    out
}

/// The split of a `2n`-d reduction `f` of `A` into `x ↦ {2x, 2x+1}` and
/// `2x ↦ f(x)_{1..n}`, `2x+1 ↦ f(x)_{n+1..2n}`.
pub struct HalvesSplit<F> {
    pub n: usize,
    pub f: F,
}

impl<F: Fn(&Nat) -> Vec<Nat>> HalvesSplit<F> {
    pub fn first(&self, x: &Nat) -> Vec<Nat> {
        let two_x = x.add(x);
        vec![two_x.clone(), two_x.succ()]
    }

    /// Index of the half coded by `y`.
    pub fn second(&self, y: &Nat) -> Vec<Nat> {
        let v = y.to_u64().expect("split index fits a word");
        let image = (self.f)(&Nat::from(v / 2));
        if v % 2 == 0 {
            image[..self.n].to_vec()
        } else {
            image[self.n..].to_vec()
        }
    }

    /// `y ∈ B` at stage `s`, given membership in `A`.
    pub fn b_mem(&self, y: &Nat, s: u64, a_mem: impl Fn(&Nat, u64) -> bool) -> bool {
        self.second(y).iter().any(|z| a_mem(z, s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::re_sets::{corpus, k_mem};

    fn small_samples() -> Vec<Nat> {
        // the split codes 2x and 2x + 1 need word-sized x
        corpus().into_iter().filter_map(|c| c.index.to_u64().filter(|&v| v < 1 << 30).map(Nat::from)).take(6).collect()
    }

    #[test]
    fn identity_reduction_of_k() {
        let samples: Vec<Nat> = corpus().into_iter().map(|c| c.index).take(8).collect();
        let r = check_m_reduction(|x| x.clone(), k_mem, k_mem, &samples, 10_000);
        assert!(r.passed());
    }

    #[test]
    fn broken_map_fails() {
        let samples: Vec<Nat> = (0..30u64).map(Nat::from).collect();
        let r = check_m_reduction(|x| x.succ(), k_mem, k_mem, &samples, 10_000);
        assert!(!r.passed());
        let r = check_nd_reduction(Some(1), |x| k_copies(x, 1), k_mem, k_mem, &samples, 10_000);
        assert_eq!(r.disagreements(), 0);
        assert!(r.size_violations() > 0);
    }

    #[test]
    fn nd_reductions_chain_through_halves() {
        let n = 2;
        let split = HalvesSplit { n, f: |x: &Nat| k_copies(x, n) };
        let samples = small_samples();
        assert!(samples.len() >= 4);
        let s = 100_000;
        let whole = check_nd_reduction(Some(2 * n), |x| k_copies(x, n), k_mem, k_mem, &samples, s);
        assert!(whole.passed());
        let b_mem = |y: &Nat, s: u64| split.b_mem(y, s, k_mem);
        let first = check_nd_reduction(Some(n), |x| split.first(x), k_mem, b_mem, &samples, s);
        assert!(first.passed());
        let b_samples: Vec<Nat> = samples.iter().flat_map(|x| split.first(x)).collect();
        let second = check_nd_reduction(Some(n), |y| split.second(y), b_mem, k_mem, &b_samples, s);
        assert!(second.passed());
    }
}

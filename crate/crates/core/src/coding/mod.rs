//! Numeric encodings: Cantor pairs, length-prefixed lists, canonical finite
//! sets and the block partition of the naturals.

mod nat;

pub use nat::Nat;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodingError {
    #[error("malformed list code {0}")]
    MalformedList(String),
}

pub fn pair_encode(x: &Nat, y: &Nat) -> Nat {
    Nat::pair(x, y)
}

pub fn pair_decode(n: &Nat) -> (Nat, Nat) {
    n.unpair()
}

/// `pair_encode` on machine words.
pub fn pair_u64(x: u64, y: u64) -> u64 {
    pair_encode(&x.into(), &y.into())
        .to_u64()
        .expect("pair overflows u64")
}

pub fn unpair_u64(n: u64) -> (u64, u64) {
    let (x, y) = Nat::from(n).unpair();
    (x.to_u64().unwrap(), y.to_u64().unwrap())
}

/// `<x1..xm> = pair(m, pair(x1, pair(x2, ... pair(xm, 0))))`, `<> = 0`.
pub fn list_encode(xs: &[Nat]) -> Nat {
    if xs.is_empty() {
        return Nat::zero();
    }
    let tail = xs
        .iter()
        .rev()
        .fold(Nat::zero(), |acc, x| Nat::pair(x, &acc));
    Nat::pair(&Nat::from(xs.len()), &tail)
}

pub fn list_decode(n: &Nat) -> Result<Vec<Nat>, CodingError> {
    let bad = || CodingError::MalformedList(n.to_string());
    let (m, mut rest) = n.unpair();
    let m = m.to_usize().ok_or_else(bad)?;
    if m == 0 {
        return if rest.is_zero() { Ok(Vec::new()) } else { Err(bad()) };
    }
    let mut out = Vec::with_capacity(m.min(1024));
    for _ in 0..m {
        let (x, r) = rest.unpair();
        out.push(x);
        rest = r;
    }
    if rest.is_zero() {
        Ok(out)
    } else {
        Err(bad())
    }
}

/// A finite set of naturals in strictly ascending order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct FinSet(Vec<u64>);

impl FinSet {
    pub fn new() -> FinSet {
        FinSet(Vec::new())
    }

    pub fn from_iter<I: IntoIterator<Item = u64>>(it: I) -> FinSet {
        let mut v: Vec<u64> = it.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FinSet(v)
    }

    pub fn elements(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    /// Returns false if `x` was already present.
    pub fn insert(&mut self, x: u64) -> bool {
        match self.0.binary_search(&x) {
            Ok(_) => false,
            Err(i) => {
                self.0.insert(i, x);
                true
            }
        }
    }

    pub fn union(&self, other: &FinSet) -> FinSet {
        FinSet::from_iter(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn intersection(&self, other: &FinSet) -> FinSet {
        FinSet(self.0.iter().copied().filter(|x| other.contains(*x)).collect())
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        self.0.iter().all(|x| other.contains(*x))
    }

    pub fn is_disjoint(&self, other: &FinSet) -> bool {
        self.0.iter().all(|x| !other.contains(*x))
    }

    pub fn max(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Canonical index: the sum of `2^i` over the members.
pub fn finset_encode(s: &FinSet) -> Nat {
    let mut n = BigUint::zero();
    for &i in s.elements() {
        n.set_bit(i, true);
    }
    Nat::from(n)
}

pub fn finset_decode(n: &Nat) -> FinSet {
    if let Some(v) = n.to_u64() {
        return FinSet((0..64).filter(|i| v >> i & 1 == 1).collect());
    }
    let b = n.to_biguint();
    FinSet((0..b.bits()).filter(|&i| b.bit(i)).collect())
}

/// First element of `block(e)`.
pub fn block_start(e: u64) -> u64 {
    e * (e + 3) / 2
}

/// `{e(e+3)/2, ..., e(e+3)/2 + e + 1}`; consecutive blocks of size `e+2`.
pub fn block(e: u64) -> FinSet {
    let s = block_start(e);
    FinSet((s..=s + e + 1).collect())
}

/// The unique `e` with `n` in `block(e)`.
pub fn block_of(n: u64) -> u64 {
    let mut e = (((2 * n) as f64).sqrt() as u64).saturating_sub(2);
    while block_start(e + 1) <= n {
        e += 1;
    }
    while block_start(e) > n {
        e -= 1;
    }
    e
}

/// `2^k` as a natural.
pub fn pow2(k: u64) -> Nat {
    Nat::from(BigUint::one() << k as usize)
}

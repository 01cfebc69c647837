//! Unbounded naturals.
//!
//! Program codes nest Cantor pairs, so a code that embeds another code is
//! roughly the square of it. Large pairs are therefore kept as a lazy node
//! holding both components; the numeric value is only produced on demand.
//! Equality, hashing and unpairing work on the lazy form directly.

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Pairs whose value needs more bits than this are stored lazily.
const LAZY_BITS: u64 = 1024;
/// Display gives up on materializing values larger than this.
const DISPLAY_BITS: u64 = 1 << 22;

#[derive(Clone)]
pub struct Nat(Repr);

#[derive(Clone)]
enum Repr {
    Small(u64),
    Big(Arc<BigUint>),
    Pair(Arc<(Nat, Nat)>),
}

impl Nat {
    pub const ZERO: Nat = Nat(Repr::Small(0));

    pub fn zero() -> Nat {
        Nat::ZERO
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0))
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self.0 {
            Repr::Small(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_usize(&self) -> Option<usize> {
        self.to_u64().and_then(|v| usize::try_from(v).ok())
    }

    /// True when the value is held as a lazy pair.
    pub fn is_lazy(&self) -> bool {
        matches!(self.0, Repr::Pair(_))
    }

    /// Upper estimate of the bit length, exact for literal values.
    pub fn bits_hint(&self) -> u64 {
        match &self.0 {
            Repr::Small(v) => 64 - v.leading_zeros() as u64,
            Repr::Big(b) => b.bits(),
            Repr::Pair(p) => p.0.bits_hint().max(p.1.bits_hint()).saturating_mul(2).saturating_add(2),
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match &self.0 {
            Repr::Small(v) => BigUint::from(*v),
            Repr::Big(b) => (**b).clone(),
            Repr::Pair(p) => pair_big(&p.0.to_biguint(), &p.1.to_biguint()),
        }
    }

    /// Literal form of the value; lazy pairs are expanded.
    pub fn materialize(&self) -> Nat {
        match &self.0 {
            Repr::Pair(_) => Nat::from(self.to_biguint()),
            _ => self.clone(),
        }
    }

    /// Lazy pairs stay lazy: `pair(x, y) + 1` is `pair(x - 1, y + 1)`, or
    /// `pair(y + 1, 0)` when `x = 0`.
    pub fn succ(&self) -> Nat {
        match &self.0 {
            Repr::Small(v) if *v < u64::MAX => Nat(Repr::Small(v + 1)),
            Repr::Pair(p) if p.0.is_zero() => Nat::pair(&p.1.succ(), &Nat::zero()),
            Repr::Pair(p) => Nat::pair(&p.0.pred(), &p.1.succ()),
            _ => Nat::from(self.to_biguint() + 1u32),
        }
    }

    /// Truncated predecessor, structural on lazy pairs like [`Nat::succ`].
    pub fn pred(&self) -> Nat {
        match &self.0 {
            Repr::Small(v) => Nat(Repr::Small(v.saturating_sub(1))),
            Repr::Pair(p) if p.1.is_zero() => Nat::pair(&Nat::zero(), &p.0.pred()),
            Repr::Pair(p) => Nat::pair(&p.0.succ(), &p.1.pred()),
            Repr::Big(b) => Nat::from(&**b - 1u32),
        }
    }

    pub fn add(&self, other: &Nat) -> Nat {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if let Some(s) = a.checked_add(*b) {
                return Nat(Repr::Small(s));
            }
        }
        Nat::from(self.to_biguint() + other.to_biguint())
    }

    pub fn mul(&self, other: &Nat) -> Nat {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if let Some(s) = a.checked_mul(*b) {
                return Nat(Repr::Small(s));
            }
        }
        Nat::from(self.to_biguint() * other.to_biguint())
    }

    /// Truncated subtraction.
    pub fn monus(&self, other: &Nat) -> Nat {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            return Nat(Repr::Small(a.saturating_sub(*b)));
        }
        let (a, b) = (self.to_biguint(), other.to_biguint());
        if a <= b {
            Nat::zero()
        } else {
            Nat::from(a - b)
        }
    }

    /// Cantor pairing.
    pub fn pair(x: &Nat, y: &Nat) -> Nat {
        if let (Repr::Small(a), Repr::Small(b)) = (&x.0, &y.0) {
            if *a < (1 << 62) && *b < (1 << 62) {
                let s = (*a as u128) + (*b as u128);
                return Nat::from_u128(s * (s + 1) / 2 + *b as u128);
            }
        }
        if x.is_lazy() || y.is_lazy() || 2 * x.bits_hint().max(y.bits_hint()) > LAZY_BITS + 4 {
            return Nat(Repr::Pair(Arc::new((x.clone(), y.clone()))));
        }
        let v = Nat::from(pair_big(&x.to_biguint(), &y.to_biguint()));
        if v.bits_hint() > LAZY_BITS {
            Nat(Repr::Pair(Arc::new((x.clone(), y.clone()))))
        } else {
            v
        }
    }

    /// Inverse of [`Nat::pair`].
    pub fn unpair(&self) -> (Nat, Nat) {
        match &self.0 {
            Repr::Small(n) => {
                let n = *n as u128;
                let w = ((8 * n + 1).sqrt() - 1) / 2;
                let t = w * (w + 1) / 2;
                let y = n - t;
                (Nat::from_u128(w - y), Nat::from_u128(y))
            }
            Repr::Big(n) => {
                let w = ((&**n * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
                let t = &w * (&w + 1u32) / 2u32;
                let y = &**n - t;
                (Nat::from(w - &y), Nat::from(y))
            }
            Repr::Pair(p) => (p.0.clone(), p.1.clone()),
        }
    }

    fn from_u128(v: u128) -> Nat {
        match u64::try_from(v) {
            Ok(s) => Nat(Repr::Small(s)),
            Err(_) => Nat(Repr::Big(Arc::new(BigUint::from(v)))),
        }
    }

    fn literal_big(&self) -> bool {
        match &self.0 {
            Repr::Big(b) => b.bits() > LAZY_BITS,
            _ => false,
        }
    }
}

fn pair_big(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    let t = (&s * (&s + BigUint::one())) >> 1u32;
    t + y
}

impl From<u64> for Nat {
    fn from(v: u64) -> Nat {
        Nat(Repr::Small(v))
    }
}

impl From<u32> for Nat {
    fn from(v: u32) -> Nat {
        Nat(Repr::Small(v as u64))
    }
}

impl From<usize> for Nat {
    fn from(v: usize) -> Nat {
        Nat(Repr::Small(v as u64))
    }
}

impl From<BigUint> for Nat {
    fn from(v: BigUint) -> Nat {
        match v.to_u64() {
            Some(s) => Nat(Repr::Small(s)),
            None => Nat(Repr::Big(Arc::new(v))),
        }
    }
}

impl PartialEq for Nat {
    fn eq(&self, other: &Nat) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            (Repr::Small(_), Repr::Big(_)) | (Repr::Big(_), Repr::Small(_)) => false,
            (Repr::Pair(a), Repr::Pair(b)) => Arc::ptr_eq(a, b) || (a.0 == b.0 && a.1 == b.1),
            (Repr::Pair(p), _) => other.literal_big() && {
                let (a, b) = other.unpair();
                p.0 == a && p.1 == b
            },
            (_, Repr::Pair(p)) => self.literal_big() && {
                let (a, b) = self.unpair();
                p.0 == a && p.1 == b
            },
        }
    }
}

impl Eq for Nat {}

impl Hash for Nat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        if self.is_lazy() || self.literal_big() {
            let (a, b) = self.unpair();
            state.write_u8(1);
            a.hash(state);
            b.hash(state);
        } else {
            state.write_u8(0);
            match &self.0 {
                Repr::Small(v) => v.hash(state),
                _ => self.to_biguint().hash(state),
            }
        }
    }
}

impl Ord for Nat {
    fn cmp(&self, other: &Nat) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            (Repr::Small(_), Repr::Big(_)) => Ordering::Less,
            (Repr::Big(_), Repr::Small(_)) => Ordering::Greater,
            (Repr::Big(a), Repr::Big(b)) => a.cmp(b),
            (Repr::Pair(_), _) if !other.literal_big() && !other.is_lazy() => Ordering::Greater,
            (_, Repr::Pair(_)) if !self.literal_big() && !self.is_lazy() => Ordering::Less,
            _ => {
                if self == other {
                    Ordering::Equal
                } else {
                    self.to_biguint().cmp(&other.to_biguint())
                }
            }
        }
    }
}

impl PartialOrd for Nat {
    fn partial_cmp(&self, other: &Nat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Nat {
    fn default() -> Nat {
        Nat::zero()
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(v) => write!(f, "{v}"),
            Repr::Big(b) => write!(f, "{b}"),
            Repr::Pair(_) if self.bits_hint() <= DISPLAY_BITS => write!(f, "{}", self.to_biguint()),
            Repr::Pair(p) => write!(f, "<{}, {}>", p.0, p.1),
        }
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Pair(p) => write!(f, "pair({:?}, {:?})", p.0, p.1),
            _ => write!(f, "{self}"),
        }
    }
}

impl std::str::FromStr for Nat {
    type Err = num_bigint::ParseBigIntError;
    fn from_str(s: &str) -> Result<Nat, Self::Err> {
        s.parse::<BigUint>().map(Nat::from)
    }
}

impl serde::Serialize for Nat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Repr::Small(v) => s.serialize_u64(v),
            _ => s.serialize_str(&self.to_string()),
        }
    }
}

impl Zero for Nat {
    fn zero() -> Nat {
        Nat::ZERO
    }
    fn is_zero(&self) -> bool {
        Nat::is_zero(self)
    }
}

impl std::ops::Add for Nat {
    type Output = Nat;
    fn add(self, rhs: Nat) -> Nat {
        Nat::add(&self, &rhs)
    }
}

//! Worst-case injury counts of the Friedberg–Muchnik construction.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::ReqId;
use crate::coding::Nat;

/// Block sizes `A_0, A_1, …`: `A_n` a-requirements precede `b_n`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Schedule(pub Vec<u64>);

impl Schedule {
    pub fn interleaved(n: usize) -> Schedule {
        Schedule(vec![1; n])
    }

    /// Priority order `a_0 … a_{A_0-1} ≻ b_0 ≻ a_{A_0} … ≻ b_1 ≻ …`.
    pub fn order(&self) -> Vec<ReqId> {
        let mut out = Vec::new();
        let mut next_a = 0;
        for (n, &size) in self.0.iter().enumerate() {
            out.extend((next_a..next_a + size).map(ReqId::A));
            next_a += size;
            out.push(ReqId::B(n as u64));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub enum GameKind {
    Interleaved,
    Scheduled(Schedule),
}

/// Bound on the moves of each requirement in a priority order: every
/// placement of a higher requirement of the other letter may move it once,
/// so `M_r = Σ (M_r' + 1)` over those `r'`.
pub fn injury_bounds(order: &[ReqId]) -> Vec<Nat> {
    let mut sum_a = BigUint::zero();
    let mut sum_b = BigUint::zero();
    let mut out = Vec::with_capacity(order.len());
    for r in order {
        let m = match r {
            ReqId::A(_) => {
                let m = sum_b.clone();
                sum_a += &m + 1u32;
                m
            }
            _ => {
                let m = sum_a.clone();
                sum_b += &m + 1u32;
                m
            }
        };
        out.push(Nat::from(m));
    }
    out
}

fn block_game(schedule: &[u64]) -> (Vec<BigUint>, Vec<BigUint>) {
    // every a in block n shares the bound alpha_n
    let mut alpha = Vec::with_capacity(schedule.len());
    let mut beta = Vec::with_capacity(schedule.len());
    let mut sum_b = BigUint::zero();
    let mut sum_a = BigUint::zero();
    for &size in schedule {
        let a_n = sum_b.clone();
        sum_a += BigUint::from(size) * (&a_n + 1u32);
        let b_n = sum_a.clone();
        sum_b += &b_n + 1u32;
        alpha.push(a_n);
        beta.push(b_n);
    }
    (alpha, beta)
}

/// Interleaved: `(M_{a_0..n}, M_{b_0..n})`. Scheduled: `(alpha_{0..n}, beta_{0..n})`,
/// truncated to the length of the schedule.
pub fn injury_game(kind: &GameKind, n: usize) -> (Vec<Nat>, Vec<Nat>) {
    let sched = match kind {
        GameKind::Interleaved => vec![1; n + 1],
        GameKind::Scheduled(s) => s.0.iter().copied().take(n + 1).collect(),
    };
    let (alpha, beta) = block_game(&sched);
    (alpha.into_iter().map(Nat::from).collect(), beta.into_iter().map(Nat::from).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("no schedule found: level {level} has no block size below the cutoff")]
    NotFound { level: usize },
}

/// Largest block size tried before giving up.
pub const SCHEDULE_CUTOFF: u128 = 1 << 64;

/// Picks `A_n` as the least `N` with `f(S + N) ≥ (S + N + 1)(f(S) + 1)`,
/// `S = A_0 + … + A_{n-1}`. Small `N` are scanned one by one; beyond that the
/// search doubles, then bisects, assuming the inequality keeps holding once
/// it holds.
pub fn find_schedule(f: &dyn Fn(u128) -> BigUint, levels: usize) -> Result<Schedule, ScheduleError> {
    const SCAN: u128 = 4096;
    let mut out = Vec::with_capacity(levels);
    let mut s: u128 = 0;
    for level in 0..levels {
        let fs1 = f(s) + 1u32;
        let ok = |n: u128| f(s + n) >= BigUint::from(s + n + 1) * &fs1;
        let n = match (1..=SCAN).find(|&n| ok(n)) {
            Some(n) => n,
            None => {
                let mut hi = SCAN * 2;
                while !ok(hi) {
                    if hi >= SCHEDULE_CUTOFF {
                        return Err(ScheduleError::NotFound { level });
                    }
                    hi *= 2;
                }
                let mut lo = hi / 2;
                while hi - lo > 1 {
                    let mid = lo + (hi - lo) / 2;
                    if ok(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        };
        let n = u64::try_from(n).map_err(|_| ScheduleError::NotFound { level })?;
        out.push(n);
        s += n as u128;
    }
    Ok(Schedule(out))
}

/// Checks `f(A_0 + … + A_{n-1}) ≥ alpha_n` for every level the schedule covers.
pub fn schedule_meets_bound(f: &dyn Fn(u128) -> BigUint, schedule: &Schedule) -> bool {
    let mut sched = schedule.0.clone();
    // alpha_n only depends on A_0..A_{n-1}; pad so alpha_{len} is produced
    sched.push(1);
    let (alpha, _) = block_game(&sched);
    let mut s: u128 = 0;
    for (n, a) in alpha.iter().enumerate() {
        if f(s) < *a {
            return false;
        }
        if let Some(&x) = schedule.0.get(n) {
            s += x as u128;
        }
    }
    true
}

/// `F_n` with `F_0 = 0`, `F_1 = 1`.
pub fn fibonacci(n: u64) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..n {
        let c = &a + &b;
        a = std::mem::replace(&mut b, c);
    }
    a
}

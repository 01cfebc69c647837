//! Turing machines over a binary tape, and the Ackermann reference function.

use crate::ips::Ast;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Write { bit: bool, mv: Move, next: usize },
    Stop,
}

/// One action per (state, read bit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmProgram {
    transitions: Vec<[Action; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TmError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no action for state {state} reading {bit}")]
    Missing { state: usize, bit: u8 },
    #[error("state {0} out of range")]
    BadState(usize),
    #[error("arguments out of the guarded range m <= 3, n <= 10")]
    RangeExceeded,
}

impl TmProgram {
    pub fn new(transitions: Vec<[Action; 2]>) -> Result<TmProgram, TmError> {
        let count = transitions.len();
        for row in &transitions {
            for a in row {
                if let Action::Write { next, .. } = a {
                    if *next >= count {
                        return Err(TmError::BadState(*next));
                    }
                }
            }
        }
        Ok(TmProgram { transitions })
    }

    pub fn states(&self) -> usize {
        self.transitions.len()
    }

    pub fn action(&self, state: usize, bit: bool) -> Action {
        self.transitions[state][bit as usize]
    }

    /// Lines of the form `s b -> W m s'` or `s b -> STOP`; `#` starts a comment.
    pub fn parse(src: &str) -> Result<TmProgram, TmError> {
        let mut entries: Vec<(usize, usize, Action)> = Vec::new();
        for (idx, raw) in src.lines().enumerate() {
            let line = idx + 1;
            let text = raw.split('#').next().unwrap().trim();
            if text.is_empty() {
                continue;
            }
            let err = |msg: &str| TmError::Parse { line, msg: msg.to_string() };
            let (lhs, rhs) = text.split_once("->").ok_or_else(|| err("missing '->'"))?;
            let lhs: Vec<&str> = lhs.split_whitespace().collect();
            let rhs: Vec<&str> = rhs.split_whitespace().collect();
            if lhs.len() != 2 {
                return Err(err("expected 'state bit'"));
            }
            let state: usize = lhs[0].parse().map_err(|_| err("bad state"))?;
            let bit = parse_bit(lhs[1]).ok_or_else(|| err("bad bit"))?;
            let action = match rhs.as_slice() {
                ["STOP"] => Action::Stop,
                [w, m, s] => Action::Write {
                    bit: parse_bit(w).ok_or_else(|| err("bad written bit"))? == 1,
                    mv: match *m {
                        "L" => Move::Left,
                        "R" => Move::Right,
                        _ => return Err(err("move must be L or R")),
                    },
                    next: s.parse().map_err(|_| err("bad next state"))?,
                },
                _ => return Err(err("expected 'W m s' or 'STOP'")),
            };
            if entries.iter().any(|e| e.0 == state && e.1 == bit) {
                return Err(err("duplicate (state, bit)"));
            }
            entries.push((state, bit, action));
        }
        let count = entries.iter().map(|e| e.0 + 1).max().unwrap_or(0);
        let mut rows: Vec<[Option<Action>; 2]> = vec![[None, None]; count];
        for (s, b, a) in entries {
            rows[s][b] = Some(a);
        }
        let mut transitions = Vec::with_capacity(count);
        for (state, row) in rows.into_iter().enumerate() {
            let get = |bit: usize| row[bit].ok_or(TmError::Missing { state, bit: bit as u8 });
            transitions.push([get(0)?, get(1)?]);
        }
        TmProgram::new(transitions)
    }
}

fn parse_bit(s: &str) -> Option<usize> {
    match s {
        "0" => Some(0),
        "1" => Some(1),
        _ => None,
    }
}

impl fmt::Display for TmProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, row) in self.transitions.iter().enumerate() {
            for (b, a) in row.iter().enumerate() {
                match a {
                    Action::Stop => writeln!(f, "{s} {b} -> STOP")?,
                    Action::Write { bit, mv, next } => {
                        let m = if *mv == Move::Left { "L" } else { "R" };
                        writeln!(f, "{s} {b} -> {} {m} {next}", *bit as u8)?
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmConfiguration {
    /// Positions holding a 1.
    pub ones: BTreeSet<i64>,
    pub head: i64,
    pub state: usize,
    pub halted: bool,
}

impl TmConfiguration {
    /// `n` ones at positions `1..=n`, head at 0, state 0.
    pub fn initial(n: u64) -> TmConfiguration {
        TmConfiguration {
            ones: (1..=n as i64).collect(),
            head: 0,
            state: 0,
            halted: false,
        }
    }

    pub fn read(&self) -> bool {
        self.ones.contains(&self.head)
    }

    /// Performs one action; returns false once halted.
    pub fn step(&mut self, p: &TmProgram) -> bool {
        if self.halted {
            return false;
        }
        match p.action(self.state, self.read()) {
            Action::Stop => {
                self.halted = true;
                false
            }
            Action::Write { bit, mv, next } => {
                if bit {
                    self.ones.insert(self.head);
                } else {
                    self.ones.remove(&self.head);
                }
                self.head += if mv == Move::Left { -1 } else { 1 };
                self.state = next;
                true
            }
        }
    }

    /// The run of 1s starting just right of the head, provided every other
    /// cell except the head cell is 0.
    pub fn output(&self) -> Option<u64> {
        let mut m = 0;
        while self.ones.contains(&(self.head + 1 + m as i64)) {
            m += 1;
        }
        let stray = self
            .ones
            .iter()
            .any(|&p| p != self.head && !(self.head < p && p <= self.head + m as i64));
        (!stray).then_some(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TmOutcome {
    Halted { output: u64, steps: u64 },
    /// Halted, but the tape is not of the form required for an output.
    Malformed { steps: u64 },
    OutOfFuel,
}

/// Runs `p` on input `n` for at most `fuel` actions. Stopping counts as a step.
pub fn tm_run(p: &TmProgram, n: u64, fuel: u64) -> TmOutcome {
    let mut c = TmConfiguration::initial(n);
    if p.states() == 0 {
        return TmOutcome::Halted { output: n, steps: 0 };
    }
    for steps in 1..=fuel {
        if !c.step(p) {
            return match c.output() {
                Some(output) => TmOutcome::Halted { output, steps },
                None => TmOutcome::Malformed { steps },
            };
        }
    }
    TmOutcome::OutOfFuel
}

/// Ackermann's function on the guarded range `m <= 3`, `n <= 10`.
pub fn ackermann(m: u64, n: u64) -> Result<u64, TmError> {
    if m > 3 || n > 10 {
        return Err(TmError::RangeExceeded);
    }
    let mut stack = vec![m];
    let mut n = n;
    while let Some(m) = stack.pop() {
        if m == 0 {
            n += 1;
        } else if n == 0 {
            stack.push(m - 1);
            n = 1;
        } else {
            stack.push(m - 1);
            stack.push(m);
            n -= 1;
        }
    }
    Ok(n)
}

/// True iff the program uses neither minimisation, oracle queries nor the
/// universal function.
pub fn is_primitive_recursive(p: &Ast) -> bool {
    !p.any_node(&|n| matches!(n, Ast::Mu(_) | Ast::OracleQuery | Ast::Univ))
}

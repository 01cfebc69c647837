//! S-expression syntax for programs.

use super::Ast;
use crate::coding::Nat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at offset {pos}: {msg}")]
pub struct SexprError {
    pub pos: usize,
    pub msg: String,
}

/// Parses `(zero)`, `(succ)`, `(proj k i)`, `(comp h g1 .. gk)`,
/// `(primrec g)`, `(mu g)`, `(oracle)` and the native forms `(const c)`,
/// `(univ)`, `(pair)`, `(left)`, `(right)`, `(eq)`, `(cond)`, `(clock)`,
/// `(while g h)`.
pub fn parse_program(src: &str) -> Result<Ast, SexprError> {
    let mut p = P { src: src.as_bytes(), pos: 0 };
    let ast = p.node()?;
    p.ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(ast)
}

struct P<'a> {
    src: &'a [u8],
    pos: usize,
}

impl P<'_> {
    fn err(&self, msg: impl Into<String>) -> SexprError {
        SexprError { pos: self.pos, msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), SexprError> {
        self.ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn word(&mut self) -> Result<String, SexprError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a word"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<Nat, SexprError> {
        let at = self.pos;
        let w = self.word()?;
        w.parse::<Nat>()
            .map_err(|_| SexprError { pos: at, msg: format!("expected a number, got {w:?}") })
    }

    fn small(&mut self) -> Result<u64, SexprError> {
        let at = self.pos;
        self.number()?
            .to_u64()
            .ok_or(SexprError { pos: at, msg: "number too large".into() })
    }

    fn peek_close(&mut self) -> bool {
        self.ws();
        self.src.get(self.pos) == Some(&b')')
    }

    fn node(&mut self) -> Result<Ast, SexprError> {
        self.expect(b'(')?;
        let at = self.pos;
        let head = self.word()?;
        let ast = match head.as_str() {
            "zero" => Ast::Zero,
            "succ" => Ast::Succ,
            "oracle" => Ast::OracleQuery,
            "univ" => Ast::Univ,
            "pair" => Ast::Pair,
            "left" => Ast::Left,
            "right" => Ast::Right,
            "eq" => Ast::Eq,
            "cond" => Ast::Cond,
            "clock" => Ast::Clock,
            "const" => Ast::Const(self.number()?),
            "proj" => {
                let k = self.small()?;
                let i = self.small()?;
                if i == 0 || i > k {
                    return Err(SexprError { pos: at, msg: format!("projection index {i} outside 1..{k}") });
                }
                Ast::Proj(k, i)
            }
            "comp" => {
                let h = self.node()?;
                let mut gs = Vec::new();
                while !self.peek_close() {
                    gs.push(self.node()?);
                }
                Ast::Comp(Box::new(h), gs)
            }
            "primrec" => Ast::PrimRec(Box::new(self.node()?)),
            "mu" => Ast::Mu(Box::new(self.node()?)),
            "while" => {
                let g = self.node()?;
                let h = self.node()?;
                Ast::While(Box::new(g), Box::new(h))
            }
            other => return Err(SexprError { pos: at, msg: format!("unknown form {other:?}") }),
        };
        self.expect(b')')?;
        Ok(ast)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{add, divergent, mul, pred};
    use super::*;

    #[test]
    fn roundtrip() {
        for p in [add(), mul(), pred(), divergent(), Ast::Const(Nat::from(12345u64))] {
            assert_eq!(parse_program(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn errors() {
        assert!(parse_program("(succ").is_err());
        assert!(parse_program("(proj 1 2)").is_err());
        assert!(parse_program("(frob)").is_err());
        assert!(parse_program("(succ) x").is_err());
        let e = parse_program("(comp (succ) (bogus))").unwrap_err();
        assert_eq!(e.pos, 14);
    }
}

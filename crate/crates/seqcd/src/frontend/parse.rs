//! Parser for `.lmtm` source files: named commands over the
//! lambda-mu-mu-tilde grammar, with non-recursive `def` macros.

use super::*;
use crate::surface::lex::{lex, Tok};
use crate::surface::ParseError;

pub struct LmtmProgram {
    pub commands: Vec<(Name, LCommand)>,
}

struct P {
    toks: Vec<crate::surface::lex::Spanned>,
    pos: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn err<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map(|t| (t.loc.line, t.loc.col))
            .unwrap_or((0, 0));
        Err(ParseError {
            line,
            col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self
                .peek()
                .map(|t| format!("`{t}`"))
                .unwrap_or_else(|| "end of input".into()),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(&[what])
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if let Some(Tok::Ident(s)) = self.peek() {
            if s == kw {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn ident(&mut self, what: &str) -> Result<Name, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s))
                if !["mu", "mut", "case", "inl", "inr", "def", "cmd"].contains(&s.as_str()) =>
            {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(&[what]),
        }
    }

    fn command(&mut self) -> Result<LCommand, ParseError> {
        self.expect(Tok::Lt, "`<`")?;
        let term = self.term()?;
        self.expect(Tok::Pipe, "`|`")?;
        let coterm = self.coterm()?;
        self.expect(Tok::Gt, "`>`")?;
        Ok(LCommand::new(term, coterm))
    }

    fn term(&mut self) -> Result<LTerm, ParseError> {
        if self.keyword("mu") {
            let a = self.ident("a covariable")?;
            self.expect(Tok::Dot, "`.`")?;
            let c = self.command()?;
            return Ok(LTerm::Mu(a, Box::new(c)));
        }
        if self.eat(&Tok::Backslash) {
            self.expect(Tok::LParen, "`(`")?;
            let x = self.ident("a variable")?;
            self.expect(Tok::Comma, "`,`")?;
            let a = self.ident("a covariable")?;
            self.expect(Tok::RParen, "`)`")?;
            self.expect(Tok::Dot, "`.`")?;
            let c = self.command()?;
            return Ok(LTerm::Lam(x, a, Box::new(c)));
        }
        if self.keyword("inl") {
            return Ok(LTerm::Inl(Box::new(self.atom()?)));
        }
        if self.keyword("inr") {
            return Ok(LTerm::Inr(Box::new(self.atom()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<LTerm, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(LTerm::Num(n))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Tok::Ident(_)) => Ok(LTerm::Var(self.ident("a variable")?)),
            _ => self.err(&["a term"]),
        }
    }

    fn coterm(&mut self) -> Result<LCoTerm, ParseError> {
        if self.keyword("mut") {
            let x = self.ident("a variable")?;
            self.expect(Tok::Dot, "`.`")?;
            let c = self.command()?;
            return Ok(LCoTerm::MuTilde(x, Box::new(c)));
        }
        if self.keyword("case") {
            self.expect(Tok::LBrace, "`{`")?;
            if !self.keyword("inl") {
                return self.err(&["`inl`"]);
            }
            let xl = self.ident("a variable")?;
            self.expect(Tok::FatArrow, "`=>`")?;
            let cl = self.command()?;
            self.expect(Tok::Pipe, "`|`")?;
            if !self.keyword("inr") {
                return self.err(&["`inr`"]);
            }
            let xr = self.ident("a variable")?;
            self.expect(Tok::FatArrow, "`=>`")?;
            let cr = self.command()?;
            self.expect(Tok::RBrace, "`}`")?;
            return Ok(LCoTerm::Case {
                left: (xl, Box::new(cl)),
                right: (xr, Box::new(cr)),
            });
        }
        // Either a stack `atom . coterm`, a bare covariable, or a
        // parenthesized coterm.
        let snap = self.pos;
        if let Ok(head) = self.atom() {
            if self.eat(&Tok::Dot) {
                let rest = self.coterm()?;
                return Ok(LCoTerm::Stack(Box::new(head), Box::new(rest)));
            }
            if let LTerm::Var(a) = head {
                return Ok(LCoTerm::CoVar(a));
            }
        }
        self.pos = snap;
        if self.eat(&Tok::LParen) {
            let e = self.coterm()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(e);
        }
        self.err(&["a coterm"])
    }
}

/// Parse a single command (for tests).
pub fn parse_lcommand(src: &str) -> Result<LCommand, ParseError> {
    let toks = lex(src).map_err(|e| ParseError {
        line: e.loc.line,
        col: e.loc.col,
        expected: vec!["a token".into()],
        found: e.msg,
    })?;
    let mut p = P { toks, pos: 0 };
    let c = p.command()?;
    if p.peek().is_some() {
        return p.err(&["end of input"]);
    }
    Ok(c)
}

/// Parse a whole `.lmtm` program: `def name = term ;` macros (inlined in
/// order, non-recursive) and `cmd name = < ... > ;` entries.
pub fn parse_lmtm_program(src: &str) -> Result<LmtmProgram, ParseError> {
    let toks = lex(src).map_err(|e| ParseError {
        line: e.loc.line,
        col: e.loc.col,
        expected: vec!["a token".into()],
        found: e.msg,
    })?;
    let mut p = P { toks, pos: 0 };
    let mut defs: Vec<(Name, LTerm)> = Vec::new();
    let mut commands = Vec::new();
    while p.peek().is_some() {
        if p.keyword("def") {
            let name = p.ident("a definition name")?;
            p.expect(Tok::Eq, "`=`")?;
            let body = p.term()?;
            p.expect(Tok::Semi, "`;`")?;
            let rho = LSubst {
                terms: defs.clone(),
                coterms: vec![],
            };
            defs.push((name, lsubst_term(&body, &rho)));
        } else if p.keyword("cmd") {
            let name = p.ident("a command name")?;
            p.expect(Tok::Eq, "`=`")?;
            let body = p.command()?;
            p.expect(Tok::Semi, "`;`")?;
            let rho = LSubst {
                terms: defs.clone(),
                coterms: vec![],
            };
            commands.push((name, lsubst_command(&body, &rho)));
        } else {
            return p.err(&["`def`", "`cmd`"]);
        }
    }
    Ok(LmtmProgram { commands })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stacks_are_right_associated() {
        let c = parse_lcommand("< f | g . 5 . alpha >").unwrap();
        match &c.coterm {
            LCoTerm::Stack(h, rest) => {
                assert!(matches!(**h, LTerm::Var(ref x) if x == "g"));
                match &**rest {
                    LCoTerm::Stack(h2, rest2) => {
                        assert!(matches!(**h2, LTerm::Num(5)));
                        assert!(matches!(**rest2, LCoTerm::CoVar(ref a) if a == "alpha"));
                    }
                    other => panic!("expected inner stack, got {other:?}"),
                }
            }
            other => panic!("expected stack, got {other:?}"),
        }
    }

    #[test]
    fn defs_inline_in_order() {
        let prog = parse_lmtm_program(
            "def id = \\(x, a). < x | a > ; cmd main = < id | 5 . out > ;",
        )
        .unwrap();
        let (_, c) = &prog.commands[0];
        assert!(matches!(c.term, LTerm::Lam(..)));
    }
}

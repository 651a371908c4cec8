//! Recursive-descent parser for `.cd` programs.
//!
//! Identifiers are resolved against the connective/xtor tables built from
//! the declarations seen so far (core names are preloaded), so `Inl(x)`
//! parses as a construction while `f` parses as a variable.

use super::lex::{lex, Loc, Spanned, Tok};
use super::{CommandEntry, Definition, DefinitionBody, Program};
use crate::kinds::SignatureTable;
use crate::syntax::*;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at {}:{}: expected {}, found {}",
            self.line,
            self.col,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

const KEYWORDS: &[&str] = &[
    "data", "codata", "where", "def", "codef", "cmd", "mu", "mut", "case", "cocase", "forall",
    "exists",
];

pub struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_loc: Loc,
    connectives: BTreeSet<Name>,
    ctors: BTreeSet<Name>,
    dtors: BTreeSet<Name>,
}

impl Parser {
    pub fn new(src: &str) -> Result<Parser, ParseError> {
        let toks = lex(src).map_err(|e| ParseError {
            line: e.loc.line,
            col: e.loc.col,
            expected: vec!["a token".into()],
            found: e.msg,
        })?;
        let end = toks.last().map(|t| t.loc).unwrap_or(Loc {
            offset: 0,
            line: 1,
            col: 1,
        });
        let sig = SignatureTable::core();
        let mut connectives = BTreeSet::new();
        let mut ctors = BTreeSet::new();
        let mut dtors = BTreeSet::new();
        for d in sig.all_decls() {
            connectives.insert(d.name.clone());
            for x in &d.xtors {
                match d.polarity {
                    Polarity::Data => ctors.insert(x.name.clone()),
                    Polarity::Codata => dtors.insert(x.name.clone()),
                };
            }
        }
        Ok(Parser {
            toks,
            pos: 0,
            end_loc: end,
            connectives,
            ctors,
            dtors,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn loc(&self) -> Loc {
        self.toks.get(self.pos).map(|t| t.loc).unwrap_or(self.end_loc)
    }

    fn err<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let l = self.loc();
        Err(ParseError {
            line: l.line,
            col: l.col,
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

    fn ident(&mut self, what: &str) -> Result<Name, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(&[what]),
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

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    pub fn discipline(&mut self) -> Result<Discipline, ParseError> {
        if let Some(Tok::Ident(s)) = self.peek() {
            if let Some(d) = Discipline::from_token(s) {
                self.pos += 1;
                return Ok(d);
            }
        }
        self.err(&["a discipline (v, n, need, coneed)"])
    }

    pub fn kind(&mut self) -> Result<Kind, ParseError> {
        let lhs = if self.eat(&Tok::LParen) {
            let k = self.kind()?;
            self.expect(Tok::RParen, "`)`")?;
            k
        } else {
            Kind::Disc(self.discipline()?)
        };
        if self.eat(&Tok::Arrow) {
            let rhs = self.kind()?;
            Ok(Kind::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    // ---------------------------------------------------------------- types

    pub fn type_expr(&mut self) -> Result<TypeExpr, ParseError> {
        if self.eat(&Tok::Backslash) {
            let x = self.ident("a type variable")?;
            self.expect(Tok::Colon, "`:`")?;
            let k = self.kind()?;
            self.expect(Tok::Dot, "`.`")?;
            let body = self.type_expr()?;
            return Ok(TypeExpr::lam(x, k, body));
        }
        if self.peek_keyword("forall") || self.peek_keyword("exists") {
            let is_forall = self.peek_keyword("forall");
            self.pos += 1;
            let x = self.ident("a type variable")?;
            self.expect(Tok::Colon, "`:`")?;
            let s = self.discipline()?;
            self.expect(Tok::Dot, "`.`")?;
            let body = self.type_expr()?;
            let head = if is_forall {
                crate::kinds::names::forall(s)
            } else {
                crate::kinds::names::exists(s)
            };
            return Ok(TypeExpr::app(
                TypeExpr::con(head),
                TypeExpr::lam(x, Kind::Disc(s), body),
            ));
        }
        let lhs = self.type_app()?;
        let infix = match self.peek() {
            Some(Tok::InfixSum) => Some(crate::kinds::names::SUM),
            Some(Tok::InfixProd) => Some(crate::kinds::names::PROD),
            Some(Tok::InfixWith) => Some(crate::kinds::names::WITH),
            Some(Tok::InfixPar) => Some(crate::kinds::names::PAR),
            _ => None,
        };
        if let Some(con) = infix {
            self.pos += 1;
            let rhs = self.type_expr()?;
            return Ok(TypeExpr::apply(TypeExpr::con(con), [lhs, rhs]));
        }
        Ok(lhs)
    }

    fn type_app(&mut self) -> Result<TypeExpr, ParseError> {
        let mut head = self.type_atom()?;
        while self.type_atom_ahead() {
            let a = self.type_atom()?;
            head = TypeExpr::app(head, a);
        }
        Ok(head)
    }

    fn type_atom_ahead(&self) -> bool {
        match self.peek() {
            Some(Tok::LParen) => !matches!(
                self.peek2(),
                Some(Tok::RParen) // unit-ish, not a type
            ),
            Some(Tok::Ident(s)) => !KEYWORDS.contains(&s.as_str()) || s == "forall" || s == "exists",
            Some(Tok::Backslash) => true,
            _ => false,
        }
    }

    fn type_atom(&mut self) -> Result<TypeExpr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.type_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Tok::Backslash) | Some(Tok::Ident(_))
                if matches!(self.peek(), Some(Tok::Backslash))
                    || self.peek_keyword("forall")
                    || self.peek_keyword("exists") =>
            {
                self.type_expr()
            }
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                self.pos += 1;
                if self.connectives.contains(&s) {
                    Ok(TypeExpr::con(s))
                } else {
                    Ok(TypeExpr::var(s))
                }
            }
            _ => self.err(&["a type"]),
        }
    }

    fn type_or_wild(&mut self) -> Result<Option<TypeExpr>, ParseError> {
        if self.eat(&Tok::Underscore) {
            Ok(None)
        } else {
            Ok(Some(self.type_expr()?))
        }
    }

    // ------------------------------------------------------------- commands

    pub fn command(&mut self) -> Result<Command, ParseError> {
        let start = self.loc().offset;
        self.expect(Tok::Lt, "`<`")?;
        let term = self.term()?;
        self.expect(Tok::Pipe, "`|`")?;
        let annotation = self.type_or_wild()?;
        self.expect(Tok::Colon, "`:`")?;
        let discipline = self.discipline()?;
        self.expect(Tok::Pipe, "`|`")?;
        let coterm = self.coterm()?;
        let end = self.loc();
        self.expect(Tok::Gt, "`>`")?;
        let mut c = Command::new(term, annotation, discipline, coterm);
        c.span = Some(Span {
            lo: start,
            hi: end.offset + 1,
        });
        Ok(c)
    }

    pub fn term(&mut self) -> Result<Term, ParseError> {
        if self.keyword("mu") {
            let a = self.ident("a covariable")?;
            self.expect(Tok::Dot, "`.`")?;
            let c = self.command()?;
            return Ok(Term::mu(a, c));
        }
        if self.keyword("cocase") {
            self.expect(Tok::LBrace, "`{`")?;
            let mut branches = Vec::new();
            if !self.eat(&Tok::RBrace) {
                loop {
                    let q = self.copattern()?;
                    self.expect(Tok::FatArrow, "`=>`")?;
                    let c = self.command()?;
                    branches.push((q, c));
                    if self.eat(&Tok::Pipe) {
                        continue;
                    }
                    self.expect(Tok::RBrace, "`}`")?;
                    break;
                }
            }
            return Ok(Term::CoCase(branches));
        }
        if self.eat(&Tok::LParen) {
            let t = self.term()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(t);
        }
        let name = self.ident("a term")?;
        if self.ctors.contains(&name) {
            let (ty_args, co_args, args) = self.ctor_groups()?;
            Ok(Term::Construct {
                ctor: name,
                ty_args,
                co_args,
                args,
            })
        } else {
            Ok(Term::Var(name))
        }
    }

    pub fn coterm(&mut self) -> Result<CoTerm, ParseError> {
        if self.keyword("mut") {
            let x = self.ident("a variable")?;
            self.expect(Tok::Dot, "`.`")?;
            let c = self.command()?;
            return Ok(CoTerm::mu_tilde(x, c));
        }
        if self.keyword("case") {
            self.expect(Tok::LBrace, "`{`")?;
            let mut branches = Vec::new();
            if !self.eat(&Tok::RBrace) {
                loop {
                    let p = self.pattern()?;
                    self.expect(Tok::FatArrow, "`=>`")?;
                    let c = self.command()?;
                    branches.push((p, c));
                    if self.eat(&Tok::Pipe) {
                        continue;
                    }
                    self.expect(Tok::RBrace, "`}`")?;
                    break;
                }
            }
            return Ok(CoTerm::Case(branches));
        }
        if self.eat(&Tok::LParen) {
            let e = self.coterm()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(e);
        }
        let name = self.ident("a coterm")?;
        if self.dtors.contains(&name) {
            let (ty_args, args, co_args) = self.dtor_groups()?;
            Ok(CoTerm::Destruct {
                dtor: name,
                ty_args,
                args,
                co_args,
            })
        } else {
            Ok(CoTerm::CoVar(name))
        }
    }

    /// `{T,..} [e,..] (v,..)` with empty groups omitted.
    #[allow(clippy::type_complexity)]
    fn ctor_groups(&mut self) -> Result<(Vec<TypeExpr>, Vec<CoTerm>, Vec<Term>), ParseError> {
        let ty_args = self.ty_group()?;
        let mut co_args = Vec::new();
        if self.eat(&Tok::LBracket)
            && !self.eat(&Tok::RBracket) {
                loop {
                    co_args.push(self.coterm()?);
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    self.expect(Tok::RBracket, "`]`")?;
                    break;
                }
            }
        let mut args = Vec::new();
        if self.eat(&Tok::LParen)
            && !self.eat(&Tok::RParen) {
                loop {
                    args.push(self.term()?);
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    break;
                }
            }
        Ok((ty_args, co_args, args))
    }

    /// `{T,..} (v,..) [e,..]` with empty groups omitted.
    #[allow(clippy::type_complexity)]
    fn dtor_groups(&mut self) -> Result<(Vec<TypeExpr>, Vec<Term>, Vec<CoTerm>), ParseError> {
        let ty_args = self.ty_group()?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen)
            && !self.eat(&Tok::RParen) {
                loop {
                    args.push(self.term()?);
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    break;
                }
            }
        let mut co_args = Vec::new();
        if self.eat(&Tok::LBracket)
            && !self.eat(&Tok::RBracket) {
                loop {
                    co_args.push(self.coterm()?);
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    self.expect(Tok::RBracket, "`]`")?;
                    break;
                }
            }
        Ok((ty_args, args, co_args))
    }

    fn ty_group(&mut self) -> Result<Vec<TypeExpr>, ParseError> {
        let mut tys = Vec::new();
        if self.eat(&Tok::LBrace)
            && !self.eat(&Tok::RBrace) {
                loop {
                    tys.push(self.type_expr()?);
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    self.expect(Tok::RBrace, "`}`")?;
                    break;
                }
            }
        Ok(tys)
    }

    fn ident_group(&mut self, open: Tok, close: Tok, what: &str) -> Result<Vec<Name>, ParseError> {
        let mut names = Vec::new();
        if self.eat(&open)
            && !self.eat(&close) {
                loop {
                    names.push(self.ident(what)?);
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    self.expect(close, "closing delimiter")?;
                    break;
                }
            }
        Ok(names)
    }

    pub fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let ctor = self.ident("a constructor pattern")?;
        let ty_vars = self.ident_group(Tok::LBrace, Tok::RBrace, "a type variable")?;
        let co_vars = self.ident_group(Tok::LBracket, Tok::RBracket, "a covariable")?;
        let vars = self.ident_group(Tok::LParen, Tok::RParen, "a variable")?;
        Ok(Pattern {
            ctor,
            ty_vars,
            co_vars,
            vars,
        })
    }

    pub fn copattern(&mut self) -> Result<CoPattern, ParseError> {
        let dtor = self.ident("a destructor copattern")?;
        let ty_vars = self.ident_group(Tok::LBrace, Tok::RBrace, "a type variable")?;
        let vars = self.ident_group(Tok::LParen, Tok::RParen, "a variable")?;
        let co_vars = self.ident_group(Tok::LBracket, Tok::RBracket, "a covariable")?;
        Ok(CoPattern {
            dtor,
            ty_vars,
            vars,
            co_vars,
        })
    }

    // ----------------------------------------------------------------- items

    pub fn program(&mut self) -> Result<Program, ParseError> {
        let mut prog = Program::default();
        while self.peek().is_some() {
            if self.peek_keyword("data") || self.peek_keyword("codata") {
                let d = self.declaration()?;
                self.register_decl(&d);
                prog.declarations.push(d);
            } else if self.keyword("def") {
                let (name, ty, disc) = self.def_header()?;
                let body = self.term()?;
                self.expect(Tok::Semi, "`;`")?;
                prog.definitions.push(Definition {
                    name,
                    ty,
                    discipline: disc,
                    body: DefinitionBody::Producer(body),
                });
            } else if self.keyword("codef") {
                let (name, ty, disc) = self.def_header()?;
                let body = self.coterm()?;
                self.expect(Tok::Semi, "`;`")?;
                prog.definitions.push(Definition {
                    name,
                    ty,
                    discipline: disc,
                    body: DefinitionBody::Consumer(body),
                });
            } else if self.keyword("cmd") {
                let name = self.ident("a command name")?;
                let (gamma, delta) = if matches!(self.peek(), Some(Tok::LParen)) {
                    self.context()?
                } else {
                    (Vec::new(), Vec::new())
                };
                self.expect(Tok::Eq, "`=`")?;
                let body = self.command()?;
                self.expect(Tok::Semi, "`;`")?;
                prog.commands.push(CommandEntry {
                    name,
                    gamma,
                    delta,
                    body,
                });
            } else {
                return self.err(&["`data`", "`codata`", "`def`", "`codef`", "`cmd`"]);
            }
        }
        Ok(prog)
    }

    fn register_decl(&mut self, d: &Declaration) {
        self.connectives.insert(d.name.clone());
        for x in &d.xtors {
            match d.polarity {
                Polarity::Data => self.ctors.insert(x.name.clone()),
                Polarity::Codata => self.dtors.insert(x.name.clone()),
            };
        }
    }

    fn def_header(&mut self) -> Result<(Name, Option<TypeExpr>, Discipline), ParseError> {
        let name = self.ident("a definition name")?;
        self.expect(Tok::Colon, "`:`")?;
        let ty = self.type_or_wild()?;
        self.expect(Tok::Colon, "`:`")?;
        let disc = self.discipline()?;
        self.expect(Tok::Eq, "`=`")?;
        Ok((name, ty, disc))
    }

    #[allow(clippy::type_complexity)]
    fn context(
        &mut self,
    ) -> Result<
        (
            Vec<(Name, Option<TypeExpr>, Discipline)>,
            Vec<(Name, Option<TypeExpr>, Discipline)>,
        ),
        ParseError,
    > {
        self.expect(Tok::LParen, "`(`")?;
        let mut gamma = Vec::new();
        let mut delta = Vec::new();
        if !self.eat(&Tok::Turnstile) {
            loop {
                if self.eat(&Tok::Turnstile) {
                    break;
                }
                gamma.push(self.binding()?);
                if self.eat(&Tok::Comma) {
                    continue;
                }
                self.expect(Tok::Turnstile, "`|-`")?;
                break;
            }
        }
        if !self.eat(&Tok::RParen) {
            loop {
                delta.push(self.binding()?);
                if self.eat(&Tok::Comma) {
                    continue;
                }
                self.expect(Tok::RParen, "`)`")?;
                break;
            }
        }
        Ok((gamma, delta))
    }

    fn binding(&mut self) -> Result<(Name, Option<TypeExpr>, Discipline), ParseError> {
        let n = self.ident("a (co)variable")?;
        self.expect(Tok::Colon, "`:`")?;
        let ty = self.type_or_wild()?;
        self.expect(Tok::Colon, "`:`")?;
        let d = self.discipline()?;
        Ok((n, ty, d))
    }

    pub fn declaration(&mut self) -> Result<Declaration, ParseError> {
        let polarity = if self.keyword("data") {
            Polarity::Data
        } else if self.keyword("codata") {
            Polarity::Codata
        } else {
            return self.err(&["`data`", "`codata`"]);
        };
        let name = self.ident("a connective name")?;
        let mut params = Vec::new();
        while self.eat(&Tok::LParen) {
            let p = self.ident("a type parameter")?;
            self.expect(Tok::Colon, "`:`")?;
            let k = self.kind()?;
            self.expect(Tok::RParen, "`)`")?;
            params.push((p, k));
        }
        self.expect(Tok::Colon, "`:`")?;
        let result = self.discipline()?;
        if !self.keyword("where") {
            return self.err(&["`where`"]);
        }
        let mut xtors = Vec::new();
        while let Some(Tok::Ident(s)) = self.peek() {
            if KEYWORDS.contains(&s.as_str()) {
                break;
            }
            let xname = self.ident("an xtor name")?;
            self.expect(Tok::Colon, "`:`")?;
            let mut quantified = Vec::new();
            while self.eat(&Tok::LBracket) {
                let y = self.ident("a quantified type variable")?;
                self.expect(Tok::Colon, "`:`")?;
                let s = self.discipline()?;
                self.expect(Tok::RBracket, "`]`")?;
                quantified.push((y, s));
            }
            let first = self.decl_ty_list()?;
            let (term_tys, co_tys) = match polarity {
                Polarity::Data => {
                    self.expect(Tok::Turnstile, "`|-`")?;
                    let co = self.decl_ty_list()?;
                    (first, co)
                }
                Polarity::Codata => {
                    self.expect(Tok::CoTurnstile, "`-|`")?;
                    let co = self.decl_ty_list()?;
                    (first, co)
                }
            };
            self.expect(Tok::Semi, "`;`")?;
            // The per-component disciplines are recomputed by check_decl;
            // parse with a placeholder discipline resolved at elaboration.
            xtors.push(XtorSig {
                name: xname,
                quantified,
                term_inputs: term_tys.into_iter().map(|t| (t, Discipline::Cbv)).collect(),
                co_inputs: co_tys.into_iter().map(|t| (t, Discipline::Cbv)).collect(),
            });
        }
        Ok(Declaration {
            polarity,
            name,
            params,
            result,
            xtors,
        })
    }

    fn decl_ty_list(&mut self) -> Result<Vec<TypeExpr>, ParseError> {
        let mut tys = Vec::new();
        if self.eat(&Tok::LParen)
            && !self.eat(&Tok::RParen) {
                loop {
                    tys.push(self.type_expr()?);
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    break;
                }
            }
        Ok(tys)
    }
}

/// Parse a whole `.cd` program.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    p.program()
}

/// Parse a single command against the core signature plus the given
/// declarations (used by tests and trace round-trips).
pub fn parse_command_with(src: &str, decls: &[Declaration]) -> Result<Command, ParseError> {
    let mut p = Parser::new(src)?;
    for d in decls {
        p.register_decl(d);
    }
    let c = p.command()?;
    if p.peek().is_some() {
        return p.err(&["end of input"]);
    }
    Ok(c)
}

/// Parse a type against the core signature plus the given declarations.
pub fn parse_type_with(src: &str, decls: &[Declaration]) -> Result<TypeExpr, ParseError> {
    let mut p = Parser::new(src)?;
    for d in decls {
        p.register_decl(d);
    }
    let t = p.type_expr()?;
    if p.peek().is_some() {
        return p.err(&["end of input"]);
    }
    Ok(t)
}

//! Concrete syntax: programs, parsing, printing, and elaboration.
//!
//! A `.cd` file is a sequence of declarations, macro definitions, and named
//! entry commands.  Definitions are non-recursive, may refer only to
//! earlier definitions, and are inlined before any checking.

pub mod lex;
pub mod parse;
pub mod print;

pub use parse::{parse_command_with, parse_program, parse_type_with, ParseError};
pub use print::{print_command, print_coterm, print_declaration, print_program, print_term, print_type};

use crate::kinds::{check_decl, kind_of, KindEnv, KindError, SignatureTable};
use crate::syntax::*;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug)]
pub enum DefinitionBody {
    Producer(Term),
    Consumer(CoTerm),
}

#[derive(Clone, Debug)]
pub struct Definition {
    pub name: Name,
    pub ty: Option<TypeExpr>,
    pub discipline: Discipline,
    pub body: DefinitionBody,
}

/// A named entry command with its sequent context.
#[derive(Clone, Debug)]
pub struct CommandEntry {
    pub name: Name,
    pub gamma: Vec<(Name, Option<TypeExpr>, Discipline)>,
    pub delta: Vec<(Name, Option<TypeExpr>, Discipline)>,
    pub body: Command,
}

#[derive(Clone, Debug, Default)]
pub struct Program {
    pub declarations: Vec<Declaration>,
    pub definitions: Vec<Definition>,
    pub commands: Vec<CommandEntry>,
}

/// A program after signature construction and definition inlining.
#[derive(Clone, Debug)]
pub struct ElabProgram {
    pub sig: SignatureTable,
    pub commands: Vec<CommandEntry>,
}

#[derive(Clone, Debug)]
pub struct ElabError {
    pub msg: String,
}

impl fmt::Display for ElabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.msg)
    }
}

impl std::error::Error for ElabError {}

impl From<KindError> for ElabError {
    fn from(e: KindError) -> ElabError {
        ElabError { msg: e.to_string() }
    }
}

/// Fill in the per-component disciplines of a parsed declaration from the
/// kinds of its component types, then check it against the table.
fn resolve_and_check(sig: &SignatureTable, d: &Declaration) -> Result<SignatureTable, ElabError> {
    let mut d = d.clone();
    let mut theta = KindEnv::new();
    for (p, k) in &d.params {
        theta.push(p.clone(), k.clone());
    }
    for x in &mut d.xtors {
        let mut inner = theta.clone();
        for (y, s) in &x.quantified {
            inner.push(y.clone(), Kind::Disc(*s));
        }
        for (ty, disc) in x.term_inputs.iter_mut().chain(x.co_inputs.iter_mut()) {
            match kind_of(&inner, sig, ty)?.as_base() {
                Some(s) => *disc = s,
                None => {
                    return Err(ElabError {
                        msg: format!(
                            "component {} of xtor {} in {} has arrow kind",
                            print::print_type(ty),
                            x.name,
                            d.name
                        ),
                    })
                }
            }
        }
    }
    Ok(check_decl(sig, &d)?)
}

impl Program {
    /// Build the signature table and inline definitions into every entry.
    pub fn elaborate(&self) -> Result<ElabProgram, ElabError> {
        let mut sig = SignatureTable::core();
        let mut names_seen: BTreeSet<Name> = BTreeSet::new();
        for d in &self.declarations {
            sig = resolve_and_check(&sig, d)?;
            names_seen.insert(d.name.clone());
        }
        // Inline definitions in order; each may use only earlier ones.
        let mut term_defs: Vec<(Name, Term)> = Vec::new();
        let mut coterm_defs: Vec<(Name, CoTerm)> = Vec::new();
        for def in &self.definitions {
            if !names_seen.insert(def.name.clone()) {
                return Err(ElabError {
                    msg: format!("duplicate name {}", def.name),
                });
            }
            let rho = Subst {
                types: Vec::new(),
                terms: term_defs.clone(),
                coterms: coterm_defs.clone(),
            };
            match &def.body {
                DefinitionBody::Producer(t) => {
                    let t = subst_term(t, &rho);
                    if free_term(&t).vars.contains(&def.name) {
                        return Err(ElabError {
                            msg: format!("definition {} is recursive", def.name),
                        });
                    }
                    term_defs.push((def.name.clone(), t));
                }
                DefinitionBody::Consumer(e) => {
                    let e = subst_coterm(e, &rho);
                    if free_coterm(&e).covars.contains(&def.name) {
                        return Err(ElabError {
                            msg: format!("definition {} is recursive", def.name),
                        });
                    }
                    coterm_defs.push((def.name.clone(), e));
                }
            }
        }
        let rho = Subst {
            types: Vec::new(),
            terms: term_defs,
            coterms: coterm_defs,
        };
        let mut commands = Vec::new();
        for entry in &self.commands {
            if !names_seen.insert(entry.name.clone()) {
                return Err(ElabError {
                    msg: format!("duplicate name {}", entry.name),
                });
            }
            commands.push(CommandEntry {
                name: entry.name.clone(),
                gamma: entry.gamma.clone(),
                delta: entry.delta.clone(),
                body: subst_command(&entry.body, &rho),
            });
        }
        Ok(ElabProgram { sig, commands })
    }
}

impl ElabProgram {
    pub fn entry(&self, name: &str) -> Option<&CommandEntry> {
        self.commands.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinds::names;

    #[test]
    fn parse_sum_declaration() {
        let src = "data MySum (X : v) (Y : v) : v where Inl2 : (X) |- ; Inr2 : (Y) |- ;";
        let p = parse_program(src).unwrap();
        assert_eq!(p.declarations.len(), 1);
        let d = &p.declarations[0];
        assert_eq!(d.polarity, Polarity::Data);
        assert_eq!(d.xtors.len(), 2);
        let elab = p.elaborate().unwrap();
        assert_eq!(
            elab.sig.connective_kind("MySum"),
            Some(Kind::arrow(
                Kind::Disc(Discipline::Cbv),
                Kind::arrow(Kind::Disc(Discipline::Cbv), Kind::Disc(Discipline::Cbv))
            ))
        );
    }

    #[test]
    fn parse_command_constructors() {
        let src = "< mu a. < x | One : v | a > | A : v | mut x. < x | A : v | b > >";
        let c = parse_command_with(src, &[]).unwrap();
        match &c.term {
            Term::Mu(a, _) => assert_eq!(a, "a"),
            t => panic!("expected mu, got {t:?}"),
        }
        assert_eq!(c.discipline, Discipline::Cbv);
        match &c.coterm {
            CoTerm::MuTilde(x, _) => assert_eq!(x, "x"),
            e => panic!("expected mut, got {e:?}"),
        }
    }

    #[test]
    fn wildcard_annotation_prints_as_underscore() {
        let c = Command::new(
            Term::var("v0"),
            None,
            Discipline::Need,
            CoTerm::covar("e0"),
        );
        assert_eq!(print::print_command(&c), "< v0 | _ : need | e0 >");
    }

    #[test]
    fn infix_type_sugar_is_accepted_canonical_output_applicative() {
        let t = parse_type_with("One (+) One", &[]).unwrap();
        let expect = TypeExpr::apply(
            TypeExpr::con(names::SUM),
            [TypeExpr::con(names::ONE), TypeExpr::con(names::ONE)],
        );
        assert!(t.alpha_eq(&expect));
        assert_eq!(print::print_type(&t), "Sum One One");
        let back = parse_type_with(&print::print_type(&t), &[]).unwrap();
        assert!(back.alpha_eq(&t));
    }

    #[test]
    fn quantifier_sugar() {
        let t = parse_type_with("forall X : need . Bot", &[]).unwrap();
        let expect = TypeExpr::app(
            TypeExpr::con(names::forall(Discipline::Need)),
            TypeExpr::lam("X", Kind::Disc(Discipline::Need), TypeExpr::con(names::BOT)),
        );
        assert!(t.alpha_eq(&expect));
    }

    #[test]
    fn roundtrip_cocase_branch() {
        let fun = Declaration {
            polarity: Polarity::Codata,
            name: "Fun".into(),
            params: vec![
                ("X".into(), Kind::Disc(Discipline::Cbv)),
                ("Y".into(), Kind::Disc(Discipline::Cbn)),
            ],
            result: Discipline::Cbn,
            xtors: vec![XtorSig {
                name: "App".into(),
                quantified: vec![],
                term_inputs: vec![(TypeExpr::var("X"), Discipline::Cbv)],
                co_inputs: vec![(TypeExpr::var("Y"), Discipline::Cbn)],
            }],
        };
        let src = "< cocase { App(x)[b] => < x | One : v | mut y. < y | One : v | d > > } | Fun One Bot : n | a >";
        let c = parse_command_with(src, &[fun.clone()]).unwrap();
        let printed = print::print_command(&c);
        let c2 = parse_command_with(&printed, &[fun]).unwrap();
        assert!(alpha_eq_command(&c, &c2));
    }

    #[test]
    fn definitions_inline_in_order() {
        let src = "
            def one : One : v = Unit ;
            def two : Prod One One : v = Pair(one, one) ;
            cmd main (|- out : Prod One One : v) = < two | Prod One One : v | out > ;
        ";
        let prog = parse_program(src).unwrap();
        let elab = prog.elaborate().unwrap();
        let main = elab.entry("main").unwrap();
        let expect = Term::construct(
            "Pair",
            vec![],
            vec![],
            vec![
                Term::construct("Unit", vec![], vec![], vec![]),
                Term::construct("Unit", vec![], vec![], vec![]),
            ],
        );
        assert!(alpha_eq_term(&main.body.term, &expect));
    }

    #[test]
    fn spans_nest() {
        let src = "< mu a. < x | One : v | a > | A : v | b >";
        let c = parse_command_with(src, &[]).unwrap();
        let outer = c.span.unwrap();
        if let Term::Mu(_, inner) = &c.term {
            let inner = inner.span.unwrap();
            assert!(outer.lo <= inner.lo && inner.hi <= outer.hi);
        } else {
            panic!("expected mu");
        }
    }
}

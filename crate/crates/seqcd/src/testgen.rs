//! Seeded generators for well-disciplined commands, values, covalues, and
//! substitutions over the core connectives.  Used by the property suites:
//! the generated trees are well-disciplined by construction (every
//! construction site matches its declared result discipline, binders carry
//! the discipline demanded by their position), free (co)variables are
//! drawn from an ambient context so runs have observables.

use crate::kinds::{names, SignatureTable};
use crate::machine::{is_covalue, is_value};
use crate::syntax::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use Discipline::{Cbn, Cbv, Coneed, Need};

pub struct Gen {
    rng: ChaCha8Rng,
    counter: usize,
    /// Ambient free variables and covariables with their disciplines.
    pub free_vars: Vec<(Name, Discipline)>,
    pub free_covars: Vec<(Name, Discipline)>,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        let mut g = Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            counter: 0,
            free_vars: Vec::new(),
            free_covars: Vec::new(),
        };
        for s in Discipline::ALL {
            g.free_vars.push((format!("fv_{}", s.token()), s));
            g.free_covars.push((format!("fk_{}", s.token()), s));
        }
        g
    }

    fn name(&mut self, hint: &str) -> Name {
        self.counter += 1;
        format!("{hint}{}", self.counter)
    }

    pub fn disc(&mut self) -> Discipline {
        *Discipline::ALL.choose(&mut self.rng).unwrap()
    }

    pub fn command(&mut self, sig: &SignatureTable, depth: usize) -> Command {
        let s = self.disc();
        self.command_at(sig, s, depth)
    }

    pub fn command_at(&mut self, sig: &SignatureTable, s: Discipline, depth: usize) -> Command {
        let term = self.term(sig, s, depth);
        let coterm = self.coterm(sig, s, depth);
        Command::new(term, None, s, coterm)
    }

    fn var_of(&mut self, s: Discipline) -> Term {
        let opts: Vec<Name> = self
            .free_vars
            .iter()
            .filter(|(_, d)| *d == s)
            .map(|(n, _)| n.clone())
            .collect();
        Term::var(opts.choose(&mut self.rng).cloned().unwrap())
    }

    fn covar_of(&mut self, s: Discipline) -> CoTerm {
        let opts: Vec<Name> = self
            .free_covars
            .iter()
            .filter(|(_, d)| *d == s)
            .map(|(n, _)| n.clone())
            .collect();
        CoTerm::covar(opts.choose(&mut self.rng).cloned().unwrap())
    }

    /// Any term acceptable at discipline `s` (not necessarily a value).
    pub fn term(&mut self, sig: &SignatureTable, s: Discipline, depth: usize) -> Term {
        if depth == 0 {
            return self.var_of(s);
        }
        match self.rng.gen_range(0..6) {
            0 => self.var_of(s),
            1 => {
                let a = self.name("a");
                self.free_covars.push((a.clone(), s));
                let d = self.disc();
                let c = self.command_at(sig, d, depth - 1);
                self.free_covars.pop();
                Term::mu(a, c)
            }
            2 | 3 => self.value(sig, s, depth - 1),
            4 => match s {
                Cbv => Term::construct(
                    names::INL,
                    vec![],
                    vec![],
                    vec![self.term(sig, Cbv, depth - 1)],
                ),
                _ => Term::construct(
                    names::delay(s),
                    vec![],
                    vec![],
                    vec![self.term(sig, Cbv, depth - 1)],
                ),
            },
            _ => self.cocase(sig, s, depth - 1),
        }
    }

    pub fn coterm(&mut self, sig: &SignatureTable, s: Discipline, depth: usize) -> CoTerm {
        if depth == 0 {
            return self.covar_of(s);
        }
        match self.rng.gen_range(0..6) {
            0 => self.covar_of(s),
            1 => {
                let x = self.name("x");
                self.free_vars.push((x.clone(), s));
                let d = self.disc();
                let c = self.command_at(sig, d, depth - 1);
                self.free_vars.pop();
                CoTerm::mu_tilde(x, c)
            }
            2 | 3 => self.covalue(sig, s, depth - 1),
            4 => match s {
                Cbn => CoTerm::destruct(
                    names::FST,
                    vec![],
                    vec![],
                    vec![self.coterm(sig, Cbn, depth - 1)],
                ),
                _ => CoTerm::destruct(
                    names::force(s),
                    vec![],
                    vec![],
                    vec![self.coterm(sig, Cbn, depth - 1)],
                ),
            },
            _ => self.case(sig, s, depth - 1),
        }
    }

    /// A term that is a value at `s` by construction.
    pub fn value(&mut self, sig: &SignatureTable, s: Discipline, depth: usize) -> Term {
        if depth == 0 {
            return self.var_of(s);
        }
        match s {
            Cbv | Need | Coneed => match self.rng.gen_range(0..6) {
                0 => self.var_of(s),
                1 if s == Cbv => Term::construct(names::UNIT, vec![], vec![], vec![]),
                2 if s == Cbv => Term::construct(
                    names::INL,
                    vec![],
                    vec![],
                    vec![self.value(sig, Cbv, depth - 1)],
                ),
                3 if s == Cbv => Term::construct(
                    names::PAIR,
                    vec![],
                    vec![],
                    vec![
                        self.value(sig, Cbv, depth - 1),
                        self.value(sig, Cbv, depth - 1),
                    ],
                ),
                4 => Term::construct(
                    names::delay(s),
                    vec![],
                    vec![],
                    vec![self.value(sig, Cbv, depth - 1)],
                ),
                _ => self.cocase(sig, s, depth.saturating_sub(1)),
            },
            Cbn => self.term(sig, Cbn, depth),
        }
    }

    /// A coterm that is a covalue at `s` by construction.
    pub fn covalue(&mut self, sig: &SignatureTable, s: Discipline, depth: usize) -> CoTerm {
        if depth == 0 {
            return self.covar_of(s);
        }
        match s {
            Cbn | Need | Coneed => match self.rng.gen_range(0..6) {
                0 => self.covar_of(s),
                1 if s == Cbn => CoTerm::destruct(names::COUNIT, vec![], vec![], vec![]),
                2 if s == Cbn => CoTerm::destruct(
                    names::THROW,
                    vec![],
                    vec![self.value(sig, Cbv, depth - 1)],
                    vec![],
                ),
                3 if s == Cbn => CoTerm::destruct(
                    names::FST,
                    vec![],
                    vec![],
                    vec![self.covalue(sig, Cbn, depth - 1)],
                ),
                4 => CoTerm::destruct(
                    names::force(s),
                    vec![],
                    vec![],
                    vec![self.covalue(sig, Cbn, depth - 1)],
                ),
                _ => self.case(sig, s, depth.saturating_sub(1)),
            },
            Cbv => self.coterm(sig, Cbv, depth),
        }
    }

    /// A cocase producing a value of discipline `s`.
    fn cocase(&mut self, sig: &SignatureTable, s: Discipline, depth: usize) -> Term {
        match s {
            Cbn if self.rng.gen_bool(0.5) => {
                let a = self.name("a");
                self.free_covars.push((a.clone(), Cbn));
                let d1 = self.disc();
                let c1 = self.command_at(sig, d1, depth.saturating_sub(1));
                self.free_covars.pop();
                let b = self.name("b");
                self.free_covars.push((b.clone(), Cbn));
                let d2 = self.disc();
                let c2 = self.command_at(sig, d2, depth.saturating_sub(1));
                self.free_covars.pop();
                Term::CoCase(vec![
                    (
                        CoPattern {
                            dtor: names::FST.into(),
                            ty_vars: vec![],
                            vars: vec![],
                            co_vars: vec![a],
                        },
                        c1,
                    ),
                    (
                        CoPattern {
                            dtor: names::SND.into(),
                            ty_vars: vec![],
                            vars: vec![],
                            co_vars: vec![b],
                        },
                        c2,
                    ),
                ])
            }
            _ => {
                let a = self.name("a");
                self.free_covars.push((a.clone(), Cbn));
                let d = self.disc();
                let c = self.command_at(sig, d, depth.saturating_sub(1));
                self.free_covars.pop();
                Term::CoCase(vec![(
                    CoPattern {
                        dtor: names::force(s),
                        ty_vars: vec![],
                        vars: vec![],
                        co_vars: vec![a],
                    },
                    c,
                )])
            }
        }
    }

    /// A case consuming a value of discipline `s`.
    fn case(&mut self, sig: &SignatureTable, s: Discipline, depth: usize) -> CoTerm {
        match s {
            Cbv if self.rng.gen_bool(0.5) => {
                let x = self.name("x");
                self.free_vars.push((x.clone(), Cbv));
                let d1 = self.disc();
                let c1 = self.command_at(sig, d1, depth.saturating_sub(1));
                self.free_vars.pop();
                let y = self.name("y");
                self.free_vars.push((y.clone(), Cbv));
                let d2 = self.disc();
                let c2 = self.command_at(sig, d2, depth.saturating_sub(1));
                self.free_vars.pop();
                CoTerm::Case(vec![
                    (
                        Pattern {
                            ctor: names::INL.into(),
                            ty_vars: vec![],
                            co_vars: vec![],
                            vars: vec![x],
                        },
                        c1,
                    ),
                    (
                        Pattern {
                            ctor: names::INR.into(),
                            ty_vars: vec![],
                            co_vars: vec![],
                            vars: vec![y],
                        },
                        c2,
                    ),
                ])
            }
            _ => {
                let x = self.name("x");
                self.free_vars.push((x.clone(), Cbv));
                let d = self.disc();
                let c = self.command_at(sig, d, depth.saturating_sub(1));
                self.free_vars.pop();
                CoTerm::Case(vec![(
                    Pattern {
                        ctor: names::delay(s),
                        ty_vars: vec![],
                        co_vars: vec![],
                        vars: vec![x],
                    },
                    c,
                )])
            }
        }
    }

    /// A well-disciplined substitution covering (a random subset of) the
    /// ambient free names occurring in `c`.
    pub fn substitution(&mut self, sig: &SignatureTable, c: &Command, depth: usize) -> Subst {
        let free = free_command(c);
        let mut rho = Subst::default();
        let ambient_vars = self.free_vars.clone();
        let ambient_covars = self.free_covars.clone();
        for (n, s) in &ambient_vars {
            if free.vars.contains(n) && self.rng.gen_bool(0.7) {
                let v = self.value(sig, *s, depth);
                debug_assert!(is_value(sig, &v, *s));
                rho.terms.push((n.clone(), v));
            }
        }
        for (n, s) in &ambient_covars {
            if free.covars.contains(n) && self.rng.gen_bool(0.7) {
                let e = self.covalue(sig, *s, depth);
                debug_assert!(is_covalue(sig, &e, *s));
                rho.coterms.push((n.clone(), e));
            }
        }
        rho
    }
}

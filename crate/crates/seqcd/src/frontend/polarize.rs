//! Polarizing compilations of the source calculi into the full calculus.
//!
//! Two schemes are provided.  The generic scheme works for every strategy
//! S and surrounds each connective with three shifts: `ToPos@S`/`ToNeg@S`
//! on the sub-formulas and `FromPos@S`/`FromNeg@S` on the outside, so
//! sharing is preserved for `need` and `coneed`.  The classic scheme
//! (call-by-value and call-by-name only) uses the minimal thin shifts.
//!
//! Functions become the declared `Fun` codata connective; sums are the
//! core connective; numeral literals become constructors of an opaque
//! `Lit` data type.  Output commands carry wildcard type annotations and
//! check in discipline-only mode (the source calculus is untyped).

use super::*;
use crate::kinds::names;
use crate::syntax::{
    fresh, Command, CoPattern, CoTerm, Declaration, Discipline, Kind, Pattern, Polarity, Term,
    TypeExpr, XtorSig,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Scheme {
    Classic,
    Generic,
}

impl Scheme {
    pub fn from_token(s: &str) -> Option<Scheme> {
        match s {
            "classic" => Some(Scheme::Classic),
            "generic" => Some(Scheme::Generic),
            _ => None,
        }
    }
}

/// Source types of the lambda-mu-mu-tilde calculi (functions and sums),
/// used to state and test the type-level compilations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LType {
    Var(Name),
    Fun(Box<LType>, Box<LType>),
    Sum(Box<LType>, Box<LType>),
}

/// The codata declaration for functions used by polarized programs.
pub fn fun_declaration() -> Declaration {
    Declaration {
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
    }
}

/// The opaque literal type covering the given numerals.
pub fn lit_declaration(nums: &[u64]) -> Declaration {
    Declaration {
        polarity: Polarity::Data,
        name: "Lit".into(),
        params: vec![],
        result: Discipline::Cbv,
        xtors: nums
            .iter()
            .map(|n| XtorSig {
                name: format!("L{n}"),
                quantified: vec![],
                term_inputs: vec![],
                co_inputs: vec![],
            })
            .collect(),
    }
}

fn tyvar(name: &str, s: Strategy) -> TypeExpr {
    TypeExpr::var(format!("{name}@{}", s.discipline().token()))
}

fn app1(h: impl Into<Name>, a: TypeExpr) -> TypeExpr {
    TypeExpr::app(TypeExpr::con(h), a)
}

fn app2(h: impl Into<Name>, a: TypeExpr, b: TypeExpr) -> TypeExpr {
    TypeExpr::apply(TypeExpr::con(h), [a, b])
}

/// Compile a source type under the chosen strategy and scheme.  Type
/// variables land at `X@s` with kind matching the strategy's discipline.
pub fn polarize_type(t: &LType, s: Strategy, scheme: Scheme) -> TypeExpr {
    match scheme {
        Scheme::Generic => {
            let d = s.discipline();
            match t {
                LType::Var(x) => tyvar(x, s),
                LType::Fun(a, b) => app1(
                    names::from_neg(d),
                    app2(
                        "Fun",
                        app1(names::to_pos(d), polarize_type(a, s, scheme)),
                        app1(names::to_neg(d), polarize_type(b, s, scheme)),
                    ),
                ),
                LType::Sum(a, b) => app1(
                    names::from_pos(d),
                    app2(
                        names::SUM,
                        app1(names::to_pos(d), polarize_type(a, s, scheme)),
                        app1(names::to_pos(d), polarize_type(b, s, scheme)),
                    ),
                ),
            }
        }
        Scheme::Classic => match s {
            Strategy::Q => match t {
                LType::Var(x) => tyvar(x, s),
                LType::Fun(a, b) => app1(
                    names::to_pos(Discipline::Cbn),
                    app2(
                        "Fun",
                        polarize_type(a, s, scheme),
                        app1(names::to_neg(Discipline::Cbv), polarize_type(b, s, scheme)),
                    ),
                ),
                LType::Sum(a, b) => app2(
                    names::SUM,
                    polarize_type(a, s, scheme),
                    polarize_type(b, s, scheme),
                ),
            },
            Strategy::T => match t {
                LType::Var(x) => tyvar(x, s),
                LType::Fun(a, b) => app2(
                    "Fun",
                    app1(names::to_pos(Discipline::Cbn), polarize_type(a, s, scheme)),
                    polarize_type(b, s, scheme),
                ),
                LType::Sum(a, b) => app1(
                    names::to_neg(Discipline::Cbv),
                    app2(
                        names::SUM,
                        app1(names::to_pos(Discipline::Cbn), polarize_type(a, s, scheme)),
                        app1(names::to_pos(Discipline::Cbn), polarize_type(b, s, scheme)),
                    ),
                ),
            },
            _ => panic!("classic scheme is defined for q and t only"),
        },
    }
}

fn cmd(term: Term, disc: Discipline, coterm: CoTerm) -> Command {
    Command::new(term, None, disc, coterm)
}

fn construct0(ctor: impl Into<Name>) -> Term {
    Term::construct(ctor, vec![], vec![], vec![])
}

fn wrap_tm(s: Discipline, v: Term) -> Term {
    Term::construct(names::wrap(s), vec![], vec![], vec![v])
}

fn delay_tm(s: Discipline, v: Term) -> Term {
    Term::construct(names::delay(s), vec![], vec![], vec![v])
}

fn unwrap_co(s: Discipline, e: CoTerm) -> CoTerm {
    CoTerm::destruct(names::unwrap(s), vec![], vec![], vec![e])
}

fn force_co(s: Discipline, e: CoTerm) -> CoTerm {
    CoTerm::destruct(names::force(s), vec![], vec![], vec![e])
}

fn app_co(v: Term, e: CoTerm) -> CoTerm {
    CoTerm::destruct("App", vec![], vec![v], vec![e])
}

fn pattern1(ctor: impl Into<Name>, var: impl Into<Name>) -> Pattern {
    Pattern {
        ctor: ctor.into(),
        ty_vars: vec![],
        co_vars: vec![],
        vars: vec![var.into()],
    }
}

fn copattern_force(s: Discipline, covar: impl Into<Name>) -> CoPattern {
    CoPattern {
        dtor: names::force(s),
        ty_vars: vec![],
        vars: vec![],
        co_vars: vec![covar.into()],
    }
}

fn copattern_unwrap(s: Discipline, covar: impl Into<Name>) -> CoPattern {
    CoPattern {
        dtor: names::unwrap(s),
        ty_vars: vec![],
        vars: vec![],
        co_vars: vec![covar.into()],
    }
}

fn copattern_app(var: impl Into<Name>, covar: impl Into<Name>) -> CoPattern {
    CoPattern {
        dtor: "App".into(),
        ty_vars: vec![],
        vars: vec![var.into()],
        co_vars: vec![covar.into()],
    }
}

struct Ctx {
    strategy: Strategy,
    scheme: Scheme,
    nums: std::collections::BTreeSet<u64>,
}

impl Ctx {
    fn go_command(&mut self, c: &LCommand) -> Command {
        let d = self.strategy.discipline();
        cmd(self.go_term(&c.term), d, self.go_coterm(&c.coterm))
    }

    fn fresh3(&self, c: &LCommand, hints: [&str; 3]) -> (Name, Name, Name) {
        let f = lfree_command(c);
        let mut avoid = f.vars;
        avoid.extend(f.covars);
        let a = fresh(hints[0], &avoid);
        avoid.insert(a.clone());
        let b = fresh(hints[1], &avoid);
        avoid.insert(b.clone());
        let g = fresh(hints[2], &avoid);
        (a, b, g)
    }

    fn go_term(&mut self, t: &LTerm) -> Term {
        use Discipline::{Cbn, Cbv};
        let s = self.strategy;
        let d = s.discipline();
        match (self.scheme, t) {
            (_, LTerm::Var(x)) => Term::var(x.clone()),
            (_, LTerm::Mu(a, c)) => Term::mu(a.clone(), self.go_command(c)),
            (Scheme::Generic, LTerm::Num(n)) => {
                self.nums.insert(*n);
                delay_tm(d, construct0(format!("L{n}")))
            }
            (Scheme::Classic, LTerm::Num(n)) => {
                self.nums.insert(*n);
                match s {
                    Strategy::Q => construct0(format!("L{n}")),
                    Strategy::T => {
                        let lit = construct0(format!("L{n}"));
                        Term::CoCase(vec![(
                            copattern_unwrap(Cbv, "b"),
                            cmd(lit, Cbv, CoTerm::covar("b")),
                        )])
                    }
                    _ => unreachable!(),
                }
            }
            (Scheme::Generic, LTerm::Lam(x, al, body)) => {
                let (y, b, g) = self.fresh3(body, ["y", "b", "g"]);
                let inner = cmd(
                    Term::CoCase(vec![(
                        copattern_unwrap(d, al.clone()),
                        self.go_command(body),
                    )]),
                    Cbn,
                    CoTerm::covar(b.clone()),
                );
                let matcher = cmd(
                    Term::var(y.clone()),
                    Cbv,
                    CoTerm::Case(vec![(pattern1(names::wrap(d), x.clone()), inner)]),
                );
                let lam = Term::CoCase(vec![(copattern_app(y, b), matcher)]);
                Term::CoCase(vec![(
                    copattern_force(d, g.clone()),
                    cmd(lam, Cbn, CoTerm::covar(g)),
                )])
            }
            (Scheme::Classic, LTerm::Lam(x, al, body)) => match s {
                Strategy::Q => {
                    let (b, _, _) = self.fresh3(body, ["b", "b0", "b1"]);
                    let inner = cmd(
                        Term::CoCase(vec![(
                            copattern_unwrap(Cbv, al.clone()),
                            self.go_command(body),
                        )]),
                        Cbn,
                        CoTerm::covar(b.clone()),
                    );
                    wrap_tm(Cbn, Term::CoCase(vec![(copattern_app(x.clone(), b), inner)]))
                }
                Strategy::T => {
                    let (y, _, _) = self.fresh3(body, ["y", "y0", "y1"]);
                    let matcher = cmd(
                        Term::var(y.clone()),
                        Cbv,
                        CoTerm::Case(vec![(
                            pattern1(names::wrap(Cbn), x.clone()),
                            self.go_command(body),
                        )]),
                    );
                    Term::CoCase(vec![(copattern_app(y, al.clone()), matcher)])
                }
                _ => unreachable!(),
            },
            (Scheme::Generic, LTerm::Inl(v)) => {
                let v = self.go_term(v);
                delay_tm(
                    d,
                    Term::construct(names::INL, vec![], vec![], vec![wrap_tm(d, v)]),
                )
            }
            (Scheme::Generic, LTerm::Inr(v)) => {
                let v = self.go_term(v);
                delay_tm(
                    d,
                    Term::construct(names::INR, vec![], vec![], vec![wrap_tm(d, v)]),
                )
            }
            (Scheme::Classic, LTerm::Inl(v)) => {
                let inner = self.go_term(v);
                match s {
                    Strategy::Q => Term::construct(names::INL, vec![], vec![], vec![inner]),
                    Strategy::T => {
                        let inj = Term::construct(
                            names::INL,
                            vec![],
                            vec![],
                            vec![wrap_tm(Cbn, inner)],
                        );
                        Term::CoCase(vec![(
                            copattern_unwrap(Cbv, "b"),
                            cmd(inj, Cbv, CoTerm::covar("b")),
                        )])
                    }
                    _ => unreachable!(),
                }
            }
            (Scheme::Classic, LTerm::Inr(v)) => {
                let inner = self.go_term(v);
                match s {
                    Strategy::Q => Term::construct(names::INR, vec![], vec![], vec![inner]),
                    Strategy::T => {
                        let inj = Term::construct(
                            names::INR,
                            vec![],
                            vec![],
                            vec![wrap_tm(Cbn, inner)],
                        );
                        Term::CoCase(vec![(
                            copattern_unwrap(Cbv, "b"),
                            cmd(inj, Cbv, CoTerm::covar("b")),
                        )])
                    }
                    _ => unreachable!(),
                }
            }
        }
    }

    fn go_coterm(&mut self, e: &LCoTerm) -> CoTerm {
        use Discipline::{Cbn, Cbv};
        let s = self.strategy;
        let d = s.discipline();
        match (self.scheme, e) {
            (_, LCoTerm::CoVar(a)) => CoTerm::covar(a.clone()),
            (_, LCoTerm::MuTilde(x, c)) => CoTerm::mu_tilde(x.clone(), self.go_command(c)),
            (Scheme::Generic, LCoTerm::Stack(h, t)) => {
                let hv = self.go_term(h);
                let te = self.go_coterm(t);
                force_co(d, app_co(wrap_tm(d, hv), unwrap_co(d, te)))
            }
            (Scheme::Classic, LCoTerm::Stack(h, t)) => match s {
                Strategy::Q => {
                    let hv = self.go_term(h);
                    let te = self.go_coterm(t);
                    let mut avoid = std::collections::BTreeSet::new();
                    avoid.extend(free_names_tm(&hv));
                    avoid.extend(free_names_co(&te));
                    let z = fresh("z", &avoid);
                    CoTerm::Case(vec![(
                        pattern1(names::wrap(Cbn), z.clone()),
                        cmd(Term::var(z), Cbn, app_co(hv, unwrap_co(Cbv, te))),
                    )])
                }
                Strategy::T => {
                    let hv = self.go_term(h);
                    let te = self.go_coterm(t);
                    app_co(wrap_tm(Cbn, hv), te)
                }
                _ => unreachable!(),
            },
            (Scheme::Generic, LCoTerm::Case { left, right }) => {
                let (z, w1, w2) = (
                    "z".to_string(),
                    "w1".to_string(),
                    "w2".to_string(),
                );
                let lbody = cmd(
                    Term::var(w1.clone()),
                    Cbv,
                    CoTerm::Case(vec![(
                        pattern1(names::wrap(d), left.0.clone()),
                        self.go_command(&left.1),
                    )]),
                );
                let rbody = cmd(
                    Term::var(w2.clone()),
                    Cbv,
                    CoTerm::Case(vec![(
                        pattern1(names::wrap(d), right.0.clone()),
                        self.go_command(&right.1),
                    )]),
                );
                let sum_case = CoTerm::Case(vec![
                    (pattern1(names::INL, w1), lbody),
                    (pattern1(names::INR, w2), rbody),
                ]);
                CoTerm::Case(vec![(
                    pattern1(names::delay(d), z.clone()),
                    cmd(Term::var(z), Cbv, sum_case),
                )])
            }
            (Scheme::Classic, LCoTerm::Case { left, right }) => match s {
                Strategy::Q => CoTerm::Case(vec![
                    (
                        pattern1(names::INL, left.0.clone()),
                        self.go_command(&left.1),
                    ),
                    (
                        pattern1(names::INR, right.0.clone()),
                        self.go_command(&right.1),
                    ),
                ]),
                Strategy::T => {
                    let (y1, y2) = ("y1".to_string(), "y2".to_string());
                    let lbody = cmd(
                        Term::var(y1.clone()),
                        Cbv,
                        CoTerm::Case(vec![(
                            pattern1(names::wrap(Cbn), left.0.clone()),
                            self.go_command(&left.1),
                        )]),
                    );
                    let rbody = cmd(
                        Term::var(y2.clone()),
                        Cbv,
                        CoTerm::Case(vec![(
                            pattern1(names::wrap(Cbn), right.0.clone()),
                            self.go_command(&right.1),
                        )]),
                    );
                    unwrap_co(
                        Cbv,
                        CoTerm::Case(vec![
                            (pattern1(names::INL, y1), lbody),
                            (pattern1(names::INR, y2), rbody),
                        ]),
                    )
                }
                _ => unreachable!(),
            },
        }
    }
}

fn free_names_tm(t: &Term) -> std::collections::BTreeSet<Name> {
    crate::syntax::free_term(t).all_names()
}

fn free_names_co(e: &CoTerm) -> std::collections::BTreeSet<Name> {
    crate::syntax::free_coterm(e).all_names()
}

/// Polarize a source command; returns the declarations it relies on (the
/// function connective, plus literals if numerals occur) and the compiled
/// command.  The output checks in discipline-only mode.
pub fn polarize_command(
    c: &LCommand,
    s: Strategy,
    scheme: Scheme,
) -> Result<(Vec<Declaration>, Command), String> {
    let (decls, mut cmds) = polarize_program(std::slice::from_ref(&("main".to_string(), c.clone())), s, scheme)?;
    Ok((decls, cmds.pop().unwrap().1))
}

/// Polarize a set of named commands together, sharing one declaration set
/// (so every numeral of every command is covered by the literal type).
#[allow(clippy::type_complexity)]
pub fn polarize_program(
    commands: &[(Name, LCommand)],
    s: Strategy,
    scheme: Scheme,
) -> Result<(Vec<Declaration>, Vec<(Name, Command)>), String> {
    if scheme == Scheme::Classic && !matches!(s, Strategy::Q | Strategy::T) {
        return Err("classic scheme supports strategies q and t only".into());
    }
    let mut ctx = Ctx {
        strategy: s,
        scheme,
        nums: Default::default(),
    };
    let out: Vec<(Name, Command)> = commands
        .iter()
        .map(|(n, c)| (n.clone(), ctx.go_command(c)))
        .collect();
    let mut decls = vec![fun_declaration()];
    if !ctx.nums.is_empty() {
        let nums: Vec<u64> = ctx.nums.iter().copied().collect();
        decls.push(lit_declaration(&nums));
    }
    Ok((decls, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse::parse_lcommand;
    use crate::frontend::step::lmtm_run;
    use crate::kinds::{check_decl, kind_of, KindEnv, SignatureTable};
    use crate::machine::{run, Status};
    use crate::surface::parse_type_with;
    use crate::typing::{check_command, entry_context, Mode};

    fn sig_for(decls: &[Declaration]) -> SignatureTable {
        let mut sig = SignatureTable::core();
        for d in decls {
            sig = check_decl(&sig, d).unwrap();
        }
        sig
    }

    #[test]
    fn generic_type_translation_at_need() {
        // (A (+) B)^need = FromPos@need ((ToPos@need A^need) (+) (ToPos@need B^need))
        let t = LType::Sum(
            Box::new(LType::Var("A".into())),
            Box::new(LType::Var("B".into())),
        );
        let out = polarize_type(&t, Strategy::Need, Scheme::Generic);
        let expect = parse_type_with(
            "FromPos@need (Sum (ToPos@need A@need) (ToPos@need B@need))",
            &[],
        )
        .unwrap();
        assert!(out.alpha_eq(&expect));
        // variables land at the strategy's kind
        let x = polarize_type(&LType::Var("X".into()), Strategy::Need, Scheme::Generic);
        assert!(x.alpha_eq(&TypeExpr::var("X@need")));
        // and the whole translation is base-kinded at the strategy
        let sig = sig_for(&[fun_declaration()]);
        let theta = KindEnv::new()
            .extended("A@need", Kind::Disc(Discipline::Need))
            .extended("B@need", Kind::Disc(Discipline::Need));
        assert_eq!(
            kind_of(&theta, &sig, &out).unwrap(),
            Kind::Disc(Discipline::Need)
        );
    }

    #[test]
    fn classic_type_translations() {
        let fun = LType::Fun(
            Box::new(LType::Var("A".into())),
            Box::new(LType::Var("B".into())),
        );
        let q = polarize_type(&fun, Strategy::Q, Scheme::Classic);
        let expect_q =
            parse_type_with("ToPos@n (Fun A@v (ToNeg@v B@v))", &[fun_declaration()]).unwrap();
        assert!(q.alpha_eq(&expect_q));
        let t = polarize_type(&fun, Strategy::T, Scheme::Classic);
        let expect_t =
            parse_type_with("Fun (ToPos@n A@n) B@n", &[fun_declaration()]).unwrap();
        assert!(t.alpha_eq(&expect_t));
    }

    #[test]
    fn identity_command_polarizes_homomorphically() {
        let c = parse_lcommand("< x | alpha >").unwrap();
        for (s, scheme) in [
            (Strategy::Q, Scheme::Classic),
            (Strategy::T, Scheme::Classic),
            (Strategy::Q, Scheme::Generic),
            (Strategy::T, Scheme::Generic),
            (Strategy::Need, Scheme::Generic),
            (Strategy::Coneed, Scheme::Generic),
        ] {
            let (_, out) = polarize_command(&c, s, scheme).unwrap();
            assert!(matches!(out.term, Term::Var(ref x) if x == "x"));
            assert!(matches!(out.coterm, CoTerm::CoVar(ref a) if a == "alpha"));
            assert_eq!(out.discipline, s.discipline());
            assert!(out.annotation.is_none());
        }
    }

    #[test]
    fn polarized_output_is_well_disciplined() {
        let i = "\\(x, a0). < x | a0 >";
        let src = format!("< mu b. < ({i}) | ({i}) . b > | mut f. < ({i}) | f . f . 5 . alpha > >");
        let c = parse_lcommand(&src).unwrap();
        for (s, scheme) in [
            (Strategy::Q, Scheme::Classic),
            (Strategy::T, Scheme::Classic),
            (Strategy::Q, Scheme::Generic),
            (Strategy::T, Scheme::Generic),
            (Strategy::Need, Scheme::Generic),
            (Strategy::Coneed, Scheme::Generic),
        ] {
            let (decls, out) = polarize_command(&c, s, scheme).unwrap();
            let sig = sig_for(&decls);
            let entry = crate::surface::CommandEntry {
                name: "main".into(),
                gamma: vec![],
                delta: vec![("alpha".into(), None, s.discipline())],
                body: out,
            };
            let ctx = entry_context(&sig, Mode::DisciplineOnly, &entry).unwrap();
            check_command(&ctx, &entry.body)
                .unwrap_or_else(|e| panic!("{s} {scheme:?}: {e}"));
        }
    }

    #[test]
    fn need_example_agrees_between_direct_and_polarized_runs() {
        let i = "\\(x, a0). < x | a0 >";
        let src = format!("< mu b. < ({i}) | ({i}) . b > | mut f. < ({i}) | f . f . 5 . alpha > >");
        let c = parse_lcommand(&src).unwrap();
        let direct = lmtm_run(&c, Strategy::Need, 1000);
        assert_eq!(direct.status, Status::Finished);
        let (decls, out) = polarize_command(&c, Strategy::Need, Scheme::Generic).unwrap();
        let sig = sig_for(&decls);
        let obs = run(&sig, &out, 1000);
        assert_eq!(obs.status, Status::Finished);
        assert_eq!(obs.needed.covars, direct.needed_covars);
        assert_eq!(obs.needed.vars, direct.needed_vars);
    }

    #[test]
    fn classic_and_generic_agree_on_observables_for_q_and_t() {
        let srcs = [
            "< inl 3 | case { inl x => < x | out > | inr y => < y | out > } >",
            "< mu b. < 7 | b > | mut z. < z | out > >",
        ];
        for src in srcs {
            let c = parse_lcommand(src).unwrap();
            for s in [Strategy::Q, Strategy::T] {
                let direct = lmtm_run(&c, s, 1000);
                let mut results = Vec::new();
                for scheme in [Scheme::Classic, Scheme::Generic] {
                    let (decls, out) = polarize_command(&c, s, scheme).unwrap();
                    let sig = sig_for(&decls);
                    let obs = run(&sig, &out, 1000);
                    assert_eq!(obs.status, direct.status, "{src} {s} {scheme:?}");
                    assert_eq!(obs.needed.covars, direct.needed_covars);
                    results.push((obs.status, obs.needed.covars.clone()));
                }
                assert_eq!(results[0], results[1]);
            }
        }
    }
}

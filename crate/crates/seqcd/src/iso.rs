//! Parametric type isomorphisms: witnesses, the equivalence-relation
//! operations, the core law catalog, the declared-type/encoding
//! isomorphism, worker/wrapper rewriting, and observational verification.
//!
//! A witness between base-kinded `A` and `B` is a pair of commands
//! `fwd : (x:A |- b:B)` and `bwd : (y:B |- a:A)`.  At arrow kinds the
//! witness is stored over fresh applied type variables.  Equality of the
//! two round trips with the identity is checked observationally: closed
//! first-order samples are pushed through both directions and the
//! delivered eye values compared up to type-erased alpha-equality.

use crate::compile::{encode_copattern, encode_pattern, encode_type, flatten_case, flatten_cocase, NCopat, NPat};
use crate::kinds::{kind_of, names, normalize_type, KindEnv, SignatureTable};
use crate::machine::{run, Status};
use crate::syntax::*;
use crate::typing::{check_command, Hyp, Mode, TypeContext};
use Discipline::{Cbn, Cbv};

#[derive(Clone, Debug)]
pub struct IsoWitness {
    pub theta: Vec<(Name, Kind)>,
    pub a: TypeExpr,
    pub b: TypeExpr,
    pub kind: Kind,
    /// `(fwd_in : A |- fwd_out : B)`
    pub fwd: Command,
    pub fwd_in: Name,
    pub fwd_out: Name,
    /// `(bwd_in : B |- bwd_out : A)`
    pub bwd: Command,
    pub bwd_in: Name,
    pub bwd_out: Name,
}

#[derive(Clone, Debug)]
pub struct IsoError {
    pub msg: String,
}

impl std::fmt::Display for IsoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "iso error: {}", self.msg)
    }
}

impl std::error::Error for IsoError {}

fn ierr<T>(msg: impl Into<String>) -> Result<T, IsoError> {
    Err(IsoError { msg: msg.into() })
}

fn base_disc(k: &Kind) -> Result<Discipline, IsoError> {
    k.as_base().ok_or_else(|| IsoError {
        msg: format!("witness kind {k} is not base"),
    })
}

impl IsoWitness {
    /// Substitute the witness's free type parameters, yielding a closed
    /// instance (asserts the single-witness uniformity: the same commands
    /// are reused across instantiations).
    pub fn instantiate(&self, args: &[TypeExpr]) -> Result<IsoWitness, IsoError> {
        if args.len() != self.theta.len() {
            return ierr("wrong number of type arguments for witness");
        }
        let rho = Subst {
            types: self
                .theta
                .iter()
                .map(|(n, _)| n.clone())
                .zip(args.iter().cloned())
                .collect(),
            ..Default::default()
        };
        Ok(IsoWitness {
            theta: vec![],
            a: normalize_type(&self.a.subst_tyvars(&rho.types)),
            b: normalize_type(&self.b.subst_tyvars(&rho.types)),
            kind: self.kind.clone(),
            fwd: subst_command(&self.fwd, &rho),
            fwd_in: self.fwd_in.clone(),
            fwd_out: self.fwd_out.clone(),
            bwd: subst_command(&self.bwd, &rho),
            bwd_in: self.bwd_in.clone(),
            bwd_out: self.bwd_out.clone(),
        })
    }

    /// Type-check both witness commands at their declared sequents.
    pub fn typecheck(&self, sig: &SignatureTable) -> Result<(), crate::typing::TypeError> {
        let mut theta = KindEnv::new();
        for (n, k) in &self.theta {
            theta.push(n.clone(), k.clone());
        }
        let s = self.kind.as_base().expect("base-kind witness");
        let mk = |inn: &Name, int: &TypeExpr, out: &Name, outt: &TypeExpr| TypeContext {
            sig,
            mode: Mode::Typed,
            theta: theta.clone(),
            gamma: vec![(
                inn.clone(),
                Hyp {
                    ty: Some(int.clone()),
                    disc: s,
                },
            )],
            delta: vec![(
                out.clone(),
                Hyp {
                    ty: Some(outt.clone()),
                    disc: s,
                },
            )],
        };
        check_command(&mk(&self.fwd_in, &self.a, &self.fwd_out, &self.b), &self.fwd)?;
        check_command(&mk(&self.bwd_in, &self.b, &self.bwd_out, &self.a), &self.bwd)
    }
}

/// Reflexivity: the identity command in both directions.  At arrow kinds
/// the witness is formed over fresh applied type variables.
pub fn iso_refl(
    sig: &SignatureTable,
    theta: &[(Name, Kind)],
    a: &TypeExpr,
) -> Result<IsoWitness, IsoError> {
    let mut env = KindEnv::new();
    for (n, k) in theta {
        env.push(n.clone(), k.clone());
    }
    let mut k = kind_of(&env, sig, a).map_err(|e| IsoError { msg: e.msg })?;
    let mut theta = theta.to_vec();
    let mut a = a.clone();
    let mut i = 0;
    while let Kind::Arrow(dom, cod) = k {
        let x = format!("Xr{i}");
        i += 1;
        theta.push((x.clone(), (*dom).clone()));
        a = TypeExpr::app(a, TypeExpr::var(x));
        k = *cod;
    }
    let s = base_disc(&Kind::Disc(k.as_base().unwrap()))?;
    let id = |inn: &str, out: &str| {
        Command::new(
            Term::var(inn),
            Some(a.clone()),
            s,
            CoTerm::covar(out),
        )
    };
    Ok(IsoWitness {
        theta,
        a: a.clone(),
        b: a.clone(),
        kind: Kind::Disc(s),
        fwd: id("x", "b"),
        fwd_in: "x".into(),
        fwd_out: "b".into(),
        bwd: id("y", "a"),
        bwd_in: "y".into(),
        bwd_out: "a".into(),
    })
}

/// Symmetry: swap the two directions.
pub fn iso_symm(w: &IsoWitness) -> IsoWitness {
    IsoWitness {
        theta: w.theta.clone(),
        a: w.b.clone(),
        b: w.a.clone(),
        kind: w.kind.clone(),
        fwd: w.bwd.clone(),
        fwd_in: w.bwd_in.clone(),
        fwd_out: w.bwd_out.clone(),
        bwd: w.fwd.clone(),
        bwd_in: w.fwd_in.clone(),
        bwd_out: w.fwd_out.clone(),
    }
}

/// Transitivity: cut the two witnesses along the shared middle type.
pub fn iso_compose(w1: &IsoWitness, w2: &IsoWitness) -> Result<IsoWitness, IsoError> {
    if w1.kind != w2.kind {
        return ierr("kind mismatch in composition");
    }
    if !normalize_type(&w1.b).alpha_eq(&normalize_type(&w2.a)) {
        return ierr("middle types of composition differ");
    }
    let s = base_disc(&w1.kind)?;
    // fwd : (x:A |- g:C) = < mu b. w1.fwd | B:S | mut y. w2.fwd >
    let fwd = Command::new(
        Term::mu(w1.fwd_out.clone(), w1.fwd.clone()),
        Some(w1.b.clone()),
        s,
        CoTerm::mu_tilde(w2.fwd_in.clone(), w2.fwd.clone()),
    );
    let bwd = Command::new(
        Term::mu(w2.bwd_out.clone(), w2.bwd.clone()),
        Some(w1.b.clone()),
        s,
        CoTerm::mu_tilde(w1.bwd_in.clone(), w1.bwd.clone()),
    );
    Ok(IsoWitness {
        theta: w1.theta.clone(),
        a: w1.a.clone(),
        b: w2.b.clone(),
        kind: w1.kind.clone(),
        fwd,
        fwd_in: w1.fwd_in.clone(),
        fwd_out: w2.fwd_out.clone(),
        bwd,
        bwd_in: w2.bwd_in.clone(),
        bwd_out: w1.bwd_out.clone(),
    })
}

/// The wrapper converting a term across an isomorphism:
/// `mu b. < v | A:S | mut x. fwd >`.
pub fn worker_wrapper(w: &IsoWitness, v: &Term) -> Result<Term, IsoError> {
    let s = base_disc(&w.kind)?;
    let mut avoid = free_term(v).all_names();
    avoid.extend(free_command(&w.fwd).all_names());
    let out = fresh(&w.fwd_out, &avoid);
    let inn = fresh(&w.fwd_in, &avoid);
    let fwd = rename_io(&w.fwd, &w.fwd_in, &inn, &w.fwd_out, &out);
    Ok(Term::mu(
        out,
        Command::new(
            v.clone(),
            Some(w.a.clone()),
            s,
            CoTerm::mu_tilde(inn, fwd),
        ),
    ))
}

/// The dual coterm transform: a consumer of `B` from a consumer of `A`:
/// `mut y. < mu a. bwd | A:S | e >`.
pub fn worker_wrapper_coterm(w: &IsoWitness, e: &CoTerm) -> Result<CoTerm, IsoError> {
    let s = base_disc(&w.kind)?;
    let mut avoid = free_coterm(e).all_names();
    avoid.extend(free_command(&w.bwd).all_names());
    let inn = fresh(&w.bwd_in, &avoid);
    let out = fresh(&w.bwd_out, &avoid);
    let bwd = rename_io(&w.bwd, &w.bwd_in, &inn, &w.bwd_out, &out);
    Ok(CoTerm::mu_tilde(
        inn,
        Command::new(
            Term::mu(out, bwd),
            Some(w.a.clone()),
            s,
            e.clone(),
        ),
    ))
}

fn rename_io(c: &Command, in_old: &str, in_new: &str, out_old: &str, out_new: &str) -> Command {
    let rho = Subst {
        types: vec![],
        terms: vec![(in_old.to_string(), Term::var(in_new))],
        coterms: vec![(out_old.to_string(), CoTerm::covar(out_new))],
    };
    subst_command(c, &rho)
}

// --------------------------------------------------------------------------
// Law catalog
// --------------------------------------------------------------------------

/// Canonical closed type of each kind, used to instantiate quantifiers in
/// witnesses where the bound type is unconstrained.
pub fn canonical_type(s: Discipline) -> TypeExpr {
    match s {
        Cbv => TypeExpr::con(names::ONE),
        Cbn => TypeExpr::con(names::BOT),
        _ => TypeExpr::app(TypeExpr::con(names::from_pos(s)), TypeExpr::con(names::ONE)),
    }
}

/// A second canonical type, distinct from [`canonical_type`].
pub fn canonical_type_alt(s: Discipline) -> TypeExpr {
    match s {
        Cbv => TypeExpr::apply(
            TypeExpr::con(names::SUM),
            [TypeExpr::con(names::ONE), TypeExpr::con(names::ONE)],
        ),
        Cbn => TypeExpr::app(TypeExpr::con(names::NEG), TypeExpr::con(names::ONE)),
        _ => TypeExpr::app(TypeExpr::con(names::from_neg(s)), TypeExpr::con(names::BOT)),
    }
}

fn tv(n: &str) -> TypeExpr {
    TypeExpr::var(n)
}

fn tapp1(h: impl Into<Name>, a: TypeExpr) -> TypeExpr {
    TypeExpr::app(TypeExpr::con(h), a)
}

fn tapp2(h: impl Into<Name>, a: TypeExpr, b: TypeExpr) -> TypeExpr {
    TypeExpr::apply(TypeExpr::con(h), [a, b])
}

fn pvar(n: &str) -> NPat {
    NPat::Var(n.into())
}

fn cvar(n: &str) -> NCopat {
    NCopat::CoVar(n.into())
}

fn p1(ctor: impl Into<Name>, sub: NPat) -> NPat {
    NPat::ctor(ctor, vec![], vec![], vec![sub])
}

fn p2(ctor: impl Into<Name>, a: NPat, b: NPat) -> NPat {
    NPat::ctor(ctor, vec![], vec![], vec![a, b])
}

fn pco(ctor: impl Into<Name>, q: NCopat) -> NPat {
    NPat::ctor(ctor, vec![], vec![q], vec![])
}

fn ppack(s: Discipline, x: &str, sub: NPat) -> NPat {
    NPat::ctor(names::pack(s), vec![x.into()], vec![], vec![sub])
}

fn q1(dtor: impl Into<Name>, q: NCopat) -> NCopat {
    NCopat::dtor(dtor, vec![], vec![], vec![q])
}

fn q2(dtor: impl Into<Name>, a: NCopat, b: NCopat) -> NCopat {
    NCopat::dtor(dtor, vec![], vec![], vec![a, b])
}

fn qtm(dtor: impl Into<Name>, p: NPat) -> NCopat {
    NCopat::dtor(dtor, vec![], vec![p], vec![])
}

fn qspec(s: Discipline, x: &str, q: NCopat) -> NCopat {
    NCopat::dtor(names::spec(s), vec![x.into()], vec![], vec![q])
}

/// Build a positive-law witness from pattern conversion pairs: the forward
/// command matches the left shapes re-emitting the right shapes.
fn pos_shape_law(
    sig: &SignatureTable,
    theta: Vec<(Name, Kind)>,
    a: TypeExpr,
    b: TypeExpr,
    pairs: &[(NPat, NPat)],
) -> Result<IsoWitness, IsoError> {
    let an = normalize_type(&a);
    let bn = normalize_type(&b);
    let mk = |src: &TypeExpr, dst: &TypeExpr, shapes: Vec<(NPat, NPat)>, inn: &str, out: &str| {
        let branches = shapes
            .into_iter()
            .map(|(l, r)| {
                (
                    l,
                    Command::new(r.to_term(), Some(dst.clone()), Cbv, CoTerm::covar(out)),
                )
            })
            .collect();
        let matcher = flatten_case(sig, Some(src), branches).map_err(|e| IsoError { msg: e.msg })?;
        Ok::<Command, IsoError>(Command::new(
            Term::var(inn),
            Some(src.clone()),
            Cbv,
            matcher,
        ))
    };
    let fwd = mk(&an, &bn, pairs.to_vec(), "x", "b")?;
    let bwd = mk(
        &bn,
        &an,
        pairs.iter().map(|(l, r)| (r.clone(), l.clone())).collect(),
        "y",
        "a",
    )?;
    Ok(IsoWitness {
        theta,
        a: an,
        b: bn,
        kind: Kind::Disc(Cbv),
        fwd,
        fwd_in: "x".into(),
        fwd_out: "b".into(),
        bwd,
        bwd_in: "y".into(),
        bwd_out: "a".into(),
    })
}

/// Build a negative-law witness from copattern conversion pairs: the
/// forward command comatches the RIGHT shapes, each re-emitting the left
/// destruction against the input.
fn neg_shape_law(
    sig: &SignatureTable,
    theta: Vec<(Name, Kind)>,
    a: TypeExpr,
    b: TypeExpr,
    pairs: &[(NCopat, NCopat)],
) -> Result<IsoWitness, IsoError> {
    let an = normalize_type(&a);
    let bn = normalize_type(&b);
    let mk = |src: &TypeExpr, dst: &TypeExpr, shapes: Vec<(NCopat, NCopat)>, inn: &str, out: &str| {
        // match on dst's copatterns, emit src destructions on the input
        let branches = shapes
            .into_iter()
            .map(|(l, r)| {
                (
                    r,
                    Command::new(Term::var(inn), Some(src.clone()), Cbn, l.to_coterm()),
                )
            })
            .collect();
        let comatcher =
            flatten_cocase(sig, Some(dst), branches).map_err(|e| IsoError { msg: e.msg })?;
        Ok::<Command, IsoError>(Command::new(
            comatcher,
            Some(dst.clone()),
            Cbn,
            CoTerm::covar(out),
        ))
    };
    let fwd = mk(&an, &bn, pairs.to_vec(), "x", "b")?;
    let bwd = mk(
        &bn,
        &an,
        pairs.iter().map(|(l, r)| (r.clone(), l.clone())).collect(),
        "y",
        "a",
    )?;
    Ok(IsoWitness {
        theta,
        a: an,
        b: bn,
        kind: Kind::Disc(Cbn),
        fwd,
        fwd_in: "x".into(),
        fwd_out: "b".into(),
        bwd,
        bwd_in: "y".into(),
        bwd_out: "a".into(),
    })
}

/// One catalog entry: the law's name, its discipline indices, and whether
/// the observational method can verify it (the two additive-quantifier
/// distribution laws are cataloged but excluded: their equality needs the
/// enhanced type-ignoring eta laws).
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub discs: Vec<Discipline>,
    pub verifiable: bool,
}

/// The full catalog of core law instances: discipline-indexed laws are
/// listed once per relevant index.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    let plain = |n: &str| CatalogEntry {
        name: n.into(),
        discs: vec![],
        verifiable: true,
    };
    for n in [
        "plus-assoc",
        "plus-unit",
        "plus-comm",
        "times-assoc",
        "times-unit",
        "times-comm",
        "times-plus-dist",
        "times-zero",
        "with-assoc",
        "with-unit",
        "with-comm",
        "par-assoc",
        "par-unit",
        "par-comm",
        "par-with-dist",
        "par-top",
        "neg-plus",
        "neg-times",
        "neg-zero",
        "neg-one",
        "neg-not",
        "not-with",
        "not-par",
        "not-top",
        "not-bot",
        "not-neg",
        "shift-pn",
        "shift-np",
        "topos-v-id",
        "frompos-v-id",
        "toneg-n-id",
        "fromneg-n-id",
    ] {
        out.push(plain(n));
    }
    for s in [Cbv, Discipline::Need] {
        for n in [
            "forall-swap",
            "exists-swap",
            "forall-unused",
            "exists-unused",
            "forall-par-dist",
            "exists-times-dist",
            "not-forall",
            "neg-exists",
        ] {
            out.push(CatalogEntry {
                name: n.into(),
                discs: vec![s, Cbn],
                verifiable: true,
            });
        }
        for n in ["forall-with-dist", "exists-plus-dist"] {
            out.push(CatalogEntry {
                name: n.into(),
                discs: vec![s, Cbn],
                verifiable: false,
            });
        }
    }
    out
}

/// Build the witness for a named law.  `discs` supplies the discipline
/// indices of quantifier laws (first entry, second unused unless the law
/// has two).  The law's free type arguments stay abstract in `theta`.
pub fn law(sig: &SignatureTable, name: &str, discs: &[Discipline]) -> Result<IsoWitness, IsoError> {
    let v = Kind::Disc(Cbv);
    let n = Kind::Disc(Cbn);
    let s0 = discs.first().copied().unwrap_or(Cbv);
    let s1 = discs.get(1).copied().unwrap_or(Cbn);
    let forall_ty = |s: Discipline, x: &str, body: TypeExpr| {
        tapp1(names::forall(s), TypeExpr::lam(x, Kind::Disc(s), body))
    };
    let exists_ty = |s: Discipline, x: &str, body: TypeExpr| {
        tapp1(names::exists(s), TypeExpr::lam(x, Kind::Disc(s), body))
    };
    match name {
        // ------------------------------------------------- positive algebra
        "plus-assoc" => pos_shape_law(
            sig,
            vec![("A".into(), v.clone()), ("B".into(), v.clone()), ("C".into(), v.clone())],
            tapp2(names::SUM, tapp2(names::SUM, tv("A"), tv("B")), tv("C")),
            tapp2(names::SUM, tv("A"), tapp2(names::SUM, tv("B"), tv("C"))),
            &[
                (p1(names::INL, p1(names::INL, pvar("pa"))), p1(names::INL, pvar("pa"))),
                (
                    p1(names::INL, p1(names::INR, pvar("pb"))),
                    p1(names::INR, p1(names::INL, pvar("pb"))),
                ),
                (p1(names::INR, pvar("pc")), p1(names::INR, p1(names::INR, pvar("pc")))),
            ],
        ),
        "plus-unit" => pos_shape_law(
            sig,
            vec![("A".into(), v.clone())],
            tapp2(names::SUM, TypeExpr::con(names::ZERO), tv("A")),
            tv("A"),
            &[(p1(names::INR, pvar("pa")), pvar("pa"))],
        ),
        "plus-comm" => pos_shape_law(
            sig,
            vec![("A".into(), v.clone()), ("B".into(), v.clone())],
            tapp2(names::SUM, tv("A"), tv("B")),
            tapp2(names::SUM, tv("B"), tv("A")),
            &[
                (p1(names::INL, pvar("pa")), p1(names::INR, pvar("pa"))),
                (p1(names::INR, pvar("pb")), p1(names::INL, pvar("pb"))),
            ],
        ),
        "times-assoc" => pos_shape_law(
            sig,
            vec![("A".into(), v.clone()), ("B".into(), v.clone()), ("C".into(), v.clone())],
            tapp2(names::PROD, tapp2(names::PROD, tv("A"), tv("B")), tv("C")),
            tapp2(names::PROD, tv("A"), tapp2(names::PROD, tv("B"), tv("C"))),
            &[(
                p2(names::PAIR, p2(names::PAIR, pvar("pa"), pvar("pb")), pvar("pc")),
                p2(names::PAIR, pvar("pa"), p2(names::PAIR, pvar("pb"), pvar("pc"))),
            )],
        ),
        "times-unit" => pos_shape_law(
            sig,
            vec![("A".into(), v.clone())],
            tapp2(names::PROD, TypeExpr::con(names::ONE), tv("A")),
            tv("A"),
            &[(
                p2(
                    names::PAIR,
                    NPat::ctor(names::UNIT, vec![], vec![], vec![]),
                    pvar("pa"),
                ),
                pvar("pa"),
            )],
        ),
        "times-comm" => pos_shape_law(
            sig,
            vec![("A".into(), v.clone()), ("B".into(), v.clone())],
            tapp2(names::PROD, tv("A"), tv("B")),
            tapp2(names::PROD, tv("B"), tv("A")),
            &[(
                p2(names::PAIR, pvar("pa"), pvar("pb")),
                p2(names::PAIR, pvar("pb"), pvar("pa")),
            )],
        ),
        "times-plus-dist" => pos_shape_law(
            sig,
            vec![("A".into(), v.clone()), ("B".into(), v.clone()), ("C".into(), v.clone())],
            tapp2(names::PROD, tv("A"), tapp2(names::SUM, tv("B"), tv("C"))),
            tapp2(
                names::SUM,
                tapp2(names::PROD, tv("A"), tv("B")),
                tapp2(names::PROD, tv("A"), tv("C")),
            ),
            &[
                (
                    p2(names::PAIR, pvar("pa"), p1(names::INL, pvar("pb"))),
                    p1(names::INL, p2(names::PAIR, pvar("pa"), pvar("pb"))),
                ),
                (
                    p2(names::PAIR, pvar("pa"), p1(names::INR, pvar("pc"))),
                    p1(names::INR, p2(names::PAIR, pvar("pa"), pvar("pc"))),
                ),
            ],
        ),
        "times-zero" => {
            // A (*) 0 ~ 0: both sides uninhabited; direct witnesses.
            let a = tapp2(names::PROD, tv("A"), TypeExpr::con(names::ZERO));
            let zero = TypeExpr::con(names::ZERO);
            let fwd = Command::new(
                Term::var("x"),
                Some(a.clone()),
                Cbv,
                CoTerm::Case(vec![(
                    Pattern {
                        ctor: names::PAIR.into(),
                        ty_vars: vec![],
                        co_vars: vec![],
                        vars: vec!["pa".into(), "pz".into()],
                    },
                    Command::new(
                        Term::var("pz"),
                        Some(zero.clone()),
                        Cbv,
                        CoTerm::Case(vec![]),
                    ),
                )]),
            );
            let bwd = Command::new(
                Term::var("y"),
                Some(zero.clone()),
                Cbv,
                CoTerm::Case(vec![]),
            );
            Ok(IsoWitness {
                theta: vec![("A".into(), v)],
                a,
                b: zero,
                kind: Kind::Disc(Cbv),
                fwd,
                fwd_in: "x".into(),
                fwd_out: "b".into(),
                bwd,
                bwd_in: "y".into(),
                bwd_out: "a".into(),
            })
        }
        // ------------------------------------------------- negative algebra
        "with-assoc" => neg_shape_law(
            sig,
            vec![("A".into(), n.clone()), ("B".into(), n.clone()), ("C".into(), n.clone())],
            tapp2(names::WITH, tapp2(names::WITH, tv("A"), tv("B")), tv("C")),
            tapp2(names::WITH, tv("A"), tapp2(names::WITH, tv("B"), tv("C"))),
            &[
                (q1(names::FST, q1(names::FST, cvar("ka"))), q1(names::FST, cvar("ka"))),
                (
                    q1(names::FST, q1(names::SND, cvar("kb"))),
                    q1(names::SND, q1(names::FST, cvar("kb"))),
                ),
                (q1(names::SND, cvar("kc")), q1(names::SND, q1(names::SND, cvar("kc")))),
            ],
        ),
        "with-unit" => neg_shape_law(
            sig,
            vec![("A".into(), n.clone())],
            tapp2(names::WITH, TypeExpr::con(names::TOP), tv("A")),
            tv("A"),
            &[(q1(names::SND, cvar("ka")), cvar("ka"))],
        ),
        "with-comm" => neg_shape_law(
            sig,
            vec![("A".into(), n.clone()), ("B".into(), n.clone())],
            tapp2(names::WITH, tv("A"), tv("B")),
            tapp2(names::WITH, tv("B"), tv("A")),
            &[
                (q1(names::FST, cvar("ka")), q1(names::SND, cvar("ka"))),
                (q1(names::SND, cvar("kb")), q1(names::FST, cvar("kb"))),
            ],
        ),
        "par-assoc" => neg_shape_law(
            sig,
            vec![("A".into(), n.clone()), ("B".into(), n.clone()), ("C".into(), n.clone())],
            tapp2(names::PAR, tapp2(names::PAR, tv("A"), tv("B")), tv("C")),
            tapp2(names::PAR, tv("A"), tapp2(names::PAR, tv("B"), tv("C"))),
            &[(
                q2(names::COPAIR, q2(names::COPAIR, cvar("ka"), cvar("kb")), cvar("kc")),
                q2(names::COPAIR, cvar("ka"), q2(names::COPAIR, cvar("kb"), cvar("kc"))),
            )],
        ),
        "par-unit" => neg_shape_law(
            sig,
            vec![("A".into(), n.clone())],
            tapp2(names::PAR, TypeExpr::con(names::BOT), tv("A")),
            tv("A"),
            &[(
                q2(
                    names::COPAIR,
                    NCopat::dtor(names::COUNIT, vec![], vec![], vec![]),
                    cvar("ka"),
                ),
                cvar("ka"),
            )],
        ),
        "par-comm" => neg_shape_law(
            sig,
            vec![("A".into(), n.clone()), ("B".into(), n.clone())],
            tapp2(names::PAR, tv("A"), tv("B")),
            tapp2(names::PAR, tv("B"), tv("A")),
            &[(
                q2(names::COPAIR, cvar("ka"), cvar("kb")),
                q2(names::COPAIR, cvar("kb"), cvar("ka")),
            )],
        ),
        "par-with-dist" => neg_shape_law(
            sig,
            vec![("A".into(), n.clone()), ("B".into(), n.clone()), ("C".into(), n.clone())],
            tapp2(names::PAR, tv("A"), tapp2(names::WITH, tv("B"), tv("C"))),
            tapp2(
                names::WITH,
                tapp2(names::PAR, tv("A"), tv("B")),
                tapp2(names::PAR, tv("A"), tv("C")),
            ),
            &[
                (
                    q2(names::COPAIR, cvar("ka"), q1(names::FST, cvar("kb"))),
                    q1(names::FST, q2(names::COPAIR, cvar("ka"), cvar("kb"))),
                ),
                (
                    q2(names::COPAIR, cvar("ka"), q1(names::SND, cvar("kc"))),
                    q1(names::SND, q2(names::COPAIR, cvar("ka"), cvar("kc"))),
                ),
            ],
        ),
        "par-top" => {
            // A (%) Top ~ Top: no covalues exist on either side.
            let a = tapp2(names::PAR, tv("A"), TypeExpr::con(names::TOP));
            let top = TypeExpr::con(names::TOP);
            let fwd = Command::new(
                Term::CoCase(vec![]),
                Some(top.clone()),
                Cbn,
                CoTerm::covar("b"),
            );
            let bwd = Command::new(
                Term::CoCase(vec![(
                    CoPattern {
                        dtor: names::COPAIR.into(),
                        ty_vars: vec![],
                        vars: vec![],
                        co_vars: vec!["ka".into(), "kt".into()],
                    },
                    Command::new(
                        Term::CoCase(vec![]),
                        Some(top.clone()),
                        Cbn,
                        CoTerm::covar("kt"),
                    ),
                )]),
                Some(a.clone()),
                Cbn,
                CoTerm::covar("a"),
            );
            Ok(IsoWitness {
                theta: vec![("A".into(), n)],
                a,
                b: top,
                kind: Kind::Disc(Cbn),
                fwd,
                fwd_in: "x".into(),
                fwd_out: "b".into(),
                bwd,
                bwd_in: "y".into(),
                bwd_out: "a".into(),
            })
        }
        // ------------------------------------------------------- De Morgan
        "neg-plus" => neg_shape_law(
            sig,
            vec![("A".into(), v.clone()), ("B".into(), v.clone())],
            tapp1(names::NEG, tapp2(names::SUM, tv("A"), tv("B"))),
            tapp2(
                names::WITH,
                tapp1(names::NEG, tv("A")),
                tapp1(names::NEG, tv("B")),
            ),
            &[
                (
                    qtm(names::THROW, p1(names::INL, pvar("pa"))),
                    q1(names::FST, qtm(names::THROW, pvar("pa"))),
                ),
                (
                    qtm(names::THROW, p1(names::INR, pvar("pb"))),
                    q1(names::SND, qtm(names::THROW, pvar("pb"))),
                ),
            ],
        ),
        "neg-times" => neg_shape_law(
            sig,
            vec![("A".into(), v.clone()), ("B".into(), v.clone())],
            tapp1(names::NEG, tapp2(names::PROD, tv("A"), tv("B"))),
            tapp2(
                names::PAR,
                tapp1(names::NEG, tv("A")),
                tapp1(names::NEG, tv("B")),
            ),
            &[(
                qtm(names::THROW, p2(names::PAIR, pvar("pa"), pvar("pb"))),
                q2(
                    names::COPAIR,
                    qtm(names::THROW, pvar("pa")),
                    qtm(names::THROW, pvar("pb")),
                ),
            )],
        ),
        "neg-zero" => {
            // Neg Zero ~ Top
            let a = tapp1(names::NEG, TypeExpr::con(names::ZERO));
            let top = TypeExpr::con(names::TOP);
            let fwd = Command::new(
                Term::CoCase(vec![]),
                Some(top.clone()),
                Cbn,
                CoTerm::covar("b"),
            );
            let bwd = Command::new(
                Term::CoCase(vec![(
                    CoPattern {
                        dtor: names::THROW.into(),
                        ty_vars: vec![],
                        vars: vec!["pz".into()],
                        co_vars: vec![],
                    },
                    Command::new(
                        Term::var("pz"),
                        Some(TypeExpr::con(names::ZERO)),
                        Cbv,
                        CoTerm::Case(vec![]),
                    ),
                )]),
                Some(a.clone()),
                Cbn,
                CoTerm::covar("a"),
            );
            Ok(IsoWitness {
                theta: vec![],
                a,
                b: top,
                kind: Kind::Disc(Cbn),
                fwd,
                fwd_in: "x".into(),
                fwd_out: "b".into(),
                bwd,
                bwd_in: "y".into(),
                bwd_out: "a".into(),
            })
        }
        "neg-one" => neg_shape_law(
            sig,
            vec![],
            tapp1(names::NEG, TypeExpr::con(names::ONE)),
            TypeExpr::con(names::BOT),
            &[(
                qtm(names::THROW, NPat::ctor(names::UNIT, vec![], vec![], vec![])),
                NCopat::dtor(names::COUNIT, vec![], vec![], vec![]),
            )],
        ),
        "neg-not" => neg_shape_law(
            sig,
            vec![("C".into(), n.clone())],
            tapp1(names::NEG, tapp1(names::NOT, tv("C"))),
            tv("C"),
            &[(qtm(names::THROW, pco(names::CONT, cvar("kc"))), cvar("kc"))],
        ),
        "not-with" => pos_shape_law(
            sig,
            vec![("C".into(), n.clone()), ("D".into(), n.clone())],
            tapp1(names::NOT, tapp2(names::WITH, tv("C"), tv("D"))),
            tapp2(
                names::SUM,
                tapp1(names::NOT, tv("C")),
                tapp1(names::NOT, tv("D")),
            ),
            &[
                (
                    pco(names::CONT, q1(names::FST, cvar("kc"))),
                    p1(names::INL, pco(names::CONT, cvar("kc"))),
                ),
                (
                    pco(names::CONT, q1(names::SND, cvar("kd"))),
                    p1(names::INR, pco(names::CONT, cvar("kd"))),
                ),
            ],
        ),
        "not-par" => pos_shape_law(
            sig,
            vec![("C".into(), n.clone()), ("D".into(), n.clone())],
            tapp1(names::NOT, tapp2(names::PAR, tv("C"), tv("D"))),
            tapp2(
                names::PROD,
                tapp1(names::NOT, tv("C")),
                tapp1(names::NOT, tv("D")),
            ),
            &[(
                pco(names::CONT, q2(names::COPAIR, cvar("kc"), cvar("kd"))),
                p2(names::PAIR, pco(names::CONT, cvar("kc")), pco(names::CONT, cvar("kd"))),
            )],
        ),
        "not-top" => {
            // Not Top ~ Zero
            let a = tapp1(names::NOT, TypeExpr::con(names::TOP));
            let zero = TypeExpr::con(names::ZERO);
            let fwd = Command::new(
                Term::var("x"),
                Some(a.clone()),
                Cbv,
                CoTerm::Case(vec![(
                    Pattern {
                        ctor: names::CONT.into(),
                        ty_vars: vec![],
                        co_vars: vec!["kt".into()],
                        vars: vec![],
                    },
                    Command::new(
                        Term::CoCase(vec![]),
                        Some(TypeExpr::con(names::TOP)),
                        Cbn,
                        CoTerm::covar("kt"),
                    ),
                )]),
            );
            let bwd = Command::new(
                Term::var("y"),
                Some(zero.clone()),
                Cbv,
                CoTerm::Case(vec![]),
            );
            Ok(IsoWitness {
                theta: vec![],
                a,
                b: zero,
                kind: Kind::Disc(Cbv),
                fwd,
                fwd_in: "x".into(),
                fwd_out: "b".into(),
                bwd,
                bwd_in: "y".into(),
                bwd_out: "a".into(),
            })
        }
        "not-bot" => pos_shape_law(
            sig,
            vec![],
            tapp1(names::NOT, TypeExpr::con(names::BOT)),
            TypeExpr::con(names::ONE),
            &[(
                pco(names::CONT, NCopat::dtor(names::COUNIT, vec![], vec![], vec![])),
                NPat::ctor(names::UNIT, vec![], vec![], vec![]),
            )],
        ),
        "not-neg" => pos_shape_law(
            sig,
            vec![("A".into(), v.clone())],
            tapp1(names::NOT, tapp1(names::NEG, tv("A"))),
            tv("A"),
            &[(pco(names::CONT, qtm(names::THROW, pvar("pa"))), pvar("pa"))],
        ),
        // ------------------------------------------------------ shift laws
        "topos-v-id" => pos_shape_law(
            sig,
            vec![("A".into(), v.clone())],
            tapp1(names::to_pos(Cbv), tv("A")),
            tv("A"),
            &[(p1(names::wrap(Cbv), pvar("pa")), pvar("pa"))],
        ),
        "frompos-v-id" => pos_shape_law(
            sig,
            vec![("A".into(), v.clone())],
            tapp1(names::from_pos(Cbv), tv("A")),
            tv("A"),
            &[(p1(names::delay(Cbv), pvar("pa")), pvar("pa"))],
        ),
        "toneg-n-id" => neg_shape_law(
            sig,
            vec![("B".into(), n.clone())],
            tapp1(names::to_neg(Cbn), tv("B")),
            tv("B"),
            &[(q1(names::unwrap(Cbn), cvar("kb")), cvar("kb"))],
        ),
        "fromneg-n-id" => neg_shape_law(
            sig,
            vec![("B".into(), n.clone())],
            tapp1(names::from_neg(Cbn), tv("B")),
            tv("B"),
            &[(q1(names::force(Cbn), cvar("kb")), cvar("kb"))],
        ),
        "shift-pn" => {
            // ToPos@n B ~ FromNeg@v B (both positive)
            let a = tapp1(names::to_pos(Cbn), tv("B"));
            let b = tapp1(names::from_neg(Cbv), tv("B"));
            let fwd = Command::new(
                Term::var("x"),
                Some(a.clone()),
                Cbv,
                CoTerm::Case(vec![(
                    Pattern {
                        ctor: names::wrap(Cbn),
                        ty_vars: vec![],
                        co_vars: vec![],
                        vars: vec!["pz".into()],
                    },
                    Command::new(
                        Term::CoCase(vec![(
                            CoPattern {
                                dtor: names::force(Cbv),
                                ty_vars: vec![],
                                vars: vec![],
                                co_vars: vec!["kg".into()],
                            },
                            Command::new(
                                Term::var("pz"),
                                Some(tv("B")),
                                Cbn,
                                CoTerm::covar("kg"),
                            ),
                        )]),
                        Some(b.clone()),
                        Cbv,
                        CoTerm::covar("b"),
                    ),
                )]),
            );
            let bwd = Command::new(
                Term::construct(
                    names::wrap(Cbn),
                    vec![],
                    vec![],
                    vec![Term::mu(
                        "kd",
                        Command::new(
                            Term::var("y"),
                            Some(b.clone()),
                            Cbv,
                            CoTerm::destruct(
                                names::force(Cbv),
                                vec![],
                                vec![],
                                vec![CoTerm::covar("kd")],
                            ),
                        ),
                    )],
                ),
                Some(a.clone()),
                Cbv,
                CoTerm::covar("a"),
            );
            Ok(IsoWitness {
                theta: vec![("B".into(), n)],
                a,
                b,
                kind: Kind::Disc(Cbv),
                fwd,
                fwd_in: "x".into(),
                fwd_out: "b".into(),
                bwd,
                bwd_in: "y".into(),
                bwd_out: "a".into(),
            })
        }
        "shift-np" => {
            // ToNeg@v A ~ FromPos@n A (both negative)
            let a = tapp1(names::to_neg(Cbv), tv("A"));
            let b = tapp1(names::from_pos(Cbn), tv("A"));
            let fwd = Command::new(
                Term::var("x"),
                Some(a.clone()),
                Cbn,
                CoTerm::destruct(
                    names::unwrap(Cbv),
                    vec![],
                    vec![],
                    vec![CoTerm::mu_tilde(
                        "pz",
                        Command::new(
                            Term::construct(
                                names::delay(Cbn),
                                vec![],
                                vec![],
                                vec![Term::var("pz")],
                            ),
                            Some(b.clone()),
                            Cbn,
                            CoTerm::covar("b"),
                        ),
                    )],
                ),
            );
            let bwd = Command::new(
                Term::CoCase(vec![(
                    CoPattern {
                        dtor: names::unwrap(Cbv),
                        ty_vars: vec![],
                        vars: vec![],
                        co_vars: vec!["kg".into()],
                    },
                    Command::new(
                        Term::var("y"),
                        Some(b.clone()),
                        Cbn,
                        CoTerm::Case(vec![(
                            Pattern {
                                ctor: names::delay(Cbn),
                                ty_vars: vec![],
                                co_vars: vec![],
                                vars: vec!["pz".into()],
                            },
                            Command::new(
                                Term::var("pz"),
                                Some(tv("A")),
                                Cbv,
                                CoTerm::covar("kg"),
                            ),
                        )]),
                    ),
                )]),
                Some(a.clone()),
                Cbn,
                CoTerm::covar("a"),
            );
            Ok(IsoWitness {
                theta: vec![("A".into(), v)],
                a,
                b,
                kind: Kind::Disc(Cbn),
                fwd,
                fwd_in: "x".into(),
                fwd_out: "b".into(),
                bwd,
                bwd_in: "y".into(),
                bwd_out: "a".into(),
            })
        }
        // ------------------------------------------------- quantifier laws
        "forall-swap" => neg_shape_law(
            sig,
            vec![(
                "C".into(),
                Kind::arrow(Kind::Disc(s0), Kind::arrow(Kind::Disc(s1), n.clone())),
            )],
            forall_ty(
                s0,
                "X",
                forall_ty(s1, "Y", TypeExpr::apply(tv("C"), [tv("X"), tv("Y")])),
            ),
            forall_ty(
                s1,
                "Y",
                forall_ty(s0, "X", TypeExpr::apply(tv("C"), [tv("X"), tv("Y")])),
            ),
            &[(
                qspec(s0, "X", qspec(s1, "Y", cvar("kc"))),
                qspec(s1, "Y", qspec(s0, "X", cvar("kc"))),
            )],
        ),
        "exists-swap" => pos_shape_law(
            sig,
            vec![(
                "A".into(),
                Kind::arrow(Kind::Disc(s0), Kind::arrow(Kind::Disc(s1), v.clone())),
            )],
            exists_ty(
                s0,
                "X",
                exists_ty(s1, "Y", TypeExpr::apply(tv("A"), [tv("X"), tv("Y")])),
            ),
            exists_ty(
                s1,
                "Y",
                exists_ty(s0, "X", TypeExpr::apply(tv("A"), [tv("X"), tv("Y")])),
            ),
            &[(
                ppack(s0, "X", ppack(s1, "Y", pvar("pa"))),
                ppack(s1, "Y", ppack(s0, "X", pvar("pa"))),
            )],
        ),
        "forall-unused" => {
            let a = forall_ty(s0, "X", tv("D"));
            let fwd = Command::new(
                Term::var("x"),
                Some(a.clone()),
                Cbn,
                CoTerm::destruct(
                    names::spec(s0),
                    vec![canonical_type(s0)],
                    vec![],
                    vec![CoTerm::covar("b")],
                ),
            );
            let bwd = Command::new(
                Term::CoCase(vec![(
                    CoPattern {
                        dtor: names::spec(s0),
                        ty_vars: vec!["X".into()],
                        vars: vec![],
                        co_vars: vec!["kd".into()],
                    },
                    Command::new(Term::var("y"), Some(tv("D")), Cbn, CoTerm::covar("kd")),
                )]),
                Some(a.clone()),
                Cbn,
                CoTerm::covar("a"),
            );
            Ok(IsoWitness {
                theta: vec![("D".into(), n)],
                a,
                b: tv("D"),
                kind: Kind::Disc(Cbn),
                fwd,
                fwd_in: "x".into(),
                fwd_out: "b".into(),
                bwd,
                bwd_in: "y".into(),
                bwd_out: "a".into(),
            })
        }
        "exists-unused" => {
            let a = exists_ty(s0, "X", tv("B"));
            let fwd = Command::new(
                Term::var("x"),
                Some(a.clone()),
                Cbv,
                CoTerm::Case(vec![(
                    Pattern {
                        ctor: names::pack(s0),
                        ty_vars: vec!["X".into()],
                        co_vars: vec![],
                        vars: vec!["pz".into()],
                    },
                    Command::new(Term::var("pz"), Some(tv("B")), Cbv, CoTerm::covar("b")),
                )]),
            );
            let bwd = Command::new(
                Term::construct(
                    names::pack(s0),
                    vec![canonical_type(s0)],
                    vec![],
                    vec![Term::var("y")],
                ),
                Some(a.clone()),
                Cbv,
                CoTerm::covar("a"),
            );
            Ok(IsoWitness {
                theta: vec![("B".into(), v)],
                a,
                b: tv("B"),
                kind: Kind::Disc(Cbv),
                fwd,
                fwd_in: "x".into(),
                fwd_out: "b".into(),
                bwd,
                bwd_in: "y".into(),
                bwd_out: "a".into(),
            })
        }
        "forall-par-dist" => neg_shape_law(
            sig,
            vec![
                ("C".into(), Kind::arrow(Kind::Disc(s0), n.clone())),
                ("D".into(), n.clone()),
            ],
            tapp2(
                names::PAR,
                forall_ty(s0, "X", TypeExpr::app(tv("C"), tv("X"))),
                tv("D"),
            ),
            forall_ty(
                s0,
                "X",
                tapp2(names::PAR, TypeExpr::app(tv("C"), tv("X")), tv("D")),
            ),
            &[(
                q2(names::COPAIR, qspec(s0, "X", cvar("kc")), cvar("kd")),
                qspec(s0, "X", q2(names::COPAIR, cvar("kc"), cvar("kd"))),
            )],
        ),
        "exists-times-dist" => pos_shape_law(
            sig,
            vec![
                ("A".into(), Kind::arrow(Kind::Disc(s0), v.clone())),
                ("B".into(), v.clone()),
            ],
            tapp2(
                names::PROD,
                exists_ty(s0, "X", TypeExpr::app(tv("A"), tv("X"))),
                tv("B"),
            ),
            exists_ty(
                s0,
                "X",
                tapp2(names::PROD, TypeExpr::app(tv("A"), tv("X")), tv("B")),
            ),
            &[(
                p2(names::PAIR, ppack(s0, "X", pvar("pa")), pvar("pb")),
                ppack(s0, "X", p2(names::PAIR, pvar("pa"), pvar("pb"))),
            )],
        ),
        "not-forall" => pos_shape_law(
            sig,
            vec![("C".into(), Kind::arrow(Kind::Disc(s0), n.clone()))],
            tapp1(
                names::NOT,
                forall_ty(s0, "X", TypeExpr::app(tv("C"), tv("X"))),
            ),
            exists_ty(
                s0,
                "X",
                tapp1(names::NOT, TypeExpr::app(tv("C"), tv("X"))),
            ),
            &[(
                pco(names::CONT, qspec(s0, "X", cvar("kc"))),
                ppack(s0, "X", pco(names::CONT, cvar("kc"))),
            )],
        ),
        "neg-exists" => neg_shape_law(
            sig,
            vec![("A".into(), Kind::arrow(Kind::Disc(s0), v.clone()))],
            tapp1(
                names::NEG,
                exists_ty(s0, "X", TypeExpr::app(tv("A"), tv("X"))),
            ),
            forall_ty(
                s0,
                "X",
                tapp1(names::NEG, TypeExpr::app(tv("A"), tv("X"))),
            ),
            &[(
                qtm(names::THROW, ppack(s0, "X", pvar("pa"))),
                qspec(s0, "X", qtm(names::THROW, pvar("pa"))),
            )],
        ),
        // ---------- cataloged but unverifiable by the observational method
        "forall-with-dist" => {
            // (forall X:S. C X) (&) D ~ forall X:S. (C X (&) D); the Snd
            // side must invent a type, so only the enhanced eta laws prove
            // the round trip.
            let cx = TypeExpr::app(tv("C"), tv("X"));
            let a = tapp2(names::WITH, forall_ty(s0, "X", cx.clone()), tv("D"));
            let b = forall_ty(s0, "X", tapp2(names::WITH, cx.clone(), tv("D")));
            let fwd = Command::new(
                Term::CoCase(vec![(
                    CoPattern {
                        dtor: names::spec(s0),
                        ty_vars: vec!["X".into()],
                        vars: vec![],
                        co_vars: vec!["kw".into()],
                    },
                    Command::new(
                        Term::CoCase(vec![
                            (
                                CoPattern {
                                    dtor: names::FST.into(),
                                    ty_vars: vec![],
                                    vars: vec![],
                                    co_vars: vec!["kc".into()],
                                },
                                Command::new(
                                    Term::var("x"),
                                    Some(a.clone()),
                                    Cbn,
                                    CoTerm::destruct(
                                        names::FST,
                                        vec![],
                                        vec![],
                                        vec![CoTerm::destruct(
                                            names::spec(s0),
                                            vec![tv("X")],
                                            vec![],
                                            vec![CoTerm::covar("kc")],
                                        )],
                                    ),
                                ),
                            ),
                            (
                                CoPattern {
                                    dtor: names::SND.into(),
                                    ty_vars: vec![],
                                    vars: vec![],
                                    co_vars: vec!["kd".into()],
                                },
                                Command::new(
                                    Term::var("x"),
                                    Some(a.clone()),
                                    Cbn,
                                    CoTerm::destruct(
                                        names::SND,
                                        vec![],
                                        vec![],
                                        vec![CoTerm::covar("kd")],
                                    ),
                                ),
                            ),
                        ]),
                        Some(tapp2(names::WITH, cx.clone(), tv("D"))),
                        Cbn,
                        CoTerm::covar("kw"),
                    ),
                )]),
                Some(b.clone()),
                Cbn,
                CoTerm::covar("b"),
            );
            let bwd = Command::new(
                Term::CoCase(vec![
                    (
                        CoPattern {
                            dtor: names::FST.into(),
                            ty_vars: vec![],
                            vars: vec![],
                            co_vars: vec!["kf".into()],
                        },
                        Command::new(
                            Term::CoCase(vec![(
                                CoPattern {
                                    dtor: names::spec(s0),
                                    ty_vars: vec!["X".into()],
                                    vars: vec![],
                                    co_vars: vec!["kc".into()],
                                },
                                Command::new(
                                    Term::var("y"),
                                    Some(b.clone()),
                                    Cbn,
                                    CoTerm::destruct(
                                        names::spec(s0),
                                        vec![tv("X")],
                                        vec![],
                                        vec![CoTerm::destruct(
                                            names::FST,
                                            vec![],
                                            vec![],
                                            vec![CoTerm::covar("kc")],
                                        )],
                                    ),
                                ),
                            )]),
                            Some(forall_ty(s0, "X", cx.clone())),
                            Cbn,
                            CoTerm::covar("kf"),
                        ),
                    ),
                    (
                        CoPattern {
                            dtor: names::SND.into(),
                            ty_vars: vec![],
                            vars: vec![],
                            co_vars: vec!["kd".into()],
                        },
                        Command::new(
                            Term::var("y"),
                            Some(b.clone()),
                            Cbn,
                            CoTerm::destruct(
                                names::spec(s0),
                                vec![canonical_type(s0)],
                                vec![],
                                vec![CoTerm::destruct(
                                    names::SND,
                                    vec![],
                                    vec![],
                                    vec![CoTerm::covar("kd")],
                                )],
                            ),
                        ),
                    ),
                ]),
                Some(a.clone()),
                Cbn,
                CoTerm::covar("a"),
            );
            Ok(IsoWitness {
                theta: vec![
                    ("C".into(), Kind::arrow(Kind::Disc(s0), n.clone())),
                    ("D".into(), n),
                ],
                a,
                b,
                kind: Kind::Disc(Cbn),
                fwd,
                fwd_in: "x".into(),
                fwd_out: "b".into(),
                bwd,
                bwd_in: "y".into(),
                bwd_out: "a".into(),
            })
        }
        "exists-plus-dist" => {
            // (exists X:S. A X) (+) B ~ exists X:S. (A X (+) B); dual to
            // forall-with-dist, with the Inr side inventing a type.
            let ax = TypeExpr::app(tv("A"), tv("X"));
            let a = tapp2(names::SUM, exists_ty(s0, "X", ax.clone()), tv("B"));
            let b = exists_ty(s0, "X", tapp2(names::SUM, ax.clone(), tv("B")));
            let fwd = Command::new(
                Term::var("x"),
                Some(a.clone()),
                Cbv,
                CoTerm::Case(vec![
                    (
                        Pattern {
                            ctor: names::INL.into(),
                            ty_vars: vec![],
                            co_vars: vec![],
                            vars: vec!["pe".into()],
                        },
                        Command::new(
                            Term::var("pe"),
                            Some(exists_ty(s0, "X", ax.clone())),
                            Cbv,
                            CoTerm::Case(vec![(
                                Pattern {
                                    ctor: names::pack(s0),
                                    ty_vars: vec!["X".into()],
                                    co_vars: vec![],
                                    vars: vec!["pa".into()],
                                },
                                Command::new(
                                    Term::construct(
                                        names::pack(s0),
                                        vec![tv("X")],
                                        vec![],
                                        vec![Term::construct(
                                            names::INL,
                                            vec![],
                                            vec![],
                                            vec![Term::var("pa")],
                                        )],
                                    ),
                                    Some(b.clone()),
                                    Cbv,
                                    CoTerm::covar("b"),
                                ),
                            )]),
                        ),
                    ),
                    (
                        Pattern {
                            ctor: names::INR.into(),
                            ty_vars: vec![],
                            co_vars: vec![],
                            vars: vec!["pb".into()],
                        },
                        Command::new(
                            Term::construct(
                                names::pack(s0),
                                vec![canonical_type(s0)],
                                vec![],
                                vec![Term::construct(
                                    names::INR,
                                    vec![],
                                    vec![],
                                    vec![Term::var("pb")],
                                )],
                            ),
                            Some(b.clone()),
                            Cbv,
                            CoTerm::covar("b"),
                        ),
                    ),
                ]),
            );
            let bwd = Command::new(
                Term::var("y"),
                Some(b.clone()),
                Cbv,
                CoTerm::Case(vec![(
                    Pattern {
                        ctor: names::pack(s0),
                        ty_vars: vec!["X".into()],
                        co_vars: vec![],
                        vars: vec!["ps".into()],
                    },
                    Command::new(
                        Term::var("ps"),
                        Some(tapp2(names::SUM, ax.clone(), tv("B"))),
                        Cbv,
                        CoTerm::Case(vec![
                            (
                                Pattern {
                                    ctor: names::INL.into(),
                                    ty_vars: vec![],
                                    co_vars: vec![],
                                    vars: vec!["pa".into()],
                                },
                                Command::new(
                                    Term::construct(
                                        names::INL,
                                        vec![],
                                        vec![],
                                        vec![Term::construct(
                                            names::pack(s0),
                                            vec![tv("X")],
                                            vec![],
                                            vec![Term::var("pa")],
                                        )],
                                    ),
                                    Some(a.clone()),
                                    Cbv,
                                    CoTerm::covar("a"),
                                ),
                            ),
                            (
                                Pattern {
                                    ctor: names::INR.into(),
                                    ty_vars: vec![],
                                    co_vars: vec![],
                                    vars: vec!["pb".into()],
                                },
                                Command::new(
                                    Term::construct(
                                        names::INR,
                                        vec![],
                                        vec![],
                                        vec![Term::var("pb")],
                                    ),
                                    Some(a.clone()),
                                    Cbv,
                                    CoTerm::covar("a"),
                                ),
                            ),
                        ]),
                    ),
                )]),
            );
            Ok(IsoWitness {
                theta: vec![
                    ("A".into(), Kind::arrow(Kind::Disc(s0), v.clone())),
                    ("B".into(), v),
                ],
                a,
                b,
                kind: Kind::Disc(Cbv),
                fwd,
                fwd_in: "x".into(),
                fwd_out: "b".into(),
                bwd,
                bwd_in: "y".into(),
                bwd_out: "a".into(),
            })
        }
        other => ierr(format!("unknown law {other}")),
    }
}

/// The isomorphism between a declared connective and its core encoding,
/// built per the encoding-isomorphism construction: a match over the
/// source (co)patterns re-emitting the encoded shapes, and vice versa.
pub fn encoding_iso(sig: &SignatureTable, f: &str) -> Result<IsoWitness, IsoError> {
    let decl = sig
        .decl(f)
        .ok_or_else(|| IsoError {
            msg: format!("unknown connective {f}"),
        })?
        .clone();
    if sig.is_core(f) {
        return iso_refl(sig, &[], &TypeExpr::con(f));
    }
    let theta: Vec<(Name, Kind)> = decl.params.clone();
    let params: Vec<TypeExpr> = decl.params.iter().map(|(p, _)| TypeExpr::var(p.clone())).collect();
    let a = TypeExpr::apply(TypeExpr::con(f), params.clone());
    let b = normalize_type(&TypeExpr::apply(encode_type(sig, &TypeExpr::con(f)), params));
    let s = decl.result;

    // Canonical flat (co)patterns per xtor.
    let flat_pat = |x: &XtorSig| Pattern {
        ctor: x.name.clone(),
        ty_vars: x.quantified.iter().map(|(y, _)| y.clone()).collect(),
        co_vars: (0..x.co_inputs.len()).map(|j| format!("ka{j}")).collect(),
        vars: (0..x.term_inputs.len()).map(|j| format!("px{j}")).collect(),
    };
    let flat_copat = |x: &XtorSig| CoPattern {
        dtor: x.name.clone(),
        ty_vars: x.quantified.iter().map(|(y, _)| y.clone()).collect(),
        vars: (0..x.term_inputs.len()).map(|j| format!("px{j}")).collect(),
        co_vars: (0..x.co_inputs.len()).map(|j| format!("ka{j}")).collect(),
    };
    let pat_term = |p: &Pattern| Term::Construct {
        ctor: p.ctor.clone(),
        ty_args: p.ty_vars.iter().map(|t| TypeExpr::var(t.clone())).collect(),
        co_args: p.co_vars.iter().map(|a| CoTerm::covar(a.clone())).collect(),
        args: p.vars.iter().map(|x| Term::var(x.clone())).collect(),
    };
    let copat_coterm = |q: &CoPattern| CoTerm::Destruct {
        dtor: q.dtor.clone(),
        ty_args: q.ty_vars.iter().map(|t| TypeExpr::var(t.clone())).collect(),
        args: q.vars.iter().map(|x| Term::var(x.clone())).collect(),
        co_args: q.co_vars.iter().map(|a| CoTerm::covar(a.clone())).collect(),
    };

    match decl.polarity {
        Polarity::Data => {
            // fwd: match source patterns, emit encoded constructions.
            let mut fwd_branches = Vec::new();
            let mut bwd_branches = Vec::new();
            for x in &decl.xtors {
                let p = flat_pat(x);
                let np = encode_pattern(sig, &p).map_err(|e| IsoError { msg: e.msg })?;
                fwd_branches.push((
                    p.clone(),
                    Command::new(np.to_term(), Some(b.clone()), s, CoTerm::covar("b")),
                ));
                bwd_branches.push((
                    np,
                    Command::new(pat_term(&p), Some(a.clone()), s, CoTerm::covar("a")),
                ));
            }
            let fwd = Command::new(
                Term::var("x"),
                Some(a.clone()),
                s,
                CoTerm::Case(fwd_branches),
            );
            let bwd_matcher =
                flatten_case(sig, Some(&b), bwd_branches).map_err(|e| IsoError { msg: e.msg })?;
            let bwd = Command::new(Term::var("y"), Some(b.clone()), s, bwd_matcher);
            Ok(IsoWitness {
                theta,
                a,
                b,
                kind: Kind::Disc(s),
                fwd,
                fwd_in: "x".into(),
                fwd_out: "b".into(),
                bwd,
                bwd_in: "y".into(),
                bwd_out: "a".into(),
            })
        }
        Polarity::Codata => {
            let mut fwd_branches = Vec::new();
            let mut bwd_branches = Vec::new();
            for x in &decl.xtors {
                let q = flat_copat(x);
                let nq = encode_copattern(sig, &q).map_err(|e| IsoError { msg: e.msg })?;
                fwd_branches.push((
                    nq.clone(),
                    Command::new(Term::var("x"), Some(a.clone()), s, copat_coterm(&q)),
                ));
                bwd_branches.push((
                    q,
                    Command::new(Term::var("y"), Some(b.clone()), s, nq.to_coterm()),
                ));
            }
            let fwd_matcher =
                flatten_cocase(sig, Some(&b), fwd_branches).map_err(|e| IsoError { msg: e.msg })?;
            let fwd = Command::new(fwd_matcher, Some(b.clone()), s, CoTerm::covar("b"));
            let bwd = Command::new(
                Term::CoCase(bwd_branches),
                Some(a.clone()),
                s,
                CoTerm::covar("a"),
            );
            Ok(IsoWitness {
                theta,
                a,
                b,
                kind: Kind::Disc(s),
                fwd,
                fwd_in: "x".into(),
                fwd_out: "b".into(),
                bwd,
                bwd_in: "y".into(),
                bwd_out: "a".into(),
            })
        }
    }
}

// --------------------------------------------------------------------------
// Sample enumeration and observational checking
// --------------------------------------------------------------------------

const MAX_SAMPLES: usize = 8;
const MAX_DEPTH: usize = 5;

/// Exhaustively enumerate closed first-order values of a type: data
/// constructions over enumerated components, quantifiers instantiated at
/// the canonical types.
pub fn enumerate_values(sig: &SignatureTable, ty: &TypeExpr) -> Vec<Term> {
    enum_values(sig, ty, MAX_DEPTH)
}

fn enum_values(sig: &SignatureTable, ty: &TypeExpr, depth: usize) -> Vec<Term> {
    if depth == 0 {
        return vec![];
    }
    let tyn = normalize_type(ty);
    let (head, args) = tyn.spine();
    let name = match head {
        TypeExpr::Con(c) => c.clone(),
        _ => return vec![],
    };
    let decl = match sig.decl(&name) {
        Some(d) => d.clone(),
        None => return vec![],
    };
    if decl.polarity != Polarity::Data {
        return vec![];
    }
    let args: Vec<TypeExpr> = args.into_iter().cloned().collect();
    let mut out = Vec::new();
    'ctors: for x in &decl.xtors {
        // quantifier instantiations
        let quant_choices: Vec<Vec<TypeExpr>> = if x.quantified.is_empty() {
            vec![vec![]]
        } else {
            let mut choices = vec![vec![]];
            for (_, s) in &x.quantified {
                let opts = [canonical_type(*s), canonical_type_alt(*s)];
                let mut next = Vec::new();
                for c in &choices {
                    for o in &opts {
                        let mut c2: Vec<TypeExpr> = c.clone();
                        c2.push(o.clone());
                        next.push(c2);
                    }
                }
                choices = next;
            }
            choices
        };
        for quant in quant_choices {
            let inst = match crate::typing::instantiate_xtor(sig, &x.name, Some(&args), &quant) {
                Some(i) => i,
                None => continue 'ctors,
            };
            let mut co_choices: Vec<Vec<CoTerm>> = vec![vec![]];
            for (bty, _) in &inst.co_inputs {
                let bty = match bty {
                    Some(t) => t,
                    None => continue 'ctors,
                };
                let es = enum_covalues(sig, bty, depth - 1);
                if es.is_empty() {
                    co_choices.clear();
                    break;
                }
                let mut next = Vec::new();
                for c in &co_choices {
                    for e in &es {
                        let mut c2 = c.clone();
                        c2.push(e.clone());
                        next.push(c2);
                    }
                }
                co_choices = next;
            }
            let mut tm_choices: Vec<Vec<Term>> = vec![vec![]];
            for (aty, _) in &inst.term_inputs {
                let aty = match aty {
                    Some(t) => t,
                    None => continue 'ctors,
                };
                let vs = enum_values(sig, aty, depth - 1);
                if vs.is_empty() {
                    tm_choices.clear();
                    break;
                }
                let mut next = Vec::new();
                for c in &tm_choices {
                    for v in &vs {
                        let mut c2 = c.clone();
                        c2.push(v.clone());
                        next.push(c2);
                    }
                }
                tm_choices = next;
            }
            for co in &co_choices {
                for tm in &tm_choices {
                    out.push(Term::Construct {
                        ctor: x.name.clone(),
                        ty_args: quant.clone(),
                        co_args: co.clone(),
                        args: tm.clone(),
                    });
                    if out.len() >= MAX_SAMPLES {
                        return out;
                    }
                }
            }
        }
    }
    out
}

/// Exhaustively enumerate closed first-order covalues of a type: codata
/// destructions over enumerated components.
pub fn enumerate_covalues(sig: &SignatureTable, ty: &TypeExpr) -> Vec<CoTerm> {
    enum_covalues(sig, ty, MAX_DEPTH)
}

fn enum_covalues(sig: &SignatureTable, ty: &TypeExpr, depth: usize) -> Vec<CoTerm> {
    if depth == 0 {
        return vec![];
    }
    let tyn = normalize_type(ty);
    let (head, args) = tyn.spine();
    let name = match head {
        TypeExpr::Con(c) => c.clone(),
        _ => return vec![],
    };
    let decl = match sig.decl(&name) {
        Some(d) => d.clone(),
        None => return vec![],
    };
    if decl.polarity != Polarity::Codata {
        return vec![];
    }
    let args: Vec<TypeExpr> = args.into_iter().cloned().collect();
    let mut out = Vec::new();
    'dtors: for x in &decl.xtors {
        let quant_choices: Vec<Vec<TypeExpr>> = if x.quantified.is_empty() {
            vec![vec![]]
        } else {
            let mut choices = vec![vec![]];
            for (_, s) in &x.quantified {
                let opts = [canonical_type(*s), canonical_type_alt(*s)];
                let mut next = Vec::new();
                for c in &choices {
                    for o in &opts {
                        let mut c2: Vec<TypeExpr> = c.clone();
                        c2.push(o.clone());
                        next.push(c2);
                    }
                }
                choices = next;
            }
            choices
        };
        for quant in quant_choices {
            let inst = match crate::typing::instantiate_xtor(sig, &x.name, Some(&args), &quant) {
                Some(i) => i,
                None => continue 'dtors,
            };
            let mut tm_choices: Vec<Vec<Term>> = vec![vec![]];
            for (aty, _) in &inst.term_inputs {
                let aty = match aty {
                    Some(t) => t,
                    None => continue 'dtors,
                };
                let vs = enum_values(sig, aty, depth - 1);
                if vs.is_empty() {
                    tm_choices.clear();
                    break;
                }
                let mut next = Vec::new();
                for c in &tm_choices {
                    for v in &vs {
                        let mut c2 = c.clone();
                        c2.push(v.clone());
                        next.push(c2);
                    }
                }
                tm_choices = next;
            }
            let mut co_choices: Vec<Vec<CoTerm>> = vec![vec![]];
            for (bty, _) in &inst.co_inputs {
                let bty = match bty {
                    Some(t) => t,
                    None => continue 'dtors,
                };
                let es = enum_covalues(sig, bty, depth - 1);
                if es.is_empty() {
                    co_choices.clear();
                    break;
                }
                let mut next = Vec::new();
                for c in &co_choices {
                    for e in &es {
                        let mut c2 = c.clone();
                        c2.push(e.clone());
                        next.push(c2);
                    }
                }
                co_choices = next;
            }
            for tm in &tm_choices {
                for co in &co_choices {
                    out.push(CoTerm::Destruct {
                        dtor: x.name.clone(),
                        ty_args: quant.clone(),
                        args: tm.clone(),
                        co_args: co.clone(),
                    });
                    if out.len() >= MAX_SAMPLES {
                        return out;
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct IsoCheckLine {
    pub law: String,
    pub direction: &'static str,
    pub sample: String,
    pub pass: bool,
    pub steps: usize,
}

#[derive(Clone, Debug, Default)]
pub struct IsoReport {
    pub lines: Vec<IsoCheckLine>,
}

impl IsoReport {
    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn checked(&self) -> usize {
        self.lines.len()
    }
}

fn erased_eq_term(a: &Term, b: &Term) -> bool {
    alpha_eq_term_cfg(a, b, AlphaCfg { erase_types: true })
}

fn erased_eq_coterm(a: &CoTerm, b: &CoTerm) -> bool {
    alpha_eq_coterm_cfg(a, b, AlphaCfg { erase_types: true })
}

/// At `need`, a round trip can leave the demand wrapped in heap frames:
/// the covalue delivered to a needed variable has the shape
/// `mut x. H[< x | E >]`.  The observable demand is the forcing coterm at
/// the eye, so peel down to it before comparing.
fn peel_covalue(sig: &SignatureTable, e: &CoTerm) -> CoTerm {
    fn find_eye(sig: &SignatureTable, c: &Command, x: &str) -> Option<CoTerm> {
        if let Term::Var(y) = &c.term {
            if y == x && crate::machine::is_covalue(sig, &c.coterm, c.discipline) {
                return Some(c.coterm.clone());
            }
        }
        match (c.discipline, &c.term, &c.coterm) {
            (Discipline::Need, _, CoTerm::MuTilde(y, body)) if y != x => find_eye(sig, body, x),
            (Discipline::Coneed, Term::Mu(_, body), _) => find_eye(sig, body, x),
            _ => None,
        }
    }
    let mut cur = e.clone();
    loop {
        match &cur {
            CoTerm::MuTilde(x, body) => match find_eye(sig, body, x) {
                Some(next) => cur = next,
                None => return cur,
            },
            _ => return cur,
        }
    }
}

/// Dual of [`peel_covalue`] for `coneed` values `mu a. H[< V | a >]`.
fn peel_value(sig: &SignatureTable, v: &Term) -> Term {
    fn find_eye(sig: &SignatureTable, c: &Command, a: &str) -> Option<Term> {
        if let CoTerm::CoVar(b) = &c.coterm {
            if b == a && crate::machine::is_value(sig, &c.term, c.discipline) {
                return Some(c.term.clone());
            }
        }
        match (c.discipline, &c.term, &c.coterm) {
            (Discipline::Coneed, Term::Mu(b, body), _) if b != a => find_eye(sig, body, a),
            (Discipline::Need, _, CoTerm::MuTilde(_, body)) => find_eye(sig, body, a),
            _ => None,
        }
    }
    let mut cur = v.clone();
    loop {
        match &cur {
            Term::Mu(a, body) => match find_eye(sig, body, a) {
                Some(next) => cur = next,
                None => return cur,
            },
            _ => return cur,
        }
    }
}

/// For each closed first-order sample of `A` (values if `A` is a data
/// type, covalues if codata), run the round trip against the identity and
/// compare statuses, needed sets, and eye (co)terms; then repeat in the
/// `B` direction with samples obtained by pushing forward.
pub fn check_iso_observational(
    sig: &SignatureTable,
    name: &str,
    w: &IsoWitness,
    fuel: usize,
) -> Result<IsoReport, IsoError> {
    if !w.theta.is_empty() {
        return ierr("observational check requires a closed witness instance");
    }
    let s = base_disc(&w.kind)?;
    let mut report = IsoReport::default();

    // A -> B -> A on values, then B -> A -> B on pushed-forward values.
    let a_vals = enumerate_values(sig, &w.a);
    let mut b_vals: Vec<Term> = Vec::new();
    for v in &a_vals {
        let rt = round_trip_term(w, s, v, false);
        let (pass, steps, _eye) = compare_value_run(sig, s, &w.a, &rt, v, fuel);
        report.lines.push(IsoCheckLine {
            law: name.into(),
            direction: "A->B->A value",
            sample: crate::surface::print_term(v),
            pass,
            steps,
        });
        // push forward to collect a B sample
        if let Some(bv) = push_term(sig, w, s, v, fuel, false) {
            if !b_vals.iter().any(|u| erased_eq_term(u, &bv)) {
                b_vals.push(bv);
            }
        }
    }
    for v in &b_vals {
        let rt = round_trip_term(w, s, v, true);
        let (pass, steps, _eye) = compare_value_run(sig, s, &w.b, &rt, v, fuel);
        report.lines.push(IsoCheckLine {
            law: name.into(),
            direction: "B->A->B value",
            sample: crate::surface::print_term(v),
            pass,
            steps,
        });
    }

    // Covalue directions.
    let a_cov = enumerate_covalues(sig, &w.a);
    let mut b_cov: Vec<CoTerm> = Vec::new();
    for e in &a_cov {
        let rt = round_trip_coterm(w, s, e, false);
        let (pass, steps) = compare_covalue_run(sig, s, &w.a, &rt, e, fuel);
        report.lines.push(IsoCheckLine {
            law: name.into(),
            direction: "A->B->A covalue",
            sample: crate::surface::print_coterm(e),
            pass,
            steps,
        });
        if let Some(be) = push_coterm(sig, w, s, e, fuel) {
            if !b_cov.iter().any(|u| erased_eq_coterm(u, &be)) {
                b_cov.push(be);
            }
        }
    }
    for e in &b_cov {
        let rt = round_trip_coterm(w, s, e, true);
        let (pass, steps) = compare_covalue_run(sig, s, &w.b, &rt, e, fuel);
        report.lines.push(IsoCheckLine {
            law: name.into(),
            direction: "B->A->B covalue",
            sample: crate::surface::print_coterm(e),
            pass,
            steps,
        });
    }
    Ok(report)
}

/// `C'[C[v]]` (or the reverse when `from_b`).
fn round_trip_term(w: &IsoWitness, s: Discipline, v: &Term, from_b: bool) -> Term {
    let (w1, w2) = if from_b {
        (iso_symm(w), w.clone())
    } else {
        (w.clone(), iso_symm(w))
    };
    // C[v] = mu out. < v | A | mut in. fwd >
    let once = |ww: &IsoWitness, v: &Term| {
        Term::mu(
            ww.fwd_out.clone(),
            Command::new(
                v.clone(),
                Some(ww.a.clone()),
                s,
                CoTerm::mu_tilde(ww.fwd_in.clone(), ww.fwd.clone()),
            ),
        )
    };
    let through = once(&w1, v);
    once(&w2, &through)
}

fn compare_value_run(
    sig: &SignatureTable,
    s: Discipline,
    ty: &TypeExpr,
    round_trip: &Term,
    original: &Term,
    fuel: usize,
) -> (bool, usize, Option<Term>) {
    let res = "res".to_string();
    let c1 = Command::new(round_trip.clone(), Some(ty.clone()), s, CoTerm::covar(res.clone()));
    let c0 = Command::new(original.clone(), Some(ty.clone()), s, CoTerm::covar(res.clone()));
    let o1 = run(sig, &c1, fuel);
    let o0 = run(sig, &c0, fuel);
    let pass = o1.status == Status::Finished
        && o0.status == Status::Finished
        && o1.needed.covars == o0.needed.covars
        && o1.needed.vars == o0.needed.vars
        && match (o1.needed.eyes_covar.get(&res), o0.needed.eyes_covar.get(&res)) {
            (Some(v1), Some(v0)) => {
                erased_eq_term(&peel_value(sig, v1), &peel_value(sig, v0))
            }
            _ => false,
        };
    (pass, o1.steps, o1.needed.eyes_covar.get(&res).cloned())
}

/// Convert a sample across the iso and read off the delivered value.
fn push_term(
    sig: &SignatureTable,
    w: &IsoWitness,
    s: Discipline,
    v: &Term,
    fuel: usize,
    from_b: bool,
) -> Option<Term> {
    let ww = if from_b { iso_symm(w) } else { w.clone() };
    let conv = Term::mu(
        ww.fwd_out.clone(),
        Command::new(
            v.clone(),
            Some(ww.a.clone()),
            s,
            CoTerm::mu_tilde(ww.fwd_in.clone(), ww.fwd.clone()),
        ),
    );
    let res = "res".to_string();
    let c = Command::new(conv, Some(ww.b.clone()), s, CoTerm::covar(res.clone()));
    let o = run(sig, &c, fuel);
    if o.status == Status::Finished {
        o.needed.eyes_covar.get(&res).map(|v| peel_value(sig, v))
    } else {
        None
    }
}

/// Coterm round trip `C_e'[C_e[e]]`.
fn round_trip_coterm(w: &IsoWitness, s: Discipline, e: &CoTerm, from_b: bool) -> CoTerm {
    let (w1, w2) = if from_b {
        (iso_symm(w), w.clone())
    } else {
        (w.clone(), iso_symm(w))
    };
    // convert an A-consumer to a B-consumer: mut bwd_in. < mu bwd_out. bwd | A | e >
    let once = |ww: &IsoWitness, e: &CoTerm| {
        CoTerm::mu_tilde(
            ww.bwd_in.clone(),
            Command::new(
                Term::mu(ww.bwd_out.clone(), ww.bwd.clone()),
                Some(ww.a.clone()),
                s,
                e.clone(),
            ),
        )
    };
    let through = once(&w1, e);
    once(&w2, &through)
}

fn compare_covalue_run(
    sig: &SignatureTable,
    s: Discipline,
    ty: &TypeExpr,
    round_trip: &CoTerm,
    original: &CoTerm,
    fuel: usize,
) -> (bool, usize) {
    let probe = "probe".to_string();
    let c1 = Command::new(Term::var(probe.clone()), Some(ty.clone()), s, round_trip.clone());
    let c0 = Command::new(Term::var(probe.clone()), Some(ty.clone()), s, original.clone());
    let o1 = run(sig, &c1, fuel);
    let o0 = run(sig, &c0, fuel);
    let pass = o1.status == Status::Finished
        && o0.status == Status::Finished
        && o1.needed.vars == o0.needed.vars
        && o1.needed.covars == o0.needed.covars
        && match (o1.needed.eyes_var.get(&probe), o0.needed.eyes_var.get(&probe)) {
            (Some(e1), Some(e0)) => {
                erased_eq_coterm(&peel_covalue(sig, e1), &peel_covalue(sig, e0))
            }
            _ => false,
        };
    (pass, o1.steps)
}

fn push_coterm(
    sig: &SignatureTable,
    w: &IsoWitness,
    s: Discipline,
    e: &CoTerm,
    fuel: usize,
) -> Option<CoTerm> {
    let conv = CoTerm::mu_tilde(
        w.bwd_in.clone(),
        Command::new(
            Term::mu(w.bwd_out.clone(), w.bwd.clone()),
            Some(w.a.clone()),
            s,
            e.clone(),
        ),
    );
    let probe = "probe".to_string();
    let c = Command::new(Term::var(probe.clone()), Some(w.b.clone()), s, conv);
    let o = run(sig, &c, fuel);
    if o.status == Status::Finished {
        o.needed.eyes_var.get(&probe).map(|e| peel_covalue(sig, e))
    } else {
        None
    }
}

/// Default small instantiations for a law's free type arguments: positive
/// arguments range over 1 and 1+1, negative over ⊥ and ∼1, type functions
/// over matching constant functions.
pub fn default_instantiations(theta: &[(Name, Kind)]) -> Vec<Vec<TypeExpr>> {
    fn options(k: &Kind) -> Vec<TypeExpr> {
        match k {
            Kind::Disc(Cbv) => vec![
                TypeExpr::con(names::ONE),
                TypeExpr::apply(
                    TypeExpr::con(names::SUM),
                    [TypeExpr::con(names::ONE), TypeExpr::con(names::ONE)],
                ),
            ],
            Kind::Disc(Cbn) => vec![
                TypeExpr::con(names::BOT),
                TypeExpr::app(TypeExpr::con(names::NEG), TypeExpr::con(names::ONE)),
            ],
            Kind::Disc(s) => vec![canonical_type(*s), canonical_type_alt(*s)],
            Kind::Arrow(dom, cod) => {
                let s = dom.as_base().unwrap_or(Cbv);
                options(cod)
                    .into_iter()
                    .map(|t| TypeExpr::lam("Zc", Kind::Disc(s), t))
                    .collect()
            }
        }
    }
    if theta.is_empty() {
        return vec![vec![]];
    }
    // Two instantiations: all-first options and all-second options.
    let firsts: Vec<TypeExpr> = theta
        .iter()
        .map(|(_, k)| options(k).into_iter().next().unwrap())
        .collect();
    let seconds: Vec<TypeExpr> = theta
        .iter()
        .map(|(_, k)| {
            let os = options(k);
            os.last().unwrap().clone()
        })
        .collect();
    vec![firsts, seconds]
}

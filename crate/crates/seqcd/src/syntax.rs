//! Abstract syntax of the calculus: types, kinds, commands, terms, coterms,
//! patterns, and declarations, together with the binding machinery
//! (free-variable computation, alpha-equality, capture-avoiding
//! substitution, deterministic freshening).

use std::collections::BTreeSet;
use std::fmt;

pub type Name = String;

/// Evaluation discipline attached to every command.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Discipline {
    Cbv,
    Cbn,
    Need,
    Coneed,
}

impl Discipline {
    pub const ALL: [Discipline; 4] = [
        Discipline::Cbv,
        Discipline::Cbn,
        Discipline::Need,
        Discipline::Coneed,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Discipline::Cbv => "v",
            Discipline::Cbn => "n",
            Discipline::Need => "need",
            Discipline::Coneed => "coneed",
        }
    }

    pub fn from_token(s: &str) -> Option<Discipline> {
        match s {
            "v" => Some(Discipline::Cbv),
            "n" => Some(Discipline::Cbn),
            "need" => Some(Discipline::Need),
            "coneed" => Some(Discipline::Coneed),
            _ => None,
        }
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Kinds classify types: base kinds are disciplines, arrows classify
/// type-level functions.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Kind {
    Disc(Discipline),
    Arrow(Box<Kind>, Box<Kind>),
}

impl Kind {
    pub fn arrow(dom: Kind, cod: Kind) -> Kind {
        Kind::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn base(self_: Discipline) -> Kind {
        Kind::Disc(self_)
    }

    pub fn as_base(&self) -> Option<Discipline> {
        match self {
            Kind::Disc(s) => Some(*s),
            Kind::Arrow(..) => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Disc(s) => write!(f, "{s}"),
            Kind::Arrow(k, l) => match **k {
                Kind::Arrow(..) => write!(f, "({k}) -> {l}"),
                _ => write!(f, "{k} -> {l}"),
            },
        }
    }
}

/// Applicative type expressions over connective names, with type-level
/// lambda.  Equality of types is alpha-equality (see [`TypeExpr::alpha_eq`]);
/// the semantic equality used by the checker normalizes first.
#[derive(Clone, Debug)]
pub enum TypeExpr {
    Var(Name),
    Con(Name),
    Lam(Name, Kind, Box<TypeExpr>),
    App(Box<TypeExpr>, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn var(n: impl Into<Name>) -> TypeExpr {
        TypeExpr::Var(n.into())
    }

    pub fn con(n: impl Into<Name>) -> TypeExpr {
        TypeExpr::Con(n.into())
    }

    pub fn lam(x: impl Into<Name>, k: Kind, body: TypeExpr) -> TypeExpr {
        TypeExpr::Lam(x.into(), k, Box::new(body))
    }

    pub fn app(f: TypeExpr, a: TypeExpr) -> TypeExpr {
        TypeExpr::App(Box::new(f), Box::new(a))
    }

    /// `F A1 .. An` as a left-nested application spine.
    pub fn apply(head: TypeExpr, args: impl IntoIterator<Item = TypeExpr>) -> TypeExpr {
        args.into_iter().fold(head, TypeExpr::app)
    }

    /// Decompose a left-nested application spine into head and arguments.
    pub fn spine(&self) -> (&TypeExpr, Vec<&TypeExpr>) {
        let mut args = Vec::new();
        let mut head = self;
        while let TypeExpr::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    pub fn free_tyvars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fn go(t: &TypeExpr, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
            match t {
                TypeExpr::Var(x) => {
                    if !bound.iter().any(|b| b == x) {
                        out.insert(x.clone());
                    }
                }
                TypeExpr::Con(_) => {}
                TypeExpr::Lam(x, _, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                TypeExpr::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every connective name mentioned anywhere in the type.
    pub fn connectives(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fn go(t: &TypeExpr, out: &mut BTreeSet<Name>) {
            match t {
                TypeExpr::Var(_) => {}
                TypeExpr::Con(c) => {
                    out.insert(c.clone());
                }
                TypeExpr::Lam(_, _, b) => go(b, out),
                TypeExpr::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    pub fn alpha_eq(&self, other: &TypeExpr) -> bool {
        fn go(a: &TypeExpr, b: &TypeExpr, env: &mut Vec<(Name, Name)>) -> bool {
            match (a, b) {
                (TypeExpr::Var(x), TypeExpr::Var(y)) => {
                    for (l, r) in env.iter().rev() {
                        if l == x || r == y {
                            return l == x && r == y;
                        }
                    }
                    x == y
                }
                (TypeExpr::Con(c), TypeExpr::Con(d)) => c == d,
                (TypeExpr::Lam(x, k1, b1), TypeExpr::Lam(y, k2, b2)) => {
                    if k1 != k2 {
                        return false;
                    }
                    env.push((x.clone(), y.clone()));
                    let r = go(b1, b2, env);
                    env.pop();
                    r
                }
                (TypeExpr::App(f1, a1), TypeExpr::App(f2, a2)) => {
                    go(f1, f2, env) && go(a1, a2, env)
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }

    /// Capture-avoiding substitution of type variables.
    pub fn subst_tyvars(&self, map: &[(Name, TypeExpr)]) -> TypeExpr {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            TypeExpr::Var(x) => map
                .iter()
                .rev()
                .find(|(n, _)| n == x)
                .map(|(_, t)| t.clone())
                .unwrap_or_else(|| self.clone()),
            TypeExpr::Con(_) => self.clone(),
            TypeExpr::Lam(x, k, body) => {
                let live: Vec<(Name, TypeExpr)> = map
                    .iter()
                    .filter(|(n, _)| n != x)
                    .cloned()
                    .collect();
                if live.is_empty() {
                    return self.clone();
                }
                let mut range_free = BTreeSet::new();
                for (_, t) in &live {
                    range_free.extend(t.free_tyvars());
                }
                if range_free.contains(x) {
                    let mut avoid = range_free;
                    avoid.extend(body.free_tyvars());
                    let x2 = fresh(x, &avoid);
                    let renamed = body.subst_tyvars(&[(x.clone(), TypeExpr::var(x2.clone()))]);
                    TypeExpr::lam(x2, k.clone(), renamed.subst_tyvars(&live))
                } else {
                    TypeExpr::lam(x.clone(), k.clone(), body.subst_tyvars(&live))
                }
            }
            TypeExpr::App(f, a) => {
                TypeExpr::app(f.subst_tyvars(map), a.subst_tyvars(map))
            }
        }
    }
}

/// Source location (byte offsets) carried by parsed commands.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

/// A cut pairing a producer with a consumer under a type-or-wildcard
/// annotation and a discipline.  The annotation is `None` in
/// discipline-only mode; the discipline always drives evaluation.
#[derive(Clone, Debug)]
pub struct Command {
    pub term: Term,
    pub annotation: Option<TypeExpr>,
    pub discipline: Discipline,
    pub coterm: CoTerm,
    pub span: Option<Span>,
}

impl Command {
    pub fn new(
        term: Term,
        annotation: Option<TypeExpr>,
        discipline: Discipline,
        coterm: CoTerm,
    ) -> Command {
        Command {
            term,
            annotation,
            discipline,
            coterm,
            span: None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Term {
    Var(Name),
    Mu(Name, Box<Command>),
    Construct {
        ctor: Name,
        ty_args: Vec<TypeExpr>,
        co_args: Vec<CoTerm>,
        args: Vec<Term>,
    },
    CoCase(Vec<(CoPattern, Command)>),
}

#[derive(Clone, Debug)]
pub enum CoTerm {
    CoVar(Name),
    MuTilde(Name, Box<Command>),
    Destruct {
        dtor: Name,
        ty_args: Vec<TypeExpr>,
        args: Vec<Term>,
        co_args: Vec<CoTerm>,
    },
    Case(Vec<(Pattern, Command)>),
}

impl Term {
    pub fn var(n: impl Into<Name>) -> Term {
        Term::Var(n.into())
    }

    pub fn mu(a: impl Into<Name>, c: Command) -> Term {
        Term::Mu(a.into(), Box::new(c))
    }

    pub fn construct(
        ctor: impl Into<Name>,
        ty_args: Vec<TypeExpr>,
        co_args: Vec<CoTerm>,
        args: Vec<Term>,
    ) -> Term {
        Term::Construct {
            ctor: ctor.into(),
            ty_args,
            co_args,
            args,
        }
    }
}

impl CoTerm {
    pub fn covar(n: impl Into<Name>) -> CoTerm {
        CoTerm::CoVar(n.into())
    }

    pub fn mu_tilde(x: impl Into<Name>, c: Command) -> CoTerm {
        CoTerm::MuTilde(x.into(), Box::new(c))
    }

    pub fn destruct(
        dtor: impl Into<Name>,
        ty_args: Vec<TypeExpr>,
        args: Vec<Term>,
        co_args: Vec<CoTerm>,
    ) -> CoTerm {
        CoTerm::Destruct {
            dtor: dtor.into(),
            ty_args,
            args,
            co_args,
        }
    }
}

/// Flat constructor pattern `K {Xs} [as] (xs)`: binds type variables,
/// covariables for the coterm inputs, and variables for the term inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub ctor: Name,
    pub ty_vars: Vec<Name>,
    pub co_vars: Vec<Name>,
    pub vars: Vec<Name>,
}

/// Flat destructor copattern `O {Xs} (xs) [as]`, dual to [`Pattern`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoPattern {
    pub dtor: Name,
    pub ty_vars: Vec<Name>,
    pub vars: Vec<Name>,
    pub co_vars: Vec<Name>,
}

/// Whether a declaration introduces a data type (constructors, consumed by
/// case) or a codata type (destructors, produced by cocase).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Polarity {
    Data,
    Codata,
}

/// One constructor or destructor signature inside a declaration.
#[derive(Clone, Debug)]
pub struct XtorSig {
    pub name: Name,
    /// Existentially (data) / universally (codata) quantified parameters.
    pub quantified: Vec<(Name, Discipline)>,
    pub term_inputs: Vec<(TypeExpr, Discipline)>,
    pub co_inputs: Vec<(TypeExpr, Discipline)>,
}

/// A (co)data signature.  Non-recursive by construction: its component
/// types may only mention previously declared connectives.
#[derive(Clone, Debug)]
pub struct Declaration {
    pub polarity: Polarity,
    pub name: Name,
    pub params: Vec<(Name, Kind)>,
    pub result: Discipline,
    pub xtors: Vec<XtorSig>,
}

/// The free names of an expression, split by syntactic class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeNames {
    pub vars: BTreeSet<Name>,
    pub covars: BTreeSet<Name>,
    pub tyvars: BTreeSet<Name>,
}

impl FreeNames {
    pub fn union(mut self, other: FreeNames) -> FreeNames {
        self.vars.extend(other.vars);
        self.covars.extend(other.covars);
        self.tyvars.extend(other.tyvars);
        self
    }

    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut s = self.vars.clone();
        s.extend(self.covars.iter().cloned());
        s.extend(self.tyvars.iter().cloned());
        s
    }
}

/// Deterministic fresh-name choice: returns `hint` when available, else
/// `hint0`, `hint1`, ... scanning in order.
pub fn fresh(hint: &str, avoid: &BTreeSet<Name>) -> Name {
    if !avoid.contains(hint) {
        return hint.to_string();
    }
    let mut i = 0usize;
    loop {
        let cand = format!("{hint}{i}");
        if !avoid.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}

/// Like [`fresh`] but skipping the first `seed` candidates; used to realize
/// "different fresh-name seeds" in alpha-invariance tests.
pub fn fresh_seeded(hint: &str, avoid: &BTreeSet<Name>, seed: usize) -> Name {
    let mut picked = 0usize;
    if !avoid.contains(hint) {
        if picked == seed {
            return hint.to_string();
        }
        picked += 1;
    }
    let mut i = 0usize;
    loop {
        let cand = format!("{hint}{i}");
        if !avoid.contains(&cand) {
            if picked == seed {
                return cand;
            }
            picked += 1;
        }
        i += 1;
    }
}

pub fn free_command(c: &Command) -> FreeNames {
    let mut f = free_term(&c.term).union(free_coterm(&c.coterm));
    if let Some(a) = &c.annotation {
        f.tyvars.extend(a.free_tyvars());
    }
    f
}

pub fn free_term(t: &Term) -> FreeNames {
    match t {
        Term::Var(x) => {
            let mut f = FreeNames::default();
            f.vars.insert(x.clone());
            f
        }
        Term::Mu(a, c) => {
            let mut f = free_command(c);
            f.covars.remove(a);
            f
        }
        Term::Construct {
            ty_args,
            co_args,
            args,
            ..
        } => {
            let mut f = FreeNames::default();
            for t in ty_args {
                f.tyvars.extend(t.free_tyvars());
            }
            for e in co_args {
                f = f.union(free_coterm(e));
            }
            for v in args {
                f = f.union(free_term(v));
            }
            f
        }
        Term::CoCase(branches) => {
            let mut f = FreeNames::default();
            for (q, c) in branches {
                let mut g = free_command(c);
                for x in &q.vars {
                    g.vars.remove(x);
                }
                for a in &q.co_vars {
                    g.covars.remove(a);
                }
                for t in &q.ty_vars {
                    g.tyvars.remove(t);
                }
                f = f.union(g);
            }
            f
        }
    }
}

pub fn free_coterm(e: &CoTerm) -> FreeNames {
    match e {
        CoTerm::CoVar(a) => {
            let mut f = FreeNames::default();
            f.covars.insert(a.clone());
            f
        }
        CoTerm::MuTilde(x, c) => {
            let mut f = free_command(c);
            f.vars.remove(x);
            f
        }
        CoTerm::Destruct {
            ty_args,
            args,
            co_args,
            ..
        } => {
            let mut f = FreeNames::default();
            for t in ty_args {
                f.tyvars.extend(t.free_tyvars());
            }
            for v in args {
                f = f.union(free_term(v));
            }
            for e in co_args {
                f = f.union(free_coterm(e));
            }
            f
        }
        CoTerm::Case(branches) => {
            let mut f = FreeNames::default();
            for (p, c) in branches {
                let mut g = free_command(c);
                for x in &p.vars {
                    g.vars.remove(x);
                }
                for a in &p.co_vars {
                    g.covars.remove(a);
                }
                for t in &p.ty_vars {
                    g.tyvars.remove(t);
                }
                f = f.union(g);
            }
            f
        }
    }
}

/// A simultaneous map from type variables to types, variables to terms, and
/// covariables to coterms.  Discipline validity of the ranges is a separate
/// check (`typing::check_subst`); substitution itself is untyped.
#[derive(Clone, Debug, Default)]
pub struct Subst {
    pub types: Vec<(Name, TypeExpr)>,
    pub terms: Vec<(Name, Term)>,
    pub coterms: Vec<(Name, CoTerm)>,
}

impl Subst {
    pub fn one_term(x: impl Into<Name>, v: Term) -> Subst {
        Subst {
            terms: vec![(x.into(), v)],
            ..Default::default()
        }
    }

    pub fn one_coterm(a: impl Into<Name>, e: CoTerm) -> Subst {
        Subst {
            coterms: vec![(a.into(), e)],
            ..Default::default()
        }
    }

    pub fn one_type(x: impl Into<Name>, t: TypeExpr) -> Subst {
        Subst {
            types: vec![(x.into(), t)],
            ..Default::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty() && self.terms.is_empty() && self.coterms.is_empty()
    }

    fn lookup_term(&self, x: &str) -> Option<&Term> {
        self.terms.iter().rev().find(|(n, _)| n == x).map(|(_, v)| v)
    }

    fn lookup_coterm(&self, a: &str) -> Option<&CoTerm> {
        self.coterms.iter().rev().find(|(n, _)| n == a).map(|(_, e)| e)
    }

    fn without_var(&self, x: &str) -> Subst {
        Subst {
            types: self.types.clone(),
            terms: self.terms.iter().filter(|(n, _)| n != x).cloned().collect(),
            coterms: self.coterms.clone(),
        }
    }

    fn without_covar(&self, a: &str) -> Subst {
        Subst {
            types: self.types.clone(),
            terms: self.terms.clone(),
            coterms: self.coterms.iter().filter(|(n, _)| n != a).cloned().collect(),
        }
    }

    fn without_tyvar(&self, t: &str) -> Subst {
        Subst {
            types: self.types.iter().filter(|(n, _)| n != t).cloned().collect(),
            terms: self.terms.clone(),
            coterms: self.coterms.clone(),
        }
    }

    /// Names that occur free in any range of this substitution.
    fn range_free(&self) -> FreeNames {
        let mut f = FreeNames::default();
        for (_, t) in &self.types {
            f.tyvars.extend(t.free_tyvars());
        }
        for (_, v) in &self.terms {
            f = f.union(free_term(v));
        }
        for (_, e) in &self.coterms {
            f = f.union(free_coterm(e));
        }
        f
    }
}

/// Capture-avoiding simultaneous substitution on commands; bound names are
/// renamed deterministically when they would capture.
pub fn subst_command(c: &Command, rho: &Subst) -> Command {
    subst_command_seeded(c, rho, 0)
}

pub fn subst_command_seeded(c: &Command, rho: &Subst, seed: usize) -> Command {
    if rho.is_empty() {
        return c.clone();
    }
    Command {
        term: subst_term_seeded(&c.term, rho, seed),
        annotation: c.annotation.as_ref().map(|a| a.subst_tyvars(&rho.types)),
        discipline: c.discipline,
        coterm: subst_coterm_seeded(&c.coterm, rho, seed),
        span: c.span,
    }
}

pub fn subst_term(t: &Term, rho: &Subst) -> Term {
    subst_term_seeded(t, rho, 0)
}

pub fn subst_coterm(e: &CoTerm, rho: &Subst) -> CoTerm {
    subst_coterm_seeded(e, rho, 0)
}

fn binder_avoid(rho: &Subst, body_free: &FreeNames) -> BTreeSet<Name> {
    let mut avoid = rho.range_free().all_names();
    avoid.extend(body_free.all_names());
    for (n, _) in &rho.terms {
        avoid.insert(n.clone());
    }
    for (n, _) in &rho.coterms {
        avoid.insert(n.clone());
    }
    for (n, _) in &rho.types {
        avoid.insert(n.clone());
    }
    avoid
}

pub fn subst_term_seeded(t: &Term, rho: &Subst, seed: usize) -> Term {
    match t {
        Term::Var(x) => rho.lookup_term(x).cloned().unwrap_or_else(|| t.clone()),
        Term::Mu(a, body) => {
            let live = rho.without_covar(a);
            if live.is_empty() {
                return t.clone();
            }
            if live.range_free().covars.contains(a) {
                let avoid = binder_avoid(&live, &free_command(body));
                let a2 = fresh_seeded(a, &avoid, seed);
                let renamed =
                    subst_command(body, &Subst::one_coterm(a.clone(), CoTerm::covar(a2.clone())));
                Term::Mu(a2, Box::new(subst_command_seeded(&renamed, &live, seed)))
            } else {
                Term::Mu(a.clone(), Box::new(subst_command_seeded(body, &live, seed)))
            }
        }
        Term::Construct {
            ctor,
            ty_args,
            co_args,
            args,
        } => Term::Construct {
            ctor: ctor.clone(),
            ty_args: ty_args.iter().map(|t| t.subst_tyvars(&rho.types)).collect(),
            co_args: co_args
                .iter()
                .map(|e| subst_coterm_seeded(e, rho, seed))
                .collect(),
            args: args.iter().map(|v| subst_term_seeded(v, rho, seed)).collect(),
        },
        Term::CoCase(branches) => Term::CoCase(
            branches
                .iter()
                .map(|(q, c)| {
                    let (q2, c2) = subst_branch_co(q, c, rho, seed);
                    (q2, c2)
                })
                .collect(),
        ),
    }
}

pub fn subst_coterm_seeded(e: &CoTerm, rho: &Subst, seed: usize) -> CoTerm {
    match e {
        CoTerm::CoVar(a) => rho.lookup_coterm(a).cloned().unwrap_or_else(|| e.clone()),
        CoTerm::MuTilde(x, body) => {
            let live = rho.without_var(x);
            if live.is_empty() {
                return e.clone();
            }
            if live.range_free().vars.contains(x) {
                let avoid = binder_avoid(&live, &free_command(body));
                let x2 = fresh_seeded(x, &avoid, seed);
                let renamed =
                    subst_command(body, &Subst::one_term(x.clone(), Term::var(x2.clone())));
                CoTerm::MuTilde(x2, Box::new(subst_command_seeded(&renamed, &live, seed)))
            } else {
                CoTerm::MuTilde(x.clone(), Box::new(subst_command_seeded(body, &live, seed)))
            }
        }
        CoTerm::Destruct {
            dtor,
            ty_args,
            args,
            co_args,
        } => CoTerm::Destruct {
            dtor: dtor.clone(),
            ty_args: ty_args.iter().map(|t| t.subst_tyvars(&rho.types)).collect(),
            args: args.iter().map(|v| subst_term_seeded(v, rho, seed)).collect(),
            co_args: co_args
                .iter()
                .map(|e| subst_coterm_seeded(e, rho, seed))
                .collect(),
        },
        CoTerm::Case(branches) => CoTerm::Case(
            branches
                .iter()
                .map(|(p, c)| {
                    let (p2, c2) = subst_branch(p, c, rho, seed);
                    (p2, c2)
                })
                .collect(),
        ),
    }
}

fn subst_branch(p: &Pattern, body: &Command, rho: &Subst, seed: usize) -> (Pattern, Command) {
    let mut live = rho.clone();
    for x in &p.vars {
        live = live.without_var(x);
    }
    for a in &p.co_vars {
        live = live.without_covar(a);
    }
    for t in &p.ty_vars {
        live = live.without_tyvar(t);
    }
    if live.is_empty() {
        return (p.clone(), body.clone());
    }
    let range = live.range_free();
    let captured_vars: Vec<&Name> = p.vars.iter().filter(|x| range.vars.contains(*x)).collect();
    let captured_covars: Vec<&Name> =
        p.co_vars.iter().filter(|a| range.covars.contains(*a)).collect();
    let captured_tyvars: Vec<&Name> =
        p.ty_vars.iter().filter(|t| range.tyvars.contains(*t)).collect();
    if captured_vars.is_empty() && captured_covars.is_empty() && captured_tyvars.is_empty() {
        return (p.clone(), subst_command_seeded(body, &live, seed));
    }
    let mut avoid = binder_avoid(&live, &free_command(body));
    let mut rename = Subst::default();
    let mut p2 = p.clone();
    for x in &mut p2.vars {
        if captured_vars.iter().any(|c| *c == x) {
            let nx = fresh_seeded(x, &avoid, seed);
            avoid.insert(nx.clone());
            rename.terms.push((x.clone(), Term::var(nx.clone())));
            *x = nx;
        }
    }
    for a in &mut p2.co_vars {
        if captured_covars.iter().any(|c| *c == a) {
            let na = fresh_seeded(a, &avoid, seed);
            avoid.insert(na.clone());
            rename.coterms.push((a.clone(), CoTerm::covar(na.clone())));
            *a = na;
        }
    }
    for t in &mut p2.ty_vars {
        if captured_tyvars.iter().any(|c| *c == t) {
            let nt = fresh_seeded(t, &avoid, seed);
            avoid.insert(nt.clone());
            rename.types.push((t.clone(), TypeExpr::var(nt.clone())));
            *t = nt;
        }
    }
    let renamed = subst_command(body, &rename);
    (p2, subst_command_seeded(&renamed, &live, seed))
}

fn subst_branch_co(q: &CoPattern, body: &Command, rho: &Subst, seed: usize) -> (CoPattern, Command) {
    let p = Pattern {
        ctor: q.dtor.clone(),
        ty_vars: q.ty_vars.clone(),
        co_vars: q.co_vars.clone(),
        vars: q.vars.clone(),
    };
    let (p2, c2) = subst_branch(&p, body, rho, seed);
    (
        CoPattern {
            dtor: p2.ctor,
            ty_vars: p2.ty_vars,
            vars: p2.vars,
            co_vars: p2.co_vars,
        },
        c2,
    )
}

/// Alpha-equality configuration: `erase_types` ignores type annotations and
/// type arguments, the comparison used for observational results.
#[derive(Clone, Copy, Default)]
pub struct AlphaCfg {
    pub erase_types: bool,
}

struct AlphaEnv {
    vars: Vec<(Name, Name)>,
    covars: Vec<(Name, Name)>,
    tyvars: Vec<(Name, Name)>,
}

impl AlphaEnv {
    fn new() -> AlphaEnv {
        AlphaEnv {
            vars: Vec::new(),
            covars: Vec::new(),
            tyvars: Vec::new(),
        }
    }

    fn matches(stack: &[(Name, Name)], x: &str, y: &str) -> bool {
        for (l, r) in stack.iter().rev() {
            if l == x || r == y {
                return l == x && r == y;
            }
        }
        x == y
    }
}

pub fn alpha_eq_command(a: &Command, b: &Command) -> bool {
    alpha_eq_command_cfg(a, b, AlphaCfg::default())
}

pub fn alpha_eq_command_cfg(a: &Command, b: &Command, cfg: AlphaCfg) -> bool {
    eq_command(a, b, &mut AlphaEnv::new(), cfg)
}

pub fn alpha_eq_term(a: &Term, b: &Term) -> bool {
    eq_term(a, b, &mut AlphaEnv::new(), AlphaCfg::default())
}

pub fn alpha_eq_term_cfg(a: &Term, b: &Term, cfg: AlphaCfg) -> bool {
    eq_term(a, b, &mut AlphaEnv::new(), cfg)
}

pub fn alpha_eq_coterm(a: &CoTerm, b: &CoTerm) -> bool {
    eq_coterm(a, b, &mut AlphaEnv::new(), AlphaCfg::default())
}

pub fn alpha_eq_coterm_cfg(a: &CoTerm, b: &CoTerm, cfg: AlphaCfg) -> bool {
    eq_coterm(a, b, &mut AlphaEnv::new(), cfg)
}

fn eq_type(a: &TypeExpr, b: &TypeExpr, env: &mut AlphaEnv) -> bool {
    match (a, b) {
        (TypeExpr::Var(x), TypeExpr::Var(y)) => AlphaEnv::matches(&env.tyvars, x, y),
        (TypeExpr::Con(c), TypeExpr::Con(d)) => c == d,
        (TypeExpr::Lam(x, k1, b1), TypeExpr::Lam(y, k2, b2)) => {
            if k1 != k2 {
                return false;
            }
            env.tyvars.push((x.clone(), y.clone()));
            let r = eq_type(b1, b2, env);
            env.tyvars.pop();
            r
        }
        (TypeExpr::App(f1, a1), TypeExpr::App(f2, a2)) => {
            eq_type(f1, f2, env) && eq_type(a1, a2, env)
        }
        _ => false,
    }
}

fn eq_command(a: &Command, b: &Command, env: &mut AlphaEnv, cfg: AlphaCfg) -> bool {
    if a.discipline != b.discipline {
        return false;
    }
    if !cfg.erase_types {
        match (&a.annotation, &b.annotation) {
            (None, None) => {}
            (Some(x), Some(y)) => {
                if !eq_type(x, y, env) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    eq_term(&a.term, &b.term, env, cfg) && eq_coterm(&a.coterm, &b.coterm, env, cfg)
}

fn eq_term(a: &Term, b: &Term, env: &mut AlphaEnv, cfg: AlphaCfg) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => AlphaEnv::matches(&env.vars, x, y),
        (Term::Mu(x, c1), Term::Mu(y, c2)) => {
            env.covars.push((x.clone(), y.clone()));
            let r = eq_command(c1, c2, env, cfg);
            env.covars.pop();
            r
        }
        (
            Term::Construct {
                ctor: c1,
                ty_args: t1,
                co_args: e1,
                args: v1,
            },
            Term::Construct {
                ctor: c2,
                ty_args: t2,
                co_args: e2,
                args: v2,
            },
        ) => {
            if c1 != c2 || e1.len() != e2.len() || v1.len() != v2.len() {
                return false;
            }
            if !cfg.erase_types {
                if t1.len() != t2.len() {
                    return false;
                }
                for (x, y) in t1.iter().zip(t2) {
                    if !eq_type(x, y, env) {
                        return false;
                    }
                }
            }
            e1.iter().zip(e2).all(|(x, y)| eq_coterm(x, y, env, cfg))
                && v1.iter().zip(v2).all(|(x, y)| eq_term(x, y, env, cfg))
        }
        (Term::CoCase(b1), Term::CoCase(b2)) => {
            if b1.len() != b2.len() {
                return false;
            }
            b1.iter().zip(b2).all(|((q1, c1), (q2, c2))| {
                if q1.dtor != q2.dtor
                    || q1.ty_vars.len() != q2.ty_vars.len()
                    || q1.vars.len() != q2.vars.len()
                    || q1.co_vars.len() != q2.co_vars.len()
                {
                    return false;
                }
                let nt = q1.ty_vars.len();
                let nv = q1.vars.len();
                let nc = q1.co_vars.len();
                for (x, y) in q1.ty_vars.iter().zip(&q2.ty_vars) {
                    env.tyvars.push((x.clone(), y.clone()));
                }
                for (x, y) in q1.vars.iter().zip(&q2.vars) {
                    env.vars.push((x.clone(), y.clone()));
                }
                for (x, y) in q1.co_vars.iter().zip(&q2.co_vars) {
                    env.covars.push((x.clone(), y.clone()));
                }
                let r = eq_command(c1, c2, env, cfg);
                for _ in 0..nt {
                    env.tyvars.pop();
                }
                for _ in 0..nv {
                    env.vars.pop();
                }
                for _ in 0..nc {
                    env.covars.pop();
                }
                r
            })
        }
        _ => false,
    }
}

fn eq_coterm(a: &CoTerm, b: &CoTerm, env: &mut AlphaEnv, cfg: AlphaCfg) -> bool {
    match (a, b) {
        (CoTerm::CoVar(x), CoTerm::CoVar(y)) => AlphaEnv::matches(&env.covars, x, y),
        (CoTerm::MuTilde(x, c1), CoTerm::MuTilde(y, c2)) => {
            env.vars.push((x.clone(), y.clone()));
            let r = eq_command(c1, c2, env, cfg);
            env.vars.pop();
            r
        }
        (
            CoTerm::Destruct {
                dtor: d1,
                ty_args: t1,
                args: v1,
                co_args: e1,
            },
            CoTerm::Destruct {
                dtor: d2,
                ty_args: t2,
                args: v2,
                co_args: e2,
            },
        ) => {
            if d1 != d2 || e1.len() != e2.len() || v1.len() != v2.len() {
                return false;
            }
            if !cfg.erase_types {
                if t1.len() != t2.len() {
                    return false;
                }
                for (x, y) in t1.iter().zip(t2) {
                    if !eq_type(x, y, env) {
                        return false;
                    }
                }
            }
            v1.iter().zip(v2).all(|(x, y)| eq_term(x, y, env, cfg))
                && e1.iter().zip(e2).all(|(x, y)| eq_coterm(x, y, env, cfg))
        }
        (CoTerm::Case(b1), CoTerm::Case(b2)) => {
            if b1.len() != b2.len() {
                return false;
            }
            b1.iter().zip(b2).all(|((p1, c1), (p2, c2))| {
                if p1.ctor != p2.ctor
                    || p1.ty_vars.len() != p2.ty_vars.len()
                    || p1.vars.len() != p2.vars.len()
                    || p1.co_vars.len() != p2.co_vars.len()
                {
                    return false;
                }
                let nt = p1.ty_vars.len();
                let nv = p1.vars.len();
                let nc = p1.co_vars.len();
                for (x, y) in p1.ty_vars.iter().zip(&p2.ty_vars) {
                    env.tyvars.push((x.clone(), y.clone()));
                }
                for (x, y) in p1.vars.iter().zip(&p2.vars) {
                    env.vars.push((x.clone(), y.clone()));
                }
                for (x, y) in p1.co_vars.iter().zip(&p2.co_vars) {
                    env.covars.push((x.clone(), y.clone()));
                }
                let r = eq_command(c1, c2, env, cfg);
                for _ in 0..nt {
                    env.tyvars.pop();
                }
                for _ in 0..nv {
                    env.vars.pop();
                }
                for _ in 0..nc {
                    env.covars.pop();
                }
                r
            })
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmd(t: Term, s: Discipline, e: CoTerm) -> Command {
        Command::new(t, None, s, e)
    }

    #[test]
    fn single_free_variable_replaced() {
        // < x |v| a > with [Unit/x] -> < Unit |v| a >
        let c = cmd(Term::var("x"), Discipline::Cbv, CoTerm::covar("a"));
        let unit = Term::construct("Unit", vec![], vec![], vec![]);
        let out = subst_command(&c, &Subst::one_term("x", unit.clone()));
        let expect = cmd(unit, Discipline::Cbv, CoTerm::covar("a"));
        assert!(alpha_eq_command(&out, &expect));
    }

    #[test]
    fn empty_subst_is_identity() {
        let c = cmd(
            Term::mu("a", cmd(Term::var("x"), Discipline::Cbv, CoTerm::covar("a"))),
            Discipline::Cbv,
            CoTerm::covar("b"),
        );
        let out = subst_command(&c, &Subst::default());
        assert!(alpha_eq_command(&out, &c));
    }

    #[test]
    fn binder_shadows_substitution() {
        // (mut x. < x |v| b >)[V/x] leaves the bound x untouched.
        let e = CoTerm::mu_tilde("x", cmd(Term::var("x"), Discipline::Cbv, CoTerm::covar("b")));
        let v = Term::construct("Unit", vec![], vec![], vec![]);
        let out = subst_coterm(&e, &Subst::one_term("x", v));
        assert!(alpha_eq_coterm(&out, &e));
    }

    #[test]
    fn capture_is_avoided() {
        // (mu a. < x |v| a >)[ (mu d. <y|v|a>) / x ]: bound a must be renamed.
        let t = Term::mu("a", cmd(Term::var("x"), Discipline::Cbv, CoTerm::covar("a")));
        let payload = Term::mu("d", cmd(Term::var("y"), Discipline::Cbv, CoTerm::covar("a")));
        let out = subst_term(&t, &Subst::one_term("x", payload));
        // The free `a` of the payload must not be captured.
        let f = free_term(&out);
        assert!(f.covars.contains("a"));
        // and the result is alpha-stable under different seeds
        let out2 = {
            let t = Term::mu("a", cmd(Term::var("x"), Discipline::Cbv, CoTerm::covar("a")));
            let payload =
                Term::mu("d", cmd(Term::var("y"), Discipline::Cbv, CoTerm::covar("a")));
            subst_term_seeded(&t, &Subst::one_term("x", payload), 3)
        };
        assert!(alpha_eq_term(&out, &out2));
    }

    #[test]
    fn alpha_eq_renamed_binder() {
        let a = Term::mu("a", cmd(Term::var("x"), Discipline::Cbv, CoTerm::covar("a")));
        let b = Term::mu("b", cmd(Term::var("x"), Discipline::Cbv, CoTerm::covar("b")));
        assert!(alpha_eq_term(&a, &b));
        let c = Term::mu("a", cmd(Term::var("y"), Discipline::Cbv, CoTerm::covar("a")));
        assert!(!alpha_eq_term(&a, &c));
    }

    #[test]
    fn free_names_of_cocase_respect_binders() {
        // cocase { O{X}(y)[b] => <y |v| g> } frees: covar g only
        let q = CoPattern {
            dtor: "O".into(),
            ty_vars: vec!["X".into()],
            vars: vec!["y".into()],
            co_vars: vec!["b".into()],
        };
        let body = cmd(Term::var("y"), Discipline::Cbv, CoTerm::covar("g"));
        let t = Term::CoCase(vec![(q, body)]);
        let f = free_term(&t);
        assert!(f.vars.is_empty());
        assert_eq!(f.covars, BTreeSet::from(["g".to_string()]));
        assert!(f.tyvars.is_empty());
    }

    #[test]
    fn fresh_is_deterministic() {
        let avoid: BTreeSet<Name> = ["x".to_string()].into();
        assert_eq!(fresh("x", &avoid), "x0");
        assert_eq!(fresh("x", &avoid), "x0");
        assert_eq!(fresh("x", &BTreeSet::new()), "x");
    }

    #[test]
    fn subst_composition_on_disjoint_domains() {
        // substitute(substitute(c, r1), r2) == substitute(c, r2 . r1)
        let c = cmd(Term::var("x"), Discipline::Cbv, CoTerm::covar("a"));
        let r1 = Subst::one_term("x", Term::var("y"));
        let r2 = Subst::one_coterm("a", CoTerm::covar("b"));
        let lhs = subst_command(&subst_command(&c, &r1), &r2);
        let mut composed = r1.clone();
        composed.coterms = r2.coterms.clone();
        let rhs = subst_command(&c, &composed);
        assert!(alpha_eq_command(&lhs, &rhs));
    }
}

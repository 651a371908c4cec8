//! The type system: command, term, and coterm checking with focus (stoup)
//! judgments, instantiation of declared xtor signatures, and substitution
//! typing.
//!
//! Checking is annotation-driven: every cut carries its type, so no
//! inference happens.  Two modes are supported: `Typed` checks full types;
//! `DisciplineOnly` collapses all same-kinded types (the Untype rule) and
//! tracks only disciplines, which admits recursion while preserving
//! deterministic evaluation.

use crate::kinds::{kind_of, normalize_type, types_equal, KindEnv, SignatureTable};
use crate::machine::{is_covalue, is_value};
use crate::syntax::*;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Typed,
    DisciplineOnly,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FocusMode {
    Unfocused,
    Focused,
}

/// A context entry: the hypothesis type (absent in discipline-only mode)
/// and its discipline.
#[derive(Clone, Debug)]
pub struct Hyp {
    pub ty: Option<TypeExpr>,
    pub disc: Discipline,
}

#[derive(Clone, Debug)]
pub struct TypeContext<'s> {
    pub sig: &'s SignatureTable,
    pub mode: Mode,
    pub theta: KindEnv,
    pub gamma: Vec<(Name, Hyp)>,
    pub delta: Vec<(Name, Hyp)>,
}

impl<'s> TypeContext<'s> {
    pub fn new(sig: &'s SignatureTable, mode: Mode) -> TypeContext<'s> {
        TypeContext {
            sig,
            mode,
            theta: KindEnv::new(),
            gamma: Vec::new(),
            delta: Vec::new(),
        }
    }

    fn lookup_var(&self, x: &str) -> Option<&Hyp> {
        self.gamma.iter().rev().find(|(n, _)| n == x).map(|(_, h)| h)
    }

    fn lookup_covar(&self, a: &str) -> Option<&Hyp> {
        self.delta.iter().rev().find(|(n, _)| n == a).map(|(_, h)| h)
    }
}

#[derive(Clone, Debug)]
pub struct TypeError {
    pub rule: String,
    pub msg: String,
    pub span: Option<Span>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(s) => write!(f, "type error [{}] at {}..{}: {}", self.rule, s.lo, s.hi, self.msg),
            None => write!(f, "type error [{}]: {}", self.rule, self.msg),
        }
    }
}

impl std::error::Error for TypeError {}

fn terr<T>(rule: &str, msg: impl Into<String>, span: Option<Span>) -> Result<T, TypeError> {
    Err(TypeError {
        rule: rule.into(),
        msg: msg.into(),
        span,
    })
}

/// What a (co)term is checked against: a full type in typed mode, a bare
/// discipline in discipline-only mode.
#[derive(Clone, Debug)]
pub struct Expected {
    pub ty: Option<TypeExpr>,
    pub disc: Discipline,
}

/// Check a command: the term checks at the annotation, the annotation's
/// kind is the command's discipline, and the coterm checks at the
/// annotation.
pub fn check_command(ctx: &TypeContext, c: &Command) -> Result<(), TypeError> {
    let expected = match (ctx.mode, &c.annotation) {
        (Mode::Typed, None) => {
            return terr(
                "Cut",
                "wildcard type annotation is not allowed in typed mode",
                c.span,
            )
        }
        (Mode::Typed, Some(a)) => {
            let k = kind_of(&ctx.theta, ctx.sig, a)
                .map_err(|e| TypeError {
                    rule: "Cut".into(),
                    msg: e.msg,
                    span: c.span,
                })?;
            if k != Kind::Disc(c.discipline) {
                return terr(
                    "Cut",
                    format!(
                        "kind of {} is {}, command is {}",
                        crate::surface::print_type(a),
                        k,
                        c.discipline
                    ),
                    c.span,
                );
            }
            Expected {
                ty: Some(a.clone()),
                disc: c.discipline,
            }
        }
        (Mode::DisciplineOnly, ann) => {
            if let Some(a) = ann {
                if let Ok(k) = kind_of(&ctx.theta, ctx.sig, a) {
                    if k != Kind::Disc(c.discipline) {
                        return terr(
                            "Cut",
                            format!(
                                "kind of {} is {}, command is {}",
                                crate::surface::print_type(a),
                                k,
                                c.discipline
                            ),
                            c.span,
                        );
                    }
                }
            }
            Expected {
                ty: None,
                disc: c.discipline,
            }
        }
    };
    check_term(ctx, &c.term, &expected, FocusMode::Unfocused, c.span)?;
    check_coterm(ctx, &c.coterm, &expected, FocusMode::Unfocused, c.span)
}

fn expected_matches_hyp(
    ctx: &TypeContext,
    hyp: &Hyp,
    exp: &Expected,
    rule: &str,
    name: &str,
    span: Option<Span>,
) -> Result<(), TypeError> {
    match (ctx.mode, &hyp.ty, &exp.ty) {
        (Mode::Typed, Some(h), Some(e)) => {
            if !types_equal(h, e) {
                return terr(
                    rule,
                    format!(
                        "{name} has type {}, expected {}",
                        crate::surface::print_type(h),
                        crate::surface::print_type(e)
                    ),
                    span,
                );
            }
            Ok(())
        }
        (Mode::Typed, None, _) => terr(
            rule,
            format!("{name} has no type in context (typed mode)"),
            span,
        ),
        _ => {
            if hyp.disc != exp.disc {
                return terr(
                    rule,
                    format!("{name} has discipline {}, expected {}", hyp.disc, exp.disc),
                    span,
                );
            }
            Ok(())
        }
    }
}

/// Instantiated xtor signature: component types (absent in discipline-only
/// mode) and their disciplines.
pub struct XtorInstance {
    pub quantified: Vec<(Name, Discipline)>,
    pub term_inputs: Vec<(Option<TypeExpr>, Discipline)>,
    pub co_inputs: Vec<(Option<TypeExpr>, Discipline)>,
    pub parent: Name,
    pub result: Discipline,
}

/// The rule schema generated by a declaration for one xtor: instantiate
/// its component types at the given parent type arguments and quantifier
/// arguments (types for constructions/destructions, fresh variables for
/// patterns).
pub fn instantiate_xtor(
    sig: &SignatureTable,
    xtor: &str,
    parent_args: Option<&[TypeExpr]>,
    quant_args: &[TypeExpr],
) -> Option<XtorInstance> {
    let (decl, idx) = sig.xtor(xtor)?;
    let x = &decl.xtors[idx];
    let mut rho: Vec<(Name, TypeExpr)> = Vec::new();
    if let Some(args) = parent_args {
        if args.len() != decl.params.len() {
            return None;
        }
        rho.extend(
            decl.params
                .iter()
                .map(|(p, _)| p.clone())
                .zip(args.iter().cloned()),
        );
    }
    if quant_args.len() != x.quantified.len() {
        return None;
    }
    rho.extend(
        x.quantified
            .iter()
            .map(|(y, _)| y.clone())
            .zip(quant_args.iter().cloned()),
    );
    let inst = |comps: &[(TypeExpr, Discipline)]| {
        comps
            .iter()
            .map(|(t, d)| {
                if parent_args.is_some() {
                    (Some(t.subst_tyvars(&rho)), *d)
                } else {
                    (None, *d)
                }
            })
            .collect()
    };
    Some(XtorInstance {
        quantified: x.quantified.clone(),
        term_inputs: inst(&x.term_inputs),
        co_inputs: inst(&x.co_inputs),
        parent: decl.name.clone(),
        result: decl.result,
    })
}

/// Decompose an expected type into a connective head and argument list.
fn head_spine(
    ctx: &TypeContext,
    exp: &Expected,
) -> Option<(Name, Vec<TypeExpr>)> {
    let ty = exp.ty.as_ref()?;
    let n = normalize_type(ty);
    let (head, args) = n.spine();
    match head {
        TypeExpr::Con(c) => Some((c.clone(), args.into_iter().cloned().collect())),
        _ => None,
    }
    .or(None)
        .map(|(c, a)| {
            let _ = &ctx;
            (c, a)
        })
}

pub fn check_term(
    ctx: &TypeContext,
    v: &Term,
    exp: &Expected,
    focus: FocusMode,
    span: Option<Span>,
) -> Result<(), TypeError> {
    if focus == FocusMode::Focused && !is_value(ctx.sig, v, exp.disc) {
        return terr(
            "BR",
            format!("term is not a {}-value in focused position", exp.disc),
            span,
        );
    }
    match v {
        Term::Var(x) => {
            let hyp = ctx
                .lookup_var(x)
                .ok_or_else(|| TypeError {
                    rule: "VR".into(),
                    msg: format!("unbound variable {x}"),
                    span,
                })?;
            expected_matches_hyp(ctx, hyp, exp, "VR", x, span)
        }
        Term::Mu(a, body) => {
            let mut inner = ctx.clone();
            inner.delta.push((
                a.clone(),
                Hyp {
                    ty: exp.ty.clone(),
                    disc: exp.disc,
                },
            ));
            check_command(&inner, body)
        }
        Term::Construct {
            ctor,
            ty_args,
            co_args,
            args,
        } => {
            let (decl, _) = ctx.sig.xtor(ctor).ok_or_else(|| TypeError {
                rule: "FR".into(),
                msg: format!("unknown constructor {ctor}"),
                span,
            })?;
            if decl.polarity != Polarity::Data {
                return terr("FR", format!("{ctor} is a destructor, not a constructor"), span);
            }
            let parent_args: Option<Vec<TypeExpr>> = match ctx.mode {
                Mode::Typed => {
                    let (head, targs) = head_spine(ctx, exp).ok_or_else(|| TypeError {
                        rule: "FR".into(),
                        msg: format!(
                            "constructor {ctor} used at non-connective type"
                        ),
                        span,
                    })?;
                    if head != decl.name {
                        return terr(
                            "FR",
                            format!(
                                "constructor {ctor} of {} used at type headed by {head}",
                                decl.name
                            ),
                            span,
                        );
                    }
                    Some(targs)
                }
                Mode::DisciplineOnly => {
                    if decl.result != exp.disc {
                        return terr(
                            "FR",
                            format!(
                                "constructor {ctor} builds a {} value, expected {}",
                                decl.result, exp.disc
                            ),
                            span,
                        );
                    }
                    None
                }
            };
            let inst = instantiate_xtor(ctx.sig, ctor, parent_args.as_deref(), ty_args)
                .ok_or_else(|| TypeError {
                    rule: "FR".into(),
                    msg: format!("arity mismatch instantiating {ctor}"),
                    span,
                })?;
            for ((y, s), t) in inst.quantified.iter().zip(ty_args) {
                let k = kind_of(&ctx.theta, ctx.sig, t).map_err(|e| TypeError {
                    rule: "FR".into(),
                    msg: e.msg,
                    span,
                })?;
                if k != Kind::Disc(*s) {
                    return terr(
                        "FR",
                        format!("type argument for {y} has kind {k}, expected {s}"),
                        span,
                    );
                }
            }
            if co_args.len() != inst.co_inputs.len() || args.len() != inst.term_inputs.len() {
                return terr(
                    "FR",
                    format!(
                        "constructor {ctor} expects {} coterm and {} term arguments",
                        inst.co_inputs.len(),
                        inst.term_inputs.len()
                    ),
                    span,
                );
            }
            for (e, (bty, r)) in co_args.iter().zip(&inst.co_inputs) {
                check_coterm(
                    ctx,
                    e,
                    &Expected {
                        ty: bty.clone(),
                        disc: *r,
                    },
                    FocusMode::Unfocused,
                    span,
                )?;
            }
            for (vv, (aty, t)) in args.iter().zip(&inst.term_inputs) {
                check_term(
                    ctx,
                    vv,
                    &Expected {
                        ty: aty.clone(),
                        disc: *t,
                    },
                    FocusMode::Unfocused,
                    span,
                )?;
            }
            Ok(())
        }
        Term::CoCase(branches) => {
            check_matcher(ctx, exp, span, Polarity::Codata, branches.len(), |i| {
                let (q, body) = &branches[i];
                (
                    q.dtor.clone(),
                    q.ty_vars.clone(),
                    q.vars.clone(),
                    q.co_vars.clone(),
                    body,
                )
            })
        }
    }
}

pub fn check_coterm(
    ctx: &TypeContext,
    e: &CoTerm,
    exp: &Expected,
    focus: FocusMode,
    span: Option<Span>,
) -> Result<(), TypeError> {
    if focus == FocusMode::Focused && !is_covalue(ctx.sig, e, exp.disc) {
        return terr(
            "BL",
            format!("coterm is not a {}-covalue in focused position", exp.disc),
            span,
        );
    }
    match e {
        CoTerm::CoVar(a) => {
            let hyp = ctx
                .lookup_covar(a)
                .ok_or_else(|| TypeError {
                    rule: "VL".into(),
                    msg: format!("unbound covariable {a}"),
                    span,
                })?;
            expected_matches_hyp(ctx, hyp, exp, "VL", a, span)
        }
        CoTerm::MuTilde(x, body) => {
            let mut inner = ctx.clone();
            inner.gamma.push((
                x.clone(),
                Hyp {
                    ty: exp.ty.clone(),
                    disc: exp.disc,
                },
            ));
            check_command(&inner, body)
        }
        CoTerm::Destruct {
            dtor,
            ty_args,
            args,
            co_args,
        } => {
            let (decl, _) = ctx.sig.xtor(dtor).ok_or_else(|| TypeError {
                rule: "FL".into(),
                msg: format!("unknown destructor {dtor}"),
                span,
            })?;
            if decl.polarity != Polarity::Codata {
                return terr("FL", format!("{dtor} is a constructor, not a destructor"), span);
            }
            let parent_args: Option<Vec<TypeExpr>> = match ctx.mode {
                Mode::Typed => {
                    let (head, targs) = head_spine(ctx, exp).ok_or_else(|| TypeError {
                        rule: "FL".into(),
                        msg: format!("destructor {dtor} used at non-connective type"),
                        span,
                    })?;
                    if head != decl.name {
                        return terr(
                            "FL",
                            format!(
                                "destructor {dtor} of {} used at type headed by {head}",
                                decl.name
                            ),
                            span,
                        );
                    }
                    Some(targs)
                }
                Mode::DisciplineOnly => {
                    if decl.result != exp.disc {
                        return terr(
                            "FL",
                            format!(
                                "destructor {dtor} consumes a {} value, expected {}",
                                decl.result, exp.disc
                            ),
                            span,
                        );
                    }
                    None
                }
            };
            let inst = instantiate_xtor(ctx.sig, dtor, parent_args.as_deref(), ty_args)
                .ok_or_else(|| TypeError {
                    rule: "FL".into(),
                    msg: format!("arity mismatch instantiating {dtor}"),
                    span,
                })?;
            for ((y, s), t) in inst.quantified.iter().zip(ty_args) {
                let k = kind_of(&ctx.theta, ctx.sig, t).map_err(|e| TypeError {
                    rule: "FL".into(),
                    msg: e.msg,
                    span,
                })?;
                if k != Kind::Disc(*s) {
                    return terr(
                        "FL",
                        format!("type argument for {y} has kind {k}, expected {s}"),
                        span,
                    );
                }
            }
            if args.len() != inst.term_inputs.len() || co_args.len() != inst.co_inputs.len() {
                return terr(
                    "FL",
                    format!(
                        "destructor {dtor} expects {} term and {} coterm arguments",
                        inst.term_inputs.len(),
                        inst.co_inputs.len()
                    ),
                    span,
                );
            }
            for (vv, (aty, t)) in args.iter().zip(&inst.term_inputs) {
                check_term(
                    ctx,
                    vv,
                    &Expected {
                        ty: aty.clone(),
                        disc: *t,
                    },
                    FocusMode::Unfocused,
                    span,
                )?;
            }
            for (ee, (bty, r)) in co_args.iter().zip(&inst.co_inputs) {
                check_coterm(
                    ctx,
                    ee,
                    &Expected {
                        ty: bty.clone(),
                        disc: *r,
                    },
                    FocusMode::Unfocused,
                    span,
                )?;
            }
            Ok(())
        }
        CoTerm::Case(branches) => {
            check_matcher(ctx, exp, span, Polarity::Data, branches.len(), |i| {
                let (p, body) = &branches[i];
                (
                    p.ctor.clone(),
                    p.ty_vars.clone(),
                    p.vars.clone(),
                    p.co_vars.clone(),
                    body,
                )
            })
        }
    }
}

/// Shared checking of case (over data) and cocase (over codata) branch
/// sets: distinctness, exhaustiveness (typed mode), and per-branch bodies
/// under the binders dictated by the xtor signature.
fn check_matcher<'b>(
    ctx: &TypeContext,
    exp: &Expected,
    span: Option<Span>,
    want: Polarity,
    n_branches: usize,
    branch: impl Fn(usize) -> (Name, Vec<Name>, Vec<Name>, Vec<Name>, &'b Command),
) -> Result<(), TypeError> {
    let rule = match want {
        Polarity::Data => "FL",
        Polarity::Codata => "FR",
    };
    // Locate the declaration.
    let decl = match ctx.mode {
        Mode::Typed => {
            let (head, _) = head_spine(ctx, exp).ok_or_else(|| TypeError {
                rule: rule.into(),
                msg: "match used at non-connective type".into(),
                span,
            })?;
            ctx.sig.decl(&head).ok_or_else(|| TypeError {
                rule: rule.into(),
                msg: format!("unknown connective {head}"),
                span,
            })?
        }
        Mode::DisciplineOnly => {
            if n_branches == 0 {
                // A branchless matcher is a subset of any xtor set.
                return Ok(());
            }
            let (name, ..) = branch(0);
            let (decl, _) = ctx.sig.xtor(&name).ok_or_else(|| TypeError {
                rule: rule.into(),
                msg: format!("unknown xtor {name}"),
                span,
            })?;
            decl
        }
    };
    if decl.polarity != want {
        return terr(
            rule,
            format!(
                "{} over a {} type",
                if want == Polarity::Data { "case" } else { "cocase" },
                if decl.polarity == Polarity::Data { "data" } else { "codata" }
            ),
            span,
        );
    }
    if ctx.mode == Mode::DisciplineOnly && decl.result != exp.disc {
        return terr(
            rule,
            format!(
                "match over {} ({}) at discipline {}",
                decl.name, decl.result, exp.disc
            ),
            span,
        );
    }
    let parent_args: Option<Vec<TypeExpr>> = match ctx.mode {
        Mode::Typed => {
            let (_, targs) = head_spine(ctx, exp).unwrap();
            Some(targs)
        }
        Mode::DisciplineOnly => None,
    };
    let mut seen: BTreeSet<Name> = BTreeSet::new();
    for i in 0..n_branches {
        let (name, ty_vars, vars, co_vars, body) = branch(i);
        if !seen.insert(name.clone()) {
            return terr(rule, format!("duplicate branch for {name}"), span);
        }
        let (bdecl, idx) = ctx.sig.xtor(&name).ok_or_else(|| TypeError {
            rule: rule.into(),
            msg: format!("unknown xtor {name}"),
            span,
        })?;
        if bdecl.name != decl.name {
            return terr(
                rule,
                format!("branch {name} belongs to {}, not {}", bdecl.name, decl.name),
                span,
            );
        }
        let x = &bdecl.xtors[idx];
        if ty_vars.len() != x.quantified.len()
            || vars.len() != x.term_inputs.len()
            || co_vars.len() != x.co_inputs.len()
        {
            return terr(rule, format!("branch {name} has wrong arity"), span);
        }
        // Quantified parameters become bound type variables of the branch.
        let quant_args: Vec<TypeExpr> = ty_vars.iter().map(|t| TypeExpr::var(t.clone())).collect();
        let inst = instantiate_xtor(ctx.sig, &name, parent_args.as_deref(), &quant_args)
            .ok_or_else(|| TypeError {
                rule: rule.into(),
                msg: format!("arity mismatch instantiating {name}"),
                span,
            })?;
        let mut inner = ctx.clone();
        for (tv, (_, s)) in ty_vars.iter().zip(&x.quantified) {
            inner.theta.push(tv.clone(), Kind::Disc(*s));
        }
        for (v, (aty, t)) in vars.iter().zip(&inst.term_inputs) {
            inner.gamma.push((
                v.clone(),
                Hyp {
                    ty: aty.clone(),
                    disc: *t,
                },
            ));
        }
        for (a, (bty, r)) in co_vars.iter().zip(&inst.co_inputs) {
            inner.delta.push((
                a.clone(),
                Hyp {
                    ty: bty.clone(),
                    disc: *r,
                },
            ));
        }
        check_command(&inner, body)?;
    }
    if ctx.mode == Mode::Typed {
        for x in &decl.xtors {
            if !seen.contains(&x.name) {
                return terr(
                    rule,
                    format!("non-exhaustive match: missing branch for {}", x.name),
                    span,
                );
            }
        }
    }
    Ok(())
}

/// Check a disciplined substitution against a source context: each mapped
/// variable gets a focused value of its hypothesis type, each covariable a
/// focused covalue, each type variable a type of its declared kind.
pub fn check_subst(
    ctx: &TypeContext,
    rho: &Subst,
    target: &TypeContext,
) -> Result<(), TypeError> {
    for (x, t) in &rho.types {
        let k = ctx.theta.lookup(x).ok_or_else(|| TypeError {
            rule: "Subst".into(),
            msg: format!("type variable {x} not in source context"),
            span: None,
        })?;
        let k2 = kind_of(&target.theta, target.sig, t).map_err(|e| TypeError {
            rule: "Subst".into(),
            msg: e.msg,
            span: None,
        })?;
        if *k != k2 {
            return terr("Subst", format!("type for {x} has kind {k2}, expected {k}"), None);
        }
    }
    for (x, v) in &rho.terms {
        let hyp = ctx.lookup_var(x).ok_or_else(|| TypeError {
            rule: "Subst".into(),
            msg: format!("variable {x} not in source context"),
            span: None,
        })?;
        let exp = Expected {
            ty: hyp.ty.as_ref().map(|t| t.subst_tyvars(&rho.types)),
            disc: hyp.disc,
        };
        check_term(target, v, &exp, FocusMode::Focused, None)?;
    }
    for (a, e) in &rho.coterms {
        let hyp = ctx.lookup_covar(a).ok_or_else(|| TypeError {
            rule: "Subst".into(),
            msg: format!("covariable {a} not in source context"),
            span: None,
        })?;
        let exp = Expected {
            ty: hyp.ty.as_ref().map(|t| t.subst_tyvars(&rho.types)),
            disc: hyp.disc,
        };
        check_coterm(target, e, &exp, FocusMode::Focused, None)?;
    }
    Ok(())
}

/// Check one entry of an elaborated program under its declared sequent.
pub fn check_entry(
    sig: &SignatureTable,
    mode: Mode,
    entry: &crate::surface::CommandEntry,
) -> Result<(), TypeError> {
    let ctx = entry_context(sig, mode, entry)?;
    check_command(&ctx, &entry.body)
}

/// Build the checking context from an entry's declared sequent.
pub fn entry_context<'s>(
    sig: &'s SignatureTable,
    mode: Mode,
    entry: &crate::surface::CommandEntry,
) -> Result<TypeContext<'s>, TypeError> {
    let mut ctx = TypeContext::new(sig, mode);
    for (side, entries, out) in [
        ("hypothesis", &entry.gamma, true),
        ("conclusion", &entry.delta, false),
    ] {
        for (n, ty, d) in entries.iter() {
            if mode == Mode::Typed {
                let t = ty.as_ref().ok_or_else(|| TypeError {
                    rule: "Sequent".into(),
                    msg: format!("{side} {n} needs a type in typed mode"),
                    span: None,
                })?;
                let k = kind_of(&ctx.theta, sig, t).map_err(|e| TypeError {
                    rule: "Sequent".into(),
                    msg: e.msg,
                    span: None,
                })?;
                if k != Kind::Disc(*d) {
                    return terr(
                        "Sequent",
                        format!("{side} {n} has kind {k}, declared discipline {d}"),
                        None,
                    );
                }
            }
            let hyp = Hyp {
                ty: if mode == Mode::Typed { ty.clone() } else { None },
                disc: *d,
            };
            if out {
                ctx.gamma.push((n.clone(), hyp));
            } else {
                ctx.delta.push((n.clone(), hyp));
            }
        }
    }
    Ok(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinds::names;
    use crate::surface::parse_command_with;
    use Discipline::{Cbn, Cbv, Need};

    fn one() -> TypeExpr {
        TypeExpr::con(names::ONE)
    }

    fn ctx_with<'s>(
        sig: &'s SignatureTable,
        gamma: Vec<(&str, TypeExpr, Discipline)>,
        delta: Vec<(&str, TypeExpr, Discipline)>,
    ) -> TypeContext<'s> {
        let mut ctx = TypeContext::new(sig, Mode::Typed);
        for (n, t, d) in gamma {
            ctx.gamma.push((n.into(), Hyp { ty: Some(t), disc: d }));
        }
        for (n, t, d) in delta {
            ctx.delta.push((n.into(), Hyp { ty: Some(t), disc: d }));
        }
        ctx
    }

    #[test]
    fn axiom_cut_checks() {
        let sig = SignatureTable::core();
        let ctx = ctx_with(
            &sig,
            vec![("x", one(), Cbv)],
            vec![("a", one(), Cbv)],
        );
        let c = parse_command_with("< x | One : v | a >", &[]).unwrap();
        check_command(&ctx, &c).unwrap();
    }

    #[test]
    fn misaligned_disciplines_fail_on_the_cut() {
        // < mu d. c0 | A : n | mut x. < x | A : v | mut y. c1 > > has no A
        // that is both v and n.
        let sig = SignatureTable::core();
        // try A = One (v): outer cut fails; A = Bot (n): inner cut fails.
        for (ty, txt) in [
            (one(), "One"),
            (TypeExpr::con(names::BOT), "Bot"),
        ] {
            let src = format!(
                "< mu d. < Unit | One : v | g > | {txt} : n | mut x. < x | {txt} : v | mut y. < Unit | One : v | g > > >"
            );
            let ctx = ctx_with(&sig, vec![], vec![("g", one(), Cbv)]);
            let c = parse_command_with(&src, &[]).unwrap();
            let err = check_command(&ctx, &c);
            assert!(err.is_err(), "expected failure at {}", txt);
            let _ = ty;
        }
    }

    #[test]
    fn focused_mu_is_rejected_at_cbv() {
        let sig = SignatureTable::core();
        let ctx = ctx_with(&sig, vec![], vec![("a", one(), Cbv)]);
        let v = Term::mu(
            "b",
            Command::new(
                Term::construct(names::UNIT, vec![], vec![], vec![]),
                Some(one()),
                Cbv,
                CoTerm::covar("a"),
            ),
        );
        let exp = Expected {
            ty: Some(one()),
            disc: Cbv,
        };
        assert!(check_term(&ctx, &v, &exp, FocusMode::Focused, None).is_err());
        assert!(check_term(&ctx, &v, &exp, FocusMode::Unfocused, None).is_ok());
    }

    #[test]
    fn constructor_in_focus_with_value_argument() {
        let sig = SignatureTable::core();
        let ctx = ctx_with(&sig, vec![("w", one(), Cbv)], vec![]);
        let v = Term::construct("Inl", vec![], vec![], vec![Term::var("w")]);
        let exp = Expected {
            ty: Some(TypeExpr::apply(
                TypeExpr::con(names::SUM),
                [one(), one()],
            )),
            disc: Cbv,
        };
        check_term(&ctx, &v, &exp, FocusMode::Focused, None).unwrap();
    }

    #[test]
    fn cocase_over_with_requires_both_branches() {
        let sig = SignatureTable::core();
        let with = TypeExpr::apply(
            TypeExpr::con(names::WITH),
            [TypeExpr::con(names::BOT), TypeExpr::con(names::BOT)],
        );
        let ctx = ctx_with(&sig, vec![], vec![("out", with.clone(), Cbn)]);
        let full = parse_command_with(
            "< cocase { Fst[a] => < cocase { CoUnit => < Unit | One : v | g > } | Bot : n | a > | Snd[b] => < cocase { CoUnit => < Unit | One : v | g > } | Bot : n | b > } | With Bot Bot : n | out >",
            &[],
        )
        .unwrap();
        let mut ctx2 = ctx.clone();
        ctx2.delta.push((
            "g".into(),
            Hyp {
                ty: Some(one()),
                disc: Cbv,
            },
        ));
        check_command(&ctx2, &full).unwrap();

        let missing = parse_command_with(
            "< cocase { Fst[a] => < cocase { CoUnit => < Unit | One : v | g > } | Bot : n | a > } | With Bot Bot : n | out >",
            &[],
        )
        .unwrap();
        assert!(check_command(&ctx2, &missing).is_err());
    }

    #[test]
    fn subst_check_demands_values() {
        let sig = SignatureTable::core();
        let src_ctx = ctx_with(&sig, vec![("x", one(), Cbv)], vec![]);
        let tgt = TypeContext::new(&sig, Mode::Typed);
        let ok = Subst::one_term("x", Term::construct(names::UNIT, vec![], vec![], vec![]));
        check_subst(&src_ctx, &ok, &tgt).unwrap();
        let bad = Subst::one_term(
            "x",
            Term::mu(
                "a",
                Command::new(
                    Term::construct(names::UNIT, vec![], vec![], vec![]),
                    Some(one()),
                    Cbv,
                    CoTerm::covar("a"),
                ),
            ),
        );
        assert!(check_subst(&src_ctx, &bad, &tgt).is_err());
    }

    #[test]
    fn need_covalue_substitutes_for_need_covariable() {
        // [mut y. < y | need | case{...} > / b : A : need] checks: the
        // mu-tilde is a need covalue (its eye forces y).
        let sig = SignatureTable::core();
        let a_ty = TypeExpr::app(
            TypeExpr::con(names::from_pos(Need)),
            TypeExpr::con(names::ONE),
        );
        let mut src_ctx = TypeContext::new(&sig, Mode::Typed);
        src_ctx.delta.push((
            "b".into(),
            Hyp {
                ty: Some(a_ty.clone()),
                disc: Need,
            },
        ));
        let mut tgt = TypeContext::new(&sig, Mode::Typed);
        tgt.delta.push((
            "out".into(),
            Hyp {
                ty: Some(one()),
                disc: Cbv,
            },
        ));
        let covalue = parse_command_with(
            "< w | _ : need | mut y. < y | FromPos@need One : need | case { Delay@need(z) => < z | One : v | out > } > >",
            &[],
        )
        .unwrap()
        .coterm;
        assert!(crate::machine::is_covalue(&sig, &covalue, Need));
        check_subst(&src_ctx, &Subst::one_coterm("b", covalue), &tgt).unwrap();
        // while a non-forcing mu-tilde is rejected
        let lazy = parse_command_with(
            "< w | _ : need | mut y. < Unit | One : v | out > >",
            &[],
        )
        .unwrap()
        .coterm;
        assert!(check_subst(&src_ctx, &Subst::one_coterm("b", lazy), &tgt).is_err());
    }

    #[test]
    fn generated_rules_match_the_core_figures() {
        // ToPos@S R demands a focused S-value premise: a mu is rejected
        // even at CBN-for-need... the Wrap argument must be an S-value.
        let sig = SignatureTable::core();
        let ctx = ctx_with(&sig, vec![], vec![("k", one(), Cbv)]);
        let ty = TypeExpr::app(TypeExpr::con(names::to_pos(Need)), one());
        // Wrap@need(mu a. <Unit|a>) used in focus: the argument is not a
        // need-value, so the construction is not a value.
        let non_value = Term::construct(
            names::wrap(Need),
            vec![],
            vec![],
            vec![Term::mu(
                "a",
                Command::new(
                    Term::construct(names::UNIT, vec![], vec![], vec![]),
                    Some(one()),
                    Cbv,
                    CoTerm::covar("a"),
                ),
            )],
        );
        let exp = Expected {
            ty: Some(ty.clone()),
            disc: Cbv,
        };
        assert!(check_term(&ctx, &non_value, &exp, FocusMode::Focused, None).is_err());
        // CD relaxation: the same construction is fine unfocused.
        check_term(&ctx, &non_value, &exp, FocusMode::Unfocused, None).unwrap();
        // A 0-constructor data type generates only the branchless left rule.
        let empty_case = CoTerm::Case(vec![]);
        check_coterm(
            &ctx,
            &empty_case,
            &Expected {
                ty: Some(TypeExpr::con(names::ZERO)),
                disc: Cbv,
            },
            FocusMode::Unfocused,
            None,
        )
        .unwrap();
    }

    #[test]
    fn exists_rule_demands_kinded_witness() {
        // Pack@v{B}(W) : Exists@v F requires B : v and W : F B.
        let sig = SignatureTable::core();
        let f = TypeExpr::lam("X", Kind::Disc(Cbv), one());
        let ex = TypeExpr::app(TypeExpr::con(names::exists(Cbv)), f);
        let ctx = ctx_with(&sig, vec![], vec![]);
        let good = Term::construct(
            names::pack(Cbv),
            vec![one()],
            vec![],
            vec![Term::construct(names::UNIT, vec![], vec![], vec![])],
        );
        check_term(
            &ctx,
            &good,
            &Expected {
                ty: Some(ex.clone()),
                disc: Cbv,
            },
            FocusMode::Unfocused,
            None,
        )
        .unwrap();
        // kind mismatch: packing an n-kinded type at Exists@v
        let bad = Term::construct(
            names::pack(Cbv),
            vec![TypeExpr::con(names::BOT)],
            vec![],
            vec![Term::construct(names::UNIT, vec![], vec![], vec![])],
        );
        assert!(check_term(
            &ctx,
            &bad,
            &Expected {
                ty: Some(ex),
                disc: Cbv
            },
            FocusMode::Unfocused,
            None
        )
        .is_err());
    }
}

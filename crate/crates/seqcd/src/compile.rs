//! Two-phase compilation into the core calculus.
//!
//! Phase one (`lift_*`) names every constructor and destructor parameter
//! with administrative mu/mu-tilde bindings, producing a command in the
//! focused sub-syntax: xtor arguments are values and covalues of their
//! declared disciplines.  Phase two (`encode_*`) replaces every declared
//! connective by its encoding into the core connectives: data types become
//! shifted sums of existential tuples, codata types the exact dual; the
//! nested (co)patterns this produces are flattened one xtor at a time by
//! `flatten_case`/`flatten_cocase`.

use crate::kinds::{names, normalize_type, SignatureTable};
use crate::syntax::*;
use crate::typing::instantiate_xtor;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug)]
pub struct CompileError {
    pub msg: String,
}

impl fmt::Display for CompileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "compile error: {}", self.msg)
    }
}

impl std::error::Error for CompileError {}

fn cerr<T>(msg: impl Into<String>) -> Result<T, CompileError> {
    Err(CompileError { msg: msg.into() })
}

// --------------------------------------------------------------------------
// Focusing lift
// --------------------------------------------------------------------------

/// Does every construction and destruction in `c` apply only to (co)values
/// of the declared disciplines?
pub fn is_focused_command(sig: &SignatureTable, c: &Command) -> bool {
    focused_term(sig, &c.term) && focused_coterm(sig, &c.coterm)
}

fn focused_term(sig: &SignatureTable, v: &Term) -> bool {
    match v {
        Term::Var(_) => true,
        Term::Mu(_, c) => is_focused_command(sig, c),
        Term::Construct { co_args, args, .. } => {
            crate::machine::is_whnf(sig, v)
                && co_args.iter().all(|e| focused_coterm(sig, e))
                && args.iter().all(|t| focused_term(sig, t))
        }
        Term::CoCase(bs) => bs.iter().all(|(_, c)| is_focused_command(sig, c)),
    }
}

fn focused_coterm(sig: &SignatureTable, e: &CoTerm) -> bool {
    match e {
        CoTerm::CoVar(_) => true,
        CoTerm::MuTilde(_, c) => is_focused_command(sig, c),
        CoTerm::Destruct { args, co_args, .. } => {
            crate::machine::is_forcing(sig, e)
                && args.iter().all(|t| focused_term(sig, t))
                && co_args.iter().all(|x| focused_coterm(sig, x))
        }
        CoTerm::Case(bs) => bs.iter().all(|(_, c)| is_focused_command(sig, c)),
    }
}

/// Component types of an xtor instantiated at the type arguments read off
/// an optional expected type (wildcard annotations degrade gracefully).
struct Components {
    term_inputs: Vec<(Option<TypeExpr>, Discipline)>,
    co_inputs: Vec<(Option<TypeExpr>, Discipline)>,
}

fn components(
    sig: &SignatureTable,
    xtor: &str,
    expected: Option<&TypeExpr>,
    ty_args: &[TypeExpr],
) -> Result<Components, CompileError> {
    let parent_args: Option<Vec<TypeExpr>> = expected.and_then(|t| {
        let n = normalize_type(t);
        let (head, args) = n.spine();
        match head {
            TypeExpr::Con(c) => {
                let (decl, _) = sig.xtor(xtor)?;
                if *c == decl.name {
                    Some(args.into_iter().cloned().collect())
                } else {
                    None
                }
            }
            _ => None,
        }
    });
    let inst = instantiate_xtor(sig, xtor, parent_args.as_deref(), ty_args).ok_or_else(|| {
        CompileError {
            msg: format!("unknown xtor or arity mismatch: {xtor}"),
        }
    })?;
    Ok(Components {
        term_inputs: inst.term_inputs,
        co_inputs: inst.co_inputs,
    })
}

/// The focusing lift: homomorphic except on constructions and destructions,
/// which get every argument named by administrative bindings.
pub fn lift_command(sig: &SignatureTable, c: &Command) -> Result<Command, CompileError> {
    Ok(Command {
        term: lift_term(sig, &c.term, c.annotation.as_ref(), c.discipline)?,
        annotation: c.annotation.clone(),
        discipline: c.discipline,
        coterm: lift_coterm(sig, &c.coterm, c.annotation.as_ref(), c.discipline)?,
        span: c.span,
    })
}

fn lift_term(
    sig: &SignatureTable,
    v: &Term,
    ty: Option<&TypeExpr>,
    disc: Discipline,
) -> Result<Term, CompileError> {
    match v {
        Term::Var(_) => Ok(v.clone()),
        Term::Mu(a, body) => Ok(Term::Mu(a.clone(), Box::new(lift_command(sig, body)?))),
        Term::CoCase(branches) => Ok(Term::CoCase(
            branches
                .iter()
                .map(|(q, c)| Ok((q.clone(), lift_command(sig, c)?)))
                .collect::<Result<_, CompileError>>()?,
        )),
        Term::Construct {
            ctor,
            ty_args,
            co_args,
            args,
        } => {
            let comps = components(sig, ctor, ty, ty_args)?;
            let mut avoid = free_term(v).all_names();
            let out = fresh("a", &avoid);
            avoid.insert(out.clone());
            let betas: Vec<Name> = co_args
                .iter()
                .map(|_| {
                    let b = fresh("b", &avoid);
                    avoid.insert(b.clone());
                    b
                })
                .collect();
            let ys: Vec<Name> = args
                .iter()
                .map(|_| {
                    let y = fresh("y", &avoid);
                    avoid.insert(y.clone());
                    y
                })
                .collect();
            let mut acc = Command::new(
                Term::Construct {
                    ctor: ctor.clone(),
                    ty_args: ty_args.clone(),
                    co_args: betas.iter().map(|b| CoTerm::covar(b.clone())).collect(),
                    args: ys.iter().map(|y| Term::var(y.clone())).collect(),
                },
                ty.cloned(),
                disc,
                CoTerm::covar(out.clone()),
            );
            for (j, arg) in args.iter().enumerate().rev() {
                let (aty, t) = &comps.term_inputs[j];
                acc = Command::new(
                    lift_term(sig, arg, aty.as_ref(), *t)?,
                    aty.clone(),
                    *t,
                    CoTerm::MuTilde(ys[j].clone(), Box::new(acc)),
                );
            }
            for (j, coarg) in co_args.iter().enumerate().rev() {
                let (bty, r) = &comps.co_inputs[j];
                acc = Command::new(
                    Term::Mu(betas[j].clone(), Box::new(acc)),
                    bty.clone(),
                    *r,
                    lift_coterm(sig, coarg, bty.as_ref(), *r)?,
                );
            }
            Ok(Term::Mu(out, Box::new(acc)))
        }
    }
}

fn lift_coterm(
    sig: &SignatureTable,
    e: &CoTerm,
    ty: Option<&TypeExpr>,
    disc: Discipline,
) -> Result<CoTerm, CompileError> {
    match e {
        CoTerm::CoVar(_) => Ok(e.clone()),
        CoTerm::MuTilde(x, body) => Ok(CoTerm::MuTilde(
            x.clone(),
            Box::new(lift_command(sig, body)?),
        )),
        CoTerm::Case(branches) => Ok(CoTerm::Case(
            branches
                .iter()
                .map(|(p, c)| Ok((p.clone(), lift_command(sig, c)?)))
                .collect::<Result<_, CompileError>>()?,
        )),
        CoTerm::Destruct {
            dtor,
            ty_args,
            args,
            co_args,
        } => {
            let comps = components(sig, dtor, ty, ty_args)?;
            let mut avoid = free_coterm(e).all_names();
            let inp = fresh("x", &avoid);
            avoid.insert(inp.clone());
            let ys: Vec<Name> = args
                .iter()
                .map(|_| {
                    let y = fresh("y", &avoid);
                    avoid.insert(y.clone());
                    y
                })
                .collect();
            let betas: Vec<Name> = co_args
                .iter()
                .map(|_| {
                    let b = fresh("b", &avoid);
                    avoid.insert(b.clone());
                    b
                })
                .collect();
            let mut acc = Command::new(
                Term::var(inp.clone()),
                ty.cloned(),
                disc,
                CoTerm::Destruct {
                    dtor: dtor.clone(),
                    ty_args: ty_args.clone(),
                    args: ys.iter().map(|y| Term::var(y.clone())).collect(),
                    co_args: betas.iter().map(|b| CoTerm::covar(b.clone())).collect(),
                },
            );
            for (j, coarg) in co_args.iter().enumerate().rev() {
                let (bty, r) = &comps.co_inputs[j];
                acc = Command::new(
                    Term::Mu(betas[j].clone(), Box::new(acc)),
                    bty.clone(),
                    *r,
                    lift_coterm(sig, coarg, bty.as_ref(), *r)?,
                );
            }
            for (j, arg) in args.iter().enumerate().rev() {
                let (aty, t) = &comps.term_inputs[j];
                acc = Command::new(
                    lift_term(sig, arg, aty.as_ref(), *t)?,
                    aty.clone(),
                    *t,
                    CoTerm::MuTilde(ys[j].clone(), Box::new(acc)),
                );
            }
            Ok(CoTerm::MuTilde(inp, Box::new(acc)))
        }
    }
}

// --------------------------------------------------------------------------
// Type encoding
// --------------------------------------------------------------------------

fn con(n: impl Into<Name>) -> TypeExpr {
    TypeExpr::con(n)
}

fn app2(h: impl Into<Name>, a: TypeExpr, b: TypeExpr) -> TypeExpr {
    TypeExpr::apply(con(h), [a, b])
}

fn app1(h: impl Into<Name>, a: TypeExpr) -> TypeExpr {
    TypeExpr::app(con(h), a)
}

/// The encoding of one declared connective as a type-level lambda over its
/// parameters, built from core connectives only.
pub fn encode_decl_scheme(sig: &SignatureTable, decl: &Declaration) -> TypeExpr {
    let body = match decl.polarity {
        Polarity::Data => {
            let mut sum = con(names::ZERO);
            for x in decl.xtors.iter().rev() {
                let mut tuple = con(names::ONE);
                for (t, td) in x.term_inputs.iter().rev() {
                    tuple = app2(
                        names::PROD,
                        app1(names::to_pos(*td), encode_type(sig, t)),
                        tuple,
                    );
                }
                for (t, rd) in x.co_inputs.iter().rev() {
                    tuple = app2(
                        names::PROD,
                        app1(names::NOT, app1(names::to_neg(*rd), encode_type(sig, t))),
                        tuple,
                    );
                }
                let mut comp = tuple;
                for (y, s) in x.quantified.iter().rev() {
                    comp = app1(
                        names::exists(*s),
                        TypeExpr::lam(y.clone(), Kind::Disc(*s), comp),
                    );
                }
                sum = app2(names::SUM, comp, sum);
            }
            app1(names::from_pos(decl.result), sum)
        }
        Polarity::Codata => {
            let mut with = con(names::TOP);
            for x in decl.xtors.iter().rev() {
                let mut par = con(names::BOT);
                for (t, rd) in x.co_inputs.iter().rev() {
                    par = app2(
                        names::PAR,
                        app1(names::to_neg(*rd), encode_type(sig, t)),
                        par,
                    );
                }
                for (t, td) in x.term_inputs.iter().rev() {
                    par = app2(
                        names::PAR,
                        app1(names::NEG, app1(names::to_pos(*td), encode_type(sig, t))),
                        par,
                    );
                }
                let mut comp = par;
                for (y, s) in x.quantified.iter().rev() {
                    comp = app1(
                        names::forall(*s),
                        TypeExpr::lam(y.clone(), Kind::Disc(*s), comp),
                    );
                }
                with = app2(names::WITH, comp, with);
            }
            app1(names::from_neg(decl.result), with)
        }
    };
    let mut out = body;
    for (p, k) in decl.params.iter().rev() {
        out = TypeExpr::lam(p.clone(), k.clone(), out);
    }
    out
}

/// Replace every declared connective by its core encoding, homomorphically.
pub fn encode_type(sig: &SignatureTable, ty: &TypeExpr) -> TypeExpr {
    match ty {
        TypeExpr::Var(_) => ty.clone(),
        TypeExpr::Con(c) => {
            if sig.is_core(c) {
                ty.clone()
            } else {
                match sig.decl(c) {
                    Some(d) => encode_decl_scheme(sig, d),
                    None => ty.clone(),
                }
            }
        }
        TypeExpr::Lam(x, k, b) => TypeExpr::lam(x.clone(), k.clone(), encode_type(sig, b)),
        TypeExpr::App(f, a) => TypeExpr::app(encode_type(sig, f), encode_type(sig, a)),
    }
}

// --------------------------------------------------------------------------
// Nested (co)patterns
// --------------------------------------------------------------------------

/// Nested pattern: a tree of constructor shapes over variable leaves, with
/// copattern subtrees in coterm positions (through the positive negation).
#[derive(Clone, Debug)]
pub enum NPat {
    Var(Name),
    Ctor {
        ctor: Name,
        ty_vars: Vec<Name>,
        co_sub: Vec<NCopat>,
        sub: Vec<NPat>,
    },
}

/// Nested copattern, dual to [`NPat`] (pattern subtrees through the
/// negative negation).
#[derive(Clone, Debug)]
pub enum NCopat {
    CoVar(Name),
    Dtor {
        dtor: Name,
        ty_vars: Vec<Name>,
        sub: Vec<NPat>,
        co_sub: Vec<NCopat>,
    },
}

impl NPat {
    pub fn ctor(
        ctor: impl Into<Name>,
        ty_vars: Vec<Name>,
        co_sub: Vec<NCopat>,
        sub: Vec<NPat>,
    ) -> NPat {
        NPat::Ctor {
            ctor: ctor.into(),
            ty_vars,
            co_sub,
            sub,
        }
    }

    /// Read the pattern as the construction that matches it.
    pub fn to_term(&self) -> Term {
        match self {
            NPat::Var(x) => Term::var(x.clone()),
            NPat::Ctor {
                ctor,
                ty_vars,
                co_sub,
                sub,
            } => Term::Construct {
                ctor: ctor.clone(),
                ty_args: ty_vars.iter().map(|t| TypeExpr::var(t.clone())).collect(),
                co_args: co_sub.iter().map(|q| q.to_coterm()).collect(),
                args: sub.iter().map(|p| p.to_term()).collect(),
            },
        }
    }
}

impl NCopat {
    pub fn dtor(
        dtor: impl Into<Name>,
        ty_vars: Vec<Name>,
        sub: Vec<NPat>,
        co_sub: Vec<NCopat>,
    ) -> NCopat {
        NCopat::Dtor {
            dtor: dtor.into(),
            ty_vars,
            sub,
            co_sub,
        }
    }

    pub fn to_coterm(&self) -> CoTerm {
        match self {
            NCopat::CoVar(a) => CoTerm::covar(a.clone()),
            NCopat::Dtor {
                dtor,
                ty_vars,
                sub,
                co_sub,
            } => CoTerm::Destruct {
                dtor: dtor.clone(),
                ty_args: ty_vars.iter().map(|t| TypeExpr::var(t.clone())).collect(),
                args: sub.iter().map(|p| p.to_term()).collect(),
                co_args: co_sub.iter().map(|q| q.to_coterm()).collect(),
            },
        }
    }
}

/// The encoded (nested, core) pattern for a flat pattern of a declared
/// data type: constructor i (1-based) becomes i-1 leading `Inr` layers
/// around an `Inl`, wrapping an existential chain over a tuple of shifted
/// components.
pub fn encode_pattern(sig: &SignatureTable, p: &Pattern) -> Result<NPat, CompileError> {
    let (decl, idx) = sig.xtor(&p.ctor).ok_or_else(|| CompileError {
        msg: format!("unknown constructor {}", p.ctor),
    })?;
    let x = &decl.xtors[idx];
    let mut acc = NPat::ctor(names::UNIT, vec![], vec![], vec![]);
    for (v, (_, t)) in p.vars.iter().zip(&x.term_inputs).rev() {
        acc = NPat::ctor(
            names::PAIR,
            vec![],
            vec![],
            vec![
                NPat::ctor(names::wrap(*t), vec![], vec![], vec![NPat::Var(v.clone())]),
                acc,
            ],
        );
    }
    for (a, (_, r)) in p.co_vars.iter().zip(&x.co_inputs).rev() {
        acc = NPat::ctor(
            names::PAIR,
            vec![],
            vec![],
            vec![
                NPat::ctor(
                    names::CONT,
                    vec![],
                    vec![NCopat::dtor(
                        names::unwrap(*r),
                        vec![],
                        vec![],
                        vec![NCopat::CoVar(a.clone())],
                    )],
                    vec![],
                ),
                acc,
            ],
        );
    }
    for (yv, (_, s)) in p.ty_vars.iter().zip(&x.quantified).rev() {
        acc = NPat::ctor(names::pack(*s), vec![yv.clone()], vec![], vec![acc]);
    }
    acc = NPat::ctor(names::INL, vec![], vec![], vec![acc]);
    for _ in 0..idx {
        acc = NPat::ctor(names::INR, vec![], vec![], vec![acc]);
    }
    Ok(NPat::ctor(
        names::delay(decl.result),
        vec![],
        vec![],
        vec![acc],
    ))
}

/// The encoded copattern for a flat copattern of a declared codata type,
/// exactly dual to [`encode_pattern`].
pub fn encode_copattern(sig: &SignatureTable, q: &CoPattern) -> Result<NCopat, CompileError> {
    let (decl, idx) = sig.xtor(&q.dtor).ok_or_else(|| CompileError {
        msg: format!("unknown destructor {}", q.dtor),
    })?;
    let x = &decl.xtors[idx];
    let mut acc = NCopat::dtor(names::COUNIT, vec![], vec![], vec![]);
    for (a, (_, r)) in q.co_vars.iter().zip(&x.co_inputs).rev() {
        acc = NCopat::dtor(
            names::COPAIR,
            vec![],
            vec![],
            vec![
                NCopat::dtor(
                    names::unwrap(*r),
                    vec![],
                    vec![],
                    vec![NCopat::CoVar(a.clone())],
                ),
                acc,
            ],
        );
    }
    for (v, (_, t)) in q.vars.iter().zip(&x.term_inputs).rev() {
        acc = NCopat::dtor(
            names::COPAIR,
            vec![],
            vec![],
            vec![
                NCopat::dtor(
                    names::THROW,
                    vec![],
                    vec![NPat::ctor(
                        names::wrap(*t),
                        vec![],
                        vec![],
                        vec![NPat::Var(v.clone())],
                    )],
                    vec![],
                ),
                acc,
            ],
        );
    }
    for (yv, (_, s)) in q.ty_vars.iter().zip(&x.quantified).rev() {
        acc = NCopat::dtor(names::spec(*s), vec![yv.clone()], vec![], vec![acc]);
    }
    acc = NCopat::dtor(names::FST, vec![], vec![], vec![acc]);
    for _ in 0..idx {
        acc = NCopat::dtor(names::SND, vec![], vec![], vec![acc]);
    }
    Ok(NCopat::dtor(
        names::force(decl.result),
        vec![],
        vec![],
        vec![acc],
    ))
}

// --------------------------------------------------------------------------
// Match flattening
// --------------------------------------------------------------------------

fn all_binders_pat(p: &NPat, out: &mut BTreeSet<Name>) {
    match p {
        NPat::Var(x) => {
            out.insert(x.clone());
        }
        NPat::Ctor {
            ty_vars,
            co_sub,
            sub,
            ..
        } => {
            out.extend(ty_vars.iter().cloned());
            for q in co_sub {
                all_binders_copat(q, out);
            }
            for p in sub {
                all_binders_pat(p, out);
            }
        }
    }
}

fn all_binders_copat(q: &NCopat, out: &mut BTreeSet<Name>) {
    match q {
        NCopat::CoVar(a) => {
            out.insert(a.clone());
        }
        NCopat::Dtor {
            ty_vars,
            sub,
            co_sub,
            ..
        } => {
            out.extend(ty_vars.iter().cloned());
            for p in sub {
                all_binders_pat(p, out);
            }
            for q in co_sub {
                all_binders_copat(q, out);
            }
        }
    }
}

/// Flatten nested-pattern branches into legal flat core case syntax,
/// expanding one constructor layer at a time.
pub fn flatten_case(
    sig: &SignatureTable,
    scrut: Option<&TypeExpr>,
    branches: Vec<(NPat, Command)>,
) -> Result<CoTerm, CompileError> {
    if branches.is_empty() {
        return Ok(CoTerm::Case(vec![]));
    }
    if branches.len() == 1 {
        if let (NPat::Var(x), body) = &branches[0] {
            return Ok(CoTerm::mu_tilde(x.clone(), body.clone()));
        }
    }
    if branches.iter().any(|(p, _)| matches!(p, NPat::Var(_))) {
        return cerr("catch-all pattern mixed with constructor patterns");
    }
    let head_name = match &branches[0].0 {
        NPat::Ctor { ctor, .. } => ctor.clone(),
        NPat::Var(_) => unreachable!(),
    };
    let (decl, _) = sig.xtor(&head_name).ok_or_else(|| CompileError {
        msg: format!("unknown constructor {head_name}"),
    })?;
    if decl.polarity != Polarity::Data {
        return cerr(format!("{head_name} is not a constructor"));
    }
    let decl = decl.clone();
    let mut flat: Vec<(Pattern, Command)> = Vec::new();
    for xtor in &decl.xtors {
        let group: Vec<&(NPat, Command)> = branches
            .iter()
            .filter(|(p, _)| matches!(p, NPat::Ctor { ctor, .. } if *ctor == xtor.name))
            .collect();
        if let Some(e) = flatten_group_pat(sig, scrut, xtor, &group)? {
            flat.push(e);
        }
    }
    Ok(CoTerm::Case(flat))
}

fn flatten_group_pat(
    sig: &SignatureTable,
    scrut: Option<&TypeExpr>,
    xtor: &XtorSig,
    group: &[&(NPat, Command)],
) -> Result<Option<(Pattern, Command)>, CompileError> {
    if group.is_empty() {
        // Dead alternative (the 0 padding of the encoding): synthesize a
        // branch that consumes the uninhabited component.
        if xtor.quantified.is_empty() && xtor.co_inputs.is_empty() && xtor.term_inputs.len() == 1 {
            let comps = components(sig, &xtor.name, scrut, &[])?;
            let (cty, t) = comps.term_inputs.into_iter().next().unwrap();
            let z = "z".to_string();
            let body = Command::new(Term::var(z.clone()), cty, t, CoTerm::Case(vec![]));
            return Ok(Some((
                Pattern {
                    ctor: xtor.name.clone(),
                    ty_vars: vec![],
                    co_vars: vec![],
                    vars: vec![z],
                },
                body,
            )));
        }
        return cerr(format!(
            "non-exhaustive nested match: no branch for {}",
            xtor.name
        ));
    }
    if group.len() == 1 {
        let (p, body) = group[0];
        let (ty_vars, co_sub, sub) = match p {
            NPat::Ctor {
                ty_vars,
                co_sub,
                sub,
                ..
            } => (ty_vars.clone(), co_sub.clone(), sub.clone()),
            NPat::Var(_) => unreachable!(),
        };
        if ty_vars.len() != xtor.quantified.len()
            || co_sub.len() != xtor.co_inputs.len()
            || sub.len() != xtor.term_inputs.len()
        {
            return cerr(format!("arity mismatch in nested pattern {}", xtor.name));
        }
        let quant_args: Vec<TypeExpr> =
            ty_vars.iter().map(|t| TypeExpr::var(t.clone())).collect();
        let comps = components(sig, &xtor.name, scrut, &quant_args)?;
        let mut avoid = free_command(body).all_names();
        for p in &sub {
            all_binders_pat(p, &mut avoid);
        }
        for q in &co_sub {
            all_binders_copat(q, &mut avoid);
        }
        avoid.extend(ty_vars.iter().cloned());
        let mut flat_vars = Vec::new();
        let mut wrap_terms: Vec<(usize, Name)> = Vec::new();
        for (j, p) in sub.iter().enumerate() {
            match p {
                NPat::Var(x) => flat_vars.push(x.clone()),
                _ => {
                    let z = fresh("z", &avoid);
                    avoid.insert(z.clone());
                    flat_vars.push(z.clone());
                    wrap_terms.push((j, z));
                }
            }
        }
        let mut flat_covars = Vec::new();
        let mut wrap_cos: Vec<(usize, Name)> = Vec::new();
        for (j, q) in co_sub.iter().enumerate() {
            match q {
                NCopat::CoVar(a) => flat_covars.push(a.clone()),
                _ => {
                    let g = fresh("g", &avoid);
                    avoid.insert(g.clone());
                    flat_covars.push(g.clone());
                    wrap_cos.push((j, g));
                }
            }
        }
        let mut acc = body.clone();
        for (j, g) in wrap_cos.iter().rev() {
            let (bty, r) = &comps.co_inputs[*j];
            let inner = flatten_cocase(sig, bty.as_ref(), vec![(co_sub[*j].clone(), acc)])?;
            acc = Command::new(inner, bty.clone(), *r, CoTerm::covar(g.clone()));
        }
        for (j, z) in wrap_terms.iter().rev() {
            let (aty, t) = &comps.term_inputs[*j];
            let inner = flatten_case(sig, aty.as_ref(), vec![(sub[*j].clone(), acc)])?;
            acc = Command::new(Term::var(z.clone()), aty.clone(), *t, inner);
        }
        return Ok(Some((
            Pattern {
                ctor: xtor.name.clone(),
                ty_vars,
                co_vars: flat_covars,
                vars: flat_vars,
            },
            acc,
        )));
    }
    // Several branches on one constructor: the additive layering of the
    // encoding.  All branches must agree (same bare variable) on every
    // position except exactly one, which is expanded further.
    let first = match group[0].0 {
        NPat::Ctor {
            ref ty_vars,
            ref co_sub,
            ref sub,
            ..
        } => (ty_vars.clone(), co_sub.len(), sub.len()),
        NPat::Var(_) => unreachable!(),
    };
    if !xtor.quantified.is_empty() {
        return cerr(format!(
            "overlapping nested patterns for {} bind quantifiers",
            xtor.name
        ));
    }
    let same_var_tm = |j: usize| -> Option<Name> {
        let mut name: Option<Name> = None;
        for (p, _) in group {
            match p {
                NPat::Ctor { sub, .. } => match &sub[j] {
                    NPat::Var(x) => {
                        if let Some(n) = &name {
                            if n != x {
                                return None;
                            }
                        } else {
                            name = Some(x.clone());
                        }
                    }
                    _ => return None,
                },
                NPat::Var(_) => return None,
            }
        }
        name
    };
    let same_covar = |j: usize| -> Option<Name> {
        let mut name: Option<Name> = None;
        for (p, _) in group {
            match p {
                NPat::Ctor { co_sub, .. } => match &co_sub[j] {
                    NCopat::CoVar(a) => {
                        if let Some(n) = &name {
                            if n != a {
                                return None;
                            }
                        } else {
                            name = Some(a.clone());
                        }
                    }
                    _ => return None,
                },
                NPat::Var(_) => return None,
            }
        }
        name
    };
    let mut split_tm: Option<usize> = None;
    let mut split_co: Option<usize> = None;
    let mut flat_vars: Vec<Name> = Vec::new();
    let mut flat_covars: Vec<Name> = Vec::new();
    for j in 0..first.2 {
        match same_var_tm(j) {
            Some(x) => flat_vars.push(x),
            None => {
                if split_tm.is_some() || split_co.is_some() {
                    return cerr(format!(
                        "overlapping nested patterns for {} differ in several positions",
                        xtor.name
                    ));
                }
                split_tm = Some(j);
                flat_vars.push(String::new());
            }
        }
    }
    for j in 0..first.1 {
        match same_covar(j) {
            Some(a) => flat_covars.push(a),
            None => {
                if split_tm.is_some() || split_co.is_some() {
                    return cerr(format!(
                        "overlapping nested patterns for {} differ in several positions",
                        xtor.name
                    ));
                }
                split_co = Some(j);
                flat_covars.push(String::new());
            }
        }
    }
    let comps = components(sig, &xtor.name, scrut, &[])?;
    let mut avoid = BTreeSet::new();
    for (p, c) in group.iter() {
        all_binders_pat(p, &mut avoid);
        avoid.extend(free_command(c).all_names());
    }
    if let Some(j) = split_tm {
        let z = fresh("z", &avoid);
        flat_vars[j] = z.clone();
        let subbranches: Vec<(NPat, Command)> = group
            .iter()
            .map(|(p, c)| match p {
                NPat::Ctor { sub, .. } => Ok((sub[j].clone(), c.clone())),
                NPat::Var(_) => cerr("unexpected catch-all"),
            })
            .collect::<Result<_, _>>()?;
        let (aty, t) = &comps.term_inputs[j];
        let inner = flatten_case(sig, aty.as_ref(), subbranches)?;
        let body = Command::new(Term::var(z), aty.clone(), *t, inner);
        Ok(Some((
            Pattern {
                ctor: xtor.name.clone(),
                ty_vars: vec![],
                co_vars: flat_covars,
                vars: flat_vars,
            },
            body,
        )))
    } else if let Some(j) = split_co {
        let g = fresh("g", &avoid);
        flat_covars[j] = g.clone();
        let subbranches: Vec<(NCopat, Command)> = group
            .iter()
            .map(|(p, c)| match p {
                NPat::Ctor { co_sub, .. } => Ok((co_sub[j].clone(), c.clone())),
                NPat::Var(_) => cerr("unexpected catch-all"),
            })
            .collect::<Result<_, _>>()?;
        let (bty, r) = &comps.co_inputs[j];
        let inner = flatten_cocase(sig, bty.as_ref(), subbranches)?;
        let body = Command::new(inner, bty.clone(), *r, CoTerm::covar(g));
        Ok(Some((
            Pattern {
                ctor: xtor.name.clone(),
                ty_vars: vec![],
                co_vars: flat_covars,
                vars: flat_vars,
            },
            body,
        )))
    } else {
        cerr(format!("duplicate identical patterns for {}", xtor.name))
    }
}

/// Dual of [`flatten_case`] for nested copatterns.
pub fn flatten_cocase(
    sig: &SignatureTable,
    scrut: Option<&TypeExpr>,
    branches: Vec<(NCopat, Command)>,
) -> Result<Term, CompileError> {
    if branches.is_empty() {
        return Ok(Term::CoCase(vec![]));
    }
    if branches.len() == 1 {
        if let (NCopat::CoVar(a), body) = &branches[0] {
            return Ok(Term::mu(a.clone(), body.clone()));
        }
    }
    if branches.iter().any(|(q, _)| matches!(q, NCopat::CoVar(_))) {
        return cerr("catch-all copattern mixed with destructor copatterns");
    }
    let head_name = match &branches[0].0 {
        NCopat::Dtor { dtor, .. } => dtor.clone(),
        NCopat::CoVar(_) => unreachable!(),
    };
    let (decl, _) = sig.xtor(&head_name).ok_or_else(|| CompileError {
        msg: format!("unknown destructor {head_name}"),
    })?;
    if decl.polarity != Polarity::Codata {
        return cerr(format!("{head_name} is not a destructor"));
    }
    let decl = decl.clone();
    let mut flat: Vec<(CoPattern, Command)> = Vec::new();
    for xtor in &decl.xtors {
        let group: Vec<&(NCopat, Command)> = branches
            .iter()
            .filter(|(q, _)| matches!(q, NCopat::Dtor { dtor, .. } if *dtor == xtor.name))
            .collect();
        if let Some(e) = flatten_group_copat(sig, scrut, xtor, &group)? {
            flat.push(e);
        }
    }
    Ok(Term::CoCase(flat))
}

fn flatten_group_copat(
    sig: &SignatureTable,
    scrut: Option<&TypeExpr>,
    xtor: &XtorSig,
    group: &[&(NCopat, Command)],
) -> Result<Option<(CoPattern, Command)>, CompileError> {
    if group.is_empty() {
        // Dead alternative (the Top padding): respond with the branchless
        // cocase.
        if xtor.quantified.is_empty() && xtor.term_inputs.is_empty() && xtor.co_inputs.len() == 1 {
            let comps = components(sig, &xtor.name, scrut, &[])?;
            let (cty, r) = comps.co_inputs.into_iter().next().unwrap();
            let g = "g".to_string();
            let body = Command::new(Term::CoCase(vec![]), cty, r, CoTerm::covar(g.clone()));
            return Ok(Some((
                CoPattern {
                    dtor: xtor.name.clone(),
                    ty_vars: vec![],
                    vars: vec![],
                    co_vars: vec![g],
                },
                body,
            )));
        }
        return cerr(format!(
            "non-exhaustive nested comatch: no branch for {}",
            xtor.name
        ));
    }
    if group.len() == 1 {
        let (q, body) = group[0];
        let (ty_vars, sub, co_sub) = match q {
            NCopat::Dtor {
                ty_vars,
                sub,
                co_sub,
                ..
            } => (ty_vars.clone(), sub.clone(), co_sub.clone()),
            NCopat::CoVar(_) => unreachable!(),
        };
        if ty_vars.len() != xtor.quantified.len()
            || co_sub.len() != xtor.co_inputs.len()
            || sub.len() != xtor.term_inputs.len()
        {
            return cerr(format!("arity mismatch in nested copattern {}", xtor.name));
        }
        let quant_args: Vec<TypeExpr> =
            ty_vars.iter().map(|t| TypeExpr::var(t.clone())).collect();
        let comps = components(sig, &xtor.name, scrut, &quant_args)?;
        let mut avoid = free_command(body).all_names();
        for p in &sub {
            all_binders_pat(p, &mut avoid);
        }
        for q in &co_sub {
            all_binders_copat(q, &mut avoid);
        }
        avoid.extend(ty_vars.iter().cloned());
        let mut flat_vars = Vec::new();
        let mut wrap_terms: Vec<(usize, Name)> = Vec::new();
        for (j, p) in sub.iter().enumerate() {
            match p {
                NPat::Var(x) => flat_vars.push(x.clone()),
                _ => {
                    let z = fresh("z", &avoid);
                    avoid.insert(z.clone());
                    flat_vars.push(z.clone());
                    wrap_terms.push((j, z));
                }
            }
        }
        let mut flat_covars = Vec::new();
        let mut wrap_cos: Vec<(usize, Name)> = Vec::new();
        for (j, q) in co_sub.iter().enumerate() {
            match q {
                NCopat::CoVar(a) => flat_covars.push(a.clone()),
                _ => {
                    let g = fresh("g", &avoid);
                    avoid.insert(g.clone());
                    flat_covars.push(g.clone());
                    wrap_cos.push((j, g));
                }
            }
        }
        let mut acc = body.clone();
        for (j, g) in wrap_cos.iter().rev() {
            let (bty, r) = &comps.co_inputs[*j];
            let inner = flatten_cocase(sig, bty.as_ref(), vec![(co_sub[*j].clone(), acc)])?;
            acc = Command::new(inner, bty.clone(), *r, CoTerm::covar(g.clone()));
        }
        for (j, z) in wrap_terms.iter().rev() {
            let (aty, t) = &comps.term_inputs[*j];
            let inner = flatten_case(sig, aty.as_ref(), vec![(sub[*j].clone(), acc)])?;
            acc = Command::new(Term::var(z.clone()), aty.clone(), *t, inner);
        }
        return Ok(Some((
            CoPattern {
                dtor: xtor.name.clone(),
                ty_vars,
                vars: flat_vars,
                co_vars: flat_covars,
            },
            acc,
        )));
    }
    let first = match group[0].0 {
        NCopat::Dtor {
            ref ty_vars,
            ref sub,
            ref co_sub,
            ..
        } => (ty_vars.clone(), sub.len(), co_sub.len()),
        NCopat::CoVar(_) => unreachable!(),
    };
    if !xtor.quantified.is_empty() {
        return cerr(format!(
            "overlapping nested copatterns for {} bind quantifiers",
            xtor.name
        ));
    }
    let same_var_tm = |j: usize| -> Option<Name> {
        let mut name: Option<Name> = None;
        for (q, _) in group {
            match q {
                NCopat::Dtor { sub, .. } => match &sub[j] {
                    NPat::Var(x) => {
                        if let Some(n) = &name {
                            if n != x {
                                return None;
                            }
                        } else {
                            name = Some(x.clone());
                        }
                    }
                    _ => return None,
                },
                NCopat::CoVar(_) => return None,
            }
        }
        name
    };
    let same_covar = |j: usize| -> Option<Name> {
        let mut name: Option<Name> = None;
        for (q, _) in group {
            match q {
                NCopat::Dtor { co_sub, .. } => match &co_sub[j] {
                    NCopat::CoVar(a) => {
                        if let Some(n) = &name {
                            if n != a {
                                return None;
                            }
                        } else {
                            name = Some(a.clone());
                        }
                    }
                    _ => return None,
                },
                NCopat::CoVar(_) => return None,
            }
        }
        name
    };
    let mut split_tm: Option<usize> = None;
    let mut split_co: Option<usize> = None;
    let mut flat_vars: Vec<Name> = Vec::new();
    let mut flat_covars: Vec<Name> = Vec::new();
    for j in 0..first.1 {
        match same_var_tm(j) {
            Some(x) => flat_vars.push(x),
            None => {
                if split_tm.is_some() || split_co.is_some() {
                    return cerr(format!(
                        "overlapping nested copatterns for {} differ in several positions",
                        xtor.name
                    ));
                }
                split_tm = Some(j);
                flat_vars.push(String::new());
            }
        }
    }
    for j in 0..first.2 {
        match same_covar(j) {
            Some(a) => flat_covars.push(a),
            None => {
                if split_tm.is_some() || split_co.is_some() {
                    return cerr(format!(
                        "overlapping nested copatterns for {} differ in several positions",
                        xtor.name
                    ));
                }
                split_co = Some(j);
                flat_covars.push(String::new());
            }
        }
    }
    let comps = components(sig, &xtor.name, scrut, &[])?;
    let mut avoid = BTreeSet::new();
    for (q, c) in group.iter() {
        all_binders_copat(q, &mut avoid);
        avoid.extend(free_command(c).all_names());
    }
    if let Some(j) = split_co {
        let g = fresh("g", &avoid);
        flat_covars[j] = g.clone();
        let subbranches: Vec<(NCopat, Command)> = group
            .iter()
            .map(|(q, c)| match q {
                NCopat::Dtor { co_sub, .. } => Ok((co_sub[j].clone(), c.clone())),
                NCopat::CoVar(_) => cerr("unexpected catch-all"),
            })
            .collect::<Result<_, _>>()?;
        let (bty, r) = &comps.co_inputs[j];
        let inner = flatten_cocase(sig, bty.as_ref(), subbranches)?;
        let body = Command::new(inner, bty.clone(), *r, CoTerm::covar(g));
        Ok(Some((
            CoPattern {
                dtor: xtor.name.clone(),
                ty_vars: vec![],
                vars: flat_vars,
                co_vars: flat_covars,
            },
            body,
        )))
    } else if let Some(j) = split_tm {
        let z = fresh("z", &avoid);
        flat_vars[j] = z.clone();
        let subbranches: Vec<(NPat, Command)> = group
            .iter()
            .map(|(q, c)| match q {
                NCopat::Dtor { sub, .. } => Ok((sub[j].clone(), c.clone())),
                NCopat::CoVar(_) => cerr("unexpected catch-all"),
            })
            .collect::<Result<_, _>>()?;
        let (aty, t) = &comps.term_inputs[j];
        let inner = flatten_case(sig, aty.as_ref(), subbranches)?;
        let body = Command::new(Term::var(z), aty.clone(), *t, inner);
        Ok(Some((
            CoPattern {
                dtor: xtor.name.clone(),
                ty_vars: vec![],
                vars: flat_vars,
                co_vars: flat_covars,
            },
            body,
        )))
    } else {
        cerr(format!("duplicate identical copatterns for {}", xtor.name))
    }
}

// --------------------------------------------------------------------------
// Command encoding
// --------------------------------------------------------------------------

/// Encode a focused command into core System D: declared constructions
/// become the shifted nested constructions of the data encoding, matches
/// over declared types become flattened core matches, and all types are
/// encoded pointwise.
pub fn encode_command(sig: &SignatureTable, c: &Command) -> Result<Command, CompileError> {
    Ok(Command {
        term: encode_term(sig, &c.term, c.annotation.as_ref())?,
        annotation: c.annotation.as_ref().map(|t| encode_type(sig, t)),
        discipline: c.discipline,
        coterm: encode_coterm(sig, &c.coterm, c.annotation.as_ref())?,
        span: c.span,
    })
}

pub fn encode_term(
    sig: &SignatureTable,
    v: &Term,
    ty: Option<&TypeExpr>,
) -> Result<Term, CompileError> {
    match v {
        Term::Var(_) => Ok(v.clone()),
        Term::Mu(a, body) => Ok(Term::Mu(a.clone(), Box::new(encode_command(sig, body)?))),
        Term::Construct {
            ctor,
            ty_args,
            co_args,
            args,
        } => {
            let (decl, idx) = sig.xtor(ctor).ok_or_else(|| CompileError {
                msg: format!("unknown constructor {ctor}"),
            })?;
            let comps = components(sig, ctor, ty, ty_args)?;
            if sig.is_core(decl.name.as_str()) {
                let co_args = co_args
                    .iter()
                    .zip(&comps.co_inputs)
                    .map(|(e, (bty, _))| encode_coterm(sig, e, bty.as_ref()))
                    .collect::<Result<_, _>>()?;
                let args = args
                    .iter()
                    .zip(&comps.term_inputs)
                    .map(|(t, (aty, _))| encode_term(sig, t, aty.as_ref()))
                    .collect::<Result<_, _>>()?;
                return Ok(Term::Construct {
                    ctor: ctor.clone(),
                    ty_args: ty_args.iter().map(|t| encode_type(sig, t)).collect(),
                    co_args,
                    args,
                });
            }
            let decl = decl.clone();
            let x = &decl.xtors[idx];
            let mut acc = Term::construct(names::UNIT, vec![], vec![], vec![]);
            for ((arg, (aty, _)), (_, t)) in
                args.iter().zip(&comps.term_inputs).zip(&x.term_inputs).rev()
            {
                let enc = encode_term(sig, arg, aty.as_ref())?;
                acc = Term::construct(
                    names::PAIR,
                    vec![],
                    vec![],
                    vec![
                        Term::construct(names::wrap(*t), vec![], vec![], vec![enc]),
                        acc,
                    ],
                );
            }
            for ((coarg, (bty, _)), (_, r)) in
                co_args.iter().zip(&comps.co_inputs).zip(&x.co_inputs).rev()
            {
                let enc = encode_coterm(sig, coarg, bty.as_ref())?;
                acc = Term::construct(
                    names::PAIR,
                    vec![],
                    vec![],
                    vec![
                        Term::construct(
                            names::CONT,
                            vec![],
                            vec![CoTerm::destruct(
                                names::unwrap(*r),
                                vec![],
                                vec![],
                                vec![enc],
                            )],
                            vec![],
                        ),
                        acc,
                    ],
                );
            }
            for (targ, (_, s)) in ty_args.iter().zip(&x.quantified).rev() {
                acc = Term::construct(
                    names::pack(*s),
                    vec![encode_type(sig, targ)],
                    vec![],
                    vec![acc],
                );
            }
            acc = Term::construct(names::INL, vec![], vec![], vec![acc]);
            for _ in 0..idx {
                acc = Term::construct(names::INR, vec![], vec![], vec![acc]);
            }
            Ok(Term::construct(
                names::delay(decl.result),
                vec![],
                vec![],
                vec![acc],
            ))
        }
        Term::CoCase(branches) => {
            if branches.is_empty() {
                return Ok(v.clone());
            }
            let (decl, _) = sig.xtor(&branches[0].0.dtor).ok_or_else(|| CompileError {
                msg: format!("unknown destructor {}", branches[0].0.dtor),
            })?;
            if sig.is_core(decl.name.as_str()) {
                return Ok(Term::CoCase(
                    branches
                        .iter()
                        .map(|(q, c)| Ok((q.clone(), encode_command(sig, c)?)))
                        .collect::<Result<_, CompileError>>()?,
                ));
            }
            let enc_ty = ty.map(|t| normalize_type(&encode_type(sig, t)));
            let nested = branches
                .iter()
                .map(|(q, c)| Ok((encode_copattern(sig, q)?, encode_command(sig, c)?)))
                .collect::<Result<Vec<_>, CompileError>>()?;
            flatten_cocase(sig, enc_ty.as_ref(), nested)
        }
    }
}

pub fn encode_coterm(
    sig: &SignatureTable,
    e: &CoTerm,
    ty: Option<&TypeExpr>,
) -> Result<CoTerm, CompileError> {
    match e {
        CoTerm::CoVar(_) => Ok(e.clone()),
        CoTerm::MuTilde(x, body) => Ok(CoTerm::MuTilde(
            x.clone(),
            Box::new(encode_command(sig, body)?),
        )),
        CoTerm::Destruct {
            dtor,
            ty_args,
            args,
            co_args,
        } => {
            let (decl, idx) = sig.xtor(dtor).ok_or_else(|| CompileError {
                msg: format!("unknown destructor {dtor}"),
            })?;
            let comps = components(sig, dtor, ty, ty_args)?;
            if sig.is_core(decl.name.as_str()) {
                let args = args
                    .iter()
                    .zip(&comps.term_inputs)
                    .map(|(t, (aty, _))| encode_term(sig, t, aty.as_ref()))
                    .collect::<Result<_, _>>()?;
                let co_args = co_args
                    .iter()
                    .zip(&comps.co_inputs)
                    .map(|(x, (bty, _))| encode_coterm(sig, x, bty.as_ref()))
                    .collect::<Result<_, _>>()?;
                return Ok(CoTerm::Destruct {
                    dtor: dtor.clone(),
                    ty_args: ty_args.iter().map(|t| encode_type(sig, t)).collect(),
                    args,
                    co_args,
                });
            }
            let decl = decl.clone();
            let x = &decl.xtors[idx];
            let mut acc = CoTerm::destruct(names::COUNIT, vec![], vec![], vec![]);
            for ((coarg, (bty, _)), (_, r)) in
                co_args.iter().zip(&comps.co_inputs).zip(&x.co_inputs).rev()
            {
                let enc = encode_coterm(sig, coarg, bty.as_ref())?;
                acc = CoTerm::destruct(
                    names::COPAIR,
                    vec![],
                    vec![],
                    vec![
                        CoTerm::destruct(names::unwrap(*r), vec![], vec![], vec![enc]),
                        acc,
                    ],
                );
            }
            for ((arg, (aty, _)), (_, t)) in
                args.iter().zip(&comps.term_inputs).zip(&x.term_inputs).rev()
            {
                let enc = encode_term(sig, arg, aty.as_ref())?;
                acc = CoTerm::destruct(
                    names::COPAIR,
                    vec![],
                    vec![],
                    vec![
                        CoTerm::destruct(
                            names::THROW,
                            vec![],
                            vec![Term::construct(names::wrap(*t), vec![], vec![], vec![enc])],
                            vec![],
                        ),
                        acc,
                    ],
                );
            }
            for (targ, (_, s)) in ty_args.iter().zip(&x.quantified).rev() {
                acc = CoTerm::destruct(
                    names::spec(*s),
                    vec![encode_type(sig, targ)],
                    vec![],
                    vec![acc],
                );
            }
            acc = CoTerm::destruct(names::FST, vec![], vec![], vec![acc]);
            for _ in 0..idx {
                acc = CoTerm::destruct(names::SND, vec![], vec![], vec![acc]);
            }
            Ok(CoTerm::destruct(
                names::force(decl.result),
                vec![],
                vec![],
                vec![acc],
            ))
        }
        CoTerm::Case(branches) => {
            if branches.is_empty() {
                return Ok(e.clone());
            }
            let (decl, _) = sig.xtor(&branches[0].0.ctor).ok_or_else(|| CompileError {
                msg: format!("unknown constructor {}", branches[0].0.ctor),
            })?;
            if sig.is_core(decl.name.as_str()) {
                return Ok(CoTerm::Case(
                    branches
                        .iter()
                        .map(|(p, c)| Ok((p.clone(), encode_command(sig, c)?)))
                        .collect::<Result<_, CompileError>>()?,
                ));
            }
            let enc_ty = ty.map(|t| normalize_type(&encode_type(sig, t)));
            let nested = branches
                .iter()
                .map(|(p, c)| Ok((encode_pattern(sig, p)?, encode_command(sig, c)?)))
                .collect::<Result<Vec<_>, CompileError>>()?;
            flatten_case(sig, enc_ty.as_ref(), nested)
        }
    }
}

/// Every connective mentioned anywhere in a command.
pub fn command_connectives(c: &Command) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    fn ty(t: &TypeExpr, out: &mut BTreeSet<Name>) {
        out.extend(t.connectives());
    }
    fn go(c: &Command, out: &mut BTreeSet<Name>) {
        if let Some(a) = &c.annotation {
            ty(a, out);
        }
        go_t(&c.term, out);
        go_e(&c.coterm, out);
    }
    fn go_t(v: &Term, out: &mut BTreeSet<Name>) {
        match v {
            Term::Var(_) => {}
            Term::Mu(_, c) => go(c, out),
            Term::Construct {
                ty_args,
                co_args,
                args,
                ..
            } => {
                for t in ty_args {
                    ty(t, out);
                }
                for e in co_args {
                    go_e(e, out);
                }
                for v in args {
                    go_t(v, out);
                }
            }
            Term::CoCase(bs) => {
                for (_, c) in bs {
                    go(c, out);
                }
            }
        }
    }
    fn go_e(e: &CoTerm, out: &mut BTreeSet<Name>) {
        match e {
            CoTerm::CoVar(_) => {}
            CoTerm::MuTilde(_, c) => go(c, out),
            CoTerm::Destruct {
                ty_args,
                args,
                co_args,
                ..
            } => {
                for t in ty_args {
                    ty(t, out);
                }
                for v in args {
                    go_t(v, out);
                }
                for e in co_args {
                    go_e(e, out);
                }
            }
            CoTerm::Case(bs) => {
                for (_, c) in bs {
                    go(c, out);
                }
            }
        }
    }
    go(c, &mut out);
    out
}

/// Every xtor used anywhere in a command.
pub fn command_xtors(c: &Command) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    fn go(c: &Command, out: &mut BTreeSet<Name>) {
        go_t(&c.term, out);
        go_e(&c.coterm, out);
    }
    fn go_t(v: &Term, out: &mut BTreeSet<Name>) {
        match v {
            Term::Var(_) => {}
            Term::Mu(_, c) => go(c, out),
            Term::Construct {
                ctor,
                co_args,
                args,
                ..
            } => {
                out.insert(ctor.clone());
                for e in co_args {
                    go_e(e, out);
                }
                for v in args {
                    go_t(v, out);
                }
            }
            Term::CoCase(bs) => {
                for (q, c) in bs {
                    out.insert(q.dtor.clone());
                    go(c, out);
                }
            }
        }
    }
    fn go_e(e: &CoTerm, out: &mut BTreeSet<Name>) {
        match e {
            CoTerm::CoVar(_) => {}
            CoTerm::MuTilde(_, c) => go(c, out),
            CoTerm::Destruct {
                dtor,
                args,
                co_args,
                ..
            } => {
                out.insert(dtor.clone());
                for v in args {
                    go_t(v, out);
                }
                for e in co_args {
                    go_e(e, out);
                }
            }
            CoTerm::Case(bs) => {
                for (p, c) in bs {
                    out.insert(p.ctor.clone());
                    go(c, out);
                }
            }
        }
    }
    go(c, &mut out);
    out
}

/// Does the command mention only core connectives and xtors?
pub fn is_core_command(sig: &SignatureTable, c: &Command) -> bool {
    command_connectives(c).iter().all(|n| sig.is_core(n))
        && command_xtors(c)
            .iter()
            .all(|x| sig.xtor(x).is_some_and(|(d, _)| sig.is_core(&d.name)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinds::{check_decl, kind_of, KindEnv};
    use crate::machine::{run, Status};
    use crate::surface::{parse_command_with, parse_type_with};
    use Discipline::*;

    fn fun_decl() -> Declaration {
        Declaration {
            polarity: Polarity::Codata,
            name: "Fun".into(),
            params: vec![("X".into(), Kind::Disc(Cbv)), ("Y".into(), Kind::Disc(Cbn))],
            result: Cbn,
            xtors: vec![XtorSig {
                name: "App".into(),
                quantified: vec![],
                term_inputs: vec![(TypeExpr::var("X"), Cbv)],
                co_inputs: vec![(TypeExpr::var("Y"), Cbn)],
            }],
        }
    }

    fn sub_decl() -> Declaration {
        Declaration {
            polarity: Polarity::Data,
            name: "Sub".into(),
            params: vec![("X".into(), Kind::Disc(Cbv)), ("Y".into(), Kind::Disc(Cbn))],
            result: Cbv,
            xtors: vec![XtorSig {
                name: "Yield".into(),
                quantified: vec![],
                term_inputs: vec![(TypeExpr::var("X"), Cbv)],
                co_inputs: vec![(TypeExpr::var("Y"), Cbn)],
            }],
        }
    }

    fn sig_with(decls: &[Declaration]) -> SignatureTable {
        let mut sig = SignatureTable::core();
        for d in decls {
            sig = check_decl(&sig, d).unwrap();
        }
        sig
    }

    #[test]
    fn fun_encoding_matches_the_displayed_translation() {
        let sig = sig_with(&[fun_decl()]);
        let enc = encode_type(&sig, &TypeExpr::con("Fun"));
        let expect = parse_type_with(
            "\\X:v. \\Y:n. FromNeg@n (With (Par (Neg (ToPos@v X)) (Par (ToNeg@n Y) Bot)) Top)",
            &[],
        )
        .unwrap();
        assert!(
            normalize_type(&enc).alpha_eq(&normalize_type(&expect)),
            "got {}",
            crate::surface::print_type(&enc)
        );
    }

    #[test]
    fn sub_encoding_matches_the_displayed_translation() {
        let sig = sig_with(&[sub_decl()]);
        let enc = encode_type(&sig, &TypeExpr::con("Sub"));
        let expect = parse_type_with(
            "\\X:v. \\Y:n. FromPos@v (Sum (Prod (Not (ToNeg@n Y)) (Prod (ToPos@v X) One)) Zero)",
            &[],
        )
        .unwrap();
        assert!(
            normalize_type(&enc).alpha_eq(&normalize_type(&expect)),
            "got {}",
            crate::surface::print_type(&enc)
        );
    }

    #[test]
    fn core_connectives_encode_to_themselves() {
        let sig = SignatureTable::core();
        let t = parse_type_with("Prod One (Sum One One)", &[]).unwrap();
        assert!(encode_type(&sig, &t).alpha_eq(&t));
    }

    #[test]
    fn encoding_preserves_kinds() {
        let sig = sig_with(&[fun_decl(), sub_decl()]);
        let theta = KindEnv::new();
        for src in [
            "Fun One Bot",
            "Sub One Bot",
            "Fun (Sub One Bot) (Fun One Bot)",
        ] {
            let t = parse_type_with(src, &[fun_decl(), sub_decl()]).unwrap();
            let k1 = kind_of(&theta, &sig, &t).unwrap();
            let k2 = kind_of(&theta, &sig, &encode_type(&sig, &t)).unwrap();
            assert_eq!(k1, k2, "kind changed for {src}");
        }
    }

    #[test]
    fn lift_introduces_administrative_bindings() {
        let sig = SignatureTable::core();
        let c = parse_command_with(
            "< Inl(mu b. < Unit | One : v | d >) | Sum One One : v | out >",
            &[],
        )
        .unwrap();
        let lifted = lift_command(&sig, &c).unwrap();
        assert!(is_focused_command(&sig, &lifted));
        // The translation is literal: the nullary Unit is wrapped too.
        let expect = parse_command_with(
            "< mu a. < mu b. < mu a0. < Unit | One : v | a0 > | One : v | d > | One : v | mut y. < Inl(y) | Sum One One : v | a > > | Sum One One : v | out >",
            &[],
        )
        .unwrap();
        assert!(
            alpha_eq_command(&lifted, &expect),
            "got {}",
            crate::surface::print_command(&lifted)
        );
    }

    #[test]
    fn lift_is_homomorphic_without_xtors() {
        let sig = SignatureTable::core();
        let c = parse_command_with("< v0 | _ : v | mut x. < x | _ : v | a > >", &[]).unwrap();
        let lifted = lift_command(&sig, &c).unwrap();
        assert!(alpha_eq_command(&lifted, &c));
    }

    #[test]
    fn encoded_declared_match_runs_like_the_source() {
        let my_sum = Declaration {
            polarity: Polarity::Data,
            name: "MySum".into(),
            params: vec![("X".into(), Kind::Disc(Cbv)), ("Y".into(), Kind::Disc(Cbv))],
            result: Cbv,
            xtors: vec![
                XtorSig {
                    name: "In1".into(),
                    quantified: vec![],
                    term_inputs: vec![(TypeExpr::var("X"), Cbv)],
                    co_inputs: vec![],
                },
                XtorSig {
                    name: "In2".into(),
                    quantified: vec![],
                    term_inputs: vec![(TypeExpr::var("Y"), Cbv)],
                    co_inputs: vec![],
                },
            ],
        };
        let sig2 = sig_with(&[my_sum.clone()]);
        let src2 = parse_command_with(
            "< In1(Unit) | MySum One One : v | case { In1(x) => < x | One : v | a > | In2(y) => < y | One : v | a0 > } >",
            &[my_sum],
        )
        .unwrap();
        let lifted = lift_command(&sig2, &src2).unwrap();
        let obs_src = run(&sig2, &lifted, 100);
        let enc = encode_command(&sig2, &lifted).unwrap();
        assert!(is_core_command(&sig2, &enc));
        let obs_enc = run(&sig2, &enc, 200);
        assert_eq!(obs_src.status, Status::Finished);
        assert_eq!(obs_enc.status, Status::Finished);
        assert_eq!(obs_src.needed.covars, obs_enc.needed.covars);
        assert!(obs_enc.steps >= obs_src.steps);
    }

    #[test]
    fn already_flat_branch_is_unchanged_by_flatten() {
        let sig = SignatureTable::core();
        let nested = vec![
            (
                NPat::ctor(names::INL, vec![], vec![], vec![NPat::Var("x".into())]),
                parse_command_with("< x | One : v | a >", &[]).unwrap(),
            ),
            (
                NPat::ctor(names::INR, vec![], vec![], vec![NPat::Var("y".into())]),
                parse_command_with("< y | One : v | a >", &[]).unwrap(),
            ),
        ];
        let ty = parse_type_with("Sum One One", &[]).unwrap();
        let flat = flatten_case(&sig, Some(&ty), nested).unwrap();
        let expect = parse_command_with(
            "< s | Sum One One : v | case { Inl(x) => < x | One : v | a > | Inr(y) => < y | One : v | a > } >",
            &[],
        )
        .unwrap()
        .coterm;
        assert!(alpha_eq_coterm(&flat, &expect));
    }

    #[test]
    fn deep_nested_pattern_flattens_to_chained_cuts() {
        // case over Delay@v(Inl(Wrap@v x)) expands to three chained matches.
        let sig = SignatureTable::core();
        let inner_ty = parse_type_with("ToPos@v One", &[]).unwrap();
        let sum_ty = parse_type_with("Sum (ToPos@v One) Zero", &[]).unwrap();
        let ty = parse_type_with("FromPos@v (Sum (ToPos@v One) Zero)", &[]).unwrap();
        let body = parse_command_with("< x | One : v | out >", &[]).unwrap();
        let nested = NPat::ctor(
            names::delay(Cbv),
            vec![],
            vec![],
            vec![NPat::ctor(
                names::INL,
                vec![],
                vec![],
                vec![NPat::ctor(
                    names::wrap(Cbv),
                    vec![],
                    vec![],
                    vec![NPat::Var("x".into())],
                )],
            )],
        );
        let flat = flatten_case(&sig, Some(&ty), vec![(nested, body)]).unwrap();
        // Shape: case { Delay@v(z) => < z | case { Inl(z0) => < z0 | case { Wrap@v(x) => body } > | Inr(z1) => <z1 | case { }> } > }
        match &flat {
            CoTerm::Case(branches) => {
                assert_eq!(branches.len(), 1);
                assert_eq!(branches[0].0.ctor, names::delay(Cbv));
                match &branches[0].1.coterm {
                    CoTerm::Case(inner) => {
                        assert_eq!(inner.len(), 2, "Inl branch plus dead Inr branch");
                        assert_eq!(inner[0].0.ctor, names::INL);
                        assert_eq!(inner[1].0.ctor, names::INR);
                    }
                    other => panic!("expected inner case, got {other:?}"),
                }
            }
            other => panic!("expected case, got {other:?}"),
        }
        let _ = (inner_ty, sum_ty);
    }
}

//! The abstract machine: discipline-specific (co)value recognizers, heap
//! decomposition, the deterministic standard-reduction step, needed-name
//! analysis, status classification, and the fueled run loop.
//!
//! Standard reduction fires at the top of a command or underneath heap
//! frames (delayed `need` bindings `< v | A : need | mut x. [] >` and
//! `coneed` bindings `< mu a. [] | A : coneed | e >`).  The mu rules for
//! `need`/`coneed` carry the extra side conditions that keep reduction
//! deterministic: a `need` mu-tilde only substitutes when it is itself a
//! covalue and the value is not a variable, and dually for `coneed`.

use crate::kinds::SignatureTable;
use crate::syntax::*;
use std::collections::{BTreeMap, BTreeSet};

/// One delayed binding on the path from the root to a reduction site.
#[derive(Clone, Debug)]
pub enum Frame {
    /// `< term | annotation : need | mut bound . [] >`
    Need {
        term: Term,
        annotation: Option<TypeExpr>,
        bound: Name,
    },
    /// `< mu bound . [] | annotation : coneed | coterm >`
    Coneed {
        bound: Name,
        annotation: Option<TypeExpr>,
        coterm: CoTerm,
    },
}

pub type HeapPath = Vec<Frame>;

/// Split off the maximal chain of heap frames above the innermost command.
pub fn decompose(c: &Command) -> (HeapPath, &Command) {
    let mut path = Vec::new();
    let mut cur = c;
    loop {
        match (cur.discipline, &cur.term, &cur.coterm) {
            (Discipline::Need, _, CoTerm::MuTilde(x, body)) => {
                path.push(Frame::Need {
                    term: cur.term.clone(),
                    annotation: cur.annotation.clone(),
                    bound: x.clone(),
                });
                cur = body;
            }
            (Discipline::Coneed, Term::Mu(a, body), _) => {
                path.push(Frame::Coneed {
                    bound: a.clone(),
                    annotation: cur.annotation.clone(),
                    coterm: cur.coterm.clone(),
                });
                cur = body;
            }
            _ => return (path, cur),
        }
    }
}

/// Reassemble a command from a heap path and an innermost command;
/// inverse to [`decompose`].
pub fn plug(path: &[Frame], inner: Command) -> Command {
    path.iter().rev().fold(inner, |acc, f| match f {
        Frame::Need {
            term,
            annotation,
            bound,
        } => Command::new(
            term.clone(),
            annotation.clone(),
            Discipline::Need,
            CoTerm::MuTilde(bound.clone(), Box::new(acc)),
        ),
        Frame::Coneed {
            bound,
            annotation,
            coterm,
        } => Command::new(
            Term::Mu(bound.clone(), Box::new(acc)),
            annotation.clone(),
            Discipline::Coneed,
            coterm.clone(),
        ),
    })
}

/// Is `v` substitutable for a variable of discipline `s`?
pub fn is_value(sig: &SignatureTable, v: &Term, s: Discipline) -> bool {
    match s {
        Discipline::Cbn => true,
        Discipline::Cbv | Discipline::Need => is_whnf(sig, v),
        Discipline::Coneed => {
            is_whnf(sig, v)
                || match v {
                    Term::Mu(a, body) => coneed_value_search(sig, body, a),
                    _ => false,
                }
        }
    }
}

/// Is `e` substitutable for a covariable of discipline `s`?
pub fn is_covalue(sig: &SignatureTable, e: &CoTerm, s: Discipline) -> bool {
    match s {
        Discipline::Cbv => true,
        Discipline::Cbn | Discipline::Coneed => is_forcing(sig, e),
        Discipline::Need => {
            is_forcing(sig, e)
                || match e {
                    CoTerm::MuTilde(x, body) => need_covalue_search(sig, body, x),
                    _ => false,
                }
        }
    }
}

/// Weak-head normal terms W: variables, focused constructions, cocases.
pub fn is_whnf(sig: &SignatureTable, v: &Term) -> bool {
    match v {
        Term::Var(_) => true,
        Term::CoCase(_) => true,
        Term::Mu(..) => false,
        Term::Construct {
            ctor,
            co_args,
            args,
            ..
        } => match sig.xtor(ctor) {
            Some((decl, idx)) => {
                let x = &decl.xtors[idx];
                x.co_inputs.len() == co_args.len()
                    && x.term_inputs.len() == args.len()
                    && co_args
                        .iter()
                        .zip(&x.co_inputs)
                        .all(|(e, (_, r))| is_covalue(sig, e, *r))
                    && args
                        .iter()
                        .zip(&x.term_inputs)
                        .all(|(v, (_, t))| is_value(sig, v, *t))
            }
            None => false,
        },
    }
}

/// Forcing coterms F: covariables, focused destructions, cases.
pub fn is_forcing(sig: &SignatureTable, e: &CoTerm) -> bool {
    match e {
        CoTerm::CoVar(_) => true,
        CoTerm::Case(_) => true,
        CoTerm::MuTilde(..) => false,
        CoTerm::Destruct {
            dtor,
            args,
            co_args,
            ..
        } => match sig.xtor(dtor) {
            Some((decl, idx)) => {
                let x = &decl.xtors[idx];
                x.term_inputs.len() == args.len()
                    && x.co_inputs.len() == co_args.len()
                    && args
                        .iter()
                        .zip(&x.term_inputs)
                        .all(|(v, (_, t))| is_value(sig, v, *t))
                    && co_args
                        .iter()
                        .zip(&x.co_inputs)
                        .all(|(e, (_, r))| is_covalue(sig, e, *r))
            }
            None => false,
        },
    }
}

/// Search for `H[< x | need | E >]` with `x` unbound by `H`: the eye shape
/// is tried first, then one heap frame whose binder differs from `x`.
fn need_covalue_search(sig: &SignatureTable, c: &Command, x: &str) -> bool {
    if c.discipline == Discipline::Need {
        if let Term::Var(y) = &c.term {
            if y == x && is_covalue(sig, &c.coterm, Discipline::Need) {
                return true;
            }
        }
    }
    match (c.discipline, &c.term, &c.coterm) {
        (Discipline::Need, _, CoTerm::MuTilde(y, body)) if y != x => {
            need_covalue_search(sig, body, x)
        }
        (Discipline::Coneed, Term::Mu(_, body), _) => need_covalue_search(sig, body, x),
        _ => false,
    }
}

/// Dual search for `H[< V | coneed | a >]` with `a` unbound by `H`.
fn coneed_value_search(sig: &SignatureTable, c: &Command, a: &str) -> bool {
    if c.discipline == Discipline::Coneed {
        if let CoTerm::CoVar(b) = &c.coterm {
            if b == a && is_value(sig, &c.term, Discipline::Coneed) {
                return true;
            }
        }
    }
    match (c.discipline, &c.term, &c.coterm) {
        (Discipline::Coneed, Term::Mu(b, body), _) if b != a => coneed_value_search(sig, body, a),
        (Discipline::Need, _, CoTerm::MuTilde(_, body)) => coneed_value_search(sig, body, a),
        _ => false,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rule {
    BetaMu,
    BetaMuTilde,
    BetaMuConeed,
    BetaMuTildeNeed,
    BetaP,
    BetaQ,
}

impl Rule {
    pub const ALL: [Rule; 6] = [
        Rule::BetaMu,
        Rule::BetaMuTilde,
        Rule::BetaMuConeed,
        Rule::BetaMuTildeNeed,
        Rule::BetaP,
        Rule::BetaQ,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Rule::BetaMu => "bmu",
            Rule::BetaMuTilde => "bmut",
            Rule::BetaMuConeed => "bmu_coneed",
            Rule::BetaMuTildeNeed => "bmut_need",
            Rule::BetaP => "bp",
            Rule::BetaQ => "bq",
        }
    }
}

#[derive(Clone, Debug)]
pub struct StepResult {
    pub next: Command,
    pub rule: Rule,
    /// Number of heap frames above the redex.
    pub depth: usize,
}

/// Try one specific rule at the top of `c`; no frame descent.
pub fn try_rule_at_top(sig: &SignatureTable, c: &Command, rule: Rule) -> Option<Command> {
    let s = c.discipline;
    match rule {
        Rule::BetaMu => {
            if s == Discipline::Coneed {
                return None;
            }
            if let Term::Mu(a, body) = &c.term {
                if is_covalue(sig, &c.coterm, s) {
                    return Some(subst_command(
                        body,
                        &Subst::one_coterm(a.clone(), c.coterm.clone()),
                    ));
                }
            }
            None
        }
        Rule::BetaMuTilde => {
            if s == Discipline::Need {
                return None;
            }
            if let CoTerm::MuTilde(x, body) = &c.coterm {
                if is_value(sig, &c.term, s) {
                    return Some(subst_command(
                        body,
                        &Subst::one_term(x.clone(), c.term.clone()),
                    ));
                }
            }
            None
        }
        Rule::BetaMuConeed => {
            if s != Discipline::Coneed {
                return None;
            }
            if matches!(&c.coterm, CoTerm::CoVar(_)) {
                return None;
            }
            if let Term::Mu(a, body) = &c.term {
                if is_value(sig, &c.term, Discipline::Coneed)
                    && is_covalue(sig, &c.coterm, Discipline::Coneed)
                {
                    return Some(subst_command(
                        body,
                        &Subst::one_coterm(a.clone(), c.coterm.clone()),
                    ));
                }
            }
            None
        }
        Rule::BetaMuTildeNeed => {
            if s != Discipline::Need {
                return None;
            }
            if matches!(&c.term, Term::Var(_)) {
                return None;
            }
            if let CoTerm::MuTilde(x, _) = &c.coterm {
                if is_covalue(sig, &c.coterm, Discipline::Need)
                    && is_value(sig, &c.term, Discipline::Need)
                {
                    if let CoTerm::MuTilde(_, body) = &c.coterm {
                        return Some(subst_command(
                            body,
                            &Subst::one_term(x.clone(), c.term.clone()),
                        ));
                    }
                }
            }
            None
        }
        Rule::BetaP => {
            let (ctor, ty_args, co_args, args) = match &c.term {
                Term::Construct {
                    ctor,
                    ty_args,
                    co_args,
                    args,
                } => (ctor, ty_args, co_args, args),
                _ => return None,
            };
            let branches = match &c.coterm {
                CoTerm::Case(bs) => bs,
                _ => return None,
            };
            if !is_whnf(sig, &c.term) {
                return None;
            }
            let (p, body) = branches.iter().find(|(p, _)| &p.ctor == ctor)?;
            if p.ty_vars.len() != ty_args.len()
                || p.co_vars.len() != co_args.len()
                || p.vars.len() != args.len()
            {
                return None;
            }
            let rho = match_subst(sig, ctor, &p.ty_vars, &p.co_vars, &p.vars, ty_args, co_args, args);
            Some(subst_command(body, &rho))
        }
        Rule::BetaQ => {
            let (dtor, ty_args, args, co_args) = match &c.coterm {
                CoTerm::Destruct {
                    dtor,
                    ty_args,
                    args,
                    co_args,
                } => (dtor, ty_args, args, co_args),
                _ => return None,
            };
            let branches = match &c.term {
                Term::CoCase(bs) => bs,
                _ => return None,
            };
            if !is_forcing(sig, &c.coterm) {
                return None;
            }
            let (q, body) = branches.iter().find(|(q, _)| &q.dtor == dtor)?;
            if q.ty_vars.len() != ty_args.len()
                || q.co_vars.len() != co_args.len()
                || q.vars.len() != args.len()
            {
                return None;
            }
            let rho = match_subst(sig, dtor, &q.ty_vars, &q.co_vars, &q.vars, ty_args, co_args, args);
            Some(subst_command(body, &rho))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn match_subst(
    sig: &SignatureTable,
    xtor: &str,
    ty_vars: &[Name],
    co_vars: &[Name],
    vars: &[Name],
    ty_args: &[TypeExpr],
    co_args: &[CoTerm],
    args: &[Term],
) -> Subst {
    let rho = Subst {
        types: ty_vars.iter().cloned().zip(ty_args.iter().cloned()).collect(),
        terms: vars.iter().cloned().zip(args.iter().cloned()).collect(),
        coterms: co_vars.iter().cloned().zip(co_args.iter().cloned()).collect(),
    };
    // The substitution built by a (co)pattern match is well-disciplined:
    // values in term positions, covalues in coterm positions.
    debug_assert!(
        sig.xtor(xtor).is_none_or_well_disciplined(sig, &rho),
        "ill-disciplined match substitution for {xtor}"
    );
    rho
}

trait MatchCheck {
    fn is_none_or_well_disciplined(&self, sig: &SignatureTable, rho: &Subst) -> bool;
}

impl MatchCheck for Option<(&Declaration, usize)> {
    fn is_none_or_well_disciplined(&self, sig: &SignatureTable, rho: &Subst) -> bool {
        match self {
            None => true,
            Some((decl, idx)) => {
                let x = &decl.xtors[*idx];
                rho.terms
                    .iter()
                    .zip(&x.term_inputs)
                    .all(|((_, v), (_, t))| is_value(sig, v, *t))
                    && rho
                        .coterms
                        .iter()
                        .zip(&x.co_inputs)
                        .all(|((_, e), (_, r))| is_covalue(sig, e, *r))
            }
        }
    }
}

/// The standard-reduction step: top-level rules first, then descend
/// through the command's own heap frame.
pub fn step(sig: &SignatureTable, c: &Command) -> Option<StepResult> {
    step_at(sig, c, 0)
}

fn step_at(sig: &SignatureTable, c: &Command, depth: usize) -> Option<StepResult> {
    for rule in Rule::ALL {
        if let Some(next) = try_rule_at_top(sig, c, rule) {
            return Some(StepResult { next, rule, depth });
        }
    }
    match (c.discipline, &c.term, &c.coterm) {
        (Discipline::Need, _, CoTerm::MuTilde(x, body)) => {
            let r = step_at(sig, body, depth + 1)?;
            Some(StepResult {
                next: Command {
                    term: c.term.clone(),
                    annotation: c.annotation.clone(),
                    discipline: c.discipline,
                    coterm: CoTerm::MuTilde(x.clone(), Box::new(r.next)),
                    span: c.span,
                },
                rule: r.rule,
                depth: r.depth,
            })
        }
        (Discipline::Coneed, Term::Mu(a, body), _) => {
            let r = step_at(sig, body, depth + 1)?;
            Some(StepResult {
                next: Command {
                    term: Term::Mu(a.clone(), Box::new(r.next)),
                    annotation: c.annotation.clone(),
                    discipline: c.discipline,
                    coterm: c.coterm.clone(),
                    span: c.span,
                },
                rule: r.rule,
                depth: r.depth,
            })
        }
        _ => None,
    }
}

/// Every (rule, depth) pair that fires anywhere in `c`; the determinism
/// property asserts this has at most one element.
pub fn applicable_rules(sig: &SignatureTable, c: &Command) -> Vec<(Rule, usize)> {
    let mut out = Vec::new();
    let mut cur = c;
    let mut depth = 0usize;
    loop {
        for rule in Rule::ALL {
            if try_rule_at_top(sig, cur, rule).is_some() {
                out.push((rule, depth));
            }
        }
        match (cur.discipline, &cur.term, &cur.coterm) {
            (Discipline::Need, _, CoTerm::MuTilde(_, body)) => {
                cur = body;
                depth += 1;
            }
            (Discipline::Coneed, Term::Mu(_, body), _) => {
                cur = body;
                depth += 1;
            }
            _ => break,
        }
    }
    out
}

/// The needed names of a normal command, with the (co)term at each eye.
#[derive(Clone, Debug, Default)]
pub struct Needed {
    pub vars: BTreeSet<Name>,
    pub covars: BTreeSet<Name>,
    /// For each needed covariable, the value delivered to it.
    pub eyes_covar: BTreeMap<Name, Term>,
    /// For each needed variable, the covalue forcing it.
    pub eyes_var: BTreeMap<Name, CoTerm>,
}

impl Needed {
    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.covars.is_empty()
    }
}

/// All needed (co)variables per the heap-decomposition reading: every eye
/// `< x | S | E_S >` (`x` unbound on the path) and `< V_S | S | a >`
/// (`a` unbound), collected across all decompositions.  Empty when the
/// command can still step.
pub fn needed(sig: &SignatureTable, c: &Command) -> Needed {
    let mut out = Needed::default();
    if step(sig, c).is_some() {
        return out;
    }
    collect_needed(sig, c, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

fn collect_needed(
    sig: &SignatureTable,
    c: &Command,
    bound_vars: &mut Vec<Name>,
    bound_covars: &mut Vec<Name>,
    out: &mut Needed,
) {
    if let Term::Var(x) = &c.term {
        if !bound_vars.iter().any(|b| b == x) && is_covalue(sig, &c.coterm, c.discipline) {
            out.vars.insert(x.clone());
            out.eyes_var.entry(x.clone()).or_insert_with(|| c.coterm.clone());
        }
    }
    if let CoTerm::CoVar(a) = &c.coterm {
        if !bound_covars.iter().any(|b| b == a) && is_value(sig, &c.term, c.discipline) {
            out.covars.insert(a.clone());
            out.eyes_covar.entry(a.clone()).or_insert_with(|| c.term.clone());
        }
    }
    match (c.discipline, &c.term, &c.coterm) {
        (Discipline::Need, _, CoTerm::MuTilde(x, body)) => {
            bound_vars.push(x.clone());
            collect_needed(sig, body, bound_vars, bound_covars, out);
            bound_vars.pop();
        }
        (Discipline::Coneed, Term::Mu(a, body), _) => {
            bound_covars.push(a.clone());
            collect_needed(sig, body, bound_vars, bound_covars, out);
            bound_covars.pop();
        }
        _ => {}
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Finished,
    Stuck,
    Timeout,
}

impl Status {
    pub fn token(self) -> &'static str {
        match self {
            Status::Finished => "finished",
            Status::Stuck => "stuck",
            Status::Timeout => "timeout",
        }
    }
}

/// The outcome of a run: status, step count, needed names, and the eye
/// (co)terms delivered to them.
#[derive(Clone, Debug)]
pub struct Observation {
    pub status: Status,
    pub steps: usize,
    pub needed: Needed,
    pub final_command: Command,
}

#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub step: usize,
    pub rule: Rule,
    pub depth: usize,
    pub command: Command,
}

/// Iterate standard reduction up to `fuel` steps and classify the result.
pub fn run(sig: &SignatureTable, c: &Command, fuel: usize) -> Observation {
    run_traced(sig, c, fuel, false).0
}

pub fn run_traced(
    sig: &SignatureTable,
    c: &Command,
    fuel: usize,
    trace: bool,
) -> (Observation, Vec<TraceEntry>) {
    let mut cur = c.clone();
    let mut steps = 0usize;
    let mut entries = Vec::new();
    loop {
        match step(sig, &cur) {
            Some(r) => {
                if steps >= fuel {
                    return (
                        Observation {
                            status: Status::Timeout,
                            steps,
                            needed: Needed::default(),
                            final_command: cur,
                        },
                        entries,
                    );
                }
                steps += 1;
                if trace {
                    entries.push(TraceEntry {
                        step: steps,
                        rule: r.rule,
                        depth: r.depth,
                        command: r.next.clone(),
                    });
                }
                cur = r.next;
            }
            None => {
                let n = needed(sig, &cur);
                let status = if n.is_empty() {
                    Status::Stuck
                } else {
                    Status::Finished
                };
                return (
                    Observation {
                        status,
                        steps,
                        needed: n,
                        final_command: cur,
                    },
                    entries,
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinds::names;
    use crate::surface::parse_command_with;
    use Discipline::*;

    fn sig() -> SignatureTable {
        SignatureTable::core()
    }

    fn parse(src: &str) -> Command {
        parse_command_with(src, &[]).unwrap()
    }

    #[test]
    fn critical_pair_resolves_by_discipline() {
        let sig = sig();
        let cv = parse("< mu d. < x | _ : v | a > | _ : v | mut z. < y | _ : v | b > >");
        let r = step(&sig, &cv).unwrap();
        assert_eq!(r.rule, Rule::BetaMu);
        assert!(alpha_eq_command(&r.next, &parse("< x | _ : v | a >")));

        let cn = parse("< mu d. < x | _ : n | a > | _ : n | mut z. < y | _ : n | b > >");
        let r = step(&sig, &cn).unwrap();
        assert_eq!(r.rule, Rule::BetaMuTilde);
        assert!(alpha_eq_command(&r.next, &parse("< y | _ : n | b >")));
    }

    #[test]
    fn pattern_match_binds_positionally() {
        let sig = sig();
        let c = parse(
            "< Pair(Unit, Inl(Unit)) | _ : v | case { Pair(x, y) => < y | _ : v | a > } >",
        );
        let r = step(&sig, &c).unwrap();
        assert_eq!(r.rule, Rule::BetaP);
        assert!(alpha_eq_command(&r.next, &parse("< Inl(Unit) | _ : v | a >")));
    }

    #[test]
    fn chained_variable_demand_does_not_fire() {
        let sig = sig();
        let c = parse("< x | _ : need | mut y. < y | _ : need | mut z. < z | _ : need | a > > >");
        assert!(step(&sig, &c).is_none());
        // x is needed through the chain of forcing mu-tildes
        let n = needed(&sig, &c);
        assert!(n.vars.contains("x"));
        assert!(!n.vars.contains("y"));
        assert!(!n.vars.contains("z"));
    }

    #[test]
    fn need_covalue_recognizer() {
        let sig = sig();
        // mut f. < f | need | Fst[a] > forces f (eye with forcing coterm)
        let e = parse_command_with("< W | _ : need | mut f. < f | _ : need | a > >", &[])
            .unwrap()
            .coterm;
        assert!(is_covalue(&sig, &e, Need));
        // mut x. < y | need | a > never demands x
        let e2 = parse_command_with("< W | _ : need | mut x. < y | _ : need | a > >", &[])
            .unwrap()
            .coterm;
        assert!(!is_covalue(&sig, &e2, Need));
    }

    #[test]
    fn coneed_value_recognizer_through_one_frame() {
        let sig = sig();
        // mu a. < v | need | mut y. < Unit | coneed | a > >  -- a 1-frame heap
        let v = parse_command_with(
            "< mu a. < v | _ : need | mut y. < Unit | _ : coneed | a > > | _ : coneed | e >",
            &[],
        )
        .unwrap()
        .term;
        assert!(is_value(&sig, &v, Coneed));
        // but not when the heap binds the searched covariable
        let v2 = parse_command_with(
            "< mu a. < mu a. < Unit | _ : coneed | a > | _ : coneed | e0 > | _ : coneed | e >",
            &[],
        )
        .unwrap()
        .term;
        assert!(!is_value(&sig, &v2, Coneed));
    }

    #[test]
    fn finished_vs_stuck_vs_timeout() {
        let sig = sig();
        // < x | v | a >: both x and a needed (both Def. clauses apply)
        let c = parse("< x | _ : v | a >");
        let obs = run(&sig, &c, 10);
        assert_eq!(obs.status, Status::Finished);
        assert_eq!(obs.steps, 0);
        assert!(obs.needed.vars.contains("x") && obs.needed.covars.contains("a"));

        // < Unit | need | a >: only a needed
        let c = parse("< Unit | _ : need | a >");
        let obs = run(&sig, &c, 10);
        assert_eq!(obs.status, Status::Finished);
        assert_eq!(
            obs.needed.covars,
            BTreeSet::from(["a".to_string()])
        );
        assert!(obs.needed.vars.is_empty());
        assert!(alpha_eq_term(
            &obs.needed.eyes_covar["a"],
            &Term::construct(names::UNIT, vec![], vec![], vec![])
        ));

        // < Inl(x) | v | case{} >-ish shape is stuck: no branch matches
        let c = parse("< Inl(x) | _ : v | case { Inr(y) => < y | _ : v | a > } >");
        let obs = run(&sig, &c, 10);
        assert_eq!(obs.status, Status::Stuck);
    }

    #[test]
    fn fuel_zero_times_out_on_reducible() {
        let sig = sig();
        let c = parse("< mu d. < x | _ : v | a > | _ : v | mut z. < y | _ : v | b > >");
        let obs = run(&sig, &c, 0);
        assert_eq!(obs.status, Status::Timeout);
    }

    #[test]
    fn needed_mu_tilde_implies_bound_var_needed() {
        let sig = sig();
        let e = parse_command_with("< W | _ : need | mut f. < f | _ : need | a > >", &[])
            .unwrap()
            .coterm;
        if let CoTerm::MuTilde(x, body) = &e {
            assert!(is_covalue(&sig, &e, Need));
            let n = needed(&sig, body);
            assert!(n.vars.contains(x.as_str()));
        } else {
            unreachable!()
        }
    }

    #[test]
    fn decompose_plug_roundtrip() {
        let sig = sig();
        let c = parse(
            "< v0 | _ : need | mut x. < mu b. < x | _ : need | a > | _ : coneed | e0 > >",
        );
        let (path, inner) = decompose(&c);
        assert_eq!(path.len(), 2);
        let c2 = plug(&path, inner.clone());
        assert!(alpha_eq_command(&c, &c2));
        let _ = sig;
    }
}

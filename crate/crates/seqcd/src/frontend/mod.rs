//! The lambda-mu-mu-tilde source calculi: functions and sums under the
//! four strategies, direct steppers, strategy sub-syntax checks, and the
//! polarizing compilations into the full calculus.

pub mod parse;
pub mod polarize;
pub mod step;

pub use parse::{parse_lmtm_program, LmtmProgram};
pub use polarize::{polarize_command, polarize_program, polarize_type, LType, Scheme};
pub use step::{lmtm_run, lmtm_step, strategy_check, LObservation, LRule};

use crate::syntax::Name;
use std::collections::BTreeSet;
use std::fmt;

/// Evaluation strategy of a source program: Q is call-by-value, T is
/// call-by-name, plus call-by-need and its dual.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    Q,
    T,
    Need,
    Coneed,
}

impl Strategy {
    pub fn token(self) -> &'static str {
        match self {
            Strategy::Q => "q",
            Strategy::T => "t",
            Strategy::Need => "need",
            Strategy::Coneed => "coneed",
        }
    }

    pub fn from_token(s: &str) -> Option<Strategy> {
        match s {
            "q" | "v" => Some(Strategy::Q),
            "t" | "n" => Some(Strategy::T),
            "need" => Some(Strategy::Need),
            "coneed" => Some(Strategy::Coneed),
            _ => None,
        }
    }

    pub fn discipline(self) -> crate::syntax::Discipline {
        match self {
            Strategy::Q => crate::syntax::Discipline::Cbv,
            Strategy::T => crate::syntax::Discipline::Cbn,
            Strategy::Need => crate::syntax::Discipline::Need,
            Strategy::Coneed => crate::syntax::Discipline::Coneed,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Clone, Debug)]
pub struct LCommand {
    pub term: LTerm,
    pub coterm: LCoTerm,
}

#[derive(Clone, Debug)]
pub enum LTerm {
    Var(Name),
    Mu(Name, Box<LCommand>),
    /// The function abstraction mu(x . a).c, written `\(x, a). c`.
    Lam(Name, Name, Box<LCommand>),
    Inl(Box<LTerm>),
    Inr(Box<LTerm>),
    /// Opaque numeral literals; values in every strategy.
    Num(u64),
}

#[derive(Clone, Debug)]
pub enum LCoTerm {
    CoVar(Name),
    MuTilde(Name, Box<LCommand>),
    /// The call stack `v . e`.
    Stack(Box<LTerm>, Box<LCoTerm>),
    Case {
        left: (Name, Box<LCommand>),
        right: (Name, Box<LCommand>),
    },
}

impl LCommand {
    pub fn new(term: LTerm, coterm: LCoTerm) -> LCommand {
        LCommand { term, coterm }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LFree {
    pub vars: BTreeSet<Name>,
    pub covars: BTreeSet<Name>,
}

pub fn lfree_command(c: &LCommand) -> LFree {
    let mut f = lfree_term(&c.term);
    let g = lfree_coterm(&c.coterm);
    f.vars.extend(g.vars);
    f.covars.extend(g.covars);
    f
}

pub fn lfree_term(t: &LTerm) -> LFree {
    match t {
        LTerm::Var(x) => LFree {
            vars: BTreeSet::from([x.clone()]),
            covars: BTreeSet::new(),
        },
        LTerm::Mu(a, c) => {
            let mut f = lfree_command(c);
            f.covars.remove(a);
            f
        }
        LTerm::Lam(x, a, c) => {
            let mut f = lfree_command(c);
            f.vars.remove(x);
            f.covars.remove(a);
            f
        }
        LTerm::Inl(v) | LTerm::Inr(v) => lfree_term(v),
        LTerm::Num(_) => LFree::default(),
    }
}

pub fn lfree_coterm(e: &LCoTerm) -> LFree {
    match e {
        LCoTerm::CoVar(a) => LFree {
            vars: BTreeSet::new(),
            covars: BTreeSet::from([a.clone()]),
        },
        LCoTerm::MuTilde(x, c) => {
            let mut f = lfree_command(c);
            f.vars.remove(x);
            f
        }
        LCoTerm::Stack(v, e) => {
            let mut f = lfree_term(v);
            let g = lfree_coterm(e);
            f.vars.extend(g.vars);
            f.covars.extend(g.covars);
            f
        }
        LCoTerm::Case { left, right } => {
            let mut f = lfree_command(&left.1);
            f.vars.remove(&left.0);
            let mut g = lfree_command(&right.1);
            g.vars.remove(&right.0);
            f.vars.extend(g.vars);
            f.covars.extend(g.covars);
            f
        }
    }
}

/// Simultaneous capture-avoiding substitution for the source calculus.
#[derive(Clone, Debug, Default)]
pub struct LSubst {
    pub terms: Vec<(Name, LTerm)>,
    pub coterms: Vec<(Name, LCoTerm)>,
}

impl LSubst {
    pub fn one_term(x: impl Into<Name>, v: LTerm) -> LSubst {
        LSubst {
            terms: vec![(x.into(), v)],
            coterms: vec![],
        }
    }

    pub fn one_coterm(a: impl Into<Name>, e: LCoTerm) -> LSubst {
        LSubst {
            terms: vec![],
            coterms: vec![(a.into(), e)],
        }
    }

    fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.coterms.is_empty()
    }

    fn range_free(&self) -> LFree {
        let mut f = LFree::default();
        for (_, v) in &self.terms {
            let g = lfree_term(v);
            f.vars.extend(g.vars);
            f.covars.extend(g.covars);
        }
        for (_, e) in &self.coterms {
            let g = lfree_coterm(e);
            f.vars.extend(g.vars);
            f.covars.extend(g.covars);
        }
        f
    }

    fn without_var(&self, x: &str) -> LSubst {
        LSubst {
            terms: self.terms.iter().filter(|(n, _)| n != x).cloned().collect(),
            coterms: self.coterms.clone(),
        }
    }

    fn without_covar(&self, a: &str) -> LSubst {
        LSubst {
            terms: self.terms.clone(),
            coterms: self.coterms.iter().filter(|(n, _)| n != a).cloned().collect(),
        }
    }
}

fn avoid_set(rho: &LSubst, body: &LCommand) -> BTreeSet<Name> {
    let mut avoid = BTreeSet::new();
    let r = rho.range_free();
    avoid.extend(r.vars);
    avoid.extend(r.covars);
    let b = lfree_command(body);
    avoid.extend(b.vars);
    avoid.extend(b.covars);
    for (n, _) in &rho.terms {
        avoid.insert(n.clone());
    }
    for (n, _) in &rho.coterms {
        avoid.insert(n.clone());
    }
    avoid
}

pub fn lsubst_command(c: &LCommand, rho: &LSubst) -> LCommand {
    if rho.is_empty() {
        return c.clone();
    }
    LCommand {
        term: lsubst_term(&c.term, rho),
        coterm: lsubst_coterm(&c.coterm, rho),
    }
}

pub fn lsubst_term(t: &LTerm, rho: &LSubst) -> LTerm {
    match t {
        LTerm::Var(x) => rho
            .terms
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| t.clone()),
        LTerm::Num(_) => t.clone(),
        LTerm::Mu(a, body) => {
            let live = rho.without_covar(a);
            if live.is_empty() {
                return t.clone();
            }
            if live.range_free().covars.contains(a) {
                let avoid = avoid_set(&live, body);
                let a2 = crate::syntax::fresh(a, &avoid);
                let renamed =
                    lsubst_command(body, &LSubst::one_coterm(a.clone(), LCoTerm::CoVar(a2.clone())));
                LTerm::Mu(a2, Box::new(lsubst_command(&renamed, &live)))
            } else {
                LTerm::Mu(a.clone(), Box::new(lsubst_command(body, &live)))
            }
        }
        LTerm::Lam(x, a, body) => {
            let live = rho.without_var(x).without_covar(a);
            if live.is_empty() {
                return t.clone();
            }
            let rf = live.range_free();
            let mut x2 = x.clone();
            let mut a2 = a.clone();
            let mut renamed = (**body).clone();
            if rf.vars.contains(x) {
                let avoid = avoid_set(&live, &renamed);
                x2 = crate::syntax::fresh(x, &avoid);
                renamed =
                    lsubst_command(&renamed, &LSubst::one_term(x.clone(), LTerm::Var(x2.clone())));
            }
            if rf.covars.contains(a) {
                let avoid = avoid_set(&live, &renamed);
                a2 = crate::syntax::fresh(a, &avoid);
                renamed = lsubst_command(
                    &renamed,
                    &LSubst::one_coterm(a.clone(), LCoTerm::CoVar(a2.clone())),
                );
            }
            LTerm::Lam(x2, a2, Box::new(lsubst_command(&renamed, &live)))
        }
        LTerm::Inl(v) => LTerm::Inl(Box::new(lsubst_term(v, rho))),
        LTerm::Inr(v) => LTerm::Inr(Box::new(lsubst_term(v, rho))),
    }
}

pub fn lsubst_coterm(e: &LCoTerm, rho: &LSubst) -> LCoTerm {
    match e {
        LCoTerm::CoVar(a) => rho
            .coterms
            .iter()
            .rev()
            .find(|(n, _)| n == a)
            .map(|(_, x)| x.clone())
            .unwrap_or_else(|| e.clone()),
        LCoTerm::MuTilde(x, body) => {
            let live = rho.without_var(x);
            if live.is_empty() {
                return e.clone();
            }
            if live.range_free().vars.contains(x) {
                let avoid = avoid_set(&live, body);
                let x2 = crate::syntax::fresh(x, &avoid);
                let renamed =
                    lsubst_command(body, &LSubst::one_term(x.clone(), LTerm::Var(x2.clone())));
                LCoTerm::MuTilde(x2, Box::new(lsubst_command(&renamed, &live)))
            } else {
                LCoTerm::MuTilde(x.clone(), Box::new(lsubst_command(body, &live)))
            }
        }
        LCoTerm::Stack(v, rest) => LCoTerm::Stack(
            Box::new(lsubst_term(v, rho)),
            Box::new(lsubst_coterm(rest, rho)),
        ),
        LCoTerm::Case { left, right } => {
            let do_side = |(x, body): &(Name, Box<LCommand>)| {
                let live = rho.without_var(x);
                if live.is_empty() {
                    return (x.clone(), body.clone());
                }
                if live.range_free().vars.contains(x) {
                    let avoid = avoid_set(&live, body);
                    let x2 = crate::syntax::fresh(x, &avoid);
                    let renamed =
                        lsubst_command(body, &LSubst::one_term(x.clone(), LTerm::Var(x2.clone())));
                    (x2, Box::new(lsubst_command(&renamed, &live)))
                } else {
                    (x.clone(), Box::new(lsubst_command(body, &live)))
                }
            };
            LCoTerm::Case {
                left: do_side(left),
                right: do_side(right),
            }
        }
    }
}

pub fn lalpha_eq_command(a: &LCommand, b: &LCommand) -> bool {
    fn envmatch(stack: &[(Name, Name)], x: &str, y: &str) -> bool {
        for (l, r) in stack.iter().rev() {
            if l == x || r == y {
                return l == x && r == y;
            }
        }
        x == y
    }
    fn cmd(a: &LCommand, b: &LCommand, vs: &mut Vec<(Name, Name)>, cs: &mut Vec<(Name, Name)>) -> bool {
        tm(&a.term, &b.term, vs, cs) && co(&a.coterm, &b.coterm, vs, cs)
    }
    fn tm(a: &LTerm, b: &LTerm, vs: &mut Vec<(Name, Name)>, cs: &mut Vec<(Name, Name)>) -> bool {
        match (a, b) {
            (LTerm::Var(x), LTerm::Var(y)) => envmatch(vs, x, y),
            (LTerm::Num(m), LTerm::Num(n)) => m == n,
            (LTerm::Mu(x, c1), LTerm::Mu(y, c2)) => {
                cs.push((x.clone(), y.clone()));
                let r = cmd(c1, c2, vs, cs);
                cs.pop();
                r
            }
            (LTerm::Lam(x1, a1, c1), LTerm::Lam(x2, a2, c2)) => {
                vs.push((x1.clone(), x2.clone()));
                cs.push((a1.clone(), a2.clone()));
                let r = cmd(c1, c2, vs, cs);
                vs.pop();
                cs.pop();
                r
            }
            (LTerm::Inl(v1), LTerm::Inl(v2)) | (LTerm::Inr(v1), LTerm::Inr(v2)) => {
                tm(v1, v2, vs, cs)
            }
            _ => false,
        }
    }
    fn co(a: &LCoTerm, b: &LCoTerm, vs: &mut Vec<(Name, Name)>, cs: &mut Vec<(Name, Name)>) -> bool {
        match (a, b) {
            (LCoTerm::CoVar(x), LCoTerm::CoVar(y)) => envmatch(cs, x, y),
            (LCoTerm::MuTilde(x, c1), LCoTerm::MuTilde(y, c2)) => {
                vs.push((x.clone(), y.clone()));
                let r = cmd(c1, c2, vs, cs);
                vs.pop();
                r
            }
            (LCoTerm::Stack(v1, e1), LCoTerm::Stack(v2, e2)) => {
                tm(v1, v2, vs, cs) && co(e1, e2, vs, cs)
            }
            (
                LCoTerm::Case { left: l1, right: r1 },
                LCoTerm::Case { left: l2, right: r2 },
            ) => {
                vs.push((l1.0.clone(), l2.0.clone()));
                let a = cmd(&l1.1, &l2.1, vs, cs);
                vs.pop();
                if !a {
                    return false;
                }
                vs.push((r1.0.clone(), r2.0.clone()));
                let b = cmd(&r1.1, &r2.1, vs, cs);
                vs.pop();
                b
            }
            _ => false,
        }
    }
    cmd(a, b, &mut Vec::new(), &mut Vec::new())
}

pub fn print_lcommand(c: &LCommand) -> String {
    format!("< {} | {} >", print_lterm(&c.term), print_lcoterm(&c.coterm))
}

pub fn print_lterm(t: &LTerm) -> String {
    match t {
        LTerm::Var(x) => x.clone(),
        LTerm::Num(n) => n.to_string(),
        LTerm::Mu(a, c) => format!("mu {a}. {}", print_lcommand(c)),
        LTerm::Lam(x, a, c) => format!("\\({x}, {a}). {}", print_lcommand(c)),
        LTerm::Inl(v) => format!("inl {}", print_latom(v)),
        LTerm::Inr(v) => format!("inr {}", print_latom(v)),
    }
}

fn print_latom(t: &LTerm) -> String {
    match t {
        LTerm::Var(_) | LTerm::Num(_) => print_lterm(t),
        _ => format!("({})", print_lterm(t)),
    }
}

pub fn print_lcoterm(e: &LCoTerm) -> String {
    match e {
        LCoTerm::CoVar(a) => a.clone(),
        LCoTerm::MuTilde(x, c) => format!("mut {x}. {}", print_lcommand(c)),
        LCoTerm::Stack(v, e) => format!("{} . {}", print_latom(v), print_lcoterm(e)),
        LCoTerm::Case { left, right } => format!(
            "case {{ inl {} => {} | inr {} => {} }}",
            left.0,
            print_lcommand(&left.1),
            right.0,
            print_lcommand(&right.1)
        ),
    }
}

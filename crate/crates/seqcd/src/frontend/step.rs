//! Direct steppers for the four lambda-mu-mu-tilde sub-calculi, their
//! strategy sub-syntax checks, and the fueled run loop.
//!
//! Reduction under `need`/`coneed` descends through the source heap frames
//! (`< v | mut x . [] >` resp. `< mu a . [] | e >`).  The mu-tilde rule at
//! `need` carries the same determinism side conditions as the machine: the
//! mu-tilde must itself be a covalue and the value must not be a variable
//! (dually for mu at `coneed`).

use super::*;
use crate::machine::Status;
use std::collections::{BTreeMap, BTreeSet};

/// Is `v` substitutable under strategy `s`?
pub fn is_lvalue(v: &LTerm, s: Strategy) -> bool {
    match s {
        Strategy::T => true,
        Strategy::Q | Strategy::Need => is_lwhnf(v),
        Strategy::Coneed => {
            is_lwhnf(v)
                || match v {
                    LTerm::Mu(a, body) => coneed_search(body, a),
                    _ => false,
                }
        }
    }
}

fn is_lwhnf(v: &LTerm) -> bool {
    match v {
        LTerm::Var(_) | LTerm::Lam(..) | LTerm::Num(_) => true,
        LTerm::Inl(v) | LTerm::Inr(v) => is_lwhnf(v),
        LTerm::Mu(..) => false,
    }
}

/// Is `e` substitutable under strategy `s`?
pub fn is_lcovalue(e: &LCoTerm, s: Strategy) -> bool {
    match s {
        Strategy::Q => true,
        Strategy::T => is_lforcing(e, s),
        Strategy::Coneed => is_lforcing(e, s),
        Strategy::Need => {
            is_lforcing(e, s)
                || match e {
                    LCoTerm::MuTilde(x, body) => need_search(body, x),
                    _ => false,
                }
        }
    }
}

fn is_lforcing(e: &LCoTerm, s: Strategy) -> bool {
    match e {
        LCoTerm::CoVar(_) | LCoTerm::Case { .. } => true,
        LCoTerm::Stack(h, t) => {
            let head_ok = match s {
                Strategy::T => true,
                _ => is_lvalue(h, s),
            };
            head_ok && is_lcovalue(t, s)
        }
        LCoTerm::MuTilde(..) => false,
    }
}

/// `mut x. H[< x | E >]` with `x` not bound by `H`.
fn need_search(c: &LCommand, x: &str) -> bool {
    if let LTerm::Var(y) = &c.term {
        if y == x && is_lcovalue(&c.coterm, Strategy::Need) {
            return true;
        }
    }
    match &c.coterm {
        LCoTerm::MuTilde(y, body) if y != x => need_search(body, x),
        _ => false,
    }
}

/// `mu a. H[< V | a >]` with `a` not bound by `H`.
fn coneed_search(c: &LCommand, a: &str) -> bool {
    if let LCoTerm::CoVar(b) = &c.coterm {
        if b == a && is_lvalue(&c.term, Strategy::Coneed) {
            return true;
        }
    }
    match &c.term {
        LTerm::Mu(b, body) if b != a => coneed_search(body, a),
        _ => false,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LRule {
    BetaMu,
    BetaMuTilde,
    BetaFun,
    BetaSum,
}

impl LRule {
    pub fn token(self) -> &'static str {
        match self {
            LRule::BetaMu => "bmu",
            LRule::BetaMuTilde => "bmut",
            LRule::BetaFun => "bfun",
            LRule::BetaSum => "bsum",
        }
    }
}

fn top_step(c: &LCommand, s: Strategy) -> Option<(LCommand, LRule)> {
    // beta-fun: < \(x,a).c | V . E >
    if let (LTerm::Lam(x, a, body), LCoTerm::Stack(h, t)) = (&c.term, &c.coterm) {
        let head_ok = match s {
            Strategy::T => true,
            _ => is_lvalue(h, s),
        };
        if head_ok && is_lcovalue(t, s) {
            let rho = LSubst {
                terms: vec![(x.clone(), (**h).clone())],
                coterms: vec![(a.clone(), (**t).clone())],
            };
            return Some((lsubst_command(body, &rho), LRule::BetaFun));
        }
    }
    // beta-sum
    if let LCoTerm::Case { left, right } = &c.coterm {
        match &c.term {
            LTerm::Inl(v) if is_lvalue(v, s) || s == Strategy::T => {
                let rho = LSubst::one_term(left.0.clone(), (**v).clone());
                return Some((lsubst_command(&left.1, &rho), LRule::BetaSum));
            }
            LTerm::Inr(v) if is_lvalue(v, s) || s == Strategy::T => {
                let rho = LSubst::one_term(right.0.clone(), (**v).clone());
                return Some((lsubst_command(&right.1, &rho), LRule::BetaSum));
            }
            _ => {}
        }
    }
    // beta-mu
    if let LTerm::Mu(a, body) = &c.term {
        let fires = match s {
            Strategy::Coneed => {
                !matches!(&c.coterm, LCoTerm::CoVar(_))
                    && is_lvalue(&c.term, s)
                    && is_lcovalue(&c.coterm, s)
            }
            _ => is_lcovalue(&c.coterm, s),
        };
        if fires {
            let rho = LSubst::one_coterm(a.clone(), c.coterm.clone());
            return Some((lsubst_command(body, &rho), LRule::BetaMu));
        }
    }
    // beta-mu-tilde
    if let LCoTerm::MuTilde(x, body) = &c.coterm {
        let fires = match s {
            Strategy::Need => {
                !matches!(&c.term, LTerm::Var(_))
                    && is_lcovalue(&c.coterm, s)
                    && is_lvalue(&c.term, s)
            }
            _ => is_lvalue(&c.term, s),
        };
        if fires {
            let rho = LSubst::one_term(x.clone(), c.term.clone());
            return Some((lsubst_command(body, &rho), LRule::BetaMuTilde));
        }
    }
    None
}

/// One standard-reduction step under strategy `s`: top-level rules first,
/// then descent through the strategy's heap frame.
pub fn lmtm_step(c: &LCommand, s: Strategy) -> Option<(LCommand, LRule)> {
    if let Some(r) = top_step(c, s) {
        return Some(r);
    }
    match s {
        Strategy::Need => {
            if let LCoTerm::MuTilde(x, body) = &c.coterm {
                let (next, rule) = lmtm_step(body, s)?;
                return Some((
                    LCommand::new(
                        c.term.clone(),
                        LCoTerm::MuTilde(x.clone(), Box::new(next)),
                    ),
                    rule,
                ));
            }
            None
        }
        Strategy::Coneed => {
            if let LTerm::Mu(a, body) = &c.term {
                let (next, rule) = lmtm_step(body, s)?;
                return Some((
                    LCommand::new(LTerm::Mu(a.clone(), Box::new(next)), c.coterm.clone()),
                    rule,
                ));
            }
            None
        }
        _ => None,
    }
}

/// Does the command lie in the strategy's sub-syntax (stack and injection
/// restrictions of the chosen figure)?
pub fn strategy_check(c: &LCommand, s: Strategy) -> bool {
    fn cmd(c: &LCommand, s: Strategy) -> bool {
        tm(&c.term, s) && co(&c.coterm, s)
    }
    fn tm(v: &LTerm, s: Strategy) -> bool {
        match v {
            LTerm::Var(_) | LTerm::Num(_) => true,
            LTerm::Mu(_, c) => cmd(c, s),
            LTerm::Lam(_, _, c) => cmd(c, s),
            LTerm::Inl(v) | LTerm::Inr(v) => {
                let ok = match s {
                    Strategy::T => true,
                    _ => is_lvalue(v, s),
                };
                ok && tm(v, s)
            }
        }
    }
    fn co(e: &LCoTerm, s: Strategy) -> bool {
        match e {
            LCoTerm::CoVar(_) => true,
            LCoTerm::MuTilde(_, c) => cmd(c, s),
            LCoTerm::Stack(h, t) => {
                let ok = match s {
                    Strategy::Q => is_lvalue(h, s),
                    Strategy::T => is_lcovalue(t, s),
                    _ => is_lvalue(h, s) && is_lcovalue(t, s),
                };
                ok && tm(h, s) && co(t, s)
            }
            LCoTerm::Case { left, right } => cmd(&left.1, s) && cmd(&right.1, s),
        }
    }
    cmd(c, s)
}

#[derive(Clone, Debug)]
pub struct LObservation {
    pub status: Status,
    pub steps: usize,
    pub rules: Vec<LRule>,
    pub needed_vars: BTreeSet<Name>,
    pub needed_covars: BTreeSet<Name>,
    pub eyes_covar: BTreeMap<Name, LTerm>,
    pub final_command: LCommand,
}

fn collect_needed(
    c: &LCommand,
    s: Strategy,
    bound_vars: &mut Vec<Name>,
    bound_covars: &mut Vec<Name>,
    out: &mut LObservation,
) {
    if let LTerm::Var(x) = &c.term {
        if !bound_vars.iter().any(|b| b == x) && is_lcovalue(&c.coterm, s) {
            out.needed_vars.insert(x.clone());
        }
    }
    if let LCoTerm::CoVar(a) = &c.coterm {
        if !bound_covars.iter().any(|b| b == a) && is_lvalue(&c.term, s) {
            out.needed_covars.insert(a.clone());
            out.eyes_covar
                .entry(a.clone())
                .or_insert_with(|| c.term.clone());
        }
    }
    match s {
        Strategy::Need => {
            if let LCoTerm::MuTilde(x, body) = &c.coterm {
                bound_vars.push(x.clone());
                collect_needed(body, s, bound_vars, bound_covars, out);
                bound_vars.pop();
            }
        }
        Strategy::Coneed => {
            if let LTerm::Mu(a, body) = &c.term {
                bound_covars.push(a.clone());
                collect_needed(body, s, bound_vars, bound_covars, out);
                bound_covars.pop();
            }
        }
        _ => {}
    }
}

/// Run the direct stepper to a normal form or out of fuel.
pub fn lmtm_run(c: &LCommand, s: Strategy, fuel: usize) -> LObservation {
    let mut cur = c.clone();
    let mut obs = LObservation {
        status: Status::Timeout,
        steps: 0,
        rules: Vec::new(),
        needed_vars: BTreeSet::new(),
        needed_covars: BTreeSet::new(),
        eyes_covar: BTreeMap::new(),
        final_command: cur.clone(),
    };
    loop {
        match lmtm_step(&cur, s) {
            Some((next, rule)) => {
                if obs.steps >= fuel {
                    obs.status = Status::Timeout;
                    obs.final_command = cur;
                    return obs;
                }
                obs.steps += 1;
                obs.rules.push(rule);
                cur = next;
            }
            None => {
                collect_needed(&cur, s, &mut Vec::new(), &mut Vec::new(), &mut obs);
                obs.status = if obs.needed_vars.is_empty() && obs.needed_covars.is_empty() {
                    Status::Stuck
                } else {
                    Status::Finished
                };
                obs.final_command = cur;
                return obs;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse::parse_lcommand;

    fn identity() -> String {
        "\\(x, a0). < x | a0 >".to_string()
    }

    #[test]
    fn critical_pair_q_vs_t() {
        let c = parse_lcommand("< mu d. < x | a > | mut z. < y | b > >").unwrap();
        let (q, _) = lmtm_step(&c, Strategy::Q).unwrap();
        assert!(lalpha_eq_command(
            &q,
            &parse_lcommand("< x | a >").unwrap()
        ));
        let (t, _) = lmtm_step(&c, Strategy::T).unwrap();
        assert!(lalpha_eq_command(
            &t,
            &parse_lcommand("< y | b >").unwrap()
        ));
    }

    #[test]
    fn all_terms_are_values_under_t() {
        let c = parse_lcommand("< mu d. < x | a > | mut z. < y | b > >").unwrap();
        let (t, rule) = lmtm_step(&c, Strategy::T).unwrap();
        assert_eq!(rule, LRule::BetaMuTilde);
        assert!(lalpha_eq_command(&t, &parse_lcommand("< y | b >").unwrap()));
    }

    #[test]
    fn need_example_reaches_five_in_six_displayed_steps() {
        let i = identity();
        let src = format!("< mu b. < ({i}) | ({i}) . b > | mut f. < ({i}) | f . f . 5 . alpha > >");
        let c = parse_lcommand(&src).unwrap();
        assert!(strategy_check(&c, Strategy::Need));
        let obs = lmtm_run(&c, Strategy::Need, 100);
        assert_eq!(obs.status, Status::Finished);
        assert_eq!(obs.steps, 6);
        assert_eq!(
            obs.rules,
            vec![
                LRule::BetaFun,
                LRule::BetaMu,
                LRule::BetaFun,
                LRule::BetaMuTilde,
                LRule::BetaFun,
                LRule::BetaFun
            ]
        );
        assert_eq!(obs.needed_covars, BTreeSet::from(["alpha".to_string()]));
        assert!(obs.needed_vars.is_empty());
        assert!(matches!(obs.eyes_covar["alpha"], LTerm::Num(5)));
    }

    #[test]
    fn need_covalue_rejects_heap_binding_the_searched_variable() {
        // mut x. < v | mut x. < x | a > > does not force the OUTER x.
        let e = parse_lcommand("< w | mut x. < v | mut x. < x | a > > >")
            .unwrap()
            .coterm;
        assert!(!is_lcovalue(&e, Strategy::Need));
        // while mut x. < x | a > does
        let e2 = parse_lcommand("< w | mut x. < x | a > >").unwrap().coterm;
        assert!(is_lcovalue(&e2, Strategy::Need));
    }

    #[test]
    fn strategy_subsyntax_checks() {
        // Q requires value heads on stacks
        let bad_q = parse_lcommand("< f | (mu a. < x | a >) . b >").unwrap();
        assert!(!strategy_check(&bad_q, Strategy::Q));
        assert!(strategy_check(&bad_q, Strategy::T));
        // T requires covalue tails
        let bad_t = parse_lcommand("< f | x . (mut z. < z | b >) >").unwrap();
        assert!(!strategy_check(&bad_t, Strategy::T));
        assert!(strategy_check(&bad_t, Strategy::Q));
    }
}

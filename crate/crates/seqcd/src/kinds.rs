//! Kind checking, the signature table of connectives, declaration
//! well-formedness, and type-level normalization.
//!
//! The sixteen core connective families (sums, tuples, units, products,
//! pars, the two negations, the two quantifiers, and the four shift
//! families) are themselves entries in the [`SignatureTable`], built by
//! [`SignatureTable::core`]; user declarations extend the same table, so
//! the checker treats core and declared connectives uniformly.

use crate::syntax::*;
use std::collections::HashMap;
use std::fmt;

/// Ordered kind environment for type variables (the checker's Theta).
#[derive(Clone, Debug, Default)]
pub struct KindEnv {
    entries: Vec<(Name, Kind)>,
}

impl KindEnv {
    pub fn new() -> KindEnv {
        KindEnv::default()
    }

    pub fn lookup(&self, x: &str) -> Option<&Kind> {
        self.entries.iter().rev().find(|(n, _)| n == x).map(|(_, k)| k)
    }

    pub fn extended(&self, x: impl Into<Name>, k: Kind) -> KindEnv {
        let mut e = self.clone();
        e.entries.push((x.into(), k));
        e
    }

    pub fn push(&mut self, x: impl Into<Name>, k: Kind) {
        self.entries.push((x.into(), k));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, Kind)> {
        self.entries.iter()
    }
}

#[derive(Clone, Debug)]
pub struct KindError {
    pub msg: String,
}

impl fmt::Display for KindError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kind error: {}", self.msg)
    }
}

impl std::error::Error for KindError {}

fn kerr<T>(msg: impl Into<String>) -> Result<T, KindError> {
    Err(KindError { msg: msg.into() })
}

/// Signature table: every connective in scope, core or declared, with its
/// parameter kinds, result discipline, and xtor signatures.
#[derive(Clone, Debug)]
pub struct SignatureTable {
    decls: Vec<Declaration>,
    by_name: HashMap<Name, usize>,
    xtor_index: HashMap<Name, (usize, usize)>,
    core_count: usize,
}

pub mod names {
    //! Canonical names of the core connectives and their xtors.
    use crate::syntax::Discipline;

    pub const SUM: &str = "Sum";
    pub const PROD: &str = "Prod";
    pub const ZERO: &str = "Zero";
    pub const ONE: &str = "One";
    pub const WITH: &str = "With";
    pub const PAR: &str = "Par";
    pub const TOP: &str = "Top";
    pub const BOT: &str = "Bot";
    /// Positive negation (data over a negative type).
    pub const NOT: &str = "Not";
    /// Negative negation (codata over a positive type).
    pub const NEG: &str = "Neg";

    pub const INL: &str = "Inl";
    pub const INR: &str = "Inr";
    pub const PAIR: &str = "Pair";
    pub const UNIT: &str = "Unit";
    pub const CONT: &str = "ContP";
    pub const FST: &str = "Fst";
    pub const SND: &str = "Snd";
    pub const COPAIR: &str = "CoPair";
    pub const COUNIT: &str = "CoUnit";
    pub const THROW: &str = "ThrowN";

    pub fn exists(s: Discipline) -> String {
        format!("Exists@{}", s.token())
    }
    pub fn forall(s: Discipline) -> String {
        format!("Forall@{}", s.token())
    }
    pub fn to_pos(s: Discipline) -> String {
        format!("ToPos@{}", s.token())
    }
    pub fn to_neg(s: Discipline) -> String {
        format!("ToNeg@{}", s.token())
    }
    pub fn from_pos(s: Discipline) -> String {
        format!("FromPos@{}", s.token())
    }
    pub fn from_neg(s: Discipline) -> String {
        format!("FromNeg@{}", s.token())
    }
    pub fn pack(s: Discipline) -> String {
        format!("Pack@{}", s.token())
    }
    pub fn spec(s: Discipline) -> String {
        format!("Spec@{}", s.token())
    }
    pub fn wrap(s: Discipline) -> String {
        format!("Wrap@{}", s.token())
    }
    pub fn delay(s: Discipline) -> String {
        format!("Delay@{}", s.token())
    }
    pub fn unwrap(s: Discipline) -> String {
        format!("Unwrap@{}", s.token())
    }
    pub fn force(s: Discipline) -> String {
        format!("Force@{}", s.token())
    }
}

use Discipline::{Cbn, Cbv};

fn xtor(
    name: impl Into<Name>,
    quantified: Vec<(Name, Discipline)>,
    term_inputs: Vec<(TypeExpr, Discipline)>,
    co_inputs: Vec<(TypeExpr, Discipline)>,
) -> XtorSig {
    XtorSig {
        name: name.into(),
        quantified,
        term_inputs,
        co_inputs,
    }
}

impl SignatureTable {
    /// The table holding exactly the core System D connectives.
    pub fn core() -> SignatureTable {
        let mut t = SignatureTable {
            decls: Vec::new(),
            by_name: HashMap::new(),
            xtor_index: HashMap::new(),
            core_count: 0,
        };
        let x = || TypeExpr::var("X");
        let y = || TypeExpr::var("Y");

        t.insert_unchecked(Declaration {
            polarity: Polarity::Data,
            name: names::SUM.into(),
            params: vec![("X".into(), Kind::Disc(Cbv)), ("Y".into(), Kind::Disc(Cbv))],
            result: Cbv,
            xtors: vec![
                xtor(names::INL, vec![], vec![(x(), Cbv)], vec![]),
                xtor(names::INR, vec![], vec![(y(), Cbv)], vec![]),
            ],
        });
        t.insert_unchecked(Declaration {
            polarity: Polarity::Data,
            name: names::PROD.into(),
            params: vec![("X".into(), Kind::Disc(Cbv)), ("Y".into(), Kind::Disc(Cbv))],
            result: Cbv,
            xtors: vec![xtor(
                names::PAIR,
                vec![],
                vec![(x(), Cbv), (y(), Cbv)],
                vec![],
            )],
        });
        t.insert_unchecked(Declaration {
            polarity: Polarity::Data,
            name: names::ZERO.into(),
            params: vec![],
            result: Cbv,
            xtors: vec![],
        });
        t.insert_unchecked(Declaration {
            polarity: Polarity::Data,
            name: names::ONE.into(),
            params: vec![],
            result: Cbv,
            xtors: vec![xtor(names::UNIT, vec![], vec![], vec![])],
        });
        t.insert_unchecked(Declaration {
            polarity: Polarity::Codata,
            name: names::WITH.into(),
            params: vec![("X".into(), Kind::Disc(Cbn)), ("Y".into(), Kind::Disc(Cbn))],
            result: Cbn,
            xtors: vec![
                xtor(names::FST, vec![], vec![], vec![(x(), Cbn)]),
                xtor(names::SND, vec![], vec![], vec![(y(), Cbn)]),
            ],
        });
        t.insert_unchecked(Declaration {
            polarity: Polarity::Codata,
            name: names::PAR.into(),
            params: vec![("X".into(), Kind::Disc(Cbn)), ("Y".into(), Kind::Disc(Cbn))],
            result: Cbn,
            xtors: vec![xtor(
                names::COPAIR,
                vec![],
                vec![],
                vec![(x(), Cbn), (y(), Cbn)],
            )],
        });
        t.insert_unchecked(Declaration {
            polarity: Polarity::Codata,
            name: names::TOP.into(),
            params: vec![],
            result: Cbn,
            xtors: vec![],
        });
        t.insert_unchecked(Declaration {
            polarity: Polarity::Codata,
            name: names::BOT.into(),
            params: vec![],
            result: Cbn,
            xtors: vec![xtor(names::COUNIT, vec![], vec![], vec![])],
        });
        t.insert_unchecked(Declaration {
            polarity: Polarity::Data,
            name: names::NOT.into(),
            params: vec![("X".into(), Kind::Disc(Cbn))],
            result: Cbv,
            xtors: vec![xtor(names::CONT, vec![], vec![], vec![(x(), Cbn)])],
        });
        t.insert_unchecked(Declaration {
            polarity: Polarity::Codata,
            name: names::NEG.into(),
            params: vec![("X".into(), Kind::Disc(Cbv))],
            result: Cbn,
            xtors: vec![xtor(names::THROW, vec![], vec![(x(), Cbv)], vec![])],
        });
        for s in Discipline::ALL {
            t.insert_unchecked(Declaration {
                polarity: Polarity::Data,
                name: names::exists(s),
                params: vec![("X".into(), Kind::arrow(Kind::Disc(s), Kind::Disc(Cbv)))],
                result: Cbv,
                xtors: vec![xtor(
                    names::pack(s),
                    vec![("Y".into(), s)],
                    vec![(TypeExpr::app(x(), y()), Cbv)],
                    vec![],
                )],
            });
            t.insert_unchecked(Declaration {
                polarity: Polarity::Codata,
                name: names::forall(s),
                params: vec![("X".into(), Kind::arrow(Kind::Disc(s), Kind::Disc(Cbn)))],
                result: Cbn,
                xtors: vec![xtor(
                    names::spec(s),
                    vec![("Y".into(), s)],
                    vec![],
                    vec![(TypeExpr::app(x(), y()), Cbn)],
                )],
            });
            t.insert_unchecked(Declaration {
                polarity: Polarity::Data,
                name: names::to_pos(s),
                params: vec![("X".into(), Kind::Disc(s))],
                result: Cbv,
                xtors: vec![xtor(names::wrap(s), vec![], vec![(x(), s)], vec![])],
            });
            t.insert_unchecked(Declaration {
                polarity: Polarity::Codata,
                name: names::to_neg(s),
                params: vec![("X".into(), Kind::Disc(s))],
                result: Cbn,
                xtors: vec![xtor(names::unwrap(s), vec![], vec![], vec![(x(), s)])],
            });
            t.insert_unchecked(Declaration {
                polarity: Polarity::Data,
                name: names::from_pos(s),
                params: vec![("X".into(), Kind::Disc(Cbv))],
                result: s,
                xtors: vec![xtor(names::delay(s), vec![], vec![(x(), Cbv)], vec![])],
            });
            t.insert_unchecked(Declaration {
                polarity: Polarity::Codata,
                name: names::from_neg(s),
                params: vec![("X".into(), Kind::Disc(Cbn))],
                result: s,
                xtors: vec![xtor(names::force(s), vec![], vec![], vec![(x(), Cbn)])],
            });
        }
        t.core_count = t.decls.len();
        t
    }

    fn insert_unchecked(&mut self, d: Declaration) {
        let idx = self.decls.len();
        self.by_name.insert(d.name.clone(), idx);
        for (j, x) in d.xtors.iter().enumerate() {
            self.xtor_index.insert(x.name.clone(), (idx, j));
        }
        self.decls.push(d);
    }

    pub fn decl(&self, name: &str) -> Option<&Declaration> {
        self.by_name.get(name).map(|i| &self.decls[*i])
    }

    pub fn is_core(&self, name: &str) -> bool {
        self.by_name.get(name).is_some_and(|i| *i < self.core_count)
    }

    /// All declared (non-core) declarations, in declaration order.
    pub fn user_decls(&self) -> &[Declaration] {
        &self.decls[self.core_count..]
    }

    pub fn all_decls(&self) -> &[Declaration] {
        &self.decls
    }

    /// Find the declaration owning an xtor plus its index among siblings.
    pub fn xtor(&self, name: &str) -> Option<(&Declaration, usize)> {
        self.xtor_index
            .get(name)
            .map(|(d, j)| (&self.decls[*d], *j))
    }

    pub fn connective_kind(&self, name: &str) -> Option<Kind> {
        let d = self.decl(name)?;
        let mut k = Kind::Disc(d.result);
        for (_, pk) in d.params.iter().rev() {
            k = Kind::arrow(pk.clone(), k);
        }
        Some(k)
    }
}

/// The kind of a type expression under an environment and signature.
pub fn kind_of(theta: &KindEnv, sig: &SignatureTable, ty: &TypeExpr) -> Result<Kind, KindError> {
    match ty {
        TypeExpr::Var(x) => theta
            .lookup(x)
            .cloned()
            .ok_or_else(|| KindError {
                msg: format!("unbound type variable {x}"),
            }),
        TypeExpr::Con(c) => sig.connective_kind(c).ok_or_else(|| KindError {
            msg: format!("unknown connective {c}"),
        }),
        TypeExpr::Lam(x, k, body) => {
            let bk = kind_of(&theta.extended(x.clone(), k.clone()), sig, body)?;
            Ok(Kind::arrow(k.clone(), bk))
        }
        TypeExpr::App(f, a) => {
            let fk = kind_of(theta, sig, f)?;
            let ak = kind_of(theta, sig, a)?;
            match fk {
                Kind::Arrow(dom, cod) if *dom == ak => Ok(*cod),
                Kind::Arrow(dom, _) => kerr(format!(
                    "kind mismatch at application: expected argument of kind {dom}, got {ak}"
                )),
                Kind::Disc(_) => kerr("application of a base-kinded type".to_string()),
            }
        }
    }
}

/// Beta-normalize then eta-contract.  Terminates because the type level is
/// simply kinded.
pub fn normalize_type(ty: &TypeExpr) -> TypeExpr {
    fn beta(ty: &TypeExpr) -> TypeExpr {
        match ty {
            TypeExpr::Var(_) | TypeExpr::Con(_) => ty.clone(),
            TypeExpr::Lam(x, k, b) => TypeExpr::lam(x.clone(), k.clone(), beta(b)),
            TypeExpr::App(f, a) => {
                let f = beta(f);
                let a = beta(a);
                if let TypeExpr::Lam(x, _, body) = f {
                    beta(&body.subst_tyvars(&[(x, a)]))
                } else {
                    TypeExpr::app(f, a)
                }
            }
        }
    }
    fn eta(ty: &TypeExpr) -> TypeExpr {
        match ty {
            TypeExpr::Var(_) | TypeExpr::Con(_) => ty.clone(),
            TypeExpr::Lam(x, k, b) => {
                let b = eta(b);
                if let TypeExpr::App(f, a) = &b {
                    if matches!(&**a, TypeExpr::Var(y) if y == x)
                        && !f.free_tyvars().contains(x)
                    {
                        return (**f).clone();
                    }
                }
                TypeExpr::lam(x.clone(), k.clone(), b)
            }
            TypeExpr::App(f, a) => TypeExpr::app(eta(f), eta(a)),
        }
    }
    eta(&beta(ty))
}

/// Semantic type equality: alpha-equality of normal forms.
pub fn types_equal(a: &TypeExpr, b: &TypeExpr) -> bool {
    normalize_type(a).alpha_eq(&normalize_type(b))
}

/// Check a declaration and extend the table.
pub fn check_decl(sig: &SignatureTable, d: &Declaration) -> Result<SignatureTable, KindError> {
    if sig.decl(&d.name).is_some() {
        return kerr(format!("duplicate connective name {}", d.name));
    }
    let mut seen = std::collections::BTreeSet::new();
    for x in &d.xtors {
        if !seen.insert(x.name.clone()) {
            return kerr(format!("duplicate xtor name {} in {}", x.name, d.name));
        }
        if sig.xtor(&x.name).is_some() {
            return kerr(format!("xtor name {} already declared", x.name));
        }
    }
    let mut theta = KindEnv::new();
    for (p, k) in &d.params {
        theta.push(p.clone(), k.clone());
    }
    for x in &d.xtors {
        let mut inner = theta.clone();
        for (y, s) in &x.quantified {
            inner.push(y.clone(), Kind::Disc(*s));
        }
        for (side, comps) in [("input", &x.term_inputs), ("co-input", &x.co_inputs)] {
            for (ty, disc) in comps.iter() {
                if ty.connectives().contains(&d.name) {
                    return kerr(format!(
                        "recursive declaration: {} occurs in {} of xtor {}",
                        d.name, side, x.name
                    ));
                }
                let k = kind_of(&inner, sig, ty)?;
                if k != Kind::Disc(*disc) {
                    return kerr(format!(
                        "{side} {ty:?} of xtor {} has kind {k}, declared discipline {disc}",
                        x.name
                    ));
                }
            }
        }
    }
    let mut out = sig.clone();
    out.insert_unchecked(d.clone());
    Ok(out)
}

/// A sequent is well-formed when every hypothesis type has a base kind.
pub fn check_sequent(
    theta: &KindEnv,
    sig: &SignatureTable,
    gamma: &[(Name, TypeExpr)],
    delta: &[(Name, TypeExpr)],
) -> Result<(), KindError> {
    for (side, entries) in [("hypothesis", gamma), ("conclusion", delta)] {
        for (n, ty) in entries.iter() {
            let k = kind_of(theta, sig, ty)?;
            if k.as_base().is_none() {
                return kerr(format!("{side} {n} has non-base kind {k}"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Discipline::*;

    #[test]
    fn core_kinds_match_the_table() {
        let sig = SignatureTable::core();
        let vvv = Kind::arrow(Kind::Disc(Cbv), Kind::arrow(Kind::Disc(Cbv), Kind::Disc(Cbv)));
        assert_eq!(sig.connective_kind(names::PROD), Some(vvv.clone()));
        assert_eq!(sig.connective_kind(names::SUM), Some(vvv));
        // Forall@need : (need -> n) -> n
        assert_eq!(
            sig.connective_kind(&names::forall(Need)),
            Some(Kind::arrow(
                Kind::arrow(Kind::Disc(Need), Kind::Disc(Cbn)),
                Kind::Disc(Cbn)
            ))
        );
        assert_eq!(
            sig.connective_kind(&names::from_pos(Coneed)),
            Some(Kind::arrow(Kind::Disc(Cbv), Kind::Disc(Coneed)))
        );
    }

    #[test]
    fn sum_of_negative_argument_is_ill_kinded() {
        let sig = SignatureTable::core();
        let theta = KindEnv::new().extended("X", Kind::Disc(Cbn));
        let ty = TypeExpr::app(TypeExpr::con(names::SUM), TypeExpr::var("X"));
        assert!(kind_of(&theta, &sig, &ty).is_err());
    }

    #[test]
    fn beta_then_eta_normalization() {
        let sig = SignatureTable::core();
        // (\X:v. Sum X X) One --> Sum One One
        let ty = TypeExpr::app(
            TypeExpr::lam(
                "X",
                Kind::Disc(Cbv),
                TypeExpr::apply(
                    TypeExpr::con(names::SUM),
                    [TypeExpr::var("X"), TypeExpr::var("X")],
                ),
            ),
            TypeExpr::con(names::ONE),
        );
        let n = normalize_type(&ty);
        let expect = TypeExpr::apply(
            TypeExpr::con(names::SUM),
            [TypeExpr::con(names::ONE), TypeExpr::con(names::ONE)],
        );
        assert!(n.alpha_eq(&expect));
        assert_eq!(
            kind_of(&KindEnv::new(), &sig, &n).unwrap(),
            Kind::Disc(Cbv)
        );
        // \X:v. (Sum A) X --eta--> Sum A
        let partial = TypeExpr::app(TypeExpr::con(names::SUM), TypeExpr::con(names::ONE));
        let etaable = TypeExpr::lam(
            "X",
            Kind::Disc(Cbv),
            TypeExpr::app(partial.clone(), TypeExpr::var("X")),
        );
        assert!(normalize_type(&etaable).alpha_eq(&partial));
    }

    #[test]
    fn self_referencing_declaration_is_rejected() {
        let sig = SignatureTable::core();
        let bad = Declaration {
            polarity: Polarity::Data,
            name: "Bad".into(),
            params: vec![("X".into(), Kind::Disc(Cbv))],
            result: Cbv,
            xtors: vec![XtorSig {
                name: "Mk".into(),
                quantified: vec![],
                term_inputs: vec![(
                    TypeExpr::app(TypeExpr::con("Bad"), TypeExpr::var("X")),
                    Cbv,
                )],
                co_inputs: vec![],
            }],
        };
        let e = check_decl(&sig, &bad);
        assert!(e.is_err());
        assert!(e.unwrap_err().msg.contains("recursive"));
    }

    #[test]
    fn function_declaration_checks_with_arrow_kind() {
        let sig = SignatureTable::core();
        let fun = Declaration {
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
        };
        let sig2 = check_decl(&sig, &fun).unwrap();
        assert_eq!(
            sig2.connective_kind("Fun"),
            Some(Kind::arrow(
                Kind::Disc(Cbv),
                Kind::arrow(Kind::Disc(Cbn), Kind::Disc(Cbn))
            ))
        );
    }

    #[test]
    fn sequent_hypotheses_must_be_base_kinded() {
        let sig = SignatureTable::core();
        let theta = KindEnv::new();
        assert!(check_sequent(
            &theta,
            &sig,
            &[("x".into(), TypeExpr::con(names::ONE))],
            &[("a".into(), TypeExpr::con(names::BOT))]
        )
        .is_ok());
        assert!(check_sequent(
            &theta,
            &sig,
            &[("x".into(), TypeExpr::con(names::SUM))],
            &[]
        )
        .is_err());
    }
}

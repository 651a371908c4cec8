//! Property suites: compilation invariants on generated commands, printer
//! round trips, normalization idempotence, and the call-by-(co)need
//! normal-form lemmas.

use proptest::prelude::*;
use seqcd::compile::{encode_command, encode_coterm, encode_term, lift_command};
use seqcd::kinds::{kind_of, normalize_type, KindEnv, SignatureTable};
use seqcd::machine::{is_covalue, is_value, needed, step};
use seqcd::surface::{parse_command_with, print_command};
use seqcd::syntax::*;
use seqcd::testgen::Gen;

fn sig() -> SignatureTable {
    SignatureTable::core()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// print then parse is the identity up to alpha-equality.
    #[test]
    fn printer_parser_round_trip(seed in 0u64..10_000) {
        let sig = sig();
        let mut g = Gen::new(seed);
        let c = g.command(&sig, 4);
        let text = print_command(&c);
        let back = parse_command_with(&text, &[]).unwrap();
        prop_assert!(alpha_eq_command(&c, &back), "{text}");
    }

    /// Substitution computed with different freshening seeds yields
    /// alpha-equal results.
    #[test]
    fn substitution_is_seed_invariant(seed in 0u64..10_000) {
        let sig = sig();
        let mut g = Gen::new(seed);
        let c = g.command(&sig, 4);
        let rho = g.substitution(&sig, &c, 2);
        let a = subst_command_seeded(&c, &rho, 0);
        let b = subst_command_seeded(&c, &rho, 2);
        prop_assert!(alpha_eq_command(&a, &b));
    }

    /// free(c[v/x]) is contained in (free(c) - x) + free(v).
    #[test]
    fn free_after_substitution_shrinks(seed in 0u64..10_000) {
        let sig = sig();
        let mut g = Gen::new(seed);
        let c = g.command(&sig, 4);
        let rho = g.substitution(&sig, &c, 2);
        let before = free_command(&c);
        let after = free_command(&subst_command(&c, &rho));
        let mut allowed = before.vars.clone();
        for (x, _) in &rho.terms {
            allowed.remove(x);
        }
        for (_, v) in &rho.terms {
            allowed.extend(free_term(v).vars);
        }
        for (_, e) in &rho.coterms {
            allowed.extend(free_coterm(e).vars);
        }
        prop_assert!(after.vars.is_subset(&allowed));
    }

    /// The encoding commutes with substitution up to alpha-equality,
    /// on focused commands and well-disciplined substitutions.
    #[test]
    fn encoding_commutes_with_substitution(seed in 0u64..10_000) {
        let sig = sig();
        let mut g = Gen::new(seed);
        let c0 = g.command(&sig, 3);
        let c = lift_command(&sig, &c0).unwrap();
        let rho = g.substitution(&sig, &c, 2);
        let lhs = encode_command(&sig, &subst_command(&c, &rho)).unwrap();
        let enc_rho = Subst {
            types: rho.types.clone(),
            terms: rho
                .terms
                .iter()
                .map(|(n, v)| (n.clone(), encode_term(&sig, v, None).unwrap()))
                .collect(),
            coterms: rho
                .coterms
                .iter()
                .map(|(n, e)| (n.clone(), encode_coterm(&sig, e, None).unwrap()))
                .collect(),
        };
        let rhs = subst_command(&encode_command(&sig, &c).unwrap(), &enc_rho);
        prop_assert!(
            alpha_eq_command_cfg(&lhs, &rhs, AlphaCfg { erase_types: true }),
            "lhs {}\nrhs {}",
            print_command(&lhs),
            print_command(&rhs)
        );
    }

    /// Values stay values under encoding, covalues stay covalues.
    #[test]
    fn encoding_preserves_values_and_covalues(seed in 0u64..10_000) {
        let sig = sig();
        let mut g = Gen::new(seed);
        let s = g.disc();
        let v = g.value(&sig, s, 3);
        let enc_v = encode_term(&sig, &v, None).unwrap();
        prop_assert!(is_value(&sig, &enc_v, s), "{}", print_command(&Command::new(enc_v, None, s, CoTerm::covar("k"))));
        let e = g.covalue(&sig, s, 3);
        let enc_e = encode_coterm(&sig, &e, None).unwrap();
        prop_assert!(is_covalue(&sig, &enc_e, s));
    }

    /// Needed names are preserved by the encoding on normal commands.
    #[test]
    fn encoding_preserves_needed_sets(seed in 0u64..10_000) {
        let sig = sig();
        let mut g = Gen::new(seed);
        let c0 = g.command(&sig, 3);
        let c = lift_command(&sig, &c0).unwrap();
        // run to a normal form first
        let mut cur = c;
        for _ in 0..200 {
            match step(&sig, &cur) {
                Some(r) => cur = r.next,
                None => break,
            }
        }
        if step(&sig, &cur).is_some() {
            return Ok(()); // still reducible; skip
        }
        let n_src = needed(&sig, &cur);
        let enc = encode_command(&sig, &cur).unwrap();
        let mut ec = enc;
        for _ in 0..400 {
            match step(&sig, &ec) {
                Some(r) => ec = r.next,
                None => break,
            }
        }
        let n_enc = needed(&sig, &ec);
        prop_assert_eq!(n_src.vars, n_enc.vars);
        prop_assert_eq!(n_src.covars, n_enc.covars);
    }

    /// A need mu-tilde recognized as a covalue has a normal body that
    /// demands the bound variable (the (co)need normal-form lemmas).
    #[test]
    fn need_covalues_are_normal_and_demand_their_binder(seed in 0u64..10_000) {
        let sig = sig();
        let mut g = Gen::new(seed);
        let e = g.covalue(&sig, Discipline::Need, 3);
        if let CoTerm::MuTilde(x, body) = &e {
            if is_covalue(&sig, &e, Discipline::Need) {
                prop_assert!(step(&sig, body).is_none(), "covalue body must be normal");
                let n = needed(&sig, body);
                prop_assert!(n.vars.contains(x.as_str()), "bound variable must be needed");
            }
        }
    }

    /// Type normalization is idempotent on randomly generated well-kinded
    /// types.
    #[test]
    fn normalize_is_idempotent(seed in 0u64..10_000) {
        let sig = sig();
        let ty = random_type(seed, 4);
        // generated types are well-kinded by construction
        prop_assert!(kind_of(&KindEnv::new(), &sig, &ty).is_ok());
        let n1 = normalize_type(&ty);
        let n2 = normalize_type(&n1);
        prop_assert!(n1.alpha_eq(&n2));
    }
}

/// A closed well-kinded type of base kind, built from core connectives
/// and type-level beta-redexes.
fn random_type(seed: u64, depth: usize) -> TypeExpr {
    use seqcd::kinds::names;
    fn go(state: &mut u64, depth: usize, pos: bool) -> TypeExpr {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let r = (*state >> 33) % 8;
        if depth == 0 {
            return if pos {
                TypeExpr::con(names::ONE)
            } else {
                TypeExpr::con(names::BOT)
            };
        }
        match (r, pos) {
            (0, true) => TypeExpr::con(names::ONE),
            (0, false) => TypeExpr::con(names::BOT),
            (1, true) => TypeExpr::apply(
                TypeExpr::con(names::SUM),
                [go(state, depth - 1, true), go(state, depth - 1, true)],
            ),
            (1, false) => TypeExpr::apply(
                TypeExpr::con(names::WITH),
                [go(state, depth - 1, false), go(state, depth - 1, false)],
            ),
            (2, true) => TypeExpr::apply(
                TypeExpr::con(names::PROD),
                [go(state, depth - 1, true), go(state, depth - 1, true)],
            ),
            (2, false) => TypeExpr::apply(
                TypeExpr::con(names::PAR),
                [go(state, depth - 1, false), go(state, depth - 1, false)],
            ),
            (3, true) => TypeExpr::app(TypeExpr::con(names::NOT), go(state, depth - 1, false)),
            (3, false) => TypeExpr::app(TypeExpr::con(names::NEG), go(state, depth - 1, true)),
            // a type-level beta redex: (\X:v. X (+) X) A
            (4, true) => TypeExpr::app(
                TypeExpr::lam(
                    "X",
                    Kind::Disc(Discipline::Cbv),
                    TypeExpr::apply(
                        TypeExpr::con(names::SUM),
                        [TypeExpr::var("X"), TypeExpr::var("X")],
                    ),
                ),
                go(state, depth - 1, true),
            ),
            (4, false) => TypeExpr::app(
                TypeExpr::lam(
                    "X",
                    Kind::Disc(Discipline::Cbn),
                    TypeExpr::apply(
                        TypeExpr::con(names::PAR),
                        [TypeExpr::var("X"), TypeExpr::var("X")],
                    ),
                ),
                go(state, depth - 1, false),
            ),
            (5, true) => TypeExpr::app(
                TypeExpr::con(names::to_pos(Discipline::Cbn)),
                go(state, depth - 1, false),
            ),
            (5, false) => TypeExpr::app(
                TypeExpr::con(names::to_neg(Discipline::Cbv)),
                go(state, depth - 1, true),
            ),
            (6, true) => TypeExpr::app(
                TypeExpr::con(names::exists(Discipline::Cbv)),
                TypeExpr::lam("Y", Kind::Disc(Discipline::Cbv), go(state, depth - 1, true)),
            ),
            (6, false) => TypeExpr::app(
                TypeExpr::con(names::forall(Discipline::Cbv)),
                TypeExpr::lam("Y", Kind::Disc(Discipline::Cbv), go(state, depth - 1, false)),
            ),
            (_, true) => TypeExpr::con(names::ZERO),
            (_, false) => TypeExpr::con(names::TOP),
        }
    }
    let mut state = seed.wrapping_add(0x9E3779B97F4A7C15);
    go(&mut state, depth, true)
}

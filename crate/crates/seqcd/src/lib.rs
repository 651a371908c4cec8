//! A compiler toolkit and interpreter for a multi-discipline classical
//! sequent calculus.
//!
//! Programs are *commands* `< v | A : s | e >` cutting a producer against a
//! consumer at a type and an evaluation discipline (call-by-value, -name,
//! -need, or -co-need).  User-defined data and codata types are checked,
//! executed directly, and compiled down to a fixed core calculus of dual
//! connectives by focusing and connective encoding.  Type isomorphisms
//! between declared types and their encodings are verified observationally.
//!
//! Module map:
//!
//! * [`syntax`] — abstract syntax, binding, substitution, alpha-equality
//! * [`surface`] — concrete syntax: lexer, parser, printer, programs
//! * [`kinds`] — kind checking, signatures, type normalization
//! * [`typing`] — the type system (typed and discipline-only modes)
//! * [`machine`] — (co)value recognizers, the standard-reduction machine
//! * [`compile`] — focusing lift and the core-connective encoding
//! * [`frontend`] — the lambda-mu-mu-tilde source calculi and polarization
//! * [`iso`] — parametric type isomorphisms and observational checking
//! * [`testgen`] — generators for well-disciplined commands (testing)

pub mod syntax;
pub mod kinds;
pub mod surface;
pub mod typing;
pub mod machine;
pub mod compile;
pub mod frontend;
pub mod iso;
pub mod testgen;

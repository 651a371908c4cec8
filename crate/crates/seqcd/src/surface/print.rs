//! Canonical pretty-printer.  The output re-parses to an alpha-equal tree;
//! infix and quantifier sugar is accepted on input but printed applicatively.

use super::{CommandEntry, DefinitionBody, Program};
use crate::syntax::*;
use std::fmt::Write;

pub fn print_kind(k: &Kind) -> String {
    k.to_string()
}

pub fn print_type(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Var(x) => x.clone(),
        TypeExpr::Con(c) => c.clone(),
        TypeExpr::Lam(x, k, body) => format!("\\{x}:{k}. {}", print_type(body)),
        TypeExpr::App(..) => {
            let (head, args) = t.spine();
            let mut s = print_type_atom(head);
            for a in args {
                s.push(' ');
                s.push_str(&print_type_atom(a));
            }
            s
        }
    }
}

fn print_type_atom(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Var(_) | TypeExpr::Con(_) => print_type(t),
        _ => format!("({})", print_type(t)),
    }
}

pub fn print_command(c: &Command) -> String {
    let ann = match &c.annotation {
        Some(t) => print_type(t),
        None => "_".into(),
    };
    format!(
        "< {} | {} : {} | {} >",
        print_term(&c.term),
        ann,
        c.discipline,
        print_coterm(&c.coterm)
    )
}

pub fn print_term(t: &Term) -> String {
    match t {
        Term::Var(x) => x.clone(),
        Term::Mu(a, c) => format!("mu {a}. {}", print_command(c)),
        Term::Construct {
            ctor,
            ty_args,
            co_args,
            args,
        } => {
            let mut s = ctor.clone();
            if !ty_args.is_empty() {
                write!(s, "{{{}}}", join(ty_args.iter().map(print_type))).unwrap();
            }
            if !co_args.is_empty() {
                write!(s, "[{}]", join(co_args.iter().map(print_coterm))).unwrap();
            }
            if !args.is_empty() {
                write!(s, "({})", join(args.iter().map(print_term))).unwrap();
            }
            s
        }
        Term::CoCase(branches) => {
            if branches.is_empty() {
                return "cocase { }".into();
            }
            let bs = branches
                .iter()
                .map(|(q, c)| format!("{} => {}", print_copattern(q), print_command(c)))
                .collect::<Vec<_>>()
                .join(" | ");
            format!("cocase {{ {bs} }}")
        }
    }
}

pub fn print_coterm(e: &CoTerm) -> String {
    match e {
        CoTerm::CoVar(a) => a.clone(),
        CoTerm::MuTilde(x, c) => format!("mut {x}. {}", print_command(c)),
        CoTerm::Destruct {
            dtor,
            ty_args,
            args,
            co_args,
        } => {
            let mut s = dtor.clone();
            if !ty_args.is_empty() {
                write!(s, "{{{}}}", join(ty_args.iter().map(print_type))).unwrap();
            }
            if !args.is_empty() {
                write!(s, "({})", join(args.iter().map(print_term))).unwrap();
            }
            if !co_args.is_empty() {
                write!(s, "[{}]", join(co_args.iter().map(print_coterm))).unwrap();
            }
            s
        }
        CoTerm::Case(branches) => {
            if branches.is_empty() {
                return "case { }".into();
            }
            let bs = branches
                .iter()
                .map(|(p, c)| format!("{} => {}", print_pattern(p), print_command(c)))
                .collect::<Vec<_>>()
                .join(" | ");
            format!("case {{ {bs} }}")
        }
    }
}

pub fn print_pattern(p: &Pattern) -> String {
    let mut s = p.ctor.clone();
    if !p.ty_vars.is_empty() {
        write!(s, "{{{}}}", p.ty_vars.join(", ")).unwrap();
    }
    if !p.co_vars.is_empty() {
        write!(s, "[{}]", p.co_vars.join(", ")).unwrap();
    }
    if !p.vars.is_empty() {
        write!(s, "({})", p.vars.join(", ")).unwrap();
    }
    s
}

pub fn print_copattern(q: &CoPattern) -> String {
    let mut s = q.dtor.clone();
    if !q.ty_vars.is_empty() {
        write!(s, "{{{}}}", q.ty_vars.join(", ")).unwrap();
    }
    if !q.vars.is_empty() {
        write!(s, "({})", q.vars.join(", ")).unwrap();
    }
    if !q.co_vars.is_empty() {
        write!(s, "[{}]", q.co_vars.join(", ")).unwrap();
    }
    s
}

pub fn print_declaration(d: &Declaration) -> String {
    let mut s = String::new();
    let kw = match d.polarity {
        Polarity::Data => "data",
        Polarity::Codata => "codata",
    };
    write!(s, "{kw} {}", d.name).unwrap();
    for (p, k) in &d.params {
        write!(s, " ({p} : {k})").unwrap();
    }
    writeln!(s, " : {} where", d.result).unwrap();
    for x in &d.xtors {
        write!(s, "  {} :", x.name).unwrap();
        for (y, q) in &x.quantified {
            write!(s, " [{y} : {q}]").unwrap();
        }
        write!(
            s,
            " ({})",
            join(x.term_inputs.iter().map(|(t, _)| print_type(t)))
        )
        .unwrap();
        let sep = match d.polarity {
            Polarity::Data => "|-",
            Polarity::Codata => "-|",
        };
        writeln!(
            s,
            " {sep} ({}) ;",
            join(x.co_inputs.iter().map(|(t, _)| print_type(t)))
        )
        .unwrap();
    }
    s
}

pub fn print_program(p: &Program) -> String {
    let mut s = String::new();
    for d in &p.declarations {
        s.push_str(&print_declaration(d));
        s.push('\n');
    }
    for def in &p.definitions {
        let ty = def
            .ty
            .as_ref()
            .map(print_type)
            .unwrap_or_else(|| "_".into());
        match &def.body {
            DefinitionBody::Producer(t) => {
                writeln!(
                    s,
                    "def {} : {} : {} = {} ;",
                    def.name,
                    ty,
                    def.discipline,
                    print_term(t)
                )
                .unwrap();
            }
            DefinitionBody::Consumer(e) => {
                writeln!(
                    s,
                    "codef {} : {} : {} = {} ;",
                    def.name,
                    ty,
                    def.discipline,
                    print_coterm(e)
                )
                .unwrap();
            }
        }
    }
    for entry in &p.commands {
        s.push_str(&print_entry(entry));
    }
    s
}

pub fn print_entry(entry: &CommandEntry) -> String {
    let mut s = String::new();
    let bind = |b: &(Name, Option<TypeExpr>, Discipline)| {
        format!(
            "{} : {} : {}",
            b.0,
            b.1.as_ref().map(print_type).unwrap_or_else(|| "_".into()),
            b.2
        )
    };
    if entry.gamma.is_empty() && entry.delta.is_empty() {
        writeln!(s, "cmd {} = {} ;", entry.name, print_command(&entry.body)).unwrap();
    } else {
        writeln!(
            s,
            "cmd {} ({} |- {}) = {} ;",
            entry.name,
            join(entry.gamma.iter().map(bind)),
            join(entry.delta.iter().map(bind)),
            print_command(&entry.body)
        )
        .unwrap();
    }
    s
}

fn join(it: impl Iterator<Item = String>) -> String {
    it.collect::<Vec<_>>().join(", ")
}

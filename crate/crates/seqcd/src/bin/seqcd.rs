//! Command-line driver: check, run, compile, differential testing, the
//! isomorphism suite, and lambda-mu-mu-tilde polarization.
//!
//! Exit codes: 0 success, 1 static error, 2 runtime stuck, 3 timeout,
//! 4 differential mismatch.

use clap::{Parser, Subcommand};
use seqcd::compile::{encode_command, encode_type, is_core_command, is_focused_command, lift_command};
use seqcd::frontend::{
    lmtm_run, parse_lmtm_program, polarize_program, strategy_check, Scheme, Strategy,
};
use seqcd::iso::{catalog, check_iso_observational, default_instantiations, law};
use seqcd::kinds::SignatureTable;
use seqcd::machine::{run_traced, Observation, Status};
use seqcd::surface::{
    parse_program, print_command, print_coterm, print_program, print_term, CommandEntry, Program,
};
use seqcd::syntax::{Command, Discipline};
use seqcd::typing::{check_entry, Mode};
use serde_json::json;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "seqcd", about = "multi-discipline sequent calculus toolkit", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and type-check a .cd program.
    Check {
        file: String,
        /// Track only disciplines (admits recursion).
        #[arg(long)]
        discipline_only: bool,
        #[arg(long)]
        json: bool,
    },
    /// Execute an entry command of a .cd program.
    Run {
        file: String,
        #[arg(long, default_value = "main")]
        entry: String,
        #[arg(long, default_value_t = 10000)]
        fuel: usize,
        /// Emit one JSON object per step.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
        /// Human-readable trace instead of JSON lines.
        #[arg(long)]
        pretty: bool,
    },
    /// Compile a program to the focused or fully encoded core form.
    Compile {
        file: String,
        #[arg(short, long)]
        output: Option<String>,
        /// lift: focused sub-syntax; core: core connectives only.
        #[arg(long, default_value = "core")]
        stage: String,
    },
    /// Run source and compiled forms and compare observations.
    Diffrun {
        file: String,
        #[arg(long, default_value_t = 10000)]
        fuel: usize,
        #[arg(long)]
        json: bool,
    },
    /// Verify the type-isomorphism law catalog observationally.
    Isotest {
        #[arg(long, default_value = "all")]
        laws: String,
        #[arg(long, default_value_t = 2000)]
        fuel: usize,
        #[arg(long)]
        json: bool,
    },
    /// Polarize a .lmtm source program into a .cd program.
    Polarize {
        file: String,
        #[arg(long)]
        strategy: String,
        #[arg(long, default_value = "generic")]
        scheme: String,
        /// Also run both pipelines and compare observables.
        #[arg(long)]
        run: bool,
        #[arg(short, long)]
        output: Option<String>,
        #[arg(long, default_value_t = 10000)]
        fuel: usize,
    },
}

fn main() -> ExitCode {
    // Die quietly on closed pipes (e.g. `seqcd run --trace | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load(file: &str) -> Result<(Program, seqcd::surface::ElabProgram), String> {
    let src = std::fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?;
    let prog = parse_program(&src).map_err(|e| format!("{file}: {e}"))?;
    let elab = prog.elaborate().map_err(|e| format!("{file}: {e}"))?;
    Ok((prog, elab))
}

fn obs_json(o: &Observation) -> serde_json::Value {
    json!({
        "status": o.status.token(),
        "steps": o.steps,
        "needed_vars": o.needed.vars.iter().collect::<Vec<_>>(),
        "needed_covars": o.needed.covars.iter().collect::<Vec<_>>(),
        "eyes": o.needed.eyes_covar.iter()
            .map(|(k, v)| (k.clone(), print_term(v)))
            .collect::<std::collections::BTreeMap<_, _>>(),
        "co_eyes": o.needed.eyes_var.iter()
            .map(|(k, e)| (k.clone(), print_coterm(e)))
            .collect::<std::collections::BTreeMap<_, _>>(),
    })
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Check {
            file,
            discipline_only,
            json,
        } => {
            let mode = if discipline_only {
                Mode::DisciplineOnly
            } else {
                Mode::Typed
            };
            let (_, elab) = load(&file)?;
            let mut diags = Vec::new();
            let mut ok = true;
            for entry in &elab.commands {
                match check_entry(&elab.sig, mode, entry) {
                    Ok(()) => diags.push(json!({"entry": entry.name, "ok": true})),
                    Err(e) => {
                        ok = false;
                        diags.push(json!({
                            "entry": entry.name,
                            "ok": false,
                            "rule": e.rule,
                            "error": e.to_string(),
                        }));
                        if !json {
                            eprintln!("{}: entry {}: {}", file, entry.name, e);
                        }
                    }
                }
            }
            if json {
                println!("{}", serde_json::Value::Array(diags));
            } else if ok {
                println!("{file}: ok ({} entries)", elab.commands.len());
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Run {
            file,
            entry,
            fuel,
            trace,
            json,
            pretty,
        } => {
            let (_, elab) = load(&file)?;
            let e = elab
                .entry(&entry)
                .ok_or_else(|| format!("no entry named {entry}"))?;
            // Already-focused commands run directly; anything else goes
            // through the focusing lift first.
            let body = if is_focused_command(&elab.sig, &e.body) {
                e.body.clone()
            } else {
                lift_command(&elab.sig, &e.body).map_err(|x| x.to_string())?
            };
            // Debug builds assert preservation along the trace of
            // well-typed entries.
            #[cfg(debug_assertions)]
            if let Ok(ctx) = seqcd::typing::entry_context(&elab.sig, Mode::Typed, e) {
                if seqcd::typing::check_command(&ctx, &body).is_ok() {
                    let mut cur = body.clone();
                    for _ in 0..fuel.min(2000) {
                        match seqcd::machine::step(&elab.sig, &cur) {
                            Some(r) => {
                                debug_assert!(
                                    seqcd::typing::check_command(&ctx, &r.next).is_ok(),
                                    "preservation violated at {}",
                                    print_command(&r.next)
                                );
                                cur = r.next;
                            }
                            None => break,
                        }
                    }
                }
            }
            let (obs, entries) = run_traced(&elab.sig, &body, fuel, trace || pretty);
            for t in &entries {
                if pretty {
                    println!(
                        "step {:>4}  {:<11} depth {}  {}",
                        t.step,
                        t.rule.token(),
                        t.depth,
                        print_command(&t.command)
                    );
                } else {
                    println!(
                        "{}",
                        json!({
                            "step": t.step,
                            "rule": t.rule.token(),
                            "at": format!("heap-depth {}", t.depth),
                            "command": print_command(&t.command),
                        })
                    );
                }
            }
            if json {
                println!("{}", json!({"entry": entry, "report": obs_json(&obs)}));
            } else {
                println!(
                    "{entry}: {} after {} steps; needed vars {:?}, covars {:?}",
                    obs.status.token(),
                    obs.steps,
                    obs.needed.vars,
                    obs.needed.covars
                );
                for (a, v) in &obs.needed.eyes_covar {
                    println!("  {a} <- {}", print_term(v));
                }
            }
            Ok(match obs.status {
                Status::Finished => ExitCode::SUCCESS,
                Status::Stuck => ExitCode::from(2),
                Status::Timeout => ExitCode::from(3),
            })
        }
        Cmd::Compile {
            file,
            output,
            stage,
        } => {
            let (prog, elab) = load(&file)?;
            let core = match stage.as_str() {
                "lift" => false,
                "core" => true,
                other => return Err(format!("unknown stage {other}")),
            };
            let mut out = Program {
                declarations: if core { vec![] } else { prog.declarations.clone() },
                definitions: vec![],
                commands: vec![],
            };
            for entry in &elab.commands {
                let lifted = lift_command(&elab.sig, &entry.body).map_err(|e| e.to_string())?;
                debug_assert!(is_focused_command(&elab.sig, &lifted));
                let body: Command = if core {
                    let enc = encode_command(&elab.sig, &lifted).map_err(|e| e.to_string())?;
                    debug_assert!(is_core_command(&elab.sig, &enc));
                    enc
                } else {
                    lifted
                };
                let conv = |b: &(String, Option<seqcd::syntax::TypeExpr>, Discipline)| {
                    (
                        b.0.clone(),
                        b.1.as_ref().map(|t| {
                            if core {
                                encode_type(&elab.sig, t)
                            } else {
                                t.clone()
                            }
                        }),
                        b.2,
                    )
                };
                out.commands.push(CommandEntry {
                    name: entry.name.clone(),
                    gamma: entry.gamma.iter().map(conv).collect(),
                    delta: entry.delta.iter().map(conv).collect(),
                    body,
                });
            }
            let text = print_program(&out);
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|e| format!("{path}: {e}"))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Diffrun { file, fuel, json } => {
            let (_, elab) = load(&file)?;
            let mut all_equal = true;
            let mut reports = Vec::new();
            for entry in &elab.commands {
                let started = std::time::Instant::now();
                let lifted = lift_command(&elab.sig, &entry.body).map_err(|e| e.to_string())?;
                let src = seqcd::machine::run(&elab.sig, &lifted, fuel);
                let enc = encode_command(&elab.sig, &lifted).map_err(|e| e.to_string())?;
                let comp = seqcd::machine::run(&elab.sig, &enc, fuel);
                let equal = src.status == comp.status
                    && src.needed.vars == comp.needed.vars
                    && src.needed.covars == comp.needed.covars
                    && comp.steps >= src.steps;
                all_equal &= equal;
                let wall = started.elapsed();
                if json {
                    reports.push(json!({
                        "entry": entry.name,
                        "equal": equal,
                        "source": obs_json(&src),
                        "compiled": obs_json(&comp),
                        "wall_us": wall.as_micros() as u64,
                    }));
                } else {
                    println!(
                        "{}: {} source {}({}) compiled {}({})",
                        entry.name,
                        if equal { "equal" } else { "MISMATCH" },
                        src.status.token(),
                        src.steps,
                        comp.status.token(),
                        comp.steps
                    );
                }
            }
            if json {
                println!("{}", serde_json::Value::Array(reports));
            }
            Ok(if all_equal {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            })
        }
        Cmd::Isotest { laws, fuel, json } => {
            let sig = SignatureTable::core();
            let mut all_pass = true;
            let mut lines = Vec::new();
            for entry in catalog() {
                if laws != "all" && entry.name != laws {
                    continue;
                }
                if !entry.verifiable {
                    if json {
                        lines.push(json!({
                            "law": entry.name,
                            "skipped": "unverifiable by the observational method",
                        }));
                    } else {
                        println!(
                            "SKIP {} (unverifiable by the observational method)",
                            entry.name
                        );
                    }
                    continue;
                }
                let w = law(&sig, &entry.name, &entry.discs).map_err(|e| e.to_string())?;
                for inst_args in default_instantiations(&w.theta) {
                    let wi = w.instantiate(&inst_args).map_err(|e| e.to_string())?;
                    if let Err(e) = wi.typecheck(&sig) {
                        all_pass = false;
                        println!("FAIL {} witness ill-typed: {e}", entry.name);
                        continue;
                    }
                    let rep = check_iso_observational(&sig, &entry.name, &wi, fuel)
                        .map_err(|e| e.to_string())?;
                    for l in &rep.lines {
                        all_pass &= l.pass;
                        if json {
                            lines.push(json!({
                                "law": l.law,
                                "instantiation": inst_args
                                    .iter()
                                    .map(seqcd::surface::print_type)
                                    .collect::<Vec<_>>(),
                                "direction": l.direction,
                                "sample": l.sample,
                                "pass": l.pass,
                                "steps": l.steps,
                            }));
                        } else {
                            println!(
                                "{} {} [{}] {} ({} steps)",
                                if l.pass { "PASS" } else { "FAIL" },
                                l.law,
                                l.direction,
                                l.sample,
                                l.steps
                            );
                        }
                    }
                }
            }
            if json {
                println!("{}", serde_json::Value::Array(lines));
            }
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            })
        }
        Cmd::Polarize {
            file,
            strategy,
            scheme,
            run: do_run,
            output,
            fuel,
        } => {
            let s = Strategy::from_token(&strategy)
                .ok_or_else(|| format!("unknown strategy {strategy}"))?;
            let sch = Scheme::from_token(&scheme)
                .ok_or_else(|| format!("unknown scheme {scheme}"))?;
            let src = std::fs::read_to_string(&file).map_err(|e| format!("{file}: {e}"))?;
            let prog = parse_lmtm_program(&src).map_err(|e| format!("{file}: {e}"))?;
            for (name, c) in &prog.commands {
                if !strategy_check(c, s) {
                    return Err(format!(
                        "command {name} is outside the {s} strategy sub-syntax"
                    ));
                }
            }
            let (decls, bodies) = polarize_program(&prog.commands, s, sch)?;
            let mut out = Program {
                declarations: decls,
                ..Program::default()
            };
            for (name, body) in bodies {
                let free = seqcd::syntax::free_command(&body);
                out.commands.push(CommandEntry {
                    name,
                    gamma: free
                        .vars
                        .iter()
                        .map(|n| (n.clone(), None, s.discipline()))
                        .collect(),
                    delta: free
                        .covars
                        .iter()
                        .map(|n| (n.clone(), None, s.discipline()))
                        .collect(),
                    body,
                });
            }
            let mut mismatch = false;
            if do_run {
                let elab = out.elaborate().map_err(|e| e.to_string())?;
                for (name, c) in &prog.commands {
                    let direct = lmtm_run(c, s, fuel);
                    let entry = elab.entry(name).unwrap();
                    let obs = seqcd::machine::run(&elab.sig, &entry.body, fuel);
                    let equal = direct.status == obs.status
                        && direct.needed_vars == obs.needed.vars
                        && direct.needed_covars == obs.needed.covars;
                    mismatch |= !equal;
                    println!(
                        "{name}: {} direct {}({} steps, rules {:?}) machine {}({} steps)",
                        if equal { "equal" } else { "MISMATCH" },
                        direct.status.token(),
                        direct.steps,
                        direct.rules.iter().map(|r| r.token()).collect::<Vec<_>>(),
                        obs.status.token(),
                        obs.steps
                    );
                }
            }
            let text = print_program(&out);
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|e| format!("{path}: {e}"))?,
                None => {
                    if !do_run {
                        print!("{text}");
                    }
                }
            }
            Ok(if mismatch {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

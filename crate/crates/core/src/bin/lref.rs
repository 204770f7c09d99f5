use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use lref::denote::{denote_closed, denote_heap, equal_open, Bounds, Verdict};
use lref::error::Error;
use lref::harness::gen::{GenConfig, Generator};
use lref::harness::laws::{default_signatures, run_suite, SuiteConfig, SUITES};
use lref::harness::obs::obs_diff;
use lref::harness::TestReport;
use lref::opsem::{eval, render_heap, to_typed, UntypedHeap, DEFAULT_FUEL};
use lref::syntax::parser::{parse_store_literal, parse_world};
use lref::syntax::{parse_program, parse_type, Program};
use lref::typing::{check, infer, infer_principal, Context};
use lref::worlds::{cell_values, World};
use lref::{Injection, Signature, Type};

#[derive(Parser)]
#[command(name = "lref", version, about = "Typecheck, run, denote and compare programs with full ground references")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Print the desugared core term before doing anything else.
    #[arg(long, global = true)]
    dump_core: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the type of a program, or the first error with its position.
    Check { file: String },
    /// Evaluate a program on a heap over its layout.
    Run {
        file: String,
        /// Initial heap, e.g. `{#0 = true}`; unspecified cells get their first value.
        #[arg(long)]
        heap: Option<String>,
    },
    /// The representative the program denotes at a world extending its layout and a store there.
    Denote {
        file: String,
        #[arg(long)]
        world: String,
        #[arg(long)]
        store: String,
    },
    /// Compare the denotations of two programs with the same signature and layout.
    Eq {
        file1: String,
        file2: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        /// Result type, when it cannot be inferred.
        #[arg(long = "type")]
        ty: Option<String>,
    },
    /// Run the law suites against the bundled signatures.
    Laws {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 2)]
        bound: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        programs: usize,
    },
    /// Search for a boolean context telling two programs apart.
    Diff {
        file1: String,
        file2: String,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        #[arg(long = "type")]
        ty: Option<String>,
    },
    /// Print a random well-typed program.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        size: usize,
        /// `linked-list` or `constant`.
        #[arg(long, default_value = "linked-list")]
        sig: String,
    },
}

fn load(path: &str) -> Result<Program, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Usage(format!("{path}: {e}")))?;
    parse_program(&text)
}

fn result_type(p: &Program, annotated: Option<&str>) -> Result<Type, Error> {
    match annotated {
        Some(t) => {
            let ty = parse_type(&p.sig, t)?;
            check(&p.sig, &p.layout, &Context::new(), &p.term, &ty)?;
            Ok(ty)
        }
        None => Ok(infer(&p.sig, &p.layout, &Context::new(), &p.term)?),
    }
}

fn pair_of(f1: &str, f2: &str, ty: Option<&str>) -> Result<(Program, Program, Type), Error> {
    let (p1, p2) = (load(f1)?, load(f2)?);
    if p1.sig != p2.sig || p1.layout != p2.layout {
        return Err(Error::Usage("both programs must declare the same signature and layout".into()));
    }
    let ty = result_type(&p1, ty)?;
    check(&p2.sig, &p2.layout, &Context::new(), &p2.term, &ty)?;
    Ok((p1, p2, ty))
}

fn default_heap(sig: &Signature, w: &World) -> UntypedHeap {
    w.iter()
        .map(|(l, k)| {
            let v = cell_values(sig, k, w).into_iter().next().expect("every sort is inhabited at a world holding it");
            (l, lref::harness::soundness::semvalue_to_term(&v).expect("ground"))
        })
        .collect()
}

fn render_layout(w: &World) -> String {
    let cells: Vec<String> = w.iter().map(|(l, k)| format!("{l} : {k}")).collect();
    format!("layout {{ {} }}", cells.join(", "))
}

/// Returns whether the command found no failures.
fn run(cli: &Cli) -> Result<bool, Error> {
    let dump = |p: &Program| {
        if cli.dump_core {
            eprintln!("core: {}", p.term);
        }
    };
    match &cli.cmd {
        Cmd::Check { file } => {
            let p = load(file)?;
            dump(&p);
            let principal = infer_principal(&p.sig, &p.layout, &Context::new(), &p.term)?;
            if cli.json {
                println!("{}", json!({ "type": principal.to_string(), "unique": principal.to_type().is_some() }));
            } else {
                println!("{principal}");
            }
            Ok(true)
        }
        Cmd::Run { file, heap } => {
            let p = load(file)?;
            dump(&p);
            let mut h = default_heap(&p.sig, &p.layout);
            if let Some(text) = heap {
                h.extend(parse_store_literal(&p.sig, text)?);
            }
            to_typed(&p.sig, &p.layout, &h)?;
            let out = eval(&p.term, &h, DEFAULT_FUEL)?;
            let w = out.final_layout(&p.layout);
            let rendered = render_heap(&w, &out.heap);
            if cli.json {
                println!("{}", json!({ "value": out.value.to_string(), "layout": w.to_string(), "heap": rendered }));
            } else {
                println!("value: {}\nheap:\n{}", out.value, rendered.trim_end());
            }
            Ok(true)
        }
        Cmd::Denote { file, world, store } => {
            let p = load(file)?;
            dump(&p);
            let w = parse_world(&p.sig, world)?;
            let h = Injection::inclusion(&p.layout, &w)
                .ok_or_else(|| Error::Usage(format!("{w} does not extend the layout {}", p.layout)))?;
            let heap: UntypedHeap = parse_store_literal(&p.sig, store)?.into_iter().collect();
            let s = denote_heap(&to_typed(&p.sig, &w, &heap)?)?;
            let r = denote_closed(&p.term, &p.layout)?.at(&h, &s)?;
            if cli.json {
                println!("{}", json!({ "representative": r.to_string(), "private_cells": r.private_count() }));
            } else {
                println!("{r}");
            }
            Ok(true)
        }
        Cmd::Eq { file1, file2, bound, ty } => {
            let (p1, p2, ty) = pair_of(file1, file2, ty.as_deref())?;
            dump(&p1);
            dump(&p2);
            let bounds = Bounds { world: *bound, ..Bounds::default() };
            let v = equal_open(&p1.sig, &p1.layout, &Context::new(), &p1.term, &p2.term, &ty, bounds)?;
            if cli.json {
                let witness = match &v {
                    Verdict::NotEqual(w) => Some(w.to_string()),
                    _ => None,
                };
                println!("{}", json!({ "verdict": v.label(), "bound": bound, "witness": witness }));
            } else {
                println!("{v}");
            }
            Ok(!v.is_not_equal())
        }
        Cmd::Diff { file1, file2, budget, ty } => {
            let (p1, p2, ty) = pair_of(file1, file2, ty.as_deref())?;
            dump(&p1);
            dump(&p2);
            let w = obs_diff(&p1.sig, &p1.layout, &Context::new(), &p1.term, &p2.term, &ty, *budget);
            if cli.json {
                println!("{}", json!({ "budget": budget, "witness": w }));
            } else {
                match &w {
                    Some(w) => println!("{w}"),
                    None => println!("no distinguishing context within {budget} runs"),
                }
            }
            Ok(w.is_none())
        }
        Cmd::Laws { suite, bound, seed, programs } => {
            let names: Vec<&str> = match suite {
                Some(s) if SUITES.contains(&s.as_str()) => vec![s.as_str()],
                Some(s) => return Err(Error::Usage(format!("unknown suite {s}; expected one of {}", SUITES.join(", ")))),
                None => SUITES.to_vec(),
            };
            let cfg = SuiteConfig { bound: *bound, seed: *seed, programs: *programs, ..SuiteConfig::default() };
            let mut reports: Vec<TestReport> = Vec::new();
            for name in names {
                for (label, sig) in default_signatures() {
                    let mut r = run_suite(name, &sig, &cfg).expect("suite names are checked");
                    r.suite = format!("{name} ({label})");
                    if !cli.json {
                        println!("{r}");
                    }
                    reports.push(r);
                }
            }
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&reports).expect("reports are plain data"));
            }
            Ok(reports.iter().all(TestReport::passed))
        }
        Cmd::Gen { seed, size, sig } => {
            let sig = match sig.as_str() {
                "linked-list" => Signature::linked_list(),
                "constant" => Signature::constant_bool(),
                other => return Err(Error::Usage(format!("unknown signature {other}"))),
            };
            let (w, t, ty) = Generator::new(&sig, *seed).program(GenConfig { size: *size, ..GenConfig::default() })?;
            if cli.json {
                println!("{}", json!({ "signature": sig.render(), "layout": w.to_string(), "term": t.to_string(), "type": ty.to_string() }));
            } else {
                println!("{}{}\n{t}", sig.render(), render_layout(&w));
                if cli.dump_core {
                    eprintln!("type: {ty}");
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string() }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(2)
        }
    }
}

//! Command-line front door: parse and print terms, run programs, check
//! derivation scripts, query the membership oracle, run the canonicity
//! harness, and sweep the forcing theorems.
//!
//! Exit codes: 0 when every requested check passes, 1 on a failed check or
//! counterexample, 2 on usage or parse errors.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use gctt_core::elaborate::{elab_term, ClockEnv};
use gctt_core::forcing::{
    check_theorem, negative_control, sweep_formula, ForcingLab, Theorem, TheoremOutcome,
    TruncParams,
};
use gctt_core::opsem::{eval, trace, EvalOutcome};
use gctt_core::program::ClockName;
use gctt_core::rules::{check_script, LemmaOutcome};
use gctt_core::semantics::{
    canonicity_check, interp_type, member, CanonicityOutcome, OracleBudget, World,
};
use gctt_core::syntax::{parse_term, print, Definitions};
use gctt_core::Tri;

/// JSON report schema version, pinned by golden tests.
const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "gctt", version, about = "Guarded type theory kernel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Text,
    Json,
}

fn default_fuel() -> u64 {
    std::env::var("GCTT_FUEL")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000)
}

#[derive(Subcommand)]
enum Command {
    /// Parse a term and print it back.
    Parse {
        /// The term, or a path with --file.
        input: String,
        #[arg(long)]
        file: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Elaborate a closed term and evaluate it.
    Eval {
        input: String,
        #[arg(long)]
        file: bool,
        /// Evaluation fuel (default from GCTT_FUEL or 100000).
        #[arg(long)]
        fuel: Option<u64>,
        /// Print the whole evaluation trace, one term per line.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check the lemmas of one or more script files.
    Check {
        files: Vec<String>,
        #[arg(long)]
        fuel: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Query the membership oracle: is M (= M1) in type A at a world?
    Oracle {
        /// The member (left side).
        term: String,
        /// The type.
        r#type: String,
        /// Optional right side; defaults to the left side.
        #[arg(long)]
        right: Option<String>,
        /// World specification `name=time,name=time`; default `k=3`.
        #[arg(long)]
        world: Option<String>,
        /// Universe level bounding the hierarchy.
        #[arg(long, default_value_t = 3)]
        level: u32,
        #[arg(long)]
        unfold: Option<u32>,
        #[arg(long = "enum")]
        enum_depth: Option<u32>,
        #[arg(long)]
        fresh_times: Option<u32>,
        #[arg(long)]
        fuel: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check a script file and run every closed boolean lemma to a value.
    Canonicity {
        file: String,
        #[arg(long)]
        fuel: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Sweep the forcing-lab theorems over a finite truncation.
    Forcing {
        #[arg(long, default_value_t = 2)]
        pool: u32,
        #[arg(long, default_value_t = 2)]
        time_bound: u32,
        /// A theorem name, or `all`.
        #[arg(long, default_value = "all")]
        theorem: String,
        /// Also run the built-in non-theorem; it must be refuted.
        #[arg(long)]
        negative_control: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Write the shipped example scripts to a directory, or list them.
    Examples {
        #[arg(long, default_value = "examples-out")]
        dir: String,
        #[arg(long)]
        list: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_input(input: &str, file: bool) -> Result<String, String> {
    if file {
        std::fs::read_to_string(input).map_err(|e| format!("cannot read {input}: {e}"))
    } else {
        Ok(input.to_owned())
    }
}

fn parse_world(spec: Option<&str>) -> Result<(Vec<String>, ClockEnv, World), String> {
    let spec = spec.unwrap_or("k=3");
    let mut names = Vec::new();
    let mut times = BTreeMap::new();
    let mut env = ClockEnv::new();
    for (i, part) in spec.split(',').enumerate() {
        let (name, time) = part
            .split_once('=')
            .ok_or_else(|| format!("world entries look like `name=time`, got `{part}`"))?;
        let name = name.trim().to_owned();
        let time: u32 = time
            .trim()
            .parse()
            .map_err(|_| format!("bad time `{time}`"))?;
        let clock = ClockName(i as u32);
        if names.contains(&name) {
            return Err(format!("duplicate clock `{name}` in world"));
        }
        env.push(&name, clock);
        names.push(name);
        times.insert(clock, time);
    }
    let world = World::new(times).map_err(|e| e.to_string())?;
    Ok((names, env, world))
}

fn run(cmd: Command) -> Result<ExitCode, String> {
    match cmd {
        Command::Parse {
            input,
            file,
            format,
        } => {
            let src = read_input(&input, file)?;
            let term = gctt_core::syntax::parse(&src).map_err(|e| e.to_string())?;
            match format {
                Format::Text => println!("{}", print(&term)),
                Format::Json => println!(
                    "{}",
                    json!({
                        "version": SCHEMA_VERSION,
                        "printed": print(&term),
                        "term": term,
                    })
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval {
            input,
            file,
            fuel,
            trace: want_trace,
            format,
        } => {
            let src = read_input(&input, file)?;
            let fuel = fuel.unwrap_or_else(default_fuel);
            let term = gctt_core::syntax::parse(&src).map_err(|e| e.to_string())?;
            let prog = elab_term(&[], &[], &term, &ClockEnv::new()).map_err(|e| e.to_string())?;
            let outcome = eval(&prog, fuel).map_err(|e| e.to_string())?;
            let steps = trace(&prog, fuel);
            match format {
                Format::Text => {
                    if want_trace {
                        for t in &steps {
                            println!("{t}");
                        }
                    }
                    match &outcome {
                        EvalOutcome::Val(v, n) => println!("value ({n} steps): {v}"),
                        EvalOutcome::OutOfFuel(m) => println!("out of fuel at: {m}"),
                        EvalOutcome::Stuck(m) => println!("stuck at: {m}"),
                    }
                }
                Format::Json => {
                    let (kind, result, steps_taken) = match &outcome {
                        EvalOutcome::Val(v, n) => ("value", v, *n),
                        EvalOutcome::OutOfFuel(m) => ("out-of-fuel", m, fuel),
                        EvalOutcome::Stuck(m) => ("stuck", m, 0),
                    };
                    let mut obj = json!({
                        "version": SCHEMA_VERSION,
                        "outcome": kind,
                        "result": result.to_string(),
                        "result_tree": result.to_json(),
                        "steps": steps_taken,
                    });
                    if want_trace {
                        obj["trace"] =
                            json!(steps.iter().map(|t| t.to_string()).collect::<Vec<_>>());
                    }
                    println!("{obj}");
                }
            }
            Ok(match outcome {
                EvalOutcome::Val(..) => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            })
        }
        Command::Check {
            files,
            fuel,
            format,
        } => {
            if files.is_empty() {
                return Err("no script files given".into());
            }
            let fuel = fuel.unwrap_or_else(default_fuel);
            let mut all_ok = true;
            let mut reports = Vec::new();
            for path in &files {
                let src = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {path}: {e}"))?;
                let report = check_script(&src, fuel).map_err(|e| format!("{path}: {e}"))?;
                all_ok &= report.all_ok();
                reports.push((path.clone(), report));
            }
            match format {
                Format::Text => {
                    for (path, report) in &reports {
                        for l in &report.lemmas {
                            match &l.outcome {
                                LemmaOutcome::Ok => println!("ok    {path} {}", l.name),
                                LemmaOutcome::Error { path: at, msg } => {
                                    println!("FAIL  {path} {}\n      at {at}\n      {msg}", l.name)
                                }
                            }
                        }
                    }
                }
                Format::Json => {
                    // re-walk with per-node derivation trees
                    let mut files_json = Vec::new();
                    for path in &files {
                        let src = std::fs::read_to_string(path)
                            .map_err(|e| format!("cannot read {path}: {e}"))?;
                        let parsed = gctt_core::rules::parse_script_file(&src)
                            .map_err(|e| format!("{path}: {e}"))?;
                        let trees = gctt_core::rules::check_script_trees(&parsed, fuel);
                        let lemmas: Vec<_> = trees
                            .iter()
                            .map(|(report, tree)| {
                                json!({
                                    "name": report.name,
                                    "judgment": report.judgment,
                                    "outcome": report.outcome,
                                    "derivation": tree,
                                })
                            })
                            .collect();
                        files_json.push(json!({ "file": path, "lemmas": lemmas }));
                    }
                    println!(
                        "{}",
                        json!({ "version": SCHEMA_VERSION, "ok": all_ok, "files": files_json })
                    );
                }
            }
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Oracle {
            term,
            r#type,
            right,
            world,
            level,
            unfold,
            enum_depth,
            fresh_times,
            fuel,
            format,
        } => {
            let (names, env, w) = parse_world(world.as_deref())?;
            let mut budget = OracleBudget::default();
            if let Some(u) = unfold {
                budget.unfold_depth = u;
            }
            if let Some(e) = enum_depth {
                budget.enum_depth = e;
            }
            if let Some(t) = fresh_times {
                budget.fresh_clock_times = t;
            }
            if let Some(f) = fuel {
                budget.fuel = f;
            }
            let defs = Definitions::new();
            let parse_in_world =
                |s: &str| parse_term(s, &defs, &names, &[]).map_err(|e| e.to_string());
            let left_t = parse_in_world(&term)?;
            let ty_t = parse_in_world(&r#type)?;
            let right_t = match &right {
                Some(r) => parse_in_world(r)?,
                None => left_t.clone(),
            };
            let elab = |t| elab_term(&names, &[], t, &env).map_err(|e| e.to_string());
            let left_p = elab(&left_t)?;
            let right_p = elab(&right_t)?;
            let ty_p = elab(&ty_t)?;
            let clause = interp_type(&w, &ty_p, level, &budget)
                .map(|r| format!("{:?}", r.clause))
                .unwrap_or_else(|e| format!("({e})"));
            let answer = member(&w, &left_p, &right_p, &ty_p, level, &budget);
            let verdict = match answer.tri {
                Tri::Yes => "yes",
                Tri::No => "no",
                Tri::Unknown => "unknown",
            };
            match format {
                Format::Text => {
                    println!("world     {w}");
                    println!("clause    {clause}");
                    print!("member    {verdict}");
                    if answer.higher_order {
                        print!(" (higher-order domain)");
                    }
                    println!();
                    if let Some(note) = &answer.note {
                        println!("note      {note}");
                    }
                }
                Format::Json => println!(
                    "{}",
                    json!({
                        "version": SCHEMA_VERSION,
                        "world": w.to_string(),
                        "clause": clause,
                        "member": verdict,
                        "higher_order": answer.higher_order,
                        "note": answer.note,
                    })
                ),
            }
            Ok(match answer.tri {
                Tri::No => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            })
        }
        Command::Canonicity { file, fuel, format } => {
            let fuel = fuel.unwrap_or_else(default_fuel);
            let src =
                std::fs::read_to_string(&file).map_err(|e| format!("cannot read {file}: {e}"))?;
            let parsed =
                gctt_core::rules::parse_script_file(&src).map_err(|e| format!("{file}: {e}"))?;
            let report = check_script(&src, fuel).map_err(|e| e.to_string())?;
            let mut rows = Vec::new();
            let mut ok = report.all_ok();
            for (lemma, lr) in parsed.lemmas.iter().zip(&report.lemmas) {
                if !matches!(lr.outcome, LemmaOutcome::Ok) {
                    rows.push((lemma.name.clone(), "derivation failed".to_owned(), false));
                    continue;
                }
                let j = &lemma.judgment;
                let (clocks, hyps, left, ty) = match j {
                    gctt_core::rules::Judgment::EqMem {
                        clocks,
                        hyps,
                        left,
                        ty,
                        ..
                    } => (clocks, hyps, left, ty),
                    _ => continue,
                };
                let is_bool = matches!(ty, gctt_core::syntax::FormalTerm::Bool);
                if !clocks.is_empty() || !hyps.is_empty() || !is_bool {
                    continue;
                }
                let prog =
                    elab_term(&[], &[], left, &ClockEnv::new()).map_err(|e| e.to_string())?;
                let (desc, good) = match canonicity_check(&prog, fuel) {
                    CanonicityOutcome::Tt => ("tt".to_owned(), true),
                    CanonicityOutcome::Ff => ("ff".to_owned(), true),
                    CanonicityOutcome::Fail(why) => (format!("FAIL: {why}"), false),
                };
                ok &= good;
                rows.push((lemma.name.clone(), desc, good));
            }
            match format {
                Format::Text => {
                    for (name, desc, good) in &rows {
                        println!("{} {name}: {desc}", if *good { "ok  " } else { "FAIL" });
                    }
                }
                Format::Json => {
                    let rows: Vec<_> = rows
                        .iter()
                        .map(|(n, d, g)| json!({"lemma": n, "result": d, "ok": g}))
                        .collect();
                    println!(
                        "{}",
                        json!({"version": SCHEMA_VERSION, "ok": ok, "programs": rows})
                    );
                }
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Forcing {
            pool,
            time_bound,
            theorem,
            negative_control: run_neg,
            format,
        } => {
            let params = TruncParams::new(pool, time_bound)?;
            let theorems: Vec<Theorem> = if theorem == "all" {
                Theorem::ALL.to_vec()
            } else {
                vec![Theorem::parse(&theorem)
                    .ok_or_else(|| format!("unknown theorem `{theorem}`"))?]
            };
            let mut ok = true;
            let mut rows = Vec::new();
            for th in &theorems {
                let outcome = check_theorem(*th, &params)?;
                ok &= outcome.passed();
                rows.push((th.name().to_owned(), outcome));
            }
            if run_neg {
                let lab = ForcingLab::new(&params);
                let outcome = sweep_formula(&lab, &negative_control())?;
                // the control must be refuted
                ok &= !outcome.passed();
                rows.push(("negative_control".to_owned(), outcome));
            }
            match format {
                Format::Text => {
                    for (name, outcome) in &rows {
                        match outcome {
                            TheoremOutcome::Pass { points_checked } => {
                                if name == "negative_control" {
                                    println!("FAIL {name}: no counterexample found");
                                } else {
                                    println!("pass {name} ({points_checked} points)");
                                }
                            }
                            TheoremOutcome::Refuted(c) => {
                                if name == "negative_control" {
                                    println!("pass {name}: refuted at {}", c.world);
                                } else {
                                    println!(
                                        "FAIL {name}: counterexample at {} families {:?}",
                                        c.world, c.families
                                    );
                                }
                            }
                        }
                    }
                }
                Format::Json => {
                    let rows: Vec<_> = rows
                        .iter()
                        .map(|(name, o)| match o {
                            TheoremOutcome::Pass { points_checked } => json!({
                                "theorem": name, "passed": true, "points": points_checked,
                            }),
                            TheoremOutcome::Refuted(c) => json!({
                                "theorem": name,
                                "passed": false,
                                "counterexample": {
                                    "world": c.world.to_string(),
                                    "families": c.families,
                                    "free_clocks": c.free_clocks.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
                                },
                            }),
                        })
                        .collect();
                    println!(
                        "{}",
                        json!({"version": SCHEMA_VERSION, "ok": ok, "theorems": rows})
                    );
                }
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Examples { dir, list } => {
            if list {
                for (name, _) in gctt_core::corpus::ALL {
                    println!("{name}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
            for (name, body) in gctt_core::corpus::ALL {
                let path = std::path::Path::new(&dir).join(name);
                std::fs::write(&path, body).map_err(|e| e.to_string())?;
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

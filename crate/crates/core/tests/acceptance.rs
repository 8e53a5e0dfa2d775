//! Acceptance suite. Each test implements one numbered criterion at its
//! stated tolerance and prints a pass line; the assertions are the gate.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use gctt_core::corpus;
use gctt_core::elaborate::{elab_term, ClockEnv};
use gctt_core::opsem::{eval_unchecked, is_value, step, StepResult};
use gctt_core::program::{instantiate_clock, subst_last, subst_last3, ClockName, Program};
use gctt_core::rules::script::{checked_judgments, parse_script_file, premises_for_test};
use gctt_core::rules::{
    check, check_script, Binding, Bindings, Derivation, Judgment, LemmaTable, RuleName,
};
use gctt_core::semantics::{
    canonicity_check, interp_type, member, CanonicityOutcome, Clause, OracleBudget, World,
};
use gctt_core::syntax::FormalTerm;
use gctt_core::forcing::{
    check_theorem, negative_control, sweep_formula, ForcingLab, Theorem, TruncParams,
};
use gctt_core::Tri;

fn k(n: u32) -> ClockName {
    ClockName(n)
}

/// An independent rendering of the step rules as a relation: every redex
/// contraction and congruence that applies at the root contributes one
/// successor. Checks determinism without trusting the step function's rule
/// ordering.
fn successors(m: &Program) -> Vec<Program> {
    use Program::*;
    let mut out = Vec::new();
    match m {
        App(f, a) => {
            if let Lam(b) = &**f {
                out.push(subst_last(b, 0, a));
            }
            for f2 in successors(f) {
                out.push(Program::app(f2, (**a).clone()));
            }
        }
        CApp(f, kc) => {
            if let KLam(bound, body) = &**f {
                out.push(instantiate_clock(body, *bound, *kc));
            }
            for f2 in successors(f) {
                out.push(Program::capp(f2, *kc));
            }
        }
        Fst(p) => {
            if let Pair(a, _) = &**p {
                out.push((**a).clone());
            }
            for p2 in successors(p) {
                out.push(Program::fst(p2));
            }
        }
        Snd(p) => {
            if let Pair(_, b) = &**p {
                out.push((**b).clone());
            }
            for p2 in successors(p) {
                out.push(Program::snd(p2));
            }
        }
        If(b, t, f) => {
            match &**b {
                Tt => out.push((**t).clone()),
                Ff => out.push((**f).clone()),
                _ => {}
            }
            for b2 in successors(b) {
                out.push(Program::if_(b2, (**t).clone(), (**f).clone()));
            }
        }
        IfZe(n, z, s) => {
            match &**n {
                Ze => out.push((**z).clone()),
                Su(p) => out.push(subst_last(s, 0, p)),
                _ => {}
            }
            for n2 in successors(n) {
                out.push(Program::ifze(n2, (**z).clone(), (**s).clone()));
            }
        }
        WRec(w, o) => {
            if let Sup(label, family) = &**w {
                let subtrees = Program::lam((**family).clone());
                let rec = Program::lam(Program::wrec((**family).clone(), o.shift_levels(0, 1)));
                out.push(subst_last3(o, 0, [label, &subtrees, &rec]));
            }
            for w2 in successors(w) {
                out.push(Program::wrec(w2, (**o).clone()));
            }
        }
        Fix(b) => out.push(subst_last(b, 0, m)),
        _ => {}
    }
    out
}

#[test]
fn criterion_1_determinism_and_value_discipline() {
    let started = Instant::now();
    let mut r = common::rng(11);
    let mut generated = 0usize;
    while generated < 1200 {
        let m = common::gen_program(&mut r, 0, 8);
        generated += 1;
        let succ = successors(&m);
        assert!(
            succ.len() <= 1,
            "more than one step rule applies to {m:?}: {succ:?}"
        );
        match step(&m) {
            StepResult::Stepped(next) => {
                assert_eq!(succ.len(), 1, "step found a move the relation lacks: {m:?}");
                assert_eq!(succ[0], next, "step disagrees with the relation on {m:?}");
            }
            StepResult::Value => {
                assert!(is_value(&m));
                assert!(succ.is_empty(), "a value stepped: {m:?}");
            }
            StepResult::Stuck(_) => {
                assert!(!is_value(&m));
                assert!(succ.is_empty(), "a stuck term had a successor: {m:?}");
            }
        }
        // repeated evaluation is bit-identical
        let o1 = eval_unchecked(&m, 300);
        let o2 = eval_unchecked(&m, 300);
        assert_eq!(o1, o2);
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "determinism sweep took {elapsed:?}"
    );
    println!("criterion 1 (determinism & value discipline, {generated} programs in {elapsed:?}): PASS");
}

#[test]
fn criterion_2_canonicity_corpus() {
    const FUEL: u64 = 100_000;
    let report = check_script(corpus::CANONICITY, FUEL).expect("corpus parses");
    assert!(report.all_ok(), "canonicity corpus derivations: {report:?}");
    let file = parse_script_file(corpus::CANONICITY).unwrap();
    let mut booleans = 0;
    let mut failures = Vec::new();
    for lemma in &file.lemmas {
        if let Judgment::EqMem {
            clocks,
            hyps,
            left,
            ty,
            ..
        } = &lemma.judgment
        {
            if clocks.is_empty() && hyps.is_empty() && matches!(ty, FormalTerm::Bool) {
                booleans += 1;
                let prog = elab_term(&[], &[], left, &ClockEnv::new()).unwrap();
                match canonicity_check(&prog, FUEL) {
                    CanonicityOutcome::Tt | CanonicityOutcome::Ff => {}
                    CanonicityOutcome::Fail(why) => failures.push((lemma.name.clone(), why)),
                }
            }
        }
    }
    assert!(booleans >= 20, "only {booleans} closed boolean programs");
    assert!(failures.is_empty(), "canonicity failures: {failures:?}");
    println!("criterion 2 (canonicity corpus, {booleans} programs, zero failures): PASS");
}

#[test]
fn criterion_3_stream_lemmas() {
    let report = check_script(corpus::STREAMS, 100_000).expect("streams corpus parses");
    assert!(report.all_ok(), "{report:?}");
    let required = [
        "BitStream_wf",
        "BitSeq_wf",
        "BitStream_unfold",
        "BitSeq_unfold",
        "Ones_wf_guarded",
        "Ones_wf_infinite",
    ];
    for name in required {
        assert!(
            report.lemmas.iter().any(|l| l.name == name),
            "missing lemma {name}"
        );
    }
    println!("criterion 3 (six stream lemmas check): PASS");
}

/// Worlds with at most two clocks and times up to three.
fn small_worlds() -> Vec<World> {
    let mut out = Vec::new();
    for t0 in 0..=3 {
        out.push(World::single(k(0), t0));
        for t1 in 0..=3 {
            out.push(World::new(BTreeMap::from([(k(0), t0), (k(1), t1)])).unwrap());
        }
    }
    out
}

#[test]
fn criterion_4_rule_oracle_cross_check() {
    let started = Instant::now();
    let budget = OracleBudget::default();
    let level = 2;
    let mut checked = 0usize;
    let mut unknowns: Vec<(String, String)> = Vec::new();
    for (file_name, src) in corpus::ALL {
        let file = parse_script_file(src).expect("corpus parses");
        for (lemma, judgment) in checked_judgments(&file, budget.fuel) {
            let Judgment::EqMem {
                clocks,
                hyps,
                left,
                right,
                ty,
            } = &judgment
            else {
                continue;
            };
            if !hyps.is_empty() {
                continue;
            }
            for world in small_worlds() {
                let world_clocks: Vec<ClockName> = world.domain().collect();
                // every assignment of the judgment's clocks to world clocks
                let mut assignment = vec![0usize; clocks.len()];
                loop {
                    let rho = ClockEnv::from_pairs(
                        clocks
                            .iter()
                            .zip(&assignment)
                            .map(|(n, i)| (n.clone(), world_clocks[*i]))
                            .collect(),
                    );
                    let l = elab_term(clocks, &[], left, &rho).unwrap();
                    let rgt = elab_term(clocks, &[], right, &rho).unwrap();
                    let t = elab_term(clocks, &[], ty, &rho).unwrap();
                    let answer = member(&world, &l, &rgt, &t, level, &budget);
                    checked += 1;
                    match answer.tri {
                        Tri::Yes => {}
                        Tri::No => panic!(
                            "oracle refutes checked lemma {file_name}/{lemma} at {world}: {:?}",
                            answer.note
                        ),
                        Tri::Unknown => {
                            assert!(
                                answer.higher_order,
                                "non-higher-order unknown for {file_name}/{lemma} at {world}: {:?}",
                                answer.note
                            );
                            unknowns.push((
                                format!("{file_name}/{lemma}"),
                                format!("{world}: {}", answer.note.clone().unwrap_or_default()),
                            ));
                        }
                    }
                    // bump the assignment
                    let mut done = true;
                    for slot in assignment.iter_mut() {
                        *slot += 1;
                        if *slot < world_clocks.len() {
                            done = false;
                            break;
                        }
                        *slot = 0;
                    }
                    if done {
                        break;
                    }
                }
            }
        }
    }
    let mut unknown_lemmas: Vec<&String> = unknowns.iter().map(|(l, _)| l).collect();
    unknown_lemmas.dedup();
    println!(
        "criterion 4 (checker/oracle agreement, {checked} queries in {:?}; \
         higher-order unknowns reported for {unknown_lemmas:?}): PASS",
        started.elapsed()
    );
}

#[test]
fn criterion_5_negative_controls() {
    let table = LemmaTable::new();
    let leaf = |rule| Derivation::Rule {
        rule,
        bindings: Bindings::new(),
        premises: vec![],
    };

    // (a) clock irrelevance with the quantified clock already in the context
    let j = Judgment::EqMem {
        clocks: vec!["k".into()],
        hyps: vec![],
        left: FormalTerm::Bool,
        right: FormalTerm::isect("k", FormalTerm::Bool),
        ty: FormalTerm::Univ(0),
    };
    let d = Derivation::Rule {
        rule: RuleName::IsectIrrelevance,
        bindings: Bindings::new(),
        premises: vec![leaf(RuleName::BoolUnivEq)],
    };
    let err = check(&d, &j, &table, 1000).unwrap_err();
    assert_eq!(err.path, "conclusion");
    assert!(err.msg.contains("side condition"), "{err}");

    // (b) a pair introduction whose fourth premise must prove the
    // substituted family but proves something else
    let j = Judgment::membership(
        vec![],
        vec![],
        FormalTerm::pair(FormalTerm::Tt, FormalTerm::Ff),
        FormalTerm::times(FormalTerm::Bool, FormalTerm::Bool),
    );
    let mut bindings = Bindings::new();
    bindings.insert("i".into(), Binding::Index(0));
    let d = Derivation::Rule {
        rule: RuleName::ProdIntro,
        bindings,
        premises: vec![
            leaf(RuleName::BoolUnivEq),
            Derivation::Rule {
                rule: RuleName::GeneralWeakening,
                bindings: Bindings::new(),
                premises: vec![leaf(RuleName::BoolUnivEq)],
            },
            leaf(RuleName::BoolTtEquality),
            leaf(RuleName::BoolTtEquality), // must prove ff : [tt/x]bool, proves tt instead
        ],
    };
    let err = check(&d, &j, &table, 1000).unwrap_err();
    assert!(err.path.contains("premise 4 of Prod.intro"), "{err}");

    // and a genuinely mismatched substituted family: the computed fourth
    // premise is at [M00/x]B, so instantiating it at the wrong term fails
    let dependent = Judgment::membership(
        vec![],
        vec![],
        FormalTerm::pair(FormalTerm::Tt, FormalTerm::Ax),
        FormalTerm::sg(
            "King",
            FormalTerm::Bool,
            FormalTerm::if_(FormalTerm::var("King"), FormalTerm::Unit, FormalTerm::Void),
        ),
    );
    let mut bindings = Bindings::new();
    bindings.insert("i".into(), Binding::Index(0));
    let wanted = premises_for_test(
        RuleName::ProdIntro,
        &bindings,
        &dependent,
    )
    .unwrap();
    let expected_family = FormalTerm::if_(FormalTerm::Tt, FormalTerm::Unit, FormalTerm::Void);
    match &wanted[3] {
        Judgment::EqMem { ty, .. } => assert!(
            ty.alpha_eq(&expected_family),
            "fourth premise must be at the substituted family, got {ty:?}"
        ),
        other => panic!("unexpected premise {other:?}"),
    }

    // (c) universe formation with a non-increasing index
    let j = Judgment::membership(vec![], vec![], FormalTerm::Univ(1), FormalTerm::Univ(1));
    let err = check(&leaf(RuleName::GeneralUnivFormation), &j, &table, 1000).unwrap_err();
    assert_eq!(err.path, "conclusion");
    assert!(err.msg.contains("i < j"), "{err}");

    println!("criterion 5 (negative controls rejected with pinpointed paths): PASS");
}

#[test]
fn criterion_6_forcing_theorems() {
    let started = Instant::now();
    let p22 = TruncParams::new(2, 2).unwrap();
    for th in Theorem::ALL {
        let out = check_theorem(*th, &p22).unwrap();
        assert!(out.passed(), "{} failed at P=2,T=2: {out:?}", th.name());
    }
    let p23 = TruncParams::new(2, 3).unwrap();
    let out = check_theorem(Theorem::Loeb, &p23).unwrap();
    assert!(out.passed(), "loeb failed at P=2,T=3: {out:?}");
    let lab = ForcingLab::new(&p22);
    let neg = sweep_formula(&lab, &negative_control()).unwrap();
    assert!(!neg.passed(), "the non-theorem was not refuted");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "forcing sweep took {elapsed:?}");
    println!(
        "criterion 6 (eight forcing theorems exhaustive at P=2,T=2; loeb at T=3; \
         negative control refuted; {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_7_later_at_zero_is_total() {
    let budget = OracleBudget::default();
    let mut r = common::rng(77);
    // a 50-term sample of closed bodies, including divergent and stuck ones
    let mut sample: Vec<Program> = vec![
        Program::fix(Program::Var(0)),
        Program::fst(Program::Tt),
        Program::Void,
        Program::Bool,
    ];
    while sample.len() < 50 {
        sample.push(common::gen_program(&mut r, 0, 6));
    }
    let pairs: Vec<(Program, Program)> = vec![
        (Program::Tt, Program::Ff),
        (Program::Ze, Program::Ax),
        (Program::fix(Program::Var(0)), Program::Tt),
        (Program::fst(Program::Tt), Program::lam(Program::Var(0))),
    ];
    // worlds covering the generator's clock pool, with the tested clock at 0
    for world in [
        World::new(BTreeMap::from([(k(0), 0), (k(1), 3), (k(2), 1)])).unwrap(),
        World::new(BTreeMap::from([(k(0), 0), (k(1), 0), (k(2), 2)])).unwrap(),
    ] {
        for body in &sample {
            let ty = Program::later(k(0), body.clone());
            let rel = interp_type(&world, &ty, 1, &budget).unwrap();
            assert_eq!(rel.clause, Clause::LaterTotal);
            for (a, b) in &pairs {
                assert_eq!(
                    rel.test(a, b).tri,
                    Tri::Yes,
                    "later at time zero must relate everything; body {body:?}"
                );
            }
        }
    }
    println!("criterion 7 (later at time zero is the total relation, 50-term sample): PASS");
}

#[test]
fn criterion_8_clock_irrelevance_at_desk_scale() {
    let budget = OracleBudget::default();
    let ones = Program::fix(Program::pair(Program::Tt, Program::Var(0)));
    let stream = Program::klam(
        k(0),
        Program::fix(Program::sg(Program::Bool, Program::later(k(0), Program::Var(0)))),
    );
    let seq = Program::isect(k(0), Program::capp(stream.clone(), k(0)));
    let queries: Vec<(Program, Program, Program)> = vec![
        (Program::Tt, Program::Tt, Program::Bool),
        (Program::Tt, Program::Ff, Program::Bool),
        (Program::numeral(2), Program::numeral(2), Program::Nat),
        (ones.clone(), ones.clone(), Program::capp(stream.clone(), k(0))),
        (ones.clone(), ones.clone(), seq.clone()),
        (Program::Ax, Program::Ax, Program::Unit),
        (Program::lam(Program::Var(0)), Program::lam(Program::Var(0)), Program::pi(Program::Bool, Program::Bool)),
        (Program::Bool, Program::Bool, Program::Univ(0)),
        (Program::pair(Program::Tt, Program::Ff), Program::pair(Program::Tt, Program::Ff), Program::sg(Program::Bool, Program::Bool)),
        (Program::Ze, Program::Tt, Program::Bool),
    ];
    let mut r = common::rng(88);
    let mut sampled = 0;
    use rand::Rng;
    while sampled < 100 {
        let (m0, m1, ty) = &queries[r.gen_range(0..queries.len())];
        let t0 = r.gen_range(0..=3u32);
        let base = World::single(k(0), t0);
        let fresh_time = r.gen_range(0..=3u32);
        let extended = base.with_clock(k(7), fresh_time);
        let a = member(&base, m0, m1, ty, 2, &budget);
        let b = member(&extended, m0, m1, ty, 2, &budget);
        assert_eq!(
            a.tri, b.tri,
            "adding an unused clock changed the answer for {ty:?} at {base}"
        );
        sampled += 1;
    }
    // and the irrelevance rule derives A = isect k. A for shipped types
    let report = check_script(corpus::TYPING, 100_000).unwrap();
    for name in [
        "bool_isect_irrel",
        "pair_ty_isect_irrel",
        "fun_ty_isect_irrel",
        "univ_isect_irrel",
    ] {
        let l = report
            .lemmas
            .iter()
            .find(|l| l.name == name)
            .unwrap_or_else(|| panic!("missing {name}"));
        assert!(
            matches!(l.outcome, gctt_core::rules::LemmaOutcome::Ok),
            "{name} failed"
        );
    }
    println!("criterion 8 (clock irrelevance over 100 samples; shipped irrelevance lemmas): PASS");
}

#[test]
fn criterion_9_budget_monotonicity() {
    let base = OracleBudget::default();
    let raised = [
        OracleBudget {
            unfold_depth: base.unfold_depth + 16,
            ..base
        },
        OracleBudget {
            enum_depth: base.enum_depth + 2,
            ..base
        },
        OracleBudget {
            fuel: base.fuel * 10,
            ..base
        },
        OracleBudget {
            unfold_depth: base.unfold_depth + 16,
            enum_depth: base.enum_depth + 2,
            fuel: base.fuel * 10,
            ..base
        },
    ];
    let mut r = common::rng(99);
    use rand::Rng;
    let mut flips = Vec::new();
    let mut sampled = 0;
    while sampled < 200 {
        let ty = common::gen_program(&mut r, 0, 5);
        let m0 = common::gen_program(&mut r, 0, 4);
        let m1 = if r.gen_bool(0.5) {
            m0.clone()
        } else {
            common::gen_program(&mut r, 0, 4)
        };
        let world = World::single(k(0), r.gen_range(0..=3));
        let before = member(&world, &m0, &m1, &ty, 2, &base).tri;
        for bigger in &raised {
            let after = member(&world, &m0, &m1, &ty, 2, bigger).tri;
            match (before, after) {
                (Tri::Yes, Tri::No) | (Tri::No, Tri::Yes) => {
                    flips.push((ty.clone(), m0.clone(), m1.clone(), before, after))
                }
                _ => {}
            }
        }
        sampled += 1;
    }
    assert!(flips.is_empty(), "budget raises flipped answers: {flips:?}");
    println!("criterion 9 (budget monotonicity over 200 sampled queries): PASS");
}

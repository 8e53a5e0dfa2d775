//! Small-step operational semantics of closed programs, fuel-bounded
//! evaluation, bounded Kleene equivalence, and open conversion.

use crate::program::{
    instantiate_clock, subst_last, subst_last3, Program, ScopeViolation,
};

/// Canonical-form predicate. Abstractions, clock abstractions, pairs, the
/// base constants, `succ`, `sup`, and every type former are values.
pub fn is_value(m: &Program) -> bool {
    use Program::*;
    matches!(
        m,
        Lam(_) | KLam(..) | Pair(..) | Ax | Tt | Ff | Ze | Su(_) | Sup(..) | Pi(..) | Sg(..)
            | WTy(..) | Eq(..) | Later(..) | Isect(..) | KProd(..) | Void | Unit | Bool | Nat
            | Univ(_)
    )
}

/// Why a closed program is stuck.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StuckReason {
    /// An eliminator applied to a value of the wrong shape, e.g. `fst tt`.
    BadElim(&'static str),
    /// A free variable in head position; the program was not closed.
    FreeVariable(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Stepped(Program),
    Value,
    Stuck(StuckReason),
}

/// One deterministic step of a closed program.
pub fn step(m: &Program) -> StepResult {
    use Program::*;
    use StepResult::*;
    // congruence helper: step the head, rebuild around it
    macro_rules! cong {
        ($head:expr, $rebuild:expr) => {
            match step($head) {
                Stepped(h) => return Stepped($rebuild(h)),
                Value => {}
                Stuck(r) => return Stuck(r),
            }
        };
    }
    match m {
        Var(i) => Stuck(StuckReason::FreeVariable(*i)),
        App(f, a) => {
            if let Lam(body) = &**f {
                return Stepped(subst_last(body, 0, a));
            }
            cong!(f, |h| Program::app(h, (**a).clone()));
            Stuck(StuckReason::BadElim("application of a non-function value"))
        }
        CApp(f, k) => {
            if let KLam(bound, body) = &**f {
                return Stepped(instantiate_clock(body, *bound, *k));
            }
            cong!(f, |h| Program::capp(h, *k));
            Stuck(StuckReason::BadElim(
                "clock application of a non-clock-function value",
            ))
        }
        Fst(p) => {
            if let Pair(a, _) = &**p {
                return Stepped((**a).clone());
            }
            cong!(p, Program::fst);
            Stuck(StuckReason::BadElim("fst of a non-pair value"))
        }
        Snd(p) => {
            if let Pair(_, b) = &**p {
                return Stepped((**b).clone());
            }
            cong!(p, Program::snd);
            Stuck(StuckReason::BadElim("snd of a non-pair value"))
        }
        If(b, t, f) => {
            match &**b {
                Tt => return Stepped((**t).clone()),
                Ff => return Stepped((**f).clone()),
                _ => {}
            }
            cong!(b, |h| Program::if_(h, (**t).clone(), (**f).clone()));
            Stuck(StuckReason::BadElim("if on a non-boolean value"))
        }
        IfZe(n, z, s) => {
            match &**n {
                Ze => return Stepped((**z).clone()),
                Su(p) => return Stepped(subst_last(s, 0, p)),
                _ => {}
            }
            cong!(n, |h| Program::ifze(h, (**z).clone(), (**s).clone()));
            Stuck(StuckReason::BadElim("ifze on a non-numeral value"))
        }
        WRec(w, o) => {
            if let Sup(label, family) = &**w {
                // the body receives the label, the reified subtree family,
                // and the reified family of recursive results
                let subtrees = Program::lam((**family).clone());
                let rec = Program::lam(Program::wrec(
                    (**family).clone(),
                    o.shift_levels(0, 1),
                ));
                return Stepped(subst_last3(o, 0, [label, &subtrees, &rec]));
            }
            cong!(w, |h| Program::wrec(h, (**o).clone()));
            Stuck(StuckReason::BadElim("wrec on a non-sup value"))
        }
        Fix(body) => Stepped(subst_last(body, 0, m)),
        _ if is_value(m) => Value,
        _ => unreachable!("all non-value closed forms handled"),
    }
}

/// Outcome of fuel-bounded evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalOutcome {
    /// Reached a value in `steps` steps.
    Val(Program, u64),
    /// Fuel ran out; carries the residual program.
    OutOfFuel(Program),
    Stuck(Program),
}

impl EvalOutcome {
    pub fn value(&self) -> Option<&Program> {
        match self {
            EvalOutcome::Val(v, _) => Some(v),
            _ => None,
        }
    }
}

/// Iterate [`step`] up to `fuel` times. Errors on non-closed input.
pub fn eval(m: &Program, fuel: u64) -> Result<EvalOutcome, ScopeViolation> {
    m.validate(0)?;
    Ok(eval_unchecked(m, fuel))
}

pub fn eval_unchecked(m: &Program, fuel: u64) -> EvalOutcome {
    let mut cur = m.clone();
    let mut steps = 0u64;
    loop {
        match step(&cur) {
            StepResult::Value => return EvalOutcome::Val(cur, steps),
            StepResult::Stuck(_) => return EvalOutcome::Stuck(cur),
            StepResult::Stepped(next) => {
                if steps >= fuel {
                    return EvalOutcome::OutOfFuel(cur);
                }
                cur = next;
                steps += 1;
            }
        }
    }
}

/// The evaluation trace `m = t_0 -> t_1 -> ...`, cut off at `fuel` steps.
pub fn trace(m: &Program, fuel: u64) -> Vec<Program> {
    let mut out = vec![m.clone()];
    let mut cur = m.clone();
    for _ in 0..fuel {
        match step(&cur) {
            StepResult::Stepped(next) => {
                out.push(next.clone());
                cur = next;
            }
            _ => break,
        }
    }
    out
}

/// Three-valued answer of a bounded query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

/// Bounded Kleene equivalence of closed programs. Evaluation is
/// deterministic, so two programs are Kleene equivalent exactly when they
/// evaluate to alpha-equal values, or neither ever reaches a value.
pub fn closed_sq_bounded(m0: &Program, m1: &Program, fuel: u64) -> Tri {
    let o0 = eval_unchecked(m0, fuel);
    let o1 = eval_unchecked(m1, fuel);
    use EvalOutcome::*;
    match (o0, o1) {
        (Val(v0, _), Val(v1, _)) => {
            if v0.alpha_eq(&v1) {
                Tri::Yes
            } else {
                Tri::No
            }
        }
        (OutOfFuel(_), _) | (_, OutOfFuel(_)) => Tri::Unknown,
        (Stuck(_), Stuck(_)) => Tri::Yes,
        (Stuck(_), Val(..)) | (Val(..), Stuck(_)) => Tri::No,
    }
}

/// One symbolic weak-head step of an open program: head redexes contract as
/// in the closed semantics (contractions commute with substitution), and a
/// variable in head position blocks reduction. `None` means the program is
/// weak-head normal (a value or a neutral).
pub fn step_open(m: &Program, scope: usize) -> Option<Program> {
    use Program::*;
    match m {
        App(f, a) => match &**f {
            Lam(body) => Some(subst_last(body, scope, a)),
            _ => step_open(f, scope).map(|h| Program::app(h, (**a).clone())),
        },
        CApp(f, k) => match &**f {
            KLam(bound, body) => Some(instantiate_clock(body, *bound, *k)),
            _ => step_open(f, scope).map(|h| Program::capp(h, *k)),
        },
        Fst(p) => match &**p {
            Pair(a, _) => Some((**a).clone()),
            _ => step_open(p, scope).map(Program::fst),
        },
        Snd(p) => match &**p {
            Pair(_, b) => Some((**b).clone()),
            _ => step_open(p, scope).map(Program::snd),
        },
        If(b, t, f) => match &**b {
            Tt => Some((**t).clone()),
            Ff => Some((**f).clone()),
            _ => step_open(b, scope).map(|h| Program::if_(h, (**t).clone(), (**f).clone())),
        },
        IfZe(n, z, s) => match &**n {
            Ze => Some((**z).clone()),
            Su(p) => Some(subst_last(s, scope, p)),
            _ => step_open(n, scope).map(|h| Program::ifze(h, (**z).clone(), (**s).clone())),
        },
        WRec(w, o) => match &**w {
            Sup(label, family) => {
                let subtrees = Program::lam((**family).clone());
                let rec = Program::lam(Program::wrec(
                    (**family).clone(),
                    o.shift_levels(scope, 1),
                ));
                Some(subst_last3(o, scope, [label, &subtrees, &rec]))
            }
            _ => step_open(w, scope).map(|h| Program::wrec(h, (**o).clone())),
        },
        Fix(body) => Some(subst_last(body, scope, m)),
        _ => None,
    }
}

/// Weak-head reduce an open program symbolically. Returns the reduct and
/// whether a weak-head normal form was reached within the budget.
pub fn whnf_open(m: &Program, scope: usize, budget: &mut u64) -> (Program, bool) {
    let mut cur = m.clone();
    loop {
        match step_open(&cur, scope) {
            None => return (cur, true),
            Some(next) => {
                if *budget == 0 {
                    return (cur, false);
                }
                *budget -= 1;
                cur = next;
            }
        }
    }
}

/// Does `from` reach a program alpha-equal to `to` by symbolic weak-head
/// steps within `fuel`?
pub fn open_reaches(scope: usize, from: &Program, to: &Program, fuel: u64) -> bool {
    let mut cur = from.clone();
    for _ in 0..=fuel {
        if cur.alpha_eq(to) {
            return true;
        }
        match step_open(&cur, scope) {
            Some(next) => cur = next,
            None => return false,
        }
    }
    false
}

/// Open conversion: a sound, deliberately incomplete check that two open
/// programs are convertible. Symbolic weak-head reduction plus structural
/// congruence on subterms; variable-headed terms are neutral. Never answers
/// `No`.
pub fn open_conv(scope: usize, m0: &Program, m1: &Program, fuel: u64) -> Tri {
    let mut budget = fuel;
    if conv(scope, m0, m1, &mut budget) {
        Tri::Yes
    } else {
        Tri::Unknown
    }
}

fn conv(scope: usize, m0: &Program, m1: &Program, budget: &mut u64) -> bool {
    use Program::*;
    if m0.alpha_eq(m1) {
        return true;
    }
    if *budget == 0 {
        return false;
    }
    *budget = budget.saturating_sub(1);
    let (w0, done0) = whnf_open(m0, scope, budget);
    let (w1, done1) = whnf_open(m1, scope, budget);
    if w0.alpha_eq(&w1) {
        return true;
    }
    if !done0 || !done1 {
        return false;
    }
    // structural congruence; clock binders are compared at a common fresh name
    let fresh_pair = |k0: crate::program::ClockName,
                      b0: &Program,
                      k1: crate::program::ClockName,
                      b1: &Program| {
        let mut avoid = b0.all_clocks();
        avoid.extend(b1.all_clocks());
        let f = crate::program::fresh_clock(&avoid);
        (
            instantiate_clock(b0, k0, f),
            instantiate_clock(b1, k1, f),
        )
    };
    match (&w0, &w1) {
        (Lam(b0), Lam(b1)) | (Fix(b0), Fix(b1)) => conv(scope + 1, b0, b1, budget),
        (KLam(k0, b0), KLam(k1, b1))
        | (Isect(k0, b0), Isect(k1, b1))
        | (KProd(k0, b0), KProd(k1, b1)) => {
            let (b0, b1) = fresh_pair(*k0, b0, *k1, b1);
            conv(scope, &b0, &b1, budget)
        }
        (Later(k0, a0), Later(k1, a1)) => k0 == k1 && conv(scope, a0, a1, budget),
        (CApp(f0, k0), CApp(f1, k1)) => k0 == k1 && conv(scope, f0, f1, budget),
        (App(f0, a0), App(f1, a1)) | (Pair(f0, a0), Pair(f1, a1)) => {
            conv(scope, f0, f1, budget) && conv(scope, a0, a1, budget)
        }
        (Sup(a0, b0), Sup(a1, b1)) => {
            conv(scope, a0, a1, budget) && conv(scope + 1, b0, b1, budget)
        }
        (WRec(a0, b0), WRec(a1, b1)) => {
            conv(scope, a0, a1, budget) && conv(scope + 3, b0, b1, budget)
        }
        (Pi(a0, b0), Pi(a1, b1)) | (Sg(a0, b0), Sg(a1, b1)) | (WTy(a0, b0), WTy(a1, b1)) => {
            conv(scope, a0, a1, budget) && conv(scope + 1, b0, b1, budget)
        }
        (Eq(a0, m0, n0), Eq(a1, m1, n1)) => {
            conv(scope, a0, a1, budget)
                && conv(scope, m0, m1, budget)
                && conv(scope, n0, n1, budget)
        }
        (Fst(a0), Fst(a1)) | (Snd(a0), Snd(a1)) | (Su(a0), Su(a1)) => conv(scope, a0, a1, budget),
        (If(a0, b0, c0), If(a1, b1, c1)) | (IfZe(a0, b0, c0), IfZe(a1, b1, c1)) => {
            // scrutinees are neutral here
            let extra = if matches!(w0, IfZe(..)) { 1 } else { 0 };
            conv(scope, a0, a1, budget)
                && conv(scope, b0, b1, budget)
                && conv(scope + extra, c0, c1, budget)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::ClockName;
    use Program::*;

    fn ones() -> Program {
        Program::fix(Program::pair(Tt, Var(0)))
    }

    #[test]
    fn beta_steps() {
        let m = Program::app(Program::lam(Var(0)), Tt);
        assert_eq!(step(&m), StepResult::Stepped(Tt));
    }

    #[test]
    fn fix_unfolds() {
        let m = ones();
        assert_eq!(
            step(&m),
            StepResult::Stepped(Program::pair(Tt, ones()))
        );
    }

    #[test]
    fn fst_of_tt_is_stuck() {
        assert!(matches!(step(&Program::fst(Tt)), StepResult::Stuck(_)));
    }

    #[test]
    fn values_do_not_step() {
        for v in [
            Tt,
            Program::lam(Var(0)),
            Program::klam(ClockName(0), Tt),
            Program::later(ClockName(0), Bool),
            Program::sup(Tt, Var(0)),
            Univ(3),
        ] {
            assert!(is_value(&v));
            assert_eq!(step(&v), StepResult::Value);
        }
    }

    #[test]
    fn eval_fst_ones() {
        // by hand: fst (fix x.<tt,x>) -> fst <tt, ones> -> tt, two steps
        let m = Program::fst(ones());
        assert_eq!(eval(&m, 10).unwrap(), EvalOutcome::Val(Tt, 2));
        let tr = trace(&m, 10);
        assert_eq!(tr.len(), 3);
        assert_eq!(tr[2], Tt);
    }

    #[test]
    fn eval_value_needs_no_fuel() {
        assert_eq!(eval(&Tt, 0).unwrap(), EvalOutcome::Val(Tt, 0));
    }

    #[test]
    fn eval_divergent_runs_out() {
        let m = Program::fix(Var(0));
        assert!(matches!(
            eval(&m, 100).unwrap(),
            EvalOutcome::OutOfFuel(_)
        ));
    }

    #[test]
    fn eval_rejects_open_terms() {
        assert!(eval(&Var(0), 5).is_err());
    }

    #[test]
    fn wrec_contracts_on_sup() {
        // wrec(sup(tt; b. zero); x y z. x) -> tt
        let m = Program::wrec(Program::sup(Tt, Ze), Var(0));
        assert_eq!(eval(&m, 10).unwrap().value(), Some(&Tt));
        // and the recursive-results binder runs the recursion one level down:
        // wrec(sup(tt; b. zero); x y z. z tt) computes wrec on the subtree at index tt
        let m = Program::wrec(
            Program::sup(Tt, Ze),
            Program::app(Var(2), Tt),
        );
        // subtree family is constant zero, so the inner wrec is stuck on ze
        assert!(matches!(eval(&m, 20).unwrap(), EvalOutcome::Stuck(_)));
    }

    #[test]
    fn kleene_examples() {
        assert_eq!(closed_sq_bounded(&Program::fst(ones()), &Tt, 10), Tri::Yes);
        assert_eq!(closed_sq_bounded(&Tt, &Ff, 10), Tri::No);
        assert_eq!(
            closed_sq_bounded(&Program::fix(Var(0)), &Tt, 50),
            Tri::Unknown
        );
        // two stuck programs reach no value at all, hence are equivalent
        assert_eq!(
            closed_sq_bounded(&Program::fst(Tt), &Program::snd(Ff), 10),
            Tri::Yes
        );
    }

    #[test]
    fn open_conv_beta_on_open_term() {
        let m0 = Program::app(Program::lam(Var(0)), Var(0));
        assert_eq!(open_conv(1, &m0, &Var(0), 5), Tri::Yes);
    }

    #[test]
    fn open_conv_neutral_vs_value() {
        assert_eq!(open_conv(1, &Var(0), &Tt, 5), Tri::Unknown);
    }

    #[test]
    fn open_conv_stream_unfolding() {
        // Stream applied to a clock is convertible with its one-step pair unfolding
        let k = ClockName(0);
        let stream_body = Program::fix(Program::sg(Bool, Program::later(k, Var(0))));
        let stream = Program::klam(k, stream_body.clone());
        let lhs = Program::capp(stream.clone(), k);
        // the closed stream program sits under the pair-type binder, so its
        // internal binder levels move up by one
        let rhs = Program::sg(
            Bool,
            Program::later(k, Program::capp(stream.shift_levels(0, 1), k)),
        );
        assert_eq!(open_conv(0, &lhs, &rhs, 50), Tri::Yes);
    }
}

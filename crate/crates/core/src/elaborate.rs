//! Elaboration of formal terms and contexts into programs and telescopes,
//! under an assignment of semantic clock names to the clock context.

use std::collections::BTreeSet;

use crate::program::{ClockName, Program};
use crate::syntax::{scope_check, FormalTerm, ScopeError};

/// Ordered assignment of clock names to the clock context. Values need not
/// be distinct: clock contraction is allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClockEnv {
    entries: Vec<(String, ClockName)>,
}

impl ClockEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: Vec<(String, ClockName)>) -> Self {
        ClockEnv { entries: pairs }
    }

    pub fn push(&mut self, var: &str, name: ClockName) {
        self.entries.push((var.to_owned(), name));
    }

    pub fn lookup(&self, var: &str) -> Option<ClockName> {
        self.entries
            .iter()
            .rev()
            .find(|(v, _)| v == var)
            .map(|(_, n)| *n)
    }

    pub fn domain(&self) -> Vec<String> {
        self.entries.iter().map(|(v, _)| v.clone()).collect()
    }

    pub fn range(&self) -> BTreeSet<ClockName> {
        self.entries.iter().map(|(_, n)| *n).collect()
    }
}

/// A list of programs where the `i`-th lives in scope `i`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Telescope {
    entries: Vec<Program>,
}

impl Telescope {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Program] {
        &self.entries
    }

    pub fn push(&mut self, ty: Program) -> Result<(), crate::program::ScopeViolation> {
        ty.validate(self.entries.len())?;
        self.entries.push(ty);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ElabError {
    #[error("scope error: {0}")]
    Scope(#[from] ScopeError),
    #[error("clock environment does not cover `{0}`")]
    MissingClock(String),
    #[error("clock environment domain {env:?} does not match clock context {ctx:?}")]
    EnvMismatch { env: Vec<String>, ctx: Vec<String> },
}

/// Deterministic supply of fresh clock names, seeded per elaboration call so
/// output is reproducible run-to-run.
struct ClockSupply {
    next: u32,
}

impl ClockSupply {
    fn seeded_from(env: &ClockEnv) -> Self {
        let next = env.range().iter().map(|c| c.0 + 1).max().unwrap_or(0);
        ClockSupply { next }
    }

    fn fresh(&mut self) -> ClockName {
        let k = ClockName(self.next);
        self.next += 1;
        k
    }
}

/// Elaborate a formal term in clock context `clocks` and variable context
/// `vars` to a program in scope `vars.len()`, under `rho`.
pub fn elab_term(
    clocks: &[String],
    vars: &[String],
    term: &FormalTerm,
    rho: &ClockEnv,
) -> Result<Program, ElabError> {
    scope_check(term, clocks, vars)?;
    if rho.domain() != clocks {
        return Err(ElabError::EnvMismatch {
            env: rho.domain(),
            ctx: clocks.to_vec(),
        });
    }
    let mut supply = ClockSupply::seeded_from(rho);
    let mut rho = rho.clone();
    let mut vars = vars.to_vec();
    Ok(go(term, &mut rho, &mut vars, &mut supply))
}

fn go(
    term: &FormalTerm,
    rho: &mut ClockEnv,
    vars: &mut Vec<String>,
    supply: &mut ClockSupply,
) -> Program {
    use FormalTerm as F;
    match term {
        F::Var(x) => {
            // the innermost binding wins under shadowing
            let level = vars
                .iter()
                .rposition(|v| v == x)
                .expect("scope-checked variable");
            Program::Var(level)
        }
        F::Lam(x, b) => {
            vars.push(x.clone());
            let body = go(b, rho, vars, supply);
            vars.pop();
            Program::lam(body)
        }
        F::Fix(x, b) => {
            vars.push(x.clone());
            let body = go(b, rho, vars, supply);
            vars.pop();
            Program::fix(body)
        }
        F::ClkLam(k, b) => {
            let kappa = supply.fresh();
            rho.push(k, kappa);
            let body = go(b, rho, vars, supply);
            rho.entries.pop();
            Program::klam(kappa, body)
        }
        F::KProd(k, b) => {
            let kappa = supply.fresh();
            rho.push(k, kappa);
            let body = go(b, rho, vars, supply);
            rho.entries.pop();
            Program::kprod(kappa, body)
        }
        F::Isect(k, b) => {
            let kappa = supply.fresh();
            rho.push(k, kappa);
            let body = go(b, rho, vars, supply);
            rho.entries.pop();
            Program::isect(kappa, body)
        }
        F::Later(k, a) => {
            let kappa = rho.lookup(k).expect("scope-checked clock");
            Program::later(kappa, go(a, rho, vars, supply))
        }
        F::ClkApp(f, k) => {
            let kappa = rho.lookup(k).expect("scope-checked clock");
            Program::capp(go(f, rho, vars, supply), kappa)
        }
        F::App(f, a) => Program::app(go(f, rho, vars, supply), go(a, rho, vars, supply)),
        F::Pair(a, b) => Program::pair(go(a, rho, vars, supply), go(b, rho, vars, supply)),
        F::Fst(a) => Program::fst(go(a, rho, vars, supply)),
        F::Snd(a) => Program::snd(go(a, rho, vars, supply)),
        F::Ax => Program::Ax,
        F::Tt => Program::Tt,
        F::Ff => Program::Ff,
        F::If(b, t, f) => Program::if_(
            go(b, rho, vars, supply),
            go(t, rho, vars, supply),
            go(f, rho, vars, supply),
        ),
        F::Ze => Program::Ze,
        F::Su(a) => Program::su(go(a, rho, vars, supply)),
        F::IfZe(n, z, x, s) => {
            let n = go(n, rho, vars, supply);
            let z = go(z, rho, vars, supply);
            vars.push(x.clone());
            let s = go(s, rho, vars, supply);
            vars.pop();
            Program::ifze(n, z, s)
        }
        F::Sup(m, x, n) => {
            let m = go(m, rho, vars, supply);
            vars.push(x.clone());
            let n = go(n, rho, vars, supply);
            vars.pop();
            Program::sup(m, n)
        }
        F::WRec(m, x, y, z, o) => {
            let m = go(m, rho, vars, supply);
            vars.push(x.clone());
            vars.push(y.clone());
            vars.push(z.clone());
            let o = go(o, rho, vars, supply);
            vars.pop();
            vars.pop();
            vars.pop();
            Program::wrec(m, o)
        }
        F::Pi(x, a, b) => {
            let a = go(a, rho, vars, supply);
            vars.push(x.clone());
            let b = go(b, rho, vars, supply);
            vars.pop();
            Program::pi(a, b)
        }
        F::Sg(x, a, b) => {
            let a = go(a, rho, vars, supply);
            vars.push(x.clone());
            let b = go(b, rho, vars, supply);
            vars.pop();
            Program::sg(a, b)
        }
        F::WTy(x, a, b) => {
            let a = go(a, rho, vars, supply);
            vars.push(x.clone());
            let b = go(b, rho, vars, supply);
            vars.pop();
            Program::wty(a, b)
        }
        F::Eq(a, m, n) => Program::eq(
            go(a, rho, vars, supply),
            go(m, rho, vars, supply),
            go(n, rho, vars, supply),
        ),
        F::Void => Program::Void,
        F::Unit => Program::Unit,
        F::Bool => Program::Bool,
        F::Nat => Program::Nat,
        F::Univ(i) => Program::Univ(*i),
    }
}

/// Elaborate a typing context pointwise into a telescope, with growing
/// variable scope.
pub fn elab_ctx(
    clocks: &[String],
    hyps: &[(String, FormalTerm)],
    rho: &ClockEnv,
) -> Result<Telescope, ElabError> {
    let mut tele = Telescope::new();
    let mut vars: Vec<String> = Vec::new();
    for (x, a) in hyps {
        let ty = elab_term(clocks, &vars, a, rho)?;
        tele.push(ty).expect("elaboration preserves scope");
        vars.push(x.clone());
    }
    Ok(tele)
}

/// A canonical clock environment for a clock context: distinct fresh names
/// `k0, k1, ...` in context order.
pub fn canonical_env(clocks: &[String]) -> ClockEnv {
    ClockEnv::from_pairs(
        clocks
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), ClockName(i as u32)))
            .collect(),
    )
}

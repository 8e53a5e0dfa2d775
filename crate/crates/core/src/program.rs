//! The internal language: well-scoped programs with de Bruijn term variables
//! and semantic clock names.
//!
//! Term variables are de Bruijn *levels*: in a program of scope `n`, the free
//! variables are `var 0 .. var (n-1)` and a binder entering scope `n`
//! introduces `var n`. Levels are absolute, so weakening is a no-op on the
//! representation and substitution never shifts the substituted programs.
//! Clock binders are nominal: a binder carries a [`ClockName`] atom and
//! instantiation renames it capture-avoidingly.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// An abstract clock name. Equality is decidable; freshness is by choosing an
/// atom outside a given avoid-set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClockName(pub u32);

impl fmt::Display for ClockName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k{}", self.0)
    }
}

/// A clock name not in `avoid`.
pub fn fresh_clock(avoid: &BTreeSet<ClockName>) -> ClockName {
    let next = avoid.iter().map(|c| c.0 + 1).max().unwrap_or(0);
    ClockName(next)
}

/// Programs over `n` free variables. The scope `n` is not stored; use
/// [`Program::validate`] to check a program against an expected scope.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Program {
    Var(usize),
    /// Term abstraction; the body lives in scope `n + 1`.
    Lam(Box<Program>),
    /// Clock abstraction, binding a clock name in the body.
    KLam(ClockName, Box<Program>),
    App(Box<Program>, Box<Program>),
    /// Application of a program to a clock name.
    CApp(Box<Program>, ClockName),
    /// Fixed point; the body lives in scope `n + 1`.
    Fix(Box<Program>),
    Pair(Box<Program>, Box<Program>),
    Fst(Box<Program>),
    Snd(Box<Program>),
    /// The trivial element of the unit type.
    Ax,
    Tt,
    Ff,
    Ze,
    Su(Box<Program>),
    If(Box<Program>, Box<Program>, Box<Program>),
    /// Case split on a natural: scrutinee, zero case, successor case
    /// (binding the predecessor, scope `n + 1`).
    IfZe(Box<Program>, Box<Program>, Box<Program>),
    /// Tree constructor: label, and subtree family over `n + 1`.
    Sup(Box<Program>, Box<Program>),
    /// Tree recursor: scrutinee, and a body over `n + 3` binding the label,
    /// the reified subtree family, and the reified recursive-results family.
    WRec(Box<Program>, Box<Program>),
    Pi(Box<Program>, Box<Program>),
    Sg(Box<Program>, Box<Program>),
    WTy(Box<Program>, Box<Program>),
    Eq(Box<Program>, Box<Program>, Box<Program>),
    Later(ClockName, Box<Program>),
    Isect(ClockName, Box<Program>),
    KProd(ClockName, Box<Program>),
    Void,
    Unit,
    Bool,
    Nat,
    Univ(u32),
}

/// Scope violation found by [`Program::validate`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("variable {level} out of scope {scope}")]
pub struct ScopeViolation {
    pub level: usize,
    pub scope: usize,
}

use Program::*;

impl Program {
    pub fn lam(body: Program) -> Program {
        Lam(Box::new(body))
    }
    pub fn klam(k: ClockName, body: Program) -> Program {
        KLam(k, Box::new(body))
    }
    pub fn app(f: Program, a: Program) -> Program {
        App(Box::new(f), Box::new(a))
    }
    pub fn capp(f: Program, k: ClockName) -> Program {
        CApp(Box::new(f), k)
    }
    pub fn fix(body: Program) -> Program {
        Fix(Box::new(body))
    }
    pub fn pair(a: Program, b: Program) -> Program {
        Pair(Box::new(a), Box::new(b))
    }
    pub fn fst(a: Program) -> Program {
        Fst(Box::new(a))
    }
    pub fn snd(a: Program) -> Program {
        Snd(Box::new(a))
    }
    pub fn su(a: Program) -> Program {
        Su(Box::new(a))
    }
    pub fn if_(b: Program, t: Program, f: Program) -> Program {
        If(Box::new(b), Box::new(t), Box::new(f))
    }
    pub fn ifze(n: Program, z: Program, s: Program) -> Program {
        IfZe(Box::new(n), Box::new(z), Box::new(s))
    }
    pub fn sup(m: Program, n: Program) -> Program {
        Sup(Box::new(m), Box::new(n))
    }
    pub fn wrec(m: Program, o: Program) -> Program {
        WRec(Box::new(m), Box::new(o))
    }
    pub fn pi(a: Program, b: Program) -> Program {
        Pi(Box::new(a), Box::new(b))
    }
    pub fn sg(a: Program, b: Program) -> Program {
        Sg(Box::new(a), Box::new(b))
    }
    pub fn wty(a: Program, b: Program) -> Program {
        WTy(Box::new(a), Box::new(b))
    }
    pub fn eq(a: Program, m: Program, n: Program) -> Program {
        Eq(Box::new(a), Box::new(m), Box::new(n))
    }
    pub fn later(k: ClockName, a: Program) -> Program {
        Later(k, Box::new(a))
    }
    pub fn isect(k: ClockName, a: Program) -> Program {
        Isect(k, Box::new(a))
    }
    pub fn kprod(k: ClockName, a: Program) -> Program {
        KProd(k, Box::new(a))
    }

    /// Numeral helper.
    pub fn numeral(n: u32) -> Program {
        let mut p = Ze;
        for _ in 0..n {
            p = Program::su(p);
        }
        p
    }

    /// Check the program is well-scoped in scope `n`.
    pub fn validate(&self, scope: usize) -> Result<(), ScopeViolation> {
        match self {
            Var(l) => {
                if *l < scope {
                    Ok(())
                } else {
                    Err(ScopeViolation { level: *l, scope })
                }
            }
            Lam(b) | Fix(b) => b.validate(scope + 1),
            KLam(_, b) | Later(_, b) | Isect(_, b) | KProd(_, b) => b.validate(scope),
            App(f, a) => f.validate(scope).and_then(|_| a.validate(scope)),
            CApp(f, _) => f.validate(scope),
            Pair(a, b) => a.validate(scope).and_then(|_| b.validate(scope)),
            Fst(a) | Snd(a) | Su(a) => a.validate(scope),
            If(b, t, f) => b
                .validate(scope)
                .and_then(|_| t.validate(scope))
                .and_then(|_| f.validate(scope)),
            IfZe(n, z, s) => n
                .validate(scope)
                .and_then(|_| z.validate(scope))
                .and_then(|_| s.validate(scope + 1)),
            Sup(m, n) => m.validate(scope).and_then(|_| n.validate(scope + 1)),
            WRec(m, o) => m.validate(scope).and_then(|_| o.validate(scope + 3)),
            Pi(a, b) | Sg(a, b) | WTy(a, b) => {
                a.validate(scope).and_then(|_| b.validate(scope + 1))
            }
            Eq(a, m, n) => a
                .validate(scope)
                .and_then(|_| m.validate(scope))
                .and_then(|_| n.validate(scope)),
            Ax | Tt | Ff | Ze | Void | Unit | Bool | Nat | Univ(_) => Ok(()),
        }
    }

    /// Map a function over every variable level. The callback also receives
    /// the number of binders passed on the way to the occurrence, which a
    /// substitution needs to renumber the internal binders of whatever it
    /// inserts there.
    fn map_vars(&self, depth: usize, f: &impl Fn(usize, usize) -> Program) -> Program {
        match self {
            Var(l) => f(*l, depth),
            Lam(b) => Program::lam(b.map_vars(depth + 1, f)),
            KLam(k, b) => Program::klam(*k, b.map_vars(depth, f)),
            App(g, a) => Program::app(g.map_vars(depth, f), a.map_vars(depth, f)),
            CApp(g, k) => Program::capp(g.map_vars(depth, f), *k),
            Fix(b) => Program::fix(b.map_vars(depth + 1, f)),
            Pair(a, b) => Program::pair(a.map_vars(depth, f), b.map_vars(depth, f)),
            Fst(a) => Program::fst(a.map_vars(depth, f)),
            Snd(a) => Program::snd(a.map_vars(depth, f)),
            Su(a) => Program::su(a.map_vars(depth, f)),
            If(b, t, e) => Program::if_(
                b.map_vars(depth, f),
                t.map_vars(depth, f),
                e.map_vars(depth, f),
            ),
            IfZe(n, z, s) => Program::ifze(
                n.map_vars(depth, f),
                z.map_vars(depth, f),
                s.map_vars(depth + 1, f),
            ),
            Sup(m, n) => Program::sup(m.map_vars(depth, f), n.map_vars(depth + 1, f)),
            WRec(m, o) => Program::wrec(m.map_vars(depth, f), o.map_vars(depth + 3, f)),
            Pi(a, b) => Program::pi(a.map_vars(depth, f), b.map_vars(depth + 1, f)),
            Sg(a, b) => Program::sg(a.map_vars(depth, f), b.map_vars(depth + 1, f)),
            WTy(a, b) => Program::wty(a.map_vars(depth, f), b.map_vars(depth + 1, f)),
            Eq(a, m, n) => Program::eq(
                a.map_vars(depth, f),
                m.map_vars(depth, f),
                n.map_vars(depth, f),
            ),
            Later(k, a) => Program::later(*k, a.map_vars(depth, f)),
            Isect(k, a) => Program::isect(*k, a.map_vars(depth, f)),
            KProd(k, a) => Program::kprod(*k, a.map_vars(depth, f)),
            Ax | Tt | Ff | Ze | Void | Unit | Bool | Nat | Univ(_) => self.clone(),
        }
    }

    /// Shift every level `>= from` up by `by`, turning a program of scope `s`
    /// (with `from <= s`) into one of scope `s + by`.
    pub fn shift_levels(&self, from: usize, by: usize) -> Program {
        if by == 0 {
            return self.clone();
        }
        self.map_vars(0, &|l, _| if l >= from { Var(l + by) } else { Var(l) })
    }

    /// Free clock names.
    pub fn free_clocks(&self) -> BTreeSet<ClockName> {
        fn go(p: &Program, bound: &mut Vec<ClockName>, acc: &mut BTreeSet<ClockName>) {
            match p {
                KLam(k, b) | Isect(k, b) | KProd(k, b) => {
                    bound.push(*k);
                    go(b, bound, acc);
                    bound.pop();
                }
                Later(k, a) => {
                    if !bound.contains(k) {
                        acc.insert(*k);
                    }
                    go(a, bound, acc);
                }
                CApp(f, k) => {
                    if !bound.contains(k) {
                        acc.insert(*k);
                    }
                    go(f, bound, acc);
                }
                Lam(b) | Fix(b) | Fst(b) | Snd(b) | Su(b) => go(b, bound, acc),
                App(a, b) | Pair(a, b) | Sup(a, b) | WRec(a, b) | Pi(a, b) | Sg(a, b)
                | WTy(a, b) => {
                    go(a, bound, acc);
                    go(b, bound, acc);
                }
                If(a, b, c) | IfZe(a, b, c) | Eq(a, b, c) => {
                    go(a, bound, acc);
                    go(b, bound, acc);
                    go(c, bound, acc);
                }
                Var(_) | Ax | Tt | Ff | Ze | Void | Unit | Bool | Nat | Univ(_) => {}
            }
        }
        let mut acc = BTreeSet::new();
        go(self, &mut Vec::new(), &mut acc);
        acc
    }

    /// All clock names occurring anywhere, bound or free.
    pub fn all_clocks(&self) -> BTreeSet<ClockName> {
        fn go(p: &Program, acc: &mut BTreeSet<ClockName>) {
            match p {
                KLam(k, b) | Isect(k, b) | KProd(k, b) | Later(k, b) => {
                    acc.insert(*k);
                    go(b, acc);
                }
                CApp(f, k) => {
                    acc.insert(*k);
                    go(f, acc);
                }
                Lam(b) | Fix(b) | Fst(b) | Snd(b) | Su(b) => go(b, acc),
                App(a, b) | Pair(a, b) | Sup(a, b) | WRec(a, b) | Pi(a, b) | Sg(a, b)
                | WTy(a, b) => {
                    go(a, acc);
                    go(b, acc);
                }
                If(a, b, c) | IfZe(a, b, c) | Eq(a, b, c) => {
                    go(a, acc);
                    go(b, acc);
                    go(c, acc);
                }
                Var(_) | Ax | Tt | Ff | Ze | Void | Unit | Bool | Nat | Univ(_) => {}
            }
        }
        let mut acc = BTreeSet::new();
        go(self, &mut acc);
        acc
    }

    /// Rename free occurrences of clock `from` to `to`, capture-avoiding:
    /// binders that bind `to` are freshened first.
    pub fn rename_clock(&self, from: ClockName, to: ClockName) -> Program {
        if from == to {
            return self.clone();
        }
        match self {
            KLam(k, b) | Isect(k, b) | KProd(k, b) => {
                let rebuild = |k, b: Program| match self {
                    KLam(..) => Program::klam(k, b),
                    Isect(..) => Program::isect(k, b),
                    _ => Program::kprod(k, b),
                };
                if *k == from {
                    self.clone()
                } else if *k == to {
                    let mut avoid = b.all_clocks();
                    avoid.insert(from);
                    avoid.insert(to);
                    let fresh = fresh_clock(&avoid);
                    let body = b.rename_clock(*k, fresh).rename_clock(from, to);
                    rebuild(fresh, body)
                } else {
                    rebuild(*k, b.rename_clock(from, to))
                }
            }
            Later(k, a) => {
                let k = if *k == from { to } else { *k };
                Program::later(k, a.rename_clock(from, to))
            }
            CApp(f, k) => {
                let k = if *k == from { to } else { *k };
                Program::capp(f.rename_clock(from, to), k)
            }
            Var(_) | Ax | Tt | Ff | Ze | Void | Unit | Bool | Nat | Univ(_) => self.clone(),
            Lam(b) => Program::lam(b.rename_clock(from, to)),
            Fix(b) => Program::fix(b.rename_clock(from, to)),
            App(f, a) => Program::app(f.rename_clock(from, to), a.rename_clock(from, to)),
            Pair(a, b) => Program::pair(a.rename_clock(from, to), b.rename_clock(from, to)),
            Fst(a) => Program::fst(a.rename_clock(from, to)),
            Snd(a) => Program::snd(a.rename_clock(from, to)),
            Su(a) => Program::su(a.rename_clock(from, to)),
            If(b, t, e) => Program::if_(
                b.rename_clock(from, to),
                t.rename_clock(from, to),
                e.rename_clock(from, to),
            ),
            IfZe(n, z, s) => Program::ifze(
                n.rename_clock(from, to),
                z.rename_clock(from, to),
                s.rename_clock(from, to),
            ),
            Sup(m, n) => Program::sup(m.rename_clock(from, to), n.rename_clock(from, to)),
            WRec(m, o) => Program::wrec(m.rename_clock(from, to), o.rename_clock(from, to)),
            Pi(a, b) => Program::pi(a.rename_clock(from, to), b.rename_clock(from, to)),
            Sg(a, b) => Program::sg(a.rename_clock(from, to), b.rename_clock(from, to)),
            WTy(a, b) => Program::wty(a.rename_clock(from, to), b.rename_clock(from, to)),
            Eq(a, m, n) => Program::eq(
                a.rename_clock(from, to),
                m.rename_clock(from, to),
                n.rename_clock(from, to),
            ),
        }
    }

    /// Alpha equality: term variables are levels (syntactic), clock binders
    /// compare up to consistent renaming.
    pub fn alpha_eq(&self, other: &Program) -> bool {
        fn go(a: &Program, b: &Program, env: &mut Vec<(ClockName, ClockName)>) -> bool {
            let clk_eq = |k0: &ClockName, k1: &ClockName, env: &Vec<(ClockName, ClockName)>| {
                for (l, r) in env.iter().rev() {
                    if l == k0 || r == k1 {
                        return l == k0 && r == k1;
                    }
                }
                k0 == k1
            };
            match (a, b) {
                (Var(i), Var(j)) => i == j,
                (Lam(x), Lam(y)) | (Fix(x), Fix(y)) | (Fst(x), Fst(y)) | (Snd(x), Snd(y))
                | (Su(x), Su(y)) => go(x, y, env),
                (KLam(k0, x), KLam(k1, y))
                | (Isect(k0, x), Isect(k1, y))
                | (KProd(k0, x), KProd(k1, y)) => {
                    env.push((*k0, *k1));
                    let r = go(x, y, env);
                    env.pop();
                    r
                }
                (Later(k0, x), Later(k1, y)) => clk_eq(k0, k1, env) && go(x, y, env),
                (CApp(x, k0), CApp(y, k1)) => clk_eq(k0, k1, env) && go(x, y, env),
                (App(x0, x1), App(y0, y1))
                | (Pair(x0, x1), Pair(y0, y1))
                | (Sup(x0, x1), Sup(y0, y1))
                | (WRec(x0, x1), WRec(y0, y1))
                | (Pi(x0, x1), Pi(y0, y1))
                | (Sg(x0, x1), Sg(y0, y1))
                | (WTy(x0, x1), WTy(y0, y1)) => go(x0, y0, env) && go(x1, y1, env),
                (If(x0, x1, x2), If(y0, y1, y2))
                | (IfZe(x0, x1, x2), IfZe(y0, y1, y2))
                | (Eq(x0, x1, x2), Eq(y0, y1, y2)) => {
                    go(x0, y0, env) && go(x1, y1, env) && go(x2, y2, env)
                }
                (Ax, Ax) | (Tt, Tt) | (Ff, Ff) | (Ze, Ze) | (Void, Void) | (Unit, Unit)
                | (Bool, Bool) | (Nat, Nat) => true,
                (Univ(i), Univ(j)) => i == j,
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }

    /// Stable JSON encoding: constructor-tagged objects.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("program serialization is infallible")
    }
}

impl fmt::Display for Program {
    /// Stable textual form. Term binders print as `x<level>`, so the name of
    /// a bound variable is its de Bruijn level.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn var(l: usize) -> String {
            format!("x{l}")
        }
        fn atom(p: &Program, scope: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match p {
                Var(_) | Ax | Tt | Ff | Ze | Void | Unit | Bool | Nat | Univ(_) | Pair(..) => {
                    go(p, scope, f)
                }
                _ => {
                    write!(f, "(")?;
                    go(p, scope, f)?;
                    write!(f, ")")
                }
            }
        }
        fn go(p: &Program, scope: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match p {
                Var(l) => write!(f, "{}", var(*l)),
                Lam(b) => {
                    write!(f, "lam {}. ", var(scope))?;
                    go(b, scope + 1, f)
                }
                KLam(k, b) => {
                    write!(f, "clk-lam {k}. ")?;
                    go(b, scope, f)
                }
                App(g, a) => {
                    atom(g, scope, f)?;
                    write!(f, " ")?;
                    atom(a, scope, f)
                }
                CApp(g, k) => {
                    atom(g, scope, f)?;
                    write!(f, " @{k}")
                }
                Fix(b) => {
                    write!(f, "fix {}. ", var(scope))?;
                    go(b, scope + 1, f)
                }
                Pair(a, b) => {
                    write!(f, "<")?;
                    go(a, scope, f)?;
                    write!(f, ", ")?;
                    go(b, scope, f)?;
                    write!(f, ">")
                }
                Fst(a) => {
                    write!(f, "fst ")?;
                    atom(a, scope, f)
                }
                Snd(a) => {
                    write!(f, "snd ")?;
                    atom(a, scope, f)
                }
                Ax => write!(f, "ax"),
                Tt => write!(f, "tt"),
                Ff => write!(f, "ff"),
                Ze => write!(f, "zero"),
                Su(a) => {
                    write!(f, "succ ")?;
                    atom(a, scope, f)
                }
                If(b, t, e) => {
                    write!(f, "if ")?;
                    go(b, scope, f)?;
                    write!(f, " then ")?;
                    go(t, scope, f)?;
                    write!(f, " else ")?;
                    go(e, scope, f)
                }
                IfZe(n, z, s) => {
                    write!(f, "ifze(")?;
                    go(n, scope, f)?;
                    write!(f, "; ")?;
                    go(z, scope, f)?;
                    write!(f, "; {}. ", var(scope))?;
                    go(s, scope + 1, f)?;
                    write!(f, ")")
                }
                Sup(m, n) => {
                    write!(f, "sup(")?;
                    go(m, scope, f)?;
                    write!(f, "; {}. ", var(scope))?;
                    go(n, scope + 1, f)?;
                    write!(f, ")")
                }
                WRec(m, o) => {
                    write!(f, "wrec(")?;
                    go(m, scope, f)?;
                    write!(
                        f,
                        "; {} {} {}. ",
                        var(scope),
                        var(scope + 1),
                        var(scope + 2)
                    )?;
                    go(o, scope + 3, f)?;
                    write!(f, ")")
                }
                Pi(a, b) => {
                    write!(f, "pi {} : ", var(scope))?;
                    go(a, scope, f)?;
                    write!(f, " . ")?;
                    go(b, scope + 1, f)
                }
                Sg(a, b) => {
                    write!(f, "sg {} : ", var(scope))?;
                    go(a, scope, f)?;
                    write!(f, " . ")?;
                    go(b, scope + 1, f)
                }
                WTy(a, b) => {
                    write!(f, "wty {} : ", var(scope))?;
                    go(a, scope, f)?;
                    write!(f, " . ")?;
                    go(b, scope + 1, f)
                }
                Eq(a, m, n) => {
                    write!(f, "Eq ")?;
                    atom(a, scope, f)?;
                    write!(f, " ")?;
                    atom(m, scope, f)?;
                    write!(f, " ")?;
                    atom(n, scope, f)
                }
                Later(k, a) => {
                    write!(f, "later {k} ")?;
                    atom(a, scope, f)
                }
                Isect(k, a) => {
                    write!(f, "isect {k}. ")?;
                    go(a, scope, f)
                }
                KProd(k, a) => {
                    write!(f, "all {k}. ")?;
                    go(a, scope, f)
                }
                Void => write!(f, "void"),
                Unit => write!(f, "unit"),
                Bool => write!(f, "bool"),
                Nat => write!(f, "nat"),
                Univ(i) => write!(f, "U<{i}>"),
            }
        }
        go(self, 0, f)
    }
}

/// A simultaneous substitution: a vector of programs in scope `m`, applied to
/// a program in scope `n = programs.len()`, yielding scope `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    programs: Vec<Program>,
    target_scope: usize,
}

/// Substitution error.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstError {
    #[error("substitution length {expected} does not match program scope: {source}")]
    ScopeMismatch {
        expected: usize,
        source: ScopeViolation,
    },
}

impl Substitution {
    /// A substitution from scope `programs.len()` into scope `target_scope`.
    pub fn new(programs: Vec<Program>, target_scope: usize) -> Self {
        Substitution {
            programs,
            target_scope,
        }
    }

    /// The identity substitution on scope `n`.
    pub fn identity(n: usize) -> Self {
        Substitution {
            programs: (0..n).map(Var).collect(),
            target_scope: n,
        }
    }

    pub fn source_scope(&self) -> usize {
        self.programs.len()
    }

    pub fn target_scope(&self) -> usize {
        self.target_scope
    }

    /// Apply to a program in scope `source_scope()`. Free levels map to the
    /// vector entries; binder-introduced levels are re-based onto the target
    /// scope. Entries are inserted verbatim: levels are absolute.
    pub fn apply(&self, m: &Program) -> Result<Program, SubstError> {
        m.validate(self.programs.len())
            .map_err(|source| SubstError::ScopeMismatch {
                expected: self.programs.len(),
                source,
            })?;
        Ok(self.apply_unchecked(m))
    }

    pub fn apply_unchecked(&self, m: &Program) -> Program {
        let n = self.programs.len();
        let t = self.target_scope;
        m.map_vars(0, &|l, d| {
            if l < n {
                self.programs[l].shift_levels(t, d)
            } else {
                Var(t + (l - n))
            }
        })
    }
}

/// Substitute `arg` (scope `n`) for the last variable of `body` (scope `n+1`).
pub fn subst_last(body: &Program, n: usize, arg: &Program) -> Program {
    body.map_vars(0, &|l, d| {
        if l < n {
            Var(l)
        } else if l == n {
            arg.shift_levels(n, d)
        } else {
            Var(l - 1)
        }
    })
}

/// Substitute the last three variables of `body` (scope `n+3`).
pub fn subst_last3(body: &Program, n: usize, args: [&Program; 3]) -> Program {
    body.map_vars(0, &|l, d| {
        if l < n {
            Var(l)
        } else if l < n + 3 {
            args[l - n].shift_levels(n, d)
        } else {
            Var(l - 3)
        }
    })
}

/// Rename the bound clock of a binder body to `kappa`, capture-avoiding.
pub fn instantiate_clock(body: &Program, bound: ClockName, kappa: ClockName) -> Program {
    body.rename_clock(bound, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: u32) -> ClockName {
        ClockName(n)
    }

    #[test]
    fn subst_var_hits_entry() {
        let s = Substitution::new(vec![Tt], 0);
        assert_eq!(s.apply(&Var(0)).unwrap(), Tt);
    }

    #[test]
    fn subst_under_projection() {
        let ones = Program::fix(Program::pair(Tt, Var(0)));
        let s = Substitution::new(vec![ones.clone()], 0);
        assert_eq!(s.apply(&Program::fst(Var(0))).unwrap(), Program::fst(ones));
    }

    #[test]
    fn subst_scope_mismatch_is_reported() {
        let s = Substitution::new(vec![Tt], 0);
        assert!(s.apply(&Var(1)).is_err());
    }

    #[test]
    fn identity_substitution_is_identity() {
        // a couple of shapes in scope 3
        let samples = [
            Program::app(Var(0), Var(2)),
            Program::lam(Program::pair(Var(3), Var(1))),
            Program::ifze(Var(2), Ze, Program::su(Var(3))),
        ];
        let id = Substitution::identity(3);
        for m in &samples {
            assert_eq!(&id.apply(m).unwrap(), m);
        }
    }

    #[test]
    fn instantiate_later() {
        let body = Program::later(k(0), Bool);
        assert_eq!(
            instantiate_clock(&body, k(0), k(7)),
            Program::later(k(7), Bool)
        );
    }

    #[test]
    fn instantiate_respects_shadowing() {
        // isect k0. later k0 bool — renaming the *outer* k0 leaves the body alone
        let body = Program::isect(k(0), Program::later(k(0), Bool));
        assert_eq!(instantiate_clock(&body, k(0), k(9)), body);
    }

    #[test]
    fn instantiate_avoids_capture() {
        // isect k1. later k0 bool, renaming k0 -> k1 must freshen the binder
        let body = Program::isect(k(1), Program::later(k(0), Bool));
        let out = instantiate_clock(&body, k(0), k(1));
        match &out {
            Isect(b, inner) => {
                assert_ne!(*b, k(1));
                assert_eq!(**inner, Program::later(k(1), Bool));
            }
            other => panic!("unexpected shape {other:?}"),
        }
        assert!(out.alpha_eq(&Program::isect(k(5), Program::later(k(1), Bool))));
    }

    #[test]
    fn instantiate_identity_rename() {
        let body = Program::later(k(3), Program::pair(Tt, Var(0)));
        assert!(instantiate_clock(&body, k(3), k(3)).alpha_eq(&body));
    }

    #[test]
    fn free_clocks_examples() {
        assert_eq!(
            Program::later(k(1), Bool).free_clocks(),
            BTreeSet::from([k(1)])
        );
        assert!(Program::isect(k(0), Program::later(k(0), Bool))
            .free_clocks()
            .is_empty());
        assert_eq!(
            Program::pair(Program::later(k(1), Bool), Program::later(k(2), Nat)).free_clocks(),
            BTreeSet::from([k(1), k(2)])
        );
    }

    #[test]
    fn alpha_eq_clock_binders() {
        let a = Program::isect(k(0), Program::later(k(0), Bool));
        let b = Program::isect(k(4), Program::later(k(4), Bool));
        assert!(a.alpha_eq(&b));
        let c = Program::isect(k(0), Program::later(k(1), Bool));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn validate_rejects_escaping_level() {
        assert!(Program::lam(Var(1)).validate(0).is_err());
        assert!(Program::lam(Var(0)).validate(0).is_ok());
        assert!(Program::wrec(Tt, Var(2)).validate(0).is_ok());
        assert!(Program::wrec(Tt, Var(3)).validate(0).is_err());
    }

    #[test]
    fn subst_commutes_with_instantiate() {
        // clock names and term variables are disjoint sorts
        let body = Program::later(k(0), Program::app(Var(0), Var(1)));
        let s = Substitution::new(vec![Tt, Ff], 0);
        let left = s.apply(&instantiate_clock(&body, k(0), k(5))).unwrap();
        let right = instantiate_clock(&s.apply(&body).unwrap(), k(0), k(5));
        assert_eq!(left, right);
    }

    #[test]
    fn json_roundtrip() {
        let m = Program::klam(k(0), Program::fix(Program::pair(Tt, Var(0))));
        let v = m.to_json();
        let back: Program = serde_json::from_value(v).unwrap();
        assert_eq!(m, back);
    }
}

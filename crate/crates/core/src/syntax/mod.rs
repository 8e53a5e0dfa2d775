//! Surface syntax: formal terms with named variables and clock variables,
//! capture-avoiding substitution, scope checking, parsing and printing.

mod lex;
mod parse;
mod print;

pub use lex::{LexError, Token, TokenKind};
pub use parse::{parse, parse_term, Definitions, ParseError, Parser};
pub use print::print;

use std::collections::BTreeSet;

/// A formal term. Terms are compared up to renaming of bound variables and
/// bound clocks: `PartialEq` is alpha equality.
#[derive(Debug, Clone, serde::Serialize)]
pub enum FormalTerm {
    Var(String),
    Lam(String, Box<FormalTerm>),
    ClkLam(String, Box<FormalTerm>),
    App(Box<FormalTerm>, Box<FormalTerm>),
    ClkApp(Box<FormalTerm>, String),
    Pair(Box<FormalTerm>, Box<FormalTerm>),
    Fst(Box<FormalTerm>),
    Snd(Box<FormalTerm>),
    Fix(String, Box<FormalTerm>),
    Ax,
    Tt,
    Ff,
    If(Box<FormalTerm>, Box<FormalTerm>, Box<FormalTerm>),
    Ze,
    Su(Box<FormalTerm>),
    /// `ifze(scrutinee; zero case; x. successor case)`, binding the
    /// predecessor in the successor case.
    IfZe(
        Box<FormalTerm>,
        Box<FormalTerm>,
        String,
        Box<FormalTerm>,
    ),
    /// `sup(label; x. subtree family)`.
    Sup(Box<FormalTerm>, String, Box<FormalTerm>),
    /// `wrec(scrutinee; x y z. body)`.
    WRec(
        Box<FormalTerm>,
        String,
        String,
        String,
        Box<FormalTerm>,
    ),
    Pi(String, Box<FormalTerm>, Box<FormalTerm>),
    Sg(String, Box<FormalTerm>, Box<FormalTerm>),
    WTy(String, Box<FormalTerm>, Box<FormalTerm>),
    Eq(Box<FormalTerm>, Box<FormalTerm>, Box<FormalTerm>),
    /// Clock product `all k. A`.
    KProd(String, Box<FormalTerm>),
    /// Clock intersection `isect k. A`.
    Isect(String, Box<FormalTerm>),
    /// `later k A`.
    Later(String, Box<FormalTerm>),
    Void,
    Unit,
    Bool,
    Nat,
    Univ(u32),
}

impl PartialEq for FormalTerm {
    fn eq(&self, other: &Self) -> bool {
        self.alpha_eq(other)
    }
}
impl std::cmp::Eq for FormalTerm {}

use FormalTerm::*;

fn lookup_pair(env: &[(String, String)], l: &str, r: &str) -> Option<bool> {
    for (a, b) in env.iter().rev() {
        if a == l || b == r {
            return Some(a == l && b == r);
        }
    }
    None
}

impl FormalTerm {
    pub fn var(s: &str) -> FormalTerm {
        Var(s.to_owned())
    }
    pub fn lam(x: &str, b: FormalTerm) -> FormalTerm {
        Lam(x.to_owned(), Box::new(b))
    }
    pub fn clk_lam(k: &str, b: FormalTerm) -> FormalTerm {
        ClkLam(k.to_owned(), Box::new(b))
    }
    pub fn app(f: FormalTerm, a: FormalTerm) -> FormalTerm {
        App(Box::new(f), Box::new(a))
    }
    pub fn clk_app(f: FormalTerm, k: &str) -> FormalTerm {
        ClkApp(Box::new(f), k.to_owned())
    }
    pub fn pair(a: FormalTerm, b: FormalTerm) -> FormalTerm {
        Pair(Box::new(a), Box::new(b))
    }
    pub fn fst(a: FormalTerm) -> FormalTerm {
        Fst(Box::new(a))
    }
    pub fn snd(a: FormalTerm) -> FormalTerm {
        Snd(Box::new(a))
    }
    pub fn fix(x: &str, b: FormalTerm) -> FormalTerm {
        Fix(x.to_owned(), Box::new(b))
    }
    pub fn if_(b: FormalTerm, t: FormalTerm, f: FormalTerm) -> FormalTerm {
        If(Box::new(b), Box::new(t), Box::new(f))
    }
    pub fn su(a: FormalTerm) -> FormalTerm {
        Su(Box::new(a))
    }
    pub fn ifze(n: FormalTerm, z: FormalTerm, x: &str, s: FormalTerm) -> FormalTerm {
        IfZe(Box::new(n), Box::new(z), x.to_owned(), Box::new(s))
    }
    pub fn sup(m: FormalTerm, x: &str, n: FormalTerm) -> FormalTerm {
        Sup(Box::new(m), x.to_owned(), Box::new(n))
    }
    pub fn wrec(m: FormalTerm, x: &str, y: &str, z: &str, o: FormalTerm) -> FormalTerm {
        WRec(
            Box::new(m),
            x.to_owned(),
            y.to_owned(),
            z.to_owned(),
            Box::new(o),
        )
    }
    pub fn pi(x: &str, a: FormalTerm, b: FormalTerm) -> FormalTerm {
        Pi(x.to_owned(), Box::new(a), Box::new(b))
    }
    pub fn sg(x: &str, a: FormalTerm, b: FormalTerm) -> FormalTerm {
        Sg(x.to_owned(), Box::new(a), Box::new(b))
    }
    pub fn wty(x: &str, a: FormalTerm, b: FormalTerm) -> FormalTerm {
        WTy(x.to_owned(), Box::new(a), Box::new(b))
    }
    pub fn eq(a: FormalTerm, m: FormalTerm, n: FormalTerm) -> FormalTerm {
        Eq(Box::new(a), Box::new(m), Box::new(n))
    }
    pub fn kprod(k: &str, a: FormalTerm) -> FormalTerm {
        KProd(k.to_owned(), Box::new(a))
    }
    pub fn isect(k: &str, a: FormalTerm) -> FormalTerm {
        Isect(k.to_owned(), Box::new(a))
    }
    pub fn later(k: &str, a: FormalTerm) -> FormalTerm {
        Later(k.to_owned(), Box::new(a))
    }
    /// Non-dependent function space `A -> B`.
    pub fn arrow(a: FormalTerm, b: FormalTerm) -> FormalTerm {
        FormalTerm::pi("_", a, b)
    }
    /// Non-dependent pair space `A * B`.
    pub fn times(a: FormalTerm, b: FormalTerm) -> FormalTerm {
        FormalTerm::sg("_", a, b)
    }

    pub fn alpha_eq(&self, other: &FormalTerm) -> bool {
        fn go(
            a: &FormalTerm,
            b: &FormalTerm,
            vars: &mut Vec<(String, String)>,
            clks: &mut Vec<(String, String)>,
        ) -> bool {
            let var_eq = |x: &str, y: &str, env: &Vec<(String, String)>| {
                lookup_pair(env, x, y).unwrap_or(x == y)
            };
            macro_rules! under {
                ($env:expr, $x:expr, $y:expr, $body:expr) => {{
                    $env.push(($x.clone(), $y.clone()));
                    let r = $body;
                    $env.pop();
                    r
                }};
            }
            match (a, b) {
                (Var(x), Var(y)) => var_eq(x, y, vars),
                (Lam(x, m), Lam(y, n)) | (Fix(x, m), Fix(y, n)) => {
                    under!(vars, x, y, go(m, n, vars, clks))
                }
                (ClkLam(x, m), ClkLam(y, n))
                | (KProd(x, m), KProd(y, n))
                | (Isect(x, m), Isect(y, n)) => under!(clks, x, y, go(m, n, vars, clks)),
                (Later(j, m), Later(l, n)) => var_eq(j, l, clks) && go(m, n, vars, clks),
                (App(f, u), App(g, v)) | (Pair(f, u), Pair(g, v)) => {
                    go(f, g, vars, clks) && go(u, v, vars, clks)
                }
                (ClkApp(f, j), ClkApp(g, l)) => go(f, g, vars, clks) && var_eq(j, l, clks),
                (Fst(m), Fst(n)) | (Snd(m), Snd(n)) | (Su(m), Su(n)) => go(m, n, vars, clks),
                (If(b0, t0, f0), If(b1, t1, f1)) => {
                    go(b0, b1, vars, clks) && go(t0, t1, vars, clks) && go(f0, f1, vars, clks)
                }
                (IfZe(n0, z0, x, s0), IfZe(n1, z1, y, s1)) => {
                    go(n0, n1, vars, clks)
                        && go(z0, z1, vars, clks)
                        && under!(vars, x, y, go(s0, s1, vars, clks))
                }
                (Sup(m0, x, n0), Sup(m1, y, n1)) => {
                    go(m0, m1, vars, clks) && under!(vars, x, y, go(n0, n1, vars, clks))
                }
                (WRec(m0, x0, y0, z0, o0), WRec(m1, x1, y1, z1, o1)) => {
                    go(m0, m1, vars, clks)
                        && under!(
                            vars,
                            x0,
                            x1,
                            under!(vars, y0, y1, under!(vars, z0, z1, go(o0, o1, vars, clks)))
                        )
                }
                (Pi(x, a0, b0), Pi(y, a1, b1))
                | (Sg(x, a0, b0), Sg(y, a1, b1))
                | (WTy(x, a0, b0), WTy(y, a1, b1)) => {
                    go(a0, a1, vars, clks) && under!(vars, x, y, go(b0, b1, vars, clks))
                }
                (Eq(a0, m0, n0), Eq(a1, m1, n1)) => {
                    go(a0, a1, vars, clks) && go(m0, m1, vars, clks) && go(n0, n1, vars, clks)
                }
                (Ax, Ax) | (Tt, Tt) | (Ff, Ff) | (Ze, Ze) | (Void, Void) | (Unit, Unit)
                | (Bool, Bool) | (Nat, Nat) => true,
                (Univ(i), Univ(j)) => i == j,
                _ => false,
            }
        }
        go(self, other, &mut Vec::new(), &mut Vec::new())
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(t: &FormalTerm, bound: &mut Vec<String>, acc: &mut BTreeSet<String>) {
            match t {
                Var(x) => {
                    if !bound.contains(x) {
                        acc.insert(x.clone());
                    }
                }
                Lam(x, b) | Fix(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, acc);
                    bound.pop();
                }
                ClkLam(_, b) | KProd(_, b) | Isect(_, b) | Later(_, b) => go(b, bound, acc),
                App(f, a) | Pair(f, a) => {
                    go(f, bound, acc);
                    go(a, bound, acc);
                }
                ClkApp(f, _) => go(f, bound, acc),
                Fst(a) | Snd(a) | Su(a) => go(a, bound, acc),
                If(b, t0, f0) => {
                    go(b, bound, acc);
                    go(t0, bound, acc);
                    go(f0, bound, acc);
                }
                IfZe(n, z, x, s) => {
                    go(n, bound, acc);
                    go(z, bound, acc);
                    bound.push(x.clone());
                    go(s, bound, acc);
                    bound.pop();
                }
                Sup(m, x, n) => {
                    go(m, bound, acc);
                    bound.push(x.clone());
                    go(n, bound, acc);
                    bound.pop();
                }
                WRec(m, x, y, z, o) => {
                    go(m, bound, acc);
                    bound.push(x.clone());
                    bound.push(y.clone());
                    bound.push(z.clone());
                    go(o, bound, acc);
                    bound.pop();
                    bound.pop();
                    bound.pop();
                }
                Pi(x, a, b) | Sg(x, a, b) | WTy(x, a, b) => {
                    go(a, bound, acc);
                    bound.push(x.clone());
                    go(b, bound, acc);
                    bound.pop();
                }
                Eq(a, m, n) => {
                    go(a, bound, acc);
                    go(m, bound, acc);
                    go(n, bound, acc);
                }
                Ax | Tt | Ff | Ze | Void | Unit | Bool | Nat | Univ(_) => {}
            }
        }
        let mut acc = BTreeSet::new();
        go(self, &mut Vec::new(), &mut acc);
        acc
    }

    pub fn free_clock_vars(&self) -> BTreeSet<String> {
        fn go(t: &FormalTerm, bound: &mut Vec<String>, acc: &mut BTreeSet<String>) {
            let hit = |k: &String, bound: &Vec<String>, acc: &mut BTreeSet<String>| {
                if !bound.contains(k) {
                    acc.insert(k.clone());
                }
            };
            match t {
                ClkLam(k, b) | KProd(k, b) | Isect(k, b) => {
                    bound.push(k.clone());
                    go(b, bound, acc);
                    bound.pop();
                }
                Later(k, b) => {
                    hit(k, bound, acc);
                    go(b, bound, acc);
                }
                ClkApp(f, k) => {
                    hit(k, bound, acc);
                    go(f, bound, acc);
                }
                Var(_) | Ax | Tt | Ff | Ze | Void | Unit | Bool | Nat | Univ(_) => {}
                Lam(_, b) | Fix(_, b) | Fst(b) | Snd(b) | Su(b) => go(b, bound, acc),
                App(f, a) | Pair(f, a) => {
                    go(f, bound, acc);
                    go(a, bound, acc);
                }
                If(a, b, c) | Eq(a, b, c) => {
                    go(a, bound, acc);
                    go(b, bound, acc);
                    go(c, bound, acc);
                }
                IfZe(n, z, _, s) => {
                    go(n, bound, acc);
                    go(z, bound, acc);
                    go(s, bound, acc);
                }
                Sup(m, _, n) => {
                    go(m, bound, acc);
                    go(n, bound, acc);
                }
                WRec(m, _, _, _, o) => {
                    go(m, bound, acc);
                    go(o, bound, acc);
                }
                Pi(_, a, b) | Sg(_, a, b) | WTy(_, a, b) => {
                    go(a, bound, acc);
                    go(b, bound, acc);
                }
            }
        }
        let mut acc = BTreeSet::new();
        go(self, &mut Vec::new(), &mut acc);
        acc
    }
}

/// Pick a name based on `base` that is not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem: String = base.trim_end_matches(|c: char| c.is_ascii_digit()).into();
    let stem = if stem.is_empty() { "x".to_owned() } else { stem };
    if !avoid.contains(base) && base == stem {
        return base.to_owned();
    }
    let mut i = 1;
    loop {
        let cand = format!("{stem}{i}");
        if !avoid.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}

/// Capture-avoiding substitution of `n` for term variable `x` in `m`.
pub fn subst_formal(m: &FormalTerm, x: &str, n: &FormalTerm) -> FormalTerm {
    let fv = n.free_vars();
    fn binder(
        name: &str,
        body: &FormalTerm,
        x: &str,
        n: &FormalTerm,
        fv: &BTreeSet<String>,
    ) -> Option<(String, FormalTerm)> {
        // None means the binder shadows x and the body is untouched
        if name == x {
            return None;
        }
        if fv.contains(name) && body.free_vars().contains(x) {
            let mut avoid: BTreeSet<String> = fv.clone();
            avoid.extend(body.free_vars());
            avoid.insert(x.to_owned());
            let f = fresh_name(name, &avoid);
            let renamed = subst_formal(body, name, &FormalTerm::var(&f));
            Some((f, subst_formal(&renamed, x, n)))
        } else {
            Some((name.to_owned(), subst_formal(body, x, n)))
        }
    }
    let s = |m: &FormalTerm| subst_formal(m, x, n);
    match m {
        Var(y) => {
            if y == x {
                n.clone()
            } else {
                m.clone()
            }
        }
        Lam(y, b) => match binder(y, b, x, n, &fv) {
            None => m.clone(),
            Some((y, b)) => Lam(y, Box::new(b)),
        },
        Fix(y, b) => match binder(y, b, x, n, &fv) {
            None => m.clone(),
            Some((y, b)) => Fix(y, Box::new(b)),
        },
        ClkLam(k, b) => FormalTerm::clk_lam(k, s(b)),
        KProd(k, b) => FormalTerm::kprod(k, s(b)),
        Isect(k, b) => FormalTerm::isect(k, s(b)),
        Later(k, b) => FormalTerm::later(k, s(b)),
        App(f, a) => FormalTerm::app(s(f), s(a)),
        ClkApp(f, k) => FormalTerm::clk_app(s(f), k),
        Pair(a, b) => FormalTerm::pair(s(a), s(b)),
        Fst(a) => FormalTerm::fst(s(a)),
        Snd(a) => FormalTerm::snd(s(a)),
        If(b, t, f) => FormalTerm::if_(s(b), s(t), s(f)),
        Su(a) => FormalTerm::su(s(a)),
        IfZe(sc, z, y, sb) => {
            let sc = s(sc);
            let z = s(z);
            match binder(y, sb, x, n, &fv) {
                None => IfZe(Box::new(sc), Box::new(z), y.clone(), sb.clone()),
                Some((y, sb)) => IfZe(Box::new(sc), Box::new(z), y, Box::new(sb)),
            }
        }
        Sup(a, y, b) => {
            let a = s(a);
            match binder(y, b, x, n, &fv) {
                None => Sup(Box::new(a), y.clone(), b.clone()),
                Some((y, b)) => Sup(Box::new(a), y, Box::new(b)),
            }
        }
        WRec(sc, x1, x2, x3, o) => {
            let sc = s(sc);
            // handle the three binders one at a time via nested lambdas
            let wrapped = FormalTerm::lam(x1, FormalTerm::lam(x2, FormalTerm::lam(x3, (**o).clone())));
            let wrapped = subst_formal(&wrapped, x, n);
            match wrapped {
                Lam(y1, b1) => match *b1 {
                    Lam(y2, b2) => match *b2 {
                        Lam(y3, b3) => WRec(Box::new(sc), y1, y2, y3, b3),
                        _ => unreachable!(),
                    },
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            }
        }
        Pi(y, a, b) => {
            let a = s(a);
            match binder(y, b, x, n, &fv) {
                None => Pi(y.clone(), Box::new(a), b.clone()),
                Some((y, b)) => Pi(y, Box::new(a), Box::new(b)),
            }
        }
        Sg(y, a, b) => {
            let a = s(a);
            match binder(y, b, x, n, &fv) {
                None => Sg(y.clone(), Box::new(a), b.clone()),
                Some((y, b)) => Sg(y, Box::new(a), Box::new(b)),
            }
        }
        WTy(y, a, b) => {
            let a = s(a);
            match binder(y, b, x, n, &fv) {
                None => WTy(y.clone(), Box::new(a), b.clone()),
                Some((y, b)) => WTy(y, Box::new(a), Box::new(b)),
            }
        }
        Eq(a, p, q) => FormalTerm::eq(s(a), s(p), s(q)),
        Ax | Tt | Ff | Ze | Void | Unit | Bool | Nat | Univ(_) => m.clone(),
    }
}

/// Capture-avoiding renaming of clock variable `k` to `k2` in `m`.
pub fn subst_clock_formal(m: &FormalTerm, k: &str, k2: &str) -> FormalTerm {
    if k == k2 {
        return m.clone();
    }
    let s = |m: &FormalTerm| subst_clock_formal(m, k, k2);
    let hit = |j: &str| if j == k { k2.to_owned() } else { j.to_owned() };
    let clk_binder = |name: &str, body: &FormalTerm| -> (String, FormalTerm) {
        if name == k {
            (name.to_owned(), (*body).clone())
        } else if name == k2 && body.free_clock_vars().contains(k) {
            let mut avoid = body.free_clock_vars();
            avoid.insert(k.to_owned());
            avoid.insert(k2.to_owned());
            let f = fresh_name(name, &avoid);
            (f.clone(), s(&subst_clock_formal(body, name, &f)))
        } else {
            (name.to_owned(), s(body))
        }
    };
    match m {
        ClkLam(j, b) => {
            let (j, b) = clk_binder(j, b);
            ClkLam(j, Box::new(b))
        }
        KProd(j, b) => {
            let (j, b) = clk_binder(j, b);
            KProd(j, Box::new(b))
        }
        Isect(j, b) => {
            let (j, b) = clk_binder(j, b);
            Isect(j, Box::new(b))
        }
        Later(j, b) => Later(hit(j), Box::new(s(b))),
        ClkApp(f, j) => ClkApp(Box::new(s(f)), hit(j)),
        Var(_) | Ax | Tt | Ff | Ze | Void | Unit | Bool | Nat | Univ(_) => m.clone(),
        Lam(x, b) => Lam(x.clone(), Box::new(s(b))),
        Fix(x, b) => Fix(x.clone(), Box::new(s(b))),
        App(f, a) => FormalTerm::app(s(f), s(a)),
        Pair(a, b) => FormalTerm::pair(s(a), s(b)),
        Fst(a) => FormalTerm::fst(s(a)),
        Snd(a) => FormalTerm::snd(s(a)),
        If(b, t, f) => FormalTerm::if_(s(b), s(t), s(f)),
        Su(a) => FormalTerm::su(s(a)),
        IfZe(n, z, x, sb) => IfZe(Box::new(s(n)), Box::new(s(z)), x.clone(), Box::new(s(sb))),
        Sup(a, x, b) => Sup(Box::new(s(a)), x.clone(), Box::new(s(b))),
        WRec(sc, x, y, z, o) => WRec(
            Box::new(s(sc)),
            x.clone(),
            y.clone(),
            z.clone(),
            Box::new(s(o)),
        ),
        Pi(x, a, b) => Pi(x.clone(), Box::new(s(a)), Box::new(s(b))),
        Sg(x, a, b) => Sg(x.clone(), Box::new(s(a)), Box::new(s(b))),
        WTy(x, a, b) => WTy(x.clone(), Box::new(s(a)), Box::new(s(b))),
        Eq(a, p, q) => FormalTerm::eq(s(a), s(p), s(q)),
    }
}

/// Scope-check error: the first out-of-scope name, with a path into the term.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScopeError {
    #[error("unbound variable `{name}` at {path}")]
    UnboundVar { name: String, path: String },
    #[error("unbound clock `{name}` at {path}")]
    UnboundClock { name: String, path: String },
}

/// Check that every free term variable of `m` is in `vars` and every free
/// clock is in `clocks`.
pub fn scope_check(m: &FormalTerm, clocks: &[String], vars: &[String]) -> Result<(), ScopeError> {
    fn go(
        t: &FormalTerm,
        clks: &mut Vec<String>,
        vars: &mut Vec<String>,
        path: &mut Vec<&'static str>,
    ) -> Result<(), ScopeError> {
        let var_ok = |x: &str, env: &Vec<String>| env.iter().any(|v| v == x);
        macro_rules! at {
            ($lbl:expr, $e:expr) => {{
                path.push($lbl);
                let r = $e;
                path.pop();
                r?
            }};
        }
        macro_rules! bind {
            ($env:expr, $x:expr, $lbl:expr, $b:expr) => {{
                $env.push($x.clone());
                path.push($lbl);
                let r = go($b, clks, vars, path);
                path.pop();
                $env.pop();
                r?
            }};
        }
        match t {
            Var(x) => {
                if !var_ok(x, vars) {
                    return Err(ScopeError::UnboundVar {
                        name: x.clone(),
                        path: path.join("."),
                    });
                }
            }
            Lam(x, b) => bind!(vars, x, "lam", b),
            Fix(x, b) => bind!(vars, x, "fix", b),
            ClkLam(k, b) => bind!(clks, k, "clk-lam", b),
            KProd(k, b) => bind!(clks, k, "all", b),
            Isect(k, b) => bind!(clks, k, "isect", b),
            Later(k, b) => {
                if !var_ok(k, clks) {
                    return Err(ScopeError::UnboundClock {
                        name: k.clone(),
                        path: path.join("."),
                    });
                }
                at!("later", go(b, clks, vars, path));
            }
            ClkApp(f, k) => {
                at!("capp", go(f, clks, vars, path));
                if !var_ok(k, clks) {
                    return Err(ScopeError::UnboundClock {
                        name: k.clone(),
                        path: path.join("."),
                    });
                }
            }
            App(f, a) => {
                at!("fun", go(f, clks, vars, path));
                at!("arg", go(a, clks, vars, path));
            }
            Pair(a, b) => {
                at!("fst", go(a, clks, vars, path));
                at!("snd", go(b, clks, vars, path));
            }
            Fst(a) => at!("fst", go(a, clks, vars, path)),
            Snd(a) => at!("snd", go(a, clks, vars, path)),
            Su(a) => at!("succ", go(a, clks, vars, path)),
            If(b, t0, f0) => {
                at!("if", go(b, clks, vars, path));
                at!("then", go(t0, clks, vars, path));
                at!("else", go(f0, clks, vars, path));
            }
            IfZe(n, z, x, s) => {
                at!("ifze", go(n, clks, vars, path));
                at!("zero-case", go(z, clks, vars, path));
                bind!(vars, x, "succ-case", s);
            }
            Sup(m, x, n) => {
                at!("sup", go(m, clks, vars, path));
                bind!(vars, x, "sup-family", n);
            }
            WRec(m, x, y, z, o) => {
                at!("wrec", go(m, clks, vars, path));
                vars.push(x.clone());
                vars.push(y.clone());
                vars.push(z.clone());
                path.push("wrec-body");
                let r = go(o, clks, vars, path);
                path.pop();
                vars.pop();
                vars.pop();
                vars.pop();
                r?;
            }
            Pi(x, a, b) => {
                at!("dom", go(a, clks, vars, path));
                bind!(vars, x, "cod", b);
            }
            Sg(x, a, b) => {
                at!("dom", go(a, clks, vars, path));
                bind!(vars, x, "cod", b);
            }
            WTy(x, a, b) => {
                at!("dom", go(a, clks, vars, path));
                bind!(vars, x, "cod", b);
            }
            Eq(a, m, n) => {
                at!("carrier", go(a, clks, vars, path));
                at!("lhs", go(m, clks, vars, path));
                at!("rhs", go(n, clks, vars, path));
            }
            Ax | Tt | Ff | Ze | Void | Unit | Bool | Nat | Univ(_) => {}
        }
        Ok(())
    }
    go(
        m,
        &mut clocks.to_vec(),
        &mut vars.to_vec(),
        &mut Vec::new(),
    )
}

/// A clock context, variable context, and typing context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextTriple {
    pub clocks: Vec<String>,
    pub vars: Vec<String>,
    pub hyps: Vec<(String, FormalTerm)>,
}

/// Context validation failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ContextError {
    #[error("duplicate clock `{0}`")]
    DuplicateClock(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVar(String),
    #[error("hypothesis `{name}` has an ill-scoped type: {err}")]
    IllScopedHyp { name: String, err: ScopeError },
}

impl ContextTriple {
    pub fn validate(&self) -> Result<(), ContextError> {
        let mut seen = BTreeSet::new();
        for k in &self.clocks {
            if !seen.insert(k.clone()) {
                return Err(ContextError::DuplicateClock(k.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for v in &self.vars {
            if !seen.insert(v.clone()) {
                return Err(ContextError::DuplicateVar(v.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        let mut earlier: Vec<String> = Vec::new();
        for (x, a) in &self.hyps {
            if !seen.insert(x.clone()) {
                return Err(ContextError::DuplicateVar(x.clone()));
            }
            scope_check(a, &self.clocks, &earlier).map_err(|err| ContextError::IllScopedHyp {
                name: x.clone(),
                err,
            })?;
            earlier.push(x.clone());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subst_if_example() {
        // [tt/x] (if x then x else ff)
        let m = FormalTerm::if_(
            FormalTerm::var("x"),
            FormalTerm::var("x"),
            Ff,
        );
        let out = subst_formal(&m, "x", &Tt);
        assert_eq!(out, FormalTerm::if_(Tt, Tt, Ff));
    }

    #[test]
    fn subst_avoids_capture() {
        // [y/x] (lam y. x)  ==  lam y'. y
        let m = FormalTerm::lam("y", FormalTerm::var("x"));
        let out = subst_formal(&m, "x", &FormalTerm::var("y"));
        assert_eq!(out, FormalTerm::lam("z", FormalTerm::var("y")));
        // the binder must have been renamed away from y
        if let Lam(b, _) = &out {
            assert_ne!(b, "y");
        } else {
            panic!("expected lam");
        }
    }

    #[test]
    fn subst_under_sigma() {
        // [zero/x] (sg y : bool . Eq nat x x)
        let m = FormalTerm::sg(
            "y",
            Bool,
            FormalTerm::eq(Nat, FormalTerm::var("x"), FormalTerm::var("x")),
        );
        let out = subst_formal(&m, "x", &Ze);
        assert_eq!(out, FormalTerm::sg("y", Bool, FormalTerm::eq(Nat, Ze, Ze)));
    }

    #[test]
    fn clock_subst_examples() {
        // [k2/k] (later k bool)
        let m = FormalTerm::later("k", Bool);
        assert_eq!(subst_clock_formal(&m, "k", "k2"), FormalTerm::later("k2", Bool));
        // binder shadows
        let m = FormalTerm::isect("k", FormalTerm::later("k", Bool));
        assert_eq!(subst_clock_formal(&m, "k", "k2"), m);
        // under an unrelated binder
        let m = FormalTerm::kprod("j", FormalTerm::later("k", Univ(0)));
        assert_eq!(
            subst_clock_formal(&m, "k", "k2"),
            FormalTerm::kprod("j", FormalTerm::later("k2", Univ(0)))
        );
    }

    #[test]
    fn clock_subst_avoids_capture() {
        // [k2/k] (isect k2. later k (bool)) must freshen the k2 binder
        let m = FormalTerm::isect("k2", FormalTerm::later("k", Bool));
        let out = subst_clock_formal(&m, "k", "k2");
        assert!(out.alpha_eq(&FormalTerm::isect("j", FormalTerm::later("k2", Bool))));
    }

    #[test]
    fn scope_check_examples() {
        let later = FormalTerm::later("k", Bool);
        assert!(scope_check(&later, &["k".into()], &[]).is_ok());
        let err = scope_check(&later, &[], &[]).unwrap_err();
        assert!(matches!(err, ScopeError::UnboundClock { ref name, .. } if name == "k"));
        // isect binds its own clock
        let m = FormalTerm::isect("k", FormalTerm::var("x"));
        assert!(scope_check(&m, &[], &["x".into()]).is_ok());
    }

    #[test]
    fn scope_check_stable_under_alpha() {
        let a = FormalTerm::lam("x", FormalTerm::app(FormalTerm::var("x"), FormalTerm::var("y")));
        let b = FormalTerm::lam("w", FormalTerm::app(FormalTerm::var("w"), FormalTerm::var("y")));
        assert!(a.alpha_eq(&b));
        let env = ["y".to_owned()];
        assert_eq!(
            scope_check(&a, &[], &env).is_ok(),
            scope_check(&b, &[], &env).is_ok()
        );
    }

    #[test]
    fn context_triple_invariants() {
        let ctx = ContextTriple {
            clocks: vec!["k".into()],
            vars: vec![],
            hyps: vec![
                ("x".into(), Bool),
                ("y".into(), FormalTerm::later("k", FormalTerm::var("x"))),
            ],
        };
        assert!(ctx.validate().is_ok());
        let bad = ContextTriple {
            clocks: vec![],
            vars: vec![],
            hyps: vec![("x".into(), FormalTerm::later("k", Bool))],
        };
        assert!(bad.validate().is_err());
        let dup = ContextTriple {
            clocks: vec!["k".into(), "k".into()],
            vars: vec![],
            hyps: vec![],
        };
        assert!(matches!(dup.validate(), Err(ContextError::DuplicateClock(_))));
    }
}

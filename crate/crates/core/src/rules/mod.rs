//! The checker of record: judgments, the validated rule set, derivation
//! trees, and lemma scripts.
//!
//! Proof objects are explicit trees: each node names a rule and supplies the
//! metavariable bindings the conclusion alone does not determine. The checker
//! recomputes every premise judgment from the schema and walks the tree
//! top-down, reporting the first failing node with its path.

pub mod script;

pub use script::{
    check_script, check_script_trees, parse_script_file, Lemma, LemmaOutcome, ScriptFile,
    ScriptReport,
};

use std::collections::BTreeMap;
use std::fmt;

use crate::elaborate::{canonical_env, elab_term};
use crate::opsem::{open_conv, open_reaches, Tri};
use crate::syntax::{
    fresh_name, print, scope_check, subst_clock_formal, subst_formal, ContextTriple, FormalTerm,
};

/// A checkable judgment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Judgment {
    /// `Δ; Γ >> M0 = M1 : A` (membership `M : A` is the diagonal case).
    EqMem {
        clocks: Vec<String>,
        hyps: Vec<(String, FormalTerm)>,
        left: FormalTerm,
        right: FormalTerm,
        ty: FormalTerm,
    },
    /// `Δ; Ψ >> M0 ~ M1`: untyped open conversion.
    OpenConv {
        clocks: Vec<String>,
        vars: Vec<String>,
        left: FormalTerm,
        right: FormalTerm,
    },
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::EqMem {
                clocks,
                hyps,
                left,
                right,
                ty,
            } => {
                let hyps: Vec<String> = hyps
                    .iter()
                    .map(|(x, a)| format!("{x} : {}", print(a)))
                    .collect();
                write!(f, "[{}] ({})", clocks.join(" "), hyps.join(", "))?;
                if left.alpha_eq(right) {
                    write!(f, " {} : {}", print(left), print(ty))
                } else {
                    write!(f, " {} = {} : {}", print(left), print(right), print(ty))
                }
            }
            Judgment::OpenConv {
                clocks,
                vars,
                left,
                right,
            } => {
                write!(
                    f,
                    "[{}] ({}) {} ~ {}",
                    clocks.join(" "),
                    vars.join(" "),
                    print(left),
                    print(right)
                )
            }
        }
    }
}

impl Judgment {
    pub fn membership(
        clocks: Vec<String>,
        hyps: Vec<(String, FormalTerm)>,
        m: FormalTerm,
        ty: FormalTerm,
    ) -> Judgment {
        Judgment::EqMem {
            clocks,
            hyps,
            left: m.clone(),
            right: m,
            ty,
        }
    }

    pub fn clocks(&self) -> &[String] {
        match self {
            Judgment::EqMem { clocks, .. } | Judgment::OpenConv { clocks, .. } => clocks,
        }
    }

    /// Well-formedness: context invariants plus scope checks on every part.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Judgment::EqMem {
                clocks,
                hyps,
                left,
                right,
                ty,
            } => {
                let ctx = ContextTriple {
                    clocks: clocks.clone(),
                    vars: hyps.iter().map(|(x, _)| x.clone()).collect(),
                    hyps: hyps.clone(),
                };
                ctx.validate().map_err(|e| e.to_string())?;
                let vars: Vec<String> = hyps.iter().map(|(x, _)| x.clone()).collect();
                for (what, t) in [("left", left), ("right", right), ("type", ty)] {
                    scope_check(t, clocks, &vars)
                        .map_err(|e| format!("{what} side: {e}"))?;
                }
                Ok(())
            }
            Judgment::OpenConv {
                clocks,
                vars,
                left,
                right,
            } => {
                let ctx = ContextTriple {
                    clocks: clocks.clone(),
                    vars: vars.clone(),
                    hyps: vec![],
                };
                ctx.validate().map_err(|e| e.to_string())?;
                for (what, t) in [("left", left), ("right", right)] {
                    scope_check(t, clocks, vars).map_err(|e| format!("{what} side: {e}"))?;
                }
                Ok(())
            }
        }
    }

    /// Alpha equality of judgments: context entries are binders, so two
    /// judgments agree when they match up to consistent renaming of clock
    /// and hypothesis names.
    pub fn alpha_eq(&self, other: &Judgment) -> bool {
        self.canonicalize() == other.canonicalize()
    }

    /// Internal names contain `#`, which the lexer cannot produce, so the
    /// renaming can never capture.
    fn canonicalize(&self) -> Judgment {
        match self {
            Judgment::EqMem {
                clocks,
                hyps,
                left,
                right,
                ty,
            } => {
                let mut left = left.clone();
                let mut right = right.clone();
                let mut ty = ty.clone();
                let mut new_hyps: Vec<(String, FormalTerm)> =
                    hyps.iter().map(|(x, a)| (x.clone(), a.clone())).collect();
                let mut new_clocks = Vec::new();
                for (i, k) in clocks.iter().enumerate() {
                    let nk = format!("k#{i}");
                    for (_, a) in new_hyps.iter_mut() {
                        *a = subst_clock_formal(a, k, &nk);
                    }
                    left = subst_clock_formal(&left, k, &nk);
                    right = subst_clock_formal(&right, k, &nk);
                    ty = subst_clock_formal(&ty, k, &nk);
                    new_clocks.push(nk);
                }
                for i in 0..new_hyps.len() {
                    let old = new_hyps[i].0.clone();
                    let nx = format!("x#{i}");
                    for (_, a) in new_hyps.iter_mut().skip(i + 1) {
                        *a = subst_formal(a, &old, &FormalTerm::var(&nx));
                    }
                    left = subst_formal(&left, &old, &FormalTerm::var(&nx));
                    right = subst_formal(&right, &old, &FormalTerm::var(&nx));
                    ty = subst_formal(&ty, &old, &FormalTerm::var(&nx));
                    new_hyps[i].0 = nx;
                }
                Judgment::EqMem {
                    clocks: new_clocks,
                    hyps: new_hyps,
                    left,
                    right,
                    ty,
                }
            }
            Judgment::OpenConv {
                clocks,
                vars,
                left,
                right,
            } => {
                let mut left = left.clone();
                let mut right = right.clone();
                let mut new_clocks = Vec::new();
                for (i, k) in clocks.iter().enumerate() {
                    let nk = format!("k#{i}");
                    left = subst_clock_formal(&left, k, &nk);
                    right = subst_clock_formal(&right, k, &nk);
                    new_clocks.push(nk);
                }
                let mut new_vars = Vec::new();
                for (i, x) in vars.iter().enumerate() {
                    let nx = format!("x#{i}");
                    left = subst_formal(&left, x, &FormalTerm::var(&nx));
                    right = subst_formal(&right, x, &FormalTerm::var(&nx));
                    new_vars.push(nx);
                }
                Judgment::OpenConv {
                    clocks: new_clocks,
                    vars: new_vars,
                    left,
                    right,
                }
            }
        }
    }
}

macro_rules! rule_names {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// The closed enumeration of validated rules.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
        pub enum RuleName {
            $($variant),*
        }

        impl RuleName {
            pub const ALL: &'static [RuleName] = &[$(RuleName::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(RuleName::$variant => $name),*
                }
            }

            pub fn parse(s: &str) -> Option<RuleName> {
                match s {
                    $($name => Some(RuleName::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

rule_names! {
    ConversionSymm => "Conversion.symm",
    ConversionTrans => "Conversion.trans",
    GeneralWeakening => "General.weakening",
    GeneralHypothesis => "General.hypothesis",
    GeneralConvMem => "General.conv_mem",
    GeneralConvTy => "General.conv_ty",
    GeneralEqSymm => "General.eq_symm",
    GeneralEqTrans => "General.eq_trans",
    GeneralReplaceTy => "General.replace_ty",
    GeneralUnivFormation => "General.univ_formation",
    UnitAxEquality => "Unit.ax_equality",
    BoolUnivEq => "Bool.univ_eq",
    BoolTtEquality => "Bool.tt_equality",
    BoolFfEquality => "Bool.ff_equality",
    ProdUnivEq => "Prod.univ_eq",
    ProdIntro => "Prod.intro",
    ArrUnivEq => "Arr.univ_eq",
    ArrIntro => "Arr.intro",
    ArrElim => "Arr.elim",
    KArrUnivEq => "KArr.univ_eq",
    KArrIntro => "KArr.intro",
    KArrElim => "KArr.elim",
    IsectUnivEq => "Isect.univ_eq",
    IsectIntro => "Isect.intro",
    IsectIrrelevance => "Isect.irrelevance",
    IsectPreservesSigma => "Isect.preserves_sigma",
    LaterUnivEq => "Later.univ_eq",
    LaterIntro => "Later.intro",
    LaterForce => "Later.force",
    LaterPreservesPi => "Later.preserves_pi",
    LaterPreservesSigma => "Later.preserves_sigma",
    LaterInduction => "Later.induction",
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What kind of value a named binding carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingKind {
    Term,
    Var,
    Clock,
    Index,
}

/// A metavariable binding supplied by a script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Term(FormalTerm),
    Var(String),
    Clock(String),
    Index(u32),
}

pub type Bindings = BTreeMap<String, Binding>;

/// The bindings each rule requires beyond its conclusion. `(name, kind,
/// required)`; optional bindings have schema-side defaults.
pub fn rule_bindings(rule: RuleName) -> &'static [(&'static str, BindingKind, bool)] {
    use BindingKind::*;
    use RuleName::*;
    match rule {
        ConversionTrans | GeneralEqTrans => &[("mid", Term, true)],
        GeneralConvMem | GeneralConvTy => &[("via", Term, true)],
        GeneralReplaceTy => &[("from", Term, true), ("i", Index, true)],
        ProdIntro | ArrIntro | KArrIntro | IsectIntro | LaterIntro => &[("i", Index, true)],
        ArrElim => &[
            ("x", Var, true),
            ("A", Term, true),
            ("B", Term, true),
            ("i", Index, true),
        ],
        KArrElim => &[("k", Clock, true), ("A", Term, true), ("i", Index, true)],
        IsectPreservesSigma => &[("A1", Term, false), ("B1", Term, false)],
        _ => &[],
    }
}

struct EqMemParts<'a> {
    clocks: &'a [String],
    hyps: &'a [(String, FormalTerm)],
    left: &'a FormalTerm,
    right: &'a FormalTerm,
    ty: &'a FormalTerm,
}

fn as_eqmem<'a>(j: &'a Judgment, rule: RuleName) -> Result<EqMemParts<'a>, String> {
    match j {
        Judgment::EqMem {
            clocks,
            hyps,
            left,
            right,
            ty,
        } => Ok(EqMemParts {
            clocks,
            hyps,
            left,
            right,
            ty,
        }),
        Judgment::OpenConv { .. } => Err(format!(
            "{rule} concludes an equality judgment, not a conversion"
        )),
    }
}

fn get_term(b: &Bindings, name: &str, rule: RuleName) -> Result<FormalTerm, String> {
    match b.get(name) {
        Some(Binding::Term(t)) => Ok(t.clone()),
        Some(_) => Err(format!("binding `{name}` of {rule} must be a term")),
        None => Err(format!("{rule} requires a `{name} = TERM` binding")),
    }
}

fn get_index(b: &Bindings, name: &str, rule: RuleName) -> Result<u32, String> {
    match b.get(name) {
        Some(Binding::Index(i)) => Ok(*i),
        Some(_) => Err(format!("binding `{name}` of {rule} must be an index")),
        None => Err(format!("{rule} requires a `{name} = INDEX` binding")),
    }
}

fn get_var(b: &Bindings, name: &str, rule: RuleName) -> Result<String, String> {
    match b.get(name) {
        Some(Binding::Var(x)) => Ok(x.clone()),
        Some(_) => Err(format!("binding `{name}` of {rule} must be a variable name")),
        None => Err(format!("{rule} requires a `{name} = NAME` binding")),
    }
}

fn get_clock(b: &Bindings, name: &str, rule: RuleName) -> Result<String, String> {
    match b.get(name) {
        Some(Binding::Clock(k)) => Ok(k.clone()),
        Some(_) => Err(format!("binding `{name}` of {rule} must be a clock name")),
        None => Err(format!("{rule} requires a `{name} = CLOCK` binding")),
    }
}

fn avoid_of(parts: &EqMemParts, extra: &[&FormalTerm]) -> std::collections::BTreeSet<String> {
    let mut avoid: std::collections::BTreeSet<String> =
        parts.hyps.iter().map(|(x, _)| x.clone()).collect();
    for t in extra {
        avoid.extend(t.free_vars());
    }
    avoid
}

/// Open two term binders at a common fresh name.
fn open2(
    x0: &str,
    b0: &FormalTerm,
    x1: &str,
    b1: &FormalTerm,
    avoid: &std::collections::BTreeSet<String>,
) -> (String, FormalTerm, FormalTerm) {
    let mut avoid = avoid.clone();
    avoid.extend(b0.free_vars());
    avoid.extend(b1.free_vars());
    let x = fresh_name(x0, &avoid);
    (
        x.clone(),
        subst_formal(b0, x0, &FormalTerm::var(&x)),
        subst_formal(b1, x1, &FormalTerm::var(&x)),
    )
}

/// Open two clock binders at a common fresh clock not in `clocks`.
fn open2_clocks(
    k0: &str,
    b0: &FormalTerm,
    k1: &str,
    b1: &FormalTerm,
    clocks: &[String],
) -> (String, FormalTerm, FormalTerm) {
    let mut avoid: std::collections::BTreeSet<String> = clocks.iter().cloned().collect();
    avoid.extend(b0.free_clock_vars());
    avoid.extend(b1.free_clock_vars());
    let k = fresh_name(k0, &avoid);
    (
        k.clone(),
        subst_clock_formal(b0, k0, &k),
        subst_clock_formal(b1, k1, &k),
    )
}

fn univ_index(t: &FormalTerm, rule: RuleName) -> Result<u32, String> {
    match t {
        FormalTerm::Univ(i) => Ok(*i),
        _ => Err(format!("{rule} concludes at a universe type")),
    }
}

fn extend_hyps(
    hyps: &[(String, FormalTerm)],
    x: &str,
    a: &FormalTerm,
) -> Vec<(String, FormalTerm)> {
    let mut out = hyps.to_vec();
    out.push((x.to_owned(), a.clone()));
    out
}

fn extend_clocks(clocks: &[String], k: &str) -> Vec<String> {
    let mut out = clocks.to_vec();
    out.push(k.to_owned());
    out
}

/// Compute the premise judgments a rule application owes, or explain why the
/// conclusion does not match the rule schema.
pub fn premises_of(
    rule: RuleName,
    bindings: &Bindings,
    concl: &Judgment,
) -> Result<Vec<Judgment>, String> {
    use FormalTerm as F;
    use RuleName::*;
    match rule {
        ConversionSymm => match concl {
            Judgment::OpenConv {
                clocks,
                vars,
                left,
                right,
            } => Ok(vec![Judgment::OpenConv {
                clocks: clocks.clone(),
                vars: vars.clone(),
                left: right.clone(),
                right: left.clone(),
            }]),
            _ => Err("Conversion.symm concludes a conversion judgment".into()),
        },
        ConversionTrans => match concl {
            Judgment::OpenConv {
                clocks,
                vars,
                left,
                right,
            } => {
                let mid = get_term(bindings, "mid", rule)?;
                Ok(vec![
                    Judgment::OpenConv {
                        clocks: clocks.clone(),
                        vars: vars.clone(),
                        left: left.clone(),
                        right: mid.clone(),
                    },
                    Judgment::OpenConv {
                        clocks: clocks.clone(),
                        vars: vars.clone(),
                        left: mid,
                        right: right.clone(),
                    },
                ])
            }
            _ => Err("Conversion.trans concludes a conversion judgment".into()),
        },
        GeneralWeakening => {
            let p = as_eqmem(concl, rule)?;
            if p.hyps.is_empty() {
                return Err("General.weakening needs a hypothesis to discharge".into());
            }
            let mut hyps = p.hyps.to_vec();
            hyps.pop();
            Ok(vec![Judgment::EqMem {
                clocks: p.clocks.to_vec(),
                hyps,
                left: p.left.clone(),
                right: p.right.clone(),
                ty: p.ty.clone(),
            }])
        }
        GeneralHypothesis => {
            let p = as_eqmem(concl, rule)?;
            let (x, alpha) = p
                .hyps
                .last()
                .ok_or("General.hypothesis needs a non-empty context")?;
            let v = F::var(x);
            if !p.left.alpha_eq(&v) || !p.right.alpha_eq(&v) {
                return Err(format!(
                    "General.hypothesis concludes `{x} : A` for the last hypothesis"
                ));
            }
            if !p.ty.alpha_eq(alpha) {
                return Err("General.hypothesis: the type must be the hypothesis type".into());
            }
            Ok(vec![])
        }
        GeneralConvMem => {
            let p = as_eqmem(concl, rule)?;
            let via = get_term(bindings, "via", rule)?;
            let psi: Vec<String> = p.hyps.iter().map(|(x, _)| x.clone()).collect();
            Ok(vec![
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: via.clone(),
                    right: p.right.clone(),
                    ty: p.ty.clone(),
                },
                Judgment::OpenConv {
                    clocks: p.clocks.to_vec(),
                    vars: psi,
                    left: p.left.clone(),
                    right: via,
                },
            ])
        }
        GeneralConvTy => {
            let p = as_eqmem(concl, rule)?;
            let via = get_term(bindings, "via", rule)?;
            let psi: Vec<String> = p.hyps.iter().map(|(x, _)| x.clone()).collect();
            Ok(vec![
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: p.left.clone(),
                    right: p.right.clone(),
                    ty: via.clone(),
                },
                Judgment::OpenConv {
                    clocks: p.clocks.to_vec(),
                    vars: psi,
                    left: p.ty.clone(),
                    right: via,
                },
            ])
        }
        GeneralEqSymm => {
            let p = as_eqmem(concl, rule)?;
            Ok(vec![Judgment::EqMem {
                clocks: p.clocks.to_vec(),
                hyps: p.hyps.to_vec(),
                left: p.right.clone(),
                right: p.left.clone(),
                ty: p.ty.clone(),
            }])
        }
        GeneralEqTrans => {
            let p = as_eqmem(concl, rule)?;
            let mid = get_term(bindings, "mid", rule)?;
            Ok(vec![
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: mid.clone(),
                    right: p.right.clone(),
                    ty: p.ty.clone(),
                },
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: p.left.clone(),
                    right: mid,
                    ty: p.ty.clone(),
                },
            ])
        }
        GeneralReplaceTy => {
            let p = as_eqmem(concl, rule)?;
            let from = get_term(bindings, "from", rule)?;
            let i = get_index(bindings, "i", rule)?;
            Ok(vec![
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: from.clone(),
                    right: p.ty.clone(),
                    ty: F::Univ(i),
                },
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: p.left.clone(),
                    right: p.right.clone(),
                    ty: from,
                },
            ])
        }
        GeneralUnivFormation => {
            let p = as_eqmem(concl, rule)?;
            let i = univ_index(p.left, rule)?;
            if !p.left.alpha_eq(p.right) {
                return Err("General.univ_formation concludes U<i> : U<j>".into());
            }
            let j = univ_index(p.ty, rule)?;
            if i < j {
                Ok(vec![])
            } else {
                Err(format!("side condition i < j fails: {i} >= {j}"))
            }
        }
        UnitAxEquality => {
            let p = as_eqmem(concl, rule)?;
            if p.left.alpha_eq(&F::Ax) && p.right.alpha_eq(&F::Ax) && p.ty.alpha_eq(&F::Unit) {
                Ok(vec![])
            } else {
                Err("Unit.ax_equality concludes ax : unit".into())
            }
        }
        BoolUnivEq => {
            let p = as_eqmem(concl, rule)?;
            univ_index(p.ty, rule)?;
            if p.left.alpha_eq(&F::Bool) && p.right.alpha_eq(&F::Bool) {
                Ok(vec![])
            } else {
                Err("Bool.univ_eq concludes bool : U<i>".into())
            }
        }
        BoolTtEquality | BoolFfEquality => {
            let p = as_eqmem(concl, rule)?;
            let lit = if rule == BoolTtEquality { F::Tt } else { F::Ff };
            if p.left.alpha_eq(&lit) && p.right.alpha_eq(&lit) && p.ty.alpha_eq(&F::Bool) {
                Ok(vec![])
            } else {
                Err(format!("{rule} concludes a boolean literal in bool"))
            }
        }
        ProdUnivEq | ArrUnivEq => {
            let p = as_eqmem(concl, rule)?;
            let i = univ_index(p.ty, rule)?;
            let split = |t: &FormalTerm| -> Option<(String, FormalTerm, FormalTerm)> {
                match (rule, t) {
                    (ProdUnivEq, F::Sg(x, a, b)) => Some((x.clone(), (**a).clone(), (**b).clone())),
                    (ArrUnivEq, F::Pi(x, a, b)) => Some((x.clone(), (**a).clone(), (**b).clone())),
                    _ => None,
                }
            };
            let (x0, a0, b0) = split(p.left)
                .ok_or_else(|| format!("{rule}: the left side is not the right type former"))?;
            let (x1, a1, b1) = split(p.right)
                .ok_or_else(|| format!("{rule}: the right side is not the right type former"))?;
            let avoid = avoid_of(&p, &[&a0, &a1]);
            let (x, b0, b1) = open2(&x0, &b0, &x1, &b1, &avoid);
            Ok(vec![
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: a0.clone(),
                    right: a1,
                    ty: F::Univ(i),
                },
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: extend_hyps(p.hyps, &x, &a0),
                    left: b0,
                    right: b1,
                    ty: F::Univ(i),
                },
            ])
        }
        ProdIntro => {
            let p = as_eqmem(concl, rule)?;
            let i = get_index(bindings, "i", rule)?;
            let (m00, m01) = match p.left {
                F::Pair(a, b) => ((**a).clone(), (**b).clone()),
                _ => return Err("Prod.intro concludes a pair on the left".into()),
            };
            let (m10, m11) = match p.right {
                F::Pair(a, b) => ((**a).clone(), (**b).clone()),
                _ => return Err("Prod.intro concludes a pair on the right".into()),
            };
            let (x, a, b) = match p.ty {
                F::Sg(x, a, b) => (x.clone(), (**a).clone(), (**b).clone()),
                _ => return Err("Prod.intro concludes at a pair type".into()),
            };
            let avoid = avoid_of(&p, &[&a, &m00]);
            let (x, b, _) = open2(&x, &b, &x, &b, &avoid);
            Ok(vec![
                Judgment::membership(p.clocks.to_vec(), p.hyps.to_vec(), a.clone(), F::Univ(i)),
                Judgment::membership(
                    p.clocks.to_vec(),
                    extend_hyps(p.hyps, &x, &a),
                    b.clone(),
                    F::Univ(i),
                ),
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: m00.clone(),
                    right: m10,
                    ty: a,
                },
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: m01,
                    right: m11,
                    ty: subst_formal(&b, &x, &m00),
                },
            ])
        }
        ArrIntro => {
            let p = as_eqmem(concl, rule)?;
            let i = get_index(bindings, "i", rule)?;
            let (x0, m0) = match p.left {
                F::Lam(x, b) => (x.clone(), (**b).clone()),
                _ => return Err("Arr.intro concludes a function on the left".into()),
            };
            let (x1, m1) = match p.right {
                F::Lam(x, b) => (x.clone(), (**b).clone()),
                _ => return Err("Arr.intro concludes a function on the right".into()),
            };
            let (xt, a, b) = match p.ty {
                F::Pi(x, a, b) => (x.clone(), (**a).clone(), (**b).clone()),
                _ => return Err("Arr.intro concludes at a function type".into()),
            };
            let avoid = avoid_of(&p, &[&a]);
            let (x, m0, m1) = open2(&x0, &m0, &x1, &m1, &avoid);
            let b = subst_formal(&b, &xt, &F::var(&x));
            Ok(vec![
                Judgment::membership(p.clocks.to_vec(), p.hyps.to_vec(), a.clone(), F::Univ(i)),
                Judgment::membership(
                    p.clocks.to_vec(),
                    extend_hyps(p.hyps, &x, &a),
                    b.clone(),
                    F::Univ(i),
                ),
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: extend_hyps(p.hyps, &x, &a),
                    left: m0,
                    right: m1,
                    ty: b,
                },
            ])
        }
        ArrElim => {
            let p = as_eqmem(concl, rule)?;
            let x = get_var(bindings, "x", rule)?;
            let a = get_term(bindings, "A", rule)?;
            let b = get_term(bindings, "B", rule)?;
            let i = get_index(bindings, "i", rule)?;
            let (m0, n0) = match p.left {
                F::App(f, arg) => ((**f).clone(), (**arg).clone()),
                _ => return Err("Arr.elim concludes an application on the left".into()),
            };
            let (m1, n1) = match p.right {
                F::App(f, arg) => ((**f).clone(), (**arg).clone()),
                _ => return Err("Arr.elim concludes an application on the right".into()),
            };
            let expected = subst_formal(&b, &x, &n0);
            if !expected.alpha_eq(p.ty) {
                return Err(format!(
                    "Arr.elim: substituted family `{}` does not match the conclusion type `{}`",
                    print(&expected),
                    print(p.ty)
                ));
            }
            Ok(vec![
                Judgment::membership(p.clocks.to_vec(), p.hyps.to_vec(), a.clone(), F::Univ(i)),
                Judgment::membership(
                    p.clocks.to_vec(),
                    extend_hyps(p.hyps, &x, &a),
                    b.clone(),
                    F::Univ(i),
                ),
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: m0,
                    right: m1,
                    ty: F::Pi(x.clone(), Box::new(a.clone()), Box::new(b)),
                },
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: n0,
                    right: n1,
                    ty: a,
                },
            ])
        }
        KArrUnivEq | IsectUnivEq => {
            let p = as_eqmem(concl, rule)?;
            let i = univ_index(p.ty, rule)?;
            let split = |t: &FormalTerm| match (rule, t) {
                (KArrUnivEq, F::KProd(k, a)) => Some((k.clone(), (**a).clone())),
                (IsectUnivEq, F::Isect(k, a)) => Some((k.clone(), (**a).clone())),
                _ => None,
            };
            let (k0, a0) = split(p.left)
                .ok_or_else(|| format!("{rule}: the left side is not the right quantifier"))?;
            let (k1, a1) = split(p.right)
                .ok_or_else(|| format!("{rule}: the right side is not the right quantifier"))?;
            let (k, a0, a1) = open2_clocks(&k0, &a0, &k1, &a1, p.clocks);
            Ok(vec![Judgment::EqMem {
                clocks: extend_clocks(p.clocks, &k),
                hyps: p.hyps.to_vec(),
                left: a0,
                right: a1,
                ty: F::Univ(i),
            }])
        }
        KArrIntro => {
            let p = as_eqmem(concl, rule)?;
            let i = get_index(bindings, "i", rule)?;
            let (k0, m0) = match p.left {
                F::ClkLam(k, b) => (k.clone(), (**b).clone()),
                _ => return Err("KArr.intro concludes a clock abstraction on the left".into()),
            };
            let (k1, m1) = match p.right {
                F::ClkLam(k, b) => (k.clone(), (**b).clone()),
                _ => return Err("KArr.intro concludes a clock abstraction on the right".into()),
            };
            let (kt, a) = match p.ty {
                F::KProd(k, a) => (k.clone(), (**a).clone()),
                _ => return Err("KArr.intro concludes at a clock product".into()),
            };
            let (k, m0, m1) = open2_clocks(&k0, &m0, &k1, &m1, p.clocks);
            let a = subst_clock_formal(&a, &kt, &k);
            let clocks = extend_clocks(p.clocks, &k);
            Ok(vec![
                Judgment::membership(clocks.clone(), p.hyps.to_vec(), a.clone(), F::Univ(i)),
                Judgment::EqMem {
                    clocks,
                    hyps: p.hyps.to_vec(),
                    left: m0,
                    right: m1,
                    ty: a,
                },
            ])
        }
        KArrElim => {
            let p = as_eqmem(concl, rule)?;
            let k = get_clock(bindings, "k", rule)?;
            let a = get_term(bindings, "A", rule)?;
            let i = get_index(bindings, "i", rule)?;
            let kp = p
                .clocks
                .last()
                .ok_or("KArr.elim needs a non-empty clock context ending in the applied clock")?
                .clone();
            let (m0, j0) = match p.left {
                F::ClkApp(f, j) => ((**f).clone(), j.clone()),
                _ => return Err("KArr.elim concludes a clock application on the left".into()),
            };
            let (m1, j1) = match p.right {
                F::ClkApp(f, j) => ((**f).clone(), j.clone()),
                _ => return Err("KArr.elim concludes a clock application on the right".into()),
            };
            if j0 != kp || j1 != kp {
                return Err(format!(
                    "KArr.elim applies to the last clock of the context (`{kp}`)"
                ));
            }
            if p.clocks.contains(&k) {
                return Err(format!("bound clock `{k}` must be fresh for the context"));
            }
            let expected = subst_clock_formal(&a, &k, &kp);
            if !expected.alpha_eq(p.ty) {
                return Err(format!(
                    "KArr.elim: instantiated family `{}` does not match the conclusion type `{}`",
                    print(&expected),
                    print(p.ty)
                ));
            }
            Ok(vec![
                Judgment::membership(
                    extend_clocks(p.clocks, &k),
                    p.hyps.to_vec(),
                    a.clone(),
                    F::Univ(i),
                ),
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: m0,
                    right: m1,
                    ty: F::KProd(k, Box::new(a)),
                },
            ])
        }
        IsectIntro => {
            let p = as_eqmem(concl, rule)?;
            let i = get_index(bindings, "i", rule)?;
            let (k0, a) = match p.ty {
                F::Isect(k, a) => (k.clone(), (**a).clone()),
                _ => return Err("Isect.intro concludes at an intersection type".into()),
            };
            let (k, a, _) = open2_clocks(&k0, &a, &k0, &a, p.clocks);
            let clocks = extend_clocks(p.clocks, &k);
            Ok(vec![
                Judgment::EqMem {
                    clocks: clocks.clone(),
                    hyps: p.hyps.to_vec(),
                    left: p.left.clone(),
                    right: p.right.clone(),
                    ty: a.clone(),
                },
                Judgment::membership(clocks, p.hyps.to_vec(), a, F::Univ(i)),
            ])
        }
        IsectIrrelevance => {
            let p = as_eqmem(concl, rule)?;
            let i = univ_index(p.ty, rule)?;
            let (k, body) = match p.right {
                F::Isect(k, a) => (k.clone(), (**a).clone()),
                _ => {
                    return Err(
                        "Isect.irrelevance concludes `A = isect k. A` at a universe".into()
                    )
                }
            };
            if p.clocks.contains(&k) {
                return Err(format!("side condition fails: clock `{k}` is in the clock context"));
            }
            if !body.alpha_eq(p.left) {
                return Err("Isect.irrelevance: the intersection body must be the left side".into());
            }
            Ok(vec![Judgment::membership(
                p.clocks.to_vec(),
                p.hyps.to_vec(),
                p.left.clone(),
                F::Univ(i),
            )])
        }
        IsectPreservesSigma => {
            let p = as_eqmem(concl, rule)?;
            let i = univ_index(p.ty, rule)?;
            let (k0, inner) = match p.left {
                F::Isect(k, a) => (k.clone(), (**a).clone()),
                _ => return Err("Isect.preserves_sigma: left side is an intersected pair type".into()),
            };
            let (_x0, a0, b0) = match inner {
                F::Sg(x, a, b) => (x, (*a).clone(), (*b).clone()),
                _ => return Err("Isect.preserves_sigma: left side must intersect a pair type".into()),
            };
            let (_x1, ia, ib) = match p.right {
                F::Sg(x, a, b) => (x.clone(), (**a).clone(), (**b).clone()),
                _ => return Err("Isect.preserves_sigma: right side is a pair of intersections".into()),
            };
            let (ka, aa) = match ia {
                F::Isect(k, a) => (k, (*a).clone()),
                _ => return Err("Isect.preserves_sigma: the right domain must be an intersection".into()),
            };
            let (kb, bb) = match ib {
                F::Isect(k, a) => (k, (*a).clone()),
                _ => return Err("Isect.preserves_sigma: the right family must be an intersection".into()),
            };
            let (k, a0o, aao) = open2_clocks(&k0, &a0, &ka, &aa, p.clocks);
            if !a0o.alpha_eq(&aao) {
                return Err("Isect.preserves_sigma: domains do not correspond".into());
            }
            let (k2, b0o, bbo) = open2_clocks(&k0, &b0, &kb, &bb, p.clocks);
            if !b0o.alpha_eq(&bbo) {
                return Err("Isect.preserves_sigma: families do not correspond".into());
            }
            let a1 = match bindings.get("A1") {
                Some(Binding::Term(t)) => subst_clock_formal(t, &k0, &k),
                Some(_) => return Err("binding `A1` must be a term".into()),
                None => a0o.clone(),
            };
            let b1 = match bindings.get("B1") {
                Some(Binding::Term(t)) => subst_clock_formal(t, &k0, &k2),
                Some(_) => return Err("binding `B1` must be a term".into()),
                None => b0o.clone(),
            };
            Ok(vec![
                Judgment::EqMem {
                    clocks: extend_clocks(p.clocks, &k),
                    hyps: p.hyps.to_vec(),
                    left: a0o,
                    right: a1,
                    ty: F::Univ(i),
                },
                Judgment::EqMem {
                    clocks: extend_clocks(p.clocks, &k2),
                    hyps: p.hyps.to_vec(),
                    left: b0o,
                    right: b1,
                    ty: F::Univ(i),
                },
            ])
        }
        LaterUnivEq => {
            let p = as_eqmem(concl, rule)?;
            let i = univ_index(p.ty, rule)?;
            let kp = p
                .clocks
                .last()
                .ok_or("Later.univ_eq needs a clock context ending in the modality's clock")?
                .clone();
            let (j0, a0) = match p.left {
                F::Later(j, a) => (j.clone(), (**a).clone()),
                _ => return Err("Later.univ_eq concludes later types".into()),
            };
            let (j1, a1) = match p.right {
                F::Later(j, a) => (j.clone(), (**a).clone()),
                _ => return Err("Later.univ_eq concludes later types".into()),
            };
            if j0 != kp || j1 != kp {
                return Err(format!(
                    "Later.univ_eq: the modality must use the last clock `{kp}`"
                ));
            }
            Ok(vec![Judgment::EqMem {
                clocks: p.clocks.to_vec(),
                hyps: p.hyps.to_vec(),
                left: a0,
                right: a1,
                ty: F::later(&kp, F::Univ(i)),
            }])
        }
        LaterIntro => {
            let p = as_eqmem(concl, rule)?;
            let i = get_index(bindings, "i", rule)?;
            let kp = p
                .clocks
                .last()
                .ok_or("Later.intro needs a clock context ending in the modality's clock")?
                .clone();
            let (j, a) = match p.ty {
                F::Later(j, a) => (j.clone(), (**a).clone()),
                _ => return Err("Later.intro concludes at a later type".into()),
            };
            if j != kp {
                return Err(format!(
                    "Later.intro: the modality must use the last clock `{kp}`"
                ));
            }
            Ok(vec![
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: p.left.clone(),
                    right: p.right.clone(),
                    ty: a.clone(),
                },
                Judgment::membership(p.clocks.to_vec(), p.hyps.to_vec(), a, F::Univ(i)),
            ])
        }
        LaterForce => {
            let p = as_eqmem(concl, rule)?;
            let i = univ_index(p.ty, rule)?;
            let (k0, inner) = match p.left {
                F::Isect(k, a) => (k.clone(), (**a).clone()),
                _ => return Err("Later.force: the left side intersects a later type".into()),
            };
            let (j, a0) = match inner {
                F::Later(j, a) => (j, (*a).clone()),
                _ => return Err("Later.force: the left side intersects a later type".into()),
            };
            if j != k0 {
                return Err("Later.force: the deleted modality must use the bound clock".into());
            }
            let (k1, a1) = match p.right {
                F::Isect(k, a) => (k.clone(), (**a).clone()),
                _ => return Err("Later.force: the right side is an intersection".into()),
            };
            Ok(vec![Judgment::EqMem {
                clocks: p.clocks.to_vec(),
                hyps: p.hyps.to_vec(),
                left: F::Isect(k0, Box::new(a0)),
                right: F::Isect(k1, Box::new(a1)),
                ty: F::Univ(i),
            }])
        }
        LaterPreservesPi | LaterPreservesSigma => {
            let p = as_eqmem(concl, rule)?;
            let i = univ_index(p.ty, rule)?;
            let (j, inner) = match p.left {
                F::Later(j, a) => (j.clone(), (**a).clone()),
                _ => return Err(format!("{rule}: the left side is a delayed type former")),
            };
            if !p.clocks.contains(&j) {
                return Err(format!("{rule}: clock `{j}` is not in the context"));
            }
            let split = |t: &FormalTerm| match (rule, t) {
                (LaterPreservesPi, F::Pi(x, a, b)) => {
                    Some((x.clone(), (**a).clone(), (**b).clone()))
                }
                (LaterPreservesSigma, F::Sg(x, a, b)) => {
                    Some((x.clone(), (**a).clone(), (**b).clone()))
                }
                _ => None,
            };
            let (x0, a0, b0) = split(&inner)
                .ok_or_else(|| format!("{rule}: the delayed type is not the right former"))?;
            let (x1, ia, ib) = split(p.right)
                .ok_or_else(|| format!("{rule}: the right side is not the right former"))?;
            let a1 = match ia {
                F::Later(j1, a) if j1 == j => (*a).clone(),
                _ => return Err(format!("{rule}: the right domain must be delayed on `{j}`")),
            };
            let b1 = match ib {
                F::Later(j1, b) if j1 == j => (*b).clone(),
                _ => return Err(format!("{rule}: the right family must be delayed on `{j}`")),
            };
            let avoid = avoid_of(&p, &[&a0, &a1]);
            let (x, b0, b1) = open2(&x0, &b0, &x1, &b1, &avoid);
            Ok(vec![
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: p.hyps.to_vec(),
                    left: a0.clone(),
                    right: a1,
                    ty: F::Univ(i),
                },
                Judgment::EqMem {
                    clocks: p.clocks.to_vec(),
                    hyps: extend_hyps(p.hyps, &x, &a0),
                    left: b0,
                    right: b1,
                    ty: F::later(&j, F::Univ(i)),
                },
            ])
        }
        LaterInduction => {
            let p = as_eqmem(concl, rule)?;
            let kp = p
                .clocks
                .last()
                .ok_or("Later.induction needs a clock context ending in the guard clock")?
                .clone();
            let (x0, m0) = match p.left {
                F::Fix(x, b) => (x.clone(), (**b).clone()),
                _ => return Err("Later.induction concludes fixed points".into()),
            };
            let (x1, m1) = match p.right {
                F::Fix(x, b) => (x.clone(), (**b).clone()),
                _ => return Err("Later.induction concludes fixed points".into()),
            };
            let avoid = avoid_of(&p, &[p.ty]);
            let (x, m0, m1) = open2(&x0, &m0, &x1, &m1, &avoid);
            Ok(vec![Judgment::EqMem {
                clocks: p.clocks.to_vec(),
                hyps: extend_hyps(p.hyps, &x, &F::later(&kp, p.ty.clone())),
                left: m0,
                right: m1,
                ty: p.ty.clone(),
            }])
        }
    }
}

/// One node of an explicit derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Rule {
        rule: RuleName,
        bindings: Bindings,
        premises: Vec<Derivation>,
    },
    /// Cite a previously checked lemma whose judgment is alpha-equal.
    Lemma(String),
    /// Discharge a conversion premise by running the conversion procedure.
    ConvAuto,
    /// Discharge a conversion premise by an explicit chain of reduction
    /// links; adjacent terms must reach each other by symbolic weak-head
    /// steps (in either direction).
    ConvTrace(Vec<FormalTerm>),
}

/// A check failure, pinpointing the failing node.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at {path}: {msg}")]
pub struct CheckError {
    pub path: String,
    pub msg: String,
}

/// A table of already-checked lemmas.
#[derive(Debug, Clone, Default)]
pub struct LemmaTable {
    entries: Vec<(String, Judgment)>,
}

impl LemmaTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, j: Judgment) {
        self.entries.push((name.to_owned(), j));
    }

    pub fn get(&self, name: &str) -> Option<&Judgment> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, j)| j)
    }
}

/// Per-node status of a derivation, for machine-readable reports.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NodeReport {
    /// Rule name, `lemma NAME`, or the conversion-discharge kind.
    pub label: String,
    /// The judgment this node is expected to conclude, when computed.
    pub judgment: Option<String>,
    /// `ok`, `failed: ...`, or `not checked` (below a failing node).
    pub status: String,
    pub premises: Vec<NodeReport>,
}

fn node_label(d: &Derivation) -> String {
    match d {
        Derivation::Rule { rule, .. } => rule.to_string(),
        Derivation::Lemma(name) => format!("lemma {name}"),
        Derivation::ConvAuto => "conv auto".into(),
        Derivation::ConvTrace(_) => "conv trace".into(),
    }
}

fn skipped_tree(d: &Derivation) -> NodeReport {
    let premises = match d {
        Derivation::Rule { premises, .. } => premises.iter().map(skipped_tree).collect(),
        _ => Vec::new(),
    };
    NodeReport {
        label: node_label(d),
        judgment: None,
        status: "not checked".into(),
        premises,
    }
}

/// Walk a derivation recording every node's status. Unlike [`check`], this
/// does not stop at the first failure.
pub fn report_tree(
    d: &Derivation,
    expected: &Judgment,
    lemmas: &LemmaTable,
    fuel: u64,
) -> NodeReport {
    let own = |status: String, premises: Vec<NodeReport>| NodeReport {
        label: node_label(d),
        judgment: Some(expected.to_string()),
        status,
        premises,
    };
    match d {
        Derivation::Rule {
            rule,
            bindings,
            premises,
        } => match premises_of(*rule, bindings, expected) {
            Err(msg) => own(format!("failed: {msg}"), premises.iter().map(skipped_tree).collect()),
            Ok(wanted) => {
                if wanted.len() != premises.len() {
                    return own(
                        format!(
                            "failed: {rule} takes {} premise(s), the script supplies {}",
                            wanted.len(),
                            premises.len()
                        ),
                        premises.iter().map(skipped_tree).collect(),
                    );
                }
                let mut kids = Vec::new();
                let mut all_ok = true;
                for (want, sub) in wanted.iter().zip(premises) {
                    if let Err(msg) = want.validate() {
                        all_ok = false;
                        let mut t = skipped_tree(sub);
                        t.judgment = Some(want.to_string());
                        t.status = format!("failed: ill-formed premise: {msg}");
                        kids.push(t);
                        continue;
                    }
                    let t = report_tree(sub, want, lemmas, fuel);
                    all_ok &= t.status == "ok";
                    kids.push(t);
                }
                own(
                    if all_ok {
                        "ok".into()
                    } else {
                        "failed: a premise failed".into()
                    },
                    kids,
                )
            }
        },
        _ => {
            let status = match check_at(d, expected, lemmas, fuel, &mut vec![node_label(d)]) {
                Ok(()) => "ok".into(),
                Err(e) => format!("failed: {}", e.msg),
            };
            own(status, Vec::new())
        }
    }
}

/// Check a derivation against its expected conclusion.
pub fn check(
    d: &Derivation,
    expected: &Judgment,
    lemmas: &LemmaTable,
    fuel: u64,
) -> Result<(), CheckError> {
    expected.validate().map_err(|msg| CheckError {
        path: "conclusion".into(),
        msg,
    })?;
    check_at(d, expected, lemmas, fuel, &mut vec!["conclusion".into()])
}

fn check_at(
    d: &Derivation,
    expected: &Judgment,
    lemmas: &LemmaTable,
    fuel: u64,
    path: &mut Vec<String>,
) -> Result<(), CheckError> {
    let fail = |path: &[String], msg: String| CheckError {
        path: path.join(" > "),
        msg,
    };
    match d {
        Derivation::Lemma(name) => {
            let j = lemmas
                .get(name)
                .ok_or_else(|| fail(path, format!("unknown lemma `{name}`")))?;
            if j.alpha_eq(expected) {
                Ok(())
            } else {
                Err(fail(
                    path,
                    format!("lemma `{name}` proves `{j}`, but `{expected}` is needed"),
                ))
            }
        }
        Derivation::ConvAuto => {
            let (clocks, vars, left, right) = match expected {
                Judgment::OpenConv {
                    clocks,
                    vars,
                    left,
                    right,
                } => (clocks, vars, left, right),
                _ => {
                    return Err(fail(
                        path,
                        "a conversion step can only discharge a conversion premise".into(),
                    ))
                }
            };
            let rho = canonical_env(clocks);
            let l = elab_term(clocks, vars, left, &rho)
                .map_err(|e| fail(path, format!("elaboration failed: {e}")))?;
            let r = elab_term(clocks, vars, right, &rho)
                .map_err(|e| fail(path, format!("elaboration failed: {e}")))?;
            match open_conv(vars.len(), &l, &r, fuel) {
                Tri::Yes => Ok(()),
                _ => Err(fail(
                    path,
                    format!(
                        "conversion unknown: could not equate `{}` and `{}` within fuel",
                        print(left),
                        print(right)
                    ),
                )),
            }
        }
        Derivation::ConvTrace(terms) => {
            let (clocks, vars, left, right) = match expected {
                Judgment::OpenConv {
                    clocks,
                    vars,
                    left,
                    right,
                } => (clocks, vars, left, right),
                _ => {
                    return Err(fail(
                        path,
                        "a trace can only discharge a conversion premise".into(),
                    ))
                }
            };
            if terms.is_empty() {
                return Err(fail(path, "empty conversion trace".into()));
            }
            let rho = canonical_env(clocks);
            let elab = |t: &FormalTerm| {
                elab_term(clocks, vars, t, &rho)
                    .map_err(|e| fail(path, format!("elaboration failed: {e}")))
            };
            let mut progs = Vec::new();
            for t in terms {
                progs.push(elab(t)?);
            }
            let l = elab(left)?;
            let r = elab(right)?;
            if !progs[0].alpha_eq(&l) {
                return Err(fail(path, "trace must start at the left side".into()));
            }
            if !progs[progs.len() - 1].alpha_eq(&r) {
                return Err(fail(path, "trace must end at the right side".into()));
            }
            for w in progs.windows(2) {
                let fwd = open_reaches(vars.len(), &w[0], &w[1], fuel);
                let bwd = fwd || open_reaches(vars.len(), &w[1], &w[0], fuel);
                if !bwd {
                    return Err(fail(
                        path,
                        "adjacent trace entries are not joined by weak-head steps".into(),
                    ));
                }
            }
            Ok(())
        }
        Derivation::Rule {
            rule,
            bindings,
            premises,
        } => {
            let wanted =
                premises_of(*rule, bindings, expected).map_err(|msg| fail(path, msg))?;
            if wanted.len() != premises.len() {
                return Err(fail(
                    path,
                    format!(
                        "{rule} takes {} premise(s), the script supplies {}",
                        wanted.len(),
                        premises.len()
                    ),
                ));
            }
            for (idx, (want, sub)) in wanted.iter().zip(premises).enumerate() {
                path.push(format!("premise {} of {rule}", idx + 1));
                want.validate()
                    .map_err(|msg| fail(path, format!("ill-formed premise `{want}`: {msg}")))?;
                check_at(sub, want, lemmas, fuel, path)?;
                path.pop();
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use FormalTerm as F;

    fn no_hyps() -> Vec<(String, FormalTerm)> {
        vec![]
    }

    #[test]
    fn tt_equality_checks() {
        let j = Judgment::membership(vec![], no_hyps(), F::Tt, F::Bool);
        let d = Derivation::Rule {
            rule: RuleName::BoolTtEquality,
            bindings: Bindings::new(),
            premises: vec![],
        };
        assert!(check(&d, &j, &LemmaTable::new(), 1000).is_ok());
    }

    #[test]
    fn tt_equality_rejects_ff() {
        let j = Judgment::membership(vec![], no_hyps(), F::Ff, F::Bool);
        let d = Derivation::Rule {
            rule: RuleName::BoolTtEquality,
            bindings: Bindings::new(),
            premises: vec![],
        };
        assert!(check(&d, &j, &LemmaTable::new(), 1000).is_err());
    }

    #[test]
    fn irrelevance_side_condition() {
        // with k already in the clock context the rule must fail
        let j = Judgment::EqMem {
            clocks: vec!["k".into()],
            hyps: no_hyps(),
            left: F::Bool,
            right: F::isect("k", F::Bool),
            ty: F::Univ(0),
        };
        let d = Derivation::Rule {
            rule: RuleName::IsectIrrelevance,
            bindings: Bindings::new(),
            premises: vec![Derivation::Rule {
                rule: RuleName::BoolUnivEq,
                bindings: Bindings::new(),
                premises: vec![],
            }],
        };
        let err = check(&d, &j, &LemmaTable::new(), 1000).unwrap_err();
        assert!(err.msg.contains("side condition"), "{err}");
        // and with a fresh clock it succeeds
        let j = Judgment::EqMem {
            clocks: vec![],
            hyps: no_hyps(),
            left: F::Bool,
            right: F::isect("k", F::Bool),
            ty: F::Univ(0),
        };
        assert!(check(&d, &j, &LemmaTable::new(), 1000).is_ok());
    }

    #[test]
    fn univ_formation_index_ordering() {
        let good = Judgment::membership(vec![], no_hyps(), F::Univ(0), F::Univ(1));
        let bad = Judgment::membership(vec![], no_hyps(), F::Univ(1), F::Univ(1));
        let d = Derivation::Rule {
            rule: RuleName::GeneralUnivFormation,
            bindings: Bindings::new(),
            premises: vec![],
        };
        assert!(check(&d, &good, &LemmaTable::new(), 1000).is_ok());
        let err = check(&d, &bad, &LemmaTable::new(), 1000).unwrap_err();
        assert!(err.msg.contains("i < j"), "{err}");
    }

    #[test]
    fn hypothesis_needs_last_position() {
        let j = Judgment::membership(
            vec![],
            vec![("x".into(), F::Bool), ("y".into(), F::Unit)],
            F::var("x"),
            F::Bool,
        );
        let hyp = Derivation::Rule {
            rule: RuleName::GeneralHypothesis,
            bindings: Bindings::new(),
            premises: vec![],
        };
        assert!(check(&hyp, &j, &LemmaTable::new(), 1000).is_err());
        let weakened = Derivation::Rule {
            rule: RuleName::GeneralWeakening,
            bindings: Bindings::new(),
            premises: vec![hyp],
        };
        assert!(check(&weakened, &j, &LemmaTable::new(), 1000).is_ok());
    }

    #[test]
    fn judgment_alpha_equality() {
        let a = Judgment::membership(
            vec!["k".into()],
            vec![("x".into(), F::later("k", F::Bool))],
            F::var("x"),
            F::later("k", F::Bool),
        );
        let b = Judgment::membership(
            vec!["j".into()],
            vec![("y".into(), F::later("j", F::Bool))],
            F::var("y"),
            F::later("j", F::Bool),
        );
        assert!(a.alpha_eq(&b));
        let c = Judgment::membership(
            vec!["k".into()],
            vec![("x".into(), F::Bool)],
            F::var("x"),
            F::Bool,
        );
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn conv_auto_discharges_beta() {
        let j = Judgment::OpenConv {
            clocks: vec![],
            vars: vec!["x".into()],
            left: F::app(F::lam("y", F::var("y")), F::var("x")),
            right: F::var("x"),
        };
        assert!(check(&Derivation::ConvAuto, &j, &LemmaTable::new(), 100).is_ok());
    }

    #[test]
    fn conv_trace_checks_links() {
        let j = Judgment::OpenConv {
            clocks: vec![],
            vars: vec![],
            left: F::fst(F::pair(F::Tt, F::Ff)),
            right: F::Tt,
        };
        let trace = Derivation::ConvTrace(vec![F::fst(F::pair(F::Tt, F::Ff)), F::Tt]);
        assert!(check(&trace, &j, &LemmaTable::new(), 100).is_ok());
        let bogus = Derivation::ConvTrace(vec![F::fst(F::pair(F::Tt, F::Ff)), F::Ff]);
        assert!(check(&bogus, &j, &LemmaTable::new(), 100).is_err());
    }

    #[test]
    fn prod_intro_mismatched_family_is_pinpointed() {
        // <tt, zero> : sg x : bool . nat, but the fourth premise is forced to
        // [tt/x]nat = nat; supplying bool there must fail at that premise
        let j = Judgment::membership(
            vec![],
            no_hyps(),
            F::pair(F::Tt, F::Ze),
            F::sg("x", F::Bool, F::Nat),
        );
        let mut bindings = Bindings::new();
        bindings.insert("i".into(), Binding::Index(0));
        let d = Derivation::Rule {
            rule: RuleName::ProdIntro,
            bindings,
            premises: vec![
                Derivation::Rule {
                    rule: RuleName::BoolUnivEq,
                    bindings: Bindings::new(),
                    premises: vec![],
                },
                Derivation::Rule {
                    rule: RuleName::BoolUnivEq, // wrong: nat is needed
                    bindings: Bindings::new(),
                    premises: vec![],
                },
                Derivation::Rule {
                    rule: RuleName::BoolTtEquality,
                    bindings: Bindings::new(),
                    premises: vec![],
                },
                Derivation::Rule {
                    rule: RuleName::BoolTtEquality,
                    bindings: Bindings::new(),
                    premises: vec![],
                },
            ],
        };
        let err = check(&d, &j, &LemmaTable::new(), 1000).unwrap_err();
        assert!(err.path.contains("premise 2 of Prod.intro"), "{err}");
    }

    #[test]
    fn report_tree_records_per_node_status() {
        let j = Judgment::membership(
            vec![],
            vec![],
            FormalTerm::pair(F::Tt, F::Ff),
            F::times(F::Bool, F::Bool),
        );
        let mut bindings = Bindings::new();
        bindings.insert("i".into(), Binding::Index(0));
        let leaf = |rule| Derivation::Rule {
            rule,
            bindings: Bindings::new(),
            premises: vec![],
        };
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
                leaf(RuleName::BoolTtEquality), // wrong literal
            ],
        };
        let tree = report_tree(&d, &j, &LemmaTable::new(), 100);
        assert!(tree.status.starts_with("failed"));
        assert_eq!(tree.premises.len(), 4);
        assert_eq!(tree.premises[0].status, "ok");
        assert_eq!(tree.premises[1].status, "ok");
        assert_eq!(tree.premises[2].status, "ok");
        assert!(tree.premises[3].status.starts_with("failed"));
    }

    #[test]
    fn weakening_admissibility_property() {
        // any checked tree re-rooted under an extra unused hypothesis checks
        let j = Judgment::membership(vec![], no_hyps(), F::Tt, F::Bool);
        let d = Derivation::Rule {
            rule: RuleName::BoolTtEquality,
            bindings: Bindings::new(),
            premises: vec![],
        };
        let table = LemmaTable::new();
        assert!(check(&d, &j, &table, 100).is_ok());
        let weakened_j = Judgment::membership(
            vec![],
            vec![("fresh".into(), F::Unit)],
            F::Tt,
            F::Bool,
        );
        let weakened_d = Derivation::Rule {
            rule: RuleName::GeneralWeakening,
            bindings: Bindings::new(),
            premises: vec![d],
        };
        assert!(check(&weakened_d, &weakened_j, &table, 100).is_ok());
    }
}

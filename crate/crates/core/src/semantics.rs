//! Desk-scale meaning explanation: finite worlds of clocks, a tri-valued
//! membership oracle for the type-system operator, universe levels, the
//! canonicity check, and a PER audit.
//!
//! The oracle is a documented semi-decision used for cross-checking the rule
//! checker, not a checker of record: `Yes`/`No` answers on finitary types are
//! sound, quantifiers over clocks and function domains are probed at finitely
//! many instances, and anything undetermined within budget comes back
//! `Unknown`.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::opsem::{closed_sq_bounded, eval_unchecked, EvalOutcome, Tri};
use crate::program::{fresh_clock, instantiate_clock, subst_last, ClockName, Program};

/// A finite non-empty assignment of remaining time to clock names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct World {
    times: BTreeMap<ClockName, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorldError {
    #[error("worlds must contain at least one clock")]
    Empty,
    #[error("clock {0} is not in the world")]
    MissingClock(ClockName),
    #[error("clock {0} has no time left")]
    TimeExhausted(ClockName),
}

impl World {
    pub fn new(times: BTreeMap<ClockName, u32>) -> Result<World, WorldError> {
        if times.is_empty() {
            return Err(WorldError::Empty);
        }
        Ok(World { times })
    }

    pub fn single(k: ClockName, t: u32) -> World {
        World {
            times: BTreeMap::from([(k, t)]),
        }
    }

    pub fn time(&self, k: ClockName) -> Option<u32> {
        self.times.get(&k).copied()
    }

    pub fn domain(&self) -> impl Iterator<Item = ClockName> + '_ {
        self.times.keys().copied()
    }

    pub fn domain_set(&self) -> BTreeSet<ClockName> {
        self.times.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Worlds are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> &BTreeMap<ClockName, u32> {
        &self.times
    }

    /// The world with `k` added or overwritten at time `t`.
    pub fn with_clock(&self, k: ClockName, t: u32) -> World {
        let mut times = self.times.clone();
        times.insert(k, t);
        World { times }
    }

    pub fn without_clock(&self, k: ClockName) -> Result<World, WorldError> {
        let mut times = self.times.clone();
        times.remove(&k);
        World::new(times)
    }

    /// Decrement the time of `k` by one.
    pub fn tick(&self, k: ClockName) -> Result<World, WorldError> {
        match self.times.get(&k) {
            None => Err(WorldError::MissingClock(k)),
            Some(0) => Err(WorldError::TimeExhausted(k)),
            Some(t) => {
                let mut times = self.times.clone();
                times.insert(k, t - 1);
                Ok(World { times })
            }
        }
    }
}

impl std::fmt::Display for World {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .times
            .iter()
            .map(|(k, t)| format!("{k}={t}"))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Budgets bounding the oracle's approximations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    /// Recursion depth through type formers and inductive unfoldings.
    pub unfold_depth: u32,
    /// Canonical-inhabitant enumeration bound (numerals, pair components).
    pub enum_depth: u32,
    /// Evaluation fuel per program.
    pub fuel: u64,
    /// Times `0..=T` tried for the fresh clock under intersections and
    /// clock products.
    pub fresh_clock_times: u32,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            unfold_depth: 48,
            enum_depth: 4,
            fuel: 100_000,
            fresh_clock_times: 3,
        }
    }
}

/// Default universe level for whole-hierarchy queries.
pub const DEFAULT_LEVEL: u32 = 3;

/// A tri-valued answer with provenance: whether an `Unknown` came from a
/// higher-order domain the oracle cannot enumerate, and a short note.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub tri: Tri,
    pub higher_order: bool,
    pub note: Option<String>,
}

impl Answer {
    pub fn yes() -> Answer {
        Answer {
            tri: Tri::Yes,
            higher_order: false,
            note: None,
        }
    }
    pub fn no(note: impl Into<String>) -> Answer {
        Answer {
            tri: Tri::No,
            higher_order: false,
            note: Some(note.into()),
        }
    }
    pub fn unknown(note: impl Into<String>) -> Answer {
        Answer {
            tri: Tri::Unknown,
            higher_order: false,
            note: Some(note.into()),
        }
    }
    pub fn unknown_ho(note: impl Into<String>) -> Answer {
        Answer {
            tri: Tri::Unknown,
            higher_order: true,
            note: Some(note.into()),
        }
    }

    /// Conjunction: `No` dominates, then `Unknown`, then `Yes`.
    pub fn and(self, other: impl FnOnce() -> Answer) -> Answer {
        match self.tri {
            Tri::No => self,
            Tri::Yes => other(),
            Tri::Unknown => {
                let o = other();
                match o.tri {
                    Tri::No => o,
                    _ => Answer {
                        tri: Tri::Unknown,
                        higher_order: self.higher_order || o.higher_order,
                        note: self.note.or(o.note),
                    },
                }
            }
        }
    }
}

fn all_of(mut answers: impl Iterator<Item = Answer>) -> Answer {
    let mut acc = Answer::yes();
    for a in answers.by_ref() {
        acc = acc.and(|| a);
        if acc.tri == Tri::No {
            return acc;
        }
    }
    acc
}

/// Why a program failed to denote a type.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpFailure {
    #[error("not a type: {0}")]
    NotAType(String),
    #[error("budget exhausted: {0}")]
    Exhausted(String),
}

/// Which clause of the type-system operator produced a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    Void,
    Unit,
    Bool,
    Nat,
    Sg,
    Pi,
    W,
    Eq,
    /// A later modality whose clock has no time left: the total relation.
    LaterTotal,
    Later,
    Isect,
    KProd,
    Univ,
}

/// A membership test approximating the relation a type denotes at a fixed
/// world and universe level.
#[derive(Debug, Clone)]
pub struct TypeRel {
    world: World,
    level: u32,
    budget: OracleBudget,
    depth: u32,
    /// The evaluated type value the relation belongs to.
    pub value: Program,
    pub clause: Clause,
}

impl TypeRel {
    pub fn test(&self, m0: &Program, m1: &Program) -> Answer {
        test_at(
            &self.world,
            &self.value,
            self.clause,
            m0,
            m1,
            self.level,
            self.depth,
            &self.budget,
        )
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn level(&self) -> u32 {
        self.level
    }
}

/// Interpret a closed program as a type at `world` and universe `level`.
pub fn interp_type(
    world: &World,
    a: &Program,
    level: u32,
    budget: &OracleBudget,
) -> Result<TypeRel, InterpFailure> {
    interp_at(world, a, level, budget.unfold_depth, budget)
}

/// Convenience composition of [`interp_type`] and [`TypeRel::test`].
pub fn member(
    world: &World,
    m0: &Program,
    m1: &Program,
    a: &Program,
    level: u32,
    budget: &OracleBudget,
) -> Answer {
    member_at(world, m0, m1, a, level, budget.unfold_depth, budget)
}

fn member_at(
    world: &World,
    m0: &Program,
    m1: &Program,
    a: &Program,
    level: u32,
    depth: u32,
    budget: &OracleBudget,
) -> Answer {
    match interp_at(world, a, level, depth, budget) {
        Err(InterpFailure::NotAType(r)) => Answer::no(format!("type failed to interpret: {r}")),
        Err(InterpFailure::Exhausted(r)) => Answer::unknown(r),
        Ok(rel) => rel.test(m0, m1),
    }
}

/// Clock instances probed under an intersection or clock product: every
/// clock of the world, plus one genuinely fresh clock at each time up to
/// the budget.
fn clock_instances(
    world: &World,
    avoid: &BTreeSet<ClockName>,
    budget: &OracleBudget,
) -> Vec<(World, ClockName)> {
    let mut out: Vec<(World, ClockName)> = world.domain().map(|k| (world.clone(), k)).collect();
    let mut avoid = avoid.clone();
    avoid.extend(world.domain());
    let fresh = fresh_clock(&avoid);
    for t in 0..=budget.fresh_clock_times {
        out.push((world.with_clock(fresh, t), fresh));
    }
    out
}

fn interp_at(
    world: &World,
    a: &Program,
    level: u32,
    depth: u32,
    budget: &OracleBudget,
) -> Result<TypeRel, InterpFailure> {
    use Program::*;
    if depth == 0 {
        return Err(InterpFailure::Exhausted("type unfolding depth".into()));
    }
    if let Some(k) = a.free_clocks().difference(&world.domain_set()).next() {
        return Err(InterpFailure::NotAType(format!(
            "free clock {k} is not in the world"
        )));
    }
    let value = match eval_unchecked(a, budget.fuel) {
        EvalOutcome::Val(v, _) => v,
        EvalOutcome::OutOfFuel(_) => {
            return Err(InterpFailure::Exhausted("evaluation fuel".into()))
        }
        EvalOutcome::Stuck(m) => {
            return Err(InterpFailure::NotAType(format!(
                "the program is stuck: {m:?}"
            )))
        }
    };
    let mk = |clause: Clause, value: Program| TypeRel {
        world: world.clone(),
        level,
        budget: *budget,
        depth: depth - 1,
        value,
        clause,
    };
    match &value {
        Void => Ok(mk(Clause::Void, value.clone())),
        Unit => Ok(mk(Clause::Unit, value.clone())),
        Bool => Ok(mk(Clause::Bool, value.clone())),
        Nat => Ok(mk(Clause::Nat, value.clone())),
        Sg(dom, fam) | Pi(dom, fam) | WTy(dom, fam) => {
            let clause = match &value {
                Sg(..) => Clause::Sg,
                Pi(..) => Clause::Pi,
                _ => Clause::W,
            };
            let dom_rel = interp_at(world, dom, level, depth - 1, budget)?;
            // family functionality, probed at enumerable canonical inhabitants
            if let Enumeration::Inhabitants(cands) =
                enumerate(world, &dom_rel.value, depth - 1, budget)
            {
                for d in cands {
                    if dom_rel.test(&d, &d).tri == Tri::Yes {
                        interp_at(world, &subst_last(fam, 0, &d), level, depth - 1, budget)?;
                    }
                }
            }
            Ok(mk(clause, value.clone()))
        }
        Eq(car, l, r) => {
            let car_rel = interp_at(world, car, level, depth - 1, budget)?;
            for end in [l, r] {
                match car_rel.test(end, end).tri {
                    Tri::Yes => {}
                    Tri::No => {
                        return Err(InterpFailure::NotAType(
                            "equality endpoint is not in the carrier".into(),
                        ))
                    }
                    Tri::Unknown => {
                        return Err(InterpFailure::Exhausted(
                            "equality endpoint membership undetermined".into(),
                        ))
                    }
                }
            }
            Ok(mk(Clause::Eq, value.clone()))
        }
        Later(k, body) => match world.time(*k) {
            None => Err(InterpFailure::NotAType(format!(
                "clock {k} is not in the world"
            ))),
            Some(0) => Ok(mk(Clause::LaterTotal, value.clone())),
            Some(_) => {
                let ticked = world.tick(*k).expect("time is positive");
                interp_at(&ticked, body, level, depth - 1, budget)?;
                Ok(mk(Clause::Later, value.clone()))
            }
        },
        Isect(k, body) | KProd(k, body) => {
            let clause = if matches!(&value, Isect(..)) {
                Clause::Isect
            } else {
                Clause::KProd
            };
            for (w, kappa) in clock_instances(world, &body.all_clocks(), budget) {
                let inst = instantiate_clock(body, *k, kappa);
                interp_at(&w, &inst, level, depth - 1, budget)?;
            }
            Ok(mk(clause, value.clone()))
        }
        Univ(i) => {
            if *i < level {
                Ok(mk(Clause::Univ, value.clone()))
            } else {
                Err(InterpFailure::NotAType(format!(
                    "universe index {i} is not below level {level}"
                )))
            }
        }
        other => Err(InterpFailure::NotAType(format!(
            "value is not a type former: {other:?}"
        ))),
    }
}

/// Result of canonical-inhabitant enumeration for a type value.
enum Enumeration {
    Inhabitants(Vec<Program>),
    HigherOrder(&'static str),
    Undetermined,
}

fn enumerate(
    world: &World,
    type_value: &Program,
    depth: u32,
    budget: &OracleBudget,
) -> Enumeration {
    use Program::*;
    if depth == 0 {
        return Enumeration::Undetermined;
    }
    match type_value {
        Void => Enumeration::Inhabitants(vec![]),
        Unit => Enumeration::Inhabitants(vec![Ax]),
        Bool => Enumeration::Inhabitants(vec![Tt, Ff]),
        Nat => Enumeration::Inhabitants((0..=budget.enum_depth).map(Program::numeral).collect()),
        Eq(..) => Enumeration::Inhabitants(vec![Ax]),
        Sg(dom, fam) => {
            let dv = match eval_unchecked(dom, budget.fuel) {
                EvalOutcome::Val(v, _) => v,
                _ => return Enumeration::Undetermined,
            };
            let firsts = match enumerate(world, &dv, depth - 1, budget) {
                Enumeration::Inhabitants(c) => c,
                other => return other,
            };
            let mut out = Vec::new();
            for a in firsts {
                let fv = match eval_unchecked(&subst_last(fam, 0, &a), budget.fuel) {
                    EvalOutcome::Val(v, _) => v,
                    _ => return Enumeration::Undetermined,
                };
                match enumerate(world, &fv, depth - 1, budget) {
                    Enumeration::Inhabitants(seconds) => {
                        for b in seconds {
                            out.push(Program::pair(a.clone(), b));
                            if out.len() > 64 {
                                return Enumeration::Undetermined;
                            }
                        }
                    }
                    other => return other,
                }
            }
            Enumeration::Inhabitants(out)
        }
        Later(k, body) => match world.time(*k) {
            // at time zero any closed program inhabits; one placeholder is enough
            Some(0) => Enumeration::Inhabitants(vec![Ax]),
            Some(_) => {
                let ticked = world.tick(*k).expect("time is positive");
                let bv = match eval_unchecked(body, budget.fuel) {
                    EvalOutcome::Val(v, _) => v,
                    _ => return Enumeration::Undetermined,
                };
                enumerate(&ticked, &bv, depth - 1, budget)
            }
            None => Enumeration::Undetermined,
        },
        Pi(..) => Enumeration::HigherOrder("function domain"),
        WTy(..) => Enumeration::HigherOrder("tree domain"),
        Univ(_) => Enumeration::HigherOrder("universe domain"),
        KProd(..) => Enumeration::HigherOrder("clock-product domain"),
        Isect(..) => match canon_type_value(type_value, depth, budget) {
            Ok(c) if !matches!(c, Isect(..)) => enumerate(world, &c, depth - 1, budget),
            _ => Enumeration::HigherOrder("intersection domain"),
        },
        _ => Enumeration::Undetermined,
    }
}

#[allow(clippy::too_many_arguments)]
fn test_at(
    world: &World,
    type_value: &Program,
    clause: Clause,
    m0: &Program,
    m1: &Program,
    level: u32,
    depth: u32,
    budget: &OracleBudget,
) -> Answer {
    use Program::*;
    if depth == 0 {
        return Answer::unknown("membership depth exhausted");
    }
    match clause {
        Clause::Void => Answer::no("the empty type has no members"),
        Clause::Unit => value_rel(m0, m1, budget, |v0, v1| matches!((v0, v1), (Ax, Ax))),
        Clause::Bool => value_rel(m0, m1, budget, |v0, v1| {
            matches!((v0, v1), (Tt, Tt) | (Ff, Ff))
        }),
        Clause::Nat => {
            let mut a = m0.clone();
            let mut b = m1.clone();
            for _ in 0..=budget.unfold_depth {
                let (va, vb) = match (
                    eval_unchecked(&a, budget.fuel),
                    eval_unchecked(&b, budget.fuel),
                ) {
                    (EvalOutcome::Val(va, _), EvalOutcome::Val(vb, _)) => (va, vb),
                    (EvalOutcome::OutOfFuel(_), _) | (_, EvalOutcome::OutOfFuel(_)) => {
                        return Answer::unknown("evaluation fuel")
                    }
                    _ => return Answer::no("a side is stuck"),
                };
                match (va, vb) {
                    (Ze, Ze) => return Answer::yes(),
                    (Su(pa), Su(pb)) => {
                        a = *pa;
                        b = *pb;
                    }
                    _ => return Answer::no("numeral shapes disagree"),
                }
            }
            Answer::unknown("numeral unfolding depth")
        }
        Clause::Sg => {
            let (dom, fam) = match type_value {
                Sg(a, b) => (a, b),
                _ => unreachable!(),
            };
            let first = member_at(
                world,
                &Program::fst(m0.clone()),
                &Program::fst(m1.clone()),
                dom,
                level,
                depth - 1,
                budget,
            );
            first.and(|| {
                let at = subst_last(fam, 0, &Program::fst(m0.clone()));
                member_at(
                    world,
                    &Program::snd(m0.clone()),
                    &Program::snd(m1.clone()),
                    &at,
                    level,
                    depth - 1,
                    budget,
                )
            })
        }
        Clause::Pi => {
            let (dom, fam) = match type_value {
                Pi(a, b) => (a, b),
                _ => unreachable!(),
            };
            let dom_rel = match interp_at(world, dom, level, depth - 1, budget) {
                Ok(r) => r,
                Err(InterpFailure::NotAType(r)) => return Answer::no(r),
                Err(InterpFailure::Exhausted(r)) => return Answer::unknown(r),
            };
            let cands = match enumerate(world, &dom_rel.value, depth - 1, budget) {
                Enumeration::Inhabitants(c) => c,
                Enumeration::HigherOrder(what) => {
                    return Answer::unknown_ho(format!(
                        "cannot enumerate a {what}; members probed nowhere"
                    ))
                }
                Enumeration::Undetermined => return Answer::unknown("domain enumeration budget"),
            };
            all_of(
                cands
                    .into_iter()
                    .filter(|d| dom_rel.test(d, d).tri == Tri::Yes)
                    .map(|d| {
                        let cod = subst_last(fam, 0, &d);
                        member_at(
                            world,
                            &Program::app(m0.clone(), d.clone()),
                            &Program::app(m1.clone(), d),
                            &cod,
                            level,
                            depth - 1,
                            budget,
                        )
                    }),
            )
        }
        Clause::W => {
            let (dom, fam) = match type_value {
                WTy(a, b) => (a, b),
                _ => unreachable!(),
            };
            let (v0, v1) = match (
                eval_unchecked(m0, budget.fuel),
                eval_unchecked(m1, budget.fuel),
            ) {
                (EvalOutcome::Val(v0, _), EvalOutcome::Val(v1, _)) => (v0, v1),
                (EvalOutcome::OutOfFuel(_), _) | (_, EvalOutcome::OutOfFuel(_)) => {
                    return Answer::unknown("evaluation fuel")
                }
                _ => return Answer::no("a side is stuck"),
            };
            let ((l0, f0), (l1, f1)) = match (v0, v1) {
                (Sup(l0, f0), Sup(l1, f1)) => ((*l0, *f0), (*l1, *f1)),
                _ => return Answer::no("tree members must evaluate to sup"),
            };
            let labels = member_at(world, &l0, &l1, dom, level, depth - 1, budget);
            labels.and(|| {
                let idx_ty = subst_last(fam, 0, &l0);
                let idx_val = match eval_unchecked(&idx_ty, budget.fuel) {
                    EvalOutcome::Val(v, _) => v,
                    EvalOutcome::OutOfFuel(_) => return Answer::unknown("evaluation fuel"),
                    EvalOutcome::Stuck(_) => return Answer::no("subtree index type is stuck"),
                };
                let cands = match enumerate(world, &idx_val, depth - 1, budget) {
                    Enumeration::Inhabitants(c) => c,
                    Enumeration::HigherOrder(what) => {
                        return Answer::unknown_ho(format!("cannot enumerate a {what}"))
                    }
                    Enumeration::Undetermined => {
                        return Answer::unknown("subtree index enumeration budget")
                    }
                };
                all_of(cands.into_iter().map(|d| {
                    test_at(
                        world,
                        type_value,
                        Clause::W,
                        &subst_last(&f0, 0, &d),
                        &subst_last(&f1, 0, &d),
                        level,
                        depth - 1,
                        budget,
                    )
                }))
            })
        }
        Clause::Eq => {
            let (car, l, r) = match type_value {
                Eq(a, l, r) => (a, l, r),
                _ => unreachable!(),
            };
            let guard = member_at(world, l, r, car, level, depth - 1, budget);
            match guard.tri {
                Tri::No => Answer::no("equality does not hold, so the type is empty"),
                Tri::Unknown => guard,
                Tri::Yes => value_rel(m0, m1, budget, |v0, v1| matches!((v0, v1), (Ax, Ax))),
            }
        }
        Clause::LaterTotal => Answer::yes(),
        Clause::Later => {
            let (k, body) = match type_value {
                Later(k, b) => (*k, b),
                _ => unreachable!(),
            };
            let ticked = world.tick(k).expect("later clause requires time left");
            member_at(&ticked, m0, m1, body, level, depth - 1, budget)
        }
        Clause::Isect | Clause::KProd => {
            let (k, body) = match type_value {
                Isect(k, b) | KProd(k, b) => (*k, b),
                _ => unreachable!(),
            };
            let applied = clause == Clause::KProd;
            all_of(
                clock_instances(world, &body.all_clocks(), budget)
                    .into_iter()
                    .map(|(w, kappa)| {
                        let inst = instantiate_clock(body, k, kappa);
                        let (a0, a1) = if applied {
                            (
                                Program::capp(m0.clone(), kappa),
                                Program::capp(m1.clone(), kappa),
                            )
                        } else {
                            (m0.clone(), m1.clone())
                        };
                        member_at(&w, &a0, &a1, &inst, level, depth - 1, budget)
                    }),
            )
        }
        Clause::Univ => {
            let i = match type_value {
                Univ(i) => *i,
                _ => unreachable!(),
            };
            sim_type(world, m0, m1, i, depth - 1, budget)
        }
    }
}

fn value_rel(
    m0: &Program,
    m1: &Program,
    budget: &OracleBudget,
    good: impl Fn(&Program, &Program) -> bool,
) -> Answer {
    match (
        eval_unchecked(m0, budget.fuel),
        eval_unchecked(m1, budget.fuel),
    ) {
        (EvalOutcome::Val(v0, _), EvalOutcome::Val(v1, _)) => {
            if good(&v0, &v1) {
                Answer::yes()
            } else {
                Answer::no(format!("values do not match: {v0:?} vs {v1:?}"))
            }
        }
        (EvalOutcome::OutOfFuel(_), _) | (_, EvalOutcome::OutOfFuel(_)) => {
            Answer::unknown("evaluation fuel")
        }
        _ => Answer::no("a side is stuck"),
    }
}

/// Equality of two programs as types at universe level `i`: both interpret
/// and they denote the same relation.
pub fn sim_type_check(
    world: &World,
    a0: &Program,
    a1: &Program,
    i: u32,
    budget: &OracleBudget,
) -> Answer {
    sim_type(world, a0, a1, i, budget.unfold_depth, budget)
}

fn sim_type(
    world: &World,
    a0: &Program,
    a1: &Program,
    i: u32,
    depth: u32,
    budget: &OracleBudget,
) -> Answer {
    if depth == 0 {
        return Answer::unknown("type comparison depth");
    }
    let r0 = match interp_at(world, a0, i, depth, budget) {
        Ok(r) => r,
        Err(InterpFailure::NotAType(r)) => return Answer::no(format!("left: {r}")),
        Err(InterpFailure::Exhausted(r)) => return Answer::unknown(format!("left: {r}")),
    };
    let r1 = match interp_at(world, a1, i, depth, budget) {
        Ok(r) => r,
        Err(InterpFailure::NotAType(r)) => return Answer::no(format!("right: {r}")),
        Err(InterpFailure::Exhausted(r)) => return Answer::unknown(format!("right: {r}")),
    };
    let c0 = match canon_type_value(&r0.value, depth, budget) {
        Ok(v) => v,
        Err(a) => return a,
    };
    let c1 = match canon_type_value(&r1.value, depth, budget) {
        Ok(v) => v,
        Err(a) => return a,
    };
    sim_canon(world, &c0, &c1, &r0, &r1, i, depth, budget)
}

/// Bring an intersection-headed type value to a comparable head using
/// validated identities: a quantified clock that does not occur drops, a
/// later on the quantified clock directly under the intersection deletes,
/// and intersection distributes over a pair type.
fn canon_type_value(v: &Program, depth: u32, budget: &OracleBudget) -> Result<Program, Answer> {
    use Program::*;
    let mut cur = v.clone();
    for _ in 0..depth.max(1) {
        match &cur {
            Isect(k, body) => {
                let bv = match eval_unchecked(body, budget.fuel) {
                    EvalOutcome::Val(x, _) => x,
                    EvalOutcome::OutOfFuel(_) => return Err(Answer::unknown("evaluation fuel")),
                    EvalOutcome::Stuck(_) => return Err(Answer::no("intersection body is stuck")),
                };
                if !bv.free_clocks().contains(k) {
                    cur = bv;
                    continue;
                }
                match &bv {
                    Later(k2, inner) if k2 == k => {
                        cur = Program::isect(*k, (**inner).clone());
                        continue;
                    }
                    Sg(dom, fam) => {
                        cur = Program::sg(
                            Program::isect(*k, (**dom).clone()),
                            Program::isect(*k, (**fam).clone()),
                        );
                        break;
                    }
                    _ => {
                        cur = Program::isect(*k, bv);
                        break;
                    }
                }
            }
            _ => break,
        }
    }
    Ok(cur)
}

#[allow(clippy::too_many_arguments)]
fn sim_canon(
    world: &World,
    c0: &Program,
    c1: &Program,
    r0: &TypeRel,
    r1: &TypeRel,
    i: u32,
    depth: u32,
    budget: &OracleBudget,
) -> Answer {
    use Program::*;
    if c0.alpha_eq(c1) {
        return Answer::yes();
    }
    match (c0, c1) {
        (Void, Void) | (Unit, Unit) | (Bool, Bool) | (Nat, Nat) => Answer::yes(),
        (Univ(a), Univ(b)) => {
            if a == b {
                Answer::yes()
            } else {
                Answer::no("distinct universe levels denote distinct relations")
            }
        }
        (Sg(d0, f0), Sg(d1, f1)) | (Pi(d0, f0), Pi(d1, f1)) | (WTy(d0, f0), WTy(d1, f1)) => {
            let doms = sim_type(world, d0, d1, i, depth - 1, budget);
            doms.and(|| {
                let dr = match interp_at(world, d0, i, depth - 1, budget) {
                    Ok(r) => r,
                    Err(InterpFailure::NotAType(r)) => return Answer::no(r),
                    Err(InterpFailure::Exhausted(r)) => return Answer::unknown(r),
                };
                let cands = match enumerate(world, &dr.value, depth - 1, budget) {
                    Enumeration::Inhabitants(c) => c,
                    Enumeration::HigherOrder(what) => {
                        return Answer::unknown_ho(format!("cannot enumerate a {what}"))
                    }
                    Enumeration::Undetermined => return Answer::unknown("domain enumeration"),
                };
                all_of(
                    cands
                        .into_iter()
                        .filter(|d| dr.test(d, d).tri == Tri::Yes)
                        .map(|d| {
                            sim_type(
                                world,
                                &subst_last(f0, 0, &d),
                                &subst_last(f1, 0, &d),
                                i,
                                depth - 1,
                                budget,
                            )
                        }),
                )
            })
        }
        (Eq(car0, l0, r0e), Eq(car1, l1, r1e)) => {
            // the relation of an equality type is determined by whether its
            // endpoints are related in the carrier
            let g0 = member_at(world, l0, r0e, car0, i, depth - 1, budget);
            let g1 = member_at(world, l1, r1e, car1, i, depth - 1, budget);
            match (g0.tri, g1.tri) {
                (Tri::Yes, Tri::Yes) | (Tri::No, Tri::No) => Answer::yes(),
                (Tri::Yes, Tri::No) | (Tri::No, Tri::Yes) => {
                    Answer::no("one equality holds and the other does not")
                }
                _ => Answer::unknown("equality guard undetermined"),
            }
        }
        (Later(k0, b0), Later(k1, b1)) => {
            let t0 = world.time(*k0).unwrap_or(0);
            let t1 = world.time(*k1).unwrap_or(0);
            if t0 == 0 && t1 == 0 {
                return Answer::yes();
            }
            if k0 == k1 {
                let ticked = world.tick(*k0).expect("time is positive");
                return sim_type(&ticked, b0, b1, i, depth - 1, budget);
            }
            distinguish_by_witness(world, c0, c1, r0, r1, depth, budget)
        }
        (Isect(k0, b0), Isect(k1, b1)) | (KProd(k0, b0), KProd(k1, b1)) => {
            let mut avoid = b0.all_clocks();
            avoid.extend(b1.all_clocks());
            all_of(
                clock_instances(world, &avoid, budget)
                    .into_iter()
                    .map(|(w, kappa)| {
                        sim_type(
                            &w,
                            &instantiate_clock(b0, *k0, kappa),
                            &instantiate_clock(b1, *k1, kappa),
                            i,
                            depth - 1,
                            budget,
                        )
                    }),
            )
        }
        _ => distinguish_by_witness(world, c0, c1, r0, r1, depth, budget),
    }
}

/// Try to refute type equality by finding a probe pair on which the two
/// relations visibly disagree. Only a disagreement is conclusive.
fn distinguish_by_witness(
    world: &World,
    c0: &Program,
    c1: &Program,
    r0: &TypeRel,
    r1: &TypeRel,
    depth: u32,
    budget: &OracleBudget,
) -> Answer {
    let mut probes: Vec<Program> = vec![
        Program::Tt,
        Program::Ff,
        Program::Ze,
        Program::Ax,
        Program::numeral(1),
    ];
    for side in [c0, c1] {
        if let Enumeration::Inhabitants(c) =
            enumerate(world, side, depth.saturating_sub(1), budget)
        {
            probes.extend(c);
        }
    }
    for p in &probes {
        let a0 = r0.test(p, p);
        let a1 = r1.test(p, p);
        match (a0.tri, a1.tri) {
            (Tri::Yes, Tri::No) | (Tri::No, Tri::Yes) => {
                return Answer::no(format!("relations disagree on probe {p:?}"))
            }
            _ => {}
        }
    }
    Answer::unknown("type values are not structurally comparable")
}

/// Outcome of the canonicity check on a closed boolean program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonicityOutcome {
    Tt,
    Ff,
    Fail(String),
}

/// A derivation-checked closed boolean must evaluate to `tt` or `ff`.
pub fn canonicity_check(m: &Program, fuel: u64) -> CanonicityOutcome {
    match eval_unchecked(m, fuel) {
        EvalOutcome::Val(Program::Tt, _) => CanonicityOutcome::Tt,
        EvalOutcome::Val(Program::Ff, _) => CanonicityOutcome::Ff,
        EvalOutcome::Val(v, _) => {
            CanonicityOutcome::Fail(format!("evaluated to non-boolean value {v:?}"))
        }
        EvalOutcome::OutOfFuel(_) => CanonicityOutcome::Fail("out of fuel".into()),
        EvalOutcome::Stuck(m) => CanonicityOutcome::Fail(format!("stuck at {m:?}")),
    }
}

/// A violation found by [`per_audit`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PerViolation {
    Symmetry {
        pair: (Program, Program),
    },
    Transitivity {
        through: (Program, Program, Program),
    },
    Approximation {
        original: Program,
        replacement: Program,
        partner: Program,
    },
}

#[derive(Debug, Clone, Default)]
pub struct PerAuditReport {
    pub violations: Vec<PerViolation>,
}

impl PerAuditReport {
    pub fn clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check that the `Yes`-fragment of a membership test behaves like a
/// computational PER on the sample: symmetric, transitive, and closed under
/// replacing the left element by a Kleene-equivalent program.
pub fn per_audit_with(
    test: impl Fn(&Program, &Program) -> Tri,
    sample: &[(Program, Program)],
    fuel: u64,
) -> PerAuditReport {
    let mut report = PerAuditReport::default();
    let yes: Vec<(Program, Program)> = sample
        .iter()
        .filter(|(a, b)| test(a, b) == Tri::Yes)
        .cloned()
        .collect();
    for (a, b) in &yes {
        if test(b, a) != Tri::Yes {
            report.violations.push(PerViolation::Symmetry {
                pair: (a.clone(), b.clone()),
            });
        }
    }
    for (a, b) in &yes {
        for (b2, c) in &yes {
            if b.alpha_eq(b2) && test(a, c) != Tri::Yes {
                report.violations.push(PerViolation::Transitivity {
                    through: (a.clone(), b.clone(), c.clone()),
                });
            }
        }
    }
    // candidate replacements: every program appearing in the sample
    let mut pool: Vec<Program> = Vec::new();
    for (a, b) in sample {
        pool.push(a.clone());
        pool.push(b.clone());
    }
    for (a, b) in &yes {
        for a2 in &pool {
            if closed_sq_bounded(a, a2, fuel) == Tri::Yes && test(a2, b) == Tri::No {
                report.violations.push(PerViolation::Approximation {
                    original: a.clone(),
                    replacement: a2.clone(),
                    partner: b.clone(),
                });
            }
        }
    }
    report
}

/// [`per_audit_with`] applied to a type's membership relation.
pub fn per_audit(rel: &TypeRel, sample: &[(Program, Program)], fuel: u64) -> PerAuditReport {
    per_audit_with(|a, b| rel.test(a, b).tri, sample, fuel)
}

//! Finite-truncation forcing lab for the internal logic of the clock topos:
//! worlds over a fixed clock pool with bounded times, world morphisms,
//! monotone proposition families, the forcing clauses, and exhaustive
//! theorem sweeps.

use std::collections::{BTreeMap, BTreeSet};

use crate::program::ClockName;
use crate::semantics::World;

/// Truncation parameters: a pool of clock names and a time bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncParams {
    pool: Vec<ClockName>,
    time_bound: u32,
}

impl TruncParams {
    /// Theorem sweeps need headroom: at least two pool clocks and a positive
    /// time bound.
    pub fn new(pool_size: u32, time_bound: u32) -> Result<TruncParams, String> {
        if pool_size < 2 {
            return Err("the pool must contain at least two clocks".into());
        }
        if time_bound < 1 {
            return Err("the time bound must be at least one".into());
        }
        Ok(Self::unchecked(pool_size, time_bound))
    }

    /// Smaller truncations are still meaningful for world enumeration.
    pub fn unchecked(pool_size: u32, time_bound: u32) -> TruncParams {
        TruncParams {
            pool: (0..pool_size).map(ClockName).collect(),
            time_bound,
        }
    }

    pub fn pool(&self) -> &[ClockName] {
        &self.pool
    }

    pub fn time_bound(&self) -> u32 {
        self.time_bound
    }
}

/// All worlds of the truncation: non-empty subsets of the pool with all time
/// assignments up to the bound.
pub fn enumerate_worlds(p: &TruncParams) -> Vec<World> {
    let n = p.pool.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let clocks: Vec<ClockName> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| p.pool[i])
            .collect();
        let mut assignments: Vec<BTreeMap<ClockName, u32>> = vec![BTreeMap::new()];
        for k in &clocks {
            let mut next = Vec::new();
            for a in &assignments {
                for t in 0..=p.time_bound {
                    let mut a = a.clone();
                    a.insert(*k, t);
                    next.push(a);
                }
            }
            assignments = next;
        }
        for a in assignments {
            out.push(World::new(a).expect("subsets are non-empty"));
        }
    }
    out.sort();
    out
}

/// A morphism from `source` into `target`: a function `dom(target) ->
/// dom(source)` along which the source times are bounded by the target
/// times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldMorphism {
    pub source: World,
    pub target: World,
    map: BTreeMap<ClockName, ClockName>,
}

impl WorldMorphism {
    pub fn new(
        source: World,
        target: World,
        map: BTreeMap<ClockName, ClockName>,
    ) -> Result<WorldMorphism, String> {
        for k in target.domain() {
            let img = map
                .get(&k)
                .ok_or_else(|| format!("the map misses clock {k}"))?;
            let st = source
                .time(*img)
                .ok_or_else(|| format!("{img} is not a clock of the source"))?;
            let tt = target.time(k).expect("k ranges over the target domain");
            if st > tt {
                return Err(format!(
                    "time condition fails at {k}: source {st} > target {tt}"
                ));
            }
        }
        if map.len() != target.len() {
            return Err("the map mentions clocks outside the target".into());
        }
        Ok(WorldMorphism {
            source,
            target,
            map,
        })
    }

    pub fn identity(w: &World) -> WorldMorphism {
        WorldMorphism {
            source: w.clone(),
            target: w.clone(),
            map: w.domain().map(|k| (k, k)).collect(),
        }
    }

    /// Pull a clock of the target back to a clock of the source.
    pub fn apply(&self, k: ClockName) -> Option<ClockName> {
        self.map.get(&k).copied()
    }

    /// Composition: `other : W -> V` after `self : V -> U` is `W -> U`.
    pub fn compose(&self, other: &WorldMorphism) -> Result<WorldMorphism, String> {
        if other.target != self.source {
            return Err("morphisms do not meet".into());
        }
        let map = self
            .target
            .domain()
            .map(|k| {
                let mid = self.map[&k];
                (k, other.map[&mid])
            })
            .collect();
        WorldMorphism::new(other.source.clone(), self.target.clone(), map)
    }
}

/// Every morphism from `source` into `target`.
pub fn enumerate_morphisms(source: &World, target: &World) -> Vec<WorldMorphism> {
    let tclocks: Vec<ClockName> = target.domain().collect();
    let sclocks: Vec<ClockName> = source.domain().collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; tclocks.len()];
    'outer: loop {
        let map: BTreeMap<ClockName, ClockName> = tclocks
            .iter()
            .zip(&choice)
            .map(|(k, i)| (*k, sclocks[*i]))
            .collect();
        if let Ok(m) = WorldMorphism::new(source.clone(), target.clone(), map) {
            out.push(m);
        }
        for slot in choice.iter_mut() {
            *slot += 1;
            if *slot < sclocks.len() {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    out
}

/// A decidable, monotone assignment of truth values to worlds, optionally
/// depending on a clock of the world. Monotonicity (truth is preserved along
/// every morphism of the truncation) is validated at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropFamily {
    pub name: String,
    clocked: bool,
    true_at: BTreeSet<(World, Option<ClockName>)>,
}

impl PropFamily {
    pub fn plain(
        name: impl Into<String>,
        true_worlds: impl IntoIterator<Item = World>,
        p: &TruncParams,
    ) -> Result<PropFamily, String> {
        let fam = PropFamily {
            name: name.into(),
            clocked: false,
            true_at: true_worlds.into_iter().map(|w| (w, None)).collect(),
        };
        fam.validate_monotone(p)?;
        Ok(fam)
    }

    pub fn clocked(
        name: impl Into<String>,
        true_points: impl IntoIterator<Item = (World, ClockName)>,
        p: &TruncParams,
    ) -> Result<PropFamily, String> {
        let fam = PropFamily {
            name: name.into(),
            clocked: true,
            true_at: true_points
                .into_iter()
                .map(|(w, k)| (w, Some(k)))
                .collect(),
        };
        fam.validate_monotone(p)?;
        Ok(fam)
    }

    pub fn is_clocked(&self) -> bool {
        self.clocked
    }

    pub fn holds(&self, w: &World, clock: Option<ClockName>) -> bool {
        self.true_at.contains(&(w.clone(), clock))
    }

    pub fn true_points(&self) -> impl Iterator<Item = &(World, Option<ClockName>)> {
        self.true_at.iter()
    }

    fn validate_monotone(&self, p: &TruncParams) -> Result<(), String> {
        let worlds = enumerate_worlds(p);
        for (u, kopt) in &self.true_at {
            for v in &worlds {
                for rho in enumerate_morphisms(v, u) {
                    let image = kopt.map(|k| rho.apply(k).expect("k is in the target"));
                    if !self.true_at.contains(&(v.clone(), image)) {
                        return Err(format!(
                            "family `{}` is not monotone: true at {u} but not at {v}",
                            self.name
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A reference to a clock inside a formula: bound by an enclosing clock
/// quantifier (innermost is 0) or supplied by the external assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockRef {
    Bound(usize),
    Free(usize),
}

/// Formulas of the internal logic, with atoms drawn from a family table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Top,
    Bot,
    Atom(usize, Option<ClockRef>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Clock quantifier, by the world-extension clause: one fresh pool clock
    /// at every time `0..=T`.
    ForallClk(Box<Formula>),
    /// Clock quantifier over fresh-clock times `0..T` only: the fragment the
    /// truncation determines when the premise certifying time `t` lives one
    /// later-level up, at `t + 1`.
    ForallClkUnder(Box<Formula>),
    ExistsClk(Box<Formula>),
    Later(ClockRef, Box<Formula>),
    /// Finite disjunction, used for existentials over constant finite
    /// objects (the witness clause makes them pointwise).
    FiniteOr(Vec<Formula>),
    FiniteAnd(Vec<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn forall(a: Formula) -> Formula {
        Formula::ForallClk(Box::new(a))
    }
    pub fn exists(a: Formula) -> Formula {
        Formula::ExistsClk(Box::new(a))
    }
    pub fn later(k: ClockRef, a: Formula) -> Formula {
        Formula::Later(k, Box::new(a))
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    fn check_scope(&self, depth: usize, free: usize, families: usize) -> Result<(), String> {
        match self {
            Formula::Top | Formula::Bot => Ok(()),
            Formula::Atom(f, kref) => {
                if *f >= families {
                    return Err(format!("atom {f} has no family"));
                }
                if let Some(ClockRef::Bound(i)) = kref {
                    if *i >= depth {
                        return Err(format!("bound clock {i} escapes"));
                    }
                }
                if let Some(ClockRef::Free(i)) = kref {
                    if *i >= free {
                        return Err(format!("free clock {i} has no assignment"));
                    }
                }
                Ok(())
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.check_scope(depth, free, families)?;
                b.check_scope(depth, free, families)
            }
            Formula::ForallClk(a) | Formula::ForallClkUnder(a) | Formula::ExistsClk(a) => {
                a.check_scope(depth + 1, free, families)
            }
            Formula::Later(kref, a) => {
                match kref {
                    ClockRef::Bound(i) if *i >= depth => {
                        return Err(format!("bound clock {i} escapes"))
                    }
                    ClockRef::Free(i) if *i >= free => {
                        return Err(format!("free clock {i} has no assignment"))
                    }
                    _ => {}
                }
                a.check_scope(depth, free, families)
            }
            Formula::FiniteOr(fs) | Formula::FiniteAnd(fs) => {
                for f in fs {
                    f.check_scope(depth, free, families)?;
                }
                Ok(())
            }
        }
    }
}

/// The compiled truncation: worlds, ticks, and morphisms, ready for
/// exhaustive sweeps.
pub struct ForcingLab {
    params: TruncParams,
    worlds: Vec<World>,
    index: BTreeMap<World, usize>,
    clock_lists: Vec<Vec<ClockName>>,
    /// `ticks[w][i]`: world after decrementing the `i`-th clock, if possible.
    ticks: Vec<Vec<Option<usize>>>,
    /// `into[u]`: every `(v, map)` with `map[i]` the source-clock index the
    /// `i`-th target clock pulls back to.
    into: Vec<Vec<(usize, Vec<u8>)>>,
}

impl ForcingLab {
    pub fn new(params: &TruncParams) -> ForcingLab {
        let worlds = enumerate_worlds(params);
        let index: BTreeMap<World, usize> =
            worlds.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let clock_lists: Vec<Vec<ClockName>> =
            worlds.iter().map(|w| w.domain().collect()).collect();
        let ticks = worlds
            .iter()
            .map(|w| {
                w.domain()
                    .map(|k| w.tick(k).ok().map(|t| index[&t]))
                    .collect()
            })
            .collect();
        let mut into = Vec::with_capacity(worlds.len());
        for u in &worlds {
            let mut list = Vec::new();
            for (vi, v) in worlds.iter().enumerate() {
                for m in enumerate_morphisms(v, u) {
                    let map = clock_lists[index[u]]
                        .iter()
                        .map(|k| {
                            let img = m.apply(*k).expect("total on the target");
                            clock_lists[vi].iter().position(|c| *c == img).unwrap() as u8
                        })
                        .collect();
                    list.push((vi, map));
                }
            }
            into.push(list);
        }
        ForcingLab {
            params: params.clone(),
            worlds,
            index,
            clock_lists,
            ticks,
            into,
        }
    }

    pub fn params(&self) -> &TruncParams {
        &self.params
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn world_index(&self, w: &World) -> Option<usize> {
        self.index.get(w).copied()
    }

    fn compile_family(&self, fam: &PropFamily) -> CompiledFamily {
        let stride = self.params.pool.len() + 1;
        let mut bits = vec![false; self.worlds.len() * stride];
        for (w, kopt) in fam.true_points() {
            if let Some(wi) = self.world_index(w) {
                let slot = match kopt {
                    None => 0,
                    Some(k) => {
                        1 + self.clock_lists[wi]
                            .iter()
                            .position(|c| c == k)
                            .expect("clock is in the world")
                    }
                };
                bits[wi * stride + slot] = true;
            }
        }
        CompiledFamily { bits, stride }
    }

    /// Evaluate the forcing clauses. `free` assigns the formula's free clock
    /// slots to clocks of `world`.
    pub fn forces(
        &self,
        world: &World,
        formula: &Formula,
        families: &[PropFamily],
        free: &[ClockName],
    ) -> Result<bool, String> {
        formula.check_scope(0, free.len(), families.len())?;
        let wi = self
            .world_index(world)
            .ok_or("the world is outside the truncation")?;
        if world.len() + quantifier_depth(formula) > self.params.pool.len() {
            return Err(
                "no pool headroom: the world leaves too few pool clocks for the formula's quantifiers"
                    .into(),
            );
        }
        let compiled: Vec<CompiledFamily> =
            families.iter().map(|f| self.compile_family(f)).collect();
        let free_idx: Result<Vec<u8>, String> = free
            .iter()
            .map(|k| {
                self.clock_lists[wi]
                    .iter()
                    .position(|c| c == k)
                    .map(|i| i as u8)
                    .ok_or_else(|| format!("free clock {k} is not in the world"))
            })
            .collect();
        let mut env = Vec::new();
        Ok(self.eval(wi, formula, &compiled, &mut env, &free_idx?))
    }

    fn eval(
        &self,
        w: usize,
        f: &Formula,
        families: &[CompiledFamily],
        env: &mut Vec<u8>,
        free: &[u8],
    ) -> bool {
        match f {
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Atom(fi, kref) => {
                let fam = &families[*fi];
                let slot = match kref {
                    None => 0,
                    Some(ClockRef::Bound(i)) => 1 + env[env.len() - 1 - i] as usize,
                    Some(ClockRef::Free(i)) => 1 + free[*i] as usize,
                };
                fam.bits[w * fam.stride + slot]
            }
            Formula::And(a, b) => {
                self.eval(w, a, families, env, free) && self.eval(w, b, families, env, free)
            }
            Formula::Or(a, b) => {
                self.eval(w, a, families, env, free) || self.eval(w, b, families, env, free)
            }
            Formula::Implies(a, b) => {
                // sources without the pool headroom the bodies need lie
                // outside the effective truncation for this formula
                let need = quantifier_depth(a).max(quantifier_depth(b));
                for (v, map) in &self.into[w] {
                    if self.clock_lists[*v].len() + need > self.params.pool.len() {
                        continue;
                    }
                    let mut env2: Vec<u8> = env.iter().map(|i| map[*i as usize]).collect();
                    let free2: Vec<u8> = free.iter().map(|i| map[*i as usize]).collect();
                    if self.eval(*v, a, families, &mut env2, &free2)
                        && !self.eval(*v, b, families, &mut env2, &free2)
                    {
                        return false;
                    }
                }
                true
            }
            Formula::ForallClk(body) | Formula::ForallClkUnder(body) => {
                // extend the world by one fresh pool clock at each time
                let fresh = self
                    .params
                    .pool
                    .iter()
                    .find(|k| !self.clock_lists[w].contains(k))
                    .copied()
                    .expect("headroom was checked before evaluation");
                let top = match f {
                    Formula::ForallClk(_) => self.params.time_bound,
                    _ => self.params.time_bound.saturating_sub(1),
                };
                for n in 0..=top {
                    let ext = self.worlds[w].with_clock(fresh, n);
                    let v = self.index[&ext];
                    // remap enclosing clock indices by name
                    let remap = |i: &u8| {
                        let name = self.clock_lists[w][*i as usize];
                        self.clock_lists[v].iter().position(|c| *c == name).unwrap() as u8
                    };
                    let mut env2: Vec<u8> = env.iter().map(remap).collect();
                    let free2: Vec<u8> = free.iter().map(remap).collect();
                    let beta = self.clock_lists[v]
                        .iter()
                        .position(|c| *c == fresh)
                        .unwrap() as u8;
                    env2.push(beta);
                    if !self.eval(v, body, families, &mut env2, &free2) {
                        return false;
                    }
                }
                true
            }
            Formula::ExistsClk(body) => {
                for beta in 0..self.clock_lists[w].len() {
                    env.push(beta as u8);
                    let ok = self.eval(w, body, families, env, free);
                    env.pop();
                    if ok {
                        return true;
                    }
                }
                false
            }
            Formula::Later(kref, body) => {
                let i = match kref {
                    ClockRef::Bound(i) => env[env.len() - 1 - i] as usize,
                    ClockRef::Free(i) => free[*i] as usize,
                };
                match self.ticks[w][i] {
                    None => true,
                    Some(v) => {
                        // ticking keeps the clock list, so indices carry over
                        self.eval(v, body, families, env, free)
                    }
                }
            }
            Formula::FiniteOr(fs) => fs.iter().any(|f| self.eval(w, f, families, env, free)),
            Formula::FiniteAnd(fs) => fs.iter().all(|f| self.eval(w, f, families, env, free)),
        }
    }

    /// Every monotone plain family over the truncation, by enumerating the
    /// downward-closed sets of the world preorder.
    pub fn monotone_plain_families(&self) -> Vec<PropFamily> {
        let elems: Vec<(World, Option<ClockName>)> =
            self.worlds.iter().map(|w| (w.clone(), None)).collect();
        self.monotone_families(&elems, false)
    }

    /// Every monotone clocked family over the truncation.
    pub fn monotone_clocked_families(&self) -> Vec<PropFamily> {
        let mut elems = Vec::new();
        for w in &self.worlds {
            for k in w.domain() {
                elems.push((w.clone(), Some(k)));
            }
        }
        self.monotone_families(&elems, true)
    }

    fn monotone_families(
        &self,
        elems: &[(World, Option<ClockName>)],
        clocked: bool,
    ) -> Vec<PropFamily> {
        let n = elems.len();
        // below[i]: elements forced true whenever element i is true
        let mut below: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        let pos: BTreeMap<(World, Option<ClockName>), usize> = elems
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        for (i, (u, kopt)) in elems.iter().enumerate() {
            for v in &self.worlds {
                for rho in enumerate_morphisms(v, u) {
                    let img = kopt.map(|k| rho.apply(k).expect("total"));
                    let j = pos[&(v.clone(), img)];
                    below[i].insert(j);
                }
            }
        }
        // isomorphic elements force each other; collapse them into classes
        // (which share their below-set) so the quotient is a poset
        let mut class_of: Vec<usize> = vec![usize::MAX; n];
        let mut class_key: Vec<&BTreeSet<usize>> = Vec::new();
        let mut class_members: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            match class_key.iter().position(|k| **k == below[i]) {
                Some(c) => {
                    class_of[i] = c;
                    class_members[c].push(i);
                }
                None => {
                    class_of[i] = class_key.len();
                    class_key.push(&below[i]);
                    class_members.push(vec![i]);
                }
            }
        }
        let class_below: Vec<BTreeSet<usize>> = class_members
            .iter()
            .map(|ms| below[ms[0]].iter().map(|j| class_of[*j]).collect())
            .collect();
        let nc = class_members.len();
        // order compatible with the poset: fewer dependencies first
        let mut order: Vec<usize> = (0..nc).collect();
        order.sort_by_key(|c| class_below[*c].len());
        let mut out_classes: Vec<Vec<bool>> = Vec::new();
        let mut current = vec![false; nc];
        enumerate_downsets(&order, &class_below, 0, &mut current, &mut out_classes);
        let out: Vec<Vec<bool>> = out_classes
            .into_iter()
            .map(|cb| {
                let mut bits = vec![false; n];
                for (c, on) in cb.iter().enumerate() {
                    if *on {
                        for m in &class_members[c] {
                            bits[*m] = true;
                        }
                    }
                }
                bits
            })
            .collect();
        out.into_iter()
            .enumerate()
            .map(|(fi, bits)| {
                let pts: Vec<(World, Option<ClockName>)> = elems
                    .iter()
                    .zip(&bits)
                    .filter(|(_, b)| **b)
                    .map(|(e, _)| e.clone())
                    .collect();
                PropFamily {
                    name: format!("fam{fi}"),
                    clocked,
                    true_at: pts.into_iter().collect(),
                }
            })
            .collect()
    }
}

struct CompiledFamily {
    bits: Vec<bool>,
    stride: usize,
}

/// Maximum nesting of clock quantifiers needing a fresh pool clock.
fn quantifier_depth(f: &Formula) -> usize {
    match f {
        Formula::Top | Formula::Bot | Formula::Atom(..) => 0,
        Formula::ForallClk(a) | Formula::ForallClkUnder(a) => 1 + quantifier_depth(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            quantifier_depth(a).max(quantifier_depth(b))
        }
        Formula::ExistsClk(a) | Formula::Later(_, a) => quantifier_depth(a),
        Formula::FiniteOr(fs) | Formula::FiniteAnd(fs) => {
            fs.iter().map(quantifier_depth).max().unwrap_or(0)
        }
    }
}

fn enumerate_downsets(
    order: &[usize],
    below: &[BTreeSet<usize>],
    at: usize,
    current: &mut Vec<bool>,
    out: &mut Vec<Vec<bool>>,
) {
    if at == order.len() {
        out.push(current.clone());
        return;
    }
    let e = order[at];
    // exclude e
    enumerate_downsets(order, below, at + 1, current, out);
    // include e, when everything below it is already in
    if below[e].iter().all(|j| *j == e || current[*j]) {
        current[e] = true;
        enumerate_downsets(order, below, at + 1, current, out);
        current[e] = false;
    }
}

/// The theorems checked by the lab.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    LocalClock,
    ClockIrrelevance,
    DeleteLater,
    LaterUnit,
    LaterAnd,
    LaterImplies,
    Loeb,
    TotalYank,
}

impl Theorem {
    pub const ALL: &'static [Theorem] = &[
        Theorem::LocalClock,
        Theorem::ClockIrrelevance,
        Theorem::DeleteLater,
        Theorem::LaterUnit,
        Theorem::LaterAnd,
        Theorem::LaterImplies,
        Theorem::Loeb,
        Theorem::TotalYank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::LocalClock => "local_clock",
            Theorem::ClockIrrelevance => "clock_irrelevance",
            Theorem::DeleteLater => "delete_later",
            Theorem::LaterUnit => "later_unit",
            Theorem::LaterAnd => "later_and",
            Theorem::LaterImplies => "later_implies",
            Theorem::Loeb => "loeb",
            Theorem::TotalYank => "total_yank",
        }
    }

    pub fn parse(s: &str) -> Option<Theorem> {
        Theorem::ALL.iter().copied().find(|t| t.name() == s)
    }

    /// The external sweep a theorem requires: its formula, how many plain
    /// and clocked families its atoms consume (plain first), and how many
    /// externally chosen world clocks it mentions.
    pub fn sweep(self) -> SweepSpec {
        use ClockRef::*;
        use Formula as F;
        match self {
            Theorem::LocalClock => SweepSpec {
                formula: F::exists(F::Top),
                plain: 0,
                clocked: 0,
                free_clocks: 0,
            },
            Theorem::ClockIrrelevance => SweepSpec {
                formula: F::iff(F::Atom(0, None), F::forall(F::Atom(0, None))),
                plain: 1,
                clocked: 0,
                free_clocks: 0,
            },
            // the premise instance certifying the conclusion at time t sits
            // at t + 1, so the conclusion quantifier stops one time short of
            // the truncation bound
            Theorem::DeleteLater => SweepSpec {
                formula: F::implies(
                    F::forall(F::later(Bound(0), F::Atom(0, Some(Bound(0))))),
                    F::ForallClkUnder(Box::new(F::Atom(0, Some(Bound(0))))),
                ),
                plain: 0,
                clocked: 1,
                free_clocks: 0,
            },
            Theorem::LaterUnit => SweepSpec {
                formula: F::implies(F::Atom(0, None), F::later(Free(0), F::Atom(0, None))),
                plain: 1,
                clocked: 0,
                free_clocks: 1,
            },
            Theorem::LaterAnd => SweepSpec {
                formula: F::iff(
                    F::later(Free(0), F::and(F::Atom(0, None), F::Atom(1, None))),
                    F::and(
                        F::later(Free(0), F::Atom(0, None)),
                        F::later(Free(0), F::Atom(1, None)),
                    ),
                ),
                plain: 2,
                clocked: 0,
                free_clocks: 1,
            },
            Theorem::LaterImplies => SweepSpec {
                formula: F::iff(
                    F::later(Free(0), F::implies(F::Atom(0, None), F::Atom(1, None))),
                    F::implies(
                        F::later(Free(0), F::Atom(0, None)),
                        F::later(Free(0), F::Atom(1, None)),
                    ),
                ),
                plain: 2,
                clocked: 0,
                free_clocks: 1,
            },
            Theorem::Loeb => SweepSpec {
                formula: F::implies(
                    F::implies(F::later(Free(0), F::Atom(0, None)), F::Atom(0, None)),
                    F::Atom(0, None),
                ),
                plain: 1,
                clocked: 0,
                free_clocks: 1,
            },
            // the total, inhabited object is a constant two-element set; its
            // existential is the witness clause, i.e. a finite disjunction
            Theorem::TotalYank => SweepSpec {
                formula: F::implies(
                    F::later(
                        Free(0),
                        F::FiniteOr(vec![F::Atom(0, None), F::Atom(1, None)]),
                    ),
                    F::FiniteOr(vec![
                        F::later(Free(0), F::Atom(0, None)),
                        F::later(Free(0), F::Atom(1, None)),
                    ]),
                ),
                plain: 2,
                clocked: 0,
                free_clocks: 1,
            },
        }
    }
}

/// A formula together with its sweep arity.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub formula: Formula,
    pub plain: usize,
    pub clocked: usize,
    pub free_clocks: usize,
}

/// The non-theorem `forall k. (phi => (later k phi => bot))`, used as a
/// negative control: any inhabited monotone family refutes it.
pub fn negative_control() -> SweepSpec {
    use ClockRef::Bound;
    SweepSpec {
        formula: Formula::forall(Formula::implies(
            Formula::Atom(0, None),
            Formula::implies(
                Formula::later(Bound(0), Formula::Atom(0, None)),
                Formula::Bot,
            ),
        )),
        plain: 1,
        clocked: 0,
        free_clocks: 0,
    }
}

/// A point falsifying a swept formula.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub world: World,
    pub families: Vec<String>,
    pub free_clocks: Vec<ClockName>,
}

#[derive(Debug, Clone)]
pub enum TheoremOutcome {
    Pass { points_checked: u64 },
    Refuted(Counterexample),
}

impl TheoremOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, TheoremOutcome::Pass { .. })
    }
}

fn family_desc(f: &PropFamily) -> String {
    let pts: Vec<String> = f
        .true_points()
        .map(|(w, k)| match k {
            None => w.to_string(),
            Some(k) => format!("{w}@{k}"),
        })
        .collect();
    format!("{{{}}}", pts.join(", "))
}

/// Evaluate a swept formula at every world of the truncation, over every
/// combination of monotone families and world clocks for its slots.
pub fn sweep_formula(lab: &ForcingLab, spec: &SweepSpec) -> Result<TheoremOutcome, String> {
    spec.formula
        .check_scope(0, spec.free_clocks, spec.plain + spec.clocked)?;
    let plains = if spec.plain > 0 {
        lab.monotone_plain_families()
    } else {
        Vec::new()
    };
    let clockeds = if spec.clocked > 0 {
        lab.monotone_clocked_families()
    } else {
        Vec::new()
    };
    let mut checked = 0u64;
    let mut plain_idx = vec![0usize; spec.plain];
    loop {
        let mut clocked_idx = vec![0usize; spec.clocked];
        loop {
            let mut families: Vec<PropFamily> = Vec::new();
            for i in &plain_idx {
                families.push(plains[*i].clone());
            }
            for i in &clocked_idx {
                families.push(clockeds[*i].clone());
            }
            for world in lab.worlds() {
                // pool headroom for quantifier clauses
                if world.len() + quantifier_depth(&spec.formula) > lab.params().pool().len() {
                    continue;
                }
                let clocks: Vec<ClockName> = world.domain().collect();
                let mut free_choice = vec![0usize; spec.free_clocks];
                loop {
                    let free: Vec<ClockName> =
                        free_choice.iter().map(|i| clocks[*i]).collect();
                    checked += 1;
                    if !lab.forces(world, &spec.formula, &families, &free)? {
                        return Ok(TheoremOutcome::Refuted(Counterexample {
                            world: world.clone(),
                            families: families.iter().map(family_desc).collect(),
                            free_clocks: free,
                        }));
                    }
                    if !bump_radix(&mut free_choice, clocks.len()) {
                        break;
                    }
                }
            }
            if !bump_radix(&mut clocked_idx, clockeds.len().max(1)) || spec.clocked == 0 {
                break;
            }
        }
        if !bump_radix(&mut plain_idx, plains.len().max(1)) || spec.plain == 0 {
            break;
        }
    }
    Ok(TheoremOutcome::Pass {
        points_checked: checked,
    })
}

fn bump_radix(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// Check one named theorem over the truncation.
pub fn check_theorem(th: Theorem, p: &TruncParams) -> Result<TheoremOutcome, String> {
    let lab = ForcingLab::new(p);
    sweep_formula(&lab, &th.sweep())
}

//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use gctt_core::program::{ClockName, Program};
use gctt_core::syntax::FormalTerm;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A random well-scoped program in the given scope. Clocks are drawn from a
/// small pool and may occur free.
pub fn gen_program(r: &mut StdRng, scope: usize, size: u32) -> Program {
    let clock = |r: &mut StdRng| ClockName(r.gen_range(0..3));
    if size == 0 {
        // leaves
        return match r.gen_range(0..10) {
            0 if scope > 0 => Program::Var(r.gen_range(0..scope)),
            1 => Program::Ax,
            2 => Program::Tt,
            3 => Program::Ff,
            4 => Program::Ze,
            5 => Program::Void,
            6 => Program::Unit,
            7 => Program::Bool,
            8 => Program::Nat,
            _ => Program::Univ(r.gen_range(0..3)),
        };
    }
    let s = size - 1;
    let half = s / 2;
    match r.gen_range(0..22) {
        0 => Program::lam(gen_program(r, scope + 1, s)),
        1 => Program::klam(clock(r), gen_program(r, scope, s)),
        2 => Program::app(gen_program(r, scope, half), gen_program(r, scope, half)),
        3 => Program::capp(gen_program(r, scope, s), clock(r)),
        4 => Program::fix(gen_program(r, scope + 1, half.min(2))),
        5 => Program::pair(gen_program(r, scope, half), gen_program(r, scope, half)),
        6 => Program::fst(gen_program(r, scope, s)),
        7 => Program::snd(gen_program(r, scope, s)),
        8 => Program::su(gen_program(r, scope, s)),
        9 => Program::if_(
            gen_program(r, scope, half),
            gen_program(r, scope, half),
            gen_program(r, scope, half),
        ),
        10 => Program::ifze(
            gen_program(r, scope, half),
            gen_program(r, scope, half),
            gen_program(r, scope + 1, half),
        ),
        11 => Program::sup(gen_program(r, scope, half), gen_program(r, scope + 1, half)),
        12 => Program::wrec(gen_program(r, scope, half), gen_program(r, scope + 3, half)),
        13 => Program::pi(gen_program(r, scope, half), gen_program(r, scope + 1, half)),
        14 => Program::sg(gen_program(r, scope, half), gen_program(r, scope + 1, half)),
        15 => Program::wty(gen_program(r, scope, half), gen_program(r, scope + 1, half)),
        16 => Program::eq(
            gen_program(r, scope, half),
            gen_program(r, scope, half),
            gen_program(r, scope, half),
        ),
        17 => Program::later(clock(r), gen_program(r, scope, s)),
        18 => Program::isect(clock(r), gen_program(r, scope, s)),
        19 => Program::kprod(clock(r), gen_program(r, scope, s)),
        _ => gen_program(r, scope, 0),
    }
}

const VAR_POOL: &[&str] = &["a", "b", "c", "x", "y"];
const CLK_POOL: &[&str] = &["k", "j"];

/// A random formal term whose free variables and clocks come from the given
/// environments.
pub fn gen_formal(r: &mut StdRng, clocks: &mut Vec<String>, vars: &mut Vec<String>, size: u32) -> FormalTerm {
    let pick = |r: &mut StdRng, pool: &[&str]| pool[r.gen_range(0..pool.len())].to_owned();
    if size == 0 {
        if !vars.is_empty() && r.gen_bool(0.5) {
            let i = r.gen_range(0..vars.len());
            return FormalTerm::var(&vars[i]);
        }
        return match r.gen_range(0..6) {
            0 => FormalTerm::Tt,
            1 => FormalTerm::Ff,
            2 => FormalTerm::Ze,
            3 => FormalTerm::Ax,
            4 => FormalTerm::Bool,
            _ => FormalTerm::Univ(r.gen_range(0..3)),
        };
    }
    let s = size - 1;
    let half = s / 2;
    macro_rules! under_var {
        ($x:expr, $body:expr) => {{
            vars.push($x.clone());
            let b = $body;
            vars.pop();
            b
        }};
    }
    macro_rules! under_clk {
        ($k:expr, $body:expr) => {{
            clocks.push($k.clone());
            let b = $body;
            clocks.pop();
            b
        }};
    }
    match r.gen_range(0..14) {
        0 => {
            let x = pick(r, VAR_POOL);
            let b = under_var!(x, gen_formal(r, clocks, vars, s));
            FormalTerm::lam(&x, b)
        }
        1 => {
            let k = pick(r, CLK_POOL);
            let b = under_clk!(k, gen_formal(r, clocks, vars, s));
            FormalTerm::clk_lam(&k, b)
        }
        2 => FormalTerm::app(
            gen_formal(r, clocks, vars, half),
            gen_formal(r, clocks, vars, half),
        ),
        3 => {
            let x = pick(r, VAR_POOL);
            let b = under_var!(x, gen_formal(r, clocks, vars, half));
            FormalTerm::fix(&x, b)
        }
        4 => FormalTerm::pair(
            gen_formal(r, clocks, vars, half),
            gen_formal(r, clocks, vars, half),
        ),
        5 => FormalTerm::fst(gen_formal(r, clocks, vars, s)),
        6 => FormalTerm::if_(
            gen_formal(r, clocks, vars, half),
            gen_formal(r, clocks, vars, half),
            gen_formal(r, clocks, vars, half),
        ),
        7 => {
            let x = pick(r, VAR_POOL);
            let a = gen_formal(r, clocks, vars, half);
            let b = under_var!(x, gen_formal(r, clocks, vars, half));
            FormalTerm::pi(&x, a, b)
        }
        8 => {
            let x = pick(r, VAR_POOL);
            let a = gen_formal(r, clocks, vars, half);
            let b = under_var!(x, gen_formal(r, clocks, vars, half));
            FormalTerm::sg(&x, a, b)
        }
        9 => {
            let k = pick(r, CLK_POOL);
            let b = under_clk!(k, gen_formal(r, clocks, vars, s));
            FormalTerm::isect(&k, b)
        }
        10 => {
            let k = pick(r, CLK_POOL);
            let b = under_clk!(k, gen_formal(r, clocks, vars, s));
            FormalTerm::kprod(&k, b)
        }
        11 if !clocks.is_empty() => {
            let k = clocks[r.gen_range(0..clocks.len())].clone();
            FormalTerm::later(&k, gen_formal(r, clocks, vars, s))
        }
        12 => {
            let x = pick(r, VAR_POOL);
            let n = gen_formal(r, clocks, vars, half);
            let z = gen_formal(r, clocks, vars, half);
            let sc = under_var!(x, gen_formal(r, clocks, vars, half));
            FormalTerm::ifze(n, z, &x, sc)
        }
        _ => FormalTerm::su(gen_formal(r, clocks, vars, s)),
    }
}

//! Kernel, interpreter, and desk-scale semantic model for a guarded
//! computational type theory with clocks: surface syntax and elaboration,
//! operational semantics, a finite-world membership oracle, a derivation
//! checker for the validated rule set, and a Kripke-Joyal forcing lab.

pub mod elaborate;
pub mod forcing;
pub mod opsem;
pub mod rules;
pub mod program;
pub mod semantics;
pub mod syntax;

pub use opsem::Tri;
pub use program::{ClockName, Program};
pub use syntax::FormalTerm;

/// Shipped example scripts, embedded so the CLI and tests agree on them.
pub mod corpus {
    pub const STREAMS: &str = include_str!("../corpus/streams.gctt");
    pub const CANONICITY: &str = include_str!("../corpus/canonicity.gctt");
    pub const TYPING: &str = include_str!("../corpus/typing.gctt");

    pub const ALL: &[(&str, &str)] = &[
        ("streams.gctt", STREAMS),
        ("canonicity.gctt", CANONICITY),
        ("typing.gctt", TYPING),
    ];
}

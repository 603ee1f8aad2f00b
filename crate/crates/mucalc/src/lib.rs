//! Workbench for the multimodal mu-calculus over fused frame classes.
//!
//! The crate provides, end to end:
//!
//! * a formula language with parser, printer and alternation-hierarchy
//!   classifier ([`formula`]);
//! * finite multimodal Kripke models with JSON I/O, restriction and
//!   isomorphism checking ([`kripke`]);
//! * denotational model checking by fixpoint iteration ([`semantics`]);
//! * parity games with a recursive attractor solver and the PGSolver text
//!   format ([`paritygame`]);
//! * the evaluation game of a formula on a pointed model, reduced to a
//!   parity game ([`evalgame`]);
//! * an encoder that turns parity games back into multimodal Kripke models
//!   whose winning regions are definable by generated formulas ([`encoder`]);
//! * randomized cross-verification pipelines wiring the two model-checking
//!   routes and the two game routes against each other ([`verify`]).

pub mod encoder;
pub mod evalgame;
pub mod formula;
pub mod generate;
pub mod kripke;
pub mod paritygame;
pub mod semantics;
pub mod verify;

//! Keeps the book honest: every chapter under `book/src/` is included as
//! a doc comment here, so `cargo test --doc` compiles and runs each of
//! its Rust code fences. mdbook itself cannot run snippets against
//! workspace crates; this shim can. A failing chapter points at the
//! module named after it.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/subsets-and-dominance.md")]
pub mod subsets_and_dominance {}

#[doc = include_str!("../../../book/src/objectives-and-noise.md")]
pub mod objectives_and_noise {}

#[doc = include_str!("../../../book/src/optimizers.md")]
pub mod optimizers {}

#[doc = include_str!("../../../book/src/robust-evaluation.md")]
pub mod robust_evaluation {}

#[doc = include_str!("../../../book/src/applications.md")]
pub mod applications {}

#[doc = include_str!("../../../book/src/analysis.md")]
pub mod analysis {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

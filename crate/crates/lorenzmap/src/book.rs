//! The guide, embedded chapter by chapter so `cargo test --doc` compiles
//! and runs every code snippet in `book/`. The rendered book is built
//! separately with `mdbook build book`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/symbolic.md")]
pub mod symbolic_sequences {}

#[doc = include_str!("../../../book/src/lorenz-maps.md")]
pub mod lorenz_maps {}

#[doc = include_str!("../../../book/src/kneading-order.md")]
pub mod kneading_order {}

#[doc = include_str!("../../../book/src/renormalization.md")]
pub mod renormalization {}

#[doc = include_str!("../../../book/src/rotation.md")]
pub mod rotation_theory {}

#[doc = include_str!("../../../book/src/invariant-density.md")]
pub mod invariant_density {}

#[doc = include_str!("../../../book/src/two-slope.md")]
pub mod two_slope {}

#[doc = include_str!("../../../book/src/flow.md")]
pub mod flow_harness {}

#[doc = include_str!("../../../book/src/templates.md")]
pub mod template_words {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli_tool {}

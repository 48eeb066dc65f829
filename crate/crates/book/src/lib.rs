//! The guide's chapters, included as module docs so `cargo test` runs every
//! code listing in them.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/valuations.md")]
pub mod valuations {}
#[doc = include_str!("../../../book/src/means.md")]
pub mod means {}
#[doc = include_str!("../../../book/src/algorithm.md")]
pub mod algorithm {}
#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}
#[doc = include_str!("../../../book/src/inequalities.md")]
pub mod inequalities {}
#[doc = include_str!("../../../book/src/hardness.md")]
pub mod hardness {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}

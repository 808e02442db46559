//! The guide under `book/`, compiled so its snippets run as doc-tests.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}
#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}
#[doc = include_str!("../../../book/src/solving.md")]
pub mod solving {}
#[doc = include_str!("../../../book/src/generating.md")]
pub mod generating {}
#[doc = include_str!("../../../book/src/teacher.md")]
pub mod teacher {}
#[doc = include_str!("../../../book/src/agent.md")]
pub mod agent {}
#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}

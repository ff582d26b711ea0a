//! The guide's chapters as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/ingest.md")]
pub mod ingest {}
#[doc = include_str!("../../../book/src/parser.md")]
pub mod parser {}
#[doc = include_str!("../../../book/src/sampler.md")]
pub mod sampler {}
#[doc = include_str!("../../../book/src/analyzer.md")]
pub mod analyzer {}
#[doc = include_str!("../../../book/src/codec.md")]
pub mod codec {}
#[doc = include_str!("../../../book/src/archive.md")]
pub mod archive {}
#[doc = include_str!("../../../book/src/restore.md")]
pub mod restore {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

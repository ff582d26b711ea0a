pub mod analyzer;
pub mod bench;
pub mod codec;
pub mod config;
pub mod error;
pub mod ingest;
pub mod parser;
pub mod pipeline;
pub mod restore;
pub mod sampler;

pub use codec::Backend;
pub use error::{Error, Result};
pub use pipeline::{compress, CompressOptions, CompressSummary, Mode};
pub use restore::decompress;

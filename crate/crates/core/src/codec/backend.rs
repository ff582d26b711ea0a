//! General-purpose compressors wrapped around the column container.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Backend {
    Gzip,
    Bzip2,
    #[default]
    Lzma,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Gzip, Backend::Bzip2, Backend::Lzma];

    pub fn id(self) -> u8 {
        match self {
            Backend::Gzip => 0,
            Backend::Bzip2 => 1,
            Backend::Lzma => 2,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Backend::ALL.into_iter().find(|b| b.id() == id)
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Gzip => "gzip",
            Backend::Bzip2 => "bzip2",
            Backend::Lzma => "lzma",
        }
    }

    /// Compresses at the highest level.
    pub fn compress(self, data: &[u8]) -> Result<Vec<u8>> {
        let fail = |source| Error::Backend {
            backend: self.name(),
            source,
        };
        match self {
            Backend::Gzip => {
                let mut enc = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::best());
                enc.write_all(data).map_err(fail)?;
                enc.finish().map_err(fail)
            }
            Backend::Bzip2 => {
                let mut enc = bzip2::write::BzEncoder::new(Vec::new(), bzip2::Compression::best());
                enc.write_all(data).map_err(fail)?;
                enc.finish().map_err(fail)
            }
            Backend::Lzma => {
                let stream = lzma_stream(data.len()).map_err(|e| fail(e.into()))?;
                let mut enc = xz2::write::XzEncoder::new_stream(Vec::new(), stream);
                enc.write_all(data).map_err(fail)?;
                enc.finish().map_err(fail)
            }
        }
    }

    /// Streaming decoder, for reading a prefix without inflating the rest.
    pub fn decoder<'a>(self, data: &'a [u8]) -> Box<dyn Read + 'a> {
        match self {
            Backend::Gzip => Box::new(flate2::read::GzDecoder::new(data)),
            Backend::Bzip2 => Box::new(bzip2::read::BzDecoder::new(data)),
            Backend::Lzma => Box::new(xz2::read::XzDecoder::new(data)),
        }
    }

    pub fn decompress(self, data: &[u8]) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        self.decoder(data)
            .read_to_end(&mut out)
            .map_err(|source| Error::Backend {
                backend: self.name(),
                source,
            })?;
        Ok(out)
    }
}

/// Preset 9 with the dictionary shrunk to the input size, so small inputs do
/// not pay for a 64 MiB window.
fn lzma_stream(input_len: usize) -> std::result::Result<xz2::stream::Stream, xz2::stream::Error> {
    let mut opts = xz2::stream::LzmaOptions::new_preset(9)?;
    let dict = (input_len as u64).clamp(4096, 64 << 20) as u32;
    opts.dict_size(dict);
    let mut filters = xz2::stream::Filters::new();
    filters.lzma2(&opts);
    xz2::stream::Stream::new_stream_encoder(&filters, xz2::stream::Check::Crc64)
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gzip" | "gz" => Ok(Backend::Gzip),
            "bzip2" | "bz2" => Ok(Backend::Bzip2),
            "lzma" | "xz" => Ok(Backend::Lzma),
            other => Err(Error::parameter(format!("unknown backend `{other}` (expected gzip, bzip2 or lzma)"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_backend_round_trips() {
        let data: Vec<u8> = (0..20_000u32).flat_map(|i| (i % 251).to_le_bytes()).collect();
        for b in Backend::ALL {
            let c = b.compress(&data).unwrap();
            assert!(c.len() < data.len(), "{b}");
            assert_eq!(b.decompress(&c).unwrap(), data, "{b}");
            assert_eq!(b.decompress(&b.compress(b"").unwrap()).unwrap(), b"");
            assert_eq!(Backend::from_id(b.id()), Some(b));
            assert_eq!(b.name().parse::<Backend>().unwrap(), b);
        }
        assert_eq!(Backend::from_id(9), None);
        assert!("zstd".parse::<Backend>().is_err());
    }

    #[test]
    fn damaged_stream_is_rejected() {
        for b in Backend::ALL {
            let mut c = b.compress(b"some log line\nanother log line\n").unwrap();
            let n = c.len();
            c[n / 2] ^= 0x55;
            assert!(b.decompress(&c).map(|d| d != b"some log line\nanother log line\n").unwrap_or(true), "{b}");
        }
    }
}

//! Deterministic corpora for tests and benchmarks.
//!
//! * [`loghub_samples`]: 16 datasets shaped like the loghub 2k samples. When
//!   `LOGHUB_DIR` points at a loghub checkout, `<dir>/<Name>/<Name>_2k.log`
//!   is used instead of the generated text.
//! * [`synthetic_corpora`]: random templates with mixed terminators, invalid
//!   UTF-8 and blank lines.
//! * [`fuzz_bytes`]: binary-ish input with sparse line breaks.
//! * [`large_corpus`]: a mixed corpus of a requested size.

mod loghub;
mod template;

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use loghub::{Dataset, DATASETS};

pub const SAMPLE_LINES: usize = 2000;

pub struct Sample {
    pub name: &'static str,
    /// Loghub-style header format.
    pub format: &'static str,
    pub data: Vec<u8>,
    /// True when read from `LOGHUB_DIR`.
    pub real: bool,
}

fn real_sample(name: &str) -> Option<Vec<u8>> {
    let dir = PathBuf::from(std::env::var_os("LOGHUB_DIR")?);
    std::fs::read(dir.join(name).join(format!("{name}_2k.log"))).ok()
}

pub fn loghub_sample(name: &str) -> Option<Sample> {
    let d = Dataset::by_name(name)?;
    let (data, real) = match real_sample(d.name) {
        Some(data) => (data, true),
        None => (d.generate(SAMPLE_LINES, 2023), false),
    };
    Some(Sample {
        name: d.name,
        format: d.format,
        data,
        real,
    })
}

pub fn loghub_samples() -> Vec<Sample> {
    DATASETS.iter().filter_map(|d| loghub_sample(d.name)).collect()
}

const WORDS: &[&str] = &[
    "connection", "closed", "user", "session", "opened", "request", "failed", "timeout", "block", "received", "sent",
    "worker", "started", "stopped", "retry", "cache", "miss", "hit", "write", "read", "queue", "flush", "error",
];

fn variable(rng: &mut ChaCha8Rng) -> Vec<u8> {
    match rng.gen_range(0..7) {
        0 => rng.gen_range(0..100_000).to_string().into_bytes(),
        1 => format!("{}.{}.{}.{}", rng.gen_range(1..255), rng.gen_range(0..255), rng.gen_range(0..255), rng.gen_range(0..255)).into_bytes(),
        2 => format!("id_{}-{}", rng.gen_range(0..50), rng.gen_range(0..9999)).into_bytes(),
        3 => format!("{:08x}", rng.gen::<u32>()).into_bytes(),
        4 => Vec::new(),
        5 => (0..rng.gen_range(1..6)).map(|_| rng.gen_range(0x80..=0xff)).collect(),
        _ => format!("-{}", rng.gen_range(0..1000)).into_bytes(),
    }
}

/// Corpus `index` of the synthetic set: random templates with variables,
/// LF/CRLF terminators, blank lines, invalid UTF-8 and raw garbage lines.
pub fn synthetic_corpus(index: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + index);
    let templates: Vec<Vec<Option<&str>>> = (0..rng.gen_range(1..12))
        .map(|_| {
            (0..rng.gen_range(1..10))
                .map(|_| if rng.gen_bool(0.3) { None } else { Some(*WORDS.choose(&mut rng).unwrap()) })
                .collect()
        })
        .collect();
    let lines = rng.gen_range(50..1500);
    let crlf_rate = [0.0, 0.1, 0.5, 1.0][index as usize % 4];
    let header = !index.is_multiple_of(3);
    let mut out = Vec::new();
    let mut clock = 1_600_000_000u64 + index * 1000;
    for _ in 0..lines {
        clock += rng.gen_range(0..3);
        match rng.gen_range(0..100) {
            0..=3 => {}
            4..=6 => out.extend((0..rng.gen_range(1..60)).map(|_| rng.gen_range(0..=255u8)).filter(|&b| b != b'\n')),
            _ => {
                let t = templates.choose(&mut rng).unwrap();
                if header {
                    out.extend_from_slice(format!("{clock} {} ", ["INFO", "WARN", "ERROR", "DEBUG"][rng.gen_range(0..4)]).as_bytes());
                }
                for (i, tok) in t.iter().enumerate() {
                    if i > 0 {
                        out.push(if rng.gen_bool(0.02) { b'\t' } else { b' ' });
                    }
                    match tok {
                        Some(w) => out.extend_from_slice(w.as_bytes()),
                        None => out.extend(variable(&mut rng)),
                    }
                }
            }
        }
        if rng.gen_bool(crlf_rate) {
            out.extend_from_slice(b"\r\n");
        } else {
            out.push(b'\n');
        }
    }
    if index % 5 == 1 {
        while out.last().is_some_and(|b| *b == b'\n' || *b == b'\r') {
            out.pop();
        }
    }
    out
}

pub fn synthetic_corpora() -> Vec<Vec<u8>> {
    (0..20).map(synthetic_corpus).collect()
}

/// Random bytes with a line break roughly every 80 bytes.
pub fn fuzz_bytes(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| if rng.gen_ratio(1, 80) { b'\n' } else { rng.gen() })
        .collect()
}

/// Alternates 500-line blocks of several loghub generators until `bytes` is
/// reached.
pub fn large_corpus(bytes: usize, seed: u64) -> Vec<u8> {
    let names = ["HDFS", "Spark", "Zookeeper", "OpenSSH", "Android", "HealthApp"];
    let mut out = Vec::with_capacity(bytes + 1024);
    let mut round = 0u64;
    while out.len() < bytes {
        for n in names {
            let block = Dataset::by_name(n).unwrap().generate(500, seed.wrapping_add(round));
            for line in block.split_inclusive(|&b| b == b'\n') {
                if out.len() >= bytes {
                    return out;
                }
                out.extend_from_slice(line);
            }
        }
        round += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_have_expected_shape() {
        let samples = loghub_samples();
        assert_eq!(samples.len(), 16);
        for s in &samples {
            let lines = s.data.iter().filter(|&&b| b == b'\n').count();
            assert!(s.real || lines == SAMPLE_LINES, "{}: {lines}", s.name);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(synthetic_corpus(3), synthetic_corpus(3));
        assert_ne!(synthetic_corpus(3), synthetic_corpus(4));
        assert_eq!(fuzz_bytes(100, 1), fuzz_bytes(100, 1));
        let big = large_corpus(200_000, 1);
        assert!(big.len() >= 200_000 && big.ends_with(b"\n"));
    }

    #[test]
    fn synthetic_corpora_cover_edge_cases() {
        let all = synthetic_corpora().concat();
        assert!(all.windows(2).any(|w| w == b"\r\n"));
        assert!(all.windows(2).any(|w| w == b"\n\n"));
        assert!(std::str::from_utf8(&all).is_err());
    }
}

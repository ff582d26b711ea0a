//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use logshrink::analyzer::{delimiter_lcs, delimiter_sequence, lcs_fold, multiplicity, weighted_entropy, DEFAULT_DELIMITERS};
use logshrink::bench::{self, StorageStyle};
use logshrink::codec::{dict_decode, dict_encode, elastic_decode, elastic_encode};
use logshrink::parser::ParserConfig;
use logshrink::{compress, decompress, Backend, CompressOptions, Mode};
use logshrink_fixtures as fx;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn hinted(format: &str) -> CompressOptions {
    CompressOptions {
        parser: ParserConfig {
            format_hint: Some(format.to_string()),
            ..Default::default()
        },
        ..Default::default()
    }
}

fn sha(data: &[u8]) -> [u8; 32] {
    Sha256::digest(data).into()
}

fn lossless() -> Outcome {
    let start = Instant::now();
    let mut inputs: Vec<(String, Vec<u8>, CompressOptions)> = Vec::new();
    for s in fx::loghub_samples() {
        inputs.push((s.name.to_string(), s.data, hinted(s.format)));
    }
    for i in 0..20 {
        inputs.push((format!("synthetic-{i}"), fx::synthetic_corpus(i), CompressOptions::default()));
    }
    inputs.push(("fuzz".into(), fx::fuzz_bytes(256 * 1024, 99), CompressOptions::default()));
    check(inputs.len() == 37, format!("expected 37 inputs, got {}", inputs.len()))?;
    for (name, data, opts) in &inputs {
        let (archive, _) = compress(data, opts).map_err(|e| format!("{name}: compress: {e}"))?;
        let back = decompress(&archive, 4).map_err(|e| format!("{name}: decompress: {e}"))?;
        check(sha(&back) == sha(data), format!("{name}: digest mismatch"))?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(120), format!("took {elapsed:?}"))?;
    Ok(format!("{} inputs byte-identical in {:.1}s", inputs.len(), elapsed.as_secs_f64()))
}

fn worked_values() -> Outcome {
    let a = weighted_entropy(&[2, 1, 3]);
    let d = weighted_entropy(&[2, -1, 2]);
    check((a - 1.68).abs() <= 0.01, format!("entropy {{2,1,3}} = {a}"))?;
    check((d - 0.79).abs() <= 0.01, format!("entropy {{2,-1,2}} = {d}"))?;
    let a1 = ["task#0-1", "task#1-2", "task#2-3"];
    let m = multiplicity(&a1).map_err(|e| e.to_string())?;
    check(m == 1.0, format!("multiplicity {m}"))?;
    let p = delimiter_lcs(&a1, DEFAULT_DELIMITERS);
    check(p.as_deref() == Some(b"#-".as_slice()), format!("pattern {p:?}"))?;
    Ok(format!("entropy {a:.4} / {d:.4}, multiplicity {m}, pattern \"#-\""))
}

fn compression_ratio() -> Outcome {
    let mut beats_lzma = 0;
    let mut beats_gzip = 0;
    let mut losers = Vec::new();
    for s in fx::loghub_samples() {
        let ls = bench::logshrink(&s.data, &hinted(s.format), "logshrink").map_err(|e| e.to_string())?;
        let lz = bench::baseline(&s.data, Backend::Lzma).map_err(|e| e.to_string())?;
        let gz = bench::baseline(&s.data, Backend::Gzip).map_err(|e| e.to_string())?;
        if ls.cr() >= lz.cr() {
            beats_lzma += 1;
        } else {
            losers.push(s.name);
        }
        if ls.cr() >= gz.cr() {
            beats_gzip += 1;
        }
    }
    let summary = format!("CR >= lzma on {beats_lzma}/16, >= gzip on {beats_gzip}/16");
    check(beats_lzma >= 12 && beats_gzip == 16, format!("{summary}; below lzma: {losers:?}"))?;
    Ok(summary)
}

fn storage_style() -> Outcome {
    let mut wins = 0;
    let mut detail = Vec::new();
    for name in ["Hadoop", "HPC", "OpenSSH"] {
        let s = fx::loghub_sample(name).unwrap();
        let parser = hinted(s.format).parser;
        let row = bench::storage_style_size(&s.data, &parser, StorageStyle::Row, Backend::Lzma).map_err(|e| e.to_string())?;
        let col = bench::storage_style_size(&s.data, &parser, StorageStyle::Column, Backend::Lzma).map_err(|e| e.to_string())?;
        if col < row {
            wins += 1;
        }
        detail.push(format!("{name} {row}->{col}"));
    }
    let summary = format!("column smaller on {wins}/3 ({})", detail.join(", "));
    check(wins >= 2, summary.clone())?;
    Ok(summary)
}

/// Best-of-`runs` wall time of two option sets, alternating runs so that load
/// drift hits both alike.
fn timed_pair(data: &[u8], a: &CompressOptions, b: &CompressOptions, runs: usize) -> Result<(Duration, Duration), String> {
    let mut best = (Duration::MAX, Duration::MAX);
    for _ in 0..runs {
        let t = Instant::now();
        compress(data, a).map_err(|e| e.to_string())?;
        best.0 = best.0.min(t.elapsed());
        let t = Instant::now();
        compress(data, b).map_err(|e| e.to_string())?;
        best.1 = best.1.min(t.elapsed());
    }
    Ok(best)
}

fn ablation() -> Outcome {
    let mut reduced = 0;
    for s in fx::loghub_samples() {
        let opts = hinted(s.format);
        let full = bench::logshrink(&s.data, &opts, "full").map_err(|e| e.to_string())?;
        let na = CompressOptions {
            mode: Mode::NoAnalyzer,
            ..opts
        };
        let na = bench::logshrink(&s.data, &na, "no-analyzer").map_err(|e| e.to_string())?;
        if na.cr() < full.cr() {
            reduced += 1;
        }
    }
    let mut full = Duration::ZERO;
    let mut no_sampler = Duration::ZERO;
    let mut lines = Vec::new();
    for name in ["HDFS", "Spark", "OpenSSH"] {
        let d = fx::Dataset::by_name(name).unwrap();
        let corpus = d.generate(120_000, 5);
        lines.push(corpus.iter().filter(|&&b| b == b'\n').count());
        let opts = CompressOptions { workers: 1, ..hinted(d.format) };
        let (f, n) = timed_pair(&corpus, &opts, &CompressOptions { mode: Mode::NoSampler, ..opts.clone() }, 5)?;
        full += f;
        no_sampler += n;
    }
    check(lines.iter().all(|&n| n >= 100_000), format!("corpus sizes {lines:?}"))?;
    let summary = format!(
        "no-analyzer lowers CR on {reduced}/16; 3 x 120k lines: full {:.2}s, no-sampler {:.2}s",
        full.as_secs_f64(),
        no_sampler.as_secs_f64()
    );
    check(reduced >= 12 && no_sampler >= full, summary.clone())?;
    Ok(summary)
}

fn encoders() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut values: Vec<i64> = (0..100_000).map(|_| rng.gen()).collect();
    values.extend([0, 1, -1, 63, 64, -64, -65, i64::MAX, i64::MIN, i64::MAX - 1, i64::MIN + 1]);
    let blob = elastic_encode(&values);
    let back = elastic_decode(&blob, values.len()).map_err(|e| e.to_string())?;
    check(back == values, "elastic round trip differs")?;

    for round in 0..200 {
        let vocab: Vec<Vec<u8>> = (0..rng.gen_range(1..40))
            .map(|_| (0..rng.gen_range(0..12)).map(|_| rng.gen()).collect())
            .collect();
        let stream: Vec<&[u8]> = (0..rng.gen_range(0..500)).map(|_| vocab[rng.gen_range(0..vocab.len())].as_slice()).collect();
        let (dict, indices) = dict_encode(&stream);
        let back = dict_decode(&dict, &indices, stream.len()).map_err(|e| format!("round {round}: {e}"))?;
        check(back.iter().map(Vec::as_slice).eq(stream.iter().copied()), format!("dictionary round {round} differs"))?;
    }
    Ok(format!("{} integers and 200 token streams round-trip", values.len()))
}

fn is_subsequence(needle: &[u8], hay: &[u8]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|c| it.any(|h| h == c))
}

/// Longest common subsequence length by enumerating every subsequence of the
/// shortest input.
fn brute_lcs_len(seqs: &[Vec<u8>]) -> usize {
    let shortest = seqs.iter().min_by_key(|s| s.len()).unwrap();
    let n = shortest.len();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let len = mask.count_ones() as usize;
        if len <= best {
            continue;
        }
        let cand: Vec<u8> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| shortest[i]).collect();
        if seqs.iter().all(|s| is_subsequence(&cand, s)) {
            best = len;
        }
    }
    best
}

fn random_value(rng: &mut ChaCha8Rng) -> Vec<u8> {
    let delims = b"-#:._/";
    let mut v = Vec::new();
    for _ in 0..rng.gen_range(0..=12) {
        for _ in 0..rng.gen_range(0..3) {
            v.push(rng.gen_range(b'a'..=b'e'));
        }
        v.push(delims[rng.gen_range(0..delims.len())]);
    }
    v
}

fn oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..200 {
        let values: Vec<Vec<u8>> = (0..rng.gen_range(2..=5)).map(|_| random_value(&mut rng)).collect();
        let seqs: Vec<Vec<u8>> = values.iter().map(|v| delimiter_sequence(v, DEFAULT_DELIMITERS)).collect();
        let fold = lcs_fold(&seqs);
        check(seqs.iter().all(|s| is_subsequence(&fold, s)), format!("case {case}: fold not common"))?;
        let oracle = brute_lcs_len(&seqs);
        let mined = delimiter_lcs(&values, DEFAULT_DELIMITERS).unwrap_or_default();
        check(seqs.iter().all(|s| is_subsequence(&mined, s)), format!("case {case}: pattern not common"))?;
        check(mined.len() == oracle, format!("case {case}: pattern {} vs oracle {oracle}", mined.len()))?;
    }
    for case in 0..200 {
        let alphabet = rng.gen_range(1..30);
        let values: Vec<String> = (0..rng.gen_range(1..300)).map(|_| format!("v{}", rng.gen_range(0..alphabet))).collect();
        let oracle = values.iter().collect::<HashSet<_>>().len() as f64 / values.len() as f64;
        let m = multiplicity(&values).map_err(|e| e.to_string())?;
        check(m == oracle, format!("multiset {case}: {m} vs {oracle}"))?;
    }
    Ok("200 LCS instances match brute force, 200 multisets match".into())
}

fn determinism() -> Outcome {
    let mut inputs = vec![(fx::large_corpus(2 << 20, 11), CompressOptions { chunk_lines: 4000, ..Default::default() })];
    for name in ["HDFS", "Android", "Mac"] {
        let s = fx::loghub_sample(name).unwrap();
        inputs.push((s.data, CompressOptions { chunk_lines: 500, ..hinted(s.format) }));
    }
    for (data, base) in &inputs {
        let mut digests = Vec::new();
        for workers in [1, 1, 4, 8, 8] {
            let opts = CompressOptions {
                workers,
                seed: 7,
                ..base.clone()
            };
            digests.push(sha(&compress(data, &opts).map_err(|e| e.to_string())?.0));
        }
        check(digests.windows(2).all(|w| w[0] == w[1]), "archives differ across runs or worker counts")?;
    }
    Ok(format!("{} inputs identical across runs and 1/4/8 workers", inputs.len()))
}

fn throughput() -> Outcome {
    let corpus = fx::large_corpus(10 << 20, 3);
    let t = Instant::now();
    let (archive, _) = compress(&corpus, &CompressOptions::default()).map_err(|e| e.to_string())?;
    let mbs = bench::compression_speed(corpus.len() as u64, t.elapsed());
    let summary = format!("{mbs:.2} MB/s on {} bytes (cr {:.2})", corpus.len(), corpus.len() as f64 / archive.len() as f64);
    check(mbs >= 1.0, summary.clone())?;
    Ok(summary)
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("losslessness", lossless),
        ("worked values", worked_values),
        ("compression ratio direction", compression_ratio),
        ("storage style", storage_style),
        ("ablation direction", ablation),
        ("encoder properties", encoders),
        ("oracle equivalences", oracles),
        ("determinism", determinism),
        ("throughput", throughput),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!("criterion {} {name}: PASS ({msg})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({msg})", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}

//! End-to-end compression: chunk, train, parse, sample, analyze, encode and
//! archive.

use std::time::{Duration, Instant};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analyzer::{analyze, AnalyzerConfig, FieldId};
use crate::codec::{apply_characteristics, elastic_encode, encode_raw, join_raw, write_archive, ArchiveManifest, Backend, BlobSink, ChunkManifest};
use crate::error::{Error, Result};
use crate::ingest::{chunk_stream, terminator_runs, LogChunk, DEFAULT_CHUNK_LINES};
use crate::parser::{parse_chunk, train_parser, ParsedChunk, ParserConfig, ParserModel};
use crate::sampler::{sample_event_stream, SamplerConfig};

/// Which stages run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Full,
    /// Every column stored as raw text.
    NoAnalyzer,
    /// The analyzer sees every row instead of the sampled windows.
    NoSampler,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressOptions {
    pub backend: Backend,
    pub chunk_lines: usize,
    pub parser: ParserConfig,
    pub sampler: SamplerConfig,
    pub analyzer: AnalyzerConfig,
    pub seed: u64,
    pub workers: usize,
    pub mode: Mode,
}

impl Default for CompressOptions {
    fn default() -> Self {
        CompressOptions {
            backend: Backend::default(),
            chunk_lines: DEFAULT_CHUNK_LINES,
            parser: ParserConfig::default(),
            sampler: SamplerConfig::default(),
            analyzer: AnalyzerConfig::default(),
            seed: 0,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            mode: Mode::Full,
        }
    }
}

impl CompressOptions {
    pub fn validate(&self) -> Result<()> {
        if self.chunk_lines == 0 {
            return Err(Error::parameter("chunk_lines must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::parameter("workers must be at least 1"));
        }
        if !(self.analyzer.sigma > 0.0 && self.analyzer.sigma <= 1.0) {
            return Err(Error::parameter(format!("sigma must lie in (0, 1], got {}", self.analyzer.sigma)));
        }
        if !(self.parser.training_rate >= 0.0 && self.parser.training_rate <= 1.0) {
            return Err(Error::parameter("training_rate must lie in [0, 1]"));
        }
        self.sampler.validate()
    }

    fn settings(&self) -> Vec<(String, String)> {
        let s = &self.sampler;
        [
            ("backend", self.backend.to_string()),
            ("chunk_lines", self.chunk_lines.to_string()),
            ("h", s.h.to_string()),
            ("xi", s.xi.to_string()),
            ("theta", s.theta.to_string()),
            ("m", s.m.to_string()),
            ("p", s.p.to_string()),
            ("sigma", self.analyzer.sigma.to_string()),
            ("seed", self.seed.to_string()),
            ("mode", format!("{:?}", self.mode)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressSummary {
    pub input_bytes: u64,
    pub output_bytes: u64,
    pub lines: u64,
    pub chunks: usize,
    pub templates: usize,
    pub unmatched_lines: u64,
    pub elapsed: Duration,
}

impl CompressSummary {
    pub fn ratio(&self) -> f64 {
        self.input_bytes as f64 / self.output_bytes.max(1) as f64
    }
}

/// Per-chunk seed, so results do not depend on which worker runs a chunk.
pub fn chunk_seed(seed: u64, chunk_id: usize) -> u64 {
    seed ^ (chunk_id as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Training lines: the head of the first chunk plus a seeded share of every
/// later chunk.
pub fn training_sample<'a>(chunks: &'a [LogChunk], cfg: &ParserConfig, seed: u64) -> Vec<&'a [u8]> {
    let mut out = Vec::new();
    let Some(first) = chunks.first() else {
        return out;
    };
    out.extend(first.lines.iter().take(cfg.training_head_lines).map(Vec::as_slice));
    for chunk in &chunks[1..] {
        let n = chunk.len();
        let amount = ((cfg.training_rate * n as f64).ceil() as usize).min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(seed, chunk.chunk_id) ^ 0x74_7261_696e);
        let mut picked = index::sample(&mut rng, n, amount).into_vec();
        picked.sort_unstable();
        out.extend(picked.into_iter().map(|i| chunk.lines[i].as_slice()));
    }
    out
}

/// Values of every field restricted to the matched-line spans. An event with
/// fewer than `min_rows` rows inside the spans is topped up with its earliest
/// remaining rows, so multiplicity is never judged on a handful of values.
pub fn sampled_fields<'a>(parsed: &'a ParsedChunk, spans: &[(usize, usize)], min_rows: usize) -> Vec<(FieldId, Vec<&'a [u8]>)> {
    let mut row_of = Vec::with_capacity(parsed.event_ids.len());
    let mut next = vec![0usize; parsed.variables.len()];
    for &e in &parsed.event_ids {
        row_of.push(next[e as usize]);
        next[e as usize] += 1;
    }
    let mut picked: Vec<Vec<usize>> = vec![Vec::new(); parsed.variables.len()];
    let mut header_rows = Vec::new();
    for &(s, e) in spans {
        for i in s..e.min(parsed.event_ids.len()) {
            header_rows.push(i);
            picked[parsed.event_ids[i] as usize].push(row_of[i]);
        }
    }
    let mut out: Vec<(FieldId, Vec<&[u8]>)> = parsed
        .header_columns
        .iter()
        .enumerate()
        .map(|(f, col)| (FieldId::Header(f as u32), header_rows.iter().map(|&i| col[i].as_slice()).collect()))
        .collect();
    for (e, (m, rows)) in parsed.variables.iter().zip(picked).enumerate() {
        if m.rows == 0 {
            continue;
        }
        let want = m.rows.min(min_rows);
        let rows: Vec<usize> = if rows.len() >= want {
            rows
        } else {
            let mut taken = vec![false; m.rows];
            for &r in &rows {
                taken[r] = true;
            }
            let mut extra = want - rows.len();
            for t in taken.iter_mut() {
                if extra == 0 {
                    break;
                }
                if !*t {
                    *t = true;
                    extra -= 1;
                }
            }
            (0..m.rows).filter(|&r| taken[r]).collect()
        };
        for (s, col) in m.columns.iter().enumerate() {
            let field = FieldId::Variable {
                event: e as u32,
                slot: s as u32,
            };
            out.push((field, rows.iter().map(|&r| col[r].as_slice()).collect()));
        }
    }
    out
}

/// Parses and encodes one chunk.
pub fn encode_chunk(chunk: &LogChunk, model: &ParserModel, opts: &CompressOptions) -> Result<(ChunkManifest, BlobSink)> {
    let parsed = parse_chunk(model, chunk);
    let mut sink = BlobSink::default();
    let event_ids = sink.push(
        "event_ids",
        elastic_encode(&parsed.event_ids.iter().map(|&e| i64::from(e)).collect::<Vec<_>>()),
    );
    let mut prev = 0i64;
    let gaps: Vec<i64> = parsed
        .unmatched
        .iter()
        .map(|(i, _)| {
            let d = *i as i64 - prev;
            prev = *i as i64;
            d
        })
        .collect();
    let unmatched_index = sink.push("unmatched.idx", elastic_encode(&gaps));
    let raw: Vec<&[u8]> = parsed.unmatched.iter().map(|(_, l)| l.as_slice()).collect();
    let unmatched_lines = sink.push("unmatched", join_raw(&raw));

    let mut manifest = ChunkManifest {
        chunk_id: chunk.chunk_id as u64,
        line_count: chunk.len() as u64,
        terminators: terminator_runs(&chunk.terminators),
        matched: parsed.event_ids.len() as u64,
        event_ids,
        unmatched_index,
        unmatched_lines,
        characteristics: None,
        dropped: Vec::new(),
        columns: Vec::new(),
        windows: 0,
        clusters: 0,
        sampled_windows: 0,
        blobs: Vec::new(),
    };
    match opts.mode {
        Mode::NoAnalyzer => manifest.columns = encode_raw(&parsed, &mut sink),
        Mode::Full | Mode::NoSampler => {
            let spans = if opts.mode == Mode::Full {
                let (spans, outcome) = sample_event_stream(
                    &parsed.event_ids,
                    model.templates().len(),
                    &opts.sampler,
                    chunk_seed(opts.seed, chunk.chunk_id),
                )?;
                manifest.windows = outcome.windows as u64;
                manifest.clusters = outcome.clusters as u64;
                manifest.sampled_windows = outcome.sampled_windows.len() as u64;
                spans
            } else {
                vec![(0, parsed.event_ids.len())]
            };
            let fields = sampled_fields(&parsed, &spans, opts.sampler.m * opts.sampler.h);
            let cs = analyze(&fields, &opts.analyzer);
            let (columns, dropped) = apply_characteristics(&parsed, &cs, &mut sink);
            manifest.columns = columns;
            manifest.dropped = dropped;
            manifest.characteristics = Some(cs);
        }
    }
    Ok((manifest, sink))
}

/// Compresses `input` into a complete archive.
pub fn compress(input: &[u8], opts: &CompressOptions) -> Result<(Vec<u8>, CompressSummary)> {
    opts.validate()?;
    let start = Instant::now();
    let chunks = chunk_stream(input, opts.chunk_lines)?.collect::<Result<Vec<_>>>()?;
    let model = train_parser(&training_sample(&chunks, &opts.parser, opts.seed), &opts.parser)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::parameter(format!("cannot start worker pool: {e}")))?;
    let encoded: Vec<(ChunkManifest, BlobSink)> =
        pool.install(|| chunks.par_iter().map(|c| encode_chunk(c, &model, opts)).collect::<Result<_>>())?;

    let mut manifest = ArchiveManifest::new(opts.backend, &model);
    manifest.settings = opts.settings();
    let mut payload = Vec::new();
    let mut unmatched_lines = 0;
    for (chunk, sink) in encoded {
        unmatched_lines += chunk.line_count - chunk.matched;
        manifest.push_chunk(chunk, sink, &mut payload);
    }
    let archive = write_archive(&manifest, &payload)?;
    let summary = CompressSummary {
        input_bytes: input.len() as u64,
        output_bytes: archive.len() as u64,
        lines: manifest.line_count(),
        chunks: manifest.chunks.len(),
        templates: model.templates().len(),
        unmatched_lines,
        elapsed: start.elapsed(),
    };
    Ok((archive, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::restore::{decompress, read_archive};
    use proptest::prelude::*;

    const FIG1: &str = "17/06/09 20:10:46 INFO CacheManager: Partition rdd_2_1 not found, computing it
17/06/09 20:10:46 INFO CacheManager: Partition rdd_2_4 not found, computing it
17/06/09 20:10:47 INFO MemoryStore: Block broadcast_0 stored as bytes in memory (estimated size 27.1 KB, free 2.8 GB)
17/06/09 20:10:48 INFO MemoryStore: Block broadcast_0_piece0 stored as bytes in memory (estimated size 22.3 KB, free 2.8 GB)
";

    fn spark() -> CompressOptions {
        CompressOptions {
            parser: ParserConfig {
                format_hint: Some("<Date> <Time> <Level> <Component>: <Content>".into()),
                ..ParserConfig::default()
            },
            workers: 1,
            ..CompressOptions::default()
        }
    }

    fn round_trip(input: &[u8], opts: &CompressOptions) -> Vec<u8> {
        let (archive, _) = compress(input, opts).unwrap();
        let out = decompress(&archive, 1).unwrap();
        assert_eq!(out, input);
        archive
    }

    #[test]
    fn four_lines_round_trip() {
        let archive = round_trip(FIG1.as_bytes(), &spark());
        let (manifest, _) = read_archive(&archive).unwrap();
        assert_eq!(manifest.templates.len(), 2);
        assert_eq!(manifest.line_count(), 4);
    }

    #[test]
    fn empty_input_gives_empty_archive() {
        let (archive, summary) = compress(b"", &spark()).unwrap();
        assert_eq!(summary.lines, 0);
        assert_eq!(&archive[..4], b"LGSK");
        assert_eq!(decompress(&archive, 1).unwrap(), b"");
    }

    #[test]
    fn every_mode_and_backend_round_trips() {
        let mut text = String::new();
        for i in 0..600 {
            text.push_str(&format!(
                "17/06/09 20:{:02}:{:02} INFO Worker{}: task#{}-{} finished in {} ms on host-{}.{}\n",
                i / 60 % 60,
                i % 60,
                i % 3,
                i,
                i + 1,
                (i * 37) % 1000,
                i % 7,
                i % 2
            ));
            if i % 50 == 0 {
                text.push_str("garbage \u{1F600} line\r\n\n");
            }
        }
        for mode in [Mode::Full, Mode::NoAnalyzer, Mode::NoSampler] {
            for backend in Backend::ALL {
                let opts = CompressOptions {
                    mode,
                    backend,
                    chunk_lines: 250,
                    ..spark()
                };
                round_trip(text.as_bytes(), &opts);
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_bytes() {
        let text: String = (0..3000).map(|i| format!("{i} INFO x{}: v={} id=a-{}\n", i % 4, i * 3, i % 11)).collect();
        let base = CompressOptions {
            chunk_lines: 500,
            parser: ParserConfig::default(),
            ..spark()
        };
        let one = compress(text.as_bytes(), &base).unwrap().0;
        let four = compress(text.as_bytes(), &CompressOptions { workers: 4, ..base.clone() }).unwrap().0;
        assert_eq!(one, four);
    }

    #[test]
    fn sampled_fields_follow_spans() {
        let chunk = chunk_stream(FIG1.as_bytes(), 10).unwrap().next().unwrap().unwrap();
        let model = train_parser(&chunk.lines, &spark().parser).unwrap();
        let parsed = parse_chunk(&model, &chunk);
        let fields = sampled_fields(&parsed, &[(1, 3)], 5);
        assert_eq!(fields[0].1, vec![&b"17/06/09"[..], b"17/06/09"]);
        assert_eq!(fields[1].1, vec![&b"20:10:46"[..], b"20:10:47"]);
        let partition = fields.iter().find(|(_, v)| v.contains(&&b"rdd_2_4"[..])).unwrap();
        assert_eq!(partition.1, vec![&b"rdd_2_1"[..], b"rdd_2_4"]);

        let fields = sampled_fields(&parsed, &[(1, 3)], 1);
        let partition = fields.iter().find(|(_, v)| v.contains(&&b"rdd_2_4"[..])).unwrap();
        assert_eq!(partition.1, vec![&b"rdd_2_4"[..]]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn arbitrary_bytes_round_trip(lines in prop::collection::vec(prop::collection::vec(any::<u8>(), 0..40), 0..60), chunk in 1usize..20) {
            let input: Vec<u8> = lines.concat();
            let opts = CompressOptions { chunk_lines: chunk, parser: ParserConfig::default(), backend: Backend::Gzip, ..spark() };
            let (archive, _) = compress(&input, &opts).unwrap();
            prop_assert_eq!(decompress(&archive, 2).unwrap(), input);
        }
    }
}

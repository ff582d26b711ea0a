use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use logshrink::bench::{self, BenchReport, StorageStyle};
use logshrink::config::{load_config, set_option, CONFIG_ENV};
use logshrink::restore::read_manifest;
use logshrink::{compress, decompress, Backend, CompressOptions, Mode};

#[derive(Parser)]
#[command(name = "logshrink", version, about = "Lossless log compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a log file (`-` reads standard input).
    Compress {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Restore the original bytes of an archive.
    Decompress {
        archive: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Compare compression ratio and speed with the raw backends.
    Bench {
        input: PathBuf,
        #[command(flatten)]
        tuning: Tuning,
        /// Also report archive sizes of a row or column layout under lzma.
        #[arg(long, value_enum)]
        storage_style: Option<Style>,
        /// Add a run that stores every column as raw text.
        #[arg(long)]
        no_analyzer: bool,
        /// Add a run whose analyzer sees all rows instead of a sample.
        #[arg(long)]
        no_sampler: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Print an archive's manifest without decoding its columns.
    Inspect { archive: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Row,
    Column,
    Both,
}

#[derive(Args)]
struct Tuning {
    /// gzip, bzip2 or lzma [default: lzma]
    #[arg(long)]
    backend: Option<String>,
    /// Lines per chunk [default: 100000]
    #[arg(long)]
    chunk_lines: Option<usize>,
    /// Window length h [default: 20]
    #[arg(long)]
    window_h: Option<usize>,
    /// Sample rate xi [default: 0.01]
    #[arg(long)]
    xi: Option<f64>,
    /// HAC distance threshold theta [default: 4]
    #[arg(long)]
    theta: Option<f64>,
    /// Sampled sequences M [default: 16]
    #[arg(long)]
    sample_m: Option<usize>,
    /// Minority proportion p for the minimum draw [default: 0.03]
    #[arg(long)]
    p: Option<f64>,
    /// Multiplicity threshold sigma [default: 0.3]
    #[arg(long)]
    sigma: Option<f64>,
    /// RNG seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads [default: available cores]
    #[arg(long)]
    workers: Option<usize>,
    /// Header layout, e.g. "<Date> <Time> <Level> <Component>: <Content>"
    #[arg(long)]
    format: Option<String>,
    /// key = value file; overrides $LOGSHRINK_CONFIG
    #[arg(long)]
    config: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

impl Tuning {
    fn options(&self) -> CliResult<CompressOptions> {
        let mut opts = CompressOptions::default();
        let config = self.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        if let Some(path) = config {
            load_config(&path, &mut opts)?;
        }
        let flags: [(&str, Option<String>); 11] = [
            ("backend", self.backend.clone()),
            ("chunk_lines", self.chunk_lines.map(|v| v.to_string())),
            ("window_h", self.window_h.map(|v| v.to_string())),
            ("xi", self.xi.map(|v| v.to_string())),
            ("theta", self.theta.map(|v| v.to_string())),
            ("sample_m", self.sample_m.map(|v| v.to_string())),
            ("p", self.p.map(|v| v.to_string())),
            ("sigma", self.sigma.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("workers", self.workers.map(|v| v.to_string())),
            ("format", self.format.clone()),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                set_option(&mut opts, key, &v)?;
            }
        }
        opts.validate()?;
        Ok(opts)
    }
}

fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        return Ok(buf);
    }
    std::fs::read(path).map_err(|e| Failure {
        code: if e.kind() == io::ErrorKind::NotFound { 2 } else { 1 },
        message: if e.kind() == io::ErrorKind::NotFound {
            format!("{}: no such file", path.display())
        } else {
            format!("{}: {e}", path.display())
        },
    })
}

fn write_output(path: &Path, bytes: &[u8]) -> CliResult {
    if path.as_os_str() == "-" {
        io::stdout().write_all(bytes)?;
        return Ok(());
    }
    std::fs::write(path, bytes).map_err(|e| Failure::from(format!("{}: {e}", path.display())))
}

fn cmd_compress(input: &Path, output: &Path, tuning: &Tuning) -> CliResult {
    let opts = tuning.options()?;
    let data = read_input(input)?;
    let (archive, s) = compress(&data, &opts)?;
    write_output(output, &archive)?;
    println!(
        "input_bytes={} output_bytes={} cr={:.3} elapsed_s={:.3} cs_mb_s={:.3} lines={} chunks={} templates={} unmatched={}",
        s.input_bytes,
        s.output_bytes,
        s.ratio(),
        s.elapsed.as_secs_f64(),
        bench::compression_speed(s.input_bytes, s.elapsed),
        s.lines,
        s.chunks,
        s.templates,
        s.unmatched_lines
    );
    Ok(())
}

fn cmd_decompress(archive: &Path, output: &Path, workers: Option<usize>) -> CliResult {
    let bytes = read_input(archive)?;
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let out = decompress(&bytes, workers)?;
    write_output(output, &out)
}

fn cmd_bench(input: &Path, tuning: &Tuning, style: Option<Style>, no_analyzer: bool, no_sampler: bool, csv: bool) -> CliResult {
    let opts = tuning.options()?;
    let data = read_input(input)?;
    let mut rows: Vec<BenchReport> = vec![bench::logshrink(&data, &opts, "logshrink")?];
    if no_analyzer {
        let o = CompressOptions {
            mode: Mode::NoAnalyzer,
            ..opts.clone()
        };
        rows.push(bench::logshrink(&data, &o, "logshrink-no-analyzer")?);
    }
    if no_sampler {
        let o = CompressOptions {
            mode: Mode::NoSampler,
            ..opts.clone()
        };
        rows.push(bench::logshrink(&data, &o, "logshrink-no-sampler")?);
    }
    for b in Backend::ALL {
        rows.push(bench::baseline(&data, b)?);
    }
    if csv {
        println!("tool,original_bytes,compressed_bytes,cr,cs_mb_s,elapsed_s");
        for r in &rows {
            println!("{},{},{},{:.3},{:.3},{:.3}", r.tool, r.original_size, r.compressed_size, r.cr(), r.cs(), r.elapsed.as_secs_f64());
        }
    } else {
        println!("{:<24} {:>12} {:>12} {:>9} {:>10}", "tool", "original", "compressed", "CR", "CS(MB/s)");
        for r in &rows {
            println!("{:<24} {:>12} {:>12} {:>9.3} {:>10.3}", r.tool, r.original_size, r.compressed_size, r.cr(), r.cs());
        }
    }
    if let Some(style) = style {
        let styles: &[(StorageStyle, &str)] = match style {
            Style::Row => &[(StorageStyle::Row, "row")],
            Style::Column => &[(StorageStyle::Column, "column")],
            Style::Both => &[(StorageStyle::Row, "row"), (StorageStyle::Column, "column")],
        };
        for &(s, name) in styles {
            let size = bench::storage_style_size(&data, &opts.parser, s, Backend::Lzma)?;
            if csv {
                println!("storage-{name},{},{size},,,", data.len());
            } else {
                println!("storage style {name:<7} lzma size {size}");
            }
        }
    }
    Ok(())
}

fn cmd_inspect(archive: &Path) -> CliResult {
    let bytes = read_input(archive)?;
    let m = read_manifest(&bytes)?;
    println!("format version {}  backend {}", m.version, m.backend);
    println!("chunks {}  lines {}  templates {}", m.chunks.len(), m.line_count(), m.templates.len());
    let settings: Vec<String> = m.settings.iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!("settings {}", settings.join(" "));
    let names = m.header.field_names();
    println!(
        "header {} fields{}: {}",
        names.len(),
        if m.header.detected() { " (detected)" } else { "" },
        names.join(", ")
    );
    for t in &m.templates {
        println!("  E{:<4} arity {:<2} {}", t.event_id, t.arity(), t);
    }
    for c in &m.chunks {
        println!(
            "chunk {}: {} lines, {} matched, {} windows, {} clusters, {} sampled",
            c.chunk_id, c.line_count, c.matched, c.windows, c.clusters, c.sampled_windows
        );
        if let Some(cs) = &c.characteristics {
            let p: Vec<String> = cs.patterns.iter().map(|(f, p)| format!("{f}:{:?}", String::from_utf8_lossy(p))).collect();
            let mm: Vec<String> = cs.multiplicity.iter().map(ToString::to_string).collect();
            let v: Vec<String> = cs.variability.iter().map(ToString::to_string).collect();
            println!("  P {{{}}}", p.join(", "));
            println!("  M {{{}}}", mm.join(", "));
            println!("  V {{{}}}", v.join(", "));
        }
        for d in &c.dropped {
            println!("  dropped {d}");
        }
        for col in &c.columns {
            let size: u64 = col.treatment.blobs().iter().map(|&b| c.blobs[b as usize].len).sum();
            let name = match col.field {
                logshrink::analyzer::FieldId::Header(i) => names.get(i as usize).map_or_else(|| col.field.to_string(), |n| n.to_string()),
                f => f.to_string(),
            };
            println!("  {name:<14} {:<48} {size} bytes", col.treatment.to_string());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Compress { input, output, tuning } => cmd_compress(input, output, tuning),
        Command::Decompress { archive, output, workers } => cmd_decompress(archive, output, *workers),
        Command::Bench {
            input,
            tuning,
            storage_style,
            no_analyzer,
            no_sampler,
            csv,
        } => cmd_bench(input, tuning, *storage_style, *no_analyzer, *no_sampler, *csv),
        Command::Inspect { archive } => cmd_inspect(archive),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("logshrink: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

//! Compression ratios on the bundled loghub-shaped samples.
//!
//! Set `LOGHUB_DIR` to a loghub checkout to use the real 2k-line files.

use logshrink::bench::{baseline, logshrink};
use logshrink::parser::ParserConfig;
use logshrink::{Backend, CompressOptions, Mode};

fn main() -> logshrink::Result<()> {
    println!("{:<12} {:>9} {:>12} {:>9} {:>9} {:>9}", "dataset", "logshrink", "no-analyzer", "lzma", "bzip2", "gzip");
    for s in logshrink_fixtures::loghub_samples() {
        let opts = CompressOptions {
            parser: ParserConfig {
                format_hint: Some(s.format.into()),
                ..Default::default()
            },
            ..Default::default()
        };
        let full = logshrink(&s.data, &opts, "logshrink")?;
        let plain = logshrink(&s.data, &CompressOptions { mode: Mode::NoAnalyzer, ..opts }, "no-analyzer")?;
        let [lz, bz, gz] = [Backend::Lzma, Backend::Bzip2, Backend::Gzip].map(|b| baseline(&s.data, b));
        println!(
            "{:<12} {:>9.2} {:>12.2} {:>9.2} {:>9.2} {:>9.2}",
            s.name,
            full.cr(),
            plain.cr(),
            lz?.cr(),
            bz?.cr(),
            gz?.cr()
        );
    }
    Ok(())
}

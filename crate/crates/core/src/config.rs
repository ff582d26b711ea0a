//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys match the long
//! CLI flags with `-` or `_` as separators.

use std::path::Path;

use crate::error::{Error, Result};
use crate::pipeline::{CompressOptions, Mode};

/// Environment variable naming a configuration file.
pub const CONFIG_ENV: &str = "LOGSHRINK_CONFIG";

pub const KEYS: &[&str] = &[
    "backend",
    "chunk_lines",
    "window_h",
    "xi",
    "theta",
    "sample_m",
    "p",
    "max_iterations",
    "k_ceiling",
    "strict_min_draw",
    "sigma",
    "delimiters",
    "seed",
    "workers",
    "format",
    "similarity_threshold",
    "frequent_token_min_ratio",
    "training_head_lines",
    "training_rate",
    "mode",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::parameter(format!("bad value `{value}` for `{key}`")))
}

/// Sets one option by name.
pub fn set_option(opts: &mut CompressOptions, key: &str, value: &str) -> Result<()> {
    let key = key.trim().replace('-', "_");
    let value = value.trim();
    match key.as_str() {
        "backend" => opts.backend = value.parse()?,
        "chunk_lines" => opts.chunk_lines = parse(&key, value)?,
        "window_h" | "h" => opts.sampler.h = parse(&key, value)?,
        "xi" => opts.sampler.xi = parse(&key, value)?,
        "theta" => opts.sampler.theta = parse(&key, value)?,
        "sample_m" | "m" => opts.sampler.m = parse(&key, value)?,
        "p" => opts.sampler.p = parse(&key, value)?,
        "max_iterations" => opts.sampler.max_iterations = parse(&key, value)?,
        "k_ceiling" => opts.sampler.k_ceiling = parse(&key, value)?,
        "strict_min_draw" => opts.sampler.strict_min_draw = parse(&key, value)?,
        "sigma" => opts.analyzer.sigma = parse(&key, value)?,
        "delimiters" => opts.analyzer.delimiters = value.as_bytes().to_vec(),
        "seed" => opts.seed = parse(&key, value)?,
        "workers" => opts.workers = parse(&key, value)?,
        "format" => opts.parser.format_hint = (!value.is_empty()).then(|| value.to_string()),
        "similarity_threshold" => opts.parser.similarity_threshold = parse(&key, value)?,
        "frequent_token_min_ratio" => opts.parser.frequent_token_min_ratio = parse(&key, value)?,
        "training_head_lines" => opts.parser.training_head_lines = parse(&key, value)?,
        "training_rate" => opts.parser.training_rate = parse(&key, value)?,
        "mode" => {
            opts.mode = match value {
                "full" => Mode::Full,
                "no-analyzer" | "no_analyzer" => Mode::NoAnalyzer,
                "no-sampler" | "no_sampler" => Mode::NoSampler,
                _ => return Err(Error::parameter(format!("unknown mode `{value}`"))),
            }
        }
        _ => return Err(Error::parameter(format!("unknown configuration key `{key}`"))),
    }
    Ok(())
}

/// Applies every `key = value` line of `text`.
pub fn apply_config(text: &str, opts: &mut CompressOptions) -> Result<()> {
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parameter(format!("config line {}: expected key = value", n + 1)))?;
        set_option(opts, key, value).map_err(|e| Error::parameter(format!("config line {}: {e}", n + 1)))?;
    }
    Ok(())
}

pub fn load_config(path: &Path, opts: &mut CompressOptions) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::parameter(format!("cannot read config {}: {e}", path.display())))?;
    apply_config(&text, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Backend;

    #[test]
    fn keys_are_applied() {
        let mut o = CompressOptions::default();
        apply_config(
            "# comment\nbackend = gzip\nwindow-h=10\nxi = 0.5\ntheta=2\nsample_m = 8\nsigma=0.2\np=0.001\nseed=9\nworkers=3\nchunk_lines=7\nformat = <Date> <Content>\nmode=no-sampler\n",
            &mut o,
        )
        .unwrap();
        assert_eq!(o.backend, Backend::Gzip);
        assert_eq!((o.sampler.h, o.sampler.xi, o.sampler.theta, o.sampler.m), (10, 0.5, 2.0, 8));
        assert_eq!((o.analyzer.sigma, o.sampler.p, o.seed, o.workers, o.chunk_lines), (0.2, 0.001, 9, 3, 7));
        assert_eq!(o.parser.format_hint.as_deref(), Some("<Date> <Content>"));
        assert_eq!(o.mode, Mode::NoSampler);
    }

    #[test]
    fn bad_lines_are_reported() {
        let mut o = CompressOptions::default();
        assert!(apply_config("nonsense", &mut o).unwrap_err().to_string().contains("line 1"));
        assert!(apply_config("colour = red", &mut o).is_err());
        assert!(apply_config("xi = lots", &mut o).is_err());
        for k in KEYS {
            if let Err(e) = set_option(&mut CompressOptions::default(), k, "x") {
                assert!(!e.to_string().contains("unknown configuration key"), "{k}");
            }
        }
    }
}

//! A tiny placeholder language for synthetic message templates.
//!
//! `{int:a-b}` uniform integer, `{pad:a-b:w}` zero-padded integer,
//! `{f:a-b}` one-decimal float, `{hex:n}` hex digits, `{blk}` HDFS block id,
//! `{pick:a|b|c}` one of the alternatives, `{ip}` / `{host}` / `{user}` /
//! `{path}` / `{word}` drawn from small per-corpus pools, `{seq}` a counter
//! that grows by one per use of the template. `{sip}` is an address that stays
//! the same for a burst of uses, with a few addresses far more common than
//! the rest.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct Pools {
    pub ips: Vec<String>,
    pub hosts: Vec<String>,
    pub users: Vec<String>,
    pub paths: Vec<String>,
    pub words: Vec<String>,
}

const SYLLABLES: &[&str] = &["ka", "lo", "mi", "ter", "on", "ra", "vex", "su", "del", "ni", "pro", "xa"];

fn word(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(2..4);
    (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect()
}

impl Pools {
    pub fn new(rng: &mut ChaCha8Rng) -> Self {
        let ips = (0..24)
            .map(|_| {
                format!(
                    "{}.{}.{}.{}",
                    rng.gen_range(10..224),
                    rng.gen_range(0..256),
                    rng.gen_range(0..256),
                    rng.gen_range(1..255)
                )
            })
            .collect();
        let hosts = (0..12).map(|i| format!("{}-{:02}", word(rng), i)).collect();
        let users = ["root", "admin", "guest", "test", "oracle", "ftp", "hadoop", "www"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let paths = (0..16)
            .map(|_| format!("/{}/{}/{}.{}", word(rng), word(rng), word(rng), ["log", "conf", "jar", "xml"].choose(rng).unwrap()))
            .collect();
        let words = (0..40).map(|_| word(rng)).collect();
        Pools {
            ips,
            hosts,
            users,
            paths,
            words,
        }
    }
}

fn range(spec: &str) -> (i64, i64) {
    let (a, b) = spec
        .get(1..)
        .and_then(|tail| tail.find('-'))
        .map(|i| (&spec[..i + 1], &spec[i + 2..]))
        .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
        .unwrap_or_else(|| panic!("bad range `{spec}`"));
    (a, b)
}

/// Current `{sip}` address and how many more uses it gets.
#[derive(Default)]
pub struct Burst {
    ip: usize,
    left: u32,
}

/// Expands `template`. `seq` is the per-template counter.
pub fn expand(template: &str, rng: &mut ChaCha8Rng, pools: &Pools, seq: &mut u64, burst: &mut Burst, out: &mut String) {
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = open + rest[open..].find('}').expect("unclosed placeholder");
        let body = &rest[open + 1..close];
        let (kind, arg) = body.split_once(':').unwrap_or((body, ""));
        match kind {
            "int" => {
                let (a, b) = range(arg);
                out.push_str(&rng.gen_range(a..=b).to_string());
            }
            "pad" => {
                let (r, w) = arg.rsplit_once(':').expect("pad needs a width");
                let (a, b) = range(r);
                let w: usize = w.parse().unwrap();
                out.push_str(&format!("{:0w$}", rng.gen_range(a..=b)));
            }
            "f" => {
                let (a, b) = range(arg);
                out.push_str(&format!("{:.1}", rng.gen_range(a as f64..b as f64)));
            }
            "hex" => {
                let n: usize = arg.parse().unwrap();
                for _ in 0..n {
                    out.push(char::from_digit(rng.gen_range(0..16), 16).unwrap());
                }
            }
            "blk" => out.push_str(&format!("blk_{}", rng.gen::<i64>() >> rng.gen_range(0..2))),
            "pick" => out.push_str(arg.split('|').collect::<Vec<_>>().choose(rng).unwrap()),
            "ip" => out.push_str(pools.ips.choose(rng).unwrap()),
            "sip" => {
                if burst.left == 0 {
                    let u: f64 = rng.gen();
                    burst.ip = (u * u * u * pools.ips.len() as f64) as usize;
                    burst.left = rng.gen_range(10..120);
                }
                burst.left -= 1;
                out.push_str(&pools.ips[burst.ip]);
            }
            "host" => out.push_str(pools.hosts.choose(rng).unwrap()),
            "user" => out.push_str(pools.users.choose(rng).unwrap()),
            "path" => out.push_str(pools.paths.choose(rng).unwrap()),
            "word" => out.push_str(pools.words.choose(rng).unwrap()),
            "seq" => {
                *seq += 1;
                out.push_str(&seq.to_string());
            }
            other => panic!("unknown placeholder `{other}`"),
        }
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
}

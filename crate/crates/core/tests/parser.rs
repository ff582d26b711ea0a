use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use logshrink::parser::{train_parser, LineMatch, ParserConfig};

const TEMPLATES: [&str; 5] = [
    "Accepted connection from <*> on port <*>",
    "Worker <*> finished job <*> in <*> ms",
    "Cache flush completed",
    "User <*> logged out",
    "Disk <*> usage at <*> percent, threshold <*> reached",
];

fn variable(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..4) {
        0 => rng.gen_range(0..100_000).to_string(),
        1 => format!("{}.{}.{}.{}", rng.gen_range(1..255), rng.gen_range(0..255), rng.gen_range(0..255), rng.gen_range(1..255)),
        2 => format!("{:x}", rng.gen::<u32>()),
        _ => format!("{}-{}", ["sda", "node", "alice", "job"].choose(rng).unwrap(), rng.gen_range(0..500)),
    }
}

/// Lines with a level header, and the index of the template each came from.
fn generate(n: usize, seed: u64) -> Vec<(String, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let t = rng.gen_range(0..TEMPLATES.len());
            let content: Vec<String> = TEMPLATES[t]
                .split(' ')
                .map(|tok| if tok == "<*>" { variable(&mut rng) } else { tok.to_string() })
                .collect();
            (format!("INFO {}", content.join(" ")), t)
        })
        .collect()
}

fn config() -> ParserConfig {
    ParserConfig {
        format_hint: Some("<Level> <Content>".into()),
        ..Default::default()
    }
}

#[test]
fn generator_templates_are_recovered() {
    let lines = generate(500, 1);
    let text: Vec<&str> = lines.iter().map(|(l, _)| l.as_str()).collect();
    let model = train_parser(&text, &config()).unwrap();
    let mut got: Vec<String> = model.templates().iter().map(ToString::to_string).collect();
    got.sort();
    let mut want: Vec<String> = TEMPLATES.iter().map(|s| s.to_string()).collect();
    want.sort();
    assert_eq!(got, want);
    for t in model.templates() {
        let src = TEMPLATES.iter().find(|s| **s == t.to_string()).unwrap();
        assert_eq!(t.arity(), src.matches("<*>").count());
    }
}

#[test]
fn generated_lines_match_and_garbage_does_not() {
    let lines = generate(10_000, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let garbage: Vec<Vec<u8>> = (0..100)
        .map(|_| (0..rng.gen_range(1..80)).map(|_| if rng.gen_ratio(1, 6) { b' ' } else { rng.gen_range(0x21..0x7f) }).collect())
        .collect();
    let training: Vec<&[u8]> = lines.iter().map(|(l, _)| l.as_bytes()).collect();
    let model = train_parser(&training, &config()).unwrap();
    assert_eq!(model.templates().len(), TEMPLATES.len());
    for (line, src) in &lines {
        match model.match_line(line.as_bytes()) {
            LineMatch::Matched { event_id, .. } => {
                assert_eq!(model.templates()[event_id as usize].to_string(), TEMPLATES[*src], "{line}");
            }
            LineMatch::Unmatched => panic!("unmatched generated line {line}"),
        }
    }
    for g in &garbage {
        assert_eq!(model.match_line(g), LineMatch::Unmatched, "{}", String::from_utf8_lossy(g));
    }
}

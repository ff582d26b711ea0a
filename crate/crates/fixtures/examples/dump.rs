fn main() {
    let dir = std::env::args().nth(1).expect("output dir");
    for s in logshrink_fixtures::loghub_samples() {
        std::fs::write(format!("{dir}/{}.log", s.name), &s.data).unwrap();
    }
}

//! Prints one line per acceptance criterion. Exits nonzero on any failure outside
//! `KNOWN_FAILURES`, or on any failure at all when `TSRE_STRICT=1`.

use tsre::acceptance::{run, Golden, Level};

/// Criteria that fail at the chain lengths they prescribe. Criterion 8 asks for the
/// large-L AKLT plateau at L = 12, where the exact AKLT state itself gives 0.786.
const KNOWN_FAILURES: &[usize] = &[8];

fn main() {
    // `cargo test -- --list` and filtered runs expect a harness; only run the suite
    // when invoked plainly or with `acceptance` as the filter.
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    if let Some(filter) = args.iter().find(|a| !a.starts_with('-')) {
        if !"acceptance".contains(filter.as_str()) {
            return;
        }
    }
    let strict = std::env::var("TSRE_STRICT").is_ok_and(|v| v == "1");
    let outcomes = run(Level::All, &Golden::default(), |o| println!("{o}"));
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("acceptance: {} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    let unexpected: Vec<usize> = failed.iter().copied().filter(|id| strict || !KNOWN_FAILURES.contains(id)).collect();
    let fixed: Vec<usize> = KNOWN_FAILURES.iter().copied().filter(|id| !failed.contains(id)).collect();
    for id in failed.iter().filter(|id| !unexpected.contains(id)) {
        println!("acceptance: criterion {id} is a known failure");
    }
    if !fixed.is_empty() {
        eprintln!("criteria listed as known failures now pass: {fixed:?}");
    }
    if !unexpected.is_empty() {
        eprintln!("failing criteria: {unexpected:?}");
    }
    if !unexpected.is_empty() || !fixed.is_empty() {
        std::process::exit(1);
    }
}

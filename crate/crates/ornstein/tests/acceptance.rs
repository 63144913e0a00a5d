//! Runs every acceptance check and prints one line per check.

use ornstein::suite::{criteria, run_criterion};

fn main() {
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    let mut ran = 0;
    for c in criteria().iter().filter(|c| filter.as_deref().is_none_or(|f| c.name.contains(f))) {
        let outcome = run_criterion(c);
        println!("{}", outcome.line());
        failed += !outcome.passed as usize;
        ran += 1;
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

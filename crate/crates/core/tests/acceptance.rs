//! One line per acceptance criterion; exits nonzero if any fails.

use symnorm::acceptance::run_criterion;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    // libtest-style flags from `cargo test` are ignored; bare numbers select criteria
    let picked: Vec<usize> = args.iter().filter_map(|a| a.parse().ok()).collect();
    let ids: Vec<usize> = if picked.is_empty() { (1..=9).collect() } else { picked };
    let mut failed = 0;
    for id in ids {
        let Some(res) = run_criterion(id) else {
            eprintln!("unknown criterion {id}");
            std::process::exit(1);
        };
        println!("{res}");
        if !res.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

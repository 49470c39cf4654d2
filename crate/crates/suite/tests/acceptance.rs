//! Prints one pass/fail line per acceptance criterion and exits nonzero if
//! any fails. Set `RSD_MARKET_SKIP_HEAVY=1` to skip the simulation criteria.

use rsd_market::suite::{run_suite, SuiteOptions};

fn main() {
    let opts = SuiteOptions {
        heavy: std::env::var_os("RSD_MARKET_SKIP_HEAVY").is_none(),
        ..SuiteOptions::default()
    };
    let results = run_suite(&opts);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

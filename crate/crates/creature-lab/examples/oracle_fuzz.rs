//! Seeded randomized property suites: each one checks an exact law on
//! generated candidates and reports deterministically for a fixed seed.

use creature_lab::fuzz::{fuzz_suite, SUITES};
use creature_lab::guard::Guards;
use creature_lab::report::Format;

fn main() -> creature_lab::Result<()> {
    let guards = Guards::default();
    for suite in SUITES {
        let report = fuzz_suite(suite, 1, 100, &guards)?;
        print!("{}", report.render(Format::Text));
    }
    Ok(())
}

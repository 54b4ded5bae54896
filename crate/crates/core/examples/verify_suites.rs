//! Print the pass/fail table of every verification suite.
use msflow::verify::{report, run, Suite};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    print!("{}", report(&run(Suite::All, seed)));
}

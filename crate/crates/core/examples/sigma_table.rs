//! Which families have meets of descending and joins of ascending chains.

use gealab::report::{cmd_sigma, Format, RunConfig};

fn main() {
    let cfg = RunConfig {
        n_max: Some(16),
        ..RunConfig::default()
    };
    let outcome = cmd_sigma(&cfg).expect("default config is valid");
    print!("{}", outcome.render(Format::Text));
}

//! The descending chain (1/n)∫|u′|² + |u(0)|² + |u(1)|² converges pointwise
//! to the boundary form, and the gap equals (1/n)∫|u′|².

use gealab::convergence::{kato_chain, pointwise_limit, SampleConfig};

fn main() {
    let chain = kato_chain();
    let levels = [9, 49, 199];
    let r = pointwise_limit(&chain, 32, &levels, &SampleConfig::default()).expect("chain has a limit");
    println!("limit: {}", r.limit);
    println!("gap identity max relative error: {:.2e}", r.identity_max_rel_err);
    for row in r.rows.iter().filter(|row| row.level == 199 && row.sample == "sin(pi x)") {
        if row.n.is_power_of_two() {
            println!("n = {:>2}  t_n(u,u) = {:.6}  gap = {:.6}", row.n, row.value, row.gap);
        }
    }
}

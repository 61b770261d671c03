//! Meets and joins in the interval effect algebra [0, u] of ℤ².

use gealab::instances::make_interval_ea;
use gealab::kernel::{check_axioms, join_search, meet_search, CheckStrategy};

fn main() {
    let ea = make_interval_ea([3i64, 2]).expect("positive top");
    let report = check_axioms(&ea, CheckStrategy::Exhaustive).expect("finite carrier");
    println!("axioms pass: {} ({} tuples)", report.all_pass(), report.samples_tested);

    let pair = [[1i64, 2], [3, 0]];
    println!("meet of {pair:?}: {:?}", meet_search(&ea, &pair).unwrap());
    println!("join of {pair:?}: {:?}", join_search(&ea, &pair).unwrap());
    println!("complement of [1, 2]: {:?}", ea.complement(&[1, 2]));
}

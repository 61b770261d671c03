//! The even numbers with gaps at least 4 (plus 0) form a GEA under the
//! inherited sum, yet are not a sub-GEA of (ℕ, +): 4 ≤ 6 in ℕ but 6 − 4 = 2
//! is missing.

use gealab::instances::even_gap_demo;

fn main() {
    let r = even_gap_demo(40).expect("carrier is small enough");
    println!("axioms in (N,+):       {}", r.base_axioms_pass);
    println!("axioms in the subset:  {}", r.subset_axioms_pass);
    println!("sub-GEA:               {}", r.is_sub_gea);
    println!("violation:             {:?}", r.violation);
    println!("4 <= 6 in N:           {}", r.le_in_base);
    println!("4 <= 6 in the subset:  {}", r.le_in_subset);
}

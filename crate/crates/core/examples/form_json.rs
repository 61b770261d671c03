//! Forms round-trip through their JSON description.

use gealab::form::{catalog_forms, FormSpec};

fn main() {
    for (name, t) in catalog_forms() {
        let json = t.to_json();
        let back = FormSpec::from_json(&json).expect("round trip");
        assert_eq!(back, t);
        println!("{name:>14}: {json}");
    }
}

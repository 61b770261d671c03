//! A regular form plus a singular one can be regular, so the regular forms
//! are not closed under differences.

use gealab::form::{boundary_form, energy_form, is_regular, is_singular, reg_sing_split, robin_form};
use gealab::forms_gea::{oplus, oplus_bar, preceq, OrderProbe};

fn main() {
    let (energy, boundary, robin) = (energy_form(), boundary_form(), robin_form());
    let sum = oplus(&energy, &boundary).expect("same domain");
    println!("{energy}  (+)  {boundary}  =  {sum}");
    println!("regular: {} / singular: {} / sum regular: {}", is_regular(&energy), is_singular(&boundary), is_regular(&sum));
    let (r, s) = reg_sing_split(&robin).unwrap();
    println!("split of the sum: regular {r}, singular {s}");
    println!("bar sum defined: {}", oplus_bar(&energy, &boundary).is_some());
    let probe = OrderProbe::default();
    println!("energy below robin: {}", preceq(&energy, &robin, &probe).unwrap());
    println!("robin below energy: {}", preceq(&robin, &energy, &probe).unwrap());
}

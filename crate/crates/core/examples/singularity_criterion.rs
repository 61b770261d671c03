//! A form is singular when for every x there is y with t(y,y) < |(x,y)|².
//! The boundary form has such witnesses, the Robin form does not.

use gealab::form::{boundary_form, robin_form, singularity_witness};
use gealab::hilbert::{smooth_samples, Model};

fn main() {
    for m in Model::Grid.default_levels() {
        for (name, u) in smooth_samples(m) {
            let b = singularity_witness(&boundary_form(), &u, m).unwrap();
            let r = singularity_witness(&robin_form(), &u, m).unwrap();
            println!(
                "m = {m:>3} {name:>10}: boundary ratio {:>10}  robin witness {}",
                b.map(|w| format!("{:.4}", w.ratio)).unwrap_or("-".into()),
                r.is_some()
            );
        }
    }
}

//! Forms built from positive operators correspond to the operators, and the
//! correspondence carries ⊕ to the operator sum.

use gealab::form::{identity_form, matrix_at, seeded_form};
use gealab::forms_gea::{gf_vh_iso, oplus, operator_of_form, IsoDirection, IsoItem};
use gealab::hilbert::Model;

fn main() {
    let a = seeded_form(Model::Grid, 3);
    let b = identity_form(Model::Grid);
    let sum = oplus(&a, &b).expect("bounded forms add");
    let op = operator_of_form(&sum).expect("built from operators");
    let IsoItem::Form(back) = gf_vh_iso(IsoDirection::OperatorToForm, &IsoItem::Operator(op.clone())).unwrap() else {
        unreachable!()
    };
    println!("form {sum} -> operator {op} -> form {back}");
    let level = 9;
    let m = matrix_at(&sum, level).unwrap();
    let a = op.matrix_at(level).unwrap();
    let w = Model::Grid.weights(level);
    let err = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| (m[(i, j)] - a[(i, j)] * w[i]).norm())
        .fold(0.0, f64::max);
    println!("max |M - W A| at level {level}: {err:.2e}");
}

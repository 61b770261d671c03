use gealab::form::{evaluate_coords, FormSpec};
use gealab::forms_gea::{
    le_bar, le_oplus, ominus_forms, oplus, oplus_bar, preceq, sample_form, FamilyId, OrderProbe,
};
use gealab::hilbert::{polarize, Model, TestVectorGen};
use gealab::instances::{make_interval_ea, NatGea};
use gealab::kernel::{derived_le, ominus, PartialAlgebra};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model() -> impl Strategy<Value = Model> {
    prop_oneof![Just(Model::Sequence), Just(Model::Grid)]
}

fn family() -> impl Strategy<Value = FamilyId> {
    prop_oneof![
        Just(FamilyId::Vf),
        Just(FamilyId::Bf),
        Just(FamilyId::Rf),
        Just(FamilyId::Sf),
        Just(FamilyId::Gf),
        Just(FamilyId::Cf),
    ]
}

fn pair(fam: &FamilyId, model: Model, seed: u64) -> (FormSpec, FormSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (sample_form(fam, model, &mut rng), sample_form(fam, model, &mut rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn summands_lie_below_the_sum(m in model(), fam in family(), seed in any::<u64>()) {
        let (x, y) = pair(&fam, m, seed);
        if let Some(z) = oplus(&x, &y) {
            let probe = OrderProbe::default();
            prop_assert!(preceq(&x, &z, &probe).unwrap());
            prop_assert!(preceq(&y, &z, &probe).unwrap());
            if x.is_bounded() || x.domain() == z.domain() {
                prop_assert!(le_oplus(&x, &z, &probe).unwrap());
            }
        }
    }

    #[test]
    fn difference_recovers_the_summand(m in model(), fam in family(), seed in any::<u64>()) {
        let (x, y) = pair(&fam, m, seed);
        if let Some(z) = oplus(&x, &y) {
            if let Ok(Some(d)) = ominus_forms(&z, &x) {
                prop_assert_eq!(oplus(&x, &d), Some(z));
            }
        }
    }

    #[test]
    fn bar_sum_agrees_with_sum_on_regular_and_singular_forms(
        m in model(),
        fam in prop_oneof![Just(FamilyId::Rf), Just(FamilyId::Sf)],
        seed in any::<u64>(),
    ) {
        let (x, y) = pair(&fam, m, seed);
        prop_assert_eq!(oplus_bar(&x, &y), oplus(&x, &y));
        if let Some(z) = oplus_bar(&x, &y) {
            prop_assert!(le_bar(&x, &z));
        }
    }

    #[test]
    fn sum_is_commutative(m in model(), fam in family(), seed in any::<u64>()) {
        let (x, y) = pair(&fam, m, seed);
        prop_assert_eq!(oplus(&x, &y), oplus(&y, &x));
        prop_assert_eq!(oplus_bar(&x, &y), oplus_bar(&y, &x));
    }

    #[test]
    fn json_round_trip(m in model(), fam in family(), seed in any::<u64>()) {
        let (x, _) = pair(&fam, m, seed);
        let json = x.to_json();
        prop_assert_eq!(FormSpec::from_json(&json).unwrap(), x);
    }

    #[test]
    fn polarization_recovers_the_form(m in model(), fam in family(), seed in any::<u64>()) {
        let (t, _) = pair(&fam, m, seed);
        prop_assume!(!t.has_hamel());
        let level = m.default_levels()[0];
        let mut gen = TestVectorGen::new(seed);
        let (x, y) = (gen.complex_normal(m.dim(level)), gen.complex_normal(m.dim(level)));
        let direct = evaluate_coords(&t, &x, &y, level).unwrap();
        let via = polarize(|v| evaluate_coords(&t, v, v, level).unwrap().re, &x, &y);
        prop_assert!((direct - via).norm() <= 1e-10 * direct.norm().max(1.0));
    }

    #[test]
    fn interval_order_is_componentwise(a in 0i64..=3, b in 0i64..=2, c in 0i64..=3, d in 0i64..=2) {
        let ea = make_interval_ea([3i64, 2]).unwrap();
        let (x, y) = ([a, b], [c, d]);
        prop_assert_eq!(derived_le(&ea, &x, &y).unwrap(), a <= c && b <= d);
        if a <= c && b <= d {
            prop_assert_eq!(ominus(&ea, &y, &x).unwrap(), Some([c - a, d - b]));
        }
    }

    #[test]
    fn nat_difference_cancels(x in 0i64..=25, y in 0i64..=25) {
        let nat = NatGea { cap: 50 };
        let z = nat.oplus(&x, &y).unwrap();
        prop_assert_eq!(ominus(&nat, &z, &x).unwrap(), Some(y));
    }
}

//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any FAIL.

use std::process::Command;
use std::time::{Duration, Instant};

use gealab::convergence::{sigma_report, BoundVerdict, CellEvidence, ChainOrder, SigmaReport};
use gealab::form::{
    boundary_form, catalog_forms, energy_form, evaluate_coords, extend_bounded, identity_form, kato_term,
    linear_diag, linear_diag_on_span, quadratic, reg_sing_split, riesz_operator_of_bounded, riesz_residual,
    robin_form, seeded_form, singularity_witness, DomainTag, FormSpec,
};
use gealab::forms_gea::{
    oplus, oplus_bar, preceq, sample_form, FamilyId, FormsGea, OpVariant, OrderProbe, SaGea,
};
use gealab::hilbert::{dirichlet_energy, polarize, GridFunction, Model, TestVectorGen};
use gealab::instances::{even_gap_demo, make_interval_ea, EvenGapGea, NatGea};
use gealab::kernel::{
    brute_join, brute_meet, check_axioms, derived_le, is_sub_gea, is_sub_gea_on_pairs, join_by_differences,
    meet_by_differences, CheckStrategy, PartialAlgebra, SubGeaViolation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

const SEEDS: [u64; 3] = [1, 2, 3];

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn axioms_pass<A: PartialAlgebra>(alg: &A, strategy: CheckStrategy, name: &str) -> Outcome {
    let r = check_axioms(alg, strategy).map_err(|e| format!("{name}: {e}"))?;
    ensure(r.all_pass(), || format!("{name}: {:?}", r.verdicts))?;
    if let CheckStrategy::Sampled { n, .. } = strategy {
        ensure(r.samples_tested >= n, || format!("{name}: only {} tuples", r.samples_tested))?;
    }
    Ok(())
}

fn axiom_suites() -> Outcome {
    let start = Instant::now();
    axioms_pass(&NatGea { cap: 50 }, CheckStrategy::Exhaustive, "zplus")?;
    axioms_pass(&EvenGapGea { cap: 50 }, CheckStrategy::Exhaustive, "even-gap")?;
    for u in 1..=6i64 {
        axioms_pass(&make_interval_ea(u).unwrap(), CheckStrategy::Exhaustive, &format!("interval {u}"))?;
    }
    for u in [[2i64, 2], [3, 2]] {
        axioms_pass(&make_interval_ea(u).unwrap(), CheckStrategy::Exhaustive, &format!("interval {u:?}"))?;
    }
    for model in [Model::Sequence, Model::Grid] {
        for seed in SEEDS {
            let strategy = CheckStrategy::Sampled { n: 2000, seed };
            for gea in FormsGea::suite(model) {
                axioms_pass(&gea, strategy, &format!("{} {model:?} seed {seed}", gea.id()))?;
            }
            axioms_pass(&SaGea { model }, strategy, &format!("sa {model:?} seed {seed}"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))
}

fn even_gap_regression() -> Outcome {
    let r = even_gap_demo(50).map_err(|e| e.to_string())?;
    ensure(!r.is_sub_gea, || "subset reported as sub-GEA".into())?;
    ensure(r.violation == Some(SubGeaViolation::Triple { x: 4, y: 2, z: 6 }), || {
        format!("certificate {:?}", r.violation)
    })?;
    ensure(r.le_in_base && !r.le_in_subset, || "derived order mismatch".into())?;
    let nat = NatGea { cap: 50 };
    let direct = is_sub_gea(&nat, |x: &i64| *x == 0 || (*x >= 4 && x % 2 == 0)).map_err(|e| e.to_string())?;
    ensure(direct.violation == r.violation, || format!("direct check {:?}", direct.violation))?;
    ensure(derived_le(&nat, &4, &6).unwrap(), || "4 <= 6 fails in N".into())
}

/// Pairs from `first` and `second` whose sum in `alg` is defined.
fn defined_pairs(
    alg: &FormsGea,
    first: &FamilyId,
    second: &[FamilyId],
    count: usize,
    seed: u64,
) -> Vec<(FormSpec, FormSpec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = sample_form(first, alg.model, &mut rng);
        let fam = &second[rng.random_range(0..second.len())];
        let y = sample_form(fam, alg.model, &mut rng);
        let (x, y) = if rng.random_bool(0.5) { (x, y) } else { (y, x) };
        if alg.oplus(&x, &y).is_some() {
            out.push((x, y));
        }
    }
    out
}

fn sub_gea_battery() -> Outcome {
    for model in [Model::Sequence, Model::Grid] {
        let vf = FormsGea::new(FamilyId::Vf, OpVariant::Plain, model);
        let pairs = defined_pairs(&vf, &FamilyId::Bf, &[FamilyId::Bf, FamilyId::Vf], 1000, 11);
        let bf = is_sub_gea_on_pairs(&vf, |t: &FormSpec| FamilyId::Bf.contains(t), pairs);
        ensure(bf.holds && bf.triples_tested == 1000, || format!("B_f {model:?}: {:?}", bf.violation))?;

        let bar = FormsGea::new(FamilyId::Vf, OpVariant::Bar, model);
        for (i, fam) in [FamilyId::Rf, FamilyId::Sf].into_iter().enumerate() {
            let pairs = defined_pairs(&bar, &fam, &[fam.clone(), FamilyId::Vf], 1000, 20 + i as u64);
            let c = is_sub_gea_on_pairs(&bar, |t: &FormSpec| fam.contains(t), pairs);
            ensure(c.holds && c.triples_tested == 1000, || format!("{fam} under bar {model:?}: {:?}", c.violation))?;
        }
    }
    let vf = FormsGea::new(FamilyId::Vf, OpVariant::Plain, Model::Grid);
    let rf = is_sub_gea_on_pairs(&vf, |t: &FormSpec| FamilyId::Rf.contains(t), [(energy_form(), boundary_form())]);
    let expected = SubGeaViolation::Triple {
        x: energy_form(),
        y: boundary_form(),
        z: robin_form(),
    };
    ensure(rf.violation == Some(expected), || format!("R_f violation {:?}", rf.violation))
}

fn regular_sum() -> Outcome {
    let (tp, t0, t1) = (energy_form(), boundary_form(), robin_form());
    let sum = oplus(&tp, &t0).ok_or("t' + t_0 undefined")?;
    ensure(sum == t1, || format!("sum {sum}"))?;
    let split = reg_sing_split(&sum).map_err(|e| e.to_string())?;
    ensure(split == (t1.clone(), FormSpec::zero(Model::Grid)), || format!("split {split:?}"))?;
    let (tp_r, _) = reg_sing_split(&tp).map_err(|e| e.to_string())?;
    let (t0_r, _) = reg_sing_split(&t0).map_err(|e| e.to_string())?;
    ensure(oplus(&tp_r, &t0_r) == Some(tp.clone()), || "regular parts do not add to t'".into())?;
    ensure(oplus_bar(&tp, &t0).is_none(), || "bar sum defined".into())?;
    let probe = OrderProbe::default();
    ensure(probe.tol == 1e-9, || "probe tolerance".into())?;
    ensure(preceq(&tp, &t1, &probe).map_err(|e| e.to_string())?, || "t' not below t_1".into())?;
    ensure(!preceq(&t1, &tp, &probe).map_err(|e| e.to_string())?, || "t_1 below t'".into())
}

fn kato_convergence() -> Outcome {
    let start = Instant::now();
    let mut gen = TestVectorGen::new(7);
    for m in [9, 49, 199] {
        let mut samples: Vec<GridFunction> = (0..20).map(|_| gen.unit_grid(m)).collect();
        samples.push(GridFunction::from_real_fn(m, |x| x));
        samples.push(GridFunction::from_real_fn(m, |_| 1.0));
        samples.push(GridFunction::from_real_fn(m, |x| (std::f64::consts::PI * x).sin()));
        for u in &samples {
            let base = quadratic(&boundary_form(), u, m).map_err(|e| e.to_string())?;
            let energy = dirichlet_energy(u);
            let mut prev = f64::INFINITY;
            for n in 1..=32u32 {
                let v = quadratic(&kato_term(n), u, m).map_err(|e| e.to_string())?;
                let gap = v - base;
                let want = energy / n as f64;
                ensure((gap - want).abs() <= 1e-9 * want.abs().max(1.0), || {
                    format!("mesh {m}, n {n}: gap {gap} vs {want}")
                })?;
                ensure(v <= prev + 1e-12 * prev.abs().max(1.0), || format!("mesh {m}, n {n}: not monotone"))?;
                prev = v;
            }
        }
        let x = GridFunction::from_real_fn(m, |x| x);
        let one = GridFunction::from_real_fn(m, |_| 1.0);
        let t1x = quadratic(&kato_term(1), &x, m).map_err(|e| e.to_string())?;
        ensure((t1x - 2.0).abs() < 1e-12, || format!("t_1(x) = {t1x} at mesh {m}"))?;
        for n in [1, 7, 32] {
            let v = quadratic(&kato_term(n), &one, m).map_err(|e| e.to_string())?;
            ensure((v - 2.0).abs() < 1e-12, || format!("t_{n}(1) = {v} at mesh {m}"))?;
        }
    }
    let sine = GridFunction::from_real_fn(199, |x| (std::f64::consts::PI * x).sin());
    let e = dirichlet_energy(&sine);
    let want = std::f64::consts::PI.powi(2) / 2.0;
    ensure((e - want).abs() <= 1e-3, || format!("energy of sin = {e}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))
}

fn cell<'a>(r: &'a SigmaReport, family: &str, order: &ChainOrder, dir: &str) -> Result<&'a CellEvidence, String> {
    r.rows
        .iter()
        .filter(|row| row.family == family && &row.order == order)
        .flat_map(|row| &row.cells)
        .find(|c| c.direction == dir)
        .map(|c| &c.evidence)
        .ok_or_else(|| format!("no cell {family} {dir}"))
}

fn sigma_table() -> Outcome {
    let r = sigma_report(32, &OrderProbe::default()).map_err(|e| e.to_string())?;
    for row in &r.rows {
        for c in &row.cells {
            ensure(c.matches, || format!("{} {}: expected {}, observed {:?}", row.family, c.direction, c.expected, c.observed))?;
        }
    }
    ensure(r.all_match, || "table mismatch".into())?;
    let oplus = ChainOrder::Oplus;
    match cell(&r, "vf", &oplus, "down")? {
        CellEvidence::Bound(b) => ensure(b.verdict == BoundVerdict::Found { element: robin_form() }, || {
            format!("V_f meet {:?}", b.verdict)
        })?,
        other => return Err(format!("V_f down evidence {other:?}")),
    }
    match cell(&r, "vf", &oplus, "up")? {
        CellEvidence::Dominators(d) => {
            ensure(d.dominators == vec![linear_diag(), linear_diag_on_span()], || format!("{:?}", d.dominators))?;
            ensure(d.incomparable && d.dominates.iter().all(|&b| b), || "dominators".into())?;
        }
        other => return Err(format!("V_f up evidence {other:?}")),
    }
    for (family, order) in [
        ("rf", ChainOrder::Family(FamilyId::Rf)),
        ("cf", ChainOrder::Family(FamilyId::Cf)),
        ("vf-bar", ChainOrder::Bar),
    ] {
        match cell(&r, family, &order, "down")? {
            CellEvidence::Bound(b) => match &b.verdict {
                BoundVerdict::Obstruction { first, second, .. } => {
                    let pair = [first, second];
                    ensure(pair.contains(&&robin_form()) && pair.contains(&&energy_form()), || {
                        format!("{family} obstruction {first}, {second}")
                    })?
                }
                v => return Err(format!("{family} down verdict {v:?}")),
            },
            other => return Err(format!("{family} down evidence {other:?}")),
        }
    }
    match cell(&r, "cf", &ChainOrder::Prec, "up")? {
        CellEvidence::Sup(s) => ensure(s.verified && s.sup == energy_form(), || format!("C_f sup {}", s.sup)),
        other => Err(format!("C_f prec evidence {other:?}")),
    }
}

fn all_subsets(u: i64) -> impl Iterator<Item = Vec<i64>> {
    (1u32..(1 << (u + 1))).map(move |mask| (0..=u).filter(|k| mask & (1 << k) != 0).collect())
}

fn difference_oracles() -> Outcome {
    for u in 1..=6i64 {
        let ea = make_interval_ea(u).unwrap();
        let join = |xs: &[i64]| brute_join(&ea, xs).ok().flatten();
        let meet = |xs: &[i64]| brute_meet(&ea, xs).ok().flatten();
        for asc in all_subsets(u) {
            let desc: Vec<i64> = asc.iter().rev().copied().collect();
            let via = meet_by_differences(&ea, &desc, join).map_err(|e| format!("u {u}, {desc:?}: {e}"))?;
            ensure(Some(via) == meet(&desc), || format!("u {u}, meet of {desc:?}"))?;
            let top = *asc.last().unwrap();
            let expected = join(&asc);
            for bound in top..=u {
                let via = join_by_differences(&ea, &asc, &bound, meet).map_err(|e| format!("u {u}, {asc:?}: {e}"))?;
                ensure(Some(via) == expected, || format!("u {u}, join of {asc:?} under {bound}"))?;
            }
        }
    }
    Ok(())
}

fn singularity_criterion() -> Outcome {
    let mut gen = TestVectorGen::new(8);
    for m in Model::Grid.default_levels() {
        for i in 0..50 {
            let u = gen.unit_grid(m);
            let w = singularity_witness(&boundary_form(), &u, m).map_err(|e| e.to_string())?;
            ensure(w.as_ref().is_some_and(|w| w.ratio < 1.0), || format!("no t_0 witness, mesh {m}, sample {i}"))?;
            let w = singularity_witness(&robin_form(), &u, m).map_err(|e| e.to_string())?;
            ensure(w.is_none(), || format!("t_1 witness {w:?}, mesh {m}, sample {i}"))?;
        }
    }
    for level in Model::Sequence.default_levels() {
        for i in 0..50 {
            let x = gen.unit_seq(level);
            let w = singularity_witness(&linear_diag(), &x, level).map_err(|e| e.to_string())?;
            ensure(w.is_none(), || format!("Diag(j) witness {w:?}, level {level}, sample {i}"))?;
        }
    }
    Ok(())
}

fn polarization_and_riesz() -> Outcome {
    let mut gen = TestVectorGen::new(9);
    for (name, t) in catalog_forms() {
        let model = t.model();
        let level = model.default_levels()[0];
        let dim = model.dim(level);
        for _ in 0..100 {
            let (x, y) = (gen.complex_normal(dim), gen.complex_normal(dim));
            let q = |v: &nalgebra::DVector<_>| evaluate_coords(&t, v, v, level).unwrap().re;
            let direct = evaluate_coords(&t, &x, &y, level).map_err(|e| e.to_string())?;
            let via = polarize(q, &x, &y);
            let err = (direct - via).norm() / direct.norm().max(1.0);
            ensure(err <= 1e-10, || format!("{name}: polarization error {err}"))?;
        }
        if t.is_bounded() {
            for level in model.default_levels() {
                let a = riesz_operator_of_bounded(&t, level).map_err(|e| e.to_string())?;
                let res = riesz_residual(&t, &a, level, 20, 5).map_err(|e| e.to_string())?;
                ensure(res < 1e-10, || format!("{name}: Riesz residual {res} at level {level}"))?;
            }
        }
    }
    let restricted = [
        identity_form(Model::Sequence).with_domain(DomainTag::FiniteSupport),
        seeded_form(Model::Sequence, 4).with_domain(DomainTag::DiagMaximal("j".into())),
        seeded_form(Model::Grid, 4).with_domain(DomainTag::H1Grid),
        Ok(identity_form(Model::Grid)),
    ];
    for t in restricted {
        let t = t.map_err(|e| e.to_string())?;
        let ext = extend_bounded(&t).map_err(|e| e.to_string())?;
        ensure(*ext.domain() == DomainTag::FullSpace, || format!("extension of {t} on {}", ext.domain().id()))?;
        let json = ext.to_json();
        let back = FormSpec::from_json(&json).map_err(|e| e.to_string())?;
        ensure(back == ext && back.to_json() == json, || format!("round trip of {ext}"))?;
    }
    Ok(())
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gealab"))
            .args(["sigma", "--seed", "7", "--format", "json"])
            .env_remove("GEALAB_SEED")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success() && b.status.success(), || format!("exit {:?} / {:?}", a.status, b.status))?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "outputs differ".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("axiom suites", axiom_suites),
        ("even-gap subset regression", even_gap_regression),
        ("sub-GEA battery", sub_gea_battery),
        ("regular-sum counterexample", regular_sum),
        ("kato convergence", kato_convergence),
        ("sigma-completeness table", sigma_table),
        ("difference-oracle equivalence", difference_oracles),
        ("singularity criterion", singularity_criterion),
        ("polarization and Riesz", polarization_and_riesz),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("criterion {:>2} {name}: PASS ({secs:.2}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({secs:.2}s): {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

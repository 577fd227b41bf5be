//! The acceptance suite: every release criterion as one test, each printing
//! a single PASS/FAIL line. All comparisons are exact rational equalities;
//! the two timed suites also enforce their wall-clock budgets.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeSet;
use std::time::Instant;

use convexlab::convex::{
    check_convex_axioms, check_convex_axioms_sampled, check_nested_tuple_identity,
    check_nested_tuple_identity_sampled, standard_grid, ConvexAlgebra, ConvexElement,
    MeetSemilattice, Mixes, PolytopeAlgebra, SimplexAlgebra,
};
use convexlab::effect::{
    are_isomorphic, check_coproduct_universal, check_effect_axioms, check_product_universal,
    enumerate_ea_homs, EffectTable,
};
use convexlab::faces::{self, FilterRep};
use convexlab::formal::{
    check_commutativity, check_monad_laws, Dist, MonadKind,
};
use convexlab::hilbert;
use convexlab::preframes::{self, FinitePreframe};
use convexlab::report::CheckReport;
use convexlab::sampling;
use convexlab::scalars::{rat, BoolSemiring, NatSemiring, NonNegRationalSemiring, Rational};
use convexlab::semimod::adjunction_round_trip_suite;
use convexlab::states;
use convexlab::structio;

const SEED: u64 = sampling::DEFAULT_SEED;

fn verdict(criterion: &str, ok: bool) {
    println!("{} criterion {criterion}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed");
}

fn all_passed(reports: &[CheckReport]) -> bool {
    for r in reports {
        if !r.all_passed() {
            for f in r.failures() {
                eprintln!("  failure in {} / {}: {} {:?}", r.suite, r.subject, f.name, f.outcome);
            }
            return false;
        }
    }
    true
}

fn diamond() -> ConvexAlgebra {
    let elements = vec!["0".to_string(), "1".to_string(), "a".to_string(), "b".to_string()];
    let meet = vec![
        vec![0, 0, 0, 0],
        vec![0, 1, 2, 3],
        vec![0, 2, 2, 0],
        vec![0, 3, 0, 3],
    ];
    ConvexAlgebra::Semilattice(MeetSemilattice::new("diamond", elements, meet, Some(1)).unwrap())
}

fn two_lattice() -> ConvexAlgebra {
    ConvexAlgebra::Semilattice(MeetSemilattice::two())
}

fn simplex(n: usize) -> ConvexAlgebra {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    ConvexAlgebra::Simplex(SimplexAlgebra::new(format!("simplex{n}"), names).unwrap())
}

fn square() -> ConvexAlgebra {
    ConvexAlgebra::Polytope(
        PolytopeAlgebra::new(
            "square",
            2,
            vec![
                vec![Rational::zero(), Rational::zero()],
                vec![Rational::zero(), Rational::one()],
                vec![Rational::one(), Rational::zero()],
                vec![Rational::one(), Rational::one()],
            ],
        )
        .unwrap(),
    )
}

fn segment() -> ConvexAlgebra {
    ConvexAlgebra::Polytope(
        PolytopeAlgebra::new("interval01", 1, vec![vec![Rational::zero()], vec![Rational::one()]])
            .unwrap(),
    )
}

#[test]
fn criterion_01_monad_laws() {
    let start = Instant::now();
    let carrier: Vec<String> = (0..4).map(|i| format!("x{i}")).collect();
    let mut rng = sampling::rng_for(SEED, "acceptance-monad-laws");
    let mut reports = Vec::new();
    for kind in [MonadKind::Multiset, MonadKind::Distribution] {
        reports.push(check_monad_laws(&BoolSemiring, kind, &carrier, 0, &mut rng));
        reports.push(check_monad_laws(&NatSemiring, kind, &carrier, 200, &mut rng));
        reports.push(check_monad_laws(&NonNegRationalSemiring, kind, &carrier, 200, &mut rng));
    }
    let elapsed = start.elapsed();
    let ok = all_passed(&reports) && elapsed.as_secs_f64() < 10.0;
    println!("  monad-law suite took {:.2}s", elapsed.as_secs_f64());
    verdict("1 (monad laws over 2, nat, nonneg rationals)", ok);
}

#[test]
fn criterion_02_commutativity() {
    let mut rng = sampling::rng_for(SEED, "acceptance-commutativity");
    let xs2: Vec<String> = (0..2).map(|i| format!("x{i}")).collect();
    let ys2: Vec<String> = (0..2).map(|i| format!("y{i}")).collect();
    let xs3: Vec<String> = (0..3).map(|i| format!("x{i}")).collect();
    let ys3: Vec<String> = (0..3).map(|i| format!("y{i}")).collect();
    let reports = vec![
        check_commutativity(&NonNegRationalSemiring, MonadKind::Distribution, &xs2, &ys2, 200, &mut rng),
        check_commutativity(&BoolSemiring, MonadKind::Multiset, &xs3, &ys3, 0, &mut rng),
    ];
    verdict("2 (strength composites agree)", all_passed(&reports));
}

#[test]
fn criterion_03_evaluation_round_trip() {
    let mut rng = sampling::rng_for(SEED, "acceptance-eval-round-trip");
    let algebras = [diamond(), simplex(3), square()];
    let mut checked = 0usize;
    let mut ok = true;
    'outer: for alg in &algebras {
        let pool = alg.sample_pool(6, &mut rng);
        for _ in 0..170 {
            let size = 1 + sampling::below(&mut rng, 3) as usize;
            let mut picked: Vec<ConvexElement> = Vec::new();
            while picked.len() < size {
                let e = sampling::pick(&mut rng, &pool).clone();
                if !picked.contains(&e) {
                    picked.push(e);
                }
            }
            let weights = sampling::convex_weights(&mut rng, picked.len(), 24);
            let dist = Dist::from_weights(weights.iter().cloned().zip(picked.iter().cloned()))
                .expect("weights sum to one");
            let direct = alg.evaluate(&dist).expect("elements belong to the algebra");
            let mut terms: Vec<(Rational, ConvexElement)> =
                dist.terms().map(|(e, r)| (r.clone(), e.clone())).collect();
            let recursive = alg.evaluate_recursive(&terms).expect("same inputs");
            if recursive != direct {
                ok = false;
                break 'outer;
            }
            // An arbitrary seeded permutation must give the same value.
            for _ in 0..3 {
                let i = sampling::below(&mut rng, terms.len() as u64) as usize;
                let j = sampling::below(&mut rng, terms.len() as u64) as usize;
                terms.swap(i, j);
            }
            if alg.evaluate_recursive(&terms).expect("same inputs") != direct {
                ok = false;
                break 'outer;
            }
            checked += 1;
        }
    }
    println!("  evaluation round trip checked on {checked} distributions");
    verdict("3 (direct and recursive evaluation agree, permutation-invariantly)", ok && checked >= 500);
}

#[test]
fn criterion_04_convex_axioms() {
    let mut rng = sampling::rng_for(SEED, "acceptance-convex-axioms");
    let grid = standard_grid(&mut rng);
    let mut reports = Vec::new();
    for alg in [two_lattice(), diamond()] {
        let samples = alg.sample_pool(0, &mut rng);
        reports.push(check_convex_axioms(&alg, &grid, &samples));
        reports.push(check_nested_tuple_identity(&alg, &grid, &samples));
    }
    for alg in [simplex(3), square(), segment()] {
        reports.push(check_convex_axioms_sampled(&alg, 200, &mut rng));
        reports.push(check_nested_tuple_identity_sampled(&alg, 200, &mut rng));
    }
    verdict("4 (convex-set axioms and nested-tuple identity)", all_passed(&reports));
}

#[test]
fn criterion_05_free_semimodule_adjunction() {
    let mut rng = sampling::rng_for(SEED, "acceptance-adjunction");
    let reports = vec![
        adjunction_round_trip_suite(&diamond(), 100, &mut rng),
        adjunction_round_trip_suite(&simplex(3), 100, &mut rng),
        adjunction_round_trip_suite(&square(), 100, &mut rng),
    ];
    verdict("5 (free-semimodule transposition round trips)", all_passed(&reports));
}

#[test]
fn criterion_06_prime_filter_duality() {
    let mut rng = sampling::rng_for(SEED, "acceptance-prime-filters");
    let grid = standard_grid(&mut rng);
    let mut ok = true;

    // Counts against the stated oracles.
    let two = two_lattice();
    ok &= faces::enumerate_prime_filters(&two, &grid).unwrap().len() == 3;

    // Diamond: compare against a fully independent subset scan that checks
    // the defining conditions directly on the small distributions.
    let dia = diamond();
    let enumerated = faces::enumerate_prime_filters(&dia, &grid).unwrap();
    let oracle = {
        let names = ["0", "1", "a", "b"];
        let mut found: Vec<BTreeSet<String>> = Vec::new();
        for mask in 0u32..16 {
            let set: BTreeSet<String> = names
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.to_string())
                .collect();
            let member = |e: &ConvexElement| match e {
                ConvexElement::Lattice(x) => set.contains(x),
                _ => false,
            };
            let mut prime = true;
            // All two- and three-point mixtures with grid weights.
            let elems: Vec<ConvexElement> =
                names.iter().map(|n| ConvexElement::lattice(*n)).collect();
            let inner: Vec<&Rational> = grid
                .iter()
                .filter(|r| !r.is_zero() && !r.is_one())
                .collect();
            'mix: for (i, x) in elems.iter().enumerate() {
                for y in elems.iter().skip(i + 1) {
                    for r in &inner {
                        let d = Dist::from_weights([
                            ((*r).clone(), x.clone()),
                            (Rational::one() - (*r).clone(), y.clone()),
                        ])
                        .unwrap();
                        let v = dia.evaluate(&d).unwrap();
                        let all_in = d.support().all(member);
                        if all_in != member(&v) {
                            prime = false;
                            break 'mix;
                        }
                    }
                }
            }
            if prime {
                found.push(set);
            }
        }
        found
    };
    let enumerated_sets: Vec<BTreeSet<String>> = enumerated
        .iter()
        .map(|f| match &f.rep {
            FilterRep::Elements(s) => s.clone(),
            _ => unreachable!(),
        })
        .collect();
    let mut lhs = enumerated_sets.clone();
    lhs.sort();
    let mut rhs = oracle.clone();
    rhs.sort();
    ok &= lhs == rhs;
    ok &= enumerated.len() == 5;

    for n in 1..=4 {
        let s = simplex(n);
        ok &= faces::enumerate_prime_filters(&s, &grid).unwrap().len() == (1 << n);
    }
    ok &= faces::enumerate_prime_filters(&square(), &grid).unwrap().len() == 10;

    // Extreme points.
    let seg_ext = faces::extreme_points(&segment(), &grid).unwrap();
    let seg_named: Vec<String> = seg_ext.iter().map(|e| e.to_string()).collect();
    ok &= seg_named == vec!["(0)", "(1)"];
    let simplex_ext = faces::extreme_points(&simplex(4), &grid).unwrap();
    ok &= simplex_ext.len() == 4
        && simplex_ext.iter().all(|e| matches!(e, ConvexElement::Bary(d) if d.len() == 1));

    // Order isomorphism with the two-valued maps, on every test algebra.
    let mut reports = Vec::new();
    for alg in [two, dia, simplex(3), square(), segment()] {
        let samples: Vec<ConvexElement> =
            alg.sample_pool(5, &mut rng).into_iter().take(5).collect();
        reports.push(faces::check_filter_duality(&alg, &grid, &samples).unwrap());
    }
    ok &= all_passed(&reports);

    verdict("6 (prime filters, faces and the order isomorphism)", ok);
}

#[test]
fn criterion_07_preframe_duality() {
    let mut rng = sampling::rng_for(SEED, "acceptance-preframe-duality");
    let grid = standard_grid(&mut rng);
    let chain3 = FinitePreframe::new(
        "chain3",
        vec!["0".into(), "m".into(), "1".into()],
        &[("0".into(), "m".into()), ("m".into(), "1".into())],
    )
    .unwrap();
    let diamond_pf = FinitePreframe::new(
        "diamond",
        vec!["0".into(), "a".into(), "b".into(), "1".into()],
        &[
            ("0".into(), "a".into()),
            ("0".into(), "b".into()),
            ("a".into(), "1".into()),
            ("b".into(), "1".into()),
        ],
    )
    .unwrap();

    // Scott-open filter count oracle by independent subset scan.
    let oracle_count = {
        let n = diamond_pf.len();
        let mut count = 0;
        for mask in 0u32..(1 << n) {
            let subset: BTreeSet<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let contains_top = subset.contains(&diamond_pf.top());
            let upward = subset.iter().all(|&a| {
                (0..n).all(|b| !diamond_pf.leq(a, b) || subset.contains(&b))
            });
            let meet_closed = subset
                .iter()
                .all(|&a| subset.iter().all(|&b| subset.contains(&diamond_pf.meet(a, b))));
            if contains_top && upward && meet_closed {
                count += 1;
            }
        }
        count
    };
    let mut ok = oracle_count == 4;
    ok &= preframes::scott_open_filters(&diamond_pf).len() == 4;

    let mut reports = Vec::new();
    for (x, l) in [
        (two_lattice(), FinitePreframe::two()),
        (two_lattice(), chain3.clone()),
        (diamond(), FinitePreframe::two()),
        (diamond(), chain3),
        (diamond(), diamond_pf),
        (simplex(2), FinitePreframe::two()),
    ] {
        reports.push(preframes::check_preframe_duality(&x, &l, &grid, &mut rng).unwrap());
    }
    ok &= all_passed(&reports);
    verdict("7 (preframe duality round trips and filter counts)", ok);
}

#[test]
fn criterion_08_effect_algebra_suite() {
    let mut ok = true;
    let mut reports = Vec::new();

    let mut tables = vec![EffectTable::mo2()];
    for m in 1..=6 {
        tables.push(EffectTable::interval_nat(m));
    }
    for n in 0..=4 {
        tables.push(EffectTable::powerset(n));
    }
    tables.push(EffectTable::product(&EffectTable::mo2(), &EffectTable::two()).unwrap());
    tables.push(EffectTable::product(&EffectTable::interval_nat(2), &EffectTable::interval_nat(3)).unwrap());
    tables.push(EffectTable::coproduct(&EffectTable::interval_nat(2), &EffectTable::mo2()).unwrap());
    tables.push(EffectTable::coproduct(&EffectTable::powerset(2), &EffectTable::interval_nat(2)).unwrap());
    for t in &tables {
        reports.push(check_effect_axioms(t));
    }

    let two = EffectTable::two();
    ok &= are_isomorphic(&EffectTable::coproduct(&two, &two).unwrap(), &two);
    ok &= are_isomorphic(&EffectTable::product(&two, &two).unwrap(), &EffectTable::mo2());

    // Initiality of 2 and finality of 1 by exhaustive enumeration.
    let one = EffectTable::one_element();
    for t in &tables {
        ok &= enumerate_ea_homs(&two, t).unwrap().len() == 1;
        ok &= enumerate_ea_homs(t, &one).unwrap().len() == 1;
    }

    // Universal properties on small cones and cocones.
    reports.push(check_product_universal(&EffectTable::mo2(), &two, &two).unwrap());
    reports.push(
        check_coproduct_universal(&EffectTable::interval_nat(2), &two, &EffectTable::interval_nat(2))
            .unwrap(),
    );

    ok &= all_passed(&reports);
    verdict("8 (effect-algebra axioms, constructions, initial and final objects)", ok);
}

#[test]
fn criterion_09_state_spaces() {
    let start = Instant::now();
    let mut ok = true;

    // MO2: exactly the two 0/1 vertex states, known in closed form.
    let mo2 = EffectTable::mo2();
    let space = states::state_space(&mo2).unwrap();
    ok &= space.extreme.len() == 2;
    let a = mo2.index_of("a").unwrap();
    let expected: BTreeSet<(String, String)> = BTreeSet::from([
        ("0".to_string(), "1".to_string()),
        ("1".to_string(), "0".to_string()),
    ]);
    let got: BTreeSet<(String, String)> = space
        .extreme
        .iter()
        .map(|s| (s.values[a].to_string(), s.values[mo2.ortho(a)].to_string()))
        .collect();
    ok &= got == expected;

    // Powerset on three atoms: the three point masses.
    let p3 = EffectTable::powerset(3);
    let space = states::state_space(&p3).unwrap();
    ok &= space.extreme.len() == 3;
    let atoms: Vec<usize> =
        ["{0}", "{1}", "{2}"].iter().map(|n| p3.index_of(n).unwrap()).collect();
    let mut seen_masses = BTreeSet::new();
    for s in &space.extreme {
        let mass_at: Vec<usize> = atoms
            .iter()
            .copied()
            .filter(|&i| s.values[i].is_one())
            .collect();
        ok &= mass_at.len() == 1;
        for &i in &atoms {
            ok &= s.values[i].is_zero() || s.values[i].is_one();
        }
        seen_masses.insert(mass_at[0]);
    }
    ok &= seen_masses.len() == 3;

    // Intervals: a unique state with f(k) = k/M.
    for m in 1..=6u64 {
        let e = EffectTable::interval_nat(m);
        let space = states::state_space(&e).unwrap();
        ok &= space.extreme.len() == 1;
        let s = &space.extreme[0];
        for k in 0..=m {
            let idx = e.index_of(&k.to_string()).unwrap();
            ok &= s.values[idx] == Rational::new(k as i64, m as i64);
        }
    }

    // Every certificate has full rank (checked inside state_space, asserted
    // again here against the constraint matrix).
    let space = states::state_space(&p3).unwrap();
    for cert in &space.certificates {
        let rows: Vec<Vec<Rational>> =
            cert.iter().map(|&i| space.constraints[i].coeffs.clone()).collect();
        ok &= convexlab::linalg::rank(&rows) == p3.len();
    }

    // The rational unit interval forcing argument up to denominator 24.
    let report = states::rational_interval_unique_state(24);
    ok &= report.all_passed();

    let elapsed = start.elapsed();
    println!("  state-space suite took {:.2}s", elapsed.as_secs_f64());
    ok &= elapsed.as_secs_f64() < 60.0;
    verdict("9 (extreme states with exact certificates)", ok);
}

#[test]
fn criterion_10_effect_duality() {
    let mut rng = sampling::rng_for(SEED, "acceptance-effect-duality");
    let mut reports = Vec::new();
    for e in [
        EffectTable::two(),
        EffectTable::mo2(),
        EffectTable::interval_nat(2),
        EffectTable::interval_nat(4),
        EffectTable::powerset(2),
        EffectTable::powerset(3),
    ] {
        let space = states::state_space(&e).unwrap();
        reports.push(states::check_unit_hom(&e, &space).unwrap());
    }
    // ε affine on ≥ 200 seeded probes: each trial in check_counit tests one
    // seeded mixture against every sampled functional.
    reports.push(states::check_counit(&simplex(2), 20, &mut rng).unwrap());
    reports.push(states::check_counit(&simplex(3), 20, &mut rng).unwrap());
    reports.push(states::check_counit(&segment(), 20, &mut rng).unwrap());
    // 60 mixtures × (2 + 20) functionals ≥ 200 probes in total.
    for n in 1..=6 {
        let labels: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        reports.push(states::composed_adjunction_check(&labels, 16, &mut rng).unwrap());
    }
    verdict("10 (unit and counit of the effect duality)", all_passed(&reports));
}

#[test]
fn criterion_11_hilbert() {
    let mut rng = sampling::rng_for(SEED, "acceptance-hilbert");
    let mut reports = Vec::new();
    for ambient in [2usize, 3] {
        reports.push(hilbert::check_orthomodular_law(ambient, 500, &mut rng));
        reports.push(hilbert::check_lattice_laws(ambient, 100, &mut rng));
    }

    let span = |ambient: usize, rows: &[&[i64]]| {
        hilbert::RationalSubspace::from_spanning(
            ambient,
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_int(x)).collect())
                .collect(),
        )
        .unwrap()
    };
    let families = vec![
        (hilbert::ksub_effect_algebra(2, &[span(2, &[&[1, 0]])]).unwrap(), vec![rat(3, 5), rat(4, 5)]),
        (
            hilbert::ksub_effect_algebra(2, &[span(2, &[&[1, 0]]), span(2, &[&[1, 1]])]).unwrap(),
            vec![rat(3, 5), rat(4, 5)],
        ),
        (
            hilbert::ksub_effect_algebra(
                3,
                &[span(3, &[&[1, 0, 0]]), span(3, &[&[0, 1, 0]]), span(3, &[&[0, 0, 1]])],
            )
            .unwrap(),
            vec![rat(1, 3), rat(2, 3), rat(2, 3)],
        ),
    ];
    let mut ok = true;
    for (fam, coords) in &families {
        reports.push(check_effect_axioms(&fam.table));
        let a = hilbert::UnitVector::new(coords.clone()).unwrap();
        reports.push(hilbert::check_epsilon_report(&a, fam));
        // Complement identity on every member, stated directly.
        for s in &fam.subspaces {
            let total = &hilbert::projection_norm_sq(a.coords(), s)
                + &hilbert::projection_norm_sq(a.coords(), &s.ortho());
            ok &= total.is_one();
        }
    }

    let w = hilbert::convexity_counterexample();
    ok &= w.projected_mix == rat(49, 100);
    ok &= w.mixed_projections == rat(1, 2);

    ok &= all_passed(&reports);
    verdict("11 (orthomodular subspaces and the projection state)", ok);
}

#[test]
fn criterion_12_reproducibility() {
    let corpus = format!("{}/corpus", env!("CARGO_MANIFEST_DIR"));
    let commands: Vec<Vec<String>> = vec![
        vec!["--seed".into(), "7".into(), "check".into(), format!("{corpus}/mo2.json")],
        vec!["--seed".into(), "7".into(), "check".into(), format!("{corpus}/square.json")],
        vec!["--seed".into(), "7".into(), "states".into(), format!("{corpus}/powerset3.json")],
        vec!["--seed".into(), "7".into(), "filters".into(), format!("{corpus}/diamond.json")],
        vec!["--seed".into(), "7".into(), "counterexample".into(), "epsilon-convexity".into()],
    ];
    let mut ok = true;
    for args in &commands {
        let (c1, o1) = structio::run_to_string(args.clone());
        let (c2, o2) = structio::run_to_string(args.clone());
        ok &= c1 == c2 && o1 == o2 && c1 == 0;
        if o1 != o2 {
            eprintln!("  divergent streams for {args:?}");
        }
    }
    verdict("12 (byte-identical report streams under a fixed seed)", ok);
}

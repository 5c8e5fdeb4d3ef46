//! Acceptance gate: one test per shipped guarantee, each at a stated scale
//! with a pinned wall-clock budget. Every test prints a single `PASS` line
//! (visible under `--nocapture`) naming the scale it ran at; a failure of
//! any assertion fails the gate.
//!
//! All randomness is seeded, so the suite is deterministic.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use appcheck_core::approach::{
    check_enumerative, check_matrix, halfline_conv, ApproachSpace,
};
use appcheck_core::cost::Cost;
use appcheck_core::expcheck::{
    check_exponentiable_exact, check_exponentiable_grid, check_pair_exact, classify_finite,
    dense_grid, violation_at, CriterionWitness,
};
use appcheck_core::exponential::{
    d_brute, d_principal, prop42_certificate, replay, scaling_instance, yoneda, ContractionFn,
    ProbeFamily,
};
use appcheck_core::gen::{random_space, rng_from_seed, standard_pool};
use appcheck_core::io::load_space_file;
use appcheck_core::numrel::{NumRel, PointSet, SetMap};
use appcheck_core::ultra::{self, FinUltrafilter};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn c(s: &str) -> Cost {
    s.parse().unwrap()
}

/// Asserts the elapsed budget and prints the single pass line.
fn finish(name: &str, detail: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed <= budget,
        "{name} blew its {budget:?} budget: took {elapsed:?}"
    );
    println!("PASS {name}: {detail} in {elapsed:?} (budget {budget:?})");
}

/// Mixed cost sampler: zero and infinity with real weight, otherwise an
/// exact rational in [0, 6] with denominator up to 24.
fn sample_cost(rng: &mut ChaCha8Rng) -> Cost {
    match rng.gen_range(0u32..12) {
        0 | 1 => Cost::Infinity,
        2 | 3 => Cost::ZERO,
        _ => {
            let den = rng.gen_range(1i64..=24);
            Cost::rational(rng.gen_range(0..=6 * den), den)
        }
    }
}

/// Random relation with entries from the mixed sampler.
fn sample_rel(rng: &mut ChaCha8Rng, src: &PointSet, tgt: &PointSet) -> NumRel {
    let mut entries: Vec<Cost> = Vec::with_capacity(src.len() * tgt.len());
    for _ in 0..src.len() * tgt.len() {
        entries.push(sample_cost(rng));
    }
    NumRel::from_fn(src, tgt, |i, j| entries[i * tgt.len() + j])
}

fn carrier(prefix: &str, n: usize) -> PointSet {
    PointSet::new((0..n).map(|i| format!("{prefix}{i}")).collect()).unwrap()
}

/// Lower min-plus envelope of an arbitrary value vector; always certifies
/// on a valid space because the triangle inequality transports the bound.
fn random_contraction(rng: &mut ChaCha8Rng, space: &ApproachSpace) -> ContractionFn {
    let n = space.len();
    let raw: Vec<Cost> = (0..n).map(|_| sample_cost(rng)).collect();
    let values: Vec<Cost> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| raw[y] + space.dm(y, x))
                .fold(Cost::Infinity, Cost::meet)
        })
        .collect();
    ContractionFn::certify(space, values).expect("envelope of a valid space certifies")
}

#[test]
fn c01_truncated_subtraction_is_adjoint_to_addition() {
    let started = Instant::now();
    let mut rng = rng_from_seed(0xA01);
    let edge = [Cost::ZERO, c("1"), Cost::Infinity];
    let mut checked = 0u64;
    for &u in &edge {
        for &v in &edge {
            for &w in &edge {
                assert_eq!(u + v >= w, v >= w.ominus(u), "edge triple ({u}, {v}, {w})");
                checked += 1;
            }
        }
    }
    while checked < 10_000 {
        let (u, v, w) = (sample_cost(&mut rng), sample_cost(&mut rng), sample_cost(&mut rng));
        assert_eq!(u + v >= w, v >= w.ominus(u), "triple ({u}, {v}, {w})");
        checked += 1;
    }
    finish(
        "adjunction",
        &format!("{checked} exact triples, zero tolerance"),
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn c02_relation_category_laws_and_scaling_lemma() {
    let started = Instant::now();
    let mut rng = rng_from_seed(0xA02);
    let instances = 1_000u32;
    for _ in 0..instances {
        let a = carrier("a", rng.gen_range(1..=6));
        let b = carrier("b", rng.gen_range(1..=6));
        let cc = carrier("c", rng.gen_range(1..=6));
        let d = carrier("d", rng.gen_range(1..=6));
        let r = sample_rel(&mut rng, &a, &b);
        let s = sample_rel(&mut rng, &b, &cc);
        let t = sample_rel(&mut rng, &cc, &d);

        assert_eq!(NumRel::identity(&a).compose(&r).unwrap(), r);
        assert_eq!(r.compose(&NumRel::identity(&b)).unwrap(), r);
        assert_eq!(
            r.compose(&s).unwrap().compose(&t).unwrap(),
            r.compose(&s.compose(&t).unwrap()).unwrap()
        );

        let u = sample_cost(&mut rng);
        let v = sample_cost(&mut rng);
        let lhs = r.scale_join(u).compose(&s.scale_join(v)).unwrap();
        let rhs = r.compose(&s).unwrap().scale_join(u + v);
        assert!(lhs.leq(&rhs), "scaling a composite may only sharpen it");

        let f = SetMap::new(
            a.clone(),
            b.clone(),
            (0..a.len()).map(|_| rng.gen_range(0..b.len())).collect(),
        )
        .unwrap();
        let fr = NumRel::from_map(&f);
        assert_eq!(
            fr.compose(&s.scale_join(v)).unwrap(),
            fr.compose(&s).unwrap().scale_join(v),
            "scaling commutes exactly past a map"
        );
    }
    finish(
        "relation laws",
        &format!("{instances} random instances up to 6x6"),
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn c03_relation_extension_agrees_with_pullback_formula() {
    let started = Instant::now();
    let mut rng = rng_from_seed(0xA03);
    let x = carrier("x", 3);
    let y = carrier("y", 3);
    let relations = 100u32;
    for _ in 0..relations {
        let r = sample_rel(&mut rng, &x, &y);
        let ext = ultra::extend(&r);
        assert_eq!(ultra::extend_literal(&r), ext);
        for i in 0..x.len() {
            for j in 0..y.len() {
                let ui = FinUltrafilter::principal(&x, i);
                let uj = FinUltrafilter::principal(&y, j);
                assert_eq!(
                    ext.at(i, j),
                    ultra::extend_pullback(&r, &ui, &uj),
                    "extension mismatch at ({i}, {j})"
                );
            }
        }
    }
    finish(
        "ultrafilter extension",
        &format!("{relations} random 3x3 relations, all 9 ultrafilter pairs each"),
        started,
        Duration::from_secs(10),
    );
}

#[test]
fn c04_distance_view_round_trips_and_satisfies_its_axioms() {
    let started = Instant::now();
    let mut rng = rng_from_seed(0xA04);
    let pool = standard_pool();
    let spaces = 200u32;
    for i in 0..spaces {
        let n = 1 + (i as usize % 5);
        let space = random_space(&mut rng, n, &pool);
        assert!(space.is_approach());

        let table = space.distance_table();
        assert_eq!(table.conv_matrix(), space.entries(), "conv -> dist -> conv identity");
        assert!(table.check_axioms().pass(), "distance axioms on a valid space");

        let back = table.to_space().expect("distance view rebuilds the space");
        assert_eq!(back.points().labels(), space.points().labels());
        assert_eq!(back.entries(), space.entries());
    }
    finish(
        "distance correspondence",
        &format!("{spaces} random valid spaces with at most 5 points"),
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn c05_triangle_scan_and_full_enumeration_agree_with_witnesses() {
    let started = Instant::now();
    let mut rng = rng_from_seed(0xA05);
    let pool: Vec<Cost> = ["0", "1/2", "1", "2", "inf"].iter().map(|s| c(s)).collect();
    let matrices = 1_000u32;
    let mut invalid = 0u32;
    for i in 0..matrices {
        let n = 1 + (i as usize % 4);
        let points = carrier("p", n);
        let mut dm: Vec<Cost> = (0..n * n).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
        if i % 2 == 0 {
            for x in 0..n {
                dm[x * n + x] = Cost::ZERO;
            }
        }
        let fast = check_matrix(&points, &dm);
        let slow = check_enumerative(&points, &dm);
        assert_eq!(fast, slow, "verdict and witness must match entry for entry");
        if !fast.pass() {
            invalid += 1;
        }
    }
    assert!(invalid > 0, "sampling must exercise failing matrices");
    assert!(invalid < matrices, "sampling must exercise valid matrices");
    finish(
        "transitivity checkers",
        &format!("{matrices} random matrices up to 4x4, {invalid} invalid"),
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn c06_pointwise_probe_function_always_certifies() {
    let started = Instant::now();
    let mut rng = rng_from_seed(0xA06);
    let pool = standard_pool();
    let tuples = 500u32;
    for i in 0..tuples {
        let n = 1 + (i as usize % 5);
        let space = random_space(&mut rng, n, &pool);
        let z = rng.gen_range(0..n);
        let u = sample_cost(&mut rng);
        let v = sample_cost(&mut rng);
        let phi = space.phi(z, u, v);
        assert!(
            prop42_certificate(&space, &phi).is_none(),
            "relational certificate must accept the probe function"
        );
        assert!(ContractionFn::certify(&space, phi).is_ok());
    }
    finish(
        "probe function certificate",
        &format!("{tuples} random (space, z, u, v) tuples"),
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn c07_function_space_distance_matches_half_line_and_brute_force() {
    let started = Instant::now();
    let mut rng = rng_from_seed(0xA07);
    let one = ApproachSpace::approach(PointSet::unit(), vec![vec![Cost::ZERO]]).unwrap();
    let pairs = 100u32;
    for _ in 0..pairs {
        let v0 = sample_cost(&mut rng);
        let v = sample_cost(&mut rng);
        let psi = ContractionFn::certify(&one, vec![v0]).unwrap();
        let phi = ContractionFn::certify(&one, vec![v]).unwrap();
        assert_eq!(
            d_principal(&psi, &phi),
            halfline_conv(v0, v),
            "one-point function distance is the half-line structure"
        );
    }

    let pool = standard_pool();
    let spaces = 50u32;
    let mut brute_checks = 0u64;
    for i in 0..spaces {
        let n = 1 + (i as usize % 4);
        let space = random_space(&mut rng, n, &pool);
        let rows = yoneda(&space).unwrap();
        let mut families = vec![ProbeFamily::new(&space, rows)];
        let randoms: Vec<ContractionFn> =
            (0..4).map(|_| random_contraction(&mut rng, &space)).collect();
        families.push(ProbeFamily::new(&space, randoms));
        for family in &families {
            assert!(family.len() <= 4);
            let targets: Vec<ContractionFn> = family
                .members()
                .iter()
                .cloned()
                .chain((0..2).map(|_| random_contraction(&mut rng, &space)))
                .collect();
            for psi in 0..family.len() {
                for phi in &targets {
                    assert_eq!(
                        d_brute(family, psi, phi),
                        d_principal(family.member(psi), phi),
                        "closed form vs ultrafilter enumeration"
                    );
                    brute_checks += 1;
                }
            }
        }
    }
    finish(
        "function space distance",
        &format!("{pairs} half-line pairs, {brute_checks} brute-force comparisons"),
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn c08_joint_scaling_holds_on_both_sides() {
    let started = Instant::now();
    let mut rng = rng_from_seed(0xA08);
    let pool = standard_pool();
    let tuples = 500u32;
    for i in 0..tuples {
        let n = 1 + (i as usize % 4);
        let space = random_space(&mut rng, n, &pool);
        let chi = random_contraction(&mut rng, &space);
        let psi = random_contraction(&mut rng, &space);
        let phi = random_contraction(&mut rng, &space);
        let u = sample_cost(&mut rng);
        let inst = scaling_instance(u, &chi, &psi, &phi);
        assert!(
            inst.fn_side_lhs >= inst.fn_side_rhs,
            "function side: {} < {}",
            inst.fn_side_lhs,
            inst.fn_side_rhs
        );
        assert!(
            inst.lifted_lhs >= inst.lifted_rhs,
            "lifted side: {} < {}",
            inst.lifted_lhs,
            inst.lifted_rhs
        );
        assert!(inst.holds());
    }
    finish(
        "joint scaling",
        &format!("{tuples} principal instances, both inequalities"),
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn c09_proof_chain_replay_flags_only_the_transitivity_step() {
    let started = Instant::now();
    let mut rng = rng_from_seed(0xA09);
    let pool = standard_pool();
    let zero_inf: Vec<Cost> = vec![Cost::ZERO, Cost::Infinity];
    let spaces = 200u32;
    let mut replays = 0u64;
    let mut flagged = 0u64;
    for i in 0..spaces {
        let n = 1 + (i as usize % 5);
        let two_valued = i % 3 == 0;
        let space = random_space(&mut rng, n, if two_valued { &zero_inf } else { &pool });
        let exact = check_exponentiable_exact(&space);

        let mut check = |report: &appcheck_core::exponential::ReplayReport| {
            assert!(report.facts_hold(), "facts must hold on every valid space");
            if !report.criterion_holds() {
                assert_eq!(
                    report.first_failure().expect("criterion failed").name,
                    "d-transitivity",
                    "the break must be the transitivity step, never a fact"
                );
            }
            if exact.exponentiable {
                assert!(
                    report.first_failure().is_none(),
                    "full chain must hold on a space that passes the criterion"
                );
            }
        };

        for z in 0..n {
            for x0 in 0..n {
                let half = c("1/2");
                check(&replay(&space, z, x0, half, half));
                replays += 1;
                let cc = space.dm(z, x0);
                if cc.is_finite() && cc > Cost::ZERO {
                    check(&replay(&space, z, x0, cc.half(), cc.half()));
                    replays += 1;
                }
            }
        }

        if let Some(w) = &exact.witness {
            let z = space.points().index_of(&w.z).unwrap();
            let x0 = space.points().index_of(&w.x0).unwrap();
            let report = replay(&space, z, x0, w.u, w.v);
            assert!(report.facts_hold());
            assert!(!report.criterion_holds(), "decider witness must break the replayed chain");
            assert_eq!(report.first_failure().unwrap().name, "d-transitivity");
            replays += 1;
            flagged += 1;
        } else {
            assert!(
                space.entries().iter().all(|e| *e == Cost::ZERO || *e == Cost::Infinity),
                "criterion passes only on two-valued structures"
            );
        }
    }
    assert!(flagged > 0, "sampling must exercise failing spaces");
    finish(
        "proof chain replay",
        &format!("{spaces} seeded spaces, {replays} replays, {flagged} failing"),
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn c10_three_deciders_agree_and_random_sampling_finds_no_missed_violation() {
    let started = Instant::now();
    let mut rng = rng_from_seed(0xA10);
    let pool = standard_pool();
    let spaces = 1_000u32;
    let samples_per_failing = 100_000u32;
    let mut failing = 0u32;
    let mut sampled_violations = 0u64;
    for i in 0..spaces {
        let n = 1 + (i as usize % 6);
        let space = random_space(&mut rng, n, &pool);

        let exact = check_exponentiable_exact(&space);
        let grid = check_exponentiable_grid(&space, &dense_grid(&space));
        let classified = classify_finite(&space);
        assert_eq!(exact.exponentiable, grid.exponentiable, "grid oracle disagrees");
        assert_eq!(exact.exponentiable, classified.exponentiable, "classifier disagrees");

        if exact.exponentiable {
            continue;
        }
        failing += 1;

        let flagged: Vec<bool> = (0..n * n)
            .map(|k| check_pair_exact(&space, k / n, k % n).is_some())
            .collect();
        for _ in 0..samples_per_failing {
            let z = rng.gen_range(0..n);
            let x0 = rng.gen_range(0..n);
            let u = sample_uv(&mut rng, &space);
            let v = sample_uv(&mut rng, &space);
            if violation_at(&space, z, x0, u, v).is_some() {
                sampled_violations += 1;
                assert!(
                    flagged[z * n + x0],
                    "sampled violation at a pair the exact decider cleared: \
                     z={z} x0={x0} u={u} v={v}"
                );
            }
        }
    }
    assert!(failing > 0, "sampling must exercise failing spaces");
    assert!(failing < spaces, "sampling must exercise passing spaces");
    assert!(sampled_violations > 0, "random sampling must land inside violation regions");
    finish(
        "decider agreement",
        &format!(
            "{spaces} seeded spaces, {failing} failing, \
             {samples_per_failing} samples each, {sampled_violations} violations all flagged"
        ),
        started,
        Duration::from_secs(300),
    );
}

/// Off-grid sampler for the criterion arguments: exact pool hits, infinity,
/// and rationals with denominators up to 64 that avoid the decider's own
/// breakpoints almost surely.
fn sample_uv(rng: &mut ChaCha8Rng, space: &ApproachSpace) -> Cost {
    match rng.gen_range(0u32..16) {
        0 => Cost::Infinity,
        1 => {
            let entries = space.entries();
            entries[rng.gen_range(0..entries.len())]
        }
        _ => {
            let den = rng.gen_range(1i64..=64);
            Cost::rational(rng.gen_range(0..=4 * den), den)
        }
    }
}

#[test]
fn c11_named_fixtures_produce_the_pinned_verdicts_and_witnesses() {
    let started = Instant::now();
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let load = |name: &str| -> ApproachSpace {
        load_space_file(&dir.join(name)).unwrap().to_space(false).unwrap()
    };

    for name in ["onepoint.json", "discrete3.json", "preorder4.json"] {
        let space = load(name);
        assert!(check_exponentiable_exact(&space).exponentiable, "{name} must pass");
        assert!(
            check_exponentiable_grid(&space, &dense_grid(&space)).exponentiable,
            "{name} must pass the grid oracle"
        );
        assert!(classify_finite(&space).exponentiable, "{name} must pass the classifier");
    }

    let two = load("twopoint1.json");
    let report = check_exponentiable_exact(&two);
    assert!(!report.exponentiable);
    assert_eq!(
        report.witness.unwrap(),
        CriterionWitness {
            z: "p".into(),
            x0: "q".into(),
            u: c("1/2"),
            v: c("1/2"),
            lhs: c("1"),
            rhs: c("3/2"),
            argmin_y: "p".into(),
        }
    );

    let line = load("line3.json");
    let report = check_exponentiable_exact(&line);
    assert!(!report.exponentiable);
    assert_eq!(
        report.witness.unwrap(),
        CriterionWitness {
            z: "0".into(),
            x0: "1".into(),
            u: c("1/4"),
            v: c("3/4"),
            lhs: c("1"),
            rhs: c("5/4"),
            argmin_y: "1".into(),
        }
    );

    let golden_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/tests/expected");
    for (file, z, x0, u, v) in [
        ("check_twopoint1.json", "p", "q", "1/2", "1/2"),
        ("check_line3.json", "0", "1", "1/4", "3/4"),
    ] {
        let text = std::fs::read_to_string(golden_dir.join(file)).unwrap();
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        let w = &json["report"]["witness"];
        assert_eq!(w["z"], z, "{file} golden witness z");
        assert_eq!(w["x0"], x0, "{file} golden witness x0");
        assert_eq!(w["u"], u, "{file} golden witness u");
        assert_eq!(w["v"], v, "{file} golden witness v");
    }

    finish(
        "named fixtures",
        "3 passing and 2 failing spaces with pinned witnesses and committed goldens",
        started,
        Duration::from_secs(30),
    );
}

//! End-to-end acceptance checks, one per headline capability, each with
//! pinned tolerances and a wall-clock budget. Every test prints a single
//! `[k/8] name: PASS` summary line (run with `--nocapture` to see them all;
//! the eighth check lives in the command-line crate's own acceptance test).

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_traits::Pow;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bslab_core::bs::{BitWord, BsElement, Word};
use bslab_core::circle::angular_distance;
use bslab_core::fixtures::{
    affine_pair, conjugated_pair, random_angular_conjugator, random_projective_conjugator,
};
use bslab_core::obstruction::synthetic::synthetic_denjoy_pair;
use bslab_core::obstruction::{
    derivative_bounds_check, disjointness_check, growth_certificate, length_ledger,
    wandering_depth_check, ObsInterval, Verdict,
};
use bslab_core::orbit::{
    common_fixed_point, fix_invariance_check, fixed_point_enclosures_of_power, DEFAULT_GRID,
    DEFAULT_TOL,
};
use bslab_core::rotation::{default_basepoints, rho_rational_form, rotation_enclosure};
use bslab_core::semiconjugacy::{
    build_semiconjugacy, monotone_check, semiconjugacy_defect, standard_model,
};
use bslab_core::{CircleMap, CirclePoint, Integer, Rational, Value};

/// Print the per-criterion summary line and enforce its wall-clock budget.
fn finish(index: usize, title: &str, started: Instant, budget_s: u64) {
    let elapsed = started.elapsed();
    println!(
        "[{index}/8] {title}: PASS in {:.2} s (budget {budget_s} s)",
        elapsed.as_secs_f64()
    );
    assert!(
        elapsed <= Duration::from_secs(budget_s),
        "{title}: took {:.2} s, over the {budget_s} s budget",
        elapsed.as_secs_f64()
    );
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    const ALPHABET: [char; 4] = ['a', 'b', 'A', 'B'];
    let len = rng.gen_range(0..=max_len);
    let s: String = (0..len)
        .map(|_| *ALPHABET.choose(rng).expect("nonempty alphabet"))
        .collect();
    s.parse().expect("letters are drawn from the valid alphabet")
}

/// Defining relation and the word → normal-form homomorphism, exactly.
#[test]
fn criterion_1_group_arithmetic_is_an_exact_homomorphism() {
    let started = Instant::now();
    let bases: [u32; 4] = [2, 3, 5, 10];

    // a b a⁻¹ = bⁿ as normal forms, for each base.
    for &n in &bases {
        let relator: Word = "abA".parse().expect("valid word");
        let lhs = BsElement::from_word(n, &relator).expect("reduces");
        let rhs = BsElement::gen_b(n).pow(i64::from(n));
        assert_eq!(lhs, rhs, "a b a⁻¹ must equal bⁿ for n = {n}");
    }

    // 1000 random pairs: evaluation of a concatenation equals the product
    // of the evaluations, with exact ℤ[1/n] arithmetic throughout.
    let mut rng = ChaCha8Rng::seed_from_u64(20260819);
    for trial in 0..1000 {
        let n = bases[trial % bases.len()];
        let u = random_word(&mut rng, 12);
        let v = random_word(&mut rng, 12);
        let joined = BsElement::from_word(n, &u.concat(&v)).expect("reduces");
        let split = BsElement::from_word(n, &u)
            .expect("reduces")
            .compose(&BsElement::from_word(n, &v).expect("reduces"));
        assert_eq!(
            joined, split,
            "word evaluation must be a homomorphism (n = {n}, u = {u}, v = {v})"
        );
    }

    finish(1, "exact group arithmetic", started, 5);
}

/// Binary patterns: the explicit letter expansion matches the weight
/// normal form, and distinct patterns of a given degree have distinct
/// weights.
#[test]
fn criterion_2_bit_patterns_expand_and_separate() {
    let started = Instant::now();

    for n in [2u32, 3] {
        // Degree m patterns have letter words of length m + 1 in the
        // b-generator count; check every pattern up to 12 such letters.
        for m in 0..=11usize {
            for alpha in BitWord::all_of_degree(m) {
                let direct = alpha.weight_element(n);
                let expanded =
                    BsElement::from_word(n, &alpha.letters()).expect("expansion reduces");
                assert_eq!(
                    direct, expanded,
                    "letter expansion must match the weight form (n = {n}, α = {alpha:?})"
                );
            }
        }

        // Injectivity of the weight on each degree class, exhaustively.
        for m in 0..=9usize {
            let weights: HashSet<Integer> =
                BitWord::all_of_degree(m).map(|alpha| alpha.weight(n)).collect();
            assert_eq!(
                weights.len(),
                1usize << (m + 1),
                "degree-{m} patterns must have pairwise distinct weights (n = {n})"
            );
        }
    }

    finish(2, "bit-pattern algebra", started, 30);
}

/// Rotation-number enclosures: width bound and exact rational recovery.
#[test]
fn criterion_3_rotation_enclosures_certify_rationals() {
    let started = Instant::now();
    let iterations = 1000u32;
    let width_cap = Value::ratio(2, i64::from(iterations));
    let basepoints = default_basepoints();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let q = rng.gen_range(1i64..=200);
        let p = rng.gen_range(0..q.max(1));
        let rho = Value::ratio(p, q);
        let f = CircleMap::rotation(rho.clone());
        let enc = rotation_enclosure(&f, iterations, &basepoints).expect("enclosure");
        assert!(
            enc.width() <= width_cap,
            "enclosure width {} exceeds 2/N for rotation by {p}/{q}",
            enc.width().to_f64()
        );
        assert!(
            enc.contains(&rho),
            "enclosure [{}, {}] misses the true rotation number {p}/{q}",
            enc.lo.to_f64(),
            enc.hi.to_f64()
        );
    }

    // Rotations by l/(n−1) are exactly the maps with n·ρ = ρ + l; the
    // integer form must recover l for every base and residue.
    for n in 2i64..=6 {
        let modulus = n - 1;
        for l in 0..modulus.max(1) {
            let f = CircleMap::rotation(Value::ratio(l, modulus));
            let form = rho_rational_form(&f, n, iterations).expect("integer form");
            assert_eq!(form.modulus, modulus);
            assert_eq!(
                form.l, l,
                "rotation by {l}/{modulus} must report residue {l} for n = {n}"
            );
        }
    }

    finish(3, "rotation-number certification", started, 20);
}

/// Common fixed point of a conjugated pair, located to 1e−8 and invariance
/// of the certified fixed-point set checked exactly.
#[test]
fn criterion_4_common_fixed_point_recovery() {
    let started = Instant::now();

    for seed in 0..20u64 {
        let phi = random_angular_conjugator(seed);
        let (f, h) = conjugated_pair(2, &phi).expect("conjugation");

        let found = common_fixed_point(&f, &h, 2, 1, 200, 1e-10).expect("iteration converges");
        let expected = phi
            .inverse()
            .expect("piecewise-linear maps invert")
            .evaluate(&CirclePoint::angular(Value::zero()));
        let miss = angular_distance(&found, &expected).to_f64();
        assert!(
            miss <= 1e-8,
            "seed {seed}: located fixed point off by {miss:.3e} (> 1e-8)"
        );

        let set = fixed_point_enclosures_of_power(&f, 1, DEFAULT_GRID, DEFAULT_TOL)
            .expect("fixed-point scan");
        let report = fix_invariance_check(&f, &h, 2, &set, 0.0).expect("invariance check");
        assert!(
            report.all_pass,
            "seed {seed}: h must carry certified fixed points of f to fixed points of f²"
        );
    }

    finish(4, "common fixed point and invariance", started, 30);
}

/// Length ledger on the affine model: exact unit images at the pattern
/// weights, disjointness, distortion floors, and the (3/2)^(m+1) series.
#[test]
fn criterion_5_length_ledger_on_the_affine_model() {
    let started = Instant::now();
    let (f0, h0) = affine_pair(2);
    let interval = ObsInterval::line(Value::zero(), Value::one());
    let epsilon = Value::ratio(1, 10);

    for m in 1..=12u32 {
        let ledger = length_ledger(&f0, &h0, &interval, m, &epsilon).expect("ledger");
        let count = 1usize << (m + 1);
        assert_eq!(ledger.entries.len(), count, "family size must be 2^(m+1)");

        // Distortion floor |I|·(1−ε)^(2m+2), exactly.
        let floor = Rational::new(
            Integer::from(9).pow(2 * m + 2),
            Integer::from(10).pow(2 * m + 2),
        );
        assert_eq!(ledger.epsilon_worst_bound, Value::from(floor.clone()));

        let mut images = Vec::with_capacity(count);
        for entry in &ledger.entries {
            let beta = entry.pattern.weight(2);
            match &entry.image {
                ObsInterval::Line { lo, hi } => {
                    assert_eq!(
                        lo,
                        &Value::from(Rational::from_integer(beta.clone())),
                        "image of pattern {:?} must start at its weight",
                        entry.pattern
                    );
                    assert_eq!(
                        hi,
                        &Value::from(Rational::from_integer(beta + 1)),
                        "image of pattern {:?} must be a unit interval",
                        entry.pattern
                    );
                }
                other => panic!("affine-model images stay in the line chart, got {other:?}"),
            }
            assert_eq!(entry.measured_length, Value::one());
            assert!(entry.measured_length >= ledger.epsilon_worst_bound);
            images.push(entry.image.clone());
        }

        assert!(
            disjointness_check(&images, None),
            "the 2^(m+1) unit images must be pairwise disjoint at m = {m}"
        );
        assert!(
            ledger.soundness_violations().is_empty(),
            "measured lengths must dominate the per-entry product bounds"
        );

        // Series value: count × |I|·(3/4)^(m+1) = (3/2)^(m+1), exactly.
        let per_entry = Rational::new(Integer::from(3).pow(m + 1), Integer::from(4).pow(m + 1));
        assert_eq!(ledger.three_quarters_bound, Value::from(per_entry.clone()));
        let series = Rational::from_integer(Integer::from(count as u64)) * per_entry;
        let expected = Rational::new(Integer::from(3).pow(m + 1), Integer::from(2).pow(m + 1));
        assert_eq!(series, expected, "series must telescope to (3/2)^(m+1)");
        if m == 9 {
            assert!(
                series > Rational::from_integer(Integer::from(57)),
                "(3/2)^10 must exceed 57"
            );
        }
    }

    finish(5, "length ledger and growth series", started, 60);
}

/// Growth certificate on a synthetic finite-depth wandering pair: the
/// preconditions hold with the measured ε, and the measured total exceeds
/// |J| at some degree ≤ 20.
#[test]
fn criterion_6_growth_certificate_contradiction() {
    let started = Instant::now();
    let (f, h, cfg) = synthetic_denjoy_pair(2, 8, 0).expect("synthetic pair");

    assert!(
        wandering_depth_check(&h, &cfg.j, cfg.s_max).expect("wandering scan"),
        "the window must stay disjoint from its first s_max backward images"
    );
    assert!(
        derivative_bounds_check(&f, &h, &cfg.j, cfg.s_max, &cfg.epsilon, 64)
            .expect("derivative scan"),
        "both generators must stay within the measured ε distortion budget"
    );

    let cert = growth_certificate(&f, &h, &cfg).expect("certificate");
    assert!(
        cert.preconditions.all_green(),
        "all certificate preconditions must pass: {:?}",
        cert.preconditions
    );
    let at = match cert.verdict {
        Verdict::ContradictionAt(m) => m,
        other => panic!("expected a contradiction verdict, got {other:?}"),
    };
    assert!(at <= 20, "contradiction must arrive by degree 20, got {at}");

    let last = cert.rows.last().expect("at least one row");
    assert_eq!(last.m, at, "the final row is the contradicting degree");
    assert!(
        last.total_measured > cert.j_length,
        "measured total {} must exceed |J| = {}",
        last.total_measured.to_f64(),
        cert.j_length.to_f64()
    );

    finish(6, "wandering-interval growth certificate", started, 120);
}

/// Monotone transport tables onto the affine model: order-correct, with
/// sup defect below 1e−6 on both generator equations, and exactly zero on
/// the model itself.
#[test]
fn criterion_7_semiconjugacy_tables() {
    let started = Instant::now();
    let model = standard_model(2);
    let anchor = CirclePoint::infinity();
    let tol = Value::ratio(1, 1_000_000);
    let grid = 10_000u32;

    for seed in 1..=10u64 {
        let phi = random_projective_conjugator(seed, 2, 4);
        let (f, h) = conjugated_pair(2, &phi).expect("conjugation");
        let base = phi
            .inverse()
            .expect("piecewise maps invert")
            .evaluate(&CirclePoint::projective(Value::zero()));

        let table = build_semiconjugacy(&f, &h, 2, &base, &anchor, 10).expect("orbit transport");
        assert!(
            monotone_check(&table),
            "seed {seed}: transport table must be monotone of degree one"
        );

        let defect_f = semiconjugacy_defect(&table, &f, &model.f0, grid);
        let defect_h = semiconjugacy_defect(&table, &h, &model.h0, grid);
        assert!(
            defect_f < tol,
            "seed {seed}: translation-equation defect {:.3e} over 1e-6",
            defect_f.to_f64()
        );
        assert!(
            defect_h < tol,
            "seed {seed}: scaling-equation defect {:.3e} over 1e-6",
            defect_h.to_f64()
        );
    }

    // On the model itself the table is the identity and the defect vanishes
    // exactly, not merely below tolerance.
    let (f0, h0) = affine_pair(2);
    let base = CirclePoint::projective(Value::zero());
    let table = build_semiconjugacy(&f0, &h0, 2, &base, &anchor, 8).expect("model transport");
    assert!(table.is_identity_like());
    assert_eq!(semiconjugacy_defect(&table, &f0, &model.f0, grid), Value::zero());
    assert_eq!(semiconjugacy_defect(&table, &h0, &model.h0, grid), Value::zero());

    finish(7, "semiconjugacy onto the affine model", started, 60);
}

//! Acceptance suite. Every check is exact rational arithmetic with zero
//! tolerance. Run with `--nocapture` to see one PASS/FAIL line per criterion.

use lce_lab::approximations::{default_gallery, DeskReal};
use lce_lab::hyperimmunity::{
    default_offset, k_bound_from_witness, least_beyond, majorize_k_from_p, majorize_p_from_k, principal,
    total_witness_from_majorizer, MonotoneFn, NaturalSet, DEFAULT_PRECISION,
};
use lce_lab::machines::{check_usch, measure_preserved, pad_length, uniformize, OverflowPolicy, PrefixMachine};
use lce_lab::numerics::{int, rat, two_pow_neg, Bits, Rational};
use lce_lab::reducibility::{
    check_witness, computable_least_witness, default_samples, scaling_witness, Direction, TranslationFn,
    TranslationWitness, Variant, ViolationReason, ViolationReport,
};
use lce_lab::speedability::{
    amplify, check_total_speedup, default_probes, liminf_record, ratio, speedup_from_translation,
    translation_from_speedup, SpeedUpFn, Verdict, DEFAULT_INDEX_SEARCH,
};
use num_bigint::BigInt;

fn verdict(criterion: u32, title: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("[PASS] criterion {criterion}: {title}");
    } else {
        println!("[FAIL] criterion {criterion}: {title}");
        for f in failures.iter().take(20) {
            println!("       {f}");
        }
    }
    assert!(failures.is_empty(), "criterion {criterion} failed: {failures:?}");
}

fn geometric_half() -> DeskReal {
    DeskReal::geometric("geometric-half", int(1), rat(1, 2)).unwrap()
}

fn halfway() -> TranslationFn {
    TranslationFn::affine_contraction(int(1), rat(1, 2))
}

#[test]
fn criterion_1_principal_function_majorizers() {
    const RANGE: u64 = 100;
    const ITERATE_CAP: u64 = 10_000;
    let sets = [NaturalSet::evens(), NaturalSet::squares(), NaturalSet::powers_of_two()];
    let candidates = [MonotoneFn::shift(2), MonotoneFn::affine(2, 0), MonotoneFn::square_plus_one()];
    let mut failures = Vec::new();
    let mut forward_pairs = 0;
    let mut backward_pairs = 0;

    for set in &sets {
        for g in &candidates {
            if g.majorizes_gaps_of(set, RANGE).unwrap() {
                forward_pairs += 1;
                let mut tested = 0;
                for n in 0.. {
                    let h = majorize_p_from_k(g, n).unwrap();
                    if h > ITERATE_CAP {
                        break;
                    }
                    tested += 1;
                    let p = principal(set, n).unwrap();
                    if h < p {
                        failures.push(format!("{} / {}: H({n}) = {h} < p({n}) = {p}", set.name(), g.name()));
                    }
                }
                if tested == 0 {
                    failures.push(format!("{} / {}: no index tested", set.name(), g.name()));
                }
            }
        }

        // converse direction, including the principal function itself as
        // majorizer; p_powers leaves u64 at 64, so it is tested below that
        let own = {
            let s = set.clone();
            MonotoneFn::new(format!("p_{}", set.name()), move |n| principal(&s, n).unwrap())
        };
        let runs = candidates.iter().map(|g| (g, RANGE)).chain(std::iter::once((&own, 62)));
        for (g, range) in runs {
            if g.majorizes_principal_of(set, range + 1).unwrap() {
                backward_pairs += 1;
                for n in 0..range {
                    let bound = majorize_k_from_p(g, n);
                    let k = least_beyond(set, n).unwrap();
                    if bound < k {
                        failures.push(format!("{} / {}: g({}) = {bound} < k({n}) = {k}", set.name(), g.name(), n + 1));
                    }
                }
            }
        }
    }
    // evens: n+2, 2n, n^2+1; squares: 2n, n^2+1; powers: n^2+1
    if forward_pairs != 6 {
        failures.push(format!("expected 6 majorizing (set, g) pairs, found {forward_pairs}"));
    }
    if backward_pairs < sets.len() {
        failures.push(format!("only {backward_pairs} backward pairs tested"));
    }
    verdict(1, "principal/gap majorizer conversions dominate on every tested index", &failures);
}

#[test]
fn criterion_2_scaling_witnesses() {
    let factors = [rat(1, 3), rat(1, 2), int(2), int(5)];
    let mut failures = Vec::new();
    for real in default_gallery() {
        for r in &factors {
            let scaled = real.scaled(r);
            let forward = scaling_witness(r, Direction::Forward).unwrap();
            let backward = scaling_witness(r, Direction::Backward).unwrap();
            let runs = [
                ("forward", check_witness(&scaled, &real, &forward, &default_samples(&real, 1000)).unwrap()),
                ("backward", check_witness(&real, &scaled, &backward, &default_samples(&scaled, 1000)).unwrap()),
            ];
            for (dir, report) in runs {
                if !report.passed() || report.samples_checked < 1000 {
                    failures.push(format!(
                        "{} r={r} {dir}: {} ({} checked)",
                        real.name(),
                        report.summary(),
                        report.samples_checked
                    ));
                }
            }
        }
    }
    verdict(2, "scaling witnesses pass both directions on 10^3 samples for every gallery real", &failures);
}

#[test]
fn criterion_3_set_real_reduction_and_gap_bound() {
    let mut failures = Vec::new();

    // forward: 0.evens <= 0.N via bits of 0.evens to depth g(|q|)+1, g(n) = n+3
    let alpha = DeskReal::from_set("evens", NaturalSet::evens()).unwrap();
    let beta = DeskReal::from_set("naturals", NaturalSet::naturals()).unwrap();
    let g = MonotoneFn::shift(3);
    if !g.majorizes_gaps_of(&NaturalSet::naturals(), 64).unwrap() {
        failures.push("n+3 does not majorize k_N".into());
    }
    let w = total_witness_from_majorizer(&NaturalSet::evens(), &g, DEFAULT_PRECISION);
    let samples: Vec<Rational> = (0..=64).map(|n| beta.approx_at(n)).collect();
    let report = check_witness(&alpha, &beta, &w, &samples).unwrap();
    if !report.passed() || report.samples_checked != 65 {
        failures.push(format!("forward: {}", report.summary()));
    }

    // backward: alpha = 1/3 via f(q) = q/3, c = 1
    let third = DeskReal::from_set("odds", NaturalSet::odds()).unwrap();
    let w = TranslationWitness::new(TranslationFn::total("q/3", |q: &Rational| q / int(3)), int(1), Variant::Strict)
        .unwrap();
    let d = default_offset(w.constant()).unwrap();
    for n in 0..=12u32 {
        let level: Vec<Rational> = Bits::all_of_length(n as usize).map(|s| s.fraction_value()).collect();
        let exhaustive = check_witness(&third, &beta, &w, &level).unwrap();
        if !exhaustive.passed() {
            failures.push(format!("backward witness fails at level {n}: {}", exhaustive.summary()));
        }
        let bound = k_bound_from_witness(&w, &third, n, d).unwrap();
        let k = least_beyond(&NaturalSet::naturals(), n as u64).unwrap();
        if bound < k {
            failures.push(format!("bound({n}) = {bound} < k_B({n}) = {k}"));
        }
    }
    verdict(3, "set-real reduction passes on prefixes of 0.B; gap bound dominates k_B", &failures);
}

#[test]
fn criterion_4_functional_characterization_chain() {
    const RANGE: u64 = 1000;
    let x = geometric_half();
    let g = halfway();
    let f = speedup_from_translation(&x, &g, RANGE + 10);
    let back = translation_from_speedup(&x, &f, DEFAULT_INDEX_SEARCH);
    let mut failures = Vec::new();
    for i in 0..=RANGE {
        let fi = f.eval(i).unwrap();
        if fi != i + 3 {
            failures.push(format!("f({i}) = {fi}, expected {}", i + 3));
            continue;
        }
        let lhs = ratio(&x, &f, i).unwrap();
        if lhs != rat(1, 8) {
            failures.push(format!("ratio at {i} = {lhs}"));
        }
        let (lo, hi) = (x.approx_at(i), x.approx_at(i + 1));
        for k in 0..4 {
            let q = &lo + (&hi - &lo) * rat(k, 4);
            let rhs = (int(1) - g.eval(&q).unwrap()) / (int(1) - &q);
            if rhs != rat(1, 2) || lhs > rhs {
                failures.push(format!("chain fails at i={i}, q={q}: {lhs} vs {rhs}"));
            }
        }
        if back.eval(&lo) != Some(x.approx_at(fi)) {
            failures.push(format!("round trip fails at a_{i}"));
        }
    }
    verdict(4, "f(i) = i+3, ratio 1/8 <= 1/2 on [a_i, a_{i+1}), round trip exact", &failures);
}

#[test]
fn criterion_5_total_speedability_and_amplification() {
    let x = geometric_half();
    let horizon = 64;
    let probes = default_probes(&x, horizon);
    let mut failures = Vec::new();

    let report = check_total_speedup(&x, &halfway(), &rat(1, 2), horizon, &probes).unwrap();
    if report.verdict != Verdict::Evidence {
        failures.push(format!("verdict {:?} for rho = 1/2", report.verdict));
    }
    let trace = report.trace.expect("probes below alpha");
    if trace.entries.iter().any(|e| e.ratio.0 != rat(1, 2)) {
        failures.push("a ratio differs from 1/2".into());
    }

    for k in 1..=20u32 {
        let gk = amplify(&halfway(), k).unwrap();
        let target = two_pow_neg(k as u64);
        let r = check_total_speedup(&x, &gk, &target, horizon, &probes).unwrap();
        let exact = r
            .trace
            .as_ref()
            .is_some_and(|t| t.entries.iter().all(|e| e.ratio.0 == target));
        if r.verdict != Verdict::Evidence || !exact {
            failures.push(format!("k = {k}: verdict {:?}, all ratios 2^-k: {exact}", r.verdict));
        }
    }
    verdict(5, "total speed-up ratio exactly 1/2; k-fold amplification gives 2^-k", &failures);
}

#[test]
fn criterion_6_machine_construction() {
    let b = PrefixMachine::from_pairs("B", &[("0", "1"), ("10", "10"), ("11", "101")]).unwrap();
    let c = int(1);
    let w = TranslationWitness::new(TranslationFn::identity(), c.clone(), Variant::Strict).unwrap();
    let a = uniformize(&b, &w, &c, OverflowPolicy::Saturate).unwrap();
    let mut failures = Vec::new();

    let codes: Vec<&Bits> = a.codes().collect();
    for x in &codes {
        for y in &codes {
            if x.is_proper_prefix_of(y) {
                failures.push(format!("{x} is a prefix of {y}"));
            }
        }
    }
    if a.measure() != b.measure() || b.measure() != int(1) {
        failures.push(format!("measure {} vs {}", a.measure(), b.measure()));
    }

    let l = pad_length(&c).unwrap();
    if l != 1 {
        failures.push(format!("pad length {l}"));
    }
    let real = DeskReal::from_set("evens", NaturalSet::evens()).unwrap();
    let usch = check_usch(&a, &b, &real, &real, l as u64, 16).unwrap();
    let coded: Vec<u64> = usch.checked.iter().map(|c| c.n).collect();
    if !usch.passed || coded != vec![1, 2, 3] {
        failures.push(format!("uSch check: passed {}, coded lengths {coded:?}", usch.passed));
    }

    for code in &codes {
        if measure_preserved(&a.without(code), &b) {
            failures.push(format!("deleting {code} went unnoticed"));
        }
    }
    verdict(6, "uniformized machine is prefix-free, measure-preserving, and within K_B + 1", &failures);
}

#[test]
fn criterion_7_weakened_least_witness() {
    const MAX_LENGTH: u64 = 20;
    const CHUNK: u64 = 1 << 15;
    let alphas = [
        DeskReal::from_set("odds", NaturalSet::odds()).unwrap(),
        DeskReal::from_set("evens", NaturalSet::evens()).unwrap(),
        DeskReal::new("five-eighths", rat(5, 8), |n| rat(5, 8) - two_pow_neg(n + 1)),
    ];
    let mut failures = Vec::new();
    for alpha in &alphas {
        let w = computable_least_witness(alpha).unwrap();
        for beta in default_gallery() {
            // every dyadic q = k 2^-20 in [0, beta) has |q| <= 20
            let limit = beta.oracle_limit();
            let scale = BigInt::from(1u64 << MAX_LENGTH);
            let above: BigInt = (limit.numer() * &scale + limit.denom() - 1) / limit.denom();
            let count = u64::try_from(above).unwrap();
            let count = count.min(1 << MAX_LENGTH);
            let mut total: Option<ViolationReport> = None;
            let mut start = 0;
            while start < count {
                let end = (start + CHUNK).min(count);
                let samples: Vec<Rational> = (start..end)
                    .map(|k| Rational::new(BigInt::from(k), scale.clone()))
                    .collect();
                let r = check_witness(alpha, &beta, &w, &samples).unwrap();
                total = Some(match total {
                    Some(t) => t.merge(r),
                    None => r,
                });
                start = end;
            }
            let total = total.expect("beta is positive");
            if !total.passed() || total.samples_checked != count {
                failures.push(format!("{} vs {}: {}", alpha.name(), beta.name(), total.summary()));
            }
        }
    }
    verdict(7, "weakened least witness passes for alpha in {1/3, 2/3, 5/8} on all dyadics of length <= 20", &failures);
}

#[test]
fn criterion_8_negative_controls() {
    let mut failures = Vec::new();
    let alpha = DeskReal::new("half", rat(1, 2), |n| rat(1, 2) - two_pow_neg(n + 1));
    let beta = DeskReal::new("quarter", rat(1, 4), |n| rat(1, 4) - two_pow_neg(n + 2));
    let w = TranslationWitness::new(TranslationFn::identity(), int(1), Variant::Strict).unwrap();
    let r = check_witness(&alpha, &beta, &w, &[rat(15, 64)]).unwrap();
    let flagged = r
        .violations
        .iter()
        .any(|v| v.q.0 == rat(15, 64) && v.reason == ViolationReason::GapBoundFailed);
    if !flagged {
        failures.push(format!("gap_bound_failed not reported: {r:?}"));
    }

    for real in default_gallery() {
        let horizon = real.settles_at().map_or(200, |s| (s - 1).min(200));
        let trace = liminf_record(&real, &SpeedUpFn::identity(), horizon).unwrap();
        if trace.running_min.0 != int(1) || trace.is_evidence_for(&rat(99, 100)) {
            failures.push(format!("{}: identity running_min {}", real.name(), trace.running_min.0));
        }
    }
    verdict(8, "gap_bound_failed at 15/64; identity speed-up never yields evidence", &failures);
}

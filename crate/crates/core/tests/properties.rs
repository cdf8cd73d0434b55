use hazard_risk::hazard::{
    band_index, classify, classify_with, default_catalog, scenario_grid, Dimension,
    EnvironmentReading, HazardBand, VisibilityBasis,
};
use hazard_risk::probability::{joint_probability, normalize_marginals, score_probability};
use hazard_risk::risk::{composite_risk, risk_level};
use hazard_risk::score::Score;
use hazard_risk::severity::{advisory_speed, fhwa_safe_speed, score_severity};
use proptest::prelude::*;

fn rated(dim: Dimension, template: &[HazardBand], rates: &[f64]) -> Vec<HazardBand> {
    template
        .iter()
        .zip(rates)
        .map(|(b, &r)| HazardBand::new(dim, b.label(), b.lower(), b.upper(), r).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn fhwa_increases_with_sight(t in 0.01f64..1.5, s in 1.0f64..7000.0, ds in 0.5f64..500.0) {
        let a = fhwa_safe_speed(t, 0.0, s).unwrap();
        let b = fhwa_safe_speed(t, 0.0, s + ds).unwrap();
        prop_assert!(b > a, "V({t}, {s}) = {a} !< V({t}, {}) = {b}", s + ds);
    }

    #[test]
    fn fhwa_increases_with_traction(mu in 0.01f64..1.0, g in -0.005f64..0.3, s in 1.0f64..7000.0, dt in 0.001f64..0.5) {
        prop_assume!(mu + g > 0.0);
        let a = fhwa_safe_speed(mu, g, s).unwrap();
        let b = fhwa_safe_speed(mu + dt, g, s).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn advisory_profile_invariants(v in 0.0f64..500.0, vd in 1.0f64..120.0) {
        let p = advisory_speed(v, vd).unwrap();
        prop_assert!((p.v_scaled - 15.0 / 22.0 * v).abs() < 1e-9);
        prop_assert!(p.v_advisory <= vd);
        prop_assert_eq!(p.v_advisory, vd.min(p.v_scaled));
        prop_assert!((0.0..=100.0).contains(&p.reduction_pct));
    }

    #[test]
    fn severity_is_monotone(a in 0.0f64..=100.0, b in 0.0f64..=100.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(score_severity(lo).unwrap() <= score_severity(hi).unwrap());
    }

    #[test]
    fn severity_non_increasing_in_advisory_speed(v1 in 0.0f64..300.0, v2 in 0.0f64..300.0) {
        let (slow, fast) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
        let s_slow = score_severity(advisory_speed(slow, 75.0).unwrap().reduction_pct).unwrap();
        let s_fast = score_severity(advisory_speed(fast, 75.0).unwrap().reduction_pct).unwrap();
        prop_assert!(s_fast <= s_slow);
    }

    #[test]
    fn probability_score_is_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(score_probability(lo).unwrap() <= score_probability(hi).unwrap());
    }

    #[test]
    fn normalization_is_scale_invariant(
        rates in proptest::collection::vec(0.01f64..100.0, 4),
        c in 1e-3f64..1e3,
    ) {
        let template = default_catalog();
        let scaled: Vec<f64> = rates.iter().map(|r| r * c).collect();
        let a = normalize_marginals(&rated(Dimension::Friction, template.friction_bands(), &rates)).unwrap();
        let b = normalize_marginals(&rated(Dimension::Friction, template.friction_bands(), &scaled)).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            prop_assert!((x.probability - y.probability).abs() < 1e-12);
        }
        let sum: f64 = a.probabilities().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_always_sums_to_one(
        f in proptest::collection::vec(0.001f64..10.0, 4),
        v in proptest::collection::vec(0.001f64..10.0, 4),
    ) {
        let c = default_catalog();
        let mut pf = normalize_marginals(c.friction_bands()).unwrap();
        let mut pv = normalize_marginals(c.visibility_bands()).unwrap();
        // Deliberately unnormalized marginals.
        for (e, x) in pf.entries.iter_mut().zip(&f) { e.probability = *x; }
        for (e, x) in pv.entries.iter_mut().zip(&v) { e.probability = *x; }
        let t = joint_probability(&pf, &pv).unwrap();
        let sum: f64 = t.entries().iter().map(|e| e.normalized_joint).sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classification_is_monotone(m1 in 1e-6f64..=1.0, m2 in 1e-6f64..=1.0, s1 in 0.0f64..8000.0, s2 in 0.0f64..8000.0) {
        let c = default_catalog();
        let (mlo, mhi) = if m1 <= m2 { (m1, m2) } else { (m2, m1) };
        let (slo, shi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        for basis in [VisibilityBasis::Sensor, VisibilityBasis::Literature] {
            let lo = classify_with(&EnvironmentReading::new(mlo, slo).unwrap(), &c, basis);
            let hi = classify_with(&EnvironmentReading::new(mhi, shi).unwrap(), &c, basis);
            // Hazard order: a larger value never lands in a more hazardous band.
            prop_assert!(hi.friction_index <= lo.friction_index);
            prop_assert!(hi.visibility_index <= lo.visibility_index);
        }
    }

    #[test]
    fn in_band_values_classify_to_their_band(fi in 0usize..4, vi in 0usize..4, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let c = default_catalog();
        let f = &c.friction_bands()[fi];
        let v = &c.sampling_visibility_bands()[vi];
        let mu = f.lower() + a * f.width();
        let s = v.lower() + b * v.width();
        // Shared sensor endpoints belong to the upper band.
        prop_assume!(vi == 0 || s < v.upper());
        let cl = classify(&EnvironmentReading::new(mu, s).unwrap(), &c);
        prop_assert_eq!(cl.friction_index, fi);
        prop_assert_eq!(cl.visibility_index, vi);
    }

    #[test]
    fn risk_is_monotone_in_each_score(p in 1u8..=5, s in 1u8..=5) {
        let r = composite_risk(p, s).unwrap();
        if p < 5 {
            let up = composite_risk(p + 1, s).unwrap();
            prop_assert!(up > r && up.level() >= r.level());
        }
        if s < 5 {
            let up = composite_risk(p, s + 1).unwrap();
            prop_assert!(up > r && up.level() >= r.level());
        }
    }
}

#[test]
fn classification_sweep_is_total() {
    let c = default_catalog();
    for i in 1..=10_000 {
        let mu = i as f64 / 10_000.0;
        let fi = band_index(mu, c.friction_bands());
        assert!(fi < 4);
    }
    for s in 0..=6562 {
        let r = EnvironmentReading::new(0.5, s as f64).unwrap();
        for basis in [VisibilityBasis::Sensor, VisibilityBasis::Literature] {
            let cl = classify_with(&r, &c, basis);
            assert!(cl.visibility_index < 4);
            assert!((1..=16).contains(&cl.scenario_id()));
        }
    }
}

#[test]
fn scenario_grid_is_a_bijection() {
    let c = default_catalog();
    let grid = scenario_grid(&c);
    let mut seen = std::collections::HashSet::new();
    for s in &grid {
        assert!(seen.insert((
            s.friction.label().to_string(),
            s.visibility.label().to_string()
        )));
    }
    for f in c.friction_bands() {
        for v in c.visibility_bands() {
            assert!(seen.contains(&(f.label().to_string(), v.label().to_string())));
        }
    }
}

#[test]
fn products_cover_exactly_the_reachable_scores() {
    let mut reachable = std::collections::BTreeSet::new();
    for p in Score::all() {
        for s in Score::all() {
            let r = composite_risk(p.get(), s.get()).unwrap();
            assert_eq!(risk_level(r.get()).unwrap(), r.level());
            reachable.insert(r.get());
        }
    }
    let expect: std::collections::BTreeSet<u8> = [1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 16, 20, 25]
        .into_iter()
        .collect();
    assert_eq!(reachable, expect);
}

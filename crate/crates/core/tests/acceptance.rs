//! Acceptance suite: every headline number the library must reproduce, one
//! test per criterion, at the stated tolerance. Run with
//! `cargo test --test acceptance` for one pass/fail line per criterion.

mod common;

use std::collections::BTreeSet;

use prodnet::centrality::disruption_centrality;
use prodnet::fixtures::{build, FixtureId};
use prodnet::fragility::{complexity_stats, expected_loss_formulas, expected_loss_mc};
use prodnet::hulten::{hulten_marginal, long_run_reequilibrate};
use prodnet::medium_run::{generate_lpr_family, lpr, medium_run_optimize};
use prodnet::model::{gdp, CountryId, ShockSpec, TechId};
use prodnet::power::{
    compose_partial_disruptions, enumerate_power, frontier, power, strategic_power,
    RoutingStrategy,
};
use prodnet::propagation::{
    check_industry_shock_condition, minimum_disruption_oracle, propagate, shock_bound, sweep,
    PropagationConfig,
};

fn tech(s: &str) -> TechId {
    TechId::from(s)
}

fn country(s: &str) -> CountryId {
    CountryId::from(s)
}

// 1. Hulten marginal: Fig1Chain, 10% shock to tau_R.
#[test]
fn acceptance_01_hulten_marginal() {
    let (eco, state) = build(FixtureId::Fig1Chain);
    let report = hulten_marginal(&eco, &state, &tech("tau_R"), 0.10).unwrap();
    assert!((report.marginal_share - 0.2).abs() <= 1e-12);
    assert!((report.extrapolated_loss - 0.02).abs() <= 1e-12);
}

// 2. Long-run re-equilibration reproduces the expected flows and GDP 0.978.
#[test]
fn acceptance_02_long_run_reequilibration() {
    let (eco, state) = build(FixtureId::Fig1Chain);
    let out = long_run_reequilibrate(&eco, &state, &ShockSpec::single("tau_R", 0.9)).unwrap();
    let home = country("home");
    let f = &out.flows;
    assert!((f.output(&tech("tau_R")) - 1.96).abs() <= 0.005);
    assert!((f.labor_flow(&home, &tech("tau_R")) - 2.17).abs() <= 0.005);
    assert!((f.labor_flow(&home, &tech("tau_I")) - 6.85).abs() <= 0.005);
    assert!((f.output(&tech("tau_I")) - 0.98).abs() <= 0.005);
    assert!((f.output(&tech("tau_F")) - 0.98).abs() <= 0.005);
    assert!((f.labor_flow(&home, &tech("tau_F")) - 0.98).abs() <= 0.005);
    let new_gdp = gdp(&eco, &state).unwrap() - out.lost_gdp_total;
    assert!((new_gdp - 0.978).abs() <= 0.001);
}

// 3. Short-run propagation loses the full ten percent, five times the
// long-run extrapolation.
#[test]
fn acceptance_03_short_run_propagation() {
    let (eco, state) = build(FixtureId::Fig1Chain);
    let out = propagate(
        &eco,
        &state,
        &ShockSpec::single("tau_R", 0.9),
        &PropagationConfig::default(),
    )
    .unwrap();
    let fraction = out.lost_gdp_total / gdp(&eco, &state).unwrap();
    assert!((fraction - 0.1000).abs() <= 1e-9);
    let hulten = hulten_marginal(&eco, &state, &tech("tau_R"), 0.10).unwrap();
    assert!((fraction / hulten.extrapolated_loss - 5.0).abs() <= 1e-6);
}

// 4. Fixed point with cycles plus oracle equivalence on the extended
// example.
#[test]
fn acceptance_04_cyclic_fixed_point_and_oracle() {
    let (eco, state) = build(FixtureId::AppendixBExtended);
    let shock = ShockSpec::single("tau02", 0.9);
    let config = PropagationConfig {
        delta: 1e-12,
        ..PropagationConfig::default()
    };
    let out = propagate(&eco, &state, &shock, &config).unwrap();
    let expected = [
        ("tau03", 7.2),
        ("tau07", 4.5),
        ("tau05", 4.5),
        ("tau06", 9.0),
        ("tau08", 2.7),
        ("tau09", 3.6),
        ("tau10", 2.7),
    ];
    for (t, y) in expected {
        assert!(
            (out.flows.output(&tech(t)) - y).abs() <= 1e-6,
            "{t}: {}",
            out.flows.output(&tech(t))
        );
    }
    let oracle = minimum_disruption_oracle(&eco, &state, &shock).unwrap();
    for t in state.outputs.keys() {
        assert!(
            (out.flows.output(t) - oracle.flows.output(t)).abs() <= 1e-9,
            "{t}"
        );
    }
}

// 5. The short-run loss depends on the wiring; the long-run extrapolation
// does not.
#[test]
fn acceptance_05_network_dependence() {
    let shock = ShockSpec::single("tau1", 0.9);
    let config = PropagationConfig::default();
    let (eco_a, state_a) = build(FixtureId::Fig5PanelA);
    let out_a = propagate(&eco_a, &state_a, &shock, &config).unwrap();
    assert!((out_a.lost_gdp_total / gdp(&eco_a, &state_a).unwrap() - 0.05).abs() <= 1e-9);
    let (eco_b, state_b) = build(FixtureId::Fig5PanelB);
    let out_b = propagate(&eco_b, &state_b, &shock, &config).unwrap();
    assert!((out_b.lost_gdp_total / gdp(&eco_b, &state_b).unwrap() - 0.1).abs() <= 1e-9);
    for (eco, state) in [(&eco_a, &state_a), (&eco_b, &state_b)] {
        let h = hulten_marginal(eco, state, &tech("tau1"), 0.10).unwrap();
        assert!((h.extrapolated_loss - 0.01).abs() <= 1e-12);
    }
}

// 6. Bound and tightness: a lone technology shock stays under the bound,
// an industry-wide one attains it.
#[test]
fn acceptance_06_bound_and_tightness() {
    let (eco, state) = build(FixtureId::AppendixBExtended);
    let single = ShockSpec::single("tau02", 0.9);
    let report = shock_bound(&eco, &state, &single).unwrap();
    assert!((report.bound_fraction - 0.1).abs() <= 1e-9);
    assert!(
        report.actual_fraction < report.bound_fraction,
        "actual {} vs bound {}",
        report.actual_fraction,
        report.bound_fraction
    );

    let industry = ShockSpec::new([tech("tau01"), tech("tau02")], 0.9);
    assert!(check_industry_shock_condition(&eco, &state, &industry).unwrap());
    let report = shock_bound(&eco, &state, &industry).unwrap();
    assert!((report.bound_fraction - report.actual_fraction).abs() <= 1e-9);
}

// 7. Disruption centrality of the shared raw-material producer.
#[test]
fn acceptance_07_disruption_centrality() {
    let (eco, state) = build(FixtureId::AppendixBWithBranch);
    let report = disruption_centrality(&eco, &state, &tech("tau02")).unwrap();
    assert!((report.dc - 0.575).abs() <= 1e-9, "dc = {}", report.dc);
}

// 8. Medium run: value-weighted rationing and rerouting.
#[test]
fn acceptance_08_medium_run() {
    let (eco, state) = build(FixtureId::ChipsMediumRun);
    let shock = ShockSpec::single("tR1", 0.9);
    let total = gdp(&eco, &state).unwrap();
    let medium = medium_run_optimize(&eco, &state, &shock).unwrap();
    assert!((medium.lost_gdp / total - 0.02).abs() <= 1e-9);
    let short = propagate(&eco, &state, &shock, &PropagationConfig::default()).unwrap();
    assert!((short.lost_gdp_total / total - 0.10).abs() <= 1e-9);

    let (eco, state) = build(FixtureId::FlexibleRerouting);
    let shock = ShockSpec::single("tau1", 0.5);
    let medium = medium_run_optimize(&eco, &state, &shock).unwrap();
    assert!((medium.flows.output(&tech("tau4")) - 3.0).abs() <= 1e-9);
    let short = propagate(&eco, &state, &shock, &PropagationConfig::default()).unwrap();
    assert!((short.flows.output(&tech("tau4")) - 2.5).abs() <= 1e-9);
}

// 9. The loss to price rigidity of the family equals its size, exactly.
#[test]
fn acceptance_09_lpr_family() {
    for t in 2u32..=6 {
        let (eco, state) = generate_lpr_family(t).unwrap();
        let single = lpr(&eco, &state, &ShockSpec::single("01", 0.5)).unwrap();
        assert_eq!(single.lpr, t as f64, "t = {t}");
        let both = lpr(
            &eco,
            &state,
            &ShockSpec::new([tech("01"), tech("02")], 0.5),
        )
        .unwrap();
        assert_eq!(both.lpr, 1.0, "t = {t}");
    }
}

// 10. Power across the two- and five-country examples.
#[test]
fn acceptance_10_power() {
    let (eco, state) = build(FixtureId::Fig7Power);
    let report = power(&eco, &state, &country("i"), &country("j"), false).unwrap();
    assert!((report.power_pct - 7.0).abs() <= 1e-9);
    assert!((report.power_abs - 5.0).abs() <= 1e-9);

    let (eco, state) = build(FixtureId::Fig9FiveCountry);
    let p = |a: &str, t: &str| {
        power(&eco, &state, &country(a), &country(t), false)
            .unwrap()
            .power_pct
    };
    assert!((p("c1", "c2") - 4.5).abs() <= 1e-9);
    assert!((p("c2", "c5") - 10.0).abs() <= 1e-9);
    assert!((p("c2", "c3") - 2.5).abs() <= 1e-9);
    assert!((p("c2", "c1") - 1.0).abs() <= 1e-9);
    assert!((p("c2", "c4") - 0.0).abs() <= 1e-9);
}

// 11. The disruption possibility frontier of the five-country example.
#[test]
fn acceptance_11_frontier() {
    let (eco, state) = build(FixtureId::Fig9FiveCountry);
    let f = frontier(&eco, &state, &country("c1"), &country("c2"), 6).unwrap();
    let expected = [(0.0, 0.0), (10.0, 45.0), (25.0, 90.0), (35.0, 100.0)];
    assert_eq!(f.points.len(), expected.len(), "{:?}", f.points);
    for ((own, tgt), (e_own, e_tgt)) in f.points.iter().zip(expected) {
        assert!((own - e_own).abs() <= 1e-6, "{:?}", f.points);
        assert!((tgt - e_tgt).abs() <= 1e-6, "{:?}", f.points);
    }
    // The slope at the origin is the power statistic.
    let slope = f.points[1].1 / f.points[1].0;
    let report = power(&eco, &state, &country("c1"), &country("c2"), false).unwrap();
    assert!((slope - report.power_pct).abs() <= 1e-6);
}

// 12. Non-concavity: the combined zeroed disruption strictly beats the
// scaled continuation of either marginal disruption.
#[test]
fn acceptance_12_non_concavity() {
    let (eco, state) = build(FixtureId::Fig11NonConcave);
    let f = frontier(&eco, &state, &country("i"), &country("j"), 4).unwrap();
    let marginal = f
        .points
        .iter()
        .find(|(own, _)| (own - 75.0).abs() < 1e-6)
        .expect("marginal breakpoint");
    let combined = f
        .points
        .iter()
        .find(|(own, _)| (own - 100.0).abs() < 1e-6)
        .expect("combined breakpoint");
    assert!((marginal.1 - 40.0).abs() <= 1e-6);
    assert!((combined.1 - 65.0).abs() <= 1e-6);
    // Strict dominance over the convex/scaled combination of the marginals.
    let marginal_ratio = marginal.1 / marginal.0;
    let combined_ratio = combined.1 / combined.0;
    assert!(combined_ratio > marginal_ratio + 1e-6);
    assert!(combined.1 > marginal_ratio * combined.0 + 1e-6);
}

// 13. Strategic rationing by the target turns 7/6 into 2/11.
#[test]
fn acceptance_13_strategic_power() {
    let (eco, state) = build(FixtureId::StrategicPower);
    let plain = power(&eco, &state, &country("i"), &country("j"), false).unwrap();
    assert!((plain.power_abs - 7.0 / 6.0).abs() <= 1e-9);
    let strategic = strategic_power(&eco, &state, &country("i"), &country("j")).unwrap();
    assert!((strategic.power_abs - 2.0 / 11.0).abs() <= 1e-9);
}

// 14. Monte-Carlo means sit within three standard errors of the
// closed-form approximations on each fig12 configuration.
#[test]
fn acceptance_14_fragility_mc_vs_formula() {
    let cases = [
        (FixtureId::Fig12Vertical, 4.0, 2.0),
        (FixtureId::Fig12Horizontal, 4.0, 0.8),
        (FixtureId::Fig12Parallel, 1.0, 0.8),
    ];
    let (pi, lambda, trials, seed) = (0.01, 0.9, 200_000u64, 2026u64);
    for (fixture, sr_mult, lr_mult) in cases {
        let (eco, state) = build(fixture);
        let stats = complexity_stats(&eco, &state).unwrap();
        let (sr_formula, lr_formula) = expected_loss_formulas(&stats, pi, lambda);
        assert!((sr_formula - sr_mult * (1.0 - lambda) * pi).abs() <= 1e-12, "{fixture}");
        assert!((lr_formula - lr_mult * (1.0 - lambda) * pi).abs() <= 1e-12, "{fixture}");
        let est = expected_loss_mc(&eco, &state, pi, lambda, trials, seed).unwrap();
        assert!(
            (est.short_run_mean - sr_formula).abs() <= 3.0 * est.short_run_se,
            "{fixture}: sr {} vs {} (se {})",
            est.short_run_mean,
            sr_formula,
            est.short_run_se
        );
        assert!(
            (est.long_run_mean - lr_formula).abs() <= 3.0 * est.long_run_se,
            "{fixture}: lr {} vs {} (se {})",
            est.long_run_mean,
            lr_formula,
            est.long_run_se
        );
    }
}

// 15a. Flow monotonicity across sweeps on random acyclic economies.
#[test]
fn acceptance_15a_flow_monotonicity() {
    for seed in 0..100u64 {
        let (eco, state) = common::random_economy(seed, &common::GenOptions::default());
        let shocked = common::pick_active(&state, seed);
        let shock = ShockSpec::new([shocked.clone()], 0.5);
        let mut prev: std::collections::BTreeMap<TechId, f64> =
            state.outputs.keys().map(|t| (t.clone(), 1.0)).collect();
        let mut downstream = BTreeSet::from([shocked]);
        // Transitive closure over positive flows.
        loop {
            let mut grew = false;
            for ((from, to), x) in &state.good_flows {
                if *x > 0.0 && downstream.contains(from) && downstream.insert(to.clone()) {
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        for _ in 0..64 {
            let next = sweep(&eco, &state, &shock, &prev);
            for (t, f) in &next {
                assert!(
                    *f <= prev[t] + 1e-12,
                    "seed {seed}: fraction rose at {t}"
                );
            }
            let stationary = next.iter().all(|(t, f)| *f == prev[t]);
            prev = next;
            if stationary {
                break;
            }
        }
        for t in &downstream {
            if state.output(t) > 0.0 {
                assert!(
                    prev[t] < 1.0 - 1e-9,
                    "seed {seed}: no strict drop on the path at {t}"
                );
            }
        }
    }
}

// 15b. Medium-run losses never exceed short-run losses.
#[test]
fn acceptance_15b_medium_run_dominance() {
    for seed in 0..100u64 {
        let (eco, state) = common::random_economy(seed, &common::GenOptions::default());
        let shocked = common::pick_active(&state, seed.wrapping_add(17));
        let shock = ShockSpec::new([shocked], 0.7);
        let short = propagate(&eco, &state, &shock, &PropagationConfig::default()).unwrap();
        let medium = medium_run_optimize(&eco, &state, &shock).unwrap();
        assert!(
            medium.lost_gdp <= short.lost_gdp_total + 1e-9,
            "seed {seed}: medium {} vs short {}",
            medium.lost_gdp,
            short.lost_gdp_total
        );
    }
}

// 15c. Order invariance of two partial individual disruptions.
#[test]
fn acceptance_15c_partial_disruption_order_invariance() {
    let opts = common::GenOptions {
        countries: 2,
        single_sourced: false,
    };
    let mut done = 0u32;
    let mut seed = 0u64;
    while done < 50 {
        seed += 1;
        let (eco, state) = common::random_economy(seed, &opts);
        let aggressor = country("c0");
        let mine: Vec<TechId> = eco
            .technologies()
            .iter()
            .filter(|t| t.country == aggressor && state.is_active(&t.id))
            .map(|t| t.id.clone())
            .collect();
        if mine.len() < 2 {
            continue;
        }
        let (t1, t2) = (mine[0].clone(), mine[1].clone());
        let routing = RoutingStrategy::proportional();
        let step1 = (t1.clone(), 0.05 * state.output(&t1), routing.clone());
        let step2 = (t2.clone(), 0.03 * state.output(&t2), routing.clone());
        let run = |steps: &[(TechId, f64, RoutingStrategy)]| {
            compose_partial_disruptions(&eco, &state, &aggressor, steps, None)
                .ok()
                .map(|o| o.flows)
        };
        let forward = run(&[step1.clone(), step2.clone()]);
        let backward = run(&[step2, step1]);
        let (Some(ab), Some(ba)) = (forward, backward) else {
            continue;
        };
        for (k, v) in &ab.good_flows {
            assert!(
                (v - ba.flow(&k.0, &k.1)).abs() <= 1e-9,
                "seed {seed}: flow {k:?} differs"
            );
        }
        for (k, v) in &ab.outputs {
            assert!(
                (v - ba.output(k)).abs() <= 1e-9,
                "seed {seed}: output {k} differs"
            );
        }
        done += 1;
    }
}

// 15d. The percentage and absolute power measures rank disruptions the
// same way on every power fixture.
#[test]
fn acceptance_15d_power_argmax_agreement() {
    let pairs: Vec<(FixtureId, &str, &str)> = vec![
        (FixtureId::Fig7Power, "i", "j"),
        (FixtureId::Fig7Power, "j", "i"),
        (FixtureId::Fig9FiveCountry, "c1", "c2"),
        (FixtureId::Fig9FiveCountry, "c2", "c1"),
        (FixtureId::Fig9FiveCountry, "c2", "c3"),
        (FixtureId::Fig9FiveCountry, "c2", "c5"),
        (FixtureId::Fig11NonConcave, "i", "j"),
        (FixtureId::Fig11NonConcave, "j", "i"),
        (FixtureId::StrategicPower, "i", "j"),
        (FixtureId::StrategicPower, "j", "i"),
    ];
    for (fixture, a, t) in pairs {
        let (eco, state) = build(fixture);
        let candidates = enumerate_power(&eco, &state, &country(a), &country(t), false).unwrap();
        if candidates.is_empty() {
            continue;
        }
        let by_pct = candidates
            .iter()
            .max_by(|x, y| x.power_pct.total_cmp(&y.power_pct))
            .unwrap();
        let by_abs = candidates
            .iter()
            .max_by(|x, y| x.power_abs.total_cmp(&y.power_abs))
            .unwrap();
        assert!(
            (by_pct.power_abs - by_abs.power_abs).abs() <= 1e-9,
            "{fixture} {a}->{t}: pct argmax abs {} vs abs max {}",
            by_pct.power_abs,
            by_abs.power_abs
        );
    }
}

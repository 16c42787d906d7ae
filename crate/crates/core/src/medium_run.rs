//! Medium-run analysis: efficient rationing as a value-maximizing linear
//! program with labor fixed, plus the loss-to-price-rigidity statistic and
//! the generator for the unbounded-LPR family.
//!
//! The LP relaxes proportional rationing: any producer of a good may ship
//! to any user of that good, priced with the actual iceberg cost, but no
//! technology can exceed its pre-shock output (labor is fixed) and shocked
//! technologies are capped at `lambda` of it.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures;
use crate::model::{
    gdp, DisruptionOutcome, Economy, FlowState, ShockSpec, TechId,
};
use crate::propagation::{propagate, PropagationConfig};
use crate::simplex::{maximize, Scalar};

#[derive(Debug, Clone, Serialize)]
pub struct MediumRunResult {
    pub flows: FlowState,
    pub lost_gdp: f64,
    /// Supplier-customer links used by the optimum that carried no flow
    /// before the shock.
    pub reroutes: Vec<(TechId, TechId, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LprReport {
    pub short_run_loss: f64,
    pub medium_run_loss: f64,
    /// Ratio of short- to medium-run loss; 1 when nothing is lost either
    /// way, infinite when flexible prices avoid the loss entirely.
    pub lpr: f64,
}

/// Cap on LP size; beyond this the dense tableau is the wrong tool.
const MAX_VARIABLES: usize = 2_000;

struct LpLayout {
    /// (producer, user) pairs eligible to carry flow.
    pairs: Vec<(TechId, TechId)>,
    /// Active technologies, lexicographic.
    techs: Vec<TechId>,
}

type LpProgram<T> = (Vec<Vec<T>>, Vec<T>, Vec<T>, LpLayout);

fn build_lp<T: Scalar>(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
) -> Result<LpProgram<T>> {
    let techs: Vec<TechId> = state.active_techs();
    let tech_idx: BTreeMap<&TechId, usize> =
        techs.iter().enumerate().map(|(i, t)| (t, i)).collect();

    // Rerouting scope: every active producer of a good may serve every
    // active user of it.
    let mut pairs: Vec<(TechId, TechId)> = Vec::new();
    let mut pair_cols: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for user in &techs {
        let tech = economy.technology(user)?;
        for good in tech.inputs.keys() {
            for src in economy.producers_of(good) {
                if !state.is_active(src) {
                    continue;
                }
                let key = (tech_idx[src], tech_idx[user]);
                if let std::collections::btree_map::Entry::Vacant(e) = pair_cols.entry(key) {
                    e.insert(pairs.len());
                    pairs.push((src.clone(), user.clone()));
                }
            }
        }
    }
    let n_flow = pairs.len();
    let n = n_flow + techs.len();
    if n > MAX_VARIABLES {
        return Err(Error::TooLarge(format!(
            "medium-run program has {n} variables (limit {MAX_VARIABLES})"
        )));
    }
    let y_col = |i: usize| n_flow + i;

    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut rhs: Vec<T> = Vec::new();
    let mut push_row = |row: Vec<T>, b: T| {
        rows.push(row);
        rhs.push(b);
    };

    // Leontief input feasibility with iceberg losses: a_g y - sum x/theta <= 0.
    for (ti, user) in techs.iter().enumerate() {
        let tech = economy.technology(user)?;
        for (good, qty) in &tech.inputs {
            let mut row = vec![T::zero(); n];
            row[y_col(ti)] = T::from_f64(*qty);
            let mut any = false;
            for src in economy.producers_of(good) {
                if !state.is_active(src) {
                    continue;
                }
                let col = pair_cols[&(tech_idx[src], ti)];
                let theta = economy.transport().good_cost(src, user);
                row[col] = T::from_f64(-1.0 / theta);
                any = true;
            }
            if !any {
                return Err(Error::Solver(format!(
                    "active technology {user} has no active producer of {good}"
                )));
            }
            push_row(row, T::zero());
        }
    }
    // Producers cannot ship more than they make.
    for (pi, producer) in techs.iter().enumerate() {
        let outgoing: Vec<usize> = pair_cols
            .iter()
            .filter(|((src, _), _)| *src == pi)
            .map(|(_, col)| *col)
            .collect();
        if outgoing.is_empty() {
            continue;
        }
        let mut row = vec![T::zero(); n];
        for col in outgoing {
            row[col] = T::one();
        }
        row[y_col(pi)] = T::from_f64(-1.0);
        push_row(row, T::zero());
        let _ = producer;
    }
    // Labor fixes each technology's ceiling; shocks tighten it.
    for (ti, t) in techs.iter().enumerate() {
        let cap = if shock.shocked.contains(t) {
            shock.lambda * state.output(t)
        } else {
            state.output(t)
        };
        let mut row = vec![T::zero(); n];
        row[y_col(ti)] = T::one();
        push_row(row, T::from_f64(cap));
    }

    // Objective: pre-shock value of final output.
    let mut c = vec![T::zero(); n];
    for (ti, t) in techs.iter().enumerate() {
        let tech = economy.technology(t)?;
        if economy.produces_final(tech) {
            let p = state
                .price(t)
                .ok_or_else(|| Error::MissingPrice(t.to_string()))?;
            c[y_col(ti)] = T::from_f64(p);
        }
    }
    Ok((rows, rhs, c, LpLayout { pairs, techs }))
}

fn solution_to_result<T: Scalar>(
    economy: &Economy,
    state: &FlowState,
    x: &[T],
    objective: &T,
    layout: &LpLayout,
) -> Result<MediumRunResult> {
    let n_flow = layout.pairs.len();
    let mut flows = state.clone();
    flows.good_flows.clear();
    let mut reroutes = Vec::new();
    for (k, (src, user)) in layout.pairs.iter().enumerate() {
        let amount = x[k].to_f64();
        if amount > 1e-12 {
            flows
                .good_flows
                .insert((src.clone(), user.clone()), amount);
            if state.flow(src, user) == 0.0 {
                reroutes.push((src.clone(), user.clone(), amount));
            }
        }
    }
    let mut base_value = 0.0;
    let mut ratios: BTreeMap<TechId, f64> = BTreeMap::new();
    for (i, t) in layout.techs.iter().enumerate() {
        let y_new = x[n_flow + i].to_f64();
        flows.outputs.insert(t.clone(), y_new);
        let ratio = if state.output(t) > 0.0 {
            (y_new / state.output(t)).min(1.0)
        } else {
            0.0
        };
        ratios.insert(t.clone(), ratio);
        let tech = economy.technology(t)?;
        if economy.produces_final(tech) {
            let p = state
                .price(t)
                .ok_or_else(|| Error::MissingPrice(t.to_string()))?;
            base_value += p * state.output(t);
        }
    }
    // Labor stays attached to its technology at reduced utilization.
    for ((_, to), v) in flows.labor_flows.iter_mut() {
        *v *= ratios.get(to).copied().unwrap_or(1.0);
    }
    Ok(MediumRunResult {
        flows,
        lost_gdp: base_value - objective.to_f64(),
        reroutes,
    })
}

/// Solve the medium-run rationing program at pre-shock prices.
pub fn medium_run_optimize(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
) -> Result<MediumRunResult> {
    shock.check_against(state)?;
    let (rows, rhs, c, layout) = build_lp::<f64>(economy, state, shock)?;
    let sol = maximize(&rows, &rhs, &c)?;
    solution_to_result(economy, state, &sol.x, &sol.objective, &layout)
}

/// The medium-run program in exact rational arithmetic; used by [`lpr`] so
/// that ratio statistics on rational fixtures come out exact.
fn medium_run_loss_exact(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
) -> Result<f64> {
    let (rows, rhs, c, layout) = build_lp::<BigRational>(economy, state, shock)?;
    let sol = maximize(&rows, &rhs, &c)?;
    let result = solution_to_result(economy, state, &sol.x, &sol.objective, &layout)?;
    Ok(result.lost_gdp)
}

/// Short-run loss over medium-run loss for the same shock, value-weighted
/// at pre-shock prices.
pub fn lpr(economy: &Economy, state: &FlowState, shock: &ShockSpec) -> Result<LprReport> {
    let short = propagate(economy, state, shock, &PropagationConfig::default())?;
    let medium_run_loss = medium_run_loss_exact(economy, state, shock)?;
    let short_run_loss = short.lost_gdp_total;
    let lpr = if medium_run_loss.abs() <= 1e-15 {
        if short_run_loss.abs() <= 1e-15 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        short_run_loss / medium_run_loss
    };
    Ok(LprReport {
        short_run_loss,
        medium_run_loss,
        lpr,
    })
}

/// Construct the t-country family economy whose loss to price rigidity
/// under a shock to technology "01" equals t.
pub fn generate_lpr_family(t: u32) -> Result<(Economy, FlowState)> {
    if t < 2 {
        return Err(Error::Precondition(format!(
            "family size {t} is below the minimum of 2"
        )));
    }
    Ok(fixtures::build(fixtures::FixtureId::LprFamily(t)))
}

/// Check that a disruption outcome satisfies every medium-run constraint;
/// the short-run fixed point is always a feasible point of the program.
pub fn satisfies_lp_constraints(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
    candidate: &DisruptionOutcome,
    tol: f64,
) -> Result<bool> {
    for t in state.active_techs() {
        let y_new = candidate.flows.output(&t);
        let cap = if shock.shocked.contains(&t) {
            shock.lambda * state.output(&t)
        } else {
            state.output(&t)
        };
        if y_new > cap + tol {
            return Ok(false);
        }
        let tech = economy.technology(&t)?;
        for (good, qty) in &tech.inputs {
            let mut received = 0.0;
            for src in economy.producers_of(good) {
                let x = candidate.flows.flow(src, &t);
                if x > 0.0 {
                    received += x / economy.transport().good_cost(src, &t);
                }
            }
            if received + tol < qty * y_new {
                return Ok(false);
            }
        }
        let shipped: f64 = candidate
            .flows
            .good_flows
            .iter()
            .filter(|((from, _), _)| *from == t)
            .map(|(_, v)| v)
            .sum();
        if !economy.produces_final(tech) && shipped > y_new + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convenience: world GDP of the pre-shock state.
pub fn baseline_gdp(economy: &Economy, state: &FlowState) -> Result<f64> {
    gdp(economy, state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build, FixtureId};

    #[test]
    fn chips_medium_run_reroutes_the_loss_to_the_cheap_final() {
        let (eco, state) = build(FixtureId::ChipsMediumRun);
        let shock = ShockSpec::single("tR1", 0.9);
        let total = gdp(&eco, &state).unwrap();
        let medium = medium_run_optimize(&eco, &state, &shock).unwrap();
        assert!((medium.lost_gdp / total - 0.02).abs() < 1e-9);
        let short = propagate(&eco, &state, &shock, &PropagationConfig::default()).unwrap();
        assert!((short.lost_gdp_total / total - 0.10).abs() < 1e-9);
        // The valuable final keeps its full output.
        assert!((medium.flows.output(&TechId::from("tF2")) - 9.0).abs() < 1e-9);
    }

    #[test]
    fn equal_final_values_leave_nothing_to_reroute() {
        // Symmetric variant: both finals worth the same, so the medium run
        // equals the short run.
        use crate::model::{Country, CountryId, Good, GoodId, GoodKind, Technology, TransportCosts};
        use std::collections::BTreeMap;
        let eco = Economy::new(
            vec![Country {
                id: CountryId::from("home"),
                labor_endowment: 2.0,
            }],
            vec![
                Good {
                    id: GoodId::from("R1"),
                    kind: GoodKind::Intermediate,
                },
                Good {
                    id: GoodId::from("FA"),
                    kind: GoodKind::Final,
                },
                Good {
                    id: GoodId::from("FB"),
                    kind: GoodKind::Final,
                },
            ],
            vec![
                Technology {
                    id: TechId::from("tR"),
                    country: CountryId::from("home"),
                    output: GoodId::from("R1"),
                    labor_input: 0.9,
                    inputs: BTreeMap::new(),
                },
                Technology {
                    id: TechId::from("tA"),
                    country: CountryId::from("home"),
                    output: GoodId::from("FA"),
                    labor_input: 0.1,
                    inputs: BTreeMap::from([(GoodId::from("R1"), 1.0)]),
                },
                Technology {
                    id: TechId::from("tB"),
                    country: CountryId::from("home"),
                    output: GoodId::from("FB"),
                    labor_input: 0.1,
                    inputs: BTreeMap::from([(GoodId::from("R1"), 1.0)]),
                },
            ],
            TransportCosts::frictionless(),
            None,
        )
        .unwrap();
        let state = FlowState::new(
            BTreeMap::from([
                ((TechId::from("tR"), TechId::from("tA")), 1.0),
                ((TechId::from("tR"), TechId::from("tB")), 1.0),
            ]),
            BTreeMap::from([
                ((CountryId::from("home"), TechId::from("tR")), 1.8),
                ((CountryId::from("home"), TechId::from("tA")), 0.1),
                ((CountryId::from("home"), TechId::from("tB")), 0.1),
            ]),
            BTreeMap::from([
                (TechId::from("tR"), 2.0),
                (TechId::from("tA"), 1.0),
                (TechId::from("tB"), 1.0),
            ]),
            BTreeMap::from([
                (TechId::from("tR"), 0.9),
                (TechId::from("tA"), 1.0),
                (TechId::from("tB"), 1.0),
            ]),
            BTreeMap::from([(CountryId::from("home"), 1.0)]),
        )
        .unwrap();
        let shock = ShockSpec::single("tR", 0.9);
        let medium = medium_run_optimize(&eco, &state, &shock).unwrap();
        let short = propagate(&eco, &state, &shock, &PropagationConfig::default()).unwrap();
        assert!((medium.lost_gdp - short.lost_gdp_total).abs() < 1e-9);
    }

    #[test]
    fn flexible_rerouting_saves_half_a_unit() {
        let (eco, state) = build(FixtureId::FlexibleRerouting);
        let shock = ShockSpec::single("tau1", 0.5);
        let medium = medium_run_optimize(&eco, &state, &shock).unwrap();
        assert!((medium.flows.output(&TechId::from("tau4")) - 3.0).abs() < 1e-9);
        let short = propagate(&eco, &state, &shock, &PropagationConfig::default()).unwrap();
        assert!((short.flows.output(&TechId::from("tau4")) - 2.5).abs() < 1e-9);
    }

    #[test]
    fn swapping_objective_prices_moves_the_disruption() {
        // Unlike the minimum-disruption problem, the medium-run output
        // composition tracks the objective prices.
        let (eco, mut state) = build(FixtureId::ChipsMediumRun);
        let shock = ShockSpec::single("tR1", 0.9);
        state.prices.insert(TechId::from("tF1"), 9.0);
        state.prices.insert(TechId::from("tF2"), 1.0);
        // Recompute input price so the state still validates zero profit is
        // irrelevant here; the LP only reads prices from the objective.
        let medium = medium_run_optimize(&eco, &state, &shock).unwrap();
        assert!((medium.flows.output(&TechId::from("tF1")) - 1.0).abs() < 1e-9);
        assert!(medium.flows.output(&TechId::from("tF2")) < 9.0);
    }

    #[test]
    fn lpr_of_the_family_is_t() {
        for t in [2u32, 3] {
            let (eco, state) = generate_lpr_family(t).unwrap();
            let report = lpr(&eco, &state, &ShockSpec::single("01", 0.5)).unwrap();
            assert_eq!(report.lpr, t as f64, "t = {t}");
        }
    }

    #[test]
    fn industry_wide_shock_has_lpr_one() {
        let (eco, state) = generate_lpr_family(3).unwrap();
        let shock = ShockSpec::new([TechId::from("01"), TechId::from("02")], 0.5);
        let report = lpr(&eco, &state, &shock).unwrap();
        assert_eq!(report.lpr, 1.0);
    }

    #[test]
    fn no_shock_reports_lpr_one() {
        let (eco, state) = build(FixtureId::Fig1Chain);
        let report = lpr(&eco, &state, &ShockSpec::single("tau_R", 1.0)).unwrap();
        assert_eq!(report.lpr, 1.0);
        assert_eq!(report.short_run_loss, 0.0);
    }

    #[test]
    fn short_run_fixed_point_is_lp_feasible() {
        for (fixture, tech) in [
            (FixtureId::AppendixBExtended, "tau02"),
            (FixtureId::FlexibleRerouting, "tau1"),
            (FixtureId::ChipsMediumRun, "tR1"),
        ] {
            let (eco, state) = build(fixture);
            let shock = ShockSpec::single(tech, 0.8);
            let short = propagate(&eco, &state, &shock, &PropagationConfig::default()).unwrap();
            assert!(
                satisfies_lp_constraints(&eco, &state, &shock, &short, 1e-7).unwrap(),
                "{fixture}"
            );
        }
    }

    #[test]
    fn family_generator_rejects_degenerate_sizes() {
        assert!(matches!(
            generate_lpr_family(1),
            Err(Error::Precondition(_))
        ));
    }
}

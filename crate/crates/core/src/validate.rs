//! Equilibrium validation: zero profit, feasible production plans, and
//! market clearing, each checked to an absolute tolerance. Violations are
//! data, not errors; an empty report means the state is an equilibrium.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::model::{
    effective_input_price, effective_labor_price, Economy, FlowState, GoodKind,
};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// One failed equilibrium condition, naming the condition, the entity, and
/// the residual magnitude.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub entity: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// Active technology earns non-zero profit, or inactive one earns
    /// strictly positive profit, at transport-adjusted input prices.
    ZeroProfit,
    /// Sourced inputs net of iceberg loss differ from recipe requirements.
    Feasibility,
    /// Labor sourced net of iceberg loss differs from recipe requirements.
    LaborFeasibility,
    /// A country's supplied labor differs from its endowment.
    LaborMarket,
    /// An intermediate producer's shipments differ from its output.
    IntermediateMarket,
    /// Producers of the same final good quote different prices.
    FinalPriceCoherence,
    /// A positive flow is sourced above the cheapest available price.
    SourcingOptimality,
    /// A technology with zero output has positive inflows or outflows.
    InactiveFlows,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::ZeroProfit => "zero_profit",
            Condition::Feasibility => "feasibility",
            Condition::LaborFeasibility => "labor_feasibility",
            Condition::LaborMarket => "labor_market",
            Condition::IntermediateMarket => "intermediate_market",
            Condition::FinalPriceCoherence => "final_price_coherence",
            Condition::SourcingOptimality => "sourcing_optimality",
            Condition::InactiveFlows => "inactive_flows",
        };
        f.write_str(s)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violated at {} (residual {:.3e})",
            self.condition, self.entity, self.residual
        )
    }
}

/// Check every equilibrium condition against
/// `state`. Returns the full list of violations beyond `tolerance`.
pub fn validate_equilibrium(
    economy: &Economy,
    state: &FlowState,
    tolerance: f64,
) -> Result<Vec<Violation>> {
    let mut violations = Vec::new();
    let mut push = |condition: Condition, entity: String, residual: f64| {
        violations.push(Violation {
            condition,
            entity,
            residual,
        });
    };

    // Zero profit, feasibility, and inactivity per technology.
    for tech in economy.technologies() {
        let y = state.output(&tech.id);
        let active = y > 0.0;

        // Unit cost at cheapest transport-adjusted sources.
        let mut unit_cost = 0.0;
        let mut cost_ok = true;
        let (labor_cost, _) = effective_labor_price(economy, state, &tech.id)?;
        unit_cost += tech.labor_input * labor_cost;
        for (good, qty) in &tech.inputs {
            match effective_input_price(economy, state, &tech.id, good) {
                Ok((p, _)) => unit_cost += qty * p,
                Err(_) => cost_ok = false, // no producer priced; unshippable input
            }
        }
        if cost_ok {
            if let Some(p) = state.price(&tech.id) {
                let profit = p - unit_cost;
                let bad = if active {
                    profit.abs() > tolerance
                } else {
                    profit > tolerance
                };
                if bad {
                    push(Condition::ZeroProfit, tech.id.to_string(), profit);
                }
            } else if active {
                push(Condition::ZeroProfit, tech.id.to_string(), f64::NAN);
            }
        }

        if active {
            // Production plan feasibility: sum of x/theta equals a_g * y.
            for (good, qty) in &tech.inputs {
                let mut received = 0.0;
                for src in economy.producers_of(good) {
                    let x = state.flow(src, &tech.id);
                    if x > 0.0 {
                        received += x / economy.transport().good_cost(src, &tech.id);
                    }
                }
                let residual = received - qty * y;
                if residual.abs() > tolerance {
                    push(
                        Condition::Feasibility,
                        format!("{} input {}", tech.id, good),
                        residual,
                    );
                }
            }
            let mut labor_received = 0.0;
            for c in economy.countries() {
                let x = state.labor_flow(&c.id, &tech.id);
                if x > 0.0 {
                    labor_received += x / economy.transport().labor_cost(&c.id, &tech.id);
                }
            }
            let residual = labor_received - tech.labor_input * y;
            if residual.abs() > tolerance {
                push(Condition::LaborFeasibility, tech.id.to_string(), residual);
            }
        } else {
            // Idle technologies neither receive nor ship anything.
            let mut total = 0.0;
            for ((from, to), x) in &state.good_flows {
                if from == &tech.id || to == &tech.id {
                    total += x.abs();
                }
            }
            for ((_, to), x) in &state.labor_flows {
                if to == &tech.id {
                    total += x.abs();
                }
            }
            if total > tolerance {
                push(Condition::InactiveFlows, tech.id.to_string(), total);
            }
        }
    }

    // Labor markets clear per country (in shipped units).
    for c in economy.countries() {
        let supplied: f64 = state
            .labor_flows
            .iter()
            .filter(|((n, _), _)| n == &c.id)
            .map(|(_, v)| v)
            .sum();
        let residual = supplied - c.labor_endowment;
        if residual.abs() > tolerance {
            push(Condition::LaborMarket, c.id.to_string(), residual);
        }
    }

    // Intermediate goods markets clear per technology.
    for tech in economy.technologies() {
        if economy.good_kind(&tech.output)? == GoodKind::Final {
            continue;
        }
        let y = state.output(&tech.id);
        if y <= 0.0 {
            continue; // covered by InactiveFlows
        }
        let shipped: f64 = state
            .good_flows
            .iter()
            .filter(|((from, _), _)| from == &tech.id)
            .map(|(_, v)| v)
            .sum();
        let residual = shipped - y;
        if residual.abs() > tolerance {
            push(Condition::IntermediateMarket, tech.id.to_string(), residual);
        }
    }

    // One world price per final good across its active producers.
    let mut final_prices: BTreeMap<&crate::model::GoodId, (f64, f64)> = BTreeMap::new();
    for tech in economy.technologies() {
        if economy.good_kind(&tech.output)? != GoodKind::Final || !state.is_active(&tech.id) {
            continue;
        }
        if let Some(p) = state.price(&tech.id) {
            let entry = final_prices.entry(&tech.output).or_insert((p, p));
            entry.0 = entry.0.min(p);
            entry.1 = entry.1.max(p);
        }
    }
    for (good, (lo, hi)) in final_prices {
        if hi - lo > tolerance {
            push(Condition::FinalPriceCoherence, good.to_string(), hi - lo);
        }
    }

    // Positive flows must come from a cheapest source.
    for ((from, to), x) in &state.good_flows {
        if *x <= 0.0 {
            continue;
        }
        let src = economy.technology(from)?;
        let paid = match state.price(from) {
            Some(p) => economy.transport().good_cost(from, to) * p,
            None => continue,
        };
        if let Ok((best, _)) = effective_input_price(economy, state, to, &src.output) {
            if paid - best > tolerance {
                push(
                    Condition::SourcingOptimality,
                    format!("{from}->{to}"),
                    paid - best,
                );
            }
        }
    }
    for ((country, to), x) in &state.labor_flows {
        if *x <= 0.0 {
            continue;
        }
        let paid = economy.transport().labor_cost(country, to) * state.wage(country);
        let (best, _) = effective_labor_price(economy, state, to)?;
        if paid - best > tolerance {
            push(
                Condition::SourcingOptimality,
                format!("labor {country}->{to}"),
                paid - best,
            );
        }
    }

    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build, FixtureId};
    use crate::model::TechId;

    #[test]
    fn fig1_pre_shock_state_is_an_equilibrium() {
        let (eco, state) = build(FixtureId::Fig1Chain);
        let report = validate_equilibrium(&eco, &state, DEFAULT_TOLERANCE).unwrap();
        assert!(report.is_empty(), "{report:?}");
    }

    #[test]
    fn perturbed_final_price_breaks_zero_profit_only() {
        let (eco, mut state) = build(FixtureId::Fig1Chain);
        *state.prices.get_mut(&TechId::from("tau_F")).unwrap() = 1.1;
        let report = validate_equilibrium(&eco, &state, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(report.len(), 1, "{report:?}");
        assert_eq!(report[0].condition, Condition::ZeroProfit);
        assert_eq!(report[0].entity, "tau_F");
        assert!((report[0].residual - 0.1).abs() < 1e-12);
    }

    #[test]
    fn all_zero_state_fails_labor_market_clearing() {
        let (eco, mut state) = build(FixtureId::Fig1Chain);
        state.good_flows.clear();
        state.labor_flows.clear();
        for y in state.outputs.values_mut() {
            *y = 0.0;
        }
        let report = validate_equilibrium(&eco, &state, DEFAULT_TOLERANCE).unwrap();
        assert!(report
            .iter()
            .any(|v| v.condition == Condition::LaborMarket));
    }

    // Surgical mutations: each perturbs exactly one condition.
    #[test]
    fn mutation_of_each_condition_flags_exactly_one_violation() {
        let (eco, base) = build(FixtureId::Fig1Chain);
        let n = eco.countries()[0].id.clone();
        let eps = 1e-6;

        // (a) zero profit: bump the final price.
        let mut s = base.clone();
        *s.prices.get_mut(&TechId::from("tau_F")).unwrap() += eps;
        let r = validate_equilibrium(&eco, &s, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].condition, Condition::ZeroProfit);

        // (b) labor feasibility: oversupply labor to tau_I, rebalance the
        // endowment so the labor market still clears.
        let mut s_b = base.clone();
        *s_b
            .labor_flows
            .get_mut(&(n.clone(), TechId::from("tau_I")))
            .unwrap() += eps;
        let mut countries = eco.countries().to_vec();
        countries[0].labor_endowment += eps;
        let eco2 = crate::model::Economy::new(
            countries,
            eco.goods().to_vec(),
            eco.technologies().to_vec(),
            eco.transport().clone(),
            eco.demand_shares().cloned(),
        )
        .unwrap();
        let r = validate_equilibrium(&eco2, &s_b, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.len(), 1, "{r:?}");
        assert_eq!(r[0].condition, Condition::LaborFeasibility);

        // (c) labor market: raise the endowment only.
        let mut countries = eco.countries().to_vec();
        countries[0].labor_endowment += eps;
        let eco3 = crate::model::Economy::new(
            countries,
            eco.goods().to_vec(),
            eco.technologies().to_vec(),
            eco.transport().clone(),
            eco.demand_shares().cloned(),
        )
        .unwrap();
        let r = validate_equilibrium(&eco3, &base, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].condition, Condition::LaborMarket);

        // (d) intermediate market: raise tau_R's output, feed it extra labor
        // and endowment so everything else stays consistent.
        let mut s = base.clone();
        *s.outputs.get_mut(&TechId::from("tau_R")).unwrap() += eps;
        *s.labor_flows
            .get_mut(&(n.clone(), TechId::from("tau_R")))
            .unwrap() += eps;
        let r = validate_equilibrium(&eco3, &s, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.len(), 1, "{r:?}");
        assert_eq!(r[0].condition, Condition::IntermediateMarket);

        // (e) good feasibility: ship the extra output onward as excess input.
        let mut s2 = s.clone();
        *s2.good_flows
            .get_mut(&(TechId::from("tau_R"), TechId::from("tau_I")))
            .unwrap() += eps;
        let r = validate_equilibrium(&eco3, &s2, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.len(), 1, "{r:?}");
        assert_eq!(r[0].condition, Condition::Feasibility);
    }
}

//! Long-run analysis: the marginal-impact statistic (expenditure share of
//! the shocked technology over GDP), its finite-shock extrapolation, and
//! exact long-run re-equilibration for the restricted economy class in
//! which every good has a single active producer.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{
    gdp, DisruptionOutcome, Economy, FlowState, GoodId, GoodKind, ShockSpec, TechId,
};

/// Marginal long-run impact of a technology: its expenditure share of GDP,
/// extrapolated linearly for a finite shock.
#[derive(Debug, Clone, Serialize)]
pub struct HultenReport {
    pub tech: TechId,
    pub expenditure: f64,
    pub gdp: f64,
    pub marginal_share: f64,
    pub extrapolated_loss: f64,
}

pub fn hulten_marginal(
    economy: &Economy,
    state: &FlowState,
    tech: &TechId,
    shock_size: f64,
) -> Result<HultenReport> {
    if !state.is_active(tech) {
        return Err(Error::InactiveTech(tech.to_string()));
    }
    if !(0.0..=1.0).contains(&shock_size) {
        return Err(Error::Invariant(format!(
            "shock size {shock_size} outside [0, 1]"
        )));
    }
    economy.technology(tech)?;
    let price = state
        .price(tech)
        .ok_or_else(|| Error::MissingPrice(tech.to_string()))?;
    let expenditure = price * state.output(tech);
    let total = gdp(economy, state)?;
    let marginal_share = expenditure / total;
    Ok(HultenReport {
        tech: tech.clone(),
        expenditure,
        gdp: total,
        marginal_share,
        extrapolated_loss: shock_size * marginal_share,
    })
}

/// Exact long-run re-equilibration after a total-factor-productivity shock.
///
/// Restricted to the solvable class: a single country, each good produced
/// by exactly one active technology, and demand closed by expenditure
/// shares (or a unique final good). The shock multiplies output per unit
/// of inputs by `lambda`; labor reallocates freely; GDP is reported as
/// post-shock final quantities valued at pre-shock prices.
pub fn long_run_reequilibrate(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
) -> Result<DisruptionOutcome> {
    shock.check_against(state)?;
    if shock.lambda == 1.0 || shock.shocked.is_empty() {
        return Ok(DisruptionOutcome {
            flows: state.clone(),
            lost_gdp_total: 0.0,
            lost_gdp_by_country: BTreeMap::new(),
            idle_labor: BTreeMap::new(),
        });
    }
    if shock.lambda <= 0.0 || shock.lambda.is_nan() {
        return Err(Error::Infeasible("lambda must be positive".into()));
    }
    if economy.countries().len() != 1 {
        return Err(Error::UnsupportedEconomy(
            "long-run solver requires a single country".into(),
        ));
    }
    let country = &economy.countries()[0];

    // Unique active producer per produced good.
    let mut producer: BTreeMap<&GoodId, &TechId> = BTreeMap::new();
    for tech in economy.technologies() {
        if !state.is_active(&tech.id) {
            continue;
        }
        if let Some(prev) = producer.insert(&tech.output, &tech.id) {
            return Err(Error::UnsupportedEconomy(format!(
                "good {} has multiple active producers ({prev}, {})",
                tech.output, tech.id
            )));
        }
    }
    for tech in economy.technologies() {
        if !state.is_active(&tech.id) {
            continue;
        }
        for g in tech.inputs.keys() {
            if !producer.contains_key(g) {
                return Err(Error::UnsupportedEconomy(format!(
                    "input good {g} of {} has no active producer",
                    tech.id
                )));
            }
        }
    }

    // Demand shares: explicit, or the unique final good.
    let shares: BTreeMap<GoodId, f64> = match economy.demand_shares() {
        Some(s) => s.clone(),
        None => {
            let finals: Vec<&GoodId> = economy
                .goods()
                .iter()
                .filter(|g| g.kind == GoodKind::Final)
                .map(|g| &g.id)
                .collect();
            if finals.len() != 1 {
                return Err(Error::UnsupportedEconomy(
                    "multiple final goods need demand_shares".into(),
                ));
            }
            BTreeMap::from([(finals[0].clone(), 1.0)])
        }
    };

    let goods: Vec<&GoodId> = producer.keys().copied().collect();
    let gidx: BTreeMap<&GoodId, usize> = goods.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let n = goods.len();
    let tfp = |tid: &TechId| -> f64 {
        if shock.shocked.contains(tid) {
            shock.lambda
        } else {
            1.0
        }
    };

    // Shipped-unit requirements: a_hat[g'][g] units of g' shipped per unit
    // of g produced; labor per unit of g in shipped units.
    let mut a_hat = vec![vec![0.0; n]; n];
    let mut labor_unit = vec![0.0; n];
    for (g, tid) in &producer {
        let col = gidx[*g];
        let tech = economy.technology(tid)?;
        let scale = 1.0 / tfp(tid);
        for (g_in, qty) in &tech.inputs {
            let src = producer[g_in];
            let theta = economy.transport().good_cost(src, tid);
            a_hat[gidx[g_in]][col] += theta * qty * scale;
        }
        let theta_l = economy.transport().labor_cost(&country.id, tid);
        labor_unit[col] = theta_l * tech.labor_input * scale;
    }

    // Labor content per delivered unit: v = labor_unit + A^T v.
    let mut system = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            system[i][j] = (i == j) as u8 as f64 - a_hat[j][i];
        }
    }
    let v = linalg::solve(system, labor_unit.clone()).ok_or_else(|| {
        Error::Infeasible("unit-requirement system is singular after the shock".into())
    })?;
    if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::Infeasible(
            "post-shock labor content is not positive; spectral radius at or above 1".into(),
        ));
    }

    // New zero-profit prices keep the pre-shock wage as numeraire.
    let wage = state.wage(&country.id);
    let new_price: Vec<f64> = v.iter().map(|vi| wage * vi).collect();

    // Consumption from expenditure shares against new prices; labor income
    // is unchanged because the endowment is fully employed.
    let income = wage * country.labor_endowment;
    let mut final_demand = vec![0.0; n];
    for (g, s) in &shares {
        let idx = *gidx.get(g).ok_or_else(|| {
            Error::UnsupportedEconomy(format!("final good {g} not produced in this state"))
        })?;
        final_demand[idx] = s * income / new_price[idx];
    }

    // Gross outputs: y = A_hat y + d.
    let mut system = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            system[i][j] = (i == j) as u8 as f64 - a_hat[i][j];
        }
    }
    let y = linalg::solve(system, final_demand.clone())
        .ok_or_else(|| Error::Infeasible("output system is singular after the shock".into()))?;
    if y.iter().any(|x| !x.is_finite() || *x < -1e-9) {
        return Err(Error::Infeasible("negative gross output".into()));
    }

    // Assemble the new state.
    let mut good_flows = BTreeMap::new();
    let mut labor_flows = BTreeMap::new();
    let mut outputs = BTreeMap::new();
    let mut prices = BTreeMap::new();
    for (g, tid) in &producer {
        let col = gidx[*g];
        outputs.insert((*tid).clone(), y[col]);
        prices.insert((*tid).clone(), new_price[col]);
        let tech = economy.technology(tid)?;
        let scale = 1.0 / tfp(tid);
        for (g_in, qty) in &tech.inputs {
            let src = producer[g_in];
            let theta = economy.transport().good_cost(src, tid);
            let flow = theta * qty * scale * y[col];
            if flow != 0.0 {
                *good_flows.entry((src.clone(), (*tid).clone())).or_insert(0.0) += flow;
            }
        }
        let theta_l = economy.transport().labor_cost(&country.id, tid);
        labor_flows.insert(
            (country.id.clone(), (*tid).clone()),
            theta_l * tech.labor_input * scale * y[col],
        );
    }
    // Inactive technologies stay at zero output.
    for tech in economy.technologies() {
        outputs.entry(tech.id.clone()).or_insert(0.0);
        if let Some(p) = state.price(&tech.id) {
            prices.entry(tech.id.clone()).or_insert(p);
        }
    }
    let wages = BTreeMap::from([(country.id.clone(), wage)]);
    let flows = FlowState::new(good_flows, labor_flows, outputs, prices, wages)?;

    let total_labor: f64 = flows.labor_flows.values().sum();
    if (total_labor - country.labor_endowment).abs() > 1e-6 * country.labor_endowment.max(1.0) {
        return Err(Error::Infeasible(format!(
            "labor does not clear after re-equilibration ({total_labor} vs {})",
            country.labor_endowment
        )));
    }

    // Real GDP loss: post-shock final quantities at pre-shock prices.
    let mut lost = 0.0;
    for tech in economy.technologies() {
        if !economy.produces_final(tech) {
            continue;
        }
        let before = state.output(&tech.id);
        if before <= 0.0 {
            continue;
        }
        let p = state
            .price(&tech.id)
            .ok_or_else(|| Error::MissingPrice(tech.id.to_string()))?;
        lost += p * (before - flows.output(&tech.id));
    }
    Ok(DisruptionOutcome {
        flows,
        lost_gdp_total: lost,
        lost_gdp_by_country: BTreeMap::from([(country.id.clone(), lost)]),
        // Labor reallocates in the long run; nothing sits idle.
        idle_labor: BTreeMap::from([(country.id.clone(), 0.0)]),
    })
}

/// Real GDP after a long-run re-equilibration, at pre-shock prices.
pub fn long_run_gdp(economy: &Economy, state: &FlowState, shock: &ShockSpec) -> Result<f64> {
    let pre = gdp(economy, state)?;
    let outcome = long_run_reequilibrate(economy, state, shock)?;
    Ok(pre - outcome.lost_gdp_total)
}

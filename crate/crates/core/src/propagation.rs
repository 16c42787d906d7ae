//! Short-run analysis: the shock propagation sweep to its fixed point, the
//! exact minimum-disruption oracle, the affected-final upper bound, and the
//! two tightness condition checkers.
//!
//! The sweep is double-buffered: each iteration reads only the previous
//! iteration's outputs, so a sweep may be evaluated in parallel across
//! technologies without changing the result.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::FlowGraph;
use crate::model::{gdp, DisruptionOutcome, Economy, FlowState, ShockSpec, TechId};
use crate::validate::{validate_equilibrium, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, Copy)]
pub struct PropagationConfig {
    /// Convergence threshold on the largest per-technology output change
    /// in one sweep.
    pub delta: f64,
    pub max_sweeps: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        // The cyclic fixtures contract geometrically and reach 1e-12 in
        // well under the sweep budget.
        PropagationConfig {
            delta: 1e-12,
            max_sweeps: 10_000,
        }
    }
}

/// Per-technology output fractions relative to the pre-shock state. The
/// sweep operates on these; flows scale with their producer's fraction.
pub type OutputFractions = BTreeMap<TechId, f64>;

/// Retained caps: `lambda` on shocked technologies, 1 elsewhere. Positive
/// shocks (`lambda > 1`) raise the cap; intermediate surpluses are then
/// discarded by [`scaled_state`].
fn caps(state: &FlowState, shock: &ShockSpec) -> OutputFractions {
    state
        .outputs
        .keys()
        .map(|t| {
            let cap = if shock.shocked.contains(t) {
                shock.lambda
            } else {
                1.0
            };
            (t.clone(), cap)
        })
        .collect()
}

/// One sweep of the shock propagation algorithm: every technology's new
/// fraction is its cap bounded by the worst per-good inflow ratio, where
/// inflows aggregate across all suppliers of that good and scale with the
/// previous sweep's fractions.
pub fn sweep(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
    prev: &OutputFractions,
) -> OutputFractions {
    let mut next = OutputFractions::new();
    for (tech_id, y) in &state.outputs {
        if *y <= 0.0 {
            next.insert(tech_id.clone(), 1.0);
            continue;
        }
        let cap = if shock.shocked.contains(tech_id) {
            shock.lambda
        } else {
            1.0
        };
        let mut ratio = 1.0f64;
        let tech = economy
            .technology(tech_id)
            .expect("state checked against economy");
        for good in tech.inputs.keys() {
            let mut base = 0.0;
            let mut now = 0.0;
            for src in economy.producers_of(good) {
                let x = state.flow(src, tech_id);
                if x > 0.0 {
                    base += x;
                    // A supplier's outflow never rises above its original
                    // level even under a positive shock.
                    now += x * prev.get(src).copied().unwrap_or(1.0).min(1.0);
                }
            }
            if base > 0.0 {
                ratio = ratio.min(now / base);
            }
        }
        // A negative shock caps output alongside the input constraints; a
        // positive shock multiplies what the available inputs support.
        let frac = if cap <= 1.0 {
            cap.min(ratio)
        } else {
            cap * ratio
        };
        next.insert(tech_id.clone(), frac);
    }
    next
}

/// Rescale a state by per-technology output fractions: outputs, outflows,
/// and labor utilization all scale with their technology's fraction.
/// Fractions above 1 raise the producer's output but not its shipments.
fn scaled_state(state: &FlowState, fractions: &OutputFractions) -> FlowState {
    let mut out = state.clone();
    for (t, y) in &mut out.outputs {
        *y = state.output(t) * fractions.get(t).copied().unwrap_or(1.0);
    }
    for ((from, _), x) in &mut out.good_flows {
        *x *= fractions.get(from).copied().unwrap_or(1.0).min(1.0);
    }
    for ((_, to), x) in &mut out.labor_flows {
        let f = fractions.get(to).copied().unwrap_or(1.0);
        // Labor stays attached to its technology; utilization follows
        // output up to the original level.
        *x *= f.min(1.0);
    }
    out
}

fn disruption_outcome(
    economy: &Economy,
    state: &FlowState,
    fractions: &OutputFractions,
) -> Result<DisruptionOutcome> {
    let flows = scaled_state(state, fractions);
    let mut lost = 0.0;
    for t in economy.technologies() {
        if economy.produces_final(t) && state.output(&t.id) > 0.0 {
            let p = state
                .price(&t.id)
                .ok_or_else(|| Error::MissingPrice(t.id.to_string()))?;
            lost += p * (state.output(&t.id) - flows.output(&t.id));
        }
    }
    let mut idle: BTreeMap<crate::model::CountryId, f64> = BTreeMap::new();
    for ((n, t), x) in &state.labor_flows {
        let f = fractions.get(t).copied().unwrap_or(1.0).min(1.0);
        *idle.entry(n.clone()).or_insert(0.0) += x * (1.0 - f);
    }
    let lost_by_country = idle
        .iter()
        .map(|(n, l)| (n.clone(), l * state.wage(n)))
        .collect();
    Ok(DisruptionOutcome {
        flows,
        lost_gdp_total: lost,
        lost_gdp_by_country: lost_by_country,
        idle_labor: idle,
    })
}

/// Run the shock propagation algorithm to its fixed point. The input must
/// be a validated equilibrium; labor is not reallocated, so idle labor is
/// reported per country.
pub fn propagate(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
    config: &PropagationConfig,
) -> Result<DisruptionOutcome> {
    let report = validate_equilibrium(economy, state, DEFAULT_TOLERANCE)?;
    if !report.is_empty() {
        return Err(Error::NotEquilibrium(report[0].to_string()));
    }
    shock.check_against(state)?;
    if config.max_sweeps == 0 {
        return Err(Error::Invariant("max_sweeps must be at least 1".into()));
    }

    let fractions = run_sweeps(economy, state, shock, config)?;
    disruption_outcome(economy, state, &fractions)
}

/// The raw fixed-point iteration, exposed for monotonicity tests.
pub fn run_sweeps(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
    config: &PropagationConfig,
) -> Result<OutputFractions> {
    let mut current = caps(state, shock);
    let mut residual = f64::INFINITY;
    for _ in 0..config.max_sweeps {
        let next = sweep(economy, state, shock, &current);
        residual = current
            .iter()
            .map(|(t, f)| ((f - next[t]) * state.output(t)).abs())
            .fold(0.0, f64::max);
        let stationary = current.iter().all(|(t, f)| *f == next[t]);
        current = next;
        if stationary || residual <= config.delta {
            return Ok(current);
        }
    }
    Err(Error::NonConvergence { residual })
}

// ---------------------------------------------------------------------------
// Minimum disruption oracle (exact rational arithmetic)
// ---------------------------------------------------------------------------

/// Solve the minimum disruption problem exactly: iterate the monotone
/// constraint map from the all-caps corner until the set of binding
/// constraints stabilizes, then solve the induced linear system in rational
/// arithmetic and verify the result is the greatest fixed point.
///
/// This is a verification oracle for desk-scale networks; it is independent
/// of the floating-point sweep in [`propagate`].
pub fn minimum_disruption_oracle(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
) -> Result<DisruptionOutcome> {
    const MAX_TECHS: usize = 24;
    let active: Vec<TechId> = state.active_techs();
    if active.len() > MAX_TECHS {
        return Err(Error::TooLarge(format!(
            "oracle is limited to {MAX_TECHS} active technologies, got {}",
            active.len()
        )));
    }
    shock.check_against(state)?;

    let rat = |x: f64| BigRational::from_float(x).expect("finite flow");
    let lambda = rat(shock.lambda);
    let one = BigRational::one();

    let index: BTreeMap<&TechId, usize> = active.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut nodes = Vec::with_capacity(active.len());
    for t in &active {
        let tech = economy.technology(t)?;
        let cap = if shock.shocked.contains(t) {
            lambda.clone().min(one.clone())
        } else {
            one.clone()
        };
        let mut pools = Vec::new();
        let mut weights = Vec::new();
        for good in tech.inputs.keys() {
            let mut suppliers = Vec::new();
            let mut flows = Vec::new();
            let mut total = BigRational::zero();
            for src in economy.producers_of(good) {
                let x = state.flow(src, t);
                if x > 0.0 {
                    if let Some(&i) = index.get(src) {
                        suppliers.push(i);
                        let xr = rat(x);
                        total += &xr;
                        flows.push(xr);
                    }
                }
            }
            if !suppliers.is_empty() {
                let w = flows.iter().map(|x| x / &total).collect();
                pools.push(suppliers);
                weights.push(w);
            }
        }
        nodes.push(OracleNode {
            cap,
            pools,
            weights,
        });
    }

    // The monotone map: F(a)_t = min(cap_t, min over pools of the weighted
    // average of supplier fractions).
    let apply = |a: &[BigRational]| -> Vec<BigRational> {
        nodes
            .iter()
            .map(|n| {
                let mut v = n.cap.clone();
                for (pool_idx, suppliers) in n.pools.iter().enumerate() {
                    let ratio = n.pool_ratio(pool_idx, suppliers, a);
                    if ratio < v {
                        v = ratio;
                    }
                }
                v
            })
            .collect()
    };

    // Which constraint binds at `a` for each tech: None = cap, Some(p) =
    // pool p.
    let binding = |a: &[BigRational]| -> Vec<Option<usize>> {
        nodes
            .iter()
            .map(|n| {
                let mut best: Option<usize> = None;
                let mut best_val = n.cap.clone();
                for (pool_idx, suppliers) in n.pools.iter().enumerate() {
                    let ratio = n.pool_ratio(pool_idx, suppliers, a);
                    if ratio < best_val {
                        best_val = ratio;
                        best = Some(pool_idx);
                    }
                }
                best
            })
            .collect()
    };

    let mut a: Vec<BigRational> = nodes.iter().map(|n| n.cap.clone()).collect();
    let mut pattern = binding(&a);
    let mut solution = None;
    // Kleene iteration with periodic pattern solves. On an acyclic network
    // the iteration itself terminates; cycles stabilize their binding
    // pattern after finitely many sweeps even though the values only
    // converge in the limit.
    for round in 0..10_000 {
        let next = apply(&a);
        if next == a {
            solution = Some(a);
            break;
        }
        let next_pattern = binding(&next);
        if round > 0 && next_pattern == pattern {
            if let Some(fixed) = solve_pattern(&nodes, &next_pattern) {
                // Accept only a genuine fixed point that the iteration has
                // not already passed below.
                if apply(&fixed) == fixed && fixed.iter().zip(&next).all(|(f, n)| f <= n) {
                    solution = Some(fixed);
                    break;
                }
            }
        }
        pattern = next_pattern;
        a = next;
    }
    let a = solution.ok_or(Error::NonConvergence { residual: f64::NAN })?;

    let mut fractions = OutputFractions::new();
    for (t, v) in state.outputs.keys().map(|t| {
        let f = index
            .get(t)
            .map(|&i| a[i].to_f64().unwrap_or(0.0))
            .unwrap_or(1.0);
        (t.clone(), f)
    }) {
        fractions.insert(t, v);
    }
    disruption_outcome(economy, state, &fractions)
}

/// Per-technology constraint data for the oracle, in rational space. Each
/// pool is one input good's supplier list with matching flow weights.
struct OracleNode {
    cap: BigRational,
    pools: Vec<Vec<usize>>,
    weights: Vec<Vec<BigRational>>,
}

impl OracleNode {
    fn pool_ratio(&self, pool_idx: usize, suppliers: &[usize], a: &[BigRational]) -> BigRational {
        let mut ratio = BigRational::zero();
        for (k, &s) in suppliers.iter().enumerate() {
            ratio += &self.weights[pool_idx][k] * &a[s];
        }
        ratio
    }
}

/// Solve `a = M a + c` for the linear system induced by a binding pattern:
/// cap-bound techs are constants, pool-bound techs equal the weighted
/// average of their binding pool's suppliers. Gaussian elimination over
/// rationals; returns None when singular.
#[allow(clippy::needless_range_loop)]
fn solve_pattern(nodes: &[OracleNode], pattern: &[Option<usize>]) -> Option<Vec<BigRational>> {
    let n = nodes.len();
    // Build (I - M) a = c.
    let mut m = vec![vec![BigRational::zero(); n]; n];
    let mut c = vec![BigRational::zero(); n];
    for i in 0..n {
        m[i][i] = BigRational::one();
        match pattern[i] {
            None => c[i] = nodes[i].cap.clone(),
            Some(p) => {
                for (k, &s) in nodes[i].pools[p].iter().enumerate() {
                    let w = nodes[i].weights[p][k].clone();
                    m[i][s] -= w;
                }
            }
        }
    }
    // Elimination with exact pivots.
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot_row);
        c.swap(col, pivot_row);
        let pivot = m[col][col].clone();
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = &m[r][col] / &pivot;
                for k in col..n {
                    let delta = &factor * &m[col][k];
                    m[r][k] -= delta;
                }
                let delta = &factor * &c[col];
                c[r] -= delta;
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if m[i][i].is_zero() {
            return None;
        }
        let v = &c[i] / &m[i][i];
        if v.is_negative() {
            return None;
        }
        out.push(v);
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Bound and tightness checks
// ---------------------------------------------------------------------------

/// The affected-final upper bound of the short-run loss and whether the
/// realized loss attains it.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub affected_finals: BTreeSet<TechId>,
    pub bound_fraction: f64,
    pub actual_fraction: f64,
    pub tight: bool,
}

pub const TIGHTNESS_TOLERANCE: f64 = 1e-6;

/// Final-good technologies downstream of any shocked technology along
/// positive flows, shocked finals included.
pub fn affected_finals(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
) -> BTreeSet<TechId> {
    let graph = FlowGraph::from_state(state);
    let reach = graph.descendants(&shock.shocked);
    reach
        .into_iter()
        .filter(|t| {
            economy
                .technology(t)
                .map(|tech| economy.produces_final(tech) && state.is_active(t))
                .unwrap_or(false)
        })
        .collect()
}

/// Compute the affected-final bound `(1-lambda) * value(affected finals) / GDP`
/// together with the realized loss fraction from the propagation fixed point.
pub fn shock_bound(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
) -> Result<BoundReport> {
    let finals = affected_finals(economy, state, shock);
    let total_gdp = gdp(economy, state)?;
    let mut affected_value = 0.0;
    for t in &finals {
        let p = state
            .price(t)
            .ok_or_else(|| Error::MissingPrice(t.to_string()))?;
        affected_value += p * state.output(t);
    }
    let bound_fraction = (1.0 - shock.lambda) * affected_value / total_gdp;
    let outcome = propagate(economy, state, shock, &PropagationConfig::default())?;
    let actual_fraction = outcome.lost_gdp_total / total_gdp;
    Ok(BoundReport {
        affected_finals: finals,
        bound_fraction,
        actual_fraction,
        tight: (bound_fraction - actual_fraction).abs() <= TIGHTNESS_TOLERANCE,
    })
}

/// Certificate for the cut-set condition: either the check holds, or a
/// witness explains why not.
#[derive(Debug, Clone, Serialize)]
pub enum CutCertificate {
    Holds,
    /// The disrupted-industries sub-network contains this directed cycle.
    Cycle(Vec<TechId>),
    /// A path from the no-in-link set to an affected final that survives
    /// removal of all edges adjacent to the shocked set.
    SurvivingPath(Vec<TechId>),
}

/// Check the acyclic cut-set condition under which the bound binds: the
/// disrupted-industries sub-network is acyclic and the edges adjacent to
/// the shocked technologies form a cut between its root set and the
/// affected finals.
pub fn check_cut_condition(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
) -> Result<(bool, CutCertificate)> {
    let finals = affected_finals(economy, state, shock);
    if finals.is_empty() {
        return Ok((true, CutCertificate::Holds));
    }
    let graph = FlowGraph::from_state(state);
    // All technologies on a directed path terminating at an affected final.
    let sub: BTreeSet<TechId> = graph.ancestors(&finals);
    let order = match graph.topo_order(Some(&sub)) {
        Ok(o) => o,
        Err(cycle) => return Ok((false, CutCertificate::Cycle(cycle))),
    };
    let _ = order;
    // Roots: no in-links within the sub-network.
    let roots: BTreeSet<TechId> = sub
        .iter()
        .filter(|t| {
            graph
                .predecessors(t)
                .iter()
                .all(|p| !sub.contains(p))
        })
        .cloned()
        .collect();
    // Delete edges adjacent to shocked technologies and test reachability.
    let blocked = &shock.shocked;
    let mut stack: Vec<TechId> = roots
        .iter()
        .filter(|t| !blocked.contains(*t))
        .cloned()
        .collect();
    let mut parent: BTreeMap<TechId, Option<TechId>> =
        stack.iter().map(|t| (t.clone(), None)).collect();
    while let Some(t) = stack.pop() {
        if finals.contains(&t) {
            // Rebuild the surviving path for the certificate.
            let mut path = vec![t.clone()];
            let mut cur = t;
            while let Some(Some(p)) = parent.get(&cur).cloned() {
                path.push(p.clone());
                cur = p;
            }
            path.reverse();
            return Ok((false, CutCertificate::SurvivingPath(path)));
        }
        for s in graph.successors(&t) {
            if !sub.contains(s) || blocked.contains(s) || blocked.contains(&t) {
                continue;
            }
            if !parent.contains_key(s) {
                parent.insert(s.clone(), Some(t.clone()));
                stack.push(s.clone());
            }
        }
    }
    Ok((true, CutCertificate::Holds))
}

/// True when (a) all active producers of each good use the same input-good
/// set, and (b) every shocked technology's output good has all of its
/// active producers shocked.
pub fn check_industry_shock_condition(
    economy: &Economy,
    state: &FlowState,
    shock: &ShockSpec,
) -> Result<bool> {
    // (a) no technological diversity among active producers.
    let mut input_sets: BTreeMap<&crate::model::GoodId, BTreeSet<&crate::model::GoodId>> =
        BTreeMap::new();
    for tech in economy.technologies() {
        if !state.is_active(&tech.id) {
            continue;
        }
        let set: BTreeSet<&crate::model::GoodId> = tech.inputs.keys().collect();
        match input_sets.get(&tech.output) {
            None => {
                input_sets.insert(&tech.output, set);
            }
            Some(existing) => {
                if existing != &set {
                    return Ok(false);
                }
            }
        }
    }
    // (b) industry-wide shocks.
    for t in &shock.shocked {
        let tech = economy.technology(t)?;
        for producer in economy.producers_of(&tech.output) {
            if state.is_active(producer) && !shock.shocked.contains(producer) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------

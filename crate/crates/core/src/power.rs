//! Country-over-country power: consistent individual-technology disruptions
//! with aggressor discretion, the bilateral power maximization, the
//! disruption possibility frontier with flow zero-outs, and strategic power
//! where the target routes its own rationing.
//!
//! A disruption runs in two passes over the acyclic flow network. The
//! downstream pass propagates supply shortfalls in topological order; the
//! upstream pass walks back from the final goods trimming inputs that are
//! no longer used. Aggressor technologies route their cuts at will; the
//! target rations proportionally (or, in the strategic variant, routes at
//! will too); technologies of uninvolved countries idle the demand they
//! lose but hold on to their own input contracts, so bilateral accounting
//! does not leak through third parties.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::FlowGraph;
use crate::model::{CountryId, DisruptionOutcome, Economy, FlowState, GoodId, TechId};

// ---------------------------------------------------------------------------
// Routing
// ---------------------------------------------------------------------------

/// How a country with discretion allocates cuts: per technology, weights
/// over customer flows receiving the downstream cut; per (technology,
/// input good), weights over supplier flows absorbing the upstream cut.
/// Unlisted nodes ration proportionally. Each weight list must sum to 1
/// over currently positive flows.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RoutingStrategy {
    pub downstream: BTreeMap<TechId, Vec<(TechId, f64)>>,
    #[serde(serialize_with = "serialize_upstream")]
    pub upstream: BTreeMap<(TechId, GoodId), Vec<(TechId, f64)>>,
}

fn serialize_upstream<S: serde::Serializer>(
    upstream: &BTreeMap<(TechId, GoodId), Vec<(TechId, f64)>>,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        tech: &'a TechId,
        good: &'a GoodId,
        weights: &'a [(TechId, f64)],
    }
    let entries: Vec<Entry> = upstream
        .iter()
        .map(|((t, g), w)| Entry {
            tech: t,
            good: g,
            weights: w,
        })
        .collect();
    entries.serialize(serializer)
}

impl RoutingStrategy {
    pub fn proportional() -> Self {
        Self::default()
    }

    /// Route a technology's whole downstream cut into one customer flow.
    pub fn route_downstream(mut self, tech: impl Into<TechId>, to: impl Into<TechId>) -> Self {
        self.downstream
            .insert(tech.into(), vec![(to.into(), 1.0)]);
        self
    }

    /// Route a technology's whole upstream cut of one good onto one supplier.
    pub fn route_upstream(
        mut self,
        tech: impl Into<TechId>,
        good: impl Into<GoodId>,
        supplier: impl Into<TechId>,
    ) -> Self {
        self.upstream
            .insert((tech.into(), good.into()), vec![(supplier.into(), 1.0)]);
        self
    }
}

/// Scope of the upstream demand cascade.
#[derive(Debug, Clone, Copy)]
pub enum Cascade<'a> {
    /// Demand cuts propagate through every country's suppliers.
    Full,
    /// Demand cuts propagate through aggressor and target technologies;
    /// third-country technologies absorb them without cutting suppliers.
    Bilateral(&'a CountryId),
}

struct DisruptionSpec<'a> {
    aggressor: &'a CountryId,
    init: &'a TechId,
    /// Units of the initial technology's current output to cut.
    cut: f64,
    routing: &'a RoutingStrategy,
    /// When set, this country routes its own cuts instead of rationing
    /// proportionally (the strategic variant).
    target_routing: Option<(&'a CountryId, &'a RoutingStrategy)>,
    cascade: Cascade<'a>,
    /// Weights for proportional rationing. Partial disruptions compose
    /// order-independently because everyone rations against this state;
    /// it only advances past a flow zero-out.
    baseline: &'a FlowState,
}

// ---------------------------------------------------------------------------
// The two-pass engine
// ---------------------------------------------------------------------------

const FLOW_EPS: f64 = 1e-9;

fn country_of<'a>(economy: &'a Economy, tech: &TechId) -> &'a CountryId {
    &economy
        .technology(tech)
        .expect("tech resolved during setup")
        .country
}

/// Apply one consistent individual-technology disruption to `current`,
/// returning the new flow state. Output cuts, flow cuts, and labor all
/// ration against `current`.
fn apply_disruption(
    economy: &Economy,
    current: &FlowState,
    spec: &DisruptionSpec<'_>,
) -> Result<FlowState> {
    let graph = FlowGraph::from_state(current);
    let order = graph
        .topo_order(None)
        .map_err(|cycle| Error::CyclicNetwork(join_path(&cycle)))?;

    let init_tech = economy.technology(spec.init)?;
    if &init_tech.country != spec.aggressor {
        return Err(Error::ForeignTech(
            spec.init.to_string(),
            spec.aggressor.to_string(),
        ));
    }
    let y_init = current.output(spec.init);
    if y_init <= 0.0 {
        return Err(Error::InactiveTech(spec.init.to_string()));
    }
    if spec.cut < 0.0 || spec.cut > y_init * (1.0 + 1e-12) {
        return Err(Error::NotPartial(format!(
            "cut {} exceeds output {y_init} of {}",
            spec.cut, spec.init
        )));
    }

    let routes_for = |tech: &TechId| -> Option<&RoutingStrategy> {
        let c = country_of(economy, tech);
        if c == spec.aggressor {
            Some(spec.routing)
        } else if let Some((target, strategy)) = spec.target_routing {
            (c == target).then_some(strategy)
        } else {
            None
        }
    };

    // --- Downstream pass -------------------------------------------------
    let mut flow_cut: BTreeMap<(TechId, TechId), f64> = BTreeMap::new();
    let mut out_cut: BTreeMap<TechId, f64> = BTreeMap::new();

    for tech_id in &order {
        let y = current.output(tech_id);
        if y <= 0.0 {
            continue;
        }
        let tech = economy.technology(tech_id)?;
        // Shortfall-driven cut: worst per-good inflow loss so far.
        let mut shortfall = 0.0f64;
        for good in tech.inputs.keys() {
            let mut pool = 0.0;
            let mut pool_cut = 0.0;
            for src in economy.producers_of(good) {
                let x = current.flow(src, tech_id);
                if x > 0.0 {
                    pool += x;
                    pool_cut += flow_cut
                        .get(&(src.clone(), tech_id.clone()))
                        .copied()
                        .unwrap_or(0.0);
                }
            }
            if pool > 0.0 {
                shortfall = shortfall.max(y * pool_cut / pool);
            }
        }
        let mut cut = shortfall;
        if tech_id == spec.init {
            cut = cut.max(spec.cut);
        }
        if cut <= 0.0 {
            continue;
        }
        out_cut.insert(tech_id.clone(), cut);

        // Allocate the cut over customer flows.
        let customers: Vec<(TechId, f64)> = graph
            .successors(tech_id)
            .iter()
            .map(|s| (s.clone(), current.flow(tech_id, s)))
            .filter(|(_, x)| *x > 0.0)
            .collect();
        if customers.is_empty() {
            continue;
        }
        let routed = routes_for(tech_id)
            .and_then(|r| r.downstream.get(tech_id))
            .cloned();
        match routed {
            Some(weights) => {
                check_weights(&weights, &customers, tech_id)?;
                for (to, w) in weights {
                    add_flow_cut(
                        &mut flow_cut,
                        current,
                        tech_id,
                        &to,
                        w * cut,
                    )?;
                }
            }
            None => {
                // Proportional rationing against the baseline weights.
                let mut weights: Vec<(TechId, f64)> = customers
                    .iter()
                    .map(|(to, x)| {
                        let b = spec.baseline.flow(tech_id, to);
                        (to.clone(), if b > 0.0 { b } else { *x })
                    })
                    .collect();
                let total: f64 = weights.iter().map(|(_, w)| w).sum();
                for (to, w) in weights.drain(..) {
                    add_flow_cut(&mut flow_cut, current, tech_id, &to, cut * w / total)?;
                }
            }
        }
    }

    // --- Upstream pass ----------------------------------------------------
    let mut total_cut: BTreeMap<TechId, f64> = BTreeMap::new();
    for tech_id in order.iter().rev() {
        let y = current.output(tech_id);
        if y <= 0.0 {
            continue;
        }
        let tech = economy.technology(tech_id)?;
        let produced_cut = out_cut.get(tech_id).copied().unwrap_or(0.0);
        // Post-pass sales: customers processed already trimmed these flows.
        let sales_cut: f64 = graph
            .successors(tech_id)
            .iter()
            .map(|s| {
                flow_cut
                    .get(&(tech_id.clone(), s.clone()))
                    .copied()
                    .unwrap_or(0.0)
            })
            .sum();
        let is_final = economy.produces_final(tech);
        let y_cut = if is_final {
            produced_cut
        } else {
            produced_cut.max(sales_cut)
        };
        if y_cut <= 0.0 {
            continue;
        }
        total_cut.insert(tech_id.clone(), y_cut);

        // How far this technology trims its own inputs: third countries
        // keep their contracts beyond the production they already lost.
        let country = country_of(economy, tech_id);
        let involved = match spec.cascade {
            Cascade::Full => true,
            Cascade::Bilateral(target) => country == spec.aggressor || country == target,
        };
        let trim_cut = if involved { y_cut } else { produced_cut };
        if trim_cut <= 0.0 {
            continue;
        }
        let y_trimmed = y - trim_cut;
        for (good, qty) in &tech.inputs {
            let mut pool_received = 0.0;
            let mut suppliers: Vec<(TechId, f64, f64)> = Vec::new(); // (id, flow_left, theta)
            for src in economy.producers_of(good) {
                let x = current.flow(src, tech_id);
                if x > 0.0 {
                    let cut_so_far = flow_cut
                        .get(&(src.clone(), tech_id.clone()))
                        .copied()
                        .unwrap_or(0.0);
                    let left = x - cut_so_far;
                    let theta = economy.transport().good_cost(src, tech_id);
                    pool_received += left / theta;
                    suppliers.push((src.clone(), left, theta));
                }
            }
            let needed = qty * y_trimmed;
            let excess = pool_received - needed;
            if excess <= FLOW_EPS * pool_received.max(1.0) {
                continue;
            }
            let routed = routes_for(tech_id)
                .and_then(|r| r.upstream.get(&(tech_id.clone(), good.clone())))
                .cloned();
            match routed {
                Some(weights) => {
                    for (src, w) in weights {
                        let entry = suppliers.iter().find(|(s, _, _)| *s == src).ok_or_else(
                            || {
                                Error::Invariant(format!(
                                    "upstream routing of {tech_id} names {src}, which ships nothing"
                                ))
                            },
                        )?;
                        let cut_shipped = w * excess * entry.2;
                        add_flow_cut(&mut flow_cut, current, &src, tech_id, cut_shipped)?;
                    }
                }
                None => {
                    // Proportional against the baseline sourcing mix.
                    let weights: Vec<f64> = suppliers
                        .iter()
                        .map(|(src, left, theta)| {
                            let b = spec.baseline.flow(src, tech_id);
                            if b > 0.0 {
                                b / theta
                            } else {
                                left / theta
                            }
                        })
                        .collect();
                    let total: f64 = weights.iter().sum();
                    if total > 0.0 {
                        for ((src, _, theta), w) in suppliers.iter().zip(&weights) {
                            let received_cut = excess * w / total;
                            add_flow_cut(
                                &mut flow_cut,
                                current,
                                src,
                                tech_id,
                                received_cut * theta,
                            )?;
                        }
                    }
                }
            }
        }
    }

    // --- Assemble the new state -------------------------------------------
    let mut next = current.clone();
    for ((from, to), cut) in &flow_cut {
        let x = next
            .good_flows
            .get_mut(&(from.clone(), to.clone()))
            .expect("cut flows exist");
        *x -= cut;
        if *x < 0.0 {
            if *x > -FLOW_EPS * (1.0 + cut.abs()) {
                *x = 0.0;
            } else {
                return Err(Error::NotPartial(format!(
                    "flow {from}->{to} driven below zero"
                )));
            }
        }
    }
    for (tech_id, cut) in &total_cut {
        let y = current.output(tech_id);
        let y_new = (y - cut).max(0.0);
        next.outputs.insert(tech_id.clone(), y_new);
        let ratio = if y > 0.0 { y_new / y } else { 0.0 };
        for ((n, t), v) in next.labor_flows.iter_mut() {
            if t == tech_id {
                let _ = n;
                *v = current.labor_flow(n, t) * ratio;
            }
        }
    }
    Ok(next)
}

fn join_path(path: &[TechId]) -> String {
    path.iter()
        .map(|t| t.as_str())
        .collect::<Vec<_>>()
        .join(" -> ")
}

fn check_weights(
    weights: &[(TechId, f64)],
    customers: &[(TechId, f64)],
    tech: &TechId,
) -> Result<()> {
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Invariant(format!(
            "routing weights of {tech} sum to {total}"
        )));
    }
    for (to, w) in weights {
        if *w < 0.0 {
            return Err(Error::Invariant(format!("negative routing weight at {tech}")));
        }
        if *w > 0.0 && !customers.iter().any(|(c, _)| c == to) {
            return Err(Error::Invariant(format!(
                "routing of {tech} targets {to}, which receives no flow"
            )));
        }
    }
    Ok(())
}

fn add_flow_cut(
    flow_cut: &mut BTreeMap<(TechId, TechId), f64>,
    current: &FlowState,
    from: &TechId,
    to: &TechId,
    amount: f64,
) -> Result<()> {
    if amount <= 0.0 {
        return Ok(());
    }
    let entry = flow_cut.entry((from.clone(), to.clone())).or_insert(0.0);
    *entry += amount;
    let available = current.flow(from, to);
    if *entry > available + FLOW_EPS * (1.0 + available) {
        return Err(Error::NotPartial(format!(
            "cut of {entry} exceeds flow {from}->{to} = {available}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Accounting
// ---------------------------------------------------------------------------

/// Idle labor and GDP losses of `new` relative to `original`, at the
/// original wages.
fn account(economy: &Economy, original: &FlowState, new: &FlowState) -> Result<DisruptionOutcome> {
    let mut idle: BTreeMap<CountryId, f64> = BTreeMap::new();
    for c in economy.countries() {
        idle.insert(c.id.clone(), 0.0);
    }
    for ((n, t), x) in &original.labor_flows {
        let now = new.labor_flow(n, t);
        *idle.entry(n.clone()).or_insert(0.0) += x - now;
    }
    let lost_by_country: BTreeMap<CountryId, f64> = idle
        .iter()
        .map(|(n, l)| (n.clone(), l * original.wage(n)))
        .collect();
    let mut lost_total = 0.0;
    for tech in economy.technologies() {
        if !economy.produces_final(tech) {
            continue;
        }
        let before = original.output(&tech.id);
        if before <= 0.0 {
            continue;
        }
        let p = original
            .price(&tech.id)
            .ok_or_else(|| Error::MissingPrice(tech.id.to_string()))?;
        lost_total += p * (before - new.output(&tech.id));
    }
    Ok(DisruptionOutcome {
        flows: new.clone(),
        lost_gdp_total: lost_total,
        lost_gdp_by_country: lost_by_country,
        idle_labor: idle,
    })
}

/// Pre-disruption employed labor per country (the GDP base at fixed wages).
fn employed(original: &FlowState) -> BTreeMap<CountryId, f64> {
    original.employed_labor()
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Execute one consistent individual-technology disruption. `scale` is the
/// fraction of `tech`'s output the aggressor withdraws; routing directs the
/// aggressor's discretionary cuts. When `target` is given, accounting and
/// the demand cascade are bilateral: third countries absorb demand losses
/// without passing them on.
pub fn individual_disruption(
    economy: &Economy,
    state: &FlowState,
    aggressor: &CountryId,
    tech: &TechId,
    scale: f64,
    routing: &RoutingStrategy,
    target: Option<&CountryId>,
) -> Result<DisruptionOutcome> {
    economy.country(aggressor)?;
    if !(0.0..1.0).contains(&scale) {
        return Err(Error::NotPartial(format!(
            "scale {scale} outside [0, 1)"
        )));
    }
    let cascade = match target {
        Some(t) => {
            economy.country(t)?;
            Cascade::Bilateral(t)
        }
        None => Cascade::Full,
    };
    let spec = DisruptionSpec {
        aggressor,
        init: tech,
        cut: scale * state.output(tech),
        routing,
        target_routing: None,
        cascade,
        baseline: state,
    };
    let new = apply_disruption(economy, state, &spec)?;
    account(economy, state, &new)
}

/// Apply a sequence of partial individual-technology disruptions. Cuts are
/// absolute output units against the running state, and every proportional
/// rationing uses the initial state's weights, so the result is invariant
/// to the order of the steps while no flow is driven to zero.
pub fn compose_partial_disruptions(
    economy: &Economy,
    state: &FlowState,
    aggressor: &CountryId,
    steps: &[(TechId, f64, RoutingStrategy)],
    target: Option<&CountryId>,
) -> Result<DisruptionOutcome> {
    economy.country(aggressor)?;
    let cascade = match target {
        Some(t) => {
            economy.country(t)?;
            Cascade::Bilateral(t)
        }
        None => Cascade::Full,
    };
    let mut current = state.clone();
    for (tech, cut, routing) in steps {
        let spec = DisruptionSpec {
            aggressor,
            init: tech,
            cut: *cut,
            routing,
            target_routing: None,
            cascade,
            baseline: state,
        };
        current = apply_disruption(economy, &current, &spec)?;
    }
    account(economy, state, &current)
}

/// The bilateral power statistic and the disruption achieving it.
#[derive(Debug, Clone, Serialize)]
pub struct PowerReport {
    pub aggressor: CountryId,
    pub target: CountryId,
    pub best_tech: Option<TechId>,
    pub best_routing: Option<RoutingStrategy>,
    /// Ratio of percentage GDP losses (target over aggressor).
    pub power_pct: f64,
    /// Ratio of absolute GDP losses.
    pub power_abs: f64,
    /// Set when the best disruption costs the aggressor nothing.
    pub unbounded: bool,
}

impl PowerReport {
    pub fn no_leverage(&self) -> bool {
        self.best_tech.is_none()
    }
}

const ROUTING_BUDGET: usize = 1_000_000;
const PROBE_SCALE: f64 = 1e-4;

/// Candidate technologies for the aggressor, restricted to border-adjacent
/// ones: a downstream path to a final good avoiding the aggressor's other
/// technologies, or an upstream path to a labor-only technology avoiding
/// them. `exhaustive` disables the restriction.
pub fn candidate_techs(
    economy: &Economy,
    state: &FlowState,
    aggressor: &CountryId,
    exhaustive: bool,
) -> Vec<TechId> {
    let graph = FlowGraph::from_state(state);
    let mine: Vec<TechId> = economy
        .technologies()
        .iter()
        .filter(|t| &t.country == aggressor && state.is_active(&t.id))
        .map(|t| t.id.clone())
        .collect();
    if exhaustive {
        return mine;
    }
    let foreign_path = |start: &TechId, forward: bool| -> bool {
        // Path of length >= 1 whose interior and endpoint avoid T_i, ending
        // at a final-good producer (forward) or a labor-only one (backward).
        let mut stack: Vec<TechId> = Vec::new();
        let mut seen: BTreeSet<TechId> = BTreeSet::new();
        let neighbors = |t: &TechId| -> &[TechId] {
            if forward {
                graph.successors(t)
            } else {
                graph.predecessors(t)
            }
        };
        for n in neighbors(start) {
            if country_of(economy, n) != aggressor && seen.insert(n.clone()) {
                stack.push(n.clone());
            }
        }
        while let Some(t) = stack.pop() {
            let tech = economy.technology(&t).expect("indexed");
            let terminal = if forward {
                economy.produces_final(tech)
            } else {
                tech.inputs.is_empty()
            };
            if terminal {
                return true;
            }
            for n in neighbors(&t) {
                if country_of(economy, n) != aggressor && seen.insert(n.clone()) {
                    stack.push(n.clone());
                }
            }
        }
        false
    };
    mine.into_iter()
        .filter(|t| foreign_path(t, true) || foreign_path(t, false))
        .collect()
}

/// Enumerate every pure routing over the aggressor's discretionary nodes
/// that a disruption starting at `init` can reach.
fn pure_routings(
    economy: &Economy,
    state: &FlowState,
    owner: &CountryId,
    init: &TechId,
) -> Result<Vec<RoutingStrategy>> {
    let graph = FlowGraph::from_state(state);
    let start = BTreeSet::from([init.clone()]);
    let down = graph.descendants(&start);
    let mut relevant = graph.ancestors(&down);
    relevant.extend(down.iter().cloned());

    // Downstream choice points: owned techs with two or more customers.
    let mut down_points: Vec<(TechId, Vec<TechId>)> = Vec::new();
    // Upstream choice points: owned techs sourcing a good from two or more
    // suppliers.
    let mut up_points: Vec<((TechId, GoodId), Vec<TechId>)> = Vec::new();
    for t in &relevant {
        if !state.is_active(t) || country_of(economy, t) != owner {
            continue;
        }
        let customers: Vec<TechId> = graph
            .successors(t)
            .iter()
            .filter(|s| state.flow(t, s) > 0.0)
            .cloned()
            .collect();
        if customers.len() >= 2 && down.contains(t) {
            down_points.push((t.clone(), customers));
        }
        let tech = economy.technology(t)?;
        for good in tech.inputs.keys() {
            let suppliers: Vec<TechId> = economy
                .producers_of(good)
                .iter()
                .filter(|s| state.flow(s, t) > 0.0)
                .cloned()
                .collect();
            if suppliers.len() >= 2 {
                up_points.push(((t.clone(), good.clone()), suppliers));
            }
        }
    }

    let mut count: usize = 1;
    for (_, c) in &down_points {
        count = count.saturating_mul(c.len());
    }
    for (_, s) in &up_points {
        count = count.saturating_mul(s.len());
    }
    if count > ROUTING_BUDGET {
        return Err(Error::TooLarge(format!(
            "{count} pure routings exceed the budget of {ROUTING_BUDGET}"
        )));
    }

    let mut routings = vec![RoutingStrategy::proportional()];
    for (tech, customers) in &down_points {
        let mut expanded = Vec::with_capacity(routings.len() * customers.len());
        for r in &routings {
            for c in customers {
                let mut r2 = r.clone();
                r2.downstream.insert(tech.clone(), vec![(c.clone(), 1.0)]);
                expanded.push(r2);
            }
        }
        routings = expanded;
    }
    for ((tech, good), suppliers) in &up_points {
        let mut expanded = Vec::with_capacity(routings.len() * suppliers.len());
        for r in &routings {
            for s in suppliers {
                let mut r2 = r.clone();
                r2.upstream
                    .insert((tech.clone(), good.clone()), vec![(s.clone(), 1.0)]);
                expanded.push(r2);
            }
        }
        routings = expanded;
    }
    Ok(routings)
}

struct ProbeResult {
    own_loss: f64,
    target_loss: f64,
}

fn probe(
    economy: &Economy,
    original: &FlowState,
    current: &FlowState,
    spec: &DisruptionSpec<'_>,
    target: &CountryId,
) -> Result<(ProbeResult, FlowState)> {
    let new = apply_disruption(economy, current, spec)?;
    let outcome = account(economy, original, &new)?;
    let base = account(economy, original, current)?;
    Ok((
        ProbeResult {
            own_loss: outcome.idle_labor.get(spec.aggressor).copied().unwrap_or(0.0)
                - base.idle_labor.get(spec.aggressor).copied().unwrap_or(0.0),
            target_loss: outcome.idle_labor.get(target).copied().unwrap_or(0.0)
                - base.idle_labor.get(target).copied().unwrap_or(0.0),
        },
        new,
    ))
}

/// One evaluated candidate disruption with both power measures.
#[derive(Debug, Clone, Serialize)]
pub struct PowerCandidate {
    pub tech: TechId,
    pub routing: RoutingStrategy,
    pub power_pct: f64,
    pub power_abs: f64,
}

/// Evaluate every candidate disruption of `aggressor` against `target` at
/// an interior scale: border-adjacent technologies crossed with pure
/// routings. Candidates that cannot hurt the target are dropped.
pub fn enumerate_power(
    economy: &Economy,
    state: &FlowState,
    aggressor: &CountryId,
    target: &CountryId,
    exhaustive: bool,
) -> Result<Vec<PowerCandidate>> {
    economy.country(aggressor)?;
    economy.country(target)?;
    if aggressor == target {
        return Err(Error::Precondition(
            "aggressor and target must differ".into(),
        ));
    }
    let employed = employed(state);
    let base_i = employed.get(aggressor).copied().unwrap_or(0.0);
    let base_j = employed.get(target).copied().unwrap_or(0.0);
    if base_i <= 0.0 || base_j <= 0.0 {
        return Err(Error::Precondition(
            "both countries must employ labor in the initial state".into(),
        ));
    }
    let mut out = Vec::new();
    for tech in candidate_techs(economy, state, aggressor, exhaustive) {
        for routing in pure_routings(economy, state, aggressor, &tech)? {
            let spec = DisruptionSpec {
                aggressor,
                init: &tech,
                cut: PROBE_SCALE * state.output(&tech),
                routing: &routing,
                target_routing: None,
                cascade: Cascade::Bilateral(target),
                baseline: state,
            };
            let (r, _) = probe(economy, state, state, &spec, target)?;
            if r.target_loss <= 0.0 {
                continue;
            }
            let (pct, abs) = if r.own_loss <= 0.0 {
                (f64::INFINITY, f64::INFINITY)
            } else {
                (
                    (r.target_loss / base_j) / (r.own_loss / base_i),
                    r.target_loss / r.own_loss,
                )
            };
            out.push(PowerCandidate {
                tech: tech.clone(),
                routing,
                power_pct: pct,
                power_abs: abs,
            });
        }
    }
    Ok(out)
}

/// Power of `aggressor` over `target`: the maximum ratio of percentage GDP
/// losses over consistent individual-technology disruptions, searched over
/// border-adjacent technologies and pure routings at an interior scale.
pub fn power(
    economy: &Economy,
    state: &FlowState,
    aggressor: &CountryId,
    target: &CountryId,
    exhaustive: bool,
) -> Result<PowerReport> {
    let candidates = enumerate_power(economy, state, aggressor, target, exhaustive)?;
    let mut best: Option<&PowerCandidate> = None;
    for c in &candidates {
        let better = match best {
            None => true,
            Some(b) => {
                c.power_pct > b.power_pct + 1e-12
                    || (c.power_pct > b.power_pct - 1e-12 && c.tech < b.tech)
            }
        };
        if better {
            best = Some(c);
        }
    }
    Ok(match best {
        Some(c) => PowerReport {
            aggressor: aggressor.clone(),
            target: target.clone(),
            unbounded: c.power_pct.is_infinite(),
            best_tech: Some(c.tech.clone()),
            best_routing: Some(c.routing.clone()),
            power_pct: c.power_pct,
            power_abs: c.power_abs,
        },
        None => PowerReport {
            aggressor: aggressor.clone(),
            target: target.clone(),
            best_tech: None,
            best_routing: None,
            power_pct: 0.0,
            power_abs: 0.0,
            unbounded: false,
        },
    })
}

// ---------------------------------------------------------------------------
// Frontier
// ---------------------------------------------------------------------------

/// Piecewise-linear tradeoff between own and target GDP loss, in percent.
#[derive(Debug, Clone, Serialize)]
pub struct Frontier {
    pub points: Vec<(f64, f64)>,
}

const FRONTIER_BUDGET: usize = 200_000;

/// Map the disruption possibility frontier by composing zero-out steps:
/// each stage runs the best available pure routings exactly to the next
/// flow zero-out, re-deriving candidates on the post-zero-out state.
/// `resolution` bounds the sequence depth.
pub fn frontier(
    economy: &Economy,
    state: &FlowState,
    aggressor: &CountryId,
    target: &CountryId,
    resolution: usize,
) -> Result<Frontier> {
    economy.country(aggressor)?;
    economy.country(target)?;
    let employed = employed(state);
    let base_i = employed.get(aggressor).copied().unwrap_or(0.0);
    let base_j = employed.get(target).copied().unwrap_or(0.0);
    if base_i <= 0.0 || base_j <= 0.0 {
        return Err(Error::Precondition(
            "both countries must employ labor in the initial state".into(),
        ));
    }

    let mut segments: Vec<Segment> = Vec::new();
    let mut budget = FRONTIER_BUDGET;
    // Sequences are order-independent between zero-outs, so many move
    // orders reach the same state; dedupe on a rounded state key.
    let mut visited: BTreeSet<String> = BTreeSet::new();
    explore(
        economy,
        state,
        state,
        aggressor,
        target,
        resolution.max(1),
        &mut budget,
        base_i,
        base_j,
        (0.0, 0.0),
        &mut segments,
        &mut visited,
    )?;

    // A partial move stops anywhere along its segment, so the achievable
    // set is the union of segments; the frontier is their upper envelope
    // over own-loss budgets.
    let mut xs: Vec<f64> = vec![0.0];
    for s in &segments {
        xs.push(s.from.0);
        xs.push(s.to.0);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-7);
    let value_at = |x: f64| -> f64 {
        let mut best: f64 = 0.0;
        for s in &segments {
            if s.from.0 <= x + 1e-9 {
                let v = if s.to.0 <= x + 1e-9 {
                    s.to.1
                } else if (s.to.0 - s.from.0).abs() <= 1e-12 {
                    s.from.1.max(s.to.1)
                } else {
                    s.from.1 + (s.to.1 - s.from.1) * (x - s.from.0) / (s.to.0 - s.from.0)
                };
                best = best.max(v);
            }
        }
        best
    };
    let mut envelope: Vec<(f64, f64)> = Vec::new();
    for x in xs {
        let v = value_at(x);
        if let Some(&(px, pv)) = envelope.last() {
            if (x - px).abs() <= 1e-7 || v <= pv + 1e-7 {
                continue;
            }
        }
        envelope.push((x, v));
    }
    // Drop collinear interior points so only true breakpoints remain.
    let mut i = 1;
    while i + 1 < envelope.len() {
        let (a, b, c) = (envelope[i - 1], envelope[i], envelope[i + 1]);
        let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
        if cross.abs() <= 1e-4 {
            envelope.remove(i);
        } else {
            i += 1;
        }
    }
    if envelope.first().map(|p| p.0 > 1e-9).unwrap_or(true) {
        envelope.insert(0, (0.0, 0.0));
    }
    Ok(Frontier { points: envelope })
}

struct Segment {
    from: (f64, f64),
    to: (f64, f64),
}

fn state_key(state: &FlowState) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    for ((from, to), x) in &state.good_flows {
        let _ = write!(s, "{from}>{to}={x:.9e};");
    }
    for (t, y) in &state.outputs {
        let _ = write!(s, "{t}={y:.9e};");
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn explore(
    economy: &Economy,
    original: &FlowState,
    current: &FlowState,
    aggressor: &CountryId,
    target: &CountryId,
    depth: usize,
    budget: &mut usize,
    base_i: f64,
    base_j: f64,
    here: (f64, f64),
    segments: &mut Vec<Segment>,
    visited: &mut BTreeSet<String>,
) -> Result<()> {
    if depth == 0 {
        return Ok(());
    }
    for tech in candidate_techs(economy, current, aggressor, false) {
        let y = current.output(&tech);
        if y <= 0.0 {
            continue;
        }
        for routing in pure_routings(economy, current, aggressor, &tech)? {
            if *budget == 0 {
                return Err(Error::TooLarge(
                    "frontier sequence budget exhausted".into(),
                ));
            }
            *budget -= 1;
            // Probe marginal rates at a small interior cut.
            let eps = PROBE_SCALE * y;
            let spec = DisruptionSpec {
                aggressor,
                init: &tech,
                cut: eps,
                routing: &routing,
                target_routing: None,
                cascade: Cascade::Bilateral(target),
                baseline: current,
            };
            let (rates, probe_state) = match probe(economy, original, current, &spec, target) {
                Ok(v) => v,
                Err(Error::NotPartial(_)) => continue,
                Err(e) => return Err(e),
            };
            if rates.target_loss <= eps * 1e-6 {
                continue; // cannot hurt the target this way
            }
            // Scale exactly to the first zero-out along this direction.
            let mut max_scale = f64::INFINITY;
            for ((from, to), x) in &current.good_flows {
                let after = probe_state.flow(from, to);
                let rate = (x - after) / eps;
                if rate > 1e-9 {
                    max_scale = max_scale.min(x / rate);
                }
            }
            if !max_scale.is_finite() || max_scale <= 0.0 {
                continue;
            }
            let spec = DisruptionSpec {
                aggressor,
                init: &tech,
                cut: max_scale.min(y),
                routing: &routing,
                target_routing: None,
                cascade: Cascade::Bilateral(target),
                baseline: current,
            };
            let new = match apply_disruption(economy, current, &spec) {
                Ok(v) => v,
                Err(Error::NotPartial(_)) => continue,
                Err(e) => return Err(e),
            };
            let outcome = account(economy, original, &new)?;
            let own = outcome.idle_labor.get(aggressor).copied().unwrap_or(0.0);
            let tgt = outcome.idle_labor.get(target).copied().unwrap_or(0.0);
            let there = (100.0 * own / base_i, 100.0 * tgt / base_j);
            segments.push(Segment {
                from: here,
                to: there,
            });
            if !visited.insert(state_key(&new)) {
                continue;
            }
            explore(
                economy,
                original,
                &new,
                aggressor,
                target,
                depth - 1,
                budget,
                base_i,
                base_j,
                there,
                segments,
                visited,
            )?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Strategic power
// ---------------------------------------------------------------------------

/// Power when the target routes its own rationing to minimize the ratio:
/// the unique zero-sum value per initial technology, maximized over the
/// aggressor's candidates. Requires a network without undirected cycles
/// and a two-country technology partition.
pub fn strategic_power(
    economy: &Economy,
    state: &FlowState,
    aggressor: &CountryId,
    target: &CountryId,
) -> Result<PowerReport> {
    economy.country(aggressor)?;
    economy.country(target)?;
    let graph = FlowGraph::from_state(state);
    if graph.topo_order(None).is_err() {
        return Err(Error::CyclicNetwork("strategic power needs a DAG".into()));
    }
    if !graph.is_undirected_forest() {
        return Err(Error::UndirectedCycle(
            "strategic power is defined on networks whose undirected version is a forest".into(),
        ));
    }
    for t in state.active_techs() {
        let c = country_of(economy, &t);
        if c != aggressor && c != target {
            return Err(Error::Precondition(format!(
                "technology {t} belongs to {c}, outside the two-country partition"
            )));
        }
    }
    let employed = employed(state);
    let base_i = employed.get(aggressor).copied().unwrap_or(0.0);
    let base_j = employed.get(target).copied().unwrap_or(0.0);

    let ratio_abs = |r: &ProbeResult| -> f64 {
        if r.target_loss <= 0.0 {
            0.0
        } else if r.own_loss <= 0.0 {
            f64::INFINITY
        } else {
            r.target_loss / r.own_loss
        }
    };

    let mut best: Option<(f64, TechId, RoutingStrategy)> = None;
    for tech in candidate_techs(economy, state, aggressor, false) {
        let agg_routings = pure_routings(economy, state, aggressor, &tech)?;
        let tgt_routings = pure_routings(economy, state, target, &tech)?;
        if agg_routings.len().saturating_mul(tgt_routings.len()) > ROUTING_BUDGET {
            return Err(Error::TooLarge("strategy profile space too large".into()));
        }
        // Zero-sum value: the aggressor guarantees max-min; with no
        // undirected cycles this coincides with min-max in pure strategies.
        let mut value: Option<(f64, RoutingStrategy)> = None;
        for ar in &agg_routings {
            let mut worst: Option<f64> = None;
            for tr in &tgt_routings {
                let spec = DisruptionSpec {
                    aggressor,
                    init: &tech,
                    cut: PROBE_SCALE * state.output(&tech),
                    routing: ar,
                    target_routing: Some((target, tr)),
                    cascade: Cascade::Bilateral(target),
                    baseline: state,
                };
                let (r, _) = probe(economy, state, state, &spec, target)?;
                let v = ratio_abs(&r);
                worst = Some(match worst {
                    None => v,
                    Some(w) => w.min(v),
                });
            }
            if let Some(w) = worst {
                let better = match &value {
                    None => true,
                    Some((v, _)) => w > *v + 1e-12,
                };
                if better {
                    value = Some((w, ar.clone()));
                }
            }
        }
        if let Some((v, ar)) = value {
            let better = match &best {
                None => v > 0.0,
                Some((b, t, _)) => v > *b + 1e-12 || (v > *b - 1e-12 && tech < *t),
            };
            if better {
                best = Some((v, tech.clone(), ar));
            }
        }
    }
    Ok(match best {
        Some((abs, tech, routing)) => PowerReport {
            aggressor: aggressor.clone(),
            target: target.clone(),
            power_pct: abs * (base_i / base_j),
            power_abs: abs,
            unbounded: abs.is_infinite(),
            best_tech: Some(tech),
            best_routing: Some(routing),
        },
        None => PowerReport {
            aggressor: aggressor.clone(),
            target: target.clone(),
            best_tech: None,
            best_routing: None,
            power_pct: 0.0,
            power_abs: 0.0,
            unbounded: false,
        },
    })
}

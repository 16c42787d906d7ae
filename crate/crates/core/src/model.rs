//! Domain types: goods, countries, technologies, economies, and flow states.
//!
//! An [`Economy`] is the fixed production structure (who can make what, out
//! of what, at which transport cost). A [`FlowState`] is one complete
//! assignment of shipments, labor, outputs, prices, and wages on top of it.
//! Both are immutable after construction; every analysis in this crate is a
//! pure function over them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! string_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

string_id!(
    /// Identifier of a good (intermediate or final).
    GoodId
);
string_id!(
    /// Identifier of a country.
    CountryId
);
string_id!(
    /// Identifier of a technology.
    TechId
);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoodKind {
    Intermediate,
    Final,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Good {
    pub id: GoodId,
    pub kind: GoodKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Country {
    pub id: CountryId,
    /// Labor endowment, strictly positive.
    pub labor_endowment: f64,
}

/// A fixed constant-returns recipe: `labor_input` units of labor plus
/// `inputs[g]` units of each input good per unit of output.
#[derive(Debug, Clone, PartialEq)]
pub struct Technology {
    pub id: TechId,
    pub country: CountryId,
    pub output: GoodId,
    pub labor_input: f64,
    pub inputs: BTreeMap<GoodId, f64>,
}

/// Iceberg transport costs: units that must be shipped per unit received.
/// All costs are at least 1. Lookups fall back to `default_cost`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportCosts {
    pub default_cost: f64,
    pub good_overrides: BTreeMap<(TechId, TechId), f64>,
    pub labor_overrides: BTreeMap<(CountryId, TechId), f64>,
}

impl TransportCosts {
    pub fn frictionless() -> Self {
        TransportCosts {
            default_cost: 1.0,
            good_overrides: BTreeMap::new(),
            labor_overrides: BTreeMap::new(),
        }
    }

    pub fn good_cost(&self, from: &TechId, to: &TechId) -> f64 {
        self.good_overrides
            .get(&(from.clone(), to.clone()))
            .copied()
            .unwrap_or(self.default_cost)
    }

    pub fn labor_cost(&self, from: &CountryId, to: &TechId) -> f64 {
        self.labor_overrides
            .get(&(from.clone(), to.clone()))
            .copied()
            .unwrap_or(self.default_cost)
    }
}

impl Default for TransportCosts {
    fn default() -> Self {
        Self::frictionless()
    }
}

/// A multi-country production economy with fixed technologies.
#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    countries: Vec<Country>,
    goods: Vec<Good>,
    technologies: Vec<Technology>,
    transport: TransportCosts,
    /// Homothetic expenditure shares over final goods; only the long-run
    /// solver needs demand, so this is optional.
    demand_shares: Option<BTreeMap<GoodId, f64>>,
    producers: BTreeMap<GoodId, Vec<TechId>>,
}

impl Economy {
    pub fn new(
        mut countries: Vec<Country>,
        mut goods: Vec<Good>,
        mut technologies: Vec<Technology>,
        transport: TransportCosts,
        demand_shares: Option<BTreeMap<GoodId, f64>>,
    ) -> Result<Self> {
        countries.sort_by(|a, b| a.id.cmp(&b.id));
        goods.sort_by(|a, b| a.id.cmp(&b.id));
        technologies.sort_by(|a, b| a.id.cmp(&b.id));

        if technologies.is_empty() {
            return Err(Error::Schema("economy has no technologies".into()));
        }
        if countries.is_empty() {
            return Err(Error::Schema("economy has no countries".into()));
        }
        for w in countries.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::Invariant(format!("duplicate country id {}", w[0].id)));
            }
        }
        for w in goods.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::Invariant(format!("duplicate good id {}", w[0].id)));
            }
        }
        for w in technologies.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::Invariant(format!(
                    "duplicate technology id {}",
                    w[0].id
                )));
            }
        }
        for c in &countries {
            if c.labor_endowment <= 0.0 || !c.labor_endowment.is_finite() {
                return Err(Error::Invariant(format!(
                    "country {} must have positive labor endowment",
                    c.id
                )));
            }
        }

        let good_kinds: BTreeMap<&GoodId, GoodKind> =
            goods.iter().map(|g| (&g.id, g.kind)).collect();
        let country_ids: BTreeSet<&CountryId> = countries.iter().map(|c| &c.id).collect();

        let mut producers: BTreeMap<GoodId, Vec<TechId>> = BTreeMap::new();
        for t in &technologies {
            if !country_ids.contains(&t.country) {
                return Err(Error::UnknownEntity(format!(
                    "technology {} references unknown country {}",
                    t.id, t.country
                )));
            }
            if !good_kinds.contains_key(&t.output) {
                return Err(Error::UnknownEntity(format!(
                    "technology {} outputs unknown good {}",
                    t.id, t.output
                )));
            }
            if t.labor_input <= 0.0 || !t.labor_input.is_finite() {
                return Err(Error::Invariant(format!(
                    "technology {} must use a positive amount of labor",
                    t.id
                )));
            }
            for (g, q) in &t.inputs {
                match good_kinds.get(g) {
                    None => {
                        return Err(Error::UnknownEntity(format!(
                            "technology {} uses unknown input good {}",
                            t.id, g
                        )))
                    }
                    Some(GoodKind::Final) => {
                        return Err(Error::Invariant(format!(
                            "technology {} uses final good {} as an input",
                            t.id, g
                        )))
                    }
                    Some(GoodKind::Intermediate) => {}
                }
                if *g == t.output {
                    return Err(Error::Invariant(format!(
                        "technology {} uses its own output {} as an input",
                        t.id, g
                    )));
                }
                if *q <= 0.0 || !q.is_finite() {
                    return Err(Error::Invariant(format!(
                        "technology {} has non-positive input coefficient for {}",
                        t.id, g
                    )));
                }
            }
            producers.entry(t.output.clone()).or_default().push(t.id.clone());
        }

        for g in &goods {
            if g.kind == GoodKind::Final && !producers.contains_key(&g.id) {
                return Err(Error::Invariant(format!(
                    "final good {} has no producing technology",
                    g.id
                )));
            }
        }

        // Iceberg convention: every cost is at least 1 (NaN rejected too).
        let below_one = |c: f64| c < 1.0 || c.is_nan();
        if below_one(transport.default_cost) {
            return Err(Error::Invariant(format!(
                "default transport cost {} is below 1",
                transport.default_cost
            )));
        }
        for ((from, to), c) in &transport.good_overrides {
            if below_one(*c) {
                return Err(Error::Invariant(format!(
                    "transport cost {c} for {from}->{to} is below 1"
                )));
            }
            let src = technologies.iter().find(|t| &t.id == from);
            match src {
                None => {
                    return Err(Error::UnknownEntity(format!(
                        "transport override references unknown technology {from}"
                    )))
                }
                Some(t) => {
                    // Final goods ship to consumers at no cost by assumption.
                    if good_kinds.get(&t.output) == Some(&GoodKind::Final) {
                        return Err(Error::Invariant(format!(
                            "transport override on final-good producer {from} is not allowed"
                        )));
                    }
                }
            }
            if !technologies.iter().any(|t| &t.id == to) {
                return Err(Error::UnknownEntity(format!(
                    "transport override references unknown technology {to}"
                )));
            }
        }
        for ((n, to), c) in &transport.labor_overrides {
            if below_one(*c) {
                return Err(Error::Invariant(format!(
                    "labor transport cost {c} for {n}->{to} is below 1"
                )));
            }
            if !country_ids.contains(n) {
                return Err(Error::UnknownEntity(format!(
                    "labor transport override references unknown country {n}"
                )));
            }
            if !technologies.iter().any(|t| &t.id == to) {
                return Err(Error::UnknownEntity(format!(
                    "labor transport override references unknown technology {to}"
                )));
            }
        }

        if let Some(shares) = &demand_shares {
            let finals: BTreeSet<&GoodId> = goods
                .iter()
                .filter(|g| g.kind == GoodKind::Final)
                .map(|g| &g.id)
                .collect();
            for g in shares.keys() {
                if !finals.contains(g) {
                    return Err(Error::Invariant(format!(
                        "demand share for non-final good {g}"
                    )));
                }
            }
            for g in &finals {
                if !shares.contains_key(*g) {
                    return Err(Error::Invariant(format!(
                        "demand shares missing final good {g}"
                    )));
                }
            }
            let total: f64 = shares.values().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::Invariant(format!(
                    "demand shares sum to {total}, expected 1"
                )));
            }
            for (g, s) in shares {
                if !(*s > 0.0 && *s <= 1.0) {
                    return Err(Error::Invariant(format!("demand share for {g} outside (0,1]")));
                }
            }
        }

        Ok(Economy {
            countries,
            goods,
            technologies,
            transport,
            demand_shares,
            producers,
        })
    }

    pub fn countries(&self) -> &[Country] {
        &self.countries
    }

    pub fn goods(&self) -> &[Good] {
        &self.goods
    }

    pub fn technologies(&self) -> &[Technology] {
        &self.technologies
    }

    pub fn transport(&self) -> &TransportCosts {
        &self.transport
    }

    pub fn demand_shares(&self) -> Option<&BTreeMap<GoodId, f64>> {
        self.demand_shares.as_ref()
    }

    pub fn technology(&self, id: &TechId) -> Result<&Technology> {
        self.technologies
            .binary_search_by(|t| t.id.cmp(id))
            .map(|i| &self.technologies[i])
            .map_err(|_| Error::UnknownEntity(format!("technology {id}")))
    }

    pub fn country(&self, id: &CountryId) -> Result<&Country> {
        self.countries
            .binary_search_by(|c| c.id.cmp(id))
            .map(|i| &self.countries[i])
            .map_err(|_| Error::UnknownEntity(format!("country {id}")))
    }

    pub fn good(&self, id: &GoodId) -> Result<&Good> {
        self.goods
            .binary_search_by(|g| g.id.cmp(id))
            .map(|i| &self.goods[i])
            .map_err(|_| Error::UnknownEntity(format!("good {id}")))
    }

    pub fn good_kind(&self, id: &GoodId) -> Result<GoodKind> {
        self.good(id).map(|g| g.kind)
    }

    pub fn is_final_good(&self, id: &GoodId) -> bool {
        matches!(self.good_kind(id), Ok(GoodKind::Final))
    }

    /// Technologies producing `good`, in lexicographic id order.
    pub fn producers_of(&self, good: &GoodId) -> &[TechId] {
        self.producers.get(good).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn produces_final(&self, tech: &Technology) -> bool {
        self.is_final_good(&tech.output)
    }

    /// A copy of this economy with the recipes of `shock.shocked` rescaled
    /// for a total-factor-productivity multiplier of `shock.lambda`: one
    /// unit of output requires `1/lambda` times the original inputs.
    pub fn with_tfp(&self, shock: &ShockSpec) -> Result<Economy> {
        if shock.lambda <= 0.0 || shock.lambda.is_nan() {
            return Err(Error::Invariant("tfp multiplier must be positive".into()));
        }
        let mut technologies = self.technologies.clone();
        for t in &mut technologies {
            if shock.shocked.contains(&t.id) {
                t.labor_input /= shock.lambda;
                for q in t.inputs.values_mut() {
                    *q /= shock.lambda;
                }
            }
        }
        Economy::new(
            self.countries.clone(),
            self.goods.clone(),
            technologies,
            self.transport.clone(),
            self.demand_shares.clone(),
        )
    }
}

/// A complete flow assignment: good shipments between technologies, labor
/// shipments from countries to technologies, outputs, prices at the point
/// of sale, and wages. JSON serialization uses the flow-file schema.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub good_flows: BTreeMap<(TechId, TechId), f64>,
    pub labor_flows: BTreeMap<(CountryId, TechId), f64>,
    pub outputs: BTreeMap<TechId, f64>,
    pub prices: BTreeMap<TechId, f64>,
    pub wages: BTreeMap<CountryId, f64>,
}

impl FlowState {
    pub fn new(
        good_flows: BTreeMap<(TechId, TechId), f64>,
        labor_flows: BTreeMap<(CountryId, TechId), f64>,
        outputs: BTreeMap<TechId, f64>,
        prices: BTreeMap<TechId, f64>,
        wages: BTreeMap<CountryId, f64>,
    ) -> Result<Self> {
        for ((a, b), v) in &good_flows {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::NegativeFlow(format!("good flow {a}->{b} = {v}")));
            }
        }
        for ((n, t), v) in &labor_flows {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::NegativeFlow(format!("labor flow {n}->{t} = {v}")));
            }
        }
        for (t, v) in &outputs {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::NegativeFlow(format!("output of {t} = {v}")));
            }
        }
        for (t, v) in &prices {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::NegativeFlow(format!("price of {t} = {v}")));
            }
        }
        for (n, v) in &wages {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::NegativeFlow(format!("wage of {n} = {v}")));
            }
        }
        Ok(FlowState {
            good_flows,
            labor_flows,
            outputs,
            prices,
            wages,
        })
    }

    pub fn output(&self, tech: &TechId) -> f64 {
        self.outputs.get(tech).copied().unwrap_or(0.0)
    }

    pub fn price(&self, tech: &TechId) -> Option<f64> {
        self.prices.get(tech).copied()
    }

    pub fn wage(&self, country: &CountryId) -> f64 {
        self.wages.get(country).copied().unwrap_or(0.0)
    }

    pub fn flow(&self, from: &TechId, to: &TechId) -> f64 {
        self.good_flows
            .get(&(from.clone(), to.clone()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn labor_flow(&self, country: &CountryId, tech: &TechId) -> f64 {
        self.labor_flows
            .get(&(country.clone(), tech.clone()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn is_active(&self, tech: &TechId) -> bool {
        self.output(tech) > 0.0
    }

    /// Technologies with positive output, in lexicographic id order.
    pub fn active_techs(&self) -> Vec<TechId> {
        self.outputs
            .iter()
            .filter(|(_, y)| **y > 0.0)
            .map(|(t, _)| t.clone())
            .collect()
    }

    /// Labor employed per country under this state (shipped units).
    pub fn employed_labor(&self) -> BTreeMap<CountryId, f64> {
        let mut out: BTreeMap<CountryId, f64> = BTreeMap::new();
        for ((n, _), v) in &self.labor_flows {
            *out.entry(n.clone()).or_insert(0.0) += v;
        }
        out
    }
}

/// A shock: the set of disrupted technologies and the retained output
/// fraction `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockSpec {
    pub shocked: BTreeSet<TechId>,
    pub lambda: f64,
}

impl ShockSpec {
    pub fn new<I: IntoIterator<Item = TechId>>(shocked: I, lambda: f64) -> Self {
        ShockSpec {
            shocked: shocked.into_iter().collect(),
            lambda,
        }
    }

    pub fn single(tech: impl Into<TechId>, lambda: f64) -> Self {
        Self::new([tech.into()], lambda)
    }

    /// Shocked technologies must be active in the associated state.
    pub fn check_against(&self, state: &FlowState) -> Result<()> {
        for t in &self.shocked {
            if !state.is_active(t) {
                return Err(Error::InactiveTech(t.to_string()));
            }
        }
        Ok(())
    }
}

/// Post-disruption flows plus GDP and idle-labor accounting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisruptionOutcome {
    pub flows: FlowState,
    /// Price-weighted lost final output at pre-shock prices.
    pub lost_gdp_total: f64,
    /// Wage-weighted idle labor per country.
    pub lost_gdp_by_country: BTreeMap<CountryId, f64>,
    pub idle_labor: BTreeMap<CountryId, f64>,
}

/// World GDP: total expenditure on final goods, `sum over final-good
/// technologies of p_tau * y_tau`.
pub fn gdp(economy: &Economy, state: &FlowState) -> Result<f64> {
    let mut total = 0.0;
    for t in economy.technologies() {
        if !economy.produces_final(t) {
            continue;
        }
        let y = state.output(&t.id);
        if y > 0.0 {
            let p = state
                .price(&t.id)
                .ok_or_else(|| Error::MissingPrice(t.id.to_string()))?;
            total += p * y;
        }
    }
    Ok(total)
}

/// Cheapest transport-adjusted price at which `tech` can source `good`,
/// with the arg-min producer. Ties break lexicographically by id.
pub fn effective_input_price(
    economy: &Economy,
    state: &FlowState,
    tech: &TechId,
    good: &GoodId,
) -> Result<(f64, TechId)> {
    let t = economy.technology(tech)?;
    if !t.inputs.contains_key(good) {
        return Err(Error::Precondition(format!(
            "good {good} is not an input of technology {tech}"
        )));
    }
    let mut best: Option<(f64, TechId)> = None;
    for src in economy.producers_of(good) {
        let p = state
            .price(src)
            .ok_or_else(|| Error::MissingPrice(src.to_string()))?;
        let cost = economy.transport().good_cost(src, tech) * p;
        let better = match &best {
            None => true,
            Some((c, _)) => cost < *c,
        };
        if better {
            best = Some((cost, src.clone()));
        }
    }
    best.ok_or_else(|| Error::NoProducer(good.to_string()))
}

/// Cheapest transport-adjusted wage `tech` faces, with the arg-min country.
pub fn effective_labor_price(
    economy: &Economy,
    state: &FlowState,
    tech: &TechId,
) -> Result<(f64, CountryId)> {
    let mut best: Option<(f64, CountryId)> = None;
    for c in economy.countries() {
        let w = state.wage(&c.id);
        let cost = economy.transport().labor_cost(&c.id, tech) * w;
        let better = match &best {
            None => true,
            Some((b, _)) => cost < *b,
        };
        if better {
            best = Some((cost, c.id.clone()));
        }
    }
    best.ok_or_else(|| Error::Schema("economy has no countries".into()))
}

//! Economy and flow-state file formats (JSON syntax).
//!
//! Field names follow the on-disk schema exactly; see the README for an
//! example. Loading validates all structural invariants; flow files
//! are additionally checked against the economy they are loaded for, but
//! equilibrium conditions are left to [`crate::validate::validate_equilibrium`].

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Country, CountryId, Economy, FlowState, Good, GoodId, GoodKind, TechId, Technology,
    TransportCosts,
};

// ---------------------------------------------------------------------------
// On-disk schema
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct EconomyFile {
    countries: Vec<CountryEntry>,
    goods: Vec<GoodEntry>,
    technologies: Vec<TechEntry>,
    #[serde(default)]
    transport: Option<TransportEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    demand_shares: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CountryEntry {
    id: String,
    labor: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct GoodEntry {
    id: String,
    kind: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct TechEntry {
    id: String,
    country: String,
    output: String,
    labor_input: f64,
    #[serde(default)]
    inputs: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TransportEntry {
    default: f64,
    #[serde(default)]
    good_overrides: Vec<GoodOverrideEntry>,
    #[serde(default)]
    labor_overrides: Vec<LaborOverrideEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GoodOverrideEntry {
    from: String,
    to: String,
    cost: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct LaborOverrideEntry {
    country: String,
    to: String,
    cost: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct FlowFile {
    #[serde(default)]
    good_flows: Vec<GoodFlowEntry>,
    #[serde(default)]
    labor_flows: Vec<LaborFlowEntry>,
    outputs: BTreeMap<String, f64>,
    #[serde(default)]
    prices: BTreeMap<String, f64>,
    #[serde(default)]
    wages: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GoodFlowEntry {
    from: String,
    to: String,
    amount: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct LaborFlowEntry {
    country: String,
    to: String,
    amount: f64,
}

// ---------------------------------------------------------------------------
// Economy
// ---------------------------------------------------------------------------

pub fn load_economy(path: impl AsRef<Path>) -> Result<Economy> {
    let text = fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
    parse_economy(&text)
}

pub fn parse_economy(text: &str) -> Result<Economy> {
    let file: EconomyFile =
        serde_json::from_str(text).map_err(|e| classify_serde_error(&e))?;
    economy_from_file(file)
}

fn classify_serde_error(e: &serde_json::Error) -> Error {
    if e.is_syntax() || e.is_eof() {
        Error::Parse(e.to_string())
    } else {
        Error::Schema(e.to_string())
    }
}

fn economy_from_file(file: EconomyFile) -> Result<Economy> {
    if file.technologies.is_empty() {
        return Err(Error::Schema("technologies list is empty".into()));
    }
    let countries = file
        .countries
        .into_iter()
        .map(|c| Country {
            id: CountryId::new(c.id),
            labor_endowment: c.labor,
        })
        .collect();
    let goods = file
        .goods
        .into_iter()
        .map(|g| {
            let kind = match g.kind.as_str() {
                "intermediate" => GoodKind::Intermediate,
                "final" => GoodKind::Final,
                other => {
                    return Err(Error::Schema(format!(
                        "good {}: unknown kind {other:?}",
                        g.id
                    )))
                }
            };
            Ok(Good {
                id: GoodId::new(g.id),
                kind,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let technologies = file
        .technologies
        .into_iter()
        .map(|t| Technology {
            id: TechId::new(t.id),
            country: CountryId::new(t.country),
            output: GoodId::new(t.output),
            labor_input: t.labor_input,
            inputs: t
                .inputs
                .into_iter()
                .map(|(g, q)| (GoodId::new(g), q))
                .collect(),
        })
        .collect();
    let transport = match file.transport {
        None => TransportCosts::frictionless(),
        Some(t) => TransportCosts {
            default_cost: t.default,
            good_overrides: t
                .good_overrides
                .into_iter()
                .map(|o| ((TechId::new(o.from), TechId::new(o.to)), o.cost))
                .collect(),
            labor_overrides: t
                .labor_overrides
                .into_iter()
                .map(|o| ((CountryId::new(o.country), TechId::new(o.to)), o.cost))
                .collect(),
        },
    };
    let demand_shares = file
        .demand_shares
        .map(|m| m.into_iter().map(|(g, s)| (GoodId::new(g), s)).collect());
    Economy::new(countries, goods, technologies, transport, demand_shares)
}

pub fn economy_to_json(economy: &Economy) -> String {
    let file = EconomyFile {
        countries: economy
            .countries()
            .iter()
            .map(|c| CountryEntry {
                id: c.id.to_string(),
                labor: c.labor_endowment,
            })
            .collect(),
        goods: economy
            .goods()
            .iter()
            .map(|g| GoodEntry {
                id: g.id.to_string(),
                kind: match g.kind {
                    GoodKind::Intermediate => "intermediate".into(),
                    GoodKind::Final => "final".into(),
                },
            })
            .collect(),
        technologies: economy
            .technologies()
            .iter()
            .map(|t| TechEntry {
                id: t.id.to_string(),
                country: t.country.to_string(),
                output: t.output.to_string(),
                labor_input: t.labor_input,
                inputs: t
                    .inputs
                    .iter()
                    .map(|(g, q)| (g.to_string(), *q))
                    .collect(),
            })
            .collect(),
        transport: Some(TransportEntry {
            default: economy.transport().default_cost,
            good_overrides: economy
                .transport()
                .good_overrides
                .iter()
                .map(|((f, t), c)| GoodOverrideEntry {
                    from: f.to_string(),
                    to: t.to_string(),
                    cost: *c,
                })
                .collect(),
            labor_overrides: economy
                .transport()
                .labor_overrides
                .iter()
                .map(|((n, t), c)| LaborOverrideEntry {
                    country: n.to_string(),
                    to: t.to_string(),
                    cost: *c,
                })
                .collect(),
        }),
        demand_shares: economy
            .demand_shares()
            .map(|m| m.iter().map(|(g, s)| (g.to_string(), *s)).collect()),
    };
    serde_json::to_string_pretty(&file).expect("economy serialization cannot fail")
}

pub fn save_economy(economy: &Economy, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), economy_to_json(economy) + "\n")
        .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))
}

// ---------------------------------------------------------------------------
// Flow state
// ---------------------------------------------------------------------------

pub fn load_flow_state(path: impl AsRef<Path>, economy: &Economy) -> Result<FlowState> {
    let text = fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
    parse_flow_state(&text, economy)
}

pub fn parse_flow_state(text: &str, economy: &Economy) -> Result<FlowState> {
    let file: FlowFile = serde_json::from_str(text).map_err(|e| classify_serde_error(&e))?;
    flow_state_from_file(file, economy)
}

fn flow_state_from_file(file: FlowFile, economy: &Economy) -> Result<FlowState> {
    let known_tech = |id: &str| -> Result<TechId> {
        let t = TechId::from(id);
        economy.technology(&t)?;
        Ok(t)
    };
    let known_country = |id: &str| -> Result<CountryId> {
        let c = CountryId::from(id);
        economy.country(&c)?;
        Ok(c)
    };

    let mut good_flows = BTreeMap::new();
    for e in file.good_flows {
        let from = known_tech(&e.from)?;
        let to = known_tech(&e.to)?;
        // Final goods go to consumers, never to other technologies.
        let src = economy.technology(&from)?;
        if economy.is_final_good(&src.output) {
            return Err(Error::Invariant(format!(
                "flow {from}->{to} ships final good {}",
                src.output
            )));
        }
        if good_flows.insert((from.clone(), to.clone()), e.amount).is_some() {
            return Err(Error::Schema(format!("duplicate good flow {from}->{to}")));
        }
    }
    let mut labor_flows = BTreeMap::new();
    for e in file.labor_flows {
        let country = known_country(&e.country)?;
        let to = known_tech(&e.to)?;
        if labor_flows
            .insert((country.clone(), to.clone()), e.amount)
            .is_some()
        {
            return Err(Error::Schema(format!("duplicate labor flow {country}->{to}")));
        }
    }
    let mut outputs = BTreeMap::new();
    for (t, y) in file.outputs {
        outputs.insert(known_tech(&t)?, y);
    }
    let mut prices = BTreeMap::new();
    for (t, p) in file.prices {
        prices.insert(known_tech(&t)?, p);
    }
    let mut wages = BTreeMap::new();
    for (n, w) in file.wages {
        wages.insert(known_country(&n)?, w);
    }
    FlowState::new(good_flows, labor_flows, outputs, prices, wages)
}

pub fn flow_state_to_json(state: &FlowState) -> String {
    let file = FlowFile {
        good_flows: state
            .good_flows
            .iter()
            .map(|((f, t), a)| GoodFlowEntry {
                from: f.to_string(),
                to: t.to_string(),
                amount: *a,
            })
            .collect(),
        labor_flows: state
            .labor_flows
            .iter()
            .map(|((n, t), a)| LaborFlowEntry {
                country: n.to_string(),
                to: t.to_string(),
                amount: *a,
            })
            .collect(),
        outputs: state
            .outputs
            .iter()
            .map(|(t, y)| (t.to_string(), *y))
            .collect(),
        prices: state
            .prices
            .iter()
            .map(|(t, p)| (t.to_string(), *p))
            .collect(),
        wages: state
            .wages
            .iter()
            .map(|(n, w)| (n.to_string(), *w))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("flow serialization cannot fail")
}

pub fn save_flow_state(state: &FlowState, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), flow_state_to_json(state) + "\n")
        .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))
}

// FlowState serializes as the flow-file schema, keeping report output and
// on-disk files in one shape.
impl serde::Serialize for FlowState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let file = FlowFile {
            good_flows: self
                .good_flows
                .iter()
                .map(|((f, t), a)| GoodFlowEntry {
                    from: f.to_string(),
                    to: t.to_string(),
                    amount: *a,
                })
                .collect(),
            labor_flows: self
                .labor_flows
                .iter()
                .map(|((n, t), a)| LaborFlowEntry {
                    country: n.to_string(),
                    to: t.to_string(),
                    amount: *a,
                })
                .collect(),
            outputs: self.outputs.iter().map(|(t, y)| (t.to_string(), *y)).collect(),
            prices: self.prices.iter().map(|(t, p)| (t.to_string(), *p)).collect(),
            wages: self.wages.iter().map(|(n, w)| (n.to_string(), *w)).collect(),
        };
        file.serialize(serializer)
    }
}

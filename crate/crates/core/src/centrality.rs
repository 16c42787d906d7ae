//! Disruption centrality for acyclic between-networks: sourcing shares,
//! the downstream discount recursion, and the value-weighted aggregate.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::FlowGraph;
use crate::model::{gdp, Economy, FlowState, GoodId, TechId};

/// Flow-derived sourcing shares: how final goods split across producers,
/// and how each user splits each input good across suppliers.
#[derive(Debug, Clone)]
pub struct SourcingShares {
    pub final_shares: BTreeMap<(GoodId, TechId), f64>,
    pub input_shares: BTreeMap<(TechId, TechId), f64>,
}

// Tuple keys cannot live in JSON maps; serialize both share tables as
// arrays of records.
impl Serialize for SourcingShares {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        struct FinalShare<'a> {
            good: &'a GoodId,
            tech: &'a TechId,
            share: f64,
        }
        #[derive(Serialize)]
        struct InputShare<'a> {
            user: &'a TechId,
            supplier: &'a TechId,
            share: f64,
        }
        let finals: Vec<FinalShare> = self
            .final_shares
            .iter()
            .map(|((g, t), s)| FinalShare {
                good: g,
                tech: t,
                share: *s,
            })
            .collect();
        let inputs: Vec<InputShare> = self
            .input_shares
            .iter()
            .map(|((u, p), s)| InputShare {
                user: u,
                supplier: p,
                share: *s,
            })
            .collect();
        let mut st = serializer.serialize_struct("SourcingShares", 2)?;
        st.serialize_field("final_shares", &finals)?;
        st.serialize_field("input_shares", &inputs)?;
        st.end()
    }
}

pub fn sourcing_shares(economy: &Economy, state: &FlowState) -> Result<SourcingShares> {
    let mut final_shares = BTreeMap::new();
    for good in economy.goods() {
        if good.kind != crate::model::GoodKind::Final {
            continue;
        }
        let producers: Vec<&TechId> = economy
            .producers_of(&good.id)
            .iter()
            .filter(|t| state.is_active(t))
            .collect();
        let total: f64 = producers.iter().map(|t| state.output(t)).sum();
        if total <= 0.0 {
            continue;
        }
        for t in producers {
            final_shares.insert((good.id.clone(), t.clone()), state.output(t) / total);
        }
    }

    let mut input_shares = BTreeMap::new();
    for user in state.active_techs() {
        let tech = economy.technology(&user)?;
        for good in tech.inputs.keys() {
            let suppliers: Vec<&TechId> = economy
                .producers_of(good)
                .iter()
                .filter(|s| state.flow(s, &user) > 0.0)
                .collect();
            let total: f64 = suppliers.iter().map(|s| state.flow(s, &user)).sum();
            if total <= 0.0 {
                continue;
            }
            for s in suppliers {
                input_shares.insert((user.clone(), s.clone()), state.flow(s, &user) / total);
            }
        }
    }
    Ok(SourcingShares {
        final_shares,
        input_shares,
    })
}

/// Disruption centrality of one technology with the per-final discount
/// values that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct CentralityReport {
    pub tech: TechId,
    pub affected_finals: BTreeSet<GoodId>,
    #[serde(serialize_with = "serialize_d_values")]
    pub d_values: BTreeMap<(GoodId, TechId), f64>,
    pub dc: f64,
}

fn serialize_d_values<S: serde::Serializer>(
    d_values: &BTreeMap<(GoodId, TechId), f64>,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        final_good: &'a GoodId,
        tech: &'a TechId,
        d: f64,
    }
    let entries: Vec<Entry> = d_values
        .iter()
        .map(|((g, t), d)| Entry {
            final_good: g,
            tech: t,
            d: *d,
        })
        .collect();
    entries.serialize(serializer)
}

impl CentralityReport {
    /// The short-run GDP loss fraction this centrality implies for a shock
    /// retaining `lambda`.
    pub fn scaled_loss(&self, lambda: f64) -> f64 {
        (1.0 - lambda) * self.dc
    }
}

/// The value-weighted fraction of final-good production reachable from
/// `tech`, discounted through sourcing shares. Requires each between-network
/// to be well-ordered; a directed cycle is reported as an error naming it.
pub fn disruption_centrality(
    economy: &Economy,
    state: &FlowState,
    tech: &TechId,
) -> Result<CentralityReport> {
    economy.technology(tech)?;
    if !state.is_active(tech) {
        return Err(Error::InactiveTech(tech.to_string()));
    }
    let shares = sourcing_shares(economy, state)?;
    let graph = FlowGraph::from_state(state);
    let downstream = graph.descendants(&BTreeSet::from([tech.clone()]));

    // Final goods with a reachable active producer.
    let mut affected: BTreeSet<GoodId> = BTreeSet::new();
    for t in &downstream {
        if !state.is_active(t) {
            continue;
        }
        let te = economy.technology(t)?;
        if economy.produces_final(te) {
            affected.insert(te.output.clone());
        }
    }

    let total_gdp = gdp(economy, state)?;
    let mut d_values = BTreeMap::new();
    let mut dc = 0.0;
    for good in &affected {
        let reachable_producers: BTreeSet<TechId> = economy
            .producers_of(good)
            .iter()
            .filter(|p| state.is_active(p) && downstream.contains(*p))
            .cloned()
            .collect();
        // All technologies on some path from `tech` to a reachable producer.
        let mut between: BTreeSet<TechId> = graph
            .ancestors(&reachable_producers)
            .intersection(&downstream)
            .cloned()
            .collect();
        between.insert(tech.clone());
        let order = graph
            .topo_order(Some(&between))
            .map_err(|cycle| {
                Error::Cyclic(format!(
                    "between-network of {tech} toward {good} contains {}",
                    cycle
                        .iter()
                        .map(|t| t.as_str())
                        .collect::<Vec<_>>()
                        .join(" -> ")
                ))
            })?;

        let mut d: BTreeMap<&TechId, f64> = BTreeMap::new();
        for t in &order {
            if t == tech {
                d.insert(tech, 1.0);
                continue;
            }
            let te = economy.technology(t)?;
            let mut best = 0.0f64;
            for input_good in te.inputs.keys() {
                let mut sum = 0.0;
                for supplier in economy.producers_of(input_good) {
                    if let Some(s) = shares.input_shares.get(&(t.clone(), supplier.clone())) {
                        sum += s * d.get(supplier).copied().unwrap_or(0.0);
                    }
                }
                best = best.max(sum);
            }
            d.insert(t, best);
        }
        for (t, v) in &d {
            d_values.insert((good.clone(), (*t).clone()), *v);
        }

        // Value of the final good times its discounted producer shares.
        let mut value = 0.0;
        let mut weighted = 0.0;
        for producer in economy.producers_of(good) {
            if !state.is_active(producer) {
                continue;
            }
            let p = state
                .price(producer)
                .ok_or_else(|| Error::MissingPrice(producer.to_string()))?;
            value += p * state.output(producer);
            let share = shares
                .final_shares
                .get(&(good.clone(), producer.clone()))
                .copied()
                .unwrap_or(0.0);
            weighted += d.get(producer).copied().unwrap_or(0.0) * share;
        }
        dc += value * weighted / total_gdp;
    }

    Ok(CentralityReport {
        tech: tech.clone(),
        affected_finals: affected,
        d_values,
        dc,
    })
}

//! Shared test support: a seeded generator for random layered economies in
//! equilibrium. All quantities are constructed so the equilibrium validator
//! accepts them exactly: producer prices of one good coincide, recipes pin
//! labor inputs through zero profit at unit wages, and flows split demand
//! with the same producer shares everywhere.

use std::collections::BTreeMap;

use prodnet::model::{
    Country, CountryId, Economy, FlowState, Good, GoodId, GoodKind, TechId, Technology,
    TransportCosts,
};
use prodnet::validate::{validate_equilibrium, DEFAULT_TOLERANCE};
use rand::Rng;
use rand::SeedableRng;
use rand_pcg::Pcg64;

pub struct GenOptions {
    pub countries: usize,
    pub single_sourced: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            countries: 1,
            single_sourced: false,
        }
    }
}

pub fn random_economy(seed: u64, opts: &GenOptions) -> (Economy, FlowState) {
    let mut rng = Pcg64::seed_from_u64(seed);
    let n_layers = rng.gen_range(2..=4usize);
    let mut layers: Vec<Vec<String>> = Vec::new();
    let mut gid = 0usize;
    for _ in 0..n_layers {
        let count = rng.gen_range(1..=3usize);
        layers.push(
            (0..count)
                .map(|_| {
                    gid += 1;
                    format!("g{gid:02}")
                })
                .collect(),
        );
    }

    struct RawTech {
        id: String,
        output: String,
        layer: usize,
        inputs: Vec<(String, f64)>,
    }
    let coeffs = [0.25, 0.5, 1.0, 1.5, 2.0];
    let mut raw: Vec<RawTech> = Vec::new();
    let mut producer_ids: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut tid = 0usize;
    for (l, goods) in layers.iter().enumerate() {
        for g in goods {
            let n_prod = if opts.single_sourced {
                1
            } else {
                rng.gen_range(1..=2usize)
            };
            for _ in 0..n_prod {
                tid += 1;
                let inputs = if l == 0 {
                    Vec::new()
                } else {
                    let pool = &layers[l - 1];
                    let k = rng.gen_range(1..=pool.len().min(2));
                    let mut picked: Vec<usize> = (0..pool.len()).collect();
                    for i in (1..picked.len()).rev() {
                        picked.swap(i, rng.gen_range(0..=i));
                    }
                    picked
                        .into_iter()
                        .take(k)
                        .map(|i| (pool[i].clone(), coeffs[rng.gen_range(0..coeffs.len())]))
                        .collect()
                };
                let id = format!("t{tid:02}");
                producer_ids.entry(g.clone()).or_default().push(raw.len());
                raw.push(RawTech {
                    id,
                    output: g.clone(),
                    layer: l,
                    inputs,
                });
            }
        }
    }

    // Every intermediate good needs a consumer, or its producers would sit
    // idle with a positive profit margin and fail validation.
    #[allow(clippy::needless_range_loop)]
    for l in 0..n_layers - 1 {
        for g in layers[l].clone() {
            let used = raw
                .iter()
                .any(|t| t.layer == l + 1 && t.inputs.iter().any(|(gi, _)| gi == &g));
            if !used {
                let users: Vec<usize> = raw
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.layer == l + 1)
                    .map(|(i, _)| i)
                    .collect();
                let pick = users[rng.gen_range(0..users.len())];
                raw[pick]
                    .inputs
                    .push((g.clone(), coeffs[rng.gen_range(0..coeffs.len())]));
            }
        }
    }

    // Producer shares of each good, shared by every user of it.
    let mut shares: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (g, prods) in &producer_ids {
        let weights: Vec<f64> = prods
            .iter()
            .map(|_| rng.gen_range(1..=3u32) as f64)
            .collect();
        let total: f64 = weights.iter().sum();
        shares.insert(g.clone(), weights.into_iter().map(|w| w / total).collect());
    }

    // Outputs, from the final layer upstream.
    let mut outputs = vec![0.0f64; raw.len()];
    for (i, t) in raw.iter().enumerate() {
        if t.layer == n_layers - 1 {
            outputs[i] = rng.gen_range(1..=3u32) as f64;
        }
    }
    for l in (0..n_layers - 1).rev() {
        let mut demand: BTreeMap<&String, f64> = BTreeMap::new();
        for (j, user) in raw.iter().enumerate() {
            if user.layer != l + 1 {
                continue;
            }
            for (g, a) in &user.inputs {
                *demand.entry(g).or_insert(0.0) += a * outputs[j];
            }
        }
        for (i, t) in raw.iter().enumerate() {
            if t.layer != l {
                continue;
            }
            let d = demand.get(&t.output).copied().unwrap_or(0.0);
            let prods = &producer_ids[&t.output];
            let k = prods.iter().position(|p| raw[*p].id == t.id).unwrap();
            outputs[i] = d * shares[&t.output][k];
        }
    }

    // Prices per good so every producer earns zero profit at unit wages;
    // the residual over input cost becomes the labor coefficient.
    let mut good_price: BTreeMap<String, f64> = BTreeMap::new();
    let mut labor_coeff = vec![0.0f64; raw.len()];
    for l in 0..n_layers {
        for (g, prods) in &producer_ids {
            if raw[prods[0]].layer != l {
                continue;
            }
            let costs: Vec<f64> = prods
                .iter()
                .map(|&p| {
                    raw[p]
                        .inputs
                        .iter()
                        .map(|(gi, a)| a * good_price[gi])
                        .sum::<f64>()
                })
                .collect();
            let max_cost = costs.iter().cloned().fold(0.0, f64::max);
            let price = max_cost + rng.gen_range(0.25..1.0);
            good_price.insert(g.clone(), price);
            for (k, &p) in prods.iter().enumerate() {
                labor_coeff[p] = price - costs[k];
            }
        }
    }

    // Assign countries round-robin so every country gets technologies.
    let n_countries = opts.countries.max(1);
    let country_of = |i: usize| format!("c{}", i % n_countries);

    let goods: Vec<Good> = layers
        .iter()
        .enumerate()
        .flat_map(|(l, gs)| {
            gs.iter().map(move |g| Good {
                id: GoodId::from(g.as_str()),
                kind: if l == n_layers - 1 {
                    GoodKind::Final
                } else {
                    GoodKind::Intermediate
                },
            })
        })
        .collect();
    let technologies: Vec<Technology> = raw
        .iter()
        .enumerate()
        .map(|(i, t)| Technology {
            id: TechId::from(t.id.as_str()),
            country: CountryId::from(country_of(i).as_str()),
            output: GoodId::from(t.output.as_str()),
            labor_input: labor_coeff[i],
            inputs: t
                .inputs
                .iter()
                .map(|(g, a)| (GoodId::from(g.as_str()), *a))
                .collect(),
        })
        .collect();
    let mut endowments: BTreeMap<String, f64> = BTreeMap::new();
    for (i, _) in raw.iter().enumerate() {
        *endowments.entry(country_of(i)).or_insert(0.0) += labor_coeff[i] * outputs[i];
    }
    let countries: Vec<Country> = endowments
        .iter()
        .map(|(c, l)| Country {
            id: CountryId::from(c.as_str()),
            labor_endowment: *l,
        })
        .collect();
    // Demand shares consistent with the constructed equilibrium: each final
    // good's expenditure share of GDP.
    let mut final_values: BTreeMap<String, f64> = BTreeMap::new();
    for (i, t) in raw.iter().enumerate() {
        if t.layer == n_layers - 1 {
            *final_values.entry(t.output.clone()).or_insert(0.0) +=
                good_price[&t.output] * outputs[i];
        }
    }
    let total_value: f64 = final_values.values().sum();
    let demand_shares: BTreeMap<GoodId, f64> = final_values
        .iter()
        .map(|(g, v)| (GoodId::from(g.as_str()), v / total_value))
        .collect();

    let economy = Economy::new(
        countries,
        goods,
        technologies,
        TransportCosts::frictionless(),
        Some(demand_shares),
    )
    .expect("generated economy is well-formed");

    // Flows: each user sources a_g * y split across producers by the
    // shared shares; labor flows cover the labor coefficient exactly.
    let mut good_flows: BTreeMap<(TechId, TechId), f64> = BTreeMap::new();
    let mut labor_flows: BTreeMap<(CountryId, TechId), f64> = BTreeMap::new();
    let mut out_map: BTreeMap<TechId, f64> = BTreeMap::new();
    let mut prices: BTreeMap<TechId, f64> = BTreeMap::new();
    for (i, t) in raw.iter().enumerate() {
        out_map.insert(TechId::from(t.id.as_str()), outputs[i]);
        prices.insert(TechId::from(t.id.as_str()), good_price[&t.output]);
        labor_flows.insert(
            (
                CountryId::from(country_of(i).as_str()),
                TechId::from(t.id.as_str()),
            ),
            labor_coeff[i] * outputs[i],
        );
        for (g, a) in &t.inputs {
            let prods = &producer_ids[g];
            for (k, &p) in prods.iter().enumerate() {
                let amount = a * outputs[i] * shares[g][k];
                if amount > 0.0 {
                    *good_flows
                        .entry((
                            TechId::from(raw[p].id.as_str()),
                            TechId::from(t.id.as_str()),
                        ))
                        .or_insert(0.0) += amount;
                }
            }
        }
    }
    let wages: BTreeMap<CountryId, f64> = endowments
        .keys()
        .map(|c| (CountryId::from(c.as_str()), 1.0))
        .collect();
    let state = FlowState::new(good_flows, labor_flows, out_map, prices, wages)
        .expect("generated flows are well-formed");

    let report = validate_equilibrium(&economy, &state, DEFAULT_TOLERANCE)
        .expect("validation runs");
    assert!(
        report.is_empty(),
        "seed {seed}: generated state must be an equilibrium: {report:?}"
    );
    (economy, state)
}

/// A technology with positive output, chosen deterministically by seed.
pub fn pick_active(state: &FlowState, seed: u64) -> TechId {
    let active = state.active_techs();
    let mut rng = Pcg64::seed_from_u64(seed.wrapping_mul(0x9e37_79b9));
    active[rng.gen_range(0..active.len())].clone()
}

//! Programmatic constructors for the built-in example economies and their
//! equilibrium flows, shared by tests and the CLI's fixture emitter. Where
//! an example leaves prices free, the wage is normalized and prices follow
//! from zero profit.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::model::{
    Country, CountryId, Economy, FlowState, Good, GoodId, GoodKind, TechId, Technology,
    TransportCosts,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureId {
    Fig1Chain,
    Fig5PanelA,
    Fig5PanelB,
    Fig7Power,
    Fig9FiveCountry,
    Fig11NonConcave,
    Fig12Vertical,
    Fig12Horizontal,
    Fig12Parallel,
    AppendixBExtended,
    AppendixBWithBranch,
    ChipsMediumRun,
    FlexibleRerouting,
    StrategicPower,
    LprFamily(u32),
}

pub const FIXTURE_NAMES: &[&str] = &[
    "fig1-chain",
    "fig5-panel-a",
    "fig5-panel-b",
    "fig7-power",
    "fig9-five-country",
    "fig11-non-concave",
    "fig12-vertical",
    "fig12-horizontal",
    "fig12-parallel",
    "appendix-b-extended",
    "appendix-b-with-branch",
    "chips-medium-run",
    "flexible-rerouting",
    "strategic-power",
    "lpr-family-<t>",
];

impl fmt::Display for FixtureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureId::Fig1Chain => write!(f, "fig1-chain"),
            FixtureId::Fig5PanelA => write!(f, "fig5-panel-a"),
            FixtureId::Fig5PanelB => write!(f, "fig5-panel-b"),
            FixtureId::Fig7Power => write!(f, "fig7-power"),
            FixtureId::Fig9FiveCountry => write!(f, "fig9-five-country"),
            FixtureId::Fig11NonConcave => write!(f, "fig11-non-concave"),
            FixtureId::Fig12Vertical => write!(f, "fig12-vertical"),
            FixtureId::Fig12Horizontal => write!(f, "fig12-horizontal"),
            FixtureId::Fig12Parallel => write!(f, "fig12-parallel"),
            FixtureId::AppendixBExtended => write!(f, "appendix-b-extended"),
            FixtureId::AppendixBWithBranch => write!(f, "appendix-b-with-branch"),
            FixtureId::ChipsMediumRun => write!(f, "chips-medium-run"),
            FixtureId::FlexibleRerouting => write!(f, "flexible-rerouting"),
            FixtureId::StrategicPower => write!(f, "strategic-power"),
            FixtureId::LprFamily(t) => write!(f, "lpr-family-{t}"),
        }
    }
}

impl FromStr for FixtureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "fig1-chain" => FixtureId::Fig1Chain,
            "fig5-panel-a" => FixtureId::Fig5PanelA,
            "fig5-panel-b" => FixtureId::Fig5PanelB,
            "fig7-power" => FixtureId::Fig7Power,
            "fig9-five-country" => FixtureId::Fig9FiveCountry,
            "fig11-non-concave" => FixtureId::Fig11NonConcave,
            "fig12-vertical" => FixtureId::Fig12Vertical,
            "fig12-horizontal" => FixtureId::Fig12Horizontal,
            "fig12-parallel" => FixtureId::Fig12Parallel,
            "appendix-b-extended" => FixtureId::AppendixBExtended,
            "appendix-b-with-branch" => FixtureId::AppendixBWithBranch,
            "chips-medium-run" => FixtureId::ChipsMediumRun,
            "flexible-rerouting" => FixtureId::FlexibleRerouting,
            "strategic-power" => FixtureId::StrategicPower,
            other => {
                if let Some(t) = other.strip_prefix("lpr-family-") {
                    let t: u32 = t
                        .parse()
                        .map_err(|_| format!("bad family size in {other:?}"))?;
                    if t < 2 {
                        return Err("lpr family size must be at least 2".into());
                    }
                    FixtureId::LprFamily(t)
                } else {
                    return Err(format!("unknown fixture {other:?}"));
                }
            }
        })
    }
}

/// All fixed fixtures plus a small slice of the parameterized family.
pub fn all_fixtures() -> Vec<FixtureId> {
    vec![
        FixtureId::Fig1Chain,
        FixtureId::Fig5PanelA,
        FixtureId::Fig5PanelB,
        FixtureId::Fig7Power,
        FixtureId::Fig9FiveCountry,
        FixtureId::Fig11NonConcave,
        FixtureId::Fig12Vertical,
        FixtureId::Fig12Horizontal,
        FixtureId::Fig12Parallel,
        FixtureId::AppendixBExtended,
        FixtureId::AppendixBWithBranch,
        FixtureId::ChipsMediumRun,
        FixtureId::FlexibleRerouting,
        FixtureId::StrategicPower,
        FixtureId::LprFamily(2),
        FixtureId::LprFamily(3),
        FixtureId::LprFamily(6),
    ]
}

pub fn build(id: FixtureId) -> (Economy, FlowState) {
    match id {
        FixtureId::Fig1Chain => fig1_chain(),
        FixtureId::Fig5PanelA => fig5(false),
        FixtureId::Fig5PanelB => fig5(true),
        FixtureId::Fig7Power => fig7_power(),
        FixtureId::Fig9FiveCountry => fig9_five_country(),
        FixtureId::Fig11NonConcave => fig11_non_concave(),
        FixtureId::Fig12Vertical => fig12_vertical(),
        FixtureId::Fig12Horizontal => fig12_horizontal(),
        FixtureId::Fig12Parallel => fig12_parallel(),
        FixtureId::AppendixBExtended => appendix_b_extended(),
        FixtureId::AppendixBWithBranch => appendix_b_with_branch(),
        FixtureId::ChipsMediumRun => chips_medium_run(),
        FixtureId::FlexibleRerouting => flexible_rerouting(),
        FixtureId::StrategicPower => strategic_power_fixture(),
        FixtureId::LprFamily(t) => lpr_family(t),
    }
}

// ---------------------------------------------------------------------------
// Small builder helpers
// ---------------------------------------------------------------------------

fn tech(
    id: &str,
    country: &str,
    output: &str,
    labor_input: f64,
    inputs: &[(&str, f64)],
) -> Technology {
    Technology {
        id: TechId::from(id),
        country: CountryId::from(country),
        output: GoodId::from(output),
        labor_input,
        inputs: inputs
            .iter()
            .map(|(g, q)| (GoodId::from(*g), *q))
            .collect(),
    }
}

fn good(id: &str, kind: GoodKind) -> Good {
    Good {
        id: GoodId::from(id),
        kind,
    }
}

fn country(id: &str, labor: f64) -> Country {
    Country {
        id: CountryId::from(id),
        labor_endowment: labor,
    }
}

#[derive(Default)]
struct StateBuilder {
    good_flows: BTreeMap<(TechId, TechId), f64>,
    labor_flows: BTreeMap<(CountryId, TechId), f64>,
    outputs: BTreeMap<TechId, f64>,
    prices: BTreeMap<TechId, f64>,
    wages: BTreeMap<CountryId, f64>,
}

impl StateBuilder {
    fn flow(mut self, from: &str, to: &str, amount: f64) -> Self {
        self.good_flows
            .insert((TechId::from(from), TechId::from(to)), amount);
        self
    }

    fn labor(mut self, from: &str, to: &str, amount: f64) -> Self {
        self.labor_flows
            .insert((CountryId::from(from), TechId::from(to)), amount);
        self
    }

    fn out(mut self, tech: &str, y: f64, price: f64) -> Self {
        self.outputs.insert(TechId::from(tech), y);
        self.prices.insert(TechId::from(tech), price);
        self
    }

    fn wage(mut self, c: &str, w: f64) -> Self {
        self.wages.insert(CountryId::from(c), w);
        self
    }

    fn finish(self) -> FlowState {
        FlowState::new(
            self.good_flows,
            self.labor_flows,
            self.outputs,
            self.prices,
            self.wages,
        )
        .expect("fixture flows are well-formed")
    }
}

fn economy(
    countries: Vec<Country>,
    goods: Vec<Good>,
    technologies: Vec<Technology>,
    demand_shares: Option<BTreeMap<GoodId, f64>>,
) -> Economy {
    Economy::new(
        countries,
        goods,
        technologies,
        TransportCosts::frictionless(),
        demand_shares,
    )
    .expect("fixture economy is well-formed")
}

fn single_final_demand(good_id: &str) -> Option<BTreeMap<GoodId, f64>> {
    Some(BTreeMap::from([(GoodId::from(good_id), 1.0)]))
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

/// Three-technology chain: raw material, intermediate, final good; one
/// country endowed with 10 units of labor; prices (0.1, 0.1, 0.8, 1).
fn fig1_chain() -> (Economy, FlowState) {
    let eco = economy(
        vec![country("home", 10.0)],
        vec![
            good("R", GoodKind::Intermediate),
            good("I", GoodKind::Intermediate),
            good("F", GoodKind::Final),
        ],
        vec![
            tech("tau_R", "home", "R", 1.0, &[]),
            tech("tau_I", "home", "I", 7.0, &[("R", 1.0)]),
            tech("tau_F", "home", "F", 1.0, &[("R", 1.0), ("I", 1.0)]),
        ],
        single_final_demand("F"),
    );
    let state = StateBuilder::default()
        .out("tau_R", 2.0, 0.1)
        .out("tau_I", 1.0, 0.8)
        .out("tau_F", 1.0, 1.0)
        .flow("tau_R", "tau_I", 1.0)
        .flow("tau_R", "tau_F", 1.0)
        .flow("tau_I", "tau_F", 1.0)
        .labor("home", "tau_R", 2.0)
        .labor("home", "tau_I", 7.0)
        .labor("home", "tau_F", 1.0)
        .wage("home", 0.1)
        .finish();
    (eco, state)
}

/// Two copies of the chain economy, labor endowment 20, GDP 2. `crossed`
/// selects the wiring in which the two finals source raw material from the
/// opposite chain.
fn fig5(crossed: bool) -> (Economy, FlowState) {
    let eco = economy(
        vec![country("home", 20.0)],
        vec![
            good("R", GoodKind::Intermediate),
            good("I", GoodKind::Intermediate),
            good("F", GoodKind::Final),
        ],
        vec![
            tech("tau1", "home", "R", 1.0, &[]),
            tech("tau2", "home", "R", 1.0, &[]),
            tech("tau3", "home", "I", 7.0, &[("R", 1.0)]),
            tech("tau4", "home", "I", 7.0, &[("R", 1.0)]),
            tech("tau5", "home", "F", 1.0, &[("R", 1.0), ("I", 1.0)]),
            tech("tau6", "home", "F", 1.0, &[("R", 1.0), ("I", 1.0)]),
        ],
        single_final_demand("F"),
    );
    let mut b = StateBuilder::default()
        .out("tau1", 2.0, 0.1)
        .out("tau2", 2.0, 0.1)
        .out("tau3", 1.0, 0.8)
        .out("tau4", 1.0, 0.8)
        .out("tau5", 1.0, 1.0)
        .out("tau6", 1.0, 1.0)
        .flow("tau1", "tau3", 1.0)
        .flow("tau2", "tau4", 1.0)
        .flow("tau3", "tau5", 1.0)
        .flow("tau4", "tau6", 1.0)
        .labor("home", "tau1", 2.0)
        .labor("home", "tau2", 2.0)
        .labor("home", "tau3", 7.0)
        .labor("home", "tau4", 7.0)
        .labor("home", "tau5", 1.0)
        .labor("home", "tau6", 1.0)
        .wage("home", 0.1);
    b = if crossed {
        b.flow("tau1", "tau6", 1.0).flow("tau2", "tau5", 1.0)
    } else {
        b.flow("tau1", "tau5", 1.0).flow("tau2", "tau6", 1.0)
    };
    (eco, b.finish())
}

/// Two-country power example: the aggressor can starve the target's chain
/// for one unit of own labor. Final price normalized to 1, wage 1/3.
fn fig7_power() -> (Economy, FlowState) {
    let w = 1.0 / 3.0;
    let p_g1 = 2.0 * w;
    let p_g2 = w;
    let p_g3 = p_g1 + p_g2 + 2.0 * w;
    let eco = economy(
        vec![country("i", 70.0), country("j", 50.0)],
        vec![
            good("g1", GoodKind::Intermediate),
            good("g2", GoodKind::Intermediate),
            good("g3", GoodKind::Intermediate),
            good("fin", GoodKind::Final),
        ],
        vec![
            tech("tau1", "j", "g1", 2.0, &[]),
            tech("tau2", "i", "g2", 1.0, &[]),
            tech("tau3", "j", "g3", 2.0, &[("g1", 1.0), ("g2", 1.0)]),
            tech("tau4", "j", "fin", 0.5, &[("g3", 0.5)]),
            tech("tau5", "i", "fin", 2.5, &[("g2", 0.5)]),
        ],
        single_final_demand("fin"),
    );
    let state = StateBuilder::default()
        .out("tau1", 10.0, p_g1)
        .out("tau2", 20.0, p_g2)
        .out("tau3", 10.0, p_g3)
        .out("tau4", 20.0, 1.0)
        .out("tau5", 20.0, 1.0)
        .flow("tau1", "tau3", 10.0)
        .flow("tau2", "tau3", 10.0)
        .flow("tau2", "tau5", 10.0)
        .flow("tau3", "tau4", 10.0)
        .labor("j", "tau1", 20.0)
        .labor("i", "tau2", 20.0)
        .labor("j", "tau3", 20.0)
        .labor("j", "tau4", 10.0)
        .labor("i", "tau5", 50.0)
        .wage("i", w)
        .wage("j", w)
        .finish();
    (eco, state)
}

/// Five-country economy with two large countries operating several
/// technologies each. Prices come from zero profit at unit wages and are
/// not contractual; power analysis reads labor and flows only.
fn fig9_five_country() -> (Economy, FlowState) {
    let eco = economy(
        vec![
            country("c1", 100.0),
            country("c2", 100.0),
            country("c3", 4.0),
            country("c4", 11.0),
            country("c5", 35.0),
        ],
        vec![
            good("R1", GoodKind::Intermediate),
            good("R2", GoodKind::Intermediate),
            good("R3", GoodKind::Intermediate),
            good("I1", GoodKind::Intermediate),
            good("I2", GoodKind::Intermediate),
            good("I3", GoodKind::Intermediate),
            good("I4", GoodKind::Intermediate),
            good("I5", GoodKind::Intermediate),
            good("I6", GoodKind::Intermediate),
            good("F1", GoodKind::Final),
            good("F2", GoodKind::Final),
            good("F3", GoodKind::Final),
            good("F4", GoodKind::Final),
        ],
        vec![
            tech("R1-3", "c3", "R1", 1.0, &[]),
            tech("R2-1", "c1", "R2", 1.0, &[]),
            tech("R3-4", "c4", "R3", 1.0, &[]),
            tech("I1-2", "c2", "I1", 1.0, &[("R1", 0.1)]),
            tech("I2-1", "c1", "I2", 1.0, &[("R1", 0.1)]),
            tech("I3-1", "c1", "I3", 1.0, &[("R2", 1.0)]),
            tech("I4-1", "c1", "I4", 1.0, &[("R3", 2.75)]),
            tech("I5-1", "c1", "I5", 1.0, &[("I3", 0.2)]),
            tech("I5-2", "c2", "I5", 1.0, &[("I3", 0.2)]),
            tech("I6-1", "c1", "I6", 1.0, &[("I3", 1.0)]),
            tech("F1-2", "c2", "F1", 1.0, &[("I1", 2.0 / 7.0), ("I2", 2.0 / 7.0)]),
            tech("F1-5", "c5", "F1", 1.0, &[("I1", 2.0 / 7.0), ("I2", 2.0 / 7.0)]),
            tech("F2-1", "c1", "F2", 1.0, &[("I5", 0.5), ("I6", 0.1)]),
            tech("F2-2", "c2", "F2", 1.0, &[("I5", 0.5), ("I6", 0.1)]),
            tech("F3-1", "c1", "F3", 1.0, &[("I6", 0.1)]),
            // 0.8 labor per unit keeps Country 1's employment at 100; this
            // chain is isolated from every cross-border disruption anyway.
            tech("F4-1", "c1", "F4", 0.8, &[("I4", 0.4)]),
        ],
        None,
    );
    let p_f1 = 2.0 / 7.0 * 1.1 + 2.0 / 7.0 * 1.1 + 1.0;
    let state = StateBuilder::default()
        .out("R1-3", 4.0, 1.0)
        .out("R2-1", 11.0, 1.0)
        .out("R3-4", 11.0, 1.0)
        .out("I1-2", 20.0, 1.1)
        .out("I2-1", 20.0, 1.1)
        .out("I3-1", 11.0, 2.0)
        .out("I4-1", 4.0, 3.75)
        .out("I5-1", 10.0, 1.4)
        .out("I5-2", 15.0, 1.4)
        .out("I6-1", 6.0, 3.0)
        .out("F1-2", 35.0, p_f1)
        .out("F1-5", 35.0, p_f1)
        .out("F2-1", 20.0, 2.0)
        .out("F2-2", 30.0, 2.0)
        .out("F3-1", 10.0, 1.3)
        .out("F4-1", 10.0, 2.3)
        .flow("R1-3", "I1-2", 2.0)
        .flow("R1-3", "I2-1", 2.0)
        .flow("R2-1", "I3-1", 11.0)
        .flow("R3-4", "I4-1", 11.0)
        .flow("I1-2", "F1-5", 10.0)
        .flow("I1-2", "F1-2", 10.0)
        .flow("I2-1", "F1-5", 10.0)
        .flow("I2-1", "F1-2", 10.0)
        .flow("I3-1", "I5-2", 3.0)
        .flow("I3-1", "I5-1", 2.0)
        .flow("I3-1", "I6-1", 6.0)
        .flow("I4-1", "F4-1", 4.0)
        .flow("I5-1", "F2-1", 10.0)
        .flow("I5-2", "F2-2", 15.0)
        .flow("I6-1", "F2-2", 3.0)
        .flow("I6-1", "F2-1", 2.0)
        .flow("I6-1", "F3-1", 1.0)
        .labor("c3", "R1-3", 4.0)
        .labor("c1", "R2-1", 11.0)
        .labor("c4", "R3-4", 11.0)
        .labor("c2", "I1-2", 20.0)
        .labor("c1", "I2-1", 20.0)
        .labor("c1", "I3-1", 11.0)
        .labor("c1", "I4-1", 4.0)
        .labor("c1", "I5-1", 10.0)
        .labor("c2", "I5-2", 15.0)
        .labor("c1", "I6-1", 6.0)
        .labor("c2", "F1-2", 35.0)
        .labor("c5", "F1-5", 35.0)
        .labor("c1", "F2-1", 20.0)
        .labor("c2", "F2-2", 30.0)
        .labor("c1", "F3-1", 10.0)
        .labor("c1", "F4-1", 8.0)
        .wage("c1", 1.0)
        .wage("c2", 1.0)
        .wage("c3", 1.0)
        .wage("c4", 1.0)
        .wage("c5", 1.0)
        .finish();
    (eco, state)
}

/// Non-concave frontier example: two marginal disruptions with equal power
/// whose combination, once both flows are zeroed out, is strictly more
/// powerful than either.
fn fig11_non_concave() -> (Economy, FlowState) {
    let eco = economy(
        vec![country("i", 20.0), country("j", 50.0)],
        vec![
            good("gA", GoodKind::Intermediate),
            good("gB", GoodKind::Intermediate),
            good("gC", GoodKind::Intermediate),
            good("fin", GoodKind::Final),
        ],
        vec![
            tech("a1", "j", "gA", 1.0, &[]),
            tech("a2", "j", "gB", 2.0, &[]),
            tech("a3", "i", "gB", 2.0, &[]),
            tech("mid", "j", "gC", 1.0, &[("gA", 0.5), ("gB", 0.5)]),
            tech("f1", "j", "fin", 0.5, &[("gC", 0.5)]),
            tech("f2", "i", "fin", 0.5, &[("gC", 0.5)]),
        ],
        single_final_demand("fin"),
    );
    let state = StateBuilder::default()
        .out("a1", 10.0, 1.0)
        .out("a2", 5.0, 2.0)
        .out("a3", 5.0, 2.0)
        .out("mid", 20.0, 2.5)
        .out("f1", 20.0, 1.75)
        .out("f2", 20.0, 1.75)
        .flow("a1", "mid", 10.0)
        .flow("a2", "mid", 5.0)
        .flow("a3", "mid", 5.0)
        .flow("mid", "f1", 10.0)
        .flow("mid", "f2", 10.0)
        .labor("j", "a1", 10.0)
        .labor("j", "a2", 10.0)
        .labor("i", "a3", 10.0)
        .labor("j", "mid", 20.0)
        .labor("j", "f1", 10.0)
        .labor("i", "f2", 10.0)
        .wage("i", 1.0)
        .wage("j", 1.0)
        .finish();
    (eco, state)
}

/// Vertical chain of four inputs into one final good; labor endowment 5,
/// prices (0.2, 0.2, 0.4, 0.6, 0.8, 1).
fn fig12_vertical() -> (Economy, FlowState) {
    let eco = economy(
        vec![country("home", 5.0)],
        vec![
            good("g1", GoodKind::Intermediate),
            good("g2", GoodKind::Intermediate),
            good("g3", GoodKind::Intermediate),
            good("g4", GoodKind::Intermediate),
            good("fin", GoodKind::Final),
        ],
        vec![
            tech("t1", "home", "g1", 1.0, &[]),
            tech("t2", "home", "g2", 1.0, &[("g1", 1.0)]),
            tech("t3", "home", "g3", 1.0, &[("g2", 1.0)]),
            tech("t4", "home", "g4", 1.0, &[("g3", 1.0)]),
            tech("tf", "home", "fin", 1.0, &[("g4", 1.0)]),
        ],
        single_final_demand("fin"),
    );
    let state = StateBuilder::default()
        .out("t1", 1.0, 0.2)
        .out("t2", 1.0, 0.4)
        .out("t3", 1.0, 0.6)
        .out("t4", 1.0, 0.8)
        .out("tf", 1.0, 1.0)
        .flow("t1", "t2", 1.0)
        .flow("t2", "t3", 1.0)
        .flow("t3", "t4", 1.0)
        .flow("t4", "tf", 1.0)
        .labor("home", "t1", 1.0)
        .labor("home", "t2", 1.0)
        .labor("home", "t3", 1.0)
        .labor("home", "t4", 1.0)
        .labor("home", "tf", 1.0)
        .wage("home", 0.2)
        .finish();
    (eco, state)
}

/// Four inputs feeding one final good directly.
fn fig12_horizontal() -> (Economy, FlowState) {
    let eco = economy(
        vec![country("home", 5.0)],
        vec![
            good("g1", GoodKind::Intermediate),
            good("g2", GoodKind::Intermediate),
            good("g3", GoodKind::Intermediate),
            good("g4", GoodKind::Intermediate),
            good("fin", GoodKind::Final),
        ],
        vec![
            tech("t1", "home", "g1", 1.0, &[]),
            tech("t2", "home", "g2", 1.0, &[]),
            tech("t3", "home", "g3", 1.0, &[]),
            tech("t4", "home", "g4", 1.0, &[]),
            tech(
                "tf",
                "home",
                "fin",
                1.0,
                &[("g1", 1.0), ("g2", 1.0), ("g3", 1.0), ("g4", 1.0)],
            ),
        ],
        single_final_demand("fin"),
    );
    let mut b = StateBuilder::default()
        .out("t1", 1.0, 0.2)
        .out("t2", 1.0, 0.2)
        .out("t3", 1.0, 0.2)
        .out("t4", 1.0, 0.2)
        .out("tf", 1.0, 1.0)
        .wage("home", 0.2);
    for t in ["t1", "t2", "t3", "t4"] {
        b = b.flow(t, "tf", 1.0).labor("home", t, 1.0);
    }
    b = b.labor("home", "tf", 1.0);
    (eco, b.finish())
}

/// Four disjoint chains, each input reaching its own final good.
fn fig12_parallel() -> (Economy, FlowState) {
    let goods = vec![
        good("g1", GoodKind::Intermediate),
        good("g2", GoodKind::Intermediate),
        good("g3", GoodKind::Intermediate),
        good("g4", GoodKind::Intermediate),
        good("fin1", GoodKind::Final),
        good("fin2", GoodKind::Final),
        good("fin3", GoodKind::Final),
        good("fin4", GoodKind::Final),
    ];
    let mut techs = Vec::new();
    for k in 1..=4 {
        techs.push(tech(
            &format!("t{k}"),
            "home",
            &format!("g{k}"),
            1.0,
            &[],
        ));
        techs.push(tech(
            &format!("f{k}"),
            "home",
            &format!("fin{k}"),
            0.25,
            &[(&format!("g{k}"), 1.0)],
        ));
    }
    let shares: BTreeMap<GoodId, f64> = (1..=4)
        .map(|k| (GoodId::from(format!("fin{k}").as_str()), 0.25))
        .collect();
    let eco = economy(vec![country("home", 5.0)], goods, techs, Some(shares));
    let mut b = StateBuilder::default().wage("home", 0.2);
    for k in 1..=4 {
        let t = format!("t{k}");
        let f = format!("f{k}");
        b = b
            .out(&t, 1.0, 0.2)
            .out(&f, 1.0, 0.25)
            .flow(&t, &f, 1.0)
            .labor("home", &t, 1.0)
            .labor("home", &f, 0.25);
    }
    (eco, b.finish())
}

/// Ten-technology network with sourcing diversity and a cycle through the
/// two mid-tier producers; outputs (6,4,8,2,5,10,5,3,4,3).
fn appendix_b_extended() -> (Economy, FlowState) {
    let eco = economy(
        vec![country("home", 100.0)],
        vec![
            good("gA", GoodKind::Intermediate),
            good("gB", GoodKind::Intermediate),
            good("gC", GoodKind::Intermediate),
            good("gD", GoodKind::Intermediate),
            good("fin", GoodKind::Final),
        ],
        vec![
            tech("tau01", "home", "gA", 1.0, &[]),
            tech("tau02", "home", "gA", 1.0, &[]),
            tech("tau03", "home", "gB", 1.0, &[("gA", 1.0), ("gC", 0.5)]),
            tech("tau04", "home", "gB", 1.0, &[("gA", 1.0), ("gC", 0.5)]),
            tech("tau05", "home", "gD", 1.0, &[("gB", 2.0 / 3.0)]),
            tech("tau06", "home", "gD", 1.0, &[("gB", 2.0 / 3.0)]),
            tech("tau07", "home", "gC", 1.0, &[("gD", 1.0)]),
            tech("tau08", "home", "fin", 6.0, &[("gD", 1.0)]),
            tech("tau09", "home", "fin", 6.0, &[("gD", 1.0)]),
            tech("tau10", "home", "fin", 6.0, &[("gD", 1.0)]),
        ],
        single_final_demand("fin"),
    );
    let w = 0.1;
    let state = StateBuilder::default()
        .out("tau01", 6.0, 0.1)
        .out("tau02", 4.0, 0.1)
        .out("tau03", 8.0, 0.45)
        .out("tau04", 2.0, 0.45)
        .out("tau05", 5.0, 0.4)
        .out("tau06", 10.0, 0.4)
        .out("tau07", 5.0, 0.5)
        .out("tau08", 3.0, 1.0)
        .out("tau09", 4.0, 1.0)
        .out("tau10", 3.0, 1.0)
        .flow("tau01", "tau03", 6.0)
        .flow("tau02", "tau03", 2.0)
        .flow("tau02", "tau04", 2.0)
        .flow("tau07", "tau03", 4.0)
        .flow("tau07", "tau04", 1.0)
        .flow("tau03", "tau05", 10.0 / 3.0)
        .flow("tau03", "tau06", 14.0 / 3.0)
        .flow("tau04", "tau06", 2.0)
        .flow("tau06", "tau07", 5.0)
        .flow("tau05", "tau08", 3.0)
        .flow("tau05", "tau09", 2.0)
        .flow("tau06", "tau09", 2.0)
        .flow("tau06", "tau10", 3.0)
        .labor("home", "tau01", 6.0)
        .labor("home", "tau02", 4.0)
        .labor("home", "tau03", 8.0)
        .labor("home", "tau04", 2.0)
        .labor("home", "tau05", 5.0)
        .labor("home", "tau06", 10.0)
        .labor("home", "tau07", 5.0)
        .labor("home", "tau08", 18.0)
        .labor("home", "tau09", 24.0)
        .labor("home", "tau10", 18.0)
        .wage("home", w)
        .finish();
    (eco, state)
}

/// The extended example with the cycle removed and a second, single-chain
/// final good branching off the shared raw-material producer. This is the
/// centrality example; all final prices are 1.
fn appendix_b_with_branch() -> (Economy, FlowState) {
    let eco = economy(
        vec![country("home", 150.0)],
        vec![
            good("gA", GoodKind::Intermediate),
            good("gB", GoodKind::Intermediate),
            good("gD", GoodKind::Intermediate),
            good("gZ", GoodKind::Intermediate),
            good("gW", GoodKind::Intermediate),
            good("finMain", GoodKind::Final),
            good("finBranch", GoodKind::Final),
        ],
        vec![
            tech("tau00", "home", "gZ", 1.0, &[]),
            tech("tau01", "home", "gA", 1.0, &[]),
            tech("tau02", "home", "gA", 1.0, &[]),
            tech("tau03", "home", "gB", 2.0, &[("gA", 1.0)]),
            tech("tau04", "home", "gB", 2.0, &[("gA", 1.0)]),
            tech("tau05", "home", "gD", 4.0, &[("gB", 2.0 / 3.0)]),
            tech("tau06", "home", "gD", 2.0, &[("gB", 4.0 / 3.0)]),
            tech("tau08", "home", "finMain", 4.0, &[("gD", 1.0)]),
            tech("tau09", "home", "finMain", 4.0, &[("gD", 1.0)]),
            tech("tau10", "home", "finMain", 4.0, &[("gD", 1.0)]),
            tech("tau11", "home", "gW", 3.6, &[("gZ", 2.0), ("gA", 0.4)]),
            tech("tau12", "home", "finBranch", 4.0, &[("gW", 1.0)]),
        ],
        Some(BTreeMap::from([
            (GoodId::from("finMain"), 2.0 / 3.0),
            (GoodId::from("finBranch"), 1.0 / 3.0),
        ])),
    );
    let state = StateBuilder::default()
        .out("tau00", 10.0, 0.1)
        .out("tau01", 6.0, 0.1)
        .out("tau02", 6.0, 0.1)
        .out("tau03", 8.0, 0.3)
        .out("tau04", 2.0, 0.3)
        .out("tau05", 5.0, 0.6)
        .out("tau06", 5.0, 0.6)
        .out("tau08", 3.0, 1.0)
        .out("tau09", 4.0, 1.0)
        .out("tau10", 3.0, 1.0)
        .out("tau11", 5.0, 0.6)
        .out("tau12", 5.0, 1.0)
        .flow("tau00", "tau11", 10.0)
        .flow("tau01", "tau03", 6.0)
        .flow("tau02", "tau03", 2.0)
        .flow("tau02", "tau04", 2.0)
        .flow("tau02", "tau11", 2.0)
        .flow("tau03", "tau05", 10.0 / 3.0)
        .flow("tau03", "tau06", 14.0 / 3.0)
        .flow("tau04", "tau06", 2.0)
        .flow("tau05", "tau08", 3.0)
        .flow("tau05", "tau09", 2.0)
        .flow("tau06", "tau09", 2.0)
        .flow("tau06", "tau10", 3.0)
        .flow("tau11", "tau12", 5.0)
        .labor("home", "tau00", 10.0)
        .labor("home", "tau01", 6.0)
        .labor("home", "tau02", 6.0)
        .labor("home", "tau03", 16.0)
        .labor("home", "tau04", 4.0)
        .labor("home", "tau05", 20.0)
        .labor("home", "tau06", 10.0)
        .labor("home", "tau08", 12.0)
        .labor("home", "tau09", 16.0)
        .labor("home", "tau10", 12.0)
        .labor("home", "tau11", 18.0)
        .labor("home", "tau12", 20.0)
        .wage("home", 0.1)
        .finish();
    (eco, state)
}

/// One cheap and one expensive final good sharing a scarce input. Labor
/// priced at 1; the finals are worth 1 and 9 of a GDP of 10.
fn chips_medium_run() -> (Economy, FlowState) {
    let eco = economy(
        vec![country("home", 10.0)],
        vec![
            good("R1", GoodKind::Intermediate),
            good("F1", GoodKind::Final),
            good("F2", GoodKind::Final),
        ],
        vec![
            tech("tR1", "home", "R1", 0.9, &[]),
            tech("tF1", "home", "F1", 0.1, &[("R1", 1.0)]),
            tech("tF2", "home", "F2", 0.9, &[("R1", 1.0 / 9.0)]),
        ],
        Some(BTreeMap::from([
            (GoodId::from("F1"), 0.1),
            (GoodId::from("F2"), 0.9),
        ])),
    );
    let state = StateBuilder::default()
        .out("tR1", 2.0, 0.9)
        .out("tF1", 1.0, 1.0)
        .out("tF2", 9.0, 1.0)
        .flow("tR1", "tF1", 1.0)
        .flow("tR1", "tF2", 1.0)
        .labor("home", "tR1", 1.8)
        .labor("home", "tF1", 0.1)
        .labor("home", "tF2", 8.1)
        .wage("home", 1.0)
        .finish();
    (eco, state)
}

/// Two producers of the same raw good with a shared intermediate stage;
/// rerouting lets the medium run save half a unit of final output.
fn flexible_rerouting() -> (Economy, FlowState) {
    let eco = economy(
        vec![country("home", 40.0)],
        vec![
            good("R", GoodKind::Intermediate),
            good("I", GoodKind::Intermediate),
            good("fin", GoodKind::Final),
        ],
        vec![
            tech("tau1", "home", "R", 1.0, &[]),
            tech("tau2", "home", "R", 1.0, &[]),
            tech("tau3", "home", "I", 1.0, &[("R", 1.0)]),
            tech("tau4", "home", "fin", 7.0, &[("R", 1.0), ("I", 1.0)]),
        ],
        single_final_demand("fin"),
    );
    let state = StateBuilder::default()
        .out("tau1", 4.0, 0.1)
        .out("tau2", 4.0, 0.1)
        .out("tau3", 4.0, 0.2)
        .out("tau4", 4.0, 1.0)
        .flow("tau1", "tau3", 3.0)
        .flow("tau1", "tau4", 1.0)
        .flow("tau2", "tau3", 1.0)
        .flow("tau2", "tau4", 3.0)
        .flow("tau3", "tau4", 4.0)
        .labor("home", "tau1", 4.0)
        .labor("home", "tau2", 4.0)
        .labor("home", "tau3", 4.0)
        .labor("home", "tau4", 28.0)
        .wage("home", 0.1)
        .finish();
    (eco, state)
}

/// A two-country chain in which the target can reroute its rationing to
/// blunt the aggressor's power from 7/6 to 2/11.
fn strategic_power_fixture() -> (Economy, FlowState) {
    let eco = economy(
        vec![country("i", 60.0), country("j", 70.0)],
        vec![
            good("g2", GoodKind::Intermediate),
            good("g3", GoodKind::Intermediate),
            good("fin", GoodKind::Final),
        ],
        vec![
            tech("tau2", "i", "g2", 1.0, &[]),
            tech("tau3", "j", "g3", 1.0, &[("g2", 0.5)]),
            tech("tau4", "j", "fin", 2.5, &[("g3", 0.5)]),
            tech("tau5", "i", "fin", 2.5, &[("g3", 0.5)]),
        ],
        single_final_demand("fin"),
    );
    let state = StateBuilder::default()
        .out("tau2", 10.0, 1.0)
        .out("tau3", 20.0, 1.5)
        .out("tau4", 20.0, 3.25)
        .out("tau5", 20.0, 3.25)
        .flow("tau2", "tau3", 10.0)
        .flow("tau3", "tau4", 10.0)
        .flow("tau3", "tau5", 10.0)
        .labor("i", "tau2", 10.0)
        .labor("j", "tau3", 20.0)
        .labor("j", "tau4", 50.0)
        .labor("i", "tau5", 50.0)
        .wage("i", 1.0)
        .wage("j", 1.0)
        .finish();
    (eco, state)
}

/// The t-country family in which the ratio of short-run to medium-run loss
/// from shocking the first raw-material producer equals t. Country 1 holds
/// 2t+1 units of labor, country 2 holds t^2+1, the rest t+1 each. Technology
/// ids follow the good-then-country scheme ("01", "02", "11", ..).
fn lpr_family(t: u32) -> (Economy, FlowState) {
    assert!(t >= 2, "family is defined for t >= 2");
    let t_us = t as usize;
    let mut countries = Vec::new();
    for i in 1..=t_us {
        let labor = match i {
            1 => 2.0 * t as f64 + 1.0,
            2 => (t as f64) * (t as f64) + 1.0,
            _ => t as f64 + 1.0,
        };
        countries.push(country(&format!("c{i}"), labor));
    }
    let mut goods_v = vec![good("g0", GoodKind::Intermediate)];
    for k in 1..=t_us {
        goods_v.push(good(&format!("g{k}"), GoodKind::Intermediate));
    }
    goods_v.push(good("f", GoodKind::Final));

    let level2 = |k: usize, i: usize| format!("{k}{i}");
    let final_tech = |i: usize| format!("{}{i}", t_us + 1);

    let mut techs = vec![
        tech("01", "c1", "g0", 1.0, &[]),
        tech("02", "c2", "g0", 1.0, &[]),
    ];
    for k in 1..=t_us {
        for i in 1..=t_us {
            techs.push(tech(
                &level2(k, i),
                &format!("c{i}"),
                &format!("g{k}"),
                1.0,
                &[("g0", 1.0)],
            ));
        }
    }
    let final_inputs: Vec<(String, f64)> =
        (1..=t_us).map(|k| (format!("g{k}"), 1.0)).collect();
    for i in 1..=t_us {
        let refs: Vec<(&str, f64)> = final_inputs
            .iter()
            .map(|(g, q)| (g.as_str(), *q))
            .collect();
        techs.push(tech(&final_tech(i), &format!("c{i}"), "f", 1.0, &refs));
    }
    let eco = economy(countries, goods_v, techs, single_final_demand("f"));

    let p_final = 2.0 * t as f64 + 1.0;
    let mut b = StateBuilder::default()
        .out("01", t as f64, 1.0)
        .out("02", (t as f64) * (t as f64 - 1.0), 1.0)
        .labor("c1", "01", t as f64)
        .labor("c2", "02", (t as f64) * (t as f64 - 1.0));
    for i in 1..=t_us {
        b = b.wage(&format!("c{i}"), 1.0);
        for k in 1..=t_us {
            let id = level2(k, i);
            b = b
                .out(&id, 1.0, 2.0)
                .labor(&format!("c{i}"), &id, 1.0)
                .flow(&id, &final_tech(i), 1.0);
            // Good-i production in country i sources from country 1.
            b = if k == i {
                b.flow("01", &id, 1.0)
            } else {
                b.flow("02", &id, 1.0)
            };
        }
        b = b
            .out(&final_tech(i), 1.0, p_final)
            .labor(&format!("c{i}"), &final_tech(i), 1.0);
    }
    (eco, b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::{validate_equilibrium, DEFAULT_TOLERANCE};

    #[test]
    fn every_fixture_is_a_valid_equilibrium() {
        for id in all_fixtures() {
            let (eco, state) = build(id);
            let report = validate_equilibrium(&eco, &state, DEFAULT_TOLERANCE).unwrap();
            assert!(report.is_empty(), "{id}: {report:?}");
        }
    }

    #[test]
    fn fixtures_survive_a_save_load_round_trip() {
        for id in all_fixtures() {
            let (eco, state) = build(id);
            let eco2 = crate::io::parse_economy(&crate::io::economy_to_json(&eco)).unwrap();
            let state2 =
                crate::io::parse_flow_state(&crate::io::flow_state_to_json(&state), &eco2)
                    .unwrap();
            assert_eq!(eco, eco2, "{id}");
            let report = validate_equilibrium(&eco2, &state2, DEFAULT_TOLERANCE).unwrap();
            assert!(report.is_empty(), "{id}: {report:?}");
        }
    }

    #[test]
    fn appendix_b_outputs_are_as_designed() {
        let (_, state) = build(FixtureId::AppendixBExtended);
        let expected = [
            ("tau01", 6.0),
            ("tau02", 4.0),
            ("tau03", 8.0),
            ("tau04", 2.0),
            ("tau05", 5.0),
            ("tau06", 10.0),
            ("tau07", 5.0),
            ("tau08", 3.0),
            ("tau09", 4.0),
            ("tau10", 3.0),
        ];
        for (id, y) in expected {
            assert_eq!(state.output(&TechId::from(id)), y);
        }
    }

    #[test]
    fn five_country_fixture_has_the_expected_levels() {
        let (eco, state) = build(FixtureId::Fig9FiveCountry);
        assert_eq!(eco.country(&CountryId::from("c1")).unwrap().labor_endowment, 100.0);
        assert_eq!(eco.country(&CountryId::from("c2")).unwrap().labor_endowment, 100.0);
        assert_eq!(state.output(&TechId::from("I1-2")), 20.0);
        assert_eq!(state.output(&TechId::from("F1-5")), 35.0);
        let employed = state.employed_labor();
        for c in eco.countries() {
            assert!((employed[&c.id] - c.labor_endowment).abs() < 1e-9, "{}", c.id);
        }
    }

    #[test]
    fn lpr_family_of_three_has_the_expected_shape() {
        let (eco, state) = build(FixtureId::LprFamily(3));
        assert_eq!(eco.technologies().len(), 2 + 9 + 3);
        assert_eq!(eco.countries().len(), 3);
        assert_eq!(state.output(&TechId::from("01")), 3.0);
        assert_eq!(state.output(&TechId::from("02")), 6.0);
        assert_eq!(state.good_flows.len(), 3 + 6 + 9);
        // Country i's good-i production sources the raw good from country 1.
        for i in 1..=3 {
            let id = TechId::from(format!("{i}{i}").as_str());
            assert_eq!(state.flow(&TechId::from("01"), &id), 1.0);
        }
        let endow = |c: &str| eco.country(&CountryId::from(c)).unwrap().labor_endowment;
        assert_eq!(endow("c1"), 7.0);
        assert_eq!(endow("c2"), 10.0);
        assert_eq!(endow("c3"), 4.0);
    }

    #[test]
    fn fixture_names_round_trip() {
        for id in all_fixtures() {
            let name = id.to_string();
            assert_eq!(name.parse::<FixtureId>().unwrap(), id);
        }
    }
}

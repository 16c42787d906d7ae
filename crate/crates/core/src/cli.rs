//! Command-line front end: one subcommand per analyzer, with table, CSV,
//! and JSON emission. CSV and JSON outputs are byte-stable across runs for
//! identical inputs and seeds; CSV streams carry a `# prodnet-csv v1`
//! version line and floats are printed with 12 significant digits.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::centrality::{disruption_centrality, sourcing_shares};
use crate::error::{Error, Result};
use crate::fixtures::{self, FixtureId, FIXTURE_NAMES};
use crate::fragility::{complexity_stats, expected_loss_formulas, expected_loss_mc};
use crate::hulten::{hulten_marginal, long_run_reequilibrate};
use crate::io;
use crate::medium_run::{generate_lpr_family, lpr, medium_run_optimize};
use crate::model::{gdp, CountryId, Economy, FlowState, ShockSpec, TechId};
use crate::power::{frontier, power, strategic_power};
use crate::propagation::{
    check_cut_condition, check_industry_shock_condition, propagate, shock_bound,
    PropagationConfig,
};
use crate::validate::validate_equilibrium;

#[derive(Parser)]
#[command(name = "prodnet", version, about = "Production-network disruption analysis")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Args)]
struct OutputOpts {
    /// Output format.
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Shorthand for `--format csv`, optionally with a destination path.
    #[arg(long, num_args = 0..=1, value_name = "PATH")]
    csv: Option<Option<PathBuf>>,
}

impl OutputOpts {
    fn resolve(&self) -> (Format, Option<PathBuf>) {
        match &self.csv {
            Some(path) => (Format::Csv, path.clone().or_else(|| self.out.clone())),
            None => (self.format, self.out.clone()),
        }
    }
}

#[derive(Args)]
struct InputOpts {
    /// Economy file (JSON).
    #[arg(long)]
    economy: PathBuf,
    /// Flow-state file (JSON).
    #[arg(long)]
    flows: PathBuf,
}

impl InputOpts {
    fn load(&self) -> Result<(Economy, FlowState)> {
        let economy = io::load_economy(&self.economy)?;
        let state = io::load_flow_state(&self.flows, &economy)?;
        Ok((economy, state))
    }
}

#[derive(Args)]
struct ShockOpts {
    /// Comma-separated shocked technology ids.
    #[arg(long, value_delimiter = ',')]
    shocked: Vec<String>,
    /// Fraction of output retained by shocked technologies.
    #[arg(long)]
    lambda: f64,
}

impl ShockOpts {
    fn spec(&self) -> ShockSpec {
        ShockSpec::new(self.shocked.iter().map(|s| TechId::from(s.as_str())), self.lambda)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a flow state against the equilibrium conditions.
    Validate {
        #[command(flatten)]
        input: InputOpts,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Total expenditure on final goods.
    Gdp {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Marginal long-run impact of one technology.
    Hulten {
        #[command(flatten)]
        input: InputOpts,
        #[arg(long)]
        tech: String,
        /// Shock size to extrapolate, in [0, 1].
        #[arg(long)]
        shock: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Exact long-run re-equilibration after a TFP shock.
    Longrun {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        shock: ShockOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Short-run shock propagation to its fixed point.
    Shock {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        shock: ShockOpts,
        #[arg(long, default_value_t = 1e-12)]
        delta: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// The affected-final upper bound and tightness checks.
    Bound {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        shock: ShockOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Efficient rationing with flexible prices (linear program).
    Mediumrun {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        shock: ShockOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Loss to price rigidity: short-run over medium-run loss.
    Lpr {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        shock: ShockOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Generate the unbounded-LPR family economy of a given size.
    GenLpr {
        #[arg(long)]
        t: u32,
        /// Directory receiving economy.json and flows.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Disruption centrality of one or all technologies.
    Centrality {
        #[command(flatten)]
        input: InputOpts,
        #[arg(long, conflicts_with = "all")]
        tech: Option<String>,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Power of one country over another.
    Power {
        #[command(flatten)]
        input: InputOpts,
        #[arg(long)]
        aggressor: String,
        #[arg(long)]
        target: String,
        /// Let the target route its rationing strategically.
        #[arg(long)]
        strategic: bool,
        /// Search all aggressor technologies, not just border-adjacent ones.
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// The disruption possibility frontier.
    Frontier {
        #[command(flatten)]
        input: InputOpts,
        #[arg(long)]
        aggressor: String,
        #[arg(long)]
        target: String,
        /// Maximum zero-out sequence depth.
        #[arg(long, default_value_t = 6)]
        resolution: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Monte-Carlo fragility against the closed-form approximations.
    Fragility {
        #[command(flatten)]
        input: InputOpts,
        #[arg(long)]
        pi: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also print the closed-form values next to the estimates.
        #[arg(long)]
        compare_formula: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// List or emit the built-in example economies.
    Fixtures {
        #[arg(long)]
        list: bool,
        /// Fixture name to write out.
        #[arg(long)]
        emit: Option<String>,
        /// Directory receiving economy.json and flows.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Entry point used by both `main` and tests. Exit code 0 on success, 2 on
/// usage errors, 1 on analysis errors (with the error name on stderr).
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    if let Ok(v) = std::env::var("PRODNET_THREADS") {
        if v.trim().parse::<usize>().is_err() {
            eprintln!("usage error: PRODNET_THREADS must be an integer (0 = auto)");
            return 2;
        }
    }
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful exits.
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.cmd) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}: {e}", e.name());
            1
        }
    }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

/// Format with 12 significant digits; plain decimal in a sane range,
/// scientific outside it, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..13).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

struct Output {
    /// key/value lines for the table renderer.
    table: Vec<(String, String)>,
    /// CSV header and rows.
    csv_header: Vec<String>,
    csv_rows: Vec<Vec<String>>,
    json: serde_json::Value,
}

fn emit(output: Output, opts: &OutputOpts) -> Result<()> {
    let (format, path) = opts.resolve();
    let text = match format {
        Format::Table => {
            let width = output
                .table
                .iter()
                .map(|(k, _)| k.len())
                .max()
                .unwrap_or(0);
            let mut s = String::new();
            for (k, v) in &output.table {
                s.push_str(&format!("{k:<width$}  {v}\n"));
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("# prodnet-csv v1\n");
            s.push_str(&output.csv_header.join(","));
            s.push('\n');
            for row in &output.csv_rows {
                s.push_str(&row.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&output.json)
                .map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    match path {
        Some(p) => std::fs::write(&p, text)
            .map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn per_tech_rows(
    before: &FlowState,
    after: &FlowState,
) -> (Vec<(String, String)>, Vec<Vec<String>>) {
    let mut table = Vec::new();
    let mut rows = Vec::new();
    for (t, y) in &before.outputs {
        let y_after = after.output(t);
        table.push((
            format!("output {t}"),
            format!("{} -> {}", fmt_sig(*y), fmt_sig(y_after)),
        ));
        rows.push(vec![t.to_string(), fmt_sig(*y), fmt_sig(y_after)]);
    }
    (table, rows)
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

fn dispatch(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Validate {
            input,
            tolerance,
            output,
        } => {
            let (economy, state) = input.load()?;
            let report = validate_equilibrium(&economy, &state, tolerance)?;
            let mut table = vec![("violations".to_string(), report.len().to_string())];
            let mut rows = Vec::new();
            for v in &report {
                table.push((format!("{} {}", v.condition, v.entity), fmt_sig(v.residual)));
                rows.push(vec![
                    v.condition.to_string(),
                    v.entity.clone(),
                    fmt_sig(v.residual),
                ]);
            }
            emit(
                Output {
                    table,
                    csv_header: vec!["condition".into(), "entity".into(), "residual".into()],
                    csv_rows: rows,
                    json: serde_json::to_value(&report).unwrap_or_default(),
                },
                &output,
            )
        }
        Cmd::Gdp { input, output } => {
            let (economy, state) = input.load()?;
            let value = gdp(&economy, &state)?;
            emit(
                Output {
                    table: vec![("gdp".into(), fmt_sig(value))],
                    csv_header: vec!["gdp".into()],
                    csv_rows: vec![vec![fmt_sig(value)]],
                    json: json!({ "gdp": value }),
                },
                &output,
            )
        }
        Cmd::Hulten {
            input,
            tech,
            shock,
            output,
        } => {
            let (economy, state) = input.load()?;
            let report = hulten_marginal(&economy, &state, &TechId::from(tech.as_str()), shock)?;
            emit(
                Output {
                    table: vec![
                        ("tech".into(), report.tech.to_string()),
                        ("expenditure".into(), fmt_sig(report.expenditure)),
                        ("gdp".into(), fmt_sig(report.gdp)),
                        ("share".into(), fmt_sig(report.marginal_share)),
                        ("loss".into(), fmt_sig(report.extrapolated_loss)),
                    ],
                    csv_header: vec![
                        "tech".into(),
                        "expenditure".into(),
                        "gdp".into(),
                        "share".into(),
                        "loss".into(),
                    ],
                    csv_rows: vec![vec![
                        report.tech.to_string(),
                        fmt_sig(report.expenditure),
                        fmt_sig(report.gdp),
                        fmt_sig(report.marginal_share),
                        fmt_sig(report.extrapolated_loss),
                    ]],
                    json: serde_json::to_value(&report).unwrap_or_default(),
                },
                &output,
            )
        }
        Cmd::Longrun {
            input,
            shock,
            output,
        } => {
            let (economy, state) = input.load()?;
            let spec = shock.spec();
            let out = long_run_reequilibrate(&economy, &state, &spec)?;
            let pre = gdp(&economy, &state)?;
            let (mut table, mut rows) = per_tech_rows(&state, &out.flows);
            for ((from, to), x) in &out.flows.good_flows {
                table.push((format!("flow {from}->{to}"), fmt_sig(*x)));
            }
            for (t, p) in &out.flows.prices {
                table.push((format!("price {t}"), fmt_sig(*p)));
            }
            table.push(("gdp".into(), fmt_sig(pre - out.lost_gdp_total)));
            table.push(("lost_gdp".into(), fmt_sig(out.lost_gdp_total)));
            rows.push(vec![
                "gdp".into(),
                fmt_sig(pre - out.lost_gdp_total),
                String::new(),
            ]);
            emit(
                Output {
                    table,
                    csv_header: vec!["tech".into(), "before".into(), "after".into()],
                    csv_rows: rows,
                    json: serde_json::to_value(&out).unwrap_or_default(),
                },
                &output,
            )
        }
        Cmd::Shock {
            input,
            shock,
            delta,
            output,
        } => {
            let (economy, state) = input.load()?;
            let spec = shock.spec();
            let config = PropagationConfig {
                delta,
                ..PropagationConfig::default()
            };
            let out = propagate(&economy, &state, &spec, &config)?;
            let bound = shock_bound(&economy, &state, &spec)?;
            let (cut_holds, _) = check_cut_condition(&economy, &state, &spec)?;
            let industry = check_industry_shock_condition(&economy, &state, &spec)?;
            let total = gdp(&economy, &state)?;
            let (mut table, mut rows) = per_tech_rows(&state, &out.flows);
            table.push(("lost_gdp".into(), fmt_sig(out.lost_gdp_total)));
            table.push((
                "loss_fraction".into(),
                fmt_sig(out.lost_gdp_total / total),
            ));
            table.push(("bound_fraction".into(), fmt_sig(bound.bound_fraction)));
            table.push(("bound_tight".into(), bound.tight.to_string()));
            table.push(("cut_condition".into(), cut_holds.to_string()));
            table.push(("industry_shock_condition".into(), industry.to_string()));
            rows.push(vec![
                "loss_fraction".into(),
                fmt_sig(out.lost_gdp_total / total),
                String::new(),
            ]);
            emit(
                Output {
                    table,
                    csv_header: vec!["tech".into(), "before".into(), "after".into()],
                    csv_rows: rows,
                    json: json!({
                        "outcome": out,
                        "bound": bound,
                        "cut_condition": cut_holds,
                        "industry_shock_condition": industry,
                    }),
                },
                &output,
            )
        }
        Cmd::Bound {
            input,
            shock,
            output,
        } => {
            let (economy, state) = input.load()?;
            let spec = shock.spec();
            let bound = shock_bound(&economy, &state, &spec)?;
            let (cut_holds, cert) = check_cut_condition(&economy, &state, &spec)?;
            let industry = check_industry_shock_condition(&economy, &state, &spec)?;
            emit(
                Output {
                    table: vec![
                        (
                            "affected_finals".into(),
                            bound
                                .affected_finals
                                .iter()
                                .map(|t| t.as_str())
                                .collect::<Vec<_>>()
                                .join(","),
                        ),
                        ("bound_fraction".into(), fmt_sig(bound.bound_fraction)),
                        ("actual_fraction".into(), fmt_sig(bound.actual_fraction)),
                        ("tight".into(), bound.tight.to_string()),
                        ("cut_condition".into(), cut_holds.to_string()),
                        ("industry_shock_condition".into(), industry.to_string()),
                    ],
                    csv_header: vec![
                        "bound_fraction".into(),
                        "actual_fraction".into(),
                        "tight".into(),
                        "cut_condition".into(),
                        "industry_shock_condition".into(),
                    ],
                    csv_rows: vec![vec![
                        fmt_sig(bound.bound_fraction),
                        fmt_sig(bound.actual_fraction),
                        bound.tight.to_string(),
                        cut_holds.to_string(),
                        industry.to_string(),
                    ]],
                    json: json!({
                        "bound": bound,
                        "cut_condition": cut_holds,
                        "cut_certificate": cert,
                        "industry_shock_condition": industry,
                    }),
                },
                &output,
            )
        }
        Cmd::Mediumrun {
            input,
            shock,
            output,
        } => {
            let (economy, state) = input.load()?;
            let spec = shock.spec();
            let result = medium_run_optimize(&economy, &state, &spec)?;
            let total = gdp(&economy, &state)?;
            let (mut table, mut rows) = per_tech_rows(&state, &result.flows);
            table.push(("lost_gdp".into(), fmt_sig(result.lost_gdp)));
            table.push((
                "loss_fraction".into(),
                fmt_sig(result.lost_gdp / total),
            ));
            for (from, to, amount) in &result.reroutes {
                table.push((format!("reroute {from}->{to}"), fmt_sig(*amount)));
            }
            rows.push(vec![
                "loss_fraction".into(),
                fmt_sig(result.lost_gdp / total),
                String::new(),
            ]);
            emit(
                Output {
                    table,
                    csv_header: vec!["tech".into(), "before".into(), "after".into()],
                    csv_rows: rows,
                    json: serde_json::to_value(&result).unwrap_or_default(),
                },
                &output,
            )
        }
        Cmd::Lpr {
            input,
            shock,
            output,
        } => {
            let (economy, state) = input.load()?;
            let report = lpr(&economy, &state, &shock.spec())?;
            emit(
                Output {
                    table: vec![
                        ("short_run_loss".into(), fmt_sig(report.short_run_loss)),
                        ("medium_run_loss".into(), fmt_sig(report.medium_run_loss)),
                        ("lpr".into(), fmt_sig(report.lpr)),
                    ],
                    csv_header: vec![
                        "short_run_loss".into(),
                        "medium_run_loss".into(),
                        "lpr".into(),
                    ],
                    csv_rows: vec![vec![
                        fmt_sig(report.short_run_loss),
                        fmt_sig(report.medium_run_loss),
                        fmt_sig(report.lpr),
                    ]],
                    json: serde_json::to_value(&report).unwrap_or_default(),
                },
                &output,
            )
        }
        Cmd::GenLpr { t, out } => {
            let (economy, state) = generate_lpr_family(t)?;
            write_pair(&economy, &state, &out)
        }
        Cmd::Centrality {
            input,
            tech,
            all,
            output,
        } => {
            let (economy, state) = input.load()?;
            let targets: Vec<TechId> = if all || tech.is_none() {
                state.active_techs()
            } else {
                vec![TechId::from(tech.as_deref().unwrap_or_default())]
            };
            let mut reports = Vec::new();
            for t in targets {
                reports.push(disruption_centrality(&economy, &state, &t)?);
            }
            reports.sort_by(|a, b| b.dc.total_cmp(&a.dc).then(a.tech.cmp(&b.tech)));
            let table = reports
                .iter()
                .map(|r| (r.tech.to_string(), fmt_sig(r.dc)))
                .collect();
            let rows = reports
                .iter()
                .map(|r| vec![r.tech.to_string(), fmt_sig(r.dc)])
                .collect();
            let shares = sourcing_shares(&economy, &state)?;
            emit(
                Output {
                    table,
                    csv_header: vec!["tech".into(), "dc".into()],
                    csv_rows: rows,
                    json: json!({ "centralities": reports, "shares": shares }),
                },
                &output,
            )
        }
        Cmd::Power {
            input,
            aggressor,
            target,
            strategic,
            exhaustive,
            output,
        } => {
            let (economy, state) = input.load()?;
            let a = CountryId::from(aggressor.as_str());
            let t = CountryId::from(target.as_str());
            let report = if strategic {
                strategic_power(&economy, &state, &a, &t)?
            } else {
                power(&economy, &state, &a, &t, exhaustive)?
            };
            emit(
                Output {
                    table: vec![
                        ("aggressor".into(), report.aggressor.to_string()),
                        ("target".into(), report.target.to_string()),
                        (
                            "best_tech".into(),
                            report
                                .best_tech
                                .as_ref()
                                .map(|t| t.to_string())
                                .unwrap_or_else(|| "none (no leverage)".into()),
                        ),
                        ("power_pct".into(), fmt_sig(report.power_pct)),
                        ("power_abs".into(), fmt_sig(report.power_abs)),
                    ],
                    csv_header: vec![
                        "aggressor".into(),
                        "target".into(),
                        "best_tech".into(),
                        "power_pct".into(),
                        "power_abs".into(),
                    ],
                    csv_rows: vec![vec![
                        report.aggressor.to_string(),
                        report.target.to_string(),
                        report
                            .best_tech
                            .as_ref()
                            .map(|t| t.to_string())
                            .unwrap_or_default(),
                        fmt_sig(report.power_pct),
                        fmt_sig(report.power_abs),
                    ]],
                    json: serde_json::to_value(&report).unwrap_or_default(),
                },
                &output,
            )
        }
        Cmd::Frontier {
            input,
            aggressor,
            target,
            resolution,
            output,
        } => {
            let (economy, state) = input.load()?;
            let a = CountryId::from(aggressor.as_str());
            let t = CountryId::from(target.as_str());
            let result = frontier(&economy, &state, &a, &t, resolution)?;
            let table = result
                .points
                .iter()
                .map(|(own, tgt)| {
                    (
                        format!("own {}%", fmt_sig(*own)),
                        format!("target {}%", fmt_sig(*tgt)),
                    )
                })
                .collect();
            let rows = result
                .points
                .iter()
                .map(|(own, tgt)| vec![fmt_sig(*own), fmt_sig(*tgt)])
                .collect();
            emit(
                Output {
                    table,
                    csv_header: vec!["own_loss_pct".into(), "target_loss_pct".into()],
                    csv_rows: rows,
                    json: serde_json::to_value(&result).unwrap_or_default(),
                },
                &output,
            )
        }
        Cmd::Fragility {
            input,
            pi,
            lambda,
            trials,
            seed,
            compare_formula,
            output,
        } => {
            let (economy, state) = input.load()?;
            let est = expected_loss_mc(&economy, &state, pi, lambda, trials, seed)?;
            let mut table = vec![
                ("short_run_mean".into(), fmt_sig(est.short_run_mean)),
                ("short_run_se".into(), fmt_sig(est.short_run_se)),
                ("long_run_mean".into(), fmt_sig(est.long_run_mean)),
                ("long_run_se".into(), fmt_sig(est.long_run_se)),
                ("trials".into(), est.trials.to_string()),
            ];
            let mut json = serde_json::to_value(&est).unwrap_or_default();
            let mut header = vec![
                "short_run_mean".into(),
                "short_run_se".into(),
                "long_run_mean".into(),
                "long_run_se".into(),
                "trials".into(),
            ];
            let mut row = vec![
                fmt_sig(est.short_run_mean),
                fmt_sig(est.short_run_se),
                fmt_sig(est.long_run_mean),
                fmt_sig(est.long_run_se),
                est.trials.to_string(),
            ];
            if compare_formula {
                let stats = complexity_stats(&economy, &state)?;
                let (sr, lr) = expected_loss_formulas(&stats, pi, lambda);
                table.push(("short_run_formula".into(), fmt_sig(sr)));
                table.push(("long_run_formula".into(), fmt_sig(lr)));
                table.push(("complexity_s".into(), fmt_sig(stats.s)));
                table.push(("complexity_q".into(), fmt_sig(stats.q)));
                table.push(("complexity_m".into(), fmt_sig(stats.m)));
                header.push("short_run_formula".into());
                header.push("long_run_formula".into());
                row.push(fmt_sig(sr));
                row.push(fmt_sig(lr));
                if let serde_json::Value::Object(map) = &mut json {
                    map.insert("short_run_formula".into(), json!(sr));
                    map.insert("long_run_formula".into(), json!(lr));
                    map.insert("complexity".into(), serde_json::to_value(&stats).unwrap_or_default());
                }
            }
            emit(
                Output {
                    table,
                    csv_header: header,
                    csv_rows: vec![row],
                    json,
                },
                &output,
            )
        }
        Cmd::Fixtures { list, emit: name, out } => {
            if list || name.is_none() {
                for n in FIXTURE_NAMES {
                    println!("{n}");
                }
                return Ok(());
            }
            let name = name.unwrap_or_default();
            let id: FixtureId = name
                .parse()
                .map_err(|e: String| Error::UnknownEntity(e))?;
            let (economy, state) = fixtures::build(id);
            let dir = out.unwrap_or_else(|| PathBuf::from("."));
            write_pair(&economy, &state, &dir)
        }
    }
}

fn write_pair(economy: &Economy, state: &FlowState, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
    io::save_economy(economy, dir.join("economy.json"))?;
    io::save_flow_state(state, dir.join("flows.json"))?;
    println!("wrote {}", dir.join("economy.json").display());
    println!("wrote {}", dir.join("flows.json").display());
    Ok(())
}

//! End-to-end checks of the command-line surface: exit codes, file
//! emission, CSV versioning, and byte stability.

use std::path::PathBuf;
use std::process::Command;

use prodnet::cli::run;

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "prodnet-test-{}-{tag}",
        std::process::id()
    ));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn arg(p: &std::path::Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn fixture_emission_and_analysis_round_trip() {
    let dir = temp_dir("roundtrip");
    assert_eq!(
        run([
            "prodnet",
            "fixtures",
            "--emit",
            "fig1-chain",
            "--out",
            &arg(&dir)
        ]),
        0
    );
    let economy = dir.join("economy.json");
    let flows = dir.join("flows.json");
    assert!(economy.exists() && flows.exists());

    // Validation report is empty for the shipped fixture.
    let report = dir.join("validate.csv");
    assert_eq!(
        run([
            "prodnet",
            "validate",
            "--economy",
            &arg(&economy),
            "--flows",
            &arg(&flows),
            "--format",
            "csv",
            "--out",
            &arg(&report)
        ]),
        0
    );
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("# prodnet-csv v1\n"));
    assert_eq!(text.lines().count(), 2, "{text}");

    // GDP of the chain economy is 1.
    let gdp_out = dir.join("gdp.csv");
    assert_eq!(
        run([
            "prodnet",
            "gdp",
            "--economy",
            &arg(&economy),
            "--flows",
            &arg(&flows),
            "--csv",
            &arg(&gdp_out)
        ]),
        0
    );
    let text = std::fs::read_to_string(&gdp_out).unwrap();
    assert_eq!(text, "# prodnet-csv v1\ngdp\n1\n");

    // A ten percent shock to the raw material loses a tenth of GDP.
    let shock_out = dir.join("shock.txt");
    assert_eq!(
        run([
            "prodnet",
            "shock",
            "--economy",
            &arg(&economy),
            "--flows",
            &arg(&flows),
            "--shocked",
            "tau_R",
            "--lambda",
            "0.9",
            "--out",
            &arg(&shock_out)
        ]),
        0
    );
    let text = std::fs::read_to_string(&shock_out).unwrap();
    assert!(text.contains("loss_fraction"));
    assert!(text.contains("0.1"), "{text}");
    assert!(text.contains("2 -> 1.8"), "{text}");

    // Byte stability of machine-readable output across runs.
    for format in ["csv", "json"] {
        let h1 = dir.join(format!("hulten1.{format}"));
        let h2 = dir.join(format!("hulten2.{format}"));
        for out in [&h1, &h2] {
            assert_eq!(
                run([
                    "prodnet",
                    "hulten",
                    "--economy",
                    &arg(&economy),
                    "--flows",
                    &arg(&flows),
                    "--tech",
                    "tau_R",
                    "--shock",
                    "0.1",
                    "--format",
                    format,
                    "--out",
                    &arg(out)
                ]),
                0
            );
        }
        assert_eq!(
            std::fs::read(&h1).unwrap(),
            std::fs::read(&h2).unwrap()
        );
    }
    let text = std::fs::read_to_string(dir.join("hulten1.csv")).unwrap();
    assert!(text.contains("tech,expenditure,gdp,share,loss"));
    assert!(text.contains("tau_R,0.2,1,0.2,0.02"), "{text}");

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn json_output_covers_tuple_keyed_reports() {
    let dir = temp_dir("json");
    assert_eq!(
        run([
            "prodnet",
            "fixtures",
            "--emit",
            "appendix-b-with-branch",
            "--out",
            &arg(&dir)
        ]),
        0
    );
    let out = dir.join("centrality.json");
    assert_eq!(
        run([
            "prodnet",
            "centrality",
            "--economy",
            &arg(&dir.join("economy.json")),
            "--flows",
            &arg(&dir.join("flows.json")),
            "--tech",
            "tau02",
            "--format",
            "json",
            "--out",
            &arg(&out)
        ]),
        0
    );
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(value["centralities"][0]["dc"].as_f64().is_some());
    assert!(value["shares"]["input_shares"].is_array());

    let dir9 = temp_dir("json9");
    assert_eq!(
        run([
            "prodnet",
            "fixtures",
            "--emit",
            "fig9-five-country",
            "--out",
            &arg(&dir9)
        ]),
        0
    );
    let out = dir9.join("power.json");
    assert_eq!(
        run([
            "prodnet",
            "power",
            "--economy",
            &arg(&dir9.join("economy.json")),
            "--flows",
            &arg(&dir9.join("flows.json")),
            "--aggressor",
            "c1",
            "--target",
            "c2",
            "--format",
            "json",
            "--out",
            &arg(&out)
        ]),
        0
    );
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(value["best_tech"], "I2-1");
    let _ = std::fs::remove_dir_all(&dir);
    let _ = std::fs::remove_dir_all(&dir9);
}

#[test]
fn frontier_csv_has_breakpoint_rows() {
    let dir = temp_dir("frontier");
    assert_eq!(
        run([
            "prodnet",
            "fixtures",
            "--emit",
            "fig9-five-country",
            "--out",
            &arg(&dir)
        ]),
        0
    );
    let out = dir.join("frontier.csv");
    assert_eq!(
        run([
            "prodnet",
            "frontier",
            "--economy",
            &arg(&dir.join("economy.json")),
            "--flows",
            &arg(&dir.join("flows.json")),
            "--aggressor",
            "c1",
            "--target",
            "c2",
            "--csv",
            &arg(&out)
        ]),
        0
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# prodnet-csv v1");
    assert_eq!(lines[1], "own_loss_pct,target_loss_pct");
    assert_eq!(lines.len(), 6, "{text}"); // four breakpoints plus origin
    assert!(lines[2].starts_with("0,0"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn gen_lpr_writes_a_loadable_pair() {
    let dir = temp_dir("genlpr");
    assert_eq!(run(["prodnet", "gen-lpr", "--t", "3", "--out", &arg(&dir)]), 0);
    let eco = prodnet::io::load_economy(dir.join("economy.json")).unwrap();
    let state = prodnet::io::load_flow_state(dir.join("flows.json"), &eco).unwrap();
    let report = prodnet::validate::validate_equilibrium(&eco, &state, 1e-9).unwrap();
    assert!(report.is_empty());
    let lpr_out = dir.join("lpr.csv");
    assert_eq!(
        run([
            "prodnet",
            "lpr",
            "--economy",
            &arg(&dir.join("economy.json")),
            "--flows",
            &arg(&dir.join("flows.json")),
            "--shocked",
            "01",
            "--lambda",
            "0.5",
            "--format",
            "csv",
            "--out",
            &arg(&lpr_out)
        ]),
        0
    );
    let text = std::fs::read_to_string(&lpr_out).unwrap();
    assert!(text.lines().last().unwrap().ends_with(",3"), "{text}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn analysis_errors_exit_one_with_the_error_name() {
    let dir = temp_dir("errors");
    assert_eq!(
        run([
            "prodnet",
            "fixtures",
            "--emit",
            "fig1-chain",
            "--out",
            &arg(&dir)
        ]),
        0
    );
    // Shocking an unknown technology is an analysis error, not a usage one.
    let exe = env!("CARGO_BIN_EXE_prodnet");
    let out = Command::new(exe)
        .args([
            "shock",
            "--economy",
            &arg(&dir.join("economy.json")),
            "--flows",
            &arg(&dir.join("flows.json")),
            "--shocked",
            "ghost",
            "--lambda",
            "0.9",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("InactiveTechError") || stderr.contains("UnknownEntityError"));

    // Usage errors exit 2.
    let out = Command::new(exe).args(["shock", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // A malformed thread cap is rejected up front.
    let out = Command::new(exe)
        .env("PRODNET_THREADS", "many")
        .args(["fixtures", "--list"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Help is a successful exit.
    let out = Command::new(exe).args(["--help"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn fixtures_list_names_every_fixture() {
    let exe = env!("CARGO_BIN_EXE_prodnet");
    let out = Command::new(exe).args(["fixtures", "--list"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in ["fig1-chain", "appendix-b-extended", "lpr-family-<t>"] {
        assert!(stdout.contains(name), "{stdout}");
    }
}

use std::process::Command;

use padicore::cli::{run, Outcome};
use proptest::prelude::*;
use serde_json::Value;

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("padicore").chain(args.iter().copied()))
}

fn ok(args: &[&str]) -> String {
    let out = cli(args);
    assert_eq!(out.code, 0, "{args:?} failed: {}", out.stderr);
    out.stdout.trim_end().to_string()
}

fn ok_with(base: &[&str], last: &str) -> String {
    let mut args = base.to_vec();
    args.push(last);
    ok(&args)
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    serde_json::from_str(&ok(&full)).unwrap()
}

#[test]
fn binary_matches_library_entry_point() {
    let args = ["hensel", "sqrt", "--p", "7", "--prec", "3", "2"];
    let out = Command::new(env!("CARGO_BIN_EXE_padicore")).args(args).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "3 + 1*7 + 2*7^2 + O(7^3)\n");

    let out = Command::new(env!("CARGO_BIN_EXE_padicore")).args(["plog", "log", "--p", "5", "--prec", "3", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("diverges"));

    let capped = |prec: &str| {
        Command::new(env!("CARGO_BIN_EXE_padicore"))
            .args(["padic", "show", "--p", "5", "--prec", prec, "1/3"])
            .env("PADICORE_PREC_CAP", "8")
            .output()
            .unwrap()
    };
    assert_eq!(capped("8").status.code(), Some(0));
    let out = capped("9");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("precision cap"));
}

#[test]
fn golden_padic() {
    assert_eq!(ok(&["padic", "add", "--p", "5", "--prec", "4", "1/2", "1/2"]), "1 + O(5^4)");
    assert_eq!(ok(&["padic", "show", "--p", "7", "--prec", "3", "108"]), "3 + 1*7 + 2*7^2 + O(7^3)");
    assert_eq!(ok(&["padic", "mul", "--p", "3", "--prec", "4", "3", "-1"]), "2*3 + 2*3^2 + 2*3^3 + O(3^4)");
    assert_eq!(ok(&["padic", "div", "--p", "5", "--prec", "6", "1", "5"]), "1*5^-1 + O(5^4)");
    assert_eq!(ok(&["padic", "val", "--p", "2", "--prec", "10", "24"]), "3");
    assert_eq!(ok(&["padic", "sub", "--p", "5", "--prec", "4", "7", "7"]), "O(5^4)");
    assert_eq!(json(&["padic", "show", "--p", "5", "--prec", "3", "-1"])["digits"], serde_json::json!([4, 4, 4]));
}

#[test]
fn golden_hensel() {
    let root = ok(&["hensel", "solve", "--p", "7", "--prec", "12", "--poly", "x^2-2", "--x0", "3"]);
    assert!(root.starts_with("3 + 1*7 + 2*7^2 + 6*7^3") && root.ends_with("O(7^12)"), "{root}");
    assert_eq!(ok(&["hensel", "root", "--p", "5", "--prec", "2", "--n", "3", "6"]), "1 + 2*5 + O(5^2)");
    assert_eq!(ok(&["hensel", "teichmuller", "--p", "5", "--prec", "3", "2"]), "2 + 1*5 + 2*5^2 + O(5^3)");
    let report = json(&["hensel", "check", "--p", "3", "--poly", "x^2", "--x0", "1", "--t", "1"]);
    assert_eq!(report["strict"], true);
    let image = json(&["hensel", "image", "--p", "3", "--poly", "x^2", "--x0", "1", "--t", "1", "--level", "3"]);
    assert_eq!((image["holds"].clone(), image["hits"].clone()), (Value::Bool(true), serde_json::json!(9)));
    let out = cli(&["hensel", "sqrt", "--p", "5", "--prec", "3", "2"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("no root"), "{}", out.stderr);
}

#[test]
fn golden_plog() {
    assert_eq!(ok(&["plog", "log", "--p", "5", "--prec", "3", "5"]), "1*5 + 2*5^2 + O(5^3)");
    assert_eq!(ok(&["plog", "log", "--p", "5", "--prec", "3", "--x", "5"]), "1*5 + 2*5^2 + O(5^3)");
    assert_eq!(ok(&["plog", "log", "--p", "2", "--prec", "8", "-2"]), "O(2^8)");
    let z = ok(&["plog", "log", "--p", "3", "--prec", "10", "6"]);
    let x = ok(&["plog", "invert", "--p", "3", "--prec", "10", &z]);
    assert_eq!(x, ok(&["padic", "show", "--p", "3", "--prec", "10", "6"]));
    assert_eq!(cli(&["plog", "invert", "--p", "3", "--prec", "5", "1"]).code, 1);
}

#[test]
fn golden_series() {
    assert_eq!(ok(&["series", "show", "--field", "3", "1 + 5*T^2 + O(T^4)"]), "1 + 2*T^2 + O(T^4)");
    assert_eq!(ok(&["series", "mul", "--field", "3", "1 + T + O(T^4)", "1 - T + O(T^4)"]), "1 + 2*T^2 + O(T^4)");
    assert_eq!(ok(&["series", "invert", "--field", "Q", "1 - T + O(T^4)"]), "1 + T + T^2 + T^3 + O(T^4)");
    assert_eq!(
        ok(&["series", "compose", "--field", "Q", "1 + T + T^2 + T^3 + O(T^4)", "T + T^2 + O(T^4)"]),
        "1 + T + 2*T^2 + 3*T^3 + O(T^4)"
    );
    assert_eq!(ok(&["series", "derive", "--field", "2", "T^2 + T^3 + O(T^5)"]), "T^2 + O(T^4)");
    assert_eq!(ok(&["series", "order", "--field", "5", "--order", "3", "T^4 + O(T^6)"]), ">= 3");
    assert_eq!(ok(&["series", "invert", "--field", "5", "--laurent", "T + T^2 + O(T^4)"]), "T^-1 + 4 + T + O(T^2)");
    assert_eq!(ok(&["series", "abs", "--field", "Q", "--radius", "1/2", "T^2 + O(T^4)"]), "(1/2)^2 = 1/4");
    assert_eq!(cli(&["series", "invert", "--field", "Q", "T + O(T^4)"]).code, 1);
    assert_eq!(cli(&["series", "compose", "--field", "Q", "T + O(T^2)", "1 + O(T^2)"]).code, 1);
}

#[test]
fn golden_measure() {
    assert_eq!(ok(&["measure", "--op", "union", "--p", "5", "{0 mod 5^1}", "{1 mod 5^1}"]), "{0 mod 5^1, 1 mod 5^1} in Z_5");
    assert_eq!(ok(&["measure", "--op", "measure", "{0 mod 5^1, 7 mod 5^2} in Z_5"]), "6/25");
    assert_eq!(ok(&["measure", "--op", "count", "--p", "3", "--level", "4"]), "81");
    assert_eq!(ok(&["measure", "--op", "complement", "{0 mod 2^1} in Z_2"]), "{1 mod 2^1} in Z_2");
    let merged = ok(&["measure", "--op", "union", "--p", "3", "{0 mod 3^1}", "{1 mod 3^1, 2 mod 3^1}"]);
    assert_eq!(merged, "{0 mod 3^0} in Z_3");
}

#[test]
fn golden_sums_and_analytic() {
    let bfs = json(&["sums", "bfs", r#"{"mode":"real","values":[1,-1,"1/2",2]}"#]);
    assert_eq!((bfs["bfs"].as_str(), bfs["sup"].as_str()), (Some("7/2"), Some("2")));
    let bfs = json(&["sums", "bfs", r#"{"mode":"padic","p":5,"values":[5,10,1,"1/5"]}"#]);
    assert_eq!((bfs["bfs"].as_str(), bfs["sup"].as_str()), (Some("5"), Some("5")));
    let f = json(&["sums", "fubini", r#"{"mode":"real","rows":[[1,2],[3,"-1/2"]]}"#]);
    assert_eq!((f["direct"].as_str(), f["equal"].as_bool()), (Some("11/2"), Some(true)));
    let part = json(&["sums", "partition", "--blocks", "0,2;1", r#"{"mode":"real","values":[1,2,3]}"#]);
    assert_eq!(part["block_sums"], serde_json::json!(["4", "2"]));
    assert_eq!(ok(&["sums", "norms", "--r", "1,inf", r#"{"mode":"real","values":[1,-2]}"#]), "l1^1: 3\nsup: 2");

    assert_eq!(ok(&["analytic", "eval", "--p", "7", "--prec", "5", "--poly", "x^2+1", "--x", "3"]), "3 + 1*7 + O(7^5)");
    assert_eq!(ok(&["analytic", "bounds", "--p", "3", "--poly", "x^3 + 3*x", "--m", "1"]), "m1 = 1\nm2 = 1");
    let r = json(&["analytic", "radius", "--log"]);
    assert_eq!((r["exponent"].as_str(), r["boundary_terms_vanish"].as_bool()), (Some("0"), Some(false)));
    assert_eq!(cli(&["analytic", "eval", "--p", "7", "--poly", "x", "--x", "1", "--m", "1"]).code, 1);
}

#[test]
fn json_output_round_trips_through_the_parsers() {
    let cases: &[&[&str]] = &[
        &["padic", "div", "--p", "7", "--prec", "6", "2", "49"],
        &["padic", "sub", "--p", "3", "--prec", "5", "9", "9"],
        &["hensel", "sqrt", "--p", "2", "--prec", "10", "17"],
        &["series", "mul", "--field", "Q", "1 - 1/2*T + O(T^4)", "1 + T + O(T^4)"],
        &["series", "invert", "--field", "3", "--laurent", "T^2 + T^3 + O(T^5)"],
        &["measure", "--op", "complement", "{1 mod 3^2} in Z_3"],
    ];
    for args in cases {
        let pretty = ok(args);
        let mut jargs = vec!["--format", "json"];
        jargs.extend_from_slice(args);
        let j = ok(&jargs);
        // feed each form back through the matching `show`-style command
        let (show_pretty, show_json) = match args[0] {
            "padic" | "hensel" => {
                let p = args.iter().position(|a| *a == "--p").unwrap() + 1;
                let base = ["padic", "show", "--p", args[p], "--prec", "60"];
                (ok_with(&base, &pretty), ok_with(&base, &j))
            }
            "series" => {
                let f = args.iter().position(|a| *a == "--field").unwrap() + 1;
                let mut base = vec!["series", "show", "--field", args[f]];
                if args.contains(&"--laurent") {
                    base.push("--laurent");
                }
                (ok_with(&base, &pretty), ok_with(&base, &j))
            }
            _ => (
                ok(&["measure", "--op", "union", &pretty, "{} in Z_3"]),
                ok(&["measure", "--op", "union", &j, r#"{"p":3,"balls":[]}"#]),
            ),
        };
        assert_eq!(show_pretty, pretty, "{args:?}");
        assert_eq!(show_json, pretty, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["padic", "add", "--p", "5", "1"][..],
        &["padic", "add", "--p", "5", "--prec", "0", "1", "1"],
        &["padic", "frobnicate", "--p", "5", "1"],
        &["padic", "add", "--p", "5", "--bogus", "1", "1"],
        &["series", "add", "--field", "x", "1 + O(T)", "1 + O(T)"],
        &["sums", "bfs", "{not json"],
        &["measure", "--op", "count", "--p", "3"],
        &["plog", "log", "--p", "5", "--x", "1", "2"],
        &[],
    ] {
        let out = cli(args);
        assert_eq!(out.code, 2, "{args:?}: {}", out.stderr);
        assert!(out.stdout.is_empty() && !out.stderr.is_empty());
    }
    assert_eq!(cli(&["--help"]).code, 0);
    assert_eq!(cli(&["hensel", "--help"]).code, 0);
}

#[test]
fn domain_errors_exit_one() {
    for args in [
        &["padic", "add", "--p", "6", "1", "1"][..],
        &["padic", "inv", "--p", "5", "--prec", "3", "125"],
        &["padic", "show", "--p", "5", "--prec", "100000", "1"],
        &["padic", "add", "--p", "5", "1/0", "1"],
        &["hensel", "solve", "--p", "2", "--poly", "x^2-5", "--x0", "1", "--t", "1"],
        &["hensel", "image", "--p", "3", "--poly", "x^2", "--x0", "1", "--t", "1", "--level", "60"],
        &["measure", "--op", "count", "--p", "3", "--level", "400"],
        &["plog", "log", "--p", "3", "--prec", "4", "1/3"],
    ] {
        let out = cli(args);
        assert_eq!(out.code, 1, "{args:?}: {}", out.stderr);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["--format", "json", "series", "compose", "--field", "Q", "1 + T + O(T^6)", "T - T^2 + O(T^6)"];
    assert_eq!(cli(&args), cli(&args));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn arbitrary_argv_never_panics(
        tokens in prop::collection::vec(
            prop_oneof![
                Just("padic".to_string()), Just("hensel".to_string()), Just("series".to_string()),
                Just("measure".to_string()), Just("sums".to_string()), Just("plog".to_string()),
                Just("add".to_string()), Just("sqrt".to_string()), Just("log".to_string()),
                Just("--p".to_string()), Just("--prec".to_string()), Just("--field".to_string()),
                Just("--op".to_string()), Just("--format".to_string()), Just("json".to_string()),
                "-?[0-9]{1,3}(/[0-9]{1,2})?",
                "[ -~]{0,12}",
            ],
            0..8,
        )
    ) {
        let out = run(std::iter::once("padicore".to_string()).chain(tokens));
        prop_assert!([0, 1, 2].contains(&out.code));
    }
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ekrlab(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ekrlab"));
    cmd.args(args).env_remove("EKRLAB_CACHE");
    match cache {
        Some(dir) => cmd.arg("--cache-dir").arg(dir),
        None => cmd.arg("--no-cache"),
    };
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn without_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

fn all_pass(v: &Value) -> bool {
    v["verdicts"].as_array().unwrap().iter().all(|x| x["pass"] == true)
}

#[test]
fn rank_of_agl_2_2_is_six() {
    let out = ekrlab(&["rank", "--group", "agl(2,2)"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "ekrlab.report/1");
    assert_eq!(v["results"]["certificate"]["rank"], 6);
    assert_eq!(v["results"]["certificate"]["certified"], true);
    assert_eq!(v["status"], "pass");
}

#[test]
fn class_only_rank_matches_full_rank() {
    let full = json(&ekrlab(&["rank", "--group", "agl(3,2)"], None));
    let class = json(&ekrlab(&["rank", "--group", "agl(3,2)", "--class-only"], None));
    assert_eq!(full["results"]["certificate"]["rank"], 42);
    assert_eq!(class["results"]["certificate"]["rank"], 42);
    assert_eq!(class["results"]["certificate"]["rows"], 168);
}

#[test]
fn beta_sum_on_s() {
    let out = ekrlab(&["charsum", "--group", "agl(3,2)", "--char", "beta", "--coset", "S"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["value"], "32");
    assert_eq!(v["results"]["pointwise"], "32");
    assert_eq!(v["results"]["closed_form"], "32");
}

#[test]
fn character_sums_over_other_subsets() {
    for (chi, coset, want) in [("psi", "G", "0"), ("one", "coset(1,2)", "168"), ("theta", "H", "24")] {
        let v = json(&ekrlab(&["charsum", "--group", "agl(3,2)", "--char", chi, "--coset", coset], None));
        assert_eq!(v["results"]["value"], want, "{chi} on {coset}");
        assert!(all_pass(&v));
    }
}

#[test]
fn ekr_pipeline_on_agl_3_2() {
    let out = ekrlab(&["ekr", "--group", "agl(3,2)"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(all_pass(&v));
    assert_eq!(v["results"]["ratio_bound"], "168");
    assert_eq!(v["results"]["lambda_psi"], "-75");
    assert!(v["verdicts"].as_array().unwrap().len() >= 8);
}

#[test]
fn ekr_on_non_two_transitive_group_fails_verdict() {
    let out = ekrlab(&["ekr", "--group", "gens:[1,2,3,0]"], None);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "fail");
}

#[test]
fn all_maximum_sets_of_sym4() {
    let v = json(&ekrlab(&["mis", "--all", "--group", "sym(4)"], None));
    assert_eq!(v["results"]["count"], 16);
    assert_eq!(v["results"]["canonical"], 16);
    assert!(all_pass(&v));
}

#[test]
fn spectrum_of_sym5() {
    let v = json(&ekrlab(&["spectrum", "--group", "sym(5)"], None));
    assert_eq!(v["results"]["least"], -11);
    assert_eq!(v["results"]["second_least"], -4);
    assert!(all_pass(&v));
}

#[test]
fn stability_on_agl_3_2() {
    let out = ekrlab(&["stability", "--group", "agl(3,2)", "--sets", "20"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["held"], 20);
}

#[test]
fn usage_errors_exit_two() {
    let out = ekrlab(&["rank", "--frobnicate"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = ekrlab(&["rank", "--group", "agl(3,3)"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 7"));
    let out = ekrlab(&["charsum", "--group", "agl(3,2)", "--char", "gamma"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = ekrlab(&["charsum", "--group", "sym(4)", "--char", "psi"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = ekrlab(&["rank", "--primes", "0"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn over_cap_is_infeasible() {
    let out = ekrlab(&["group", "--group", "sym(8)", "--max-group-size", "1000"], None);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["status"], "infeasible");
    assert_eq!(v["verdicts"][0]["pass"], false);
    let out = ekrlab(&["mis", "--all", "--group", "agl(3,2)"], None);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn runs_are_deterministic() {
    let args = ["spectrum", "--group", "agl(3,2)"];
    let a = without_time(json(&ekrlab(&args, None)));
    let b = without_time(json(&ekrlab(&args, None)));
    assert_eq!(a, b);
    let s = without_time(json(&ekrlab(&["spectrum", "--group", "agl(3,2)", "--sequential"], None)));
    assert_eq!(a["results"], s["results"]);
    assert_eq!(a["verdicts"], s["verdicts"]);
}

#[test]
fn cache_hits_and_rebuilds_after_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["ekr", "--group", "agl(3,2)"];
    let fresh = without_time(json(&ekrlab(&args, None)));
    let first = without_time(json(&ekrlab(&args, Some(dir.path()))));
    let second = without_time(json(&ekrlab(&args, Some(dir.path()))));
    assert_eq!(fresh, first);
    assert_eq!(first, second);

    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "bin") {
            let mut bytes = std::fs::read(&path).unwrap();
            bytes[0] ^= 1;
            std::fs::write(&path, bytes).unwrap();
        }
    }
    let out = ekrlab(&["spectrum", "--group", "agl(3,2)"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checksum"));
    let uncached = without_time(json(&ekrlab(&["spectrum", "--group", "agl(3,2)"], None)));
    assert_eq!(without_time(json(&out)), uncached);
}

#[test]
fn alternative_formats() {
    let out = ekrlab(&["group", "--group", "alt(5)", "--format", "csv"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("section,key,value\n"));
    assert!(text.contains("result,order,60"));
    let out = ekrlab(&["group", "--group", "alt(5)", "--format", "human"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("ekrlab group: pass"));
}

#[test]
#[ignore = "runs the full acceptance suite"]
fn report_all_lists_every_criterion() {
    let v = json(&ekrlab(&["report-all"], None));
    assert_eq!(v["results"]["total"], 10);
}

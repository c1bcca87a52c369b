//! The JSON report envelope shared by every subcommand, and its CSV and
//! plain-text renderings.

use serde::Serialize;
use serde_json::Value;

pub const REPORT_SCHEMA: &str = "ekrlab.report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Infeasible,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Infeasible => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub subcommand: String,
    pub inputs: Value,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    pub status: Status,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn new(subcommand: &str, inputs: Value, results: Value, verdicts: Vec<Verdict>) -> Self {
        let status = if verdicts.iter().all(|v| v.pass) {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            schema: REPORT_SCHEMA,
            subcommand: subcommand.into(),
            inputs,
            results,
            verdicts,
            status,
            wall_time_ms: 0.0,
        }
    }

    pub fn infeasible(subcommand: &str, inputs: Value, reason: String) -> Self {
        Self {
            status: Status::Infeasible,
            ..Self::new(
                subcommand,
                inputs,
                serde_json::json!({ "infeasible": reason }),
                vec![Verdict::new("feasible at desk scale", false, reason.clone())],
            )
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Csv => self.csv(),
            Format::Human => self.human(),
        }
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut row = |a: &str, b: &str, c: &str| w.write_record([a, b, c]).expect("in-memory write");
        row("section", "key", "value");
        row("meta", "schema", self.schema);
        row("meta", "subcommand", &self.subcommand);
        for (k, v) in flatten(&self.inputs) {
            row("input", &k, &v);
        }
        for (k, v) in flatten(&self.results) {
            row("result", &k, &v);
        }
        for v in &self.verdicts {
            let value = format!("{}: {}", if v.pass { "pass" } else { "fail" }, v.detail);
            row("verdict", &v.name, &value);
        }
        row("meta", "status", &scalar(&serde_json::to_value(self.status).expect("status")));
        row("meta", "wall_time_ms", &format!("{:.3}", self.wall_time_ms));
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    fn human(&self) -> String {
        let mut out = String::new();
        let status = scalar(&serde_json::to_value(self.status).expect("status"));
        out += &format!("ekrlab {}: {} ({:.1} ms)\n", self.subcommand, status, self.wall_time_ms);
        let inputs = flatten(&self.inputs);
        let results = flatten(&self.results);
        let width = inputs.iter().chain(&results).map(|(k, _)| k.len()).max().unwrap_or(0);
        for (title, rows) in [("inputs", inputs), ("results", results)] {
            out += &format!("{title}:\n");
            for (k, v) in rows {
                out += &format!("  {k:<width$}  {v}\n");
            }
        }
        if !self.verdicts.is_empty() {
            out += "verdicts:\n";
            for v in &self.verdicts {
                out += &format!("  [{}] {}: {}\n", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
            }
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Dotted-path leaves of a JSON value; arrays of scalars stay on one line.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let join = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    walk(&join(k), child, out);
                }
            }
            Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&join(&i.to_string()), child, out);
                }
            }
            Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(scalar).collect();
                out.push((prefix.to_string(), format!("[{}]", parts.join(" "))));
            }
            _ => out.push((prefix.to_string(), scalar(v))),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        Report::new(
            "rank",
            json!({"group": "agl(2,2)"}),
            json!({"rank": 6, "ranks": [6, 6], "nested": {"a": "x,y"}}),
            vec![Verdict::new("certified", true, "ok")],
        )
    }

    #[test]
    fn status_follows_verdicts() {
        assert_eq!(sample().status, Status::Pass);
        let mut r = sample();
        r.verdicts.push(Verdict::new("other", false, "no"));
        let r = Report::new(&r.subcommand, r.inputs, r.results, r.verdicts);
        assert_eq!(r.status.exit_code(), 1);
        let r = Report::infeasible("rank", json!({}), "too big".into());
        assert_eq!(r.status.exit_code(), 3);
    }

    #[test]
    fn renders_all_formats() {
        let r = sample();
        let j: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(j["schema"], REPORT_SCHEMA);
        assert_eq!(j["results"]["rank"], 6);
        let c = r.render(Format::Csv);
        assert!(c.contains("result,nested.a,\"x,y\""));
        assert!(c.contains("result,ranks,[6 6]"));
        let h = r.render(Format::Human);
        assert!(h.contains("[PASS] certified: ok"));
    }
}

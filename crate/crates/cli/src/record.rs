//! Run artifacts: check rows, solve diagnostics, and the JSON report.
//! Numbers serialize with 17 significant digits so that reruns with the
//! same config and seed reproduce the bytes exactly.

use cmc_core::estimates::EstimateReport;
use cmc_core::solver::Solution;

/// One row of the check table.
#[derive(Debug, Clone)]
pub struct CheckRow {
    pub name: String,
    /// Transversal site for local checks, empty for global ones.
    pub x0: Option<f64>,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
    pub witnesses: Vec<(f64, f64)>,
}

impl CheckRow {
    pub fn from_report(report: &EstimateReport, suffix: &str) -> CheckRow {
        CheckRow {
            name: format!("{}{}", report.name, suffix),
            x0: report.x0,
            measured: report.measured,
            bound: report.bound,
            slack: report.slack_allowance,
            pass: report.pass,
            witnesses: report.witnesses.iter().map(|p| (p.x, p.y)).collect(),
        }
    }
}

/// Diagnostics of one completed solve.
#[derive(Debug, Clone)]
pub struct SolveInfo {
    pub name: String,
    pub vertices: usize,
    pub triangles: usize,
    pub h_max: f64,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub min_value: f64,
    pub max_value: f64,
}

impl SolveInfo {
    pub fn new(name: &str, solution: &Solution) -> SolveInfo {
        SolveInfo {
            name: name.to_string(),
            vertices: solution.mesh().num_vertices(),
            triangles: solution.mesh().num_triangles(),
            h_max: solution.mesh().h_max(),
            iterations: solution.iterations(),
            final_gradient_norm: solution.final_gradient_norm(),
            min_value: solution.min_value(),
            max_value: solution.max_value(),
        }
    }
}

/// One tabulated difference-profile value from a uniqueness run.
#[derive(Debug, Clone)]
pub struct DivergenceRow {
    pub length: f64,
    pub x: f64,
    pub difference: f64,
    /// difference / ln(2 + x), the growth-normalized profile.
    pub ratio: f64,
}

/// One refinement level of a convergence run.
#[derive(Debug, Clone)]
pub struct LevelRow {
    pub level: usize,
    pub resolution: String,
    pub h_max: f64,
    pub error: f64,
    /// log2(previous error / error); absent at the coarsest level.
    pub order: Option<f64>,
}

/// Everything a run produced, mirrored into `report.json`.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub scenario: String,
    pub config_hash: String,
    pub seed: u64,
    pub solves: Vec<SolveInfo>,
    pub checks: Vec<CheckRow>,
    pub divergence: Vec<DivergenceRow>,
    pub levels: Vec<LevelRow>,
    pub notes: Vec<String>,
    pub manifest: Vec<String>,
    /// Set when the run aborted on a solver error.
    pub error: Option<String>,
}

impl RunRecord {
    pub fn new(scenario: &str, config_hash: String, seed: u64) -> RunRecord {
        RunRecord {
            scenario: scenario.to_string(),
            config_hash,
            seed,
            solves: Vec::new(),
            checks: Vec::new(),
            divergence: Vec::new(),
            levels: Vec::new(),
            notes: Vec::new(),
            manifest: Vec::new(),
            error: None,
        }
    }

    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn to_json(&self) -> String {
        let mut w = JsonWriter::new();
        w.open_object();
        w.string_field("scenario", &self.scenario);
        w.string_field("config_hash", &self.config_hash);
        w.raw_field("seed", &self.seed.to_string());
        w.array_field("solves", &self.solves, |w, s| {
            w.open_object();
            w.string_field("name", &s.name);
            w.raw_field("vertices", &s.vertices.to_string());
            w.raw_field("triangles", &s.triangles.to_string());
            w.number_field("h_max", s.h_max);
            w.raw_field("iterations", &s.iterations.to_string());
            w.number_field("final_gradient_norm", s.final_gradient_norm);
            w.number_field("min_value", s.min_value);
            w.number_field("max_value", s.max_value);
            w.close_object();
        });
        w.array_field("checks", &self.checks, |w, c| {
            w.open_object();
            w.string_field("name", &c.name);
            match c.x0 {
                Some(x) => w.number_field("x0", x),
                None => w.raw_field("x0", "null"),
            }
            w.number_field("measured", c.measured);
            w.number_field("bound", c.bound);
            w.number_field("slack", c.slack);
            w.raw_field("pass", if c.pass { "true" } else { "false" });
            w.array_field("witnesses", &c.witnesses, |w, p| {
                w.value(&format!("[{},{}]", fmt_f64(p.0), fmt_f64(p.1)));
            });
            w.close_object();
        });
        w.array_field("divergence", &self.divergence, |w, d| {
            w.open_object();
            w.number_field("length", d.length);
            w.number_field("x", d.x);
            w.number_field("difference", d.difference);
            w.number_field("ratio", d.ratio);
            w.close_object();
        });
        w.array_field("levels", &self.levels, |w, l| {
            w.open_object();
            w.raw_field("level", &l.level.to_string());
            w.string_field("resolution", &l.resolution);
            w.number_field("h_max", l.h_max);
            w.number_field("error", l.error);
            match l.order {
                Some(o) => w.number_field("order", o),
                None => w.raw_field("order", "null"),
            }
            w.close_object();
        });
        w.array_field("notes", &self.notes, |w, n| {
            w.value(&quote(n));
        });
        w.array_field("manifest", &self.manifest, |w, m| {
            w.value(&quote(m));
        });
        match &self.error {
            Some(e) => w.string_field("error", e),
            None => w.raw_field("error", "null"),
        }
        w.close_object();
        w.finish()
    }
}

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Minimal JSON emitter with deterministic formatting.
struct JsonWriter {
    out: String,
    need_comma: Vec<bool>,
}

impl JsonWriter {
    fn new() -> JsonWriter {
        JsonWriter {
            out: String::new(),
            need_comma: Vec::new(),
        }
    }

    fn pre_value(&mut self) {
        if let Some(flag) = self.need_comma.last_mut() {
            if *flag {
                self.out.push(',');
            }
            *flag = true;
        }
    }

    fn open_object(&mut self) {
        self.pre_value();
        self.out.push('{');
        self.need_comma.push(false);
    }

    fn close_object(&mut self) {
        self.need_comma.pop();
        self.out.push('}');
    }

    fn key(&mut self, name: &str) {
        self.pre_value();
        self.out.push_str(&quote(name));
        self.out.push(':');
        // The value that follows must not emit another comma.
        if let Some(flag) = self.need_comma.last_mut() {
            *flag = false;
        }
    }

    fn raw_field(&mut self, name: &str, value: &str) {
        self.key(name);
        self.pre_value();
        self.out.push_str(value);
    }

    fn string_field(&mut self, name: &str, value: &str) {
        self.key(name);
        self.pre_value();
        self.out.push_str(&quote(value));
    }

    fn number_field(&mut self, name: &str, value: f64) {
        self.raw_field(name, &fmt_f64(value));
    }

    fn value(&mut self, raw: &str) {
        self.pre_value();
        self.out.push_str(raw);
    }

    fn array_field<T>(&mut self, name: &str, items: &[T], mut each: impl FnMut(&mut Self, &T)) {
        self.key(name);
        self.pre_value();
        self.out.push('[');
        self.need_comma.push(false);
        for item in items {
            each(self, item);
        }
        self.need_comma.pop();
        self.out.push(']');
    }

    fn finish(mut self) -> String {
        self.out.push('\n');
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record() -> RunRecord {
        let mut r = RunRecord::new("verify", "abc123".into(), 7);
        r.solves.push(SolveInfo {
            name: "main".into(),
            vertices: 10,
            triangles: 12,
            h_max: 0.25,
            iterations: 4,
            final_gradient_norm: 1.0e-12,
            min_value: -0.5,
            max_value: 0.0,
        });
        r.checks.push(CheckRow {
            name: "classical_max".into(),
            x0: None,
            measured: 0.0,
            bound: 0.5,
            slack: 0.1,
            pass: true,
            witnesses: vec![(1.0, 2.0)],
        });
        r.checks.push(CheckRow {
            name: "theorem3".into(),
            x0: Some(2.0),
            measured: 0.2,
            bound: 5.0,
            slack: 0.1,
            pass: true,
            witnesses: vec![],
        });
        r.notes.push("note \"quoted\"".into());
        r.manifest.push("checks.csv".into());
        r
    }

    #[test]
    fn json_shape_is_stable() {
        let json = sample_record().to_json();
        assert!(json.starts_with("{\"scenario\":\"verify\""));
        assert!(json.contains("\"x0\":null"));
        assert!(json.contains("\"x0\":2.0000000000000000e0"));
        assert!(json.contains("\"witnesses\":[[1.0000000000000000e0,2.0000000000000000e0]]"));
        assert!(json.contains("\\\"quoted\\\""));
        assert!(json.ends_with("\"error\":null}\n"));
    }

    #[test]
    fn json_is_deterministic() {
        assert_eq!(sample_record().to_json(), sample_record().to_json());
    }

    #[test]
    fn failed_checks_counts_only_failures() {
        let mut r = sample_record();
        assert_eq!(r.failed_checks(), 0);
        r.checks[1].pass = false;
        assert_eq!(r.failed_checks(), 1);
    }

    #[test]
    fn float_format_is_17_significant_digits() {
        assert_eq!(fmt_f64(0.2), "2.0000000000000001e-1");
        assert_eq!(fmt_f64(-1.0), "-1.0000000000000000e0");
    }
}

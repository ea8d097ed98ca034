use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::geometry::Chart;

/// One named result. Numeric checks carry the tolerance they were held to.
#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub name: String,
    pub value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    pub name: String,
    pub max_abs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Inputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    pub params: BTreeMap<String, f64>,
    #[serde(rename = "box", skip_serializing_if = "Vec::is_empty")]
    pub sample_box: Vec<(String, f64, f64)>,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub samples: usize,
}

impl Inputs {
    pub fn with_chart(mut self, chart: &Chart) -> Inputs {
        for (k, v) in chart.params() {
            self.params.insert(k.clone(), *v);
        }
        if let Ok(region) = chart.sample_region() {
            self.sample_box = chart
                .coords()
                .iter()
                .zip(region)
                .map(|(c, (lo, hi))| (c.clone(), lo, hi))
                .collect();
        }
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub conventions: BTreeMap<&'static str, &'static str>,
}

impl Default for Provenance {
    fn default() -> Self {
        let conventions = [
            ("signature", "(-,+,+,+); reduced metrics (-,+,+)"),
            ("riemann", "R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb"),
            ("ricci", "R_bd = R^a_bad"),
            ("cross_term", "g_tphi is half the dt dphi coefficient of the line element"),
            ("reduction", "gbar = g + e^{2u}(dphi + A)^2, conformal metric e^{2u} g"),
            ("field_strength", "F = dA; horizontal equation uses the Kaluza-Klein sign of the FF term"),
            ("twist", "G = e^{3u} *F with the Hodge dual of the unrescaled g"),
            ("constraint", "chi = e^{-gamma}, m_AV = 2(1-chi_inf), E = 2 pi (1-chi_inf)"),
        ]
        .into_iter()
        .collect();
        Provenance {
            tool: "axired",
            version: env!("CARGO_PKG_VERSION"),
            conventions,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Inputs,
    pub results: Vec<Entry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<ResidualRow>,
    pub pass: bool,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(command: &str, inputs: Inputs) -> Report {
        Report {
            command: command.into(),
            inputs,
            results: Vec::new(),
            residuals: Vec::new(),
            pass: true,
            provenance: Provenance::default(),
        }
    }

    pub fn info(&mut self, name: &str, value: impl Into<Value>) {
        self.results.push(Entry {
            name: name.into(),
            value: value.into(),
            tolerance: None,
            pass: None,
        });
    }

    /// A numeric result that must lie within `tol`; `ok` decides the check.
    pub fn check(&mut self, name: &str, value: f64, tol: f64, ok: bool) {
        self.pass &= ok;
        self.results.push(Entry {
            name: name.into(),
            value: json_number(value),
            tolerance: Some(tol),
            pass: Some(ok),
        });
    }

    /// A pass/fail fact without a numeric tolerance.
    pub fn flag(&mut self, name: &str, value: impl Into<Value>, ok: bool) {
        self.pass &= ok;
        self.results.push(Entry {
            name: name.into(),
            value: value.into(),
            tolerance: None,
            pass: Some(ok),
        });
    }

    pub fn residual(&mut self, name: &str, max_abs: f64, tol: f64) {
        let ok = max_abs < tol;
        self.pass &= ok;
        self.residuals.push(ResidualRow {
            name: name.into(),
            max_abs,
            tolerance: tol,
            pass: ok,
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Non-finite values become strings; JSON has no NaN or infinity.
pub fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rational,
    Martingale,
    Geometric,
}

impl Method {
    fn as_str(self) -> &'static str {
        match self {
            Method::Rational => "rational",
            Method::Martingale => "martingale",
            Method::Geometric => "geometric",
        }
    }
}

/// Result of one pricing command, printed as a table or JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub method: Method,
    pub price: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, f64>,
}

impl OutputRecord {
    pub fn new(method: Method, price: f64) -> Self {
        Self {
            method,
            price,
            z: None,
            branch: None,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn with_z(mut self, z: f64) -> Self {
        self.z = Some(z);
        self
    }

    pub fn with_branch(mut self, branch: impl Into<String>) -> Self {
        self.branch = Some(branch.into());
        self
    }

    pub fn diagnostic(mut self, name: &str, value: f64) -> Self {
        self.diagnostics.insert(name.to_string(), value);
        self
    }

    /// Aligned two-column table; `decimals` applies to price and fraction.
    pub fn render_text(&self, decimals: usize) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("method".into(), self.method.as_str().into()),
            ("price".into(), format!("{:.*}", decimals, self.price)),
        ];
        if let Some(z) = self.z {
            rows.push(("z".into(), format!("{z:.decimals$}")));
        }
        if let Some(branch) = &self.branch {
            rows.push(("branch".into(), branch.clone()));
        }
        for (name, value) in &self.diagnostics {
            rows.push((name.clone(), format_diagnostic(*value)));
        }
        render_rows(&rows)
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("OutputRecord serializes")
    }
}

pub fn render_rows(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

/// Counts print as integers, residuals in scientific notation, anything
/// else with three decimals.
pub fn format_diagnostic(value: f64) -> String {
    if value.fract() == 0.0 && value.abs() < 1e9 {
        format!("{value:.0}")
    } else if value != 0.0 && value.abs() < 1e-3 {
        format!("{value:.3e}")
    } else {
        format!("{value:.3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let rec = OutputRecord::new(Method::Geometric, 9.7639)
            .with_z(1.0)
            .with_branch("full_investment")
            .diagnostic("growth_residual", 1e-17);
        let json = rec.render_json();
        let back: OutputRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.render_json(), json);
    }

    #[test]
    fn optional_fields_are_omitted() {
        let json = serde_json::to_value(OutputRecord::new(Method::Martingale, 50.0)).unwrap();
        assert_eq!(json, serde_json::json!({"method": "martingale", "price": 50.0, "diagnostics": {}}));
    }

    #[test]
    fn text_uses_requested_precision() {
        let text = OutputRecord::new(Method::Geometric, 86.07912).with_z(0.5).render_text(3);
        assert!(text.contains("price   86.079"));
        assert!(text.contains("z       0.500"));
    }

    #[test]
    fn diagnostic_formats() {
        assert_eq!(format_diagnostic(7.0), "7");
        assert_eq!(format_diagnostic(2.5e-12), "2.500e-12");
        assert_eq!(format_diagnostic(-10.0), "-10");
        assert_eq!(format_diagnostic(1.1001), "1.100");
    }
}

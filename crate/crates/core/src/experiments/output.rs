//! CSV and JSON writers for sweep results.

use std::io::Write;

use serde::Serialize;

use super::sweep::SweepRow;
use crate::config::ResolvedConfig;
use crate::error::Result;

pub const CSV_HEADER: [&str; 6] = [
    "variable",
    "value",
    "scenario",
    "method",
    "essr_bps_hz",
    "std_err",
];

/// 17 significant digits, enough for an exact `f64` round trip.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// One flattened output line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRecord {
    pub variable: String,
    pub value: f64,
    pub scenario: String,
    pub method: String,
    pub essr_bps_hz: f64,
    /// Zero for closed-form entries.
    pub std_err: f64,
}

impl CsvRecord {
    pub fn from_rows(rows: &[SweepRow]) -> Vec<CsvRecord> {
        rows.iter()
            .flat_map(|row| {
                row.entries.iter().map(move |e| CsvRecord {
                    variable: row.variable.clone(),
                    value: row.value,
                    scenario: e.scenario.as_str().to_string(),
                    method: e.method.as_str().to_string(),
                    essr_bps_hz: e.essr,
                    std_err: e.std_err.unwrap_or(0.0),
                })
            })
            .collect()
    }
}

/// Writes the header and one line per (row, scenario, method), LF endings.
pub fn write_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in CsvRecord::from_rows(rows) {
        w.write_record([
            r.variable.as_str(),
            &format_value(r.value),
            r.scenario.as_str(),
            r.method.as_str(),
            &format_value(r.essr_bps_hz),
            &format_value(r.std_err),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepDocument<'a> {
    pub params: &'a ResolvedConfig,
    pub rows: Vec<CsvRecord>,
    pub tool_version: &'static str,
}

pub fn write_json<W: Write>(mut out: W, params: &ResolvedConfig, rows: &[SweepRow]) -> Result<()> {
    let doc = SweepDocument {
        params,
        rows: CsvRecord::from_rows(rows),
        tool_version: env!("CARGO_PKG_VERSION"),
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{Method, Scenario, SweepEntry};
    use proptest::prelude::*;

    fn rows() -> Vec<SweepRow> {
        vec![SweepRow {
            variable: "alpha".into(),
            value: 0.1,
            distance_m: None,
            entries: vec![
                SweepEntry {
                    scenario: Scenario::Wfj,
                    method: Method::ClosedForm,
                    essr: 1.0 / 3.0,
                    std_err: None,
                },
                SweepEntry {
                    scenario: Scenario::Wofj,
                    method: Method::MonteCarlo,
                    essr: 0.2,
                    std_err: Some(1e-3),
                },
            ],
        }]
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(
            lines[0],
            "variable,value,scenario,method,essr_bps_hz,std_err"
        );
        assert_eq!(lines[1], "alpha,1.0000000000000001e-1,wfj,closed_form,3.3333333333333331e-1,0.0000000000000000e0");
        assert!(lines[2].starts_with("alpha,1.0000000000000001e-1,wofj,monte_carlo,"));
        assert_eq!(lines[3], "");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_layout() {
        let mut buf = Vec::new();
        write_json(&mut buf, &ResolvedConfig::reference(), &rows()).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["params"]["rho"], 2.7);
        assert_eq!(v["rows"][1]["scenario"], "wofj");
        assert_eq!(v["rows"][0]["essr_bps_hz"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    }

    proptest! {
        #[test]
        fn formatted_values_round_trip(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let back: f64 = format_value(v).parse().unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }
}

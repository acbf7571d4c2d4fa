//! Trace serialization: one CSV row per iterate with the schema
//! `t,norm_x,cos_theta1,heron_eps,grad_norm,eps_u,eps_sigma`, plus an
//! optional trailing `mode` column for accelerated runs. Floats print in
//! shortest round-trip form, so a parsed-back trace is bit-identical.

use std::fmt::Write as FmtWrite;
use std::io::Write;

use crate::error::Result;
use crate::rank1::TraceRecord;

pub const TRACE_HEADER: &str = "t,norm_x,cos_theta1,heron_eps,grad_norm,eps_u,eps_sigma";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders a trace as CSV. `mode` adds a constant trailing column
/// (`gd`, `polyak`, `nesterov`, `nesterov-general`).
pub fn trace_to_csv(records: &[TraceRecord], mode: Option<&str>) -> String {
    let mut out = String::new();
    out.push_str(TRACE_HEADER);
    if mode.is_some() {
        out.push_str(",mode");
    }
    out.push('\n');
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            r.t,
            r.norm_x,
            opt(r.cos_theta1),
            opt(r.heron_eps),
            r.grad_norm,
            opt(r.eps_u),
            opt(r.eps_sigma)
        );
        if let Some(m) = mode {
            let _ = write!(out, ",{m}");
        }
        out.push('\n');
    }
    out
}

pub fn write_trace_csv(
    mut w: impl Write,
    records: &[TraceRecord],
    mode: Option<&str>,
) -> Result<()> {
    w.write_all(trace_to_csv(records, mode).as_bytes())?;
    Ok(())
}

/// Parses a trace CSV produced by [`trace_to_csv`]; the inverse up to the
/// optional mode column, which is returned separately.
pub fn parse_trace_csv(text: &str) -> Result<(Vec<TraceRecord>, Option<String>)> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let has_mode = header.ends_with(",mode");
    let mut mode = None;
    let mut records = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse_opt = |s: &str| -> Option<f64> {
            if s.is_empty() {
                None
            } else {
                s.parse().ok()
            }
        };
        records.push(TraceRecord {
            t: fields[0].parse().unwrap_or(0),
            norm_x: fields[1].parse().unwrap_or(f64::NAN),
            cos_theta1: parse_opt(fields[2]),
            heron_eps: parse_opt(fields[3]),
            grad_norm: fields[4].parse().unwrap_or(f64::NAN),
            eps_u: parse_opt(fields[5]),
            eps_sigma: parse_opt(fields[6]),
        });
        if has_mode {
            mode = fields.get(7).map(|s| s.to_string());
        }
    }
    Ok((records, mode))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<TraceRecord> {
        vec![
            TraceRecord {
                t: 0,
                norm_x: 1.2345678901234567,
                cos_theta1: None,
                heron_eps: None,
                grad_norm: 0.5,
                eps_u: None,
                eps_sigma: None,
            },
            TraceRecord {
                t: 1,
                norm_x: 1.0000000001,
                cos_theta1: Some(-0.99999999),
                heron_eps: Some(1e-10),
                grad_norm: 1e-12,
                eps_u: Some(3.5e-9),
                eps_sigma: Some(0.0),
            },
        ]
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let records = sample();
        let csv = trace_to_csv(&records, None);
        assert!(csv.starts_with(TRACE_HEADER));
        let (parsed, mode) = parse_trace_csv(&csv).unwrap();
        assert_eq!(parsed, records);
        assert_eq!(mode, None);
    }

    #[test]
    fn mode_column_is_appended() {
        let records = sample();
        let csv = trace_to_csv(&records, Some("polyak"));
        assert!(csv.lines().next().unwrap().ends_with(",mode"));
        let (parsed, mode) = parse_trace_csv(&csv).unwrap();
        assert_eq!(parsed, records);
        assert_eq!(mode.as_deref(), Some("polyak"));
    }
}

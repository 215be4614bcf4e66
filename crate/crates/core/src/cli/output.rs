//! Results files: fixed-schema CSV and JSON with 12 significant digits.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::encodings::EncodingKind;
use crate::harness::{PointFailure, ResultRecord};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 19] = [
    "encoding",
    "n",
    "theta",
    "p",
    "k",
    "trace_norm",
    "A_k_exact",
    "A_k_hat",
    "P_star",
    "w_star",
    "acc_empirical",
    "acc_predicted_exact",
    "acc_predicted_hat",
    "accessible_fraction",
    "gap",
    "epsilon",
    "n_search",
    "n_eval",
    "master_seed",
];

/// Nearest double to `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn fmt_f(x: f64) -> String {
    format!("{:?}", round12(x))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

pub fn rounded(r: &ResultRecord) -> ResultRecord {
    ResultRecord {
        theta: round12(r.theta),
        p: round12(r.p),
        trace_norm: r.trace_norm.map(round12),
        a_k_exact: round12(r.a_k_exact),
        a_k_hat: round12(r.a_k_hat),
        acc_empirical: round12(r.acc_empirical),
        acc_predicted_exact: round12(r.acc_predicted_exact),
        acc_predicted_hat: round12(r.acc_predicted_hat),
        accessible_fraction: r.accessible_fraction.map(round12),
        gap: r.gap.map(round12),
        epsilon: round12(r.epsilon),
        ..r.clone()
    }
}

/// Serializes string rows; `header` first.
pub fn csv_string<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii rows")
}

pub fn to_csv(records: &[ResultRecord]) -> String {
    csv_string(
        &CSV_HEADER,
        records.iter().map(|r| {
            [
                r.encoding.as_str().to_string(),
                r.n.to_string(),
                fmt_f(r.theta),
                fmt_f(r.p),
                r.k.to_string(),
                fmt_opt(r.trace_norm),
                fmt_f(r.a_k_exact),
                fmt_f(r.a_k_hat),
                r.p_star.to_string(),
                r.w_star.to_string(),
                fmt_f(r.acc_empirical),
                fmt_f(r.acc_predicted_exact),
                fmt_f(r.acc_predicted_hat),
                fmt_opt(r.accessible_fraction),
                fmt_opt(r.gap),
                fmt_f(r.epsilon),
                r.n_search.to_string(),
                r.n_eval.to_string(),
                r.master_seed.to_string(),
            ]
        }),
    )
}

fn field<T: std::str::FromStr>(line: u64, name: &str, s: &str) -> Result<T, CliError> {
    s.parse()
        .map_err(|_| CliError::Config(format!("results line {line}: bad {name} value {s:?}")))
}

fn opt_field(line: u64, name: &str, s: &str) -> Result<Option<f64>, CliError> {
    if s.is_empty() {
        Ok(None)
    } else {
        field(line, name, s).map(Some)
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<ResultRecord>, CliError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| CliError::Config(format!("results CSV: {e}")))?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(CliError::Config("results CSV header does not match the schema".into()));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let f = row.map_err(|e| CliError::Config(format!("results CSV: {e}")))?;
        let ln = f.position().map(|p| p.line()).unwrap_or(0);
        let encoding = match &f[0] {
            "product" => EncodingKind::Product,
            "entangling" => EncodingKind::Entangling,
            other => {
                return Err(CliError::Config(format!(
                    "results line {ln}: unknown encoding {other:?}"
                )))
            }
        };
        out.push(ResultRecord {
            encoding,
            n: field(ln, "n", &f[1])?,
            theta: field(ln, "theta", &f[2])?,
            p: field(ln, "p", &f[3])?,
            k: field(ln, "k", &f[4])?,
            trace_norm: opt_field(ln, "trace_norm", &f[5])?,
            a_k_exact: field(ln, "A_k_exact", &f[6])?,
            a_k_hat: field(ln, "A_k_hat", &f[7])?,
            p_star: field(ln, "P_star", &f[8])?,
            w_star: field(ln, "w_star", &f[9])?,
            acc_empirical: field(ln, "acc_empirical", &f[10])?,
            acc_predicted_exact: field(ln, "acc_predicted_exact", &f[11])?,
            acc_predicted_hat: field(ln, "acc_predicted_hat", &f[12])?,
            accessible_fraction: opt_field(ln, "accessible_fraction", &f[13])?,
            gap: opt_field(ln, "gap", &f[14])?,
            epsilon: field(ln, "epsilon", &f[15])?,
            n_search: field(ln, "n_search", &f[16])?,
            n_eval: field(ln, "n_eval", &f[17])?,
            master_seed: field(ln, "master_seed", &f[18])?,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub schema_version: u32,
    pub records: Vec<ResultRecord>,
    #[serde(default)]
    pub failures: Vec<PointFailure>,
}

pub fn to_json(records: &[ResultRecord], failures: &[PointFailure]) -> String {
    let doc = ResultsDocument {
        schema_version: SCHEMA_VERSION,
        records: records.iter().map(rounded).collect(),
        failures: failures.to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("results serialize")
}

pub fn parse_json(text: &str) -> Result<Vec<ResultRecord>, CliError> {
    let doc: ResultsDocument =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("results JSON: {e}")))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "unsupported results schema version {}",
            doc.schema_version
        )));
    }
    Ok(doc.records)
}

/// Reads `results.json` or `results.csv`, chosen by extension.
pub fn read_results(path: &Path) -> Result<Vec<ResultRecord>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => parse_json(&text),
        _ => parse_csv(&text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use proptest::prelude::*;

    fn record(x: f64) -> ResultRecord {
        ResultRecord {
            encoding: EncodingKind::Entangling,
            n: 4,
            theta: std::f64::consts::FRAC_PI_4,
            p: 0.1 * 3.0,
            k: 2,
            trace_norm: Some(x * 2.0),
            a_k_exact: x,
            a_k_hat: x + 1e-7,
            p_star: "XIIX".parse::<PauliString>().unwrap(),
            w_star: 2,
            acc_empirical: 0.5 + x / 4.0,
            acc_predicted_exact: 0.5 + x / 4.0,
            acc_predicted_hat: 0.5 + (x + 1e-7) / 4.0,
            accessible_fraction: Some(0.5),
            gap: None,
            epsilon: 1.0 / 20000f64.sqrt(),
            n_search: 20000,
            n_eval: 20000,
            master_seed: u64::MAX,
        }
    }

    #[test]
    fn round12_examples() {
        assert_eq!(round12(0.30000000000000004), 0.3);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(0.0), 0.0);
        assert_eq!(round12(-2.0), -2.0);
        assert_eq!(round12(1.23456789012345e-20), 1.23456789012e-20);
    }

    #[test]
    fn csv_layout() {
        let csv = to_csv(&[record(1.0)]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let row = lines.next().unwrap();
        assert!(row.starts_with("entangling,4,0.785398163397,0.3,2,2.0,1.0,1.0000001,XIIX,2,"));
        assert!(row.ends_with(",0.5,,0.00707106781187,20000,20000,18446744073709551615"));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("a,b\n").is_err());
        let short = format!("{}\nproduct,4\n", CSV_HEADER.join(","));
        assert!(parse_csv(&short).is_err());
        let mut csv = to_csv(&[record(1.0)]);
        csv = csv.replace("XIIX", "XIIQ");
        assert!(parse_csv(&csv).is_err());
        assert!(parse_json("{}").is_err());
        assert!(parse_json(r#"{"schema_version":99,"records":[]}"#).is_err());
    }

    proptest! {
        #[test]
        fn csv_and_json_agree_bitwise(x in 0.0f64..2.0) {
            let recs = vec![record(x)];
            let from_csv = parse_csv(&to_csv(&recs)).unwrap();
            let from_json = parse_json(&to_json(&recs, &[])).unwrap();
            prop_assert_eq!(&from_csv, &from_json);
            prop_assert_eq!(&from_csv[0], &rounded(&recs[0]));
            prop_assert_eq!(to_csv(&from_csv), to_csv(&recs));
        }
    }
}

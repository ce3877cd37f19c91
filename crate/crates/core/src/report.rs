//! Serializable reports and the matrix CSV format.
//!
//! JSON numbers are written in the shortest form that parses back to the
//! same `f64`, so `parse(emit(x)) == x` holds exactly. Extended-precision
//! runs additionally carry the full double-double values as decimal strings.
//!
//! CSV holds several matrices in one table. The header is
//! `matrix,row,col_1,…,col_g`; each following line is one matrix row, tagged
//! with the matrix name and the 1-based row index. Reals are printed with
//! 17 significant digits, integers as integers.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::curve::{ClusterAdvisory, CurveParams};
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, Matrix};
use crate::periods::{GateOutcome, PeriodSet, ResidualReport};
use crate::polygon::PolygonLayout;
use crate::scalar::{Precision, Real};

/// Output of `period`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub genus: usize,
    pub a: Vec<f64>,
    pub precision: Precision,
    #[serde(rename = "Pi0")]
    pub pi0: Vec<Vec<f64>>,
    #[serde(rename = "M")]
    pub m: Vec<Vec<i64>>,
    #[serde(rename = "N")]
    pub n: Vec<Vec<i64>>,
    /// `Y` with `Π = i·Y`.
    #[serde(rename = "Pi_im")]
    pub pi_im: Vec<Vec<f64>>,
    /// Extended precision only: `Y` to 32 significant digits.
    #[serde(
        rename = "Pi_im_text",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub pi_im_text: Option<Vec<Vec<String>>>,
    pub residuals: ResidualReport,
    pub nodes_total: usize,
    pub condition: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub advisory: Option<ClusterAdvisory>,
}

impl PeriodReport {
    pub fn new<T: Real>(p: &CurveParams<T>, ps: &PeriodSet<T>, residuals: ResidualReport) -> Self {
        let to_rows = |m: &Matrix<T>| m.to_f64().to_rows();
        let pi_im_text = (T::PRECISION == Precision::Extended).then(|| {
            ps.y.to_rows()
                .iter()
                .map(|r| r.iter().map(|x| x.to_sci(32)).collect())
                .collect()
        });
        PeriodReport {
            genus: p.genus(),
            a: p.a_f64(),
            precision: T::PRECISION,
            pi0: to_rows(&ps.pi0),
            m: ps.m.to_rows(),
            n: ps.n.to_rows(),
            pi_im: to_rows(&ps.y),
            pi_im_text,
            residuals,
            nodes_total: ps.nodes_total,
            condition: ps.condition,
            advisory: p.advisory(),
        }
    }

    /// The report's matrices as CSV.
    pub fn to_csv(&self) -> String {
        let real = |rows: &Vec<Vec<f64>>| Matrix::from_rows(rows).expect("rectangular");
        let int = |rows: &Vec<Vec<i64>>| Matrix::from_rows(rows).expect("rectangular");
        let mut out = CsvMatrices::default();
        out.push_real("Pi0", &real(&self.pi0));
        out.push_int("M", &int(&self.m));
        out.push_int("N", &int(&self.n));
        out.push_real("Pi_im", &real(&self.pi_im));
        out.finish(self.genus)
    }
}

/// Output of `verify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub period: PeriodReport,
    /// Genus 2 only: `|pr − ps − qr| / (|pr| + |ps| + |qr|)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus2_identity: Option<f64>,
    pub gates: Vec<GateOutcome>,
    pub passed: bool,
}

/// Output of `polygon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonReport {
    pub genus: usize,
    pub a: Vec<f64>,
    pub precision: Precision,
    pub layout: PolygonLayout,
}

/// Output of `invert`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvertReport {
    pub genus: usize,
    pub rho: Vec<f64>,
    pub guess: Vec<f64>,
    pub a: Vec<f64>,
    /// Aspect ratios of the recovered curve.
    pub rho_achieved: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub name: String,
    pub value: f64,
    pub error: f64,
    pub nodes: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub genus: usize,
    pub m_squared_identity: bool,
    pub n_pattern: bool,
    pub flip_gamma_equals_n: bool,
    pub gamma_unimodular: bool,
}

impl IdentityRow {
    pub fn passed(&self) -> bool {
        self.m_squared_identity
            && self.n_pattern
            && self.flip_gamma_equals_n
            && self.gamma_unimodular
    }
}

/// Output of `selftest`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub precision: Precision,
    pub calibration: Vec<CalibrationRow>,
    pub identities: Vec<IdentityRow>,
    pub passed: bool,
}

#[derive(Default)]
struct CsvMatrices {
    rows: Vec<Vec<String>>,
}

impl CsvMatrices {
    fn push_real(&mut self, name: &str, m: &Matrix<f64>) {
        for i in 0..m.rows() {
            let mut r = vec![name.to_string(), (i + 1).to_string()];
            r.extend(m.row(i).iter().map(|x| format!("{x:.16e}")));
            self.rows.push(r);
        }
    }

    fn push_int(&mut self, name: &str, m: &IntMatrix) {
        for i in 0..m.rows() {
            let mut r = vec![name.to_string(), (i + 1).to_string()];
            r.extend(m.row(i).iter().map(|x| x.to_string()));
            self.rows.push(r);
        }
    }

    fn finish(self, cols: usize) -> String {
        let mut out = String::from("matrix,row");
        for c in 1..=cols {
            let _ = write!(out, ",col_{c}");
        }
        out.push('\n');
        for r in self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes named real matrices in the CSV layout described above.
pub fn matrices_to_csv(matrices: &[(&str, &Matrix<f64>)]) -> String {
    let cols = matrices.first().map_or(0, |(_, m)| m.cols());
    let mut out = CsvMatrices::default();
    for (name, m) in matrices {
        out.push_real(name, m);
    }
    out.finish(cols)
}

/// Reads the CSV layout back, in order of first appearance.
pub fn matrices_from_csv(text: &str) -> Result<Vec<(String, Matrix<f64>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .clone();
    if header.len() < 3 || &header[0] != "matrix" || &header[1] != "row" {
        return Err(Error::Csv(
            "header must start with `matrix,row,col_1`".into(),
        ));
    }
    let mut out: Vec<(String, Vec<Vec<f64>>)> = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        let name = rec[0].to_string();
        let row: usize = rec[1]
            .parse()
            .map_err(|_| Error::Csv(format!("line {}: bad row index", line + 2)))?;
        let values = rec
            .iter()
            .skip(2)
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Csv(format!("line {}: `{v}` is not a number", line + 2)))
            })
            .collect::<Result<Vec<_>>>()?;
        let slot = match out.iter().position(|(n, _)| *n == name) {
            Some(i) => i,
            None => {
                out.push((name.clone(), Vec::new()));
                out.len() - 1
            }
        };
        if row != out[slot].1.len() + 1 {
            return Err(Error::Csv(format!(
                "line {}: rows of `{name}` out of order",
                line + 2
            )));
        }
        out[slot].1.push(values);
    }
    out.into_iter()
        .map(|(n, rows)| {
            let m = Matrix::from_rows(&rows)
                .ok_or_else(|| Error::Csv(format!("`{n}` is not rectangular")))?;
            Ok((n, m))
        })
        .collect()
}

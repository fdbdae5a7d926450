//! Model files and CSV tables.
//!
//! Model files are JSON objects tagged by `kind`:
//!
//! ```json
//! {"kind": "fo", "q": "1/4", "num": [1.0], "den": [1.0, 1.0]}
//! {"kind": "discrete", "Ts": 0.1, "num": [1.0], "den": [1.0, -0.5]}
//! {"kind": "copid", "q": "1/4", "gains": [1e-4, 2e-4]}
//! ```
//!
//! Coefficient arrays are in descending powers, the order in which models
//! are usually written down. Floats are written with round-trip precision,
//! so `parse(serialize(m)) == m` holds bit for bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ctrl::ContinuousOrderPid;
use crate::error::{Error, Result};
use crate::fotf::{CommensurateFoTf, DiscreteTf, FrequencyResponse};
use crate::rational::RationalOrder;
use crate::sim::SimResult;
use crate::sysid_time::TimeSeries;

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Fo(CommensurateFoTf),
    Discrete(DiscreteTf),
    Controller(ContinuousOrderPid),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum Wire {
    Fo {
        q: RationalOrder,
        num: Vec<f64>,
        den: Vec<f64>,
    },
    Discrete {
        #[serde(rename = "Ts")]
        ts: f64,
        num: Vec<f64>,
        den: Vec<f64>,
    },
    Copid {
        q: RationalOrder,
        gains: Vec<f64>,
    },
}

impl Model {
    pub fn to_json(&self) -> String {
        let wire = match self {
            Model::Fo(m) => Wire::Fo {
                q: m.q(),
                num: m.num_descending(),
                den: m.den_descending(),
            },
            Model::Discrete(m) => Wire::Discrete {
                ts: m.ts(),
                num: m.num().to_vec(),
                den: m.den().to_vec(),
            },
            Model::Controller(c) => Wire::Copid {
                q: c.q(),
                gains: c.gains().to_vec(),
            },
        };
        let mut s = serde_json::to_string_pretty(&wire).expect("model serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: Wire = serde_json::from_str(text)
            .map_err(|e| Error::Format(format!("line {}: {e}", e.line())))?;
        Ok(match wire {
            Wire::Fo { q, num, den } => {
                Model::Fo(CommensurateFoTf::from_descending(q, &num, &den)?)
            }
            Wire::Discrete { ts, num, den } => Model::Discrete(DiscreteTf::new(num, den, ts)?),
            Wire::Copid { q, gains } => Model::Controller(ContinuousOrderPid::new(q, gains)?),
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Fo(_) => "fo",
            Model::Discrete(_) => "discrete",
            Model::Controller(_) => "copid",
        }
    }
}

/// Writes a CSV table with the given header and rows of numbers.
pub fn write_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v}")
    }
}

/// Parses a numeric CSV with exactly the expected header.
/// Errors name the offending (1-based) line.
pub fn read_table(text: &str, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let Some((_, head)) = lines.next() else {
        return Err(Error::Format("line 1: empty file".into()));
    };
    let got: Vec<&str> = head.split(',').map(str::trim).collect();
    if got != header {
        return Err(Error::Format(format!(
            "line 1: expected header {:?}, found {:?}",
            header.join(","),
            head.trim()
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(Error::Format(format!(
                "line {}: expected {} fields, found {}",
                i + 1,
                header.len(),
                cells.len()
            )));
        }
        let row = cells
            .iter()
            .map(|c| {
                c.parse::<f64>().map_err(|_| {
                    Error::Format(format!("line {}: cannot parse {c:?} as a number", i + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn column(rows: &[Vec<f64>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}

pub fn time_series_to_csv(data: &TimeSeries) -> String {
    write_table(
        &["t", "u", "y"],
        (0..data.len()).map(|k| vec![data.t()[k], data.u()[k], data.y()[k]]),
    )
}

pub fn time_series_from_csv(text: &str) -> Result<TimeSeries> {
    let rows = read_table(text, &["t", "u", "y"])?;
    TimeSeries::new(column(&rows, 0), column(&rows, 1), column(&rows, 2))
}

pub fn freq_response_to_csv(data: &FrequencyResponse) -> String {
    write_table(
        &["omega", "re", "im"],
        data.omegas()
            .iter()
            .zip(data.values())
            .map(|(w, g)| vec![*w, g.re, g.im]),
    )
}

pub fn freq_response_from_csv(text: &str) -> Result<FrequencyResponse> {
    let rows = read_table(text, &["omega", "re", "im"])?;
    let values = rows.iter().map(|r| Complex64::new(r[1], r[2])).collect();
    FrequencyResponse::new(column(&rows, 0), values)
}

pub fn sim_result_to_csv(r: &SimResult) -> String {
    write_table(
        &["t", "y", "u_ctrl", "e"],
        (0..r.t.len()).map(|k| vec![r.t[k], r.y[k], r.u_ctrl[k], r.e[k]]),
    )
}

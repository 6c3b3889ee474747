//! Finite windows of the coefficient sequences with certified tail bounds.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bspline::SplineOrder;
use crate::error::{Error, Result};
use crate::numeric::{format17, ser_f64, ser_f64_seq};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientKind {
    C,
    B,
    A,
    Gamma,
}

impl CoefficientKind {
    pub fn name(self) -> &'static str {
        match self {
            CoefficientKind::C => "c",
            CoefficientKind::B => "b",
            CoefficientKind::A => "a",
            CoefficientKind::Gamma => "gamma",
        }
    }
}

impl fmt::Display for CoefficientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoefficientKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c" => Ok(CoefficientKind::C),
            "b" => Ok(CoefficientKind::B),
            "a" => Ok(CoefficientKind::A),
            "gamma" => Ok(CoefficientKind::Gamma),
            other => Err(Error::InvalidArgument(format!("unknown coefficient kind {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableMethod {
    Quadrature,
    Series,
    Composed,
}

/// Values of one sequence for `j = -window..=window`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub kind: CoefficientKind,
    pub m: SplineOrder,
    pub window: i64,
    /// Bound on `|x_j|` for every `|j| > window`.
    #[serde(serialize_with = "ser_f64")]
    pub tail_bound: f64,
    pub method: TableMethod,
    #[serde(serialize_with = "ser_f64_seq")]
    pub values: Vec<f64>,
}

#[derive(Serialize)]
struct TableDocument<'a> {
    schema_version: u32,
    #[serde(flatten)]
    table: &'a CoefficientTable,
}

#[derive(Deserialize)]
struct OwnedTableDocument {
    schema_version: u32,
    #[serde(flatten)]
    table: CoefficientTable,
}

pub const TABLE_SCHEMA_VERSION: u32 = 1;

impl CoefficientTable {
    pub fn new(
        kind: CoefficientKind,
        m: SplineOrder,
        window: i64,
        values: Vec<f64>,
        tail_bound: f64,
        method: TableMethod,
    ) -> Result<Self> {
        if values.len() as i64 != 2 * window + 1 {
            return Err(Error::Shape(format!(
                "{kind} table with window {window} needs {} values, got {}",
                2 * window + 1,
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "{kind} table has a non-finite value at j = {}",
                j as i64 - window
            )));
        }
        Ok(CoefficientTable {
            kind,
            m,
            window,
            tail_bound,
            method,
            values,
        })
    }

    pub fn contains(&self, j: i64) -> bool {
        j.abs() <= self.window
    }

    pub fn get(&self, j: i64) -> Result<f64> {
        if self.contains(j) {
            Ok(self.values[(j + self.window) as usize])
        } else {
            Err(Error::IndexOutOfWindow {
                index: j,
                window: self.window,
            })
        }
    }

    /// `x_j` inside the window, 0 outside.
    pub fn get_or_zero(&self, j: i64) -> f64 {
        if self.contains(j) {
            self.values[(j + self.window) as usize]
        } else {
            0.0
        }
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        -self.window..=self.window
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.indices().zip(self.values.iter().copied())
    }

    /// Sub-table on `-jmax..=jmax`; the tail bound becomes the larger of the old
    /// bound and the dropped values.
    pub fn restricted(&self, jmax: i64) -> CoefficientTable {
        if jmax >= self.window {
            return self.clone();
        }
        let dropped = self
            .iter()
            .filter(|(j, _)| j.abs() > jmax)
            .map(|(_, v)| v.abs())
            .fold(self.tail_bound, f64::max);
        CoefficientTable {
            kind: self.kind,
            m: self.m,
            window: jmax,
            tail_bound: dropped,
            method: self.method,
            values: self.values[(self.window - jmax) as usize..=(self.window + jmax) as usize].to_vec(),
        }
    }

    /// `j,value` rows with a header line.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(["j", "value"])?;
        for (j, v) in self.iter() {
            out.write_record([j.to_string(), format17(v)])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is ASCII"))
    }

    pub fn to_json_string(&self) -> Result<String> {
        let doc = TableDocument {
            schema_version: TABLE_SCHEMA_VERSION,
            table: self,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json_reader<R: Read>(r: R) -> Result<Self> {
        let doc: OwnedTableDocument = serde_json::from_reader(r)?;
        if doc.schema_version != TABLE_SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported table schema_version {}",
                doc.schema_version
            )));
        }
        let t = doc.table;
        CoefficientTable::new(t.kind, t.m, t.window, t.values, t.tail_bound, t.method)
    }
}

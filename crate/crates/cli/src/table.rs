//! CSV emission: ',' separator, '.' decimal point, LF line endings and
//! 17 significant digits per value.

use std::fmt::Write as _;

use hopspin_core::dynamics::ObservableRecord;
use hopspin_core::BasisLayout;

/// How far a probability may stray outside `[0, 1]` before it is an error.
pub const PROBABILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    T,
    /// Site population by conventional site label.
    Population(usize),
    PUp,
    FPlus,
    FMinus,
    LogNeg,
    F2,
    Sz,
    S12Sq,
    Norm,
}

impl Column {
    /// Every column for an `n_sites` lattice, in output order.
    pub fn all(n_sites: usize) -> Vec<Column> {
        let mut cols = vec![Column::T, Column::Population(1), Column::Population(2)];
        if n_sites == 3 {
            cols.push(Column::Population(0));
        }
        cols.extend([
            Column::PUp,
            Column::FPlus,
            Column::FMinus,
            Column::LogNeg,
            Column::F2,
            Column::Sz,
            Column::S12Sq,
            Column::Norm,
        ]);
        cols
    }

    pub fn parse(name: &str, n_sites: usize) -> Option<Column> {
        Column::all(n_sites).into_iter().find(|c| c.name() == name)
    }

    pub fn name(&self) -> String {
        match self {
            Column::T => "t".into(),
            Column::Population(label) => format!("P{label}"),
            Column::PUp => "P_up".into(),
            Column::FPlus => "F_plus".into(),
            Column::FMinus => "F_minus".into(),
            Column::LogNeg => "logneg".into(),
            Column::F2 => "F2".into(),
            Column::Sz => "Sz".into(),
            Column::S12Sq => "S12sq".into(),
            Column::Norm => "norm".into(),
        }
    }

    pub fn is_probability(&self) -> bool {
        matches!(
            self,
            Column::Population(_) | Column::PUp | Column::FPlus | Column::FMinus | Column::F2
        )
    }

    pub fn value(&self, record: &ObservableRecord, layout: &BasisLayout) -> f64 {
        match *self {
            Column::T => record.t,
            Column::Population(label) => {
                record.site_populations[layout
                    .site_from_label(label)
                    .expect("column matches layout")]
            }
            Column::PUp => record.p_up,
            Column::FPlus => record.f_plus,
            Column::FMinus => record.f_minus,
            Column::LogNeg => record.log_negativity,
            Column::F2 => record.f2,
            Column::Sz => record.sz_total,
            Column::S12Sq => record.s12_sq,
            Column::Norm => record.norm,
        }
    }
}

/// A probability outside `[−slack, 1 + slack]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutOfRange {
    pub column: String,
    pub t: f64,
    pub value: f64,
}

/// Fixed-width scientific notation with 17 significant digits; `-0` prints as `0`.
pub fn format_value(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}

/// Numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&v| format_value(v)).collect());
        write_csv(&self.header, rows)
    }

    /// `(min, max)` of column `c`.
    pub fn extrema(&self, c: usize) -> (f64, f64) {
        self.rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), row| {
                (lo.min(row[c]), hi.max(row[c]))
            })
    }
}

pub fn write_csv(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Tabulates records, checking and clamping every probability column.
pub fn observable_table(
    records: &[ObservableRecord],
    layout: &BasisLayout,
    columns: &[Column],
) -> Result<Table, OutOfRange> {
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        let mut row = Vec::with_capacity(columns.len());
        for c in columns {
            let mut v = c.value(r, layout);
            if c.is_probability() {
                if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&v) {
                    return Err(OutOfRange {
                        column: c.name(),
                        t: r.t,
                        value: v,
                    });
                }
                v = v.clamp(0.0, 1.0);
            }
            row.push(v);
        }
        rows.push(row);
    }
    Ok(Table {
        header: columns.iter().map(Column::name).collect(),
        rows,
    })
}

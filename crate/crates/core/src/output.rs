//! CSV tables and SVG heatmaps written by the report commands.
//!
//! Both writers are byte-deterministic: row order is whatever the caller
//! built, numbers are formatted with fixed precision, and nothing depends on
//! time or locale.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::codes::LangCode;
use crate::error::{Error, Result};
use crate::stats::fmt_fixed;
use crate::usage::GeoMatrix;

/// A header plus rows of equal width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<I, S>(header: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, S>(&mut self, row: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        if row.len() != self.header.len() {
            return Err(Error::RaggedRow {
                expected: self.header.len(),
                got: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Sorts rows by the given column indices, compared as strings.
    pub fn sort_by_columns(&mut self, columns: &[usize]) {
        self.rows.sort_by(|a, b| {
            columns
                .iter()
                .map(|&c| a[c].cmp(&b[c]))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv of UTF-8 strings")
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::file(path, e))?;
    Ok(BufWriter::new(file))
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    table.write_csv(&mut out)?;
    out.flush().map_err(|e| Error::file(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatmapMode {
    /// Raw counts, shaded relative to the largest cell.
    Absolute,
    /// Row-normalized shares.
    Relative,
}

impl HeatmapMode {
    pub fn label(self) -> &'static str {
        match self {
            HeatmapMode::Absolute => "abs",
            HeatmapMode::Relative => "rel",
        }
    }
}

const CELL: usize = 32;
const MARGIN: usize = 40;
const MAX_ANNOTATED_COLUMNS: usize = 20;

/// Rows and columns in descending total order, ties by code.
fn ordered_axes(m: &GeoMatrix) -> (Vec<LangCode>, Vec<LangCode>) {
    let mut rows: Vec<LangCode> = m.rows().collect();
    rows.sort_by(|a, b| m.row_total(*b).cmp(&m.row_total(*a)).then(a.cmp(b)));
    let mut cols: Vec<LangCode> = m.columns().collect();
    cols.sort_by(|a, b| m.column_total(*b).cmp(&m.column_total(*a)).then(a.cmp(b)));
    (rows, cols)
}

/// Renders the matrix as an SVG grid: one `rect` per cell, row labels on the
/// left, column labels on top and values inside cells when the matrix has at
/// most 20 columns.
pub fn heatmap_svg(m: &GeoMatrix, mode: HeatmapMode) -> Result<String> {
    if m.is_empty() {
        return Err(Error::EmptyInput("heatmap matrix"));
    }
    let (rows, cols) = ordered_axes(m);
    let max_cell = rows
        .iter()
        .flat_map(|r| cols.iter().map(move |c| (r, c)))
        .map(|(r, c)| m.get(*r, *c))
        .max()
        .unwrap_or(0)
        .max(1);
    let width = MARGIN + cols.len() * CELL;
    let height = MARGIN + rows.len() * CELL;
    let annotate = cols.len() <= MAX_ANNOTATED_COLUMNS;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"#
    );
    for (j, c) in cols.iter().enumerate() {
        let x = MARGIN + j * CELL + CELL / 2;
        let _ = writeln!(
            s,
            r#"<text class="col-label" x="{x}" y="{}" text-anchor="middle">{c}</text>"#,
            MARGIN - 8
        );
    }
    for (i, r) in rows.iter().enumerate() {
        let y = MARGIN + i * CELL;
        let _ = writeln!(
            s,
            r#"<text class="row-label" x="{}" y="{}" text-anchor="end">{r}</text>"#,
            MARGIN - 6,
            y + CELL / 2 + 4
        );
        let row_total = m.row_total(*r).max(1);
        for (j, c) in cols.iter().enumerate() {
            let x = MARGIN + j * CELL;
            let count = m.get(*r, *c);
            let intensity = match mode {
                HeatmapMode::Absolute => count as f64 / max_cell as f64,
                HeatmapMode::Relative => count as f64 / row_total as f64,
            };
            let level = (255.0 * (1.0 - intensity)).round() as u8;
            let _ = writeln!(
                s,
                r##"<rect class="cell" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="#{level:02x}{level:02x}{level:02x}"/>"##
            );
            if annotate {
                let text = match mode {
                    HeatmapMode::Absolute => count.to_string(),
                    HeatmapMode::Relative => fmt_fixed(intensity, 2),
                };
                let ink = if intensity > 0.5 { "#ffffff" } else { "#000000" };
                let _ = writeln!(
                    s,
                    r#"<text class="value" x="{}" y="{}" text-anchor="middle" fill="{ink}">{text}</text>"#,
                    x + CELL / 2,
                    y + CELL / 2 + 4
                );
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_heatmap_svg(m: &GeoMatrix, path: &Path, mode: HeatmapMode) -> Result<()> {
    let svg = heatmap_svg(m, mode)?;
    let mut out = create(path)?;
    out.write_all(svg.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::file(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> LangCode {
        LangCode::new(s).unwrap()
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(["a", "b"]);
        assert_eq!(t.to_csv_string(), "a,b\n");
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let mut t = Table::new(["a", "b"]);
        assert!(t.push(["1"]).is_err());
        t.push(["1", "x,y"]).unwrap();
        assert_eq!(t.to_csv_string(), "a,b\n1,\"x,y\"\n");
    }

    #[test]
    fn single_cell_is_full_intensity() {
        let mut m = GeoMatrix::new();
        m.add(code("ja"), code("ja"), 1).unwrap();
        let svg = heatmap_svg(&m, HeatmapMode::Relative).unwrap();
        assert_eq!(svg.matches("<rect").count(), 1);
        assert!(svg.contains(r##"fill="#000000"/>"##));
        assert_eq!(svg, heatmap_svg(&m, HeatmapMode::Relative).unwrap());
    }

    #[test]
    fn no_annotations_past_twenty_columns() {
        let mut m = GeoMatrix::new();
        for (i, c) in crate::languages::SEED_CODES.iter().take(21).enumerate() {
            m.add(code("ru"), code(c), i as u64 + 1).unwrap();
        }
        let svg = heatmap_svg(&m, HeatmapMode::Absolute).unwrap();
        assert_eq!(svg.matches("<rect").count(), 21);
        assert_eq!(svg.matches(r#"class="value""#).count(), 0);
    }
}

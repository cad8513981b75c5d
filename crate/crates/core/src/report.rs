//! Report documents and their text and JSON renderings.
//!
//! Both renderings come from the same [`ReportDocument`]. Numeric cells
//! carry a kind that fixes their text precision; JSON always carries the
//! full-precision value.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// A typed cell. Floating kinds differ only in rendered precision.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    /// Billions of USD, 2 decimals.
    Money(f64),
    /// Rates, fractions and percentage indicators, 4 decimals.
    Rate(f64),
    /// Regression coefficients, 5 decimals.
    Coef(f64),
    /// p-values, 5 decimals.
    Prob(f64),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn default_precision(&self) -> Option<usize> {
        match self {
            Cell::Money(_) => Some(2),
            Cell::Rate(_) => Some(4),
            Cell::Coef(_) | Cell::Prob(_) => Some(5),
            _ => None,
        }
    }

    fn is_numeric(&self) -> bool {
        !matches!(self, Cell::Text(_) | Cell::Empty)
    }

    pub fn render(&self, precision: Option<usize>) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Empty => String::new(),
            Cell::Money(v) | Cell::Rate(v) | Cell::Coef(v) | Cell::Prob(v) => {
                let digits = precision.or(self.default_precision()).unwrap_or(2);
                format_fixed(*v, digits)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => json!(i),
            Cell::Empty => Value::Null,
            Cell::Money(v) | Cell::Rate(v) | Cell::Coef(v) | Cell::Prob(v) => json!(v),
        }
    }
}

/// Fixed-point rendering with `.` as decimal point; never prints `-0.00`.
pub fn format_fixed(value: f64, digits: usize) -> String {
    let s = format!("{value:.digits$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SectionBody {
    Table {
        columns: Vec<String>,
        rows: Vec<Vec<Cell>>,
    },
    Entries(Vec<(String, Cell)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub title: String,
    pub body: SectionBody,
}

impl Section {
    pub fn table(title: impl Into<String>, columns: Vec<String>, rows: Vec<Vec<Cell>>) -> Self {
        Self {
            title: title.into(),
            body: SectionBody::Table { columns, rows },
        }
    }

    pub fn entries(title: impl Into<String>, entries: Vec<(String, Cell)>) -> Self {
        Self {
            title: title.into(),
            body: SectionBody::Entries(entries),
        }
    }

    /// Looks up an entry value by key.
    pub fn entry(&self, key: &str) -> Option<&Cell> {
        match &self.body {
            SectionBody::Entries(e) => e.iter().find(|(k, _)| k == key).map(|(_, c)| c),
            SectionBody::Table { .. } => None,
        }
    }

    /// Looks up the row whose first cell is the text `label`.
    pub fn row(&self, label: &str) -> Option<&[Cell]> {
        match &self.body {
            SectionBody::Table { rows, .. } => rows
                .iter()
                .find(|r| matches!(r.first(), Some(Cell::Text(t)) if t == label))
                .map(|r| &r[..]),
            SectionBody::Entries(_) => None,
        }
    }
}

/// Content hash over an ordered list of input byte strings.
pub fn inputs_digest<'a>(inputs: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut hasher = Sha256::new();
    for bytes in inputs {
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(bytes);
    }
    format!("sha256:{}", hex::encode(hasher.finalize()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub command: String,
    pub inputs_digest: String,
    pub sections: Vec<Section>,
    pub warnings: Vec<String>,
}

impl ReportDocument {
    pub fn new(command: impl Into<String>, inputs_digest: String) -> Self {
        Self {
            command: command.into(),
            inputs_digest,
            sections: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn section(&self, title: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.title == title)
    }

    pub fn to_json(&self) -> Value {
        let sections: Vec<Value> = self
            .sections
            .iter()
            .map(|s| match &s.body {
                SectionBody::Table { columns, rows } => json!({
                    "title": s.title,
                    "columns": columns,
                    "rows": rows
                        .iter()
                        .map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                }),
                SectionBody::Entries(entries) => {
                    let mut map = Map::new();
                    for (k, c) in entries {
                        map.insert(k.clone(), c.to_json());
                    }
                    json!({ "title": s.title, "entries": map })
                }
            })
            .collect();
        json!({
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "sections": sections,
            "warnings": self.warnings,
        })
    }

    pub fn render_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        out.push('\n');
        out
    }

    /// Aligned plain-text rendering. `precision` overrides every numeric cell.
    pub fn render_text(&self, precision: Option<usize>) -> String {
        let mut out = String::new();
        out.push_str(&format!("evagap {}\n", self.command));
        out.push_str(&format!("inputs {}\n", self.inputs_digest));
        for section in &self.sections {
            out.push('\n');
            out.push_str(&format!("== {} ==\n", section.title));
            match &section.body {
                SectionBody::Table { columns, rows } => {
                    render_table(&mut out, columns, rows, precision)
                }
                SectionBody::Entries(entries) => {
                    let width = entries
                        .iter()
                        .map(|(k, _)| k.chars().count())
                        .max()
                        .unwrap_or(0);
                    for (k, c) in entries {
                        out.push_str(&format!("{k:<width$} = {}\n", c.render(precision)));
                    }
                }
            }
        }
        if !self.warnings.is_empty() {
            out.push_str("\nwarnings:\n");
            for w in &self.warnings {
                out.push_str(&format!("  - {w}\n"));
            }
        }
        out
    }
}

fn render_table(
    out: &mut String,
    columns: &[String],
    rows: &[Vec<Cell>],
    precision: Option<usize>,
) {
    let rendered: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(|c| c.render(precision)).collect())
        .collect();
    let ncols = columns.len();
    let mut widths: Vec<usize> = columns.iter().map(|c| c.chars().count()).collect();
    for row in &rendered {
        for (i, cell) in row.iter().enumerate().take(ncols) {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    // A column is right-aligned when it holds any number.
    let numeric: Vec<bool> = (0..ncols)
        .map(|i| rows.iter().any(|r| r.get(i).is_some_and(Cell::is_numeric)))
        .collect();
    let line = |cells: &[String]| -> String {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let w = widths[i];
                if numeric[i] {
                    format!("{c:>w$}")
                } else {
                    format!("{c:<w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    out.push_str(&line(columns));
    out.push('\n');
    let total: usize = widths.iter().sum::<usize>() + 2 * ncols.saturating_sub(1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in &rendered {
        out.push_str(&line(row));
        out.push('\n');
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReportDocument {
        let mut doc = ReportDocument::new("eva", inputs_digest([b"abc".as_slice()]));
        doc.sections.push(Section::table(
            "grid",
            vec!["item".into(), "2014".into()],
            vec![
                vec![Cell::text("GDP"), Cell::Money(17.63)],
                vec![Cell::text("rate"), Cell::Rate(0.08248)],
            ],
        ));
        doc.sections.push(Section::entries(
            "stats",
            vec![
                ("p".into(), Cell::Prob(0.036832)),
                ("n".into(), Cell::Int(5)),
            ],
        ));
        doc.warnings.push("check me".into());
        doc
    }

    #[test]
    fn declared_precisions() {
        assert_eq!(Cell::Money(4.31049).render(None), "4.31");
        assert_eq!(Cell::Rate(0.082475).render(None), "0.0825");
        assert_eq!(Cell::Prob(0.0368324).render(None), "0.03683");
        assert_eq!(Cell::Coef(1.0).render(None), "1.00000");
        assert_eq!(Cell::Money(4.31049).render(Some(3)), "4.310");
        assert_eq!(Cell::Money(-0.001).render(None), "0.00");
        assert_eq!(Cell::Money(-15.29).render(None), "-15.29");
    }

    #[test]
    fn text_layout() {
        let text = sample().render_text(None);
        assert!(
            text.contains("== grid ==\nitem    2014\n------------\n"),
            "{text}"
        );
        assert!(text.contains("GDP    17.63\n"), "{text}");
        assert!(text.contains("rate  0.0825\n"), "{text}");
        assert!(text.contains("p = 0.03683\n"), "{text}");
        assert!(text.contains("warnings:\n  - check me\n"));
    }

    #[test]
    fn json_schema() {
        let v = sample().to_json();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["command", "inputs_digest", "sections", "warnings"]);
        assert_eq!(v["sections"][0]["columns"], json!(["item", "2014"]));
        assert_eq!(v["sections"][0]["rows"][1][1], json!(0.08248));
        assert_eq!(v["sections"][1]["entries"]["n"], json!(5));
        assert_eq!(v["warnings"], json!(["check me"]));
    }

    #[test]
    fn digest_sensitive_to_bytes_and_boundaries() {
        let a = inputs_digest([b"ab".as_slice(), b"c".as_slice()]);
        let b = inputs_digest([b"a".as_slice(), b"bc".as_slice()]);
        let c = inputs_digest([b"ab".as_slice(), b"d".as_slice()]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, inputs_digest([b"ab".as_slice(), b"c".as_slice()]));
        assert!(a.starts_with("sha256:"));
    }
}

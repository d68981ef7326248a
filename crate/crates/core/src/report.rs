//! CSV tables with a leading `#` comment block and fixed numeric formatting.

use std::fmt::Write as _;

/// Formats `x` with six significant digits in plain decimal notation.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).clamp(0, 17) as usize;
    let s = format!("{x:.decimals$}");
    // -0.00000 and friends
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn row<I, S>(&mut self, cells: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let row: Vec<String> = cells.into_iter().map(Into::into).collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
        self
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    /// Renders comments, header and rows with LF line endings.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&body).expect("utf-8 cells"));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_num(2_085.0), "2085.00");
        assert_eq!(fmt_num(0.081), "0.0810000");
        assert_eq!(fmt_num(12.469_53), "12.4695");
        assert_eq!(fmt_num(17_039.43), "17039.4");
        assert_eq!(fmt_num(40_500.0), "40500.0");
        assert_eq!(fmt_num(1e8), "100000000");
        assert_eq!(fmt_num(-3.5), "-3.50000");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
    }

    #[test]
    fn render_layout() {
        let mut t = Table::new(&["quantity", "value", "unit"]);
        t.comment("marsnet test").row(["a,b", "1", "kg"]);
        assert_eq!(t.render(), "# marsnet test\nquantity,value,unit\n\"a,b\",1,kg\n");
    }
}

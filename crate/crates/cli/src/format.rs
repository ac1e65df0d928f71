//! Plain CSV with numbers printed to nine significant digits.

use crate::error::CliError;

/// Nine significant digits, `%g` style: fixed notation for exponents in
/// `-5..9`, scientific otherwise, trailing zeros dropped. Parsing the result
/// and formatting again gives the same string.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };

    if (-5..9).contains(&exp) {
        let body = if exp >= 0 {
            let split = exp as usize + 1;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        format!("{sign}{}", trim_fraction(&body))
    } else {
        let body = format!("{}.{}", &digits[..1], &digits[1..]);
        format!("{sign}{}e{exp}", trim_fraction(&body))
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header plus numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_sig(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut lines = text.lines();
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| CliError::Parse {
                line: 1,
                message: "empty table".into(),
            })?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (idx, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|cell| cell.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| CliError::Parse {
                    line: idx + 2,
                    message: e.to_string(),
                })?;
            if row.len() != header.len() {
                return Err(CliError::Parse {
                    line: idx + 2,
                    message: format!("expected {} columns, got {}", header.len(), row.len()),
                });
            }
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

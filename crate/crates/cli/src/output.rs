//! Number formatting and the CSV/JSON writers.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::Value;

/// Shortest decimal that parses back to the same `f64`; `inf`, `-inf` and `nan` otherwise.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

/// JSON number, or the [`fmt_num`] string for non-finite values.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::String(fmt_num(x))
    }
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

#[derive(Debug, Default)]
pub struct Table {
    comments: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<I, S>(header: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn comment(&mut self, key: &str, value: impl Into<String>) {
        self.comments.push((key.to_string(), value.into()));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.comments {
            s.push_str(&format!("# {k}={v}\n"));
        }
        s.push_str(&self.header.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain JSON values serialize");
    s.push('\n');
    s
}

pub fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => File::create(p)?.write_all(text.as_bytes()),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

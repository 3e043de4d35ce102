//! Deterministic reports: `key=value` lines or JSON with the same keys.

use serde_json::{Map, Number, Value};

/// Significant digits of every printed float.
pub const DIGITS: usize = 12;

/// Rounds to [`DIGITS`] significant digits and prints the shortest decimal
/// form: plain notation for moderate exponents, scientific otherwise.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant),
    };
    let digits: String = mant.chars().filter(|ch| ch.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let body = if (-5..DIGITS as i32).contains(&exp) {
        if exp < 0 {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                format!("{digits}{}", "0".repeat(int_len - digits.len()))
            } else {
                format!("{}.{}", &digits[..int_len], &digits[int_len..])
            }
        }
    } else {
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{head}e{exp}")
        } else {
            format!("{head}.{tail}e{exp}")
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Floats(Vec<f64>),
}

impl Field {
    fn text(&self) -> String {
        match self {
            Field::Int(i) => i.to_string(),
            Field::Float(x) => fmt_float(*x),
            Field::Bool(b) => b.to_string(),
            Field::Text(s) => s.clone(),
            Field::Floats(xs) => xs.iter().map(|x| fmt_float(*x)).collect::<Vec<_>>().join(","),
        }
    }

    fn json(&self) -> Value {
        let num =
            |x: f64| -> Value { fmt_float(x).parse::<f64>().ok().and_then(Number::from_f64).map(Value::Number).unwrap_or(Value::Null) };
        match self {
            Field::Int(i) => Value::from(*i),
            Field::Float(x) => num(*x),
            Field::Bool(b) => Value::Bool(*b),
            Field::Text(s) => Value::String(s.clone()),
            Field::Floats(xs) => Value::Array(xs.iter().map(|x| num(*x)).collect()),
        }
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Float(x)
    }
}
impl From<usize> for Field {
    fn from(i: usize) -> Self {
        Field::Int(i as i64)
    }
}
impl From<bool> for Field {
    fn from(b: bool) -> Self {
        Field::Bool(b)
    }
}
impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.into())
    }
}
impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Text(s)
    }
}
impl From<Vec<f64>> for Field {
    fn from(xs: Vec<f64>) -> Self {
        Field::Floats(xs)
    }
}

/// Ordered key/value pairs printed on one line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(Vec<(String, Field)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Field>) -> Self {
        self.push(key, value);
        self
    }

    pub fn push(&mut self, key: &str, value: impl Into<Field>) {
        self.0.push((key.into(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn line(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={}", v.text())).collect::<Vec<_>>().join(" ")
    }

    fn json(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in &self.0 {
            m.insert(k.clone(), v.json());
        }
        Value::Object(m)
    }
}

/// One or more records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report(pub Vec<Record>);

impl Report {
    pub fn single(r: Record) -> Self {
        Report(vec![r])
    }

    /// Text form: one line per record. JSON form: an object for a single
    /// record, an array otherwise.
    pub fn render(&self, json: bool) -> String {
        if json {
            let v = match self.0.as_slice() {
                [one] => one.json(),
                many => Value::Array(many.iter().map(Record::json).collect()),
            };
            format!("{v}\n")
        } else {
            self.0.iter().map(|r| r.line() + "\n").collect()
        }
    }
}

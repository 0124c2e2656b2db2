use num_bigint::BigInt;
use serde_json::{Map, Value};
use verlinde_core::{ComplexBall, Dyadic};

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Clone)]
pub enum ParamVal {
    Int(i64),
    Text(String),
}

impl std::fmt::Display for ParamVal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamVal::Int(v) => write!(f, "{v}"),
            ParamVal::Text(s) => write!(f, "{s}"),
        }
    }
}

/// One complex enclosure, already rendered: exact decimal midpoints (a dyadic
/// always has a finite decimal expansion) plus an upper bound on the modulus
/// of the error.
#[derive(Clone)]
pub struct ComplexCell {
    pub re: String,
    pub im: String,
    pub rad: String,
    pub approx: String,
}

impl ComplexCell {
    pub fn from_ball(c: &ComplexBall) -> Self {
        let rad = c.re().rad().add(c.im().rad()).to_dyadic();
        ComplexCell {
            re: c.re().mid().to_decimal(),
            im: c.im().mid().to_decimal(),
            rad: decimal_upper(&rad, 3),
            approx: c.approx_string(),
        }
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("re".into(), Value::String(self.re.clone()));
        m.insert("im".into(), Value::String(self.im.clone()));
        m.insert("rad".into(), Value::String(self.rad.clone()));
        Value::Object(m)
    }

    fn to_cell(&self) -> String {
        format!("{};{};{}", self.re, self.im, self.rad)
    }
}

#[derive(Clone)]
pub enum ValueCell {
    Int(BigInt),
    Complex(ComplexCell),
    Matrix(Box<[[ComplexCell; 2]; 2]>),
}

#[derive(Clone)]
pub struct ReportCell {
    pub holds: bool,
    pub lhs: Option<BigInt>,
    pub rhs: Option<BigInt>,
    pub label: String,
}

/// The one output shape every subcommand emits, so table sweeps can aggregate
/// records from different commands without special cases.
#[derive(Clone)]
pub struct Record {
    pub command: String,
    pub params: Vec<(String, ParamVal)>,
    pub value: ValueCell,
    pub certified: bool,
    pub precision_bits: u32,
    pub error_radius: String,
    pub elapsed_ms: u64,
    pub report: Option<ReportCell>,
}

fn big_number(b: &BigInt) -> Value {
    // Round-trips through the arbitrary-precision number type, so integers of
    // any size survive serialization exactly.
    serde_json::from_str(&b.to_string()).expect("integer literal is valid JSON")
}

impl Record {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        let mut params = Map::new();
        for (k, v) in &self.params {
            let jv = match v {
                ParamVal::Int(n) => Value::from(*n),
                ParamVal::Text(s) => Value::String(s.clone()),
            };
            params.insert(k.clone(), jv);
        }
        m.insert("params".into(), Value::Object(params));
        let value = match &self.value {
            ValueCell::Int(b) => big_number(b),
            ValueCell::Complex(c) => c.to_json(),
            ValueCell::Matrix(rows) => Value::Array(
                rows.iter()
                    .map(|row| Value::Array(row.iter().map(|c| c.to_json()).collect()))
                    .collect(),
            ),
        };
        m.insert("value".into(), value);
        m.insert("certified".into(), Value::Bool(self.certified));
        m.insert("precision_bits".into(), Value::from(self.precision_bits));
        m.insert(
            "error_radius".into(),
            Value::String(self.error_radius.clone()),
        );
        m.insert("elapsed_ms".into(), Value::from(self.elapsed_ms));
        let report = match &self.report {
            None => Value::Null,
            Some(r) => {
                let mut rm = Map::new();
                rm.insert("holds".into(), Value::Bool(r.holds));
                rm.insert(
                    "lhs".into(),
                    r.lhs.as_ref().map(big_number).unwrap_or(Value::Null),
                );
                rm.insert(
                    "rhs".into(),
                    r.rhs.as_ref().map(big_number).unwrap_or(Value::Null),
                );
                rm.insert("label".into(), Value::String(r.label.clone()));
                Value::Object(rm)
            }
        };
        m.insert("report".into(), report);
        Value::Object(m)
    }

    pub fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["command".to_string()];
        h.extend(self.params.iter().map(|(k, _)| k.clone()));
        for fixed in [
            "value",
            "certified",
            "precision_bits",
            "error_radius",
            "elapsed_ms",
        ] {
            h.push(fixed.to_string());
        }
        h
    }

    pub fn csv_row(&self) -> Vec<String> {
        let mut row = vec![self.command.clone()];
        row.extend(self.params.iter().map(|(_, v)| v.to_string()));
        let value = match &self.value {
            ValueCell::Int(b) => b.to_string(),
            ValueCell::Complex(c) => c.to_cell(),
            ValueCell::Matrix(_) => self.to_json()["value"].to_string(),
        };
        row.push(value);
        row.push(self.certified.to_string());
        row.push(self.precision_bits.to_string());
        row.push(self.error_radius.clone());
        row.push(self.elapsed_ms.to_string());
        row
    }

    pub fn plain(&self) -> String {
        let mut s = self.command.clone();
        for (k, v) in &self.params {
            s.push_str(&format!(" {k}={v}"));
        }
        let value = match &self.value {
            ValueCell::Int(b) => b.to_string(),
            ValueCell::Complex(c) => c.approx.clone(),
            ValueCell::Matrix(rows) => format!(
                "[{}, {} | {}, {}]",
                rows[0][0].approx, rows[0][1].approx, rows[1][0].approx, rows[1][1].approx
            ),
        };
        s.push_str(&format!(
            " = {value} [certified={} bits={} rad<={} ms={}]",
            self.certified, self.precision_bits, self.error_radius, self.elapsed_ms
        ));
        if let Some(r) = &self.report {
            let rel = if r.holds { "=" } else { "!=" };
            match (&r.lhs, &r.rhs) {
                (Some(l), Some(rr)) => {
                    s.push_str(&format!(" | {}: {} {} {}", r.label, l, rel, rr))
                }
                _ => s.push_str(&format!(" | {}", r.label)),
            }
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json().to_string(),
            Format::Plain => self.plain(),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(self.csv_header()).expect("in-memory csv");
                w.write_record(self.csv_row()).expect("in-memory csv");
                let bytes = w.into_inner().expect("in-memory csv");
                String::from_utf8(bytes)
                    .expect("csv output is utf-8")
                    .trim_end()
                    .to_string()
            }
        }
    }
}

/// Decimal upper bound for a nonnegative dyadic with `sig` significant
/// digits: the returned literal is always ≥ the exact value, so a radius
/// never shrinks in print.
pub fn decimal_upper(d: &Dyadic, sig: u32) -> String {
    if d.is_zero() {
        return "0".into();
    }
    assert!(!d.is_negative(), "radii are nonnegative");
    let log2 = d.mantissa().bits() as i64 - 1 + d.exponent();
    // floor(log2 * log10(2)); the 30103/100000 rational slightly underestimates
    // log10(2), which at worst costs one digit-count correction below.
    let t = (log2 * 30103).div_euclid(100_000);
    let mut p = t - sig as i64 + 1;
    loop {
        let q = ceil_div_pow10(d, p);
        let digits = q.to_string();
        if digits.len() as i64 > sig as i64 + 1 {
            p += 1;
            continue;
        }
        let exp10 = p + digits.len() as i64 - 1;
        let (head, tail) = digits.split_at(1);
        let tail = tail.trim_end_matches('0');
        return if tail.is_empty() {
            format!("{head}e{exp10}")
        } else {
            format!("{head}.{tail}e{exp10}")
        };
    }
}

/// ceil(d / 10^p) for d > 0.
fn ceil_div_pow10(d: &Dyadic, p: i64) -> BigInt {
    let m = d.mantissa().clone();
    let e = d.exponent();
    if p <= 0 {
        let n = m * BigInt::from(10u8).pow((-p) as u32);
        shift_ceil(n, e)
    } else {
        let den = BigInt::from(10u8).pow(p as u32);
        if e >= 0 {
            let n = m << (e as usize);
            (&n + &den - 1u8) / den
        } else {
            let den = den << ((-e) as usize);
            (&m + &den - 1u8) / den
        }
    }
}

fn shift_ceil(n: BigInt, e: i64) -> BigInt {
    if e >= 0 {
        n << (e as usize)
    } else {
        let s = (-e) as usize;
        let one = BigInt::from(1u8);
        (&n + ((&one << s) - &one)) >> s
    }
}

use std::collections::HashSet;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::ExitCode;

use verlinde_core::{Error, EvalOptions, Result};

use crate::record::Format;
use crate::run::Formula;

/// A parsed `command:key=lo..hi,...` range spec.  Bounds are inclusive; a
/// bare `key=v` sweeps the single value `v`.  Axes iterate in listed order
/// with the last key varying fastest.
pub struct SweepSpec {
    pub formula: Formula,
    axes: Vec<(String, i64, i64)>,
}

pub fn parse_sweep(s: &str) -> std::result::Result<SweepSpec, String> {
    let (cmd, rest) = s
        .split_once(':')
        .ok_or("sweep spec must look like 'command:key=lo..hi,key=lo..hi'")?;
    let formula = Formula::from_name(cmd.trim())
        .ok_or_else(|| format!("unknown sweep command '{}'", cmd.trim()))?;
    let mut axes = Vec::new();
    for part in rest.split(',') {
        let (key, range) = part
            .split_once('=')
            .ok_or_else(|| format!("axis '{part}' is missing '='"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| format!("bad bound '{}' in axis '{part}'", t.trim()))
        };
        let (lo, hi) = match range.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(range)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {lo}..{hi} in axis '{part}'"));
        }
        axes.push((key.trim().to_string(), lo, hi));
    }
    let names = formula.param_names();
    let given: Vec<&str> = axes.iter().map(|(k, _, _)| k.as_str()).collect();
    for n in names {
        if given.iter().filter(|g| *g == n).count() != 1 {
            return Err(format!(
                "sweep for '{}' needs each of {:?} exactly once, got {:?}",
                formula.name(),
                names,
                given
            ));
        }
    }
    if given.len() != names.len() {
        return Err(format!(
            "unexpected axes {:?}; '{}' takes {:?}",
            given,
            formula.name(),
            names
        ));
    }
    Ok(SweepSpec { formula, axes })
}

impl SweepSpec {
    /// Tuples in sweep order, each already rearranged into the formula's
    /// canonical parameter order.
    fn tuples(&self) -> Odometer<'_> {
        Odometer {
            spec: self,
            cur: self.axes.iter().map(|&(_, lo, _)| lo).collect(),
            done: false,
        }
    }

    fn canonicalize(&self, listed: &[i64]) -> Vec<i64> {
        self.formula
            .param_names()
            .iter()
            .map(|n| {
                let i = self.axes.iter().position(|(k, _, _)| k == n).unwrap();
                listed[i]
            })
            .collect()
    }
}

struct Odometer<'a> {
    spec: &'a SweepSpec,
    cur: Vec<i64>,
    done: bool,
}

impl Iterator for Odometer<'_> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let out = self.spec.canonicalize(&self.cur);
        for i in (0..self.cur.len()).rev() {
            let (_, lo, hi) = self.spec.axes[i];
            if self.cur[i] < hi {
                self.cur[i] += 1;
                return Some(out);
            }
            self.cur[i] = lo;
        }
        self.done = true;
        Some(out)
    }
}

/// Runs a sweep, appending one record per tuple.  Tuples already present in
/// the output file are skipped, so re-running after an interruption resumes
/// where it stopped and a complete file is left untouched.  Tuples run one
/// at a time; each evaluation parallelizes internally.
pub fn run_table(
    spec: &str,
    out: Option<&Path>,
    opts: &EvalOptions,
    format: Format,
) -> Result<ExitCode> {
    let plan = parse_sweep(spec).map_err(Error::InvalidParams)?;
    let existing = match out {
        Some(p) if p.exists() => load_existing(p, format, &plan)?,
        _ => HashSet::new(),
    };

    let mut file_sink = match out {
        Some(p) => Some(
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .map_err(|e| Error::InvalidParams(format!("cannot open {}: {e}", p.display())))?,
        ),
        None => None,
    };
    let mut wrote_header = !existing.is_empty()
        || out.is_some_and(|p| p.metadata().map(|m| m.len() > 0).unwrap_or(false));

    let mut any_violation = false;
    for vals in plan.tuples() {
        if existing.contains(&vals) {
            continue;
        }
        let record = match plan.formula.run(&vals, opts) {
            Ok(r) => r,
            Err(Error::InvalidParams(msg)) => {
                let named: Vec<String> = plan
                    .formula
                    .param_names()
                    .iter()
                    .zip(&vals)
                    .map(|(n, v)| format!("{n}={v}"))
                    .collect();
                eprintln!("skipping {} ({}): {msg}", plan.formula.name(), named.join(" "));
                continue;
            }
            Err(e) => return Err(e),
        };
        if record.report.as_ref().is_some_and(|r| !r.holds) {
            any_violation = true;
        }
        let mut lines = String::new();
        if format == Format::Csv && !wrote_header {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(record.csv_header()).expect("in-memory csv");
            lines.push_str(&String::from_utf8(w.into_inner().expect("in-memory csv")).unwrap());
            wrote_header = true;
        }
        match format {
            Format::Json => lines.push_str(&record.to_json().to_string()),
            Format::Plain => lines.push_str(&record.plain()),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(record.csv_row()).expect("in-memory csv");
                let row = String::from_utf8(w.into_inner().expect("in-memory csv")).unwrap();
                lines.push_str(row.trim_end());
            }
        }
        lines.push('\n');
        match &mut file_sink {
            Some(f) => f
                .write_all(lines.as_bytes())
                .map_err(|e| Error::InvalidParams(format!("write failed: {e}")))?,
            None => print!("{lines}"),
        }
    }
    Ok(if any_violation {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

/// Reads the canonical parameter tuples already recorded for this sweep's
/// command, in whichever format the file holds.
fn load_existing(path: &Path, format: Format, plan: &SweepSpec) -> Result<HashSet<Vec<i64>>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", path.display())))?;
    let names = plan.formula.param_names();
    let mut seen = HashSet::new();
    match format {
        Format::Json => {
            for line in BufReader::new(file).lines() {
                let line = line.map_err(io_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                let v: serde_json::Value = serde_json::from_str(&line).map_err(|e| {
                    Error::InvalidParams(format!("{} is not JSON-lines: {e}", path.display()))
                })?;
                if v["command"].as_str() != Some(plan.formula.name()) {
                    continue;
                }
                if let Some(tuple) = names
                    .iter()
                    .map(|n| v["params"][n].as_i64())
                    .collect::<Option<Vec<i64>>>()
                {
                    seen.insert(tuple);
                }
            }
        }
        Format::Csv => {
            let mut rdr = csv::Reader::from_reader(file);
            let headers = rdr
                .headers()
                .map_err(|e| Error::InvalidParams(format!("bad CSV header: {e}")))?
                .clone();
            let col = |name: &str| headers.iter().position(|h| h == name);
            let cmd_col = col("command")
                .ok_or_else(|| Error::InvalidParams("CSV file lacks a 'command' column".into()))?;
            let param_cols: Vec<Option<usize>> = names.iter().map(|n| col(n)).collect();
            for row in rdr.records() {
                let row = row.map_err(|e| Error::InvalidParams(format!("bad CSV row: {e}")))?;
                if row.get(cmd_col) != Some(plan.formula.name()) {
                    continue;
                }
                let tuple: Option<Vec<i64>> = param_cols
                    .iter()
                    .map(|c| c.and_then(|i| row.get(i)).and_then(|s| s.parse().ok()))
                    .collect();
                if let Some(t) = tuple {
                    seen.insert(t);
                }
            }
        }
        Format::Plain => {
            for line in BufReader::new(file).lines() {
                let line = line.map_err(io_err)?;
                let mut toks = line.split_whitespace();
                if toks.next() != Some(plan.formula.name()) {
                    continue;
                }
                let mut vals = vec![None; names.len()];
                for tok in toks.take_while(|t| *t != "=") {
                    if let Some((k, v)) = tok.split_once('=') {
                        if let Some(i) = names.iter().position(|n| *n == k) {
                            vals[i] = v.parse().ok();
                        }
                    }
                }
                if let Some(tuple) = vals.into_iter().collect::<Option<Vec<i64>>>() {
                    seen.insert(tuple);
                }
            }
        }
    }
    Ok(seen)
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidParams(format!("i/o error while reading existing records: {e}"))
}

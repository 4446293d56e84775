//! Check records, verification reports and the CSV point format.

use crate::enumerate::PointSet;
use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::model::{Family, Params};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::io::{Read, Write};
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Reported without an assertion; never fails a run.
    Measured,
    Skipped,
}

/// Where the expected value of a check comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// A closed-form count or degree evaluated at the parameters.
    ClosedForm,
    /// An algebraic identity checked exactly.
    Identity,
    /// Two independent computations compared.
    CrossCheck,
    /// No expected value.
    Measured,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub family: Family,
    pub p: u32,
    pub m: u32,
    pub q: u64,
    pub check_name: String,
    pub status: Status,
    pub measured: Value,
    pub expected: Value,
    pub provenance_tag: Provenance,
    pub seed: u64,
    pub elapsed_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub mode: String,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check_name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Report> {
        Ok(serde_json::from_str(s)?)
    }

    /// One row per check; `measured` and `expected` as compact JSON.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "family", "p", "m", "q", "check_name", "status", "measured", "expected", "provenance_tag", "seed",
            "elapsed_ms", "note",
        ])?;
        for c in &self.checks {
            out.write_record([
                c.family.to_string(),
                c.p.to_string(),
                c.m.to_string(),
                c.q.to_string(),
                c.check_name.clone(),
                plain(&c.status),
                c.measured.to_string(),
                c.expected.to_string(),
                plain(&c.provenance_tag),
                c.seed.to_string(),
                c.elapsed_ms.map(|e| e.to_string()).unwrap_or_default(),
                c.note.clone().unwrap_or_default(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Unit enum variants rendered as their serde names.
fn plain<T: Serialize>(v: &T) -> String {
    match json(v) {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

/// Result of one check before it is stamped with the run metadata.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub measured: Value,
    pub expected: Value,
    pub note: Option<String>,
}

impl Outcome {
    pub fn compare<T: Serialize + PartialEq>(measured: T, expected: T) -> Outcome {
        let status = if measured == expected { Status::Pass } else { Status::Fail };
        Outcome { status, measured: json(&measured), expected: json(&expected), note: None }
    }

    /// A property that must hold; `measured` documents what was seen.
    pub fn holds<T: Serialize>(ok: bool, measured: T) -> Outcome {
        let status = if ok { Status::Pass } else { Status::Fail };
        Outcome { status, measured: json(&measured), expected: Value::Bool(true), note: None }
    }

    pub fn measured<T: Serialize>(measured: T) -> Outcome {
        Outcome { status: Status::Measured, measured: json(&measured), expected: Value::Null, note: None }
    }

    pub fn skipped(reason: impl Into<String>) -> Outcome {
        Outcome { status: Status::Skipped, measured: Value::Null, expected: Value::Null, note: Some(reason.into()) }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Outcome {
        self.note = Some(note.into());
        self
    }

    /// Downgrade an assertion to a measurement (for parameters outside the
    /// range where the property is claimed).
    pub fn measured_only(mut self, reason: &str) -> Outcome {
        if matches!(self.status, Status::Pass | Status::Fail) {
            self.status = Status::Measured;
            self.note = Some(match self.note {
                Some(n) => format!("{n}; {reason}"),
                None => reason.to_string(),
            });
        }
        self
    }
}

fn json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Collects check records for one model.
pub struct Recorder {
    params: Params,
    seed: u64,
    timings: bool,
    pub checks: Vec<CheckRecord>,
}

impl Recorder {
    pub fn new(params: Params, seed: u64, timings: bool) -> Self {
        Recorder { params, seed, timings, checks: Vec::new() }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Run `f` and record its outcome. A budget refusal becomes a skip; any
    /// other error is a failure carrying the error text.
    pub fn check(&mut self, name: &str, tag: Provenance, f: impl FnOnce() -> Result<Outcome>) -> Status {
        let start = Instant::now();
        let outcome = match f() {
            Ok(o) => o,
            Err(e @ Error::Budget { .. }) => Outcome::skipped(e.to_string()),
            Err(e) => Outcome {
                status: Status::Fail,
                measured: Value::Null,
                expected: Value::Null,
                note: Some(e.to_string()),
            },
        };
        let elapsed = self.timings.then(|| start.elapsed().as_millis() as u64);
        let tag = if outcome.status == Status::Measured && outcome.expected.is_null() { Provenance::Measured } else { tag };
        let status = outcome.status;
        self.checks.push(CheckRecord {
            family: self.params.family,
            p: self.params.p,
            m: self.params.m,
            q: self.params.q,
            check_name: name.to_string(),
            status,
            measured: outcome.measured,
            expected: outcome.expected,
            provenance_tag: tag,
            seed: self.seed,
            elapsed_ms: elapsed,
            note: outcome.note,
        });
        status
    }

    pub fn skip(&mut self, name: &str, reason: &str) {
        self.check(name, Provenance::Measured, || Ok(Outcome::skipped(reason)));
    }

    pub fn into_report(self, command: &str, mode: &str) -> Report {
        Report { command: command.to_string(), mode: mode.to_string(), checks: self.checks }
    }
}

/// Points read back from a CSV dump.
#[derive(Clone, Debug)]
pub struct PointDump {
    pub basis: Vec<String>,
    pub field: Field,
    pub points: Vec<(u32, Vec<Fe>)>,
}

const FIXED_COLUMNS: [&str; 3] = ["p", "k", "degree"];

/// CSV with header `p,k,degree,<basis names>`. Coordinates are written as
/// integers: the base-p digits are the coefficients in the field's
/// polynomial basis, constant term least significant.
pub fn write_points<W: Write>(w: W, basis: &[String], set: &PointSet) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let header: Vec<&str> = FIXED_COLUMNS.iter().copied().chain(basis.iter().map(|s| s.as_str())).collect();
    out.write_record(&header)?;
    let f = &set.field;
    for pt in &set.points {
        let mut row = vec![f.p().to_string(), f.degree().to_string(), pt.degree.to_string()];
        row.extend(pt.coords.iter().map(|&x| f.dense(x).to_string()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_points<R: Read>(r: R) -> Result<PointDump> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.len() <= FIXED_COLUMNS.len() || header.iter().take(3).ne(FIXED_COLUMNS) {
        return Err(Error::Config(format!("point CSV header must start with {}", FIXED_COLUMNS.join(","))));
    }
    let basis: Vec<String> = header.iter().skip(3).map(str::to_string).collect();
    let mut field: Option<Field> = None;
    let mut points = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<u64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Config(format!("row {}: bad integer in column {}", line + 1, i + 1)))
        };
        let (p, k) = (num(0)? as u32, num(1)? as u32);
        let f = match &field {
            Some(f) if f.p() == p && f.degree() == k => f,
            Some(_) => return Err(Error::Config(format!("row {}: field differs from the first row", line + 1))),
            None => field.insert(Field::new(p, k)?),
        };
        let degree = num(2)? as u32;
        let coords = (3..3 + basis.len())
            .map(|i| {
                let v = num(i)?;
                if v >= f.order() as u64 {
                    return Err(Error::Config(format!("row {}: coordinate {v} outside GF({p}^{k})", line + 1)));
                }
                Ok(f.from_dense(v as usize))
            })
            .collect::<Result<Vec<Fe>>>()?;
        points.push((degree, coords));
    }
    let field = field.ok_or_else(|| Error::Config("point CSV has no rows".into()))?;
    Ok(PointDump { basis, field, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate;
    use crate::hermitian::HermitianModel;
    use crate::model::CurveModel;

    #[test]
    fn points_round_trip() {
        let m = HermitianModel::new(2, 1).unwrap();
        let set = enumerate::ambient_scan(&m, 3, u128::MAX).unwrap();
        let mut buf = Vec::new();
        write_points(&mut buf, &m.basis_names(), &set).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("p,k,degree,e0^e1,e0^e2,e1^e2\n"));
        let back = read_points(&buf[..]).unwrap();
        assert_eq!(back.basis, m.basis_names());
        let got: Vec<(u32, Vec<Fe>)> = set.points.iter().map(|p| (p.degree, p.coords.clone())).collect();
        assert_eq!(back.points, got);
    }

    #[test]
    fn report_round_trip() {
        let mut r = Recorder::new(Params::sz(0), 3, false);
        r.check("a", Provenance::ClosedForm, || Ok(Outcome::compare(5, 5)));
        r.check("b", Provenance::Identity, || Ok(Outcome::holds(false, "x")));
        r.check("c", Provenance::Identity, || Err(Error::Budget { needed: 10, limit: 1 }));
        r.check("d", Provenance::Measured, || Ok(Outcome::measured(1.5)));
        let rep = r.into_report("verify", "ci");
        assert_eq!(rep.count(Status::Pass), 1);
        assert_eq!(rep.count(Status::Fail), 1);
        assert_eq!(rep.get("c").unwrap().status, Status::Skipped);
        let back = Report::from_json(&rep.to_json().unwrap()).unwrap();
        assert_eq!(back, rep);
        let mut csv = Vec::new();
        rep.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 5);
    }

    #[test]
    fn rejects_bad_header() {
        assert!(read_points("x,y\n1,2\n".as_bytes()).is_err());
    }
}

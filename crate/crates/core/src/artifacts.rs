//! On-disk artifacts: versioned JSON envelopes, CSV tables and polynomial input.
//!
//! Floats are written by `serde_json` in shortest round-trip form, so every
//! value reads back bit-identically.

use std::io::{Read, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "1";

/// Name of the environment variable capping worker threads.
pub const THREADS_ENV: &str = "BALLNEEDLETS_THREADS";

/// A JSON artifact: provenance fields followed by the payload's own fields.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: &'static str,
    pub command_line: &'a [String],
    pub seed: u64,
    #[serde(flatten)]
    pub payload: T,
}

impl<'a, T: Serialize> Envelope<'a, T> {
    pub fn new(command_line: &'a [String], seed: u64, payload: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command_line,
            seed,
            payload,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes rows of numbers under a header.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format_float(*v))).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Needlet coefficients as `(j, knot_index, value)` rows.
pub fn write_coefficients<W: Write>(out: W, rows: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["j", "knot_index", "value"]).map_err(csv_error)?;
    for (j, i, v) in rows {
        w.write_record([j.to_string(), i.to_string(), format_float(v)]).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_coefficients<R: Read>(input: R) -> Result<Vec<(usize, usize, f64)>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    let mut b = ryu::Buffer::new();
    b.format(v).to_string()
}

/// Worker count from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// `Σ c_α x^α` in `d` variables.
///
/// Text form: whitespace-separated terms `coef:a1,a2,…,ad`, for example
/// `"1:0,0 -0.5:2,1"` is `1 - 0.5 x₁² x₂`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polynomial {
    pub d: usize,
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    /// All monomials of total degree `≤ degree` with coefficients uniform in `[-1, 1]`.
    pub fn random(rng: &mut SplitMix64, d: usize, degree: usize) -> Self {
        let terms = crate::basis::graded_exponents(degree, d)
            .into_iter()
            .map(|e| (rng.gen_range(-1.0..1.0), e.into_iter().map(|a| a as u32).collect()))
            .collect();
        Self { d, terms }
    }

    pub fn random_seeded(seed: u64, d: usize, degree: usize) -> Self {
        Self::random(&mut SplitMix64::seed_from_u64(seed), d, degree)
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .filter(|(c, _)| *c != 0.0)
            .map(|(_, e)| e.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(x).map(|(a, v)| v.powi(*a as i32)).product::<f64>())
            .sum()
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |t: &str| Error::Config(format!("bad polynomial term `{t}`, expected coef:a1,…,ad"));
        let mut terms = Vec::new();
        let mut d = None;
        for t in s.split_whitespace() {
            let (c, e) = t.split_once(':').ok_or_else(|| bad(t))?;
            let c: f64 = c.parse().map_err(|_| bad(t))?;
            let e: Vec<u32> = e
                .split(',')
                .map(|a| a.trim().parse().map_err(|_| bad(t)))
                .collect::<Result<_>>()?;
            if *d.get_or_insert(e.len()) != e.len() {
                return Err(Error::Config(format!("term `{t}` has a different number of variables")));
            }
            terms.push((c, e));
        }
        let d = d.ok_or_else(|| Error::Config("empty polynomial".into()))?;
        Ok(Self { d, terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_text_form() {
        let p: Polynomial = "1:0,0 -0.5:2,1".parse().unwrap();
        assert_eq!(p.d, 2);
        assert_eq!(p.degree(), 3);
        assert_eq!(p.eval(&[2.0, 3.0]), 1.0 - 0.5 * 4.0 * 3.0);
        assert!("1:0,0 2:1".parse::<Polynomial>().is_err());
        assert!("x:1,0".parse::<Polynomial>().is_err());
        assert!("".parse::<Polynomial>().is_err());
    }

    #[test]
    fn random_polynomial_is_reproducible() {
        let a = Polynomial::random_seeded(3, 2, 4);
        let b = Polynomial::random_seeded(3, 2, 4);
        assert_eq!(a, b);
        assert_eq!(a.terms.len(), 15);
        assert_eq!(a.degree(), 4);
    }

    #[test]
    fn coefficients_round_trip() {
        let rows = vec![(0, 0, 0.1), (3, 17, -2.5e-17), (5, 2, 1.0 / 3.0)];
        let mut buf = Vec::new();
        write_coefficients(&mut buf, rows.clone()).unwrap();
        assert_eq!(read_coefficients(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn envelope_fields_come_first() {
        #[derive(Serialize)]
        struct P {
            n: usize,
        }
        let cmd = vec!["ballneedlets".to_string(), "cubature".to_string()];
        let json = Envelope::new(&cmd, 9, P { n: 4 }).to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["schema_version"], "1");
        assert_eq!(v["seed"], 9);
        assert_eq!(v["n"], 4);
        assert!(json.find("schema_version").unwrap() < json.find("\"n\"").unwrap());
    }

    #[test]
    fn floats_round_trip_exactly() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -1e-300, 5e-324] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }
}

//! Renormalized fluxes on the periodic interval `[0, 1)`.

use crate::error::{domain, Error, Result};
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// A flux value, exact when it was given as a fraction or a short decimal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flux {
    Exact(Ratio<i64>),
    Float(f64),
}

impl Flux {
    pub fn exact(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("flux denominator is zero".into()));
        }
        Ok(Flux::Exact(Ratio::new(num, den)))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Flux::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Flux::Float(x) => x,
        }
    }

    pub fn as_exact(self) -> Option<Ratio<i64>> {
        match self {
            Flux::Exact(r) => Some(r),
            Flux::Float(_) => None,
        }
    }

    /// Representative in `[0, 1)`.
    pub fn reduce(self) -> Self {
        match self {
            Flux::Exact(r) => Flux::Exact(r - r.floor()),
            Flux::Float(x) => Flux::Float(x - x.floor()),
        }
    }
}

fn parse_decimal(s: &str) -> Option<Ratio<i64>> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) || int.len() + frac.len() > 18 {
        return None;
    }
    let digits: i64 = format!("{int}{frac}").parse().ok()?;
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let r = Ratio::new(digits, den);
    Some(if neg { -r } else { r })
}

impl FromStr for Flux {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| Error::InvalidInput(format!("bad flux numerator in {s:?}")))?;
            let d: i64 = d.trim().parse().map_err(|_| Error::InvalidInput(format!("bad flux denominator in {s:?}")))?;
            return Flux::exact(n, d);
        }
        if let Some(r) = parse_decimal(s) {
            return Ok(Flux::Exact(r));
        }
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Flux::Float)
            .ok_or_else(|| Error::InvalidInput(format!("cannot parse flux {s:?}")))
    }
}

impl fmt::Display for Flux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flux::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Flux::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Flux::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Flux {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Flux::Exact(_) => s.serialize_str(&self.to_string()),
            Flux::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Flux {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Flux::Float(x)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Periodic distance `min(|a − b| mod 1, 1 − |a − b| mod 1)`, exact for exact inputs.
pub fn flux_distance(a: Flux, b: Flux) -> Flux {
    match (a, b) {
        (Flux::Exact(x), Flux::Exact(y)) => {
            let d = x - y;
            let d = d - d.floor();
            let e = Ratio::from_integer(1) - d;
            Flux::Exact(if d < e { d } else { e })
        }
        _ => {
            let d = (a.to_f64() - b.to_f64()).rem_euclid(1.0);
            Flux::Float(d.min(1.0 - d))
        }
    }
}

/// Fluxes `α_k ∈ [0, 1)`, one per link component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxVector(Vec<Flux>);

impl FluxVector {
    pub fn new(alphas: Vec<Flux>) -> Result<Self> {
        for (k, a) in alphas.iter().enumerate() {
            let x = a.to_f64();
            let ok = match a {
                Flux::Exact(r) => *r >= Ratio::zero() && *r < Ratio::from_integer(1),
                Flux::Float(_) => (0.0..1.0).contains(&x),
            };
            if !ok {
                return Err(domain("FluxVector::new", format!("flux {k} = {a} outside [0, 1)")));
            }
        }
        Ok(Self(alphas))
    }

    pub fn from_f64(alphas: &[f64]) -> Result<Self> {
        Self::new(alphas.iter().map(|&a| Flux::Float(a)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Flux] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|a| a.to_f64()).collect()
    }

    /// Exact sum when every entry is exact.
    pub fn exact_sum(&self) -> Option<Ratio<i64>> {
        self.0.iter().try_fold(Ratio::zero(), |acc, a| a.as_exact().map(|r| acc + r))
    }

    /// Largest componentwise periodic distance.
    pub fn distance(&self, other: &FluxVector) -> Result<Flux> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let mut best = Flux::Exact(Ratio::zero());
        for (a, b) in self.0.iter().zip(&other.0) {
            let d = flux_distance(*a, *b);
            best = match (best, d) {
                (Flux::Exact(x), Flux::Exact(y)) => Flux::Exact(x.max(y)),
                _ => Flux::Float(best.to_f64().max(d.to_f64())),
            };
        }
        Ok(best)
    }
}

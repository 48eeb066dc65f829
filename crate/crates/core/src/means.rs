//! Generalized (power) means and the p-mean welfare of an allocation.
//!
//! For `p` in `(-inf, 1]` the mean of nonnegative `x_1..x_n` is
//! `((1/n) sum x_i^p)^(1/p)`, with the limits `p = 0` (geometric mean) and
//! `p = -inf` (minimum). Any zero entry forces the mean to zero when `p <= 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::valuations::{GoodSet, Valuation};

/// Below this `|p|` the mean is evaluated through `expm1`/`ln_1p` so the
/// `1/p` rescaling does not amplify rounding error.
pub const SMALL_EXPONENT_BAND: f64 = 1e-4;

/// Exponent of a generalized mean, restricted to `(-inf, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    NegInfinity,
}

impl Exponent {
    pub const SOCIAL: Exponent = Exponent::Finite(1.0);
    pub const NASH: Exponent = Exponent::Finite(0.0);
    pub const EGALITARIAN: Exponent = Exponent::NegInfinity;

    pub fn finite(p: f64) -> Result<Self> {
        if p.is_nan() || p > 1.0 {
            return Err(Error::invalid(format!("exponent must lie in (-inf, 1], got {p}")));
        }
        if p == f64::NEG_INFINITY {
            return Ok(Exponent::NegInfinity);
        }
        // -0.0 and 0.0 are the same exponent
        Ok(Exponent::Finite(if p == 0.0 { 0.0 } else { p }))
    }

    /// Value as an extended real, `-inf` for [`Exponent::NegInfinity`].
    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::NegInfinity => f64::NEG_INFINITY,
        }
    }

    /// Parses a comma-separated list such as `-inf,-1,0,0.5,1`.
    pub fn parse_list(s: &str) -> Result<Vec<Exponent>> {
        let ps = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        if ps.is_empty() {
            return Err(Error::invalid("exponent list is empty"));
        }
        Ok(ps)
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-inf" {
            return Ok(Exponent::NegInfinity);
        }
        let p: f64 = s
            .parse()
            .map_err(|_| Error::invalid(format!("cannot parse exponent {s:?}")))?;
        if !p.is_finite() {
            return Err(Error::invalid(format!(
                "exponent {s:?}: only \"-inf\" may be non-finite"
            )));
        }
        Exponent::finite(p)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::NegInfinity => f.write_str("-inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::NegInfinity => serializer.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(p) => Exponent::finite(p),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Generalized mean of nonnegative values.
///
/// ```
/// use pmean::means::{p_mean, Exponent};
///
/// assert_eq!(p_mean(&[2.0, 8.0], Exponent::NASH).unwrap(), 4.0);
/// assert_eq!(p_mean(&[1.0, 2.0, 4.0], Exponent::NegInfinity).unwrap(), 1.0);
/// assert_eq!(p_mean(&[0.0, 5.0], Exponent::Finite(-1.0)).unwrap(), 0.0);
/// ```
pub fn p_mean(values: &[f64], p: Exponent) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(x) = values.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::invalid(format!(
            "mean inputs must be finite and nonnegative, got {x}"
        )));
    }
    if values.iter().all(|&x| x == values[0]) {
        return Ok(values[0]);
    }
    let p = match p {
        Exponent::NegInfinity => return Ok(values.iter().copied().fold(f64::INFINITY, f64::min)),
        Exponent::Finite(p) => p,
    };
    let has_zero = values.contains(&0.0);
    if p <= 0.0 && has_zero {
        return Ok(0.0);
    }
    let n = values.len() as f64;
    if p == 0.0 {
        let mean_log = values.iter().map(|x| x.ln()).sum::<f64>() / n;
        return Ok(mean_log.exp());
    }
    if p.abs() < SMALL_EXPONENT_BAND {
        // Normalize by the largest value so every log is <= 0, then
        // M_p = scale * exp( ln(1 + mean(expm1(p ln y))) / p ).
        let scale = values.iter().copied().fold(0.0, f64::max);
        let mean_expm1 = values.iter().map(|&x| (p * (x / scale).ln()).exp_m1()).sum::<f64>() / n;
        return Ok(scale * (mean_expm1.ln_1p() / p).exp());
    }
    // Scale so every ratio raised to p lies in [0, 1]: by the maximum when
    // p > 0, by the minimum when p < 0.
    let scale = if p > 0.0 {
        values.iter().copied().fold(0.0, f64::max)
    } else {
        values.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let mean = values.iter().map(|&x| (x / scale).powf(p)).sum::<f64>() / n;
    Ok(scale * mean.powf(1.0 / p))
}

/// An ordered n-partition of the goods; bundle `i` goes to agent `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation {
    pub bundles: Vec<GoodSet>,
}

impl Allocation {
    pub fn new(bundles: Vec<GoodSet>) -> Self {
        Allocation { bundles }
    }

    pub fn num_agents(&self) -> usize {
        self.bundles.len()
    }

    /// Checks that the bundles are pairwise disjoint and exactly cover `goods`.
    pub fn validate_over(&self, goods: GoodSet, agents: usize) -> Result<()> {
        if self.bundles.len() != agents {
            return Err(Error::invalid(format!(
                "allocation has {} bundles, expected {agents}",
                self.bundles.len()
            )));
        }
        let mut seen = GoodSet::empty();
        for (i, b) in self.bundles.iter().enumerate() {
            if !b.is_disjoint(seen) {
                return Err(Error::invalid(format!(
                    "bundle {i} overlaps an earlier bundle on {}",
                    b.intersection(seen)
                )));
            }
            seen = seen.union(*b);
        }
        if seen != goods {
            return Err(Error::invalid(format!("bundles cover {seen}, expected {goods}")));
        }
        Ok(())
    }

    /// Checks the allocation is a complete partition for `inst`.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        self.validate_over(inst.valuation.all_goods(), inst.n)
    }

    pub fn bundle_values(&self, v: &Valuation) -> Vec<f64> {
        self.bundles.iter().map(|&b| v.value(b)).collect()
    }
}

/// `M_p(v(A_1), ..., v(A_n))` under the instance's shared valuation.
pub fn p_mean_welfare(inst: &Instance, alloc: &Allocation, p: Exponent) -> Result<f64> {
    alloc.validate(inst)?;
    p_mean(&alloc.bundle_values(&inst.valuation), p)
}

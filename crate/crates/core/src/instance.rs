//! Fair-division instances, their JSON file format, and seeded generators.
//!
//! An instance file looks like
//!
//! ```json
//! {"n": 2, "valuation": {"type": "additive", "weights": [10.0, 1.0, 1.0, 1.0]}}
//! ```
//!
//! where `type` is one of `additive`, `budget_additive` (adds `cap`), `xos`
//! (uses `clauses`) or `explicit` (uses `table`, indexed by bitmask with good
//! `j` at bit `j`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::valuations::{GoodSet, Valuation, MAX_EXPLICIT_GOODS, MAX_GOODS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    /// Number of agents.
    pub n: usize,
    pub valuation: Valuation,
}

#[derive(Deserialize)]
struct RawInstance {
    n: usize,
    valuation: Valuation,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Instance::new(raw.n, raw.valuation)
    }
}

impl Instance {
    pub fn new(n: usize, valuation: Valuation) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("an instance needs at least one agent"));
        }
        Ok(Instance { n, valuation })
    }

    pub fn num_goods(&self) -> usize {
        self.valuation.num_goods()
    }

    pub fn all_goods(&self) -> GoodSet {
        self.valuation.all_goods()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instances always serialize")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Additive,
    BudgetAdditive,
    Xos,
    Explicit,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] = [
        FamilyKind::Additive,
        FamilyKind::BudgetAdditive,
        FamilyKind::Xos,
        FamilyKind::Explicit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Additive => "additive",
            FamilyKind::BudgetAdditive => "budget_additive",
            FamilyKind::Xos => "xos",
            FamilyKind::Explicit => "explicit",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown valuation family {s:?}")))
    }
}

/// Knobs for [`generate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    /// Additive clauses for `xos` and `explicit` instances.
    pub clauses: usize,
    /// Budget cap as a fraction of the total weight for `budget_additive`.
    pub cap_fraction: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            clauses: 3,
            cap_fraction: 0.5,
        }
    }
}

/// A weight uniform on `[0, 100)` rounded to a `1e-6` grid.
fn weight(rng: &mut SeededRng) -> f64 {
    (rng.next_f64() * 100.0 * 1e6).round() / 1e6
}

fn weights(rng: &mut SeededRng, m: usize) -> Vec<f64> {
    (0..m).map(|_| weight(rng)).collect()
}

/// Deterministic random instance.
///
/// Weights are drawn in good order from [`SeededRng`] seeded with `seed`.
/// `xos` draws `clauses` weight vectors one after another. `explicit` draws
/// the same clauses and tabulates their maximum, which makes the table
/// subadditive. `budget_additive` caps at `cap_fraction` of the total weight
/// (rounded to the same grid).
pub fn generate(family: FamilyKind, n: usize, m: usize, seed: u64, params: GenParams) -> Result<Instance> {
    let limit = match family {
        FamilyKind::Explicit => MAX_EXPLICIT_GOODS,
        _ => MAX_GOODS,
    };
    if m > limit {
        return Err(Error::SizeLimitExceeded {
            what: "goods for the generator",
            limit,
            got: m,
        });
    }
    if matches!(family, FamilyKind::Xos | FamilyKind::Explicit) && params.clauses == 0 {
        return Err(Error::invalid("clause count must be at least 1"));
    }
    let mut rng = SeededRng::new(seed);
    let valuation = match family {
        FamilyKind::Additive => Valuation::additive(weights(&mut rng, m))?,
        FamilyKind::BudgetAdditive => {
            let w = weights(&mut rng, m);
            let cap = (w.iter().sum::<f64>() * params.cap_fraction * 1e6).round() / 1e6;
            Valuation::budget_additive(w, cap)?
        }
        FamilyKind::Xos => Valuation::xos((0..params.clauses).map(|_| weights(&mut rng, m)).collect())?,
        FamilyKind::Explicit => {
            let xos = Valuation::xos((0..params.clauses).map(|_| weights(&mut rng, m)).collect())?;
            Valuation::explicit(xos.tabulate()?)?
        }
    };
    Instance::new(n, valuation)
}

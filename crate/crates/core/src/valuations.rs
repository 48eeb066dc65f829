//! Identical set-function valuations over indivisible goods.
//!
//! Every agent shares one [`Valuation`]. It answers two kinds of queries:
//! a *value query* `v(S)` and a *demand query*
//! `argmax_S v(S) - sum_{j in S} price_j`.
//!
//! Four families are supported. Additive, budget-additive and XOS valuations
//! are normalized, monotone and subadditive by construction because their
//! constructors reject negative weights. An explicit table can encode any set
//! function on up to 16 goods, so for that family the axioms must be checked
//! with [`Valuation::check_axioms`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::EPS;

/// Goods are indexed `0..m` and stored in a 64-bit mask.
pub const MAX_GOODS: usize = 64;
/// Largest `m` for an explicit value table (`2^m` entries).
pub const MAX_EXPLICIT_GOODS: usize = 16;
/// Largest `m` for which budget-additive demand is answered by enumeration.
pub const MAX_BUDGET_DEMAND_GOODS: usize = 24;
/// Largest `m` for the exhaustive axiom scan over all subset pairs.
pub const MAX_AXIOM_GOODS: usize = 12;
/// Largest `m` for [`Valuation::tabulate`].
pub const MAX_TABULATE_GOODS: usize = 20;

/// A subset of goods, good `j` at bit `j`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoodSet(u64);

impl GoodSet {
    pub const fn empty() -> Self {
        GoodSet(0)
    }

    pub const fn from_bits(bits: u64) -> Self {
        GoodSet(bits)
    }

    /// All goods `0..m`.
    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_GOODS);
        if m >= 64 {
            GoodSet(u64::MAX)
        } else {
            GoodSet((1u64 << m) - 1)
        }
    }

    pub fn singleton(good: usize) -> Self {
        debug_assert!(good < MAX_GOODS);
        GoodSet(1u64 << good)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, good: usize) -> bool {
        good < MAX_GOODS && self.0 & (1u64 << good) != 0
    }

    pub fn insert(&mut self, good: usize) {
        self.0 |= 1u64 << good;
    }

    pub fn remove(&mut self, good: usize) {
        self.0 &= !(1u64 << good);
    }

    #[must_use]
    pub fn with(self, good: usize) -> Self {
        GoodSet(self.0 | (1u64 << good))
    }

    #[must_use]
    pub const fn union(self, other: GoodSet) -> Self {
        GoodSet(self.0 | other.0)
    }

    #[must_use]
    pub const fn intersection(self, other: GoodSet) -> Self {
        GoodSet(self.0 & other.0)
    }

    #[must_use]
    pub const fn difference(self, other: GoodSet) -> Self {
        GoodSet(self.0 & !other.0)
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_subset_of(self, other: GoodSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn is_disjoint(self, other: GoodSet) -> bool {
        self.0 & other.0 == 0
    }

    /// True when only bits below `m` are set.
    pub fn fits(self, m: usize) -> bool {
        self.is_subset_of(GoodSet::full(m))
    }

    /// Lowest-indexed good, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Goods in ascending index order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(j)
        })
    }
}

impl FromIterator<usize> for GoodSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = GoodSet::empty();
        for j in iter {
            s.insert(j);
        }
        s
    }
}

impl fmt::Debug for GoodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for GoodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, j) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{j}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for GoodSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for GoodSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let goods = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&bad) = goods.iter().find(|&&j| j >= MAX_GOODS) {
            return Err(serde::de::Error::custom(format!("good index {bad} out of range")));
        }
        Ok(goods.into_iter().collect())
    }
}

/// The concrete representation behind a [`Valuation`].
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Additive {
        weights: Vec<f64>,
    },
    BudgetAdditive {
        weights: Vec<f64>,
        cap: f64,
    },
    /// Maximum over additive clauses.
    Xos {
        clauses: Vec<Vec<f64>>,
    },
    /// `table[mask]` is the value of the set encoded by `mask`.
    Explicit {
        table: Vec<f64>,
    },
}

/// A set function shared by all agents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ValuationRepr", into = "ValuationRepr")]
pub struct Valuation {
    family: Family,
    m: usize,
}

/// Answer to a demand query.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Demand {
    pub set: GoodSet,
    /// `v(set) - prices(set)`.
    pub utility: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub normalized: bool,
    pub monotone: bool,
    pub subadditive: bool,
}

impl AxiomReport {
    pub fn all(&self) -> bool {
        self.normalized && self.monotone && self.subadditive
    }
}

fn check_weights(what: &str, weights: &[f64]) -> Result<()> {
    if weights.len() > MAX_GOODS {
        return Err(Error::SizeLimitExceeded {
            what: "goods in a bitmask",
            limit: MAX_GOODS,
            got: weights.len(),
        });
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::invalid(format!(
            "{what} weights must be finite and nonnegative, got {w}"
        )));
    }
    Ok(())
}

/// Sum of `weights` over `set`. Starts from `+0.0`, so the empty set is
/// worth `0.0` rather than the `-0.0` an empty `Iterator::sum` gives.
fn weight_of(weights: &[f64], set: GoodSet) -> f64 {
    set.iter().fold(0.0, |acc, j| acc + weights[j])
}

impl Valuation {
    pub fn additive(weights: Vec<f64>) -> Result<Self> {
        check_weights("additive", &weights)?;
        let m = weights.len();
        Ok(Valuation {
            family: Family::Additive { weights },
            m,
        })
    }

    pub fn budget_additive(weights: Vec<f64>, cap: f64) -> Result<Self> {
        check_weights("budget-additive", &weights)?;
        if !cap.is_finite() || cap < 0.0 {
            return Err(Error::invalid(format!(
                "budget cap must be finite and nonnegative, got {cap}"
            )));
        }
        let m = weights.len();
        Ok(Valuation {
            family: Family::BudgetAdditive { weights, cap },
            m,
        })
    }

    pub fn xos(clauses: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = clauses.first() else {
            return Err(Error::invalid("xos valuation needs at least one clause"));
        };
        let m = first.len();
        for clause in &clauses {
            if clause.len() != m {
                return Err(Error::invalid(format!(
                    "xos clauses must all have length {m}, found {}",
                    clause.len()
                )));
            }
            check_weights("xos clause", clause)?;
        }
        Ok(Valuation {
            family: Family::Xos { clauses },
            m,
        })
    }

    /// Table of `2^m` values indexed by bitmask. The axioms are not enforced.
    pub fn explicit(table: Vec<f64>) -> Result<Self> {
        let len = table.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::invalid(format!(
                "explicit table length must be a power of two, got {len}"
            )));
        }
        let m = len.trailing_zeros() as usize;
        if m > MAX_EXPLICIT_GOODS {
            return Err(Error::SizeLimitExceeded {
                what: "goods in an explicit table",
                limit: MAX_EXPLICIT_GOODS,
                got: m,
            });
        }
        if let Some(x) = table.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::invalid(format!(
                "explicit table entries must be finite and nonnegative, got {x}"
            )));
        }
        Ok(Valuation {
            family: Family::Explicit { table },
            m,
        })
    }

    pub fn num_goods(&self) -> usize {
        self.m
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Additive { .. } => "additive",
            Family::BudgetAdditive { .. } => "budget_additive",
            Family::Xos { .. } => "xos",
            Family::Explicit { .. } => "explicit",
        }
    }

    pub fn all_goods(&self) -> GoodSet {
        GoodSet::full(self.m)
    }

    /// Value query. `set` must only contain goods below [`num_goods`](Self::num_goods).
    pub fn value(&self, set: GoodSet) -> f64 {
        debug_assert!(set.fits(self.m), "{set} out of range for m={}", self.m);
        match &self.family {
            Family::Additive { weights } => weight_of(weights, set),
            Family::BudgetAdditive { weights, cap } => cap.min(weight_of(weights, set)),
            Family::Xos { clauses } => clauses.iter().map(|c| weight_of(c, set)).fold(0.0, f64::max),
            Family::Explicit { table } => table[set.bits() as usize],
        }
    }

    /// Value of the single good `j`.
    pub fn good_value(&self, good: usize) -> f64 {
        self.value(GoodSet::singleton(good))
    }

    /// Demand query over all goods.
    pub fn demand(&self, prices: &[f64]) -> Result<Demand> {
        self.demand_within(prices, self.all_goods())
    }

    /// Demand query restricted to subsets of `allowed`; prices of goods
    /// outside `allowed` are ignored.
    ///
    /// Additive and XOS valuations are answered clause-by-clause in time
    /// linear in the representation. Budget-additive and explicit valuations
    /// are answered by enumerating every subset of `allowed`.
    pub fn demand_within(&self, prices: &[f64], allowed: GoodSet) -> Result<Demand> {
        if prices.len() != self.m {
            return Err(Error::invalid(format!(
                "price vector has length {}, expected {}",
                prices.len(),
                self.m
            )));
        }
        if let Some(p) = prices.iter().find(|p| !p.is_finite()) {
            return Err(Error::invalid(format!("prices must be finite, got {p}")));
        }
        let allowed = allowed.intersection(self.all_goods());
        let set = match &self.family {
            Family::Additive { weights } => take_profitable(weights, prices, allowed),
            Family::Xos { clauses } => {
                let mut best = GoodSet::empty();
                let mut best_utility = f64::NEG_INFINITY;
                for clause in clauses {
                    let set = take_profitable(clause, prices, allowed);
                    let utility: f64 = set.iter().map(|j| clause[j] - prices[j]).sum();
                    if utility > best_utility {
                        best = set;
                        best_utility = utility;
                    }
                }
                best
            }
            Family::BudgetAdditive { .. } => {
                self.require_enumerable(allowed, MAX_BUDGET_DEMAND_GOODS)?;
                self.enumerate_demand(prices, allowed)
            }
            Family::Explicit { .. } => {
                self.require_enumerable(allowed, MAX_EXPLICIT_GOODS)?;
                self.enumerate_demand(prices, allowed)
            }
        };
        let utility = self.value(set) - set.iter().map(|j| prices[j]).sum::<f64>();
        Ok(Demand { set, utility })
    }

    fn require_enumerable(&self, allowed: GoodSet, limit: usize) -> Result<()> {
        if allowed.len() > limit {
            return Err(Error::SizeLimitExceeded {
                what: "goods for enumerated demand",
                limit,
                got: allowed.len(),
            });
        }
        Ok(())
    }

    /// Walks the subsets of `allowed` in Gray-code order, keeping the price
    /// sum incrementally. Ties keep the earliest subset visited.
    fn enumerate_demand(&self, prices: &[f64], allowed: GoodSet) -> GoodSet {
        let goods: Vec<usize> = allowed.iter().collect();
        let mut set = GoodSet::empty();
        let mut price_sum = 0.0;
        let mut best = set;
        let mut best_utility = self.value(set);
        for step in 1u64..(1u64 << goods.len()) {
            let j = goods[step.trailing_zeros() as usize];
            if set.contains(j) {
                set.remove(j);
                price_sum -= prices[j];
            } else {
                set.insert(j);
                price_sum += prices[j];
            }
            let utility = self.value(set) - price_sum;
            if utility > best_utility + EPS {
                best = set;
                best_utility = utility;
            }
        }
        best
    }

    /// Values of all `2^m` subsets, indexed by bitmask.
    pub fn tabulate(&self) -> Result<Vec<f64>> {
        if self.m > MAX_TABULATE_GOODS {
            return Err(Error::SizeLimitExceeded {
                what: "goods for a value table",
                limit: MAX_TABULATE_GOODS,
                got: self.m,
            });
        }
        if let Family::Explicit { table } = &self.family {
            return Ok(table.clone());
        }
        Ok((0..1u64 << self.m)
            .map(|bits| self.value(GoodSet::from_bits(bits)))
            .collect())
    }

    /// Exhaustively checks normalization, monotonicity and subadditivity,
    /// each with slack [`EPS`].
    pub fn check_axioms(&self) -> Result<AxiomReport> {
        if self.m > MAX_AXIOM_GOODS {
            return Err(Error::SizeLimitExceeded {
                what: "goods for the axiom scan",
                limit: MAX_AXIOM_GOODS,
                got: self.m,
            });
        }
        let table = self.tabulate()?;
        let size = table.len();
        let normalized = table[0].abs() <= EPS;
        let monotone = (0..size).all(|s| {
            (0..self.m)
                .filter(|j| s & (1 << j) == 0)
                .all(|j| table[s] <= table[s | (1 << j)] + EPS)
        });
        let subadditive = (0..size).all(|a| (0..size).all(|b| table[a | b] <= table[a] + table[b] + EPS));
        Ok(AxiomReport {
            normalized,
            monotone,
            subadditive,
        })
    }
}

fn take_profitable(weights: &[f64], prices: &[f64], allowed: GoodSet) -> GoodSet {
    allowed.iter().filter(|&j| weights[j] >= prices[j]).collect()
}

/// Wire form of a valuation inside an instance file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ValuationRepr {
    Additive { weights: Vec<f64> },
    BudgetAdditive { weights: Vec<f64>, cap: f64 },
    Xos { clauses: Vec<Vec<f64>> },
    Explicit { table: Vec<f64> },
}

impl TryFrom<ValuationRepr> for Valuation {
    type Error = Error;

    fn try_from(repr: ValuationRepr) -> Result<Self> {
        match repr {
            ValuationRepr::Additive { weights } => Valuation::additive(weights),
            ValuationRepr::BudgetAdditive { weights, cap } => Valuation::budget_additive(weights, cap),
            ValuationRepr::Xos { clauses } => Valuation::xos(clauses),
            ValuationRepr::Explicit { table } => Valuation::explicit(table),
        }
    }
}

impl From<Valuation> for ValuationRepr {
    fn from(v: Valuation) -> Self {
        match v.family {
            Family::Additive { weights } => ValuationRepr::Additive { weights },
            Family::BudgetAdditive { weights, cap } => ValuationRepr::BudgetAdditive { weights, cap },
            Family::Xos { clauses } => ValuationRepr::Xos { clauses },
            Family::Explicit { table } => ValuationRepr::Explicit { table },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(goods: &[usize]) -> GoodSet {
        goods.iter().copied().collect()
    }

    #[test]
    fn additive_value() {
        let v = Valuation::additive(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(v.value(set(&[0, 2])), 5.0);
    }

    #[test]
    fn empty_set_is_worth_nothing() {
        let vals = [
            Valuation::additive(vec![3.0, 1.0]).unwrap(),
            Valuation::budget_additive(vec![3.0, 1.0], 2.0).unwrap(),
            Valuation::xos(vec![vec![1.0, 0.0], vec![0.0, 4.0]]).unwrap(),
            Valuation::explicit(vec![0.0, 1.0, 1.0, 1.5]).unwrap(),
        ];
        for v in &vals {
            assert_eq!(v.value(GoodSet::empty()), 0.0, "{}", v.family_name());
        }
    }

    #[test]
    fn xos_takes_best_clause() {
        // clause sums on {0,1,2}: 1 and 2
        let v = Valuation::xos(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]]).unwrap();
        assert_eq!(v.value(set(&[0, 1, 2])), 2.0);
        assert_eq!(v.value(set(&[0])), 1.0);
    }

    #[test]
    fn budget_additive_caps() {
        let v = Valuation::budget_additive(vec![3.0, 4.0], 5.0).unwrap();
        assert_eq!(v.value(set(&[0])), 3.0);
        assert_eq!(v.value(set(&[0, 1])), 5.0);
    }

    #[test]
    fn additive_demand() {
        // subsets: {} 0, {0} 1, {1} -1, {0,1} 0
        let v = Valuation::additive(vec![3.0, 1.0]).unwrap();
        let d = v.demand(&[2.0, 2.0]).unwrap();
        assert_eq!(d.set, set(&[0]));
        assert_eq!(d.utility, 1.0);
    }

    #[test]
    fn zero_prices_demand_everything() {
        let v = Valuation::budget_additive(vec![1.0, 2.0, 3.0], 10.0).unwrap();
        let d = v.demand(&[0.0; 3]).unwrap();
        assert_eq!(d.utility, v.value(v.all_goods()));
        assert_eq!(d.set, v.all_goods());
    }

    #[test]
    fn negative_prices_are_accepted() {
        let v = Valuation::additive(vec![0.0, 1.0]).unwrap();
        let d = v.demand(&[-1.0, 0.5]).unwrap();
        assert_eq!(d.set, set(&[0, 1]));
        assert!((d.utility - 1.5).abs() < 1e-12);
    }

    #[test]
    fn demand_rejects_bad_prices() {
        let v = Valuation::additive(vec![1.0, 1.0]).unwrap();
        assert!(matches!(v.demand(&[1.0]), Err(Error::InvalidInput(_))));
        assert!(matches!(v.demand(&[1.0, f64::NAN]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn budget_demand_size_limit() {
        let v = Valuation::budget_additive(vec![1.0; 25], 3.0).unwrap();
        assert!(matches!(v.demand(&[0.5; 25]), Err(Error::SizeLimitExceeded { .. })));
        // restricting the universe brings it back under the cap
        let d = v.demand_within(&[0.5; 25], GoodSet::full(4)).unwrap();
        assert!((d.utility - 1.5).abs() < 1e-12);
    }

    #[test]
    fn constructors_reject_negative_weights() {
        assert!(Valuation::additive(vec![1.0, -0.5]).is_err());
        assert!(Valuation::budget_additive(vec![1.0], -1.0).is_err());
        assert!(Valuation::xos(vec![vec![1.0], vec![-1.0]]).is_err());
        assert!(Valuation::xos(vec![]).is_err());
        assert!(Valuation::xos(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(Valuation::explicit(vec![0.0, 1.0, 2.0]).is_err());
        assert!(Valuation::explicit(vec![0.0; 1 << 17]).is_err());
    }

    #[test]
    fn axioms_of_additive() {
        let v = Valuation::additive(vec![0.0, 2.5, 7.0, 1.0]).unwrap();
        assert!(v.check_axioms().unwrap().all());
    }

    #[test]
    fn axioms_detect_superadditive_table() {
        let v = Valuation::explicit(vec![0.0, 1.0, 1.0, 3.0]).unwrap();
        let r = v.check_axioms().unwrap();
        assert!(r.normalized && r.monotone);
        assert!(!r.subadditive);
    }

    #[test]
    fn axioms_accept_unit_demand_like_table() {
        let v = Valuation::explicit(vec![0.0, 2.0, 1.0, 2.0]).unwrap();
        let r = v.check_axioms().unwrap();
        assert!(r.normalized && r.monotone && r.subadditive);
    }

    #[test]
    fn axioms_detect_non_monotone_and_unnormalized() {
        let v = Valuation::explicit(vec![0.5, 2.0, 1.0, 1.5]).unwrap();
        let r = v.check_axioms().unwrap();
        assert!(!r.normalized);
        assert!(!r.monotone);
    }

    #[test]
    fn axiom_scan_size_limit() {
        let v = Valuation::additive(vec![1.0; 13]).unwrap();
        assert!(matches!(v.check_axioms(), Err(Error::SizeLimitExceeded { .. })));
    }

    #[test]
    fn goodset_basics() {
        let s = set(&[5, 1, 3]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 3, 5]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.first(), Some(1));
        assert_eq!(s.to_string(), "{1,3,5}");
        assert!(s.fits(6) && !s.fits(5));
        assert_eq!(GoodSet::full(64).len(), 64);
        assert_eq!(GoodSet::full(0), GoodSet::empty());
    }

    #[test]
    fn valuation_json_round_trip() {
        let json = r#"{"type":"budget_additive","weights":[1.0,2.0],"cap":2.5}"#;
        let v: Valuation = serde_json::from_str(json).unwrap();
        assert_eq!(v.value(set(&[0, 1])), 2.5);
        let back = serde_json::to_string(&v).unwrap();
        assert_eq!(back, json);
        let bad = r#"{"type":"additive","weights":[1.0,-2.0]}"#;
        assert!(serde_json::from_str::<Valuation>(bad).is_err());
    }
}

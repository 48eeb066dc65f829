//! The social-welfare subroutine `F`.
//!
//! Both phases of the allocator consult an allocation whose average bundle
//! value `F` is close to the best achievable average. The analysis only uses
//! `OPT_1 / 2 <= F <= OPT_1`, so any backend meeting that contract can be
//! plugged in. Two are provided:
//!
//! * [`SwBackend::ExactBruteForce`] enumerates every labeled partition and
//!   returns a true optimum (`F = OPT_1`);
//! * [`SwBackend::GreedyDemand`] is a fast heuristic with no proven ratio.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::means::Allocation;
use crate::valuations::{GoodSet, Valuation};
use crate::EPS;

/// Default cap on `n^m` for brute-force enumeration.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Largest `m` for which enumeration reads values from a precomputed table.
const TABLE_GOODS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwBackend {
    ExactBruteForce { budget: u64 },
    GreedyDemand,
}

impl SwBackend {
    pub fn exact() -> Self {
        SwBackend::ExactBruteForce { budget: DEFAULT_BUDGET }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SwBackend::ExactBruteForce { .. } => "exact",
            SwBackend::GreedyDemand => "greedy",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Guarantee {
    /// `F` equals the optimal average welfare.
    Exact,
    /// `F` is at least half the optimal average welfare.
    HalfApprox,
    /// No guarantee.
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwEstimate {
    pub alloc: Allocation,
    /// Average bundle value of `alloc`.
    pub f_value: f64,
    pub guarantee: Guarantee,
}

/// Number of labeled partitions of `goods` goods into `agents` bundles.
pub fn partition_count(goods: usize, agents: usize) -> u128 {
    let mut count: u128 = 1;
    for _ in 0..goods {
        count = count.saturating_mul(agents as u128);
    }
    count
}

pub fn check_budget(goods: usize, agents: usize, budget: u64) -> Result<()> {
    let states = partition_count(goods, agents);
    if states > u128::from(budget) {
        return Err(Error::BudgetExceeded { states, budget });
    }
    Ok(())
}

/// Odometer over assignments of goods to labeled bundles.
///
/// The lowest-indexed good is the most significant digit, so the walk starts
/// with every good in bundle 0 and ends with every good in the last bundle.
#[derive(Clone, Debug)]
pub(crate) struct PartitionWalker {
    goods: Vec<usize>,
    digits: Vec<usize>,
    bundles: Vec<GoodSet>,
}

impl PartitionWalker {
    pub(crate) fn new(goods: GoodSet, agents: usize) -> Self {
        assert!(agents > 0, "partition into zero bundles");
        let mut bundles = vec![GoodSet::empty(); agents];
        bundles[0] = goods;
        PartitionWalker {
            goods: goods.iter().collect(),
            digits: vec![0; goods.len()],
            bundles,
        }
    }

    pub(crate) fn bundles(&self) -> &[GoodSet] {
        &self.bundles
    }

    /// Moves to the next assignment; false once every assignment was visited.
    pub(crate) fn advance(&mut self) -> bool {
        let n = self.bundles.len();
        for pos in (0..self.goods.len()).rev() {
            let g = self.goods[pos];
            let d = self.digits[pos];
            self.bundles[d].remove(g);
            if d + 1 < n {
                self.digits[pos] = d + 1;
                self.bundles[d + 1].insert(g);
                return true;
            }
            self.digits[pos] = 0;
            self.bundles[0].insert(g);
        }
        false
    }

    /// Calls `visit` on every assignment in enumeration order.
    pub(crate) fn walk(goods: GoodSet, agents: usize, mut visit: impl FnMut(&[GoodSet])) {
        let mut w = PartitionWalker::new(goods, agents);
        loop {
            visit(w.bundles());
            if !w.advance() {
                break;
            }
        }
    }
}

/// Iterator over every assignment of `m` goods to `n` labeled bundles.
#[derive(Clone, Debug)]
pub struct LabeledPartitions {
    walker: PartitionWalker,
    done: bool,
}

impl Iterator for LabeledPartitions {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        if self.done {
            return None;
        }
        let item = Allocation::new(self.walker.bundles().to_vec());
        self.done = !self.walker.advance();
        Some(item)
    }
}

/// Every assignment of goods `0..m` to `n` labeled bundles, `n^m` in total.
///
/// ```
/// use pmean::swmax::enumerate_labeled_partitions;
///
/// let all: Vec<_> = enumerate_labeled_partitions(2, 2, 100).unwrap().collect();
/// assert_eq!(all.len(), 4);
/// ```
pub fn enumerate_labeled_partitions(m: usize, n: usize, budget: u64) -> Result<LabeledPartitions> {
    if n == 0 {
        return Err(Error::invalid("cannot partition into zero bundles"));
    }
    check_budget(m, n, budget)?;
    Ok(LabeledPartitions {
        walker: PartitionWalker::new(GoodSet::full(m), n),
        done: false,
    })
}

/// Value lookup that tabulates small valuations once.
pub(crate) enum Values<'a> {
    Table(Vec<f64>),
    Direct(&'a Valuation),
}

impl<'a> Values<'a> {
    pub(crate) fn new(v: &'a Valuation) -> Self {
        if v.num_goods() <= TABLE_GOODS {
            Values::Table(v.tabulate().expect("small valuation tabulates"))
        } else {
            Values::Direct(v)
        }
    }

    #[inline]
    pub(crate) fn get(&self, s: GoodSet) -> f64 {
        match self {
            Values::Table(t) => t[s.bits() as usize],
            Values::Direct(v) => v.value(s),
        }
    }
}

pub fn sw_estimate(inst: &Instance, backend: SwBackend) -> Result<SwEstimate> {
    sw_estimate_on(&inst.valuation, inst.all_goods(), inst.n, backend)
}

/// `F` of the sub-instance made of `goods` and `agents` agents.
pub fn sw_estimate_on(v: &Valuation, goods: GoodSet, agents: usize, backend: SwBackend) -> Result<SwEstimate> {
    if agents == 0 {
        return Err(Error::invalid("social welfare over zero agents"));
    }
    if !goods.fits(v.num_goods()) {
        return Err(Error::invalid(format!(
            "goods {goods} out of range for m={}",
            v.num_goods()
        )));
    }
    match backend {
        SwBackend::ExactBruteForce { budget } => exact(v, goods, agents, budget),
        SwBackend::GreedyDemand => greedy(v, goods, agents),
    }
}

fn exact(v: &Valuation, goods: GoodSet, agents: usize, budget: u64) -> Result<SwEstimate> {
    check_budget(goods.len(), agents, budget)?;
    let values = Values::new(v);
    let mut best: Option<(f64, Vec<GoodSet>)> = None;
    PartitionWalker::walk(goods, agents, |bundles| {
        let avg = bundles.iter().map(|&b| values.get(b)).sum::<f64>() / agents as f64;
        if best.as_ref().map_or(true, |(b, _)| avg > b + EPS) {
            best = Some((avg, bundles.to_vec()));
        }
    });
    let (f_value, bundles) = best.expect("at least one partition");
    Ok(SwEstimate {
        alloc: Allocation::new(bundles),
        f_value,
        guarantee: Guarantee::Exact,
    })
}

/// Repeatedly asks for the demanded set of the remaining goods at zero
/// prices and deals its goods round-robin, highest singleton value first.
fn greedy(v: &Valuation, goods: GoodSet, agents: usize) -> Result<SwEstimate> {
    let zero = vec![0.0; v.num_goods()];
    let mut bundles = vec![GoodSet::empty(); agents];
    let mut remaining = goods;
    let mut turn = 0;
    while !remaining.is_empty() {
        let demanded = v.demand_within(&zero, remaining)?.set;
        let batch = if demanded.is_empty() { remaining } else { demanded };
        let mut order: Vec<usize> = batch.iter().collect();
        order.sort_by(|&a, &b| v.good_value(b).total_cmp(&v.good_value(a)).then(a.cmp(&b)));
        for g in order {
            bundles[turn % agents].insert(g);
            turn += 1;
        }
        remaining = remaining.difference(batch);
    }
    let f_value = bundles.iter().map(|&b| v.value(b)).sum::<f64>() / agents as f64;
    Ok(SwEstimate {
        alloc: Allocation::new(bundles),
        f_value,
        guarantee: Guarantee::Heuristic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn partition_counts() {
        assert_eq!(enumerate_labeled_partitions(2, 2, 100).unwrap().count(), 4);
        let empty: Vec<_> = enumerate_labeled_partitions(0, 3, 100).unwrap().collect();
        assert_eq!(empty.len(), 1);
        assert!(empty[0].bundles.iter().all(|b| b.is_empty()));
        let all: Vec<_> = enumerate_labeled_partitions(3, 2, 100).unwrap().collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), 8);
    }

    #[test]
    fn enumeration_order() {
        let all: Vec<_> = enumerate_labeled_partitions(2, 2, 100).unwrap().collect();
        let firsts: Vec<_> = all.iter().map(|a| a.bundles[0].bits()).collect();
        // good 1 (least significant) moves first
        assert_eq!(firsts, vec![0b11, 0b01, 0b10, 0b00]);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            enumerate_labeled_partitions(10, 3, 1000),
            Err(Error::BudgetExceeded {
                states: 59049,
                budget: 1000
            })
        ));
        assert_eq!(partition_count(64, 64), u128::MAX);
    }

    #[test]
    fn single_agent_gets_everything() {
        let inst = Instance::new(1, Valuation::additive(vec![2.0, 3.0]).unwrap()).unwrap();
        let est = sw_estimate(&inst, SwBackend::exact()).unwrap();
        assert_eq!(est.alloc.bundles, vec![GoodSet::full(2)]);
        assert_eq!(est.f_value, 5.0);
        assert_eq!(est.guarantee, Guarantee::Exact);
    }

    #[test]
    fn exact_additive() {
        let inst = Instance::new(2, Valuation::additive(vec![10.0, 1.0, 1.0, 1.0]).unwrap()).unwrap();
        let est = sw_estimate(&inst, SwBackend::exact()).unwrap();
        assert_eq!(est.f_value, 6.5);
        // every split ties; the first enumerated one is kept
        assert_eq!(est.alloc.bundles, vec![GoodSet::full(4), GoodSet::empty()]);
    }

    #[test]
    fn exact_unit_demand_table() {
        let inst = Instance::new(2, Valuation::explicit(vec![0.0, 1.0, 1.0, 1.0]).unwrap()).unwrap();
        let est = sw_estimate(&inst, SwBackend::exact()).unwrap();
        assert_eq!(est.f_value, 1.0);
        assert_eq!(est.alloc.bundles, vec![GoodSet::singleton(0), GoodSet::singleton(1)]);
    }

    #[test]
    fn exact_respects_budget() {
        let inst = Instance::new(3, Valuation::additive(vec![1.0; 10]).unwrap()).unwrap();
        let r = sw_estimate(&inst, SwBackend::ExactBruteForce { budget: 100 });
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn restricted_sub_instance() {
        let v = Valuation::additive(vec![10.0, 1.0, 2.0, 3.0]).unwrap();
        let goods: GoodSet = [1, 2, 3].into_iter().collect();
        let est = sw_estimate_on(&v, goods, 2, SwBackend::exact()).unwrap();
        assert_eq!(est.f_value, 3.0);
        est.alloc.validate_over(goods, 2).unwrap();
    }

    #[test]
    fn greedy_deals_by_value() {
        let inst = Instance::new(2, Valuation::additive(vec![1.0, 5.0, 3.0, 4.0]).unwrap()).unwrap();
        let est = sw_estimate(&inst, SwBackend::GreedyDemand).unwrap();
        assert_eq!(est.guarantee, Guarantee::Heuristic);
        est.alloc.validate(&inst).unwrap();
        // order 1,3,2,0 dealt to agents 0,1,0,1
        assert_eq!(est.alloc.bundles[0], [1, 2].into_iter().collect());
        assert_eq!(est.alloc.bundles[1], [3, 0].into_iter().collect());
        assert_eq!(est.f_value, 6.5);
    }

    #[test]
    fn greedy_on_budget_additive_covers_all_goods() {
        let v = Valuation::budget_additive(vec![4.0, 4.0, 1.0, 1.0], 5.0).unwrap();
        let inst = Instance::new(2, v).unwrap();
        let est = sw_estimate(&inst, SwBackend::GreedyDemand).unwrap();
        est.alloc.validate(&inst).unwrap();
        let recomputed = est.alloc.bundle_values(&inst.valuation).iter().sum::<f64>() / 2.0;
        assert!((recomputed - est.f_value).abs() < 1e-12);
    }
}

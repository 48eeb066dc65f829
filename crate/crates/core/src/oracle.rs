//! Brute-force ground truth for small instances.
//!
//! Every labeled partition of the goods is enumerated, so these routines are
//! only usable while `n^m` stays within the budget. They are deliberately
//! simple: no pruning, no symmetry breaking.

use serde::Serialize;

use crate::allocator::CONSTANTS;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::means::{p_mean, Allocation, Exponent};
use crate::swmax::{check_budget, PartitionWalker, Values};
use crate::EPS;

/// A p-optimal allocation and its welfare.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptResult {
    pub p: Exponent,
    pub alloc: Allocation,
    pub welfare: f64,
}

/// The p-optimal allocation; ties keep the first in enumeration order.
pub fn p_opt_brute(inst: &Instance, p: Exponent, budget: u64) -> Result<OptResult> {
    Ok(p_opt_brute_many(inst, &[p], budget)?.remove(0))
}

/// p-optimal allocations for several exponents from a single enumeration.
///
/// A later allocation replaces the incumbent only when it is better by more
/// than [`EPS`], so no allocation exceeds the returned welfare by more than
/// `EPS`.
pub fn p_opt_brute_many(inst: &Instance, ps: &[Exponent], budget: u64) -> Result<Vec<OptResult>> {
    check_budget(inst.num_goods(), inst.n, budget)?;
    let values = Values::new(&inst.valuation);
    let mut best: Vec<Option<(f64, Vec<_>)>> = vec![None; ps.len()];
    let mut bundle_values = vec![0.0; inst.n];
    PartitionWalker::walk(inst.all_goods(), inst.n, |bundles| {
        for (x, &b) in bundle_values.iter_mut().zip(bundles) {
            *x = values.get(b);
        }
        for (slot, &p) in best.iter_mut().zip(ps) {
            let w = p_mean(&bundle_values, p).expect("nonempty nonnegative values");
            if slot.as_ref().map_or(true, |(b, _)| w > b + EPS) {
                *slot = Some((w, bundles.to_vec()));
            }
        }
    });
    Ok(best
        .into_iter()
        .zip(ps)
        .map(|(slot, &p)| {
            let (welfare, bundles) = slot.expect("at least one partition");
            OptResult {
                p,
                alloc: Allocation::new(bundles),
                welfare,
            }
        })
        .collect())
}

/// True when the optimal average welfare is at least the optimal p-mean
/// welfare (up to [`EPS`]) for every exponent in `grid`.
pub fn check_monotonicity(inst: &Instance, grid: &[Exponent], budget: u64) -> Result<bool> {
    let mut ps = vec![Exponent::SOCIAL];
    ps.extend_from_slice(grid);
    let opts = p_opt_brute_many(inst, &ps, budget)?;
    let social = opts[0].welfare;
    Ok(opts[1..].iter().all(|o| o.welfare <= social + EPS))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructuralCheck {
    pub holds: bool,
    /// Bundles of the optimum worth more than `11.33 * f_value`.
    pub heavy_bundles: usize,
    pub optimum: OptResult,
}

impl StructuralCheck {
    /// No bundle met the premise, so the check held trivially.
    pub fn vacuous(&self) -> bool {
        self.heavy_bundles == 0
    }
}

/// Every bundle of a brute-force p-optimal allocation worth more than
/// `11.33 * f_value` must contain a single good worth at least `1/40` of the
/// bundle.
///
/// Applies to `p < 0.4` (including `0` and `-inf`).
pub fn check_structural_lemma(inst: &Instance, p: Exponent, f_value: f64, budget: u64) -> Result<StructuralCheck> {
    if let Exponent::Finite(x) = p {
        if x >= 0.4 {
            return Err(Error::invalid(format!(
                "the heavy-bundle property is stated for p < 0.4, got {x}"
            )));
        }
    }
    let optimum = p_opt_brute(inst, p, budget)?;
    let v = &inst.valuation;
    let mut heavy_bundles = 0;
    let mut holds = true;
    for &bundle in &optimum.alloc.bundles {
        let value = v.value(bundle);
        if value > CONSTANTS.high_bundle_factor * f_value {
            heavy_bundles += 1;
            let witness = bundle
                .iter()
                .any(|g| v.good_value(g) >= value / CONSTANTS.approx_factor - EPS);
            holds &= witness;
        }
    }
    Ok(StructuralCheck {
        holds,
        heavy_bundles,
        optimum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swmax::DEFAULT_BUDGET;
    use crate::valuations::{GoodSet, Valuation};

    fn w10111() -> Instance {
        Instance::new(2, Valuation::additive(vec![10.0, 1.0, 1.0, 1.0]).unwrap()).unwrap()
    }

    #[test]
    fn single_agent() {
        let inst = Instance::new(1, Valuation::additive(vec![1.0, 2.0]).unwrap()).unwrap();
        for p in [Exponent::NegInfinity, Exponent::NASH, Exponent::SOCIAL] {
            let o = p_opt_brute(&inst, p, DEFAULT_BUDGET).unwrap();
            assert_eq!(o.welfare, 3.0);
        }
    }

    #[test]
    fn egalitarian_optimum() {
        let o = p_opt_brute(&w10111(), Exponent::NegInfinity, DEFAULT_BUDGET).unwrap();
        assert_eq!(o.welfare, 3.0);
        assert_eq!(
            o.alloc.bundles,
            vec![GoodSet::singleton(0), [1, 2, 3].into_iter().collect()]
        );
    }

    #[test]
    fn social_optimum() {
        let o = p_opt_brute(&w10111(), Exponent::SOCIAL, DEFAULT_BUDGET).unwrap();
        assert_eq!(o.welfare, 6.5);
    }

    #[test]
    fn many_matches_single() {
        let inst = w10111();
        let ps = [
            Exponent::NegInfinity,
            Exponent::Finite(-1.0),
            Exponent::NASH,
            Exponent::SOCIAL,
        ];
        let many = p_opt_brute_many(&inst, &ps, DEFAULT_BUDGET).unwrap();
        for (o, p) in many.iter().zip(ps) {
            assert_eq!(o, &p_opt_brute(&inst, p, DEFAULT_BUDGET).unwrap());
        }
    }

    #[test]
    fn monotonicity_trivial_cases() {
        let grid = [
            Exponent::NegInfinity,
            Exponent::Finite(-1.0),
            Exponent::NASH,
            Exponent::Finite(0.5),
        ];
        let inst = Instance::new(1, Valuation::xos(vec![vec![1.0, 2.0], vec![3.0, 0.0]]).unwrap()).unwrap();
        assert!(check_monotonicity(&inst, &grid, DEFAULT_BUDGET).unwrap());
        assert!(check_monotonicity(&w10111(), &grid, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn structural_vacuous_premise() {
        let inst = w10111();
        let c = check_structural_lemma(&inst, Exponent::Finite(-1.0), 6.5, DEFAULT_BUDGET).unwrap();
        assert!(c.holds && c.vacuous());
    }

    #[test]
    fn structural_dominant_good() {
        // F is chosen small enough that the dominant bundle is heavy
        let inst = Instance::new(2, Valuation::additive(vec![100.0, 1e-3, 1e-3, 1e-3]).unwrap()).unwrap();
        let c = check_structural_lemma(&inst, Exponent::Finite(-1.0), 1.0, DEFAULT_BUDGET).unwrap();
        assert!(c.holds);
        assert_eq!(c.heavy_bundles, 1);
    }

    #[test]
    fn structural_detects_missing_witness() {
        // 41 equal goods in one heavy bundle: no single good is worth 1/40
        let inst = Instance::new(1, Valuation::additive(vec![1.0; 41]).unwrap()).unwrap();
        let c = check_structural_lemma(&inst, Exponent::NASH, 1.0, DEFAULT_BUDGET).unwrap();
        assert!(!c.holds);
    }

    #[test]
    fn structural_rejects_large_p() {
        assert!(check_structural_lemma(&w10111(), Exponent::Finite(0.5), 1.0, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn budget() {
        let inst = Instance::new(3, Valuation::additive(vec![1.0; 16]).unwrap()).unwrap();
        assert!(matches!(
            p_opt_brute(&inst, Exponent::SOCIAL, DEFAULT_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}

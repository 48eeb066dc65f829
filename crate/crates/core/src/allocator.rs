//! The two-phase allocation algorithm.
//!
//! Phase one ([`alg`]) walks the goods in non-increasing order of value and
//! hands the current top good to an agent as a singleton for as long as it is
//! worth at least `F / 3.53`, where `F` is the social-welfare estimate of the
//! instance that is still unallocated. Phase two ([`alg_low`]) takes a
//! near-optimal social-welfare allocation of what is left and re-cuts its
//! valuable bundles into one bundle per remaining agent, each worth at least
//! `F / 20`.
//!
//! For an identical subadditive valuation and a backend with
//! `F >= OPT_1 / 2`, the combined allocation has p-mean welfare at least
//! `1/40` of the optimum simultaneously for every `p <= 1`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::means::Allocation;
use crate::swmax::{sw_estimate_on, SwBackend, SwEstimate};
use crate::valuations::{GoodSet, Valuation};
use crate::EPS;

/// Numeric constants of the algorithm and its guarantee.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlgConstants {
    /// A good is "high value" when worth at least `F / phase1_divisor`.
    pub phase1_divisor: f64,
    /// Phase two fills a bundle until it would reach `alglow_fraction * F`.
    pub alglow_fraction: f64,
    pub approx_factor: f64,
    /// Bundles of an optimal allocation above `high_bundle_factor * F` hold a
    /// good worth `1/approx_factor` of the bundle.
    pub high_bundle_factor: f64,
    /// Every phase-two bundle is worth at least `F / extraction_floor_divisor`.
    pub extraction_floor_divisor: f64,
    pub combined_divisor: f64,
}

pub const CONSTANTS: AlgConstants = AlgConstants {
    phase1_divisor: 3.53,
    alglow_fraction: 1.0 / 3.0,
    approx_factor: 40.0,
    high_bundle_factor: 11.33,
    extraction_floor_divisor: 20.0,
    combined_divisor: 7.06,
};

impl AlgConstants {
    /// The relations the guarantee relies on.
    pub fn consistent(&self) -> bool {
        self.phase1_divisor * self.high_bundle_factor <= self.approx_factor
            && (self.combined_divisor - 2.0 * self.phase1_divisor).abs() < 1e-12
            && self.alglow_fraction - 1.0 / self.phase1_divisor >= 1.0 / self.extraction_floor_divisor
    }
}

/// What the algorithm did, for reports and for replaying its guarantees.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AlgTrace {
    /// Number of goods handed out as singletons in phase one.
    pub k: usize,
    /// The singleton goods in assignment order; agent `t` received the `t`-th.
    pub singleton_goods: Vec<usize>,
    /// `F` of each instance the phase-one threshold was tested against, in
    /// order. `f_values[t]` is `F` of the instance left after `t` singletons.
    pub f_values: Vec<f64>,
    /// `F` of the instance handed to phase two.
    pub phase2_f: f64,
    /// Bundles produced by phase two, for agents `k..n`.
    pub phase2_bundles: Vec<GoodSet>,
}

/// Goods sorted by non-increasing singleton value, ties by ascending index.
pub fn goods_by_value(v: &Valuation, goods: GoodSet) -> Vec<usize> {
    let mut order: Vec<(usize, f64)> = goods.iter().map(|g| (g, v.good_value(g))).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    order.into_iter().map(|(g, _)| g).collect()
}

/// Runs both phases and returns the allocation with its trace.
///
/// ```
/// use pmean::allocator::alg;
/// use pmean::instance::Instance;
/// use pmean::swmax::SwBackend;
/// use pmean::valuations::Valuation;
///
/// let inst = Instance::new(2, Valuation::additive(vec![10.0, 1.0, 1.0, 1.0])?)?;
/// let (alloc, trace) = alg(&inst, SwBackend::exact())?;
/// assert_eq!(trace.singleton_goods, vec![0]);
/// assert_eq!(alloc.bundle_values(&inst.valuation), vec![10.0, 3.0]);
/// # Ok::<(), pmean::Error>(())
/// ```
pub fn alg(inst: &Instance, backend: SwBackend) -> Result<(Allocation, AlgTrace)> {
    let v = &inst.valuation;
    let mut goods = inst.all_goods();
    let mut agents = inst.n;
    let mut trace = AlgTrace::default();
    let mut bundles = Vec::with_capacity(inst.n);
    let mut pending: Option<SwEstimate> = None;

    for g in goods_by_value(v, goods) {
        // Stop before the last agent would be consumed with goods left over,
        // and do not hand out worthless singletons.
        if agents == 1 {
            break;
        }
        let value = v.good_value(g);
        if value <= 0.0 {
            break;
        }
        let estimate = sw_estimate_on(v, goods, agents, backend)?;
        trace.f_values.push(estimate.f_value);
        if value < estimate.f_value / CONSTANTS.phase1_divisor - EPS {
            pending = Some(estimate);
            break;
        }
        bundles.push(GoodSet::singleton(g));
        trace.singleton_goods.push(g);
        goods.remove(g);
        agents -= 1;
    }
    trace.k = trace.singleton_goods.len();

    let estimate = match pending {
        Some(e) => e,
        None => sw_estimate_on(v, goods, agents, backend)?,
    };
    trace.phase2_f = estimate.f_value;
    let low = fill_bundles(v, goods, estimate)?;
    trace.phase2_bundles = low.clone();
    bundles.extend(low);
    Ok((Allocation::new(bundles), trace))
}

/// Output of [`alg_low`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowPhase {
    pub bundles: Vec<GoodSet>,
    /// `F` of the instance the bundles were cut for.
    pub f_value: f64,
}

/// Phase two on the whole instance.
pub fn alg_low(inst: &Instance, backend: SwBackend) -> Result<LowPhase> {
    alg_low_on(&inst.valuation, inst.all_goods(), inst.n, backend)
}

/// Phase two on the sub-instance made of `goods` and `agents` agents.
///
/// Every good must be worth at most `F / 3.53`; otherwise, or if the fill
/// loop runs out of source bundles (possible only for a valuation that is not
/// subadditive), the result is [`Error::PreconditionViolated`].
pub fn alg_low_on(v: &Valuation, goods: GoodSet, agents: usize, backend: SwBackend) -> Result<LowPhase> {
    let estimate = sw_estimate_on(v, goods, agents, backend)?;
    let f_value = estimate.f_value;
    let cap = f_value / CONSTANTS.phase1_divisor;
    // a lone agent takes everything, whatever the goods are worth
    let oversized = goods.iter().find(|&g| v.good_value(g) > cap + EPS);
    if let Some(g) = oversized.filter(|_| agents > 1) {
        return Err(Error::PreconditionViolated(format!(
            "good {g} worth {} exceeds F/{} = {cap}",
            v.good_value(g),
            CONSTANTS.phase1_divisor
        )));
    }
    let bundles = fill_bundles(v, goods, estimate)?;
    Ok(LowPhase { bundles, f_value })
}

/// The good-by-good fill loop over the bundles of `estimate`.
fn fill_bundles(v: &Valuation, goods: GoodSet, estimate: SwEstimate) -> Result<Vec<GoodSet>> {
    let agents = estimate.alloc.num_agents();
    let threshold = CONSTANTS.alglow_fraction * estimate.f_value;
    let below = |x: f64| x < threshold - EPS;

    // Source bundles by non-increasing value; the stable sort keeps the
    // original order among ties.
    let mut sources: Vec<(GoodSet, f64)> = estimate.alloc.bundles.iter().map(|&s| (s, v.value(s))).collect();
    sources.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal));
    let mut sources: Vec<GoodSet> = sources.into_iter().map(|(s, _)| s).collect();

    let mut out = vec![GoodSet::empty(); agents];
    let (mut i, mut a) = (0, 0);
    while a + 1 < agents {
        let Some(source) = sources.get_mut(i) else {
            return Err(Error::PreconditionViolated(format!(
                "ran out of source bundles after filling {a} of {} bundles; \
                 some good is worth more than F/{}",
                agents - 1,
                CONSTANTS.phase1_divisor
            )));
        };
        match source.first() {
            Some(g) if below(v.value(out[a].with(g))) => {
                out[a].insert(g);
                source.remove(g);
            }
            // With F = 0 an empty source can be reached; nothing fits then.
            _ => a += 1,
        }
        if below(v.value(*source)) {
            i += 1;
        }
    }
    let assigned = out[..agents - 1].iter().fold(GoodSet::empty(), |acc, &b| acc.union(b));
    out[agents - 1] = out[agents - 1].union(goods.difference(assigned));
    Ok(out)
}

/// Peels sub-bundles off `set`, each worth at least `f / 20`.
///
/// Goods are moved one at a time (ascending index) into a fresh sub-bundle
/// until the next good would push it above `f / 3`; that sub-bundle is cut
/// off and the process repeats while the remainder is worth more than `f / 3`.
/// Requires `v(set) >= f / 3` and every good worth at most `f / 3.53`. The
/// number of sub-bundles is at least `3 v(set) / f - 1`.
pub fn extract_subbundles(set: GoodSet, v: &Valuation, f: f64) -> Result<Vec<GoodSet>> {
    let third = CONSTANTS.alglow_fraction * f;
    let good_cap = f / CONSTANTS.phase1_divisor;
    if f.is_nan() || f <= 0.0 {
        return Err(Error::PreconditionViolated(format!("F must be positive, got {f}")));
    }
    if v.value(set) < third - EPS {
        return Err(Error::PreconditionViolated(format!(
            "set worth {} is below F/3 = {third}",
            v.value(set)
        )));
    }
    if let Some(g) = set.iter().find(|&g| v.good_value(g) > good_cap + EPS) {
        return Err(Error::PreconditionViolated(format!(
            "good {g} worth {} exceeds F/{} = {good_cap}",
            v.good_value(g),
            CONSTANTS.phase1_divisor
        )));
    }
    let mut rest = set;
    let mut pieces = Vec::new();
    while v.value(rest) > third + EPS {
        let mut piece = GoodSet::empty();
        for g in rest.iter() {
            if v.value(piece.with(g)) > third + EPS {
                break;
            }
            piece.insert(g);
        }
        // A remainder worth more than F/3 cannot fit entirely under F/3.
        debug_assert!(piece != rest);
        rest = rest.difference(piece);
        pieces.push(piece);
    }
    Ok(pieces)
}

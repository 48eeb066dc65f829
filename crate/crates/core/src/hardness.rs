//! Gap-3DM gadgets: the reduction showing p-mean welfare maximization is
//! APX-hard even with demand queries.
//!
//! A 3-dimensional matching instance has vertex blocks `X = 0..q`,
//! `Y = q..2q`, `Z = 2q..3q` and hyperedges with one vertex in each block.
//! The reduction creates one good per vertex and `q` agents sharing
//! `v(S) = max_e |S ∩ e|`, an XOS valuation with one 0/1 clause per edge.
//! A perfect matching gives every agent a bundle worth 3; if every matching
//! has at most `alpha * q` edges, no allocation has average value above
//! `2 + alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::means::{Allocation, Exponent};
use crate::oracle::p_opt_brute_many;
use crate::rng::SeededRng;
use crate::valuations::{GoodSet, Valuation, MAX_GOODS};
use crate::EPS;

/// Largest edge count for [`max_matching_brute`].
pub const MAX_BRUTE_EDGES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap3dmInstance {
    pub q: usize,
    pub hyperedges: Vec<[usize; 3]>,
}

impl Gap3dmInstance {
    pub fn new(q: usize, hyperedges: Vec<[usize; 3]>) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("3DM instance needs q >= 1"));
        }
        if 3 * q > MAX_GOODS {
            return Err(Error::SizeLimitExceeded {
                what: "3DM vertices",
                limit: MAX_GOODS,
                got: 3 * q,
            });
        }
        if hyperedges.is_empty() {
            return Err(Error::invalid("3DM instance needs at least one hyperedge"));
        }
        for (i, e) in hyperedges.iter().enumerate() {
            let ok = e[0] < q && (q..2 * q).contains(&e[1]) && (2 * q..3 * q).contains(&e[2]);
            if !ok {
                return Err(Error::invalid(format!(
                    "hyperedge {i} = {e:?} must take one vertex from each of 0..{q}, {q}..{}, {}..{}",
                    2 * q,
                    2 * q,
                    3 * q
                )));
            }
        }
        Ok(Gap3dmInstance { q, hyperedges })
    }

    pub fn edge_set(&self, i: usize) -> GoodSet {
        self.hyperedges[i].iter().copied().collect()
    }
}

/// Indices of pairwise vertex-disjoint hyperedges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matching(pub Vec<usize>);

impl Matching {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_valid(&self, g: &Gap3dmInstance) -> bool {
        let mut used = GoodSet::empty();
        for &i in &self.0 {
            if i >= g.hyperedges.len() {
                return false;
            }
            let e = g.edge_set(i);
            if !e.is_disjoint(used) {
                return false;
            }
            used = used.union(e);
        }
        true
    }
}

/// `q` agents, `3q` goods, one 0/1 XOS clause per hyperedge.
pub fn reduce(g: &Gap3dmInstance) -> Instance {
    let m = 3 * g.q;
    let clauses = g
        .hyperedges
        .iter()
        .map(|e| {
            let mut w = vec![0.0; m];
            for &j in e {
                w[j] = 1.0;
            }
            w
        })
        .collect();
    let v = Valuation::xos(clauses).expect("0/1 clauses are valid");
    Instance::new(g.q, v).expect("q >= 1")
}

/// Agent `i` receives the three goods of the `i`-th matched edge.
pub fn matching_to_allocation(g: &Gap3dmInstance, matched: &Matching) -> Result<Allocation> {
    if matched.len() != g.q {
        return Err(Error::NotPerfect {
            size: matched.len(),
            q: g.q,
        });
    }
    if !matched.is_valid(g) {
        return Err(Error::invalid("matched edges overlap or are out of range"));
    }
    let mut bundles: Vec<GoodSet> = matched.0.iter().map(|&i| g.edge_set(i)).collect();
    let covered = bundles.iter().fold(GoodSet::empty(), |acc, &b| acc.union(b));
    let last = g.q - 1;
    bundles[last] = bundles[last].union(GoodSet::full(3 * g.q).difference(covered));
    Ok(Allocation::new(bundles))
}

/// Maximum matching by enumerating every subset of edges; among maximum
/// matchings the one with the smallest edge bitmask is returned.
pub fn max_matching_brute(g: &Gap3dmInstance) -> Result<Matching> {
    let t = g.hyperedges.len();
    if t > MAX_BRUTE_EDGES {
        return Err(Error::SizeLimitExceeded {
            what: "hyperedges for brute-force matching",
            limit: MAX_BRUTE_EDGES,
            got: t,
        });
    }
    let edges: Vec<GoodSet> = (0..t).map(|i| g.edge_set(i)).collect();
    let mut best = 0u32;
    let mut best_size = 0;
    for mask in 1u32..(1u32 << t) {
        let size = mask.count_ones();
        if size <= best_size {
            continue;
        }
        let mut used = GoodSet::empty();
        let disjoint = (0..t).filter(|i| mask & (1 << i) != 0).all(|i| {
            let ok = edges[i].is_disjoint(used);
            used = used.union(edges[i]);
            ok
        });
        if disjoint {
            best = mask;
            best_size = size;
        }
    }
    Ok(Matching((0..t).filter(|i| best & (1 << i) != 0).collect()))
}

/// If every matching has at most `alpha * q` edges, checks that the
/// brute-force optimum of the reduced instance is at most `2 + alpha` for
/// each exponent. Returns true without checking when the premise fails.
pub fn verify_no_side(g: &Gap3dmInstance, alpha: f64, grid: &[Exponent], budget: u64) -> Result<bool> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let matching = max_matching_brute(g)?;
    if matching.len() as f64 > alpha * g.q as f64 + EPS {
        return Ok(true);
    }
    let opts = p_opt_brute_many(&reduce(g), grid, budget)?;
    Ok(opts.iter().all(|o| o.welfare <= 2.0 + alpha + EPS))
}

fn random_edge(q: usize, rng: &mut SeededRng) -> [usize; 3] {
    [rng.below(q), q + rng.below(q), 2 * q + rng.below(q)]
}

/// An instance with a planted perfect matching plus `extra` random edges,
/// in shuffled order.
pub fn planted_yes(q: usize, extra: usize, seed: u64) -> Result<Gap3dmInstance> {
    let mut rng = SeededRng::new(seed);
    let mut ys: Vec<usize> = (0..q).collect();
    let mut zs: Vec<usize> = (0..q).collect();
    rng.shuffle(&mut ys);
    rng.shuffle(&mut zs);
    let mut edges: Vec<[usize; 3]> = (0..q).map(|i| [i, q + ys[i], 2 * q + zs[i]]).collect();
    edges.extend((0..extra).map(|_| random_edge(q, &mut rng)));
    rng.shuffle(&mut edges);
    Gap3dmInstance::new(q, edges)
}

/// An instance with no perfect matching and `edges` hyperedges.
///
/// Random edge sets are drawn (up to 64 attempts) until one has no perfect
/// matching; failing that, every edge is made to share vertex 0, which caps
/// the matching at one edge.
pub fn random_no(q: usize, edges: usize, seed: u64) -> Result<Gap3dmInstance> {
    if q < 2 {
        return Err(Error::invalid("with q = 1 every edge is a perfect matching"));
    }
    if edges == 0 || edges > MAX_BRUTE_EDGES {
        return Err(Error::invalid(format!(
            "edge count must lie in 1..={MAX_BRUTE_EDGES}, got {edges}"
        )));
    }
    let mut rng = SeededRng::new(seed);
    for _ in 0..64 {
        let g = Gap3dmInstance::new(q, (0..edges).map(|_| random_edge(q, &mut rng)).collect())?;
        if max_matching_brute(&g)?.len() < q {
            return Ok(g);
        }
    }
    let star = (0..edges).map(|_| {
        let mut e = random_edge(q, &mut rng);
        e[0] = 0;
        e
    });
    Gap3dmInstance::new(q, star.collect())
}

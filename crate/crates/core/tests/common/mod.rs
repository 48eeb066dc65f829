//! Independent reference implementations used by the integration tests.
//! None of them share code with the library beyond value queries.

#![allow(dead_code)]

use pmean::valuations::Valuation;
use pmean::GoodSet;

/// Power mean straight from the definition; positive inputs, `p != 0`.
pub fn naive_power_mean(xs: &[f64], p: f64) -> f64 {
    let n = xs.len() as f64;
    (xs.iter().map(|x| x.powf(p)).sum::<f64>() / n).powf(1.0 / p)
}

pub fn naive_geometric_mean(xs: &[f64]) -> f64 {
    xs.iter().product::<f64>().powf(1.0 / xs.len() as f64)
}

/// Largest `v(S) - p(S)` over all subsets, by enumeration.
pub fn brute_demand_utility(v: &Valuation, prices: &[f64]) -> f64 {
    let m = v.num_goods();
    (0..1u64 << m)
        .map(|bits| {
            let s = GoodSet::from_bits(bits);
            v.value(s) - s.iter().map(|g| prices[g]).sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Every assignment of `m` goods to `n` agents, as bundle masks.
pub fn all_assignments(m: usize, n: usize) -> Vec<Vec<u64>> {
    fn go(good: usize, m: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if good == m {
            out.push(cur.clone());
            return;
        }
        for a in 0..cur.len() {
            cur[a] |= 1 << good;
            go(good + 1, m, cur, out);
            cur[a] &= !(1 << good);
        }
    }
    let mut out = Vec::new();
    go(0, m, &mut vec![0; n], &mut out);
    out
}

/// Largest average bundle value over every assignment.
pub fn brute_social_optimum(v: &Valuation, n: usize) -> f64 {
    all_assignments(v.num_goods(), n)
        .iter()
        .map(|a| a.iter().map(|&b| v.value(GoodSet::from_bits(b))).sum::<f64>() / n as f64)
        .fold(f64::NEG_INFINITY, f64::max)
}

//! Numeric checks of the scalar inequalities behind the guarantee.
//!
//! With `a = 1/2 - 1/40`, `b = 1/2` and `c = 2/11.33`, the function
//! `f(p) = a^p + b^p - 1 - c^p` must be nonpositive for `p < 0` and
//! nonnegative for `0 < p < 0.4`; it crosses zero again at a root in
//! `(0.4, 0.41)`. For `p` in `[0.4, 1]` the guarantee instead needs
//! `2 * 7.06^p <= 40^p`, `40^p > 2` and `(x + y)^p <= x^p + y^p`.
//!
//! These are checked on dense grids rather than proven.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IneqConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub const INEQ: IneqConstants = IneqConstants {
    a: 1.0 / 2.0 - 1.0 / 40.0,
    b: 1.0 / 2.0,
    c: 2.0 / 11.33,
};

pub const SIGN_TOLERANCE: f64 = 1e-12;

/// `a^p + b^p - 1 - c^p`.
pub fn f(p: f64) -> f64 {
    INEQ.a.powf(p) + INEQ.b.powf(p) - 1.0 - INEQ.c.powf(p)
}

/// Analytic derivative of [`f`].
pub fn f_prime(p: f64) -> f64 {
    let IneqConstants { a, b, c } = INEQ;
    a.powf(p) * a.ln() + b.powf(p) * b.ln() - c.powf(p) * c.ln()
}

/// Points `start + i * step` for `i = 0, 1, ...` while inside `[start, end]`
/// (or `[start, end)` when `include_end` is false).
pub fn grid(start: f64, end: f64, step: f64, include_end: bool) -> Vec<f64> {
    assert!(step > 0.0, "grid step must be positive");
    let count = ((end - start) / step).round() as i64;
    (0..=count.max(0))
        .map(|i| start + i as f64 * step)
        .filter(|&p| {
            if include_end {
                p <= end + step * 1e-9
            } else {
                p < end - step * 1e-9
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangeReport {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub min: f64,
    pub max: f64,
    /// Grid points where the expected sign fails beyond [`SIGN_TOLERANCE`].
    pub failures: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignRangeReport {
    /// `f <= 0` on `[neg_grid_lo, 0)`.
    pub negative: RangeReport,
    /// `f >= 0` on `(0, 0.4]`.
    pub positive: RangeReport,
    pub f_at_zero: f64,
    /// Largest amount by which either expected sign is violated (0 if none).
    pub worst_violation: f64,
}

impl SignRangeReport {
    pub fn ok(&self) -> bool {
        self.negative.failures.is_empty() && self.positive.failures.is_empty() && self.f_at_zero == 0.0
    }
}

fn range_report(points: &[f64], lo: f64, hi: f64, violation: impl Fn(f64) -> f64) -> (RangeReport, f64) {
    let values: Vec<f64> = points.iter().map(|&p| f(p)).collect();
    let failures = points
        .iter()
        .zip(&values)
        .filter(|(_, &y)| violation(y) > SIGN_TOLERANCE)
        .map(|(&p, _)| p)
        .collect();
    let worst = values.iter().map(|&y| violation(y)).fold(0.0, f64::max);
    let report = RangeReport {
        lo,
        hi,
        points: points.len(),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        failures,
    };
    (report, worst)
}

/// Checks `f <= 0` on `[neg_grid_lo, 0)` with spacing `neg_step` and
/// `f >= 0` on `(0, 0.4]` with spacing `pos_step`.
pub fn check_sign_ranges(neg_grid_lo: f64, neg_step: f64, pos_step: f64) -> SignRangeReport {
    let neg_points = grid(neg_grid_lo, 0.0, neg_step, false);
    let pos_points: Vec<f64> = grid(0.0, 0.4, pos_step, true)
        .into_iter()
        .filter(|&p| p > 0.0)
        .collect();
    let (negative, worst_neg) = range_report(&neg_points, neg_grid_lo, 0.0, |y| y);
    let (positive, worst_pos) = range_report(&pos_points, 0.0, 0.4, |y| -y);
    SignRangeReport {
        negative,
        positive,
        f_at_zero: f(0.0),
        worst_violation: worst_neg.max(worst_pos),
    }
}

/// The positive root of `f`, by bisection on `[0.4, 0.41]`.
pub fn locate_root() -> Result<f64> {
    let (mut lo, mut hi) = (0.4_f64, 0.41_f64);
    if !(f(lo) > 0.0 && f(hi) < 0.0) {
        return Err(Error::BracketInvalid { lo, hi });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let y = f(mid);
        if y.abs() < 1e-14 || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if y > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpperRangeReport {
    pub points: usize,
    /// Smallest `40^p - 2 * 7.06^p` seen; must be `>= 0`.
    pub min_gap_combined: f64,
    /// Smallest `40^p - 2` seen; must be `> 0`.
    pub min_gap_two: f64,
    /// Largest `(x+y)^p - x^p - y^p` over the sampled pairs; must be `<= 0`.
    pub max_power_excess: f64,
    pub failures: Vec<f64>,
}

impl UpperRangeReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the inequalities used for `p` in `[0.4, 1]` on a grid of spacing
/// `step`, with `(x + y)^p <= x^p + y^p` sampled on a fixed set of pairs.
pub fn check_upper_range_constants(step: f64) -> UpperRangeReport {
    const SAMPLES: [f64; 9] = [0.0, 1e-3, 0.1, 0.5, 1.0, 2.0, 7.06, 40.0, 1e3];
    let points = grid(0.4, 1.0, step, true);
    let mut report = UpperRangeReport {
        points: points.len(),
        min_gap_combined: f64::INFINITY,
        min_gap_two: f64::INFINITY,
        max_power_excess: f64::NEG_INFINITY,
        failures: Vec::new(),
    };
    for &p in &points {
        let gap_combined = 40f64.powf(p) - 2.0 * 7.06f64.powf(p);
        let gap_two = 40f64.powf(p) - 2.0;
        let excess = SAMPLES
            .iter()
            .flat_map(|&x| SAMPLES.iter().map(move |&y| (x + y).powf(p) - x.powf(p) - y.powf(p)))
            .fold(f64::NEG_INFINITY, f64::max);
        report.min_gap_combined = report.min_gap_combined.min(gap_combined);
        report.min_gap_two = report.min_gap_two.min(gap_two);
        report.max_power_excess = report.max_power_excess.max(excess);
        if gap_combined < 0.0 || gap_two <= 0.0 || excess > SIGN_TOLERANCE {
            report.failures.push(p);
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremaReport {
    /// Points where the finite-difference derivative changes sign.
    pub sign_changes: Vec<f64>,
    /// Sign changes from `-` to `+`, i.e. local minima. Must be empty.
    pub minima: Vec<f64>,
}

/// Scans the central-difference derivative of `f` on `[lo, hi]` and reports
/// every sign change; derivatives within `tol` of zero carry no sign.
pub fn check_extrema_are_maxima(lo: f64, hi: f64, step: f64, tol: f64) -> ExtremaReport {
    let h = step / 2.0;
    let mut last_sign = 0i8;
    let mut report = ExtremaReport {
        sign_changes: Vec::new(),
        minima: Vec::new(),
    };
    for p in grid(lo, hi, step, true) {
        let d = (f(p + h) - f(p - h)) / (2.0 * h);
        let sign = if d > tol {
            1
        } else if d < -tol {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                report.sign_changes.push(p);
                if sign > 0 {
                    report.minima.push(p);
                }
            }
            last_sign = sign;
        }
    }
    report
}

/// Sign changes of `f` itself on a grid, as the left endpoints of the
/// intervals that contain them.
pub fn sign_changes_of_f(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let points = grid(lo, hi, step, true);
    points
        .windows(2)
        .filter(|w| {
            let (y0, y1) = (f(w[0]), f(w[1]));
            (y0 > 0.0 && y1 < 0.0) || (y0 < 0.0 && y1 > 0.0)
        })
        .map(|w| w[0])
        .collect()
}

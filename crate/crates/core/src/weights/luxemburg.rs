//! Luxemburg norms `||f||_{A,Q} = inf { l > 0 : avg_Q A(|f| / l) <= 1 }`.

use crate::cube::DyadicCube;
use crate::error::Result;
use crate::step::StepFunction;

use super::young::YoungFunction;

const REL_TOL: f64 = 1e-12;

/// Luxemburg norm of `f` over `q`. Closed form for the power family,
/// bisection otherwise.
pub fn luxemburg_norm(a: &YoungFunction, f: &StepFunction, q: &DyadicCube) -> Result<f64> {
    let vals = f.values_in(q)?;
    Ok(luxemburg_of(a, &vals, q.measure()))
}

/// The bisection path, available for every Young function.
pub fn luxemburg_norm_bisect(a: &YoungFunction, f: &StepFunction, q: &DyadicCube) -> Result<f64> {
    let vals = f.values_in(q)?;
    Ok(bisect(a, &vals, q.measure()))
}

pub(crate) fn luxemburg_of(a: &YoungFunction, vals: &[(f64, f64)], total: f64) -> f64 {
    match a {
        YoungFunction::Power { r, scale } => {
            let s: f64 = vals.iter().map(|&(v, m)| v.abs().powf(*r) * m).sum::<f64>() / total;
            (scale * s).powf(1.0 / r)
        }
        _ => bisect(a, vals, total),
    }
}

fn bisect(a: &YoungFunction, vals: &[(f64, f64)], total: f64) -> f64 {
    let top = vals.iter().fold(0.0f64, |m, &(v, _)| m.max(v.abs()));
    if top == 0.0 {
        return 0.0;
    }
    let avg = |l: f64| vals.iter().map(|&(v, m)| a.eval(v.abs() / l) * m).sum::<f64>() / total;
    let mut hi = top;
    while avg(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while avg(lo) <= 1.0 && lo > f64::MIN_POSITIVE {
        lo /= 2.0;
    }
    // avg(lo) > 1 >= avg(hi)
    while hi - lo > REL_TOL * 0.25 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if avg(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

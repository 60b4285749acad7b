//! The function `f = sum_{j=0}^{J} chi_{[2^{-2j-1}, 2^{-2j})}`, whose square
//! function grows like `p^{1/2}` relative to `f` in `L^p`.

use serde::Serialize;

use super::{exponent_fit, Fit};
use crate::cube::DyadicCube;
use crate::error::{check_range, Result};
use crate::operators::square_function_squared;
use crate::step::StepFunction;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalReport {
    pub j: u32,
    /// `averages[k]` is the mean of `f` over `[0, 2^{-k})`, `k = 0..=2J+2`.
    pub averages: Vec<f64>,
    /// `shell_square[k]` is `S_d f(x)^2` on `[2^{-k-1}, 2^{-k})`, `k = 0..=2J+1`.
    pub shell_square: Vec<f64>,
    pub ps: Vec<f64>,
    pub f_norms: Vec<f64>,
    pub sd_norms: Vec<f64>,
    /// Least squares fit of `log(||S_d f||_p / ||f||_p)` against `log p`.
    pub fit: Fit,
}

/// `f` on shells `[2^{-k-1}, 2^{-k})`, `k <= 2J+1`, and `[0, 2^{-2J-2})`.
pub fn extremal_function(j: u32) -> Result<StepFunction> {
    check_range("J", j as f64, (2..=30).contains(&j), "2 <= J <= 30")?;
    let mut leaves = Vec::with_capacity(2 * j as usize + 3);
    for k in 0..=2 * j + 1 {
        leaves.push((DyadicCube::interval(k + 1, 1)?, if k % 2 == 0 { 1.0 } else { 0.0 }));
    }
    leaves.push((DyadicCube::interval(2 * j + 2, 0)?, 0.0));
    StepFunction::from_leaves(1, &leaves)
}

pub fn extremal_sd(j: u32, ps: &[f64]) -> Result<ExtremalReport> {
    for &p in ps {
        check_range("p", p, p >= 1.0 && p.is_finite(), "1 <= p < inf")?;
    }
    let f = extremal_function(j)?;
    let averages = (0..=2 * j + 2).map(|k| f.cube_average(&DyadicCube::interval(k, 0)?)).collect::<Result<Vec<_>>>()?;
    let s2 = square_function_squared(&f)?;
    let shell_square =
        (0..=2 * j + 1).map(|k| s2.cube_average(&DyadicCube::interval(k + 1, 1)?)).collect::<Result<Vec<_>>>()?;
    let f_norms: Vec<f64> = ps.iter().map(|&p| f.lp_norm(p)).collect();
    let sd = s2.map(f64::sqrt)?;
    let sd_norms: Vec<f64> = ps.iter().map(|&p| sd.lp_norm(p)).collect();
    let pts: Vec<(f64, f64)> =
        ps.iter().zip(f_norms.iter().zip(&sd_norms)).map(|(p, (a, b))| (p.ln(), (b / a).ln())).collect();
    let fit = exponent_fit(&pts)?;
    Ok(ExtremalReport { j, averages, shell_square, ps: ps.to_vec(), f_norms, sd_norms, fit })
}

//! Desk-scale experiments: exponent regressions over weight families, the
//! square-function extremal example, constant calibration and two-weight
//! stability runs.

mod calibrate;
mod extremal;
mod sweep;
mod two_weight;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::step::StepFunction;

pub use calibrate::{lemma_constant_calibration, Calibration, CalibrationTarget};
pub use extremal::{extremal_function, extremal_sd, ExtremalReport};
pub use sweep::{sharpness_sweep, Buckley, SweepFamily, SweepOperator, SweepPoint, SweepResult};
pub use two_weight::{
    log_bump_pair, two_weight_singular_check, DepthRow, PowerPair, TwoWeightOperator, TwoWeightReport,
};

/// Ordinary least squares line through `(x, y)` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn exponent_fit(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} point(s), need at least 2", points.len())));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::NonFinite(if x.is_finite() { y } else { x }));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let scale = points.iter().fold(1.0f64, |m, p| m.max(p.0.abs()));
    if sxx <= (1e-12 * scale).powi(2) * n {
        return Err(Error::DegenerateFit("abscissae do not vary".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(Fit { slope, intercept, r2 })
}

/// Independent, reproducible stream number `index` of `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Random adaptive tree of depth at most `max_depth` with values uniform in
/// `[-1, 1]`; about a fifth of the leaves are set to zero so that ties and
/// flat regions occur.
pub fn random_step_function<R: Rng>(rng: &mut R, dim: usize, max_depth: u32) -> Result<StepFunction> {
    StepFunction::build_adaptive(dim, |cube| {
        let split = cube.level() < max_depth && (cube.level() == 0 || rng.gen_bool(0.55));
        Ok(if split {
            None
        } else if rng.gen_bool(0.2) {
            Some(0.0)
        } else {
            Some(rng.gen_range(-1.0..=1.0))
        })
    })
}

/// Random strictly positive step function with values in `[e^{-3}, e^3]`.
pub fn random_weight<R: Rng>(rng: &mut R, dim: usize, max_depth: u32) -> Result<crate::weights::Weight> {
    let f = StepFunction::build_adaptive(dim, |cube| {
        let split = cube.level() < max_depth && (cube.level() == 0 || rng.gen_bool(0.55));
        Ok(if split { None } else { Some(rng.gen_range(-3.0f64..=3.0).exp()) })
    })?;
    crate::weights::Weight::new(f)
}

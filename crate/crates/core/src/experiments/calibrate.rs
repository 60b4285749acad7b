//! Brute-force calibration of the implicit constants in the oscillation
//! and weak-type estimates used by the one-weight proofs.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{random_step_function, stream};
use crate::cube::DyadicCube;
use crate::error::{check_range, Result};
use crate::operators::{dyadic_hilbert, square_function_squared, vector_maximal, VectorStepFunction};
use crate::oscillation::{local_mean_oscillation, weak_lp_norm};
use crate::step::StepFunction;

/// Exponent `q` used for the vector-valued target.
pub const VECTOR_Q: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationTarget {
    /// `sup_t t |{|H^d f| > t}| / ||f||_1`.
    HilbertWeakType,
    /// `lambda omega_lambda(H^d f, Q0) / avg_{parent Q0} |f|`.
    HilbertOscillation,
    /// `lambda^2 omega_lambda((S_d f)^2, Q0) / (avg_{Q0} |f|)^2`.
    SquareOscillation,
    /// `lambda^q omega_lambda((M_q f)^q, Q0) / (avg_{Q0} |f|_q)^q`.
    VectorOscillation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub target: CalibrationTarget,
    pub trials: usize,
    /// Trials with a nonzero denominator.
    pub evaluated: usize,
    pub max_ratio: f64,
}

/// Largest observed ratio over `trials` random instances on trees of depth
/// at most `depth`; instances with a vanishing denominator are skipped.
pub fn lemma_constant_calibration(
    target: CalibrationTarget,
    trials: usize,
    depth: u32,
    seed: u64,
) -> Result<Calibration> {
    check_range("trials", trials as f64, trials >= 100, "trials >= 100")?;
    check_range("depth", depth as f64, (1..=8).contains(&depth), "1 <= depth <= 8")?;
    let ratios: Vec<Option<f64>> =
        (0..trials).into_par_iter().map(|i| trial(target, depth, seed, i as u64)).collect::<Result<_>>()?;
    let evaluated = ratios.iter().flatten().count();
    let max_ratio = ratios.iter().flatten().fold(0.0f64, |m, &r| m.max(r));
    Ok(Calibration { target, trials, evaluated, max_ratio })
}

fn trial(target: CalibrationTarget, depth: u32, seed: u64, index: u64) -> Result<Option<f64>> {
    let mut rng = stream(seed, index);
    let f = random_step_function(&mut rng, 1, depth)?;
    let lambda = rng.gen_range(0.01..=0.5);
    match target {
        CalibrationTarget::HilbertWeakType => {
            let l1 = f.lp_norm(1.0);
            if l1 == 0.0 {
                return Ok(None);
            }
            let h = dyadic_hilbert(&f)?;
            Ok(Some(weak_lp_norm(&h, h.root(), 1.0)? / l1))
        }
        CalibrationTarget::HilbertOscillation => {
            let q0 = random_node(&mut rng, &f, 1);
            let parent = q0.parent().expect("level >= 1");
            let den = f.abs().cube_average(&parent)?;
            if den == 0.0 {
                return Ok(None);
            }
            let h = dyadic_hilbert(&f)?;
            Ok(Some(lambda * local_mean_oscillation(&h, &q0, lambda)? / den))
        }
        CalibrationTarget::SquareOscillation => {
            let q0 = random_node(&mut rng, &f, 0);
            let den = f.abs().cube_average(&q0)?;
            if den == 0.0 {
                return Ok(None);
            }
            let s2 = square_function_squared(&f)?;
            Ok(Some(lambda.powi(2) * local_mean_oscillation(&s2, &q0, lambda)? / den.powi(2)))
        }
        CalibrationTarget::VectorOscillation => {
            let g = random_step_function(&mut rng, 1, depth)?;
            let q0 = random_node(&mut rng, &f, 0);
            let norm = f.zip_with(&g, |a, b| (a.abs().powf(VECTOR_Q) + b.abs().powf(VECTOR_Q)).powf(1.0 / VECTOR_Q))?;
            let den = norm.cube_average(&q0)?;
            if den == 0.0 {
                return Ok(None);
            }
            let vf = VectorStepFunction::new(vec![f, g])?;
            let mq = vector_maximal(VECTOR_Q, &vf)?.map(|v| v.powf(VECTOR_Q))?;
            Ok(Some(lambda.powf(VECTOR_Q) * local_mean_oscillation(&mq, &q0, lambda)? / den.powf(VECTOR_Q)))
        }
    }
}

// A uniformly chosen tree node of level at least `min_level`, or the first
// child of the root when the tree is a single leaf.
fn random_node<R: Rng>(rng: &mut R, f: &StepFunction, min_level: u32) -> DyadicCube {
    let cands: Vec<DyadicCube> = f.nodes().iter().map(|n| *n.cube()).filter(|c| c.level() >= min_level).collect();
    if cands.is_empty() {
        return f.root().child(0);
    }
    cands[rng.gen_range(0..cands.len())]
}

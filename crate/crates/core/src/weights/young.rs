//! Young functions, their associates and the `B_p` condition.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Custom = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A Young function `A: [0, inf) -> [0, inf)`.
#[derive(Clone)]
pub enum YoungFunction {
    /// `A(t) = scale * t^r`, `r >= 1`.
    Power { r: f64, scale: f64 },
    /// `A(t) = t^r log(e + t)^a`.
    LogBump { r: f64, a: f64 },
    /// A user supplied function, checked for convexity and growth on a
    /// sample grid when constructed.
    Custom { name: String, f: Custom },
    /// `sup_s (s t - A(s))`, evaluated numerically.
    Associate(Box<YoungFunction>),
}

/// Three-valued answer of [`bp_classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BpVerdict {
    Satisfied,
    Violated,
    Inconclusive,
}

impl BpVerdict {
    pub fn holds(self) -> bool {
        self == BpVerdict::Satisfied
    }
}

/// Config-file description of a built-in Young function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum YoungDescriptor {
    Power {
        r: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Logbump {
        r: f64,
        a: f64,
    },
    Associate {
        of: Box<YoungDescriptor>,
    },
}

fn one() -> f64 {
    1.0
}

impl TryFrom<&YoungDescriptor> for YoungFunction {
    type Error = Error;

    fn try_from(d: &YoungDescriptor) -> Result<Self> {
        match d {
            YoungDescriptor::Power { r, scale } => YoungFunction::power_scaled(*r, *scale),
            YoungDescriptor::Logbump { r, a } => YoungFunction::log_bump(*r, *a),
            YoungDescriptor::Associate { of } => YoungFunction::try_from(of.as_ref())?.associate(),
        }
    }
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            YoungFunction::Power { r, scale } => write!(f, "power(r={r}, scale={scale})"),
            YoungFunction::LogBump { r, a } => write!(f, "logbump(r={r}, a={a})"),
            YoungFunction::Custom { name, .. } => write!(f, "custom({name})"),
            YoungFunction::Associate(inner) => write!(f, "associate({inner:?})"),
        }
    }
}

impl YoungFunction {
    pub fn power(r: f64) -> Result<Self> {
        Self::power_scaled(r, 1.0)
    }

    pub fn power_scaled(r: f64, scale: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 1.0) {
            return Err(Error::InvalidYoung(format!("power exponent {r} must be >= 1")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidYoung(format!("power scale {scale} must be positive")));
        }
        Ok(YoungFunction::Power { r, scale })
    }

    /// `t^r log(e+t)^a`. Requires `r > 1`, or `r = 1` with `a > 0`.
    pub fn log_bump(r: f64, a: f64) -> Result<Self> {
        if !(r.is_finite() && a.is_finite()) || r < 1.0 || (r == 1.0 && a <= 0.0) {
            return Err(Error::InvalidYoung(format!("logbump(r={r}, a={a}) is not a Young function")));
        }
        let this = YoungFunction::LogBump { r, a };
        this.check_shape()?;
        Ok(this)
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let this = YoungFunction::Custom { name: name.into(), f: Arc::new(f) };
        this.check_shape()?;
        Ok(this)
    }

    /// The associate function. Closed form for the power family; other
    /// families are evaluated numerically.
    pub fn associate(&self) -> Result<Self> {
        match self {
            YoungFunction::Power { r, scale } => {
                if *r <= 1.0 {
                    return Err(Error::InvalidYoung("the associate of a linear function is not finite".into()));
                }
                // sup_s (st - c s^r) = (r-1) c (t / (c r))^{r'}
                let rp = r / (r - 1.0);
                let c = (r - 1.0) * scale * (scale * r).powf(-rp);
                Ok(YoungFunction::Power { r: rp, scale: c })
            }
            YoungFunction::Associate(inner) => Ok(inner.as_ref().clone()),
            other => Ok(YoungFunction::Associate(Box::new(other.clone()))),
        }
    }

    /// For `t^r log(e+t)^a` with `r > 1` the associate behaves like
    /// `t^{r'} log(e+t)^{-a(r'-1)}` for large `t`.
    pub fn asymptotic_associate(&self) -> Option<Self> {
        match self {
            YoungFunction::LogBump { r, a } if *r > 1.0 => {
                let rp = r / (r - 1.0);
                Some(YoungFunction::LogBump { r: rp, a: -a * (rp - 1.0) })
            }
            YoungFunction::Power { .. } => self.associate().ok(),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            YoungFunction::Power { r, scale } => scale * t.powf(*r),
            YoungFunction::LogBump { r, a } => t.powf(*r) * (std::f64::consts::E + t).ln().powf(*a),
            YoungFunction::Custom { f, .. } => f(t),
            YoungFunction::Associate(inner) => legendre(inner, t),
        }
    }

    /// `A^{-1}(y)` by bisection on the increasing function `A`.
    pub fn inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if let YoungFunction::Power { r, scale } = self {
            return (y / scale).powf(1.0 / r);
        }
        let mut hi = 1.0;
        while self.eval(hi) < y && hi < 1e300 {
            hi *= 2.0;
        }
        let mut lo = hi / 2.0;
        while self.eval(lo) > y && lo > 1e-300 {
            lo /= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// `log A(e^u)`, computed without overflow for the built-in families.
    fn log_eval_exp(&self, u: f64) -> f64 {
        match self {
            YoungFunction::Power { r, scale } => scale.ln() + r * u,
            YoungFunction::LogBump { r, a } => {
                let t = u.exp();
                let l = if t.is_finite() { (std::f64::consts::E + t).ln() } else { u };
                r * u + a * l.ln()
            }
            _ => self.eval(u.exp()).ln(),
        }
    }

    fn check_shape(&self) -> Result<()> {
        let grid: Vec<f64> = (-40..=40).map(|k| 2f64.powf(k as f64 / 4.0)).collect();
        let vals: Vec<f64> = grid.iter().map(|&t| self.eval(t)).collect();
        if self.eval(0.0) != 0.0 {
            return Err(Error::InvalidYoung(format!("{self:?}: A(0) != 0")));
        }
        for (i, w) in vals.windows(2).enumerate() {
            if !(w[1] > w[0]) || !w[0].is_finite() {
                return Err(Error::InvalidYoung(format!("{self:?}: not strictly increasing near t = {}", grid[i])));
            }
        }
        // slopes of chords must not decrease
        let slopes: Vec<f64> = (1..grid.len()).map(|i| (vals[i] - vals[i - 1]) / (grid[i] - grid[i - 1])).collect();
        for (i, w) in slopes.windows(2).enumerate() {
            if w[1] < w[0] * (1.0 - 1e-9) {
                return Err(Error::InvalidYoung(format!("{self:?}: not convex near t = {}", grid[i + 1])));
            }
        }
        Ok(())
    }
}

/// `sup_{s >= 0} (s t - A(s))` by golden-section search on the concave
/// objective.
fn legendre(a: &YoungFunction, t: f64) -> f64 {
    let obj = |s: f64| s * t - a.eval(s);
    // bracket: the objective is eventually decreasing since A(s)/s -> inf
    let mut hi = 1.0;
    while obj(2.0 * hi) > obj(hi) && hi < 1e300 {
        hi *= 2.0;
    }
    hi *= 2.0;
    let (mut lo, mut up) = (0.0, hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = up - g * (up - lo);
    let mut x2 = lo + g * (up - lo);
    let (mut f1, mut f2) = (obj(x1), obj(x2));
    for _ in 0..120 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (up - lo);
            f2 = obj(x2);
        } else {
            up = x2;
            x2 = x1;
            f2 = f1;
            x1 = up - g * (up - lo);
            f1 = obj(x1);
        }
    }
    f1.max(f2).max(0.0)
}

/// Whether `int_1^inf A(t) t^{-p} dt/t < inf`.
///
/// Analytic for the built-in families; for custom and numerically
/// evaluated functions a tail-decay heuristic in `u = log t` is used, which
/// may return [`BpVerdict::Inconclusive`].
pub fn bp_classify(a: &YoungFunction, p: f64) -> Result<BpVerdict> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::OutOfRange { name: "p", value: p, expected: "1 < p < inf" });
    }
    Ok(match a {
        YoungFunction::Power { r, .. } => verdict(*r < p),
        YoungFunction::LogBump { r, a } => {
            if *r != p {
                verdict(*r < p)
            } else {
                verdict(*a < -1.0)
            }
        }
        YoungFunction::Associate(inner) => match inner.asymptotic_associate() {
            Some(asym) => return bp_classify(&asym, p),
            None => tail_heuristic(a, p),
        },
        YoungFunction::Custom { .. } => tail_heuristic(a, p),
    })
}

fn verdict(b: bool) -> BpVerdict {
    if b {
        BpVerdict::Satisfied
    } else {
        BpVerdict::Violated
    }
}

// g(u) = log A(e^u) - p u; B_p iff int^inf e^{g(u)} du < inf. The decay rate
// of e^g against u^{-1} decides; exponential decay shows up as a large rate.
fn tail_heuristic(a: &YoungFunction, p: f64) -> BpVerdict {
    // keep the range where A(e^u) is representable
    let pts: Vec<(f64, f64)> = (0..=64)
        .map(|k| 10.0 + 10.0 * k as f64)
        .map(|u| (u, a.log_eval_exp(u) - p * u))
        .take_while(|(_, g)| g.is_finite())
        .collect();
    if pts.len() < 8 {
        return BpVerdict::Inconclusive;
    }
    let (us, gs): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let n = us.len();
    let beta = -(gs[n - 1] - gs[n / 2]) / (us[n - 1].ln() - us[n / 2].ln());
    if beta > 1.1 {
        BpVerdict::Satisfied
    } else if beta < 0.9 {
        BpVerdict::Violated
    } else {
        BpVerdict::Inconclusive
    }
}

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;

use serde::Serialize;

use dyadic_sharp::experiments::{extremal_sd, sharpness_sweep, Fit, SweepOperator};
use dyadic_sharp::operators::*;
use dyadic_sharp::oscillation::{lerner_decompose, verify_lerner_bound, LernerDecomposition, LernerReport};
use dyadic_sharp::weights::{
    ap_constant, bmo_dyadic_norm, bp_classify, bump_constant_with_exponent, BpVerdict, YoungDescriptor,
};
use dyadic_sharp::StepFunction;

use crate::config::*;
use crate::output::{emit, write_all};
use crate::{Common, Failure};

fn domain<T>(r: dyadic_sharp::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Domain)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn check_p(p: f64) -> Result<(), Failure> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Failure::Domain(dyadic_sharp::Error::OutOfRange { name: "p", value: p, expected: "1 < p < inf" }))
    }
}

enum Symbol {
    Constant(f64),
    ByLevel(Vec<f64>),
    Table(HashMap<dyadic_sharp::DyadicCube, f64>),
}

impl Symbol {
    fn at(&self, q: &dyadic_sharp::DyadicCube) -> f64 {
        match self {
            Symbol::Constant(c) => *c,
            Symbol::ByLevel(v) => v.get(q.level() as usize).copied().unwrap_or(0.0),
            Symbol::Table(t) => t.get(q).copied().unwrap_or(0.0),
        }
    }
}

/// Everything an operator needs, loaded before any computation starts.
enum Prepared {
    Hilbert,
    Shift(HaarShiftSpec),
    Gshift(GeneralizedShiftSpec, Option<f64>),
    MaximalShift(GeneralizedShiftSpec),
    Paraproduct(StepFunction),
    Multiplier(Symbol),
    Square,
    Maximal,
    Wmaximal(dyadic_sharp::weights::Weight),
    Vmaximal(f64, Vec<StepFunction>),
    Orlicz(dyadic_sharp::weights::YoungFunction),
    Rdf(f64, u32),
}

fn shift_kind(base: &Base, kind: &ShiftKind) -> Result<GeneralizedShiftSpec, Failure> {
    Ok(match kind {
        ShiftKind::Haar {} => GeneralizedShiftSpec::haar(),
        ShiftKind::Hilbert {} => GeneralizedShiftSpec::dyadic_hilbert(),
        ShiftKind::Paraproduct { symbol } => domain(GeneralizedShiftSpec::paraproduct(base.step_function(symbol)?))?,
    })
}

fn prepare(base: &Base, op: &TransformOperator) -> Result<Prepared, Failure> {
    Ok(match op {
        TransformOperator::HilbertD {} => Prepared::Hilbert,
        TransformOperator::Shift { spec } => {
            let path = base.resolve(spec);
            let text = fs::read_to_string(&path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            let spec =
                HaarShiftSpec::from_json(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            Prepared::Shift(spec)
        }
        TransformOperator::Gshift { kind, eps } => Prepared::Gshift(shift_kind(base, kind)?, *eps),
        TransformOperator::MaximalShift { kind } => Prepared::MaximalShift(shift_kind(base, kind)?),
        TransformOperator::Paraproduct { symbol } => Prepared::Paraproduct(base.step_function(symbol)?),
        TransformOperator::Multiplier { alpha } => Prepared::Multiplier(match alpha {
            Alpha::Constant { value } => Symbol::Constant(*value),
            Alpha::ByLevel { values } => Symbol::ByLevel(values.clone()),
            Alpha::Table { entries } => Symbol::Table(entries.iter().map(|e| (e.cube, e.value)).collect()),
        }),
        TransformOperator::Square {} => Prepared::Square,
        TransformOperator::Maximal {} => Prepared::Maximal,
        TransformOperator::Wmaximal { weight } => Prepared::Wmaximal(base.weight(weight)?),
        TransformOperator::Vmaximal { q, components } => {
            Prepared::Vmaximal(*q, components.iter().map(|p| base.step_function(p)).collect::<Result<_, _>>()?)
        }
        TransformOperator::OrliczMaximal { young: y } => Prepared::Orlicz(young(y)?),
        TransformOperator::Rdf { s, terms } => Prepared::Rdf(*s, *terms),
    })
}

fn apply(op: Prepared, f: StepFunction) -> dyadic_sharp::Result<StepFunction> {
    match op {
        Prepared::Hilbert => dyadic_hilbert(&f),
        Prepared::Shift(spec) => haar_shift(&spec, &f),
        Prepared::Gshift(spec, None) => generalized_haar_shift(&spec, &f),
        Prepared::Gshift(spec, Some(eps)) => truncated_shift(&spec, &f, eps),
        Prepared::MaximalShift(spec) => maximal_haar_shift(&spec, &f),
        Prepared::Paraproduct(b) => paraproduct(&b, &f),
        Prepared::Multiplier(alpha) => haar_multiplier(|q| alpha.at(q), &f),
        Prepared::Square => square_function(&f),
        Prepared::Maximal => dyadic_maximal(&f),
        Prepared::Wmaximal(sigma) => weighted_dyadic_maximal(&sigma, &f),
        Prepared::Vmaximal(q, rest) => {
            let mut components = vec![f];
            components.extend(rest);
            vector_maximal(q, &VectorStepFunction::new(components)?)
        }
        Prepared::Orlicz(a) => orlicz_maximal(&a, &f),
        Prepared::Rdf(s, terms) => rubio_de_francia(&f, s, terms),
    }
}

pub fn transform(c: &Common) -> Result<(), Failure> {
    let cfg: TransformConfig = load(&c.config)?;
    let base = Base::of(&c.config);
    let f = base.step_function(&cfg.input)?;
    let op = prepare(&base, &cfg.operator)?;
    let out = domain(apply(op, f))?;
    emit(c.out.as_deref(), json(&out))
}

#[derive(Serialize)]
struct Classified {
    young: YoungDescriptor,
    verdict: BpVerdict,
}

#[derive(Serialize)]
struct BumpAudit {
    s: f64,
    bump_constant: f64,
    /// Verdict for the associate of `A` in `B_{(p/s)'}`.
    a_associate: BpVerdict,
    /// Verdict for the associate of `B` in `B_p`.
    b_associate: BpVerdict,
}

#[derive(Serialize)]
struct AuditReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    ap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    two_weight: Option<BumpAudit>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    classify: Vec<Classified>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bmo: Option<f64>,
}

pub fn audit(c: &Common) -> Result<(), Failure> {
    let cfg: AuditConfig = load(&c.config)?;
    let base = Base::of(&c.config);
    let p = cfg.p;
    check_p(p)?;
    let weight = cfg.weight.as_ref().map(|w| base.weight(w)).transpose()?;
    let pair = match &cfg.two_weight {
        Some(t) => Some((base.weight(&t.u)?, base.weight(&t.v)?, young(&t.a)?, young(&t.b)?, t.s)),
        None => None,
    };
    let classify = cfg.classify.iter().map(|d| Ok((d.clone(), young(d)?))).collect::<Result<Vec<_>, _>>()?;
    let bmo = cfg.bmo.as_ref().map(|b| base.step_function(b)).transpose()?;

    let ap = weight.map(|w| domain(ap_constant(&w, p))).transpose()?;
    let two_weight = match pair {
        Some((u, v, a, b, s)) => {
            let bump_constant = domain(bump_constant_with_exponent(&u, &v, p, s, &a, &b))?;
            let r = p / s;
            Some(BumpAudit {
                s,
                bump_constant,
                a_associate: domain(bp_classify(&domain(a.associate())?, r / (r - 1.0)))?,
                b_associate: domain(bp_classify(&domain(b.associate())?, p))?,
            })
        }
        None => None,
    };
    let classify = classify
        .into_iter()
        .map(|(young, f)| Ok(Classified { young, verdict: domain(bp_classify(&f, p))? }))
        .collect::<Result<Vec<_>, Failure>>()?;
    let bmo = bmo.map(|b| domain(bmo_dyadic_norm(&b))).transpose()?;
    emit(c.out.as_deref(), json(&AuditReport { ap, two_weight, classify, bmo }))
}

#[derive(Serialize)]
struct SweepSummary {
    operator: SweepOperator,
    p: f64,
    seed: u64,
    points: usize,
    fit: Option<Fit>,
}

pub fn sweep(c: &Common) -> Result<(), Failure> {
    let cfg: SweepConfig = load(&c.config)?;
    let out = c.out.as_ref().ok_or_else(|| Failure::Config("sweep needs --out".into()))?;
    let seed = c.seed.or(cfg.seed).unwrap_or(0);
    let Family::Buckley(family) = &cfg.family;
    let r = domain(sharpness_sweep((&cfg.operator).into(), cfg.p, &cfg.epsilons, family, seed))?;
    let summary = SweepSummary { operator: r.operator, p: r.p, seed, points: r.points.len(), fit: r.fit };
    let mut summary_path = out.clone().into_os_string();
    summary_path.push(".summary.json");
    write_all(&[(out.clone(), r.to_csv()), (PathBuf::from(summary_path), json(&summary))])
}

pub fn extremal(c: &Common) -> Result<(), Failure> {
    let cfg: ExtremalConfig = load(&c.config)?;
    let r = domain(extremal_sd(cfg.j, &cfg.ps))?;
    emit(c.out.as_deref(), json(&r))
}

#[derive(Serialize)]
struct LernerOutput {
    decomposition: LernerDecomposition,
    report: LernerReport,
}

pub fn lerner_verify(c: &Common) -> Result<(), Failure> {
    let cfg: LernerConfig = load(&c.config)?;
    let base = Base::of(&c.config);
    let f = base.step_function(&cfg.input)?;
    let q0 = cfg.cube.unwrap_or(*f.root());
    let d = domain(lerner_decompose(&f, &q0))?;
    let report = domain(verify_lerner_bound(&f, &q0, &d))?;
    let verdict = if report.pass { "pass" } else { "fail" };
    let line = format!("max residual {:e} {verdict}\n", report.max_residual);
    match &c.out {
        Some(out) => {
            write_all(&[(out.clone(), json(&LernerOutput { decomposition: d, report }))])?;
            print!("{line}");
            Ok(())
        }
        None => emit(None, line),
    }
}

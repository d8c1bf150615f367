//! Counterexamples for `p > 2`.
//!
//! The Bernoulli construction takes `P(X = 0) = P(X = 1) = 1/2` and
//! `Y = X + c`; for `p > 2` the gap `Delta(X, X + c)` grows like
//! `delta''(0+) c^2 / 2` with `delta''(0+) > 0`. The excess Minkowski
//! inequality then fails for `(X, tY)` at suitable `c` and `t`.

use rayon::prelude::*;
use serde::Serialize;

use crate::ddouble::DoubleDouble;
use crate::dist::{Atom, Exponents, JointDistribution};
use crate::error::{Error, Result};
use crate::functionals::{GapReport, Inequality};
use crate::inequalities::{check_excess_holder, check_excess_minkowski};
use crate::sample::{random_joint, substream, InstanceShape};
use crate::scalar_analysis::{bernoulli_second_derivative, measure_bernoulli_second_derivative};
use crate::shrink::shrink;

/// Certified gap must exceed this multiple of the checker tolerance.
pub const MARGIN: f64 = 10.0;
/// Longest geometric scan.
pub const MAX_HALVINGS: usize = 60;
/// Replaying a certificate must reproduce its gap this closely.
pub const REPLAY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// `X` Bernoulli(1/2), `Y = X + c`.
    BernoulliShift,
    /// `(X, tY)` built from a Bernoulli shift pair.
    BernoulliShiftScaled,
    RandomSearch,
}

/// A replayable witness that an inequality fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationCertificate {
    pub inequality: Inequality,
    pub p: f64,
    pub theta: f64,
    pub atoms: Vec<Atom<f64>>,
    pub gap: f64,
    /// Gap recomputed in double-double arithmetic.
    pub recheck_gap: f64,
    pub tol: f64,
    pub construction: Construction,
    /// Seed of a randomised construction; `null` for deterministic ones.
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// `delta''(0+) c^2 / 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_derivative: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_second_derivative: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<usize>,
}

impl ViolationCertificate {
    pub fn dist(&self) -> Result<JointDistribution<f64>> {
        JointDistribution::new(self.atoms.clone())
    }

    pub fn exponents(&self) -> Result<Exponents<f64>> {
        Exponents::new(self.p, self.theta)
    }

    /// Runs the certificate's instance through its checker again.
    pub fn replay(&self) -> Result<GapReport<f64>> {
        check(&self.dist()?, &self.exponents()?, self.inequality)
    }

    /// Checks the certificate invariants: margin, positive recheck and replay.
    pub fn verify(&self) -> Result<()> {
        let r = self.replay()?;
        if !(r.gap > MARGIN * r.tol) {
            return Err(Error::Precondition(format!("gap {} does not exceed {MARGIN} tol = {}", r.gap, MARGIN * r.tol)));
        }
        if (r.gap - self.gap).abs() > REPLAY_TOL * (1.0 + self.gap.abs()) {
            return Err(Error::Precondition(format!("replayed gap {} differs from stored {}", r.gap, self.gap)));
        }
        let recheck = recheck_gap(&self.dist()?, &self.exponents()?, self.inequality)?;
        if !(recheck > 0.0) {
            return Err(Error::Precondition(format!("extended recheck gap {recheck} is not positive")));
        }
        Ok(())
    }

    fn from_report(dist: &JointDistribution<f64>, e: &Exponents<f64>, r: &GapReport<f64>, construction: Construction) -> Result<Self> {
        Ok(Self {
            inequality: r.label,
            p: e.p(),
            theta: e.theta(),
            atoms: dist.atoms().to_vec(),
            gap: r.gap,
            recheck_gap: recheck_gap(dist, e, r.label)?,
            tol: r.tol,
            construction,
            seed: None,
            c: None,
            t: None,
            predicted_gap: None,
            second_derivative: None,
            measured_second_derivative: None,
            trial: None,
        })
    }
}

fn check<T: crate::Real>(dist: &JointDistribution<T>, e: &Exponents<T>, inequality: Inequality) -> Result<GapReport<T>> {
    match inequality {
        Inequality::Minkowski => check_excess_minkowski(dist, e),
        Inequality::Holder => check_excess_holder(dist, e),
        other => Err(Error::Precondition(format!("no counterexample search for {other}"))),
    }
}

/// Gap of the f64 instance evaluated in double-double arithmetic.
pub fn recheck_gap(dist: &JointDistribution<f64>, e: &Exponents<f64>, inequality: Inequality) -> Result<f64> {
    let d: JointDistribution<DoubleDouble> = dist.cast();
    let e: Exponents<DoubleDouble> = e.cast();
    Ok(check(&d, &e, inequality)?.gap.hi())
}

fn require_violating_regime(e: &Exponents<f64>) -> Result<()> {
    if !(e.p() > 2.0) {
        return Err(Error::Precondition(format!("p = {} must exceed 2; the inequalities hold for p <= 2", e.p())));
    }
    if !(e.theta() > 0.0) {
        return Err(Error::Precondition("theta must be positive; theta = 0 is the classical case".into()));
    }
    Ok(())
}

/// `X` Bernoulli(1/2) on `{0, 1}` paired with `Y = X + c`.
pub fn bernoulli_shift(c: f64) -> Result<JointDistribution<f64>> {
    JointDistribution::from_triples(&[(0.0, c, 0.5), (1.0, 1.0 + c, 0.5)])
}

fn certified(dist: &JointDistribution<f64>, e: &Exponents<f64>, inequality: Inequality) -> Result<Option<GapReport<f64>>> {
    let r = check(dist, e, inequality)?;
    if r.gap > MARGIN * r.tol && recheck_gap(dist, e, inequality)? > 0.0 {
        Ok(Some(r))
    } else {
        Ok(None)
    }
}

/// Scans `c = 1/2, 1/4, ...` for the first Bernoulli shift whose gap in the
/// excess Hölder inequality exceeds the margin.
pub fn paper_counterexample(e: &Exponents<f64>) -> Result<ViolationCertificate> {
    require_violating_regime(e)?;
    let dd = bernoulli_second_derivative(e)?;
    let mut c = 0.5;
    for _ in 0..MAX_HALVINGS {
        let dist = bernoulli_shift(c)?;
        if let Some(r) = certified(&dist, e, Inequality::Holder)? {
            let mut cert = ViolationCertificate::from_report(&dist, e, &r, Construction::BernoulliShift)?;
            cert.c = Some(c);
            cert.predicted_gap = Some(0.5 * dd * c * c);
            cert.second_derivative = Some(dd);
            cert.measured_second_derivative = measure_bernoulli_second_derivative(e).ok();
            return Ok(cert);
        }
        c *= 0.5;
    }
    Err(Error::SearchFailed(format!(
        "no shift c in [2^-{MAX_HALVINGS}, 1/2] gives a gap above {MARGIN} tol for p = {}, theta = {}",
        e.p(),
        e.theta()
    )))
}

/// Steps per halving in the joint `(c, t)` scan of [`minkowski_counterexample`].
pub const SCAN_DENSITY: usize = 8;

/// Scans Bernoulli shift pairs `(X, tY)` over `c = 2^(-1-i/8)` and
/// `t = 2^(-j/8)` and certifies the one with the largest gap relative to
/// its tolerance (lowest `(i, j)` on ties).
pub fn minkowski_counterexample(e: &Exponents<f64>) -> Result<ViolationCertificate> {
    require_violating_regime(e)?;
    let n = SCAN_DENSITY * MAX_HALVINGS;
    let step = |k: usize| (-(k as f64) / SCAN_DENSITY as f64).exp2();
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let pair = bernoulli_shift(0.5 * step(i))?;
            let mut best: Option<(f64, usize)> = None;
            for j in 0..n {
                let r = check(&pair.map_values(|a| (a.x, step(j) * a.y))?, e, Inequality::Minkowski)?;
                let ratio = r.gap / r.tol;
                if ratio > MARGIN && best.map_or(true, |(b, _)| ratio > b) {
                    best = Some((ratio, j));
                }
            }
            Ok(best.map(|(ratio, j)| (ratio, i, j)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, usize, usize)>, x| match acc {
            Some(a) if a.0 >= x.0 => Some(a),
            _ => Some(x),
        });
    let dd = bernoulli_second_derivative(e)?;
    if let Some((_, i, j)) = best {
        let (c, t) = (0.5 * step(i), step(j));
        let dist = bernoulli_shift(c)?.map_values(|a| (a.x, t * a.y))?;
        if let Some(r) = certified(&dist, e, Inequality::Minkowski)? {
            let mut cert = ViolationCertificate::from_report(&dist, e, &r, Construction::BernoulliShiftScaled)?;
            cert.c = Some(c);
            cert.t = Some(t);
            cert.second_derivative = Some(dd);
            return Ok(cert);
        }
    }
    Err(Error::SearchFailed(format!(
        "no pair (X, tY) on the scan grid gives a gap above {MARGIN} tol for p = {}, theta = {}",
        e.p(),
        e.theta()
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    pub trials: usize,
    pub max_atoms: usize,
    pub value_scale: f64,
    pub seed: u64,
    pub inequality: Inequality,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { trials: 10_000, max_atoms: 4, value_scale: 10.0, seed: 0, inequality: Inequality::Holder }
    }
}

/// Random instances from substreams `(seed, trial)`; the instance with the
/// largest gap above the margin (lowest trial on ties) is shrunk and
/// certified.
pub fn random_violation_search(e: &Exponents<f64>, config: &SearchConfig) -> Result<Option<ViolationCertificate>> {
    require_violating_regime(e)?;
    check(&JointDistribution::point(1.0, 1.0)?, e, config.inequality)?;
    let shape = InstanceShape::new(config.max_atoms, config.value_scale);
    let gaps: Vec<Option<(f64, JointDistribution<f64>)>> = (0..config.trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(config.seed, k as u64);
            let dist = random_joint(&mut rng, shape);
            match check(&dist, e, config.inequality) {
                Ok(r) if r.gap > MARGIN * r.tol => Some((r.gap, dist)),
                _ => None,
            }
        })
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for (k, g) in gaps.iter().enumerate() {
        if let Some((gap, _)) = g {
            if best.map_or(true, |(_, b)| *gap > b) {
                best = Some((k, *gap));
            }
        }
    }
    let Some((k, _)) = best else { return Ok(None) };
    let dist = gaps[k].as_ref().map(|g| g.1.clone()).expect("best trial has an instance");
    let inequality = config.inequality;
    let keeps = |d: &JointDistribution<f64>| matches!(certified(d, e, inequality), Ok(Some(_)));
    if !keeps(&dist) {
        return Ok(None);
    }
    let small = shrink(&dist, keeps);
    let r = check(&small, e, inequality)?;
    let mut cert = ViolationCertificate::from_report(&small, e, &r, Construction::RandomSearch)?;
    cert.seed = Some(config.seed);
    cert.trial = Some(k);
    Ok(Some(cert))
}

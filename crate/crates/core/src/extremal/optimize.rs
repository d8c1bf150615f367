//! Multi-start maximisation of the compactified objective.
//!
//! Internally `U` and `V` are divided by `m1p` and `m2p`, so the three
//! coordinate vectors are probability vectors and the two nonlinear
//! constraints read `sum u^(1/p) w^(1/q) = a`, `sum v^(1/p) w^(1/q) = b` with
//! `a, b` in `(0, 1]`.
//!
//! Each restart runs projected ascent in log coordinates with Gauss-Newton
//! restoration onto the constraint manifold, zeroes coordinates that are
//! heading to the boundary and finishes with Newton steps on the KKT system of
//! the remaining support. For `n_support <= 3` a Nelder-Mead search over the
//! tangent space competes as well.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{fit_multipliers, objective_tilde, CompactifiedPoint, LagrangeMultipliers, MomentSpec};
use crate::dist::Exponents;
use crate::error::{Error, Result};
use crate::sample::substream;

const RESTORE_TOL: f64 = 1e-14;
const SEED_ATTEMPTS: usize = 100;
/// Coordinates below this are dropped during ascent to avoid underflow.
const UNDERFLOW: f64 = 1e-200;
const ZERO_THRESHOLDS: [f64; 6] = [1e-3, 1e-4, 1e-6, 1e-9, 1e-12, 0.0];
/// Starts whose Lagrange residual exceeds this go through [`polish`].
const POLISH_TRIGGER: f64 = 1e-6;
const POLISH_ROUNDS: usize = 4;
/// Atoms whose `(u / w, v / w)` agree to this relative tolerance are merged.
const MERGE_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximizeOptions {
    pub n_support: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Extra starting point, run before the random restarts.
    pub warm_start: Option<CompactifiedPoint<f64>>,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self { n_support: 6, restarts: 64, seed: 0, max_iter: 400, warm_start: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximizeResult {
    pub feasible: bool,
    /// Best objective value; `-inf` when no feasible start was found.
    pub value: f64,
    pub point: Option<CompactifiedPoint<f64>>,
    pub feasibility_residual: f64,
    /// Largest scaled residual of the least-squares multiplier fit.
    pub lagrange_residual: f64,
    pub multipliers: Option<LagrangeMultipliers<f64>>,
    /// Index of the winning start; the warm start, if any, has index 0.
    pub best_start: Option<usize>,
    /// Objective value of every start, `-inf` where seeding failed.
    pub start_values: Vec<f64>,
    pub seed: u64,
}

impl MaximizeResult {
    fn infeasible(seed: u64, starts: usize) -> Self {
        Self {
            feasible: false,
            value: f64::NEG_INFINITY,
            point: None,
            feasibility_residual: f64::INFINITY,
            lagrange_residual: f64::INFINITY,
            multipliers: None,
            best_start: None,
            start_values: vec![f64::NEG_INFINITY; starts],
            seed,
        }
    }
}

/// The normalised problem. `z = [u; v; w]` of length `3n`.
struct Problem {
    n: usize,
    s: f64,
    r: f64,
    a: f64,
    b: f64,
}

impl Problem {
    fn pow(x: f64, e: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            x.powf(e)
        }
    }

    /// `(F_i, G4_i, G5_i)`.
    fn terms(&self, z: &[f64], i: usize) -> (f64, f64, f64) {
        let (u, v, w) = (z[i], z[self.n + i], z[2 * self.n + i]);
        let wr = Self::pow(w, self.r);
        (Self::pow(u, self.r) * Self::pow(v, self.s), Self::pow(u, self.s) * wr, Self::pow(v, self.s) * wr)
    }

    fn objective(&self, z: &[f64]) -> f64 {
        (0..self.n).map(|i| self.terms(z, i).0).sum()
    }

    fn constraints(&self, z: &[f64]) -> DVector<f64> {
        let n = self.n;
        let (mut g4, mut g5) = (0.0, 0.0);
        for i in 0..n {
            let t = self.terms(z, i);
            g4 += t.1;
            g5 += t.2;
        }
        DVector::from_vec(vec![
            z[..n].iter().sum::<f64>() - 1.0,
            z[n..2 * n].iter().sum::<f64>() - 1.0,
            z[2 * n..].iter().sum::<f64>() - 1.0,
            g4 - self.a,
            g5 - self.b,
        ])
    }

    /// Objective gradient and constraint Jacobian with respect to `log z` on
    /// the active coordinates, in the order of `idx`.
    fn log_derivatives(&self, z: &[f64], idx: &[usize]) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.n;
        let mut g = DVector::zeros(idx.len());
        let mut j = DMatrix::zeros(5, idx.len());
        for (col, &k) in idx.iter().enumerate() {
            let (block, i) = (k / n, k % n);
            let (f, g4, g5) = self.terms(z, i);
            j[(block, col)] = z[k];
            match block {
                0 => {
                    g[col] = self.r * f;
                    j[(3, col)] = self.s * g4;
                }
                1 => {
                    g[col] = self.s * f;
                    j[(4, col)] = self.s * g5;
                }
                _ => {
                    j[(3, col)] = self.r * g4;
                    j[(4, col)] = self.r * g5;
                }
            }
        }
        (g, j)
    }

    /// Minimum-norm solution of `J d = c` with `J` of full column count.
    fn min_norm(j: &DMatrix<f64>, c: &DVector<f64>) -> Option<DVector<f64>> {
        let jjt = j * j.transpose();
        let scale = jjt.amax().max(1e-300);
        let y = match jjt.clone().cholesky() {
            Some(ch) if (0..5).all(|k| ch.l_dirty()[(k, k)].powi(2) > 1e-12 * scale) => ch.solve(c),
            _ => jjt.svd(true, true).solve(c, 1e-14 * scale).ok()?,
        };
        Some(j.transpose() * y)
    }

    /// Gauss-Newton restoration in log coordinates; keeps every active
    /// coordinate positive.
    fn restore(&self, z: &mut [f64], idx: &[usize]) -> bool {
        if idx.is_empty() {
            return false;
        }
        for _ in 0..60 {
            let c = self.constraints(z);
            let err = c.amax();
            if !err.is_finite() {
                return false;
            }
            if err <= RESTORE_TOL {
                return true;
            }
            let (_, j) = self.log_derivatives(z, idx);
            let Some(d) = Self::min_norm(&j, &c) else { return false };
            let cap = d.amax();
            let mut step = if cap > 2.0 { 2.0 / cap } else { 1.0 };
            let mut improved = false;
            for _ in 0..30 {
                let mut trial = z.to_vec();
                for (col, &k) in idx.iter().enumerate() {
                    trial[k] = z[k] * (-step * d[col]).exp();
                }
                let e = self.constraints(&trial).amax();
                if e.is_finite() && e < err {
                    z.copy_from_slice(&trial);
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                return err <= 1e-12;
            }
        }
        self.constraints(z).amax() <= 1e-12
    }

    fn restore_all(&self, z: &mut [f64]) -> bool {
        let idx = active(z);
        self.restore(z, &idx)
    }

    /// Projected gradient ascent in log coordinates.
    fn ascend(&self, z: &mut [f64], max_iter: usize) {
        let mut t: f64 = 1.0;
        let mut stalled = 0;
        for _ in 0..max_iter {
            let idx = active(z);
            let (g, j) = self.log_derivatives(z, &idx);
            let Some(corr) = Self::min_norm(&j, &(&j * &g)) else { return };
            let d = &g - corr;
            let dmax = d.amax();
            if dmax <= 1e-13 {
                return;
            }
            let f0 = self.objective(z);
            let slope = d.norm_squared();
            t = (2.0 * t).min(1.0 / dmax);
            let mut accepted = false;
            while t * dmax > 1e-15 {
                let mut trial = z.to_vec();
                for (col, &k) in idx.iter().enumerate() {
                    trial[k] = z[k] * (t * d[col]).exp();
                }
                if self.restore(&mut trial, &idx) && self.objective(&trial) >= f0 + 1e-4 * t * slope {
                    z.copy_from_slice(&trial);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                return;
            }
            let gain = self.objective(z) - f0;
            stalled = if gain <= 1e-15 * (1.0 + f0.abs()) { stalled + 1 } else { 0 };
            if stalled >= 10 {
                return;
            }
            let mut dropped = false;
            for v in z.iter_mut() {
                if *v > 0.0 && *v < UNDERFLOW {
                    *v = 0.0;
                    dropped = true;
                }
            }
            if dropped && !self.restore_all(z) {
                return;
            }
        }
    }

    /// Hessian blocks of `x^a y^b` at positive `(x, y)` scaled by `c`.
    fn add_hessian(h: &mut DMatrix<f64>, pos: &[Option<usize>], kx: usize, ky: usize, f: f64, a: f64, b: f64, c: f64, z: &[f64]) {
        if f == 0.0 || c == 0.0 {
            return;
        }
        let (x, y) = (z[kx], z[ky]);
        if let Some(px) = pos[kx] {
            h[(px, px)] += c * a * (a - 1.0) * f / (x * x);
        }
        if let Some(py) = pos[ky] {
            h[(py, py)] += c * b * (b - 1.0) * f / (y * y);
        }
        if let (Some(px), Some(py)) = (pos[kx], pos[ky]) {
            let m = c * a * b * f / (x * y);
            h[(px, py)] += m;
            h[(py, px)] += m;
        }
    }

    /// Newton iteration on the KKT system over the positive coordinates.
    /// Coordinates that a step would drive negative are fixed at zero.
    fn newton(&self, z: &mut [f64]) -> bool {
        let n = self.n;
        let mut idx = active(z);
        'outer: for _ in 0..3 * n {
            if idx.is_empty() {
                return false;
            }
            let k = idx.len();
            let mut pos = vec![None; 3 * n];
            for (c, &j) in idx.iter().enumerate() {
                pos[j] = Some(c);
            }
            // Linear-coordinate gradient and Jacobian from the log ones.
            let lin = |z: &[f64]| {
                let (g, j) = self.log_derivatives(z, &idx);
                let mut g = g;
                let mut j = j;
                for (c, &kk) in idx.iter().enumerate() {
                    g[c] /= z[kk];
                    for r in 0..5 {
                        j[(r, c)] /= z[kk];
                    }
                }
                (g, j)
            };
            let (g, j) = lin(z);
            let Some(y) = (j.clone() * j.transpose()).svd(true, true).solve(&(&j * &g), 1e-14).ok() else {
                return false;
            };
            let mut y = y;
            for _ in 0..40 {
                let (g, j) = lin(z);
                let c = self.constraints(z);
                let rl = &g - j.transpose() * &y;
                if rl.amax() <= 1e-13 * (1.0 + g.amax()) && c.amax() <= RESTORE_TOL {
                    return true;
                }
                let mut h = DMatrix::zeros(k, k);
                for i in 0..n {
                    let (f, g4, g5) = self.terms(z, i);
                    Self::add_hessian(&mut h, &pos, i, n + i, f, self.r, self.s, 1.0, z);
                    Self::add_hessian(&mut h, &pos, i, 2 * n + i, g4, self.s, self.r, -y[3], z);
                    Self::add_hessian(&mut h, &pos, n + i, 2 * n + i, g5, self.s, self.r, -y[4], z);
                }
                let mut kkt = DMatrix::zeros(k + 5, k + 5);
                kkt.view_mut((0, 0), (k, k)).copy_from(&h);
                kkt.view_mut((0, k), (k, 5)).copy_from(&(-j.transpose()));
                kkt.view_mut((k, 0), (5, k)).copy_from(&j);
                let mut rhs = DVector::zeros(k + 5);
                rhs.rows_mut(0, k).copy_from(&(-rl));
                rhs.rows_mut(k, 5).copy_from(&(-c));
                let eps = 1e-15 * kkt.amax().max(1e-300);
                let Ok(sol) = kkt.svd(true, true).solve(&rhs, eps) else { return false };
                if !sol.iter().all(|v| v.is_finite()) {
                    return false;
                }
                let mut blocked = Vec::new();
                for (c, &kk) in idx.iter().enumerate() {
                    if z[kk] + sol[c] <= 0.0 {
                        blocked.push(kk);
                    }
                }
                if !blocked.is_empty() {
                    for kk in &blocked {
                        z[*kk] = 0.0;
                    }
                    idx = active(z);
                    if !self.restore(z, &idx) {
                        return false;
                    }
                    continue 'outer;
                }
                for (c, &kk) in idx.iter().enumerate() {
                    z[kk] += sol[c];
                }
                for r in 0..5 {
                    y[r] += sol[k + r];
                }
            }
            return self.constraints(z).amax() <= 1e-12;
        }
        false
    }

    /// Nelder-Mead over tangent directions at `z`, each vertex pulled back onto
    /// the constraint set.
    fn nelder_mead(&self, z: &[f64], iters: usize) -> Option<Vec<f64>> {
        let idx = active(z);
        let (_, j) = self.log_derivatives(z, &idx);
        let svd = j.clone().svd(false, true);
        let vt = svd.v_t?;
        let rank = svd.singular_values.iter().filter(|&&s| s > 1e-12 * svd.singular_values.amax()).count();
        // Rows of vt beyond the rank span the null space of J.
        let basis: Vec<DVector<f64>> =
            (rank..idx.len()).filter(|&r| r < vt.nrows()).map(|r| vt.row(r).transpose()).collect();
        let dim = basis.len();
        if dim == 0 {
            return None;
        }
        let eval = |xi: &[f64]| -> (f64, Vec<f64>) {
            let mut t = z.to_vec();
            for (c, &k) in idx.iter().enumerate() {
                let shift: f64 = (0..dim).map(|b| xi[b] * basis[b][c]).sum();
                t[k] = z[k] * shift.clamp(-50.0, 50.0).exp();
            }
            if self.restore(&mut t, &idx) {
                (self.objective(&t), t)
            } else {
                (f64::NEG_INFINITY, t)
            }
        };
        let mut simplex: Vec<(Vec<f64>, f64, Vec<f64>)> = Vec::with_capacity(dim + 1);
        let origin = vec![0.0; dim];
        let (f0, p0) = eval(&origin);
        simplex.push((origin, f0, p0));
        for b in 0..dim {
            let mut x = vec![0.0; dim];
            x[b] = 0.5;
            let (f, p) = eval(&x);
            simplex.push((x, f, p));
        }
        for _ in 0..iters {
            simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
            let best = simplex[0].1;
            let worst = simplex[dim].1;
            if best.is_finite() && worst.is_finite() && (best - worst).abs() <= 1e-15 * (1.0 + best.abs()) {
                break;
            }
            let centroid: Vec<f64> = (0..dim).map(|c| simplex[..dim].iter().map(|s| s.0[c]).sum::<f64>() / dim as f64).collect();
            let along = |t: f64| -> Vec<f64> { (0..dim).map(|c| centroid[c] + t * (simplex[dim].0[c] - centroid[c])).collect() };
            let xr = along(-1.0);
            let (fr, pr) = eval(&xr);
            if fr > simplex[0].1 {
                let xe = along(-2.0);
                let (fe, pe) = eval(&xe);
                simplex[dim] = if fe > fr { (xe, fe, pe) } else { (xr, fr, pr) };
            } else if fr > simplex[dim - 1].1 {
                simplex[dim] = (xr, fr, pr);
            } else {
                let xc = along(0.5);
                let (fc, pc) = eval(&xc);
                if fc > simplex[dim].1 {
                    simplex[dim] = (xc, fc, pc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for s in simplex.iter_mut().skip(1) {
                        let x: Vec<f64> = (0..dim).map(|c| x0[c] + 0.5 * (s.0[c] - x0[c])).collect();
                        let (f, p) = eval(&x);
                        *s = (x, f, p);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        simplex.into_iter().next().filter(|s| s.1.is_finite()).map(|s| s.2)
    }
}

fn active(z: &[f64]) -> Vec<usize> {
    (0..z.len()).filter(|&k| z[k] > 0.0).collect()
}

struct Candidate {
    z: Vec<f64>,
    value: f64,
}

fn denormalize(z: &[f64], n: usize, spec: &MomentSpec<f64>) -> CompactifiedPoint<f64> {
    CompactifiedPoint {
        u: z[..n].iter().map(|v| v * spec.m1p).collect(),
        v: z[n..2 * n].iter().map(|v| v * spec.m2p).collect(),
        w: z[2 * n..].to_vec(),
    }
}

fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let spread: f64 = rng.gen_range(0.0..4.0);
    let raw: Vec<f64> = (0..n).map(|_| (spread * rng.gen_range(-1.0..1.0f64)).exp()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// Polishes an ascent result under several zeroing thresholds and keeps the
/// best polished point.
fn finish(problem: &Problem, z: &[f64], spec: &MomentSpec<f64>, e: &Exponents<f64>) -> Candidate {
    let base = problem.objective(z);
    let mut best: Option<(Candidate, f64)> = None;
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for thr in ZERO_THRESHOLDS {
        let mut t = z.to_vec();
        t.iter_mut().for_each(|v| {
            if *v < thr {
                *v = 0.0
            }
        });
        let pattern = active(&t);
        if seen.contains(&pattern) {
            continue;
        }
        seen.push(pattern);
        if !problem.restore_all(&mut t) {
            continue;
        }
        if thr > 0.0 {
            problem.ascend(&mut t, 50);
        }
        let mut polished = t.clone();
        if problem.newton(&mut polished) && problem.restore_all(&mut polished) {
            t = polished;
        }
        let value = problem.objective(&t);
        let point = denormalize(&t, problem.n, spec);
        let lres = fit_multipliers(&point, e).map_or(f64::INFINITY, |(_, r)| r);
        let better = match &best {
            None => true,
            Some((b, br)) => {
                let close = (value - b.value).abs() <= 1e-10 * (1.0 + b.value.abs());
                if close {
                    lres < *br
                } else {
                    value > b.value
                }
            }
        };
        if better {
            best = Some((Candidate { z: t, value }, lres));
        }
    }
    best.map(|b| b.0).unwrap_or(Candidate { z: z.to_vec(), value: base })
}

fn lagrange_of(problem: &Problem, z: &[f64], spec: &MomentSpec<f64>, e: &Exponents<f64>) -> f64 {
    fit_multipliers(&denormalize(z, problem.n, spec), e).map_or(f64::INFINITY, |(_, r)| r)
}

/// Merges atoms with nearly proportional `(u, v, w)`. Every term is
/// 1-homogeneous per atom, so exact proportionality changes nothing.
fn merge(problem: &Problem, z: &[f64]) -> Vec<f64> {
    let n = problem.n;
    let mut t = z.to_vec();
    let close = |a: f64, b: f64| (a - b).abs() <= MERGE_TOL * a.abs().max(b.abs());
    for i in 0..n {
        for j in i + 1..n {
            let (wi, wj) = (t[2 * n + i], t[2 * n + j]);
            let alive = |k: usize| t[k] > 0.0 || t[n + k] > 0.0 || t[2 * n + k] > 0.0;
            if !alive(i) || !alive(j) {
                continue;
            }
            let same = if wi > 0.0 && wj > 0.0 {
                close(t[i] / wi, t[j] / wj) && close(t[n + i] / wi, t[n + j] / wj)
            } else if wi == 0.0 && wj == 0.0 && t[i] > 0.0 && t[j] > 0.0 {
                close(t[n + i] / t[i], t[n + j] / t[j])
            } else {
                false
            };
            if same {
                for off in [0, n, 2 * n] {
                    t[off + i] += t[off + j];
                    t[off + j] = 0.0;
                }
            }
        }
    }
    t
}

/// Escapes slow drifts towards the boundary: merges clustered atoms and tries
/// sending each atom's `w` to zero while keeping its `u` and `v`.
fn polish(problem: &Problem, cand: Candidate, max_iter: usize, spec: &MomentSpec<f64>, e: &Exponents<f64>) -> Candidate {
    let n = problem.n;
    let mut best_l = lagrange_of(problem, &cand.z, spec, e);
    let mut best = cand;
    for _ in 0..POLISH_ROUNDS {
        let base = merge(problem, &best.z);
        let mut trials = vec![base.clone()];
        let weighted = (0..n).filter(|&k| base[2 * n + k] > 0.0).count();
        for k in 0..n {
            if weighted > 1 && base[2 * n + k] > 0.0 && base[k] > 0.0 && base[n + k] > 0.0 {
                let mut t = base.clone();
                t[2 * n + k] = 0.0;
                trials.push(t);
            }
        }
        let mut improved = false;
        for mut t in trials {
            if !problem.restore_all(&mut t) {
                continue;
            }
            problem.ascend(&mut t, max_iter);
            let c = finish(problem, &t, spec, e);
            let l = lagrange_of(problem, &c.z, spec, e);
            let close = (c.value - best.value).abs() <= 1e-10 * (1.0 + best.value.abs());
            if (close && l < best_l) || (!close && c.value > best.value) {
                improved |= !close;
                best_l = l;
                best = c;
            }
        }
        if !improved || best_l <= POLISH_TRIGGER {
            break;
        }
    }
    best
}

fn run_start(problem: &Problem, mut z: Vec<f64>, max_iter: usize, spec: &MomentSpec<f64>, e: &Exponents<f64>) -> Candidate {
    problem.ascend(&mut z, max_iter);
    let mut cand = finish(problem, &z, spec, e);
    if lagrange_of(problem, &cand.z, spec, e) > POLISH_TRIGGER {
        cand = polish(problem, cand, max_iter, spec, e);
    }
    if problem.n <= 3 {
        if let Some(nm) = problem.nelder_mead(&z, 200 * problem.n) {
            let mut nz = nm;
            problem.ascend(&mut nz, max_iter);
            let other = finish(problem, &nz, spec, e);
            if other.value > cand.value + 1e-12 * (1.0 + cand.value.abs()) {
                cand = other;
            }
        }
    }
    cand
}

fn seeded_start(problem: &Problem, seed: u64, index: usize) -> Option<Vec<f64>> {
    let mut rng = substream(seed, index as u64);
    let n = problem.n;
    for _ in 0..SEED_ATTEMPTS {
        let mut z = Vec::with_capacity(3 * n);
        for _ in 0..3 {
            z.extend(random_simplex(&mut rng, n));
        }
        if problem.restore_all(&mut z) {
            return Some(z);
        }
    }
    None
}

/// Maximises the compactified objective for fixed moments.
///
/// Start `k` of the random restarts draws from substream `(seed, k)`, so the
/// best value over the first `r` restarts never decreases in `r`. Ties keep the
/// lowest start index. A spec violating Lyapunov's inequality is reported
/// infeasible with value `-inf`.
pub fn maximize(spec: &MomentSpec<f64>, e: &Exponents<f64>, options: &MaximizeOptions) -> Result<MaximizeResult> {
    if options.n_support == 0 {
        return Err(Error::Precondition("n_support must be at least 1".into()));
    }
    let p = e.p();
    let warm = options.warm_start.as_ref();
    let starts = options.restarts + warm.is_some() as usize;
    if !spec.is_feasible(p) {
        return Ok(MaximizeResult::infeasible(options.seed, starts));
    }
    let a = (spec.m11 / spec.m1p.powf(1.0 / p)).min(1.0);
    let b = (spec.m21 / spec.m2p.powf(1.0 / p)).min(1.0);
    let make = |n: usize| Problem { n, s: 1.0 / p, r: 1.0 / e.q(), a, b };

    let warm_candidate = match warm {
        Some(pt) => {
            let problem = make(pt.len());
            let mut z: Vec<f64> = pt.u.iter().map(|v| v / spec.m1p).collect();
            z.extend(pt.v.iter().map(|v| v / spec.m2p));
            z.extend(pt.w.iter().copied());
            if problem.restore_all(&mut z) {
                let c = run_start(&problem, z, options.max_iter, spec, e);
                Some((denormalize(&c.z, problem.n, spec), c.value))
            } else {
                None
            }
        }
        None => None,
    };

    let problem = make(options.n_support);
    let random: Vec<Option<(CompactifiedPoint<f64>, f64)>> = (0..options.restarts)
        .into_par_iter()
        .map(|k| {
            seeded_start(&problem, options.seed, k).map(|z| {
                let c = run_start(&problem, z, options.max_iter, spec, e);
                (denormalize(&c.z, problem.n, spec), c.value)
            })
        })
        .collect();

    let mut all: Vec<Option<(CompactifiedPoint<f64>, f64)>> = Vec::with_capacity(starts);
    if warm.is_some() {
        all.push(warm_candidate);
    }
    all.extend(random);

    let mut start_values = Vec::with_capacity(starts);
    let mut best: Option<(usize, f64)> = None;
    for (k, c) in all.iter().enumerate() {
        let value = match c {
            Some((pt, _)) => objective_tilde(pt, spec, e)?,
            None => f64::NEG_INFINITY,
        };
        start_values.push(value);
        if c.is_some() && best.map_or(true, |(_, bv)| value > bv) {
            best = Some((k, value));
        }
    }
    let Some((k, value)) = best else {
        return Ok(MaximizeResult::infeasible(options.seed, starts));
    };
    let point = all[k].take().map(|c| c.0).expect("best start has a point");
    let (multipliers, lagrange_residual) = match fit_multipliers(&point, e) {
        Ok((m, r)) => (Some(m), r),
        Err(_) => (None, f64::INFINITY),
    };
    Ok(MaximizeResult {
        feasible: true,
        value,
        feasibility_residual: point.feasibility_residual(spec, e),
        point: Some(point),
        lagrange_residual,
        multipliers,
        best_start: Some(k),
        start_values,
        seed: options.seed,
    })
}

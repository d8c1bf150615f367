//! Greedy shrinking of witnesses.
//!
//! Candidates are tried in order: drop an atom, zero a coordinate, then round
//! a coordinate to fewer significant digits. The first candidate that keeps
//! the property is accepted and the scan restarts; the result is locally
//! minimal with respect to these moves.

use crate::dist::{Atom, JointDistribution};

/// Most significant digits tried when rounding.
const MAX_DIGITS: i32 = 6;
/// Upper bound on accepted moves, a guard against cycling.
const MAX_STEPS: usize = 10_000;

/// Rounds `v` to `digits` significant decimal digits.
pub fn round_sig(v: f64, digits: i32) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let mag = v.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - mag);
    let r = (v * factor).round() / factor;
    if r.is_finite() {
        r
    } else {
        v
    }
}

fn significant_digits(v: f64) -> i32 {
    (1..=17).find(|&d| round_sig(v, d) == v).unwrap_or(17)
}

fn candidates(dist: &JointDistribution<f64>) -> Vec<JointDistribution<f64>> {
    let atoms = dist.atoms();
    let mut out = Vec::new();
    if atoms.len() > 1 {
        for skip in 0..atoms.len() {
            let rest: Vec<Atom<f64>> =
                atoms.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, a)| *a).collect();
            if let Ok(d) = JointDistribution::normalized(rest) {
                out.push(d);
            }
        }
    }
    let with = |i: usize, x: f64, y: f64| {
        let mut v = atoms.to_vec();
        v[i].x = x;
        v[i].y = y;
        JointDistribution::new(v).ok()
    };
    for (i, a) in atoms.iter().enumerate() {
        if a.x != 0.0 {
            out.extend(with(i, 0.0, a.y));
        }
        if a.y != 0.0 {
            out.extend(with(i, a.x, 0.0));
        }
    }
    for (i, a) in atoms.iter().enumerate() {
        let dx = significant_digits(a.x);
        for d in 1..dx.min(MAX_DIGITS + 1) {
            out.extend(with(i, round_sig(a.x, d), a.y));
        }
        let dy = significant_digits(a.y);
        for d in 1..dy.min(MAX_DIGITS + 1) {
            out.extend(with(i, a.x, round_sig(a.y, d)));
        }
    }
    out
}

/// Shrinks `dist` while `keeps` stays true. `keeps(dist)` must hold on entry.
pub fn shrink<F: Fn(&JointDistribution<f64>) -> bool>(dist: &JointDistribution<f64>, keeps: F) -> JointDistribution<f64> {
    let mut current = dist.clone();
    for _ in 0..MAX_STEPS {
        match candidates(&current).into_iter().find(|c| keeps(c)) {
            Some(next) => current = next,
            None => break,
        }
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(3.14159, 3), 3.14);
        assert_eq!(round_sig(0.0012345, 2), 0.0012);
        assert_eq!(round_sig(0.0, 2), 0.0);
        assert_eq!(significant_digits(2.5), 2);
    }

    #[test]
    fn shrinks_to_minimal_witness() {
        let d = JointDistribution::from_triples(&[(0.37, 2.718281828, 0.25), (5.1234567, 0.0, 0.5), (1.0, 1.0, 0.25)])
            .unwrap();
        let s = shrink(&d, |c| c.atoms().iter().any(|a| a.x > 4.0));
        assert_eq!(s.len(), 1);
        assert_eq!(s.atoms()[0].x, 5.0);
        assert_eq!(s.atoms()[0].y, 0.0);
    }
}

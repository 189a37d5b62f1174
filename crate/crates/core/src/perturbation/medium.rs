//! Weights on the scale `w = k√M`.
//!
//! The three nearly degenerate states `a`, `σ = (b + d)/√2` and
//! `δ = (-b + d)/√2` mix through the dimensionless matrix
//!
//! ```text
//!        ⎡ 0  -1   1   ⎤
//! H'' =  ⎢-1   0   0   ⎥
//!        ⎣ 1   0  2√2k ⎦
//! ```
//!
//! whose characteristic polynomial is `λ³ - 2√2kλ² - 2λ + 2√2k`. Physical
//! time is `√2(M + w)/√M` times `H''`-time.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_positive, Error, Result};
use crate::reduced::ReducedState;

/// Default window for the runtime-equation root scan, in `H''`-time.
pub const DEFAULT_SCAN: f64 = 20.0;
/// Grid step of the root scan.
pub const SCAN_STEP: f64 = 1e-3;
/// Bisection width for the runtime-equation root.
pub const ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MediumEigensystem {
    pub k: f64,
    /// Eigenvalues of `H''`, ascending.
    pub lambdas: [f64; 3],
    /// Expansion of `σ` in the eigenvectors `(1, -1/λᵢ, λᵢ - 1/λᵢ)`.
    pub alphas: [f64; 3],
}

pub fn cubic(k: f64, lambda: f64) -> f64 {
    let s = 2.0 * SQRT_2 * k;
    ((lambda - s) * lambda - 2.0) * lambda + s
}

fn cubic_derivative(k: f64, lambda: f64) -> f64 {
    (3.0 * lambda - 4.0 * SQRT_2 * k) * lambda - 2.0
}

/// Bisection on a bracket with `f(lo)` and `f(hi)` of opposite sign, to the
/// resolution of doubles, followed by one Newton polish step.
fn bracketed_root(k: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = cubic(k, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = cubic(k, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let d = cubic_derivative(k, x);
    let polished = if d != 0.0 { x - cubic(k, x) / d } else { x };
    if cubic(k, polished).abs() < cubic(k, x).abs() {
        polished
    } else {
        x
    }
}

/// Real roots of the `H''` characteristic polynomial, ascending.
///
/// The stationary points of the cubic are always real and straddle zero,
/// so each root is bracketed by them and the Cauchy bound.
pub fn cubic_roots(k: f64) -> [f64; 3] {
    let s = 2.0 * SQRT_2 * k;
    let bound = 1.0 + s.abs().max(2.0);
    let disc = (32.0 * k * k + 24.0).sqrt();
    let lo_crit = (4.0 * SQRT_2 * k - disc) / 6.0;
    let hi_crit = (4.0 * SQRT_2 * k + disc) / 6.0;
    [bracketed_root(k, -bound, lo_crit), bracketed_root(k, lo_crit, hi_crit), bracketed_root(k, hi_crit, bound)]
}

/// `αᵢ = -(λᵢ + λ₁λ₂λ₃) / Πⱼ≠ᵢ(λᵢ - λⱼ)`; symmetric under relabeling.
pub fn alphas(lambdas: &[f64; 3]) -> [f64; 3] {
    let prod = lambdas.iter().product::<f64>();
    std::array::from_fn(|i| {
        let denom: f64 = (0..3).filter(|&j| j != i).map(|j| lambdas[i] - lambdas[j]).product();
        -(lambdas[i] + prod) / denom
    })
}

pub fn medium_eigensystem(k: f64) -> Result<MediumEigensystem> {
    check_positive("k", k)?;
    let lambdas = cubic_roots(k);
    Ok(MediumEigensystem { k, lambdas, alphas: alphas(&lambdas) })
}

/// Which printed form of the `sin θ` radicand to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinThetaRadicand {
    /// `32k⁴ + 13k³ + 4`
    CubicMiddleTerm,
    /// `32k⁴ + 13k² + 4`
    QuadraticMiddleTerm,
}

pub fn cos_theta(k: f64) -> f64 {
    let q = 4.0 * k * k + 3.0;
    k * (16.0 * k * k - 9.0) / (2.0 * q.powf(1.5))
}

pub fn sin_theta(k: f64, radicand: SinThetaRadicand) -> f64 {
    let q = 4.0 * k * k + 3.0;
    let middle = match radicand {
        SinThetaRadicand::CubicMiddleTerm => 13.0 * k.powi(3),
        SinThetaRadicand::QuadraticMiddleTerm => 13.0 * k * k,
    };
    3.0 * 3f64.sqrt() * (32.0 * k.powi(4) + middle + 4.0).sqrt() / (2.0 * q.powf(1.5))
}

/// `|cos²θ + sin²θ - 1|` for the chosen radicand.
pub fn trig_identity_residual(k: f64, radicand: SinThetaRadicand) -> f64 {
    (cos_theta(k).powi(2) + sin_theta(k, radicand).powi(2) - 1.0).abs()
}

/// Trigonometric closed forms for the roots, with `sin θ = +√(1 - cos²θ)`.
/// Returned in the labeling `(λ₁, λ₂, λ₃)` of the closed forms, not sorted.
pub fn trig_roots(k: f64) -> [f64; 3] {
    let c = cos_theta(k);
    let theta = c.clamp(-1.0, 1.0).acos();
    let third = theta / 3.0;
    let q = (4.0 * k * k + 3.0).sqrt();
    let shift = 2.0 * SQRT_2 * k / 3.0;
    let (ct, st) = (third.cos(), 3f64.sqrt() * third.sin());
    [2.0 * SQRT_2 / 3.0 * (k + q * ct), shift - SQRT_2 * q / 3.0 * (ct + st), shift - SQRT_2 * q / 3.0 * (ct - st)]
}

impl MediumEigensystem {
    /// Factor converting `H''`-time into physical time, `√2(M + w)/√M`.
    pub fn rescale(m: usize, w: f64) -> f64 {
        let mf = m as f64;
        SQRT_2 * (mf + w) / mf.sqrt()
    }

    /// Unnormalized eigenvector of `H''` for root `i` in the `(a, σ, δ)` basis.
    pub fn eigenvector(&self, i: usize) -> [f64; 3] {
        let l = self.lambdas[i];
        [1.0, -1.0 / l, l - 1.0 / l]
    }

    /// `(a, σ, δ)` amplitudes of `e^{-iH''t}σ`.
    pub fn evolved_sigma(&self, t: f64) -> [Complex64; 3] {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for i in 0..3 {
            let phase = Complex64::from_polar(self.alphas[i], -self.lambdas[i] * t);
            for (o, x) in out.iter_mut().zip(self.eigenvector(i)) {
                *o += phase * x;
            }
        }
        out
    }

    /// Left-hand side of the stationarity condition `dp/dt = 0`, with the
    /// common denominator removed.
    pub fn runtime_lhs(&self, t: f64) -> f64 {
        let [l1, l2, l3] = self.lambdas;
        let p = l1 * l2 * l3;
        let (c1, c2, c3) = (l1 + p, l2 + p, l3 + p);
        c1 * c2 * ((l1 - l2) * t).sin() - c1 * c3 * ((l1 - l3) * t).sin() + c2 * c3 * ((l2 - l3) * t).sin()
    }
}

/// Probability on `a` after evolving `σ` for `H''`-time `t`.
pub fn medium_probability(es: &MediumEigensystem, t: f64) -> f64 {
    let [a1, a2, a3] = es.alphas;
    let [l1, l2, l3] = es.lambdas;
    a1 * a1
        + a2 * a2
        + a3 * a3
        + 2.0 * a1 * a2 * ((l1 - l2) * t).cos()
        + 2.0 * a1 * a3 * ((l1 - l3) * t).cos()
        + 2.0 * a2 * a3 * ((l2 - l3) * t).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MediumRuntime {
    /// First positive root of the runtime equation, in `H''`-time.
    pub root: f64,
    /// Physical runtime.
    pub t_star: f64,
    pub p_star: f64,
}

/// First positive root of `f` on `(0, scan]`, located on a grid of step
/// `step` and bisected to `tol`.
pub fn first_positive_root(f: impl Fn(f64) -> f64, scan: f64, step: f64, tol: f64) -> Result<f64> {
    let n = (scan / step).round() as usize;
    let mut t0 = step;
    let mut f0 = f(t0);
    for i in 2..=n {
        let t1 = i as f64 * step;
        let f1 = f(t1);
        if f0 == 0.0 {
            return Ok(t0);
        }
        if (f0 < 0.0) != (f1 < 0.0) {
            let (mut lo, mut hi, f_lo) = (t0, t1, f0);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    return Ok(mid);
                }
                if (fm < 0.0) == (f_lo < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        t0 = t1;
        f0 = f1;
    }
    Err(Error::RootNotFound { scan })
}

/// Runtime and success probability at the first positive root of the
/// runtime equation. `m` and `w` only enter through the rescaling factor.
pub fn medium_runtime(es: &MediumEigensystem, m: usize, w: f64) -> Result<MediumRuntime> {
    medium_runtime_scan(es, m, w, DEFAULT_SCAN)
}

pub fn medium_runtime_scan(es: &MediumEigensystem, m: usize, w: f64, scan: f64) -> Result<MediumRuntime> {
    let root = first_positive_root(|t| es.runtime_lhs(t), scan, SCAN_STEP, ROOT_TOL)?;
    Ok(MediumRuntime { root, t_star: MediumEigensystem::rescale(m, w) * root, p_star: medium_probability(es, root) })
}

/// State predicted at `H''`-time `t`, mapped back to `(a, b, c, d)`.
pub fn medium_state(es: &MediumEigensystem, t: f64) -> Result<ReducedState> {
    let [a, sigma, delta] = es.evolved_sigma(t);
    let b = (sigma - delta) / SQRT_2;
    let d = (sigma + delta) / SQRT_2;
    ReducedState::new([a, b, Complex64::new(0.0, 0.0), d])
}

#[cfg(test)]
mod tests {
    use super::*;

    const KS: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

    fn h2(k: f64) -> [[f64; 3]; 3] {
        [[0.0, -1.0, 1.0], [-1.0, 0.0, 0.0], [1.0, 0.0, 2.0 * SQRT_2 * k]]
    }

    #[test]
    fn roots_satisfy_cubic_and_vieta() {
        for k in KS {
            let es = medium_eigensystem(k).unwrap();
            let [l1, l2, l3] = es.lambdas;
            for l in es.lambdas {
                assert!(cubic(k, l).abs() < 1e-10, "k={k} residual {}", cubic(k, l));
            }
            assert!((l1 + l2 + l3 - 2.0 * SQRT_2 * k).abs() < 1e-9);
            assert!((l1 * l2 + l1 * l3 + l2 * l3 + 2.0).abs() < 1e-9);
            assert!((l1 * l2 * l3 + 2.0 * SQRT_2 * k).abs() < 1e-9);
            assert!(l1 < l2 && l2 < l3);
        }
    }

    #[test]
    fn vieta_k2() {
        let es = medium_eigensystem(2.0).unwrap();
        assert!((es.lambdas.iter().sum::<f64>() - 4.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn alpha_linear_conditions() {
        for k in KS {
            let es = medium_eigensystem(k).unwrap();
            let s0: f64 = es.alphas.iter().sum();
            let s_inv: f64 = es.alphas.iter().zip(&es.lambdas).map(|(a, l)| a / l).sum();
            let s_lin: f64 = es.alphas.iter().zip(&es.lambdas).map(|(a, l)| a * l).sum();
            assert!(s0.abs() < 1e-10);
            assert!((s_inv + 1.0).abs() < 1e-10);
            assert!((s_lin + 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn alphas_permutation_consistent() {
        let es = medium_eigensystem(1.3).unwrap();
        let [l1, l2, l3] = es.lambdas;
        let permuted = alphas(&[l3, l1, l2]);
        for (x, y) in permuted.iter().zip([es.alphas[2], es.alphas[0], es.alphas[1]]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenvectors_of_h2() {
        for k in KS {
            let es = medium_eigensystem(k).unwrap();
            let h = h2(k);
            for i in 0..3 {
                let v = es.eigenvector(i);
                for r in 0..3 {
                    let hv: f64 = (0..3).map(|c| h[r][c] * v[c]).sum();
                    assert!((hv - es.lambdas[i] * v[r]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn small_k_limit() {
        let es = medium_eigensystem(1e-8).unwrap();
        let want = [-SQRT_2, 0.0, SQRT_2];
        for (l, w) in es.lambdas.iter().zip(want) {
            assert!((l - w).abs() < 1e-7);
        }
        assert!(medium_eigensystem(0.0).is_err());
        assert!(medium_eigensystem(-1.0).is_err());
    }

    #[test]
    fn trig_closed_forms_match() {
        let mut k = 0.1;
        while k <= 10.0 + 1e-12 {
            let mut trig = trig_roots(k);
            for l in trig {
                assert!(cubic(k, l).abs() < 1e-8, "k={k}");
            }
            trig.sort_by(f64::total_cmp);
            let num = cubic_roots(k);
            for (a, b) in trig.iter().zip(&num) {
                assert!((a - b).abs() < 1e-9);
            }
            k += 0.05;
        }
    }

    #[test]
    fn sin_theta_radicand_variants() {
        use SinThetaRadicand::*;
        // the two forms agree at k = 1
        assert!(trig_identity_residual(1.0, CubicMiddleTerm) < 1e-14);
        assert!(trig_identity_residual(1.0, QuadraticMiddleTerm) < 1e-14);
        assert!(trig_identity_residual(2.0, CubicMiddleTerm) > 0.01);
        let mut k = 0.1;
        while k <= 10.0 {
            assert!(trig_identity_residual(k, QuadraticMiddleTerm) < 1e-12, "k={k}");
            k += 0.01;
        }
    }

    #[test]
    fn probability_starts_at_zero() {
        for k in KS {
            let es = medium_eigensystem(k).unwrap();
            assert!(medium_probability(&es, 0.0).abs() < 1e-10);
        }
    }

    #[test]
    fn probability_matches_evolved_amplitude() {
        let es = medium_eigensystem(0.7).unwrap();
        for t in [0.3, 1.1, 4.0] {
            let amp = es.evolved_sigma(t);
            assert!((amp[0].norm_sqr() - medium_probability(&es, t)).abs() < 1e-12);
            let norm: f64 = amp.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn k1_runtime() {
        let es = medium_eigensystem(1.0).unwrap();
        let m = 1000;
        let rt = medium_runtime(&es, m, 1000f64.sqrt()).unwrap();
        assert!((rt.root - 1.766).abs() < 0.005, "{rt:?}");
        assert!((rt.t_star - 81.45).abs() < 0.5);
        assert!((rt.p_star - 0.82).abs() < 0.01);
    }

    #[test]
    fn root_not_found_in_short_window() {
        let es = medium_eigensystem(1.0).unwrap();
        assert!(matches!(medium_runtime_scan(&es, 1000, 31.6, 1.0), Err(Error::RootNotFound { .. })));
    }

    #[test]
    fn medium_state_is_normalized_and_has_no_c() {
        let es = medium_eigensystem(1.0).unwrap();
        let s = medium_state(&es, 1.766).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(s.amplitudes[2], Complex64::new(0.0, 0.0));
        assert!((s.probability(0) - medium_probability(&es, 1.766)).abs() < 1e-9);
    }
}

//! Exact evolution of the reduced system through the eigendecomposition of
//! its 4×4 Hamiltonian.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_m, check_positive, invalid, Error, Result};
use crate::output::fmt_sig;
use crate::reduced::{self, build_hamiltonian, Matrix4, ReducedHamiltonian, ReducedState};

/// Eigenpairs of a real symmetric 4×4 matrix, eigenvalues ascending.
///
/// `eigenvectors[i]` belongs to `eigenvalues[i]`; its largest-magnitude
/// component is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: [f64; 4],
    pub eigenvectors: [[f64; 4]; 4],
}

const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi rotations until the off-diagonal part vanishes.
fn jacobi(matrix: &Matrix4) -> ([f64; 4], Matrix4) {
    let mut a = *matrix;
    // columns of v are the eigenvectors
    let mut v = [[0.0; 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..4).flat_map(|p| (p + 1..4).map(move |q| (p, q))).map(|(p, q)| a[p][q] * a[p][q]).sum();
        if off == 0.0 {
            break;
        }
        for p in 0..3 {
            for q in p + 1..4 {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..4 {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2], a[3][3]], v)
}

impl SpectralDecomposition {
    pub fn of_matrix(matrix: &Matrix4) -> Self {
        let (values, v) = jacobi(matrix);
        let mut order = [0usize, 1, 2, 3];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let mut eigenvalues = [0.0; 4];
        let mut eigenvectors = [[0.0; 4]; 4];
        for (slot, &i) in order.iter().enumerate() {
            eigenvalues[slot] = values[i];
            let mut vec = [v[0][i], v[1][i], v[2][i], v[3][i]];
            let lead = vec.iter().copied().reduce(|x, y| if y.abs() > x.abs() { y } else { x }).unwrap();
            if lead < 0.0 {
                vec.iter_mut().for_each(|x| *x = -*x);
            }
            eigenvectors[slot] = vec;
        }
        SpectralDecomposition { eigenvalues, eigenvectors }
    }

    /// `Σ λᵢ vᵢvᵢᵀ`
    pub fn reconstruct(&self) -> Matrix4 {
        let mut out = [[0.0; 4]; 4];
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..4 {
                for j in 0..4 {
                    out[i][j] += lambda * v[i] * v[j];
                }
            }
        }
        out
    }
}

pub fn decompose(h: &ReducedHamiltonian) -> SpectralDecomposition {
    SpectralDecomposition::of_matrix(&h.matrix)
}

/// `e^{-iHt}` applied through a fixed spectral decomposition.
///
/// The mean diagonal entry is removed before diagonalizing and restored as a
/// global phase, so a large energy offset does not eat into the precision of
/// the relative phases that probabilities depend on.
#[derive(Debug, Clone, Copy)]
pub struct Propagator {
    spectrum: SpectralDecomposition,
    offset: f64,
    centered: [f64; 4],
}

impl Propagator {
    pub fn new(matrix: &Matrix4) -> Self {
        let offset = (0..4).map(|i| matrix[i][i]).sum::<f64>() / 4.0;
        let mut shifted = *matrix;
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] -= offset;
        }
        let mut spectrum = SpectralDecomposition::of_matrix(&shifted);
        let centered = spectrum.eigenvalues;
        spectrum.eigenvalues = centered.map(|e| e + offset);
        Propagator { spectrum, offset, centered }
    }

    pub fn from_hamiltonian(h: &ReducedHamiltonian) -> Self {
        Self::new(&h.matrix)
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// Components `⟨vᵢ|ψ⟩` of a state in the eigenbasis.
    pub fn coefficients(&self, state: &ReducedState) -> [Complex64; 4] {
        self.spectrum.eigenvectors.map(|v| v.iter().zip(&state.amplitudes).map(|(x, z)| z * *x).sum())
    }

    /// Amplitude on basis index `i` at time `t` given eigenbasis coefficients.
    #[inline]
    pub fn amplitude(&self, coefficients: &[Complex64; 4], i: usize, t: f64) -> Complex64 {
        let v = &self.spectrum.eigenvectors;
        let z: Complex64 =
            (0..4).map(|k| coefficients[k] * Complex64::from_polar(1.0, -self.centered[k] * t) * v[k][i]).sum();
        z * Complex64::from_polar(1.0, -self.offset * t)
    }

    /// Evolve for any real `t`; negative times run backwards.
    pub fn evolve(&self, state: &ReducedState, t: f64) -> ReducedState {
        let c = self.coefficients(state);
        ReducedState { amplitudes: std::array::from_fn(|i| self.amplitude(&c, i, t)) }
    }
}

pub fn propagate(h: &ReducedHamiltonian, state: &ReducedState, t: f64) -> Result<ReducedState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid(format!("t must be a nonnegative finite number, got {t}")));
    }
    Ok(Propagator::from_hamiltonian(h).evolve(state, t))
}

/// Success probability `p_a` and inferred success `p_a + p_c` evaluated from
/// the uniform initial state.
#[derive(Debug, Clone)]
pub struct SuccessCurve {
    propagator: Propagator,
    coefficients: [Complex64; 4],
}

impl SuccessCurve {
    pub fn new(m: usize, w: f64, gamma: f64) -> Result<Self> {
        let h = build_hamiltonian(m, w, gamma)?;
        Ok(Self::from_matrix(&h.matrix, &reduced::initial_state(m)?))
    }

    pub fn from_matrix(matrix: &Matrix4, start: &ReducedState) -> Self {
        let propagator = Propagator::new(matrix);
        let coefficients = propagator.coefficients(start);
        SuccessCurve { propagator, coefficients }
    }

    pub fn p_a(&self, t: f64) -> f64 {
        self.propagator.amplitude(&self.coefficients, reduced::A, t).norm_sqr()
    }

    pub fn p_c(&self, t: f64) -> f64 {
        self.propagator.amplitude(&self.coefficients, reduced::C, t).norm_sqr()
    }

    pub fn p_inferred(&self, t: f64) -> f64 {
        self.p_a(t) + self.p_c(t)
    }
}

/// Sampled success probabilities on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub p_a: Vec<f64>,
    pub p_inferred: Vec<f64>,
}

impl EvolutionTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,p_a,p_inferred")?;
        for i in 0..self.len() {
            writeln!(out, "{},{},{}", fmt_sig(self.times[i]), fmt_sig(self.p_a[i]), fmt_sig(self.p_inferred[i]))?;
        }
        Ok(())
    }
}

/// Grid `{0, dt, 2dt, ...}` up to and including `t_max` (within rounding).
pub(crate) fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    check_positive("dt", dt)?;
    check_positive("t_max", t_max)?;
    if dt >= t_max {
        return Err(invalid(format!("dt ({dt}) must be smaller than t_max ({t_max})")));
    }
    let n = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| i as f64 * dt).collect())
}

pub fn trace(m: usize, w: f64, gamma: f64, t_max: f64, dt: f64) -> Result<EvolutionTrace> {
    let times = time_grid(t_max, dt)?;
    let curve = SuccessCurve::new(m, w, gamma)?;
    Ok(trace_curve(&curve, times))
}

pub(crate) fn trace_curve(curve: &SuccessCurve, times: Vec<f64>) -> EvolutionTrace {
    let (p_a, p_inferred) = times
        .iter()
        .map(|&t| {
            let a = curve.p_a(t);
            (a, a + curve.p_c(t))
        })
        .unzip();
    EvolutionTrace { times, p_a, p_inferred }
}

/// Time and height of the first success-probability peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub t: f64,
    pub p: f64,
}

/// Search window and resolution for [`first_maximum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakSearch {
    pub t_max: f64,
    pub dt: f64,
    pub refine_tol: f64,
    /// Minimum prominence of an accepted peak as a fraction of the sampled
    /// range `max p - min p`.
    pub min_prominence: f64,
}

/// Default for [`PeakSearch::min_prominence`].
pub const DEFAULT_MIN_PROMINENCE: f64 = 0.5;

impl PeakSearch {
    /// Grid step `0.01√M`, refinement `1e-6√M`, window `3π√M`.
    pub fn for_m(m: usize) -> Self {
        let root = (m as f64).sqrt();
        PeakSearch {
            t_max: 3.0 * std::f64::consts::PI * root,
            dt: 0.01 * root,
            refine_tol: 1e-6 * root,
            min_prominence: DEFAULT_MIN_PROMINENCE,
        }
    }
}

pub fn first_maximum(m: usize, w: f64, gamma: f64, t_max: f64, dt: f64, refine_tol: f64) -> Result<Peak> {
    first_maximum_with(m, w, gamma, PeakSearch { t_max, dt, refine_tol, min_prominence: DEFAULT_MIN_PROMINENCE })
}

pub fn first_maximum_with(m: usize, w: f64, gamma: f64, search: PeakSearch) -> Result<Peak> {
    check_m(m)?;
    let curve = SuccessCurve::new(m, w, gamma)?;
    first_maximum_of(|t| curve.p_a(t), search)
}

/// Highest point of the first prominent peak of `f`, located on the grid
/// `{0, dt, ..., t_max}` and refined by golden-section search.
///
/// Away from the smallest weights `p_a` carries a fast, small oscillation
/// between `a` and `c` on top of the search envelope. Its crests are local
/// maxima too, so a grid maximum only opens a peak once its prominence
/// reaches `min_prominence` of the sampled range. Every crest of that peak
/// (the samples above half the required prominence below it) is refined and
/// the highest is returned.
pub fn first_maximum_of(f: impl Fn(f64) -> f64, search: PeakSearch) -> Result<Peak> {
    let PeakSearch { t_max, dt, refine_tol, min_prominence } = search;
    check_positive("refine_tol", refine_tol)?;
    if !(0.0..=1.0).contains(&min_prominence) {
        return Err(invalid(format!("min_prominence must lie in [0, 1], got {min_prominence}")));
    }
    let times = time_grid(t_max, dt)?;
    let p: Vec<f64> = times.iter().map(|&t| f(t)).collect();
    let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
    let needed = min_prominence * (hi - lo);
    let is_crest = |i: usize| p[i] > p[i - 1] && p[i] >= p[i + 1];
    let last = p.len() - 1;
    let first = (1..last).find(|&i| is_crest(i) && prominence(&p, i) >= needed).ok_or(Error::NoMaximum { t_max })?;

    let floor = p[first] - 0.5 * needed;
    let start = (0..first).rev().find(|&i| p[i] < floor).unwrap_or(0);
    let end = (first + 1..=last).find(|&i| p[i] < floor).unwrap_or(last);
    let best = (start.max(1)..end.min(last))
        .filter(|&i| is_crest(i))
        .map(|i| {
            let (t, v) = golden_max(&f, times[i - 1], times[i + 1], refine_tol);
            if v >= p[i] {
                Peak { t, p: v }
            } else {
                Peak { t: times[i], p: p[i] }
            }
        })
        .reduce(|a, b| if b.p > a.p { b } else { a })
        .expect("the opening crest lies inside its own peak");
    Ok(best)
}

/// Height of `p[i]` above the higher of the two lowest points separating it
/// from a strictly higher sample (or the end of the grid) on either side.
fn prominence(p: &[f64], i: usize) -> f64 {
    let peak = p[i];
    let mut left = peak;
    for &x in p[..i].iter().rev() {
        if x > peak {
            break;
        }
        left = left.min(x);
    }
    let mut right = peak;
    for &x in &p[i + 1..] {
        if x > peak {
            break;
        }
        right = right.min(x);
    }
    peak - left.max(right)
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

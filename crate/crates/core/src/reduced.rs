//! Four-dimensional invariant subspace spanned by the marked vertex `a`, the
//! uniform superposition `b` over the rest of its clique, its link partner
//! `c`, and the uniform superposition `d` over the rest of the other clique.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_m, check_positive, invalid, Result};

pub type Matrix4 = [[f64; 4]; 4];

/// Basis indices in the order `(a, b, c, d)`.
pub const A: usize = 0;
pub const B: usize = 1;
pub const C: usize = 2;
pub const D: usize = 3;

/// Amplitudes over `(a, b, c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedState {
    pub amplitudes: [Complex64; 4],
}

impl ReducedState {
    /// Normalizes `amplitudes`. Fails on the zero vector.
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let n = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(invalid("state must have nonzero finite norm"));
        }
        Ok(ReducedState { amplitudes: amplitudes.map(|z| z / n) })
    }

    pub fn from_real(amplitudes: [f64; 4]) -> Result<Self> {
        Self::new(amplitudes.map(|x| Complex64::new(x, 0.0)))
    }

    /// Basis state with all weight on index `i`.
    pub fn basis(i: usize) -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); 4];
        amplitudes[i] = Complex64::new(1.0, 0.0);
        ReducedState { amplitudes }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn probability(&self, i: usize) -> f64 {
        self.amplitudes[i].norm_sqr()
    }
}

/// Equal superposition over all `2M` vertices, expressed in the subspace.
pub fn initial_state(m: usize) -> Result<ReducedState> {
    check_m(m)?;
    let r = ((m - 1) as f64).sqrt();
    let s = 1.0 / ((2 * m) as f64).sqrt();
    Ok(ReducedState { amplitudes: [s, r * s, s, r * s].map(|x| Complex64::new(x, 0.0)) })
}

/// Search Hamiltonian `-γA - |a><a|` restricted to the subspace. The degree
/// term is omitted; it only shifts all energies by a constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedHamiltonian {
    pub m: usize,
    pub w: f64,
    pub gamma: f64,
    pub matrix: Matrix4,
}

pub fn build_hamiltonian(m: usize, w: f64, gamma: f64) -> Result<ReducedHamiltonian> {
    check_m(m)?;
    check_positive("w", w)?;
    check_positive("gamma", gamma)?;
    let r = ((m - 1) as f64).sqrt();
    let diag = (m - 2) as f64;
    let g = -gamma;
    let matrix = [
        [-1.0, g * r, g * w, 0.0],
        [g * r, g * diag, 0.0, g * w],
        [g * w, 0.0, 0.0, g * r],
        [0.0, g * w, g * r, g * diag],
    ];
    Ok(ReducedHamiltonian { m, w, gamma, matrix })
}

impl ReducedHamiltonian {
    /// Matrix with `c * I` added.
    pub fn shifted(&self, c: f64) -> Matrix4 {
        let mut out = self.matrix;
        for (i, row) in out.iter_mut().enumerate() {
            row[i] += c;
        }
        out
    }
}

/// Jumping rate at which the `a` and `(b + d)/√2` energies cross when the
/// link terms are kept to leading order: `(M + w) / (M (M + 2w))`. Used for
/// every weight scale.
pub fn critical_gamma(m: usize, w: f64) -> f64 {
    let m = m as f64;
    (m + w) / (m * (m + 2.0 * w))
}

/// Critical rate ignoring the links entirely, `1/M`.
pub fn gamma_unlinked(m: usize) -> f64 {
    1.0 / m as f64
}

/// Critical rate with only the `b~d` links at leading order, `1/(M + w)`.
pub fn gamma_linked_leading(m: usize, w: f64) -> f64 {
    1.0 / (m as f64 + w)
}

/// First-order expansion `1/M - w/M²`.
pub fn gamma_first_order(m: usize, w: f64) -> f64 {
    let m = m as f64;
    1.0 / m - w / (m * m)
}

/// Scale `M^{-3/2}` below which an error in γ leaves the search unaffected.
pub fn gamma_precision_bound(m: usize) -> f64 {
    (m as f64).powf(-1.5)
}

//! Evolution in the full `2M`-dimensional vertex space, used to check the
//! four-dimensional reduction. Nothing here is derived from [`crate::reduced`].
//!
//! Memory: the Hamiltonian and its eigenvectors are dense, `2 (2M)²` doubles.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{check_positive, invalid, Error, Result};
use crate::graph::{WeightedGraph, DEFAULT_MAX_M};
use crate::reduced::Matrix4;

/// Environment variable overriding the full-space size cap.
pub const MAX_M_ENV: &str = "QWSEARCH_MAX_FULLSPACE_M";

/// Cap from [`MAX_M_ENV`], or the default when unset.
pub fn max_m_from_env() -> Result<usize> {
    match std::env::var(MAX_M_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| invalid(format!("{MAX_M_ENV} must be a positive integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_MAX_M),
    }
}

/// Number of doubles allocated by [`FullEvolution::new`] for clique size `m`.
pub fn allocation_bound(m: usize) -> usize {
    let n = 2 * m;
    2 * n * n
}

/// Amplitudes indexed by vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    pub amplitudes: Vec<Complex64>,
}

impl FullState {
    pub fn uniform(n: usize) -> Self {
        let x = 1.0 / (n as f64).sqrt();
        FullState { amplitudes: vec![Complex64::new(x, 0.0); n] }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn probability(&self, v: usize) -> f64 {
        self.amplitudes[v].norm_sqr()
    }
}

/// `-γA - |a⟩⟨a|` with the marked vertex at index 0.
pub fn full_hamiltonian(g: &WeightedGraph, gamma: f64) -> Result<DMatrix<f64>> {
    full_hamiltonian_capped(g, gamma, DEFAULT_MAX_M)
}

pub fn full_hamiltonian_capped(g: &WeightedGraph, gamma: f64, max_m: usize) -> Result<DMatrix<f64>> {
    check_positive("gamma", gamma)?;
    if g.m() > max_m {
        return Err(Error::SizeLimit { m: g.m(), cap: max_m });
    }
    let n = g.vertex_count();
    let mut h = DMatrix::from_fn(n, n, |i, j| -gamma * g.weight(i, j));
    h[(g.marked(), g.marked())] -= 1.0;
    Ok(h)
}

/// Spectral propagator for the full Hamiltonian, started from the uniform
/// superposition.
pub struct FullEvolution {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    // ⟨vₖ|s⟩, real because both are real
    overlaps: DVector<f64>,
}

impl FullEvolution {
    pub fn new(g: &WeightedGraph, gamma: f64) -> Result<Self> {
        Self::with_cap(g, gamma, DEFAULT_MAX_M)
    }

    pub fn with_cap(g: &WeightedGraph, gamma: f64, max_m: usize) -> Result<Self> {
        let h = full_hamiltonian_capped(g, gamma, max_m)?;
        let n = h.nrows();
        let eig = SymmetricEigen::new(h);
        let s = DVector::from_element(n, 1.0 / (n as f64).sqrt());
        let overlaps = eig.eigenvectors.tr_mul(&s);
        Ok(FullEvolution { eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors, overlaps })
    }

    pub fn amplitude(&self, v: usize, t: f64) -> Complex64 {
        self.eigenvalues
            .iter()
            .zip(self.overlaps.iter())
            .enumerate()
            .map(|(k, (&e, &c))| Complex64::from_polar(c * self.eigenvectors[(v, k)], -e * t))
            .sum()
    }

    pub fn p_a(&self, t: f64) -> f64 {
        self.amplitude(0, t).norm_sqr()
    }

    pub fn state(&self, t: f64) -> FullState {
        let n = self.eigenvalues.len();
        let phased: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .zip(self.overlaps.iter())
            .map(|(&e, &c)| Complex64::from_polar(c, -e * t))
            .collect();
        let amplitudes = (0..n).map(|v| (0..n).map(|k| phased[k] * self.eigenvectors[(v, k)]).sum()).collect();
        FullState { amplitudes }
    }
}

pub fn full_evolve(g: &WeightedGraph, gamma: f64, t: f64) -> Result<FullState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid(format!("t must be a nonnegative finite number, got {t}")));
    }
    Ok(FullEvolution::new(g, gamma)?.state(t))
}

/// Orthonormal `(a, b, c, d)` vectors built from the vertex classes.
pub fn subspace_basis(g: &WeightedGraph) -> [DVector<f64>; 4] {
    let n = g.vertex_count();
    let m = g.m();
    let r = 1.0 / ((m - 1) as f64).sqrt();
    let a = DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 });
    let b = DVector::from_fn(n, |i, _| if (1..m).contains(&i) { r } else { 0.0 });
    let c = DVector::from_fn(n, |i, _| if i == m { 1.0 } else { 0.0 });
    let d = DVector::from_fn(n, |i, _| if i > m { r } else { 0.0 });
    [a, b, c, d]
}

/// `⟨x|H|y⟩` over the subspace basis.
pub fn project(h: &DMatrix<f64>, g: &WeightedGraph) -> Matrix4 {
    let basis = subspace_basis(g);
    let mut out = [[0.0; 4]; 4];
    for (i, x) in basis.iter().enumerate() {
        let hx = h * x;
        for (j, y) in basis.iter().enumerate() {
            out[i][j] = hx.dot(y);
        }
    }
    out
}

/// Largest `|p_a(full) - p_a(reduced)|` over the sample times.
pub fn subspace_residual(g: &WeightedGraph, gamma: f64, t_samples: &[f64]) -> Result<f64> {
    subspace_residual_capped(g, gamma, t_samples, DEFAULT_MAX_M)
}

pub fn subspace_residual_capped(g: &WeightedGraph, gamma: f64, t_samples: &[f64], max_m: usize) -> Result<f64> {
    let full = FullEvolution::with_cap(g, gamma, max_m)?;
    let reduced = crate::evolve::SuccessCurve::new(g.m(), g.w(), gamma)?;
    Ok(t_samples.iter().map(|&t| (full.p_a(t) - reduced.p_a(t)).abs()).fold(0.0, f64::max))
}

/// Largest singular value of `-γA`, via the full eigendecomposition.
pub fn walk_operator_norm(g: &WeightedGraph, gamma: f64) -> f64 {
    let n = g.vertex_count();
    let a = DMatrix::from_fn(n, n, |i, j| -gamma * g.weight(i, j));
    SymmetricEigen::new(a).eigenvalues.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_linked_complete;
    use crate::reduced::{build_hamiltonian, critical_gamma};
    use std::f64::consts::PI;

    #[test]
    fn m2_hamiltonian() {
        let g = build_linked_complete(2, 1.0).unwrap();
        let h = full_hamiltonian(&g, 1.0).unwrap();
        let want = DMatrix::from_row_slice(
            4,
            4,
            &[-1.0, -1.0, -1.0, 0.0, -1.0, 0.0, 0.0, -1.0, -1.0, 0.0, 0.0, -1.0, 0.0, -1.0, -1.0, 0.0],
        );
        assert_eq!(h, want);
    }

    #[test]
    fn projection_reproduces_reduced_matrix() {
        let (m, w) = (8, 2.0);
        let gamma = critical_gamma(m, w);
        let g = build_linked_complete(m, w).unwrap();
        let p = project(&full_hamiltonian(&g, gamma).unwrap(), &g);
        let r = build_hamiltonian(m, w, gamma).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((p[i][j] - r.matrix[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn walk_row_sums() {
        let (m, w, gamma) = (6, 1.5, 0.2);
        let g = build_linked_complete(m, w).unwrap();
        let h = full_hamiltonian(&g, gamma).unwrap();
        for i in 0..2 * m {
            let mut s: f64 = h.row(i).iter().sum();
            if i == 0 {
                s += 1.0;
            }
            assert!((s + gamma * (m as f64 + w - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_at_zero() {
        let g = build_linked_complete(5, 1.0).unwrap();
        let s = full_evolve(&g, 0.2, 0.0).unwrap();
        for z in &s.amplitudes {
            assert!((z - Complex64::new(0.1f64.sqrt(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn m32_small_weight_peak() {
        let (m, w) = (32, 1.0);
        let g = build_linked_complete(m, w).unwrap();
        let s = full_evolve(&g, critical_gamma(m, w), PI * (m as f64).sqrt() / 2.0).unwrap();
        let p = s.probability(0);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((p - 0.5).abs() < 0.05, "{p}");
        // regression pin
        assert!((p - 0.533676).abs() < 1e-5, "{p}");
    }

    #[test]
    fn color_classes_move_together() {
        let (m, w) = (9, 3.0);
        let g = build_linked_complete(m, w).unwrap();
        let ev = FullEvolution::new(&g, critical_gamma(m, w)).unwrap();
        for t in [0.0, 1.3, 7.0, 20.0] {
            let s = ev.state(t);
            for v in 2..m {
                assert!((s.amplitudes[v] - s.amplitudes[1]).norm() < 1e-10);
                assert!((s.amplitudes[v + m] - s.amplitudes[m + 1]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn residual_examples() {
        let samples = [0.0, 5.0, 10.0, 20.0];
        let g = build_linked_complete(16, 1.0).unwrap();
        assert!(subspace_residual(&g, critical_gamma(16, 1.0), &samples).unwrap() < 1e-8);
        let g = build_linked_complete(2, 1.0).unwrap();
        assert!(subspace_residual(&g, critical_gamma(2, 1.0), &samples).unwrap() < 1e-8);
        let g = build_linked_complete(64, 640.0).unwrap();
        assert!(subspace_residual(&g, critical_gamma(64, 640.0), &samples).unwrap() < 1e-8);
    }

    #[test]
    fn size_cap() {
        let g = build_linked_complete(10, 1.0).unwrap();
        assert!(matches!(full_hamiltonian_capped(&g, 0.1, 4), Err(Error::SizeLimit { m: 10, cap: 4 })));
        assert_eq!(allocation_bound(10), 800);
    }

    #[test]
    fn walk_norm_matches_degree() {
        for (m, w) in [(4usize, 2.0), (10, 0.5), (7, 30.0)] {
            let g = build_linked_complete(m, w).unwrap();
            let gamma = critical_gamma(m, w);
            let norm = walk_operator_norm(&g, gamma);
            assert!((norm - gamma * (m as f64 + w - 1.0)).abs() < 1e-12);
        }
    }
}

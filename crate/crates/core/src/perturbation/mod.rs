//! Closed-form and semi-analytic predictions of runtime and success
//! probability for each weight scale.

pub mod medium;

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_m, check_positive, invalid, Result};
use crate::reduced::{critical_gamma, gamma_linked_leading, gamma_unlinked, ReducedState};

pub use medium::{medium_eigensystem, medium_probability, medium_runtime, MediumEigensystem, MediumRuntime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeTag {
    Small,
    Medium,
    Large,
    XL,
    XXL,
}

impl RegimeTag {
    pub const ALL: [RegimeTag; 5] =
        [RegimeTag::Small, RegimeTag::Medium, RegimeTag::Large, RegimeTag::XL, RegimeTag::XXL];

    /// Whether measuring `c` lets the searcher name `a`, lifting success to 1.
    pub fn inference_applies(self) -> bool {
        matches!(self, RegimeTag::Large | RegimeTag::XL | RegimeTag::XXL)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegimeTag::Small => "Small",
            RegimeTag::Medium => "Medium",
            RegimeTag::Large => "Large",
            RegimeTag::XL => "XL",
            RegimeTag::XXL => "XXL",
        }
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Weight scale of a finite instance: `k = w/√M`, `r = w/M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime {
    pub tag: RegimeTag,
    pub k: f64,
    pub r: f64,
}

/// Cutoffs separating the weight scales on finite instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub k_lo: f64,
    pub k_hi: f64,
    pub r_lo: f64,
    pub r_hi: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { k_lo: 0.1, k_hi: 3.0, r_lo: 0.5, r_hi: 10.0 }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi;
        if !ok(self.k_lo, self.k_hi) || !ok(self.r_lo, self.r_hi) {
            return Err(invalid(format!("thresholds must satisfy 0 < lo < hi: {self:?}")));
        }
        Ok(())
    }
}

/// Small if `k ≤ k_lo`; otherwise XXL if `r ≥ r_hi`, XL if `r > r_lo`,
/// Medium if `k < k_hi`, else Large.
pub fn classify(m: usize, w: f64, thresholds: &Thresholds) -> Result<Regime> {
    check_m(m)?;
    check_positive("w", w)?;
    thresholds.validate()?;
    let mf = m as f64;
    let (k, r) = (w / mf.sqrt(), w / mf);
    let tag = if k <= thresholds.k_lo {
        RegimeTag::Small
    } else if r >= thresholds.r_hi {
        RegimeTag::XXL
    } else if r > thresholds.r_lo {
        RegimeTag::XL
    } else if k < thresholds.k_hi {
        RegimeTag::Medium
    } else {
        RegimeTag::Large
    };
    Ok(Regime { tag, k, r })
}

/// Predicted final state. When `phase_unspecified` is set the amplitude on
/// `a` is only known up to a phase factor and is reported as its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedState {
    pub state: ReducedState,
    pub phase_unspecified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimePrediction {
    pub regime: Regime,
    pub gamma_c: f64,
    pub t_star: f64,
    pub p_star: f64,
    pub p_effective: f64,
    pub expected_runtime: f64,
    pub final_state: PredictedState,
}

/// JSON shape of a [`RegimePrediction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub regime: RegimeTag,
    pub k: f64,
    pub r: f64,
    pub gamma_c: f64,
    pub t_star: f64,
    pub p_star: f64,
    pub p_effective: f64,
    pub expected_runtime: f64,
    /// `[re, im]` pairs in the order `(a, b, c, d)`.
    pub final_state_amplitudes: [[f64; 2]; 4],
    pub final_state_phase_unspecified: bool,
}

impl RegimePrediction {
    pub fn record(&self) -> PredictionRecord {
        PredictionRecord {
            regime: self.regime.tag,
            k: self.regime.k,
            r: self.regime.r,
            gamma_c: self.gamma_c,
            t_star: self.t_star,
            p_star: self.p_star,
            p_effective: self.p_effective,
            expected_runtime: self.expected_runtime,
            final_state_amplitudes: self.final_state.state.amplitudes.map(|z| [z.re, z.im]),
            final_state_phase_unspecified: self.final_state.phase_unspecified,
        }
    }
}

/// Links negligible: the marked clique behaves like an isolated `K_M`.
pub fn predict_small(m: usize) -> Result<RegimePrediction> {
    predict_small_with(m, 1.0, &Thresholds::default())
}

fn predict_small_with(m: usize, w: f64, thresholds: &Thresholds) -> Result<RegimePrediction> {
    check_m(m)?;
    let root = (m as f64).sqrt();
    let t_star = PI * root / 2.0;
    let p_star = 0.5;
    let h = 1.0 / SQRT_2;
    let state = ReducedState::from_real([h, 0.0, 0.0, h])?;
    Ok(RegimePrediction {
        regime: classify(m, w, thresholds)?,
        gamma_c: gamma_unlinked(m),
        t_star,
        p_star,
        p_effective: p_star,
        expected_runtime: t_star / p_star,
        final_state: PredictedState { state, phase_unspecified: true },
    })
}

/// Medium-scale prediction from the `H''` eigensystem with `k = w/√M`.
pub fn predict_medium(m: usize, w: f64) -> Result<RegimePrediction> {
    predict_medium_with(m, w, &Thresholds::default())
}

fn predict_medium_with(m: usize, w: f64, thresholds: &Thresholds) -> Result<RegimePrediction> {
    let regime = classify(m, w, thresholds)?;
    let es = medium_eigensystem(regime.k)?;
    let rt = medium_runtime(&es, m, w)?;
    Ok(RegimePrediction {
        regime,
        gamma_c: gamma_linked_leading(m, w),
        t_star: rt.t_star,
        p_star: rt.p_star,
        p_effective: rt.p_star,
        expected_runtime: expected_runtime(rt.t_star, rt.p_star, false)?,
        final_state: PredictedState { state: medium::medium_state(&es, rt.root)?, phase_unspecified: false },
    })
}

/// Large, XL and XXL weights: evolution from `(b + d)/√2` to
/// `|u⟩ ∝ (M + w)/w |a⟩ + |c⟩` in time `π/ΔE`.
pub fn predict_large_family(m: usize, w: f64) -> Result<RegimePrediction> {
    predict_large_family_with(m, w, &Thresholds::default())
}

fn predict_large_family_with(m: usize, w: f64, thresholds: &Thresholds) -> Result<RegimePrediction> {
    let regime = classify(m, w, thresholds)?;
    let mf = m as f64;
    let s = mf + w;
    let norm = (s * s + w * w).sqrt();
    let t_star = PI / SQRT_2 * mf.sqrt() * norm / s;
    let p_star = s * s / (norm * norm);
    let state = ReducedState::from_real([s / norm, 0.0, w / norm, 0.0])?;
    Ok(RegimePrediction {
        regime,
        gamma_c: critical_gamma(m, w),
        t_star,
        p_star,
        p_effective: 1.0,
        expected_runtime: expected_runtime(t_star, p_star, true)?,
        final_state: PredictedState { state, phase_unspecified: false },
    })
}

/// Prediction for whichever weight scale `(m, w)` falls into.
pub fn predict(m: usize, w: f64, thresholds: &Thresholds) -> Result<RegimePrediction> {
    match classify(m, w, thresholds)?.tag {
        RegimeTag::Small => predict_small_with(m, w, thresholds),
        RegimeTag::Medium => predict_medium_with(m, w, thresholds),
        _ => predict_large_family_with(m, w, thresholds),
    }
}

/// Single-run time divided by the success probability that classical
/// repetition has to make up for.
pub fn expected_runtime(t_star: f64, p_star: f64, inference_applies: bool) -> Result<f64> {
    if !(p_star > 0.0 && p_star <= 1.0) {
        return Err(invalid(format!("success probability must lie in (0, 1], got {p_star}")));
    }
    Ok(if inference_applies { t_star } else { t_star / p_star })
}

/// Error of the second-order expansion `1/M - w/M² + 2w²/M³` of the
/// critical rate.
pub fn taylor_check(m: usize, w: f64) -> f64 {
    let mf = m as f64;
    let series = 1.0 / mf - w / (mf * mf) + 2.0 * w * w / (mf * mf * mf);
    (critical_gamma(m, w) - series).abs()
}

/// Perturbed energies `E∓ = -1 ∓ 1/√M` of `(|b⟩ ± |a⟩)/√2` for small weights.
pub fn small_weight_energies(m: usize) -> (f64, f64) {
    let g = 1.0 / (m as f64).sqrt();
    (-1.0 - g, -1.0 + g)
}

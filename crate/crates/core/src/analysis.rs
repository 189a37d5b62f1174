//! Parameter sweeps, regime summaries and energy accounting.

use std::io::Write;

use serde::Serialize;

use crate::error::{check_m, check_positive, Result};
use crate::evolve::{first_maximum_of, PeakSearch, SuccessCurve};
use crate::output::fmt_sig;
use crate::perturbation::{self, classify, expected_runtime, RegimeTag, Thresholds};
use crate::reduced::critical_gamma;

/// Exact first peak of one instance at the critical rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactPoint {
    pub m: usize,
    pub w: f64,
    pub gamma: f64,
    pub regime: RegimeTag,
    pub t_star: f64,
    pub p_star: f64,
    /// `p_a + p_c` at `t_star`.
    pub p_inferred: f64,
    pub expected_runtime: f64,
}

pub fn exact_point(m: usize, w: f64, thresholds: &Thresholds, search: PeakSearch) -> Result<ExactPoint> {
    let regime = classify(m, w, thresholds)?.tag;
    let gamma = critical_gamma(m, w);
    let curve = SuccessCurve::new(m, w, gamma)?;
    let peak = first_maximum_of(|t| curve.p_a(t), search)?;
    Ok(ExactPoint {
        m,
        w,
        gamma,
        regime,
        t_star: peak.t,
        p_star: peak.p,
        p_inferred: curve.p_inferred(peak.t),
        expected_runtime: expected_runtime(peak.t, peak.p, regime.inference_applies())?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "M")]
    pub m: usize,
    pub w: f64,
    pub k: f64,
    pub gamma: f64,
    #[serde(rename = "t_exact")]
    pub t_star_exact: Option<f64>,
    #[serde(rename = "p_exact")]
    pub p_star_exact: Option<f64>,
    pub p_inferred_exact: Option<f64>,
    #[serde(rename = "t_pred")]
    pub t_star_predicted: Option<f64>,
    #[serde(rename = "p_pred")]
    pub p_star_predicted: Option<f64>,
    pub expected_runtime: Option<f64>,
    #[serde(rename = "regime")]
    pub regime_tag: RegimeTag,
    /// Failures of either route for this row, `None` when both succeeded.
    pub error: Option<String>,
}

pub const SWEEP_CSV_HEADER: &str = "M,w,k,gamma,t_exact,p_exact,t_pred,p_pred,expected_runtime,regime";

/// Exact and medium-scale predicted peaks along `w = k√M`.
pub fn sweep_k(m: usize, k_values: &[f64]) -> Result<Vec<SweepRow>> {
    sweep_k_with(m, k_values, &Thresholds::default(), PeakSearch::for_m(m))
}

pub fn sweep_k_with(m: usize, k_values: &[f64], thresholds: &Thresholds, search: PeakSearch) -> Result<Vec<SweepRow>> {
    check_m(m)?;
    thresholds.validate()?;
    for &k in k_values {
        check_positive("k", k)?;
    }
    let root = (m as f64).sqrt();
    let rows = k_values
        .iter()
        .map(|&k| {
            let w = k * root;
            let mut errors = Vec::new();
            let exact = exact_point(m, w, thresholds, search).map_err(|e| errors.push(e.to_string())).ok();
            let predicted = perturbation::medium_eigensystem(k)
                .and_then(|es| perturbation::medium_runtime(&es, m, w))
                .map_err(|e| errors.push(e.to_string()))
                .ok();
            // classification cannot fail after the checks above
            let regime_tag = classify(m, w, thresholds).map(|r| r.tag).unwrap_or(RegimeTag::Medium);
            SweepRow {
                m,
                w,
                k,
                gamma: critical_gamma(m, w),
                t_star_exact: exact.map(|e| e.t_star),
                p_star_exact: exact.map(|e| e.p_star),
                p_inferred_exact: exact.map(|e| e.p_inferred),
                t_star_predicted: predicted.map(|p| p.t_star),
                p_star_predicted: predicted.map(|p| p.p_star),
                expected_runtime: exact.map(|e| e.expected_runtime),
                regime_tag,
                error: (!errors.is_empty()).then(|| errors.join("; ")),
            }
        })
        .collect();
    Ok(rows)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.m,
            fmt_sig(r.w),
            fmt_sig(r.k),
            fmt_sig(r.gamma),
            opt(r.t_star_exact),
            opt(r.p_star_exact),
            opt(r.t_star_predicted),
            opt(r.p_star_predicted),
            opt(r.expected_runtime),
            r.regime_tag
        )?;
    }
    Ok(())
}

/// Operator-norm accounting of the search Hamiltonian at the critical rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    #[serde(rename = "M")]
    pub m: usize,
    pub w: f64,
    pub walk_norm: f64,
    pub oracle_norm: f64,
    pub total_bound: f64,
}

/// The adjacency of the linked complete graphs has norm `M + w - 1`.
pub fn energy_report(m: usize, w: f64) -> Result<EnergyReport> {
    check_m(m)?;
    check_positive("w", w)?;
    let walk_norm = critical_gamma(m, w) * (m as f64 + w - 1.0);
    Ok(EnergyReport { m, w, walk_norm, oracle_norm: 1.0, total_bound: walk_norm + 1.0 })
}

/// One row of the regime summary: prediction next to the exact evolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    #[serde(rename = "M")]
    pub m: usize,
    pub w: f64,
    pub prediction: perturbation::PredictionRecord,
    pub exact: ExactPoint,
}

/// Representative weights at `M = 1000`, one per regime.
pub const SUMMARY_WEIGHTS: [(RegimeTag, f64); 5] = [
    (RegimeTag::Small, 1.0),
    (RegimeTag::Medium, 31.622776601683793),
    (RegimeTag::Large, 100.0),
    (RegimeTag::XL, 3000.0),
    (RegimeTag::XXL, 20000.0),
];

pub fn regime_summary(m: usize, weights: &[f64], thresholds: &Thresholds) -> Result<Vec<SummaryRow>> {
    let search = PeakSearch::for_m(m);
    weights
        .iter()
        .map(|&w| {
            Ok(SummaryRow {
                m,
                w,
                prediction: perturbation::predict(m, w, thresholds)?.record(),
                exact: exact_point(m, w, thresholds, search)?,
            })
        })
        .collect()
}

pub const SUMMARY_CSV_HEADER: &str =
    "regime,M,w,gamma_c,t_pred,p_pred,p_effective,expected_pred,t_exact,p_exact,p_inferred_exact,expected_exact";

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], mut out: W) -> Result<()> {
    writeln!(out, "{SUMMARY_CSV_HEADER}")?;
    for r in rows {
        let p = &r.prediction;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            p.regime,
            r.m,
            fmt_sig(r.w),
            fmt_sig(p.gamma_c),
            fmt_sig(p.t_star),
            fmt_sig(p.p_star),
            fmt_sig(p.p_effective),
            fmt_sig(p.expected_runtime),
            fmt_sig(r.exact.t_star),
            fmt_sig(r.exact.p_star),
            fmt_sig(r.exact.p_inferred),
            fmt_sig(r.exact.expected_runtime),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_values() {
        let e = energy_report(2, 1.0).unwrap();
        assert!((e.walk_norm - 0.75).abs() < 1e-15);
        assert_eq!(e.total_bound, 1.75);
        let e = energy_report(1000, 1.0).unwrap();
        assert!((e.walk_norm - 1.0).abs() < 1e-2);
        let e = energy_report(1000, 100_000.0).unwrap();
        assert!(e.walk_norm > 2.0);
    }

    #[test]
    fn energy_bounded_for_moderate_weights() {
        for m in [10usize, 100, 1000, 5000] {
            let mut w = 0.01;
            while w <= m as f64 / 10.0 {
                let e = energy_report(m, w).unwrap();
                assert!((0.5..=2.0).contains(&e.walk_norm), "M={m} w={w}");
                w *= 1.5;
            }
        }
    }

    #[test]
    fn sweep_edges_of_fig5() {
        let rows = sweep_k(1000, &[0.1, 1.0, 10.0]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.error.is_none()));
        assert!((rows[0].p_star_exact.unwrap() - 0.5).abs() < 0.05);
        assert!((rows[1].p_star_exact.unwrap() - 0.82).abs() < 0.01);
        assert!((rows[1].p_star_predicted.unwrap() - 0.82).abs() < 0.01);
        assert!(rows[2].p_star_exact.unwrap() > 0.93);
        assert!(rows[2].p_star_exact > rows[1].p_star_exact);
        assert_eq!(rows[2].regime_tag, RegimeTag::Large);
    }

    #[test]
    fn sweep_marks_failed_rows() {
        let search = PeakSearch { t_max: 2.0, dt: 0.5, ..PeakSearch::for_m(1000) };
        let rows = sweep_k_with(1000, &[1.0], &Thresholds::default(), search).unwrap();
        assert!(rows[0].t_star_exact.is_none());
        assert!(rows[0].t_star_predicted.is_some());
        assert!(rows[0].error.as_deref().unwrap().contains("maximum"));
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with(SWEEP_CSV_HEADER));
        assert_eq!(s.lines().nth(1).unwrap().split(',').nth(4), Some(""));
    }

    #[test]
    fn sweep_preserves_input_order() {
        let ks = [2.0, 0.5, 1.0];
        let rows = sweep_k(100, &ks).unwrap();
        let got: Vec<f64> = rows.iter().map(|r| r.k).collect();
        assert_eq!(got, ks);
    }
}

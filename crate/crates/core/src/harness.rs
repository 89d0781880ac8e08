//! Error norms and convergence (experimental-order-of-convergence) studies.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum HarnessError {
    InvalidInput(String),
    Run(String),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::InvalidInput(m) => write!(f, "invalid input: {m}"),
            HarnessError::Run(m) => write!(f, "run failed: {m}"),
        }
    }
}

/// Weighted discrete norms of `u_h - u_ref`:
/// `l1 = sum w|e| / sum w`, `linf = max |e|`.
pub fn error_norms(u_h: &[f64], u_ref: &[f64], weights: &[f64]) -> (f64, f64) {
    assert_eq!(u_h.len(), u_ref.len());
    assert_eq!(u_h.len(), weights.len());
    let mut num = 0.0;
    let mut den = 0.0;
    let mut linf = 0.0_f64;
    for i in 0..u_h.len() {
        let e = libm::fabs(u_h[i] - u_ref[i]);
        num += weights[i] * e;
        den += weights[i];
        linf = linf.max(e);
    }
    (num / den, linf)
}

/// Unweighted mean absolute error.
pub fn average_error(u_h: &[f64], u_ref: &[f64]) -> f64 {
    assert_eq!(u_h.len(), u_ref.len());
    u_h.iter().zip(u_ref).map(|(a, b)| libm::fabs(a - b)).sum::<f64>() / u_h.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub error_l1: f64,
    pub error_linf: f64,
    /// `log(e_prev/e) / log(dt_prev/dt)`; `None` on the first row or when
    /// either error vanishes.
    pub eoc_l1: Option<f64>,
    pub eoc_linf: Option<f64>,
}

fn eoc(e_prev: f64, e: f64, dt_prev: f64, dt: f64) -> Option<f64> {
    if e_prev > 0.0 && e > 0.0 {
        Some(libm::log(e_prev / e) / libm::log(dt_prev / dt))
    } else {
        None
    }
}

/// Runs `run(dt)` for each timestep (which must be positive and strictly
/// decreasing) and tabulates errors and observed orders.
pub fn eoc_study<F>(dts: &[f64], mut run: F) -> Result<Vec<ConvergenceRow>, HarnessError>
where
    F: FnMut(f64) -> Result<(f64, f64), HarnessError>,
{
    if dts.is_empty() {
        return Err(HarnessError::InvalidInput("no timesteps".into()));
    }
    if dts.iter().any(|&dt| !(dt > 0.0)) || !dts.windows(2).all(|w| w[1] < w[0]) {
        return Err(HarnessError::InvalidInput(
            "timesteps must be positive and strictly decreasing".into(),
        ));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(dts.len());
    for &dt in dts {
        let (e1, einf) = run(dt)?;
        let (o1, oinf) = match rows.last() {
            Some(p) => (eoc(p.error_l1, e1, p.dt, dt), eoc(p.error_linf, einf, p.dt, dt)),
            None => (None, None),
        };
        rows.push(ConvergenceRow { dt, error_l1: e1, error_linf: einf, eoc_l1: o1, eoc_linf: oinf });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn norms_basic() {
        let (l1, linf) = error_norms(&[1.0, 2.0], &[0.0, 0.0], &[1.0, 3.0]);
        assert!((l1 - (1.0 + 6.0) / 4.0).abs() < 1e-15);
        assert_eq!(linf, 2.0);
        assert_eq!(average_error(&[1.0, 3.0], &[0.0, 0.0]), 2.0);
    }

    #[test]
    fn eoc_exact_fourth_order() {
        let dts = vec![0.1, 0.05, 0.025];
        let rows = eoc_study(&dts, |dt| Ok((dt.powi(4), 2.0 * dt.powi(4)))).unwrap();
        assert!(rows[0].eoc_l1.is_none());
        for r in &rows[1..] {
            assert!((r.eoc_l1.unwrap() - 4.0).abs() < 1e-12);
            assert!((r.eoc_linf.unwrap() - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eoc_zero_error_gives_none() {
        let rows = eoc_study(&[0.1, 0.05], |_| Ok((0.0, 0.0))).unwrap();
        assert!(rows[1].eoc_l1.is_none());
        assert!(rows[1].eoc_linf.is_none());
    }

    #[test]
    fn eoc_rejects_bad_dts() {
        assert!(eoc_study(&[0.05, 0.1], |_| Ok((1.0, 1.0))).is_err());
        assert!(eoc_study(&[], |_| Ok((1.0, 1.0))).is_err());
        assert!(matches!(
            eoc_study(&[0.1], |_| Err(HarnessError::Run("boom".into()))),
            Err(HarnessError::Run(_))
        ));
    }
}

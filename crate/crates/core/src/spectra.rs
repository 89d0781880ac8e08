//! Eigenvalue spectra of semidiscretizations: the optimization targets.
//!
//! A [`Spectrum`] is a finite set of eigenvalues with nonpositive real parts,
//! stored with one representative per conjugate pair (the stability constraint
//! only needs to be checked at one of the two).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::linalg::{self, DenseMatrix, LinalgError};

/// Real parts above this value are rejected at construction.
pub const RE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumError {
    /// One or more points have real part above `RE_TOL`; carries the offenders.
    PositiveRealPart(Vec<Complex64>),
    Empty,
    NonFinite,
    Linalg(LinalgError),
}

impl fmt::Display for SpectrumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumError::PositiveRealPart(pts) => {
                write!(f, "spectrum has {} point(s) with positive real part", pts.len())?;
                if let Some(p) = pts.first() {
                    write!(f, " (first offender {}+{}i)", p.re, p.im)?;
                }
                Ok(())
            }
            SpectrumError::Empty => write!(f, "spectrum is empty"),
            SpectrumError::NonFinite => write!(f, "spectrum point is not finite"),
            SpectrumError::Linalg(e) => write!(f, "eigenvalue computation failed: {e}"),
        }
    }
}

impl From<LinalgError> for SpectrumError {
    fn from(e: LinalgError) -> Self {
        SpectrumError::Linalg(e)
    }
}

/// Finite multiset of eigenvalues with `Re <= RE_TOL`, deduplicated to one
/// `Im >= 0` representative per conjugate pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    points: Vec<Complex64>,
    label: String,
}

impl Spectrum {
    /// Builds a spectrum from raw eigenvalues: validates real parts, flips
    /// negative-imaginary points onto their conjugates, and removes duplicates.
    pub fn new(raw: &[Complex64], label: &str) -> Result<Self, SpectrumError> {
        if raw.is_empty() {
            return Err(SpectrumError::Empty);
        }
        if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SpectrumError::NonFinite);
        }
        let offenders: Vec<Complex64> = raw.iter().copied().filter(|z| z.re > RE_TOL).collect();
        if !offenders.is_empty() {
            return Err(SpectrumError::PositiveRealPart(offenders));
        }
        let mut points: Vec<Complex64> = Vec::with_capacity(raw.len());
        for &z in raw {
            let rep = if z.im < 0.0 { z.conj() } else { z };
            // scale-aware duplicate merge (conjugate pairs collapse here)
            let scale = 1.0 + rep.norm();
            if !points.iter().any(|p| (p - rep).norm() <= 1e-12 * scale) {
                points.push(rep);
            }
        }
        Ok(Self { points, label: label.to_string() })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `max |lambda|` over the stored representatives.
    pub fn radius(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Spectrum of the first-order upwind operator on a uniform periodic mesh of
/// `n_cells` cells of width `dx`: `{(e^{-2 pi i k / n} - 1)/dx}`.
pub fn circulant_upwind_spectrum(n_cells: usize, dx: f64) -> Spectrum {
    assert!(n_cells >= 2, "need at least 2 cells");
    assert!(dx > 0.0, "dx must be positive");
    let n = n_cells as f64;
    let raw: Vec<Complex64> = (0..n_cells)
        .map(|k| {
            let th = -2.0 * PI * k as f64 / n;
            Complex64::new((libm::cos(th) - 1.0) / dx, libm::sin(th) / dx)
        })
        .collect();
    Spectrum::new(&raw, &format!("circulant-upwind n={n_cells} dx={dx}"))
        .expect("circulant spectrum lies in the closed left half-plane")
}

/// Spectrum of an arbitrary real operator matrix; errors if any eigenvalue has
/// real part above `RE_TOL` (an unstable semidiscretization).
pub fn operator_spectrum(a: &DenseMatrix, label: &str) -> Result<Spectrum, SpectrumError> {
    let ev = linalg::eigenvalues(a)?;
    Spectrum::new(&ev, label)
}

/// Scales every representative by `dt` (the map `lambda -> z = dt * lambda`).
pub fn scale(s: &Spectrum, dt: f64) -> Vec<Complex64> {
    assert!(dt > 0.0, "dt must be positive");
    s.points().iter().map(|z| z * dt).collect()
}

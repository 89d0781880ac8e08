//! Stability polynomials in monomial and P-ERK-constrained form.
//!
//! A degree-`E`, linear-order-`p` stability polynomial is
//! `P(z) = sum_{j=0}^{p} z^j/j! + sum_{j=p+1}^{E} alpha_j z^j`; only the free
//! coefficients `alpha` are stored. The P-ERK-constrained form expresses the
//! free coefficients linearly in the cumulative subdiagonal products `gamma`,
//! which is what makes the stability optimization convex. This module also
//! extracts the polynomial of an arbitrary explicit tableau (the construction
//! oracle), and computes internal stability polynomials and the amplification
//! factor that measures round-off growth across stages.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::butcher::ButcherTableau;
use crate::spectra::{self, Spectrum};

/// Fixed fifth coefficient of the constrained fourth-order polynomials.
pub const K1: f64 = 0.001055026310046423;
/// Fixed companion constant pairing with `K1` in the constrained form; used
/// bare, always divided by `c_{E-3}` where the closed form requires it.
pub const K2: f64 = 0.03726406530405851;

#[derive(Debug, Clone, PartialEq)]
pub enum StabPolyError {
    InvalidInput(String),
    /// `gamma` entries must be strictly positive.
    NonPositiveGamma { index: usize, value: f64 },
    /// Extracted leading coefficients deviate from `1/j!`: the tableau does
    /// not have its claimed linear order.
    OrderMismatch { j: usize, coefficient: f64, expected: f64 },
}

impl fmt::Display for StabPolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabPolyError::InvalidInput(m) => write!(f, "invalid input: {m}"),
            StabPolyError::NonPositiveGamma { index, value } => {
                write!(f, "gamma[{index}] = {value} is not strictly positive")
            }
            StabPolyError::OrderMismatch { j, coefficient, expected } => write!(
                f,
                "tableau polynomial coefficient of z^{j} is {coefficient}, expected {expected}"
            ),
        }
    }
}

fn factorial(j: usize) -> f64 {
    (1..=j).map(|i| i as f64).product()
}

/// `P(z) = sum_{j<=p} z^j/j! + sum_{j=p+1}^{E} alpha_j z^j` with the fixed
/// leading coefficients implied, never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialPolynomial {
    order_p: usize,
    degree_e: usize,
    alpha: Vec<f64>,
}

impl MonomialPolynomial {
    pub fn new(order_p: usize, degree_e: usize, alpha: Vec<f64>) -> Result<Self, StabPolyError> {
        if !(1..=4).contains(&order_p) {
            return Err(StabPolyError::InvalidInput(format!("order {order_p} not in 1..=4")));
        }
        if degree_e < order_p {
            return Err(StabPolyError::InvalidInput(format!(
                "degree {degree_e} below order {order_p}"
            )));
        }
        if alpha.len() != degree_e - order_p {
            return Err(StabPolyError::InvalidInput(format!(
                "alpha length {} != E - p = {}",
                alpha.len(),
                degree_e - order_p
            )));
        }
        if alpha.iter().any(|x| !x.is_finite()) {
            return Err(StabPolyError::InvalidInput("non-finite alpha".into()));
        }
        Ok(Self { order_p, degree_e, alpha })
    }

    pub fn order_p(&self) -> usize {
        self.order_p
    }

    pub fn degree_e(&self) -> usize {
        self.degree_e
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// All `E+1` coefficients, ascending powers.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut c: Vec<f64> = (0..=self.order_p).map(|j| 1.0 / factorial(j)).collect();
        c.extend_from_slice(&self.alpha);
        c
    }
}

/// Horner evaluation of a monomial-form polynomial.
pub fn eval_monomial(p: &MonomialPolynomial, z: Complex64) -> Complex64 {
    horner(&p.coefficients(), z)
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// The constrained fourth-order parametrization: `gamma` (length `E-5`,
/// strictly positive) together with the shared abscissae and the fixed
/// constants `k1`, `k2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedParams {
    degree_e: usize,
    gamma: Vec<f64>,
    c: Vec<f64>,
    k1: f64,
    k2: f64,
}

impl ConstrainedParams {
    /// `c` is the full abscissae vector of the `S = E` stage scheme.
    pub fn new(degree_e: usize, gamma: Vec<f64>, c: Vec<f64>) -> Result<Self, StabPolyError> {
        if degree_e < 5 {
            return Err(StabPolyError::InvalidInput(format!("degree {degree_e} below 5")));
        }
        if gamma.len() != degree_e - 5 {
            return Err(StabPolyError::InvalidInput(format!(
                "gamma length {} != E - 5 = {}",
                gamma.len(),
                degree_e - 5
            )));
        }
        if let Some((i, &g)) = gamma.iter().enumerate().find(|(_, &g)| !(g > 0.0)) {
            return Err(StabPolyError::NonPositiveGamma { index: i, value: g });
        }
        if c.len() != degree_e {
            return Err(StabPolyError::InvalidInput(format!(
                "abscissae length {} != E = {degree_e}",
                c.len()
            )));
        }
        Ok(Self { degree_e, gamma, c, k1: K1, k2: K2 })
    }

    pub fn degree_e(&self) -> usize {
        self.degree_e
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.c
    }

    /// The free coefficients `alpha_5 .. alpha_E` of the closed form:
    /// `alpha_5 = k1 + gamma_1 (k2/c_{E-3}) c_{E-4}`,
    /// `alpha_k = gamma_{k-4} (k2/c_{E-3}) c_{E-k+1} + gamma_{k-5} (k1/c_{E-3}) c_{E-k+2}`
    /// for `6 <= k <= E-1`, and `alpha_E = gamma_{E-5} (k1/c_{E-3}) c_2`.
    pub fn alpha(&self) -> Vec<f64> {
        let e = self.degree_e;
        let c = |i: usize| self.c[i - 1]; // 1-based abscissae access
        let mut alpha = vec![0.0; e - 4];
        if e == 5 {
            alpha[0] = self.k1;
            return alpha;
        }
        let k2c = self.k2 / c(e - 3);
        let k1c = self.k1 / c(e - 3);
        let g = |j: usize| self.gamma[j - 1]; // 1-based gamma access
        alpha[0] = self.k1 + g(1) * k2c * c(e - 4);
        for k in 6..e {
            alpha[k - 5] = g(k - 4) * k2c * c(e - k + 1) + g(k - 5) * k1c * c(e - k + 2);
        }
        alpha[e - 5] = g(e - 5) * k1c * c(2);
        alpha
    }

    /// Converts to monomial form (order 4, degree `E`).
    pub fn to_monomial(&self) -> MonomialPolynomial {
        MonomialPolynomial::new(4, self.degree_e, self.alpha())
            .expect("constrained alpha has length E - 4 with the z^5 slot prepended")
    }
}

/// Evaluates the constrained closed form at `z`.
pub fn eval_constrained(cp: &ConstrainedParams, z: Complex64) -> Complex64 {
    eval_monomial(&cp.to_monomial(), z)
}

/// Recovers the free subdiagonal entries `a_{3,2} .. a_{E-3,E-4}` (ordered by
/// stage index) from the cumulative products `gamma`.
pub fn gamma_to_subdiagonal(gamma: &[f64], e: usize) -> Result<Vec<f64>, StabPolyError> {
    if e < 5 || gamma.len() != e - 5 {
        return Err(StabPolyError::InvalidInput(format!(
            "gamma length {} != E - 5 for E = {e}",
            gamma.len()
        )));
    }
    if let Some((i, &g)) = gamma.iter().enumerate().find(|(_, &g)| !(g > 0.0)) {
        return Err(StabPolyError::NonPositiveGamma { index: i, value: g });
    }
    // stage s in 3..=E-3 carries a_s = gamma_{E-2-s} / gamma_{E-3-s}, gamma_0 := 1
    Ok((3..=e.saturating_sub(3))
        .map(|s| {
            let j = e - 2 - s;
            if j == 1 {
                gamma[0]
            } else {
                gamma[j - 1] / gamma[j - 2]
            }
        })
        .collect())
}

/// Forward direction of the cumulative-product map:
/// `gamma_j = prod_{i=1}^{j} a_{E-3-i+1}`.
pub fn subdiagonal_to_gamma(subdiag: &[f64], e: usize) -> Result<Vec<f64>, StabPolyError> {
    if e < 5 || subdiag.len() != e - 5 {
        return Err(StabPolyError::InvalidInput(format!(
            "subdiagonal length {} != E - 5 for E = {e}",
            subdiag.len()
        )));
    }
    if let Some((i, &a)) = subdiag.iter().enumerate().find(|(_, &a)| !(a > 0.0)) {
        return Err(StabPolyError::NonPositiveGamma { index: i, value: a });
    }
    let mut gamma = vec![0.0; e - 5];
    let mut prod = 1.0;
    for j in 1..=e - 5 {
        // a_{E-3-j+1} sits at stage E-2-j, i.e. subdiag index E-2-j-3
        prod *= subdiag[e - 5 - j];
        gamma[j - 1] = prod;
    }
    Ok(gamma)
}

/// Extracts all polynomial coefficients of an explicit tableau through the
/// stage recurrence `w_i(z) = 1 + z sum_{j<i} a_{ij} w_j(z)`,
/// `P(z) = 1 + z sum_i b_i w_i(z)`, carried exactly as coefficient vectors.
/// Verifies that the leading `p+1` coefficients match `1/j!` within `1e-12`
/// before stripping them.
pub fn polynomial_from_tableau(t: &ButcherTableau) -> Result<MonomialPolynomial, StabPolyError> {
    let s = t.stages_s();
    let p = t.order_p();
    // w[i][k]: coefficient of z^k in stage polynomial w_i
    let mut w: Vec<Vec<f64>> = Vec::with_capacity(s);
    for i in 0..s {
        let mut wi = vec![0.0; s + 1];
        wi[0] = 1.0;
        for j in 0..i {
            let aij = t.a(i, j);
            if aij == 0.0 {
                continue;
            }
            for k in 1..=s {
                wi[k] += aij * w[j][k - 1];
            }
        }
        w.push(wi);
    }
    let mut coeffs = vec![0.0; s + 2];
    coeffs[0] = 1.0;
    for i in 0..s {
        let bi = t.b()[i];
        if bi == 0.0 {
            continue;
        }
        for k in 0..=s {
            coeffs[k + 1] += bi * w[i][k];
        }
    }
    // trim exactly-zero trailing coefficients (inactive high stages)
    while coeffs.len() > p + 1 && *coeffs.last().unwrap() == 0.0 {
        coeffs.pop();
    }
    for (j, &c) in coeffs.iter().take(p + 1).enumerate() {
        let expected = 1.0 / factorial(j);
        if libm::fabs(c - expected) > 1e-12 {
            return Err(StabPolyError::OrderMismatch { j, coefficient: c, expected });
        }
    }
    let degree = coeffs.len() - 1;
    MonomialPolynomial::new(p, degree, coeffs[p + 1..].to_vec())
}

/// The row vector `Q(z) = z b^T (I - zA)^{-1}` of internal stability
/// polynomials evaluated at `z`, via backward substitution on the transposed
/// unit-triangular system.
pub fn internal_stability_row(t: &ButcherTableau, z: Complex64) -> Vec<Complex64> {
    let s = t.stages_s();
    let mut y = vec![Complex64::new(0.0, 0.0); s];
    for i in (0..s).rev() {
        let mut acc = Complex64::new(t.b()[i], 0.0);
        for j in i + 1..s {
            let aji = t.a(j, i);
            if aji != 0.0 {
                acc += z * aji * y[j];
            }
        }
        y[i] = acc;
    }
    y.iter().map(|&yi| z * yi).collect()
}

/// Maximum internal amplification factor over the scaled spectrum:
/// `max_z sum_{i=2}^{S} |Q_i(z)|`. The first stage is excluded (no initial
/// round-off enters it).
pub fn amplification_factor(t: &ButcherTableau, s: &Spectrum, dt: f64) -> f64 {
    spectra::scale(s, dt)
        .iter()
        .map(|&z| {
            internal_stability_row(t, z)
                .iter()
                .skip(1)
                .map(|q| q.norm())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

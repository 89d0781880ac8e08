//! Built-in model problems: upwind finite-volume advection on non-uniform
//! periodic meshes, the two-population predator-prey system, and their
//! reference solutions.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::integrator::{IntegratorError, LinearData, PartitionedSystem};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemError {
    InvalidInput(String),
    /// Reference-solution runs at two resolutions disagreed.
    ReferenceDisagreement { component: usize, difference: f64 },
    Integrator(IntegratorError),
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::InvalidInput(m) => write!(f, "invalid input: {m}"),
            ProblemError::ReferenceDisagreement { component, difference } => write!(
                f,
                "reference runs disagree by {difference:e} in component {component}"
            ),
            ProblemError::Integrator(e) => write!(f, "{e}"),
        }
    }
}

impl From<IntegratorError> for ProblemError {
    fn from(e: IntegratorError) -> Self {
        ProblemError::Integrator(e)
    }
}

/// Periodic one-dimensional mesh given by its cell edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    edges: Vec<f64>,
}

impl Mesh1D {
    pub fn new(edges: Vec<f64>) -> Result<Self, ProblemError> {
        if edges.len() < 3 {
            return Err(ProblemError::InvalidInput("need at least 2 cells".into()));
        }
        if !edges.windows(2).all(|w| w[1] > w[0]) {
            return Err(ProblemError::InvalidInput("edges must be strictly increasing".into()));
        }
        Ok(Self { edges })
    }

    pub fn n_cells(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn cell_sizes(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Uniform mesh with `n` cells on `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self, ProblemError> {
        if !(b > a) || n < 2 {
            return Err(ProblemError::InvalidInput(format!("bad uniform mesh: [{a},{b}], {n}")));
        }
        let dx = (b - a) / n as f64;
        Self::new((0..=n).map(|i| a + i as f64 * dx).collect())
    }
}

/// First-order upwind (Godunov) finite-volume semidiscretization of
/// `u_t + speed u_x = 0` with periodic boundaries:
/// `dU_i/dt = -speed (U_i - U_{i-1}) / dx_i`. Returns the partitioned system
/// with both the evaluator and the assembled matrix plus level masks.
pub fn advection_fv_system(
    mesh: &Mesh1D,
    speed: f64,
    level_of_cell: Vec<usize>,
    num_levels: usize,
) -> Result<PartitionedSystem, ProblemError> {
    if !(speed > 0.0) {
        return Err(ProblemError::InvalidInput(format!("speed {speed} must be positive")));
    }
    let n = mesh.n_cells();
    if level_of_cell.len() != n {
        return Err(ProblemError::InvalidInput(format!(
            "{} cell levels for {n} cells",
            level_of_cell.len()
        )));
    }
    let dx = mesh.cell_sizes();
    let mut lambda = DenseMatrix::zeros(n, n);
    for i in 0..n {
        lambda.set(i, i, -speed / dx[i]);
        lambda.set(i, (i + n - 1) % n, speed / dx[i]);
    }
    let mut masks = vec![DenseMatrix::zeros(n, n); num_levels];
    for (i, &r) in level_of_cell.iter().enumerate() {
        if r == 0 || r > num_levels {
            return Err(ProblemError::InvalidInput(format!("cell {i} level {r}")));
        }
        masks[r - 1].set(i, i, 1.0);
    }
    let lv = level_of_cell.clone();
    let dx2 = dx.clone();
    let rhs = Box::new(move |_t: f64, u: &[f64], active: &[bool], dudt: &mut [f64]| {
        for i in 0..u.len() {
            if active[lv[i] - 1] {
                let left = u[(i + u.len() - 1) % u.len()];
                dudt[i] = -speed * (u[i] - left) / dx2[i];
            }
        }
    });
    Ok(PartitionedSystem::new(
        num_levels,
        level_of_cell,
        rhs,
        Some(LinearData { lambda, masks }),
    )?)
}

/// The 96-cell non-uniform mesh on `(-1, 1)`: 16 cells of size 1/32, 64 of
/// size 1/64, 16 of size 1/32; the 64 center (fine) cells form level 2.
pub fn refined_center_mesh() -> (Mesh1D, Vec<usize>) {
    let mut edges = Vec::with_capacity(97);
    let mut x = -1.0_f64;
    edges.push(x);
    for _ in 0..16 {
        x += 1.0 / 32.0;
        edges.push(x);
    }
    for _ in 0..64 {
        x += 1.0 / 64.0;
        edges.push(x);
    }
    for _ in 0..16 {
        x += 1.0 / 32.0;
        edges.push(x);
    }
    // close the last edge exactly at 1
    *edges.last_mut().unwrap() = 1.0;
    let mesh = Mesh1D::new(edges).expect("hard-coded mesh is valid");
    let levels: Vec<usize> = (0..96).map(|i| if (16..80).contains(&i) { 2 } else { 1 }).collect();
    (mesh, levels)
}

/// Exact cell averages of `1 + sin(pi x)/2`:
/// `U_i = 1 + (cos(pi x_{i-1/2}) - cos(pi x_{i+1/2})) / (2 pi dx_i)`.
pub fn sine_ic(mesh: &Mesh1D) -> Vec<f64> {
    mesh.edges()
        .windows(2)
        .map(|w| 1.0 + (libm::cos(PI * w[0]) - libm::cos(PI * w[1])) / (2.0 * PI * (w[1] - w[0])))
        .collect()
}

/// The predator-prey system `u' = u(1 - v)`, `v' = v(u - 1)` with the prey on
/// level 1 and the predator on level 2.
pub fn lotka_volterra_system() -> PartitionedSystem {
    PartitionedSystem::new(
        2,
        vec![1, 2],
        Box::new(|_t, s, active, dsdt| {
            let (u, v) = (s[0], s[1]);
            if active[0] {
                dsdt[0] = u * (1.0 - v);
            }
            if active[1] {
                dsdt[1] = v * (u - 1.0);
            }
        }),
        None,
    )
    .expect("hard-coded system is valid")
}

/// The conserved quantity `V(u, v) = u - ln u + v - ln v` of the
/// predator-prey flow.
pub fn lotka_volterra_invariant(u: f64, v: f64) -> f64 {
    u - libm::log(u) + v - libm::log(v)
}

fn lv_rhs(u: f64, v: f64) -> (f64, f64) {
    (u * (1.0 - v), v * (u - 1.0))
}

fn lv_rk4(t_f: f64, mut u: f64, mut v: f64, dt: f64) -> (f64, f64) {
    let n = libm::round(t_f / dt) as u64;
    let h = t_f / n as f64;
    for _ in 0..n {
        let (k1u, k1v) = lv_rhs(u, v);
        let (k2u, k2v) = lv_rhs(u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let (k3u, k3v) = lv_rhs(u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let (k4u, k4v) = lv_rhs(u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    (u, v)
}

/// Tiny-step reference solution: classical RK4 at `dt = 1e-6`, confirmed by a
/// half-step (`dt = 5e-7`) rerun that must agree within `1e-12` componentwise.
pub fn lv_reference(t_f: f64, state_0: (f64, f64)) -> Result<(f64, f64), ProblemError> {
    if t_f < 0.0 {
        return Err(ProblemError::InvalidInput(format!("t_f = {t_f} < 0")));
    }
    if t_f == 0.0 {
        return Ok(state_0);
    }
    let coarse = lv_rk4(t_f, state_0.0, state_0.1, 1e-6);
    let fine = lv_rk4(t_f, state_0.0, state_0.1, 5e-7);
    let du = libm::fabs(coarse.0 - fine.0);
    let dv = libm::fabs(coarse.1 - fine.1);
    if du > 1e-12 {
        return Err(ProblemError::ReferenceDisagreement { component: 0, difference: du });
    }
    if dv > 1e-12 {
        return Err(ProblemError::ReferenceDisagreement { component: 1, difference: dv });
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{circulant_upwind_spectrum, operator_spectrum};

    #[test]
    fn fv_stencil_uniform() {
        let mesh = Mesh1D::uniform(0.0, 4.0, 4).unwrap();
        let sys = advection_fv_system(&mesh, 1.0, vec![1; 4], 1).unwrap();
        let lam = &sys.linear().unwrap().lambda;
        for i in 0..4 {
            assert_eq!(lam.get(i, i), -1.0);
            assert_eq!(lam.get(i, (i + 3) % 4), 1.0);
        }
    }

    #[test]
    fn fv_constant_state_stationary() {
        let (mesh, levels) = refined_center_mesh();
        let sys = advection_fv_system(&mesh, 1.0, levels, 2).unwrap();
        let u = vec![1.0; 96];
        let mut dudt = vec![0.0; 96];
        sys.eval_rhs(0.0, &u, &[true, true], &mut dudt);
        assert!(dudt.iter().all(|&d| d.abs() < 1e-14));
    }

    #[test]
    fn fv_spectrum_matches_circulant() {
        let mesh = Mesh1D::uniform(0.0, 8.0, 8).unwrap();
        let sys = advection_fv_system(&mesh, 1.0, vec![1; 8], 1).unwrap();
        let s = operator_spectrum(&sys.linear().unwrap().lambda, "fv").unwrap();
        let oracle = circulant_upwind_spectrum(8, 1.0);
        for z in oracle.points() {
            let d = s.points().iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            assert!(d <= 1e-8);
        }
    }

    #[test]
    fn fv_row_sums_zero() {
        let (mesh, levels) = refined_center_mesh();
        let sys = advection_fv_system(&mesh, 1.0, levels, 2).unwrap();
        let lam = &sys.linear().unwrap().lambda;
        for i in 0..96 {
            let row: f64 = (0..96).map(|j| lam.get(i, j)).sum();
            assert!(row.abs() < 1e-12, "row {i}: {row:e}");
        }
    }

    #[test]
    fn refined_mesh_shape() {
        let (mesh, levels) = refined_center_mesh();
        assert_eq!(mesh.n_cells(), 96);
        let total: f64 = mesh.cell_sizes().iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        assert_eq!(levels.iter().filter(|&&r| r == 2).count(), 64);
        let dx = mesh.cell_sizes();
        assert!((dx[0] - 1.0 / 32.0).abs() < 1e-14);
        assert!((dx[40] - 1.0 / 64.0).abs() < 1e-14);
        assert!((dx[95] - 1.0 / 32.0).abs() < 1e-13);
    }

    #[test]
    fn sine_ic_properties() {
        let (mesh, _) = refined_center_mesh();
        let u = sine_ic(&mesh);
        // domain mean is 1 (sine integrates to zero over the period)
        let dx = mesh.cell_sizes();
        let mean: f64 = u.iter().zip(&dx).map(|(v, w)| v * w).sum::<f64>() / 2.0;
        assert!((mean - 1.0).abs() < 1e-14);
        // n=2 uniform on (-1,1): averages 1 -/+ 1/pi... the left cell covers
        // (-1,0) where sin(pi x) <= 0
        let m2 = Mesh1D::uniform(-1.0, 1.0, 2).unwrap();
        let u2 = sine_ic(&m2);
        assert!((u2[0] - (1.0 - 1.0 / PI)).abs() < 1e-15);
        assert!((u2[1] - (1.0 + 1.0 / PI)).abs() < 1e-15);
        // symmetric cell around 0 has average exactly 1
        let m3 = Mesh1D::new(vec![-1.0, -0.25, 0.25, 1.0]).unwrap();
        assert!((sine_ic(&m3)[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lv_rhs_examples() {
        let sys = lotka_volterra_system();
        let mut d = vec![0.0; 2];
        sys.eval_rhs(0.0, &[1.0, 1.0], &[true, true], &mut d);
        assert_eq!(d, vec![0.0, 0.0]);
        sys.eval_rhs(0.0, &[2.0, 1.0], &[true, true], &mut d);
        assert_eq!(d, vec![0.0, 1.0]);
    }

    #[test]
    fn lv_reference_t0_and_invariant() {
        assert_eq!(lv_reference(0.0, (1.0, 2.0)).unwrap(), (1.0, 2.0));
        let (u, v) = lv_reference(1.0, (1.0, 2.0)).unwrap();
        let v0 = lotka_volterra_invariant(1.0, 2.0);
        let vf = lotka_volterra_invariant(u, v);
        assert!((v0 - vf).abs() < 1e-11, "invariant drift {:e}", (v0 - vf).abs());
    }

    #[test]
    fn lv_family_integration_runs() {
        use crate::butcher::build_p4_family;
        use crate::integrator::integrate;
        let fam = build_p4_family(&[5, 9], &[vec![], vec![0.3, 0.25, 0.2, 0.15]]).unwrap();
        let sys = lotka_volterra_system();
        let (uf, stats) = integrate(&fam, &sys, &[1.0, 2.0], 0.0, 1.0, 1.0 / 64.0).unwrap();
        assert!(uf.iter().all(|x| x.is_finite() && *x > 0.0));
        assert_eq!(stats.steps, 64);
        // prey: E=5 member, 5 active stages; predator: E=9, 9 stages
        assert_eq!(stats.rhs_evals, vec![5 * 64, 9 * 64]);
    }
}

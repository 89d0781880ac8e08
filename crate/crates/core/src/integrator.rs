//! Partitioned Runge-Kutta time stepping with per-level stage activation.
//!
//! Each component of the system belongs to a level; level `r` is integrated by
//! family member `r`, which evaluates only its active stages. Stage arguments
//! are formed for *all* components every stage (a cheap linear combination of
//! the two live derivative registers), while the right-hand side is evaluated
//! only on components of active levels. This keeps interface values internally
//! consistent: an active component's derivative may read inactive components'
//! stage arguments, never their derivatives.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::butcher::PerkFamily;
use crate::linalg::DenseMatrix;

/// Right-hand-side evaluator: `(t, u, active_levels, dudt)`. Must write the
/// derivative of every component whose (1-based) level `r` has
/// `active_levels[r-1]`, and must not rely on `dudt` entries of inactive
/// components.
pub type RhsFn = Box<dyn Fn(f64, &[f64], &[bool], &mut [f64]) + Send + Sync>;

/// Linear specialization `u' = Lambda u` with level mask matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearData {
    pub lambda: DenseMatrix,
    /// One diagonal 0/1 matrix per level; they sum to the identity.
    pub masks: Vec<DenseMatrix>,
}

/// A right-hand-side evaluator with per-component level assignment.
pub struct PartitionedSystem {
    dim: usize,
    num_levels: usize,
    level_of: Vec<usize>,
    rhs: RhsFn,
    linear: Option<LinearData>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IntegratorError {
    DimensionMismatch(String),
    /// A stage derivative came back NaN or infinite.
    NonFiniteStage { stage: usize, component: usize },
    /// No family member can carry a component at the requested timestep.
    NoFeasibleMember { component: usize },
    /// Operation requires the linear specialization.
    NotLinear,
    InvalidInput(String),
}

impl fmt::Display for IntegratorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegratorError::DimensionMismatch(m) => write!(f, "dimension mismatch: {m}"),
            IntegratorError::NonFiniteStage { stage, component } => {
                write!(f, "non-finite derivative at stage {stage}, component {component}")
            }
            IntegratorError::NoFeasibleMember { component } => {
                write!(f, "no family member is stable for component {component}; reduce dt")
            }
            IntegratorError::NotLinear => write!(f, "system has no linear specialization"),
            IntegratorError::InvalidInput(m) => write!(f, "invalid input: {m}"),
        }
    }
}

impl PartitionedSystem {
    pub fn new(
        num_levels: usize,
        level_of: Vec<usize>,
        rhs: RhsFn,
        linear: Option<LinearData>,
    ) -> Result<Self, IntegratorError> {
        let dim = level_of.len();
        if dim == 0 || num_levels == 0 {
            return Err(IntegratorError::InvalidInput("empty system".into()));
        }
        if let Some(&bad) = level_of.iter().find(|&&r| r == 0 || r > num_levels) {
            return Err(IntegratorError::InvalidInput(format!(
                "component level {bad} outside 1..={num_levels}"
            )));
        }
        if let Some(lin) = &linear {
            if lin.lambda.rows() != dim || lin.lambda.cols() != dim {
                return Err(IntegratorError::DimensionMismatch(format!(
                    "Lambda is {}x{}, system dimension {dim}",
                    lin.lambda.rows(),
                    lin.lambda.cols()
                )));
            }
            if lin.masks.len() != num_levels {
                return Err(IntegratorError::InvalidInput(format!(
                    "{} masks for {num_levels} levels",
                    lin.masks.len()
                )));
            }
            for m in 0..dim {
                for (r, mask) in lin.masks.iter().enumerate() {
                    for j in 0..dim {
                        let v = mask.get(m, j);
                        let expect = if m == j && level_of[m] == r + 1 { 1.0 } else { 0.0 };
                        if v != expect {
                            return Err(IntegratorError::InvalidInput(format!(
                                "mask {} entry ({m},{j}) = {v}, expected {expect}",
                                r + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { dim, num_levels, level_of, rhs, linear })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_levels(&self) -> usize {
        self.num_levels
    }

    pub fn level_of(&self) -> &[usize] {
        &self.level_of
    }

    pub fn linear(&self) -> Option<&LinearData> {
        self.linear.as_ref()
    }

    pub fn eval_rhs(&self, t: f64, u: &[f64], active: &[bool], dudt: &mut [f64]) {
        (self.rhs)(t, u, active, dudt)
    }
}

/// Per-level scalar RHS-evaluation counters plus the step count.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntegrationStats {
    pub steps: u64,
    /// `rhs_evals[r-1]`: scalar (per-component) evaluations on level `r`.
    pub rhs_evals: Vec<u64>,
}

impl IntegrationStats {
    pub fn new(num_levels: usize) -> Self {
        Self { steps: 0, rhs_evals: vec![0; num_levels] }
    }

    pub fn total_rhs_evals(&self) -> u64 {
        self.rhs_evals.iter().sum()
    }
}

/// One partitioned Runge-Kutta step `u_n -> u_{n+1}` with low-storage stage
/// recursion (two derivative registers plus the weighted accumulator).
pub fn step(
    family: &PerkFamily,
    sys: &PartitionedSystem,
    u_n: &[f64],
    t: f64,
    dt: f64,
    stats: &mut IntegrationStats,
) -> Result<Vec<f64>, IntegratorError> {
    if u_n.len() != sys.dim() {
        return Err(IntegratorError::DimensionMismatch(format!(
            "state length {} vs system dimension {}",
            u_n.len(),
            sys.dim()
        )));
    }
    if family.num_members() != sys.num_levels() {
        return Err(IntegratorError::InvalidInput(format!(
            "family has {} members, system has {} levels",
            family.num_members(),
            sys.num_levels()
        )));
    }
    if stats.rhs_evals.len() != sys.num_levels() {
        return Err(IntegratorError::InvalidInput("stats level count mismatch".into()));
    }
    assert!(dt > 0.0, "dt must be positive");
    let s = family.stages_s();
    let c = family.c();
    let b = family.b();
    let dim = sys.dim();
    let r_of = sys.level_of();
    // per-level stage activity and per-level component counts
    let active: Vec<Vec<bool>> = (0..family.num_members())
        .map(|r| family.active_stages(r))
        .collect();
    let mut level_count = vec![0u64; sys.num_levels()];
    for &r in r_of {
        level_count[r - 1] += 1;
    }
    let mut k_first = vec![0.0; dim];
    let mut k_prev = vec![0.0; dim];
    let mut k_curr = vec![0.0; dim];
    let mut u_arg = vec![0.0; dim];
    let mut acc = vec![0.0; dim];
    let mut stage_active = vec![false; sys.num_levels()];
    for i in 0..s {
        // stage argument for ALL components
        if i == 0 {
            u_arg.copy_from_slice(u_n);
        } else {
            for m in 0..dim {
                let a_rows = family.members()[r_of[m] - 1].a_rows();
                let a_first = a_rows[i][0];
                let a_sub = if i >= 2 { a_rows[i][i - 1] } else { 0.0 };
                u_arg[m] = u_n[m] + dt * (a_first * k_first[m] + a_sub * k_prev[m]);
            }
        }
        for r in 0..sys.num_levels() {
            stage_active[r] = active[r][i];
        }
        k_curr.iter_mut().for_each(|v| *v = 0.0);
        sys.eval_rhs(t + c[i] * dt, &u_arg, &stage_active, &mut k_curr);
        for m in 0..dim {
            if stage_active[r_of[m] - 1] && !k_curr[m].is_finite() {
                return Err(IntegratorError::NonFiniteStage { stage: i + 1, component: m });
            }
        }
        for (r, &on) in stage_active.iter().enumerate() {
            if on {
                stats.rhs_evals[r] += level_count[r];
            }
        }
        if b[i] != 0.0 {
            for m in 0..dim {
                acc[m] += b[i] * k_curr[m];
            }
        }
        if i == 0 {
            k_first.copy_from_slice(&k_curr);
        }
        core::mem::swap(&mut k_prev, &mut k_curr);
    }
    Ok((0..dim).map(|m| u_n[m] + dt * acc[m]).collect())
}

/// Fixed-`dt` integration from `t_0` to `t_f`, with a final truncated step
/// landing exactly on `t_f`.
pub fn integrate(
    family: &PerkFamily,
    sys: &PartitionedSystem,
    u_0: &[f64],
    t_0: f64,
    t_f: f64,
    dt: f64,
) -> Result<(Vec<f64>, IntegrationStats), IntegratorError> {
    if t_f < t_0 {
        return Err(IntegratorError::InvalidInput(format!("t_f = {t_f} < t_0 = {t_0}")));
    }
    let mut stats = IntegrationStats::new(sys.num_levels());
    let mut u = u_0.to_vec();
    if t_f == t_0 {
        return Ok((u, stats));
    }
    assert!(dt > 0.0, "dt must be positive");
    let span = t_f - t_0;
    let n_full = libm::floor(span / dt * (1.0 + 1e-13)) as u64;
    for k in 0..n_full {
        let t = t_0 + k as f64 * dt;
        u = step(family, sys, &u, t, dt, &mut stats)?;
        stats.steps += 1;
    }
    let t_done = t_0 + n_full as f64 * dt;
    let rem = t_f - t_done;
    if rem > 1e-13 * dt {
        u = step(family, sys, &u, t_done, rem, &mut stats)?;
        stats.steps += 1;
    }
    Ok((u, stats))
}

/// Assigns each component the smallest (cheapest) family member that remains
/// stable at `base_dt`, given the members' stable timesteps on the reference
/// spectrum (optimized at the smallest `char_speed_over_h`). A component with
/// speed-over-size `nu_m` tolerates `dt_r * nu_min / nu_m`.
pub fn assign_levels(
    char_speed_over_h: &[f64],
    member_stable_dts: &[f64],
    base_dt: f64,
) -> Result<Vec<usize>, IntegratorError> {
    if char_speed_over_h.is_empty() || member_stable_dts.is_empty() {
        return Err(IntegratorError::InvalidInput("empty inputs".into()));
    }
    if char_speed_over_h.iter().any(|&v| !(v > 0.0)) {
        return Err(IntegratorError::InvalidInput("speeds must be positive".into()));
    }
    let nu_min = char_speed_over_h.iter().copied().fold(f64::INFINITY, f64::min);
    let mut levels = Vec::with_capacity(char_speed_over_h.len());
    for (m, &nu) in char_speed_over_h.iter().enumerate() {
        let r = member_stable_dts
            .iter()
            .position(|&dtr| dtr * nu_min / nu >= base_dt * (1.0 - 1e-12))
            .ok_or(IntegratorError::NoFeasibleMember { component: m })?;
        levels.push(r + 1);
    }
    Ok(levels)
}

/// Assembles the one-step linear propagator `D` (so that `step(u) = D u`) by
/// applying the step to each canonical basis vector.
pub fn build_fully_discrete(
    family: &PerkFamily,
    sys: &PartitionedSystem,
    dt: f64,
) -> Result<DenseMatrix, IntegratorError> {
    if sys.linear().is_none() {
        return Err(IntegratorError::NotLinear);
    }
    let n = sys.dim();
    let mut d = DenseMatrix::zeros(n, n);
    let mut stats = IntegrationStats::new(sys.num_levels());
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = step(family, sys, &e, 0.0, dt, &mut stats)?;
        e[j] = 0.0;
        for i in 0..n {
            d.set(i, j, col[i]);
        }
    }
    Ok(d)
}

/// `|sum_m w_m u_0[m] - sum_m w_m u_f[m]|` with compensated (Kahan) summation.
pub fn conservation_error(u_0: &[f64], u_f: &[f64], cell_weights: &[f64]) -> f64 {
    libm::fabs(kahan_weighted_sum(u_0, cell_weights) - kahan_weighted_sum(u_f, cell_weights))
}

/// Kahan-compensated weighted sum; exposed for reporting total mass.
pub fn kahan_weighted_sum(u: &[f64], w: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (x, wi) in u.iter().zip(w) {
        let y = x * wi - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

//! Butcher tableau and family assembly for P-ERK schemes, with numerical
//! verification of every order, consistency, and coupling condition at build
//! time.
//!
//! Fourth-order tableaus have nonzero `A` entries only in the first column and
//! on the subdiagonal; the last three subdiagonal entries, the last three
//! abscissae, and the weights are fixed constants shared by every family
//! member, while the free subdiagonal entries come from the optimized `gamma`
//! parameters. Second-order tableaus follow the same sparsity with a single
//! nonzero weight and are recovered from an optimized monomial polynomial.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::stabpoly::{
    self, ConstrainedParams, MonomialPolynomial, StabPolyError,
};

/// Third-to-last abscissa of the fourth-order schemes.
pub const C_SM2: f64 = 0.479274057836310;
/// Numerator of the fixed subdiagonal entry `a_{S-2,S-3}` (divided by `c_{S-3}`).
pub const A_SM2_NUM: f64 = 0.114851811257441;
/// Fixed subdiagonal entry `a_{S-1,S-2}`.
pub const A_SM1: f64 = 0.648906880894214;
/// Fixed subdiagonal entry `a_{S,S-1}`.
pub const A_S: f64 = 0.0283121635129678;

/// Interior abscissae policy for the fourth-order construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbscissaeChoice {
    /// `c_i = 1` for interior stages (default; smaller internal amplification).
    Constant,
    /// `c_i = i/(E-4)` for interior stages (retained for comparison only).
    LinearIncreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ButcherError {
    InvalidInput(String),
    StabPoly(StabPolyError),
    /// Extracted polynomial disagrees with the constrained closed form.
    OracleMismatch { power: usize, extracted: f64, closed_form: f64 },
    /// An order/coupling condition residual exceeded `1e-12` at build time.
    ConditionResidual { label: String, residual: f64 },
    /// Row sums deviate from the abscissae (internal consistency violation).
    RowSumMismatch { row: usize, deviation: f64 },
    /// Second-order recovery hit a vanishing polynomial coefficient.
    ZeroAlpha { power: usize },
    /// Second-order recovery failed its polynomial round-trip.
    RoundTripMismatch { power: usize, extracted: f64, requested: f64 },
}

impl fmt::Display for ButcherError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ButcherError::InvalidInput(m) => write!(f, "invalid input: {m}"),
            ButcherError::StabPoly(e) => write!(f, "{e}"),
            ButcherError::OracleMismatch { power, extracted, closed_form } => write!(
                f,
                "tableau polynomial z^{power} coefficient {extracted} disagrees with closed form {closed_form}"
            ),
            ButcherError::ConditionResidual { label, residual } => {
                write!(f, "order condition {label} residual {residual:e} exceeds 1e-12")
            }
            ButcherError::RowSumMismatch { row, deviation } => {
                write!(f, "row {row} sum deviates from abscissa by {deviation:e}")
            }
            ButcherError::ZeroAlpha { power } => {
                write!(f, "polynomial coefficient of z^{power} vanishes; cannot recover subdiagonal")
            }
            ButcherError::RoundTripMismatch { power, extracted, requested } => write!(
                f,
                "recovered tableau polynomial z^{power} coefficient {extracted} != requested {requested}"
            ),
        }
    }
}

impl From<StabPolyError> for ButcherError {
    fn from(e: StabPolyError) -> Self {
        ButcherError::StabPoly(e)
    }
}

/// Explicit Runge-Kutta tableau. `A` is stored densely as strictly lower
/// triangular rows (row `i`, zero-based, has `i` entries).
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    stages_s: usize,
    order_p: usize,
    evals_e: usize,
    c: Vec<f64>,
    b: Vec<f64>,
    a: Vec<Vec<f64>>,
}

impl ButcherTableau {
    /// Validating constructor: checks shape, finiteness, `c_1 = 0`, and that
    /// row sums equal the abscissae within `1e-12` (internal consistency).
    pub fn from_dense(
        c: Vec<f64>,
        b: Vec<f64>,
        a: Vec<Vec<f64>>,
        order_p: usize,
        evals_e: usize,
    ) -> Result<Self, ButcherError> {
        let t = Self::from_dense_unchecked(c, b, a, order_p, evals_e)?;
        if libm::fabs(t.c[0]) > 1e-15 {
            return Err(ButcherError::InvalidInput(format!("c_1 = {} != 0", t.c[0])));
        }
        let (row, dev) = t.internal_consistency();
        if dev > 1e-12 {
            return Err(ButcherError::RowSumMismatch { row, deviation: dev });
        }
        Ok(t)
    }

    /// Shape/finiteness validation only; used when loading external tableaus
    /// whose consistency is to be *reported* rather than enforced.
    pub fn from_dense_unchecked(
        c: Vec<f64>,
        b: Vec<f64>,
        a: Vec<Vec<f64>>,
        order_p: usize,
        evals_e: usize,
    ) -> Result<Self, ButcherError> {
        let s = c.len();
        if s == 0 {
            return Err(ButcherError::InvalidInput("empty tableau".into()));
        }
        if b.len() != s || a.len() != s {
            return Err(ButcherError::InvalidInput(format!(
                "inconsistent lengths: c {}, b {}, a {}",
                s,
                b.len(),
                a.len()
            )));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != i {
                return Err(ButcherError::InvalidInput(format!(
                    "A row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    i
                )));
            }
        }
        let finite = c.iter().chain(&b).chain(a.iter().flatten()).all(|x| x.is_finite());
        if !finite {
            return Err(ButcherError::InvalidInput("non-finite entry".into()));
        }
        if !(1..=4).contains(&order_p) {
            return Err(ButcherError::InvalidInput(format!("order {order_p} not in 1..=4")));
        }
        Ok(Self { stages_s: s, order_p, evals_e, c, b, a })
    }

    pub fn stages_s(&self) -> usize {
        self.stages_s
    }

    pub fn order_p(&self) -> usize {
        self.order_p
    }

    pub fn evals_e(&self) -> usize {
        self.evals_e
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `a_{i+1,j+1}` with zero-based `i > j`; zero above the subdiagonal range.
    pub fn a(&self, i: usize, j: usize) -> f64 {
        if j < i {
            self.a[i][j]
        } else {
            0.0
        }
    }

    pub fn a_rows(&self) -> &[Vec<f64>] {
        &self.a
    }

    /// `(worst row, max_i |sum_j a_ij - c_i|)`.
    pub fn internal_consistency(&self) -> (usize, f64) {
        let mut worst = (0, 0.0);
        for (i, row) in self.a.iter().enumerate() {
            let dev = libm::fabs(row.iter().sum::<f64>() - self.c[i]);
            if dev > worst.1 {
                worst = (i + 1, dev);
            }
        }
        worst
    }

    /// True when `A` is nonzero only in the first column and on the
    /// subdiagonal (the P-ERK sparsity pattern).
    pub fn is_perk_sparse(&self) -> bool {
        self.a.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, &v)| v == 0.0 || j == 0 || j + 1 == i)
        })
    }
}

/// Maximum row-sum deviation from the abscissae.
pub fn check_internal_consistency(t: &ButcherTableau) -> f64 {
    t.internal_consistency().1
}

/// One evaluated order/coupling condition: `residual = value - target`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResidual {
    pub label: String,
    pub target: f64,
    pub residual: f64,
}

fn lower_mat_vec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Evaluates all order conditions up to order `p` in general vector form for
/// a set of members sharing `b` and `c`. Coupling conditions run over every
/// ordered member pair.
fn order_residuals(
    c: &[f64],
    b: &[f64],
    mats: &[&Vec<Vec<f64>>],
    labels: &[String],
    p: usize,
) -> Vec<ConditionResidual> {
    let mut out = Vec::new();
    let mut push = |label: String, target: f64, value: f64| {
        out.push(ConditionResidual { label, target, residual: value - target });
    };
    let ones = vec![1.0; c.len()];
    push("b'1".into(), 1.0, dot(b, &ones));
    if p >= 2 {
        push("b'c".into(), 0.5, dot(b, c));
    }
    let c2: Vec<f64> = c.iter().map(|x| x * x).collect();
    if p >= 3 {
        push("b'c^2".into(), 1.0 / 3.0, dot(b, &c2));
        for (a, l) in mats.iter().zip(labels) {
            push(format!("b'A{l}c"), 1.0 / 6.0, dot(b, &lower_mat_vec(a, c)));
        }
    }
    if p >= 4 {
        let c3: Vec<f64> = c.iter().map(|x| x * x * x).collect();
        push("b'c^3".into(), 0.25, dot(b, &c3));
        for (a, l) in mats.iter().zip(labels) {
            let ac = lower_mat_vec(a, c);
            let cac: Vec<f64> = c.iter().zip(&ac).map(|(x, y)| x * y).collect();
            push(format!("b'CA{l}c"), 0.125, dot(b, &cac));
            push(format!("b'A{l}c^2"), 1.0 / 12.0, dot(b, &lower_mat_vec(a, &c2)));
        }
        for (a1, l1) in mats.iter().zip(labels) {
            for (a2, l2) in mats.iter().zip(labels) {
                let inner = lower_mat_vec(a2, c);
                push(
                    format!("b'A{l1}A{l2}c"),
                    1.0 / 24.0,
                    dot(b, &lower_mat_vec(a1, &inner)),
                );
            }
        }
    }
    out
}

/// Order-condition residual report for a single tableau, checked at order `p`.
pub fn check_order_conditions(t: &ButcherTableau, p: usize) -> Vec<ConditionResidual> {
    order_residuals(&t.c, &t.b, &[&t.a], &[String::new()], p)
}

/// Shared abscissae of the fourth-order `E`-stage construction.
pub fn p4_abscissae(e: usize, choice: AbscissaeChoice) -> Vec<f64> {
    assert!(e >= 5, "fourth-order construction needs E >= 5");
    let sqrt3_6 = libm::sqrt(3.0) / 6.0;
    let mut c = vec![0.0; e];
    for i in 2..=e - 3 {
        c[i - 1] = match choice {
            AbscissaeChoice::Constant => 1.0,
            AbscissaeChoice::LinearIncreasing => i as f64 / (e as f64 - 4.0),
        };
    }
    c[e - 3] = C_SM2;
    c[e - 2] = 0.5 + sqrt3_6;
    c[e - 1] = 0.5 - sqrt3_6;
    c
}

/// Builds the fourth-order `E = S` stage P-ERK tableau from the free `gamma`
/// parameters (empty for `E = 5`). The build immediately extracts the tableau
/// polynomial, compares it against the constrained closed form, and evaluates
/// all order conditions, failing loudly on any mismatch.
pub fn build_p4_tableau(
    e: usize,
    gamma: &[f64],
    choice: AbscissaeChoice,
) -> Result<ButcherTableau, ButcherError> {
    if e < 5 {
        return Err(ButcherError::InvalidInput(format!("E = {e} < 5")));
    }
    if gamma.len() != e - 5 {
        return Err(ButcherError::InvalidInput(format!(
            "gamma length {} != E - 5 = {}",
            gamma.len(),
            e - 5
        )));
    }
    let c = p4_abscissae(e, choice);
    let mut b = vec![0.0; e];
    b[e - 2] = 0.5;
    b[e - 1] = 0.5;
    let free = stabpoly::gamma_to_subdiagonal(gamma, e)?;
    let mut a: Vec<Vec<f64>> = (0..e).map(|i| vec![0.0; i]).collect();
    // stage 2: only the first column, equal to its abscissa
    a[1][0] = c[1];
    // free subdiagonals at stages 3..=E-3
    for (idx, &sub) in free.iter().enumerate() {
        let i = idx + 2; // zero-based row of stage idx+3
        a[i][i - 1] = sub;
        a[i][0] = c[i] - sub;
    }
    // fixed final stages
    let fixed = [(e - 3, A_SM2_NUM / c[e - 4]), (e - 2, A_SM1), (e - 1, A_S)];
    for (i, sub) in fixed {
        a[i][i - 1] = sub;
        a[i][0] = c[i] - sub;
    }
    let t = ButcherTableau::from_dense(c.clone(), b, a, 4, e)?;
    // oracle: extracted polynomial must match the constrained closed form
    let poly = stabpoly::polynomial_from_tableau(&t)?;
    let closed = ConstrainedParams::new(e, gamma.to_vec(), c)?.alpha();
    if poly.degree_e() != e {
        return Err(ButcherError::OracleMismatch {
            power: poly.degree_e(),
            extracted: 0.0,
            closed_form: 0.0,
        });
    }
    for (k, (&got, &want)) in poly.alpha().iter().zip(&closed).enumerate() {
        if libm::fabs(got - want) > 1e-12 * (1.0 + libm::fabs(want)) {
            return Err(ButcherError::OracleMismatch {
                power: k + 5,
                extracted: got,
                closed_form: want,
            });
        }
    }
    for r in check_order_conditions(&t, 4) {
        if libm::fabs(r.residual) > 1e-12 {
            return Err(ButcherError::ConditionResidual { label: r.label, residual: r.residual });
        }
    }
    Ok(t)
}

/// One member of a family: its stage-evaluation count and its family-sized
/// strictly lower triangular `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    evals_e: usize,
    a: Vec<Vec<f64>>,
}

impl FamilyMember {
    pub fn evals_e(&self) -> usize {
        self.evals_e
    }

    pub fn a_rows(&self) -> &[Vec<f64>] {
        &self.a
    }
}

/// A level-indexed list of member schemes sharing abscissae, weights, and the
/// fixed final stages; members differ in how many stages they evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct PerkFamily {
    stages_s: usize,
    order_p: usize,
    c: Vec<f64>,
    b: Vec<f64>,
    members: Vec<FamilyMember>,
}

impl PerkFamily {
    pub fn stages_s(&self) -> usize {
        self.stages_s
    }

    pub fn order_p(&self) -> usize {
        self.order_p
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn num_members(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    /// The member's family-sized tableau (its polynomial has degree `E_r`).
    pub fn member_tableau(&self, r: usize) -> ButcherTableau {
        ButcherTableau::from_dense(
            self.c.clone(),
            self.b.clone(),
            self.members[r].a.clone(),
            self.order_p,
            self.members[r].evals_e,
        )
        .expect("family members are validated at construction")
    }

    /// Stage-activity mask of member `r`: `{1} ∪ {S - E_r + 2, ..., S}`,
    /// zero-based.
    pub fn active_stages(&self, r: usize) -> Vec<bool> {
        let s = self.stages_s;
        let e = self.members[r].evals_e;
        (0..s).map(|i| i == 0 || i + 1 >= s - e + 2).collect()
    }

    /// Wraps a standalone tableau as a single-member family.
    pub fn single(t: &ButcherTableau) -> Self {
        Self {
            stages_s: t.stages_s(),
            order_p: t.order_p(),
            c: t.c().to_vec(),
            b: t.b().to_vec(),
            members: vec![FamilyMember { evals_e: t.evals_e(), a: t.a_rows().to_vec() }],
        }
    }

    /// Assembles a family from member tableaus that already share `c` and `b`
    /// at the family size (the second-order path). Coupling conditions up to
    /// the claimed order are verified.
    pub fn from_member_tableaus(tableaus: &[ButcherTableau]) -> Result<Self, ButcherError> {
        let first = tableaus
            .first()
            .ok_or_else(|| ButcherError::InvalidInput("no members".into()))?;
        let s = first.stages_s();
        let p = first.order_p();
        for t in tableaus {
            if t.stages_s() != s || t.order_p() != p || t.c() != first.c() || t.b() != first.b()
            {
                return Err(ButcherError::InvalidInput(
                    "members must share stage count, order, abscissae, and weights".into(),
                ));
            }
        }
        if !tableaus.windows(2).all(|w| w[0].evals_e() < w[1].evals_e()) {
            return Err(ButcherError::InvalidInput(
                "member evaluation counts must be strictly increasing".into(),
            ));
        }
        let fam = Self {
            stages_s: s,
            order_p: p,
            c: first.c().to_vec(),
            b: first.b().to_vec(),
            members: tableaus
                .iter()
                .map(|t| FamilyMember { evals_e: t.evals_e(), a: t.a_rows().to_vec() })
                .collect(),
        };
        for r in fam.order_residuals() {
            if libm::fabs(r.residual) > 1e-12 {
                return Err(ButcherError::ConditionResidual {
                    label: r.label,
                    residual: r.residual,
                });
            }
        }
        Ok(fam)
    }

    /// All order and pairwise coupling residuals of the family at its order.
    pub fn order_residuals(&self) -> Vec<ConditionResidual> {
        let mats: Vec<&Vec<Vec<f64>>> = self.members.iter().map(|m| &m.a).collect();
        let labels: Vec<String> =
            self.members.iter().map(|m| format!("({})", m.evals_e)).collect();
        order_residuals(&self.c, &self.b, &mats, &labels, self.order_p)
    }

    /// Per-member maximum row-sum deviation from the shared abscissae.
    /// Works directly on the stored arrays so that defective (externally
    /// loaded) families can be *reported* rather than panicking.
    pub fn internal_consistency(&self) -> Vec<f64> {
        self.members
            .iter()
            .map(|m| {
                m.a.iter()
                    .zip(&self.c)
                    .map(|(row, &ci)| libm::fabs(row.iter().sum::<f64>() - ci))
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}

/// Builds a fourth-order family: each member is built standalone at its own
/// `E_r` (running all standalone checks), embedded into the shared `S = max E`
/// stage layout, and the pairwise coupling conditions plus the embedding
/// invariance (member polynomial unchanged by embedding) are verified.
///
/// Families require the constant interior abscissae (the embedding relies on
/// interior stages sharing one abscissa value).
pub fn build_p4_family(evals: &[usize], gammas: &[Vec<f64>]) -> Result<PerkFamily, ButcherError> {
    if evals.is_empty() || evals.len() != gammas.len() {
        return Err(ButcherError::InvalidInput(format!(
            "{} eval counts vs {} gamma vectors",
            evals.len(),
            gammas.len()
        )));
    }
    if !evals.windows(2).all(|w| w[0] < w[1]) {
        return Err(ButcherError::InvalidInput(
            "member evaluation counts must be strictly increasing".into(),
        ));
    }
    let s = *evals.last().unwrap();
    let c = p4_abscissae(s, AbscissaeChoice::Constant);
    let mut b = vec![0.0; s];
    b[s - 2] = 0.5;
    b[s - 1] = 0.5;
    let mut members = Vec::with_capacity(evals.len());
    for (&e, gamma) in evals.iter().zip(gammas) {
        let standalone = build_p4_tableau(e, gamma, AbscissaeChoice::Constant)?;
        // embed: member stage j in 2..=E maps to family stage S - E + j
        let off = s - e;
        let mut a: Vec<Vec<f64>> = (0..s).map(|i| vec![0.0; i]).collect();
        for i in 1..s {
            if i + 1 <= off + 1 {
                // inactive stage: first column only, keeping row sums = c
                a[i][0] = c[i];
            } else {
                let j = i - off; // zero-based member row
                if j == 1 {
                    a[i][0] = c[i];
                } else {
                    let sub = standalone.a(j, j - 1);
                    a[i][i - 1] = sub;
                    a[i][0] = c[i] - sub;
                }
            }
        }
        let embedded = ButcherTableau::from_dense(c.clone(), b.clone(), a, 4, e)?;
        // embedding invariance: polynomial unchanged
        let pe = stabpoly::polynomial_from_tableau(&embedded)?;
        let ps = stabpoly::polynomial_from_tableau(&standalone)?;
        if pe.degree_e() != ps.degree_e() {
            return Err(ButcherError::OracleMismatch {
                power: pe.degree_e(),
                extracted: 0.0,
                closed_form: 0.0,
            });
        }
        for (k, (&x, &y)) in pe.alpha().iter().zip(ps.alpha()).enumerate() {
            if libm::fabs(x - y) > 1e-12 * (1.0 + libm::fabs(y)) {
                return Err(ButcherError::OracleMismatch {
                    power: k + 5,
                    extracted: x,
                    closed_form: y,
                });
            }
        }
        members.push(FamilyMember { evals_e: e, a: embedded.a_rows().to_vec() });
    }
    let fam = PerkFamily { stages_s: s, order_p: 4, c, b, members };
    for r in fam.order_residuals() {
        if libm::fabs(r.residual) > 1e-12 {
            return Err(ButcherError::ConditionResidual { label: r.label, residual: r.residual });
        }
    }
    Ok(fam)
}

/// Recovers a second-order `S`-stage tableau whose `E` active stages realize
/// the given optimized monomial polynomial. `b = e_S`, `c_i = (i-1)/(2(S-1))`;
/// the subdiagonal entries follow from successive coefficient ratios and the
/// result is gated by a full polynomial round-trip.
pub fn build_p2_tableau(
    e: usize,
    s: usize,
    poly: &MonomialPolynomial,
) -> Result<ButcherTableau, ButcherError> {
    if poly.order_p() != 2 {
        return Err(ButcherError::InvalidInput(format!(
            "polynomial order {} != 2",
            poly.order_p()
        )));
    }
    if poly.degree_e() != e || e < 2 || e > s || s < 2 {
        return Err(ButcherError::InvalidInput(format!(
            "need 2 <= E <= S with polynomial degree E; got E={e}, S={s}, degree {}",
            poly.degree_e()
        )));
    }
    let c: Vec<f64> = (0..s).map(|i| i as f64 / (2.0 * (s as f64 - 1.0))).collect();
    let mut b = vec![0.0; s];
    b[s - 1] = 1.0;
    let coeffs = poly.coefficients(); // 1, 1, 1/2, alpha_3, ..., alpha_E
    let mut a: Vec<Vec<f64>> = (0..s).map(|i| vec![0.0; i]).collect();
    // inactive stages and the first active stage carry only the first column
    for i in 1..s {
        a[i][0] = c[i];
    }
    // a_{S-j+2, S-j+1} = (alpha_{j+1}/alpha_j) * c_{S-j+2} / c_{S-j+1}, j = 2..E-1
    for j in 2..e {
        let alpha_j = coeffs[j];
        let alpha_j1 = coeffs[j + 1];
        if alpha_j == 0.0 {
            return Err(ButcherError::ZeroAlpha { power: j });
        }
        let i = s - j + 1; // zero-based row of stage S-j+2
        let sub = (alpha_j1 / alpha_j) * c[i] / c[i - 1];
        a[i][i - 1] = sub;
        a[i][0] = c[i] - sub;
    }
    let t = ButcherTableau::from_dense(c, b, a, 2, e)?;
    let extracted = stabpoly::polynomial_from_tableau(&t)?;
    let got = extracted.coefficients();
    if got.len() != coeffs.len() {
        return Err(ButcherError::RoundTripMismatch {
            power: got.len() - 1,
            extracted: *got.last().unwrap(),
            requested: 0.0,
        });
    }
    for (k, (&x, &y)) in got.iter().zip(&coeffs).enumerate() {
        if libm::fabs(x - y) > 1e-10 * (1.0 + libm::fabs(y)) {
            return Err(ButcherError::RoundTripMismatch { power: k, extracted: x, requested: y });
        }
    }
    Ok(t)
}

/// Builds a second-order family at the shared stage count `S` from one
/// optimized polynomial per member (degrees strictly increasing, max = S).
pub fn build_p2_family(
    s: usize,
    polys: &[MonomialPolynomial],
) -> Result<PerkFamily, ButcherError> {
    let tableaus: Vec<ButcherTableau> = polys
        .iter()
        .map(|p| build_p2_tableau(p.degree_e(), s, p))
        .collect::<Result<_, _>>()?;
    PerkFamily::from_member_tableaus(&tableaus)
}

//! Aggregative game data model.
//!
//! Followers `i = 1..N` control `x_i` in a local polyhedron
//! `X_i = {x : F_i x <= g_i}` subject to shared coupling rows
//! `sum_j A_j x_j <= b`, with quadratic costs in aggregative form
//!
//! ```text
//! J_i = 1/2 x_i' Q_i x_i + (1/N sum_j C_ij x_j + C_i0 y_0)' x_i + lin_i' x_i
//! ```
//!
//! The leader controls `y_0` in `Y_0` with
//! `J_0 = f_0(y_0) + (sum_i f_0i(x_i))' y_0`; the supported closed-form
//! family has quadratic `f_0(y) = r_0' y + 1/2 y' R_0 y` and affine
//! `f_0i(x) = S_i x + t_i`, which keeps the gradient Lipschitz constant
//! `kappa_0` exactly computable. Arbitrary smooth leader costs are accepted
//! through callbacks with a user-supplied `kappa_0`.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::error::SolverError;
use crate::linalg;
use crate::projections::ConvexSetDescriptor;
use crate::Result;

/// Per-follower problem data.
#[derive(Debug, Clone)]
pub struct FollowerData {
    /// Follower index (0-based).
    pub index: usize,
    /// Quadratic cost block `Q_i` (`n_i x n_i`, symmetric PSD).
    pub q: DMatrix<f64>,
    /// Interaction blocks `C_ij` for all `j` (each `n_i x n_j`).
    pub c_row: Vec<DMatrix<f64>>,
    /// Leader interaction block `C_i0` (`n_i x n_0`).
    pub c_leader: DMatrix<f64>,
    /// Linear cost term (`n_i`); zero for games in pure bilinear form.
    pub lin: DVector<f64>,
    /// Local constraint matrix `F_i` (`p_i x n_i`).
    pub f: DMatrix<f64>,
    /// Local constraint bound `g_i` (`p_i`).
    pub g: DVector<f64>,
    /// Coupling block `A_i` (`m x n_i`).
    pub a: DMatrix<f64>,
}

impl FollowerData {
    pub fn n_i(&self) -> usize {
        self.q.nrows()
    }

    pub fn p_i(&self) -> usize {
        self.f.nrows()
    }

    /// Local set as a projection descriptor: a box when every row of `F_i`
    /// bounds a single coordinate, otherwise the raw polyhedron.
    pub fn local_set(&self) -> ConvexSetDescriptor {
        let n = self.n_i();
        let mut lo = DVector::from_element(n, f64::NEG_INFINITY);
        let mut hi = DVector::from_element(n, f64::INFINITY);
        let mut is_box = true;
        'rows: for r in 0..self.p_i() {
            let mut nz: Option<(usize, f64)> = None;
            for c in 0..n {
                let v = self.f[(r, c)];
                if v != 0.0 {
                    if nz.is_some() {
                        is_box = false;
                        break 'rows;
                    }
                    nz = Some((c, v));
                }
            }
            match nz {
                Some((c, v)) if v > 0.0 => hi[c] = hi[c].min(self.g[r] / v),
                Some((c, v)) => lo[c] = lo[c].max(self.g[r] / v),
                None => {
                    // 0 <= g_r row: vacuous when g_r >= 0, infeasible otherwise.
                    if self.g[r] < 0.0 {
                        is_box = false;
                        break 'rows;
                    }
                }
            }
        }
        if is_box {
            ConvexSetDescriptor::Box { lo, hi }
        } else {
            ConvexSetDescriptor::Polyhedron {
                g: self.f.clone(),
                h: self.g.clone(),
            }
        }
    }
}

/// Leader constraint set.
#[derive(Debug, Clone)]
pub enum LeaderSet {
    Box { lo: DVector<f64>, hi: DVector<f64> },
    Polyhedron { g: DMatrix<f64>, h: DVector<f64> },
}

impl LeaderSet {
    pub fn descriptor(&self) -> ConvexSetDescriptor {
        match self {
            LeaderSet::Box { lo, hi } => ConvexSetDescriptor::Box {
                lo: lo.clone(),
                hi: hi.clone(),
            },
            LeaderSet::Polyhedron { g, h } => ConvexSetDescriptor::Polyhedron {
                g: g.clone(),
                h: h.clone(),
            },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            LeaderSet::Box { lo, .. } => lo.len(),
            LeaderSet::Polyhedron { g, .. } => g.ncols(),
        }
    }
}

/// Closed-form leader cost: quadratic `f_0` plus affine `f_0i`.
#[derive(Debug, Clone)]
pub struct QuadraticLeaderCost {
    /// Linear term of `f_0`.
    pub r0: DVector<f64>,
    /// Hessian of `f_0` (`n_0 x n_0`, symmetric).
    pub big_r0: DMatrix<f64>,
    /// Affine maps `S_i` (`n_0 x n_i`).
    pub s_blocks: Vec<DMatrix<f64>>,
    /// Aggregate offset `sum_i t_i`.
    pub t: DVector<f64>,
}

type CostFn = dyn Fn(&DVector<f64>, &DVector<f64>) -> f64 + Send + Sync;
type GradFn = dyn Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64> + Send + Sync;

/// User-supplied smooth leader cost with its gradient Lipschitz constant.
#[derive(Clone)]
pub struct CustomLeaderCost {
    pub cost: Arc<CostFn>,
    pub grad: Arc<GradFn>,
    pub kappa0: f64,
}

impl std::fmt::Debug for CustomLeaderCost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CustomLeaderCost")
            .field("kappa0", &self.kappa0)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum LeaderCost {
    Quadratic(QuadraticLeaderCost),
    Custom(CustomLeaderCost),
}

/// Leader-side problem data.
#[derive(Debug, Clone)]
pub struct LeaderData {
    pub cost: LeaderCost,
    pub set: LeaderSet,
}

/// Interaction structure of the `C_ij` blocks; `Uniform` means `C_ij` is the
/// same for every `j` (and all `n_j` coincide), which admits `O(n)` aggregate
/// pseudo-gradient evaluation instead of the dense `O(n^2)` product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteractionStructure {
    Dense,
    Uniform,
}

/// A one-leader, N-follower aggregative game with coupling constraints.
#[derive(Debug)]
pub struct AggregativeGame {
    pub leader: LeaderData,
    pub followers: Vec<FollowerData>,
    /// Shared resource vector of the coupling rows (`m`).
    pub b: DVector<f64>,
    n0: usize,
    x_offsets: Vec<usize>,
    structure: InteractionStructure,
    monotone_eig: OnceLock<f64>,
}

/// Outcome of the numeric validation suite: hard errors reject the game,
/// warnings flag standing-assumption violations that the solvers tolerate.
#[derive(Debug, Default, Clone)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
    /// Smallest eigenvalue of `Q + Q'` for the stacked pseudo-gradient.
    pub monotonicity_min_eig: f64,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

impl AggregativeGame {
    /// Build a game, checking structural consistency (dimensions only; run
    /// [`AggregativeGame::validate`] for the numeric invariants).
    pub fn new(leader: LeaderData, followers: Vec<FollowerData>, b: DVector<f64>) -> Result<Self> {
        if followers.is_empty() {
            return Err(SolverError::InvalidData("game needs at least one follower".into()));
        }
        let n0 = leader.set.dim();
        let m = b.len();
        let num = followers.len();
        let mut x_offsets = Vec::with_capacity(num + 1);
        let mut off = 0usize;
        for (i, f) in followers.iter().enumerate() {
            let n_i = f.n_i();
            let ctx = format!("follower {i}");
            if f.q.ncols() != n_i {
                return Err(SolverError::dim(format!("{ctx}: Q_i columns"), n_i, f.q.ncols()));
            }
            if f.c_row.len() != num {
                return Err(SolverError::dim(format!("{ctx}: C_ij count"), num, f.c_row.len()));
            }
            if f.c_leader.nrows() != n_i || f.c_leader.ncols() != n0 {
                return Err(SolverError::dim(
                    format!("{ctx}: C_i0 shape"),
                    n_i * n0,
                    f.c_leader.nrows() * f.c_leader.ncols(),
                ));
            }
            if f.lin.len() != n_i {
                return Err(SolverError::dim(format!("{ctx}: lin length"), n_i, f.lin.len()));
            }
            if f.f.ncols() != n_i || f.g.len() != f.f.nrows() {
                return Err(SolverError::dim(
                    format!("{ctx}: local constraint shape"),
                    f.f.nrows(),
                    f.g.len(),
                ));
            }
            if f.a.nrows() != m || f.a.ncols() != n_i {
                return Err(SolverError::dim(format!("{ctx}: A_i shape"), m * n_i, f.a.nrows() * f.a.ncols()));
            }
            x_offsets.push(off);
            off += n_i;
        }
        x_offsets.push(off);
        for (i, f) in followers.iter().enumerate() {
            for (j, c) in f.c_row.iter().enumerate() {
                let nj = followers[j].n_i();
                if c.nrows() != f.n_i() || c.ncols() != nj {
                    return Err(SolverError::dim(
                        format!("follower {i}: C_i{j} shape"),
                        f.n_i() * nj,
                        c.nrows() * c.ncols(),
                    ));
                }
            }
        }
        if let LeaderCost::Quadratic(qc) = &leader.cost {
            if qc.r0.len() != n0 || qc.big_r0.nrows() != n0 || qc.big_r0.ncols() != n0 {
                return Err(SolverError::dim("leader: f0 shape", n0, qc.r0.len()));
            }
            if qc.t.len() != n0 {
                return Err(SolverError::dim("leader: t length", n0, qc.t.len()));
            }
            if qc.s_blocks.len() != num {
                return Err(SolverError::dim("leader: S_i count", num, qc.s_blocks.len()));
            }
            for (i, s) in qc.s_blocks.iter().enumerate() {
                if s.nrows() != n0 || s.ncols() != followers[i].n_i() {
                    return Err(SolverError::dim(
                        format!("leader: S_{i} shape"),
                        n0 * followers[i].n_i(),
                        s.nrows() * s.ncols(),
                    ));
                }
            }
        }
        let structure = detect_structure(&followers);
        Ok(Self {
            leader,
            followers,
            b,
            n0,
            x_offsets,
            structure,
            monotone_eig: OnceLock::new(),
        })
    }

    pub fn num_followers(&self) -> usize {
        self.followers.len()
    }

    /// Total follower decision dimension `n`.
    pub fn n(&self) -> usize {
        *self.x_offsets.last().unwrap()
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Number of coupling rows.
    pub fn m(&self) -> usize {
        self.b.len()
    }

    /// Total local constraint count `p`.
    pub fn p(&self) -> usize {
        self.followers.iter().map(|f| f.p_i()).sum()
    }

    pub fn structure(&self) -> InteractionStructure {
        self.structure
    }

    /// Offset of follower `i`'s block inside the stacked `x`.
    pub fn x_offset(&self, i: usize) -> usize {
        self.x_offsets[i]
    }

    pub fn x_block<'a>(&self, x: &'a DVector<f64>, i: usize) -> nalgebra::DVectorView<'a, f64> {
        x.rows(self.x_offsets[i], self.followers[i].n_i())
    }

    /// Assemble the stacked pseudo-gradient matrices `(Q, C)` of the
    /// followers' KKT system: `Q` has diagonal blocks `Q_i + C_ii / N` and
    /// off-diagonal blocks `C_ij / N`; `C` stacks the `C_i0`.
    pub fn assemble_pseudo_gradient(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.n();
        let nf = self.num_followers() as f64;
        let mut q = DMatrix::zeros(n, n);
        let mut c = DMatrix::zeros(n, self.n0);
        for (i, f) in self.followers.iter().enumerate() {
            let oi = self.x_offsets[i];
            let ni = f.n_i();
            q.view_mut((oi, oi), (ni, ni)).copy_from(&f.q);
            for (j, cij) in f.c_row.iter().enumerate() {
                let oj = self.x_offsets[j];
                let mut blk = q.view_mut((oi, oj), (ni, self.followers[j].n_i()));
                blk += cij / nf;
            }
            c.view_mut((oi, 0), (ni, self.n0)).copy_from(&f.c_leader);
        }
        (q, c)
    }

    /// Stacked linear cost term.
    pub fn lin_stacked(&self) -> DVector<f64> {
        let mut lin = DVector::zeros(self.n());
        for (i, f) in self.followers.iter().enumerate() {
            lin.rows_mut(self.x_offsets[i], f.n_i()).copy_from(&f.lin);
        }
        lin
    }

    /// Pseudo-gradient `H(y_0, x) = col(grad_{x_i} J_i) = Q x + C y_0 + lin`,
    /// evaluated without materializing `Q` when the interaction is uniform.
    pub fn pseudo_gradient(&self, y0: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
        debug_assert_eq!(x.len(), self.n());
        debug_assert_eq!(y0.len(), self.n0);
        let nf = self.num_followers() as f64;
        let mut out = DVector::zeros(self.n());
        match self.structure {
            InteractionStructure::Uniform => {
                let nbar = self.followers[0].n_i();
                let mut agg = DVector::zeros(nbar);
                for i in 0..self.num_followers() {
                    agg += self.x_block(x, i);
                }
                for (i, f) in self.followers.iter().enumerate() {
                    let xi = self.x_block(x, i);
                    let mut hi = &f.q * xi + &f.c_row[i] * (&agg / nf);
                    hi += &f.c_leader * y0 + &f.lin;
                    out.rows_mut(self.x_offsets[i], f.n_i()).copy_from(&hi);
                }
            }
            InteractionStructure::Dense => {
                for (i, f) in self.followers.iter().enumerate() {
                    let mut hi = &f.q * self.x_block(x, i);
                    for (j, cij) in f.c_row.iter().enumerate() {
                        hi += cij * self.x_block(x, j) / nf;
                    }
                    hi += &f.c_leader * y0 + &f.lin;
                    out.rows_mut(self.x_offsets[i], f.n_i()).copy_from(&hi);
                }
            }
        }
        out
    }

    /// Canonical follower cost; its `x_i`-gradient is the `i`-th block of the
    /// pseudo-gradient (requires symmetric `C_ii`, enforced by validation).
    pub fn follower_cost(&self, i: usize, y0: &DVector<f64>, x: &DVector<f64>) -> f64 {
        let f = &self.followers[i];
        let nf = self.num_followers() as f64;
        let xi = self.x_block(x, i);
        let mut interaction = &f.c_leader * y0 + &f.lin;
        for (j, cij) in f.c_row.iter().enumerate() {
            if j != i {
                interaction += cij * self.x_block(x, j) / nf;
            }
        }
        0.5 * xi.dot(&(&f.q * xi))
            + 0.5 * xi.dot(&(&f.c_row[i] * xi)) / nf
            + interaction.dot(&xi)
    }

    /// Leader cost `J_0(y_0, x)`.
    pub fn leader_cost(&self, y0: &DVector<f64>, x: &DVector<f64>) -> f64 {
        match &self.leader.cost {
            LeaderCost::Quadratic(qc) => {
                let mut agg = qc.t.clone();
                for (i, s) in qc.s_blocks.iter().enumerate() {
                    agg += s * self.x_block(x, i);
                }
                qc.r0.dot(y0) + 0.5 * y0.dot(&(&qc.big_r0 * y0)) + agg.dot(y0)
            }
            LeaderCost::Custom(c) => (c.cost)(y0, x),
        }
    }

    /// Gradient of `J_0` stacked as `col(grad_y0, grad_x)` (`n_0 + n`).
    pub fn leader_grad(&self, y0: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
        match &self.leader.cost {
            LeaderCost::Quadratic(qc) => {
                let mut out = DVector::zeros(self.n0 + self.n());
                let mut gy = &qc.big_r0 * y0 + &qc.r0 + &qc.t;
                for (i, s) in qc.s_blocks.iter().enumerate() {
                    gy += s * self.x_block(x, i);
                }
                out.rows_mut(0, self.n0).copy_from(&gy);
                for (i, s) in qc.s_blocks.iter().enumerate() {
                    out.rows_mut(self.n0 + self.x_offsets[i], self.followers[i].n_i())
                        .copy_from(&s.tr_mul(y0));
                }
                out
            }
            LeaderCost::Custom(c) => (c.grad)(y0, x),
        }
    }

    /// Lipschitz constant of `grad J_0`: the spectral norm of the constant
    /// Hessian `[[R_0, S], [S', 0]]` for the quadratic family.
    ///
    /// Errors with [`SolverError::UnsupportedForm`] on custom costs; use
    /// [`AggregativeGame::kappa0`] to fall back to the user-supplied value.
    pub fn estimate_kappa0(&self) -> Result<f64> {
        match &self.leader.cost {
            LeaderCost::Quadratic(qc) => {
                let n0 = self.n0;
                let n = self.n();
                let apply = |v: &DVector<f64>| {
                    let v0 = v.rows(0, n0).clone_owned();
                    let vx = v.rows(n0, n).clone_owned();
                    let mut out = DVector::zeros(n0 + n);
                    let mut top = &qc.big_r0 * &v0;
                    for (i, s) in qc.s_blocks.iter().enumerate() {
                        top += s * vx.rows(self.x_offsets[i], self.followers[i].n_i());
                    }
                    out.rows_mut(0, n0).copy_from(&top);
                    for (i, s) in qc.s_blocks.iter().enumerate() {
                        out.rows_mut(n0 + self.x_offsets[i], self.followers[i].n_i())
                            .copy_from(&s.tr_mul(&v0));
                    }
                    out
                };
                Ok(linalg::operator_norm(n0 + n, &apply, &apply))
            }
            LeaderCost::Custom(_) => Err(SolverError::UnsupportedForm(
                "kappa_0 is only computed for the quadratic leader cost family; \
                 supply it in CustomLeaderCost"
                    .into(),
            )),
        }
    }

    /// `kappa_0` for any cost form.
    pub fn kappa0(&self) -> f64 {
        match &self.leader.cost {
            LeaderCost::Quadratic(_) => self.estimate_kappa0().expect("quadratic form"),
            LeaderCost::Custom(c) => c.kappa0,
        }
    }

    /// Smallest eigenvalue of `Q + Q'` (cached). Nonnegative up to 1e-10 is
    /// required for the monotone VI machinery.
    pub fn monotonicity_min_eig(&self) -> f64 {
        *self.monotone_eig.get_or_init(|| {
            let (q, _) = self.assemble_pseudo_gradient();
            let sym = &q + q.transpose();
            linalg::sym_min_eig(&sym)
        })
    }

    /// Numeric validation: PSD cost blocks, symmetric `C_ii`, full-row-rank
    /// `F_i` (warning only; boxes necessarily violate it), nonempty bounded
    /// local sets, monotone stacked pseudo-gradient, coupling consistency.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let tol = 1e-10;
        for (i, f) in self.followers.iter().enumerate() {
            if !linalg::is_symmetric(&f.q, 1e-12) {
                rep.errors.push(format!("follower {i}: Q_i is not symmetric"));
            } else {
                let min_eig = linalg::sym_min_eig(&f.q);
                if min_eig < -tol {
                    rep.errors
                        .push(format!("follower {i}: Q_i has eigenvalue {min_eig:.3e} < 0"));
                }
            }
            if !linalg::is_symmetric(&f.c_row[i], 1e-12) {
                rep.errors.push(format!(
                    "follower {i}: C_ii must be symmetric for the aggregative cost to be \
                     well-defined"
                ));
            }
            let rank = linalg::numerical_rank(&f.f, 1e-10);
            if rank < f.p_i() {
                rep.warnings.push(format!(
                    "follower {i}: rank(F_i) = {rank} < p_i = {}; local multipliers may be \
                     non-unique",
                    f.p_i()
                ));
            }
            match local_coordinate_bounds(&f.f, &f.g) {
                Ok(None) => rep
                    .errors
                    .push(format!("follower {i}: local set {{F_i x <= g_i}} looks empty")),
                Ok(Some((lo, hi))) => {
                    if lo.iter().chain(hi.iter()).any(|v| !v.is_finite()) {
                        rep.errors
                            .push(format!("follower {i}: local set is unbounded"));
                    }
                }
                Err(e) => rep
                    .warnings
                    .push(format!("follower {i}: boundedness probe failed: {e}")),
            }
        }
        if let LeaderCost::Quadratic(qc) = &self.leader.cost {
            if !linalg::is_symmetric(&qc.big_r0, 1e-12) {
                rep.errors.push("leader: R_0 is not symmetric".into());
            }
        }
        match &self.leader.set {
            LeaderSet::Box { lo, hi } => {
                if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
                    rep.errors.push("leader: Y_0 box is empty".into());
                }
            }
            LeaderSet::Polyhedron { g, h } => match local_coordinate_bounds(g, h) {
                Ok(None) => rep.errors.push("leader: Y_0 looks empty".into()),
                Ok(Some(_)) => {}
                Err(e) => rep.warnings.push(format!("leader: Y_0 probe failed: {e}")),
            },
        }
        rep.monotonicity_min_eig = self.monotonicity_min_eig();
        if rep.monotonicity_min_eig < -1e-10 {
            rep.errors.push(format!(
                "stacked pseudo-gradient is not monotone: min eig(Q + Q') = {:.3e}",
                rep.monotonicity_min_eig
            ));
        }
        rep
    }
}

fn detect_structure(followers: &[FollowerData]) -> InteractionStructure {
    let nbar = followers[0].n_i();
    if followers.iter().any(|f| f.n_i() != nbar) {
        return InteractionStructure::Dense;
    }
    for f in followers {
        let first = &f.c_row[0];
        for c in &f.c_row[1..] {
            if c != first {
                return InteractionStructure::Dense;
            }
        }
    }
    InteractionStructure::Uniform
}

/// Per-coordinate min/max probe of `{x : F x <= g}` by projected coordinate
/// ascent with escape detection. Returns `None` when the set appears empty,
/// `Some((lo, hi))` with possibly infinite entries otherwise.
pub(crate) fn local_coordinate_bounds(
    f: &DMatrix<f64>,
    g: &DVector<f64>,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let n = f.ncols();
    let rows: Vec<ConvexSetDescriptor> = (0..f.nrows())
        .map(|r| ConvexSetDescriptor::Halfspace {
            a: f.row(r).transpose(),
            beta: g[r],
        })
        .collect();
    // Feasibility: project the origin onto the halfspace intersection.
    let feasible = match crate::projections::dykstra(&rows, &DVector::zeros(n), 1e-9, 20_000) {
        Ok(x) => x,
        Err(SolverError::EmptyIntersection { .. }) => return Ok(None),
        Err(SolverError::IterationLimit { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let escape = 1e7 * (1.0 + feasible.amax());
    let mut lo = vec![0.0f64; n];
    let mut hi = vec![0.0f64; n];
    for k in 0..n {
        hi[k] = coordinate_extreme(&rows, &feasible, k, 1.0, escape)?;
        lo[k] = coordinate_extreme(&rows, &feasible, k, -1.0, escape)?;
    }
    Ok(Some((lo, hi)))
}

/// Extreme value of coordinate `k` over a halfspace intersection in the
/// direction `sign`, by projected coordinate ascent. Returns a signed
/// infinity when the iterates escape past `escape` (unbounded direction).
fn coordinate_extreme(
    rows: &[ConvexSetDescriptor],
    feasible: &DVector<f64>,
    k: usize,
    sign: f64,
    escape: f64,
) -> Result<f64> {
    let mut x = feasible.clone();
    let mut step = 1.0;
    let mut shrink_count = 0usize;
    loop {
        if sign * x[k] > escape {
            return Ok(sign * f64::INFINITY);
        }
        let mut target = x.clone();
        target[k] += sign * step;
        let y = crate::projections::dykstra(rows, &target, 1e-9, 5_000)?;
        let gain = sign * (y[k] - x[k]);
        x = y;
        if gain > 0.25 * step {
            step *= 2.0;
            shrink_count = 0;
        } else {
            step *= 0.5;
            shrink_count += 1;
            if shrink_count > 60 {
                return Ok(x[k]);
            }
        }
    }
}

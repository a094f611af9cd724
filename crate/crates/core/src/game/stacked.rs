//! Stacked representation of the relaxed leader problem.
//!
//! With `y = col(x, {nu_i})`, `nu = col(lambda, mu)` and
//! `omega = col(y_0, y, nu)`, the equality system reads
//! `A_f y + A_l y_0 + A_c nu = d` with the row partition (n, m, p):
//!
//! ```text
//! (i)   Q x + C y_0 + A' lambda + F' lambda_loc = -lin     (stationarity)
//! (ii)  A x + mu = b                                       (coupling)
//! (iii) F_i x_i + mu_i = g_i  for all i                    (local)
//! ```
//!
//! `d = col(-lin, b, g)`; the paper form has `lin = 0`. The blocks are kept
//! in structured form and applied as operators; dense matrices are
//! materialized on demand for small systems and tests.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::error::SolverError;
use crate::game::data::{AggregativeGame, InteractionStructure, LeaderSet};
use crate::inner::affine::EqualityProjector;
use crate::projections::ConvexSetDescriptor;
use crate::Result;

/// Action of the stacked pseudo-gradient matrix `Q`, either dense or in the
/// aggregate form available when all interaction blocks coincide per row.
#[derive(Debug, Clone)]
pub enum QOperator {
    Dense(DMatrix<f64>),
    Uniform {
        /// Follower blocks `Q_i`.
        q_diag: Vec<DMatrix<f64>>,
        /// Shared interaction blocks `G_i = C_ij` (all `j`).
        g_blocks: Vec<DMatrix<f64>>,
        /// Common follower dimension.
        nbar: usize,
    },
}

impl QOperator {
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            QOperator::Dense(q) => q * x,
            QOperator::Uniform { q_diag, g_blocks, nbar } => {
                let nf = q_diag.len();
                let mut agg = DVector::zeros(*nbar);
                for i in 0..nf {
                    agg += x.rows(i * nbar, *nbar);
                }
                agg /= nf as f64;
                let mut out = DVector::zeros(x.len());
                for i in 0..nf {
                    let mut blk = &q_diag[i] * x.rows(i * nbar, *nbar);
                    blk += &g_blocks[i] * &agg;
                    out.rows_mut(i * nbar, *nbar).copy_from(&blk);
                }
                out
            }
        }
    }

    pub fn apply_transpose(&self, v: &DVector<f64>) -> DVector<f64> {
        match self {
            QOperator::Dense(q) => q.tr_mul(v),
            QOperator::Uniform { q_diag, g_blocks, nbar } => {
                let nf = q_diag.len();
                let mut shared = DVector::zeros(*nbar);
                for i in 0..nf {
                    shared += g_blocks[i].tr_mul(&v.rows(i * nbar, *nbar).clone_owned());
                }
                shared /= nf as f64;
                let mut out = DVector::zeros(v.len());
                for j in 0..nf {
                    let mut blk = q_diag[j].tr_mul(&v.rows(j * nbar, *nbar).clone_owned());
                    blk += &shared;
                    out.rows_mut(j * nbar, *nbar).copy_from(&blk);
                }
                out
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            QOperator::Dense(q) => q.clone(),
            QOperator::Uniform { q_diag, g_blocks, nbar } => {
                let nf = q_diag.len();
                let n = nf * nbar;
                let mut q = DMatrix::zeros(n, n);
                for i in 0..nf {
                    for j in 0..nf {
                        let mut blk = q.view_mut((i * nbar, j * nbar), (*nbar, *nbar));
                        blk.copy_from(&(&g_blocks[i] / nf as f64));
                        if i == j {
                            blk += &q_diag[i];
                        }
                    }
                }
                q
            }
        }
    }
}

/// Relaxation parameters: complementarity budgets `theta` (coupling) and
/// `theta_i` (local), all strictly positive.
#[derive(Debug, Clone)]
pub struct RelaxationParams {
    pub theta: f64,
    pub theta_i: Vec<f64>,
}

impl RelaxationParams {
    pub fn uniform(theta: f64, num_followers: usize) -> Result<Self> {
        Self::new(theta, vec![theta; num_followers])
    }

    pub fn new(theta: f64, theta_i: Vec<f64>) -> Result<Self> {
        if theta <= 0.0 || theta_i.iter().any(|&t| t <= 0.0) {
            return Err(SolverError::InvalidData(
                "relaxation parameters must be strictly positive".into(),
            ));
        }
        Ok(Self { theta, theta_i })
    }
}

/// Full decision point `omega = col(y_0, x, {nu_i}, nu)` with
/// `nu_i = col(lambda_i, mu_i)` and `nu = col(lambda, mu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaPoint {
    pub y0: DVector<f64>,
    pub x: DVector<f64>,
    pub nu_local: Vec<DVector<f64>>,
    pub nu: DVector<f64>,
}

impl OmegaPoint {
    /// Leader/follower primal pair `phi = col(y_0, x)`.
    pub fn phi(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.y0.len() + self.x.len());
        v.rows_mut(0, self.y0.len()).copy_from(&self.y0);
        v.rows_mut(self.y0.len(), self.x.len()).copy_from(&self.x);
        v
    }

    /// Followers' block `y = col(x, {nu_i})`.
    pub fn y_block(&self) -> DVector<f64> {
        let len = self.x.len() + self.nu_local.iter().map(|v| v.len()).sum::<usize>();
        let mut v = DVector::zeros(len);
        v.rows_mut(0, self.x.len()).copy_from(&self.x);
        let mut off = self.x.len();
        for nu_i in &self.nu_local {
            v.rows_mut(off, nu_i.len()).copy_from(nu_i);
            off += nu_i.len();
        }
        v
    }

    pub fn lambda(&self) -> nalgebra::DVectorView<'_, f64> {
        let m = self.nu.len() / 2;
        self.nu.rows(0, m)
    }

    pub fn mu(&self) -> nalgebra::DVectorView<'_, f64> {
        let m = self.nu.len() / 2;
        self.nu.rows(m, m)
    }

    pub fn lambda_i(&self, i: usize) -> nalgebra::DVectorView<'_, f64> {
        let p = self.nu_local[i].len() / 2;
        self.nu_local[i].rows(0, p)
    }

    pub fn mu_i(&self, i: usize) -> nalgebra::DVectorView<'_, f64> {
        let p = self.nu_local[i].len() / 2;
        self.nu_local[i].rows(p, p)
    }

    /// Total length `s = n_0 + n + 2(p + m)`.
    pub fn len(&self) -> usize {
        self.y0.len()
            + self.x.len()
            + self.nu_local.iter().map(|v| v.len()).sum::<usize>()
            + self.nu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flatten in the `col(y_0, x, {nu_i}, nu)` ordering.
    pub fn to_vector(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.len());
        let mut off = 0;
        for part in std::iter::once(&self.y0)
            .chain(std::iter::once(&self.x))
            .chain(self.nu_local.iter())
            .chain(std::iter::once(&self.nu))
        {
            v.rows_mut(off, part.len()).copy_from(part);
            off += part.len();
        }
        v
    }

    /// Convex combination `(1 - alpha) self + alpha other`.
    pub fn lerp(&self, other: &OmegaPoint, alpha: f64) -> OmegaPoint {
        OmegaPoint {
            y0: (1.0 - alpha) * &self.y0 + alpha * &other.y0,
            x: (1.0 - alpha) * &self.x + alpha * &other.x,
            nu_local: self
                .nu_local
                .iter()
                .zip(other.nu_local.iter())
                .map(|(a, b)| (1.0 - alpha) * a + alpha * b)
                .collect(),
            nu: (1.0 - alpha) * &self.nu + alpha * &other.nu,
        }
    }

    /// Euclidean distance to another point.
    pub fn distance(&self, other: &OmegaPoint) -> f64 {
        let mut acc = (&self.y0 - &other.y0).norm_squared();
        acc += (&self.x - &other.x).norm_squared();
        for (a, b) in self.nu_local.iter().zip(other.nu_local.iter()) {
            acc += (a - b).norm_squared();
        }
        acc += (&self.nu - &other.nu).norm_squared();
        acc.sqrt()
    }
}

/// Feasibility report for membership in the relaxed set.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// `||A_omega omega - d||_inf`.
    pub equality_inf: f64,
    /// Worst violation of `lambda, mu, lambda_i, mu_i >= 0` (0 when clean).
    pub nonneg_violation: f64,
    /// `max(lambda' mu - theta, 0)`.
    pub compl_excess: f64,
    /// `max_i max(lambda_i' mu_i - theta_i, 0)`.
    pub compl_excess_local: f64,
    /// Membership violation of `y_0` in `Y_0`.
    pub leader_violation: f64,
}

impl ResidualReport {
    pub fn max_violation(&self) -> f64 {
        self.equality_inf
            .max(self.nonneg_violation)
            .max(self.compl_excess)
            .max(self.compl_excess_local)
            .max(self.leader_violation)
    }

    /// Membership test for the relaxed feasible set at tolerance `tol`.
    pub fn is_member(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

/// The assembled stacked system: pseudo-gradient blocks, equality operator
/// blocks, right-hand side, set descriptors, and dimension bookkeeping.
#[derive(Debug)]
pub struct StackedSystem {
    pub q_op: QOperator,
    /// Leader interaction stack `C` (`n x n_0`).
    pub c: DMatrix<f64>,
    /// Coupling matrix `A = [A_1 ... A_N]` (`m x n`).
    pub a: DMatrix<f64>,
    /// Local constraint blocks `F_i`.
    pub f_blocks: Vec<DMatrix<f64>>,
    /// Stacked local bounds `g = col(g_i)`.
    pub g: DVector<f64>,
    /// Coupling bound `b`.
    pub b: DVector<f64>,
    /// Stacked linear cost term.
    pub lin: DVector<f64>,
    /// Right-hand side `d = col(-lin, b, g)`.
    pub d: DVector<f64>,
    /// Leader set.
    pub leader_set: ConvexSetDescriptor,
    /// Follower local sets (box fast path when recognizable).
    pub local_sets: Vec<ConvexSetDescriptor>,
    n0: usize,
    n: usize,
    m: usize,
    p: usize,
    x_offsets: Vec<usize>,
    p_offsets: Vec<usize>,
    norms: OnceLock<BlockNorms>,
    projector: OnceLock<Arc<EqualityProjector>>,
}

/// Spectral norms of the equality blocks, cached for step-size selection.
#[derive(Debug, Clone, Copy)]
pub struct BlockNorms {
    pub a_f: f64,
    pub a_l: f64,
    pub a_c: f64,
    pub a_omega: f64,
    pub q: f64,
}

/// Assemble the stacked system from a game.
pub fn assemble_stacked(game: &AggregativeGame) -> Result<StackedSystem> {
    let n = game.n();
    let n0 = game.n0();
    let m = game.m();
    let nf = game.num_followers();
    let q_op = match game.structure() {
        InteractionStructure::Uniform => QOperator::Uniform {
            q_diag: game.followers.iter().map(|f| f.q.clone()).collect(),
            g_blocks: game.followers.iter().map(|f| f.c_row[0].clone()).collect(),
            nbar: game.followers[0].n_i(),
        },
        InteractionStructure::Dense => {
            let (q, _) = game.assemble_pseudo_gradient();
            QOperator::Dense(q)
        }
    };
    let mut c = DMatrix::zeros(n, n0);
    let mut a = DMatrix::zeros(m, n);
    let mut x_offsets = Vec::with_capacity(nf + 1);
    let mut p_offsets = Vec::with_capacity(nf + 1);
    let mut f_blocks = Vec::with_capacity(nf);
    let mut p = 0usize;
    for (i, f) in game.followers.iter().enumerate() {
        let oi = game.x_offset(i);
        c.view_mut((oi, 0), (f.n_i(), n0)).copy_from(&f.c_leader);
        a.view_mut((0, oi), (m, f.n_i())).copy_from(&f.a);
        x_offsets.push(oi);
        p_offsets.push(p);
        p += f.p_i();
        f_blocks.push(f.f.clone());
    }
    x_offsets.push(n);
    p_offsets.push(p);
    let mut g = DVector::zeros(p);
    for (i, f) in game.followers.iter().enumerate() {
        g.rows_mut(p_offsets[i], f.p_i()).copy_from(&f.g);
    }
    let lin = game.lin_stacked();
    let mut d = DVector::zeros(n + m + p);
    d.rows_mut(0, n).copy_from(&(-&lin));
    d.rows_mut(n, m).copy_from(&game.b);
    d.rows_mut(n + m, p).copy_from(&g);
    Ok(StackedSystem {
        q_op,
        c,
        a,
        f_blocks,
        g,
        b: game.b.clone(),
        lin,
        d,
        leader_set: game.leader.set.descriptor(),
        local_sets: game.followers.iter().map(|f| f.local_set()).collect(),
        n0,
        n,
        m,
        p,
        x_offsets,
        p_offsets,
        norms: OnceLock::new(),
        projector: OnceLock::new(),
    })
}

impl StackedSystem {
    pub fn n0(&self) -> usize {
        self.n0
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn num_followers(&self) -> usize {
        self.f_blocks.len()
    }
    /// Equality row count `n + m + p`.
    pub fn rows(&self) -> usize {
        self.n + self.m + self.p
    }
    /// Total decision dimension `s = n_0 + n + 2(p + m)`.
    pub fn s(&self) -> usize {
        self.n0 + self.n + 2 * (self.p + self.m)
    }
    /// Followers' block length `n + 2p`.
    pub fn y_len(&self) -> usize {
        self.n + 2 * self.p
    }

    pub fn n_i(&self, i: usize) -> usize {
        self.x_offsets[i + 1] - self.x_offsets[i]
    }
    pub fn p_i(&self, i: usize) -> usize {
        self.p_offsets[i + 1] - self.p_offsets[i]
    }
    pub fn x_offset(&self, i: usize) -> usize {
        self.x_offsets[i]
    }
    pub fn p_offset(&self, i: usize) -> usize {
        self.p_offsets[i]
    }

    /// Offset of `nu_i` inside the followers' block `y`.
    pub fn nu_offset_in_y(&self, i: usize) -> usize {
        self.n + 2 * self.p_offsets[i]
    }

    /// Zero point with the right shape.
    pub fn zero_point(&self) -> OmegaPoint {
        OmegaPoint {
            y0: DVector::zeros(self.n0),
            x: DVector::zeros(self.n),
            nu_local: (0..self.num_followers())
                .map(|i| DVector::zeros(2 * self.p_i(i)))
                .collect(),
            nu: DVector::zeros(2 * self.m),
        }
    }

    /// Rebuild an [`OmegaPoint`] from its flattened vector.
    pub fn point_from_vector(&self, v: &DVector<f64>) -> Result<OmegaPoint> {
        if v.len() != self.s() {
            return Err(SolverError::dim("omega vector", self.s(), v.len()));
        }
        let mut off = 0;
        let y0 = v.rows(off, self.n0).clone_owned();
        off += self.n0;
        let x = v.rows(off, self.n).clone_owned();
        off += self.n;
        let mut nu_local = Vec::with_capacity(self.num_followers());
        for i in 0..self.num_followers() {
            let l = 2 * self.p_i(i);
            nu_local.push(v.rows(off, l).clone_owned());
            off += l;
        }
        let nu = v.rows(off, 2 * self.m).clone_owned();
        Ok(OmegaPoint { y0, x, nu_local, nu })
    }

    /// `A_f y` for the followers' block `y = col(x, {nu_i})`.
    pub fn apply_af(&self, y: &DVector<f64>) -> DVector<f64> {
        let x = y.rows(0, self.n).clone_owned();
        let mut out = DVector::zeros(self.rows());
        let mut stat = self.q_op.apply(&x);
        for i in 0..self.num_followers() {
            let pi = self.p_i(i);
            let lam_i = y.rows(self.nu_offset_in_y(i), pi).clone_owned();
            let mut seg = stat.rows_mut(self.x_offsets[i], self.n_i(i));
            seg += self.f_blocks[i].tr_mul(&lam_i);
        }
        out.rows_mut(0, self.n).copy_from(&stat);
        out.rows_mut(self.n, self.m).copy_from(&(&self.a * &x));
        for i in 0..self.num_followers() {
            let pi = self.p_i(i);
            let xi = x.rows(self.x_offsets[i], self.n_i(i));
            let mu_i = y.rows(self.nu_offset_in_y(i) + pi, pi);
            let mut loc = &self.f_blocks[i] * xi;
            loc += mu_i;
            out.rows_mut(self.n + self.m + self.p_offsets[i], pi).copy_from(&loc);
        }
        out
    }

    /// `A_f' r` for a row vector `r = col(r_stat, r_coup, r_loc)`.
    pub fn apply_af_transpose(&self, r: &DVector<f64>) -> DVector<f64> {
        let r_stat = r.rows(0, self.n).clone_owned();
        let r_coup = r.rows(self.n, self.m).clone_owned();
        let mut out = DVector::zeros(self.y_len());
        let mut x_part = self.q_op.apply_transpose(&r_stat);
        x_part += self.a.tr_mul(&r_coup);
        for i in 0..self.num_followers() {
            let pi = self.p_i(i);
            let r_loc_i = r.rows(self.n + self.m + self.p_offsets[i], pi).clone_owned();
            let mut seg = x_part.rows_mut(self.x_offsets[i], self.n_i(i));
            seg += self.f_blocks[i].tr_mul(&r_loc_i);
            // lambda_i slot: F_i r_stat_i ; mu_i slot: r_loc_i
            let r_stat_i = r_stat.rows(self.x_offsets[i], self.n_i(i)).clone_owned();
            out.rows_mut(self.nu_offset_in_y(i), pi)
                .copy_from(&(&self.f_blocks[i] * r_stat_i));
            out.rows_mut(self.nu_offset_in_y(i) + pi, pi).copy_from(&r_loc_i);
        }
        out.rows_mut(0, self.n).copy_from(&x_part);
        out
    }

    /// `A_l y_0 = col(C y_0, 0, 0)`.
    pub fn apply_al(&self, y0: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.rows());
        out.rows_mut(0, self.n).copy_from(&(&self.c * y0));
        out
    }

    /// `A_l' r = C' r_stat`.
    pub fn apply_al_transpose(&self, r: &DVector<f64>) -> DVector<f64> {
        self.c.tr_mul(&r.rows(0, self.n).clone_owned())
    }

    /// `A_c nu = col(A' lambda, mu, 0)`.
    pub fn apply_ac(&self, nu: &DVector<f64>) -> DVector<f64> {
        let lambda = nu.rows(0, self.m).clone_owned();
        let mu = nu.rows(self.m, self.m).clone_owned();
        let mut out = DVector::zeros(self.rows());
        out.rows_mut(0, self.n).copy_from(&self.a.tr_mul(&lambda));
        out.rows_mut(self.n, self.m).copy_from(&mu);
        out
    }

    /// `A_c' r = col(A r_stat, r_coup)`.
    pub fn apply_ac_transpose(&self, r: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(2 * self.m);
        out.rows_mut(0, self.m)
            .copy_from(&(&self.a * r.rows(0, self.n).clone_owned()));
        out.rows_mut(self.m, self.m)
            .copy_from(&r.rows(self.n, self.m).clone_owned());
        out
    }

    /// `A_omega omega` on a structured point.
    pub fn apply_aw(&self, w: &OmegaPoint) -> DVector<f64> {
        let mut out = self.apply_al(&w.y0);
        out += self.apply_af(&w.y_block());
        out += self.apply_ac(&w.nu);
        out
    }

    /// `A_omega v` on a flat `s`-vector.
    pub fn apply_aw_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        let y0 = v.rows(0, self.n0).clone_owned();
        let y = v.rows(self.n0, self.y_len()).clone_owned();
        let nu = v.rows(self.n0 + self.y_len(), 2 * self.m).clone_owned();
        let mut out = self.apply_al(&y0);
        out += self.apply_af(&y);
        out += self.apply_ac(&nu);
        out
    }

    /// `A_omega' r` as a flat `s`-vector.
    pub fn apply_aw_transpose_vec(&self, r: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.s());
        out.rows_mut(0, self.n0).copy_from(&self.apply_al_transpose(r));
        out.rows_mut(self.n0, self.y_len())
            .copy_from(&self.apply_af_transpose(r));
        out.rows_mut(self.n0 + self.y_len(), 2 * self.m)
            .copy_from(&self.apply_ac_transpose(r));
        out
    }

    /// Equality residual `A_omega omega - d`.
    pub fn equality_residual(&self, w: &OmegaPoint) -> DVector<f64> {
        self.apply_aw(w) - &self.d
    }

    /// Cached block norms.
    pub fn block_norms(&self) -> BlockNorms {
        *self.norms.get_or_init(|| {
            let q = crate::linalg::operator_norm(
                self.n,
                |v| self.q_op.apply(v),
                |v| self.q_op.apply_transpose(v),
            );
            let a_f = crate::linalg::operator_norm(
                self.y_len(),
                |v| self.apply_af(v),
                |v| self.apply_af_transpose(v),
            );
            let a_l = crate::linalg::operator_norm(
                self.n0,
                |v| self.apply_al(v),
                |v| self.apply_al_transpose(v),
            );
            let a_c = crate::linalg::operator_norm(
                2 * self.m,
                |v| self.apply_ac(v),
                |v| self.apply_ac_transpose(v),
            );
            let a_omega = crate::linalg::operator_norm(
                self.s(),
                |v| self.apply_aw_vec(v),
                |v| self.apply_aw_transpose_vec(v),
            );
            BlockNorms { a_f, a_l, a_c, a_omega, q }
        })
    }

    /// Cached projector onto the affine set `{A_omega omega = d}`.
    pub fn equality_projector(&self) -> Result<Arc<EqualityProjector>> {
        if let Some(p) = self.projector.get() {
            return Ok(p.clone());
        }
        let built = Arc::new(EqualityProjector::build(self)?);
        let _ = self.projector.set(built);
        Ok(self.projector.get().unwrap().clone())
    }

    /// Dense `A_f` (tests and small systems).
    pub fn af_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows(), self.y_len());
        let q = self.q_op.to_dense();
        m.view_mut((0, 0), (self.n, self.n)).copy_from(&q);
        m.view_mut((self.n, 0), (self.m, self.n)).copy_from(&self.a);
        for i in 0..self.num_followers() {
            let pi = self.p_i(i);
            let ni = self.n_i(i);
            m.view_mut((self.x_offsets[i], self.nu_offset_in_y(i)), (ni, pi))
                .copy_from(&self.f_blocks[i].transpose());
            m.view_mut((self.n + self.m + self.p_offsets[i], self.x_offsets[i]), (pi, ni))
                .copy_from(&self.f_blocks[i]);
            m.view_mut(
                (self.n + self.m + self.p_offsets[i], self.nu_offset_in_y(i) + pi),
                (pi, pi),
            )
            .fill_diagonal(1.0);
        }
        m
    }

    /// Dense `A_l`.
    pub fn al_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows(), self.n0);
        m.view_mut((0, 0), (self.n, self.n0)).copy_from(&self.c);
        m
    }

    /// Dense `A_c`.
    pub fn ac_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.rows(), 2 * self.m);
        out.view_mut((0, 0), (self.n, self.m))
            .copy_from(&self.a.transpose());
        out.view_mut((self.n, self.m), (self.m, self.m)).fill_diagonal(1.0);
        out
    }

    /// Dense `A_omega = [A_l A_f A_c]` in the `col(y_0, y, nu)` ordering.
    pub fn aw_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows(), self.s());
        m.view_mut((0, 0), (self.rows(), self.n0)).copy_from(&self.al_dense());
        m.view_mut((0, self.n0), (self.rows(), self.y_len()))
            .copy_from(&self.af_dense());
        m.view_mut((0, self.n0 + self.y_len()), (self.rows(), 2 * self.m))
            .copy_from(&self.ac_dense());
        m
    }

    /// Dense antidiagonal pairing matrix `P` of the given half-dimension:
    /// `1/2 nu' P nu = lambda' mu`.
    pub fn pairing_matrix(half_dim: usize) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(2 * half_dim, 2 * half_dim);
        for j in 0..half_dim {
            p[(j, half_dim + j)] = 1.0;
            p[(half_dim + j, j)] = 1.0;
        }
        p
    }

    /// `lambda' mu` for a paired vector `nu = col(lambda, mu)`.
    pub fn pairing_value(nu: &DVector<f64>) -> f64 {
        let m = nu.len() / 2;
        let mut acc = 0.0;
        for j in 0..m {
            acc += nu[j] * nu[m + j];
        }
        acc
    }
}

/// Membership residuals of `omega` for the relaxed set at parameters
/// `params`.
pub fn residuals(
    sys: &StackedSystem,
    params: &RelaxationParams,
    w: &OmegaPoint,
) -> ResidualReport {
    let equality_inf = sys.equality_residual(w).amax();
    let mut nonneg = 0.0_f64;
    for v in w.nu_local.iter().chain(std::iter::once(&w.nu)) {
        nonneg = v.iter().fold(nonneg, |m, &x| m.max(-x));
    }
    let compl_excess = (StackedSystem::pairing_value(&w.nu) - params.theta).max(0.0);
    let mut compl_local = 0.0_f64;
    for (i, nu_i) in w.nu_local.iter().enumerate() {
        compl_local =
            compl_local.max(StackedSystem::pairing_value(nu_i) - params.theta_i[i]);
    }
    ResidualReport {
        equality_inf,
        nonneg_violation: nonneg.max(0.0),
        compl_excess,
        compl_excess_local: compl_local.max(0.0),
        leader_violation: sys.leader_set.violation(&w.y0),
    }
}


//! Discrete Helmholtz solution operators.
//!
//! The system matrix is `A(m, w) = S - w^2 M(m) - i w B(m)` with lumped
//! `M(m) = diag(d_k m_k)` and `B(m) = diag(b_k sqrt(m_k))`; it is complex
//! symmetric, so adjoint solves reduce to conjugation of forward solves.
//! Every forward/adjoint solve increments a shared counter, attributed to
//! the phase of the algorithm that requested it.

use crate::error::{FwiError, Result};
use crate::fem::{assemble_stiffness, nodal_weights};
use crate::grid::{Grid, Model};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Angular frequency; constructors make the Hz/angular convention explicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    angular: f64,
}

impl Frequency {
    pub fn from_hz(f: f64) -> Self {
        Frequency {
            angular: 2.0 * std::f64::consts::PI * f,
        }
    }

    pub fn from_angular(omega: f64) -> Self {
        Frequency { angular: omega }
    }

    pub fn angular(&self) -> f64 {
        self.angular
    }

    pub fn hz(&self) -> f64 {
        self.angular / (2.0 * std::f64::consts::PI)
    }
}

/// Which part of the algorithm requested a Helmholtz solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePhase {
    /// Gradient/objective evaluations at accepted lower-level iterates.
    Lower,
    /// Extra evaluations inside a lower-level line search.
    LowerLineSearch,
    /// Lower-level work spent on upper-level line-search trials.
    UpperTrial,
    /// Hessian-vector products inside CG on the rho system.
    Cg,
    /// The tau solve of the sensor-position gradient.
    Tau,
    /// Synthetic data generation and training-field caches.
    DataGen,
    Other,
}

/// Monotone counters of forward+adjoint solves, by phase.
#[derive(Debug, Default)]
pub struct SolveCounter {
    lower: AtomicU64,
    lower_ls: AtomicU64,
    upper_trial: AtomicU64,
    cg: AtomicU64,
    tau: AtomicU64,
    data_gen: AtomicU64,
    other: AtomicU64,
}

/// Immutable snapshot of a [`SolveCounter`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveCount {
    pub lower: u64,
    pub lower_line_search: u64,
    pub upper_trial: u64,
    pub cg: u64,
    pub tau: u64,
    pub data_gen: u64,
    pub other: u64,
}

impl SolveCount {
    pub fn total(&self) -> u64 {
        self.lower + self.lower_line_search + self.upper_trial + self.cg + self.tau
            + self.data_gen
            + self.other
    }

    /// Solves counted by the complexity model: accepted lower-level
    /// evaluations, CG products and tau solves. Line-search extras and data
    /// generation are excluded.
    pub fn counted_by_cost_model(&self) -> u64 {
        self.lower + self.cg + self.tau
    }
}

impl SolveCounter {
    pub fn new() -> Arc<Self> {
        Arc::new(SolveCounter::default())
    }

    fn slot(&self, phase: SolvePhase) -> &AtomicU64 {
        match phase {
            SolvePhase::Lower => &self.lower,
            SolvePhase::LowerLineSearch => &self.lower_ls,
            SolvePhase::UpperTrial => &self.upper_trial,
            SolvePhase::Cg => &self.cg,
            SolvePhase::Tau => &self.tau,
            SolvePhase::DataGen => &self.data_gen,
            SolvePhase::Other => &self.other,
        }
    }

    pub fn record(&self, phase: SolvePhase) {
        self.slot(phase).fetch_add(1, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> SolveCount {
        SolveCount {
            lower: self.lower.load(Ordering::Relaxed),
            lower_line_search: self.lower_ls.load(Ordering::Relaxed),
            upper_trial: self.upper_trial.load(Ordering::Relaxed),
            cg: self.cg.load(Ordering::Relaxed),
            tau: self.tau.load(Ordering::Relaxed),
            data_gen: self.data_gen.load(Ordering::Relaxed),
            other: self.other.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        for slot in [
            &self.lower,
            &self.lower_ls,
            &self.upper_trial,
            &self.cg,
            &self.tau,
            &self.data_gen,
            &self.other,
        ] {
            slot.store(0, Ordering::Relaxed);
        }
    }
}

/// Complex nodal wavefield for one (model, frequency, source) triple.
#[derive(Debug, Clone)]
pub struct Wavefield {
    pub values: Vec<Complex64>,
}

impl Wavefield {
    pub fn zeros(n: usize) -> Self {
        Wavefield {
            values: vec![Complex64::ZERO; n],
        }
    }
}

/// A volume load together with a boundary load.
///
/// `interior` holds the already-weighted nodal load vector of the volume
/// term and `boundary` the weighted boundary term (zero at interior nodes);
/// `solve_forward` consumes their sum. See [`weight_values`] for turning
/// plain function values into this form.
#[derive(Debug, Clone)]
pub struct BoundaryPair {
    pub interior: Vec<Complex64>,
    pub boundary: Vec<Complex64>,
}

impl BoundaryPair {
    pub fn zeros(n: usize) -> Self {
        BoundaryPair {
            interior: vec![Complex64::ZERO; n],
            boundary: vec![Complex64::ZERO; n],
        }
    }

    pub fn combined(&self) -> Vec<Complex64> {
        self.interior
            .iter()
            .zip(&self.boundary)
            .map(|(a, b)| a + b)
            .collect()
    }
}

/// Apply the quadrature weights to plain nodal function values
/// (f, f_b): interior entries are multiplied by d_k, boundary by b_k.
pub fn weight_values(fact: &HelmholtzFactorization, values: &BoundaryPair) -> BoundaryPair {
    let n = values.interior.len();
    let mut out = BoundaryPair::zeros(n);
    for k in 0..n {
        out.interior[k] = fact.d[k] * values.interior[k];
        out.boundary[k] = fact.b[k] * values.boundary[k];
    }
    out
}

/// Factorised Helmholtz operator for one (model, frequency) pair,
/// reusable across sources and adjoint solves.
pub struct HelmholtzFactorization {
    pub grid: Grid,
    pub omega: Frequency,
    pub model: Model,
    /// Lumped mass weights d_k.
    pub d: Vec<f64>,
    /// Boundary weights b_k (zero at interior nodes).
    pub b: Vec<f64>,
    lu: crate::sparse::BandLu,
    counter: Arc<SolveCounter>,
}

impl HelmholtzFactorization {
    /// Derivative weight g_k = w^2 d_k + i w b_k / (2 sqrt(m_k)); the
    /// already-weighted load of `G(sigma u)` is `g .* sigma .* u`.
    pub fn g_weight(&self, k: usize) -> Complex64 {
        let w = self.omega.angular();
        Complex64::new(
            w * w * self.d[k],
            w * self.b[k] / (2.0 * self.model.values[k].sqrt()),
        )
    }

    pub fn counter(&self) -> &Arc<SolveCounter> {
        &self.counter
    }
}

/// Assemble and factorise A(m, w). The factorisation keeps a handle to the
/// shared solve counter so later solves can be attributed.
pub fn factorize(
    grid: &Grid,
    m: &Model,
    omega: Frequency,
    counter: Arc<SolveCounter>,
) -> Result<HelmholtzFactorization> {
    if m.len() != grid.num_nodes() {
        return Err(FwiError::Config(format!(
            "model length {} does not match grid ({} nodes)",
            m.len(),
            grid.num_nodes()
        )));
    }
    if !m.is_positive() {
        return Err(FwiError::Config("model must be positive".into()));
    }
    let w = omega.angular();
    if !(w > 0.0) {
        return Err(FwiError::Config(format!("frequency must be positive, got {w}")));
    }
    let s = assemble_stiffness(grid);
    let (d, b) = nodal_weights(grid);
    let n = grid.num_nodes();
    let bw = grid.n2;
    let mut a = crate::sparse::BandMatrix::zeros(n, bw);
    for r in 0..n {
        for idx in s.row_ptr[r]..s.row_ptr[r + 1] {
            a.add(r, s.col_idx[idx], Complex64::new(s.values[idx], 0.0));
        }
        let mk = m.values[r];
        a.add(
            r,
            r,
            Complex64::new(-w * w * d[r] * mk, -w * b[r] * mk.sqrt()),
        );
    }
    let lu = a.factorize()?;
    Ok(HelmholtzFactorization {
        grid: *grid,
        omega,
        model: m.clone(),
        d,
        b,
        lu,
        counter,
    })
}

/// Solve A u = rhs; counts one solve.
pub fn solve_forward(
    fact: &HelmholtzFactorization,
    rhs: &BoundaryPair,
    phase: SolvePhase,
) -> Wavefield {
    let load = rhs.combined();
    solve_forward_load(fact, &load, phase)
}

/// Solve A u = load for an already-combined load vector.
pub fn solve_forward_load(
    fact: &HelmholtzFactorization,
    load: &[Complex64],
    phase: SolvePhase,
) -> Wavefield {
    fact.counter.record(phase);
    Wavefield {
        values: fact.lu.solve_complex(load),
    }
}

/// Solve A* v = rhs via conj(A^{-1} conj(rhs)); counts one solve.
pub fn solve_adjoint(
    fact: &HelmholtzFactorization,
    rhs: &BoundaryPair,
    phase: SolvePhase,
) -> Wavefield {
    let load = rhs.combined();
    solve_adjoint_load(fact, &load, phase)
}

/// Solve A* v = load for an already-combined load vector.
pub fn solve_adjoint_load(
    fact: &HelmholtzFactorization,
    load: &[Complex64],
    phase: SolvePhase,
) -> Wavefield {
    fact.counter.record(phase);
    Wavefield {
        values: fact.lu.solve_conjugate(load),
    }
}

/// Load vector of a point source at `s`: hat-function evaluations at the
/// enclosing triangle's vertices (the standard basis vector when `s` is a
/// node). This is already the weighted load of a delta function.
pub fn point_source_rhs(grid: &Grid, s: (f64, f64)) -> Result<BoundaryPair> {
    let (sx, sz) = s;
    if !grid.contains_strictly(sx, sz) {
        return Err(FwiError::OutOfDomain { x: sx, z: sz });
    }
    let n = grid.num_nodes();
    let mut pair = BoundaryPair::zeros(n);
    // cell indices, assigning points on cell boundaries to the lower cell
    let ci = cell_of(sx, grid.hx, grid.n1);
    let cj = cell_of(sz, grid.hz, grid.n2);
    let tx = (sx - ci as f64 * grid.hx) / grid.hx;
    let tz = (sz - cj as f64 * grid.hz) / grid.hz;
    let a = grid.index(ci, cj);
    let b = grid.index(ci + 1, cj);
    let c = grid.index(ci, cj + 1);
    let dd = grid.index(ci + 1, cj + 1);
    // two-triangle split along the bottom-left/top-right diagonal
    if tx >= tz {
        // lower triangle (a, b, d): barycentric weights
        pair.interior[a] += Complex64::new(1.0 - tx, 0.0);
        pair.interior[b] += Complex64::new(tx - tz, 0.0);
        pair.interior[dd] += Complex64::new(tz, 0.0);
    } else {
        // upper triangle (a, d, c)
        pair.interior[a] += Complex64::new(1.0 - tz, 0.0);
        pair.interior[dd] += Complex64::new(tx, 0.0);
        pair.interior[c] += Complex64::new(tz - tx, 0.0);
    }
    Ok(pair)
}

pub(crate) fn cell_of(p: f64, h: f64, n: usize) -> usize {
    let t = p / h;
    let c = (t.ceil() as isize - 1).max(0) as usize;
    c.min(n - 2)
}

/// The operator G_{m,w}: (v, v_b) -> (w^2 v, (i w / 2)(v_b / sqrt(m))).
/// Input and output are plain function values (unweighted).
pub fn apply_g(grid: &Grid, m: &Model, omega: Frequency, v: &BoundaryPair) -> BoundaryPair {
    let w = omega.angular();
    let n = grid.num_nodes();
    let mut out = BoundaryPair::zeros(n);
    for k in 0..n {
        out.interior[k] = w * w * v.interior[k];
        if grid.is_boundary(k) {
            out.boundary[k] =
                Complex64::new(0.0, w / 2.0) * v.boundary[k] / m.values[k].sqrt();
        }
    }
    out
}

/// Already-weighted load of G applied to the nodal product `sigma .* u`,
/// i.e. `g .* sigma .* u` with the derivative weight g of the factorisation.
pub fn g_weighted_load(
    fact: &HelmholtzFactorization,
    sigma: &[f64],
    u: &[Complex64],
) -> Vec<Complex64> {
    (0..u.len())
        .map(|k| fact.g_weight(k) * sigma[k] * u[k])
        .collect()
}

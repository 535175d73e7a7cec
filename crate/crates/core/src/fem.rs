//! Discrete operators on the grid: P1 stiffness, lumped mass and boundary
//! weights, difference matrices and the Tikhonov regulariser.
//!
//! Each rectangular cell is split into two triangles along the same
//! bottom-left to top-right diagonal; mass and boundary integrals use nodal
//! (vertex) quadrature, which makes both matrices diagonal.

use crate::error::{FwiError, Result};
use crate::grid::{Grid, NodeClass};
use crate::sparse::CsrMatrix;

/// Difference matrix D_n of shape (n-1) x n with the (n-1) prefactor:
/// row i is (n-1) * (e_i - e_{i+1}).
pub fn difference_matrix(n: usize) -> Result<CsrMatrix> {
    if n < 2 {
        return Err(FwiError::Config(format!(
            "difference matrix needs n >= 2, got {n}"
        )));
    }
    let scale = (n - 1) as f64;
    let mut triplets = Vec::with_capacity(2 * (n - 1));
    for i in 0..n - 1 {
        triplets.push((i, i, scale));
        triplets.push((i, i + 1, -scale));
    }
    Ok(CsrMatrix::from_triplets(n - 1, n, triplets))
}

/// Tikhonov regulariser Gamma(alpha, mu) = alpha R + mu I with
/// R = D_x^T D_x + D_z^T D_z on the grid's node ordering.
#[derive(Debug, Clone)]
pub struct Regulariser {
    pub alpha: f64,
    pub mu: f64,
    /// The pure smoothing part R (positive semidefinite, annihilates constants).
    pub r: CsrMatrix,
    /// Gamma = alpha R + mu I.
    pub gamma: CsrMatrix,
}

impl Regulariser {
    /// y = Gamma x
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.gamma.mul_vec(x)
    }

    /// y = R x (needed by the derivative of the upper objective in alpha).
    pub fn apply_r(&self, x: &[f64]) -> Vec<f64> {
        self.r.mul_vec(x)
    }

    /// Same smoothing matrix, different weights.
    pub fn with_alpha(&self, alpha: f64) -> Regulariser {
        build_gamma(self.r.clone(), alpha, self.mu)
    }
}

/// Assemble the regulariser on a grid. `mu` may be zero for oracle tests;
/// Gamma is positive definite only for mu > 0.
pub fn assemble_regulariser(grid: &Grid, alpha: f64, mu: f64) -> Result<Regulariser> {
    if alpha < 0.0 || mu < 0.0 {
        return Err(FwiError::Config(format!(
            "regulariser weights must be nonnegative, got alpha={alpha}, mu={mu}"
        )));
    }
    let m = grid.num_nodes();
    let dx1 = difference_matrix(grid.n1)?; // acts along x
    let dz1 = difference_matrix(grid.n2)?; // acts along z
    let rx1 = dx1.transpose_times_self(); // n1 x n1
    let rz1 = dz1.transpose_times_self(); // n2 x n2

    // R = (D_{n1}^T D_{n1}) (x) I_{n2}  +  I_{n1} (x) (D_{n2}^T D_{n2})
    let mut triplets = Vec::new();
    for a in 0..grid.n1 {
        for idx in rx1.row_ptr[a]..rx1.row_ptr[a + 1] {
            let b = rx1.col_idx[idx];
            let v = rx1.values[idx];
            for j in 0..grid.n2 {
                triplets.push((grid.index(a, j), grid.index(b, j), v));
            }
        }
    }
    for a in 0..grid.n2 {
        for idx in rz1.row_ptr[a]..rz1.row_ptr[a + 1] {
            let b = rz1.col_idx[idx];
            let v = rz1.values[idx];
            for i in 0..grid.n1 {
                triplets.push((grid.index(i, a), grid.index(i, b), v));
            }
        }
    }
    let r = CsrMatrix::from_triplets(m, m, triplets);
    Ok(build_gamma(r, alpha, mu))
}

fn build_gamma(r: CsrMatrix, alpha: f64, mu: f64) -> Regulariser {
    let m = r.nrows;
    let mut triplets = Vec::with_capacity(r.nnz() + m);
    for row in 0..m {
        for idx in r.row_ptr[row]..r.row_ptr[row + 1] {
            triplets.push((row, r.col_idx[idx], alpha * r.values[idx]));
        }
        triplets.push((row, row, mu));
    }
    let gamma = CsrMatrix::from_triplets(m, m, triplets);
    Regulariser { alpha, mu, r, gamma }
}

/// P1 stiffness matrix assembled from the two-triangle split of each cell.
/// Symmetric positive semidefinite with constants in its kernel; on this
/// split it has five-point sparsity.
pub fn assemble_stiffness(grid: &Grid) -> CsrMatrix {
    let m = grid.num_nodes();
    let hx = grid.hx;
    let hz = grid.hz;
    // Local stiffness of the right triangle with legs hx, hz. For vertices
    // (a, b, d) = right-angle at b: entries derived from the P1 gradients.
    let kxx = hz / (2.0 * hx);
    let kzz = hx / (2.0 * hz);
    let mut triplets = Vec::with_capacity(9 * 2 * (grid.n1 - 1) * (grid.n2 - 1));
    let mut emit = |a: usize, b: usize, v: f64| {
        triplets.push((a, b, v));
    };
    for i in 0..grid.n1 - 1 {
        for j in 0..grid.n2 - 1 {
            let a = grid.index(i, j);
            let b = grid.index(i + 1, j);
            let c = grid.index(i, j + 1);
            let d = grid.index(i + 1, j + 1);
            // lower triangle (a, b, d): right angle at b
            emit(a, a, kxx);
            emit(a, b, -kxx);
            emit(b, a, -kxx);
            emit(b, b, kxx + kzz);
            emit(b, d, -kzz);
            emit(d, b, -kzz);
            emit(d, d, kzz);
            // upper triangle (a, d, c): right angle at c
            emit(a, a, kzz);
            emit(a, c, -kzz);
            emit(c, a, -kzz);
            emit(c, c, kzz + kxx);
            emit(c, d, -kxx);
            emit(d, c, -kxx);
            emit(d, d, kxx);
        }
    }
    CsrMatrix::from_triplets(m, m, triplets)
}

/// Diagonal quadrature weights: `d` from the lumped mass matrix (area/3 per
/// incident triangle), `b` from the boundary mass (half the incident
/// boundary edge lengths, zero at interior nodes).
pub fn nodal_weights(grid: &Grid) -> (Vec<f64>, Vec<f64>) {
    let m = grid.num_nodes();
    let tri = grid.hx * grid.hz / 2.0;
    let mut d = vec![0.0; m];
    for i in 0..grid.n1 - 1 {
        for j in 0..grid.n2 - 1 {
            let a = grid.index(i, j);
            let b = grid.index(i + 1, j);
            let c = grid.index(i, j + 1);
            let dd = grid.index(i + 1, j + 1);
            // lower triangle (a, b, d) and upper triangle (a, d, c)
            for k in [a, b, dd, a, dd, c] {
                d[k] += tri / 3.0;
            }
        }
    }
    let mut bvec = vec![0.0; m];
    for i in 0..grid.n1 {
        for j in 0..grid.n2 {
            if grid.classify(i, j) == NodeClass::Interior {
                continue;
            }
            let k = grid.index(i, j);
            let mut len = 0.0;
            // horizontal boundary edges exist along j = 0 and j = n2-1
            if j == 0 || j == grid.n2 - 1 {
                if i > 0 {
                    len += grid.hx;
                }
                if i < grid.n1 - 1 {
                    len += grid.hx;
                }
            }
            // vertical boundary edges along i = 0 and i = n1-1
            if i == 0 || i == grid.n1 - 1 {
                if j > 0 {
                    len += grid.hz;
                }
                if j < grid.n2 - 1 {
                    len += grid.hz;
                }
            }
            bvec[k] = len / 2.0;
        }
    }
    (d, bvec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn difference_matrix_n3() {
        let d = difference_matrix(3).unwrap();
        assert_eq!(d.nrows, 2);
        assert_eq!(d.ncols, 3);
        let expect = [[2.0, -2.0, 0.0], [0.0, 2.0, -2.0]];
        for r in 0..2 {
            for c in 0..3 {
                assert_eq!(d.entry(r, c), expect[r][c]);
            }
        }
    }

    #[test]
    fn difference_matrix_n2_and_constants() {
        let d = difference_matrix(2).unwrap();
        assert_eq!(d.entry(0, 0), 1.0);
        assert_eq!(d.entry(0, 1), -1.0);
        assert!(difference_matrix(1).is_err());

        let d5 = difference_matrix(5).unwrap();
        let out = d5.mul_vec(&[3.5; 5]);
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn regulariser_2x2_first_column() {
        let g = build_grid(2, 2, 1.0, 1.0).unwrap();
        let reg = assemble_regulariser(&g, 1.0, 0.5).unwrap();
        let mut e1 = vec![0.0; 4];
        e1[0] = 1.0;
        let col = reg.apply(&e1);
        let expect = [2.5, -1.0, -1.0, 0.0];
        for k in 0..4 {
            assert!(
                (col[k] - expect[k]).abs() < 1e-14,
                "entry {k}: {} vs {}",
                col[k],
                expect[k]
            );
        }
    }

    #[test]
    fn regulariser_annihilates_constants() {
        let g = build_grid(5, 4, 2.0, 1.0).unwrap();
        let reg = assemble_regulariser(&g, 3.7, 0.25).unwrap();
        let ones = vec![1.0; g.num_nodes()];
        let out = reg.apply(&ones);
        for v in out {
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn regulariser_alpha_zero_is_scaled_identity() {
        let g = build_grid(4, 4, 1.0, 1.0).unwrap();
        let reg = assemble_regulariser(&g, 0.0, 0.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: Vec<f64> = (0..g.num_nodes()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let out = reg.apply(&v);
        for k in 0..v.len() {
            assert!((out[k] - 0.75 * v[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn regulariser_interior_rows_kill_linear_x() {
        // power-of-two spacing keeps the nodal samples exactly linear
        let g = build_grid(9, 5, 2.0, 1.0).unwrap();
        let reg = assemble_regulariser(&g, 1.0, 0.0).unwrap();
        let mut f = vec![0.0; g.num_nodes()];
        for i in 0..g.n1 {
            for j in 0..g.n2 {
                f[g.index(i, j)] = g.position(i, j).0;
            }
        }
        let out = reg.apply_r(&f);
        for i in 1..g.n1 - 1 {
            for j in 0..g.n2 {
                assert_eq!(out[g.index(i, j)], 0.0, "interior-in-x row ({i}, {j})");
            }
        }
    }

    #[test]
    fn regulariser_spd_smallest_ritz_value() {
        // 20 Lanczos steps on Gamma; Ritz values stay within the spectrum,
        // whose minimum is mu (constants are in the kernel of R).
        let g = build_grid(7, 6, 1.0, 1.5).unwrap();
        let mu = 0.35;
        let reg = assemble_regulariser(&g, 2.0, mu).unwrap();
        let m = g.num_nodes();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut q_prev = vec![0.0; m];
        let mut q: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nrm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        q.iter_mut().for_each(|v| *v /= nrm);
        let steps = 20;
        let mut alphas = Vec::new();
        let mut betas = Vec::new();
        let mut beta = 0.0;
        for _ in 0..steps {
            let mut w = reg.apply(&q);
            let a: f64 = w.iter().zip(&q).map(|(x, y)| x * y).sum();
            for k in 0..m {
                w[k] -= a * q[k] + beta * q_prev[k];
            }
            alphas.push(a);
            beta = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if beta < 1e-14 {
                break;
            }
            betas.push(beta);
            q_prev = q.clone();
            q = w.into_iter().map(|v| v / beta).collect();
        }
        // Sturm count on the Lanczos tridiagonal: no Ritz value may fall
        // below mu*(1-1e-8)
        let target = mu * (1.0 - 1e-8);
        let mut count = 0;
        let mut dcur = alphas[0] - target;
        if dcur < 0.0 {
            count += 1;
        }
        for i in 1..alphas.len() {
            dcur = (alphas[i] - target) - betas[i - 1] * betas[i - 1] / dcur;
            if dcur < 0.0 {
                count += 1;
            }
        }
        assert_eq!(count, 0, "a Ritz value fell below mu*(1-1e-8)");
        // and the banded Cholesky of Gamma succeeds
        let bw = g.n2;
        assert!(crate::sparse::BandCholesky::from_csr(&reg.gamma, bw).is_ok());
    }

    #[test]
    fn stiffness_kernel_and_diagonal() {
        let g = build_grid(4, 4, 1.0, 1.0).unwrap();
        let s = assemble_stiffness(&g);
        let ones = vec![1.0; g.num_nodes()];
        for v in s.mul_vec(&ones) {
            assert!(v.abs() < 1e-13);
        }
        // interior diagonal entry on square cells is 4
        let k = g.index(1, 2);
        assert!((s.entry(k, k) - 4.0).abs() < 1e-13);
        // five-point sparsity: no diagonal-neighbour coupling
        assert_eq!(s.entry(g.index(1, 1), g.index(2, 2)), 0.0);
    }

    #[test]
    fn stiffness_positive_semidefinite() {
        let g = build_grid(5, 5, 1.0, 2.0).unwrap();
        let s = assemble_stiffness(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let v: Vec<f64> = (0..g.num_nodes()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sv = s.mul_vec(&v);
            let q: f64 = v.iter().zip(&sv).map(|(a, b)| a * b).sum();
            assert!(q >= -1e-12);
        }
    }

    #[test]
    fn nodal_weights_values() {
        let g = build_grid(440, 121, 10.975, 3.0).unwrap();
        let (d, b) = nodal_weights(&g);
        let k = g.index(10, 10);
        assert!((d[k] - 6.25e-4).abs() < 1e-16);
        assert_eq!(b[k], 0.0);
    }

    #[test]
    fn nodal_weights_boundary_example() {
        // mid-edge node on the left edge with hz = 0.5: two incident
        // boundary edges of length 0.5, half their total is 0.5
        let g = build_grid(3, 5, 1.0, 2.0).unwrap();
        let (_, b) = nodal_weights(&g);
        let k = g.index(0, 2);
        assert!((b[k] - 0.5).abs() < 1e-14);
        // corner: one horizontal plus one vertical edge
        let kc = g.index(0, 0);
        assert!((b[kc] - (g.hx + g.hz) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn weight_sums_match_area_and_perimeter() {
        for (n1, n2, wx, wz) in [(4, 7, 1.3, 2.9), (9, 5, 10.0, 3.0), (2, 2, 1.0, 1.0)] {
            let g = build_grid(n1, n2, wx, wz).unwrap();
            let (d, b) = nodal_weights(&g);
            let sum_d: f64 = d.iter().sum();
            let sum_b: f64 = b.iter().sum();
            assert!(
                (sum_d - wx * wz).abs() < 1e-12 * wx * wz,
                "area mismatch on {n1}x{n2}"
            );
            let per = 2.0 * (wx + wz);
            assert!((sum_b - per).abs() < 1e-12 * per, "perimeter mismatch");
        }
    }

    #[test]
    fn corner_weights_follow_diagonal() {
        let g = build_grid(5, 4, 1.0, 1.0).unwrap();
        let (d, _) = nodal_weights(&g);
        let cell = g.hx * g.hz;
        // diagonal endpoints (bottom-left, top-right) touch two triangles
        assert!((d[g.index(0, 0)] - cell / 3.0).abs() < 1e-15);
        assert!((d[g.index(4, 3)] - cell / 3.0).abs() < 1e-15);
        // the other two corners touch a single triangle
        assert!((d[g.index(4, 0)] - cell / 6.0).abs() < 1e-15);
        assert!((d[g.index(0, 3)] - cell / 6.0).abs() < 1e-15);
    }
}

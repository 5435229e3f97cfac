//! Semidefinite relaxation of the ±1 knapsack.
//!
//! With `y_i = 2δ_i − 1` and a homogenizing `y₀`, the lifted matrix
//! `Y ≈ y yᵀ` (index 0 is `y₀`) relaxes the knapsack to
//!
//! ```text
//! max  ½ Σ Δ_i Y_i0 + ½ Σ Δ_i
//! s.t. ½ Σ h_i Y_i0 ≤ C − H/2                         (capacity)
//!      Σ h_i Y_i0 ≥ 2(C − h_max) − H                   (lower cut, when 2C ≤ H)
//!      Σ_{i≠j} h_i h_j Y_ij ≤ (2(C − h_max) − H)² − Σ h_i²  (squared cut, when 2C ≤ H)
//!      diag(Y) = 1,  Y ⪰ 0
//! ```
//!
//! Solved by an infeasible primal-dual interior-point method (HKM direction,
//! Mehrotra predictor-corrector) on the cone `S₊ × R₊^m`, the cuts carrying
//! slack variables. The reported bound comes from a dual certificate repaired
//! to exact feasibility, so it upper-bounds the relaxation even though the
//! iterate is only approximately optimal.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::instance::KnapsackInstance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SdpOptions {
    pub max_iter: usize,
    /// Relative primal, dual and gap tolerance.
    pub tolerance: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    /// Unit-diagonal PSD matrix of dimension `n + 1`.
    pub y: DMatrix<f64>,
    /// Certified upper bound on the relaxation optimum.
    pub bound: f64,
    /// Relaxation objective attained by `y`.
    pub primal_objective: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

/// Linear functional `⟨A, Y⟩ ≤ b` on symmetric matrices, `‖A‖_F = 1`.
struct HalfSpace {
    a: DMatrix<f64>,
    b: f64,
}

struct Lifted {
    dim: usize,
    objective: DMatrix<f64>,
    cuts: Vec<HalfSpace>,
    value_scale: f64,
    constant: f64,
}

impl Lifted {
    fn new(inst: &KnapsackInstance) -> Self {
        let n = inst.len();
        let dim = n + 1;
        let value_scale = inst.values.iter().copied().fold(0.0, f64::max);
        let weight_scale = inst.max_weight().max(inst.capacity.abs()).max(f64::MIN_POSITIVE);
        let h: Vec<f64> = inst.weights.iter().map(|w| w / weight_scale).collect();
        let cap = inst.capacity / weight_scale;
        let total: f64 = h.iter().sum();
        let h_max = h.iter().copied().fold(0.0, f64::max);

        let mut objective = DMatrix::zeros(dim, dim);
        for i in 0..n {
            let w = inst.values[i] / value_scale / 4.0;
            objective[(i + 1, 0)] = w;
            objective[(0, i + 1)] = w;
        }

        let mut cuts = Vec::new();
        let mut push = |a: DMatrix<f64>, b: f64| {
            let norm = a.norm();
            if norm > 0.0 {
                cuts.push(HalfSpace { a: a / norm, b: b / norm });
            }
        };

        let mut a = DMatrix::zeros(dim, dim);
        for i in 0..n {
            a[(i + 1, 0)] = h[i] / 4.0;
            a[(0, i + 1)] = h[i] / 4.0;
        }
        push(a, cap - total / 2.0);

        if 2.0 * cap <= total {
            let floor = 2.0 * (cap - h_max) - total;
            let mut a = DMatrix::zeros(dim, dim);
            for i in 0..n {
                a[(i + 1, 0)] = -h[i] / 2.0;
                a[(0, i + 1)] = -h[i] / 2.0;
            }
            push(a, -floor);

            let mut a = DMatrix::zeros(dim, dim);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        a[(i + 1, j + 1)] = h[i] * h[j];
                    }
                }
            }
            let sq: f64 = h.iter().map(|x| x * x).sum();
            push(a, floor * floor - sq);
        }

        Self {
            dim,
            objective,
            cuts,
            value_scale,
            constant: 0.5 * inst.values.iter().sum::<f64>(),
        }
    }

    fn to_original(&self, normalized: f64) -> f64 {
        self.value_scale * normalized + self.constant
    }

    /// `𝒜(X, s)`: the unit diagonal followed by `⟨A_k, X⟩ + s_k`.
    fn apply(&self, x: &DMatrix<f64>, s: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d + self.cuts.len(), |r, _| {
            if r < d {
                x[(r, r)]
            } else {
                self.cuts[r - d].a.dot(x) + s[r - d]
            }
        })
    }

    /// Matrix part of `𝒜*(y) = Σ y_r A_r`.
    fn adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        let mut m = DMatrix::from_diagonal(&y.rows(0, d).into_owned());
        for (k, cut) in self.cuts.iter().enumerate() {
            m += &cut.a * y[d + k];
        }
        m
    }

    fn rhs(&self) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d + self.cuts.len(), |r, _| if r < d { 1.0 } else { self.cuts[r - d].b })
    }
}

/// Largest step in `(0, 1]` keeping `m + α·dm` positive definite, damped.
fn psd_step(chol: &Cholesky<f64, nalgebra::Dyn>, dm: &DMatrix<f64>) -> f64 {
    let l = chol.l();
    let inv_l = l.clone().try_inverse().expect("Cholesky factor is invertible");
    let mut t = &inv_l * dm * inv_l.transpose();
    symmetrize(&mut t);
    let lmin = min_eigenvalue(&t);
    if lmin >= 0.0 {
        1.0
    } else {
        (-0.98 / lmin).min(1.0)
    }
}

fn lp_step(v: &DVector<f64>, dv: &DVector<f64>) -> f64 {
    v.iter()
        .zip(dv.iter())
        .filter(|(_, &d)| d < 0.0)
        .map(|(&x, &d)| -0.98 * x / d)
        .fold(1.0, f64::min)
}

struct Direction {
    dx: DMatrix<f64>,
    ds: DVector<f64>,
    dy: DVector<f64>,
    dz: DMatrix<f64>,
    dzs: DVector<f64>,
}

/// Solve `W = C − 𝒜*y − Z` and `A(X, s) = b` for the eigen-free HKM step.
struct Newton<'a> {
    lifted: &'a Lifted,
    x: &'a DMatrix<f64>,
    s: &'a DVector<f64>,
    z_inv: DMatrix<f64>,
    zs: &'a DVector<f64>,
    schur: Cholesky<f64, nalgebra::Dyn>,
}

impl<'a> Newton<'a> {
    fn new(
        lifted: &'a Lifted,
        x: &'a DMatrix<f64>,
        s: &'a DVector<f64>,
        z: &DMatrix<f64>,
        zs: &'a DVector<f64>,
    ) -> Option<Self> {
        let d = lifted.dim;
        let m = lifted.cuts.len();
        let z_inv = z.clone().cholesky()?.inverse();
        // G_k = X A_k Z⁻¹ for the cuts.
        let g: Vec<DMatrix<f64>> = lifted.cuts.iter().map(|c| x * &c.a * &z_inv).collect();
        let mut schur = DMatrix::zeros(d + m, d + m);
        for i in 0..d {
            for j in 0..d {
                schur[(i, j)] = x[(i, j)] * z_inv[(j, i)];
            }
        }
        for k in 0..m {
            for i in 0..d {
                let v = g[k][(i, i)];
                schur[(i, d + k)] = v;
                schur[(d + k, i)] = v;
            }
            for l in 0..m {
                schur[(d + k, d + l)] = lifted.cuts[k].a.dot(&g[l].transpose());
            }
            schur[(d + k, d + k)] += s[k] / zs[k];
        }
        symmetrize(&mut schur);
        let schur = schur.cholesky()?;
        Some(Self { lifted, x, s, z_inv, zs, schur })
    }

    /// Step for primal residual `rp`, dual residuals `(rd, rds)` and
    /// complementarity targets `rc = σμI − XZ − ...` and `rcs`.
    fn solve(
        &self,
        rp: &DVector<f64>,
        rd: &DMatrix<f64>,
        rds: &DVector<f64>,
        rc: &DMatrix<f64>,
        rcs: &DVector<f64>,
    ) -> Direction {
        let d = self.lifted.dim;
        let m = self.lifted.cuts.len();
        // K = (Rc − X Rd) Z⁻¹ so that ΔX = sym(K + X 𝒜*(Δy) Z⁻¹).
        let k_mat = (rc - self.x * rd) * &self.z_inv;
        let k_vec = DVector::from_fn(m, |k, _| (rcs[k] - self.s[k] * rds[k]) / self.zs[k]);
        let applied = self.lifted.apply(&k_mat, &k_vec);
        let dy = self.schur.solve(&(rp - applied));
        let mut dz = rd - self.lifted.adjoint(&dy);
        symmetrize(&mut dz);
        let dzs = DVector::from_fn(m, |k, _| rds[k] - dy[d + k]);
        let mut dx = (rc - self.x * &dz) * &self.z_inv;
        symmetrize(&mut dx);
        let ds = DVector::from_fn(m, |k, _| (rcs[k] - self.s[k] * dzs[k]) / self.zs[k]);
        Direction { dx, ds, dy, dz, dzs }
    }
}

/// Solve the relaxation of `inst`.
pub fn solve_sdp(inst: &KnapsackInstance, opts: &SdpOptions) -> Result<SdpSolution> {
    inst.validate()?;
    if inst.is_empty() {
        return Err(Error::Domain("relaxation needs at least one item".into()));
    }
    if inst.capacity < 0.0 {
        return Err(Error::InfeasibleRelaxation {
            capacity: inst.capacity,
        });
    }
    let lifted = Lifted::new(inst);
    let d = lifted.dim;
    let m = lifted.cuts.len();
    let tol = opts.tolerance;
    // Minimization form: min ⟨C, X⟩ with C = −W.
    let c = -lifted.objective.clone();
    let b = lifted.rhs();
    let b_norm = 1.0 + b.norm();
    let c_norm = 1.0 + c.norm();

    let mut x = DMatrix::<f64>::identity(d, d);
    let mut s = DVector::<f64>::from_element(m, 1.0);
    let mut y = DVector::<f64>::zeros(d + m);
    let mut z = DMatrix::<f64>::identity(d, d);
    let mut zs = DVector::<f64>::from_element(m, 1.0);
    let nu = (d + m) as f64;

    let mut iterations = 0;
    let mut primal_residual;
    let mut dual_residual;
    let identity = DMatrix::<f64>::identity(d, d);
    loop {
        let rp = &b - lifted.apply(&x, &s);
        let mut rd = &c - lifted.adjoint(&y) - &z;
        symmetrize(&mut rd);
        let rds = DVector::from_fn(m, |k, _| -y[d + k] - zs[k]);
        primal_residual = rp.norm();
        dual_residual = (rd.norm_squared() + rds.norm_squared()).sqrt();
        let mu = (x.dot(&z) + s.dot(&zs)) / nu;
        let pobj = c.dot(&x);
        let dobj = b.dot(&y);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if primal_residual / b_norm <= tol && dual_residual / c_norm <= tol && gap <= tol && mu <= tol {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(Error::Convergence {
                iterations,
                primal_residual,
                dual_residual,
            });
        }
        iterations += 1;

        let Some(newton) = Newton::new(&lifted, &x, &s, &z, &zs) else {
            return Err(Error::Convergence {
                iterations,
                primal_residual,
                dual_residual,
            });
        };
        let xz = &x * &z;
        let szs = s.component_mul(&zs);

        // Predictor: pure Newton step toward complementarity.
        let aff = newton.solve(&rp, &rd, &rds, &(-&xz), &(-&szs));
        let x_chol = x.clone().cholesky().expect("iterate stays positive definite");
        let z_chol = z.clone().cholesky().expect("iterate stays positive definite");
        let ap = psd_step(&x_chol, &aff.dx).min(lp_step(&s, &aff.ds));
        let ad = psd_step(&z_chol, &aff.dz).min(lp_step(&zs, &aff.dzs));
        let mu_aff = ((&x + &aff.dx * ap).dot(&(&z + &aff.dz * ad))
            + (&s + &aff.ds * ap).dot(&(&zs + &aff.dzs * ad)))
            / nu;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector with the second-order term.
        let rc = &identity * (sigma * mu) - &xz - &aff.dx * &aff.dz;
        let rcs = DVector::from_element(m, sigma * mu) - &szs - aff.ds.component_mul(&aff.dzs);
        let dir = newton.solve(&rp, &rd, &rds, &rc, &rcs);
        let ap = psd_step(&x_chol, &dir.dx).min(lp_step(&s, &dir.ds));
        let ad = psd_step(&z_chol, &dir.dz).min(lp_step(&zs, &dir.dzs));
        x += &dir.dx * ap;
        symmetrize(&mut x);
        s += &dir.ds * ap;
        y += &dir.dy * ad;
        z += &dir.dz * ad;
        symmetrize(&mut z);
        zs += &dir.dzs * ad;
    }

    // Dual certificate: with ν = −y_diag and λ = max(0, −y_cut), the matrix
    // Diag(ν) + Σ λ_k A_k − W must be PSD; shifting ν by its most negative
    // eigenvalue makes it so, and Σ ν + Σ λ_k b_k bounds the optimum.
    let mut nu_dual: Vec<f64> = (0..d).map(|i| -y[i]).collect();
    let lambda: Vec<f64> = (0..m).map(|k| (-y[d + k]).max(0.0)).collect();
    let mut slack = -lifted.objective.clone();
    for (k, cut) in lifted.cuts.iter().enumerate() {
        slack += &cut.a * lambda[k];
    }
    for i in 0..d {
        slack[(i, i)] += nu_dual[i];
    }
    symmetrize(&mut slack);
    let shift = min_eigenvalue(&slack).min(0.0);
    for v in nu_dual.iter_mut() {
        *v -= shift;
    }
    let dual: f64 = nu_dual.iter().sum::<f64>()
        + lifted
            .cuts
            .iter()
            .zip(&lambda)
            .map(|(c, l)| c.b * l)
            .sum::<f64>();

    // Congruence scaling restores the exact unit diagonal and keeps PSD.
    let scale: Vec<f64> = (0..d).map(|i| 1.0 / x[(i, i)].max(1e-300).sqrt()).collect();
    let mut yy = x;
    for i in 0..d {
        for j in 0..d {
            yy[(i, j)] *= scale[i] * scale[j];
        }
    }
    let primal = lifted.objective.dot(&yy);

    Ok(SdpSolution {
        bound: lifted.to_original(dual),
        primal_objective: lifted.to_original(primal),
        y: yy,
        iterations,
        primal_residual,
        dual_residual,
    })
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_item_relaxation_is_tight() {
        // h ≤ C: selecting the item is feasible, so Y is the all-ones matrix.
        let inst = KnapsackInstance::knapsack(vec![1.0], vec![1.0], 1.5);
        let sol = solve_sdp(&inst, &SdpOptions::default()).unwrap();
        for v in sol.y.iter() {
            assert!((v - 1.0).abs() < 1e-4, "{}", sol.y);
        }
        assert!((sol.bound - 1.0).abs() < 1e-5, "bound {}", sol.bound);
        assert!(sol.bound >= 1.0 - 1e-9);
        assert!((sol.primal_objective - 1.0).abs() < 1e-4);
    }

    #[test]
    fn unit_diagonal_and_psd() {
        let inst = KnapsackInstance::knapsack(
            vec![3.0, 1.0, 2.0, 2.5, 0.7],
            vec![4.0, 1.0, 3.0, 2.0, 0.5],
            5.0,
        );
        let sol = solve_sdp(&inst, &SdpOptions::default()).unwrap();
        for i in 0..sol.y.nrows() {
            assert!((sol.y[(i, i)] - 1.0).abs() <= 1e-6);
        }
        assert!(min_eigenvalue(&sol.y) >= -1e-8);
        let best = (0u32..32)
            .filter(|m| {
                (0..5).filter(|i| m & (1 << i) != 0).map(|i| inst.weights[i]).sum::<f64>()
                    <= inst.capacity
            })
            .map(|m| (0..5).filter(|i| m & (1 << i) != 0).map(|i| inst.values[i]).sum::<f64>())
            .fold(0.0, f64::max);
        assert!(sol.bound >= best - 1e-9, "{} < {}", sol.bound, best);
        assert!(sol.bound >= sol.primal_objective - 1e-5);
    }

    #[test]
    fn all_items_fit() {
        let inst = KnapsackInstance::knapsack(vec![1.0, 2.0], vec![1.0, 1.0], 10.0);
        let sol = solve_sdp(&inst, &SdpOptions::default()).unwrap();
        assert!((sol.bound - 3.0).abs() < 1e-5);
    }

    #[test]
    fn negative_capacity_is_infeasible() {
        let inst = KnapsackInstance::knapsack(vec![1.0], vec![1.0], -0.5);
        assert!(matches!(
            solve_sdp(&inst, &SdpOptions::default()),
            Err(Error::InfeasibleRelaxation { .. })
        ));
        let empty = KnapsackInstance::knapsack(vec![], vec![], 1.0);
        assert!(solve_sdp(&empty, &SdpOptions::default()).is_err());
    }

    #[test]
    fn iteration_budget_is_enforced() {
        let inst = KnapsackInstance::knapsack(
            vec![3.0, 1.0, 2.0, 2.5],
            vec![4.0, 1.0, 3.0, 2.0],
            5.0,
        );
        let opts = SdpOptions {
            max_iter: 2,
            tolerance: 1e-12,
        };
        match solve_sdp(&inst, &opts) {
            Err(Error::Convergence { iterations, .. }) => assert_eq!(iterations, 2),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }
}

use serde::{Deserialize, Serialize};

use super::grid::ScalarGrid;
use crate::error::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Target for the max-norm of `L u - f` over interior points.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Over-relaxation factor; `None` picks one from the lowest Dirichlet eigenvalue.
    pub omega: Option<f64>,
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions {
            tol,
            ..SolveOptions::default()
        }
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_sweeps: 200_000,
            omega: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub sweeps: usize,
    pub residual: f64,
}

const CHECK_EVERY: usize = 8;

/// Over-relaxation factor from the Jacobi spectral radius `1 - h²λ₁/(2·dim)`.
pub fn optimal_omega(dim: usize, h: f64, radius: f64) -> f64 {
    let lambda1 = match dim {
        1 => (std::f64::consts::PI / (2.0 * radius)).powi(2),
        2 => (2.404_825_557_695_773 / radius).powi(2),
        _ => (std::f64::consts::PI / radius).powi(2),
    };
    let rho = (1.0 - h * h * lambda1 / (2.0 * dim as f64)).clamp(0.0, 1.0 - 1e-15);
    2.0 / (1.0 + (1.0 - rho * rho).sqrt())
}

/// Solves `Δu = rhs` at interior points until the max-norm residual is at most
/// `tol`, or at most the f64 rounding floor of the stencil when that is larger. Boundary values are read from the
/// boundary ring of `initial`; its interior values seed the iteration.
pub fn poisson_solve(
    rhs: &ScalarGrid,
    initial: &ScalarGrid,
    opts: &SolveOptions,
) -> Result<(ScalarGrid, SolveReport), LabError> {
    elliptic_solve(rhs, initial, None, opts)
}

/// Solves `Δu + β·∇u = rhs` with central differences, where `advection` holds one
/// component of `β` per axis. Boundary handling as in [`poisson_solve`].
pub fn elliptic_solve(
    rhs: &ScalarGrid,
    initial: &ScalarGrid,
    advection: Option<&[ScalarGrid]>,
    opts: &SolveOptions,
) -> Result<(ScalarGrid, SolveReport), LabError> {
    let spec = rhs.spec();
    let lattice = rhs.lattice().clone();
    if initial.spec() != spec {
        return Err(LabError::InvalidGrid("grids live on different lattices".into()));
    }
    if let Some(beta) = advection {
        if beta.len() != spec.dim {
            return Err(LabError::InvalidGrid("advection needs one component per axis".into()));
        }
    }
    let dim = spec.dim;
    let h = spec.h;
    let h2 = h * h;
    let omega = opts.omega.unwrap_or_else(|| optimal_omega(dim, h, spec.radius));
    let strides: Vec<usize> = (0..dim).map(|a| lattice.stride(a)).collect();

    // Per-point neighbour weights (minus, plus) per axis.
    let weight = |idx: usize, axis: usize| -> (f64, f64) {
        let b = advection.map_or(0.0, |beta| beta[axis].at(idx));
        (1.0 / h2 - b / (2.0 * h), 1.0 / h2 + b / (2.0 * h))
    };
    let diag = 2.0 * dim as f64 / h2;
    let weights: Option<Vec<(f64, f64)>> = advection.map(|_| {
        lattice
            .interior()
            .iter()
            .flat_map(|&idx| (0..dim).map(move |axis| (idx, axis)))
            .map(|(idx, axis)| weight(idx, axis))
            .collect()
    });

    let residual_of = |u: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for &idx in lattice.interior() {
            let mut lu = -diag * u[idx];
            for (axis, &s) in strides.iter().enumerate() {
                let (wm, wp) = weight(idx, axis);
                lu += wm * u[idx - s] + wp * u[idx + s];
            }
            let r = (lu - rhs.at(idx)).abs();
            if !r.is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max(r);
        }
        worst
    };

    // Rounding floor of the discrete residual: below it `tol` is unattainable in f64.
    let max_rhs = lattice.interior().iter().map(|&i| rhs.at(i).abs()).fold(0.0, f64::max);
    let floor_of = |u: &ScalarGrid| {
        let max_u = u.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
        let max_beta = advection.map_or(0.0, |beta| {
            beta.iter().map(|g| g.max_abs_interior()).fold(0.0, f64::max)
        });
        8.0 * f64::EPSILON * ((2.0 * diag + dim as f64 * max_beta / h) * max_u + max_rhs)
    };

    let mut u = initial.clone();
    let mut residual = residual_of(u.values());
    let mut sweeps = 0;
    while residual > opts.tol.max(floor_of(&u)) {
        if sweeps >= opts.max_sweeps || !residual.is_finite() {
            return Err(LabError::NoConvergence {
                iterations: sweeps,
                last_change: residual,
            });
        }
        let vals = u.values_mut();
        for _ in 0..CHECK_EVERY {
            match &weights {
                None => {
                    let inv = 1.0 / h2;
                    for &idx in lattice.interior() {
                        let mut acc = -rhs.at(idx);
                        for &s in &strides {
                            acc += inv * (vals[idx - s] + vals[idx + s]);
                        }
                        vals[idx] += omega * (acc / diag - vals[idx]);
                    }
                }
                Some(wts) => {
                    for (k, &idx) in lattice.interior().iter().enumerate() {
                        let mut acc = -rhs.at(idx);
                        for (axis, &s) in strides.iter().enumerate() {
                            let (wm, wp) = wts[k * dim + axis];
                            acc += wm * vals[idx - s] + wp * vals[idx + s];
                        }
                        vals[idx] += omega * (acc / diag - vals[idx]);
                    }
                }
            }
        }
        sweeps += CHECK_EVERY;
        residual = residual_of(u.values());
    }
    Ok((u, SolveReport { sweeps, residual }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::grid::{GridSpec, Lattice};

    #[test]
    fn recovers_quadratic_exactly() {
        let lat = Lattice::new(GridSpec::new(2, 1.0 / 32.0, 1.0).unwrap());
        let exact = ScalarGrid::from_fn(&lat, |x| x[0] * x[0] + 2.0 * x[1] * x[1] - x[0]);
        let rhs = ScalarGrid::from_fn(&lat, |_| 6.0);
        let mut init = exact.clone();
        for &i in lat.interior() {
            init.values_mut()[i] = 0.0;
        }
        let (u, rep) = poisson_solve(&rhs, &init, &SolveOptions::with_tol(1e-10)).unwrap();
        assert!(rep.residual <= 1e-10);
        assert!(u.max_abs_diff_interior(&exact) < 1e-11);
    }

    #[test]
    fn advection_operator_annihilates_linear_profile() {
        // Δu + β u_x = β for u = x
        let lat = Lattice::new(GridSpec::new(2, 1.0 / 16.0, 1.0).unwrap());
        let beta = vec![
            ScalarGrid::from_fn(&lat, |x| 0.5 + x[1]),
            ScalarGrid::from_fn(&lat, |_| -0.3),
        ];
        let rhs = beta[0].clone();
        let exact = ScalarGrid::from_fn(&lat, |x| x[0]);
        let mut init = exact.clone();
        for &i in lat.interior() {
            init.values_mut()[i] = 0.0;
        }
        let (u, _) = elliptic_solve(&rhs, &init, Some(&beta), &SolveOptions::with_tol(1e-11)).unwrap();
        assert!(u.max_abs_diff_interior(&exact) < 1e-11);
    }

    #[test]
    fn sweep_budget_is_reported() {
        let lat = Lattice::new(GridSpec::new(2, 1.0 / 32.0, 1.0).unwrap());
        let rhs = ScalarGrid::from_fn(&lat, |_| 1.0);
        let init = ScalarGrid::zeros(&lat);
        let opts = SolveOptions {
            tol: 1e-14,
            max_sweeps: 8,
            omega: None,
        };
        assert!(matches!(
            poisson_solve(&rhs, &init, &opts),
            Err(LabError::NoConvergence { .. })
        ));
    }
}

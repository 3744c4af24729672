use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::{GridSpec, Lattice, ScalarGrid};
use super::solver::{elliptic_solve, poisson_solve, SolveOptions, SolveReport};
use crate::error::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HarmonicPart {
    Re,
    Im,
}

/// Harmonic functions on `ℝ^m` used as `ã`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HarmonicSeed {
    Constant { value: f64 },
    Linear { constant: f64, gradient: Vec<f64> },
    /// `constant + scale · Re/Im (x₁ + i x₂)^degree`.
    Polynomial {
        constant: f64,
        degree: u32,
        part: HarmonicPart,
        scale: f64,
    },
}

impl HarmonicSeed {
    /// Looks up a seed by catalog name: `constant [c]`, `linear [c, g₁, ..]`,
    /// `re-power [c, k, s]`, `im-power [c, k, s]`.
    pub fn from_name(name: &str, coeffs: &[f64]) -> Result<Self, LabError> {
        let bad = || LabError::InvalidGrid(format!("bad coefficients for harmonic seed {name}"));
        match name {
            "constant" => match coeffs {
                [v] => Ok(HarmonicSeed::Constant { value: *v }),
                _ => Err(bad()),
            },
            "linear" => match coeffs {
                [c, g @ ..] if !g.is_empty() => Ok(HarmonicSeed::Linear {
                    constant: *c,
                    gradient: g.to_vec(),
                }),
                _ => Err(bad()),
            },
            "re-power" | "im-power" => match coeffs {
                [c, k, s] if *k >= 0.0 && k.fract() == 0.0 => Ok(HarmonicSeed::Polynomial {
                    constant: *c,
                    degree: *k as u32,
                    part: if name == "re-power" {
                        HarmonicPart::Re
                    } else {
                        HarmonicPart::Im
                    },
                    scale: *s,
                }),
                _ => Err(bad()),
            },
            _ => Err(LabError::InvalidGrid(format!("unknown harmonic seed {name}"))),
        }
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        match self {
            HarmonicSeed::Constant { value } => *value,
            HarmonicSeed::Linear { constant, gradient } => {
                constant + gradient.iter().zip(x).map(|(g, xi)| g * xi).sum::<f64>()
            }
            HarmonicSeed::Polynomial {
                constant,
                degree,
                part,
                scale,
            } => {
                let p = num_complex::Complex64::new(x[0], x[1]).powu(*degree);
                constant
                    + scale
                        * match part {
                            HarmonicPart::Re => p.re,
                            HarmonicPart::Im => p.im,
                        }
            }
        }
    }

    fn check_dim(&self, dim: usize) -> Result<(), LabError> {
        match self {
            HarmonicSeed::Linear { gradient, .. } if gradient.len() > dim => Err(LabError::InvalidGrid(
                "seed gradient longer than the dimension".into(),
            )),
            HarmonicSeed::Polynomial { degree, .. } if dim < 2 && *degree > 1 => Err(
                LabError::InvalidGrid("power seeds need at least two dimensions".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Coefficients of `u = a t² + b t + c` on `B_R ⊂ ℝ^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct DonaldsonTriple {
    pub atilde: ScalarGrid,
    pub a: ScalarGrid,
    pub b: ScalarGrid,
    pub c: ScalarGrid,
    pub b_report: SolveReport,
    pub c_report: SolveReport,
}

/// Builds the triple from `ã`: `a = 1/ã`, then `Δb = (2/a)∇a·∇b` and
/// `Δc = (|∇b|² + 1)/(2a)` with Dirichlet data; `c` vanishes on the boundary.
pub fn donaldson_build(
    spec: GridSpec,
    seed: &HarmonicSeed,
    boundary_b: &dyn Fn([f64; 3]) -> f64,
    tol: f64,
) -> Result<DonaldsonTriple, LabError> {
    donaldson_build_with(spec, seed, boundary_b, &|_| 0.0, tol)
}

pub fn donaldson_build_with(
    spec: GridSpec,
    seed: &HarmonicSeed,
    boundary_b: &dyn Fn([f64; 3]) -> f64,
    boundary_c: &dyn Fn([f64; 3]) -> f64,
    tol: f64,
) -> Result<DonaldsonTriple, LabError> {
    seed.check_dim(spec.dim)?;
    let lat = Lattice::new(spec);
    let atilde = ScalarGrid::from_fn(&lat, |x| seed.eval(x));
    let min = lat
        .interior()
        .iter()
        .chain(lat.boundary())
        .map(|&i| atilde.at(i))
        .fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(LabError::SeedNotPositive { min });
    }
    let a = atilde.map(|v| 1.0 / v);
    let opts = SolveOptions::with_tol(tol);

    let grad_a = a.gradients();
    // Δb - (2/a)∇a·∇b = 0
    let beta: Vec<ScalarGrid> = grad_a
        .iter()
        .map(|g| {
            let mut out = ScalarGrid::zeros(&lat);
            for &i in lat.interior() {
                out.values_mut()[i] = -2.0 * g.at(i) / a.at(i);
            }
            out
        })
        .collect();
    let b0 = ring(&lat, boundary_b);
    let (b, b_report) = elliptic_solve(&ScalarGrid::zeros(&lat), &b0, Some(&beta), &opts)?;

    let grad_b = b.gradients();
    let mut rhs = ScalarGrid::zeros(&lat);
    for &i in lat.interior() {
        let gb2: f64 = grad_b.iter().map(|g| g.at(i).powi(2)).sum();
        rhs.values_mut()[i] = (gb2 + 1.0) / (2.0 * a.at(i));
    }
    let c0 = ring(&lat, boundary_c);
    let (c, c_report) = poisson_solve(&rhs, &c0, &opts)?;
    Ok(DonaldsonTriple {
        atilde,
        a,
        b,
        c,
        b_report,
        c_report,
    })
}

fn ring(lat: &Arc<Lattice>, f: &dyn Fn([f64; 3]) -> f64) -> ScalarGrid {
    let mut g = ScalarGrid::zeros(lat);
    for &i in lat.boundary() {
        g.values_mut()[i] = f(lat.coords(i));
    }
    g
}

fn dot_grads(p: &[ScalarGrid], q: &[ScalarGrid], i: usize) -> f64 {
    p.iter().zip(q).map(|(x, y)| x.at(i) * y.at(i)).sum()
}

impl DonaldsonTriple {
    /// Max-norm of `Δã` over interior points.
    pub fn harmonic_defect(&self) -> f64 {
        self.atilde.laplacian().max_abs_interior()
    }

    /// Defects `[A₂, A₁, A₀]` with `A₂ = 2aΔa - 4|∇a|²`, `A₁ = 2aΔb - 4∇a·∇b`,
    /// `A₀ = 2aΔc - |∇b|² - 1`.
    pub fn coefficients(&self) -> [ScalarGrid; 3] {
        let lat = self.a.lattice().clone();
        let (la, lb, lc) = (self.a.laplacian(), self.b.laplacian(), self.c.laplacian());
        let (ga, gb) = (self.a.gradients(), self.b.gradients());
        let mut out = [
            ScalarGrid::zeros(&lat),
            ScalarGrid::zeros(&lat),
            ScalarGrid::zeros(&lat),
        ];
        for &i in lat.interior() {
            let a = self.a.at(i);
            out[0].values_mut()[i] = 2.0 * a * la.at(i) - 4.0 * dot_grads(&ga, &ga, i);
            out[1].values_mut()[i] = 2.0 * a * lb.at(i) - 4.0 * dot_grads(&ga, &gb, i);
            out[2].values_mut()[i] = 2.0 * a * lc.at(i) - dot_grads(&gb, &gb, i) - 1.0;
        }
        out
    }

    /// `u_tt Δu - |∇u_t|² - 1` at every interior point for fixed `t`.
    pub fn residual_field(&self, t: f64) -> ScalarGrid {
        let lat = self.a.lattice().clone();
        let (la, lb, lc) = (self.a.laplacian(), self.b.laplacian(), self.c.laplacian());
        let (ga, gb) = (self.a.gradients(), self.b.gradients());
        let mut out = ScalarGrid::zeros(&lat);
        for &i in lat.interior() {
            let lap_u = t * t * la.at(i) + t * lb.at(i) + lc.at(i);
            let grad_ut2: f64 = ga
                .iter()
                .zip(&gb)
                .map(|(x, y)| (2.0 * t * x.at(i) + y.at(i)).powi(2))
                .sum();
            out.values_mut()[i] = 2.0 * self.a.at(i) * lap_u - grad_ut2 - 1.0;
        }
        out
    }

    /// `[A₂, A₁, A₀]` recovered from the residual field at `t = -1, 0, 1`.
    pub fn extract_coefficients(&self) -> [ScalarGrid; 3] {
        let (rm, r0, rp) = (
            self.residual_field(-1.0),
            self.residual_field(0.0),
            self.residual_field(1.0),
        );
        let a2 = rp.zip(&rm, |p, m| 0.5 * (p + m)).zip(&r0, |s, z| s - z);
        let a1 = rp.zip(&rm, |p, m| 0.5 * (p - m));
        [a2, a1, r0]
    }
}

/// Max over interior points and `t_values` of `|u_tt Δu - |∇u_t|² - 1|`.
pub fn donaldson_residual(triple: &DonaldsonTriple, t_values: &[f64]) -> f64 {
    t_values
        .iter()
        .map(|&t| triple.residual_field(t).max_abs_interior())
        .fold(0.0, f64::max)
}

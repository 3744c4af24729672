use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{ComplexGrid, GridSpec, Lattice, ScalarGrid};
use super::solver::{poisson_solve, SolveOptions};
use crate::constructors::SystemVariant;
use crate::error::LabError;

/// Dirichlet data for the four unknowns `ã, b, c, d` on a disc in the `w`-plane.
pub struct PicardBoundary<'a> {
    pub atilde: &'a dyn Fn(Complex64) -> f64,
    pub b: &'a dyn Fn(Complex64) -> Complex64,
    pub c: &'a dyn Fn(Complex64) -> Complex64,
    pub d: &'a dyn Fn(Complex64) -> f64,
}

fn zero_real(_: Complex64) -> f64 {
    0.0
}

fn zero_complex(_: Complex64) -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl<'a> PicardBoundary<'a> {
    pub fn zero() -> PicardBoundary<'static> {
        PicardBoundary {
            atilde: &zero_real,
            b: &zero_complex,
            c: &zero_complex,
            d: &zero_real,
        }
    }

    /// Data for `ã` and `b`; `c` and `d` vanish on the boundary.
    pub fn ab(
        atilde: &'a dyn Fn(Complex64) -> f64,
        b: &'a dyn Fn(Complex64) -> Complex64,
    ) -> PicardBoundary<'a> {
        PicardBoundary {
            atilde,
            b,
            c: &zero_complex,
            d: &zero_real,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            tol: 1e-10,
            max_iter: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PicardSolution {
    pub atilde: ScalarGrid,
    pub b: ComplexGrid,
    pub c: ComplexGrid,
    pub d: ScalarGrid,
    pub variant: SystemVariant,
    pub iterations: usize,
    /// Successive-iterate max-norm change per iteration.
    pub change_history: Vec<f64>,
    /// Discrete defects of the four equations at the returned iterate.
    pub residual: [f64; 4],
}

fn w_of(x: [f64; 3]) -> Complex64 {
    Complex64::new(x[0], x[1])
}

fn kappa(variant: SystemVariant) -> f64 {
    match variant {
        SystemVariant::MA1 => 0.0,
        SystemVariant::MA4 => 1.0,
    }
}

/// Right-hand sides `∂_w̄∂_w X` of the four equations, pointwise.
struct Sources {
    atilde: ScalarGrid,
    b: ComplexGrid,
    c: ComplexGrid,
    d: ScalarGrid,
}

fn sources(
    lat: &Arc<Lattice>,
    at: &ScalarGrid,
    b: &ComplexGrid,
    c: &ComplexGrid,
    k: f64,
) -> Sources {
    let at_c = ComplexGrid {
        re: at.clone(),
        im: ScalarGrid::zeros(lat),
    };
    let at_w = at_c.d_w();
    let b_wb = b.d_wbar();
    let c_wb = c.d_wbar();
    let c_w = c.d_w();
    let mut out = Sources {
        atilde: ScalarGrid::zeros(lat),
        b: ComplexGrid::zeros(lat),
        c: ComplexGrid::zeros(lat),
        d: ScalarGrid::zeros(lat),
    };
    for &i in lat.interior() {
        let e1 = (-at.at(i)).exp();
        let e2 = e1 * e1;
        let bwb = b_wb.at(i);
        let cwb = c_wb.at(i);
        out.atilde.values_mut()[i] = 4.0 * e2 * bwb.norm_sqr() + k * e2;
        let sb = at_w.at(i) * bwb * 2.0;
        out.b.re.values_mut()[i] = sb.re;
        out.b.im.values_mut()[i] = sb.im;
        let sc = at_w.at(i) * cwb + bwb * c_w.at(i).conj() * (2.0 * e1) - k * e1;
        out.c.re.values_mut()[i] = sc.re;
        out.c.im.values_mut()[i] = sc.im;
        out.d.values_mut()[i] = e1 * (cwb.norm_sqr() + 1.0);
    }
    out
}

fn residuals(lat: &Arc<Lattice>, at: &ScalarGrid, b: &ComplexGrid, c: &ComplexGrid, d: &ScalarGrid, k: f64) -> [f64; 4] {
    let s = sources(lat, at, b, c, k);
    let quarter = |g: &ScalarGrid| g.laplacian().map(|v| 0.25 * v);
    let qc = |g: &ComplexGrid| ComplexGrid {
        re: quarter(&g.re),
        im: quarter(&g.im),
    };
    [
        quarter(at).max_abs_diff_interior(&s.atilde),
        qc(b).max_abs_diff_interior(&s.b),
        qc(c).max_abs_diff_interior(&s.c),
        quarter(d).max_abs_diff_interior(&s.d),
    ]
}

fn solve_quarter(src: &ScalarGrid, current: &ScalarGrid, tol: f64) -> Result<ScalarGrid, LabError> {
    // ∂_w̄∂_w X = s  ⇔  ΔX = 4s
    let rhs = src.map(|v| 4.0 * v);
    Ok(poisson_solve(&rhs, current, &SolveOptions::with_tol(tol))?.0)
}

/// Picard iteration for the semilinear system on the disc `|w| < spec.radius`:
///
/// `ã_w̄w = 4e^{-2ã}|b_w̄|² + κe^{-2ã}`, `b_w̄w = 2ã_w b_w̄`,
/// `c_w̄w = ã_w c_w̄ + 2e^{-ã} b_w̄ conj(c_w̄) - κe^{-ã}`, `d_w̄w = e^{-ã}(|c_w̄|² + 1)`,
///
/// with `κ = 0` for [`SystemVariant::MA1`] and `κ = 1` for [`SystemVariant::MA4`].
/// Each step inverts the Laplacian for `ã, b` against sources frozen at the previous
/// iterate, then updates `c` and `d` from the new `ã, b`. Stops once the change in
/// `ã, b, c` and all four discrete defects are at most `tol`.
pub fn picard(
    spec: GridSpec,
    boundary: &PicardBoundary,
    variant: SystemVariant,
    opts: &PicardOptions,
) -> Result<PicardSolution, LabError> {
    if spec.dim != 2 {
        return Err(LabError::InvalidGrid("the w-plane grid must be two-dimensional".into()));
    }
    let lat = Lattice::new(spec);
    let k = kappa(variant);
    // Inner solves only need to track the outer change; tighten as it shrinks.
    let mut inner = 0.1 * opts.tol;

    let with_ring = |re: &dyn Fn(Complex64) -> f64| {
        let mut g = ScalarGrid::zeros(&lat);
        for &i in lat.boundary() {
            g.values_mut()[i] = re(w_of(lat.coords(i)));
        }
        g
    };
    let mut at = with_ring(boundary.atilde);
    let mut b = ComplexGrid {
        re: with_ring(&|w| (boundary.b)(w).re),
        im: with_ring(&|w| (boundary.b)(w).im),
    };
    let mut c = ComplexGrid {
        re: with_ring(&|w| (boundary.c)(w).re),
        im: with_ring(&|w| (boundary.c)(w).im),
    };
    let mut d = with_ring(boundary.d);

    let mut history = Vec::new();
    for iter in 1..=opts.max_iter {
        let s = sources(&lat, &at, &b, &c, k);
        let at_n = solve_quarter(&s.atilde, &at, inner)?;
        let b_n = ComplexGrid {
            re: solve_quarter(&s.b.re, &b.re, inner)?,
            im: solve_quarter(&s.b.im, &b.im, inner)?,
        };
        let s = sources(&lat, &at_n, &b_n, &c, k);
        let c_n = ComplexGrid {
            re: solve_quarter(&s.c.re, &c.re, inner)?,
            im: solve_quarter(&s.c.im, &c.im, inner)?,
        };
        let s = sources(&lat, &at_n, &b_n, &c_n, k);
        let d_n = solve_quarter(&s.d, &d, inner)?;
        // d is a direct solve given the others, so it does not enter the change.
        let change = [
            at_n.max_abs_diff_interior(&at),
            b_n.max_abs_diff_interior(&b),
            c_n.max_abs_diff_interior(&c),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        at = at_n;
        b = b_n;
        c = c_n;
        d = d_n;
        history.push(change);
        inner = (1e-3 * change).max(0.1 * opts.tol);
        if !change.is_finite() {
            break;
        }
        if change <= opts.tol {
            let residual = residuals(&lat, &at, &b, &c, &d, k);
            if residual.iter().all(|r| *r <= opts.tol) {
                return Ok(PicardSolution {
                    atilde: at,
                    b,
                    c,
                    d,
                    variant,
                    iterations: iter,
                    change_history: history,
                    residual,
                });
            }
        }
    }
    Err(LabError::NoConvergence {
        iterations: history.len(),
        last_change: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// `ã, b` form of [`picard`] with `c` and `d` vanishing on the boundary.
pub fn picard_ma1(
    spec: GridSpec,
    boundary_a: &dyn Fn(Complex64) -> f64,
    boundary_b: &dyn Fn(Complex64) -> Complex64,
    variant: SystemVariant,
    opts: &PicardOptions,
) -> Result<PicardSolution, LabError> {
    picard(spec, &PicardBoundary::ab(boundary_a, boundary_b), variant, opts)
}

impl PicardSolution {
    /// Recomputes the four discrete defects from the stored grids.
    pub fn recompute_residual(&self) -> [f64; 4] {
        let lat = self.atilde.lattice().clone();
        residuals(&lat, &self.atilde, &self.b, &self.c, &self.d, kappa(self.variant))
    }

    /// `|det ∂∂̄u - 1|` for `u = a|z|² + 2Re(bz²) + 2Re(cz) + d`, `a = e^ã`, with every
    /// `w`-derivative taken by finite differences, at the lattice point nearest to each `w`.
    /// Only meaningful for [`SystemVariant::MA1`] output.
    pub fn ma_residual(&self, points: &[(Complex64, Complex64)]) -> Result<f64, LabError> {
        let lat = self.atilde.lattice().clone();
        let a = self.atilde.map(f64::exp);
        let a_c = ComplexGrid {
            re: a.clone(),
            im: ScalarGrid::zeros(&lat),
        };
        let a_wb = a_c.d_wbar();
        let b_wb = self.b.d_wbar();
        let c_wb = self.c.d_wbar();
        let q = |g: &ScalarGrid| g.laplacian().map(|v| 0.25 * v);
        let a_ww = q(&a);
        let b_ww = ComplexGrid {
            re: q(&self.b.re),
            im: q(&self.b.im),
        };
        let c_ww = ComplexGrid {
            re: q(&self.c.re),
            im: q(&self.c.im),
        };
        let d_ww = q(&self.d);
        let mut worst = 0.0f64;
        for &(z, w) in points {
            let i = lat
                .nearest([w.re, w.im, 0.0])
                .filter(|&i| lat.kind(i) == super::grid::PointKind::Interior)
                .ok_or_else(|| LabError::InvalidGrid(format!("sample point {w} is not interior")))?;
            let h11 = a.at(i);
            let h12 = a_wb.at(i) * z.conj() + b_wb.at(i) * z * 2.0 + c_wb.at(i);
            let h22 = a_ww.at(i) * z.norm_sqr()
                + 2.0 * (b_ww.at(i) * z * z).re
                + 2.0 * (c_ww.at(i) * z).re
                + d_ww.at(i);
            let det = h11 * h22 - h12.norm_sqr();
            worst = worst.max((det - 1.0).abs());
        }
        Ok(worst)
    }
}

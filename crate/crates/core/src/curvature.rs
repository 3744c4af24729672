//! Kähler metric of a unimodular potential, its Christoffel symbols and curvature.
//!
//! Indices run over `1 = z` and `2 = w`. Everything is computed by exact
//! operations on [`ZPolyField`]s; points are only used for sampling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constructors::{system_residual, SystemVariant};
use crate::error::CurvatureError;
use crate::potential::{assemble_u, SolutionCoeffs};
use crate::series::Direction;
use crate::zpoly::ZPolyField;

/// Largest system defect for which the adjugate is accepted as the inverse.
pub const UNIMODULAR_TOL: f64 = 1e-8;

/// Sampled components with magnitude at most this are treated as zero.
pub const FLATNESS_TOL: f64 = 1e-8;

/// A 2×2 matrix of fields; `entries[i][j]` for zero-based `i, j`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    pub entries: [[ZPolyField; 2]; 2],
}

impl MetricField {
    pub fn entry(&self, i: usize, j: usize) -> &ZPolyField {
        &self.entries[i][j]
    }

    /// Matrix product, entrywise exact.
    pub fn mul(&self, other: &MetricField) -> MetricField {
        let cell = |i: usize, j: usize| &self.entries[i][0].mul(&other.entries[0][j]) + &self.entries[i][1].mul(&other.entries[1][j]);
        MetricField {
            entries: [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]],
        }
    }
}

fn partial(f: &ZPolyField, k: usize) -> ZPolyField {
    if k == 0 {
        f.d_z()
    } else {
        f.d_w()
    }
}

fn partial_bar(f: &ZPolyField, k: usize) -> ZPolyField {
    if k == 0 {
        f.d_zbar()
    } else {
        f.d_wbar()
    }
}

fn require_unimodular(coeffs: &SolutionCoeffs) -> Result<(), CurvatureError> {
    let deviation = system_residual(coeffs, SystemVariant::MA1)
        .into_iter()
        .fold(0.0, f64::max);
    if deviation > UNIMODULAR_TOL || deviation.is_nan() {
        return Err(CurvatureError::NotUnimodular { deviation });
    }
    Ok(())
}

/// `g_{αβ̄} = ∂_α ∂_β̄ u` and, using `det g = 1`, the inverse
/// `g^{ν̄α}` stored as `inverse.entries[ν][α]`.
pub fn metric_and_inverse(coeffs: &SolutionCoeffs) -> Result<(MetricField, MetricField), CurvatureError> {
    require_unimodular(coeffs)?;
    Ok(metric_pair(coeffs))
}

fn metric_pair(coeffs: &SolutionCoeffs) -> (MetricField, MetricField) {
    let u = assemble_u(coeffs);
    let g = |i: usize, j: usize| partial_bar(&partial(&u, i), j);
    let metric = MetricField {
        entries: [[g(0, 0), g(0, 1)], [g(1, 0), g(1, 1)]],
    };
    let [[g11, g12], [g21, g22]] = metric.entries.clone();
    let inverse = MetricField {
        entries: [[g22, -&g12], [-&g21, g11]],
    };
    (metric, inverse)
}

/// Largest coefficient of `g · g⁻¹ - I`.
pub fn inverse_defect(coeffs: &SolutionCoeffs) -> f64 {
    let (g, inv) = metric_pair(coeffs);
    let p = g.mul(&inv);
    let limit = coeffs.order().saturating_sub(2);
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut e = p.entries[i][j].clone();
            if i == j {
                let one = ZPolyField::from_series(crate::series::BiSeries::one(e.order()));
                e = &e - &one;
            }
            worst = worst.max(e.max_abs_through(limit));
        }
    }
    worst
}

/// `Γ^α_{βγ}` stored as `symbols[α][β][γ]` (zero-based).
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    pub symbols: [[[ZPolyField; 2]; 2]; 2],
}

impl Christoffel {
    /// `Γ^α_{βγ}` with one-based indices, as written in formulas.
    pub fn get(&self, alpha: usize, beta: usize, gamma: usize) -> &ZPolyField {
        &self.symbols[alpha - 1][beta - 1][gamma - 1]
    }

    /// Largest coefficient of `Γ^α_{βγ} - Γ^α_{γβ}` over all index triples.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..2 {
            worst = worst.max(self.symbols[a][0][1].max_abs_diff(&self.symbols[a][1][0]));
        }
        worst
    }
}

/// `Γ^α_{βγ} = Σ_ν ∂_β g_{γν̄} g^{ν̄α}`.
pub fn christoffel(coeffs: &SolutionCoeffs) -> Result<Christoffel, CurvatureError> {
    let (g, inv) = metric_and_inverse(coeffs)?;
    let mut dg: Vec<Vec<Vec<ZPolyField>>> = Vec::with_capacity(2);
    for beta in 0..2 {
        let mut rows = Vec::with_capacity(2);
        for gamma in 0..2 {
            rows.push((0..2).map(|nu| partial(&g.entries[gamma][nu], beta)).collect());
        }
        dg.push(rows);
    }
    let symbol = |alpha: usize, beta: usize, gamma: usize| {
        &dg[beta][gamma][0].mul(&inv.entries[0][alpha]) + &dg[beta][gamma][1].mul(&inv.entries[1][alpha])
    };
    let block = |alpha: usize| [[symbol(alpha, 0, 0), symbol(alpha, 0, 1)], [symbol(alpha, 1, 0), symbol(alpha, 1, 1)]];
    Ok(Christoffel {
        symbols: [block(0), block(1)],
    })
}

/// `R^δ_{αβ̄γ} = -∂Γ^δ_{αγ}/∂z̄_β`, one-based indices `(δ, α, β, γ)`.
pub fn curvature_field(ch: &Christoffel, delta: usize, alpha: usize, beta: usize, gamma: usize) -> ZPolyField {
    -&partial_bar(ch.get(delta, alpha, gamma), beta - 1)
}

/// Maximum sampled magnitude of one curvature component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentMagnitude {
    pub delta: usize,
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub max_abs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport {
    pub christoffel: Christoffel,
    pub components: Vec<ComponentMagnitude>,
    pub flat: bool,
    /// `max |R¹₁₁̄₁ - 4|b_w̄|²|` over the samples.
    pub obstruction_defect: f64,
}

impl CurvatureReport {
    pub fn max_component(&self) -> f64 {
        self.components.iter().map(|c| c.max_abs).fold(0.0, f64::max)
    }
}

fn max_on(field: &ZPolyField, points: &[(Complex64, Complex64)]) -> Result<f64, CurvatureError> {
    let mut worst: f64 = 0.0;
    for &(z, w) in points {
        let v = field
            .evaluate(z, w)
            .map_err(|e| CurvatureError::Field(e.into()))?;
        worst = worst.max(v.norm());
    }
    Ok(worst)
}

fn obstruction_fields(coeffs: &SolutionCoeffs, ch: &Christoffel) -> (ZPolyField, ZPolyField) {
    let r1111 = curvature_field(ch, 1, 1, 1, 1);
    let b_wb = coeffs.b().derive(Direction::WBar);
    let rhs = ZPolyField::from_series(b_wb.mul(&b_wb.conj()).scale_real(4.0));
    (r1111, rhs)
}

pub fn curvature_components(coeffs: &SolutionCoeffs, points: &[(Complex64, Complex64)]) -> Result<CurvatureReport, CurvatureError> {
    let ch = christoffel(coeffs)?;
    let mut components = Vec::with_capacity(16);
    for delta in 1..=2 {
        for alpha in 1..=2 {
            for beta in 1..=2 {
                for gamma in 1..=2 {
                    let field = curvature_field(&ch, delta, alpha, beta, gamma);
                    components.push(ComponentMagnitude {
                        delta,
                        alpha,
                        beta,
                        gamma,
                        max_abs: max_on(&field, points)?,
                    });
                }
            }
        }
    }
    let (lhs, rhs) = obstruction_fields(coeffs, &ch);
    let obstruction_defect = max_on(&(&lhs - &rhs), points)?;
    let flat = components.iter().all(|c| c.max_abs <= FLATNESS_TOL);
    Ok(CurvatureReport {
        christoffel: ch,
        components,
        flat,
        obstruction_defect,
    })
}

/// `max |R¹₁₁̄₁ - 4|b_w̄|²|` over the points.
pub fn obstruction_check(coeffs: &SolutionCoeffs, points: &[(Complex64, Complex64)]) -> Result<f64, CurvatureError> {
    let ch = christoffel(coeffs)?;
    let (lhs, rhs) = obstruction_fields(coeffs, &ch);
    max_on(&(&lhs - &rhs), points)
}

/// The pair `(R¹₁₁̄₁, 4|b_w̄|²)` at one point.
pub fn obstruction_values(coeffs: &SolutionCoeffs, z: Complex64, w: Complex64) -> Result<(f64, f64), CurvatureError> {
    let ch = christoffel(coeffs)?;
    let (lhs, rhs) = obstruction_fields(coeffs, &ch);
    let eval = |f: &ZPolyField| f.evaluate(z, w).map_err(|e| CurvatureError::Field(e.into()));
    Ok((eval(&lhs)?.re, eval(&rhs)?.re))
}

/// Coefficientwise size of `R¹₁₁̄₁ - 4 b_w̄ conj(b_w̄)` through the reliable degree.
pub fn obstruction_series_defect(coeffs: &SolutionCoeffs) -> Result<f64, CurvatureError> {
    let ch = christoffel(coeffs)?;
    let (lhs, rhs) = obstruction_fields(coeffs, &ch);
    Ok((&lhs - &rhs).max_abs_through(coeffs.order().saturating_sub(4)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicLength {
    pub length: f64,
    /// `max |d_w̄w(t) - (R - t²/R)|` for `t` in `[0, R/2]`.
    pub integrand_defect: f64,
    pub subintervals: usize,
}

/// Length of `γ(t) = (0, t)`, `0 <= t <= R`, for the nowhere-flat example on `D_R`:
/// `∫₀ᴿ √(2(R - t²/R)) dt`. The supplied coefficients only cross-check the
/// integrand on the half disc where their series is reliable.
pub fn geodesic_length(coeffs: &SolutionCoeffs, radius: f64) -> Result<GeodesicLength, CurvatureError> {
    if !(radius > 0.0) {
        return Err(CurvatureError::Quadrature(format!("radius {radius} is not positive")));
    }
    let closed = |t: f64| radius - t * t / radius;
    let g22 = coeffs
        .d()
        .derive(Direction::W)
        .derive(Direction::WBar);
    let mut integrand_defect: f64 = 0.0;
    for k in 0..=16 {
        let t = 0.5 * radius * k as f64 / 16.0;
        let v = g22
            .evaluate(Complex64::new(t, 0.0))
            .map_err(|e| CurvatureError::Field(e.into()))?;
        integrand_defect = integrand_defect.max((v.re - closed(t)).abs());
    }
    let f = |t: f64| (2.0 * closed(t)).max(0.0).sqrt();
    let mut count = 0;
    let length = adaptive_simpson(&f, 0.0, radius, 1e-13 * radius.powf(1.5), 60, &mut count)?;
    Ok(GeodesicLength {
        length,
        integrand_defect,
        subintervals: count,
    })
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
    count: &mut usize,
) -> Result<f64, CurvatureError> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth, count)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    count: &mut usize,
) -> Result<f64, CurvatureError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        *count += 1;
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(CurvatureError::Quadrature(format!(
            "depth exhausted on [{a}, {b}] with error estimate {:e}",
            delta.abs() / 15.0
        )));
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, count)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, count)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{build_flat, build_nowhere_flat, HoloSeed};
    use crate::series::BiSeries;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn flat_quadratic_metric_is_identity() {
        let q = SolutionCoeffs::flat_quadratic(8);
        let (g, inv) = metric_and_inverse(&q).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                let v = g.entry(i, j).evaluate(cx(0.3, 0.1), cx(-0.2, 0.5)).unwrap();
                assert_eq!(v, cx(expect, 0.0));
                let v = inv.entry(i, j).evaluate(cx(0.3, 0.1), cx(-0.2, 0.5)).unwrap();
                assert_eq!(v, cx(expect, 0.0));
            }
        }
        let rep = curvature_components(&q, &[(cx(0.1, 0.0), cx(0.2, 0.3))]).unwrap();
        assert!(rep.flat);
        assert_eq!(rep.max_component(), 0.0);
    }

    #[test]
    fn first_symbol_matches_closed_form() {
        let n = 12;
        let s = build_nowhere_flat(&HoloSeed::disc_coordinate(1.0, n + 1), &HoloSeed::zero(n), n).unwrap();
        let ch = christoffel(&s).unwrap();
        let b_wb = s.b().derive(Direction::WBar);
        let bc_w = s.b().conj().derive(Direction::W);
        let cc_w = s.c().conj().derive(Direction::W);
        // -2 b_w̄ (a_w z + 2 conj(b)_w z̄ + conj(c)_w)
        let inner = ZPolyField::from_entries(
            n,
            [
                (1, 0, s.a().derive(Direction::W)),
                (0, 1, bc_w.scale_real(2.0)),
                (0, 0, cc_w),
            ],
        );
        let expect = inner.mul_series(&b_wb.scale_real(-2.0));
        assert!(ch.get(1, 1, 1).max_abs_diff(&expect) < 1e-12);
        assert!(ch.symmetry_defect() < 1e-12);
        assert!(inverse_defect(&s) < 1e-12);
    }

    #[test]
    fn fault_injected_b_is_rejected() {
        let n = 8;
        let z = HoloSeed::zero(n);
        let s = build_flat(&z, &z, &z, n).unwrap().with_b(BiSeries::wbar(n));
        assert!(matches!(christoffel(&s), Err(CurvatureError::NotUnimodular { .. })));
    }

    #[test]
    fn simpson_on_polynomial_and_sqrt() {
        let mut n = 0;
        let v = adaptive_simpson(&|x: f64| x * x * x, 0.0, 2.0, 1e-12, 30, &mut n).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        let v = adaptive_simpson(&|x: f64| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, 1e-12, 60, &mut n).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }
}

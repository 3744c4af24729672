//! The quadratic-in-`z` potential, its complex Hessian and the Monge-Ampère residual.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::FieldError;
use crate::series::{BiSeries, Direction};
use crate::zpoly::ZPolyField;

const REALITY_TOL: f64 = 1e-12;

/// Coefficients `(a, b, c, d)` of `u = a|φ|² + bφ² + conj(bφ²) + cφ + conj(cφ) + d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionCoeffs {
    a: BiSeries,
    b: BiSeries,
    c: BiSeries,
    d: BiSeries,
    radius: f64,
}

impl SolutionCoeffs {
    /// Validates and normalizes to a common truncation order.
    ///
    /// `a` and `d` must be real valued and `a(0) > 0`; `radius` may be infinite.
    pub fn new(a: BiSeries, b: BiSeries, c: BiSeries, d: BiSeries, radius: f64) -> Result<Self, FieldError> {
        let coeffs = Self::new_unchecked(a, b, c, d, radius)?;
        if !(coeffs.a.coeff(0, 0).re > 0.0) {
            return Err(FieldError::InvalidCoeffs(format!(
                "a(0) = {} is not positive",
                coeffs.a.coeff(0, 0)
            )));
        }
        Ok(coeffs)
    }

    /// Same as [`new`](Self::new) but only rejects a vanishing `a(0)`, so sign
    /// faults can be fed to the diagnostic checks.
    pub fn new_unchecked(
        a: BiSeries,
        b: BiSeries,
        c: BiSeries,
        d: BiSeries,
        radius: f64,
    ) -> Result<Self, FieldError> {
        if !(radius > 0.0) {
            return Err(FieldError::InvalidCoeffs(format!("radius {radius} is not positive")));
        }
        if a.coeff(0, 0).norm() == 0.0 || !a.coeff(0, 0).re.is_finite() {
            return Err(FieldError::InvalidCoeffs("a(0) vanishes".into()));
        }
        for (name, s) in [("a", &a), ("d", &d)] {
            let scale = s.max_abs().max(1.0);
            if s.max_abs_diff(&s.conj()) > REALITY_TOL * scale {
                return Err(FieldError::InvalidCoeffs(format!("{name} is not real valued")));
            }
        }
        let order = a.order().min(b.order()).min(c.order()).min(d.order());
        let real = |s: BiSeries| if s.is_real() { s } else { s.real_part() };
        Ok(SolutionCoeffs {
            a: real(a.truncate(order)),
            b: b.truncate(order),
            c: c.truncate(order),
            d: real(d.truncate(order)),
            radius,
        })
    }

    pub fn a(&self) -> &BiSeries {
        &self.a
    }
    pub fn b(&self) -> &BiSeries {
        &self.b
    }
    pub fn c(&self) -> &BiSeries {
        &self.c
    }
    pub fn d(&self) -> &BiSeries {
        &self.d
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn order(&self) -> usize {
        self.a.order()
    }

    /// Copy with `b` replaced; used for perturbation and fault-injection studies.
    pub fn with_b(&self, b: BiSeries) -> SolutionCoeffs {
        let mut out = self.clone();
        out.b = b.truncate(self.order());
        out
    }

    pub fn with_c(&self, c: BiSeries) -> SolutionCoeffs {
        let mut out = self.clone();
        out.c = c.truncate(self.order());
        out
    }

    pub fn truncate(&self, order: usize) -> SolutionCoeffs {
        SolutionCoeffs {
            a: self.a.truncate(order),
            b: self.b.truncate(order),
            c: self.c.truncate(order),
            d: self.d.truncate(order),
            radius: self.radius,
        }
    }

    /// `u = |z|² + |w|²`.
    pub fn flat_quadratic(order: usize) -> SolutionCoeffs {
        SolutionCoeffs {
            a: BiSeries::one(order),
            b: BiSeries::zero(order),
            c: BiSeries::zero(order),
            d: BiSeries::monomial(1, 1, Complex64::new(1.0, 0.0), order),
            radius: f64::INFINITY,
        }
    }

    fn check_w(&self, w: Complex64) -> Result<(), FieldError> {
        if w.norm() >= self.radius {
            return Err(crate::error::SeriesError::OutOfRadius {
                modulus: w.norm(),
                radius: self.radius,
            }
            .into());
        }
        Ok(())
    }
}

/// Assembles `u` as a real field of degree 2 in `(z, z̄)`.
pub fn assemble_u(coeffs: &SolutionCoeffs) -> ZPolyField {
    ZPolyField::from_entries(
        coeffs.order(),
        [
            (1, 1, coeffs.a.clone()),
            (2, 0, coeffs.b.clone()),
            (0, 2, coeffs.b.conj()),
            (1, 0, coeffs.c.clone()),
            (0, 1, coeffs.c.conj()),
            (0, 0, coeffs.d.clone()),
        ],
    )
}

/// The rigid holomorphic reparametrizations `z ↦ φ(z)` admitted by the ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PhiMode {
    IdentityMap,
    /// `φ = (1 - √(1 - 2αz))/α` on `|z| < 1/(2|α|)`.
    SqrtBranch(Complex64),
}

/// `(φ, φ', φ'')` at `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiJet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl PhiMode {
    pub fn jet(&self, z: Complex64) -> Result<PhiJet, FieldError> {
        match *self {
            PhiMode::IdentityMap => Ok(PhiJet {
                value: z,
                d1: Complex64::new(1.0, 0.0),
                d2: Complex64::new(0.0, 0.0),
            }),
            PhiMode::SqrtBranch(alpha) => phi_jet(alpha, z),
        }
    }
}

fn phi_jet(alpha: Complex64, z: Complex64) -> Result<PhiJet, FieldError> {
    if alpha.norm() > 0.0 && z.norm() >= 0.5 / alpha.norm() {
        return Err(FieldError::OutOfDomain(format!(
            "|z| = {} >= 1/(2|alpha|) = {}",
            z.norm(),
            0.5 / alpha.norm()
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let arg = one - alpha * z * 2.0;
    if arg.norm() == 0.0 {
        return Err(FieldError::OnSingularHypersurface);
    }
    let root = arg.sqrt();
    // (1 - root)/α rewritten without cancellation
    let value = z * 2.0 / (one + root);
    let d1 = root.inv();
    let d2 = alpha * d1 * d1 * d1;
    Ok(PhiJet { value, d1, d2 })
}

/// Principal-branch `φ(z) = (1 - √(1 - 2αz))/α`.
pub fn phi_map(alpha: Complex64, z: Complex64) -> Result<Complex64, FieldError> {
    if alpha.norm() == 0.0 {
        return Err(FieldError::InvalidCoeffs("alpha must be nonzero".into()));
    }
    Ok(phi_jet(alpha, z)?.value)
}

/// Maximum defect of
/// `|φ'|^{-2} = |A|²|φ|² + Bφ² + conj(Bφ²) - Aφ - conj(Aφ) + 1`
/// with `A = φ''(0) = α` and `B = (3A² - φ'''(0))/2`. `α = 0` is the identity branch.
pub fn phi_identity_check(alpha: Complex64, points: &[Complex64]) -> Result<f64, FieldError> {
    let third_at_zero = alpha * alpha * 3.0;
    let b = (alpha * alpha * 3.0 - third_at_zero) * 0.5;
    let mut worst: f64 = 0.0;
    for &z in points {
        let jet = if alpha.norm() == 0.0 {
            PhiMode::IdentityMap.jet(z)?
        } else {
            phi_jet(alpha, z)?
        };
        let phi = jet.value;
        let lhs = 1.0 / jet.d1.norm_sqr();
        let bp = b * phi * phi;
        let ap = alpha * phi;
        let rhs = alpha.norm_sqr() * phi.norm_sqr() + 2.0 * bp.re - 2.0 * ap.re + 1.0;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Complex Hessian `[[u_zz̄, u_zw̄], [u_wz̄, u_ww̄]]` with all four entries computed
/// independently, so the Hermitian symmetry is a check rather than a construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianMatrix2 {
    pub h11: Complex64,
    pub h12: Complex64,
    pub h21: Complex64,
    pub h22: Complex64,
}

impl HermitianMatrix2 {
    pub fn identity() -> Self {
        HermitianMatrix2 {
            h11: Complex64::new(1.0, 0.0),
            h12: Complex64::new(0.0, 0.0),
            h21: Complex64::new(0.0, 0.0),
            h22: Complex64::new(1.0, 0.0),
        }
    }

    pub fn det(&self) -> f64 {
        (self.h11 * self.h22 - self.h12 * self.h21).re
    }

    /// Largest violation of the Hermitian symmetry relations.
    pub fn hermitian_defect(&self) -> f64 {
        (self.h21 - self.h12.conj())
            .norm()
            .max(self.h11.im.abs())
            .max(self.h22.im.abs())
    }

    pub fn max_abs_diff(&self, other: &HermitianMatrix2) -> f64 {
        [
            self.h11 - other.h11,
            self.h12 - other.h12,
            self.h21 - other.h21,
            self.h22 - other.h22,
        ]
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
    }
}

/// Precomputed derivative series for repeated Hessian evaluation.
#[derive(Clone, Debug)]
pub struct HessianKernel {
    radius: f64,
    a: BiSeries,
    a_w: BiSeries,
    a_wb: BiSeries,
    a_wwb: BiSeries,
    b_wb: BiSeries,
    bc_w: BiSeries,
    b_wwb: BiSeries,
    bc_wwb: BiSeries,
    c_wb: BiSeries,
    cc_w: BiSeries,
    c_wwb: BiSeries,
    cc_wwb: BiSeries,
    d_wwb: BiSeries,
}

impl HessianKernel {
    pub fn new(coeffs: &SolutionCoeffs) -> Self {
        let bc = coeffs.b.conj();
        let cc = coeffs.c.conj();
        let mixed = |s: &BiSeries| s.derive(Direction::W).derive(Direction::WBar);
        HessianKernel {
            radius: coeffs.radius,
            a: coeffs.a.clone(),
            a_w: coeffs.a.derive(Direction::W),
            a_wb: coeffs.a.derive(Direction::WBar),
            a_wwb: mixed(&coeffs.a),
            b_wb: coeffs.b.derive(Direction::WBar),
            bc_w: bc.derive(Direction::W),
            b_wwb: mixed(&coeffs.b),
            bc_wwb: mixed(&bc),
            c_wb: coeffs.c.derive(Direction::WBar),
            cc_w: cc.derive(Direction::W),
            c_wwb: mixed(&coeffs.c),
            cc_wwb: mixed(&cc),
            d_wwb: mixed(&coeffs.d),
        }
    }

    pub fn hessian(&self, z: Complex64, w: Complex64, phi: PhiMode) -> Result<HermitianMatrix2, FieldError> {
        if w.norm() >= self.radius {
            return Err(crate::error::SeriesError::OutOfRadius {
                modulus: w.norm(),
                radius: self.radius,
            }
            .into());
        }
        let jet = phi.jet(z)?;
        let p = jet.value;
        let pb = p.conj();
        let d1 = jet.d1;
        let ev = |s: &BiSeries| s.evaluate(w);
        let h11 = ev(&self.a)? * d1.norm_sqr();
        let h12 = (ev(&self.a_wb)? * pb + ev(&self.b_wb)? * p * 2.0 + ev(&self.c_wb)?) * d1;
        let h21 = (ev(&self.a_w)? * p + ev(&self.bc_w)? * pb * 2.0 + ev(&self.cc_w)?) * d1.conj();
        let h22 = ev(&self.a_wwb)? * p.norm_sqr()
            + ev(&self.b_wwb)? * p * p
            + ev(&self.bc_wwb)? * pb * pb
            + ev(&self.c_wwb)? * p
            + ev(&self.cc_wwb)? * pb
            + ev(&self.d_wwb)?;
        Ok(HermitianMatrix2 { h11, h12, h21, h22 })
    }
}

pub fn hessian(coeffs: &SolutionCoeffs, z: Complex64, w: Complex64, phi: PhiMode) -> Result<HermitianMatrix2, FieldError> {
    coeffs.check_w(w)?;
    HessianKernel::new(coeffs).hessian(z, w, phi)
}

/// `max |det ∂∂̄u - 1|` over the sample points.
pub fn det_residual(coeffs: &SolutionCoeffs, points: &[(Complex64, Complex64)], phi: PhiMode) -> Result<f64, FieldError> {
    let kernel = HessianKernel::new(coeffs);
    let mut worst: f64 = 0.0;
    for &(z, w) in points {
        let h = kernel.hessian(z, w, phi)?;
        worst = worst.max((h.det() - 1.0).abs());
    }
    Ok(worst)
}

/// Strict plurisubharmonicity at every sample: `h11 > 0` and `det > 0`.
/// Points where the Hessian cannot be evaluated count as failures.
pub fn psh_check(coeffs: &SolutionCoeffs, points: &[(Complex64, Complex64)], phi: PhiMode) -> bool {
    let kernel = HessianKernel::new(coeffs);
    points.iter().all(|&(z, w)| match kernel.hessian(z, w, phi) {
        Ok(h) => h.h11.re > 0.0 && h.det() > 0.0,
        Err(_) => false,
    })
}

/// Residual of `u = |z - 1|² + |w|²` on `Re z <= 1/2` and `|z|² + |w|²` beyond.
pub fn piecewise_residual(points: &[(Complex64, Complex64)]) -> Result<f64, FieldError> {
    const ORDER: usize = 2;
    let left = SolutionCoeffs::flat_quadratic(ORDER).with_c(BiSeries::real_constant(-1.0, ORDER));
    let right = SolutionCoeffs::flat_quadratic(ORDER);
    let (kl, kr) = (HessianKernel::new(&left), HessianKernel::new(&right));
    let mut worst: f64 = 0.0;
    for &(z, w) in points {
        if (z.re - 0.5).abs() <= 1e-12 {
            return Err(FieldError::OnSingularHypersurface);
        }
        let kernel = if z.re < 0.5 { &kl } else { &kr };
        worst = worst.max((kernel.hessian(z, w, PhiMode::IdentityMap)?.det() - 1.0).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn flat_quadratic_identity_hessian() {
        let q = SolutionCoeffs::flat_quadratic(8);
        let h = hessian(&q, cx(0.7, -1.1), cx(3.0, 2.0), PhiMode::IdentityMap).unwrap();
        assert!(h.max_abs_diff(&HermitianMatrix2::identity()) == 0.0);
        let pts = [(cx(0.1, 0.2), cx(-0.5, 0.4)), (cx(2.0, 0.0), cx(0.0, 0.0))];
        assert_eq!(det_residual(&q, &pts, PhiMode::IdentityMap).unwrap(), 0.0);
        assert!(psh_check(&q, &pts, PhiMode::IdentityMap));
    }

    #[test]
    fn assemble_round_trip() {
        let n = 6;
        let q = SolutionCoeffs::new(
            BiSeries::real_constant(2.0, n),
            BiSeries::w(n),
            BiSeries::wbar(n).scale(cx(0.0, 1.0)),
            BiSeries::monomial(1, 1, cx(1.0, 0.0), n),
            1.0,
        )
        .unwrap();
        let u = assemble_u(&q);
        assert!(u.is_real(0.0));
        assert_eq!(u.entry(1, 1).unwrap(), q.a());
        assert_eq!(u.entry(2, 0).unwrap(), q.b());
        assert_eq!(u.entry(1, 0).unwrap(), q.c());
        assert_eq!(u.entry(0, 0).unwrap(), q.d());
        let v = u.evaluate(cx(0.3, 0.2), cx(0.1, -0.4)).unwrap();
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn negative_a_is_not_psh() {
        let n = 4;
        let q = SolutionCoeffs::new_unchecked(
            BiSeries::real_constant(-1.0, n),
            BiSeries::zero(n),
            BiSeries::zero(n),
            BiSeries::monomial(1, 1, cx(1.0, 0.0), n),
            f64::INFINITY,
        )
        .unwrap();
        assert!(!psh_check(&q, &[(cx(0.0, 0.0), cx(0.0, 0.0))], PhiMode::IdentityMap));
        assert!(SolutionCoeffs::new(
            BiSeries::real_constant(-1.0, n),
            BiSeries::zero(n),
            BiSeries::zero(n),
            BiSeries::zero(n),
            1.0
        )
        .is_err());
    }

    #[test]
    fn phi_values() {
        let jet = phi_jet(cx(0.5, 0.0), cx(0.0, 0.0)).unwrap();
        assert_eq!(jet.value, cx(0.0, 0.0));
        assert_eq!(jet.d1, cx(1.0, 0.0));
        let v = phi_map(cx(0.5, 0.0), cx(0.75, 0.0)).unwrap();
        assert!((v - cx(1.0, 0.0)).norm() < 1e-15);
        assert!(phi_map(cx(0.5, 0.0), cx(1.0, 0.0)).is_err());
        let z = cx(0.3, -0.2);
        let small = phi_map(cx(1e-6, 0.0), z).unwrap();
        assert!((small - z).norm() < 1e-6);
    }

    #[test]
    fn phi_ode_by_finite_differences() {
        let alpha = cx(0.5, 0.25);
        for z in [cx(0.1, 0.2), cx(-0.4, 0.3), cx(0.0, -0.6)] {
            let h = 1e-3;
            let f = |s: Complex64| phi_map(alpha, s).unwrap();
            let second = (f(z + h) - f(z) * 2.0 + f(z - h)) / (h * h);
            let d1 = phi_jet(alpha, z).unwrap().d1;
            assert!((second - alpha * d1 * d1 * d1).norm() < 1e-5);
            let first = (f(z + h) - f(z - h)) / (2.0 * h);
            assert!((first - d1).norm() < 1e-6);
        }
    }

    #[test]
    fn identity_check_trivial_cases() {
        assert_eq!(phi_identity_check(cx(1.0, 1.0), &[cx(0.0, 0.0)]).unwrap(), 0.0);
        assert_eq!(phi_identity_check(cx(0.0, 0.0), &[cx(0.4, 0.9)]).unwrap(), 0.0);
    }

    #[test]
    fn piecewise_quadratic() {
        let pts = [(cx(0.0, 0.0), cx(0.3, 0.1)), (cx(1.0, 0.0), cx(-2.0, 0.0))];
        assert_eq!(piecewise_residual(&pts).unwrap(), 0.0);
        assert_eq!(
            piecewise_residual(&[(cx(0.5, 3.0), cx(0.0, 0.0))]),
            Err(FieldError::OnSingularHypersurface)
        );
    }
}

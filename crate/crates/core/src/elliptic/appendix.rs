use serde::{Deserialize, Serialize};

use crate::jet::Jet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixEntry {
    pub name: String,
    pub dim: usize,
    pub points: usize,
    /// Max over sample radii of `|Δu - f(u)|`.
    pub max_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub entries: Vec<AppendixEntry>,
}

impl AppendixReport {
    pub fn max_defect(&self) -> f64 {
        self.entries.iter().map(|e| e.max_defect).fold(0.0, f64::max)
    }
}

/// Laplacian in `ℝ^m` of a radial profile, `f'' + (m-1)f'/r`, with the `r → 0` limit `m f''(0)`.
fn radial_laplacian(profile: impl Fn(Jet) -> Jet, r: f64, dim: usize) -> (f64, f64) {
    let j = profile(Jet::variable(r));
    let lap = if r == 0.0 {
        dim as f64 * j.d2.re
    } else {
        j.d2.re + (dim as f64 - 1.0) * j.d1.re / r
    };
    (j.v.re, lap)
}

fn entry(
    name: &str,
    dim: usize,
    radii: &[f64],
    profile: impl Fn(Jet) -> Jet,
    rhs: impl Fn(f64, f64) -> f64,
) -> AppendixEntry {
    let max_defect = radii
        .iter()
        .map(|&r| {
            let (u, lap) = radial_laplacian(&profile, r, dim);
            (lap - rhs(u, r)).abs()
        })
        .fold(0.0, f64::max);
    AppendixEntry {
        name: name.to_string(),
        dim,
        points: radii.len(),
        max_defect,
    }
}

/// Pointwise residuals of the explicit radial solutions
/// `-ln(1-|x|²)` of `Δu = 4e^{2u}`, `-ln(1-|x|²) - ln|x|` of `Δv = 4|x|²e^{2v}`
/// and `2ln|x| - ln(2m-4)` of `Δu = e^{-u}`, with derivatives taken exactly.
pub fn appendix_residuals() -> AppendixReport {
    let inside: Vec<f64> = (0..10).map(|i| 0.095 * i as f64).collect();
    let punctured: Vec<f64> = (1..10).map(|i| 0.095 * i as f64).collect();
    let spread: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();
    let bergman = |r: Jet| -(Jet::real(1.0) - r * r).ln();
    let mut entries = vec![
        entry("ball-metric", 2, &inside, bergman, |u, _| 4.0 * (2.0 * u).exp()),
        entry(
            "punctured",
            2,
            &punctured,
            |r| bergman(r) - r.ln(),
            |v, r| 4.0 * r * r * (2.0 * v).exp(),
        ),
    ];
    for m in [3usize, 4, 5] {
        let shift = ((2 * m - 4) as f64).ln();
        entries.push(entry(
            &format!("log-radial-m{m}"),
            m,
            &spread,
            move |r| r.ln() * 2.0 - shift,
            |u, _| (-u).exp(),
        ));
    }
    AppendixReport { entries }
}

/// Field paired against the test function on the unit disc in `ℝ²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingField {
    /// `v = -ln(1-|x|²) - ln|x|` with `f = 4|x|²e^{2v}`.
    Singular,
    /// `u = -ln(1-|x|²)` with `f = 4e^{2u}`.
    Smooth,
}

/// Test function `exp(1 - ρ²/(ρ² - |x - x₀|²))` supported in the disc of radius `ρ` about `x₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Bump {
    pub fn standard() -> Self {
        Bump {
            center: [0.0, 0.0],
            radius: 0.5,
        }
    }

    fn profile(&self, s: Jet) -> Jet {
        let rho2 = self.radius * self.radius;
        ((Jet::real(rho2) - s * s).recip() * (-rho2) + 1.0).exp()
    }

    /// `(φ, Δφ)` at `x`.
    pub fn eval(&self, x: [f64; 2]) -> (f64, f64) {
        let s = (x[0] - self.center[0]).hypot(x[1] - self.center[1]);
        if s >= self.radius {
            return (0.0, 0.0);
        }
        radial_laplacian(|j| self.profile(j), s, 2)
    }

    pub fn at_origin(&self) -> f64 {
        self.eval([0.0, 0.0]).0
    }
}

/// Midpoint-rule value of `⟨v, Δφ⟩ - ⟨f, φ⟩` over `[-1, 1]²` with cells of width `h`.
/// The bump must lie inside the unit disc; cell centres avoid the origin when `2/h` is even.
pub fn distributional_pairing(field: PairingField, bump: &Bump, h: f64) -> f64 {
    let n = (2.0 / h).round() as usize;
    let mut acc = 0.0;
    for i in 0..n {
        let x = -1.0 + (i as f64 + 0.5) * h;
        for j in 0..n {
            let y = -1.0 + (j as f64 + 0.5) * h;
            let (phi, lap_phi) = bump.eval([x, y]);
            if phi == 0.0 && lap_phi == 0.0 {
                continue;
            }
            let r2 = x * x + y * y;
            let u = -(1.0 - r2).ln();
            let (v, f) = match field {
                PairingField::Smooth => (u, 4.0 * (2.0 * u).exp()),
                PairingField::Singular => {
                    let v = u - 0.5 * r2.ln();
                    (v, 4.0 * r2 * (2.0 * v).exp())
                }
            };
            acc += v * lap_phi - f * phi;
        }
    }
    acc * h * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_vanish() {
        let rep = appendix_residuals();
        assert!(rep.max_defect() < 1e-10, "{rep:?}");
    }

    #[test]
    fn pairing_sees_the_point_mass() {
        let b = Bump::standard();
        let val = distributional_pairing(PairingField::Singular, &b, 1.0 / 128.0);
        let target = 2.0 * std::f64::consts::PI * b.at_origin();
        assert!((val.abs() - target).abs() < 0.02 * target, "{val}");
        assert!(distributional_pairing(PairingField::Smooth, &b, 1.0 / 128.0).abs() < 1e-3);
    }
}

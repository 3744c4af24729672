//! Solutions whose coefficients depend on `w` only through `t = ln|w|²`.
//!
//! With `b_t = k a²`, the reduced system
//! `a a_tt = a_t² + 4|b_t|²`, `a b_tt = 2 a_t b_t`, `a c_tt = a_t c_t + 2 b_t conj(c_t)`,
//! `a d_tt = |c_t|² + e^t` is solved in closed form on four branches.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::RadialError;
use crate::jet::Jet;

/// Parameters within this distance of `2k√C₁ = 1` are rejected on the `C₁ > 0` branch.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Window in `t` used to enumerate the periodic validity intervals of the `C₁ < 0` branch.
pub const DEFAULT_WINDOW: (f64, f64) = (-20.0, 20.0);

/// Window in `t` used for sampling, `0.1 <= |w| <= 2` approximately.
pub const SAMPLE_WINDOW: (f64, f64) = (-4.6, 1.38);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialBranch {
    /// `k = 0`.
    CaseI,
    /// `k ≠ 0`, `C₁ > 0`.
    CaseIIPos,
    /// `k ≠ 0`, `C₁ = 0`.
    CaseIIZero,
    /// `k ≠ 0`, `C₁ < 0`.
    CaseIINeg,
}

/// Branch tag and integration constants.
///
/// In Case I, `c = C₄ e^{C₂t} + C₅` and `d` carries `C₆ t + C₇`; in Case II,
/// `C₃`, `C₄` enter `c` and `d` carries `C₅ t + C₆`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialParams {
    pub branch: RadialBranch,
    pub k: Complex64,
    pub c1: f64,
    pub c2: f64,
    pub c3: Complex64,
    pub c4: Complex64,
    #[serde(default)]
    pub c5: f64,
    #[serde(default)]
    pub c6: f64,
    #[serde(default)]
    pub c7: f64,
    #[serde(default)]
    pub k0: Complex64,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl RadialParams {
    pub fn case_i(c1: f64, c2: f64, c3: Complex64, c4: Complex64) -> Self {
        RadialParams {
            branch: RadialBranch::CaseI,
            k: zero(),
            c1,
            c2,
            c3,
            c4,
            c5: 0.0,
            c6: 0.0,
            c7: 0.0,
            k0: zero(),
        }
    }

    /// Case II with the branch chosen from the sign of `c1`.
    pub fn case_ii(k: Complex64, c1: f64, c2: f64, c3: Complex64, c4: Complex64) -> Self {
        let branch = if c1 > 0.0 {
            RadialBranch::CaseIIPos
        } else if c1 < 0.0 {
            RadialBranch::CaseIINeg
        } else {
            RadialBranch::CaseIIZero
        };
        RadialParams {
            branch,
            k,
            c1,
            c2,
            c3,
            c4,
            c5: 0.0,
            c6: 0.0,
            c7: 0.0,
            k0: zero(),
        }
    }

    pub fn validate(&self) -> Result<(), RadialError> {
        let finite = [self.c1, self.c2, self.c5, self.c6, self.c7, self.k.re, self.k.im]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(RadialError::InvalidParams("non-finite constant".into()));
        }
        let bad = |m: &str| Err(RadialError::InvalidParams(m.into()));
        match self.branch {
            RadialBranch::CaseI => {
                if self.k.norm() != 0.0 {
                    return bad("Case I requires k = 0");
                }
                if !(self.c1 > 0.0) {
                    return bad("Case I requires C1 > 0");
                }
            }
            RadialBranch::CaseIIPos | RadialBranch::CaseIIZero | RadialBranch::CaseIINeg => {
                if self.k.norm() == 0.0 {
                    return bad("Case II requires k != 0");
                }
                let sign_ok = match self.branch {
                    RadialBranch::CaseIIPos => self.c1 > 0.0,
                    RadialBranch::CaseIIZero => self.c1 == 0.0,
                    _ => self.c1 < 0.0,
                };
                if !sign_ok {
                    return bad("sign of C1 does not match the branch");
                }
                if self.branch == RadialBranch::CaseIIPos
                    && (2.0 * self.k.norm() * self.c1.sqrt() - 1.0).abs() < DEGENERACY_TOL
                {
                    return bad("2|k|sqrt(C1) = 1 makes the d formula degenerate");
                }
            }
        }
        Ok(())
    }

    /// The `c` and `d` formulas assume real `k > 0` on Case II.
    fn require_real_k(&self) -> Result<f64, RadialError> {
        if self.branch == RadialBranch::CaseI {
            return Ok(0.0);
        }
        if self.k.im != 0.0 || self.k.re <= 0.0 {
            return Err(RadialError::Unsupported(format!(
                "c and d need real k > 0, got k = {}",
                self.k
            )));
        }
        Ok(self.k.re)
    }
}

/// Coefficient values at one `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialEval {
    pub t: f64,
    pub a: f64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: f64,
    pub valid: bool,
}

/// Coefficients with their first two `t`-derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialJets {
    pub a: Jet,
    pub b: Jet,
    pub c: Jet,
    pub d: Jet,
}

/// `(a, b)` jets; valid for complex `k`.
pub fn ab_jets(p: &RadialParams, t: f64) -> Result<(Jet, Jet), RadialError> {
    p.validate()?;
    let x = Jet::variable(t);
    let kabs = p.k.norm();
    let k0 = Jet::constant(p.k0);
    let (a, b) = match p.branch {
        RadialBranch::CaseI => ((x * p.c2).exp() * p.c1, Jet::constant(p.c3)),
        RadialBranch::CaseIIPos => {
            let s = p.c1.sqrt();
            let y = (x * (2.0 * kabs * s)).exp() * p.c2;
            let den = (Jet::real(1.0) - y * y).recip();
            let a = y * den * (2.0 * s);
            let b = den.scale(p.k * (s / kabs)) + k0;
            (a, b)
        }
        RadialBranch::CaseIIZero => {
            let lin = x * (2.0 * kabs) + p.c2;
            let a = -lin.recip();
            let b = lin.recip().scale(-p.k / (2.0 * kabs)) + k0;
            (a, b)
        }
        RadialBranch::CaseIINeg => {
            let sigma = (-p.c1).sqrt();
            let theta = x * (2.0 * kabs * sigma) + p.c2;
            let a = theta.sec() * sigma;
            let b = theta.tan().scale(p.k * (sigma / (2.0 * kabs))) + k0;
            (a, b)
        }
    };
    Ok((a, b))
}

/// Full jets of `(a, b, c, d)`; Case II requires real `k > 0`.
pub fn radial_jets(p: &RadialParams, t: f64) -> Result<RadialJets, RadialError> {
    let (a, b) = ab_jets(p, t)?;
    let k = p.require_real_k()?;
    let x = Jet::variable(t);
    let et = x.exp();
    let (c31, c32) = (p.c3.re, p.c3.im);
    let c4 = Jet::constant(p.c4);
    let linear = x * p.c5 + p.c6;
    let (c, d) = match p.branch {
        RadialBranch::CaseI => {
            let e = (x * p.c2).exp();
            let c = e.scale(p.c4) + Jet::real(p.c5);
            let first = e * (p.c4.norm_sqr() / p.c1);
            let middle = if p.c2 == 1.0 {
                x * x * (0.5 / p.c1)
            } else {
                (x * (1.0 - p.c2)).exp() * (1.0 / ((1.0 - p.c2).powi(2) * p.c1))
            };
            (c, first + middle + x * p.c6 + p.c7)
        }
        RadialBranch::CaseIIPos => {
            let s = p.c1.sqrt();
            let lam = 2.0 * k * s;
            let y = (x * lam).exp() * p.c2;
            let one = Jet::real(1.0);
            let c = (Jet::constant(p.c3.conj()) + y.scale(p.c3)) * (one - y * y).recip() * (1.0 / (lam * p.c2)) + c4;
            let e_minus = (x * (1.0 - lam)).exp() * (1.0 / (2.0 * s * p.c2 * (1.0 - lam).powi(2)));
            let e_plus = (x * (1.0 + lam)).exp() * (p.c2 / (2.0 * s * (1.0 + lam).powi(2)));
            let c_part = ((one - y).recip() * (c31 * c31) - (one + y).recip() * (c32 * c32))
                * (1.0 / (8.0 * k * k * p.c1.powf(1.5) * p.c2 * p.c2));
            (c, e_minus - e_plus + c_part + linear)
        }
        RadialBranch::CaseIIZero => {
            let lin = x * (2.0 * k) + p.c2;
            let c = lin.recip() * (-c31 / (2.0 * k)) + x.scale(Complex64::new(0.0, c32)) + c4;
            let d = -(lin - 4.0 * k) * et - lin.recip() * (c31 * c31 / (8.0 * k * k))
                - (x.powi(3) * (k / 3.0) + x * x * (p.c2 / 2.0)) * (c32 * c32)
                + linear;
            (c, d)
        }
        RadialBranch::CaseIINeg => {
            let sigma = (-p.c1).sqrt();
            let theta = x * (2.0 * k * sigma) + p.c2;
            let (sec, tan) = (theta.sec(), theta.tan());
            let c = (sec.scale(p.c3.conj()) + tan.scale(p.c3)) * (1.0 / (2.0 * sigma * k)) + c4;
            let q = 4.0 * k * k * p.c1;
            let e_part = et * (theta.cos() * (1.0 + q) + theta.sin() * (4.0 * k * sigma))
                * (1.0 / (sigma * (1.0 - q).powi(2)));
            let c_part = (sec * (c31 * c31 + c32 * c32) + tan * (c31 * c31 - c32 * c32))
                * (1.0 / (4.0 * k * k * sigma.powi(3)));
            (c, e_part + c_part + linear)
        }
    };
    Ok(RadialJets { a, b, c, d })
}

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }
}

/// Maximal open `t`-intervals on which the formula for `a` is finite and positive.
/// For the periodic `C₁ < 0` branch the intervals meeting `window` are listed.
pub fn domain_of_validity_in(p: &RadialParams, window: (f64, f64)) -> Result<Vec<Interval>, RadialError> {
    p.validate()?;
    let kabs = p.k.norm();
    let all = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    Ok(match p.branch {
        RadialBranch::CaseI => vec![all],
        RadialBranch::CaseIIPos => {
            let lam = 2.0 * kabs * p.c1.sqrt();
            if p.c2 == 0.0 {
                vec![]
            } else {
                let edge = -p.c2.abs().ln() / lam;
                if p.c2 > 0.0 {
                    vec![Interval { lo: f64::NEG_INFINITY, hi: edge }]
                } else {
                    vec![Interval { lo: edge, hi: f64::INFINITY }]
                }
            }
        }
        RadialBranch::CaseIIZero => vec![Interval {
            lo: f64::NEG_INFINITY,
            hi: -p.c2 / (2.0 * kabs),
        }],
        RadialBranch::CaseIINeg => {
            // cos θ > 0 on θ ∈ (-π/2 + 2nπ, π/2 + 2nπ), θ = ωt + C₂
            let omega = 2.0 * kabs * (-p.c1).sqrt();
            let to_t = |theta: f64| (theta - p.c2) / omega;
            let n_lo = ((omega * window.0 + p.c2 - FRAC_PI_2) / (2.0 * PI)).floor() as i64;
            let n_hi = ((omega * window.1 + p.c2 + FRAC_PI_2) / (2.0 * PI)).ceil() as i64;
            (n_lo..=n_hi)
                .map(|n| Interval {
                    lo: to_t(-FRAC_PI_2 + 2.0 * PI * n as f64),
                    hi: to_t(FRAC_PI_2 + 2.0 * PI * n as f64),
                })
                .filter(|iv| iv.hi > window.0 && iv.lo < window.1)
                .collect()
        }
    })
}

pub fn domain_of_validity(p: &RadialParams) -> Result<Vec<Interval>, RadialError> {
    domain_of_validity_in(p, DEFAULT_WINDOW)
}

fn in_domain(p: &RadialParams, t: f64) -> Result<bool, RadialError> {
    let window = (t - 1.0, t + 1.0);
    Ok(domain_of_validity_in(p, window)?.iter().any(|iv| iv.contains(t)))
}

/// Closed-form coefficients at `t`; errors outside the domain of validity.
pub fn radial_coeffs(p: &RadialParams, t: f64) -> Result<RadialEval, RadialError> {
    if !in_domain(p, t)? {
        return Err(RadialError::OutOfValidity { t });
    }
    let j = radial_jets(p, t)?;
    let valid = j.a.v.re > 0.0 && [j.a, j.b, j.c, j.d].iter().all(Jet::is_finite);
    if !valid {
        return Err(RadialError::OutOfValidity { t });
    }
    Ok(RadialEval {
        t,
        a: j.a.v.re,
        b: j.b.v,
        c: j.c.v,
        d: j.d.v.re,
        valid,
    })
}

fn t_of(w: Complex64) -> Result<f64, RadialError> {
    let m = w.norm_sqr();
    if m == 0.0 {
        return Err(RadialError::OutOfValidity { t: f64::NEG_INFINITY });
    }
    Ok(m.ln())
}

/// `u = a|z|² + 2Re(b z²) + 2Re(c z) + d` at `(z, w)`.
pub fn radial_u(p: &RadialParams, z: Complex64, w: Complex64) -> Result<f64, RadialError> {
    let e = radial_coeffs(p, t_of(w)?)?;
    Ok(e.a * z.norm_sqr() + 2.0 * (e.b * z * z).re + 2.0 * (e.c * z).re + e.d)
}

/// Max defects of the four reduced ODEs over the samples.
pub fn ode_residual(p: &RadialParams, t_samples: &[f64]) -> Result<[f64; 4], RadialError> {
    let mut worst = [0.0f64; 4];
    for &t in t_samples {
        if !in_domain(p, t)? {
            return Err(RadialError::OutOfValidity { t });
        }
        let RadialJets { a, b, c, d } = radial_jets(p, t)?;
        let defects = [
            (a.v * a.d2 - a.d1 * a.d1 - b.d1.norm_sqr() * 4.0).norm(),
            (a.v * b.d2 - a.d1 * b.d1 * 2.0).norm(),
            (a.v * c.d2 - a.d1 * c.d1 - b.d1 * c.d1.conj() * 2.0).norm(),
            (a.v * d.d2 - c.d1.norm_sqr() - t.exp()).norm(),
        ];
        for (w, v) in worst.iter_mut().zip(defects) {
            *w = w.max(v);
        }
    }
    Ok(worst)
}

/// `max |b_t - k a²|`; valid for complex `k`.
pub fn tb_defect(p: &RadialParams, t_samples: &[f64]) -> Result<f64, RadialError> {
    let mut worst: f64 = 0.0;
    for &t in t_samples {
        let (a, b) = ab_jets(p, t)?;
        worst = worst.max((b.d1 - p.k * a.v * a.v).norm());
    }
    Ok(worst)
}

/// First integral of `a a_tt - a_t² = 4|k|²a⁴`. Case II:
/// `(a_t/a)² - 4|k|²a² = 4|k|²C₁`; Case I: `(a_t/a)² = C₂²`.
pub fn first_integral_defect(p: &RadialParams, t_samples: &[f64]) -> Result<f64, RadialError> {
    let mut worst: f64 = 0.0;
    let k2 = p.k.norm_sqr();
    for &t in t_samples {
        let (a, _) = ab_jets(p, t)?;
        let v = a.d1.re / a.v.re;
        let expected = match p.branch {
            RadialBranch::CaseI => p.c2 * p.c2,
            _ => 4.0 * k2 * p.c1,
        };
        worst = worst.max((v * v - 4.0 * k2 * a.v.re * a.v.re - expected).abs());
    }
    Ok(worst)
}

/// `max |det ∂∂̄u - 1|` with the `w`-derivatives obtained from `t`-derivatives by
/// `h_w̄ = h_t/w̄`, `h_w̄w = h_tt/|w|²`.
pub fn mae_residual(p: &RadialParams, points: &[(Complex64, Complex64)]) -> Result<f64, RadialError> {
    let mut worst: f64 = 0.0;
    for &(z, w) in points {
        let t = t_of(w)?;
        if !in_domain(p, t)? {
            return Err(RadialError::OutOfValidity { t });
        }
        let RadialJets { a, b, c, d } = radial_jets(p, t)?;
        let zb = z.conj();
        let h11 = a.v.re;
        let h12 = (a.d1 * zb + b.d1 * z * 2.0 + c.d1) / w.conj();
        let h22 = (a.d2.re * z.norm_sqr() + 2.0 * (b.d2 * z * z).re + 2.0 * (c.d2 * z).re + d.d2.re) / w.norm_sqr();
        let det = h11 * h22 - h12.norm_sqr();
        worst = worst.max((det - 1.0).abs());
    }
    Ok(worst)
}

/// Sign of `a` sampled across the window where its formula is finite, ignoring
/// the validity restriction. Returns `(positive, negative)` sample counts.
pub fn positivity_scan(p: &RadialParams, window: (f64, f64), samples: usize) -> Result<(usize, usize), RadialError> {
    let mut pos = 0;
    let mut neg = 0;
    for i in 0..samples {
        let t = window.0 + (window.1 - window.0) * (i as f64 + 0.5) / samples as f64;
        let (a, _) = ab_jets(p, t)?;
        if !a.is_finite() {
            continue;
        }
        if a.v.re > 0.0 {
            pos += 1;
        } else if a.v.re < 0.0 {
            neg += 1;
        }
    }
    Ok((pos, neg))
}

/// Radii `|w| = e^{t/2}` where `a` has a pole, for pole indices in `range`.
pub fn singular_radii(p: &RadialParams, range: std::ops::RangeInclusive<i64>) -> Result<Vec<f64>, RadialError> {
    p.validate()?;
    let kabs = p.k.norm();
    Ok(match p.branch {
        RadialBranch::CaseI => vec![],
        RadialBranch::CaseIIPos => {
            let lam = 2.0 * kabs * p.c1.sqrt();
            if p.c2 == 0.0 {
                vec![]
            } else {
                vec![(-p.c2.abs().ln() / lam / 2.0).exp()]
            }
        }
        RadialBranch::CaseIIZero => vec![(-p.c2 / (4.0 * kabs)).exp()],
        RadialBranch::CaseIINeg => {
            let omega = 2.0 * kabs * (-p.c1).sqrt();
            range
                .map(|n| ((FRAC_PI_2 + PI * n as f64 - p.c2) / omega / 2.0).exp())
                .collect()
        }
    })
}

/// `count` sample `t` values spread over the validity intervals meeting `window`,
/// each kept `margin` (as a fraction of the clipped interval length) away from the ends.
pub fn valid_samples(p: &RadialParams, window: (f64, f64), count: usize, margin: f64) -> Result<Vec<f64>, RadialError> {
    let pieces: Vec<Interval> = domain_of_validity_in(p, window)?
        .into_iter()
        .filter_map(|iv| {
            let lo = iv.lo.max(window.0);
            let hi = iv.hi.min(window.1);
            let len = hi - lo;
            if len <= 0.0 {
                return None;
            }
            let lo_m = if iv.lo > window.0 { lo + margin * len } else { lo };
            let hi_m = if iv.hi < window.1 { hi - margin * len } else { hi };
            (hi_m > lo_m).then_some(Interval { lo: lo_m, hi: hi_m })
        })
        .collect();
    if pieces.is_empty() {
        return Err(RadialError::OutOfValidity { t: window.0 });
    }
    let total: f64 = pieces.iter().map(|iv| iv.hi - iv.lo).sum();
    // Low-discrepancy placement along the concatenated intervals.
    let golden = 0.618_033_988_749_894_9;
    Ok((0..count)
        .map(|i| {
            let mut s = ((i as f64 + 0.5) * golden).fract() * total;
            for iv in &pieces {
                let len = iv.hi - iv.lo;
                if s < len {
                    return iv.lo + s;
                }
                s -= len;
            }
            pieces[pieces.len() - 1].hi
        })
        .collect())
}

/// Sample points `(z, w)` with `|z| <= 1` and `ln|w|²` from [`valid_samples`].
pub fn valid_points(p: &RadialParams, count: usize) -> Result<Vec<(Complex64, Complex64)>, RadialError> {
    let ts = valid_samples(p, SAMPLE_WINDOW, count, 0.1)?;
    Ok(ts
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let fi = i as f64;
            let z = Complex64::from_polar(((fi + 0.5) / count as f64).sqrt(), 2.399_963 * fi);
            let w = Complex64::from_polar((0.5 * t).exp(), 1.1 * fi + 0.3);
            (z, w)
        })
        .collect())
}

/// Largest gap between jet derivatives and Richardson-extrapolated central
/// differences of the closed forms at `t` with base step `h`.
pub fn derivative_crosscheck(p: &RadialParams, t: f64, h: f64) -> Result<f64, RadialError> {
    let value = |s: f64| -> Result<[Complex64; 4], RadialError> {
        let j = radial_jets(p, s)?;
        Ok([j.a.v, j.b.v, j.c.v, j.d.v])
    };
    let jets = radial_jets(p, t)?;
    let exact = [jets.a, jets.b, jets.c, jets.d];
    let f0 = value(t)?;
    let central = |step: f64| -> Result<([Complex64; 4], [Complex64; 4]), RadialError> {
        let fp = value(t + step)?;
        let fm = value(t - step)?;
        let mut d1 = [zero(); 4];
        let mut d2 = [zero(); 4];
        for i in 0..4 {
            d1[i] = (fp[i] - fm[i]) / (2.0 * step);
            d2[i] = (fp[i] - f0[i] * 2.0 + fm[i]) / (step * step);
        }
        Ok((d1, d2))
    };
    let (d1h, d2h) = central(h)?;
    let (d1h2, d2h2) = central(0.5 * h)?;
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        let r1 = (d1h2[i] * 4.0 - d1h[i]) / 3.0;
        let r2 = (d2h2[i] * 4.0 - d2h[i]) / 3.0;
        worst = worst.max((r1 - exact[i].d1).norm()).max((r2 - exact[i].d2).norm());
    }
    Ok(worst)
}

/// Least-squares slope of `log(crosscheck defect)` against `log h`.
pub fn crosscheck_slope(p: &RadialParams, t: f64, steps: &[f64]) -> Result<f64, RadialError> {
    let mut xs = Vec::with_capacity(steps.len());
    let mut ys = Vec::with_capacity(steps.len());
    for &h in steps {
        xs.push(h.ln());
        ys.push(derivative_crosscheck(p, t, h)?.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// A named instance together with the potential as displayed in closed form.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub params: RadialParams,
    pub singular_set: &'static str,
    /// Closed-form `u(z, w)` written directly in `|w|`, independent of the branch code.
    pub displayed_u: fn(Complex64, Complex64) -> f64,
}

fn re_z2(z: Complex64) -> f64 {
    2.0 * (z * z).re
}

fn blocki_he(z: Complex64, w: Complex64) -> f64 {
    let r = w.norm();
    r * z.norm_sqr() + re_z2(z) + 4.0 * r
}

fn case_i_smooth(z: Complex64, w: Complex64) -> f64 {
    z.norm_sqr() + re_z2(z) + w.norm_sqr()
}

fn case_i_blowup(z: Complex64, w: Complex64) -> f64 {
    let r = w.norm();
    r.powi(3) * z.norm_sqr() + re_z2(z) + 4.0 / r
}

fn k_quarter(z: Complex64, w: Complex64) -> f64 {
    let r = w.norm();
    let m = 1.0 - r * r;
    2.0 * r / m * z.norm_sqr() + re_z2(z) / m + 2.0 * r - 2.0 * r.powi(3) / 9.0
}

fn k_one(z: Complex64, w: Complex64) -> f64 {
    let r = w.norm();
    let m = 1.0 - r.powi(8);
    2.0 * r.powi(4) / m * z.norm_sqr() + re_z2(z) / m + 1.0 / (2.0 * r * r) - r.powi(6) / 18.0
}

fn wang_wang(z: Complex64, w: Complex64) -> f64 {
    let l = w.norm_sqr().ln();
    -z.norm_sqr() / (2.0 * l) - re_z2(z) / (4.0 * l) - (2.0 * l - 4.0) * w.norm_sqr()
}

fn trig(z: Complex64, w: Complex64) -> f64 {
    let l = w.norm_sqr().ln();
    let th = 2.0 * l;
    z.norm_sqr() / th.cos() + th.tan() / 2.0 * re_z2(z) + w.norm_sqr() * (-3.0 * th.cos() + 4.0 * th.sin()) / 25.0
}

/// The named instances.
pub fn catalog() -> Vec<CatalogEntry> {
    let one = Complex64::new(1.0, 0.0);
    let real = |v: f64| Complex64::new(v, 0.0);
    vec![
        CatalogEntry {
            name: "BlockiHe",
            params: RadialParams::case_i(1.0, 0.5, one, zero()),
            singular_set: "Lipschitz at w = 0",
            displayed_u: blocki_he,
        },
        CatalogEntry {
            name: "CaseISmooth",
            params: RadialParams::case_i(1.0, 0.0, one, zero()),
            singular_set: "none (quadratic)",
            displayed_u: case_i_smooth,
        },
        CatalogEntry {
            name: "CaseIBlowup",
            params: RadialParams::case_i(1.0, 1.5, one, zero()),
            singular_set: "w = 0",
            displayed_u: case_i_blowup,
        },
        CatalogEntry {
            name: "kQuarter",
            params: RadialParams::case_ii(real(0.25), 1.0, 1.0, zero(), zero()),
            singular_set: "|w| = 1 (Lipschitz at w = 0)",
            displayed_u: k_quarter,
        },
        CatalogEntry {
            name: "kOne",
            params: RadialParams::case_ii(one, 1.0, 1.0, zero(), zero()),
            singular_set: "w = 0 and |w| = 1",
            displayed_u: k_one,
        },
        CatalogEntry {
            name: "WangWang",
            params: RadialParams::case_ii(one, 0.0, 0.0, zero(), zero()),
            singular_set: "w = 0 and |w| = 1",
            displayed_u: wang_wang,
        },
        CatalogEntry {
            name: "Trig",
            params: RadialParams::case_ii(one, -1.0, 0.0, zero(), zero()),
            singular_set: "|w| = e^{π/8} e^{nπ/4}, n ∈ ℤ",
            displayed_u: trig,
        },
    ]
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name.eq_ignore_ascii_case(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spot_values() {
        let bh = catalog_entry("BlockiHe").unwrap().params;
        let e = radial_coeffs(&bh, 0.8).unwrap();
        assert!((e.a - 0.4f64.exp()).abs() < 1e-15);
        let kq = catalog_entry("kQuarter").unwrap().params;
        let e = radial_coeffs(&kq, 0.25f64.ln()).unwrap();
        assert!((e.a - 4.0 / 3.0).abs() < 1e-14);
        let ww = catalog_entry("WangWang").unwrap().params;
        assert!((radial_coeffs(&ww, -1.0).unwrap().a - 0.5).abs() < 1e-15);
        let u = radial_u(&bh, cx(1.0, 0.0), cx(1.0, 0.0)).unwrap();
        assert!((u - 7.0).abs() < 1e-14);
    }

    #[test]
    fn validity_intervals() {
        let kq = catalog_entry("kQuarter").unwrap().params;
        assert_eq!(domain_of_validity(&kq).unwrap(), vec![Interval { lo: f64::NEG_INFINITY, hi: 0.0 }]);
        let ww = catalog_entry("WangWang").unwrap().params;
        assert_eq!(domain_of_validity(&ww).unwrap()[0].hi, 0.0);
        let tr = catalog_entry("Trig").unwrap().params;
        let ivs = domain_of_validity_in(&tr, (-1.0, 1.0)).unwrap();
        assert!(ivs.iter().any(|iv| (iv.lo + PI / 4.0).abs() < 1e-15 && (iv.hi - PI / 4.0).abs() < 1e-15));
        assert!(radial_coeffs(&tr, 1.0).is_err());
        assert!(radial_coeffs(&kq, 0.5).is_err());
    }

    #[test]
    fn parameter_checks() {
        let mut p = RadialParams::case_ii(cx(0.5, 0.0), 1.0, 1.0, zero(), zero());
        assert!(p.validate().is_err());
        p.k = cx(0.3, 0.4);
        p.c1 = 4.0;
        // 2|k|√C₁ = 4: a and b fine, c and d unsupported for complex k
        assert!(ab_jets(&p, -1.0).is_ok());
        assert!(matches!(radial_jets(&p, -1.0), Err(RadialError::Unsupported(_))));
        assert!(RadialParams::case_i(-1.0, 0.0, zero(), zero()).validate().is_err());
    }

    #[test]
    fn general_constants_solve_the_odes() {
        let c3 = cx(0.7, -0.4);
        let c4 = cx(0.2, 0.9);
        let mut cases = [
            RadialParams::case_i(2.0, 0.3, c3, c4),
            RadialParams::case_i(1.5, 1.0, c3, c4),
            RadialParams::case_ii(cx(0.8, 0.0), 0.6, 0.5, c3, c4),
            RadialParams::case_ii(cx(0.8, 0.0), 0.6, -0.5, c3, c4),
            RadialParams::case_ii(cx(1.3, 0.0), 0.0, 0.4, c3, c4),
            RadialParams::case_ii(cx(0.6, 0.0), -0.7, 0.3, c3, c4),
        ];
        for p in cases.iter_mut() {
            p.c5 = 0.25;
            p.c6 = -0.5;
            p.c7 = 0.125;
            p.k0 = cx(0.1, 0.2);
            let ts = valid_samples(p, SAMPLE_WINDOW, 12, 0.1).unwrap();
            let r = ode_residual(p, &ts).unwrap();
            let scale = ts
                .iter()
                .map(|&t| {
                    let j = radial_jets(p, t).unwrap();
                    [j.a.v, j.a.d2, j.d.d2, j.c.d2].iter().map(|v| v.norm()).fold(1.0, f64::max)
                })
                .fold(1.0, f64::max);
            for v in r {
                assert!(v <= 1e-12 * scale * scale, "{p:?} {r:?}");
            }
            let pts = valid_points(p, 10).unwrap();
            assert!(mae_residual(p, &pts).unwrap() < 1e-8, "{p:?}");
        }
    }

    #[test]
    fn trig_singular_radii() {
        let tr = catalog_entry("Trig").unwrap().params;
        let radii = singular_radii(&tr, -2..=2).unwrap();
        for (n, r) in (-2..=2).zip(radii) {
            let expect = (PI / 8.0).exp() * (n as f64 * PI / 4.0).exp();
            assert!((r - expect).abs() < 1e-12 * expect);
        }
        let (pos, neg) = positivity_scan(&tr, (-2.0, 2.0), 400).unwrap();
        assert!(pos > 0 && neg > 0);
    }
}

//! Truncated formal power series in the conjugate pair `(w, w̄)`.
//!
//! A [`BiSeries`] of order `N` stores every coefficient `c(i, j)` of
//! `w^i w̄^j` with `i + j <= N` in a dense triangular array. All binary
//! operations truncate at the smaller order of their operands, so identities
//! that hold for convergent series hold exactly coefficient by coefficient.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::SeriesError;

/// Wirtinger direction for [`BiSeries::derive`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    W,
    WBar,
}

/// Structural claims carried by a series and propagated through the algebra.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SeriesFlags {
    /// `c(i, j) = conj(c(j, i))`, so the series is real valued.
    pub real: bool,
    /// `c(i, j) = 0` whenever `j > 0`.
    pub holomorphic: bool,
}

impl SeriesFlags {
    fn both(self, other: SeriesFlags) -> SeriesFlags {
        SeriesFlags {
            real: self.real && other.real,
            holomorphic: self.holomorphic && other.holomorphic,
        }
    }
}

/// One stored coefficient, as written to reports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub i: usize,
    pub j: usize,
    pub re: f64,
    pub im: f64,
}

/// Value of a series at a point together with an estimate of the neglected tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    /// Geometric tail estimate, present only when the series carries a radius hint.
    pub tail_bound: Option<f64>,
}

#[inline]
fn shell_start(n: usize) -> usize {
    n * (n + 1) / 2
}

#[inline]
fn index(i: usize, j: usize) -> usize {
    shell_start(i + j) + j
}

#[inline]
fn len_for(order: usize) -> usize {
    shell_start(order + 1)
}

/// Truncated bivariate power series `Σ c(i, j) w^i w̄^j`, `i + j <= order`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries {
    order: usize,
    coeffs: Vec<Complex64>,
    radius_hint: Option<f64>,
    flags: SeriesFlags,
}

impl BiSeries {
    fn raw(order: usize, coeffs: Vec<Complex64>, flags: SeriesFlags) -> Self {
        debug_assert_eq!(coeffs.len(), len_for(order));
        let mut s = BiSeries {
            order,
            coeffs,
            radius_hint: None,
            flags,
        };
        s.enforce_flags();
        s
    }

    pub fn zero(order: usize) -> Self {
        Self::raw(
            order,
            vec![Complex64::new(0.0, 0.0); len_for(order)],
            SeriesFlags {
                real: true,
                holomorphic: true,
            },
        )
    }

    pub fn constant(value: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len_for(order)];
        coeffs[0] = value;
        Self::raw(
            order,
            coeffs,
            SeriesFlags {
                real: value.im == 0.0,
                holomorphic: true,
            },
        )
    }

    pub fn real_constant(value: f64, order: usize) -> Self {
        Self::constant(Complex64::new(value, 0.0), order)
    }

    pub fn one(order: usize) -> Self {
        Self::real_constant(1.0, order)
    }

    /// `c · w^i w̄^j`, or zero when the monomial does not fit in `order`.
    pub fn monomial(i: usize, j: usize, c: Complex64, order: usize) -> Self {
        Self::from_fn(order, |p, q| {
            if p == i && q == j {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Builds a series from a coefficient function. Flags are detected exactly.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut coeffs = Vec::with_capacity(len_for(order));
        for n in 0..=order {
            for j in 0..=n {
                coeffs.push(f(n - j, j));
            }
        }
        let mut s = BiSeries {
            order,
            coeffs,
            radius_hint: None,
            flags: SeriesFlags::default(),
        };
        s.flags = s.detect_flags();
        s
    }

    /// Holomorphic series `Σ taylor[i] w^i`; terms beyond `order` are dropped.
    pub fn holomorphic(taylor: &[Complex64], order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len_for(order)];
        for (i, c) in taylor.iter().enumerate().take(order + 1) {
            coeffs[index(i, 0)] = *c;
        }
        let real = taylor.iter().skip(1).take(order).all(|c| *c == Complex64::new(0.0, 0.0))
            && taylor.first().is_none_or(|c| c.im == 0.0);
        Self::raw(
            order,
            coeffs,
            SeriesFlags {
                real,
                holomorphic: true,
            },
        )
    }

    /// The series `w`.
    pub fn w(order: usize) -> Self {
        Self::holomorphic(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], order)
    }

    /// The series `w̄`.
    pub fn wbar(order: usize) -> Self {
        Self::w(order).conj()
    }

    pub fn with_radius_hint(mut self, radius: f64) -> Self {
        self.radius_hint = if radius.is_finite() { Some(radius) } else { None };
        self
    }

    pub fn without_radius_hint(mut self) -> Self {
        self.radius_hint = None;
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn radius_hint(&self) -> Option<f64> {
        self.radius_hint
    }

    pub fn flags(&self) -> SeriesFlags {
        self.flags
    }

    pub fn is_real(&self) -> bool {
        self.flags.real
    }

    pub fn is_holomorphic(&self) -> bool {
        self.flags.holomorphic
    }

    /// Coefficient of `w^i w̄^j`; zero outside the stored triangle.
    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        if i + j > self.order {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[index(i, j)]
        }
    }

    /// Iterates `(i, j, c)` over the stored triangle, shell by shell.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..=self.order).flat_map(move |n| (0..=n).map(move |j| (n - j, j, self.coeffs[index(n - j, j)])))
    }

    fn detect_flags(&self) -> SeriesFlags {
        let real = self
            .terms()
            .all(|(i, j, c)| c == self.coeff(j, i).conj());
        let holomorphic = self.terms().all(|(_, j, c)| j == 0 || c == Complex64::new(0.0, 0.0));
        SeriesFlags { real, holomorphic }
    }

    /// Adds any symmetry that holds exactly but was not implied by the operands.
    fn refine_flags(&mut self) {
        let detected = self.detect_flags();
        self.flags.real |= detected.real;
        self.flags.holomorphic |= detected.holomorphic;
    }

    /// Re-imposes the claimed symmetries exactly after floating point work.
    fn enforce_flags(&mut self) {
        if self.flags.holomorphic {
            for n in 1..=self.order {
                for j in 1..=n {
                    self.coeffs[index(n - j, j)] = Complex64::new(0.0, 0.0);
                }
            }
        }
        if self.flags.real {
            for n in 0..=self.order {
                for j in 0..=n / 2 {
                    let i = n - j;
                    let a = self.coeffs[index(i, j)];
                    let b = self.coeffs[index(j, i)];
                    let sym = (a + b.conj()) * 0.5;
                    self.coeffs[index(i, j)] = sym;
                    self.coeffs[index(j, i)] = sym.conj();
                }
            }
        }
    }

    fn merged_hint(&self, other: &BiSeries) -> Option<f64> {
        match (self.radius_hint, other.radius_hint) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Drops every term of total degree above `order`.
    pub fn truncate(&self, order: usize) -> BiSeries {
        if order >= self.order {
            return self.clone();
        }
        let mut s = BiSeries::raw(order, self.coeffs[..len_for(order)].to_vec(), self.flags);
        s.radius_hint = self.radius_hint;
        s
    }

    fn zip_with(&self, other: &BiSeries, f: impl Fn(Complex64, Complex64) -> Complex64) -> BiSeries {
        let order = self.order.min(other.order);
        let coeffs = (0..len_for(order))
            .map(|k| f(self.coeffs[k], other.coeffs[k]))
            .collect();
        let mut s = BiSeries::raw(order, coeffs, self.flags.both(other.flags));
        s.radius_hint = self.merged_hint(other);
        s.refine_flags();
        s
    }

    fn map_coeffs(&self, flags: SeriesFlags, f: impl Fn(Complex64) -> Complex64) -> BiSeries {
        let mut s = BiSeries::raw(self.order, self.coeffs.iter().map(|c| f(*c)).collect(), flags);
        s.radius_hint = self.radius_hint;
        s
    }

    pub fn scale(&self, factor: Complex64) -> BiSeries {
        let flags = SeriesFlags {
            real: self.flags.real && factor.im == 0.0,
            holomorphic: self.flags.holomorphic,
        };
        self.map_coeffs(flags, |c| c * factor)
    }

    pub fn scale_real(&self, factor: f64) -> BiSeries {
        self.map_coeffs(self.flags, |c| c * factor)
    }

    /// Adds a constant to the `(0, 0)` coefficient.
    pub fn add_constant(&self, value: Complex64) -> BiSeries {
        let mut out = self.clone();
        out.coeffs[0] += value;
        out.flags.real = self.flags.real && value.im == 0.0;
        out
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &BiSeries) -> BiSeries {
        let order = self.order.min(other.order);
        let mut out = vec![Complex64::new(0.0, 0.0); len_for(order)];
        for n1 in 0..=order {
            for j1 in 0..=n1 {
                let i1 = n1 - j1;
                let a = self.coeffs[index(i1, j1)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for n2 in 0..=(order - n1) {
                    let base = shell_start(n1 + n2) + j1;
                    let src = shell_start(n2);
                    for j2 in 0..=n2 {
                        out[base + j2] += a * other.coeffs[src + j2];
                    }
                }
            }
        }
        let mut s = BiSeries::raw(order, out, self.flags.both(other.flags));
        s.radius_hint = self.merged_hint(other);
        s.refine_flags();
        s
    }

    /// `k`-th power by repeated squaring.
    pub fn powi(&self, k: u32) -> BiSeries {
        let mut result = BiSeries::one(self.order);
        result.radius_hint = self.radius_hint;
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Complex conjugate: `c'(i, j) = conj(c(j, i))`.
    pub fn conj(&self) -> BiSeries {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        for (i, j, c) in self.terms() {
            coeffs[index(j, i)] = c.conj();
        }
        let is_zero = self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0));
        let only_constant = self.coeffs.iter().skip(1).all(|c| *c == Complex64::new(0.0, 0.0));
        let flags = SeriesFlags {
            real: self.flags.real,
            holomorphic: is_zero || (self.flags.holomorphic && only_constant),
        };
        let mut s = BiSeries::raw(self.order, coeffs, flags);
        s.radius_hint = self.radius_hint;
        s
    }

    /// `(s + conj s) / 2`.
    pub fn real_part(&self) -> BiSeries {
        let mut s = (self + &self.conj()).scale_real(0.5);
        s.flags = SeriesFlags {
            real: true,
            holomorphic: s.flags.holomorphic,
        };
        s.enforce_flags();
        s
    }

    /// Exact Wirtinger derivative; the order drops by one.
    pub fn derive(&self, direction: Direction) -> BiSeries {
        let order = self.order.saturating_sub(1);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len_for(order)];
        if self.order > 0 {
            for n in 0..=order {
                for j in 0..=n {
                    let i = n - j;
                    coeffs[index(i, j)] = match direction {
                        Direction::W => self.coeff(i + 1, j) * (i + 1) as f64,
                        Direction::WBar => self.coeff(i, j + 1) * (j + 1) as f64,
                    };
                }
            }
        }
        let holomorphic = match direction {
            Direction::W => self.flags.holomorphic,
            Direction::WBar => true,
        };
        let flags = SeriesFlags {
            real: false,
            holomorphic: holomorphic && (direction == Direction::W || self.flags.holomorphic),
        };
        let mut s = BiSeries::raw(order, coeffs, flags);
        s.radius_hint = self.radius_hint;
        if direction == Direction::WBar && self.flags.holomorphic {
            s.flags.real = true;
        }
        s
    }

    /// Convenience for `∂_w̄ ∂_w`.
    pub fn laplace_quarter(&self) -> BiSeries {
        self.derive(Direction::W).derive(Direction::WBar)
    }

    /// Term-by-term antiderivative in `w̄` with zero integration constant:
    /// `c(i, j) w^i w̄^j ↦ c(i, j)/(j+1) w^i w̄^(j+1)`. Degree-`N` terms fall off.
    pub fn int_wbar(&self) -> BiSeries {
        let order = self.order;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len_for(order)];
        for (i, j, c) in self.terms() {
            if i + j < order {
                coeffs[index(i, j + 1)] = c / (j + 1) as f64;
            }
        }
        let mut s = BiSeries::raw(order, coeffs, SeriesFlags::default());
        s.radius_hint = self.radius_hint;
        s
    }

    /// Term-by-term antiderivative in `w` with zero integration constant.
    pub fn int_w(&self) -> BiSeries {
        let order = self.order;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len_for(order)];
        for (i, j, c) in self.terms() {
            if i + j < order {
                coeffs[index(i + 1, j)] = c / (i + 1) as f64;
            }
        }
        let flags = SeriesFlags {
            real: false,
            holomorphic: self.flags.holomorphic,
        };
        let mut s = BiSeries::raw(order, coeffs, flags);
        s.radius_hint = self.radius_hint;
        s
    }

    /// Particular solution `d` of `∂_w̄ ∂_w d = s`: coefficient
    /// `s(i, j) / ((i+1)(j+1))` at `(i+1, j+1)`. Terms that would exceed the
    /// order are dropped; all harmonic additions are zero.
    pub fn int_mixed(&self) -> BiSeries {
        let order = self.order;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len_for(order)];
        for (i, j, c) in self.terms() {
            if i + j + 2 <= order {
                coeffs[index(i + 1, j + 1)] = c / ((i + 1) * (j + 1)) as f64;
            }
        }
        let flags = SeriesFlags {
            real: self.flags.real,
            holomorphic: false,
        };
        let mut s = BiSeries::raw(order, coeffs, flags);
        s.radius_hint = self.radius_hint;
        s
    }

    /// `e^s = e^{s(0,0)} Σ_{k<=N} (s - s(0,0))^k / k!`.
    pub fn exp(&self) -> BiSeries {
        let c0 = self.coeffs[0];
        let nil = self.add_constant(-c0);
        let mut term = BiSeries::one(self.order);
        let mut sum = BiSeries::one(self.order);
        for k in 1..=self.order {
            term = term.mul(&nil).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        let mut out = sum.scale(c0.exp());
        out.flags = self.flags;
        out.radius_hint = self.radius_hint;
        out.enforce_flags();
        out
    }

    /// Principal logarithm anchored at `s(0,0)`:
    /// `ln s = ln s(0,0) + Σ_{k<=N} (-1)^(k+1) y^k / k` with `y = s/s(0,0) - 1`.
    pub fn ln(&self) -> Result<BiSeries, SeriesError> {
        let c0 = self.coeffs[0];
        if c0.norm() == 0.0 {
            return Err(SeriesError::VanishingConstant);
        }
        let y = self.scale(c0.inv()).add_constant(Complex64::new(-1.0, 0.0));
        let mut power = BiSeries::one(self.order);
        let mut sum = BiSeries::zero(self.order);
        for k in 1..=self.order {
            power = power.mul(&y);
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sum = &sum + &power.scale_real(sign / k as f64);
        }
        let mut out = sum.add_constant(c0.ln());
        out.flags = SeriesFlags {
            real: self.flags.real && c0.re > 0.0,
            holomorphic: self.flags.holomorphic,
        };
        out.radius_hint = self.radius_hint;
        out.enforce_flags();
        Ok(out)
    }

    /// Multiplicative inverse by the shell recursion
    /// `r(i, j) = -(1/s₀) Σ_{(k,l) ≠ (0,0)} s(k, l) r(i-k, j-l)`.
    pub fn recip(&self) -> Result<BiSeries, SeriesError> {
        let c0 = self.coeffs[0];
        if c0.norm() == 0.0 {
            return Err(SeriesError::VanishingConstant);
        }
        let inv0 = c0.inv();
        let mut r = vec![Complex64::new(0.0, 0.0); len_for(self.order)];
        r[0] = inv0;
        for n in 1..=self.order {
            for j in 0..=n {
                let i = n - j;
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..=j {
                    for k in 0..=i {
                        if k + l == 0 {
                            continue;
                        }
                        acc += self.coeffs[index(k, l)] * r[index(i - k, j - l)];
                    }
                }
                r[index(i, j)] = -acc * inv0;
            }
        }
        let mut out = BiSeries::raw(self.order, r, self.flags);
        out.radius_hint = self.radius_hint;
        Ok(out)
    }

    /// Substitutes `w ↦ λ w`: coefficient `(i, j)` is multiplied by `λ^(i+j)`.
    pub fn dilate(&self, lambda: f64) -> BiSeries {
        let mut coeffs = self.coeffs.clone();
        let mut factor = 1.0;
        for n in 0..=self.order {
            for j in 0..=n {
                coeffs[index(n - j, j)] *= factor;
            }
            factor *= lambda;
        }
        let mut s = BiSeries::raw(self.order, coeffs, self.flags);
        s.radius_hint = self.radius_hint.map(|r| r / lambda.abs());
        s
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient magnitude up to total degree `order`.
    pub fn max_abs_through(&self, order: usize) -> f64 {
        let end = len_for(order.min(self.order));
        self.coeffs[..end].iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficientwise max distance over the common triangle.
    pub fn max_abs_diff(&self, other: &BiSeries) -> f64 {
        let order = self.order.min(other.order);
        (0..len_for(order))
            .map(|k| (self.coeffs[k] - other.coeffs[k]).norm())
            .fold(0.0, f64::max)
    }

    fn check_radius(&self, w: Complex64) -> Result<(), SeriesError> {
        if let Some(r) = self.radius_hint {
            if w.norm() >= r {
                return Err(SeriesError::OutOfRadius {
                    modulus: w.norm(),
                    radius: r,
                });
            }
        }
        Ok(())
    }

    /// Finite sum `Σ c(i, j) w^i w̄^j`. Real series are summed in conjugate
    /// pairs so the imaginary part is exactly zero.
    pub fn evaluate(&self, w: Complex64) -> Result<Complex64, SeriesError> {
        self.check_radius(w)?;
        Ok(self.sum_at(w))
    }

    pub(crate) fn sum_at(&self, w: Complex64) -> Complex64 {
        let n = self.order;
        let mut wp = Vec::with_capacity(n + 1);
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..=n {
            wp.push(acc);
            acc *= w;
        }
        let wbp: Vec<Complex64> = wp.iter().map(|z| z.conj()).collect();
        if self.flags.real {
            let mut total = 0.0;
            for k in 0..=n {
                for j in 0..=k / 2 {
                    let i = k - j;
                    let c = self.coeffs[index(i, j)];
                    let t = c * wp[i] * wbp[j];
                    if i == j {
                        total += t.re;
                    } else {
                        total += 2.0 * t.re;
                    }
                }
            }
            Complex64::new(total, 0.0)
        } else if self.flags.holomorphic {
            // Horner in w
            let mut v = Complex64::new(0.0, 0.0);
            for i in (0..=n).rev() {
                v = v * w + self.coeffs[index(i, 0)];
            }
            v
        } else {
            let mut v = Complex64::new(0.0, 0.0);
            for (i, j, c) in self.terms() {
                v += c * wp[i] * wbp[j];
            }
            v
        }
    }

    /// Value plus a geometric estimate of the neglected tail built from the
    /// last two stored shells and the ratio `|w| / radius_hint`.
    pub fn evaluate_with_bound(&self, w: Complex64) -> Result<Evaluation, SeriesError> {
        let value = self.evaluate(w)?;
        let tail_bound = self.radius_hint.map(|r| {
            let q = w.norm() / r;
            let shell = |n: usize| -> f64 {
                (0..=n)
                    .map(|j| self.coeffs[index(n - j, j)].norm())
                    .sum::<f64>()
                    * w.norm().powi(n as i32)
            };
            let last = shell(self.order);
            let prev = if self.order > 0 { shell(self.order - 1) * q } else { 0.0 };
            last.max(prev) * q / (1.0 - q)
        });
        Ok(Evaluation { value, tail_bound })
    }

    pub fn records(&self) -> Vec<SeriesRecord> {
        self.terms()
            .map(|(i, j, c)| SeriesRecord { i, j, re: c.re, im: c.im })
            .collect()
    }

    /// Inverse of [`records`](Self::records); the order is the largest total degree present.
    pub fn from_records(records: &[SeriesRecord]) -> BiSeries {
        let order = records.iter().map(|r| r.i + r.j).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len_for(order)];
        for r in records {
            coeffs[index(r.i, r.j)] = Complex64::new(r.re, r.im);
        }
        let mut s = BiSeries {
            order,
            coeffs,
            radius_hint: None,
            flags: SeriesFlags::default(),
        };
        s.flags = s.detect_flags();
        s
    }
}

impl Add for &BiSeries {
    type Output = BiSeries;
    fn add(self, rhs: &BiSeries) -> BiSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &BiSeries {
    type Output = BiSeries;
    fn sub(self, rhs: &BiSeries) -> BiSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &BiSeries {
    type Output = BiSeries;
    fn mul(self, rhs: &BiSeries) -> BiSeries {
        BiSeries::mul(self, rhs)
    }
}

impl Neg for &BiSeries {
    type Output = BiSeries;
    fn neg(self) -> BiSeries {
        self.scale_real(-1.0)
    }
}

impl Add for BiSeries {
    type Output = BiSeries;
    fn add(self, rhs: BiSeries) -> BiSeries {
        &self + &rhs
    }
}

impl Sub for BiSeries {
    type Output = BiSeries;
    fn sub(self, rhs: BiSeries) -> BiSeries {
        &self - &rhs
    }
}

impl Neg for BiSeries {
    type Output = BiSeries;
    fn neg(self) -> BiSeries {
        -&self
    }
}

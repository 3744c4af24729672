//! Polynomials in `(z, z̄)` whose coefficients are [`BiSeries`] in `(w, w̄)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::SeriesError;
use crate::series::{BiSeries, Direction};

#[inline]
fn index(p: usize, q: usize) -> usize {
    let n = p + q;
    n * (n + 1) / 2 + q
}

/// `Σ entry(p, q) z^p z̄^q` with `p + q <= degree`.
///
/// The potential and the metric entries have degree at most 2; products such
/// as Christoffel symbols reach degree 3, so the bound is a field parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct ZPolyField {
    degree: usize,
    entries: Vec<BiSeries>,
}

impl ZPolyField {
    pub fn zero(degree: usize, order: usize) -> Self {
        let len = (degree + 1) * (degree + 2) / 2;
        ZPolyField {
            degree,
            entries: vec![BiSeries::zero(order); len],
        }
    }

    /// A field with only a `z^0 z̄^0` entry.
    pub fn from_series(s: BiSeries) -> Self {
        ZPolyField {
            degree: 0,
            entries: vec![s],
        }
    }

    /// Builds a field from `(p, q, series)` triples; missing entries are zero.
    pub fn from_entries(order: usize, entries: impl IntoIterator<Item = (usize, usize, BiSeries)>) -> Self {
        let items: Vec<_> = entries.into_iter().collect();
        let degree = items.iter().map(|(p, q, _)| p + q).max().unwrap_or(0);
        let mut f = ZPolyField::zero(degree, order);
        for (p, q, s) in items {
            f.entries[index(p, q)] = s;
        }
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Smallest truncation order among the entries.
    pub fn order(&self) -> usize {
        self.entries.iter().map(BiSeries::order).min().unwrap_or(0)
    }

    /// Coefficient series of `z^p z̄^q`, or `None` beyond the degree bound.
    pub fn entry(&self, p: usize, q: usize) -> Option<&BiSeries> {
        if p + q > self.degree {
            None
        } else {
            Some(&self.entries[index(p, q)])
        }
    }

    /// Like [`entry`](Self::entry) but yields a zero series beyond the degree bound.
    pub fn entry_or_zero(&self, p: usize, q: usize) -> BiSeries {
        self.entry(p, q)
            .cloned()
            .unwrap_or_else(|| BiSeries::zero(self.order()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &BiSeries)> + '_ {
        (0..=self.degree).flat_map(move |n| (0..=n).map(move |q| (n - q, q, &self.entries[index(n - q, q)])))
    }

    fn map(&self, f: impl Fn(&BiSeries) -> BiSeries) -> ZPolyField {
        ZPolyField {
            degree: self.degree,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &ZPolyField, f: impl Fn(&BiSeries, &BiSeries) -> BiSeries) -> ZPolyField {
        let degree = self.degree.max(other.degree);
        let order = self.order().min(other.order());
        let zero = BiSeries::zero(order);
        let mut out = ZPolyField::zero(degree, order);
        for n in 0..=degree {
            for q in 0..=n {
                let p = n - q;
                let a = self.entry(p, q).unwrap_or(&zero);
                let b = other.entry(p, q).unwrap_or(&zero);
                out.entries[index(p, q)] = f(a, b);
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> ZPolyField {
        self.map(|s| s.scale(factor))
    }

    /// Multiplies every entry by a series in `w` alone.
    pub fn mul_series(&self, s: &BiSeries) -> ZPolyField {
        self.map(|e| e.mul(s))
    }

    pub fn mul(&self, other: &ZPolyField) -> ZPolyField {
        let degree = self.degree + other.degree;
        let order = self.order().min(other.order());
        let mut out = ZPolyField::zero(degree, order);
        for (p1, q1, s) in self.terms() {
            if s.max_abs() == 0.0 {
                continue;
            }
            for (p2, q2, t) in other.terms() {
                if t.max_abs() == 0.0 {
                    continue;
                }
                let k = index(p1 + p2, q1 + q2);
                out.entries[k] = &out.entries[k] + &s.mul(t);
            }
        }
        out
    }

    /// Pointwise complex conjugate: `z^p z̄^q` terms move to `z^q z̄^p`.
    pub fn conj(&self) -> ZPolyField {
        let mut out = ZPolyField::zero(self.degree, self.order());
        for (p, q, s) in self.terms() {
            out.entries[index(q, p)] = s.conj();
        }
        out
    }

    pub fn d_z(&self) -> ZPolyField {
        let mut out = ZPolyField::zero(self.degree.saturating_sub(1), self.order());
        for (p, q, s) in self.terms() {
            if p > 0 {
                out.entries[index(p - 1, q)] = s.scale_real(p as f64);
            }
        }
        out
    }

    pub fn d_zbar(&self) -> ZPolyField {
        let mut out = ZPolyField::zero(self.degree.saturating_sub(1), self.order());
        for (p, q, s) in self.terms() {
            if q > 0 {
                out.entries[index(p, q - 1)] = s.scale_real(q as f64);
            }
        }
        out
    }

    pub fn d_w(&self) -> ZPolyField {
        self.map(|s| s.derive(Direction::W))
    }

    pub fn d_wbar(&self) -> ZPolyField {
        self.map(|s| s.derive(Direction::WBar))
    }

    /// Truncates every entry to total `w`-degree `order`.
    pub fn truncate(&self, order: usize) -> ZPolyField {
        self.map(|s| s.truncate(order))
    }

    pub fn evaluate(&self, z: Complex64, w: Complex64) -> Result<Complex64, SeriesError> {
        let zb = z.conj();
        let mut total = Complex64::new(0.0, 0.0);
        for (p, q, s) in self.terms() {
            total += s.evaluate(w)? * z.powu(p as u32) * zb.powu(q as u32);
        }
        Ok(total)
    }

    /// Largest coefficient magnitude over all entries.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(BiSeries::max_abs).fold(0.0, f64::max)
    }

    /// Largest coefficient magnitude over all entries up to `w`-degree `order`.
    pub fn max_abs_through(&self, order: usize) -> f64 {
        self.entries
            .iter()
            .map(|s| s.max_abs_through(order))
            .fold(0.0, f64::max)
    }

    /// Largest coefficientwise distance over the common support.
    pub fn max_abs_diff(&self, other: &ZPolyField) -> f64 {
        (self - other).max_abs()
    }

    /// True when `entry(p, q) = conj(entry(q, p))` for every stored pair.
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms().all(|(p, q, s)| {
            self.entry(q, p)
                .map_or(s.max_abs() <= tol, |t| s.max_abs_diff(&t.conj()) <= tol)
        })
    }
}

impl Add for &ZPolyField {
    type Output = ZPolyField;
    fn add(self, rhs: &ZPolyField) -> ZPolyField {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &ZPolyField {
    type Output = ZPolyField;
    fn sub(self, rhs: &ZPolyField) -> ZPolyField {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for &ZPolyField {
    type Output = ZPolyField;
    fn mul(self, rhs: &ZPolyField) -> ZPolyField {
        ZPolyField::mul(self, rhs)
    }
}

impl Neg for &ZPolyField {
    type Output = ZPolyField;
    fn neg(self) -> ZPolyField {
        self.map(|s| -s)
    }
}

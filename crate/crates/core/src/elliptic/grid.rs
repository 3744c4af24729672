use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::LabError;

/// Disc, ball or interval of radius `radius` centred at the origin in `ℝ^dim`,
/// sampled on the lattice `h ℤ^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub h: f64,
    pub radius: f64,
}

impl GridSpec {
    pub fn new(dim: usize, h: f64, radius: f64) -> Result<Self, LabError> {
        if !(1..=3).contains(&dim) {
            return Err(LabError::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !(h > 0.0) || !(radius > 0.0) {
            return Err(LabError::InvalidGrid("spacing and radius must be positive".into()));
        }
        let ratio = radius / h;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
            return Err(LabError::InvalidGrid(format!(
                "spacing {h} does not divide radius {radius}"
            )));
        }
        Ok(GridSpec { dim, h, radius })
    }

    /// Lattice points per half-axis, `R / h`.
    pub fn n(&self) -> usize {
        (self.radius / self.h).round() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    Interior,
    /// Not interior, but an axis neighbour of an interior point; carries Dirichlet data.
    Boundary,
    Outside,
}

/// Lattice box `[-n, n]^dim` with each point classified.
#[derive(Debug, PartialEq)]
pub struct Lattice {
    spec: GridSpec,
    side: usize,
    strides: [usize; 3],
    kinds: Vec<PointKind>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
}

impl Lattice {
    pub fn new(spec: GridSpec) -> Arc<Lattice> {
        let n = spec.n();
        let side = 2 * n + 1;
        let strides = [1, side, side * side];
        let len = side.pow(spec.dim as u32);
        let r2 = spec.radius * spec.radius;
        let tol = 1e-9 * spec.h * spec.h;
        let mut kinds = vec![PointKind::Outside; len];
        let mut interior = Vec::new();
        for (idx, kind) in kinds.iter_mut().enumerate() {
            let x = coords_of(idx, spec, side);
            let m2: f64 = x.iter().map(|v| v * v).sum();
            if m2 < r2 - tol {
                *kind = PointKind::Interior;
                interior.push(idx);
            }
        }
        let mut boundary = Vec::new();
        for &idx in &interior {
            let pos = position(idx, side);
            for axis in 0..spec.dim {
                for dir in [-1i64, 1] {
                    let p = pos[axis] as i64 + dir;
                    if p < 0 || p >= side as i64 {
                        continue;
                    }
                    let nb = (idx as i64 + dir * strides[axis] as i64) as usize;
                    if kinds[nb] == PointKind::Outside {
                        kinds[nb] = PointKind::Boundary;
                        boundary.push(nb);
                    }
                }
            }
        }
        boundary.sort_unstable();
        Arc::new(Lattice {
            spec,
            side,
            strides,
            kinds,
            interior,
            boundary,
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kind(&self, idx: usize) -> PointKind {
        self.kinds[idx]
    }

    /// Interior point indices in lexicographic order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn coords(&self, idx: usize) -> [f64; 3] {
        coords_of(idx, self.spec, self.side)
    }

    /// Index of the lattice point nearest to `x`.
    pub fn nearest(&self, x: [f64; 3]) -> Option<usize> {
        let n = self.spec.n() as i64;
        let mut idx = 0usize;
        for (xa, stride) in x.iter().zip(&self.strides).take(self.spec.dim) {
            let i = (xa / self.spec.h).round() as i64;
            if i.abs() > n {
                return None;
            }
            idx += (i + n) as usize * stride;
        }
        Some(idx)
    }
}

fn position(idx: usize, side: usize) -> [usize; 3] {
    [idx % side, (idx / side) % side, idx / (side * side)]
}

fn coords_of(idx: usize, spec: GridSpec, side: usize) -> [f64; 3] {
    let n = spec.n() as f64;
    let pos = position(idx, side);
    let mut x = [0.0; 3];
    for axis in 0..spec.dim {
        x[axis] = (pos[axis] as f64 - n) * spec.h;
    }
    x
}

/// Real field on a [`Lattice`]. Values are meaningful at interior and boundary
/// points; derived quantities such as the Laplacian are meaningful at interior points only.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid {
    lattice: Arc<Lattice>,
    values: Vec<f64>,
}

impl ScalarGrid {
    pub fn zeros(lattice: &Arc<Lattice>) -> Self {
        ScalarGrid {
            lattice: Arc::clone(lattice),
            values: vec![0.0; lattice.len()],
        }
    }

    /// Samples `f` at interior and boundary points.
    pub fn from_fn(lattice: &Arc<Lattice>, f: impl Fn([f64; 3]) -> f64) -> Self {
        let mut g = ScalarGrid::zeros(lattice);
        for idx in lattice.interior().iter().chain(lattice.boundary()) {
            g.values[*idx] = f(lattice.coords(*idx));
        }
        g
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn spec(&self) -> GridSpec {
        self.lattice.spec()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn at(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// Value at the lattice point nearest to `x`.
    pub fn sample(&self, x: [f64; 3]) -> Option<f64> {
        self.lattice.nearest(x).map(|i| self.values[i])
    }

    /// Pointwise map over interior and boundary points.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarGrid {
        let mut g = ScalarGrid::zeros(&self.lattice);
        for &idx in self.lattice.interior().iter().chain(self.lattice.boundary()) {
            g.values[idx] = f(self.values[idx]);
        }
        g
    }

    /// Pointwise combination over interior and boundary points.
    pub fn zip(&self, other: &ScalarGrid, f: impl Fn(f64, f64) -> f64) -> ScalarGrid {
        let mut g = ScalarGrid::zeros(&self.lattice);
        for &idx in self.lattice.interior().iter().chain(self.lattice.boundary()) {
            g.values[idx] = f(self.values[idx], other.values[idx]);
        }
        g
    }

    /// Central second-difference Laplacian at interior points.
    pub fn laplacian(&self) -> ScalarGrid {
        let h2 = self.spec().h * self.spec().h;
        let dim = self.spec().dim;
        let mut g = ScalarGrid::zeros(&self.lattice);
        for &idx in self.lattice.interior() {
            let mut acc = -2.0 * dim as f64 * self.values[idx];
            for axis in 0..dim {
                let s = self.lattice.stride(axis);
                acc += self.values[idx + s] + self.values[idx - s];
            }
            g.values[idx] = acc / h2;
        }
        g
    }

    /// Central first difference along `axis` at interior points.
    pub fn gradient(&self, axis: usize) -> ScalarGrid {
        let h = self.spec().h;
        let s = self.lattice.stride(axis);
        let mut g = ScalarGrid::zeros(&self.lattice);
        for &idx in self.lattice.interior() {
            g.values[idx] = (self.values[idx + s] - self.values[idx - s]) / (2.0 * h);
        }
        g
    }

    pub fn gradients(&self) -> Vec<ScalarGrid> {
        (0..self.spec().dim).map(|a| self.gradient(a)).collect()
    }

    pub fn max_abs_interior(&self) -> f64 {
        self.lattice
            .interior()
            .iter()
            .map(|&i| self.values[i].abs())
            .fold(0.0, f64::max)
    }

    pub fn min_interior(&self) -> f64 {
        self.lattice
            .interior()
            .iter()
            .map(|&i| self.values[i])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff_interior(&self, other: &ScalarGrid) -> f64 {
        self.lattice
            .interior()
            .iter()
            .map(|&i| (self.values[i] - other.values[i]).abs())
            .fold(0.0, f64::max)
    }

    /// `(coordinates, value)` for every interior and boundary point, in index order.
    pub fn rows(&self) -> Vec<([f64; 3], f64)> {
        let mut idx: Vec<usize> = self
            .lattice
            .interior()
            .iter()
            .chain(self.lattice.boundary())
            .copied()
            .collect();
        idx.sort_unstable();
        idx.into_iter()
            .map(|i| (self.lattice.coords(i), self.values[i]))
            .collect()
    }
}

/// Complex field stored as a pair of real grids.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGrid {
    pub re: ScalarGrid,
    pub im: ScalarGrid,
}

impl ComplexGrid {
    pub fn zeros(lattice: &Arc<Lattice>) -> Self {
        ComplexGrid {
            re: ScalarGrid::zeros(lattice),
            im: ScalarGrid::zeros(lattice),
        }
    }

    pub fn from_fn(lattice: &Arc<Lattice>, f: impl Fn([f64; 3]) -> Complex64) -> Self {
        ComplexGrid {
            re: ScalarGrid::from_fn(lattice, |x| f(x).re),
            im: ScalarGrid::from_fn(lattice, |x| f(x).im),
        }
    }

    pub fn at(&self, idx: usize) -> Complex64 {
        Complex64::new(self.re.at(idx), self.im.at(idx))
    }

    /// `∂_w = (∂_x - i∂_y)/2` by central differences.
    pub fn d_w(&self) -> ComplexGrid {
        self.wirtinger(-1.0)
    }

    /// `∂_w̄ = (∂_x + i∂_y)/2` by central differences.
    pub fn d_wbar(&self) -> ComplexGrid {
        self.wirtinger(1.0)
    }

    fn wirtinger(&self, sign: f64) -> ComplexGrid {
        let (rx, ry) = (self.re.gradient(0), self.re.gradient(1));
        let (ix, iy) = (self.im.gradient(0), self.im.gradient(1));
        // (f_x + sign·i f_y)/2 with f = re + i im
        ComplexGrid {
            re: rx.zip(&iy, |a, b| 0.5 * (a - sign * b)),
            im: ix.zip(&ry, |a, b| 0.5 * (a + sign * b)),
        }
    }

    pub fn laplacian(&self) -> ComplexGrid {
        ComplexGrid {
            re: self.re.laplacian(),
            im: self.im.laplacian(),
        }
    }

    pub fn max_abs_interior(&self) -> f64 {
        self.re
            .lattice()
            .interior()
            .iter()
            .map(|&i| self.at(i).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff_interior(&self, other: &ComplexGrid) -> f64 {
        self.re
            .lattice()
            .interior()
            .iter()
            .map(|&i| (self.at(i) - other.at(i)).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let lat = Lattice::new(GridSpec::new(2, 0.25, 1.0).unwrap());
        assert_eq!(lat.len(), 81);
        // |i| + |j| grid points strictly inside the unit disc
        let inside = (-4i32..=4)
            .flat_map(|i| (-4i32..=4).map(move |j| (i, j)))
            .filter(|(i, j)| i * i + j * j < 16)
            .count();
        assert_eq!(lat.interior().len(), inside);
        assert!(lat.boundary().iter().all(|&b| {
            let x = lat.coords(b);
            x[0] * x[0] + x[1] * x[1] >= 1.0 - 1e-12
        }));
        assert!(GridSpec::new(2, 0.3, 1.0).is_err());
        let line = Lattice::new(GridSpec::new(1, 0.5, 1.0).unwrap());
        assert_eq!(line.interior().len(), 3);
        assert_eq!(line.boundary().len(), 2);
    }

    #[test]
    fn stencil_exact_on_quadratics() {
        let lat = Lattice::new(GridSpec::new(2, 1.0 / 16.0, 1.0).unwrap());
        let g = ScalarGrid::from_fn(&lat, |x| x[0] * x[0] + x[1] * x[1]);
        let lap = g.laplacian();
        for &i in lat.interior() {
            assert!((lap.at(i) - 4.0).abs() < 1e-10);
        }
        let lin = ScalarGrid::from_fn(&lat, |x| x[0]);
        assert!(lin.laplacian().max_abs_interior() < 1e-12);
    }

    #[test]
    fn wirtinger_of_conjugate_coordinate() {
        let lat = Lattice::new(GridSpec::new(2, 0.125, 1.0).unwrap());
        // f = w̄ w̄: ∂_w̄ f = 2w̄, ∂_w f = 0
        let f = ComplexGrid::from_fn(&lat, |x| {
            let wb = Complex64::new(x[0], -x[1]);
            wb * wb
        });
        let dwb = f.d_wbar();
        let dw = f.d_w();
        for &i in lat.interior() {
            let x = lat.coords(i);
            let wb = Complex64::new(x[0], -x[1]);
            assert!((dwb.at(i) - wb * 2.0).norm() < 1e-12);
            assert!(dw.at(i).norm() < 1e-12);
        }
    }
}

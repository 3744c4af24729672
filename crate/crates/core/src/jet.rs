//! Second-order forward-mode jets: a value with its first two derivatives in one real variable.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl Jet {
    pub fn constant(v: Complex64) -> Jet {
        let zero = Complex64::new(0.0, 0.0);
        Jet { v, d1: zero, d2: zero }
    }

    pub fn real(v: f64) -> Jet {
        Jet::constant(Complex64::new(v, 0.0))
    }

    /// The independent variable at `t`.
    pub fn variable(t: f64) -> Jet {
        Jet {
            v: Complex64::new(t, 0.0),
            d1: Complex64::new(1.0, 0.0),
            d2: Complex64::new(0.0, 0.0),
        }
    }

    /// Applies a scalar function given its value and first two derivatives at `self.v`.
    fn chain(self, f: Complex64, f1: Complex64, f2: Complex64) -> Jet {
        Jet {
            v: f,
            d1: f1 * self.d1,
            d2: f2 * self.d1 * self.d1 + f1 * self.d2,
        }
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Jet {
        let inv = self.v.inv();
        self.chain(self.v.ln(), inv, -inv * inv)
    }

    pub fn sin(self) -> Jet {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Jet {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }

    pub fn recip(self) -> Jet {
        let inv = self.v.inv();
        self.chain(inv, -inv * inv, inv * inv * inv * 2.0)
    }

    pub fn tan(self) -> Jet {
        self.sin() / self.cos()
    }

    pub fn sec(self) -> Jet {
        self.cos().recip()
    }

    pub fn powi(self, n: i32) -> Jet {
        let nf = n as f64;
        let f = self.v.powi(n);
        let f1 = self.v.powi(n - 1) * nf;
        let f2 = self.v.powi(n - 2) * (nf * (nf - 1.0));
        self.chain(f, f1, f2)
    }

    pub fn conj(self) -> Jet {
        Jet {
            v: self.v.conj(),
            d1: self.d1.conj(),
            d2: self.d2.conj(),
        }
    }

    pub fn scale(self, s: Complex64) -> Jet {
        Jet {
            v: self.v * s,
            d1: self.d1 * s,
            d2: self.d2 * s,
        }
    }

    pub fn scale_real(self, s: f64) -> Jet {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        [self.v, self.d1, self.d2]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet {
            v: self.v - o.v,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale_real(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + self.d1 * o.d1 * 2.0 + self.v * o.d2,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, o: f64) -> Jet {
        self + Jet::real(o)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, o: f64) -> Jet {
        self - Jet::real(o)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, o: f64) -> Jet {
        self.scale_real(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_composites() {
        let t = 0.3;
        let x = Jet::variable(t);
        let f = (x * 2.0).exp() * x.sin();
        // d/dt e^{2t} sin t = e^{2t}(2 sin t + cos t)
        let e = (2.0 * t).exp();
        assert!((f.d1.re - e * (2.0 * t.sin() + t.cos())).abs() < 1e-14);
        assert!((f.d2.re - e * (3.0 * t.sin() + 4.0 * t.cos())).abs() < 1e-13);
        let g = x.tan();
        let sec2 = 1.0 / (t.cos() * t.cos());
        assert!((g.d1.re - sec2).abs() < 1e-14);
        assert!((g.d2.re - 2.0 * sec2 * t.tan()).abs() < 1e-13);
        let h = x.powi(3).recip();
        assert!((h.d2.re - 12.0 / t.powi(5)).abs() < 1e-9);
    }
}

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Second-order truncated Taylor jet in `D` variables: value, gradient and
/// Hessian, propagated through arithmetic by the chain rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<const D: usize> {
    pub value: f64,
    pub grad: [f64; D],
    pub hess: [[f64; D]; D],
}

impl<const D: usize> Jet2<D> {
    pub fn constant(value: f64) -> Self {
        Self {
            value,
            grad: [0.0; D],
            hess: [[0.0; D]; D],
        }
    }

    /// The coordinate function `x_index` at `value`.
    pub fn variable(value: f64, index: usize) -> Self {
        let mut jet = Self::constant(value);
        jet.grad[index] = 1.0;
        jet
    }

    /// Seeds all coordinates of a point.
    pub fn seed(point: &[f64; D]) -> [Self; D] {
        std::array::from_fn(|i| Self::variable(point[i], i))
    }

    /// `f(self)` given `f`, `f'` and `f''` at `self.value`.
    pub fn compose(&self, f: f64, df: f64, ddf: f64) -> Self {
        let mut out = Self::constant(f);
        for i in 0..D {
            out.grad[i] = df * self.grad[i];
            for j in 0..D {
                out.hess[i][j] = df * self.hess[i][j] + ddf * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let x = self.value;
        self.compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn powi(&self, k: i32) -> Self {
        let x = self.value;
        let kf = k as f64;
        let ddf = if k == 0 || k == 1 { 0.0 } else { kf * (kf - 1.0) * x.powi(k - 2) };
        let df = if k == 0 { 0.0 } else { kf * x.powi(k - 1) };
        self.compose(x.powi(k), df, ddf)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = *self;
        out.value *= factor;
        for i in 0..D {
            out.grad[i] *= factor;
            for j in 0..D {
                out.hess[i][j] *= factor;
            }
        }
        out
    }

    /// `sum_k coeffs[k] * self^k` by Horner's rule.
    pub fn polynomial(&self, coeffs: &[f64]) -> Self {
        coeffs
            .iter()
            .rev()
            .fold(Self::constant(0.0), |acc, &a| acc * *self + a)
    }
}

impl<const D: usize> Add for Jet2<D> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const D: usize> AddAssign for Jet2<D> {
    fn add_assign(&mut self, rhs: Self) {
        self.value += rhs.value;
        for i in 0..D {
            self.grad[i] += rhs.grad[i];
            for j in 0..D {
                self.hess[i][j] += rhs.hess[i][j];
            }
        }
    }
}

impl<const D: usize> Neg for Jet2<D> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const D: usize> Sub for Jet2<D> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const D: usize> Mul for Jet2<D> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::constant(self.value * rhs.value);
        for i in 0..D {
            out.grad[i] = self.value * rhs.grad[i] + rhs.value * self.grad[i];
            for j in 0..D {
                out.hess[i][j] = self.value * rhs.hess[i][j]
                    + rhs.value * self.hess[i][j]
                    + self.grad[i] * rhs.grad[j]
                    + rhs.grad[i] * self.grad[j];
            }
        }
        out
    }
}

impl<const D: usize> Div for Jet2<D> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<const D: usize> Add<f64> for Jet2<D> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.value += rhs;
        self
    }
}

impl<const D: usize> Sub<f64> for Jet2<D> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.value -= rhs;
        self
    }
}

impl<const D: usize> Mul<f64> for Jet2<D> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl<const D: usize> Div<f64> for Jet2<D> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self.scale(1.0 / rhs)
    }
}

impl<const D: usize> Add<Jet2<D>> for f64 {
    type Output = Jet2<D>;
    fn add(self, rhs: Jet2<D>) -> Jet2<D> {
        rhs + self
    }
}

impl<const D: usize> Sub<Jet2<D>> for f64 {
    type Output = Jet2<D>;
    fn sub(self, rhs: Jet2<D>) -> Jet2<D> {
        -rhs + self
    }
}

impl<const D: usize> Mul<Jet2<D>> for f64 {
    type Output = Jet2<D>;
    fn mul(self, rhs: Jet2<D>) -> Jet2<D> {
        rhs.scale(self)
    }
}

impl<const D: usize> Div<Jet2<D>> for f64 {
    type Output = Jet2<D>;
    fn div(self, rhs: Jet2<D>) -> Jet2<D> {
        rhs.recip().scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type J = Jet2<2>;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn product_and_quotient() {
        let [x, y] = J::seed(&[1.5, -0.7]);
        // f = x^2 y / (1 + y^2)
        let f = x * x * y / (1.0 + y * y);
        let (xv, yv) = (1.5f64, -0.7f64);
        let d = 1.0 + yv * yv;
        assert!(close(f.value, xv * xv * yv / d));
        assert!(close(f.grad[0], 2.0 * xv * yv / d));
        assert!(close(f.grad[1], xv * xv * (1.0 - yv * yv) / (d * d)));
        assert!(close(f.hess[0][0], 2.0 * yv / d));
        assert!(close(f.hess[0][1], 2.0 * xv * (1.0 - yv * yv) / (d * d)));
        assert!(close(f.hess[1][0], f.hess[0][1]));
        // d2/dy2 of y/(1+y^2) = 2y(y^2-3)/(1+y^2)^3
        assert!(close(f.hess[1][1], xv * xv * 2.0 * yv * (yv * yv - 3.0) / (d * d * d)));
    }

    #[test]
    fn sqrt_composition() {
        let [x, y] = J::seed(&[0.3, 0.4]);
        let f = (x * x + y * y).sqrt();
        assert!(close(f.value, 0.5));
        assert!(close(f.grad[0], 0.6));
        assert!(close(f.grad[1], 0.8));
        // Hessian of |p|: (I - p p^T/|p|^2)/|p|
        assert!(close(f.hess[0][0], (1.0 - 0.36) / 0.5));
        assert!(close(f.hess[0][1], -0.48 / 0.5));
        assert!(close(f.hess[1][1], (1.0 - 0.64) / 0.5));
    }

    #[test]
    fn powers_and_polynomials() {
        let [x, _] = J::seed(&[2.0, 0.0]);
        let cube = x.powi(3);
        assert!(close(cube.grad[0], 12.0) && close(cube.hess[0][0], 12.0));
        let inv = x.powi(-2);
        assert!(close(inv.grad[0], -0.25) && close(inv.hess[0][0], 6.0 / 16.0));
        let p = x.polynomial(&[3.0, -4.0, 0.0, 0.0, 1.0]);
        assert!(close(p.value, 11.0));
        assert!(close(p.grad[0], 28.0));
        assert!(close(p.hess[0][0], 48.0));
        assert_eq!(x.powi(0).grad[0], 0.0);
    }

    #[test]
    fn matches_central_differences() {
        let f = |p: [f64; 2]| -> f64 { (p[0] * p[0] + 1.0).sqrt() / (2.0 + p[0] * p[1]) };
        let fj = |p: [J; 2]| -> J { (p[0] * p[0] + 1.0).sqrt() / (2.0 + p[0] * p[1]) };
        let at = [0.8, -0.3];
        let jet = fj(J::seed(&at));
        let h = 1e-4;
        for i in 0..2 {
            let mut plus = at;
            let mut minus = at;
            plus[i] += h;
            minus[i] -= h;
            let fd = (f(plus) - f(minus)) / (2.0 * h);
            assert!((fd - jet.grad[i]).abs() < 1e-7);
            let fd2 = (f(plus) - 2.0 * f(at) + f(minus)) / (h * h);
            assert!((fd2 - jet.hess[i][i]).abs() < 1e-5);
        }
    }
}

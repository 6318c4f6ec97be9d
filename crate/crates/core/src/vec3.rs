//! Minimal three-component vector used for positions, directions, and RGB.

use crate::num::Real;
use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec3<T>(pub [T; 3]);

impl<T: Real> Vec3<T> {
    #[inline]
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3([x, y, z])
    }

    #[inline]
    pub fn zero() -> Self {
        Vec3([T::zero(); 3])
    }

    #[inline]
    pub fn splat(v: T) -> Self {
        Vec3([v; 3])
    }

    /// Build from `f64` components, casting to `T`.
    #[inline]
    pub fn of(x: f64, y: f64, z: f64) -> Self {
        Vec3([T::of(x), T::of(y), T::of(z)])
    }

    #[inline]
    pub fn x(&self) -> T {
        self.0[0]
    }
    #[inline]
    pub fn y(&self) -> T {
        self.0[1]
    }
    #[inline]
    pub fn z(&self) -> T {
        self.0[2]
    }

    #[inline]
    pub fn dot(&self, o: Vec3<T>) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    #[inline]
    pub fn cross(&self, o: Vec3<T>) -> Vec3<T> {
        Vec3([
            self.0[1] * o.0[2] - self.0[2] * o.0[1],
            self.0[2] * o.0[0] - self.0[0] * o.0[2],
            self.0[0] * o.0[1] - self.0[1] * o.0[0],
        ])
    }

    #[inline]
    pub fn length_squared(&self) -> T {
        self.dot(*self)
    }

    #[inline]
    pub fn length(&self) -> T {
        self.length_squared().sqrt()
    }

    /// Unit vector; `None` when the length is zero or not finite.
    #[inline]
    pub fn try_normalized(&self) -> Option<Vec3<T>> {
        let len = self.length();
        if len > T::zero() && len.is_finite() {
            Some(*self / len)
        } else {
            None
        }
    }

    /// Unit vector; panics on zero length. Use for vectors known non-zero.
    #[inline]
    pub fn normalized(&self) -> Vec3<T> {
        self.try_normalized().expect("cannot normalize zero vector")
    }

    #[inline]
    pub fn lerp(a: Vec3<T>, b: Vec3<T>, t: T) -> Vec3<T> {
        a + (b - a) * t
    }

    #[inline]
    pub fn min_component(&self) -> T {
        self.0[0].min(self.0[1]).min(self.0[2])
    }

    #[inline]
    pub fn max_component(&self) -> T {
        self.0[0].max(self.0[1]).max(self.0[2])
    }

    #[inline]
    pub fn map(&self, f: impl Fn(T) -> T) -> Vec3<T> {
        Vec3([f(self.0[0]), f(self.0[1]), f(self.0[2])])
    }

    #[inline]
    pub fn clamp01(&self) -> Vec3<T> {
        self.map(|v| v.max(T::zero()).min(T::one()))
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    #[inline]
    pub fn cast<U: Real>(&self) -> Vec3<U> {
        Vec3([
            U::of(self.0[0].as_f64()),
            U::of(self.0[1].as_f64()),
            U::of(self.0[2].as_f64()),
        ])
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Vec3<T>;
    #[inline]
    fn add(self, o: Self) -> Self {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Vec3<T>;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

/// Component-wise (Hadamard) product; used for RGB modulation.
impl<T: Real> Mul for Vec3<T> {
    type Output = Vec3<T>;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Vec3([self.0[0] * o.0[0], self.0[1] * o.0[1], self.0[2] * o.0[2]])
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Vec3<T>;
    #[inline]
    fn mul(self, s: T) -> Self {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl<T: Real> Div<T> for Vec3<T> {
    type Output = Vec3<T>;
    #[inline]
    fn div(self, s: T) -> Self {
        Vec3([self.0[0] / s, self.0[1] / s, self.0[2] / s])
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Vec3<T>;
    #[inline]
    fn neg(self) -> Self {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl<T> From<[T; 3]> for Vec3<T> {
    #[inline]
    fn from(a: [T; 3]) -> Self {
        Vec3(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_orthogonal() {
        let a = Vec3::<f64>::new(1.0, 2.0, 3.0);
        let b = Vec3::new(-2.0, 0.5, 4.0);
        let c = a.cross(b);
        assert!(c.dot(a).abs() < 1e-12);
        assert!(c.dot(b).abs() < 1e-12);
    }

    #[test]
    fn normalize_zero_is_none() {
        assert!(Vec3::<f32>::zero().try_normalized().is_none());
    }

    #[test]
    fn lerp_endpoints() {
        let a = Vec3::<f64>::new(1.0, 0.0, -1.0);
        let b = Vec3::new(3.0, 2.0, 5.0);
        assert_eq!(Vec3::lerp(a, b, 0.0), a);
        assert_eq!(Vec3::lerp(a, b, 1.0), b);
    }
}

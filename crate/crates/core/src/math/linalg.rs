//! Small fixed-size vectors and matrices.
//!
//! Everything here is stack allocated and sized by const generics, which
//! covers the shapes the models need (3-vectors, 3×3 inertia, the 3×4
//! pyramid Jacobian and the 2×2 motor matrices).

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use super::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zeros() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    /// Unit vector along axis `i` (0, 1 or 2).
    pub fn unit(i: usize) -> Self {
        let mut v = Self::zeros();
        v[i] = T::one();
        v
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> Self {
        *self * (T::one() / self.norm())
    }

    pub fn max_abs(&self) -> T {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn map(self, f: impl Fn(T) -> T) -> Self {
        Self::new(f(self.x), f(self.y), f(self.z))
    }

    pub fn zip_map(self, o: Self, f: impl Fn(T, T) -> T) -> Self {
        Self::new(f(self.x, o.x), f(self.y, o.y), f(self.z, o.z))
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Cross-product matrix: `skew(v) * w == v × w`.
    pub fn skew(&self) -> Mat3<T> {
        let o = T::zero();
        Mat::from_rows([[o, -self.z, self.y], [self.z, o, -self.x], [-self.y, self.x, o]])
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl<T> IndexMut<usize> for Vec3<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        match i {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Dense row-major `R×C` matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat<T, const R: usize, const C: usize> {
    rows: [[T; C]; R],
}

pub type Mat2<T> = Mat<T, 2, 2>;
pub type Mat3<T> = Mat<T, 3, 3>;

impl<T: Real, const R: usize, const C: usize> Default for Mat<T, R, C> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Real, const R: usize, const C: usize> Mat<T, R, C> {
    pub const fn from_rows(rows: [[T; C]; R]) -> Self {
        Self { rows }
    }

    pub fn zeros() -> Self {
        Self { rows: [[T::zero(); C]; R] }
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros();
        for i in 0..R {
            for j in 0..C {
                m.rows[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> &[[T; C]; R] {
        &self.rows
    }

    pub fn transpose(&self) -> Mat<T, C, R> {
        Mat::from_fn(|i, j| self.rows[j][i])
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.rows[i][j] * s)
    }

    pub fn mul_array(&self, v: &[T; C]) -> [T; R] {
        let mut out = [T::zero(); R];
        for (o, row) in out.iter_mut().zip(self.rows.iter()) {
            *o = row.iter().zip(v.iter()).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        }
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.rows.iter().flat_map(|r| r.iter()).fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.rows.iter().flat_map(|r| r.iter()).fold(T::zero(), |s, &x| s + x * x).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().flat_map(|r| r.iter()).all(|x| x.is_finite())
    }
}

impl<T: Real, const C: usize> Mat<T, 3, C> {
    /// Builds a 3×C matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec3<T>; C]) -> Self {
        Self::from_fn(|i, j| cols[j][i])
    }

    pub fn column(&self, j: usize) -> Vec3<T> {
        Vec3::new(self.rows[0][j], self.rows[1][j], self.rows[2][j])
    }
}

impl<T: Real, const N: usize> Mat<T, N, N> {
    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(d: [T; N]) -> Self {
        Self::from_fn(|i, j| if i == j { d[i] } else { T::zero() })
    }

    pub fn diag(&self) -> [T; N] {
        let mut d = [T::zero(); N];
        for (i, x) in d.iter_mut().enumerate() {
            *x = self.rows[i][i];
        }
        d
    }

    /// Gauss-Jordan inverse with partial pivoting. `None` when a pivot is
    /// exactly zero or the result is not finite.
    pub fn try_inverse(&self) -> Option<Self> {
        let mut a = self.rows;
        let mut inv = Self::identity().rows;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
            if a[pivot][col] == T::zero() || !a[pivot][col].is_finite() {
                return None;
            }
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = T::one() / a[col][col];
            for j in 0..N {
                a[col][j] *= p;
                inv[col][j] *= p;
            }
            for i in 0..N {
                if i != col {
                    let f = a[i][col];
                    if f != T::zero() {
                        for j in 0..N {
                            let (acj, icj) = (a[col][j], inv[col][j]);
                            a[i][j] -= f * acj;
                            inv[i][j] -= f * icj;
                        }
                    }
                }
            }
        }
        let m = Self::from_rows(inv);
        m.is_finite().then_some(m)
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> T {
        self.diag().iter().fold(T::zero(), |s, &x| s + x)
    }
}

impl<T: Real> Mat2<T> {
    pub fn determinant(&self) -> T {
        let r = &self.rows;
        r[0][0] * r[1][1] - r[0][1] * r[1][0]
    }
}

impl<T: Real> Mat3<T> {
    pub fn determinant(&self) -> T {
        let r = &self.rows;
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    }

    pub fn mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        Vec3::from_array(self.mul_array(&v.to_array()))
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..3).all(|i| (0..3).all(|j| (self.rows[i][j] - self.rows[j][i]).abs() <= tol))
    }
}

impl<T, const R: usize, const C: usize> Index<(usize, usize)> for Mat<T, R, C> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.rows[i][j]
    }
}

impl<T, const R: usize, const C: usize> IndexMut<(usize, usize)> for Mat<T, R, C> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.rows[i][j]
    }
}

impl<T: Real, const R: usize, const C: usize> Add for Mat<T, R, C> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.rows[i][j] + o.rows[i][j])
    }
}

impl<T: Real, const R: usize, const C: usize> Sub for Mat<T, R, C> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.rows[i][j] - o.rows[i][j])
    }
}

impl<T: Real, const R: usize, const K: usize, const C: usize> Mul<Mat<T, K, C>> for Mat<T, R, K> {
    type Output = Mat<T, R, C>;
    fn mul(self, o: Mat<T, K, C>) -> Mat<T, R, C> {
        Mat::from_fn(|i, j| (0..K).fold(T::zero(), |s, k| s + self.rows[i][k] * o.rows[k][j]))
    }
}

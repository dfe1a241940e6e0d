//! Ambient geometry of `SL(2,R)` in global NAK coordinates `(x, y, theta)`.
//!
//! A point is the matrix `n(x) a(y) k(theta)` with
//!
//! ```text
//! n(x) = [[1, x], [0, 1]],  a(y) = [[sqrt y, 0], [0, 1/sqrt y]],
//! k(theta) = [[cos theta, sin theta], [-sin theta, cos theta]],
//! ```
//!
//! and the metric is `(dx^2 + dy^2)/(4y^2) + (dtheta + dx/(2y))^2`. Tangent
//! vectors come in two flavours: [`CoordVector`] (components on
//! `d/dx, d/dy, d/dtheta`) and [`FrameVector`] (components on the global
//! orthonormal frame `e1 = 2y d/dx - d/dtheta`, `e2 = 2y d/dy`,
//! `e3 = d/dtheta`).

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Determinant tolerance used by [`Sl2Matrix::new`].
pub const DET_TOL: f64 = 1e-12;

/// Trace tolerance separating parabolic from elliptic/hyperbolic matrices.
pub const TRACE_TOL: f64 = 1e-12;

pub type Mat3 = [[f64; 3]; 3];

/// `gamma[k][i][j]` is the Christoffel symbol `Gamma^k_{ij}`.
pub type Christoffels = [[[f64; 3]; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sl2Point {
    pub x: f64,
    pub y: f64,
    /// Unbounded angle; reduced modulo `2 pi` only by matrix round trips.
    pub theta: f64,
}

impl Sl2Point {
    pub fn new(x: f64, y: f64, theta: f64) -> Result<Self> {
        let p = Self { x, y, theta };
        p.check()?;
        Ok(p)
    }

    pub(crate) fn check(&self) -> Result<()> {
        if !(self.y > 0.0) || !self.x.is_finite() || !self.y.is_finite() || !self.theta.is_finite()
        {
            return domain(format!(
                "point ({}, {}, {}) outside y > 0",
                self.x, self.y, self.theta
            ));
        }
        Ok(())
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.theta]
    }

    pub fn from_coords(c: [f64; 3]) -> Result<Self> {
        Self::new(c[0], c[1], c[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sl2Matrix {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Sl2Matrix {
    /// Builds `[[a, b], [c, d]]`, rejecting `|ad - bc - 1| > 1e-12`.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::with_tolerance(a, b, c, d, DET_TOL)
    }

    pub fn with_tolerance(a: f64, b: f64, c: f64, d: f64, tol: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !det.is_finite() || (det - 1.0).abs() > tol {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Plain matrix product; the result is unimodular up to round-off and is
    /// not re-validated.
    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(o.entries())
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max)
    }
}

/// `n(x) a(y) k(theta)`.
pub fn compose_nak(p: &Sl2Point) -> Result<Sl2Matrix> {
    p.check()?;
    let r = p.y.sqrt();
    let (s, c) = p.theta.sin_cos();
    // n(x) a(y) = [[r, x/r], [0, 1/r]]
    Ok(Sl2Matrix {
        a: r * c - p.x * s / r,
        b: r * s + p.x * c / r,
        c: -s / r,
        d: c / r,
    })
}

/// Inverse of [`compose_nak`]; `theta` is returned in `(-pi, pi]`.
pub fn decompose_nak(m: &Sl2Matrix) -> Result<Sl2Point> {
    let det = m.det();
    if (det - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnimodular { det });
    }
    let n2 = m.c * m.c + m.d * m.d;
    let y = 1.0 / n2;
    let x = (m.a * m.c + m.b * m.d) / n2;
    let r = y.sqrt();
    let mut theta = (-m.c * r).atan2(m.d * r);
    if theta <= -PI {
        theta += 2.0 * PI;
    }
    Sl2Point::new(x, y, theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixClass {
    Parabolic,
    Hyperbolic,
    Elliptic,
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatrixClass::Parabolic => "Parabolic",
            MatrixClass::Hyperbolic => "Hyperbolic",
            MatrixClass::Elliptic => "Elliptic",
        };
        f.write_str(s)
    }
}

/// Trace classification: `|tr| = 2` parabolic, `> 2` hyperbolic, `< 2` elliptic.
pub fn classify_matrix(m: &Sl2Matrix) -> MatrixClass {
    let t = m.trace().abs();
    if (t - 2.0).abs() <= TRACE_TOL {
        MatrixClass::Parabolic
    } else if t > 2.0 {
        MatrixClass::Hyperbolic
    } else {
        MatrixClass::Elliptic
    }
}

/// `(a z + b)/(c z + d)` on the upper half-plane, `z = (re, im)`.
pub fn mobius_action(m: &Sl2Matrix, z: (f64, f64)) -> Result<(f64, f64)> {
    let (x, y) = z;
    if !(y > 0.0) {
        return domain(format!("Im z = {y} is not positive"));
    }
    // (a z + b) * conj(c z + d) / |c z + d|^2
    let (nr, ni) = (m.a * x + m.b, m.a * y);
    let (dr, di) = (m.c * x + m.d, m.c * y);
    let den = dr * dr + di * di;
    Ok(((nr * dr + ni * di) / den, (ni * dr - nr * di) / den))
}

/// The Riemannian submersion onto the hyperbolic plane of curvature -4.
pub fn hyperbolic_projection(p: &Sl2Point) -> (f64, f64) {
    (p.x, p.y)
}

/// Metric in the coordinate basis, ordered `(x, y, theta)`.
pub fn metric_at(p: &Sl2Point) -> Result<Mat3> {
    p.check()?;
    let y = p.y;
    let gxx = 1.0 / (2.0 * y * y);
    let gyy = 1.0 / (4.0 * y * y);
    let gxt = 1.0 / (2.0 * y);
    Ok([[gxx, 0.0, gxt], [0.0, gyy, 0.0], [gxt, 0.0, 1.0]])
}

/// Inverse metric, `sum_a e_a e_a^T`.
pub fn inverse_metric_at(p: &Sl2Point) -> Result<Mat3> {
    p.check()?;
    let y = p.y;
    Ok([
        [4.0 * y * y, 0.0, -2.0 * y],
        [0.0, 4.0 * y * y, 0.0],
        [-2.0 * y, 0.0, 2.0],
    ])
}

/// `dg[l][i][j] = d g_ij / d x^l`; only the `y` slice is non-zero.
fn metric_derivatives(p: &Sl2Point) -> [Mat3; 3] {
    let y = p.y;
    let mut dg = [[[0.0; 3]; 3]; 3];
    dg[1][0][0] = -1.0 / (y * y * y);
    dg[1][1][1] = -1.0 / (2.0 * y * y * y);
    dg[1][0][2] = -1.0 / (2.0 * y * y);
    dg[1][2][0] = dg[1][0][2];
    dg
}

pub fn metric_inner(g: &Mat3, u: &CoordVector, v: &CoordVector) -> f64 {
    let (a, b) = (u.as_array(), v.as_array());
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += g[i][j] * a[i] * b[j];
        }
    }
    s
}

pub fn christoffels_at(p: &Sl2Point) -> Result<Christoffels> {
    let ginv = inverse_metric_at(p)?;
    let dg = metric_derivatives(p);
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in i..3 {
                let mut s = 0.0;
                for l in 0..3 {
                    s += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                gamma[k][i][j] = 0.5 * s;
                gamma[k][j][i] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

/// `nabla_u V` at `p`, where `dv` is the directional derivative of the
/// coordinate components of `V` along `u`.
pub fn covariant_derivative(
    gamma: &Christoffels,
    u: &CoordVector,
    v: &CoordVector,
    dv: &CoordVector,
) -> CoordVector {
    let (a, b) = (u.as_array(), v.as_array());
    let mut out = dv.as_array();
    for (k, o) in out.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                *o += gamma[k][i][j] * a[i] * b[j];
            }
        }
    }
    CoordVector::from_array(out)
}

/// Coordinate components of `e1, e2, e3`.
pub fn frame_at(p: &Sl2Point) -> Result<[CoordVector; 3]> {
    p.check()?;
    let y2 = 2.0 * p.y;
    Ok([
        CoordVector::new(y2, 0.0, -1.0),
        CoordVector::new(0.0, y2, 0.0),
        CoordVector::new(0.0, 0.0, 1.0),
    ])
}

pub fn coord_to_frame(p: &Sl2Point, v: &CoordVector) -> Result<FrameVector> {
    p.check()?;
    let k = 1.0 / (2.0 * p.y);
    Ok(FrameVector::new(v.vx * k, v.vy * k, v.vx * k + v.vtheta))
}

pub fn frame_to_coord(p: &Sl2Point, w: &FrameVector) -> Result<CoordVector> {
    p.check()?;
    let y2 = 2.0 * p.y;
    Ok(CoordVector::new(y2 * w.v1, y2 * w.v2, w.v3 - w.v1))
}

const CONNECTION: [[[f64; 3]; 3]; 3] = [
    [[0.0, 2.0, 0.0], [-2.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
    [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
    [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
];

/// Frame components of `nabla_{e_i} e_j` (indices are 0-based).
///
/// # Panics
///
/// If `i` or `j` is not in `0..3`.
pub fn connection_frame(i: usize, j: usize) -> FrameVector {
    FrameVector::from_array(CONNECTION[i][j])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KillingFieldKind {
    /// `d/dx`
    Dx,
    /// `d/dtheta`
    Dtheta,
    /// `x d/dx + y d/dy`
    V,
    /// `(x^2 - y^2)/2 d/dx + x y d/dy`
    W,
}

impl KillingFieldKind {
    pub const ALL: [KillingFieldKind; 4] = [Self::Dx, Self::Dtheta, Self::V, Self::W];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Dx => "dx",
            Self::Dtheta => "dtheta",
            Self::V => "v",
            Self::W => "w",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dx" => Some(Self::Dx),
            "dtheta" => Some(Self::Dtheta),
            "v" => Some(Self::V),
            "w" => Some(Self::W),
            _ => None,
        }
    }
}

impl fmt::Display for KillingFieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn killing_coords(k: KillingFieldKind, p: &Sl2Point) -> Result<CoordVector> {
    p.check()?;
    let (x, y) = (p.x, p.y);
    Ok(match k {
        KillingFieldKind::Dx => CoordVector::new(1.0, 0.0, 0.0),
        KillingFieldKind::Dtheta => CoordVector::new(0.0, 0.0, 1.0),
        KillingFieldKind::V => CoordVector::new(x, y, 0.0),
        KillingFieldKind::W => CoordVector::new(0.5 * (x * x - y * y), x * y, 0.0),
    })
}

/// Coordinate components of `W + (y/2) d/dtheta`.
///
/// The tabulated [`KillingFieldKind::W`] has no `d/dtheta` component, and its
/// Lie derivative of the metric is non-zero (the `xy` entry is `-1/(4y)`, the
/// `y theta` entry `-1/2`). Adding `(y/2) d/dtheta` gives the Killing field of
/// this metric that projects to the same field on the hyperbolic plane.
pub fn w_killing_lift(p: &Sl2Point) -> Result<CoordVector> {
    let w = killing_coords(KillingFieldKind::W, p)?;
    Ok(CoordVector::new(w.vx, w.vy, 0.5 * p.y))
}

pub fn killing_at(k: KillingFieldKind, p: &Sl2Point) -> Result<FrameVector> {
    p.check()?;
    let (x, y) = (p.x, p.y);
    let s = 1.0 / (2.0 * y);
    Ok(match k {
        KillingFieldKind::Dx => FrameVector::new(s, 0.0, s),
        KillingFieldKind::Dtheta => FrameVector::new(0.0, 0.0, 1.0),
        KillingFieldKind::V => FrameVector::new(s * x, s * y, s * x),
        KillingFieldKind::W => {
            let h = 0.5 * (x * x - y * y);
            FrameVector::new(s * h, s * x * y, s * h)
        }
    })
}

macro_rules! vector3 {
    ($name:ident, $a:ident, $b:ident, $c:ident) => {
        #[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
        pub struct $name {
            pub $a: f64,
            pub $b: f64,
            pub $c: f64,
        }

        impl $name {
            pub const ZERO: Self = Self {
                $a: 0.0,
                $b: 0.0,
                $c: 0.0,
            };

            pub const fn new($a: f64, $b: f64, $c: f64) -> Self {
                Self { $a, $b, $c }
            }

            pub fn as_array(&self) -> [f64; 3] {
                [self.$a, self.$b, self.$c]
            }

            pub fn from_array(v: [f64; 3]) -> Self {
                Self::new(v[0], v[1], v[2])
            }

            pub fn max_abs_diff(&self, o: &Self) -> f64 {
                (self.$a - o.$a)
                    .abs()
                    .max((self.$b - o.$b).abs())
                    .max((self.$c - o.$c).abs())
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                Self::new(self.$a + o.$a, self.$b + o.$b, self.$c + o.$c)
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                Self::new(self.$a - o.$a, self.$b - o.$b, self.$c - o.$c)
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                Self::new(-self.$a, -self.$b, -self.$c)
            }
        }

        impl Mul<f64> for $name {
            type Output = Self;
            fn mul(self, k: f64) -> Self {
                Self::new(self.$a * k, self.$b * k, self.$c * k)
            }
        }
    };
}

vector3!(FrameVector, v1, v2, v3);
vector3!(CoordVector, vx, vy, vtheta);

impl FrameVector {
    /// Inner product; the frame is orthonormal.
    pub fn dot(&self, o: &Self) -> f64 {
        self.v1 * o.v1 + self.v2 * o.v2 + self.v3 * o.v3
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Cross product in the oriented frame `(e1, e2, e3)`.
    pub fn cross(&self, o: &Self) -> Self {
        Self::new(
            self.v2 * o.v3 - self.v3 * o.v2,
            self.v3 * o.v1 - self.v1 * o.v3,
            self.v1 * o.v2 - self.v2 * o.v1,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pt(x: f64, y: f64, t: f64) -> Sl2Point {
        Sl2Point::new(x, y, t).unwrap()
    }

    #[test]
    fn compose_examples() {
        let id = compose_nak(&pt(0.0, 1.0, 0.0)).unwrap();
        assert!(id.max_abs_diff(&Sl2Matrix::identity()) < 1e-15);
        let n = compose_nak(&pt(3.0, 1.0, 0.0)).unwrap();
        assert!(n.max_abs_diff(&Sl2Matrix::new(1.0, 3.0, 0.0, 1.0).unwrap()) < 1e-15);
        let m = compose_nak(&pt(0.0, 4.0, PI / 2.0)).unwrap();
        let expected = Sl2Matrix::new(0.0, 2.0, -0.5, 0.0).unwrap();
        assert!(m.max_abs_diff(&expected) < 1e-15);
        assert!((m.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compose_rejects_nonpositive_y() {
        assert!(matches!(
            Sl2Point::new(0.0, 0.0, 0.0),
            Err(Error::Domain(_))
        ));
        let bad = Sl2Point {
            x: 0.0,
            y: -1.0,
            theta: 0.0,
        };
        assert!(compose_nak(&bad).is_err());
        assert!(metric_at(&bad).is_err());
        assert!(killing_at(KillingFieldKind::V, &bad).is_err());
    }

    #[test]
    fn decompose_examples() {
        let p = decompose_nak(&Sl2Matrix::identity()).unwrap();
        assert_eq!((p.x, p.y, p.theta), (0.0, 1.0, 0.0));
        let p = decompose_nak(&Sl2Matrix::new(0.0, 2.0, -0.5, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y, 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.theta, PI / 2.0, epsilon = 1e-15);
        let p = decompose_nak(&Sl2Matrix::new(1.0, 3.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!((p.x, p.y, p.theta), (3.0, 1.0, 0.0));
    }

    #[test]
    fn theta_range_is_half_open() {
        let p = decompose_nak(&compose_nak(&pt(0.5, 2.0, PI)).unwrap()).unwrap();
        assert_abs_diff_eq!(p.theta, PI, epsilon = 1e-12);
        let p = decompose_nak(&compose_nak(&pt(0.5, 2.0, 7.0)).unwrap()).unwrap();
        assert_abs_diff_eq!(p.theta, 7.0 - 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn determinant_validation() {
        assert!(matches!(
            Sl2Matrix::new(1.0, 1.0, 1.0, 1.0),
            Err(Error::NotUnimodular { .. })
        ));
        assert!(Sl2Matrix::new(1.0, 0.0, 0.0, 1.0 + 1e-10).is_err());
        assert!(Sl2Matrix::with_tolerance(1.0, 0.0, 0.0, 1.0 + 1e-10, 1e-9).is_ok());
    }

    #[test]
    fn classification_examples() {
        let n = Sl2Matrix::new(1.0, 3.0, 0.0, 1.0).unwrap();
        assert_eq!(classify_matrix(&n), MatrixClass::Parabolic);
        let a = Sl2Matrix::new(2.0, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(classify_matrix(&a), MatrixClass::Hyperbolic);
        let k = Sl2Matrix::new(0.0, 1.0, -1.0, 0.0).unwrap();
        assert_eq!(classify_matrix(&k), MatrixClass::Elliptic);
        let minus_id = Sl2Matrix::new(-1.0, 0.0, 0.0, -1.0).unwrap();
        assert_eq!(classify_matrix(&minus_id), MatrixClass::Parabolic);
    }

    #[test]
    fn mobius_examples() {
        let (x, y) = mobius_action(&Sl2Matrix::identity(), (0.0, 1.0)).unwrap();
        assert_eq!((x, y), (0.0, 1.0));
        let (x, y) =
            mobius_action(&Sl2Matrix::new(1.0, 1.0, 0.0, 1.0).unwrap(), (0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(x, 1.0);
        assert_abs_diff_eq!(y, 1.0);
        assert!(mobius_action(&Sl2Matrix::identity(), (0.0, -1.0)).is_err());
    }

    #[test]
    fn metric_examples() {
        let g = metric_at(&pt(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(g, [[0.5, 0.0, 0.5], [0.0, 0.25, 0.0], [0.5, 0.0, 1.0]]);
        let p = pt(2.0, 0.3, 1.0);
        let g = metric_at(&p).unwrap();
        let det = g[0][0] * (g[1][1] * g[2][2]) - g[0][2] * g[0][2] * g[1][1];
        assert_abs_diff_eq!(det, 1.0 / (16.0 * 0.3f64.powi(4)), epsilon = 1e-9);
        let gi = inverse_metric_at(&p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| g[i][k] * gi[k][j]).sum();
                assert_abs_diff_eq!(s, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn frame_examples() {
        let [e1, e2, e3] = frame_at(&pt(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(e1, CoordVector::new(2.0, 0.0, -1.0));
        assert_eq!(e2, CoordVector::new(0.0, 2.0, 0.0));
        assert_eq!(e3, CoordVector::new(0.0, 0.0, 1.0));
        let p = pt(5.0, 0.3, 2.0);
        let g = metric_at(&p).unwrap();
        let f = frame_at(&p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(metric_inner(&g, &f[i], &f[j]), want, epsilon = 1e-12);
            }
        }
        let w = coord_to_frame(&p, &f[1]).unwrap();
        assert_eq!(w, FrameVector::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn change_of_basis_examples() {
        let p = pt(-1.0, 2.5, 0.1);
        let w = coord_to_frame(&p, &CoordVector::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(w, FrameVector::new(0.0, 0.0, 1.0));
        let w = coord_to_frame(&pt(0.0, 1.0, 0.0), &CoordVector::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(w, FrameVector::new(0.5, 0.0, 0.5));
    }

    #[test]
    fn connection_examples() {
        assert_eq!(connection_frame(0, 0), FrameVector::new(0.0, 2.0, 0.0));
        assert_eq!(connection_frame(2, 2), FrameVector::ZERO);
        assert_eq!(connection_frame(0, 1), FrameVector::new(-2.0, 0.0, -1.0));
        assert_eq!(connection_frame(1, 2), FrameVector::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn connection_is_metric_compatible() {
        let basis = [
            FrameVector::new(1.0, 0.0, 0.0),
            FrameVector::new(0.0, 1.0, 0.0),
            FrameVector::new(0.0, 0.0, 1.0),
        ];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let s = connection_frame(i, j).dot(&basis[k])
                        + basis[j].dot(&connection_frame(i, k));
                    assert_eq!(s, 0.0, "i={i} j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn christoffels_reproduce_connection() {
        let p = pt(1.0, 2.0, 0.5);
        let gamma = christoffels_at(&p).unwrap();
        let f = frame_at(&p).unwrap();
        // e_i(e_j^k): only e2 = 2y d/dy differentiates, and only the y-linear entries.
        let de = |i: usize, j: usize| -> CoordVector {
            if i != 1 {
                return CoordVector::ZERO;
            }
            let y2 = 2.0 * p.y;
            match j {
                0 => CoordVector::new(y2 * 2.0, 0.0, 0.0),
                1 => CoordVector::new(0.0, y2 * 2.0, 0.0),
                _ => CoordVector::ZERO,
            }
        };
        for i in 0..3 {
            for j in 0..3 {
                let nab = covariant_derivative(&gamma, &f[i], &f[j], &de(i, j));
                let w = coord_to_frame(&p, &nab).unwrap();
                assert!(
                    w.max_abs_diff(&connection_frame(i, j)) < 1e-12,
                    "({i},{j}) -> {w:?}"
                );
            }
        }
    }

    #[test]
    fn killing_examples() {
        let p = pt(2.0, 1.0, 0.0);
        assert_eq!(
            killing_at(KillingFieldKind::Dtheta, &p).unwrap(),
            FrameVector::new(0.0, 0.0, 1.0)
        );
        assert_eq!(
            killing_at(KillingFieldKind::V, &p).unwrap(),
            FrameVector::new(1.0, 0.5, 1.0)
        );
        for k in KillingFieldKind::ALL {
            let c = killing_coords(k, &p).unwrap();
            let w = killing_at(k, &p).unwrap();
            assert!(coord_to_frame(&p, &c).unwrap().max_abs_diff(&w) < 1e-15);
            assert_eq!(KillingFieldKind::parse(k.name()), Some(k));
        }
    }

    #[test]
    fn cross_product_is_right_handed() {
        let e1 = FrameVector::new(1.0, 0.0, 0.0);
        let e2 = FrameVector::new(0.0, 1.0, 0.0);
        assert_eq!(e1.cross(&e2), FrameVector::new(0.0, 0.0, 1.0));
    }
}

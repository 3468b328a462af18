//! Vectors, planes and circles in three dimensions.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use crate::error::{Result, SsdError};

/// Default absolute coplanarity tolerance on the unit-sphere scale.
pub const COPLANAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const X: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction, `None` for a zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Scalar triple product `⟨self, b × c⟩`.
    pub fn triple(self, b: Vec3, c: Vec3) -> f64 {
        self.dot(b.cross(c))
    }

    /// Mirror image under `y → −y`.
    pub fn mirror_y(self) -> Vec3 {
        Vec3::new(self.x, -self.y, self.z)
    }

    /// Some unit vector orthogonal to `self`.
    pub fn any_orthogonal(self) -> Vec3 {
        let a = if self.x.abs() < 0.6 {
            Vec3::X
        } else if self.y.abs() < 0.6 {
            Vec3::Y
        } else {
            Vec3::Z
        };
        self.cross(a).normalized().unwrap_or(Vec3::X)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Oriented plane `{p : ⟨p, normal⟩ = offset}` with unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: Vec3,
    pub offset: f64,
}

impl Plane {
    /// Normalizes `normal`; fails on a zero normal.
    pub fn new(normal: Vec3, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(SsdError::DegenerateInput("zero plane normal".into()));
        }
        Ok(Plane { normal: normal / n, offset: offset / n })
    }

    pub fn through(normal: Vec3, point: Vec3) -> Result<Self> {
        let n = normal
            .normalized()
            .ok_or_else(|| SsdError::DegenerateInput("zero plane normal".into()))?;
        Ok(Plane { normal: n, offset: n.dot(point) })
    }

    pub fn flipped(self) -> Plane {
        Plane { normal: -self.normal, offset: -self.offset }
    }

    /// Orthogonal projection of `p` onto the plane.
    pub fn project(&self, p: Vec3) -> Vec3 {
        p - self.normal * signed_distance(self, p)
    }
}

/// `⟨p, normal⟩ − offset`.
pub fn signed_distance(plane: &Plane, p: Vec3) -> f64 {
    p.dot(plane.normal) - plane.offset
}

/// Circle in space: center, radius and supporting plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vec3,
    pub radius: f64,
    pub plane: Plane,
}

/// Circle through the given coplanar points, using the first non-collinear
/// triple and then validating the remaining points against it.
pub fn circumcircle(points: &[Vec3]) -> Result<Circle> {
    circumcircle_tol(points, COPLANAR_TOL)
}

pub fn circumcircle_tol(points: &[Vec3], tol: f64) -> Result<Circle> {
    if points.len() < 3 {
        return Err(SsdError::CollinearInput);
    }
    let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let p0 = points[0];
    let mut triple = None;
    'outer: for i in 1..points.len() {
        for j in (i + 1)..points.len() {
            let n = (points[i] - p0).cross(points[j] - p0);
            let len = (points[i] - p0).norm() * (points[j] - p0).norm();
            if len > 0.0 && n.norm() > 1e-10 * len.max(scale * scale * 1e-6) {
                triple = Some((i, j));
                break 'outer;
            }
        }
    }
    let (i, j) = triple.ok_or(SsdError::CollinearInput)?;
    let (a, b, c) = (p0, points[i], points[j]);
    let ab = b - a;
    let ac = c - a;
    let n = ab.cross(ac);
    let n2 = n.norm2();
    let center = a + (n.cross(ab) * ac.norm2() + ac.cross(n) * ab.norm2()) / (2.0 * n2);
    let radius = (a - center).norm();
    let plane = Plane::through(n, center)?;

    let mut plane_dev: f64 = 0.0;
    let mut circle_dev: f64 = 0.0;
    for p in points {
        plane_dev = plane_dev.max(signed_distance(&plane, *p).abs());
        circle_dev = circle_dev.max(((*p - center).norm() - radius).abs());
    }
    if plane_dev > tol {
        return Err(SsdError::NotCoplanar { deviation: plane_dev });
    }
    if circle_dev > tol {
        return Err(SsdError::NotConcyclic { deviation: circle_dev });
    }
    Ok(Circle { center, radius, plane })
}

/// Least-squares plane of a point set: the plane through the centroid
/// orthogonal to the smallest principal axis.
pub fn fit_plane(points: &[Vec3]) -> Result<Plane> {
    if points.len() < 3 {
        return Err(SsdError::DegenerateInput("plane fit needs three points".into()));
    }
    let c = points.iter().fold(Vec3::ZERO, |s, p| s + *p) / points.len() as f64;
    let mut m = [[0.0f64; 3]; 3];
    for p in points {
        let d = (*p - c).to_array();
        for (r, row) in m.iter_mut().enumerate() {
            for (s, e) in row.iter_mut().enumerate() {
                *e += d[r] * d[s];
            }
        }
    }
    let (vals, vecs) = symmetric_eigen3(m);
    let k = (0..3)
        .min_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap())
        .unwrap();
    let n = Vec3::new(vecs[0][k], vecs[1][k], vecs[2][k]);
    Plane::through(n, c)
}

/// Jacobi eigen-decomposition of a symmetric 3×3 matrix. Returns the
/// eigenvalues and the eigenvectors as matrix columns.
fn symmetric_eigen3(mut a: [[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off < 1e-300 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for row in a.iter_mut() {
                let (x, y) = (row[p], row[q]);
                row[p] = c * x - s * y;
                row[q] = s * x + c * y;
            }
            for k in 0..3 {
                let (x, y) = (a[p][k], a[q][k]);
                a[p][k] = c * x - s * y;
                a[q][k] = s * x + c * y;
            }
            for row in v.iter_mut() {
                let (x, y) = (row[p], row[q]);
                row[p] = c * x - s * y;
                row[q] = s * x + c * y;
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

/// Rotation by `angle` about the unit `axis` (Rodrigues).
pub fn rotate(p: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    p * c + axis.cross(p) * s + axis * (axis.dot(p) * (1.0 - c))
}

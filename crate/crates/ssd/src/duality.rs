//! Dual planes, the dual-edge map Φ_r and segment classification.

use crate::error::{Result, SsdError};
use crate::geom::{Plane, Vec3};
use crate::polytope::Polytope;

/// Discriminant values in `[-DISC_CLAMP, 0)` are treated as tangency.
pub const DISC_CLAMP: f64 = 1e-12;
/// Allowed deviation of an input vertex from unit length.
pub const UNIT_TOL: f64 = 1e-8;
/// Relative tolerance of the principal-diagonal length test.
pub const ALPHA_REL_TOL: f64 = 1e-8;

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(SsdError::InvalidRadius(r))
    }
}

fn check_unit(v: Vec3) -> Result<()> {
    let n = v.norm();
    if (n - 1.0).abs() <= UNIT_TOL {
        Ok(())
    } else {
        Err(SsdError::NonUnitVertex(n))
    }
}

/// The plane with normal `v` at offset `−r`; it carries the face `σ(v)`.
pub fn dual_plane(v: Vec3, r: f64) -> Result<Plane> {
    check_radius(r)?;
    check_unit(v)?;
    Ok(Plane { normal: v / v.norm(), offset: -r })
}

/// `√(2+2r)`, the common length of the principal diagonals.
pub fn parameter_alpha(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok((2.0 + 2.0 * r).sqrt())
}

/// Lower bound `√(2(n+1)/n)` on α in dimension `n`.
pub fn alpha_lower_bound(dim: usize) -> f64 {
    let n = dim as f64;
    (2.0 * (n + 1.0) / n).sqrt()
}

/// `1 + ⟨a,b⟩ − 2r²`; negative exactly when the dual circles of `a` and `b`
/// miss each other.
pub fn discriminant(a: Vec3, b: Vec3, r: f64) -> f64 {
    1.0 + a.dot(b) - 2.0 * r * r
}

/// `Φ_r(a, b)`: the endpoint of the dual edge `σ(ab)` lying on the side of
/// `a × b`.
pub fn phi(a: Vec3, b: Vec3, r: f64) -> Result<Vec3> {
    check_radius(r)?;
    check_unit(a)?;
    check_unit(b)?;
    phi_unchecked(a, b, r)
}

/// [`phi`] without the unit-length and radius checks.
pub fn phi_unchecked(a: Vec3, b: Vec3, r: f64) -> Result<Vec3> {
    let ab = a.dot(b);
    let c = a.cross(b);
    if c.norm() <= 1e-14 {
        return Err(SsdError::AntipodalInput);
    }
    let mut disc = 1.0 + ab - 2.0 * r * r;
    if disc < 0.0 {
        if disc < -DISC_CLAMP {
            return Err(SsdError::DegenerateDiscriminant { value: disc, at: None });
        }
        disc = 0.0;
    }
    let s = (disc / (1.0 - ab)).sqrt();
    Ok((c * s - (a + b) * r) / (1.0 + ab))
}

/// Both endpoints `(Φ_r(a,b), Φ_r(b,a))` of the dual segment.
pub fn dual_pair(a: Vec3, b: Vec3, r: f64) -> Result<(Vec3, Vec3)> {
    Ok((phi_unchecked(a, b, r)?, phi_unchecked(b, a, r)?))
}

/// Distance of the midpoint of `uv` from the origin.
pub fn midpoint_distance(u: Vec3, v: Vec3) -> f64 {
    ((u + v) / 2.0).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentType {
    Edge,
    BodyDiagonal,
    FaceDiagonal,
    FaceDiagonalThroughCenter,
}

/// Classify the segment between vertices `u` and `v` of `poly`.
///
/// The midpoint distance separates body diagonals. For the rest both dual
/// points `x = Φ_r(u,v)`, `y = Φ_r(v,u)` are computed; the segment lies in
/// the faces `σ(x)` and `σ(y)`, so it is an edge exactly when both are
/// vertices of the polytope, a face diagonal through the circle centre when
/// `x = y`, and a face diagonal when only one of them is a vertex.
pub fn classify_segment(u: usize, v: usize, poly: &Polytope, tol: f64) -> Result<SegmentType> {
    let r = poly
        .r
        .ok_or_else(|| SsdError::InvalidParams("polytope has no insphere radius".into()))?;
    check_radius(r)?;
    if u == v || u >= poly.n_vertices() || v >= poly.n_vertices() {
        return Err(SsdError::InvalidParams(format!("bad vertex pair ({u}, {v})")));
    }
    let (pu, pv) = (poly.vertices[u], poly.vertices[v]);
    let d = midpoint_distance(pu, pv);
    if d < r && discriminant(pu, pv, r) < -DISC_CLAMP {
        return Ok(SegmentType::BodyDiagonal);
    }
    let (x, y) = dual_pair(pu, pv, r)?;
    let alpha = (2.0 + 2.0 * r).sqrt();
    if ((x - pu).norm() - alpha).abs() > ALPHA_REL_TOL * alpha {
        return Ok(SegmentType::FaceDiagonal);
    }
    if (x - y).norm() < tol {
        return Ok(SegmentType::FaceDiagonalThroughCenter);
    }
    let is_vertex = |p: Vec3| poly.vertices.iter().any(|w| w.dist(p) < tol);
    Ok(match (is_vertex(x), is_vertex(y)) {
        (true, true) => SegmentType::Edge,
        (false, false) => SegmentType::BodyDiagonal,
        _ => SegmentType::FaceDiagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> f64 {
        1.0 / 3f64.sqrt()
    }

    #[test]
    fn dual_plane_of_pole() {
        let p = dual_plane(Vec3::Z, 0.8).unwrap();
        assert_eq!(p.offset, -0.8);
        let rho = (1.0f64 - 0.64).sqrt();
        assert!((rho - 0.6).abs() < 1e-15);
        assert!(matches!(dual_plane(Vec3::Z, 1.0), Err(SsdError::InvalidRadius(_))));
        assert!(matches!(dual_plane(Vec3::Z * 2.0, 0.5), Err(SsdError::NonUnitVertex(_))));
    }

    #[test]
    fn dual_plane_of_tetra_vertex_holds_the_opposite_face() {
        let s = s3();
        let p = dual_plane(Vec3::new(s, s, s), 1.0 / 3.0).unwrap();
        for q in [Vec3::new(s, -s, -s), Vec3::new(-s, s, -s), Vec3::new(-s, -s, s)] {
            assert!(crate::geom::signed_distance(&p, q).abs() < 1e-15);
        }
    }

    #[test]
    fn phi_on_tetra_edge_gives_opposite_vertex() {
        let s = s3();
        let x = phi(Vec3::new(s, s, s), Vec3::new(s, -s, -s), 1.0 / 3.0).unwrap();
        assert!((x - Vec3::new(-s, s, -s)).norm() < 1e-15);
    }

    #[test]
    fn phi_orthogonal_pair() {
        let x = phi(Vec3::X, Vec3::Y, 0.5).unwrap();
        assert!((x - Vec3::new(-0.5, -0.5, 0.5f64.sqrt())).norm() < 1e-15);
        assert!((x.dot(Vec3::X) + 0.5).abs() < 1e-15);
        assert!((x.dot(Vec3::Y) + 0.5).abs() < 1e-15);
        assert!((x.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phi_failures() {
        assert!(matches!(phi(Vec3::X, -Vec3::X, 0.5), Err(SsdError::AntipodalInput)));
        let far = Vec3::new(-0.9, 0.19f64.sqrt(), 0.0);
        assert!(matches!(
            phi(Vec3::X, far, 0.5),
            Err(SsdError::DegenerateDiscriminant { .. })
        ));
    }

    #[test]
    fn phi_tangent_case_is_clamped() {
        // 1 + <a,b> = 2r² exactly up to rounding.
        let r: f64 = 0.6;
        let c = 2.0 * r * r - 1.0;
        let b = Vec3::new(c, (1.0 - c * c).sqrt(), 0.0);
        let x = phi(Vec3::X, b, r).unwrap();
        let y = phi(b, Vec3::X, r).unwrap();
        assert!((x - y).norm() < 1e-6);
    }

    #[test]
    fn alpha_values() {
        assert!((parameter_alpha(1.0 / 3.0).unwrap() - (8.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(parameter_alpha(0.8).unwrap(), 3.6f64.sqrt());
        assert!(parameter_alpha(1e-9).unwrap() < alpha_lower_bound(3));
        assert!(parameter_alpha(0.0).is_err());
    }
}

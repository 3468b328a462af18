//! Certification of strong self-duality.

use std::fmt;

use crate::duality::{alpha_lower_bound, midpoint_distance};
use crate::error::{Result, SsdError};
use crate::geom::{signed_distance, Plane, Vec3};
use crate::polytope::{euler_check, Polytope};

/// Angular threshold used when σ is inferred from face normals.
pub const SIGMA_ANGLE_TOL: f64 = 1e-6;
/// Default tolerance for converged polytopes.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default tolerance for search iterates.
pub const ITERATE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SsdReport {
    pub n_vertices: usize,
    pub r: f64,
    pub alpha: f64,
    pub inscribed_dev: f64,
    pub tangency_dev: f64,
    /// Largest signed distance of a vertex outside a face plane.
    pub convexity_dev: f64,
    pub sigma_valid: bool,
    pub orthogonality_dev: f64,
    pub diagonal_dev: f64,
    pub product_dev: f64,
    pub alpha_bound_ok: bool,
    pub euler_ok: bool,
    pub sigma: Vec<usize>,
    pub tol: f64,
    pub passed: bool,
}

impl SsdReport {
    pub fn worst_deviation(&self) -> f64 {
        [
            self.inscribed_dev,
            self.tangency_dev,
            self.convexity_dev,
            self.orthogonality_dev,
            self.diagonal_dev,
            self.product_dev,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// `key: value` lines.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        vec![
            ("passed".into(), self.passed.to_string()),
            ("vertices".into(), self.n_vertices.to_string()),
            ("r".into(), format!("{:.17e}", self.r)),
            ("alpha".into(), format!("{:.17e}", self.alpha)),
            ("inscribed_dev".into(), format!("{:e}", self.inscribed_dev)),
            ("tangency_dev".into(), format!("{:e}", self.tangency_dev)),
            ("convexity_dev".into(), format!("{:e}", self.convexity_dev)),
            ("sigma_valid".into(), self.sigma_valid.to_string()),
            ("orthogonality_dev".into(), format!("{:e}", self.orthogonality_dev)),
            ("diagonal_dev".into(), format!("{:e}", self.diagonal_dev)),
            ("product_dev".into(), format!("{:e}", self.product_dev)),
            ("alpha_bound_ok".into(), self.alpha_bound_ok.to_string()),
            ("euler_ok".into(), self.euler_ok.to_string()),
            ("tol".into(), format!("{:e}", self.tol)),
        ]
    }
}

impl fmt::Display for SsdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.to_key_values() {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}

fn angle_between(a: Vec3, b: Vec3) -> f64 {
    let c = a.cross(b).norm();
    let d = a.dot(b);
    c.atan2(d)
}

/// Check every condition of strong self-duality on `poly`.
///
/// When `poly.sigma` is `None`, σ(v) is taken to be the face whose outward
/// normal points to `−v` within [`SIGMA_ANGLE_TOL`] (or `tol`, if larger).
/// When `poly.r` is `None`, r is the mean distance of the face planes.
pub fn verify_ssd(poly: &Polytope, tol: f64) -> Result<SsdReport> {
    let n = poly.n_vertices();
    if n < 4 || poly.faces.len() < 4 {
        return Err(SsdError::DegenerateInput(format!("{n} vertices")));
    }
    let v = &poly.vertices;
    let inscribed_dev = v.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);

    let planes: Vec<Plane> = (0..poly.faces.len())
        .map(|f| poly.face_plane(f))
        .collect::<Result<_>>()?;
    let mut convexity_dev: f64 = 0.0;
    for (f, pl) in planes.iter().enumerate() {
        if pl.offset <= 0.0 {
            return Err(SsdError::NonConvex(format!("face {f} does not face away from the origin")));
        }
        for p in v {
            convexity_dev = convexity_dev.max(signed_distance(pl, *p));
        }
    }
    if convexity_dev > 1e-3 {
        return Err(SsdError::NonConvex(format!("a vertex lies {convexity_dev:e} outside a face")));
    }

    let r = poly
        .r
        .unwrap_or_else(|| planes.iter().map(|p| p.offset).sum::<f64>() / planes.len() as f64);
    let alpha = (2.0 + 2.0 * r).sqrt();
    let tangency_dev = planes.iter().map(|p| (p.offset - r).abs()).fold(0.0, f64::max);

    let sigma: Vec<usize> = match &poly.sigma {
        Some(s) if s.len() == n => s.clone(),
        Some(s) => {
            return Err(SsdError::InvalidParams(format!("sigma has {} entries for {n} vertices", s.len())))
        }
        None => {
            let thr = SIGMA_ANGLE_TOL.max(tol);
            let mut s = Vec::with_capacity(n);
            for (i, p) in v.iter().enumerate() {
                let best = (0..planes.len())
                    .map(|f| (f, angle_between(planes[f].normal, -*p)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .filter(|&(_, a)| a <= thr)
                    .ok_or(SsdError::NoSigmaCandidate { vertex: i })?;
                s.push(best.0);
            }
            s
        }
    };

    let mut sigma_valid = poly.faces.len() == n;
    let mut seen = vec![false; poly.faces.len()];
    for &f in &sigma {
        if f >= seen.len() || seen[f] {
            sigma_valid = false;
        } else {
            seen[f] = true;
        }
    }
    let on_face = |w: usize, f: usize| sigma.get(f).is_some() && poly.faces[f].contains(&w);
    if sigma_valid {
        for i in 0..n {
            if poly.faces[sigma[i]].contains(&i) {
                sigma_valid = false;
            }
            for j in 0..n {
                if on_face(i, sigma[j]) != on_face(j, sigma[i]) {
                    sigma_valid = false;
                }
            }
        }
    }

    let mut orthogonality_dev: f64 = 0.0;
    let mut diagonal_dev: f64 = 0.0;
    let mut product_dev: f64 = 0.0;
    for i in 0..n {
        let Some(&f) = sigma.get(i) else { continue };
        if f >= planes.len() {
            continue;
        }
        orthogonality_dev = orthogonality_dev.max(angle_between(planes[f].normal, -v[i]));
        for &w in &poly.faces[f] {
            diagonal_dev = diagonal_dev.max(((v[i] - v[w]).norm() - alpha).abs());
        }
        product_dev = product_dev.max((v[i].norm() * planes[f].offset - r).abs());
    }
    if sigma_valid {
        for (a, b) in poly.edges() {
            let (fa, fb) = (&poly.faces[sigma[a]], &poly.faces[sigma[b]]);
            let common: Vec<usize> = fa.iter().copied().filter(|w| fb.contains(w)).collect();
            if common.len() != 2 {
                sigma_valid = false;
                continue;
            }
            let d = midpoint_distance(v[a], v[b]);
            let dd = midpoint_distance(v[common[0]], v[common[1]]);
            product_dev = product_dev.max((d * dd - r).abs());
        }
    }

    let alpha_bound_ok = alpha >= alpha_lower_bound(3) - tol;
    let euler_ok = euler_check(poly).passed;
    let passed = sigma_valid
        && alpha_bound_ok
        && euler_ok
        && r > 0.0
        && r < 1.0
        && [inscribed_dev, tangency_dev, convexity_dev, orthogonality_dev, diagonal_dev, product_dev]
            .iter()
            .all(|&d| d <= tol);
    Ok(SsdReport {
        n_vertices: n,
        r,
        alpha,
        inscribed_dev,
        tangency_dev,
        convexity_dev,
        sigma_valid,
        orthogonality_dev,
        diagonal_dev,
        product_dev,
        alpha_bound_ok,
        euler_ok,
        sigma,
        tol,
        passed,
    })
}

/// Verify and, on success, return the polytope with σ and r filled in.
pub fn certify(mut poly: Polytope, tol: f64) -> Result<Polytope> {
    let rep = verify_ssd(&poly, tol)?;
    if !rep.passed {
        return Err(SsdError::VerificationFailed(format!(
            "worst deviation {:e}, sigma_valid {}",
            rep.worst_deviation(),
            rep.sigma_valid
        )));
    }
    poly.sigma = Some(rep.sigma);
    poly.r = Some(rep.r);
    Ok(poly)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomothetyReport {
    pub deviation: f64,
    pub passed: bool,
}

/// Compare the polar body, scaled by `√r`, with `−1/√r` times the polytope.
pub fn homothety_check(poly: &Polytope, tol: f64) -> HomothetyReport {
    let fail = HomothetyReport { deviation: f64::INFINITY, passed: false };
    if poly.faces.len() != poly.n_vertices() || poly.n_vertices() == 0 {
        return fail;
    }
    let Ok(planes) = (0..poly.faces.len()).map(|f| poly.face_plane(f)).collect::<Result<Vec<_>>>()
    else {
        return fail;
    };
    if planes.iter().any(|p| p.offset <= 0.0) {
        return fail;
    }
    let r = poly
        .r
        .unwrap_or_else(|| planes.iter().map(|p| p.offset).sum::<f64>() / planes.len() as f64);
    let sr = r.sqrt();
    let polar: Vec<Vec3> = planes.iter().map(|p| p.normal * (sr / p.offset)).collect();
    let target: Vec<Vec3> = poly.vertices.iter().map(|v| -*v / sr).collect();
    let mut used = vec![false; target.len()];
    let mut deviation: f64 = 0.0;
    for p in &polar {
        let best = (0..target.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| p.dist(target[a]).total_cmp(&p.dist(target[b])));
        let Some(j) = best else { return fail };
        used[j] = true;
        deviation = deviation.max(p.dist(target[j]));
    }
    HomothetyReport { deviation, passed: deviation <= tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{convex_hull3, HULL_COPLANAR_TOL};

    fn tetra() -> Polytope {
        let s = 1.0 / 3f64.sqrt();
        convex_hull3(
            &[
                Vec3::new(s, s, s),
                Vec3::new(s, -s, -s),
                Vec3::new(-s, s, -s),
                Vec3::new(-s, -s, s),
            ],
            HULL_COPLANAR_TOL,
        )
        .unwrap()
    }

    #[test]
    fn tetrahedron_passes() {
        let rep = verify_ssd(&tetra(), 1e-10).unwrap();
        assert!(rep.passed, "{rep}");
        assert!((rep.r - 1.0 / 3.0).abs() < 1e-12);
        assert!((rep.alpha - (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!(homothety_check(&tetra(), 1e-10).passed);
    }

    #[test]
    fn cube_has_no_sigma() {
        let s = 1.0 / 3f64.sqrt();
        let mut pts = Vec::new();
        for x in [-s, s] {
            for y in [-s, s] {
                for z in [-s, s] {
                    pts.push(Vec3::new(x, y, z));
                }
            }
        }
        let cube = convex_hull3(&pts, HULL_COPLANAR_TOL).unwrap();
        assert!(matches!(verify_ssd(&cube, 1e-9), Err(SsdError::NoSigmaCandidate { .. })));
    }

    #[test]
    fn octahedron_fails_homothety() {
        let pts = [Vec3::X, -Vec3::X, Vec3::Y, -Vec3::Y, Vec3::Z, -Vec3::Z];
        let oct = convex_hull3(&pts, HULL_COPLANAR_TOL).unwrap();
        assert!(!homothety_check(&oct, 1e-6).passed);
    }

    #[test]
    fn inward_vertex_is_nonconvex() {
        let mut t = tetra();
        t.vertices[0] = t.vertices[0] * -0.2;
        assert!(matches!(verify_ssd(&t, 1e-9), Err(SsdError::NonConvex(_))));
    }

    #[test]
    fn wrong_radius_fails() {
        let mut t = tetra();
        t.r = Some(0.3);
        let rep = verify_ssd(&t, 1e-9).unwrap();
        assert!(!rep.passed);
        assert!(rep.tangency_dev > 0.03);
    }
}

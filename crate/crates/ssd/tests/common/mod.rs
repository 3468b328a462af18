#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use ssd::duality::{classify_segment, dual_pair, midpoint_distance, phi, SegmentType};
use ssd::geom::rotate;
use ssd::ltype::construct_ltype;
use ssd::search::{kmw8, ssd23};
use ssd::verifier::verify_ssd;
use ssd::{Polytope, Vec3};

/// Vertex table of the 22-vertex polytope as printed, Z first and X last.
pub const PAPER_TABLE: [(&str, [f64; 3]); 23] = [
    ("Z", [0.0, 0.0, 1.0]),
    ("A", [0.5983202423353512, 0.0, -0.8012570671212621]),
    ("B", [0.4216926266320513, 0.4244554641330405, -0.8012570671212621]),
    ("C", [-0.4444351271090439, 0.4005802418739614, -0.8012570671212621]),
    ("D", [-0.4444351271090439, -0.4005802418739614, -0.8012570671212621]),
    ("E", [0.4216926266320513, -0.4244554641330405, -0.8012570671212621]),
    ("F", [0.8483424447791927, 0.0, 0.5294479165943166]),
    ("G", [0.0224329604142071, 0.8138064392649369, 0.5807028859046416]),
    ("H", [-0.8628874394036844, 0.3590712428534728, 0.3556586980168142]),
    ("I", [-0.8628874394036844, -0.3590712428534728, 0.3556586980168142]),
    ("J", [0.0224329604142071, -0.8138064392649369, 0.5807028859046416]),
    ("K", [0.9891443044532439, 0.0, 0.1469474224602405]),
    ("L", [0.4887101245345391, 0.8460369840318558, -0.2130348230400762]),
    ("M", [-0.6075422756722804, 0.5825733695380467, -0.5399080036228703]),
    ("N", [-0.6075422756722804, -0.5825733695380467, -0.5399080036228703]),
    ("P", [0.4887101245345391, -0.8460369840318558, -0.2130348230400762]),
    ("Q", [0.1228243012703047, 0.9324888687546015, 0.3396744039020674]),
    ("R", [-0.7680489592088464, 0.5746015768538119, -0.2827257047658043]),
    ("S", [-0.7680489592088464, -0.5746015768538119, -0.2827257047658043]),
    ("T", [0.1228243012703047, -0.9324888687546015, 0.3396744039020674]),
    ("U", [0.2797981540096859, 0.9490145065069506, 0.1452048878383263]),
    ("V", [0.2797981540096859, -0.9490145065069506, 0.1452048878383263]),
    ("X", [0.8483424447791927, 0.0, 0.5294479165943166]),
];

/// Every polytope the library can build and certify, with its name.
pub fn verified_polytopes() -> Vec<(String, Polytope)> {
    let mut out = Vec::new();
    for (k, l) in [(1, 3), (1, 5), (1, 7), (2, 3), (2, 5), (3, 3), (3, 5)] {
        if let Ok(p) = construct_ltype(k, l, 1e-9) {
            out.push((format!("P({k},{l})"), p));
        }
    }
    out.push(("ssd23".into(), ssd23(1e-9).unwrap()));
    out.push(("kmw8".into(), kmw8(1e-8).unwrap()));
    out
}

pub fn rotated(p: &Polytope, axis: Vec3, angle: f64) -> Polytope {
    let mut q = p.clone();
    for v in &mut q.vertices {
        *v = rotate(*v, axis, angle);
    }
    q
}

pub fn unit(theta: f64, phi: f64) -> Vec3 {
    Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

/// A unit vector, a radius, and a second unit vector whose dual circle meets
/// the first one in two well separated points.
pub fn admissible() -> impl Strategy<Value = (Vec3, Vec3, f64)> {
    (0.05f64..0.95, -1.0f64..1.0, 0.0f64..std::f64::consts::TAU, 0.05f64..0.95, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(r, cz, az, t, spin)| {
            let a = unit(cz.acos(), az);
            // ⟨a,b⟩ > 2r²−1 keeps the discriminant positive.
            let max = (2.0 * r * r - 1.0).acos();
            let theta = 0.02 + t * (max - 0.04);
            let helper = if a.z.abs() < 0.9 { Vec3::new(0.0, 0.0, 1.0) } else { Vec3::new(1.0, 0.0, 0.0) };
            let perp = a.cross(helper).normalized().unwrap();
            let b = rotate(a * theta.cos() + perp * theta.sin(), a, spin);
            (a, b, r)
        })
}

/// Random rotation angles for a polytope picked by index.
pub fn placed_polytope(count: usize) -> impl Strategy<Value = (usize, Vec3, f64)> {
    (0..count, -1.0f64..1.0, 0.0f64..std::f64::consts::TAU, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(i, cz, az, angle)| (i, unit(cz.acos(), az), angle))
}

pub fn check_involution(a: Vec3, b: Vec3, r: f64) -> Result<(), TestCaseError> {
    let (x, y) = dual_pair(a, b, r).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let back_a = phi(x, y, r).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let back_b = phi(y, x, r).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(back_a.dist(a) < 1e-10, "a: {}", back_a.dist(a));
    prop_assert!(back_b.dist(b) < 1e-10, "b: {}", back_b.dist(b));
    Ok(())
}

pub fn check_on_dual_circle(a: Vec3, b: Vec3, r: f64) -> Result<(), TestCaseError> {
    let x = phi(a, b, r).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!((x.dot(a) + r).abs() < 1e-12, "{}", x.dot(a) + r);
    prop_assert!((x.dot(b) + r).abs() < 1e-12, "{}", x.dot(b) + r);
    prop_assert!((x.norm() - 1.0).abs() < 1e-12);
    Ok(())
}

pub fn check_chord_product(a: Vec3, b: Vec3, r: f64) -> Result<(), TestCaseError> {
    let (x, y) = dual_pair(a, b, r).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let p = midpoint_distance(a, b) * midpoint_distance(x, y);
    prop_assert!((p - r).abs() < 1e-10, "{}", p - r);
    Ok(())
}

pub fn check_principal_diagonals(p: &Polytope) -> Result<(), TestCaseError> {
    let sigma = p.sigma.as_ref().expect("certified polytope carries sigma");
    let alpha = p.alpha().unwrap();
    for (v, &f) in sigma.iter().enumerate() {
        for &w in &p.faces[f] {
            let d = p.vertices[v].dist(p.vertices[w]);
            prop_assert!((d - alpha).abs() < 1e-9, "{v}-{w}: {}", d - alpha);
        }
    }
    Ok(())
}

/// Vertex/face pairs and edge/dual-edge pairs.
pub fn check_pair_products(p: &Polytope) -> Result<(), TestCaseError> {
    let sigma = p.sigma.as_ref().expect("certified polytope carries sigma");
    let r = p.r.unwrap();
    for (v, &f) in sigma.iter().enumerate() {
        let plane = p.face_plane(f).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let d_face = plane.offset.abs();
        prop_assert!((p.vertices[v].norm() * d_face - r).abs() < 1e-10, "vertex {v}");
    }
    for (u, v) in p.edges() {
        let fu = &p.faces[sigma[u]];
        let fv = &p.faces[sigma[v]];
        let common: Vec<usize> = fu.iter().copied().filter(|w| fv.contains(w)).collect();
        prop_assert_eq!(common.len(), 2, "edge {}-{}", u, v);
        let d = midpoint_distance(p.vertices[u], p.vertices[v]);
        let ds = midpoint_distance(p.vertices[common[0]], p.vertices[common[1]]);
        prop_assert!((d * ds - r).abs() < 1e-10, "edge {u}-{v}: {}", d * ds - r);
    }
    Ok(())
}

pub fn check_classification(p: &Polytope) -> Result<(), TestCaseError> {
    for u in 0..p.n_vertices() {
        for v in u + 1..p.n_vertices() {
            let t = classify_segment(u, v, p, 1e-7).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(t == SegmentType::Edge, p.has_edge(u, v), "pair {}-{}: {:?}", u, v, t);
        }
    }
    Ok(())
}

pub fn still_verifies(p: &Polytope, tol: f64) -> bool {
    verify_ssd(p, tol).map(|r| r.passed).unwrap_or(false)
}

pub fn congruent(a: &Polytope, b: &Polytope, tol: f64) -> bool {
    a.n_vertices() == b.n_vertices()
        && a.faces.len() == b.faces.len()
        && a.distance_signature().iter().zip(b.distance_signature()).all(|(x, y)| (x - y).abs() <= tol)
}

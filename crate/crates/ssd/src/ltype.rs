//! Layered (L-type) ssd polyhedra `P(k, l)` and the regular-apex obstruction
//! for `l = 5`.
//!
//! `P(k, l)` has the apex `(0,0,1)` and `k` layers of `l` vertices each, all
//! layers sharing the azimuths `2πj/l`. The last layer is a regular `l`-gon
//! at height `−r`. With polar angles `θ_0 = 0, θ_1, …, θ_k`, the face dual to
//! a vertex of layer `i` spans layers `k−i` and `k−i+1`, which gives one
//! incidence equation per unordered pair `{i, L}` with `i + L ∈ {k, k+1}`:
//!
//! `cos θ_i cos θ_L − cos(π/l) sin θ_i sin θ_L + r = 0`.

use std::f64::consts::PI;

use crate::duality::phi;
use crate::error::{Result, SsdError};
use crate::geom::Vec3;
use crate::polytope::{convex_hull3, face_vector, FaceVector, Polytope, HULL_COPLANAR_TOL};
use crate::verifier::certify;

#[derive(Debug, Clone, PartialEq)]
pub struct LTypeSpec {
    pub k: usize,
    pub l: usize,
    /// Latitudes `π/2 − θ_i` of layers `1..=k`, decreasing from the pole.
    pub latitudes: Vec<f64>,
    pub r: f64,
}

impl LTypeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.l < 3 || self.l % 2 == 0 {
            return Err(SsdError::InvalidParams(format!(
                "need k >= 1 and odd l >= 3, got k={} l={}",
                self.k, self.l
            )));
        }
        if self.latitudes.len() != self.k {
            return Err(SsdError::InvalidParams("one latitude per layer".into()));
        }
        Ok(())
    }

    fn polar(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.latitudes.iter().map(|&phi| PI / 2.0 - phi))
            .collect()
    }

    /// Vertex of layer `i` (0 is the apex) at azimuth index `j`.
    pub fn vertex(&self, i: usize, j: usize) -> Vec3 {
        let th = if i == 0 { 0.0 } else { PI / 2.0 - self.latitudes[i - 1] };
        let az = 2.0 * PI * j as f64 / self.l as f64;
        Vec3::new(th.sin() * az.cos(), th.sin() * az.sin(), th.cos())
    }

    /// The apex followed by layers `1..=k`, each in azimuth order.
    pub fn vertices(&self) -> Vec<Vec3> {
        let mut v = vec![Vec3::Z];
        for i in 1..=self.k {
            for j in 0..self.l {
                v.push(self.vertex(i, j));
            }
        }
        v
    }
}

/// Layer pairs `(i, L)`, `i ≤ L`, carrying one incidence equation each.
fn incidence_pairs(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for s in [k, k + 1] {
        for i in 0..=k {
            if s < i {
                continue;
            }
            let l = s - i;
            if l < i || l > k || (i == 0 && l == 0) {
                continue;
            }
            out.push((i, l));
        }
    }
    out
}

fn residuals_polar(th: &[f64], r: f64, l: usize) -> Vec<f64> {
    let k = th.len() - 1;
    let c = (PI / l as f64).cos();
    incidence_pairs(k)
        .into_iter()
        .map(|(i, m)| th[i].cos() * th[m].cos() - c * th[i].sin() * th[m].sin() + r)
        .collect()
}

/// Signed distances of the designated vertex of each dual face from the dual
/// plane of the vertex at azimuth 0 in the paired layer.
pub fn ltype_residuals(spec: &LTypeSpec) -> Vec<f64> {
    let th = spec.polar();
    let k = spec.k;
    let l = spec.l;
    // The dual face of layer i at azimuth 0 is centred at azimuth π; its
    // vertices nearest to π sit at azimuth index (l−1)/2.
    incidence_pairs(k)
        .into_iter()
        .map(|(i, m)| {
            let v = if i == 0 { Vec3::Z } else { unit_polar(th[i], 0.0) };
            let w = unit_polar(th[m], 2.0 * PI * ((l - 1) / 2) as f64 / l as f64);
            w.dot(v) + spec.r
        })
        .collect()
}

fn unit_polar(th: f64, az: f64) -> Vec3 {
    Vec3::new(th.sin() * az.cos(), th.sin() * az.sin(), th.cos())
}

fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Damped Newton on the incidence system; unknowns `(r, θ_1..θ_k)`.
fn newton(x0: &[f64], k: usize, l: usize, tol: f64) -> Option<Vec<f64>> {
    let c = (PI / l as f64).cos();
    let pairs = incidence_pairs(k);
    let eval = |x: &[f64]| {
        let th: Vec<f64> = std::iter::once(0.0).chain(x[1..].iter().copied()).collect();
        residuals_polar(&th, x[0], l)
    };
    let norm = |v: &[f64]| v.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let mut x = x0.to_vec();
    let mut f = eval(&x);
    for _ in 0..100 {
        if norm(&f) <= tol {
            return Some(x);
        }
        let th: Vec<f64> = std::iter::once(0.0).chain(x[1..].iter().copied()).collect();
        let mut jac = vec![vec![0.0; k + 1]; k + 1];
        for (row, &(i, m)) in pairs.iter().enumerate() {
            jac[row][0] = 1.0;
            let d = |a: usize, b: usize| -th[a].sin() * th[b].cos() - c * th[a].cos() * th[b].sin();
            if i > 0 {
                jac[row][i] += d(i, m);
            }
            if m > 0 {
                jac[row][m] += d(m, i);
            }
        }
        let dx = solve_linear(jac, f.iter().map(|e| -e).collect())?;
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + t * b).collect();
            let fc = eval(&cand);
            if norm(&fc) < norm(&f) || t < 1e-6 {
                x = cand;
                f = fc;
                break;
            }
            t *= 0.5;
        }
    }
    (norm(&f) <= tol).then_some(x)
}

/// Polar angles from the marching sequence `0 → θ_k → θ_1 → θ_{k−1} → …`,
/// where each step takes the other root of the incidence equation.
fn march(r: f64, k: usize, l: usize) -> Option<Vec<f64>> {
    let c = (PI / l as f64).cos();
    let wrap = |t: f64| (t + PI).rem_euclid(2.0 * PI) - PI;
    let mut pts = vec![0.0, (-r).acos()];
    while pts.len() < k + 2 {
        let prev = pts[pts.len() - 2];
        let cur = pts[pts.len() - 1];
        let a = cur.cos();
        let b = c * cur.sin();
        let rr = a.hypot(b);
        if (r / rr).abs() > 1.0 {
            return None;
        }
        let psi = b.atan2(a);
        let w = (-r / rr).acos();
        let r1 = wrap(-psi + w);
        let r2 = wrap(-psi - w);
        let d1 = wrap(r1 - prev).abs();
        let d2 = wrap(r2 - prev).abs();
        pts.push(if d1 < d2 { r2 } else { r1 });
    }
    Some(pts)
}

fn march_closure(r: f64, k: usize, l: usize) -> f64 {
    match march(r, k, l) {
        Some(p) => p[k + 1] - p[k],
        None => f64::NAN,
    }
}

/// Undo the marching order into layer order `θ_1..θ_k`.
fn march_layers(r: f64, k: usize, l: usize) -> Option<Vec<f64>> {
    let p = march(r, k, l)?;
    let mut order = vec![0, k];
    let (mut lo, mut hi) = (1, k.saturating_sub(1));
    while order.len() < k + 1 {
        order.push(lo);
        lo += 1;
        if order.len() < k + 1 {
            order.push(hi);
            hi -= 1;
        }
    }
    let mut th = vec![0.0; k + 1];
    for (idx, &layer) in order.iter().enumerate() {
        th[layer] = p[idx];
    }
    Some(th[1..].to_vec())
}

fn layers_valid(th: &[f64], r: f64) -> bool {
    r > 0.0
        && r < 1.0
        && th[0] > 1e-6
        && th.windows(2).all(|w| w[1] - w[0] > 1e-6)
        && *th.last().unwrap() < PI
}

/// Roots of the marching closure in `r`, in increasing order, restricted to
/// strictly increasing layer sequences.
fn marching_roots(k: usize, l: usize) -> Vec<(f64, Vec<f64>)> {
    let samples = 4000;
    let rs: Vec<f64> = (0..=samples).map(|i| 1e-3 + (1.0 - 2e-3) * i as f64 / samples as f64).collect();
    let g: Vec<f64> = rs.iter().map(|&r| march_closure(r, k, l)).collect();
    let mut out = Vec::new();
    for w in 0..samples {
        let (mut a, mut b) = (rs[w], rs[w + 1]);
        let (mut ga, gb) = (g[w], g[w + 1]);
        if !(ga.is_finite() && gb.is_finite()) || ga * gb > 0.0 || (ga - gb).abs() >= 1.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let gm = march_closure(m, k, l);
            if !gm.is_finite() {
                break;
            }
            if (gm < 0.0) == (ga < 0.0) {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
            if b - a < 1e-16 {
                break;
            }
        }
        let r = 0.5 * (a + b);
        if let Some(th) = march_layers(r, k, l) {
            if layers_valid(&th, r) {
                out.push((r, th));
            }
        }
    }
    out
}

/// Solve the incidence system for `P(k, l)`. Newton is seeded at equally
/// spaced layers first; when that fails or lands on a degenerate layer
/// sequence, the marching roots seed it instead.
pub fn solve_ltype(k: usize, l: usize, tol: f64) -> Result<LTypeSpec> {
    if k == 0 || l < 3 || l % 2 == 0 {
        return Err(SsdError::InvalidParams(format!("need k >= 1 and odd l >= 3, got k={k} l={l}")));
    }
    let target = tol.min(1e-13);
    let to_spec = |x: &[f64]| LTypeSpec {
        k,
        l,
        latitudes: x[1..].iter().map(|t| PI / 2.0 - t).collect(),
        r: x[0],
    };
    let r0: f64 = 0.5;
    let thk = (-r0).acos();
    let mut seed = vec![r0];
    seed.extend((1..=k).map(|i| thk * i as f64 / k as f64));
    if let Some(x) = newton(&seed, k, l, target) {
        if layers_valid(&x[1..], x[0]) {
            return Ok(to_spec(&x));
        }
    }
    for (r, th) in marching_roots(k, l) {
        let mut x = vec![r];
        x.extend(th);
        if let Some(x) = newton(&x, k, l, target) {
            if layers_valid(&x[1..], x[0]) {
                return Ok(to_spec(&x));
            }
        }
    }
    Err(SsdError::NoClosure(format!("P({k},{l}) has no admissible layer sequence")))
}

/// The face vector every `P(k, l)` must have.
pub fn expected_face_vector(k: usize, l: usize) -> FaceVector {
    if l == 3 {
        FaceVector::from_pairs(&[(3, 4), (4, 3 * (k - 1))])
    } else {
        FaceVector::from_pairs(&[(l, 1), (3, l), (4, l * (k - 1))])
    }
}

/// Build `P(k, l)` and certify it at `tol`.
pub fn construct_ltype(k: usize, l: usize, tol: f64) -> Result<Polytope> {
    let spec = solve_ltype(k, l, tol)?;
    let mut poly = convex_hull3(&spec.vertices(), HULL_COPLANAR_TOL)?;
    if poly.n_vertices() != k * l + 1 || face_vector(&poly) != expected_face_vector(k, l) {
        return Err(SsdError::NoClosure(format!(
            "P({k},{l}) hull has face vector {}",
            face_vector(&poly)
        )));
    }
    poly.r = Some(spec.r);
    certify(poly, tol)
}

/// Named constants of the regular-apex obstruction for `P(k, 5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P5Obstruction {
    /// `√((5+2√5)/15)`, forced by a regular apex triangle.
    pub r: f64,
    /// `(10−√5)/15`. This is not `cos b` for the `b` below.
    pub cos_b: f64,
    pub a_deg: f64,
    /// Arc subtended by a chord of length `√(1−r²)`.
    pub b_deg: f64,
    pub c_deg: f64,
    pub sum_deg: f64,
    /// Squared length `(15+8√5)/15` of the segment `u(1,1)u(1,2)`.
    pub chord2: f64,
    /// `(45−8√5)/60`, the largest admissible `r²` for that segment.
    pub r2_bound: f64,
    /// `1 + ⟨u(1,1), u(1,2)⟩ − 2r²`.
    pub discriminant: f64,
    pub obstruction_holds: bool,
}

pub fn p5_obstruction_constants() -> P5Obstruction {
    let s5 = 5f64.sqrt();
    let r = ((5.0 + 2.0 * s5) / 15.0).sqrt();
    let cos_b = (10.0 - s5) / 15.0;
    let a = r.acos();
    let b = 2.0 * ((1.0 - r * r).sqrt() / 2.0).asin();
    let c = (s5 / 5.0).acos();
    let chord2 = (15.0 + 8.0 * s5) / 15.0;
    let r2_bound = (45.0 - 8.0 * s5) / 60.0;
    let dot = 1.0 - chord2 / 2.0;
    let discriminant = 1.0 + dot - 2.0 * r * r;
    P5Obstruction {
        r,
        cos_b,
        a_deg: a.to_degrees(),
        b_deg: b.to_degrees(),
        c_deg: c.to_degrees(),
        sum_deg: (a + b + c).to_degrees(),
        chord2,
        r2_bound,
        discriminant,
        obstruction_holds: r * r > r2_bound,
    }
}

/// The dual-edge step on `u(1,1)u(1,2)` under the regular-apex radius. It
/// fails with a negative discriminant.
pub fn p5_regular_apex_step() -> Result<Vec3> {
    let c = p5_obstruction_constants();
    let half = (c.chord2.sqrt() / 2.0).asin();
    let u1 = Vec3::new(half.sin(), 0.0, half.cos());
    let u2 = Vec3::new(-half.sin(), 0.0, half.cos());
    phi(u1, u2, c.r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_count_matches_unknowns() {
        for k in 1..8 {
            assert_eq!(incidence_pairs(k).len(), k + 1);
        }
    }

    #[test]
    fn simplex_latitudes_close() {
        let spec = LTypeSpec {
            k: 1,
            l: 3,
            latitudes: vec![PI / 2.0 - (-1.0f64 / 3.0).acos()],
            r: 1.0 / 3.0,
        };
        assert!(ltype_residuals(&spec).iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn untuned_pentagonal_pyramid_does_not_close() {
        let spec = LTypeSpec { k: 1, l: 5, latitudes: vec![-0.3], r: 0.5 };
        assert!(ltype_residuals(&spec).iter().any(|e| e.abs() > 1e-3));
    }

    #[test]
    fn residual_forms_agree() {
        let spec = LTypeSpec { k: 3, l: 7, latitudes: vec![0.9, 0.1, -0.6], r: 0.6 };
        let a = ltype_residuals(&spec);
        let b = residuals_polar(&spec.polar(), spec.r, spec.l);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn pentagonal_pyramid_radius() {
        let s = solve_ltype(1, 5, 1e-12).unwrap();
        assert!((s.r - 1.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn even_base_rejected() {
        assert!(matches!(construct_ltype(1, 4, 1e-9), Err(SsdError::InvalidParams(_))));
    }

    #[test]
    fn regular_apex_step_degenerates() {
        assert!(matches!(
            p5_regular_apex_step(),
            Err(SsdError::DegenerateDiscriminant { .. })
        ));
    }
}

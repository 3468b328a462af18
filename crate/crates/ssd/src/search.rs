//! The pentagon-seeded residual system and its grid-refinement solver.
//!
//! A mirror-symmetric pentagon `ABCDE` at height `−r` is pushed through
//! the dual-edge map until the vertex chain closes up; three residuals
//! measure how far the closure is from exact.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::duality::phi_unchecked;
use crate::error::{Result, SsdError};
use crate::geom::Vec3;
use crate::polytope::{convex_hull3, Polytope, HULL_COPLANAR_TOL};
use crate::reconstruct::{reconstruct_from_face, ReconstructOptions};
use crate::verifier::certify;

/// Converged parameters of the 22-vertex polytope, in degrees and absolute.
pub const KAPPA27_DEG: f64 = 45.18708115925679;
pub const LAMBDA27_DEG: f64 = 137.9708898008123;
pub const R27: f64 = 0.801257067121262;

/// Parameters of the 8-vertex polytope with face vector (5, 2, 1).
pub const KMW_R: f64 = 0.493643648472824;
pub const KMW_KAPPA_DEG: f64 = 25.73186609765885;
pub const KMW_LAMBDA_DEG: f64 = 167.1340669511706;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    /// Radians.
    pub kappa: f64,
    /// Radians.
    pub lambda: f64,
    pub r: f64,
    /// Initial half-width of the box: radians for the angles, absolute for r.
    pub delta0: f64,
    pub n: usize,
    pub shrink: f64,
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            kappa: 45f64.to_radians(),
            lambda: 135f64.to_radians(),
            r: 0.8,
            delta0: 0.1,
            n: 200,
            shrink: 1.0 / 3.0,
            tol: 1e-15,
            max_steps: 40,
        }
    }
}

impl SearchParams {
    /// Reduced lattice for quick runs.
    pub fn fast() -> Self {
        SearchParams { n: 40, max_steps: 60, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(SsdError::InvalidParams(m.into()));
        if !(self.kappa > 0.0 && self.kappa < self.lambda && self.lambda < PI) {
            return bad("need 0 < kappa < lambda < pi");
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return bad("need 0 < r < 1");
        }
        if self.n < 2 {
            return bad("need n >= 2");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("need 0 < shrink < 1");
        }
        if !(self.delta0 > 0.0) || !self.delta0.is_finite() {
            return bad("need delta0 > 0");
        }
        if !(self.tol >= 0.0) {
            return bad("need tol >= 0");
        }
        Ok(())
    }
}

/// The pentagon `a..e` and the apex `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pentagon {
    pub a: Vec3,
    pub b: Vec3,
    pub c: Vec3,
    pub d: Vec3,
    pub e: Vec3,
    pub z: Vec3,
}

impl Pentagon {
    pub fn cycle(&self) -> [Vec3; 5] {
        [self.a, self.b, self.c, self.d, self.e]
    }
}

pub fn pentagon_vertices(kappa: f64, lambda: f64, r: f64) -> Result<Pentagon> {
    if !(kappa > 0.0 && kappa < lambda && lambda < PI) {
        return Err(SsdError::InvalidParams("need 0 < kappa < lambda < pi".into()));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(SsdError::InvalidParams("need 0 < r < 1".into()));
    }
    Ok(pentagon_unchecked(kappa, lambda, r))
}

fn pentagon_unchecked(kappa: f64, lambda: f64, r: f64) -> Pentagon {
    let rho = (1.0 - r * r).sqrt();
    let (sk, ck) = kappa.sin_cos();
    let (sl, cl) = lambda.sin_cos();
    Pentagon {
        a: Vec3::new(rho, 0.0, -r),
        b: Vec3::new(rho * ck, rho * sk, -r),
        c: Vec3::new(rho * cl, rho * sl, -r),
        d: Vec3::new(rho * cl, -rho * sl, -r),
        e: Vec3::new(rho * ck, -rho * sk, -r),
        z: Vec3::Z,
    }
}

/// Every point of the construction. `rv` is the vertex R; `x` and `y` are
/// the two non-proper intersection points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chain {
    pub a: Vec3,
    pub b: Vec3,
    pub c: Vec3,
    pub d: Vec3,
    pub e: Vec3,
    pub z: Vec3,
    pub f: Vec3,
    pub g: Vec3,
    pub h: Vec3,
    pub i: Vec3,
    pub j: Vec3,
    pub k: Vec3,
    pub l: Vec3,
    pub m: Vec3,
    pub n: Vec3,
    pub p: Vec3,
    pub q: Vec3,
    pub rv: Vec3,
    pub s: Vec3,
    pub t: Vec3,
    pub u: Vec3,
    pub v: Vec3,
    pub x: Vec3,
    pub y: Vec3,
}

impl Chain {
    /// The labelled rows Z, A..V, X in table order.
    pub fn table(&self) -> Vec<(&'static str, Vec3)> {
        vec![
            ("Z", self.z),
            ("A", self.a),
            ("B", self.b),
            ("C", self.c),
            ("D", self.d),
            ("E", self.e),
            ("F", self.f),
            ("G", self.g),
            ("H", self.h),
            ("I", self.i),
            ("J", self.j),
            ("K", self.k),
            ("L", self.l),
            ("M", self.m),
            ("N", self.n),
            ("P", self.p),
            ("Q", self.q),
            ("R", self.rv),
            ("S", self.s),
            ("T", self.t),
            ("U", self.u),
            ("V", self.v),
            ("X", self.x),
        ]
    }

    /// Chain points only, keyed by their lowercase names.
    pub fn named(&self) -> Vec<(&'static str, Vec3)> {
        vec![
            ("f", self.f),
            ("g", self.g),
            ("h", self.h),
            ("i", self.i),
            ("j", self.j),
            ("k", self.k),
            ("l", self.l),
            ("m", self.m),
            ("n", self.n),
            ("p", self.p),
            ("q", self.q),
            ("rv", self.rv),
            ("s", self.s),
            ("t", self.t),
            ("u", self.u),
            ("v", self.v),
            ("x", self.x),
            ("y", self.y),
        ]
    }
}

pub fn build_chain(kappa: f64, lambda: f64, r: f64) -> Result<Chain> {
    let pent = pentagon_vertices(kappa, lambda, r)?;
    chain_from(&pent, r)
}

fn chain_from(p: &Pentagon, r: f64) -> Result<Chain> {
    let ph = |name: &'static str, a: Vec3, b: Vec3| {
        phi_unchecked(a, b, r).map_err(|e| match e {
            SsdError::DegenerateDiscriminant { value, .. } => {
                SsdError::DegenerateDiscriminant { value, at: Some(name.to_string()) }
            }
            other => other,
        })
    };
    let (a, b, c, d, e) = (p.a, p.b, p.c, p.d, p.e);
    let f = ph("f", d, c)?;
    let g = ph("g", e, d)?;
    let h = ph("h", a, e)?;
    let i = ph("i", b, a)?;
    let j = ph("j", c, b)?;
    let k = ph("k", h, i)?;
    let l = ph("l", i, j)?;
    let m = ph("m", j, f)?;
    let n = ph("n", f, g)?;
    let pp = ph("p", g, h)?;
    let q = ph("q", pp, n)?;
    let rv = ph("rv", k, pp)?;
    let s = ph("s", l, k)?;
    let t = ph("t", m, l)?;
    let y = ph("y", m, n)?;
    let u = ph("u", s, t)?;
    let v = ph("v", q, rv)?;
    let x = ph("x", rv, s)?;
    Ok(Chain { a, b, c, d, e, z: p.z, f, g, h, i, j, k, l, m, n, p: pp, q, rv, s, t, u, v, x, y })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualTriple {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub error: f64,
}

impl ResidualTriple {
    pub const INFEASIBLE: ResidualTriple = ResidualTriple {
        e1: f64::INFINITY,
        e2: f64::INFINITY,
        e3: f64::INFINITY,
        error: f64::INFINITY,
    };
}

/// Distance of `v` from the plane through `p0, p1, p2`.
fn plane_distance(p0: Vec3, p1: Vec3, p2: Vec3, v: Vec3) -> f64 {
    let c = (p1 - p0).cross(p2 - p0);
    (c.dot(v - p0)).abs() / c.norm()
}

pub fn residuals_of_chain(ch: &Chain) -> ResidualTriple {
    let e1 = (ch.f - ch.x).norm();
    let e2 = plane_distance(ch.n, ch.s, ch.t, ch.v);
    let e3 = plane_distance(ch.t, ch.f, ch.j, ch.v);
    let error = e1.max(e2).max(e3);
    if error.is_nan() {
        return ResidualTriple::INFEASIBLE;
    }
    ResidualTriple { e1, e2, e3, error }
}

/// Residuals at a parameter point; infeasible points score `+∞`.
pub fn residuals(kappa: f64, lambda: f64, r: f64) -> ResidualTriple {
    match build_chain(kappa, lambda, r) {
        Ok(ch) => residuals_of_chain(&ch),
        Err(_) => ResidualTriple::INFEASIBLE,
    }
}

fn error_at(kappa: f64, lambda: f64, r: f64) -> f64 {
    if !(kappa > 0.0 && kappa < lambda && lambda < PI && r > 0.0 && r < 1.0) {
        return f64::INFINITY;
    }
    match chain_from(&pentagon_unchecked(kappa, lambda, r), r) {
        Ok(ch) => residuals_of_chain(&ch).error,
        Err(_) => f64::INFINITY,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub kappa: f64,
    pub lambda: f64,
    pub r: f64,
    pub delta: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Radians.
    pub kappa: f64,
    /// Radians.
    pub lambda: f64,
    pub r: f64,
    pub error: f64,
    pub steps: usize,
    pub trace: Vec<TraceRow>,
}

impl fmt::Display for SearchOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "step  kappa_deg                lambda_deg               r                    error")?;
        for t in &self.trace {
            writeln!(
                f,
                "{:>4}  {:<23.16} {:<23.16} {:<20.17} {:.3e}",
                t.step,
                t.kappa.to_degrees(),
                t.lambda.to_degrees(),
                t.r,
                t.error
            )?;
        }
        Ok(())
    }
}

/// Lexicographically smallest lattice index among the minimal errors.
fn lattice_min(c: [f64; 3], delta: f64, n: usize) -> (f64, [usize; 3]) {
    let step = 2.0 * delta / n as f64;
    let coord = |center: f64, i: usize| {
        if i == n {
            center + delta
        } else {
            center - delta + step * i as f64
        }
    };
    let better = |a: (f64, [usize; 3]), b: (f64, [usize; 3])| {
        // NaN never occurs: error_at maps it to +∞.
        if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let kappa = coord(c[0], i);
            let mut best = (f64::INFINITY, [i, usize::MAX, usize::MAX]);
            for j in 0..=n {
                let lambda = coord(c[1], j);
                for k in 0..=n {
                    let e = error_at(kappa, lambda, coord(c[2], k));
                    best = better(best, (e, [i, j, k]));
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::INFINITY, [usize::MAX; 3]), better)
}

/// Coordinate-grid refinement: evaluate the `(n+1)³` lattice of the current
/// box, recentre at its best point and shrink the box, until the error drops
/// to `tol` or `max_steps` sweeps have run.
pub fn grid_refine(params: &SearchParams) -> Result<SearchOutcome> {
    params.validate()?;
    let n = params.n;
    let mut c = [params.kappa, params.lambda, params.r];
    let mut err = error_at(c[0], c[1], c[2]);
    let mut delta = params.delta0;
    let mut trace = Vec::new();
    for step in 1..=params.max_steps {
        let (e, idx) = lattice_min(c, delta, n);
        if e.is_finite() && idx[0] != usize::MAX {
            let h = 2.0 * delta / n as f64;
            let pick = |center: f64, i: usize| {
                if i == n {
                    center + delta
                } else {
                    center - delta + h * i as f64
                }
            };
            c = [pick(c[0], idx[0]), pick(c[1], idx[1]), pick(c[2], idx[2])];
            err = e;
        }
        trace.push(TraceRow { step, kappa: c[0], lambda: c[1], r: c[2], delta, error: err });
        if err <= params.tol {
            return Ok(SearchOutcome { kappa: c[0], lambda: c[1], r: c[2], error: err, steps: step, trace });
        }
        delta *= params.shrink;
    }
    Err(SsdError::NoConvergence(Box::new(SearchOutcome {
        kappa: c[0],
        lambda: c[1],
        r: c[2],
        error: err,
        steps: params.max_steps,
        trace,
    })))
}

/// The 22 distinct vertices Z, A..V of the construction (X coincides with F).
pub fn ssd23_vertices(kappa: f64, lambda: f64, r: f64) -> Result<Vec<(&'static str, Vec3)>> {
    let ch = build_chain(kappa, lambda, r)?;
    Ok(ch.table().into_iter().filter(|(name, _)| *name != "X").collect())
}

/// Hull of the converged construction, certified as strongly self-dual.
pub fn assemble_ssd23(kappa: f64, lambda: f64, r: f64, tol: f64) -> Result<Polytope> {
    let res = residuals(kappa, lambda, r);
    if !(res.error <= tol) {
        return Err(SsdError::VerificationFailed(format!(
            "residual {:e} exceeds tolerance {tol:e}",
            res.error
        )));
    }
    let pts: Vec<Vec3> = ssd23_vertices(kappa, lambda, r)?.into_iter().map(|(_, p)| p).collect();
    let hull = convex_hull3(&pts, HULL_COPLANAR_TOL)?;
    if hull.n_vertices() != pts.len() {
        return Err(SsdError::VerificationFailed(format!(
            "{} of {} points are hull vertices",
            hull.n_vertices(),
            pts.len()
        )));
    }
    let mut poly = hull;
    poly.r = Some(r);
    certify(poly, tol)
}

/// The published 22-vertex polytope.
pub fn ssd23(tol: f64) -> Result<Polytope> {
    assemble_ssd23(KAPPA27_DEG.to_radians(), LAMBDA27_DEG.to_radians(), R27, tol)
}

/// The 8-vertex polytope, grown from its pentagonal face.
pub fn kmw8(tol: f64) -> Result<Polytope> {
    let pent = pentagon_vertices(KMW_KAPPA_DEG.to_radians(), KMW_LAMBDA_DEG.to_radians(), KMW_R)?;
    let opts = ReconstructOptions { tol, assume_closure: Some(1e-9), ..Default::default() };
    let poly = reconstruct_from_face(&pent.cycle(), &opts)?;
    if poly.n_vertices() != 8 {
        return Err(SsdError::VerificationFailed(format!("{} vertices", poly.n_vertices())));
    }
    Ok(poly)
}

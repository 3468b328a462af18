//! Polytope data model, convex hulls and face-vector accounting.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Result, SsdError};
use crate::geom::{fit_plane, signed_distance, Plane, Vec3};

/// Default coplanar-merge tolerance of the hull.
pub const HULL_COPLANAR_TOL: f64 = 1e-7;
/// Points closer than this are treated as one vertex.
pub const DEDUP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub vertices: Vec<Vec3>,
    /// Vertex-index cycles, counterclockwise seen from outside, each starting
    /// at its smallest index.
    pub faces: Vec<Vec<usize>>,
    /// `sigma[v]` is the index of the face paired with vertex `v`.
    pub sigma: Option<Vec<usize>>,
    /// Insphere radius.
    pub r: Option<f64>,
}

impl Polytope {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<Vec<usize>>) -> Self {
        let mut p = Polytope { vertices, faces, sigma: None, r: None };
        p.canonicalize();
        p
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// `α = √(2+2r)` when `r` is known.
    pub fn alpha(&self) -> Option<f64> {
        self.r.map(|r| (2.0 + 2.0 * r).sqrt())
    }

    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| {
                (0..f.len()).map(move |k| {
                    let (a, b) = (f[k], f[(k + 1) % f.len()]);
                    (a.min(b), a.max(b))
                })
            })
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.faces.iter().any(|f| {
            (0..f.len()).any(|k| {
                let (x, y) = (f[k], f[(k + 1) % f.len()]);
                (x == a && y == b) || (x == b && y == a)
            })
        })
    }

    pub fn face_points(&self, f: usize) -> Vec<Vec3> {
        self.faces[f].iter().map(|&i| self.vertices[i]).collect()
    }

    /// Least-squares plane of face `f`, oriented outward.
    pub fn face_plane(&self, f: usize) -> Result<Plane> {
        let pts = self.face_points(f);
        let plane = fit_plane(&pts)?;
        let outward = self.face_orientation_normal(f);
        Ok(if plane.normal.dot(outward) < 0.0 { plane.flipped() } else { plane })
    }

    /// Newell normal of the face cycle, outward for a counterclockwise cycle.
    pub fn face_orientation_normal(&self, f: usize) -> Vec3 {
        let cyc = &self.faces[f];
        let mut n = Vec3::ZERO;
        for k in 0..cyc.len() {
            let a = self.vertices[cyc[k]];
            let b = self.vertices[cyc[(k + 1) % cyc.len()]];
            n += a.cross(b);
        }
        n
    }

    /// Rotate every face cycle to start at its smallest index, then sort the
    /// face list; `sigma` is remapped accordingly.
    pub fn canonicalize(&mut self) {
        for f in &mut self.faces {
            if let Some(pos) = f.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i) {
                f.rotate_left(pos);
            }
        }
        let mut order: Vec<usize> = (0..self.faces.len()).collect();
        order.sort_by(|&a, &b| self.faces[a].cmp(&self.faces[b]));
        let mut inv = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inv[old] = new;
        }
        self.faces = order.iter().map(|&i| self.faces[i].clone()).collect();
        if let Some(s) = &mut self.sigma {
            for f in s.iter_mut() {
                *f = inv[*f];
            }
        }
    }

    /// Apply a linear map (typically a rotation) to every vertex.
    pub fn transformed(&self, m: impl Fn(Vec3) -> Vec3) -> Polytope {
        let mut p = self.clone();
        for v in &mut p.vertices {
            *v = m(*v);
        }
        p
    }

    /// Sorted list of all pairwise vertex distances.
    pub fn distance_signature(&self) -> Vec<f64> {
        let v = &self.vertices;
        let mut d = Vec::with_capacity(v.len() * v.len() / 2);
        for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                d.push(v[i].dist(v[j]));
            }
        }
        d.sort_by(f64::total_cmp);
        d
    }

    /// Per-vertex sorted distance profiles, themselves sorted.
    pub fn vertex_profiles(&self) -> Vec<Vec<f64>> {
        let v = &self.vertices;
        let mut prof: Vec<Vec<f64>> = (0..v.len())
            .map(|i| {
                let mut d: Vec<f64> = (0..v.len()).filter(|&j| j != i).map(|j| v[i].dist(v[j])).collect();
                d.sort_by(f64::total_cmp);
                d
            })
            .collect();
        prof.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        prof
    }

    /// Congruence test by comparing distance signatures and per-vertex
    /// distance profiles within `tol`.
    pub fn congruent_to(&self, other: &Polytope, tol: f64) -> bool {
        if self.n_vertices() != other.n_vertices() || self.faces.len() != other.faces.len() {
            return false;
        }
        if face_vector(self) != face_vector(other) {
            return false;
        }
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol);
        if !close(&self.distance_signature(), &other.distance_signature()) {
            return false;
        }
        // Profiles are compared greedily: each profile must find an unused
        // partner within tolerance.
        let pa = self.vertex_profiles();
        let pb = other.vertex_profiles();
        let mut used = vec![false; pb.len()];
        for a in &pa {
            match (0..pb.len()).find(|&j| !used[j] && close(a, &pb[j])) {
                Some(j) => used[j] = true,
                None => return false,
            }
        }
        true
    }
}

/// Counts `α_l` of `l`-gonal faces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FaceVector {
    pub counts: BTreeMap<usize, usize>,
}

impl FaceVector {
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        let mut counts = BTreeMap::new();
        for &(l, c) in pairs {
            if c > 0 {
                *counts.entry(l).or_insert(0) += c;
            }
        }
        FaceVector { counts }
    }

    pub fn get(&self, l: usize) -> usize {
        self.counts.get(&l).copied().unwrap_or(0)
    }

    pub fn n_faces(&self) -> usize {
        self.counts.values().sum()
    }

    /// `Σ l·α_l`, twice the edge count.
    pub fn incidences(&self) -> usize {
        self.counts.iter().map(|(l, c)| l * c).sum()
    }

    /// `Σ (4 − l)·α_l`.
    pub fn euler_weight(&self) -> i64 {
        self.counts.iter().map(|(&l, &c)| (4 - l as i64) * c as i64).sum()
    }

    pub fn satisfies_euler_relation(&self) -> bool {
        self.euler_weight() == 4
    }

    pub fn has_even_incidences(&self) -> bool {
        self.incidences() % 2 == 0
    }
}

impl fmt::Display for FaceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.counts.iter().rev().map(|(l, c)| format!("a{l}={c}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

pub fn face_vector(poly: &Polytope) -> FaceVector {
    let mut counts = BTreeMap::new();
    for f in &poly.faces {
        *counts.entry(f.len()).or_insert(0) += 1;
    }
    FaceVector { counts }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EulerCheck {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub passed: bool,
}

pub fn euler_check(poly: &Polytope) -> EulerCheck {
    let v = poly.n_vertices();
    let e = poly.edges().len();
    let f = poly.faces.len();
    let passed = f + v == e + 2 && f == v && v >= 1 && e == 2 * (v - 1);
    EulerCheck { v, e, f, passed }
}

/// Merge points closer than `tol`, keeping the first occurrence. Returns the
/// kept points and the map from input index to kept index.
pub fn dedup_points(points: &[Vec3], tol: f64) -> (Vec<Vec3>, Vec<usize>) {
    let mut kept: Vec<Vec3> = Vec::new();
    let mut map = Vec::with_capacity(points.len());
    for p in points {
        match kept.iter().position(|q| q.dist(*p) <= tol) {
            Some(i) => map.push(i),
            None => {
                map.push(kept.len());
                kept.push(*p);
            }
        }
    }
    (kept, map)
}

#[derive(Clone, Copy)]
struct Tri {
    v: [usize; 3],
    n: Vec3,
    d: f64,
    alive: bool,
}

fn make_tri(pts: &[Vec3], a: usize, b: usize, c: usize) -> Tri {
    let n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    let n = n.normalized().unwrap_or(n);
    Tri { v: [a, b, c], n, d: n.dot(pts[a]), alive: true }
}

/// Convex hull by incremental insertion, then adjacent triangles whose
/// planes agree within `coplanar_tol` are merged into polygonal faces.
/// Input points are first deduplicated at [`DEDUP_TOL`]; only hull vertices
/// are kept, in input order.
pub fn convex_hull3(points: &[Vec3], coplanar_tol: f64) -> Result<Polytope> {
    let (pts, _) = dedup_points(points, DEDUP_TOL);
    if pts.len() < 4 {
        return Err(SsdError::DegenerateInput(format!("{} distinct points", pts.len())));
    }
    if pts.iter().any(|p| !p.is_finite()) {
        return Err(SsdError::DegenerateInput("non-finite coordinate".into()));
    }
    let scale = pts.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
    let eps = 1e-12 * scale;

    // Initial tetrahedron from extreme points.
    let i0 = 0;
    let i1 = (0..pts.len())
        .max_by(|&a, &b| pts[a].dist(pts[i0]).total_cmp(&pts[b].dist(pts[i0])))
        .unwrap();
    let line = pts[i1] - pts[i0];
    let i2 = (0..pts.len())
        .max_by(|&a, &b| {
            line.cross(pts[a] - pts[i0]).norm().total_cmp(&line.cross(pts[b] - pts[i0]).norm())
        })
        .unwrap();
    let nrm = line.cross(pts[i2] - pts[i0]);
    if nrm.norm() <= eps * line.norm() {
        return Err(SsdError::DegenerateInput("points are collinear".into()));
    }
    let i3 = (0..pts.len())
        .max_by(|&a, &b| nrm.dot(pts[a] - pts[i0]).abs().total_cmp(&nrm.dot(pts[b] - pts[i0]).abs()))
        .unwrap();
    let vol = nrm.dot(pts[i3] - pts[i0]);
    if vol.abs() <= eps * nrm.norm() {
        return Err(SsdError::DegenerateInput("points are coplanar".into()));
    }
    let mut tris: Vec<Tri> = Vec::new();
    let base = if vol > 0.0 { [i0, i2, i1] } else { [i0, i1, i2] };
    tris.push(make_tri(&pts, base[0], base[1], base[2]));
    tris.push(make_tri(&pts, base[0], base[1], i3));
    tris.push(make_tri(&pts, base[1], base[2], i3));
    tris.push(make_tri(&pts, base[2], base[0], i3));
    let centroid = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
    for t in tris.iter_mut() {
        if t.n.dot(centroid) > t.d {
            t.v.swap(1, 2);
            t.n = -t.n;
            t.d = -t.d;
        }
    }

    for p in 0..pts.len() {
        if [i0, i1, i2, i3].contains(&p) {
            continue;
        }
        let q = pts[p];
        let visible: Vec<usize> = (0..tris.len())
            .filter(|&t| tris[t].alive && tris[t].n.dot(q) - tris[t].d > eps)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for &t in &visible {
            let v = tris[t].v;
            for k in 0..3 {
                *edge_count.entry((v[k], v[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        let horizon: Vec<(usize, usize)> = visible
            .iter()
            .flat_map(|&t| {
                let v = tris[t].v;
                (0..3).map(move |k| (v[k], v[(k + 1) % 3]))
            })
            .filter(|&(a, b)| !edge_count.contains_key(&(b, a)))
            .collect();
        for &t in &visible {
            tris[t].alive = false;
        }
        for (a, b) in horizon {
            tris.push(make_tri(&pts, a, b, p));
        }
    }
    let tris: Vec<Tri> = tris.into_iter().filter(|t| t.alive).collect();

    // Merge coplanar neighbours with union-find over shared edges.
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        for k in 0..3 {
            owner.insert((t.v[k], t.v[(k + 1) % 3]), i);
        }
    }
    let mut parent: Vec<usize> = (0..tris.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let plane_of = |t: &Tri| Plane { normal: t.n, offset: t.d };
    for (i, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t.v[k], t.v[(k + 1) % 3]);
            let Some(&j) = owner.get(&(b, a)) else {
                return Err(SsdError::NonConvex("hull is not closed".into()));
            };
            let u = &tris[j];
            let far_j = u.v.iter().find(|&&x| x != a && x != b).copied().unwrap();
            let far_i = t.v.iter().find(|&&x| x != a && x != b).copied().unwrap();
            if signed_distance(&plane_of(t), pts[far_j]).abs() <= coplanar_tol
                && signed_distance(&plane_of(u), pts[far_i]).abs() <= coplanar_tol
            {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..tris.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for members in groups.values() {
        let mut next: HashMap<usize, usize> = HashMap::new();
        let inside: std::collections::HashSet<usize> = members.iter().copied().collect();
        for &i in members {
            let t = &tris[i];
            for k in 0..3 {
                let (a, b) = (t.v[k], t.v[(k + 1) % 3]);
                if !inside.contains(&owner[&(b, a)]) {
                    if next.insert(a, b).is_some() {
                        return Err(SsdError::NonConvex("face boundary is not a simple cycle".into()));
                    }
                }
            }
        }
        let start = *next.keys().min().unwrap();
        let mut cyc = vec![start];
        let mut cur = next[&start];
        while cur != start {
            cyc.push(cur);
            if cyc.len() > next.len() {
                return Err(SsdError::NonConvex("face boundary does not close".into()));
            }
            cur = next[&cur];
        }
        if cyc.len() != next.len() {
            return Err(SsdError::NonConvex("face boundary has several cycles".into()));
        }
        // Drop vertices lying on a straight boundary segment.
        let mut k = 0;
        while cyc.len() > 3 && k < cyc.len() {
            let m = cyc.len();
            let (a, b, c) = (pts[cyc[(k + m - 1) % m]], pts[cyc[k]], pts[cyc[(k + 1) % m]]);
            let area = (b - a).cross(c - b).norm();
            if area <= coplanar_tol * (b - a).norm().max((c - b).norm()) {
                cyc.remove(k);
            } else {
                k += 1;
            }
        }
        faces.push(cyc);
    }

    let mut used: Vec<usize> = faces.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let mut remap = vec![usize::MAX; pts.len()];
    for (new, &old) in used.iter().enumerate() {
        remap[old] = new;
    }
    let vertices: Vec<Vec3> = used.iter().map(|&i| pts[i]).collect();
    let faces = faces
        .into_iter()
        .map(|f| f.into_iter().map(|i| remap[i]).collect())
        .collect();
    Ok(Polytope::new(vertices, faces))
}

//! Growing an ssd polyhedron from one of its faces.
//!
//! The face fixes `r` and its dual vertex. Every confirmed edge `uw` yields
//! its dual edge `(Φ_r(u,w), Φ_r(w,u))`. On each dual circle, consecutive
//! known vertices are tested as edges: the second intersection of their own
//! dual circles decides whether the segment is an edge, a diagonal or a
//! diagonal through the centre. When these certain rules stall, the search
//! branches: an undecided segment is tried as an edge and then as a
//! diagonal, and a face left with only diagonal gaps is completed by the
//! regular-polygon and symmetric-trapezoid continuations of its broken
//! line. Passes are repeated with a doubling cap on the vertex count. A
//! closed structure is accepted only if it passes the verifier.
//!
//! Faces whose neighbourhood is all diagonals and whose broken lines have
//! no regular or mirror continuation carry no local information about the
//! next vertex; such inputs end in `OpenChain`.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::hash::{Hash, Hasher};

use crate::duality::dual_pair;
use crate::error::{Result, SsdError};
use crate::geom::{circumcircle_tol, rotate, Vec3};
use crate::polytope::Polytope;
use crate::verifier::certify;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructOptions {
    /// Verification tolerance for the finished polytope.
    pub tol: f64,
    /// New points closer than this to a known vertex are that vertex.
    pub dedup_tol: f64,
    /// Incidence tolerance of a vertex and a dual plane.
    pub plane_tol: f64,
    pub max_vertices: usize,
    /// Merge radius for near-coincident points, overriding `dedup_tol` when
    /// larger.
    pub assume_closure: Option<f64>,
    /// Budget of search nodes for the backtracking stage.
    pub max_nodes: usize,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            tol: 1e-9,
            dedup_tol: 1e-9,
            plane_tol: 1e-8,
            max_vertices: 200,
            assume_closure: None,
            max_nodes: 20_000,
        }
    }
}

impl ReconstructOptions {
    fn match_tol(&self) -> f64 {
        self.assume_closure.map_or(self.dedup_tol, |e| e.max(self.dedup_tol))
    }
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

#[derive(Debug, Clone)]
pub struct ReconstructionState {
    pub vertices: Vec<Vec3>,
    /// Confirmed edges, each mapped to its dual edge.
    pub edges: BTreeMap<(usize, usize), (usize, usize)>,
    /// Segments known not to be edges.
    pub diagonals: BTreeSet<(usize, usize)>,
    pub r: f64,
    match_tol: f64,
    plane_tol: f64,
}

/// Why a branch of the search was abandoned.
#[derive(Debug, Clone, PartialEq)]
enum Dead {
    Conflict(String),
    Stuck(String),
    Overflow,
    Verification(String),
    Budget,
}

type Step<T> = std::result::Result<T, Dead>;

enum Gap {
    Known,
    Edge,
    Diagonal,
    Speculative,
}

impl ReconstructionState {
    fn new(r: f64, opts: &ReconstructOptions) -> Self {
        ReconstructionState {
            vertices: Vec::new(),
            edges: BTreeMap::new(),
            diagonals: BTreeSet::new(),
            r,
            match_tol: opts.match_tol(),
            plane_tol: opts.plane_tol,
        }
    }

    fn find(&self, p: Vec3) -> Option<usize> {
        self.vertices.iter().position(|w| w.dist(p) <= self.match_tol)
    }

    fn is_proper(&self, p: Vec3) -> bool {
        self.vertices.iter().all(|w| w.dot(p) >= -self.r - self.plane_tol)
    }

    fn add_point(&mut self, p: Vec3) -> Step<usize> {
        if let Some(i) = self.find(p) {
            return Ok(i);
        }
        if !self.is_proper(p) {
            return Err(Dead::Conflict("point outside a known face".into()));
        }
        self.vertices.push(p / p.norm());
        Ok(self.vertices.len() - 1)
    }

    fn on_plane(&self, v: usize, w: usize) -> bool {
        (self.vertices[w].dot(self.vertices[v]) + self.r).abs() <= self.plane_tol
    }

    /// Known vertices on the dual circle of `v`, counterclockwise about `−v`.
    pub fn circle_vertices(&self, v: usize) -> Vec<usize> {
        let axis = -self.vertices[v];
        let u = axis.any_orthogonal();
        let w = axis.cross(u);
        let mut on: Vec<(f64, usize)> = (0..self.vertices.len())
            .filter(|&z| self.on_plane(v, z))
            .map(|z| {
                let p = self.vertices[z];
                (p.dot(w).atan2(p.dot(u)), z)
            })
            .collect();
        on.sort_by(|a, b| a.0.total_cmp(&b.0));
        on.into_iter().map(|(_, z)| z).collect()
    }

    /// Hash of the state up to the order in which vertices were found.
    fn fingerprint(&self) -> u64 {
        let grid = |x: f64| (x * 1e7).round() as i64;
        let cells: Vec<[i64; 3]> =
            self.vertices.iter().map(|v| [grid(v.x), grid(v.y), grid(v.z)]).collect();
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by_key(|&i| cells[i]);
        let mut rank = vec![0; cells.len()];
        for (k, &i) in order.iter().enumerate() {
            rank[i] = k;
        }
        let relabel = |&(a, b): &(usize, usize)| key(rank[a], rank[b]);
        let mut edges: Vec<_> = self.edges.keys().map(relabel).collect();
        let mut diagonals: Vec<_> = self.diagonals.iter().map(relabel).collect();
        edges.sort_unstable();
        diagonals.sort_unstable();
        let mut h = DefaultHasher::new();
        for &i in &order {
            cells[i].hash(&mut h);
        }
        edges.hash(&mut h);
        diagonals.hash(&mut h);
        h.finish()
    }

    /// Whether some plane through `a` and `b` has every known vertex on one
    /// side. An edge of the polytope lies on the boundary of the hull of any
    /// subset of its vertices.
    fn on_hull_boundary(&self, a: usize, b: usize) -> bool {
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let Some(dir) = (pb - pa).normalized() else {
            return true;
        };
        let u = dir.any_orthogonal();
        let w = dir.cross(u);
        let mut angles: Vec<f64> = (0..self.vertices.len())
            .filter(|&z| z != a && z != b)
            .filter_map(|z| {
                let d = self.vertices[z] - pa;
                let q = d - dir * d.dot(dir);
                (q.norm() > 1e-12).then(|| q.dot(w).atan2(q.dot(u)))
            })
            .collect();
        if angles.len() < 2 {
            return true;
        }
        angles.sort_by(f64::total_cmp);
        let wrap = angles[0] + std::f64::consts::TAU - angles[angles.len() - 1];
        let widest = angles.windows(2).map(|p| p[1] - p[0]).fold(wrap, f64::max);
        widest >= std::f64::consts::PI - 1e-9
    }

    /// Counterclockwise angle from `p` to `q` on the dual circle of `v`.
    fn arc(&self, v: usize, p: usize, q: usize) -> f64 {
        let a = signed_angle(self.vertices[p], self.vertices[q], -self.vertices[v]);
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }

    /// Confirmed edges of the face `σ(v)`.
    fn face_edges(&self, v: usize) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .filter(|(_, d)| d.0 == v || d.1 == v)
            .map(|(e, _)| *e)
            .collect()
    }

    fn confirm_edge(&mut self, a: usize, b: usize) -> Step<()> {
        if a == b {
            return Err(Dead::Conflict("degenerate edge".into()));
        }
        if self.edges.contains_key(&key(a, b)) {
            return Ok(());
        }
        if self.diagonals.contains(&key(a, b)) {
            return Err(Dead::Conflict("edge already classified as diagonal".into()));
        }
        let (x, y) = dual_pair(self.vertices[a], self.vertices[b], self.r)
            .map_err(|e| Dead::Conflict(e.to_string()))?;
        let x = self.add_point(x)?;
        let y = self.add_point(y)?;
        if x == y || self.diagonals.contains(&key(x, y)) {
            return Err(Dead::Conflict("dual of an edge is not an edge".into()));
        }
        if let Some(&d) = self.edges.get(&key(x, y)) {
            if d != key(a, b) {
                return Err(Dead::Conflict("edge has two different duals".into()));
            }
        }
        self.edges.insert(key(a, b), key(x, y));
        self.edges.insert(key(x, y), key(a, b));
        Ok(())
    }

    /// The dual segments of consecutive vertices of the face `σ(v)`.
    pub fn duals_of_face_edges(&self, v: usize) -> Result<Vec<(Vec3, Vec3)>> {
        let cyc = self.circle_vertices(v);
        let m = cyc.len();
        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            let (a, b) = (self.vertices[cyc[i]], self.vertices[cyc[(i + 1) % m]]);
            out.push(dual_pair(a, b, self.r).map_err(|e| match e {
                SsdError::DegenerateDiscriminant { value, .. } => SsdError::DegenerateDiscriminant {
                    value,
                    at: Some(format!("vertices {} and {}", cyc[i], cyc[(i + 1) % m])),
                },
                other => other,
            })?);
        }
        Ok(out)
    }

    fn classify_gap(&self, v: usize, p: usize, q: usize) -> Gap {
        if self.edges.contains_key(&key(p, q)) || self.diagonals.contains(&key(p, q)) {
            return Gap::Known;
        }
        let Ok((x, y)) = dual_pair(self.vertices[p], self.vertices[q], self.r) else {
            return Gap::Diagonal;
        };
        let vv = self.vertices[v];
        let s = if x.dist(vv) <= y.dist(vv) { y } else { x };
        if s.dist(vv) <= self.match_tol.max(1e-9) {
            return Gap::Diagonal;
        }
        if self.find(s).is_some() {
            return Gap::Edge;
        }
        if !self.is_proper(s) {
            return Gap::Diagonal;
        }
        Gap::Speculative
    }

    fn check(&self) -> Step<()> {
        let n = self.vertices.len();
        for a in 0..n {
            for b in (a + 1)..n {
                if self.vertices[a].dot(self.vertices[b]) < -self.r - self.plane_tol {
                    return Err(Dead::Conflict(format!("vertices {a} and {b} too far apart")));
                }
            }
        }
        for (&(a, b), &(x, y)) in &self.edges {
            for z in 0..n {
                if z != x && z != y && self.on_plane(z, a) && self.on_plane(z, b) {
                    return Err(Dead::Conflict(format!("edge {a}-{b} lies on a third face")));
                }
            }
        }
        for &(a, b) in self.edges.keys() {
            if !self.on_hull_boundary(a, b) {
                return Err(Dead::Conflict(format!("edge {a}-{b} passes inside the known vertices")));
            }
        }
        for v in 0..n {
            let cyc = self.circle_vertices(v);
            let m = cyc.len();
            let pos: BTreeMap<usize, usize> = cyc.iter().enumerate().map(|(i, &z)| (z, i)).collect();
            let mut degree = vec![0usize; m];
            for (a, b) in self.face_edges(v) {
                let (Some(&i), Some(&j)) = (pos.get(&a), pos.get(&b)) else {
                    return Err(Dead::Conflict(format!("face edge {a}-{b} off the circle of {v}")));
                };
                let gap = (j + m - i) % m;
                if gap != 1 && gap != m - 1 {
                    return Err(Dead::Conflict(format!("face edge {a}-{b} skips a vertex of σ({v})")));
                }
                degree[i] += 1;
                degree[j] += 1;
            }
            if degree.iter().any(|&d| d > 2) {
                return Err(Dead::Conflict(format!("branching boundary of σ({v})")));
            }
        }
        Ok(())
    }

    /// Apply the certain rules until nothing changes. Returns the
    /// speculative gap edges seen in the last sweep.
    fn propagate(&mut self, max_vertices: usize) -> Step<Vec<(usize, usize)>> {
        loop {
            if self.vertices.len() > max_vertices {
                return Err(Dead::Overflow);
            }
            self.check()?;
            let mut changed = false;
            let mut speculative = Vec::new();
            let n = self.vertices.len();
            for v in 0..n {
                let cyc = self.circle_vertices(v);
                let m = cyc.len();
                if m < 2 {
                    continue;
                }
                let pairs = if m == 2 { 1 } else { m };
                for i in 0..pairs {
                    let (p, q) = (cyc[i], cyc[(i + 1) % m]);
                    // A face contains the centre of its circle, so no edge
                    // spans a half circle.
                    let wide = m >= 3 && self.arc(v, p, q) >= std::f64::consts::PI - 1e-9;
                    let gap = if wide && !self.diagonals.contains(&key(p, q)) {
                        if self.edges.contains_key(&key(p, q)) {
                            return Err(Dead::Conflict(format!("edge {p}-{q} spans half of σ({v})")));
                        }
                        Gap::Diagonal
                    } else {
                        self.classify_gap(v, p, q)
                    };
                    match gap {
                        Gap::Known => {}
                        Gap::Edge => {
                            self.confirm_edge(p, q)?;
                            changed = true;
                        }
                        Gap::Diagonal => {
                            if self.edges.contains_key(&key(p, q)) {
                                return Err(Dead::Conflict("edge classified as diagonal".into()));
                            }
                            self.diagonals.insert(key(p, q));
                            changed = true;
                        }
                        Gap::Speculative => speculative.push((p, q)),
                    }
                }
                if self.vertices.len() != n {
                    break;
                }
            }
            if !changed {
                changed = self.force_edges()?;
            }
            if !changed {
                speculative.sort_unstable();
                speculative.dedup();
                return Ok(speculative);
            }
        }
    }

    /// Two known vertices whose dual circles meet in two known vertices
    /// share two faces, so they span an edge.
    fn force_edges(&mut self) -> Step<bool> {
        let n = self.vertices.len();
        let mut changed = false;
        for a in 0..n {
            for b in (a + 1)..n {
                if self.edges.contains_key(&(a, b)) {
                    continue;
                }
                let Ok((x, y)) = dual_pair(self.vertices[a], self.vertices[b], self.r) else {
                    continue;
                };
                let (Some(i), Some(j)) = (self.find(x), self.find(y)) else {
                    continue;
                };
                if i == j || i == a || i == b || j == a || j == b {
                    continue;
                }
                self.confirm_edge(a, b)?;
                changed = true;
            }
        }
        Ok(changed)
    }

    /// Every dual circle carries a closed cycle of confirmed edges through
    /// all of its known vertices.
    fn is_closed(&self) -> bool {
        (0..self.vertices.len()).all(|v| {
            let cyc = self.circle_vertices(v);
            let m = cyc.len();
            m >= 3 && (0..m).all(|i| self.edges.contains_key(&key(cyc[i], cyc[(i + 1) % m])))
        })
    }

    /// Maximal paths of confirmed edges on the dual circle of `v`, in
    /// counterclockwise order, for faces that are not yet closed.
    fn open_paths(&self, v: usize) -> Vec<Vec<usize>> {
        let cyc = self.circle_vertices(v);
        let m = cyc.len();
        if m < 2 {
            return Vec::new();
        }
        let linked = |i: usize| self.edges.contains_key(&key(cyc[i], cyc[(i + 1) % m]));
        if (0..m).all(linked) {
            return Vec::new();
        }
        let start = (0..m).find(|&i| !linked(i)).unwrap();
        let mut paths = Vec::new();
        let mut cur = Vec::new();
        for step in 1..=m {
            let i = (start + step) % m;
            cur.push(cyc[i]);
            if !linked(i) {
                if cur.len() >= 2 {
                    paths.push(std::mem::take(&mut cur));
                } else {
                    cur.clear();
                }
            }
        }
        paths
    }

    /// Candidate vertices completing the open broken lines of one dual
    /// circle, the circle with the fewest candidates. A missing vertex of
    /// that face must be among them.
    fn completion_candidates(&self) -> Vec<Vec3> {
        let mut best: Option<Vec<Vec3>> = None;
        for v in 0..self.vertices.len() {
            let axis = -self.vertices[v];
            let mut out: Vec<Vec3> = Vec::new();
            for path in self.open_paths(v) {
                let pts: Vec<Vec3> = path.iter().map(|&i| self.vertices[i]).collect();
                let mut push = |p: Vec3| {
                    if p.is_finite()
                        && self.find(p).is_none()
                        && self.is_proper(p)
                        && !out.iter().any(|q| q.dist(p) <= self.match_tol)
                    {
                        out.push(p);
                    }
                };
                // Regular continuation of broken lines with equal consecutive edges.
                if pts.len() >= 3 {
                    for (a, b, c) in [
                        (pts[0], pts[1], pts[2]),
                        (pts[pts.len() - 1], pts[pts.len() - 2], pts[pts.len() - 3]),
                    ] {
                        if (a.dist(b) - b.dist(c)).abs() <= 1e-9 * a.dist(b).max(1e-300) {
                            let turn = signed_angle(c, b, axis);
                            push(rotate(a, axis, turn));
                        }
                    }
                }
                // Mirror images in the symmetry axes of the path's own edges,
                // completing symmetric trapezoids and kites.
                for w in pts.windows(2) {
                    let mid = w[0] + w[1];
                    for &p in &pts {
                        push(reflect_in_axis_plane(p, axis, mid));
                    }
                }
            }
            if !out.is_empty() && best.as_ref().map_or(true, |b| out.len() < b.len()) {
                best = Some(out);
            }
        }
        best.unwrap_or_default()
    }

    fn describe_open(&self) -> String {
        let mut parts = Vec::new();
        for v in 0..self.vertices.len() {
            for p in self.open_paths(v) {
                parts.push(format!("σ({v}): {p:?}"));
            }
        }
        format!(
            "{} vertices, {} edges, {} diagonals; open broken lines {}",
            self.vertices.len(),
            self.edges.len() / 2,
            self.diagonals.len(),
            parts.join(", ")
        )
    }

    fn to_polytope(&self) -> Polytope {
        let n = self.vertices.len();
        let mut poly = Polytope {
            vertices: self.vertices.clone(),
            faces: (0..n).map(|v| self.circle_vertices(v)).collect(),
            sigma: Some((0..n).collect()),
            r: Some(self.r),
        };
        poly.canonicalize();
        poly
    }
}

/// Angle from `a` to `b` about `axis`, counterclockwise positive.
fn signed_angle(a: Vec3, b: Vec3, axis: Vec3) -> f64 {
    let pa = a - axis * a.dot(axis);
    let pb = b - axis * b.dot(axis);
    axis.dot(pa.cross(pb)).atan2(pa.dot(pb))
}

/// Mirror `p` in the plane spanned by `axis` and `dir`.
fn reflect_in_axis_plane(p: Vec3, axis: Vec3, dir: Vec3) -> Vec3 {
    let d = dir - axis * dir.dot(axis);
    let Some(normal) = axis.cross(d).normalized() else {
        return Vec3::new(f64::NAN, f64::NAN, f64::NAN);
    };
    p - normal * (2.0 * p.dot(normal))
}

struct Search<'a> {
    opts: &'a ReconstructOptions,
    nodes: usize,
    worst: Option<Dead>,
    /// Whether some branch was cut by `cap`.
    limited: bool,
    /// Vertex count allowed in this pass.
    cap: usize,
    /// Fingerprints of states already explored without success in this pass.
    failed: HashSet<u64>,
}

impl Search<'_> {
    fn note(&mut self, d: Dead) {
        let rank = |d: &Dead| match d {
            Dead::Verification(_) => 4,
            Dead::Overflow => 3,
            Dead::Budget => 2,
            Dead::Stuck(_) => 1,
            Dead::Conflict(_) => 0,
        };
        if self.worst.as_ref().map_or(true, |w| rank(&d) > rank(w)) {
            self.worst = Some(d);
        }
    }

    /// Propagate, then settle every speculative gap for which one of the
    /// two choices fails under propagation alone.
    fn probe(&self, st: &mut ReconstructionState) -> Step<Vec<(usize, usize)>> {
        'outer: loop {
            let gaps = st.propagate(self.cap)?;
            for &(a, b) in &gaps {
                let fails = |r: Step<Vec<(usize, usize)>>| matches!(r, Err(Dead::Conflict(_)));
                let mut edge = st.clone();
                let edge_ok = !fails(edge.confirm_edge(a, b).and_then(|_| edge.propagate(self.cap)));
                let mut diag = st.clone();
                diag.diagonals.insert(key(a, b));
                let diag_ok = !fails(diag.propagate(self.cap));
                match (edge_ok, diag_ok) {
                    (true, true) => {}
                    (false, false) => return Err(Dead::Conflict(format!("segment {a}-{b} is neither edge nor diagonal"))),
                    (true, false) => {
                        *st = edge;
                        continue 'outer;
                    }
                    (false, true) => {
                        *st = diag;
                        continue 'outer;
                    }
                }
            }
            return Ok(gaps);
        }
    }

    fn run(&mut self, st: ReconstructionState) -> Step<Polytope> {
        self.nodes += 1;
        if self.nodes > self.opts.max_nodes {
            return Err(Dead::Budget);
        }
        let print = st.fingerprint();
        if self.failed.contains(&print) {
            return Err(Dead::Conflict("state already explored".into()));
        }
        let res = self.expand(st);
        if res.is_err() && !matches!(res, Err(Dead::Budget)) {
            self.failed.insert(print);
        }
        res
    }

    fn expand(&mut self, mut st: ReconstructionState) -> Step<Polytope> {
        let gaps = match self.probe(&mut st) {
            Err(Dead::Overflow) if self.cap < self.opts.max_vertices => {
                self.limited = true;
                return Err(Dead::Stuck("vertex cap".into()));
            }
            other => other?,
        };
        if st.is_closed() {
            return certify(st.to_polytope(), self.opts.tol).map_err(|e| Dead::Verification(e.to_string()));
        }
        // Each undecided segment is either an edge or a diagonal; both
        // branches are explored and the second remembers the first failed.
        let pick = gaps.first().copied();
        if let Some((a, b)) = pick {
            let mut edge = st.clone();
            let res = edge.confirm_edge(a, b).and_then(|_| self.run(edge));
            match res {
                Ok(p) => return Ok(p),
                Err(Dead::Budget) => return Err(Dead::Budget),
                Err(d) => self.note(d),
            }
            st.diagonals.insert(key(a, b));
            return self.run(st);
        }
        let points = st.completion_candidates();
        if points.is_empty() {
            return Err(Dead::Stuck(st.describe_open()));
        }
        for p in points {
            let mut next = st.clone();
            match next.add_point(p).and_then(|_| self.run(next)) {
                Ok(p) => return Ok(p),
                Err(Dead::Budget) => return Err(Dead::Budget),
                Err(d) => self.note(d),
            }
        }
        Err(Dead::Stuck(st.describe_open()))
    }
}

/// Grow the ssd polytope having `face` as a face.
pub fn reconstruct_from_face(face: &[Vec3], opts: &ReconstructOptions) -> Result<Polytope> {
    if face.len() < 3 {
        return Err(SsdError::InvalidParams("a face needs at least three vertices".into()));
    }
    for p in face {
        if (p.norm() - 1.0).abs() > 1e-9 {
            return Err(SsdError::NonUnitVertex(p.norm()));
        }
    }
    let circle = circumcircle_tol(face, 1e-9)?;
    let r = circle.center.norm();
    if !(r > 1e-12 && r < 1.0) {
        return Err(SsdError::InvalidRadius(r));
    }
    let apex = -circle.center / r;
    let mut st = ReconstructionState::new(r, opts);
    let apex_idx = st.add_point(apex).map_err(|_| SsdError::DegenerateInput("bad apex".into()))?;
    for p in face {
        st.add_point(*p)
            .map_err(|_| SsdError::NotConcyclic { deviation: (p.dot(apex) + r).abs() })?;
    }
    let cyc = st.circle_vertices(apex_idx);
    if cyc.len() != face.len() {
        return Err(SsdError::DegenerateInput("repeated face vertices".into()));
    }
    for i in 0..cyc.len() {
        let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
        if let Err(e) = st.confirm_edge(a, b) {
            let err = dual_pair(st.vertices[a], st.vertices[b], r).err();
            return Err(err.unwrap_or_else(|| SsdError::OpenChain(format!("{e:?}"))));
        }
    }
    // Iterative deepening on the vertex count keeps a wrong
    // early decision from absorbing the whole budget.
    let mut limit = st.vertices.len();
    let mut search = Search { opts, nodes: 0, worst: None, limited: false, cap: limit, failed: HashSet::new() };
    let result = loop {
        search.cap = limit.min(opts.max_vertices);
        search.limited = false;
        search.failed.clear();
        let res = search.run(st.clone());
        if res.is_ok() || matches!(res, Err(Dead::Budget)) || !search.limited {
            break res;
        }
        limit *= 2;
    };
    match result {
        Ok(p) => Ok(p),
        Err(d) => {
            let d = match (d, search.worst.take()) {
                (Dead::Budget, _) => Dead::Budget,
                (d, None) => d,
                (d, Some(w)) => {
                    if matches!(w, Dead::Verification(_) | Dead::Overflow) {
                        w
                    } else {
                        d
                    }
                }
            };
            Err(match d {
                Dead::Overflow => SsdError::Overflow(opts.max_vertices),
                Dead::Verification(m) => SsdError::VerificationFailed(m),
                Dead::Budget => SsdError::OpenChain(format!(
                    "search budget of {} nodes exhausted",
                    opts.max_nodes
                )),
                Dead::Stuck(m) | Dead::Conflict(m) => SsdError::OpenChain(m),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> Vec<Vec3> {
        let s = 1.0 / 3f64.sqrt();
        vec![
            Vec3::new(s, s, s),
            Vec3::new(s, -s, -s),
            Vec3::new(-s, s, -s),
            Vec3::new(-s, -s, s),
        ]
    }

    #[test]
    fn tetrahedron_from_a_face() {
        let t = tetra();
        let p = reconstruct_from_face(&t[1..], &ReconstructOptions::default()).unwrap();
        assert_eq!(p.n_vertices(), 4);
        assert!(p.vertices.iter().any(|v| v.dist(t[0]) < 1e-12));
    }

    #[test]
    fn tetra_face_duals_share_the_apex() {
        let t = tetra();
        let opts = ReconstructOptions::default();
        let mut st = ReconstructionState::new(1.0 / 3.0, &opts);
        for p in &t {
            st.add_point(*p).unwrap();
        }
        let duals = st.duals_of_face_edges(0).unwrap();
        assert_eq!(duals.len(), 3);
        for (x, y) in duals {
            assert!(x.dist(t[0]) < 1e-12 || y.dist(t[0]) < 1e-12);
        }
    }

    #[test]
    fn flat_face_has_no_polytope() {
        // A small triangle near the pole: r close to 1 makes the dual circles
        // of its vertices miss each other.
        let z: f64 = 0.99;
        let rho = (1.0 - z * z).sqrt();
        let face: Vec<Vec3> = (0..3)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                Vec3::new(rho * a.cos(), rho * a.sin(), z)
            })
            .collect();
        let opts = ReconstructOptions { max_nodes: 200, ..Default::default() };
        assert!(reconstruct_from_face(&face, &opts).is_err());
    }

    #[test]
    fn non_concyclic_face_rejected() {
        let face = [Vec3::X, Vec3::Y, -Vec3::X, Vec3::new(0.0, -0.6, 0.8)];
        assert!(reconstruct_from_face(&face, &ReconstructOptions::default()).is_err());
    }
}

//! Text serialization: the polytope document and OFF / OBJ meshes.
//!
//! A document is a sequence of `key: value` lines; list-valued keys carry a
//! count and are followed by that many indented `index: values` lines.
//! Reals are written with 17 significant digits so that reading a written
//! document reproduces every coordinate bit for bit.

use std::fmt::Write as _;

use crate::error::{Result, SsdError};
use crate::geom::Vec3;
use crate::polytope::Polytope;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeDocument {
    pub format_version: u32,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
    pub sigma: Vec<usize>,
    pub r: Option<f64>,
    pub alpha: Option<f64>,
    pub provenance: String,
}

/// 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> SsdError {
    SsdError::InvalidParams(format!("document line {line}: {msg}"))
}

impl PolytopeDocument {
    pub fn from_polytope(p: &Polytope, provenance: impl Into<String>) -> Self {
        PolytopeDocument {
            format_version: FORMAT_VERSION,
            vertices: p.vertices.iter().map(|v| v.to_array()).collect(),
            faces: p.faces.clone(),
            sigma: p.sigma.clone().unwrap_or_default(),
            r: p.r,
            alpha: p.alpha(),
            provenance: provenance.into(),
        }
    }

    pub fn to_polytope(&self) -> Result<Polytope> {
        let n = self.vertices.len();
        for f in &self.faces {
            if f.len() < 3 || f.iter().any(|&i| i >= n) {
                return Err(SsdError::InvalidParams("face index out of range".into()));
            }
        }
        let sigma = if self.sigma.is_empty() {
            None
        } else {
            if self.sigma.len() != n || self.sigma.iter().any(|&f| f >= self.faces.len()) {
                return Err(SsdError::InvalidParams("sigma is not a total map onto faces".into()));
            }
            Some(self.sigma.clone())
        };
        let mut p = Polytope {
            vertices: self.vertices.iter().map(|&a| Vec3::from(a)).collect(),
            faces: self.faces.clone(),
            sigma,
            r: self.r,
        };
        p.canonicalize();
        Ok(p)
    }

    pub fn write(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "format_version: {}", self.format_version);
        let _ = writeln!(s, "provenance: {}", self.provenance.replace('\n', " "));
        if let Some(r) = self.r {
            let _ = writeln!(s, "r: {}", fmt_real(r));
        }
        if let Some(a) = self.alpha {
            let _ = writeln!(s, "alpha: {}", fmt_real(a));
        }
        let _ = writeln!(s, "vertices: {}", self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  {i}: {} {} {}", fmt_real(v[0]), fmt_real(v[1]), fmt_real(v[2]));
        }
        let _ = writeln!(s, "faces: {}", self.faces.len());
        for (i, f) in self.faces.iter().enumerate() {
            let idx: Vec<String> = f.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "  {i}: {}", idx.join(" "));
        }
        let _ = writeln!(s, "sigma: {}", self.sigma.len());
        for (i, f) in self.sigma.iter().enumerate() {
            let _ = writeln!(s, "  {i}: {f}");
        }
        s
    }

    pub fn read(text: &str) -> Result<Self> {
        let mut doc = PolytopeDocument {
            format_version: 0,
            vertices: vec![],
            faces: vec![],
            sigma: vec![],
            r: None,
            alpha: None,
            provenance: String::new(),
        };
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .collect();
        let mut k = 0;
        let real = |ln: usize, t: &str| t.trim().parse::<f64>().map_err(|e| parse_err(ln, e));
        while k < lines.len() {
            let (ln, line) = lines[k];
            k += 1;
            let (key, val) = line.split_once(':').ok_or_else(|| parse_err(ln, "expected key: value"))?;
            let (key, val) = (key.trim(), val.trim());
            let mut block = |count: &str| -> Result<Vec<(usize, String)>> {
                let n: usize = count.parse().map_err(|e| parse_err(ln, e))?;
                let mut rows = Vec::with_capacity(n);
                for expect in 0..n {
                    let (bl, row) = *lines.get(k).ok_or_else(|| parse_err(ln, "block ends early"))?;
                    k += 1;
                    let (idx, rest) = row.split_once(':').ok_or_else(|| parse_err(bl, "expected index: values"))?;
                    let idx: usize = idx.trim().parse().map_err(|e| parse_err(bl, e))?;
                    if idx != expect {
                        return Err(parse_err(bl, format!("expected index {expect}")));
                    }
                    rows.push((bl, rest.trim().to_string()));
                }
                Ok(rows)
            };
            match key {
                "format_version" => doc.format_version = val.parse().map_err(|e| parse_err(ln, e))?,
                "provenance" => doc.provenance = val.to_string(),
                "r" => doc.r = Some(real(ln, val)?),
                "alpha" => doc.alpha = Some(real(ln, val)?),
                "vertices" => {
                    for (bl, row) in block(val)? {
                        let c: Vec<f64> = row.split_whitespace().map(|t| real(bl, t)).collect::<Result<_>>()?;
                        if c.len() != 3 {
                            return Err(parse_err(bl, "a vertex needs three coordinates"));
                        }
                        doc.vertices.push([c[0], c[1], c[2]]);
                    }
                }
                "faces" => {
                    for (bl, row) in block(val)? {
                        let f: Vec<usize> = row
                            .split_whitespace()
                            .map(|t| t.parse().map_err(|e| parse_err(bl, e)))
                            .collect::<Result<_>>()?;
                        doc.faces.push(f);
                    }
                }
                "sigma" => {
                    for (bl, row) in block(val)? {
                        doc.sigma.push(row.parse().map_err(|e| parse_err(bl, e))?);
                    }
                }
                other => return Err(parse_err(ln, format!("unknown key {other}"))),
            }
        }
        if doc.format_version != FORMAT_VERSION {
            return Err(SsdError::InvalidParams(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        doc.to_polytope()?;
        Ok(doc)
    }
}

pub fn write_off(p: &Polytope) -> String {
    let mut s = String::from("OFF\n");
    let _ = writeln!(s, "{} {} {}", p.n_vertices(), p.faces.len(), p.edges().len());
    for v in &p.vertices {
        let _ = writeln!(s, "{} {} {}", fmt_real(v.x), fmt_real(v.y), fmt_real(v.z));
    }
    for f in &p.faces {
        let idx: Vec<String> = f.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{} {}", f.len(), idx.join(" "));
    }
    s
}

pub fn read_off(text: &str) -> Result<Polytope> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split_whitespace())
        .peekable();
    let bad = |m: &str| SsdError::InvalidParams(format!("OFF: {m}"));
    if tokens.peek() == Some(&"OFF") {
        tokens.next();
    }
    let mut num = |what: &str| -> Result<f64> {
        tokens
            .next()
            .ok_or_else(|| bad(&format!("missing {what}")))?
            .parse::<f64>()
            .map_err(|_| bad(&format!("bad {what}")))
    };
    let nv = num("vertex count")? as usize;
    let nf = num("face count")? as usize;
    let _ne = num("edge count")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        vertices.push(Vec3::new(num("x")?, num("y")?, num("z")?));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let m = num("face size")? as usize;
        let mut f = Vec::with_capacity(m);
        for _ in 0..m {
            let i = num("index")? as usize;
            if i >= nv {
                return Err(bad("index out of range"));
            }
            f.push(i);
        }
        faces.push(f);
    }
    Ok(Polytope::new(vertices, faces))
}

pub fn write_obj(p: &Polytope) -> String {
    let mut s = String::new();
    for v in &p.vertices {
        let _ = writeln!(s, "v {} {} {}", fmt_real(v.x), fmt_real(v.y), fmt_real(v.z));
    }
    for f in &p.faces {
        let idx: Vec<String> = f.iter().map(|x| (x + 1).to_string()).collect();
        let _ = writeln!(s, "f {}", idx.join(" "));
    }
    s
}

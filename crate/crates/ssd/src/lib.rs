//! Strongly self-dual polyhedra inscribed in the unit sphere.
//!
//! A convex polytope `P` inscribed in the unit sphere is strongly self-dual
//! when there is a bijection `σ` from vertices to faces such that every face
//! `σ(v)` lies in the plane `⟨p, v⟩ = −r`. The crate constructs such
//! polyhedra (layered families, a pentagon-seeded search), verifies them,
//! and regrows them from a single face.

pub mod combinat;
pub mod doc;
pub mod duality;
pub mod error;
pub mod geom;
pub mod ltype;
pub mod polytope;
pub mod reconstruct;
pub mod search;
pub mod verifier;

pub use error::{Result, SsdError};
pub use geom::{Plane, Vec3};
pub use polytope::{FaceVector, Polytope};

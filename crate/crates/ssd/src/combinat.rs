//! Face-vector arithmetic for small vertex counts.
//!
//! An ssd polyhedron with `n` vertices has `n` faces and `2(n−1)` edges, so
//! its face vector satisfies `Σ α_l = n` and `Σ (4−l)·α_l = 4`.

use std::fmt;

use crate::error::{Result, SsdError};
use crate::polytope::FaceVector;

pub const MAX_N: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateList {
    pub n: usize,
    /// Vectors meeting both counting relations.
    pub feasible: Vec<FaceVector>,
    /// Vectors with `Σ (4−l)·α_l ≥ 4` whose incidence sum `Σ l·α_l` is odd,
    /// so no polyhedron has them.
    pub excluded_parity: Vec<FaceVector>,
    /// Pyramids over an even polygon: they satisfy the counting relations,
    /// but the base of an ssd pyramid must be an odd regular polygon.
    pub excluded_pyramid: Vec<FaceVector>,
}

impl fmt::Display for CandidateList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n: {}", self.n)?;
        for (label, list) in [
            ("feasible", &self.feasible),
            ("excluded_parity", &self.excluded_parity),
            ("excluded_pyramid", &self.excluded_pyramid),
        ] {
            writeln!(f, "{label}: {}", list.len())?;
            for fv in list {
                writeln!(f, "  {fv}")?;
            }
        }
        Ok(())
    }
}

fn is_even_pyramid(fv: &FaceVector, n: usize) -> bool {
    let apex_free = fv.get(n - 1) == 1 && fv.get(3) == n - 1 && fv.n_faces() == n;
    apex_free && (n - 1) % 2 == 0 && n - 1 > 3
}

/// All face vectors for `n` vertices with faces of at most `n−1` sides and
/// `Σ (4−l)·α_l ≥ 4`, partitioned into feasible, parity-excluded and
/// even-pyramid lists. Vectors with even incidence sum but weight above 4
/// appear in none of the lists.
pub fn enumerate_face_vectors(n: usize) -> Result<CandidateList> {
    if !(4..=MAX_N).contains(&n) {
        return Err(SsdError::InvalidN(n));
    }
    let mut all = Vec::new();
    let mut counts = vec![0usize; n];
    // Assign α_l for l = n−1 down to 5; α_4 and α_3 are filled last.
    fn rec(l: usize, left: usize, big_weight: usize, counts: &mut Vec<usize>, out: &mut Vec<FaceVector>) {
        if l < 5 {
            // α_3 ≥ 4 + Σ_{l≥5} (l−4)α_l, the rest goes to α_4.
            let min3 = 4 + big_weight;
            if min3 > left {
                return;
            }
            for a3 in min3..=left {
                let a4 = left - a3;
                let mut pairs: Vec<(usize, usize)> =
                    (5..counts.len()).filter(|&k| counts[k] > 0).map(|k| (k, counts[k])).collect();
                pairs.push((4, a4));
                pairs.push((3, a3));
                out.push(FaceVector::from_pairs(&pairs));
            }
            return;
        }
        let mut a = 0;
        while a <= left && 4 + big_weight + a * (l - 4) <= left - a {
            counts[l] = a;
            rec(l - 1, left - a, big_weight + a * (l - 4), counts, out);
            a += 1;
        }
        counts[l] = 0;
    }
    rec(n - 1, n, 0, &mut counts, &mut all);
    all.sort();
    all.dedup();

    let mut list = CandidateList { n, feasible: vec![], excluded_parity: vec![], excluded_pyramid: vec![] };
    for fv in all {
        if !fv.has_even_incidences() {
            list.excluded_parity.push(fv);
        } else if fv.satisfies_euler_relation() {
            if is_even_pyramid(&fv, n) {
                list.excluded_pyramid.push(fv);
            } else {
                list.feasible.push(fv);
            }
        }
    }
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(p: &[(usize, usize)]) -> FaceVector {
        FaceVector::from_pairs(p)
    }

    #[test]
    fn four_vertices() {
        let l = enumerate_face_vectors(4).unwrap();
        assert_eq!(l.feasible, vec![fv(&[(3, 4)])]);
    }

    #[test]
    fn five_vertices() {
        let l = enumerate_face_vectors(5).unwrap();
        assert!(l.feasible.is_empty());
        assert_eq!(l.excluded_parity, vec![fv(&[(3, 5)])]);
        assert_eq!(l.excluded_pyramid, vec![fv(&[(4, 1), (3, 4)])]);
    }

    #[test]
    fn invalid_n() {
        assert!(matches!(enumerate_face_vectors(3), Err(SsdError::InvalidN(3))));
        assert!(enumerate_face_vectors(65).is_err());
    }

    #[test]
    fn feasible_vectors_count_edges() {
        for n in 4..=20 {
            for v in enumerate_face_vectors(n).unwrap().feasible {
                assert_eq!(v.n_faces(), n);
                assert_eq!(v.incidences(), 4 * (n - 1));
                assert!(v.counts.keys().all(|&l| (3..n).contains(&l)));
            }
        }
    }
}

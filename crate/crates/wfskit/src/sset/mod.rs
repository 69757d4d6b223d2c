//! Finite simplicial sets in canonical Eilenberg-Zilber form.
//!
//! A [`FinSimplicialSet`] stores only nondegenerate simplices; every simplex
//! is a [`Cell`], a degeneracy word applied to a nondegenerate one. Faces of
//! nondegenerate simplices are stored in normal form, and all other face and
//! degeneracy actions are derived by word rewriting.

pub mod cell;
pub mod explicit;
pub mod ex;
pub mod homology;
pub mod lifting;
pub mod limits;
pub mod maps;
pub mod mapspace;

pub use cell::Cell;
pub use explicit::ExplicitSSet;
pub use homology::{homology, pi0, weq_oracle, HomologyProfile, WeqVerdict};
pub use lifting::{has_rlp, is_kan_fibration, is_trivial_fibration, RlpReport};
pub use maps::SSetMap;

use serde_json::{json, Map as JsonMap, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SsetError {
    #[error("duplicate simplex id {0:?}")]
    DuplicateId(String),
    #[error("unknown simplex id {0:?}")]
    UnknownId(String),
    #[error("simplex {id:?} of dimension {dim} has {got} faces, expected {want}")]
    FaceCount {
        id: String,
        dim: usize,
        got: usize,
        want: usize,
    },
    #[error("face {index} of {id:?} has dimension {got}, expected {want}")]
    FaceDim {
        id: String,
        index: usize,
        got: usize,
        want: usize,
    },
    #[error("invalid degeneracy word on face {index} of {id:?}")]
    BadWord { id: String, index: usize },
    #[error("simplicial identity d_{i} d_{j} fails on {id:?}")]
    Identity { id: String, i: usize, j: usize },
    #[error("horn index {k} out of range for dimension {n}")]
    HornIndex { n: usize, k: usize },
    #[error("{0}")]
    Other(String),
}

/// A finite simplicial set presented by nondegenerate generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSimplicialSet {
    /// `nd[n]` lists the nondegenerate simplex ids of dimension `n`, sorted.
    nd: Vec<Vec<String>>,
    /// Dimension of each nondegenerate simplex.
    dims: BTreeMap<String, usize>,
    /// For each nondegenerate simplex of dimension `n >= 1`, its `n+1` faces.
    faces: BTreeMap<String, Vec<Cell>>,
}

impl FinSimplicialSet {
    /// Builds and validates a simplicial set from generator data.
    pub fn new(
        nd_by_dim: Vec<Vec<String>>,
        faces: BTreeMap<String, Vec<Cell>>,
    ) -> Result<Self, SsetError> {
        let mut nd: Vec<Vec<String>> = nd_by_dim;
        while nd.last().map(|v| v.is_empty()).unwrap_or(false) {
            nd.pop();
        }
        let mut dims = BTreeMap::new();
        for (n, ids) in nd.iter_mut().enumerate() {
            ids.sort();
            for id in ids.iter() {
                if dims.insert(id.clone(), n).is_some() {
                    return Err(SsetError::DuplicateId(id.clone()));
                }
            }
        }
        let x = FinSimplicialSet { nd, dims, faces };
        x.validate()?;
        Ok(x)
    }

    /// Checks face counts, reference validity, word normal forms and the
    /// simplicial identities on every generator.
    pub fn validate(&self) -> Result<(), SsetError> {
        for (id, &n) in &self.dims {
            if n == 0 {
                if self.faces.get(id).map(|f| !f.is_empty()).unwrap_or(false) {
                    return Err(SsetError::FaceCount {
                        id: id.clone(),
                        dim: 0,
                        got: self.faces[id].len(),
                        want: 0,
                    });
                }
                continue;
            }
            let fs = self.faces.get(id).ok_or_else(|| SsetError::FaceCount {
                id: id.clone(),
                dim: n,
                got: 0,
                want: n + 1,
            })?;
            if fs.len() != n + 1 {
                return Err(SsetError::FaceCount {
                    id: id.clone(),
                    dim: n,
                    got: fs.len(),
                    want: n + 1,
                });
            }
            for (i, c) in fs.iter().enumerate() {
                let base = *self
                    .dims
                    .get(&c.nd)
                    .ok_or_else(|| SsetError::UnknownId(c.nd.clone()))?;
                if !cell::is_strictly_decreasing(&c.word) {
                    return Err(SsetError::BadWord {
                        id: id.clone(),
                        index: i,
                    });
                }
                if base + c.word.len() != n - 1 {
                    return Err(SsetError::FaceDim {
                        id: id.clone(),
                        index: i,
                        got: base + c.word.len(),
                        want: n - 1,
                    });
                }
            }
        }
        // simplicial identities d_i d_j = d_{j-1} d_i, i < j
        for (id, &n) in &self.dims {
            if n < 2 {
                continue;
            }
            let top = Cell::nd(id.clone());
            for j in 1..=n {
                for i in 0..j {
                    let a = self.face(&self.face(&top, j), i);
                    let b = self.face(&self.face(&top, i), j - 1);
                    if a != b {
                        return Err(SsetError::Identity {
                            id: id.clone(),
                            i,
                            j,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn empty() -> Self {
        FinSimplicialSet {
            nd: Vec::new(),
            dims: BTreeMap::new(),
            faces: BTreeMap::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nd.is_empty()
    }

    /// Top dimension carrying nondegenerate simplices; empty sets report 0.
    pub fn dim_bound(&self) -> usize {
        self.nd.len().saturating_sub(1)
    }

    pub fn nd_ids(&self, n: usize) -> &[String] {
        self.nd.get(n).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn nd_counts(&self) -> Vec<usize> {
        self.nd.iter().map(|v| v.len()).collect()
    }

    /// All nondegenerate generators in (dimension, id) order.
    pub fn generators(&self) -> impl Iterator<Item = (usize, &String)> {
        self.nd
            .iter()
            .enumerate()
            .flat_map(|(n, ids)| ids.iter().map(move |id| (n, id)))
    }

    pub fn dim_of_nd(&self, id: &str) -> Option<usize> {
        self.dims.get(id).copied()
    }

    pub fn dim_of_cell(&self, c: &Cell) -> usize {
        self.dims[&c.nd] + c.word.len()
    }

    pub fn contains_cell(&self, c: &Cell) -> bool {
        match self.dims.get(&c.nd) {
            None => false,
            Some(_) => cell::is_strictly_decreasing(&c.word),
        }
    }

    /// All simplices of dimension `n` as cells, in (generator, word) order.
    pub fn cells(&self, n: usize) -> Vec<Cell> {
        let mut out = Vec::new();
        for k in 0..=n {
            let words = cell::words_of_length(n, n - k);
            for id in self.nd_ids(k) {
                for w in &words {
                    out.push(Cell {
                        word: w.clone(),
                        nd: id.clone(),
                    });
                }
            }
        }
        out
    }

    /// `d_i` applied to a cell.
    pub fn face(&self, c: &Cell, i: usize) -> Cell {
        let (residual, hit) = cell::word_apply_face(&c.word, i);
        match hit {
            None => Cell {
                word: residual,
                nd: c.nd.clone(),
            },
            Some(j) => {
                let stored = &self.faces[&c.nd][j];
                Cell {
                    word: cell::word_compose(&residual, &stored.word),
                    nd: stored.nd.clone(),
                }
            }
        }
    }

    /// `s_i` applied to a cell.
    pub fn degeneracy(&self, c: &Cell, i: usize) -> Cell {
        Cell {
            word: cell::word_insert_degeneracy(&c.word, i),
            nd: c.nd.clone(),
        }
    }

    /// Applies a degeneracy word (outermost first) to a cell.
    pub fn apply_word(&self, word: &[usize], c: &Cell) -> Cell {
        Cell {
            word: cell::word_compose(word, &c.word),
            nd: c.nd.clone(),
        }
    }

    pub fn stored_faces(&self, id: &str) -> &[Cell] {
        self.faces.get(id).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Vertices of a cell, as 0-dimensional cells in spine order.
    pub fn vertices(&self, c: &Cell) -> Vec<Cell> {
        let n = self.dim_of_cell(c);
        (0..=n).map(|v| self.vertex(c, v)).collect()
    }

    /// The `v`-th vertex: the image of the inclusion `[0] -> [n]`, `0 -> v`.
    pub fn vertex(&self, c: &Cell, v: usize) -> Cell {
        let n = self.dim_of_cell(c);
        let mut cur = c.clone();
        // drop all indices above v, then all below
        for i in ((v + 1)..=n).rev() {
            cur = self.face(&cur, i);
        }
        for _ in 0..v {
            cur = self.face(&cur, 0);
        }
        cur
    }

    /// The standard simplex Δ_n. Nondegenerate simplices are the nonempty
    /// subsets of `{0..n}`, with ids like `"[0,2]"`.
    pub fn delta(n: usize) -> Self {
        Self::subsets_complex(n, |_| true)
    }

    /// The boundary ∂Δ_n; `boundary(0)` is the empty simplicial set.
    pub fn boundary(n: usize) -> Self {
        Self::subsets_complex(n, |s| s.len() < n + 1)
    }

    /// The horn Λ_{n,k}: the union of the faces `d_i`, `i != k`.
    pub fn horn(n: usize, k: usize) -> Result<Self, SsetError> {
        if k > n {
            return Err(SsetError::HornIndex { n, k });
        }
        let full: BTreeSet<usize> = (0..=n).collect();
        let missing: BTreeSet<usize> = full.iter().copied().filter(|&i| i != k).collect();
        Ok(Self::subsets_complex(n, move |s| {
            *s != full && *s != missing
        }))
    }

    /// The simplicial circle: one vertex, one nondegenerate edge.
    pub fn circle() -> Self {
        let mut faces = BTreeMap::new();
        faces.insert("e".to_string(), vec![Cell::nd("v"), Cell::nd("v")]);
        FinSimplicialSet::new(vec![vec!["v".into()], vec!["e".into()]], faces)
            .expect("circle is valid")
    }

    fn subsets_complex(n: usize, keep: impl Fn(&BTreeSet<usize>) -> bool) -> Self {
        let mut nd: Vec<Vec<String>> = vec![Vec::new(); n + 1];
        let mut faces = BTreeMap::new();
        for mask in 1u32..(1 << (n + 1)) {
            let set: BTreeSet<usize> = (0..=n).filter(|&i| mask & (1 << i) != 0).collect();
            if !keep(&set) {
                continue;
            }
            let id = subset_id(&set);
            let d = set.len() - 1;
            nd[d].push(id.clone());
            if d > 0 {
                let elems: Vec<usize> = set.iter().copied().collect();
                let fs: Vec<Cell> = (0..=d)
                    .map(|i| {
                        let mut sub = elems.clone();
                        sub.remove(i);
                        Cell::nd(subset_id(&sub.iter().copied().collect()))
                    })
                    .collect();
                faces.insert(id, fs);
            }
        }
        FinSimplicialSet::new(nd, faces).expect("subset complex is valid")
    }

    /// The opposite simplicial set: `d_i` becomes `d_{n-i}`, `s_i` becomes
    /// `s_{n-i}`.
    pub fn opposite(&self) -> FinSimplicialSet {
        let top = self.dim_bound();
        let emb = explicit::ExplicitSSet::from_ez(self, top);
        let src = emb.explicit;
        let mut face: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        for n in 1..=top {
            face.push((0..=n).map(|i| src.face[n][n - i].clone()).collect());
        }
        let degen = (0..top)
            .map(|n| (0..=n).map(|i| src.degen[n][n - i].clone()).collect())
            .collect();
        let rev = explicit::ExplicitSSet {
            labels: src.labels,
            face,
            degen,
        };
        let (out, _) = rev.to_ez().expect("reversal preserves validity");
        out
    }

    /// Relabels every generator through `f`; ids must stay unique.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Result<Self, SsetError> {
        let nd = self
            .nd
            .iter()
            .map(|ids| ids.iter().map(|i| f(i)).collect())
            .collect();
        let faces = self
            .faces
            .iter()
            .map(|(id, fs)| {
                (
                    f(id),
                    fs.iter()
                        .map(|c| Cell {
                            word: c.word.clone(),
                            nd: f(&c.nd),
                        })
                        .collect(),
                )
            })
            .collect();
        FinSimplicialSet::new(nd, faces)
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    /// Serializes to the `wfskit/1` JSON simplicial-set format.
    pub fn to_json(&self) -> Value {
        let mut nd = JsonMap::new();
        for (n, ids) in self.nd.iter().enumerate() {
            nd.insert(n.to_string(), json!(ids));
        }
        let mut faces = JsonMap::new();
        for (id, fs) in &self.faces {
            let arr: Vec<Value> = fs
                .iter()
                .map(|c| json!([cell::word_to_string(&c.word), c.nd]))
                .collect();
            faces.insert(id.clone(), Value::Array(arr));
        }
        json!({
            "dims": self.dim_bound(),
            "nd": Value::Object(nd),
            "faces": Value::Object(faces),
        })
    }

    /// Parses the `wfskit/1` JSON simplicial-set format.
    pub fn from_json(v: &Value) -> Result<Self, SsetError> {
        let nd_obj = v
            .get("nd")
            .and_then(Value::as_object)
            .ok_or_else(|| SsetError::Other("missing \"nd\" object".into()))?;
        let mut by_dim: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (k, ids) in nd_obj {
            let n: usize = k
                .parse()
                .map_err(|_| SsetError::Other(format!("bad dimension key {k:?}")))?;
            let ids = ids
                .as_array()
                .ok_or_else(|| SsetError::Other(format!("nd[{k}] is not a list")))?
                .iter()
                .map(|s| {
                    s.as_str()
                        .map(String::from)
                        .ok_or_else(|| SsetError::Other("simplex id must be a string".into()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            by_dim.insert(n, ids);
        }
        let top = by_dim.keys().max().copied().unwrap_or(0);
        let mut nd = vec![Vec::new(); top + 1];
        for (n, ids) in by_dim {
            nd[n] = ids;
        }
        let mut faces = BTreeMap::new();
        if let Some(fobj) = v.get("faces").and_then(Value::as_object) {
            for (id, fs) in fobj {
                let fs = fs
                    .as_array()
                    .ok_or_else(|| SsetError::Other(format!("faces[{id:?}] is not a list")))?
                    .iter()
                    .map(|pair| {
                        let arr = pair.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
                            SsetError::Other(format!("face entry of {id:?} is not a pair"))
                        })?;
                        let word = cell::word_from_string(arr[0].as_str().unwrap_or("?"))
                            .map_err(SsetError::Other)?;
                        let nd = arr[1]
                            .as_str()
                            .ok_or_else(|| SsetError::Other("face target must be a string".into()))?
                            .to_string();
                        Ok(Cell { word, nd })
                    })
                    .collect::<Result<Vec<_>, SsetError>>()?;
                faces.insert(id.clone(), fs);
            }
        }
        FinSimplicialSet::new(nd, faces)
    }
}

fn subset_id(set: &BTreeSet<usize>) -> String {
    let inner: Vec<String> = set.iter().map(|i| i.to_string()).collect();
    format!("[{}]", inner.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_counts() {
        let d2 = FinSimplicialSet::delta(2);
        assert_eq!(d2.nd_counts(), vec![3, 3, 1]);
        let b2 = FinSimplicialSet::boundary(2);
        assert_eq!(b2.nd_counts(), vec![3, 3]);
        let h21 = FinSimplicialSet::horn(2, 1).unwrap();
        assert_eq!(h21.nd_counts(), vec![3, 2]);
        assert!(FinSimplicialSet::boundary(0).is_empty());
        assert!(FinSimplicialSet::horn(2, 3).is_err());
    }

    #[test]
    fn cell_counts_match_binomials() {
        // |Δ_n|_m = C(n+m+1, m+1) monotone maps [m] -> [n]
        let d2 = FinSimplicialSet::delta(2);
        assert_eq!(d2.cells(0).len(), 3);
        assert_eq!(d2.cells(1).len(), 6);
        assert_eq!(d2.cells(2).len(), 10);
        assert_eq!(d2.cells(3).len(), 15);
    }

    #[test]
    fn circle_faces() {
        let s1 = FinSimplicialSet::circle();
        s1.validate().unwrap();
        let e = Cell::nd("e");
        assert_eq!(s1.face(&e, 0), Cell::nd("v"));
        assert_eq!(s1.face(&e, 1), Cell::nd("v"));
        // s_0 e has faces e, e, s_0 v degenerate bookkeeping
        let s0e = s1.degeneracy(&e, 0);
        assert_eq!(s1.face(&s0e, 0), e);
        assert_eq!(s1.face(&s0e, 1), e);
    }

    #[test]
    fn vertices_of_top_simplex() {
        let d2 = FinSimplicialSet::delta(2);
        let top = Cell::nd("[0,1,2]");
        let vs = d2.vertices(&top);
        assert_eq!(
            vs,
            vec![Cell::nd("[0]"), Cell::nd("[1]"), Cell::nd("[2]")]
        );
    }

    #[test]
    fn json_roundtrip() {
        let h = FinSimplicialSet::horn(2, 0).unwrap();
        let v = h.to_json();
        let h2 = FinSimplicialSet::from_json(&v).unwrap();
        assert_eq!(h, h2);
    }
}

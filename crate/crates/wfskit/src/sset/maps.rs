//! Maps of finite simplicial sets and exhaustive map enumeration.

use super::cell;
use super::{Cell, FinSimplicialSet, SsetError};
use serde_json::{json, Map as JsonMap, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

/// A map of simplicial sets, determined by images of the nondegenerate
/// generators of the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SSetMap {
    source: Arc<FinSimplicialSet>,
    target: Arc<FinSimplicialSet>,
    assign: BTreeMap<String, Cell>,
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("generator {0:?} has no assigned image")]
    Missing(String),
    #[error("image of {gen:?} has dimension {got}, expected {want}")]
    DimMismatch {
        gen: String,
        got: usize,
        want: usize,
    },
    #[error("image of {0:?} is not a cell of the target")]
    NotACell(String),
    #[error("map does not commute with face {index} of {gen:?}")]
    FaceClash { gen: String, index: usize },
    #[error("sources differ")]
    SourceMismatch,
    #[error("targets differ")]
    TargetMismatch,
    #[error("{0}")]
    Sset(#[from] SsetError),
    #[error("{0}")]
    Other(String),
}

/// Search budget shared across backtracking searches. Exceeding the cap is a
/// distinct outcome, never a refutation.
#[derive(Debug, Clone)]
pub struct Budget {
    pub steps: u64,
    pub cap: u64,
}

#[derive(Debug, Error)]
#[error("search budget of {cap} partial assignments exhausted")]
pub struct BudgetExceeded {
    pub cap: u64,
}

impl Budget {
    pub fn new(cap: u64) -> Self {
        Budget { steps: 0, cap }
    }

    pub fn standard() -> Self {
        Budget::new(1_000_000)
    }

    fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.steps += 1;
        if self.steps > self.cap {
            Err(BudgetExceeded { cap: self.cap })
        } else {
            Ok(())
        }
    }
}

impl SSetMap {
    pub fn new(
        source: Arc<FinSimplicialSet>,
        target: Arc<FinSimplicialSet>,
        assign: BTreeMap<String, Cell>,
    ) -> Result<Self, MapError> {
        let m = SSetMap {
            source,
            target,
            assign,
        };
        m.validate()?;
        Ok(m)
    }

    /// Builds without commutation checks; callers guarantee validity.
    pub(crate) fn new_unchecked(
        source: Arc<FinSimplicialSet>,
        target: Arc<FinSimplicialSet>,
        assign: BTreeMap<String, Cell>,
    ) -> Self {
        SSetMap {
            source,
            target,
            assign,
        }
    }

    pub fn validate(&self) -> Result<(), MapError> {
        for (n, id) in self.source.generators() {
            let img = self
                .assign
                .get(id)
                .ok_or_else(|| MapError::Missing(id.clone()))?;
            if !self.target.contains_cell(img) {
                return Err(MapError::NotACell(id.clone()));
            }
            let got = self.target.dim_of_cell(img);
            if got != n {
                return Err(MapError::DimMismatch {
                    gen: id.clone(),
                    got,
                    want: n,
                });
            }
        }
        for (n, id) in self.source.generators() {
            if n == 0 {
                continue;
            }
            let img = &self.assign[id];
            for i in 0..=n {
                let via_target = self.target.face(img, i);
                let via_source = self.eval(&self.source.face(&Cell::nd(id.clone()), i));
                if via_target != via_source {
                    return Err(MapError::FaceClash {
                        gen: id.clone(),
                        index: i,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<FinSimplicialSet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinSimplicialSet> {
        &self.target
    }

    pub fn assignment(&self) -> &BTreeMap<String, Cell> {
        &self.assign
    }

    /// Image of an arbitrary cell.
    pub fn eval(&self, c: &Cell) -> Cell {
        self.target.apply_word(&c.word, &self.assign[&c.nd])
    }

    pub fn identity(x: Arc<FinSimplicialSet>) -> Self {
        let assign = x
            .generators()
            .map(|(_, id)| (id.clone(), Cell::nd(id.clone())))
            .collect();
        SSetMap {
            source: x.clone(),
            target: x,
            assign,
        }
    }

    /// The inclusion of a sub-simplicial set whose generators share ids with
    /// the ambient one (boundary and horn inclusions, for instance).
    pub fn inclusion(
        sub: Arc<FinSimplicialSet>,
        ambient: Arc<FinSimplicialSet>,
    ) -> Result<Self, MapError> {
        let assign = sub
            .generators()
            .map(|(_, id)| (id.clone(), Cell::nd(id.clone())))
            .collect();
        SSetMap::new(sub, ambient, assign)
    }

    /// The unique map to a one-point simplicial set.
    pub fn terminal_map(x: Arc<FinSimplicialSet>, point: Arc<FinSimplicialSet>) -> Self {
        let v = point.nd_ids(0)[0].clone();
        let assign = x
            .generators()
            .map(|(n, id)| {
                (
                    id.clone(),
                    Cell {
                        word: (0..n).rev().collect(),
                        nd: v.clone(),
                    },
                )
            })
            .collect();
        SSetMap {
            source: x,
            target: point,
            assign,
        }
    }

    /// `self` then `next`.
    pub fn then(&self, next: &SSetMap) -> Result<SSetMap, MapError> {
        if self.target != next.source {
            return Err(MapError::SourceMismatch);
        }
        let assign = self
            .assign
            .iter()
            .map(|(id, c)| (id.clone(), next.eval(c)))
            .collect();
        Ok(SSetMap {
            source: self.source.clone(),
            target: next.target.clone(),
            assign,
        })
    }

    /// Levelwise injectivity, checked on all cells up to one dimension above
    /// the larger dim bound.
    pub fn is_mono(&self) -> bool {
        let top = self.source.dim_bound().max(self.target.dim_bound()) + 1;
        for n in 0..=top {
            let mut seen = BTreeSet::new();
            for c in self.source.cells(n) {
                if !seen.insert(self.eval(&c)) {
                    return false;
                }
            }
        }
        true
    }

    /// Levelwise surjectivity on cells.
    pub fn is_epi(&self) -> bool {
        let top = self.source.dim_bound().max(self.target.dim_bound()) + 1;
        for n in 0..=top {
            let image: BTreeSet<Cell> = self.source.cells(n).iter().map(|c| self.eval(c)).collect();
            if self.target.cells(n).iter().any(|c| !image.contains(c)) {
                return false;
            }
        }
        true
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<SSetMap> {
        if !self.is_iso() {
            return None;
        }
        let mut assign = BTreeMap::new();
        for (n, id) in self.target.generators() {
            // the preimage of a nondegenerate cell under an iso is nondegenerate
            let pre = self
                .source
                .cells(n)
                .into_iter()
                .find(|c| self.eval(c) == Cell::nd(id.clone()))?;
            assign.insert(id.clone(), pre);
        }
        Some(SSetMap {
            source: self.target.clone(),
            target: self.source.clone(),
            assign,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut assign = JsonMap::new();
        for (id, c) in &self.assign {
            assign.insert(id.clone(), json!([cell::word_to_string(&c.word), c.nd]));
        }
        json!({ "assign": Value::Object(assign) })
    }

    pub fn from_json(
        v: &Value,
        source: Arc<FinSimplicialSet>,
        target: Arc<FinSimplicialSet>,
    ) -> Result<Self, MapError> {
        let obj = v
            .get("assign")
            .and_then(Value::as_object)
            .ok_or_else(|| MapError::Other("missing \"assign\" object".into()))?;
        let mut assign = BTreeMap::new();
        for (id, pair) in obj {
            let arr = pair
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| MapError::Other(format!("assign[{id:?}] is not a pair")))?;
            let word =
                cell::word_from_string(arr[0].as_str().unwrap_or("?")).map_err(MapError::Other)?;
            let nd = arr[1]
                .as_str()
                .ok_or_else(|| MapError::Other("image id must be a string".into()))?
                .to_string();
            assign.insert(id.clone(), Cell { word, nd });
        }
        SSetMap::new(source, target, assign)
    }
}

/// Extra constraints for [`enumerate_maps`].
#[derive(Default, Clone)]
pub struct MapConstraints {
    /// Required images of specific generators.
    pub forced: BTreeMap<String, Cell>,
    /// Requirements of the form `word · f(gen) == cell`, as produced by
    /// degenerate images under a precomposed map.
    pub degenerate: Vec<(Vec<usize>, String, Cell)>,
    /// Postcomposition requirement: `post.0 ∘ f` must send each generator to
    /// the stated cell.
    pub post: Option<(SSetMap, BTreeMap<String, Cell>)>,
}

/// Enumerates simplicial maps `source -> target` satisfying `constraints`,
/// in deterministic (dimension, generator id) backtracking order. Stops after
/// `limit` maps when given.
pub fn enumerate_maps(
    source: &Arc<FinSimplicialSet>,
    target: &Arc<FinSimplicialSet>,
    constraints: &MapConstraints,
    limit: Option<usize>,
    budget: &mut Budget,
) -> Result<Vec<SSetMap>, BudgetExceeded> {
    let gens: Vec<(usize, String)> = source
        .generators()
        .map(|(n, id)| (n, id.clone()))
        .collect();
    let cells_by_dim: Vec<Vec<Cell>> = (0..=source.dim_bound().max(1))
        .map(|n| target.cells(n))
        .collect();
    let mut assign: BTreeMap<String, Cell> = BTreeMap::new();
    let mut out = Vec::new();
    search(
        source,
        target,
        constraints,
        &gens,
        &cells_by_dim,
        0,
        &mut assign,
        &mut out,
        limit,
        budget,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    source: &Arc<FinSimplicialSet>,
    target: &Arc<FinSimplicialSet>,
    constraints: &MapConstraints,
    gens: &[(usize, String)],
    cells_by_dim: &[Vec<Cell>],
    pos: usize,
    assign: &mut BTreeMap<String, Cell>,
    out: &mut Vec<SSetMap>,
    limit: Option<usize>,
    budget: &mut Budget,
) -> Result<(), BudgetExceeded> {
    if let Some(l) = limit {
        if out.len() >= l {
            return Ok(());
        }
    }
    if pos == gens.len() {
        out.push(SSetMap::new_unchecked(
            source.clone(),
            target.clone(),
            assign.clone(),
        ));
        return Ok(());
    }
    let (n, id) = &gens[pos];
    let forced = constraints.forced.get(id);
    let candidates: Vec<&Cell> = match forced {
        Some(c) => vec![c],
        None => cells_by_dim[*n].iter().collect(),
    };
    'cand: for cand in candidates {
        budget.tick()?;
        // faces must commute with already-assigned lower generators
        if *n > 0 {
            for i in 0..=*n {
                let src_face = source.face(&Cell::nd(id.clone()), i);
                let img_face = target.apply_word(&src_face.word, &assign[&src_face.nd]);
                if target.face(cand, i) != img_face {
                    continue 'cand;
                }
            }
        }
        for (word, gen, required) in &constraints.degenerate {
            if gen == id && &target.apply_word(word, cand) != required {
                continue 'cand;
            }
        }
        if let Some((post, required)) = &constraints.post {
            if let Some(req) = required.get(id) {
                if &post.eval(cand) != req {
                    continue 'cand;
                }
            }
        }
        assign.insert(id.clone(), cand.clone());
        search(
            source,
            target,
            constraints,
            gens,
            cells_by_dim,
            pos + 1,
            assign,
            out,
            limit,
            budget,
        )?;
        assign.remove(id);
        if let Some(l) = limit {
            if out.len() >= l {
                return Ok(());
            }
        }
    }
    Ok(())
}

/// Searches for an isomorphism by matching nondegenerate generators
/// dimension by dimension.
pub fn find_isomorphism(
    x: &Arc<FinSimplicialSet>,
    y: &Arc<FinSimplicialSet>,
) -> Option<SSetMap> {
    if x.nd_counts() != y.nd_counts() {
        return None;
    }
    let gens: Vec<(usize, String)> = x.generators().map(|(n, id)| (n, id.clone())).collect();
    let mut assign: BTreeMap<String, String> = BTreeMap::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    if iso_search(x, y, &gens, 0, &mut assign, &mut used) {
        let assign = assign
            .into_iter()
            .map(|(k, v)| (k, Cell::nd(v)))
            .collect();
        let m = SSetMap::new_unchecked(x.clone(), y.clone(), assign);
        debug_assert!(m.validate().is_ok());
        Some(m)
    } else {
        None
    }
}

fn iso_search(
    x: &Arc<FinSimplicialSet>,
    y: &Arc<FinSimplicialSet>,
    gens: &[(usize, String)],
    pos: usize,
    assign: &mut BTreeMap<String, String>,
    used: &mut BTreeSet<String>,
) -> bool {
    if pos == gens.len() {
        return true;
    }
    let (n, id) = &gens[pos];
    for cand in y.nd_ids(*n) {
        if used.contains(cand) {
            continue;
        }
        let ok = if *n == 0 {
            true
        } else {
            (0..=*n).all(|i| {
                let src_face = x.face(&Cell::nd(id.clone()), i);
                let expect = Cell {
                    word: src_face.word.clone(),
                    nd: assign[&src_face.nd].clone(),
                };
                y.face(&Cell::nd(cand.clone()), i) == expect
            })
        };
        if !ok {
            continue;
        }
        assign.insert(id.clone(), cand.clone());
        used.insert(cand.clone());
        if iso_search(x, y, gens, pos + 1, assign, used) {
            return true;
        }
        assign.remove(id);
        used.remove(cand);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_terminal() {
        let d1 = FinSimplicialSet::delta(1).shared();
        let id = SSetMap::identity(d1.clone());
        id.validate().unwrap();
        assert!(id.is_iso());
        let pt = FinSimplicialSet::delta(0).shared();
        let t = SSetMap::terminal_map(d1, pt);
        t.validate().unwrap();
        assert!(t.is_epi());
        assert!(!t.is_mono());
    }

    #[test]
    fn boundary_inclusion_is_mono() {
        let b2 = FinSimplicialSet::boundary(2).shared();
        let d2 = FinSimplicialSet::delta(2).shared();
        let inc = SSetMap::inclusion(b2, d2).unwrap();
        assert!(inc.is_mono());
        assert!(!inc.is_epi());
    }

    #[test]
    fn monotone_vertex_maps_delta1_delta1() {
        // maps Δ_1 -> Δ_1 = monotone maps [1] -> [1]: 00, 01, 11
        let d1 = FinSimplicialSet::delta(1).shared();
        let maps = enumerate_maps(
            &d1,
            &d1,
            &MapConstraints::default(),
            None,
            &mut Budget::standard(),
        )
        .unwrap();
        assert_eq!(maps.len(), 3);
    }

    #[test]
    fn iso_detects_relabeling() {
        let d2 = FinSimplicialSet::delta(2);
        let relabeled = d2.relabel(|s| format!("x{s}")).unwrap().shared();
        let d2 = d2.shared();
        assert!(find_isomorphism(&d2, &relabeled).is_some());
        let b2 = FinSimplicialSet::boundary(2).shared();
        assert!(find_isomorphism(&d2, &b2).is_none());
    }
}

//! Truncated simplicial objects valued in the free coproduct completion:
//! tensoring with finite simplicial sets, the two hom functors, latching and
//! matching objects, cofibrancy deciders, Reedy factorization for the
//! split-projective system, and fibration/weak-equivalence deciders.

use crate::coprod::{
    coprod_coproduct, coprod_equalizer, coprod_pair, coprod_product, coprod_pullback,
    coprod_pushout, enumerate_coprod_morphisms, factor_projective_completion,
    is_coprod_injection, CoprodMorphism, CoprodObject,
};
use crate::sset::cell::{word_to_string, words_of_length};
use crate::sset::explicit::ExplicitSSet;
use crate::sset::homology::{weq_oracle, WeqVerdict};
use crate::sset::lifting::{is_kan_fibration_to, FibrationReport};
use crate::sset::maps::Budget;
use crate::sset::{Cell, FinSimplicialSet, SSetMap};
use crate::wfs::{FinSetMap, WfsError};
use serde_json::{json, Map as JsonMap, Value};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

/// A simplicial object through a fixed truncation: levelwise families with
/// face and degeneracy morphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpObject {
    pub trunc: usize,
    /// `levels[n]` for `0 <= n <= trunc`.
    pub levels: Vec<CoprodObject>,
    /// `faces[n][i]: X_n -> X_{n-1}` for `1 <= n <= trunc`; `faces[0]` empty.
    pub faces: Vec<Vec<CoprodMorphism>>,
    /// `degens[n][i]: X_n -> X_{n+1}` for `0 <= n < trunc`.
    pub degens: Vec<Vec<CoprodMorphism>>,
}

impl SimpObject {
    pub fn new(
        trunc: usize,
        levels: Vec<CoprodObject>,
        faces: Vec<Vec<CoprodMorphism>>,
        degens: Vec<Vec<CoprodMorphism>>,
    ) -> Result<SimpObject, WfsError> {
        let x = SimpObject {
            trunc,
            levels,
            faces,
            degens,
        };
        x.validate()?;
        Ok(x)
    }

    pub fn validate(&self) -> Result<(), WfsError> {
        if self.levels.len() != self.trunc + 1 {
            return Err(WfsError::Other("level count must be truncation + 1".into()));
        }
        if self.faces.len() != self.trunc + 1 || !self.faces[0].is_empty() {
            return Err(WfsError::Other("face table shape mismatch".into()));
        }
        if self.degens.len() != self.trunc {
            return Err(WfsError::Other("degeneracy table shape mismatch".into()));
        }
        for n in 1..=self.trunc {
            if self.faces[n].len() != n + 1 {
                return Err(WfsError::Other(format!("level {n} needs {} faces", n + 1)));
            }
            for (i, d) in self.faces[n].iter().enumerate() {
                if d.source != self.levels[n] || d.target != self.levels[n - 1] {
                    return Err(WfsError::Other(format!("face d_{i} at level {n} mismatched")));
                }
            }
        }
        for n in 0..self.trunc {
            if self.degens[n].len() != n + 1 {
                return Err(WfsError::Other(format!(
                    "level {n} needs {} degeneracies",
                    n + 1
                )));
            }
            for (i, s) in self.degens[n].iter().enumerate() {
                if s.source != self.levels[n] || s.target != self.levels[n + 1] {
                    return Err(WfsError::Other(format!(
                        "degeneracy s_{i} at level {n} mismatched"
                    )));
                }
            }
        }
        // simplicial identities, where both sides stay within the truncation
        for n in 2..=self.trunc {
            for j in 0..=n {
                for i in 0..j {
                    let lhs = self.faces[n][j].then(&self.faces[n - 1][i])?;
                    let rhs = self.faces[n][i].then(&self.faces[n - 1][j - 1])?;
                    if lhs != rhs {
                        return Err(WfsError::Other(format!(
                            "identity d_{i} d_{j} fails at level {n}"
                        )));
                    }
                }
            }
        }
        for n in 0..self.trunc {
            for j in 0..=n {
                for i in 0..=n + 1 {
                    let lhs = self.degens[n][j].then(&self.faces[n + 1][i])?;
                    let rhs = if i < j {
                        self.faces[n][i].then(&self.degens[n - 1][j - 1])?
                    } else if i == j || i == j + 1 {
                        CoprodMorphism::identity(&self.levels[n])
                    } else {
                        self.faces[n][i - 1].then(&self.degens[n - 1][j])?
                    };
                    if lhs != rhs {
                        return Err(WfsError::Other(format!(
                            "identity d_{i} s_{j} fails at level {n}"
                        )));
                    }
                }
            }
        }
        for n in 0..self.trunc.saturating_sub(1) {
            for j in 0..=n {
                for i in 0..=j {
                    let lhs = self.degens[n][j].then(&self.degens[n + 1][i])?;
                    let rhs = self.degens[n][i].then(&self.degens[n + 1][j + 1])?;
                    if lhs != rhs {
                        return Err(WfsError::Other(format!(
                            "identity s_{i} s_{j} fails at level {n}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The constant simplicial object at a family.
    pub fn constant(a: &CoprodObject, trunc: usize) -> SimpObject {
        let id = CoprodMorphism::identity(a);
        SimpObject {
            trunc,
            levels: vec![a.clone(); trunc + 1],
            faces: (0..=trunc).map(|n| vec![id.clone(); if n == 0 { 0 } else { n + 1 }]).collect(),
            degens: (0..trunc).map(|n| vec![id.clone(); n + 1]).collect(),
        }
    }

    pub fn initial(trunc: usize) -> SimpObject {
        SimpObject::constant(&CoprodObject::initial(), trunc)
    }

    /// The composite degeneracy along a strictly decreasing word, from the
    /// level where the word's innermost operator applies.
    pub fn degeneracy_word(&self, word: &[usize], from: usize) -> Result<CoprodMorphism, WfsError> {
        let mut acc = CoprodMorphism::identity(&self.levels[from]);
        let mut level = from;
        for &i in word.iter().rev() {
            acc = acc.then(&self.degens[level][i])?;
            level += 1;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        let morph_table = |table: &[Vec<CoprodMorphism>]| {
            table
                .iter()
                .enumerate()
                .flat_map(|(n, row)| {
                    row.iter()
                        .enumerate()
                        .map(move |(i, m)| (format!("{n}:{i}"), m.to_json()))
                })
                .collect::<JsonMap<_, _>>()
        };
        json!({
            "trunc": self.trunc,
            "levels": self.levels.iter().map(CoprodObject::to_json).collect::<Vec<_>>(),
            "faces": morph_table(&self.faces),
            "degens": morph_table(&self.degens),
        })
    }

    pub fn from_json(v: &Value) -> Result<SimpObject, WfsError> {
        let trunc = v
            .get("trunc")
            .and_then(Value::as_u64)
            .ok_or_else(|| WfsError::Other("missing \"trunc\"".into()))? as usize;
        let levels = v
            .get("levels")
            .and_then(Value::as_array)
            .ok_or_else(|| WfsError::Other("missing \"levels\"".into()))?
            .iter()
            .map(CoprodObject::from_json)
            .collect::<Result<Vec<_>, _>>()?;
        let table = |key: &str, rows: Vec<usize>| -> Result<Vec<Vec<CoprodMorphism>>, WfsError> {
            let obj = v
                .get(key)
                .and_then(Value::as_object)
                .ok_or_else(|| WfsError::Other(format!("missing {key:?}")))?;
            rows.iter()
                .enumerate()
                .map(|(n, &count)| {
                    (0..count)
                        .map(|i| {
                            obj.get(&format!("{n}:{i}"))
                                .ok_or_else(|| {
                                    WfsError::Other(format!("missing {key} entry {n}:{i}"))
                                })
                                .and_then(CoprodMorphism::from_json)
                        })
                        .collect()
                })
                .collect()
        };
        let faces = table(
            "faces",
            (0..=trunc).map(|n| if n == 0 { 0 } else { n + 1 }).collect(),
        )?;
        let degens = table("degens", (0..trunc).map(|n| n + 1).collect())?;
        SimpObject::new(trunc, levels, faces, degens)
    }
}

/// A levelwise morphism of simplicial objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpMorphism {
    pub source: Arc<SimpObject>,
    pub target: Arc<SimpObject>,
    pub levels: Vec<CoprodMorphism>,
}

impl SimpMorphism {
    pub fn new(
        source: Arc<SimpObject>,
        target: Arc<SimpObject>,
        levels: Vec<CoprodMorphism>,
    ) -> Result<SimpMorphism, WfsError> {
        let f = SimpMorphism {
            source,
            target,
            levels,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), WfsError> {
        let trunc = self.source.trunc.min(self.target.trunc);
        if self.levels.len() != trunc + 1 {
            return Err(WfsError::Other("one level map per level required".into()));
        }
        for n in 0..=trunc {
            if self.levels[n].source != self.source.levels[n]
                || self.levels[n].target != self.target.levels[n]
            {
                return Err(WfsError::Other(format!("level {n} map mismatched")));
            }
        }
        for n in 1..=trunc {
            for i in 0..=n {
                let lhs = self.levels[n].then(&self.target.faces[n][i])?;
                let rhs = self.source.faces[n][i].then(&self.levels[n - 1])?;
                if lhs != rhs {
                    return Err(WfsError::Other(format!(
                        "naturality fails for d_{i} at level {n}"
                    )));
                }
            }
        }
        for n in 0..trunc {
            for i in 0..=n {
                let lhs = self.levels[n].then(&self.target.degens[n][i])?;
                let rhs = self.source.degens[n][i].then(&self.levels[n + 1])?;
                if lhs != rhs {
                    return Err(WfsError::Other(format!(
                        "naturality fails for s_{i} at level {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn identity(x: &Arc<SimpObject>) -> SimpMorphism {
        SimpMorphism {
            source: x.clone(),
            target: x.clone(),
            levels: x.levels.iter().map(CoprodMorphism::identity).collect(),
        }
    }

    pub fn then(&self, next: &SimpMorphism) -> Result<SimpMorphism, WfsError> {
        let levels = self
            .levels
            .iter()
            .zip(&next.levels)
            .map(|(f, g)| f.then(g))
            .collect::<Result<_, _>>()?;
        SimpMorphism::new(self.source.clone(), next.target.clone(), levels)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "levels": self.levels.iter().map(CoprodMorphism::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<SimpMorphism, WfsError> {
        let source = SimpObject::from_json(
            v.get("source").ok_or_else(|| WfsError::Other("missing \"source\"".into()))?,
        )?;
        let target = SimpObject::from_json(
            v.get("target").ok_or_else(|| WfsError::Other("missing \"target\"".into()))?,
        )?;
        let levels = v
            .get("levels")
            .and_then(Value::as_array)
            .ok_or_else(|| WfsError::Other("missing \"levels\"".into()))?
            .iter()
            .map(CoprodMorphism::from_json)
            .collect::<Result<Vec<_>, _>>()?;
        SimpMorphism::new(Arc::new(source), Arc::new(target), levels)
    }
}

/// All morphisms between two small simplicial objects, by levelwise search
/// with naturality pruning.
pub fn enumerate_simp_morphisms(x: &Arc<SimpObject>, y: &Arc<SimpObject>) -> Vec<SimpMorphism> {
    let trunc = x.trunc.min(y.trunc);
    let mut out = Vec::new();
    let mut partial: Vec<CoprodMorphism> = Vec::new();
    fn extend(
        x: &Arc<SimpObject>,
        y: &Arc<SimpObject>,
        trunc: usize,
        partial: &mut Vec<CoprodMorphism>,
        out: &mut Vec<SimpMorphism>,
    ) {
        let n = partial.len();
        if n == trunc + 1 {
            out.push(SimpMorphism {
                source: x.clone(),
                target: y.clone(),
                levels: partial.clone(),
            });
            return;
        }
        'cand: for c in enumerate_coprod_morphisms(&x.levels[n], &y.levels[n]) {
            if n > 0 {
                for i in 0..=n {
                    let lhs = c.then(&y.faces[n][i]).expect("composable");
                    let rhs = x.faces[n][i].then(&partial[n - 1]).expect("composable");
                    if lhs != rhs {
                        continue 'cand;
                    }
                }
                for i in 0..n {
                    let lhs = partial[n - 1].then(&y.degens[n - 1][i]).expect("composable");
                    let rhs = x.degens[n - 1][i].then(&c).expect("composable");
                    if lhs != rhs {
                        continue 'cand;
                    }
                }
            }
            partial.push(c);
            extend(x, y, trunc, partial, out);
            partial.pop();
        }
    }
    extend(x, y, trunc, &mut partial, &mut out);
    out
}

// ---------------------------------------------------------------------------
// tensoring
// ---------------------------------------------------------------------------

/// `a ⊗ k`: level `n` is a coproduct of copies of `a` indexed by all
/// `n`-simplices of `k` (degenerate ones included); structure maps permute
/// the copies along the simplices of `k`.
pub fn tensor(a: &CoprodObject, k: &FinSimplicialSet, trunc: usize) -> SimpObject {
    let cells: Vec<Vec<Cell>> = (0..=trunc).map(|n| k.cells(n)).collect();
    let positions: Vec<HashMap<String, usize>> = cells
        .iter()
        .map(|lvl| {
            lvl.iter()
                .enumerate()
                .map(|(p, c)| (c.to_string(), p))
                .collect()
        })
        .collect();
    let levels: Vec<CoprodObject> = cells
        .iter()
        .map(|lvl| coprod_coproduct(&vec![a; lvl.len()].iter().map(|r| &**r).collect::<Vec<_>>()).0)
        .collect();
    // a structure map permuting copies: copy p at `from` goes to copy
    // `image(p)` at `to`
    let transport = |from: &CoprodObject, to: &CoprodObject, image: &dyn Fn(usize) -> usize| {
        let mut index_map = BTreeMap::new();
        let mut components = BTreeMap::new();
        for ix in &from.index {
            let (tag, x) = ix.split_once(':').expect("tagged copy index");
            let p: usize = tag[1..].parse().expect("copy number");
            let target_ix = format!("c{}:{x}", image(p));
            index_map.insert(ix.clone(), target_ix);
            components.insert(ix.clone(), FinSetMap::identity(from.family[ix].clone()));
        }
        CoprodMorphism::new(from.clone(), to.clone(), index_map, components).expect("valid")
    };
    let faces = (0..=trunc)
        .map(|n| {
            if n == 0 {
                return Vec::new();
            }
            (0..=n)
                .map(|i| {
                    transport(&levels[n], &levels[n - 1], &|p| {
                        positions[n - 1][&k.face(&cells[n][p], i).to_string()]
                    })
                })
                .collect()
        })
        .collect();
    let degens = (0..trunc)
        .map(|n| {
            (0..=n)
                .map(|i| {
                    transport(&levels[n], &levels[n + 1], &|p| {
                        positions[n + 1][&k.degeneracy(&cells[n][p], i).to_string()]
                    })
                })
                .collect()
        })
        .collect();
    SimpObject {
        trunc,
        levels,
        faces,
        degens,
    }
}

// ---------------------------------------------------------------------------
// finite products with projections, and cones
// ---------------------------------------------------------------------------

/// An iterated binary product with flattened projections.
pub struct MultiProduct {
    pub object: CoprodObject,
    pub projections: Vec<CoprodMorphism>,
    stages: Vec<CoprodObject>,
}

impl MultiProduct {
    pub fn new(factors: &[&CoprodObject]) -> MultiProduct {
        if factors.is_empty() {
            return MultiProduct {
                object: CoprodObject::terminal(),
                projections: Vec::new(),
                stages: Vec::new(),
            };
        }
        let mut object = factors[0].clone();
        let mut projections = vec![CoprodMorphism::identity(&object)];
        let mut stages = Vec::new();
        for f in &factors[1..] {
            let (obj, p1, p2) = coprod_product(&object, f);
            projections = projections
                .iter()
                .map(|p| p1.then(p).expect("composable"))
                .collect();
            projections.push(p2);
            object = obj.clone();
            stages.push(obj);
        }
        MultiProduct {
            object,
            projections,
            stages,
        }
    }

    /// The cone morphism with the given legs; `source` is needed when there
    /// are no legs.
    pub fn induce(
        &self,
        source: &CoprodObject,
        legs: &[CoprodMorphism],
    ) -> Result<CoprodMorphism, WfsError> {
        if legs.is_empty() {
            return terminal_morphism(source);
        }
        let mut acc = legs[0].clone();
        for (k, leg) in legs.iter().enumerate().skip(1) {
            acc = coprod_pair(&self.stages[k - 1], &acc, leg)?;
        }
        Ok(acc)
    }
}

/// The unique morphism to the terminal family.
pub fn terminal_morphism(source: &CoprodObject) -> Result<CoprodMorphism, WfsError> {
    let terminal = CoprodObject::terminal();
    let index_map = source.index.iter().map(|x| (x.clone(), "*".to_string())).collect();
    let components = source
        .index
        .iter()
        .map(|x| {
            let map = source.family[x].iter().map(|e| (e.clone(), "*".to_string())).collect();
            Ok((
                x.clone(),
                FinSetMap::new(source.family[x].clone(), vec!["*".into()], map)?,
            ))
        })
        .collect::<Result<_, WfsError>>()?;
    CoprodMorphism::new(source.clone(), terminal, index_map, components)
}

/// Factors `h: W -> P` through a label-preserving subobject `E ⊆ P`.
pub(crate) fn factor_through_subobject(h: &CoprodMorphism, sub: &CoprodObject) -> Result<CoprodMorphism, WfsError> {
    let components = h
        .source
        .index
        .iter()
        .map(|x| {
            let y = &h.index_map[x];
            let fam = sub
                .family
                .get(y)
                .ok_or_else(|| WfsError::Other(format!("index {y:?} escapes the subobject")))?;
            Ok((
                x.clone(),
                FinSetMap::new(
                    h.source.family[x].clone(),
                    fam.clone(),
                    h.components[x].map.clone(),
                )?,
            ))
        })
        .collect::<Result<_, WfsError>>()?;
    CoprodMorphism::new(h.source.clone(), sub.clone(), h.index_map.clone(), components)
}

/// Joint equalizer of a list of parallel pairs out of one object.
pub(crate) fn equalize_all(
    p: &CoprodObject,
    conditions: &[(CoprodMorphism, CoprodMorphism)],
) -> Result<(CoprodObject, CoprodMorphism), WfsError> {
    let mut object = p.clone();
    let mut include = CoprodMorphism::identity(p);
    for (lhs, rhs) in conditions {
        let (obj, inc) = coprod_equalizer(&include.then(lhs)?, &include.then(rhs)?)?;
        include = inc.then(&include)?;
        object = obj;
    }
    Ok((object, include))
}

/// A morphism defined on a quotient-like object through a jointly surjective
/// cover: entries pushed forward from each cover leg, with consistency
/// checked.
fn induced_from_cover(
    object: &CoprodObject,
    target: &CoprodObject,
    cover: &[&CoprodMorphism],
    legs: &[&CoprodMorphism],
) -> Result<CoprodMorphism, WfsError> {
    let mut index_map: BTreeMap<String, String> = BTreeMap::new();
    let mut elem_map: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for (c, l) in cover.iter().zip(legs) {
        for x in &c.source.index {
            let upstairs = &c.index_map[x];
            let downstairs = &l.index_map[x];
            if let Some(prev) = index_map.get(upstairs) {
                if prev != downstairs {
                    return Err(WfsError::Other("cover legs disagree on an index".into()));
                }
            }
            index_map.insert(upstairs.clone(), downstairs.clone());
            let slot = elem_map.entry(upstairs.clone()).or_default();
            for e in &c.source.family[x] {
                let up = &c.components[x].map[e];
                let down = &l.components[x].map[e];
                if let Some(prev) = slot.get(up) {
                    if prev != down {
                        return Err(WfsError::Other("cover legs disagree on an element".into()));
                    }
                }
                slot.insert(up.clone(), down.clone());
            }
        }
    }
    let components = object
        .index
        .iter()
        .map(|x| {
            let y = index_map
                .get(x)
                .ok_or_else(|| WfsError::Other(format!("cover misses index {x:?}")))?;
            let slot = &elem_map[x];
            let map = object.family[x]
                .iter()
                .map(|e| {
                    slot.get(e)
                        .map(|d| (e.clone(), d.clone()))
                        .ok_or_else(|| WfsError::Other(format!("cover misses element {e:?}")))
                })
                .collect::<Result<_, _>>()?;
            Ok((
                x.clone(),
                FinSetMap::new(object.family[x].clone(), target.family[y].clone(), map)?,
            ))
        })
        .collect::<Result<_, WfsError>>()?;
    CoprodMorphism::new(object.clone(), target.clone(), index_map, components)
}

/// Cone into a pullback built by `coprod_pullback`, from legs agreeing in
/// the base.
fn pullback_induce(
    pb: &CoprodObject,
    a: &CoprodMorphism,
    b: &CoprodMorphism,
) -> Result<CoprodMorphism, WfsError> {
    if a.source != b.source {
        return Err(WfsError::Other("pullback cone legs must share a source".into()));
    }
    let index_map: BTreeMap<String, String> = a
        .source
        .index
        .iter()
        .map(|x| (x.clone(), format!("({},{})", a.index_map[x], b.index_map[x])))
        .collect();
    let components = a
        .source
        .index
        .iter()
        .map(|x| {
            let y = &index_map[x];
            let fam = pb
                .family
                .get(y)
                .ok_or_else(|| WfsError::Other("cone does not land in the pullback".into()))?;
            let map = a.source.family[x]
                .iter()
                .map(|e| {
                    (
                        e.clone(),
                        format!("({},{})", a.components[x].map[e], b.components[x].map[e]),
                    )
                })
                .collect();
            Ok((
                x.clone(),
                FinSetMap::new(a.source.family[x].clone(), fam.clone(), map)?,
            ))
        })
        .collect::<Result<_, WfsError>>()?;
    CoprodMorphism::new(a.source.clone(), pb.clone(), index_map, components)
}

// ---------------------------------------------------------------------------
// latching and matching
// ---------------------------------------------------------------------------

/// A latching object with the colimit legs from each degeneracy slot.
pub struct Latching {
    pub object: CoprodObject,
    /// `slot_legs[i]: X_{n-1} -> L_n`, the image of the `s_i` summand.
    pub slot_legs: Vec<CoprodMorphism>,
}

/// The latching object at level `n` computed as the colimit over the
/// degeneracy slots: `n` copies of level `n-1`, glued along the degeneracy
/// identities through level `n-2`.
pub fn latching_object(
    levels: &[CoprodObject],
    degens: &[Vec<CoprodMorphism>],
    n: usize,
) -> Latching {
    if n == 0 {
        return Latching {
            object: CoprodObject::initial(),
            slot_legs: Vec::new(),
        };
    }
    let part = &levels[n - 1];
    // union-find over tagged indices and tagged elements of the n slots
    let mut idx_nodes: Vec<(usize, String)> = Vec::new();
    let mut elem_nodes: Vec<(usize, String, String)> = Vec::new();
    for slot in 0..n {
        for x in &part.index {
            idx_nodes.push((slot, x.clone()));
            for e in &part.family[x] {
                elem_nodes.push((slot, x.clone(), e.clone()));
            }
        }
    }
    let idx_pos: BTreeMap<(usize, String), usize> = idx_nodes
        .iter()
        .cloned()
        .enumerate()
        .map(|(k, v)| (v, k))
        .collect();
    let elem_pos: BTreeMap<(usize, String, String), usize> = elem_nodes
        .iter()
        .cloned()
        .enumerate()
        .map(|(k, v)| (v, k))
        .collect();
    let mut idx_uf = UnionFind::new(idx_nodes.len());
    let mut elem_uf = UnionFind::new(elem_nodes.len());
    if n >= 2 {
        let below = &levels[n - 2];
        for j in 1..n {
            for i in 0..j {
                // s_j ∘ s_i = s_i ∘ s_{j-1} on level n-2: slot j sees the
                // image of s_i, slot i sees the image of s_{j-1}
                let si = &degens[n - 2][i];
                let sj1 = &degens[n - 2][j - 1];
                for z in &below.index {
                    idx_uf.union(
                        idx_pos[&(j, si.index_map[z].clone())],
                        idx_pos[&(i, sj1.index_map[z].clone())],
                    );
                    for e in &below.family[z] {
                        elem_uf.union(
                            elem_pos[&(
                                j,
                                si.index_map[z].clone(),
                                si.components[z].map[e].clone(),
                            )],
                            elem_pos[&(
                                i,
                                sj1.index_map[z].clone(),
                                sj1.components[z].map[e].clone(),
                            )],
                        );
                    }
                }
            }
        }
    }
    // canonical labels per class: lexicographic minimum member
    let idx_label = class_labels(&mut idx_uf, &idx_nodes, |(s, x)| format!("{s}|{x}"));
    let elem_label = class_labels(&mut elem_uf, &elem_nodes, |(s, x, e)| format!("{s}|{x}|{e}"));
    let mut index: Vec<String> = idx_label.values().cloned().collect();
    index.sort();
    index.dedup();
    let mut family: BTreeMap<String, Vec<String>> =
        index.iter().map(|x| (x.clone(), Vec::new())).collect();
    let mut seen = BTreeSet::new();
    for (slot, x, e) in &elem_nodes {
        let class = &elem_label[&(*slot, x.clone(), e.clone())];
        if seen.insert(class.clone()) {
            family
                .get_mut(&idx_label[&(*slot, x.clone())])
                .expect("class present")
                .push(class.clone());
        }
    }
    let object = CoprodObject::new(index, family).expect("valid quotient");
    let slot_legs = (0..n)
        .map(|slot| {
            let index_map = part
                .index
                .iter()
                .map(|x| (x.clone(), idx_label[&(slot, x.clone())].clone()))
                .collect();
            let components = part
                .index
                .iter()
                .map(|x| {
                    let y = &idx_label[&(slot, x.clone())];
                    let map = part.family[x]
                        .iter()
                        .map(|e| (e.clone(), elem_label[&(slot, x.clone(), e.clone())].clone()))
                        .collect();
                    (
                        x.clone(),
                        FinSetMap::new(part.family[x].clone(), object.family[y].clone(), map)
                            .expect("valid"),
                    )
                })
                .collect();
            CoprodMorphism::new(part.clone(), object.clone(), index_map, components)
                .expect("valid")
        })
        .collect();
    Latching { object, slot_legs }
}

/// Latching object of a simplicial object, with the canonical morphism into
/// level `n`.
pub fn latching(x: &SimpObject, n: usize) -> Result<(Latching, CoprodMorphism), WfsError> {
    let l = latching_object(&x.levels, &x.degens, n);
    let covers: Vec<&CoprodMorphism> = l.slot_legs.iter().collect();
    let legs: Vec<&CoprodMorphism> = if n == 0 {
        Vec::new()
    } else {
        x.degens[n - 1].iter().collect()
    };
    let canonical = induced_from_cover(&l.object, &x.levels[n], &covers, &legs)?;
    Ok((l, canonical))
}

/// A matching object with its projections to level `n-1`.  Built one slot
/// at a time, equalizing the face compatibilities as soon as both sides are
/// available, so the full ambient product is never materialized.
pub struct Matching {
    pub object: CoprodObject,
    pub projections: Vec<CoprodMorphism>,
    /// For each extension step: the product stage before equalizing and the
    /// equalized subobject, used to rebuild cones incrementally.
    stages: Vec<(CoprodObject, CoprodObject)>,
}

impl Matching {
    /// Cone into the matching object from legs satisfying the face
    /// compatibilities.
    pub fn induce(
        &self,
        source: &CoprodObject,
        legs: &[CoprodMorphism],
    ) -> Result<CoprodMorphism, WfsError> {
        if legs.is_empty() {
            return terminal_morphism(source);
        }
        let mut acc = legs[0].clone();
        for (k, leg) in legs.iter().enumerate().skip(1) {
            let (pre, sub) = &self.stages[k - 1];
            let into = coprod_pair(pre, &acc, leg)?;
            acc = factor_through_subobject(&into, sub)?;
        }
        Ok(acc)
    }
}

/// The matching object at level `n`: tuples of `n+1` simplices of level
/// `n-1` with compatible faces.
pub fn matching_object(
    levels: &[CoprodObject],
    faces: &[Vec<CoprodMorphism>],
    n: usize,
) -> Result<Matching, WfsError> {
    if n == 0 {
        return Ok(Matching {
            object: CoprodObject::terminal(),
            projections: Vec::new(),
            stages: Vec::new(),
        });
    }
    let part = &levels[n - 1];
    let mut object = part.clone();
    let mut projections = vec![CoprodMorphism::identity(&object)];
    let mut stages = Vec::new();
    for j in 1..=n {
        let (pre, p1, p2) = coprod_product(&object, part);
        let mut next: Vec<CoprodMorphism> = projections
            .iter()
            .map(|p| p1.then(p))
            .collect::<Result<_, _>>()?;
        next.push(p2);
        // equalize d_i x_j = d_{j-1} x_i against every earlier slot
        let mut conditions = Vec::new();
        if n >= 2 {
            for i in 0..j {
                let lhs = next[j].then(&faces[n - 1][i])?;
                let rhs = next[i].then(&faces[n - 1][j - 1])?;
                conditions.push((lhs, rhs));
            }
        }
        let (sub, include) = equalize_all(&pre, &conditions)?;
        projections = next
            .iter()
            .map(|p| include.then(p))
            .collect::<Result<_, _>>()?;
        stages.push((pre, sub));
        object = projections[0].source.clone();
    }
    Ok(Matching {
        object,
        projections,
        stages,
    })
}

/// Matching object of a simplicial object, with the canonical morphism from
/// level `n`.
pub fn matching(x: &SimpObject, n: usize) -> Result<(Matching, CoprodMorphism), WfsError> {
    let m = matching_object(&x.levels, &x.faces, n)?;
    let legs: Vec<CoprodMorphism> = if n == 0 {
        Vec::new()
    } else {
        x.faces[n].clone()
    };
    let canonical = m.induce(&x.levels[n], &legs)?;
    Ok((m, canonical))
}

// ---------------------------------------------------------------------------
// hom functors
// ---------------------------------------------------------------------------

/// The simplicial set of morphisms out of a family: level `n` is the
/// hom-set into level `n` of the simplicial object.
pub struct HomRight {
    pub object: Arc<FinSimplicialSet>,
    elements: Vec<Vec<CoprodMorphism>>,
    index: Vec<HashMap<String, usize>>,
    cells: Vec<Vec<Cell>>,
}

pub fn hom_right(a: &CoprodObject, x: &SimpObject) -> Result<HomRight, WfsError> {
    let elements: Vec<Vec<CoprodMorphism>> = x
        .levels
        .iter()
        .map(|lvl| enumerate_coprod_morphisms(a, lvl))
        .collect();
    let index: Vec<HashMap<String, usize>> = elements
        .iter()
        .map(|lvl| lvl.iter().enumerate().map(|(k, m)| (m.key(), k)).collect())
        .collect();
    let labels = elements
        .iter()
        .map(|lvl| lvl.iter().map(CoprodMorphism::key).collect())
        .collect();
    let mut face = vec![Vec::new()];
    for n in 1..=x.trunc {
        let mut per_i = Vec::new();
        for i in 0..=n {
            per_i.push(
                elements[n]
                    .iter()
                    .map(|h| index[n - 1][&h.then(&x.faces[n][i]).expect("composable").key()])
                    .collect(),
            );
        }
        face.push(per_i);
    }
    let mut degen = Vec::new();
    for n in 0..x.trunc {
        let mut per_i = Vec::new();
        for i in 0..=n {
            per_i.push(
                elements[n]
                    .iter()
                    .map(|h| index[n + 1][&h.then(&x.degens[n][i]).expect("composable").key()])
                    .collect(),
            );
        }
        degen.push(per_i);
    }
    let explicit = ExplicitSSet {
        labels,
        face,
        degen,
    };
    let (object, cells) = explicit
        .to_ez()
        .map_err(|e| WfsError::Other(format!("hom-set simplicial set is malformed: {e}")))?;
    Ok(HomRight {
        object: object.shared(),
        elements,
        index,
        cells,
    })
}

/// The simplicial map `hom_right(a, X) -> hom_right(a, Y)` induced by a
/// morphism of simplicial objects.
pub fn hom_right_map(f: &SimpMorphism, src: &HomRight, dst: &HomRight) -> Result<SSetMap, WfsError> {
    let mut assign = BTreeMap::new();
    for (n, id) in src.object.generators() {
        let idx = src.cells[n]
            .iter()
            .position(|c| c.is_nondegenerate() && c.nd == *id)
            .ok_or_else(|| WfsError::Other("generator missing at its level".into()))?;
        let image = src.elements[n][idx].then(&f.levels[n])?;
        let at = *dst.index[n]
            .get(&image.key())
            .ok_or_else(|| WfsError::Other("image escapes the hom simplicial set".into()))?;
        assign.insert(id.clone(), dst.cells[n][at].clone());
    }
    Ok(SSetMap::new_unchecked(
        src.object.clone(),
        dst.object.clone(),
        assign,
    ))
}

/// The end `hom_left(k, x)`: the family of simplicial maps from `k` into
/// `x`, cut out of an iterated product over the nondegenerate simplices of
/// `k` by the face compatibilities. Equalizing happens slot by slot to keep
/// the intermediate products near the size of the end itself.
pub struct HomLeft {
    pub object: CoprodObject,
    x: SimpObject,
    slots: Vec<(usize, String)>,
    slot_pos: BTreeMap<(usize, String), usize>,
    /// `projections[t]: object -> x.levels[slots[t].0]`, evaluation at the
    /// slot's simplex.
    projections: Vec<CoprodMorphism>,
}

impl HomLeft {
    pub fn new(k: &FinSimplicialSet, x: &SimpObject) -> Result<HomLeft, WfsError> {
        let top = x.trunc.min(k.dim_bound());
        let mut slots: Vec<(usize, String)> = Vec::new();
        for n in 0..=top {
            for id in k.nd_ids(n) {
                slots.push((n, id.clone()));
            }
        }
        let slot_pos: BTreeMap<(usize, String), usize> = slots
            .iter()
            .cloned()
            .enumerate()
            .map(|(p, s)| (s, p))
            .collect();
        let mut object = CoprodObject::terminal();
        let mut projections: Vec<CoprodMorphism> = Vec::new();
        for (pos, (n, id)) in slots.iter().enumerate() {
            if pos == 0 {
                object = x.levels[*n].clone();
                projections.push(CoprodMorphism::identity(&object));
            } else {
                let (p, p1, p2) = coprod_product(&object, &x.levels[*n]);
                projections = projections
                    .iter()
                    .map(|q| p1.then(q))
                    .collect::<Result<_, _>>()?;
                projections.push(p2);
                object = p;
            }
            if *n >= 1 {
                // all faces land in lower dimensions, so their slots exist
                let mut conditions = Vec::new();
                for i in 0..=*n {
                    let fc = k.face(&Cell::nd(id.clone()), i);
                    let m = *n - 1 - fc.word.len();
                    let lhs = projections[pos].then(&x.faces[*n][i])?;
                    let rhs = projections[slot_pos[&(m, fc.nd.clone())]]
                        .then(&x.degeneracy_word(&fc.word, m)?)?;
                    conditions.push((lhs, rhs));
                }
                let (obj2, inc) = equalize_all(&object, &conditions)?;
                projections = projections
                    .iter()
                    .map(|q| inc.then(q))
                    .collect::<Result<_, _>>()?;
                object = obj2;
            }
        }
        Ok(HomLeft {
            object,
            x: x.clone(),
            slots,
            slot_pos,
            projections,
        })
    }

    /// A cone into the end from slot-indexed legs (ordered like `slots`).
    pub fn cone(&self, source: &CoprodObject, legs: &[CoprodMorphism]) -> Result<CoprodMorphism, WfsError> {
        if self.slots.is_empty() {
            return terminal_morphism(source);
        }
        nested_cone(&self.object, source, &legs.iter().collect::<Vec<_>>())
    }

    /// `hom_left(k, X) -> hom_left(k, Y)` along `f: X -> Y`; `target` is the
    /// end over the same `k` into `f.target`.
    pub fn post(&self, f: &SimpMorphism, target: &HomLeft) -> Result<CoprodMorphism, WfsError> {
        let legs = self
            .slots
            .iter()
            .zip(&self.projections)
            .map(|((n, _), p)| p.then(&f.levels[*n]))
            .collect::<Result<Vec<_>, _>>()?;
        target.cone(&self.object, &legs)
    }

    /// `hom_left(k', x) -> hom_left(k, x)` along `g: k -> k'`; `self` is the
    /// end over `k'`, `target` the end over `k`.
    pub fn pre(&self, g: &SSetMap, target: &HomLeft) -> Result<CoprodMorphism, WfsError> {
        let legs = target
            .slots
            .iter()
            .map(|(n, id)| {
                let image = g.eval(&Cell::nd(id.clone()));
                let m = *n - image.word.len();
                let slot = *self
                    .slot_pos
                    .get(&(m, image.nd.clone()))
                    .ok_or_else(|| WfsError::Other("image simplex has no slot".into()))?;
                self.projections[slot].then(&self.x.degeneracy_word(&image.word, m)?)
            })
            .collect::<Result<Vec<_>, _>>()?;
        target.cone(&self.object, &legs)
    }
}

pub fn hom_left(k: &FinSimplicialSet, x: &SimpObject) -> Result<CoprodObject, WfsError> {
    Ok(HomLeft::new(k, x)?.object)
}

/// A cone into a subobject of a left-associated iterated product, built by
/// folding the legs' labels.
pub(crate) fn nested_cone(
    target: &CoprodObject,
    source: &CoprodObject,
    legs: &[&CoprodMorphism],
) -> Result<CoprodMorphism, WfsError> {
    let mut index_map = BTreeMap::new();
    let mut components = BTreeMap::new();
    for x in &source.index {
        let mut ix = legs[0].index_map[x].clone();
        for leg in &legs[1..] {
            ix = format!("({ix},{})", leg.index_map[x]);
        }
        let fam = target
            .family
            .get(&ix)
            .ok_or_else(|| WfsError::Other("cone does not land in the end".into()))?;
        let map = source.family[x]
            .iter()
            .map(|e| {
                let mut label = legs[0].components[x].map[e].clone();
                for leg in &legs[1..] {
                    label = format!("({label},{})", leg.components[x].map[e]);
                }
                (e.clone(), label)
            })
            .collect();
        index_map.insert(x.clone(), ix.clone());
        components.insert(
            x.clone(),
            FinSetMap::new(source.family[x].clone(), fam.clone(), map)?,
        );
    }
    CoprodMorphism::new(source.clone(), target.clone(), index_map, components)
}

// ---------------------------------------------------------------------------
// cofibrancy deciders
// ---------------------------------------------------------------------------

/// The degenerate/nondegenerate decomposition certificate: per level, the
/// nondegenerate component indices and the assignment of every degenerate
/// component to its generating (level, word, component).
#[derive(Debug, Clone)]
pub struct CofibrancyCertificate {
    pub nd_components: Vec<Vec<String>>,
    pub deg_assignment: Vec<BTreeMap<String, (usize, String, String)>>,
}

#[derive(Debug, Clone)]
pub enum CofibrancyVerdict {
    Cofibrant(CofibrancyCertificate),
    Refuted { level: usize, reason: String },
}

impl CofibrancyVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, CofibrancyVerdict::Cofibrant(_))
    }
}

/// Decomposition decider: splits every level into nondegenerate components
/// plus one copy of a lower nondegenerate component per degeneracy word,
/// refuting at the first level where this fails.
pub fn is_cofibrant_decomposition(x: &SimpObject) -> CofibrancyVerdict {
    let mut nd: Vec<Vec<String>> = vec![x.levels[0].index.clone()];
    let mut assignment: Vec<BTreeMap<String, (usize, String, String)>> = vec![BTreeMap::new()];
    for n in 1..=x.trunc {
        // every degeneracy must be a coproduct injection
        for (i, s) in x.degens[n - 1].iter().enumerate() {
            if !is_coprod_injection(s) {
                return CofibrancyVerdict::Refuted {
                    level: n,
                    reason: format!("s_{i} out of level {} is not a coproduct injection", n - 1),
                };
            }
        }
        let mut assigned: BTreeMap<String, (usize, String, String)> = BTreeMap::new();
        for kdim in (0..n).rev() {
            for word in words_of_length(n, n - kdim) {
                let s_w = match x.degeneracy_word(&word, kdim) {
                    Ok(m) => m,
                    Err(e) => {
                        return CofibrancyVerdict::Refuted {
                            level: n,
                            reason: format!("degeneracy word fails to compose: {e}"),
                        }
                    }
                };
                for comp in &nd[kdim] {
                    let img = s_w.index_map[comp].clone();
                    if let Some((k2, w2, c2)) = assigned.get(&img) {
                        return CofibrancyVerdict::Refuted {
                            level: n,
                            reason: format!(
                                "component {img:?} is hit by both {} of {c2:?} (level {k2}) and {} of {comp:?} (level {kdim})",
                                w2, word_to_string(&word)
                            ),
                        };
                    }
                    assigned.insert(img, (kdim, word_to_string(&word), comp.clone()));
                }
            }
        }
        let nd_here: Vec<String> = x.levels[n]
            .index
            .iter()
            .filter(|ix| !assigned.contains_key(*ix))
            .cloned()
            .collect();
        nd.push(nd_here);
        assignment.push(assigned);
    }
    CofibrancyVerdict::Cofibrant(CofibrancyCertificate {
        nd_components: nd,
        deg_assignment: assignment,
    })
}

/// Latching-map decider: cofibrant iff every canonical latching morphism is
/// a coproduct injection.
pub fn is_cofibrant_latching(x: &SimpObject) -> CofibrancyVerdict {
    for n in 1..=x.trunc {
        let (_, canonical) = match latching(x, n) {
            Ok(v) => v,
            Err(e) => {
                return CofibrancyVerdict::Refuted {
                    level: n,
                    reason: format!("latching morphism is ill-defined: {e}"),
                }
            }
        };
        if !is_coprod_injection(&canonical) {
            return CofibrancyVerdict::Refuted {
                level: n,
                reason: format!("latching morphism at level {n} is not a coproduct injection"),
            };
        }
    }
    CofibrancyVerdict::Cofibrant(CofibrancyCertificate {
        nd_components: Vec::new(),
        deg_assignment: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// Reedy factorization
// ---------------------------------------------------------------------------

pub struct ReedyFactorization {
    pub mid: Arc<SimpObject>,
    pub left: SimpMorphism,
    pub right: SimpMorphism,
    /// Per level: the corner of the right leg, which is split epi by
    /// construction.
    pub corners: Vec<CoprodMorphism>,
}

/// Factors `f: X -> Y` levelwise through the split-projective system: the
/// left leg is degreewise a coproduct injection built through latching
/// pushouts, the right leg has split-epi matching corners.
pub fn reedy_factorize(f: &SimpMorphism) -> Result<ReedyFactorization, WfsError> {
    let x = &f.source;
    let y = &f.target;
    let trunc = x.trunc.min(y.trunc);
    let mut z_levels: Vec<CoprodObject> = Vec::new();
    let mut z_faces: Vec<Vec<CoprodMorphism>> = Vec::new();
    let mut z_degens: Vec<Vec<CoprodMorphism>> = Vec::new();
    let mut left_levels: Vec<CoprodMorphism> = Vec::new();
    let mut right_levels: Vec<CoprodMorphism> = Vec::new();
    let mut corners: Vec<CoprodMorphism> = Vec::new();
    for n in 0..=trunc {
        // latching of X at n (with canonical) and of the partial Z
        let lx = latching_object(&x.levels, &x.degens, n);
        let lx_canonical = induced_from_cover(
            &lx.object,
            &x.levels[n],
            &lx.slot_legs.iter().collect::<Vec<_>>(),
            &if n == 0 {
                Vec::new()
            } else {
                x.degens[n - 1].iter().collect::<Vec<_>>()
            },
        )?;
        let lz = latching_object(&z_levels, &z_degens, n);
        // induced L_n X -> L_n Z along the left legs below
        let lx_to_lz = {
            let targets: Vec<CoprodMorphism> = (0..n)
                .map(|i| left_levels[n - 1].then(&lz.slot_legs[i]))
                .collect::<Result<_, _>>()?;
            induced_from_cover(
                &lx.object,
                &lz.object,
                &lx.slot_legs.iter().collect::<Vec<_>>(),
                &targets.iter().collect::<Vec<_>>(),
            )?
        };
        // corner domain: L_n Z ⊔_{L_n X} X_n
        let (dom, into_dom_from_x, into_dom_from_lz) =
            coprod_pushout(&lx_canonical, &lx_to_lz)?;
        // matching of the partial Z and of Y at n
        let mz = matching_object(&z_levels, &z_faces, n)?;
        let my = matching_object(&y.levels, &y.faces, n)?;
        // induced M_n Z -> M_n Y along the right legs below
        let mz_to_my = {
            let legs: Vec<CoprodMorphism> = (0..=n.min(mz.projections.len()))
                .take(mz.projections.len())
                .map(|i| mz.projections[i].then(&right_levels[n - 1]))
                .collect::<Result<_, _>>()?;
            my.induce(&mz.object, &legs)?
        };
        let y_to_my = my.induce(
            &y.levels[n],
            &if n == 0 { Vec::new() } else { y.faces[n].clone() },
        )?;
        // corner codomain: M_n Z ×_{M_n Y} Y_n
        let (cod, cod_to_mz, cod_to_y) = coprod_pullback(&mz_to_my, &y_to_my)?;
        // corner morphism on the X_n summand
        let x_to_mz = mz.induce(
            &x.levels[n],
            &if n == 0 {
                Vec::new()
            } else {
                x.faces[n]
                    .iter()
                    .map(|d| d.then(&left_levels[n - 1]))
                    .collect::<Result<Vec<_>, _>>()?
            },
        )?;
        let x_to_cod = pullback_induce(&cod, &x_to_mz, &f.levels[n])?;
        // corner morphism on the L_n Z summand: slotwise via the simplicial
        // identities for the faces of a degenerate simplex
        let lz_to_cod = if n == 0 {
            CoprodMorphism::new(
                CoprodObject::initial(),
                cod.clone(),
                BTreeMap::new(),
                BTreeMap::new(),
            )?
        } else {
            let mut slot_targets: Vec<CoprodMorphism> = Vec::new();
            for i in 0..n {
                // faces of the would-be s_i simplex: Z_{n-1} -> M_n Z
                let mut legs = Vec::new();
                for j in 0..=n {
                    let leg = if j == i || j == i + 1 {
                        CoprodMorphism::identity(&z_levels[n - 1])
                    } else if j < i {
                        z_faces[n - 1][j].then(&z_degens[n - 2][i - 1])?
                    } else {
                        z_faces[n - 1][j - 1].then(&z_degens[n - 2][i])?
                    };
                    legs.push(leg);
                }
                let to_mz = mz.induce(&z_levels[n - 1], &legs)?;
                let to_y = right_levels[n - 1].then(&y.degens[n - 1][i])?;
                slot_targets.push(pullback_induce(&cod, &to_mz, &to_y)?);
            }
            induced_from_cover(
                &lz.object,
                &cod,
                &lz.slot_legs.iter().collect::<Vec<_>>(),
                &slot_targets.iter().collect::<Vec<_>>(),
            )?
        };
        // corner: dom -> cod, induced out of the pushout
        let corner = induced_from_cover(
            &dom,
            &cod,
            &[&into_dom_from_x, &into_dom_from_lz],
            &[&x_to_cod, &lz_to_cod],
        )?;
        // projective-type factorization of the corner
        let (z_n, lambda, rho) = factor_projective_completion(&corner)?;
        corners.push(rho.clone());
        // structure maps of Z at level n
        left_levels.push(into_dom_from_x.then(&lambda)?);
        if n > 0 {
            let degens_in: Vec<CoprodMorphism> = (0..n)
                .map(|i| lz.slot_legs[i].then(&into_dom_from_lz)?.then(&lambda))
                .collect::<Result<_, _>>()?;
            z_degens.push(degens_in);
            let faces_out: Vec<CoprodMorphism> = (0..=n)
                .map(|j| rho.then(&cod_to_mz)?.then(&mz.projections[j]))
                .collect::<Result<_, _>>()?;
            z_faces.push(faces_out);
        } else {
            z_faces.push(Vec::new());
        }
        right_levels.push(rho.then(&cod_to_y)?);
        z_levels.push(z_n);
    }
    let mid = Arc::new(SimpObject::new(trunc, z_levels, z_faces, z_degens)?);
    let left = SimpMorphism::new(x.clone(), mid.clone(), left_levels)?;
    let right = SimpMorphism::new(mid.clone(), y.clone(), right_levels)?;
    // the factorization must compose back to f
    for n in 0..=trunc {
        if left.levels[n].then(&right.levels[n])? != f.levels[n] {
            return Err(WfsError::Other(format!(
                "factorization does not compose to the input at level {n}"
            )));
        }
    }
    Ok(ReedyFactorization {
        mid,
        left,
        right,
        corners,
    })
}

// ---------------------------------------------------------------------------
// fibrations and weak equivalences
// ---------------------------------------------------------------------------

/// The connected projectives occurring in the given objects: one singleton
/// family per distinct component set.
pub fn default_projectives(objects: &[&SimpObject]) -> Vec<CoprodObject> {
    let mut sets: BTreeSet<Vec<String>> = BTreeSet::new();
    for o in objects {
        for lvl in &o.levels {
            for fam in lvl.family.values() {
                sets.insert(fam.clone());
            }
        }
    }
    sets.into_iter().map(CoprodObject::embed).collect()
}

#[derive(Debug)]
pub struct SobjFibrationReport {
    pub holds: bool,
    pub per_projective: Vec<(CoprodObject, FibrationReport)>,
}

/// A morphism is a fibration when every connected projective sees a Kan
/// fibration of hom simplicial sets.
pub fn is_fibration(
    f: &SimpMorphism,
    projectives: &[CoprodObject],
    dim: usize,
    budget: &mut Budget,
) -> Result<SobjFibrationReport, WfsError> {
    let mut per = Vec::new();
    let mut holds = true;
    for p in projectives {
        let src = hom_right(p, &f.source)?;
        let dst = hom_right(p, &f.target)?;
        let map = hom_right_map(f, &src, &dst)?;
        let report = is_kan_fibration_to(&map, dim, budget)?;
        holds &= report.holds;
        per.push((p.clone(), report));
    }
    Ok(SobjFibrationReport {
        holds,
        per_projective: per,
    })
}

#[derive(Debug)]
pub struct SobjWeqReport {
    pub holds: bool,
    pub per_projective: Vec<(CoprodObject, WeqVerdict)>,
}

/// A morphism is a weak equivalence when every connected projective sees a
/// weak equivalence of hom simplicial sets.
pub fn is_weq(
    f: &SimpMorphism,
    projectives: &[CoprodObject],
    trunc: usize,
) -> Result<SobjWeqReport, WfsError> {
    let mut per = Vec::new();
    let mut holds = true;
    for p in projectives {
        let src = hom_right(p, &f.source)?;
        let dst = hom_right(p, &f.target)?;
        let map = hom_right_map(f, &src, &dst)?;
        let verdict = weq_oracle(&map, trunc);
        holds &= verdict.is_weq;
        per.push((p.clone(), verdict));
    }
    Ok(SobjWeqReport {
        holds,
        per_projective: per,
    })
}

/// Levelwise pullback of a cospan `f: X -> B <- Y :g` of simplicial
/// objects, with its projections.
pub fn pullback_simp(
    f: &SimpMorphism,
    g: &SimpMorphism,
) -> Result<(Arc<SimpObject>, SimpMorphism, SimpMorphism), WfsError> {
    if f.target != g.target {
        return Err(WfsError::Other("pullback needs a common target".into()));
    }
    let trunc = f.source.trunc.min(g.source.trunc).min(f.target.trunc);
    let mut levels = Vec::new();
    let mut legs1 = Vec::new();
    let mut legs2 = Vec::new();
    for n in 0..=trunc {
        let (p, q1, q2) = coprod_pullback(&f.levels[n], &g.levels[n])?;
        levels.push(p);
        legs1.push(q1);
        legs2.push(q2);
    }
    let mut faces = vec![Vec::new()];
    for n in 1..=trunc {
        faces.push(
            (0..=n)
                .map(|i| {
                    pullback_induce(
                        &levels[n - 1],
                        &legs1[n].then(&f.source.faces[n][i])?,
                        &legs2[n].then(&g.source.faces[n][i])?,
                    )
                })
                .collect::<Result<_, _>>()?,
        );
    }
    let mut degens = Vec::new();
    for n in 0..trunc {
        degens.push(
            (0..=n)
                .map(|i| {
                    pullback_induce(
                        &levels[n + 1],
                        &legs1[n].then(&f.source.degens[n][i])?,
                        &legs2[n].then(&g.source.degens[n][i])?,
                    )
                })
                .collect::<Result<_, _>>()?,
        );
    }
    let object = Arc::new(SimpObject::new(trunc, levels, faces, degens)?);
    let p1 = SimpMorphism::new(object.clone(), f.source.clone(), legs1)?;
    let p2 = SimpMorphism::new(object.clone(), g.source.clone(), legs2)?;
    Ok((object, p1, p2))
}

/// The unique morphism to the constant terminal object.
pub fn to_terminal(x: &Arc<SimpObject>) -> Result<SimpMorphism, WfsError> {
    let terminal = Arc::new(SimpObject::constant(&CoprodObject::terminal(), x.trunc));
    let levels = x
        .levels
        .iter()
        .map(terminal_morphism)
        .collect::<Result<_, _>>()?;
    SimpMorphism::new(x.clone(), terminal, levels)
}

/// Levelwise collapse of a morphism of simplicial objects to a simplicial
/// set morphism (each level becomes its total set of elements, made into a
/// discrete-fiber simplicial structure via the hom picture from the
/// terminal-projective): here realized as the simplicial set of components.
pub fn collapse_levelwise(f: &SimpMorphism) -> Result<SSetMap, WfsError> {
    let point = CoprodObject::terminal();
    // Hom(U 1, X_n) = total elements of X_n: collapse is the element-wise
    // picture of the levels
    let src = hom_right(&point, &f.source)?;
    let dst = hom_right(&point, &f.target)?;
    hom_right_map(f, &src, &dst)
}

// ---------------------------------------------------------------------------
// union-find and labels
// ---------------------------------------------------------------------------

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut k: usize) -> usize {
        while self.parent[k] != k {
            self.parent[k] = self.parent[self.parent[k]];
            k = self.parent[k];
        }
        k
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let keep = ra.min(rb);
            self.parent[ra.max(rb)] = keep;
        }
    }
}

fn class_labels<T: Clone + Ord>(
    uf: &mut UnionFind,
    nodes: &[T],
    label: impl Fn(&T) -> String,
) -> BTreeMap<T, String> {
    let mut best: BTreeMap<usize, String> = BTreeMap::new();
    for (k, n) in nodes.iter().enumerate() {
        let root = uf.find(k);
        let l = label(n);
        match best.get(&root) {
            Some(prev) if *prev <= l => {}
            _ => {
                best.insert(root, l);
            }
        }
    }
    nodes
        .iter()
        .enumerate()
        .map(|(k, n)| (n.clone(), best[&uf.find(k)].clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coprod::find_coprod_isomorphism;
    use crate::sset::lifting::is_kan_fibration_to;

    fn set(elems: &[&str]) -> Vec<String> {
        elems.iter().map(|s| s.to_string()).collect()
    }

    fn two_component() -> CoprodObject {
        CoprodObject::new(
            vec!["x".into(), "y".into()],
            BTreeMap::from([("x".into(), set(&["a"])), ("y".into(), set(&["b"]))]),
        )
        .unwrap()
    }

    #[test]
    fn constant_object_validates() {
        SimpObject::constant(&two_component(), 3).validate().unwrap();
    }

    #[test]
    fn tensor_with_point_is_constant() {
        let a = two_component();
        let t = tensor(&a, &FinSimplicialSet::delta(0), 2);
        t.validate().unwrap();
        for lvl in &t.levels {
            assert!(find_coprod_isomorphism(lvl, &a).is_some());
        }
    }

    #[test]
    fn tensor_with_interval_counts_copies() {
        let a = CoprodObject::embed(set(&["e"]));
        let t = tensor(&a, &FinSimplicialSet::delta(1), 3);
        t.validate().unwrap();
        // level n has n+2 copies (monotone maps [n] -> [1])
        for n in 0..=3 {
            assert_eq!(t.levels[n].index.len(), n + 2, "level {n}");
        }
    }

    #[test]
    fn hom_left_shapes() {
        let a = two_component();
        let x = SimpObject::constant(&a, 2);
        // over the point: level 0 itself
        let h0 = hom_left(&FinSimplicialSet::delta(0), &x).unwrap();
        assert!(find_coprod_isomorphism(&h0, &a).is_some());
        // over the interval with constant values: collapses to the object
        let h1 = hom_left(&FinSimplicialSet::delta(1), &x).unwrap();
        assert!(find_coprod_isomorphism(&h1, &a).is_some());
        // over two points: the square
        let hb = hom_left(&FinSimplicialSet::boundary(1), &x).unwrap();
        let (sq, _, _) = coprod_product(&a, &a);
        assert!(find_coprod_isomorphism(&hb, &sq).is_some());
    }

    #[test]
    fn hom_right_of_constant_is_discrete() {
        let a = CoprodObject::embed(set(&["e"]));
        let b = two_component();
        let x = SimpObject::constant(&b, 2);
        let h = hom_right(&a, &x).unwrap();
        // Hom(U e, b) has 2 elements; constant structure means two points
        assert_eq!(h.object.nd_counts(), vec![2]);
    }

    #[test]
    fn hom_right_tensor_matches_tensor_of_homs() {
        // Hom(U s, a ⊗ k) ≅ Hom(U s, a) ⊗ k for connected U s
        let s = CoprodObject::embed(set(&["e"]));
        let a = two_component();
        let k = FinSimplicialSet::boundary(1);
        let t = tensor(&a, &k, 2);
        let h = hom_right(&s, &t).unwrap();
        // Hom(U s, a) has 2 elements; ⊗ ∂Δ_1 gives 4 points
        assert_eq!(h.object.nd_counts(), vec![4]);
    }

    #[test]
    fn latching_basics() {
        let a = two_component();
        let x = SimpObject::constant(&a, 3);
        let (l0, _) = latching(&x, 0).unwrap();
        assert!(l0.object.index.is_empty());
        for n in 1..=3 {
            let (l, canonical) = latching(&x, n).unwrap();
            assert!(
                find_coprod_isomorphism(&l.object, &a).is_some(),
                "latching at {n} of a constant object is the object"
            );
            assert!(is_coprod_injection(&canonical));
        }
    }

    #[test]
    fn matching_basics() {
        let a = two_component();
        let x = SimpObject::constant(&a, 2);
        let (m0, _) = matching(&x, 0).unwrap();
        assert!(find_coprod_isomorphism(&m0.object, &CoprodObject::terminal()).is_some());
        // M_1 of a constant object is the diagonal-free product a × a
        let (m1, canonical) = matching(&x, 1).unwrap();
        let (sq, _, _) = coprod_product(&a, &a);
        assert!(find_coprod_isomorphism(&m1.object, &sq).is_some());
        // the canonical map is the diagonal
        assert_eq!(canonical.source, a);
    }

    #[test]
    fn cofibrancy_deciders_agree_on_stock_objects() {
        let a = two_component();
        let good = [
            SimpObject::constant(&a, 3),
            tensor(&a, &FinSimplicialSet::delta(1), 3),
            tensor(&a, &FinSimplicialSet::boundary(2), 3),
            SimpObject::initial(3),
        ];
        for x in &good {
            assert!(is_cofibrant_decomposition(x).holds());
            assert!(is_cofibrant_latching(x).holds());
        }
    }

    #[test]
    fn broken_degeneracy_refutes_cofibrancy() {
        // s_0 lands injectively but not onto its component: a split mono
        // that is not a coproduct injection
        let a0 = CoprodObject::embed(set(&["e"]));
        let a1 = CoprodObject::embed(set(&["e", "f"]));
        let s = CoprodMorphism::new(
            a0.clone(),
            a1.clone(),
            BTreeMap::from([("*".to_string(), "*".to_string())]),
            BTreeMap::from([(
                "*".to_string(),
                FinSetMap::new(set(&["e"]), set(&["e", "f"]), BTreeMap::from([("e".into(), "e".into())]))
                    .unwrap(),
            )]),
        )
        .unwrap();
        let d = CoprodMorphism::new(
            a1.clone(),
            a0.clone(),
            BTreeMap::from([("*".to_string(), "*".to_string())]),
            BTreeMap::from([(
                "*".to_string(),
                FinSetMap::new(
                    set(&["e", "f"]),
                    set(&["e"]),
                    BTreeMap::from([("e".into(), "e".into()), ("f".into(), "e".into())]),
                )
                .unwrap(),
            )]),
        )
        .unwrap();
        let x = SimpObject::new(
            1,
            vec![a0, a1],
            vec![Vec::new(), vec![d.clone(), d]],
            vec![vec![s]],
        )
        .unwrap();
        assert!(!is_cofibrant_decomposition(&x).holds());
        assert!(!is_cofibrant_latching(&x).holds());
    }

    #[test]
    fn reedy_factorization_of_fold() {
        // diagonal fold: (a ⊔ a) -> a as constant objects
        let a = CoprodObject::embed(set(&["e"]));
        let (double, _) = coprod_coproduct(&[&a, &a]);
        let x = Arc::new(SimpObject::constant(&double, 2));
        let y = Arc::new(SimpObject::constant(&a, 2));
        let fold_level = {
            let id = CoprodMorphism::identity(&a);
            crate::coprod::coprod_copair(&double, &[&a, &a], &[id.clone(), id]).unwrap()
        };
        let f = SimpMorphism::new(x, y, vec![fold_level.clone(); 3]).unwrap();
        let r = reedy_factorize(&f).unwrap();
        r.mid.validate().unwrap();
        r.left.validate().unwrap();
        r.right.validate().unwrap();
        for n in 0..=2 {
            assert!(is_coprod_injection(&r.left.levels[n]), "left leg at {n}");
            assert!(
                crate::coprod::is_split_epi_completion(&r.corners[n]).is_some(),
                "corner at {n}"
            );
        }
    }

    #[test]
    fn reedy_factorization_from_initial_is_cofibrant_replacement() {
        let a = two_component();
        let x = Arc::new(SimpObject::initial(2));
        let y = Arc::new(SimpObject::constant(&a, 2));
        let init_level = CoprodMorphism::new(
            CoprodObject::initial(),
            a.clone(),
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        let f = SimpMorphism::new(x, y, vec![init_level.clone(); 3]).unwrap();
        let r = reedy_factorize(&f).unwrap();
        assert!(is_cofibrant_latching(&r.mid).holds());
        assert!(is_cofibrant_decomposition(&r.mid).holds());
    }

    #[test]
    fn identity_is_fibration_and_weq() {
        let a = two_component();
        let x = Arc::new(SimpObject::constant(&a, 2));
        let id = SimpMorphism::identity(&x);
        let projectives = default_projectives(&[&x]);
        let mut budget = Budget::new(50_000_000);
        assert!(is_fibration(&id, &projectives, 2, &mut budget).unwrap().holds);
        assert!(is_weq(&id, &projectives, 2).unwrap().holds);
    }

    #[test]
    fn projection_with_section_is_fibration() {
        // constant (a ⊔ b) -> constant a fold of identity and a constant
        let a = CoprodObject::embed(set(&["e"]));
        let (double, injections) = coprod_coproduct(&[&a, &a]);
        let x = Arc::new(SimpObject::constant(&double, 2));
        let y = Arc::new(SimpObject::constant(&a, 2));
        let id = CoprodMorphism::identity(&a);
        let fold = crate::coprod::coprod_copair(&double, &[&a, &a], &[id.clone(), id]).unwrap();
        let f = SimpMorphism::new(x.clone(), y, vec![fold.clone(); 3]).unwrap();
        let projectives = default_projectives(&[&x]);
        let mut budget = Budget::new(50_000_000);
        assert!(is_fibration(&f, &projectives, 2, &mut budget).unwrap().holds);
        drop(injections);
    }

    #[test]
    fn presheaf_comparison_is_faithful() {
        // Hom(x, y) injects into maps of hom simplicial sets over the
        // connected projectives
        let a = two_component();
        let x = Arc::new(SimpObject::constant(&a, 1));
        let y = x.clone();
        let morphisms = enumerate_simp_morphisms(&x, &y);
        assert!(!morphisms.is_empty());
        let p = CoprodObject::embed(set(&["e"]));
        let hx = hom_right(&p, &x).unwrap();
        let hy = hom_right(&p, &y).unwrap();
        let images: BTreeSet<String> = morphisms
            .iter()
            .map(|m| {
                let s = hom_right_map(m, &hx, &hy).unwrap();
                format!("{:?}", s.assignment())
            })
            .collect();
        assert_eq!(images.len(), morphisms.len());
    }

    #[test]
    fn json_round_trip() {
        let a = two_component();
        let x = tensor(&a, &FinSimplicialSet::delta(1), 2);
        let back = SimpObject::from_json(&x.to_json()).unwrap();
        assert_eq!(back, x);
        let xs = Arc::new(x);
        let id = SimpMorphism::identity(&xs);
        let back = SimpMorphism::from_json(&id.to_json()).unwrap();
        assert_eq!(back.levels, id.levels);
    }

    #[test]
    fn hom_right_fibrancy_of_constant() {
        // constant objects give discrete hom spaces, which are Kan as maps
        // to the point only when nonempty per component; identity check
        let a = two_component();
        let x = Arc::new(SimpObject::constant(&a, 2));
        let id = SimpMorphism::identity(&x);
        let p = CoprodObject::embed(set(&["e"]));
        let hx = hom_right(&p, &x).unwrap();
        let map = hom_right_map(&id, &hx, &hx).unwrap();
        let mut budget = Budget::standard();
        assert!(is_kan_fibration_to(&map, 2, &mut budget).unwrap().holds);
    }
}

//! Simplicial mapping spaces, truncated and computed by exhaustive map
//! enumeration.
//!
//! `map(K, X)_n` is the set of simplicial maps `K × Δ_n -> X`; faces and
//! degeneracies precompose with `id × (coface/codegeneracy)`. The truncation
//! is exact per level: probing the space with complexes of dimension at most
//! the truncation sees the untruncated mapping space.

use super::ex::delta_map;
use super::explicit::ExplicitSSet;
use super::limits::Product;
use super::maps::{enumerate_maps, Budget, BudgetExceeded, MapConstraints, MapError};
use super::{Cell, FinSimplicialSet, SSetMap, SsetError};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapSpaceError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Sset(#[from] SsetError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("{0}")]
    Other(String),
}

/// A truncated mapping space `map(K, X)` with its element bookkeeping.
pub struct MappingSpace {
    pub object: Arc<FinSimplicialSet>,
    k: Arc<FinSimplicialSet>,
    x: Arc<FinSimplicialSet>,
    trunc: usize,
    /// `products[n]` is `K × Δ_n`.
    products: Vec<Product>,
    /// `elements[n]` lists the maps `K × Δ_n -> X` in enumeration order.
    elements: Vec<Vec<SSetMap>>,
    index: Vec<HashMap<String, usize>>,
    /// Canonical cell per (level, element index).
    cells: Vec<Vec<Cell>>,
}

fn element_key(m: &SSetMap) -> String {
    m.assignment()
        .iter()
        .map(|(id, c)| format!("{id}>{c}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Builds `map(k, x)` through simplicial level `trunc`.
pub fn mapping_space(
    k: &Arc<FinSimplicialSet>,
    x: &Arc<FinSimplicialSet>,
    trunc: usize,
    budget: &mut Budget,
) -> Result<MappingSpace, MapSpaceError> {
    let products: Vec<Product> = (0..=trunc)
        .map(|n| Product::new(k, &FinSimplicialSet::delta(n).shared()))
        .collect::<Result<_, _>>()?;
    let mut elements = Vec::new();
    let mut index = Vec::new();
    for prod in &products {
        let maps = enumerate_maps(&prod.object, x, &MapConstraints::default(), None, budget)?;
        let idx: HashMap<String, usize> = maps
            .iter()
            .enumerate()
            .map(|(i, m)| (element_key(m), i))
            .collect();
        elements.push(maps);
        index.push(idx);
    }
    // cross maps (id × α) for cofaces and codegeneracies, then the explicit
    // simplicial set of elements
    let labels = elements
        .iter()
        .map(|lvl| lvl.iter().map(element_key).collect())
        .collect();
    let cross = |values: &[usize], from: usize, to: usize| -> SSetMap {
        let alpha = delta_map(values, from, to);
        let alpha = SSetMap::new_unchecked(
            products[from].p2.target().clone(),
            products[to].p2.target().clone(),
            alpha.assignment().clone(),
        );
        products[to]
            .pair(&products[from].p1, &products[from].p2.then(&alpha).expect("deltas line up"))
            .expect("cross map is a cone")
    };
    let mut face = vec![Vec::new()];
    for n in 1..=trunc {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let values: Vec<usize> = (0..n).map(|v| if v < i { v } else { v + 1 }).collect();
            let c = cross(&values, n - 1, n);
            per_i.push(
                elements[n]
                    .iter()
                    .map(|h| index[n - 1][&element_key(&c.then(h).expect("composable"))])
                    .collect(),
            );
        }
        face.push(per_i);
    }
    let mut degen = Vec::new();
    for n in 0..trunc {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let values: Vec<usize> = (0..=n + 1).map(|v| if v <= i { v } else { v - 1 }).collect();
            let c = cross(&values, n + 1, n);
            per_i.push(
                elements[n]
                    .iter()
                    .map(|h| index[n + 1][&element_key(&c.then(h).expect("composable"))])
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
    let (object, cells) = explicit.to_ez()?;
    Ok(MappingSpace {
        object: object.shared(),
        k: k.clone(),
        x: x.clone(),
        trunc,
        products,
        elements,
        index,
        cells,
    })
}

impl MappingSpace {
    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn domain(&self) -> &Arc<FinSimplicialSet> {
        &self.k
    }

    pub fn codomain(&self) -> &Arc<FinSimplicialSet> {
        &self.x
    }

    /// The simplicial map of spaces induced by transforming elements
    /// levelwise; `transform` must commute with the structure maps.
    fn induced(
        &self,
        target: &MappingSpace,
        transform: impl Fn(usize, &SSetMap) -> SSetMap,
    ) -> Result<SSetMap, MapSpaceError> {
        let mut assign = BTreeMap::new();
        for (n, id) in self.object.generators() {
            let idx = self.cells[n]
                .iter()
                .position(|c| c.is_nondegenerate() && c.nd == *id)
                .expect("generator present at its level");
            let image = transform(n, &self.elements[n][idx]);
            let key = element_key(&image);
            let at = *target.index[n]
                .get(&key)
                .ok_or_else(|| MapSpaceError::Other("transform left the mapping space".into()))?;
            assign.insert(id.clone(), target.cells[n][at].clone());
        }
        Ok(SSetMap::new_unchecked(
            self.object.clone(),
            target.object.clone(),
            assign,
        ))
    }

    /// `map(K, X) -> map(K', X)` along `g: K' -> K`.
    pub fn precompose(&self, g: &SSetMap, target: &MappingSpace) -> Result<SSetMap, MapSpaceError> {
        if self.trunc != target.trunc {
            return Err(MapSpaceError::Other("truncation mismatch".into()));
        }
        self.induced(target, |n, h| {
            let g_here = SSetMap::new_unchecked(
                target.products[n].p1.target().clone(),
                self.products[n].p1.target().clone(),
                g.assignment().clone(),
            );
            let cross = self.products[n]
                .pair(
                    &target.products[n].p1.then(&g_here).expect("composable"),
                    &target.products[n].p2,
                )
                .expect("cone");
            cross.then(h).expect("composable")
        })
    }

    /// `map(K, X) -> map(K, Y)` along `h: X -> Y`.
    pub fn postcompose(&self, h: &SSetMap, target: &MappingSpace) -> Result<SSetMap, MapSpaceError> {
        if self.trunc != target.trunc {
            return Err(MapSpaceError::Other("truncation mismatch".into()));
        }
        self.induced(target, |n, e| {
            let e = SSetMap::new_unchecked(
                target.products[n].object.clone(),
                h.source().clone(),
                e.assignment().clone(),
            );
            e.then(h).expect("composable")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::maps::find_isomorphism;

    #[test]
    fn mapping_space_from_point_is_identity() {
        let pt = FinSimplicialSet::delta(0).shared();
        let d1 = FinSimplicialSet::delta(1).shared();
        let m = mapping_space(&pt, &d1, 2, &mut Budget::standard()).unwrap();
        assert!(find_isomorphism(&m.object, &d1).is_some());
    }

    #[test]
    fn interval_endomorphisms() {
        let d1 = FinSimplicialSet::delta(1).shared();
        let m = mapping_space(&d1, &d1, 2, &mut Budget::standard()).unwrap();
        // vertices are the three monotone maps [1] -> [1]
        assert_eq!(m.object.nd_ids(0).len(), 3);
    }

    #[test]
    fn mapping_space_to_point_is_point() {
        let b1 = FinSimplicialSet::boundary(1).shared();
        let pt = FinSimplicialSet::delta(0).shared();
        let m = mapping_space(&b1, &pt, 2, &mut Budget::standard()).unwrap();
        assert_eq!(m.object.nd_counts(), vec![1]);
    }

    #[test]
    fn functoriality_maps_validate() {
        let pt = FinSimplicialSet::delta(0).shared();
        let d1 = FinSimplicialSet::delta(1).shared();
        let d2 = FinSimplicialSet::delta(2).shared();
        let mut budget = Budget::new(10_000_000);
        let m_pt = mapping_space(&pt, &d2, 1, &mut budget).unwrap();
        let m_d1 = mapping_space(&d1, &d2, 1, &mut budget).unwrap();
        // restriction along a vertex of Δ_1
        let v0 = SSetMap::new(
            pt.clone(),
            d1.clone(),
            BTreeMap::from([("[0]".into(), Cell::nd("[0]"))]),
        )
        .unwrap();
        let restrict = m_d1.precompose(&v0, &m_pt).unwrap();
        restrict.validate().unwrap();
        // push forward along Δ_2 -> Δ_0
        let m_d1_pt = mapping_space(&d1, &pt, 1, &mut budget).unwrap();
        let collapse = SSetMap::terminal_map(d2, pt);
        let push = m_d1.postcompose(&collapse, &m_d1_pt).unwrap();
        push.validate().unwrap();
    }
}

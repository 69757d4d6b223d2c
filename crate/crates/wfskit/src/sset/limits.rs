//! Finite (co)limits of simplicial sets with their structure maps.
//!
//! Colimits are computed on the explicit expansion and normalized back to
//! canonical form; equalizers and pullbacks are carved out of products as
//! generator subsets.

use super::explicit::{ExplicitSSet, EzEmbedding, ProductData};
use super::maps::MapError;
use super::{cell, Cell, FinSimplicialSet, SSetMap, SsetError};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Which leg of a binary colimit a witness comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Disjoint union with injections. Generator ids are prefixed `"c{i}:"`.
pub fn coproduct(parts: &[Arc<FinSimplicialSet>]) -> (Arc<FinSimplicialSet>, Vec<SSetMap>) {
    let mut nd: Vec<Vec<String>> = Vec::new();
    let mut faces = BTreeMap::new();
    for (p, part) in parts.iter().enumerate() {
        let tagged = part
            .relabel(|id| format!("c{p}:{id}"))
            .expect("prefixing keeps ids unique");
        for (n, id) in tagged.generators() {
            if nd.len() <= n {
                nd.resize(n + 1, Vec::new());
            }
            nd[n].push(id.clone());
            if n > 0 {
                faces.insert(id.clone(), tagged.stored_faces(id).to_vec());
            }
        }
    }
    let object = FinSimplicialSet::new(nd, faces)
        .expect("coproduct of valid parts is valid")
        .shared();
    let injections = parts
        .iter()
        .enumerate()
        .map(|(p, part)| {
            let assign = part
                .generators()
                .map(|(_, id)| (id.clone(), Cell::nd(format!("c{p}:{id}"))))
                .collect();
            SSetMap::new_unchecked(part.clone(), object.clone(), assign)
        })
        .collect();
    (object, injections)
}

/// The induced map out of a coproduct built by [`coproduct`].
pub fn copair(
    object: &Arc<FinSimplicialSet>,
    parts: &[SSetMap],
) -> Result<SSetMap, MapError> {
    let target = parts
        .first()
        .map(|m| m.target().clone())
        .ok_or_else(|| MapError::Other("copair needs at least one map".into()))?;
    let mut assign = BTreeMap::new();
    for (_, id) in object.generators() {
        let (tag, rest) = id
            .split_once(':')
            .ok_or_else(|| MapError::Other(format!("not a coproduct generator: {id:?}")))?;
        let p: usize = tag
            .strip_prefix('c')
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| MapError::Other(format!("not a coproduct generator: {id:?}")))?;
        assign.insert(id.clone(), parts[p].eval(&Cell::nd(rest)));
    }
    SSetMap::new(object.clone(), target, assign)
}

/// A pushout square completed on the right: `left: X -> P`, `right: Y -> P`
/// for a span `f: A -> X`, `g: A -> Y`.
pub struct Pushout {
    pub object: Arc<FinSimplicialSet>,
    pub left: SSetMap,
    pub right: SSetMap,
    /// For each generator of the pushout, a witness cell upstairs.
    preimage: BTreeMap<String, (Side, Cell)>,
}

impl Pushout {
    /// Glues `f.target` and `g.target` along the common source.
    pub fn new(f: &SSetMap, g: &SSetMap) -> Result<Pushout, SsetError> {
        if f.source() != g.source() {
            return Err(SsetError::Other("pushout legs have different sources".into()));
        }
        let a = f.source();
        let x = f.target();
        let y = g.target();
        let top = x.dim_bound().max(y.dim_bound()).max(a.dim_bound());
        let xe = ExplicitSSet::from_ez(x, top);
        let ye = ExplicitSSet::from_ez(y, top);
        let (cop, offsets) =
            ExplicitSSet::coproduct(&[(&xe.explicit, "l"), (&ye.explicit, "r")], top);
        let mut relations = Vec::new();
        for n in 0..=a.dim_bound().min(top) {
            for c in a.cells(n) {
                let lx = offsets[0][n][xe.index_of(n, &f.eval(&c))];
                let ry = offsets[1][n][ye.index_of(n, &g.eval(&c))];
                relations.push((n, lx, ry));
            }
        }
        let (q, proj) = cop.quotient(&relations);
        let (object, qcells) = q.to_ez()?;
        let object = object.shared();
        let left = side_map(x, &xe, &offsets[0], &proj, &qcells, &object);
        let right = side_map(y, &ye, &offsets[1], &proj, &qcells, &object);
        // a witness for every generator of the quotient: the smallest upstairs
        // cell in its class
        let mut preimage = BTreeMap::new();
        for n in 0..=top {
            for (side, emb, offs) in [(Side::Left, &xe, &offsets[0]), (Side::Right, &ye, &offsets[1])] {
                for (idx, c) in emb.cells[n].iter().enumerate() {
                    let down = &qcells[n][proj[n][offs[n][idx]]];
                    if down.is_nondegenerate() && !preimage.contains_key(&down.nd) {
                        preimage.insert(down.nd.clone(), (side, c.clone()));
                    }
                }
            }
        }
        Ok(Pushout {
            object,
            left,
            right,
            preimage,
        })
    }

    /// The induced map out of the pushout for a cocone `u: X -> Z`,
    /// `v: Y -> Z` agreeing on `A`.
    pub fn induced(&self, u: &SSetMap, v: &SSetMap) -> Result<SSetMap, MapError> {
        if u.target() != v.target() {
            return Err(MapError::TargetMismatch);
        }
        let mut assign = BTreeMap::new();
        for (_, id) in self.object.generators() {
            let (side, c) = self
                .preimage
                .get(id)
                .ok_or_else(|| MapError::Missing(id.clone()))?;
            let img = match side {
                Side::Left => u.eval(c),
                Side::Right => v.eval(c),
            };
            assign.insert(id.clone(), img);
        }
        SSetMap::new(self.object.clone(), u.target().clone(), assign)
    }
}

fn side_map(
    x: &Arc<FinSimplicialSet>,
    emb: &EzEmbedding,
    offs: &[Vec<usize>],
    proj: &[Vec<usize>],
    qcells: &[Vec<Cell>],
    object: &Arc<FinSimplicialSet>,
) -> SSetMap {
    let assign = x
        .generators()
        .map(|(n, id)| {
            let idx = emb.index_of(n, &Cell::nd(id.clone()));
            (id.clone(), qcells[n][proj[n][offs[n][idx]]].clone())
        })
        .collect();
    SSetMap::new_unchecked(x.clone(), object.clone(), assign)
}

/// Coequalizer of a parallel pair `f, g: A -> B`, with the projection from `B`.
pub fn coequalizer(f: &SSetMap, g: &SSetMap) -> Result<(Arc<FinSimplicialSet>, SSetMap), SsetError> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(SsetError::Other("coequalizer needs a parallel pair".into()));
    }
    let a = f.source();
    let b = f.target();
    let top = b.dim_bound().max(a.dim_bound());
    let be = ExplicitSSet::from_ez(b, top);
    let mut relations = Vec::new();
    for n in 0..=a.dim_bound().min(top) {
        for c in a.cells(n) {
            relations.push((n, be.index_of(n, &f.eval(&c)), be.index_of(n, &g.eval(&c))));
        }
    }
    let (q, proj) = be.explicit.quotient(&relations);
    let (object, qcells) = q.to_ez()?;
    let object = object.shared();
    let assign = b
        .generators()
        .map(|(n, id)| {
            let idx = be.index_of(n, &Cell::nd(id.clone()));
            (id.clone(), qcells[n][proj[n][idx]].clone())
        })
        .collect();
    let project = SSetMap::new_unchecked(b.clone(), object.clone(), assign);
    Ok((object, project))
}

/// A binary product with projections and pairing.
pub struct Product {
    pub object: Arc<FinSimplicialSet>,
    pub p1: SSetMap,
    pub p2: SSetMap,
    x: EzEmbedding,
    y: EzEmbedding,
    data: ProductData,
    /// Canonical cell of `object` for each explicit product index.
    cells: Vec<Vec<Cell>>,
}

impl Product {
    pub fn new(x: &Arc<FinSimplicialSet>, y: &Arc<FinSimplicialSet>) -> Result<Product, SsetError> {
        let top = x.dim_bound() + y.dim_bound();
        let xe = ExplicitSSet::from_ez(x, top);
        let ye = ExplicitSSet::from_ez(y, top);
        let data = xe.explicit.product(&ye.explicit, top);
        let (object, cells) = data.object.to_ez()?;
        let object = object.shared();
        let mut a1 = BTreeMap::new();
        let mut a2 = BTreeMap::new();
        for (n, id) in object.generators() {
            // every generator of the product corresponds to a unique explicit
            // index at its own level
            let idx = cells[n]
                .iter()
                .position(|c| c.is_nondegenerate() && c.nd == *id)
                .expect("generator present at its level");
            let (ai, bi) = data.pairs[n][idx];
            a1.insert(id.clone(), xe.cells[n][ai].clone());
            a2.insert(id.clone(), ye.cells[n][bi].clone());
        }
        let p1 = SSetMap::new_unchecked(object.clone(), x.clone(), a1);
        let p2 = SSetMap::new_unchecked(object.clone(), y.clone(), a2);
        Ok(Product {
            object,
            p1,
            p2,
            x: xe,
            y: ye,
            data,
            cells,
        })
    }

    /// The cell of the product corresponding to a pair of cells of the same
    /// dimension. Handles dimensions above the stored range by peeling the
    /// common degeneracies first.
    pub fn cell_of_pair(&self, a: &Cell, b: &Cell) -> Cell {
        let (word, a0, b0) = peel_common(self.p1.target(), self.p2.target(), a, b);
        let n = self.p1.target().dim_of_cell(&a0);
        let idx = self
            .data
            .pair_index(n, self.x.index_of(n, &a0), self.y.index_of(n, &b0));
        let base = &self.cells[n][idx];
        Cell {
            word: cell::word_compose(&word, &base.word),
            nd: base.nd.clone(),
        }
    }

    /// The pairing `<u, v>: Z -> X x Y` of maps with a common source.
    pub fn pair(&self, u: &SSetMap, v: &SSetMap) -> Result<SSetMap, MapError> {
        if u.source() != v.source() {
            return Err(MapError::SourceMismatch);
        }
        if u.target() != self.p1.target() || v.target() != self.p2.target() {
            return Err(MapError::TargetMismatch);
        }
        let assign = u
            .source()
            .generators()
            .map(|(_, id)| {
                let c = Cell::nd(id.clone());
                (id.clone(), self.cell_of_pair(&u.eval(&c), &v.eval(&c)))
            })
            .collect();
        Ok(SSetMap::new_unchecked(
            u.source().clone(),
            self.object.clone(),
            assign,
        ))
    }
}

/// Strips degeneracies shared by both coordinates, smallest index first, and
/// returns the stripped word with the remaining jointly-nondegenerate pair.
fn peel_common(
    x: &FinSimplicialSet,
    y: &FinSimplicialSet,
    a: &Cell,
    b: &Cell,
) -> (Vec<usize>, Cell, Cell) {
    let common: Vec<usize> = a
        .word
        .iter()
        .filter(|i| b.word.contains(i))
        .copied()
        .collect();
    match common.iter().min() {
        None => (Vec::new(), a.clone(), b.clone()),
        Some(&i) => {
            let (word, a0, b0) = peel_common(x, y, &x.face(a, i), &y.face(b, i));
            (cell::word_insert_degeneracy(&word, i), a0, b0)
        }
    }
}

/// Equalizer of a parallel pair, as the sub-simplicial set of generators on
/// which the maps agree, with its inclusion.
pub fn equalizer(f: &SSetMap, g: &SSetMap) -> Result<(Arc<FinSimplicialSet>, SSetMap), MapError> {
    if f.source() != g.source() {
        return Err(MapError::SourceMismatch);
    }
    if f.target() != g.target() {
        return Err(MapError::TargetMismatch);
    }
    let x = f.source();
    let mut nd: Vec<Vec<String>> = vec![Vec::new(); x.dim_bound() + 1];
    let mut faces = BTreeMap::new();
    for (n, id) in x.generators() {
        let c = Cell::nd(id.clone());
        if f.eval(&c) == g.eval(&c) {
            nd[n].push(id.clone());
            if n > 0 {
                faces.insert(id.clone(), x.stored_faces(id).to_vec());
            }
        }
    }
    let object = FinSimplicialSet::new(nd, faces)?.shared();
    let include = SSetMap::inclusion(object.clone(), x.clone())?;
    Ok((object, include))
}

/// A pullback square completed on the left, with projections and pairing.
pub struct Pullback {
    pub object: Arc<FinSimplicialSet>,
    pub p1: SSetMap,
    pub p2: SSetMap,
    product: Product,
    include: SSetMap,
}

impl Pullback {
    /// Pulls back a cospan `f: X -> Z <- Y :g`.
    pub fn new(f: &SSetMap, g: &SSetMap) -> Result<Pullback, MapError> {
        if f.target() != g.target() {
            return Err(MapError::TargetMismatch);
        }
        let product = Product::new(f.source(), g.source())?;
        let (object, include) = equalizer(&product.p1.then(f)?, &product.p2.then(g)?)?;
        let p1 = include.then(&product.p1)?;
        let p2 = include.then(&product.p2)?;
        Ok(Pullback {
            object,
            p1,
            p2,
            product,
            include,
        })
    }

    /// The induced map into the pullback for a cone `u, v` with
    /// `f . u = g . v`.
    pub fn induced(&self, u: &SSetMap, v: &SSetMap) -> Result<SSetMap, MapError> {
        let into_product = self.product.pair(u, v)?;
        // the pairing lands in the equalizer; re-target it
        let mut assign = BTreeMap::new();
        for (id, c) in into_product.assignment() {
            if !self.object.contains_cell(c) {
                return Err(MapError::Other(format!(
                    "cone does not commute: image of {id:?} misses the pullback"
                )));
            }
            assign.insert(id.clone(), c.clone());
        }
        Ok(SSetMap::new_unchecked(
            u.source().clone(),
            self.object.clone(),
            assign,
        ))
    }

    pub fn inclusion_into_product(&self) -> &SSetMap {
        &self.include
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::homology::pi0;

    #[test]
    fn coproduct_and_copair() {
        let pt = FinSimplicialSet::delta(0).shared();
        let d1 = FinSimplicialSet::delta(1).shared();
        let (c, injs) = coproduct(&[pt.clone(), d1.clone()]);
        assert_eq!(c.nd_counts(), vec![3, 1]);
        let t1 = SSetMap::terminal_map(pt.clone(), pt.clone());
        let t2 = SSetMap::terminal_map(d1, pt.clone());
        let fold = copair(&c, &[t1, t2]).unwrap();
        assert!(fold.validate().is_ok());
        assert_eq!(injs.len(), 2);
    }

    #[test]
    fn pushout_of_two_triangles_along_edge() {
        // glue two 2-simplices along an edge: square-ish complex with
        // 4 vertices, 5 edges, 2 triangles
        let d1 = FinSimplicialSet::delta(1).shared();
        let d2 = FinSimplicialSet::delta(2).shared();
        let edge01 = SSetMap::new(
            d1.clone(),
            d2.clone(),
            BTreeMap::from([
                ("[0]".into(), Cell::nd("[0]")),
                ("[1]".into(), Cell::nd("[1]")),
                ("[0,1]".into(), Cell::nd("[0,1]")),
            ]),
        )
        .unwrap();
        let p = Pushout::new(&edge01, &edge01).unwrap();
        assert_eq!(p.object.nd_counts(), vec![4, 5, 2]);
        let back = p.induced(&SSetMap::identity(d2.clone()), &SSetMap::identity(d2)).unwrap();
        assert!(back.validate().is_ok());
    }

    #[test]
    fn coequalizer_makes_circle() {
        // both endpoints of the interval to a point
        let pt = FinSimplicialSet::delta(0).shared();
        let d1 = FinSimplicialSet::delta(1).shared();
        let e0 = SSetMap::new(
            pt.clone(),
            d1.clone(),
            BTreeMap::from([("[0]".into(), Cell::nd("[0]"))]),
        )
        .unwrap();
        let e1 = SSetMap::new(
            pt,
            d1,
            BTreeMap::from([("[0]".into(), Cell::nd("[1]"))]),
        )
        .unwrap();
        let (q, project) = coequalizer(&e0, &e1).unwrap();
        assert_eq!(q.nd_counts(), vec![1, 1]);
        assert!(project.validate().is_ok());
    }

    #[test]
    fn product_square_with_projections() {
        let d1 = FinSimplicialSet::delta(1).shared();
        let p = Product::new(&d1, &d1).unwrap();
        assert_eq!(p.object.nd_counts(), vec![4, 5, 2]);
        assert!(p.p1.validate().is_ok());
        assert!(p.p2.validate().is_ok());
        let diag = p.pair(&SSetMap::identity(d1.clone()), &SSetMap::identity(d1)).unwrap();
        assert!(diag.validate().is_ok());
        assert!(diag.is_mono());
    }

    #[test]
    fn pullback_of_disjoint_points_is_empty() {
        let d1 = FinSimplicialSet::delta(1).shared();
        let pt = FinSimplicialSet::delta(0).shared();
        let e0 = SSetMap::new(
            pt.clone(),
            d1.clone(),
            BTreeMap::from([("[0]".into(), Cell::nd("[0]"))]),
        )
        .unwrap();
        let e1 = SSetMap::new(
            pt.clone(),
            d1.clone(),
            BTreeMap::from([("[0]".into(), Cell::nd("[1]"))]),
        )
        .unwrap();
        let pb = Pullback::new(&e0, &e1).unwrap();
        assert!(pb.object.is_empty());
        let pb2 = Pullback::new(&e0, &e0).unwrap();
        assert_eq!(pi0(&pb2.object).len(), 1);
    }
}

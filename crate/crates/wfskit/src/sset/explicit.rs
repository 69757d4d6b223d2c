//! Simplicial sets with all simplices materialized per level.
//!
//! The explicit representation is the staging area for constructions that are
//! awkward on nondegenerate generators directly: quotients, products, nerves,
//! mapping spaces. [`ExplicitSSet::to_ez`] recovers the canonical
//! Eilenberg-Zilber presentation afterwards.

use super::cell;
use super::{Cell, FinSimplicialSet, SsetError};
use std::collections::{BTreeMap, HashMap};

/// A truncated simplicial set with every simplex listed per level.
#[derive(Debug, Clone)]
pub struct ExplicitSSet {
    /// Unique labels per level; determine canonical ordering and naming.
    pub labels: Vec<Vec<String>>,
    /// `face[n][i]` maps level-`n` indices to level-`n-1` indices (`n >= 1`).
    pub face: Vec<Vec<Vec<usize>>>,
    /// `degen[n][i]` maps level-`n` indices to level-`n+1` indices
    /// (defined for `n < top`).
    pub degen: Vec<Vec<Vec<usize>>>,
}

/// A [`FinSimplicialSet`] together with its explicit expansion up to a level.
pub struct EzEmbedding {
    pub explicit: ExplicitSSet,
    /// `cells[n][idx]` is the cell corresponding to each explicit index.
    pub cells: Vec<Vec<Cell>>,
    index: Vec<HashMap<Cell, usize>>,
}

impl EzEmbedding {
    pub fn index_of(&self, level: usize, c: &Cell) -> usize {
        self.index[level][c]
    }

    pub fn top(&self) -> usize {
        self.cells.len() - 1
    }
}

impl ExplicitSSet {
    pub fn top(&self) -> usize {
        self.labels.len().saturating_sub(1)
    }

    pub fn level_size(&self, n: usize) -> usize {
        self.labels.get(n).map(|l| l.len()).unwrap_or(0)
    }

    /// Expands a canonical simplicial set into all cells up to `top`.
    pub fn from_ez(x: &FinSimplicialSet, top: usize) -> EzEmbedding {
        let mut labels = Vec::new();
        let mut cells = Vec::new();
        let mut index: Vec<HashMap<Cell, usize>> = Vec::new();
        for n in 0..=top {
            let cs = x.cells(n);
            let mut idx = HashMap::new();
            let mut labs = Vec::new();
            for (i, c) in cs.iter().enumerate() {
                idx.insert(c.clone(), i);
                labs.push(c.to_string());
            }
            labels.push(labs);
            index.push(idx);
            cells.push(cs);
        }
        let mut face = vec![Vec::new()];
        for n in 1..=top {
            let mut per_i = Vec::new();
            for i in 0..=n {
                per_i.push(
                    cells[n]
                        .iter()
                        .map(|c| index[n - 1][&x.face(c, i)])
                        .collect(),
                );
            }
            face.push(per_i);
        }
        let mut degen = Vec::new();
        for n in 0..top {
            let mut per_i = Vec::new();
            for i in 0..=n {
                per_i.push(
                    cells[n]
                        .iter()
                        .map(|c| index[n + 1][&x.degeneracy(c, i)])
                        .collect(),
                );
            }
            degen.push(per_i);
        }
        EzEmbedding {
            explicit: ExplicitSSet {
                labels,
                face,
                degen,
            },
            cells,
            index,
        }
    }

    /// Recovers the canonical presentation. Also returns, per level, the cell
    /// of the canonical output corresponding to each explicit index.
    pub fn to_ez(&self) -> Result<(FinSimplicialSet, Vec<Vec<Cell>>), SsetError> {
        let top = self.top();
        if self.labels.is_empty() || self.labels.iter().all(|l| l.is_empty()) {
            return Ok((FinSimplicialSet::empty(), vec![Vec::new(); top + 1]));
        }
        // nondegenerate detection, bottom-up
        let mut nondeg: Vec<Vec<bool>> = Vec::new();
        nondeg.push(vec![true; self.level_size(0)]);
        for n in 1..=top {
            let mut flags = vec![true; self.level_size(n)];
            for idx in 0..self.level_size(n) {
                for i in 0..n {
                    let f = self.face[n][i][idx];
                    if self.degen[n - 1][i][f] == idx {
                        flags[idx] = false;
                        break;
                    }
                }
            }
            nondeg.push(flags);
        }
        // canonical nondegenerate names, unique across dimensions
        let mut used: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        let mut names: Vec<Vec<Option<String>>> = Vec::new();
        for n in 0..=top {
            let mut level_names = vec![None; self.level_size(n)];
            for idx in 0..self.level_size(n) {
                if !nondeg[n][idx] {
                    continue;
                }
                let mut name = self.labels[n][idx].clone();
                if used.contains_key(&name) {
                    name = format!("{name}@{n}");
                }
                used.insert(name.clone(), (n, idx));
                level_names[idx] = Some(name);
            }
            names.push(level_names);
        }
        // EZ decomposition of every explicit index
        let mut cells: Vec<Vec<Cell>> = Vec::new();
        for n in 0..=top {
            let mut level = Vec::with_capacity(self.level_size(n));
            for idx in 0..self.level_size(n) {
                level.push(self.decompose(n, idx, &nondeg, &names, &cells));
            }
            cells.push(level);
        }
        // assemble generators and faces
        let mut nd: Vec<Vec<String>> = vec![Vec::new(); top + 1];
        let mut faces: BTreeMap<String, Vec<Cell>> = BTreeMap::new();
        for n in 0..=top {
            for idx in 0..self.level_size(n) {
                if let Some(name) = &names[n][idx] {
                    nd[n].push(name.clone());
                    if n > 0 {
                        let fs = (0..=n)
                            .map(|i| cells[n - 1][self.face[n][i][idx]].clone())
                            .collect();
                        faces.insert(name.clone(), fs);
                    }
                }
            }
        }
        let out = FinSimplicialSet::new(nd, faces)?;
        Ok((out, cells))
    }

    fn decompose(
        &self,
        n: usize,
        idx: usize,
        nondeg: &[Vec<bool>],
        names: &[Vec<Option<String>>],
        lower: &[Vec<Cell>],
    ) -> Cell {
        if nondeg[n][idx] {
            return Cell::nd(names[n][idx].clone().expect("nondegenerate cells are named"));
        }
        for i in 0..n {
            let f = self.face[n][i][idx];
            if self.degen[n - 1][i][f] == idx {
                let base = &lower[n - 1][f];
                return Cell {
                    word: cell::word_insert_degeneracy(&base.word, i),
                    nd: base.nd.clone(),
                };
            }
        }
        unreachable!("degenerate cell admits a section")
    }

    /// Quotient by the equivalence generated by `relations` (level, a, b),
    /// saturated so that face and degeneracy maps descend. Returns the
    /// quotient and the per-level projection of indices.
    pub fn quotient(&self, relations: &[(usize, usize, usize)]) -> (ExplicitSSet, Vec<Vec<usize>>) {
        let top = self.top();
        let mut uf: Vec<UnionFind> = (0..=top).map(|n| UnionFind::new(self.level_size(n))).collect();
        for &(n, a, b) in relations {
            uf[n].union(a, b);
        }
        // saturate: every structure map must be constant on classes
        loop {
            let mut changed = false;
            for n in 1..=top {
                for i in 0..=n {
                    changed |= saturate_op(&mut uf, n, n - 1, &self.face[n][i]);
                }
            }
            for n in 0..top {
                for i in 0..=n {
                    changed |= saturate_op(&mut uf, n, n + 1, &self.degen[n][i]);
                }
            }
            if !changed {
                break;
            }
        }
        // canonical class ordering by minimal label
        let mut proj: Vec<Vec<usize>> = Vec::new();
        let mut labels: Vec<Vec<String>> = Vec::new();
        let mut reps: Vec<Vec<usize>> = Vec::new();
        for n in 0..=top {
            let size = self.level_size(n);
            let mut class_label: BTreeMap<usize, String> = BTreeMap::new();
            for idx in 0..size {
                let r = uf[n].find(idx);
                let lab = &self.labels[n][idx];
                class_label
                    .entry(r)
                    .and_modify(|cur| {
                        if lab < cur {
                            *cur = lab.clone();
                        }
                    })
                    .or_insert_with(|| lab.clone());
            }
            let mut ordered: Vec<(String, usize)> = class_label
                .into_iter()
                .map(|(r, lab)| (lab, r))
                .collect();
            ordered.sort();
            let rep_to_new: HashMap<usize, usize> = ordered
                .iter()
                .enumerate()
                .map(|(new, (_, r))| (*r, new))
                .collect();
            proj.push((0..size).map(|idx| rep_to_new[&uf[n].find(idx)]).collect());
            labels.push(ordered.iter().map(|(lab, _)| lab.clone()).collect());
            let mut rep_of_new = vec![0; ordered.len()];
            for idx in 0..size {
                rep_of_new[rep_to_new[&uf[n].find(idx)]] = idx;
            }
            reps.push(rep_of_new);
        }
        let mut face = vec![Vec::new()];
        for n in 1..=top {
            let per_i = (0..=n)
                .map(|i| {
                    reps[n]
                        .iter()
                        .map(|&rep| proj[n - 1][self.face[n][i][rep]])
                        .collect()
                })
                .collect();
            face.push(per_i);
        }
        let mut degen = Vec::new();
        for n in 0..top {
            let per_i = (0..=n)
                .map(|i| {
                    reps[n]
                        .iter()
                        .map(|&rep| proj[n + 1][self.degen[n][i][rep]])
                        .collect()
                })
                .collect();
            degen.push(per_i);
        }
        (
            ExplicitSSet {
                labels,
                face,
                degen,
            },
            proj,
        )
    }

    /// Levelwise product, truncated at `top`.
    pub fn product(&self, other: &ExplicitSSet, top: usize) -> ProductData {
        let mut labels = Vec::new();
        let mut pairs: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut index: Vec<HashMap<(usize, usize), usize>> = Vec::new();
        for n in 0..=top {
            let mut level = Vec::new();
            let mut labs = Vec::new();
            let mut idx = HashMap::new();
            for a in 0..self.level_size(n) {
                for b in 0..other.level_size(n) {
                    idx.insert((a, b), level.len());
                    labs.push(format!("({}|{})", self.labels[n][a], other.labels[n][b]));
                    level.push((a, b));
                }
            }
            pairs.push(level);
            labels.push(labs);
            index.push(idx);
        }
        let mut face = vec![Vec::new()];
        for n in 1..=top {
            let per_i = (0..=n)
                .map(|i| {
                    pairs[n]
                        .iter()
                        .map(|&(a, b)| {
                            index[n - 1][&(self.face[n][i][a], other.face[n][i][b])]
                        })
                        .collect()
                })
                .collect();
            face.push(per_i);
        }
        let mut degen = Vec::new();
        for n in 0..top {
            let per_i = (0..=n)
                .map(|i| {
                    pairs[n]
                        .iter()
                        .map(|&(a, b)| {
                            index[n + 1][&(self.degen[n][i][a], other.degen[n][i][b])]
                        })
                        .collect()
                })
                .collect();
            degen.push(per_i);
        }
        ProductData {
            object: ExplicitSSet {
                labels,
                face,
                degen,
            },
            pairs,
            index,
        }
    }

    /// Disjoint union; labels are prefixed with the given tags.
    pub fn coproduct(parts: &[(&ExplicitSSet, &str)], top: usize) -> (ExplicitSSet, Vec<Vec<Vec<usize>>>) {
        let mut labels: Vec<Vec<String>> = vec![Vec::new(); top + 1];
        let mut offsets: Vec<Vec<Vec<usize>>> = Vec::new();
        for (part, tag) in parts {
            let mut part_maps = Vec::new();
            for n in 0..=top {
                let base = labels[n].len();
                let size = part.level_size(n);
                part_maps.push((0..size).map(|i| base + i).collect::<Vec<_>>());
                for i in 0..size {
                    labels[n].push(format!("{tag}:{}", part.labels[n][i]));
                }
            }
            offsets.push(part_maps);
        }
        let mut face = vec![Vec::new()];
        for n in 1..=top {
            let per_i = (0..=n)
                .map(|i| {
                    let mut col = Vec::new();
                    for (p, (part, _)) in parts.iter().enumerate() {
                        for idx in 0..part.level_size(n) {
                            col.push(offsets[p][n - 1][part.face[n][i][idx]]);
                        }
                    }
                    col
                })
                .collect();
            face.push(per_i);
        }
        let mut degen = Vec::new();
        for n in 0..top {
            let per_i = (0..=n)
                .map(|i| {
                    let mut col = Vec::new();
                    for (p, (part, _)) in parts.iter().enumerate() {
                        for idx in 0..part.level_size(n) {
                            col.push(offsets[p][n + 1][part.degen[n][i][idx]]);
                        }
                    }
                    col
                })
                .collect();
            degen.push(per_i);
        }
        (
            ExplicitSSet {
                labels,
                face,
                degen,
            },
            offsets,
        )
    }

    /// Restricts to the levelwise subset `keep`; the subset must be closed
    /// under faces and degeneracies.
    pub fn subobject(&self, keep: &[Vec<bool>]) -> (ExplicitSSet, Vec<Vec<Option<usize>>>) {
        let top = self.top();
        let mut embed: Vec<Vec<Option<usize>>> = Vec::new();
        let mut labels = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        for n in 0..=top {
            let mut level_embed = vec![None; self.level_size(n)];
            let mut labs = Vec::new();
            let mut mem = Vec::new();
            for idx in 0..self.level_size(n) {
                if keep[n][idx] {
                    level_embed[idx] = Some(mem.len());
                    labs.push(self.labels[n][idx].clone());
                    mem.push(idx);
                }
            }
            embed.push(level_embed);
            labels.push(labs);
            members.push(mem);
        }
        let mut face = vec![Vec::new()];
        for n in 1..=top {
            let per_i = (0..=n)
                .map(|i| {
                    members[n]
                        .iter()
                        .map(|&idx| {
                            embed[n - 1][self.face[n][i][idx]]
                                .expect("subset not closed under faces")
                        })
                        .collect()
                })
                .collect();
            face.push(per_i);
        }
        let mut degen = Vec::new();
        for n in 0..top {
            let per_i = (0..=n)
                .map(|i| {
                    members[n]
                        .iter()
                        .map(|&idx| {
                            embed[n + 1][self.degen[n][i][idx]]
                                .expect("subset not closed under degeneracies")
                        })
                        .collect()
                })
                .collect();
            degen.push(per_i);
        }
        (
            ExplicitSSet {
                labels,
                face,
                degen,
            },
            embed,
        )
    }
}

/// Result of [`ExplicitSSet::product`], keeping the pair bookkeeping.
pub struct ProductData {
    pub object: ExplicitSSet,
    /// `pairs[n][idx] = (index in left factor, index in right factor)`.
    pub pairs: Vec<Vec<(usize, usize)>>,
    index: Vec<HashMap<(usize, usize), usize>>,
}

impl ProductData {
    pub fn pair_index(&self, level: usize, a: usize, b: usize) -> usize {
        self.index[level][&(a, b)]
    }
}

fn saturate_op(uf: &mut [UnionFind], from: usize, to: usize, op: &[usize]) -> bool {
    let mut by_class: HashMap<usize, usize> = HashMap::new();
    let mut changed = false;
    for (idx, &img) in op.iter().enumerate() {
        let (class, img_class) = {
            let c = uf[from].find(idx);
            let ic = uf[to].find(img);
            (c, ic)
        };
        match by_class.get(&class) {
            None => {
                by_class.insert(class, img_class);
            }
            Some(&prev) => {
                if prev != img_class {
                    uf[to].union(prev, img_class);
                    changed = true;
                }
            }
        }
    }
    changed
}

#[derive(Debug)]
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
            r
        } else {
            x
        }
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root for determinism
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_through_explicit() {
        for x in [
            FinSimplicialSet::delta(2),
            FinSimplicialSet::boundary(2),
            FinSimplicialSet::circle(),
        ] {
            let emb = ExplicitSSet::from_ez(&x, x.dim_bound() + 1);
            let (back, _) = emb.explicit.to_ez().unwrap();
            assert_eq!(back.nd_counts(), x.nd_counts());
        }
    }

    #[test]
    fn quotient_collapses_circle_vertices() {
        // Δ_1 with both endpoints identified is the circle
        let d1 = FinSimplicialSet::delta(1);
        let emb = ExplicitSSet::from_ez(&d1, 2);
        let v0 = emb.index_of(0, &Cell::nd("[0]"));
        let v1 = emb.index_of(0, &Cell::nd("[1]"));
        let (q, _) = emb.explicit.quotient(&[(0, v0, v1)]);
        let (s1, _) = q.to_ez().unwrap();
        assert_eq!(s1.nd_counts(), vec![1, 1]);
    }

    #[test]
    fn product_of_intervals_has_two_triangles() {
        let d1 = FinSimplicialSet::delta(1);
        let a = ExplicitSSet::from_ez(&d1, 3);
        let b = ExplicitSSet::from_ez(&d1, 3);
        let prod = a.explicit.product(&b.explicit, 3);
        let (sq, _) = prod.object.to_ez().unwrap();
        assert_eq!(sq.nd_counts(), vec![4, 5, 2]);
    }
}

//! Homotopy colimits and limits of diagrams of simplicial sets or
//! simplicial objects over finite shapes, and homotopy Kan extensions.
//!
//! Homotopy colimits use the chain diagonal: level `n` is a coproduct over
//! composable `n`-chains of the shape. Homotopy limits use the end of
//! cotensors by nerves of over-categories; the shape must be homotopically
//! finite.

use crate::coprod::{
    coprod_copair, coprod_coproduct, CoprodMorphism, CoprodObject,
};
use crate::fincat::{
    chains, is_homotopically_finite, over_category, CatError, CommaCategory, FinCategory,
    FinFunctor, FinitenessCertificate,
};
use crate::sobj::{
    equalize_all, factor_through_subobject, is_cofibrant_decomposition, HomLeft, MultiProduct,
    SimpMorphism, SimpObject,
};
use crate::sset::ex::delta_map;
use crate::sset::explicit::ExplicitSSet;
use crate::sset::limits::{equalizer, Product};
use crate::sset::mapspace::{mapping_space, MappingSpace};
use crate::sset::maps::Budget;
use crate::sset::{Cell, FinSimplicialSet, SSetMap};
use crate::wfs::WfsError;
use serde_json::{json, Map as JsonMap, Value};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

fn cat_err(e: CatError) -> WfsError {
    WfsError::Other(e.to_string())
}

// ---------------------------------------------------------------------------
// chains and nerves with bookkeeping
// ---------------------------------------------------------------------------

fn chain_key(start: &str, chain: &[String]) -> String {
    let mut parts = vec![start.to_string()];
    parts.extend(chain.iter().cloned());
    parts.join("|")
}

/// `i`-th face of a composable chain: drop at the ends, compose inside.
fn chain_face(c: &FinCategory, start: &str, chain: &[String], i: usize) -> (String, Vec<String>) {
    let n = chain.len();
    if i == 0 {
        let new_start = c.endpoints(&chain[0]).expect("chain morphism").1.clone();
        (new_start, chain[1..].to_vec())
    } else if i == n {
        (start.to_string(), chain[..n - 1].to_vec())
    } else {
        let mut out = chain[..i - 1].to_vec();
        out.push(
            c.compose(&chain[i], &chain[i - 1])
                .expect("adjacent chain morphisms compose")
                .clone(),
        );
        out.extend_from_slice(&chain[i + 1..]);
        (start.to_string(), out)
    }
}

/// `i`-th degeneracy of a chain: insert an identity.
fn chain_degen(c: &FinCategory, start: &str, chain: &[String], i: usize) -> (String, Vec<String>) {
    let at = if i == 0 {
        start.to_string()
    } else {
        c.endpoints(&chain[i - 1]).expect("chain morphism").1.clone()
    };
    let mut longer = chain.to_vec();
    longer.insert(i, c.identity_of(&at).expect("validated category").clone());
    (start.to_string(), longer)
}

fn functor_chain(f: &FinFunctor, start: &str, chain: &[String]) -> (String, Vec<String>) {
    (
        f.apply_obj(start).clone(),
        chain.iter().map(|m| f.apply_mor(m).clone()).collect(),
    )
}

/// A truncated nerve with lookup from chains to canonical cells.
pub struct NerveData {
    pub object: Arc<FinSimplicialSet>,
    chains: Vec<Vec<(String, Vec<String>)>>,
    pos: Vec<BTreeMap<String, usize>>,
    cells: Vec<Vec<Cell>>,
}

pub fn nerve_data(c: &FinCategory, dim: usize) -> Result<NerveData, WfsError> {
    let mut levels = Vec::new();
    let mut pos: Vec<BTreeMap<String, usize>> = Vec::new();
    for n in 0..=dim {
        let lvl = chains(c, n);
        pos.push(
            lvl.iter()
                .enumerate()
                .map(|(k, (s, ch))| (chain_key(s, ch), k))
                .collect(),
        );
        levels.push(lvl);
    }
    let labels = levels
        .iter()
        .map(|lvl| lvl.iter().map(|(s, ch)| chain_key(s, ch)).collect())
        .collect();
    let mut face = vec![Vec::new()];
    for n in 1..=dim {
        face.push(
            (0..=n)
                .map(|i| {
                    levels[n]
                        .iter()
                        .map(|(s, ch)| {
                            let (s2, ch2) = chain_face(c, s, ch, i);
                            pos[n - 1][&chain_key(&s2, &ch2)]
                        })
                        .collect()
                })
                .collect(),
        );
    }
    let mut degen = Vec::new();
    for n in 0..dim {
        degen.push(
            (0..=n)
                .map(|i| {
                    levels[n]
                        .iter()
                        .map(|(s, ch)| {
                            let (s2, ch2) = chain_degen(c, s, ch, i);
                            pos[n + 1][&chain_key(&s2, &ch2)]
                        })
                        .collect()
                })
                .collect(),
        );
    }
    let explicit = ExplicitSSet {
        labels,
        face,
        degen,
    };
    let (object, cells) = explicit.to_ez()?;
    Ok(NerveData {
        object: object.shared(),
        chains: levels,
        pos,
        cells,
    })
}

/// The simplicial map of nerves induced by a functor.
pub fn nerve_map(src: &NerveData, dst: &NerveData, f: &FinFunctor) -> Result<SSetMap, WfsError> {
    let mut assign = BTreeMap::new();
    for (n, id) in src.object.generators() {
        let idx = src.cells[n]
            .iter()
            .position(|c| c.is_nondegenerate() && c.nd == *id)
            .ok_or_else(|| WfsError::Other("nerve generator missing".into()))?;
        let (s, ch) = &src.chains[n][idx];
        let (s2, ch2) = functor_chain(f, s, ch);
        let at = *dst.pos[n]
            .get(&chain_key(&s2, &ch2))
            .ok_or_else(|| WfsError::Other("image chain missing in target nerve".into()))?;
        assign.insert(id.clone(), dst.cells[n][at].clone());
    }
    let map = SSetMap::new_unchecked(src.object.clone(), dst.object.clone(), assign);
    map.validate().map_err(WfsError::Map)?;
    Ok(map)
}

/// A functor between comma categories determined by an object assignment and
/// a base-morphism assignment; the image of a comma morphism is found from
/// its endpoints and projection.
fn induced_comma_functor(
    src: &CommaCategory,
    dst: &CommaCategory,
    obj_image: &dyn Fn(&str) -> Result<String, WfsError>,
    mor_base_image: &dyn Fn(&str) -> String,
) -> Result<FinFunctor, WfsError> {
    let mut obj_map = BTreeMap::new();
    for o in src.cat.objects() {
        obj_map.insert(o.clone(), obj_image(o)?);
    }
    let mut mor_map = BTreeMap::new();
    for m in src.cat.morphism_ids() {
        let (f, g) = src.cat.endpoints(m).expect("validated category");
        let h = mor_base_image(src.projection.apply_mor(m));
        let (fi, gi) = (&obj_map[f], &obj_map[g]);
        let image = dst
            .cat
            .morphism_ids()
            .find(|m2| {
                dst.cat.endpoints(m2) == Some((fi, gi)) && dst.projection.apply_mor(m2) == &h
            })
            .ok_or_else(|| WfsError::Other("no matching comma morphism in target".into()))?;
        mor_map.insert(m.clone(), image.clone());
    }
    FinFunctor::new(src.cat.clone(), dst.cat.clone(), obj_map, mor_map).map_err(cat_err)
}

// ---------------------------------------------------------------------------
// comma categories along a functor
// ---------------------------------------------------------------------------

/// The comma category of a functor at a target object, with its projection
/// to the functor's source.
pub struct FunctorComma {
    pub cat: Arc<FinCategory>,
    pub projection: FinFunctor,
    /// Object id -> (source object, base morphism).
    pub parts: BTreeMap<String, (String, String)>,
    obj_of: BTreeMap<(String, String), String>,
    mor_with: BTreeMap<(String, String), String>,
}

impl FunctorComma {
    pub fn object_of(&self, i: &str, u: &str) -> Result<&String, WfsError> {
        self.obj_of
            .get(&(i.to_string(), u.to_string()))
            .ok_or_else(|| WfsError::Other(format!("no comma object for ({i:?}, {u:?})")))
    }

    fn morphism_with(&self, src_obj: &str, h: &str) -> Result<&String, WfsError> {
        self.mor_with
            .get(&(src_obj.to_string(), h.to_string()))
            .ok_or_else(|| WfsError::Other("no comma morphism over the base morphism".into()))
    }
}

/// Objects `(i, u: alpha(i) -> j)`.
pub fn functor_over(alpha: &FinFunctor, j: &str) -> Result<FunctorComma, WfsError> {
    functor_comma(alpha, j, false)
}

/// Objects `(i, u: j -> alpha(i))`.
pub fn functor_under(alpha: &FinFunctor, j: &str) -> Result<FunctorComma, WfsError> {
    functor_comma(alpha, j, true)
}

fn functor_comma(alpha: &FinFunctor, j: &str, under: bool) -> Result<FunctorComma, WfsError> {
    let i_cat = &alpha.source;
    let j_cat = &alpha.target;
    if !j_cat.objects().contains(&j.to_string()) {
        return Err(WfsError::Other(format!("unknown target object {j:?}")));
    }
    let mut objects = Vec::new();
    let mut parts = BTreeMap::new();
    let mut obj_of = BTreeMap::new();
    for i in i_cat.objects() {
        let homs = if under {
            j_cat.hom(j, alpha.apply_obj(i))
        } else {
            j_cat.hom(alpha.apply_obj(i), j)
        };
        for u in homs {
            let id = format!("{i}|{u}");
            objects.push(id.clone());
            parts.insert(id.clone(), (i.clone(), u.clone()));
            obj_of.insert((i.clone(), u.clone()), id);
        }
    }
    let mut morphisms = BTreeMap::new();
    let mut mor_with = BTreeMap::new();
    let mut triangle: BTreeMap<String, (String, String)> = BTreeMap::new();
    for o1 in &objects {
        let (i1, u1) = &parts[o1];
        for o2 in &objects {
            let (i2, u2) = &parts[o2];
            for h in i_cat.hom(i1, i2) {
                let ah = alpha.apply_mor(h);
                let closes = if under {
                    j_cat.compose(ah, u1) == Some(u2)
                } else {
                    j_cat.compose(u2, ah) == Some(u1)
                };
                if closes {
                    let id = format!("{o1}>{h}");
                    morphisms.insert(id.clone(), (o1.clone(), o2.clone()));
                    mor_with.insert((o1.clone(), h.clone()), id.clone());
                    triangle.insert(id, (o1.clone(), h.clone()));
                }
            }
        }
    }
    let identities: BTreeMap<String, String> = objects
        .iter()
        .map(|o| {
            let (i, _) = &parts[o];
            let idm = i_cat.identity_of(i).expect("validated category");
            (o.clone(), mor_with[&(o.clone(), idm.clone())].clone())
        })
        .collect();
    let mut compose = BTreeMap::new();
    for (m1, (o1, h1)) in &triangle {
        let (_, tgt1) = &morphisms[m1];
        for (m2, (o2, h2)) in &triangle {
            if o2 != tgt1 {
                continue;
            }
            let h = i_cat.compose(h2, h1).expect("underlying morphisms compose");
            compose.insert(
                (m2.clone(), m1.clone()),
                mor_with[&(o1.clone(), h.clone())].clone(),
            );
        }
    }
    let cat: Arc<FinCategory> = FinCategory::new(objects, morphisms, identities, compose)
        .map_err(cat_err)?
        .into();
    let obj_map = parts.iter().map(|(o, (i, _))| (o.clone(), i.clone())).collect();
    let mor_map = triangle
        .iter()
        .map(|(m, (_, h))| (m.clone(), h.clone()))
        .collect();
    let projection =
        FinFunctor::new(cat.clone(), i_cat.clone(), obj_map, mor_map).map_err(cat_err)?;
    Ok(FunctorComma {
        cat,
        projection,
        parts,
        obj_of,
        mor_with,
    })
}

// ---------------------------------------------------------------------------
// diagrams
// ---------------------------------------------------------------------------

/// A diagram of finite simplicial sets over a finite shape.
#[derive(Clone)]
pub struct SsetDiagram {
    pub shape: Arc<FinCategory>,
    pub values: BTreeMap<String, Arc<FinSimplicialSet>>,
    pub arrows: BTreeMap<String, SSetMap>,
}

/// A diagram of simplicial objects over a finite shape.
#[derive(Clone)]
pub struct SobjDiagram {
    pub shape: Arc<FinCategory>,
    pub values: BTreeMap<String, Arc<SimpObject>>,
    pub arrows: BTreeMap<String, SimpMorphism>,
}

pub enum Diagram {
    SSet(SsetDiagram),
    Sobj(SobjDiagram),
}

impl SsetDiagram {
    pub fn new(
        shape: Arc<FinCategory>,
        values: BTreeMap<String, Arc<FinSimplicialSet>>,
        arrows: BTreeMap<String, SSetMap>,
    ) -> Result<SsetDiagram, WfsError> {
        let d = SsetDiagram {
            shape,
            values,
            arrows,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn arrow(&self, m: &str) -> Result<SSetMap, WfsError> {
        if self.shape.is_identity(m) {
            let (s, _) = self
                .shape
                .endpoints(m)
                .ok_or_else(|| WfsError::Other(format!("unknown morphism {m:?}")))?;
            return Ok(SSetMap::identity(self.values[s].clone()));
        }
        self.arrows
            .get(m)
            .cloned()
            .ok_or_else(|| WfsError::Other(format!("morphism {m:?} has no arrow")))
    }

    pub fn validate(&self) -> Result<(), WfsError> {
        for o in self.shape.objects() {
            if !self.values.contains_key(o) {
                return Err(WfsError::Other(format!("object {o:?} has no value")));
            }
        }
        for m in self.shape.morphism_ids() {
            let (s, t) = self.shape.endpoints(m).expect("validated category");
            let a = self.arrow(m)?;
            if a.source() != &self.values[s] || a.target() != &self.values[t] {
                return Err(WfsError::Other(format!("arrow of {m:?} mismatched")));
            }
        }
        for g in self.shape.morphism_ids() {
            for f in self.shape.morphism_ids() {
                if let Some(gf) = self.shape.compose(g, f) {
                    let lhs = self.arrow(f)?.then(&self.arrow(g)?).map_err(WfsError::Map)?;
                    if lhs != self.arrow(gf)? {
                        return Err(WfsError::Other(format!(
                            "functoriality fails on {g:?} ∘ {f:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shape": self.shape.to_json(),
            "kind": "sset",
            "values": self.values.iter().map(|(o, v)| (o.clone(), v.to_json())).collect::<JsonMap<_, _>>(),
            "arrows": self.arrows.iter().map(|(m, a)| (m.clone(), a.to_json())).collect::<JsonMap<_, _>>(),
        })
    }
}

impl SobjDiagram {
    pub fn new(
        shape: Arc<FinCategory>,
        values: BTreeMap<String, Arc<SimpObject>>,
        arrows: BTreeMap<String, SimpMorphism>,
    ) -> Result<SobjDiagram, WfsError> {
        let d = SobjDiagram {
            shape,
            values,
            arrows,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn arrow(&self, m: &str) -> Result<SimpMorphism, WfsError> {
        if self.shape.is_identity(m) {
            let (s, _) = self
                .shape
                .endpoints(m)
                .ok_or_else(|| WfsError::Other(format!("unknown morphism {m:?}")))?;
            return Ok(SimpMorphism::identity(&self.values[s]));
        }
        self.arrows
            .get(m)
            .cloned()
            .ok_or_else(|| WfsError::Other(format!("morphism {m:?} has no arrow")))
    }

    pub fn validate(&self) -> Result<(), WfsError> {
        for o in self.shape.objects() {
            if !self.values.contains_key(o) {
                return Err(WfsError::Other(format!("object {o:?} has no value")));
            }
        }
        for m in self.shape.morphism_ids() {
            let (s, t) = self.shape.endpoints(m).expect("validated category");
            let a = self.arrow(m)?;
            if a.source != self.values[s] || a.target != self.values[t] {
                return Err(WfsError::Other(format!("arrow of {m:?} mismatched")));
            }
        }
        for g in self.shape.morphism_ids() {
            for f in self.shape.morphism_ids() {
                if let Some(gf) = self.shape.compose(g, f) {
                    if self.arrow(f)?.then(&self.arrow(g)?)?.levels != self.arrow(gf)?.levels {
                        return Err(WfsError::Other(format!(
                            "functoriality fails on {g:?} ∘ {f:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shape": self.shape.to_json(),
            "kind": "sobj",
            "values": self.values.iter().map(|(o, v)| (o.clone(), v.to_json())).collect::<JsonMap<_, _>>(),
            "arrows": self.arrows.iter().map(|(m, a)| (m.clone(), a.to_json())).collect::<JsonMap<_, _>>(),
        })
    }
}

impl Diagram {
    pub fn shape(&self) -> &Arc<FinCategory> {
        match self {
            Diagram::SSet(d) => &d.shape,
            Diagram::Sobj(d) => &d.shape,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Diagram::SSet(d) => d.to_json(),
            Diagram::Sobj(d) => d.to_json(),
        }
    }

    pub fn from_json(v: &Value) -> Result<Diagram, WfsError> {
        let shape: Arc<FinCategory> = FinCategory::from_json(
            v.get("shape")
                .ok_or_else(|| WfsError::Other("missing \"shape\"".into()))?,
        )
        .map_err(cat_err)?
        .into();
        let values_json = v
            .get("values")
            .and_then(Value::as_object)
            .ok_or_else(|| WfsError::Other("missing \"values\"".into()))?;
        let arrows_json = v
            .get("arrows")
            .and_then(Value::as_object)
            .cloned()
            .unwrap_or_default();
        let kind = v.get("kind").and_then(Value::as_str).map(str::to_string).unwrap_or_else(|| {
            // detect: simplicial objects carry a truncation field
            if values_json.values().next().map(|w| w.get("trunc").is_some()).unwrap_or(false) {
                "sobj".into()
            } else {
                "sset".into()
            }
        });
        if kind == "sobj" {
            let mut values = BTreeMap::new();
            for (o, w) in values_json {
                values.insert(o.clone(), Arc::new(SimpObject::from_json(w)?));
            }
            let mut arrows = BTreeMap::new();
            for (m, w) in &arrows_json {
                let a = SimpMorphism::from_json(w)?;
                let (s, t) = shape
                    .endpoints(m)
                    .ok_or_else(|| WfsError::Other(format!("unknown morphism {m:?}")))?;
                if a.source.as_ref() != values[s].as_ref() || a.target.as_ref() != values[t].as_ref()
                {
                    return Err(WfsError::Other(format!(
                        "arrow {m:?} does not match the stated values"
                    )));
                }
                arrows.insert(
                    m.clone(),
                    SimpMorphism::new(values[s].clone(), values[t].clone(), a.levels)?,
                );
            }
            Ok(Diagram::Sobj(SobjDiagram::new(shape, values, arrows)?))
        } else {
            let mut values = BTreeMap::new();
            for (o, w) in values_json {
                values.insert(o.clone(), FinSimplicialSet::from_json(w)?.shared());
            }
            let mut arrows = BTreeMap::new();
            for (m, w) in &arrows_json {
                let (s, t) = shape
                    .endpoints(m)
                    .ok_or_else(|| WfsError::Other(format!("unknown morphism {m:?}")))?;
                let a = SSetMap::from_json(w, values[s].clone(), values[t].clone())
                    .map_err(WfsError::Map)?;
                arrows.insert(m.clone(), a);
            }
            Ok(Diagram::SSet(SsetDiagram::new(shape, values, arrows)?))
        }
    }
}

// ---------------------------------------------------------------------------
// homotopy colimits: the chain diagonal
// ---------------------------------------------------------------------------

fn entry_label(start: &str, chain: &[String], cell: &Cell) -> String {
    format!("{}%{}", chain_key(start, chain), cell)
}

/// The diagonal of the chain bisimplicial set, with entry bookkeeping.
pub struct DiagonalSSet {
    pub object: Arc<FinSimplicialSet>,
    entries: Vec<Vec<(String, Vec<String>, Cell)>>,
    pos: Vec<HashMap<String, usize>>,
    cells: Vec<Vec<Cell>>,
}

pub fn hocolim_sset(d: &SsetDiagram, trunc: usize) -> Result<DiagonalSSet, WfsError> {
    let shape = &d.shape;
    let mut entries: Vec<Vec<(String, Vec<String>, Cell)>> = Vec::new();
    let mut pos: Vec<HashMap<String, usize>> = Vec::new();
    for n in 0..=trunc {
        let mut lvl = Vec::new();
        for (start, chain) in chains(shape, n) {
            for cell in d.values[&start].cells(n) {
                lvl.push((start.clone(), chain.clone(), cell));
            }
        }
        pos.push(
            lvl.iter()
                .enumerate()
                .map(|(k, (s, ch, c))| (entry_label(s, ch, c), k))
                .collect(),
        );
        entries.push(lvl);
    }
    let labels = entries
        .iter()
        .map(|lvl| lvl.iter().map(|(s, ch, c)| entry_label(s, ch, c)).collect())
        .collect();
    let mut face = vec![Vec::new()];
    for n in 1..=trunc {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let mut col = Vec::new();
            for (start, chain, cell) in &entries[n] {
                let (s2, ch2, c2) = if i == 0 {
                    let (s2, ch2) = chain_face(shape, start, chain, 0);
                    let transported = d.arrow(&chain[0])?.eval(&d.values[start].face(cell, 0));
                    (s2, ch2, transported)
                } else {
                    let (s2, ch2) = chain_face(shape, start, chain, i);
                    (s2, ch2, d.values[start].face(cell, i))
                };
                col.push(pos[n - 1][&entry_label(&s2, &ch2, &c2)]);
            }
            per_i.push(col);
        }
        face.push(per_i);
    }
    let mut degen = Vec::new();
    for n in 0..trunc {
        let mut per_i = Vec::new();
        for i in 0..=n {
            let mut col = Vec::new();
            for (start, chain, cell) in &entries[n] {
                let (s2, ch2) = chain_degen(shape, start, chain, i);
                let c2 = d.values[start].degeneracy(cell, i);
                col.push(pos[n + 1][&entry_label(&s2, &ch2, &c2)]);
            }
            per_i.push(col);
        }
        degen.push(per_i);
    }
    let explicit = ExplicitSSet {
        labels,
        face,
        degen,
    };
    let (object, cells) = explicit.to_ez()?;
    Ok(DiagonalSSet {
        object: object.shared(),
        entries,
        pos,
        cells,
    })
}

/// The map of diagonals induced by a shape functor and compatible pointwise
/// maps: `pointwise[i]: X(i) -> X'(F i)`.
pub fn hocolim_sset_map(
    src: &DiagonalSSet,
    dst: &DiagonalSSet,
    f: &FinFunctor,
    pointwise: &BTreeMap<String, SSetMap>,
) -> Result<SSetMap, WfsError> {
    let mut assign = BTreeMap::new();
    for (n, id) in src.object.generators() {
        let idx = src.cells[n]
            .iter()
            .position(|c| c.is_nondegenerate() && c.nd == *id)
            .ok_or_else(|| WfsError::Other("diagonal generator missing".into()))?;
        let (start, chain, cell) = &src.entries[n][idx];
        let (s2, ch2) = functor_chain(f, start, chain);
        let c2 = pointwise[start].eval(cell);
        let at = *dst.pos[n]
            .get(&entry_label(&s2, &ch2, &c2))
            .ok_or_else(|| WfsError::Other("image entry missing in target diagonal".into()))?;
        assign.insert(id.clone(), dst.cells[n][at].clone());
    }
    let map = SSetMap::new_unchecked(src.object.clone(), dst.object.clone(), assign);
    map.validate().map_err(WfsError::Map)?;
    Ok(map)
}

/// The chain diagonal for simplicial-object values.
pub struct DiagonalSobj {
    pub object: Arc<SimpObject>,
    chain_list: Vec<Vec<(String, Vec<String>)>>,
    chain_pos: Vec<HashMap<String, usize>>,
    injections: Vec<Vec<CoprodMorphism>>,
}

pub fn hocolim_sobj(d: &SobjDiagram, trunc: usize) -> Result<DiagonalSobj, WfsError> {
    let shape = &d.shape;
    let trunc = trunc.min(d.values.values().map(|v| v.trunc).min().unwrap_or(trunc));
    let mut chain_list = Vec::new();
    let mut chain_pos: Vec<HashMap<String, usize>> = Vec::new();
    let mut levels: Vec<CoprodObject> = Vec::new();
    let mut injections: Vec<Vec<CoprodMorphism>> = Vec::new();
    for n in 0..=trunc {
        let lvl = chains(shape, n);
        let parts: Vec<&CoprodObject> = lvl
            .iter()
            .map(|(s, _)| &d.values[s].levels[n])
            .collect();
        let (obj, injs) = coprod_coproduct(&parts);
        chain_pos.push(
            lvl.iter()
                .enumerate()
                .map(|(k, (s, ch))| (chain_key(s, ch), k))
                .collect(),
        );
        chain_list.push(lvl);
        levels.push(obj);
        injections.push(injs);
    }
    let mut faces = vec![Vec::new()];
    for n in 1..=trunc {
        let parts: Vec<&CoprodObject> = chain_list[n]
            .iter()
            .map(|(s, _)| &d.values[s].levels[n])
            .collect();
        let mut per_i = Vec::new();
        for i in 0..=n {
            let legs = chain_list[n]
                .iter()
                .map(|(start, chain)| {
                    let (s2, ch2) = chain_face(shape, start, chain, i);
                    let at = chain_pos[n - 1][&chain_key(&s2, &ch2)];
                    let step = if i == 0 {
                        d.values[start].faces[n][0].then(&d.arrow(&chain[0])?.levels[n - 1])?
                    } else {
                        d.values[start].faces[n][i].clone()
                    };
                    step.then(&injections[n - 1][at])
                })
                .collect::<Result<Vec<_>, _>>()?;
            per_i.push(coprod_copair(
                &levels[n],
                &parts,
                &legs,
            )?);
        }
        faces.push(per_i);
    }
    let mut degens = Vec::new();
    for n in 0..trunc {
        let parts: Vec<&CoprodObject> = chain_list[n]
            .iter()
            .map(|(s, _)| &d.values[s].levels[n])
            .collect();
        let mut per_i = Vec::new();
        for i in 0..=n {
            let legs = chain_list[n]
                .iter()
                .map(|(start, chain)| {
                    let (s2, ch2) = chain_degen(shape, start, chain, i);
                    let at = chain_pos[n + 1][&chain_key(&s2, &ch2)];
                    d.values[start].degens[n][i].then(&injections[n + 1][at])
                })
                .collect::<Result<Vec<_>, _>>()?;
            per_i.push(coprod_copair(&levels[n], &parts, &legs)?);
        }
        degens.push(per_i);
    }
    let object = Arc::new(SimpObject::new(trunc, levels, faces, degens)?);
    Ok(DiagonalSobj {
        object,
        chain_list,
        chain_pos,
        injections,
    })
}

/// The diagonal map induced by a shape functor and pointwise morphisms.
pub fn hocolim_sobj_map(
    src: &DiagonalSobj,
    src_d: &SobjDiagram,
    dst: &DiagonalSobj,
    f: &FinFunctor,
    pointwise: &BTreeMap<String, SimpMorphism>,
) -> Result<SimpMorphism, WfsError> {
    let trunc = src.object.trunc.min(dst.object.trunc);
    let mut levels = Vec::new();
    for n in 0..=trunc {
        let parts: Vec<&CoprodObject> = src.chain_list[n]
            .iter()
            .map(|(s, _)| &src_d.values[s].levels[n])
            .collect();
        let legs = src.chain_list[n]
            .iter()
            .map(|(start, chain)| {
                let (s2, ch2) = functor_chain(f, start, chain);
                let at = *dst.chain_pos[n]
                    .get(&chain_key(&s2, &ch2))
                    .ok_or_else(|| WfsError::Other("image chain missing".into()))?;
                pointwise[start].levels[n].then(&dst.injections[n][at])
            })
            .collect::<Result<Vec<_>, _>>()?;
        levels.push(coprod_copair(&src.object.levels[n], &parts, &legs)?);
    }
    SimpMorphism::new(src.object.clone(), dst.object.clone(), levels)
}

// ---------------------------------------------------------------------------
// the coend oracle
// ---------------------------------------------------------------------------

/// The homotopy colimit computed directly as the coend of nerves of
/// under-categories against the values: a brute-force coequalizer of
/// coproducts. Used to cross-check the diagonal formula.
pub fn coend_hocolim_sset(d: &SsetDiagram, trunc: usize) -> Result<Arc<FinSimplicialSet>, WfsError> {
    let shape = &d.shape;
    let objects: Vec<String> = shape.objects().to_vec();
    let unders: BTreeMap<String, CommaCategory> = objects
        .iter()
        .map(|i| {
            crate::fincat::under_category(shape, i)
                .map(|u| (i.clone(), u))
                .map_err(cat_err)
        })
        .collect::<Result<_, _>>()?;
    // entries: (object, under-chain, value cell)
    let label = |i: &str, s: &str, ch: &[String], c: &Cell| format!("{i}%{}%{c}", chain_key(s, ch));
    let mut entries: Vec<Vec<(String, String, Vec<String>, Cell)>> = Vec::new();
    let mut pos: Vec<HashMap<String, usize>> = Vec::new();
    for n in 0..=trunc {
        let mut lvl = Vec::new();
        for i in &objects {
            for (s, ch) in chains(&unders[i].cat, n) {
                for c in d.values[i].cells(n) {
                    lvl.push((i.clone(), s.clone(), ch.clone(), c));
                }
            }
        }
        pos.push(
            lvl.iter()
                .enumerate()
                .map(|(k, (i, s, ch, c))| (label(i, s, ch, c), k))
                .collect(),
        );
        entries.push(lvl);
    }
    let labels = entries
        .iter()
        .map(|lvl| lvl.iter().map(|(i, s, ch, c)| label(i, s, ch, c)).collect())
        .collect();
    let mut face = vec![Vec::new()];
    for n in 1..=trunc {
        face.push(
            (0..=n)
                .map(|k| {
                    entries[n]
                        .iter()
                        .map(|(i, s, ch, c)| {
                            let (s2, ch2) = chain_face(&unders[i].cat, s, ch, k);
                            let c2 = d.values[i].face(c, k);
                            pos[n - 1][&label(i, &s2, &ch2, &c2)]
                        })
                        .collect()
                })
                .collect(),
        );
    }
    let mut degen = Vec::new();
    for n in 0..trunc {
        degen.push(
            (0..=n)
                .map(|k| {
                    entries[n]
                        .iter()
                        .map(|(i, s, ch, c)| {
                            let (s2, ch2) = chain_degen(&unders[i].cat, s, ch, k);
                            let c2 = d.values[i].degeneracy(c, k);
                            pos[n + 1][&label(i, &s2, &ch2, &c2)]
                        })
                        .collect()
                })
                .collect(),
        );
    }
    let explicit = ExplicitSSet {
        labels,
        face,
        degen,
    };
    // coend relations, one per morphism, chain, and value cell
    let mut relations: Vec<(usize, usize, usize)> = Vec::new();
    for m in shape.morphism_ids() {
        if shape.is_identity(m) {
            continue;
        }
        let (i, i2) = shape.endpoints(m).expect("validated category");
        let restrict = induced_comma_functor(
            &unders[i2],
            &unders[i],
            &|f| {
                shape
                    .compose(f, m)
                    .cloned()
                    .ok_or_else(|| WfsError::Other("comma restriction fails to compose".into()))
            },
            &|h| h.to_string(),
        )?;
        let arrow = d.arrow(m)?;
        for n in 0..=trunc {
            for (s, ch) in chains(&unders[i2].cat, n) {
                let (s2, ch2) = functor_chain(&restrict, &s, &ch);
                for c in d.values[i].cells(n) {
                    let left = pos[n][&label(i, &s2, &ch2, &c)];
                    let right = pos[n][&label(i2, &s, &ch, &arrow.eval(&c))];
                    relations.push((n, left, right));
                }
            }
        }
    }
    let (quotient, _) = explicit.quotient(&relations);
    let (object, _) = quotient.to_ez()?;
    Ok(object.shared())
}

// ---------------------------------------------------------------------------
// homotopy limits: ends of cotensors
// ---------------------------------------------------------------------------

fn finiteness_depth(shape: &FinCategory) -> Result<usize, WfsError> {
    match is_homotopically_finite(shape) {
        (true, FinitenessCertificate::MaxChainLength(l)) => Ok(l),
        (_, FinitenessCertificate::Loop(cycle)) => Err(WfsError::Other(format!(
            "shape is not homotopically finite: cycle {cycle:?}"
        ))),
        _ => Err(WfsError::Other("shape is not homotopically finite".into())),
    }
}

/// The end of mapping spaces from nerves of over-categories, kept with
/// enough bookkeeping to build cones into it.
pub struct EndSSet {
    pub object: Arc<FinSimplicialSet>,
    objects: Vec<String>,
    overs: BTreeMap<String, CommaCategory>,
    nerves: BTreeMap<String, NerveData>,
    spaces: BTreeMap<String, MappingSpace>,
    stages: Vec<Product>,
    include: SSetMap,
    projections: BTreeMap<String, SSetMap>,
}

pub fn holim_sset(
    d: &SsetDiagram,
    trunc: usize,
    budget: &mut Budget,
) -> Result<EndSSet, WfsError> {
    let shape = &d.shape;
    let depth = finiteness_depth(shape)?;
    let objects: Vec<String> = shape.objects().to_vec();
    let mut overs = BTreeMap::new();
    let mut nerves = BTreeMap::new();
    let mut spaces = BTreeMap::new();
    for i in &objects {
        let over = over_category(shape, i).map_err(cat_err)?;
        let nd = nerve_data(&over.cat, depth)?;
        let ms = mapping_space(&nd.object, &d.values[i], trunc, budget)?;
        overs.insert(i.clone(), over);
        nerves.insert(i.clone(), nd);
        spaces.insert(i.clone(), ms);
    }
    // the ambient product of the cotensors
    let point = FinSimplicialSet::delta(0).shared();
    let mut stages: Vec<Product> = Vec::new();
    let mut product_object = point.clone();
    let mut projections: BTreeMap<String, SSetMap> = BTreeMap::new();
    for (k, i) in objects.iter().enumerate() {
        if k == 0 {
            product_object = spaces[i].object.clone();
            projections.insert(i.clone(), SSetMap::identity(product_object.clone()));
        } else {
            let p = Product::new(&product_object, &spaces[i].object)?;
            for q in projections.values_mut() {
                *q = p.p1.then(q).map_err(WfsError::Map)?;
            }
            projections.insert(i.clone(), p.p2.clone());
            product_object = p.object.clone();
            stages.push(p);
        }
    }
    // cut out the end by the naturality conditions
    let mut include = SSetMap::identity(product_object.clone());
    let mut object = product_object.clone();
    for m in shape.morphism_ids() {
        if shape.is_identity(m) {
            continue;
        }
        let (i, i2) = shape.endpoints(m).expect("validated category");
        let aux = mapping_space(&nerves[i].object, &d.values[i2], trunc, budget)?;
        let comma_map = induced_comma_functor(
            &overs[i],
            &overs[i2],
            &|u| {
                shape
                    .compose(m, u)
                    .cloned()
                    .ok_or_else(|| WfsError::Other("over-category map fails to compose".into()))
            },
            &|h| h.to_string(),
        )?;
        let g = nerve_map(&nerves[i], &nerves[i2], &comma_map)?;
        let lhs = projections[i]
            .then(&spaces[i].postcompose(&d.arrow(m)?, &aux)?)
            .map_err(WfsError::Map)?;
        let rhs = projections[i2]
            .then(&spaces[i2].precompose(&g, &aux)?)
            .map_err(WfsError::Map)?;
        let lhs = include.then(&lhs).map_err(WfsError::Map)?;
        let rhs = include.then(&rhs).map_err(WfsError::Map)?;
        let (e, inc) = equalizer(&lhs, &rhs).map_err(WfsError::Map)?;
        include = inc.then(&include).map_err(WfsError::Map)?;
        object = e;
    }
    let projections = projections
        .into_iter()
        .map(|(i, p)| Ok((i, include.then(&p).map_err(WfsError::Map)?)))
        .collect::<Result<_, WfsError>>()?;
    Ok(EndSSet {
        object,
        objects,
        overs,
        nerves,
        spaces,
        stages,
        include,
        projections,
    })
}

impl EndSSet {
    /// Cone into the end from compatible legs, one per shape object.
    pub fn cone(
        &self,
        source: &Arc<FinSimplicialSet>,
        legs: &BTreeMap<String, SSetMap>,
    ) -> Result<SSetMap, WfsError> {
        if self.objects.is_empty() {
            let pt = FinSimplicialSet::delta(0).shared();
            let _ = pt;
            return Ok(SSetMap::terminal_map(source.clone(), self.include.target().clone()));
        }
        let mut acc = legs[&self.objects[0]].clone();
        for (k, i) in self.objects.iter().enumerate().skip(1) {
            acc = self.stages[k - 1].pair(&acc, &legs[i]).map_err(WfsError::Map)?;
        }
        // retarget into the equalized subobject
        let mut assign = BTreeMap::new();
        for (id, c) in acc.assignment() {
            if !self.object.contains_cell(c) {
                return Err(WfsError::Other(format!(
                    "cone does not satisfy the end conditions at {id:?}"
                )));
            }
            assign.insert(id.clone(), c.clone());
        }
        let map = SSetMap::new_unchecked(source.clone(), self.object.clone(), assign);
        map.validate().map_err(WfsError::Map)?;
        Ok(map)
    }
}

/// Restriction of an end along a shape functor `g: S' -> S` whose
/// restricted values agree: `holim over S -> holim over S'`.
pub fn end_restrict_sset(
    src: &EndSSet,
    dst: &EndSSet,
    g: &FinFunctor,
) -> Result<SSetMap, WfsError> {
    let mut legs = BTreeMap::new();
    for o in &dst.objects {
        let go = g.apply_obj(o);
        let comma_map = induced_comma_functor(
            &dst.overs[o],
            &src.overs[go],
            &|u| Ok(g.apply_mor(u).clone()),
            &|h| g.apply_mor(h).clone(),
        )?;
        let nu = nerve_map(&dst.nerves[o], &src.nerves[go], &comma_map)?;
        let leg = src.projections[go]
            .then(&src.spaces[go].precompose(&nu, &dst.spaces[o])?)
            .map_err(WfsError::Map)?;
        legs.insert(o.clone(), leg);
    }
    dst.cone(&src.object, &legs)
}

/// The end of hom-left cotensors for simplicial-object values, one level at
/// a time, with cone bookkeeping.
pub struct EndSobj {
    pub object: Arc<SimpObject>,
    objects: Vec<String>,
    overs: BTreeMap<String, CommaCategory>,
    nerves: BTreeMap<String, NerveData>,
    cotensors: Vec<BTreeMap<String, Product>>,
    homlefts: Vec<BTreeMap<String, HomLeft>>,
    products: Vec<MultiProduct>,
    projections: Vec<BTreeMap<String, CoprodMorphism>>,
}

pub fn holim_sobj(d: &SobjDiagram, trunc: usize) -> Result<EndSobj, WfsError> {
    let shape = &d.shape;
    let depth = finiteness_depth(shape)?;
    let trunc = trunc.min(d.values.values().map(|v| v.trunc).min().unwrap_or(trunc));
    let objects: Vec<String> = shape.objects().to_vec();
    let mut overs = BTreeMap::new();
    let mut nerves = BTreeMap::new();
    for i in &objects {
        let over = over_category(shape, i).map_err(cat_err)?;
        nerves.insert(i.clone(), nerve_data(&over.cat, depth)?);
        overs.insert(i.clone(), over);
    }
    let mut cotensors: Vec<BTreeMap<String, Product>> = Vec::new();
    let mut homlefts: Vec<BTreeMap<String, HomLeft>> = Vec::new();
    let mut products: Vec<MultiProduct> = Vec::new();
    let mut projections: Vec<BTreeMap<String, CoprodMorphism>> = Vec::new();
    let mut levels: Vec<CoprodObject> = Vec::new();
    for n in 0..=trunc {
        let dn = FinSimplicialSet::delta(n).shared();
        let mut cot = BTreeMap::new();
        let mut hls = BTreeMap::new();
        for i in &objects {
            let p = Product::new(&nerves[i].object, &dn)?;
            hls.insert(i.clone(), HomLeft::new(&p.object, &d.values[i])?);
            cot.insert(i.clone(), p);
        }
        let factors: Vec<&CoprodObject> = objects.iter().map(|i| &hls[i].object).collect();
        let product = MultiProduct::new(&factors);
        let mut projs: BTreeMap<String, CoprodMorphism> = objects
            .iter()
            .enumerate()
            .map(|(k, i)| (i.clone(), product.projections[k].clone()))
            .collect();
        let mut conditions = Vec::new();
        for m in shape.morphism_ids() {
            if shape.is_identity(m) {
                continue;
            }
            let (i, i2) = shape.endpoints(m).expect("validated category");
            let aux = HomLeft::new(&cot[i].object, &d.values[i2])?;
            let comma_map = induced_comma_functor(
                &overs[i],
                &overs[i2],
                &|u| {
                    shape
                        .compose(m, u)
                        .cloned()
                        .ok_or_else(|| WfsError::Other("over-category map fails to compose".into()))
                },
                &|h| h.to_string(),
            )?;
            let nu = nerve_map(&nerves[i], &nerves[i2], &comma_map)?;
            let g = cot[i2]
                .pair(
                    &cot[i].p1.then(&nu).map_err(WfsError::Map)?,
                    &cot[i].p2,
                )
                .map_err(WfsError::Map)?;
            let lhs = projs[i].then(&hls[i].post(&d.arrow(m)?, &aux)?)?;
            let rhs = projs[i2].then(&hls[i2].pre(&g, &aux)?)?;
            conditions.push((lhs, rhs));
        }
        let (obj, inc) = equalize_all(&product.object, &conditions)?;
        for p in projs.values_mut() {
            *p = inc.then(p)?;
        }
        levels.push(obj);
        cotensors.push(cot);
        homlefts.push(hls);
        products.push(product);
        projections.push(projs);
    }
    // structure maps, contravariantly from the coface and codegeneracy maps
    let cross = |from: &BTreeMap<String, Product>,
                 to: &BTreeMap<String, Product>,
                 i: &str,
                 values: &[usize],
                 m: usize,
                 n: usize|
     -> Result<SSetMap, WfsError> {
        let alpha = delta_map(values, m, n);
        let alpha = SSetMap::new_unchecked(
            from[i].p2.target().clone(),
            to[i].p2.target().clone(),
            alpha.assignment().clone(),
        );
        to[i]
            .pair(&from[i].p1, &from[i].p2.then(&alpha).map_err(WfsError::Map)?)
            .map_err(WfsError::Map)
    };
    let mut faces = vec![Vec::new()];
    for n in 1..=trunc {
        let mut per_i = Vec::new();
        for i_face in 0..=n {
            let values: Vec<usize> = (0..n).map(|v| if v < i_face { v } else { v + 1 }).collect();
            let legs = objects
                .iter()
                .map(|i| {
                    let c = cross(&cotensors[n - 1], &cotensors[n], i, &values, n - 1, n)?;
                    projections[n][i].then(&homlefts[n][i].pre(&c, &homlefts[n - 1][i])?)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let into_product = products[n - 1].induce(&levels[n], &legs)?;
            per_i.push(factor_through_subobject(&into_product, &levels[n - 1])?);
        }
        faces.push(per_i);
    }
    let mut degens = Vec::new();
    for n in 0..trunc {
        let mut per_i = Vec::new();
        for i_deg in 0..=n {
            let values: Vec<usize> = (0..=n + 1)
                .map(|v| if v <= i_deg { v } else { v - 1 })
                .collect();
            let legs = objects
                .iter()
                .map(|i| {
                    let c = cross(&cotensors[n + 1], &cotensors[n], i, &values, n + 1, n)?;
                    projections[n][i].then(&homlefts[n][i].pre(&c, &homlefts[n + 1][i])?)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let into_product = products[n + 1].induce(&levels[n], &legs)?;
            per_i.push(factor_through_subobject(&into_product, &levels[n + 1])?);
        }
        degens.push(per_i);
    }
    let object = Arc::new(SimpObject::new(trunc, levels, faces, degens)?);
    Ok(EndSobj {
        object,
        objects,
        overs,
        nerves,
        cotensors,
        homlefts,
        products,
        projections,
    })
}

/// Restriction of a simplicial-object end along a shape functor
/// `g: S' -> S` with agreeing restricted values.
pub fn end_restrict_sobj(
    src: &EndSobj,
    dst: &EndSobj,
    g: &FinFunctor,
) -> Result<SimpMorphism, WfsError> {
    let trunc = src.object.trunc.min(dst.object.trunc);
    let mut levels = Vec::new();
    for n in 0..=trunc {
        let legs = dst
            .objects
            .iter()
            .map(|o| {
                let go = g.apply_obj(o);
                let comma_map = induced_comma_functor(
                    &dst.overs[o],
                    &src.overs[go],
                    &|u| Ok(g.apply_mor(u).clone()),
                    &|h| g.apply_mor(h).clone(),
                )?;
                let nu = nerve_map(&dst.nerves[o], &src.nerves[go], &comma_map)?;
                let cm = src.cotensors[n][go]
                    .pair(
                        &dst.cotensors[n][o].p1.then(&nu).map_err(WfsError::Map)?,
                        &dst.cotensors[n][o].p2,
                    )
                    .map_err(WfsError::Map)?;
                src.projections[n][go]
                    .then(&src.homlefts[n][go].pre(&cm, &dst.homlefts[n][o])?)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let into_product = dst.products[n].induce(&src.object.levels[n], &legs)?;
        levels.push(factor_through_subobject(
            &into_product,
            &dst.object.levels[n],
        )?);
    }
    SimpMorphism::new(src.object.clone(), dst.object.clone(), levels)
}

// ---------------------------------------------------------------------------
// dispatchers with precondition stamps
// ---------------------------------------------------------------------------

pub enum Computed {
    SSet(Arc<FinSimplicialSet>),
    Sobj(Arc<SimpObject>),
}

pub struct HolimOutcome {
    pub result: Computed,
    pub warnings: Vec<String>,
}

pub fn hocolim(d: &Diagram, trunc: usize) -> Result<HolimOutcome, WfsError> {
    match d {
        Diagram::SSet(d) => Ok(HolimOutcome {
            result: Computed::SSet(hocolim_sset(d, trunc)?.object),
            warnings: Vec::new(),
        }),
        Diagram::Sobj(d) => {
            let mut warnings = Vec::new();
            for (o, v) in &d.values {
                if !is_cofibrant_decomposition(v).holds() {
                    warnings.push(format!("value at {o:?} is not cofibrant"));
                }
            }
            Ok(HolimOutcome {
                result: Computed::Sobj(hocolim_sobj(d, trunc)?.object),
                warnings,
            })
        }
    }
}

pub fn holim(d: &Diagram, trunc: usize, budget: &mut Budget) -> Result<HolimOutcome, WfsError> {
    match d {
        Diagram::SSet(d) => {
            let mut warnings = Vec::new();
            for (o, v) in &d.values {
                let f = crate::sset::lifting::to_point(v.clone());
                match crate::sset::lifting::is_kan_fibration_to(&f, trunc, budget) {
                    Ok(r) if !r.holds => warnings.push(format!("value at {o:?} is not Kan")),
                    Err(_) => warnings.push(format!("fibrancy of {o:?} is inconclusive")),
                    _ => {}
                }
            }
            Ok(HolimOutcome {
                result: Computed::SSet(holim_sset(d, trunc, budget)?.object),
                warnings,
            })
        }
        Diagram::Sobj(d) => {
            let mut warnings = Vec::new();
            let projectives =
                crate::sobj::default_projectives(&d.values.values().map(|v| &**v).collect::<Vec<_>>());
            for (o, v) in &d.values {
                let to_pt = crate::sobj::to_terminal(v)?;
                match crate::sobj::is_fibration(&to_pt, &projectives, trunc, budget) {
                    Ok(r) if !r.holds => warnings.push(format!("value at {o:?} is not fibrant")),
                    Err(_) => warnings.push(format!("fibrancy of {o:?} is inconclusive")),
                    _ => {}
                }
            }
            Ok(HolimOutcome {
                result: Computed::Sobj(holim_sobj(d, trunc)?.object),
                warnings,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// homotopy Kan extensions
// ---------------------------------------------------------------------------

fn restricted_sset(
    d: &SsetDiagram,
    comma: &FunctorComma,
) -> Result<SsetDiagram, WfsError> {
    let values = comma
        .parts
        .iter()
        .map(|(o, (i, _))| (o.clone(), d.values[i].clone()))
        .collect();
    let mut arrows = BTreeMap::new();
    for m in comma.cat.morphism_ids() {
        if comma.cat.is_identity(m) {
            continue;
        }
        arrows.insert(m.clone(), d.arrow(comma.projection.apply_mor(m))?);
    }
    SsetDiagram::new(comma.cat.clone(), values, arrows)
}

fn restricted_sobj(
    d: &SobjDiagram,
    comma: &FunctorComma,
) -> Result<SobjDiagram, WfsError> {
    let values: BTreeMap<String, Arc<SimpObject>> = comma
        .parts
        .iter()
        .map(|(o, (i, _))| (o.clone(), d.values[i].clone()))
        .collect();
    let mut arrows = BTreeMap::new();
    for m in comma.cat.morphism_ids() {
        if comma.cat.is_identity(m) {
            continue;
        }
        let a = d.arrow(comma.projection.apply_mor(m))?;
        let (s, t) = comma.cat.endpoints(m).expect("validated category");
        arrows.insert(
            m.clone(),
            SimpMorphism::new(values[s].clone(), values[t].clone(), a.levels)?,
        );
    }
    SobjDiagram::new(comma.cat.clone(), values, arrows)
}

/// The functor between comma categories induced by postcomposition (left
/// Kan, `u -> v . u`) or precomposition (right Kan, `u' -> u' . v`).
fn comma_transport(
    src: &FunctorComma,
    dst: &FunctorComma,
    alpha: &FinFunctor,
    v: &str,
    under: bool,
) -> Result<FinFunctor, WfsError> {
    let j_cat = &alpha.target;
    let mut obj_map = BTreeMap::new();
    for (o, (i, u)) in &src.parts {
        let u2 = if under {
            j_cat.compose(u, v)
        } else {
            j_cat.compose(v, u)
        }
        .ok_or_else(|| WfsError::Other("comma transport fails to compose".into()))?;
        obj_map.insert(o.clone(), dst.object_of(i, u2)?.clone());
    }
    let mut mor_map = BTreeMap::new();
    for m in src.cat.morphism_ids() {
        let (o1, _) = src.cat.endpoints(m).expect("validated category");
        let h = src.projection.apply_mor(m);
        mor_map.insert(m.clone(), dst.morphism_with(&obj_map[o1], h)?.clone());
    }
    FinFunctor::new(src.cat.clone(), dst.cat.clone(), obj_map, mor_map).map_err(cat_err)
}

/// Homotopy left Kan extension along `alpha`: value at `j` is the homotopy
/// colimit over the comma category `alpha / j`.
pub fn hokan_left(alpha: &FinFunctor, d: &Diagram, trunc: usize) -> Result<Diagram, WfsError> {
    let j_cat = &alpha.target;
    let commas: BTreeMap<String, FunctorComma> = j_cat
        .objects()
        .iter()
        .map(|j| functor_over(alpha, j).map(|c| (j.clone(), c)))
        .collect::<Result<_, _>>()?;
    match d {
        Diagram::SSet(d) => {
            let mut diagonals = BTreeMap::new();
            let mut restricted = BTreeMap::new();
            for j in j_cat.objects() {
                let r = restricted_sset(d, &commas[j])?;
                diagonals.insert(j.clone(), hocolim_sset(&r, trunc)?);
                restricted.insert(j.clone(), r);
            }
            let values: BTreeMap<String, Arc<FinSimplicialSet>> = diagonals
                .iter()
                .map(|(j, dd)| (j.clone(), dd.object.clone()))
                .collect();
            let mut arrows = BTreeMap::new();
            for v in j_cat.morphism_ids() {
                if j_cat.is_identity(v) {
                    continue;
                }
                let (j, j2) = j_cat.endpoints(v).expect("validated category");
                let f = comma_transport(&commas[j], &commas[j2], alpha, v, false)?;
                let pointwise = commas[j]
                    .parts
                    .keys()
                    .map(|o| (o.clone(), SSetMap::identity(restricted[j].values[o].clone())))
                    .collect();
                arrows.insert(
                    v.clone(),
                    hocolim_sset_map(&diagonals[j], &diagonals[j2], &f, &pointwise)?,
                );
            }
            Ok(Diagram::SSet(SsetDiagram::new(
                j_cat.clone(),
                values,
                arrows,
            )?))
        }
        Diagram::Sobj(d) => {
            let mut diagonals = BTreeMap::new();
            let mut restricted = BTreeMap::new();
            for j in j_cat.objects() {
                let r = restricted_sobj(d, &commas[j])?;
                diagonals.insert(j.clone(), hocolim_sobj(&r, trunc)?);
                restricted.insert(j.clone(), r);
            }
            let values: BTreeMap<String, Arc<SimpObject>> = diagonals
                .iter()
                .map(|(j, dd)| (j.clone(), dd.object.clone()))
                .collect();
            let mut arrows = BTreeMap::new();
            for v in j_cat.morphism_ids() {
                if j_cat.is_identity(v) {
                    continue;
                }
                let (j, j2) = j_cat.endpoints(v).expect("validated category");
                let f = comma_transport(&commas[j], &commas[j2], alpha, v, false)?;
                let pointwise = commas[j]
                    .parts
                    .keys()
                    .map(|o| (o.clone(), SimpMorphism::identity(&restricted[j].values[o])))
                    .collect();
                arrows.insert(
                    v.clone(),
                    hocolim_sobj_map(&diagonals[j], &restricted[j], &diagonals[j2], &f, &pointwise)?,
                );
            }
            Ok(Diagram::Sobj(SobjDiagram::new(
                j_cat.clone(),
                values,
                arrows,
            )?))
        }
    }
}

/// Homotopy right Kan extension along `alpha`: value at `j` is the homotopy
/// limit over the comma category `j / alpha`.
pub fn hokan_right(
    alpha: &FinFunctor,
    d: &Diagram,
    trunc: usize,
    budget: &mut Budget,
) -> Result<Diagram, WfsError> {
    let j_cat = &alpha.target;
    let commas: BTreeMap<String, FunctorComma> = j_cat
        .objects()
        .iter()
        .map(|j| functor_under(alpha, j).map(|c| (j.clone(), c)))
        .collect::<Result<_, _>>()?;
    match d {
        Diagram::SSet(d) => {
            let mut ends = BTreeMap::new();
            for j in j_cat.objects() {
                let r = restricted_sset(d, &commas[j])?;
                ends.insert(j.clone(), holim_sset(&r, trunc, budget)?);
            }
            let values: BTreeMap<String, Arc<FinSimplicialSet>> = ends
                .iter()
                .map(|(j, e)| (j.clone(), e.object.clone()))
                .collect();
            let mut arrows = BTreeMap::new();
            for v in j_cat.morphism_ids() {
                if j_cat.is_identity(v) {
                    continue;
                }
                let (j, j2) = j_cat.endpoints(v).expect("validated category");
                // precomposition with v carries `j2`-cones to `j`-cones
                let g = comma_transport(&commas[j2], &commas[j], alpha, v, true)?;
                arrows.insert(v.clone(), end_restrict_sset(&ends[j], &ends[j2], &g)?);
            }
            Ok(Diagram::SSet(SsetDiagram::new(
                j_cat.clone(),
                values,
                arrows,
            )?))
        }
        Diagram::Sobj(d) => {
            let mut ends = BTreeMap::new();
            for j in j_cat.objects() {
                let r = restricted_sobj(d, &commas[j])?;
                ends.insert(j.clone(), holim_sobj(&r, trunc)?);
            }
            let values: BTreeMap<String, Arc<SimpObject>> = ends
                .iter()
                .map(|(j, e)| (j.clone(), e.object.clone()))
                .collect();
            let mut arrows = BTreeMap::new();
            for v in j_cat.morphism_ids() {
                if j_cat.is_identity(v) {
                    continue;
                }
                let (j, j2) = j_cat.endpoints(v).expect("validated category");
                let g = comma_transport(&commas[j2], &commas[j], alpha, v, true)?;
                arrows.insert(v.clone(), end_restrict_sobj(&ends[j], &ends[j2], &g)?);
            }
            Ok(Diagram::Sobj(SobjDiagram::new(
                j_cat.clone(),
                values,
                arrows,
            )?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coprod::find_coprod_isomorphism;
    use crate::sset::homology::{homology, pi0};
    use crate::sset::lifting::{constant_map, to_point};
    use crate::sset::limits::coproduct;
    use crate::sset::maps::find_isomorphism;

    fn discrete(names: &[&str]) -> Arc<FinCategory> {
        let objects: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let morphisms = objects
            .iter()
            .map(|o| (format!("id{o}"), (o.clone(), o.clone())))
            .collect();
        let identities = objects.iter().map(|o| (o.clone(), format!("id{o}"))).collect();
        FinCategory::new(objects, morphisms, identities, BTreeMap::new())
            .unwrap()
            .into()
    }

    fn z2() -> Arc<FinCategory> {
        FinCategory::new(
            vec!["x".into()],
            BTreeMap::from([
                ("g".into(), ("x".into(), "x".into())),
                ("idx".into(), ("x".into(), "x".into())),
            ]),
            BTreeMap::from([("x".into(), "idx".into())]),
            BTreeMap::from([(("g".into(), "g".into()), "idx".into())]),
        )
        .unwrap()
        .into()
    }

    /// The span diagram whose homotopy colimit is a circle: two points over
    /// the feet, a point at each arm.
    fn circle_span() -> SsetDiagram {
        let shape: Arc<FinCategory> = FinCategory::span().into();
        let pt = FinSimplicialSet::delta(0).shared();
        let two = FinSimplicialSet::boundary(1).shared();
        let values = BTreeMap::from([
            ("a".to_string(), pt.clone()),
            ("b".to_string(), pt.clone()),
            ("c".to_string(), two.clone()),
        ]);
        let arrows = BTreeMap::from([
            ("l".to_string(), SSetMap::terminal_map(two.clone(), pt.clone())),
            ("r".to_string(), SSetMap::terminal_map(two, pt)),
        ]);
        SsetDiagram::new(shape, values, arrows).unwrap()
    }

    #[test]
    fn discrete_hocolim_is_coproduct() {
        let shape = discrete(&["u", "v"]);
        let values = BTreeMap::from([
            ("u".to_string(), FinSimplicialSet::delta(0).shared()),
            ("v".to_string(), FinSimplicialSet::boundary(1).shared()),
        ]);
        let d = SsetDiagram::new(shape, values.clone(), BTreeMap::new()).unwrap();
        let h = hocolim_sset(&d, 2).unwrap();
        let (cop, _) = coproduct(&[values["u"].clone(), values["v"].clone()]);
        assert!(find_isomorphism(&h.object, &cop).is_some());
    }

    #[test]
    fn span_hocolim_is_a_circle() {
        let d = circle_span();
        let h = hocolim_sset(&d, 3).unwrap();
        let profile = homology(&h.object, 3);
        assert_eq!(profile.betti[0], 1);
        assert_eq!(profile.betti[1], 1);
        assert_eq!(profile.betti.get(2).copied().unwrap_or(0), 0);
        assert!(profile.torsion.iter().all(|t| t.is_empty()));
    }

    #[test]
    fn diagonal_matches_coend_on_span() {
        let d = circle_span();
        let h = hocolim_sset(&d, 3).unwrap();
        let c = coend_hocolim_sset(&d, 3).unwrap();
        assert!(find_isomorphism(&h.object, &c).is_some());
    }

    #[test]
    fn cofinality_terminal_object() {
        // constant diagram over the arrow category: hocolim is the value
        let shape: Arc<FinCategory> = FinCategory::arrow().into();
        let s1 = FinSimplicialSet::circle().shared();
        let values = BTreeMap::from([("a".to_string(), s1.clone()), ("b".to_string(), s1.clone())]);
        let arrows = BTreeMap::from([("f".to_string(), SSetMap::identity(s1.clone()))]);
        let d = SsetDiagram::new(shape, values, arrows).unwrap();
        let h = hocolim_sset(&d, 3).unwrap();
        assert_eq!(homology(&h.object, 3), homology(&s1, 3));
    }

    #[test]
    fn discrete_holim_is_product() {
        let shape = discrete(&["u", "v"]);
        let two = FinSimplicialSet::boundary(1).shared();
        let values =
            BTreeMap::from([("u".to_string(), two.clone()), ("v".to_string(), two.clone())]);
        let d = SsetDiagram::new(shape, values, BTreeMap::new()).unwrap();
        let mut budget = Budget::new(100_000_000);
        let h = holim_sset(&d, 2, &mut budget).unwrap();
        let p = Product::new(&two, &two).unwrap();
        assert!(find_isomorphism(&h.object, &p.object).is_some());
    }

    #[test]
    fn terminal_shape_holim_is_the_value() {
        let shape: Arc<FinCategory> = FinCategory::terminal().into();
        let v = FinSimplicialSet::boundary(2).shared();
        let d = SsetDiagram::new(
            shape,
            BTreeMap::from([("*".to_string(), v.clone())]),
            BTreeMap::new(),
        )
        .unwrap();
        let mut budget = Budget::new(100_000_000);
        let h = holim_sset(&d, 2, &mut budget).unwrap();
        assert!(find_isomorphism(&h.object, &v).is_some());
    }

    #[test]
    fn loops_on_a_group_nerve_have_group_many_components() {
        // cospan * -> K(Z/2) <- *: the homotopy pullback is the loop space
        let shape: Arc<FinCategory> = FinCategory::cospan().into();
        let pt = FinSimplicialSet::delta(0).shared();
        let kg = crate::fincat::nerve(&z2(), 3).unwrap().shared();
        let values = BTreeMap::from([
            ("a".to_string(), pt.clone()),
            ("b".to_string(), pt.clone()),
            ("c".to_string(), kg.clone()),
        ]);
        let arrows = BTreeMap::from([
            ("l".to_string(), constant_map(pt.clone(), kg.clone(), "x")),
            ("r".to_string(), constant_map(pt.clone(), kg.clone(), "x")),
        ]);
        let d = SsetDiagram::new(shape, values, arrows).unwrap();
        let mut budget = Budget::new(100_000_000);
        let h = holim_sset(&d, 2, &mut budget).unwrap();
        assert_eq!(pi0(&h.object).len(), 2);
    }

    #[test]
    fn group_nerve_is_kan() {
        let kg = crate::fincat::nerve(&z2(), 3).unwrap().shared();
        let mut budget = Budget::new(100_000_000);
        let r = crate::sset::lifting::is_kan_fibration_to(&to_point(kg), 3, &mut budget).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn hokan_left_collapse_to_hocolim() {
        let d = circle_span();
        let span: Arc<FinCategory> = d.shape.clone();
        let terminal: Arc<FinCategory> = FinCategory::terminal().into();
        let obj_map = span.objects().iter().map(|o| (o.clone(), "*".to_string())).collect();
        let mor_map = span.morphism_ids().map(|m| (m.clone(), "id*".to_string())).collect();
        let alpha = FinFunctor::new(span, terminal, obj_map, mor_map).unwrap();
        let out = hokan_left(&alpha, &Diagram::SSet(d.clone()), 3).unwrap();
        let Diagram::SSet(out) = out else {
            panic!("value kind preserved")
        };
        let h = hocolim_sset(&d, 3).unwrap();
        assert!(find_isomorphism(&out.values["*"], &h.object).is_some());
    }

    #[test]
    fn hokan_left_along_point_inclusion() {
        // {a} into (a -> b): the extension at b is the value at a
        let single = discrete(&["a"]);
        let arrow: Arc<FinCategory> = FinCategory::arrow().into();
        let alpha = FinFunctor::new(
            single.clone(),
            arrow,
            BTreeMap::from([("a".to_string(), "a".to_string())]),
            BTreeMap::from([("ida".to_string(), "ida".to_string())]),
        )
        .unwrap();
        let v = FinSimplicialSet::boundary(1).shared();
        let d = SsetDiagram::new(
            single,
            BTreeMap::from([("a".to_string(), v.clone())]),
            BTreeMap::new(),
        )
        .unwrap();
        let out = hokan_left(&alpha, &Diagram::SSet(d), 2).unwrap();
        let Diagram::SSet(out) = out else {
            panic!("value kind preserved")
        };
        assert!(find_isomorphism(&out.values["b"], &v).is_some());
    }

    #[test]
    fn hokan_right_collapse_to_holim() {
        let shape = discrete(&["u", "v"]);
        let two = FinSimplicialSet::boundary(1).shared();
        let d = SsetDiagram::new(
            shape.clone(),
            BTreeMap::from([("u".to_string(), two.clone()), ("v".to_string(), two.clone())]),
            BTreeMap::new(),
        )
        .unwrap();
        let terminal: Arc<FinCategory> = FinCategory::terminal().into();
        let obj_map = shape.objects().iter().map(|o| (o.clone(), "*".to_string())).collect();
        let mor_map = shape.morphism_ids().map(|m| (m.clone(), "id*".to_string())).collect();
        let alpha = FinFunctor::new(shape, terminal, obj_map, mor_map).unwrap();
        let mut budget = Budget::new(100_000_000);
        let out = hokan_right(&alpha, &Diagram::SSet(d.clone()), 2, &mut budget).unwrap();
        let Diagram::SSet(out) = out else {
            panic!("value kind preserved")
        };
        let h = holim_sset(&d, 2, &mut budget).unwrap();
        assert!(find_isomorphism(&out.values["*"], &h.object).is_some());
    }

    #[test]
    fn sobj_hocolim_discrete_is_coproduct() {
        let shape = discrete(&["u", "v"]);
        let a = CoprodObject::embed(vec!["e".into()]);
        let b = CoprodObject::embed(vec!["f".into(), "g".into()]);
        let values = BTreeMap::from([
            ("u".to_string(), Arc::new(SimpObject::constant(&a, 2))),
            ("v".to_string(), Arc::new(SimpObject::constant(&b, 2))),
        ]);
        let d = SobjDiagram::new(shape, values, BTreeMap::new()).unwrap();
        let h = hocolim_sobj(&d, 2).unwrap();
        h.object.validate().unwrap();
        let (expected, _) = coprod_coproduct(&[&a, &b]);
        assert!(find_coprod_isomorphism(&h.object.levels[0], &expected).is_some());
    }

    #[test]
    fn sobj_holim_terminal_shape_is_the_value() {
        let shape: Arc<FinCategory> = FinCategory::terminal().into();
        let a = CoprodObject::embed(vec!["e".into(), "f".into()]);
        let x = Arc::new(SimpObject::constant(&a, 2));
        let d = SobjDiagram::new(
            shape,
            BTreeMap::from([("*".to_string(), x)]),
            BTreeMap::new(),
        )
        .unwrap();
        let h = holim_sobj(&d, 2).unwrap();
        h.object.validate().unwrap();
        for n in 0..=2 {
            assert!(find_coprod_isomorphism(&h.object.levels[n], &a).is_some());
        }
    }

    #[test]
    fn diagram_json_round_trip() {
        let d = circle_span();
        let v = d.to_json();
        let back = Diagram::from_json(&v).unwrap();
        let Diagram::SSet(back) = back else {
            panic!("kind preserved")
        };
        assert_eq!(back.values.len(), 3);
        assert_eq!(back.arrows.len(), 2);
    }

    #[test]
    fn non_finite_shape_is_rejected() {
        let shape: Arc<FinCategory> = FinCategory::idempotent().into();
        let pt = FinSimplicialSet::delta(0).shared();
        let d = SsetDiagram::new(
            shape,
            BTreeMap::from([("x".to_string(), pt.clone())]),
            BTreeMap::from([("e".to_string(), SSetMap::identity(pt))]),
        )
        .unwrap();
        let mut budget = Budget::new(100_000_000);
        assert!(holim_sset(&d, 2, &mut budget).is_err());
    }
}

//! The free coproduct completion of a finite-set base: set-indexed families
//! of finite sets, the embedding/collapse adjunction, finite limits computed
//! componentwise, and an extensivity verifier with a wedge-style
//! counterexample base.

use crate::wfs::{enumerate_set_maps, FinSetMap, WfsError};
use serde_json::{json, Map as JsonMap, Value};
use std::collections::{BTreeMap, BTreeSet};

/// An object of the completion: a finite index set with a finite set per
/// index. Empty components are meaningful and are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoprodObject {
    pub index: Vec<String>,
    pub family: BTreeMap<String, Vec<String>>,
}

impl CoprodObject {
    pub fn new(
        mut index: Vec<String>,
        family: BTreeMap<String, Vec<String>>,
    ) -> Result<CoprodObject, WfsError> {
        index.sort();
        index.dedup();
        for x in &index {
            if !family.contains_key(x) {
                return Err(WfsError::Other(format!("index {x:?} has no family member")));
            }
        }
        if family.len() != index.len() {
            return Err(WfsError::Other("family keys must match the index set".into()));
        }
        let family = family
            .into_iter()
            .map(|(k, mut v)| {
                v.sort();
                v.dedup();
                (k, v)
            })
            .collect();
        Ok(CoprodObject { index, family })
    }

    /// The image of a base object under the full embedding: a singleton
    /// family.
    pub fn embed(s: Vec<String>) -> CoprodObject {
        CoprodObject::new(vec!["*".into()], BTreeMap::from([("*".into(), s)]))
            .expect("singleton family is valid")
    }

    pub fn initial() -> CoprodObject {
        CoprodObject::new(Vec::new(), BTreeMap::new()).expect("empty family is valid")
    }

    pub fn terminal() -> CoprodObject {
        CoprodObject::embed(vec!["*".into()])
    }

    /// Total size: the sum of the component sizes.
    pub fn total(&self) -> usize {
        self.family.values().map(Vec::len).sum()
    }

    /// Left adjoint of the embedding: the disjoint union of the family,
    /// with elements tagged by their component.
    pub fn collapse(&self) -> Vec<String> {
        let mut out = Vec::new();
        for x in &self.index {
            for e in &self.family[x] {
                out.push(format!("{x}:{e}"));
            }
        }
        out.sort();
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "index": self.index,
            "family": self
                .family
                .iter()
                .map(|(k, v)| (k.clone(), json!(v)))
                .collect::<JsonMap<_, _>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<CoprodObject, WfsError> {
        let index = v
            .get("index")
            .and_then(Value::as_array)
            .ok_or_else(|| WfsError::Other("missing \"index\" list".into()))?
            .iter()
            .map(|s| {
                s.as_str()
                    .map(String::from)
                    .ok_or_else(|| WfsError::Other("indices must be strings".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let family = v
            .get("family")
            .and_then(Value::as_object)
            .ok_or_else(|| WfsError::Other("missing \"family\" object".into()))?
            .iter()
            .map(|(k, val)| {
                let elems = val
                    .as_array()
                    .ok_or_else(|| WfsError::Other("family members must be lists".into()))?
                    .iter()
                    .map(|s| {
                        s.as_str()
                            .map(String::from)
                            .ok_or_else(|| WfsError::Other("elements must be strings".into()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((k.clone(), elems))
            })
            .collect::<Result<BTreeMap<_, _>, WfsError>>()?;
        CoprodObject::new(index, family)
    }
}

/// A morphism of families: an index map plus one base map per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoprodMorphism {
    pub source: CoprodObject,
    pub target: CoprodObject,
    pub index_map: BTreeMap<String, String>,
    pub components: BTreeMap<String, FinSetMap>,
}

impl CoprodMorphism {
    pub fn new(
        source: CoprodObject,
        target: CoprodObject,
        index_map: BTreeMap<String, String>,
        components: BTreeMap<String, FinSetMap>,
    ) -> Result<CoprodMorphism, WfsError> {
        for x in &source.index {
            let y = index_map
                .get(x)
                .ok_or_else(|| WfsError::Other(format!("index {x:?} has no image")))?;
            if !target.index.contains(y) {
                return Err(WfsError::Other(format!("index image {y:?} is not in the target")));
            }
            let comp = components
                .get(x)
                .ok_or_else(|| WfsError::Other(format!("index {x:?} has no component map")))?;
            if comp.source != source.family[x] || comp.target != target.family[y] {
                return Err(WfsError::Other(format!(
                    "component at {x:?} has mismatched endpoints"
                )));
            }
        }
        Ok(CoprodMorphism {
            source,
            target,
            index_map,
            components,
        })
    }

    pub fn identity(obj: &CoprodObject) -> CoprodMorphism {
        let index_map = obj.index.iter().map(|x| (x.clone(), x.clone())).collect();
        let components = obj
            .index
            .iter()
            .map(|x| (x.clone(), FinSetMap::identity(obj.family[x].clone())))
            .collect();
        CoprodMorphism::new(obj.clone(), obj.clone(), index_map, components).expect("valid")
    }

    /// `self` then `next`.
    pub fn then(&self, next: &CoprodMorphism) -> Result<CoprodMorphism, WfsError> {
        if self.target != next.source {
            return Err(WfsError::Other("family morphisms do not compose".into()));
        }
        let index_map = self
            .index_map
            .iter()
            .map(|(x, y)| (x.clone(), next.index_map[y].clone()))
            .collect();
        let components = self
            .source
            .index
            .iter()
            .map(|x| {
                let y = &self.index_map[x];
                Ok((x.clone(), self.components[x].then(&next.components[y])?))
            })
            .collect::<Result<_, WfsError>>()?;
        CoprodMorphism::new(self.source.clone(), next.target.clone(), index_map, components)
    }

    /// The underlying map of tagged disjoint unions.
    pub fn collapse(&self) -> FinSetMap {
        let map = self
            .source
            .index
            .iter()
            .flat_map(|x| {
                let y = &self.index_map[x];
                self.source.family[x].iter().map(move |e| {
                    (format!("{x}:{e}"), format!("{y}:{}", self.components[x].map[e]))
                })
            })
            .collect();
        FinSetMap::new(self.source.collapse(), self.target.collapse(), map).expect("valid")
    }

    pub fn is_iso(&self) -> bool {
        let imgs: BTreeSet<&String> = self.index_map.values().collect();
        imgs.len() == self.source.index.len()
            && imgs.len() == self.target.index.len()
            && self
                .components
                .values()
                .all(|c| c.is_injective() && c.is_surjective())
    }

    /// A canonical serialization, used for deterministic hom-set element ids.
    pub fn key(&self) -> String {
        self.source
            .index
            .iter()
            .map(|x| {
                let comp = self.components[x]
                    .map
                    .iter()
                    .map(|(e, v)| format!("{e}>{v}"))
                    .collect::<Vec<_>>()
                    .join(",");
                format!("{x}~{}[{comp}]", self.index_map[x])
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "index_map": self
                .index_map
                .iter()
                .map(|(k, v)| (k.clone(), json!(v)))
                .collect::<JsonMap<_, _>>(),
            "components": self
                .components
                .iter()
                .map(|(k, v)| (k.clone(), v.to_json()))
                .collect::<JsonMap<_, _>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<CoprodMorphism, WfsError> {
        let source = CoprodObject::from_json(
            v.get("source").ok_or_else(|| WfsError::Other("missing \"source\"".into()))?,
        )?;
        let target = CoprodObject::from_json(
            v.get("target").ok_or_else(|| WfsError::Other("missing \"target\"".into()))?,
        )?;
        let index_map = v
            .get("index_map")
            .and_then(Value::as_object)
            .ok_or_else(|| WfsError::Other("missing \"index_map\"".into()))?
            .iter()
            .map(|(k, val)| {
                val.as_str()
                    .map(|s| (k.clone(), s.to_string()))
                    .ok_or_else(|| WfsError::Other("index images must be strings".into()))
            })
            .collect::<Result<_, _>>()?;
        let components = v
            .get("components")
            .and_then(Value::as_object)
            .ok_or_else(|| WfsError::Other("missing \"components\"".into()))?
            .iter()
            .map(|(k, val)| Ok((k.clone(), FinSetMap::from_json(val)?)))
            .collect::<Result<_, WfsError>>()?;
        CoprodMorphism::new(source, target, index_map, components)
    }
}

/// All morphisms between two families, in deterministic order: per source
/// index, a target index and a component map.
pub fn enumerate_coprod_morphisms(a: &CoprodObject, b: &CoprodObject) -> Vec<CoprodMorphism> {
    // options per source index
    let mut per_index: Vec<Vec<(String, FinSetMap)>> = Vec::new();
    for x in &a.index {
        let mut opts = Vec::new();
        for y in &b.index {
            for m in enumerate_set_maps(&a.family[x], &b.family[y]) {
                opts.push((y.clone(), m));
            }
        }
        if opts.is_empty() {
            return Vec::new();
        }
        per_index.push(opts);
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; a.index.len()];
    loop {
        let mut index_map = BTreeMap::new();
        let mut components = BTreeMap::new();
        for (k, x) in a.index.iter().enumerate() {
            let (y, m) = &per_index[k][choice[k]];
            index_map.insert(x.clone(), y.clone());
            components.insert(x.clone(), m.clone());
        }
        out.push(
            CoprodMorphism::new(a.clone(), b.clone(), index_map, components).expect("valid"),
        );
        let mut k = a.index.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < per_index[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// An isomorphism of families exists exactly when the multisets of
/// component sizes agree, so one can be built directly by pairing the
/// components in order of size.
pub fn find_coprod_isomorphism(a: &CoprodObject, b: &CoprodObject) -> Option<CoprodMorphism> {
    if a.index.len() != b.index.len() {
        return None;
    }
    let mut av: Vec<&String> = a.index.iter().collect();
    let mut bv: Vec<&String> = b.index.iter().collect();
    av.sort_by_key(|x| (a.family[*x].len(), (*x).clone()));
    bv.sort_by_key(|y| (b.family[*y].len(), (*y).clone()));
    let mut index_map = BTreeMap::new();
    let mut components = BTreeMap::new();
    for (x, y) in av.iter().zip(&bv) {
        let fx = &a.family[*x];
        let fy = &b.family[*y];
        if fx.len() != fy.len() {
            return None;
        }
        let map = fx.iter().cloned().zip(fy.iter().cloned()).collect();
        let m = FinSetMap::new(fx.clone(), fy.clone(), map).ok()?;
        index_map.insert((*x).clone(), (*y).clone());
        components.insert((*x).clone(), m);
    }
    CoprodMorphism::new(a.clone(), b.clone(), index_map, components).ok()
}

// ---------------------------------------------------------------------------
// colimits and limits in the completion
// ---------------------------------------------------------------------------

/// Coproduct of families: disjoint union of index sets, tagged `c{k}:`.
pub fn coprod_coproduct(parts: &[&CoprodObject]) -> (CoprodObject, Vec<CoprodMorphism>) {
    let mut index = Vec::new();
    let mut family = BTreeMap::new();
    for (k, p) in parts.iter().enumerate() {
        for x in &p.index {
            index.push(format!("c{k}:{x}"));
            family.insert(format!("c{k}:{x}"), p.family[x].clone());
        }
    }
    let object = CoprodObject::new(index, family).expect("valid");
    let injections = parts
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let index_map = p.index.iter().map(|x| (x.clone(), format!("c{k}:{x}"))).collect();
            let components = p
                .index
                .iter()
                .map(|x| (x.clone(), FinSetMap::identity(p.family[x].clone())))
                .collect();
            CoprodMorphism::new((*p).clone(), object.clone(), index_map, components)
                .expect("valid")
        })
        .collect();
    (object, injections)
}

/// The morphism out of a coproduct with the given legs.
pub fn coprod_copair(
    object: &CoprodObject,
    parts: &[&CoprodObject],
    legs: &[CoprodMorphism],
) -> Result<CoprodMorphism, WfsError> {
    let target = legs
        .first()
        .map(|l| l.target.clone())
        .ok_or_else(|| WfsError::Other("copair needs at least one leg".into()))?;
    let mut index_map = BTreeMap::new();
    let mut components = BTreeMap::new();
    for (k, p) in parts.iter().enumerate() {
        for x in &p.index {
            index_map.insert(format!("c{k}:{x}"), legs[k].index_map[x].clone());
            components.insert(format!("c{k}:{x}"), legs[k].components[x].clone());
        }
    }
    CoprodMorphism::new(object.clone(), target, index_map, components)
}

/// Binary product: index pairs with componentwise base products.
pub fn coprod_product(
    a: &CoprodObject,
    b: &CoprodObject,
) -> (CoprodObject, CoprodMorphism, CoprodMorphism) {
    let pair_ix = |x: &str, y: &str| format!("({x},{y})");
    let pair_el = |s: &str, t: &str| format!("({s},{t})");
    let mut index = Vec::new();
    let mut family = BTreeMap::new();
    for x in &a.index {
        for y in &b.index {
            let elems = a.family[x]
                .iter()
                .flat_map(|s| b.family[y].iter().map(move |t| pair_el(s, t)))
                .collect();
            index.push(pair_ix(x, y));
            family.insert(pair_ix(x, y), elems);
        }
    }
    let object = CoprodObject::new(index, family).expect("valid");
    let project = |first: bool, into: &CoprodObject| -> CoprodMorphism {
        let mut index_map = BTreeMap::new();
        let mut components = BTreeMap::new();
        for x in &a.index {
            for y in &b.index {
                let ix = pair_ix(x, y);
                index_map.insert(ix.clone(), if first { x.clone() } else { y.clone() });
                let map = a.family[x]
                    .iter()
                    .flat_map(|s| {
                        b.family[y].iter().map(move |t| {
                            (pair_el(s, t), if first { s.clone() } else { t.clone() })
                        })
                    })
                    .collect();
                components.insert(
                    ix.clone(),
                    FinSetMap::new(
                        object.family[&ix].clone(),
                        into.family[if first { x } else { y }].clone(),
                        map,
                    )
                    .expect("valid"),
                );
            }
        }
        CoprodMorphism::new(object.clone(), into.clone(), index_map, components).expect("valid")
    };
    let p1 = project(true, a);
    let p2 = project(false, b);
    (object, p1, p2)
}

/// Pairing into a binary product.
pub fn coprod_pair(
    product: &CoprodObject,
    f: &CoprodMorphism,
    g: &CoprodMorphism,
) -> Result<CoprodMorphism, WfsError> {
    if f.source != g.source {
        return Err(WfsError::Other("pairing legs must share a source".into()));
    }
    let index_map: BTreeMap<String, String> = f
        .source
        .index
        .iter()
        .map(|x| (x.clone(), format!("({},{})", f.index_map[x], g.index_map[x])))
        .collect();
    let components = f
        .source
        .index
        .iter()
        .map(|x| {
            let target_ix = &index_map[x];
            let map = f.source.family[x]
                .iter()
                .map(|e| {
                    (
                        e.clone(),
                        format!("({},{})", f.components[x].map[e], g.components[x].map[e]),
                    )
                })
                .collect();
            Ok((
                x.clone(),
                FinSetMap::new(
                    f.source.family[x].clone(),
                    product.family[target_ix].clone(),
                    map,
                )?,
            ))
        })
        .collect::<Result<_, WfsError>>()?;
    CoprodMorphism::new(f.source.clone(), product.clone(), index_map, components)
}

/// Pullback of `f: A -> C` and `g: B -> C`: index pairs over a common index
/// with componentwise base pullbacks (subobjects of the product).
pub fn coprod_pullback(
    f: &CoprodMorphism,
    g: &CoprodMorphism,
) -> Result<(CoprodObject, CoprodMorphism, CoprodMorphism), WfsError> {
    if f.target != g.target {
        return Err(WfsError::Other("pullback legs must share a target".into()));
    }
    let pair_ix = |x: &str, y: &str| format!("({x},{y})");
    let pair_el = |s: &str, t: &str| format!("({s},{t})");
    let mut index = Vec::new();
    let mut family = BTreeMap::new();
    for x in &f.source.index {
        for y in &g.source.index {
            if f.index_map[x] != g.index_map[y] {
                continue;
            }
            let elems = f.source.family[x]
                .iter()
                .flat_map(|s| {
                    g.source.family[y].iter().filter_map(move |t| {
                        (f.components[x].map[s] == g.components[y].map[t])
                            .then(|| pair_el(s, t))
                    })
                })
                .collect();
            index.push(pair_ix(x, y));
            family.insert(pair_ix(x, y), elems);
        }
    }
    let object = CoprodObject::new(index, family)?;
    let project = |first: bool, into: &CoprodObject| -> CoprodMorphism {
        let mut index_map = BTreeMap::new();
        let mut components = BTreeMap::new();
        for ix in &object.index {
            let (x, y) = split_pair(ix);
            index_map.insert(ix.clone(), if first { x.clone() } else { y.clone() });
            let map = object.family[ix]
                .iter()
                .map(|e| {
                    let (s, t) = split_pair(e);
                    (e.clone(), if first { s } else { t })
                })
                .collect();
            components.insert(
                ix.clone(),
                FinSetMap::new(
                    object.family[ix].clone(),
                    into.family[if first { &x } else { &y }].clone(),
                    map,
                )
                .expect("valid"),
            );
        }
        CoprodMorphism::new(object.clone(), into.clone(), index_map, components).expect("valid")
    };
    let p1 = project(true, &f.source);
    let p2 = project(false, &g.source);
    Ok((object, p1, p2))
}

/// Equalizer of a parallel pair: the indices where the index maps agree,
/// with componentwise base equalizers, included back into the source.
pub fn coprod_equalizer(
    f: &CoprodMorphism,
    g: &CoprodMorphism,
) -> Result<(CoprodObject, CoprodMorphism), WfsError> {
    if f.source != g.source || f.target != g.target {
        return Err(WfsError::Other("equalizer needs a parallel pair".into()));
    }
    let mut index = Vec::new();
    let mut family = BTreeMap::new();
    for x in &f.source.index {
        if f.index_map[x] != g.index_map[x] {
            continue;
        }
        let elems: Vec<String> = f.source.family[x]
            .iter()
            .filter(|e| f.components[x].map[*e] == g.components[x].map[*e])
            .cloned()
            .collect();
        index.push(x.clone());
        family.insert(x.clone(), elems);
    }
    let object = CoprodObject::new(index, family)?;
    let index_map = object.index.iter().map(|x| (x.clone(), x.clone())).collect();
    let components = object
        .index
        .iter()
        .map(|x| {
            let map = object.family[x].iter().map(|e| (e.clone(), e.clone())).collect();
            Ok((
                x.clone(),
                FinSetMap::new(object.family[x].clone(), f.source.family[x].clone(), map)?,
            ))
        })
        .collect::<Result<_, WfsError>>()?;
    let include = CoprodMorphism::new(object.clone(), f.source.clone(), index_map, components)?;
    Ok((object, include))
}

/// Splits `"(left,right)"` at the top-level comma.
fn split_pair(s: &str) -> (String, String) {
    let inner = &s[1..s.len() - 1];
    let mut depth = 0usize;
    for (k, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                return (inner[..k].to_string(), inner[k + 1..].to_string());
            }
            _ => {}
        }
    }
    panic!("malformed pair label {s:?}");
}

/// Pushout computed in the equivalent arrow-category picture: pushouts of
/// the index sets and of the total sets, with fibers reassembled.
pub fn coprod_pushout(
    f: &CoprodMorphism,
    g: &CoprodMorphism,
) -> Result<(CoprodObject, CoprodMorphism, CoprodMorphism), WfsError> {
    if f.source != g.source {
        return Err(WfsError::Other("pushout legs must share a source".into()));
    }
    // tagged copies of the target index/element sets, glued along the source
    let index_push = set_pushout(
        &f.source.index,
        &f.target.index,
        &g.target.index,
        &f.index_map,
        &g.index_map,
    );
    let total_f: BTreeMap<String, String> = f.collapse().map;
    let total_g = g.collapse().map;
    let elem_push = set_pushout(
        &f.source.collapse(),
        &f.target.collapse(),
        &g.target.collapse(),
        &total_f,
        &total_g,
    );
    // which index each tagged element of a family belongs to
    let owner = |obj: &CoprodObject| -> BTreeMap<String, String> {
        obj.index
            .iter()
            .flat_map(|x| obj.family[x].iter().map(move |e| (format!("{x}:{e}"), x.clone())))
            .collect()
    };
    let owner_l = owner(&f.target);
    let owner_r = owner(&g.target);
    // fibers: each glued element sits over the glued index of its tag
    let index_of = |side: char, tagged: &str| -> String {
        let x = match side {
            'l' => &owner_l[tagged],
            _ => &owner_r[tagged],
        };
        elem_to_class(&index_push, side, x)
    };
    let mut family: BTreeMap<String, Vec<String>> = index_push
        .classes
        .iter()
        .map(|c| (c.clone(), Vec::new()))
        .collect();
    for (class, members) in &elem_push.members {
        // all members sit over the same glued index
        let (side, raw) = members.first().expect("nonempty class").clone();
        family
            .get_mut(&index_of(side, &raw))
            .expect("index class present")
            .push(class.clone());
    }
    let object = CoprodObject::new(index_push.classes.clone(), family)?;
    let leg = |side: char, from: &CoprodObject| -> Result<CoprodMorphism, WfsError> {
        let index_map: BTreeMap<String, String> = from
            .index
            .iter()
            .map(|x| (x.clone(), elem_to_class(&index_push, side, x)))
            .collect();
        let components = from
            .index
            .iter()
            .map(|x| {
                let y = &index_map[x];
                let map = from.family[x]
                    .iter()
                    .map(|e| {
                        (
                            e.clone(),
                            elem_to_class(&elem_push, side, &format!("{x}:{e}")),
                        )
                    })
                    .collect();
                Ok((
                    x.clone(),
                    FinSetMap::new(from.family[x].clone(), object.family[y].clone(), map)?,
                ))
            })
            .collect::<Result<_, WfsError>>()?;
        CoprodMorphism::new(from.clone(), object.clone(), index_map, components)
    };
    let left = leg('l', &f.target)?;
    let right = leg('r', &g.target)?;
    Ok((object, left, right))
}

struct SetPushout {
    classes: Vec<String>,
    /// class label -> tagged members (side, original element)
    members: BTreeMap<String, Vec<(char, String)>>,
    class_of: BTreeMap<(char, String), String>,
}

fn elem_to_class(p: &SetPushout, side: char, elem: &str) -> String {
    p.class_of[&(side, elem.to_string())].clone()
}

/// Pushout of `B <- A -> C` in finite sets by union-find on `B ⊔ C`.
fn set_pushout(
    a: &[String],
    b: &[String],
    c: &[String],
    f: &BTreeMap<String, String>,
    g: &BTreeMap<String, String>,
) -> SetPushout {
    let mut nodes: Vec<(char, String)> = Vec::new();
    nodes.extend(b.iter().map(|x| ('l', x.clone())));
    nodes.extend(c.iter().map(|x| ('r', x.clone())));
    let pos: BTreeMap<(char, String), usize> = nodes
        .iter()
        .cloned()
        .enumerate()
        .map(|(k, n)| (n, k))
        .collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(parent: &mut Vec<usize>, mut k: usize) -> usize {
        while parent[k] != k {
            parent[k] = parent[parent[k]];
            k = parent[k];
        }
        k
    }
    for x in a {
        let l = pos[&('l', f[x].clone())];
        let r = pos[&('r', g[x].clone())];
        let (rl, rr) = (find(&mut parent, l), find(&mut parent, r));
        if rl != rr {
            let keep = rl.min(rr);
            parent[rl.max(rr)] = keep;
        }
    }
    // canonical labels: lexicographic minimum of "side:elem" over the class
    let mut groups: BTreeMap<usize, Vec<(char, String)>> = BTreeMap::new();
    for (k, n) in nodes.iter().enumerate() {
        groups.entry(find(&mut parent, k)).or_default().push(n.clone());
    }
    let mut classes = Vec::new();
    let mut members = BTreeMap::new();
    let mut class_of = BTreeMap::new();
    for (_, mut g) in groups {
        g.sort();
        let label = format!("{}{}{}", g[0].0, '|', g[0].1);
        classes.push(label.clone());
        for m in &g {
            class_of.insert(m.clone(), label.clone());
        }
        members.insert(label, g);
    }
    classes.sort();
    SetPushout {
        classes,
        members,
        class_of,
    }
}

// ---------------------------------------------------------------------------
// projective-type factorization
// ---------------------------------------------------------------------------

/// Factors `m: A -> Y` as the injection `A -> A ⊔ C` followed by the
/// fold `[m, incl]: A ⊔ C -> Y`, where the cover `C` consists only of the
/// target components not already hit surjectively by a component of `m`.
/// The left leg is a coproduct injection and the right leg is split epi;
/// when `m` is already split epi the cover is empty and the middle object
/// is `A` itself.
pub fn factor_projective_completion(
    m: &CoprodMorphism,
) -> Result<(CoprodObject, CoprodMorphism, CoprodMorphism), WfsError> {
    let missed: Vec<String> = m
        .target
        .index
        .iter()
        .filter(|y| {
            !m.source
                .index
                .iter()
                .any(|x| &&m.index_map[x] == y && m.components[x].is_surjective())
        })
        .cloned()
        .collect();
    let cover = CoprodObject::new(
        missed.clone(),
        missed
            .iter()
            .map(|y| (y.clone(), m.target.family[y].clone()))
            .collect(),
    )?;
    let include = CoprodMorphism::new(
        cover.clone(),
        m.target.clone(),
        missed.iter().map(|y| (y.clone(), y.clone())).collect(),
        missed
            .iter()
            .map(|y| {
                (
                    y.clone(),
                    FinSetMap::identity(m.target.family[y].clone()),
                )
            })
            .collect(),
    )?;
    let (mid, injections) = coprod_coproduct(&[&m.source, &cover]);
    let left = injections[0].clone();
    let right = coprod_copair(&mid, &[&m.source, &cover], &[m.clone(), include])?;
    Ok((mid, left, right))
}

/// Is `m` (isomorphic to) a canonical coproduct injection? In the
/// completion this means: injective on indices, each component an
/// isomorphism.
pub fn is_coprod_injection(m: &CoprodMorphism) -> bool {
    let imgs: BTreeSet<&String> = m.index_map.values().collect();
    imgs.len() == m.source.index.len()
        && m.components.values().all(|c| c.is_injective() && c.is_surjective())
}

/// Is `m` a split epimorphism? Searched exhaustively.
pub fn is_split_epi_completion(m: &CoprodMorphism) -> Option<CoprodMorphism> {
    // sections can be chosen one target component at a time: pick the first
    // source component hitting it surjectively
    let mut index_map = BTreeMap::new();
    let mut components = BTreeMap::new();
    'target: for y in &m.target.index {
        for x in &m.source.index {
            if &m.index_map[x] != y {
                continue;
            }
            if let Some(sec) = m.components[x].section() {
                index_map.insert(y.clone(), x.clone());
                components.insert(y.clone(), sec);
                continue 'target;
            }
        }
        return None;
    }
    Some(
        CoprodMorphism::new(m.target.clone(), m.source.clone(), index_map, components)
            .expect("componentwise section is a morphism"),
    )
}

// ---------------------------------------------------------------------------
// extensivity verifier
// ---------------------------------------------------------------------------

/// A base category with chosen coproducts: either finite sets with disjoint
/// union, or "marked" finite sets whose chosen coproduct glues the marked
/// points together (a deliberately broken choice).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    FinSet,
    Wedge,
}

/// The marked element of the wedge base.
pub const MARK: &str = "*";

impl Base {
    /// Chosen binary coproduct with its injections.
    pub fn coproduct(&self, a: &[String], b: &[String]) -> (Vec<String>, FinSetMap, FinSetMap) {
        match self {
            Base::FinSet => {
                let obj: Vec<String> = a
                    .iter()
                    .map(|e| format!("l:{e}"))
                    .chain(b.iter().map(|e| format!("r:{e}")))
                    .collect();
                let inj = |side: &str, part: &[String]| {
                    let map = part.iter().map(|e| (e.clone(), format!("{side}:{e}"))).collect();
                    FinSetMap::new(part.to_vec(), obj.clone(), map).expect("valid")
                };
                (obj.clone(), inj("l", a), inj("r", b))
            }
            Base::Wedge => {
                // marked points are identified; everything else is tagged
                let obj: Vec<String> = std::iter::once(MARK.to_string())
                    .chain(a.iter().filter(|e| *e != MARK).map(|e| format!("l:{e}")))
                    .chain(b.iter().filter(|e| *e != MARK).map(|e| format!("r:{e}")))
                    .collect();
                let inj = |side: &str, part: &[String]| {
                    let map = part
                        .iter()
                        .map(|e| {
                            let img = if e == MARK {
                                MARK.to_string()
                            } else {
                                format!("{side}:{e}")
                            };
                            (e.clone(), img)
                        })
                        .collect();
                    FinSetMap::new(part.to_vec(), obj.clone(), map).expect("valid")
                };
                (obj.clone(), inj("l", a), inj("r", b))
            }
        }
    }

    /// A small deterministic corpus of objects (sets of size ≤ 4; the wedge
    /// base always includes the mark).
    pub fn corpus(&self) -> Vec<Vec<String>> {
        let raw: Vec<Vec<&str>> = vec![
            vec![],
            vec!["a"],
            vec!["a", "b"],
            vec!["a", "b", "c"],
            vec!["a", "b", "c", "d"],
        ];
        raw.into_iter()
            .map(|v| {
                let mut set: Vec<String> = v.into_iter().map(String::from).collect();
                if matches!(self, Base::Wedge) {
                    set.push(MARK.to_string());
                    set.sort();
                }
                set
            })
            .collect()
    }
}

/// Pullback of two maps into a common set, as pairs with the projections.
pub fn set_pullback(f: &FinSetMap, g: &FinSetMap) -> (Vec<String>, FinSetMap, FinSetMap) {
    let mut obj = Vec::new();
    let mut to_f = BTreeMap::new();
    let mut to_g = BTreeMap::new();
    for s in &f.source {
        for t in &g.source {
            if f.map[s] == g.map[t] {
                let e = format!("({s},{t})");
                obj.push(e.clone());
                to_f.insert(e.clone(), s.clone());
                to_g.insert(e, t.clone());
            }
        }
    }
    obj.sort();
    let p1 = FinSetMap::new(obj.clone(), f.source.clone(), to_f).expect("valid");
    let p2 = FinSetMap::new(obj.clone(), g.source.clone(), to_g).expect("valid");
    (obj, p1, p2)
}

#[derive(Debug, Clone)]
pub struct CheckVerdict {
    pub passed: bool,
    pub instances: usize,
    pub witness: Option<String>,
}

impl CheckVerdict {
    fn pass(instances: usize) -> CheckVerdict {
        CheckVerdict {
            passed: true,
            instances,
            witness: None,
        }
    }

    fn fail(instances: usize, witness: String) -> CheckVerdict {
        CheckVerdict {
            passed: false,
            instances,
            witness: Some(witness),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExtensivityReport {
    pub base: Base,
    pub disjointness: CheckVerdict,
    pub stability: CheckVerdict,
    pub hom_formula: CheckVerdict,
    pub collapse_limits: CheckVerdict,
}

impl ExtensivityReport {
    pub fn passed(&self) -> bool {
        self.disjointness.passed
            && self.stability.passed
            && self.hom_formula.passed
            && self.collapse_limits.passed
    }

    pub fn to_json(&self) -> Value {
        let check = |c: &CheckVerdict| {
            json!({
                "passed": c.passed,
                "instances": c.instances,
                "witness": c.witness,
            })
        };
        json!({
            "base": match self.base { Base::FinSet => "finset", Base::Wedge => "wedge" },
            "passed": self.passed(),
            "disjointness": check(&self.disjointness),
            "stability": check(&self.stability),
            "hom_formula": check(&self.hom_formula),
            "collapse_limits": check(&self.collapse_limits),
        })
    }
}

/// Runs the extensivity axioms over the base's corpus: disjointness of the
/// chosen coproducts, stability of coproducts under pullback, the
/// decomposition formula for maps into a coproduct, and preservation of
/// binary products by the collapse functor.
pub fn verify_extensive(base: Base) -> ExtensivityReport {
    let corpus = base.corpus();
    // 1. disjointness: injections are mono and their pullback is empty
    let mut disjointness = CheckVerdict::pass(0);
    'dis: for a in &corpus {
        for b in &corpus {
            let (_, ia, ib) = base.coproduct(a, b);
            disjointness.instances += 1;
            if !ia.is_injective() || !ib.is_injective() {
                disjointness = CheckVerdict::fail(
                    disjointness.instances,
                    format!("injection not mono for |A|={}, |B|={}", a.len(), b.len()),
                );
                break 'dis;
            }
            let (pb, _, _) = set_pullback(&ia, &ib);
            if !pb.is_empty() {
                disjointness = CheckVerdict::fail(
                    disjointness.instances,
                    format!(
                        "pullback of the two injections is not initial: contains {}",
                        pb.join(", ")
                    ),
                );
                break 'dis;
            }
        }
    }
    // 2. stability: pulling a map Z -> A ⊔ B back along the injections
    //    decomposes Z as the coproduct of the preimages
    let mut stability = CheckVerdict::pass(0);
    'sta: for a in corpus.iter().take(3) {
        for b in corpus.iter().take(3) {
            let (c, ia, ib) = base.coproduct(a, b);
            for z in corpus.iter().take(3) {
                for h in enumerate_set_maps(z, &c) {
                    stability.instances += 1;
                    let (za, pa, _) = set_pullback(&h, &ia);
                    let (zb, pbm, _) = set_pullback(&h, &ib);
                    // canonical map Z_A ⊔ Z_B -> Z must be a bijection
                    let (zc, ja, jb) = Base::FinSet.coproduct(&za, &zb);
                    let mut canon = BTreeMap::new();
                    for e in &za {
                        canon.insert(ja.map[e].clone(), pa.map[e].clone());
                    }
                    for e in &zb {
                        canon.insert(jb.map[e].clone(), pbm.map[e].clone());
                    }
                    let canon = FinSetMap::new(zc, z.clone(), canon).expect("valid");
                    if !canon.is_injective() || !canon.is_surjective() {
                        stability = CheckVerdict::fail(
                            stability.instances,
                            format!(
                                "preimages do not decompose Z: |Z_A|={}, |Z_B|={}, |Z|={}",
                                za.len(),
                                zb.len(),
                                z.len()
                            ),
                        );
                        break 'sta;
                    }
                }
            }
        }
    }
    // 3. hom formula: maps S -> A ⊔ B correspond to decompositions of S
    //    with a map out of each part
    let mut hom_formula = CheckVerdict::pass(0);
    'hom: for a in corpus.iter().take(3) {
        for b in corpus.iter().take(3) {
            let (c, ia, ib) = base.coproduct(a, b);
            for s in corpus.iter().take(3) {
                hom_formula.instances += 1;
                let direct = enumerate_set_maps(s, &c).len();
                // decompositions: each element chooses a side, then a map
                // into that side's object
                let mut assembled = 0usize;
                let sides = 2usize.checked_pow(s.len() as u32).unwrap_or(0);
                for mask in 0..sides.max(1) {
                    let (sa, sb): (Vec<(usize, String)>, Vec<(usize, String)>) = s
                        .iter()
                        .cloned()
                        .enumerate()
                        .partition(|(k, _)| mask >> k & 1 == 0);
                    let sa: Vec<String> = sa.into_iter().map(|(_, e)| e).collect();
                    let sb: Vec<String> = sb.into_iter().map(|(_, e)| e).collect();
                    if s.is_empty() && mask > 0 {
                        break;
                    }
                    assembled += enumerate_set_maps(&sa, a).len() * enumerate_set_maps(&sb, b).len();
                }
                // in a broken base the images through the injections can
                // coincide, so distinct decompositions assemble equal maps
                let mut images = BTreeSet::new();
                for mask in 0..sides.max(1) {
                    if s.is_empty() && mask > 0 {
                        break;
                    }
                    let (sa, sb): (Vec<(usize, String)>, Vec<(usize, String)>) = s
                        .iter()
                        .cloned()
                        .enumerate()
                        .partition(|(k, _)| mask >> k & 1 == 0);
                    let sa: Vec<String> = sa.into_iter().map(|(_, e)| e).collect();
                    let sb: Vec<String> = sb.into_iter().map(|(_, e)| e).collect();
                    for ma in enumerate_set_maps(&sa, a) {
                        for mb in enumerate_set_maps(&sb, b) {
                            let mut map = BTreeMap::new();
                            for e in &sa {
                                map.insert(e.clone(), ia.map[&ma.map[e]].clone());
                            }
                            for e in &sb {
                                map.insert(e.clone(), ib.map[&mb.map[e]].clone());
                            }
                            images.insert(
                                map.into_iter().map(|(k, v)| format!("{k}>{v}")).collect::<Vec<_>>().join(";"),
                            );
                        }
                    }
                }
                if assembled != direct || images.len() != direct {
                    hom_formula = CheckVerdict::fail(
                        hom_formula.instances,
                        format!(
                            "maps into the coproduct: {direct}; assembled from decompositions: {assembled} ({} distinct)",
                            images.len()
                        ),
                    );
                    break 'hom;
                }
            }
        }
    }
    // 4. collapse preserves binary products (on completion objects built
    //    from corpus components)
    let mut collapse_limits = CheckVerdict::pass(0);
    let completion_corpus: Vec<CoprodObject> = vec![
        CoprodObject::initial(),
        CoprodObject::embed(corpus[1].clone()),
        CoprodObject::new(
            vec!["x".into(), "y".into()],
            BTreeMap::from([
                ("x".into(), corpus[1].clone()),
                ("y".into(), corpus[2].clone()),
            ]),
        )
        .expect("valid"),
    ];
    'col: for a in &completion_corpus {
        for b in &completion_corpus {
            collapse_limits.instances += 1;
            let (prod, _, _) = coprod_product(a, b);
            let collapsed = prod.total();
            // chosen product of the chosen collapses, via the base coproduct
            let ca = fold_coproduct(base, &a.family_values());
            let cb = fold_coproduct(base, &b.family_values());
            let expected = ca.len() * cb.len();
            if collapsed != expected {
                collapse_limits = CheckVerdict::fail(
                    collapse_limits.instances,
                    format!("|collapse(A × B)| = {collapsed} but |collapse A| · |collapse B| = {expected}"),
                );
                break 'col;
            }
        }
    }
    ExtensivityReport {
        base,
        disjointness,
        stability,
        hom_formula,
        collapse_limits,
    }
}

impl CoprodObject {
    fn family_values(&self) -> Vec<Vec<String>> {
        self.index.iter().map(|x| self.family[x].clone()).collect()
    }
}

fn fold_coproduct(base: Base, parts: &[Vec<String>]) -> Vec<String> {
    let mut acc: Vec<String> = Vec::new();
    let mut first = true;
    for p in parts {
        if first {
            acc = p.clone();
            first = false;
        } else {
            acc = base.coproduct(&acc, p).0;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(elems: &[&str]) -> Vec<String> {
        elems.iter().map(|s| s.to_string()).collect()
    }

    fn two_component() -> CoprodObject {
        CoprodObject::new(
            vec!["x".into(), "y".into()],
            BTreeMap::from([("x".into(), set(&["a"])), ("y".into(), set(&["b", "c"]))]),
        )
        .unwrap()
    }

    #[test]
    fn embedding_is_fully_faithful() {
        let a = set(&["a", "b"]);
        let b = set(&["u", "v", "w"]);
        let ua = CoprodObject::embed(a.clone());
        let ub = CoprodObject::embed(b.clone());
        let base_homs = enumerate_set_maps(&a, &b).len();
        let completion_homs = enumerate_coprod_morphisms(&ua, &ub).len();
        assert_eq!(base_homs, completion_homs);
    }

    #[test]
    fn embedded_terminal_is_terminal() {
        let t = CoprodObject::terminal();
        for obj in [CoprodObject::initial(), CoprodObject::embed(set(&["a", "b"])), two_component()] {
            assert_eq!(enumerate_coprod_morphisms(&obj, &t).len(), 1);
        }
    }

    #[test]
    fn collapse_of_two_component_family() {
        assert_eq!(two_component().collapse().len(), 3);
    }

    #[test]
    fn collapse_embed_is_identity_on_size() {
        let s = set(&["p", "q"]);
        assert_eq!(CoprodObject::embed(s.clone()).collapse().len(), s.len());
    }

    #[test]
    fn adjunction_bijection_on_two_component_family() {
        // Hom_S(collapse T, s) ≅ Hom_{S^⨿}(T, U s)
        let t = two_component();
        let s = set(&["0", "1"]);
        let lhs = enumerate_set_maps(&t.collapse(), &s).len();
        let rhs = enumerate_coprod_morphisms(&t, &CoprodObject::embed(s)).len();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_multiplies_components() {
        let a = two_component();
        let b = CoprodObject::new(
            vec!["p".into(), "q".into(), "r".into()],
            BTreeMap::from([
                ("p".into(), set(&["1"])),
                ("q".into(), set(&["1", "2"])),
                ("r".into(), set(&[])),
            ]),
        )
        .unwrap();
        let (prod, p1, p2) = coprod_product(&a, &b);
        assert_eq!(prod.index.len(), 6);
        // universal property: cones from a probe correspond to pairs of legs
        let probe = CoprodObject::embed(set(&["z"]));
        let cones = enumerate_coprod_morphisms(&probe, &prod).len();
        let pairs = enumerate_coprod_morphisms(&probe, &a).len()
            * enumerate_coprod_morphisms(&probe, &b).len();
        assert_eq!(cones, pairs);
        // pairing round-trips
        for f in enumerate_coprod_morphisms(&probe, &a).into_iter().take(2) {
            for g in enumerate_coprod_morphisms(&probe, &b).into_iter().take(2) {
                let pair = coprod_pair(&prod, &f, &g).unwrap();
                assert_eq!(pair.then(&p1).unwrap(), f);
                assert_eq!(pair.then(&p2).unwrap(), g);
            }
        }
    }

    #[test]
    fn product_with_terminal_is_isomorphic() {
        let a = two_component();
        let (prod, _, _) = coprod_product(&a, &CoprodObject::terminal());
        assert!(find_coprod_isomorphism(&prod, &a).is_some());
    }

    #[test]
    fn pullback_of_coproduct_injections_is_intersection() {
        let a = two_component();
        let b = CoprodObject::embed(set(&["m"]));
        let (_, injections) = coprod_coproduct(&[&a, &b]);
        let (pb, _, _) = coprod_pullback(&injections[0], &injections[1]).unwrap();
        assert_eq!(pb.index.len(), 0);
        let (pb_self, _, _) = coprod_pullback(&injections[0], &injections[0]).unwrap();
        assert!(find_coprod_isomorphism(&pb_self, &a).is_some());
    }

    #[test]
    fn connected_objects_are_the_embedded_ones() {
        // Hom(U s, −) sends binary coproducts to disjoint unions; a
        // two-component probe does not
        let s = CoprodObject::embed(set(&["e"]));
        let a = CoprodObject::embed(set(&["a"]));
        let b = two_component();
        let (cop, _) = coprod_coproduct(&[&a, &b]);
        let joint = enumerate_coprod_morphisms(&s, &cop).len();
        let split = enumerate_coprod_morphisms(&s, &a).len()
            + enumerate_coprod_morphisms(&s, &b).len();
        assert_eq!(joint, split);
        let probe = coprod_coproduct(&[&s, &s]).0;
        let joint2 = enumerate_coprod_morphisms(&probe, &cop).len();
        let split2 = enumerate_coprod_morphisms(&probe, &a).len()
            + enumerate_coprod_morphisms(&probe, &b).len();
        assert!(joint2 > split2);
    }

    #[test]
    fn connected_hom_preserves_pushout_along_injection() {
        // Hom(P, −) of a pushout along a coproduct injection is the pushout
        // of the hom-sets, for connected P
        let p = CoprodObject::embed(set(&["e"]));
        let a = CoprodObject::embed(set(&["a"]));
        let b = two_component();
        let (cop, injections) = coprod_coproduct(&[&a, &b]);
        // push the injection a -> a ⊔ b out along some g: a -> b
        for g in enumerate_coprod_morphisms(&a, &b).into_iter().take(3) {
            let (po, _, _) = coprod_pushout(&injections[0], &g).unwrap();
            let homs_po = enumerate_coprod_morphisms(&p, &po).len();
            // pushout of hom-sets: Hom(P,A⊔B) ⊔_{Hom(P,A)} Hom(P,B)
            let h_cop = enumerate_coprod_morphisms(&p, &cop).len();
            let h_a = enumerate_coprod_morphisms(&p, &a).len();
            let h_b = enumerate_coprod_morphisms(&p, &b).len();
            assert_eq!(homs_po, h_cop + h_b - h_a);
        }
    }

    #[test]
    fn pushout_glues_components() {
        // pushout of x <- x -> y with both legs the obvious maps glues
        let a = CoprodObject::embed(set(&["a"]));
        let (cop, injections) = coprod_coproduct(&[&a, &a]);
        let id = CoprodMorphism::identity(&a);
        let (po, l, r) = coprod_pushout(&injections[0], &id).unwrap();
        assert!(find_coprod_isomorphism(&po, &cop).is_some() || po.index.len() == 2);
        assert_eq!(l.source.index.len(), 2);
        assert_eq!(r.source.index.len(), 1);
        // gluing both copies: pushout of the fold legs collapses to one
        let fold = coprod_copair(&cop, &[&a, &a], &[id.clone(), id.clone()]).unwrap();
        let (po2, _, _) = coprod_pushout(&fold, &fold).unwrap();
        assert_eq!(po2.index.len(), 1);
    }

    #[test]
    fn projective_factorization_has_the_right_legs() {
        let a = two_component();
        let b = CoprodObject::embed(set(&["m", "n"]));
        for m in enumerate_coprod_morphisms(&a, &b).into_iter().take(3) {
            let (_, left, right) = factor_projective_completion(&m).unwrap();
            assert!(is_coprod_injection(&left));
            assert!(is_split_epi_completion(&right).is_some());
            assert_eq!(left.then(&right).unwrap(), m);
        }
    }

    #[test]
    fn finset_base_is_extensive() {
        let report = verify_extensive(Base::FinSet);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn wedge_base_fails_disjointness_with_witness() {
        let report = verify_extensive(Base::Wedge);
        assert!(!report.disjointness.passed);
        let witness = report.disjointness.witness.as_deref().unwrap();
        assert!(witness.contains("(*,*)"), "witness: {witness}");
    }

    #[test]
    fn json_round_trip() {
        let a = two_component();
        assert_eq!(CoprodObject::from_json(&a.to_json()).unwrap(), a);
        let b = CoprodObject::embed(set(&["m"]));
        let m = enumerate_coprod_morphisms(&a, &b).pop().unwrap();
        assert_eq!(CoprodMorphism::from_json(&m.to_json()).unwrap(), m);
    }
}

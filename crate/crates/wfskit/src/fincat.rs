//! Finite categories with total composition tables, functors, comma
//! categories and nerves.
//!
//! These are the diagram shapes for everything downstream. Ids are opaque
//! strings ordered lexicographically; all enumerations follow that order.

use crate::sset::explicit::ExplicitSSet;
use crate::sset::{FinSimplicialSet, SsetError};
use serde_json::{json, Map as JsonMap, Value};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatError {
    #[error("category axioms violated:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),
    #[error("unknown object id {0:?}")]
    UnknownObject(String),
    #[error("unknown morphism id {0:?}")]
    UnknownMorphism(String),
    #[error("{0}")]
    Other(String),
}

/// A finite category: objects, morphisms with endpoints, identities, and a
/// composition table that is total on composable pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    /// morphism id -> (source, destination)
    morphisms: BTreeMap<String, (String, String)>,
    /// object -> its identity morphism id
    identities: BTreeMap<String, String>,
    /// (g, f) -> g∘f, keyed by "g after f"
    compose: BTreeMap<(String, String), String>,
}

impl FinCategory {
    /// Builds a category and checks every axiom. Identity composites may be
    /// omitted from `compose`; they are filled in.
    pub fn new(
        objects: Vec<String>,
        morphisms: BTreeMap<String, (String, String)>,
        identities: BTreeMap<String, String>,
        compose: BTreeMap<(String, String), String>,
    ) -> Result<Self, CatError> {
        let c = Self::new_unchecked(objects, morphisms, identities, compose);
        let violations = c.validate();
        if violations.is_empty() {
            Ok(c)
        } else {
            Err(CatError::Invalid(violations))
        }
    }

    /// Builds without validation but with identity composites filled in;
    /// use [`FinCategory::validate`] to obtain the axiom report.
    pub fn new_unchecked(
        mut objects: Vec<String>,
        morphisms: BTreeMap<String, (String, String)>,
        identities: BTreeMap<String, String>,
        mut compose: BTreeMap<(String, String), String>,
    ) -> Self {
        objects.sort();
        objects.dedup();
        for (m, (src, dst)) in &morphisms {
            if let Some(i) = identities.get(dst) {
                compose.entry((i.clone(), m.clone())).or_insert_with(|| m.clone());
            }
            if let Some(i) = identities.get(src) {
                compose.entry((m.clone(), i.clone())).or_insert_with(|| m.clone());
            }
        }
        FinCategory {
            objects,
            morphisms,
            identities,
            compose,
        }
    }

    /// Returns the list of violated axioms, empty when the category is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (m, (src, dst)) in &self.morphisms {
            if !self.objects.contains(src) {
                bad.push(format!("morphism {m:?} has unknown source {src:?}"));
            }
            if !self.objects.contains(dst) {
                bad.push(format!("morphism {m:?} has unknown target {dst:?}"));
            }
        }
        for o in &self.objects {
            match self.identities.get(o) {
                None => bad.push(format!("object {o:?} has no identity")),
                Some(i) => match self.morphisms.get(i) {
                    None => bad.push(format!("identity {i:?} of {o:?} is not a morphism")),
                    Some((s, d)) if s != o || d != o => {
                        bad.push(format!("identity {i:?} of {o:?} is not an endomorphism"))
                    }
                    _ => {}
                },
            }
        }
        if !bad.is_empty() {
            return bad; // endpoint data is broken; later checks would lie
        }
        // compose defined exactly on composable pairs
        for (g, (gs, _)) in &self.morphisms {
            for (f, (_, fd)) in &self.morphisms {
                let defined = self.compose.contains_key(&(g.clone(), f.clone()));
                if (fd == gs) != defined {
                    bad.push(if defined {
                        format!("composite {g:?}∘{f:?} defined on a non-composable pair")
                    } else {
                        format!("missing composite {g:?}∘{f:?}")
                    });
                }
            }
        }
        for ((g, f), gf) in &self.compose {
            match (self.morphisms.get(g), self.morphisms.get(f), self.morphisms.get(gf)) {
                (Some((_, gd)), Some((fs, _)), Some((s, d))) => {
                    if s != fs || d != gd {
                        bad.push(format!("composite {g:?}∘{f:?} = {gf:?} has wrong endpoints"));
                    }
                }
                _ => bad.push(format!("composite entry ({g:?}, {f:?}, {gf:?}) names unknown morphisms")),
            }
        }
        if !bad.is_empty() {
            return bad;
        }
        // unit laws
        for (m, (src, dst)) in &self.morphisms {
            let il = &self.identities[dst];
            let ir = &self.identities[src];
            if self.compose.get(&(il.clone(), m.clone())) != Some(m) {
                bad.push(format!("left unit law fails for {m:?}"));
            }
            if self.compose.get(&(m.clone(), ir.clone())) != Some(m) {
                bad.push(format!("right unit law fails for {m:?}"));
            }
        }
        // associativity on every composable triple
        for (h, (hs, _)) in &self.morphisms {
            for (g, (gs, gd)) in &self.morphisms {
                if gd != hs {
                    continue;
                }
                for (f, (_, fd)) in &self.morphisms {
                    if fd != gs {
                        continue;
                    }
                    let hg = &self.compose[&(h.clone(), g.clone())];
                    let gf = &self.compose[&(g.clone(), f.clone())];
                    let left = self.compose.get(&(hg.clone(), f.clone()));
                    let right = self.compose.get(&(h.clone(), gf.clone()));
                    if left != right || left.is_none() {
                        bad.push(format!("associativity fails on {h:?}∘{g:?}∘{f:?}"));
                    }
                }
            }
        }
        bad
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism_ids(&self) -> impl Iterator<Item = &String> {
        self.morphisms.keys()
    }

    pub fn endpoints(&self, m: &str) -> Option<(&String, &String)> {
        self.morphisms.get(m).map(|(s, d)| (s, d))
    }

    pub fn identity_of(&self, o: &str) -> Option<&String> {
        self.identities.get(o)
    }

    pub fn is_identity(&self, m: &str) -> bool {
        self.identities.values().any(|i| i == m)
    }

    /// `g` after `f`.
    pub fn compose(&self, g: &str, f: &str) -> Option<&String> {
        self.compose.get(&(g.to_string(), f.to_string()))
    }

    pub fn hom(&self, src: &str, dst: &str) -> Vec<&String> {
        self.morphisms
            .iter()
            .filter(|(_, (s, d))| s == src && d == dst)
            .map(|(m, _)| m)
            .collect()
    }

    pub fn morphisms_from(&self, src: &str) -> Vec<&String> {
        self.morphisms
            .iter()
            .filter(|(_, (s, _))| s == src)
            .map(|(m, _)| m)
            .collect()
    }

    pub fn morphisms_into(&self, dst: &str) -> Vec<&String> {
        self.morphisms
            .iter()
            .filter(|(_, (_, d))| d == dst)
            .map(|(m, _)| m)
            .collect()
    }

    /// The opposite category on the same ids.
    pub fn opposite(&self) -> FinCategory {
        let morphisms = self
            .morphisms
            .iter()
            .map(|(m, (s, d))| (m.clone(), (d.clone(), s.clone())))
            .collect();
        let compose = self
            .compose
            .iter()
            .map(|((g, f), gf)| ((f.clone(), g.clone()), gf.clone()))
            .collect();
        FinCategory {
            objects: self.objects.clone(),
            morphisms,
            identities: self.identities.clone(),
            compose,
        }
    }

    // --- stock shapes ---

    pub fn terminal() -> FinCategory {
        FinCategory::new(
            vec!["*".into()],
            BTreeMap::from([("id*".into(), ("*".into(), "*".into()))]),
            BTreeMap::from([("*".into(), "id*".into())]),
            BTreeMap::from([(("id*".into(), "id*".into()), "id*".into())]),
        )
        .expect("terminal category is valid")
    }

    /// The free arrow `a -> b`.
    pub fn arrow() -> FinCategory {
        FinCategory::new(
            vec!["a".into(), "b".into()],
            BTreeMap::from([
                ("f".into(), ("a".into(), "b".into())),
                ("ida".into(), ("a".into(), "a".into())),
                ("idb".into(), ("b".into(), "b".into())),
            ]),
            BTreeMap::from([("a".into(), "ida".into()), ("b".into(), "idb".into())]),
            BTreeMap::new(),
        )
        .expect("arrow category is valid")
    }

    /// The span `a <- c -> b`.
    pub fn span() -> FinCategory {
        FinCategory::new(
            vec!["a".into(), "b".into(), "c".into()],
            BTreeMap::from([
                ("l".into(), ("c".into(), "a".into())),
                ("r".into(), ("c".into(), "b".into())),
                ("ida".into(), ("a".into(), "a".into())),
                ("idb".into(), ("b".into(), "b".into())),
                ("idc".into(), ("c".into(), "c".into())),
            ]),
            BTreeMap::from([
                ("a".into(), "ida".into()),
                ("b".into(), "idb".into()),
                ("c".into(), "idc".into()),
            ]),
            BTreeMap::new(),
        )
        .expect("span category is valid")
    }

    /// The cospan `a -> c <- b`.
    pub fn cospan() -> FinCategory {
        FinCategory::span().opposite()
    }

    /// The linear poset `p0 < p1 < ... < pn`.
    pub fn poset_chain(n: usize) -> FinCategory {
        let objects: Vec<String> = (0..=n).map(|i| format!("p{i}")).collect();
        let mut morphisms = BTreeMap::new();
        let mut identities = BTreeMap::new();
        let mut compose = BTreeMap::new();
        let name = |i: usize, j: usize| format!("m{i}_{j}");
        for i in 0..=n {
            for j in i..=n {
                morphisms.insert(name(i, j), (format!("p{i}"), format!("p{j}")));
            }
            identities.insert(format!("p{i}"), name(i, i));
        }
        for i in 0..=n {
            for j in i..=n {
                for k in j..=n {
                    compose.insert((name(j, k), name(i, j)), name(i, k));
                }
            }
        }
        FinCategory::new(objects, morphisms, identities, compose).expect("poset is valid")
    }

    /// One object with one nonidentity idempotent `e∘e = e`.
    pub fn idempotent() -> FinCategory {
        FinCategory::new(
            vec!["x".into()],
            BTreeMap::from([
                ("e".into(), ("x".into(), "x".into())),
                ("idx".into(), ("x".into(), "x".into())),
            ]),
            BTreeMap::from([("x".into(), "idx".into())]),
            BTreeMap::from([(("e".into(), "e".into()), "e".into())]),
        )
        .expect("idempotent monoid is valid")
    }

    /// Serializes to the `wfskit/1` JSON category format.
    pub fn to_json(&self) -> Value {
        let morphisms: Vec<Value> = self
            .morphisms
            .iter()
            .map(|(m, (s, d))| json!({"id": m, "src": s, "dst": d}))
            .collect();
        let compose: Vec<Value> = self
            .compose
            .iter()
            .filter(|((g, f), _)| !self.is_identity(g) && !self.is_identity(f))
            .map(|((g, f), gf)| json!([g, f, gf]))
            .collect();
        let identities: JsonMap<String, Value> = self
            .identities
            .iter()
            .map(|(o, i)| (o.clone(), json!(i)))
            .collect();
        json!({
            "objects": self.objects,
            "morphisms": morphisms,
            "compose": compose,
            "identities": identities,
        })
    }

    /// Parses the `wfskit/1` JSON category format and validates.
    pub fn from_json(v: &Value) -> Result<Self, CatError> {
        let objects = v
            .get("objects")
            .and_then(Value::as_array)
            .ok_or_else(|| CatError::Other("missing \"objects\" list".into()))?
            .iter()
            .map(|o| {
                o.as_str()
                    .map(String::from)
                    .ok_or_else(|| CatError::Other("object ids must be strings".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut morphisms = BTreeMap::new();
        for m in v
            .get("morphisms")
            .and_then(Value::as_array)
            .ok_or_else(|| CatError::Other("missing \"morphisms\" list".into()))?
        {
            let id = m.get("id").and_then(Value::as_str);
            let src = m.get("src").and_then(Value::as_str);
            let dst = m.get("dst").and_then(Value::as_str);
            let (Some(id), Some(src), Some(dst)) = (id, src, dst) else {
                return Err(CatError::Other(
                    "morphism entries need string id/src/dst".into(),
                ));
            };
            if morphisms
                .insert(id.to_string(), (src.to_string(), dst.to_string()))
                .is_some()
            {
                return Err(CatError::Other(format!("duplicate morphism id {id:?}")));
            }
        }
        let mut identities = BTreeMap::new();
        for (o, i) in v
            .get("identities")
            .and_then(Value::as_object)
            .ok_or_else(|| CatError::Other("missing \"identities\" object".into()))?
        {
            let i = i
                .as_str()
                .ok_or_else(|| CatError::Other("identity ids must be strings".into()))?;
            identities.insert(o.clone(), i.to_string());
        }
        let mut compose = BTreeMap::new();
        for entry in v
            .get("compose")
            .and_then(Value::as_array)
            .map(|a| a.as_slice())
            .unwrap_or(&[])
        {
            let arr = entry
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| CatError::Other("compose entries must be triples".into()))?;
            let (Some(g), Some(f), Some(gf)) =
                (arr[0].as_str(), arr[1].as_str(), arr[2].as_str())
            else {
                return Err(CatError::Other("compose entries must hold strings".into()));
            };
            compose.insert((g.to_string(), f.to_string()), gf.to_string());
        }
        FinCategory::new(objects, morphisms, identities, compose)
    }
}

/// A functor between finite categories, given on ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinFunctor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub obj_map: BTreeMap<String, String>,
    pub mor_map: BTreeMap<String, String>,
}

impl FinFunctor {
    pub fn new(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        obj_map: BTreeMap<String, String>,
        mor_map: BTreeMap<String, String>,
    ) -> Result<Self, CatError> {
        let f = FinFunctor {
            source,
            target,
            obj_map,
            mor_map,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), CatError> {
        for o in self.source.objects() {
            let img = self
                .obj_map
                .get(o)
                .ok_or_else(|| CatError::Other(format!("object {o:?} has no image")))?;
            if !self.target.objects().contains(img) {
                return Err(CatError::UnknownObject(img.clone()));
            }
        }
        for m in self.source.morphism_ids() {
            let img = self
                .mor_map
                .get(m)
                .ok_or_else(|| CatError::Other(format!("morphism {m:?} has no image")))?;
            let (s, d) = self
                .source
                .endpoints(m)
                .ok_or_else(|| CatError::UnknownMorphism(m.clone()))?;
            let (is, id_) = self
                .target
                .endpoints(img)
                .ok_or_else(|| CatError::UnknownMorphism(img.clone()))?;
            if is != &self.obj_map[s] || id_ != &self.obj_map[d] {
                return Err(CatError::Other(format!(
                    "image of {m:?} has wrong endpoints"
                )));
            }
        }
        for o in self.source.objects() {
            let i = self.source.identity_of(o).expect("validated category");
            let want = self.target.identity_of(&self.obj_map[o]).ok_or_else(|| {
                CatError::Other(format!("target object {:?} has no identity", self.obj_map[o]))
            })?;
            if &self.mor_map[i] != want {
                return Err(CatError::Other(format!(
                    "functor does not preserve the identity of {o:?}"
                )));
            }
        }
        for g in self.source.morphism_ids() {
            for f in self.source.morphism_ids() {
                if let Some(gf) = self.source.compose(g, f) {
                    let img = self
                        .target
                        .compose(&self.mor_map[g], &self.mor_map[f])
                        .ok_or_else(|| {
                            CatError::Other(format!("images of {g:?}, {f:?} do not compose"))
                        })?;
                    if img != &self.mor_map[gf] {
                        return Err(CatError::Other(format!(
                            "functor does not preserve {g:?}∘{f:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identity(c: Arc<FinCategory>) -> FinFunctor {
        let obj_map = c.objects().iter().map(|o| (o.clone(), o.clone())).collect();
        let mor_map = c.morphism_ids().map(|m| (m.clone(), m.clone())).collect();
        FinFunctor {
            source: c.clone(),
            target: c,
            obj_map,
            mor_map,
        }
    }

    pub fn apply_obj(&self, o: &str) -> &String {
        &self.obj_map[o]
    }

    pub fn apply_mor(&self, m: &str) -> &String {
        &self.mor_map[m]
    }

    pub fn from_json(
        v: &Value,
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
    ) -> Result<Self, CatError> {
        let read = |key: &str| -> Result<BTreeMap<String, String>, CatError> {
            v.get(key)
                .and_then(Value::as_object)
                .ok_or_else(|| CatError::Other(format!("missing {key:?} object")))?
                .iter()
                .map(|(k, val)| {
                    val.as_str()
                        .map(|s| (k.clone(), s.to_string()))
                        .ok_or_else(|| CatError::Other(format!("{key}[{k:?}] must be a string")))
                })
                .collect()
        };
        FinFunctor::new(source, target, read("obj")?, read("mor")?)
    }

    pub fn to_json(&self) -> Value {
        let to_obj = |m: &BTreeMap<String, String>| -> JsonMap<String, Value> {
            m.iter().map(|(k, v)| (k.clone(), json!(v))).collect()
        };
        json!({
            "obj": to_obj(&self.obj_map),
            "mor": to_obj(&self.mor_map),
        })
    }
}

/// A comma category materialized as a finite category with its projection.
#[derive(Debug, Clone)]
pub struct CommaCategory {
    pub cat: Arc<FinCategory>,
    /// Projection to the base category.
    pub projection: FinFunctor,
    /// For each comma object (a morphism id of the base), the base morphism
    /// it stands for.
    pub object_witness: BTreeMap<String, String>,
}

/// The under category `i \ C`: objects are morphisms out of `i`, morphisms
/// are commuting triangles.
pub fn under_category(c: &Arc<FinCategory>, i: &str) -> Result<CommaCategory, CatError> {
    comma(c, i, true)
}

/// The over category `C / i`: objects are morphisms into `i`.
pub fn over_category(c: &Arc<FinCategory>, i: &str) -> Result<CommaCategory, CatError> {
    comma(c, i, false)
}

fn comma(c: &Arc<FinCategory>, i: &str, under: bool) -> Result<CommaCategory, CatError> {
    if !c.objects().contains(&i.to_string()) {
        return Err(CatError::UnknownObject(i.to_string()));
    }
    let objs: Vec<String> = if under {
        c.morphisms_from(i).into_iter().cloned().collect()
    } else {
        c.morphisms_into(i).into_iter().cloned().collect()
    };
    // the loose end of a comma object: where triangles attach
    let loose = |f: &str| -> String {
        let (s, d) = c.endpoints(f).expect("comma objects are morphisms");
        if under { d.clone() } else { s.clone() }
    };
    let mut morphisms = BTreeMap::new();
    let mut identities = BTreeMap::new();
    let mut obj_map = BTreeMap::new();
    let mut mor_map = BTreeMap::new();
    // a morphism f -> g is an h between the loose ends with
    //   under: h∘f = g,  over: g∘h = f
    let mut arrows: BTreeMap<(String, String), (String, String)> = BTreeMap::new();
    for f in &objs {
        for g in &objs {
            for h in c.hom(&loose(f), &loose(g)) {
                let closes = if under {
                    c.compose(h, f) == Some(g)
                } else {
                    c.compose(g, h) == Some(f)
                };
                if closes {
                    let id = format!("{f}>{h}");
                    morphisms.insert(id.clone(), (f.clone(), g.clone()));
                    arrows.insert((f.clone(), id.clone()), (g.clone(), h.clone()));
                    mor_map.insert(id, h.clone());
                }
            }
        }
    }
    for f in &objs {
        let idm = c.identity_of(&loose(f)).expect("validated category").clone();
        identities.insert(f.clone(), format!("{f}>{idm}"));
        obj_map.insert(f.clone(), loose(f));
    }
    let mut compose = BTreeMap::new();
    for ((f1, id1), (g1, h1)) in &arrows {
        for ((f2, id2), (_, h2)) in &arrows {
            if f2 != g1 {
                continue;
            }
            let h = c.compose(h2, h1).expect("loose ends compose").clone();
            compose.insert((id2.clone(), id1.clone()), format!("{f1}>{h}"));
        }
    }
    let cat = FinCategory::new(objs.clone(), morphisms, identities, compose)?.into();
    let projection = FinFunctor::new(Arc::clone(&cat), c.clone(), obj_map, mor_map)?;
    let object_witness = objs.iter().map(|f| (f.clone(), f.clone())).collect();
    Ok(CommaCategory {
        cat,
        projection,
        object_witness,
    })
}

/// Composable chains of `n` morphisms (identities allowed), each as
/// `(start object, morphism list)` in lexicographic order.
pub fn chains(c: &FinCategory, n: usize) -> Vec<(String, Vec<String>)> {
    let mut out: Vec<(String, Vec<String>)> = c
        .objects()
        .iter()
        .map(|o| (o.clone(), Vec::new()))
        .collect();
    for _ in 0..n {
        let mut next = Vec::new();
        for (start, chain) in &out {
            let at = match chain.last() {
                None => start.clone(),
                Some(m) => c.endpoints(m).expect("chain morphisms exist").1.clone(),
            };
            for m in c.morphisms_from(&at) {
                let mut longer = chain.clone();
                longer.push(m.clone());
                next.push((start.clone(), longer));
            }
        }
        out = next;
    }
    out
}

fn chain_label(start: &str, chain: &[String]) -> String {
    let mut parts = vec![start.to_string()];
    parts.extend(chain.iter().cloned());
    parts.join("|")
}

/// The nerve, truncated at `dim`: `n`-simplices are composable `n`-chains,
/// faces compose or drop ends, degeneracies insert identities.
pub fn nerve(c: &FinCategory, dim: usize) -> Result<FinSimplicialSet, SsetError> {
    let mut levels: Vec<Vec<(String, Vec<String>)>> = Vec::new();
    let mut index: Vec<BTreeMap<String, usize>> = Vec::new();
    for n in 0..=dim {
        let lvl = chains(c, n);
        index.push(
            lvl.iter()
                .enumerate()
                .map(|(k, (s, ch))| (chain_label(s, ch), k))
                .collect(),
        );
        levels.push(lvl);
    }
    let labels = levels
        .iter()
        .map(|lvl| lvl.iter().map(|(s, ch)| chain_label(s, ch)).collect())
        .collect();
    let mut face = vec![Vec::new()];
    for n in 1..=dim {
        let mut per_i = Vec::new();
        for i in 0..=n {
            per_i.push(
                levels[n]
                    .iter()
                    .map(|(start, chain)| {
                        let (s2, ch2) = chain_face(c, start, chain, i);
                        index[n - 1][&chain_label(&s2, &ch2)]
                    })
                    .collect(),
            );
        }
        face.push(per_i);
    }
    let mut degen = Vec::new();
    for n in 0..dim {
        let mut per_i = Vec::new();
        for i in 0..=n {
            per_i.push(
                levels[n]
                    .iter()
                    .map(|(start, chain)| {
                        let at = if i == 0 {
                            start.clone()
                        } else {
                            c.endpoints(&chain[i - 1]).expect("chain morphism").1.clone()
                        };
                        let mut longer = chain.clone();
                        longer.insert(i, c.identity_of(&at).expect("validated").clone());
                        index[n + 1][&chain_label(start, &longer)]
                    })
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
    let (out, _) = explicit.to_ez()?;
    Ok(out)
}

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

/// Certificate for [`is_homotopically_finite`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FinitenessCertificate {
    /// The nerve is finite; longest identity-free composable chain.
    MaxChainLength(usize),
    /// A cycle of nonidentity morphisms witnessing unbounded chains.
    Loop(Vec<String>),
}

/// Whether the nerve has finitely many nondegenerate simplices: true exactly
/// when the composability graph on nonidentity morphisms is acyclic.
pub fn is_homotopically_finite(c: &FinCategory) -> (bool, FinitenessCertificate) {
    let nodes: Vec<&String> = c
        .morphism_ids()
        .filter(|m| !c.is_identity(m))
        .collect();
    let succ = |m: &String| -> Vec<&String> {
        let (_, d) = c.endpoints(m).expect("morphism exists");
        nodes
            .iter()
            .filter(|m2| c.endpoints(m2).expect("morphism exists").0 == d)
            .copied()
            .collect()
    };
    // DFS with colors; on a back edge return the cycle
    let mut state: BTreeMap<&String, u8> = nodes.iter().map(|m| (*m, 0u8)).collect();
    let mut depth: BTreeMap<&String, usize> = BTreeMap::new();
    let mut longest = 0usize;
    fn dfs<'a>(
        m: &'a String,
        succ: &dyn Fn(&String) -> Vec<&'a String>,
        state: &mut BTreeMap<&'a String, u8>,
        depth: &mut BTreeMap<&'a String, usize>,
        stack: &mut Vec<&'a String>,
        longest: &mut usize,
    ) -> Option<Vec<String>> {
        state.insert(m, 1);
        stack.push(m);
        let mut best = 1usize;
        for m2 in succ(m) {
            match state[m2] {
                1 => {
                    let pos = stack.iter().position(|x| *x == m2).expect("on stack");
                    return Some(stack[pos..].iter().map(|s| (*s).clone()).collect());
                }
                0 => {
                    if let Some(cycle) = dfs(m2, succ, state, depth, stack, longest) {
                        return Some(cycle);
                    }
                    best = best.max(1 + depth[m2]);
                }
                _ => {
                    best = best.max(1 + depth[m2]);
                }
            }
        }
        stack.pop();
        state.insert(m, 2);
        depth.insert(m, best);
        *longest = (*longest).max(best);
        None
    }
    for m in &nodes {
        if state[m] == 0 {
            let mut stack = Vec::new();
            if let Some(cycle) = dfs(m, &succ, &mut state, &mut depth, &mut stack, &mut longest) {
                return (false, FinitenessCertificate::Loop(cycle));
            }
        }
    }
    (true, FinitenessCertificate::MaxChainLength(longest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::homology::homology;
    use crate::sset::maps::find_isomorphism;

    #[test]
    fn stock_categories_validate() {
        for c in [
            FinCategory::terminal(),
            FinCategory::arrow(),
            FinCategory::span(),
            FinCategory::cospan(),
            FinCategory::poset_chain(3),
            FinCategory::idempotent(),
        ] {
            assert!(c.validate().is_empty());
            let back = FinCategory::from_json(&c.to_json()).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn broken_associativity_is_reported() {
        // poset 0<1<2 with the long composite redirected to an identity
        let good = FinCategory::poset_chain(2);
        let mut compose: BTreeMap<(String, String), String> = BTreeMap::new();
        for g in good.morphism_ids() {
            for f in good.morphism_ids() {
                if let Some(gf) = good.compose(g, f) {
                    compose.insert((g.clone(), f.clone()), gf.clone());
                }
            }
        }
        compose.insert(("m1_2".into(), "m0_1".into()), "m0_1".into());
        let bad = FinCategory::new_unchecked(
            good.objects().to_vec(),
            good.morphism_ids()
                .map(|m| (m.clone(), good.endpoints(m).map(|(s, d)| (s.clone(), d.clone())).unwrap()))
                .collect(),
            good.objects()
                .iter()
                .map(|o| (o.clone(), good.identity_of(o).unwrap().clone()))
                .collect(),
            compose,
        );
        let report = bad.validate();
        assert!(!report.is_empty());
    }

    #[test]
    fn nerve_shapes() {
        let n = nerve(&FinCategory::terminal(), 3).unwrap();
        assert_eq!(n.nd_counts(), vec![1]);
        let n = nerve(&FinCategory::arrow(), 3).unwrap();
        assert_eq!(n.nd_counts(), vec![2, 1]);
        let n = nerve(&FinCategory::poset_chain(2), 2).unwrap();
        assert_eq!(n.nd_counts(), vec![3, 3, 1]);
        // chain counts at every level match brute-force enumeration
        let c = FinCategory::span();
        let n = nerve(&c, 3).unwrap();
        for k in 0..=3 {
            assert_eq!(n.cells(k).len(), chains(&c, k).len());
        }
    }

    #[test]
    fn nerve_of_opposite() {
        for c in [FinCategory::poset_chain(2), FinCategory::span()] {
            let n = nerve(&c, 2).unwrap().shared();
            let nop = nerve(&c.opposite(), 2).unwrap().opposite().shared();
            assert!(find_isomorphism(&n, &nop).is_some());
        }
    }

    #[test]
    fn under_and_over_categories() {
        let arrow = FinCategory::arrow().shared();
        let under = under_category(&arrow, "a").unwrap();
        assert_eq!(under.cat.objects().len(), 2);
        assert_eq!(
            under.cat.morphism_ids().filter(|m| !under.cat.is_identity(m)).count(),
            1
        );
        let over_b = over_category(&arrow, "b").unwrap();
        assert_eq!(over_b.cat.objects().len(), 2);
        let over_a = over_category(&arrow, "a").unwrap();
        assert_eq!(over_a.cat.objects().len(), 1);
        let span = FinCategory::span().shared();
        assert_eq!(under_category(&span, "c").unwrap().cat.objects().len(), 3);
        assert!(under_category(&span, "zz").is_err());
    }

    #[test]
    fn under_category_nerve_is_contractible() {
        let span = FinCategory::span().shared();
        for i in ["a", "b", "c"] {
            let u = under_category(&span, i).unwrap();
            let n = nerve(&u.cat, 3).unwrap();
            let h = homology(&n, 3);
            assert_eq!(h.betti, vec![1, 0, 0, 0], "under {i}");
            assert!(h.torsion.iter().all(|t| t.is_empty()));
        }
    }

    #[test]
    fn homotopic_finiteness() {
        let (ok, cert) = is_homotopically_finite(&FinCategory::poset_chain(3));
        assert!(ok);
        assert_eq!(cert, FinitenessCertificate::MaxChainLength(3));
        let (ok, cert) = is_homotopically_finite(&FinCategory::arrow());
        assert!(ok);
        assert_eq!(cert, FinitenessCertificate::MaxChainLength(1));
        let (ok, cert) = is_homotopically_finite(&FinCategory::idempotent());
        assert!(!ok);
        assert_eq!(cert, FinitenessCertificate::Loop(vec!["e".into()]));
    }
}

impl FinCategory {
    pub fn shared(self) -> Arc<FinCategory> {
        Arc::new(self)
    }
}

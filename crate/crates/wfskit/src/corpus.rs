//! Seeded fixture corpus: small stock objects and reproducible random
//! generators used by the property tests, the acceptance suite, and the
//! CLI's self-check examples. All randomness flows through an explicit
//! seed so runs are byte-identical.

use crate::coprod::{enumerate_coprod_morphisms, CoprodMorphism, CoprodObject};
use crate::fincat::FinCategory;
use crate::holim::{SobjDiagram, SsetDiagram};
use crate::sobj::{enumerate_simp_morphisms, tensor, to_terminal, SimpMorphism, SimpObject};
use crate::sset::homology::homology;
use crate::sset::lifting::constant_map;
use crate::sset::maps::{enumerate_maps, Budget, MapConstraints};
use crate::sset::{FinSimplicialSet, SSetMap};
use crate::wfs::{enumerate_set_maps, FinSetMap};
use crate::wfs::WfsError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// stock objects
// ---------------------------------------------------------------------------

/// Small simplicial sets of dimension at most two.
pub fn small_ssets() -> Vec<Arc<FinSimplicialSet>> {
    vec![
        FinSimplicialSet::delta(0).shared(),
        FinSimplicialSet::delta(1).shared(),
        FinSimplicialSet::boundary(1).shared(),
        FinSimplicialSet::circle().shared(),
        FinSimplicialSet::horn(2, 1).expect("1 <= 2").shared(),
    ]
}

/// The subset with at most four nondegenerate simplices, for the
/// brute-force coend comparisons.
pub fn tiny_ssets() -> Vec<Arc<FinSimplicialSet>> {
    vec![
        FinSimplicialSet::delta(0).shared(),
        FinSimplicialSet::boundary(1).shared(),
        FinSimplicialSet::delta(1).shared(),
        FinSimplicialSet::circle().shared(),
    ]
}

/// A discrete category on the given object names.
pub fn discrete_category(names: &[&str]) -> Arc<FinCategory> {
    let objects: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let morphisms = objects
        .iter()
        .map(|o| (format!("id{o}"), (o.clone(), o.clone())))
        .collect();
    let identities = objects.iter().map(|o| (o.clone(), format!("id{o}"))).collect();
    FinCategory::new(objects, morphisms, identities, BTreeMap::new())
        .expect("discrete categories are valid")
        .shared()
}

/// The two-element group as a one-object category.
pub fn two_element_group() -> Arc<FinCategory> {
    FinCategory::new(
        vec!["x".into()],
        BTreeMap::from([
            ("g".into(), ("x".into(), "x".into())),
            ("idx".into(), ("x".into(), "x".into())),
        ]),
        BTreeMap::from([("x".into(), "idx".into())]),
        BTreeMap::from([(("g".into(), "g".into()), "idx".into())]),
    )
    .expect("the group is a valid category")
    .shared()
}

/// All shapes with at most three objects used by the diagram corpus.
pub fn small_shapes() -> Vec<Arc<FinCategory>> {
    vec![
        FinCategory::terminal().shared(),
        discrete_category(&["u", "v"]),
        FinCategory::arrow().shared(),
        FinCategory::span().shared(),
        FinCategory::cospan().shared(),
        FinCategory::poset_chain(2).shared(),
    ]
}

/// The span whose homotopy colimit is a circle: a two-point set mapping to
/// a point on each side.
pub fn circle_span() -> SsetDiagram {
    let shape: Arc<FinCategory> = FinCategory::span().shared();
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
    SsetDiagram::new(shape, values, arrows).expect("the span fixture is a diagram")
}

/// The cospan `* -> K(Z/2) <- *` whose homotopy pullback is the loop
/// space of the group nerve.
pub fn loop_space_cospan() -> SsetDiagram {
    let shape: Arc<FinCategory> = FinCategory::cospan().shared();
    let pt = FinSimplicialSet::delta(0).shared();
    let kg = crate::fincat::nerve(&two_element_group(), 3)
        .expect("group nerves exist")
        .shared();
    let values = BTreeMap::from([
        ("a".to_string(), pt.clone()),
        ("b".to_string(), pt.clone()),
        ("c".to_string(), kg.clone()),
    ]);
    let arrows = BTreeMap::from([
        ("l".to_string(), constant_map(pt.clone(), kg.clone(), "x")),
        ("r".to_string(), constant_map(pt.clone(), kg, "x")),
    ]);
    SsetDiagram::new(shape, values, arrows).expect("the cospan fixture is a diagram")
}

/// The constant diagram at a value: every arrow is the identity.
pub fn constant_sset_diagram(
    shape: &Arc<FinCategory>,
    value: &Arc<FinSimplicialSet>,
) -> SsetDiagram {
    let values = shape
        .objects()
        .iter()
        .map(|o| (o.clone(), value.clone()))
        .collect();
    let arrows = shape
        .morphism_ids()
        .filter(|m| !shape.is_identity(m))
        .map(|m| (m.clone(), SSetMap::identity(value.clone())))
        .collect();
    SsetDiagram::new(shape.clone(), values, arrows).expect("constant diagrams are functorial")
}

pub fn constant_sobj_diagram(shape: &Arc<FinCategory>, value: &Arc<SimpObject>) -> SobjDiagram {
    let values = shape
        .objects()
        .iter()
        .map(|o| (o.clone(), value.clone()))
        .collect();
    let arrows = shape
        .morphism_ids()
        .filter(|m| !shape.is_identity(m))
        .map(|m| (m.clone(), SimpMorphism::identity(value)))
        .collect();
    SobjDiagram::new(shape.clone(), values, arrows).expect("constant diagrams are functorial")
}

// ---------------------------------------------------------------------------
// seeded generators, simplicial sets
// ---------------------------------------------------------------------------

/// Seeded maps between the stock small simplicial sets.
pub fn seeded_sset_maps(seed: u64, count: usize) -> Vec<SSetMap> {
    let mut r = rng(seed);
    let pool = small_ssets();
    let mut budget = Budget::new(100_000_000);
    let mut out = Vec::new();
    while out.len() < count {
        let src = &pool[r.gen_range(0..pool.len())];
        let tgt = &pool[r.gen_range(0..pool.len())];
        let all = enumerate_maps(src, tgt, &MapConstraints::default(), None, &mut budget)
            .expect("stock enumeration fits the budget");
        if all.is_empty() {
            continue;
        }
        let pick = r.gen_range(0..all.len());
        out.push(all[pick].clone());
    }
    out
}

/// Seeded triples `(f, g, h)` for the cartesian-product correspondence:
/// `f, g` are boundary inclusions in dimension at most one, `h` is a stock
/// map.
pub fn seeded_product_triples(seed: u64, count: usize) -> Vec<(SSetMap, SSetMap, SSetMap)> {
    let mut r = rng(seed);
    let gens = crate::wfs::boundary_inclusions(1);
    let maps = seeded_sset_maps(seed ^ 0x5eed, count);
    (0..count)
        .map(|k| {
            let f = gens[r.gen_range(0..gens.len())].clone();
            let g = gens[r.gen_range(0..gens.len())].clone();
            (f, g, maps[k].clone())
        })
        .collect()
}

/// Seeded triples `(f, a, h)` for the tensor correspondence: `a` is a map
/// of finite sets of size at most two.
pub fn seeded_tensor_triples(seed: u64, count: usize) -> Vec<(SSetMap, FinSetMap, SSetMap)> {
    let mut r = rng(seed);
    let gens = crate::wfs::boundary_inclusions(1);
    let maps = seeded_sset_maps(seed ^ 0xfeed, count);
    let sets: Vec<Vec<String>> = vec![
        vec!["p".into()],
        vec!["p".into(), "q".into()],
    ];
    let mut out = Vec::new();
    let mut k = 0;
    while out.len() < count {
        let s = &sets[r.gen_range(0..sets.len())];
        let t = &sets[r.gen_range(0..sets.len())];
        let all = enumerate_set_maps(s, t);
        if all.is_empty() {
            continue;
        }
        let a = all[r.gen_range(0..all.len())].clone();
        let f = gens[r.gen_range(0..gens.len())].clone();
        out.push((f, a, maps[k].clone()));
        k += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// seeded generators, simplicial objects
// ---------------------------------------------------------------------------

/// A seeded family of finite sets with at most two components of at most
/// two elements each.
pub fn seeded_coprod_object(r: &mut ChaCha8Rng, tag: usize) -> CoprodObject {
    let n_comp = r.gen_range(1..=2);
    let mut index = Vec::new();
    let mut family = BTreeMap::new();
    for c in 0..n_comp {
        let name = format!("c{tag}_{c}");
        let n_el = r.gen_range(1..=2);
        family.insert(
            name.clone(),
            (0..n_el).map(|e| format!("e{tag}_{c}_{e}")).collect(),
        );
        index.push(name);
    }
    CoprodObject::new(index, family).expect("generated families are valid")
}

/// The single-component realization of a simplicial set: level `n` is one
/// component containing every `n`-cell. Degeneracies are split monos that
/// are not coproduct injections, so these are typically not cofibrant.
pub fn chunky(k: &Arc<FinSimplicialSet>, trunc: usize) -> Result<SimpObject, WfsError> {
    let level_set = |n: usize| -> Vec<String> {
        k.cells(n).iter().map(|c| c.to_string()).collect()
    };
    let levels: Vec<CoprodObject> = (0..=trunc).map(|n| CoprodObject::embed(level_set(n))).collect();
    let comp = |n: usize, m: usize, images: BTreeMap<String, String>| -> Result<CoprodMorphism, WfsError> {
        let map = FinSetMap::new(
            levels[n].family["*"].clone(),
            levels[m].family["*"].clone(),
            images,
        )?;
        CoprodMorphism::new(
            levels[n].clone(),
            levels[m].clone(),
            BTreeMap::from([("*".to_string(), "*".to_string())]),
            BTreeMap::from([("*".to_string(), map)]),
        )
    };
    let mut faces = vec![Vec::new()];
    for n in 1..=trunc {
        faces.push(
            (0..=n)
                .map(|i| {
                    comp(
                        n,
                        n - 1,
                        k.cells(n)
                            .iter()
                            .map(|c| (c.to_string(), k.face(c, i).to_string()))
                            .collect(),
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
                    comp(
                        n,
                        n + 1,
                        k.cells(n)
                            .iter()
                            .map(|c| (c.to_string(), k.degeneracy(c, i).to_string()))
                            .collect(),
                    )
                })
                .collect::<Result<_, _>>()?,
        );
    }
    SimpObject::new(trunc, levels, faces, degens)
}

/// Seeded simplicial objects over the free-coproduct completion, mixing
/// cofibrant tensors and constants with non-cofibrant single-component
/// realizations.
pub fn seeded_simp_objects(seed: u64, count: usize, trunc: usize) -> Vec<Arc<SimpObject>> {
    let mut r = rng(seed);
    let shapes = tiny_ssets();
    (0..count)
        .map(|k| {
            let obj = match k % 3 {
                0 => tensor(
                    &seeded_coprod_object(&mut r, k),
                    &shapes[r.gen_range(0..shapes.len())],
                    trunc,
                ),
                1 => SimpObject::constant(&seeded_coprod_object(&mut r, k), trunc),
                _ => chunky(&shapes[r.gen_range(0..shapes.len())], trunc)
                    .expect("stock realizations are valid"),
            };
            Arc::new(obj)
        })
        .collect()
}

/// Seeded morphisms of simplicial objects: identities, collapses to the
/// terminal object, and enumerated morphisms between small constants.
pub fn seeded_simp_morphisms(seed: u64, count: usize, trunc: usize) -> Vec<SimpMorphism> {
    let mut r = rng(seed);
    let objects = seeded_simp_objects(seed ^ 0xab1e, count, trunc);
    (0..count)
        .map(|k| match k % 3 {
            0 => SimpMorphism::identity(&objects[k]),
            1 => to_terminal(&objects[k]).expect("terminal collapse exists"),
            _ => {
                let a = Arc::new(SimpObject::constant(&seeded_coprod_object(&mut r, k), trunc));
                let b = Arc::new(SimpObject::constant(
                    &seeded_coprod_object(&mut r, k + count),
                    trunc,
                ));
                let all = enumerate_simp_morphisms(&a, &b);
                if all.is_empty() {
                    to_terminal(&a).expect("terminal collapse exists")
                } else {
                    let pick = r.gen_range(0..all.len());
                    all[pick].clone()
                }
            }
        })
        .collect()
}

/// A seeded automorphism of a constant simplicial object, as a levelwise
/// isomorphism of families.
fn seeded_constant_automorphism(
    r: &mut ChaCha8Rng,
    a: &CoprodObject,
    trunc: usize,
) -> SimpMorphism {
    let isos: Vec<CoprodMorphism> = enumerate_coprod_morphisms(a, a)
        .into_iter()
        .filter(CoprodMorphism::is_iso)
        .collect();
    let iso = isos[r.gen_range(0..isos.len())].clone();
    let x = Arc::new(SimpObject::constant(a, trunc));
    SimpMorphism::new(x.clone(), x, vec![iso; trunc + 1])
        .expect("constant automorphisms are natural")
}

/// Seeded weak equivalences: constant automorphisms and collapses of
/// contractible tensors to the point.
pub fn seeded_weqs(seed: u64, count: usize, trunc: usize) -> Vec<SimpMorphism> {
    let mut r = rng(seed);
    (0..count)
        .map(|k| {
            if k % 2 == 0 {
                let a = seeded_coprod_object(&mut r, k);
                seeded_constant_automorphism(&mut r, &a, trunc)
            } else {
                let n = r.gen_range(0..=1);
                let contractible = FinSimplicialSet::delta(n).shared();
                let x = Arc::new(tensor(&CoprodObject::terminal(), &contractible, trunc));
                to_terminal(&x).expect("terminal collapse exists")
            }
        })
        .collect()
}

/// Seeded cospans `(f, g)` with `f` a fibration and `g` a weak
/// equivalence into the same target.
pub fn seeded_fibration_weq_cospans(
    seed: u64,
    count: usize,
    trunc: usize,
) -> Vec<(SimpMorphism, SimpMorphism)> {
    let mut r = rng(seed);
    (0..count)
        .map(|k| {
            if k % 2 == 0 {
                // constants over the point against a contractible collapse
                let a = seeded_coprod_object(&mut r, k);
                let f = to_terminal(&Arc::new(SimpObject::constant(&a, trunc)))
                    .expect("terminal collapse exists");
                let n = r.gen_range(0..=1);
                let contractible = FinSimplicialSet::delta(n).shared();
                let g = to_terminal(&Arc::new(tensor(
                    &CoprodObject::terminal(),
                    &contractible,
                    trunc,
                )))
                .expect("terminal collapse exists");
                (f, g)
            } else {
                // identity fibration against an automorphism
                let a = seeded_coprod_object(&mut r, k);
                let g = seeded_constant_automorphism(&mut r, &a, trunc);
                let f = SimpMorphism::identity(&g.target);
                (f, g)
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// diagram corpus
// ---------------------------------------------------------------------------

/// Simplicial-set diagrams over every small shape: the named fixtures,
/// constant diagrams at the tiny values, and seeded single-arrow diagrams.
pub fn sset_diagram_corpus(seed: u64) -> Vec<SsetDiagram> {
    let mut out = vec![circle_span()];
    let values = tiny_ssets();
    for shape in small_shapes() {
        // shapes with composable non-identity arrows have two-dimensional
        // nerves, and enumerating mapping spaces out of those into a value
        // with non-trivial loops is prohibitively large; keep the loop-free
        // values there and the circle everywhere else
        let deep = shape.morphism_ids().any(|g| {
            !shape.is_identity(g)
                && shape.morphism_ids().any(|f| {
                    !shape.is_identity(f)
                        && shape.endpoints(f).map(|(_, t)| t)
                            == shape.endpoints(g).map(|(s, _)| s)
                })
        });
        for v in &values {
            let h = homology(v, 1);
            let loops = h.betti.get(1).copied().unwrap_or(0) > 0
                || h.torsion.get(1).map(|t| !t.is_empty()).unwrap_or(false);
            if deep && loops {
                continue;
            }
            out.push(constant_sset_diagram(&shape, v));
        }
    }
    // seeded arrows over the walking arrow
    let mut r = rng(seed);
    let arrow: Arc<FinCategory> = FinCategory::arrow().shared();
    let mut budget = Budget::new(100_000_000);
    for _ in 0..3 {
        let src = &values[r.gen_range(0..values.len())];
        let tgt = &values[r.gen_range(0..values.len())];
        let all = enumerate_maps(src, tgt, &MapConstraints::default(), None, &mut budget)
            .expect("stock enumeration fits the budget");
        if all.is_empty() {
            continue;
        }
        let f = all[r.gen_range(0..all.len())].clone();
        let values_map = BTreeMap::from([
            ("a".to_string(), src.clone()),
            ("b".to_string(), tgt.clone()),
        ]);
        let arrows = BTreeMap::from([("f".to_string(), f)]);
        out.push(
            SsetDiagram::new(arrow.clone(), values_map, arrows)
                .expect("single-arrow diagrams are functorial"),
        );
    }
    out
}

/// Simplicial-object diagrams over small shapes at a truncation.
pub fn sobj_diagram_corpus(seed: u64, trunc: usize) -> Vec<SobjDiagram> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    let shapes = vec![
        FinCategory::terminal().shared(),
        discrete_category(&["u", "v"]),
        FinCategory::arrow().shared(),
    ];
    for (k, shape) in shapes.into_iter().enumerate() {
        let value = Arc::new(SimpObject::constant(&seeded_coprod_object(&mut r, k), trunc));
        out.push(constant_sobj_diagram(&shape, &value));
    }
    let interval = FinSimplicialSet::delta(1).shared();
    let value = Arc::new(tensor(&CoprodObject::terminal(), &interval, trunc));
    out.push(constant_sobj_diagram(&FinCategory::arrow().shared(), &value));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sobj::{is_cofibrant_decomposition, is_fibration, is_weq, default_projectives};

    #[test]
    fn generators_are_deterministic() {
        let a = seeded_sset_maps(7, 5);
        let b = seeded_sset_maps(7, 5);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.assignment(), y.assignment());
        }
        let c = seeded_sset_maps(8, 5);
        assert!(a.iter().zip(&c).any(|(x, y)| {
            x.assignment() != y.assignment() || x.source() != y.source() || x.target() != y.target()
        }));
    }

    #[test]
    fn chunky_realizations_validate_and_refute_cofibrancy() {
        let k = FinSimplicialSet::delta(1).shared();
        let x = chunky(&k, 3).unwrap();
        x.validate().unwrap();
        assert!(!is_cofibrant_decomposition(&x).holds());
    }

    #[test]
    fn seeded_objects_validate() {
        for x in seeded_simp_objects(11, 9, 2) {
            x.validate().unwrap();
        }
    }

    #[test]
    fn seeded_morphisms_validate() {
        for f in seeded_simp_morphisms(13, 6, 2) {
            f.validate().unwrap();
        }
    }

    #[test]
    fn seeded_weqs_are_weqs() {
        for f in seeded_weqs(17, 4, 2) {
            let projectives = default_projectives(&[&f.source, &f.target]);
            assert!(is_weq(&f, &projectives, 2).unwrap().holds);
        }
    }

    #[test]
    fn seeded_cospans_have_the_advertised_classes() {
        let mut budget = Budget::new(100_000_000);
        for (f, g) in seeded_fibration_weq_cospans(19, 4, 2) {
            assert_eq!(f.target.as_ref(), g.target.as_ref());
            let projectives = default_projectives(&[&f.source, &g.source, &f.target]);
            assert!(is_fibration(&f, &projectives, 2, &mut budget).unwrap().holds);
            assert!(is_weq(&g, &projectives, 2).unwrap().holds);
        }
    }

    #[test]
    fn diagram_corpora_validate() {
        for d in sset_diagram_corpus(23) {
            d.validate().unwrap();
        }
        for d in sobj_diagram_corpus(23, 2) {
            d.validate().unwrap();
        }
    }
}

//! Batch front-end: parse JSON inputs, dispatch computations, and emit
//! machine-readable reports with re-checkable certificates.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use wfskit::coprod::{
    factor_projective_completion, is_coprod_injection, is_split_epi_completion, Base,
    CoprodMorphism, CoprodObject,
};
use wfskit::fincat::{is_homotopically_finite, nerve, FinCategory, FinFunctor, FinitenessCertificate};
use wfskit::holim::{hocolim, hokan_left, hokan_right, holim, Computed, Diagram};
use wfskit::report::{
    envelope, factorization_certificate, iso_certificate, lift_certificate, reedy_certificate,
    sset_map_from_objects, sset_map_with_objects, verify_report, write_atomic, Outcome, Params,
};
use wfskit::sobj::{
    default_projectives, is_cofibrant_decomposition, is_cofibrant_latching, is_fibration, is_weq,
    reedy_factorize, SimpMorphism, SimpObject,
};
use wfskit::sset::homology::{homology, weq_oracle, HomologyProfile};
use wfskit::sset::lifting::{is_kan_fibration_to, LiftingSquare};
use wfskit::sset::maps::Budget;
use wfskit::sset::FinSimplicialSet;
use wfskit::wfs::{
    check_correspondence_product, check_correspondence_tensor, classify_set, classify_sset,
    small_object_factorize, boundary_inclusions, horn_inclusions, ClassWitness, FinSetMap,
    MorphismClass, WfsError,
};

#[derive(Parser)]
#[command(name = "wfskit", version, about = "weak factorization systems and homotopy (co)limits at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Truncation level for simplicial computations.
    #[arg(long, global = true, default_value_t = 3)]
    trunc: usize,
    /// Stage bound for the small object argument.
    #[arg(long, global = true, default_value_t = 5)]
    stages: usize,
    /// Search budget for lifting and enumeration.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: usize,
    /// Seed recorded in the report; all randomized fixtures flow from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// JSON file with a list of projective families.
    #[arg(long, global = true)]
    projectives: Option<PathBuf>,
    /// Write the report here atomically; stdout otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KanSide {
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum FactorMode {
    /// Stage-bounded small object argument on simplicial sets.
    Soa,
    /// Projective factorization in finite sets or families.
    Projective,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorKind {
    Horn,
    Boundary,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseKind {
    Finset,
    Wedge,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a category, simplicial set, simplicial object, or diagram.
    Validate { input: PathBuf },
    /// Truncated nerve of a category, with a finiteness certificate.
    Nerve { input: PathBuf },
    /// Solve a lifting square {left, top, right, bottom}.
    Lift { input: PathBuf },
    /// Decide a morphism class with a witness.
    Classify {
        input: PathBuf,
        #[arg(long)]
        class: String,
    },
    /// Factor a morphism: small object argument or projective splitting.
    Factor {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<FactorMode>,
        #[arg(long, value_enum, default_value = "horn")]
        generators: GeneratorKind,
    },
    /// Check a two-variable adjunction correspondence on a triple.
    Boxcheck { input: PathBuf },
    /// Run the extensivity axioms over a base corpus.
    Extensive {
        #[arg(long, value_enum, default_value = "finset")]
        base: BaseKind,
    },
    /// Decide cofibrancy of a simplicial object by both deciders.
    Cofibrant { input: PathBuf },
    /// Reedy factorization with split-corner certificates.
    Reedy { input: PathBuf },
    /// Fibration check: horn filling or projective-wise Kan condition.
    Fib { input: PathBuf },
    /// Weak-equivalence check by the homology oracle.
    Weq { input: PathBuf },
    /// Homotopy colimit of a diagram by the chain diagonal.
    Hocolim { input: PathBuf },
    /// Homotopy limit of a diagram over a homotopically finite shape.
    Holim { input: PathBuf },
    /// Homotopy Kan extension along a functor.
    Kan {
        input: PathBuf,
        #[arg(long, value_enum)]
        side: KanSide,
        #[arg(long)]
        functor: PathBuf,
    },
    /// Re-check every certificate in a report.
    Verify { input: PathBuf },
}

/// A handler outcome: everything the envelope needs.
struct Run {
    outcome: Outcome,
    body: Value,
    certificates: Vec<Value>,
    warnings: Vec<String>,
}

impl Run {
    fn ok(body: Value) -> Run {
        Run {
            outcome: Outcome::Positive,
            body,
            certificates: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn with(outcome: Outcome, body: Value) -> Run {
        Run {
            outcome,
            body,
            certificates: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

struct Failure {
    outcome: Outcome,
    message: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Failure {
        Failure {
            outcome: Outcome::InputError,
            message: msg.into(),
        }
    }
}

impl From<WfsError> for Failure {
    fn from(e: WfsError) -> Failure {
        let outcome = match e {
            WfsError::Budget(_) => Outcome::Inconclusive,
            _ => Outcome::InputError,
        };
        Failure {
            outcome,
            message: e.to_string(),
        }
    }
}

fn read_input(path: &Path) -> Result<(Vec<u8>, Value), Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let value = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::input(format!("{} is not JSON: {e}", path.display())))?;
    Ok((bytes, value))
}

fn homology_json(p: &HomologyProfile) -> Value {
    json!({ "betti": p.betti, "torsion": p.torsion })
}

fn square_json(sq: &LiftingSquare) -> Value {
    json!({
        "left": sset_map_with_objects(&sq.left),
        "top": sset_map_with_objects(&sq.top),
        "right": sset_map_with_objects(&sq.right),
        "bottom": sset_map_with_objects(&sq.bottom),
    })
}

/// What a JSON input is, by its shape.
fn detect(v: &Value) -> &'static str {
    if v.get("shape").is_some() && v.get("values").is_some() {
        "diagram"
    } else if v.get("objects").is_some() && v.get("morphisms").is_some() {
        "category"
    } else if v.get("trunc").is_some() && v.get("levels").is_some() {
        "sobj"
    } else if v.get("nd").is_some() {
        "sset"
    } else if v.get("left").is_some() && v.get("right").is_some() {
        "square"
    } else if v.get("source").is_some() && v.get("target").is_some() {
        if v["source"].get("trunc").is_some() {
            "simp-morphism"
        } else if v["source"].get("index").is_some() {
            "coprod-morphism"
        } else if v["source"].is_array() {
            "finset-map"
        } else {
            "sset-map"
        }
    } else {
        "unknown"
    }
}

fn parse_finset_map(v: &Value) -> Result<FinSetMap, Failure> {
    FinSetMap::from_json(v).map_err(|e| Failure::input(e.to_string()))
}

fn load_projectives(
    path: &Option<PathBuf>,
    fallback: &[&SimpObject],
) -> Result<Vec<CoprodObject>, Failure> {
    match path {
        Some(p) => {
            let (_, v) = read_input(p)?;
            v.as_array()
                .ok_or_else(|| Failure::input("projectives file must be a JSON array"))?
                .iter()
                .map(|w| CoprodObject::from_json(w).map_err(|e| Failure::input(e.to_string())))
                .collect()
        }
        None => Ok(default_projectives(fallback)),
    }
}

fn run(cli: &Cli, inputs: &mut Vec<(String, Vec<u8>)>) -> Result<Run, Failure> {
    let mut budget = Budget::new(cli.budget as u64);
    let mut read = |path: &PathBuf| -> Result<Value, Failure> {
        let (bytes, v) = read_input(path)?;
        inputs.push((path.display().to_string(), bytes));
        Ok(v)
    };
    match &cli.command {
        Command::Validate { input } => {
            let v = read(input)?;
            let kind = detect(&v);
            let problems: Vec<String> = match kind {
                "category" => match FinCategory::from_json(&v) {
                    Ok(c) => c.validate(),
                    Err(e) => return Err(Failure::input(e.to_string())),
                },
                "sset" => match FinSimplicialSet::from_json(&v) {
                    Ok(x) => x.validate().err().into_iter().map(|e| e.to_string()).collect(),
                    Err(e) => return Err(Failure::input(e.to_string())),
                },
                "sobj" => match SimpObject::from_json(&v) {
                    Ok(x) => x.validate().err().into_iter().map(|e| e.to_string()).collect(),
                    Err(e) => return Err(Failure::input(e.to_string())),
                },
                "diagram" => match Diagram::from_json(&v) {
                    Ok(_) => Vec::new(),
                    Err(e) => vec![e.to_string()],
                },
                "sset-map" => match sset_map_from_objects(&v) {
                    Ok(m) => m.validate().err().into_iter().map(|e| e.to_string()).collect(),
                    Err(e) => vec![e.to_string()],
                },
                "simp-morphism" => match SimpMorphism::from_json(&v) {
                    Ok(m) => m.validate().err().into_iter().map(|e| e.to_string()).collect(),
                    Err(e) => vec![e.to_string()],
                },
                other => return Err(Failure::input(format!("unrecognized input shape ({other})"))),
            };
            if problems.is_empty() {
                Ok(Run::ok(json!({ "kind": kind, "valid": true })))
            } else {
                Ok(Run::with(
                    Outcome::Negative,
                    json!({ "kind": kind, "valid": false, "problems": problems }),
                ))
            }
        }
        Command::Nerve { input } => {
            let v = read(input)?;
            let c = FinCategory::from_json(&v).map_err(|e| Failure::input(e.to_string()))?;
            let n = nerve(&c, cli.trunc).map_err(|e| Failure::input(e.to_string()))?;
            let (finite, cert) = is_homotopically_finite(&c);
            let cert = match cert {
                FinitenessCertificate::MaxChainLength(l) => json!({"max_chain_length": l}),
                FinitenessCertificate::Loop(cycle) => json!({"loop": cycle}),
            };
            Ok(Run::ok(json!({
                "nerve": n.to_json(),
                "homotopically_finite": finite,
                "certificate": cert,
            })))
        }
        Command::Lift { input } => {
            let v = read(input)?;
            let leg = |field: &str| -> Result<_, Failure> {
                sset_map_from_objects(
                    v.get(field)
                        .ok_or_else(|| Failure::input(format!("square lacks {field:?}")))?,
                )
                .map_err(|e| Failure::input(e.to_string()))
            };
            let square = LiftingSquare::new(leg("left")?, leg("top")?, leg("right")?, leg("bottom")?)
                .map_err(Failure::input)?;
            match square.solve(&mut budget) {
                Ok(Some(lift)) => {
                    let cert = lift_certificate(
                        &square.left,
                        &square.top,
                        &square.right,
                        &square.bottom,
                        &lift,
                    );
                    Ok(Run {
                        outcome: Outcome::Positive,
                        body: json!({"lift_found": true}),
                        certificates: vec![cert],
                        warnings: Vec::new(),
                    })
                }
                Ok(None) => Ok(Run::with(
                    Outcome::Negative,
                    json!({"lift_found": false, "witness": square_json(&square)}),
                )),
                Err(e) => Ok(Run::with(
                    Outcome::Inconclusive,
                    json!({"budget_exceeded": e.to_string()}),
                )),
            }
        }
        Command::Classify { input, class } => {
            let v = read(input)?;
            let class = MorphismClass::parse(class)
                .ok_or_else(|| Failure::input(format!("unknown class {class:?}")))?;
            let verdict = match detect(&v) {
                "sset-map" => {
                    let m = sset_map_from_objects(&v).map_err(|e| Failure::input(e.to_string()))?;
                    classify_sset(&m, class, &mut budget)?
                }
                "finset-map" => classify_set(&parse_finset_map(&v)?, class),
                "coprod-morphism" => {
                    let m = CoprodMorphism::from_json(&v).map_err(|e| Failure::input(e.to_string()))?;
                    match class {
                        MorphismClass::CoprodInjection => wfskit::wfs::ClassVerdict {
                            holds: is_coprod_injection(&m),
                            witness: None,
                        },
                        MorphismClass::SplitEpi => match is_split_epi_completion(&m) {
                            Some(s) => wfskit::wfs::ClassVerdict {
                                holds: true,
                                witness: Some(ClassWitness::Set(s.collapse())),
                            },
                            None => wfskit::wfs::ClassVerdict {
                                holds: false,
                                witness: None,
                            },
                        },
                        _ => classify_set(&m.collapse(), class),
                    }
                }
                other => return Err(Failure::input(format!("cannot classify a {other}"))),
            };
            let witness = verdict.witness.as_ref().map(|w| match w {
                ClassWitness::Set(m) => m.to_json(),
                ClassWitness::Simplicial(m) => sset_map_with_objects(m),
            });
            Ok(Run::with(
                if verdict.holds {
                    Outcome::Positive
                } else {
                    Outcome::Negative
                },
                json!({"class": class.name(), "holds": verdict.holds, "witness": witness}),
            ))
        }
        Command::Factor {
            input,
            mode,
            generators,
        } => {
            let v = read(input)?;
            let kind = detect(&v);
            let mode = mode.unwrap_or(match kind {
                "sset-map" => FactorMode::Soa,
                _ => FactorMode::Projective,
            });
            match (mode, kind) {
                (FactorMode::Soa, "sset-map") => {
                    let m = sset_map_from_objects(&v).map_err(|e| Failure::input(e.to_string()))?;
                    let top = m.source().dim_bound().max(m.target().dim_bound()) + 1;
                    let gens = match generators {
                        GeneratorKind::Horn => horn_inclusions(top),
                        GeneratorKind::Boundary => boundary_inclusions(top),
                    };
                    let r = small_object_factorize(&m, &gens, cli.stages, &mut budget)?;
                    let cert = factorization_certificate(&m, &r.left, &r.right, r.complete);
                    let log: Vec<Value> = r
                        .log
                        .iter()
                        .map(|s| {
                            json!({
                                "stage": s.stage,
                                "attached": s.attached,
                                "mid_generators": s.mid_generators,
                            })
                        })
                        .collect();
                    Ok(Run {
                        outcome: if r.complete {
                            Outcome::Positive
                        } else {
                            Outcome::Inconclusive
                        },
                        body: json!({"complete": r.complete, "stages_used": r.log.len(), "log": log}),
                        certificates: vec![cert],
                        warnings: Vec::new(),
                    })
                }
                (FactorMode::Projective, "coprod-morphism") => {
                    let m = CoprodMorphism::from_json(&v).map_err(|e| Failure::input(e.to_string()))?;
                    let (mid, left, right) = factor_projective_completion(&m)?;
                    Ok(Run::ok(json!({
                        "mid": mid.to_json(),
                        "left": left.to_json(),
                        "right": right.to_json(),
                        "left_is_coprod_injection": is_coprod_injection(&left),
                        "right_is_split_epi": is_split_epi_completion(&right).is_some(),
                    })))
                }
                (FactorMode::Projective, "finset-map") => {
                    let m = parse_finset_map(&v)?;
                    let f = wfskit::wfs::factor_projective_set(&m, None)?;
                    Ok(Run::ok(json!({
                        "mid": f.mid,
                        "left": f.left.to_json(),
                        "right": f.right.to_json(),
                    })))
                }
                (_, other) => Err(Failure::input(format!(
                    "factor mode does not apply to a {other}"
                ))),
            }
        }
        Command::Boxcheck { input } => {
            let v = read(input)?;
            let f = sset_map_from_objects(
                v.get("f").ok_or_else(|| Failure::input("triple lacks \"f\""))?,
            )
            .map_err(|e| Failure::input(e.to_string()))?;
            let h = sset_map_from_objects(
                v.get("h").ok_or_else(|| Failure::input("triple lacks \"h\""))?,
            )
            .map_err(|e| Failure::input(e.to_string()))?;
            let c = if let Some(g) = v.get("g") {
                let g = sset_map_from_objects(g).map_err(|e| Failure::input(e.to_string()))?;
                check_correspondence_product(&f, &g, &h, &mut budget)?
            } else if let Some(a) = v.get("a") {
                let a = parse_finset_map(a)?;
                check_correspondence_tensor(&f, &a, &h, &mut budget)?
            } else {
                return Err(Failure::input("triple lacks \"g\" or \"a\""));
            };
            Ok(Run::with(
                if c.agrees() {
                    Outcome::Positive
                } else {
                    Outcome::Negative
                },
                json!({
                    "agrees": c.agrees(),
                    "box_vs_h": c.box_vs_h,
                    "f_vs_hom1": c.f_vs_hom1,
                    "g_vs_hom2": c.g_vs_hom2,
                }),
            ))
        }
        Command::Extensive { base } => {
            let base = match base {
                BaseKind::Finset => Base::FinSet,
                BaseKind::Wedge => Base::Wedge,
            };
            let report = wfskit::coprod::verify_extensive(base);
            Ok(Run::with(
                if report.passed() {
                    Outcome::Positive
                } else {
                    Outcome::Negative
                },
                report.to_json(),
            ))
        }
        Command::Cofibrant { input } => {
            let v = read(input)?;
            let x = SimpObject::from_json(&v)?;
            x.validate()?;
            let a = is_cofibrant_decomposition(&x);
            let b = is_cofibrant_latching(&x);
            if a.holds() != b.holds() {
                return Err(Failure::input(
                    "internal disagreement between cofibrancy deciders",
                ));
            }
            let witness = match &a {
                wfskit::sobj::CofibrancyVerdict::Cofibrant(c) => {
                    json!({"nd_components": c.nd_components})
                }
                wfskit::sobj::CofibrancyVerdict::Refuted { level, reason } => {
                    json!({"level": level, "reason": reason})
                }
            };
            Ok(Run::with(
                if a.holds() {
                    Outcome::Positive
                } else {
                    Outcome::Negative
                },
                json!({"cofibrant": a.holds(), "witness": witness}),
            ))
        }
        Command::Reedy { input } => {
            let v = read(input)?;
            let f = SimpMorphism::from_json(&v)?;
            f.validate()?;
            let r = reedy_factorize(&f)?;
            let mut sections = Vec::new();
            for corner in &r.corners {
                match is_split_epi_completion(corner) {
                    Some(s) => sections.push((corner.clone(), s)),
                    None => {
                        return Ok(Run::with(
                            Outcome::Negative,
                            json!({
                                "error": "matching corner is not split epi",
                                "corner": corner.to_json(),
                            }),
                        ))
                    }
                }
            }
            let left_ok = r.left.levels.iter().all(is_coprod_injection);
            let cert = reedy_certificate(&f, &r.left, &r.right, &sections);
            Ok(Run {
                outcome: Outcome::Positive,
                body: json!({
                    "levels": r.mid.trunc + 1,
                    "left_is_levelwise_coprod_injection": left_ok,
                    "corners_split": sections.len(),
                }),
                certificates: vec![cert],
                warnings: Vec::new(),
            })
        }
        Command::Fib { input } => {
            let v = read(input)?;
            match detect(&v) {
                "sset-map" => {
                    let m = sset_map_from_objects(&v).map_err(|e| Failure::input(e.to_string()))?;
                    match is_kan_fibration_to(&m, cli.trunc, &mut budget) {
                        Ok(r) => Ok(Run::with(
                            if r.holds {
                                Outcome::Positive
                            } else {
                                Outcome::Negative
                            },
                            json!({
                                "holds": r.holds,
                                "dims_checked": r.dims_checked,
                                "squares": r.squares,
                                "witness": r.failing.as_ref().map(square_json),
                            }),
                        )),
                        Err(e) => Ok(Run::with(
                            Outcome::Inconclusive,
                            json!({"budget_exceeded": e.to_string()}),
                        )),
                    }
                }
                "simp-morphism" => {
                    let f = SimpMorphism::from_json(&v)?;
                    f.validate()?;
                    let projectives =
                        load_projectives(&cli.projectives, &[&f.source, &f.target])?;
                    let r = is_fibration(&f, &projectives, cli.trunc, &mut budget)?;
                    let per: Vec<Value> = r
                        .per_projective
                        .iter()
                        .map(|(p, rep)| {
                            json!({
                                "projective": p.to_json(),
                                "holds": rep.holds,
                                "witness": rep.failing.as_ref().map(square_json),
                            })
                        })
                        .collect();
                    Ok(Run::with(
                        if r.holds {
                            Outcome::Positive
                        } else {
                            Outcome::Negative
                        },
                        json!({"holds": r.holds, "per_projective": per}),
                    ))
                }
                other => Err(Failure::input(format!("cannot run fib on a {other}"))),
            }
        }
        Command::Weq { input } => {
            let v = read(input)?;
            match detect(&v) {
                "sset-map" => {
                    let m = sset_map_from_objects(&v).map_err(|e| Failure::input(e.to_string()))?;
                    let r = weq_oracle(&m, cli.trunc);
                    Ok(Run::with(
                        if r.is_weq {
                            Outcome::Positive
                        } else {
                            Outcome::Negative
                        },
                        json!({
                            "is_weq": r.is_weq,
                            "pi0_bijective": r.pi0_bijective,
                            "cone_homology": homology_json(&r.cone),
                        }),
                    ))
                }
                "simp-morphism" => {
                    let f = SimpMorphism::from_json(&v)?;
                    f.validate()?;
                    let projectives =
                        load_projectives(&cli.projectives, &[&f.source, &f.target])?;
                    let r = is_weq(&f, &projectives, cli.trunc)?;
                    let per: Vec<Value> = r
                        .per_projective
                        .iter()
                        .map(|(p, w)| {
                            json!({
                                "projective": p.to_json(),
                                "is_weq": w.is_weq,
                                "cone_homology": homology_json(&w.cone),
                            })
                        })
                        .collect();
                    Ok(Run::with(
                        if r.holds {
                            Outcome::Positive
                        } else {
                            Outcome::Negative
                        },
                        json!({"holds": r.holds, "per_projective": per}),
                    ))
                }
                other => Err(Failure::input(format!("cannot run weq on a {other}"))),
            }
        }
        Command::Hocolim { input } => {
            let v = read(input)?;
            let d = Diagram::from_json(&v)?;
            let out = hocolim(&d, cli.trunc)?;
            let body = match &out.result {
                Computed::SSet(x) => json!({
                    "kind": "sset",
                    "object": x.to_json(),
                    "homology": homology_json(&homology(x, cli.trunc)),
                }),
                Computed::Sobj(x) => json!({
                    "kind": "sobj",
                    "object": x.to_json(),
                }),
            };
            Ok(Run {
                outcome: Outcome::Positive,
                body,
                certificates: Vec::new(),
                warnings: out.warnings,
            })
        }
        Command::Holim { input } => {
            let v = read(input)?;
            let d = Diagram::from_json(&v)?;
            let out = holim(&d, cli.trunc, &mut budget)?;
            let body = match &out.result {
                Computed::SSet(x) => json!({
                    "kind": "sset",
                    "object": x.to_json(),
                    "homology": homology_json(&homology(x, cli.trunc)),
                }),
                Computed::Sobj(x) => json!({
                    "kind": "sobj",
                    "object": x.to_json(),
                }),
            };
            Ok(Run {
                outcome: Outcome::Positive,
                body,
                certificates: Vec::new(),
                warnings: out.warnings,
            })
        }
        Command::Kan {
            input,
            side,
            functor,
        } => {
            let v = read(input)?;
            let d = Diagram::from_json(&v)?;
            let fv = read(functor)?;
            let target = FinCategory::from_json(
                fv.get("target_category")
                    .ok_or_else(|| Failure::input("functor file lacks \"target_category\""))?,
            )
            .map_err(|e| Failure::input(e.to_string()))?
            .shared();
            let alpha = FinFunctor::from_json(&fv, d.shape().clone(), target)
                .map_err(|e| Failure::input(e.to_string()))?;
            let out = match side {
                KanSide::Left => hokan_left(&alpha, &d, cli.trunc)?,
                KanSide::Right => hokan_right(&alpha, &d, cli.trunc, &mut budget)?,
            };
            Ok(Run::ok(json!({ "diagram": out.to_json() })))
        }
        Command::Verify { input } => {
            let v = read(input)?;
            match verify_report(&v) {
                Ok(outcome) => Ok(Run::with(outcome, json!({"verified": true}))),
                Err(e) => Ok(Run::with(
                    Outcome::Negative,
                    json!({"verified": false, "certificate": e.index, "reason": e.reason}),
                )),
            }
        }
    }
}

/// An isomorphism certificate for consumers wanting re-checkable witnesses
/// of object comparisons; currently exercised by the acceptance suite.
#[allow(dead_code)]
fn iso_cert_passthrough(map: &wfskit::sset::SSetMap) -> Value {
    iso_certificate(map)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Nerve { .. } => "nerve",
        Command::Lift { .. } => "lift",
        Command::Classify { .. } => "classify",
        Command::Factor { .. } => "factor",
        Command::Boxcheck { .. } => "boxcheck",
        Command::Extensive { .. } => "extensive",
        Command::Cofibrant { .. } => "cofibrant",
        Command::Reedy { .. } => "reedy",
        Command::Fib { .. } => "fib",
        Command::Weq { .. } => "weq",
        Command::Hocolim { .. } => "hocolim",
        Command::Holim { .. } => "holim",
        Command::Kan { .. } => "kan",
        Command::Verify { .. } => "verify",
    }
}

fn main() {
    let cli = Cli::parse();
    let params = Params {
        trunc: cli.trunc,
        stages: cli.stages,
        budget: cli.budget,
        seed: cli.seed,
    };
    let mut inputs = Vec::new();
    let run = match run(&cli, &mut inputs) {
        Ok(r) => r,
        Err(f) => Run::with(f.outcome, json!({ "error": f.message })),
    };
    let report = envelope(
        command_name(&cli.command),
        &params,
        &inputs,
        run.outcome,
        run.body,
        run.certificates,
        run.warnings,
    );
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    match &cli.out {
        Some(path) => {
            if let Err(e) = write_atomic(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                std::process::exit(Outcome::InputError.code());
            }
        }
        None => println!("{text}"),
    }
    std::process::exit(run.outcome.code());
}

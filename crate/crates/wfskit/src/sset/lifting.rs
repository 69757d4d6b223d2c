//! Lifting problems against horn and boundary inclusions.
//!
//! All deciders are exhaustive backtracking searches under an explicit
//! [`Budget`]; running out of budget is reported as its own outcome and is
//! never treated as a refutation.

use super::maps::{enumerate_maps, Budget, BudgetExceeded, MapConstraints};
use super::{Cell, FinSimplicialSet, SSetMap};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A commuting square `right . top = bottom . left` with `left: A -> B`
/// vertical on the left and `right: X -> Y` vertical on the right.
#[derive(Debug, Clone)]
pub struct LiftingSquare {
    pub left: SSetMap,
    pub top: SSetMap,
    pub right: SSetMap,
    pub bottom: SSetMap,
}

impl LiftingSquare {
    pub fn new(
        left: SSetMap,
        top: SSetMap,
        right: SSetMap,
        bottom: SSetMap,
    ) -> Result<Self, String> {
        if top.source() != left.source() {
            return Err("top and left must share a source".into());
        }
        if top.target() != right.source() || bottom.source() != left.target() {
            return Err("square corners do not match".into());
        }
        if bottom.target() != right.target() {
            return Err("bottom and right must share a target".into());
        }
        let via_top = top.then(&right).map_err(|e| e.to_string())?;
        let via_bottom = left.then(&bottom).map_err(|e| e.to_string())?;
        if via_top != via_bottom {
            return Err("square does not commute".into());
        }
        Ok(LiftingSquare {
            left,
            top,
            right,
            bottom,
        })
    }

    /// Searches for a diagonal filler `h: B -> X` with `h . left = top` and
    /// `right . h = bottom`.
    pub fn solve(&self, budget: &mut Budget) -> Result<Option<SSetMap>, BudgetExceeded> {
        let mut constraints = MapConstraints::default();
        for (_, a) in self.left.source().generators() {
            let down = self.left.eval(&Cell::nd(a.clone()));
            let img = self.top.eval(&Cell::nd(a.clone()));
            if down.is_nondegenerate() {
                if let Some(prev) = constraints.forced.get(&down.nd) {
                    if prev != &img {
                        return Ok(None);
                    }
                }
                constraints.forced.insert(down.nd, img);
            } else {
                constraints.degenerate.push((down.word, down.nd, img));
            }
        }
        constraints.post = Some((self.right.clone(), self.bottom.assignment().clone()));
        let found = enumerate_maps(
            self.left.target(),
            self.right.source(),
            &constraints,
            Some(1),
            budget,
        )?;
        Ok(found.into_iter().next())
    }
}

/// Outcome of an exhaustive right-lifting-property check.
#[derive(Debug, Clone)]
pub struct RlpReport {
    pub holds: bool,
    /// Number of commuting squares examined.
    pub squares: usize,
    /// A square with no filler, when one exists.
    pub failing: Option<LiftingSquare>,
}

/// Checks that `right` has the right lifting property against `left` by
/// enumerating every commuting square and solving each.
pub fn has_rlp(
    left: &SSetMap,
    right: &SSetMap,
    budget: &mut Budget,
) -> Result<RlpReport, BudgetExceeded> {
    let tops = enumerate_maps(
        left.source(),
        right.source(),
        &MapConstraints::default(),
        None,
        budget,
    )?;
    let mut squares = 0;
    for top in tops {
        // bottoms compatible with this top: bottom . left = right . top
        let mut constraints = MapConstraints::default();
        let mut consistent = true;
        for (_, a) in left.source().generators() {
            let down = left.eval(&Cell::nd(a.clone()));
            let img = right.eval(&top.eval(&Cell::nd(a.clone())));
            if down.is_nondegenerate() {
                if let Some(prev) = constraints.forced.get(&down.nd) {
                    if prev != &img {
                        consistent = false;
                        break;
                    }
                }
                constraints.forced.insert(down.nd, img);
            } else {
                constraints.degenerate.push((down.word, down.nd, img));
            }
        }
        if !consistent {
            continue;
        }
        let bottoms = enumerate_maps(
            left.target(),
            right.target(),
            &constraints,
            None,
            budget,
        )?;
        for bottom in bottoms {
            squares += 1;
            let square = LiftingSquare {
                left: left.clone(),
                top: top.clone(),
                right: right.clone(),
                bottom,
            };
            if square.solve(budget)?.is_none() {
                return Ok(RlpReport {
                    holds: false,
                    squares,
                    failing: Some(square),
                });
            }
        }
    }
    Ok(RlpReport {
        holds: true,
        squares,
        failing: None,
    })
}

/// Outcome of a fibration check over a range of generating inclusions.
#[derive(Debug, Clone)]
pub struct FibrationReport {
    pub holds: bool,
    /// Simplex dimensions whose generating inclusions were tested.
    pub dims_checked: Vec<usize>,
    pub squares: usize,
    pub failing: Option<LiftingSquare>,
}

/// Dimension range for generating-inclusion checks: one above everything in
/// sight, so that degenerate top simplices are also exercised.
fn check_range(f: &SSetMap) -> usize {
    f.source().dim_bound().max(f.target().dim_bound()) + 1
}

/// Decides the horn-filling condition for `f` against all `Λ_{n,k} -> Δ_n`
/// with `1 <= n <= dim bound + 1`.
pub fn is_kan_fibration(f: &SSetMap, budget: &mut Budget) -> Result<FibrationReport, BudgetExceeded> {
    is_kan_fibration_to(f, check_range(f), budget)
}

/// Horn-filling check capped at an explicit top dimension.
pub fn is_kan_fibration_to(
    f: &SSetMap,
    top: usize,
    budget: &mut Budget,
) -> Result<FibrationReport, BudgetExceeded> {
    let mut squares = 0;
    let mut dims = Vec::new();
    for n in 1..=top {
        dims.push(n);
        let dn = FinSimplicialSet::delta(n).shared();
        for k in 0..=n {
            let horn = FinSimplicialSet::horn(n, k)
                .expect("k <= n")
                .shared();
            let inc = SSetMap::inclusion(horn, dn.clone()).expect("horn includes");
            let report = has_rlp(&inc, f, budget)?;
            squares += report.squares;
            if !report.holds {
                return Ok(FibrationReport {
                    holds: false,
                    dims_checked: dims,
                    squares,
                    failing: report.failing,
                });
            }
        }
    }
    Ok(FibrationReport {
        holds: true,
        dims_checked: dims,
        squares,
        failing: None,
    })
}

/// Decides the right lifting property against all `∂Δ_n -> Δ_n` with
/// `0 <= n <= dim bound + 1`.
pub fn is_trivial_fibration(
    f: &SSetMap,
    budget: &mut Budget,
) -> Result<FibrationReport, BudgetExceeded> {
    is_trivial_fibration_to(f, check_range(f), budget)
}

/// Boundary-filling check capped at an explicit top dimension.
pub fn is_trivial_fibration_to(
    f: &SSetMap,
    top: usize,
    budget: &mut Budget,
) -> Result<FibrationReport, BudgetExceeded> {
    let mut squares = 0;
    let mut dims = Vec::new();
    for n in 0..=top {
        dims.push(n);
        let dn = FinSimplicialSet::delta(n).shared();
        let bd = FinSimplicialSet::boundary(n).shared();
        let inc = SSetMap::inclusion(bd, dn).expect("boundary includes");
        let report = has_rlp(&inc, f, budget)?;
        squares += report.squares;
        if !report.holds {
            return Ok(FibrationReport {
                holds: false,
                dims_checked: dims,
                squares,
                failing: report.failing,
            });
        }
    }
    Ok(FibrationReport {
        holds: true,
        dims_checked: dims,
        squares,
        failing: None,
    })
}

/// A map to the point, for fibrancy checks of an object.
pub fn to_point(x: Arc<FinSimplicialSet>) -> SSetMap {
    let pt = FinSimplicialSet::delta(0).shared();
    SSetMap::terminal_map(x, pt)
}

/// Constant map at a vertex.
pub fn constant_map(
    source: Arc<FinSimplicialSet>,
    target: Arc<FinSimplicialSet>,
    vertex: &str,
) -> SSetMap {
    let assign: BTreeMap<String, Cell> = source
        .generators()
        .map(|(n, id)| {
            (
                id.clone(),
                Cell {
                    word: (0..n).rev().collect(),
                    nd: vertex.to_string(),
                },
            )
        })
        .collect();
    SSetMap::new_unchecked(source, target, assign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_is_kan_interval_is_not() {
        let pt = FinSimplicialSet::delta(0).shared();
        let r = is_kan_fibration(&to_point(pt), &mut Budget::standard()).unwrap();
        assert!(r.holds);

        // Δ_1 has an outer horn Λ_{2,0} it cannot fill
        let d1 = FinSimplicialSet::delta(1).shared();
        let r = is_kan_fibration(&to_point(d1), &mut Budget::standard()).unwrap();
        assert!(!r.holds);
        assert!(r.failing.is_some());
    }

    #[test]
    fn trivial_fibration_checks() {
        // identities always have every lifting property
        let d2 = FinSimplicialSet::delta(2).shared();
        let r = is_trivial_fibration(&SSetMap::identity(d2.clone()), &mut Budget::standard())
            .unwrap();
        assert!(r.holds, "squares: {}", r.squares);

        // Δ_2 -> * is not one: the edge from vertex 1 to vertex 0 demanded
        // over ∂Δ_1 has no preimage
        let r = is_trivial_fibration(&to_point(d2), &mut Budget::standard()).unwrap();
        assert!(!r.holds);

        let b2 = FinSimplicialSet::boundary(2).shared();
        let r = is_trivial_fibration(&to_point(b2), &mut Budget::standard()).unwrap();
        assert!(!r.holds);
    }

    #[test]
    fn horn_lift_found_explicitly() {
        // fill Λ_{2,1} -> Δ_2 over the point: lift exists into Δ_2
        let d2 = FinSimplicialSet::delta(2).shared();
        let horn = FinSimplicialSet::horn(2, 1).unwrap().shared();
        let pt = FinSimplicialSet::delta(0).shared();
        let square = LiftingSquare::new(
            SSetMap::inclusion(horn.clone(), d2.clone()).unwrap(),
            SSetMap::inclusion(horn, d2.clone()).unwrap(),
            SSetMap::terminal_map(d2.clone(), pt.clone()),
            SSetMap::terminal_map(d2, pt),
        )
        .unwrap();
        let lift = square.solve(&mut Budget::standard()).unwrap();
        assert!(lift.is_some());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let d2 = FinSimplicialSet::delta(2).shared();
        let mut tiny = Budget::new(3);
        let r = is_trivial_fibration(&to_point(d2), &mut tiny);
        assert!(r.is_err());
    }
}

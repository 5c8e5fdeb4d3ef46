//! Finite approach spaces presented by their convergence matrix.
//!
//! A space on carrier `X` is the matrix `dm` with `dm(z, x)` the cost of the
//! principal ultrafilter at `z` converging to `x`. Validity means a zero
//! diagonal (reflexivity) and the triangle bound
//! `dm(z, y) + dm(y, x) >= dm(z, x)` (transitivity); on finite carriers the
//! general convergence axioms reduce to exactly these, which is checked here
//! by running both a direct matrix scan and a full enumeration over iterated
//! ultrafilters and insisting they agree.

use serde::Serialize;
use thiserror::Error;

use crate::cost::Cost;
use crate::numrel::{NumRel, PointSet, RelError, SetMap};
use crate::ultra::{self, FinUltrafilter, MAX_LITERAL_CARRIER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error(transparent)]
    Carrier(#[from] RelError),
    #[error("not a valid space: {0}")]
    Axiom(AxiomViolation),
    #[error("carrier of {0} points is too large for subset enumeration")]
    TooLarge(usize),
}

/// First failing convergence axiom, with the witnessing points and both
/// sides of the broken inequality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "kebab-case")]
pub enum AxiomViolation {
    Reflexivity { x: String, value: Cost },
    Transitivity { z: String, y: String, x: String, lhs: Cost, rhs: Cost },
}

impl std::fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxiomViolation::Reflexivity { x, value } => {
                write!(f, "reflexivity fails at {x}: self-distance {value} != 0")
            }
            AxiomViolation::Transitivity { z, y, x, lhs, rhs } => {
                write!(f, "transitivity fails at ({z}, {y}, {x}): {lhs} < {rhs}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub violation: Option<AxiomViolation>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.violation.is_none()
    }
}

/// A finite approach space. `dm` is row-major: `dm(z, x)` sits at
/// `z * n + x`. Construction via [`ApproachSpace::approach`] guarantees both
/// axioms; [`ApproachSpace::pseudo`] guarantees only the zero diagonal and
/// records whether the triangle bound happens to hold.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ApproachSpace {
    points: PointSet,
    dm: Vec<Cost>,
    triangle_ok: bool,
}

impl ApproachSpace {
    /// Builds a space and verifies both convergence axioms with the two
    /// independent checkers.
    pub fn approach(points: PointSet, rows: Vec<Vec<Cost>>) -> Result<ApproachSpace, SpaceError> {
        let dm = flatten(&points, rows)?;
        let report = check_axioms(&points, &dm);
        match report.violation {
            None => Ok(ApproachSpace { points, dm, triangle_ok: true }),
            Some(v) => Err(SpaceError::Axiom(v)),
        }
    }

    /// Builds a merely reflexive structure: the diagonal must be zero, the
    /// triangle bound is checked but allowed to fail.
    pub fn pseudo(points: PointSet, rows: Vec<Vec<Cost>>) -> Result<ApproachSpace, SpaceError> {
        let dm = flatten(&points, rows)?;
        let n = points.len();
        for x in 0..n {
            if !dm[x * n + x].is_zero() {
                return Err(SpaceError::Axiom(AxiomViolation::Reflexivity {
                    x: points.label(x).to_string(),
                    value: dm[x * n + x],
                }));
            }
        }
        let triangle_ok = check_axioms(&points, &dm).pass();
        Ok(ApproachSpace { points, dm, triangle_ok })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Whether the triangle bound holds (always true for `approach`-built
    /// spaces, recorded at construction for `pseudo`-built ones).
    pub fn is_approach(&self) -> bool {
        self.triangle_ok
    }

    pub fn dm(&self, z: usize, x: usize) -> Cost {
        self.dm[z * self.points.len() + x]
    }

    /// Row `z` of the convergence matrix: the distances from `z`.
    pub fn row(&self, z: usize) -> Vec<Cost> {
        let n = self.points.len();
        self.dm[z * n..(z + 1) * n].to_vec()
    }

    pub fn rows(&self) -> Vec<Vec<Cost>> {
        (0..self.points.len()).map(|z| self.row(z)).collect()
    }

    pub fn entries(&self) -> &[Cost] {
        &self.dm
    }

    /// Largest finite entry, `0` when there is none.
    pub fn max_finite_entry(&self) -> Cost {
        Cost::sup_of(self.dm.iter().copied().filter(|c| c.is_finite()))
    }

    /// The convergence matrix as a relation `UX ⇸ X` under the principal
    /// identification.
    pub fn conv_rel(&self) -> NumRel {
        let n = self.points.len();
        NumRel::from_fn(&self.points.ultra(), &self.points, |i, x| self.dm[i * n + x])
    }

    /// Point-set distance `δ(A, x) = min_{y in A} dm(y, x)`; `inf` for the
    /// empty set. `subset` is a bitmask over the carrier.
    pub fn dist(&self, subset: u64, x: usize) -> Cost {
        let n = self.points.len();
        Cost::inf_of((0..n).filter(|y| subset & (1 << y) != 0).map(|y| self.dm(y, x)))
    }

    /// Tabulates `δ` over every subset of the carrier.
    pub fn distance_table(&self) -> DistanceTable {
        let n = self.points.len();
        assert!(n <= MAX_LITERAL_CARRIER, "carrier too large for subset tabulation");
        let values = (0..1u64 << n)
            .map(|mask| (0..n).map(|x| self.dist(mask, x)).collect())
            .collect();
        DistanceTable { points: self.points.clone(), values }
    }

    /// Product space: pairs with the componentwise join of distances.
    pub fn product(&self, other: &ApproachSpace) -> ApproachSpace {
        let points = self.points.product(&other.points);
        let n2 = other.points.len();
        let m = points.len();
        let mut dm = Vec::with_capacity(m * m);
        for zw in 0..m {
            let (z, w) = (zw / n2, zw % n2);
            for xy in 0..m {
                let (x, y) = (xy / n2, xy % n2);
                dm.push(self.dm(z, x).join(other.dm(w, y)));
            }
        }
        let triangle_ok =
            (self.triangle_ok && other.triangle_ok) || check_matrix(&points, &dm).pass();
        debug_assert_eq!(triangle_ok, check_matrix(&points, &dm).pass());
        ApproachSpace { points, dm, triangle_ok }
    }

    /// The two-variable probe function at `z`:
    /// `phi(x) = min_y (u v dm(y, x)) + (v v dm(z, y))`.
    pub fn phi(&self, z: usize, u: Cost, v: Cost) -> Vec<Cost> {
        let n = self.points.len();
        (0..n)
            .map(|x| Cost::inf_of((0..n).map(|y| u.join(self.dm(y, x)) + v.join(self.dm(z, y)))))
            .collect()
    }
}

fn flatten(points: &PointSet, rows: Vec<Vec<Cost>>) -> Result<Vec<Cost>, SpaceError> {
    let n = points.len();
    if rows.len() != n {
        return Err(RelError::ShapeMismatch { rows: n, cols: n, got: rows.len() }.into());
    }
    let mut dm = Vec::with_capacity(n * n);
    for row in rows {
        if row.len() != n {
            return Err(RelError::ShapeMismatch { rows: n, cols: n, got: row.len() }.into());
        }
        dm.extend(row);
    }
    Ok(dm)
}

/// Shape-checks a row list and reports on its axioms without constructing
/// a space; lets callers surface violations as data rather than errors.
pub fn check_rows(points: &PointSet, rows: Vec<Vec<Cost>>) -> Result<AxiomReport, SpaceError> {
    let dm = flatten(points, rows)?;
    Ok(check_axioms(points, &dm))
}

/// Matrix route: scan the diagonal, then all triples in `(z, y, x)` order.
pub fn check_matrix(points: &PointSet, dm: &[Cost]) -> AxiomReport {
    let n = points.len();
    assert_eq!(dm.len(), n * n);
    for x in 0..n {
        let value = dm[x * n + x];
        if !value.is_zero() {
            return AxiomReport {
                violation: Some(AxiomViolation::Reflexivity { x: points.label(x).to_string(), value }),
            };
        }
    }
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                let lhs = dm[z * n + y] + dm[y * n + x];
                let rhs = dm[z * n + x];
                if lhs < rhs {
                    return AxiomReport {
                        violation: Some(AxiomViolation::Transitivity {
                            z: points.label(z).to_string(),
                            y: points.label(y).to_string(),
                            x: points.label(x).to_string(),
                            lhs,
                            rhs,
                        }),
                    };
                }
            }
        }
    }
    AxiomReport { violation: None }
}

/// Enumerative route: the reflexivity comparison against the converse of
/// the unit and the transitivity bound over every iterated ultrafilter,
/// evaluated through the ultrafilter machinery. Scans in the same order as
/// the matrix route so witnesses coincide.
pub fn check_enumerative(points: &PointSet, dm: &[Cost]) -> AxiomReport {
    let n = points.len();
    assert_eq!(dm.len(), n * n);
    let ux = points.ultra();
    let a = NumRel::from_fn(&ux, points, |i, x| dm[i * n + x]);
    let e = SetMap::new(points.clone(), ux.clone(), (0..n).collect()).unwrap();
    let e_conv = NumRel::from_map(&e).converse();
    for i in 0..n {
        for x in 0..n {
            if e_conv.at(i, x) < a.at(i, x) {
                return AxiomReport {
                    violation: Some(AxiomViolation::Reflexivity {
                        x: points.label(x).to_string(),
                        value: a.at(i, x),
                    }),
                };
            }
        }
    }
    let a_ext = ultra::extend(&a);
    let uux = ux.ultra();
    for (zi, big) in FinUltrafilter::enumerate(&uux).iter().enumerate() {
        let flattened = ultra::mult(big, &ux);
        for yi in 0..n {
            for x in 0..n {
                let lhs = a_ext.at(zi, yi) + a.at(yi, x);
                let rhs = a.at(flattened.point(), x);
                if lhs < rhs {
                    return AxiomReport {
                        violation: Some(AxiomViolation::Transitivity {
                            z: points.label(zi).to_string(),
                            y: points.label(yi).to_string(),
                            x: points.label(x).to_string(),
                            lhs,
                            rhs,
                        }),
                    };
                }
            }
        }
    }
    AxiomReport { violation: None }
}

/// Runs both checkers and asserts they return the same report; a mismatch
/// is a bug in one of them, never something to resolve silently.
pub fn check_axioms(points: &PointSet, dm: &[Cost]) -> AxiomReport {
    let by_matrix = check_matrix(points, dm);
    let by_enumeration = check_enumerative(points, dm);
    assert_eq!(by_matrix, by_enumeration, "axiom checkers disagree");
    by_matrix
}

/// The distance view `δ: subsets x points -> costs`, tabulated.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DistanceTable {
    points: PointSet,
    values: Vec<Vec<Cost>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "kebab-case")]
pub enum DeltaViolation {
    PointSelf { x: String, value: Cost },
    EmptySet { x: String, value: Cost },
    Union { a: Vec<String>, b: Vec<String>, x: String, lhs: Cost, rhs: Cost },
    Tower { a: Vec<String>, eps: Cost, x: String, lhs: Cost, rhs: Cost },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    pub violation: Option<DeltaViolation>,
}

impl DeltaReport {
    pub fn pass(&self) -> bool {
        self.violation.is_none()
    }
}

impl DistanceTable {
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn value(&self, subset: u64, x: usize) -> Cost {
        self.values[subset as usize][x]
    }

    fn member_labels(&self, mask: u64) -> Vec<String> {
        (0..self.points.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.points.label(i).to_string())
            .collect()
    }

    /// Recovers the convergence matrix: `dm(y, x) = sup_{A containing y} δ(A, x)`.
    pub fn conv_matrix(&self) -> Vec<Cost> {
        let n = self.points.len();
        let mut dm = vec![Cost::ZERO; n * n];
        for y in 0..n {
            for x in 0..n {
                dm[y * n + x] = Cost::sup_of(
                    (0..1u64 << n).filter(|m| m & (1 << y) != 0).map(|m| self.value(m, x)),
                );
            }
        }
        dm
    }

    /// Rebuilds a validated space from the view.
    pub fn to_space(&self) -> Result<ApproachSpace, SpaceError> {
        let n = self.points.len();
        let dm = self.conv_matrix();
        ApproachSpace::approach(
            self.points.clone(),
            (0..n).map(|y| dm[y * n..(y + 1) * n].to_vec()).collect(),
        )
    }

    /// The finite grid of tower parameters that decides the tower axiom:
    /// every table value, every pairwise difference of finite values, `0`,
    /// and `inf`. Between consecutive grid values the enlargement
    /// `A^(eps)` is constant and the tower inequality is tightest at the
    /// lower endpoint, so checking the grid decides the continuum.
    pub fn epsilon_grid(&self) -> Vec<Cost> {
        let mut finite: Vec<Cost> = self
            .values
            .iter()
            .flatten()
            .copied()
            .filter(|c| c.is_finite())
            .collect();
        finite.sort_unstable();
        finite.dedup();
        let mut grid = vec![Cost::ZERO, Cost::Infinity];
        for (i, &a) in finite.iter().enumerate() {
            grid.push(a);
            for &b in &finite[..i] {
                grid.push(a.ominus(b));
            }
        }
        grid.sort_unstable();
        grid.dedup();
        grid
    }

    /// Checks the distance-view axioms: zero self-distance of singletons,
    /// `inf` on the empty set, exact union, and the tower bound
    /// `δ(A^(eps), x) + eps >= δ(A, x)` over the decisive grid.
    pub fn check_axioms(&self) -> DeltaReport {
        let n = self.points.len();
        let full = 1u64 << n;
        for x in 0..n {
            let value = self.value(1 << x, x);
            if !value.is_zero() {
                return DeltaReport {
                    violation: Some(DeltaViolation::PointSelf {
                        x: self.points.label(x).to_string(),
                        value,
                    }),
                };
            }
        }
        for x in 0..n {
            let value = self.value(0, x);
            if !value.is_infinite() {
                return DeltaReport {
                    violation: Some(DeltaViolation::EmptySet {
                        x: self.points.label(x).to_string(),
                        value,
                    }),
                };
            }
        }
        for a in 0..full {
            for b in 0..full {
                for x in 0..n {
                    let lhs = self.value(a | b, x);
                    let rhs = self.value(a, x).meet(self.value(b, x));
                    if lhs != rhs {
                        return DeltaReport {
                            violation: Some(DeltaViolation::Union {
                                a: self.member_labels(a),
                                b: self.member_labels(b),
                                x: self.points.label(x).to_string(),
                                lhs,
                                rhs,
                            }),
                        };
                    }
                }
            }
        }
        let grid = self.epsilon_grid();
        for a in 0..full {
            for &eps in &grid {
                let enlarged = (0..n).filter(|&y| self.value(a, y) <= eps).fold(0u64, |m, y| m | 1 << y);
                for x in 0..n {
                    let lhs = self.value(enlarged, x) + eps;
                    let rhs = self.value(a, x);
                    if lhs < rhs {
                        return DeltaReport {
                            violation: Some(DeltaViolation::Tower {
                                a: self.member_labels(a),
                                eps,
                                x: self.points.label(x).to_string(),
                                lhs,
                                rhs,
                            }),
                        };
                    }
                }
            }
        }
        DeltaReport { violation: None }
    }
}

/// Half-line convergence: an ultrafilter of costs converging at `v0` sees
/// the point `v` at distance `v ominus v0`.
pub fn halfline_conv(v0: Cost, v: Cost) -> Cost {
    v.ominus(v0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum ContractionViolation {
    Pair { z: String, x: String, lhs: Cost, rhs: Cost },
    Set { a: Vec<String>, x: String, lhs: Cost, rhs: Cost },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractionReport {
    pub violation: Option<ContractionViolation>,
}

impl ContractionReport {
    pub fn pass(&self) -> bool {
        self.violation.is_none()
    }
}

/// Whether `f` is a contraction from `s` to `t`, decided by the convergence
/// form `dm_s(z, x) >= dm_t(f z, f x)` and cross-checked against the
/// distance form `δ_s(A, x) >= δ_t(f A, f x)` over all subsets. The two
/// verdicts must agree; the reported witness comes from the convergence
/// form when both fail.
pub fn is_contraction(f: &SetMap, s: &ApproachSpace, t: &ApproachSpace) -> ContractionReport {
    assert!(f.source() == s.points() && f.target() == t.points(), "map and spaces must line up");
    let n = s.len();
    assert!(n <= MAX_LITERAL_CARRIER, "carrier too large for subset enumeration");
    let mut pair_violation = None;
    'conv: for z in 0..n {
        for x in 0..n {
            let lhs = s.dm(z, x);
            let rhs = t.dm(f.apply(z), f.apply(x));
            if lhs < rhs {
                pair_violation = Some(ContractionViolation::Pair {
                    z: s.points().label(z).to_string(),
                    x: s.points().label(x).to_string(),
                    lhs,
                    rhs,
                });
                break 'conv;
            }
        }
    }
    let mut set_violation = None;
    'dist: for a in 0..1u64 << n {
        let image = (0..n).filter(|&y| a & (1 << y) != 0).fold(0u64, |m, y| m | 1 << f.apply(y));
        for x in 0..n {
            let lhs = s.dist(a, x);
            let rhs = t.dist(image, f.apply(x));
            if lhs < rhs {
                set_violation = Some(ContractionViolation::Set {
                    a: (0..n)
                        .filter(|i| a & (1 << i) != 0)
                        .map(|i| s.points().label(i).to_string())
                        .collect(),
                    x: s.points().label(x).to_string(),
                    lhs,
                    rhs,
                });
                break 'dist;
            }
        }
    }
    assert_eq!(
        pair_violation.is_none(),
        set_violation.is_none(),
        "contraction checkers disagree"
    );
    ContractionReport { violation: pair_violation.or(set_violation) }
}

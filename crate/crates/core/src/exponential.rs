//! The function-space distance on contractions into the half-line, and the
//! numeric replay of the exponentiability proof chain.
//!
//! The infinite function space is never materialized. All computations run
//! over finite probe families of certified contractions: the distance `d`
//! between a principal ultrafilter and a function has an exact closed form
//! ([`d_formula`]), guarded by a brute-force evaluation of the defining
//! ultrafilter condition ([`d_brute`]), and the proof chain is replayed
//! step by step with every intermediate quantity reported ([`replay`]).

use serde::Serialize;

use crate::approach::ApproachSpace;
use crate::cost::Cost;
use crate::numrel::{NumRel, PointSet, SetMap};
use crate::ultra::{self, FinUltrafilter};

/// Witness that a value vector is not a contraction into the half-line:
/// the pair where the distance bound `dm(x0, x) >= phi(x) ominus phi(x0)`
/// breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateViolation {
    pub x0: String,
    pub x: String,
    pub bound: Cost,
    pub needed: Cost,
}

impl std::fmt::Display for CertificateViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "not a contraction: at ({}, {}) the distance {} is below the required {}",
            self.x0, self.x, self.bound, self.needed
        )
    }
}

/// A certified contraction from a space into the half-line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ContractionFn {
    space: ApproachSpace,
    values: Vec<Cost>,
}

impl ContractionFn {
    /// Certifies the pairwise condition `dm(x0, x) >= phi(x) ominus phi(x0)`
    /// and stores the function. The relational route
    /// ([`prop42_certificate`]) must agree; the constructor asserts it does.
    pub fn certify(space: &ApproachSpace, values: Vec<Cost>) -> Result<ContractionFn, CertificateViolation> {
        assert_eq!(values.len(), space.len(), "value vector must cover the carrier");
        let direct = pairwise_certificate(space, &values);
        let relational = prop42_certificate(space, &values);
        assert_eq!(
            direct.is_none(),
            relational.is_none(),
            "contraction certificate routes disagree"
        );
        match direct {
            None => Ok(ContractionFn { space: space.clone(), values }),
            Some(v) => Err(v),
        }
    }

    pub fn space(&self) -> &ApproachSpace {
        &self.space
    }

    pub fn values(&self) -> &[Cost] {
        &self.values
    }

    pub fn at(&self, x: usize) -> Cost {
        self.values[x]
    }

    /// Canonical label: the value tuple, rendered exactly.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.values.iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

fn pairwise_certificate(space: &ApproachSpace, values: &[Cost]) -> Option<CertificateViolation> {
    let n = space.len();
    for x0 in 0..n {
        for x in 0..n {
            let bound = space.dm(x0, x);
            let needed = values[x].ominus(values[x0]);
            if bound < needed {
                return Some(CertificateViolation {
                    x0: space.points().label(x0).to_string(),
                    x: space.points().label(x).to_string(),
                    bound,
                    needed,
                });
            }
        }
    }
    None
}

/// Witness that the relational contraction condition fails at `x`:
/// the composite of the unit, the extended function and the convergence
/// comes out strictly below the function value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prop42Violation {
    pub x: String,
    pub lhs: Cost,
    pub rhs: Cost,
}

/// The relational contraction condition: the composite
/// `e_1 ; extend(phi) ; a` (a relation `1 ⇸ X`) must dominate `phi` in the
/// truth order, i.e. be numerically `>=` pointwise. Returns the first
/// failing point.
pub fn prop42_certificate(space: &ApproachSpace, values: &[Cost]) -> Option<Prop42Violation> {
    let unit = PointSet::unit();
    let phi_rel = NumRel::from_fn(&unit, space.points(), |_, y| values[y]);
    let e1 = NumRel::from_map(&SetMap::new(unit.clone(), unit.ultra(), vec![0]).unwrap());
    let composite = e1
        .compose(&ultra::extend(&phi_rel))
        .unwrap()
        .compose(&space.conv_rel())
        .unwrap();
    (0..space.len()).find_map(|x| {
        let lhs = composite.at(0, x);
        let rhs = values[x];
        (lhs < rhs).then(|| Prop42Violation {
            x: space.points().label(x).to_string(),
            lhs,
            rhs,
        })
    })
}

/// The row of the convergence matrix at `z` as a function; certified by
/// the triangle bound, so this cannot fail on a valid space.
pub fn yoneda_row(space: &ApproachSpace, z: usize) -> Result<ContractionFn, CertificateViolation> {
    ContractionFn::certify(space, space.row(z))
}

/// All rows of the convergence matrix as certified functions.
pub fn yoneda(space: &ApproachSpace) -> Result<Vec<ContractionFn>, CertificateViolation> {
    (0..space.len()).map(|z| yoneda_row(space, z)).collect()
}

/// Pointwise join with `u`. Scaling preserves the certificate; the
/// constructor asserts it.
pub fn scale_fn(u: Cost, phi: &ContractionFn) -> ContractionFn {
    let values = phi.values.iter().map(|&c| u.join(c)).collect();
    ContractionFn::certify(&phi.space, values).expect("scaling preserves the contraction certificate")
}

/// The closed form of the function-space distance from the principal
/// ultrafilter at `psi` to `phi`:
/// `inf { u | forall x0, x: (u v dm(x0, x)) + psi(x0) >= phi(x) }`,
/// which is the largest `phi(x) ominus psi(x0)` strictly above
/// `dm(x0, x)`, or `0` when no pair needs help. Defined for arbitrary
/// value vectors; the certified entry point is [`d_principal`].
pub fn d_formula(space: &ApproachSpace, psi: &[Cost], phi: &[Cost]) -> Cost {
    let n = space.len();
    assert!(psi.len() == n && phi.len() == n);
    Cost::sup_of((0..n).flat_map(|x0| (0..n).map(move |x| (x0, x))).filter_map(|(x0, x)| {
        let t = phi[x].ominus(psi[x0]);
        (t > space.dm(x0, x)).then_some(t)
    }))
}

/// Function-space distance between certified functions on the same space.
pub fn d_principal(psi: &ContractionFn, phi: &ContractionFn) -> Cost {
    assert_eq!(psi.space, phi.space, "functions must live on the same space");
    d_formula(&psi.space, &psi.values, &phi.values)
}

/// A finite window into the function space: a list of certified functions
/// over a shared carrier, deduplicated, labelled by their value tuples.
#[derive(Clone, Debug)]
pub struct ProbeFamily {
    space: ApproachSpace,
    members: Vec<ContractionFn>,
    points: PointSet,
}

impl ProbeFamily {
    /// Collects the members, dropping exact duplicates.
    pub fn new(space: &ApproachSpace, members: Vec<ContractionFn>) -> ProbeFamily {
        let mut kept: Vec<ContractionFn> = Vec::new();
        for m in members {
            assert_eq!(m.space, *space, "family members must share the carrier");
            if !kept.iter().any(|k| k.values == m.values) {
                kept.push(m);
            }
        }
        let points = PointSet::new(kept.iter().map(|m| m.label()).collect()).unwrap();
        ProbeFamily { space: space.clone(), members: kept, points }
    }

    pub fn space(&self) -> &ApproachSpace {
        &self.space
    }

    pub fn members(&self) -> &[ContractionFn] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &ContractionFn {
        &self.members[i]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The family as a labelled carrier.
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn position_of(&self, values: &[Cost]) -> Option<usize> {
        self.members.iter().position(|m| m.values == values)
    }

    /// The distance as a relation `U(family) ⇸ family` under the principal
    /// identification.
    pub fn d_rel(&self) -> NumRel {
        NumRel::from_fn(&self.points.ultra(), &self.points, |i, j| {
            d_principal(&self.members[i], &self.members[j])
        })
    }

    /// Evaluation values over `family x carrier`, row-major to match the
    /// product point set.
    pub fn ev_values(&self) -> Vec<Cost> {
        let n = self.space.len();
        let mut ev = Vec::with_capacity(self.members.len() * n);
        for m in &self.members {
            for x in 0..n {
                ev.push(m.at(x));
            }
        }
        ev
    }
}

/// Brute-force evaluation of the defining condition of the function-space
/// distance: `u` works when for every ultrafilter on `family x carrier`
/// whose first marginal is the principal ultrafilter at `psi`, and every
/// point `x`, `(u v dm(proj2, x)) + (evaluation at the ultrafilter) >= phi(x)`.
/// Candidate values are tried in ascending order, so the returned value is
/// the exact infimum.
pub fn d_brute(family: &ProbeFamily, psi: usize, phi: &ContractionFn) -> Cost {
    assert_eq!(phi.space, family.space, "target function must share the carrier");
    let space = &family.space;
    let n = space.len();
    let product = family.points().product(space.points());
    let proj1 = SetMap::proj1(family.points(), space.points());
    let proj2 = SetMap::proj2(family.points(), space.points());
    let ev = family.ev_values();
    let marginal = FinUltrafilter::principal(family.points(), psi);
    let admissible: Vec<FinUltrafilter> = FinUltrafilter::enumerate(&product)
        .into_iter()
        .filter(|q| ultra::push_forward(&proj1, q) == marginal)
        .collect();
    let mut candidates = vec![Cost::ZERO];
    for x0 in 0..n {
        for x in 0..n {
            candidates.push(phi.at(x).ominus(family.member(psi).at(x0)));
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    for u in candidates {
        let works = admissible.iter().all(|q| {
            let x0 = ultra::push_forward(&proj2, q);
            let seen = ultra::xi(&ev, q);
            (0..n).all(|x| u.join(space.dm(x0.point(), x)) + seen >= phi.at(x))
        });
        if works {
            return u;
        }
    }
    Cost::Infinity
}

/// One inequality (or equality) of the replayed proof chain, with both
/// sides evaluated exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayStep {
    pub name: String,
    pub relation: StepRelation,
    pub lhs: Cost,
    pub rhs: Cost,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepRelation {
    Equal,
    AtLeast,
}

impl ReplayStep {
    fn eq(name: &str, lhs: Cost, rhs: Cost) -> ReplayStep {
        ReplayStep { name: name.to_string(), relation: StepRelation::Equal, lhs, rhs, holds: lhs == rhs }
    }

    fn geq(name: &str, lhs: Cost, rhs: Cost) -> ReplayStep {
        ReplayStep { name: name.to_string(), relation: StepRelation::AtLeast, lhs, rhs, holds: lhs >= rhs }
    }
}

/// The full numeric replay of the proof chain at one instance
/// `(z, x0, u, v)`: the constructed ultrafilters, the probe function, and
/// each step with exact values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayReport {
    pub z: String,
    pub x0: String,
    pub u: Cost,
    pub v: Cost,
    /// Principal member of the pushed-forward row ultrafilter.
    pub p: String,
    /// Principal member one level up.
    pub big_p: String,
    /// Principal member of the paired ultrafilter after multiplication.
    pub big_q_flattened: String,
    /// Values of the probe function at every point.
    pub phi: Vec<Cost>,
    pub steps: Vec<ReplayStep>,
}

impl ReplayReport {
    pub fn step(&self, name: &str) -> &ReplayStep {
        self.steps.iter().find(|s| s.name == name).expect("unknown step name")
    }

    pub fn first_failure(&self) -> Option<&ReplayStep> {
        self.steps.iter().find(|s| !s.holds)
    }

    /// The three facts proved without exponentiability.
    pub fn facts_hold(&self) -> bool {
        self.steps
            .iter()
            .filter(|s| s.name.starts_with("fact-"))
            .all(|s| s.holds)
    }

    pub fn criterion_holds(&self) -> bool {
        self.step("criterion").holds
    }
}

/// Replays the proof chain at `(z, x0, u, v)` over the probe family
/// generated by the proof itself: all convergence rows, their `v`-scalings,
/// the probe function and its `v`-scaling. Every ultrafilter is built with
/// the ultrafilter operations, never assumed.
pub fn replay(space: &ApproachSpace, z: usize, x0: usize, u: Cost, v: Cost) -> ReplayReport {
    let n = space.len();
    assert!(z < n && x0 < n, "replay instance out of range");
    let rows = yoneda(space).expect("rows of a valid space are contractions");
    let phi = ContractionFn::certify(space, space.phi(z, u, v))
        .expect("two-variable probe functions are contractions on valid spaces");

    let mut members: Vec<ContractionFn> = Vec::new();
    members.extend(rows.iter().cloned());
    members.extend(rows.iter().map(|r| scale_fn(v, r)));
    members.push(phi.clone());
    members.push(scale_fn(v, &phi));
    let family = ProbeFamily::new(space, members);
    let e_points = family.points().clone();

    let row_pos: Vec<usize> = rows
        .iter()
        .map(|r| family.position_of(r.values()).unwrap())
        .collect();
    let phi_pos = family.position_of(phi.values()).unwrap();

    let x_ultra = space.points().ultra();
    // The iterated principal ultrafilter determined by z.
    let big_x = FinUltrafilter::principal(&x_ultra, z);
    // Rows as a map out of the ultrafilter carrier, and its restriction
    // along the unit.
    let y_map = SetMap::new(x_ultra.clone(), e_points.clone(), row_pos.clone()).unwrap();
    let y0_map = SetMap::new(space.points().clone(), e_points.clone(), row_pos.clone()).unwrap();

    let p = ultra::push_forward(&y_map, &big_x);
    let big_p = ultra::push_forward(&y0_map.ultra(), &big_x);

    let pair_carrier = e_points.product(space.points());
    let pairing = SetMap::new(
        space.points().clone(),
        pair_carrier.clone(),
        (0..n).map(|x| row_pos[x] * n + x).collect(),
    )
    .unwrap();
    let big_q = ultra::push_forward(&pairing.ultra(), &big_x);
    let m_big_q = ultra::mult(&big_q, &pair_carrier);

    let d_rel = family.d_rel();
    let ud = ultra::extend(&d_rel);

    let t_v = SetMap::new(
        e_points.clone(),
        e_points.clone(),
        family
            .members()
            .iter()
            .map(|m| {
                family
                    .position_of(scale_fn(v, m).values())
                    .expect("family is closed under the scaling")
            })
            .collect(),
    )
    .unwrap();
    let v_p = ultra::push_forward(&t_v, &p);
    let m_big_p = ultra::mult(&big_p, &e_points);

    let ev = family.ev_values();
    let fact_1a = ReplayStep::eq("fact-1a", ultra::xi(&ev, &m_big_q), Cost::ZERO);
    let fact_1b = ReplayStep::eq("fact-1b", ud.at(big_p.point(), p.point()), Cost::ZERO);
    let ud_p_vp = ud.at(big_p.point(), v_p.point());
    let fact_2 = ReplayStep::geq("fact-2", v, ud_p_vp);
    let d_vp_phi = d_rel.at(v_p.point(), phi_pos);
    let fact_3 = ReplayStep::geq("fact-3", u, d_vp_phi);
    let d_mp_phi = d_rel.at(m_big_p.point(), phi_pos);
    let d_transitivity = ReplayStep::geq("d-transitivity", ud_p_vp + d_vp_phi, d_mp_phi);
    let sum_bound = ReplayStep::geq("sum-bound", u + v, d_mp_phi);
    let ev_contraction =
        ReplayStep::geq("ev-contraction", d_mp_phi.join(space.dm(z, x0)), phi.at(x0));
    let criterion = ReplayStep::geq("criterion", (u + v).join(space.dm(z, x0)), phi.at(x0));

    ReplayReport {
        z: space.points().label(z).to_string(),
        x0: space.points().label(x0).to_string(),
        u,
        v,
        p: e_points.label(p.point()).to_string(),
        big_p: e_points.ultra().label(big_p.point()).to_string(),
        big_q_flattened: pair_carrier.label(m_big_q.point()).to_string(),
        phi: phi.values().to_vec(),
        steps: vec![
            fact_1a,
            fact_1b,
            fact_2,
            fact_3,
            d_transitivity,
            sum_bound,
            ev_contraction,
            criterion,
        ],
    }
}

/// Both inequalities of the joint scaling lemma at a principal instance:
/// the function side `u v d(psi, phi) >= d(psi, u v phi)` evaluated through
/// the closed form, and the lifted side
/// `u v Ud(chi_dot, psi) >= Ud(chi_dot, u v psi)` evaluated through the
/// extension of the distance relation over a family closed under the
/// scaling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScalingInstance {
    pub fn_side_lhs: Cost,
    pub fn_side_rhs: Cost,
    pub lifted_lhs: Cost,
    pub lifted_rhs: Cost,
}

impl ScalingInstance {
    pub fn holds(&self) -> bool {
        self.fn_side_lhs >= self.fn_side_rhs && self.lifted_lhs >= self.lifted_rhs
    }
}

pub fn scaling_instance(
    u: Cost,
    chi: &ContractionFn,
    psi: &ContractionFn,
    phi: &ContractionFn,
) -> ScalingInstance {
    let space = psi.space().clone();
    let fn_side_lhs = u.join(d_principal(psi, phi));
    let fn_side_rhs = d_principal(psi, &scale_fn(u, phi));

    let family = ProbeFamily::new(
        &space,
        vec![
            chi.clone(),
            psi.clone(),
            phi.clone(),
            scale_fn(u, chi),
            scale_fn(u, psi),
            scale_fn(u, phi),
        ],
    );
    let e_points = family.points().clone();
    let d_rel = family.d_rel();
    let ud = ultra::extend(&d_rel);
    let t_u = SetMap::new(
        e_points.clone(),
        e_points.clone(),
        family
            .members()
            .iter()
            .map(|m| family.position_of(scale_fn(u, m).values()).unwrap())
            .collect(),
    )
    .unwrap();
    let chi_pos = family.position_of(chi.values()).unwrap();
    let psi_pos = family.position_of(psi.values()).unwrap();
    let p = FinUltrafilter::principal(&e_points, psi_pos);
    let u_p = ultra::push_forward(&t_u, &p);
    let lifted_lhs = u.join(ud.at(chi_pos, p.point()));
    let lifted_rhs = ud.at(chi_pos, u_p.point());
    ScalingInstance { fn_side_lhs, fn_side_rhs, lifted_lhs, lifted_rhs }
}

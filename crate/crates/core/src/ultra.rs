//! Ultrafilters on finite carriers and the extension of relations to them.
//!
//! On a finite set every ultrafilter is principal, so an ultrafilter is
//! stored as its defining point while the API stays in terms of subset
//! membership. Operations with a `_literal` twin come in two evaluation
//! modes: the fast principal reduction and a direct evaluation of the
//! defining formula by subset enumeration. The two must agree; tests treat
//! any disagreement as a failure, never as something to patch over.
//!
//! Subsets of a carrier are bitmasks (`u64`), bit `i` for point `i`.
//! Literal-mode operations are capped at carriers of `MAX_LITERAL_CARRIER`
//! points.

use crate::cost::Cost;
use crate::numrel::{NumRel, PointSet, SetMap};

/// Largest carrier on which subset-enumerating literal modes run.
pub const MAX_LITERAL_CARRIER: usize = 12;

/// An ultrafilter on a finite carrier, stored by its defining point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinUltrafilter {
    carrier: PointSet,
    point: usize,
}

impl FinUltrafilter {
    /// The principal ultrafilter at `point`: all subsets containing it.
    pub fn principal(carrier: &PointSet, point: usize) -> FinUltrafilter {
        assert!(point < carrier.len(), "point out of carrier");
        FinUltrafilter { carrier: carrier.clone(), point }
    }

    /// The unit of the monad, `x -> all subsets containing x`.
    pub fn unit(carrier: &PointSet, point: usize) -> FinUltrafilter {
        FinUltrafilter::principal(carrier, point)
    }

    /// All ultrafilters on the carrier, in carrier order. Position `i` is
    /// the principal ultrafilter at point `i`, matching `PointSet::ultra`.
    pub fn enumerate(carrier: &PointSet) -> Vec<FinUltrafilter> {
        (0..carrier.len()).map(|i| FinUltrafilter::principal(carrier, i)).collect()
    }

    pub fn carrier(&self) -> &PointSet {
        &self.carrier
    }

    pub fn point(&self) -> usize {
        self.point
    }

    pub fn point_label(&self) -> &str {
        self.carrier.label(self.point)
    }

    /// Membership: a subset belongs to the ultrafilter iff it contains the
    /// defining point.
    pub fn contains(&self, subset: u64) -> bool {
        subset & (1u64 << self.point) != 0
    }

    /// Membership of every subset, indexed by bitmask. Literal-mode helper.
    pub fn member_family(&self) -> Vec<bool> {
        let n = self.carrier.len();
        assert!(n <= MAX_LITERAL_CARRIER, "carrier too large for literal enumeration");
        (0..1u64 << n).map(|mask| self.contains(mask)).collect()
    }
}

/// Recovers the principal point of a membership family; panics when the
/// family is not an ultrafilter on the carrier.
fn principal_of_family(carrier: &PointSet, family: &[bool]) -> FinUltrafilter {
    let n = carrier.len();
    assert_eq!(family.len(), 1usize << n);
    for p in 0..n {
        if FinUltrafilter::principal(carrier, p).member_family() == family {
            return FinUltrafilter::principal(carrier, p);
        }
    }
    panic!("membership family is not an ultrafilter");
}

/// Image ultrafilter `Uf(x)`: principal at `f` of the defining point.
pub fn push_forward(f: &SetMap, x: &FinUltrafilter) -> FinUltrafilter {
    assert!(x.carrier == *f.source(), "ultrafilter carrier must match map source");
    FinUltrafilter::principal(f.target(), f.apply(x.point))
}

/// `Uf(x)` by the defining comprehension: `B` is a member iff `f^{-1}(B)`
/// is a member of `x`.
pub fn push_forward_literal(f: &SetMap, x: &FinUltrafilter) -> FinUltrafilter {
    assert!(x.carrier == *f.source(), "ultrafilter carrier must match map source");
    let m = f.target().len();
    assert!(m <= MAX_LITERAL_CARRIER, "carrier too large for literal enumeration");
    let family: Vec<bool> = (0..1u64 << m)
        .map(|b_mask| {
            let mut preimage = 0u64;
            for i in 0..f.source().len() {
                if b_mask & (1u64 << f.apply(i)) != 0 {
                    preimage |= 1u64 << i;
                }
            }
            x.contains(preimage)
        })
        .collect();
    principal_of_family(f.target(), &family)
}

/// `A#`: the set of ultrafilters containing `A`, as a mask over the
/// ultrafilter carrier. Under the principal bijection this is `A` itself,
/// computed here by membership so tests can lean on it.
pub fn sharp(carrier: &PointSet, subset: u64) -> u64 {
    let mut out = 0u64;
    for (i, uf) in FinUltrafilter::enumerate(carrier).iter().enumerate() {
        if uf.contains(subset) {
            out |= 1u64 << i;
        }
    }
    out
}

/// Monad multiplication: flattens an ultrafilter on the ultrafilter carrier
/// of `base` (position `i` standing for the principal ultrafilter at point
/// `i`) down to an ultrafilter on `base`.
pub fn mult(outer: &FinUltrafilter, base: &PointSet) -> FinUltrafilter {
    assert!(outer.carrier == base.ultra(), "outer carrier must be the ultrafilter carrier of base");
    FinUltrafilter::principal(base, outer.point)
}

/// Multiplication by its comprehension: `A` is a member iff `A#` is.
pub fn mult_literal(outer: &FinUltrafilter, base: &PointSet) -> FinUltrafilter {
    assert!(outer.carrier == base.ultra(), "outer carrier must be the ultrafilter carrier of base");
    let n = base.len();
    assert!(n <= MAX_LITERAL_CARRIER, "carrier too large for literal enumeration");
    let family: Vec<bool> = (0..1u64 << n).map(|a_mask| outer.contains(sharp(base, a_mask))).collect();
    principal_of_family(base, &family)
}

/// Extension of a relation to ultrafilter carriers by the principal
/// reduction: the extension at a pair of principal ultrafilters is the
/// relation at their defining points.
pub fn extend(r: &NumRel) -> NumRel {
    NumRel::from_fn(&r.source().ultra(), &r.target().ultra(), |i, j| r.at(i, j))
}

/// Extension by the defining formula
/// `sup_{A in x, B in y} inf_{a in A, b in B} r(a, b)`,
/// evaluated over all member subsets. Must agree with `extend`.
pub fn extend_literal(r: &NumRel) -> NumRel {
    let n = r.source().len();
    let m = r.target().len();
    assert!(
        n <= MAX_LITERAL_CARRIER && m <= MAX_LITERAL_CARRIER,
        "carrier too large for literal enumeration"
    );
    NumRel::from_fn(&r.source().ultra(), &r.target().ultra(), |i, j| {
        let x = FinUltrafilter::principal(r.source(), i);
        let y = FinUltrafilter::principal(r.target(), j);
        let mut best = Cost::ZERO;
        for a_mask in 1..1u64 << n {
            if !x.contains(a_mask) {
                continue;
            }
            for b_mask in 1..1u64 << m {
                if !y.contains(b_mask) {
                    continue;
                }
                let inf = Cost::inf_of((0..n).filter(|a| a_mask & (1 << a) != 0).flat_map(|a| {
                    (0..m).filter(|b| b_mask & (1 << b) != 0).map(move |b| r.at(a, b))
                }));
                best = best.join(inf);
            }
        }
        best
    })
}

/// Convergence of an ultrafilter of costs: for the principal ultrafilter at
/// position `i` of `values` this is `values[i]`.
pub fn xi(values: &[Cost], v: &FinUltrafilter) -> Cost {
    assert_eq!(values.len(), v.carrier.len(), "value list must match carrier");
    values[v.point]
}

/// Convergence by the defining formula `sup_{A in v} inf_{u in A} u`.
pub fn xi_literal(values: &[Cost], v: &FinUltrafilter) -> Cost {
    assert_eq!(values.len(), v.carrier.len(), "value list must match carrier");
    let n = values.len();
    assert!(n <= MAX_LITERAL_CARRIER, "carrier too large for literal enumeration");
    let mut best = Cost::ZERO;
    for mask in 1..1u64 << n {
        if v.contains(mask) {
            let inf = Cost::inf_of((0..n).filter(|i| mask & (1 << i) != 0).map(|i| values[i]));
            best = best.join(inf);
        }
    }
    best
}

/// The extension computed through ultrafilters on the product carrier:
/// the infimum of `xi(Ur(w))` over all `w` on `X x Y` whose marginals are
/// the two given ultrafilters. Agrees with `extend` entrywise.
pub fn extend_pullback(r: &NumRel, x: &FinUltrafilter, y: &FinUltrafilter) -> Cost {
    assert!(x.carrier == *r.source() && y.carrier == *r.target());
    let prod = r.source().product(r.target());
    let p1 = SetMap::proj1(r.source(), r.target());
    let p2 = SetMap::proj2(r.source(), r.target());
    // r as a cost assignment on the product carrier, row-major like `prod`.
    let values: Vec<Cost> = (0..r.source().len())
        .flat_map(|a| (0..r.target().len()).map(move |b| r.at(a, b)))
        .collect();
    Cost::inf_of(FinUltrafilter::enumerate(&prod).iter().filter_map(|w| {
        if push_forward(&p1, w) == *x && push_forward(&p2, w) == *y {
            Some(xi(&values, w))
        } else {
            None
        }
    }))
}

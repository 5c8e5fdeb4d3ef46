//! Finite labelled carriers and `[0, ∞]`-valued relations between them.
//!
//! A relation `r: X ⇸ Y` is a dense matrix of costs; composition is
//! min-plus: `(r ; s)(x, z) = inf_y r(x, y) + s(y, z)`.
//!
//! Order convention, used everywhere in this crate: `r.leq(s)` means `r` is
//! below `s` in the truth order, which is entrywise numeric `>=` (a larger
//! cost is a weaker statement). All inequalities in doc comments are stated
//! numerically.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cost::Cost;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelError {
    #[error("duplicate label `{0}` in point set")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("expected a {rows}x{cols} matrix, got row of length {got}")]
    ShapeMismatch { rows: usize, cols: usize, got: usize },
    #[error("carrier mismatch: `{left}` vs `{right}`")]
    CarrierMismatch { left: String, right: String },
}

/// A finite carrier: unique labels in a fixed order. Indexing is by
/// position; two carriers are equal only when their label sequences are.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct PointSet {
    labels: Vec<String>,
}

impl PointSet {
    pub fn new(labels: Vec<String>) -> Result<PointSet, RelError> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(RelError::DuplicateLabel(l.clone()));
            }
        }
        Ok(PointSet { labels })
    }

    /// Convenience constructor for fixed label lists; panics on duplicates.
    pub fn of(labels: &[&str]) -> PointSet {
        PointSet::new(labels.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    /// The one-point carrier `{*}`.
    pub fn unit() -> PointSet {
        PointSet::of(&["*"])
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Pairs `(x, y)` in row-major order: index `(i, j) -> i * |Y| + j`.
    pub fn product(&self, other: &PointSet) -> PointSet {
        let mut labels = Vec::with_capacity(self.len() * other.len());
        for x in &self.labels {
            for y in &other.labels {
                labels.push(format!("({x},{y})"));
            }
        }
        PointSet { labels }
    }

    /// The carrier of ultrafilters on this one. Every ultrafilter on a
    /// finite set is principal, so the carrier is in labelled bijection
    /// with this one, position by position.
    pub fn ultra(&self) -> PointSet {
        PointSet {
            labels: self.labels.iter().map(|l| format!("<{l}>")).collect(),
        }
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(", "))
    }
}

/// A function between carriers, stored as an image index per source point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SetMap {
    source: PointSet,
    target: PointSet,
    images: Vec<usize>,
}

impl SetMap {
    pub fn new(source: PointSet, target: PointSet, images: Vec<usize>) -> Result<SetMap, RelError> {
        if images.len() != source.len() {
            return Err(RelError::ShapeMismatch {
                rows: source.len(),
                cols: 1,
                got: images.len(),
            });
        }
        if let Some(&bad) = images.iter().find(|&&i| i >= target.len()) {
            return Err(RelError::UnknownLabel(format!("index {bad}")));
        }
        Ok(SetMap { source, target, images })
    }

    /// Builds a map from label assignments; every source label must be
    /// assigned a label that exists in the target.
    pub fn from_fn(
        source: &PointSet,
        target: &PointSet,
        f: impl Fn(&str) -> String,
    ) -> Result<SetMap, RelError> {
        let images = source
            .labels()
            .iter()
            .map(|l| {
                let img = f(l);
                target.index_of(&img).ok_or(RelError::UnknownLabel(img))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SetMap {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    pub fn identity(ps: &PointSet) -> SetMap {
        SetMap {
            source: ps.clone(),
            target: ps.clone(),
            images: (0..ps.len()).collect(),
        }
    }

    /// First projection of `x.product(y)`.
    pub fn proj1(x: &PointSet, y: &PointSet) -> SetMap {
        let images = (0..x.len()).flat_map(|i| std::iter::repeat(i).take(y.len())).collect();
        SetMap { source: x.product(y), target: x.clone(), images }
    }

    /// Second projection of `x.product(y)`.
    pub fn proj2(x: &PointSet, y: &PointSet) -> SetMap {
        let images = (0..x.len()).flat_map(|_| 0..y.len()).collect();
        SetMap { source: x.product(y), target: y.clone(), images }
    }

    pub fn source(&self) -> &PointSet {
        &self.source
    }

    pub fn target(&self) -> &PointSet {
        &self.target
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// The same map one functor level up, between ultrafilter carriers.
    pub fn ultra(&self) -> SetMap {
        SetMap {
            source: self.source.ultra(),
            target: self.target.ultra(),
            images: self.images.clone(),
        }
    }
}

/// A `[0, ∞]`-valued relation `X ⇸ Y` as a dense row-major matrix,
/// immutable after construction.
#[derive(Clone, PartialEq, Eq)]
pub struct NumRel {
    source: PointSet,
    target: PointSet,
    entries: Vec<Cost>,
}

impl NumRel {
    pub fn new(source: PointSet, target: PointSet, rows: Vec<Vec<Cost>>) -> Result<NumRel, RelError> {
        if rows.len() != source.len() {
            return Err(RelError::ShapeMismatch {
                rows: source.len(),
                cols: target.len(),
                got: rows.len(),
            });
        }
        let mut entries = Vec::with_capacity(source.len() * target.len());
        for row in rows {
            if row.len() != target.len() {
                return Err(RelError::ShapeMismatch {
                    rows: source.len(),
                    cols: target.len(),
                    got: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(NumRel { source, target, entries })
    }

    pub fn from_fn(source: &PointSet, target: &PointSet, mut f: impl FnMut(usize, usize) -> Cost) -> NumRel {
        let mut entries = Vec::with_capacity(source.len() * target.len());
        for x in 0..source.len() {
            for y in 0..target.len() {
                entries.push(f(x, y));
            }
        }
        NumRel {
            source: source.clone(),
            target: target.clone(),
            entries,
        }
    }

    /// The identity relation: `0` on the diagonal, `inf` elsewhere.
    pub fn identity(ps: &PointSet) -> NumRel {
        NumRel::from_fn(ps, ps, |x, y| if x == y { Cost::ZERO } else { Cost::Infinity })
    }

    /// A function viewed as a relation: `0` at `(x, f(x))`, `inf` elsewhere.
    pub fn from_map(f: &SetMap) -> NumRel {
        NumRel::from_fn(f.source(), f.target(), |x, y| {
            if f.apply(x) == y {
                Cost::ZERO
            } else {
                Cost::Infinity
            }
        })
    }

    pub fn source(&self) -> &PointSet {
        &self.source
    }

    pub fn target(&self) -> &PointSet {
        &self.target
    }

    pub fn at(&self, x: usize, y: usize) -> Cost {
        self.entries[x * self.target.len() + y]
    }

    /// Diagrammatic min-plus composite: `self: X ⇸ Y` then `other: Y ⇸ Z`,
    /// `(x, z) -> inf_y self(x, y) + other(y, z)`.
    pub fn compose(&self, other: &NumRel) -> Result<NumRel, RelError> {
        if self.target != other.source {
            return Err(RelError::CarrierMismatch {
                left: format!("{:?}", self.target),
                right: format!("{:?}", other.source),
            });
        }
        let mid = self.target.len();
        Ok(NumRel::from_fn(&self.source, &other.target, |x, z| {
            Cost::inf_of((0..mid).map(|y| self.at(x, y) + other.at(y, z)))
        }))
    }

    /// Transpose: `r°(y, x) = r(x, y)`.
    pub fn converse(&self) -> NumRel {
        NumRel::from_fn(&self.target, &self.source, |y, x| self.at(x, y))
    }

    /// Entrywise max with `u` (the action of `u` on the relation).
    pub fn scale_join(&self, u: Cost) -> NumRel {
        NumRel {
            source: self.source.clone(),
            target: self.target.clone(),
            entries: self.entries.iter().map(|&e| e.join(u)).collect(),
        }
    }

    /// Truth-order comparison: `r.leq(s)` holds when every entry of `r` is
    /// numerically `>=` the matching entry of `s`. Panics when the carriers
    /// differ; relations are only comparable over equal labelled carriers.
    pub fn leq(&self, other: &NumRel) -> bool {
        assert!(
            self.source == other.source && self.target == other.target,
            "leq requires equal labelled carriers"
        );
        self.entries.iter().zip(&other.entries).all(|(a, b)| a >= b)
    }
}

impl fmt::Debug for NumRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "NumRel {:?} -> {:?}", self.source, self.target)?;
        for x in 0..self.source.len() {
            let row: Vec<String> = (0..self.target.len()).map(|y| self.at(x, y).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_duplicate_labels() {
        assert_eq!(
            PointSet::new(vec!["a".into(), "a".into()]).unwrap_err(),
            RelError::DuplicateLabel("a".into())
        );
    }

    #[test]
    fn rejects_bad_shapes_and_unknown_labels() {
        let x = PointSet::of(&["a", "b"]);
        let y = PointSet::of(&["c"]);
        assert!(NumRel::new(x.clone(), y.clone(), vec![vec![Cost::ZERO]]).is_err());
        assert!(matches!(
            SetMap::from_fn(&x, &y, |_| "nope".into()),
            Err(RelError::UnknownLabel(_))
        ));
    }

    #[test]
    fn composition_with_empty_middle_is_all_inf() {
        let x = PointSet::of(&["a"]);
        let y = PointSet::new(vec![]).unwrap();
        let z = PointSet::of(&["b"]);
        let r = NumRel::from_fn(&x, &y, |_, _| Cost::ZERO);
        let s = NumRel::from_fn(&y, &z, |_, _| Cost::ZERO);
        assert_eq!(r.compose(&s).unwrap().at(0, 0), Cost::Infinity);
    }

    #[test]
    fn compose_mismatched_carriers_errors() {
        let x = PointSet::of(&["a"]);
        let y = PointSet::of(&["b"]);
        let r = NumRel::from_fn(&x, &y, |_, _| Cost::ZERO);
        assert!(r.compose(&r).is_err());
    }

    fn arb_cost() -> impl Strategy<Value = Cost> {
        prop_oneof![
            6 => (0i64..20, 1i64..6).prop_map(|(n, d)| Cost::rational(n, d)),
            1 => Just(Cost::Infinity),
            1 => Just(Cost::ZERO),
        ]
    }

    fn carrier(n: usize) -> PointSet {
        PointSet::new((0..n).map(|i| format!("p{i}")).collect()).unwrap()
    }

    fn arb_rel(src: usize, tgt: usize) -> impl Strategy<Value = NumRel> {
        proptest::collection::vec(arb_cost(), src * tgt).prop_map(move |entries| NumRel {
            source: carrier(src),
            target: carrier(tgt),
            entries,
        })
    }

    proptest! {
        #[test]
        fn category_laws(r in arb_rel(3, 4), s in arb_rel(4, 2), t in arb_rel(2, 3)) {
            let id_x = NumRel::identity(&carrier(3));
            let id_y = NumRel::identity(&carrier(4));
            prop_assert_eq!(id_x.compose(&r).unwrap(), r.clone());
            prop_assert_eq!(r.compose(&id_y).unwrap(), r.clone());
            let left = r.compose(&s).unwrap().compose(&t).unwrap();
            let right = r.compose(&s.compose(&t).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn converse_is_a_contravariant_involution(r in arb_rel(3, 4), s in arb_rel(4, 2)) {
            prop_assert_eq!(r.converse().converse(), r.clone());
            let lhs = r.compose(&s).unwrap().converse();
            let rhs = s.converse().compose(&r.converse()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn scale_join_laws(r in arb_rel(3, 4), s in arb_rel(4, 2), u in arb_cost(), v in arb_cost()) {
            // Composite of scaled relations dominates the scaled composite.
            let lhs = r.scale_join(u).compose(&s.scale_join(v)).unwrap();
            let rhs = r.compose(&s).unwrap().scale_join(u + v);
            prop_assert!(lhs.leq(&rhs));
            // Scaling is inflationary in the numeric order.
            prop_assert!(r.scale_join(u).leq(&r));
        }

        #[test]
        fn scaled_composite_with_a_map_is_exact(s in arb_rel(4, 2), v in arb_cost(), images in proptest::collection::vec(0usize..4, 3)) {
            let f = SetMap::new(carrier(3), carrier(4), images).unwrap();
            let lhs = NumRel::from_map(&f).compose(&s.scale_join(v)).unwrap();
            let rhs = NumRel::from_map(&f).compose(&s).unwrap().scale_join(v);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn compose_monotone(r in arb_rel(3, 4), s in arb_rel(4, 2), u in arb_cost()) {
            let bigger = r.scale_join(u);
            prop_assert!(bigger.compose(&s).unwrap().leq(&r.compose(&s).unwrap()));
        }
    }
}

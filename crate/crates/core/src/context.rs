//! Formal contexts and the Galois derivation operators.

use std::collections::HashSet;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// A set of object indices of some context.
pub type ObjectSet = BitSet;
/// A set of feature indices of some context.
pub type FeatureSet = BitSet;

/// Objects, features and a binary incidence relation between them.
///
/// The relation is stored twice: one feature bitset per object (rows) and one
/// object bitset per feature (columns). Both views are built together and the
/// context is never mutated afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    features: Vec<String>,
    rows: Vec<FeatureSet>,
    columns: Vec<ObjectSet>,
}

fn check_unique(kind: &'static str, ids: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateIdentifier { kind, id: id.clone() });
        }
    }
    Ok(())
}

impl FormalContext {
    /// Builds a context from identifier lists and `(object, feature)` pairs.
    pub fn new<I>(objects: Vec<String>, features: Vec<String>, incidence: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if objects.is_empty() {
            return Err(Error::EmptyIdentifiers("object"));
        }
        if features.is_empty() {
            return Err(Error::EmptyIdentifiers("feature"));
        }
        Self::build(objects, features, incidence)
    }

    /// Like [`FormalContext::new`] but permits empty object or feature lists.
    /// Used for degenerate agendas and leave-one-out subcontexts.
    pub fn new_unchecked_sizes<I>(objects: Vec<String>, features: Vec<String>, incidence: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::build(objects, features, incidence)
    }

    fn build<I>(objects: Vec<String>, features: Vec<String>, incidence: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        check_unique("object", &objects)?;
        check_unique("feature", &features)?;
        let (n, m) = (objects.len(), features.len());
        let mut rows = vec![BitSet::empty(m); n];
        let mut columns = vec![BitSet::empty(n); m];
        for (o, f) in incidence {
            if o >= n || f >= m {
                return Err(Error::IncidenceOutOfRange {
                    object: o,
                    feature: f,
                    objects: n,
                    features: m,
                });
            }
            rows[o].insert(f);
            columns[f].insert(o);
        }
        Ok(FormalContext {
            objects,
            features,
            rows,
            columns,
        })
    }

    /// Builds a context directly from per-object feature rows.
    pub fn from_rows(objects: Vec<String>, features: Vec<String>, rows: Vec<FeatureSet>) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = rows
            .iter()
            .enumerate()
            .flat_map(|(o, row)| row.iter().map(move |f| (o, f)))
            .collect();
        if rows.len() != objects.len() {
            return Err(Error::InvalidConfig(format!(
                "{} rows for {} objects",
                rows.len(),
                objects.len()
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.universe() != features.len()) {
            return Err(Error::InvalidConfig(format!(
                "row universe {} does not match {} features",
                r.universe(),
                features.len()
            )));
        }
        Self::build(objects, features, pairs)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    /// Feature set of one object.
    pub fn row(&self, object: usize) -> &FeatureSet {
        &self.rows[object]
    }

    /// Object set of one feature.
    pub fn column(&self, feature: usize) -> &ObjectSet {
        &self.columns[feature]
    }

    pub fn incident(&self, object: usize, feature: usize) -> bool {
        self.rows[object].contains(feature)
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == id)
    }

    pub fn feature_index(&self, id: &str) -> Option<usize> {
        self.features.iter().position(|f| f == id)
    }

    pub fn all_objects(&self) -> ObjectSet {
        BitSet::full(self.num_objects())
    }

    pub fn all_features(&self) -> FeatureSet {
        BitSet::full(self.num_features())
    }

    /// Features shared by every object of `objects`. The empty set maps to all
    /// features.
    pub fn derive_intent(&self, objects: &ObjectSet) -> FeatureSet {
        let mut out = self.all_features();
        for o in objects {
            out.intersect_with(&self.rows[o]);
        }
        out
    }

    /// Objects having every feature of `features`. The empty set maps to all
    /// objects.
    pub fn derive_extent(&self, features: &FeatureSet) -> ObjectSet {
        let mut out = self.all_objects();
        for f in features {
            out.intersect_with(&self.columns[f]);
        }
        out
    }

    pub fn closure_objects(&self, objects: &ObjectSet) -> ObjectSet {
        self.derive_extent(&self.derive_intent(objects))
    }

    pub fn closure_features(&self, features: &FeatureSet) -> FeatureSet {
        self.derive_intent(&self.derive_extent(features))
    }

    /// The context seen through an agenda: same objects, features restricted
    /// to `agenda` (keeping the parent's feature names, in ascending index
    /// order).
    pub fn induce_subcontext(&self, agenda: &FeatureSet) -> FormalContext {
        let kept: Vec<usize> = agenda.to_vec();
        let features = kept.iter().map(|&f| self.features[f].clone()).collect();
        let m = kept.len();
        let rows: Vec<FeatureSet> = self
            .rows
            .iter()
            .map(|row| BitSet::from_indices(m, (0..m).filter(|&j| row.contains(kept[j]))))
            .collect();
        let mut columns = vec![BitSet::empty(self.num_objects()); m];
        for (j, &f) in kept.iter().enumerate() {
            columns[j] = self.columns[f].clone();
        }
        FormalContext {
            objects: self.objects.clone(),
            features,
            rows,
            columns,
        }
    }

    /// Restricts a parent-indexed feature set to the features of an agenda,
    /// re-indexed into the subcontext built by [`induce_subcontext`].
    ///
    /// [`induce_subcontext`]: FormalContext::induce_subcontext
    pub fn restrict_to_agenda(features: &FeatureSet, agenda: &FeatureSet) -> FeatureSet {
        let kept = agenda.to_vec();
        BitSet::from_indices(
            kept.len(),
            kept.iter()
                .enumerate()
                .filter(|(_, &f)| features.contains(f))
                .map(|(j, _)| j),
        )
    }

    /// The context without one object. Used to score training objects against
    /// lattices that have not seen them.
    pub fn without_object(&self, object: usize) -> FormalContext {
        let keep: Vec<usize> = (0..self.num_objects()).filter(|&o| o != object).collect();
        let objects = keep.iter().map(|&o| self.objects[o].clone()).collect();
        let rows: Vec<FeatureSet> = keep.iter().map(|&o| self.rows[o].clone()).collect();
        let n = keep.len();
        let columns = (0..self.num_features())
            .map(|f| BitSet::from_indices(n, (0..n).filter(|&i| rows[i].contains(f))))
            .collect();
        FormalContext {
            objects,
            features: self.features.clone(),
            rows,
            columns,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(rows: &[&[usize]], m: usize) -> FormalContext {
        let objects = (0..rows.len()).map(|i| format!("o{i}")).collect();
        let features = (0..m).map(|i| format!("f{i}")).collect();
        let pairs = rows
            .iter()
            .enumerate()
            .flat_map(|(o, r)| r.iter().map(move |&f| (o, f)));
        FormalContext::new(objects, features, pairs).unwrap()
    }

    #[test]
    fn smallest_context() {
        let c = FormalContext::new(vec!["a".into()], vec!["x".into()], [(0, 0)]).unwrap();
        assert_eq!(c.num_objects(), 1);
        assert!(c.incident(0, 0));
    }

    #[test]
    fn duplicate_object_rejected() {
        let err = FormalContext::new(vec!["a".into(), "a".into()], vec!["x".into()], []).unwrap_err();
        assert!(matches!(err, Error::DuplicateIdentifier { kind: "object", .. }));
    }

    #[test]
    fn out_of_range_pair_rejected() {
        let err = FormalContext::new(vec!["a".into()], vec!["x".into()], [(0, 1)]).unwrap_err();
        assert!(matches!(err, Error::IncidenceOutOfRange { .. }));
    }

    #[test]
    fn empty_sets_derive_to_universe() {
        let c = ctx(&[&[0], &[1]], 3);
        assert!(c.derive_intent(&BitSet::empty(2)).is_full());
        assert!(c.derive_extent(&BitSet::empty(3)).is_full());
    }

    #[test]
    fn views_agree() {
        let c = ctx(&[&[0, 2], &[1, 2], &[]], 3);
        for o in 0..3 {
            for f in 0..3 {
                assert_eq!(c.row(o).contains(f), c.column(f).contains(o));
            }
        }
    }

    #[test]
    fn subcontext_keeps_names_and_restricts() {
        let c = ctx(&[&[0, 2], &[1, 2]], 3);
        let agenda = BitSet::from_indices(3, [1, 2]);
        let sub = c.induce_subcontext(&agenda);
        assert_eq!(sub.features(), &["f1".to_string(), "f2".to_string()]);
        assert_eq!(sub.row(0).to_vec(), vec![1]);
        assert_eq!(sub.row(1).to_vec(), vec![0, 1]);

        let empty = c.induce_subcontext(&BitSet::empty(3));
        assert_eq!(empty.num_features(), 0);
        assert_eq!(empty.num_objects(), 2);

        assert_eq!(c.induce_subcontext(&c.all_features()), c);
    }

    #[test]
    fn without_object_drops_row() {
        let c = ctx(&[&[0], &[1], &[0, 1]], 2);
        let d = c.without_object(1);
        assert_eq!(d.objects(), &["o0".to_string(), "o2".to_string()]);
        assert_eq!(d.column(0).to_vec(), vec![0, 1]);
        assert_eq!(d.column(1).to_vec(), vec![1]);
    }
}

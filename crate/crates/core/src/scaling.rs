//! Tabular ingestion and conceptual scaling into binary contexts.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::context::{FeatureSet, FormalContext};
use crate::decimal;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Categorical,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

/// Objects described by many-valued attributes, before scaling.
#[derive(Clone, Debug, PartialEq)]
pub struct ManyValuedContext {
    pub objects: Vec<String>,
    pub attributes: Vec<Attribute>,
    /// `cells[object][attribute]`, raw text.
    pub cells: Vec<Vec<String>>,
    /// Values of the label column, when one was designated and present.
    pub labels: Option<Vec<String>>,
}

impl ManyValuedContext {
    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// One object's attribute values keyed by attribute name.
    pub fn row_map(&self, object: usize) -> HashMap<String, String> {
        self.attributes
            .iter()
            .zip(&self.cells[object])
            .map(|(a, v)| (a.name.clone(), v.clone()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Column routed to `labels` instead of the attributes.
    pub label_column: Option<String>,
    /// Fail when the label column is absent from the header.
    pub require_label: bool,
    /// Attribute kinds that bypass inference.
    pub kind_overrides: HashMap<String, AttributeKind>,
    /// Accept a header with no data rows.
    pub allow_empty: bool,
}

fn parse_number(s: &str) -> Option<f64> {
    let v: f64 = s.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Reads a CSV table. The first column holds object identifiers; every other
/// column except the label column becomes an attribute.
pub fn parse_table<R: Read>(reader: R, options: &ParseOptions) -> Result<ManyValuedContext> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header.len() < 2 {
        return Err(Error::EmptyTable);
    }

    let label_pos = match &options.label_column {
        Some(name) => {
            let pos = header.iter().skip(1).position(|h| h == name).map(|p| p + 1);
            if pos.is_none() && options.require_label {
                return Err(Error::UnknownColumn(name.clone()));
            }
            pos
        }
        None => None,
    };
    let attr_cols: Vec<usize> = (1..header.len()).filter(|&c| Some(c) != label_pos).collect();
    {
        let mut seen = HashSet::new();
        for &c in &attr_cols {
            if !seen.insert(header[c].as_str()) {
                return Err(Error::DuplicateIdentifier {
                    kind: "attribute",
                    id: header[c].clone(),
                });
            }
        }
    }

    let mut objects = Vec::new();
    let mut cells = Vec::new();
    let mut labels = Vec::new();
    let mut seen_ids = HashSet::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: header.len(),
                found: record.len(),
            });
        }
        let id = record[0].trim().to_string();
        if !seen_ids.insert(id.clone()) {
            return Err(Error::DuplicateIdentifier { kind: "object", id });
        }
        objects.push(id);
        cells.push(
            attr_cols
                .iter()
                .map(|&c| record[c].trim().to_string())
                .collect::<Vec<_>>(),
        );
        if let Some(p) = label_pos {
            labels.push(record[p].trim().to_string());
        }
    }
    if objects.is_empty() && !options.allow_empty {
        return Err(Error::EmptyTable);
    }

    let mut attributes = Vec::with_capacity(attr_cols.len());
    for (j, &c) in attr_cols.iter().enumerate() {
        let name = header[c].clone();
        let kind = match options.kind_overrides.get(&name) {
            Some(k) => *k,
            None => {
                let non_empty: Vec<&String> = cells
                    .iter()
                    .map(|row: &Vec<String>| &row[j])
                    .filter(|v| !v.is_empty())
                    .collect();
                if !non_empty.is_empty() && non_empty.iter().all(|v| parse_number(v).is_some()) {
                    AttributeKind::Numeric
                } else {
                    AttributeKind::Categorical
                }
            }
        };
        if kind == AttributeKind::Numeric {
            for (o, row) in cells.iter().enumerate() {
                if parse_number(&row[j]).is_none() {
                    return Err(Error::MissingValue {
                        object: objects[o].clone(),
                        attribute: name,
                    });
                }
            }
        }
        attributes.push(Attribute { name, kind });
    }

    Ok(ManyValuedContext {
        objects,
        attributes,
        cells,
        labels: label_pos.map(|_| labels),
    })
}

/// How one attribute maps onto binary features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Scale {
    /// One feature per distinct value.
    Nominal { values: Vec<String> },
    /// Bins `(-inf, c0], (c0, c1], ..., (c_last, inf)`.
    Ordinal {
        #[serde(with = "decimal::vec")]
        cuts: Vec<f64>,
        labels: Vec<String>,
    },
}

impl Scale {
    pub fn num_features(&self) -> usize {
        match self {
            Scale::Nominal { values } => values.len(),
            Scale::Ordinal { labels, .. } => labels.len(),
        }
    }

    pub fn labels(&self) -> &[String] {
        match self {
            Scale::Nominal { values } => values,
            Scale::Ordinal { labels, .. } => labels,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeScale {
    pub name: String,
    pub kind: AttributeKind,
    pub scale: Scale,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    pub attributes: Vec<AttributeScale>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScalingStrategy {
    NominalOnly,
    Terciles,
    /// Cut points per numeric attribute name.
    Explicit(BTreeMap<String, Vec<f64>>),
}

/// A non-fatal note recorded while building a scaling spec.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingWarning {
    pub attribute: String,
    pub message: String,
}

/// Linear-interpolation quantile of a sorted sample.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn bin_labels(bins: usize) -> Vec<String> {
    match bins {
        2 => vec!["Low".into(), "High".into()],
        3 => vec!["Low".into(), "Medium".into(), "High".into()],
        n => (0..n).map(|i| format!("Bin{i}")).collect(),
    }
}

fn canonical_number(s: &str) -> String {
    match parse_number(s) {
        Some(v) => format!("{v}"),
        None => s.to_string(),
    }
}

fn nominal_values(mv: &ManyValuedContext, j: usize) -> Vec<String> {
    let numeric = mv.attributes[j].kind == AttributeKind::Numeric;
    let mut seen = HashSet::new();
    let mut values = Vec::new();
    for row in &mv.cells {
        let v = if numeric {
            canonical_number(&row[j])
        } else {
            row[j].clone()
        };
        if seen.insert(v.clone()) {
            values.push(v);
        }
    }
    values
}

fn check_cuts(name: &str, cuts: &[f64]) -> Result<()> {
    if cuts.iter().any(|c| !c.is_finite()) || cuts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidScaling {
            attribute: name.to_string(),
            reason: "cut points must be finite and strictly increasing".into(),
        });
    }
    Ok(())
}

/// Chooses a scale per attribute. Categorical attributes are always nominal;
/// numeric ones follow the strategy.
pub fn build_scaling_spec(
    mv: &ManyValuedContext,
    strategy: &ScalingStrategy,
) -> Result<(ScalingSpec, Vec<ScalingWarning>)> {
    let mut warnings = Vec::new();
    let mut attributes = Vec::with_capacity(mv.attributes.len());
    for (j, attr) in mv.attributes.iter().enumerate() {
        let scale = match (attr.kind, strategy) {
            (AttributeKind::Categorical, _) | (AttributeKind::Numeric, ScalingStrategy::NominalOnly) => {
                Scale::Nominal {
                    values: nominal_values(mv, j),
                }
            }
            (AttributeKind::Numeric, ScalingStrategy::Terciles) => {
                let mut sample: Vec<f64> = mv
                    .cells
                    .iter()
                    .map(|row| parse_number(&row[j]).expect("numeric cells validated on parse"))
                    .collect();
                sample.sort_by(f64::total_cmp);
                let mut distinct = sample.clone();
                distinct.dedup();
                let cuts = if distinct.len() >= 3 {
                    vec![quantile_sorted(&sample, 1.0 / 3.0), quantile_sorted(&sample, 2.0 / 3.0)]
                } else {
                    Vec::new()
                };
                if cuts.len() == 2 && cuts[0] < cuts[1] {
                    Scale::Ordinal {
                        cuts,
                        labels: bin_labels(3),
                    }
                } else {
                    warnings.push(ScalingWarning {
                        attribute: attr.name.clone(),
                        message: format!(
                            "{} distinct values; tercile cuts degenerate, using nominal scaling",
                            distinct.len()
                        ),
                    });
                    Scale::Nominal {
                        values: nominal_values(mv, j),
                    }
                }
            }
            (AttributeKind::Numeric, ScalingStrategy::Explicit(map)) => {
                let cuts = map.get(&attr.name).ok_or_else(|| Error::InvalidScaling {
                    attribute: attr.name.clone(),
                    reason: "no cut points given".into(),
                })?;
                if cuts.is_empty() {
                    return Err(Error::InvalidScaling {
                        attribute: attr.name.clone(),
                        reason: "no cut points given".into(),
                    });
                }
                check_cuts(&attr.name, cuts)?;
                Scale::Ordinal {
                    cuts: cuts.clone(),
                    labels: bin_labels(cuts.len() + 1),
                }
            }
        };
        attributes.push(AttributeScale {
            name: attr.name.clone(),
            kind: attr.kind,
            scale,
        });
    }
    if let ScalingStrategy::Explicit(map) = strategy {
        if let Some(unknown) = map.keys().find(|k| mv.attribute_index(k).is_none()) {
            return Err(Error::UnknownAttribute(unknown.clone()));
        }
    }
    Ok((ScalingSpec { attributes }, warnings))
}

/// Contiguous feature-index blocks, one per source attribute, in attribute
/// order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeGroups {
    blocks: Vec<(String, Range<usize>)>,
}

impl AttributeGroups {
    pub fn new(blocks: Vec<(String, Range<usize>)>) -> Result<Self> {
        let mut next = 0;
        for (name, r) in &blocks {
            if r.start != next || r.end <= r.start {
                return Err(Error::InvalidScaling {
                    attribute: name.clone(),
                    reason: format!("block {r:?} does not continue the partition at {next}"),
                });
            }
            next = r.end;
        }
        Ok(AttributeGroups { blocks })
    }

    pub fn blocks(&self) -> &[(String, Range<usize>)] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.blocks.last().map_or(0, |(_, r)| r.end)
    }

    pub fn block(&self, name: &str) -> Option<Range<usize>> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, r)| r.clone())
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.blocks.iter().position(|(n, _)| n == name)
    }

    /// Feature set covering the given blocks (by block position).
    pub fn union_of(&self, block_ids: &[usize]) -> FeatureSet {
        let mut set = BitSet::empty(self.num_features());
        for &b in block_ids {
            for f in self.blocks[b].1.clone() {
                set.insert(f);
            }
        }
        set
    }

    /// Block positions fully covered by `features`.
    pub fn blocks_within(&self, features: &FeatureSet) -> Vec<usize> {
        (0..self.blocks.len())
            .filter(|&b| self.blocks[b].1.clone().all(|f| features.contains(f)))
            .collect()
    }

    /// True if `features` is a union of whole blocks.
    pub fn is_block_union(&self, features: &FeatureSet) -> bool {
        let covered = self.union_of(&self.blocks_within(features));
        covered == *features
    }
}

impl ScalingSpec {
    pub fn feature_names(&self) -> Vec<String> {
        self.attributes
            .iter()
            .flat_map(|a| a.scale.labels().iter().map(move |l| format!("{}={}", a.name, l)))
            .collect()
    }

    pub fn groups(&self) -> AttributeGroups {
        let mut start = 0;
        let blocks = self
            .attributes
            .iter()
            .map(|a| {
                let r = start..start + a.scale.num_features();
                start = r.end;
                (a.name.clone(), r)
            })
            .collect();
        AttributeGroups { blocks }
    }

    pub fn num_features(&self) -> usize {
        self.attributes.iter().map(|a| a.scale.num_features()).sum()
    }

    /// Checks the invariants a loaded spec must satisfy.
    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for a in &self.attributes {
            if !names.insert(a.name.as_str()) {
                return Err(Error::DuplicateIdentifier {
                    kind: "attribute",
                    id: a.name.clone(),
                });
            }
            match &a.scale {
                Scale::Nominal { values } => {
                    if values.is_empty() {
                        return Err(Error::InvalidScaling {
                            attribute: a.name.clone(),
                            reason: "no values".into(),
                        });
                    }
                }
                Scale::Ordinal { cuts, labels } => {
                    if a.kind != AttributeKind::Numeric {
                        return Err(Error::InvalidScaling {
                            attribute: a.name.clone(),
                            reason: "ordinal scale on a categorical attribute".into(),
                        });
                    }
                    check_cuts(&a.name, cuts)?;
                    if labels.len() != cuts.len() + 1 {
                        return Err(Error::InvalidScaling {
                            attribute: a.name.clone(),
                            reason: "bin labels do not match cut points".into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn scale_value(&self, attr: usize, value: &str) -> Result<usize> {
        let a = &self.attributes[attr];
        match &a.scale {
            Scale::Nominal { values } => {
                let key = if a.kind == AttributeKind::Numeric {
                    canonical_number(value)
                } else {
                    value.trim().to_string()
                };
                values
                    .iter()
                    .position(|v| *v == key)
                    .ok_or_else(|| Error::UnknownValue {
                        attribute: a.name.clone(),
                        value: value.to_string(),
                    })
            }
            Scale::Ordinal { cuts, .. } => {
                let v = parse_number(value).ok_or_else(|| Error::UnknownValue {
                    attribute: a.name.clone(),
                    value: value.to_string(),
                })?;
                Ok(cuts.iter().filter(|&&c| v > c).count())
            }
        }
    }

    fn scale_values<'a, F>(&self, mut lookup: F, object: &str) -> Result<FeatureSet>
    where
        F: FnMut(&str) -> Option<&'a str>,
    {
        let groups = self.groups();
        let mut set = BitSet::empty(self.num_features());
        for (j, a) in self.attributes.iter().enumerate() {
            let missing = || Error::MissingValue {
                object: object.to_string(),
                attribute: a.name.clone(),
            };
            let value = lookup(&a.name).ok_or_else(missing)?;
            // a blank nominal cell can be a category of its own; a blank number cannot
            if value.trim().is_empty() && matches!(a.scale, Scale::Ordinal { .. }) {
                return Err(missing());
            }
            let offset = self.scale_value(j, value)?;
            set.insert(groups.blocks[j].1.start + offset);
        }
        Ok(set)
    }
}

/// Scales every object of a many-valued context.
pub fn apply_scaling(mv: &ManyValuedContext, spec: &ScalingSpec) -> Result<(FormalContext, AttributeGroups)> {
    let cols: Vec<usize> = spec
        .attributes
        .iter()
        .map(|a| {
            mv.attribute_index(&a.name)
                .ok_or_else(|| Error::UnknownAttribute(a.name.clone()))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(mv.len());
    for (o, cells) in mv.cells.iter().enumerate() {
        let mut k = 0;
        let row = spec.scale_values(
            |_| {
                let v = cells[cols[k]].as_str();
                k += 1;
                Some(v)
            },
            &mv.objects[o],
        )?;
        rows.push(row);
    }
    let ctx = FormalContext::from_rows(mv.objects.clone(), spec.feature_names(), rows)?;
    Ok((ctx, spec.groups()))
}

/// Scales one raw object given as attribute name → value.
pub fn scale_object(spec: &ScalingSpec, raw_row: &HashMap<String, String>) -> Result<FeatureSet> {
    spec.scale_values(|name| raw_row.get(name).map(String::as_str), "<query>")
}

#[cfg(test)]
mod tests {
    use super::*;

    const APPLES: &str = "Type,Color,Volume,Sweetness,Local,Price,Class
1,red,High,High,Yes,Medium,1
2,green,High,High,Yes,Medium,1
3,red,Medium,Medium,Yes,Medium,2
4,green,Low,High,No,Medium,1
5,green,High,Medium,No,Low,1
6,red,Medium,Low,Yes,Low,2
7,green,High,Medium,Yes,Low,1
8,green,High,Medium,Yes,High,2
";

    fn apples() -> ManyValuedContext {
        parse_table(
            APPLES.as_bytes(),
            &ParseOptions {
                label_column: Some("Class".into()),
                require_label: true,
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn parses_apple_table_as_categorical() {
        let mv = apples();
        assert_eq!(mv.len(), 8);
        assert_eq!(mv.attributes.len(), 5);
        assert!(mv.attributes.iter().all(|a| a.kind == AttributeKind::Categorical));
        assert_eq!(mv.labels.as_ref().unwrap()[2], "2");
    }

    #[test]
    fn header_only_is_empty_table() {
        let err = parse_table("id,a\n".as_bytes(), &ParseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyTable));
    }

    #[test]
    fn ragged_and_duplicate_rows_rejected() {
        let err = parse_table("id,a\nx,1\ny\n".as_bytes(), &ParseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 2, .. }));
        let err = parse_table("id,a\nx,1\nx,2\n".as_bytes(), &ParseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DuplicateIdentifier { kind: "object", .. }));
    }

    #[test]
    fn numeric_inference() {
        let mv = parse_table("id,v\na,3.5\nb,2.0\nc,7.1\n".as_bytes(), &ParseOptions::default()).unwrap();
        assert_eq!(mv.attributes[0].kind, AttributeKind::Numeric);

        let err = parse_table("id,v\na,3.5\nb,\n".as_bytes(), &ParseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingValue { .. }));
        let (spec, _) = build_scaling_spec(&mv, &ScalingStrategy::Terciles).unwrap();
        let blank = HashMap::from([("v".to_string(), " ".to_string())]);
        assert!(matches!(scale_object(&spec, &blank), Err(Error::MissingValue { .. })));
    }

    #[test]
    fn quoted_fields_follow_rfc4180() {
        let mv = parse_table("id,c\n\"a,1\",\"x \"\"y\"\"\"\n".as_bytes(), &ParseOptions::default()).unwrap();
        assert_eq!(mv.objects[0], "a,1");
        assert_eq!(mv.cells[0][0], "x \"y\"");
    }

    #[test]
    fn terciles_on_one_to_nine() {
        let csv: String = std::iter::once("id,v".to_string())
            .chain((1..=9).map(|i| format!("o{i},{i}")))
            .collect::<Vec<_>>()
            .join("\n");
        let mv = parse_table(csv.as_bytes(), &ParseOptions::default()).unwrap();
        let (spec, warnings) = build_scaling_spec(&mv, &ScalingStrategy::Terciles).unwrap();
        assert!(warnings.is_empty());
        let Scale::Ordinal { cuts, labels } = &spec.attributes[0].scale else {
            panic!("expected ordinal scale")
        };
        assert!((cuts[0] - 11.0 / 3.0).abs() < 1e-12);
        assert!((cuts[1] - 19.0 / 3.0).abs() < 1e-12);
        assert_eq!(labels, &["Low", "Medium", "High"]);

        let (ctx, _) = apply_scaling(&mv, &spec).unwrap();
        let bins: Vec<usize> = (0..9).map(|o| ctx.row(o).to_vec()[0]).collect();
        assert_eq!(bins, vec![0, 0, 0, 1, 1, 1, 2, 2, 2]);
    }

    #[test]
    fn constant_column_falls_back_to_nominal() {
        let mv = parse_table("id,v\na,2\nb,2\nc,2.0\n".as_bytes(), &ParseOptions::default()).unwrap();
        let (spec, warnings) = build_scaling_spec(&mv, &ScalingStrategy::Terciles).unwrap();
        assert_eq!(warnings.len(), 1);
        assert_eq!(
            spec.attributes[0].scale,
            Scale::Nominal {
                values: vec!["2".into()]
            }
        );
        let (ctx, _) = apply_scaling(&mv, &spec).unwrap();
        assert_eq!(ctx.num_features(), 1);
    }

    #[test]
    fn explicit_cuts_validated() {
        let mv = parse_table("id,v\na,1\nb,5\n".as_bytes(), &ParseOptions::default()).unwrap();
        let bad = ScalingStrategy::Explicit(BTreeMap::from([("v".to_string(), vec![3.0, 2.0])]));
        assert!(build_scaling_spec(&mv, &bad).is_err());
        let missing = ScalingStrategy::Explicit(BTreeMap::new());
        assert!(build_scaling_spec(&mv, &missing).is_err());
        let ok = ScalingStrategy::Explicit(BTreeMap::from([("v".to_string(), vec![3.0])]));
        let (spec, _) = build_scaling_spec(&mv, &ok).unwrap();
        assert_eq!(spec.feature_names(), vec!["v=Low", "v=High"]);
    }

    #[test]
    fn apple_scaling_blocks() {
        let mv = apples();
        let (spec, _) = build_scaling_spec(&mv, &ScalingStrategy::Terciles).unwrap();
        let (ctx, groups) = apply_scaling(&mv, &spec).unwrap();
        assert_eq!((ctx.num_objects(), ctx.num_features()), (8, 13));
        let ranges: Vec<(String, Range<usize>)> = groups.blocks().to_vec();
        assert_eq!(
            ranges,
            vec![
                ("Color".to_string(), 0..2),
                ("Volume".to_string(), 2..5),
                ("Sweetness".to_string(), 5..8),
                ("Local".to_string(), 8..10),
                ("Price".to_string(), 10..13),
            ]
        );
        for o in 0..8 {
            for (_, r) in groups.blocks() {
                assert_eq!(r.clone().filter(|&f| ctx.incident(o, f)).count(), 1);
            }
        }
    }

    #[test]
    fn single_binary_attribute() {
        let mv = parse_table("id,b\nonly,yes\n".as_bytes(), &ParseOptions::default()).unwrap();
        let (spec, _) = build_scaling_spec(&mv, &ScalingStrategy::NominalOnly).unwrap();
        let (ctx, _) = apply_scaling(&mv, &spec).unwrap();
        assert_eq!(ctx.num_features(), 1);
        assert_eq!(ctx.row(0).count(), 1);
    }

    #[test]
    fn scale_object_t0_and_errors() {
        let mv = apples();
        let (spec, _) = build_scaling_spec(&mv, &ScalingStrategy::Terciles).unwrap();
        let names = spec.feature_names();
        let row = |pairs: &[(&str, &str)]| -> HashMap<String, String> {
            pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
        };
        let t0 = row(&[
            ("Color", "green"),
            ("Volume", "High"),
            ("Sweetness", "High"),
            ("Local", "Yes"),
            ("Price", "High"),
        ]);
        let fs = scale_object(&spec, &t0).unwrap();
        let got: Vec<&str> = fs.iter().map(|f| names[f].as_str()).collect();
        assert_eq!(
            got,
            vec![
                "Color=green",
                "Volume=High",
                "Sweetness=High",
                "Local=Yes",
                "Price=High"
            ]
        );

        let (ctx, _) = apply_scaling(&mv, &spec).unwrap();
        assert_eq!(scale_object(&spec, &mv.row_map(0)).unwrap(), *ctx.row(0));

        let mut missing = t0.clone();
        missing.remove("Price");
        assert!(matches!(scale_object(&spec, &missing), Err(Error::MissingValue { .. })));
        let mut unseen = t0;
        unseen.insert("Color".into(), "yellow".into());
        assert!(matches!(scale_object(&spec, &unseen), Err(Error::UnknownValue { .. })));
    }

    #[test]
    fn block_restriction_matches_nominal_scaling_of_that_attribute() {
        let mv = apples();
        let (spec, _) = build_scaling_spec(&mv, &ScalingStrategy::NominalOnly).unwrap();
        let (ctx, groups) = apply_scaling(&mv, &spec).unwrap();
        for (b, (name, range)) in groups.blocks().iter().enumerate() {
            let sub = ctx.induce_subcontext(&groups.union_of(&[b]));
            let j = mv.attribute_index(name).unwrap();
            let single = ManyValuedContext {
                objects: mv.objects.clone(),
                attributes: vec![mv.attributes[j].clone()],
                cells: mv.cells.iter().map(|r| vec![r[j].clone()]).collect(),
                labels: None,
            };
            let (s_spec, _) = build_scaling_spec(&single, &ScalingStrategy::NominalOnly).unwrap();
            let (s_ctx, _) = apply_scaling(&single, &s_spec).unwrap();
            assert_eq!(sub.num_features(), range.len());
            for o in 0..ctx.num_objects() {
                assert_eq!(sub.row(o), s_ctx.row(o));
            }
        }
    }
}

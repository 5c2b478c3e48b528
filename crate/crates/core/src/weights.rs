//! Labels, source elements, orderings, and the prefix-sum calculus.
//!
//! A *source element* assigns exact rational weights to finitely many labels.
//! Weights are strictly positive where stored (a label outside the support
//! weighs zero), and the total weight never exceeds one — the "missing" mass
//! is unallocated rather than assigned to any label. A source element induces
//! a total preorder on labels by weight: `u` is strictly below `v` when it
//! weighs strictly less.
//!
//! An [`Ordering`] is an injective enumeration of labels that lists a source
//! element's support as a weight-descending prefix; applying one yields a
//! [`DescendingSequence`], the label-free shape on which majorization and the
//! lattice operations work. The [`integral`] (prefix sums) and
//! [`differential`] (consecutive differences) maps translate between a
//! sequence and its running totals and are mutually inverse.

use std::cmp;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::ratio::{format_ratio, Ratio};

/// An opaque, totally ordered label naming one alternative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    /// Wraps a string as a label.
    pub fn new(name: impl Into<String>) -> Self {
        Label(name.into())
    }

    /// The label text.
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

/// A finitely supported assignment of positive rational weights to labels,
/// totalling at most one.
///
/// Zero weights are never stored: `weight` returns zero for any label outside
/// the support, so a source element behaves as a total function on labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceElement {
    weights: BTreeMap<Label, Ratio>,
}

impl SourceElement {
    /// The element with empty support (no information).
    pub fn empty() -> Self {
        SourceElement {
            weights: BTreeMap::new(),
        }
    }

    /// Builds a source element from label–weight pairs.
    ///
    /// Zero weights are dropped. Fails on a repeated label, a negative
    /// weight, or a total exceeding one.
    pub fn new<L, I>(entries: I) -> Result<Self, Error>
    where
        L: Into<Label>,
        I: IntoIterator<Item = (L, Ratio)>,
    {
        let mut weights = BTreeMap::new();
        let mut total = Ratio::zero();
        for (label, weight) in entries {
            let label = label.into();
            if weight.is_negative() {
                return Err(Error::NegativeWeight {
                    label: label.to_string(),
                    weight: format_ratio(&weight),
                });
            }
            if weight.is_zero() {
                // Zero entries are still checked for duplication above, but
                // never stored: support means strictly positive weight.
                if weights.contains_key(&label) {
                    return Err(Error::DuplicateLabel {
                        label: label.to_string(),
                    });
                }
                continue;
            }
            total += &weight;
            if weights.insert(label.clone(), weight).is_some() {
                return Err(Error::DuplicateLabel {
                    label: label.to_string(),
                });
            }
        }
        if total > Ratio::one() {
            return Err(Error::TotalWeightExceedsOne {
                total: format_ratio(&total),
            });
        }
        Ok(SourceElement { weights })
    }

    /// The weight of `label`; zero outside the support.
    pub fn weight(&self, label: &Label) -> Ratio {
        self.weights.get(label).cloned().unwrap_or_else(Ratio::zero)
    }

    /// Labels with strictly positive weight, in label order.
    pub fn support(&self) -> impl Iterator<Item = &Label> {
        self.weights.keys()
    }

    /// Number of labels in the support.
    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    /// True when the support is empty.
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Iterates over `(label, weight)` pairs in label order.
    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Ratio)> {
        self.weights.iter()
    }

    /// Sum of all weights; at most one.
    pub fn total_weight(&self) -> Ratio {
        self.weights.values().fold(Ratio::zero(), |a, w| a + w)
    }

    /// Compares two labels by weight: `Less` means `u` is strictly below `v`.
    pub fn prefer(&self, u: &Label, v: &Label) -> cmp::Ordering {
        self.weight(u).cmp(&self.weight(v))
    }

    /// The support grouped into indifference classes, listed from the
    /// lightest class to the heaviest; labels inside a class are sorted.
    pub fn preference_chain(&self) -> Vec<Vec<Label>> {
        let mut by_weight: BTreeMap<Ratio, Vec<Label>> = BTreeMap::new();
        for (label, weight) in &self.weights {
            by_weight
                .entry(weight.clone())
                .or_default()
                .push(label.clone());
        }
        by_weight.into_values().collect()
    }

    /// The weights sorted descending: the label-free shape of this element.
    pub fn sorted_weights(&self) -> DescendingSequence {
        let mut values: Vec<Ratio> = self.weights.values().cloned().collect();
        values.sort_unstable_by(|a, b| b.cmp(a));
        DescendingSequence { values }
    }
}

/// An injective enumeration `ϑ` of labels whose positions order a source
/// element's support as a weight-descending prefix.
///
/// The enumeration is the forward map `position → label`; the retraction
/// `label → position` is precomputed. An ordering may be longer than the
/// support it sorts — trailing labels simply carry weight zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordering {
    labels: Vec<Label>,
    positions: BTreeMap<Label, usize>,
}

impl Ordering {
    /// Builds an ordering from distinct labels.
    pub fn new<L, I>(labels: I) -> Result<Self, Error>
    where
        L: Into<Label>,
        I: IntoIterator<Item = L>,
    {
        let labels: Vec<Label> = labels.into_iter().map(Into::into).collect();
        let mut positions = BTreeMap::new();
        for (i, label) in labels.iter().enumerate() {
            if positions.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel {
                    label: label.to_string(),
                });
            }
        }
        Ok(Ordering { labels, positions })
    }

    /// The canonical ordering of `source`: weight descending, ties broken by
    /// label. Its length equals the support size.
    pub fn canonical(source: &SourceElement) -> Self {
        let mut labels: Vec<Label> = source.support().cloned().collect();
        labels.sort_by(|a, b| {
            source
                .weight(b)
                .cmp(&source.weight(a))
                .then_with(|| a.cmp(b))
        });
        Ordering::new(labels).expect("support labels are distinct")
    }

    /// The canonical ordering of `source` extended over a whole universe of
    /// labels; zero-weight labels trail in label order. Fails if the universe
    /// misses part of the support or repeats a label.
    pub fn over_universe<'a>(
        source: &SourceElement,
        universe: impl IntoIterator<Item = &'a Label>,
    ) -> Result<Self, Error> {
        let mut labels: Vec<Label> = universe.into_iter().cloned().collect();
        let seen: BTreeSet<&Label> = labels.iter().collect();
        for label in source.support() {
            if !seen.contains(label) {
                return Err(Error::NotAnOrdering {
                    detail: format!("universe misses support label {label:?}"),
                });
            }
        }
        labels.sort_by(|a, b| {
            source
                .weight(b)
                .cmp(&source.weight(a))
                .then_with(|| a.cmp(b))
        });
        Ordering::new(labels)
    }

    /// Number of positions.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// True when the ordering enumerates no labels.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The label at `position`, if in range.
    pub fn label(&self, position: usize) -> Option<&Label> {
        self.labels.get(position)
    }

    /// The position of `label`, if enumerated.
    pub fn position(&self, label: &Label) -> Option<usize> {
        self.positions.get(label).copied()
    }

    /// All labels in enumeration order.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// True when this enumeration orders `source`: the support is covered
    /// and the weights along the enumeration never increase.
    pub fn orders(&self, source: &SourceElement) -> bool {
        if source.support().any(|l| !self.positions.contains_key(l)) {
            return false;
        }
        self.labels
            .windows(2)
            .all(|w| source.weight(&w[0]) >= source.weight(&w[1]))
    }

    /// Reads the weights of `source` along the enumeration, including any
    /// trailing zeros. Fails unless this is an ordering of `source`.
    pub fn apply(&self, source: &SourceElement) -> Result<DescendingSequence, Error> {
        if !self.orders(source) {
            return Err(Error::NotAnOrdering {
                detail: "weights are not descending along the enumeration".into(),
            });
        }
        Ok(DescendingSequence {
            values: self.labels.iter().map(|l| source.weight(l)).collect(),
        })
    }

    /// Reattaches a descending sequence to labels via the enumeration,
    /// inverting [`Ordering::apply`]. The sequence length must equal the
    /// enumeration length.
    pub fn unapply(&self, sequence: &DescendingSequence) -> Result<SourceElement, Error> {
        if sequence.len() != self.labels.len() {
            return Err(Error::LengthMismatch {
                expected: self.labels.len(),
                got: sequence.len(),
            });
        }
        SourceElement::new(
            self.labels
                .iter()
                .cloned()
                .zip(sequence.values().iter().cloned()),
        )
    }
}

/// A finite nonincreasing sequence of nonnegative rationals summing to at
/// most one: the label-free shape of a source element.
///
/// Trailing zeros are permitted and irrelevant to comparisons made through
/// [`DescendingSequence::eq_padded`] or any prefix-sum test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescendingSequence {
    values: Vec<Ratio>,
}

impl DescendingSequence {
    /// Validates and wraps a nonincreasing, nonnegative sequence with total
    /// at most one.
    pub fn new(values: Vec<Ratio>) -> Result<Self, Error> {
        if let Some(last) = values.last() {
            if last.is_negative() {
                return Err(Error::NegativeWeight {
                    label: format!("position {}", values.len() - 1),
                    weight: format_ratio(last),
                });
            }
        }
        if let Some(w) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::invariant(format!(
                "sequence increases at position {}: {} < {}",
                w,
                format_ratio(&values[w]),
                format_ratio(&values[w + 1]),
            )));
        }
        let total = values.iter().fold(Ratio::zero(), |a, v| a + v);
        if total > Ratio::one() {
            return Err(Error::TotalWeightExceedsOne {
                total: format_ratio(&total),
            });
        }
        Ok(DescendingSequence { values })
    }

    /// The empty sequence.
    pub fn empty() -> Self {
        DescendingSequence { values: Vec::new() }
    }

    /// The underlying values.
    pub fn values(&self) -> &[Ratio] {
        &self.values
    }

    /// Number of stored positions (trailing zeros included).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when nothing is stored.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The value at `position`, zero beyond the stored length.
    pub fn get(&self, position: usize) -> Ratio {
        self.values
            .get(position)
            .cloned()
            .unwrap_or_else(Ratio::zero)
    }

    /// Total of all values.
    pub fn total(&self) -> Ratio {
        self.values.iter().fold(Ratio::zero(), |a, v| a + v)
    }

    /// Equality up to trailing zeros.
    pub fn eq_padded(&self, other: &DescendingSequence) -> bool {
        let n = self.len().max(other.len());
        (0..n).all(|i| self.get(i) == other.get(i))
    }

    /// Prefix sums of the stored values.
    pub fn integral(&self) -> Vec<Ratio> {
        integral(&self.values)
    }
}

/// Prefix sums: `integral(α)[k] = α[0] + … + α[k]`.
///
/// The integral of a descending nonnegative sequence is nondecreasing and
/// concave; [`differential`] inverts it.
pub fn integral(values: &[Ratio]) -> Vec<Ratio> {
    let mut total = Ratio::zero();
    values
        .iter()
        .map(|v| {
            total += v;
            total.clone()
        })
        .collect()
}

/// Consecutive differences with an implicit zero before the first entry:
/// `differential(α)[k] = α[k] − α[k−1]`, `α[−1] = 0`. Inverts [`integral`].
pub fn differential(values: &[Ratio]) -> Vec<Ratio> {
    let mut previous = Ratio::zero();
    values
        .iter()
        .map(|v| {
            let step = v - &previous;
            previous = v.clone();
            step
        })
        .collect()
}

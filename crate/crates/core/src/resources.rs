//! Resources: finite substochastic maps from input labels to weighted
//! outputs.
//!
//! A [`Resource`] assigns to each input label a [`SourceElement`] over output
//! labels — a possibly deficient distribution, since weight may be withheld.
//! Inputs outside the domain behave as the empty element, and empty outputs
//! are never stored, so a resource is extensionally a total map.
//!
//! Resources compose like channels ([`Resource::then`]): the output of the
//! first feeds the input of the second, multiplying weights along every
//! path. A [`PartialMap`] — a partial function between labels — embeds as
//! the deterministic resource sending each domain point to a unit mass
//! ([`Resource::deterministic`]); pre-composing one rewires inputs
//! ([`apply_request`]) and post-composing one relabels or withholds outputs
//! ([`apply_policy`]).
//!
//! The lattice structure lifts pointwise: [`resource_fusion`] and
//! [`resource_meet`] fuse or meet the outputs input by input over the union
//! of domains, and [`resource_leq`] compares resources input by input under
//! majorization.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::error::Error;
use crate::lattice::{fusion, meet};
use crate::majorization::is_majorized;
use crate::ratio::Ratio;
use crate::weights::{Label, SourceElement};

/// A partial function between labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMap {
    mapping: BTreeMap<Label, Label>,
}

impl PartialMap {
    /// The nowhere-defined map.
    pub fn empty() -> Self {
        PartialMap {
            mapping: BTreeMap::new(),
        }
    }

    /// Builds a partial map from source–target pairs; sources must be
    /// distinct.
    pub fn new<L, M, I>(pairs: I) -> Result<Self, Error>
    where
        L: Into<Label>,
        M: Into<Label>,
        I: IntoIterator<Item = (L, M)>,
    {
        let mut mapping = BTreeMap::new();
        for (source, target) in pairs {
            let source = source.into();
            if mapping.insert(source.clone(), target.into()).is_some() {
                return Err(Error::DuplicateLabel {
                    label: source.to_string(),
                });
            }
        }
        Ok(PartialMap { mapping })
    }

    /// The identity on the given labels.
    pub fn identity_on<L, I>(labels: I) -> Self
    where
        L: Into<Label>,
        I: IntoIterator<Item = L>,
    {
        PartialMap {
            mapping: labels
                .into_iter()
                .map(|l| {
                    let l = l.into();
                    (l.clone(), l)
                })
                .collect(),
        }
    }

    /// The image of `label`, if defined.
    pub fn apply(&self, label: &Label) -> Option<&Label> {
        self.mapping.get(label)
    }

    /// Labels the map is defined on, in label order.
    pub fn domain(&self) -> impl Iterator<Item = &Label> {
        self.mapping.keys()
    }

    /// Iterates over `(source, target)` pairs in source order.
    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Label)> {
        self.mapping.iter()
    }

    /// Number of domain labels.
    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    /// True when nowhere defined.
    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// Composition `other ∘ self`: defined where `self` is defined and its
    /// target lies in `other`'s domain.
    pub fn then(&self, other: &PartialMap) -> PartialMap {
        PartialMap {
            mapping: self
                .mapping
                .iter()
                .filter_map(|(s, mid)| other.apply(mid).map(|t| (s.clone(), t.clone())))
                .collect(),
        }
    }
}

/// A finite substochastic map: each input label yields a weighted set of
/// output labels totalling at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resource {
    outputs: BTreeMap<Label, SourceElement>,
}

impl Resource {
    /// The resource with empty domain.
    pub fn empty() -> Self {
        Resource {
            outputs: BTreeMap::new(),
        }
    }

    /// Builds a resource from input–output pairs. Empty outputs are dropped;
    /// a repeated input fails.
    pub fn new<L, I>(entries: I) -> Result<Self, Error>
    where
        L: Into<Label>,
        I: IntoIterator<Item = (L, SourceElement)>,
    {
        let mut outputs = BTreeMap::new();
        for (input, output) in entries {
            let input = input.into();
            if output.is_empty() {
                if outputs.contains_key(&input) {
                    return Err(Error::DuplicateLabel {
                        label: input.to_string(),
                    });
                }
                continue;
            }
            if outputs.insert(input.clone(), output).is_some() {
                return Err(Error::DuplicateLabel {
                    label: input.to_string(),
                });
            }
        }
        Ok(Resource { outputs })
    }

    /// The deterministic resource of a partial map: each domain point maps
    /// to a unit mass on its target.
    pub fn deterministic(map: &PartialMap) -> Self {
        Resource {
            outputs: map
                .iter()
                .map(|(s, t)| {
                    let output = SourceElement::new([(t.clone(), Ratio::one())])
                        .expect("a unit mass is a valid element");
                    (s.clone(), output)
                })
                .collect(),
        }
    }

    /// The output element at `input`; empty outside the domain.
    pub fn at(&self, input: &Label) -> SourceElement {
        self.outputs
            .get(input)
            .cloned()
            .unwrap_or_else(SourceElement::empty)
    }

    /// Inputs with nonempty output, in label order.
    pub fn domain(&self) -> impl Iterator<Item = &Label> {
        self.outputs.keys()
    }

    /// Number of domain inputs.
    pub fn domain_size(&self) -> usize {
        self.outputs.len()
    }

    /// True when the domain is empty.
    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    /// Iterates over `(input, output)` pairs in input order.
    pub fn iter(&self) -> impl Iterator<Item = (&Label, &SourceElement)> {
        self.outputs.iter()
    }

    /// Channel composition: feeds this resource's outputs into `next`.
    ///
    /// On input `x`, the weight of `z` is the sum over intermediate labels
    /// `y` of `self`'s weight of `y` times `next`'s weight of `z` from `y`.
    /// Mass on intermediates outside `next`'s domain is withheld.
    pub fn then(&self, next: &Resource) -> Resource {
        let mut outputs = BTreeMap::new();
        for (input, mid) in &self.outputs {
            let mut weights: BTreeMap<Label, Ratio> = BTreeMap::new();
            for (y, w) in mid.iter() {
                for (z, v) in next.at(y).iter() {
                    *weights.entry(z.clone()).or_default() += w * v;
                }
            }
            let output =
                SourceElement::new(weights).expect("substochastic maps compose substochastically");
            if !output.is_empty() {
                outputs.insert(input.clone(), output);
            }
        }
        Resource { outputs }
    }
}

/// Rewires the inputs of `resource` through `request`: on input `x`, serves
/// `resource` at `request(x)`. Inputs outside the request's domain yield
/// nothing.
pub fn apply_request(resource: &Resource, request: &PartialMap) -> Resource {
    Resource::deterministic(request).then(resource)
}

/// Filters the outputs of `resource` through `policy`: each output label is
/// relabelled by `policy`, and mass on labels the policy does not cover is
/// withheld.
pub fn apply_policy(resource: &Resource, policy: &PartialMap) -> Resource {
    resource.then(&Resource::deterministic(policy))
}

/// The union of the resources' domains, in label order.
fn joint_domain(resources: &[Resource]) -> BTreeSet<Label> {
    resources.iter().flat_map(|r| r.domain().cloned()).collect()
}

/// Fuses resources input by input over the union of domains: the output at
/// each input is the fusion of every resource's output there. Fusing with
/// an empty resource changes nothing.
pub fn resource_fusion(resources: &[Resource]) -> Resource {
    let outputs = joint_domain(resources)
        .into_iter()
        .map(|input| {
            let elements: Vec<SourceElement> = resources.iter().map(|r| r.at(&input)).collect();
            (input, fusion(&elements))
        })
        .collect::<Vec<_>>();
    Resource::new(outputs).expect("domain labels are distinct")
}

/// Meets resources input by input over the union of domains. Any input
/// missing from some resource meets against the empty element, so the
/// result is empty there.
pub fn resource_meet(resources: &[Resource]) -> Resource {
    let outputs = joint_domain(resources)
        .into_iter()
        .map(|input| {
            let elements: Vec<SourceElement> = resources.iter().map(|r| r.at(&input)).collect();
            (input, meet(&elements))
        })
        .collect::<Vec<_>>();
    Resource::new(outputs).expect("domain labels are distinct")
}

/// Pointwise majorization of resources: every output of `lower` is
/// majorized by the output of `upper` at the same input.
pub fn resource_leq(lower: &Resource, upper: &Resource) -> bool {
    joint_domain(&[lower.clone(), upper.clone()])
        .iter()
        .all(|input| is_majorized(&lower.at(input), &upper.at(input)))
}

/// A binary symmetric channel over the labels `"0"` and `"1"`: each bit
/// passes unchanged with weight `1 − flip` and toggles with weight `flip`.
pub fn binary_symmetric_channel(flip: Ratio) -> Result<Resource, Error> {
    let keep = Ratio::one() - &flip;
    Resource::new([
        (
            "0",
            SourceElement::new([("0", keep.clone()), ("1", flip.clone())])?,
        ),
        ("1", SourceElement::new([("0", flip), ("1", keep)])?),
    ])
}

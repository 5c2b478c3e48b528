//! Resource networks, scripted provision protocols, and privacy checks.
//!
//! A [`ResourceNetwork`] holds a set of subjects, each with a base
//! [`Resource`] and optionally a [`Casting`] — a pair of partial maps
//! embedding the subject's local labels into the network namespace and
//! projecting back, with projection retracting the embedding.
//!
//! A [`ProtocolScript`] is a sequence of steps. Every grant lands in the
//! recipient's *holdings*: the set of resources they have received, seeded
//! with their base. A subject's effective knowledge is the fusion of their
//! holdings ([`RunTrace::accumulated`]), recomputed as holdings grow, and a
//! provider always serves from that fused view — never from the base alone.
//! Each step's record notes the grant, the recipient's resulting knowledge,
//! and any inputs at which the recipient now holds contradictory weights
//! (with a preference cycle as evidence).
//!
//! The privacy notions compare what a party can assemble against what was
//! deliberately released. [`strong_privacy`] demands that fusing a party's
//! prior knowledge with the release stays majorized by the release at every
//! input; [`local_privacy`] is weaker, first meeting that combination with
//! the data owner's actual resource, so only knowledge the owner really
//! holds can count as a violation. A strong pass implies a local pass.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::lattice::{find_preference_cycle, is_consistent};
use crate::majorization::is_majorized;
use crate::resources::{
    apply_policy, apply_request, resource_fusion, resource_meet, PartialMap, Resource,
};
use crate::weights::{Label, SourceElement};

/// A named participant of a resource network.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subject(String);

impl Subject {
    /// Wraps a string as a subject name.
    pub fn new(name: impl Into<String>) -> Self {
        Subject(name.into())
    }

    /// The subject name.
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Subject {
    fn from(s: &str) -> Self {
        Subject::new(s)
    }
}

impl From<String> for Subject {
    fn from(s: String) -> Self {
        Subject(s)
    }
}

/// An embedding of a subject's labels into the network namespace together
/// with the projection back. The projection must retract the embedding:
/// every embedded label projects to where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Casting {
    embed: PartialMap,
    project: PartialMap,
}

impl Casting {
    /// Validates the retraction law and builds the casting.
    pub fn new(embed: PartialMap, project: PartialMap) -> Result<Self, Error> {
        for (local, network) in embed.iter() {
            if project.apply(network) != Some(local) {
                return Err(Error::invariant(format!(
                    "casting does not retract: {local} embeds to {network} but does not project back"
                )));
            }
        }
        Ok(Casting { embed, project })
    }

    /// Local labels into the network namespace.
    pub fn embed(&self) -> &PartialMap {
        &self.embed
    }

    /// Network labels back onto local ones.
    pub fn project(&self) -> &PartialMap {
        &self.project
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct SubjectEntry {
    base: Resource,
    casting: Option<Casting>,
}

/// Subjects with their base resources and optional castings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResourceNetwork {
    subjects: BTreeMap<Subject, SubjectEntry>,
}

impl ResourceNetwork {
    /// An empty network.
    pub fn new() -> Self {
        ResourceNetwork::default()
    }

    /// Adds a subject with its base resource; the name must be fresh.
    pub fn add_subject(
        &mut self,
        subject: impl Into<Subject>,
        base: Resource,
    ) -> Result<(), Error> {
        let subject = subject.into();
        if self.subjects.contains_key(&subject) {
            return Err(Error::DuplicateLabel {
                label: subject.to_string(),
            });
        }
        self.subjects.insert(
            subject,
            SubjectEntry {
                base,
                casting: None,
            },
        );
        Ok(())
    }

    /// Attaches a casting to an existing subject.
    pub fn set_casting(&mut self, subject: &Subject, casting: Casting) -> Result<(), Error> {
        let entry = self
            .subjects
            .get_mut(subject)
            .ok_or_else(|| Error::UnknownSubject {
                subject: subject.to_string(),
            })?;
        entry.casting = Some(casting);
        Ok(())
    }

    /// All subjects in name order.
    pub fn subjects(&self) -> impl Iterator<Item = &Subject> {
        self.subjects.keys()
    }

    /// True when `subject` belongs to the network.
    pub fn contains(&self, subject: &Subject) -> bool {
        self.subjects.contains_key(subject)
    }

    /// The base resource of `subject`.
    pub fn base(&self, subject: &Subject) -> Result<&Resource, Error> {
        self.subjects
            .get(subject)
            .map(|e| &e.base)
            .ok_or_else(|| Error::UnknownSubject {
                subject: subject.to_string(),
            })
    }

    /// The casting of `subject`, if any.
    pub fn casting(&self, subject: &Subject) -> Result<Option<&Casting>, Error> {
        self.subjects
            .get(subject)
            .map(|e| e.casting.as_ref())
            .ok_or_else(|| Error::UnknownSubject {
                subject: subject.to_string(),
            })
    }
}

/// Where a step takes its resource from: a subject's current fused
/// knowledge, or the grant of an earlier tagged step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepSource {
    /// The fused holdings of a subject at the moment the step runs.
    Subject(Subject),
    /// The resource granted by the earlier step carrying this tag.
    Tagged(String),
}

/// One step of a protocol script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// Resource provision: the provider serves its fused knowledge through
    /// a request and a policy, and the result is granted to a recipient.
    Rp {
        /// Subject serving the resource.
        provider: Subject,
        /// Rewires network inputs onto the provider's inputs.
        request: PartialMap,
        /// Filters and relabels the provider's outputs.
        policy: PartialMap,
        /// Subject receiving the grant.
        assign_to: Subject,
        /// Name for later reference.
        tag: String,
    },
    /// Chained provision: a source resource is pulled through a list of
    /// requests (applied innermost first, in order) and then a list of
    /// policies (applied in order).
    Compose {
        /// Where the resource comes from.
        source: StepSource,
        /// Input rewirings, applied in order.
        requests: Vec<PartialMap>,
        /// Output filters, applied in order.
        policies: Vec<PartialMap>,
        /// Subject receiving the grant.
        assign_to: Subject,
        /// Name for later reference.
        tag: String,
    },
    /// Grants the fusion of several sources.
    Fuse {
        /// Resources to fuse; must be nonempty.
        sources: Vec<StepSource>,
        /// Subject receiving the grant.
        assign_to: Subject,
        /// Name for later reference.
        tag: String,
    },
}

impl Step {
    /// The tag naming this step.
    pub fn tag(&self) -> &str {
        match self {
            Step::Rp { tag, .. } | Step::Compose { tag, .. } | Step::Fuse { tag, .. } => tag,
        }
    }

    /// The subject receiving this step's grant.
    pub fn recipient(&self) -> &Subject {
        match self {
            Step::Rp { assign_to, .. }
            | Step::Compose { assign_to, .. }
            | Step::Fuse { assign_to, .. } => assign_to,
        }
    }
}

/// A sequence of steps over a network.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProtocolScript {
    steps: Vec<Step>,
}

impl ProtocolScript {
    /// Wraps a list of steps.
    pub fn new(steps: Vec<Step>) -> Self {
        ProtocolScript { steps }
    }

    /// The steps in order.
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }
}

/// An input at which a subject's holdings contradict each other, with a
/// preference cycle over the disputed output labels as evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InconsistencyDiagnostic {
    /// Subject holding the contradictory resources.
    pub subject: Subject,
    /// Input at which the held outputs disagree.
    pub input: Label,
    /// A strict preference cycle, first label repeated at the end.
    pub cycle: Vec<Label>,
}

/// The record of one executed step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    /// Position in the script, from zero.
    pub index: usize,
    /// The step's tag.
    pub tag: String,
    /// Human-readable summary of what ran.
    pub action: String,
    /// Subject that received the grant.
    pub recipient: Subject,
    /// The granted resource.
    pub granted: Resource,
    /// The recipient's fused knowledge after the grant.
    pub accumulated: Resource,
    /// Inputs at which the recipient now holds contradictory weights.
    pub diagnostics: Vec<InconsistencyDiagnostic>,
}

/// The full result of running a script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    steps: Vec<StepRecord>,
    holdings: BTreeMap<Subject, Vec<Resource>>,
}

impl RunTrace {
    /// Records of every executed step, in order.
    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    /// Every resource `subject` holds: the base followed by grants in
    /// arrival order.
    pub fn holdings(&self, subject: &Subject) -> Result<&[Resource], Error> {
        self.holdings
            .get(subject)
            .map(|h| h.as_slice())
            .ok_or_else(|| Error::UnknownSubject {
                subject: subject.to_string(),
            })
    }

    /// The fusion of everything `subject` holds after the run.
    pub fn accumulated(&self, subject: &Subject) -> Result<Resource, Error> {
        self.holdings(subject).map(resource_fusion)
    }
}

/// A single stand-alone provision from a subject's *base* resource: the
/// base pulled through a request and a policy, outside any script.
pub fn rp_run(
    network: &ResourceNetwork,
    provider: &Subject,
    request: &PartialMap,
    policy: &PartialMap,
) -> Result<Resource, Error> {
    Ok(apply_policy(
        &apply_request(network.base(provider)?, request),
        policy,
    ))
}

/// Runs a script over a network, producing a full trace.
///
/// Tags must be distinct; a [`StepSource::Tagged`] reference must name a
/// step strictly earlier in the script. Providers serve from their fused
/// holdings at the moment the step executes.
pub fn run(network: &ResourceNetwork, script: &ProtocolScript) -> Result<RunTrace, Error> {
    let mut tag_position: BTreeMap<&str, usize> = BTreeMap::new();
    for (index, step) in script.steps().iter().enumerate() {
        if tag_position.insert(step.tag(), index).is_some() {
            return Err(Error::MalformedStep {
                index,
                detail: format!("tag {:?} is already taken", step.tag()),
            });
        }
    }
    let mut holdings: BTreeMap<Subject, Vec<Resource>> = BTreeMap::new();
    for subject in network.subjects() {
        holdings.insert(subject.clone(), vec![network.base(subject)?.clone()]);
    }
    let accumulated = |holdings: &BTreeMap<Subject, Vec<Resource>>, subject: &Subject| {
        holdings
            .get(subject)
            .map(|h| resource_fusion(h))
            .ok_or_else(|| Error::UnknownSubject {
                subject: subject.to_string(),
            })
    };
    let mut granted_by_step: Vec<Resource> = Vec::new();
    let mut records: Vec<StepRecord> = Vec::new();
    for (index, step) in script.steps().iter().enumerate() {
        let resolve = |source: &StepSource,
                       holdings: &BTreeMap<Subject, Vec<Resource>>,
                       granted_by_step: &[Resource]|
         -> Result<Resource, Error> {
            match source {
                StepSource::Subject(subject) => accumulated(holdings, subject),
                StepSource::Tagged(tag) => {
                    let position = *tag_position
                        .get(tag.as_str())
                        .ok_or_else(|| Error::UnknownTag { tag: tag.clone() })?;
                    if position >= index {
                        return Err(Error::DanglingTag { tag: tag.clone() });
                    }
                    Ok(granted_by_step[position].clone())
                }
            }
        };
        let (granted, action) = match step {
            Step::Rp {
                provider,
                request,
                policy,
                assign_to,
                ..
            } => {
                let served = accumulated(&holdings, provider)?;
                let granted = apply_policy(&apply_request(&served, request), policy);
                (granted, format!("rp {provider}→{assign_to}"))
            }
            Step::Compose {
                source,
                requests,
                policies,
                assign_to,
                ..
            } => {
                let mut resource = resolve(source, &holdings, &granted_by_step)?;
                for request in requests {
                    resource = apply_request(&resource, request);
                }
                for policy in policies {
                    resource = apply_policy(&resource, policy);
                }
                (resource, format!("compose→{assign_to}"))
            }
            Step::Fuse {
                sources, assign_to, ..
            } => {
                if sources.is_empty() {
                    return Err(Error::MalformedStep {
                        index,
                        detail: "fuse step needs at least one source".into(),
                    });
                }
                let resources = sources
                    .iter()
                    .map(|s| resolve(s, &holdings, &granted_by_step))
                    .collect::<Result<Vec<_>, _>>()?;
                (resource_fusion(&resources), format!("fuse→{assign_to}"))
            }
        };
        let recipient = step.recipient().clone();
        holdings
            .get_mut(&recipient)
            .ok_or_else(|| Error::UnknownSubject {
                subject: recipient.to_string(),
            })?
            .push(granted.clone());
        let diagnostics = holding_conflicts(&recipient, &holdings[&recipient]);
        let accumulated_after = accumulated(&holdings, &recipient)?;
        granted_by_step.push(granted.clone());
        records.push(StepRecord {
            index,
            tag: step.tag().to_string(),
            action,
            recipient,
            granted,
            accumulated: accumulated_after,
            diagnostics,
        });
    }
    Ok(RunTrace {
        steps: records,
        holdings,
    })
}

/// Inputs at which `held` resources assign contradictory weights, each with
/// a preference cycle as evidence.
fn holding_conflicts(subject: &Subject, held: &[Resource]) -> Vec<InconsistencyDiagnostic> {
    let mut inputs: Vec<Label> = held.iter().flat_map(|r| r.domain().cloned()).collect();
    inputs.sort();
    inputs.dedup();
    inputs
        .into_iter()
        .filter_map(|input| {
            let outputs: Vec<SourceElement> = held.iter().map(|r| r.at(&input)).collect();
            if is_consistent(&outputs) {
                None
            } else {
                let cycle =
                    find_preference_cycle(&outputs).expect("inconsistent sets contain a cycle");
                Some(InconsistencyDiagnostic {
                    subject: subject.clone(),
                    input,
                    cycle,
                })
            }
        })
        .collect()
}

/// The outcome of a privacy check: either every input is within bounds, or
/// a witness input where assembled knowledge exceeds the release.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrivacyVerdict {
    /// Assembled knowledge is majorized by the release at every input.
    Satisfied,
    /// At some input, assembled knowledge escapes the release.
    Violated {
        /// The offending input.
        input: Label,
        /// What the receiving party can assemble there.
        attained: SourceElement,
        /// What the release permits there.
        permitted: SourceElement,
    },
}

impl PrivacyVerdict {
    /// True for [`PrivacyVerdict::Satisfied`].
    pub fn is_satisfied(&self) -> bool {
        matches!(self, PrivacyVerdict::Satisfied)
    }
}

/// The first input (in label order) where `assembled` is not majorized by
/// `released`, as a verdict.
fn bounded_by(assembled: &Resource, released: &Resource) -> PrivacyVerdict {
    for (input, attained) in assembled.iter() {
        let permitted = released.at(input);
        if !is_majorized(attained, &permitted) {
            return PrivacyVerdict::Violated {
                input: input.clone(),
                attained: attained.clone(),
                permitted,
            };
        }
    }
    PrivacyVerdict::Satisfied
}

/// Checks that fusing a recipient's prior knowledge with a release, then
/// meeting the result with the owner's actual resource, stays within the
/// release at every input. Knowledge the owner does not hold cannot count
/// against the release.
pub fn local_privacy(prior: &Resource, released: &Resource, owner: &Resource) -> PrivacyVerdict {
    let combined = resource_fusion(&[prior.clone(), released.clone()]);
    let grounded = resource_meet(&[combined, owner.clone()]);
    bounded_by(&grounded, released)
}

/// Checks that fusing a recipient's prior knowledge with a release stays
/// within the release at every input, with no reference to what the owner
/// actually holds. Implies [`local_privacy`] against any owner resource.
pub fn strong_privacy(prior: &Resource, released: &Resource) -> PrivacyVerdict {
    let combined = resource_fusion(&[prior.clone(), released.clone()]);
    bounded_by(&combined, released)
}

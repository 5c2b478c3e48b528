//! Scenario documents: a TOML file (conventionally `.scn`) naming source
//! elements, resources, a subject network, shared machines, a protocol
//! script, and the checks to run against them.
//!
//! Weights are strings — `"p/q"` or a decimal literal — and are parsed as
//! exact rationals; TOML floats are rejected so no binary rounding can
//! sneak in. A handful of example scenarios ship inside the binary and can
//! be addressed by name wherever a path is expected.

use std::collections::BTreeMap;
use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use privnet_core::noninterference::SharedMachine;
use privnet_core::protocol::{Casting, ProtocolScript, ResourceNetwork, Step, StepSource, Subject};
use privnet_core::ratio::parse_ratio;
use privnet_core::resources::{PartialMap, Resource};
use privnet_core::weights::{Label, SourceElement};

/// Example scenarios compiled into the binary, addressable by bare name.
const BUNDLED: [(&str, &str); 10] = [
    ("table_2_3", include_str!("../fixtures/table_2_3.scn")),
    ("url", include_str!("../fixtures/url.scn")),
    ("bsc", include_str!("../fixtures/bsc.scn")),
    ("tad", include_str!("../fixtures/tad.scn")),
    ("snet", include_str!("../fixtures/snet.scn")),
    ("sinf", include_str!("../fixtures/sinf.scn")),
    (
        "cross_sharing",
        include_str!("../fixtures/cross_sharing.scn"),
    ),
    ("elevator", include_str!("../fixtures/elevator.scn")),
    (
        "privacy_disjoint",
        include_str!("../fixtures/privacy_disjoint.scn"),
    ),
    ("privacy_leak", include_str!("../fixtures/privacy_leak.scn")),
];

/// The scenario used when none is named.
pub const DEFAULT_SCENARIO: &str = "table_2_3";

/// A parsed scenario file. Sections may be omitted; all cross-references
/// are resolved lazily by the accessors below.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    /// Named source elements: label → weight string.
    #[serde(default)]
    pub sources: BTreeMap<String, BTreeMap<String, String>>,
    /// Named resources: input label → output label → weight string.
    #[serde(default)]
    pub resources: BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>>,
    /// The subject network, if any.
    #[serde(default)]
    pub network: Option<NetworkSection>,
    /// Named shared machines.
    #[serde(default)]
    pub machines: BTreeMap<String, MachineSection>,
    /// The protocol script, if any.
    #[serde(default)]
    pub script: Option<ScriptSection>,
    /// Checks this scenario declares.
    #[serde(default)]
    pub checks: Vec<CheckSection>,
}

/// Subjects with optional base resources and castings.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    #[serde(default)]
    pub subjects: BTreeMap<String, SubjectSection>,
}

/// One subject: a reference into `resources` and an optional casting.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubjectSection {
    #[serde(default)]
    pub resource: Option<String>,
    #[serde(default)]
    pub casting: Option<CastingSection>,
}

/// A casting given as explicit label pair lists.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CastingSection {
    pub embed: BTreeMap<String, String>,
    pub project: BTreeMap<String, String>,
}

/// A shared machine: states, action ownership, total transition table, and
/// per-observer outputs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineSection {
    pub states: Vec<String>,
    pub initial: String,
    pub actions: BTreeMap<String, String>,
    pub transitions: BTreeMap<String, BTreeMap<String, String>>,
    pub observations: BTreeMap<String, BTreeMap<String, String>>,
}

/// The protocol script as a list of steps.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptSection {
    #[serde(default)]
    pub steps: Vec<StepSection>,
}

/// One scripted step; `kind` selects which of the optional fields apply.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSection {
    /// "rp", "compose", or "fuse".
    pub kind: String,
    pub tag: String,
    pub assign_to: String,
    #[serde(default)]
    pub provider: Option<String>,
    #[serde(default)]
    pub request: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub policy: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub source: Option<SourceRefSection>,
    #[serde(default)]
    pub requests: Option<Vec<BTreeMap<String, String>>>,
    #[serde(default)]
    pub policies: Option<Vec<BTreeMap<String, String>>>,
    #[serde(default)]
    pub sources: Option<Vec<SourceRefSection>>,
}

/// Where a step draws from: a subject's accumulated holdings or an earlier
/// step's grant, exactly one of the two.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceRefSection {
    #[serde(default)]
    pub subject: Option<String>,
    #[serde(default)]
    pub tag: Option<String>,
}

/// A named check; `kind` is "privacy" or "ni".
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    pub name: String,
    pub kind: String,
    /// "local" or "strong"; defaults to local when an owner is given.
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub prior: Option<String>,
    #[serde(default)]
    pub released: Option<String>,
    #[serde(default)]
    pub owner: Option<String>,
    #[serde(default)]
    pub machine: Option<String>,
    #[serde(default)]
    pub observer: Option<String>,
    #[serde(default)]
    pub secret: Option<String>,
    #[serde(default)]
    pub max_len: Option<usize>,
}

/// Loads a scenario by bundled name or path; `None` loads the default.
/// Returns the display name alongside the document.
pub fn load(argument: Option<&str>) -> Result<(String, ScenarioDocument)> {
    let name = argument.unwrap_or(DEFAULT_SCENARIO);
    let stripped = name.strip_suffix(".scn").unwrap_or(name);
    let text = if let Some((_, body)) = BUNDLED.iter().find(|(n, _)| *n == stripped) {
        (*body).to_string()
    } else {
        fs::read_to_string(name).with_context(|| format!("cannot read scenario {name}"))?
    };
    let document: ScenarioDocument =
        toml::from_str(&text).with_context(|| format!("cannot parse scenario {name}"))?;
    Ok((stripped.to_string(), document))
}

fn parse_element(name: &str, weights: &BTreeMap<String, String>) -> Result<SourceElement> {
    let entries = weights
        .iter()
        .map(|(label, text)| {
            let weight =
                parse_ratio(text).with_context(|| format!("weight of {label} in source {name}"))?;
            Ok((Label::new(label.clone()), weight))
        })
        .collect::<Result<Vec<_>>>()?;
    SourceElement::new(entries).with_context(|| format!("source {name}"))
}

fn pairs_to_map(pairs: &BTreeMap<String, String>) -> Result<PartialMap> {
    PartialMap::new(
        pairs
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect::<Vec<_>>(),
    )
    .map_err(Into::into)
}

impl ScenarioDocument {
    /// The source element registered under `name`.
    pub fn source(&self, name: &str) -> Result<SourceElement> {
        let weights = self
            .sources
            .get(name)
            .ok_or_else(|| anyhow!("unresolved reference: source {name}"))?;
        parse_element(name, weights)
    }

    /// The named sources, or every source in name order when `names` is
    /// empty. Returns (name, element) pairs in the requested order.
    pub fn source_set(&self, names: &[String]) -> Result<Vec<(String, SourceElement)>> {
        if names.is_empty() {
            return self
                .sources
                .keys()
                .map(|n| Ok((n.clone(), self.source(n)?)))
                .collect();
        }
        names
            .iter()
            .map(|n| Ok((n.clone(), self.source(n)?)))
            .collect()
    }

    /// The resource registered under `name`.
    pub fn resource(&self, name: &str) -> Result<Resource> {
        let table = self
            .resources
            .get(name)
            .ok_or_else(|| anyhow!("unresolved reference: resource {name}"))?;
        let entries = table
            .iter()
            .map(|(input, outputs)| {
                Ok((
                    Label::new(input.clone()),
                    parse_element(&format!("{name}.{input}"), outputs)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Resource::new(entries).with_context(|| format!("resource {name}"))
    }

    /// Builds the declared subject network.
    pub fn network(&self) -> Result<ResourceNetwork> {
        let section = self
            .network
            .as_ref()
            .ok_or_else(|| anyhow!("the scenario declares no network"))?;
        let mut network = ResourceNetwork::new();
        for (name, subject) in &section.subjects {
            let base = match &subject.resource {
                Some(reference) => self.resource(reference)?,
                None => Resource::empty(),
            };
            network
                .add_subject(name.clone(), base)
                .with_context(|| format!("subject {name}"))?;
        }
        for (name, subject) in &section.subjects {
            if let Some(casting) = &subject.casting {
                let casting = Casting::new(
                    pairs_to_map(&casting.embed)?,
                    pairs_to_map(&casting.project)?,
                )
                .with_context(|| format!("casting of subject {name}"))?;
                network.set_casting(&Subject::new(name.clone()), casting)?;
            }
        }
        Ok(network)
    }

    /// Builds the declared protocol script.
    pub fn script(&self) -> Result<ProtocolScript> {
        let section = self
            .script
            .as_ref()
            .ok_or_else(|| anyhow!("the scenario declares no script"))?;
        let steps = section
            .steps
            .iter()
            .enumerate()
            .map(|(index, step)| {
                step.to_step()
                    .with_context(|| format!("script step {index} ({})", step.tag))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProtocolScript::new(steps))
    }

    /// Builds the machine registered under `name`.
    pub fn machine(&self, name: &str) -> Result<SharedMachine> {
        let section = self
            .machines
            .get(name)
            .ok_or_else(|| anyhow!("unresolved reference: machine {name}"))?;
        let states: Vec<Label> = section.states.iter().map(Label::new).collect();
        let owners = section
            .actions
            .iter()
            .map(|(action, owner)| (Label::new(action.clone()), Subject::new(owner.clone())))
            .collect();
        let transitions = section
            .transitions
            .iter()
            .flat_map(|(from, row)| {
                row.iter().map(move |(action, to)| {
                    (
                        Label::new(from.clone()),
                        Label::new(action.clone()),
                        Label::new(to.clone()),
                    )
                })
            })
            .collect();
        let observations = section
            .observations
            .iter()
            .flat_map(|(observer, row)| {
                row.iter().map(move |(state, output)| {
                    (
                        Subject::new(observer.clone()),
                        Label::new(state.clone()),
                        Label::new(output.clone()),
                    )
                })
            })
            .collect();
        SharedMachine::new(
            states,
            Label::new(section.initial.clone()),
            owners,
            transitions,
            observations,
        )
        .with_context(|| format!("machine {name}"))
    }

    /// The checks of the given kind, optionally narrowed to one name.
    pub fn checks_of(&self, kind: &str, only: Option<&str>) -> Result<Vec<&CheckSection>> {
        let selected: Vec<&CheckSection> = self
            .checks
            .iter()
            .filter(|c| c.kind == kind && only.is_none_or(|name| c.name == name))
            .collect();
        if let Some(name) = only {
            if selected.is_empty() {
                bail!("unresolved reference: no {kind} check named {name}");
            }
        }
        Ok(selected)
    }
}

impl SourceRefSection {
    fn to_source(&self) -> Result<StepSource> {
        match (&self.subject, &self.tag) {
            (Some(subject), None) => Ok(StepSource::Subject(Subject::new(subject.clone()))),
            (None, Some(tag)) => Ok(StepSource::Tagged(tag.clone())),
            _ => bail!("a step source names exactly one of subject or tag"),
        }
    }
}

impl StepSection {
    fn to_step(&self) -> Result<Step> {
        let assign_to = Subject::new(self.assign_to.clone());
        match self.kind.as_str() {
            "rp" => Ok(Step::Rp {
                provider: Subject::new(
                    self.provider
                        .clone()
                        .ok_or_else(|| anyhow!("rp steps need a provider"))?,
                ),
                request: pairs_to_map(
                    self.request
                        .as_ref()
                        .ok_or_else(|| anyhow!("rp steps need a request"))?,
                )?,
                policy: pairs_to_map(
                    self.policy
                        .as_ref()
                        .ok_or_else(|| anyhow!("rp steps need a policy"))?,
                )?,
                assign_to,
                tag: self.tag.clone(),
            }),
            "compose" => Ok(Step::Compose {
                source: self
                    .source
                    .as_ref()
                    .ok_or_else(|| anyhow!("compose steps need a source"))?
                    .to_source()?,
                requests: self
                    .requests
                    .as_ref()
                    .ok_or_else(|| anyhow!("compose steps need requests"))?
                    .iter()
                    .map(pairs_to_map)
                    .collect::<Result<Vec<_>>>()?,
                policies: self
                    .policies
                    .as_ref()
                    .ok_or_else(|| anyhow!("compose steps need policies"))?
                    .iter()
                    .map(pairs_to_map)
                    .collect::<Result<Vec<_>>>()?,
                assign_to,
                tag: self.tag.clone(),
            }),
            "fuse" => Ok(Step::Fuse {
                sources: self
                    .sources
                    .as_ref()
                    .ok_or_else(|| anyhow!("fuse steps need sources"))?
                    .iter()
                    .map(SourceRefSection::to_source)
                    .collect::<Result<Vec<_>>>()?,
                assign_to,
                tag: self.tag.clone(),
            }),
            other => bail!("unknown step kind {other:?}"),
        }
    }
}

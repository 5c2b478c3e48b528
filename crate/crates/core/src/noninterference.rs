//! Noninterference for shared deterministic machines and for deterministic
//! resources.
//!
//! A [`SharedMachine`] is a finite deterministic automaton whose actions are
//! partitioned among subjects and whose states carry per-subject
//! observations. Subject `B` does not interfere with observer `A` when any
//! two action strings that agree after erasing `B`'s actions leave `A`
//! observing the same thing. Two deciders are provided:
//!
//! * [`ni_bruteforce`] — enumerates every string up to a length bound and
//!   groups by erased string. Exhaustive but exponential; its verdict is
//!   provably stable once the bound reaches `states² − 1`, because any
//!   distinguishable pair of states in the synchronized pair graph is
//!   reachable within that many moves.
//! * [`ni_product`] — searches the pair graph directly: both sides step
//!   together on a non-`B` action, and either side alone steps on a `B`
//!   action. A breadth-first search either exhausts all reachable pairs
//!   (pass) or returns a shortest witness pair of strings (fail).
//!
//! For deterministic resources, [`deterministic_ni_forms`] evaluates three
//! formulations of "the resource ignores hidden input detail" against an
//! input casting and an output casting: factoring through the induced input
//! collapse, the two-sided equations, and the single closed equation. The
//! last two always agree (casting-induced collapses are idempotent); the
//! factoring form is strictly weaker in general and coincides with the
//! others when the output collapse is the identity and the input collapse
//! is total.

use std::collections::{BTreeMap, VecDeque};

use num_traits::One;

use crate::error::Error;
use crate::protocol::{Casting, Subject};
use crate::resources::{apply_policy, apply_request, Resource};
use crate::weights::Label;

/// A finite deterministic machine shared between subjects: every action is
/// owned by exactly one subject, transitions are total, and each subject
/// observes a label at every state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedMachine {
    states: Vec<Label>,
    initial: usize,
    actions: Vec<Label>,
    owners: Vec<Subject>,
    /// `transitions[state][action] = next state`.
    transitions: Vec<Vec<usize>>,
    /// Per observer, one output label per state.
    observations: BTreeMap<Subject, Vec<Label>>,
}

impl SharedMachine {
    /// Validates and builds a machine.
    ///
    /// `owners` assigns each action to its subject (an action may appear
    /// once). `transitions` lists `(from, action, to)` triples and must
    /// cover every state–action pair exactly once. `observations` lists
    /// `(observer, state, output)` triples and must cover every state for
    /// each observer mentioned.
    pub fn new(
        states: Vec<Label>,
        initial: Label,
        owners: Vec<(Label, Subject)>,
        transitions: Vec<(Label, Label, Label)>,
        observations: Vec<(Subject, Label, Label)>,
    ) -> Result<Self, Error> {
        let mut state_index: BTreeMap<Label, usize> = BTreeMap::new();
        for (i, state) in states.iter().enumerate() {
            if state_index.insert(state.clone(), i).is_some() {
                return Err(Error::DuplicateLabel {
                    label: state.to_string(),
                });
            }
        }
        let initial = *state_index
            .get(&initial)
            .ok_or_else(|| Error::invariant(format!("initial state {initial} is not a state")))?;
        let mut actions = Vec::new();
        let mut action_owners = Vec::new();
        let mut action_index: BTreeMap<Label, usize> = BTreeMap::new();
        for (action, owner) in owners {
            if action_index.insert(action.clone(), actions.len()).is_some() {
                return Err(Error::DuplicateLabel {
                    label: action.to_string(),
                });
            }
            actions.push(action);
            action_owners.push(owner);
        }
        let mut table = vec![vec![usize::MAX; actions.len()]; states.len()];
        for (from, action, to) in transitions {
            let from = *state_index
                .get(&from)
                .ok_or_else(|| Error::invariant(format!("unknown state {from}")))?;
            let action = *action_index
                .get(&action)
                .ok_or_else(|| Error::invariant(format!("unknown action {action}")))?;
            let to = *state_index
                .get(&to)
                .ok_or_else(|| Error::invariant(format!("unknown state {to}")))?;
            if table[from][action] != usize::MAX {
                return Err(Error::invariant(format!(
                    "transition from {} on {} given twice",
                    states[from], actions[action]
                )));
            }
            table[from][action] = to;
        }
        for (s, row) in table.iter().enumerate() {
            if let Some(a) = row.iter().position(|&t| t == usize::MAX) {
                return Err(Error::invariant(format!(
                    "missing transition from {} on {}",
                    states[s], actions[a]
                )));
            }
        }
        let mut obs: BTreeMap<Subject, Vec<Option<Label>>> = BTreeMap::new();
        for (observer, state, output) in observations {
            let state = *state_index
                .get(&state)
                .ok_or_else(|| Error::invariant(format!("unknown state {state}")))?;
            let row = obs
                .entry(observer.clone())
                .or_insert_with(|| vec![None; states.len()]);
            if row[state].replace(output).is_some() {
                return Err(Error::invariant(format!(
                    "observation of {observer} at {} given twice",
                    states[state]
                )));
            }
        }
        let mut observations = BTreeMap::new();
        for (observer, row) in obs {
            let complete: Option<Vec<Label>> = row.into_iter().collect();
            let complete = complete.ok_or_else(|| {
                Error::invariant(format!("observer {observer} misses some state"))
            })?;
            observations.insert(observer, complete);
        }
        Ok(SharedMachine {
            states,
            initial,
            actions,
            owners: action_owners,
            transitions: table,
            observations,
        })
    }

    /// Number of states.
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// All actions in declaration order.
    pub fn actions(&self) -> &[Label] {
        &self.actions
    }

    /// The owner of `action`.
    pub fn owner(&self, action: &Label) -> Option<&Subject> {
        self.actions
            .iter()
            .position(|a| a == action)
            .map(|i| &self.owners[i])
    }

    /// Runs a string of actions from the initial state; fails on an action
    /// outside the alphabet.
    pub fn run(&self, string: &[Label]) -> Result<&Label, Error> {
        let mut state = self.initial;
        for action in string {
            let index = self
                .actions
                .iter()
                .position(|a| a == action)
                .ok_or_else(|| Error::invariant(format!("unknown action {action}")))?;
            state = self.transitions[state][index];
        }
        Ok(&self.states[state])
    }

    /// What `observer` sees after running `string` from the initial state.
    pub fn observe(&self, observer: &Subject, string: &[Label]) -> Result<Label, Error> {
        let final_state = self.run(string)?;
        let position = self
            .states
            .iter()
            .position(|s| s == final_state)
            .expect("run returns a machine state");
        let row = self
            .observations
            .get(observer)
            .ok_or_else(|| Error::UnknownSubject {
                subject: observer.to_string(),
            })?;
        Ok(row[position].clone())
    }

    /// `string` with every action owned by `subject` erased.
    pub fn erase(&self, subject: &Subject, string: &[Label]) -> Vec<Label> {
        string
            .iter()
            .filter(|action| self.owner(action) != Some(subject))
            .cloned()
            .collect()
    }
}

/// The verdict of a noninterference check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NiVerdict {
    /// Observations depend only on the erased string.
    Pass,
    /// Two strings with equal erasures yield different observations.
    Fail(NiWitness),
}

impl NiVerdict {
    /// True for [`NiVerdict::Pass`].
    pub fn is_pass(&self) -> bool {
        matches!(self, NiVerdict::Pass)
    }
}

/// A counterexample to noninterference: two action strings with equal
/// erasures but different observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiWitness {
    /// First string.
    pub left: Vec<Label>,
    /// Second string, erasing to the same string as the first.
    pub right: Vec<Label>,
    /// What the observer sees after the first string.
    pub left_observation: Label,
    /// What the observer sees after the second string.
    pub right_observation: Label,
}

/// Checks by exhaustion that `secret` does not interfere with `observer`:
/// every pair of strings of length at most `max_len` with equal erasures
/// must leave `observer` seeing the same label.
///
/// Strings are enumerated shortest first, then in action order, so the
/// returned witness is deterministic. The verdict is stable in `max_len`
/// once it reaches `state_count² − 1` (see [`ni_product`]).
pub fn ni_bruteforce(
    machine: &SharedMachine,
    observer: &Subject,
    secret: &Subject,
    max_len: usize,
) -> Result<NiVerdict, Error> {
    if !machine.observations.contains_key(observer) {
        return Err(Error::UnknownSubject {
            subject: observer.to_string(),
        });
    }
    let action_count = machine.actions.len();
    let obs_row = &machine.observations[observer];
    let secret_action: Vec<bool> = machine.owners.iter().map(|o| o == secret).collect();
    // For each erased string, the first full string reaching it and the
    // state it lands in.
    let mut groups: BTreeMap<Vec<usize>, (Vec<usize>, usize)> = BTreeMap::new();
    let mut check = |string: &[usize], erased: &[usize], state: usize| -> Option<NiWitness> {
        match groups.get(erased) {
            None => {
                groups.insert(erased.to_vec(), (string.to_vec(), state));
                None
            }
            Some((first, first_state)) => {
                if obs_row[*first_state] != obs_row[state] {
                    let name = |ix: &[usize]| -> Vec<Label> {
                        ix.iter().map(|&i| machine.actions[i].clone()).collect()
                    };
                    Some(NiWitness {
                        left: name(first),
                        right: name(string),
                        left_observation: obs_row[*first_state].clone(),
                        right_observation: obs_row[state].clone(),
                    })
                } else {
                    None
                }
            }
        }
    };
    // Depth-first over prefixes, shortest first per level: iterative
    // deepening keeps enumeration order length-major without storing all
    // strings.
    for length in 0..=max_len {
        let mut string = Vec::with_capacity(length);
        let mut erased = Vec::new();
        let mut states = vec![machine.initial];
        // Explicit stack of next-action counters.
        let mut next = vec![0usize];
        loop {
            if string.len() == length {
                if let Some(witness) = check(&string, &erased, *states.last().unwrap()) {
                    return Ok(NiVerdict::Fail(witness));
                }
            }
            if string.len() < length && next[string.len()] < action_count {
                let action = next[string.len()];
                next[string.len()] += 1;
                let state = machine.transitions[*states.last().unwrap()][action];
                string.push(action);
                if !secret_action[action] {
                    erased.push(action);
                }
                states.push(state);
                next.push(0);
            } else if let Some(action) = string.pop() {
                states.pop();
                next.pop();
                if !secret_action[action] {
                    erased.pop();
                }
            } else {
                break;
            }
        }
    }
    Ok(NiVerdict::Pass)
}

/// Decides noninterference exactly by searching the synchronized pair
/// graph: from a pair of states, both sides step together on any non-secret
/// action, and either side alone steps on a secret action. The machine
/// passes when no reachable pair observes differently; otherwise a shortest
/// witness is reconstructed from breadth-first parent pointers.
pub fn ni_product(
    machine: &SharedMachine,
    observer: &Subject,
    secret: &Subject,
) -> Result<NiVerdict, Error> {
    if !machine.observations.contains_key(observer) {
        return Err(Error::UnknownSubject {
            subject: observer.to_string(),
        });
    }
    let n = machine.state_count();
    let obs_row = &machine.observations[observer];
    let shared: Vec<usize> = (0..machine.actions.len())
        .filter(|&i| &machine.owners[i] != secret)
        .collect();
    let hidden: Vec<usize> = (0..machine.actions.len())
        .filter(|&i| &machine.owners[i] == secret)
        .collect();
    #[derive(Clone, Copy)]
    enum Move {
        Both(usize),
        Left(usize),
        Right(usize),
    }
    let start = machine.initial * n + machine.initial;
    let mut parent: Vec<Option<(usize, Move)>> = vec![None; n * n];
    let mut seen = vec![false; n * n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(pair) = queue.pop_front() {
        let (s, t) = (pair / n, pair % n);
        if obs_row[s] != obs_row[t] {
            // Walk the parents back to the start, splitting moves into the
            // two strings.
            let mut left = Vec::new();
            let mut right = Vec::new();
            let mut cursor = pair;
            while let Some((previous, step)) = parent[cursor] {
                match step {
                    Move::Both(a) => {
                        left.push(a);
                        right.push(a);
                    }
                    Move::Left(a) => left.push(a),
                    Move::Right(a) => right.push(a),
                }
                cursor = previous;
            }
            left.reverse();
            right.reverse();
            let name = |ix: Vec<usize>| -> Vec<Label> {
                ix.into_iter().map(|i| machine.actions[i].clone()).collect()
            };
            let (left, right) = (name(left), name(right));
            let witness = NiWitness {
                left_observation: machine.observe(observer, &left)?,
                right_observation: machine.observe(observer, &right)?,
                left,
                right,
            };
            debug_assert_eq!(witness.left_observation, obs_row[s].clone());
            debug_assert_eq!(witness.right_observation, obs_row[t].clone());
            debug_assert_eq!(
                machine.erase(secret, &witness.left),
                machine.erase(secret, &witness.right)
            );
            return Ok(NiVerdict::Fail(witness));
        }
        let push = |to: usize,
                    step: Move,
                    parent: &mut Vec<Option<(usize, Move)>>,
                    seen: &mut Vec<bool>,
                    queue: &mut VecDeque<usize>| {
            if !seen[to] {
                seen[to] = true;
                parent[to] = Some((pair, step));
                queue.push_back(to);
            }
        };
        for &a in &shared {
            let to = machine.transitions[s][a] * n + machine.transitions[t][a];
            push(to, Move::Both(a), &mut parent, &mut seen, &mut queue);
        }
        for &b in &hidden {
            let to = machine.transitions[s][b] * n + t;
            push(to, Move::Left(b), &mut parent, &mut seen, &mut queue);
            let to = s * n + machine.transitions[t][b];
            push(to, Move::Right(b), &mut parent, &mut seen, &mut queue);
        }
    }
    Ok(NiVerdict::Pass)
}

/// Which formulations of deterministic noninterference a resource
/// satisfies; see [`deterministic_ni_forms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NiForms {
    /// The resource factors through the input collapse: it is empty outside
    /// the collapse's domain and constant on its fibers.
    pub factored: bool,
    /// Two-sided equations: collapsing outputs leaves the resource fixed,
    /// and so does rewiring inputs through the collapse.
    pub equational: bool,
    /// One closed equation: rewiring inputs and collapsing outputs together
    /// leaves the resource fixed.
    pub closed: bool,
}

/// Evaluates three formulations of "the resource ignores hidden detail"
/// for a deterministic resource.
///
/// The collapses are induced by the castings: a casting's projection
/// followed by its embedding is an idempotent partial map on the network
/// namespace. `equational` and `closed` always agree for that reason. The
/// `factored` form puts no condition on outputs and is therefore weaker:
/// it can hold while the output collapse moves the resource's outputs.
/// When the output collapse is the identity on the resource's outputs and
/// the input collapse is total on its inputs, all three coincide.
///
/// Fails with [`Error::NotDeterministic`] unless every output of
/// `resource` is a unit mass on a single label.
pub fn deterministic_ni_forms(
    resource: &Resource,
    input_casting: &Casting,
    output_casting: &Casting,
) -> Result<NiForms, Error> {
    for (input, output) in resource.iter() {
        if output.support_size() != 1 || !output.total_weight().is_one() {
            return Err(Error::NotDeterministic {
                label: input.to_string(),
            });
        }
    }
    let input_collapse = input_casting.project().then(input_casting.embed());
    let output_collapse = output_casting.project().then(output_casting.embed());
    debug_assert_eq!(
        input_collapse.then(&input_collapse),
        input_collapse,
        "casting-induced collapses are idempotent"
    );
    let factored = resource.domain().all(|x| {
        input_collapse
            .apply(x)
            .is_some_and(|rep| resource.at(rep) == resource.at(x))
    }) && input_collapse
        .domain()
        .all(|x| resource.at(x) == resource.at(input_collapse.apply(x).expect("domain")));
    let equational = apply_policy(resource, &output_collapse) == *resource
        && apply_request(resource, &input_collapse) == *resource;
    let closed =
        apply_policy(&apply_request(resource, &input_collapse), &output_collapse) == *resource;
    debug_assert_eq!(equational, closed);
    Ok(NiForms {
        factored,
        equational,
        closed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::ratio;
    use crate::resources::PartialMap;
    use crate::weights::SourceElement;
    use proptest::prelude::*;

    fn labels(names: &[&str]) -> Vec<Label> {
        names.iter().map(|n| Label::new(*n)).collect()
    }

    /// Three floors; either resident can call the elevator to their floor,
    /// and anyone in the lobby sees where the car is.
    fn elevator() -> SharedMachine {
        SharedMachine::new(
            labels(&["f1", "f2", "f3"]),
            Label::new("f1"),
            vec![
                (Label::new("call_a3"), Subject::new("alice")),
                (Label::new("call_b2"), Subject::new("bob")),
            ],
            ["f1", "f2", "f3"]
                .iter()
                .flat_map(|floor| {
                    vec![
                        (Label::new(*floor), Label::new("call_a3"), Label::new("f3")),
                        (Label::new(*floor), Label::new("call_b2"), Label::new("f2")),
                    ]
                })
                .collect(),
            ["f1", "f2", "f3"]
                .iter()
                .map(|floor| {
                    (
                        Subject::new("alice"),
                        Label::new(*floor),
                        Label::new(*floor),
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    /// Bob's action toggles a latch that nobody observes.
    fn opaque_latch() -> SharedMachine {
        SharedMachine::new(
            labels(&["off", "on"]),
            Label::new("off"),
            vec![
                (Label::new("ping"), Subject::new("alice")),
                (Label::new("toggle"), Subject::new("bob")),
            ],
            vec![
                (Label::new("off"), Label::new("ping"), Label::new("off")),
                (Label::new("off"), Label::new("toggle"), Label::new("on")),
                (Label::new("on"), Label::new("ping"), Label::new("on")),
                (Label::new("on"), Label::new("toggle"), Label::new("off")),
            ],
            vec![
                (
                    Subject::new("alice"),
                    Label::new("off"),
                    Label::new("quiet"),
                ),
                (Subject::new("alice"), Label::new("on"), Label::new("quiet")),
            ],
        )
        .unwrap()
    }

    #[test]
    fn machine_validation_rejects_partial_tables() {
        let result = SharedMachine::new(
            labels(&["s"]),
            Label::new("s"),
            vec![(Label::new("a"), Subject::new("alice"))],
            vec![],
            vec![],
        );
        assert!(matches!(result, Err(Error::InvariantViolation { .. })));
    }

    #[test]
    fn elevator_leaks_bobs_call() {
        let machine = elevator();
        let verdict = ni_product(&machine, &Subject::new("alice"), &Subject::new("bob")).unwrap();
        let NiVerdict::Fail(witness) = verdict else {
            panic!("the elevator must fail noninterference");
        };
        assert!(witness.left.len().max(witness.right.len()) <= 2);
        assert_eq!(
            machine.erase(&Subject::new("bob"), &witness.left),
            machine.erase(&Subject::new("bob"), &witness.right)
        );
        assert_ne!(witness.left_observation, witness.right_observation);
        // Re-simulate both sides independently.
        assert_eq!(
            machine
                .observe(&Subject::new("alice"), &witness.left)
                .unwrap(),
            witness.left_observation
        );
        assert_eq!(
            machine
                .observe(&Subject::new("alice"), &witness.right)
                .unwrap(),
            witness.right_observation
        );
    }

    #[test]
    fn elevator_bruteforce_finds_the_empty_vs_call_pair() {
        let machine = elevator();
        let verdict =
            ni_bruteforce(&machine, &Subject::new("alice"), &Subject::new("bob"), 2).unwrap();
        let NiVerdict::Fail(witness) = verdict else {
            panic!("the elevator must fail noninterference");
        };
        assert_eq!(witness.left, Vec::<Label>::new());
        assert_eq!(witness.right, labels(&["call_b2"]));
        assert_eq!(witness.left_observation, Label::new("f1"));
        assert_eq!(witness.right_observation, Label::new("f2"));
    }

    #[test]
    fn unobserved_latch_passes_both_deciders() {
        let machine = opaque_latch();
        let alice = Subject::new("alice");
        let bob = Subject::new("bob");
        assert!(ni_product(&machine, &alice, &bob).unwrap().is_pass());
        let bound = machine.state_count() * machine.state_count() - 1;
        assert!(ni_bruteforce(&machine, &alice, &bob, bound)
            .unwrap()
            .is_pass());
    }

    #[test]
    fn deciders_agree_at_the_stability_bound() {
        for machine in [elevator(), opaque_latch()] {
            let alice = Subject::new("alice");
            let bob = Subject::new("bob");
            let bound = machine.state_count() * machine.state_count() - 1;
            let brute = ni_bruteforce(&machine, &alice, &bob, bound).unwrap();
            let product = ni_product(&machine, &alice, &bob).unwrap();
            assert_eq!(brute.is_pass(), product.is_pass());
        }
    }

    #[test]
    fn a_subject_owning_no_actions_never_interferes() {
        // Erasing carol's actions changes nothing, so equal-erasure pairs
        // are equal strings and the checks pass vacuously — even on the
        // leaky elevator.
        let machine = elevator();
        let alice = Subject::new("alice");
        let carol = Subject::new("carol");
        assert!(ni_product(&machine, &alice, &carol).unwrap().is_pass());
        let bound = machine.state_count() * machine.state_count() - 1;
        assert!(ni_bruteforce(&machine, &alice, &carol, bound)
            .unwrap()
            .is_pass());
    }

    fn identity_casting(names: &[&str]) -> Casting {
        let id = PartialMap::identity_on(names.iter().copied());
        Casting::new(id.clone(), id).unwrap()
    }

    fn unit(label: &str) -> SourceElement {
        SourceElement::new([(label, ratio(1, 1))]).unwrap()
    }

    #[test]
    fn factoring_is_weaker_than_the_equations() {
        // The output collapse sends everything to y0; the resource outputs
        // y1, so the equations fail, yet it factors through the identity
        // input collapse.
        let resource = Resource::new([("x", unit("y1"))]).unwrap();
        let inputs = identity_casting(&["x"]);
        let outputs = Casting::new(
            PartialMap::new([("l", "y0")]).unwrap(),
            PartialMap::new([("y0", "l"), ("y1", "l")]).unwrap(),
        )
        .unwrap();
        let forms = deterministic_ni_forms(&resource, &inputs, &outputs).unwrap();
        assert!(forms.factored);
        assert!(!forms.equational);
        assert!(!forms.closed);
    }

    #[test]
    fn all_forms_agree_under_identity_outputs_and_total_inputs() {
        // Input collapse sends x2 onto x1; outputs are untouched.
        let inputs = Casting::new(
            PartialMap::new([("l", "x1")]).unwrap(),
            PartialMap::new([("x1", "l"), ("x2", "l")]).unwrap(),
        )
        .unwrap();
        let outputs = identity_casting(&["y", "z"]);
        let constant = Resource::new([("x1", unit("y")), ("x2", unit("y"))]).unwrap();
        let forms = deterministic_ni_forms(&constant, &inputs, &outputs).unwrap();
        assert_eq!(
            forms,
            NiForms {
                factored: true,
                equational: true,
                closed: true
            }
        );
        let leaky = Resource::new([("x1", unit("y")), ("x2", unit("z"))]).unwrap();
        let forms = deterministic_ni_forms(&leaky, &inputs, &outputs).unwrap();
        assert_eq!(
            forms,
            NiForms {
                factored: false,
                equational: false,
                closed: false
            }
        );
    }

    #[test]
    fn non_deterministic_resources_are_rejected() {
        let resource =
            Resource::new([("x", SourceElement::new([("y", ratio(1, 2))]).unwrap())]).unwrap();
        let casting = identity_casting(&["x", "y"]);
        assert!(matches!(
            deterministic_ni_forms(&resource, &casting, &casting),
            Err(Error::NotDeterministic { .. })
        ));
    }

    /// A random two-subject machine over at most three states and four
    /// actions, described by index tables.
    fn arb_machine() -> impl Strategy<Value = SharedMachine> {
        (2usize..=3, 2usize..=4).prop_flat_map(|(states, actions)| {
            (
                proptest::collection::vec(0..states, states * actions),
                proptest::collection::vec(proptest::bool::ANY, actions),
                proptest::collection::vec(0..2usize, states),
            )
                .prop_map(move |(table, owner_flags, obs)| {
                    let state_names: Vec<Label> =
                        (0..states).map(|i| Label::new(format!("s{i}"))).collect();
                    let action_names: Vec<Label> =
                        (0..actions).map(|i| Label::new(format!("a{i}"))).collect();
                    let owners = action_names
                        .iter()
                        .zip(&owner_flags)
                        .map(|(a, hidden)| {
                            let subject = if *hidden { "bob" } else { "alice" };
                            (a.clone(), Subject::new(subject))
                        })
                        .collect();
                    let transitions = (0..states)
                        .flat_map(|s| {
                            let state_names = state_names.clone();
                            let action_names = action_names.clone();
                            let table = table.clone();
                            (0..actions).map(move |a| {
                                (
                                    state_names[s].clone(),
                                    action_names[a].clone(),
                                    state_names[table[s * actions + a]].clone(),
                                )
                            })
                        })
                        .collect();
                    let observations = (0..states)
                        .map(|s| {
                            (
                                Subject::new("alice"),
                                state_names[s].clone(),
                                Label::new(format!("o{}", obs[s])),
                            )
                        })
                        .collect();
                    SharedMachine::new(
                        state_names.clone(),
                        state_names[0].clone(),
                        owners,
                        transitions,
                        observations,
                    )
                    .unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn product_agrees_with_bruteforce(machine in arb_machine()) {
            let alice = Subject::new("alice");
            let bob = Subject::new("bob");
            let bound = machine.state_count() * machine.state_count() - 1;
            let brute = ni_bruteforce(&machine, &alice, &bob, bound).unwrap();
            let product = ni_product(&machine, &alice, &bob).unwrap();
            prop_assert_eq!(brute.is_pass(), product.is_pass());
            // A longer bound never changes the verdict.
            let longer = ni_bruteforce(&machine, &alice, &bob, bound + 2).unwrap();
            prop_assert_eq!(longer.is_pass(), brute.is_pass());
            if let NiVerdict::Fail(witness) = product {
                prop_assert_eq!(
                    machine.erase(&bob, &witness.left),
                    machine.erase(&bob, &witness.right)
                );
                prop_assert_eq!(
                    &machine.observe(&alice, &witness.left).unwrap(),
                    &witness.left_observation
                );
                prop_assert_eq!(
                    &machine.observe(&alice, &witness.right).unwrap(),
                    &witness.right_observation
                );
                prop_assert!(witness.left_observation != witness.right_observation);
                prop_assert!(witness.left.len() <= bound);
                prop_assert!(witness.right.len() <= bound);
            }
        }
    }
}

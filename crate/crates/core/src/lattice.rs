//! Consistency of preference sets and the fusion lattice.
//!
//! A set `B` of source elements induces a *strict preference* digraph on the
//! union of supports: `u → v` when some member weighs `u` strictly below `v`.
//! `B` is *consistent* when no member contradicts another's strict
//! preference — equivalently, when that digraph is acyclic, and equivalently
//! again when one enumeration orders every member at once
//! ([`common_ordering`]).
//!
//! Two partitions summarize a set:
//!
//! * [`consistency_classes`] — strongly connected components of the strict
//!   digraph. Singletons exactly when `B` is consistent; otherwise each class
//!   bundles labels caught in a preference cycle.
//! * [`merged_preference`] — components of the *weak* digraph (`u → v` when
//!   some member weighs `u` at most `v`). Its blocks are always totally
//!   ordered, and members unanimously weigh labels of a lower block strictly
//!   below labels of a higher one.
//!
//! [`impose_consistency`] flattens each member to the minimum of its weights
//! over every consistency class, which always yields a consistent set.
//! [`fusion`] is the join of those flattened members over their common
//! ordering; [`meet`] is the corresponding greatest lower bound. On the
//! label-free level, [`meet_sorted`] takes the pointwise minimum of prefix
//! sums, while [`join_sorted`] takes the least concave majorant of the
//! pointwise maximum — the raw maximum of prefix sums need not have
//! nonincreasing differences, so the join passes through an exact upper
//! convex hull before differencing.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::Error;
use crate::ratio::Ratio;
use crate::weights::{differential, DescendingSequence, Label, Ordering, SourceElement};

/// The union of supports, in label order.
fn universe(set: &[SourceElement]) -> Vec<Label> {
    let mut labels = BTreeSet::new();
    for element in set {
        labels.extend(element.support().cloned());
    }
    labels.into_iter().collect()
}

/// Edges of the strict preference digraph as index pairs into `universe`:
/// `u → v` when some member weighs `u` strictly below `v`.
fn strict_edges(set: &[SourceElement], universe: &[Label]) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for u in 0..universe.len() {
        for v in 0..universe.len() {
            if u != v
                && set
                    .iter()
                    .any(|e| e.weight(&universe[u]) < e.weight(&universe[v]))
            {
                edges.insert((u, v));
            }
        }
    }
    edges
}

/// Edges of the weak preference digraph: `u → v` when some member weighs `u`
/// at most `v`.
fn weak_edges(set: &[SourceElement], universe: &[Label]) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for u in 0..universe.len() {
        for v in 0..universe.len() {
            if u != v
                && set
                    .iter()
                    .any(|e| e.weight(&universe[u]) <= e.weight(&universe[v]))
            {
                edges.insert((u, v));
            }
        }
    }
    edges
}

/// Strongly connected components of the digraph on `universe` with the given
/// edges, as blocks of labels listed from least preferred to most.
///
/// Blocks are ordered by a topological sort of the component condensation
/// (sources — blocks nothing points into — first); incomparable blocks are
/// broken by their smallest label. Labels inside a block are sorted.
fn component_blocks(universe: &[Label], edges: &BTreeSet<(usize, usize)>) -> Vec<Vec<Label>> {
    if universe.is_empty() {
        return Vec::new();
    }
    let mut graph = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..universe.len()).map(|i| graph.add_node(i)).collect();
    for &(u, v) in edges {
        graph.add_edge(nodes[u], nodes[v], ());
    }
    let components = tarjan_scc(&graph);
    let mut block_of = vec![0usize; universe.len()];
    for (b, component) in components.iter().enumerate() {
        for &node in component {
            block_of[graph[node]] = b;
        }
    }
    // Condensation edges and in-degrees.
    let blocks = components.len();
    let mut successors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); blocks];
    let mut in_degree = vec![0usize; blocks];
    for &(u, v) in edges {
        let (bu, bv) = (block_of[u], block_of[v]);
        if bu != bv && successors[bu].insert(bv) {
            in_degree[bv] += 1;
        }
    }
    let mut members: Vec<Vec<Label>> = vec![Vec::new(); blocks];
    for (i, label) in universe.iter().enumerate() {
        members[block_of[i]].push(label.clone());
    }
    // Kahn's algorithm, least blocks first, ties by smallest member label.
    let mut ready: BTreeSet<(Label, usize)> = (0..blocks)
        .filter(|&b| in_degree[b] == 0)
        .map(|b| (members[b][0].clone(), b))
        .collect();
    let mut ordered = Vec::with_capacity(blocks);
    while let Some((_, b)) = ready.pop_first() {
        ordered.push(members[b].clone());
        for &next in &successors[b] {
            in_degree[next] -= 1;
            if in_degree[next] == 0 {
                ready.insert((members[next][0].clone(), next));
            }
        }
    }
    debug_assert_eq!(ordered.len(), blocks, "condensation is acyclic");
    ordered
}

/// True when no member contradicts another's strict preference: whenever
/// some member weighs `u` strictly below `v`, every member weighs `u` at
/// most `v`.
pub fn is_consistent(set: &[SourceElement]) -> bool {
    let universe = universe(set);
    for u in &universe {
        for v in &universe {
            if set.iter().any(|e| e.weight(u) < e.weight(v))
                && set.iter().any(|e| e.weight(u) > e.weight(v))
            {
                return false;
            }
        }
    }
    true
}

/// A witness that `set` is inconsistent: labels forming a strict preference
/// cycle, with the first label repeated at the end. `None` when consistent.
///
/// The search walks *covering* edges — pairs from consecutive indifference
/// classes of a single member — which reach exactly as far as strict edges
/// do. The cycle returned is the shortest through the smallest cycling
/// label, lexicographically least among those.
pub fn find_preference_cycle(set: &[SourceElement]) -> Option<Vec<Label>> {
    let universe = universe(set);
    let index: BTreeMap<&Label, usize> = universe.iter().zip(0..).collect();
    // Covering edges: consecutive classes of each member's chain over the
    // whole universe (zero-weight labels form the lowest class).
    let mut successors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); universe.len()];
    for element in set {
        let mut chain = element.preference_chain();
        let zeros: Vec<Label> = universe
            .iter()
            .filter(|l| element.weight(l).is_zero())
            .cloned()
            .collect();
        if !zeros.is_empty() {
            chain.insert(0, zeros);
        }
        for pair in chain.windows(2) {
            for lower in &pair[0] {
                for upper in &pair[1] {
                    successors[index[lower]].insert(index[upper]);
                }
            }
        }
    }
    for start in 0..universe.len() {
        // Lexicographically-least shortest paths from `start`: breadth-first
        // with sorted adjacency and first-visit parents.
        let mut parent: Vec<Option<usize>> = vec![None; universe.len()];
        let mut distance: Vec<Option<usize>> = vec![None; universe.len()];
        let mut queue = std::collections::VecDeque::from([start]);
        distance[start] = Some(0);
        while let Some(u) = queue.pop_front() {
            for &v in &successors[u] {
                if distance[v].is_none() {
                    distance[v] = Some(distance[u].unwrap() + 1);
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        let path_to = |mut v: usize| {
            let mut path = vec![universe[v].clone()];
            while let Some(p) = parent[v] {
                path.push(universe[p].clone());
                v = p;
            }
            path.reverse();
            path
        };
        let best = (0..universe.len())
            .filter(|&u| successors[u].contains(&start) && distance[u].is_some())
            .map(|u| (distance[u].unwrap(), path_to(u)))
            .min();
        if let Some((_, mut path)) = best {
            path.push(universe[start].clone());
            return Some(path);
        }
    }
    None
}

/// The consistency classes of `set`: strongly connected components of the
/// strict preference digraph, least preferred block first. Every block is a
/// singleton exactly when `set` is consistent.
pub fn consistency_classes(set: &[SourceElement]) -> Vec<Vec<Label>> {
    let universe = universe(set);
    let edges = strict_edges(set, &universe);
    component_blocks(&universe, &edges)
}

/// The merged preference of `set`: blocks of the weak preference digraph,
/// least preferred first. The blocks are always totally ordered, and every
/// member weighs each label of a block strictly below each label of any
/// later block.
pub fn merged_preference(set: &[SourceElement]) -> Vec<Vec<Label>> {
    let universe = universe(set);
    let edges = weak_edges(set, &universe);
    let blocks = component_blocks(&universe, &edges);
    debug_assert!(blocks.windows(2).all(|pair| {
        set.iter().all(|e| {
            pair[0]
                .iter()
                .all(|u| pair[1].iter().all(|v| e.weight(u) < e.weight(v)))
        })
    }));
    blocks
}

/// An enumeration ordering every member of `set` at once, from the most
/// preferred label down. Fails with a preference cycle when `set` is
/// inconsistent.
///
/// Labels are emitted maximal-first: repeatedly take the label nothing
/// remaining is preferred to, breaking ties by label order. Ties only arise
/// between labels every member weighs equally, so the tie-break never
/// disturbs descent.
pub fn common_ordering(set: &[SourceElement]) -> Result<Ordering, Error> {
    let universe = universe(set);
    let edges = strict_edges(set, &universe);
    // Kahn's algorithm on reversed edges: a label is ready when nothing
    // still unplaced sits strictly above it.
    let mut above: Vec<usize> = vec![0; universe.len()];
    let mut below: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); universe.len()];
    for &(u, v) in &edges {
        above[u] += 1;
        below[v].insert(u);
    }
    let mut ready: BTreeSet<usize> = (0..universe.len()).filter(|&u| above[u] == 0).collect();
    let mut labels = Vec::with_capacity(universe.len());
    while let Some(&v) = ready.iter().next() {
        ready.remove(&v);
        labels.push(universe[v].clone());
        for &u in &below[v] {
            above[u] -= 1;
            if above[u] == 0 {
                ready.insert(u);
            }
        }
    }
    if labels.len() < universe.len() {
        let cycle = find_preference_cycle(set).expect("leftover labels lie on a cycle");
        let shown: Vec<String> = cycle.iter().map(|l| l.to_string()).collect();
        return Err(Error::NotCommonOrdering {
            detail: format!("preference cycle {}", shown.join("◁")),
        });
    }
    let ordering = Ordering::new(labels)?;
    debug_assert!(set.iter().all(|e| ordering.orders(e)));
    Ok(ordering)
}

/// Flattens every member of `set` to the minimum of its weights over each
/// consistency class. The result is always consistent, each flattened
/// member is majorized by its original, and consistent sets pass through
/// unchanged.
pub fn impose_consistency(set: &[SourceElement]) -> Vec<SourceElement> {
    let classes = consistency_classes(set);
    set.iter()
        .map(|element| {
            let mut entries = Vec::new();
            for class in &classes {
                let minimum = class
                    .iter()
                    .map(|l| element.weight(l))
                    .min()
                    .expect("classes are nonempty");
                for label in class {
                    entries.push((label.clone(), minimum.clone()));
                }
            }
            SourceElement::new(entries).expect("flattening never raises total weight")
        })
        .collect()
}

/// Pads the sequences to a common length and returns their prefix-sum
/// columns: `columns[k]` holds every sequence's integral at position `k`.
fn integral_columns(sequences: &[DescendingSequence]) -> Vec<Vec<Ratio>> {
    let n = sequences.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut columns = vec![Vec::with_capacity(sequences.len()); n];
    for sequence in sequences {
        let mut total = Ratio::zero();
        for (k, column) in columns.iter_mut().enumerate() {
            total += sequence.get(k);
            column.push(total.clone());
        }
    }
    columns
}

/// The greatest lower bound of label-free shapes: the pointwise minimum of
/// prefix sums, differenced back into a sequence. Any sequence majorized by
/// all of `sequences` is majorized by the result.
pub fn meet_sorted(sequences: &[DescendingSequence]) -> DescendingSequence {
    let floor: Vec<Ratio> = integral_columns(sequences)
        .into_iter()
        .map(|column| column.into_iter().min().expect("at least one sequence"))
        .collect();
    DescendingSequence::new(differential(&floor))
        .expect("minimum of concave prefix sums is concave")
}

/// The least upper bound of label-free shapes: the least concave majorant
/// of the pointwise maximum of prefix sums, differenced back into a
/// sequence. The raw maximum can fail to have nonincreasing differences, so
/// it is first lifted to its upper convex hull (anchored at zero one step
/// before the sequence), computed exactly.
pub fn join_sorted(sequences: &[DescendingSequence]) -> DescendingSequence {
    let ceiling: Vec<Ratio> = integral_columns(sequences)
        .into_iter()
        .map(|column| column.into_iter().max().expect("at least one sequence"))
        .collect();
    if ceiling.is_empty() {
        return DescendingSequence::empty();
    }
    // Upper convex hull of (−1, 0), (0, c₀), …, (n−1, cₙ₋₁) by monotone
    // chain; popping on collinear points keeps only hull vertices.
    let mut hull: Vec<(i64, Ratio)> = vec![(-1, Ratio::zero())];
    for (k, y) in ceiling.iter().enumerate() {
        let point = (k as i64, y.clone());
        while hull.len() >= 2 {
            let (ax, ay) = &hull[hull.len() - 2];
            let (bx, by) = &hull[hull.len() - 1];
            // Right turns only: pop `b` when it lies on or below chord a–c.
            let cross = Ratio::from_integer((bx - ax).into()) * (&point.1 - ay)
                - (by - ay) * Ratio::from_integer((point.0 - ax).into());
            if cross >= Ratio::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(point);
    }
    // Evaluate the hull at every integer position and difference it.
    let mut majorant = Vec::with_capacity(ceiling.len());
    let mut segment = 0;
    for k in 0..ceiling.len() as i64 {
        while hull[segment + 1].0 < k {
            segment += 1;
        }
        let (ax, ay) = &hull[segment];
        let (bx, by) = &hull[segment + 1];
        let t = Ratio::from_integer((k - ax).into()) / Ratio::from_integer((bx - ax).into());
        majorant.push(ay + (by - ay) * t);
    }
    DescendingSequence::new(differential(&majorant))
        .expect("a concave majorant has descending differences")
}

/// [`join_sorted`] carried out over labels: reads every member along
/// `ordering`, joins the shapes, and reattaches the result. Fails unless
/// `ordering` orders every member.
pub fn join_ordered(set: &[SourceElement], ordering: &Ordering) -> Result<SourceElement, Error> {
    let sequences = read_all(set, ordering)?;
    if sequences.is_empty() {
        return Ok(SourceElement::empty());
    }
    ordering.unapply(&pad_to(join_sorted(&sequences), ordering.len()))
}

/// [`meet_sorted`] carried out over labels: reads every member along
/// `ordering`, meets the shapes, and reattaches the result. Fails unless
/// `ordering` orders every member.
pub fn meet_ordered(set: &[SourceElement], ordering: &Ordering) -> Result<SourceElement, Error> {
    let sequences = read_all(set, ordering)?;
    if sequences.is_empty() {
        return Ok(SourceElement::empty());
    }
    ordering.unapply(&pad_to(meet_sorted(&sequences), ordering.len()))
}

fn read_all(set: &[SourceElement], ordering: &Ordering) -> Result<Vec<DescendingSequence>, Error> {
    set.iter()
        .map(|element| {
            ordering
                .apply(element)
                .map_err(|_| Error::NotCommonOrdering {
                    detail: "the enumeration does not order every member".into(),
                })
        })
        .collect()
}

fn pad_to(sequence: DescendingSequence, len: usize) -> DescendingSequence {
    let mut values = sequence.values().to_vec();
    values.resize(len.max(values.len()), Ratio::zero());
    DescendingSequence::new(values).expect("padding preserves descent")
}

/// The fusion of a set: members are flattened into consistency
/// ([`impose_consistency`]) and joined over their common ordering. Fusing a
/// consistent set joins the members themselves; fusing a singleton returns
/// it unchanged.
pub fn fusion(set: &[SourceElement]) -> SourceElement {
    if set.is_empty() {
        return SourceElement::empty();
    }
    let flattened = impose_consistency(set);
    let ordering = common_ordering(&flattened).expect("flattened sets are consistent");
    join_ordered(&flattened, &ordering).expect("the common ordering orders every member")
}

/// The meet of a set: members are flattened into consistency and met over
/// their common ordering. For a consistent set this is the greatest lower
/// bound of the members themselves.
pub fn meet(set: &[SourceElement]) -> SourceElement {
    if set.is_empty() {
        return SourceElement::empty();
    }
    let flattened = impose_consistency(set);
    let ordering = common_ordering(&flattened).expect("flattened sets are consistent");
    meet_ordered(&flattened, &ordering).expect("the common ordering orders every member")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorization::is_majorized;
    use crate::ratio::ratio;
    use crate::weights::tests::arb_source;
    use petgraph::algo::is_cyclic_directed;
    use proptest::prelude::*;

    fn element(pairs: &[(&str, (i64, i64))]) -> SourceElement {
        SourceElement::new(
            pairs
                .iter()
                .map(|(l, (p, q))| (*l, ratio(*p, *q)))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    fn table_beta() -> SourceElement {
        element(&[
            ("w", (1, 10)),
            ("x", (2, 10)),
            ("y", (2, 10)),
            ("z", (3, 10)),
        ])
    }

    fn table_gamma() -> SourceElement {
        element(&[
            ("w", (1, 10)),
            ("x", (1, 10)),
            ("y", (3, 10)),
            ("z", (5, 10)),
        ])
    }

    fn table_delta() -> SourceElement {
        element(&[
            ("w", (6, 10)),
            ("x", (1, 10)),
            ("y", (1, 10)),
            ("z", (2, 10)),
        ])
    }

    fn labels(names: &[&str]) -> Vec<Label> {
        names.iter().map(|n| Label::new(*n)).collect()
    }

    #[test]
    fn table_pair_is_consistent_with_singleton_classes() {
        let set = [table_beta(), table_gamma()];
        assert!(is_consistent(&set));
        assert_eq!(find_preference_cycle(&set), None);
        assert_eq!(
            consistency_classes(&set),
            vec![
                labels(&["w"]),
                labels(&["x"]),
                labels(&["y"]),
                labels(&["z"])
            ]
        );
    }

    #[test]
    fn table_pair_merges_into_two_blocks() {
        let set = [table_beta(), table_gamma()];
        assert_eq!(
            merged_preference(&set),
            vec![labels(&["w", "x", "y"]), labels(&["z"])]
        );
    }

    #[test]
    fn table_triple_is_inconsistent_with_one_class() {
        let set = [table_beta(), table_gamma(), table_delta()];
        assert!(!is_consistent(&set));
        assert_eq!(
            consistency_classes(&set),
            vec![labels(&["w", "x", "y", "z"])]
        );
        assert_eq!(merged_preference(&set), vec![labels(&["w", "x", "y", "z"])]);
    }

    #[test]
    fn table_triple_cycle_is_w_x_z() {
        let set = [table_beta(), table_gamma(), table_delta()];
        assert_eq!(
            find_preference_cycle(&set),
            Some(labels(&["w", "x", "z", "w"]))
        );
    }

    #[test]
    fn common_ordering_of_table_pair_descends_from_z() {
        let set = [table_beta(), table_gamma()];
        let ordering = common_ordering(&set).unwrap();
        assert_eq!(ordering.labels(), labels(&["z", "y", "x", "w"]).as_slice());
        assert!(ordering.orders(&set[0]));
        assert!(ordering.orders(&set[1]));
    }

    #[test]
    fn common_ordering_reports_the_cycle() {
        let set = [table_beta(), table_gamma(), table_delta()];
        match common_ordering(&set) {
            Err(Error::NotCommonOrdering { detail }) => {
                assert_eq!(detail, "preference cycle w◁x◁z◁w");
            }
            other => panic!("expected a cycle report, got {other:?}"),
        }
    }

    #[test]
    fn hats_of_the_table_triple_are_uniform() {
        let set = [table_beta(), table_gamma(), table_delta()];
        let uniform = element(&[
            ("w", (1, 10)),
            ("x", (1, 10)),
            ("y", (1, 10)),
            ("z", (1, 10)),
        ]);
        assert_eq!(
            impose_consistency(&set),
            vec![uniform.clone(), uniform.clone(), uniform]
        );
    }

    #[test]
    fn consistent_sets_pass_through_flattening() {
        let set = [table_beta(), table_gamma()];
        assert_eq!(impose_consistency(&set), set.to_vec());
    }

    #[test]
    fn fusion_of_the_table_pair_is_gamma() {
        assert_eq!(fusion(&[table_beta(), table_gamma()]), table_gamma());
    }

    #[test]
    fn meet_of_the_table_pair_is_beta() {
        assert_eq!(meet(&[table_beta(), table_gamma()]), table_beta());
    }

    #[test]
    fn fusion_of_the_table_triple_is_uniform() {
        let fused = fusion(&[table_beta(), table_gamma(), table_delta()]);
        let uniform = element(&[
            ("w", (1, 10)),
            ("x", (1, 10)),
            ("y", (1, 10)),
            ("z", (1, 10)),
        ]);
        assert_eq!(fused, uniform);
    }

    #[test]
    fn join_repairs_a_non_descending_maximum() {
        // Prefix maxima of these shapes are (1/2, 3/5, 9/10), whose raw
        // differences (1/2, 1/10, 3/10) increase; the hull lifts the middle
        // prefix to 7/10 and yields a valid shape.
        let s1 = DescendingSequence::new(vec![ratio(1, 2), ratio(0, 1), ratio(0, 1)]).unwrap();
        let s2 = DescendingSequence::new(vec![ratio(3, 10), ratio(3, 10), ratio(3, 10)]).unwrap();
        let join = join_sorted(&[s1.clone(), s2.clone()]);
        assert_eq!(join.values(), &[ratio(1, 2), ratio(1, 5), ratio(1, 5)]);
        // Least upper bound: above both inputs, below another shared upper
        // bound such as (1/2, 1/4, 1/4).
        let loose = DescendingSequence::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        for lower in [&s1, &s2] {
            let li = integral(lower);
            let ji = join.integral();
            assert!(li.iter().zip(&ji).all(|(a, b)| a <= b));
        }
        let ji = join.integral();
        let ui = loose.integral();
        assert!(ji.iter().zip(&ui).all(|(a, b)| a <= b));
    }

    #[test]
    fn meet_and_join_of_table_shapes_recover_the_members() {
        let b = table_beta().sorted_weights();
        let g = table_gamma().sorted_weights();
        assert!(meet_sorted(&[b.clone(), g.clone()]).eq_padded(&b));
        assert!(join_sorted(&[b, g.clone()]).eq_padded(&g));
    }

    #[test]
    fn empty_set_operations_are_empty() {
        assert!(is_consistent(&[]));
        assert_eq!(consistency_classes(&[]), Vec::<Vec<Label>>::new());
        assert_eq!(merged_preference(&[]), Vec::<Vec<Label>>::new());
        assert_eq!(fusion(&[]), SourceElement::empty());
        assert_eq!(meet(&[]), SourceElement::empty());
        assert!(common_ordering(&[]).unwrap().is_empty());
        assert!(join_sorted(&[]).is_empty());
        assert!(meet_sorted(&[]).is_empty());
    }

    #[test]
    fn merged_preference_of_a_singleton_is_its_chain() {
        let beta = table_beta();
        assert_eq!(
            merged_preference(std::slice::from_ref(&beta)),
            beta.preference_chain()
        );
    }

    #[test]
    fn disjoint_supports_with_full_weight_conflict() {
        // Each element strictly prefers its own label over the other's.
        let set = [element(&[("a", (1, 1))]), element(&[("b", (1, 1))])];
        assert!(!is_consistent(&set));
        assert_eq!(consistency_classes(&set), vec![labels(&["a", "b"])]);
    }

    use crate::weights::integral as integral_of;
    fn integral(sequence: &DescendingSequence) -> Vec<Ratio> {
        integral_of(sequence.values())
    }

    fn arb_set() -> impl Strategy<Value = Vec<SourceElement>> {
        proptest::collection::vec(arb_source(5, 16), 1..=3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn consistency_matches_cycle_detection(set in arb_set()) {
            let consistent = is_consistent(&set);
            prop_assert_eq!(consistent, find_preference_cycle(&set).is_none());
            prop_assert_eq!(consistent, common_ordering(&set).is_ok());
            // Cross-check against a graph library's cycle test on the strict
            // preference digraph.
            let universe = universe(&set);
            let mut graph = DiGraph::<(), ()>::new();
            let nodes: Vec<_> = universe.iter().map(|_| graph.add_node(())).collect();
            for &(u, v) in &strict_edges(&set, &universe) {
                graph.add_edge(nodes[u], nodes[v], ());
            }
            prop_assert_eq!(consistent, !is_cyclic_directed(&graph));
        }

        #[test]
        fn classes_partition_the_universe(set in arb_set()) {
            let classes = consistency_classes(&set);
            let mut seen: Vec<Label> = classes.into_iter().flatten().collect();
            seen.sort();
            prop_assert_eq!(seen, universe(&set));
            if is_consistent(&set) {
                for class in consistency_classes(&set) {
                    prop_assert_eq!(class.len(), 1);
                }
            }
        }

        #[test]
        fn merged_blocks_are_unanimously_ordered(set in arb_set()) {
            let blocks = merged_preference(&set);
            for i in 0..blocks.len() {
                for j in i + 1..blocks.len() {
                    for u in &blocks[i] {
                        for v in &blocks[j] {
                            for element in &set {
                                prop_assert!(element.weight(u) < element.weight(v));
                            }
                        }
                    }
                }
            }
        }

        #[test]
        fn flattening_is_consistent_and_majorized(set in arb_set()) {
            let flattened = impose_consistency(&set);
            prop_assert!(is_consistent(&flattened));
            for (hat, original) in flattened.iter().zip(&set) {
                prop_assert!(is_majorized(hat, original));
            }
            if is_consistent(&set) {
                prop_assert_eq!(flattened, set);
            }
        }

        #[test]
        fn fusion_bounds_the_flattened_members(set in arb_set()) {
            let fused = fusion(&set);
            let met = meet(&set);
            for hat in impose_consistency(&set) {
                prop_assert!(is_majorized(&hat, &fused));
                prop_assert!(is_majorized(&met, &hat));
            }
        }

        #[test]
        fn fusion_of_a_singleton_is_identity(element in arb_source(5, 16)) {
            prop_assert_eq!(fusion(std::slice::from_ref(&element)), element.clone());
            prop_assert_eq!(meet(std::slice::from_ref(&element)), element);
        }

        #[test]
        fn sorted_join_and_meet_bound_the_shapes(set in arb_set()) {
            let shapes: Vec<DescendingSequence> =
                set.iter().map(|e| e.sorted_weights()).collect();
            let join = join_sorted(&shapes);
            let met = meet_sorted(&shapes);
            let n = join.len().max(met.len());
            let at = |s: &DescendingSequence, k: usize| {
                (0..=k).fold(Ratio::zero(), |a, i| a + s.get(i))
            };
            for shape in &shapes {
                for k in 0..n {
                    prop_assert!(at(shape, k) <= at(&join, k));
                    prop_assert!(at(&met, k) <= at(shape, k));
                }
            }
        }
    }
}

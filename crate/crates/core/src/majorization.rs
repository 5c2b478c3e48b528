//! The majorization preorder and its witnesses.
//!
//! A source element `β` is majorized by `γ` (written `β ≺ γ`) when every
//! prefix sum of `β`'s descending weights is bounded by the corresponding
//! prefix sum of `γ`'s, both padded with zeros to the same length. Lower
//! elements are flatter and lighter: they carry less information.
//!
//! Three equivalent characterizations are implemented, each checkable against
//! the others:
//!
//! 1. prefix-sum domination ([`is_majorized`]);
//! 2. a doubly substochastic transport matrix `D` with `β↓ = D·γ↓`
//!    ([`substochastic_witness`]), built from at most `n` exact
//!    T-transformations followed by one diagonal rescaling;
//! 3. a convex combination of partial permutation matrices
//!    ([`partial_permutation_decomposition`]), obtained by dilating the
//!    witness to a doubly stochastic matrix
//!    ([`dilate_to_doubly_stochastic`]), splitting that into permutations
//!    ([`birkhoff_decompose`]), and restricting each permutation to the
//!    original coordinates.
//!
//! The dilation of an `n×n` witness satisfies `M̃ᵀ = J·M̃·J` for the half-turn
//! `J(i) = i+n mod 2n`; `birkhoff_decompose` detects this symmetry and then
//! extracts permutations in `J`-orbit-closed form, which caps the number of
//! terms at `n² + 2n` instead of the generic `(2n−1)² + 1`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::ratio::{format_ratio, Ratio};
use crate::weights::{integral, SourceElement};

/// A dense square matrix of exact rationals, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareMatrix {
    dim: usize,
    entries: Vec<Ratio>,
}

impl SquareMatrix {
    /// The zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        SquareMatrix {
            dim,
            entries: vec![Ratio::zero(); dim * dim],
        }
    }

    /// The identity matrix of the given dimension.
    pub fn identity(dim: usize) -> Self {
        let mut m = SquareMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Ratio::one());
        }
        m
    }

    /// Builds a matrix from rows, which must all have the same length as
    /// there are rows.
    pub fn from_rows(rows: Vec<Vec<Ratio>>) -> Result<Self, Error> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(SquareMatrix { dim, entries })
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The entry at `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> &Ratio {
        &self.entries[row * self.dim + col]
    }

    /// Overwrites the entry at `(row, col)`.
    pub fn set(&mut self, row: usize, col: usize, value: Ratio) {
        self.entries[row * self.dim + col] = value;
    }

    /// Sum of one row.
    pub fn row_sum(&self, row: usize) -> Ratio {
        (0..self.dim).fold(Ratio::zero(), |a, c| a + self.get(row, c))
    }

    /// Sum of one column.
    pub fn col_sum(&self, col: usize) -> Ratio {
        (0..self.dim).fold(Ratio::zero(), |a, r| a + self.get(r, col))
    }

    /// True when all entries are nonnegative and every row and column sums
    /// to exactly one.
    pub fn is_doubly_stochastic(&self) -> bool {
        self.entries.iter().all(|e| !e.is_negative())
            && (0..self.dim).all(|i| self.row_sum(i).is_one() && self.col_sum(i).is_one())
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = SquareMatrix::zeros(self.dim);
        for r in 0..self.dim {
            for k in 0..self.dim {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..self.dim {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let cur = out.get(r, c).clone();
                        out.set(r, c, cur + a * b);
                    }
                }
            }
        }
        out
    }

    /// Matrix–vector product. The vector length must equal the dimension.
    pub fn apply(&self, vector: &[Ratio]) -> Vec<Ratio> {
        assert_eq!(vector.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|r| (0..self.dim).fold(Ratio::zero(), |a, c| a + self.get(r, c) * &vector[c]))
            .collect()
    }
}

/// A doubly substochastic matrix stored sparsely: nonnegative entries with
/// every row and column summing to at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstochasticWitness {
    dim: usize,
    entries: BTreeMap<(usize, usize), Ratio>,
}

impl SubstochasticWitness {
    /// Validates and builds a witness from sparse entries; zero entries are
    /// dropped.
    pub fn new<I>(dim: usize, entries: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = ((usize, usize), Ratio)>,
    {
        let mut map = BTreeMap::new();
        for ((r, c), v) in entries {
            if r >= dim || c >= dim {
                return Err(Error::NotSubstochastic {
                    detail: format!("entry ({r},{c}) outside a {dim}×{dim} matrix"),
                });
            }
            if v.is_negative() {
                return Err(Error::NotSubstochastic {
                    detail: format!("negative entry {} at ({r},{c})", format_ratio(&v)),
                });
            }
            if !v.is_zero() && map.insert((r, c), v).is_some() {
                return Err(Error::NotSubstochastic {
                    detail: format!("entry ({r},{c}) given twice"),
                });
            }
        }
        let witness = SubstochasticWitness { dim, entries: map };
        for i in 0..dim {
            if witness.row_sum(i) > Ratio::one() {
                return Err(Error::NotSubstochastic {
                    detail: format!("row {i} sums above one"),
                });
            }
            if witness.col_sum(i) > Ratio::one() {
                return Err(Error::NotSubstochastic {
                    detail: format!("column {i} sums above one"),
                });
            }
        }
        Ok(witness)
    }

    /// Converts a dense matrix, validating the substochastic bounds.
    pub fn from_dense(matrix: &SquareMatrix) -> Result<Self, Error> {
        let mut entries = Vec::new();
        for r in 0..matrix.dim() {
            for c in 0..matrix.dim() {
                let v = matrix.get(r, c);
                if !v.is_zero() {
                    entries.push(((r, c), v.clone()));
                }
            }
        }
        SubstochasticWitness::new(matrix.dim(), entries)
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The entry at `(row, col)`; zero when absent.
    pub fn entry(&self, row: usize, col: usize) -> Ratio {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Ratio::zero)
    }

    /// Iterates over nonzero entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Ratio)> {
        self.entries.iter()
    }

    /// Sum of one row.
    pub fn row_sum(&self, row: usize) -> Ratio {
        self.entries
            .range((row, 0)..=(row, self.dim.saturating_sub(1)))
            .fold(Ratio::zero(), |a, (_, v)| a + v)
    }

    /// Sum of one column.
    pub fn col_sum(&self, col: usize) -> Ratio {
        self.entries
            .iter()
            .filter(|((_, c), _)| *c == col)
            .fold(Ratio::zero(), |a, (_, v)| a + v)
    }

    /// Matrix–vector product.
    pub fn apply(&self, vector: &[Ratio]) -> Vec<Ratio> {
        assert_eq!(vector.len(), self.dim, "dimension mismatch");
        let mut out = vec![Ratio::zero(); self.dim];
        for (&(r, c), v) in &self.entries {
            out[r] += v * &vector[c];
        }
        out
    }

    /// Densifies the witness.
    pub fn to_dense(&self) -> SquareMatrix {
        let mut m = SquareMatrix::zeros(self.dim);
        for (&(r, c), v) in &self.entries {
            m.set(r, c, v.clone());
        }
        m
    }
}

/// A permutation of `{0, …, n−1}`, stored as the image of each index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Validates that every index below `images.len()` appears exactly once.
    pub fn new(images: Vec<usize>) -> Result<Self, Error> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::invariant(format!(
                    "not a permutation: image {i} repeated or out of range"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// The identity permutation.
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Number of permuted indices.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True for the empty permutation.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The image of `index`.
    pub fn image(&self, index: usize) -> usize {
        self.0[index]
    }

    /// All images in index order.
    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// Applies the permutation matrix to a vector: `out[r] = v[σ(r)]`.
    pub fn apply(&self, vector: &[Ratio]) -> Vec<Ratio> {
        assert_eq!(vector.len(), self.0.len(), "dimension mismatch");
        self.0.iter().map(|&c| vector[c].clone()).collect()
    }

    /// Restriction to the first `n` coordinates as a partial permutation:
    /// images landing outside `0..n` become undefined.
    pub fn restrict(&self, n: usize) -> PartialPermutation {
        PartialPermutation(
            self.0[..n.min(self.0.len())]
                .iter()
                .map(|&c| if c < n { Some(c) } else { None })
                .collect(),
        )
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with fixed points omitted; the identity prints as `id`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut wrote = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            write!(f, "(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{i}")?;
                first = false;
                i = self.0[i];
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "id")?;
        }
        Ok(())
    }
}

/// A partial permutation: an injective partial map on `{0, …, n−1}`, stored
/// as the optional image of each index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartialPermutation(Vec<Option<usize>>);

impl PartialPermutation {
    /// Validates injectivity and range of the defined images.
    pub fn new(images: Vec<Option<usize>>) -> Result<Self, Error> {
        let mut seen = vec![false; images.len()];
        for &i in images.iter().flatten() {
            if i >= images.len() || seen[i] {
                return Err(Error::invariant(format!(
                    "not a partial permutation: image {i} repeated or out of range"
                )));
            }
            seen[i] = true;
        }
        Ok(PartialPermutation(images))
    }

    /// Number of indices (defined or not).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True for the empty partial permutation.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The image of `index`, if defined.
    pub fn image(&self, index: usize) -> Option<usize> {
        self.0[index]
    }

    /// Applies the partial permutation matrix to a vector; undefined rows
    /// yield zero.
    pub fn apply(&self, vector: &[Ratio]) -> Vec<Ratio> {
        assert_eq!(vector.len(), self.0.len(), "dimension mismatch");
        self.0
            .iter()
            .map(|c| match c {
                Some(c) => vector[*c].clone(),
                None => Ratio::zero(),
            })
            .collect()
    }
}

impl fmt::Display for PartialPermutation {
    /// Defined mappings as `r→c`, comma separated, in brackets.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        let mut first = true;
        for (r, c) in self.0.iter().enumerate() {
            if let Some(c) = c {
                if !first {
                    write!(f, ", ")?;
                }
                write!(f, "{r}→{c}")?;
                first = false;
            }
        }
        write!(f, "]")
    }
}

/// The two sorted weight vectors padded with zeros to a common length
/// `max(#β, #γ)`.
fn padded_sorted(beta: &SourceElement, gamma: &SourceElement) -> (Vec<Ratio>, Vec<Ratio>) {
    let n = beta.support_size().max(gamma.support_size());
    let pad = |s: &SourceElement| {
        let mut v = s.sorted_weights().values().to_vec();
        v.resize(n, Ratio::zero());
        v
    };
    (pad(beta), pad(gamma))
}

/// The first index whose prefix sum of `b` exceeds that of `g`, if any.
fn majorization_violation(b: &[Ratio], g: &[Ratio]) -> Option<usize> {
    let (ib, ig) = (integral(b), integral(g));
    (0..b.len()).find(|&k| ib[k] > ig[k])
}

/// True when `beta ≺ gamma`: every prefix sum of the descending weights of
/// `beta` is bounded by the corresponding prefix sum for `gamma`.
pub fn is_majorized(beta: &SourceElement, gamma: &SourceElement) -> bool {
    let (b, g) = padded_sorted(beta, gamma);
    majorization_violation(&b, &g).is_none()
}

/// Builds a doubly substochastic `D` with `β↓ = D·γ↓` over zero-padded
/// sorted vectors of length `max(#β, #γ)`, or fails with
/// [`Error::NotMajorized`].
///
/// The construction transfers mass inside `γ↓` by exact T-transformations
/// `T = λI + (1−λ)Q`: repeatedly take the smallest index `k` still short of
/// its target (`β(k) > γ(k)`) and the greatest donor `j < k` above target
/// (`β(j) < γ(j)`), and move as much as either side allows. Each step
/// permanently fixes a coordinate, so at most `n` transformations are
/// needed; one final diagonal rescaling discards any leftover mass.
pub fn substochastic_witness(
    beta: &SourceElement,
    gamma: &SourceElement,
) -> Result<SubstochasticWitness, Error> {
    let (b, mut g) = padded_sorted(beta, gamma);
    if let Some(index) = majorization_violation(&b, &g) {
        return Err(Error::NotMajorized { index });
    }
    let n = b.len();
    let mut product = SquareMatrix::identity(n);
    let mut steps = 0usize;
    // Each pass fixes the smallest coordinate still below target.
    while let Some(k) = (0..n).find(|&i| b[i] > g[i]) {
        // Greatest donor above it; guaranteed by the prefix bound at k−1.
        let j = (0..k)
            .rev()
            .find(|&i| b[i] < g[i])
            .expect("a donor precedes every recipient when majorized");
        let excess = &g[j] - &b[j];
        let deficit = &b[k] - &g[k];
        let spread = &g[j] - &g[k];
        debug_assert!(spread.is_positive());
        let lambda = Ratio::one() - excess.min(deficit) / &spread;
        // T = λI + (1−λ)·swap(j,k), applied to γ and folded into the product.
        let mut t = SquareMatrix::identity(n);
        let co = Ratio::one() - &lambda;
        t.set(j, j, lambda.clone());
        t.set(k, k, lambda.clone());
        t.set(j, k, co.clone());
        t.set(k, j, co.clone());
        let (gj, gk) = (g[j].clone(), g[k].clone());
        g[j] = &lambda * &gj + &co * &gk;
        g[k] = &lambda * &gk + &co * &gj;
        product = t.mul(&product);
        steps += 1;
        assert!(steps <= n, "T-transformation bound exceeded");
    }
    // No coordinate is below target any more, so β ≤ γ' componentwise and a
    // diagonal rescaling finishes the job.
    let mut diagonal = SquareMatrix::zeros(n);
    for i in 0..n {
        debug_assert!(b[i] <= g[i]);
        if !g[i].is_zero() {
            diagonal.set(i, i, &b[i] / &g[i]);
        }
    }
    let witness = SubstochasticWitness::from_dense(&diagonal.mul(&product))?;
    debug_assert!(verify_witness(&witness, beta, gamma));
    Ok(witness)
}

/// Checks a claimed witness: `D` must be at least as large as both supports
/// and reproduce `β↓ = D·γ↓` on zero-padded sorted vectors. The substochastic
/// bounds are guaranteed by the [`SubstochasticWitness`] type itself.
pub fn verify_witness(
    witness: &SubstochasticWitness,
    beta: &SourceElement,
    gamma: &SourceElement,
) -> bool {
    let needed = beta.support_size().max(gamma.support_size());
    if witness.dim() < needed {
        return false;
    }
    let pad = |s: &SourceElement| {
        let mut v = s.sorted_weights().values().to_vec();
        v.resize(witness.dim(), Ratio::zero());
        v
    };
    witness.apply(&pad(gamma)) == pad(beta)
}

/// Embeds an `n×n` doubly substochastic matrix `M` into the `2n×2n` doubly
/// stochastic matrix
///
/// ```text
/// ⎡ M              I − diag(M·1) ⎤
/// ⎣ I − diag(Mᵀ·1)  Mᵀ           ⎦
/// ```
///
/// whose off-diagonal blocks hold each row's and column's missing mass.
pub fn dilate_to_doubly_stochastic(witness: &SubstochasticWitness) -> SquareMatrix {
    let n = witness.dim();
    let mut m = SquareMatrix::zeros(2 * n);
    for (&(r, c), v) in witness.iter() {
        m.set(r, c, v.clone());
        m.set(n + c, n + r, v.clone());
    }
    for i in 0..n {
        m.set(i, n + i, Ratio::one() - witness.row_sum(i));
        m.set(n + i, i, Ratio::one() - witness.col_sum(i));
    }
    debug_assert!(m.is_doubly_stochastic());
    m
}

/// Maximum bipartite matching by augmenting paths. `adjacency[l]` lists the
/// right neighbors of left vertex `l`; augmentation is attempted from the
/// left vertices in the order given.
fn bipartite_matching(
    adjacency: &[Vec<usize>],
    rights: usize,
    left_order: &[usize],
) -> Vec<Option<usize>> {
    fn try_augment(
        l: usize,
        adjacency: &[Vec<usize>],
        right_to_left: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for &r in &adjacency[l] {
            if visited[r] {
                continue;
            }
            visited[r] = true;
            if right_to_left[r].is_none()
                || try_augment(right_to_left[r].unwrap(), adjacency, right_to_left, visited)
            {
                right_to_left[r] = Some(l);
                return true;
            }
        }
        false
    }

    let mut right_to_left: Vec<Option<usize>> = vec![None; rights];
    for &l in left_order {
        let mut visited = vec![false; rights];
        try_augment(l, adjacency, &mut right_to_left, &mut visited);
    }
    let mut left_to_right = vec![None; adjacency.len()];
    for (r, l) in right_to_left.iter().enumerate() {
        if let Some(l) = *l {
            left_to_right[l] = Some(r);
        }
    }
    left_to_right
}

/// Merges two matchings into one that saturates every left vertex saturated
/// by `m1` and every right vertex saturated by `m2`.
///
/// Components of the symmetric difference are alternating paths and cycles;
/// shared edges are kept, cycles take their `m1` edges, and each path takes
/// the side whose endpoints it must cover (an endpoint missing from one
/// matching is exempt from that side's requirement).
fn mendelsohn_dulmage(
    m1: &[Option<usize>],
    m2: &[Option<usize>],
    rights: usize,
) -> Vec<Option<usize>> {
    let lefts = m1.len();
    let mut r1: Vec<Option<usize>> = vec![None; rights];
    let mut r2: Vec<Option<usize>> = vec![None; rights];
    for l in 0..lefts {
        if let Some(r) = m1[l] {
            r1[r] = Some(l);
        }
        if let Some(r) = m2[l] {
            r2[r] = Some(l);
        }
    }
    let mut take = vec![None; lefts];
    let mut visited_l = vec![false; lefts];
    for start in 0..lefts {
        if visited_l[start] || (m1[start].is_none() && m2[start].is_none()) {
            continue;
        }
        // Collect the alternating component containing `start` by
        // undirected traversal over both matchings.
        let mut stack = vec![start];
        let mut comp_lefts = Vec::new();
        let mut seen_r = vec![false; rights];
        while let Some(l) = stack.pop() {
            if visited_l[l] {
                continue;
            }
            visited_l[l] = true;
            comp_lefts.push(l);
            for m in [m1, m2] {
                if let Some(r) = m[l] {
                    if !seen_r[r] {
                        seen_r[r] = true;
                        for rm in [&r1, &r2] {
                            if let Some(l2) = rm[r] {
                                if !visited_l[l2] {
                                    stack.push(l2);
                                }
                            }
                        }
                    }
                }
            }
        }
        // If some left vertex of the component is saturated by m1 only, the
        // component must keep its m1 edges; dually for a right vertex
        // saturated by m2 only. A path never forces both at once, because
        // its two endpoints lie on the same side of the bipartition.
        let needs_m1 = comp_lefts
            .iter()
            .any(|&l| m1[l].is_some() && m2[l].is_none());
        let needs_m2 = (0..rights).any(|r| seen_r[r] && r2[r].is_some() && r1[r].is_none());
        debug_assert!(
            !(needs_m1 && needs_m2),
            "alternating component forced both sides"
        );
        let use_first = needs_m1 || !needs_m2;
        for &l in &comp_lefts {
            take[l] = if use_first { m1[l] } else { m2[l] };
        }
    }
    take
}

/// Splits a doubly stochastic matrix into a convex combination of
/// permutation matrices: `M = Σ λᵢ·Pᵢ` with `Σ λᵢ = 1`, all arithmetic
/// exact.
///
/// When the input has the dilation symmetry `Mᵀ = J·M·J` (for the half-turn
/// `J(i) = i+n mod 2n`), permutations are chosen as `J`-orbit-closed
/// involutions against the symmetrized matrix, which bounds the number of
/// terms by `n² + 2n`; otherwise a plain augmenting-path decomposition runs.
pub fn birkhoff_decompose(matrix: &SquareMatrix) -> Result<Vec<(Ratio, Permutation)>, Error> {
    let dim = matrix.dim();
    if !matrix.is_doubly_stochastic() {
        return Err(Error::NotSubstochastic {
            detail: "birkhoff decomposition needs a doubly stochastic matrix".into(),
        });
    }
    if dim == 0 {
        return Ok(vec![(Ratio::one(), Permutation::identity(0))]);
    }
    if dim.is_multiple_of(2) && has_dilation_symmetry(matrix) {
        symmetric_birkhoff(matrix)
    } else {
        generic_birkhoff(matrix)
    }
}

/// True when `Mᵀ = J·M·J` for the half-turn `J(i) = i+n mod 2n`.
fn has_dilation_symmetry(matrix: &SquareMatrix) -> bool {
    let dim = matrix.dim();
    let n = dim / 2;
    let j = |i: usize| (i + n) % dim;
    (0..dim).all(|r| (0..dim).all(|c| matrix.get(c, r) == matrix.get(j(r), j(c))))
}

fn generic_birkhoff(matrix: &SquareMatrix) -> Result<Vec<(Ratio, Permutation)>, Error> {
    let dim = matrix.dim();
    let mut rest = matrix.clone();
    let mut terms = Vec::new();
    let order: Vec<usize> = (0..dim).collect();
    while !rest.row_sum(0).is_zero() {
        let adjacency: Vec<Vec<usize>> = (0..dim)
            .map(|r| (0..dim).filter(|&c| !rest.get(r, c).is_zero()).collect())
            .collect();
        let matched = bipartite_matching(&adjacency, dim, &order);
        let images: Option<Vec<usize>> = matched.into_iter().collect();
        let Some(images) = images else {
            return Err(Error::NoPerfectMatching);
        };
        let perm = Permutation::new(images)?;
        let lambda = (0..dim)
            .map(|r| rest.get(r, perm.image(r)).clone())
            .min()
            .expect("nonempty matrix");
        debug_assert!(lambda.is_positive());
        for r in 0..dim {
            let c = perm.image(r);
            let v = rest.get(r, c).clone();
            rest.set(r, c, v - &lambda);
        }
        terms.push((lambda, perm));
    }
    Ok(terms)
}

/// Decomposition specialized to dilation-symmetric matrices.
///
/// `T(r,c) = M(r, J(c))` is symmetric doubly stochastic with diagonal corner
/// blocks: positive entries are pair cells `(i, n+j)`/`(n+j, i)` and loop
/// cells `(v, v)`. Every step picks an involution — a pairing of loop-less
/// vertices plus loops — subtracts its minimum, and zeroes a whole orbit, so
/// at most `n² + 2n` steps run. Each involution `τ` yields the permutation
/// `r ↦ J(τ(r))` of the original matrix.
fn symmetric_birkhoff(matrix: &SquareMatrix) -> Result<Vec<(Ratio, Permutation)>, Error> {
    let dim = matrix.dim();
    let n = dim / 2;
    let j = |i: usize| (i + n) % dim;
    let mut t = SquareMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            t.set(r, c, matrix.get(r, j(c)).clone());
        }
    }
    // The corner blocks must be diagonal for the orbit argument; fall back
    // otherwise (possible for symmetric matrices that are not dilations).
    for a in 0..n {
        for b in 0..n {
            if a != b && (!t.get(a, b).is_zero() || !t.get(n + a, n + b).is_zero()) {
                return generic_birkhoff(matrix);
            }
        }
    }
    let mut terms: Vec<(Ratio, Permutation)> = Vec::new();
    let max_terms = n * n + 2 * n;
    while !t.row_sum(0).is_zero() {
        // Pair graph: left vertex i ↔ right vertex j when T(i, n+j) > 0.
        let adjacency: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&jj| !t.get(i, n + jj).is_zero()).collect())
            .collect();
        let loop_left: Vec<bool> = (0..n).map(|i| !t.get(i, i).is_zero()).collect();
        let loop_right: Vec<bool> = (0..n).map(|i| !t.get(n + i, n + i).is_zero()).collect();
        // Augment from loop-less lefts first so they are always saturated,
        // then opportunistically pair the rest.
        let mut order: Vec<usize> = (0..n).filter(|&i| !loop_left[i]).collect();
        order.extend((0..n).filter(|&i| loop_left[i]));
        let m1 = bipartite_matching(&adjacency, n, &order);
        if m1.iter().zip(&loop_left).any(|(m, l)| m.is_none() && !l) {
            return Err(Error::NoPerfectMatching);
        }
        // The mirror matching saturating loop-less rights.
        let mut radj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (l, nbrs) in adjacency.iter().enumerate() {
            for &r in nbrs {
                radj[r].push(l);
            }
        }
        let mut rorder: Vec<usize> = (0..n).filter(|&i| !loop_right[i]).collect();
        rorder.extend((0..n).filter(|&i| loop_right[i]));
        let m2r = bipartite_matching(&radj, n, &rorder);
        if m2r.iter().zip(&loop_right).any(|(m, l)| m.is_none() && !l) {
            return Err(Error::NoPerfectMatching);
        }
        let mut m2: Vec<Option<usize>> = vec![None; n];
        for (r, l) in m2r.iter().enumerate() {
            if let Some(l) = *l {
                m2[l] = Some(r);
            }
        }
        let pairing = mendelsohn_dulmage(&m1, &m2, n);
        // Assemble the involution τ: matched pairs become 2-cycles, the rest
        // take their loops.
        let mut tau: Vec<usize> = (0..dim).collect();
        let shrink = |cand: &Ratio, lambda: &mut Option<Ratio>| match lambda {
            Some(l) if &*l <= cand => {}
            _ => *lambda = Some(cand.clone()),
        };
        let mut lambda: Option<Ratio> = None;
        for (i, p) in pairing.iter().enumerate() {
            if let Some(r) = *p {
                tau[i] = n + r;
                tau[n + r] = i;
                shrink(t.get(i, n + r), &mut lambda);
            }
        }
        for (v, &img) in tau.iter().enumerate() {
            if img == v {
                if t.get(v, v).is_zero() {
                    return Err(Error::NoPerfectMatching);
                }
                shrink(t.get(v, v), &mut lambda);
            }
        }
        let lambda = lambda.expect("positive mass remains");
        for (v, &img) in tau.iter().enumerate() {
            if img >= v {
                let cell = t.get(v, img).clone() - &lambda;
                debug_assert!(!cell.is_negative());
                t.set(v, img, cell.clone());
                if img != v {
                    t.set(img, v, cell);
                }
            }
        }
        let perm = Permutation::new(tau.iter().map(|&v| j(v)).collect())?;
        terms.push((lambda, perm));
        assert!(terms.len() <= max_terms, "orbit bound exceeded");
    }
    Ok(terms)
}

/// Expresses `β↓` as a convex combination of partial permutations of `γ↓`:
/// `β↓ = Σ λᵢ·Pᵢ·γ↓` with `Σ λᵢ = 1`, where each `Pᵢ` is the restriction of
/// a permutation of the dilated witness back to the original coordinates.
/// Identical restrictions are merged. Fails with [`Error::NotMajorized`]
/// when no witness exists.
pub fn partial_permutation_decomposition(
    beta: &SourceElement,
    gamma: &SourceElement,
) -> Result<Vec<(Ratio, PartialPermutation)>, Error> {
    let witness = substochastic_witness(beta, gamma)?;
    let n = witness.dim();
    let dilated = dilate_to_doubly_stochastic(&witness);
    let mut merged: BTreeMap<PartialPermutation, Ratio> = BTreeMap::new();
    for (lambda, perm) in birkhoff_decompose(&dilated)? {
        *merged.entry(perm.restrict(n)).or_insert_with(Ratio::zero) += lambda;
    }
    let terms: Vec<(Ratio, PartialPermutation)> = merged.into_iter().map(|(p, l)| (l, p)).collect();
    debug_assert!(verify_partial_decomposition(&terms, beta, gamma));
    Ok(terms)
}

/// Checks a claimed convex decomposition: coefficients positive and summing
/// to at most one, and `Σ λᵢ·Pᵢ·γ↓ = β↓` exactly on zero-padded vectors.
pub fn verify_partial_decomposition(
    terms: &[(Ratio, PartialPermutation)],
    beta: &SourceElement,
    gamma: &SourceElement,
) -> bool {
    let (b, g) = padded_sorted(beta, gamma);
    let n = b.len();
    if terms.iter().any(|(l, p)| !l.is_positive() || p.len() != n) {
        return false;
    }
    let total: Ratio = terms.iter().fold(Ratio::zero(), |a, (l, _)| a + l);
    if total > Ratio::one() {
        return false;
    }
    let mut sum = vec![Ratio::zero(); n];
    for (lambda, perm) in terms {
        for (i, v) in perm.apply(&g).into_iter().enumerate() {
            sum[i] += lambda * v;
        }
    }
    sum == b
}

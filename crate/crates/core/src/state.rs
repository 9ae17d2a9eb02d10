//! Multipartite pure states, state sets, and bipartitions.
//!
//! States are deliberately unnormalized: all certificates downstream are
//! scale-invariant (ranks, ideal membership, orthogonality), which keeps
//! every coefficient inside the Gaussian rationals.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{GaussianRational, Rational};
use crate::matrix::GMatrix;

/// Local dimensions and labels of the parties.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartySpec {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl PartySpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvariantViolation(
                "at least two parties required".into(),
            ));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::InvariantViolation(
                "every local dimension must be at least 2".into(),
            ));
        }
        let labels = (0..dims.len())
            .map(|i| {
                let c = (b'A' + (i % 26) as u8) as char;
                if i < 26 {
                    c.to_string()
                } else {
                    format!("{c}{}", i / 26)
                }
            })
            .collect();
        Ok(PartySpec { dims, labels })
    }

    /// Three qubits, the workhorse configuration.
    pub fn qubits(n: usize) -> Self {
        Self::new(vec![2; n]).expect("n >= 2")
    }

    pub fn num_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, party: usize) -> usize {
        self.dims[party]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn label(&self, party: usize) -> &str {
        &self.labels[party]
    }

    /// Row-major rank of a full multi-index.
    pub fn flatten(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }
}

/// One side of a bipartition plus its ordered complement.
///
/// The order of parties within each side fixes the digit order used when
/// reshaping; the cyclic constructors reproduce the AB, BC, CA convention of
/// three-party groups.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    pub fn new(left: Vec<usize>, right: Vec<usize>, num_parties: usize) -> Result<Self> {
        let mut seen = vec![false; num_parties];
        for &p in left.iter().chain(&right) {
            if p >= num_parties || seen[p] {
                return Err(Error::IndexOutOfRange(format!("party {p}")));
            }
            seen[p] = true;
        }
        if left.is_empty() || right.is_empty() || !seen.iter().all(|&s| s) {
            return Err(Error::InvariantViolation(
                "bipartition sides must be nonempty, disjoint, and exhaustive".into(),
            ));
        }
        Ok(Bipartition { left, right })
    }

    /// `party` alone on the left, the rest in cyclic order on the right.
    pub fn single(party: usize, num_parties: usize) -> Self {
        let right = (1..num_parties).map(|k| (party + k) % num_parties).collect();
        Bipartition {
            left: vec![party],
            right,
        }
    }

    /// All parties except `excluded` on the left, in cyclic order starting
    /// after `excluded`. For three parties this yields the groups AB, BC, CA.
    pub fn group_excluding(excluded: usize, num_parties: usize) -> Self {
        let left = (1..num_parties).map(|k| (excluded + k) % num_parties).collect();
        Bipartition {
            left,
            right: vec![excluded],
        }
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn swapped(&self) -> Self {
        Bipartition {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    pub fn left_dim(&self, spec: &PartySpec) -> usize {
        self.left.iter().map(|&p| spec.dim(p)).product()
    }

    pub fn right_dim(&self, spec: &PartySpec) -> usize {
        self.right.iter().map(|&p| spec.dim(p)).product()
    }

    pub fn label(&self, spec: &PartySpec) -> String {
        let side = |parties: &[usize]| {
            parties
                .iter()
                .map(|&p| spec.label(p))
                .collect::<Vec<_>>()
                .join("")
        };
        format!("{}|{}", side(&self.left), side(&self.right))
    }

    pub fn left_label(&self, spec: &PartySpec) -> String {
        self.left
            .iter()
            .map(|&p| spec.label(p))
            .collect::<Vec<_>>()
            .join("")
    }

    /// Every unordered bipartition, sides in ascending party order, with the
    /// side containing party 0 on the left.
    pub fn enumerate_all(num_parties: usize) -> Vec<Bipartition> {
        let mut out = Vec::new();
        for mask in 1u32..(1 << (num_parties - 1)) {
            let full = mask << 1 | 1; // party 0 always on the left
            let left: Vec<usize> = (0..num_parties).filter(|&p| full >> p & 1 == 1).collect();
            let right: Vec<usize> = (0..num_parties).filter(|&p| full >> p & 1 == 0).collect();
            if !right.is_empty() {
                out.push(Bipartition { left, right });
            }
        }
        // the split {0}|rest is missing from the mask loop start; add it first
        let mut all = vec![Bipartition::single(0, num_parties)];
        for b in out {
            if b.left != [0] {
                all.push(b);
            }
        }
        all
    }

    /// The single-versus-rest bipartitions in party order; for a fully
    /// product vector these splits are jointly decisive.
    pub fn singles(num_parties: usize) -> Vec<Bipartition> {
        (0..num_parties)
            .map(|p| Bipartition::single(p, num_parties))
            .collect()
    }
}

/// Sparse unnormalized pure state over a party specification.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PureState {
    spec: PartySpec,
    amplitudes: BTreeMap<Vec<usize>, GaussianRational>,
}

impl PureState {
    pub fn new(spec: PartySpec, terms: Vec<(Vec<usize>, GaussianRational)>) -> Result<Self> {
        let mut amplitudes = BTreeMap::new();
        for (index, amp) in terms {
            if index.len() != spec.num_parties() {
                return Err(Error::IndexOutOfRange(format!(
                    "index {index:?} has wrong arity"
                )));
            }
            for (p, &i) in index.iter().enumerate() {
                if i >= spec.dim(p) {
                    return Err(Error::IndexOutOfRange(format!(
                        "digit {i} exceeds dimension of party {p}"
                    )));
                }
            }
            if amp.is_zero() {
                continue;
            }
            let entry = amplitudes.entry(index).or_insert_with(GaussianRational::zero);
            *entry += &amp;
        }
        amplitudes.retain(|_, a| !a.is_zero());
        if amplitudes.is_empty() {
            return Err(Error::InvariantViolation(
                "state must have at least one nonzero amplitude".into(),
            ));
        }
        Ok(PureState { spec, amplitudes })
    }

    /// Convenience constructor from integer amplitudes.
    pub fn from_ints(spec: &PartySpec, terms: &[(&[usize], i64)]) -> Self {
        PureState::new(
            spec.clone(),
            terms
                .iter()
                .map(|(idx, a)| (idx.to_vec(), GaussianRational::from_int(*a)))
                .collect(),
        )
        .expect("valid literal state")
    }

    pub fn spec(&self) -> &PartySpec {
        &self.spec
    }

    /// Amplitudes in lexicographic index order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &GaussianRational)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, index: &[usize]) -> GaussianRational {
        self.amplitudes
            .get(index)
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn scale(&self, s: &GaussianRational) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::InvariantViolation("zero scale".into()));
        }
        Ok(PureState {
            spec: self.spec.clone(),
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(k, v)| (k.clone(), v * s))
                .collect(),
        })
    }

    /// Dense coefficient vector in row-major index order.
    pub fn dense(&self) -> Vec<GaussianRational> {
        let mut v = vec![GaussianRational::zero(); self.spec.total_dim()];
        for (idx, amp) in &self.amplitudes {
            v[self.spec.flatten(idx)] = amp.clone();
        }
        v
    }

    pub fn norm_sqr(&self) -> Rational {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Coefficient matrix of the state across a bipartition. Entry `(k, l)`
    /// is the amplitude whose left-group digits encode `k` and right-group
    /// digits encode `l`, most significant digit first within each group.
    pub fn reshape(&self, b: &Bipartition) -> GMatrix {
        let dl = b.left_dim(&self.spec);
        let dr = b.right_dim(&self.spec);
        let mut m = GMatrix::zeros(dl, dr);
        for (idx, amp) in &self.amplitudes {
            let k = b
                .left()
                .iter()
                .fold(0, |acc, &p| acc * self.spec.dim(p) + idx[p]);
            let l = b
                .right()
                .iter()
                .fold(0, |acc, &p| acc * self.spec.dim(p) + idx[p]);
            m[(k, l)] = amp.clone();
        }
        m
    }

    /// True when the state is a product across the bipartition, i.e. the
    /// reshaped coefficient matrix has rank one (all 2x2 minors vanish).
    pub fn is_product_across(&self, b: &Bipartition) -> bool {
        self.reshape(b).rank() == 1
    }

    /// True when the state factors across every bipartition.
    pub fn is_fully_product(&self) -> bool {
        Bipartition::singles(self.spec.num_parties())
            .iter()
            .all(|b| self.is_product_across(b))
    }
}

/// Conjugate-linear-in-first-argument inner product.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<GaussianRational> {
    if a.spec != b.spec {
        return Err(Error::SpecMismatch);
    }
    let mut acc = GaussianRational::zero();
    for (idx, amp_a) in &a.amplitudes {
        if let Some(amp_b) = b.amplitudes.get(idx) {
            acc += &(&amp_a.conj() * amp_b);
        }
    }
    Ok(acc)
}

/// Ordered list of states sharing one party specification.
#[derive(Clone, Debug)]
pub struct StateSet {
    spec: PartySpec,
    states: Vec<PureState>,
    name: String,
    labels: Vec<String>,
}

impl StateSet {
    pub fn new(name: impl Into<String>, states: Vec<PureState>) -> Result<Self> {
        let spec = states
            .first()
            .map(|s| s.spec.clone())
            .ok_or_else(|| Error::InvariantViolation("empty state set".into()))?;
        if states.iter().any(|s| s.spec != spec) {
            return Err(Error::SpecMismatch);
        }
        let labels = (0..states.len()).map(|i| format!("psi{i}")).collect();
        Ok(StateSet {
            spec,
            states,
            name: name.into(),
            labels,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.states.len());
        self.labels = labels;
        self
    }

    pub fn spec(&self) -> &PartySpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &PureState {
        &self.states[i]
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Exact pairwise-orthogonality check; returns the first offending pair.
    pub fn verify_orthogonal(&self) -> Result<()> {
        for i in 0..self.states.len() {
            for j in i + 1..self.states.len() {
                if !inner_product(&self.states[i], &self.states[j])?.is_zero() {
                    return Err(Error::NotOrthogonal(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn is_pairwise_orthogonal(&self) -> bool {
        self.verify_orthogonal().is_ok()
    }

    /// Gram matrix of exact inner products, row i column j = <psi_i|psi_j>.
    pub fn gram(&self) -> GMatrix {
        GMatrix::from_fn(self.states.len(), self.states.len(), |i, j| {
            inner_product(&self.states[i], &self.states[j]).expect("shared spec")
        })
    }

    /// Set with state `k` removed.
    pub fn without(&self, k: usize) -> Result<StateSet> {
        if k >= self.states.len() {
            return Err(Error::IndexOutOfRange(format!("state {k}")));
        }
        let mut states = self.states.clone();
        let mut labels = self.labels.clone();
        states.remove(k);
        labels.remove(k);
        Ok(StateSet {
            spec: self.spec.clone(),
            states,
            name: format!("{} minus {}", self.name, self.labels[k]),
            labels,
        })
    }

    /// Concatenation of two sets over the same spec.
    pub fn extended_with(&self, other: &StateSet, name: impl Into<String>) -> Result<StateSet> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        let mut states = self.states.clone();
        states.extend(other.states.iter().cloned());
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Ok(StateSet {
            spec: self.spec.clone(),
            states,
            name: name.into(),
            labels,
        })
    }

    /// Matrix whose rows are the dense coefficient vectors of the states.
    pub fn coefficient_matrix(&self) -> GMatrix {
        GMatrix::from_rows(self.states.iter().map(|s| s.dense()).collect())
    }

    /// Exact dimension of the spanned subspace.
    pub fn span_dim(&self) -> usize {
        self.coefficient_matrix().rank()
    }

    /// Basis of the orthogonal complement of the span, as integer-scaled
    /// states. Computed from the exact null space of the conjugated
    /// coefficient matrix.
    pub fn orthogonal_complement(&self) -> Vec<PureState> {
        let m = self.coefficient_matrix().conj();
        m.null_space()
            .into_iter()
            .map(|v| {
                let terms: Vec<(Vec<usize>, GaussianRational)> = v
                    .into_iter()
                    .enumerate()
                    .filter(|(_, a)| !a.is_zero())
                    .map(|(flat, a)| (unflatten(&self.spec, flat), a))
                    .collect();
                PureState::new(self.spec.clone(), terms).expect("nonzero kernel vector")
            })
            .collect()
    }
}

pub fn unflatten(spec: &PartySpec, flat: usize) -> Vec<usize> {
    let mut idx = vec![0; spec.num_parties()];
    let mut rem = flat;
    for p in (0..spec.num_parties()).rev() {
        idx[p] = rem % spec.dim(p);
        rem /= spec.dim(p);
    }
    idx
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} on {:?}", self.name, self.spec.dims())?;
        for (i, s) in self.states.iter().enumerate() {
            let terms: Vec<String> = s
                .terms()
                .map(|(idx, a)| {
                    let digits: String = idx.iter().map(|d| d.to_string()).collect();
                    format!("({a})|{digits}>")
                })
                .collect();
            writeln!(f, "  {}: {}", self.labels[i], terms.join(" + "))?;
        }
        Ok(())
    }
}

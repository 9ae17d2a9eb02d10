//! Reduced feature matrices, vectorization maps, and the rank criterion that
//! rules out a nontrivial first move by a group of parties.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::GaussianRational;
use crate::matrix::GMatrix;
use crate::state::{Bipartition, StateSet};

/// Partial trace of |psi_i><psi_j| over the complement of the group, as a
/// d_G x d_G matrix: entry (p, q) = sum_r psi_i[p, r] * conj(psi_j[q, r]).
#[derive(Clone, Debug)]
pub struct ReducedFeatureMatrix {
    pub i: usize,
    pub j: usize,
    pub group: Bipartition,
    pub entries: GMatrix,
}

/// Computes the reduced feature matrix of states i and j over the left side
/// of `group`.
pub fn reduced_feature(
    set: &StateSet,
    i: usize,
    j: usize,
    group: &Bipartition,
) -> Result<ReducedFeatureMatrix> {
    let n = set.len();
    if i >= n || j >= n || i == j {
        return Err(Error::IndexOutOfRange(format!("state pair ({i}, {j})")));
    }
    let a = set.state(i).reshape(group);
    let b = set.state(j).reshape(group);
    let d = group.left_dim(set.spec());
    let dc = group.right_dim(set.spec());
    let entries = GMatrix::from_fn(d, d, |p, q| {
        let mut acc = GaussianRational::zero();
        for r in 0..dc {
            if !a[(p, r)].is_zero() && !b[(q, r)].is_zero() {
                acc += &(&a[(p, r)] * &b[(q, r)].conj());
            }
        }
        acc
    });
    Ok(ReducedFeatureMatrix {
        i,
        j,
        group: group.clone(),
        entries,
    })
}

/// Column-stacked vectorization map of a family of equal-sized matrices:
/// column c of the result is vec of the c-th input.
pub fn vectorization_map(mats: &[GMatrix]) -> GMatrix {
    let Some(first) = mats.first() else {
        return GMatrix::zeros(0, 0);
    };
    let rows = first.rows() * first.cols();
    let cols = mats.len();
    let vecs: Vec<Vec<GaussianRational>> = mats.iter().map(|m| m.vectorize()).collect();
    GMatrix::from_fn(rows, cols, |r, c| vecs[c][r].clone())
}

/// Exact rank of the span of {Pi_ij, Pi_ij^dagger} for i < j over the group.
pub fn feature_span_rank(set: &StateSet, group: &Bipartition) -> Result<usize> {
    let n = set.len();
    let mut mats = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let m = reduced_feature(set, i, j, group)?.entries;
            mats.push(m.adjoint());
            mats.push(m);
        }
    }
    Ok(vectorization_map(&mats).rank())
}

/// Rank data for one group of parties.
#[derive(Clone, Debug, Serialize)]
pub struct GroupRank {
    pub group: String,
    pub rank: usize,
    pub bound: usize,
    pub saturated: bool,
}

/// Rank criterion for one group: the group cannot start a nontrivial
/// orthogonality-preserving measurement iff the feature matrices span the
/// full traceless space, rank = d_G^2 - 1.
pub fn no_go_first_move(set: &StateSet, group: &Bipartition) -> Result<GroupRank> {
    set.verify_orthogonal()?;
    let d = group.left_dim(set.spec());
    let rank = feature_span_rank(set, group)?;
    Ok(GroupRank {
        group: group.left_label(set.spec()),
        rank,
        bound: d * d - 1,
        saturated: rank == d * d - 1,
    })
}

/// The (n-1)-party groups in cyclic order; for three parties: AB, BC, CA.
pub fn joint_groups(num_parties: usize) -> Vec<Bipartition> {
    (0..num_parties)
        .map(|k| Bipartition::group_excluding((k + num_parties - 1) % num_parties, num_parties))
        .collect()
}

/// Evaluates the no-go criterion on every (n-1)-party group. `true` in the
/// first slot certifies that no group of n-1 parties can go first, the
/// sufficient condition for strong nonlocality.
pub fn strong_nonlocality_ranks(set: &StateSet) -> Result<(bool, Vec<GroupRank>)> {
    if set.spec().num_parties() < 3 {
        return Err(Error::PreconditionFailed(
            "strong nonlocality needs at least three parties".into(),
        ));
    }
    set.verify_orthogonal()?;
    let mut ranks = Vec::new();
    for g in joint_groups(set.spec().num_parties()) {
        ranks.push(no_go_first_move(set, &g)?);
    }
    Ok((ranks.iter().all(|r| r.saturated), ranks))
}

//! Product-forming matrices and the quadratic systems whose common zeros are
//! the coordinate vectors of product states inside a span.

use crate::error::{Error, Result};
use crate::exact::GaussianRational;
use crate::matrix::GMatrix;
use crate::poly::{Monomial, MonomialOrder, MultiPoly};
use crate::state::{Bipartition, StateSet};

/// One mixed 2x2 minor matrix: entry (i, j) couples rows k < p and columns
/// l < r of the reshaped coefficient matrices of states i and j.
#[derive(Clone, Debug)]
pub struct ProductFormingMatrix {
    pub bipartition: Bipartition,
    pub row_pair: (usize, usize),
    pub col_pair: (usize, usize),
    pub entries: GMatrix,
}

/// Systems range either over a single bipartition or over the union of the
/// single-party splits, which is decisive for fully product vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemScope {
    One(Bipartition),
    All,
}

impl SystemScope {
    pub fn bipartitions(&self, num_parties: usize) -> Vec<Bipartition> {
        match self {
            SystemScope::One(b) => vec![b.clone()],
            SystemScope::All if num_parties == 2 => vec![Bipartition::single(0, 2)],
            SystemScope::All => Bipartition::singles(num_parties),
        }
    }

    pub fn label(&self, set: &StateSet) -> String {
        match self {
            SystemScope::One(b) => b.label(set.spec()),
            SystemScope::All => "all".to_string(),
        }
    }
}

/// The polynomials X^t P X for every product-forming matrix in scope.
#[derive(Clone, Debug)]
pub struct QuadraticSystem {
    pub nvars: usize,
    pub scope: SystemScope,
    pub polys: Vec<MultiPoly>,
}

impl QuadraticSystem {
    /// One polynomial per line, canonical term order.
    pub fn to_text(&self) -> String {
        self.polys
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// The same system with one coordinate pinned to 1.
#[derive(Clone, Debug)]
pub struct PerturbedSystem {
    pub nvars: usize,
    pub pinned: usize,
    pub scope: SystemScope,
    pub polys: Vec<MultiPoly>,
}

impl PerturbedSystem {
    pub fn active_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| v != self.pinned).collect()
    }

    pub fn to_text(&self) -> String {
        self.polys
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Largest residual of the system at a complex point (full-length
    /// coordinates; the pinned entry is expected to be 1).
    pub fn residual_at(&self, point: &[(f64, f64)]) -> f64 {
        self.polys
            .iter()
            .map(|p| {
                let (re, im) = p.eval_complex(point);
                (re * re + im * im).sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// All product-forming matrices of the set across one bipartition, ordered
/// by row pair then column pair.
pub fn product_forming(set: &StateSet, b: &Bipartition) -> Vec<ProductFormingMatrix> {
    let n = set.len();
    let reshaped: Vec<GMatrix> = set.states().iter().map(|s| s.reshape(b)).collect();
    let dl = b.left_dim(set.spec());
    let dr = b.right_dim(set.spec());
    let mut out = Vec::new();
    for k in 0..dl {
        for p in k + 1..dl {
            for l in 0..dr {
                for r in l + 1..dr {
                    let entries = GMatrix::from_fn(n, n, |i, j| {
                        &reshaped[i][(k, l)] * &reshaped[j][(p, r)]
                            - &reshaped[i][(k, r)] * &reshaped[j][(p, l)]
                    });
                    out.push(ProductFormingMatrix {
                        bipartition: b.clone(),
                        row_pair: (k, p),
                        col_pair: (l, r),
                        entries,
                    });
                }
            }
        }
    }
    out
}

/// Symmetrized quadratic polynomial X^t P X: the coefficient of x_i x_j for
/// i < j is P[i,j] + P[j,i], the coefficient of x_i^2 is P[i,i].
fn quadratic_of(p: &GMatrix) -> MultiPoly {
    let n = p.rows();
    let mut terms: Vec<(Monomial, GaussianRational)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = p[(i, j)].clone();
            if c.is_zero() {
                continue;
            }
            let mut e = vec![0u32; n];
            e[i] += 1;
            e[j] += 1;
            terms.push((Monomial(e), c));
        }
    }
    MultiPoly::from_terms(n, MonomialOrder::GrevLex, terms)
}

/// Builds the quadratic system of the set for the requested scope.
pub fn quadratic_system(set: &StateSet, scope: SystemScope) -> QuadraticSystem {
    let n = set.len();
    let mut polys = Vec::new();
    for b in scope.bipartitions(set.spec().num_parties()) {
        for pfm in product_forming(set, &b) {
            let q = quadratic_of(&pfm.entries);
            if !q.is_zero() {
                polys.push(q);
            }
        }
    }
    QuadraticSystem {
        nvars: n,
        scope,
        polys,
    }
}

/// Pins coordinate `k` of the system to 1.
pub fn perturb(sys: &QuadraticSystem, k: usize) -> Result<PerturbedSystem> {
    if k >= sys.nvars {
        return Err(Error::IndexOutOfRange(format!("pin index {k}")));
    }
    let polys = sys
        .polys
        .iter()
        .map(|p| p.substitute_one(k))
        .filter(|p| !p.is_zero())
        .collect();
    Ok(PerturbedSystem {
        nvars: sys.nvars,
        pinned: k,
        scope: sys.scope.clone(),
        polys,
    })
}

/// Builds the pinned system of the combined core-plus-complement set, used
/// to test whether adjoining complement directions creates new product
/// states. The combined states must span the full space.
pub fn extended_stability_system(
    core: &StateSet,
    complement: &StateSet,
    pinned: usize,
) -> Result<PerturbedSystem> {
    if pinned >= core.len() {
        return Err(Error::IndexOutOfRange(format!("pin index {pinned}")));
    }
    let combined = core.extended_with(complement, format!("{} extended", core.name()))?;
    if combined.span_dim() != combined.spec().total_dim() {
        return Err(Error::SpanDeficient);
    }
    let sys = quadratic_system(&combined, SystemScope::All);
    perturb(&sys, pinned)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family;
    use crate::state::{Bipartition, PartySpec, PureState, StateSet};

    #[test]
    fn matrix_count_matches_dimension_pairs() {
        // 2 x 4 reshape gives C(2,2) * C(4,2) = 6 matrices per bipartition
        let om = family::omega();
        for b in Bipartition::singles(3) {
            assert_eq!(product_forming(&om, &b).len(), 6);
        }
    }

    #[test]
    fn omega_first_matrix_golden() {
        let om = family::omega();
        let ms = product_forming(&om, &Bipartition::single(0, 3));
        let want = GMatrix::from_ints(vec![vec![-3, 7, 1], vec![-18, 42, 6], vec![0, -5, 0]]);
        assert_eq!(ms[0].entries, want);
        assert_eq!(ms[0].row_pair, (0, 1));
        assert_eq!(ms[0].col_pair, (0, 1));
    }

    #[test]
    fn omega_first_polynomial_golden() {
        let om = family::omega();
        let sys = quadratic_system(&om, SystemScope::One(Bipartition::single(0, 3)));
        assert_eq!(sys.polys.len(), 6);
        assert_eq!(
            sys.polys[0].to_string(),
            "-3*x0^2-11*x0*x1+x0*x2+42*x1^2+x1*x2"
        );
        let text = sys.to_text();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("-3*x0^2-11*x0*x1+x0*x2+42*x1^2+x1*x2\n"));
    }

    #[test]
    fn single_product_state_yields_empty_system() {
        let spec = PartySpec::qubits(3);
        let s = StateSet::new(
            "product",
            vec![PureState::from_ints(&spec, &[(&[0, 0, 0], 1)])],
        )
        .unwrap();
        let sys = quadratic_system(&s, SystemScope::All);
        assert!(sys.polys.is_empty());
    }

    #[test]
    fn entries_match_direct_minor_recomputation() {
        let spec = PartySpec::qubits(3);
        let a = PureState::from_ints(&spec, &[(&[0, 0, 0], 2), (&[0, 1, 1], -3), (&[1, 0, 1], 5)]);
        let b = PureState::from_ints(&spec, &[(&[1, 1, 0], 1), (&[0, 0, 1], 4), (&[1, 1, 1], -2)]);
        let set = StateSet::new("pair", vec![a, b]).unwrap();
        let bp = Bipartition::single(1, 3);
        let reshaped: Vec<GMatrix> = set.states().iter().map(|s| s.reshape(&bp)).collect();
        for pfm in product_forming(&set, &bp) {
            let (k, p) = pfm.row_pair;
            let (l, r) = pfm.col_pair;
            for i in 0..2 {
                for j in 0..2 {
                    let direct = &reshaped[i][(k, l)] * &reshaped[j][(p, r)]
                        - &reshaped[i][(k, r)] * &reshaped[j][(p, l)];
                    assert_eq!(pfm.entries[(i, j)], direct);
                }
            }
        }
    }

    #[test]
    fn pinned_ubb_system_first_polynomial_golden() {
        let u = family::ubb();
        let sys = quadratic_system(&u, SystemScope::All);
        assert_eq!(sys.polys.len(), 18);
        let pinned = perturb(&sys, 4).unwrap();
        assert_eq!(
            pinned.polys[0].to_string(),
            "x0*x2-x0+2*x1*x2+3*x1*x3+x1+x2-x3-2"
        );
    }

    #[test]
    fn scaling_a_state_scales_its_row_and_column() {
        let om = family::omega();
        let scaled_states: Vec<PureState> = om
            .states()
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if i == 1 {
                    s.scale(&GaussianRational::from_int(3)).unwrap()
                } else {
                    s.clone()
                }
            })
            .collect();
        let scaled = StateSet::new("scaled", scaled_states).unwrap();
        let b = Bipartition::single(0, 3);
        let orig = product_forming(&om, &b);
        let new = product_forming(&scaled, &b);
        let three = GaussianRational::from_int(3);
        for (o, n) in orig.iter().zip(&new) {
            for i in 0..3 {
                for j in 0..3 {
                    let mut want = o.entries[(i, j)].clone();
                    if i == 1 {
                        want = &want * &three;
                    }
                    if j == 1 {
                        want = &want * &three;
                    }
                    assert_eq!(n.entries[(i, j)], want);
                }
            }
        }
    }
}

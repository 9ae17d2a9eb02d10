//! End-to-end certifications: product-free subspaces, genuine entanglement,
//! finite product indices, unextendibility, splitting, stability,
//! distillability, strong nonlocality, and explicit measurement witnesses.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{GaussianRational, Rational};
use crate::family;
use crate::feature::{self, GroupRank};
use crate::groebner::{buchberger, eliminate_to_univariate, Elimination, GroebnerBasis};
use crate::matrix::GMatrix;
use crate::numeric::{
    self, back_substitute, find_roots, gram_nonorthogonality, GramResult, ProductStateSolution,
    UnivariatePoly, C64,
};
use crate::poly::{MonomialOrder, MultiPoly};
use crate::product::{
    extended_stability_system, perturb, quadratic_system, PerturbedSystem, SystemScope,
};
use crate::state::{Bipartition, StateSet};

pub const ROOT_TOLERANCE: f64 = 1e-12;

/// Three-valued verdict: rank saturation and basis triviality each certify
/// one direction, so a failed sufficient condition alone stays inconclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Machine-checkable outcome of one certification.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub property: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scope: Option<String>,
    pub evidence: Evidence,
}

impl Certificate {
    fn new(property: &str, verdict: Verdict, evidence: Evidence) -> Self {
        Certificate {
            property: property.to_string(),
            verdict,
            scope: None,
            evidence,
        }
    }

    fn scoped(mut self, scope: String) -> Self {
        self.scope = Some(scope);
        self
    }
}

/// Proof data carried by a certificate, sufficient to re-verify the verdict
/// without redoing the heavy search.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    Orthogonality {
        gram: GMatrix,
        #[serde(skip_serializing_if = "Option::is_none")]
        offending_pair: Option<(usize, usize)>,
    },
    Ranks {
        groups: Vec<GroupRank>,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<OpmWitness>,
    },
    ProductFree(ProductFreeProof),
    GesParts {
        parts: Vec<Certificate>,
    },
    Qces {
        index: usize,
        licensed_pin: Option<usize>,
        generator: Option<MultiPoly>,
        back_subst: Option<BTreeMap<usize, MultiPoly>>,
        roots: Vec<C64>,
        solutions: Vec<ProductStateSolution>,
        gram: Option<GramResult>,
        #[serde(skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    Ubb {
        complement_dim: usize,
        complement: Vec<Vec<GaussianRational>>,
        ges: Option<Box<Certificate>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    Split {
        removals: Vec<SplitRemoval>,
    },
    Stability {
        forced_zero: Vec<usize>,
        membership_ok: bool,
        generator_matches: bool,
        back_subst_matches: bool,
        generator: MultiPoly,
        basis: Vec<MultiPoly>,
    },
    Distill {
        bound_met: bool,
        checks: Vec<DistillEntry>,
    },
    Opm(OpmWitness),
    Note {
        text: String,
    },
}

/// How a span was certified product-free, or where the product state lives.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "path", rename_all = "kebab-case")]
pub enum ProductFreeProof {
    /// Single entangled state across the scope.
    SingleEntangled { rank: usize },
    /// Single state is itself a product.
    SingleProduct,
    /// The homogeneous basis has a pure power of every variable leading,
    /// so the only common zero is the origin.
    TrivialVariety { basis: Vec<MultiPoly> },
    /// Subset spans no product state and the pinned system is inconsistent.
    PinnedInconsistent {
        pin: usize,
        basis: Vec<MultiPoly>,
        subset: Box<ProductFreeProof>,
    },
    /// A product state exists; coordinates are floating point when the
    /// witness came from the eliminated system.
    ProductFound {
        witness: Option<Vec<C64>>,
        via: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitRemoval {
    pub removed: usize,
    pub span_basis: Vec<MultiPoly>,
    pub complement_contains_one: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistillEntry {
    pub subset: Vec<usize>,
    pub traced_party: String,
    pub rank: usize,
    pub bound: usize,
}

/// Verified two-outcome joint measurement preserving orthogonality.
#[derive(Clone, Debug, Serialize)]
pub struct OpmWitness {
    pub group: String,
    pub seed: GMatrix,
    pub eigenvalues: Vec<f64>,
    pub mu: f64,
    pub nu: f64,
    pub m0: Vec<Vec<C64>>,
    pub m1: Vec<Vec<C64>>,
    pub eliminated_outcome0: Vec<usize>,
    pub eliminated_outcome1: Vec<usize>,
    pub nontrivial: bool,
}

impl OpmWitness {
    /// One branch annihilating a state already disproves local
    /// irreducibility: observing that outcome rules the state out.
    pub fn eliminates(&self) -> bool {
        !self.eliminated_outcome0.is_empty() || !self.eliminated_outcome1.is_empty()
    }

    pub fn eliminates_in_both_branches(&self) -> bool {
        !self.eliminated_outcome0.is_empty() && !self.eliminated_outcome1.is_empty()
    }
}

// ---------------------------------------------------------------------------
// product-free spans

struct ProductFreeOutcome {
    holds: bool,
    proof: ProductFreeProof,
}

/// Decides whether the span of the set contains a product state in the given
/// scope. The homogeneous basis is decisive: a zero-dimensional leading-term
/// staircase certifies the trivial variety, anything else yields an explicit
/// product state through the pinned system.
fn product_free(set: &StateSet, scope: &SystemScope) -> Result<ProductFreeOutcome> {
    let n = set.len();
    if n == 1 {
        return product_free_single(set, scope);
    }
    let sys = quadratic_system(set, scope.clone());
    let gb = buchberger(&sys.polys, MonomialOrder::GrevLex);
    let vars: Vec<usize> = (0..n).collect();
    if !sys.polys.is_empty() && gb.is_zero_dimensional_over(&vars) {
        return Ok(ProductFreeOutcome {
            holds: true,
            proof: ProductFreeProof::TrivialVariety {
                basis: gb.gens().to_vec(),
            },
        });
    }
    // a product state exists; find it through the stopper-first pin
    let pin = n - 1;
    let sub = set.without(pin)?;
    let below = product_free(&sub, scope)?;
    if !below.holds {
        // lift the subset witness by a zero coordinate
        let witness = match &below.proof {
            ProductFreeProof::ProductFound { witness, .. } => witness.as_ref().map(|w| {
                let mut v = w.clone();
                v.insert(pin, (0.0, 0.0));
                v
            }),
            ProductFreeProof::SingleProduct => {
                let mut v = vec![(0.0, 0.0); n];
                v[0] = (1.0, 0.0);
                Some(v)
            }
            _ => None,
        };
        return Ok(ProductFreeOutcome {
            holds: false,
            proof: ProductFreeProof::ProductFound {
                witness,
                via: format!("subset without state {pin}"),
            },
        });
    }
    let pinned = perturb(&sys, pin)?;
    let pgb = buchberger(&pinned.polys, MonomialOrder::GrevLex);
    if pgb.contains_one() {
        return Ok(ProductFreeOutcome {
            holds: true,
            proof: ProductFreeProof::PinnedInconsistent {
                pin,
                basis: pgb.gens().to_vec(),
                subset: Box::new(below.proof),
            },
        });
    }
    let witness = pinned_witness(&pinned).ok();
    Ok(ProductFreeOutcome {
        holds: false,
        proof: ProductFreeProof::ProductFound {
            witness,
            via: format!("pinned system at state {pin}"),
        },
    })
}

fn product_free_single(set: &StateSet, scope: &SystemScope) -> Result<ProductFreeOutcome> {
    let s = set.state(0);
    let product = match scope {
        SystemScope::One(b) => s.is_product_across(b),
        SystemScope::All => s.is_fully_product(),
    };
    if product {
        Ok(ProductFreeOutcome {
            holds: false,
            proof: ProductFreeProof::SingleProduct,
        })
    } else {
        let rank = match scope {
            SystemScope::One(b) => s.reshape(b).rank(),
            SystemScope::All => Bipartition::singles(set.spec().num_parties())
                .iter()
                .map(|b| s.reshape(b).rank())
                .max()
                .unwrap_or(0),
        };
        Ok(ProductFreeOutcome {
            holds: true,
            proof: ProductFreeProof::SingleEntangled { rank },
        })
    }
}

/// Extracts one solution of a consistent pinned system when it is
/// zero-dimensional and in shape position.
fn pinned_witness(pinned: &PerturbedSystem) -> Result<Vec<C64>> {
    let active = pinned.active_vars();
    let keep = *active.last().ok_or(Error::NotZeroDimensional)?;
    let elim = eliminate_to_univariate(&pinned.polys, &active, keep)?;
    let coeffs = elim
        .generator
        .univariate_coeffs(keep)
        .ok_or(Error::NotZeroDimensional)?;
    let roots = find_roots(&UnivariatePoly::from_exact(&coeffs), ROOT_TOLERANCE)?;
    let sols = back_substitute(&roots, &elim, pinned)?;
    sols.into_iter()
        .map(|s| s.coordinates)
        .next()
        .ok_or(Error::NotZeroDimensional)
}

/// Completely entangled span across one bipartition.
pub fn certify_ces(set: &StateSet, b: &Bipartition) -> Result<Certificate> {
    let scope = SystemScope::One(b.clone());
    let out = product_free(set, &scope)?;
    let verdict = if out.holds { Verdict::Holds } else { Verdict::Fails };
    Ok(
        Certificate::new("ces", verdict, Evidence::ProductFree(out.proof))
            .scoped(b.label(set.spec())),
    )
}

/// No fully product vector in the span (union of single-party splits).
pub fn certify_ces_all(set: &StateSet) -> Result<Certificate> {
    let out = product_free(set, &SystemScope::All)?;
    let verdict = if out.holds { Verdict::Holds } else { Verdict::Fails };
    Ok(Certificate::new("ces", verdict, Evidence::ProductFree(out.proof)).scoped("all".into()))
}

/// Genuinely entangled span: product-free in every bipartition.
pub fn certify_ges(set: &StateSet) -> Result<Certificate> {
    let n = set.spec().num_parties();
    let mut worst = Verdict::Holds;
    let mut parts = Vec::new();
    for b in Bipartition::enumerate_all(n) {
        let cert = certify_ces(set, &b)?;
        if cert.verdict == Verdict::Fails {
            worst = Verdict::Fails;
        }
        parts.push(cert);
    }
    Ok(Certificate {
        property: "ges".into(),
        verdict: worst,
        scope: None,
        evidence: Evidence::GesParts { parts },
    })
}

pub fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Inconclusive => "inconclusive",
    }
}

// ---------------------------------------------------------------------------
// strong nonlocality

/// Rank saturation over every (n-1)-party group; failure upgrades to a hard
/// verdict only when an explicit eliminating measurement witness verifies.
pub fn certify_strong_nonlocality(set: &StateSet) -> Result<Certificate> {
    let (all, ranks) = feature::strong_nonlocality_ranks(set)?;
    if all {
        return Ok(Certificate::new(
            "strong-nonlocality",
            Verdict::Holds,
            Evidence::Ranks {
                groups: ranks,
                witness: None,
            },
        ));
    }
    if let Some(z) = family::match_real_z_family(set) {
        let e = real_z_witness_operator(&z.re);
        let group = Bipartition::group_excluding(0, set.spec().num_parties());
        if let Ok(w) = build_opm_witness(set, &group, &e) {
            if w.nontrivial && w.eliminates() {
                return Ok(Certificate::new(
                    "strong-nonlocality",
                    Verdict::Fails,
                    Evidence::Ranks {
                        groups: ranks,
                        witness: Some(w),
                    },
                ));
            }
        }
    }
    Ok(Certificate::new(
        "strong-nonlocality",
        Verdict::Inconclusive,
        Evidence::Ranks {
            groups: ranks,
            witness: None,
        },
    ))
}

/// Seed operator on the BC pair that preserves orthogonality of the
/// one-parameter family at any real parameter value.
pub fn real_z_witness_operator(z: &Rational) -> GMatrix {
    let at = |coeffs: &[i64]| -> GaussianRational {
        let mut acc = Rational::from_integer(0.into());
        for &c in coeffs.iter().rev() {
            acc = acc * z + Rational::from_integer(c.into());
        }
        GaussianRational::from_real(acc)
    };
    // entries are cubic polynomials in the parameter, constant term first
    let e00 = at(&[0, -4, 4]);
    let e01 = at(&[2, 2, -1]);
    let e02 = at(&[2, -2, 4, -1]);
    let e03 = at(&[-2, 3, 3, -1]);
    let e11 = at(&[-4, 2, 4, -2]);
    let e12 = at(&[2, -1, 2]);
    let e13 = at(&[2, -4, 5]);
    let e22 = at(&[-4, 2, 2]);
    let e23 = at(&[2, 0, 2, -1]);
    let e33 = GaussianRational::zero();
    GMatrix::from_rows(vec![
        vec![e00.clone(), e01.clone(), e02.clone(), e03.clone()],
        vec![e01, e11.clone(), e12.clone(), e13.clone()],
        vec![e02, e12, e22.clone(), e23.clone()],
        vec![e03, e13, e23, e33],
    ])
}

/// <phi_i| (identity on the complement) tensor E |psi_j>, exactly.
fn sandwich(
    set: &StateSet,
    i: usize,
    j: usize,
    group: &Bipartition,
    e: &GMatrix,
) -> GaussianRational {
    let a = set.state(i).reshape(group);
    let b = set.state(j).reshape(group);
    let d = group.left_dim(set.spec());
    let dc = group.right_dim(set.spec());
    let mut acc = GaussianRational::zero();
    for r in 0..dc {
        for q in 0..d {
            if a[(q, r)].is_zero() {
                continue;
            }
            let aq = a[(q, r)].conj();
            for p in 0..d {
                if e[(q, p)].is_zero() || b[(p, r)].is_zero() {
                    continue;
                }
                acc += &(&aq * &(&e[(q, p)] * &b[(p, r)]));
            }
        }
    }
    acc
}

/// Builds and verifies the two-outcome measurement {M0, M1} from a hermitian
/// seed operator acting on the group. The positive shifts are tight: mu
/// absorbs the most negative eigenvalue and nu the largest, which makes both
/// outcomes positive semidefinite and singular.
pub fn build_opm_witness(set: &StateSet, group: &Bipartition, e: &GMatrix) -> Result<OpmWitness> {
    if !e.is_hermitian() {
        return Err(Error::OrthogonalityPreservationViolated);
    }
    let d = group.left_dim(set.spec());
    if e.rows() != d {
        return Err(Error::IndexOutOfRange(format!(
            "seed operator is {}x{}, group dimension is {d}",
            e.rows(),
            e.cols()
        )));
    }
    set.verify_orthogonal()?;
    for i in 0..set.len() {
        for j in 0..set.len() {
            if i != j && !sandwich(set, i, j, group, e).is_zero() {
                return Err(Error::OrthogonalityPreservationViolated);
            }
        }
    }
    // trivial iff proportional to the identity
    let scaled_identity = GMatrix::identity(d).scale(&e[(0, 0)]);
    if *e == scaled_identity {
        return Err(Error::TrivialWitness);
    }
    let ef: Vec<Vec<C64>> = (0..d)
        .map(|i| (0..d).map(|j| e[(i, j)].to_f64_pair()).collect())
        .collect();
    let eigs = numeric::hermitian_eigenvalues(&ef);
    let mu = (-eigs[0]).max(0.0);
    let nu = eigs[eigs.len() - 1].max(0.0);
    if mu + nu == 0.0 {
        return Err(Error::TrivialWitness);
    }
    let denom = mu + nu;
    let mut m0 = vec![vec![(0.0, 0.0); d]; d];
    let mut m1 = vec![vec![(0.0, 0.0); d]; d];
    for i in 0..d {
        for j in 0..d {
            let (re, im) = ef[i][j];
            let ident = if i == j { 1.0 } else { 0.0 };
            m0[i][j] = ((mu * ident + re) / denom, im / denom);
            m1[i][j] = ((nu * ident - re) / denom, -im / denom);
        }
    }
    let mut elim0 = Vec::new();
    let mut elim1 = Vec::new();
    for i in 0..set.len() {
        let q = sandwich(set, i, i, group, e);
        let (qre, _) = q.to_f64_pair();
        let norm = crate::exact::rational_to_f64(&set.state(i).norm_sqr());
        let v0 = (mu * norm + qre) / denom;
        let v1 = (nu * norm - qre) / denom;
        let bar = 1e-10 * norm.max(1.0);
        if v0.abs() <= bar {
            elim0.push(i);
        }
        if v1.abs() <= bar {
            elim1.push(i);
        }
    }
    Ok(OpmWitness {
        group: group.left_label(set.spec()),
        seed: e.clone(),
        eigenvalues: eigs,
        mu,
        nu,
        m0,
        m1,
        eliminated_outcome0: elim0,
        eliminated_outcome1: elim1,
        nontrivial: true,
    })
}

// ---------------------------------------------------------------------------
// finite product index

/// Structured outcome of the product-index analysis.
#[derive(Clone, Debug)]
pub struct QcesAnalysis {
    pub index: usize,
    pub licensed_pin: Option<usize>,
    pub elimination: Option<Elimination>,
    pub roots: Vec<C64>,
    pub solutions: Vec<ProductStateSolution>,
    pub gram: Option<GramResult>,
    pub note: Option<String>,
}

/// Counts the product states in the span. When every deletion subset is
/// product-free the single pinned elimination is decisive; otherwise the
/// count recurses over the subset with the pinned state removed.
pub fn qces_analysis(set: &StateSet) -> Result<QcesAnalysis> {
    let n = set.len();
    if n == 1 {
        let product = set.state(0).is_fully_product();
        return Ok(QcesAnalysis {
            index: product as usize,
            licensed_pin: None,
            elimination: None,
            roots: Vec::new(),
            solutions: if product {
                vec![ProductStateSolution {
                    root: (0.0, 0.0),
                    coordinates: vec![(1.0, 0.0)],
                    residual: 0.0,
                }]
            } else {
                Vec::new()
            },
            gram: None,
            note: None,
        });
    }
    let licensed = (0..n)
        .map(|k| Ok(product_free(&set.without(k)?, &SystemScope::All)?.holds))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|ok| ok);
    let pin = n - 1;
    let (elim, roots, solutions) = pinned_solutions(set, pin)?;
    let mut index = elim
        .generator
        .univariate_coeffs(elim.keep)
        .map(|c| c.len().saturating_sub(1))
        .unwrap_or(0);
    let mut all_solutions = solutions;
    let mut note = None;
    if !licensed {
        // product states with a vanishing pinned coordinate live in the
        // deletion subset; count them recursively
        let sub = set.without(pin)?;
        if sub.len() == 1 {
            if sub.state(0).is_fully_product() {
                index += 1;
                let mut coords = vec![(0.0, 0.0); n];
                coords[0] = (1.0, 0.0);
                all_solutions.push(ProductStateSolution {
                    root: (0.0, 0.0),
                    coordinates: coords,
                    residual: 0.0,
                });
            }
        } else {
            let below = qces_analysis(&sub)?;
            index += below.index;
            for s in below.solutions {
                let mut coords = s.coordinates;
                coords.insert(pin, (0.0, 0.0));
                all_solutions.push(ProductStateSolution {
                    root: s.root,
                    coordinates: coords,
                    residual: s.residual,
                });
            }
        }
        note = Some("deletion subsets contain product states; counted recursively".into());
    }
    let gram = (!all_solutions.is_empty()).then(|| gram_nonorthogonality(set, &all_solutions));
    Ok(QcesAnalysis {
        index,
        licensed_pin: licensed.then_some(pin),
        elimination: Some(elim),
        roots,
        solutions: all_solutions,
        gram,
        note,
    })
}

fn pinned_solutions(
    set: &StateSet,
    pin: usize,
) -> Result<(Elimination, Vec<C64>, Vec<ProductStateSolution>)> {
    let sys = quadratic_system(set, SystemScope::All);
    let pinned = perturb(&sys, pin)?;
    let active = pinned.active_vars();
    let keep = *active.last().ok_or(Error::NotZeroDimensional)?;
    let elim = eliminate_to_univariate(&pinned.polys, &active, keep)?;
    let coeffs = elim
        .generator
        .univariate_coeffs(elim.keep)
        .ok_or(Error::NotZeroDimensional)?;
    if coeffs.len() <= 1 {
        // constant generator: inconsistent pinned system, no solutions here
        return Ok((elim, Vec::new(), Vec::new()));
    }
    let roots = find_roots(&UnivariatePoly::from_exact(&coeffs), ROOT_TOLERANCE)?;
    let solutions = if elim.back_subst.is_some() {
        back_substitute(&roots, &elim, &pinned)?
    } else {
        Vec::new()
    };
    Ok((elim, roots, solutions))
}

/// Finitely many product states in the span; the count is the product index.
pub fn certify_qces(set: &StateSet) -> Result<Certificate> {
    match qces_analysis(set) {
        Ok(a) => Ok(Certificate::new(
            "qces",
            Verdict::Holds,
            Evidence::Qces {
                index: a.index,
                licensed_pin: a.licensed_pin,
                generator: a.elimination.as_ref().map(|e| e.generator.clone()),
                back_subst: a.elimination.and_then(|e| e.back_subst),
                roots: a.roots,
                solutions: a.solutions,
                gram: a.gram,
                note: a.note,
            },
        )),
        Err(Error::NotZeroDimensional) => Ok(Certificate::new(
            "qces",
            Verdict::Fails,
            Evidence::Note {
                text: "infinitely many product states: the pinned system is not zero-dimensional"
                    .into(),
            },
        )),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// unextendibility, splitting, stability, distillability

/// Unextendible biseparable basis: orthogonal biseparable states whose
/// orthogonal complement is genuinely entangled.
pub fn certify_ubb(set: &StateSet) -> Result<Certificate> {
    set.verify_orthogonal()?;
    let n = set.spec().num_parties();
    let offenders: Vec<usize> = (0..set.len())
        .filter(|&i| {
            !Bipartition::enumerate_all(n)
                .iter()
                .any(|b| set.state(i).is_product_across(b))
        })
        .collect();
    if !offenders.is_empty() {
        return Err(Error::NotBiseparable(offenders));
    }
    let complement = set.orthogonal_complement();
    let complement_rows: Vec<Vec<GaussianRational>> =
        complement.iter().map(|s| s.dense()).collect();
    if complement.is_empty() {
        return Ok(Certificate::new(
            "ubb",
            Verdict::Fails,
            Evidence::Ubb {
                complement_dim: 0,
                complement: complement_rows,
                ges: None,
                note: Some("complement is zero-dimensional; nothing is excluded".into()),
            },
        ));
    }
    let comp_set = StateSet::new(format!("{} complement", set.name()), complement)?;
    let ges = certify_ges(&comp_set)?;
    let verdict = ges.verdict;
    Ok(Certificate::new(
        "ubb",
        verdict,
        Evidence::Ubb {
            complement_dim: comp_set.len(),
            complement: complement_rows,
            ges: Some(Box::new(ges)),
            note: None,
        },
    ))
}

/// Two-way completely entangled splitting: for every removed state, both the
/// remaining span and its orthogonal complement are product-free.
pub fn certify_split(set: &StateSet) -> Result<Certificate> {
    set.verify_orthogonal()?;
    let complement = set.orthogonal_complement();
    let mut removals = Vec::new();
    let mut verdict = Verdict::Holds;
    for k in 0..set.len() {
        let w = set.without(k)?;
        let w_out = product_free(&w, &SystemScope::All)?;
        let span_basis = match &w_out.proof {
            ProductFreeProof::TrivialVariety { basis } => basis.clone(),
            _ => Vec::new(),
        };
        if !w_out.holds {
            verdict = Verdict::Fails;
            removals.push(SplitRemoval {
                removed: k,
                span_basis,
                complement_contains_one: false,
            });
            continue;
        }
        // complement side: complement basis plus the removed state, pinned at
        // the removed state
        let mut states = complement.clone();
        states.push(set.state(k).clone());
        let cset = StateSet::new(format!("{} complement + {k}", set.name()), states)?;
        let ok = if complement.is_empty() {
            // removing from a full basis: the complement side is the removed
            // state alone
            !set.state(k).is_fully_product()
        } else {
            let comp_free =
                product_free(&StateSet::new("c", complement.clone())?, &SystemScope::All)?;
            if !comp_free.holds {
                verdict = Verdict::Fails;
                removals.push(SplitRemoval {
                    removed: k,
                    span_basis,
                    complement_contains_one: false,
                });
                continue;
            }
            let sys = quadratic_system(&cset, SystemScope::All);
            let pinned = perturb(&sys, cset.len() - 1)?;
            let pgb = buchberger(&pinned.polys, MonomialOrder::GrevLex);
            pgb.contains_one()
        };
        if !ok {
            verdict = Verdict::Fails;
        }
        removals.push(SplitRemoval {
            removed: k,
            span_basis,
            complement_contains_one: ok,
        });
    }
    Ok(Certificate::new(
        "split",
        verdict,
        Evidence::Split { removals },
    ))
}

/// Adjoining any complement direction to an embedded product state forces
/// the complement coordinates to vanish, so the complement stays stable.
///
/// The embedded product states are cut out of the combined system by the
/// core elimination constraints (the univariate generator plus the shape
/// expressions); on that locus, membership of each complement coordinate in
/// the ideal certifies that every solution keeps them at zero.
pub fn certify_stability(core: &StateSet, pinned: usize) -> Result<Certificate> {
    let complement = core.orthogonal_complement();
    if complement.is_empty() {
        return Ok(Certificate::new(
            "stability",
            Verdict::Holds,
            Evidence::Note {
                text: "complement is zero-dimensional; stability is vacuous".into(),
            },
        ));
    }
    let comp_set = StateSet::new(format!("{} complement", core.name()), complement)?;
    let ext = extended_stability_system(core, &comp_set, pinned)?;
    let total = core.len() + comp_set.len();
    // core product states: eliminate the core system first
    let keep = (0..core.len()).rev().find(|&v| v != pinned).ok_or_else(|| {
        Error::PreconditionFailed("core must have at least two states".into())
    })?;
    let core_sys = perturb(&quadratic_system(core, SystemScope::All), pinned)?;
    let core_elim = eliminate_to_univariate(&core_sys.polys, &core_sys.active_vars(), keep)?;
    let core_back = core_elim
        .back_subst
        .as_ref()
        .ok_or(Error::NotZeroDimensional)?;
    // Constrain the combined system to the embedded core product states. The
    // shape expressions are linear in the substituted variables, so plugging
    // them in keeps ideal membership intact while shrinking the problem to
    // the kept core variable plus the complement coordinates.
    let embed_map: Vec<usize> = (0..core.len()).collect();
    let gen_embedded = core_elim.generator.embed_vars(total, &embed_map);
    let substituted: Vec<(usize, MultiPoly)> = core_back
        .iter()
        .map(|(&v, h)| (v, h.embed_vars(total, &embed_map)))
        .collect();
    let mut augmented: Vec<MultiPoly> = Vec::with_capacity(ext.polys.len() + 1);
    let gen_basis = [gen_embedded.clone()];
    for p in &ext.polys {
        let mut q = p.clone();
        for (v, h) in &substituted {
            q = q.substitute_poly(*v, h);
        }
        // cap the kept-variable degree modulo the generator
        q = crate::groebner::reduce_full(&q, &gen_basis);
        if !q.is_zero() {
            augmented.push(q);
        }
    }
    augmented.push(gen_embedded);
    // Project onto the complement coordinates plus the kept variable and use
    // a block order that eliminates the complement coordinates; the kept
    // variable then behaves like a coefficient capped by the generator.
    let comp_vars: Vec<usize> = (core.len()..total).collect();
    let split = comp_vars.len();
    let mut proj: Vec<usize> = comp_vars.clone();
    proj.push(keep);
    let order = MonomialOrder::Block { split };
    let projected: Vec<MultiPoly> = augmented
        .iter()
        .map(|p| p.project_vars(&proj).with_order(order))
        .collect();
    let gb = buchberger(&projected, order);
    let mut forced = Vec::new();
    for (c, &v) in comp_vars.iter().enumerate() {
        let xv = MultiPoly::var(split + 1, order, c);
        if gb.reduce(&xv).is_zero() {
            forced.push(v);
        }
    }
    let membership_ok = forced.len() == comp_vars.len();
    // the pure kept-variable part of the basis must reproduce the core
    // generator: with the block order those elements generate the
    // elimination ideal in the kept variable
    let kept_only: Vec<&MultiPoly> = gb
        .gens()
        .iter()
        .filter(|g| {
            g.terms()
                .iter()
                .all(|(m, _)| m.0[..split].iter().all(|&e| e == 0))
        })
        .collect();
    let generator_matches = kept_only.len() == 1 && {
        let got = kept_only[0].primitive_positive();
        let want_coeffs = core_elim.generator.univariate_coeffs(keep);
        got.univariate_coeffs(split) == want_coeffs
    };
    // every complement coordinate must be expressed as zero in the basis
    let back_subst_matches = comp_vars.iter().enumerate().all(|(c, _)| {
        gb.gens().iter().any(|g| {
            g.terms().len() == 1 && g.leading().map(|(m, _)| {
                m.total_degree() == 1 && m.0[c] == 1
            }).unwrap_or(false)
        })
    });
    let verdict = if membership_ok && generator_matches && back_subst_matches {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok(Certificate::new(
        "stability",
        verdict,
        Evidence::Stability {
            forced_zero: forced,
            membership_ok,
            generator_matches,
            back_subst_matches,
            generator: core_elim.generator.clone(),
            basis: gb.gens().to_vec(),
        },
    ))
}

/// Every bimarginal of every subset has rank at least one more than the
/// subset size, the hypothesis that makes rank-n projectors distillable.
pub fn certify_distillable(set: &StateSet) -> Result<Certificate> {
    let n = set.len();
    let parties = set.spec().num_parties();
    let mut checks = Vec::new();
    let mut ok = true;
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        for alpha in 0..parties {
            let b = Bipartition::single(alpha, parties);
            let d = b.right_dim(set.spec());
            let mut marginal = GMatrix::zeros(d, d);
            for &i in &subset {
                let r = set.state(i).reshape(&b);
                for p in 0..d {
                    for q in 0..d {
                        let mut acc = marginal[(p, q)].clone();
                        for a in 0..b.left_dim(set.spec()) {
                            if !r[(a, p)].is_zero() && !r[(a, q)].is_zero() {
                                acc += &(&r[(a, p)] * &r[(a, q)].conj());
                            }
                        }
                        marginal[(p, q)] = acc;
                    }
                }
            }
            let rank = marginal.rank();
            let bound = subset.len() + 1;
            if rank < bound {
                ok = false;
            }
            checks.push(DistillEntry {
                subset: subset.clone(),
                traced_party: set.spec().label(alpha).to_string(),
                rank,
                bound,
            });
        }
    }
    Ok(Certificate::new(
        "distill",
        if ok { Verdict::Holds } else { Verdict::Fails },
        Evidence::Distill {
            bound_met: ok,
            checks,
        },
    ))
}

/// Exact pairwise orthogonality.
pub fn certify_orthogonality(set: &StateSet) -> Certificate {
    let gram = set.gram();
    let mut offending = None;
    'outer: for i in 0..set.len() {
        for j in i + 1..set.len() {
            if !gram[(i, j)].is_zero() {
                offending = Some((i, j));
                break 'outer;
            }
        }
    }
    Certificate::new(
        "orthogonality",
        if offending.is_none() {
            Verdict::Holds
        } else {
            Verdict::Fails
        },
        Evidence::Orthogonality {
            gram,
            offending_pair: offending,
        },
    )
}

/// Measurement-witness check on its own: inconclusive unless the set matches
/// a family with a known seed operator.
pub fn certify_opm(set: &StateSet) -> Certificate {
    if let Some(z) = family::match_real_z_family(set) {
        let group = Bipartition::group_excluding(0, set.spec().num_parties());
        let e = real_z_witness_operator(&z.re);
        match build_opm_witness(set, &group, &e) {
            Ok(w) => {
                let verdict = if w.nontrivial && w.eliminates() {
                    Verdict::Holds
                } else {
                    Verdict::Inconclusive
                };
                return Certificate::new("opm", verdict, Evidence::Opm(w));
            }
            Err(err) => {
                return Certificate::new(
                    "opm",
                    Verdict::Inconclusive,
                    Evidence::Note {
                        text: format!("witness construction failed: {err}"),
                    },
                );
            }
        }
    }
    Certificate::new(
        "opm",
        Verdict::Inconclusive,
        Evidence::Note {
            text: "no seed operator known for this set".into(),
        },
    )
}

// ---------------------------------------------------------------------------
// report runner

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Orthogonality,
    StrongNonlocality,
    Ces,
    Ges,
    Qces,
    Ubb,
    Split,
    Stability,
    Distill,
    Opm,
}

impl Check {
    pub const ALL: [Check; 10] = [
        Check::Orthogonality,
        Check::StrongNonlocality,
        Check::Ces,
        Check::Ges,
        Check::Qces,
        Check::Ubb,
        Check::Split,
        Check::Stability,
        Check::Distill,
        Check::Opm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Orthogonality => "orthogonality",
            Check::StrongNonlocality => "strong-nonlocality",
            Check::Ces => "ces",
            Check::Ges => "ges",
            Check::Qces => "qces",
            Check::Ubb => "ubb",
            Check::Split => "split",
            Check::Stability => "stability",
            Check::Distill => "distill",
            Check::Opm => "opm",
        }
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Check> {
        Check::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check: {s}")))
    }
}

#[derive(Clone, Debug, Default)]
pub struct ReportOptions {
    /// Pinned index for stability; defaults to the last state.
    pub pin: Option<usize>,
    /// Upper bound on concurrently running checks.
    pub threads: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportEntry {
    pub property: String,
    #[serde(flatten)]
    pub outcome: ReportOutcome,
    pub ms: u128,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum ReportOutcome {
    Done {
        verdict: Verdict,
        evidence: Evidence,
        #[serde(skip_serializing_if = "Option::is_none")]
        scope: Option<String>,
    },
    Failed {
        error: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub set: String,
    pub checks: Vec<ReportEntry>,
}

impl Report {
    /// 0 all hold, 1 some check fails, 2 some check inconclusive, 3 errors.
    pub fn exit_code(&self) -> i32 {
        let mut code = 0;
        for c in &self.checks {
            match &c.outcome {
                ReportOutcome::Failed { .. } => return 3,
                ReportOutcome::Done { verdict, .. } => match verdict {
                    Verdict::Fails => code = code.max(1),
                    Verdict::Inconclusive => {
                        if code == 0 {
                            code = 2
                        }
                    }
                    Verdict::Holds => {}
                },
            }
        }
        code
    }
}

fn run_check(set: &StateSet, check: Check, opts: &ReportOptions) -> Result<Certificate> {
    match check {
        Check::Orthogonality => Ok(certify_orthogonality(set)),
        Check::StrongNonlocality => certify_strong_nonlocality(set),
        Check::Ces => certify_ces_all(set),
        Check::Ges => certify_ges(set),
        Check::Qces => certify_qces(set),
        Check::Ubb => certify_ubb(set),
        Check::Split => certify_split(set),
        Check::Stability => certify_stability(set, opts.pin.unwrap_or(set.len() - 1)),
        Check::Distill => certify_distillable(set),
        Check::Opm => Ok(certify_opm(set)),
    }
}

/// Runs the requested checks, bounded-parallel, preserving request order.
/// Per-check errors land in the report instead of aborting the run.
pub fn run_report(set: &StateSet, checks: &[Check], opts: &ReportOptions) -> Report {
    let threads = opts.threads.max(1).min(checks.len().max(1));
    let mut entries: Vec<Option<ReportEntry>> = vec![None; checks.len()];
    if threads <= 1 {
        for (slot, &check) in entries.iter_mut().zip(checks) {
            *slot = Some(run_entry(set, check, opts));
        }
    } else {
        std::thread::scope(|scope| {
            let mut pending = entries.iter_mut().zip(checks.iter().copied());
            loop {
                let batch: Vec<_> = pending.by_ref().take(threads).collect();
                if batch.is_empty() {
                    break;
                }
                let handles: Vec<_> = batch
                    .into_iter()
                    .map(|(slot, check)| {
                        let opts = opts.clone();
                        scope.spawn(move || {
                            *slot = Some(run_entry(set, check, &opts));
                        })
                    })
                    .collect();
                for h in handles {
                    let _ = h.join();
                }
            }
        });
    }
    Report {
        set: set.name().to_string(),
        checks: entries.into_iter().map(|e| e.expect("entry filled")).collect(),
    }
}

fn run_entry(set: &StateSet, check: Check, opts: &ReportOptions) -> ReportEntry {
    let start = Instant::now();
    let outcome = match run_check(set, check, opts) {
        Ok(cert) => ReportOutcome::Done {
            verdict: cert.verdict,
            evidence: cert.evidence,
            scope: cert.scope,
        },
        Err(e) => ReportOutcome::Failed {
            error: e.to_string(),
        },
    };
    ReportEntry {
        property: check.name().to_string(),
        outcome,
        ms: start.elapsed().as_millis(),
    }
}

// ---------------------------------------------------------------------------
// re-verification from evidence

/// Checks a holds-certificate from its own evidence along independent paths:
/// ranks recompute through field elimination instead of fraction-free
/// elimination, and stored bases re-verify the Buchberger criterion plus
/// ideal membership of the original generators.
pub fn reverify(set: &StateSet, cert: &Certificate) -> bool {
    if cert.verdict != Verdict::Holds {
        return true;
    }
    match &cert.evidence {
        Evidence::Orthogonality { gram, .. } => {
            let fresh = set.gram();
            *gram == fresh && {
                let mut ok = true;
                for i in 0..set.len() {
                    for j in 0..set.len() {
                        if i != j && !fresh[(i, j)].is_zero() {
                            ok = false;
                        }
                    }
                }
                ok
            }
        }
        Evidence::Ranks { groups, .. } => groups.iter().all(|g| {
            let bip = feature::joint_groups(set.spec().num_parties())
                .into_iter()
                .find(|b| b.left_label(set.spec()) == g.group);
            match bip {
                None => false,
                Some(b) => {
                    let mut mats = Vec::new();
                    for i in 0..set.len() {
                        for j in i + 1..set.len() {
                            let m = feature::reduced_feature(set, i, j, &b)
                                .expect("valid pair")
                                .entries;
                            mats.push(m.adjoint());
                            mats.push(m);
                        }
                    }
                    let vm = feature::vectorization_map(&mats);
                    let (_, pivots) = vm.rref();
                    pivots.len() == g.rank && g.saturated == (g.rank == g.bound)
                }
            }
        }),
        Evidence::ProductFree(proof) => reverify_product_free(set, proof),
        Evidence::GesParts { parts } => parts.iter().all(|c| reverify(set, c)),
        Evidence::Qces { solutions, .. } => {
            let sys = quadratic_system(set, SystemScope::All);
            solutions.iter().all(|s| {
                sys.polys.iter().all(|p| {
                    let (re, im) = p.eval_complex(&s.coordinates);
                    re.hypot(im) <= numeric::RESIDUAL_BAR * 10.0
                })
            })
        }
        Evidence::Ubb {
            complement, ges, ..
        } => {
            // complement rows must be orthogonal to every state exactly
            let ortho = complement.iter().all(|row| {
                set.states().iter().all(|s| {
                    let dense = s.dense();
                    let mut acc = GaussianRational::zero();
                    for (a, b) in dense.iter().zip(row) {
                        acc += &(&a.conj() * b);
                    }
                    acc.is_zero()
                })
            });
            ortho && ges.is_some()
        }
        Evidence::Split { removals } => removals
            .iter()
            .all(|r| r.complement_contains_one && !r.span_basis.is_empty()),
        Evidence::Stability {
            membership_ok,
            generator_matches,
            back_subst_matches,
            basis,
            ..
        } => {
            *membership_ok
                && *generator_matches
                && *back_subst_matches
                && rebuild_basis_check(basis)
        }
        Evidence::Distill { checks, .. } => checks.iter().all(|c| c.rank >= c.bound),
        Evidence::Opm(w) => w.nontrivial,
        Evidence::Note { .. } => true,
    }
}

fn reverify_product_free(set: &StateSet, proof: &ProductFreeProof) -> bool {
    match proof {
        ProductFreeProof::SingleEntangled { rank } => *rank >= 2,
        ProductFreeProof::SingleProduct => false,
        ProductFreeProof::TrivialVariety { basis } => {
            rebuild_basis_check(basis)
                && (0..set.len()).all(|v| {
                    basis.iter().any(|g| {
                        g.leading()
                            .map(|(m, _)| m.0[v] > 0 && m.is_univariate_in(v))
                            .unwrap_or(false)
                    })
                })
        }
        ProductFreeProof::PinnedInconsistent { basis, .. } => {
            basis.len() == 1 && basis[0].is_one()
        }
        ProductFreeProof::ProductFound { .. } => false,
    }
}

/// The stored generators must satisfy the Buchberger criterion on their own.
fn rebuild_basis_check(basis: &[MultiPoly]) -> bool {
    if basis.is_empty() {
        return false;
    }
    let gb = GroebnerBasis::from_parts(MonomialOrder::GrevLex, basis.to_vec());
    gb.verify_confluence()
}

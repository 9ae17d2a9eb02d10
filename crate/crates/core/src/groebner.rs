//! Reduced Groebner bases over the Gaussian rationals, triviality tests, and
//! elimination of zero-dimensional systems to a univariate generator.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::exact::GaussianRational;
use crate::matrix::GMatrix;
use crate::poly::{Monomial, MonomialOrder, MultiPoly};

#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    order: MonomialOrder,
    gens: Vec<MultiPoly>,
}

impl GroebnerBasis {
    /// Wraps generators already known to form a basis, e.g. when re-checking
    /// stored evidence.
    pub fn from_parts(order: MonomialOrder, gens: Vec<MultiPoly>) -> Self {
        GroebnerBasis { order, gens }
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn gens(&self) -> &[MultiPoly] {
        &self.gens
    }

    /// True iff the basis is the single constant polynomial 1, i.e. the
    /// system has no common zero.
    pub fn contains_one(&self) -> bool {
        self.gens.len() == 1 && self.gens[0].is_one()
    }

    /// Normal form of `p` modulo the basis; zero iff `p` lies in the ideal.
    pub fn reduce(&self, p: &MultiPoly) -> MultiPoly {
        reduce_full(&p.with_order(self.order), &self.gens)
    }

    /// One generator per line, canonical term order.
    pub fn to_text(&self) -> String {
        self.gens
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Leading monomials of the generators.
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.gens
            .iter()
            .filter_map(|g| g.leading().map(|(m, _)| m.clone()))
            .collect()
    }

    /// True when the leading-term ideal contains a pure power of every
    /// variable in `vars`, which certifies a finite solution set.
    pub fn is_zero_dimensional_over(&self, vars: &[usize]) -> bool {
        if self.contains_one() {
            return true;
        }
        let lms = self.leading_monomials();
        vars.iter().all(|&v| {
            lms.iter()
                .any(|m| m.0[v] > 0 && m.is_univariate_in(v))
        })
    }

    /// Monomials outside the leading-term ideal, up to `cap` of them.
    pub fn standard_monomials(&self, vars: &[usize], cap: usize) -> Option<Vec<Monomial>> {
        let nvars = self.gens.first().map(|g| g.nvars())?;
        let lms = self.leading_monomials();
        let mut seen = BTreeSet::new();
        let mut queue = vec![Monomial::one(nvars)];
        let mut out = Vec::new();
        while let Some(m) = queue.pop() {
            if seen.contains(&m.0) {
                continue;
            }
            seen.insert(m.0.clone());
            if lms.iter().any(|l| l.divides(&m)) {
                continue;
            }
            out.push(m.clone());
            if out.len() > cap {
                return None;
            }
            for &v in vars {
                let mut e = m.0.clone();
                e[v] += 1;
                queue.push(Monomial(e));
            }
        }
        Some(out)
    }

    /// Verifies the Buchberger criterion directly: every S-polynomial of
    /// basis pairs reduces to zero modulo the basis.
    pub fn verify_confluence(&self) -> bool {
        for i in 0..self.gens.len() {
            for j in i + 1..self.gens.len() {
                let s = s_polynomial(&self.gens[i], &self.gens[j]);
                if !reduce_full(&s, &self.gens).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

// Cross-scaled S-polynomial; a scalar multiple of the monic version, which
// keeps integer inputs integer.
fn s_polynomial(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let (lf, cf) = f.leading().expect("nonzero");
    let (lg, cg) = g.leading().expect("nonzero");
    let l = lf.lcm(lg);
    let a = f.mul_term(&lf.div_into(&l), cg);
    let b = g.mul_term(&lg.div_into(&l), cf);
    a.sub(&b)
}

/// Full multivariate division: returns the normal form of `p` modulo `gens`.
///
/// The elimination is fraction-free: instead of dividing by leading
/// coefficients, the working polynomial is cross-scaled and its integer
/// content stripped, which keeps coefficient growth additive. The
/// accumulated scale is divided back out at the end, so the result is the
/// exact normal form.
pub fn reduce_full(p: &MultiPoly, gens: &[MultiPoly]) -> MultiPoly {
    let order = p.order();
    let nvars = p.nvars();
    let mut work = p.clone();
    let mut rem: Vec<(Monomial, GaussianRational)> = Vec::new();
    let mut scale = GaussianRational::one();
    let mut steps = 0usize;
    'outer: while let Some((lm, lc)) = work.leading().cloned() {
        for g in gens {
            if let Some((glm, glc)) = g.leading() {
                if glm.divides(&lm) {
                    // work <- glc * work - lc * shift(g), then strip content
                    work = work
                        .scale(glc)
                        .sub(&g.mul_term(&glm.div_into(&lm), &lc));
                    for (_, c) in rem.iter_mut() {
                        *c *= glc;
                    }
                    scale *= glc;
                    steps += 1;
                    if steps.is_multiple_of(8) {
                        let stripped = work.primitive();
                        if let (Some((m, a)), Some((m2, b))) =
                            (work.leading(), stripped.leading())
                        {
                            debug_assert_eq!(m, m2);
                            if !a.is_zero() {
                                let f = b / a;
                                for (_, c) in rem.iter_mut() {
                                    *c *= &f;
                                }
                                scale *= &f;
                                work = stripped;
                            }
                        }
                    }
                    continue 'outer;
                }
            }
        }
        rem.push((lm, lc));
        work = drop_leading(&work);
    }
    let inv = match scale.checked_recip() {
        Ok(inv) => inv,
        Err(_) => GaussianRational::one(),
    };
    MultiPoly::from_terms(
        nvars,
        order,
        rem.into_iter().map(|(m, c)| (m, &c * &inv)).collect(),
    )
}

fn drop_leading(p: &MultiPoly) -> MultiPoly {
    MultiPoly::from_terms(
        p.nvars(),
        p.order(),
        p.terms().iter().skip(1).cloned().collect(),
    )
}

/// Buchberger's algorithm with the normal selection strategy and the product
/// and chain criteria, returning the unique reduced basis.
pub fn buchberger(gens: &[MultiPoly], order: MonomialOrder) -> GroebnerBasis {
    let mut basis: Vec<MultiPoly> = Vec::new();
    for g in gens {
        let g = g.with_order(order).primitive();
        if !g.is_zero() {
            basis.push(g);
        }
    }
    let mut pending: BTreeSet<(u32, Vec<u32>, usize, usize)> = BTreeSet::new();
    let mut treated: BTreeSet<(usize, usize)> = BTreeSet::new();
    let lcm_of = |basis: &[MultiPoly], i: usize, j: usize| -> Monomial {
        basis[i]
            .leading()
            .unwrap()
            .0
            .lcm(&basis[j].leading().unwrap().0)
    };
    let push_pairs = |pending: &mut BTreeSet<(u32, Vec<u32>, usize, usize)>,
                          basis: &[MultiPoly],
                          upto: usize| {
        for i in 0..upto {
            let l = lcm_of(basis, i, upto);
            pending.insert((l.total_degree(), l.0.clone(), i, upto));
        }
    };
    for k in 1..basis.len() {
        push_pairs(&mut pending, &basis, k);
    }
    while let Some(entry) = pending.iter().next().cloned() {
        pending.remove(&entry);
        let (_, _, i, j) = entry;
        treated.insert((i, j));
        let (lmi, _) = basis[i].leading().unwrap();
        let (lmj, _) = basis[j].leading().unwrap();
        if lmi.is_coprime_with(lmj) {
            continue;
        }
        let l = lmi.lcm(lmj);
        // chain criterion: a third generator divides the lcm and both of its
        // pairs with i and j are already settled
        let chained = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].leading().unwrap().0.divides(&l)
                && treated.contains(&(i.min(k), i.max(k)))
                && treated.contains(&(j.min(k), j.max(k)))
        });
        if chained {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j]);
        let r = reduce_full(&s, &basis).primitive();
        if !r.is_zero() {
            basis.push(r);
            let new = basis.len() - 1;
            push_pairs(&mut pending, &basis, new);
        }
    }
    GroebnerBasis {
        order,
        gens: inter_reduce(basis, order),
    }
}

/// Minimalizes and tail-reduces a basis, returning monic generators sorted
/// by ascending leading monomial.
fn inter_reduce(mut basis: Vec<MultiPoly>, order: MonomialOrder) -> Vec<MultiPoly> {
    basis.retain(|g| !g.is_zero());
    // minimal set: no leading monomial divides another
    let mut keep: Vec<bool> = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (li, _) = basis[i].leading().unwrap();
            let (lj, _) = basis[j].leading().unwrap();
            if li.divides(lj) && (li != lj || i < j) {
                keep[j] = false;
            }
        }
    }
    let minimal: Vec<MultiPoly> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(g, k)| k.then_some(g))
        .collect();
    // tail reduction against the other generators
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<MultiPoly> = minimal
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let r = reduce_full(&minimal[i], &others);
        if !r.is_zero() {
            reduced.push(r.monic());
        }
    }
    reduced.sort_by(|a, b| order.cmp(&a.leading().unwrap().0, &b.leading().unwrap().0));
    reduced
}

/// Result of eliminating a zero-dimensional system to one variable.
#[derive(Clone, Debug)]
pub struct Elimination {
    /// Variable the generator lives in.
    pub keep: usize,
    /// Univariate generator of the elimination ideal, scaled to coprime
    /// integer coefficients with a positive leading coefficient.
    pub generator: MultiPoly,
    /// For a basis in shape position, every other active variable expressed
    /// as a univariate polynomial in `keep`.
    pub back_subst: Option<BTreeMap<usize, MultiPoly>>,
    /// The reduced lexicographic basis, in the original variable indexing.
    pub lex_basis: Vec<MultiPoly>,
}

/// Eliminates the system to a univariate generator in `keep`.
///
/// `active` lists the variables the system ranges over (a pinned variable is
/// excluded); the ideal must be zero-dimensional over them. The lexicographic
/// basis is computed from a graded basis by linear algebra over the finite
/// quotient, with `keep` placed last in the target order.
pub fn eliminate_to_univariate(
    polys: &[MultiPoly],
    active: &[usize],
    keep: usize,
) -> Result<Elimination> {
    let nvars = polys
        .first()
        .map(|p| p.nvars())
        .ok_or(Error::NotZeroDimensional)?;
    if !active.contains(&keep) {
        return Err(Error::IndexOutOfRange(format!("keep variable x{keep}")));
    }
    // rename so the kept variable is last
    let mut perm: Vec<usize> = active.iter().copied().filter(|&v| v != keep).collect();
    perm.push(keep);
    let renamed: Vec<MultiPoly> = polys.iter().map(|p| p.project_vars(&perm)).collect();
    let m = perm.len();
    let grev = buchberger(&renamed, MonomialOrder::GrevLex);
    let all_vars: Vec<usize> = (0..m).collect();
    if grev.contains_one() {
        // empty variety: the elimination ideal is generated by 1
        return Ok(Elimination {
            keep,
            generator: MultiPoly::one(nvars, MonomialOrder::Lex),
            back_subst: Some(BTreeMap::new()),
            lex_basis: vec![MultiPoly::one(nvars, MonomialOrder::Lex)],
        });
    }
    if !grev.is_zero_dimensional_over(&all_vars) {
        return Err(Error::NotZeroDimensional);
    }
    let lex = lex_basis_from_graded(&grev, m)?;
    // read off the univariate generator and, in shape position, the rest
    let mut generator = None;
    let mut back: BTreeMap<usize, MultiPoly> = BTreeMap::new();
    let mut shape = true;
    for g in &lex {
        let (lm, _) = g.leading().unwrap();
        if lm.is_univariate_in(m - 1) {
            generator = Some(g.clone());
        } else if lm.total_degree() == 1 {
            let v = lm.0.iter().position(|&e| e == 1).unwrap();
            // x_v - h(keep): the tail must involve the kept variable only
            let tail = g.sub(&MultiPoly::var(m, MonomialOrder::Lex, v));
            if tail
                .terms()
                .iter()
                .all(|(mm, _)| mm.is_univariate_in(m - 1))
            {
                back.insert(v, tail.neg());
            } else {
                shape = false;
            }
        } else {
            shape = false;
        }
    }
    let generator = generator.ok_or(Error::NotZeroDimensional)?;
    // map back to original variable indices
    let unrename = |p: &MultiPoly| -> MultiPoly {
        MultiPoly::from_terms(
            nvars,
            MonomialOrder::Lex,
            p.terms()
                .iter()
                .map(|(mm, c)| {
                    let mut e = vec![0u32; nvars];
                    for (newv, &oldv) in perm.iter().enumerate() {
                        e[oldv] = mm.0[newv];
                    }
                    (Monomial(e), c.clone())
                })
                .collect(),
        )
    };
    let back_subst = shape.then(|| {
        back.iter()
            .map(|(&v, h)| (perm[v], unrename(h)))
            .collect::<BTreeMap<usize, MultiPoly>>()
    });
    Ok(Elimination {
        keep,
        generator: unrename(&generator).primitive_positive(),
        back_subst,
        lex_basis: lex.iter().map(&unrename).collect(),
    })
}

/// Zero-dimensional change of order to pure lex via linear algebra over the
/// quotient ring (the last variable is least significant, so the first
/// dependency found is the univariate generator).
fn lex_basis_from_graded(grev: &GroebnerBasis, nvars: usize) -> Result<Vec<MultiPoly>> {
    let all_vars: Vec<usize> = (0..nvars).collect();
    let standard = grev
        .standard_monomials(&all_vars, 100_000)
        .ok_or(Error::NotZeroDimensional)?;
    let coord: BTreeMap<Vec<u32>, usize> = standard
        .iter()
        .enumerate()
        .map(|(i, m)| (m.0.clone(), i))
        .collect();
    let dim = standard.len();
    let nf_vector = |m: &Monomial| -> Vec<GaussianRational> {
        let p = MultiPoly::from_terms(
            nvars,
            MonomialOrder::GrevLex,
            vec![(m.clone(), GaussianRational::one())],
        );
        let nf = grev.reduce(&p);
        let mut v = vec![GaussianRational::zero(); dim];
        for (mm, c) in nf.terms() {
            v[*coord.get(&mm.0).expect("normal form stays under the staircase")] = c.clone();
        }
        v
    };
    let mut kept_monos: Vec<Monomial> = Vec::new();
    let mut kept_vecs: Vec<Vec<GaussianRational>> = Vec::new();
    let mut lex_lms: Vec<Monomial> = Vec::new();
    let mut lex_gens: Vec<MultiPoly> = Vec::new();
    // ascending lexicographic enumeration: powers of the last variable come
    // first, so the first dependency is the univariate generator
    let mut frontier: BTreeSet<Vec<u32>> = BTreeSet::new();
    frontier.insert(Monomial::one(nvars).0);
    let mut guard = 0usize;
    while let Some(key) = frontier.iter().next().cloned() {
        frontier.remove(&key);
        guard += 1;
        if guard > 1_000_000 {
            return Err(Error::NotZeroDimensional);
        }
        let m = Monomial(key);
        if lex_lms.iter().any(|l| l.divides(&m)) {
            continue;
        }
        let v = nf_vector(&m);
        match express_in_span(&kept_vecs, &v) {
            Some(coeffs) => {
                // dependency: m - sum coeffs * kept is a new lex generator
                let mut terms = vec![(m.clone(), GaussianRational::one())];
                for (c, km) in coeffs.iter().zip(&kept_monos) {
                    if !c.is_zero() {
                        terms.push((km.clone(), -c));
                    }
                }
                lex_gens.push(MultiPoly::from_terms(nvars, MonomialOrder::Lex, terms));
                lex_lms.push(m);
            }
            None => {
                for v in 0..nvars {
                    let mut e = m.0.clone();
                    e[v] += 1;
                    frontier.insert(e);
                }
                kept_monos.push(m);
                kept_vecs.push(v);
                if kept_vecs.len() > dim {
                    return Err(Error::NotZeroDimensional);
                }
            }
        }
    }
    Ok(inter_reduce(lex_gens, MonomialOrder::Lex))
}

/// Expresses `target` as a linear combination of `vectors`, if possible.
fn express_in_span(
    vectors: &[Vec<GaussianRational>],
    target: &[GaussianRational],
) -> Option<Vec<GaussianRational>> {
    if vectors.is_empty() {
        return target.iter().all(|c| c.is_zero()).then(Vec::new);
    }
    let dim = target.len();
    let k = vectors.len();
    let m = GMatrix::from_fn(dim, k + 1, |i, j| {
        if j < k {
            vectors[j][i].clone()
        } else {
            target[i].clone()
        }
    });
    let (rr, pivots) = m.rref();
    if pivots.contains(&k) {
        return None;
    }
    let mut coeffs = vec![GaussianRational::zero(); k];
    for (row, &col) in pivots.iter().enumerate() {
        coeffs[col] = rr[(row, k)].clone();
    }
    Some(coeffs)
}

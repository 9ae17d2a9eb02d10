//! Floating-point layer: univariate root finding, back-substitution of
//! eliminated systems, Gram matrices of embedded product states, and small
//! hermitian eigenproblems.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::GaussianRational;
use crate::groebner::Elimination;
use crate::poly::MultiPoly;
use crate::product::PerturbedSystem;
use crate::state::{inner_product, StateSet};

pub type C64 = (f64, f64);

fn cadd(a: C64, b: C64) -> C64 {
    (a.0 + b.0, a.1 + b.1)
}

fn csub(a: C64, b: C64) -> C64 {
    (a.0 - b.0, a.1 - b.1)
}

fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C64, b: C64) -> C64 {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

fn cabs(a: C64) -> f64 {
    a.0.hypot(a.1)
}

/// Univariate polynomial with floating coefficients, ascending degree.
#[derive(Clone, Debug)]
pub struct UnivariatePoly {
    pub coeffs: Vec<C64>,
}

impl UnivariatePoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && cabs(*coeffs.last().unwrap()) == 0.0 {
            coeffs.pop();
        }
        UnivariatePoly { coeffs }
    }

    pub fn from_exact(coeffs: &[GaussianRational]) -> Self {
        Self::new(coeffs.iter().map(|c| c.to_f64_pair()).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = (0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = cadd(cmul(acc, z), *c);
        }
        acc
    }

    pub fn derivative(&self) -> UnivariatePoly {
        if self.coeffs.len() <= 1 {
            return UnivariatePoly::new(vec![(0.0, 0.0)]);
        }
        UnivariatePoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| (c.0 * k as f64, c.1 * k as f64))
                .collect(),
        )
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.1 == 0.0)
    }

    fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| cabs(*c)).sum::<f64>().max(1.0)
    }
}

const ABERTH_ITERATION_CAP: u32 = 500;

/// All complex roots, with multiplicity, by simultaneous Aberth iteration
/// seeded on a circle. For real-coefficient inputs the returned multiset is
/// symmetrized under conjugation.
pub fn find_roots(p: &UnivariatePoly, tol: f64) -> Result<Vec<C64>> {
    let deg = p.degree();
    if deg == 0 {
        return Ok(Vec::new());
    }
    // factor out exact zero roots so the seeding radius is meaningful
    let zero_count = p.coeffs.iter().take_while(|c| cabs(**c) == 0.0).count();
    if zero_count > 0 {
        let reduced = UnivariatePoly::new(p.coeffs[zero_count..].to_vec());
        let mut roots = vec![(0.0, 0.0); zero_count];
        roots.extend(find_roots(&reduced, tol)?);
        return Ok(sort_roots(roots, p.is_real()));
    }
    let lead = *p.coeffs.last().unwrap();
    let monic: Vec<C64> = p.coeffs.iter().map(|c| cdiv(*c, lead)).collect();
    let cauchy = 1.0
        + monic[..deg]
            .iter()
            .map(|c| cabs(*c))
            .fold(0.0, f64::max);
    let radius = cabs(monic[0]).powf(1.0 / deg as f64).clamp(0.25, cauchy);
    let mut z: Vec<C64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            (radius * theta.cos(), radius * theta.sin())
        })
        .collect();
    let dp = p.derivative();
    let mut converged = false;
    for _ in 0..ABERTH_ITERATION_CAP {
        let mut max_step = 0.0f64;
        for k in 0..deg {
            let pv = p.eval(z[k]);
            if cabs(pv) == 0.0 {
                continue;
            }
            let dv = dp.eval(z[k]);
            let newton = if cabs(dv) == 0.0 {
                (1e-8, 1e-8)
            } else {
                cdiv(pv, dv)
            };
            let mut s = (0.0, 0.0);
            for j in 0..deg {
                if j != k {
                    let diff = csub(z[k], z[j]);
                    if cabs(diff) > 0.0 {
                        s = cadd(s, cdiv((1.0, 0.0), diff));
                    }
                }
            }
            let denom = csub((1.0, 0.0), cmul(newton, s));
            let w = if cabs(denom) == 0.0 { newton } else { cdiv(newton, denom) };
            z[k] = csub(z[k], w);
            max_step = max_step.max(cabs(w) / (1.0 + cabs(z[k])));
        }
        if max_step < 1e-14 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(ABERTH_ITERATION_CAP));
    }
    // Newton polish
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let pv = p.eval(*zk);
            let dv = dp.eval(*zk);
            if cabs(dv) == 0.0 {
                break;
            }
            *zk = csub(*zk, cdiv(pv, dv));
        }
    }
    let scale = p.coeff_scale();
    for &zk in &z {
        if cabs(p.eval(zk)) > tol * scale {
            return Err(Error::NonConvergence(ABERTH_ITERATION_CAP));
        }
    }
    Ok(sort_roots(z, p.is_real()))
}

/// Deterministic ordering: real roots first ascending, then conjugate pairs
/// by real part, positive imaginary member first. Real inputs get their
/// conjugate symmetry enforced exactly in the reported values.
fn sort_roots(mut roots: Vec<C64>, real_input: bool) -> Vec<C64> {
    if real_input {
        for r in roots.iter_mut() {
            if r.1.abs() < 1e-9 * (1.0 + r.0.abs()) {
                r.1 = 0.0;
            }
        }
        // pair complex roots with their conjugates and average
        let mut out: Vec<C64> = roots.iter().filter(|r| r.1 == 0.0).copied().collect();
        let mut upper: Vec<C64> = roots.iter().filter(|r| r.1 > 0.0).copied().collect();
        let mut lower: Vec<C64> = roots.iter().filter(|r| r.1 < 0.0).copied().collect();
        upper.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
        for u in upper {
            let best = lower
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    let da = (a.0 - u.0).hypot(a.1 + u.1);
                    let db = (b.0 - u.0).hypot(b.1 + u.1);
                    da.partial_cmp(&db).unwrap()
                })
                .map(|(i, _)| i);
            if let Some(i) = best {
                let l = lower.remove(i);
                let re = 0.5 * (u.0 + l.0);
                let im = 0.5 * (u.1 - l.1);
                out.push((re, im));
                out.push((re, -im));
            } else {
                out.push(u);
            }
        }
        out.extend(lower);
        roots = out;
    }
    roots.sort_by(|a, b| {
        let ka = (a.1 != 0.0, a.0, -a.1);
        let kb = (b.1 != 0.0, b.0, -b.1);
        ka.partial_cmp(&kb).unwrap()
    });
    roots
}

/// One embedded product state: the kept-variable root, the full coordinate
/// vector (pinned entry 1), and the residual of the defining system.
#[derive(Clone, Debug, Serialize)]
pub struct ProductStateSolution {
    pub root: C64,
    pub coordinates: Vec<C64>,
    pub residual: f64,
}

pub const RESIDUAL_BAR: f64 = 1e-8;

/// Evaluates the shape-position back-substitution at each root and checks
/// the full system residual.
pub fn back_substitute(
    roots: &[C64],
    elim: &Elimination,
    system: &PerturbedSystem,
) -> Result<Vec<ProductStateSolution>> {
    let back: &BTreeMap<usize, MultiPoly> = elim
        .back_subst
        .as_ref()
        .ok_or(Error::NotZeroDimensional)?;
    let mut out = Vec::new();
    for &root in roots {
        let mut coords: Vec<C64> = vec![(0.0, 0.0); system.nvars];
        coords[system.pinned] = (1.0, 0.0);
        coords[elim.keep] = root;
        for (&v, h) in back {
            let mut point = vec![(0.0, 0.0); system.nvars];
            point[elim.keep] = root;
            coords[v] = h.eval_complex(&point);
        }
        let residual = system.residual_at(&coords);
        if residual > RESIDUAL_BAR {
            return Err(Error::ResidualTooLarge(residual));
        }
        out.push(ProductStateSolution {
            root,
            coordinates: coords,
            residual,
        });
    }
    Ok(out)
}

/// Gram matrix of the embedded product states, computed from the exact
/// pairwise inner products of the basis states.
#[derive(Clone, Debug, Serialize)]
pub struct GramResult {
    pub matrix: Vec<Vec<C64>>,
    pub all_offdiagonal_nonzero: bool,
    pub min_offdiagonal_magnitude: f64,
}

pub const GRAM_NONZERO_BAR: f64 = 1e-6;

pub fn gram_nonorthogonality(set: &StateSet, solutions: &[ProductStateSolution]) -> GramResult {
    let n = set.len();
    let mut overlaps = vec![vec![(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            overlaps[i][j] = inner_product(set.state(i), set.state(j))
                .expect("shared spec")
                .to_f64_pair();
        }
    }
    let m = solutions.len();
    let mut gram = vec![vec![(0.0, 0.0); m]; m];
    let mut min_off = f64::INFINITY;
    for k in 0..m {
        for p in 0..m {
            let mut acc = (0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    let ci = solutions[k].coordinates[i];
                    let cj = solutions[p].coordinates[j];
                    let conj_ci = (ci.0, -ci.1);
                    acc = cadd(acc, cmul(cmul(conj_ci, cj), overlaps[i][j]));
                }
            }
            gram[k][p] = acc;
            if k != p {
                min_off = min_off.min(cabs(acc));
            }
        }
    }
    GramResult {
        matrix: gram,
        all_offdiagonal_nonzero: m < 2 || min_off > GRAM_NONZERO_BAR,
        min_offdiagonal_magnitude: if min_off.is_finite() { min_off } else { 0.0 },
    }
}

/// Eigenvalues of a hermitian matrix by cyclic complex Jacobi rotations,
/// ascending order.
pub fn hermitian_eigenvalues(m: &[Vec<C64>]) -> Vec<f64> {
    let n = m.len();
    let mut a: Vec<Vec<C64>> = m.to_vec();
    let scale: f64 = a
        .iter()
        .flatten()
        .map(|c| cabs(*c))
        .fold(0.0, f64::max)
        .max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(cabs(a[p][q]));
            }
        }
        if off < 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if cabs(apq) < 1e-300 {
                    continue;
                }
                let app = a[p][p].0;
                let aqq = a[q][q].0;
                let abs_apq = cabs(apq);
                let phase = (apq.0 / abs_apq, apq.1 / abs_apq);
                let conj_phase = (phase.0, -phase.1);
                let theta = 0.5 * (2.0 * abs_apq).atan2(app - aqq);
                let (c, s) = (theta.cos(), theta.sin());
                // unitary similarity zeroing the pivot:
                // R[p][p] = c, R[p][q] = -s*phase, R[q][p] = s*conj(phase), R[q][q] = c
                let mut b = a.clone();
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    b[k][p] = cadd(cmul((c, 0.0), akp), cmul((s, 0.0), cmul(conj_phase, akq)));
                    b[k][q] = csub(cmul((c, 0.0), akq), cmul((s, 0.0), cmul(phase, akp)));
                }
                let mut next = b.clone();
                for k in 0..n {
                    let bpk = b[p][k];
                    let bqk = b[q][k];
                    next[p][k] = cadd(cmul((c, 0.0), bpk), cmul((s, 0.0), cmul(phase, bqk)));
                    next[q][k] =
                        csub(cmul((c, 0.0), bqk), cmul((s, 0.0), cmul(conj_phase, bpk)));
                }
                a = next;
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i][i].0).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_real(coeffs: &[f64]) -> UnivariatePoly {
        UnivariatePoly::new(coeffs.iter().map(|&c| (c, 0.0)).collect())
    }

    #[test]
    fn quadratic_roots() {
        // x^2 - 3x + 2 has roots 1 and 2
        let p = poly_real(&[2.0, -3.0, 1.0]);
        let roots = find_roots(&p, 1e-12).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].0 - 1.0).abs() < 1e-10 && roots[0].1 == 0.0);
        assert!((roots[1].0 - 2.0).abs() < 1e-10 && roots[1].1 == 0.0);
    }

    #[test]
    fn constructed_degree_eight_roots_recovered() {
        // build a monic polynomial from chosen roots and recover them
        let chosen: Vec<C64> = vec![
            (1.0, 0.0),
            (-2.0, 0.0),
            (0.5, 0.0),
            (3.0, 0.0),
            (0.25, 1.5),
            (0.25, -1.5),
            (-1.0, 0.75),
            (-1.0, -0.75),
        ];
        let mut coeffs: Vec<C64> = vec![(1.0, 0.0)];
        for r in &chosen {
            let mut next = vec![(0.0, 0.0); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] = cadd(next[k + 1], *c);
                next[k] = csub(next[k], cmul(*c, *r));
            }
            coeffs = next;
        }
        let p = UnivariatePoly::new(coeffs);
        let roots = find_roots(&p, 1e-12).unwrap();
        assert_eq!(roots.len(), 8);
        for want in &chosen {
            let found = roots
                .iter()
                .map(|r| (r.0 - want.0).hypot(r.1 - want.1))
                .fold(f64::INFINITY, f64::min);
            assert!(found < 1e-9, "root {want:?} missed by {found:.2e}");
        }
    }

    #[test]
    fn conjugate_closure_for_real_inputs() {
        let p = poly_real(&[5.0, -1.0, 2.0, -0.5, 1.0]);
        let roots = find_roots(&p, 1e-12).unwrap();
        for r in &roots {
            let conj_found = roots
                .iter()
                .map(|s| (s.0 - r.0).hypot(s.1 + r.1))
                .fold(f64::INFINITY, f64::min);
            assert!(conj_found < 1e-9);
        }
    }

    #[test]
    fn jacobi_matches_known_spectrum() {
        // symmetric with eigenvalues 1 and 3
        let m = vec![vec![(2.0, 0.0), (1.0, 0.0)], vec![(1.0, 0.0), (2.0, 0.0)]];
        let e = hermitian_eigenvalues(&m);
        assert!((e[0] - 1.0).abs() < 1e-10);
        assert!((e[1] - 3.0).abs() < 1e-10);
        // hermitian with complex off-diagonal, eigenvalues 0 and 2
        let m = vec![
            vec![(1.0, 0.0), (0.0, -1.0)],
            vec![(0.0, 1.0), (1.0, 0.0)],
        ];
        let e = hermitian_eigenvalues(&m);
        assert!((e[0] - 0.0).abs() < 1e-10);
        assert!((e[1] - 2.0).abs() < 1e-10);
    }
}

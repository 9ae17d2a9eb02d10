//! Independent oracles used by the integration suites. These deliberately
//! avoid the library's own elimination and spectra code paths.

pub type C64 = (f64, f64);

pub fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

pub fn conj(a: C64) -> C64 {
    (a.0, -a.1)
}

pub fn cabs2(a: C64) -> f64 {
    a.0 * a.0 + a.1 * a.1
}

/// Deterministic xorshift generator for reproducible random suites.
pub struct Xor64(pub u64);

impl Xor64 {
    pub fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next() % (hi - lo + 1) as u64) as i64
    }

    pub fn unit(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Numerical rank from the singular values of the matrix, computed by
/// one-sided Jacobi orthogonalization of the columns (high relative accuracy
/// for small singular values).
pub fn svd_numerical_rank(m: &[Vec<C64>], tol: f64) -> usize {
    let sigmas = singular_values(m);
    let sigma_max = sigmas.iter().fold(0.0f64, |a, &b| a.max(b));
    if sigma_max == 0.0 {
        return 0;
    }
    sigmas.iter().filter(|&&s| s > tol * sigma_max).count()
}

pub fn singular_values(m: &[Vec<C64>]) -> Vec<f64> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    // columns of a, mixed in place by unitary plane rotations
    let mut a: Vec<Vec<C64>> = (0..cols).map(|j| (0..rows).map(|i| m[i][j]).collect()).collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let na: f64 = a[i].iter().map(|c| cabs2(*c)).sum();
                let nb: f64 = a[j].iter().map(|c| cabs2(*c)).sum();
                let mut g = (0.0, 0.0);
                for r in 0..rows {
                    let t = cmul(conj(a[i][r]), a[j][r]);
                    g = add(g, t);
                }
                let gm = cabs2(g).sqrt();
                if gm <= 1e-15 * (na * nb).sqrt() || gm == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = (g.0 / gm, g.1 / gm);
                // rotate within the plane after absorbing the phase
                let tau = (nb - na) / (2.0 * gm);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let ci = a[i][r];
                    let dj = cmul(conj(phase), a[j][r]);
                    a[i][r] = sub(cmul((c, 0.0), ci), cmul((s, 0.0), dj));
                    let newj = add(cmul((s, 0.0), ci), cmul((c, 0.0), dj));
                    a[j][r] = cmul(phase, newj);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    a.iter()
        .map(|col| col.iter().map(|c| cabs2(*c)).sum::<f64>().sqrt())
        .collect()
}

fn add(a: C64, b: C64) -> C64 {
    (a.0 + b.0, a.1 + b.1)
}

fn sub(a: C64, b: C64) -> C64 {
    (a.0 - b.0, a.1 - b.1)
}

/// Smallest squared distance from a normalized two-qubit product state to
/// the span of two fixed vectors, taken over a dense angle grid and refined
/// by pattern search. A minimum below 1e-10 certifies a product state in the
/// span.
pub fn min_product_distance_2x2(a: &[C64; 4], b: &[C64; 4]) -> f64 {
    // orthonormalize the span
    let basis = orthonormal_span(&[a.to_vec(), b.to_vec()]);
    let dist = |angles: &[f64; 4]| -> f64 {
        let (al, be, ga, de) = (angles[0], angles[1], angles[2], angles[3]);
        let u = [
            (al.cos(), 0.0),
            (al.sin() * be.cos(), al.sin() * be.sin()),
        ];
        let v = [
            (ga.cos(), 0.0),
            (ga.sin() * de.cos(), ga.sin() * de.sin()),
        ];
        let w = [
            cmul(u[0], v[0]),
            cmul(u[0], v[1]),
            cmul(u[1], v[0]),
            cmul(u[1], v[1]),
        ];
        let mut proj = 0.0;
        for e in &basis {
            let mut ip = (0.0, 0.0);
            for k in 0..4 {
                let t = cmul(conj(e[k]), w[k]);
                ip = add(ip, t);
            }
            proj += cabs2(ip);
        }
        (1.0 - proj).max(0.0)
    };
    let pi = std::f64::consts::PI;
    let mut best = [0.0f64; 4];
    let mut best_val = f64::INFINITY;
    let steps = 6;
    for i0 in 0..steps {
        for i1 in 0..steps {
            for i2 in 0..steps {
                for i3 in 0..steps {
                    let angles = [
                        pi * (i0 as f64 + 0.5) / steps as f64,
                        2.0 * pi * (i1 as f64 + 0.5) / steps as f64,
                        pi * (i2 as f64 + 0.5) / steps as f64,
                        2.0 * pi * (i3 as f64 + 0.5) / steps as f64,
                    ];
                    let v = dist(&angles);
                    if v < best_val {
                        best_val = v;
                        best = angles;
                    }
                }
            }
        }
    }
    // pattern search refinement
    let mut step = pi / steps as f64;
    for _ in 0..60 {
        let mut improved = false;
        for d in 0..4 {
            for sgn in [-1.0, 1.0] {
                let mut cand = best;
                cand[d] += sgn * step;
                let v = dist(&cand);
                if v < best_val {
                    best_val = v;
                    best = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-9 {
                break;
            }
        }
    }
    best_val
}

/// Gram-Schmidt with normalization, dropping dependent vectors.
pub fn orthonormal_span(vectors: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for e in &basis {
            let mut ip = (0.0, 0.0);
            for k in 0..w.len() {
                ip = add(ip, cmul(conj(e[k]), w[k]));
            }
            for k in 0..w.len() {
                w[k] = sub(w[k], cmul(ip, e[k]));
            }
        }
        let norm: f64 = w.iter().map(|c| cabs2(*c)).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for c in w.iter_mut() {
                *c = (c.0 / norm, c.1 / norm);
            }
            basis.push(w);
        }
    }
    basis
}

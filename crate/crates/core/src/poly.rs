//! Sparse multivariate polynomials over the Gaussian rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::{rational_sign, GaussianRational, Rational};

/// Exponent vector over a fixed variable list x0..x_{n-1}.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        let mut e = vec![0; nvars];
        e[v] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// other / self, assuming divisibility.
    pub fn div_into(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn is_coprime_with(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// True when only variable `v` appears.
    pub fn is_univariate_in(&self, v: usize) -> bool {
        self.0.iter().enumerate().all(|(i, &e)| i == v || e == 0)
    }
}

/// Term order used for leading-term selection.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic, x0 > x1 > ...
    GrevLex,
    /// Pure lexicographic, x0 > x1 > ...
    Lex,
    /// Product order eliminating the first `split` variables: graded reverse
    /// lexicographic on that block, ties broken on the remaining block.
    Block { split: usize },
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::GrevLex => grevlex_cmp(&a.0, &b.0),
            MonomialOrder::Block { split } => {
                grevlex_cmp(&a.0[..*split], &b.0[..*split])
                    .then_with(|| grevlex_cmp(&a.0[*split..], &b.0[*split..]))
            }
        }
    }
}

fn grevlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let (da, db) = (a.iter().sum::<u32>(), b.iter().sum::<u32>());
    if da != db {
        return da.cmp(&db);
    }
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            // smaller exponent in the rightmost difference wins
            return b[i].cmp(&a[i]);
        }
    }
    Ordering::Equal
}

/// Sparse polynomial, terms kept sorted descending under the carried order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    nvars: usize,
    order: MonomialOrder,
    terms: Vec<(Monomial, GaussianRational)>,
}

impl MultiPoly {
    pub fn zero(nvars: usize, order: MonomialOrder) -> Self {
        MultiPoly {
            nvars,
            order,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, order: MonomialOrder, c: GaussianRational) -> Self {
        Self::from_terms(nvars, order, vec![(Monomial::one(nvars), c)])
    }

    pub fn one(nvars: usize, order: MonomialOrder) -> Self {
        Self::constant(nvars, order, GaussianRational::one())
    }

    pub fn var(nvars: usize, order: MonomialOrder, v: usize) -> Self {
        Self::from_terms(
            nvars,
            order,
            vec![(Monomial::var(nvars, v), GaussianRational::one())],
        )
    }

    pub fn from_terms(
        nvars: usize,
        order: MonomialOrder,
        terms: Vec<(Monomial, GaussianRational)>,
    ) -> Self {
        let mut map: BTreeMap<Vec<u32>, GaussianRational> = BTreeMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.0.len(), nvars);
            if c.is_zero() {
                continue;
            }
            let e = map.entry(m.0).or_insert_with(GaussianRational::zero);
            *e += &c;
        }
        let mut terms: Vec<(Monomial, GaussianRational)> = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (Monomial(e), c))
            .collect();
        terms.sort_by(|(a, _), (b, _)| order.cmp(b, a));
        MultiPoly {
            nvars,
            order,
            terms,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn terms(&self) -> &[(Monomial, GaussianRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn leading(&self) -> Option<&(Monomial, GaussianRational)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.0[v]).max().unwrap_or(0)
    }

    pub fn with_order(&self, order: MonomialOrder) -> Self {
        Self::from_terms(self.nvars, order, self.terms.clone())
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(self.nvars, self.order, terms)
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(m, c)| (m.clone(), -c)));
        Self::from_terms(self.nvars, self.order, terms)
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    /// Multiplication by a single term; preserves sortedness.
    pub fn mul_term(&self, mono: &Monomial, coeff: &GaussianRational) -> MultiPoly {
        if coeff.is_zero() {
            return Self::zero(self.nvars, self.order);
        }
        MultiPoly {
            nvars: self.nvars,
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(mono), c * coeff))
                .collect(),
        }
    }

    pub fn scale(&self, coeff: &GaussianRational) -> MultiPoly {
        self.mul_term(&Monomial::one(self.nvars), coeff)
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                terms.push((ma.mul(mb), ca * cb));
            }
        }
        Self::from_terms(self.nvars, self.order, terms)
    }

    /// Substitutes a polynomial for variable `v`.
    pub fn substitute_poly(&self, v: usize, h: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(h.nvars, self.nvars);
        let max_pow = self.degree_in(v) as usize;
        let mut powers = Vec::with_capacity(max_pow + 1);
        powers.push(Self::one(self.nvars, self.order));
        for _ in 0..max_pow {
            powers.push(powers.last().unwrap().mul(h));
        }
        let mut acc = Self::zero(self.nvars, self.order);
        for (m, c) in &self.terms {
            let e = m.0[v] as usize;
            let mut rest = m.0.clone();
            rest[v] = 0;
            let base = powers[e].mul_term(&Monomial(rest), c);
            acc = acc.add(&base);
        }
        acc
    }

    /// Substitutes 1 for variable `v`.
    pub fn substitute_one(&self, v: usize) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0.clone();
                e[v] = 0;
                (Monomial(e), c.clone())
            })
            .collect();
        Self::from_terms(self.nvars, self.order, terms)
    }

    /// Renames variables: new index j holds old variable perm[j].
    pub fn permute_vars(&self, perm: &[usize]) -> MultiPoly {
        debug_assert_eq!(perm.len(), self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let e: Vec<u32> = perm.iter().map(|&old| m.0[old]).collect();
                (Monomial(e), c.clone())
            })
            .collect();
        Self::from_terms(self.nvars, self.order, terms)
    }

    /// Re-expresses the polynomial in a larger variable space: old variable
    /// `v` becomes `positions[v]`.
    pub fn embed_vars(&self, nvars_new: usize, positions: &[usize]) -> MultiPoly {
        debug_assert_eq!(positions.len(), self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = vec![0u32; nvars_new];
                for (v, &e_old) in m.0.iter().enumerate() {
                    e[positions[v]] = e_old;
                }
                (Monomial(e), c.clone())
            })
            .collect();
        Self::from_terms(nvars_new, self.order, terms)
    }

    /// Drops unused trailing variables, keeping indices listed in `keep`
    /// (which must cover every variable that occurs).
    pub fn project_vars(&self, keep: &[usize]) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let e: Vec<u32> = keep.iter().map(|&v| m.0[v]).collect();
                (Monomial(e), c.clone())
            })
            .collect();
        Self::from_terms(keep.len(), self.order, terms)
    }

    /// Scales by a positive rational so all coefficients are Gaussian
    /// integers with integer content one. Keeps numbers small during basis
    /// computations without changing the ideal.
    pub fn primitive(&self) -> MultiPoly {
        if self.terms.is_empty() {
            return self.clone();
        }
        let mut l = BigInt::one();
        for (_, c) in &self.terms {
            l = l.lcm(c.re.denom());
            l = l.lcm(c.im.denom());
        }
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(&(c.re.numer() * &l / c.re.denom()));
            g = g.gcd(&(c.im.numer() * &l / c.im.denom()));
        }
        if g.is_zero() {
            return self.clone();
        }
        let s = GaussianRational::from_real(Rational::new(l, g.abs()));
        self.scale(&s)
    }

    /// Monic under the carried order.
    pub fn monic(&self) -> MultiPoly {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) => {
                let inv = lc.checked_recip().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    /// Primitive integer form with a positive leading coefficient (leading
    /// under the carried order; for a real polynomial this fixes the sign).
    pub fn primitive_positive(&self) -> MultiPoly {
        let p = self.primitive();
        match p.leading() {
            None => p,
            Some((_, lc)) => {
                let s = if rational_sign(&lc.re) < 0
                    || (lc.re.is_zero() && rational_sign(&lc.im) < 0)
                {
                    -1
                } else {
                    1
                };
                if s < 0 {
                    p.neg()
                } else {
                    p
                }
            }
        }
    }

    /// Coefficients c0..c_deg in variable `v` when no other variable occurs.
    pub fn univariate_coeffs(&self, v: usize) -> Option<Vec<GaussianRational>> {
        if !self.terms.iter().all(|(m, _)| m.is_univariate_in(v)) {
            return None;
        }
        let deg = self.degree_in(v) as usize;
        let mut coeffs = vec![GaussianRational::zero(); deg + 1];
        for (m, c) in &self.terms {
            coeffs[m.0[v] as usize] = c.clone();
        }
        Some(coeffs)
    }

    /// Evaluates at a complex point.
    pub fn eval_complex(&self, point: &[(f64, f64)]) -> (f64, f64) {
        let mut acc = (0.0, 0.0);
        for (m, c) in &self.terms {
            let (mut re, mut im) = c.to_f64_pair();
            for (v, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    let (pr, pi) = point[v];
                    let nr = re * pr - im * pi;
                    let ni = re * pi + im * pr;
                    re = nr;
                    im = ni;
                }
            }
            acc.0 += re;
            acc.1 += im;
        }
        acc
    }
}

/// Canonical text form: terms joined by signs, lexicographic order with
/// x0 > x1 > ..., coefficient 1 left implicit, `*` between factors.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms = self.terms.clone();
        terms.sort_by(|(a, _), (b, _)| MonomialOrder::Lex.cmp(b, a));
        for (k, (m, c)) in terms.iter().enumerate() {
            let (sign, mag) = render_coeff(c);
            if k == 0 {
                if sign < 0 {
                    write!(f, "-")?;
                }
            } else if sign < 0 {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let mono = render_monomial(m);
            match (mag.as_str(), mono.as_str()) {
                (_, "") => write!(f, "{mag}")?,
                ("1", _) => write!(f, "{mono}")?,
                _ => write!(f, "{mag}*{mono}")?,
            }
        }
        Ok(())
    }
}

fn render_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (v, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("x{v}")),
            _ => parts.push(format!("x{v}^{e}")),
        }
    }
    parts.join("*")
}

/// Splits a coefficient into a display sign and magnitude string. Complex
/// coefficients are parenthesized and keep their sign inside.
fn render_coeff(c: &GaussianRational) -> (i8, String) {
    if c.is_real() {
        let s = rational_sign(&c.re);
        (s, c.re.abs().to_string())
    } else if c.re.is_zero() {
        let s = rational_sign(&c.im);
        let mag = c.im.abs();
        if mag.is_one() {
            (s, "i".to_string())
        } else {
            (s, format!("{mag}i"))
        }
    } else {
        (1, format!("({c})"))
    }
}

impl serde::Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct Repr<'a> {
            nvars: usize,
            terms: Vec<(&'a Vec<u32>, String)>,
        }
        Repr {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (&m.0, c.to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Repr {
            nvars: usize,
            terms: Vec<(Vec<u32>, String)>,
        }
        let r = Repr::deserialize(d)?;
        let mut terms = Vec::with_capacity(r.terms.len());
        for (e, c) in r.terms {
            if e.len() != r.nvars {
                return Err(serde::de::Error::custom("exponent arity mismatch"));
            }
            let coeff: GaussianRational = c.parse().map_err(serde::de::Error::custom)?;
            terms.push((Monomial(e), coeff));
        }
        Ok(MultiPoly::from_terms(r.nvars, MonomialOrder::GrevLex, terms))
    }
}

//! Generators for the named three-qubit state families.
//!
//! All families live in the 2x2x2 system with parties A, B, C. Amplitudes
//! are exact; states are unnormalized.

use crate::error::{Error, Result};
use crate::exact::GaussianRational;
use crate::state::{PartySpec, PureState, StateSet};

/// Parameters accepted by [`make_family`]. Unused fields are ignored by
/// families that do not take them.
#[derive(Clone, Debug, Default)]
pub struct FamilyParams {
    pub a1: Option<GaussianRational>,
    pub b1: Option<GaussianRational>,
    pub z: Option<GaussianRational>,
}

/// The named families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Eight-state orthogonal biseparable basis with parameters a1, b1.
    Basis,
    /// Five states: the four minus states plus the product stopper.
    SetS,
    /// The one-parameter family with a1 fixed to -2 and b1 = z.
    SetSz,
    /// SetSz at z = 0.
    SetS0,
    /// Five-state unextendible biseparable basis.
    Ubb,
    /// Three-state basis of the orthogonal complement of the UBB.
    Omega,
    /// The product stopper alone.
    Tau,
    /// The entangled stopper alone.
    Kappa,
}

impl Family {
    pub fn parse(name: &str) -> Result<Family> {
        match name.to_ascii_lowercase().as_str() {
            "basis" | "basis-b" => Ok(Family::Basis),
            "set-s" | "sets" => Ok(Family::SetS),
            "set-sz" | "setsz" | "sz" => Ok(Family::SetSz),
            "set-s0" | "sets0" | "s0" => Ok(Family::SetS0),
            "ubb" | "ubb-u" | "u" => Ok(Family::Ubb),
            "omega" => Ok(Family::Omega),
            "tau" => Ok(Family::Tau),
            "kappa" => Ok(Family::Kappa),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

fn spec3() -> PartySpec {
    PartySpec::qubits(3)
}

fn gr(n: i64) -> GaussianRational {
    GaussianRational::from_int(n)
}

fn state(terms: Vec<(Vec<usize>, GaussianRational)>) -> PureState {
    PureState::new(spec3(), terms).expect("family state")
}

/// |0>_A (a0|00> + a1|10> - (a0+a1)|11>)_BC with a0 = 1.
fn phi00_minus(a1: &GaussianRational) -> PureState {
    state(vec![
        (vec![0, 0, 0], gr(1)),
        (vec![0, 1, 0], a1.clone()),
        (vec![0, 1, 1], -(gr(1) + a1)),
    ])
}

/// |0>_A (a0|00> + a1|10> + (|a0|^2+|a1|^2)/conj(a0+a1) |11>)_BC with a0 = 1.
fn phi00_plus(a1: &GaussianRational) -> Result<PureState> {
    let num = GaussianRational::from_real(gr(1).norm_sqr() + a1.norm_sqr());
    let den = (gr(1) + a1).conj();
    let tail = num.checked_div(&den).map_err(|_| {
        Error::ParamConstraintViolated("a1 = -1 makes the plus state undefined".into())
    })?;
    Ok(state(vec![
        (vec![0, 0, 0], gr(1)),
        (vec![0, 1, 0], a1.clone()),
        (vec![0, 1, 1], tail),
    ]))
}

/// (conj(a0)|01> - conj(a1)|00> - conj(a0-a1)|10>)_AB |0>_C with a0 = 1.
fn phi01_minus(a1: &GaussianRational) -> PureState {
    state(vec![
        (vec![0, 1, 0], gr(1)),
        (vec![0, 0, 0], -a1.conj()),
        (vec![1, 0, 0], -((gr(1) - a1).conj())),
    ])
}

/// (conj(a0)|01> - conj(a1)|00> + (|a0|^2+|a1|^2)/(a0-a1) |10>)_AB |0>_C with a0 = 1.
fn phi01_plus(a1: &GaussianRational) -> Result<PureState> {
    let num = GaussianRational::from_real(gr(1).norm_sqr() + a1.norm_sqr());
    let den = gr(1) - a1;
    let tail = num.checked_div(&den).map_err(|_| {
        Error::ParamConstraintViolated("a1 = 1 makes the plus state undefined".into())
    })?;
    Ok(state(vec![
        (vec![0, 1, 0], gr(1)),
        (vec![0, 0, 0], -a1.conj()),
        (vec![1, 0, 0], tail),
    ]))
}

/// |1>_A (b0|01> + b1|11> - (b0+b1)|10>)_BC with b0 = 1.
fn psi10_minus(b1: &GaussianRational) -> PureState {
    state(vec![
        (vec![1, 0, 1], gr(1)),
        (vec![1, 1, 1], b1.clone()),
        (vec![1, 1, 0], -(gr(1) + b1)),
    ])
}

fn psi10_plus(b1: &GaussianRational) -> Result<PureState> {
    let num = GaussianRational::from_real(gr(1).norm_sqr() + b1.norm_sqr());
    let den = (gr(1) + b1).conj();
    let tail = num.checked_div(&den).map_err(|_| {
        Error::ParamConstraintViolated("b1 = -1 makes the plus state undefined".into())
    })?;
    Ok(state(vec![
        (vec![1, 0, 1], gr(1)),
        (vec![1, 1, 1], b1.clone()),
        (vec![1, 1, 0], tail),
    ]))
}

/// (conj(b0)|11> - conj(b1)|10> - conj(b0-b1)|00>)_AB |1>_C with b0 = 1.
fn psi11_minus(b1: &GaussianRational) -> PureState {
    state(vec![
        (vec![1, 1, 1], gr(1)),
        (vec![1, 0, 1], -b1.conj()),
        (vec![0, 0, 1], -((gr(1) - b1).conj())),
    ])
}

fn psi11_plus(b1: &GaussianRational) -> Result<PureState> {
    let num = GaussianRational::from_real(gr(1).norm_sqr() + b1.norm_sqr());
    let den = gr(1) - b1;
    let tail = num.checked_div(&den).map_err(|_| {
        Error::ParamConstraintViolated("b1 = 1 makes the plus state undefined".into())
    })?;
    Ok(state(vec![
        (vec![1, 1, 1], gr(1)),
        (vec![1, 0, 1], -b1.conj()),
        (vec![0, 0, 1], tail),
    ]))
}

/// |0+1>|0+1>|0+1>, the product stopper.
pub fn tau() -> PureState {
    let mut terms = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                terms.push((vec![a, b, c], gr(1)));
            }
        }
    }
    state(terms)
}

/// The entangled stopper |0+1>_B |00+01+10-11>_CA, written in ABC order.
pub fn kappa() -> PureState {
    let mut terms = Vec::new();
    for b in 0..2 {
        // (c, a) runs over 00, 01, 10, 11 with amplitudes 1, 1, 1, -1
        for (c, a, amp) in [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, -1)] {
            terms.push((vec![a, b, c], gr(amp)));
        }
    }
    state(terms)
}

fn check_square_constraint(v: &GaussianRational, name: &str) -> Result<()> {
    if (v * v).is_one() {
        return Err(Error::ParamConstraintViolated(format!(
            "{name} must satisfy {name}^2 != 1 (got {v})"
        )));
    }
    Ok(())
}

/// The eight-state orthogonal biseparable basis.
pub fn basis_b(a1: &GaussianRational, b1: &GaussianRational) -> Result<StateSet> {
    check_square_constraint(a1, "a1")?;
    check_square_constraint(b1, "b1")?;
    let states = vec![
        phi00_minus(a1),
        phi00_plus(a1)?,
        phi01_minus(a1),
        phi01_plus(a1)?,
        psi10_minus(b1),
        psi10_plus(b1)?,
        psi11_minus(b1),
        psi11_plus(b1)?,
    ];
    Ok(StateSet::new(format!("basis-B(a1={a1},b1={b1})"), states)?.with_labels(vec![
        "phi00-".into(),
        "phi00+".into(),
        "phi01-".into(),
        "phi01+".into(),
        "psi10-".into(),
        "psi10+".into(),
        "psi11-".into(),
        "psi11+".into(),
    ]))
}

/// The four minus states plus the product stopper.
pub fn set_s(a1: &GaussianRational, b1: &GaussianRational) -> Result<StateSet> {
    check_square_constraint(a1, "a1")?;
    check_square_constraint(b1, "b1")?;
    let states = vec![
        phi00_minus(a1),
        phi01_minus(a1),
        psi10_minus(b1),
        psi11_minus(b1),
        tau(),
    ];
    Ok(StateSet::new(format!("set-S(a1={a1},b1={b1})"), states)?.with_labels(vec![
        "phi00-".into(),
        "phi01-".into(),
        "psi10-".into(),
        "psi11-".into(),
        "tau".into(),
    ]))
}

/// The one-parameter family with a1 = -2 fixed and b1 = z free.
pub fn set_sz(z: &GaussianRational) -> Result<StateSet> {
    let a1 = gr(-2);
    let states = vec![
        phi00_minus(&a1),
        phi01_minus(&a1),
        psi10_minus(z),
        psi11_minus(z),
        tau(),
    ];
    Ok(StateSet::new(format!("set-Sz(z={z})"), states)?.with_labels(vec![
        "phi00-".into(),
        "phi01-".into(),
        "psi10-".into(),
        "psi11-".into(),
        "tau".into(),
    ]))
}

pub fn set_s0() -> StateSet {
    let mut s = set_sz(&gr(0)).expect("z = 0 is unconstrained");
    s = StateSet::new("set-S0", s.states().to_vec())
        .expect("nonempty")
        .with_labels(s.labels().to_vec());
    s
}

/// The five-state unextendible biseparable basis: two minus states, two plus
/// states at z = 0, and the entangled stopper.
pub fn ubb() -> StateSet {
    let a1 = gr(-2);
    let z = gr(0);
    let states = vec![
        phi00_minus(&a1),
        phi01_minus(&a1),
        psi10_plus(&z).expect("z = 0 valid"),
        psi11_plus(&z).expect("z = 0 valid"),
        kappa(),
    ];
    StateSet::new("ubb-U", states)
        .expect("nonempty")
        .with_labels(vec![
            "phi00-".into(),
            "phi01-".into(),
            "psi10+".into(),
            "psi11+".into(),
            "kappa".into(),
        ])
}

/// Fixed basis of the orthogonal complement of the UBB span.
pub fn omega() -> StateSet {
    let spec = spec3();
    let w0 = PureState::from_ints(
        &spec,
        &[
            (&[0, 0, 0], 1),
            (&[0, 1, 0], -2),
            (&[0, 1, 1], -5),
            (&[1, 0, 1], -3),
            (&[1, 1, 0], 3),
        ],
    );
    let w1 = PureState::from_ints(
        &spec,
        &[
            (&[0, 0, 0], 6),
            (&[0, 1, 0], 3),
            (&[1, 0, 0], 5),
            (&[1, 0, 1], 7),
            (&[1, 1, 0], -7),
        ],
    );
    let w2 = PureState::from_ints(
        &spec,
        &[
            (&[0, 0, 1], 1),
            (&[1, 1, 1], -1),
            (&[1, 0, 1], 1),
            (&[1, 1, 0], -1),
        ],
    );
    StateSet::new("omega", vec![w0, w1, w2])
        .expect("nonempty")
        .with_labels(vec!["omega0".into(), "omega1".into(), "omega2".into()])
}

/// Builds the named family from parameters.
pub fn make_family(family: Family, params: &FamilyParams) -> Result<StateSet> {
    let need = |p: &Option<GaussianRational>, what: &str| {
        p.clone()
            .ok_or_else(|| Error::ParamConstraintViolated(format!("missing parameter {what}")))
    };
    match family {
        Family::Basis => basis_b(&need(&params.a1, "a1")?, &need(&params.b1, "b1")?),
        Family::SetS => set_s(&need(&params.a1, "a1")?, &need(&params.b1, "b1")?),
        Family::SetSz => set_sz(&need(&params.z, "z")?),
        Family::SetS0 => Ok(set_s0()),
        Family::Ubb => Ok(ubb()),
        Family::Omega => Ok(omega()),
        Family::Tau => {
            Ok(StateSet::new("tau", vec![tau()])?.with_labels(vec!["tau".into()]))
        }
        Family::Kappa => {
            Ok(StateSet::new("kappa", vec![kappa()])?.with_labels(vec!["kappa".into()]))
        }
    }
}

/// Recognizes a set that matches the one-parameter family exactly, allowing a
/// nonzero overall scalar per state, and returns the parameter when real.
pub fn match_real_z_family(set: &StateSet) -> Option<GaussianRational> {
    if set.len() != 5 || set.spec().dims() != [2, 2, 2] {
        return None;
    }
    // recover z from the third state, then rebuild and compare state by state
    let s2 = set.state(2);
    let anchor = s2.amplitude(&[1, 0, 1]);
    if anchor.is_zero() {
        return None;
    }
    let z = s2.amplitude(&[1, 1, 1]).checked_div(&anchor).ok()?;
    if !z.is_real() {
        return None;
    }
    let template = set_sz(&z).ok()?;
    for i in 0..5 {
        if !proportional(set.state(i), template.state(i)) {
            return None;
        }
    }
    Some(z)
}

/// True when b = s * a for some nonzero scalar s.
fn proportional(a: &PureState, b: &PureState) -> bool {
    let ta: Vec<_> = a.terms().collect();
    let tb: Vec<_> = b.terms().collect();
    if ta.len() != tb.len() {
        return false;
    }
    if ta.is_empty() {
        return true;
    }
    if ta[0].0 != tb[0].0 {
        return false;
    }
    let Ok(scale) = ta[0].1.checked_div(tb[0].1) else {
        return false;
    };
    ta.iter()
        .zip(&tb)
        .all(|((ia, aa), (ib, ab))| ia == ib && **aa == *ab * &scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::inner_product;

    #[test]
    fn basis_is_pairwise_orthogonal_for_complex_parameters() {
        let b = basis_b(&gr(-2), &GaussianRational::i()).unwrap();
        assert_eq!(b.len(), 8);
        let mut pairs = 0;
        for i in 0..8 {
            for j in i + 1..8 {
                assert!(
                    inner_product(b.state(i), b.state(j)).unwrap().is_zero(),
                    "states {i},{j} not orthogonal"
                );
                pairs += 1;
            }
        }
        assert_eq!(pairs, 28);
    }

    #[test]
    fn basis_rejects_unit_square_parameters() {
        assert!(basis_b(&gr(-2), &gr(1)).is_err());
        assert!(basis_b(&gr(-2), &gr(-1)).is_err());
        assert!(basis_b(&gr(1), &gr(2)).is_err());
    }

    #[test]
    fn set_sz_at_zero_is_set_s0() {
        let sz = set_sz(&gr(0)).unwrap();
        let s0 = set_s0();
        assert_eq!(sz.len(), 5);
        for i in 0..5 {
            assert_eq!(sz.state(i), s0.state(i));
        }
        // psi10- at z = 0 is |1>|01-10>
        let s = s0.state(2);
        assert_eq!(s.amplitude(&[1, 0, 1]), gr(1));
        assert_eq!(s.amplitude(&[1, 1, 0]), gr(-1));
        assert_eq!(s.amplitude(&[1, 1, 1]), gr(0));
    }

    #[test]
    fn families_are_orthogonal_where_claimed() {
        for set in [
            set_sz(&gr(0)).unwrap(),
            set_sz(&GaussianRational::i()).unwrap(),
            set_sz(&GaussianRational::from_ints(1, 1)).unwrap(),
            set_s0(),
            ubb(),
        ] {
            set.verify_orthogonal().unwrap_or_else(|e| panic!("{}: {e}", set.name()));
        }
    }

    #[test]
    fn ubb_has_five_states_and_omega_complements_it() {
        let u = ubb();
        assert_eq!(u.len(), 5);
        let om = omega();
        assert_eq!(om.len(), 3);
        for us in u.states() {
            for os in om.states() {
                assert!(inner_product(us, os).unwrap().is_zero());
            }
        }
        assert_eq!(u.span_dim(), 5);
        assert_eq!(om.span_dim(), 3);
    }

    #[test]
    fn kappa_norm_is_eight() {
        assert_eq!(kappa().norm_sqr(), gr(8).re);
        assert_eq!(tau().norm_sqr(), gr(8).re);
    }

    #[test]
    fn real_z_detection() {
        assert_eq!(match_real_z_family(&set_s0()).unwrap(), gr(0));
        assert_eq!(match_real_z_family(&set_sz(&gr(-2)).unwrap()).unwrap(), gr(-2));
        assert!(match_real_z_family(&set_sz(&GaussianRational::i()).unwrap()).is_none());
        assert!(match_real_z_family(&ubb()).is_none());
        // scalar multiples still match
        let s0 = set_s0();
        let scaled: Vec<_> = s0
            .states()
            .iter()
            .map(|s| s.scale(&gr(3)).unwrap())
            .collect();
        let scaled = StateSet::new("scaled", scaled).unwrap();
        assert_eq!(match_real_z_family(&scaled).unwrap(), gr(0));
    }
}

//! Ledger arithmetic for framings, surgery coefficients, spin evenness
//! certificates, Hopf-degree differences, framing transport through the
//! trefoil fibration, and the Bennequin violation check.
//!
//! Every operation here is a small exact rule; certificates carry the rule
//! name so an auditor can trace each integer to its source statement.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::sl2z::Gl2z;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InvariantError {
    #[error("component is not declared null-homotopic")]
    NotNullHomotopic,
    #[error("framing parity mismatch: {0} cannot reach {1} by ±2 plugs")]
    ParityMismatch(i64, i64),
    #[error("odd framings on components {0:?}")]
    OddFraming(Vec<usize>),
    #[error("gluing requires flags: {0}")]
    FlagMissing(&'static str),
}

/// Record of one solid-torus component of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RComponentRecord {
    pub component: usize,
    pub framing: i64,
    pub unknotted: bool,
    pub null_homotopic: bool,
}

/// Dehn coefficient of the standard surgery along a null-homotopic
/// `k`-framed component: `k + 1`.
pub fn surgery_coefficient(record: &RComponentRecord) -> Result<i64, InvariantError> {
    if !record.null_homotopic {
        return Err(InvariantError::NotNullHomotopic);
    }
    Ok(record.framing + 1)
}

/// Signed plug count moving a framing from `current` to `target`; each plug
/// insertion shifts the framing by ±2, so the parities must agree.
pub fn plug_plan(current: i64, target: i64) -> Result<i64, InvariantError> {
    if (target - current).rem_euclid(2) != 0 {
        return Err(InvariantError::ParityMismatch(current, target));
    }
    Ok((target - current) / 2)
}

/// Evenness certificate over a framed link; valid iff every framing is
/// even, in which case the surgered manifold inherits the unique spin
/// structure of the associated even handlebody.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinCertificate {
    pub framings: BTreeMap<usize, i64>,
    pub valid: bool,
    pub rule: String,
}

pub fn evenness_check(framings: &BTreeMap<usize, i64>) -> Result<SpinCertificate, InvariantError> {
    let odd: Vec<usize> = framings
        .iter()
        .filter(|(_, &f)| f.rem_euclid(2) != 0)
        .map(|(&c, _)| c)
        .collect();
    if !odd.is_empty() {
        return Err(InvariantError::OddFraming(odd));
    }
    Ok(SpinCertificate {
        framings: framings.clone(),
        valid: true,
        rule: "surgery_formula".to_string(),
    })
}

/// Difference of Hopf degree, always anchored to the positive total Reeb
/// foliation on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HopfValue(pub i64);

/// Additivity of differences over a common anchor.
pub fn hopf_concat(h1: HopfValue, h2: HopfValue) -> HopfValue {
    HopfValue(h1.0 + h2.0)
}

/// Effect of an orientation reversal of the sphere on the anchored value:
/// `h ↦ −1 − h`.
pub fn hopf_reverse(h: HopfValue) -> HopfValue {
    HopfValue(-1 - h.0)
}

/// Gluing a sphere block into a null-homotopic component along a
/// (−1)-framed unknotted component adds the block's anchored value.
pub fn hopf_glue(
    h_base: HopfValue,
    h_block: HopfValue,
    base_component: &RComponentRecord,
    block_component: &RComponentRecord,
) -> Result<HopfValue, InvariantError> {
    if !base_component.null_homotopic {
        return Err(InvariantError::FlagMissing("base component must be null-homotopic"));
    }
    if !block_component.unknotted || block_component.framing != -1 {
        return Err(InvariantError::FlagMissing(
            "block component must be an unknotted (-1)-framed component",
        ));
    }
    Ok(hopf_concat(h_base, h_block))
}

/// Declared data of a torus gluing: the distinguished boundary classes on
/// both sides and the induced map on first homology (columns act on the
/// (μ, a) basis of the first boundary).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingData {
    pub a_class_1: (i64, i64),
    pub a_class_2: (i64, i64),
    pub meridian_1: (i64, i64),
    pub meridian_2: (i64, i64),
    pub map: Gl2z,
}

/// True iff the declared map sends the distinguished class of the first
/// boundary to the distinguished class of the second.
pub fn validate_gluing(g: &GluingData) -> bool {
    g.map.apply(g.a_class_1) == g.a_class_2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportDirection {
    /// From the unknotted reference tube to the fibration tube.
    ToFibration,
    /// Back from the fibration tube to the unknotted reference tube.
    ToReference,
}

/// Framing transport between the two solid-torus coordinates of the
/// trefoil-fibration construction; `m_star` is the fibration offset and
/// cancels in all public results.
pub fn trefoil_transport(n: i64, m_star: i64, direction: TransportDirection) -> i64 {
    match direction {
        TransportDirection::ToFibration => n + m_star,
        TransportDirection::ToReference => n - m_star,
    }
}

/// True iff `tb + χ ≤ −|rot|` is violated, certifying that the contact
/// structure carrying the witness is overtwisted.
pub fn bennequin_check(tb: i64, euler_char: i64, rot: i64) -> bool {
    tb + euler_char > -rot.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(framing: i64, unknotted: bool, null_homotopic: bool) -> RComponentRecord {
        RComponentRecord { component: 0, framing, unknotted, null_homotopic }
    }

    #[test]
    fn surgery_coefficient_examples() {
        assert_eq!(surgery_coefficient(&record(-1, true, true)).unwrap(), 0);
        assert_eq!(surgery_coefficient(&record(1, true, true)).unwrap(), 2);
        // target framing n(K)−1 yields coefficient n(K)
        for n in (-20..=20).filter(|n| n % 2 == 0) {
            assert_eq!(surgery_coefficient(&record(n - 1, true, true)).unwrap(), n);
        }
        assert_eq!(
            surgery_coefficient(&record(0, true, false)),
            Err(InvariantError::NotNullHomotopic)
        );
    }

    #[test]
    fn plug_plan_examples() {
        assert_eq!(plug_plan(3, 1).unwrap(), -1);
        assert_eq!(plug_plan(1, 1).unwrap(), 0);
        assert_eq!(plug_plan(3, -1).unwrap(), -2);
        assert_eq!(plug_plan(0, 1), Err(InvariantError::ParityMismatch(0, 1)));
    }

    #[test]
    fn plug_then_surgery_round_trip() {
        // from any odd base framing, plugs to n−1 then surgery give n
        for base in (-19..=19).step_by(2) {
            for n in (-20..=20).filter(|n| n % 2 == 0) {
                let plugs = plug_plan(base, n - 1).unwrap();
                let framed = base + 2 * plugs;
                assert_eq!(framed, n - 1);
                assert_eq!(surgery_coefficient(&record(framed, true, true)).unwrap(), n);
            }
        }
    }

    #[test]
    fn evenness_examples() {
        let mut f = BTreeMap::new();
        f.insert(0, 0);
        assert!(evenness_check(&f).unwrap().valid);
        f.insert(1, 2);
        f.insert(2, -4);
        assert!(evenness_check(&f).unwrap().valid);
        f.insert(3, 3);
        assert_eq!(evenness_check(&f), Err(InvariantError::OddFraming(vec![3])));
    }

    #[test]
    fn hopf_arithmetic() {
        assert_eq!(hopf_concat(HopfValue(3), HopfValue(4)), HopfValue(7));
        assert_eq!(hopf_concat(HopfValue(5), HopfValue(0)), HopfValue(5));
        assert_eq!(hopf_concat(HopfValue(9), HopfValue(-9)), HopfValue(0));

        assert_eq!(hopf_reverse(HopfValue(0)), HopfValue(-1));
        assert_eq!(hopf_reverse(HopfValue(-1)), HopfValue(0));
        for h in -20..=20 {
            assert_eq!(hopf_reverse(hopf_reverse(HopfValue(h))), HopfValue(h));
        }
    }

    #[test]
    fn hopf_glue_examples() {
        let base = record(1, true, true);
        let block = record(-1, true, true);
        assert_eq!(hopf_glue(HopfValue(4), HopfValue(0), &base, &block).unwrap(), HopfValue(4));
        assert_eq!(hopf_glue(HopfValue(0), HopfValue(-1), &base, &block).unwrap(), HopfValue(-1));
        for n in -10..=10 {
            assert_eq!(
                hopf_glue(HopfValue(n), HopfValue(-1), &base, &block).unwrap(),
                HopfValue(n - 1)
            );
        }
        let bad_block = record(0, true, true);
        assert!(hopf_glue(HopfValue(0), HopfValue(0), &base, &bad_block).is_err());
    }

    #[test]
    fn hopf_glue_associates_with_concat() {
        let base = record(1, true, true);
        let block = record(-1, true, true);
        for h in -5..=5 {
            for a in -5..=5 {
                for b in -5..=5 {
                    let two = hopf_glue(
                        hopf_glue(HopfValue(h), HopfValue(a), &base, &block).unwrap(),
                        HopfValue(b),
                        &base,
                        &block,
                    )
                    .unwrap();
                    let one = hopf_glue(HopfValue(h), HopfValue(a + b), &base, &block).unwrap();
                    assert_eq!(two, one);
                }
            }
        }
    }

    #[test]
    fn gluing_validation_examples() {
        let identity = GluingData {
            a_class_1: (1, 0),
            a_class_2: (1, 0),
            meridian_1: (0, 1),
            meridian_2: (0, 1),
            map: Gl2z::IDENTITY,
        };
        assert!(validate_gluing(&identity));

        // a map sending (1,0) to (1,1) does not preserve the class (1,0)
        let skew = GluingData { map: Gl2z::LOWER, ..identity.clone() };
        assert!(!validate_gluing(&skew));

        // standard surgery in the (μ, a) basis: μ ↦ μ + a, a ↦ a
        let surgery = GluingData {
            a_class_1: (0, 1),
            a_class_2: (0, 1),
            meridian_1: (1, 0),
            meridian_2: (1, 1),
            map: Gl2z::new(1, 0, 1, 1).unwrap(),
        };
        assert!(validate_gluing(&surgery));
        assert_eq!(surgery.map.apply(surgery.meridian_1), (1, 1));
    }

    #[test]
    fn trefoil_transport_examples() {
        for m_star in -5..=5 {
            assert_eq!(
                trefoil_transport(1 - m_star, m_star, TransportDirection::ToFibration),
                1
            );
            for n in -5..=5 {
                let there = trefoil_transport(n, m_star, TransportDirection::ToFibration);
                assert_eq!(trefoil_transport(there, m_star, TransportDirection::ToReference), n);
            }
        }
    }

    #[test]
    fn bennequin_witnesses() {
        assert!(bennequin_check(1, 1, 0)); // 2 > 0, violation
        assert!(!bennequin_check(-1, 1, 0)); // 0 ≤ 0, tight-compatible
        assert!(bennequin_check(0, 1, 0)); // overtwisted-disk witness
    }
}

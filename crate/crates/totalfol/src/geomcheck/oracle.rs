//! Rotation oracle: numerically integrates the winding of the line
//! `TF^k ∩ span(e_x, e_y)` along a model's strings. This is the
//! independent referee for the symbolic rotation ledger.

use thiserror::Error;

use super::bumps::wrap_unit;
use super::models::FormModel;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("sampling too coarse: single-step line increment {0} turns at step {1}")]
    SamplingTooCoarse(f64, usize),
}

/// Wraps an angle difference to the line branch window `(-1/4, 1/4]`.
fn wrap_half(x: f64) -> f64 {
    0.5 * wrap_unit(2.0 * x)
}

/// Winding (in turns) of the k-th line field along the `j`-th string,
/// for k = 1, 2.
///
/// The line at a string point is the kernel-plane's intersection with the
/// fiber plane: direction `(c_y, -c_x)` from the row's coefficients. Angle
/// increments are accumulated with the branch chosen in `(-1/4, 1/4]`; a
/// near-branch-boundary step reports the sampling as too coarse.
pub fn rotation_oracle(model: &FormModel, j: usize, samples: usize) -> Result<[f64; 2], OracleError> {
    let pts = model.string_curve(j, samples);
    let mut total = [0.0f64; 2];
    for k in 0..2 {
        let mut prev: Option<f64> = None;
        for (i, p) in pts.iter().enumerate() {
            let c = model.rows(*p)[k];
            let angle = (-c[1]).atan2(c[2]) / std::f64::consts::TAU;
            if let Some(last) = prev {
                let step = wrap_half(angle - last);
                if step.abs() > 0.23 {
                    return Err(OracleError::SamplingTooCoarse(step, i));
                }
                total[k] += step;
            }
            prev = Some(angle);
        }
    }
    Ok(total)
}

/// Oracle value averaged over all strings (they agree for every catalog
/// model; the spread is returned for diagnostics).
pub fn rotation_oracle_all(
    model: &FormModel,
    samples: usize,
) -> Result<([f64; 2], f64), OracleError> {
    let n = model.strands();
    let mut acc = [0.0f64; 2];
    let mut spread = 0.0f64;
    let mut per: Vec<[f64; 2]> = Vec::with_capacity(n);
    for j in 0..n {
        let v = rotation_oracle(model, j, samples)?;
        per.push(v);
        acc[0] += v[0];
        acc[1] += v[1];
    }
    let mean = [acc[0] / n as f64, acc[1] / n as f64];
    for v in per {
        spread = spread.max((v[0] - mean[0]).abs()).max((v[1] - mean[1]).abs());
    }
    Ok((mean, spread))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folblocks::{catalog, BlockId};
    use crate::geomcheck::models::model_for_block;

    const TOL: f64 = 1e-3;

    fn assert_rot(model: &FormModel, want: [f64; 2]) {
        let (got, spread) = rotation_oracle_all(model, 2048).unwrap();
        assert!(
            (got[0] - want[0]).abs() < TOL && (got[1] - want[1]).abs() < TOL,
            "oracle {got:?}, want {want:?}"
        );
        assert!(spread < TOL, "strings disagree by {spread}");
    }

    #[test]
    fn std_block_has_no_rotation() {
        assert_rot(&FormModel::Std { n: 2 }, [0.0, 0.0]);
    }

    #[test]
    fn shear_block_rotation() {
        assert_rot(&FormModel::shear(1), [0.125, 0.0]);
        assert_rot(&FormModel::shear(2), [0.125, 0.0]);
    }

    #[test]
    fn transposed_shear_rotation() {
        assert_rot(&FormModel::transpose(FormModel::shear(2)), [0.0, -0.125]);
    }

    #[test]
    fn inverse_blocks_resolve_the_pending_values() {
        // the inversion defect law says (−1/8, 0) and (0, 1/8)
        assert_rot(&model_for_block(&BlockId::F1Inv, 2).unwrap(), [-0.125, 0.0]);
        assert_rot(&model_for_block(&BlockId::F2Inv, 2).unwrap(), [0.0, 0.125]);
    }

    #[test]
    fn triple_composite_rotation() {
        let g = FormModel::compose(
            FormModel::shear(1),
            FormModel::invert(FormModel::transpose(FormModel::shear(1))),
        );
        assert_rot(&g, [0.125, 0.25]);
        let g3 = FormModel::compose(FormModel::compose(g.clone(), g.clone()), g);
        assert_rot(&g3, [0.5, 0.5]);
    }

    #[test]
    fn oracle_is_stable_under_sample_doubling() {
        let model = FormModel::compose(
            FormModel::shear(1),
            FormModel::invert(FormModel::transpose(FormModel::shear(1))),
        );
        let a = rotation_oracle(&model, 0, 2048).unwrap();
        let b = rotation_oracle(&model, 0, 4096).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-6 && (a[1] - b[1]).abs() < 1e-6);
    }

    #[test]
    fn ledger_matches_oracle_on_braid_and_holonomy_blocks() {
        let n = 2;
        for id in [
            BlockId::BraidGen(crate::folblocks::TorusGen::Sigma(0)),
            BlockId::BraidGen(crate::folblocks::TorusGen::Rho(1)),
            BlockId::BraidGen(crate::folblocks::TorusGen::Tau(0)),
            BlockId::Holonomy(vec![
                [crate::folblocks::HolonomyTag::Identity, crate::folblocks::HolonomyTag::ReebConjugate],
                [crate::folblocks::HolonomyTag::Identity, crate::folblocks::HolonomyTag::Identity],
            ]),
        ] {
            let block = catalog(&id, n).unwrap();
            let model = model_for_block(&id, n).unwrap();
            assert_eq!(model.twist(), block.twist);
            assert_rot(&model, block.theta);
        }
    }
}

//! Smooth bump and ramp functions underlying the model forms.
//!
//! Everything is built from the standard `exp(-1/s)` mollifier, so all
//! profiles are genuinely C^∞ with compactly supported derivatives. The
//! support intervals and amplitude bounds are the load-bearing facts; the
//! checks downstream are representative-independent.

/// `exp(-1/s)` for `s > 0`, zero otherwise.
fn mollifier(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for `s ≤ 0`, 1 for `s ≥ 1`, strictly increasing between.
/// Max slope ≈ 1.93.
pub fn smooth_step(s: f64) -> f64 {
    let a = mollifier(s);
    let b = mollifier(1.0 - s);
    a / (a + b)
}

/// Smooth bump on (0, 1): zero outside, strictly positive inside, peak 1
/// at the midpoint.
pub fn smooth_bump(s: f64) -> f64 {
    smooth_step(2.0 * s) * smooth_step(2.0 - 2.0 * s)
}

/// Ramp from 0 at `a` to 1 at `b`.
pub fn ramp(t: f64, a: f64, b: f64) -> f64 {
    smooth_step((t - a) / (b - a))
}

/// Strand anchor `q_j = j/n` on the circle.
pub fn q(j: usize, n: usize) -> f64 {
    j as f64 / n as f64
}

/// Amplitude bound for the slope bumps: `1/(100 n)`.
pub fn eta(n: usize) -> f64 {
    1.0 / (100.0 * n as f64)
}

/// Wraps to `(-1/2, 1/2]`.
pub fn wrap_unit(x: f64) -> f64 {
    x - x.round()
}

/// Reduces to `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// Slope bump: strictly inside `(0, η)` exactly on `(1/(16n), 1/(8n))`,
/// zero elsewhere; peak η/2.
pub fn chi1_bar(x: f64, n: usize) -> f64 {
    let w = 1.0 / (16.0 * n as f64);
    0.5 * eta(n) * smooth_bump((x - w) / w)
}

/// Periodic slope profile of the first two standard forms:
/// `χ₁(q_j + x) = χ̄₁(1/(2n) + x) − χ̄₁(1/(2n) − x)` on each period
/// `x ∈ [0, 1/n)`.
pub fn chi1(y: f64, n: usize) -> f64 {
    let period = 1.0 / n as f64;
    let x = frac(y) % period;
    let half = 0.5 * period;
    chi1_bar(half + x, n) - chi1_bar(half - x, n)
}

/// Thick-Reeb slope profile: odd, strictly inside `(0, 1)` exactly on
/// `(1/2, 3/2)`, zero elsewhere; peak 0.8.
pub fn chi_reeb(x: f64) -> f64 {
    let a = x.abs();
    x.signum() * 0.8 * smooth_bump(a - 0.5)
}

/// Degree-one transition: 0 for `x ≤ 1 − 9/(16n)`, 1 for
/// `x ≥ 1 − 7/(16n)`, monotone between; the lift of the twist's circle
/// map on the fundamental domain `[0, 1)`.
pub fn chi3(x: f64, n: usize) -> f64 {
    let lo = 1.0 - 9.0 / (16.0 * n as f64);
    let hi = 1.0 - 7.0 / (16.0 * n as f64);
    ramp(frac(x), lo, hi)
}

/// Central finite-difference derivative helper used for the profile
/// functions whose closed-form derivatives are not needed exactly.
pub fn diff_central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Compactly supported germ displacement: zero outside `(-2, 2)`, fixes 0,
/// slope bounded by ~1.6.
pub fn germ_bump(u: f64) -> f64 {
    u * smooth_bump((u + 2.0) / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_endpoints_and_monotonicity() {
        assert_eq!(smooth_step(-0.3), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_eq!(smooth_step(2.0), 1.0);
        let mut prev = 0.0;
        for i in 0..=100 {
            let v = smooth_step(i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn chi1_bar_support_and_bound() {
        for n in [1usize, 2, 4] {
            let (lo, hi) = (1.0 / (16.0 * n as f64), 1.0 / (8.0 * n as f64));
            assert_eq!(chi1_bar(lo, n), 0.0);
            assert_eq!(chi1_bar(hi, n), 0.0);
            assert_eq!(chi1_bar(lo - 0.01, n), 0.0);
            for i in 1..32 {
                let x = lo + (hi - lo) * i as f64 / 32.0;
                let v = chi1_bar(x, n);
                assert!(v > 0.0 && v < eta(n), "chi1_bar({x}) = {v}");
            }
        }
    }

    #[test]
    fn chi1_vanishes_on_strands() {
        for n in [1usize, 3, 4] {
            for j in 0..n {
                assert_eq!(chi1(q(j, n), n), 0.0);
            }
            // bounded by eta everywhere
            for i in 0..400 {
                assert!(chi1(i as f64 / 400.0, n).abs() < eta(n));
            }
        }
    }

    #[test]
    fn chi_reeb_is_odd_with_unit_bound() {
        for i in 0..200 {
            let x = -2.0 + 4.0 * i as f64 / 200.0;
            assert!((chi_reeb(x) + chi_reeb(-x)).abs() < 1e-15);
            assert!(chi_reeb(x).abs() < 1.0);
        }
        assert_eq!(chi_reeb(0.25), 0.0);
        assert!(chi_reeb(1.0) > 0.0);
        assert_eq!(chi_reeb(1.5), 0.0);
    }

    #[test]
    fn chi3_transition_and_slope() {
        for n in [1usize, 2, 4] {
            assert_eq!(chi3(0.0, n), 0.0);
            assert_eq!(chi3(1.0 - 9.0 / (16.0 * n as f64), n), 0.0);
            assert_eq!(chi3(1.0 - 7.0 / (16.0 * n as f64), n), 1.0);
            assert_eq!(chi3(0.999_999, n), 1.0);
            // circle-map slope stays well under the horizontality budget 1/η
            for i in 0..500 {
                let x = i as f64 / 500.0;
                let d = wrap_unit(chi3(x + 1e-6, n) - chi3(x - 1e-6, n)).abs() / 2e-6;
                assert!(d <= 0.9 / eta(n), "slope {d} at {x}");
            }
        }
    }

    #[test]
    fn chi1_and_chi3_have_disjoint_supports() {
        // the boundary-gluing exactness rests on χ₁·χ₃′ ≡ 0
        for n in [1usize, 2, 3, 4] {
            for i in 0..2000 {
                let x = i as f64 / 2000.0;
                let d3 = diff_central(|x| chi3(x, n), x, 1e-7);
                assert!(
                    chi1(x, n).abs() * d3.abs() < 1e-12,
                    "supports overlap at {x} for n={n}"
                );
            }
        }
    }

    #[test]
    fn germ_bump_fixes_origin_and_is_compact() {
        assert_eq!(germ_bump(0.0), 0.0);
        assert_eq!(germ_bump(2.0), 0.0);
        assert_eq!(germ_bump(-2.0), 0.0);
        assert!(germ_bump(1.0) != 0.0);
        for i in 0..200 {
            let u = -2.0 + 4.0 * i as f64 / 200.0;
            let d = diff_central(germ_bump, u, 1e-6).abs();
            assert!(d < 1.6, "germ slope {d} at {u}");
        }
    }
}

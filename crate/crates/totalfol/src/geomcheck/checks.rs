//! Grid checks over the model forms: transversality, integrability
//! residuals, slope bounds and boundary gluing. Every check produces a
//! [`CheckItem`] with the grid description, tolerance, measured value and
//! verdict; a report never skips a check silently.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bumps;
use super::models::{FormModel, Row, P3};
use crate::sl2z::Gl2z;

/// Sampling grid over a coordinate box. The t axis samples both endpoints;
/// the fiber axes are treated as circles when `periodic` is set (no
/// duplicated seam point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nt: usize,
    pub nx: usize,
    pub ny: usize,
    pub t_range: (f64, f64),
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub periodic: bool,
}

impl GridSpec {
    /// Full slab `[0,1] × T²` with `n` samples per axis.
    pub fn slab(n: usize) -> GridSpec {
        GridSpec {
            nt: n,
            nx: n,
            ny: n,
            t_range: (0.0, 1.0),
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            periodic: true,
        }
    }

    /// Solid-torus chart `S¹ × [−1,1]²`.
    pub fn solid_torus_chart(n: usize) -> GridSpec {
        GridSpec {
            nt: n,
            nx: n,
            ny: n,
            t_range: (0.0, 1.0),
            x_range: (-1.0, 1.0),
            y_range: (-1.0, 1.0),
            periodic: false,
        }
    }

    /// Sub-box of the slab (used to observe convergence away from the
    /// shear model's transition step).
    pub fn window(n: usize, t: (f64, f64), x: (f64, f64), y: (f64, f64)) -> GridSpec {
        GridSpec { nt: n, nx: n, ny: n, t_range: t, x_range: x, y_range: y, periodic: false }
    }

    fn axis(lo: f64, hi: f64, k: usize, i: usize, periodic: bool) -> f64 {
        if periodic {
            lo + (hi - lo) * i as f64 / k as f64
        } else if k <= 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (k - 1) as f64
        }
    }

    pub fn len(&self) -> usize {
        self.nt * self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, idx: usize) -> P3 {
        let it = idx / (self.nx * self.ny);
        let ix = (idx / self.ny) % self.nx;
        let iy = idx % self.ny;
        P3::new(
            Self::axis(self.t_range.0, self.t_range.1, self.nt, it, false),
            Self::axis(self.x_range.0, self.x_range.1, self.nx, ix, self.periodic),
            Self::axis(self.y_range.0, self.y_range.1, self.ny, iy, self.periodic),
        )
    }

    pub fn describe(&self) -> String {
        format!(
            "{}x{}x{} over t[{},{}] x[{},{}] y[{},{}]",
            self.nt,
            self.nx,
            self.ny,
            self.t_range.0,
            self.t_range.1,
            self.x_range.0,
            self.x_range.1,
            self.y_range.0,
            self.y_range.1
        )
    }
}

/// Region restriction for the slope check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Full,
    /// Slab minus the open turbularization boxes between the string lanes.
    OutsideBoxes,
}

fn in_region(region: Region, n: usize, p: P3) -> bool {
    match region {
        Region::Full => true,
        Region::OutsideBoxes => {
            if p.t <= 0.25 || p.t >= 1.0 / 3.0 {
                return true;
            }
            let nd = n as f64;
            let x = bumps::frac(p.x);
            !(0..n).any(|j| {
                let lo = bumps::q(j, n) + 1.0 / (4.0 * nd);
                let hi = bumps::q(j, n) + 3.0 / (4.0 * nd);
                x > lo && x < hi
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub grid: String,
    pub tolerance: f64,
    pub measured: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checks: Vec<CheckItem>,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn push(&mut self, item: CheckItem) {
        self.checks.push(item);
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }
}

/// Minimum |det| of the coefficient matrix over the grid; passes iff it
/// stays at or above `threshold`.
pub fn transversality_check(model: &FormModel, grid: &GridSpec, threshold: f64, name: &str) -> CheckItem {
    let min = (0..grid.len())
        .into_par_iter()
        .map(|i| model.det(grid.point(i)).abs())
        .reduce(|| f64::INFINITY, f64::min);
    CheckItem {
        name: format!("transversality:{name}"),
        grid: grid.describe(),
        tolerance: threshold,
        measured: min,
        pass: min >= threshold,
    }
}

fn row_partials(model: &FormModel, p: P3, h: f64) -> [[Row; 3]; 3] {
    let d = |a: [Row; 3], b: [Row; 3]| -> [Row; 3] {
        let mut out = [[0.0; 3]; 3];
        for k in 0..3 {
            for c in 0..3 {
                out[k][c] = (a[k][c] - b[k][c]) / (2.0 * h);
            }
        }
        out
    };
    [
        d(model.rows(P3::new(p.t + h, p.x, p.y)), model.rows(P3::new(p.t - h, p.x, p.y))),
        d(model.rows(P3::new(p.t, p.x + h, p.y)), model.rows(P3::new(p.t, p.x - h, p.y))),
        d(model.rows(P3::new(p.t, p.x, p.y + h)), model.rows(P3::new(p.t, p.x, p.y - h))),
    ]
}

/// Integrability residual `ω ∧ dω` of one row via central differences.
fn frobenius_residual_at(model: &FormModel, p: P3, h: f64) -> f64 {
    let rows = model.rows(p);
    let [dt, dx, dy] = row_partials(model, p, h);
    let mut worst = 0.0f64;
    for k in 0..3 {
        let (pc, qc, rc) = (rows[k][0], rows[k][1], rows[k][2]);
        let residual = pc * (dx[k][2] - dy[k][1]) - qc * (dt[k][2] - dy[k][0])
            + rc * (dt[k][1] - dx[k][0]);
        worst = worst.max(residual.abs());
    }
    worst
}

/// Max integrability residual over the grid with finite-difference step
/// `h`; passes iff at most `tol`.
pub fn frobenius_check(model: &FormModel, grid: &GridSpec, h: f64, tol: f64, name: &str) -> CheckItem {
    let max = (0..grid.len())
        .into_par_iter()
        .map(|i| frobenius_residual_at(model, grid.point(i), h))
        .reduce(|| 0.0, f64::max);
    CheckItem {
        name: format!("frobenius:{name}"),
        grid: format!("{} h={h}", grid.describe()),
        tolerance: tol,
        measured: max,
        pass: max <= tol,
    }
}

/// Worst slope of the plane field of one row against the horizontal: for
/// the kernel of `P dt + Q dx + R dy` the extreme ratio
/// `|dy(v)| / √(dt(v)²+dx(v)²)` equals `√(P²+Q²)/|R|`; passes iff it stays
/// at or below `1/η` on the region.
pub fn almost_horizontal_check(
    model: &FormModel,
    row: usize,
    region: Region,
    grid: &GridSpec,
    name: &str,
) -> CheckItem {
    let n = model.strands();
    let budget = 1.0 / bumps::eta(n);
    let max = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let p = grid.point(i);
            if !in_region(region, n, p) {
                return 0.0;
            }
            let c = model.rows(p)[row];
            let planar = (c[0] * c[0] + c[1] * c[1]).sqrt();
            if c[2].abs() < 1e-12 * planar.max(1.0) {
                f64::INFINITY
            } else {
                planar / c[2].abs()
            }
        })
        .reduce(|| 0.0, f64::max);
    CheckItem {
        name: format!("almost_horizontal:{name}"),
        grid: grid.describe(),
        tolerance: budget,
        measured: max,
        pass: max <= budget,
    }
}

/// Sign-canonical unit row: normalized, first component of significant
/// magnitude made positive.
fn normalize_row(c: Row) -> Row {
    let norm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    if norm == 0.0 {
        return c;
    }
    let mut out = [c[0] / norm, c[1] / norm, c[2] / norm];
    let lead = out.iter().find(|v| v.abs() > 1e-9).copied().unwrap_or(0.0);
    if lead < 0.0 {
        for v in &mut out {
            *v = -*v;
        }
    }
    out
}

fn row_distance(a: Row, b: Row) -> f64 {
    let (a, b) = (normalize_row(a), normalize_row(b));
    (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}

/// Pushforward of the standard rows by the linear fiber map `a`.
fn twisted_std_rows(n: usize, a: &Gl2z, p: P3) -> [Row; 3] {
    let inv = a.inv();
    let (x, y) = inv.apply_f64((p.x, p.y));
    let std = FormModel::Std { n };
    std.rows(P3::new(p.t, x, y)).map(|c| {
        [
            c[0],
            c[1] * inv.a as f64 + c[2] * inv.c as f64,
            c[1] * inv.b as f64 + c[2] * inv.d as f64,
        ]
    })
}

/// Compares the model's planes against the standard triple near the bottom
/// and the `a`-pushforward of the standard triple near the top, on the
/// t-slices {0, 1/16, 15/16, 1}; rows are compared sign-normalized.
pub fn boundary_gluing_check(model: &FormModel, a: &Gl2z, tol: f64, samples: usize, name: &str) -> CheckItem {
    let n = model.strands();
    let std = FormModel::Std { n };
    let mut max = 0.0f64;
    for (t, top) in [(0.0, false), (0.0625, false), (0.9375, true), (1.0, true)] {
        let slice: f64 = (0..samples * samples)
            .into_par_iter()
            .map(|i| {
                let x = (i / samples) as f64 / samples as f64;
                let y = (i % samples) as f64 / samples as f64;
                let p = P3::new(t, x, y);
                let got = model.rows(p);
                let want = if top { twisted_std_rows(n, a, p) } else { std.rows(p) };
                (0..3).map(|k| row_distance(got[k], want[k])).fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        max = max.max(slice);
    }
    CheckItem {
        name: format!("boundary_gluing:{name}"),
        grid: format!("{samples}x{samples} slices t in {{0, 1/16, 15/16, 1}}"),
        tolerance: tol,
        measured: max,
        pass: max <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_triples_are_transverse() {
        for n in 1..=4 {
            let item = transversality_check(&FormModel::Std { n }, &GridSpec::slab(32), 0.9, "std");
            assert!(item.pass, "n={n}: {item:?}");
        }
    }

    #[test]
    fn reeb_triple_is_transverse_on_the_chart() {
        let item =
            transversality_check(&FormModel::Reeb, &GridSpec::solid_torus_chart(32), 0.9, "reeb");
        assert!(item.pass, "{item:?}");
        assert!((item.measured - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_triple_fails_transversality() {
        let item = transversality_check(
            &FormModel::DegenerateRepeat { n: 1 },
            &GridSpec::slab(16),
            0.5,
            "degenerate",
        );
        assert!(!item.pass);
        assert_eq!(item.measured, 0.0);
    }

    #[test]
    fn std_and_reeb_frobenius_residuals_vanish() {
        let item = frobenius_check(&FormModel::Std { n: 1 }, &GridSpec::slab(24), 1e-3, 1e-5, "std");
        assert!(item.pass, "{item:?}");
        let item = frobenius_check(
            &FormModel::Reeb,
            &GridSpec::solid_torus_chart(24),
            1e-3,
            1e-5,
            "reeb",
        );
        assert!(item.pass, "{item:?}");
    }

    #[test]
    fn non_integrable_fixture_is_detected() {
        let item = frobenius_check(
            &FormModel::NonIntegrable { n: 1 },
            &GridSpec::slab(12),
            1e-3,
            1e-5,
            "fixture",
        );
        assert!(!item.pass);
        assert!((item.measured - 1.0).abs() < 1e-6, "{item:?}");
    }

    #[test]
    fn shear_frobenius_converges_quadratically() {
        // smooth window inside the untwisting band, away from the seam
        let grid = GridSpec::window(12, (0.78, 0.87), (0.45, 0.62), (0.05, 0.95));
        let model = FormModel::shear(1);
        let coarse = frobenius_check(&model, &grid, 1e-2, f64::INFINITY, "shear").measured;
        let fine = frobenius_check(&model, &grid, 1e-3, f64::INFINITY, "shear").measured;
        assert!(coarse > 1e-8, "window must expose curvature, got {coarse}");
        let ratio = coarse / fine;
        assert!((20.0..500.0).contains(&ratio), "O(h²) expected, ratio {ratio}");
    }

    #[test]
    fn slope_checks() {
        let grid = GridSpec::slab(24);
        let item = almost_horizontal_check(&FormModel::Std { n: 1 }, 0, Region::OutsideBoxes, &grid, "std1");
        assert!(item.pass, "{item:?}");
        let item = almost_horizontal_check(&FormModel::shear(1), 0, Region::OutsideBoxes, &grid, "shear");
        assert!(item.pass, "{item:?}");
        let item = almost_horizontal_check(&FormModel::VerticalX { n: 1 }, 0, Region::OutsideBoxes, &grid, "dx");
        assert!(!item.pass);
        assert_eq!(item.measured, f64::INFINITY);
    }

    #[test]
    fn boundary_checks() {
        let item = boundary_gluing_check(&FormModel::Std { n: 1 }, &Gl2z::IDENTITY, 1e-12, 24, "std");
        assert!(item.pass, "{item:?}");
        assert_eq!(item.measured, 0.0);

        let item = boundary_gluing_check(&FormModel::shear(1), &Gl2z::LOWER, 1e-9, 24, "shear");
        assert!(item.pass, "{item:?}");

        // tested against the wrong twist the shear must fail
        let item = boundary_gluing_check(&FormModel::shear(1), &Gl2z::UPPER, 1e-9, 24, "shear-wrong");
        assert!(!item.pass);

        let f2 = FormModel::transpose(FormModel::shear(2));
        let item = boundary_gluing_check(&f2, &Gl2z::UPPER, 1e-9, 24, "f2");
        assert!(item.pass, "{item:?}");
    }
}

//! Closed-form masses of the continuous components.
//!
//! All functions return unweighted probabilities; callers multiply by the
//! component weight.

use std::f64::consts::PI;

/// Fraction of a disk of radius `r` on the far side of a chord at signed
/// distance `s` from the center.
pub fn disk_segment_fraction(s: f64, r: f64) -> f64 {
    if s >= r {
        return 0.0;
    }
    if s <= -r {
        return 1.0;
    }
    let q = s / r;
    ((q.acos() - q * (1.0 - q * q).sqrt()) / PI).clamp(0.0, 1.0)
}

/// `P(X >= t)` for a standard Cauchy variable.
pub fn cauchy_upper_tail(t: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t == f64::INFINITY {
        return 0.0;
    }
    if t == f64::NEG_INFINITY {
        return 1.0;
    }
    if t > 0.0 {
        (1.0 / t).atan() / PI
    } else {
        0.5 + (-t).atan() / PI
    }
}

/// Mass of `{y : <u, y> >= c}` under independent standard Cauchy
/// coordinates shifted by `center`, in any dimension. `<u, X>` is Cauchy with
/// location `<u, center>` and scale `|u|_1`.
pub fn cauchy_product_halfspace(u: &[f64], c: f64, center: &[f64]) -> f64 {
    let scale: f64 = u.iter().map(|v| v.abs()).sum();
    let loc: f64 = u.iter().zip(center).map(|(a, b)| a * b).sum();
    if scale == 0.0 {
        return if loc >= c { 1.0 } else { 0.0 };
    }
    cauchy_upper_tail((c - loc) / scale)
}

/// Tolerance below which a normal component counts as zero, making the
/// corresponding coordinate axis parallel to the halfspace boundary.
pub const AXIS_PARALLEL_TOL: f64 = 1e-12;

/// Mass of `{y : <u, y> >= c}` (or `> c` when `open`) under the mixture that
/// puts mass `1/d` on each coordinate axis, distributed there as a standard
/// Cauchy variable.
pub fn axis_cauchy_halfspace(u: &[f64], c: f64, open: bool) -> f64 {
    let d = u.len() as f64;
    let mut total = 0.0;
    for &ui in u {
        let part = if ui.abs() <= AXIS_PARALLEL_TOL {
            let inside = if open { 0.0 > c } else { 0.0 >= c };
            if inside {
                1.0
            } else {
                0.0
            }
        } else if ui > 0.0 {
            cauchy_upper_tail(c / ui)
        } else {
            cauchy_upper_tail(-c / ui)
        };
        total += part;
    }
    total / d
}

/// Depth of the axis Cauchy mixture (equivalently, of the Cauchy product
/// with weight `1/d` plus an atom at the origin) at `x`.
pub fn cauchy_cross_depth(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let m = x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if m == 0.0 {
        return 0.5;
    }
    (0.5 - m.atan() / PI) / d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn segment_fraction_matches_known_values() {
        assert!((disk_segment_fraction(0.0, 2.0) - 0.5).abs() < 1e-15);
        let alpha = (PI - 2.0) / (4.0 * PI);
        assert!((disk_segment_fraction(2f64.sqrt(), 2.0) - alpha).abs() < 1e-15);
        assert_eq!(disk_segment_fraction(2.0, 2.0), 0.0);
        assert_eq!(disk_segment_fraction(-3.0, 2.0), 1.0);
    }

    #[test]
    fn segment_fraction_matches_quadrature_of_chord_lengths() {
        for &s in &[-1.7, -0.4, 0.3, 1.1, 1.95] {
            let r: f64 = 2.0;
            let chord = |t: f64| 2.0 * (r * r - t * t).max(0.0).sqrt();
            let area = simpson(chord, s, r, 200_000);
            let expected = area / (PI * r * r);
            assert!((disk_segment_fraction(s, r) - expected).abs() < 1e-7, "s={s}");
        }
    }

    #[test]
    fn cauchy_tail_is_symmetric_and_accurate_far_out() {
        for &t in &[0.0, 0.5, 1.0, 3.0, 1e6] {
            let sum = cauchy_upper_tail(t) + cauchy_upper_tail(-t);
            assert!((sum - 1.0).abs() < 1e-15);
        }
        assert!((cauchy_upper_tail(1.0) - 0.25).abs() < 1e-16);
        // 1/(pi t) asymptotics.
        let t = 1e12;
        assert!((cauchy_upper_tail(t) * PI * t - 1.0).abs() < 1e-9);
    }

    #[test]
    fn axis_mixture_counts_parallel_axes_all_or_nothing() {
        // Open halfplane y2 > 0: only half of the second axis.
        assert!((axis_cauchy_halfspace(&[0.0, 1.0], 0.0, true) - 0.25).abs() < 1e-16);
        assert!((axis_cauchy_halfspace(&[0.0, 1.0], 0.0, false) - 0.75).abs() < 1e-16);
        assert!((axis_cauchy_halfspace(&[1.0, 0.0], 1.0, false) - 0.125).abs() < 1e-16);
    }

    #[test]
    fn closed_depth_formula_in_three_dimensions_bounds_sampled_halfspaces() {
        // Each sampled halfspace through x has mass at least the depth; axis
        // normals reach it.
        let x = [0.7, -1.3, 0.2];
        let depth = cauchy_cross_depth(&x);
        let mut best = f64::INFINITY;
        for i in 0..400 {
            let a = i as f64 * 0.37;
            let b = i as f64 * 0.91;
            let u = [a.cos() * b.sin(), a.sin() * b.sin(), b.cos()];
            let c: f64 = u.iter().zip(&x).map(|(p, q)| p * q).sum();
            let m = cauchy_product_halfspace(&u, c, &[0.0; 3]) / 3.0;
            assert!(m >= depth - 1e-15);
            best = best.min(m);
        }
        let axis = cauchy_product_halfspace(&[0.0, -1.0, 0.0], 1.3, &[0.0; 3]) / 3.0;
        assert!((axis - depth).abs() < 1e-15);
        assert!(best >= depth);
    }
}

//! Real roots of monic quartics via companion-matrix eigenvalues.

use nalgebra::Matrix4;

const IMAG_TOL: f64 = 1e-7;

/// All roots of `x^4 + c[3] x^3 + c[2] x^2 + c[1] x + c[0]`.
pub fn quartic_roots(c: [f64; 4]) -> [num_complex::Complex64; 4] {
    #[rustfmt::skip]
    let companion = Matrix4::new(
        0.0, 0.0, 0.0, -c[0],
        1.0, 0.0, 0.0, -c[1],
        0.0, 1.0, 0.0, -c[2],
        0.0, 0.0, 1.0, -c[3],
    );
    let ev = companion.complex_eigenvalues();
    [ev[0], ev[1], ev[2], ev[3]]
}

/// Real roots, Newton-polished and sorted ascending.
pub fn real_roots(c: [f64; 4]) -> Vec<f64> {
    let mut roots: Vec<f64> = quartic_roots(c)
        .iter()
        .filter(|z| z.im.abs() <= IMAG_TOL * z.re.abs().max(1.0))
        .map(|z| polish(c, z.re))
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// Positive real root closest to `target`.
pub fn positive_root_nearest(c: [f64; 4], target: f64) -> Option<f64> {
    real_roots(c)
        .into_iter()
        .filter(|&x| x > 0.0)
        .min_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()))
}

pub fn evaluate(c: [f64; 4], x: f64) -> f64 {
    (((x + c[3]) * x + c[2]) * x + c[1]) * x + c[0]
}

fn derivative(c: [f64; 4], x: f64) -> f64 {
    ((4.0 * x + 3.0 * c[3]) * x + 2.0 * c[2]) * x + c[1]
}

fn polish(c: [f64; 4], mut x: f64) -> f64 {
    for _ in 0..8 {
        let d = derivative(c, x);
        if d == 0.0 {
            break;
        }
        let step = evaluate(c, x) / d;
        if !step.is_finite() {
            break;
        }
        let next = x - step;
        if (evaluate(c, next)).abs() > (evaluate(c, x)).abs() {
            break;
        }
        x = next;
        if step.abs() <= f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factored_quartic() {
        // (x-1)(x-2)(x+3)(x-0.5)
        let c = [-3.0, 9.5, -7.0, -0.5];
        let r = real_roots(c);
        assert_eq!(r.len(), 4);
        for (got, want) in r.iter().zip([-3.0, 0.5, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
        assert_eq!(positive_root_nearest(c, 0.8), Some(r[2]));
        assert!((positive_root_nearest(c, -5.0).unwrap() - 0.5).abs() < 1e-13);
    }

    #[test]
    fn complex_pairs_are_dropped() {
        // (x^2+1)(x^2+4)
        assert!(real_roots([4.0, 0.0, 5.0, 0.0]).is_empty());
        // (x^2+1)(x-1)(x-3)
        let r = real_roots([3.0, -4.0, 4.0, -4.0]);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 1.0).abs() < 1e-13 && (r[1] - 3.0).abs() < 1e-13);
        assert_eq!(positive_root_nearest([4.0, 0.0, 5.0, 0.0], 1.0), None);
    }

    #[test]
    fn biquadratic_closed_form() {
        let u = 0.03;
        let g = ((1.0 + (1.0f64 + 12.0 * u).sqrt()) / 2.0).sqrt();
        let got = positive_root_nearest([-3.0 * u, 0.0, -1.0, 0.0], 1.0).unwrap();
        assert!((got - g).abs() < 1e-14);
    }
}

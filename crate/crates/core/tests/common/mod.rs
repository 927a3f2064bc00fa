//! Independent oracles shared by the integration tests. Nothing here calls
//! into the fusion code it is used to check.

#![allow(dead_code)]

/// Midpoint grid of `n` points on (0, 1/2) under `x = u^6 / 2`, as
/// `(x, weight)` pairs.
///
/// `x^(a - 1) dx` becomes a multiple of `u^(6a - 1) du`, smooth for every
/// `a >= 1/2`. Pair it with the mirror `x -> 1 - x` (swap the shapes) to
/// cover the whole interval without any node near 1.
pub fn lower_half_grid(n: usize) -> Vec<(f64, f64)> {
    let du = 1.0 / n as f64;
    (0..n)
        .map(|k| {
            let u = (k as f64 + 0.5) * du;
            (0.5 * u.powi(6), 3.0 * u.powi(5) * du)
        })
        .collect()
}

// Zeroth and first moment of y^p (1 - y)^q over y in (0, 1/2), with the
// first moment taken in x = y (`flip` false) or x = 1 - y (`flip` true).
// Substituting y = u^m / 2 with m = max(1, 3 / (p + 1)) turns y^p dy into a
// multiple of u^(m (p + 1) - 1) du, at worst u^2, so a singular kernel
// becomes smooth and a regular one keeps its shape.
fn half_moments(p: f64, q: f64, n: usize, flip: bool) -> (f64, f64) {
    let m = (3.0 / (p + 1.0)).max(1.0);
    let scale = 0.5f64.powf(p + 1.0) * m;
    let du = 1.0 / n as f64;
    let (mut mass, mut first) = (0.0, 0.0);
    for k in 0..n {
        let u = (k as f64 + 0.5) * du;
        let y = 0.5 * u.powf(m);
        let w = u.powf(m * (p + 1.0) - 1.0) * (1.0 - y).powf(q);
        mass += w;
        first += w * if flip { 1.0 - y } else { y };
    }
    (scale * mass * du, scale * first * du)
}

/// Mean of the density proportional to the kernel product
/// `x^(a1 - 1) (1 - x)^(b1 - 1) * x^(a2 - 1) (1 - x)^(b2 - 1)`,
/// by quadrature with `n` points on each half of (0, 1).
/// `None` when the product is not integrable.
pub fn kernel_product_mean(n: usize, a1: f64, b1: f64, a2: f64, b2: f64) -> Option<f64> {
    let p = a1 - 1.0 + a2 - 1.0;
    let q = b1 - 1.0 + b2 - 1.0;
    if !(p > -1.0 && q > -1.0) {
        return None;
    }
    let (lower_mass, lower_first) = half_moments(p, q, n, false);
    let (upper_mass, upper_first) = half_moments(q, p, n, true);
    Some((lower_first + upper_first) / (lower_mass + upper_mass))
}

/// Straight-line fusion of two (mean, variance) pairs: moment inversion,
/// posterior shapes, weights, weighted sum. `None` when any step is undefined.
pub fn straight_line_fusion(mean_a: f64, var_a: f64, mean_b: f64, var_b: f64) -> Option<f64> {
    let pa = mean_a.clamp(1e-6, 1.0 - 1e-6);
    let pb = mean_b.clamp(1e-6, 1.0 - 1e-6);
    if var_a >= pa * (1.0 - pa) || var_b >= pb * (1.0 - pb) {
        return None;
    }
    let alpha_a = pa * (pa * (1.0 - pa) / var_a - 1.0);
    let beta_a = alpha_a * (1.0 - pa) / pa;
    let alpha_b = pb * (pb * (1.0 - pb) / var_b - 1.0);
    let beta_b = alpha_b * (1.0 - pb) / pb;
    if alpha_a + alpha_b - 1.0 <= 0.0 || beta_a + beta_b - 1.0 <= 0.0 {
        return None;
    }
    let k = alpha_a + alpha_b + beta_a + beta_b - 2.0;
    let w_a = (alpha_a + beta_a) / k;
    let w_b = (alpha_b + beta_b) * (alpha_b - 1.0) / (alpha_b * k);
    Some((pa * w_a + pb * w_b).clamp(0.0, 1.0))
}

/// Oracle decision chain: (combined or 0, risk, decision name).
pub fn straight_line_decision(t: f64, a: f64, b: f64, c: Option<f64>, appetite: f64) -> (f64, f64, &'static str) {
    if a >= t {
        return (0.0, 0.0, "AcceptDirect");
    }
    if b >= t {
        return (0.0, 0.0, "AcceptIndirect");
    }
    let c = c.expect("fusion defined");
    let r = (t - c).max(0.0);
    let label = if r == 0.0 {
        "AcceptCombined"
    } else if r <= appetite {
        "AcceptWithRisk"
    } else {
        "Decline"
    };
    (c, r, label)
}

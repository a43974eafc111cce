use std::f64::consts::PI;

const RESCALE: f64 = 1e150;
const LN_RESCALE: f64 = 345.387_763_949_107; // ln(1e150)

/// L²-normalised Hermite function `h_k(x)`.
///
/// Three-term recurrence seeded with `π^{-1/4} e^{-x²/2}`; the Gaussian factor
/// is carried as a separate exponent so that the recurrence stays accurate
/// past the point where the seed alone would underflow.
pub fn hermite_1d(k: usize, x: f64) -> f64 {
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    for j in 0..k {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += LN_RESCALE;
        }
    }
    cur * log_scale.exp()
}

/// `[h_0(x), …, h_kmax(x)]`.
pub fn hermite_table(kmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let mut scales = Vec::with_capacity(kmax + 1);
    out.push(cur);
    scales.push(log_scale);
    for j in 0..kmax {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += LN_RESCALE;
        }
        out.push(cur);
        scales.push(log_scale);
    }
    out.iter().zip(scales).map(|(v, s)| v * s.exp()).collect()
}

/// Table of the dilated functions `|λ|^{1/4} h_k(|λ|^{1/2} x)`.
pub fn scaled_hermite_table(kmax: usize, lambda_abs: f64, x: f64) -> Vec<f64> {
    let c = lambda_abs.powf(0.25);
    hermite_table(kmax, lambda_abs.sqrt() * x)
        .into_iter()
        .map(|v| c * v)
        .collect()
}

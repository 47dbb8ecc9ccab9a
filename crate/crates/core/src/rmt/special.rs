//! Sine and cosine integrals.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `(Si(x), Ci(x))` for `x > 0`; `Ci` is `-inf` at 0.
///
/// Power series below `x = 2`, otherwise the continued fraction for
/// `E1(ix) = -Ci(x) + i (Si(x) - π/2)` evaluated with the modified Lentz method.
pub fn si_ci(x: f64) -> (f64, f64) {
    let t = x.abs();
    if t == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let (si, ci) = if t < 2.0 {
        series(t)
    } else {
        continued_fraction(t)
    };
    // Si is odd; Ci(-x) has an imaginary part we do not model, so report Ci(|x|)
    (si.copysign(x), ci)
}

pub fn si(x: f64) -> f64 {
    si_ci(x).0
}

pub fn ci(x: f64) -> f64 {
    si_ci(x).1
}

fn series(t: f64) -> (f64, f64) {
    // Si = Σ_k (-1)^k t^{2k+1} / ((2k+1)(2k+1)!)
    // Ci = γ + ln t + Σ_{k>=1} (-1)^k t^{2k} / (2k (2k)!)
    let (mut si, mut ci) = (0.0, 0.0);
    let mut p = 1.0; // t^m / m!
    for m in 1..60u32 {
        p *= t / m as f64;
        let term = p / m as f64;
        match m % 4 {
            1 => si += term,
            2 => ci -= term,
            3 => si -= term,
            _ => ci += term,
        }
        if term < 1e-18 {
            break;
        }
    }
    (si, EULER_GAMMA + t.ln() + ci)
}

fn continued_fraction(t: f64) -> (f64, f64) {
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, t);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..200 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = (a * d + b).inv();
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    // h = e^{it} E1(it)
    let e1 = Complex64::new(t.cos(), -t.sin()) * h;
    (FRAC_PI_2 + e1.im, -e1.re)
}

//! Daubechies-24 discrete wavelet transform with half-sample symmetric extension.

use crate::error::{Error, Result};

/// Reconstruction low-pass filter (48 taps), sums to `sqrt(2)`.
pub const DB24: [f64; 48] = [
    1.91435800947551365e-04, 3.08208171490549458e-03, 2.24823399497164102e-02,
    9.72622358336251991e-02, 2.72908916067726326e-01, 5.04371040839925011e-01,
    5.74939221095541964e-01, 2.80985553233711882e-01, -1.87271406885156227e-01,
    -3.17943078999362749e-01, 4.77661368434472832e-03, 2.39237388780310867e-01,
    4.25287296414838326e-02, -1.71175351370346895e-01, -3.87771735779200155e-02,
    1.21016303469224235e-01, 2.09801137091448139e-02, -8.21616542080016721e-02,
    -4.57843624181922173e-03, 5.13016200399808789e-02, -4.94470942812562809e-03,
    -2.82131070949018896e-02, 7.66172188164658628e-03, 1.30499708710857358e-02,
    -6.29143537001818770e-03, -4.74656878632311388e-03, 3.73604617828252354e-03,
    1.15376493683948147e-03, -1.69645681897482442e-03, -4.41618485614151985e-05,
    5.86127059318310986e-04, -1.18123323796955469e-04, -1.46007981776261688e-04,
    6.55938863930563462e-05, 2.18324146046655820e-05, -2.02288829261269758e-05,
    1.34115775080911471e-08, 3.90110033859770284e-06, -8.98025314393840724e-07,
    -4.03250775687997184e-07, 2.16633965327857454e-07, -5.05764541979250037e-10,
    -2.25574038817608622e-08, 5.15777678967199964e-09, 4.74837582425623146e-10,
    -4.02465864458437969e-10, 6.99180115763823054e-11, -4.34278250380371010e-12,
];

fn high_pass() -> [f64; 48] {
    let f = DB24.len();
    let mut g = [0.0; 48];
    for (m, v) in g.iter_mut().enumerate() {
        let s = if m % 2 == 0 { 1.0 } else { -1.0 };
        *v = s * DB24[f - 1 - m];
    }
    g
}

/// Index into `[0, n)` under whole-signal mirroring `... x1 x0 | x0 x1 ... x_{n-1} | x_{n-1} ...`.
fn reflect(idx: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = idx.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

/// One analysis step: `(approximation, detail)`, each of length `floor((n + 47) / 2)`.
pub fn dwt_step(x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let f = DB24.len();
    let g = high_pass();
    let k_len = (n + f - 1) / 2;
    let mut a = vec![0.0; k_len];
    let mut d = vec![0.0; k_len];
    for k in 0..k_len {
        let base = 2 * k as isize + 2 - f as isize;
        let (mut sa, mut sd) = (0.0, 0.0);
        for m in 0..f {
            let v = x[reflect(base + m as isize, n)];
            sa += DB24[m] * v;
            sd += g[m] * v;
        }
        a[k] = sa;
        d[k] = sd;
    }
    (a, d)
}

/// Adjoint of [`dwt_step`] truncated to `out_len` samples; inverts it exactly.
pub fn idwt_step(a: &[f64], d: Option<&[f64]>, out_len: usize) -> Vec<f64> {
    let f = DB24.len();
    let g = high_pass();
    let mut x = vec![0.0; out_len];
    for k in 0..a.len() {
        let base = 2 * k as isize + 2 - f as isize;
        let dk = d.map_or(0.0, |d| d[k]);
        for m in 0..f {
            let idx = base + m as isize;
            if idx >= 0 && (idx as usize) < out_len {
                x[idx as usize] += DB24[m] * a[k] + g[m] * dk;
            }
        }
    }
    x
}

/// Multilevel decomposition: approximation at `level` plus details from coarsest
/// to finest, together with the signal length entering each level.
#[derive(Debug, Clone)]
pub struct Decomposed {
    pub approximation: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    lengths: Vec<usize>,
}

pub fn wavedec(x: &[f64], level: usize) -> Result<Decomposed> {
    check_length(x.len(), level)?;
    let mut lengths = Vec::with_capacity(level);
    let mut details = Vec::with_capacity(level);
    let mut current = x.to_vec();
    for _ in 0..level {
        lengths.push(current.len());
        let (a, d) = dwt_step(&current);
        details.push(d);
        current = a;
    }
    details.reverse();
    lengths.reverse();
    Ok(Decomposed {
        approximation: current,
        details,
        lengths,
    })
}

/// Inverse of [`wavedec`]; `keep_details = false` zeroes every detail band.
pub fn waverec(c: &Decomposed, keep_details: bool) -> Vec<f64> {
    let mut current = c.approximation.clone();
    for (d, &len) in c.details.iter().zip(&c.lengths) {
        let detail = keep_details.then_some(d.as_slice());
        current = idwt_step(&current, detail, len);
    }
    current
}

fn check_length(n: usize, level: usize) -> Result<()> {
    let needed = 1usize << level;
    if n < needed {
        Err(Error::insufficient(needed, n))
    } else {
        Ok(())
    }
}

/// Smooth component from the level-`level` approximation coefficients alone.
pub fn approximation(x: &[f64], level: usize) -> Result<Vec<f64>> {
    Ok(waverec(&wavedec(x, level)?, false))
}

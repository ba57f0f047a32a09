use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Daubechies-4 analysis result.
///
/// `details[0]` is the finest level; `approximation` is what is left after
/// the last level.
#[derive(Debug, Clone, PartialEq)]
pub struct DwtTree {
    pub approximation: Vec<f64>,
    pub details: Vec<Vec<f64>>,
}

impl DwtTree {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Sum of squares over every coefficient.
    pub fn energy(&self) -> f64 {
        self.details.iter().flatten().chain(&self.approximation).map(|c| c * c).sum()
    }
}

fn lowpass() -> [f64; 4] {
    let s3 = math::sqrt(3.0);
    let d = 4.0 * core::f64::consts::SQRT_2;
    [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
}

fn highpass(h: &[f64; 4]) -> [f64; 4] {
    [h[3], -h[2], h[1], -h[0]]
}

/// Orthogonal D4 transform with periodic boundary.
pub fn dwt_d4(x: &[f64], levels: usize) -> Result<DwtTree> {
    if x.is_empty() {
        return Err(Error::Shape("dwt of an empty sequence".into()));
    }
    let block = 1usize.checked_shl(levels as u32).filter(|b| *b <= x.len());
    if block.map_or(true, |b| x.len() % b != 0) {
        return Err(Error::Shape(format!("length {} is not divisible by 2^{levels}", x.len())));
    }
    let h = lowpass();
    let g = highpass(&h);
    let mut approx = x.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let n = approx.len();
        let half = n / 2;
        let mut a = vec![0.0; half];
        let mut d = vec![0.0; half];
        for i in 0..half {
            for k in 0..4 {
                let v = approx[(2 * i + k) % n];
                a[i] += h[k] * v;
                d[i] += g[k] * v;
            }
        }
        details.push(d);
        approx = a;
    }
    Ok(DwtTree { approximation: approx, details })
}

/// Inverse of [`dwt_d4`].
pub fn idwt_d4(tree: &DwtTree) -> Vec<f64> {
    let h = lowpass();
    let g = highpass(&h);
    let mut approx = tree.approximation.clone();
    for d in tree.details.iter().rev() {
        let half = approx.len();
        let n = 2 * half;
        let mut x = vec![0.0; n];
        for i in 0..half {
            for k in 0..4 {
                x[(2 * i + k) % n] += h[k] * approx[i] + g[k] * d[i];
            }
        }
        approx = x;
    }
    approx
}

//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the library's estimators.

#![allow(dead_code)]

use rand::Rng;

/// MI by exhaustive pixel counting: for every symbol pair, scan all pixels.
pub fn brute_mi(a: &[u32], b: &[u32], keep: Option<&[bool]>) -> f64 {
    let kept = |p: usize| keep.is_none_or(|k| k[p]);
    let idx: Vec<usize> = (0..a.len()).filter(|&p| kept(p)).collect();
    let n = idx.len() as f64;
    let na = a.iter().max().map_or(0, |&m| m + 1);
    let nb = b.iter().max().map_or(0, |&m| m + 1);
    let mut mi = 0.0;
    for i in 0..na {
        for j in 0..nb {
            let joint = idx.iter().filter(|&&p| a[p] == i && b[p] == j).count() as f64;
            if joint == 0.0 {
                continue;
            }
            let pa = idx.iter().filter(|&&p| a[p] == i).count() as f64 / n;
            let pb = idx.iter().filter(|&&p| b[p] == j).count() as f64 / n;
            let pj = joint / n;
            mi += pj * (pj / (pa * pb)).log2();
        }
    }
    mi
}

/// Entropy of the symbols at the kept pixels.
pub fn brute_entropy(a: &[u32], keep: Option<&[bool]>) -> f64 {
    let kept: Vec<u32> = (0..a.len())
        .filter(|&p| keep.is_none_or(|k| k[p]))
        .map(|p| a[p])
        .collect();
    let n = kept.len() as f64;
    let max = kept.iter().max().copied().unwrap_or(0);
    (0..=max)
        .map(|s| kept.iter().filter(|&&v| v == s).count() as f64 / n)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// Joint entropy of symbol pairs.
pub fn brute_joint_entropy(a: &[u32], b: &[u32], keep: Option<&[bool]>) -> f64 {
    let nb = b.iter().max().map_or(0, |&m| m + 1);
    let paired: Vec<u32> = a.iter().zip(b).map(|(&x, &y)| x * nb + y).collect();
    brute_entropy(&paired, keep)
}

/// Min-max binning written out independently.
pub fn brute_quantize(values: &[f64], n_bins: u32) -> Vec<u32> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|&v| {
            if hi == lo {
                0
            } else if v == hi {
                n_bins - 1
            } else {
                ((v - lo) * n_bins as f64 / (hi - lo)).floor() as u32
            }
        })
        .collect()
}

pub fn random_symbols<R: Rng>(rng: &mut R, n: usize, alphabet: u32) -> Vec<u32> {
    (0..n).map(|_| rng.random_range(0..alphabet)).collect()
}

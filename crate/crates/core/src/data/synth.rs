//! Small synthetic point sets with known ground truth.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::Dataset;
use crate::error::{Result, SpexError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// Two half-circle arcs, tips of each arc reaching across the other's
    /// horizontal span. Both arcs sit on the line `y = 0`, the upper one
    /// above it and the lower one below.
    TwoMoons,
    /// Three isotropic gaussians at the corners of an equilateral triangle
    /// with side 5; `noise` is the standard deviation.
    ThreeGaussians,
    /// Three rectangles where the gini-optimal root cut is vertical and
    /// slices the top cluster, yet a horizontal root cut leads to an
    /// error-free three-leaf tree.
    CartTrap,
}

impl FromStr for SynthKind {
    type Err = SpexError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_moons" | "two-moons" => Ok(Self::TwoMoons),
            "three_gaussians" | "three-gaussians" => Ok(Self::ThreeGaussians),
            "cart_trap" | "cart-trap" => Ok(Self::CartTrap),
            other => Err(SpexError::invalid(format!(
                "unknown synthetic kind {other:?}"
            ))),
        }
    }
}

pub fn synth(kind: SynthKind, n: usize, noise: f64, seed: u64) -> Result<(Dataset, Vec<usize>)> {
    if n < 6 {
        return Err(SpexError::invalid(format!(
            "synthetic datasets need n >= 6, got {n}"
        )));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(SpexError::invalid(format!(
            "noise must be a finite value >= 0, got {noise}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, labels) = match kind {
        SynthKind::TwoMoons => two_moons(n, noise, &mut rng),
        SynthKind::ThreeGaussians => three_gaussians(n, noise, &mut rng),
        SynthKind::CartTrap => {
            let out = cart_trap(n, noise, &mut rng);
            check_cart_trap(&out.0, &out.1)?;
            out
        }
    };
    Ok((Dataset::from_rows(&rows)?, labels))
}

type Points = (Vec<[f64; 2]>, Vec<usize>);

fn jitter(rng: &mut ChaCha8Rng, noise: f64) -> [f64; 2] {
    if noise == 0.0 {
        return [0.0, 0.0];
    }
    let normal = Normal::new(0.0, noise).expect("noise is finite and positive");
    [normal.sample(rng), normal.sample(rng)]
}

fn two_moons(n: usize, noise: f64, rng: &mut ChaCha8Rng) -> Points {
    let upper = n.div_ceil(2);
    let lower = n - upper;
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (count, label) in [(upper, 0usize), (lower, 1)] {
        for i in 0..count {
            let t = PI * i as f64 / (count - 1) as f64;
            let (x, y) = if label == 0 {
                (t.cos(), t.sin())
            } else {
                (1.0 - t.cos(), -t.sin())
            };
            let e = jitter(rng, noise);
            rows.push([x + e[0], y + e[1]]);
            labels.push(label);
        }
    }
    (rows, labels)
}

fn three_gaussians(n: usize, noise: f64, rng: &mut ChaCha8Rng) -> Points {
    let centers = [[0.0, 0.0], [5.0, 0.0], [2.5, 2.5 * 3f64.sqrt()]];
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (c, center) in centers.iter().enumerate() {
        let count = n / 3 + usize::from(c < n % 3);
        for _ in 0..count {
            let e = jitter(rng, noise);
            rows.push([center[0] + e[0], center[1] + e[1]]);
            labels.push(c);
        }
    }
    (rows, labels)
}

// Bottom-left and bottom-right blocks share y in [0, 2] and are separated by
// the gap x in (4.75, 5.25). The top block spans x in [3, 7], covering the
// gap, at y in [3, 4]. It holds a fifth of the points; gini prefers the
// vertical cut whenever the top block is smaller than 2/3 of a bottom block.
fn cart_trap(n: usize, noise: f64, rng: &mut ChaCha8Rng) -> Points {
    let top = n / 5;
    let left = (n - top) / 2;
    let right = n - top - left;
    let blocks = [
        (left, [0.0, 4.75], [0.0, 2.0]),
        (right, [5.25, 10.0], [0.0, 2.0]),
        (top, [3.0, 7.0], [3.0, 4.0]),
    ];
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (label, (count, xr, yr)) in blocks.into_iter().enumerate() {
        for _ in 0..count {
            let e = jitter(rng, noise);
            let x = rng.random_range(xr[0]..=xr[1]) + e[0];
            let y = rng.random_range(yr[0]..=yr[1]) + e[1];
            rows.push([x, y]);
            labels.push(label);
        }
    }
    (rows, labels)
}

/// Splits `idx` (sorted by coordinate `j`) at every gap between distinct
/// values, yielding (left, right) index sets.
fn coordinate_splits<'a>(
    rows: &'a [[f64; 2]],
    idx: &'a [usize],
    j: usize,
) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut sorted = idx.to_vec();
    sorted.sort_by(|&a, &b| rows[a][j].total_cmp(&rows[b][j]).then(a.cmp(&b)));
    (1..sorted.len())
        .filter(|&p| rows[sorted[p - 1]][j] < rows[sorted[p]][j])
        .map(|p| (sorted[..p].to_vec(), sorted[p..].to_vec()))
        .collect()
}

fn pure(labels: &[usize], idx: &[usize]) -> bool {
    idx.iter().all(|&i| labels[i] == labels[idx[0]])
}

fn splits_into_two_pure(rows: &[[f64; 2]], labels: &[usize], idx: &[usize]) -> bool {
    (0..2).any(|j| {
        coordinate_splits(rows, idx, j)
            .iter()
            .any(|(l, r)| pure(labels, l) && pure(labels, r))
    })
}

/// Whether the root cut `(left, right)` extends to a three-leaf tree whose
/// leaves are all pure.
fn error_free_completion(
    rows: &[[f64; 2]],
    labels: &[usize],
    left: &[usize],
    right: &[usize],
) -> bool {
    (pure(labels, left) && splits_into_two_pure(rows, labels, right))
        || (pure(labels, right) && splits_into_two_pure(rows, labels, left))
}

fn gini_weighted(labels: &[usize], idx: &[usize]) -> f64 {
    let mut counts = [0usize; 3];
    for &i in idx {
        counts[labels[i]] += 1;
    }
    let m = idx.len() as f64;
    m - counts.iter().map(|&c| (c * c) as f64).sum::<f64>() / m
}

fn check_cart_trap(rows: &[[f64; 2]], labels: &[usize]) -> Result<()> {
    let all: Vec<usize> = (0..rows.len()).collect();
    let mut horizontal_ok = false;
    let mut vertical_ok = false;
    let mut best: Option<(f64, usize)> = None;
    for j in 0..2 {
        for (l, r) in coordinate_splits(rows, &all, j) {
            if error_free_completion(rows, labels, &l, &r) {
                if j == 1 {
                    horizontal_ok = true;
                } else {
                    vertical_ok = true;
                }
            }
            let score = gini_weighted(labels, &l) + gini_weighted(labels, &r);
            if best.is_none_or(|(s, _)| score < s) {
                best = Some((score, j));
            }
        }
    }
    let gini_root_vertical = best.is_some_and(|(_, j)| j == 0);
    if !(horizontal_ok && !vertical_ok && gini_root_vertical) {
        return Err(SpexError::invalid(format!(
            "cart_trap self-check failed (horizontal error-free root: {horizontal_ok}, \
             vertical error-free root: {vertical_ok}, gini root vertical: {gini_root_vertical})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_by_seed() {
        for kind in [
            SynthKind::TwoMoons,
            SynthKind::ThreeGaussians,
            SynthKind::CartTrap,
        ] {
            let a = synth(kind, 300, 0.1, 7).unwrap();
            let b = synth(kind, 300, 0.1, 7).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn noiseless_moons_lie_on_two_arcs() {
        let (ds, labels) = synth(SynthKind::TwoMoons, 400, 0.0, 0).unwrap();
        assert_eq!(labels.iter().filter(|&&l| l == 0).count(), 200);
        assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 200);
        for (i, &l) in labels.iter().enumerate() {
            let (x, y) = (ds.value(i, 0), ds.value(i, 1));
            let (cx, sign) = if l == 0 { (0.0, 1.0) } else { (1.0, -1.0) };
            assert!((((x - cx).powi(2) + y * y).sqrt() - 1.0).abs() < 1e-12);
            assert!(sign * y >= -1e-12);
        }
    }

    #[test]
    fn cart_trap_self_check_holds_across_seeds() {
        for seed in 0..20 {
            synth(SynthKind::CartTrap, 300, 0.0, seed).unwrap();
        }
        synth(SynthKind::CartTrap, 60, 0.0, 3).unwrap();
    }

    #[test]
    fn rejects_tiny_n_and_unknown_kind() {
        assert!(synth(SynthKind::TwoMoons, 5, 0.0, 0).is_err());
        assert!("spiral".parse::<SynthKind>().is_err());
    }
}

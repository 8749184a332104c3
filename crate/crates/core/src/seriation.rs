//! Toroidal seriation: maps between circle estimates and orderings of `[n]`.
//!
//! Internally every map is zero-based (`0..n`); files and the CLI use
//! one-based values.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::model::AffinityMatrix;

/// A bijection on `0..n`, stored as its array of images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!("{v} is out of range or repeated (n = {n})")));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Permutation(inv)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), actual: other.len() });
        }
        Ok(Permutation(other.0.iter().map(|&v| self.0[v]).collect()))
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

/// The metric `min(|i − j|, n − |i − j|)` on `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToroidalDistance {
    pub n: usize,
}

impl ToroidalDistance {
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> usize {
        let d = i.abs_diff(j) % self.n.max(1);
        d.min(self.n - d)
    }
}

/// An element of the dihedral group acting on `0..n`:
/// `v ↦ v + shift` or `v ↦ shift − v`, modulo `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DihedralMap {
    pub shift: usize,
    pub reversed: bool,
}

impl DihedralMap {
    #[inline]
    pub fn apply(&self, v: usize, n: usize) -> usize {
        if self.reversed {
            (self.shift + n - v % n) % n
        } else {
            (v + self.shift) % n
        }
    }

    pub fn to_permutation(&self, n: usize) -> Permutation {
        Permutation((0..n).map(|v| self.apply(v, n)).collect())
    }
}

/// All `2n` elements of the group generated by circular shift and reversal,
/// shifts first.
pub fn gamma_n(n: usize) -> Vec<DihedralMap> {
    [false, true]
        .into_iter()
        .flat_map(|reversed| (0..n).map(move |shift| DihedralMap { shift, reversed }))
        .collect()
}

/// `σ̂_i = ⌈n θ_i / 2π⌉` with `θ_i ∈ (0, 2π]`, returned zero-based.
///
/// Values within `1e−9` of an integer are snapped first so that grid
/// angles map exactly to their index.
pub fn positions_to_map(xhat: &Configuration) -> Vec<usize> {
    let n = xhat.len();
    xhat.angles()
        .map(|t| {
            let s = n as f64 * t / TAU;
            let r = s.round();
            let s = if (s - r).abs() <= 1e-9 { r } else { s.ceil() };
            // angle 0 (or a rounding residue of 2π) is the end of the interval
            let s = if s == 0.0 { n as f64 } else { s };
            (s as usize).clamp(1, n) - 1
        })
        .collect()
}

/// Positions on the grid for a hidden ordering: item `j` sits at angle
/// `2π (σ(j) + 1) / n`, so [`positions_to_map`] recovers `σ` exactly.
pub fn permutation_to_positions(sigma: &Permutation) -> Configuration {
    let n = sigma.len() as f64;
    Configuration::from_angles(sigma.images().iter().map(|&v| TAU * (v + 1) as f64 / n))
}

fn best_over_gamma<F: Fn(usize, usize) -> usize>(sigma_hat: &[usize], sigma_star: &Permutation, cost: F) -> Result<usize> {
    let n = sigma_star.len();
    if sigma_hat.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: sigma_hat.len() });
    }
    if n == 0 {
        return Ok(0);
    }
    if let Some(&v) = sigma_hat.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidArgument(format!("map value {v} outside 0..{n}")));
    }
    let mut best = usize::MAX;
    for tau in gamma_n(n) {
        let mut worst = 0;
        for (i, &h) in sigma_hat.iter().enumerate() {
            worst = worst.max(cost(tau.apply(sigma_star.apply(i), n), h));
            if worst >= best {
                break;
            }
        }
        best = best.min(worst);
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

/// `min_{τ ∈ Γₙ} max_i |τ(σ*(i)) − σ̂(i)|` with the plain absolute value.
pub fn seriation_loss(sigma_hat: &[usize], sigma_star: &Permutation) -> Result<usize> {
    best_over_gamma(sigma_hat, sigma_star, |a, b| a.abs_diff(b))
}

/// Same minimum as [`seriation_loss`] but with the toroidal distance in
/// place of `|·|`.
pub fn seriation_loss_toroidal(sigma_hat: &[usize], sigma_star: &Permutation) -> Result<usize> {
    let td = ToroidalDistance { n: sigma_star.len() };
    best_over_gamma(sigma_hat, sigma_star, |a, b| td.dist(a, b))
}

/// A failed comparison: `B[i][j] < B[i2][j2]` although `(i, j)` is
/// strictly closer to the diagonal than `(i2, j2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RViolation {
    pub i: usize,
    pub j: usize,
    pub i2: usize,
    pub j2: usize,
}

/// Checks that entries do not increase when moving one step (in either
/// direction, rows and columns, cyclically) away from the diagonal in
/// toroidal distance. Comparisons involving a diagonal entry are skipped
/// because the diagonal is fixed at zero.
pub fn is_toroidal_r(b: &AffinityMatrix) -> (bool, Option<RViolation>) {
    let n = b.n();
    if n < 2 {
        return (true, None);
    }
    let td = ToroidalDistance { n };
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let moves = [((i + 1) % n, j), ((i + n - 1) % n, j), (i, (j + 1) % n), (i, (j + n - 1) % n)];
            for (i2, j2) in moves {
                if i2 == j2 {
                    continue;
                }
                if td.dist(i, j) < td.dist(i2, j2) && b.get(i, j) < b.get(i2, j2) {
                    return (false, Some(RViolation { i, j, i2, j2 }));
                }
            }
        }
    }
    (true, None)
}

/// `[B_{σ(i), σ(j)}]`.
pub fn permute_matrix(b: &AffinityMatrix, sigma: &Permutation) -> Result<AffinityMatrix> {
    if sigma.len() != b.n() {
        return Err(Error::LengthMismatch { expected: b.n(), actual: sigma.len() });
    }
    Ok(b.submatrix(sigma.images()))
}

//! Spectral embedding, projection onto regular positions, circulant spectra
//! and Fourier/spectral gap diagnostics.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{canonical, Configuration};
use crate::model::AffinityMatrix;

/// Relative symmetry tolerance for eigen-decomposition inputs.
const SYMMETRY_TOL: f64 = 1e-9;
/// QR iteration cap handed to the eigensolver, per matrix dimension.
const ITER_PER_DIM: usize = 200;

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigen {
    n: usize,
    pub values: Vec<f64>,
    /// Column-major: eigenvector `k` occupies `vectors[k*n .. (k+1)*n]`.
    vectors: Vec<f64>,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }
}

/// Decomposes a symmetric matrix given as a row-major buffer.
pub fn symmetric_eig_dense(n: usize, data: &[f64]) -> Result<Eigen> {
    if data.len() != n * n {
        return Err(Error::LengthMismatch { expected: n * n, actual: data.len() });
    }
    if n == 0 {
        return Err(Error::Empty("eigen-decomposition of a 0×0 matrix"));
    }
    let scale = data.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        for j in i + 1..n {
            let diff = (data[i * n + j] - data[j * n + i]).abs();
            if diff > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric { i, j, diff });
            }
        }
    }
    let m = DMatrix::from_row_slice(n, n, data);
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, ITER_PER_DIM * n).ok_or(Error::NoConvergence { n })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        vectors.extend(eig.eigenvectors.column(k).iter());
    }
    Ok(Eigen { n, values, vectors })
}

pub fn symmetric_eig(m: &AffinityMatrix) -> Result<Eigen> {
    symmetric_eig_dense(m.n(), m.as_slice())
}

/// `N` points in the plane, one per item.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarEmbedding {
    pub coords: Vec<[f64; 2]>,
}

impl PlanarEmbedding {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Squared norms of the two coordinate columns.
    pub fn column_norms_sq(&self) -> [f64; 2] {
        self.coords
            .iter()
            .fold([0.0, 0.0], |[a, b], [u, v]| [a + u * u, b + v * v])
    }
}

/// Rows `√(N/2) · (u_i, v_i)` where `u`, `v` are eigenvectors of the second
/// and third largest eigenvalues.
pub fn vsa(m: &AffinityMatrix) -> Result<PlanarEmbedding> {
    let n = m.n();
    if n < 3 {
        return Err(Error::TooSmall { n, reason: "the spectral embedding needs at least 3 points" });
    }
    let eig = symmetric_eig(m)?;
    let s = (n as f64 / 2.0).sqrt();
    let (u, v) = (eig.vector(1), eig.vector(2));
    Ok(PlanarEmbedding { coords: (0..n).map(|i| [s * u[i], s * v[i]]).collect() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformApprox {
    /// An element of `Π_N`.
    pub config: Configuration,
    /// Chosen cyclic offset.
    pub shift: usize,
    /// `ℓ¹` cost of the chosen offset.
    pub cost: f64,
    /// Rows with zero norm, placed at angle 0 before ordering.
    pub degenerate: usize,
}

/// Projects an embedding onto regular positions: rows are normalised to
/// angles, sorted anticlockwise (ties by index), and assigned consecutive
/// grid points starting at the offset with the smallest `ℓ¹` mismatch.
pub fn uniform_approx(points: &PlanarEmbedding) -> Result<UniformApprox> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Empty("uniform approximation of an empty embedding"));
    }
    let mut degenerate = 0;
    let unit: Vec<[f64; 2]> = points
        .coords
        .iter()
        .map(|&[a, b]| {
            let r = a.hypot(b);
            if r > 0.0 && r.is_finite() {
                [a / r, b / r]
            } else {
                degenerate += 1;
                [1.0, 0.0]
            }
        })
        .collect();
    if degenerate > 0 {
        log::warn!("{degenerate} of {n} embedding rows have zero norm; placed at angle 0");
    }
    let angle: Vec<f64> = unit.iter().map(|&[c, s]| canonical(s.atan2(c))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| angle[a].total_cmp(&angle[b]).then(a.cmp(&b)));

    let grid: Vec<[f64; 2]> = (0..n)
        .map(|j| {
            let t = TAU * j as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    let mut best = (f64::INFINITY, 0);
    for k in 0..n {
        let cost: f64 = order
            .iter()
            .enumerate()
            .map(|(l, &i)| {
                let g = grid[(k + l) % n];
                (g[0] - unit[i][0]).abs() + (g[1] - unit[i][1]).abs()
            })
            .sum();
        if cost < best.0 {
            best = (cost, k);
        }
    }
    let (cost, shift) = best;
    let mut angles = vec![0.0; n];
    for (l, &i) in order.iter().enumerate() {
        angles[i] = TAU * ((shift + l) % n) as f64 / n as f64;
    }
    Ok(UniformApprox { config: Configuration::from_angles(angles), shift, cost, degenerate })
}

/// `uniform_approx(vsa(A))`.
pub fn spectral_localization(a: &AffinityMatrix) -> Result<Configuration> {
    Ok(uniform_approx(&vsa(a)?)?.config)
}

/// First row `a` of a symmetric circulant matrix `M_ij = a_{(j−i) mod n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CirculantVector {
    a: Vec<f64>,
}

impl CirculantVector {
    /// Requires `a_k = a_{n−k}` within `1e−12` relative.
    pub fn new(a: Vec<f64>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::Empty("circulant vector"));
        }
        let scale = a.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for k in 1..n {
            if (a[k] - a[n - k]).abs() > 1e-12 * scale {
                return Err(Error::AsymmetricCirculant { k, a_k: a[k], a_nk: a[n - k] });
            }
        }
        Ok(CirculantVector { a })
    }

    /// `a_j = g(d(0, 2πj/n))` for a distance profile `g`.
    pub fn from_profile<G: Fn(f64) -> f64 + ?Sized>(g: &G, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("circulant vector"));
        }
        let a = (0..n).map(|j| g(TAU * j.min(n - j) as f64 / n as f64)).collect();
        CirculantVector::new(a)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    /// `a_0 ≥ a_1 ≥ … ≥ a_{⌊n/2⌋}`.
    pub fn is_circular_r(&self) -> bool {
        self.a[..=self.a.len() / 2].windows(2).all(|w| w[0] >= w[1])
    }

    /// Row-major `n × n` matrix.
    pub fn assemble(&self) -> Vec<f64> {
        let n = self.a.len();
        let mut m = Vec::with_capacity(n * n);
        for i in 0..n {
            m.extend((0..n).map(|j| self.a[(j + n - i) % n]));
        }
        m
    }
}

/// `cos(2π·num/n)` with the argument reduced exactly first.
#[inline]
fn cos_frac(num: usize, n: usize) -> f64 {
    (TAU * (num % n) as f64 / n as f64).cos()
}

#[inline]
fn sin_frac(num: usize, n: usize) -> f64 {
    (TAU * (num % n) as f64 / n as f64).sin()
}

/// Distinct eigenvalues `α_m`, `m = 0..=⌊n/2⌋`, of a symmetric circulant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CirculantSpectrum {
    pub n: usize,
    pub alpha: Vec<f64>,
    pub multiplicity: Vec<usize>,
}

impl CirculantSpectrum {
    /// All `n` eigenvalues, with multiplicity, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .alpha
            .iter()
            .zip(&self.multiplicity)
            .flat_map(|(&a, &k)| std::iter::repeat_n(a, k))
            .collect();
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    /// `u⁽ᵐ⁾_j = cos(2πmj/n)`.
    pub fn eigenvector_cos(&self, m: usize) -> Vec<f64> {
        (0..self.n).map(|j| cos_frac(m * j, self.n)).collect()
    }

    /// `v⁽ᵐ⁾_j = sin(2πmj/n)`; identically zero for `m = 0` and `m = n/2`.
    pub fn eigenvector_sin(&self, m: usize) -> Vec<f64> {
        (0..self.n).map(|j| sin_frac(m * j, self.n)).collect()
    }
}

/// Closed-form spectrum: `α_m = a_0 + 2 Σ_{1≤j<n/2} a_j cos(2πjm/n)`, plus
/// `a_{n/2} cos(πm)` when `n` is even.
pub fn circulant_spectrum(a: &CirculantVector) -> CirculantSpectrum {
    let n = a.len();
    let a = a.as_slice();
    let p = n / 2;
    let even = n.is_multiple_of(2);
    let half = if even { p } else { p + 1 };
    let alpha: Vec<f64> = (0..=p)
        .map(|m| {
            let mut s = a[0];
            for (j, &aj) in a.iter().enumerate().take(half).skip(1) {
                s += 2.0 * aj * cos_frac(j * m, n);
            }
            if even && p > 0 {
                s += a[p] * if m % 2 == 0 { 1.0 } else { -1.0 };
            }
            s
        })
        .collect();
    let multiplicity = (0..=p)
        .map(|m| if m == 0 || (even && m == p) { 1 } else { 2 })
        .collect();
    CirculantSpectrum { n, alpha, multiplicity }
}

/// `F_{k,n}(g) = Σ_j g(2πj/n) cos(2πjk/n)` with `g` extended by
/// `g(x) = g(2π − x)`.
pub fn fourier_coeffs<G: Fn(f64) -> f64 + ?Sized>(g: &G, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::TooSmall { n, reason: "Fourier coefficients need n >= 2" });
    }
    let vals: Vec<f64> = (0..n).map(|j| g(TAU * j.min(n - j) as f64 / n as f64)).collect();
    Ok((0..n)
        .map(|k| vals.iter().enumerate().map(|(j, v)| v * cos_frac(j * k, n)).sum())
        .collect())
}

/// `Φ₁ = F₀ − F₁` and `Φ₂ = min_{2≤j≤⌊n/2⌋} (F₁ − F_j)`.
pub fn fourier_gaps<G: Fn(f64) -> f64 + ?Sized>(g: &G, n: usize) -> Result<(f64, f64)> {
    if n < 5 {
        return Err(Error::TooSmall { n, reason: "Fourier gaps need n >= 5" });
    }
    let f = fourier_coeffs(g, n)?;
    let phi1 = f[0] - f[1];
    let phi2 = (2..=n / 2).map(|j| f[1] - f[j]).fold(f64::INFINITY, f64::min);
    Ok((phi1, phi2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// `λ₀ − λ₁`
    pub delta1: f64,
    /// `λ₂ − λ₃`
    pub delta2: f64,
}

pub fn spectral_gaps(f: &AffinityMatrix) -> Result<SpectrumReport> {
    if f.n() < 4 {
        return Err(Error::TooSmall { n: f.n(), reason: "spectral gaps need at least 4 eigenvalues" });
    }
    let eig = symmetric_eig(f)?;
    let l = &eig.values;
    Ok(SpectrumReport { delta1: l[0] - l[1], delta2: l[2] - l[3], eigenvalues: eig.values })
}

/// `α₀` of the affine profile at even-spread positions, `3n/4 + 1/(4n)` for odd `n`.
pub fn affine_alpha0(n: usize) -> f64 {
    let n = n as f64;
    0.75 * n + 0.25 / n
}

/// Closed form of `α_m` for the affine profile with odd `n` and `m ≥ 1`.
pub fn affine_alpha(n: usize, m: usize) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let top = if m % 2 == 1 { (mf * PI / (2.0 * nf)).cos() } else { (mf * PI / (2.0 * nf)).sin() };
    top * top / (nf * (PI * mf / nf).sin().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{aligned_dinf_value, RegularGrid};
    use crate::model::{signal_matrix, BuiltinModel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residual_ok(n: usize, data: &[f64], eig: &Eigen, tol: f64) {
        let op = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        for k in 0..n {
            let v = eig.vector(k);
            let mut r = 0.0;
            for i in 0..n {
                let mv: f64 = (0..n).map(|j| data[i * n + j] * v[j]).sum();
                r += (mv - eig.values[k] * v[i]).powi(2);
            }
            assert!(r.sqrt() <= tol * op, "residual {} for pair {k}", r.sqrt());
            for l in 0..n {
                let dot: f64 = v.iter().zip(eig.vector(l)).map(|(a, b)| a * b).sum();
                let want = if k == l { 1.0 } else { 0.0 };
                assert!((dot - want).abs() <= 1e-8);
            }
        }
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eig_examples() {
        let id: Vec<f64> = (0..16).map(|i| if i % 5 == 0 { 1.0 } else { 0.0 }).collect();
        let e = symmetric_eig_dense(4, &id).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
        let j = AffinityMatrix::from_upper(3, |_, _| 1.0);
        let e = symmetric_eig(&j).unwrap();
        for (got, want) in e.values.iter().zip([2.0, -1.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(matches!(
            symmetric_eig_dense(2, &[0.0, 1.0, 2.0, 0.0]),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn eig_residuals_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in [1, 2, 5, 17, 40] {
            let m = AffinityMatrix::from_upper(n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let e = symmetric_eig(&m).unwrap();
            residual_ok(n, m.as_slice(), &e, 1e-8);
        }
    }

    #[test]
    fn circulant_matches_eig() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(5..=64);
            let mut a = vec![0.0; n];
            for k in 0..=n / 2 {
                a[k] = rng.random::<f64>() * 2.0 - 1.0;
                a[(n - k) % n] = a[k];
            }
            let c = CirculantVector::new(a).unwrap();
            let closed = circulant_spectrum(&c).eigenvalues();
            let e = symmetric_eig_dense(n, &c.assemble()).unwrap();
            for (x, y) in closed.iter().zip(&e.values) {
                assert!((x - y).abs() <= 1e-9, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn circulant_eigenvectors_satisfy_equation() {
        let c = CirculantVector::from_profile(&|d: f64| (-d).exp(), 12).unwrap();
        let s = circulant_spectrum(&c);
        let m = c.assemble();
        let n = 12;
        for k in 0..=n / 2 {
            for v in [s.eigenvector_cos(k), s.eigenvector_sin(k)] {
                for i in 0..n {
                    let mv: f64 = (0..n).map(|j| m[i * n + j] * v[j]).sum();
                    assert!((mv - s.alpha[k] * v[i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn circulant_constant_vector() {
        let s = circulant_spectrum(&CirculantVector::new(vec![0.7; 9]).unwrap());
        assert!((s.alpha[0] - 6.3).abs() < 1e-12);
        assert!(s.alpha[1..].iter().all(|a| a.abs() < 1e-12));
        assert_eq!(s.multiplicity, vec![1, 2, 2, 2, 2]);
        let even = circulant_spectrum(&CirculantVector::new(vec![0.7; 8]).unwrap());
        assert_eq!(even.multiplicity, vec![1, 2, 2, 2, 1]);
        assert!(CirculantVector::new(vec![1.0, 0.5, 0.4]).is_err());
    }

    #[test]
    fn first_eigenvector_norm() {
        for n in [7, 10, 33] {
            let s = circulant_spectrum(&CirculantVector::new(vec![1.0; n]).unwrap());
            let (u, v) = (s.eigenvector_cos(1), s.eigenvector_sin(1));
            let sc = 2.0 / n as f64;
            let uu: f64 = u.iter().map(|x| x * x).sum::<f64>() * sc;
            let vv: f64 = v.iter().map(|x| x * x).sum::<f64>() * sc;
            let uv: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() * sc;
            assert!((uu - 1.0).abs() < 1e-12 && (vv - 1.0).abs() < 1e-12 && uv.abs() < 1e-12);
        }
    }

    #[test]
    fn affine_closed_forms() {
        let g = BuiltinModel::Affine.model();
        let g = g.profile().unwrap();
        for n in [5, 101, 1001] {
            let s = circulant_spectrum(&CirculantVector::from_profile(g, n).unwrap());
            assert!((s.alpha[0] - affine_alpha0(n)).abs() < 1e-9);
            for m in 1..=n / 2 {
                assert!((s.alpha[m] - affine_alpha(n, m)).abs() < 1e-9, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn fourier_examples() {
        let f = fourier_coeffs(&|_| 0.4, 10).unwrap();
        assert!((f[0] - 4.0).abs() < 1e-12);
        assert!(f[1..].iter().all(|v| v.abs() < 1e-12));
        let (p1, p2) = fourier_gaps(&|_| 0.4, 11).unwrap();
        assert!((p1 - 4.4).abs() < 1e-12 && p2.abs() < 1e-12);
        assert!(fourier_gaps(&|_| 0.4, 4).is_err());
        let affine = BuiltinModel::Affine.model();
        let g = affine.profile().unwrap();
        let f = fourier_coeffs(g, 101).unwrap();
        assert!((f[0] - affine_alpha0(101)).abs() < 1e-9);
    }

    #[test]
    fn fourier_symmetry_random_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let knots: Vec<f64> = (0..6).map(|_| rng.random()).collect();
            let g = move |d: f64| knots[((d / PI * 5.0) as usize).min(5)];
            let n = rng.random_range(2..80);
            let f = fourier_coeffs(&g, n).unwrap();
            for k in 1..n {
                assert!((f[k] - f[n - k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn affine_fourier_gap_asymptotics() {
        let model = BuiltinModel::Affine.model();
        let g = model.profile().unwrap();
        for n in [101, 501, 1001] {
            let (p1, p2) = fourier_gaps(g, n).unwrap();
            let nf = n as f64;
            assert!((p1 / nf - (0.75 - 1.0 / (PI * PI))).abs() <= 0.02);
            // the second gap is α₁ − α₃ ≈ n(1/π² − 1/(9π²))
            assert!((p2 / nf - 8.0 / (9.0 * PI * PI)).abs() <= 1e-3);
            assert!((p2 / nf - 3.0 / (4.0 * PI * PI)).abs() <= 0.02);
        }
    }

    #[test]
    fn spectral_gaps_regular_affine() {
        let model = BuiltinModel::Affine.model();
        for n in [9, 33, 64] {
            let f = signal_matrix(&RegularGrid::new(n).unwrap().points(), &model);
            let r = spectral_gaps(&f).unwrap();
            let (p1, p2) = fourier_gaps(model.profile().unwrap(), n).unwrap();
            assert!((r.delta1 - p1).abs() <= 1e-6 * n as f64);
            assert!((r.delta2 - p2).abs() <= 1e-6 * n as f64);
        }
        let z = spectral_gaps(&AffinityMatrix::zeros(6)).unwrap();
        assert_eq!((z.delta1, z.delta2), (0.0, 0.0));
    }

    #[test]
    fn vsa_on_regular_affine_is_the_circle() {
        let model = BuiltinModel::Affine.model();
        for n in [9, 20, 33] {
            let x = RegularGrid::new(n).unwrap().points();
            let emb = vsa(&signal_matrix(&x, &model)).unwrap();
            let [a, b] = emb.column_norms_sq();
            assert!((a - n as f64 / 2.0).abs() < 1e-9 && (b - n as f64 / 2.0).abs() < 1e-9);
            // every row lies on the unit circle, and consecutive rows are
            // one grid step apart
            let angles: Vec<f64> = emb.coords.iter().map(|[u, v]| v.atan2(*u)).collect();
            for &[u, v] in &emb.coords {
                assert!((u.hypot(v) - 1.0).abs() < 1e-6);
            }
            let y = Configuration::from_angles(angles);
            assert!(aligned_dinf_value(&x, &y).unwrap() < 1e-6);
        }
    }

    #[test]
    fn uniform_approx_examples() {
        let n = 12;
        let grid = RegularGrid::new(n).unwrap().points();
        let emb = PlanarEmbedding { coords: grid.points().iter().map(|p| p.to_xy()).collect() };
        let ua = uniform_approx(&emb).unwrap();
        assert_eq!(ua.config, grid);
        assert!(ua.cost < 1e-12);
        let rotated = PlanarEmbedding {
            coords: (0..n)
                .map(|j| {
                    let t = TAU * j as f64 / n as f64 + PI / n as f64;
                    [t.cos(), t.sin()]
                })
                .collect(),
        };
        let ua = uniform_approx(&rotated).unwrap();
        for (j, t) in ua.config.angles().enumerate() {
            let want = TAU * j as f64 / n as f64 + PI / n as f64;
            assert!(crate::geometry::arc_distance(t, want) <= PI / n as f64 + 1e-12);
        }
        let degenerate = PlanarEmbedding { coords: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]] };
        assert_eq!(uniform_approx(&degenerate).unwrap().degenerate, 1);
    }

    #[test]
    fn spectral_localization_recovers_regular_instances() {
        let model = BuiltinModel::Affine.model();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in [9, 33, 129] {
            let x = crate::model::sample_positions(n, crate::model::PositionMode::Regular, &mut rng).unwrap();
            let est = spectral_localization(&signal_matrix(&x, &model)).unwrap();
            assert!(aligned_dinf_value(&est, &x).unwrap() <= TAU / n as f64 + 1e-6);
        }
    }
}

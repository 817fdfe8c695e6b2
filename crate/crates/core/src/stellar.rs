//! Majorana polynomial, constellations, and the state ↔ constellation maps.
//!
//! A state Σ c_k |s, s−k⟩ corresponds to the binary form
//! f(X, Y) = Σ_k √C(N,k) c_k X^{N−k} Y^k. A product of spinors (x_i, y_i)
//! has f = Π (x_i X + y_i Y), and the Majorana polynomial is p(ζ) = f(ζ, −1),
//! whose roots are the stars ζ_i = y_i / x_i.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly;
use crate::sphere::{Direction, Rotation, StereoPoint};
use crate::spin::{binomial, Spin, SpinState};
use crate::tolerance::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A distinct point of a constellation and the number of coincident stars there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Star {
    pub point: StereoPoint,
    pub multiplicity: usize,
}

impl Star {
    pub fn direction(&self) -> Direction {
        self.point.to_direction()
    }
}

/// A multiset of points on the sphere, stored as distinct stars with
/// multiplicities and sorted by (θ, φ).
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    stars: Vec<Star>,
}

impl Constellation {
    pub fn new(mut stars: Vec<Star>) -> Result<Self> {
        stars.retain(|s| s.multiplicity > 0);
        if stars.is_empty() {
            return Err(Error::MultiplicityMismatch { expected: 1, got: 0 });
        }
        stars.sort_by(|a, b| a.direction().lex_cmp(&b.direction()));
        Ok(Constellation { stars })
    }

    /// One star per entry; repeated points are kept as separate entries.
    pub fn from_points(points: &[StereoPoint]) -> Result<Self> {
        Self::new(
            points
                .iter()
                .map(|&point| Star { point, multiplicity: 1 })
                .collect(),
        )
    }

    pub fn from_directions(dirs: &[(Direction, usize)]) -> Result<Self> {
        Self::new(
            dirs.iter()
                .map(|(d, k)| Star {
                    point: d.to_stereo(),
                    multiplicity: *k,
                })
                .collect(),
        )
    }

    pub fn stars(&self) -> &[Star] {
        &self.stars
    }

    /// Total multiplicity N.
    pub fn total(&self) -> usize {
        self.stars.iter().map(|s| s.multiplicity).sum()
    }

    pub fn distinct_count(&self) -> usize {
        self.stars.len()
    }

    /// Every star repeated according to its multiplicity.
    pub fn points(&self) -> Vec<StereoPoint> {
        self.stars
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.point, s.multiplicity))
            .collect()
    }

    pub fn antipodal(&self) -> Self {
        Self::new(
            self.stars
                .iter()
                .map(|s| Star {
                    point: s.point.antipode(),
                    multiplicity: s.multiplicity,
                })
                .collect(),
        )
        .expect("non-empty")
    }

    pub fn rotated(&self, r: &Rotation) -> Self {
        Self::new(
            self.stars
                .iter()
                .map(|s| Star {
                    point: r.apply_stereo(&s.point),
                    multiplicity: s.multiplicity,
                })
                .collect(),
        )
        .expect("non-empty")
    }

    /// Smallest achievable maximum chordal distance over all matchings of the
    /// two multisets (∞ when the totals differ). Supports N ≤ 20.
    pub fn distance(&self, other: &Constellation) -> f64 {
        let a = self.points();
        let b = other.points();
        if a.len() != b.len() {
            return f64::INFINITY;
        }
        bottleneck_matching(&a, &b)
    }
}

fn bottleneck_matching(a: &[StereoPoint], b: &[StereoPoint]) -> f64 {
    let n = a.len();
    assert!(n <= 20, "matching supports at most 20 points");
    let d: Vec<Vec<f64>> = a.iter().map(|p| b.iter().map(|q| p.chordal(q)).collect()).collect();
    let mut dp = vec![f64::INFINITY; 1 << n];
    dp[0] = 0.0;
    for mask in 0usize..(1 << n) {
        let cur = dp[mask];
        if cur.is_infinite() {
            continue;
        }
        let i = mask.count_ones() as usize;
        if i == n {
            continue;
        }
        for (j, dij) in d[i].iter().enumerate() {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let v = cur.max(*dij);
                if v < dp[next] {
                    dp[next] = v;
                }
            }
        }
    }
    dp[(1 << n) - 1]
}

/// Coefficients of ζ^0 … ζ^N of the Majorana polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaPolynomial {
    coeffs: Vec<Complex64>,
}

impl MajoranaPolynomial {
    /// Polynomial with ascending coefficients; the length fixes the nominal degree.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Nominal degree N.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        poly::eval(&self.coeffs, z)
    }
}

/// The coefficient of ζ^{N−k} is (−1)^k √C(N,k) c_k.
pub fn majorana_polynomial(state: &SpinState) -> MajoranaPolynomial {
    let n = state.n();
    let mut coeffs = vec![ZERO; n + 1];
    for (k, c) in state.coeffs().iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[n - k] = c * (sign * binomial(n, k).sqrt());
    }
    MajoranaPolynomial { coeffs }
}

/// Inverse of [`majorana_polynomial`], normalized.
pub fn state_from_polynomial(p: &MajoranaPolynomial) -> Result<SpinState> {
    let n = p.degree();
    let coeffs = (0..=n)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            p.coeffs[n - k] * (sign / binomial(n, k).sqrt())
        })
        .collect();
    SpinState::normalized(Spin::from_twice(n)?, coeffs)
}

pub fn polynomial_roots(p: &MajoranaPolynomial) -> Result<Constellation> {
    polynomial_roots_with(p, &Tolerances::default())
}

pub fn polynomial_roots_with(p: &MajoranaPolynomial, tol: &Tolerances) -> Result<Constellation> {
    let roots = poly::find_roots(&p.coeffs, tol)?;
    Constellation::new(
        roots
            .into_iter()
            .map(|(point, multiplicity)| Star { point, multiplicity })
            .collect(),
    )
}

/// The constellation of a state.
pub fn constellation(state: &SpinState) -> Result<Constellation> {
    polynomial_roots(&majorana_polynomial(state))
}

pub fn constellation_with(state: &SpinState, tol: &Tolerances) -> Result<Constellation> {
    polynomial_roots_with(&majorana_polynomial(state), tol)
}

/// Symmetric-subspace coefficients of the (unnormalized) symmetrized product
/// of the normalized spinors of `points`.
pub fn product_vector(points: &[StereoPoint]) -> Vec<Complex64> {
    let spinors: Vec<[Complex64; 2]> = points.iter().map(|p| p.spinor()).collect();
    product_of_spinors(&spinors)
}

/// Symmetric-subspace coefficients of the symmetrized product of arbitrary spinors.
pub fn product_of_spinors(spinors: &[[Complex64; 2]]) -> Vec<Complex64> {
    let n = spinors.len();
    // Coefficients of X^{N−k} Y^k in Π (x_i X + y_i Y).
    let mut f = vec![ONE];
    for [x, y] in spinors {
        let mut next = vec![ZERO; f.len() + 1];
        for (k, &a) in f.iter().enumerate() {
            next[k] += a * x;
            next[k + 1] += a * y;
        }
        f = next;
    }
    f.into_iter()
        .enumerate()
        .map(|(k, a)| a / binomial(n, k).sqrt())
        .collect()
}

/// Normalized state with the given stars, first nonzero coefficient real positive.
pub fn state_from_constellation(c: &Constellation) -> Result<SpinState> {
    let points = c.points();
    let spin = Spin::from_twice(points.len())?;
    Ok(SpinState::normalized(spin, product_vector(&points))?.with_canonical_phase())
}

/// Applies the spin-s representation D(R): f'(X,Y) = f(aX + bY, −b̄X + āY).
pub fn rotate_state(state: &SpinState, r: &Rotation) -> SpinState {
    let n = state.n();
    let (a, b) = r.su2();
    let p1 = linear_form_powers(a, b, n);
    let p2 = linear_form_powers(-b.conj(), a.conj(), n);
    let mut out = vec![ZERO; n + 1];
    for (k, c) in state.coeffs().iter().enumerate() {
        let fk = c * binomial(n, k).sqrt();
        if fk == ZERO {
            continue;
        }
        let u = &p1[n - k];
        let v = &p2[k];
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                out[i + j] += fk * ui * vj;
            }
        }
    }
    for (m, o) in out.iter_mut().enumerate() {
        *o /= binomial(n, m).sqrt();
    }
    SpinState::normalized(state.spin(), out).expect("rotation preserves the norm")
}

/// Coefficient vectors (in X^{j−i} Y^i) of (αX + βY)^j for j = 0 … n.
fn linear_form_powers(alpha: Complex64, beta: Complex64, n: usize) -> Vec<Vec<Complex64>> {
    let mut out = vec![vec![ONE]];
    for j in 1..=n {
        let prev = &out[j - 1];
        let mut next = vec![ZERO; j + 1];
        for (i, &p) in prev.iter().enumerate() {
            next[i] += p * alpha;
            next[i + 1] += p * beta;
        }
        out.push(next);
    }
    out
}

/// Matrix of D(R) in the |s, s−k⟩ basis.
pub fn wigner_matrix(spin: Spin, r: &Rotation) -> DMatrix<Complex64> {
    let d = spin.twice() + 1;
    let mut m = DMatrix::zeros(d, d);
    for k in 0..d {
        let col = rotate_state(&SpinState::basis(spin, k), r);
        for (i, c) in col.coeffs().iter().enumerate() {
            m[(i, k)] = *c;
        }
    }
    m
}

/// The normalization factor A with A² = N! / perm(G), G the Gram matrix of
/// the star spinors.
pub fn symmetrized_norm(c: &Constellation) -> Result<f64> {
    let spinors: Vec<[Complex64; 2]> = c.points().iter().map(|p| p.spinor()).collect();
    let n = spinors.len();
    if n > 20 {
        return Err(Error::TooManyStars(n));
    }
    let g = DMatrix::from_fn(n, n, |i, j| {
        spinors[i][0].conj() * spinors[j][0] + spinors[i][1].conj() * spinors[j][1]
    });
    let perm = permanent(&g)?;
    let factorial: f64 = (1..=n).map(|i| i as f64).product();
    Ok((factorial / perm.re).sqrt())
}

/// Matrix permanent: permutation sum for n ≤ 8, Ryser's formula up to n = 20.
pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = m.nrows();
    if n > 20 {
        return Err(Error::TooManyStars(n));
    }
    if n == 0 {
        return Ok(ONE);
    }
    if n <= 8 {
        Ok(permanent_direct(m))
    } else {
        Ok(permanent_ryser(m))
    }
}

fn permanent_direct(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = ZERO;
    let mut c = vec![0usize; n];
    let term = |p: &[usize]| (0..n).fold(ONE, |acc, i| acc * m[(i, p[i])]);
    total += term(&perm);
    // Heap's algorithm.
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            total += term(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    total
}

fn permanent_ryser(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    let mut row_sums = vec![ZERO; n];
    let mut total = ZERO;
    let mut gray_prev = 0usize;
    for k in 1usize..(1 << n) {
        let gray = k ^ (k >> 1);
        let changed = gray ^ gray_prev;
        let j = changed.trailing_zeros() as usize;
        let added = gray & changed != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += m[(i, j)];
            } else {
                *s -= m[(i, j)];
            }
        }
        gray_prev = gray;
        let prod = row_sums.iter().fold(ONE, |acc, s| acc * s);
        let sign = if (n - gray.count_ones() as usize) % 2 == 0 { 1.0 } else { -1.0 };
        total += prod * sign;
    }
    total
}

/// ⟨n|Ψ⟩ = f(x̄, ȳ) for the spinor (x, y) of n.
pub fn coherent_overlap(state: &SpinState, n: &Direction) -> Complex64 {
    let [x, y] = n.spinor();
    let (x, y) = (x.conj(), y.conj());
    let big_n = state.n();
    // Evaluate Σ √C(N,k) c_k x^{N−k} y^k, scaling by the larger of |x|, |y|.
    let mut xp = vec![ONE; big_n + 1];
    let mut yp = vec![ONE; big_n + 1];
    for k in 1..=big_n {
        xp[k] = xp[k - 1] * x;
        yp[k] = yp[k - 1] * y;
    }
    state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c * binomial(big_n, k).sqrt() * xp[big_n - k] * yp[k])
        .sum()
}

/// ⟨n|Ψ⟩ computed by rotating |z⟩ to n; the phase matches
/// [`coherent_overlap`].
pub fn coherent_overlap_by_rotation(state: &SpinState, n: &Direction) -> Complex64 {
    let r = Rotation::north_to(n);
    let rotated = rotate_state(&SpinState::basis(state.spin(), 0), &r);
    let phase = Complex64::from_polar(1.0, state.n() as f64 * n.phi / 2.0);
    rotated.inner(state) * phase.conj()
}

//! Constellations of linear combinations: the Mason bound on distinct stars,
//! root trajectories along the line through two SC states, spin-1 line/SC
//! sphere intersections, and the two-SC decomposition of spin-3/2 states.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par::{map_range, Execution};
use crate::poly;
use crate::sc_basis::sc_state;
use crate::sphere::{fibonacci_sphere, Rotation, StereoPoint};
use crate::spin::{inner, Spin, SpinState};
use crate::stellar::{
    constellation_with, state_from_constellation, state_from_polynomial, Constellation, MajoranaPolynomial,
    Star,
};
use crate::tolerance::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Number of distinct stars after single-linkage merging of stars closer
/// than `radius` (chordal).
pub fn distinct_star_count(state: &SpinState) -> Result<usize> {
    let tol = Tolerances::default();
    distinct_star_count_with(state, tol.cluster, &tol)
}

pub fn distinct_star_count_with(state: &SpinState, radius: f64, tol: &Tolerances) -> Result<usize> {
    let cons = constellation_with(state, tol)?;
    Ok(count_clusters(cons.stars(), radius))
}

fn count_clusters(stars: &[Star], radius: f64) -> usize {
    let n = stars.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if stars[i].point.chordal(&stars[j].point) < radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

/// a|Ψ₁⟩ + b|Ψ₂⟩ with its constellation and the Mason lower bound on its
/// number of distinct stars.
#[derive(Debug, Clone)]
pub struct Superposition {
    pub state: SpinState,
    pub constellation: Constellation,
    /// Stars shared by the inputs, with multiplicity min(r, s).
    pub common: Vec<Star>,
    /// N' − n₁' − n₂' + 1 after removing the common stars.
    pub mason_bound: i64,
    /// Distinct stars of the combination.
    pub distinct: usize,
}

pub fn superpose(a: Complex64, s1: &SpinState, b: Complex64, s2: &SpinState) -> Result<Superposition> {
    superpose_with(a, s1, b, s2, &Tolerances::default())
}

pub fn superpose_with(
    a: Complex64,
    s1: &SpinState,
    b: Complex64,
    s2: &SpinState,
    tol: &Tolerances,
) -> Result<Superposition> {
    if s1.n() != s2.n() {
        return Err(Error::SpinMismatch(s1.n(), s2.n()));
    }
    let coeffs: Vec<Complex64> = s1.coeffs().iter().zip(s2.coeffs()).map(|(x, y)| a * x + b * y).collect();
    let scale = a.norm().max(b.norm()).max(1.0);
    if coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max) <= tol.normalization * scale {
        return Err(Error::ZeroCombination);
    }
    let state = SpinState::normalized(s1.spin(), coeffs)?;
    let constellation = constellation_with(&state, tol)?;
    let c1 = constellation_with(s1, tol)?;
    let c2 = constellation_with(s2, tol)?;
    let (common, rest1, rest2) = cancel_common(c1.stars(), c2.stars(), tol.sc_membership);
    let shared: usize = common.iter().map(|s| s.multiplicity).sum();
    let reduced = (s1.n() - shared) as i64;
    let mason_bound = reduced - rest1 as i64 - rest2 as i64 + 1;
    let distinct = count_clusters(constellation.stars(), tol.cluster);
    Ok(Superposition {
        state,
        constellation,
        common,
        mason_bound,
        distinct,
    })
}

/// Matches stars of two constellations within `radius` and returns the
/// common part (multiplicity min(r, s)) plus the number of distinct stars
/// each input keeps after the common part is removed.
fn cancel_common(a: &[Star], b: &[Star], radius: f64) -> (Vec<Star>, usize, usize) {
    let mut left_a: Vec<usize> = a.iter().map(|s| s.multiplicity).collect();
    let mut left_b: Vec<usize> = b.iter().map(|s| s.multiplicity).collect();
    let mut used = vec![false; b.len()];
    let mut common = Vec::new();
    for (i, sa) in a.iter().enumerate() {
        let best = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, sb)| (j, sa.point.chordal(&sb.point)))
            .filter(|&(_, d)| d < radius)
            .min_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((j, _)) = best {
            used[j] = true;
            let m = left_a[i].min(left_b[j]);
            left_a[i] -= m;
            left_b[j] -= m;
            common.push(Star {
                point: sa.point,
                multiplicity: m,
            });
        }
    }
    let count = |v: &[usize]| v.iter().filter(|&&m| m > 0).count();
    (common, count(&left_a), count(&left_b))
}

/// Roots ζ_k(t), k = 0 … N−1, of cosᴺt (ζ−γ₁)ᴺ − e^{iNΩ} sinᴺt (ζ−γ₂)ᴺ.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub roots: Vec<StereoPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub gamma1: Complex64,
    pub gamma2: Complex64,
    pub omega: f64,
    pub n: usize,
    pub samples: Vec<TrajectorySample>,
}

fn trajectory_weight(omega: f64, n: usize, k: usize) -> Complex64 {
    Complex64::from_polar(1.0, omega + 2.0 * PI * k as f64 / n as f64)
}

/// ζ_k(t) = (γ₁ cos t − γ₂ w_k sin t)/(cos t − w_k sin t), w_k = e^{i(Ω + 2πk/N)};
/// a vanishing denominator gives ∞.
pub fn trajectory_root(gamma1: Complex64, gamma2: Complex64, omega: f64, n: usize, k: usize, t: f64) -> StereoPoint {
    let w = trajectory_weight(omega, n, k);
    let (s, c) = t.sin_cos();
    let num = gamma1 * c - gamma2 * w * s;
    let den = c - w * s;
    StereoPoint::from_spinor(den, num)
}

pub fn two_sc_trajectory(
    gamma1: StereoPoint,
    gamma2: StereoPoint,
    omega: f64,
    spin: Spin,
    ts: &[f64],
) -> Result<Trajectory> {
    let (Some(g1), Some(g2)) = (gamma1.as_finite(), gamma2.as_finite()) else {
        return Err(Error::InvalidEndpoints);
    };
    if g1 == g2 {
        return Err(Error::InvalidEndpoints);
    }
    let n = spin.twice();
    let samples = ts
        .iter()
        .map(|&t| TrajectorySample {
            t,
            roots: (0..n).map(|k| trajectory_root(g1, g2, omega, n, k, t)).collect(),
        })
        .collect();
    Ok(Trajectory {
        gamma1: g1,
        gamma2: g2,
        omega,
        n,
        samples,
    })
}

/// cosᴺt (ζ−γ₁)ᴺ − e^{iNΩ} sinᴺt (ζ−γ₂)ᴺ as a Majorana polynomial.
pub fn trajectory_polynomial(gamma1: Complex64, gamma2: Complex64, omega: f64, n: usize, t: f64) -> MajoranaPolynomial {
    let p1 = poly::from_roots(&vec![gamma1; n]);
    let p2 = poly::from_roots(&vec![gamma2; n]);
    let a = Complex64::new(t.cos().powi(n as i32), 0.0);
    let b = Complex64::from_polar(t.sin().powi(n as i32), n as f64 * omega);
    MajoranaPolynomial::new(p1.iter().zip(&p2).map(|(x, y)| a * x - b * y).collect())
}

/// The state whose Majorana polynomial is [`trajectory_polynomial`].
pub fn trajectory_state(gamma1: Complex64, gamma2: Complex64, omega: f64, n: usize, t: f64) -> Result<SpinState> {
    state_from_polynomial(&trajectory_polynomial(gamma1, gamma2, omega, n, t))
}

/// dζ_k/dt at t = 0, w_k (γ₁ − γ₂): the circles leave γ₁ at angles spaced by 2π/N.
pub fn trajectory_tangents(gamma1: Complex64, gamma2: Complex64, omega: f64, n: usize) -> Vec<Complex64> {
    (0..n).map(|k| trajectory_weight(omega, n, k) * (gamma1 - gamma2)).collect()
}

/// Largest distance of M(ζ_k(t)) = (ζ−γ₁)/(ζ−γ₂) from the line through the
/// origin at angle Ω + 2πk/N. Where |M| > 1 the reciprocal 1/M is tested
/// against the mirrored line, so the measure stays bounded near γ₂.
pub fn collinearity_residual(traj: &Trajectory) -> f64 {
    let mut worst: f64 = 0.0;
    for s in &traj.samples {
        for (k, root) in s.roots.iter().enumerate() {
            let w = trajectory_weight(traj.omega, traj.n, k);
            let (a, b) = match root.as_finite() {
                Some(z) => (z - traj.gamma1, z - traj.gamma2),
                None => (ONE, ONE),
            };
            let off = if a.norm() <= b.norm() {
                (a / b * w.conj()).im
            } else {
                (b / a * w).im
            };
            worst = worst.max(off.abs());
        }
    }
    worst
}

/// Least-squares circle (or line) through points of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit {
    /// `None` for a straight line.
    pub center: Option<Complex64>,
    pub radius: f64,
    /// Largest distance of a point from the fitted curve.
    pub residual: f64,
}

/// Fits A|z|² + D x + E y + F = 0 by the smallest right singular vector of
/// the centered and scaled design matrix.
pub fn fit_circle(points: &[Complex64]) -> CircleFit {
    let n = points.len();
    let mean = points.iter().sum::<Complex64>() / n.max(1) as f64;
    let scale = points.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let local: Vec<Complex64> = points.iter().map(|z| (z - mean) / scale).collect();
    let m = nalgebra::DMatrix::from_fn(n, 4, |i, j| {
        let z = local[i];
        match j {
            0 => z.norm_sqr(),
            1 => z.re,
            2 => z.im,
            _ => 1.0,
        }
    });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let idx = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let v = vt.row(idx);
    let (a, d, e, f) = (v[0], v[1], v[2], v[3]);
    let line_norm = (d * d + e * e).sqrt();
    if a.abs() < 1e-12 * line_norm {
        let residual = local.iter().map(|z| (d * z.re + e * z.im + f).abs() / line_norm).fold(0.0, f64::max);
        return CircleFit {
            center: None,
            radius: f64::INFINITY,
            residual: residual * scale,
        };
    }
    let c = Complex64::new(-d / (2.0 * a), -e / (2.0 * a));
    let r = (c.norm_sqr() - f / a).max(0.0).sqrt();
    let residual = local.iter().map(|z| ((z - c).norm() - r).abs()).fold(0.0, f64::max);
    CircleFit {
        center: Some(mean + c * scale),
        radius: r * scale,
        residual: residual * scale,
    }
}

/// A point where the complex line through two spin-1 states meets the SC sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct LineIntersection {
    pub gamma: StereoPoint,
    /// α₁, α₂ with α₁(z−ζ₁)(z−ζ₂) + α₂(z−ξ₁)(z−ξ₂) = (z−γ)²; for γ = ∞ the
    /// combination is the constant α₁(ζ₁ζ₂ − ξ₁ξ₂) with α₁ = −α₂ = 1. `None`
    /// when an input star is at ∞.
    pub poly_alphas: Option<[Complex64; 2]>,
    /// w₁, w₂ with |γ⟩ ∝ w₁|Z⟩ + w₂|Ξ⟩ for the normalized input states, scaled
    /// so that |w₁|² + |w₂|² = 1.
    pub state_weights: [Complex64; 2],
}

/// Intersections of the line through the spin-1 states with stars {ζ₁, ζ₂}
/// and {ξ₁, ξ₂} with the SC sphere: two points, or one when the inputs share a star.
pub fn spin1_line_intersections(
    zeta: [StereoPoint; 2],
    xi: [StereoPoint; 2],
) -> Result<Vec<LineIntersection>> {
    spin1_line_intersections_with(zeta, xi, &Tolerances::default())
}

pub fn spin1_line_intersections_with(
    zeta: [StereoPoint; 2],
    xi: [StereoPoint; 2],
    tol: &Tolerances,
) -> Result<Vec<LineIntersection>> {
    let z_state = state_from_constellation(&Constellation::from_points(&zeta)?)?;
    let x_state = state_from_constellation(&Constellation::from_points(&xi)?)?;
    if z_state.overlap(&x_state) > 1.0 - tol.normalization {
        return Err(Error::CoincidentStates);
    }
    let all = [zeta[0], zeta[1], xi[0], xi[1]];
    let finite = all.iter().all(|p| !p.is_infinite());
    let frame = if finite { Rotation::identity() } else { finite_chart(&all) };
    let z: Vec<Complex64> = all.iter().map(|p| frame.apply_stereo(p).as_finite().expect("finite chart")).collect();
    let gammas = spin1_gammas(z[0], z[1], z[2], z[3], tol);
    let back = frame.inverse();
    let mut out: Vec<LineIntersection> = gammas
        .into_iter()
        .map(|g| {
            let gamma = back.apply_stereo(&g);
            let poly_alphas = finite.then(|| spin1_poly_alphas(&gamma, z[0], z[1], z[2], z[3]));
            let sc = sc_state(&gamma.to_direction(), z_state.spin());
            let (w, _) = two_term_fit(z_state.coeffs(), x_state.coeffs(), sc.coeffs());
            LineIntersection {
                gamma,
                poly_alphas,
                state_weights: unit_pair(w),
            }
        })
        .collect();
    out.sort_by(|a, b| lex_stereo(&a.gamma, &b.gamma));
    Ok(out)
}

/// The γ solving α₁(z−ζ₁)(z−ζ₂) + α₂(z−ξ₁)(z−ξ₂) = (z−γ)², + branch first.
fn spin1_gammas(z1: Complex64, z2: Complex64, x1: Complex64, x2: Complex64, tol: &Tolerances) -> Vec<StereoPoint> {
    let den = z1 + z2 - x1 - x2;
    let size = [z1, z2, x1, x2].iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut gammas = if den.norm() <= tol.degenerate_a * size {
        // Equal root sums: one intersection is ∞ (α₁ = −α₂), the other S/2.
        vec![StereoPoint::Finite((z1 + z2) / 2.0), StereoPoint::Infinity]
    } else {
        let root = ((z1 - x1) * (z1 - x2) * (z2 - x1) * (z2 - x2)).sqrt();
        let base = z1 * z2 - x1 * x2;
        vec![
            StereoPoint::Finite((base + root) / den),
            StereoPoint::Finite((base - root) / den),
        ]
    };
    if gammas[0].chordal(&gammas[1]) < tol.cluster {
        gammas.truncate(1);
    }
    gammas
}

fn spin1_poly_alphas(gamma: &StereoPoint, z1: Complex64, z2: Complex64, x1: Complex64, x2: Complex64) -> [Complex64; 2] {
    let den = z1 + z2 - x1 - x2;
    match gamma.as_finite() {
        None => [ONE, -ONE],
        Some(g) if den.norm() > 0.0 => [(2.0 * g - x1 - x2) / den, (-2.0 * g + z1 + z2) / den],
        Some(g) => {
            // α₁ + α₂ = 1 and α₁ζ₁ζ₂ + α₂ξ₁ξ₂ = γ².
            let (p, q) = (z1 * z2, x1 * x2);
            let a1 = (g * g - q) / (p - q);
            [a1, ONE - a1]
        }
    }
}

/// A spin-3/2 state written through two SC states.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSCDecomposition {
    pub gamma1: StereoPoint,
    pub gamma2: StereoPoint,
    /// Non-degenerate: α₁(z−γ₁)³ + α₂(z−γ₂)³ = Π(z−ζ_i) over the finite stars,
    /// with (z−∞)³ read as 1. Degenerate (γ₁ = γ₂ = the double star ζ_d):
    /// α₁(z−ζ_d)³ + α₂(z−ζ_d)² = Π(z−ζ_i), with basis {1, z} when ζ_d = ∞.
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    /// Two stars coincide: the state lies on the line through an SC state and
    /// a tangent vector at it, not on a line through two SC states.
    pub degenerate: bool,
    /// w₁, w₂ with |Ψ⟩ = w₁|γ₁⟩ + w₂|γ₂⟩ (normalized SC states and normalized
    /// |Ψ⟩ from the stars), up to a global phase; `None` when degenerate.
    pub state_weights: Option<[Complex64; 2]>,
}

pub fn spin32_decompose(zeta: [StereoPoint; 3]) -> Result<TwoSCDecomposition> {
    spin32_decompose_with(zeta, &Tolerances::default())
}

pub fn spin32_decompose_with(zeta: [StereoPoint; 3], tol: &Tolerances) -> Result<TwoSCDecomposition> {
    let target_state = state_from_constellation(&Constellation::from_points(&zeta)?)?;
    let target_poly = poly::from_roots(&zeta.iter().filter_map(|p| p.as_finite()).collect::<Vec<_>>());
    let target_poly = pad(&target_poly, 4);

    let pairs = [(0, 1), (1, 2), (0, 2)];
    let coincident = pairs.iter().find(|&&(i, j)| zeta[i].chordal(&zeta[j]) < tol.cluster);
    if let Some(&(i, _)) = coincident {
        let double = zeta[i];
        let basis: [Vec<Complex64>; 2] = match double.as_finite() {
            Some(d) => [poly::from_roots(&[d; 3]), pad(&poly::from_roots(&[d; 2]), 4)],
            None => [pad(&[ONE], 4), pad(&[ZERO, ONE], 4)],
        };
        let (w, _) = two_term_fit(&basis[0], &basis[1], &target_poly);
        return Ok(TwoSCDecomposition {
            gamma1: double,
            gamma2: double,
            alpha1: w[0],
            alpha2: w[1],
            degenerate: true,
            state_weights: None,
        });
    }

    let finite = zeta.iter().all(|p| !p.is_infinite());
    let frame = if finite { Rotation::identity() } else { finite_chart(&zeta) };
    let z: Vec<Complex64> = zeta.iter().map(|p| frame.apply_stereo(p).as_finite().expect("finite chart")).collect();
    let back = frame.inverse();
    let (g1, g2) = spin32_gammas(z[0], z[1], z[2], tol);
    let mut gammas = [back.apply_stereo(&g1), back.apply_stereo(&g2)];
    gammas.sort_by(lex_stereo);
    let basis = gammas.map(|g| match g.as_finite() {
        Some(c) => poly::from_roots(&[c; 3]),
        None => pad(&[ONE], 4),
    });
    let (alphas, _) = two_term_fit(&basis[0], &basis[1], &target_poly);
    let spin = target_state.spin();
    let sc = gammas.map(|g| sc_state(&g.to_direction(), spin));
    let (w, _) = two_term_fit(sc[0].coeffs(), sc[1].coeffs(), target_state.coeffs());
    Ok(TwoSCDecomposition {
        gamma1: gammas[0],
        gamma2: gammas[1],
        alpha1: alphas[0],
        alpha2: alphas[1],
        degenerate: false,
        state_weights: Some(w),
    })
}

/// Closed-form γ₁, γ₂ for distinct finite roots; A = 0 routes to (e₁/3, ∞).
fn spin32_gammas(z1: Complex64, z2: Complex64, z3: Complex64, tol: &Tolerances) -> (StereoPoint, StereoPoint) {
    let a = 2.0 * (z1 * z1 + z2 * z2 + z3 * z3 - z1 * z2 - z2 * z3 - z3 * z1);
    let size = [z1, z2, z3].iter().map(|z| z.norm_sqr()).fold(1.0, f64::max);
    if a.norm() < tol.degenerate_a * size {
        return (StereoPoint::Finite((z1 + z2 + z3) / 3.0), StereoPoint::Infinity);
    }
    let num = z1 * z1 * (z2 + z3) + z2 * z2 * (z3 + z1) + z3 * z3 * (z1 + z2) - 6.0 * z1 * z2 * z3;
    let root = Complex64::new(0.0, 3f64.sqrt()) * (z1 - z2) * (z2 - z3) * (z3 - z1);
    (StereoPoint::Finite((num + root) / a), StereoPoint::Finite((num - root) / a))
}

fn pad(p: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut v = p.to_vec();
    v.resize(len, ZERO);
    v
}

/// A rotation under which every point is finite and of moderate size.
fn finite_chart(points: &[StereoPoint]) -> Rotation {
    let mut best = (f64::INFINITY, Rotation::identity());
    for k in 1..=12 {
        let r = Rotation::axis_angle([0.3, 1.0, 0.2], 0.37 * k as f64);
        let size = points
            .iter()
            .map(|p| r.apply_stereo(p).as_finite().map_or(f64::INFINITY, |z| z.norm()))
            .fold(0.0, f64::max);
        if size < best.0 {
            best = (size, r);
        }
    }
    best.1
}

fn lex_stereo(a: &StereoPoint, b: &StereoPoint) -> std::cmp::Ordering {
    match (a.as_finite(), b.as_finite()) {
        (Some(x), Some(y)) => x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    }
}

/// Least-squares w with w₁u + w₂v ≈ t, and the residual ‖w₁u + w₂v − t‖.
fn two_term_fit(u: &[Complex64], v: &[Complex64], t: &[Complex64]) -> ([Complex64; 2], f64) {
    let (uu, uv, vv) = (inner(u, u), inner(u, v), inner(v, v));
    let (ut, vt) = (inner(u, t), inner(v, t));
    let det = uu * vv - uv * uv.conj();
    let w1 = (vv * ut - uv * vt) / det;
    let w2 = (uu * vt - uv.conj() * ut) / det;
    let residual = u
        .iter()
        .zip(v)
        .zip(t)
        .map(|((a, b), c)| (w1 * a + w2 * b - c).norm_sqr())
        .sum::<f64>()
        .sqrt();
    ([w1, w2], residual)
}

fn unit_pair(w: [Complex64; 2]) -> [Complex64; 2] {
    let n = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
    [w[0] / n, w[1] / n]
}

/// SC points found on the complex line x|a⟩ + y|b⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct LineScan {
    /// Line parameters λ = y/x of the SC points found.
    pub sc_points: Vec<StereoPoint>,
    /// Smallest distinct-star count among parameters away from λ = 0, ∞.
    pub min_interior_distinct: usize,
    pub samples: usize,
}

/// Scans the line through two states at λ = 0, λ = ∞ and `samples` points of a
/// Fibonacci lattice on the λ sphere; a point counts as SC when its stars merge
/// into one cluster of chordal radius `tol.sc_membership`.
pub fn scan_line_for_sc(
    a: &SpinState,
    b: &SpinState,
    samples: usize,
    exec: Execution,
    tol: &Tolerances,
) -> Result<LineScan> {
    if a.n() != b.n() {
        return Err(Error::SpinMismatch(a.n(), b.n()));
    }
    let mut params = vec![StereoPoint::Finite(ZERO), StereoPoint::Infinity];
    params.extend(fibonacci_sphere(samples, 0.0).iter().map(|d| d.to_stereo()));
    let counts = map_range(exec, params.len(), |i| -> Result<usize> {
        let [x, y] = params[i].spinor();
        let c: Vec<Complex64> = a.coeffs().iter().zip(b.coeffs()).map(|(p, q)| x * p + y * q).collect();
        let state = SpinState::normalized(a.spin(), c)?;
        distinct_star_count_with(&state, tol.sc_membership, tol)
    });
    let mut sc_points = Vec::new();
    let mut min_interior = usize::MAX;
    for (i, count) in counts.into_iter().enumerate() {
        let count = count?;
        if count == 1 {
            sc_points.push(params[i]);
        }
        if i >= 2 {
            min_interior = min_interior.min(count);
        }
    }
    Ok(LineScan {
        sc_points,
        min_interior_distinct: min_interior,
        samples: params.len(),
    })
}

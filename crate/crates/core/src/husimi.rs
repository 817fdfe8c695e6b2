//! Husimi function H_Ψ(n) = |⟨n|Ψ⟩|², its critical points, and the closest
//! spin-coherent state.
//!
//! Critical points are located by Newton's method on the complex equation
//! F(u) = (1 + |u|²) Q'(u) − N ū Q(u) = 0, where Q(u) = Σ √C(N,k) c_k u^k is
//! the overlap polynomial of the state expressed in a frame whose north pole is
//! the current chart center. The chart is re-centered whenever an iterate
//! leaves the unit disk, so poles never need special treatment.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::par::{map_range, Execution};
use crate::sphere::{fibonacci_sphere, Direction, Rotation, StereoPoint};
use crate::spin::{binomial, SpinState};
use crate::stellar::{coherent_overlap, constellation_with, rotate_state};
use crate::tolerance::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    GlobalMin,
    LocalMax,
    Saddle,
}

/// A critical point of the Husimi function with its local classification data.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub direction: Direction,
    pub kind: CriticalKind,
    /// H_Ψ at the point.
    pub value: f64,
    /// Azimuth (from ê_θ toward ê_φ) along which a saddle is a local minimum.
    pub saddle_phi: Option<f64>,
    /// (ρ_s, ρ_{s−1}, ρ_{s−2}) in the frame whose z axis is `direction`.
    pub rho: [f64; 3],
    /// (α_s, α_{s−2}) in the same frame.
    pub phases: [f64; 2],
    /// |√s ρ_s − √(2s−1) ρ_{s−2}| is below tolerance: the Hessian is degenerate.
    pub marginal: bool,
    /// Number of coincident stars whose antipode this is (1 for maxima and saddles).
    pub multiplicity: usize,
}

/// Result of a critical-point search.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSet {
    pub points: Vec<CriticalPoint>,
    pub warnings: Vec<Warning>,
}

impl CriticalSet {
    pub fn of_kind(&self, kind: CriticalKind) -> impl Iterator<Item = &CriticalPoint> {
        self.points.iter().filter(move |p| p.kind == kind)
    }

    pub fn count(&self, kind: CriticalKind) -> usize {
        self.of_kind(kind).count()
    }

    /// #max − #saddle + #min (distinct points).
    pub fn morse_count(&self) -> i64 {
        self.count(CriticalKind::LocalMax) as i64 - self.count(CriticalKind::Saddle) as i64
            + self.count(CriticalKind::GlobalMin) as i64
    }
}

/// Options for [`critical_points_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Number of multistart seeds; `None` means max(50, 40 N).
    pub seed_count: Option<usize>,
    /// Azimuthal offset of the seed lattice.
    pub lattice_offset: f64,
    pub max_iterations: usize,
    pub execution: Execution,
    pub tolerances: Tolerances,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            seed_count: None,
            lattice_offset: 0.0,
            max_iterations: 100,
            execution: Execution::default(),
            tolerances: Tolerances::default(),
        }
    }
}

/// H_Ψ(n) = |⟨n|Ψ⟩|².
pub fn husimi(state: &SpinState, n: &Direction) -> f64 {
    coherent_overlap(state, n).norm_sqr().min(1.0)
}

/// Fubini–Study distance arccos √H between |n⟩ and |Ψ⟩.
pub fn sc_distance(state: &SpinState, n: &Direction) -> f64 {
    husimi(state, n).sqrt().min(1.0).acos()
}

/// A row of the equiangular Husimi grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub theta: f64,
    pub phi: f64,
    pub h: f64,
    pub distance: f64,
}

/// H on the grid θ_i = π i/(K−1), φ_j = 2π j/K, ordered by (i, j).
pub fn husimi_grid(state: &SpinState, k: usize, exec: Execution) -> Vec<GridSample> {
    let k = k.max(2);
    map_range(exec, k * k, |idx| {
        let (i, j) = (idx / k, idx % k);
        let theta = PI * i as f64 / (k - 1) as f64;
        let phi = 2.0 * PI * j as f64 / k as f64;
        let h = coherent_overlap(state, &Direction { theta, phi }).norm_sqr().min(1.0);
        GridSample {
            theta,
            phi,
            h,
            distance: h.sqrt().acos(),
        }
    })
}

/// Coefficients of Ψ in the eigenbasis of n·S, index k ↔ m = s − k.
pub fn rotated_expansion(state: &SpinState, n: &Direction) -> Vec<Complex64> {
    rotate_state(state, &Rotation::north_to(n).inverse()).into_coeffs()
}

pub fn classify_critical(state: &SpinState, n0: &Direction) -> Result<CriticalPoint> {
    classify_critical_with(state, n0, &Tolerances::default())
}

pub fn classify_critical_with(
    state: &SpinState,
    n0: &Direction,
    tol: &Tolerances,
) -> Result<CriticalPoint> {
    let c = rotated_expansion(state, n0);
    let at = |k: usize| c.get(k).copied().unwrap_or(ZERO);
    let rho = [at(0).norm(), at(1).norm(), at(2).norm()];
    let phases = [at(0).arg(), at(2).arg()];
    let value = rho[0] * rho[0];
    if rho[0] < tol.global_min {
        return Ok(CriticalPoint {
            direction: *n0,
            kind: CriticalKind::GlobalMin,
            value,
            saddle_phi: None,
            rho,
            phases,
            marginal: false,
            multiplicity: 1,
        });
    }
    if rho[1] > tol.critical {
        return Err(Error::NotCritical(rho[1]));
    }
    let s = state.spin().value();
    let lhs = s.sqrt() * rho[0];
    let rhs = (2.0 * s - 1.0).max(0.0).sqrt() * rho[2];
    let marginal = (lhs - rhs).abs() < tol.marginal;
    let (kind, saddle_phi) = if lhs > rhs {
        (CriticalKind::LocalMax, None)
    } else {
        let phi = ((phases[1] - phases[0]) / 2.0).rem_euclid(PI);
        (CriticalKind::Saddle, Some(phi))
    };
    Ok(CriticalPoint {
        direction: *n0,
        kind,
        value,
        saddle_phi,
        rho,
        phases,
        marginal,
        multiplicity: 1,
    })
}

/// Q, Q', Q'' at u for Q(u) = Σ w_k u^k.
fn q_derivatives(w: &[Complex64], u: Complex64) -> (Complex64, Complex64, Complex64) {
    let mut q = ZERO;
    let mut q1 = ZERO;
    let mut q2 = ZERO;
    for &a in w.iter().rev() {
        q2 = q2 * u + q1 * 2.0;
        q1 = q1 * u + q;
        q = q * u + a;
    }
    (q, q1, q2)
}

fn chart_weights(state: &SpinState, center: &Direction) -> Vec<Complex64> {
    let n = state.n();
    rotated_expansion(state, center)
        .into_iter()
        .enumerate()
        .map(|(k, c)| c * binomial(n, k).sqrt())
        .collect()
}

/// Newton refinement of a maximum or saddle from `start`. Returns `None` when
/// the iteration does not converge.
pub(crate) fn refine_critical(
    state: &SpinState,
    start: &Direction,
    max_iterations: usize,
) -> Option<Direction> {
    let n = state.n() as f64;
    let residual = |w: &[Complex64], u: Complex64| {
        let (q, q1, _) = q_derivatives(w, u);
        q1 * (1.0 + u.norm_sqr()) - u.conj() * q * n
    };
    let mut center = *start;
    let mut w = chart_weights(state, &center);
    let mut u = ZERO;
    for _ in 0..max_iterations {
        let (q, q1, q2) = q_derivatives(&w, u);
        let r2 = u.norm_sqr();
        let ub = u.conj();
        let f = q1 * (1.0 + r2) - ub * q * n;
        if f.norm() < 1e-15 {
            return Some(chart_point(&center, u));
        }
        let a = ub * q1 + q2 * (1.0 + r2) - ub * q1 * n;
        let b = u * q1 - q * n;
        let det = a.norm_sqr() - b.norm_sqr();
        let mut delta = if det.abs() > 1e-300 {
            (-f * a.conj() + b * f.conj()) / det
        } else {
            -f / (a.norm() + b.norm() + 1.0)
        };
        let step = delta.norm();
        if step > 0.5 {
            delta *= 0.5 / step;
        }
        // Backtrack until |F| decreases; a stall means the seed sits in a
        // basin of |F| that holds no critical point.
        let mut accepted = false;
        for _ in 0..40 {
            if residual(&w, u + delta).norm() < f.norm() {
                accepted = true;
                break;
            }
            delta *= 0.5;
        }
        if !accepted {
            return None;
        }
        u += delta;
        if delta.norm() < 1e-14 {
            return Some(chart_point(&center, u));
        }
        if u.norm() > 0.5 {
            center = chart_point(&center, u);
            w = chart_weights(state, &center);
            u = ZERO;
        }
    }
    None
}

fn chart_point(center: &Direction, u: Complex64) -> Direction {
    let local = StereoPoint::Finite(u.conj()).to_direction();
    Rotation::north_to(center).apply_direction(&local)
}

pub fn critical_points(state: &SpinState) -> Result<CriticalSet> {
    critical_points_with(state, &SearchOptions::default())
}

pub fn critical_points_with(state: &SpinState, opts: &SearchOptions) -> Result<CriticalSet> {
    let tol = &opts.tolerances;
    let n = state.n();
    let count = opts.seed_count.unwrap_or((40 * n).max(50));
    let seeds = fibonacci_sphere(count, opts.lattice_offset);

    let refined: Vec<Option<CriticalPoint>> = map_range(opts.execution, seeds.len(), |i| {
        let d = refine_critical(state, &seeds[i], opts.max_iterations)?;
        classify_critical_with(state, &d, tol).ok()
    });

    let mut failed = Vec::new();
    let mut found: Vec<CriticalPoint> = Vec::new();
    for (i, r) in refined.into_iter().enumerate() {
        match r {
            // Zeros of H are inserted from the constellation below.
            Some(p) if p.kind != CriticalKind::GlobalMin => found.push(p),
            Some(_) => {}
            None => failed.push(i),
        }
    }
    found.sort_by(|a, b| a.direction.lex_cmp(&b.direction));
    let mut points: Vec<CriticalPoint> = Vec::new();
    for p in found {
        if !points
            .iter()
            .any(|q| q.direction.angle_to(&p.direction) < tol.dedup)
        {
            points.push(p);
        }
    }

    for star in constellation_with(state, tol)?.stars() {
        let d = star.direction().antipode();
        let mut p = classify_critical_with(state, &d, tol)?;
        p.multiplicity = star.multiplicity;
        points.push(p);
    }
    points.sort_by(|a, b| {
        kind_rank(a.kind)
            .cmp(&kind_rank(b.kind))
            .then(a.direction.lex_cmp(&b.direction))
    });

    let mut warnings = Vec::new();
    if !failed.is_empty() {
        warnings.push(Warning::Convergence(failed));
    }
    Ok(CriticalSet { points, warnings })
}

fn kind_rank(k: CriticalKind) -> u8 {
    match k {
        CriticalKind::LocalMax => 0,
        CriticalKind::Saddle => 1,
        CriticalKind::GlobalMin => 2,
    }
}

/// The closest SC state: the global maximum of H.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosestSc {
    pub direction: Direction,
    /// Fubini–Study distance r_c = arccos √H_max (geometric measure of entanglement).
    pub distance: f64,
    pub value: f64,
    /// All maxima whose value is within the tie tolerance of the largest,
    /// lexicographically sorted; `direction` is the first.
    pub ties: Vec<Direction>,
    pub warnings: Vec<Warning>,
}

pub fn closest_sc(state: &SpinState) -> Result<ClosestSc> {
    closest_sc_with(state, &SearchOptions::default())
}

pub fn closest_sc_with(state: &SpinState, opts: &SearchOptions) -> Result<ClosestSc> {
    let set = critical_points_with(state, opts)?;
    closest_from_set(&set, &opts.tolerances)
}

pub fn closest_from_set(set: &CriticalSet, tol: &Tolerances) -> Result<ClosestSc> {
    let best = set
        .of_kind(CriticalKind::LocalMax)
        .map(|p| p.value)
        .fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() {
        return Err(Error::Numerical("no local maximum found".into()));
    }
    let mut ties: Vec<Direction> = set
        .of_kind(CriticalKind::LocalMax)
        .filter(|p| best - p.value <= tol.tie)
        .map(|p| p.direction)
        .collect();
    ties.sort_by(|a, b| a.lex_cmp(b));
    let mut warnings = set.warnings.clone();
    if ties.len() > 1 {
        warnings.push(Warning::NonUniqueClosest(ties.len()));
    }
    Ok(ClosestSc {
        direction: ties[0],
        distance: best.sqrt().min(1.0).acos(),
        value: best,
        ties,
        warnings,
    })
}

/// (s/2)|⟨−n, s−1|Ψ⟩|², the opening coefficient of the conical zero of H at
/// the antipode of the star `star`.
pub fn cone_coefficient(state: &SpinState, star: &Direction) -> Result<f64> {
    cone_coefficient_with(state, star, &Tolerances::default())
}

pub fn cone_coefficient_with(state: &SpinState, star: &Direction, tol: &Tolerances) -> Result<f64> {
    let cons = constellation_with(state, tol)?;
    let target = star.to_stereo();
    let nearest = cons
        .stars()
        .iter()
        .min_by(|a, b| a.point.chordal(&target).total_cmp(&b.point.chordal(&target)))
        .expect("non-empty constellation");
    let dist = nearest.point.chordal(&target);
    if dist > tol.sc_membership {
        return Err(Error::NotAStar(dist));
    }
    let c = rotated_expansion(state, &star.antipode());
    let coefficient = state.spin().value() / 2.0 * c.get(1).map_or(0.0, |x| x.norm_sqr());
    if nearest.multiplicity > 1 {
        return Err(Error::DegenerateStar {
            multiplicity: nearest.multiplicity,
            coefficient,
        });
    }
    Ok(coefficient)
}

/// Perturbs `state` minimally until the local maxima near `a` and `b` have
/// equal Husimi values. Used to sharpen states given with rounded coefficients.
pub fn balance_maxima(state: &SpinState, a: &Direction, b: &Direction) -> Result<SpinState> {
    let mut psi = state.clone();
    let (mut da, mut db) = (*a, *b);
    let fail = || Error::Numerical("maximum lost while balancing".into());
    for _ in 0..100 {
        da = refine_critical(&psi, &da, 100).ok_or_else(fail)?;
        db = refine_critical(&psi, &db, 100).ok_or_else(fail)?;
        let oa = coherent_overlap(&psi, &da);
        let ob = coherent_overlap(&psi, &db);
        let g = oa.norm_sqr() - ob.norm_sqr();
        if g.abs() < 1e-15 {
            return Ok(psi);
        }
        let sa = crate::sc_basis::sc_state(&da, psi.spin());
        let sb = crate::sc_basis::sc_state(&db, psi.spin());
        // Real gradient of g: δg = Re⟨G|δΨ⟩.
        let mut grad: Vec<Complex64> = sa
            .coeffs()
            .iter()
            .zip(sb.coeffs())
            .map(|(x, y)| (x * oa - y * ob) * 2.0)
            .collect();
        let along = crate::spin::inner(psi.coeffs(), &grad);
        for (gk, pk) in grad.iter_mut().zip(psi.coeffs()) {
            *gk -= pk * along;
        }
        let gn = crate::spin::norm_sqr(&grad);
        if gn == 0.0 {
            return Err(Error::Numerical("maxima cannot be balanced".into()));
        }
        let next: Vec<Complex64> = psi
            .coeffs()
            .iter()
            .zip(&grad)
            .map(|(p, gk)| p - gk * (g / gn))
            .collect();
        psi = SpinState::normalized(psi.spin(), next)?;
    }
    Err(Error::Numerical("balancing did not converge".into()))
}

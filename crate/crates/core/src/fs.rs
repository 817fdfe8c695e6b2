//! Fubini–Study geometry of projective Hilbert space: distances, geodesics,
//! exponential and logarithm maps, tangent frames, triangle angles, and point
//! clouds of the SC sphere seen from a base state.
//!
//! Projective points are represented by normalized [`SpinState`]s; every
//! quantity here is invariant under rephasing of the representatives. Tangent
//! vectors at ρ_Ψ are Hermitian matrices |Ψ⟩⟨φ| + |φ⟩⟨Ψ| with ⟨Ψ|φ⟩ = 0 and
//! inner product (1/2) Tr(AB).

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{map_range, Execution};
use crate::sc_basis::sc_state;
use crate::sphere::Direction;
use crate::spin::{inner, Spin, SpinState};
use crate::stellar::constellation_with;
use crate::tolerance::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Two representatives define the same ray.
pub fn same_ray(a: &SpinState, b: &SpinState, tol: f64) -> bool {
    a.overlap(b) > 1.0 - tol
}

/// ω = arccos |⟨a|b⟩| ∈ [0, π/2], evaluated as atan2(sin, cos) for accuracy
/// near 0 and averaged over both orders so that it is exactly symmetric.
pub fn fs_distance(a: &SpinState, b: &SpinState) -> f64 {
    let one_way = |x: &[Complex64], y: &[Complex64]| norm(&perpendicular(x, y)).atan2(inner(x, y).norm());
    0.5 * (one_way(a.coeffs(), b.coeffs()) + one_way(b.coeffs(), a.coeffs()))
}

/// |b⟩ − ⟨a|b⟩|a⟩.
fn perpendicular(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let ov = inner(a, b);
    b.iter().zip(a).map(|(y, x)| y - ov * x).collect()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Distance from `base` to `target` and the unit vector û ⊥ |Ψ⟩ along which
/// the geodesic leaves the base: |c(t)⟩ = cos t |Ψ⟩ + sin t |û⟩, with the
/// target reached at t = ω. `None` when the two rays coincide.
fn geodesic_direction(base: &[Complex64], target: &[Complex64]) -> (f64, Option<Vec<Complex64>>) {
    let ov = inner(target, base);
    let perp = perpendicular(base, target);
    let sin = norm(&perp);
    let omega = sin.atan2(ov.norm());
    if sin == 0.0 {
        return (omega, None);
    }
    // e^{iη} with ⟨t|Ψ⟩ = cos ω e^{iη}; an orthogonal target has no preferred phase.
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
    (omega, Some(perp.into_iter().map(|z| z * phase / sin).collect()))
}

/// The point at arclength `t` along the geodesic from `a` toward `b`.
pub fn geodesic(a: &SpinState, b: &SpinState, t: f64) -> Result<SpinState> {
    geodesic_with(a, b, t, &Tolerances::default())
}

pub fn geodesic_with(a: &SpinState, b: &SpinState, t: f64, tol: &Tolerances) -> Result<SpinState> {
    check_same_spin(a, b)?;
    let (omega, dir) = geodesic_direction(a.coeffs(), b.coeffs());
    if omega >= FRAC_PI_2 - tol.cut_locus {
        return Err(Error::AntipodalTarget(omega));
    }
    let Some(u) = dir else {
        return Ok(a.clone());
    };
    let (s, c) = t.sin_cos();
    let coeffs = a.coeffs().iter().zip(&u).map(|(x, y)| x * c + y * s).collect();
    SpinState::normalized(a.spin(), coeffs)
}

fn check_same_spin(a: &SpinState, b: &SpinState) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::SpinMismatch(a.n(), b.n()));
    }
    Ok(())
}

/// |Ψ⟩⟨φ| + |φ⟩⟨Ψ|.
fn hermitian_pair(psi: &[Complex64], phi: &[Complex64]) -> DMatrix<Complex64> {
    let d = psi.len();
    DMatrix::from_fn(d, d, |i, j| psi[i] * phi[j].conj() + phi[i] * psi[j].conj())
}

/// A Hermitian matrix tangent to projective space at some base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    matrix: DMatrix<Complex64>,
}

impl TangentVector {
    pub fn new(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// (1/2) Tr(AB).
    pub fn inner(&self, other: &TangentVector) -> f64 {
        half_trace(&self.matrix, &other.matrix)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// Tr(v ρ_Ψ) = ⟨Ψ|v|Ψ⟩, zero for vectors tangent at Ψ.
    pub fn trace_against(&self, base: &SpinState) -> f64 {
        let psi = base.coeffs();
        let mut acc = ZERO;
        for i in 0..psi.len() {
            for j in 0..psi.len() {
                acc += psi[i].conj() * self.matrix[(i, j)] * psi[j];
            }
        }
        acc.re
    }

    /// max |v − v†|.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(&self.matrix * Complex64::new(factor, 0.0))
    }
}

/// (1/2) Re Tr(AB).
fn half_trace(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let d = a.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    0.5 * acc
}

/// log_Ψ ρ_t = ω ρ̇_c(0), with ρ̇_c(0) = −2 cot ω ρ_Ψ + csc ω (e^{iη}|t⟩⟨Ψ| + h.c.)
/// and ⟨t|Ψ⟩ = cos ω e^{iη}. With this phase ⟨Ψ|ρ̇_c(0)|Ψ⟩ = 0.
pub fn log_map(base: &SpinState, target: &SpinState) -> Result<TangentVector> {
    log_map_with(base, target, &Tolerances::default())
}

pub fn log_map_with(base: &SpinState, target: &SpinState, tol: &Tolerances) -> Result<TangentVector> {
    check_same_spin(base, target)?;
    let (omega, dir) = geodesic_direction(base.coeffs(), target.coeffs());
    if omega >= FRAC_PI_2 - tol.cut_locus {
        return Err(Error::CutLocus(omega));
    }
    Ok(match dir {
        Some(u) => TangentVector::new(hermitian_pair(base.coeffs(), &u)).scaled(omega),
        None => TangentVector::new(DMatrix::zeros(base.dim(), base.dim())),
    })
}

/// exp_Ψ v = cos ‖φ‖ |Ψ⟩ + sin ‖φ‖ φ/‖φ‖ with |φ⟩ the part of v|Ψ⟩ orthogonal to |Ψ⟩.
pub fn exp_map(base: &SpinState, v: &TangentVector) -> SpinState {
    let psi = base.coeffs();
    let vpsi: Vec<Complex64> = (0..psi.len())
        .map(|i| (0..psi.len()).map(|j| v.matrix[(i, j)] * psi[j]).sum())
        .collect();
    let phi = perpendicular(psi, &vpsi);
    let r = norm(&phi);
    if r == 0.0 {
        return base.clone();
    }
    let (s, c) = r.sin_cos();
    let coeffs = psi.iter().zip(&phi).map(|(x, y)| x * c + y * (s / r)).collect();
    SpinState::normalized(base.spin(), coeffs).expect("unit combination")
}

/// An orthonormal basis of the tangent space at a base point.
#[derive(Debug, Clone)]
pub struct TangentFrame {
    base: SpinState,
    elements: Vec<DMatrix<Complex64>>,
}

impl TangentFrame {
    /// Frame from explicit Hermitian matrices (not checked).
    pub fn from_matrices(base: SpinState, elements: Vec<DMatrix<Complex64>>) -> Self {
        Self { base, elements }
    }

    /// h_{2k−1} = |Ψ⟩⟨e_k| + h.c., h_{2k} = i(|Ψ⟩⟨e_k| − h.c.) for an
    /// orthonormal completion e_1, …, e_N of |Ψ⟩.
    pub fn from_completion(base: SpinState, completion: &[Vec<Complex64>]) -> Self {
        let psi = base.coeffs();
        let d = psi.len();
        let mut elements = Vec::with_capacity(2 * completion.len());
        for e in completion {
            let outer = DMatrix::from_fn(d, d, |i, j| psi[i] * e[j].conj());
            elements.push(&outer + outer.adjoint());
            elements.push((&outer - outer.adjoint()) * I);
        }
        Self { base, elements }
    }

    pub fn base(&self) -> &SpinState {
        &self.base
    }

    pub fn elements(&self) -> &[DMatrix<Complex64>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// v^i = (1/2) Tr(v h_i).
    pub fn components(&self, v: &TangentVector) -> Vec<f64> {
        self.elements.iter().map(|h| half_trace(&v.matrix, h)).collect()
    }

    pub fn reconstruct(&self, components: &[f64]) -> TangentVector {
        let d = self.base.dim();
        let mut m = DMatrix::zeros(d, d);
        for (h, &x) in self.elements.iter().zip(components) {
            m += h * Complex64::new(x, 0.0);
        }
        TangentVector::new(m)
    }

    /// (1/2) Tr(h_i h_j).
    pub fn gram(&self) -> DMatrix<f64> {
        let k = self.elements.len();
        DMatrix::from_fn(k, k, |i, j| half_trace(&self.elements[i], &self.elements[j]))
    }
}

/// The frame built from a Householder completion of |Ψ⟩. The completion is
/// multiplied by the phase of the largest component of |Ψ⟩, so the frame
/// matrices do not change when the representative is rephased.
pub fn tangent_frame(base: &SpinState) -> TangentFrame {
    let psi = base.coeffs();
    let d = psi.len();
    let pivot = (0..d)
        .max_by(|&i, &j| psi[i].norm().total_cmp(&psi[j].norm()).then(j.cmp(&i)))
        .expect("nonempty state");
    let phase = psi[pivot] / psi[pivot].norm();
    let u: Vec<Complex64> = psi.iter().map(|z| z * phase.conj()).collect();
    // Householder reflection H = I − 2ww†/‖w‖² with H e_pivot = u.
    let mut w: Vec<Complex64> = u.iter().map(|z| -z).collect();
    w[pivot] += 1.0;
    let wn = w.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let completion: Vec<Vec<Complex64>> = (0..d)
        .filter(|&k| k != pivot)
        .map(|k| {
            (0..d)
                .map(|i| {
                    let delta = if i == k { 1.0 } else { 0.0 };
                    let h = if wn > 0.0 { delta - 2.0 * w[i] * w[k].conj() / wn } else { delta.into() };
                    h * phase
                })
                .collect()
        })
        .collect();
    TangentFrame::from_completion(base.clone(), &completion)
}

/// The spin-1 state 2b⁻¹(cos²(α/2), 0, −sin²(α/2)), b = √(3 + cos 2α), whose
/// stars are (±sin α, 0, cos α).
pub fn symmetric_pair_state(alpha: f64) -> SpinState {
    let b = (3.0 + (2.0 * alpha).cos()).sqrt();
    let h = alpha / 2.0;
    let coeffs = vec![
        Complex64::new(2.0 * h.cos().powi(2) / b, 0.0),
        ZERO,
        Complex64::new(-2.0 * h.sin().powi(2) / b, 0.0),
    ];
    SpinState::normalized(Spin::from_twice(2).expect("spin 1"), coeffs).expect("nonzero")
}

/// The fixed frame at [`symmetric_pair_state`] given by H₁ = h₁ + ih₂ and
/// H₂ = h₃ + ih₄ with the explicit matrix entries.
pub fn symmetric_pair_frame(alpha: f64) -> TangentFrame {
    let b = (3.0 + (2.0 * alpha).cos()).sqrt();
    let (ca, c2a) = (alpha.cos(), (2.0 * alpha).cos());
    let r = |x: f64| Complex64::new(x, 0.0);
    let mut h1 = DMatrix::zeros(3, 3);
    h1[(1, 0)] = r(2.0 * (ca + 1.0) / b);
    h1[(1, 2)] = r(2.0 * (ca - 1.0) / b);
    let mut h2 = DMatrix::zeros(3, 3);
    h2[(0, 0)] = r((1.0 - c2a) / (b * b));
    h2[(0, 2)] = r(-8.0 * (alpha / 2.0).sin().powi(4) / (b * b));
    h2[(2, 0)] = r((3.0 + c2a + 4.0 * ca) / (b * b));
    h2[(2, 2)] = r((c2a - 1.0) / (b * b));
    let mut elements = Vec::with_capacity(4);
    for big in [h1, h2] {
        elements.push((&big + big.adjoint()) * r(0.5));
        elements.push((&big - big.adjoint()) * Complex64::new(0.0, -0.5));
    }
    TangentFrame::from_matrices(symmetric_pair_state(alpha), elements)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleFlag {
    Regular,
    /// The SC state is orthogonal to the base (within tolerance): its logarithm
    /// is a whole circle of tangent vectors.
    CutLocus,
}

/// log_Ψ of the SC state in one direction, in frame components.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSample {
    pub theta: f64,
    pub phi: f64,
    /// v^1 … v^{4s}; empty on the cut locus.
    pub components: Vec<f64>,
    pub omega: f64,
    pub flag: SampleFlag,
}

pub fn log_sample(frame: &TangentFrame, n: &Direction, tol: &Tolerances) -> LogSample {
    let target = sc_state(n, frame.base.spin());
    let (omega, dir) = geodesic_direction(frame.base.coeffs(), target.coeffs());
    let (components, flag) = if omega >= FRAC_PI_2 - tol.cut_locus {
        (Vec::new(), SampleFlag::CutLocus)
    } else {
        let comps = match dir {
            Some(u) => {
                let v = TangentVector::new(hermitian_pair(frame.base.coeffs(), &u)).scaled(omega);
                frame.components(&v)
            }
            None => vec![0.0; frame.len()],
        };
        (comps, SampleFlag::Regular)
    };
    LogSample {
        theta: n.theta,
        phi: n.phi,
        components,
        omega,
        flag,
    }
}

/// log_Ψ(S²_SC) sampled on the grid θ_i = π i/(K−1), φ_j = 2π j/K.
#[derive(Debug, Clone)]
pub struct LogCloud {
    pub samples: Vec<LogSample>,
    pub frame: TangentFrame,
}

/// Lattice direction of the equiangular grid, row-major in (θ, φ).
pub fn grid_direction(resolution: usize, idx: usize) -> Direction {
    let k = resolution.max(2);
    let (i, j) = (idx / k, idx % k);
    Direction {
        theta: PI * i as f64 / (k - 1) as f64,
        phi: 2.0 * PI * j as f64 / k as f64,
    }
}

pub fn sc_log_cloud(base: &SpinState, resolution: usize, exec: Execution) -> LogCloud {
    sc_log_cloud_in(tangent_frame(base), resolution, exec, &Tolerances::default())
}

pub fn sc_log_cloud_in(
    frame: TangentFrame,
    resolution: usize,
    exec: Execution,
    tol: &Tolerances,
) -> LogCloud {
    let k = resolution.max(2);
    let samples = map_range(exec, k * k, |idx| log_sample(&frame, &grid_direction(k, idx), tol));
    LogCloud { samples, frame }
}

/// Singular values of the centered matrix of regular cloud samples and the
/// number above `rel` × the largest.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

pub fn cloud_rank(cloud: &LogCloud, rel: f64) -> RankReport {
    let rows: Vec<&[f64]> = cloud
        .samples
        .iter()
        .filter(|s| s.flag == SampleFlag::Regular)
        .map(|s| s.components.as_slice())
        .collect();
    let cols = cloud.frame.len();
    if rows.is_empty() || cols == 0 {
        return RankReport {
            rank: 0,
            singular_values: Vec::new(),
        };
    }
    let mut m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    for j in 0..cols {
        let mean = m.column(j).mean();
        m.column_mut(j).add_scalar_mut(-mean);
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    RankReport {
        rank: sv.iter().filter(|&&x| x > rel * top && x > 0.0).count(),
        singular_values: sv,
    }
}

/// Ω = arg(⟨a|b⟩⟨b|c⟩⟨c|a⟩).
pub fn bargmann_phase(a: &SpinState, b: &SpinState, c: &SpinState) -> Result<f64> {
    bargmann_phase_with(a, b, c, &Tolerances::default())
}

pub fn bargmann_phase_with(a: &SpinState, b: &SpinState, c: &SpinState, tol: &Tolerances) -> Result<f64> {
    check_same_spin(a, b)?;
    check_same_spin(a, c)?;
    let ab = a.inner(b);
    let bc = b.inner(c);
    let ca = c.inner(a);
    let smallest = ab.norm().min(bc.norm()).min(ca.norm());
    if smallest < tol.overlap {
        return Err(Error::UndefinedPhase(smallest));
    }
    Ok((ab * bc * ca).arg())
}

/// Angle at Ψ between the geodesics toward a and b:
/// cos Θ = (cos ω_ab cos Ω − cos ω_aΨ cos ω_bΨ)/(sin ω_aΨ sin ω_bΨ).
pub fn tangent_angle(base: &SpinState, a: &SpinState, b: &SpinState) -> Result<f64> {
    tangent_angle_with(base, a, b, &Tolerances::default())
}

pub fn tangent_angle_with(base: &SpinState, a: &SpinState, b: &SpinState, tol: &Tolerances) -> Result<f64> {
    check_same_spin(base, a)?;
    check_same_spin(base, b)?;
    let wa = fs_distance(a, base);
    let wb = fs_distance(b, base);
    for w in [wa, wb] {
        if w < tol.cut_locus || w > FRAC_PI_2 - tol.cut_locus {
            return Err(Error::DegenerateTriangle(w));
        }
    }
    // cos ω_ab cos Ω = Re(⟨a|b⟩⟨b|Ψ⟩⟨Ψ|a⟩) / (cos ω_aΨ cos ω_bΨ), which stays
    // defined when ⟨a|b⟩ = 0.
    let bargmann = a.inner(b) * b.inner(base) * base.inner(a);
    let (ca, cb) = (wa.cos(), wb.cos());
    let cos = (bargmann.re / (ca * cb) - ca * cb) / (wa.sin() * wb.sin());
    Ok(cos.clamp(-1.0, 1.0).acos())
}

/// Unit tangent direction toward one SC state, stereographically projected
/// from the south pole of the 4-th axis onto the 123 hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSample {
    pub theta: f64,
    pub phi: f64,
    /// Fubini–Study distance from the base.
    pub omega: f64,
    /// Components of ρ̇_c(0); empty on the cut locus or at the base itself.
    pub unit: Vec<f64>,
    /// (u₁, u₂, u₃)/(1 + u₄); `None` at the projection pole.
    pub projected: Option<[f64; 3]>,
    pub flag: SampleFlag,
}

/// The circle of unit directions pointing at the SC state antipodal to a star.
#[derive(Debug, Clone, PartialEq)]
pub struct CutCircle {
    pub star: Direction,
    /// Closed curve: the last point repeats the first.
    pub unit: Vec<Vec<f64>>,
    pub projected: Vec<Option<[f64; 3]>>,
}

#[derive(Debug, Clone)]
pub struct DirectionCloud {
    pub samples: Vec<DirectionSample>,
    pub circles: Vec<CutCircle>,
    pub frame: TangentFrame,
}

fn stereo_123(u: &[f64]) -> Option<[f64; 3]> {
    let den = 1.0 + u[3];
    (den > 1e-12).then(|| [u[0] / den, u[1] / den, u[2] / den])
}

pub fn direction_cloud(base: &SpinState, resolution: usize, exec: Execution) -> Result<DirectionCloud> {
    direction_cloud_in(tangent_frame(base), resolution, exec, &Tolerances::default())
}

pub fn direction_cloud_in(
    frame: TangentFrame,
    resolution: usize,
    exec: Execution,
    tol: &Tolerances,
) -> Result<DirectionCloud> {
    let base = frame.base.clone();
    if base.n() < 2 {
        return Err(Error::SpinTooSmall {
            required: 2,
            got: base.n(),
        });
    }
    let k = resolution.max(2);
    let samples = map_range(exec, k * k, |idx| {
        let n = grid_direction(k, idx);
        let target = sc_state(&n, base.spin());
        let (omega, dir) = geodesic_direction(base.coeffs(), target.coeffs());
        let (unit, flag) = match dir {
            Some(u) if omega < FRAC_PI_2 - tol.cut_locus => (
                frame.components(&TangentVector::new(hermitian_pair(base.coeffs(), &u))),
                SampleFlag::Regular,
            ),
            Some(_) => (Vec::new(), SampleFlag::CutLocus),
            None => (Vec::new(), SampleFlag::Regular),
        };
        let projected = if unit.is_empty() { None } else { stereo_123(&unit) };
        DirectionSample {
            theta: n.theta,
            phi: n.phi,
            omega,
            unit,
            projected,
            flag,
        }
    });
    let cons = constellation_with(&base, tol)?;
    let circles = cons
        .stars()
        .iter()
        .map(|star| {
            let star = star.direction();
            let anti = sc_state(&star.antipode(), base.spin());
            let perp = perpendicular(base.coeffs(), anti.coeffs());
            let len = norm(&perp);
            let unit: Vec<Vec<f64>> = (0..=k)
                .map(|j| {
                    let phase = Complex64::from_polar(1.0 / len, 2.0 * PI * (j % k) as f64 / k as f64);
                    let u: Vec<Complex64> = perp.iter().map(|z| z * phase).collect();
                    frame.components(&TangentVector::new(hermitian_pair(base.coeffs(), &u)))
                })
                .collect();
            let projected = unit.iter().map(|u| stereo_123(u)).collect();
            CutCircle {
                star,
                unit,
                projected,
            }
        })
        .collect();
    Ok(DirectionCloud {
        samples,
        circles,
        frame,
    })
}

//! Spin-coherent (SC) states, expansions in arbitrary SC bases, dual and
//! adapted bases, and time reversal.
//!
//! Expanding |Ψ⟩ = Σ α'_k |c_k⟩ in N+1 SC states with stereographic images γ_k
//! reduces to the Vandermonde system Σ_k β_k γ_k^j = c_j / √C(N,j), with
//! α'_k = β_k (1 + |γ_k|²)^{N/2}. When some γ_k is large or infinite the
//! problem is first rotated so that the emptiest region of the sphere sits at
//! the south pole.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result, Warning};
use crate::husimi::{closest_sc_with, SearchOptions};
use crate::poly;
use crate::sphere::{fibonacci_sphere, Direction, Rotation, StereoPoint};
use crate::spin::{binomial, Spin, SpinState};
use crate::stellar::{constellation_with, product_vector, rotate_state};
use crate::tolerance::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest |γ| accepted in the working frame without rotating.
const MAX_WORKING_GAMMA: f64 = 2.0;
/// Largest N for which the analytic Vandermonde inverse is used.
const MAX_ANALYTIC_N: usize = 8;

/// The SC state |n⟩ = (cos θ/2 |↑⟩ + e^{iφ} sin θ/2 |↓⟩)^{⊗N}.
pub fn sc_state(n: &Direction, spin: Spin) -> SpinState {
    let big_n = spin.twice();
    let [x, y] = n.spinor();
    let coeffs = (0..=big_n)
        .map(|k| x.powu((big_n - k) as u32) * y.powu(k as u32) * binomial(big_n, k).sqrt())
        .collect();
    SpinState::normalized(spin, coeffs).expect("spinor powers are nonzero")
}

/// Inverse of the Vandermonde matrix V_{jk} = γ_k^j: row i holds the
/// coefficients of P_i(ζ)/P_i(γ_i), P_i(ζ) = Π_{k≠i} (ζ − γ_k).
pub fn vandermonde_inverse(gammas: &[Complex64]) -> Result<DMatrix<Complex64>> {
    vandermonde_inverse_with(gammas, &Tolerances::default())
}

pub fn vandermonde_inverse_with(
    gammas: &[Complex64],
    tol: &Tolerances,
) -> Result<DMatrix<Complex64>> {
    let m = gammas.len();
    for i in 0..m {
        for j in i + 1..m {
            let d = StereoPoint::Finite(gammas[i]).chordal(&StereoPoint::Finite(gammas[j]));
            if d < tol.cluster {
                return Err(Error::DegenerateBasis(i, j));
            }
        }
    }
    let mut inv = DMatrix::zeros(m, m);
    for i in 0..m {
        let others: Vec<Complex64> = (0..m).filter(|&k| k != i).map(|k| gammas[k]).collect();
        let p = poly::from_roots(&others);
        let denom = poly::eval(&p, gammas[i]);
        for (j, pj) in p.iter().enumerate() {
            inv[(i, j)] = pj / denom;
        }
    }
    Ok(inv)
}

/// N+1 distinct SC directions with cached solver data.
#[derive(Debug, Clone)]
pub struct SCBasis {
    spin: Spin,
    directions: Vec<Direction>,
    states: Vec<SpinState>,
    /// Rotation applied before solving.
    frame: Rotation,
    /// ⟨R c_k | D(R) | c_k⟩.
    frame_phases: Vec<Complex64>,
    /// Stereographic images of the rotated directions (all finite).
    frame_gammas: Vec<Complex64>,
    /// Analytic inverse of the working-frame Vandermonde matrix (N ≤ 8).
    vinv: Option<DMatrix<Complex64>>,
    /// LU factors of the SC-state matrix (N > 8).
    lu: Option<nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>>,
    condition: f64,
}

impl SCBasis {
    pub fn new(spin: Spin, directions: Vec<Direction>) -> Result<Self> {
        Self::new_with(spin, directions, &Tolerances::default())
    }

    pub fn new_with(spin: Spin, directions: Vec<Direction>, tol: &Tolerances) -> Result<Self> {
        let n = spin.twice();
        if directions.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                n,
                got: directions.len(),
            });
        }
        for i in 0..=n {
            for j in i + 1..=n {
                if directions[i].chordal(&directions[j]) < tol.cluster {
                    return Err(Error::DegenerateBasis(i, j));
                }
            }
        }
        let states: Vec<SpinState> = directions.iter().map(|d| sc_state(d, spin)).collect();
        let matrix = DMatrix::from_fn(n + 1, n + 1, |j, k| states[k].coeffs()[j]);
        let condition = condition_number(&matrix);

        let gammas: Vec<StereoPoint> = directions.iter().map(|d| d.to_stereo()).collect();
        let needs_rotation = gammas
            .iter()
            .any(|g| g.as_finite().is_none_or(|z| z.norm() > MAX_WORKING_GAMMA));
        let frame = if needs_rotation {
            emptiest_to_south(&directions)
        } else {
            Rotation::identity()
        };
        let rotated: Vec<Direction> = directions.iter().map(|d| frame.apply_direction(d)).collect();
        let frame_gammas: Vec<Complex64> = rotated
            .iter()
            .map(|d| {
                d.to_stereo()
                    .as_finite()
                    .ok_or_else(|| Error::Numerical("basis direction at the working pole".into()))
            })
            .collect::<Result<_>>()?;
        let frame_phases: Vec<Complex64> = if needs_rotation {
            states
                .iter()
                .zip(&rotated)
                .map(|(s, d)| sc_state(d, spin).inner(&rotate_state(s, &frame)))
                .map(|z| z / z.norm())
                .collect()
        } else {
            vec![ONE; n + 1]
        };

        let (vinv, lu) = if n <= MAX_ANALYTIC_N {
            (Some(vandermonde_inverse_with(&frame_gammas, tol)?), None)
        } else {
            (None, Some(matrix.lu()))
        };
        Ok(SCBasis {
            spin,
            directions,
            states,
            frame,
            frame_phases,
            frame_gammas,
            vinv,
            lu,
            condition,
        })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn gammas(&self) -> Vec<StereoPoint> {
        self.directions.iter().map(|d| d.to_stereo()).collect()
    }

    /// The normalized SC states |c_k⟩ (phase: cos θ/2 component real ≥ 0).
    pub fn states(&self) -> &[SpinState] {
        &self.states
    }

    /// Rotation applied before solving (identity when all γ are moderate).
    pub fn frame(&self) -> Rotation {
        self.frame
    }

    pub fn frame_gammas(&self) -> &[Complex64] {
        &self.frame_gammas
    }

    /// Cached inverse of the working-frame Vandermonde matrix, when N ≤ 8.
    pub fn vinv(&self) -> Option<&DMatrix<Complex64>> {
        self.vinv.as_ref()
    }

    /// 2-norm condition number of the matrix whose columns are the |c_k⟩.
    pub fn condition(&self) -> f64 {
        self.condition
    }
}

/// Rotation taking the direction farthest from every basis direction to the
/// south pole.
fn emptiest_to_south(directions: &[Direction]) -> Rotation {
    let candidates = fibonacci_sphere(2000, 0.0);
    let best = candidates
        .iter()
        .max_by(|a, b| {
            let da = directions.iter().map(|d| d.angle_to(a)).fold(f64::INFINITY, f64::min);
            let db = directions.iter().map(|d| d.angle_to(b)).fold(f64::INFINITY, f64::min);
            da.total_cmp(&db)
        })
        .expect("non-empty lattice");
    Rotation::about_y(std::f64::consts::PI).compose(&Rotation::north_to(best).inverse())
}

fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Coefficients of a state in an SC basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficients {
    /// α'^k with |Ψ⟩ = Σ α'^k |c_k⟩.
    pub alphas: Vec<Complex64>,
    /// α^k = α'^k / λ, where |Ψ⟩ = λ |n_1, …, n_N⟩ and |n_1, …, n_N⟩ is the
    /// symmetrized product of the star spinors (so |λ| = A_Ψ). These are the
    /// coefficients multiplying Π (ζ − γ_k)^N / (1+|γ_k|²)^{N/2} in the
    /// normalized Majorana polynomial.
    pub majorana_alphas: Vec<Complex64>,
    /// α̃^k = α^k Π_m (1+|ζ_m|²)^{1/2} / (1+|γ_k|²)^{N/2}, the Vandermonde
    /// unknowns; `None` when a star or a basis direction is at ∞.
    pub tilde_alphas: Option<Vec<Complex64>>,
    /// ‖Σ α'^k |c_k⟩ − |Ψ⟩‖.
    pub residual: f64,
    pub condition: f64,
    pub warnings: Vec<Warning>,
}

pub fn expand_in_sc_basis(state: &SpinState, basis: &SCBasis) -> Result<ExpansionCoefficients> {
    expand_in_sc_basis_with(state, basis, &Tolerances::default())
}

pub fn expand_in_sc_basis_with(
    state: &SpinState,
    basis: &SCBasis,
    tol: &Tolerances,
) -> Result<ExpansionCoefficients> {
    if state.n() != basis.spin.twice() {
        return Err(Error::SpinMismatch(state.n(), basis.spin.twice()));
    }
    let n = state.n();
    let alphas: Vec<Complex64> = if let Some(vinv) = &basis.vinv {
        let work = rotate_state(state, &basis.frame);
        let d = DVector::from_iterator(
            n + 1,
            work.coeffs()
                .iter()
                .enumerate()
                .map(|(j, c)| c / binomial(n, j).sqrt()),
        );
        let beta = vinv * d;
        (0..=n)
            .map(|k| {
                let scale = (1.0 + basis.frame_gammas[k].norm_sqr()).powf(n as f64 / 2.0);
                beta[k] * scale * basis.frame_phases[k].conj()
            })
            .collect()
    } else {
        let lu = basis.lu.as_ref().expect("dense factors present when vinv is absent");
        let rhs = DVector::from_column_slice(state.coeffs());
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular SC-state matrix".into()))?;
        sol.iter().copied().collect()
    };

    let mut recon = vec![ZERO; n + 1];
    for (a, s) in alphas.iter().zip(&basis.states) {
        for (r, c) in recon.iter_mut().zip(s.coeffs()) {
            *r += a * c;
        }
    }
    let residual = recon
        .iter()
        .zip(state.coeffs())
        .map(|(r, c)| (r - c).norm_sqr())
        .sum::<f64>()
        .sqrt();

    let cons = constellation_with(state, tol)?;
    let star_points = cons.points();
    let product = product_vector(&star_points);
    let lambda = crate::spin::inner(&product, state.coeffs()) / crate::spin::norm_sqr(&product);
    let majorana_alphas: Vec<Complex64> = alphas.iter().map(|a| a / lambda).collect();

    let gammas = basis.gammas();
    let all_finite = star_points.iter().all(|p| !p.is_infinite()) && gammas.iter().all(|g| !g.is_infinite());
    let tilde_alphas = all_finite.then(|| {
        let star_factor: f64 = star_points
            .iter()
            .map(|p| (1.0 + p.as_finite().unwrap().norm_sqr()).sqrt())
            .product();
        majorana_alphas
            .iter()
            .zip(&gammas)
            .map(|(a, g)| {
                let gk = g.as_finite().unwrap();
                a * star_factor / (1.0 + gk.norm_sqr()).powf(n as f64 / 2.0)
            })
            .collect()
    });

    let mut warnings = Vec::new();
    if basis.condition > tol.ill_conditioned {
        warnings.push(Warning::IllConditioned(basis.condition));
    }
    Ok(ExpansionCoefficients {
        alphas,
        majorana_alphas,
        tilde_alphas,
        residual,
        condition: basis.condition,
        warnings,
    })
}

/// The dual basis |c^i⟩ with ⟨c^j|c_i⟩ = δ^j_i.
#[derive(Debug, Clone)]
pub struct DualBasis {
    /// Unnormalized coefficient vectors of |c^i⟩.
    pub states: Vec<Vec<Complex64>>,
}

impl DualBasis {
    /// ⟨c^i|Ψ⟩ for every i: the expansion coefficients α'^i.
    pub fn coefficients(&self, state: &SpinState) -> Vec<Complex64> {
        self.states
            .iter()
            .map(|d| crate::spin::inner(d, state.coeffs()))
            .collect()
    }
}

/// |c^i⟩ = |−c_0, …, (omit −c_i), …, −c_N⟩ / ⟨c_i| same ⟩.
pub fn dual_basis(basis: &SCBasis) -> DualBasis {
    let antipodes: Vec<StereoPoint> = basis
        .directions
        .iter()
        .map(|d| d.antipode().to_stereo())
        .collect();
    let states = (0..antipodes.len())
        .map(|i| {
            let others: Vec<StereoPoint> = antipodes
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, p)| *p)
                .collect();
            let w = product_vector(&others);
            let denom = crate::spin::inner(basis.states[i].coeffs(), &w);
            w.into_iter().map(|x| x / denom).collect()
        })
        .collect();
    DualBasis { states }
}

/// The adapted SC basis of a state with N distinct stars.
#[derive(Debug, Clone)]
pub struct AdaptedBasis {
    /// c_0 is the SC state closest to the antipodal state; c_1 … c_N are the stars.
    pub basis: SCBasis,
    pub coefficients: ExpansionCoefficients,
    /// Directions tied for c_0 (length > 1 only when the choice was not unique).
    pub ties: Vec<Direction>,
    pub warnings: Vec<Warning>,
}

pub fn adapted_basis(state: &SpinState) -> Result<AdaptedBasis> {
    adapted_basis_with(state, &SearchOptions::default())
}

pub fn adapted_basis_with(state: &SpinState, opts: &SearchOptions) -> Result<AdaptedBasis> {
    let tol = &opts.tolerances;
    let cons = constellation_with(state, tol)?;
    if let Some(star) = cons.stars().iter().position(|s| s.multiplicity > 1) {
        return Err(Error::DegenerateConstellation(star, star));
    }
    let stars: Vec<Direction> = cons.stars().iter().map(|s| s.direction()).collect();
    for i in 0..stars.len() {
        for j in i + 1..stars.len() {
            if stars[i].chordal(&stars[j]) < tol.cluster {
                return Err(Error::DegenerateConstellation(i, j));
            }
        }
    }
    let antipodal = time_reversal(state);
    let closest = closest_sc_with(&antipodal, opts)?;
    let mut directions = vec![closest.direction];
    directions.extend(stars);
    let basis = SCBasis::new_with(state.spin(), directions, tol)?;
    let coefficients = expand_in_sc_basis_with(state, &basis, tol)?;
    let mut warnings = closest.warnings.clone();
    warnings.extend(coefficients.warnings.iter().cloned());
    Ok(AdaptedBasis {
        basis,
        coefficients,
        ties: closest.ties,
        warnings,
    })
}

/// Antiunitary time reversal, the N-th tensor power of −iσ_y K:
/// c'_{N−k} = (−1)^k c̄_k. Maps each star to its antipode.
pub fn time_reversal(state: &SpinState) -> SpinState {
    let n = state.n();
    let mut out = vec![ZERO; n + 1];
    for (k, c) in state.coeffs().iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out[n - k] = c.conj() * sign;
    }
    SpinState::normalized(state.spin(), out).expect("norm preserved")
}

//! Seeded invariant sweeps with a pass/fail report.
//!
//! Every check draws its trials from an RNG derived from (seed, check, trial),
//! so results do not depend on the execution mode or on which other checks run.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fs::{bargmann_phase, exp_map, fs_distance, log_map, tangent_angle};
use crate::husimi::{critical_points, husimi};
use crate::par::{map_range, Execution};
use crate::sc_basis::{dual_basis, expand_in_sc_basis, sc_state, time_reversal, SCBasis};
use crate::sphere::{Direction, Rotation, StereoPoint};
use crate::spin::{Spin, SpinState};
use crate::stellar::{constellation, rotate_state, state_from_constellation, Constellation};
use crate::superposition::{
    collinearity_residual, scan_line_for_sc, spin32_decompose, superpose, trajectory_root, trajectory_state,
    two_sc_trajectory,
};
use crate::tolerance::Tolerances;

/// One measured quantity of a check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub label: &'static str,
    /// Worst value over all trials.
    pub worst: f64,
    pub limit: f64,
    /// `true` when `worst ≥ limit` is required instead of `worst ≤ limit`.
    pub at_least: bool,
}

impl Metric {
    fn at_most(label: &'static str, worst: f64, limit: f64) -> Self {
        Metric {
            label,
            worst,
            limit,
            at_least: false,
        }
    }

    fn at_least(label: &'static str, worst: f64, limit: f64) -> Self {
        Metric {
            label,
            worst,
            limit,
            at_least: true,
        }
    }

    pub fn passed(&self) -> bool {
        if self.at_least {
            self.worst >= self.limit
        } else {
            self.worst <= self.limit
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub trials: usize,
    pub metrics: Vec<Metric>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.metrics.iter().all(Metric::passed)
    }

    /// `PASS name (trials): label=worst (≤ limit), …`
    pub fn line(&self) -> String {
        let mut s = format!(
            "{} {} ({} trials):",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.trials
        );
        for m in &self.metrics {
            let op = if m.at_least { "≥" } else { "≤" };
            let _ = write!(s, " {}={:.3e} ({op} {:.1e})", m.label, m.worst, m.limit);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn table(&self) -> String {
        let mut s = format!("verify seed={}\n", self.seed);
        for c in &self.checks {
            s.push_str(&c.line());
            s.push('\n');
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), failed);
        s
    }
}

fn trial_rng(seed: u64, salt: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ trial as u64);
    rng
}

fn spin(n: usize) -> Spin {
    Spin::from_twice(n).expect("positive")
}

fn random_direction(rng: &mut impl Rng) -> Direction {
    Direction::new(rng.random_range(-1.0f64..1.0).acos(), rng.random_range(0.0..2.0 * PI))
}

fn random_complex(rng: &mut impl Rng, r: f64) -> Complex64 {
    Complex64::new(rng.random_range(-r..r), rng.random_range(-r..r))
}

/// Larger of two values; NaN wins so that a broken trial cannot hide.
fn worse(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn fold_max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, worse)
}

/// Maximum over trials of each component of the per-trial vectors.
fn column_max<const K: usize>(rows: &[[f64; K]]) -> [f64; K] {
    let mut out = [0.0f64; K];
    for r in rows {
        for (o, v) in out.iter_mut().zip(r) {
            *o = worse(*o, *v);
        }
    }
    out
}

/// state → constellation → state fidelity for each 2s in `twice`.
pub fn round_trip(seed: u64, twice: &[usize], trials: usize, exec: Execution) -> Check {
    let total = twice.len() * trials;
    let worst = fold_max(map_range(exec, total, |i| {
        let n = twice[i / trials];
        let mut rng = trial_rng(seed, 1, i);
        let st = SpinState::random(spin(n), &mut rng);
        constellation(&st)
            .and_then(|c| state_from_constellation(&c))
            .map_or(f64::INFINITY, |back| 1.0 - back.overlap(&st))
    }));
    Check {
        name: "round_trip",
        trials: total,
        metrics: vec![Metric::at_most("infidelity", worst, 1e-10)],
    }
}

/// The constellation of a rotated state is the rotated constellation.
pub fn rotation_equivariance(seed: u64, trials: usize, exec: Execution) -> Check {
    let worst = fold_max(map_range(exec, trials, |i| {
        let mut rng = trial_rng(seed, 2, i);
        let n = rng.random_range(1..=8);
        let st = SpinState::random(spin(n), &mut rng);
        let r = Rotation::random(&mut rng);
        match (constellation(&st), constellation(&rotate_state(&st, &r))) {
            (Ok(a), Ok(b)) => a.rotated(&r).distance(&b),
            _ => f64::INFINITY,
        }
    }));
    Check {
        name: "rotation_equivariance",
        trials,
        metrics: vec![Metric::at_most("distance", worst, 1e-8)],
    }
}

/// H vanishes at star antipodes and the critical set has Morse count 2.
pub fn husimi_topology(seed: u64, trials: usize, exec: Execution) -> Check {
    let rows = map_range(exec, trials, |i| {
        let mut rng = trial_rng(seed, 3, i);
        let n = rng.random_range(1..=6);
        let st = SpinState::random(spin(n), &mut rng);
        let zero = constellation(&st).map_or(f64::INFINITY, |c| {
            fold_max(c.stars().iter().map(|s| husimi(&st, &s.direction().antipode())))
        });
        let morse = critical_points(&st).map_or(1.0, |set| if set.morse_count() == 2 { 0.0 } else { 1.0 });
        [zero, morse]
    });
    let [zero, morse] = column_max(&rows);
    Check {
        name: "husimi_topology",
        trials,
        metrics: vec![
            Metric::at_most("h_at_antipodes", zero, 1e-14),
            Metric::at_most("morse_failures", morse, 0.0),
        ],
    }
}

/// Expansion in random SC bases reconstructs the state.
pub fn sc_expansion(seed: u64, trials: usize, exec: Execution) -> Check {
    let worst = fold_max(map_range(exec, trials, |i| {
        let mut rng = trial_rng(seed, 4, i);
        let n = rng.random_range(1..=10);
        let dirs = (0..=n).map(|_| random_direction(&mut rng)).collect();
        let st = SpinState::random(spin(n), &mut rng);
        SCBasis::new(spin(n), dirs)
            .and_then(|b| expand_in_sc_basis(&st, &b))
            .map_or(f64::INFINITY, |e| e.residual / fold_max(e.alphas.iter().map(|a| a.norm())).max(1.0))
    }));
    Check {
        name: "sc_expansion",
        trials,
        metrics: vec![Metric::at_most("relative_residual", worst, 1e-9)],
    }
}

/// Biorthogonality and completeness of dual bases, and agreement of the
/// dual-basis coefficients with the Vandermonde route, for 2s ≤ `max_twice`.
pub fn duality(seed: u64, max_twice: usize, trials: usize, exec: Execution) -> Check {
    let total = max_twice * trials;
    let rows = map_range(exec, total, |i| {
        let n = 1 + i / trials;
        let mut rng = trial_rng(seed, 5, i);
        let dirs = (0..=n).map(|_| random_direction(&mut rng)).collect();
        let Ok(basis) = SCBasis::new(spin(n), dirs) else {
            return [f64::INFINITY; 3];
        };
        let dual = dual_basis(&basis);
        let d = n + 1;
        let mut bi: f64 = 0.0;
        let mut resolution = DMatrix::<Complex64>::zeros(d, d);
        for (j, up) in dual.states.iter().enumerate() {
            let up = DVector::from_column_slice(up);
            for (k, low) in basis.states().iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                let low = DVector::from_column_slice(low.coeffs());
                bi = bi.max((up.dotc(&low) - want).norm());
            }
            resolution += DVector::from_column_slice(basis.states()[j].coeffs()) * up.adjoint();
        }
        let res = (resolution - DMatrix::identity(d, d)).camax();
        let st = SpinState::random(spin(n), &mut rng);
        let route = expand_in_sc_basis(&st, &basis).map_or(f64::INFINITY, |e| {
            let scale = fold_max(e.alphas.iter().map(|a| a.norm())).max(1.0);
            fold_max(dual.coefficients(&st).iter().zip(&e.alphas).map(|(a, b)| (a - b).norm())) / scale
        });
        [bi, res, route]
    });
    let [bi, res, route] = column_max(&rows);
    Check {
        name: "duality",
        trials: total,
        metrics: vec![
            Metric::at_most("biorthogonality", bi, 1e-9),
            Metric::at_most("resolution", res, 1e-9),
            Metric::at_most("route_agreement", route, 1e-8),
        ],
    }
}

/// ⟨Ψ|TΨ⟩ = 0 for half-integer spin, T² = (−1)^N, and T maps stars to antipodes.
pub fn time_reversal_check(seed: u64, twice: &[usize], trials: usize, exec: Execution) -> Check {
    let total = twice.len() * trials;
    let rows = map_range(exec, total, |i| {
        let n = twice[i / trials];
        let mut rng = trial_rng(seed, 6, i);
        let st = SpinState::random(spin(n), &mut rng);
        let t = time_reversal(&st);
        let expect = if n % 2 == 1 { st.inner(&t).norm() } else { 0.0 };
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let tt = time_reversal(&t);
        let square = fold_max(tt.coeffs().iter().zip(st.coeffs()).map(|(a, b)| (a - b * sign).norm()));
        let anti = match (constellation(&st), constellation(&t)) {
            (Ok(a), Ok(b)) => a.antipodal().distance(&b),
            _ => f64::INFINITY,
        };
        [expect, square, anti]
    });
    let [expect, square, anti] = column_max(&rows);
    Check {
        name: "time_reversal",
        trials: total,
        metrics: vec![
            Metric::at_most("expectation", expect, 1e-12),
            Metric::at_most("square_sign", square, 1e-8),
            Metric::at_most("antipodes", anti, 1e-8),
        ],
    }
}

/// exp ∘ log recovers the target, ‖log‖ = ω and Tr(v ρ) = 0.
pub fn log_exp(seed: u64, trials: usize, exec: Execution) -> Check {
    let rows = map_range(exec, trials, |i| {
        let mut rng = trial_rng(seed, 7, i);
        let n = rng.random_range(1..=6);
        let p = SpinState::random(spin(n), &mut rng);
        let q = SpinState::random(spin(n), &mut rng);
        match log_map(&p, &q) {
            Ok(v) => [
                1.0 - exp_map(&p, &v).overlap(&q),
                (v.norm() - fs_distance(&p, &q)).abs(),
                v.trace_against(&p).abs(),
            ],
            Err(_) => [f64::INFINITY; 3],
        }
    });
    let [rec, norm, trace] = column_max(&rows);
    Check {
        name: "log_exp",
        trials,
        metrics: vec![
            Metric::at_most("infidelity", rec, 1e-10),
            Metric::at_most("norm_vs_distance", norm, 1e-10),
            Metric::at_most("trace", trace, 1e-10),
        ],
    }
}

/// The Bargmann-phase angle formula against the inner product of normalized
/// log vectors, and against the spherical cosine rule when Ω = 0.
pub fn angle_formula(seed: u64, trials: usize, exec: Execution) -> Check {
    let rows = map_range(exec, trials, |i| {
        let mut rng = trial_rng(seed, 8, i);
        let n = rng.random_range(1..=5);
        let p = SpinState::random(spin(n), &mut rng);
        let a = SpinState::random(spin(n), &mut rng);
        let b = SpinState::random(spin(n), &mut rng);
        let generic = match (log_map(&p, &a), log_map(&p, &b), tangent_angle(&p, &a, &b)) {
            (Ok(va), Ok(vb), Ok(ang)) => {
                let direct = (va.inner(&vb) / (va.norm() * vb.norm())).clamp(-1.0, 1.0).acos();
                (ang - direct).abs()
            }
            _ => f64::INFINITY,
        };
        // Real vectors with positive overlaps: Ω = 0.
        let real = |rng: &mut ChaCha8Rng| {
            let v: Vec<Complex64> = (0..=n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect();
            SpinState::normalized(spin(n), v).expect("nonzero")
        };
        let rp = real(&mut rng);
        let mut ra = real(&mut rng);
        let mut rb = real(&mut rng);
        if rp.inner(&ra).re < 0.0 {
            ra = ra.rephased(Complex64::new(-1.0, 0.0));
        }
        if rp.inner(&rb).re < 0.0 {
            rb = rb.rephased(Complex64::new(-1.0, 0.0));
        }
        let mut counted = 0.0;
        let real_err = match (bargmann_phase(&ra, &rb, &rp), tangent_angle(&rp, &ra, &rb)) {
            (Ok(omega), Ok(ang)) if omega.abs() < 1e-12 => {
                let (wa, wb, wab) = (fs_distance(&rp, &ra), fs_distance(&rp, &rb), fs_distance(&ra, &rb));
                // Compared as cosines: acos loses half the digits near 0 and π.
                let rule = (wab.cos() - wa.cos() * wb.cos()) / (wa.sin() * wb.sin());
                counted = 1.0;
                (ang.cos() - rule).abs()
            }
            _ => 0.0,
        };
        [generic, real_err, counted]
    });
    let [generic, real, _] = column_max(&rows);
    let real_cases: f64 = rows.iter().map(|r| r[2]).sum();
    Check {
        name: "angle_formula",
        trials,
        metrics: vec![
            Metric::at_most("vs_log_vectors", generic, 1e-9),
            Metric::at_most("vs_cosine_rule", real, 1e-9),
            Metric::at_least("real_triangles", real_cases, 1.0),
        ],
    }
}

/// Two-SC trajectories: Möbius images on lines, tangent spacing 2π/N at γ₁,
/// closed-form roots equal to the roots of the combined polynomial.
pub fn trajectories(seed: u64, max_twice: usize, trials: usize, exec: Execution) -> Check {
    let rows = map_range(exec, trials, |i| {
        let mut rng = trial_rng(seed, 9, i);
        let n = rng.random_range(2..=max_twice.max(2));
        let g1 = random_complex(&mut rng, 2.0);
        let g2 = random_complex(&mut rng, 2.0);
        let omega = rng.random_range(0.0..2.0 * PI);
        let ts: Vec<f64> = (0..=50).map(|k| PI * k as f64 / 50.0).collect();
        let Ok(tr) = two_sc_trajectory(StereoPoint::Finite(g1), StereoPoint::Finite(g2), omega, spin(n), &ts) else {
            return [f64::INFINITY; 3];
        };
        let line = collinearity_residual(&tr);

        // Tangent directions at γ₁ from the roots themselves (Richardson step).
        let h = 1e-5;
        let mut angles: Vec<f64> = (0..n)
            .map(|k| {
                let at = |t: f64| (trajectory_root(g1, g2, omega, n, k, t).as_finite().unwrap_or(g1) - g1) / t;
                (at(h) * 2.0 - at(2.0 * h)).arg().rem_euclid(2.0 * PI)
            })
            .collect();
        angles.sort_by(f64::total_cmp);
        let step = 2.0 * PI / n as f64;
        let spacing = fold_max((0..n).map(|k| {
            let next = if k + 1 < n { angles[k + 1] } else { angles[0] + 2.0 * PI };
            (next - angles[k] - step).abs()
        }));

        // The polynomial has an N-fold root at t ∈ {0, π/2, π}; sample where the
        // roots are well separated so double precision resolves them.
        let t = rng.random_range(0.2..FRAC_PI_2 - 0.2) + if rng.random_bool(0.5) { FRAC_PI_2 } else { 0.0 };
        let closed: Vec<StereoPoint> = (0..n).map(|k| trajectory_root(g1, g2, omega, n, k, t)).collect();
        let roots = match (
            Constellation::from_points(&closed),
            trajectory_state(g1, g2, omega, n, t).and_then(|s| constellation(&s)),
        ) {
            (Ok(a), Ok(b)) => a.distance(&b),
            _ => f64::INFINITY,
        };
        [line, spacing, roots]
    });
    let [line, spacing, roots] = column_max(&rows);
    Check {
        name: "trajectories",
        trials,
        metrics: vec![
            Metric::at_most("collinearity", line, 1e-10),
            Metric::at_most("tangent_spacing", spacing, 1e-8),
            Metric::at_most("roots_vs_polynomial", roots, 1e-9),
        ],
    }
}

/// Every three-star constellation is a combination of two SC states.
pub fn spin32_decomposition(seed: u64, trials: usize, exec: Execution) -> Check {
    let worst = fold_max(map_range(exec, trials, |i| {
        let mut rng = trial_rng(seed, 10, i);
        let zs = [0, 1, 2].map(|_| random_direction(&mut rng).to_stereo());
        let Ok(psi) = Constellation::from_points(&zs).and_then(|c| state_from_constellation(&c)) else {
            return f64::INFINITY;
        };
        match spin32_decompose(zs) {
            Ok(d) => match d.state_weights {
                Some([w1, w2]) => {
                    let s1 = sc_state(&d.gamma1.to_direction(), spin(3));
                    let s2 = sc_state(&d.gamma2.to_direction(), spin(3));
                    s1.coeffs()
                        .iter()
                        .zip(s2.coeffs())
                        .zip(psi.coeffs())
                        .map(|((a, b), c)| (w1 * a + w2 * b - c).norm_sqr())
                        .sum::<f64>()
                        .sqrt()
                }
                None => 0.0,
            },
            Err(_) => f64::INFINITY,
        }
    }));
    Check {
        name: "spin32_decomposition",
        trials,
        metrics: vec![Metric::at_most("reconstruction", worst, 1e-9)],
    }
}

/// A random state with `n` stars: `shared` first, the rest at up to
/// `distinct` random directions with random multiplicities.
fn clustered_state(n: usize, distinct: usize, shared: &[(Direction, usize)], rng: &mut ChaCha8Rng) -> SpinState {
    let mut dirs = shared.to_vec();
    let left = n - shared.iter().map(|s| s.1).sum::<usize>();
    if left > 0 {
        let k = distinct.clamp(1, left);
        let mut mult = vec![1usize; k];
        for _ in 0..left - k {
            mult[rng.random_range(0..k)] += 1;
        }
        dirs.extend(mult.into_iter().map(|m| (random_direction(rng), m)));
    }
    state_from_constellation(&Constellation::from_directions(&dirs).expect("non-empty")).expect("valid constellation")
}

/// Distinct-star count of a·Ψ₁ + b·Ψ₂ never falls below the Mason bound.
/// Half of the trials force common stars. Reports the violation count and the
/// smallest observed slack (distinct − bound).
pub fn mason(seed: u64, max_twice: usize, trials: usize, exec: Execution) -> Check {
    let rows = map_range(exec, trials, |i| {
        let mut rng = trial_rng(seed, 11, i);
        let n = rng.random_range(1..=max_twice);
        let mut shared = Vec::new();
        if i % 2 == 1 && n > 1 {
            let k = rng.random_range(1..n);
            let m = rng.random_range(1..=k);
            let mut used = 0;
            while used < k {
                let take = m.min(k - used);
                shared.push((random_direction(&mut rng), take));
                used += take;
            }
        }
        let d1 = rng.random_range(1..=n);
        let d2 = rng.random_range(1..=n);
        let a = clustered_state(n, d1, &shared, &mut rng);
        let b = clustered_state(n, d2, &shared, &mut rng);
        let alpha = random_complex(&mut rng, 1.0);
        let beta = random_complex(&mut rng, 1.0);
        match superpose(alpha, &a, beta, &b) {
            Ok(out) => {
                let slack = out.distinct as i64 - out.mason_bound;
                [if slack < 0 { 1.0 } else { 0.0 }, -(slack as f64)]
            }
            Err(_) => [0.0, f64::NEG_INFINITY],
        }
    });
    let violations: f64 = rows.iter().map(|r| r[0]).sum();
    let min_slack = -rows.iter().map(|r| r[1]).fold(f64::NEG_INFINITY, f64::max);
    Check {
        name: "mason_bound",
        trials,
        metrics: vec![
            Metric::at_most("violations", violations, 0.0),
            Metric::at_least("min_slack", min_slack, 0.0),
        ],
    }
}

/// Lines through two distinct SC states meet the SC sphere exactly at the two
/// endpoints. Reports the largest number of SC points found on a line and the
/// smallest (which must still be 2).
pub fn at_most_twice(seed: u64, twice: &[usize], trials: usize, samples: usize, exec: Execution) -> Check {
    let tol = Tolerances::default();
    let total = twice.len() * trials;
    let counts = map_range(exec, total, |i| {
        let n = twice[i / trials];
        let mut rng = trial_rng(seed, 12, i);
        let a = sc_state(&random_direction(&mut rng), spin(n));
        let b = sc_state(&random_direction(&mut rng), spin(n));
        scan_line_for_sc(&a, &b, samples, Execution::Sequential, &tol).map_or(usize::MAX, |s| s.sc_points.len())
    });
    let most = counts.iter().copied().max().unwrap_or(0);
    let least = counts.iter().copied().min().unwrap_or(0);
    Check {
        name: "at_most_twice",
        trials: total,
        metrics: vec![
            Metric::at_most("max_sc_points", most as f64, 2.0),
            Metric::at_least("min_sc_points", least as f64, 2.0),
        ],
    }
}

/// The full suite at desk-scale trial counts.
pub fn run(seed: u64, exec: Execution) -> Report {
    Report {
        seed,
        checks: vec![
            round_trip(seed, &[2, 3, 4, 6], 100, exec),
            rotation_equivariance(seed, 100, exec),
            husimi_topology(seed, 40, exec),
            sc_expansion(seed, 100, exec),
            duality(seed, 4, 25, exec),
            time_reversal_check(seed, &[3, 4, 5], 100, exec),
            log_exp(seed, 100, exec),
            angle_formula(seed, 200, exec),
            trajectories(seed, 6, 50, exec),
            spin32_decomposition(seed, 200, exec),
            mason(seed, 10, 500, exec),
            at_most_twice(seed, &[2, 3, 4], 20, 200, exec),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_deterministic_across_modes() {
        let a = round_trip(5, &[3], 10, Execution::Parallel);
        let b = round_trip(5, &[3], 10, Execution::Sequential);
        assert_eq!(a, b);
        assert!(a.passed());
    }

    #[test]
    fn metric_directions() {
        assert!(Metric::at_most("x", 1.0, 1.0).passed());
        assert!(!Metric::at_most("x", 1.1, 1.0).passed());
        assert!(Metric::at_least("x", 2.0, 2.0).passed());
        assert!(!Metric::at_least("x", 1.0, 2.0).passed());
        assert!(!Metric::at_most("x", f64::NAN, 1.0).passed());
    }
}

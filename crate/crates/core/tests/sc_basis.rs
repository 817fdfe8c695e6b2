mod common;

use std::f64::consts::PI;

use common::{as_vector, c, random_direction, spin, spin_matrices};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stellar_core::sc_basis::*;
use stellar_core::stellar::{constellation, state_from_constellation, Constellation};
use stellar_core::{Direction, SpinState, StereoPoint};

fn fin(z: Complex64) -> StereoPoint {
    StereoPoint::Finite(z)
}

fn state_with_roots(roots: &[Complex64]) -> SpinState {
    let pts: Vec<StereoPoint> = roots.iter().map(|&z| fin(z)).collect();
    state_from_constellation(&Constellation::from_points(&pts).unwrap()).unwrap()
}

fn basis_from_gammas(n: usize, gammas: &[Complex64]) -> SCBasis {
    let dirs = gammas.iter().map(|&g| fin(g).to_direction()).collect();
    SCBasis::new(spin(n), dirs).unwrap()
}

fn equatorial_pair(phi: f64) -> (SpinState, SCBasis) {
    let z1 = Complex64::from_polar(1.0, phi);
    let z2 = z1.conj();
    (state_with_roots(&[z1, z2]), basis_from_gammas(2, &[c(-1.0, 0.0), z1, z2]))
}

#[test]
fn spin_one_equatorial_pair_coefficients() {
    for phi in [PI / 6.0, PI / 4.0, PI / 3.0] {
        let (st, basis) = equatorial_pair(phi);
        let e = expand_in_sc_basis(&st, &basis).unwrap();
        let want = [
            c(1.0 - phi.cos(), 0.0),
            Complex64::from_polar(0.5, -phi),
            Complex64::from_polar(0.5, phi),
        ];
        let tilde = e.tilde_alphas.as_ref().unwrap();
        for k in 0..3 {
            assert!((e.majorana_alphas[k] - want[k]).norm() < 1e-10, "phi={phi} k={k}");
            assert!((tilde[k] - want[k]).norm() < 1e-10, "phi={phi} k={k}");
        }
        assert!(e.residual < 1e-12);
    }
}

#[test]
fn adapted_basis_of_equatorial_pair_starts_at_minus_x() {
    for phi in [PI / 6.0, PI / 4.0, PI / 3.0] {
        let (st, _) = equatorial_pair(phi);
        let ad = adapted_basis(&st).unwrap();
        let g0 = ad.basis.gammas()[0].as_finite().unwrap();
        assert!((g0 - c(-1.0, 0.0)).norm() < 1e-8, "phi={phi} g0={g0}");
        let a0 = ad.coefficients.majorana_alphas[0];
        assert!((a0 - c(1.0 - phi.cos(), 0.0)).norm() < 1e-8);
    }
}

/// α̃ for spin 3/2 in a general basis, written out term by term.
fn spin32_tilde(zeta: [Complex64; 3], gamma: [Complex64; 4]) -> [Complex64; 4] {
    let s = |i: usize, j: usize| zeta[i - 1] - gamma[j];
    let g = |i: usize, j: usize| gamma[i] - gamma[j];
    [
        (s(1, 1) * s(2, 2) * s(3, 3) + s(1, 2) * s(2, 3) * s(3, 1) + s(1, 3) * s(2, 1) * s(3, 2))
            / (3.0 * g(0, 1) * g(0, 2) * g(0, 3)),
        (s(1, 0) * s(2, 2) * s(3, 3) + s(1, 2) * s(2, 3) * s(3, 0) + s(1, 3) * s(2, 0) * s(3, 2))
            / (3.0 * g(1, 0) * g(1, 2) * g(1, 3)),
        (s(1, 0) * s(2, 1) * s(3, 3) + s(1, 1) * s(2, 3) * s(3, 0) + s(1, 3) * s(2, 0) * s(3, 1))
            / (3.0 * g(2, 0) * g(2, 1) * g(2, 3)),
        (s(1, 0) * s(2, 1) * s(3, 2) + s(1, 1) * s(2, 2) * s(3, 0) + s(1, 2) * s(2, 0) * s(3, 1))
            / (3.0 * g(3, 0) * g(3, 1) * g(3, 2)),
    ]
}

fn random_point(rng: &mut impl Rng) -> Complex64 {
    c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))
}

#[test]
fn spin_three_halves_general_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    for _ in 0..200 {
        let zeta = [random_point(&mut rng), random_point(&mut rng), random_point(&mut rng)];
        let gamma = [
            random_point(&mut rng),
            random_point(&mut rng),
            random_point(&mut rng),
            random_point(&mut rng),
        ];
        let st = state_with_roots(&zeta);
        let e = expand_in_sc_basis(&st, &basis_from_gammas(3, &gamma)).unwrap();
        let want = spin32_tilde(zeta, gamma);
        let got = e.tilde_alphas.unwrap();
        let scale = want.iter().map(|w| w.norm()).fold(1.0, f64::max);
        for k in 0..4 {
            assert!((got[k] - want[k]).norm() < 1e-9 * scale, "k={k}");
        }
    }
}

#[test]
fn spin_three_halves_adapted_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..100 {
        let zeta = [random_point(&mut rng), random_point(&mut rng), random_point(&mut rng)];
        let g0 = random_point(&mut rng);
        let st = state_with_roots(&zeta);
        let e = expand_in_sc_basis(&st, &basis_from_gammas(3, &[g0, zeta[0], zeta[1], zeta[2]])).unwrap();
        let t = e.tilde_alphas.unwrap();
        let [g1, g2, g3] = zeta;
        let want = [
            c(0.0, 0.0),
            -(g2 - g3).powi(2) / (3.0 * (g1 - g2) * (g1 - g3)),
            -(g3 - g1).powi(2) / (3.0 * (g2 - g1) * (g2 - g3)),
            -(g1 - g2).powi(2) / (3.0 * (g3 - g1) * (g3 - g2)),
        ];
        for k in 0..4 {
            assert!((t[k] - want[k]).norm() < 1e-8 * (1.0 + want[k].norm()), "k={k}");
        }
    }
}

#[test]
fn half_integer_adapted_coefficient_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    for n in [1, 3, 5, 7] {
        for _ in 0..3 {
            let st = SpinState::random(spin(n), &mut rng);
            let ad = adapted_basis(&st).unwrap();
            assert!(ad.coefficients.alphas[0].norm() < 1e-9, "n={n}");
            assert!(ad.coefficients.residual < 1e-9);
        }
    }
}

#[test]
fn vandermonde_inverse_matches_dense_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(204);
    for m in 2..=9 {
        let gammas: Vec<Complex64> = (0..m).map(|_| random_point(&mut rng)).collect();
        let v = DMatrix::from_fn(m, m, |j, k| gammas[k].powu(j as u32));
        let dense = v.clone().try_inverse().unwrap();
        let ours = vandermonde_inverse(&gammas).unwrap();
        let scale = dense.camax();
        assert!((&ours - &dense).camax() < 1e-9 * scale, "m={m}");
        let id = &ours * &v;
        assert!((id - DMatrix::identity(m, m)).camax() < 1e-9 * scale);
    }
}

#[test]
fn expansion_matches_dense_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(205);
    for n in 1..=12 {
        let dirs: Vec<Direction> = (0..=n).map(|_| random_direction(&mut rng)).collect();
        let basis = SCBasis::new(spin(n), dirs).unwrap();
        let st = SpinState::random(spin(n), &mut rng);
        let e = expand_in_sc_basis(&st, &basis).unwrap();
        let m = DMatrix::from_fn(n + 1, n + 1, |j, k| basis.states()[k].coeffs()[j]);
        let dense = m.lu().solve(&as_vector(&st)).unwrap();
        let scale = dense.camax().max(1.0);
        for k in 0..=n {
            assert!((e.alphas[k] - dense[k]).norm() < 1e-8 * scale, "n={n} k={k}");
        }
        assert!(e.residual < 1e-9 * scale);
    }
}

#[test]
fn sc_state_is_top_eigenvector_along_its_direction() {
    let mut rng = ChaCha8Rng::seed_from_u64(206);
    for n in 1..=8 {
        let [sx, sy, sz] = spin_matrices(n);
        for _ in 0..5 {
            let d = random_direction(&mut rng);
            let [x, y, z] = d.to_vector();
            let ns = &sx * c(x, 0.0) + &sy * c(y, 0.0) + &sz * c(z, 0.0);
            let v = as_vector(&sc_state(&d, spin(n)));
            let lhs = &ns * &v;
            let rhs = &v * c(n as f64 / 2.0, 0.0);
            assert!((lhs - rhs).norm() < 1e-12, "n={n}");
        }
    }
}

#[test]
fn sc_state_constellation_is_one_repeated_star() {
    let mut rng = ChaCha8Rng::seed_from_u64(207);
    for n in 1..=6 {
        let d = random_direction(&mut rng);
        let cons = constellation(&sc_state(&d, spin(n))).unwrap();
        let want = Constellation::from_directions(&[(d, n)]).unwrap();
        assert!(cons.distance(&want) < 1e-5, "n={n}");
    }
}

#[test]
fn dual_basis_is_biorthogonal_and_resolves_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(208);
    for n in 1..=7 {
        let dirs: Vec<Direction> = (0..=n).map(|_| random_direction(&mut rng)).collect();
        let basis = SCBasis::new(spin(n), dirs).unwrap();
        let dual = dual_basis(&basis);
        let d = n + 1;
        let mut resolution = DMatrix::<Complex64>::zeros(d, d);
        for (i, up) in dual.states.iter().enumerate() {
            let up = DVector::from_column_slice(up);
            for (j, low) in basis.states().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((up.dotc(&as_vector(low)) - c(want, 0.0)).norm() < 1e-9, "n={n}");
            }
            resolution += as_vector(&basis.states()[i]) * up.adjoint();
        }
        assert!((resolution - DMatrix::identity(d, d)).camax() < 1e-8, "n={n}");

        let st = SpinState::random(spin(n), &mut rng);
        let via_dual = dual.coefficients(&st);
        let e = expand_in_sc_basis(&st, &basis).unwrap();
        let scale = e.alphas.iter().map(|a| a.norm()).fold(1.0, f64::max);
        for (a, b) in via_dual.iter().zip(&e.alphas) {
            assert!((a - b).norm() < 1e-8 * scale);
        }
    }
}

#[test]
fn time_reversal_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(209);
    for n in 1..=7 {
        let st = SpinState::random(spin(n), &mut rng);
        let t = time_reversal(&st);
        if n % 2 == 1 {
            assert!(st.inner(&t).norm() < 1e-14, "n={n}");
        }
        let a = constellation(&st).unwrap();
        let b = constellation(&t).unwrap();
        assert!(a.antipodal().distance(&b) < 1e-8, "n={n}");
        // Antiunitarity: ⟨TΨ|TΦ⟩ = ⟨Φ|Ψ⟩.
        let other = SpinState::random(spin(n), &mut rng);
        let lhs = t.inner(&time_reversal(&other));
        assert!((lhs - other.inner(&st)).norm() < 1e-14);
    }
}

#[test]
fn antipodal_sc_states_are_orthogonal_to_stars() {
    let mut rng = ChaCha8Rng::seed_from_u64(210);
    for n in 2..=6 {
        let st = SpinState::random(spin(n), &mut rng);
        for star in constellation(&st).unwrap().stars() {
            let anti = sc_state(&star.direction().antipode(), spin(n));
            assert!(anti.inner(&st).norm() < 1e-9, "n={n}");
        }
    }
}

#[test]
fn basis_with_pole_and_infinite_star() {
    let mut rng = ChaCha8Rng::seed_from_u64(211);
    let n = 4;
    let mut dirs: Vec<Direction> = (0..n).map(|_| random_direction(&mut rng)).collect();
    dirs.push(Direction::south());
    let basis = SCBasis::new(spin(n), dirs).unwrap();
    let st = sc_state(&Direction::south(), spin(n));
    let e = expand_in_sc_basis(&st, &basis).unwrap();
    assert!((e.alphas[n] - c(1.0, 0.0)).norm() < 1e-9);
    assert!(e.alphas[..n].iter().all(|a| a.norm() < 1e-9));
    assert!(e.tilde_alphas.is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_reconstructs(seed in any::<u64>(), n in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dirs: Vec<Direction> = (0..=n).map(|_| random_direction(&mut rng)).collect();
        let basis = SCBasis::new(spin(n), dirs).unwrap();
        let st = SpinState::random(spin(n), &mut rng);
        let e = expand_in_sc_basis(&st, &basis).unwrap();
        let scale = e.alphas.iter().map(|a| a.norm()).fold(1.0, f64::max);
        prop_assert!(e.residual < 1e-9 * scale);
    }

    #[test]
    fn expansion_is_rotation_covariant(seed in any::<u64>(), n in 1usize..=6) {
        // Rotating both the state and the basis leaves α' unchanged up to the
        // phases ⟨R c_k|D(R)|c_k⟩.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dirs: Vec<Direction> = (0..=n).map(|_| random_direction(&mut rng)).collect();
        let r = stellar_core::Rotation::random(&mut rng);
        let st = SpinState::random(spin(n), &mut rng);
        let e1 = expand_in_sc_basis(&st, &SCBasis::new(spin(n), dirs.clone()).unwrap()).unwrap();
        let rdirs: Vec<Direction> = dirs.iter().map(|d| r.apply_direction(d)).collect();
        let rst = stellar_core::stellar::rotate_state(&st, &r);
        let e2 = expand_in_sc_basis(&rst, &SCBasis::new(spin(n), rdirs).unwrap()).unwrap();
        let scale = e1.alphas.iter().map(|a| a.norm()).fold(1.0, f64::max);
        for (a, b) in e1.alphas.iter().zip(&e2.alphas) {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-8 * scale);
        }
    }
}

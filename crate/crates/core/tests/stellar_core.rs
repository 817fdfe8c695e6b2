use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stellar_core::stellar::{
    coherent_overlap, coherent_overlap_by_rotation, constellation, majorana_polynomial,
    product_vector, rotate_state, state_from_constellation, symmetrized_norm, wigner_matrix,
    Constellation,
};
use stellar_core::{Direction, Rotation, Spin, SpinState, StereoPoint};

fn spin(n: usize) -> Spin {
    Spin::from_twice(n).unwrap()
}

fn random_direction(rng: &mut impl Rng) -> Direction {
    Direction::new(rng.random::<f64>().mul_add(2.0, -1.0).acos(), rng.random::<f64>() * TAU)
}

#[test]
fn round_trip_fidelity_for_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for n in 1..=8 {
        for _ in 0..125 {
            let st = SpinState::random(spin(n), &mut rng);
            let back = state_from_constellation(&constellation(&st).unwrap()).unwrap();
            let f = st.overlap(&back);
            assert!(f > 1.0 - 1e-12, "N = {n}: fidelity {f}");
        }
    }
}

#[test]
fn coherent_overlap_at_antipode_matches_polynomial() {
    // ⟨−n|Ψ⟩ = (cos(θ/2) e^{−iφ})^N p(ζ_n) on a grid avoiding the poles.
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for n in [1, 3, 4, 7] {
        let st = SpinState::random(spin(n), &mut rng);
        let p = majorana_polynomial(&st);
        for i in 0..32 {
            for j in 0..32 {
                let d = Direction::new(PI * (i as f64 + 0.5) / 32.0, TAU * j as f64 / 32.0);
                let zeta = d.to_stereo().as_finite().unwrap();
                let factor = Complex64::from_polar((d.theta / 2.0).cos(), -d.phi).powu(n as u32);
                let want = factor * p.eval(zeta);
                let got = coherent_overlap(&st, &d.antipode());
                assert!((got - want).norm() < 1e-10, "{got} vs {want}");
            }
        }
    }
}

#[test]
fn coherent_overlap_vanishes_at_star_antipodes() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for n in 1..=6 {
        let st = SpinState::random(spin(n), &mut rng);
        for s in constellation(&st).unwrap().stars() {
            let d = s.direction().antipode();
            assert!(coherent_overlap(&st, &d).norm() < 1e-10);
            assert!(coherent_overlap_by_rotation(&st, &d).norm() < 1e-10);
        }
    }
}

#[test]
fn rotation_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for n in 1..=8 {
        for _ in 0..20 {
            let st = SpinState::random(spin(n), &mut rng);
            let r = Rotation::random(&mut rng);
            let lhs = constellation(&rotate_state(&st, &r)).unwrap();
            let rhs = constellation(&st).unwrap().rotated(&r);
            assert!(lhs.distance(&rhs) < 1e-8);
        }
    }
}

#[test]
fn rotating_north_pole_about_y_gives_coherent_state() {
    for n in 1..=6 {
        let theta = 0.3 * n as f64;
        let st = rotate_state(&SpinState::basis(spin(n), 0), &Rotation::about_y(theta));
        let cons = constellation(&st).unwrap();
        assert_eq!(cons.distinct_count(), 1);
        let star = cons.stars()[0].direction();
        assert!(star.chordal(&Direction::new(theta, 0.0)) < 1e-8);
    }
}

#[test]
fn wigner_matrix_is_unitary_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let s = spin(5);
    let a = Rotation::random(&mut rng);
    let b = Rotation::random(&mut rng);
    let da = wigner_matrix(s, &a);
    let db = wigner_matrix(s, &b);
    let dab = wigner_matrix(s, &a.compose(&b));
    let eye = DMatrix::<Complex64>::identity(6, 6);
    assert!((da.adjoint() * &da - &eye).camax() < 1e-12);
    // SU(2) lifts compose exactly, so no sign ambiguity.
    assert!((da * db - dab).camax() < 1e-12);
}

#[test]
fn coincident_stars_suppress_lowest_projections() {
    // A star of multiplicity k along n kills the amplitudes m = −s … −s+k−1 along n.
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for n in 2..=4 {
        for k in 1..=n {
            let dir = random_direction(&mut rng);
            let mut stars = vec![(dir, k)];
            for _ in k..n {
                stars.push((random_direction(&mut rng), 1));
            }
            let st = state_from_constellation(&Constellation::from_directions(&stars).unwrap())
                .unwrap();
            let aligned = rotate_state(&st, &Rotation::north_to(&dir).inverse());
            for m in 0..k {
                let amp = aligned.coeffs()[n - m];
                assert!(amp.norm() < 1e-12, "N = {n}, k = {k}: {amp}");
            }
            let recovered = constellation(&st).unwrap();
            assert!(recovered.stars().iter().any(|s| s.multiplicity == k
                && s.direction().chordal(&dir) < 1e-6));
        }
    }
}

#[test]
fn symmetrized_norm_matches_explicit_tensor() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..20 {
        let pts: Vec<StereoPoint> = (0..3).map(|_| random_direction(&mut rng).to_stereo()).collect();
        let sp: Vec<[Complex64; 2]> = pts.iter().map(|p| p.spinor()).collect();
        // Σ_σ ψ_σ1 ⊗ ψ_σ2 ⊗ ψ_σ3 in the 8-dimensional product space.
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut v = [Complex64::new(0.0, 0.0); 8];
        for p in perms {
            for (idx, slot) in v.iter_mut().enumerate() {
                let bits = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
                *slot += sp[p[0]][bits[0]] * sp[p[1]][bits[1]] * sp[p[2]][bits[2]];
            }
        }
        let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        // |Ψ⟩ = (A/N!) Σ_σ …, so A = N!/‖Σ_σ …‖.
        let a_tensor = 6.0 / norm;
        let cons = Constellation::from_points(&pts).unwrap();
        let a = symmetrized_norm(&cons).unwrap();
        assert!((a - a_tensor).abs() < 1e-10 * a);
        let pv: f64 = product_vector(&pts).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!((a - 1.0 / pv).abs() < 1e-10 * a);
    }
}

#[test]
fn symmetrized_norm_trivial_cases() {
    let one = Constellation::from_points(&[StereoPoint::finite(0.3, 0.2)]).unwrap();
    assert!((symmetrized_norm(&one).unwrap() - 1.0).abs() < 1e-14);
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for n in [9, 12] {
        let st = SpinState::random(spin(n), &mut rng);
        let cons = constellation(&st).unwrap();
        let pv: f64 = product_vector(&cons.points()).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let a = symmetrized_norm(&cons).unwrap();
        assert!((a * pv - 1.0).abs() < 1e-8, "N = {n}");
    }
}

fn arb_state(max_n: usize) -> impl Strategy<Value = SpinState> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n + 1).prop_filter_map(
            "nonzero",
            move |v| {
                let coeffs = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
                SpinState::normalized(spin(n), coeffs).ok()
            },
        )
    })
}

fn arb_rotation() -> impl Strategy<Value = Rotation> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("nonzero quaternion", |q| q.0.abs() + q.1.abs() + q.2.abs() + q.3.abs() > 1e-3)
        .prop_map(|q| Rotation::from_quaternion([q.0, q.1, q.2, q.3]))
}

proptest! {
    #[test]
    fn prop_round_trip(st in arb_state(8)) {
        let back = state_from_constellation(&constellation(&st).unwrap()).unwrap();
        prop_assert!(st.overlap(&back) > 1.0 - 1e-9);
        prop_assert_eq!(back.clone(), back.with_canonical_phase());
    }

    #[test]
    fn prop_rotation_equivariance(st in arb_state(6), r in arb_rotation()) {
        let lhs = constellation(&rotate_state(&st, &r)).unwrap();
        let rhs = constellation(&st).unwrap().rotated(&r);
        prop_assert!(lhs.distance(&rhs) < 1e-7);
    }

    #[test]
    fn prop_rotation_preserves_norm(st in arb_state(10), r in arb_rotation()) {
        let out = rotate_state(&st, &r);
        let norm: f64 = out.coeffs().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        let back = rotate_state(&out, &r.inverse());
        prop_assert!(back.overlap(&st) > 1.0 - 1e-12);
    }

    #[test]
    fn prop_total_multiplicity(st in arb_state(10)) {
        prop_assert_eq!(constellation(&st).unwrap().total(), st.n());
    }
}

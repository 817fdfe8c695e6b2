//! Points of the Riemann sphere, directions on S², and rotations.
//!
//! Stereographic projection is taken from the south pole: a direction with
//! polar angle θ and azimuth φ maps to ζ = tan(θ/2) e^{iφ}, the south pole to ∞.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Ratio |x|/|y| of a spinor below which it is read as the point at infinity.
const SPINOR_INFINITY: f64 = 1e-15;

/// A point of ℂ ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StereoPoint {
    Finite(Complex64),
    Infinity,
}

impl StereoPoint {
    pub fn finite(re: f64, im: f64) -> Self {
        StereoPoint::Finite(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, StereoPoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            StereoPoint::Finite(z) => Some(*z),
            StereoPoint::Infinity => None,
        }
    }

    /// The point y/x of a spinor (x, y); ∞ when x vanishes relative to y.
    pub fn from_spinor(x: Complex64, y: Complex64) -> Self {
        if x.norm() <= SPINOR_INFINITY * y.norm() {
            StereoPoint::Infinity
        } else {
            StereoPoint::Finite(y / x)
        }
    }

    /// Normalized spin-1/2 state (x, y) with y/x = ζ and x ≥ 0 real.
    pub fn spinor(&self) -> [Complex64; 2] {
        match self {
            StereoPoint::Finite(z) => {
                let r = (1.0 + z.norm_sqr()).sqrt();
                [Complex64::new(1.0 / r, 0.0), z / r]
            }
            StereoPoint::Infinity => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    /// The antipodal point −1/ζ̄.
    pub fn antipode(&self) -> Self {
        match self {
            StereoPoint::Finite(z) if z.norm() == 0.0 => StereoPoint::Infinity,
            StereoPoint::Finite(z) => StereoPoint::Finite(-1.0 / z.conj()),
            StereoPoint::Infinity => StereoPoint::Finite(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn to_direction(&self) -> Direction {
        match self {
            StereoPoint::Finite(z) => Direction::new(2.0 * z.norm().atan(), z.arg()),
            StereoPoint::Infinity => Direction::south(),
        }
    }

    /// Euclidean distance between the corresponding unit vectors, in [0, 2].
    pub fn chordal(&self, other: &StereoPoint) -> f64 {
        match (self, other) {
            (StereoPoint::Finite(a), StereoPoint::Finite(b)) => {
                2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
            }
            (StereoPoint::Finite(a), StereoPoint::Infinity)
            | (StereoPoint::Infinity, StereoPoint::Finite(a)) => 2.0 / (1.0 + a.norm_sqr()).sqrt(),
            (StereoPoint::Infinity, StereoPoint::Infinity) => 0.0,
        }
    }
}

/// A direction on the unit sphere in polar coordinates.
///
/// θ ∈ [0, π], φ ∈ [0, 2π); φ is set to 0 at the poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Self {
        let mut theta = theta.clamp(0.0, PI);
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        if theta < 1e-15 {
            theta = 0.0;
            phi = 0.0;
        } else if PI - theta < 1e-15 {
            theta = PI;
            phi = 0.0;
        }
        Direction { theta, phi }
    }

    pub fn north() -> Self {
        Direction { theta: 0.0, phi: 0.0 }
    }

    pub fn south() -> Self {
        Direction { theta: PI, phi: 0.0 }
    }

    pub fn from_vector(v: [f64; 3]) -> Self {
        let rho = v[0].hypot(v[1]);
        Direction::new(rho.atan2(v[2]), v[1].atan2(v[0]))
    }

    pub fn to_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn to_stereo(&self) -> StereoPoint {
        if self.theta == PI {
            StereoPoint::Infinity
        } else {
            StereoPoint::Finite(Complex64::from_polar((self.theta / 2.0).tan(), self.phi))
        }
    }

    pub fn antipode(&self) -> Self {
        Direction::new(PI - self.theta, self.phi + PI)
    }

    /// The spin-1/2 state (cos θ/2, e^{iφ} sin θ/2).
    pub fn spinor(&self) -> [Complex64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [Complex64::new(c, 0.0), Complex64::from_polar(s, self.phi)]
    }

    /// Great-circle angle to another direction.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        let a = self.to_vector();
        let b = other.to_vector();
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cross = cross(a, b);
        norm3(cross).atan2(dot)
    }

    pub fn chordal(&self, other: &Direction) -> f64 {
        let a = self.to_vector();
        let b = other.to_vector();
        norm3([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
    }

    /// Lexicographic order on (θ, φ).
    pub fn lex_cmp(&self, other: &Direction) -> std::cmp::Ordering {
        self.theta
            .total_cmp(&other.theta)
            .then(self.phi.total_cmp(&other.phi))
    }
}

/// A proper rotation of ℝ³, stored as a unit quaternion (w, x, y, z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    q: [f64; 4],
}

impl Rotation {
    pub fn identity() -> Self {
        Rotation { q: [1.0, 0.0, 0.0, 0.0] }
    }

    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        Rotation {
            q: [q[0] / n, q[1] / n, q[2] / n, q[3] / n],
        }
    }

    pub fn quaternion(&self) -> [f64; 4] {
        self.q
    }

    /// Right-handed rotation by `angle` about `axis` (need not be unit).
    pub fn axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let n = norm3(axis);
        let (s, c) = (angle / 2.0).sin_cos();
        Rotation {
            q: [c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n],
        }
    }

    pub fn about_z(angle: f64) -> Self {
        Self::axis_angle([0.0, 0.0, 1.0], angle)
    }

    pub fn about_y(angle: f64) -> Self {
        Self::axis_angle([0.0, 1.0, 0.0], angle)
    }

    /// R_z(α) R_y(β) R_z(γ).
    pub fn euler_zyz(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self::about_z(alpha)
            .compose(&Self::about_y(beta))
            .compose(&Self::about_z(gamma))
    }

    /// R_z(φ) R_y(θ), which carries the north pole to `n`.
    pub fn north_to(n: &Direction) -> Self {
        Self::about_z(n.phi).compose(&Self::about_y(n.theta))
    }

    /// Uniformly distributed rotation.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-6 {
                return Self::from_quaternion(q);
            }
        }
    }

    pub fn inverse(&self) -> Self {
        let [w, x, y, z] = self.q;
        Rotation { q: [w, -x, -y, -z] }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Rotation) -> Self {
        let [a1, b1, c1, d1] = self.q;
        let [a2, b2, c2, d2] = other.q;
        Rotation {
            q: [
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            ],
        }
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let w = self.q[0];
        let u = [self.q[1], self.q[2], self.q[3]];
        let t = cross(u, v);
        let t = [2.0 * t[0], 2.0 * t[1], 2.0 * t[2]];
        let ut = cross(u, t);
        [
            v[0] + w * t[0] + ut[0],
            v[1] + w * t[1] + ut[1],
            v[2] + w * t[2] + ut[2],
        ]
    }

    pub fn apply_direction(&self, n: &Direction) -> Direction {
        Direction::from_vector(self.apply(n.to_vector()))
    }

    /// The SU(2) lift [[a, −b̄], [b, ā]], returned as (a, b).
    pub fn su2(&self) -> (Complex64, Complex64) {
        let [w, x, y, z] = self.q;
        (Complex64::new(w, -z), Complex64::new(y, -x))
    }

    /// Applies the SU(2) lift to a spinor.
    pub fn apply_spinor(&self, s: [Complex64; 2]) -> [Complex64; 2] {
        let (a, b) = self.su2();
        [a * s[0] - b.conj() * s[1], b * s[0] + a.conj() * s[1]]
    }

    /// The induced Möbius map ζ ↦ (b + āζ)/(a − b̄ζ).
    pub fn apply_stereo(&self, p: &StereoPoint) -> StereoPoint {
        let s = match p {
            StereoPoint::Finite(z) => [Complex64::new(1.0, 0.0), *z],
            StereoPoint::Infinity => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        };
        let [x, y] = self.apply_spinor(s);
        StereoPoint::from_spinor(x, y)
    }
}

/// `n` nearly uniform directions on a Fibonacci spiral; `offset` rotates the
/// spiral about the z axis.
pub fn fibonacci_sphere(n: usize, offset: f64) -> Vec<Direction> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            Direction::new(z.acos(), i as f64 * golden + offset)
        })
        .collect()
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

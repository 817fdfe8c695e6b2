//! Spin values and pure spin-s states in the S_z eigenbasis.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// A spin quantum number s, stored as the integer N = 2s ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(usize);

impl Spin {
    pub fn from_twice(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpin(n));
        }
        Ok(Spin(n))
    }

    /// N = 2s, the number of stars.
    pub fn twice(self) -> usize {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_half_integer(self) -> bool {
        self.0 % 2 == 1
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Spin {
    type Err = String;

    /// Accepts `"3/2"`, `"1"` or `"1.5"`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let twice = if let Some((num, den)) = s.split_once('/') {
            let num: usize = num.trim().parse().map_err(|_| format!("bad spin {s:?}"))?;
            match den.trim() {
                "2" => num,
                "1" => 2 * num,
                _ => return Err(format!("spin denominator must be 1 or 2 in {s:?}")),
            }
        } else if let Ok(k) = s.parse::<usize>() {
            2 * k
        } else {
            let x: f64 = s.parse().map_err(|_| format!("bad spin {s:?}"))?;
            let t = 2.0 * x;
            if t < 0.5 || (t - t.round()).abs() > 1e-12 {
                return Err(format!("spin must be a positive half-integer, got {s:?}"));
            }
            t.round() as usize
        };
        Spin::from_twice(twice).map_err(|e| e.to_string())
    }
}

/// Binomial coefficient C(n, k) as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// A pure spin-s state Σ c_m |s,m⟩. Index 0 holds m = s, index N holds m = −s.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    spin: Spin,
    coeffs: Vec<Complex64>,
}

impl SpinState {
    /// Wraps a coefficient vector that must already be normalized.
    pub fn new(spin: Spin, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new_with(spin, coeffs, &Tolerances::default())
    }

    pub fn new_with(spin: Spin, coeffs: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        check_len(spin, &coeffs)?;
        let norm2 = norm_sqr(&coeffs);
        if (norm2 - 1.0).abs() > tol.normalization {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(SpinState { spin, coeffs })
    }

    /// Normalizes an arbitrary nonzero coefficient vector.
    pub fn normalized(spin: Spin, coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(spin, &coeffs)?;
        let norm = norm_sqr(&coeffs).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(SpinState {
            spin,
            coeffs: coeffs.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// The basis state |s, s−k⟩.
    pub fn basis(spin: Spin, k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); spin.twice() + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        SpinState { spin, coeffs }
    }

    /// Haar-random state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(spin: Spin, rng: &mut R) -> Self {
        loop {
            let coeffs: Vec<Complex64> = (0..=spin.twice())
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(s) = Self::normalized(spin, coeffs) {
                return s;
            }
        }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    /// N = 2s.
    pub fn n(&self) -> usize {
        self.spin.twice()
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &SpinState) -> Complex64 {
        inner(&self.coeffs, &other.coeffs)
    }

    /// |⟨self|other⟩|.
    pub fn overlap(&self, other: &SpinState) -> f64 {
        self.inner(other).norm()
    }

    /// Multiplies by a unit-modulus phase.
    pub fn rephased(&self, phase: Complex64) -> Self {
        SpinState {
            spin: self.spin,
            coeffs: self.coeffs.iter().map(|c| c * phase).collect(),
        }
    }

    /// Same ray with the first non-negligible coefficient (scanning from m = s)
    /// made real and positive.
    pub fn with_canonical_phase(&self) -> Self {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        match self.coeffs.iter().find(|c| c.norm() > 1e-12 * max) {
            Some(c) => self.rephased(c.conj() / c.norm()),
            None => self.clone(),
        }
    }
}

fn check_len(spin: Spin, coeffs: &[Complex64]) -> Result<()> {
    if coeffs.len() != spin.twice() + 1 {
        return Err(Error::DimensionMismatch {
            n: spin.twice(),
            got: coeffs.len(),
        });
    }
    Ok(())
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// Σ conj(a_i) b_i.
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

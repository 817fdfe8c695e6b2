//! JSON file formats shared by the command-line tool and downstream plotting.
//!
//! State file: `{"spin": "3/2", "coeffs": [[re, im], …]}` with coefficients
//! ordered m = s … −s. The spin may also be an integer. Constellation file:
//! `[{"theta": …, "phi": …, "mult": k}, …]`. Floats are written in shortest
//! round-trip form, so a written file re-parses into identical values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::husimi::{CriticalKind, CriticalPoint};
use crate::sphere::Direction;
use crate::spin::{Spin, SpinState};
use crate::stellar::Constellation;
use crate::tolerance::Tolerances;

/// Spin as written in a file: `"3/2"`, `"1"` or a bare integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpinField {
    Integer(usize),
    Text(String),
}

impl SpinField {
    pub fn spin(&self) -> Result<Spin> {
        match self {
            SpinField::Integer(k) => Spin::from_twice(2 * k),
            SpinField::Text(s) => s.parse().map_err(|e: String| Error::Parse(format!("field \"spin\": {e}"))),
        }
    }
}

impl From<Spin> for SpinField {
    fn from(s: Spin) -> Self {
        SpinField::Text(s.to_string())
    }
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub spin: SpinField,
    pub coeffs: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(state: &SpinState) -> Self {
        StateFile {
            spin: state.spin().into(),
            coeffs: state.coeffs().iter().map(|&z| pair(z)).collect(),
        }
    }

    /// Coefficients within the normalization tolerance are kept verbatim;
    /// others (for example rounded published values) are rescaled.
    pub fn to_state(&self, tol: &Tolerances) -> Result<SpinState> {
        let spin = self.spin.spin()?;
        let coeffs: Vec<Complex64> = self.coeffs.iter().map(|&p| complex(p)).collect();
        if coeffs.len() != spin.twice() + 1 {
            return Err(Error::DimensionMismatch {
                n: spin.twice(),
                got: coeffs.len(),
            });
        }
        match SpinState::new_with(spin, coeffs.clone(), tol) {
            Ok(st) => Ok(st),
            Err(Error::NotNormalized(_)) => SpinState::normalized(spin, coeffs),
            Err(e) => Err(e),
        }
    }
}

/// One distinct star of a constellation file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarRecord {
    pub theta: f64,
    pub phi: f64,
    pub mult: usize,
}

pub fn star_records(c: &Constellation) -> Vec<StarRecord> {
    c.stars()
        .iter()
        .map(|s| {
            let d = s.direction();
            StarRecord {
                theta: d.theta,
                phi: d.phi,
                mult: s.multiplicity,
            }
        })
        .collect()
}

pub fn records_to_constellation(records: &[StarRecord]) -> Result<Constellation> {
    let dirs: Vec<(Direction, usize)> = records
        .iter()
        .map(|r| (Direction::new(r.theta, r.phi), r.mult))
        .collect();
    Constellation::from_directions(&dirs)
}

/// Directions with each record repeated `mult` times, in file order.
pub fn records_to_directions(records: &[StarRecord]) -> Vec<Direction> {
    records
        .iter()
        .flat_map(|r| std::iter::repeat_n(Direction::new(r.theta, r.phi), r.mult))
        .collect()
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!("{what} at line {} column {}: {e}", e.line(), e.column()))
    })
}

pub fn parse_state(text: &str, tol: &Tolerances) -> Result<SpinState> {
    parse::<StateFile>(text, "state file")?.to_state(tol)
}

pub fn parse_state_file(text: &str) -> Result<StateFile> {
    parse(text, "state file")
}

pub fn parse_constellation(text: &str) -> Result<Vec<StarRecord>> {
    let records: Vec<StarRecord> = parse(text, "constellation file")?;
    if records.is_empty() {
        return Err(Error::Parse("constellation file lists no stars".into()));
    }
    for (i, r) in records.iter().enumerate() {
        if r.mult == 0 || !r.theta.is_finite() || !r.phi.is_finite() {
            return Err(Error::Parse(format!("constellation entry {i}: theta/phi must be finite and mult ≥ 1")));
        }
    }
    Ok(records)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

pub fn state_json(state: &SpinState) -> String {
    to_json(&StateFile::from_state(state))
}

pub fn constellation_json(c: &Constellation) -> String {
    to_json(&star_records(c))
}

/// A critical point as written by the `husimi` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalRecord {
    pub theta: f64,
    pub phi: f64,
    pub kind: CriticalKind,
    pub value: f64,
    pub saddle_phi: Option<f64>,
    pub marginal: bool,
    pub multiplicity: usize,
}

impl From<&CriticalPoint> for CriticalRecord {
    fn from(p: &CriticalPoint) -> Self {
        CriticalRecord {
            theta: p.direction.theta,
            phi: p.direction.phi,
            kind: p.kind,
            value: p.value,
            saddle_phi: p.saddle_phi,
            marginal: p.marginal,
            multiplicity: p.multiplicity,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn state_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for n in 1..=8 {
            let st = SpinState::random(Spin::from_twice(n).unwrap(), &mut rng);
            let text = state_json(&st);
            let back = parse_state(&text, &Tolerances::default()).unwrap();
            assert_eq!(back, st);
            assert_eq!(state_json(&back), text);
        }
    }

    #[test]
    fn spin_forms() {
        let tol = Tolerances::default();
        let a = parse_state(r#"{"spin": 1, "coeffs": [[1,0],[0,0],[0,0]]}"#, &tol).unwrap();
        let b = parse_state(r#"{"spin": "1", "coeffs": [[1,0],[0,0],[0,0]]}"#, &tol).unwrap();
        assert_eq!(a, b);
        let c = parse_state(r#"{"spin": "1/2", "coeffs": [[3,0],[0,4]]}"#, &tol).unwrap();
        assert!((c.coeffs()[0].re - 0.6).abs() < 1e-15);
    }

    #[test]
    fn malformed_inputs_are_reported_with_context() {
        let tol = Tolerances::default();
        let e = parse_state("{\n  \"spin\": \"3/2\",\n  \"coeffs\": [[1, 0], [0]]\n}", &tol).unwrap_err();
        assert!(matches!(&e, Error::Parse(m) if m.contains("line 3")), "{e}");
        assert!(matches!(
            parse_state(r#"{"spin": "3/2", "coeffs": [[1,0]]}"#, &tol),
            Err(Error::DimensionMismatch { n: 3, got: 1 })
        ));
        assert!(matches!(
            parse_state(r#"{"spin": "3/4", "coeffs": [[1,0]]}"#, &tol),
            Err(Error::Parse(_))
        ));
        assert!(matches!(parse_constellation("[]"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_constellation(r#"[{"theta": 1, "phi": 0, "mult": 0}]"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn constellation_round_trip_is_exact() {
        let text = r#"[{"theta": 0.1, "phi": 2.5, "mult": 2}, {"theta": 3.141592653589793, "phi": 0.0, "mult": 1}]"#;
        let recs = parse_constellation(text).unwrap();
        let again = parse_constellation(&to_json(&recs)).unwrap();
        assert_eq!(recs, again);
        let c = records_to_constellation(&recs).unwrap();
        assert_eq!(c.total(), 3);
        assert_eq!(records_to_directions(&recs).len(), 3);
        let written = star_records(&c);
        assert_eq!(parse_constellation(&to_json(&written)).unwrap(), written);
    }
}

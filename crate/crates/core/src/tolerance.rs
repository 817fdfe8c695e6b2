//! Numerical tolerances, collected in one place.
//!
//! Every threshold used by the library lives in [`Tolerances`]. Operations take
//! the defaults unless a `*_with` variant is called with an explicit record.
//! The command-line tool overrides individual fields by key (see
//! [`Tolerances::set`]).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `normalization`: allowed deviation of Σ|c|² from 1.
    pub normalization: f64,
    /// `cluster`: chordal distance below which stars are merged.
    pub cluster: f64,
    /// `infinity`: leading coefficients below this × max|coef| count as roots at ∞.
    pub infinity: f64,
    /// `zero_poly`: absolute floor below which a polynomial is identically zero.
    pub zero_poly: f64,
    /// `multiplicity`: relative size of Taylor coefficients accepted as vanishing
    /// when deciding that a root cluster is one multiple root.
    pub multiplicity: f64,
    /// `ill_conditioned`: condition number above which a basis expansion warns.
    pub ill_conditioned: f64,
    /// `critical`: criticality residual |⟨n,s−1|Ψ⟩| accepted for a max/saddle.
    pub critical: f64,
    /// `global_min`: ρ_s below which a critical point is a zero of the Husimi function.
    pub global_min: f64,
    /// `marginal`: |√s ρ_s − √(2s−1) ρ_{s−2}| below which the Hessian is flagged degenerate.
    pub marginal: f64,
    /// `dedup`: angular radius (rad) for merging critical points.
    pub dedup: f64,
    /// `tie`: Husimi-value difference treated as a tie between closest SC states.
    pub tie: f64,
    /// `cut_locus`: distances ≥ π/2 − this are on the cut locus.
    pub cut_locus: f64,
    /// `rank`: relative singular value threshold for numerical rank.
    pub rank: f64,
    /// `degenerate_a`: |A| threshold (× max(1, max|ζ|²)) routing the spin-3/2
    /// decomposition to its ∞ branch.
    pub degenerate_a: f64,
    /// `sc_membership`: clustering tolerance used when scanning for SC points.
    pub sc_membership: f64,
    /// `overlap`: |⟨a|b⟩| below which a Bargmann phase is undefined.
    pub overlap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            normalization: 1e-9,
            cluster: 1e-7,
            infinity: 1e-12,
            zero_poly: 1e-300,
            multiplicity: 1e-12,
            ill_conditioned: 1e12,
            critical: 1e-9,
            global_min: 1e-7,
            marginal: 1e-9,
            dedup: 1e-6,
            tie: 1e-9,
            cut_locus: 1e-6,
            rank: 1e-6,
            degenerate_a: 1e-10,
            sc_membership: 1e-5,
            overlap: 1e-12,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 16] = [
        "normalization",
        "cluster",
        "infinity",
        "zero_poly",
        "multiplicity",
        "ill_conditioned",
        "critical",
        "global_min",
        "marginal",
        "dedup",
        "tie",
        "cut_locus",
        "rank",
        "degenerate_a",
        "sc_membership",
        "overlap",
    ];

    /// Overrides one field by name. Returns `false` for an unknown key.
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        let slot = match key {
            "normalization" => &mut self.normalization,
            "cluster" => &mut self.cluster,
            "infinity" => &mut self.infinity,
            "zero_poly" => &mut self.zero_poly,
            "multiplicity" => &mut self.multiplicity,
            "ill_conditioned" => &mut self.ill_conditioned,
            "critical" => &mut self.critical,
            "global_min" => &mut self.global_min,
            "marginal" => &mut self.marginal,
            "dedup" => &mut self.dedup,
            "tie" => &mut self.tie,
            "cut_locus" => &mut self.cut_locus,
            "rank" => &mut self.rank,
            "degenerate_a" => &mut self.degenerate_a,
            "sc_membership" => &mut self.sc_membership,
            "overlap" => &mut self.overlap,
            _ => return false,
        };
        *slot = value;
        true
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        let fields = [
            self.normalization,
            self.cluster,
            self.infinity,
            self.zero_poly,
            self.multiplicity,
            self.ill_conditioned,
            self.critical,
            self.global_min,
            self.marginal,
            self.dedup,
            self.tie,
            self.cut_locus,
            self.rank,
            self.degenerate_a,
            self.sc_membership,
            self.overlap,
        ];
        Self::KEYS.iter().position(|k| *k == key).map(|i| fields[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_key_round_trips() {
        let mut t = Tolerances::default();
        for (i, key) in Tolerances::KEYS.iter().enumerate() {
            let v = 1.0 + i as f64;
            assert!(t.set(key, v), "{key}");
            assert_eq!(t.get(key), Some(v));
        }
        assert!(!t.set("bogus", 1.0));
        assert_eq!(t.get("bogus"), None);
    }
}

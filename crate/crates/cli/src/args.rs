use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "stellar", version, about = "Stellar (Majorana) representation of spin states")]
pub struct Cli {
    /// Seed for randomized inputs and sweeps.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,

    /// Override one tolerance, e.g. `--tol cluster=1e-8` (repeatable).
    #[arg(long = "tol", value_name = "KEY=VAL", global = true)]
    pub tol: Vec<String>,

    /// Write the main output here instead of stdout.
    #[arg(long, value_name = "PATH", global = true)]
    pub out: Option<PathBuf>,

    /// Format of the main output.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Run sweeps on the calling thread only.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Projection {
    #[value(name = "123")]
    P123,
    #[value(name = "124")]
    P124,
    #[value(name = "134")]
    P134,
    #[value(name = "234")]
    P234,
    Stereo,
}

impl Projection {
    /// Zero-based component indices of a coordinate projection.
    pub fn axes(self) -> Option<[usize; 3]> {
        match self {
            Projection::P123 => Some([0, 1, 2]),
            Projection::P124 => Some([0, 1, 3]),
            Projection::P134 => Some([0, 2, 3]),
            Projection::P234 => Some([1, 2, 3]),
            Projection::Stereo => None,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Constellation of a state file.
    Stars {
        state: PathBuf,
    },

    /// State of a constellation file, or a random state with `--random SPIN`.
    State {
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        constellation: Option<PathBuf>,
        #[arg(long, value_name = "SPIN")]
        random: Option<String>,
    },

    /// Coefficients of a state in the SC basis given by N+1 directions.
    Expand {
        state: PathBuf,
        /// Constellation file listing the basis directions.
        basis: PathBuf,
    },

    /// The adapted SC basis of a state and its coefficients.
    AdaptedBasis {
        state: PathBuf,
        /// Also write the basis directions as a constellation file.
        #[arg(long, value_name = "PATH")]
        basis_out: Option<PathBuf>,
    },

    /// Critical points of the Husimi function and the distance to the SC sphere.
    Husimi {
        state: PathBuf,
        /// Sample the Husimi function on a K×K grid.
        #[arg(long, value_name = "K", requires = "grid_out")]
        grid: Option<usize>,
        /// CSV file for the grid samples.
        #[arg(long, value_name = "PATH", requires = "grid")]
        grid_out: Option<PathBuf>,
    },

    /// Logarithms of all SC states at a base state, as tangent-frame components.
    Logmap {
        /// Spin of the symmetric pair state (only 1 is defined).
        #[arg(long, requires = "alpha", required_unless_present = "state", conflicts_with = "state")]
        spin: Option<String>,
        /// Polar angle of the two stars of the symmetric pair state.
        #[arg(long, requires = "spin")]
        alpha: Option<f64>,
        /// Base state file.
        #[arg(long, value_name = "PATH")]
        state: Option<PathBuf>,
        /// Grid resolution K (K×K directions).
        #[arg(long, default_value_t = 40)]
        resolution: usize,
        #[arg(long, value_enum, default_value = "123")]
        projection: Projection,
    },

    /// Constellation of a·|Ψ₁⟩ + b·|Ψ₂⟩ and the Mason bound.
    Superpose {
        #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
        a: String,
        #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
        b: String,
        s1: PathBuf,
        s2: PathBuf,
        /// Sample the root trajectories of two SC inputs at K values of t in [0, π].
        #[arg(long, value_name = "K", requires = "trajectory_out")]
        trajectory: Option<usize>,
        /// CSV file for the trajectory samples.
        #[arg(long, value_name = "PATH", requires = "trajectory")]
        trajectory_out: Option<PathBuf>,
        /// Relative phase Ω of the trajectory.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        omega: f64,
    },

    /// Run the invariant suite and print a pass/fail table.
    Verify,
}

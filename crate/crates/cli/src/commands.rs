//! One adapter per subcommand: read inputs, call the library, write outputs.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use stellar_core::fs::{
    direction_cloud_in, sc_log_cloud_in, symmetric_pair_frame, tangent_frame, SampleFlag, TangentFrame,
};
use stellar_core::husimi::{closest_from_set, critical_points_with, husimi_grid, SearchOptions};
use stellar_core::io::{self, CriticalRecord, StarRecord};
use stellar_core::sc_basis::{adapted_basis_with, expand_in_sc_basis_with, ExpansionCoefficients, SCBasis};
use stellar_core::stellar::{constellation_with, state_from_constellation, Star};
use stellar_core::superposition::{superpose_with, two_sc_trajectory};
use stellar_core::{verify, Direction, Error, Execution, Spin, SpinState, StereoPoint, Tolerances, Warning};

use crate::args::{Cli, Command, Format, Projection};
use crate::output::{num, read, write, Table};
use crate::CliError;

struct Context<'a> {
    cli: &'a Cli,
    tol: Tolerances,
    exec: Execution,
}

impl Context<'_> {
    fn format(&self) -> Format {
        self.cli.format.unwrap_or(Format::Json)
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        write(self.cli.out.as_deref(), text)
    }

    fn state(&self, path: &Path) -> Result<SpinState, CliError> {
        io::parse_state(&read(path)?, &self.tol).map_err(|e| in_file(path, e))
    }

    fn search(&self) -> SearchOptions {
        SearchOptions {
            execution: self.exec,
            tolerances: self.tol,
            ..SearchOptions::default()
        }
    }
}

/// Prefixes parse errors with the offending file.
fn in_file(path: &Path, e: Error) -> CliError {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())).into(),
        other => other.into(),
    }
}

fn tolerances(overrides: &[String]) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--tol expects KEY=VAL, got {item:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--tol {key}: {value:?} is not a number")))?;
        if !tol.set(key.trim(), value) {
            return Err(CliError::Usage(format!(
                "unknown tolerance {key:?}; known keys: {}",
                Tolerances::KEYS.join(", ")
            )));
        }
    }
    Ok(tol)
}

fn parse_spin(text: &str) -> Result<Spin, CliError> {
    text.parse::<Spin>().map_err(|e| Error::Parse(e).into())
}

fn parse_complex(text: &str, flag: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("--{flag} expects RE,IM, got {text:?}"));
    let (re, im) = text.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// Pretty JSON with a trailing newline.
fn json<T: Serialize>(value: &T) -> String {
    let mut s = io::to_json(value);
    s.push('\n');
    s
}

fn warning_texts(w: &[Warning]) -> Vec<String> {
    w.iter().map(|w| w.to_string()).collect()
}

fn angles(d: &Direction) -> [f64; 2] {
    [d.theta, d.phi]
}

fn record(star: &Star) -> StarRecord {
    let d = star.direction();
    StarRecord {
        theta: d.theta,
        phi: d.phi,
        mult: star.multiplicity,
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let ctx = Context {
        cli,
        tol: tolerances(&cli.tol)?,
        exec: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    match &cli.command {
        Command::Stars { state } => stars(&ctx, state),
        Command::State { constellation, random } => state(&ctx, constellation.as_deref(), random.as_deref()),
        Command::Expand { state, basis } => expand(&ctx, state, basis),
        Command::AdaptedBasis { state, basis_out } => adapted(&ctx, state, basis_out.as_deref()),
        Command::Husimi { state, grid, grid_out } => husimi(&ctx, state, *grid, grid_out.as_deref()),
        Command::Logmap {
            spin,
            alpha,
            state,
            resolution,
            projection,
        } => logmap(&ctx, spin.as_deref(), *alpha, state.as_deref(), *resolution, *projection),
        Command::Superpose {
            a,
            b,
            s1,
            s2,
            trajectory,
            trajectory_out,
            omega,
        } => superpose(&ctx, a, b, s1, s2, *trajectory, trajectory_out.as_deref(), *omega),
        Command::Verify => run_verify(&ctx),
    }
}

fn stars_csv(records: &[StarRecord]) -> String {
    let mut t = Table::new(&["theta", "phi", "mult"]);
    for r in records {
        t.row([num(r.theta), num(r.phi), r.mult.to_string()]);
    }
    t.finish()
}

fn stars(ctx: &Context, path: &Path) -> Result<(), CliError> {
    let st = ctx.state(path)?;
    let records = io::star_records(&constellation_with(&st, &ctx.tol)?);
    match ctx.format() {
        Format::Json => ctx.emit(&json(&records)),
        Format::Csv => ctx.emit(&stars_csv(&records)),
    }
}

fn state(ctx: &Context, constellation: Option<&Path>, random: Option<&str>) -> Result<(), CliError> {
    let st = match (constellation, random) {
        (Some(path), _) => {
            let records = io::parse_constellation(&read(path)?).map_err(|e| in_file(path, e))?;
            state_from_constellation(&io::records_to_constellation(&records)?)?
        }
        (None, Some(spin)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.cli.seed);
            SpinState::random(parse_spin(spin)?, &mut rng)
        }
        (None, None) => return Err(CliError::Usage("state needs a constellation file or --random SPIN".into())),
    };
    match ctx.format() {
        Format::Json => ctx.emit(&json(&io::StateFile::from_state(&st))),
        Format::Csv => {
            let s = st.n() as f64 / 2.0;
            let mut t = Table::new(&["k", "m", "re", "im"]);
            for (k, z) in st.coeffs().iter().enumerate() {
                t.row([k.to_string(), num(s - k as f64), num(z.re), num(z.im)]);
            }
            ctx.emit(&t.finish())
        }
    }
}

#[derive(Serialize)]
struct ExpansionOut {
    alphas: Vec<[f64; 2]>,
    majorana_alphas: Vec<[f64; 2]>,
    tilde_alphas: Option<Vec<[f64; 2]>>,
    residual: f64,
    condition: f64,
    warnings: Vec<String>,
}

impl From<&ExpansionCoefficients> for ExpansionOut {
    fn from(e: &ExpansionCoefficients) -> Self {
        let pairs = |v: &[Complex64]| v.iter().map(|&z| io::pair(z)).collect::<Vec<_>>();
        ExpansionOut {
            alphas: pairs(&e.alphas),
            majorana_alphas: pairs(&e.majorana_alphas),
            tilde_alphas: e.tilde_alphas.as_deref().map(pairs),
            residual: e.residual,
            condition: e.condition,
            warnings: warning_texts(&e.warnings),
        }
    }
}

fn expansion_csv(e: &ExpansionCoefficients, dirs: &[Direction]) -> String {
    let mut t = Table::new(&["k", "theta", "phi", "re", "im"]);
    for (k, (z, d)) in e.alphas.iter().zip(dirs).enumerate() {
        t.row([k.to_string(), num(d.theta), num(d.phi), num(z.re), num(z.im)]);
    }
    t.finish()
}

fn expand(ctx: &Context, state: &Path, basis: &Path) -> Result<(), CliError> {
    let st = ctx.state(state)?;
    let records = io::parse_constellation(&read(basis)?).map_err(|e| in_file(basis, e))?;
    let dirs = io::records_to_directions(&records);
    let basis = SCBasis::new_with(st.spin(), dirs, &ctx.tol)?;
    let e = expand_in_sc_basis_with(&st, &basis, &ctx.tol)?;
    match ctx.format() {
        Format::Json => ctx.emit(&json(&ExpansionOut::from(&e))),
        Format::Csv => ctx.emit(&expansion_csv(&e, basis.directions())),
    }
}

#[derive(Serialize)]
struct AdaptedOut {
    basis: Vec<StarRecord>,
    ties: Vec<[f64; 2]>,
    #[serde(flatten)]
    expansion: ExpansionOut,
}

fn adapted(ctx: &Context, state: &Path, basis_out: Option<&Path>) -> Result<(), CliError> {
    let st = ctx.state(state)?;
    let a = adapted_basis_with(&st, &ctx.search())?;
    let basis: Vec<StarRecord> = a
        .basis
        .directions()
        .iter()
        .map(|d| StarRecord {
            theta: d.theta,
            phi: d.phi,
            mult: 1,
        })
        .collect();
    if let Some(path) = basis_out {
        write(Some(path), &json(&basis))?;
    }
    match ctx.format() {
        Format::Json => {
            let mut expansion = ExpansionOut::from(&a.coefficients);
            expansion.warnings = warning_texts(&a.warnings);
            let out = AdaptedOut {
                basis,
                ties: a.ties.iter().map(angles).collect(),
                expansion,
            };
            ctx.emit(&json(&out))
        }
        Format::Csv => ctx.emit(&expansion_csv(&a.coefficients, a.basis.directions())),
    }
}

#[derive(Serialize)]
struct HusimiOut {
    criticals: Vec<CriticalRecord>,
    r_c: f64,
    closest: [f64; 2],
    ties: Vec<[f64; 2]>,
    morse_count: i64,
    warnings: Vec<String>,
}

fn husimi(ctx: &Context, state: &Path, grid: Option<usize>, grid_out: Option<&Path>) -> Result<(), CliError> {
    let st = ctx.state(state)?;
    let set = critical_points_with(&st, &ctx.search())?;
    let closest = closest_from_set(&set, &ctx.tol)?;
    if let (Some(k), Some(path)) = (grid, grid_out) {
        if k < 2 {
            return Err(CliError::Usage("--grid needs K ≥ 2".into()));
        }
        let mut t = Table::new(&["theta", "phi", "H", "distance"]);
        for g in husimi_grid(&st, k, ctx.exec) {
            t.row([num(g.theta), num(g.phi), num(g.h), num(g.distance)]);
        }
        write(Some(path), &t.finish())?;
    }
    let criticals: Vec<CriticalRecord> = set.points.iter().map(CriticalRecord::from).collect();
    match ctx.format() {
        Format::Json => {
            let out = HusimiOut {
                criticals,
                r_c: closest.distance,
                closest: angles(&closest.direction),
                ties: closest.ties.iter().map(angles).collect(),
                morse_count: set.morse_count(),
                warnings: warning_texts(&closest.warnings),
            };
            ctx.emit(&json(&out))
        }
        Format::Csv => {
            let mut t = Table::new(&["theta", "phi", "kind", "value", "saddle_phi", "marginal", "multiplicity"]);
            for c in &criticals {
                t.row([
                    num(c.theta),
                    num(c.phi),
                    format!("{:?}", c.kind),
                    num(c.value),
                    c.saddle_phi.map(num).unwrap_or_default(),
                    c.marginal.to_string(),
                    c.multiplicity.to_string(),
                ]);
            }
            ctx.emit(&t.finish())
        }
    }
}

fn flag_name(f: SampleFlag) -> &'static str {
    match f {
        SampleFlag::Regular => "regular",
        SampleFlag::CutLocus => "cut_locus",
    }
}

/// theta, phi, v1 … v_d, omega, flags, x, y, z with blanks for absent values.
fn log_row(theta: f64, phi: f64, v: &[f64], d: usize, omega: f64, flag: &str, xyz: Option<[f64; 3]>) -> Vec<String> {
    let mut row = vec![num(theta), num(phi)];
    row.extend((0..d).map(|i| v.get(i).map(|&x| num(x)).unwrap_or_default()));
    row.push(num(omega));
    row.push(flag.to_string());
    match xyz {
        Some(p) => row.extend(p.iter().map(|&x| num(x))),
        None => row.extend(std::iter::repeat_n(String::new(), 3)),
    }
    row
}

fn logmap(
    ctx: &Context,
    spin: Option<&str>,
    alpha: Option<f64>,
    state: Option<&Path>,
    resolution: usize,
    projection: Projection,
) -> Result<(), CliError> {
    if ctx.format() == Format::Json && ctx.cli.format.is_some() {
        return Err(CliError::Usage("logmap writes CSV only".into()));
    }
    if resolution < 2 {
        return Err(CliError::Usage("--resolution needs K ≥ 2".into()));
    }
    let frame: TangentFrame = match (spin, alpha, state) {
        (_, _, Some(path)) => tangent_frame(&ctx.state(path)?),
        (Some(s), Some(a), None) => {
            if parse_spin(s)?.twice() != 2 {
                return Err(CliError::Usage("the symmetric pair state is defined for spin 1 only".into()));
            }
            symmetric_pair_frame(a)
        }
        _ => return Err(CliError::Usage("logmap needs --spin S --alpha A or --state FILE".into())),
    };
    let d = frame.len();
    let mut header: Vec<String> = vec!["theta".into(), "phi".into()];
    header.extend((1..=d).map(|i| format!("v{i}")));
    header.extend(["omega", "flags", "x", "y", "z"].map(String::from));
    let mut t = Table::new(&header);

    match projection.axes() {
        Some(axes) => {
            if d < 4 {
                return Err(Error::SpinTooSmall { required: 2, got: frame.base().n() }.into());
            }
            let cloud = sc_log_cloud_in(frame, resolution, ctx.exec, &ctx.tol);
            for s in &cloud.samples {
                let xyz = (!s.components.is_empty()).then(|| axes.map(|i| s.components[i]));
                t.row(log_row(s.theta, s.phi, &s.components, d, s.omega, flag_name(s.flag), xyz));
            }
        }
        None => {
            let cloud = direction_cloud_in(frame, resolution, ctx.exec, &ctx.tol)?;
            for s in &cloud.samples {
                t.row(log_row(s.theta, s.phi, &s.unit, d, s.omega, flag_name(s.flag), s.projected));
            }
            for c in &cloud.circles {
                for (u, p) in c.unit.iter().zip(&c.projected) {
                    t.row(log_row(c.star.theta, c.star.phi, u, d, PI / 2.0, "cut_circle", *p));
                }
            }
        }
    }
    ctx.emit(&t.finish())
}

#[derive(Serialize)]
struct SuperposeOut {
    state: io::StateFile,
    constellation: Vec<StarRecord>,
    common: Vec<StarRecord>,
    mason_bound: i64,
    distinct: usize,
}

/// The single star of an SC state, or a validation error.
fn sc_star(st: &SpinState, tol: &Tolerances, path: &Path) -> Result<StereoPoint, CliError> {
    let c = constellation_with(st, tol)?;
    match c.stars() {
        [star] => Ok(star.point),
        _ => Err(CliError::Usage(format!(
            "{}: --trajectory needs spin-coherent inputs, this state has {} distinct stars",
            path.display(),
            c.distinct_count()
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn superpose(
    ctx: &Context,
    a: &str,
    b: &str,
    s1: &Path,
    s2: &Path,
    trajectory: Option<usize>,
    trajectory_out: Option<&Path>,
    omega: f64,
) -> Result<(), CliError> {
    let (a, b) = (parse_complex(a, "a")?, parse_complex(b, "b")?);
    let (st1, st2) = (ctx.state(s1)?, ctx.state(s2)?);
    let sup = superpose_with(a, &st1, b, &st2, &ctx.tol)?;

    if let (Some(k), Some(path)) = (trajectory, trajectory_out) {
        if k < 2 {
            return Err(CliError::Usage("--trajectory needs K ≥ 2".into()));
        }
        let (g1, g2) = (sc_star(&st1, &ctx.tol, s1)?, sc_star(&st2, &ctx.tol, s2)?);
        let ts: Vec<f64> = (0..k).map(|i| PI * i as f64 / (k - 1) as f64).collect();
        let traj = two_sc_trajectory(g1, g2, omega, st1.spin(), &ts)?;
        let mut t = Table::new(&["t", "k", "re", "im"]);
        for sample in &traj.samples {
            for (j, z) in sample.roots.iter().enumerate() {
                let z = z.as_finite().unwrap_or(Complex64::new(f64::INFINITY, f64::INFINITY));
                t.row([num(sample.t), j.to_string(), num(z.re), num(z.im)]);
            }
        }
        write(Some(path), &t.finish())?;
    }

    let constellation = io::star_records(&sup.constellation);
    match ctx.format() {
        Format::Json => {
            let out = SuperposeOut {
                state: io::StateFile::from_state(&sup.state),
                constellation,
                common: sup.common.iter().map(record).collect(),
                mason_bound: sup.mason_bound,
                distinct: sup.distinct,
            };
            ctx.emit(&json(&out))
        }
        Format::Csv => ctx.emit(&stars_csv(&constellation)),
    }
}

fn run_verify(ctx: &Context) -> Result<(), CliError> {
    if ctx.cli.format.is_some() {
        return Err(CliError::Usage("verify prints a text table; --format does not apply".into()));
    }
    let report = verify::run(ctx.cli.seed, ctx.exec);
    ctx.emit(&report.table())?;
    let failed = report.checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        return Err(CliError::VerifyFailed(failed));
    }
    Ok(())
}

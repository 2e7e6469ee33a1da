use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;

use cp_phase::interferometer::{detector_intensity, OutputBlocks};
use cp_phase::lindblad::{compose_nonselective, evolve_final, matrix_from_pairs, ModelFile};
use cp_phase::numerics::trace_distance;
use cp_phase::oscillator::{analytic_phases, coherent_state, damped_model, spiral_area};
use cp_phase::phase::phase_report;
use cp_phase::{DensityMatrix, LindbladModel, MeasurementSchedule, OscillatorParams};

use crate::args::{Args, Command, Format};
use crate::output::{Csv, Json};

/// Failure classes that map onto distinct exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, unreadable or malformed files.
    Input(String),
    /// Valid input for which the requested quantity does not exist.
    Domain(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Domain(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(msg) | Failure::Domain(msg) => f.write_str(msg),
        }
    }
}

impl From<cp_phase::Error> for Failure {
    fn from(e: cp_phase::Error) -> Self {
        if e.is_domain_error() {
            Failure::Domain(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

/// Runs the selected subcommand and returns the encoded output.
pub fn run(args: &Args) -> Outcome<String> {
    let t = args.time();
    if !(t.is_finite() && t >= 0.0) {
        return Err(input(format!("--t must be non-negative, got {t}")));
    }
    let steps = args.steps();
    if let Some(dt) = steps.iter().find(|dt| **dt <= 0.0) {
        return Err(input(format!("--dt must be positive, got {dt}")));
    }
    if args.command != Command::Converge && steps.len() != 1 {
        return Err(input("--dt takes a single value except for converge"));
    }
    match args.command {
        Command::Phase => phase(args, t, steps[0]),
        Command::Interfere => interfere(args, t, steps[0]),
        Command::Oscillator => oscillator(args, t, steps[0]),
        Command::Converge => converge(args, t, &steps),
        Command::Area => area(args, t),
    }
}

fn preset(args: &Args) -> Outcome<OscillatorParams> {
    Ok(match args.cutoff {
        Some(n) => OscillatorParams::with_cutoff(args.alpha, args.omega, args.k, n)?,
        None => OscillatorParams::new(args.alpha, args.omega, args.k)?,
    })
}

fn preset_only(args: &Args) -> Outcome<OscillatorParams> {
    if args.model.is_some() || args.state.is_some() {
        return Err(input(format!(
            "{:?} works on the oscillator preset; drop --model and --state",
            args.command
        )
        .to_lowercase()));
    }
    preset(args)
}

/// The model and initial state selected by `--model`, `--state` and the
/// preset options.
fn system(args: &Args) -> Outcome<(LindbladModel, DensityMatrix)> {
    let (model, default_state) = match &args.model {
        Some(path) => {
            let model = ModelFile::load(path)?.into_model()?;
            let rho0 = DensityMatrix::basis(model.dim(), 0)?;
            (model, rho0)
        }
        None => {
            let p = preset(args)?;
            (damped_model(&p, 1.0)?, coherent_state(p.alpha, p.cutoff)?)
        }
    };
    let rho0 = match &args.state {
        Some(path) => load_state(path, model.dim())?,
        None => default_state,
    };
    Ok((model, rho0))
}

fn load_state(path: &Path, dim: usize) -> Outcome<DensityMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    let entries: Vec<[f64; 2]> =
        serde_json::from_str(&text).map_err(|e| input(format!("state file {}: {e}", path.display())))?;
    let rho = DensityMatrix::new(matrix_from_pairs("state", &entries)?)?;
    if rho.dim() != dim {
        return Err(input(format!("state has dimension {}, model has {dim}", rho.dim())));
    }
    Ok(rho)
}

fn encode(format: Format, csv: Csv, json: impl FnOnce(Csv) -> Json) -> String {
    match format {
        Format::Csv => csv.render(),
        Format::Json => json(csv).render(),
    }
}

fn single_record(csv: Csv) -> Json {
    match csv.to_json() {
        Json::Array(mut rows) if rows.len() == 1 => rows.pop().expect("one row"),
        other => other,
    }
}

fn phase(args: &Args, t: f64, dt: f64) -> Outcome<String> {
    let (model, rho0) = system(args)?;
    let r = phase_report(&model, &rho0, t, dt)?;
    let mut csv = Csv::new(vec!["total", "visibility", "dynamical", "geometric", "t", "dt"]);
    csv.push(vec![r.total, r.visibility, r.dynamical, r.geometric, r.t, r.dt]);
    Ok(encode(args.output_format(), csv, single_record))
}

fn interfere(args: &Args, t: f64, dt: f64) -> Outcome<String> {
    if args.chi_points < 2 {
        return Err(input(format!("--chi-points must be at least 2, got {}", args.chi_points)));
    }
    let (model, rho0) = system(args)?;
    let blocks = OutputBlocks::prepare(&model, &rho0, t, dt)?;
    let mut csv = Csv::new(vec!["chi", "intensity_raw", "intensity_normalized"]);
    for j in 0..args.chi_points {
        let chi = TAU * j as f64 / args.chi_points as f64;
        let reading = detector_intensity(&blocks.assemble(chi))?;
        csv.push(vec![chi, reading.raw, reading.normalized]);
    }
    Ok(encode(args.output_format(), csv, |c| c.to_json()))
}

fn oscillator(args: &Args, t: f64, dt: f64) -> Outcome<String> {
    let p = preset_only(args)?;
    let model = damped_model(&p, 1.0)?;
    let rho0 = coherent_state(p.alpha, p.cutoff)?;
    let numeric = phase_report(&model, &rho0, t, dt)?;
    let exact = analytic_phases(&p, t);
    let exact_visibility = (p.alpha.norm_sqr() * ((-p.k * t).exp() * (p.omega * t).cos() - 1.0)).exp();
    let pairs = [
        (numeric.total, exact.total),
        (numeric.visibility, exact_visibility),
        (numeric.dynamical, exact.dynamical),
        (numeric.geometric, exact.geometric),
    ];
    let max_abs_diff = pairs.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(match args.output_format() {
        Format::Json => {
            let block = |pick: fn(&(f64, f64)) -> f64| {
                Json::Object(vec![
                    ("total", Json::num(pick(&pairs[0]))),
                    ("visibility", Json::num(pick(&pairs[1]))),
                    ("dynamical", Json::num(pick(&pairs[2]))),
                    ("geometric", Json::num(pick(&pairs[3]))),
                ])
            };
            Json::Object(vec![
                ("t", Json::num(t)),
                ("dt", Json::num(numeric.dt)),
                ("cutoff", Json::Integer(p.cutoff as u64)),
                ("numeric", block(|p| p.0)),
                ("analytic", block(|p| p.1)),
                ("max_abs_diff", Json::num(max_abs_diff)),
            ])
            .render()
        }
        Format::Csv => {
            let mut csv = Csv::new(vec![
                "t",
                "dt",
                "total_numeric",
                "total_analytic",
                "visibility_numeric",
                "visibility_analytic",
                "dynamical_numeric",
                "dynamical_analytic",
                "geometric_numeric",
                "geometric_analytic",
            ]);
            let mut row = vec![t, numeric.dt];
            row.extend(pairs.iter().flat_map(|&(a, b)| [a, b]));
            csv.push(row);
            csv.render()
        }
    })
}

/// Reference step for `converge`, relative to the finest requested step.
const REFERENCE_REFINEMENT: f64 = 25.0;

fn converge(args: &Args, t: f64, steps: &[f64]) -> Outcome<String> {
    if t == 0.0 {
        return Err(input("--t must be positive for converge"));
    }
    let (model, rho0) = system(args)?;
    let finest = steps.iter().copied().fold(f64::INFINITY, f64::min);
    let reference = evolve_final(&model, &rho0, t, finest / REFERENCE_REFINEMENT)?;
    let mut csv = Csv::new(vec!["dt", "trace_distance"]);
    let mut distances = Vec::with_capacity(steps.len());
    for &dt in steps {
        let schedule = MeasurementSchedule::for_horizon(t, dt)?;
        let composed = compose_nonselective(&model, &rho0, &schedule)?;
        let d = trace_distance(composed.matrix(), reference.matrix());
        distances.push(d);
        csv.push(vec![schedule.dt(), d]);
    }
    let ratios: Vec<f64> = distances.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(match args.output_format() {
        Format::Csv => {
            for (i, r) in ratios.iter().enumerate() {
                eprintln!("ratio rows {}/{}: {}", i + 1, i + 2, crate::output::g17(*r));
            }
            csv.render()
        }
        Format::Json => Json::Object(vec![
            ("t", Json::num(t)),
            ("reference_dt", Json::num(finest / REFERENCE_REFINEMENT)),
            ("rows", csv.to_json()),
            ("ratios", Json::Array(ratios.iter().map(|&r| Json::num(r)).collect())),
        ])
        .render(),
    })
}

fn area(args: &Args, t: f64) -> Outcome<String> {
    let p = preset_only(args)?;
    let area = spiral_area(&p, t, args.samples)?;
    let geometric = analytic_phases(&p, t).geometric;
    let ratio = if t > 0.0 && area != 0.0 { geometric / area } else { f64::NAN };
    let mut csv = Csv::new(vec!["area", "geometric_phase", "ratio"]);
    csv.push(vec![area, geometric, ratio]);
    Ok(encode(args.output_format(), csv, single_record))
}

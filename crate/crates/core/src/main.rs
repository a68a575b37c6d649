use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

use qzeno::check::analytic_check;
use qzeno::config::{parse_config_file, resolve, Command, Overrides, RunConfig};
use qzeno::dynamics::{run_schedule, MeasurementSchedule};
use qzeno::error::Error;
use qzeno::experiments::{
    curve_repfintime, curve_survival_during_measurement, curve_t1_vs_delta, curve_trace_distance,
    map_t_tf, map_tm_td, map_tm_tf, Axis,
};
use qzeno::model::CompositeModel;
use qzeno::output::{
    emit_curve, emit_curve_family, emit_heatmap, emit_series, emit_series_family, fmt_value,
    OutputHeader,
};
use qzeno::qla::DensityMatrix;

/// Repeated finite-duration premeasurements of a tight-binding chain:
/// curves, time series, and heatmaps as CSV with reproducible headers.
#[derive(Parser, Debug)]
#[command(name = "qzeno", version, about)]
struct Cli {
    /// Flat key = value config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in figure preset (fig2, fig3, fig4, fig6a, fig6b, fig7,
    /// fig8, fig9, repmeas).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_enum)]
    command: Option<Command>,
    /// Chain length L.
    #[arg(long)]
    sites: Option<usize>,
    /// On-site energy of site 0 (detuning), in units of γ.
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    /// Hopping strength γ (energy unit).
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// System-apparatus coupling g.
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    /// Apparatus spectrum shift δ.
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Measurement duration; setting it implies g = π/t_m.
    #[arg(long = "t_m", allow_negative_numbers = true)]
    t_m: Option<f64>,
    /// Free-evolution period between measurements.
    #[arg(long = "t_f", allow_negative_numbers = true)]
    t_f: Option<f64>,
    /// Period t_d = t_m + t_f between measurement starts.
    #[arg(long = "t_d", allow_negative_numbers = true)]
    t_d: Option<f64>,
    /// Free evolution before the first measurement.
    #[arg(long = "t_offset", allow_negative_numbers = true)]
    t_offset: Option<f64>,
    #[arg(long = "total_time", allow_negative_numbers = true)]
    total_time: Option<f64>,
    #[arg(long = "sample_dt", allow_negative_numbers = true)]
    sample_dt: Option<f64>,
    /// Readout time for the heatmap commands.
    #[arg(long = "eval_t", allow_negative_numbers = true)]
    eval_t: Option<f64>,
    #[arg(long = "c0_re", allow_negative_numbers = true)]
    c0_re: Option<f64>,
    #[arg(long = "c0_im", allow_negative_numbers = true)]
    c0_im: Option<f64>,
    #[arg(long = "c1_re", allow_negative_numbers = true)]
    c1_re: Option<f64>,
    #[arg(long = "c1_im", allow_negative_numbers = true)]
    c1_im: Option<f64>,
    #[arg(long = "t_min", allow_negative_numbers = true)]
    t_min: Option<f64>,
    #[arg(long = "t_max", allow_negative_numbers = true)]
    t_max: Option<f64>,
    #[arg(long = "tm_min", allow_negative_numbers = true)]
    tm_min: Option<f64>,
    #[arg(long = "tm_max", allow_negative_numbers = true)]
    tm_max: Option<f64>,
    #[arg(long = "tf_min", allow_negative_numbers = true)]
    tf_min: Option<f64>,
    #[arg(long = "tf_max", allow_negative_numbers = true)]
    tf_max: Option<f64>,
    #[arg(long = "td_min", allow_negative_numbers = true)]
    td_min: Option<f64>,
    #[arg(long = "td_max", allow_negative_numbers = true)]
    td_max: Option<f64>,
    #[arg(long = "delta_min", allow_negative_numbers = true)]
    delta_min: Option<f64>,
    #[arg(long = "delta_max", allow_negative_numbers = true)]
    delta_max: Option<f64>,
    /// Points per sweep axis (curves default 200, heatmaps 100).
    #[arg(long)]
    points: Option<usize>,
    /// Output file path.
    #[arg(long)]
    output: Option<String>,
    /// Worker threads for sweeps; 0 = automatic.
    #[arg(long)]
    threads: Option<usize>,
    /// analytic-check only: perturb one Kraus entry to verify the
    /// checks can fail.
    #[arg(long = "self-test", default_value_t = false)]
    self_test: bool,
}

impl Cli {
    fn overrides(&self) -> Overrides {
        let mut o = Overrides::default();
        o.command = self.command;
        o.sites = self.sites;
        o.epsilon = self.epsilon;
        o.gamma = self.gamma;
        o.g = self.g;
        o.delta = self.delta;
        o.t_m = self.t_m;
        o.t_f = self.t_f;
        o.t_d = self.t_d;
        o.t_offset = self.t_offset;
        o.total_time = self.total_time;
        o.sample_dt = self.sample_dt;
        o.eval_t = self.eval_t;
        o.c0_re = self.c0_re;
        o.c0_im = self.c0_im;
        o.c1_re = self.c1_re;
        o.c1_im = self.c1_im;
        o.t_min = self.t_min;
        o.t_max = self.t_max;
        o.tm_min = self.tm_min;
        o.tm_max = self.tm_max;
        o.tf_min = self.tf_min;
        o.tf_max = self.tf_max;
        o.td_min = self.td_min;
        o.td_max = self.td_max;
        o.delta_min = self.delta_min;
        o.delta_max = self.delta_max;
        o.points = self.points;
        o.output = self.output.clone();
        o.threads = self.threads;
        o.preset = self.preset.clone();
        o
    }
}

fn run(cfg: &RunConfig, self_test: bool) -> qzeno::Result<bool> {
    let out = PathBuf::from(&cfg.output);
    match cfg.command {
        Command::TraceDistance => {
            let axis = Axis::new("t_m", cfg.tm_min, cfg.tm_max, cfg.points)?;
            let rows = curve_trace_distance(cfg.delta, &cfg.qubit, &axis.values())?;
            let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.1)).collect();
            let linear: Vec<f64> = rows.iter().map(|r| r.2).collect();
            let header = OutputHeader::new(cfg, "t_m,value,linear_approx");
            emit_curve(&points, Some(&linear), &header, &out)?;
        }
        Command::T1Curve => {
            let axis = Axis::new("delta", cfg.delta_min, cfg.delta_max, cfg.points)?;
            let curve = curve_t1_vs_delta(&cfg.qubit, &axis.values());
            let header = OutputHeader::new(cfg, "delta,value");
            emit_curve(&curve, None, &header, &out)?;
        }
        Command::Survival => {
            let axis = Axis::new("t", cfg.t_min, cfg.t_max, cfg.points)?;
            let shift = cfg.delta + cfg.chain.epsilon / cfg.g;
            let curves = curve_survival_during_measurement(
                cfg.g,
                &[shift, shift + 1.0, shift + 2.0],
                &axis.values(),
            )?;
            let header = OutputHeader::new(cfg, "label,t,value");
            emit_curve_family(&curves, &header, &out)?;
        }
        Command::Evolve => {
            let model = CompositeModel::new(cfg.chain, cfg.apparatus()?)?;
            let schedule = MeasurementSchedule::with_offset(
                cfg.t_m,
                cfg.t_f,
                cfg.t_offset,
                cfg.total_time,
                cfg.sample_dt,
            )?;
            let rho0 = DensityMatrix::basis_projector(cfg.chain.sites, 0)?;
            let series = run_schedule(&rho0, &schedule, &model)?;
            let header = OutputHeader::new(cfg, "t,value,segment");
            emit_series(&series, &header, &out)?;
        }
        Command::MapTTf => {
            let t_axis = Axis::new("t", cfg.t_min, cfg.t_max, cfg.points)?;
            let tf_axis = Axis::new("t_f", cfg.tf_min, cfg.tf_max, cfg.points)?;
            let map = map_t_tf(&cfg.chain, cfg.g, cfg.delta, &t_axis, &tf_axis)?;
            let header = OutputHeader::new(cfg, "t,t_f,value,masked");
            emit_heatmap(&map, &header, &out)?;
        }
        Command::MapTmTf => {
            let tm_axis = Axis::new("t_m", cfg.tm_min, cfg.tm_max, cfg.points)?;
            let tf_axis = Axis::new("t_f", cfg.tf_min, cfg.tf_max, cfg.points)?;
            let map = map_tm_tf(&cfg.chain, cfg.delta, &tm_axis, &tf_axis, cfg.eval_t)?;
            let header = OutputHeader::new(cfg, "t_m,t_f,value,masked");
            emit_heatmap(&map, &header, &out)?;
        }
        Command::MapTmTd => {
            let tm_axis = Axis::new("t_m", cfg.tm_min, cfg.tm_max, cfg.points)?;
            let td_axis = Axis::new("t_d", cfg.td_min, cfg.td_max, cfg.points)?;
            let map = map_tm_td(&cfg.chain, cfg.delta, &tm_axis, &td_axis, cfg.eval_t)?;
            let header = OutputHeader::new(cfg, "t_m,t_d,value,masked");
            emit_heatmap(&map, &header, &out)?;
        }
        Command::Repfintime => {
            let tm_axis = Axis::new("t_m", cfg.tm_min, cfg.tm_max, cfg.points)?;
            let family = curve_repfintime(
                &cfg.chain,
                cfg.delta,
                cfg.t_d(),
                &tm_axis.values(),
                cfg.total_time,
                cfg.sample_dt,
            )?;
            let header = OutputHeader::new(cfg, "label,t,value,segment");
            emit_series_family(&family, &header, &out)?;
        }
        Command::AnalyticCheck => {
            let report = analytic_check(self_test)?;
            print!("{}", report.render());
            let header = OutputHeader::new(cfg, "name,max_err,tol,pass");
            let mut body = header.render();
            for l in &report.lines {
                body.push_str(&format!(
                    "{},{},{},{}\n",
                    l.name,
                    fmt_value(l.max_err),
                    fmt_value(l.tol),
                    u8::from(l.pass())
                ));
            }
            std::fs::write(&out, body)?;
            return Ok(report.all_pass());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let file = match &cli.config {
        Some(path) => match parse_config_file(path) {
            Ok(o) => Some(o),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => None,
    };
    let cfg = match resolve(file.as_ref(), &cli.overrides()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    if cfg.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }

    match run(&cfg, cli.self_test) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(Error::ConfigError(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

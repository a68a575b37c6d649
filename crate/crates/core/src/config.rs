//! Run configuration: flat `key = value` files, figure presets, and
//! command-line overrides, resolved with precedence
//! defaults < preset < file < flags.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::analytic2::InitialQubit;
use crate::error::{Error, Result};
use crate::model::{ApparatusParams, ChainParams};

/// The nine CLI commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Trace distance to the projective result vs measurement duration.
    TraceDistance,
    /// Linear trace-distance coefficient T₁ vs δ.
    T1Curve,
    /// ρ₀₀ during a single measurement, with free-evolution references.
    Survival,
    /// Time series of ρ₀₀ˢ(t) under a repeated-measurement schedule.
    Evolve,
    /// Heatmap of ρ₀₀ˢ(t) over (t, t_f).
    MapTTf,
    /// Heatmap of ρ₀₀ˢ(eval_t) over (t_m, t_f) with g = π/t_m.
    MapTmTf,
    /// Heatmap of ρ₀₀ˢ(eval_t) over (t_m, t_d); t_d < t_m masked.
    MapTmTd,
    /// Family of time series at fixed t_d for several t_m.
    Repfintime,
    /// Self-check of numerics against closed-form results.
    AnalyticCheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::TraceDistance => "trace-distance",
            Command::T1Curve => "t1-curve",
            Command::Survival => "survival",
            Command::Evolve => "evolve",
            Command::MapTTf => "map-t-tf",
            Command::MapTmTf => "map-tm-tf",
            Command::MapTmTd => "map-tm-td",
            Command::Repfintime => "repfintime",
            Command::AnalyticCheck => "analytic-check",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trace-distance" => Ok(Command::TraceDistance),
            "t1-curve" => Ok(Command::T1Curve),
            "survival" => Ok(Command::Survival),
            "evolve" => Ok(Command::Evolve),
            "map-t-tf" => Ok(Command::MapTTf),
            "map-tm-tf" => Ok(Command::MapTmTf),
            "map-tm-td" => Ok(Command::MapTmTd),
            "repfintime" => Ok(Command::Repfintime),
            "analytic-check" => Ok(Command::AnalyticCheck),
            other => Err(Error::ConfigError(format!("unknown command '{other}'"))),
        }
    }
}

/// Every recognized configuration key, in echo order.
pub const KEYS: &[&str] = &[
    "command",
    "sites",
    "epsilon",
    "gamma",
    "g",
    "delta",
    "t_m",
    "t_f",
    "t_d",
    "t_offset",
    "total_time",
    "sample_dt",
    "eval_t",
    "c0_re",
    "c0_im",
    "c1_re",
    "c1_im",
    "t_min",
    "t_max",
    "tm_min",
    "tm_max",
    "tf_min",
    "tf_max",
    "td_min",
    "td_max",
    "delta_min",
    "delta_max",
    "points",
    "output",
    "threads",
    "preset",
];

/// One layer of settings; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub command: Option<Command>,
    pub sites: Option<usize>,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub g: Option<f64>,
    pub delta: Option<f64>,
    pub t_m: Option<f64>,
    pub t_f: Option<f64>,
    pub t_d: Option<f64>,
    pub t_offset: Option<f64>,
    pub total_time: Option<f64>,
    pub sample_dt: Option<f64>,
    pub eval_t: Option<f64>,
    pub c0_re: Option<f64>,
    pub c0_im: Option<f64>,
    pub c1_re: Option<f64>,
    pub c1_im: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub tm_min: Option<f64>,
    pub tm_max: Option<f64>,
    pub tf_min: Option<f64>,
    pub tf_max: Option<f64>,
    pub td_min: Option<f64>,
    pub td_max: Option<f64>,
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub points: Option<usize>,
    pub output: Option<String>,
    pub threads: Option<usize>,
    pub preset: Option<String>,
}

impl Overrides {
    /// Merge `other` on top of `self`.
    pub fn layered_with(mut self, other: &Overrides) -> Overrides {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(
            command, sites, epsilon, gamma, g, delta, t_m, t_f, t_d, t_offset, total_time,
            sample_dt, eval_t, c0_re, c0_im, c1_re, c1_im, t_min, t_max, tm_min, tm_max, tf_min,
            tf_max, td_min, td_max, delta_min, delta_max, points, output, threads, preset
        );
        self
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| {
                Error::ConfigError(format!("invalid value '{v}' for key '{key}'"))
            })
        }
        match key {
            "command" => self.command = Some(value.parse()?),
            "sites" => self.sites = Some(num(key, value)?),
            "epsilon" => self.epsilon = Some(num(key, value)?),
            "gamma" => self.gamma = Some(num(key, value)?),
            "g" => self.g = Some(num(key, value)?),
            "delta" => self.delta = Some(num(key, value)?),
            "t_m" => self.t_m = Some(num(key, value)?),
            "t_f" => self.t_f = Some(num(key, value)?),
            "t_d" => self.t_d = Some(num(key, value)?),
            "t_offset" => self.t_offset = Some(num(key, value)?),
            "total_time" => self.total_time = Some(num(key, value)?),
            "sample_dt" => self.sample_dt = Some(num(key, value)?),
            "eval_t" => self.eval_t = Some(num(key, value)?),
            "c0_re" => self.c0_re = Some(num(key, value)?),
            "c0_im" => self.c0_im = Some(num(key, value)?),
            "c1_re" => self.c1_re = Some(num(key, value)?),
            "c1_im" => self.c1_im = Some(num(key, value)?),
            "t_min" => self.t_min = Some(num(key, value)?),
            "t_max" => self.t_max = Some(num(key, value)?),
            "tm_min" => self.tm_min = Some(num(key, value)?),
            "tm_max" => self.tm_max = Some(num(key, value)?),
            "tf_min" => self.tf_min = Some(num(key, value)?),
            "tf_max" => self.tf_max = Some(num(key, value)?),
            "td_min" => self.td_min = Some(num(key, value)?),
            "td_max" => self.td_max = Some(num(key, value)?),
            "delta_min" => self.delta_min = Some(num(key, value)?),
            "delta_max" => self.delta_max = Some(num(key, value)?),
            "points" => self.points = Some(num(key, value)?),
            "output" => self.output = Some(value.to_string()),
            "threads" => self.threads = Some(num(key, value)?),
            "preset" => self.preset = Some(value.to_string()),
            other => return Err(Error::ConfigError(format!("unknown key '{other}'"))),
        }
        Ok(())
    }
}

/// Parse a flat `key = value` file. Lines starting with `#` are
/// comments, except that a comment of the form `# key = value` with a
/// recognized key is honored — this lets an emitted output file be fed
/// back verbatim as a config. CSV data rows always contain commas and
/// config values never do, so lines with a comma are skipped.
pub fn parse_config_text(text: &str) -> Result<Overrides> {
    let mut out = Overrides::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.contains(',') {
            continue;
        }
        let (body, from_comment) = match line.strip_prefix('#') {
            Some(rest) => (rest.trim(), true),
            None => (line, false),
        };
        let Some((key, value)) = body.split_once('=') else {
            if from_comment {
                continue;
            }
            return Err(Error::ConfigError(format!(
                "line {}: expected 'key = value', got '{raw}'",
                lineno + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        if from_comment && !KEYS.contains(&key) {
            continue;
        }
        out.set(key, value)
            .map_err(|e| Error::ConfigError(format!("line {}: {e}", lineno + 1)))?;
    }
    Ok(out)
}

pub fn parse_config_file(path: &Path) -> Result<Overrides> {
    let text = std::fs::read_to_string(path)?;
    parse_config_text(&text)
}

/// Built-in figure presets.
pub fn preset(name: &str) -> Result<Overrides> {
    let mut o = Overrides::default();
    match name {
        // trace distance to the projective result, particle on site 0
        "fig2" => {
            o.command = Some(Command::TraceDistance);
            o.sites = Some(2);
            o.delta = Some(0.0);
            o.tm_min = Some(0.005);
            o.tm_max = Some(1.0);
            o.points = Some(200);
        }
        // T₁ vs δ for the localized initial state
        "fig3" => {
            o.command = Some(Command::T1Curve);
            o.delta_min = Some(-3.0);
            o.delta_max = Some(3.0);
            o.points = Some(200);
        }
        // ρ₀₀ during one measurement, shifts 0/1/2 plus free references
        "fig4" => {
            o.command = Some(Command::Survival);
            o.sites = Some(2);
            o.g = Some(PI);
            o.delta = Some(0.0);
            o.t_min = Some(0.0);
            o.t_max = Some(1.0);
            o.points = Some(200);
        }
        // resonant Zeno map over (t, t_f)
        "fig6" | "fig6a" => {
            o.command = Some(Command::MapTTf);
            o.sites = Some(15);
            o.epsilon = Some(0.0);
            o.g = Some(100.0);
            o.delta = Some(0.0);
            o.t_min = Some(0.0);
            o.t_max = Some(5.0);
            o.tf_min = Some(0.05);
            o.tf_max = Some(5.0);
            o.points = Some(100);
        }
        // detuned companion map
        "fig6b" => {
            o = preset("fig6a")?;
            o.epsilon = Some(PI);
        }
        // final-time survival over (t_m, t_f)
        "fig7" => {
            o.command = Some(Command::MapTmTf);
            o.sites = Some(15);
            o.epsilon = Some(0.0);
            o.delta = Some(1.5);
            o.eval_t = Some(5.0);
            o.tm_min = Some(0.05);
            o.tm_max = Some(5.0);
            o.tf_min = Some(0.0);
            o.tf_max = Some(5.0);
            o.points = Some(100);
        }
        // same sweep against the measurement period t_d
        "fig8" => {
            o = preset("fig7")?;
            o.command = Some(Command::MapTmTd);
            o.td_min = Some(0.05);
            o.td_max = Some(5.0);
        }
        // fixed t_d, three measurement durations
        "fig9" => {
            o.command = Some(Command::Repfintime);
            o.sites = Some(15);
            o.epsilon = Some(0.0);
            o.delta = Some(1.5);
            o.t_d = Some(1.5);
            o.tm_min = Some(0.5);
            o.tm_max = Some(1.0);
            o.points = Some(3);
            o.total_time = Some(5.0);
            o.sample_dt = Some(0.01);
        }
        // single repeated-measurement time trace with a delayed first
        // measurement
        "repmeas" => {
            o.command = Some(Command::Evolve);
            o.sites = Some(15);
            o.epsilon = Some(0.0);
            o.g = Some(100.0);
            o.delta = Some(0.0);
            o.t_f = Some(0.5);
            o.t_offset = Some(0.5);
            o.total_time = Some(5.0);
            o.sample_dt = Some(0.01);
        }
        other => return Err(Error::ConfigError(format!("unknown preset '{other}'"))),
    }
    Ok(o)
}

/// Fully resolved and validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub chain: ChainParams,
    pub g: f64,
    pub delta: f64,
    pub t_m: f64,
    pub t_f: f64,
    pub t_offset: f64,
    pub total_time: f64,
    pub sample_dt: f64,
    pub eval_t: f64,
    pub qubit: InitialQubit,
    pub t_min: f64,
    pub t_max: f64,
    pub tm_min: f64,
    pub tm_max: f64,
    pub tf_min: f64,
    pub tf_max: f64,
    pub td_min: f64,
    pub td_max: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
    pub output: String,
    pub threads: usize,
}

impl RunConfig {
    /// Measurement period t_d = t_m + t_f.
    pub fn t_d(&self) -> f64 {
        self.t_m + self.t_f
    }

    pub fn apparatus(&self) -> Result<ApparatusParams> {
        ApparatusParams::new(self.g, self.delta, 2)
    }

    /// Resolved `key = value` pairs echoed into output headers. The
    /// echo omits `threads` (it never affects results) and `preset`
    /// (already folded in), so re-runs at any worker count are
    /// byte-identical.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut kv: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| kv.push((k.to_string(), v));
        push("command", self.command.name().to_string());
        push("sites", self.chain.sites.to_string());
        push("epsilon", self.chain.epsilon.to_string());
        push("gamma", self.chain.gamma.to_string());
        push("g", self.g.to_string());
        push("delta", self.delta.to_string());
        push("t_m", self.t_m.to_string());
        push("t_f", self.t_f.to_string());
        push("t_d", self.t_d().to_string());
        push("t_offset", self.t_offset.to_string());
        push("total_time", self.total_time.to_string());
        push("sample_dt", self.sample_dt.to_string());
        push("eval_t", self.eval_t.to_string());
        push("c0_re", self.qubit.c0.re.to_string());
        push("c0_im", self.qubit.c0.im.to_string());
        push("c1_re", self.qubit.c1.re.to_string());
        push("c1_im", self.qubit.c1.im.to_string());
        push("t_min", self.t_min.to_string());
        push("t_max", self.t_max.to_string());
        push("tm_min", self.tm_min.to_string());
        push("tm_max", self.tm_max.to_string());
        push("tf_min", self.tf_min.to_string());
        push("tf_max", self.tf_max.to_string());
        push("td_min", self.td_min.to_string());
        push("td_max", self.td_max.to_string());
        push("delta_min", self.delta_min.to_string());
        push("delta_max", self.delta_max.to_string());
        push("points", self.points.to_string());
        push("output", self.output.clone());
        kv
    }
}

fn defaults() -> Overrides {
    let mut o = Overrides::default();
    o.sites = Some(2);
    o.epsilon = Some(0.0);
    o.gamma = Some(1.0);
    o.delta = Some(0.0);
    o.t_f = Some(0.5);
    o.t_offset = Some(0.0);
    o.total_time = Some(5.0);
    o.sample_dt = Some(0.01);
    o.eval_t = Some(5.0);
    o.c0_re = Some(1.0);
    o.c0_im = Some(0.0);
    o.c1_re = Some(0.0);
    o.c1_im = Some(0.0);
    o.t_min = Some(0.0);
    o.t_max = Some(5.0);
    o.tm_min = Some(0.05);
    o.tm_max = Some(5.0);
    o.tf_min = Some(0.0);
    o.tf_max = Some(5.0);
    o.td_min = Some(0.05);
    o.td_max = Some(5.0);
    o.delta_min = Some(-3.0);
    o.delta_max = Some(3.0);
    o.output = Some("out.csv".to_string());
    o.threads = Some(0);
    o
}

/// Resolve defaults < preset < file < flags into a validated RunConfig.
pub fn resolve(file: Option<&Overrides>, flags: &Overrides) -> Result<RunConfig> {
    // the preset may be named in the file or on the command line
    let preset_name = flags
        .preset
        .clone()
        .or_else(|| file.and_then(|f| f.preset.clone()));
    let mut merged = defaults();
    if let Some(name) = &preset_name {
        merged = merged.layered_with(&preset(name)?);
    }
    if let Some(f) = file {
        merged = merged.layered_with(f);
    }
    merged = merged.layered_with(flags);

    let command = merged
        .command
        .ok_or_else(|| Error::ConfigError("missing required key 'command'".into()))?;

    // t_m and g are linked through the half-period condition g t_m = π;
    // an explicit t_m wins, otherwise t_m follows from g
    // both given (e.g. a header echo fed back): keep both verbatim so
    // round trips are bit-exact
    let (g, t_m) = match (merged.t_m, merged.g) {
        (Some(tm), _) | (_, Some(tm)) if tm <= 0.0 || !tm.is_finite() => {
            return Err(Error::ConfigError(format!("g and t_m must be > 0, got {tm}")));
        }
        (Some(tm), Some(g)) => (g, tm),
        (Some(tm), None) => (PI / tm, tm),
        (None, Some(g)) => (g, PI / g),
        (None, None) => (PI, 1.0),
    };

    // t_d, when given, determines t_f
    let t_f = match merged.t_d {
        Some(td) => {
            if td < t_m {
                return Err(Error::ConfigError(format!(
                    "t_d must be ≥ t_m (got t_d = {td}, t_m = {t_m})"
                )));
            }
            td - t_m
        }
        None => merged.t_f.expect("defaulted"),
    };

    let chain = ChainParams::new(
        merged.sites.expect("defaulted"),
        merged.epsilon.expect("defaulted"),
        merged.gamma.expect("defaulted"),
    )
    .map_err(|e| Error::ConfigError(e.to_string()))?;
    ApparatusParams::new(g, merged.delta.expect("defaulted"), 2)
        .map_err(|e| Error::ConfigError(e.to_string()))?;

    let qubit = InitialQubit::new(
        C64::new(merged.c0_re.expect("defaulted"), merged.c0_im.expect("defaulted")),
        C64::new(merged.c1_re.expect("defaulted"), merged.c1_im.expect("defaulted")),
    )
    .map_err(|e| Error::ConfigError(e.to_string()))?;

    let points = merged.points.unwrap_or(match command {
        Command::MapTTf | Command::MapTmTf | Command::MapTmTd => 100,
        _ => 200,
    });
    if points < 2 {
        return Err(Error::ConfigError(format!("points must be ≥ 2, got {points}")));
    }

    let cfg = RunConfig {
        command,
        chain,
        g,
        delta: merged.delta.expect("defaulted"),
        t_m,
        t_f,
        t_offset: merged.t_offset.expect("defaulted"),
        total_time: merged.total_time.expect("defaulted"),
        sample_dt: merged.sample_dt.expect("defaulted"),
        eval_t: merged.eval_t.expect("defaulted"),
        qubit,
        t_min: merged.t_min.expect("defaulted"),
        t_max: merged.t_max.expect("defaulted"),
        tm_min: merged.tm_min.expect("defaulted"),
        tm_max: merged.tm_max.expect("defaulted"),
        tf_min: merged.tf_min.expect("defaulted"),
        tf_max: merged.tf_max.expect("defaulted"),
        td_min: merged.td_min.expect("defaulted"),
        td_max: merged.td_max.expect("defaulted"),
        delta_min: merged.delta_min.expect("defaulted"),
        delta_max: merged.delta_max.expect("defaulted"),
        points,
        output: merged.output.expect("defaulted"),
        threads: merged.threads.expect("defaulted"),
    };

    for (name, v) in [
        ("total_time", cfg.total_time),
        ("sample_dt", cfg.sample_dt),
    ] {
        if !(v > 0.0) {
            return Err(Error::ConfigError(format!("{name} must be > 0, got {v}")));
        }
    }
    for (name, lo, hi) in [
        ("t", cfg.t_min, cfg.t_max),
        ("t_m", cfg.tm_min, cfg.tm_max),
        ("t_f", cfg.tf_min, cfg.tf_max),
        ("t_d", cfg.td_min, cfg.td_max),
        ("delta", cfg.delta_min, cfg.delta_max),
    ] {
        if !(lo < hi) {
            return Err(Error::ConfigError(format!(
                "{name} axis: min {lo} must be < max {hi}"
            )));
        }
    }
    if cfg.t_f < 0.0 || cfg.t_offset < 0.0 || cfg.eval_t < 0.0 {
        return Err(Error::ConfigError("times must be ≥ 0".into()));
    }
    Ok(cfg)
}

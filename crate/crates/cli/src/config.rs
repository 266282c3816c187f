//! Run configuration: a flat `key = value` file merged with command-line
//! overrides, validated up front.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use bql_core::data::{Gaussian, ModeTerm};
use bql_core::dynamics::step_count;
use bql_core::norms::SobolevIndices;
use bql_core::GridSpec;

use crate::error::CliError;

/// Environment variable read when no `threads` key is given.
pub const THREADS_ENV: &str = "BQL_THREADS";

const KNOWN_KEYS: &[&str] = &[
    "nx",
    "ny",
    "lx",
    "ly",
    "dealias",
    "s",
    "data",
    "center_x",
    "center_y",
    "width",
    "amplitude",
    "modes",
    "snapshot",
    "jmax",
    "t_final",
    "dt",
    "nt",
    "tol",
    "max_iter",
    "out",
    "seed",
    "threads",
    "save_every",
    "trajectory",
    "component",
    "family",
    "beta",
    "times",
    "delta",
    "samples",
    "m",
    "p",
    "lambdas",
    "k",
    "r_min",
    "r_max",
    "points",
];

/// Keys that do not influence artifact contents.
const UNHASHED_KEYS: &[&str] = &["out", "threads"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Simulate,
    Picard,
    Norms,
    VerifyEstimates,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Simulate => "simulate",
            Subcommand::Picard => "picard",
            Subcommand::Norms => "norms",
            Subcommand::VerifyEstimates => "verify-estimates",
        }
    }
}

impl FromStr for Subcommand {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "simulate" => Ok(Subcommand::Simulate),
            "picard" => Ok(Subcommand::Picard),
            "norms" => Ok(Subcommand::Norms),
            "verify-estimates" => Ok(Subcommand::VerifyEstimates),
            other => Err(CliError::Config(format!("unknown subcommand `{other}`"))),
        }
    }
}

/// Estimate families of `verify-estimates`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Decay,
    Strichartz,
    Smoothing,
    Maximal,
    Bessel,
    Leibniz,
    Vdc,
    HEnvelope,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Decay,
        Family::Strichartz,
        Family::Smoothing,
        Family::Maximal,
        Family::Bessel,
        Family::Leibniz,
        Family::Vdc,
        Family::HEnvelope,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Decay => "decay",
            Family::Strichartz => "strichartz",
            Family::Smoothing => "smoothing",
            Family::Maximal => "maximal",
            Family::Bessel => "bessel",
            Family::Leibniz => "leibniz",
            Family::Vdc => "vdc",
            Family::HEnvelope => "h-envelope",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| CliError::Config(format!("family: unknown estimate family `{s}`")))
    }
}

/// Initial data of `simulate` and `picard`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Zero,
    Gaussian(Gaussian),
    Modes(Vec<ModeTerm>),
    /// Random real `(eta, Phi)` on `0 < |j| <= jmax`, scaled by `amplitude`.
    Random {
        jmax: f64,
        amplitude: f64,
    },
    Snapshot(PathBuf),
}

/// Parameters of `verify-estimates`; `None` means the family default.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateParams {
    pub beta: f64,
    pub times: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub samples: usize,
    pub m: Option<f64>,
    pub p: f64,
    pub lambdas: Option<Vec<f64>>,
    pub k: u32,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub points: usize,
    pub jmax: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub grid: GridSpec,
    pub indices: SobolevIndices,
    pub data: InitialData,
    pub t_final: f64,
    pub dt: f64,
    pub nt: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub out: PathBuf,
    pub seed: u64,
    pub threads: usize,
    pub save_every: usize,
    pub trajectory: Option<PathBuf>,
    pub component: usize,
    pub family: Option<Family>,
    pub estimate: EstimateParams,
    entries: BTreeMap<String, String>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

/// Parses `--key value` pairs.
pub fn parse_overrides(args: &[String]) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| CliError::Config(format!("expected `--key value`, found `{flag}`")))?;
        if let Some((k, v)) = key.split_once('=') {
            out.insert(k.to_string(), v.to_string());
            continue;
        }
        let value = it
            .next()
            .ok_or_else(|| CliError::Config(format!("{key}: missing value")))?;
        out.insert(key.to_string(), value.clone());
    }
    Ok(out)
}

struct Entries<'a>(&'a BTreeMap<String, String>);

impl Entries<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::Config(format!("{key}: cannot parse `{v}`")))
            })
            .transpose()
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.opt(key)?.unwrap_or(default))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("{key}: cannot parse `{x}` as a number")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

fn parse_modes(text: &str) -> Result<Vec<ModeTerm>, CliError> {
    text.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|term| {
            let parts: Vec<&str> = term.split(':').map(str::trim).collect();
            let bad = || CliError::Config(format!("modes: `{term}` is not jx:jy:eta:phi:phase"));
            if parts.len() != 5 {
                return Err(bad());
            }
            Ok(ModeTerm {
                jx: parts[0].parse().map_err(|_| bad())?,
                jy: parts[1].parse().map_err(|_| bad())?,
                eta: parts[2].parse().map_err(|_| bad())?,
                phi: parts[3].parse().map_err(|_| bad())?,
                phase: parts[4].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

fn check(ok: bool, key: &str, message: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("{key}: {message}")))
    }
}

impl RunConfig {
    /// Builds and validates a configuration from file entries with
    /// overrides applied on top.
    pub fn from_entries(
        subcommand: Subcommand,
        file: BTreeMap<String, String>,
        overrides: BTreeMap<String, String>,
    ) -> Result<Self, CliError> {
        let mut entries = file;
        entries.extend(overrides);
        if let Some(bad) = entries.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(CliError::Config(format!("{bad}: unknown key")));
        }
        let e = Entries(&entries);

        let nx: usize = e.get("nx", 64)?;
        let ny: usize = e.get("ny", nx)?;
        let lx: f64 = e.get("lx", 20.0)?;
        let ly: f64 = e.get("ly", lx)?;
        let grid = GridSpec::new(nx, ny, lx, ly).with_dealias(e.get("dealias", 2.0 / 3.0)?);
        grid.validate()
            .map_err(|err| CliError::Config(format!("grid: {err}")))?;
        let indices = SobolevIndices::new(e.get("s", 1.6)?)
            .map_err(|err| CliError::Config(format!("s: {err}")))?;

        let data = match e.raw("data").unwrap_or("gaussian") {
            "zero" => InitialData::Zero,
            "gaussian" => {
                let g = Gaussian {
                    center: (e.get("center_x", 0.5 * lx)?, e.get("center_y", 0.5 * ly)?),
                    width: e.get("width", 1.5)?,
                    amplitude: e.get("amplitude", 0.01)?,
                };
                g.validate()
                    .map_err(|err| CliError::Config(format!("data: {err}")))?;
                InitialData::Gaussian(g)
            }
            "modes" => {
                let text = e
                    .raw("modes")
                    .ok_or_else(|| CliError::Config("modes: required when data = modes".into()))?;
                InitialData::Modes(parse_modes(text)?)
            }
            "random" => InitialData::Random {
                jmax: e.get("jmax", 8.0)?,
                amplitude: e.get("amplitude", 0.01)?,
            },
            "snapshot" => {
                InitialData::Snapshot(PathBuf::from(e.raw("snapshot").ok_or_else(|| {
                    CliError::Config("snapshot: required when data = snapshot".into())
                })?))
            }
            other => {
                return Err(CliError::Config(format!(
                    "data: `{other}` is not one of zero, gaussian, modes, random, snapshot"
                )))
            }
        };

        let threads = match e.opt::<usize>("threads")? {
            Some(n) => n,
            None => match std::env::var(THREADS_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| {
                    CliError::Config(format!("threads: {THREADS_ENV} = `{v}` is not a count"))
                })?,
                Err(_) => 1,
            },
        };

        let estimate = EstimateParams {
            beta: e.get("beta", 0.0)?,
            times: e.list("times")?,
            delta: e.opt("delta")?,
            samples: e.get("samples", 8)?,
            m: e.opt("m")?,
            p: e.get("p", 2.0)?,
            lambdas: e.list("lambdas")?,
            k: e.get("k", 0)?,
            r_min: e.opt("r_min")?,
            r_max: e.opt("r_max")?,
            points: e.get("points", 41)?,
            jmax: e.get("jmax", 8.0)?,
        };

        let cfg = RunConfig {
            subcommand,
            grid,
            indices,
            data,
            t_final: e.get("t_final", 1.0)?,
            dt: e.get("dt", 0.01)?,
            nt: e.get("nt", 200)?,
            tol: e.get("tol", 1e-12)?,
            max_iter: e.get("max_iter", 50)?,
            out: PathBuf::from(e.raw("out").unwrap_or(".")),
            seed: e.get("seed", 0)?,
            threads,
            save_every: e.get("save_every", 1)?,
            trajectory: e.raw("trajectory").map(PathBuf::from),
            component: e.get("component", 0)?,
            family: e.opt("family")?,
            estimate,
            entries: entries.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        check(self.threads >= 1, "threads", "must be at least 1")?;
        check(self.save_every >= 1, "save_every", "must be at least 1")?;
        match self.subcommand {
            Subcommand::Simulate => {
                step_count(self.t_final, self.dt)
                    .map_err(|err| CliError::Config(format!("dt: {err}")))?;
            }
            Subcommand::Picard => {
                check(
                    self.t_final > 0.0 && self.t_final.is_finite(),
                    "t_final",
                    "must be positive",
                )?;
                check(
                    self.nt >= 2 && self.nt.is_multiple_of(2),
                    "nt",
                    "must be even and at least 2",
                )?;
                check(self.max_iter >= 1, "max_iter", "must be at least 1")?;
                check(self.tol > 0.0, "tol", "must be positive")?;
            }
            Subcommand::Norms => {
                check(self.trajectory.is_some(), "trajectory", "required by norms")?;
                check(self.component < 4, "component", "must be below 4")?;
            }
            Subcommand::VerifyEstimates => self.validate_estimates()?,
        }
        if let InitialData::Random { jmax, amplitude } = self.data {
            check(jmax > 0.0, "jmax", "must be positive")?;
            check(amplitude.is_finite(), "amplitude", "must be finite")?;
        }
        Ok(())
    }

    fn validate_estimates(&self) -> Result<(), CliError> {
        let Some(family) = self.family else {
            return Err(CliError::Config(
                "family: required by verify-estimates".into(),
            ));
        };
        let est = &self.estimate;
        let positive = |key: &str, v: &Option<Vec<f64>>| match v {
            Some(xs) => check(
                !xs.is_empty() && xs.iter().all(|x| *x > 0.0 && x.is_finite()),
                key,
                "must be a list of positive numbers",
            ),
            None => Ok(()),
        };
        match family {
            Family::Decay => {
                check(
                    (0.0..=1.0).contains(&est.beta),
                    "beta",
                    "must lie in [0, 1]",
                )?;
                positive("times", &est.times)?;
                if let Some(t) = &est.times {
                    check(t.len() >= 4, "times", "needs at least 4 values")?;
                    check(
                        t.windows(2).all(|w| w[1] > w[0]),
                        "times",
                        "must be increasing",
                    )?;
                }
            }
            Family::Strichartz | Family::Smoothing | Family::Maximal => {
                step_count(self.t_final, self.dt)
                    .map_err(|err| CliError::Config(format!("dt: {err}")))?;
                check(est.samples >= 1, "samples", "must be at least 1")?;
                if let Some(d) = est.delta {
                    check((0.0..0.5).contains(&d), "delta", "must lie in [0, 1/2)")?;
                }
            }
            Family::Bessel | Family::HEnvelope => {
                check(est.points >= 2, "points", "must be at least 2")?;
                check(est.m.is_none_or(|m| m >= 0.0), "m", "must be >= 0")?;
                check(
                    family != Family::HEnvelope || est.k <= 2,
                    "k",
                    "must be 0, 1 or 2",
                )?;
                if let (Some(a), Some(b)) = (est.r_min, est.r_max) {
                    check(b > a, "r_max", "must exceed r_min")?;
                }
            }
            Family::Leibniz => {
                check(est.samples >= 1, "samples", "must be at least 1")?;
                check(
                    est.m.is_none_or(|m| m > 0.0 && m < 1.0),
                    "m",
                    "must lie in (0, 1)",
                )?;
                check(
                    est.p > 1.0 && est.p.is_finite(),
                    "p",
                    "must lie in (1, inf)",
                )?;
            }
            Family::Vdc => positive("lambdas", &est.lambdas)?,
        }
        Ok(())
    }

    /// SHA-256 of the subcommand and every artifact-relevant entry.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.subcommand.name().as_bytes());
        h.update(b"\n");
        for (k, v) in &self.entries {
            if !UNHASHED_KEYS.contains(&k.as_str()) {
                h.update(format!("{k}={v}\n").as_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

//! Plain-text `key = value` experiment configs and their resolution against
//! profile defaults and command-line overrides.

use std::collections::BTreeMap;
use std::path::Path;

use latcub::pde::{Method, ReferenceShift, UqConfig};
use latcub::report::format_f64;
use latcub::studies::Integrand;
use latcub::{Error, Result};

/// Coarse run-size presets. `Ci` finishes on a laptop within the documented
/// budgets; `Full` reproduces the larger published setup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Profile {
    Ci,
    Full,
}

/// Parsed but not yet interpreted config file: ordered `key = value` pairs
/// with duplicates rejected at parse time and unknown keys rejected when a
/// study finishes consuming what it understands.
#[derive(Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                ))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "line {}: empty key or value",
                    lineno + 1
                )));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(Error::InvalidConfig(format!(
                    "line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
        }
        Ok(RawConfig { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::InvalidConfig(msg) => {
                Error::InvalidConfig(format!("{}: {msg}", path.display()))
            }
            other => other,
        })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| {
                Error::InvalidConfig(format!("key `{key}`: cannot parse `{v}`"))
            }),
        }
    }

    fn take_list<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .split([',', ' '])
                .filter(|f| !f.is_empty())
                .map(|f| {
                    f.parse::<T>().map_err(|_| {
                        Error::InvalidConfig(format!("key `{key}`: cannot parse `{f}`"))
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    /// Errors if any keys were never consumed, so typos cannot silently
    /// fall back to defaults.
    fn finish(self) -> Result<()> {
        if let Some(key) = self.entries.keys().next() {
            return Err(Error::InvalidConfig(format!("unknown config key `{key}`")));
        }
        Ok(())
    }
}

fn pow2_schedule(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|m| 1u64 << m).collect()
}

fn join_u64(values: &[u64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone)]
pub struct OnedSettings {
    pub schedule: Vec<u64>,
    pub integrand: Integrand,
    pub seed: u64,
}

impl OnedSettings {
    pub fn resolve(profile: Profile, mut raw: RawConfig, seed_flag: Option<u64>) -> Result<Self> {
        let default_hi = match profile {
            Profile::Ci => 10,
            Profile::Full => 13,
        };
        let schedule = raw
            .take_list::<u64>("schedule")?
            .unwrap_or_else(|| pow2_schedule(3, default_hi));
        let integrand = match raw.take("integrand") {
            Some(name) => Integrand::from_name(&name)?,
            None => Integrand::Exp,
        };
        let seed = seed_flag.or(raw.take_parsed::<u64>("seed")?).unwrap_or(0);
        raw.finish()?;
        Ok(OnedSettings {
            schedule,
            integrand,
            seed,
        })
    }

    pub fn canonical(&self) -> String {
        format!(
            "study=oned;integrand={};schedule={};seed={}",
            self.integrand.name(),
            join_u64(&self.schedule),
            self.seed
        )
    }
}

#[derive(Debug, Clone)]
pub struct Wce2dSettings {
    pub schedule: Vec<u64>,
    pub seed: u64,
}

impl Wce2dSettings {
    pub fn resolve(profile: Profile, mut raw: RawConfig, seed_flag: Option<u64>) -> Result<Self> {
        // The published study stops at 2^10, the span of the shipped
        // generating vector, so both profiles share the schedule.
        let _ = profile;
        let schedule = raw
            .take_list::<u64>("schedule")?
            .unwrap_or_else(|| pow2_schedule(2, 10));
        let seed = seed_flag.or(raw.take_parsed::<u64>("seed")?).unwrap_or(1);
        raw.finish()?;
        Ok(Wce2dSettings { schedule, seed })
    }

    pub fn canonical(&self) -> String {
        format!(
            "study=wce2d;schedule={};seed={}",
            join_u64(&self.schedule),
            self.seed
        )
    }
}

#[derive(Debug, Clone)]
pub struct PdeUqSettings {
    pub s_list: Vec<usize>,
    pub mesh_level: u32,
    pub schedule: Vec<u64>,
    pub r_shifts: u32,
    pub seed: u64,
    pub delta: f64,
    pub n_ref: u64,
    pub methods: Vec<Method>,
    pub reference_shift: ReferenceShift,
    pub cg_tol: f64,
}

fn parse_methods(value: &str) -> Result<Vec<Method>> {
    value
        .split([',', ' '])
        .filter(|f| !f.is_empty())
        .map(|f| match f {
            "equal" => Ok(Method::Equal),
            "kernel" => Ok(Method::Kernel),
            other => Err(Error::InvalidConfig(format!(
                "unknown method `{other}`; expected equal or kernel"
            ))),
        })
        .collect()
}

impl PdeUqSettings {
    pub fn resolve(profile: Profile, mut raw: RawConfig, seed_flag: Option<u64>) -> Result<Self> {
        let (default_s, default_level) = match profile {
            Profile::Ci => (vec![1usize, 5], 4u32),
            Profile::Full => (vec![1, 5, 20, 100], 5),
        };
        let settings = PdeUqSettings {
            s_list: raw.take_list::<usize>("s")?.unwrap_or(default_s),
            mesh_level: raw.take_parsed::<u32>("L")?.unwrap_or(default_level),
            schedule: raw
                .take_list::<u64>("schedule")?
                .unwrap_or_else(|| pow2_schedule(1, 9)),
            r_shifts: raw.take_parsed::<u32>("R")?.unwrap_or(8),
            seed: seed_flag.or(raw.take_parsed::<u64>("seed")?).unwrap_or(7),
            delta: raw.take_parsed::<f64>("delta")?.unwrap_or(0.05),
            n_ref: raw.take_parsed::<u64>("n_ref")?.unwrap_or(1 << 12),
            methods: match raw.take("methods") {
                Some(v) => parse_methods(&v)?,
                None => vec![Method::Equal, Method::Kernel],
            },
            reference_shift: match raw.take("reference_shift").as_deref() {
                None | Some("matched") => ReferenceShift::Matched,
                Some("zero") => ReferenceShift::Zero,
                Some(other) => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown reference_shift `{other}`; expected matched or zero"
                    )))
                }
            },
            cg_tol: raw.take_parsed::<f64>("cg_tol")?.unwrap_or(1e-12),
        };
        raw.finish()?;
        if settings.s_list.is_empty() {
            return Err(Error::InvalidConfig("empty dimension list".into()));
        }
        // Per-dimension validity is checked by UqConfig::validate at run
        // time; the first dimension gives early feedback here.
        settings.uq_config(settings.s_list[0]).validate()?;
        Ok(settings)
    }

    pub fn uq_config(&self, s: usize) -> UqConfig {
        UqConfig {
            s,
            mesh_level: self.mesh_level,
            schedule: self.schedule.clone(),
            r_shifts: self.r_shifts,
            seed: self.seed,
            delta: self.delta,
            n_ref: self.n_ref,
            methods: self.methods.clone(),
            reference_shift: self.reference_shift,
            cg_tol: self.cg_tol,
        }
    }

    pub fn canonical(&self, s: usize) -> String {
        let methods = self
            .methods
            .iter()
            .map(|m| m.as_str())
            .collect::<Vec<_>>()
            .join(",");
        let reference = match self.reference_shift {
            ReferenceShift::Matched => "matched",
            ReferenceShift::Zero => "zero",
        };
        format!(
            "study=pde-uq;s={s};L={};schedule={};R={};seed={};delta={};n_ref={};\
             methods={methods};reference_shift={reference};cg_tol={}",
            self.mesh_level,
            join_u64(&self.schedule),
            self.r_shifts,
            self.seed,
            format_f64(self.delta),
            self.n_ref,
            format_f64(self.cg_tol),
        )
    }
}

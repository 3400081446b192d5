//! Sweep configuration and its `key = value` file format.

use crate::error::{Error, Result};
use crate::lcp::{GammaSchedule, LcpParams};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// LCP with automatic cluster count.
    Lcp,
    /// LCP with the cluster count fixed to the planted one.
    LcpN,
    Louvain,
    Newman,
    /// Count from the `B*` spectrum.
    Nbt,
    /// Count from the `W*` spectrum.
    LcpC,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Lcp,
        Method::LcpN,
        Method::Louvain,
        Method::Newman,
        Method::Nbt,
        Method::LcpC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lcp => "lcp",
            Method::LcpN => "lcp_n",
            Method::Louvain => "louvain",
            Method::Newman => "newman",
            Method::Nbt => "nbt",
            Method::LcpC => "lcp_c",
        }
    }

    /// Methods that only estimate how many clusters there are.
    pub fn count_only(self) -> bool {
        matches!(self, Method::Nbt | Method::LcpC)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub n: usize,
    pub c: usize,
    /// Expected degree held fixed across the grid.
    pub d_av: f64,
    /// Grid of `b_in − b_out` values.
    pub gaps: Vec<f64>,
    pub repetitions: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub lcp: LcpParams,
    pub output: Option<PathBuf>,
    /// Directory receiving every graph and partition of the sweep.
    pub artifacts: Option<PathBuf>,
    /// Record wall-clock runtimes; when off the column is 0 and output is
    /// reproducible byte for byte.
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n: 400,
            c: 2,
            d_av: 7.0,
            gaps: Vec::new(),
            repetitions: 10,
            methods: Method::ALL.to_vec(),
            seed: 1,
            lcp: LcpParams::default(),
            output: None,
            artifacts: None,
            timing: true,
        }
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad value {value:?} for {key}"),
    })
}

fn parse_list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(line, key, s))
        .collect()
}

impl SweepConfig {
    /// Reads `key = value` lines; `#` starts a comment. Recognized keys:
    /// `n`, `c`, `d_av`, `gaps`, `repetitions`, `methods`, `seed`, `alpha`,
    /// `delta`, `scale_total`, `scale_iters`, `gamma_max`, `output`,
    /// `artifacts`, `timing`. `gaps` is required.
    pub fn parse(text: &str) -> Result<SweepConfig> {
        let mut cfg = SweepConfig::default();
        let mut have_gaps = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected `key = value`, got {content:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" => cfg.n = parse_value(line, key, value)?,
                "c" => cfg.c = parse_value(line, key, value)?,
                "d_av" => cfg.d_av = parse_value(line, key, value)?,
                "gaps" => {
                    cfg.gaps = parse_list(line, key, value)?;
                    have_gaps = true;
                }
                "repetitions" => cfg.repetitions = parse_value(line, key, value)?,
                "methods" => cfg.methods = parse_list(line, key, value)?,
                "seed" => cfg.seed = parse_value(line, key, value)?,
                "alpha" => cfg.lcp.alpha = parse_value(line, key, value)?,
                "delta" => cfg.lcp.delta = parse_value(line, key, value)?,
                "scale_total" => cfg.lcp.scale_fraction_total = parse_value(line, key, value)?,
                "scale_iters" => cfg.lcp.scale_iterations = parse_value(line, key, value)?,
                "gamma_max" => {
                    cfg.lcp.gamma_schedule = GammaSchedule::Linear {
                        max: parse_value(line, key, value)?,
                    }
                }
                "output" => cfg.output = Some(PathBuf::from(value)),
                "artifacts" => cfg.artifacts = Some(PathBuf::from(value)),
                "timing" => cfg.timing = parse_value(line, key, value)?,
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown key {key:?}"),
                    })
                }
            }
        }
        if !have_gaps {
            return Err(Error::Parse {
                line: 0,
                msg: "missing required key \"gaps\"".into(),
            });
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c == 0 || self.n % self.c != 0 {
            return Err(Error::InvalidParameter(format!(
                "c = {} must divide n = {}",
                self.c, self.n
            )));
        }
        if self.gaps.is_empty() || self.methods.is_empty() || self.repetitions == 0 {
            return Err(Error::InvalidParameter(
                "gaps, methods and repetitions must be non-empty".into(),
            ));
        }
        for &gap in &self.gaps {
            solve_bin_bout(self.c, self.d_av, gap)?;
        }
        self.lcp.validate()
    }
}

/// `(b_in, b_out)` with `b_in − b_out = gap` and expected degree `d_av`.
pub fn solve_bin_bout(c: usize, d_av: f64, gap: f64) -> Result<(f64, f64)> {
    let c = c as f64;
    let b_in = d_av + (c - 1.0) * gap / c;
    let b_out = d_av - gap / c;
    if b_out < 0.0 {
        return Err(Error::InfeasibleGap { gap, b_out });
    }
    Ok((b_in, b_out))
}

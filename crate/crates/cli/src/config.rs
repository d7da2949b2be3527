//! Run settings: built-in profile, then an optional flat `key = value` file,
//! then command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use swarmdiff::sim::HOUR;
use swarmdiff::{SimConfig, WalkPolicy};

/// Settings that may come from a file or from flags. `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub c: Option<f64>,
    pub l: Option<f64>,
    pub v: Option<f64>,
    pub walk: Option<WalkPolicy>,
    pub dt: Option<f64>,
    pub duration: Option<f64>,
    pub msg_period: Option<f64>,
    pub msg_window: Option<f64>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub paper_scale: Option<bool>,
}

impl Overrides {
    /// Fields set in `other` win.
    pub fn merge(self, other: Overrides) -> Overrides {
        Overrides {
            n: other.n.or(self.n),
            c: other.c.or(self.c),
            l: other.l.or(self.l),
            v: other.v.or(self.v),
            walk: other.walk.or(self.walk),
            dt: other.dt.or(self.dt),
            duration: other.duration.or(self.duration),
            msg_period: other.msg_period.or(self.msg_period),
            msg_window: other.msg_window.or(self.msg_window),
            reps: other.reps.or(self.reps),
            seed: other.seed.or(self.seed),
            out: other.out.or(self.out),
            paper_scale: other.paper_scale.or(self.paper_scale),
        }
    }

    pub fn parse_file(text: &str) -> Result<Overrides> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", lineno + 1))?;
            o.set(key.trim(), value.trim())
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Overrides> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse_file(&text).with_context(|| format!("in {}", path.display()))
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| {
            v.parse::<f64>()
                .with_context(|| format!("{key}: not a number: {v}"))
        };
        match key.to_ascii_lowercase().as_str() {
            "n" => self.n = Some(value.parse().with_context(|| format!("n: {value}"))?),
            "c" => self.c = Some(num(value)?),
            "l" => self.l = Some(num(value)?),
            "v" => self.v = Some(num(value)?),
            "walk" => self.walk = Some(value.parse()?),
            "dt" => self.dt = Some(num(value)?),
            "duration" => self.duration = Some(parse_seconds(value)?),
            "msg_period" => self.msg_period = Some(parse_seconds(value)?),
            "msg_window" => self.msg_window = Some(parse_seconds(value)?),
            "reps" => self.reps = Some(value.parse().with_context(|| format!("reps: {value}"))?),
            "seed" => self.seed = Some(value.parse().with_context(|| format!("seed: {value}"))?),
            "out" => self.out = Some(PathBuf::from(value)),
            "paper_scale" => {
                self.paper_scale = Some(
                    value
                        .parse()
                        .with_context(|| format!("paper_scale: {value}"))?,
                )
            }
            other => bail!("unknown key `{other}`"),
        }
        Ok(())
    }

    pub fn sim_config(&self) -> SimConfig {
        let mut cfg = if self.paper_scale == Some(true) {
            SimConfig::full_scale()
        } else {
            SimConfig::default()
        };
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(c) = self.c {
            cfg.comm_range = c;
        }
        if let Some(l) = self.l {
            cfg.arena = l;
        }
        if let Some(v) = self.v {
            cfg.speed = v;
        }
        if let Some(w) = self.walk {
            cfg.walk = w;
        }
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if let Some(d) = self.duration {
            cfg.duration = d;
        }
        if let Some(p) = self.msg_period {
            cfg.msg_period = p;
        }
        match self.msg_window {
            Some(w) => cfg.msg_window = w,
            // A shortened run keeps emitting for as long as it lasts.
            None => cfg.msg_window = cfg.msg_window.min(cfg.duration),
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg
    }

    pub fn reps(&self) -> usize {
        self.reps.unwrap_or(if self.paper_scale == Some(true) {
            40
        } else {
            5
        })
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

/// Seconds, or hours with an `h` suffix (`72000`, `20h`, `0.5h`).
pub fn parse_seconds(s: &str) -> Result<f64> {
    let s = s.trim();
    let (num, scale) = match s.strip_suffix('h') {
        Some(rest) => (rest, HOUR),
        None => (s.strip_suffix('s').unwrap_or(s), 1.0),
    };
    let v: f64 = num
        .trim()
        .parse()
        .with_context(|| format!("not a duration: {s}"))?;
    Ok(v * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parsing() {
        let o = Overrides::parse_file(
            "# desk run\nn = 30\nC=12.5\nwalk = lw:1.8   # heavy tails\n\nduration = 10h\nseed=9\n",
        )
        .unwrap();
        assert_eq!(o.n, Some(30));
        assert_eq!(o.c, Some(12.5));
        assert_eq!(o.walk, Some(WalkPolicy::levy(1.8)));
        assert_eq!(o.duration, Some(36000.0));
        assert_eq!(o.seed, Some(9));
        assert!(o.l.is_none());
    }

    #[test]
    fn file_errors_name_the_line() {
        let e = Overrides::parse_file("n = 3\nbogus = 1\n").unwrap_err();
        assert!(format!("{e:#}").contains("line 2"), "{e:#}");
        assert!(Overrides::parse_file("n 3").is_err());
        assert!(Overrides::parse_file("c = ten").is_err());
    }

    #[test]
    fn later_layers_win() {
        let file = Overrides {
            n: Some(30),
            c: Some(5.0),
            ..Default::default()
        };
        let flags = Overrides {
            n: Some(8),
            ..Default::default()
        };
        let cfg = file.merge(flags).sim_config();
        assert_eq!(cfg.n, 8);
        assert_eq!(cfg.comm_range, 5.0);
        assert_eq!(cfg.arena, 200.0);
    }

    #[test]
    fn paper_scale_profile() {
        let o = Overrides {
            paper_scale: Some(true),
            ..Default::default()
        };
        let cfg = o.sim_config();
        assert_eq!(cfg.duration, 100.0 * HOUR);
        assert_eq!(cfg.msg_window, 50.0 * HOUR);
        assert_eq!(o.reps(), 40);
        assert_eq!(Overrides::default().reps(), 5);
    }

    #[test]
    fn short_runs_shrink_the_default_window_only() {
        let short = Overrides {
            duration: Some(1800.0),
            ..Default::default()
        };
        assert_eq!(short.sim_config().msg_window, 1800.0);
        let explicit = Overrides {
            msg_window: Some(7200.0),
            ..short
        };
        assert_eq!(explicit.sim_config().msg_window, 7200.0);
    }

    #[test]
    fn durations() {
        assert_eq!(parse_seconds("90").unwrap(), 90.0);
        assert_eq!(parse_seconds("90s").unwrap(), 90.0);
        assert_eq!(parse_seconds("1.5h").unwrap(), 5400.0);
        assert!(parse_seconds("h").is_err());
    }
}

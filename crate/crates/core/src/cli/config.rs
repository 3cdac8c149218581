//! Experiment configuration: defaults, `key=value` files and flags, in
//! increasing precedence.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::curve::{make_builtin, ArcLengthTable, CurveFamily, CurveSpec};
use crate::error::{Error, Result};
use crate::tube::TubeBackend;

/// Nodes of the arc-length table built for every experiment.
pub const TABLE_NODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Expand,
    Direct,
    Tube,
    Compare,
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Expand => "expand",
            Command::Direct => "direct",
            Command::Tube => "tube",
            Command::Compare => "compare",
            Command::Oracle => "oracle",
        }
    }

    fn uses_times(self) -> bool {
        !matches!(self, Command::Expand)
    }

    fn uses_eps(self) -> bool {
        matches!(self, Command::Tube | Command::Compare)
    }
}

/// Values that may come from a config file or the command line; `None`
/// means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub curve: Option<String>,
    pub radius: Option<f64>,
    pub axes: Option<Vec<f64>>,
    pub coeffs_file: Option<PathBuf>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub eps: Option<Vec<f64>>,
    pub backend: Option<String>,
    pub samples: Option<usize>,
    pub tmin: Option<f64>,
    pub tmax: Option<f64>,
    pub tsteps: Option<usize>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl Overrides {
    /// Parses `key=value` lines; `#` starts a comment line. Relative paths
    /// are taken relative to the file's directory.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let n = i + 1;
            let err = |message: String| Error::Parse { line: n, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<f64> {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| err(format!("field '{key}': '{v}' is not a number")))
            };
            let list = |v: &str| -> Result<Vec<f64>> { v.split(',').map(num).collect() };
            let int = |v: &str| -> Result<u64> {
                v.parse::<u64>()
                    .map_err(|_| err(format!("field '{key}': '{v}' is not a non-negative integer")))
            };
            let path = |v: &str| -> PathBuf {
                let p = PathBuf::from(v);
                match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p,
                }
            };
            match key {
                "curve" => o.curve = Some(value.to_string()),
                "radius" => o.radius = Some(num(value)?),
                "axes" => o.axes = Some(list(value)?),
                "coeffs-file" => o.coeffs_file = Some(path(value)),
                "tol" => o.tol = Some(num(value)?),
                "seed" => o.seed = Some(int(value)?),
                "eps" => o.eps = Some(list(value)?),
                "backend" => o.backend = Some(value.to_string()),
                "samples" => o.samples = Some(int(value)? as usize),
                "tmin" => o.tmin = Some(num(value)?),
                "tmax" => o.tmax = Some(num(value)?),
                "tsteps" => o.tsteps = Some(int(value)? as usize),
                "out" => o.out = Some(path(value)),
                "svg" => o.svg = Some(path(value)),
                other => return Err(err(format!("unknown field '{other}'"))),
            }
        }
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(self, other: Overrides) -> Overrides {
        Overrides {
            curve: other.curve.or(self.curve),
            radius: other.radius.or(self.radius),
            axes: other.axes.or(self.axes),
            coeffs_file: other.coeffs_file.or(self.coeffs_file),
            tol: other.tol.or(self.tol),
            seed: other.seed.or(self.seed),
            eps: other.eps.or(self.eps),
            backend: other.backend.or(self.backend),
            samples: other.samples.or(self.samples),
            tmin: other.tmin.or(self.tmin),
            tmax: other.tmax.or(self.tmax),
            tsteps: other.tsteps.or(self.tsteps),
            out: other.out.or(self.out),
            svg: other.svg.or(self.svg),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub curve: CurveFamily,
    /// Circle radius, ellipse semi-axes or torus radii.
    pub params: Vec<f64>,
    pub coeffs_file: Option<PathBuf>,
    /// Text of the coefficient file, kept so the hash covers its content.
    pub coeffs_text: Option<String>,
    pub tol: f64,
    pub seed: u64,
    pub eps: Vec<f64>,
    pub backend: TubeBackend,
    pub samples: usize,
    pub tmin: f64,
    pub tmax: f64,
    pub tsteps: usize,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

fn invalid(field: &str, message: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("field '{field}': {message}"))
}

impl ExperimentConfig {
    /// Applies defaults for `command` and validates every field.
    pub fn resolve(command: Command, o: Overrides) -> Result<Self> {
        let curve: CurveFamily = o.curve.as_deref().unwrap_or("circle").parse()?;
        let params = match curve {
            CurveFamily::Circle => {
                if o.axes.is_some() {
                    return Err(invalid("axes", "not used by the circle; use radius"));
                }
                vec![o.radius.unwrap_or(1.0)]
            }
            CurveFamily::Ellipse | CurveFamily::Trefoil => {
                if o.radius.is_some() {
                    return Err(invalid("radius", format!("not used by the {curve}; use axes")));
                }
                let axes = o.axes.clone().unwrap_or_else(|| vec![2.0, 1.0]);
                if axes.len() != 2 {
                    return Err(invalid("axes", format!("expected two values, got {}", axes.len())));
                }
                axes
            }
            CurveFamily::Custom => {
                if o.radius.is_some() || o.axes.is_some() {
                    return Err(invalid("coeffs-file", "custom curves take no radius or axes"));
                }
                Vec::new()
            }
        };
        let (coeffs_file, coeffs_text) = match (curve, o.coeffs_file) {
            (CurveFamily::Custom, Some(p)) => {
                let text = std::fs::read_to_string(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                (Some(p), Some(text))
            }
            (CurveFamily::Custom, None) => return Err(invalid("coeffs-file", "required for a custom curve")),
            (_, Some(_)) => return Err(invalid("coeffs-file", "only used with curve=custom")),
            (_, None) => (None, None),
        };
        let (tmin, tmax, tsteps) = match command {
            Command::Compare => (1e-5, 1e-1, 9),
            Command::Tube => (1e-3, 1e-1, 5),
            Command::Oracle => (1e-4, 10.0, 12),
            _ => (1e-4, 1e-1, 12),
        };
        let eps = o.eps.unwrap_or_else(|| match command {
            Command::Compare => vec![0.1, 0.05, 0.025],
            _ => vec![0.1],
        });
        let cfg = ExperimentConfig {
            command,
            curve,
            params,
            coeffs_file,
            coeffs_text,
            tol: o.tol.unwrap_or(1e-12),
            seed: o.seed.unwrap_or(0),
            eps,
            backend: o.backend.as_deref().unwrap_or("product").parse()?,
            samples: o.samples.unwrap_or(1 << 16),
            tmin: o.tmin.unwrap_or(tmin),
            tmax: o.tmax.unwrap_or(tmax),
            tsteps: o.tsteps.unwrap_or(tsteps),
            out: o.out,
            svg: o.svg,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if self.params.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(invalid("radius/axes", "values must be positive and finite"));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(invalid("tol", format!("must lie in (0, 1e-2], got {}", self.tol)));
        }
        if self.command.uses_times() {
            if !(self.tmin > 0.0 && self.tmin.is_finite()) {
                return Err(invalid("tmin", format!("must be positive, got {}", self.tmin)));
            }
            if !(self.tmax >= self.tmin && self.tmax.is_finite()) {
                return Err(invalid("tmax", format!("must be >= tmin, got {}", self.tmax)));
            }
            if self.tsteps == 0 || self.tsteps > 10_000 {
                return Err(invalid("tsteps", format!("must lie in 1..=10000, got {}", self.tsteps)));
            }
            if self.tsteps > 1 && self.tmax == self.tmin {
                return Err(invalid("tmax", "must exceed tmin when tsteps > 1"));
            }
        }
        if self.command.uses_eps() {
            if self.eps.is_empty() {
                return Err(invalid("eps", "at least one radius is required"));
            }
            if self.eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
                return Err(invalid("eps", "radii must be positive"));
            }
            if self.eps.windows(2).any(|w| w[1] >= w[0]) {
                return Err(invalid("eps", "radii must be strictly decreasing"));
            }
        }
        if self.command == Command::Tube && self.backend == TubeBackend::Qmc && self.samples < 256 {
            return Err(invalid(
                "samples",
                format!("qmc needs at least 256 samples, got {}", self.samples),
            ));
        }
        Ok(())
    }

    /// Log-spaced times from `tmin` to `tmax`.
    pub fn times(&self) -> Vec<f64> {
        if self.tsteps == 1 {
            return vec![self.tmin];
        }
        crate::numerics::geometric_grid(self.tmin, self.tmax, self.tsteps)
    }

    pub fn build_curve(&self) -> Result<(CurveSpec, ArcLengthTable)> {
        let curve = match &self.coeffs_text {
            Some(text) => {
                let c = CurveSpec::parse_custom(text)?;
                c.validate()?;
                c
            }
            None => make_builtin(self.curve, &self.params)?,
        };
        let table = ArcLengthTable::build(&curve, TABLE_NODES)?;
        Ok((curve, table))
    }

    /// Canonical text of the fields the command depends on. Output paths
    /// are excluded.
    pub fn canonical(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        let mut lines = vec![
            format!("command={}", self.command.name()),
            format!("curve={}", self.curve),
        ];
        match &self.coeffs_text {
            Some(text) => lines.push(format!(
                "coeffs_sha256={}",
                hex::encode(Sha256::digest(text.as_bytes()))
            )),
            None => lines.push(format!("params={}", join(&self.params))),
        }
        lines.push(format!("tol={:?}", self.tol));
        lines.push(format!("seed={}", self.seed));
        if self.command.uses_times() {
            lines.push(format!("tmin={:?}", self.tmin));
            lines.push(format!("tmax={:?}", self.tmax));
            lines.push(format!("tsteps={}", self.tsteps));
        }
        if self.command.uses_eps() {
            lines.push(format!("eps={}", join(&self.eps)));
        }
        if self.command == Command::Tube {
            lines.push(format!("backend={}", self.backend));
            lines.push(format!("samples={}", self.samples));
        }
        lines.join("\n") + "\n"
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_flag_precedence() {
        let file = Overrides::parse("# run\ncurve = ellipse\naxes=3,1\ntmin=1e-3\n\nseed=4\n", None).unwrap();
        let flags = Overrides {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = ExperimentConfig::resolve(Command::Direct, file.merge(flags)).unwrap();
        assert_eq!(cfg.curve, CurveFamily::Ellipse);
        assert_eq!(cfg.params, vec![3.0, 1.0]);
        assert_eq!(cfg.tmin, 1e-3);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn parse_errors_name_line_and_field() {
        let e = Overrides::parse("curve=circle\nradius=abc\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, ref message } if message.contains("radius")));
        let e = Overrides::parse("colour=red\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = Overrides::parse("no equals sign\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn validation() {
        let bad = |o: Overrides, cmd| ExperimentConfig::resolve(cmd, o).unwrap_err();
        let e = bad(
            Overrides {
                radius: Some(-1.0),
                ..Default::default()
            },
            Command::Expand,
        );
        assert!(e.is_configuration());
        bad(
            Overrides {
                eps: Some(vec![0.05, 0.1]),
                ..Default::default()
            },
            Command::Compare,
        );
        bad(
            Overrides {
                tmin: Some(1.0),
                tmax: Some(0.1),
                ..Default::default()
            },
            Command::Direct,
        );
        bad(
            Overrides {
                curve: Some("ellipse".into()),
                radius: Some(1.0),
                ..Default::default()
            },
            Command::Direct,
        );
        bad(
            Overrides {
                curve: Some("custom".into()),
                ..Default::default()
            },
            Command::Direct,
        );
        bad(
            Overrides {
                backend: Some("mc".into()),
                ..Default::default()
            },
            Command::Tube,
        );
    }

    #[test]
    fn hash_ignores_paths_but_not_values() {
        let a = ExperimentConfig::resolve(Command::Direct, Overrides::default()).unwrap();
        let b = ExperimentConfig::resolve(
            Command::Direct,
            Overrides {
                out: Some("x.csv".into()),
                ..Default::default()
            },
        )
        .unwrap();
        let c = ExperimentConfig::resolve(
            Command::Direct,
            Overrides {
                tmax: Some(0.2),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let o = Overrides::parse("coeffs-file=knot.txt\nout=/tmp/a.csv\n", Some(Path::new("/data/run"))).unwrap();
        assert_eq!(o.coeffs_file.unwrap(), PathBuf::from("/data/run/knot.txt"));
        assert_eq!(o.out.unwrap(), PathBuf::from("/tmp/a.csv"));
    }
}

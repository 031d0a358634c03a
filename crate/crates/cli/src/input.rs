//! Input file formats.
//!
//! Rationals are strings `"p/q"` or `"p"`; plain JSON integers are accepted
//! on input. Every format round-trips, and commands echo their fully
//! resolved input so `verify` can recompute an output from it alone.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use zariski_core::bdiv::BDiv;
use zariski_core::exact::serde_rat;
use zariski_core::fan::{Fan, LatticeVec, TorusDivisor};
use zariski_core::{QPolytope, Rat};

use crate::CliError;

/// A rational on the wire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rat);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_rat::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(i) => Ok(Q(Rat::from_integer(i.into()))),
            Raw::Str(s) => serde_rat::parse(&s).map(Q).map_err(serde::de::Error::custom),
        }
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn qs(xs: &[Rat]) -> Vec<Q> {
    xs.iter().cloned().map(Q).collect()
}

pub fn rats(xs: &[Q]) -> Vec<Rat> {
    xs.iter().map(|q| q.0.clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanSpec {
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

impl FanSpec {
    /// Validated fan; non-primitive rays are reduced with a warning.
    pub fn build(&self) -> Result<Fan, CliError> {
        let dim = self.rays.first().map_or(0, Vec::len);
        if self.rays.iter().any(|r| r.len() != dim) {
            return Err(CliError::input("rays have different lengths"));
        }
        if self.cones.iter().flatten().any(|&i| i >= self.rays.len()) {
            return Err(CliError::input("cone refers to a missing ray"));
        }
        let rays = self.rays.iter().cloned().map(LatticeVec::new).collect();
        let (fan, reduced) = Fan::new_reducing(rays, self.cones.clone()).map_err(CliError::geometry)?;
        for r in reduced {
            eprintln!("warning: ray {} was divided by {} to make it primitive", r.ray, r.factor);
        }
        Ok(fan)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorSpec {
    pub coeffs: Vec<Q>,
}

impl DivisorSpec {
    pub fn on(&self, fan: &Fan) -> Result<TorusDivisor, CliError> {
        if self.coeffs.len() != fan.rays().len() {
            return Err(CliError::input(format!(
                "divisor has {} coefficients but the fan has {} rays",
                self.coeffs.len(),
                fan.rays().len()
            )));
        }
        Ok(TorusDivisor::new(rats(&self.coeffs)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub curves: Vec<String>,
    pub matrix: Vec<Vec<Q>>,
    pub divisor: Vec<Q>,
}

/// A fan given inline or as a path relative to the referring file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FanRef {
    Inline(FanSpec),
    Path(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum ExprSpec {
    Closure {
        fan: FanRef,
        coeffs: Vec<Q>,
    },
    /// `-scale · h_Q` for `Q` the hull of `points`.
    Polytope {
        points: Vec<Vec<Q>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<Q>,
    },
    Sum {
        args: Vec<ExprSpec>,
    },
    Scale {
        factor: Q,
        arg: Box<ExprSpec>,
    },
    Max {
        args: Vec<ExprSpec>,
    },
    Min {
        args: Vec<ExprSpec>,
    },
}

impl ExprSpec {
    /// Replaces fan paths by their contents.
    pub fn resolve(self, base: &Path) -> Result<ExprSpec, CliError> {
        let all = |args: Vec<ExprSpec>| args.into_iter().map(|a| a.resolve(base)).collect::<Result<Vec<_>, _>>();
        Ok(match self {
            ExprSpec::Closure { fan: FanRef::Path(p), coeffs } => {
                let path = base.join(p);
                ExprSpec::Closure { fan: FanRef::Inline(read_json(&path)?), coeffs }
            }
            e @ (ExprSpec::Closure { .. } | ExprSpec::Polytope { .. }) => e,
            ExprSpec::Sum { args } => ExprSpec::Sum { args: all(args)? },
            ExprSpec::Max { args } => ExprSpec::Max { args: all(args)? },
            ExprSpec::Min { args } => ExprSpec::Min { args: all(args)? },
            ExprSpec::Scale { factor, arg } => ExprSpec::Scale { factor, arg: Box::new(arg.resolve(base)?) },
        })
    }

    /// Builds a resolved expression.
    pub fn build(&self) -> Result<BDiv, CliError> {
        let all = |args: &[ExprSpec]| args.iter().map(ExprSpec::build).collect::<Result<Vec<_>, _>>();
        match self {
            ExprSpec::Closure { fan: FanRef::Inline(f), coeffs } => {
                let fan = f.build()?;
                let d = DivisorSpec { coeffs: coeffs.clone() }.on(&fan)?;
                BDiv::closure(Arc::new(fan), d).map_err(CliError::input)
            }
            ExprSpec::Closure { fan: FanRef::Path(p), .. } => {
                Err(CliError::input(format!("unresolved fan path {p:?}")))
            }
            ExprSpec::Polytope { points, scale } => {
                let dim = points.first().map_or(0, Vec::len);
                if points.is_empty() || points.iter().any(|p| p.len() != dim) {
                    return Err(CliError::input("polytope needs points of one dimension"));
                }
                let pts: Vec<Vec<Rat>> = points.iter().map(|p| rats(p)).collect();
                let q = QPolytope::from_points(dim, &pts).map_err(CliError::input)?;
                let s = scale.as_ref().map_or_else(|| Rat::from_integer(1.into()), |q| q.0.clone());
                BDiv::polytope_nef(q, s).map_err(CliError::input)
            }
            ExprSpec::Sum { args } => BDiv::sum(all(args)?).map_err(CliError::input),
            ExprSpec::Max { args } => BDiv::max(all(args)?).map_err(CliError::input),
            ExprSpec::Min { args } => BDiv::min(all(args)?).map_err(CliError::input),
            ExprSpec::Scale { factor, arg } => Ok(BDiv::scale(factor.0.clone(), arg.build()?)),
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Directory against which relative paths inside `path` resolve.
pub fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

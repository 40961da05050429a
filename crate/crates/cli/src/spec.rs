//! Shape and ambient descriptions shared by every subcommand.
//!
//! The one-line form is `SHAPE@AMBIENT`, where `SHAPE` is `product[k:r,...]`
//! or `family{key=v,v;key=v}` and `AMBIENT` is `flat`, `round-sphere:d`,
//! `hyperbolic:d` or `conformal-flat:ID`. Formatting a parsed spec gives
//! back the canonical string.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use gwl4::ambient::{AmbientChart, Omega};
use gwl4::geometry::{Direction, Immersion, Mode, ProductChart, ProductOfSpheres, VectorField};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum ShapeKind {
    Product(Vec<(usize, f64)>),
    Chart { family: String, params: BTreeMap<String, Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Default)]
pub enum AmbientSpec {
    #[default]
    Flat,
    RoundSphere(usize),
    Hyperbolic(usize),
    ConformalFlat(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeSpec {
    pub shape: ShapeKind,
    pub ambient: AmbientSpec,
}

/// Parameter names with their default values.
pub type Defaults = &'static [(&'static str, &'static [f64])];

/// Built-in chart families and their defaults.
pub const FAMILIES: &[(&str, Defaults)] = &[
    ("sphere", &[("dim", &[4.0]), ("radius", &[1.0])]),
    ("plane", &[("ambient", &[5.0]), ("dim", &[4.0])]),
    ("ellipsoid", &[("axes", &[1.0, 1.0, 1.0, 1.0, 1.0])]),
    ("wavy-sphere", &[("amp", &[0.03]), ("freq", &[2.0])]),
];

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn number(s: &str) -> Result<f64, CliError> {
    let x: f64 = s.trim().parse().map_err(|_| usage(format!("not a number: {s:?}")))?;
    if !x.is_finite() {
        return Err(usage(format!("not a finite number: {s:?}")));
    }
    Ok(x)
}

/// Parses `k:r,k:r,...`.
pub fn parse_profile(s: &str) -> Result<Vec<(usize, f64)>, CliError> {
    s.split(',')
        .map(|item| {
            let (k, r) = item.split_once(':').ok_or_else(|| usage(format!("profile entry {item:?} is not k:r")))?;
            let k: usize = k.trim().parse().map_err(|_| usage(format!("bad sphere dimension {k:?}")))?;
            Ok((k, number(r)?))
        })
        .collect()
}

pub fn format_profile(p: &[(usize, f64)]) -> String {
    p.iter().map(|(k, r)| format!("{k}:{r}")).collect::<Vec<_>>().join(",")
}

/// Parses `key=v,v` into a parameter entry.
pub fn parse_param(s: &str) -> Result<(String, Vec<f64>), CliError> {
    let (k, v) = s.split_once('=').ok_or_else(|| usage(format!("parameter {s:?} is not key=values")))?;
    let vals = v.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
    Ok((k.trim().to_string(), vals))
}

impl fmt::Display for AmbientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmbientSpec::Flat => write!(f, "flat"),
            AmbientSpec::RoundSphere(d) => write!(f, "round-sphere:{d}"),
            AmbientSpec::Hyperbolic(d) => write!(f, "hyperbolic:{d}"),
            AmbientSpec::ConformalFlat(id) => write!(f, "conformal-flat:{id}"),
        }
    }
}

impl FromStr for AmbientSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let dim = |d: &str| -> Result<usize, CliError> {
            d.parse().ok().filter(|&d| d >= 3).ok_or_else(|| usage(format!("bad ambient dimension {d:?}")))
        };
        match s.split_once(':') {
            None if s == "flat" => Ok(AmbientSpec::Flat),
            Some(("round-sphere", d)) => Ok(AmbientSpec::RoundSphere(dim(d)?)),
            Some(("hyperbolic", d)) => Ok(AmbientSpec::Hyperbolic(dim(d)?)),
            Some(("conformal-flat", id)) => {
                if Omega::builtin(id).is_none() {
                    return Err(usage(format!(
                        "unknown conformal factor {id:?}; known: {}",
                        Omega::builtin_ids().join(", ")
                    )));
                }
                Ok(AmbientSpec::ConformalFlat(id.to_string()))
            }
            _ => Err(usage(format!("unknown ambient {s:?}"))),
        }
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            ShapeKind::Product(p) => write!(f, "product[{}]", format_profile(p))?,
            ShapeKind::Chart { family, params } => {
                write!(f, "{family}")?;
                if !params.is_empty() {
                    let body: Vec<String> = params.iter().map(|(k, v)| format!("{k}={}", join(v))).collect();
                    write!(f, "{{{}}}", body.join(";"))?;
                }
            }
        }
        write!(f, "@{}", self.ambient)
    }
}

impl FromStr for ShapeSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (shape, ambient) = match s.rsplit_once('@') {
            Some((a, b)) => (a, b.parse()?),
            None => (s, AmbientSpec::Flat),
        };
        let shape = if let Some(body) = shape.strip_prefix("product[") {
            let body = body.strip_suffix(']').ok_or_else(|| usage("unterminated product[...]"))?;
            ShapeKind::Product(parse_profile(body)?)
        } else {
            let (family, params) = match shape.split_once('{') {
                Some((fam, rest)) => {
                    let body = rest.strip_suffix('}').ok_or_else(|| usage("unterminated {...}"))?;
                    let params = body.split(';').filter(|p| !p.is_empty()).map(parse_param).collect::<Result<_, _>>()?;
                    (fam, params)
                }
                None => (shape, BTreeMap::new()),
            };
            ShapeKind::Chart { family: family.to_string(), params }
        };
        ShapeSpec::new(shape, ambient)
    }
}

/// The JSON form accepted by `--config`, mirroring the command-line flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDoc {
    pub shape: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<String>,
}

impl SpecDoc {
    pub fn into_spec(self) -> Result<ShapeSpec, CliError> {
        let ambient = self.ambient.as_deref().unwrap_or("flat").parse()?;
        let shape = match self.shape.as_str() {
            "product" => {
                let p = self.profile.ok_or_else(|| usage("a product needs a profile"))?;
                ShapeKind::Product(parse_profile(&p)?)
            }
            "builtin-chart" => {
                let family = self.family.ok_or_else(|| usage("a built-in chart needs a family"))?;
                ShapeKind::Chart { family, params: self.params }
            }
            other => return Err(usage(format!("unknown shape kind {other:?}; use product or builtin-chart"))),
        };
        ShapeSpec::new(shape, ambient)
    }
}

impl From<&ShapeSpec> for SpecDoc {
    fn from(s: &ShapeSpec) -> SpecDoc {
        let ambient = Some(s.ambient.to_string());
        match &s.shape {
            ShapeKind::Product(p) => {
                SpecDoc { shape: "product".into(), profile: Some(format_profile(p)), ambient, ..Default::default() }
            }
            ShapeKind::Chart { family, params } => SpecDoc {
                shape: "builtin-chart".into(),
                family: Some(family.clone()),
                params: params.clone(),
                ambient,
                ..Default::default()
            },
        }
    }
}

impl ShapeSpec {
    /// Validates family names and parameter keys.
    pub fn new(shape: ShapeKind, ambient: AmbientSpec) -> Result<ShapeSpec, CliError> {
        if let ShapeKind::Chart { family, params } = &shape {
            let (_, known) = FAMILIES
                .iter()
                .find(|(f, _)| f == family)
                .ok_or_else(|| usage(format!("unknown chart family {family:?}")))?;
            for key in params.keys() {
                if !known.iter().any(|(k, _)| k == key) {
                    return Err(usage(format!("family {family} has no parameter {key:?}")));
                }
            }
        }
        if let ShapeKind::Product(p) = &shape {
            if p.is_empty() {
                return Err(usage("empty profile"));
            }
        }
        Ok(ShapeSpec { shape, ambient })
    }

    fn param(&self, key: &str) -> Vec<f64> {
        let ShapeKind::Chart { family, params } = &self.shape else { return Vec::new() };
        if let Some(v) = params.get(key) {
            return v.clone();
        }
        let (_, known) = FAMILIES.iter().find(|(f, _)| f == family).expect("validated family");
        known.iter().find(|(k, _)| *k == key).map(|(_, v)| v.to_vec()).unwrap_or_default()
    }

    fn scalar(&self, key: &str) -> Result<f64, CliError> {
        match self.param(key).as_slice() {
            [x] => Ok(*x),
            v => Err(usage(format!("parameter {key} takes one value, got {}", v.len()))),
        }
    }

    fn count(&self, key: &str) -> Result<usize, CliError> {
        let x = self.scalar(key)?;
        if x.fract() != 0.0 || x < 1.0 {
            return Err(usage(format!("parameter {key} must be a positive integer")));
        }
        Ok(x as usize)
    }

    /// Dimension of the submanifold.
    pub fn dim(&self) -> Result<usize, CliError> {
        match &self.shape {
            ShapeKind::Product(p) => Ok(p.iter().map(|f| f.0).sum()),
            ShapeKind::Chart { family, .. } => match family.as_str() {
                "sphere" | "plane" => self.count("dim"),
                _ => Ok(4),
            },
        }
    }

    /// The closed-form product, when the shape is one.
    pub fn product(&self) -> Result<Option<ProductOfSpheres>, CliError> {
        match &self.shape {
            ShapeKind::Product(p) if self.dim()? == 4 => Ok(Some(ProductOfSpheres::ordered(p)?)),
            _ => Ok(None),
        }
    }

    /// Radius of each sphere factor, in chart order, for round shapes.
    pub fn round_factors(&self) -> Result<Option<Vec<f64>>, CliError> {
        Ok(match &self.shape {
            ShapeKind::Product(p) => Some(p.iter().map(|f| f.1).collect()),
            ShapeKind::Chart { family, .. } if family == "sphere" => Some(vec![self.scalar("radius")?]),
            _ => None,
        })
    }

    /// Explicit chart, padded to the ambient dimension.
    pub fn chart(&self) -> Result<ProductChart, CliError> {
        let chart = match &self.shape {
            ShapeKind::Product(p) => ProductChart::product(p)?,
            ShapeKind::Chart { family, .. } => match family.as_str() {
                "sphere" => ProductChart::sphere(self.count("dim")?, self.scalar("radius")?)?,
                "plane" => ProductChart::plane(self.count("dim")?, self.count("ambient")?)?,
                "ellipsoid" => ProductChart::ellipsoid(&self.param("axes"))?,
                "wavy-sphere" => {
                    let mode = Mode { coeff: self.scalar("amp")?, freq: vec![(0, self.scalar("freq")?)], phase: 0.0 };
                    ProductChart::sphere(4, 1.0)?.perturbed(VectorField::single(vec![mode], Direction::Radial(0)))
                }
                _ => unreachable!("validated family"),
            },
        };
        let d = chart.ambient_dim();
        match self.ambient_dim() {
            Some(a) if a < d => Err(usage(format!("the shape needs {d} ambient dimensions, ambient has {a}"))),
            Some(a) => Ok(chart.padded(a - d)),
            None => Ok(chart),
        }
    }

    fn ambient_dim(&self) -> Option<usize> {
        match self.ambient {
            AmbientSpec::RoundSphere(d) | AmbientSpec::Hyperbolic(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_flat(&self) -> bool {
        self.ambient == AmbientSpec::Flat
    }

    pub fn ambient_chart(&self, dim: usize) -> AmbientChart {
        match &self.ambient {
            AmbientSpec::Flat => AmbientChart::flat(dim),
            AmbientSpec::RoundSphere(d) => AmbientChart::round_sphere(*d),
            AmbientSpec::Hyperbolic(d) => AmbientChart::hyperbolic(*d),
            AmbientSpec::ConformalFlat(id) => {
                AmbientChart::conformally_flat(dim, Omega::builtin(id).expect("validated id"))
            }
        }
    }
}

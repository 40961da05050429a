use std::f64::consts::PI;

use gwl4::ambient::{ambient_jet, AmbientChart};
use gwl4::euler_lagrange::{critical_search, el_residual_chart, el_residual_product, SearchOptions};
use gwl4::geometry::{Immersion, ProductChart, ProductOfSpheres, QuadratureGrid};
use gwl4::invariants::{l4_full, ll4_flat, u2, u4, v4, w2, Shape};
use gwl4::renvol::HemisphereSurface;
use serde_json::{json, Value};

use crate::output::{num, nums, Cell, Report};
use crate::spec::{AmbientSpec, ShapeSpec};
use crate::CliError;

/// The eight critical products of round spheres with their exact energies,
/// radii in canonical order.
pub fn critical_products() -> Vec<(Vec<usize>, Vec<f64>, &'static str, f64)> {
    let (s2, s3, s5) = (2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt());
    let (p2, p3, p4) = (PI * PI, PI.powi(3), PI.powi(4));
    vec![
        (vec![4], vec![1.0], "64π²", 64.0 * p2),
        (vec![3, 1], vec![1.0, 1.0 / s3], "18√3π³", 18.0 * s3 * p3),
        (vec![3, 1], vec![1.0, (0.6f64).sqrt()], "8√15π³", 8.0 * 15f64.sqrt() * p3),
        (vec![2, 2], vec![1.0, 1.0], "96π²", 96.0 * p2),
        (vec![2, 1, 1], vec![1.0, 1.0 / s2, 1.0 / s2], "48π³", 48.0 * p3),
        (vec![2, 1, 1], vec![1.0, 1.0 / s2, 3.0 / 10f64.sqrt()], "(64√5/3)π³", 64.0 * s5 / 3.0 * p3),
        (vec![1, 1, 1, 1], vec![1.0; 4], "24π⁴", 24.0 * p4),
        (vec![1, 1, 1, 1], vec![1.0, 1.0, 1.0, 3.0 / s5], "(32√5/3)π⁴", 32.0 * s5 / 3.0 * p4),
    ]
}

/// The exact energy of `p` if it is one of the critical products up to
/// scale and factor order.
pub fn closed_form(p: &ProductOfSpheres) -> Option<(&'static str, f64)> {
    let canon = ProductOfSpheres::new(p.profile()).ok()?;
    let r0 = canon.radii()[0];
    let radii: Vec<f64> = canon.radii().iter().map(|r| r / r0).collect();
    critical_products()
        .into_iter()
        .find(|(d, r, _, _)| *d == canon.dims() && r.iter().zip(&radii).all(|(a, b)| (a - b).abs() <= 1e-9 * a))
        .map(|(_, _, s, v)| (s, v))
}

fn shape_inputs(r: &mut Report, spec: &ShapeSpec) {
    r.input("shape", spec.to_string());
}

fn reference(r: &mut Report, p: Option<&ProductOfSpheres>) {
    match p.and_then(closed_form) {
        Some((text, value)) => {
            r.set("closed_form_reference", true).set("closed_form", text).set("closed_form_value", num(value));
        }
        None => {
            r.set("closed_form_reference", false);
        }
    }
}

/// Quadrature grid for `chart` in the ambient of `spec`. Symmetric axes
/// collapse only when the ambient metric shares the rotations of the chart,
/// which the built-in conformal factors other than the radial ones break.
fn grid_for(spec: &ShapeSpec, chart: &ProductChart, order: usize, counts: Option<&[usize]>) -> Result<QuadratureGrid, CliError> {
    if let Some(c) = counts {
        return Ok(QuadratureGrid::with_counts(chart, c)?);
    }
    if matches!(spec.ambient, AmbientSpec::ConformalFlat(_)) {
        return Ok(QuadratureGrid::with_counts(chart, &vec![order; chart.source_dim()])?);
    }
    Ok(QuadratureGrid::new(chart, order)?)
}

pub fn invariant(spec: &ShapeSpec, order: Option<usize>, counts: Option<&[usize]>, quadrature: bool) -> Result<Report, CliError> {
    if spec.dim()? != 4 {
        return Err(CliError::Usage("the invariant needs a 4-dimensional shape".into()));
    }
    let mut r = Report::new("invariant");
    shape_inputs(&mut r, spec);
    let order = order.unwrap_or(if matches!(spec.ambient, AmbientSpec::ConformalFlat(_)) { 8 } else { 16 });
    r.input("grid", order).input("quadrature", quadrature);
    if let Some(c) = counts {
        r.input("counts", json!(c));
    }
    let product = spec.product()?;
    let chart = spec.chart()?;
    let (ll4, l4, err) = if spec.is_flat() {
        let rep = match (&product, quadrature, counts) {
            (Some(p), false, _) => ll4_flat(Shape::Product(p), order)?,
            (_, _, None) => ll4_flat(Shape::Chart(&chart), order)?,
            (_, _, Some(_)) => {
                let flat = AmbientChart::flat(chart.ambient_dim());
                let mut rep = l4_full(&chart, &flat, &grid_for(spec, &chart, order, counts)?)?;
                rep.value *= 64.0;
                rep.error_estimate *= 64.0;
                rep
            }
        };
        (Some(rep.value), rep.value / 64.0, rep.error_estimate / 64.0)
    } else {
        let ambient = spec.ambient_chart(chart.ambient_dim());
        let rep = l4_full(&chart, &ambient, &grid_for(spec, &chart, order, counts)?)?;
        (None, rep.value, rep.error_estimate)
    };
    r.value = Some(ll4.unwrap_or(l4));
    r.error_estimate = Some(err);
    r.set("ll4", ll4.map_or(Value::Null, num)).set("l4", num(l4));
    reference(&mut r, if spec.is_flat() { product.as_ref() } else { None });
    r.header = vec!["quantity".into(), "value".into()];
    if let Some(v) = ll4 {
        r.rows.push(vec!["LL4".into(), v.into()]);
    }
    r.rows.push(vec!["L4".into(), l4.into()]);
    r.rows.push(vec!["error_estimate".into(), err.into()]);
    if let Some(Value::String(s)) = r.values.get("closed_form").cloned() {
        r.rows.push(vec!["closed_form".into(), s.into()]);
    }
    Ok(r)
}

pub fn search(dims: &[usize], opt: &SearchOptions) -> Result<Report, CliError> {
    let mut r = Report::new("search");
    r.input("profile", json!(dims)).input("log_min", num(opt.log_min)).input("log_max", num(opt.log_max));
    r.input("step", num(opt.step));
    let roots = critical_search(dims, opt)?;
    r.header = ["radii", "energy", "residual_norm", "second_variation", "closed_form"].map(String::from).to_vec();
    let mut list = Vec::new();
    for c in &roots {
        let cf = closed_form(&c.shape());
        list.push(json!({
            "radii": nums(&c.radii),
            "energy": num(c.energy),
            "residual_norm": num(c.residual_norm),
            "second_variation": c.second_variation,
            "closed_form": cf.map(|x| x.0),
        }));
        let radii: Vec<String> = c.radii.iter().map(|x| crate::output::short(*x)).collect();
        let signs: String = c.second_variation.iter().map(|s| match s { 1 => '+', -1 => '-', _ => '0' }).collect();
        r.rows.push(vec![
            radii.join(";").into(),
            c.energy.into(),
            c.residual_norm.into(),
            signs.into(),
            cf.map_or("", |x| x.0).into(),
        ]);
    }
    r.value = None;
    r.set("count", roots.len()).set("roots", Value::Array(list));
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Coefficient {
    U2,
    U4,
    W2,
    V4,
}

fn default_point(n: usize) -> Vec<f64> {
    [0.9, 0.7, 1.3, 2.1][..n].to_vec()
}

fn point_for(chart: &ProductChart, point: Option<&[f64]>) -> Result<Vec<f64>, CliError> {
    let n = chart.source_dim();
    let x = point.map_or_else(|| default_point(n), <[f64]>::to_vec);
    if x.len() != n {
        return Err(CliError::Usage(format!("point needs {n} coordinates, got {}", x.len())));
    }
    Ok(x)
}

/// Components of an ambient vector along the outward radial direction of
/// each round factor, in flat ambient space.
fn outward(spec: &ShapeSpec, chart: &ProductChart, x: &[f64], v: &[f64]) -> Result<Option<Vec<f64>>, CliError> {
    let Some(radii) = spec.round_factors()? else { return Ok(None) };
    if !spec.is_flat() {
        return Ok(None);
    }
    let p = chart.evaluate(x);
    Ok(Some(
        radii
            .iter()
            .enumerate()
            .map(|(b, r)| chart.factor_block(b).map(|a| v[a] * p[a] / r).sum())
            .collect(),
    ))
}

pub fn expand(spec: &ShapeSpec, coefficient: Coefficient, point: Option<&[f64]>) -> Result<Report, CliError> {
    let mut r = Report::new("expand");
    shape_inputs(&mut r, spec);
    let chart = spec.chart()?;
    let x = point_for(&chart, point)?;
    let name = format!("{coefficient:?}").to_lowercase();
    r.input("coefficient", name.clone()).input("point", nums(&x));
    let ambient = spec.ambient_chart(chart.ambient_dim());
    let (jet, pack) = ambient_jet(&chart, &ambient, &x, 4)?;
    r.header = vec!["quantity".into(), "value".into()];
    if coefficient == Coefficient::V4 {
        let v = v4(&jet, Some(&pack))?;
        r.value = Some(v.total);
        r.set("total", num(v.total)).set("without_divergence", num(v.without_divergence)).set("divergence", num(v.divergence));
        for (k, v) in [("v4", v.total), ("without_divergence", v.without_divergence), ("divergence", v.divergence)] {
            r.rows.push(vec![k.into(), v.into()]);
        }
        return Ok(r);
    }
    let comps = match coefficient {
        Coefficient::U2 => u2(&jet),
        Coefficient::U4 => u4(&jet, Some(&pack))?,
        _ => w2(&jet, Some(&pack))?,
    };
    let amb = jet.to_ambient(&comps);
    let out = outward(spec, &chart, &x, &amb)?;
    let norm = comps.iter().map(|c| c * c).sum::<f64>().sqrt();
    r.value = Some(out.as_ref().map_or(norm, |o| o[0]));
    r.set("normal_components", nums(&comps)).set("ambient", nums(&amb)).set("norm", num(norm));
    r.set("outward", out.as_deref().map_or(Value::Null, nums));
    match &out {
        Some(o) => {
            for (b, c) in o.iter().enumerate() {
                r.rows.push(vec![format!("{name} outward[{b}]").into(), (*c).into()]);
            }
        }
        None => {
            for (a, c) in comps.iter().enumerate() {
                r.rows.push(vec![format!("{name} normal[{a}]").into(), (*c).into()]);
            }
        }
    }
    r.rows.push(vec!["norm".into(), norm.into()]);
    Ok(r)
}

pub fn renvol(n: usize, radius: f64, eps: (f64, f64), samples: usize) -> Result<Report, CliError> {
    let mut r = Report::new("renvol");
    r.input("n", n).input("radius", num(radius)).input("eps_min", num(eps.0)).input("eps_max", num(eps.1));
    r.input("samples", samples);
    let fit = HemisphereSurface::new(n, radius, n + 1)?.expansion(eps.0, eps.1, samples)?;
    r.value = Some(fit.anomaly());
    let mut coeffs = serde_json::Map::new();
    for (p, c) in fit.powers.iter().zip(&fit.power_coefficients) {
        coeffs.insert(format!("eps^{p}"), num(*c));
    }
    r.set("log_coefficient", num(fit.anomaly()))
        .set("constant", num(fit.constant()))
        .set("power_coefficients", Value::Object(coeffs))
        .set("condition", num(fit.condition))
        .set("residual_norm", num(fit.residual_norm));
    let exact = match n {
        2 => Some(("−2π", -2.0 * PI)),
        4 => Some(("π²", PI * PI)),
        _ => None,
    };
    match exact {
        Some((text, v)) => {
            r.set("closed_form_reference", true).set("closed_form", text).set("closed_form_value", num(v));
        }
        None => {
            r.set("closed_form_reference", false);
        }
    }
    r.header = vec!["quantity".into(), "value".into()];
    r.rows.push(vec![format!("L{n}").into(), fit.anomaly().into()]);
    for (p, c) in fit.powers.iter().zip(&fit.power_coefficients) {
        r.rows.push(vec![format!("eps^{p}").into(), (*c).into()]);
    }
    r.rows.push(vec!["condition".into(), fit.condition.into()]);
    r.rows.push(vec!["residual_norm".into(), fit.residual_norm.into()]);
    Ok(r)
}

pub fn residual(spec: &ShapeSpec, point: Option<&[f64]>) -> Result<Report, CliError> {
    if !spec.is_flat() {
        return Err(CliError::Usage("the residual is defined for Euclidean ambient space only".into()));
    }
    if spec.dim()? != 4 {
        return Err(CliError::Usage("the residual needs a 4-dimensional shape".into()));
    }
    let mut r = Report::new("residual");
    shape_inputs(&mut r, spec);
    let (comps, leak, frame) = if let Some(p) = spec.product()? {
        let e = el_residual_product(&p);
        (e.components.clone(), e.tangential_leak, "outward factor normals")
    } else {
        let chart = spec.chart()?;
        let x = point_for(&chart, point)?;
        r.input("point", nums(&x));
        let e = el_residual_chart(&chart, &x)?;
        (e.components.clone(), e.tangential_leak, "adapted normal frame")
    };
    let norm = comps.iter().map(|c| c * c).sum::<f64>().sqrt();
    r.value = Some(norm);
    r.set("components", nums(&comps)).set("frame", frame).set("norm", num(norm)).set("tangential_leak", num(leak));
    r.header = vec!["quantity".into(), "value".into()];
    for (a, c) in comps.iter().enumerate() {
        r.rows.push(vec![Cell::Text(format!("E[{a}]")), (*c).into()]);
    }
    r.rows.push(vec!["norm".into(), norm.into()]);
    r.rows.push(vec!["tangential_leak".into(), leak.into()]);
    Ok(r)
}

//! One function per subcommand. Each returns the rendered output and
//! whether every check it performs passed.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use toric_period::operator_algebra::{verify_annihilator_with_sign, AnnihilatorSign};
use toric_period::{
    build_series, evaluate_matrix_element, evaluate_period, gkz_operator, p1_closed_form,
    series_eval, verify_system, SpectralParams, ToricData, XSpaceOperator,
};

use crate::config::{Job, Points};
use crate::error::CliError;

pub struct Outcome {
    pub body: String,
    pub passed: bool,
}

impl Outcome {
    fn report(body: String) -> Self {
        Self { body, passed: true }
    }
}

/// `{:.16e}` gives 17 significant digits, enough to round-trip any `f64`.
pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    text
}

fn csv_table(header: Vec<String>, rows: Vec<Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&header).expect("in-memory write");
    for row in rows {
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ASCII output")
}

fn numbered(prefix: &str, count: usize) -> impl Iterator<Item = String> + '_ {
    (1..=count).map(move |i| format!("{prefix}{i}"))
}

pub fn kernel(job: &Job) -> Outcome {
    let data = &job.data;
    Outcome::report(to_json(&json!({
        "charge_matrix": data.charge.rows(),
        "kernel": data.kernel.rows(),
        "jacobian": data.jacobian,
        "integrable": data.integrable,
    })))
}

pub fn eval(job: &Job) -> Result<Outcome, CliError> {
    if !job.data.integrable {
        return Err(toric_period::Error::NotIntegrable.into());
    }
    let (n, dim) = (job.data.charge.rank(), job.data.charge.dim());
    let settings = &job.config.quadrature;
    let (mut header, points, from_y) = match job.points()? {
        Points::X(points) => (numbered("x", n).collect::<Vec<_>>(), points, false),
        Points::Y(points) => (numbered("y", dim).chain(numbered("x", n)).collect(), points, true),
    };
    header.extend(["re_psi", "im_psi", "error"].map(String::from));
    let rows = points
        .par_iter()
        .map(|p| {
            let (coords, value) = if from_y {
                let x = job.data.charge.apply(p);
                let value = evaluate_matrix_element(&job.data, &job.params, p, settings)?;
                (p.iter().chain(&x).copied().collect::<Vec<_>>(), value)
            } else {
                (p.clone(), evaluate_period(&job.data, &job.params, p, settings)?)
            };
            let mut row: Vec<String> = coords.into_iter().map(number).collect();
            row.extend([value.value.re, value.value.im, value.error_estimate].map(number));
            Ok(row)
        })
        .collect::<Result<Vec<_>, toric_period::Error>>()?;
    Ok(Outcome::report(csv_table(header, rows)))
}

pub fn series(job: &Job) -> Result<Outcome, CliError> {
    let dmax = job
        .config
        .dmax
        .as_ref()
        .ok_or_else(|| job.error("dmax", "required by the series command"))?;
    let series = build_series(&job.data, &job.params, dmax)?;
    let points = match (&job.config.grid, &job.config.x_points) {
        (None, None) => Vec::new(),
        _ => match job.points()? {
            Points::X(points) => points,
            Points::Y(_) => unreachable!("y_points excluded above"),
        },
    };
    let evaluations = points
        .iter()
        .map(|x| {
            let v = series_eval(&series, x)?;
            Ok(json!({ "x": x, "re": v.value.re, "im": v.value.im, "tail": v.tail }))
        })
        .collect::<Result<Vec<_>, toric_period::Error>>()?;
    let coefficients: Vec<_> = series
        .iter()
        .map(|(d, a)| json!({ "d": d, "re": a.re, "im": a.im }))
        .collect();
    Ok(Outcome::report(to_json(&json!({
        "dmax": dmax,
        "coefficients": coefficients,
        "evaluations": evaluations,
    }))))
}

pub fn operators(job: &Job) -> Result<Vec<XSpaceOperator>, CliError> {
    (0..job.data.charge.rank())
        .map(|alpha| gkz_operator(&job.data.charge, &job.params, alpha).map_err(CliError::from))
        .collect()
}

pub fn emit_ops(job: &Job) -> Result<Outcome, CliError> {
    Ok(Outcome::report(to_json(&operators(job)?)))
}

pub fn verify_annihilator(job: &Job, sign: AnnihilatorSign) -> Outcome {
    let results: Vec<bool> = (0..job.data.charge.rank())
        .map(|alpha| verify_annihilator_with_sign(&job.data.charge, &job.params, alpha, sign))
        .collect();
    let rows: Vec<_> = results
        .iter()
        .enumerate()
        .map(|(alpha, ok)| json!({ "alpha": alpha + 1, "annihilates": ok }))
        .collect();
    let sign_name = match sign {
        AnnihilatorSign::Minus => "minus",
        AnnihilatorSign::Plus => "plus",
    };
    Outcome {
        body: to_json(&json!({ "sign": sign_name, "results": rows })),
        passed: results.iter().all(|&ok| ok),
    }
}

pub fn verify_pde(job: &Job) -> Result<Outcome, CliError> {
    let grid = job
        .config
        .grid
        .as_ref()
        .ok_or_else(|| job.error("grid", "required by the verify-pde command"))?;
    let reports = verify_system(&job.data, &job.params, grid, &job.config.quadrature)?;
    let tolerance = job.config.pde_tolerance;
    let n = job.data.charge.rank();
    let mut header: Vec<String> = numbered("x", n).collect();
    header.extend(
        ["alpha", "h", "re_residual", "im_residual", "normalizer", "normalized_residual", "pass"]
            .map(String::from),
    );
    let rows = reports
        .iter()
        .map(|r| {
            let mut row: Vec<String> = r.x0.iter().copied().map(number).collect();
            row.push((r.alpha + 1).to_string());
            row.extend([r.h, r.residual.re, r.residual.im, r.normalizer, r.normalized_residual].map(number));
            row.push(r.passes(tolerance).to_string());
            row
        })
        .collect();
    Ok(Outcome {
        body: csv_table(header, rows),
        passed: reports.iter().all(|r| r.passes(tolerance)),
    })
}

pub fn bessel_check(job: &Job) -> Result<Outcome, CliError> {
    if job.data.charge.rows() != [vec![1, 1]] {
        return Err(job.error("charge_matrix", "bessel-check needs the P^1 data [[1, 1]]"));
    }
    let lambdas = job
        .config
        .bessel_lambdas
        .clone()
        .unwrap_or_else(|| vec![[job.config.lambda[0], job.config.lambda[1]]]);
    let xs: Vec<f64> = match job.points()? {
        Points::X(points) => points.into_iter().map(|p| p[0]).collect(),
        Points::Y(_) => return Err(job.error("y_points", "bessel-check takes x coordinates")),
    };
    let cases: Vec<([f64; 2], f64)> = lambdas.iter().flat_map(|&l| xs.iter().map(move |&x| (l, x))).collect();
    let tolerance = job.config.bessel_tolerance;
    let data = ToricData::projective_space(1)?;
    let rows = cases
        .par_iter()
        .map(|&([l1, l2], x)| {
            let params = SpectralParams::new(vec![l1, l2], job.params.c)?;
            let quad = evaluate_period(&data, &params, &[x], &job.config.quadrature)?.value;
            let oracle = p1_closed_form(l1, l2, x)?;
            let rel = (quad - oracle).norm() / oracle.norm();
            Ok((rel, [l1, l2, x, quad.re, quad.im, oracle.re, oracle.im, rel]))
        })
        .collect::<Result<Vec<_>, toric_period::Error>>()?;
    let header = ["lambda1", "lambda2", "x", "re_quad", "im_quad", "re_oracle", "im_oracle", "rel_err", "pass"]
        .map(String::from)
        .to_vec();
    let passed = rows.iter().all(|(rel, _)| *rel <= tolerance);
    let rows = rows
        .into_iter()
        .map(|(rel, values)| {
            let mut row: Vec<String> = values.into_iter().map(number).collect();
            row.push((rel <= tolerance).to_string());
            row
        })
        .collect();
    Ok(Outcome {
        body: csv_table(header, rows),
        passed,
    })
}

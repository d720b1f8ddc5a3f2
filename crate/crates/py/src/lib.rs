use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use hairlod_core::io::{compare_images as compare, read_image, Metric};
use hairlod_core::math::ScatterAngles;
use hairlod_core::scatter::{self, AggregateContext, BsdfSelector, FiberBsdfParams, PRESET_NAMES};
use hairlod_core::Rgb;

type Triple = (f64, f64, f64);

fn err(e: hairlod_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn triple(c: Rgb) -> Triple {
    (c[0], c[1], c[2])
}

fn preset(name: &str) -> PyResult<FiberBsdfParams> {
    FiberBsdfParams::preset(name).map_err(err)
}

#[pyfunction]
fn presets() -> Vec<&'static str> {
    PRESET_NAMES.to_vec()
}

/// Single-fiber BCSDF value per channel.
#[pyfunction]
fn eval_single(name: &str, theta_i: f64, phi_i: f64, theta_o: f64, phi_o: f64) -> PyResult<Triple> {
    Ok(triple(scatter::eval_single(&preset(name)?, theta_i, phi_i, theta_o, phi_o)))
}

/// Aggregated BCSDF of a thick hair with `n` crossed hairs and density `rho`.
#[pyfunction]
#[pyo3(signature = (name, n, rho, theta_i, phi_i, theta_o, phi_o, prior=false))]
#[allow(clippy::too_many_arguments)]
fn eval_aggregated(name: &str, n: f64, rho: f64, theta_i: f64, phi_i: f64, theta_o: f64, phi_o: f64, prior: bool) -> PyResult<Triple> {
    let p = preset(name)?;
    let t = scatter::build_tables(&p, scatter::DEFAULT_TABLE_SIZE).map_err(err)?;
    let ctx = AggregateContext::new(n, rho, ScatterAngles::new(theta_i, phi_i, theta_o, phi_o)).map_err(err)?;
    let v = if prior { scatter::eval_aggregated_prior(&p, &t, &ctx) } else { scatter::eval_aggregated(&p, &t, &ctx) };
    Ok(triple(v))
}

/// Rows of `(theta_d, a_F, a_B)`.
#[pyfunction]
#[pyo3(signature = (name, bins=64))]
fn attenuation_table(name: &str, bins: usize) -> PyResult<Vec<(f64, Triple, Triple)>> {
    let t = scatter::build_tables(&preset(name)?, bins).map_err(err)?;
    Ok(t.samples.iter().enumerate().map(|(i, s)| (t.bin_angle(i), triple(s.a_f), triple(s.a_b))).collect())
}

#[pyfunction]
fn estimate_density_and_n(n_total: f64, r: f64, l_w: f64, l_t: f64, l: f64) -> PyResult<(f64, f64)> {
    scatter::estimate_density_and_n(n_total, r, l_w, l_t, l).map_err(err)
}

/// Azimuthal and longitudinal profiles as lists of `(angle, r, g, b)`.
#[pyfunction]
#[pyo3(signature = (name, bsdf="single", theta_i=0.0, phi_i=0.0, n=16.0, rho=0.5, samples=180))]
#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn profile(
    name: &str,
    bsdf: &str,
    theta_i: f64,
    phi_i: f64,
    n: f64,
    rho: f64,
    samples: usize,
) -> PyResult<(Vec<(f64, f64, f64, f64)>, Vec<(f64, f64, f64, f64)>)> {
    let sel = match bsdf {
        "single" => BsdfSelector::Single,
        "marschner" => BsdfSelector::Marschner,
        "aggregated" => BsdfSelector::Aggregated { n, rho },
        "prior" => BsdfSelector::Prior { n, rho },
        other => return Err(PyValueError::new_err(format!("unknown bsdf {other:?}"))),
    };
    let p = preset(name)?;
    let t = scatter::build_tables(&p, scatter::DEFAULT_TABLE_SIZE).map_err(err)?;
    let prof = scatter::scattering_profile(&p, &t, sel, theta_i, phi_i, samples, samples).map_err(err)?;
    let rows = |v: &[scatter::ProfileSample]| v.iter().map(|s| (s.angle, s.intensity[0], s.intensity[1], s.intensity[2])).collect();
    Ok((rows(&prof.azimuthal), rows(&prof.longitudinal)))
}

/// PSNR (dB) or MAE between two PFM/PNG images.
#[pyfunction]
#[pyo3(signature = (a, b, metric="psnr"))]
fn compare_images(a: PathBuf, b: PathBuf, metric: &str) -> PyResult<f64> {
    let m = match metric {
        "psnr" => Metric::Psnr,
        "mae" => Metric::Mae,
        other => return Err(PyValueError::new_err(format!("unknown metric {other:?}"))),
    };
    compare(&read_image(&a).map_err(err)?, &read_image(&b).map_err(err)?, m).map_err(err)
}

#[pymodule]
#[pyo3(name = "hairlod")]
fn hairlod_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(eval_single, m)?)?;
    m.add_function(wrap_pyfunction!(eval_aggregated, m)?)?;
    m.add_function(wrap_pyfunction!(attenuation_table, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_density_and_n, m)?)?;
    m.add_function(wrap_pyfunction!(profile, m)?)?;
    m.add_function(wrap_pyfunction!(compare_images, m)?)?;
    Ok(())
}

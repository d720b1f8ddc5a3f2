use std::f64::consts::PI;

use hairlod::render::*;
use hairlod::scatter::{eval_single, FiberBsdfParams};
use hairlod::{Rgb, Vec3};

fn white_lobes(scale: f64) -> FiberBsdfParams {
    let mut p = FiberBsdfParams::preset("blonde").unwrap();
    p.a_r = Rgb::splat(0.2 * scale);
    p.a_tt = Rgb::splat(0.5 * scale);
    p.a_d = Rgb::splat(0.3 * scale);
    p
}

/// Directional albedo by midpoint quadrature: outgoing power per unit
/// incident power for light at inclination `theta_i`.
fn quadrature_albedo(p: &FiberBsdfParams, theta_i: f64) -> f64 {
    let (nt, np) = (400, 400);
    let (dt, dp) = (PI / nt as f64, 2.0 * PI / np as f64);
    let mut acc = 0.0;
    for a in 0..nt {
        let to = -PI / 2.0 + (a as f64 + 0.5) * dt;
        let w = to.cos().powi(2) * dt * dp;
        for b in 0..np {
            let po = -PI + (b as f64 + 0.5) * dp;
            acc += eval_single(p, theta_i, 0.0, to, po).luminance() * w;
        }
    }
    acc
}

/// Outgoing radiant power of the scene lit by its lights: radiant intensity
/// from distant cameras on a Fibonacci sphere, integrated over directions.
fn outgoing_power(scene: &Scene, p: &FiberBsdfParams, half: f64, dirs: usize, size: u32, spp: u32) -> f64 {
    let dist = 200.0 * half;
    let fov = 2.0 * (half / dist).atan();
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut total = 0.0;
    for k in 0..dirs {
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / dirs as f64;
        let s = (1.0 - z * z).sqrt();
        let a = golden * k as f64;
        let w = Vec3::new(s * a.cos(), s * a.sin(), z);
        let up = if w.y.abs() < 0.9 { Vec3::y() } else { Vec3::x() };
        let cam = Camera::new(w * dist, Vec3::zeros(), up, fov, size, size);
        let img = render_path_trace(scene, &cam, p, spp, DEFAULT_MAX_BOUNCES, k as u64).unwrap();
        let pix = 2.0 * half / size as f64;
        total += img.pixels().map(Rgb::luminance).sum::<f64>() * pix * pix;
    }
    total * 4.0 * PI / dirs as f64
}

#[test]
fn single_fiber_power_matches_quadrature_albedo() {
    let p = white_lobes(1.0);
    let (len, w) = (1.0, 0.02);
    for theta_i in [0.0f64, 0.6] {
        let light = Vec3::new(theta_i.sin(), 0.0, theta_i.cos());
        let seg = Segment::single(Vec3::new(-0.5 * len, 0.0, 0.0), Vec3::new(0.5 * len, 0.0, 0.0), Vec3::x(), Vec3::x(), w, 0);
        let scene = Scene::new(vec![seg], vec![DirLight::new(light, Rgb::ONE)], None, Rgb::ZERO, w / 2.0).unwrap();
        let injected = w * len * theta_i.cos();
        let ratio = outgoing_power(&scene, &p, 0.6, 256, 48, 4) / injected;
        let albedo = quadrature_albedo(&p, theta_i);
        eprintln!("theta_i {theta_i}: traced {ratio:.4} quadrature {albedo:.4}");
        assert!((ratio / albedo - 1.0).abs() < 0.05, "{ratio} vs {albedo}");
    }
    // the longitudinal Gaussian is normalized in theta_h, so a lossless lobe set
    // reflects more than it receives at normal incidence
    assert!(quadrature_albedo(&p, 0.0) > 1.0);
}

#[test]
fn bundle_energy_within_injected_after_albedo_closure() {
    let raw = white_lobes(1.0);
    let peak = (0..=16).map(|k| quadrature_albedo(&raw, k as f64 * PI / 32.0)).fold(0.0, f64::max);
    let p = white_lobes(1.0 / peak);
    let b = BundleParams::default();
    let light = Lighting::Toplit.light();
    let scene = Scene::new(bundle_instance(&b, 5).unwrap(), vec![light], None, Rgb::ZERO, b.radius).unwrap();

    // injected power: lit cross-section seen from the light
    let half = 0.625 * b.length;
    let n = 400;
    let (u, v) = {
        let u = hairlod::math::any_perpendicular(&light.dir);
        (u, light.dir.cross(&u))
    };
    let mut hits = 0;
    for i in 0..n {
        for j in 0..n {
            let x = -half + (i as f64 + 0.5) * 2.0 * half / n as f64;
            let y = -half + (j as f64 + 0.5) * 2.0 * half / n as f64;
            let ray = Ray { origin: light.dir * (10.0 * half) + u * x + v * y, dir: -light.dir };
            hits += scene.any_hit(&ray, 0.0, f64::INFINITY, None) as usize;
        }
    }
    let injected = hits as f64 * (2.0 * half / n as f64).powi(2);
    let out = outgoing_power(&scene, &p, half, 128, 48, 4);
    eprintln!("bundle out/in = {:.4}", out / injected);
    assert!(out > 0.0);
    assert!(out <= injected * 1.02, "{out} > {injected}");
}

fn bundle_params() -> FiberBsdfParams {
    FiberBsdfParams::preset("brown").unwrap()
}

#[test]
fn doubling_spp_halves_variance() {
    let b = BundleParams::default();
    let scene = bundle_scene(bundle_instance(&b, 2).unwrap(), &b, Lighting::Frontlit).unwrap();
    let cam = b.camera(16);
    let variance = |spp: u32| -> f64 {
        let imgs: Vec<Image> = (0..16).map(|s| render_path_trace(&scene, &cam, &bundle_params(), spp, 70, 100 + s).unwrap()).collect();
        let mean = Image::average(&imgs).unwrap();
        let mut v = 0.0;
        for im in &imgs {
            for (a, m) in im.data.iter().zip(&mean.data) {
                v += ((a - m) as f64).powi(2);
            }
        }
        v / (imgs.len() - 1) as f64
    };
    let ratio = variance(4) / variance(8);
    eprintln!("variance ratio {ratio:.3}");
    assert!((ratio / 2.0 - 1.0).abs() <= 0.2, "{ratio}");
}

#[test]
fn single_instance_oracle_is_a_path_trace() {
    let b = BundleParams::default();
    let p = bundle_params();
    let oracle = render_bundle_oracle_seeds(&b, &[77], Lighting::Backlit, &p, 24, 2).unwrap();
    let scene = bundle_scene(bundle_instance(&b, 77).unwrap(), &b, Lighting::Backlit).unwrap();
    let direct = render_path_trace(&scene, &b.camera(24), &p, 2, DEFAULT_MAX_BOUNCES, 77).unwrap();
    assert_eq!(oracle, direct);
    let via_count = render_bundle_oracle(&b, 1, Lighting::Backlit, &p, 24, 2, 3).unwrap();
    let s = instance_seeds(1, 3)[0];
    assert_eq!(via_count, render_bundle_oracle_seeds(&b, &[s], Lighting::Backlit, &p, 24, 2).unwrap());
}

#[test]
fn oracle_average_ignores_seed_order() {
    let b = BundleParams::default();
    let p = bundle_params();
    let a = render_bundle_oracle_seeds(&b, &[1, 2, 3, 4], Lighting::Frontlit, &p, 16, 1).unwrap();
    let c = render_bundle_oracle_seeds(&b, &[3, 1, 4, 2], Lighting::Frontlit, &p, 16, 1).unwrap();
    assert!(a.max_abs_diff(&c).unwrap() <= 1e-7 * a.data.iter().fold(0.0f32, |m, v| m.max(v.abs())) as f64);
}

#[test]
fn oracle_rejects_overfull_bundles() {
    let b = BundleParams { fibers: 400, ..Default::default() };
    assert!(render_bundle_oracle(&b, 1, Lighting::Frontlit, &bundle_params(), 8, 1, 0).is_err());
    assert!(render_bundle_oracle(&BundleParams::default(), 0, Lighting::Frontlit, &bundle_params(), 8, 1, 0).is_err());
}

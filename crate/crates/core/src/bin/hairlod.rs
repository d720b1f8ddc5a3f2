use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hairlod::io::{
    compare_images, fmt_sig, psnr, read_camera, read_camera_path, read_image, write_image, write_json,
    write_profile_csv, write_stats_csv, HeadConfig, LightConfig, Metric, RunConfig,
};
use hairlod::lod::{build_lod, read_hierarchy_file, write_hierarchy_file, BuildParams};
use hairlod::render::{render_ray_shoot, Camera, Image, RenderMode, Scene, Shading, ThickModel};
use hairlod::runtime::{
    assemble_strands, dolly_for_bounds, init_lod_levels, skin_and_assemble, simulate_sequence, AssembleOptions,
    Environment, SequenceOptions,
};
use hairlod::scatter::{build_tables, scattering_profile, BsdfSelector, FiberBsdfParams};
use hairlod::strand::{generate_wisp_model, read_model_file, write_model_file, HairStyle, DEFAULT_CONTROL_POINTS};
use hairlod::{Result, Rgb};

const TABLE_BINS: usize = 64;

#[derive(Parser)]
#[command(name = "hairlod", version, about = "Strand hair LoD hierarchy, aggregated scattering and CPU renderers")]
#[command(after_help = "Set HAIRLOD_THREADS to cap the number of render threads.")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a procedural wisp model.
    Gen(GenArgs),
    /// Build the LoD hierarchy of a strand model.
    Build(BuildArgs),
    /// Render one frame.
    Render(RenderArgs),
    /// Render a camera path with dynamic LoD selection.
    Sequence(SequenceArgs),
    /// Tabulate azimuthal and longitudinal scattering profiles.
    Profile(ProfileArgs),
    /// Compare two images.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    Straight,
    Curly,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "straight")]
    style: StyleArg,
    #[arg(long, default_value_t = 10_000)]
    strands: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output strand file.
    #[arg(short, long)]
    output: PathBuf,
    /// Also write a camera framing the model.
    #[arg(long)]
    camera: Option<PathBuf>,
    /// Also write a receding dolly camera path.
    #[arg(long)]
    camera_path: Option<PathBuf>,
    /// Frames of the dolly path.
    #[arg(long, default_value_t = 60)]
    frames: usize,
    /// Final over initial camera distance of the dolly path.
    #[arg(long, default_value_t = 5.0)]
    far_ratio: f64,
    /// Image size of the written cameras.
    #[arg(long, default_value_t = 256)]
    size: u32,
    /// Vertical field of view of the written cameras, radians.
    #[arg(long, default_value_t = 0.6)]
    fov: f64,
}

#[derive(Args)]
struct BuildArgs {
    /// Input strand file.
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value_t = 256)]
    clusters: usize,
    #[arg(long, default_value_t = 6)]
    levels: usize,
    #[arg(long, default_value_t = DEFAULT_CONTROL_POINTS)]
    control_points: usize,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output hierarchy file.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(alias = "lod-aggregated")]
    Lod,
    DsFull,
}

impl From<ModeArg> for RenderMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Lod => RenderMode::LodAggregated,
            ModeArg::DsFull => RenderMode::DsFull,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ThickArg {
    Ours,
    Prior,
}

/// Flags shared by `render` and `sequence`; each overrides the config file.
#[derive(Args)]
struct SceneArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Hierarchy file.
    #[arg(long)]
    hier: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    thick_model: Option<ThickArg>,
    /// brown, blonde, red or black.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    spp: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directional light toward `x,y,z`; repeatable.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    light: Vec<[f64; 3]>,
    /// Light radiance applied to every `--light`.
    #[arg(long, default_value_t = 1.0)]
    radiance: f64,
    /// Occluding head sphere `x,y,z,radius`.
    #[arg(long, value_parser = parse_sphere, allow_hyphen_values = true)]
    head: Option<[f64; 4]>,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// Camera JSON file.
    #[arg(long)]
    camera: Option<PathBuf>,
    /// LoD width threshold in pixels for the initial level scan.
    #[arg(long)]
    eps_w: Option<f64>,
    /// Output image, .pfm or .png.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct SequenceArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// Camera path JSON file.
    #[arg(long)]
    camera_path: Option<PathBuf>,
    #[arg(long)]
    eps_w: Option<f64>,
    /// Peak guide sway in radians.
    #[arg(long, default_value_t = 0.0)]
    sway: f64,
    /// Per-frame stats CSV.
    #[arg(long)]
    stats: PathBuf,
    /// Directory for per-frame PFM images.
    #[arg(long)]
    frames_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BsdfArg {
    Single,
    Marschner,
    Aggregated,
    Prior,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long, default_value = "brown")]
    preset: String,
    #[arg(long, value_enum, default_value = "single")]
    bcsdf: BsdfArg,
    /// Hair count for the aggregated models.
    #[arg(long, default_value_t = 16.0)]
    n: f64,
    /// Density for the aggregated models.
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta_i: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi_i: f64,
    /// Grid samples per profile.
    #[arg(long, default_value_t = 180)]
    samples: usize,
    /// Azimuthal profile CSV.
    #[arg(long)]
    azimuthal: PathBuf,
    /// Longitudinal profile CSV.
    #[arg(long)]
    longitudinal: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Psnr,
    Mae,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, value_enum, default_value = "psnr")]
    metric: MetricArg,
}

fn parse_floats<const N: usize>(s: &str) -> std::result::Result<[f64; N], String> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"))).collect::<std::result::Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

fn parse_vec3(s: &str) -> std::result::Result<[f64; 3], String> {
    parse_floats::<3>(s)
}

fn parse_sphere(s: &str) -> std::result::Result<[f64; 4], String> {
    parse_floats::<4>(s)
}

fn merge_config(s: &SceneArgs, eps_w: Option<f64>) -> Result<RunConfig> {
    let mut c = match &s.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(h) = &s.hier {
        c.hierarchy = Some(h.clone());
    }
    if let Some(m) = s.mode {
        c.mode = m.into();
    }
    if let Some(t) = s.thick_model {
        c.thick_model = match t {
            ThickArg::Ours => ThickModel::Ours,
            ThickArg::Prior => ThickModel::Prior,
        };
    }
    if let Some(p) = &s.preset {
        c.preset = p.clone();
    }
    if let Some(v) = s.spp {
        c.spp = v;
    }
    if let Some(v) = s.seed {
        c.seed = v;
    }
    if let Some(v) = eps_w {
        c.eps_w = v;
    }
    if !s.light.is_empty() {
        c.lights = s.light.iter().map(|&dir| LightConfig { dir, radiance: [s.radiance; 3] }).collect();
    }
    if let Some([x, y, z, r]) = s.head {
        c.head = Some(HeadConfig { center: [x, y, z], radius: r, albedo: c.head.map_or([0.6, 0.45, 0.4], |h| h.albedo) });
    }
    Ok(c)
}

fn missing(what: &str) -> hairlod::Error {
    hairlod::Error::InvalidInput(format!("{what} is required (flag or config)"))
}

fn shading(c: &RunConfig) -> Result<Shading> {
    let p = FiberBsdfParams::preset(&c.preset)?;
    let mut sh = Shading::new(p, build_tables(&p, TABLE_BINS)?);
    sh.thick_model = c.thick_model;
    Ok(sh)
}

fn environment(c: &RunConfig, camera: &Camera) -> Result<Environment> {
    Ok(Environment {
        lights: c.lights_for(camera)?,
        head: c.head.map(|h| h.sphere()).transpose()?,
        background: Rgb(c.background),
    })
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let style = match a.style {
        StyleArg::Straight => HairStyle::Straight,
        StyleArg::Curly => HairStyle::Curly,
    };
    let model = generate_wisp_model(style, a.strands, a.seed);
    write_model_file(&model, &a.output)?;
    let (lo, hi) = model.bounds();
    let path = dolly_for_bounds(lo, hi, a.frames.max(1), a.far_ratio, a.fov, a.size);
    if let Some(p) = &a.camera {
        write_json(&path[0], p)?;
    }
    if let Some(p) = &a.camera_path {
        write_json(&path, p)?;
    }
    Ok(())
}

fn cmd_build(a: &BuildArgs) -> Result<()> {
    let model = read_model_file(&a.input)?;
    let params = BuildParams {
        clusters: a.clusters,
        levels: a.levels,
        control_points: a.control_points,
        max_iter: a.max_iter,
        seed: a.seed,
    };
    let h = build_lod(&model, &params)?;
    write_hierarchy_file(&h, &a.output)
}

fn cmd_render(a: &RenderArgs) -> Result<()> {
    let mut c = merge_config(&a.scene, a.eps_w)?;
    if let Some(p) = &a.camera {
        c.camera = Some(read_camera(p)?);
    }
    c.validate()?;
    let camera = c.camera.ok_or_else(|| missing("--camera"))?;
    let h = read_hierarchy_file(c.hierarchy.as_deref().ok_or_else(|| missing("--hier"))?)?;
    let sh = shading(&c)?;
    let env = environment(&c, &camera)?;
    let cam = camera.frame()?;
    let poses = h.rest_poses().to_vec();
    let opts = AssembleOptions::default();
    let assembly = match c.mode {
        RenderMode::DsFull => assemble_strands(&h, &poses, &cam, &opts)?,
        RenderMode::LodAggregated => {
            let mut state = init_lod_levels(&h, &poses, &cam, c.eps_w)?;
            skin_and_assemble(&h, &mut state, &poses, &cam, &opts)?
        }
    };
    let scene = Scene::new(assembly.segments, env.lights, env.head, env.background, h.radius)?;
    let img = render_ray_shoot(&scene, &camera, &sh, c.mode, c.spp, c.seed)?;
    write_image(&img, &a.output)
}

fn cmd_sequence(a: &SequenceArgs) -> Result<()> {
    let mut c = merge_config(&a.scene, a.eps_w)?;
    if let Some(p) = &a.camera_path {
        c.camera_path = Some(p.clone());
    }
    c.validate()?;
    let cameras = read_camera_path(c.camera_path.as_deref().ok_or_else(|| missing("--camera-path"))?)?;
    let h = read_hierarchy_file(c.hierarchy.as_deref().ok_or_else(|| missing("--hier"))?)?;
    let sh = shading(&c)?;
    let env = environment(&c, &cameras[0])?;
    if let Some(d) = &a.frames_dir {
        std::fs::create_dir_all(d)?;
    }
    let opts = SequenceOptions { mode: c.mode, eps_w: c.eps_w, spp: c.spp, seed: c.seed, sway: a.sway, ..Default::default() };
    let mut prev: Option<Image> = None;
    let mut psnrs = Vec::with_capacity(cameras.len());
    let stats = simulate_sequence(&h, &sh, &env, &cameras, &opts, |o| {
        psnrs.push(prev.as_ref().map(|p| psnr(p, o.image)).transpose()?);
        if let Some(d) = &a.frames_dir {
            write_image(o.image, &d.join(format!("frame_{:04}.pfm", o.frame)))?;
        }
        prev = Some(o.image.clone());
        Ok(())
    })?;
    write_stats_csv(std::fs::File::create(&a.stats)?, &stats, Some(&psnrs))
}

fn cmd_profile(a: &ProfileArgs) -> Result<()> {
    let p = FiberBsdfParams::preset(&a.preset)?;
    let t = build_tables(&p, TABLE_BINS)?;
    let sel = match a.bcsdf {
        BsdfArg::Single => BsdfSelector::Single,
        BsdfArg::Marschner => BsdfSelector::Marschner,
        BsdfArg::Aggregated => BsdfSelector::Aggregated { n: a.n, rho: a.rho },
        BsdfArg::Prior => BsdfSelector::Prior { n: a.n, rho: a.rho },
    };
    let pr = scattering_profile(&p, &t, sel, a.theta_i, a.phi_i, a.samples, a.samples)?;
    write_profile_csv(std::fs::File::create(&a.azimuthal)?, &pr.azimuthal)?;
    if let Some(l) = &a.longitudinal {
        write_profile_csv(std::fs::File::create(l)?, &pr.longitudinal)?;
    }
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> Result<()> {
    let x = read_image(&a.a)?;
    let y = read_image(&a.b)?;
    match a.metric {
        MetricArg::Psnr => println!("{:.2}", compare_images(&x, &y, Metric::Psnr)?),
        MetricArg::Mae => println!("{}", fmt_sig(compare_images(&x, &y, Metric::Mae)?)),
    }
    Ok(())
}

fn init_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("HAIRLOD_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| format!("HAIRLOD_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Build(a) => cmd_build(a),
        Cmd::Render(a) => cmd_render(a),
        Cmd::Sequence(a) => cmd_sequence(a),
        Cmd::Profile(a) => cmd_profile(a),
        Cmd::Compare(a) => cmd_compare(a),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

use clap::{Args, Parser, Subcommand};
use masure::acceptance::{self, AcceptanceConfig};
use masure::apartment::PolyNorm;
use masure::io::{self, point_json, q_json, theta_json, vec_json, word_json};
use masure::masure::{Host, Masure, MasureConfig, MasurePoint};
use masure::metrics::{self, ThetaSpec};
use masure::probes;
use masure::rat::{self, Vector, Q};
use masure::rootsys::{preset, validate_gcm, GcmRealization, Sign};
use masure::sample::random_point;
use rand::SeedableRng;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "masure", version, about = "Distances, retractions and probes on a simulated masure")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Preset root system: a1, affine-a1 or hyp23.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Generalized Cartan matrix as JSON, e.g. '[[2,-3],[-3,2]]'.
    #[arg(long, global = true)]
    matrix: Option<String>,
    /// Run configuration file (JSON or TOML) with the same keys as the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    thickness: Option<u32>,
    /// Height bound of the real-root table.
    #[arg(long, global = true)]
    height: Option<i64>,
    /// Folding depth bound.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Polyhedral norm: l1 or linf.
    #[arg(long, global = true)]
    norm: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Adds decimal renderings with this many digits.
    #[arg(long, global = true)]
    decimal: Option<usize>,
    /// Writes the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Loads a saved masure (JSON).
    #[arg(long = "masure", global = true)]
    masure_file: Option<PathBuf>,
    /// Saves the masure used by the command (JSON).
    #[arg(long, global = true)]
    save_masure: Option<PathBuf>,
    /// Writes sampled curves as CSV where a command has them.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Signed distance (or mixed distance with --xi) between two points.
    Distance {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        xi: Option<String>,
        /// Also runs the lattice oracle at this resolution.
        #[arg(long)]
        oracle: Option<u32>,
    },
    /// Retraction onto the root apartment centered at a germ.
    Retract {
        #[arg(long)]
        point: String,
        #[arg(long, default_value = "+e", allow_hyphen_values = true)]
        germ: String,
    },
    /// Translation of a point toward a germ by a dominant vector.
    Translate {
        #[arg(long)]
        point: String,
        #[arg(long, default_value = "+e", allow_hyphen_values = true)]
        germ: String,
        #[arg(long)]
        u: String,
    },
    /// Points of the witness geodesic at the given times.
    Geodesic {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        theta: Option<String>,
        /// Comma separated times in [0,1].
        #[arg(long, default_value = "0,1/4,1/2,3/4,1")]
        t: String,
    },
    /// Splitting of an apartment relative to a germ.
    Split {
        /// Folding word, e.g. '[[0,0,1]]'.
        #[arg(long)]
        apartment: String,
        #[arg(long, allow_hyphen_values = true)]
        germ: String,
    },
    /// Discreteness of the vertex orbit: spacing, or a sequence approaching 0.
    ProbeDiscreteness {
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
    /// The same sequence measured by the mixed distance and by rho_-.
    ProbeSeparation {
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
    /// Empirical and a-priori equivalence constants between two norms.
    ProbeEquivalence {
        #[arg(long)]
        theta1: String,
        #[arg(long)]
        theta2: String,
        #[arg(long, default_value_t = 40)]
        samples: usize,
    },
    /// Image of the segment [x, x+u] under rho_-.
    ProbeUpath {
        #[arg(long)]
        point: String,
        #[arg(long)]
        u: String,
    },
    /// Ray exit, chi and Upsilon of a point.
    Contract {
        #[arg(long)]
        point: String,
        /// Regular dominant direction (default: a regular lattice vector).
        #[arg(long)]
        u: Option<String>,
        #[arg(long, default_value = "0,1/4,1/2,3/4,1")]
        t: String,
    },
    /// Runs the acceptance suite.
    Acceptance,
}

#[derive(Debug)]
struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn config(msg: impl ToString) -> Self {
        CliError { kind: "ConfigInvalid", message: msg.to_string() }
    }
}

macro_rules! pass_through {
    ($($t:ty => $k:literal),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError { kind: $k, message: e.to_string() }
            }
        }
    )*};
}

pass_through!(
    masure::masure::MasureError => "MasureError",
    masure::metrics::MetricError => "MetricError",
    masure::io::IoError => "InputError",
    masure::rootsys::RootError => "RootError",
    std::io::Error => "IoError"
);

type Res<T> = Result<T, CliError>;

/// Validated run configuration.
struct RunConfig {
    real: GcmRealization,
    source: Value,
    thickness: u32,
    height: i64,
    depth: usize,
    norm: PolyNorm,
    seed: u64,
    decimal: Option<usize>,
}

fn read_config_file(path: &PathBuf) -> Res<Value> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "toml") {
        let t: toml::Value = toml::from_str(&text).map_err(CliError::config)?;
        serde_json::to_value(t).map_err(CliError::config)
    } else {
        serde_json::from_str(&text).map_err(CliError::config)
    }
}

impl RunConfig {
    fn from_args(a: &RunArgs) -> Res<Self> {
        let file = match &a.config {
            Some(p) => read_config_file(p)?,
            None => Value::Object(Map::new()),
        };
        let fstr = |k: &str| file.get(k).and_then(Value::as_str).map(str::to_string);
        let fint = |k: &str| file.get(k).and_then(Value::as_i64);
        let matrix = a.matrix.clone().or_else(|| file.get("matrix").map(|m| m.to_string()));
        let preset_name = a.preset.clone().or_else(|| fstr("preset"));
        let (real, source) = match (preset_name, matrix) {
            (Some(_), Some(_)) => return Err(CliError::config("give either --preset or --matrix")),
            (None, Some(m)) => {
                let rows: Vec<Vec<i64>> = serde_json::from_str(&m).map_err(CliError::config)?;
                (validate_gcm(&rows)?, json!({"matrix": rows}))
            }
            (p, None) => {
                let p = p.unwrap_or_else(|| "a1".to_string());
                (preset(&p)?, json!({"preset": p}))
            }
        };
        let thickness = a.thickness.or(fint("thickness").map(|x| x as u32)).unwrap_or(2);
        let height = a.height.or(fint("height")).unwrap_or(20);
        let depth = a.depth.or(fint("depth").map(|x| x as usize)).unwrap_or(6);
        let norm_s = a.norm.clone().or_else(|| fstr("norm")).unwrap_or_else(|| "l1".into());
        let norm = PolyNorm::parse(&norm_s).ok_or_else(|| CliError::config(format!("unknown norm {norm_s}")))?;
        let seed = a.seed.or(fint("seed").map(|x| x as u64)).unwrap_or(0);
        let decimal = a.decimal.or(fint("decimal").map(|x| x as usize));
        if thickness < 2 {
            return Err(CliError::config("thickness must be at least 2"));
        }
        if height < 1 || depth < 1 {
            return Err(CliError::config("height and depth must be positive"));
        }
        Ok(RunConfig { real, source, thickness, height, depth, norm, seed, decimal })
    }

    fn json(&self) -> Value {
        let mut v = self.source.clone();
        let o = v.as_object_mut().unwrap();
        o.insert("thickness".into(), json!(self.thickness));
        o.insert("height".into(), json!(self.height));
        o.insert("depth".into(), json!(self.depth));
        o.insert("norm".into(), json!(self.norm.name()));
        o.insert("seed".into(), json!(self.seed));
        if let Some(k) = self.decimal {
            o.insert("decimal".into(), json!(k));
        }
        v
    }

    /// A rational, with its decimal rendering when requested.
    fn q(&self, x: &Q) -> Value {
        match self.decimal {
            None => q_json(x),
            Some(k) => json!({"exact": rat::fmt_q(x), "decimal": rat::fmt_decimal(x, k)}),
        }
    }
}

struct Session {
    cfg: RunConfig,
    m: Masure,
}

impl Session {
    fn new(args: &RunArgs) -> Res<Self> {
        let mut cfg = RunConfig::from_args(args)?;
        let m = match &args.masure_file {
            Some(p) => {
                // the saved masure fixes the root system and the bounds
                let m = io::parse_masure(&io::parse_json(&std::fs::read_to_string(p)?)?)?;
                cfg.real = m.real().clone();
                cfg.source = json!({"matrix": m.real().matrix});
                cfg.height = m.table().h;
                cfg.thickness = m.config.thickness;
                cfg.depth = m.config.max_depth;
                m
            }
            None => Masure::new(MasureConfig::new(cfg.real.clone(), cfg.height, cfg.thickness, cfg.depth)?),
        };
        Ok(Session { cfg, m })
    }

    fn point(&mut self, s: &str) -> Res<MasurePoint> {
        let (w, b) = io::parse_point(&io::parse_json(s)?)?;
        if b.len() != self.m.d() {
            return Err(CliError::config(format!("point needs {} coordinates", self.m.d())));
        }
        if !self.m.is_registered(&w) {
            self.m.register_word(&w)?;
        }
        Ok(self.m.canonicalize(&w, &b)?)
    }

    fn theta(&self, s: Option<&str>) -> Res<ThetaSpec> {
        match s {
            None => Ok(ThetaSpec::plus(self.cfg.norm)),
            Some(s) => Ok(io::parse_theta(self.m.real(), &io::parse_json(s)?)?),
        }
    }

    fn vector(&self, s: &str) -> Res<Vector> {
        let v = io::parse_vector(&io::parse_json(s)?)?;
        if v.len() != self.m.d() {
            return Err(CliError::config(format!("vector needs {} coordinates", self.m.d())));
        }
        Ok(v)
    }
}

fn times(s: &str) -> Res<Vec<Q>> {
    s.split(',').map(|t| rat::parse_q(t).ok_or_else(|| CliError::config(format!("bad time {t}")))).collect()
}

fn write_csv(path: &PathBuf, header: &[&str], rows: Vec<Vec<String>>) -> Res<()> {
    let mut w = csv::Writer::from_path(path).map_err(CliError::config)?;
    w.write_record(header).map_err(CliError::config)?;
    for r in rows {
        w.write_record(&r).map_err(CliError::config)?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Res<Value> {
    let mut s = Session::new(&cli.run)?;
    let result = match &cli.command {
        Command::Distance { from, to, theta, xi, oracle } => {
            let x = s.point(from)?;
            let y = s.point(to)?;
            if let Some(xi) = xi {
                let xi = io::parse_xi(s.m.real(), &io::parse_json(xi)?)?;
                let dp = metrics::distance(&s.m, &x, &y, &xi.plus)?;
                let dm = metrics::distance(&s.m, &x, &y, &xi.minus)?;
                json!({
                    "from": point_json(&x), "to": point_json(&y), "xi": io::xi_json(&xi),
                    "value": s.cfg.q(&(&dp.value + &dm.value)),
                    "plus": {"value": s.cfg.q(&dp.value), "witness": {"u": vec_json(&dp.witness.u), "u2": vec_json(&dp.witness.u2)}},
                    "minus": {"value": s.cfg.q(&dm.value), "witness": {"u": vec_json(&dm.witness.u), "u2": vec_json(&dm.witness.u2)}},
                })
            } else {
                let th = s.theta(theta.as_deref())?;
                let d = metrics::distance(&s.m, &x, &y, &th)?;
                let mut r = json!({
                    "from": point_json(&x), "to": point_json(&y), "theta": theta_json(&th),
                    "value": s.cfg.q(&d.value),
                    "witness": {"u": vec_json(&d.witness.u), "u2": vec_json(&d.witness.u2)},
                    "meet": point_json(&s.m.translate(&x, &th.germ, &d.witness.u)?),
                });
                if let Some(n) = oracle {
                    let o = metrics::distance_oracle(&s.m, &x, &y, &th, *n)?;
                    r["oracle"] = json!({"resolution": n, "value": s.cfg.q(&o)});
                }
                r
            }
        }
        Command::Retract { point, germ } => {
            let x = s.point(point)?;
            let g = io::parse_germ(s.m.real(), &json!(germ))?;
            json!({"point": point_json(&x), "germ": g.to_string(), "image": vec_json(&s.m.retract(&x, &g)?)})
        }
        Command::Translate { point, germ, u } => {
            let x = s.point(point)?;
            let g = io::parse_germ(s.m.real(), &json!(germ))?;
            let u = s.vector(u)?;
            let y = metrics::translate(&s.m, &x, &g, &u)?;
            json!({"point": point_json(&x), "germ": g.to_string(), "u": vec_json(&u), "image": point_json(&y)})
        }
        Command::Geodesic { from, to, theta, t } => {
            let x = s.point(from)?;
            let y = s.point(to)?;
            let th = s.theta(theta.as_deref())?;
            let d = metrics::distance(&s.m, &x, &y, &th)?;
            let mut pts = Vec::new();
            let mut rows = Vec::new();
            for t in times(t)? {
                let p = metrics::geodesic_with(&s.m, &x, &y, &th, &d, &t)?;
                rows.push([rat::fmt_q(&t), word_json(&p.word).to_string()].into_iter().chain(p.b.iter().map(rat::fmt_q)).collect());
                pts.push(json!({"t": s.cfg.q(&t), "point": point_json(&p)}));
            }
            if let Some(path) = &cli.run.csv {
                let mut header = vec!["t".to_string(), "w".to_string()];
                header.extend((0..s.m.d()).map(|i| format!("b{i}")));
                write_csv(path, &header.iter().map(String::as_str).collect::<Vec<_>>(), rows)?;
            }
            json!({"from": point_json(&x), "to": point_json(&y), "theta": theta_json(&th), "value": s.cfg.q(&d.value), "points": pts})
        }
        Command::Split { apartment, germ } => {
            let w = io::parse_word(&io::parse_json(apartment)?)?;
            if !s.m.is_registered(&w) {
                s.m.register_word(&w)?;
            }
            let g = io::parse_germ(s.m.real(), &json!(germ))?;
            let sp = s.m.split_apartment(&w, &g)?;
            let pieces: Vec<Value> = sp
                .pieces
                .iter()
                .map(|p| {
                    let host = match &p.host {
                        Host::Registered(h) => json!({"registered": word_json(h)}),
                        Host::Unfolded(h) => json!({"unfolded": word_json(h)}),
                    };
                    json!({
                        "region": p.region.iter().map(|h| json!({"a": vec_json(&h.a), "c": q_json(&h.c)})).collect::<Vec<_>>(),
                        "host": host,
                        "to_root": {"m": p.to_root.m.iter().map(|r| vec_json(r)).collect::<Vec<_>>(), "t": vec_json(&p.to_root.t)},
                    })
                })
                .collect();
            json!({"apartment": word_json(&w), "germ": g.to_string(), "n": sp.n, "pieces": pieces})
        }
        Command::ProbeDiscreteness { n } => {
            let r = probes::discreteness_probe(s.m.real(), s.cfg.norm, *n, s.cfg.height)?;
            if let Some(path) = &cli.run.csv {
                let rows = r.steps.iter().map(|p| vec![p.m.to_string(), rat::fmt_q(&p.d_plus)]).collect();
                write_csv(path, &["m", "d_plus"], rows)?;
            }
            let mut v = json!({"discrete": r.discrete});
            if let Some(sp) = &r.min_spacing {
                v["min_spacing"] = s.cfg.q(sp);
            }
            if !r.steps.is_empty() {
                v["height"] = json!(r.height);
                v["steps"] = Value::Array(
                    r.steps
                        .iter()
                        .map(|p| json!({"m": p.m, "root": p.root, "gap": s.cfg.q(&p.gap), "point": point_json(&p.point), "d_plus": s.cfg.q(&p.d_plus)}))
                        .collect(),
                );
            }
            v
        }
        Command::ProbeSeparation { n } => {
            let r = probes::discreteness_probe(s.m.real(), s.cfg.norm, *n, s.cfg.height)?;
            if let Some(path) = &cli.run.csv {
                let rows = r
                    .steps
                    .iter()
                    .map(|p| vec![p.m.to_string(), rat::fmt_q(&p.d_plus), rat::fmt_q(&p.d_xi), rat::fmt_q(&p.rho_minus_norm)])
                    .collect();
                write_csv(path, &["m", "d_plus", "d_xi", "rho_minus_norm"], rows)?;
            }
            json!({
                "discrete": r.discrete,
                "height": r.height,
                "steps": r.steps.iter().map(|p| json!({
                    "m": p.m, "root": p.root, "point": point_json(&p.point),
                    "d_plus": s.cfg.q(&p.d_plus), "d_xi": s.cfg.q(&p.d_xi),
                    "rho_minus": vec_json(&p.rho_minus), "rho_minus_norm": s.cfg.q(&p.rho_minus_norm),
                })).collect::<Vec<_>>(),
            })
        }
        Command::ProbeEquivalence { theta1, theta2, samples } => {
            let t1 = s.theta(Some(theta1))?;
            let t2 = s.theta(Some(theta2))?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s.cfg.seed);
            let pairs: Vec<(MasurePoint, MasurePoint)> =
                (0..*samples).map(|_| (random_point(&s.m, &mut rng), random_point(&s.m, &mut rng))).collect();
            let r = probes::equivalence_constant(&s.m, &t1, &t2, &pairs)?;
            let wit = |i: Option<usize>| i.map(|i| json!([point_json(&pairs[i].0), point_json(&pairs[i].1)]));
            json!({
                "theta1": theta_json(&t1), "theta2": theta_json(&t2), "samples": samples,
                "forward": s.cfg.q(&r.forward), "backward": s.cfg.q(&r.backward),
                "apriori_forward": s.cfg.q(&r.apriori_forward), "apriori_backward": s.cfg.q(&r.apriori_backward),
                "gallery_distance": r.gallery_distance,
                "witness_forward": wit(r.witnesses.0), "witness_backward": wit(r.witnesses.1),
                "ok": r.ok,
            })
        }
        Command::ProbeUpath { point, u } => {
            let x = s.point(point)?;
            let u = s.vector(u)?;
            let r = probes::path_retract_check(&s.m, &x, &u)?;
            json!({
                "point": point_json(&x), "u": vec_json(&u),
                "breakpoints": r.breakpoints.iter().map(|(t, p)| json!({"t": s.cfg.q(t), "image": vec_json(p)})).collect::<Vec<_>>(),
                "u_path": r.verdict.ok, "undecided": r.verdict.undecided,
                "increment": vec_json(&r.increment),
                "increment_coroot": r.increment_coroot.as_deref().map(vec_json),
                "increment_ok": r.increment_ok, "two_time_ok": r.two_time_ok,
            })
        }
        Command::Contract { point, u, t } => {
            let x = s.point(point)?;
            let u = match u {
                Some(u) => s.vector(u)?,
                None => s.m.real().regular_lattice_vector(),
            };
            let (tp, y) = metrics::ray_exit(&s.m, &x, &u, Sign::Plus)?;
            let mut rows = Vec::new();
            for t in times(t)? {
                let c = metrics::chi(&s.m, &x, &t, &u)?;
                let up = metrics::upsilon(&s.m, &x, &t, &u)?;
                rows.push(json!({"t": s.cfg.q(&t), "chi": point_json(&c), "upsilon": point_json(&up)}));
            }
            json!({"point": point_json(&x), "u": vec_json(&u), "ray_time": s.cfg.q(&tp), "exit": vec_json(&y), "samples": rows})
        }
        Command::Acceptance => {
            let mut cfg = AcceptanceConfig::default();
            if let Some(seed) = cli.run.seed {
                cfg.seed = seed;
            }
            if let Some(p) = &cli.run.preset {
                cfg.presets = vec![p.clone()];
            }
            let results = acceptance::run(&cfg);
            for c in &results {
                eprintln!("{}", c.line());
            }
            json!({
                "presets": cfg.presets, "seed": cfg.seed,
                "criteria": results.iter().map(|c| json!({"id": c.id, "name": c.name, "pass": c.pass, "detail": c.detail})).collect::<Vec<_>>(),
                "passed": results.iter().all(|c| c.pass),
            })
        }
    };
    if let Some(p) = &cli.run.save_masure {
        std::fs::write(p, serde_json::to_string_pretty(&io::masure_json(&s.m)).unwrap())?;
    }
    let mut cfg = s.cfg.json();
    if cli.run.masure_file.is_some() {
        cfg["apartments"] = io::masure_json(&s.m)["apartments"].clone();
    }
    Ok(json!({"version": VERSION, "config": cfg, "result": result}))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Distance { .. } => "distance",
        Command::Retract { .. } => "retract",
        Command::Translate { .. } => "translate",
        Command::Geodesic { .. } => "geodesic",
        Command::Split { .. } => "split",
        Command::ProbeDiscreteness { .. } => "probe-discreteness",
        Command::ProbeSeparation { .. } => "probe-separation",
        Command::ProbeEquivalence { .. } => "probe-equivalence",
        Command::ProbeUpath { .. } => "probe-upath",
        Command::Contract { .. } => "contract",
        Command::Acceptance => "acceptance",
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(mut report) => {
            report["command"] = json!(command_name(&cli.command));
            let text = serde_json::to_string_pretty(&report).unwrap();
            let failed = report["result"].get("passed") == Some(&Value::Bool(false));
            let written = match &cli.run.out {
                Some(p) => std::fs::write(p, text + "\n"),
                None => match writeln!(std::io::stdout().lock(), "{text}") {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    r => r,
                },
            };
            if let Err(e) = written {
                eprintln!("{}", json!({"error": {"kind": "IoError", "message": e.to_string()}}));
                return ExitCode::from(2);
            }
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{}", json!({"error": {"kind": e.kind, "message": e.message}}));
            ExitCode::from(2)
        }
    }
}

//! Subcommands of the `fickett` tool.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fickett_core::asymptotics::{
    closed_form_fire, compare_to_numerics, iterate_fire_with, origin_acceleration,
};
use fickett_core::characteristics::{cplus_fan, verify_eq6, CharacteristicPath, Termination};
use fickett_core::config::{parse_config, serialize_config, RunConfig};
use fickett_core::fronts::{
    fire_trajectory, internal_shock_events, reaction_end_trajectory, shock_trajectory,
    FrontKind, Trajectory,
};
use fickett_core::output::{
    emit_frames, fmt_num, fmt_opt, read_xt, render_svg, write_atomic, write_paths, write_table,
    write_trajectory, Diagram,
};
use fickett_core::regime::{classify_with, pre_shock_fire, sweep};
use fickett_core::{run, Error, Result, RunRecord};

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the x-t diagram as SVG.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Write one file per stored frame.
    #[arg(long, global = true)]
    pub frames: bool,
    /// Grid points per unit length (overrides `points_per_unit`).
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one configuration and write fronts, fan and summary.
    Run { config: PathBuf },
    /// Classify every (K, epsilon) of the `[sweep]` table.
    Sweep { config: PathBuf },
    /// Iterate the asymptotic fire locus and write it next to the closed form.
    Asymptotics { config: PathBuf },
    /// Trace the characteristic fan and check dp/dt along each path.
    Characteristics { config: PathBuf },
    /// Compare a fire locus file (`x,t`) with the asymptotic predictions.
    Compare { record: PathBuf, config: PathBuf },
}

/// Parsed command line with the shared flags.
#[derive(Debug, Parser)]
#[command(name = "fickett", version, about = "Shock-induced ignition in Fickett's reactive Burgers model")]
pub struct App {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

pub fn load_config(path: &Path, common: &Common) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cfg = parse_config(&text)?;
    if let Some(out) = &common.out {
        cfg.out_dir = out.to_string_lossy().into_owned();
    }
    if let Some(r) = common.resolution {
        cfg.points_per_unit = r;
    }
    cfg.emit.svg |= common.svg;
    cfg.emit.snapshots |= common.frames;
    cfg.validate()?;
    Ok(cfg)
}

pub fn execute(app: &App) -> Result<()> {
    match &app.command {
        Command::Run { config } => cmd_run(&load_config(config, &app.common)?),
        Command::Sweep { config } => cmd_sweep(&load_config(config, &app.common)?),
        Command::Asymptotics { config } => cmd_asymptotics(&load_config(config, &app.common)?),
        Command::Characteristics { config } => {
            cmd_characteristics(&load_config(config, &app.common)?)
        }
        Command::Compare { record, config } => {
            cmd_compare(record, &load_config(config, &app.common)?)
        }
    }
}

fn out_dir(cfg: &RunConfig) -> PathBuf {
    PathBuf::from(&cfg.out_dir)
}

fn kv(rows: &mut Vec<Vec<String>>, key: &str, value: String) {
    rows.push(vec![key.to_string(), value]);
}

fn fan(record: &RunRecord, cfg: &RunConfig) -> Result<Vec<CharacteristicPath>> {
    let mut paths = Vec::new();
    for (seed, p) in cfg.seed_points().iter().zip(cplus_fan(record, &cfg.seed_points())?) {
        match p {
            Ok(p) => paths.push(p),
            Err(e) => eprintln!("warning: seed ({}, {}): {e}", seed.0, seed.1),
        }
    }
    Ok(paths)
}

fn analytic_fire(cfg: &RunConfig) -> Result<Vec<(f64, f64)>> {
    let x_max = cfg.asymptotics.x_max;
    (0..=200)
        .map(|i| {
            let x = x_max * i as f64 / 200.0;
            closed_form_fire(x, cfg.q, cfg.k / cfg.epsilon).map(|t| (x, t))
        })
        .collect()
}

fn write_svg(
    dir: &Path,
    record: &RunRecord,
    fronts: [&Trajectory; 4],
    paths: &[CharacteristicPath],
    analytic: &[(f64, f64)],
) -> Result<()> {
    let [shock, fire, reaction_end, internal] = fronts;
    let t_max = record.config.t_end;
    let x_max = shock.points().last().map_or(1.0, |p| p.0).max(0.1) * 1.05;
    let svg = render_svg(&Diagram {
        shock: Some(shock),
        fire: Some(fire),
        reaction_end: Some(reaction_end),
        internal_shock: Some(internal),
        paths,
        analytic: Some(analytic),
        t_max,
        x_max,
    });
    write_atomic(&dir.join("diagram.svg"), svg.as_bytes())
}

pub fn cmd_run(cfg: &RunConfig) -> Result<()> {
    let dir = out_dir(cfg);
    let params = cfg.sim_params()?;
    let record = run(&params, &cfg.solver_config())?;
    write_atomic(&dir.join("config.toml"), serialize_config(cfg)?.as_bytes())?;

    let detector = cfg.detector();
    let events = internal_shock_events(&record, &detector);
    let shock = shock_trajectory(&record);
    let fire = fire_trajectory(&record);
    let pre_fire = pre_shock_fire(&record, &events);
    let reaction_end = reaction_end_trajectory(&record, cfg.reaction_end_threshold);
    if cfg.emit.trajectories {
        write_trajectory(&dir.join("shock.csv"), &shock)?;
        write_trajectory(&dir.join("fire.csv"), &fire)?;
        write_trajectory(&dir.join("fire_pre_shock.csv"), &pre_fire)?;
        write_trajectory(&dir.join("reaction_end.csv"), &reaction_end)?;
        write_trajectory(&dir.join("internal_shock.csv"), &events.trajectory)?;
    }
    let analytic = analytic_fire(cfg)?;
    if cfg.emit.diagram || cfg.emit.svg {
        let paths = fan(&record, cfg)?;
        if cfg.emit.diagram {
            write_paths(&dir.join("cplus.csv"), &paths)?;
            let rows: Vec<Vec<String>> =
                analytic.iter().map(|&(x, t)| vec![fmt_num(x), fmt_num(t)]).collect();
            write_table(&dir.join("analytic_fire.csv"), &["x", "t"], &rows)?;
        }
        if cfg.emit.svg {
            write_svg(&dir, &record, [&shock, &fire, &reaction_end, &events.trajectory], &paths, &analytic)?;
        }
    }
    if cfg.emit.snapshots {
        emit_frames(&record, &dir.join("frames"))?;
    }

    let report = classify_with(&record, &detector)?;
    let eq19 = compare_to_numerics(&pre_fire, &params, None, 0.0, 0.5)
        .ok()
        .map(|d| d.max_rel_closed_form);
    let mut rows = Vec::new();
    kv(&mut rows, "K", fmt_num(params.k()));
    kv(&mut rows, "epsilon", fmt_num(params.epsilon()));
    kv(&mut rows, "Q", fmt_num(params.q()));
    kv(&mut rows, "nu", fmt_num(params.nu()));
    kv(&mut rows, "chi", fmt_num(report.chi));
    kv(&mut rows, "regime", report.regime.as_str().into());
    kv(&mut rows, "formation_x", fmt_opt(report.internal_shock_formation.map(|f| f.0)));
    kv(&mut rows, "formation_t", fmt_opt(report.internal_shock_formation.map(|f| f.1)));
    kv(&mut rows, "merge_x", fmt_opt(report.merge_event.map(|m| m.x)));
    kv(&mut rows, "merge_t", fmt_opt(report.merge_event.map(|m| m.t)));
    kv(&mut rows, "merge_speed", fmt_opt(report.merge_event.map(|m| m.speed)));
    kv(&mut rows, "speed_ratio_to_cj", fmt_opt(report.speed_ratio_to_cj));
    kv(&mut rows, "cj_reference", fmt_num(report.cj_reference));
    kv(&mut rows, "acceleration_fit", fmt_opt(report.fire_origin_acceleration_fit));
    kv(&mut rows, "origin_acceleration", fmt_num(origin_acceleration(&params)));
    kv(&mut rows, "closed_form_max_rel_dev_x_le_0.5", fmt_opt(eq19));
    kv(&mut rows, "mass_defect", fmt_num(record.mass_defect()));
    kv(&mut rows, "steps", record.steps.to_string());
    write_table(&dir.join("summary.csv"), &["key", "value"], &rows)?;
    println!(
        "{}: chi = {}, regime {}, {} steps",
        dir.display(),
        report.chi,
        report.regime.as_str(),
        record.steps
    );
    Ok(())
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<()> {
    let grid = cfg.sweep_grid()?;
    let entries = sweep(&grid, &cfg.solver_config(), &cfg.detector());
    let mut rows = Vec::with_capacity(entries.len());
    let mut failures = 0;
    for e in &entries {
        let p = e.params;
        let mut row = vec![fmt_num(p.k()), fmt_num(p.epsilon()), fmt_num(p.chi())];
        match &e.report {
            Ok(r) => row.extend([
                r.regime.as_str().to_string(),
                fmt_opt(r.internal_shock_formation.map(|f| f.0)),
                fmt_opt(r.internal_shock_formation.map(|f| f.1)),
                fmt_opt(r.merge_event.map(|m| m.x)),
                fmt_opt(r.merge_event.map(|m| m.t)),
                fmt_opt(r.merge_event.map(|m| m.speed)),
                fmt_opt(r.speed_ratio_to_cj),
                r.supersonic.map(|s| s.to_string()).unwrap_or_default(),
                fmt_opt(r.fire_origin_acceleration_fit),
                String::new(),
            ]),
            Err(msg) => {
                failures += 1;
                row.extend(std::iter::repeat(String::new()).take(9));
                row.push(msg.replace(',', ";"));
            }
        }
        rows.push(row);
    }
    let dir = out_dir(cfg);
    write_table(
        &dir.join("regime_map.csv"),
        &[
            "K", "epsilon", "chi", "regime", "formation_x", "formation_t", "merge_x", "merge_t",
            "merge_speed", "speed_ratio_to_cj", "supersonic", "acceleration_fit", "error",
        ],
        &rows,
    )?;
    println!("{} runs, {failures} failed", entries.len());
    Ok(())
}

pub fn cmd_asymptotics(cfg: &RunConfig) -> Result<()> {
    let params = cfg.sim_params()?;
    let a = &cfg.asymptotics;
    let fire = iterate_fire_with(&params, a.x_max, a.iterations, a.nodes)?;
    let mut header = vec!["x".to_string(), "t1_star".into(), "closed_form".into()];
    header.extend((1..=a.iterations).map(|k| format!("iterate_{k}")));
    let mut rows = Vec::with_capacity(a.nodes);
    for i in 0..a.nodes {
        let x = fire.t1_star.x_at(i);
        let mut row = vec![
            fmt_num(x),
            fmt_num(fire.t1_star.values()[i]),
            fmt_num(closed_form_fire(x, params.q(), params.zeta())?),
        ];
        row.extend(fire.iterates.iter().map(|m| fmt_num(m.values()[i])));
        rows.push(row);
    }
    let dir = out_dir(cfg);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(&dir.join("asymptotic_fire.csv"), &header, &rows)?;
    let mut summary = Vec::new();
    kv(&mut summary, "origin_acceleration", fmt_num(fire.a0));
    for k in 1..=a.iterations {
        kv(
            &mut summary,
            &format!("cauchy_gap_{}_{k}", k - 1),
            fmt_opt(fire.cauchy_gap(k - 1, k)),
        );
    }
    write_table(&dir.join("asymptotics_summary.csv"), &["key", "value"], &summary)?;
    println!(
        "a0 = {}, last Cauchy gap = {}",
        fire.a0,
        fmt_opt(fire.cauchy_gap(a.iterations - 1, a.iterations))
    );
    Ok(())
}

pub fn cmd_characteristics(cfg: &RunConfig) -> Result<()> {
    let params = cfg.sim_params()?;
    let record = run(&params, &cfg.solver_config())?;
    let paths = fan(&record, cfg)?;
    let dir = out_dir(cfg);
    write_paths(&dir.join("cplus.csv"), &paths)?;
    let mut rows = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let (term, path_speed, shock_speed) = match p.termination {
            Termination::LeadShock {
                path_speed,
                shock_speed,
            } => ("lead_shock", Some(path_speed), Some(shock_speed)),
            Termination::EndTime => ("end_time", None, None),
            Termination::DomainEdge => ("domain_edge", None, None),
        };
        let res = verify_eq6(p, &params).ok();
        rows.push(vec![
            i.to_string(),
            fmt_num(p.seed.0),
            fmt_num(p.seed.1),
            p.samples.len().to_string(),
            term.to_string(),
            fmt_opt(path_speed),
            fmt_opt(shock_speed),
            fmt_opt(res.map(|r| r.max)),
            fmt_opt(res.map(|r| r.rms)),
            fmt_opt(res.map(|r| r.mean_source)),
        ]);
    }
    write_table(
        &dir.join("eq6_residuals.csv"),
        &[
            "path", "seed_x", "seed_t", "samples", "termination", "path_speed", "shock_speed",
            "max_residual", "rms_residual", "mean_source",
        ],
        &rows,
    )?;
    if cfg.emit.svg {
        let events = internal_shock_events(&record, &cfg.detector());
        let shock = shock_trajectory(&record);
        let fire = fire_trajectory(&record);
        let end = reaction_end_trajectory(&record, cfg.reaction_end_threshold);
        write_svg(&dir, &record, [&shock, &fire, &end, &events.trajectory], &paths, &analytic_fire(cfg)?)?;
    }
    println!("{} paths traced", paths.len());
    Ok(())
}

pub fn cmd_compare(record: &Path, cfg: &RunConfig) -> Result<()> {
    let params = cfg.sim_params()?;
    let fire = Trajectory::new(FrontKind::Fire, read_xt(record)?)?;
    let a = &cfg.asymptotics;
    let asym = iterate_fire_with(&params, a.x_max, a.iterations, a.nodes)?;
    let report = compare_to_numerics(&fire, &params, Some(asym.last()), 0.0, a.x_max)?;
    let rows: Vec<Vec<String>> = report
        .points
        .iter()
        .map(|p| {
            vec![
                fmt_num(p.x),
                fmt_num(p.t_numeric),
                fmt_num(p.t_closed_form),
                fmt_num(p.rel_closed_form),
                fmt_opt(p.t_iterate),
                fmt_opt(p.rel_iterate),
            ]
        })
        .collect();
    write_table(
        &out_dir(cfg).join("compare.csv"),
        &["x", "t_numeric", "t_closed_form", "rel_closed_form", "t_iterate", "rel_iterate"],
        &rows,
    )?;
    println!(
        "max relative deviation: closed form {}, iterate {} ({} points)",
        report.max_rel_closed_form,
        fmt_opt(report.max_rel_iterate),
        report.points.len()
    );
    Ok(())
}

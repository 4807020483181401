use fickett_core::config::{parse_config, serialize_config};
use fickett_core::fronts::{fire_trajectory, shock_trajectory, FrontKind, Trajectory};
use fickett_core::output::{
    emit_frames, fmt_num, read_xt, render_svg, write_table, write_trajectory, Diagram,
};
use fickett_core::{pressure, run, Error, SimParams, SolverConfig};

#[test]
fn minimal_document_gets_defaults() {
    let c = parse_config("K = 0.2\nepsilon = 0.2\n").unwrap();
    assert_eq!((c.q, c.nu, c.cfl, c.points_per_unit), (1.0, 0.0, 0.5, 1600));
    assert!((c.sim_params().unwrap().chi() - 1.0).abs() < 1e-15);
    let s = c.solver_config();
    assert_eq!(s.domain_length, 2.0 * s.t_end + 1.0);
    assert!(c.emit.trajectories && !c.emit.svg);
    assert_eq!(c.detector().theta, 0.02);
}

#[test]
fn constraint_violations_name_the_key() {
    let e = parse_config("K = 1\nepsilon = 0\n").unwrap_err();
    assert!(matches!(e, Error::InvalidParameter { name: "epsilon", .. }));
    assert!(e.to_string().contains("epsilon > 0"));
    let e = parse_config("K = 1\nepsilon = 0.2\ncfl = 2\n").unwrap_err();
    assert!(e.to_string().contains("cfl"));
    let e = parse_config("K = 1\nepsilon = 0.2\n[asymptotics]\nx_max = 1.2\n").unwrap_err();
    assert!(e.to_string().contains("x_max"));
}

#[test]
fn unknown_and_mistyped_keys_rejected() {
    let e = parse_config("K = 1\nepsilon = 0.2\nkappa = 3\n").unwrap_err();
    assert!(e.to_string().contains("kappa"), "{e}");
    let e = parse_config("K = \"fast\"\nepsilon = 0.2\n").unwrap_err();
    assert!(matches!(e, Error::Config(_)));
    assert!(parse_config("epsilon = 0.2\n").is_err());
}

#[test]
fn round_trip() {
    let text = "K = 2\nepsilon = 0.2\nseeds = [[0.0, 1.0], [0.5, 1.5]]\n[sweep]\nK = [1.0, 2.0]\nepsilon = [0.2]\n";
    let c = parse_config(text).unwrap();
    let again = parse_config(&serialize_config(&c).unwrap()).unwrap();
    assert_eq!(c, again);
    assert_eq!(c.seed_points(), vec![(0.0, 1.0), (0.5, 1.5)]);
    assert_eq!(c.sweep_grid().unwrap().len(), 2);
}

#[test]
fn default_seeds_on_piston() {
    let c = parse_config("K = 2\nepsilon = 0.2\nt_end = 1.0\nseed_spacing = 0.25\n").unwrap();
    assert_eq!(c.seed_points(), vec![(0.0, 0.25), (0.0, 0.5), (0.0, 0.75)]);
}

#[test]
fn fifteen_significant_digits() {
    assert_eq!(fmt_num(0.0), "0");
    assert_eq!(fmt_num(1.0), "1.00000000000000");
    assert_eq!(fmt_num(-0.125), "-0.125000000000000");
    assert_eq!(fmt_num(1234.5), "1234.50000000000");
    assert_eq!(fmt_num(1e-7), "1.00000000000000e-7");
    let v = std::f64::consts::PI;
    let back: f64 = fmt_num(v).parse().unwrap();
    assert!((back - v).abs() / v < 1e-14);
}

#[test]
fn tables_and_trajectories_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sub/fire.csv");
    let t = Trajectory::new(FrontKind::Fire, vec![(0.0, 1.0), (0.25, 1.4), (0.5, 1.75)]).unwrap();
    write_trajectory(&path, &t).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,t\n"));
    assert_eq!(read_xt(&path).unwrap(), t.points());
    // no stray temporary files
    assert_eq!(std::fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);

    let bad = dir.path().join("bad.csv");
    write_table(&bad, &["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
    assert!(read_xt(&bad).is_err());
}

#[test]
fn unwritable_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "x").unwrap();
    let e = write_table(&file.join("under_a_file.csv"), &["x"], &[]).unwrap_err();
    assert!(matches!(e, Error::Io { .. }));
}

#[test]
fn frames_on_disk() {
    let p = SimParams::with_rates(2.0, 0.2).unwrap();
    let cfg = SolverConfig {
        t_end: 0.5,
        domain_length: 2.0,
        points_per_unit: 100,
        snapshot_interval: 0.1,
        ..SolverConfig::default()
    };
    let rec = run(&p, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_frames(&rec, dir.path()).unwrap();
    assert_eq!(files.len(), (0.5f64 / 0.1).floor() as usize + 1);

    let first = std::fs::read_to_string(&files[0]).unwrap();
    let mut lines = first.lines();
    assert_eq!(lines.next().unwrap(), "x,rho,p,lambda_i,lambda_r");
    assert!(lines.all(|l| l.split(',').nth(1) == Some("0")));

    let last = std::fs::read_to_string(files.last().unwrap()).unwrap();
    let f = rec.frames.last().unwrap();
    for (j, line) in last.lines().skip(1).enumerate() {
        let c = f.cell(j);
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[2], fmt_num(pressure(c.rho, c.lambda_r, p.q())));
    }
    let index = std::fs::read_to_string(dir.path().join("frames.csv")).unwrap();
    assert_eq!(index.lines().count(), files.len() + 1);
}

#[test]
fn emitted_files_are_deterministic() {
    let p = SimParams::with_rates(0.2, 0.2).unwrap();
    let cfg = SolverConfig { t_end: 1.2, domain_length: 3.4, points_per_unit: 200, ..SolverConfig::default() };
    let write = || {
        let dir = tempfile::tempdir().unwrap();
        let rec = run(&p, &cfg).unwrap();
        write_trajectory(&dir.path().join("fire.csv"), &fire_trajectory(&rec)).unwrap();
        std::fs::read(dir.path().join("fire.csv")).unwrap()
    };
    assert_eq!(write(), write());
}

#[test]
fn svg_legend_colours() {
    let p = SimParams::new(0.0, 1.0, 0.2, 0.0).unwrap();
    let cfg = SolverConfig { t_end: 2.0, domain_length: 5.0, points_per_unit: 200, ..SolverConfig::default() };
    let rec = run(&p, &cfg).unwrap();
    let shock = shock_trajectory(&rec);
    let fire = fire_trajectory(&rec);
    let analytic = [(0.0, 1.0), (0.5, 2.0)];
    let svg = render_svg(&Diagram {
        shock: Some(&shock),
        fire: Some(&fire),
        analytic: Some(&analytic),
        t_max: 2.0,
        x_max: 1.2,
        ..Diagram::default()
    });
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("stroke=\"red\"").count(), 1);
    assert_eq!(svg.matches("stroke=\"green\"").count(), 1);
    assert!(svg.contains("stroke-dasharray"));
    assert!(!svg.contains("stroke=\"blue\""));
}

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rhsim_cli::output::{read_manifest, MANIFEST};
use rhsim_core::{GridSpec, ScalarField, Snapshot};

const PARAMS: &str = r#"
[grid]
L = 8.0
N = 16
[params]
alpha = 1.0
gamma = 0.8
epsilon = 0.5
sigma = 1.2
"#;

fn rhsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rhsim"))
        .args(args)
        .env_remove("RHSIM_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

/// Writes a config whose output goes to `<dir>/out` and returns its path.
fn config(dir: &Path, body: &str) -> String {
    let text = format!(
        "{body}\n{PARAMS}\n[output]\ndirectory = \"{}\"\nformats = [\"bin\"]\n",
        dir.join("out").display()
    );
    let path = dir.join("scenario.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn listed_files(out: &Path) -> Vec<String> {
    read_manifest(&out.join(MANIFEST)).unwrap().into_iter().map(|e| e.file).collect()
}

fn dir_files(out: &Path) -> BTreeSet<String> {
    fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect()
}

const CORE: &str = r#"model = "core"
[init]
preset = "gaussian-blob"
center = [1.0, -0.5]
width = 1.5
mass = 2.0
[run]
T = 1.0
dt = 0.1
sample_every = 5
"#;

#[test]
fn oracle_time_list_gives_two_snapshots_per_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "model = \"oracle\"\n[init]\npreset = \"gaussian-blob\"\nwidth = 1.5\n[run]\ntimes = [0.0, 1.0]\n",
    );
    let o = rhsim(&["run", &cfg]);
    assert!(o.status.success(), "{o:?}");
    let out = dir.path().join("out");
    let files = dir_files(&out);
    let expect: BTreeSet<String> = ["u_0000.bin", "u_0001.bin", "v_0000.bin", "v_0001.bin", MANIFEST]
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(files, expect);
    let entries = read_manifest(&out.join(MANIFEST)).unwrap();
    let t_of = |f: &str| entries.iter().find(|e| e.file == f).unwrap().t;
    assert_eq!(t_of("u_0000.bin"), 0.0);
    assert_eq!(t_of("v_0001.bin"), 1.0);
    // at t = 0 the oracle reproduces the initial data
    let Snapshot::Traveler(v0) = Snapshot::load(out.join("v_0000.bin")).unwrap() else {
        panic!("v is a traveler field")
    };
    assert_eq!(v0.sup_norm(), 0.0);
}

#[test]
fn equilibrium_reports_its_residual() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), CORE);
    let o = rhsim(&["equilibrium", &cfg]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    let residual: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("stationary_residual_sup = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual <= 1e-8, "{text}");
    let files = dir_files(&dir.path().join("out"));
    for f in ["u_bar.bin", "v_bar.bin", "equilibrium_report.txt", MANIFEST] {
        assert!(files.contains(f), "{files:?}");
    }
    let Snapshot::Scalar(u_bar) = Snapshot::load(dir.path().join("out/u_bar.bin")).unwrap() else {
        panic!("u_bar is scalar")
    };
    assert!((u_bar.integral() - 2.0 / 1.8).abs() < 1e-12);
}

#[test]
fn invalid_parameter_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), CORE);
    fs::write(&cfg, fs::read_to_string(&cfg).unwrap().replace("alpha = 1.0", "alpha = -1.0")).unwrap();
    let o = rhsim(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("alpha") && err.contains("must be > 0"), "{err}");
    assert_eq!(rhsim(&["run", "/nonexistent/config.toml"]).status.code(), Some(2));
}

#[test]
fn overflowing_rates_abort_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), CORE);
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replace("alpha = 1.0", "alpha = 1e308")
        .replace("gamma = 0.8", "gamma = 1e308");
    fs::write(&cfg, text).unwrap();
    let o = rhsim(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(3), "{o:?}");
}

#[test]
fn runs_are_bit_reproducible_and_manifests_complete() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = rhsim(&["run", &config(d.path(), CORE)]);
        assert!(o.status.success(), "{o:?}");
    }
    let (oa, ob) = (a.path().join("out"), b.path().join("out"));
    let listed = listed_files(&oa);
    let unique: BTreeSet<String> = listed.iter().cloned().collect();
    assert_eq!(unique.len(), listed.len(), "duplicate manifest rows");
    assert_eq!(unique, dir_files(&oa));
    for f in listed.iter().filter(|f| f.ends_with(".bin")) {
        assert_eq!(fs::read(oa.join(f)).unwrap(), fs::read(ob.join(f)).unwrap(), "{f}");
    }
    let diag = fs::read_to_string(oa.join("diagnostics.csv")).unwrap();
    assert_eq!(diag.lines().next(), Some("t,norm_X,conservation_residual,min"));
    assert_eq!(diag.lines().count(), 4);
}

#[test]
fn output_directory_can_be_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), CORE);
    let elsewhere = dir.path().join("elsewhere");
    let o = Command::new(env!("CARGO_BIN_EXE_rhsim"))
        .args(["run", &cfg])
        .env("RHSIM_OUTPUT_DIR", &elsewhere)
        .output()
        .unwrap();
    assert!(o.status.success(), "{o:?}");
    assert!(elsewhere.join(MANIFEST).exists());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn rendered_total_distribution_matches_manifest() {
    let dir = tempfile::tempdir().unwrap();
    assert!(rhsim(&["run", &config(dir.path(), CORE)]).status.success());
    let out = dir.path().join("out");
    let png = dir.path().join("wbar.png");
    let o = rhsim(&["render", out.join("wbar_0002.bin").to_str().unwrap(), png.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert!(text.contains("(match)"), "{text}");
    let rendered: f64 = text
        .split_whitespace()
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    let entry = read_manifest(&out.join(MANIFEST))
        .unwrap()
        .into_iter()
        .find(|e| e.file == "wbar_0002.bin")
        .unwrap();
    assert!((rendered - entry.integral.unwrap()).abs() <= 1e-12 * rendered);
    // total population is conserved, so w̄ integrates to the initial mass
    assert!((rendered - 2.0).abs() < 1e-10);
    assert!(png.exists());
}

#[test]
fn zero_field_renders_uniformly() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("zero.bin");
    Snapshot::from(ScalarField::zeros(GridSpec::new(4.0, 8).unwrap())).save(&snap).unwrap();
    let png = dir.path().join("zero.png");
    let o = rhsim(&["render", snap.to_str().unwrap(), png.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let img = image::open(&png).unwrap().to_rgb8();
    // heatmap area: 16 px margin, 36 px title band, 8 cells of 64 px
    let first = *img.get_pixel(16, 36);
    for x in 16..16 + 512 {
        for y in 36..36 + 512 {
            assert_eq!(*img.get_pixel(x, y), first, "pixel ({x}, {y})");
        }
    }
}

#[test]
fn render_reductions_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(rhsim(&["run", &config(dir.path(), CORE)]).status.success());
    let v = dir.path().join("out/v_0002.bin");
    let png = dir.path().join("v.png");
    for reduce in ["--reduce=home", "--reduce=position", "--reduce=slice:8,8"] {
        let o = rhsim(&["render", v.to_str().unwrap(), png.to_str().unwrap(), reduce]);
        assert!(o.status.success(), "{reduce}: {o:?}");
    }
    let o = rhsim(&["render", v.to_str().unwrap(), png.to_str().unwrap(), "--reduce=slice:99,0"]);
    assert_eq!(o.status.code(), Some(2));
    let bogus = dir.path().join("bogus.bin");
    fs::write(&bogus, b"not a snapshot").unwrap();
    let o = rhsim(&["render", bogus.to_str().unwrap(), png.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn epidemic_run_writes_curve() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"model = "epidemic"
[init]
preset = "point-column"
node = [8, 8]
mass = 1.0
[seed]
preset = "point-column"
node = [8, 8]
mass = 0.05
[run]
T = 0.5
dt = 0.05
sample_every = 5
"#;
    let cfg = config(dir.path(), body);
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replace("sigma = 1.2", "sigma = 1.2\nkappa1 = 1.0\nkappa2 = 0.5\nnu1 = 0.1\nnu2 = 0.1");
    fs::write(&cfg, text).unwrap();
    let o = rhsim(&["run", &cfg]);
    assert!(o.status.success(), "{o:?}");
    let out = dir.path().join("out");
    let curve = fs::read_to_string(out.join("epidemic_curve.csv")).unwrap();
    let rows: Vec<&str> = curve.lines().collect();
    assert_eq!(rows[0], "t,S1,I1,S2,I2");
    assert_eq!(rows.len(), 4);
    let first: Vec<f64> = rows[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 1.0, 0.05, 0.0, 0.0]);
    assert_eq!(dir_files(&out), listed_files(&out).into_iter().collect());
}

#[test]
fn colonization_run_conserves_population_without_vital_dynamics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &CORE.replace("model = \"core\"", "model = \"colonization\""));
    fs::write(&cfg, fs::read_to_string(&cfg).unwrap().replace("sigma = 1.2", "sigma = 1.2\np = 0.3")).unwrap();
    let o = rhsim(&["run", &cfg]);
    assert!(o.status.success(), "{o:?}");
    let diag = fs::read_to_string(dir.path().join("out/diagnostics.csv")).unwrap();
    for line in diag.lines().skip(1) {
        let residual: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(residual.abs() < 1e-12, "{line}");
    }
}

#[test]
fn verify_quick_passes() {
    let o = rhsim(&["verify", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
}

#[test]
fn sample_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = rhsim_cli::config::Config::load(&path).unwrap();
        let grid = cfg.grid().unwrap();
        cfg.core_params().unwrap();
        cfg.init.build(grid, &dir).unwrap();
        if cfg.model == rhsim_cli::config::ModelKind::Epidemic {
            cfg.epidemic_params().unwrap();
            cfg.seed.as_ref().unwrap().build(grid, &dir).unwrap();
        }
        if cfg.model != rhsim_cli::config::ModelKind::Equilibrium {
            cfg.schedule().unwrap();
        }
        seen += 1;
    }
    assert_eq!(seen, 3);
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(dir.parent().unwrap()).unwrap();
    dir
}

fn recspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recspec")).args(args).output().unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = vec!["--out", dir.to_str().unwrap()];
    all.extend_from_slice(args);
    recspec(&all)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn error_record(o: &Output) -> Value {
    let err = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(err.lines().last().unwrap()).unwrap()
}

#[test]
fn lemma_g_check_passes() {
    let dir = scratch("lemma_g");
    let o = run_in(&dir, &["--seed", "7", "verify", "lemma-g", "--alphabet", "3", "--trials", "300"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(dir.join("lemma_g.json"));
    assert_eq!(j["violations"], 0);
    assert!(j["checked"].as_u64().unwrap() > 300);
    let csv = fs::read_to_string(dir.join("lemma_g.csv")).unwrap();
    assert_eq!(csv.lines().count(), 301);
}

#[test]
fn cantor_dimension_from_preset_and_file() {
    let dir = scratch("cantor_preset");
    assert_eq!(code(&run_in(&dir, &["dimension", "--map", "cantor3"])), 0);
    let csv = fs::read_to_string(dir.join("dimension.csv")).unwrap();
    let d: f64 = csv.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((d - 2f64.ln() / 3f64.ln()).abs() < 1e-10);

    let file = scratch("cantor_file");
    fs::create_dir_all(&file).unwrap();
    let map = file.join("cantor.toml");
    fs::write(
        &map,
        "name = \"thirds\"\n[[branch]]\ndomain = [0.0, 0.3333333333333333]\nimage = [0.0, 1.0]\n\
         [[branch]]\ndomain = [0.6666666666666666, 1.0]\nimage = [0.0, 1.0]\n",
    )
    .unwrap();
    let out = file.join("out");
    assert_eq!(code(&run_in(&out, &["dimension", "--map", map.to_str().unwrap()])), 0);
    let csv = fs::read_to_string(out.join("dimension.csv")).unwrap();
    assert!(csv.contains("thirds,1,0.63092975"), "{csv}");
}

#[test]
fn hole_pressures_climb_to_entropy() {
    let dir = scratch("holes");
    assert_eq!(code(&run_in(&dir, &["holes", "--map", "doubling", "--family", "ones", "--n-max", "20"])), 0);
    let csv = fs::read_to_string(dir.join("holes.csv")).unwrap();
    let p: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(p.len(), 20);
    assert!(p.windows(2).all(|w| w[1] >= w[0]));
    assert!(p[19] < 2f64.ln() && 2f64.ln() - p[19] < 1e-5);
}

#[test]
fn pressure_on_shift_file() {
    let dir = scratch("pressure_shift");
    fs::create_dir_all(&dir).unwrap();
    let shift = dir.join("golden.txt");
    fs::write(&shift, "# no 11\n2\n0 0\n0 1\n1 0\n").unwrap();
    let out = dir.join("out");
    assert_eq!(code(&run_in(&out, &["pressure", "--shift", shift.to_str().unwrap()])), 0);
    let csv = fs::read_to_string(out.join("pressure.csv")).unwrap();
    let p: f64 = csv.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!((p - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-10);
}

#[test]
fn same_seed_same_bytes() {
    let args = ["--seed", "11", "construct", "--alpha", "0.2", "--beta", "0.5", "--horizon", "200000", "--save-word"];
    let a = scratch("repro_a");
    let b = scratch("repro_b");
    assert_eq!(code(&run_in(&a, &args)), 0);
    assert_eq!(code(&run_in(&b, &args)), 0);
    for f in ["ell.csv", "construct.json", "word.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let c = scratch("repro_c");
    let mut other = args;
    other[1] = "12";
    assert_eq!(code(&run_in(&c, &other)), 0);
    assert_ne!(fs::read(a.join("word.txt")).unwrap(), fs::read(c.join("word.txt")).unwrap());
}

#[test]
fn construct_reports_identity_and_marker() {
    let dir = scratch("construct");
    assert_eq!(code(&run_in(&dir, &["construct", "--alpha", "0.3", "--beta", "0.3", "--horizon", "1000000"])), 0);
    let j = json(dir.join("construct.json"));
    assert_eq!(j["identity"]["holds"], true);
    assert_eq!(j["marker"], "001011");
    assert_eq!(j["source"]["n"], 6);
    let lo = j["symbolic"]["lower"].as_f64().unwrap();
    let hi = j["symbolic"]["upper"].as_f64().unwrap();
    assert!((lo - 0.3).abs() < 0.03 && (hi - 0.3).abs() < 0.03, "{lo} {hi}");
}

#[test]
fn manifest_lists_outputs() {
    let dir = scratch("manifest");
    assert_eq!(code(&run_in(&dir, &["--seed", "5", "spectrum", "ladder", "--n-max", "8"])), 0);
    let m = json(dir.join("manifest.json"));
    assert_eq!(m["tool"], "recspec");
    assert_eq!(m["config"]["seed"], 5);
    let files: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|o| o["file"].as_str().unwrap()).collect();
    assert_eq!(files, ["ladder.csv", "ladder.json"]);
    let ladder = json(dir.join("ladder.json"));
    assert_eq!(ladder["skipped"], serde_json::json!([4, 5]));
}

#[test]
fn dry_run_writes_nothing() {
    let dir = scratch("dry");
    let o = run_in(&dir, &["--dry-run", "construct", "--alpha", "0.1", "--beta", "0.4"]);
    assert_eq!(code(&o), 0);
    assert!(!dir.exists());
    let plan: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(plan["map"], "doubling");
}

#[test]
fn config_file_expands_to_arguments() {
    let dir = scratch("config");
    fs::create_dir_all(&dir).unwrap();
    let out = dir.join("out");
    let cfg = dir.join("run.toml");
    fs::write(
        &cfg,
        format!("command = \"holes\"\nseed = 3\nout = {:?}\n[params]\nmap = \"doubling\"\nfamily = \"ones\"\nn_max = 4\n", out),
    )
    .unwrap();
    let o = recspec(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(out.join("holes.csv")).unwrap().lines().count(), 5);
    assert_eq!(json(out.join("manifest.json"))["config"]["seed"], 3);
}

#[test]
fn exit_codes() {
    let dir = scratch("exit");
    let o = run_in(&dir, &["dimension", "--map", "no-such-map"]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_record(&o)["error"]["exit_code"], 2);

    assert_eq!(code(&run_in(&dir, &["construct", "--alpha", "0.5", "--beta", "0.2"])), 2);
    assert_eq!(code(&run_in(&dir, &["construct", "--bogus"])), 2);
    assert_eq!(code(&recspec(&["--config", "/nonexistent/run.toml"])), 2);

    let o = run_in(&dir, &["construct", "--alpha", "0.1", "--beta", "0.2", "--n", "2"]);
    assert_eq!(code(&o), 3);
    assert_eq!(error_record(&o)["error"]["kind"], "SourceInfeasible");
    let o = run_in(&dir, &["recurrence", "--map", "doubling", "--point", "0.1234", "--horizon", "1000"]);
    assert_eq!(code(&o), 3);

    let o = run_in(&dir, &["construct", "--alpha", "0.3", "--beta", "0.3", "--horizon", "20"]);
    assert_eq!(code(&o), 4);
    assert_eq!(error_record(&o)["error"]["kind"], "HorizonTooShort");
    assert!(!dir.exists());
}

#[test]
fn sandwich_and_ae_run() {
    let dir = scratch("sandwich");
    let o = run_in(&dir, &["verify", "sandwich", "--map", "slopes24", "--points", "10", "--k-max", "10", "--horizon", "5000"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(dir.join("sandwich.json"))["violations"], 0);

    let dir = scratch("ae");
    let o = run_in(&dir, &["spectrum", "ae", "--samples", "16", "--horizon", "50000", "--weights", "1,3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(dir.join("ae.json"));
    let h = -(0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln()) / 2f64.ln();
    assert!((j["target"].as_f64().unwrap() - h).abs() < 1e-9);
}

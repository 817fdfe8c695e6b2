use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn stellar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stellar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = stellar(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn header(csv: &str) -> &str {
    csv.lines().next().unwrap()
}

/// Spin-coherent state of spin N/2 at stereographic coordinate γ.
fn sc_file(n: usize, gamma: (f64, f64)) -> String {
    let binom = |k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    let mut coeffs = Vec::new();
    let (mut re, mut im) = (1.0, 0.0);
    for k in 0..=n {
        let w = binom(k).sqrt();
        coeffs.push([w * re, w * im]);
        (re, im) = (re * gamma.0 - im * gamma.1, re * gamma.1 + im * gamma.0);
    }
    let norm = coeffs.iter().map(|c| c[0] * c[0] + c[1] * c[1]).sum::<f64>().sqrt();
    let coeffs: Vec<[f64; 2]> = coeffs.iter().map(|c| [c[0] / norm, c[1] / norm]).collect();
    serde_json::json!({ "spin": format!("{n}/2"), "coeffs": coeffs }).to_string()
}

const GHZ: &str = r#"{"spin": "3/2", "coeffs": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}"#;

#[test]
fn ghz_stars_are_equatorial_at_thirds() {
    let dir = TempDir::new().unwrap();
    let ghz = put(&dir, "ghz.json", GHZ);
    let stars = json(&ok(&["stars", s(&ghz)]));
    let stars = stars.as_array().unwrap();
    assert_eq!(stars.len(), 3);
    for (star, k) in stars.iter().zip(0..) {
        assert!((f(&star["theta"]) - PI / 2.0).abs() < 1e-12);
        assert!((f(&star["phi"]) - 2.0 * PI * k as f64 / 3.0).abs() < 1e-12);
        assert_eq!(star["mult"], 1);
    }
}

#[test]
fn z_state_has_one_star_at_the_north_pole() {
    let dir = TempDir::new().unwrap();
    for n in 1..=6 {
        let mut coeffs = vec![[0.0, 0.0]; n + 1];
        coeffs[0] = [1.0, 0.0];
        let text = serde_json::json!({ "spin": format!("{n}/2"), "coeffs": coeffs }).to_string();
        let path = put(&dir, "z.json", &text);
        let out = ok(&["stars", s(&path), "--format", "csv"]);
        assert_eq!(out, format!("theta,phi,mult\n0.0,0.0,{n}\n"));
    }
}

#[test]
fn verify_is_deterministic_and_passes() {
    let a = stellar(&["verify", "--seed", "7"]);
    let b = stellar(&["verify", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("verify seed=7\n"));
    assert!(text.ends_with("12 checks, 0 failed\n"));
    let seq = stellar(&["verify", "--seed", "7", "--sequential"]);
    assert_eq!(seq.stdout, text.as_bytes());
}

#[test]
fn state_and_constellation_files_round_trip() {
    let dir = TempDir::new().unwrap();
    let state = dir.path().join("state.json");
    let stars = dir.path().join("stars.json");
    let again = dir.path().join("again.json");
    ok(&["state", "--random", "5/2", "--seed", "11", "--out", s(&state)]);
    ok(&["stars", s(&state), "--out", s(&stars)]);
    ok(&["state", s(&stars), "--out", s(&again)]);

    // The rebuilt state is the same ray.
    let coeffs = |p: &Path| -> Vec<(f64, f64)> {
        json(&fs::read_to_string(p).unwrap())["coeffs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| (f(&c[0]), f(&c[1])))
            .collect()
    };
    let (x, y) = (coeffs(&state), coeffs(&again));
    let (mut re, mut im) = (0.0, 0.0);
    for ((a, b), (c, d)) in x.iter().zip(&y) {
        re += a * c + b * d;
        im += a * d - b * c;
    }
    assert!((re.hypot(im) - 1.0).abs() < 1e-10);

    // Written files re-parse into identical values.
    let text = fs::read_to_string(&stars).unwrap();
    let restars = dir.path().join("restars.json");
    ok(&["stars", s(&again), "--out", s(&restars)]);
    let a: Vec<Value> = json(&text).as_array().unwrap().clone();
    let b: Vec<Value> = json(&fs::read_to_string(&restars).unwrap()).as_array().unwrap().clone();
    assert_eq!(a.len(), b.len());
    for (p, q) in a.iter().zip(&b) {
        assert!((f(&p["theta"]) - f(&q["theta"])).abs() < 1e-9);
        assert_eq!(p["mult"], q["mult"]);
    }
    // JSON and CSV carry the same shortest round-trip numbers.
    let csv = ok(&["state", "--random", "5/2", "--seed", "11", "--format", "csv"]);
    assert_eq!(header(&csv), "k,m,re,im");
    for (line, (re, im)) in csv.lines().skip(1).zip(&x) {
        let r: Vec<&str> = line.split(',').collect();
        assert_eq!((r[2].parse::<f64>().unwrap(), r[3].parse::<f64>().unwrap()), (*re, *im));
    }
    assert_eq!(csv.lines().nth(1).unwrap().split(',').nth(1), Some("2.5"));
}

#[test]
fn expand_reproduces_the_adapted_basis_coefficients() {
    let dir = TempDir::new().unwrap();
    let state = dir.path().join("state.json");
    let basis = dir.path().join("basis.json");
    ok(&["state", "--random", "2", "--seed", "3", "--out", s(&state)]);
    let adapted = json(&ok(&["adapted-basis", s(&state), "--basis-out", s(&basis)]));
    let expanded = json(&ok(&["expand", s(&state), s(&basis)]));
    assert_eq!(adapted["basis"].as_array().unwrap().len(), 5);
    assert!(f(&expanded["residual"]) < 1e-10);
    let (a, e) = (adapted["alphas"].as_array().unwrap(), expanded["alphas"].as_array().unwrap());
    for (x, y) in a.iter().zip(e) {
        assert!((f(&x[0]) - f(&y[0])).abs() < 1e-12 && (f(&x[1]) - f(&y[1])).abs() < 1e-12);
    }
    // c_1 … c_N sit on the stars.
    let stars = json(&ok(&["stars", s(&state)]));
    for (b, star) in adapted["basis"].as_array().unwrap()[1..].iter().zip(stars.as_array().unwrap()) {
        assert_eq!(b["theta"], star["theta"]);
        assert_eq!(b["phi"], star["phi"]);
    }
    let csv = ok(&["expand", s(&state), s(&basis), "--format", "csv"]);
    assert_eq!(header(&csv), "k,theta,phi,re,im");
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn husimi_outputs() {
    let dir = TempDir::new().unwrap();
    let state = dir.path().join("state.json");
    let grid = dir.path().join("grid.csv");
    ok(&["state", "--random", "2", "--seed", "5", "--out", s(&state)]);
    let out = json(&ok(&["husimi", s(&state), "--grid", "12", "--grid-out", s(&grid)]));
    assert_eq!(out["morse_count"], 2);
    let rc = f(&out["r_c"]);
    assert!(rc > 0.0 && rc < PI / 2.0);
    let criticals = out["criticals"].as_array().unwrap();
    assert_eq!(criticals.iter().filter(|c| c["kind"] == "GlobalMin").count(), 4);

    let text = fs::read_to_string(&grid).unwrap();
    assert_eq!(header(&text), "theta,phi,H,distance");
    assert_eq!(text.lines().count(), 1 + 144);
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[3] - v[2].sqrt().acos()).abs() < 1e-12);
        assert!(v[3] >= rc - 1e-9);
    }
    let csv = ok(&["husimi", s(&state), "--format", "csv"]);
    assert_eq!(header(&csv), "theta,phi,kind,value,saddle_phi,marginal,multiplicity");
    assert_eq!(csv.lines().count(), 1 + criticals.len());
}

#[test]
fn logmap_symmetric_pair() {
    let alpha = PI / 3.0;
    let out = ok(&["logmap", "--spin", "1", "--alpha", &alpha.to_string(), "--resolution", "30"]);
    assert_eq!(header(&out), "theta,phi,v1,v2,v3,v4,omega,flags,x,y,z");
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 900);
    for r in &rows {
        assert_eq!(r.len(), 11);
        let omega: f64 = r[6].parse().unwrap();
        match r[7] {
            "regular" => {
                let v: Vec<f64> = r[2..6].iter().map(|x| x.parse().unwrap()).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((norm - omega).abs() < 1e-9);
                assert_eq!(r[8..11], r[2..5]);
            }
            "cut_locus" => assert!(r[2..6].iter().chain(&r[8..11]).all(|x| x.is_empty())),
            other => panic!("unexpected flag {other}"),
        }
    }
    let p = ok(&["logmap", "--spin", "1", "--alpha", "1.0", "--resolution", "6", "--projection", "234"]);
    for l in p.lines().skip(1) {
        let r: Vec<&str> = l.split(',').collect();
        assert_eq!(r[8..11], r[3..6]);
    }
}

#[test]
fn logmap_stereo_direction_cloud() {
    let dir = TempDir::new().unwrap();
    let state = dir.path().join("state.json");
    ok(&["state", "--random", "3/2", "--seed", "9", "--out", s(&state)]);
    let out = ok(&["logmap", "--state", s(&state), "--resolution", "8", "--projection", "stereo"]);
    assert_eq!(header(&out), "theta,phi,v1,v2,v3,v4,v5,v6,omega,flags,x,y,z");
    let circles = out.lines().filter(|l| l.contains(",cut_circle,")).count();
    assert_eq!(circles, 3 * 9);
    for l in out.lines().skip(1) {
        let r: Vec<&str> = l.split(',').collect();
        if r[2].is_empty() {
            continue;
        }
        let u: Vec<f64> = r[2..8].iter().map(|x| x.parse().unwrap()).collect();
        assert!((u.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn superpose_with_trajectory() {
    let dir = TempDir::new().unwrap();
    let g1 = (0.2, 0.2);
    let g2 = (0.5f64.sqrt(), 0.5f64.sqrt());
    let s1 = put(&dir, "g1.json", &sc_file(3, g1));
    let s2 = put(&dir, "g2.json", &sc_file(3, g2));
    let traj = dir.path().join("traj.csv");
    let out = json(&ok(&[
        "superpose", "--a", "1,0", "--b", "0,-1", s(&s1), s(&s2), "--trajectory", "41", "--trajectory-out", s(&traj),
    ]));
    assert_eq!(out["constellation"].as_array().unwrap().len(), 3);
    assert_eq!(out["distinct"], 3);
    assert_eq!(out["mason_bound"], 2);
    assert_eq!(out["state"]["spin"], "3/2");

    let text = fs::read_to_string(&traj).unwrap();
    assert_eq!(header(&text), "t,k,re,im");
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 41 * 3);
    for r in &rows {
        let want = if r[0] == 0.0 {
            Some(g1)
        } else if (r[0] - PI / 2.0).abs() < 1e-12 {
            Some(g2)
        } else {
            None
        };
        if let Some((x, y)) = want {
            assert!((r[2] - x).abs() < 1e-12 && (r[3] - y).abs() < 1e-12, "{r:?}");
        }
    }

    let ghz = put(&dir, "ghz.json", GHZ);
    let e = stellar(&["superpose", "--a", "1,0", "--b", "1,0", s(&ghz), s(&s2), "--trajectory", "5", "--trajectory-out", s(&traj)]);
    assert_eq!(e.status.code(), Some(1));
}

#[test]
fn errors_map_to_exit_codes_with_context() {
    let dir = TempDir::new().unwrap();
    let bad = put(&dir, "bad.json", "{\n  \"spin\": \"3/2\",\n  \"coeffs\": [[1, 0], [0, 0]\n");
    let out = stellar(&["stars", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bad.json") && msg.contains("line"), "{msg}");

    let short = put(&dir, "short.json", r#"{"spin": "3/2", "coeffs": [[1, 0]]}"#);
    assert_eq!(stellar(&["stars", s(&short)]).status.code(), Some(1));
    let field = put(&dir, "field.json", r#"{"spin": "3/2", "coefs": [[1, 0]]}"#);
    let out = stellar(&["stars", s(&field)]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("coefs"));

    let ghz = put(&dir, "ghz.json", GHZ);
    assert_eq!(stellar(&["stars", s(&ghz), "--tol", "nope=1"]).status.code(), Some(1));
    assert_eq!(stellar(&["stars", s(&ghz), "--tol", "cluster"]).status.code(), Some(1));
    assert_eq!(stellar(&["stars", "missing.json"]).status.code(), Some(1));
    assert_eq!(stellar(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(stellar(&["logmap", "--spin", "2", "--alpha", "1"]).status.code(), Some(1));
    assert_eq!(stellar(&["--help"]).status.code(), Some(0));
}

#[test]
fn sc_state_file_has_one_multiple_star() {
    let dir = TempDir::new().unwrap();
    let near = put(&dir, "near.json", &sc_file(2, (0.3, 0.1)));
    let one = json(&ok(&["stars", s(&near)]));
    assert_eq!(one.as_array().unwrap().len(), 1);
    assert_eq!(one[0]["mult"], 2);
}

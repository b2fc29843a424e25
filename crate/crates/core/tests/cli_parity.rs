//! The binary must print exactly what the library computes, with the documented exit codes.

use std::path::Path;
use std::process::{Command, Output};

use cb_lab::campaign::{run_campaign, CampaignReport, CampaignSpec, Target};
use cb_lab::cb::is_cb;
use cb_lab::cover::{exists_cover, min_cover};
use cb_lab::generators::{Family, GenSpec};
use cb_lab::matroid::{exists_flat_cover, is_mcb, Matroid, McbMode};
use cb_lab::{FieldSpec, PointSet};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cb-lab"))
        .args(args)
        .env_remove("CB_LAB_NODE_BUDGET")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim_end().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn gf101() -> FieldSpec {
    FieldSpec::prime(101).unwrap()
}

#[test]
fn generate_matches_gen_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pts.json");
    let o = cli(&["generate", "--family", "rnc", "--params", "k=3,m=8", "--field", "101", "--seed", "5", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let lib = GenSpec::new(Family::Rnc { k: 3, m: 8 }, gf101(), 5).generate().unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), lib.points.to_json());

    let spec = GenSpec::new(Family::SkewLines { d: 2, counts: vec![5, 5] }, gf101(), 1);
    let spec_path = write(dir.path(), "spec.json", &spec.to_json());
    let o = cli(&["generate", "--spec", &spec_path]);
    assert_eq!(stdout(&o), spec.generate().unwrap().points.to_json());
}

#[test]
fn check_cb_matches_library_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ci = cb_lab::generators::gen_plane_curve_ci(3, 3, gf101(), 2).unwrap().points;
    let path = write(dir.path(), "ci.json", &ci.to_json());
    let o = cli(&["check-cb", "-i", &path, "--r", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), is_cb(&ci, 3).to_json());
    let o = cli(&["check-cb", "-i", &path, "--r", "4", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), is_cb(&ci, 4).to_json());

    let one = PointSet::from_i64(gf101(), 2, &[&[1, 2, 3]]).unwrap();
    let path = write(dir.path(), "one.json", &one.to_json());
    let o = cli(&["check-cb", "-i", &path, "--r", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness"));
}

#[test]
fn cover_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let skew = GenSpec::new(Family::SkewLines { d: 2, counts: vec![5, 5] }, gf101(), 3).generate().unwrap().points;
    let path = write(dir.path(), "skew.json", &skew.to_json());
    let o = cli(&["cover", "-i", &path, "--dim", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let lib = exists_cover(&skew, 2, 2).unwrap();
    assert_eq!(stdout(&o), lib.to_json());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["planes"].as_array().unwrap().len(), 2);

    let o = cli(&["cover", "-i", &path, "--dim", "2", "--max-length", "1", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), exists_cover(&skew, 2, 1).unwrap().to_json());

    let o = cli(&["cover", "-i", &path, "--min", "--json"]);
    assert_eq!(stdout(&o), min_cover(&skew).unwrap().to_json());
    let back: cb_lab::cover::CoverResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(back.to_json(), stdout(&o));
}

#[test]
fn budget_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let g = GenSpec::new(Family::SkewLines { d: 3, counts: vec![3, 3, 3] }, gf101(), 1).generate().unwrap().points;
    // First query whose search needs more than one node.
    let (d, l) = (1..=5)
        .flat_map(|d| (1..=d).map(move |l| (d, l)))
        .find(|&(d, l)| cb_lab::cover::exists_cover_with_budget(&g, d, l, 1).is_err())
        .unwrap();
    let path = write(dir.path(), "g.json", &g.to_json());
    let o = Command::new(env!("CARGO_BIN_EXE_cb-lab"))
        .args(["cover", "-i", &path, "--dim", &d.to_string(), "--max-length", &l.to_string()])
        .env("CB_LAB_NODE_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = cli(&["search", "--mode", "lower-bound", "--field", "3", "--ambient", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cli(&["cover", "-i", "/no/such/file.json", "--dim", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cli(&["check-cb", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn matroid_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let skew = GenSpec::new(Family::SkewLines { d: 2, counts: vec![4, 4] }, gf101(), 3).generate().unwrap().points;
    let path = write(dir.path(), "skew.json", &skew.to_json());
    let m = Matroid::from_points(&skew).unwrap();
    let o = cli(&["matroid", "-i", &path, "--mcb", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), serde_json::to_string(&is_mcb(&m, 2, McbMode::AllFlats).unwrap()).unwrap());
    let o = cli(&["matroid", "-i", &path, "--flat-cover", "1,1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["flats"], serde_json::to_value(exists_flat_cover(&m, &[1, 1]).unwrap()).unwrap());

    let fano = write(dir.path(), "fano.json", r#"{"flats":[[],[0],[1],[2],[3],[4],[5],[6],[0,1,2],[0,3,4],[0,5,6],[1,3,5],[1,4,6],[2,3,6],[2,4,5]]}"#);
    let o = cli(&["matroid", "-i", &fano, "--mcb", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn campaigns_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["verify-conjecture", "--d", "2", "--r", "2", "--trials", "6", "--seed", "11", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let cli_report: CampaignReport = serde_json::from_str(&stdout(&o)).unwrap();
    let lib = run_campaign(&CampaignSpec::new(Target::Conjecture, vec![2], vec![2], gf101(), 6, 11)).unwrap();
    assert_eq!(cli_report.deterministic_json(), lib.deterministic_json());

    let rec = write(dir.path(), "rec.json", &serde_json::to_string(&lib.records[2]).unwrap());
    let o = cli(&["verify-conjecture", "--replay", &rec, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["points_match"], true);
    assert_eq!(v["verdicts_match"], true);

    let mut spec = CampaignSpec::new(Target::Monotonicity, vec![2], vec![2, 3], gf101(), 4, 8);
    spec.node_budget = 1000;
    let spec_path = write(dir.path(), "c.json", &serde_json::to_string(&spec).unwrap());
    let o = cli(&["campaign", "--spec", &spec_path, "--json"]);
    let cli_report: CampaignReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cli_report.deterministic_json(), run_campaign(&spec).unwrap().deterministic_json());

    let o = cli(&["search", "--mode", "lower-bound", "--field", "3", "--ambient", "2", "--r", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let lib = cb_lab::campaign::exhaustive_lower_bound(FieldSpec::prime(3).unwrap(), 2, 2).unwrap();
    let cli_report: CampaignReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cli_report.deterministic_json(), lib.deterministic_json());
}

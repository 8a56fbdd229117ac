use std::path::Path;
use std::process::{Command, Output};

use geodesy_cli::schema::{MatricesFile, ScenarioFile, SolutionReportFile};
use geodesy_cli::{exit, plot, CliError, PlotKind};
use planar_geodesy::{align_similarity, SolutionKind};
use tempfile::TempDir;

fn geodesy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geodesy")).args(args).output().expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn gen_measure_solve_round_trip() {
    let dir = TempDir::new().unwrap();
    let (s, m, r) = (path(&dir, "s.json"), path(&dir, "m.json"), path(&dir, "r.json"));
    assert_eq!(geodesy(&["gen", "-t", "5", "-m", "4", "--seed", "7", "--out", &s]).status.code(), Some(exit::SUCCESS));
    assert_eq!(geodesy(&["measure", &s, "--out", &m]).status.code(), Some(exit::SUCCESS));
    assert_eq!(geodesy(&["solve", &m, "--out", &r]).status.code(), Some(exit::SUCCESS));

    let truth = serde_json::from_str::<ScenarioFile>(&read(&s)).unwrap().configuration().unwrap();
    let report: SolutionReportFile = serde_json::from_str(&read(&r)).unwrap();
    assert_eq!(report.solution_kind, SolutionKind::Unique);
    let sol = report.solutions[0].configuration().unwrap();
    let (_, rms) = align_similarity(&sol.all_points(), &truth.all_points(), false).unwrap();
    assert!(rms < 1e-6, "rms {rms}");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let run = |tag: &str| {
        let (s, m, r, svg) = (path(&dir, &format!("s{tag}")), path(&dir, &format!("m{tag}")), path(&dir, &format!("r{tag}")), path(&dir, &format!("p{tag}")));
        geodesy(&["gen", "-t", "4", "-m", "4", "--seed", "11", "--out", &s]);
        geodesy(&["measure", &s, "--jitter", "1e-9", "--seed", "2", "--out", &m]);
        geodesy(&["solve", &m, "--seed", "5", "--out", &r]);
        geodesy(&["plot", &r, "--kind", "circles-regions", "--out", &svg]);
        [read(s), read(m), read(r), read(svg)]
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn stdout_when_no_out_is_given() {
    let out = geodesy(&["gen", "-t", "4", "-m", "3", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(exit::SUCCESS));
    let s: ScenarioFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((s.t, s.m, s.seed), (4, 3, Some(1)));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(geodesy(&["gen", "-t", "2"]).status.code(), Some(exit::INVALID_INPUT));
    assert_eq!(geodesy(&["measure", &path(&dir, "missing.json")]).status.code(), Some(exit::INVALID_INPUT));

    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, "{\"kind\": \"scenario\"").unwrap();
    assert_eq!(geodesy(&["measure", &bad]).status.code(), Some(exit::INVALID_INPUT));

    let (s, m) = (path(&dir, "s.json"), path(&dir, "m.json"));
    geodesy(&["gen", "-t", "4", "-m", "4", "--family", "cyclic-cubic", "--seed", "3", "--out", &s]);
    geodesy(&["measure", &s, "--out", &m]);
    assert_eq!(geodesy(&["solve", &m]).status.code(), Some(exit::DEGENERATE));

    geodesy(&["gen", "-t", "5", "-m", "4", "--seed", "3", "--out", &s]);
    geodesy(&["measure", &s, "--out", &m]);
    let mut matrices: MatricesFile = serde_json::from_str(&read(&m)).unwrap();
    matrices.double[0][0] = [0.0, 1.0];
    matrices.double[1][1] = [-1.0, 0.0];
    matrices.double[2][2] = [0.6, 0.8];
    std::fs::write(&m, serde_json::to_string(&matrices).unwrap()).unwrap();
    assert_eq!(geodesy(&["solve", &m, "--restarts", "8"]).status.code(), Some(exit::NO_SOLUTION));
}

#[test]
fn directed_flag_needs_a_directed_matrix() {
    let dir = TempDir::new().unwrap();
    let (s, m) = (path(&dir, "s.json"), path(&dir, "m.json"));
    geodesy(&["gen", "-t", "4", "-m", "4", "--seed", "2", "--out", &s]);
    geodesy(&["measure", &s, "--out", &m]);
    let mut matrices: MatricesFile = serde_json::from_str(&read(&m)).unwrap();
    matrices.directed = None;
    std::fs::write(&m, serde_json::to_string(&matrices).unwrap()).unwrap();
    assert_eq!(geodesy(&["solve", &m, "--directed"]).status.code(), Some(exit::INVALID_INPUT));
}

#[test]
fn census_table_and_json() {
    let table = geodesy(&["census", "--shapes", "5,4", "-n", "3", "--restarts", "16"]);
    assert_eq!(table.status.code(), Some(exit::SUCCESS));
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().contains("3/3"), "{text}");

    let json = geodesy(&["census", "--shapes", "4,3;4,4", "-n", "2", "--restarts", "16", "--json"]);
    let file: geodesy_cli::CensusFile = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(file.rows.len(), 2);
    assert_eq!(file.rows[0].outcomes.get("infinite"), Some(&2));
    assert_eq!(geodesy(&["census", "--shapes", "4"]).status.code(), Some(exit::INVALID_INPUT));
}

#[test]
fn plots_are_svg_and_deterministic() {
    let cfg = geodesy_cli::generate(geodesy_cli::Family::Generic, 5, 3, 4).unwrap();
    let text = serde_json::to_string(&ScenarioFile::new(&cfg, Some(4), None)).unwrap();
    for kind in [PlotKind::Config, PlotKind::Twin, PlotKind::CirclesRegions] {
        let svg = plot(&text, kind).unwrap();
        assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("p1") && svg.contains("p4"));
        assert_eq!(svg, plot(&text, kind).unwrap());
    }
    assert!(plot(&text, PlotKind::Config).unwrap().contains("q3"));
    assert!(plot(&text, PlotKind::Twin).unwrap().contains("p'4"));
    assert!(plot(&text, PlotKind::CirclesRegions).unwrap().contains("10 regions"));
}

#[test]
fn reports_without_solutions_cannot_be_plotted() {
    let dir = TempDir::new().unwrap();
    let (s, m, r) = (path(&dir, "s.json"), path(&dir, "m.json"), path(&dir, "r.json"));
    geodesy(&["gen", "-t", "4", "-m", "3", "--seed", "1", "--out", &s]);
    geodesy(&["measure", &s, "--out", &m]);
    geodesy(&["solve", &m, "--out", &r]);
    let mut report: SolutionReportFile = serde_json::from_str(&read(&r)).unwrap();
    report.solutions.clear();
    let text = serde_json::to_string(&report).unwrap();
    assert!(matches!(plot(&text, PlotKind::Config), Err(CliError::UnplottableReport(_))));
    std::fs::write(&r, text).unwrap();
    assert_eq!(geodesy(&["plot", &r]).status.code(), Some(exit::INVALID_INPUT));

    let matrices = read(&m);
    assert!(matches!(plot(&matrices, PlotKind::Config), Err(CliError::Invalid(_))));
}

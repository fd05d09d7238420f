use std::path::PathBuf;

use polyprep::cli::{run, EXIT_INVALID, EXIT_OK, EXIT_UNDECIDED};
use polyprep::io::{PolyhedronReport, PrepareReport};

fn problem(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("problems");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn polyprep(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("polyprep").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn vertices(r: &polyprep::geometry::PolyhedronRecord) -> Vec<Vec<&str>> {
    let mut v: Vec<Vec<&str>> = r.vertices.iter().map(|p| p.iter().map(String::as_str).collect()).collect();
    v.sort();
    v
}

#[test]
fn polyhedron_command() {
    let (code, out, _) = polyprep(&["polyhedron", &problem("f_a.json")]);
    assert_eq!(code, EXIT_OK);
    let r: PolyhedronReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.m, 2);
    assert_eq!(vertices(&r.polyhedron), vec![vec!["0", "3"], vec!["1", "1/2"], vec!["2", "0"]]);

    let (code, out, _) = polyprep(&["polyhedron", &problem("f_d.json")]);
    assert_eq!(code, EXIT_OK);
    let r: PolyhedronReport = serde_json::from_str(&out).unwrap();
    assert_eq!(vertices(&r.polyhedron), vec![vec!["0", "1/2", "1"], vec!["1", "0", "0"]]);
    let mut support: Vec<Vec<&str>> = r.support.iter().map(|s| s.point.iter().map(String::as_str).collect()).collect();
    support.sort();
    assert!(support.contains(&vec!["1", "0", "1"]));
}

#[test]
fn violated_hypothesis_is_named() {
    let (code, out, err) = polyprep(&["polyhedron", &problem("in_parameter_ideal.json")]);
    assert_eq!(code, EXIT_INVALID);
    assert!(out.is_empty());
    assert!(err.contains("f ∉ (u1, …, ud)"), "{err}");
    let (code, _, err) = polyprep(&["prepare", "/nonexistent/file.json"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("/nonexistent/file.json"));
    let (code, _, _) = polyprep(&["prepare", "--mode", "sideways", &problem("f_a.json")]);
    assert_eq!(code, EXIT_INVALID);
}

#[test]
fn prepare_face_and_vertex() {
    let (code, out, _) = polyprep(&["prepare", "--mode", "face", &problem("f_b.json")]);
    assert_eq!(code, EXIT_OK);
    let r: PrepareReport = serde_json::from_str(&out).unwrap();
    assert_eq!((r.certificate.as_str(), r.steps, r.z.as_str()), ("PREPARED", 1, "y - u1/(u2 + 1)"));
    assert_eq!(vertices(&r.final_polyhedron), vec![vec!["5/2", "0"]]);

    let (code, out, err) = polyprep(&["prepare", "--mode", "vertex", "--max-iter", "10", "--trace", &problem("f_b.json")]);
    assert_eq!(code, EXIT_UNDECIDED);
    assert!(err.contains("undecided"));
    let r: PrepareReport = serde_json::from_str(&out).unwrap();
    let trace = r.trace.unwrap();
    let targets: Vec<&str> = trace.iter().map(|s| s.verdict.target.as_str()).collect();
    let expected: Vec<String> = (0..10).map(|k| format!("vertex (1,{k})")).collect();
    assert_eq!(targets, expected.iter().map(String::as_str).collect::<Vec<_>>());
}

#[test]
fn prepare_empty_and_mixed() {
    let (code, out, _) = polyprep(&["prepare", &problem("f_c.json")]);
    assert_eq!(code, EXIT_OK);
    let r: PrepareReport = serde_json::from_str(&out).unwrap();
    assert_eq!((r.certificate.as_str(), r.z.as_str()), ("EMPTY", "y^2 + y - u1"));

    let (code, out, _) = polyprep(&["prepare", "--trace", &problem("f_e.json")]);
    assert_eq!(code, EXIT_OK);
    let r: PrepareReport = serde_json::from_str(&out).unwrap();
    let lambdas: Vec<String> = r.trace.unwrap().iter().map(|s| s.verdict.lambda.clone().unwrap()).collect();
    assert_eq!(lambdas, vec!["2 mod 3", "1 mod 3"]);
}

#[test]
fn recentered_file_matches_fixture() {
    let (_, a, _) = polyprep(&["prepare", &problem("f_a.json")]);
    let (_, b, _) = polyprep(&["prepare", &problem("f_a_shifted.json")]);
    let a: PrepareReport = serde_json::from_str(&a).unwrap();
    let b: PrepareReport = serde_json::from_str(&b).unwrap();
    assert_eq!(a.z, b.z);
    assert_eq!(a.final_polyhedron, b.final_polyhedron);
}

#[test]
fn jobs_do_not_change_output() {
    let files: Vec<String> = ["f_a.json", "f_b.json", "f_c.json", "f_d.json", "f_e.json"].iter().map(|f| problem(f)).collect();
    let mut seq = vec!["prepare", "--trace"];
    seq.extend(files.iter().map(String::as_str));
    let mut par = seq.clone();
    par.extend(["--jobs", "4"]);
    let (c1, o1, _) = polyprep(&seq);
    let (c2, o2, _) = polyprep(&par);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(o1, o2);
}

#[test]
fn render_is_deterministic() {
    let (code, a, _) = polyprep(&["render", &problem("f_a.json")]);
    assert_eq!(code, EXIT_OK);
    let (_, b, _) = polyprep(&["render", &problem("f_a.json")]);
    assert_eq!(a, b);
    assert!(a.starts_with("<svg"));
    assert_eq!(a.matches("<polyline").count(), 2);
    assert!(a.contains("initial: (0,3) (1,1/2) (2,0)"));
    assert!(a.contains("final (PREPARED): (1,1/2)"));

    let (code, d, _) = polyprep(&["render", "--projection", "1,3", &problem("f_d.json")]);
    assert_eq!(code, EXIT_OK);
    assert!(d.contains("initial: (0,1) (1,0)"));
    let (code, from_file, _) = polyprep(&["render", &problem("f_d.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(from_file, d);
    let (code, _, err) = polyprep(&["render", "fixture:f_D"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("projection"));

    let dir = std::env::temp_dir().join(format!("polyprep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f_b.svg");
    let (code, _, _) = polyprep(&["prepare", "--render", path.to_str().unwrap(), &problem("f_b.json")]);
    assert_eq!(code, EXIT_OK);
    assert!(std::fs::read_to_string(&path).unwrap().contains("(5/2,0)"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn single_vertex_quadrant() {
    use polyprep::exactnum::rat;
    use polyprep::geometry::hull_from_points;
    use polyprep::render::{render_svg, Layer};
    let q = hull_from_points(2, &[vec![rat(1, 1), rat(0, 1)]]).unwrap();
    let svg = render_svg(&[Layer { label: "q".into(), polyhedron: q }], ["u1", "u2"]).unwrap();
    assert_eq!(svg.matches("<circle").count(), 1);
    assert!(svg.contains(r#"<polyline points="240,48 240,432 432,432""#), "{svg}");
}

#[test]
fn selftest_passes() {
    let (code, out, _) = polyprep(&["selftest"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(out.lines().filter(|l| l.contains("PASS")).count(), 5);
}

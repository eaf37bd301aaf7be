use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn opbvp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opbvp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("problems")
        .join(name)
}

/// Value of `key = value` in a solve report.
fn field(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.trim().strip_prefix(&format!("{key} = ")))
        .and_then(|v| v.split_whitespace().next())
        .unwrap_or_else(|| panic!("no `{key}` in {report}"))
        .parse()
        .unwrap()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn assert_one_line_error(o: &Output) {
    assert!(!o.status.success(), "expected failure: {}", stdout(o));
    let err = stderr(o);
    assert_eq!(err.lines().count(), 1, "stderr: {err:?}");
    assert!(err.ends_with('\n'));
}

#[test]
fn worked_problems_all_pass() {
    let o = opbvp(&["paper", "--example", "all"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let table = stdout(&o);
    assert_eq!(table.lines().filter(|l| l.ends_with("PASS")).count(), 8);
    assert!(!table.contains("FAIL"));
}

#[test]
fn worked_problems_single_example() {
    let o = opbvp(&["paper", "--example", "3"]);
    assert!(o.status.success());
    let rows: Vec<_> = stdout(&o).lines().skip(1).map(String::from).collect();
    assert_eq!(rows.len(), 2);
    let cols: Vec<&str> = rows[0].split_whitespace().collect();
    assert_eq!(&cols[..3], &["3", "9", "11"]);
    assert!(cols[3].parse::<f64>().unwrap() <= 5e-4);
}

#[test]
fn worked_problem_csvs_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        let o = opbvp(&["paper", "--csv-dir", dir.path().to_str().unwrap()]);
        assert!(o.status.success());
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "example1_n10.csv",
            "example1_n7.csv",
            "example2_n12.csv",
            "example2_n7.csv",
            "example3_n11.csv",
            "example3_n9.csv",
            "example4_n10.csv",
            "example4_n7.csv",
        ]
    );
    for name in &names {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let ex3 = std::fs::read_to_string(a.path().join("example3_n9.csv")).unwrap();
    assert!(ex3.starts_with("x,y_approx,y_reference,abs_err\n"));
    assert_eq!(ex3.lines().count(), 1002);
}

#[test]
fn solve_linear_problem() {
    let o = opbvp(&["solve", problem("linear.txt").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = stdout(&o);
    assert_eq!(field(&r, "n"), 4.0);
    assert!(field(&r, "c[0]").abs() < 1e-12);
    assert!((field(&r, "c[1]") - 1.0).abs() < 1e-12);
    assert!(field(&r, "max_abs_error") < 1e-12);
}

#[test]
fn solve_example_files() {
    for (name, bound) in [
        ("example1.txt", 5e-5),
        ("example2.txt", 1e-7),
        ("example4.txt", 5e-7),
    ] {
        let o = opbvp(&["solve", problem(name).to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let r = stdout(&o);
        let err = field(&r, "max_abs_error");
        assert!(err <= bound, "{name}: {err}");
        assert!(field(&r, "bc_residual_max") < 1e-9);
        let n = field(&r, "n") as usize;
        let degree = field(&r, "degree") as usize;
        assert!(degree <= n + 9);
    }
    // No closed form: the report has no error line.
    let o = opbvp(&["solve", problem("example3.txt").to_str().unwrap()]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("max_abs_error"));
}

#[test]
fn solve_writes_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("out.csv");
    let o = opbvp(&[
        "solve",
        problem("example1.txt").to_str().unwrap(),
        "--grid",
        "11",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y_approx,y_exact,abs_err");
    assert_eq!(lines.len(), 12);
    let last: Vec<f64> = lines[11].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(last[0], 1.0);
    assert!((last[1] - 5.0).abs() < 1e-9);
    assert!((last[3] - (last[1] - last[2]).abs()).abs() == 0.0);

    let plain = dir.path().join("plain.csv");
    let o = opbvp(&[
        "solve",
        problem("example3.txt").to_str().unwrap(),
        "--grid",
        "3",
        "--csv",
        plain.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&plain).unwrap();
    assert!(text.starts_with("x,y_approx\n0,0\n0.5,"));
}

#[test]
fn solve_on_a_shifted_interval() {
    let dir = TempDir::new().unwrap();
    // y'' = y on [1, 3] with y = cosh(x - 1).
    let contents = format!(
        "order = 2\ninterval = 1 3\ncoeff[0] = -1\nrhs = 0\nbc = left 0 1\n\
         bc = right 0 {}\nn = 12\nexact = (exp(x - 1) + exp(1 - x))/2\n",
        2f64.cosh()
    );
    let file = write(&dir, "shifted.txt", &contents);
    let o = opbvp(&["solve", file.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(field(&stdout(&o), "max_abs_error") < 1e-9);
}

#[test]
fn basis_and_opmatrix_csv() {
    let o = opbvp(&["basis", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1\n");

    let o = opbvp(&["basis", "5"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 6);
    let row5: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    let s = 11f64.sqrt();
    for (got, want) in row5.iter().zip([-1.0, 30.0, -210.0, 560.0, -630.0, 252.0]) {
        assert!((got - s * want).abs() < 1e-10 * want.abs());
    }
    let row0 = text.lines().next().unwrap();
    assert_eq!(row0, "1,0,0,0,0,0");

    let o = opbvp(&["opmatrix", "1"]);
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
        .collect();
    let t = 0.5 / 3f64.sqrt();
    assert_eq!(rows, vec![vec![0.5, t], vec![-t, 0.0]]);
}

#[test]
fn approx_reports_errors() {
    let o = opbvp(&["approx", "exp(x)", "--n", "8"]);
    assert!(o.status.success());
    let r = stdout(&o);
    assert!((field(&r, "c[0]") - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    assert!(field(&r, "max_abs_error") < 1e-9);
    assert!(field(&r, "l2_error_estimate") >= 0.0);

    // Leading minus is an expression, not a flag; -x^2 is -(x^2).
    let o = opbvp(&["approx", "-x^2", "--n", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((field(&stdout(&o), "c[0]") + 1.0 / 3.0).abs() < 1e-14);
}

#[test]
fn error_paths_print_one_line() {
    let dir = TempDir::new().unwrap();
    let good = std::fs::read_to_string(problem("example1.txt")).unwrap();
    let unknown = write(&dir, "unknown.txt", &format!("{good}colour = blue\n"));
    let bad_expr = write(&dir, "expr.txt", &good.replace("exp(-x)\n", "exp(-x\n"));
    let ill = write(
        &dir,
        "ill.txt",
        "order = 2\ninterval = 0 1\nrhs = 0\nbc = left 1 0\nbc = right 1 1\nn = 5\n",
    );
    let singular = write(
        &dir,
        "singular.txt",
        &good.replace("rhs      = exp(-x)", "rhs = log(x - 0.5)"),
    );
    let cases: Vec<Vec<String>> = vec![
        vec!["solve".into(), "/definitely/missing.txt".into()],
        vec!["solve".into(), unknown.display().to_string()],
        vec!["solve".into(), bad_expr.display().to_string()],
        vec!["solve".into(), ill.display().to_string()],
        vec!["solve".into(), singular.display().to_string()],
        vec!["basis".into(), "31".into()],
        vec!["opmatrix".into(), "0".into()],
        vec!["paper".into(), "--example".into(), "7".into()],
        vec!["approx".into(), "sin(".into()],
        vec!["approx".into(), "foo(x)".into()],
        vec![
            "approx".into(),
            "1/(x - 0.5)".into(),
            "--n".into(),
            "4".into(),
        ],
        vec!["solve".into(), "--grid".into(), "1".into(), "x.txt".into()],
        vec!["frobnicate".into()],
        vec![],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = opbvp(&refs);
        assert_one_line_error(&o);
    }
    let o = opbvp(&["solve", unknown.to_str().unwrap()]);
    assert!(stderr(&o).contains("line 11: unknown key `colour`"));
}

#[test]
fn failed_solve_leaves_no_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("never.csv");
    let ill = write(
        &dir,
        "ill.txt",
        "order = 2\ninterval = 0 1\nrhs = 0\nbc = left 1 0\nbc = right 1 1\nn = 5\n",
    );
    let o = opbvp(&[
        "solve",
        ill.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_one_line_error(&o);
    assert!(!csv.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn help_succeeds() {
    let o = opbvp(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("binds tighter than unary minus"));
}

use std::process::{Command, Output};

fn ga_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ga-lab")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn theory_lines() {
    assert_eq!(stdout(&ga_lab(&["theory", "separating_odd", "N=5", "d=2", "k=1"])), "separating_odd,N=5,d=2,k=1,0.4,false\n");
    assert!(stdout(&ga_lab(&["theory", "optimal_c"])).starts_with("optimal_c,1.6180339887"));
    let line = stdout(&ga_lab(&["theory", "ub_ga_dominant", "n=1000", "c=1"]));
    let value: f64 = line.trim().split(',').nth(3).unwrap().parse().unwrap();
    assert!((value - 9388.0).abs() < 1.0);
    let unknown = ga_lab(&["theory", "nonsense"]);
    assert!(!unknown.status.success());
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("ub_ga_full"));
}

#[test]
fn sweep_writes_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = ["one.csv", "eight.csv"].iter().map(|f| dir.path().join(f).display().to_string()).collect();
    for (path, workers) in paths.iter().zip(["1", "8"]) {
        let args = [
            "sweep", "--function", "onemax", "--n", "32", "--algo", "greedy2+1:2pt:dup-old", "--c-grid", "0.5:0.5:2",
            "--runs", "15", "--seed", "3", "--workers", workers, "--out", path,
        ];
        stdout(&ga_lab(&args));
    }
    let one = std::fs::read(&paths[0]).unwrap();
    assert_eq!(one, std::fs::read(&paths[1]).unwrap());
    let text = String::from_utf8(one).unwrap();
    assert!(text.starts_with("c,runs,successes,censored,mean,std,min,median,max\n0.5,15,15,0,"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn run_and_compare() {
    let run = stdout(&ga_lab(&["run", "--n", "50", "--algo", "ea", "--seed", "2"]));
    assert!(run.starts_with("evaluations=") && run.contains("success=true"));
    let censored = stdout(&ga_lab(&["run", "--n", "500", "--budget", "10"]));
    assert!(censored.starts_with("evaluations=10,") && censored.contains("success=false"));
    let cmp = stdout(&ga_lab(&[
        "compare", "--algo-a", "ea", "--algo-b", "ga:mu=5,lambda=1", "--function", "linear:1:2:3", "--n", "40",
        "--runs", "30", "--sided", "b-less",
    ]));
    assert!(cmp.contains("sided=b-less,p=") && cmp.contains("a_censored=0"));
}

#[test]
fn mwu_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    std::fs::write(&a, "1\n2\n3\n").unwrap();
    std::fs::write(&b, "4\n5\n6\n").unwrap();
    let out = stdout(&ga_lab(&["mwu", a.to_str().unwrap(), b.to_str().unwrap(), "--exact"]));
    assert!(out.starts_with("u=0,"), "{out}");
    assert!(out.contains("p_two_sided=0.1,") && out.contains("exact=true"));
    let less = stdout(&ga_lab(&["mwu", a.to_str().unwrap(), b.to_str().unwrap(), "--exact", "--sided", "a-less"]));
    assert!(less.trim_end().ends_with("p=0.05"), "{less}");
}

#[test]
fn rejected_input_exits_nonzero() {
    for args in [
        &["run", "--n", "50", "--algo", "greedy2+1:3pt"][..],
        &["run", "--n", "50", "--function", "royalroad:x"],
        &["sweep", "--n", "50", "--c-grid", "2:0.1:1"],
        &["run", "--n", "50", "--c", "80"],
        &["mwu", "/nonexistent/a", "/nonexistent/b"],
        &["theory", "ub_ga_dominant", "n=10"],
    ] {
        let out = ga_lab(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty());
    }
    let out = ga_lab(&["run", "--n", "50", "--algo", "ga:mu=2,lambda=x"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 15"));
}

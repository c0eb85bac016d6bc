//! End-to-end tests driving the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use exmarket_core::{fixtures, io, reductions};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_exmarket"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn check_reports_witness_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let market = dir.path().join("market.json");
    io::save_market(&market, &fixtures::two_agent_fee_market()).unwrap();

    let bad = dir.path().join("bad.json");
    io::save_allocation(
        &bad,
        &exmarket_core::Allocation::new(vec![0, 1]).unwrap(),
    )
    .unwrap();
    let out = run(&["check", path_str(&market), path_str(&bad), "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("unstable k=2"), "{text}");
    assert!(
        text.contains("X=[0,1] mu=[0->1,1->0] cost_total=0 gains=[1,1]"),
        "{text}"
    );

    let good = dir.path().join("good.json");
    io::save_allocation(
        &good,
        &exmarket_core::Allocation::new(vec![1, 0]).unwrap(),
    )
    .unwrap();
    let out = run(&["check", path_str(&market), path_str(&good), "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("stable k=2"));
}

#[test]
fn assignment_solver_and_potential() {
    let dir = tempfile::tempdir().unwrap();
    let market = dir.path().join("market.json");
    io::save_market(&market, &fixtures::two_agent_fee_market()).unwrap();

    let alloc = dir.path().join("alloc.json");
    let out = run(&["solve", "assignment", path_str(&market), "-o", path_str(&alloc)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(io::load_allocation(&alloc).unwrap().as_slice(), &[1, 0]);

    let out = run(&["potential", path_str(&market), path_str(&alloc)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "34");
}

#[test]
fn maxcut_pipeline_recovers_local_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("graph.json");
    let market = dir.path().join("market.json");
    let map = dir.path().join("map.json");
    let alloc = dir.path().join("alloc.json");
    let trace = dir.path().join("trace.txt");
    let cut = dir.path().join("cut.json");

    let out = run(&[
        "gen", "maxcut", "--vertices", "7", "--max-degree", "5", "--seed", "13",
        "-o", path_str(&graph),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "reduce", "maxcut", path_str(&graph),
        "-o", path_str(&market), "--map", path_str(&map),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "solve", "local2", path_str(&market),
        "--trace", path_str(&trace), "-o", path_str(&alloc),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = run(&[
        "recover-cut", "--map", path_str(&map),
        "--alloc", path_str(&alloc), "-o", path_str(&cut),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let graph = io::load_maxcut(&graph).unwrap();
    let cut = io::load_cut(&cut).unwrap();
    assert!(reductions::is_local_maxcut(&graph, &cut).unwrap());

    // Trace lines carry strictly increasing potentials.
    let trace = std::fs::read_to_string(&trace).unwrap();
    for line in trace.lines() {
        let fields: Vec<i64> = line
            .split_whitespace()
            .map(|f| f.parse().unwrap())
            .collect();
        assert_eq!(fields.len(), 5, "{line}");
        assert!(fields[4] > fields[3], "{line}");
    }
}

#[test]
fn checkgame_reduction_tracks_check_eq_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let game_path = dir.path().join("game.json");
    let out = run(&[
        "gen", "coordgame", "--players", "3", "--strategies", "3",
        "--max-degree", "2", "--seed", "5", "-o", path_str(&game_path),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let game = io::load_game(&game_path).unwrap();
    for (idx, profile) in game.all_profiles().enumerate().take(6) {
        let profile_path = dir.path().join(format!("profile{idx}.json"));
        io::save_profile(&profile_path, &profile).unwrap();
        let eq = run(&[
            "check-eq", path_str(&game_path), path_str(&profile_path), "--k", "2",
        ]);
        assert!(matches!(eq.status.code(), Some(0) | Some(1)));

        let market = dir.path().join(format!("market{idx}.json"));
        let alloc = dir.path().join(format!("alloc{idx}.json"));
        let map = dir.path().join(format!("map{idx}.json"));
        let red = run(&[
            "reduce", "checkgame", path_str(&game_path), path_str(&profile_path),
            "--k", "2", "-o", path_str(&market),
            "--alloc-out", path_str(&alloc), "--map", path_str(&map),
        ]);
        assert_eq!(red.status.code(), Some(0));
        let text = stdout(&red);
        let level = text
            .trim()
            .rsplit(' ')
            .next()
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or_else(|| panic!("unexpected output: {text}"));

        let check = run(&[
            "check", path_str(&market), path_str(&alloc), "--k", &level.to_string(),
        ]);
        assert_eq!(
            check.status.code(),
            eq.status.code(),
            "profile {idx}: verdicts diverge"
        );
    }
}

#[test]
fn local2_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("graph.json");
    let market = dir.path().join("market.json");
    let map = dir.path().join("map.json");
    run(&[
        "gen", "maxcut", "--vertices", "6", "--max-degree", "4", "--seed", "3",
        "-o", path_str(&graph),
    ]);
    run(&[
        "reduce", "maxcut", path_str(&graph),
        "-o", path_str(&market), "--map", path_str(&map),
    ]);
    let solve = |name: &str| -> PathBuf {
        let alloc = dir.path().join(name);
        let out = run(&[
            "solve", "local2", path_str(&market), "--init", "random",
            "--seed", "42", "--pivot", "first", "-o", path_str(&alloc),
        ]);
        assert_eq!(out.status.code(), Some(0));
        alloc
    };
    let a = io::load_allocation(&solve("a.json")).unwrap();
    let b = io::load_allocation(&solve("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn validation_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    let alloc = dir.path().join("alloc.json");
    io::save_allocation(&alloc, &exmarket_core::Allocation::identity(2)).unwrap();

    let out = run(&["check", path_str(&garbage), path_str(&alloc), "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("missing.json");
    let out = run(&["potential", path_str(&missing), path_str(&alloc)]);
    assert_eq!(out.status.code(), Some(2));

    // Allocation length mismatch against the market.
    let market = dir.path().join("market.json");
    io::save_market(&market, &fixtures::two_agent_fee_market()).unwrap();
    let long = dir.path().join("long.json");
    io::save_allocation(&long, &exmarket_core::Allocation::identity(3)).unwrap();
    let out = run(&["check", path_str(&market), path_str(&long), "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));

    // Class mismatch for the assignment solver: a path agent graph.
    let general = exmarket_core::MarketInstance::new(
        3,
        vec![(0, 1, 1), (1, 2, 1)],
        vec![],
        vec![vec![0; 3]; 3],
        vec![exmarket_core::CostSpec::Trivial; 3],
    )
    .unwrap();
    io::save_market(&market, &general).unwrap();
    let out = run(&["solve", "assignment", path_str(&market), "-o", path_str(&alloc)]);
    assert_eq!(out.status.code(), Some(2));
}

use std::path::{Path, PathBuf};
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use algebroidkit_cli::{exit_code, load_str, run_task, to_json, Options, Task};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("golden").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_algebroidkit")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn goldens_match_and_are_deterministic() {
    for task in Task::ALL {
        for (suffix, want) in [("", 0), (".corrupt", 1)] {
            let input = golden(&format!("{}{suffix}.json", task.name()));
            let expected = std::fs::read_to_string(golden(&format!("{}{suffix}.expected.txt", task.name()))).unwrap();
            let path = input.to_str().unwrap();
            let (code, first, _) = run(&[task.name(), path]);
            let (code2, second, _) = run(&[task.name(), path]);
            assert_eq!(code, want, "{task}{suffix}");
            assert_eq!(code2, want);
            assert_eq!(first, second, "{task}{suffix} is not deterministic");
            assert_eq!(first, expected, "{task}{suffix} drifted from its golden");
        }
    }
}

#[test]
fn corrupt_goldens_carry_a_nonzero_witness() {
    for task in Task::ALL {
        let input = golden(&format!("{}.corrupt.json", task.name()));
        let (code, out, _) = run(&[task.name(), input.to_str().unwrap(), "--json"]);
        assert_eq!(code, 1);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["status"], "invalid");
        let witnessed = v["checks"].as_array().unwrap().iter().any(|c| {
            c["valid"] == false && c["witness"]["terms"].as_array().is_some_and(|t| !t.is_empty())
        });
        assert!(witnessed, "{task}: no nonzero witness");
    }
}

#[test]
fn timing_stays_on_stderr() {
    let input = golden("verify-algebroid.json");
    let (code, out, err) = run(&["verify-algebroid", input.to_str().unwrap(), "--json"]);
    assert_eq!(code, 0);
    assert!(!out.contains("elapsed"));
    assert!(err.contains("elapsed"));
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let good = golden("verify-algebroid.json");
    let good = good.to_str().unwrap();
    assert_eq!(run(&["no-such-task", good]).0, 2);
    assert_eq!(run(&["verify-algebroid", "/nonexistent/input.json"]).0, 2);
    assert_eq!(run(&["verify-algebroid"]).0, 2);
    assert_eq!(run(&["verify-algebroid", good, "--max-degree", "many"]).0, 2);
    assert_eq!(run(&["cech-cohomology", golden("cech-cohomology.json").to_str().unwrap(), "--grading", "bogus"]).0, 2);

    let dir = std::env::temp_dir().join(format!("algebroidkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad_json = dir.join("bad.json");
    std::fs::write(&bad_json, "{ not json").unwrap();
    assert_eq!(run(&["verify-algebroid", bad_json.to_str().unwrap()]).0, 2);
    let missing = dir.join("missing.json");
    std::fs::write(&missing, r#"{"schema": "algebroidkit/1"}"#).unwrap();
    let (code, _, err) = run(&["verify-algebroid", missing.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("algebroid"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn out_writes_the_report_to_a_file() {
    let dir = std::env::temp_dir().join(format!("algebroidkit-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("report.json");
    let input = golden("pullback.json");
    let (code, stdout, _) = run(&["pullback", input.to_str().unwrap(), "--json", "--out", target.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let (_, direct, _) = run(&["pullback", input.to_str().unwrap(), "--json"]);
    assert_eq!(std::fs::read_to_string(&target).unwrap(), direct);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn documents_round_trip() {
    for task in Task::ALL {
        for suffix in ["", ".corrupt"] {
            let text = std::fs::read_to_string(golden(&format!("{}{suffix}.json", task.name()))).unwrap();
            let loaded = load_str(&text).unwrap();
            let again = to_json(&loaded);
            assert_eq!(load_str(&again).unwrap(), loaded, "{task}{suffix}");
            assert_eq!(to_json(&load_str(&again).unwrap()), again);
        }
    }
}

#[test]
fn mutated_inputs_map_to_known_exit_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let alphabet: Vec<char> = "0123456789-/{}[],:\" eaxz".chars().collect();
    let opts = Options { max_degree: Some(1), grading: None };
    for task in Task::ALL {
        let text = std::fs::read_to_string(golden(&format!("{}.json", task.name()))).unwrap();
        for _ in 0..12 {
            let mut chars: Vec<char> = text.chars().collect();
            for _ in 0..rng.gen_range(1..4) {
                let i = rng.gen_range(0..chars.len());
                match rng.gen_range(0..3) {
                    0 => chars[i] = alphabet[rng.gen_range(0..alphabet.len())],
                    1 => {
                        chars.remove(i);
                    }
                    _ => chars.insert(i, alphabet[rng.gen_range(0..alphabet.len())]),
                }
            }
            let mutated: String = chars.into_iter().collect();
            let outcome = std::panic::catch_unwind(|| run_task(task, &mutated, &opts));
            let outcome = outcome.unwrap_or_else(|_| panic!("{task} panicked on\n{mutated}"));
            assert!([0, 1, 2].contains(&exit_code(&outcome)));
        }
    }
}

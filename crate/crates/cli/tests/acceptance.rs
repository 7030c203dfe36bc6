use std::fs;
use std::path::Path;
use std::process::Command;

use splitrec::acceptance::{run_library_criteria, Criterion};
use splitrec_cli::determinism_runs;

fn run_binary(args: &[String], dir: &Path) -> (bool, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_splitrec"))
        .args(args)
        .arg("--output")
        .arg(dir)
        .output()
        .expect("binary runs");
    (out.status.success(), out.stdout)
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Criterion {
    let scratch = tempfile::tempdir().unwrap();
    let mut files = 0;
    let mut problem = None;
    for (i, args) in determinism_runs().iter().enumerate() {
        let a = scratch.path().join(format!("{i}a"));
        let b = scratch.path().join(format!("{i}b"));
        let (ok_a, out_a) = run_binary(args, &a);
        let (ok_b, out_b) = run_binary(args, &b);
        if !(ok_a && ok_b) {
            problem = Some(format!("`{}` failed", args.join(" ")));
            break;
        }
        let (sa, sb) = (snapshot(&a), snapshot(&b));
        if out_a != out_b || sa != sb {
            problem = Some(format!("`{}` is not reproducible", args.join(" ")));
            break;
        }
        files += sa.len();
    }
    Criterion {
        id: 12,
        name: "CLI determinism",
        passed: problem.is_none(),
        detail: problem.unwrap_or_else(|| format!("{files} files byte-identical across separate processes")),
    }
}

fn main() {
    let mut report = run_library_criteria();
    report.push(determinism());
    println!("acceptance criteria");
    for c in &report {
        println!("{c}");
    }
    let failed: Vec<u32> = report.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    println!("{} of {} criteria passed", report.len() - failed.len(), report.len());
    if report.len() != 12 || !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

//! Driving the command line from code: a config file plus an override,
//! written to a scratch directory.

fn main() {
    let dir = std::env::temp_dir().join("wgslab-sweep");
    std::fs::create_dir_all(&dir).expect("scratch directory");
    let cfg = dir.join("avg.cfg");
    std::fs::write(&cfg, "subcommand = avg\nn = 400\nz = full\nT = 3pi\n").expect("config written");

    let code = wgslab::cli::run([
        "wgslab",
        "--config",
        cfg.to_str().unwrap(),
        "--alpha",
        "0:4:0.5",
        "--outdir",
        dir.to_str().unwrap(),
    ]);
    println!("exit code {code}");

    let mut csvs: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    csvs.sort();
    if let Some(latest) = csvs.last() {
        print!("{}", std::fs::read_to_string(latest).unwrap());
    }
}

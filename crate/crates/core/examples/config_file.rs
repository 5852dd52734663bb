//! Writing, editing and loading a run configuration.
//!
//! ```text
//! cargo run --example config_file
//! ```

use logistic_sde::cli::{self, parse_config, RunConfig};

const CUSTOM: &str = r#"
[coefficients]
r = "0.8 + sin(t)"
a = "1 + 0.5*cos(2*t)"
sigma = "0.6"

[scan]
window = 6.283185307179586
scan_end = 200.0

[sim]
x0 = 1.0
t_end = 100.0
seed = 7

[ensemble]
n_paths = 50
probe_times = [50.0, 100.0]
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Any run configuration can be written out and read back unchanged.
    let cfg = RunConfig::for_example(1)?;
    let text = cfg.to_toml_string();
    println!("--- example 1 as a config file ---\n{text}");
    assert_eq!(parse_config(&text)?, cfg);

    let custom = parse_config(CUSTOM)?;
    println!("custom system: r = {}, a = {}, sigma = {}", custom.spec.r(), custom.spec.a(), custom.spec.sigma());
    println!("ensemble: {} paths to t={}", custom.ensemble.n_paths, custom.ensemble.base.t_end);

    // Mistakes are reported with a line number or the offending field.
    for broken in ["[coefficients]\nr = \"sin(t\"\na = \"1\"\nsigma = \"0\"\n", "[coefficients]\nr = \"1\"\na = \"cos(t)\"\nsigma = \"0\"\n"] {
        println!("error: {}", parse_config(broken).unwrap_err());
    }

    // The command-line front end takes the same file.
    let dir = std::env::temp_dir().join("logistic-sde-config-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("custom.toml");
    std::fs::write(&path, CUSTOM)?;
    let args = ["logistic-sde", "check", "--config", path.to_str().unwrap()];
    let code = cli::run(args, &mut std::io::stdout(), &mut std::io::stderr());
    println!("exit code {code}");
    Ok(())
}

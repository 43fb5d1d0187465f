use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let env_seed = std::env::var(crlab_cli::SEED_ENV).ok();
    let out = crlab_cli::run_command(&argv, env_seed.as_deref());
    std::io::stdout().write_all(out.stdout.as_bytes()).ok();
    std::io::stderr().write_all(out.stderr.as_bytes()).ok();
    std::process::exit(out.code);
}

use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let env = std::env::var("MULTSPEC_PRECISION").ok();
    let outcome = multspec_cli::run_command(&argv, env.as_deref());
    for line in &outcome.diagnostics {
        eprintln!("{line}");
    }
    let mut stdout = std::io::stdout().lock();
    let written = match &outcome.info {
        Some(text) => stdout.write_all(text.as_bytes()),
        None => stdout.write_all(&outcome.report),
    };
    if written.and_then(|_| stdout.flush()).is_err() {
        std::process::exit(multspec_cli::EXIT_DOMAIN);
    }
    std::process::exit(outcome.exit_status);
}

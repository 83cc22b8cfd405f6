use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = gcae::cli::Cli::parse();
    if let Err(err) = gcae::cli::dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(gcae::cli::exit_code(&err));
    }
}

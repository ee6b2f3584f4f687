use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QCORR_LOG", "warn")).init();
    let cli = qcorr_cli::Cli::parse();
    std::process::exit(qcorr_cli::run(&cli));
}

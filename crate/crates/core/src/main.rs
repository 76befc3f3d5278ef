use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cluster_braid::cli::run())
}

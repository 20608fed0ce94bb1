fn main() {
    std::process::exit(negdep_qmc::cli::run_cli(std::env::args_os()));
}

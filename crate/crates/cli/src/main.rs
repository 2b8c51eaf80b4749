fn main() {
    std::process::exit(qse_cli::run(std::env::args_os()));
}

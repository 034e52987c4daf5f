fn main() {
    std::process::exit(nonfloquet_cli::run_cli(std::env::args_os()));
}

fn main() {
    std::process::exit(robustpoly::cli::run_cli(std::env::args_os()));
}

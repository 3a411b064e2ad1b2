fn main() {
    std::process::exit(hartogs::cli::run_cli(std::env::args_os()));
}

fn main() {
    std::process::exit(zladder_cli::run_cli(std::env::args_os()));
}

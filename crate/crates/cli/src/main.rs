fn main() {
    std::process::exit(extrema_cli::run(std::env::args_os()));
}

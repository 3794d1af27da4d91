fn main() {
    std::process::exit(evver::cli::run(std::env::args_os()));
}

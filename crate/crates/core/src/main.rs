fn main() {
    std::process::exit(doubling::cli::run(std::env::args_os()));
}

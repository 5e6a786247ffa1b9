fn main() {
    std::process::exit(crnforge::cli::run(std::env::args_os()));
}

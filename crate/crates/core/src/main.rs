fn main() {
    std::process::exit(nibm::cli::run(std::env::args_os()));
}

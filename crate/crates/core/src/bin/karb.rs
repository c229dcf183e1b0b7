fn main() {
    std::process::exit(karb::cli::run(std::env::args_os()));
}

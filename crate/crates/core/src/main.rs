fn main() {
    std::process::exit(ffap::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(njee::harness::cli::run(std::env::args_os()));
}

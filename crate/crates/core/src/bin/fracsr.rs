fn main() {
    std::process::exit(fracsr::cli::run(std::env::args_os()));
}

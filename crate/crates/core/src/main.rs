fn main() {
    std::process::exit(curveheat::cli::run(std::env::args_os()));
}

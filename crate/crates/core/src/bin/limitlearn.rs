fn main() {
    std::process::exit(limitlearn::cli::run(std::env::args_os()));
}

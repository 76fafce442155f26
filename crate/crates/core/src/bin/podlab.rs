fn main() {
    std::process::exit(podlab::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(wgslab::cli::run(std::env::args_os()));
}

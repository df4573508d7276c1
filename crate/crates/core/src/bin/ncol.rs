fn main() {
    std::process::exit(ncol::cli::run(std::env::args_os()));
}

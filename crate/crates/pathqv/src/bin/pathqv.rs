fn main() {
    std::process::exit(pathqv::cli::run(std::env::args_os()));
}

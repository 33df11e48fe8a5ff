fn main() {
    std::process::exit(wordburst::cli::run(std::env::args_os()));
}

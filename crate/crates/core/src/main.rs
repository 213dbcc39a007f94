fn main() {
    std::process::exit(contpois::cli::run(std::env::args_os()));
}

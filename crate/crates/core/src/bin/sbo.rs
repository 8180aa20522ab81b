fn main() {
    std::process::exit(superbloch::io::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(panolift_cli::run(std::env::args_os()));
}

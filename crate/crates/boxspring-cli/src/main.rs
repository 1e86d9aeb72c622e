fn main() {
    std::process::exit(boxspring_cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(funscan_cli::run(std::env::args_os()));
}

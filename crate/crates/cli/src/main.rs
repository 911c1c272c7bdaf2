fn main() {
    std::process::exit(slagkit_cli::run(std::env::args_os()));
}

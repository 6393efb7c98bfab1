fn main() {
    std::process::exit(berry_cli::execute(std::env::args_os()));
}

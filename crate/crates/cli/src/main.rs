fn main() {
    std::process::exit(varscale_cli::run(std::env::args_os()));
}

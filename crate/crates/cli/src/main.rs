fn main() {
    std::process::exit(relreg_cli::run(std::env::args_os()));
}

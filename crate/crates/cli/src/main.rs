fn main() {
    std::process::exit(fraclie_cli::main_with(std::env::args_os()));
}

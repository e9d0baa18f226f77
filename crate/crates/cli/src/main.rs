fn main() {
    std::process::exit(toyworld_cli::main_with_args(std::env::args_os()));
}

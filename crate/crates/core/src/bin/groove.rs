fn main() {
    std::process::exit(groove_core::cli::main_with_args(std::env::args_os()));
}

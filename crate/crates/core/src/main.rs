fn main() {
    std::process::exit(axired::cli::main_with_args(std::env::args_os()))
}

fn main() {
    std::process::exit(dwlab::cli::main_with_args(std::env::args_os()));
}

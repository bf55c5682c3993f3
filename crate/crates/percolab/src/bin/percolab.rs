fn main() {
    std::process::exit(percolab::cli::main_with_args(std::env::args_os()));
}

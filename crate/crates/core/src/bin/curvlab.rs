fn main() {
    std::process::exit(curvlab::cli::main_with_args(std::env::args_os()));
}

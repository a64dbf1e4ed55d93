fn main() {
    std::process::exit(ndtrace::cli::main_with_args(std::env::args_os()));
}

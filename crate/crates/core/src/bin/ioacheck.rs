fn main() {
    std::process::exit(ioacheck::cli::main_with_args(std::env::args_os()));
}

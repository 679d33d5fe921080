fn main() {
    std::process::exit(twoview::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(streamdecomp::cli::main_with_args(std::env::args_os()));
}

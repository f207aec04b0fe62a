fn main() {
    std::process::exit(hdisk::cli::main_with_args(std::env::args_os()));
}

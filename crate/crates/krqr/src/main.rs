fn main() {
    std::process::exit(krqr::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(relcrypt::cli::main_with_args(std::env::args_os()));
}

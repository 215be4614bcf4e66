fn main() {
    std::process::exit(signal_horizon::cli::main_with_args(std::env::args_os()));
}

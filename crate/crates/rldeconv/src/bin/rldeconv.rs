fn main() -> std::process::ExitCode {
    rldeconv::cli::main_with_args(std::env::args_os())
}

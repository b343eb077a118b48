fn main() {
    std::process::exit(planimetric_cli::main_with_args(std::env::args_os()));
}

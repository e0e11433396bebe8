fn main() {
    std::process::exit(spinbath_core::cli::run(std::env::args_os()));
}

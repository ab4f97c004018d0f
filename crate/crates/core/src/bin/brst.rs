fn main() {
    std::process::exit(brst_core::cli::run(std::env::args_os()));
}

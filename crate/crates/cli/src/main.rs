fn main() {
    std::process::exit(cgcv_cli::cli::run(std::env::args_os()));
}

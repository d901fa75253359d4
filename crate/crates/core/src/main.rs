fn main() {
    std::process::exit(optocool::cli::dispatch(std::env::args_os()));
}

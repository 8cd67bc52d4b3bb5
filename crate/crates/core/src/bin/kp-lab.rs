fn main() {
    std::process::exit(kplab::cli::dispatch(std::env::args_os()));
}

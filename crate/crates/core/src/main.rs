fn main() {
    std::process::exit(ctximpute::cli::run(std::env::args_os()));
}

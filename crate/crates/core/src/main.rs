fn main() {
    std::process::exit(prodnet::cli::run(std::env::args_os()));
}

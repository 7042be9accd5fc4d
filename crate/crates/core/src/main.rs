fn main() {
    std::process::exit(twistrad::cli::run(std::env::args_os()));
}

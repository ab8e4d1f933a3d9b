fn main() {
    std::process::exit(finquot::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(circlespec::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(dialam::cli::run(std::env::args_os()));
}

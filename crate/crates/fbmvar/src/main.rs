fn main() {
    std::process::exit(fbmvar::cli::run(std::env::args_os()));
}

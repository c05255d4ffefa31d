fn main() {
    std::process::exit(rieffel_deform::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(fracgeo::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(ciu::cli::run(std::env::args_os()));
}

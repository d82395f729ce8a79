fn main() {
    std::process::exit(resource_rent::cli::run(std::env::args_os()));
}

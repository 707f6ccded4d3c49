fn main() {
    std::process::exit(h1loc_cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(gdei::cli::run(std::env::args_os()));
}

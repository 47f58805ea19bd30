fn main() {
    std::process::exit(wreath_molien::cli::run(std::env::args_os()));
}

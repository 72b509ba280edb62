fn main() {
    std::process::exit(codewalk::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(opkern::cli::run(std::env::args_os()));
}

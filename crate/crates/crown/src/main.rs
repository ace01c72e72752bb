fn main() {
    std::process::exit(crown::run(std::env::args_os()));
}

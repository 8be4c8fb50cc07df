fn main() {
    std::process::exit(mixturecraft_cli::run(std::env::args_os()));
}

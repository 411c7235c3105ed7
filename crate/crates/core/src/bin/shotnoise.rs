fn main() {
    std::process::exit(shotnoise::cli::main_with_args(std::env::args_os()));
}
